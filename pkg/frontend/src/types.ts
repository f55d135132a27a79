/** Wire types for the /v1 retrieval service, mirrored field for field. */

export interface ComponentScores {
  dc: number;
  bc: number;
  cc: number;
  ra: number;
}

export interface ResultRow {
  rank: number;
  pub_id: number;
  title: string;
  year: number | null;
  score: number;
  components: ComponentScores;
}

export interface RetrieveOverrides {
  bc_min_score?: number;
  cc_min_score?: number;
  dc_weight?: number;
  bc_weight?: number;
  cc_weight?: number;
  pool_per_seed?: number;
}

export interface RetrieveRequest {
  seeds: number[];
  approach: string;
  k: number;
  tie_seed: number;
  overrides?: RetrieveOverrides;
}

export interface RetrieveResponse {
  approach: string;
  tie_seed: number;
  k: number;
  total_candidates: number;
  results: ResultRow[];
}

export interface ApproachInfo {
  name: string;
  description: string;
}

export interface ApproachesResponse {
  approaches: ApproachInfo[];
  default: string;
}

export interface HealthResponse {
  status: string;
  corpus_loaded: boolean;
  nodes?: number;
  edges?: number;
}

export interface PublicationResponse {
  pub_id: number;
  year: number | null;
  title: string;
  abstract: string;
  headings: string[];
  reference_count: number;
  citer_count: number;
}

/** Portable session snapshot (also the localStorage payload). */
export interface SessionExport {
  seeds: number[];
  approaches: string[];
  timestamp: string;
}
