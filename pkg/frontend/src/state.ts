/** Session state: the seed list, approach selection, and response cache.
 *
 * All the rules live here, DOM-free, so they can be tested directly:
 * seeds stay duplicate-free, promotions only come from displayed rows
 * and can be undone, responses are discarded when a newer request for
 * the same approach is already out, and any seed edit marks the cached
 * rankings stale until refetched.
 */

import type {
  RetrieveRequest,
  RetrieveResponse,
  SessionExport,
} from "./types.js";

export interface SeedEntry {
  pubId: number;
  title: string;
}

export interface Promotion {
  pubId: number;
  fromApproach: string;
}

export interface Notice {
  ok: boolean;
  message: string;
}

export class SessionState {
  private seedList: SeedEntry[] = [];
  private approachList: string[] = [];
  private responses = new Map<string, RetrieveResponse>();
  private promotions: Promotion[] = [];

  /** Monotone counters for freshness bookkeeping. */
  private nextSeq = new Map<string, number>();
  private appliedSeq = new Map<string, number>();
  private seedEpoch = 0;

  k = 50;
  tieSeed = 0;
  stale = false;

  // -- seed list ----------------------------------------------------------

  get seeds(): readonly SeedEntry[] {
    return this.seedList;
  }

  get seedIds(): number[] {
    return this.seedList.map((s) => s.pubId);
  }

  hasSeed(pubId: number): boolean {
    return this.seedList.some((s) => s.pubId === pubId);
  }

  addSeed(pubId: number, title = ""): Notice {
    if (!Number.isInteger(pubId) || pubId < 0) {
      return { ok: false, message: `not a publication id: ${pubId}` };
    }
    if (this.hasSeed(pubId)) {
      return { ok: false, message: `${pubId} is already a seed` };
    }
    this.seedList.push({ pubId, title });
    this.touchSeeds();
    return { ok: true, message: `added seed ${pubId}` };
  }

  removeSeed(pubId: number): Notice {
    const before = this.seedList.length;
    this.seedList = this.seedList.filter((s) => s.pubId !== pubId);
    if (this.seedList.length === before) {
      return { ok: false, message: `${pubId} is not a seed` };
    }
    // a removed seed can no longer anchor its promotion history entry
    this.promotions = this.promotions.filter((p) => p.pubId !== pubId);
    this.touchSeeds();
    return { ok: true, message: `removed seed ${pubId}` };
  }

  private touchSeeds(): void {
    this.seedEpoch += 1;
    this.stale = this.responses.size > 0;
  }

  // -- approaches ---------------------------------------------------------

  get approaches(): readonly string[] {
    return this.approachList;
  }

  selectApproaches(names: string[]): void {
    const seen = new Set<string>();
    this.approachList = names.filter((n) => {
      if (seen.has(n)) return false;
      seen.add(n);
      return true;
    });
    for (const name of [...this.responses.keys()]) {
      if (!this.approachList.includes(name)) this.responses.delete(name);
    }
  }

  // -- fetching -----------------------------------------------------------

  buildRequest(approach: string): RetrieveRequest {
    return {
      seeds: this.seedIds,
      approach,
      k: this.k,
      tie_seed: this.tieSeed,
    };
  }

  buildRequests(): RetrieveRequest[] {
    return this.approachList.map((a) => this.buildRequest(a));
  }

  /** Call before issuing a request; pass the ticket to acceptResponse. */
  beginRequest(approach: string): { seq: number; epoch: number } {
    const seq = (this.nextSeq.get(approach) ?? 0) + 1;
    this.nextSeq.set(approach, seq);
    return { seq, epoch: this.seedEpoch };
  }

  /** True if applied; false if a newer request made this response stale. */
  acceptResponse(
    approach: string,
    ticket: { seq: number; epoch: number },
    response: RetrieveResponse,
  ): boolean {
    const latest = this.nextSeq.get(approach) ?? 0;
    if (ticket.seq < latest) return false; // superseded while in flight
    if ((this.appliedSeq.get(approach) ?? 0) >= ticket.seq) return false;
    this.appliedSeq.set(approach, ticket.seq);
    this.responses.set(approach, response);
    if (ticket.epoch === this.seedEpoch) this.stale = false;
    return true;
  }

  get rankings(): ReadonlyMap<string, RetrieveResponse> {
    return this.responses;
  }

  // -- promotion ----------------------------------------------------------

  get promotedHistory(): readonly Promotion[] {
    return this.promotions;
  }

  /** The approaches currently displaying a given publication. */
  private approachesShowing(pubId: number): string[] {
    const out: string[] = [];
    for (const [approach, response] of this.responses) {
      if (response.results.some((r) => r.pub_id === pubId)) out.push(approach);
    }
    return out;
  }

  promoteSeed(pubId: number): Notice {
    if (this.hasSeed(pubId)) {
      return { ok: false, message: `${pubId} is already a seed` };
    }
    const showing = this.approachesShowing(pubId);
    const from = showing[0];
    if (from === undefined) {
      return { ok: false, message: `${pubId} is not in any result table` };
    }
    const row = this.responses
      .get(from)!
      .results.find((r) => r.pub_id === pubId)!;
    this.seedList.push({ pubId, title: row.title });
    this.promotions.push({ pubId, fromApproach: from });
    this.touchSeeds();
    return { ok: true, message: `promoted ${pubId} from ${from}` };
  }

  undoPromotion(): Notice {
    const last = this.promotions.pop();
    if (!last) return { ok: false, message: "nothing to undo" };
    this.seedList = this.seedList.filter((s) => s.pubId !== last.pubId);
    this.touchSeeds();
    return { ok: true, message: `un-promoted ${last.pubId}` };
  }

  // -- persistence --------------------------------------------------------

  exportSession(now: Date = new Date()): SessionExport {
    return {
      seeds: this.seedIds,
      approaches: [...this.approachList],
      timestamp: now.toISOString(),
    };
  }

  static importSession(data: unknown): SessionState {
    if (data === null || typeof data !== "object") {
      throw new Error("session import: not an object");
    }
    const { seeds, approaches } = data as Partial<SessionExport>;
    if (!Array.isArray(seeds) || !seeds.every((s) => Number.isInteger(s))) {
      throw new Error("session import: seeds must be integers");
    }
    if (
      !Array.isArray(approaches) ||
      !approaches.every((a) => typeof a === "string")
    ) {
      throw new Error("session import: approaches must be strings");
    }
    const state = new SessionState();
    for (const pubId of seeds) state.addSeed(pubId);
    state.selectApproaches(approaches);
    state.stale = false;
    return state;
  }
}

/** The subset of window.localStorage the session needs (test-injectable). */
export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export const STORAGE_KEY = "seedgraph-workbench-session";

export function saveSession(state: SessionState, storage: StorageLike): void {
  storage.setItem(STORAGE_KEY, JSON.stringify(state.exportSession()));
}

export function loadSession(storage: StorageLike): SessionState | null {
  const raw = storage.getItem(STORAGE_KEY);
  if (raw === null) return null;
  try {
    return SessionState.importSession(JSON.parse(raw));
  } catch {
    storage.removeItem(STORAGE_KEY); // drop corrupt payloads
    return null;
  }
}
