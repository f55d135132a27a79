/** Thin fetch wrapper around the /v1 endpoints. */

import type {
  ApproachesResponse,
  HealthResponse,
  PublicationResponse,
  RetrieveRequest,
  RetrieveResponse,
} from "./types.js";

/** Anything that can answer the workbench's requests (real or fixture). */
export interface RetrievalApi {
  retrieve(req: RetrieveRequest): Promise<RetrieveResponse>;
  approaches(): Promise<ApproachesResponse>;
  health(): Promise<HealthResponse>;
  publication(pubId: number): Promise<PublicationResponse>;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly detail?: unknown,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

function describeDetail(detail: unknown): string | null {
  if (typeof detail === "string") return detail;
  if (detail && typeof detail === "object") {
    const message = (detail as { message?: unknown }).message;
    if (typeof message === "string") return message;
    return JSON.stringify(detail);
  }
  return null;
}

export class HttpApi implements RetrievalApi {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.baseUrl + path, init);
    let body: unknown = null;
    try {
      body = await res.json();
    } catch {
      /* non-JSON error body; fall through to statusText */
    }
    if (!res.ok) {
      const detail =
        body && typeof body === "object"
          ? (body as { detail?: unknown }).detail
          : undefined;
      throw new ApiError(
        res.status,
        describeDetail(detail) ?? `${res.status} ${res.statusText}`,
        detail,
      );
    }
    return body as T;
  }

  retrieve(req: RetrieveRequest): Promise<RetrieveResponse> {
    return this.request("/v1/retrieve", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
  }

  approaches(): Promise<ApproachesResponse> {
    return this.request("/v1/approaches");
  }

  health(): Promise<HealthResponse> {
    return this.request("/v1/health");
  }

  publication(pubId: number): Promise<PublicationResponse> {
    return this.request(`/v1/publications/${pubId}`);
  }
}
