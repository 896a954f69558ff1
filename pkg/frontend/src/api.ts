/** Typed client for the documented REST endpoints.
 *
 * Superseding queries cancel their in-flight predecessor of the same kind,
 * so stale responses never clobber fresh ones.
 */

import { FilterState, filterParams } from "./filters.js";
import {
  ExportResponse,
  HealthResponse,
  MetaResponse,
  PapersPage,
  ProjectionPoint,
  SimilarityRequest,
  SimilarityResult,
} from "./types.js";

export interface ProjectionContext {
  filter: FilterState;
  seeds: number[];
  outputs: number[];
  saved: number[];
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

function toQuery(params: [string, string][]): string {
  if (params.length === 0) return "";
  const search = new URLSearchParams();
  for (const [key, value] of params) search.append(key, value);
  return "?" + search.toString();
}

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export class ApiClient {
  private controllers = new Map<string, AbortController>();
  public requestLog: string[] = [];

  constructor(
    private base: string = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private abortable(kind: string): AbortSignal {
    this.controllers.get(kind)?.abort();
    const controller = new AbortController();
    this.controllers.set(kind, controller);
    return controller.signal;
  }

  private async request(kind: string, path: string, init?: RequestInit): Promise<Response> {
    const url = this.base + path;
    this.requestLog.push(path.split("?")[0]);
    const response = await this.fetchFn(url, { ...init, signal: this.abortable(kind) });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body && body.detail) detail = body.detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, detail);
    }
    return response;
  }

  async health(): Promise<HealthResponse> {
    const response = await this.request("health", "/api/health");
    return response.json();
  }

  async papers(offset: number, limit: number, filter: FilterState): Promise<PapersPage> {
    const params: [string, string][] = [
      ["offset", String(offset)],
      ["limit", String(limit)],
      ...filterParams(filter),
    ];
    const response = await this.request(`papers:${offset}`, "/api/papers" + toQuery(params));
    return response.json();
  }

  async meta(filter: FilterState): Promise<MetaResponse> {
    const response = await this.request("meta", "/api/meta" + toQuery(filterParams(filter)));
    return response.json();
  }

  async similarity(req: SimilarityRequest): Promise<SimilarityResult[]> {
    const response = await this.request("similarity", "/api/similarity", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
    return response.json();
  }

  async projection(ctx: ProjectionContext): Promise<ProjectionPoint[]> {
    const params = filterParams(ctx.filter);
    if (ctx.seeds.length) params.push(["seeds", ctx.seeds.join(",")]);
    if (ctx.outputs.length) params.push(["outputs", ctx.outputs.join(",")]);
    if (ctx.saved.length) params.push(["saved", ctx.saved.join(",")]);
    const response = await this.request("projection", "/api/projection" + toQuery(params));
    return response.json();
  }

  /** Returns both the parsed body and the verbatim bytes; the cart download
   *  writes the raw text so the exported file equals the response exactly. */
  async exportPapers(ids: number[]): Promise<{ raw: string; parsed: ExportResponse }> {
    const response = await this.request("export", "/api/export", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(ids),
    });
    const raw = await response.text();
    return { raw, parsed: JSON.parse(raw) as ExportResponse };
  }
}
