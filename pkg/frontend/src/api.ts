// Thin typed client over the comic service HTTP API. The UI never touches
// files or local persistence: everything round-trips through these calls.

import type { ComicDoc, Edit, FactEntry, GetResponse, PatchResponse } from "./types.js";

export class ConflictError extends Error {
  constructor(public currentRevision: number) {
    super(`revision conflict; server is at ${currentRevision}`);
  }
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function parseError(response: Response): Promise<never> {
  let message = `${response.status}`;
  let body: { error?: string; current_revision?: number } = {};
  try {
    body = await response.json();
    if (body.error) message = body.error;
  } catch {
    // non-JSON error body
  }
  if (response.status === 409) {
    throw new ConflictError(body.current_revision ?? -1);
  }
  throw new ApiError(response.status, message);
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: typeof fetch = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) await parseError(response);
    return response;
  }

  async uploadEnsemble(doc: unknown): Promise<{ ensemble_id: string; warnings: string[] }> {
    const r = await this.request("/ensembles", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(doc),
    });
    return r.json();
  }

  async createComic(
    ensembleId: string,
    params?: Record<string, unknown>,
  ): Promise<{ comic_id: string; document: ComicDoc }> {
    const r = await this.request("/comics", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ ensemble_id: ensembleId, params: params ?? {} }),
    });
    return r.json();
  }

  async getComic(comicId: string): Promise<GetResponse> {
    const r = await this.request(`/comics/${comicId}`);
    return r.json();
  }

  async patchComic(comicId: string, edit: Edit, revision: number): Promise<PatchResponse> {
    const r = await this.request(`/comics/${comicId}`, {
      method: "PATCH",
      headers: { "Content-Type": "application/json", "If-Match": String(revision) },
      body: JSON.stringify(edit),
    });
    return r.json();
  }

  async getFacts(comicId: string, chartId: string): Promise<FactEntry[]> {
    const r = await this.request(`/comics/${comicId}/facts/${chartId}`);
    const body = (await r.json()) as { facts: FactEntry[] };
    return body.facts;
  }

  exportUrl(comicId: string, format: "html" | "json"): string {
    return `${this.baseUrl}/comics/${comicId}/export?format=${format}`;
  }
}
