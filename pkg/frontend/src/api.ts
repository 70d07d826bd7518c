import type {
  AcceptRequest,
  CandidatePage,
  ExportPayload,
  KwicSnippet,
  LabelState,
  PreviewRow,
  SessionInfo,
} from "./types.js";

export type AcceptResult =
  | { ok: true; state: LabelState }
  | { ok: false; conflict: boolean; detail: string };

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

/** Thin typed client; every displayed number comes from these responses. */
export class ApiClient {
  constructor(private readonly base: string = "") {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await fetch(this.base + path);
    if (!resp.ok) {
      throw new ApiError(`GET ${path} failed: ${resp.status}`, resp.status);
    }
    return (await resp.json()) as T;
  }

  session(): Promise<SessionInfo> {
    return this.getJson<SessionInfo>("/session");
  }

  labels(): Promise<{ labels: (LabelState & { entries: number })[] }> {
    return this.getJson("/labels");
  }

  candidates(label: string, page = 1, pageSize = 50): Promise<CandidatePage> {
    const params = new URLSearchParams({
      label,
      page: String(page),
      page_size: String(pageSize),
    });
    return this.getJson<CandidatePage>(`/candidates?${params}`);
  }

  kwic(token: string, limit = 8): Promise<{ token: string; snippets: KwicSnippet[] }> {
    const params = new URLSearchParams({ token, limit: String(limit) });
    return this.getJson(`/kwic?${params}`);
  }

  preview(label: string): Promise<PreviewRow> {
    const params = new URLSearchParams({ label });
    return this.getJson<PreviewRow>(`/preview?${params}`);
  }

  exportVocabularies(): Promise<ExportPayload> {
    return this.getJson<ExportPayload>("/export");
  }

  async accept(request: AcceptRequest): Promise<AcceptResult> {
    const resp = await fetch(this.base + "/accept", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
    if (resp.ok) {
      return { ok: true, state: (await resp.json()) as LabelState };
    }
    let detail = `accept failed: ${resp.status}`;
    try {
      const body = (await resp.json()) as { detail?: string };
      if (body.detail) {
        detail = body.detail;
      }
    } catch {
      // non-JSON error body; keep the status text
    }
    return { ok: false, conflict: resp.status === 409, detail };
  }
}
