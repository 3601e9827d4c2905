/** Typed client for the editing service's JSON-over-HTTP API. */

import type {
  DocumentKind,
  HistoryView,
  ObjectRef,
  OperationView,
  PreviewView,
  Segment,
  SessionView,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly fetchImpl: FetchLike;

  constructor(
    private readonly baseUrl: string = "",
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (response.status === 204) return undefined as T;
    const payload: unknown = await response.json().catch(() => null);
    if (!response.ok) {
      const record = (payload ?? {}) as Record<string, unknown>;
      const code = typeof record.error === "string" ? record.error : "HttpError";
      const message =
        typeof record.message === "string" && record.message !== ""
          ? record.message
          : `request failed with status ${response.status}`;
      throw new ApiError(response.status, code, message);
    }
    return payload as T;
  }

  createSession(kind: DocumentKind, content: string): Promise<SessionView> {
    return this.request("POST", "/sessions", { kind, content });
  }

  getSession(id: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${id}`);
  }

  submitPrompt(
    id: string,
    segments: Segment[],
    selection: ObjectRef[],
  ): Promise<OperationView> {
    return this.request("POST", `/sessions/${id}/prompts`, { segments, selection });
  }

  preview(id: string, segments: Segment[], selection: ObjectRef[]): Promise<PreviewView> {
    return this.request("POST", `/sessions/${id}/preview`, { segments, selection });
  }

  invokeTool(id: string, toolId: string, nouns: ObjectRef[]): Promise<OperationView> {
    return this.request("POST", `/sessions/${id}/tools/${toolId}/invoke`, { nouns });
  }

  undo(id: string): Promise<HistoryView> {
    return this.request("POST", `/sessions/${id}/undo`);
  }

  redo(id: string): Promise<HistoryView> {
    return this.request("POST", `/sessions/${id}/redo`);
  }

  cancel(id: string): Promise<void> {
    return this.request("POST", `/sessions/${id}/cancel`);
  }
}
