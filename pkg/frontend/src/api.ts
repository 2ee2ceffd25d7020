// HTTP client for the studio service. Every response is an
// {ok, data|error} envelope; non-ok envelopes become ApiError throws.
//
// Mutations are serialized through a per-client promise chain so at most
// one mutating request per session is in flight at a time (the server
// orders writes per session; the client must not race itself).

import type {
  ApiErrorBody, Artboard, Batch, Constraints, EditResult, Preferences,
  QuickEditOffer, SessionState, Suggestion, TransformRule, VersionSnapshot,
  VisSpec,
} from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly details: Record<string, unknown>;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.name = "ApiError";
    this.code = body.code;
    this.status = status;
    this.details = body.details ?? {};
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  readonly base: string;
  private readonly fetchFn: FetchLike;
  private queue: Promise<unknown> = Promise.resolve();

  constructor(base = "", fetchFn?: FetchLike) {
    this.base = base.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "Content-Type": "application/json" } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const resp = await this.fetchFn(this.base + path, init);
    let envelope: { ok: boolean; data?: T; error?: ApiErrorBody };
    try {
      envelope = await resp.json();
    } catch {
      throw new ApiError(resp.status, { code: "BadResponse", message: `non-JSON response (${resp.status})` });
    }
    if (!envelope.ok || envelope.error) {
      throw new ApiError(resp.status, envelope.error ?? { code: "Unknown", message: "request failed" });
    }
    return envelope.data as T;
  }

  private get<T>(path: string): Promise<T> {
    return this.request<T>("GET", path);
  }

  /** Serialize mutations: each waits for the previous one, success or not. */
  private mutate<T>(method: string, path: string, body?: unknown): Promise<T> {
    const run = () => this.request<T>(method, path, body);
    const next = this.queue.then(run, run);
    this.queue = next.catch(() => undefined);
    return next;
  }

  health(): Promise<{ status: string }> {
    return this.get("/health");
  }

  // -- sessions

  createSession(payload: { spec: unknown; devices: unknown[]; id?: string }): Promise<SessionState> {
    return this.mutate("POST", "/sessions", payload);
  }

  getSession(sid: string): Promise<SessionState> {
    return this.get(`/sessions/${sid}`);
  }

  addArtboard(sid: string, device: unknown): Promise<{ artboard: Artboard; batch: Batch | null; warnings: string[] }> {
    return this.mutate("POST", `/sessions/${sid}/artboards`, { device });
  }

  setActive(sid: string, artboardId: string): Promise<{ activeArtboardId: string }> {
    return this.mutate("POST", `/sessions/${sid}/active`, { artboardId });
  }

  setSource(sid: string, artboardId: string): Promise<{ sourceArtboardId: string }> {
    return this.mutate("POST", `/sessions/${sid}/source`, { artboardId });
  }

  setLock(sid: string, key: string, kind: "element" | "position", on: boolean):
      Promise<{ elementLocks: string[]; positionLocks: string[] }> {
    return this.mutate("POST", `/sessions/${sid}/locks`, { key, kind, on });
  }

  // -- artboards

  toggleLock(aid: string): Promise<{ locked: boolean; activeArtboardId: string | null }> {
    return this.mutate("POST", `/artboards/${aid}/lock`);
  }

  soloLock(aid: string): Promise<{ lockedArtboards: string[]; activeArtboardId: string }> {
    return this.mutate("POST", `/artboards/${aid}/solo-lock`);
  }

  applyEdit(aid: string, rule: TransformRule, provenance: string): Promise<EditResult> {
    return this.mutate("POST", `/artboards/${aid}/edits`, { rule, provenance });
  }

  setEditUndone(aid: string, eid: string, undone: boolean): Promise<Artboard> {
    return this.mutate("POST", `/artboards/${aid}/edits/${eid}/undo`, { undone });
  }

  saveVersion(aid: string, label: string): Promise<VersionSnapshot> {
    return this.mutate("POST", `/artboards/${aid}/versions`, { label });
  }

  previewVersion(aid: string, vid: string): Promise<{ spec: VisSpec; svg: string }> {
    return this.get(`/artboards/${aid}/versions/${vid}/preview`);
  }

  checkoutVersion(aid: string, vid: string): Promise<Artboard> {
    return this.mutate("POST", `/artboards/${aid}/versions/${vid}/checkout`);
  }

  recommend(aid: string, opts: { maxSuggestions?: number; drasticRatio?: number } = {}):
      Promise<{ batch: Batch; suggestions: Suggestion[] }> {
    return this.mutate("POST", `/artboards/${aid}/recommend`, opts);
  }

  // -- suggestions

  listSuggestions(sid: string): Promise<{ suggestions: Suggestion[] }> {
    return this.get(`/sessions/${sid}/suggestions`);
  }

  seeSimilar(sugId: string, maxN?: number): Promise<{ suggestions: Suggestion[] }> {
    return this.mutate("POST", `/suggestions/${sugId}/similar`,
                       maxN === undefined ? {} : { maxSuggestions: maxN });
  }

  applySuggestion(sugId: string, bringEdits: boolean): Promise<{ artboard: Artboard; warnings: string[] }> {
    return this.mutate("POST", `/suggestions/${sugId}/apply`, { bringEdits });
  }

  branchSuggestion(sugId: string): Promise<{ artboard: Artboard; activeArtboardId: string }> {
    return this.mutate("POST", `/suggestions/${sugId}/branch`);
  }

  hideSuggestion(sugId: string): Promise<{ hidden: string; entryId: string; hiddenSignatures: string[] }> {
    return this.mutate("POST", `/suggestions/${sugId}/hide`);
  }

  revertHidden(sid: string, entryId: string): Promise<{ reverted: string; hiddenSignatures: string[] }> {
    return this.mutate("POST", `/sessions/${sid}/hidden/${entryId}/revert`);
  }

  // -- quick edits

  applyQuickEdit(sid: string, qeId: string, scope: "here" | "allUnlocked"):
      Promise<{ updatedArtboards: string[]; artboards: Record<string, Artboard> }> {
    return this.mutate("POST", `/sessions/${sid}/quick-edits/${qeId}/apply`, { scope });
  }

  dismissQuickEdit(sid: string, qeId: string): Promise<{ dismissed: string }> {
    return this.mutate("POST", `/sessions/${sid}/quick-edits/${qeId}/dismiss`);
  }

  // -- preferences, preview, export

  getPreferences(sid: string): Promise<Preferences> {
    return this.get(`/sessions/${sid}/preferences`);
  }

  putPreferences(sid: string, updates: Partial<Preferences>): Promise<Preferences> {
    return this.mutate("PUT", `/sessions/${sid}/preferences`, updates);
  }

  previewSession(sid: string): Promise<{ artboards: { artboardId: string; displayWidth: number; displayHeight: number; svg: string }[] }> {
    return this.get(`/sessions/${sid}/preview`);
  }

  exportSession(sid: string): Promise<{ html: string; breakpoints: { device: string; minWidth: number | null; maxWidth: number | null }[] }> {
    return this.get(`/sessions/${sid}/export`);
  }

  getConstraints(sid: string): Promise<Constraints> {
    return this.getSession(sid).then((s) => s.constraints);
  }
}
