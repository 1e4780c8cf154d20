/**
 * Client-side session state: the current payload, selection, saved-state
 * gallery, and the optimistic version counter. Mutations that lose a version
 * race (409) refresh the server version once and replay, so a stale tab
 * converges instead of wedging.
 */
import { ApiError, CloudPayload, StudioApi } from "./api.js";

export interface RequestLogEntry {
  kind: string;
  alpha?: number;
  tookMs: number;
}

export class SessionStore {
  sessionId = "";
  version = 0;
  payload: CloudPayload | null = null;
  selection: number[] = [];
  states: string[] = [];
  requestLog: RequestLogEntry[] = [];

  constructor(private api: StudioApi) {}

  async open(checkpoint: string, seed?: number): Promise<void> {
    const created = await this.api.createSession(checkpoint, seed);
    this.sessionId = created.session;
    this.version = created.version;
    this.states = [];
    this.selection = [];
    await this.refreshCloud();
  }

  async refreshCloud(): Promise<CloudPayload> {
    const t0 = performance.now();
    const payload = await this.api.generate(this.sessionId);
    this.accept(payload, "generate", t0);
    return payload;
  }

  private accept(payload: CloudPayload, kind: string, t0: number, alpha?: number): void {
    if (!payload || payload.n <= 0
        || payload.points.length !== 3 * payload.n
        || payload.colors.length !== 3 * payload.n) {
      // keep the previous view; the caller surfaces the banner
      throw new Error(`malformed cloud payload from ${kind}`);
    }
    this.payload = payload;
    this.version = payload.version;
    this.selection = payload.selection;
    this.requestLog.push({ kind, alpha, tookMs: performance.now() - t0 });
  }

  /** run a version-carrying mutation; on conflict, resync once and retry */
  private async mutate(
    kind: string,
    send: (version: number) => Promise<CloudPayload>,
    alpha?: number,
  ): Promise<CloudPayload> {
    const t0 = performance.now();
    try {
      const payload = await send(this.version);
      this.accept(payload, kind, t0, alpha);
      return payload;
    } catch (err) {
      if (err instanceof ApiError && err.body.code === "version-conflict"
          && err.body.expected !== undefined) {
        this.version = err.body.expected;
        const payload = await send(this.version);
        this.accept(payload, kind, t0, alpha);
        return payload;
      }
      throw err;
    }
  }

  select(indices: number[]): Promise<CloudPayload> {
    return this.mutate("select", (v) => this.api.select(this.sessionId, indices, v));
  }

  resamplePart(seed: number, mode = "part"): Promise<CloudPayload> {
    return this.mutate("edit", (v) => this.api.edit(this.sessionId, seed, v, mode));
  }

  interpolate(req: {
    alpha: number;
    source_state?: string;
    target_state?: string;
    target_session?: string;
    indices?: number[];
  }): Promise<CloudPayload> {
    return this.mutate(
      "interpolate",
      (v) => this.api.interpolate(this.sessionId, { ...req, version: v }),
      req.alpha,
    );
  }

  compose(sources: { state: string; indices: number[] }[]): Promise<CloudPayload> {
    return this.mutate("compose", (v) => this.api.compose(this.sessionId, sources, v));
  }

  async saveState(name: string): Promise<void> {
    const out = await this.api.saveState(this.sessionId, name);
    this.states = out.states;
  }

  restoreState(name: string): Promise<CloudPayload> {
    return this.mutate("restore", (v) => this.api.restoreState(this.sessionId, name, v));
  }
}
