/**
 * Typed client for the studio HTTP API. The UI never computes shapes
 * locally; every displayed cloud comes back through these calls.
 */

export interface CloudPayload {
  session: string;
  version: number;
  n: number;
  points: number[]; // flat xyz, length 3n
  colors: number[]; // flat rgb, length 3n
  selection: number[];
  codes_hash: string;
  unselected_codes_hash: string;
}

export interface SessionInfo {
  session: string;
  version: number;
  n: number;
  d: number;
  selection: number[];
  states: string[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  expected?: number;
  field?: string;
}

export class ApiError extends Error {
  constructor(public status: number, public body: ApiErrorBody) {
    super(`${body.code}: ${body.message}`);
  }
}

export class StudioApi {
  constructor(private base: string = "") {}

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(this.base + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) {
      let parsed: ApiErrorBody = { code: "unknown", message: resp.statusText };
      try {
        parsed = (await resp.json()).error;
      } catch {
        /* non-JSON error body; keep the status text */
      }
      throw new ApiError(resp.status, parsed);
    }
    return (await resp.json()) as T;
  }

  listCheckpoints(): Promise<{ checkpoints: { id: string; n: number; d: number }[] }> {
    return this.call("GET", "/checkpoints");
  }

  createSession(checkpoint: string, seed?: number): Promise<{ session: string; n: number; d: number; version: number }> {
    return this.call("POST", "/sessions", { checkpoint, seed });
  }

  sessionInfo(sid: string): Promise<SessionInfo> {
    return this.call("GET", `/sessions/${sid}`);
  }

  generate(sid: string): Promise<CloudPayload> {
    return this.call("POST", `/sessions/${sid}/generate`);
  }

  select(sid: string, indices: number[], version: number): Promise<CloudPayload> {
    return this.call("POST", `/sessions/${sid}/select`, { indices, version });
  }

  edit(sid: string, seed: number, version: number, mode = "part"): Promise<CloudPayload> {
    return this.call("POST", `/sessions/${sid}/edit`, { seed, version, mode });
  }

  interpolate(
    sid: string,
    req: {
      alpha: number;
      version: number;
      source_state?: string;
      target_state?: string;
      target_session?: string;
      indices?: number[];
    },
  ): Promise<CloudPayload> {
    return this.call("POST", `/sessions/${sid}/interpolate`, req);
  }

  compose(
    sid: string,
    sources: { state: string; indices: number[] }[],
    version: number,
  ): Promise<CloudPayload> {
    return this.call("POST", `/sessions/${sid}/compose`, { sources, version });
  }

  saveState(sid: string, name: string): Promise<{ states: string[]; version: number }> {
    return this.call("POST", `/sessions/${sid}/states`, { name });
  }

  restoreState(sid: string, name: string, version: number): Promise<CloudPayload> {
    return this.call("POST", `/sessions/${sid}/states/${name}/restore`, { version });
  }

  exportUrl(sid: string): string {
    return `${this.base}/sessions/${sid}/export`;
  }
}
