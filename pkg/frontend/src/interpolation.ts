/**
 * Interpolation panel logic: a slider drag between two saved states turns
 * into a sequence of part-wise interpolation requests. Requests are issued
 * strictly one at a time (the session is single-writer) and alpha endpoints
 * reproduce the saved states exactly, because the server blends from the
 * stored source codes rather than the session's current ones.
 */
import { CloudPayload } from "./api.js";
import { SessionStore } from "./state.js";

export interface PanelConfig {
  sourceState: string;
  targetState?: string;
  targetSession?: string;
  /** selection mask; undefined interpolates the whole shape */
  indices?: number[];
}

export class InterpolationPanel {
  private queue: Promise<unknown> = Promise.resolve();
  readonly alphaLog: number[] = [];

  constructor(private store: SessionStore, public config: PanelConfig) {}

  /** slider callback: one request per step, serialized in order */
  setAlpha(alpha: number): Promise<CloudPayload> {
    if (alpha < 0 || alpha > 1) {
      return Promise.reject(new Error(`alpha out of range: ${alpha}`));
    }
    this.alphaLog.push(alpha);
    const run = () => this.store.interpolate({
      alpha,
      source_state: this.config.sourceState,
      target_state: this.config.targetState,
      target_session: this.config.targetSession,
      indices: this.config.indices,
    });
    const next = this.queue.then(run, run);
    this.queue = next.catch(() => undefined);
    return next;
  }

  /** drag helper: visit a list of slider positions in order */
  async drag(alphas: number[]): Promise<CloudPayload[]> {
    const out: CloudPayload[] = [];
    for (const a of alphas) {
      out.push(await this.setAlpha(a));
    }
    return out;
  }
}

export function dragSteps(from: number, to: number, step: number): number[] {
  const out: number[] = [];
  const n = Math.round(Math.abs(to - from) / step);
  for (let i = 0; i <= n; i++) {
    const a = from + Math.sign(to - from) * i * step;
    out.push(Math.round(a * 1e9) / 1e9);
  }
  return out;
}
