import { describe, expect, it } from "vitest";

import { ApiError, CloudPayload } from "../src/api.js";
import { SessionStore } from "../src/state.js";

function payload(version: number, value: number): CloudPayload {
  return {
    session: "s", version, n: 1, points: [value, 0, 0], colors: [0, 0, 0],
    selection: [], codes_hash: `h${version}`, unselected_codes_hash: "u",
  };
}

describe("SessionStore version handling", () => {
  it("tracks the server version across mutations", async () => {
    let serverVersion = 0;
    const api = {
      async select(_sid: string, _idx: number[], version: number) {
        expect(version).toBe(serverVersion);
        serverVersion += 1;
        return payload(serverVersion, 1);
      },
    };
    const store = new SessionStore(api as never);
    store.sessionId = "s";
    await store.select([1, 2]);
    await store.select([3]);
    expect(store.version).toBe(2);
  });

  it("auto-refreshes once on a version conflict and replays", async () => {
    // server is at version 5; the stale client thinks it is at 0
    let calls = 0;
    const api = {
      async edit(_sid: string, _seed: number, version: number) {
        calls += 1;
        if (version !== 5) {
          throw new ApiError(409, {
            code: "version-conflict", message: "stale", expected: 5,
          });
        }
        return payload(6, 2);
      },
    };
    const store = new SessionStore(api as never);
    store.sessionId = "s";
    store.version = 0;
    const out = await store.resamplePart(7);
    expect(calls).toBe(2);
    expect(out.version).toBe(6);
    expect(store.version).toBe(6);
  });

  it("propagates non-conflict errors", async () => {
    const api = {
      async edit() {
        throw new ApiError(400, { code: "invalid-argument", message: "bad" });
      },
    };
    const store = new SessionStore(api as never);
    store.sessionId = "s";
    await expect(store.resamplePart(1)).rejects.toThrow(/invalid-argument/);
  });

  it("rejects malformed payloads and retains the previous view", async () => {
    let bad = false;
    const api = {
      async generate() {
        if (bad) {
          return { session: "s", version: 1, n: 0, points: [], colors: [],
            selection: [], codes_hash: "", unselected_codes_hash: "" };
        }
        return payload(0, 1);
      },
    };
    const store = new SessionStore(api as never);
    store.sessionId = "s";
    await store.refreshCloud();
    const good = store.payload;
    bad = true;
    await expect(store.refreshCloud()).rejects.toThrow(/malformed/);
    expect(store.payload).toBe(good); // previous view retained
  });

  it("keeps a request log with latency entries", async () => {
    const api = {
      async generate() {
        return payload(0, 3);
      },
    };
    const store = new SessionStore(api as never);
    store.sessionId = "s";
    await store.refreshCloud();
    expect(store.requestLog).toHaveLength(1);
    expect(store.requestLog[0].kind).toBe("generate");
    expect(store.requestLog[0].tookMs).toBeGreaterThanOrEqual(0);
  });
});
