/**
 * Studio wiring: one active session per tab, orbit/zoom on drag, lasso mode
 * for part selection, resample/interpolate/compose panels, saved-state
 * gallery, SPPC export. Every displayed cloud is a server payload.
 */
import { StudioApi } from "./api.js";
import { OrbitCamera } from "./camera.js";
import { InterpolationPanel, dragSteps } from "./interpolation.js";
import { lassoSelect } from "./lasso.js";
import { drawLassoOutline, renderCloud } from "./renderer.js";
import { SessionStore } from "./state.js";

const api = new StudioApi("");
const store = new SessionStore(api);
const camera = new OrbitCamera();

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusEl = document.getElementById("status")!;
const latencyEl = document.getElementById("latency")!;
const stateList = document.getElementById("states")!;
const alphaSlider = document.getElementById("alpha") as HTMLInputElement;
const checkpointSelect = document.getElementById("checkpoint") as HTMLSelectElement;
const depthToggle = document.getElementById("depth-filter") as HTMLInputElement;

let lassoMode = false;
let polygon: { x: number; y: number }[] = [];
let panel: InterpolationPanel | null = null;

function setStatus(text: string, isError = false): void {
  statusEl.textContent = text;
  statusEl.className = isError ? "error" : "";
}

function redraw(): void {
  if (!store.payload) return;
  const stats = renderCloud(ctx, store.payload.points, store.payload.colors,
    camera, store.selection);
  if (polygon.length > 1) drawLassoOutline(ctx, polygon);
  const last = store.requestLog[store.requestLog.length - 1];
  if (last) latencyEl.textContent = `${last.kind}: ${last.tookMs.toFixed(0)} ms`;
  setStatus(`session ${store.sessionId} v${store.version} — `
    + `${stats.drawn} pts, ${store.selection.length} selected`);
}

function renderStates(): void {
  stateList.innerHTML = "";
  for (const name of store.states) {
    const li = document.createElement("li");
    li.textContent = name;
    const restore = document.createElement("button");
    restore.textContent = "restore";
    restore.onclick = () => guard(async () => {
      await store.restoreState(name);
      redraw();
    });
    const asTarget = document.createElement("button");
    asTarget.textContent = "interp target";
    asTarget.onclick = () => startInterpolation(name);
    li.append(" ", restore, " ", asTarget);
    stateList.appendChild(li);
  }
}

async function guard(fn: () => Promise<void>): Promise<void> {
  try {
    await fn();
  } catch (err) {
    // keep the previous view; surface the failure in the banner
    setStatus(String(err), true);
  }
}

function startInterpolation(targetState: string): void {
  guard(async () => {
    const sourceName = `__interp_src_${Date.now()}`;
    await store.saveState(sourceName);
    panel = new InterpolationPanel(store, {
      sourceState: sourceName,
      targetState,
      indices: store.selection.length ? [...store.selection] : undefined,
    });
    alphaSlider.disabled = false;
    alphaSlider.value = "0";
    setStatus(`interpolating toward ${targetState} `
      + `(${store.selection.length ? "selected part" : "whole shape"})`);
  });
}

function canvasPos(ev: MouseEvent): { x: number; y: number } {
  const rect = canvas.getBoundingClientRect();
  return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
}

function bindControls(): void {
  let dragging = false;
  let lastX = 0;
  let lastY = 0;

  canvas.addEventListener("mousedown", (ev) => {
    if (lassoMode) {
      polygon = [canvasPos(ev)];
    } else {
      dragging = true;
    }
    lastX = ev.clientX;
    lastY = ev.clientY;
  });
  canvas.addEventListener("mousemove", (ev) => {
    if (lassoMode && polygon.length > 0 && ev.buttons === 1) {
      polygon.push(canvasPos(ev));
      redraw();
    } else if (dragging) {
      camera.rotate((ev.clientX - lastX) * 0.01, (ev.clientY - lastY) * 0.01);
      lastX = ev.clientX;
      lastY = ev.clientY;
      redraw();
    }
  });
  window.addEventListener("mouseup", () => {
    dragging = false;
    if (lassoMode && polygon.length >= 3 && store.payload) {
      const indices = lassoSelect(
        store.payload.points, camera, polygon, canvas.width, canvas.height,
        { depthBand: depthToggle.checked ? 0.35 : Infinity },
      );
      polygon = [];
      guard(async () => {
        await store.select(indices);
        redraw();
      });
    } else if (lassoMode) {
      polygon = [];
      setStatus("lasso needs at least 3 points — selection unchanged");
      redraw();
    }
  });
  canvas.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    camera.zoom(ev.deltaY > 0 ? 1.1 : 0.9);
    redraw();
  });

  (document.getElementById("new-session") as HTMLButtonElement).onclick = () =>
    guard(async () => {
      await store.open(checkpointSelect.value);
      panel = null;
      alphaSlider.disabled = true;
      renderStates();
      redraw();
    });

  (document.getElementById("lasso-toggle") as HTMLButtonElement).onclick = (ev) => {
    lassoMode = !lassoMode;
    (ev.target as HTMLButtonElement).textContent =
      lassoMode ? "lasso: on" : "lasso: off";
  };

  (document.getElementById("resample") as HTMLButtonElement).onclick = () =>
    guard(async () => {
      await store.resamplePart(Math.floor(Math.random() * 2 ** 31));
      redraw();
    });

  (document.getElementById("save-state") as HTMLButtonElement).onclick = () =>
    guard(async () => {
      const name = prompt("state name?", `state_${store.states.length}`);
      if (!name) return;
      await store.saveState(name);
      renderStates();
    });

  (document.getElementById("compose") as HTMLButtonElement).onclick = () =>
    guard(async () => {
      if (store.states.length < 2 || store.selection.length === 0) {
        setStatus("compose needs two saved states and a selection", true);
        return;
      }
      const [a, b] = store.states.slice(-2);
      const mask = [...store.selection];
      const rest: number[] = [];
      const inMask = new Set(mask);
      for (let i = 0; i < (store.payload?.n ?? 0); i++) {
        if (!inMask.has(i)) rest.push(i);
      }
      await store.compose([
        { state: a, indices: rest },
        { state: b, indices: mask },
      ]);
      redraw();
    });

  (document.getElementById("export") as HTMLAnchorElement).onclick = (ev) => {
    (ev.target as HTMLAnchorElement).href = api.exportUrl(store.sessionId);
  };

  alphaSlider.addEventListener("input", () => {
    if (!panel) return;
    const alpha = parseFloat(alphaSlider.value);
    guard(async () => {
      await panel!.setAlpha(alpha);
      redraw();
    });
  });
}

async function boot(): Promise<void> {
  bindControls();
  const cks = await api.listCheckpoints();
  for (const ck of cks.checkpoints) {
    const opt = document.createElement("option");
    opt.value = ck.id;
    opt.textContent = `${ck.id} (n=${ck.n}, d=${ck.d})`;
    checkpointSelect.appendChild(opt);
  }
  if (cks.checkpoints.length > 0) {
    await store.open(cks.checkpoints[0].id);
    renderStates();
    redraw();
  } else {
    setStatus("no checkpoints loaded on the server", true);
  }
}

boot().catch((err) => setStatus(String(err), true));

export { dragSteps }; // re-export keeps the helper tree-shaken into the bundle
