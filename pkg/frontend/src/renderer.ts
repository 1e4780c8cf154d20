/**
 * Canvas-2D point sprite renderer: project, painter-sort by view depth,
 * draw. Selected points render larger with a highlight ring so the lasso
 * result is visible immediately.
 */
import { CameraLike, projectPoint } from "./camera.js";

export interface DrawStats {
  drawn: number;
  culled: number;
}

export interface Context2DLike {
  canvas: { width: number; height: number };
  fillStyle: string | CanvasGradient | CanvasPattern;
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
}

export function renderCloud(
  ctx: Context2DLike,
  points: ArrayLike<number>,
  colors: ArrayLike<number>,
  camera: CameraLike,
  selection: Iterable<number> = [],
): DrawStats {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  const n = Math.floor(points.length / 3);
  const view = camera.viewMatrix();
  const proj = camera.projectionMatrix(width / height);
  const selected = new Set(selection);

  const order: { i: number; x: number; y: number; depth: number }[] = [];
  let culled = 0;
  for (let i = 0; i < n; i++) {
    const p = projectPoint(
      points[3 * i], points[3 * i + 1], points[3 * i + 2],
      view, proj, width, height,
    );
    if (!p.visible || p.x < -4 || p.x > width + 4 || p.y < -4 || p.y > height + 4) {
      culled++;
      continue;
    }
    order.push({ i, x: p.x, y: p.y, depth: p.depth });
  }
  order.sort((a, b) => a.depth - b.depth); // far first

  for (const { i, x, y } of order) {
    const r = Math.round(255 * colors[3 * i]);
    const g = Math.round(255 * colors[3 * i + 1]);
    const b = Math.round(255 * colors[3 * i + 2]);
    if (selected.has(i)) {
      ctx.fillStyle = "#ffffff";
      ctx.beginPath();
      ctx.arc(x, y, 3.4, 0, 2 * Math.PI);
      ctx.fill();
    }
    ctx.fillStyle = `rgb(${r},${g},${b})`;
    ctx.beginPath();
    ctx.arc(x, y, selected.has(i) ? 2.6 : 2.0, 0, 2 * Math.PI);
    ctx.fill();
  }
  return { drawn: order.length, culled };
}

export function drawLassoOutline(
  ctx: CanvasRenderingContext2D,
  polygon: { x: number; y: number }[],
): void {
  if (polygon.length < 2) return;
  ctx.strokeStyle = "rgba(255,255,255,0.8)";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(polygon[0].x, polygon[0].y);
  for (const p of polygon.slice(1)) ctx.lineTo(p.x, p.y);
  ctx.closePath();
  ctx.stroke();
  ctx.setLineDash([]);
}
