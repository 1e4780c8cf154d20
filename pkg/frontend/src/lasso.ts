/**
 * Screen-space lasso selection: project every point with the active camera
 * and keep the indices whose projections fall inside the polygon (even-odd
 * rule). Selection is by projected position only; an optional depth filter
 * drops points whose view depth is far behind the nearest hit.
 */
import { CameraLike, ScreenPoint, projectPoint } from "./camera.js";

export interface LassoOptions {
  /** keep only points within this view-space depth band behind the nearest
   * selected point; Infinity (default) selects through the shape */
  depthBand?: number;
}

export function pointInPolygon(px: number, py: number, polygon: ScreenPoint[]): boolean {
  let inside = false;
  for (let i = 0, j = polygon.length - 1; i < polygon.length; j = i++) {
    const xi = polygon[i].x;
    const yi = polygon[i].y;
    const xj = polygon[j].x;
    const yj = polygon[j].y;
    const crosses = yi > py !== yj > py
      && px < ((xj - xi) * (py - yi)) / (yj - yi) + xi;
    if (crosses) inside = !inside;
  }
  return inside;
}

export function lassoSelect(
  points: ArrayLike<number>, // flat xyz, length 3N
  camera: CameraLike,
  polygon: ScreenPoint[],
  width: number,
  height: number,
  options: LassoOptions = {},
): number[] {
  if (polygon.length < 3) return [];
  const n = Math.floor(points.length / 3);
  const view = camera.viewMatrix();
  const proj = camera.projectionMatrix(width / height);
  const hits: { index: number; depth: number }[] = [];
  for (let i = 0; i < n; i++) {
    const p = projectPoint(
      points[3 * i], points[3 * i + 1], points[3 * i + 2],
      view, proj, width, height,
    );
    if (!p.visible) continue;
    if (pointInPolygon(p.x, p.y, polygon)) {
      hits.push({ index: i, depth: p.depth });
    }
  }
  const band = options.depthBand ?? Infinity;
  if (band === Infinity || hits.length === 0) {
    return hits.map((h) => h.index);
  }
  // view depth is -Z: the nearest point has the largest depth value
  const nearest = Math.max(...hits.map((h) => h.depth));
  return hits.filter((h) => h.depth >= nearest - band).map((h) => h.index);
}
