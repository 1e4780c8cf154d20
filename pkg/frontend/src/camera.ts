/**
 * Orbit camera and the projection math shared by the renderer and the lasso.
 *
 * Matrices are column-major 4x4 (same convention as WebGL), but everything
 * here runs on the CPU so the lasso test can drive it with exact numbers.
 */

export type Mat4 = Float64Array; // 16 entries, column-major

export interface ScreenPoint {
  x: number;
  y: number;
}

export interface ProjectedPoint extends ScreenPoint {
  /** view-space depth (more negative = farther along -Z) */
  depth: number;
  /** false when the point fell behind the camera */
  visible: boolean;
}

export function identity(): Mat4 {
  const m = new Float64Array(16);
  m[0] = m[5] = m[10] = m[15] = 1;
  return m;
}

export function multiply(a: Mat4, b: Mat4): Mat4 {
  const out = new Float64Array(16);
  for (let c = 0; c < 4; c++) {
    for (let r = 0; r < 4; r++) {
      let acc = 0;
      for (let k = 0; k < 4; k++) acc += a[k * 4 + r] * b[c * 4 + k];
      out[c * 4 + r] = acc;
    }
  }
  return out;
}

export function lookAt(eye: number[], center: number[], up: number[]): Mat4 {
  const sub = (p: number[], q: number[]) => [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
  const cross = (p: number[], q: number[]) => [
    p[1] * q[2] - p[2] * q[1],
    p[2] * q[0] - p[0] * q[2],
    p[0] * q[1] - p[1] * q[0],
  ];
  const norm = (p: number[]) => {
    const l = Math.hypot(p[0], p[1], p[2]);
    return [p[0] / l, p[1] / l, p[2] / l];
  };
  const f = norm(sub(center, eye));
  const s = norm(cross(f, up));
  const u = cross(s, f);
  const m = identity();
  m[0] = s[0]; m[4] = s[1]; m[8] = s[2];
  m[1] = u[0]; m[5] = u[1]; m[9] = u[2];
  m[2] = -f[0]; m[6] = -f[1]; m[10] = -f[2];
  m[12] = -(s[0] * eye[0] + s[1] * eye[1] + s[2] * eye[2]);
  m[13] = -(u[0] * eye[0] + u[1] * eye[1] + u[2] * eye[2]);
  m[14] = f[0] * eye[0] + f[1] * eye[1] + f[2] * eye[2];
  return m;
}

export function perspective(fovY: number, aspect: number, near: number, far: number): Mat4 {
  const f = 1 / Math.tan(fovY / 2);
  const m = new Float64Array(16);
  m[0] = f / aspect;
  m[5] = f;
  m[10] = (far + near) / (near - far);
  m[11] = -1;
  m[14] = (2 * far * near) / (near - far);
  return m;
}

export function orthographic(
  left: number, right: number, bottom: number, top: number,
  near: number, far: number,
): Mat4 {
  const m = identity();
  m[0] = 2 / (right - left);
  m[5] = 2 / (top - bottom);
  m[10] = -2 / (far - near);
  m[12] = -(right + left) / (right - left);
  m[13] = -(top + bottom) / (top - bottom);
  m[14] = -(far + near) / (far - near);
  return m;
}

export interface CameraLike {
  viewMatrix(): Mat4;
  projectionMatrix(aspect: number): Mat4;
}

/** Yaw/pitch/distance orbit around a target point, perspective projection. */
export class OrbitCamera implements CameraLike {
  yaw = 0.6;
  pitch = 0.4;
  distance = 3.0;
  target = [0, 0, 0];
  fovY = Math.PI / 4;

  eye(): number[] {
    const cp = Math.cos(this.pitch);
    return [
      this.target[0] + this.distance * cp * Math.sin(this.yaw),
      this.target[1] + this.distance * Math.sin(this.pitch),
      this.target[2] + this.distance * cp * Math.cos(this.yaw),
    ];
  }

  rotate(dYaw: number, dPitch: number): void {
    this.yaw += dYaw;
    const limit = Math.PI / 2 - 0.01;
    this.pitch = Math.max(-limit, Math.min(limit, this.pitch + dPitch));
  }

  zoom(factor: number): void {
    this.distance = Math.max(0.2, Math.min(20, this.distance * factor));
  }

  viewMatrix(): Mat4 {
    return lookAt(this.eye(), this.target, [0, 1, 0]);
  }

  projectionMatrix(aspect: number): Mat4 {
    return perspective(this.fovY, aspect, 0.01, 100);
  }
}

/**
 * Axis-aligned orthographic camera looking down -Z; used by tests as an
 * analytically predictable stand-in for the orbit camera.
 */
export class OrthoCamera implements CameraLike {
  constructor(public halfExtent = 1.0, public eyeZ = 5.0) {}

  viewMatrix(): Mat4 {
    return lookAt([0, 0, this.eyeZ], [0, 0, 0], [0, 1, 0]);
  }

  projectionMatrix(aspect: number): Mat4 {
    const h = this.halfExtent;
    return orthographic(-h * aspect, h * aspect, -h, h, 0.01, 100);
  }
}

/**
 * Project one world-space point to pixel coordinates: screen = viewport
 * transform of (projection * view * p).
 */
export function projectPoint(
  x: number, y: number, z: number,
  view: Mat4, proj: Mat4, width: number, height: number,
): ProjectedPoint {
  const vx = view[0] * x + view[4] * y + view[8] * z + view[12];
  const vy = view[1] * x + view[5] * y + view[9] * z + view[13];
  const vz = view[2] * x + view[6] * y + view[10] * z + view[14];
  const cx = proj[0] * vx + proj[4] * vy + proj[8] * vz + proj[12];
  const cy = proj[1] * vx + proj[5] * vy + proj[9] * vz + proj[13];
  const cw = proj[3] * vx + proj[7] * vy + proj[11] * vz + proj[15];
  if (cw <= 0) {
    return { x: NaN, y: NaN, depth: vz, visible: false };
  }
  const ndcX = cx / cw;
  const ndcY = cy / cw;
  return {
    x: (ndcX + 1) * 0.5 * width,
    y: (1 - ndcY) * 0.5 * height,
    depth: vz,
    visible: true,
  };
}
