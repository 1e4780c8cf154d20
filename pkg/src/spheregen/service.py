"""Session-oriented HTTP API for generation and manipulation.

Checkpoints are shared read-only; all mutable state lives in sessions. Every
mutation checks an optimistic version counter (stale writers get 409) and
returns the regenerated cloud payload, so clients never compute shapes
locally. Payloads carry flat numeric arrays plus hashes of the latent rows
so clients can verify which rows an edit actually touched.
"""
from __future__ import annotations

import hashlib
import itertools
from typing import Dict, List, Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response

from .checkpoint import Checkpoint, generate
from .dataset import cloud_to_bytes
from .manipulation import (
    SelectionMask,
    compose_parts,
    correspondence_colors,
    edit_part,
    interp_part,
)
from .sphere import LatentCode, pack_perpoint, pack_uniform, sample_code


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, **extra):
        super().__init__(message)
        self.status = status
        self.code = code
        self.extra = extra


class Session:
    def __init__(self, sid: str, checkpoint_id: str, ckpt: Checkpoint, seed: int):
        self.id = sid
        self.checkpoint_id = checkpoint_id
        self.ckpt = ckpt
        self.sphere = ckpt.sphere()
        rng = np.random.default_rng(seed)
        z = sample_code(ckpt.config.latent_dim, rng)
        self.codes = pack_uniform(self.sphere, z).codes
        self.version = 0
        self.selection: List[int] = []
        self.states: Dict[str, np.ndarray] = {}
        self.closed = False

    def mask(self, indices: Optional[List[int]] = None) -> SelectionMask:
        idx = self.selection if indices is None else indices
        try:
            return SelectionMask(indices=np.asarray(idx, dtype=np.int64),
                                 n_total=self.ckpt.config.n_points)
        except ValueError as exc:
            raise ApiError(400, "invalid-argument", str(exc), field="indices")


def _codes_hash(codes: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(codes).tobytes()).hexdigest()[:16]


def create_app(checkpoints: Dict[str, Checkpoint]) -> FastAPI:
    app = FastAPI(title="spheregen studio api")
    sessions: Dict[str, Session] = {}
    # deterministic ids keep recorded call sequences replayable byte-for-byte
    session_counter = itertools.count(1)

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        body = {"error": {"code": exc.code, "message": str(exc), **exc.extra}}
        return JSONResponse(status_code=exc.status, content=body)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_req: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={
            "error": {"code": "invalid-argument", "message": str(exc.errors())}
        })

    def get_session(sid: str) -> Session:
        s = sessions.get(sid)
        if s is None:
            raise ApiError(404, "not-found", f"unknown session {sid!r}")
        if s.closed:
            raise ApiError(410, "gone", f"session {sid!r} was closed")
        return s

    def check_version(s: Session, body: dict) -> None:
        v = body.get("version")
        if v is None:
            raise ApiError(400, "invalid-argument", "missing version", field="version")
        if int(v) != s.version:
            raise ApiError(409, "version-conflict",
                           f"stale version {v}, session is at {s.version}",
                           expected=s.version)

    def payload(s: Session) -> dict:
        cloud = generate(s.ckpt, pack_perpoint(s.sphere, s.codes))
        colors = correspondence_colors(s.sphere)
        unselected = s.mask().complement()
        return {
            "session": s.id,
            "version": s.version,
            "n": cloud.n,
            "points": cloud.points.reshape(-1).tolist(),
            "colors": colors.reshape(-1).tolist(),
            "selection": [int(i) for i in s.selection],
            "codes_hash": _codes_hash(s.codes),
            "unselected_codes_hash": _codes_hash(s.codes[unselected]),
        }

    def field_value(body: dict, name: str, required: bool = True, default=None):
        if name not in body:
            if required:
                raise ApiError(400, "invalid-argument", f"missing {name}", field=name)
            return default
        return body[name]

    @app.get("/checkpoints")
    async def list_checkpoints():
        return {"checkpoints": [
            {"id": cid, "n": c.config.n_points, "d": c.config.latent_dim,
             "iteration": c.iteration}
            for cid, c in checkpoints.items()
        ]}

    @app.post("/sessions")
    async def create_session(body: dict):
        cid = field_value(body, "checkpoint")
        if cid not in checkpoints:
            raise ApiError(404, "not-found", f"unknown checkpoint {cid!r}")
        seed = int(body.get("seed", np.random.SeedSequence().entropy % (2 ** 32)))
        sid = f"s{next(session_counter):04d}"
        s = Session(sid, cid, checkpoints[cid], seed)
        sessions[sid] = s
        cfg = s.ckpt.config
        return {"session": sid, "n": cfg.n_points, "d": cfg.latent_dim,
                "version": s.version}

    @app.get("/sessions/{sid}")
    async def session_info(sid: str):
        s = get_session(sid)
        return {"session": s.id, "checkpoint": s.checkpoint_id,
                "version": s.version, "n": s.ckpt.config.n_points,
                "d": s.ckpt.config.latent_dim,
                "selection": [int(i) for i in s.selection],
                "states": sorted(s.states)}

    @app.delete("/sessions/{sid}")
    async def close_session(sid: str):
        s = get_session(sid)
        s.closed = True
        return {"session": sid, "closed": True}

    @app.post("/sessions/{sid}/generate")
    async def generate_current(sid: str):
        return payload(get_session(sid))

    @app.post("/sessions/{sid}/select")
    async def apply_selection(sid: str, body: dict):
        s = get_session(sid)
        check_version(s, body)
        mask = s.mask(field_value(body, "indices"))
        s.selection = [int(i) for i in mask.indices]
        s.version += 1
        return payload(s)

    @app.post("/sessions/{sid}/edit")
    async def apply_edit(sid: str, body: dict):
        s = get_session(sid)
        check_version(s, body)
        mode = body.get("mode", "part")
        seed = int(field_value(body, "seed"))
        rng = np.random.default_rng(seed)
        d = s.ckpt.config.latent_dim
        if mode == "all":
            mask = s.mask(list(range(s.ckpt.config.n_points)))
        elif mode in ("part", "per-point"):
            mask = s.mask()
        else:
            raise ApiError(400, "invalid-argument",
                           f"unknown edit mode {mode!r}", field="mode")
        if mode == "per-point":
            fresh = rng.standard_normal((len(mask), d))
            s.codes = edit_part(s.codes, mask, LatentCode(np.zeros(d)), per_point=fresh)
        else:
            s.codes = edit_part(s.codes, mask, sample_code(d, rng))
        s.version += 1
        return payload(s)

    @app.post("/sessions/{sid}/interpolate")
    async def apply_interpolation(sid: str, body: dict):
        s = get_session(sid)
        check_version(s, body)
        alpha = float(field_value(body, "alpha"))
        if not (0.0 <= alpha <= 1.0):
            raise ApiError(400, "invalid-argument",
                           f"alpha must be in [0, 1], got {alpha}", field="alpha")
        source = body.get("source_state")
        if source is not None:
            if source not in s.states:
                raise ApiError(404, "not-found", f"unknown state {source!r}")
            codes_a = s.states[source]
        else:
            codes_a = s.codes
        if "target_state" in body:
            name = body["target_state"]
            if name not in s.states:
                raise ApiError(404, "not-found", f"unknown state {name!r}")
            codes_b = s.states[name]
        elif "target_session" in body:
            other = get_session(body["target_session"])
            if other.checkpoint_id != s.checkpoint_id:
                raise ApiError(400, "invalid-argument",
                               "sessions use different checkpoints",
                               field="target_session")
            codes_b = other.codes
        else:
            raise ApiError(400, "invalid-argument",
                           "need target_state or target_session", field="target")
        indices = body.get("indices")
        mask = s.mask(indices if indices is not None
                      else list(range(s.ckpt.config.n_points)))
        s.codes = interp_part(codes_a, codes_b, mask, alpha)
        s.version += 1
        return payload(s)

    @app.post("/sessions/{sid}/compose")
    async def apply_composition(sid: str, body: dict):
        s = get_session(sid)
        check_version(s, body)
        sources = field_value(body, "sources")
        if not isinstance(sources, list) or not sources:
            raise ApiError(400, "invalid-argument",
                           "sources must be a non-empty list", field="sources")
        pairs = []
        for rec in sources:
            name = rec.get("state")
            if name not in s.states:
                raise ApiError(404, "not-found", f"unknown state {name!r}")
            pairs.append((s.states[name], s.mask(rec.get("indices", []))))
        try:
            s.codes = compose_parts(pairs)
        except ValueError as exc:
            raise ApiError(409, "mask-conflict", str(exc), field="sources")
        s.version += 1
        return payload(s)

    @app.post("/sessions/{sid}/states")
    async def save_state(sid: str, body: dict):
        s = get_session(sid)
        name = field_value(body, "name")
        s.states[name] = s.codes.copy()
        return {"session": sid, "states": sorted(s.states), "version": s.version}

    @app.post("/sessions/{sid}/states/{name}/restore")
    async def restore_state(sid: str, name: str, body: dict):
        s = get_session(sid)
        check_version(s, body)
        if name not in s.states:
            raise ApiError(404, "not-found", f"unknown state {name!r}")
        s.codes = s.states[name].copy()
        s.version += 1
        return payload(s)

    @app.get("/sessions/{sid}/export")
    async def export_cloud(sid: str):
        s = get_session(sid)
        cloud = generate(s.ckpt, pack_perpoint(s.sphere, s.codes))
        return Response(
            content=cloud_to_bytes(cloud), media_type="application/octet-stream",
            headers={"Content-Disposition":
                     f'attachment; filename="{sid}.sppc"'},
        )

    return app
