"""Read-only HTTP service for the LOD dataset, scene, and viewer assets.

All payloads are immutable after startup; node blobs are byte slices of
octree.bin with strong ETags and single-range support. JSON responses are
gzip-compressed when the client accepts it; node blobs never are.
"""

from __future__ import annotations

import gzip
import json
import mimetypes
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .engine import CameraPose, SessionState, start_escape
from .errors import LabTwinError, ValidationError
from .octree.model import BIN_FILE, HIERARCHY_FILE, MANIFEST_FILE
from .octree.storage import load_hierarchy
from .scene import SceneDefinition, scene_from_json

GZIP_MIN_BYTES = 512


@dataclass
class ServerConfig:
    dataset_dir: str
    scene_path: str
    static_dir: Optional[str] = None
    cors: bool = True


class _Dataset:
    def __init__(self, cfg: ServerConfig):
        self.manifest, nodes = load_hierarchy(cfg.dataset_dir)
        self.nodes = {n.name: n for n in nodes}
        self.digest = self.manifest.hierarchy_digest.split(":", 1)[-1]
        ddir = Path(cfg.dataset_dir)
        self.manifest_bytes = (ddir / MANIFEST_FILE).read_bytes()
        self.hierarchy_bytes = (ddir / HIERARCHY_FILE).read_bytes()
        self.bin_path = ddir / BIN_FILE
        self.scene_bytes = Path(cfg.scene_path).read_bytes()
        self.scene: SceneDefinition = scene_from_json(
            json.loads(self.scene_bytes.decode("utf-8")))


def create_app(cfg: ServerConfig, strict: bool = True) -> FastAPI:
    """Build the app; with ``strict`` (the default) an invalid dataset
    refuses to start, otherwise every request answers 503."""
    app = FastAPI(title="labtwin dataset server")
    failure: Optional[str] = None
    data: Optional[_Dataset] = None
    try:
        data = _Dataset(cfg)
    except (LabTwinError, OSError) as exc:
        if strict:
            raise
        failure = str(exc)

    if cfg.cors:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(CORSMiddleware, allow_origins=["*"],
                           allow_methods=["GET"], allow_headers=["*"])

    def err(status: int, message: str) -> JSONResponse:
        return JSONResponse({"error": message}, status_code=status)

    def unavailable() -> JSONResponse:
        return err(503, f"dataset failed validation: {failure}")

    def json_payload(request: Request, body: bytes, etag: str) -> Response:
        headers = {"ETag": etag, "Cache-Control": "public, max-age=0"}
        if request.headers.get("if-none-match") == etag:
            return Response(status_code=304, headers=headers)
        if ("gzip" in request.headers.get("accept-encoding", "")
                and len(body) >= GZIP_MIN_BYTES):
            headers["Content-Encoding"] = "gzip"
            body = gzip.compress(body, 6)
        return Response(body, media_type="application/json", headers=headers)

    @app.get("/api/manifest")
    def manifest(request: Request):
        if data is None:
            return unavailable()
        return json_payload(request, data.manifest_bytes,
                            f'"{data.digest}-manifest"')

    @app.get("/api/hierarchy")
    def hierarchy(request: Request):
        if data is None:
            return unavailable()
        return json_payload(request, data.hierarchy_bytes,
                            f'"{data.digest}-hierarchy"')

    @app.get("/api/scene")
    def scene(request: Request):
        if data is None:
            return unavailable()
        return json_payload(request, data.scene_bytes,
                            f'"{data.digest}-scene"')

    @app.get("/api/nodes/{name}")
    def node_blob(name: str, request: Request):
        if data is None:
            return unavailable()
        node = data.nodes.get(name)
        if node is None:
            return err(404, f"unknown node {name!r}")
        etag = f'"{data.digest}:{name}"'
        if request.headers.get("if-none-match") == etag:
            return Response(status_code=304, headers={"ETag": etag})
        start, size = node.byte_offset, node.byte_size
        status = 200
        headers = {"ETag": etag, "Accept-Ranges": "bytes"}
        rng = request.headers.get("range")
        lo, hi = 0, size - 1
        if rng is not None:
            parsed = _parse_range(rng, size)
            if parsed is None:
                headers["Content-Range"] = f"bytes */{size}"
                return Response(status_code=416, headers=headers)
            lo, hi = parsed
            status = 206
            headers["Content-Range"] = f"bytes {lo}-{hi}/{size}"
        with open(data.bin_path, "rb") as fh:
            fh.seek(start + lo)
            body = fh.read(hi - lo + 1)
        return Response(body, status_code=status,
                        media_type="application/octet-stream", headers=headers)

    @app.get("/api/guidance")
    def guidance(request: Request):
        if data is None:
            return unavailable()
        try:
            coords = [float(request.query_params[k]) for k in ("x", "y", "z")]
        except KeyError as exc:
            return err(400, f"missing query parameter {exc.args[0]!r}")
        except ValueError:
            return err(400, "coordinates must be finite numbers")
        if not all(c == c and abs(c) != float("inf") for c in coords):
            return err(400, "coordinates must be finite numbers")
        if not data.scene.exits:
            return err(409, "scene defines no exits")
        state = SessionState(pose=CameraPose(tuple(coords), 0.0, 0.0))
        g = start_escape(state, data.scene).guidance
        return JSONResponse({
            "exit_id": g.exit_id,
            "bearing_deg": g.bearing_deg,
            "distance_m": g.distance_m,
            "arrived": g.arrived,
        })

    if cfg.static_dir is not None:
        asset_root = Path(cfg.static_dir).resolve()

        @app.get("/api/assets/{asset_path:path}")
        def asset(asset_path: str):
            target = (asset_root / asset_path).resolve()
            if asset_root not in target.parents and target != asset_root:
                return err(403, "asset path escapes the asset root")
            if not target.is_file():
                return err(404, f"no such asset {asset_path!r}")
            ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
            return Response(target.read_bytes(), media_type=ctype)

        app.mount("/", StaticFiles(directory=str(asset_root), html=True),
                  name="static")
    else:
        @app.get("/api/assets/{asset_path:path}")
        def no_assets(asset_path: str):
            return err(404, "no asset directory configured")

    return app


def _parse_range(header: str, size: int) -> Optional[tuple[int, int]]:
    """Single byte-range only; returns (lo, hi) inclusive or None."""
    if not header.startswith("bytes=") or "," in header:
        return None
    spec = header[len("bytes="):].strip()
    try:
        lo_s, hi_s = spec.split("-", 1)
        if lo_s == "":
            n = int(hi_s)
            if n <= 0:
                return None
            return max(size - n, 0), size - 1
        lo = int(lo_s)
        hi = int(hi_s) if hi_s else size - 1
    except ValueError:
        return None
    hi = min(hi, size - 1)
    if lo > hi or lo >= size:
        return None
    return lo, hi


def run_server(cfg: ServerConfig, host: str = "127.0.0.1",
               port: int = 8080) -> None:  # pragma: no cover - CLI path
    import uvicorn

    app = create_app(cfg)
    print(f"serving dataset on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning")
