"""Stateless JSON HTTP service: ``POST /v1/simulate`` and ``GET /healthz``.

Every request is simulated independently in a worker thread; nothing is
shared between requests except the read-only configuration and the gate
matrix caches.
"""

from __future__ import annotations

import asyncio
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from . import __version__
from .circuit_json import DEFAULT_MAX_AMPLITUDES, SCHEMA_VERSION, error_body, simulate
from .errors import QuditError

log = logging.getLogger("quditsim.service")

JSON = "application/json"


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    max_body_bytes: int = 1 << 20
    max_amplitudes: int = DEFAULT_MAX_AMPLITUDES
    time_limit_ms: int = 30_000

    def __post_init__(self):
        for name in ("port", "max_body_bytes", "max_amplitudes", "time_limit_ms"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @classmethod
    def from_env(cls, env=None, **overrides) -> "ServiceConfig":
        """Read ``QUDITSIM_HOST``, ``QUDITSIM_PORT``, ``QUDITSIM_MAX_BODY_BYTES``,
        ``QUDITSIM_MAX_AMPLITUDES`` and ``QUDITSIM_TIME_LIMIT_MS``; explicit
        keyword overrides that are not None win."""
        env = os.environ if env is None else env
        values = {}
        for field, cast in (("host", str), ("port", int), ("max_body_bytes", int),
                            ("max_amplitudes", int), ("time_limit_ms", int)):
            key = f"QUDITSIM_{field.upper()}"
            if key in env:
                values[field] = cast(env[key])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def limits(self) -> dict:
        out = asdict(self)
        del out["host"], out["port"]
        return out


def _error(status: int, code: str, message: str, path=None) -> Response:
    return JSONResponse({"code": code, "message": message, "path": path}, status_code=status)


def _status_for(exc: QuditError) -> int:
    return 422 if exc.code == "SizeOverflow" else 400


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="quditsim", version=__version__)
    app.state.config = config

    @app.middleware("http")
    async def access_log(request: Request, call_next):
        start = time.perf_counter()
        response = await call_next(request)
        log.info("%s %s %d %.1fms", request.method, request.url.path, response.status_code,
                 (time.perf_counter() - start) * 1000.0)
        return response

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok", "version": __version__, "schemaVersion": SCHEMA_VERSION,
                "limits": config.limits()}

    @app.post("/v1/simulate")
    async def simulate_endpoint(request: Request):
        ctype = request.headers.get("content-type", "")
        if ctype.split(";")[0].strip().lower() != JSON:
            return _error(415, "UnsupportedMediaType", f"expected Content-Type {JSON}, got {ctype!r}")
        declared = request.headers.get("content-length")
        if declared is not None and declared.isdigit() and int(declared) > config.max_body_bytes:
            return _error(413, "PayloadTooLarge", f"body exceeds {config.max_body_bytes} bytes")
        body = bytearray()
        async for chunk in request.stream():
            body += chunk
            if len(body) > config.max_body_bytes:
                return _error(413, "PayloadTooLarge", f"body exceeds {config.max_body_bytes} bytes")

        work = asyncio.to_thread(simulate, bytes(body), max_amplitudes=config.max_amplitudes)
        try:
            payload = await asyncio.wait_for(work, timeout=config.time_limit_ms / 1000.0)
        except QuditError as exc:
            return Response(error_body(exc), status_code=_status_for(exc), media_type=JSON)
        except asyncio.TimeoutError:
            return _error(504, "Timeout", f"simulation exceeded {config.time_limit_ms} ms")
        except Exception as exc:  # noqa: BLE001
            log.exception("simulation failed")
            return _error(500, "InternalError", f"{type(exc).__name__}: {exc}")
        return Response(payload, media_type=JSON, headers={"X-Schema-Version": str(SCHEMA_VERSION)})

    return app


def serve(config: ServiceConfig) -> None:
    import uvicorn

    handler = logging.StreamHandler(sys.stdout)
    handler.setFormatter(logging.Formatter("%(asctime)s %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO)
    uvicorn.run(create_app(config), host=config.host, port=config.port, access_log=False)
