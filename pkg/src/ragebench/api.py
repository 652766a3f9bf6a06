"""HTTP service exposing session lifecycle, progress streaming, and results.

Single-active-session policy: starting a session while one is running yields
409, mirroring the serial-trial telemetry requirement. Progress is pushed as
server-sent events carrying session-state snapshots.
"""

from __future__ import annotations

import json
import threading
import time
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, StreamingResponse

from .config import validate_config
from .datasets import REGISTRY
from .errors import ConfigParseError, ConfigValidationError
from .session import ProviderRegistry, SessionState, estimate_session, read_trials, run_session


class SessionManager:
    def __init__(self, provider_factory=None, sampler_factory=None):
        self.sessions: dict[str, SessionState] = {}
        self.threads: dict[str, threading.Thread] = {}
        self.provider_factory = provider_factory
        self.sampler_factory = sampler_factory
        self._lock = threading.Lock()

    def running(self) -> bool:
        return any(
            t.is_alive() for t in self.threads.values()
        )

    def start(self, config) -> SessionState:
        import uuid

        with self._lock:
            if self.running():
                raise RuntimeError("a session is already running")
            session_id = uuid.uuid4().hex[:12]
            state = SessionState(session_id=session_id, config=config)
            self.sessions[session_id] = state
            providers = (
                self.provider_factory(config) if self.provider_factory
                else ProviderRegistry(endpoints=dict(config.provider_endpoints))
            )

            def worker():
                try:
                    run_session(config, providers=providers, session_id=session_id,
                                sampler_factory=self.sampler_factory, state=state)
                except Exception as exc:  # noqa: BLE001 - recorded on the state
                    with state.lock:
                        state.warnings.append(f"session aborted: {exc}")
                        state.phase = "aborted"

            thread = threading.Thread(target=worker, daemon=True)
            self.threads[session_id] = thread
            thread.start()
            return state

    def get(self, session_id: str) -> SessionState | None:
        return self.sessions.get(session_id)


def create_app(provider_factory=None, sampler_factory=None) -> FastAPI:
    app = FastAPI(title="ragebench", version="0.1.0")
    manager = SessionManager(provider_factory, sampler_factory)
    app.state.manager = manager

    @app.post("/sessions", status_code=202)
    async def create_session(request: Request):
        body = await request.body()
        try:
            config = validate_config(body)
        except ConfigParseError as exc:
            return JSONResponse(
                status_code=422,
                content={"errors": [{"field": "$", "message": str(exc), "offset": exc.offset}]},
            )
        except ConfigValidationError as exc:
            return JSONResponse(
                status_code=422,
                content={"errors": [{"field": exc.field or "$", "message": str(exc)}]},
            )
        try:
            state = manager.start(config)
        except RuntimeError as exc:
            return JSONResponse(status_code=409, content={"error": str(exc)})
        return {
            "session_id": state.session_id,
            "status": state.phase,
            "links": {
                "progress": f"/sessions/{state.session_id}/progress",
                "results": f"/sessions/{state.session_id}/results",
                "recommendation": f"/sessions/{state.session_id}/recommendation",
            },
        }

    def _not_found():
        return JSONResponse(status_code=404, content={"error": "unknown session"})

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        state = manager.get(session_id)
        if state is None:
            return _not_found()
        return state.snapshot()

    @app.get("/sessions/{session_id}/progress")
    def progress(session_id: str):
        state = manager.get(session_id)
        if state is None:
            return _not_found()

        def stream():
            while True:
                snapshot = state.snapshot()
                yield f"event: progress\ndata: {json.dumps(snapshot)}\n\n"
                if snapshot["phase"] in ("done", "aborted"):
                    yield f"event: {snapshot['phase']}\ndata: {json.dumps(snapshot)}\n\n"
                    return
                time.sleep(0.2)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/sessions/{session_id}/results")
    def results(session_id: str, page: int = 1, page_size: int = 50):
        state = manager.get(session_id)
        if state is None or state.output_dir is None:
            return _not_found()
        try:
            records = read_trials(state.output_dir)
        except Exception:
            records = []
        start = (page - 1) * page_size
        return {
            "total": len(records),
            "page": page,
            "page_size": page_size,
            "records": records[start : start + page_size],
        }

    @app.get("/sessions/{session_id}/recommendation")
    def recommendation(session_id: str):
        state = manager.get(session_id)
        if state is None:
            return _not_found()
        snapshot = state.snapshot()
        if snapshot["phase"] not in ("done",):
            return JSONResponse(
                status_code=409,
                content={"error": f"session in phase {snapshot['phase']}; recommendation "
                                  "available after aggregation"},
            )
        if state.recommendation is None:
            return JSONResponse(status_code=409, content={"error": "no recommendation emitted"})
        return state.recommendation.to_payload()

    @app.get("/sessions/{session_id}/matrix")
    def matrix(session_id: str):
        state = manager.get(session_id)
        if state is None or state.output_dir is None:
            return _not_found()
        path = Path(state.output_dir) / "score_matrix.json"
        if not path.exists():
            return JSONResponse(status_code=409, content={"error": "matrix not yet written"})
        return Response(content=path.read_text(encoding="utf-8"), media_type="application/json")

    @app.get("/sessions/{session_id}/estimate")
    def estimate(session_id: str, per_line_seconds: float | None = None):
        state = manager.get(session_id)
        if state is None:
            return _not_found()
        try:
            seconds = estimate_session(state.config, per_line_seconds=per_line_seconds)
            calibrated = True
        except ValueError:
            seconds = estimate_session(state.config, per_line_seconds=1.0)
            calibrated = False
        return {"projected_seconds": seconds, "calibrated": calibrated}

    @app.get("/registry/datasets")
    def registry():
        return [
            {
                "name": entry.name,
                "source": entry.source,
                "train_size": entry.train_size,
                "access_url": entry.access_url,
            }
            for entry in REGISTRY.values()
        ]

    @app.get("/schema/config")
    def schema():
        from importlib import resources

        text = (resources.files("ragebench") / "fixtures" / "config.schema.json").read_text(
            encoding="utf-8"
        )
        return json.loads(text)

    return app
