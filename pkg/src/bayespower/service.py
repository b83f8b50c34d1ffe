"""HTTP JSON API for design evaluation.

Sessions are persisted as one JSON document each in a data directory
(plus an append-only index), so a restart recovers queued and running
jobs.  A bounded worker pool consumes a job queue; store writes are
serialized through a single lock, and finished sessions are immutable.
"""

from __future__ import annotations

import json
import math
import os
import queue
import threading
import time
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .approx import DesignSpec
from .errors import BayesPowerError, UnattainableDesignError
from .oracle import conventional_curve
from .powercurve import power_curve

__all__ = ["ServiceConfig", "create_app", "load_config", "new_session_id"]

_SCHEMA = json.loads(
    resources.files("bayespower.data").joinpath("design_spec.schema.json").read_text()
)
_VALIDATOR = jsonschema.Draft202012Validator(_SCHEMA)

_CROCKFORD = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"
_ulid_lock = threading.Lock()
_ulid_last = [0, 0]


def new_session_id() -> str:
    """Sortable 26-character identifier: 48-bit timestamp + 80 random bits."""
    with _ulid_lock:
        ts = int(time.time() * 1000)
        rand = int.from_bytes(os.urandom(10), "big")
        if ts == _ulid_last[0]:
            rand = max(rand, _ulid_last[1] + 1)
        _ulid_last[0], _ulid_last[1] = ts, rand
    value = (ts << 80) | rand
    chars = []
    for _ in range(26):
        chars.append(_CROCKFORD[value & 31])
        value >>= 5
    return "".join(reversed(chars))


@dataclass
class ServiceConfig:
    data_dir: str = "./bayespower-data"
    host: str = "127.0.0.1"
    port: int = 8787
    workers: int = 2
    default_m: int = 1024
    cors_origins: tuple[str, ...] = ("*",)
    ui_dir: str | None = None


def load_config(path: str | None = None) -> ServiceConfig:
    """Read a TOML config file; environment variables override it."""
    try:
        import tomllib
    except ModuleNotFoundError:  # python < 3.11
        import tomli as tomllib

    cfg = ServiceConfig()
    if path:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
        for key in ("data_dir", "host", "port", "workers", "default_m", "ui_dir"):
            if key in doc:
                setattr(cfg, key, doc[key])
        if "cors_origins" in doc:
            cfg.cors_origins = tuple(doc["cors_origins"])
    env = os.environ
    cfg.data_dir = env.get("BAYESPOWER_DATA_DIR", cfg.data_dir)
    cfg.host = env.get("BAYESPOWER_HOST", cfg.host)
    cfg.port = int(env.get("BAYESPOWER_PORT", cfg.port))
    cfg.workers = int(env.get("BAYESPOWER_WORKERS", cfg.workers))
    cfg.ui_dir = env.get("BAYESPOWER_UI_DIR", cfg.ui_dir)
    return cfg


@dataclass
class Session:
    id: str
    label: str
    spec: dict
    status: str = "queued"  # queued | running | done | failed
    result: dict | None = None
    oracle: list | None = None
    error: str | None = None
    created_at: float = field(default_factory=time.time)
    finished_at: float | None = None
    request_key: str | None = None

    def summary(self) -> dict:
        return {
            "id": self.id,
            "label": self.label,
            "status": self.status,
            "created_at": self.created_at,
            "finished_at": self.finished_at,
            "recommendation": (self.result or {}).get("recommendation"),
        }


class SessionStore:
    """One JSON file per session plus an append-only index."""

    def __init__(self, data_dir: str):
        self.dir = Path(data_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, sid: str) -> Path:
        return self.dir / f"{sid}.json"

    def save(self, session: Session) -> None:
        with self._lock:
            tmp = self._path(session.id).with_suffix(".tmp")
            tmp.write_text(json.dumps(asdict(session), sort_keys=True))
            tmp.replace(self._path(session.id))

    def append_index(self, session: Session) -> None:
        with self._lock:
            with open(self.dir / "index.jsonl", "a") as fh:
                fh.write(
                    json.dumps(
                        {
                            "id": session.id,
                            "label": session.label,
                            "created_at": session.created_at,
                            "request_key": session.request_key,
                        }
                    )
                    + "\n"
                )

    def load(self, sid: str) -> Session | None:
        path = self._path(sid)
        if not path.exists():
            return None
        return Session(**json.loads(path.read_text()))

    def delete(self, sid: str) -> bool:
        with self._lock:
            path = self._path(sid)
            if path.exists():
                path.unlink()
                return True
            return False

    def all_ids(self) -> list[str]:
        return sorted(p.stem for p in self.dir.glob("*.json") if p.stem != "index")

    def find_by_request_key(self, key: str) -> Session | None:
        for sid in self.all_ids():
            s = self.load(sid)
            if s is not None and s.request_key == key:
                return s
        return None


class JobCancelled(BayesPowerError):
    pass


class Engine:
    """Background worker pool over the session store."""

    def __init__(self, store: SessionStore, workers: int):
        self.store = store
        self.queue: queue.Queue = queue.Queue()
        self.cancel_events: dict[str, threading.Event] = {}
        self._threads = [
            threading.Thread(target=self._worker, daemon=True, name=f"bayespower-worker-{i}")
            for i in range(max(1, workers))
        ]
        self._stop = threading.Event()

    def start(self) -> None:
        for t in self._threads:
            t.start()

    def stop(self) -> None:
        """Signal workers and wait for in-flight jobs to drain."""
        self._stop.set()
        for _ in self._threads:
            self.queue.put(None)
        for t in self._threads:
            if t.is_alive():
                t.join(timeout=30.0)

    def submit(self, kind: str, sid: str, params: dict | None = None) -> None:
        self.cancel_events.setdefault(sid, threading.Event())
        self.queue.put((kind, sid, params or {}))

    def cancel(self, sid: str) -> None:
        ev = self.cancel_events.get(sid)
        if ev is not None:
            ev.set()

    def recover(self) -> None:
        """Requeue jobs that were in flight when the process died."""
        for sid in self.store.all_ids():
            s = self.store.load(sid)
            if s is not None and s.status in ("queued", "running"):
                s.status = "queued"
                self.store.save(s)
                self.submit("curve", sid)

    def _worker(self) -> None:
        while not self._stop.is_set():
            item = self.queue.get()
            if item is None:
                return
            kind, sid, params = item
            session = self.store.load(sid)
            if session is None:
                continue
            cancel_ev = self.cancel_events.setdefault(sid, threading.Event())

            def check():
                if cancel_ev.is_set():
                    raise JobCancelled(sid)

            try:
                if kind == "curve":
                    session.status = "running"
                    self.store.save(session)
                    design = DesignSpec.from_dict(session.spec)
                    curve = power_curve(design, cancel_check=check)
                    session.result = curve.to_dict()
                    session.status = "done"
                else:  # verify
                    design = DesignSpec.from_dict(session.spec)
                    reports = conventional_curve(
                        design,
                        params["n_grid"],
                        params["reps"],
                        seed=design.seed,
                    )
                    session.oracle = [r.to_dict() for r in reports]
                session.finished_at = time.time()
                self.store.save(session)
            except JobCancelled:
                session.status = "failed"
                session.error = "cancelled"
                session.finished_at = time.time()
                self.store.save(session)
            except Exception as exc:  # record, never kill the worker
                session.status = "failed"
                session.error = f"{type(exc).__name__}: {exc}"
                session.finished_at = time.time()
                self.store.save(session)


def _schema_errors(doc) -> list[dict]:
    errs = []
    for e in sorted(_VALIDATOR.iter_errors(doc), key=lambda e: list(e.absolute_path)):
        errs.append({"path": "/".join(str(p) for p in e.absolute_path), "message": e.message})
    return errs


def parse_n_grid(value) -> list[int]:
    """Accept a list of integers or a 'start:stop:step' range string."""
    if isinstance(value, list):
        grid = [int(v) for v in value]
    elif isinstance(value, str):
        parts = value.split(":")
        if len(parts) != 3:
            raise ValueError("n_grid string must be start:stop:step")
        start, stop, step = (int(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError("n_grid range must increase")
        grid = list(range(start, stop + 1, step))
    else:
        raise ValueError("n_grid must be a list or a start:stop:step string")
    if not grid or grid != sorted(grid):
        raise ValueError("n_grid must be nonempty and ascending")
    return grid


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    store = SessionStore(config.data_dir)
    engine = Engine(store, config.workers)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        engine.recover()
        engine.start()
        yield
        engine.stop()

    app = FastAPI(title="bayespower", version="0.1.0", lifespan=lifespan)
    app.state.store = store
    app.state.engine = engine
    app.state.config = config
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(config.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/schema")
    def schema():
        return JSONResponse(_SCHEMA)

    @app.post("/designs", status_code=202)
    async def submit_design(request: Request):
        body = await request.json()
        label = str(body.pop("label", ""))
        request_key = body.pop("request_key", None) or request.headers.get("x-request-key")
        errors = _schema_errors(body)
        if errors:
            raise HTTPException(status_code=400, detail=errors)
        try:
            design = DesignSpec.from_dict({**body, "label": label})
            from .powercurve import initial_n0

            initial_n0(design)  # surfaces unattainable designs before queueing
        except UnattainableDesignError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except BayesPowerError as exc:
            raise HTTPException(status_code=400, detail=[{"path": "", "message": str(exc)}])
        if request_key:
            existing = store.find_by_request_key(str(request_key))
            if existing is not None:
                return {"id": existing.id}
        session = Session(
            id=new_session_id(),
            label=label,
            spec=design.to_dict(),
            request_key=str(request_key) if request_key else None,
        )
        store.save(session)
        store.append_index(session)
        engine.submit("curve", session.id)
        return {"id": session.id}

    @app.get("/designs")
    def list_designs(label: str | None = None):
        out = []
        for sid in store.all_ids():
            s = store.load(sid)
            if s is None:
                continue
            if label and label not in s.label:
                continue
            out.append(s.summary())
        return out

    @app.get("/designs/{sid}")
    def get_design(sid: str):
        s = store.load(sid)
        if s is None:
            raise HTTPException(status_code=404, detail="unknown session id")
        return asdict(s)

    @app.delete("/designs/{sid}", status_code=204)
    def delete_design(sid: str):
        s = store.load(sid)
        if s is None:
            raise HTTPException(status_code=404, detail="unknown session id")
        if s.status in ("queued", "running"):
            engine.cancel(sid)
            s.status = "failed"
            s.error = "cancelled"
            s.finished_at = time.time()
            store.save(s)
        else:
            store.delete(sid)
        return None

    @app.post("/designs/{sid}/verify", status_code=202)
    async def verify_design(sid: str, request: Request):
        s = store.load(sid)
        if s is None:
            raise HTTPException(status_code=404, detail="unknown session id")
        if s.status != "done":
            raise HTTPException(status_code=409, detail=f"session is {s.status}, not done")
        body = await request.json()
        reps = int(body.get("reps", 0))
        if reps < 100:
            raise HTTPException(status_code=400, detail="reps must be >= 100")
        try:
            n_grid = parse_n_grid(body["n_grid"])
        except (KeyError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=f"bad n_grid: {exc}")
        engine.submit("verify", sid, {"n_grid": n_grid, "reps": reps})
        return {"id": sid}

    ui_dir = config.ui_dir
    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
