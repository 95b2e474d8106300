"""HTTP service for the studio UI and scripts.

Documents persist as canonical JSON files under the data directory; per-comic
writes are serialized through a lock plus revision compare-and-set, so of two
conflicting edits exactly one lands and the other sees 409.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Body, FastAPI, Header, Response
from fastapi.responses import HTMLResponse, JSONResponse

from .captions import CachedHttpTermProvider, TermProvider
from .chart_model import ChartEnsemble, ensemble_hash, parse_ensemble, serialize_ensemble
from .compose import EditLogEntry, apply_edit, compose, edit_from_dict, ranked_facts_for
from .document import ComicDocument, EngineParams, StyleConfig, document_from_dict, document_to_dict, export_json
from .errors import (
    ComicForgeError,
    InvalidEdit,
    MalformedSpec,
    OversizedPiece,
    SchemaVersionMismatch,
    StaleRevision,
    UnknownEntity,
)
from .render import export_html

DEFAULT_BIND = "127.0.0.1:8765"


@dataclass
class Session:
    comic_id: str
    ensemble_id: str
    document: ComicDocument
    created_at: float
    updated_at: float
    edit_log: list[EditLogEntry] = field(default_factory=list)


def _atomic_write(path: Path, payload: str):
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(payload, encoding="utf-8")
    os.replace(tmp, path)


class DocumentStore:
    """File-backed store: ensembles keyed by content hash, comics by id."""

    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        (self.root / "ensembles").mkdir(parents=True, exist_ok=True)
        (self.root / "comics").mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def lock_for(self, comic_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(comic_id, threading.Lock())

    def save_ensemble(self, ensemble: ChartEnsemble) -> str:
        ensemble_id = ensemble_hash(ensemble).split(":", 1)[1][:16]
        payload = json.dumps(
            serialize_ensemble(ensemble), sort_keys=True, separators=(",", ":")
        )
        _atomic_write(self.root / "ensembles" / f"{ensemble_id}.json", payload)
        return ensemble_id

    def load_ensemble(self, ensemble_id: str) -> ChartEnsemble | None:
        path = self.root / "ensembles" / f"{ensemble_id}.json"
        if not path.exists():
            return None
        return parse_ensemble(path.read_text(encoding="utf-8"))

    def save_session(self, session: Session):
        payload = json.dumps(
            {
                "comic_id": session.comic_id,
                "ensemble_id": session.ensemble_id,
                "created_at": session.created_at,
                "updated_at": session.updated_at,
                "edit_log": [
                    {"op": e.op, "detail": e.detail, "count": e.count} for e in session.edit_log
                ],
                "document": document_to_dict(session.document),
            },
            sort_keys=True,
            separators=(",", ":"),
        )
        _atomic_write(self.root / "comics" / f"{session.comic_id}.json", payload)

    def load_session(self, comic_id: str) -> Session | None:
        path = self.root / "comics" / f"{comic_id}.json"
        if not path.exists():
            return None
        data = json.loads(path.read_text(encoding="utf-8"))
        return Session(
            comic_id=data["comic_id"],
            ensemble_id=data["ensemble_id"],
            document=document_from_dict(data["document"]),
            created_at=data["created_at"],
            updated_at=data["updated_at"],
            edit_log=[EditLogEntry(**e) for e in data["edit_log"]],
        )


def _error(status: int, message: str, **extra) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message, **extra})


def _status_for(exc: ComicForgeError) -> int:
    if isinstance(exc, StaleRevision):
        return 409
    if isinstance(exc, UnknownEntity):
        return 404
    if isinstance(exc, (InvalidEdit, OversizedPiece, MalformedSpec, SchemaVersionMismatch)):
        return 422
    return 422


def create_app(
    data_dir: str | Path | None = None,
    offline: bool | None = None,
    term_provider: TermProvider | None = None,
    term_url_template: str | None = None,
    pattern_table: dict | None = None,
) -> FastAPI:
    data_dir = data_dir or os.environ.get("COMICFORGE_DATA_DIR", "./comicforge-data")
    if offline is None:
        offline = os.environ.get("COMICFORGE_OFFLINE", "") not in ("", "0", "false")
    store = DocumentStore(data_dir)
    if term_provider is None and not offline:
        kwargs = {"cache_path": Path(data_dir) / "term_cache.json"}
        if term_url_template:
            kwargs["url_template"] = term_url_template
        term_provider = CachedHttpTermProvider(**kwargs)

    app = FastAPI(title="comicforge", version="0.1.0")
    app.state.store = store
    app.state.term_provider = term_provider

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/ensembles", status_code=201)
    def upload_ensemble(body: dict = Body(...)):
        try:
            data_doc = body.get("data") if isinstance(body, dict) else None
            ensemble = parse_ensemble(body, data_doc=data_doc)
        except ComicForgeError as exc:
            return _error(400, str(exc))
        ensemble_id = store.save_ensemble(ensemble)
        return {"ensemble_id": ensemble_id, "warnings": ensemble.warnings}

    @app.post("/comics", status_code=201)
    def create_comic(body: dict = Body(...)):
        ensemble_id = body.get("ensemble_id")
        if not isinstance(ensemble_id, str):
            return _error(400, "ensemble_id is required")
        ensemble = store.load_ensemble(ensemble_id)
        if ensemble is None:
            return _error(404, f"unknown ensemble {ensemble_id!r}")
        try:
            params = EngineParams.from_dict(body.get("params") or {})
            style = StyleConfig.from_dict(body.get("style") or {})
            included = body.get("included_chart_ids")
            doc = compose(
                ensemble,
                params=params,
                style=style,
                included_chart_ids=included,
                term_provider=term_provider,
                pattern_table=pattern_table,
            )
        except (ValueError, TypeError) as exc:
            return _error(400, str(exc))
        except ComicForgeError as exc:
            return _error(_status_for(exc), str(exc))
        comic_id = uuid.uuid4().hex[:12]
        session = Session(
            comic_id=comic_id,
            ensemble_id=ensemble_id,
            document=doc,
            created_at=time.time(),
            updated_at=time.time(),
        )
        store.save_session(session)
        return {"comic_id": comic_id, "document": document_to_dict(doc)}

    @app.get("/comics/{comic_id}")
    def get_comic(comic_id: str):
        session = store.load_session(comic_id)
        if session is None:
            return _error(404, f"unknown comic {comic_id!r}")
        return {
            "comic_id": comic_id,
            "revision": session.document.revision,
            "document": document_to_dict(session.document),
            "edit_log": [
                {"op": e.op, "detail": e.detail, "count": e.count} for e in session.edit_log
            ],
        }

    @app.patch("/comics/{comic_id}")
    def patch_comic(
        comic_id: str,
        body: dict = Body(...),
        if_match: str | None = Header(default=None, alias="If-Match"),
    ):
        if if_match is None:
            return _error(400, "If-Match revision header is required on mutations")
        try:
            expected = int(if_match.strip().strip('"'))
        except ValueError:
            return _error(400, f"If-Match must be a revision number, got {if_match!r}")
        try:
            edit = edit_from_dict(body)
        except ValueError as exc:
            return _error(400, str(exc))

        lock = store.lock_for(comic_id)
        with lock:
            session = store.load_session(comic_id)
            if session is None:
                return _error(404, f"unknown comic {comic_id!r}")
            ensemble = store.load_ensemble(session.ensemble_id)
            if ensemble is None:
                return _error(404, f"ensemble {session.ensemble_id!r} is gone")
            try:
                doc, entry = apply_edit(
                    session.document,
                    edit,
                    ensemble,
                    expected_revision=expected,
                    term_provider=term_provider,
                    pattern_table=pattern_table,
                )
            except StaleRevision as exc:
                return _error(409, str(exc), current_revision=exc.current)
            except ComicForgeError as exc:
                return _error(_status_for(exc), str(exc))
            session.document = doc
            session.updated_at = time.time()
            session.edit_log.append(entry)
            store.save_session(session)
        return {
            "comic_id": comic_id,
            "revision": doc.revision,
            "document": document_to_dict(doc),
            "applied": {"op": entry.op, "detail": entry.detail, "count": entry.count},
        }

    @app.get("/comics/{comic_id}/export")
    def export_comic(comic_id: str, format: str = "json"):
        session = store.load_session(comic_id)
        if session is None:
            return _error(404, f"unknown comic {comic_id!r}")
        if format == "json":
            return Response(
                content=export_json(session.document), media_type="application/json"
            )
        if format == "html":
            ensemble = store.load_ensemble(session.ensemble_id)
            if ensemble is None:
                return _error(404, f"ensemble {session.ensemble_id!r} is gone")
            return HTMLResponse(content=export_html(session.document, ensemble))
        return _error(400, f"unsupported format {format!r} (use html or json)")

    @app.get("/comics/{comic_id}/facts/{chart_id}")
    def get_facts(comic_id: str, chart_id: str):
        session = store.load_session(comic_id)
        if session is None:
            return _error(404, f"unknown comic {comic_id!r}")
        ensemble = store.load_ensemble(session.ensemble_id)
        if ensemble is None:
            return _error(404, f"ensemble {session.ensemble_id!r} is gone")
        try:
            facts = ranked_facts_for(session.document, ensemble, chart_id)
        except UnknownEntity as exc:
            return _error(404, str(exc))
        except ComicForgeError as exc:
            return _error(_status_for(exc), str(exc))
        return {"chart_id": chart_id, "facts": facts}

    return app


def main_serve(
    bind: str | None = None,
    data_dir: str | None = None,
    offline: bool | None = None,
    term_url_template: str | None = None,
    pattern_table: dict | None = None,
):
    import uvicorn

    bind = bind or os.environ.get("COMICFORGE_BIND_ADDR", DEFAULT_BIND)
    host, _, port = bind.partition(":")
    app = create_app(
        data_dir=data_dir,
        offline=offline,
        term_url_template=term_url_template,
        pattern_table=pattern_table,
    )
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8765))
