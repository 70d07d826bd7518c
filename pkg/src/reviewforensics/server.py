"""Curation API: the vocabulary-expansion loop behind a local HTTP interface.

Vocabulary files on disk are the single source of truth; the session is a
rebuildable cache, so a crash-restart over the same corpus and files
serves identical candidates. Every mutation carries the vocabulary
version and stale writes are rejected.
"""

from __future__ import annotations

import hashlib
import random
import threading
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from pydantic import BaseModel

from .corpus import Corpus
from .stats import StatRow, label_stats
from .textnorm import load_stoplist
from .vocab import (
    DEFAULT_CANDIDATES,
    DuplicateSurfaceError,
    ExpansionState,
    Vocabulary,
    default_vocabularies,
    dump_vocabulary,
    expansion_step,
    initial_state,
    label_corpus,
    load_vocabulary,
    save_vocabulary,
)

DEFAULT_PAGE_SIZE = 50
KWIC_WINDOW = 40


@dataclass(frozen=True)
class KwicSnippet:
    review_id: str
    left: str
    match: str
    right: str
    score: int
    day: str


class CurationSession:
    """Single-analyst session: corpus + one expansion state per label."""

    def __init__(
        self,
        corpus: Corpus,
        vocabs: dict[str, Vocabulary],
        stoplist: frozenset[str] = frozenset(),
        candidates: int = DEFAULT_CANDIDATES,
        vocab_dir: str | Path | None = None,
    ):
        self.corpus = corpus
        self.vocabs = vocabs
        self.stoplist = stoplist
        self.candidates = candidates
        self.vocab_dir = Path(vocab_dir) if vocab_dir else None
        self.lock = threading.Lock()
        self.token_cache: dict[str, list[str]] = {}
        fp = hashlib.sha256()
        for r in corpus:
            fp.update(r.id.encode())
            fp.update(str(r.score).encode())
        for label in sorted(vocabs):
            fp.update(label.encode())
        self.session_id = fp.hexdigest()[:16]
        self.states: dict[str, ExpansionState] = {
            label: initial_state(corpus, vocab, stoplist, candidates, self.token_cache)
            for label, vocab in vocabs.items()
        }

    def accept(self, label: str, surfaces: list[str], version: int) -> ExpansionState:
        with self.lock:
            vocab = self.vocabs[label]
            if version != vocab.version:
                raise StaleVersionError(vocab.version)
            state = expansion_step(
                self.corpus,
                vocab,
                self.states[label],
                surfaces,
                self.stoplist,
                self.candidates,
                self.token_cache,
            )
            self.states[label] = state
            if self.vocab_dir is not None:
                save_vocabulary(vocab, self.vocab_dir / f"{label}.txt")
            return state

    def preview(self, label: str) -> StatRow:
        assignments = label_corpus(self.corpus, [self.vocabs[label]])
        return label_stats(self.corpus, assignments, labels=[label])[0]

    def kwic(self, token: str, limit: int) -> list[KwicSnippet]:
        if limit <= 0:
            return []
        from .textnorm import normalize

        occurrences: list[KwicSnippet] = []
        for r in self.corpus:
            lowered = normalize(r.body).lowered
            pos = _boundary_find(lowered, token)
            if pos < 0:
                continue
            occurrences.append(
                KwicSnippet(
                    review_id=r.id,
                    left=lowered[max(0, pos - KWIC_WINDOW) : pos],
                    match=lowered[pos : pos + len(token)],
                    right=lowered[pos + len(token) : pos + len(token) + KWIC_WINDOW],
                    score=r.score,
                    day=r.day.isoformat(),
                )
            )
        seed = int.from_bytes(
            hashlib.sha256(f"{self.session_id}:{token}".encode()).digest()[:8], "big"
        )
        rng = random.Random(seed)
        if len(occurrences) > limit:
            occurrences = rng.sample(occurrences, limit)
        return occurrences


def _boundary_find(text: str, surface: str) -> int:
    start = 0
    while True:
        i = text.find(surface, start)
        if i < 0:
            return -1
        if i == 0 or not text[i - 1].isalnum():
            return i
        start = i + 1


class StaleVersionError(Exception):
    def __init__(self, current: int):
        super().__init__(f"stale vocabulary version; refresh to version {current}")
        self.current = current


class AcceptRequest(BaseModel):
    label: str
    surfaces: list[str]
    version: int


def create_app(session: CurationSession, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="reviewforensics curation api")

    def state_payload(label: str) -> dict:
        state = session.states[label]
        return {
            "label": label,
            "round": state.round,
            "filtered_count": len(state.filtered_ids),
            "converged": state.converged,
            "version": session.vocabs[label].version,
        }

    @app.get("/session")
    def get_session() -> dict:
        return {
            "session_id": session.session_id,
            "corpus_size": len(session.corpus),
            "labels": [state_payload(label) for label in session.vocabs],
        }

    @app.get("/labels")
    def get_labels() -> dict:
        return {
            "labels": [
                {
                    **state_payload(label),
                    "entries": len(session.vocabs[label]),
                }
                for label in session.vocabs
            ]
        }

    @app.get("/candidates")
    def get_candidates(
        label: str,
        page: int = Query(default=1, ge=1),
        page_size: int = Query(default=DEFAULT_PAGE_SIZE, ge=1, le=500),
    ) -> dict:
        if label not in session.vocabs:
            raise HTTPException(status_code=404, detail=f"unknown label {label!r}")
        state = session.states[label]
        start = (page - 1) * page_size
        chunk = state.candidates[start : start + page_size]
        return {
            **state_payload(label),
            "page": page,
            "page_size": page_size,
            "total": len(state.candidates),
            "candidates": [{"token": t, "count": c} for t, c in chunk],
        }

    @app.get("/kwic")
    def get_kwic(token: str, limit: int = Query(default=10, ge=0, le=200)) -> dict:
        if not token:
            raise HTTPException(status_code=422, detail="token must be non-empty")
        snippets = session.kwic(token, limit)
        return {
            "token": token,
            "snippets": [
                {
                    "review_id": s.review_id,
                    "left": s.left,
                    "match": s.match,
                    "right": s.right,
                    "score": s.score,
                    "day": s.day,
                }
                for s in snippets
            ],
        }

    @app.post("/accept")
    def post_accept(req: AcceptRequest) -> dict:
        if req.label not in session.vocabs:
            raise HTTPException(status_code=404, detail=f"unknown label {req.label!r}")
        try:
            session.accept(req.label, req.surfaces, req.version)
        except StaleVersionError as e:
            raise HTTPException(status_code=409, detail=str(e)) from e
        except DuplicateSurfaceError as e:
            raise HTTPException(status_code=422, detail=str(e)) from e
        return state_payload(req.label)

    @app.get("/preview")
    def get_preview(label: str) -> dict:
        if label not in session.vocabs:
            raise HTTPException(status_code=404, detail=f"unknown label {label!r}")
        row = session.preview(label)
        return {
            "label": label,
            "n": row.n,
            "mean_x": row.mean_x,
            "f_x10": row.f_x10,
            "f_xlt2": row.f_xlt2,
            "version": session.vocabs[label].version,
        }

    @app.get("/export")
    def get_export() -> dict:
        return {
            "vocabularies": {
                label: dump_vocabulary(vocab) for label, vocab in session.vocabs.items()
            },
            "versions": {label: vocab.version for label, vocab in session.vocabs.items()},
        }

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def build_session_app(
    corpus: Corpus,
    vocab_dir: str | Path | None = None,
    stopword_path: str | Path | None = None,
    candidates: int = DEFAULT_CANDIDATES,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    """Wire a session from vocabulary files (or the shipped defaults)."""
    if vocab_dir is not None:
        vocab_dir = Path(vocab_dir)
        vocabs = {
            path.stem: load_vocabulary(path)
            for path in sorted(vocab_dir.glob("*.txt"))
        }
        if not vocabs:
            raise FileNotFoundError(f"no vocabulary files in {vocab_dir}")
    else:
        vocabs = default_vocabularies()
    session = CurationSession(
        corpus,
        vocabs,
        stoplist=load_stoplist(stopword_path),
        candidates=candidates,
        vocab_dir=vocab_dir,
    )
    return create_app(session, ui_dir=ui_dir)
