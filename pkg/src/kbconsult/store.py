"""SQLite persistence for knowledge bases.

Four entity tables plus a version counter. The store deliberately does not
enforce referential integrity between tables: half-finished knowledge is a
normal authoring state, and structural validation is the graph layer's job.
What the store does guarantee: ids are unique per entity kind, every
mutation bumps the version, referenced symptoms/diagnoses cannot be deleted,
and imports are all-or-nothing.
"""

from __future__ import annotations

import secrets
import sqlite3
import threading
from contextlib import contextmanager
from dataclasses import dataclass

from .bundle import KnowledgeBundle, canonicalize
from .model import Case, Decision, Diagnosis, Leaf, RuleRow, Symptom, is_well_formed_id


class StorageUnavailableError(RuntimeError):
    """The backing database cannot be opened, read, or written."""


class MalformedIdError(ValueError):
    def __init__(self, field: str, value: object):
        super().__init__(f"{field}: {value!r} is not a well-formed id")
        self.field = field
        self.value = value


class NotFoundError(LookupError):
    def __init__(self, kind: str, entity_id: str):
        super().__init__(f"no {kind} with id {entity_id!r}")
        self.kind = kind
        self.entity_id = entity_id


class StillReferencedError(RuntimeError):
    def __init__(self, kind: str, entity_id: str, referrers: list[str]):
        super().__init__(
            f"{kind} {entity_id!r} is still referenced by rule(s) {', '.join(referrers)}"
        )
        self.kind = kind
        self.entity_id = entity_id
        self.referrers = referrers


@dataclass(frozen=True)
class KBSnapshot:
    """Immutable point-in-time view of the whole store."""

    version: int
    cases: tuple[Case, ...]
    symptoms: tuple[Symptom, ...]
    diagnoses: tuple[Diagnosis, ...]
    rules: tuple[RuleRow, ...]

    def case_by_id(self, case_id: str) -> Case | None:
        for case in self.cases:
            if case.id == case_id:
                return case
        return None


@dataclass(frozen=True)
class ImportReport:
    cases: int
    symptoms: int
    diagnoses: int
    rules: int
    version: int


_SCHEMA = """
CREATE TABLE IF NOT EXISTS cases (
    id          TEXT PRIMARY KEY,
    name        TEXT NOT NULL,
    description TEXT NOT NULL DEFAULT ''
);
CREATE TABLE IF NOT EXISTS symptoms (
    id            TEXT PRIMARY KEY,
    case_id       TEXT NOT NULL,
    question_text TEXT NOT NULL,
    description   TEXT NOT NULL DEFAULT ''
);
CREATE TABLE IF NOT EXISTS diagnoses (
    id              TEXT PRIMARY KEY,
    case_id         TEXT NOT NULL,
    conclusion_text TEXT NOT NULL,
    advice_text     TEXT NOT NULL DEFAULT ''
);
CREATE TABLE IF NOT EXISTS rules (
    id                  TEXT PRIMARY KEY,
    case_id             TEXT NOT NULL,
    question_symptom_id TEXT NOT NULL,
    is_first_question   INTEGER NOT NULL,
    answer_label        TEXT NOT NULL,
    is_answer_leaf      INTEGER NOT NULL,
    target_id           TEXT NOT NULL,
    order_index         INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS meta (
    id      INTEGER PRIMARY KEY CHECK (id = 1),
    version INTEGER NOT NULL
);
"""

KINDS = ("case", "symptom", "diagnosis", "rule")


def mint_id() -> str:
    """A fresh opaque identifier (hex, well-formed per the id grammar)."""
    return secrets.token_hex(16)


class KnowledgeStore:
    """One SQLite database file; safe for concurrent use from many threads.

    All operations serialize on an internal lock (single-writer contract;
    readers see only fully applied mutations).
    """

    def __init__(self, path: str, *, read_only: bool = False):
        self._path = str(path)
        self._lock = threading.RLock()
        try:
            if read_only:
                self._conn = sqlite3.connect(
                    f"file:{self._path}?mode=ro", uri=True, check_same_thread=False
                )
            else:
                self._conn = sqlite3.connect(self._path, check_same_thread=False)
        except sqlite3.Error as exc:
            raise StorageUnavailableError(f"cannot open store at {self._path}: {exc}") from exc

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    @contextmanager
    def _guard(self):
        try:
            with self._lock:
                yield self._conn
        except sqlite3.Error as exc:
            raise StorageUnavailableError(str(exc)) from exc

    def init_schema(self) -> None:
        """Create the four entity tables and the version counter; idempotent."""
        with self._guard() as conn, conn:
            conn.executescript(_SCHEMA)
            conn.execute("INSERT OR IGNORE INTO meta (id, version) VALUES (1, 0)")

    @property
    def version(self) -> int:
        with self._guard() as conn:
            row = conn.execute("SELECT version FROM meta WHERE id = 1").fetchone()
        if row is None:
            raise StorageUnavailableError("schema not initialized")
        return row[0]

    def upsert_entity(self, entity: Case | Symptom | Diagnosis | RuleRow) -> int:
        """Insert or replace one entity by id; returns the new version."""
        with self._guard() as conn, conn:
            self._write_entity(conn, entity)
            return self._bump(conn, 1)

    def delete_entity(self, kind: str, entity_id: str) -> int:
        """Delete one entity; returns the new version.

        Deleting a case cascades to everything it owns. Deleting a symptom
        or diagnosis that any rule still points at is refused.
        """
        if kind not in KINDS:
            raise ValueError(f"unknown entity kind {kind!r}")
        table = _TABLES[kind]
        with self._guard() as conn, conn:
            exists = conn.execute(f"SELECT 1 FROM {table} WHERE id = ?", (entity_id,)).fetchone()
            if not exists:
                raise NotFoundError(kind, entity_id)
            if kind == "symptom":
                referrers = conn.execute(
                    "SELECT id FROM rules WHERE question_symptom_id = ? "
                    "OR (is_answer_leaf = 0 AND target_id = ?) ORDER BY id",
                    (entity_id, entity_id),
                ).fetchall()
                if referrers:
                    raise StillReferencedError(kind, entity_id, [r[0] for r in referrers])
            elif kind == "diagnosis":
                referrers = conn.execute(
                    "SELECT id FROM rules WHERE is_answer_leaf = 1 AND target_id = ? ORDER BY id",
                    (entity_id,),
                ).fetchall()
                if referrers:
                    raise StillReferencedError(kind, entity_id, [r[0] for r in referrers])
            if kind == "case":
                conn.execute("DELETE FROM symptoms WHERE case_id = ?", (entity_id,))
                conn.execute("DELETE FROM diagnoses WHERE case_id = ?", (entity_id,))
                conn.execute("DELETE FROM rules WHERE case_id = ?", (entity_id,))
            conn.execute(f"DELETE FROM {table} WHERE id = ?", (entity_id,))
            return self._bump(conn, 1)

    def snapshot(self) -> KBSnapshot:
        """Consistent point-in-time view of all entities, sorted by id."""
        with self._guard() as conn, conn:
            version_row = conn.execute("SELECT version FROM meta WHERE id = 1").fetchone()
            if version_row is None:
                raise StorageUnavailableError("schema not initialized")
            cases = [
                Case(*row)
                for row in conn.execute("SELECT id, name, description FROM cases ORDER BY id")
            ]
            symptoms = [
                Symptom(*row)
                for row in conn.execute(
                    "SELECT id, case_id, question_text, description FROM symptoms ORDER BY id"
                )
            ]
            diagnoses = [
                Diagnosis(*row)
                for row in conn.execute(
                    "SELECT id, case_id, conclusion_text, advice_text FROM diagnoses ORDER BY id"
                )
            ]
            rules = [
                _rule_from_row(row)
                for row in conn.execute(
                    "SELECT id, case_id, question_symptom_id, is_first_question, answer_label, "
                    "is_answer_leaf, target_id, order_index FROM rules ORDER BY id"
                )
            ]
        return KBSnapshot(
            version=version_row[0],
            cases=tuple(cases),
            symptoms=tuple(symptoms),
            diagnoses=tuple(diagnoses),
            rules=tuple(rules),
        )

    def import_bundle(self, bundle: KnowledgeBundle) -> ImportReport:
        """Upsert every bundle record in one all-or-nothing transaction.

        The version advances by the number of records written; a failure on
        any record leaves the store untouched.
        """
        with self._guard() as conn, conn:
            count = 0
            for group in (bundle.cases, bundle.symptoms, bundle.diagnoses, bundle.rules):
                for entity in group:
                    self._write_entity(conn, entity)
                    count += 1
            version = self._bump(conn, count)
            return ImportReport(
                cases=len(bundle.cases),
                symptoms=len(bundle.symptoms),
                diagnoses=len(bundle.diagnoses),
                rules=len(bundle.rules),
                version=version,
            )

    def export_bundle(self, case_id: str | None = None) -> KnowledgeBundle:
        """The store (or one case) as a canonically ordered bundle."""
        snap = self.snapshot()
        if case_id is not None:
            if snap.case_by_id(case_id) is None:
                raise NotFoundError("case", case_id)
            return canonicalize(
                KnowledgeBundle(
                    cases=tuple(c for c in snap.cases if c.id == case_id),
                    symptoms=tuple(s for s in snap.symptoms if s.case_id == case_id),
                    diagnoses=tuple(d for d in snap.diagnoses if d.case_id == case_id),
                    rules=tuple(r for r in snap.rules if r.case_id == case_id),
                )
            )
        return canonicalize(
            KnowledgeBundle(
                cases=snap.cases,
                symptoms=snap.symptoms,
                diagnoses=snap.diagnoses,
                rules=snap.rules,
            )
        )

    def _bump(self, conn: sqlite3.Connection, steps: int) -> int:
        if steps:
            conn.execute("UPDATE meta SET version = version + ? WHERE id = 1", (steps,))
        row = conn.execute("SELECT version FROM meta WHERE id = 1").fetchone()
        if row is None:
            raise StorageUnavailableError("schema not initialized")
        return row[0]

    def _write_entity(self, conn: sqlite3.Connection, entity) -> None:
        if isinstance(entity, Case):
            _check_id("id", entity.id)
            conn.execute(
                "INSERT OR REPLACE INTO cases (id, name, description) VALUES (?, ?, ?)",
                (entity.id, entity.name, entity.description),
            )
        elif isinstance(entity, Symptom):
            _check_id("id", entity.id)
            _check_id("case_id", entity.case_id)
            conn.execute(
                "INSERT OR REPLACE INTO symptoms (id, case_id, question_text, description) "
                "VALUES (?, ?, ?, ?)",
                (entity.id, entity.case_id, entity.question_text, entity.description),
            )
        elif isinstance(entity, Diagnosis):
            _check_id("id", entity.id)
            _check_id("case_id", entity.case_id)
            conn.execute(
                "INSERT OR REPLACE INTO diagnoses (id, case_id, conclusion_text, advice_text) "
                "VALUES (?, ?, ?, ?)",
                (entity.id, entity.case_id, entity.conclusion_text, entity.advice_text),
            )
        elif isinstance(entity, RuleRow):
            _check_id("id", entity.id)
            _check_id("case_id", entity.case_id)
            _check_id("question", entity.question)
            if isinstance(entity.target, Leaf):
                is_leaf, target_id = 1, entity.target.diagnosis_id
                _check_id("target.id", target_id)
            else:
                is_leaf, target_id = 0, entity.target.symptom_id
                _check_id("target.id", target_id)
            conn.execute(
                "INSERT OR REPLACE INTO rules (id, case_id, question_symptom_id, is_first_question, "
                "answer_label, is_answer_leaf, target_id, order_index) VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
                (
                    entity.id,
                    entity.case_id,
                    entity.question,
                    1 if entity.is_first_question else 0,
                    entity.answer_label,
                    is_leaf,
                    target_id,
                    entity.order_index,
                ),
            )
        else:
            raise TypeError(f"cannot store {type(entity).__name__}")


_TABLES = {"case": "cases", "symptom": "symptoms", "diagnosis": "diagnoses", "rule": "rules"}


def _check_id(field: str, value: str) -> None:
    if not is_well_formed_id(value):
        raise MalformedIdError(field, value)


def _rule_from_row(row) -> RuleRow:
    rid, case_id, question, first, label, is_leaf, target_id, order_index = row
    target = Leaf(target_id) if is_leaf else Decision(target_id)
    return RuleRow(
        id=rid,
        case_id=case_id,
        question=question,
        is_first_question=bool(first),
        answer_label=label,
        target=target,
        order_index=order_index,
    )
