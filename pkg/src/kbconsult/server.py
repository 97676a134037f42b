"""HTTP facade over the knowledge store and consultation engine.

One server covers both device worlds: consultation routes negotiate between
responsive HTML and WML per request, while the admin routes (JSON, bearer
token) let a knowledge engineer edit, validate, and transfer knowledge
bases. Sessions live in memory, ride their id in the URL path (WAP 1.x
agents have unreliable cookie support), and pin the knowledge version they
started from; editing the knowledge never disturbs a running session, it
just forces a restart on the next request.
"""

from __future__ import annotations

import hmac
import json
import secrets
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .bundle import (
    BundleParseError,
    UnsupportedVersionError,
    dump_bundle,
    entity_record,
    parse_bundle,
    parse_entity_record,
)
from .engine import (
    AtRootError,
    ConclusionView,
    QuestionView,
    Session,
    SessionConcludedError,
    UnknownAnswerError,
    VersionMismatchError,
    current_view,
    start_session,
    step_back,
    submit_answer,
)
from .graph import ValidationError, build_graph, validate
from .model import Case, KnowledgeGraph
from .render import (
    Format,
    PageDocument,
    UnrecognizedOverrideError,
    negotiate_format,
    render_case_list,
    render_conclusion,
    render_notice,
    render_question,
)
from .store import (
    KnowledgeStore,
    MalformedIdError,
    NotFoundError,
    StillReferencedError,
    mint_id,
)

DEFAULT_SESSION_HORIZON = 30 * 60.0  # seconds of idleness before a session expires
DEFAULT_TOKEN_LIFETIME = 60 * 60.0

_ADMIN_KINDS = {"cases": "case", "symptoms": "symptom", "diagnoses": "diagnosis", "rules": "rule"}


@dataclass
class ServerConfig:
    store_path: str
    host: str = "127.0.0.1"
    port: int = 8080
    admin_username: str | None = None
    admin_password: str | None = None
    session_horizon: float = DEFAULT_SESSION_HORIZON
    token_lifetime: float = DEFAULT_TOKEN_LIFETIME
    quiet: bool = False


@dataclass
class _SessionEntry:
    session: Session
    last_seen: float
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionRegistry:
    """In-memory session map with idle expiry.

    A session idle past the horizon is unreachable even before a purge has
    physically removed it. ``fetch`` refreshes the idle clock and hands out
    the per-session lock that serializes engine operations.
    """

    def __init__(self, horizon: float = DEFAULT_SESSION_HORIZON, clock=time.monotonic):
        self._horizon = horizon
        self._clock = clock
        self._lock = threading.Lock()
        self._entries: dict[str, _SessionEntry] = {}

    def add(self, session: Session) -> None:
        with self._lock:
            self._entries[session.id] = _SessionEntry(session, self._clock())

    def fetch(self, session_id: str) -> _SessionEntry | None:
        now = self._clock()
        with self._lock:
            entry = self._entries.get(session_id)
            if entry is None:
                return None
            if now - entry.last_seen > self._horizon:
                del self._entries[session_id]
                return None
            entry.last_seen = now
            return entry

    def purge_expired(self, now: float | None = None) -> int:
        if now is None:
            now = self._clock()
        with self._lock:
            dead = [sid for sid, e in self._entries.items() if now - e.last_seen > self._horizon]
            for sid in dead:
                del self._entries[sid]
            return len(dead)

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)


class TokenRegistry:
    """Bearer tokens for the admin surface."""

    def __init__(self, lifetime: float = DEFAULT_TOKEN_LIFETIME, clock=time.monotonic):
        self._lifetime = lifetime
        self._clock = clock
        self._lock = threading.Lock()
        self._expiry: dict[str, float] = {}

    def issue(self) -> tuple[str, float]:
        token = secrets.token_urlsafe(32)
        with self._lock:
            self._expiry[token] = self._clock() + self._lifetime
        return token, self._lifetime

    def is_valid(self, token: str) -> bool:
        now = self._clock()
        with self._lock:
            expiry = self._expiry.get(token)
            if expiry is None:
                return False
            if now > expiry:
                del self._expiry[token]
                return False
            return True


class KnowledgeService(ThreadingHTTPServer):
    """The configured server: store, registries, and a per-version graph cache."""

    daemon_threads = True

    def __init__(self, config: ServerConfig):
        self.config = config
        self.store = KnowledgeStore(config.store_path)
        self.store.init_schema()
        self.sessions = SessionRegistry(config.session_horizon)
        self.tokens = TokenRegistry(config.token_lifetime)
        self._graphs: dict[tuple[int, str], KnowledgeGraph] = {}
        self._graphs_lock = threading.Lock()
        super().__init__((config.host, config.port), RequestHandler)

    def graph_for(self, case: Case, snapshot) -> KnowledgeGraph:
        """Build (or reuse) the validated graph for one case at one version."""
        key = (snapshot.version, case.id)
        with self._graphs_lock:
            graph = self._graphs.get(key)
        if graph is not None:
            return graph
        graph = build_graph(case, list(snapshot.symptoms), list(snapshot.diagnoses), list(snapshot.rules))
        with self._graphs_lock:
            # drop graphs of superseded versions; pinned sessions get a
            # restart page anyway
            for stale in [k for k in self._graphs if k[0] != snapshot.version]:
                del self._graphs[stale]
            self._graphs[key] = graph
        return graph

    def shutdown_and_close(self) -> None:
        self.shutdown()
        self.server_close()
        self.store.close()


class RequestHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "kbconsult"
    server: KnowledgeService

    def log_message(self, fmt, *args):  # noqa: A002 - stdlib signature
        if not self.server.config.quiet:
            super().log_message(fmt, *args)

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_PUT(self):
        self._dispatch("PUT")

    def do_DELETE(self):
        self._dispatch("DELETE")

    # -- plumbing ---------------------------------------------------------

    def _dispatch(self, method: str) -> None:
        self.server.sessions.purge_expired()
        parsed = urlparse(self.path)
        segments = [s for s in parsed.path.split("/") if s]
        query = {k: v[0] for k, v in parse_qs(parsed.query, keep_blank_values=True).items()}
        try:
            self._route(method, segments, query)
        except BrokenPipeError:
            pass
        except Exception as exc:  # pragma: no cover - last resort
            try:
                self._send_json(500, {"error": "internal error", "detail": str(exc)})
            except Exception:
                pass

    def _route(self, method: str, segments: list[str], query: dict[str, str]) -> None:
        if not segments:
            if method == "GET":
                self.send_response(302)
                self.send_header("Location", "/cases")
                self.send_header("Content-Length", "0")
                self.end_headers()
                return
            return self._not_found()

        head = segments[0]
        if head == "cases" and len(segments) == 1 and method == "GET":
            return self._handle_case_list(query)
        if head == "consult" and method == "GET":
            return self._route_consult(segments[1:], query)
        if head == "admin":
            return self._route_admin(method, segments[1:], query)
        return self._not_found()

    def _negotiated_format(self, query: dict[str, str]) -> Format | None:
        try:
            return negotiate_format(
                self.headers.get("Accept", ""),
                self.headers.get("User-Agent", ""),
                query.get("fmt"),
            )
        except UnrecognizedOverrideError as exc:
            self._send_json(400, {"error": "UNRECOGNIZED_OVERRIDE", "field": "fmt", "detail": str(exc)})
            return None

    def _send_page(self, status: int, page: PageDocument) -> None:
        self.send_response(status)
        self.send_header("Content-Type", page.media_type)
        self.send_header("Content-Length", str(len(page.body)))
        self.end_headers()
        self.wfile.write(page.body)

    def _send_json(self, status: int, obj) -> None:
        body = (json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n").encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        if status == 401:
            self.send_header("WWW-Authenticate", "Bearer")
        self.end_headers()
        self.wfile.write(body)

    def _send_notice(self, status: int, fmt: Format, message: str, link: str, link_label: str) -> None:
        self._send_page(status, render_notice(message, fmt, link, link_label))

    def _not_found(self, fmt: Format | None = None) -> None:
        if fmt is None:
            self._send_json(404, {"error": "not found"})
        else:
            self._send_notice(404, fmt, "Page not found.", "/cases", "All consultations")

    def _read_body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length > 0 else b""

    def _read_json_body(self) -> dict | None:
        try:
            obj = json.loads(self._read_body().decode("utf-8") or "{}")
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            self._send_json(400, {"error": "PARSE_ERROR", "detail": f"request body is not valid JSON: {exc}"})
            return None
        if not isinstance(obj, dict):
            self._send_json(400, {"error": "PARSE_ERROR", "detail": "request body must be a JSON object"})
            return None
        return obj

    # -- consultation routes ----------------------------------------------

    def _handle_case_list(self, query: dict[str, str]) -> None:
        fmt = self._negotiated_format(query)
        if fmt is None:
            return
        snap = self.server.store.snapshot()
        self._send_page(200, render_case_list(list(snap.cases), fmt, "/consult/{case_id}/start"))

    def _route_consult(self, rest: list[str], query: dict[str, str]) -> None:
        fmt = self._negotiated_format(query)
        if fmt is None:
            return
        if len(rest) == 2 and rest[1] == "start":
            return self._handle_start(rest[0], fmt)
        if len(rest) == 1:
            return self._handle_current(rest[0], fmt)
        if len(rest) == 3 and rest[1] == "answer":
            return self._handle_answer(rest[0], rest[2], fmt)
        if len(rest) == 2 and rest[1] == "answer":
            rule_id = query.get("rule")
            if rule_id is None:
                return self._send_notice(
                    400, fmt, "Missing field: rule. Pick an answer before continuing.", "/cases",
                    "All consultations",
                )
            return self._handle_answer(rest[0], rule_id, fmt)
        if len(rest) == 2 and rest[1] == "back":
            return self._handle_back(rest[0], fmt)
        return self._not_found(fmt)

    def _handle_start(self, case_id: str, fmt: Format) -> None:
        snap = self.server.store.snapshot()
        case = snap.case_by_id(case_id)
        if case is None:
            return self._not_found(fmt)
        try:
            graph = self.server.graph_for(case, snap)
        except ValidationError as exc:
            return self._send_notice(
                409,
                fmt,
                f"This knowledge base is not consultable yet: {exc}.",
                "/cases",
                "All consultations",
            )
        session, view = start_session(graph, snap.version)
        self.server.sessions.add(session)
        self._send_page(200, self._question_page(session, view, fmt, case))

    def _with_session(self, session_id: str, fmt: Format):
        """Resolve session, pinned-version graph, and case; None after replying."""
        entry = self.server.sessions.fetch(session_id)
        if entry is None:
            self._send_notice(404, fmt, "Unknown or expired session.", "/cases", "All consultations")
            return None
        snap = self.server.store.snapshot()
        session = entry.session
        if snap.version != session.kb_version:
            self._send_notice(
                409,
                fmt,
                "The knowledge base was updated. Please restart the consultation.",
                f"/consult/{session.case_id}/start",
                "Restart consultation",
            )
            return None
        case = snap.case_by_id(session.case_id)
        if case is None:  # unreachable while versions match; defensive
            self._not_found(fmt)
            return None
        graph = self.server.graph_for(case, snap)
        return entry, snap, case, graph

    def _handle_current(self, session_id: str, fmt: Format) -> None:
        resolved = self._with_session(session_id, fmt)
        if resolved is None:
            return
        entry, snap, case, graph = resolved
        with entry.lock:
            try:
                view = current_view(graph, entry.session, snap.version)
            except VersionMismatchError:
                return self._send_notice(
                    409,
                    fmt,
                    "The knowledge base was updated. Please restart the consultation.",
                    f"/consult/{case.id}/start",
                    "Restart consultation",
                )
            if isinstance(view, QuestionView):
                page = self._question_page(entry.session, view, fmt, case)
            else:
                page = self._conclusion_page(view, fmt, case)
        self._send_page(200, page)

    def _handle_answer(self, session_id: str, rule_id: str, fmt: Format) -> None:
        resolved = self._with_session(session_id, fmt)
        if resolved is None:
            return
        entry, _snap, case, graph = resolved
        with entry.lock:
            try:
                outcome = submit_answer(graph, entry.session, rule_id)
            except UnknownAnswerError as exc:
                return self._send_notice(
                    400,
                    fmt,
                    f"Invalid field: rule. {exc}.",
                    f"/consult/{session_id}",
                    "Back to the current question",
                )
            except SessionConcludedError:
                return self._send_notice(
                    400,
                    fmt,
                    "This consultation already concluded.",
                    f"/consult/{session_id}",
                    "See the conclusion",
                )
            if isinstance(outcome, QuestionView):
                page = self._question_page(entry.session, outcome, fmt, case)
            else:
                page = self._conclusion_page(outcome, fmt, case)
        self._send_page(200, page)

    def _handle_back(self, session_id: str, fmt: Format) -> None:
        resolved = self._with_session(session_id, fmt)
        if resolved is None:
            return
        entry, _snap, case, graph = resolved
        with entry.lock:
            try:
                view = step_back(graph, entry.session)
            except AtRootError:
                return self._send_notice(
                    400,
                    fmt,
                    "Already at the first question.",
                    f"/consult/{session_id}",
                    "Back to the question",
                )
            page = self._question_page(entry.session, view, fmt, case)
        self._send_page(200, page)

    def _question_page(self, session: Session, view: QuestionView, fmt: Format, case: Case) -> PageDocument:
        return render_question(
            view, fmt, f"/consult/{session.id}/answer/{{rule_id}}", title=case.name
        )

    def _conclusion_page(self, view: ConclusionView, fmt: Format, case: Case) -> PageDocument:
        return render_conclusion(view, fmt, f"/consult/{case.id}/start", title=case.name)

    # -- admin routes -------------------------------------------------------

    def _route_admin(self, method: str, rest: list[str], query: dict[str, str]) -> None:
        if rest == ["login"]:
            if method != "POST":
                return self._not_found()
            return self._handle_login()
        if not self._admin_authorized():
            return self._send_json(401, {"error": "unauthorized"})
        if len(rest) == 2 and rest[0] == "validate" and method == "GET":
            return self._handle_validate(rest[1])
        if rest == ["import"] and method == "POST":
            return self._handle_import()
        if rest == ["export"] and method == "GET":
            return self._handle_export(query.get("case"))
        if rest and rest[0] in _ADMIN_KINDS:
            kind = _ADMIN_KINDS[rest[0]]
            if len(rest) == 1:
                if method == "GET":
                    return self._handle_entity_list(rest[0])
                if method == "POST":
                    return self._handle_entity_upsert(kind, entity_id=None)
                return self._not_found()
            if len(rest) == 2:
                if method == "GET":
                    return self._handle_entity_get(rest[0], rest[1])
                if method == "PUT":
                    return self._handle_entity_upsert(kind, entity_id=rest[1])
                if method == "DELETE":
                    return self._handle_entity_delete(kind, rest[1])
        return self._not_found()

    def _admin_authorized(self) -> bool:
        header = self.headers.get("Authorization", "")
        if not header.startswith("Bearer "):
            return False
        return self.server.tokens.is_valid(header[len("Bearer "):].strip())

    def _handle_login(self) -> None:
        body = self._read_json_body()
        if body is None:
            return
        for field_name in ("username", "password"):
            if field_name not in body or not isinstance(body[field_name], str):
                return self._send_json(400, {"error": "PARSE_ERROR", "field": field_name})
        config = self.server.config
        if config.admin_username is None or config.admin_password is None:
            return self._send_json(401, {"error": "invalid credentials"})
        # evaluate both comparisons; no early exit on the username
        user_ok = hmac.compare_digest(body["username"].encode(), config.admin_username.encode())
        pass_ok = hmac.compare_digest(body["password"].encode(), config.admin_password.encode())
        if not (user_ok and pass_ok):
            return self._send_json(401, {"error": "invalid credentials"})
        token, lifetime = self.server.tokens.issue()
        self._send_json(200, {"token": token, "expires_in": lifetime})

    def _handle_validate(self, case_id: str) -> None:
        snap = self.server.store.snapshot()
        case = snap.case_by_id(case_id)
        if case is None:
            return self._send_json(404, {"error": "not found", "case": case_id})
        report = validate(case, list(snap.symptoms), list(snap.diagnoses), list(snap.rules))
        self._send_json(
            200,
            {
                "case_id": case_id,
                "errors": [vars(d) for d in report.errors],
                "warnings": [vars(d) for d in report.warnings],
            },
        )

    def _handle_import(self) -> None:
        try:
            bundle = parse_bundle(self._read_body())
        except UnsupportedVersionError as exc:
            return self._send_json(400, {"error": "UNSUPPORTED_VERSION", "detail": str(exc)})
        except BundleParseError as exc:
            return self._send_json(
                400, {"error": "PARSE_ERROR", "field": exc.locator, "detail": exc.problem}
            )
        try:
            report = self.server.store.import_bundle(bundle)
        except MalformedIdError as exc:
            return self._send_json(400, {"error": "MALFORMED_ID", "field": exc.field, "detail": str(exc)})
        self._send_json(200, vars(report))

    def _handle_export(self, case_id: str | None) -> None:
        try:
            bundle = self.server.store.export_bundle(case_id)
        except NotFoundError:
            return self._send_json(404, {"error": "not found", "case": case_id})
        body = dump_bundle(bundle).encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _handle_entity_list(self, plural: str) -> None:
        snap = self.server.store.snapshot()
        entities = getattr(snap, plural)
        self._send_json(
            200, {"items": [entity_record(e) for e in entities], "version": snap.version}
        )

    def _handle_entity_get(self, plural: str, entity_id: str) -> None:
        snap = self.server.store.snapshot()
        for entity in getattr(snap, plural):
            if entity.id == entity_id:
                return self._send_json(200, entity_record(entity))
        self._send_json(404, {"error": "not found", "id": entity_id})

    def _handle_entity_upsert(self, kind: str, entity_id: str | None) -> None:
        body = self._read_json_body()
        if body is None:
            return
        if entity_id is not None:
            if "id" in body and body["id"] != entity_id:
                return self._send_json(
                    400, {"error": "PARSE_ERROR", "field": "id", "detail": "body id differs from URL id"}
                )
            body["id"] = entity_id
        elif "id" not in body:
            body["id"] = mint_id()
        try:
            entity = parse_entity_record(kind, body, kind)
        except BundleParseError as exc:
            return self._send_json(
                400, {"error": "PARSE_ERROR", "field": exc.locator, "detail": exc.problem}
            )
        try:
            version = self.server.store.upsert_entity(entity)
        except MalformedIdError as exc:
            return self._send_json(400, {"error": "MALFORMED_ID", "field": exc.field, "detail": str(exc)})
        self._send_json(200, {"id": entity.id, "version": version})

    def _handle_entity_delete(self, kind: str, entity_id: str) -> None:
        try:
            version = self.server.store.delete_entity(kind, entity_id)
        except NotFoundError:
            return self._send_json(404, {"error": "not found", "id": entity_id})
        except StillReferencedError as exc:
            return self._send_json(
                409, {"error": "STILL_REFERENCED", "id": entity_id, "referrers": exc.referrers}
            )
        self._send_json(200, {"version": version})


def serve(config: ServerConfig) -> KnowledgeService:
    """Create a service bound per config; caller drives serve_forever()."""
    return KnowledgeService(config)
