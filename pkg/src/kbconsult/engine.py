"""Step-by-step consultation sessions over a validated knowledge graph.

A session walks the tree one answered question at a time: start at the root,
follow the chosen answer to the next question, stop when an answer lands on
a diagnosis. The session records the walk as (question, chosen rule) pairs,
so the cursor can always be reproduced by replaying the history.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass, field

from .graph import answers_of
from .model import Decision, KnowledgeGraph, Leaf, RuleRow


class VersionMismatchError(RuntimeError):
    """The session was started against a different knowledge-base version."""

    def __init__(self, pinned: int, current: int):
        super().__init__(f"session pinned to knowledge version {pinned}, graph is at {current}")
        self.pinned = pinned
        self.current = current


class UnknownAnswerError(ValueError):
    """The submitted rule id is not an answer of the current question."""

    def __init__(self, rule_id: str, question_id: str):
        super().__init__(f"rule {rule_id} is not an answer of question {question_id}")
        self.rule_id = rule_id
        self.question_id = question_id


class SessionConcludedError(RuntimeError):
    """No further answers are accepted once a diagnosis is reached."""


class AtRootError(RuntimeError):
    """Cannot step back past the first question."""


@dataclass(frozen=True)
class AtQuestion:
    symptom_id: str


@dataclass(frozen=True)
class Concluded:
    diagnosis_id: str


Cursor = AtQuestion | Concluded


@dataclass
class Session:
    """One live consultation.

    ``history`` holds (question id, chosen rule id) pairs in answer order;
    replaying it from the root reproduces ``cursor``. Operations on a single
    session are not thread-safe; serialize them externally.
    """

    id: str
    case_id: str
    kb_version: int
    cursor: Cursor
    history: list[tuple[str, str]] = field(default_factory=list)


@dataclass(frozen=True)
class QuestionView:
    """What the user sees while identification is in progress."""

    question_text: str
    description: str
    answers: tuple[tuple[str, str], ...]  # (rule id, answer label), display order
    step_number: int


@dataclass(frozen=True)
class ConclusionView:
    """What the user sees once a diagnosis is reached."""

    conclusion_text: str
    advice_text: str
    transcript: tuple[tuple[str, str], ...]  # (question text, chosen answer label)


def new_session_id() -> str:
    # 192 bits, URL-safe; session ids ride in URL paths.
    return secrets.token_urlsafe(24)


def start_session(graph: KnowledgeGraph, kb_version: int) -> tuple[Session, QuestionView]:
    """Open a consultation at the root question."""
    session = Session(
        id=new_session_id(),
        case_id=graph.case.id,
        kb_version=kb_version,
        cursor=AtQuestion(graph.root),
    )
    return session, _question_view(graph, graph.root, step_number=1)


def current_view(
    graph: KnowledgeGraph, session: Session, graph_version: int
) -> QuestionView | ConclusionView:
    """The page for the session's current cursor; never mutates the session.

    ``graph_version`` is the knowledge version the graph was built from; if
    it differs from the version pinned at session start the knowledge has
    been edited underneath the session and the only safe move is a restart.
    """
    if graph_version != session.kb_version:
        raise VersionMismatchError(session.kb_version, graph_version)
    if isinstance(session.cursor, Concluded):
        return _conclusion_view(graph, session, session.cursor.diagnosis_id)
    return _question_view(graph, session.cursor.symptom_id, step_number=len(session.history) + 1)


def submit_answer(
    graph: KnowledgeGraph, session: Session, rule_id: str
) -> QuestionView | ConclusionView:
    """Apply one chosen answer and advance the cursor.

    Returns the next question view for a decision answer, or the conclusion
    view when the answer lands on a leaf.
    """
    if isinstance(session.cursor, Concluded):
        raise SessionConcludedError("session already concluded")
    question_id = session.cursor.symptom_id
    row = _find_answer(graph, question_id, rule_id)
    if row is None:
        raise UnknownAnswerError(rule_id, question_id)

    session.history.append((question_id, rule_id))
    if isinstance(row.target, Leaf):
        session.cursor = Concluded(row.target.diagnosis_id)
        return _conclusion_view(graph, session, row.target.diagnosis_id)
    session.cursor = AtQuestion(row.target.symptom_id)
    return _question_view(graph, row.target.symptom_id, step_number=len(session.history) + 1)


def step_back(graph: KnowledgeGraph, session: Session) -> QuestionView:
    """Undo the most recent answer, also from a concluded session."""
    if not session.history:
        raise AtRootError("already at the first question")
    question_id, _rule_id = session.history.pop()
    session.cursor = AtQuestion(question_id)
    return _question_view(graph, question_id, step_number=len(session.history) + 1)


def transcript(graph: KnowledgeGraph, session: Session) -> list[tuple[str, str]]:
    """Human-readable replay of the history: (question text, answer label)."""
    out = []
    for question_id, rule_id in session.history:
        row = _find_answer(graph, question_id, rule_id)
        question = graph.symptoms[question_id]
        out.append((question.question_text, row.answer_label if row else rule_id))
    return out


def _find_answer(graph: KnowledgeGraph, question_id: str, rule_id: str) -> RuleRow | None:
    for row in answers_of(graph, question_id):
        if row.id == rule_id:
            return row
    return None


def _question_view(graph: KnowledgeGraph, question_id: str, step_number: int) -> QuestionView:
    symptom = graph.symptoms[question_id]
    return QuestionView(
        question_text=symptom.question_text,
        description=symptom.description,
        answers=tuple((row.id, row.answer_label) for row in answers_of(graph, question_id)),
        step_number=step_number,
    )


def _conclusion_view(graph: KnowledgeGraph, session: Session, diagnosis_id: str) -> ConclusionView:
    diagnosis = graph.diagnoses[diagnosis_id]
    return ConclusionView(
        conclusion_text=diagnosis.conclusion_text,
        advice_text=diagnosis.advice_text,
        transcript=tuple(transcript(graph, session)),
    )
