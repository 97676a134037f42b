"""Domain types for decision-tree knowledge bases.

A knowledge base describes one or more problem domains (cases). Each case
owns a set of questions (symptoms), a set of conclusions (diagnoses), and a
rules table in which every row is one answer edge of the decision tree:
"this answer to this question leads to that next question or to that
conclusion".
"""

from __future__ import annotations

import re
from dataclasses import dataclass

# Identifiers are opaque, URL-safe, and carried verbatim through storage
# and bundles.
ID_PATTERN = re.compile(r"^[A-Za-z0-9_-]{1,64}$")


def is_well_formed_id(value: str) -> bool:
    return isinstance(value, str) and bool(ID_PATTERN.match(value))


@dataclass(frozen=True)
class Case:
    """A problem domain, e.g. one disease to consult about."""

    id: str
    name: str
    description: str = ""


@dataclass(frozen=True)
class Symptom:
    """A question shown to the user during identification."""

    id: str
    case_id: str
    question_text: str
    description: str = ""


@dataclass(frozen=True)
class Diagnosis:
    """A conclusion plus the advice given alongside it."""

    id: str
    case_id: str
    conclusion_text: str
    advice_text: str = ""


@dataclass(frozen=True)
class Decision:
    """Answer target that continues identification at another question."""

    symptom_id: str


@dataclass(frozen=True)
class Leaf:
    """Answer target that ends the consultation at a diagnosis."""

    diagnosis_id: str


# Exactly one of the two variants; Leaf corresponds to the stored
# "is answer leaf" flag being true.
AnswerTarget = Decision | Leaf


@dataclass(frozen=True)
class RuleRow:
    """One answer edge of the tree.

    ``question`` is the symptom this answer belongs to; ``is_first_question``
    marks the answer rows of the root question; ``order_index`` fixes the
    display order among sibling answers.
    """

    id: str
    case_id: str
    question: str
    is_first_question: bool
    answer_label: str
    target: AnswerTarget
    order_index: int


# Validation defect kinds. Errors block graph construction; warnings are
# authoring hints.
NO_ROOT = "NO_ROOT"
MULTIPLE_ROOT_QUESTIONS = "MULTIPLE_ROOT_QUESTIONS"
DANGLING_SYMPTOM = "DANGLING_SYMPTOM"
DANGLING_DIAGNOSIS = "DANGLING_DIAGNOSIS"
CYCLE = "CYCLE"
EMPTY_ANSWER_SET = "EMPTY_ANSWER_SET"
DUPLICATE_ANSWER_LABEL = "DUPLICATE_ANSWER_LABEL"
DUPLICATE_ORDER_INDEX = "DUPLICATE_ORDER_INDEX"

UNREACHABLE_QUESTION = "UNREACHABLE_QUESTION"
UNUSED_DIAGNOSIS = "UNUSED_DIAGNOSIS"
CONVERGENT_EDGE = "CONVERGENT_EDGE"

ERROR_KINDS = frozenset(
    {
        NO_ROOT,
        MULTIPLE_ROOT_QUESTIONS,
        DANGLING_SYMPTOM,
        DANGLING_DIAGNOSIS,
        CYCLE,
        EMPTY_ANSWER_SET,
        DUPLICATE_ANSWER_LABEL,
        DUPLICATE_ORDER_INDEX,
    }
)

WARNING_KINDS = frozenset({UNREACHABLE_QUESTION, UNUSED_DIAGNOSIS, CONVERGENT_EDGE})


@dataclass(frozen=True)
class Defect:
    """One validation finding, located at the entity that carries it."""

    kind: str
    location: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[Defect, ...] = ()
    warnings: tuple[Defect, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors

    def error_kinds(self) -> set[str]:
        return {d.kind for d in self.errors}

    def warning_kinds(self) -> set[str]:
        return {d.kind for d in self.warnings}


@dataclass(frozen=True)
class KnowledgeGraph:
    """Validated, indexed view of one case's rules.

    ``adjacency`` maps every question that has answers to its answer rows in
    ``order_index`` order. Construction goes through
    :func:`kbconsult.graph.build_graph`, which guarantees a unique root, no
    dangling references, nonempty answer sets for every reachable question,
    and acyclicity. Instances are immutable; share them freely across
    threads.
    """

    case: Case
    root: str
    adjacency: dict[str, tuple[RuleRow, ...]]
    symptoms: dict[str, Symptom]
    diagnoses: dict[str, Diagnosis]
