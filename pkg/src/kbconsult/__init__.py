"""Decision-tree expert system toolkit.

Knowledge lives as four relational entity kinds (cases, symptoms,
diagnoses, rules); consultations walk the validated question graph one
answer at a time; every page renders as responsive HTML or as a WML deck
from the same knowledge base.
"""

from .bundle import (
    BundleParseError,
    KnowledgeBundle,
    UnsupportedVersionError,
    canonicalize,
    dump_bundle,
    parse_bundle,
)
from .engine import (
    AtQuestion,
    AtRootError,
    Concluded,
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
    transcript,
)
from .graph import (
    UnknownQuestionError,
    ValidationError,
    answers_of,
    build_graph,
    enumerate_paths,
    root_question,
    validate,
)
from .model import (
    Case,
    Decision,
    Defect,
    Diagnosis,
    KnowledgeGraph,
    Leaf,
    RuleRow,
    Symptom,
    ValidationReport,
)
from .render import (
    EmptyAnswersError,
    Format,
    PageDocument,
    UnrecognizedOverrideError,
    negotiate_format,
    render_conclusion,
    render_question,
)
from .store import (
    ImportReport,
    KBSnapshot,
    KnowledgeStore,
    MalformedIdError,
    NotFoundError,
    StillReferencedError,
    StorageUnavailableError,
)

__version__ = "0.1.0"

__all__ = [
    "AtQuestion",
    "AtRootError",
    "BundleParseError",
    "Case",
    "Concluded",
    "ConclusionView",
    "Decision",
    "Defect",
    "Diagnosis",
    "EmptyAnswersError",
    "Format",
    "ImportReport",
    "KBSnapshot",
    "KnowledgeBundle",
    "KnowledgeGraph",
    "KnowledgeStore",
    "Leaf",
    "MalformedIdError",
    "NotFoundError",
    "PageDocument",
    "QuestionView",
    "RuleRow",
    "Session",
    "SessionConcludedError",
    "StillReferencedError",
    "StorageUnavailableError",
    "Symptom",
    "UnknownAnswerError",
    "UnknownQuestionError",
    "UnrecognizedOverrideError",
    "UnsupportedVersionError",
    "ValidationError",
    "ValidationReport",
    "VersionMismatchError",
    "answers_of",
    "build_graph",
    "canonicalize",
    "current_view",
    "dump_bundle",
    "enumerate_paths",
    "negotiate_format",
    "parse_bundle",
    "render_conclusion",
    "render_question",
    "root_question",
    "start_session",
    "step_back",
    "submit_answer",
    "transcript",
    "validate",
]
