"""Graph construction, structural validation, and path enumeration.

The rules table is only a bag of answer edges; everything that makes it a
usable decision tree (single root, no dangling references, acyclicity,
nonempty answer sets) is checked here. :func:`validate` reports every defect
it can find, not just the first; :func:`build_graph` refuses to construct a
graph while any error-grade defect exists.
"""

from __future__ import annotations

from .model import (
    CONVERGENT_EDGE,
    CYCLE,
    DANGLING_DIAGNOSIS,
    DANGLING_SYMPTOM,
    DUPLICATE_ANSWER_LABEL,
    DUPLICATE_ORDER_INDEX,
    EMPTY_ANSWER_SET,
    MULTIPLE_ROOT_QUESTIONS,
    NO_ROOT,
    UNREACHABLE_QUESTION,
    UNUSED_DIAGNOSIS,
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


class ValidationError(ValueError):
    """Raised by build_graph when the inputs have error-grade defects."""

    def __init__(self, report: ValidationReport):
        kinds = sorted(report.error_kinds())
        super().__init__(f"knowledge base has {len(report.errors)} error(s): {', '.join(kinds)}")
        self.report = report


class UnknownQuestionError(KeyError):
    """The requested question has no answer set in this graph."""

    def __init__(self, question_id: str):
        super().__init__(question_id)
        self.question_id = question_id


def validate(
    case: Case,
    symptoms: list[Symptom],
    diagnoses: list[Diagnosis],
    rows: list[RuleRow],
) -> ValidationReport:
    """Check one case's entities for structural defects.

    Entities belonging to other cases are ignored, so callers may pass a
    whole-store snapshot. Aggregate defects (unreachable questions, unused
    diagnoses, empty answer sets) are reported in id order; per-row defects
    follow sibling (order_index, id) order, so the report does not depend on
    storage order.
    """
    symptom_by_id = {s.id: s for s in symptoms if s.case_id == case.id}
    diagnosis_by_id = {d.id: d for d in diagnoses if d.case_id == case.id}
    case_rows = [r for r in rows if r.case_id == case.id]

    errors: list[Defect] = []
    warnings: list[Defect] = []

    by_question: dict[str, list[RuleRow]] = {}
    for row in case_rows:
        by_question.setdefault(row.question, []).append(row)
    for siblings in by_question.values():
        siblings.sort(key=lambda r: (r.order_index, r.id))

    # Root: the flag must sit on the answer rows of exactly one question.
    root_questions = sorted({r.question for r in case_rows if r.is_first_question})
    if not root_questions:
        errors.append(Defect(NO_ROOT, case.id, "no rule row is flagged as first question"))
    elif len(root_questions) > 1:
        errors.append(
            Defect(
                MULTIPLE_ROOT_QUESTIONS,
                case.id,
                "first-question flag set on multiple questions: " + ", ".join(root_questions),
            )
        )

    # Dangling references, row by row.
    for question_id in sorted(by_question):
        for row in by_question[question_id]:
            if row.question not in symptom_by_id:
                errors.append(
                    Defect(
                        DANGLING_SYMPTOM,
                        row.id,
                        f"rule {row.id} belongs to unknown question {row.question}",
                    )
                )
            if isinstance(row.target, Decision) and row.target.symptom_id not in symptom_by_id:
                errors.append(
                    Defect(
                        DANGLING_SYMPTOM,
                        row.id,
                        f"rule {row.id} points to unknown question {row.target.symptom_id}",
                    )
                )
            if isinstance(row.target, Leaf) and row.target.diagnosis_id not in diagnosis_by_id:
                errors.append(
                    Defect(
                        DANGLING_DIAGNOSIS,
                        row.id,
                        f"rule {row.id} points to unknown diagnosis {row.target.diagnosis_id}",
                    )
                )

    # Duplicate labels / order indexes among siblings. Labels compare
    # trimmed and case-sensitive.
    for question_id in sorted(by_question):
        seen_labels: dict[str, str] = {}
        seen_orders: dict[int, str] = {}
        for row in by_question[question_id]:
            label = row.answer_label.strip()
            if label in seen_labels:
                errors.append(
                    Defect(
                        DUPLICATE_ANSWER_LABEL,
                        row.id,
                        f"question {question_id} has two answers labelled {label!r} "
                        f"(rules {seen_labels[label]} and {row.id})",
                    )
                )
            else:
                seen_labels[label] = row.id
            if row.order_index in seen_orders:
                errors.append(
                    Defect(
                        DUPLICATE_ORDER_INDEX,
                        row.id,
                        f"question {question_id} has two answers at order_index {row.order_index} "
                        f"(rules {seen_orders[row.order_index]} and {row.id})",
                    )
                )
            else:
                seen_orders[row.order_index] = row.id

    # A question that some answer points at must itself have answers.
    decision_targets: set[str] = set()
    parents: dict[str, set[str]] = {}
    for row in case_rows:
        if isinstance(row.target, Decision):
            target = row.target.symptom_id
            decision_targets.add(target)
            parents.setdefault(target, set()).add(row.question)
    for target in sorted(decision_targets):
        if target in symptom_by_id and target not in by_question:
            errors.append(
                Defect(EMPTY_ANSWER_SET, target, f"question {target} is answered onto but has no answers")
            )

    # Cycles over the question graph are fatal; acyclic convergence is a
    # warning (shared subtrees are tolerated).
    edges = {
        question_id: [
            row.target.symptom_id
            for row in by_question[question_id]
            if isinstance(row.target, Decision) and row.target.symptom_id in by_question
        ]
        for question_id in by_question
    }
    for cycle in _find_cycles(edges):
        errors.append(Defect(CYCLE, cycle[0], "question cycle: " + " -> ".join(cycle)))

    for target in sorted(parents):
        sources = parents[target]
        if len(sources) > 1 and target in symptom_by_id:
            warnings.append(
                Defect(
                    CONVERGENT_EDGE,
                    target,
                    f"question {target} is reached from multiple questions: " + ", ".join(sorted(sources)),
                )
            )

    root_set = set(root_questions)
    for symptom_id in sorted(symptom_by_id):
        if symptom_id not in decision_targets and symptom_id not in root_set:
            warnings.append(
                Defect(
                    UNREACHABLE_QUESTION,
                    symptom_id,
                    f"question {symptom_id} is neither the root nor the target of any answer",
                )
            )

    used_diagnoses = {
        row.target.diagnosis_id for row in case_rows if isinstance(row.target, Leaf)
    }
    for diagnosis_id in sorted(diagnosis_by_id):
        if diagnosis_id not in used_diagnoses:
            warnings.append(
                Defect(UNUSED_DIAGNOSIS, diagnosis_id, f"no answer concludes at diagnosis {diagnosis_id}")
            )

    return ValidationReport(errors=tuple(errors), warnings=tuple(warnings))


def _find_cycles(edges: dict[str, list[str]]) -> list[list[str]]:
    """Distinct cycles in a directed graph, each as a closed node path.

    Iterative colored DFS; a cycle is reported once no matter how many
    back edges rediscover it.
    """
    WHITE, GRAY, BLACK = 0, 1, 2
    color = dict.fromkeys(edges, WHITE)
    cycles: list[list[str]] = []
    seen: set[frozenset[str]] = set()

    for start in sorted(edges):
        if color[start] != WHITE:
            continue
        color[start] = GRAY
        path = [start]
        stack = [(start, iter(edges[start]))]
        while stack:
            node, successors = stack[-1]
            advanced = False
            for nxt in successors:
                if nxt not in color:
                    continue
                if color[nxt] == GRAY:
                    cycle = path[path.index(nxt):] + [nxt]
                    key = frozenset(cycle)
                    if key not in seen:
                        seen.add(key)
                        cycles.append(cycle)
                elif color[nxt] == WHITE:
                    color[nxt] = GRAY
                    path.append(nxt)
                    stack.append((nxt, iter(edges[nxt])))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                path.pop()
                color[node] = BLACK
    return cycles


def build_graph(
    case: Case,
    symptoms: list[Symptom],
    diagnoses: list[Diagnosis],
    rows: list[RuleRow],
) -> KnowledgeGraph:
    """Validate and index one case's rules.

    Raises :class:`ValidationError` carrying the full report when any
    error-grade defect exists; the report explains every violated invariant,
    not just the first.
    """
    report = validate(case, symptoms, diagnoses, rows)
    if report.errors:
        raise ValidationError(report)

    case_rows = [r for r in rows if r.case_id == case.id]
    adjacency: dict[str, list[RuleRow]] = {}
    for row in case_rows:
        adjacency.setdefault(row.question, []).append(row)
    root = next(r.question for r in case_rows if r.is_first_question)
    return KnowledgeGraph(
        case=case,
        root=root,
        adjacency={
            question: tuple(sorted(siblings, key=lambda r: r.order_index))
            for question, siblings in adjacency.items()
        },
        symptoms={s.id: s for s in symptoms if s.case_id == case.id},
        diagnoses={d.id: d for d in diagnoses if d.case_id == case.id},
    )


def root_question(graph: KnowledgeGraph) -> str:
    """The question every consultation starts at."""
    return graph.root


def answers_of(graph: KnowledgeGraph, question_id: str) -> tuple[RuleRow, ...]:
    """The question's answer rows in display order."""
    try:
        return graph.adjacency[question_id]
    except KeyError:
        raise UnknownQuestionError(question_id) from None


def enumerate_paths(graph: KnowledgeGraph) -> list[tuple[tuple[str, ...], str]]:
    """Every root-to-leaf walk as (answer labels, diagnosis id).

    Depth-first from the root, siblings in display order; this is the
    brute-force oracle the consultation engine is checked against.
    """
    paths: list[tuple[tuple[str, ...], str]] = []
    stack: list[tuple[str, tuple[str, ...], str]] = [("visit", (), graph.root)]
    while stack:
        op, labels, ref = stack.pop()
        if op == "emit":
            paths.append((labels, ref))
            continue
        for row in reversed(graph.adjacency[ref]):
            walked = labels + (row.answer_label,)
            if isinstance(row.target, Leaf):
                stack.append(("emit", walked, row.target.diagnosis_id))
            else:
                stack.append(("visit", walked, row.target.symptom_id))
    return paths
