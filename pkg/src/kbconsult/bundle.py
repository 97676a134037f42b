"""Portable knowledge-base bundles (``.kb.json``).

A bundle is a single UTF-8 JSON document with top-level keys
``format_version, cases, symptoms, diagnoses, rules``; record fields mirror
the domain types field-for-field. The canonical form sorts every array by
id and object keys alphabetically, so export-after-import is byte-stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .model import Case, Decision, Diagnosis, Leaf, RuleRow, Symptom

BUNDLE_FORMAT_VERSION = 1

_TOP_LEVEL_KEYS = ("format_version", "cases", "symptoms", "diagnoses", "rules")


class BundleParseError(ValueError):
    """The document is not a well-formed bundle; ``locator`` names the spot."""

    def __init__(self, locator: str, problem: str):
        super().__init__(f"{locator}: {problem}")
        self.locator = locator
        self.problem = problem


class UnsupportedVersionError(ValueError):
    def __init__(self, found: Any):
        super().__init__(f"unsupported bundle format_version {found!r} (expected {BUNDLE_FORMAT_VERSION})")
        self.found = found


@dataclass(frozen=True)
class KnowledgeBundle:
    cases: tuple[Case, ...] = ()
    symptoms: tuple[Symptom, ...] = ()
    diagnoses: tuple[Diagnosis, ...] = ()
    rules: tuple[RuleRow, ...] = ()
    format_version: int = BUNDLE_FORMAT_VERSION


def parse_bundle(text: str | bytes) -> KnowledgeBundle:
    """Parse and strictly check a bundle document.

    Raises :class:`BundleParseError` naming the offending field (or the
    line/column for JSON syntax errors) and :class:`UnsupportedVersionError`
    for any format_version other than 1.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise BundleParseError("document", f"not valid UTF-8: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BundleParseError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from exc

    if not isinstance(doc, dict):
        raise BundleParseError("document", "expected a JSON object at top level")
    for key in _TOP_LEVEL_KEYS:
        if key not in doc:
            raise BundleParseError(key, "missing required key")
    for key in doc:
        if key not in _TOP_LEVEL_KEYS:
            raise BundleParseError(key, "unexpected key")

    version = doc["format_version"]
    if not _is_int(version):
        raise BundleParseError("format_version", "expected an integer")
    if version != BUNDLE_FORMAT_VERSION:
        raise UnsupportedVersionError(version)

    cases = _parse_array(doc, "cases", _parse_case)
    symptoms = _parse_array(doc, "symptoms", _parse_symptom)
    diagnoses = _parse_array(doc, "diagnoses", _parse_diagnosis)
    rules = _parse_array(doc, "rules", _parse_rule)
    return KnowledgeBundle(
        cases=tuple(cases),
        symptoms=tuple(symptoms),
        diagnoses=tuple(diagnoses),
        rules=tuple(rules),
    )


def canonicalize(bundle: KnowledgeBundle) -> KnowledgeBundle:
    """The same bundle with every entity array sorted by id."""
    by_id = lambda e: e.id
    return KnowledgeBundle(
        cases=tuple(sorted(bundle.cases, key=by_id)),
        symptoms=tuple(sorted(bundle.symptoms, key=by_id)),
        diagnoses=tuple(sorted(bundle.diagnoses, key=by_id)),
        rules=tuple(sorted(bundle.rules, key=by_id)),
        format_version=bundle.format_version,
    )


def bundle_to_dict(bundle: KnowledgeBundle) -> dict[str, Any]:
    canonical = canonicalize(bundle)
    return {
        "format_version": canonical.format_version,
        "cases": [case_record(c) for c in canonical.cases],
        "symptoms": [symptom_record(s) for s in canonical.symptoms],
        "diagnoses": [diagnosis_record(d) for d in canonical.diagnoses],
        "rules": [rule_record(r) for r in canonical.rules],
    }


def dump_bundle(bundle: KnowledgeBundle) -> str:
    """Canonical serialization: arrays sorted by id, keys alphabetical."""
    return json.dumps(bundle_to_dict(bundle), ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def case_record(c: Case) -> dict[str, Any]:
    return {"id": c.id, "name": c.name, "description": c.description}


def symptom_record(s: Symptom) -> dict[str, Any]:
    return {"id": s.id, "case_id": s.case_id, "question_text": s.question_text, "description": s.description}


def diagnosis_record(d: Diagnosis) -> dict[str, Any]:
    return {
        "id": d.id,
        "case_id": d.case_id,
        "conclusion_text": d.conclusion_text,
        "advice_text": d.advice_text,
    }


def rule_record(r: RuleRow) -> dict[str, Any]:
    if isinstance(r.target, Leaf):
        target = {"kind": "leaf", "id": r.target.diagnosis_id}
    else:
        target = {"kind": "decision", "id": r.target.symptom_id}
    return {
        "id": r.id,
        "case_id": r.case_id,
        "question": r.question,
        "is_first_question": r.is_first_question,
        "answer_label": r.answer_label,
        "target": target,
        "order_index": r.order_index,
    }


_RECORD_PARSERS = {}


def parse_entity_record(kind: str, obj: Any, locator: str = "record"):
    """Parse one entity record of the given kind ('case', 'symptom', ...)."""
    try:
        parser = _RECORD_PARSERS[kind]
    except KeyError:
        raise ValueError(f"unknown entity kind {kind!r}") from None
    return parser(obj, locator)


def entity_record(entity) -> dict[str, Any]:
    """Serialize any domain entity to its bundle record."""
    if isinstance(entity, Case):
        return case_record(entity)
    if isinstance(entity, Symptom):
        return symptom_record(entity)
    if isinstance(entity, Diagnosis):
        return diagnosis_record(entity)
    if isinstance(entity, RuleRow):
        return rule_record(entity)
    raise TypeError(f"cannot serialize {type(entity).__name__}")


def _parse_array(doc: dict, key: str, parse_one) -> list:
    value = doc[key]
    if not isinstance(value, list):
        raise BundleParseError(key, "expected an array")
    out = []
    seen_ids: set[str] = set()
    for i, obj in enumerate(value):
        entity = parse_one(obj, f"{key}[{i}]")
        if entity.id in seen_ids:
            raise BundleParseError(f"{key}[{i}].id", f"duplicate id {entity.id!r}")
        seen_ids.add(entity.id)
        out.append(entity)
    return out


def _parse_case(obj: Any, locator: str) -> Case:
    fields = _fields(obj, locator, required=("id", "name"), optional=("description",))
    return Case(
        id=_str(fields, "id", locator),
        name=_str(fields, "name", locator),
        description=_str(fields, "description", locator, default=""),
    )


def _parse_symptom(obj: Any, locator: str) -> Symptom:
    fields = _fields(obj, locator, required=("id", "case_id", "question_text"), optional=("description",))
    return Symptom(
        id=_str(fields, "id", locator),
        case_id=_str(fields, "case_id", locator),
        question_text=_str(fields, "question_text", locator),
        description=_str(fields, "description", locator, default=""),
    )


def _parse_diagnosis(obj: Any, locator: str) -> Diagnosis:
    fields = _fields(obj, locator, required=("id", "case_id", "conclusion_text"), optional=("advice_text",))
    return Diagnosis(
        id=_str(fields, "id", locator),
        case_id=_str(fields, "case_id", locator),
        conclusion_text=_str(fields, "conclusion_text", locator),
        advice_text=_str(fields, "advice_text", locator, default=""),
    )


def _parse_rule(obj: Any, locator: str) -> RuleRow:
    fields = _fields(
        obj,
        locator,
        required=("id", "case_id", "question", "is_first_question", "answer_label", "target", "order_index"),
        optional=(),
    )
    first = fields["is_first_question"]
    if not isinstance(first, bool):
        raise BundleParseError(f"{locator}.is_first_question", "expected a boolean")
    order = fields["order_index"]
    if not _is_int(order) or order < 0:
        raise BundleParseError(f"{locator}.order_index", "expected a non-negative integer")
    target = fields["target"]
    if not isinstance(target, dict):
        raise BundleParseError(f"{locator}.target", "expected an object")
    if set(target) != {"kind", "id"}:
        raise BundleParseError(f"{locator}.target", 'expected exactly the fields "kind" and "id"')
    if not isinstance(target["id"], str):
        raise BundleParseError(f"{locator}.target.id", "expected a string")
    if target["kind"] == "decision":
        parsed_target: Decision | Leaf = Decision(target["id"])
    elif target["kind"] == "leaf":
        parsed_target = Leaf(target["id"])
    else:
        raise BundleParseError(f"{locator}.target.kind", 'expected "decision" or "leaf"')
    return RuleRow(
        id=_str(fields, "id", locator),
        case_id=_str(fields, "case_id", locator),
        question=_str(fields, "question", locator),
        is_first_question=first,
        answer_label=_str(fields, "answer_label", locator),
        target=parsed_target,
        order_index=order,
    )


def _fields(obj: Any, locator: str, required: tuple[str, ...], optional: tuple[str, ...]) -> dict:
    if not isinstance(obj, dict):
        raise BundleParseError(locator, "expected an object")
    allowed = set(required) | set(optional)
    for key in obj:
        if key not in allowed:
            raise BundleParseError(f"{locator}.{key}", "unexpected field")
    for key in required:
        if key not in obj:
            raise BundleParseError(f"{locator}.{key}", "missing required field")
    return dict(obj)


_RECORD_PARSERS.update(
    {"case": _parse_case, "symptom": _parse_symptom, "diagnosis": _parse_diagnosis, "rule": _parse_rule}
)


def _str(fields: dict, name: str, locator: str, default: str | None = None) -> str:
    if name not in fields and default is not None:
        return default
    value = fields[name]
    if not isinstance(value, str):
        raise BundleParseError(f"{locator}.{name}", "expected a string")
    return value


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)
