"""Shared test machinery: fixtures, random generators, page extractors.

The extraction helpers and the path-count oracles here are deliberately
independent of the package's own traversal code, so they can serve as
referees for it.
"""

from __future__ import annotations

import http.client
import json
import random
import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace
from html.parser import HTMLParser

from kbconsult.bundle import KnowledgeBundle
from kbconsult.graph import build_graph
from kbconsult.model import Case, Decision, Diagnosis, Leaf, RuleRow, Symptom

# ---------------------------------------------------------------------------
# FEVER-MINI: the hand-built two-question fixture used all over the suite.
# ---------------------------------------------------------------------------


@dataclass
class FixtureKB:
    case: Case
    symptoms: list[Symptom]
    diagnoses: list[Diagnosis]
    rows: list[RuleRow]

    def graph(self):
        return build_graph(self.case, self.symptoms, self.diagnoses, self.rows)

    def bundle(self) -> KnowledgeBundle:
        return KnowledgeBundle(
            cases=(self.case,),
            symptoms=tuple(self.symptoms),
            diagnoses=tuple(self.diagnoses),
            rules=tuple(self.rows),
        )

    def row(self, rule_id: str) -> RuleRow:
        return next(r for r in self.rows if r.id == rule_id)

    def with_row(self, rule_id: str, **changes) -> "FixtureKB":
        rows = [replace(r, **changes) if r.id == rule_id else r for r in self.rows]
        return FixtureKB(self.case, list(self.symptoms), list(self.diagnoses), rows)

    def without_rows(self, *rule_ids: str) -> "FixtureKB":
        rows = [r for r in self.rows if r.id not in rule_ids]
        return FixtureKB(self.case, list(self.symptoms), list(self.diagnoses), rows)


def fever_mini() -> FixtureKB:
    case = Case("c1", "dengue-mini")
    symptoms = [
        Symptom("s1", "c1", "Does the patient have fever for 2 or more days?"),
        Symptom("s2", "c1", "Is there bleeding or a weak pulse?"),
    ]
    diagnoses = [
        Diagnosis("d1", "c1", "No dengue indication", "Monitor at home"),
        Diagnosis("d2", "c1", "Dengue with warning signs", "Seek hospital care"),
        Diagnosis("d3", "c1", "Severe dengue", "Emergency care immediately"),
    ]
    rows = [
        RuleRow("r1", "c1", "s1", True, "Yes", Decision("s2"), 0),
        RuleRow("r2", "c1", "s1", True, "No", Leaf("d1"), 1),
        RuleRow("r3", "c1", "s2", False, "Yes", Leaf("d3"), 0),
        RuleRow("r4", "c1", "s2", False, "No", Leaf("d2"), 1),
    ]
    return FixtureKB(case, symptoms, diagnoses, rows)


# Expected FEVER-MINI walks, derived by hand from the four rows above and
# frozen: (answer labels) -> diagnosis id.
FEVER_MINI_PATHS = [
    (("Yes", "Yes"), "d3"),
    (("Yes", "No"), "d2"),
    (("No",), "d1"),
]


# ---------------------------------------------------------------------------
# Random knowledge bases.
# ---------------------------------------------------------------------------

_LABEL_POOL = ["Yes", "No", "Maybe", "Often", "Rarely", "Mild", "Severe", "Unsure"]


def random_tree_kb(
    rng: random.Random,
    max_questions: int = 50,
    branching: tuple[int, int] = (2, 4),
    case_id: str = "rc",
) -> FixtureKB:
    """A random validated tree: every question reachable, every walk ends at a leaf."""
    n_questions = rng.randint(1, max_questions)
    max_out = branching[1]

    # random parent links with bounded out-degree; node 0 is the root
    children: dict[int, list[int]] = {i: [] for i in range(n_questions)}
    for i in range(1, n_questions):
        candidates = [j for j in range(i) if len(children[j]) < max_out]
        parent = rng.choice(candidates)
        children[parent].append(i)

    case = Case(case_id, f"Random case {case_id}")
    symptoms = [
        Symptom(f"q{i}", case_id, f"Question {i}, is condition {i} present?")
        for i in range(n_questions)
    ]
    diagnoses: list[Diagnosis] = []
    rows: list[RuleRow] = []
    for i in range(n_questions):
        kid_targets: list[Decision | Leaf] = [Decision(f"q{k}") for k in children[i]]
        n_answers = max(len(kid_targets), rng.randint(*branching))
        while len(kid_targets) < n_answers:
            d_id = f"d{len(diagnoses)}"
            diagnoses.append(Diagnosis(d_id, case_id, f"Conclusion {d_id}", f"Advice {d_id}"))
            kid_targets.append(Leaf(d_id))
        rng.shuffle(kid_targets)
        labels = rng.sample(_LABEL_POOL, n_answers)
        for order, (target, label) in enumerate(zip(kid_targets, labels)):
            rows.append(
                RuleRow(
                    id=f"r{len(rows)}",
                    case_id=case_id,
                    question=f"q{i}",
                    is_first_question=(i == 0),
                    answer_label=label,
                    target=target,
                    order_index=order,
                )
            )
    return FixtureKB(case, symptoms, diagnoses, rows)


def replay_labels(graph, labels):
    """Drive a consultation by answer labels; returns (session, ConclusionView)."""
    from kbconsult.engine import ConclusionView, start_session, submit_answer

    session, outcome = start_session(graph, kb_version=1)
    for label in labels:
        choice = next(rule_id for rule_id, lab in outcome.answers if lab == label)
        outcome = submit_answer(graph, session, choice)
    assert isinstance(outcome, ConclusionView), f"labels {labels} did not reach a conclusion"
    return session, outcome


def independent_path_count(rows: list[RuleRow], root: str) -> int:
    """Count root-to-leaf walks by plain recursion over the raw rows."""
    by_question: dict[str, list[RuleRow]] = {}
    for row in rows:
        by_question.setdefault(row.question, []).append(row)

    def count(question: str) -> int:
        total = 0
        for row in by_question[question]:
            if isinstance(row.target, Leaf):
                total += 1
            else:
                total += count(row.target.symptom_id)
        return total

    return count(root)


def random_bundle(rng: random.Random, index: int) -> dict:
    """A syntactically valid bundle document with scrambled ordering.

    Referential integrity is intentionally not guaranteed; the store must
    accept half-finished knowledge.
    """
    case_id = f"case{index}"
    n_symptoms = rng.randint(0, 6)
    n_diagnoses = rng.randint(0, 6)
    n_rules = rng.randint(0, 10)
    tricky = ["plain", "uniçødé", 'with "quotes"', "a & b < c", "tab\tchar"]

    cases = [{"id": case_id, "name": rng.choice(tricky), "description": rng.choice(tricky)}]
    symptoms = [
        {
            "id": f"s{index}-{i}",
            "case_id": case_id,
            "question_text": rng.choice(tricky),
            "description": rng.choice(tricky),
        }
        for i in range(n_symptoms)
    ]
    diagnoses = [
        {
            "id": f"d{index}-{i}",
            "case_id": case_id,
            "conclusion_text": rng.choice(tricky),
            "advice_text": rng.choice(tricky),
        }
        for i in range(n_diagnoses)
    ]
    rules = []
    for i in range(n_rules):
        leaf = rng.random() < 0.5
        rules.append(
            {
                "id": f"r{index}-{i}",
                "case_id": case_id,
                "question": f"s{index}-{rng.randint(0, 9)}",
                "is_first_question": rng.random() < 0.2,
                "answer_label": rng.choice(tricky),
                "target": {
                    "kind": "leaf" if leaf else "decision",
                    "id": (f"d{index}-{rng.randint(0, 9)}" if leaf else f"s{index}-{rng.randint(0, 9)}"),
                },
                "order_index": rng.randint(0, 20),
            }
        )
    for group in (cases, symptoms, diagnoses, rules):
        rng.shuffle(group)
    return {
        "format_version": 1,
        "cases": cases,
        "symptoms": symptoms,
        "diagnoses": diagnoses,
        "rules": rules,
    }


# ---------------------------------------------------------------------------
# Rendered-page extraction (independent of the render module's internals).
# ---------------------------------------------------------------------------


class HtmlPageFacts(HTMLParser):
    """Pulls the facts the tests assert on out of an HTML page."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.html_elements = 0
        self.viewport = False
        self.legend = ""
        self.h2 = ""
        self.labels: list[str] = []
        self.radio_values: list[str] = []
        self.form_actions: list[str] = []
        self.submit_buttons = 0
        self.anchors: list[str] = []
        self._capture: list[tuple[str, list[str]]] = []

    def handle_starttag(self, tag, attrs):
        a = dict(attrs)
        if tag == "html":
            self.html_elements += 1
        elif tag == "meta" and a.get("name") == "viewport":
            self.viewport = True
        elif tag == "input" and a.get("type") == "radio":
            self.radio_values.append(a.get("value", ""))
        elif tag == "form":
            self.form_actions.append(a.get("action", ""))
        elif tag == "button" and a.get("type", "submit") == "submit":
            self.submit_buttons += 1
        elif tag == "a":
            self.anchors.append(a.get("href", ""))
        if tag in ("label", "legend", "h2"):
            self._capture.append((tag, []))

    def handle_endtag(self, tag):
        if self._capture and self._capture[-1][0] == tag:
            _tag, parts = self._capture.pop()
            text = "".join(parts).strip()
            if tag == "label":
                self.labels.append(text)
            elif tag == "legend":
                self.legend = text
            elif tag == "h2":
                self.h2 = text

    def handle_data(self, data):
        if self._capture:
            self._capture[-1][1].append(data)


def html_facts(body: bytes) -> HtmlPageFacts:
    parser = HtmlPageFacts()
    parser.feed(body.decode("utf-8"))
    return parser


def parse_wml(body: bytes) -> ET.Element:
    """Parse a WML deck; raises if the body is not well-formed XML."""
    return ET.fromstring(body.decode("utf-8"))


def wml_decode(text: str) -> str:
    # inverse of the renderer's literal-dollar doubling
    return text.replace("$$", "$")


def wml_cards(root: ET.Element) -> list[ET.Element]:
    return root.findall("card")


def wml_question_text(root: ET.Element) -> str:
    card = wml_cards(root)[0]
    first_p = card.find("p")
    return wml_decode("".join(first_p.itertext()).strip())


def wml_anchor_labels(root: ET.Element) -> list[str]:
    card = wml_cards(root)[0]
    return [wml_decode("".join(a.itertext()).strip()) for a in card.iter("a")]


def wml_anchor_hrefs(root: ET.Element) -> list[str]:
    card = wml_cards(root)[0]
    return [wml_decode(a.get("href", "")) for a in card.iter("a")]


# ---------------------------------------------------------------------------
# Tiny HTTP client for service tests.
# ---------------------------------------------------------------------------


@dataclass
class HttpReply:
    status: int
    headers: dict[str, str]
    body: bytes

    def json(self):
        return json.loads(self.body.decode("utf-8"))


def request(
    port: int,
    method: str,
    path: str,
    *,
    headers: dict[str, str] | None = None,
    body: bytes | str | None = None,
    host: str = "127.0.0.1",
) -> HttpReply:
    conn = http.client.HTTPConnection(host, port, timeout=10)
    try:
        if isinstance(body, str):
            body = body.encode("utf-8")
        conn.request(method, path, body=body, headers=headers or {})
        response = conn.getresponse()
        data = response.read()
        return HttpReply(response.status, {k.lower(): v for k, v in response.getheaders()}, data)
    finally:
        conn.close()
