"""The bundled dengue fever example knowledge base.

Covers the commonly recognized signs (fever, rash, nausea, joint pain,
bleeding, weak pulse, loss of consciousness) and concludes in the three WHO
severity classes. The tree shape itself is illustrative authoring material,
not clinical guidance; the case description says so in the shipped bundle.
"""

from __future__ import annotations

from .bundle import KnowledgeBundle, canonicalize
from .model import Case, Decision, Diagnosis, Leaf, RuleRow, Symptom

CASE_ID = "dengue"


def dengue_bundle() -> KnowledgeBundle:
    case = Case(
        id=CASE_ID,
        name="Dengue fever consultation",
        description=(
            "Example knowledge base for dengue severity consultation. "
            "Illustrative tree for demonstration and testing only; not medical advice."
        ),
    )
    symptoms = [
        Symptom(
            id="q-fever",
            case_id=CASE_ID,
            question_text="Has the patient had a sudden high fever lasting 2 to 7 days?",
            description="Dengue typically starts with an abrupt fever episode.",
        ),
        Symptom(
            id="q-classic",
            case_id=CASE_ID,
            question_text=(
                "Are classic signs present, such as skin rash, nausea or vomiting, "
                "or joint pain and muscle aches?"
            ),
            description="",
        ),
        Symptom(
            id="q-warning",
            case_id=CASE_ID,
            question_text=(
                "Are there warning signs, such as bleeding from gums or nose, "
                "persistent vomiting, or severe abdominal pain?"
            ),
            description="",
        ),
        Symptom(
            id="q-severe",
            case_id=CASE_ID,
            question_text=(
                "Are there severity signs, such as a weak rapid pulse, cold clammy skin, "
                "or loss of consciousness?"
            ),
            description="",
        ),
    ]
    diagnoses = [
        Diagnosis(
            id="d-without",
            case_id=CASE_ID,
            conclusion_text="Dengue without warning signs",
            advice_text=(
                "Rest, fluids, and fever control; monitor for warning signs and "
                "seek care if they appear."
            ),
        ),
        Diagnosis(
            id="d-warning",
            case_id=CASE_ID,
            conclusion_text="Dengue with warning signs",
            advice_text="Seek hospital assessment promptly; close observation is required.",
        ),
        Diagnosis(
            id="d-severe",
            case_id=CASE_ID,
            conclusion_text="Severe dengue",
            advice_text="Emergency: go to a hospital immediately.",
        ),
    ]
    rules = [
        RuleRow("r-fever-yes", CASE_ID, "q-fever", True, "Yes", Decision("q-classic"), 0),
        RuleRow("r-fever-no", CASE_ID, "q-fever", True, "No", Leaf("d-without"), 1),
        RuleRow("r-classic-yes", CASE_ID, "q-classic", False, "Yes", Decision("q-warning"), 0),
        RuleRow("r-classic-no", CASE_ID, "q-classic", False, "No", Leaf("d-without"), 1),
        RuleRow("r-warning-yes", CASE_ID, "q-warning", False, "Yes", Decision("q-severe"), 0),
        RuleRow("r-warning-no", CASE_ID, "q-warning", False, "No", Leaf("d-without"), 1),
        RuleRow("r-severe-yes", CASE_ID, "q-severe", False, "Yes", Leaf("d-severe"), 0),
        RuleRow("r-severe-no", CASE_ID, "q-severe", False, "No", Leaf("d-warning"), 1),
    ]
    return canonicalize(
        KnowledgeBundle(
            cases=(case,),
            symptoms=tuple(symptoms),
            diagnoses=tuple(diagnoses),
            rules=tuple(rules),
        )
    )
