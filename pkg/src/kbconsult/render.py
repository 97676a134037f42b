"""Consultation pages in two markup dialects from one view.

The same question or conclusion view renders as responsive HTML (viewport
meta, radio options, Continue submit) or as a WML 1.1 deck (one card, one
anchor per answer). Both outputs carry the identical question text and the
identical answer labels in the identical order; only the markup differs.
"""

from __future__ import annotations

import html as _html
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from string import Template
from xml.sax.saxutils import escape as _xml_escape

from .engine import ConclusionView, QuestionView
from .model import Case

MEDIA_TYPE_HTML = "text/html; charset=utf-8"
MEDIA_TYPE_WML = "text/vnd.wap.wml"

RULE_ID_PLACEHOLDER = "{rule_id}"


class Format(Enum):
    HTML = "html"
    WML = "wml"


class EmptyAnswersError(ValueError):
    """A question page without answers cannot be rendered."""


class UnrecognizedOverrideError(ValueError):
    def __init__(self, value: str):
        super().__init__(f"unrecognized format override {value!r} (expected 'html' or 'wml')")
        self.value = value


@dataclass(frozen=True)
class PageDocument:
    media_type: str
    body: bytes


def negotiate_format(
    accept_header: str, user_agent: str = "", explicit_override: str | None = None
) -> Format:
    """Pick the markup dialect for a request.

    First match wins: an explicit override beats everything, then a WML
    media type in the Accept header, then HTML. The user agent string is
    accepted for signature compatibility but never consulted; WAP gateways
    announce themselves reliably through Accept, not User-Agent.
    """
    if explicit_override is not None:
        normalized = explicit_override.strip().lower()
        if normalized == "wml":
            return Format.WML
        if normalized == "html":
            return Format.HTML
        raise UnrecognizedOverrideError(explicit_override)
    if accept_header and MEDIA_TYPE_WML in accept_header:
        return Format.WML
    return Format.HTML


def render_question(
    view: QuestionView, fmt: Format, link_base: str, *, title: str = "Consultation"
) -> PageDocument:
    """One identification page.

    ``link_base`` is the answer URL template and must contain the literal
    ``{rule_id}`` placeholder (for HTML it must end with ``/{rule_id}``: the
    form submits the chosen rule as the ``rule`` query parameter against the
    stripped base, which the server resolves to the same answer URL).
    """
    if not view.answers:
        raise EmptyAnswersError("question view has no answers")
    if RULE_ID_PLACEHOLDER not in link_base:
        raise ValueError(f"link_base must contain {RULE_ID_PLACEHOLDER!r}: {link_base!r}")

    if fmt is Format.HTML:
        suffix = "/" + RULE_ID_PLACEHOLDER
        if not link_base.endswith(suffix):
            raise ValueError(f"link_base must end with {suffix!r} for HTML rendering: {link_base!r}")
        items = "\n".join(
            f'<li><label><input type="radio" name="rule" value="{_h(rule_id)}" required> '
            f"{_h(label)}</label></li>"
            for rule_id, label in view.answers
        )
        body = _template("question.html.tmpl").substitute(
            title=_h(title),
            step_number=view.step_number,
            form_action=_h(link_base[: -len(suffix)]),
            question_text=_h(view.question_text),
            description_block=_html_description(view.description),
            answer_items=items,
        )
        return PageDocument(MEDIA_TYPE_HTML, body.encode("utf-8"))

    anchors = "\n".join(
        f'<p><a href="{_wa(link_base.replace(RULE_ID_PLACEHOLDER, rule_id))}">{_w(label)}</a></p>'
        for rule_id, label in view.answers
    )
    body = _template("question.wml.tmpl").substitute(
        title=_wa(title),
        step_number=view.step_number,
        question_text=_w(view.question_text),
        description_block=_wml_description(view.description),
        answer_anchors=anchors,
    )
    return PageDocument(MEDIA_TYPE_WML, body.encode("utf-8"))


def render_conclusion(
    view: ConclusionView, fmt: Format, restart_link: str, *, title: str = "Consultation"
) -> PageDocument:
    """The diagnosis page: conclusion, advice (when any), transcript, restart."""
    if fmt is Format.HTML:
        advice = view.advice_text.strip()
        advice_block = f'\n<p class="advice">{_h(advice)}</p>' if advice else ""
        items = "\n".join(
            f"<li>{_h(question)}: {_h(answer)}</li>" for question, answer in view.transcript
        )
        body = _template("conclusion.html.tmpl").substitute(
            title=_h(title),
            conclusion_text=_h(view.conclusion_text),
            advice_block=advice_block,
            transcript_items=items,
            restart_link=_h(restart_link),
        )
        return PageDocument(MEDIA_TYPE_HTML, body.encode("utf-8"))

    advice = view.advice_text.strip()
    advice_block = f"\n<p>{_w(advice)}</p>" if advice else ""
    lines = "\n".join(
        f"<p>{i}. {_w(question)}: {_w(answer)}</p>"
        for i, (question, answer) in enumerate(view.transcript, start=1)
    )
    body = _template("conclusion.wml.tmpl").substitute(
        title=_wa(title),
        conclusion_text=_w(view.conclusion_text),
        advice_block=advice_block,
        transcript_lines=lines,
        restart_link=_wa(restart_link),
    )
    return PageDocument(MEDIA_TYPE_WML, body.encode("utf-8"))


def render_case_list(
    cases: list[Case], fmt: Format, start_link_base: str, *, title: str = "Consultations"
) -> PageDocument:
    """Landing page listing every case with a link that starts a session.

    ``start_link_base`` must contain the literal ``{case_id}`` placeholder.
    """
    if "{case_id}" not in start_link_base:
        raise ValueError(f"start_link_base must contain '{{case_id}}': {start_link_base!r}")
    if fmt is Format.HTML:
        if cases:
            items = "\n".join(
                f'<li><a href="{_h(start_link_base.replace("{case_id}", c.id))}">{_h(c.name)}</a>'
                + (f" <small>{_h(c.description)}</small>" if c.description.strip() else "")
                + "</li>"
                for c in cases
            )
            listing = f'<ul class="cases">\n{items}\n</ul>'
        else:
            listing = "<p>No cases are defined yet.</p>"
        body = (
            "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
            '<meta name="viewport" content="width=device-width, initial-scale=1">\n'
            f"<title>{_h(title)}</title>\n</head>\n<body>\n<h1>{_h(title)}</h1>\n{listing}\n"
            "</body>\n</html>\n"
        )
        return PageDocument(MEDIA_TYPE_HTML, body.encode("utf-8"))

    if cases:
        anchors = "\n".join(
            f'<p><a href="{_wa(start_link_base.replace("{case_id}", c.id))}">{_w(c.name)}</a></p>'
            for c in cases
        )
    else:
        anchors = "<p>No cases are defined yet.</p>"
    body = (
        '<?xml version="1.0" encoding="utf-8"?>\n'
        '<!DOCTYPE wml PUBLIC "-//WAPFORUM//DTD WML 1.1//EN" "http://www.wapforum.org/DTD/wml_1.1.xml">\n'
        f'<wml>\n<card id="home" title="{_wa(title)}">\n{anchors}\n</card>\n</wml>\n'
    )
    return PageDocument(MEDIA_TYPE_WML, body.encode("utf-8"))


def render_notice(
    message: str, fmt: Format, link: str, link_label: str, *, title: str = "Consultation", heading: str = "Notice"
) -> PageDocument:
    """Small interstitial page (errors, restart prompts) in either dialect."""
    if fmt is Format.HTML:
        body = (
            "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
            '<meta name="viewport" content="width=device-width, initial-scale=1">\n'
            f"<title>{_h(title)}</title>\n</head>\n<body>\n<h1>{_h(heading)}</h1>\n"
            f"<p>{_h(message)}</p>\n<p><a href=\"{_h(link)}\">{_h(link_label)}</a></p>\n</body>\n</html>\n"
        )
        return PageDocument(MEDIA_TYPE_HTML, body.encode("utf-8"))
    body = (
        '<?xml version="1.0" encoding="utf-8"?>\n'
        '<!DOCTYPE wml PUBLIC "-//WAPFORUM//DTD WML 1.1//EN" "http://www.wapforum.org/DTD/wml_1.1.xml">\n'
        f'<wml>\n<card id="notice" title="{_wa(title)}">\n<p>{_w(message)}</p>\n'
        f'<p><a href="{_wa(link)}">{_w(link_label)}</a></p>\n</card>\n</wml>\n'
    )
    return PageDocument(MEDIA_TYPE_WML, body.encode("utf-8"))


def _h(text: object) -> str:
    return _html.escape(str(text), quote=True)


def _w(text: object) -> str:
    # WML treats $ as variable syntax; a literal dollar is doubled.
    return _xml_escape(str(text)).replace("$", "$$")


def _wa(text: object) -> str:
    return _xml_escape(str(text), {'"': "&quot;"}).replace("$", "$$")


def _html_description(description: str) -> str:
    description = description.strip()
    return f'\n<p class="description">{_h(description)}</p>' if description else ""


def _wml_description(description: str) -> str:
    description = description.strip()
    return f"\n<p>{_w(description)}</p>" if description else ""


_template_cache: dict[str, Template] = {}


def _template(name: str) -> Template:
    if name not in _template_cache:
        text = resources.files(__package__).joinpath("templates", name).read_text("utf-8")
        _template_cache[name] = Template(text)
    return _template_cache[name]
