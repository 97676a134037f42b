"""The ``kbc`` operator tool.

Commands: validate a bundle, consult one interactively in the terminal,
dump every root-to-leaf path, seed the dengue example, import/export a
store, and serve HTTP.

Exit status is stable: 0 success, 1 validation errors present, 2 usage or
I/O errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from .bundle import BundleParseError, KnowledgeBundle, UnsupportedVersionError, dump_bundle, parse_bundle
from .dengue import dengue_bundle
from .engine import AtRootError, ConclusionView, start_session, step_back, submit_answer
from .graph import build_graph, enumerate_paths, validate
from .server import DEFAULT_SESSION_HORIZON, KnowledgeService, ServerConfig
from .store import KnowledgeStore, MalformedIdError, NotFoundError, StorageUnavailableError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kbc", description="Decision-tree knowledge base tool (validate, consult, serve)."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a bundle file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("consult", help="interactive terminal consultation")
    p.add_argument("file")
    p.add_argument("case")
    p.set_defaults(func=cmd_consult)

    p = sub.add_parser("paths", help="print every root-to-leaf path of a case")
    p.add_argument("file")
    p.add_argument("case")
    p.set_defaults(func=cmd_paths)

    p = sub.add_parser("seed-example", help="write the dengue example bundle")
    p.add_argument("file")
    p.set_defaults(func=cmd_seed_example)

    p = sub.add_parser("import", help="import a bundle into a store")
    p.add_argument("file")
    p.add_argument("--store", required=True)
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("export", help="export a store (or one case) to a bundle file")
    p.add_argument("file")
    p.add_argument("--store", required=True)
    p.add_argument("--case")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="serve consultation and admin HTTP endpoints")
    p.add_argument("--store", default=os.environ.get("KBC_STORE"))
    p.add_argument("--bind", default=os.environ.get("KBC_BIND", "127.0.0.1:8080"))
    p.add_argument("--admin-user", default=os.environ.get("KBC_ADMIN_USER"))
    p.add_argument("--admin-password", default=os.environ.get("KBC_ADMIN_PASSWORD"))
    p.add_argument(
        "--session-horizon",
        type=float,
        default=float(os.environ.get("KBC_SESSION_HORIZON", DEFAULT_SESSION_HORIZON)),
        help="seconds a session may stay idle (default 1800)",
    )
    p.set_defaults(func=cmd_serve)

    return parser


def _load_bundle(path: str) -> KnowledgeBundle | None:
    try:
        with open(path, "rb") as handle:
            text = handle.read()
    except OSError as exc:
        print(f"kbc: cannot read {path}: {exc}", file=sys.stderr)
        return None
    try:
        return parse_bundle(text)
    except (BundleParseError, UnsupportedVersionError) as exc:
        print(f"kbc: {path}: {exc}", file=sys.stderr)
        return None


def cmd_validate(args) -> int:
    bundle = _load_bundle(args.file)
    if bundle is None:
        return EXIT_USAGE
    errors = warnings = 0
    reports = []
    for case in sorted(bundle.cases, key=lambda c: c.id):
        report = validate(case, list(bundle.symptoms), list(bundle.diagnoses), list(bundle.rules))
        reports.append(report)
        errors += len(report.errors)
        warnings += len(report.warnings)
    for report in reports:
        for defect in report.errors:
            print(f"ERROR {defect.kind} {defect.location}: {defect.message}")
        for defect in report.warnings:
            print(f"WARN {defect.kind} {defect.location}: {defect.message}")
    print(f"{errors} errors, {warnings} warnings")
    return EXIT_VALIDATION if errors else EXIT_OK


def _case_graph(args):
    """Shared consult/paths preamble: load, find case, validate, build."""
    bundle = _load_bundle(args.file)
    if bundle is None:
        return None
    case = next((c for c in bundle.cases if c.id == args.case), None)
    if case is None:
        print(f"kbc: no case {args.case!r} in {args.file}", file=sys.stderr)
        return None
    report = validate(case, list(bundle.symptoms), list(bundle.diagnoses), list(bundle.rules))
    if report.errors:
        for defect in report.errors:
            print(f"ERROR {defect.kind} {defect.location}: {defect.message}", file=sys.stderr)
        return case, None
    graph = build_graph(case, list(bundle.symptoms), list(bundle.diagnoses), list(bundle.rules))
    return case, graph


def cmd_consult(args) -> int:
    loaded = _case_graph(args)
    if loaded is None:
        return EXIT_USAGE
    _case, graph = loaded
    if graph is None:
        return EXIT_USAGE

    session, view = start_session(graph, kb_version=0)
    while True:
        print()
        print(f"[{view.step_number}] {view.question_text}")
        if view.description:
            print(f"    ({view.description})")
        for i, (_rule_id, label) in enumerate(view.answers, start=1):
            print(f"  {i}. {label}")
        try:
            raw = input("Answer [number, b=back, q=quit]: ").strip()
        except EOFError:
            return EXIT_OK
        if raw.lower() == "q":
            return EXIT_OK
        if raw.lower() == "b":
            try:
                view = step_back(graph, session)
            except AtRootError:
                print("Already at the first question.")
            continue
        if not raw.isdigit() or not (1 <= int(raw) <= len(view.answers)):
            print(f"Please answer with a number between 1 and {len(view.answers)}.")
            continue
        rule_id = view.answers[int(raw) - 1][0]
        outcome = submit_answer(graph, session, rule_id)
        if isinstance(outcome, ConclusionView):
            print()
            print(f"Conclusion: {outcome.conclusion_text}")
            if outcome.advice_text:
                print(f"Advice: {outcome.advice_text}")
            print()
            print("Transcript:")
            for i, (question, answer) in enumerate(outcome.transcript, start=1):
                print(f"  {i}. {question} -> {answer}")
            return EXIT_OK
        view = outcome


def cmd_paths(args) -> int:
    loaded = _case_graph(args)
    if loaded is None:
        return EXIT_USAGE
    _case, graph = loaded
    if graph is None:
        return EXIT_VALIDATION
    for labels, diagnosis_id in enumerate_paths(graph):
        conclusion = graph.diagnoses[diagnosis_id].conclusion_text
        print(f"{' / '.join(labels)} => {conclusion}")
    return EXIT_OK


def cmd_seed_example(args) -> int:
    try:
        with open(args.file, "w", encoding="utf-8") as handle:
            handle.write(dump_bundle(dengue_bundle()))
    except OSError as exc:
        print(f"kbc: cannot write {args.file}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"Wrote dengue example to {args.file}")
    return EXIT_OK


def cmd_import(args) -> int:
    bundle = _load_bundle(args.file)
    if bundle is None:
        return EXIT_USAGE
    try:
        store = KnowledgeStore(args.store)
        store.init_schema()
        report = store.import_bundle(bundle)
        store.close()
    except (StorageUnavailableError, MalformedIdError) as exc:
        print(f"kbc: import failed: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(
        f"Imported {report.cases} cases, {report.symptoms} symptoms, "
        f"{report.diagnoses} diagnoses, {report.rules} rules (version {report.version})"
    )
    return EXIT_OK


def cmd_export(args) -> int:
    try:
        store = KnowledgeStore(args.store)
        store.init_schema()
        bundle = store.export_bundle(args.case)
        store.close()
    except NotFoundError as exc:
        print(f"kbc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StorageUnavailableError as exc:
        print(f"kbc: export failed: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        with open(args.file, "w", encoding="utf-8") as handle:
            handle.write(dump_bundle(bundle))
    except OSError as exc:
        print(f"kbc: cannot write {args.file}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"Exported to {args.file}")
    return EXIT_OK


def cmd_serve(args) -> int:
    if not args.store:
        print("kbc serve: --store is required (or set KBC_STORE)", file=sys.stderr)
        return EXIT_USAGE
    host, _, port_text = args.bind.rpartition(":")
    if not host or not port_text.isdigit():
        print(f"kbc serve: --bind must look like HOST:PORT, got {args.bind!r}", file=sys.stderr)
        return EXIT_USAGE
    if not args.admin_user or not args.admin_password:
        print(
            "kbc serve: admin credentials are required "
            "(--admin-user/--admin-password or KBC_ADMIN_USER/KBC_ADMIN_PASSWORD)",
            file=sys.stderr,
        )
        return EXIT_USAGE
    config = ServerConfig(
        store_path=args.store,
        host=host,
        port=int(port_text),
        admin_username=args.admin_user,
        admin_password=args.admin_password,
        session_horizon=args.session_horizon,
    )
    try:
        service = KnowledgeService(config)
    except (StorageUnavailableError, OSError) as exc:
        print(f"kbc serve: cannot start: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"Serving on http://{config.host}:{service.server_address[1]}/ (store: {config.store_path})")
    try:
        service.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        service.shutdown_and_close()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
