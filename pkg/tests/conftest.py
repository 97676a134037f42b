from __future__ import annotations

import threading

import pytest

from kbconsult.server import KnowledgeService, ServerConfig

from helpers import fever_mini

ADMIN_USER = "keeper"
ADMIN_PASSWORD = "opens-the-vault"

# One console line per acceptance criterion, keyed by test name.
_ACCEPTANCE_LABELS = {
    "test_oracle_equivalence": "oracle equivalence (fixture + 100 random graphs)",
    "test_algorithm_fidelity_http": "algorithm fidelity (HTTP walks, HTML + WML)",
    "test_validator_soundness": "validator soundness (8 seeded defect kinds)",
    "test_round_trips": "round-trips (50 bundles) + version monotonicity (1000 mutations)",
    "test_render_contracts": "render contracts (WML well-formed, label order, escaping)",
    "test_dengue_example": "dengue example (seed, validate, classes, signs, reachability)",
    "test_negotiation": "format negotiation (decision table + real Accept headers)",
}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1].split("[")[0]
    label = _ACCEPTANCE_LABELS.get(name)
    if label is None:
        return
    verdict = "PASS" if report.passed else "FAIL"
    print(f"\n[acceptance] {verdict}: {label}", flush=True)


@pytest.fixture
def fever():
    return fever_mini()


@pytest.fixture
def fever_graph(fever):
    return fever.graph()


@pytest.fixture
def service(tmp_path):
    config = ServerConfig(
        store_path=str(tmp_path / "kb.sqlite3"),
        host="127.0.0.1",
        port=0,
        admin_username=ADMIN_USER,
        admin_password=ADMIN_PASSWORD,
        quiet=True,
    )
    srv = KnowledgeService(config)
    thread = threading.Thread(target=lambda: srv.serve_forever(poll_interval=0.02), daemon=True)
    thread.start()
    yield srv
    srv.shutdown_and_close()
    thread.join(timeout=5)


@pytest.fixture
def fever_service(service, fever):
    service.store.import_bundle(fever.bundle())
    return service


def service_port(srv: KnowledgeService) -> int:
    return srv.server_address[1]
