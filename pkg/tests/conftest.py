import functools

import pytest

from extremal.extremality import analyze, xi_for_seed
from extremal.sequences import SeedSpec, generate

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def cached_seq(label: str, K: int):
    return generate(SeedSpec.parse(label), K)


@functools.lru_cache(maxsize=None)
def cached_xi(label: str, bits: int):
    return xi_for_seed(SeedSpec.parse(label), bits)


@functools.lru_cache(maxsize=None)
def cached_analysis(label: str, K: int, bits: int):
    return analyze(SeedSpec.parse(label), K, bits)


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""
    name = request.node.name
    state = {"detail": ""}
    yield state
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}  {state['detail']}")


@pytest.hookimpl(hookwrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
