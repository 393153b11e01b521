import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from exchgraph.graph_core import LabeledGraph, num_pairs

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def random_graph(n: int, rng, p: float = 0.5) -> LabeledGraph:
    return LabeledGraph.from_code(n, int(sum(1 << i for i in range(num_pairs(n)) if rng.random() < p)))


# -- acceptance reporting: one PASS/FAIL line per criterion ----------------------------

_CRITERIA: dict[int, list[tuple[str, str, list]]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = "xfail" if hasattr(rep, "wasxfail") else rep.outcome
        notes = [v for k, v in item.user_properties if k == "note"]
        _CRITERIA.setdefault(mark.args[0], []).append((item.name, status, notes))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        parts = _CRITERIA[k]
        ok = all(s == "passed" for _, s, _ in parts)
        tr.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}")
        for name, status, notes in parts:
            if status != "passed" or notes:
                tr.write_line(f"    {name}: {status}")
            for n in notes:
                tr.write_line(f"      {n}")
