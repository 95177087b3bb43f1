"""Shared test helpers, including slow reference implementations used as oracles."""

import numpy as np
import pytest

from mcpc import ScalarField

def naive_quant_construct(values, taus):
    """Reference multi-component construction with a plain scalar quantizer.

    Pure Python loops, no numpy vector ops and no shared code with the
    library. Returns the measured L-inf error after each component.
    """
    x = [float(v) for v in np.asarray(values).ravel()]
    approx = [0.0] * len(x)
    errors = []
    for tau in taus:
        for k in range(len(x)):
            e = x[k] - approx[k]
            if tau == 0.0:
                c = e
            else:
                s = 2.0 * tau
                c = round(e / s) * s
            approx[k] = approx[k] + c
        errors.append(max(abs(a - b) for a, b in zip(x, approx)))
    return errors

def naive_schedule(value_range, delta, n):
    return [value_range * 2.0 ** (-delta * i) for i in range(1, n + 1)]

def naive_max_abs(a, b):
    return max(abs(float(p) - float(q)) for p, q in zip(np.ravel(a), np.ravel(b)))

@pytest.fixture
def rng():
    return np.random.default_rng(12345)

def random_field(rng, dims, kind="normal"):
    if kind == "normal":
        v = rng.standard_normal(dims)
    elif kind == "wide":
        v = rng.standard_normal(dims) * 10.0 ** rng.uniform(-30, 30, dims)
    elif kind == "int":
        v = rng.integers(-50, 50, dims).astype(float)
    else:
        raise ValueError(kind)
    return ScalarField(v, dims)



# one PASS/FAIL line per acceptance criterion, aggregated over its sub-tests

_CRITERIA: dict = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark:
            _CRITERIA.setdefault(mark.args[0], {"title": mark.kwargs.get("title", ""), "outcomes": []})


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    for crit, entry in _CRITERIA.items():
        if f"criterion_{crit}_" in report.nodeid or report.nodeid.endswith(f"criterion_{crit}"):
            entry["outcomes"].append((report.nodeid.split("::")[-1], report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_CRITERIA):
        entry = _CRITERIA[crit]
        outs = entry["outcomes"]
        if not outs:
            continue
        failed = [name for name, ok in outs if not ok]
        status = "FAIL" if failed else "PASS"
        extra = f"  (failing: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {crit}: {status}  {entry['title']}{extra}")
