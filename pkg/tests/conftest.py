import pytest

from tract import (
    EigenModel,
    ExpDecay,
    Expression,
    FiniteRank,
    Geometric,
    GeometricTail,
    PolyDecay,
    Tabulated,
    TailEnvelope,
)

# Per-criterion pass/fail summary for the acceptance suite.
_ACCEPTANCE: dict[str, list[tuple[str, bool]]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if name.startswith("test_c"):
        key = name.split("_")[1]
        _ACCEPTANCE.setdefault(key, []).append((name, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: (len(k), k)):
        entries = _ACCEPTANCE[key]
        ok = all(passed for _, passed in entries)
        label = "PASS" if ok else "FAIL"
        terminalreporter.write_line(
            f"criterion {key[1:]:>3}: {label}  ({len(entries)} check(s))"
        )
        if not ok:
            for name, passed in entries:
                if not passed:
                    terminalreporter.write_line(f"    failed: {name}")


@pytest.fixture
def geo():
    return EigenModel(Geometric(1.0, 0.5))


@pytest.fixture
def poly2():
    return EigenModel(PolyDecay(1.0, 2.0))


@pytest.fixture
def poly1():
    return EigenModel(PolyDecay(1.0, 1.0))


@pytest.fixture
def exp1():
    return EigenModel(ExpDecay(1.0, 1.0, 1.0))


@pytest.fixture
def exp2():
    return EigenModel(ExpDecay(1.0, 2.0, 1.0))


@pytest.fixture
def rank2():
    return EigenModel(FiniteRank((1.0, 0.5)))


@pytest.fixture
def tabulated_geo():
    return EigenModel(
        Tabulated((1.0, 0.5), TailEnvelope(GeometricTail(1.0, 0.5), valid_from=3))
    )


@pytest.fixture
def expr_poly2():
    return EigenModel(Expression("j^(0-2)"))
