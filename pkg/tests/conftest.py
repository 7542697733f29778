import pytest

from zenorate import AtomBathModel, Hydrogen2p1s, Hydrogen3p1s, OhmicFamily

_ACCEPTANCE: dict[str, list[tuple[bool, str]]] = {}


@pytest.fixture
def record_criterion():
    """Collect acceptance outcomes; printed once per criterion at session end."""

    def record(criterion: str, passed: bool, detail: str = "") -> None:
        _ACCEPTANCE.setdefault(criterion, []).append((bool(passed), detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda k: (int(k.split()[0]), k)):
        parts = _ACCEPTANCE[name]
        ok = all(p for p, _ in parts)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")
        for passed, detail in parts:
            if detail:
                terminalreporter.write_line(f"        [{'ok' if passed else 'x '}] {detail}")


@pytest.fixture(scope="session")
def model_2p():
    return AtomBathModel(Hydrogen2p1s(), name="2p1s")


@pytest.fixture(scope="session")
def model_3p():
    return AtomBathModel(Hydrogen3p1s(), name="3p1s")


@pytest.fixture(scope="session")
def model_subohmic():
    # s = Omega / omega_c puts the spectral peak on the atomic transition
    return AtomBathModel(OhmicFamily(1e-8, 1.0 / 500.0, 500.0), name="ohmic-sub")
