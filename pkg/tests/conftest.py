import contextlib
import time

import pytest

from lexigraph.synthetic import suffix_language

_ACCEPTANCE: list[tuple[str, str, bool, str]] = []


class _Criterion:
    def __init__(self, number, title):
        self.number = number
        self.title = title
        self.detail = ""


@pytest.fixture
def criterion():
    """Record one acceptance criterion as PASS/FAIL for the terminal summary."""

    @contextlib.contextmanager
    def record(number, title):
        c = _Criterion(number, title)
        start = time.perf_counter()
        ok = False
        try:
            yield c
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            detail = f"{c.detail} [{elapsed:.2f}s]".strip()
            _ACCEPTANCE.append((number, title, ok, detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  #{number} {title}: {detail}")


@pytest.fixture(scope="session")
def synthetic():
    return suffix_language()


@pytest.fixture(scope="session")
def synthetic_files(synthetic, tmp_path_factory):
    root = tmp_path_factory.mktemp("synthetic")
    return synthetic.write(root, seed_size=200, rng_seed=0)
