import numpy as np
import pytest

from hyperstream.io import clean_hypergraph


def random_hypergraph(rng, n, m, max_size=6, weighted=False):
    nets = [rng.integers(0, n, rng.integers(1, max_size + 1)).tolist() for _ in range(m)]
    nw = rng.integers(1, 5, m).tolist() if weighted else None
    vw = rng.integers(1, 4, n) if weighted else None
    return clean_hypergraph(n, nets, nw, vw)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return p
    return _write


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: list[str] = []


def report(criterion: int, ok, text: str) -> None:
    """``ok=None`` marks an informational line that is not a verdict."""
    tag = "INFO" if ok is None else "PASS" if ok else "FAIL"
    ACCEPTANCE.append(f"{tag}  criterion {criterion}: {text}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
