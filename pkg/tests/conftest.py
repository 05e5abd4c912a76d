import numpy as np
import pytest

from krein.core import BlockOperator

SQRT13_K = (3 - np.sqrt(13)) / 2
SQRT13_EIG = (1 - np.sqrt(13)) / 2


def random_blocks(rng, p, m, complex_entries=True, scale=1.0):
    def g(shape):
        z = rng.standard_normal(shape)
        if complex_entries:
            z = z + 1j * rng.standard_normal(shape)
        return scale * z

    return BlockOperator.from_blocks(g((p, p)), g((p, m)), g((m, p)), g((m, m)))


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


@pytest.fixture
def sqrt13():
    return BlockOperator.from_blocks([[-1.0]], [[1.0]], [[1.0]], [[2.0]])


@pytest.fixture
def neutral2():
    return BlockOperator.from_blocks([[0.0]], [[1.0]], [[1.0]], [[0.0]])


ACCEPTANCE_RESULTS = {}


def record_acceptance(number, title, passed, detail=""):
    line = f"ACCEPTANCE {number:>2} {'PASS' if passed else 'FAIL'}: {title}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_RESULTS[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_RESULTS):
            terminalreporter.write_line(ACCEPTANCE_RESULTS[n])
