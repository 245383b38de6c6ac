import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_hermitian(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


def random_anti_hermitian(rng, d):
    return 1j * random_hermitian(rng, d)


DIPOLE_TEXT = "qubits 2\ngen A1 : 2.0 ZZ + -1.0 XX + -1.0 YY\ngen A2 : 1.0 XI + -1.0 YI + 1.0 IX + -1.0 IY\n"
HEISENBERG_TEXT = "qubits 2\ngen B1 : 1.0 XX + 1.0 YY + 1.0 ZZ\n"


@pytest.fixture
def dipole():
    from lieforge.generators import parse_generator_text

    return parse_generator_text(DIPOLE_TEXT)


@pytest.fixture
def heisenberg():
    from lieforge.generators import parse_generator_text

    return parse_generator_text(HEISENBERG_TEXT)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
