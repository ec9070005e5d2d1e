import numpy as np
import pytest
from hypothesis import settings
from scipy.linalg import expm

from chyp._validation import THETA_MAX, THETA_MIN

settings.register_profile("chyp", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("chyp")

ROOT3 = np.sqrt(3.0)


def random_isometry(rng: np.random.Generator, dim: int = 4, scale: float = 0.6) -> np.ndarray:
    """exp(H A) with A anti-Hermitian lies in U(dim-1, 1)."""
    H = np.diag([1.0] * (dim - 1) + [-1.0])
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    A = scale * (X - X.conj().T) / 2
    return expm(H @ A)


def theta_samples(n: int, include_ends: bool = True) -> np.ndarray:
    if include_ends:
        return np.linspace(THETA_MIN, THETA_MAX, n)
    return np.linspace(THETA_MIN, THETA_MAX, n + 2)[1:-1]


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240611)


# acceptance results, printed as one line per criterion at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
