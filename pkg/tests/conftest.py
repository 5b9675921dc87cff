import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# Acceptance results are collected here and echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_spd(rng, p, case="real", cond=10.0):
    """Random positive-definite matrix with eigenvalues in [1, cond]."""
    if case == "real":
        Q, _ = np.linalg.qr(rng.standard_normal((p, p)))
    else:
        Q, _ = np.linalg.qr(rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p)))
    ev = rng.uniform(1.0, cond, size=p)
    X = (Q * ev) @ Q.conj().T
    return 0.5 * (X + X.conj().T)


@pytest.fixture
def np_rng():
    return np.random.default_rng(20240601)
