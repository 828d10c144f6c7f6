import math

import numpy as np
import pytest
from hypothesis import settings
from scipy import integrate

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

# lines collected by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def direct_sum_convolution(a, b):
    """O(n*m) textbook convolution, independent of numpy/scipy convolve."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    out = np.zeros(a.size + b.size - 1, dtype=complex)
    for k, ak in enumerate(a):
        out[k:k + b.size] += ak * b
    return out


def gaussian_tail(x):
    """Q(x) by adaptive quadrature of the normal density."""
    pdf = lambda t: math.exp(-0.5 * t * t) / math.sqrt(2 * math.pi)  # noqa: E731
    val, _ = integrate.quad(pdf, x, math.inf, epsabs=1e-15, epsrel=1e-13, limit=200)
    return val


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
