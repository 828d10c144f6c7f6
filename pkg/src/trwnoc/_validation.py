"""Small input-validation helpers shared by the public modules."""

import math
import numbers

import numpy as np

from .exceptions import DomainError, SampleRateMismatchError


def check_finite_real(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise DomainError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def check_positive(value, name):
    value = check_finite_real(value, name)
    if value <= 0:
        raise DomainError(f"{name} must be > 0, got {value!r}")
    return value


def check_nonnegative(value, name):
    value = check_finite_real(value, name)
    if value < 0:
        raise DomainError(f"{name} must be >= 0, got {value!r}")
    return value


def check_in_range(value, name, low, high, *, low_open=False, high_open=False):
    """Check ``low <= value <= high`` (optionally with open ends)."""
    value = check_finite_real(value, name)
    bad_low = value <= low if low_open else value < low
    bad_high = value >= high if high_open else value > high
    if bad_low or bad_high:
        lb = "(" if low_open else "["
        hb = ")" if high_open else "]"
        raise DomainError(f"{name} must lie in {lb}{low}, {high}{hb}, got {value!r}")
    return value


def check_int(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    return value


def as_complex_vector(samples, name="samples", allow_empty=False):
    """Return a 1-D complex128 copy of `samples`, rejecting non-finite values."""
    arr = np.array(samples, dtype=np.complex128, copy=True)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not allow_empty and arr.size == 0:
        raise DomainError(f"{name} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite values")
    return arr


def as_bits(bits, name="bits"):
    arr = np.asarray(bits)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError(f"{name} must be a nonempty 1-D sequence")
    if arr.dtype == bool:
        return arr.astype(np.int8)
    if not np.all((arr == 0) | (arr == 1)):
        raise DomainError(f"{name} must contain only 0 and 1")
    return arr.astype(np.int8)


def frozen(arr):
    arr.setflags(write=False)
    return arr


def check_same_rate(a, b, what="signals"):
    # rates are user supplied floats, so allow a hair of rounding slack
    if not math.isclose(a, b, rel_tol=1e-12, abs_tol=0.0):
        raise SampleRateMismatchError(
            f"cannot combine {what} sampled at {a!r} Hz and {b!r} Hz")


def integer_ratio(numerator, denominator, name="samples_per_symbol"):
    """Return ``numerator / denominator`` if it is an integer (to 1e-9)."""
    ratio = numerator / denominator
    k = int(round(ratio))
    if k < 1 or abs(ratio - k) > 1e-9 * max(1.0, ratio):
        raise DomainError(f"{name} = {ratio!r} is not an integer")
    return k
