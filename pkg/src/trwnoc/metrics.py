"""Closed-form BER expressions, confidence intervals and focusing ratios."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from ._validation import check_finite_real, check_int, check_nonnegative, check_positive
from .exceptions import DomainError

__all__ = [
    "TheoreticalBerInput",
    "q_function",
    "q_inverse",
    "theoretical_ber",
    "midpoint_ber",
    "extrapolate_ber_curve",
    "suppression_ratio_db",
    "binomial_upper_bound",
    "clopper_pearson",
    "binomial_sigma",
    "bpsk_awgn_ber",
]


@dataclass(frozen=True)
class TheoreticalBerInput:
    """Cluster separation and noise std feeding the BER formulas."""

    delta_a: float
    sigma: float

    def __post_init__(self):
        check_nonnegative(self.delta_a, "delta_a")
        check_positive(self.sigma, "sigma")


def q_function(x):
    """Gaussian tail probability ``Q(x) = 0.5 erfc(x / sqrt 2)``.

    Works on scalars and arrays; erfc keeps full relative accuracy deep
    into the tail, so Q(8) ~ 6.2e-16 comes out right.
    """
    out = 0.5 * special.erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(out) if np.ndim(out) == 0 else out


def q_inverse(p):
    """Inverse of `q_function` on (0, 1)."""
    p = check_finite_real(p, "p")
    if not 0 < p < 1:
        raise DomainError(f"q_inverse needs 0 < p < 1, got {p!r}")
    return float(math.sqrt(2.0) * special.erfcinv(2.0 * p))


def _ratio(delta_a, sigma):
    if isinstance(delta_a, TheoreticalBerInput):
        return delta_a.delta_a / delta_a.sigma
    return TheoreticalBerInput(delta_a, sigma).delta_a / sigma


def theoretical_ber(delta_a, sigma=None):
    """Cluster-separation BER estimate ``0.5 * Q(delta_a / sigma)``.

    Parameters
    ----------
    delta_a : float or TheoreticalBerInput
        Full distance between the two cluster centroids.
    sigma : float
        Noise standard deviation.  Omit when passing a TheoreticalBerInput.

    See Also
    --------
    midpoint_ber : textbook error rate for a midpoint threshold.
    """
    return q_function(_ratio(delta_a, sigma)) * 0.5


def midpoint_ber(delta_a, sigma=None):
    """``Q(delta_a / (2 sigma))``: equiprobable symbols, midpoint threshold."""
    return q_function(_ratio(delta_a, sigma) / 2.0)


def extrapolate_ber_curve(delta_a_at_ref, sigma_at_ref, snr_offsets_db, ref_snr_db=0.0,
                          formula="cluster", n_bits=None):
    """Project a measured operating point to other transmit powers.

    Transmit power up by ``o`` dB scales the separation by ``10**(o/20)``
    while the noise stays fixed.

    Parameters
    ----------
    delta_a_at_ref, sigma_at_ref : float
        Measured at `ref_snr_db`.
    snr_offsets_db : sequence of float
    ref_snr_db : float
    formula : {"cluster", "midpoint"}
        Selects `theoretical_ber` or `midpoint_ber`.
    n_bits : int, optional
        Size of the measurement; fewer than 1000 bits is rejected.

    Returns
    -------
    list of (snr_db, ber)
    """
    ref = TheoreticalBerInput(delta_a_at_ref, sigma_at_ref)
    if n_bits is not None and check_int(n_bits, "n_bits") < 1000:
        raise DomainError(f"reference measured on {n_bits} bits; need at least 1000")
    fn = {"cluster": theoretical_ber, "midpoint": midpoint_ber}.get(formula)
    if fn is None:
        raise DomainError(f"unknown formula {formula!r}")
    ref_snr_db = check_finite_real(ref_snr_db, "ref_snr_db")
    out = []
    for off in snr_offsets_db:
        off = check_finite_real(off, "snr offset")
        out.append((ref_snr_db + off, fn(ref.delta_a * 10.0 ** (off / 20.0), ref.sigma)))
    return out


def suppression_ratio_db(intended_peak_power, victim_peak_powers):
    """``10 log10(intended / max(victims))`` in dB.

    Victims may receive exactly zero power; if all do the ratio is +inf.
    """
    intended = check_positive(intended_peak_power, "intended_peak_power")
    victims = np.atleast_1d(np.asarray(victim_peak_powers, dtype=float))
    if victims.size == 0:
        raise DomainError("no victim powers given")
    if not np.all(np.isfinite(victims)) or np.any(victims < 0):
        raise DomainError("victim powers must be finite and nonnegative")
    worst = float(victims.max())
    return math.inf if worst == 0 else 10.0 * math.log10(intended / worst)


def binomial_upper_bound(n_errors, n_bits, confidence=0.95):
    """One-sided upper confidence bound on an error probability.

    Zero observed errors use the rule of three (``3 / n``); otherwise the
    exact Clopper-Pearson bound.
    """
    n_errors = check_int(n_errors, "n_errors", minimum=0)
    n_bits = check_int(n_bits, "n_bits", minimum=1)
    if n_errors > n_bits:
        raise DomainError("n_errors exceeds n_bits")
    if n_errors == 0:
        return min(1.0, 3.0 / n_bits)
    if n_errors == n_bits:
        return 1.0
    return float(stats.beta.ppf(confidence, n_errors + 1, n_bits - n_errors))


def clopper_pearson(n_errors, n_bits, confidence=0.95):
    """Two-sided exact interval for a binomial proportion."""
    n_errors = check_int(n_errors, "n_errors", minimum=0)
    n_bits = check_int(n_bits, "n_bits", minimum=1)
    alpha = 1.0 - confidence
    lo = 0.0 if n_errors == 0 else float(stats.beta.ppf(alpha / 2, n_errors, n_bits - n_errors + 1))
    hi = 1.0 if n_errors == n_bits else float(
        stats.beta.ppf(1 - alpha / 2, n_errors + 1, n_bits - n_errors))
    return lo, hi


def binomial_sigma(p, n_bits):
    """Standard deviation of an empirical error rate over `n_bits` trials."""
    return math.sqrt(p * (1.0 - p) / n_bits)


def bpsk_awgn_ber(es_n0_db):
    """Coherent BPSK on AWGN: ``Q(sqrt(2 Es/N0))``."""
    return q_function(math.sqrt(2.0 * 10.0 ** (es_n0_db / 10.0)))
