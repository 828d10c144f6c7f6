"""Baseband modulation and detection for CW-ASK, BPSK, IR-OOK and IR-PPM.

Waveforms are complex baseband.  The continuous-wave schemes use a
constant unit phasor as the carrier; the impulse-radio schemes carry a
truncated Gaussian pulse and report a carrier frequency of 0.
"""

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import (
    as_bits,
    as_complex_vector,
    check_finite_real,
    check_in_range,
    check_int,
    check_positive,
    frozen,
    integer_ratio,
)
from .exceptions import DegenerateClusterError, DomainError

__all__ = [
    "Waveform",
    "SchemeKind",
    "ModulationScheme",
    "ThresholdEstimate",
    "Demodulated",
    "gaussian_pulse",
    "modulate",
    "demodulate",
    "estimate_threshold",
    "TwoMeansThreshold",
    "Modem",
]


@dataclass(frozen=True, eq=False)
class Waveform:
    """Uniformly sampled complex baseband signal.

    Attributes
    ----------
    samples : ndarray of complex
        Read-only.
    sample_rate : float
        Hz.
    carrier_frequency : float
        Hz, 0 for carrierless impulse radio.
    """

    samples: np.ndarray
    sample_rate: float
    carrier_frequency: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "samples", frozen(as_complex_vector(self.samples, "samples")))
        check_positive(self.sample_rate, "sample_rate")
        check_finite_real(self.carrier_frequency, "carrier_frequency")

    def __len__(self):
        return self.samples.size

    @property
    def energy(self):
        return float(np.sum(np.abs(self.samples) ** 2))

    @property
    def power(self):
        return self.energy / self.samples.size


class SchemeKind(enum.Enum):
    CW_ASK = "cw_ask"
    BPSK = "bpsk"
    IR_OOK = "ir_ook"
    IR_PPM = "ir_ppm"

    @property
    def is_impulse_radio(self):
        return self in (SchemeKind.IR_OOK, SchemeKind.IR_PPM)


@dataclass(frozen=True)
class ModulationScheme:
    """Modulation parameters.

    Parameters
    ----------
    kind : SchemeKind or str
    ask_amplitude_ratio : float
        Envelope of a 0-symbol relative to a 1-symbol, in (0, 1).
    ppm_shift_fraction : float
        Pulse shift for a 1-symbol as a fraction of the symbol period.
    pulse_width : float, optional
        Gaussian pulse support in seconds.  ``None`` uses a quarter of the
        symbol period.
    samples_per_symbol : int, optional
        If set, `modulate` checks the requested rates against it.
    ask_window_fraction : float
        Fraction of each CW slot, centred, over which the detector averages.
    carrier_frequency : float
        Metadata attached to CW waveforms.
    """

    kind: SchemeKind = SchemeKind.CW_ASK
    ask_amplitude_ratio: float = 0.5
    ppm_shift_fraction: float = 0.5
    pulse_width: Optional[float] = None
    samples_per_symbol: Optional[int] = None
    ask_window_fraction: float = 0.5
    carrier_frequency: float = 60e9

    def __post_init__(self):
        object.__setattr__(self, "kind", SchemeKind(self.kind) if isinstance(self.kind, str)
                           else self.kind)
        if not isinstance(self.kind, SchemeKind):
            raise DomainError(f"unknown scheme kind {self.kind!r}")
        check_in_range(self.ask_amplitude_ratio, "ask_amplitude_ratio", 0, 1,
                       low_open=True, high_open=True)
        check_in_range(self.ppm_shift_fraction, "ppm_shift_fraction", 0, 1,
                       low_open=True, high_open=True)
        if self.pulse_width is not None:
            check_positive(self.pulse_width, "pulse_width")
        if self.samples_per_symbol is not None:
            check_int(self.samples_per_symbol, "samples_per_symbol", minimum=2)
        check_in_range(self.ask_window_fraction, "ask_window_fraction", 0, 1, low_open=True)
        check_positive(self.carrier_frequency, "carrier_frequency")

    def with_kind(self, kind):
        return replace(self, kind=SchemeKind(kind) if isinstance(kind, str) else kind)

    def samples_per_symbol_for(self, symbol_rate, sample_rate):
        sps = integer_ratio(check_positive(sample_rate, "sample_rate"),
                            check_positive(symbol_rate, "symbol_rate"))
        if sps < 2:
            raise DomainError(f"samples_per_symbol must be >= 2, got {sps}")
        if self.samples_per_symbol is not None and sps != self.samples_per_symbol:
            raise DomainError(
                f"rates give {sps} samples per symbol but the scheme fixes "
                f"{self.samples_per_symbol}")
        return sps

    def pulse_samples(self, sps, sample_rate):
        """Pulse length in samples for a slot of `sps` samples."""
        if self.pulse_width is None:
            n = max(1, sps // 4)
        else:
            n = max(1, int(round(self.pulse_width * sample_rate)))
        if n > sps:
            raise DomainError(f"pulse of {n} samples does not fit a {sps}-sample slot")
        return n

    def ppm_shift_samples(self, sps, sample_rate):
        shift = int(round(self.ppm_shift_fraction * sps))
        n = self.pulse_samples(sps, sample_rate)
        if shift + n > sps:
            raise DomainError(
                f"PPM shift of {shift} samples pushes the {n}-sample pulse out of its slot")
        return shift


def gaussian_pulse(n):
    """Gaussian of `n` samples, sigma = n/6, truncated at +-3 sigma, peak ~1."""
    n = check_int(n, "n", minimum=1)
    if n == 1:
        return np.ones(1)
    t = np.arange(n) - (n - 1) / 2.0
    return np.exp(-0.5 * (t / (n / 6.0)) ** 2)


def modulate(bits, scheme, symbol_rate, sample_rate):
    """Map bits to a sampled baseband waveform.

    Parameters
    ----------
    bits : array_like of {0, 1}
    scheme : ModulationScheme
    symbol_rate, sample_rate : float
        Their ratio must be an integer >= 2.

    Returns
    -------
    Waveform
        ``len(bits) * samples_per_symbol`` samples.
    """
    bits = as_bits(bits)
    sps = scheme.samples_per_symbol_for(symbol_rate, sample_rate)
    kind = scheme.kind
    if kind is SchemeKind.CW_ASK:
        env = np.where(bits == 1, 1.0, scheme.ask_amplitude_ratio)
        return Waveform(np.repeat(env, sps), sample_rate, scheme.carrier_frequency)
    if kind is SchemeKind.BPSK:
        return Waveform(np.repeat(2.0 * bits - 1.0, sps), sample_rate, scheme.carrier_frequency)

    n_p = scheme.pulse_samples(sps, sample_rate)
    pulse = gaussian_pulse(n_p)
    slots = np.zeros((bits.size, sps))
    if kind is SchemeKind.IR_OOK:
        slots[bits == 1, :n_p] = pulse
    else:
        shift = scheme.ppm_shift_samples(sps, sample_rate)
        slots[bits == 0, :n_p] = pulse
        slots[bits == 1, shift:shift + n_p] = pulse
    return Waveform(slots.ravel(), sample_rate, 0.0)


@dataclass(frozen=True)
class ThresholdEstimate:
    threshold: float
    low_centroid: float
    high_centroid: float

    @property
    def delta_a(self):
        return self.high_centroid - self.low_centroid


def estimate_threshold(decision_statistics, max_iter=1000):
    """Split 1-D statistics into two clusters with 2-means.

    Centroids start at the minimum and maximum.  A value equal to the
    current threshold joins the low cluster.

    Returns
    -------
    ThresholdEstimate
        Midpoint threshold and both centroids; ``delta_a`` is their distance.

    Raises
    ------
    DegenerateClusterError
        Fewer than two values or all values identical.
    """
    s = np.asarray(decision_statistics, dtype=float).ravel()
    if s.size < 2:
        raise DegenerateClusterError("need at least two decision statistics")
    if not np.all(np.isfinite(s)):
        raise DomainError("decision statistics must be finite")
    lo, hi = float(s.min()), float(s.max())
    if lo == hi:
        raise DegenerateClusterError("all decision statistics are identical")
    # sorting makes the result independent of input order
    s = np.sort(s)
    for _ in range(max_iter):
        t = 0.5 * (lo + hi)
        k = int(np.searchsorted(s, t, side="right"))
        new_lo, new_hi = float(s[:k].mean()), float(s[k:].mean())
        if new_lo == lo and new_hi == hi:
            break
        lo, hi = new_lo, new_hi
    return ThresholdEstimate(0.5 * (lo + hi), lo, hi)


@dataclass(frozen=True, eq=False)
class Demodulated:
    """Detector output.

    Attributes
    ----------
    bits : ndarray of int8
    statistics : ndarray of float
        One real decision statistic per symbol.
    threshold : float
        Decision boundary applied to `statistics`.
    centroids : tuple of float or None
        Cluster centroids when a 2-means threshold was estimated.
    """

    bits: np.ndarray
    statistics: np.ndarray
    threshold: float
    centroids: Optional[tuple] = None


def decision_statistics(received, scheme, n_bits, symbol_rate, reference=None):
    """Per-symbol real decision statistics (see `demodulate`)."""
    n_bits = check_int(n_bits, "n_bits", minimum=1)
    sps = scheme.samples_per_symbol_for(symbol_rate, received.sample_rate)
    need = n_bits * sps
    if need > received.samples.size:
        raise DomainError(
            f"{n_bits} symbols need {need} samples, waveform has {received.samples.size}")
    seg = received.samples[:need].reshape(n_bits, sps)
    kind = scheme.kind
    if kind is SchemeKind.BPSK:
        phase = 0.0 if reference is None else float(reference)
        return (seg * np.exp(-1j * phase)).real.sum(axis=1)
    energy = seg.real ** 2 + seg.imag ** 2
    if kind is SchemeKind.CW_ASK:
        w = max(1, int(round(scheme.ask_window_fraction * sps)))
        start = (sps - w) // 2
        return np.sqrt(energy[:, start:start + w].mean(axis=1))
    n_p = scheme.pulse_samples(sps, received.sample_rate)
    if kind is SchemeKind.IR_OOK:
        return np.sqrt(energy[:, :n_p].mean(axis=1))
    shift = scheme.ppm_shift_samples(sps, received.sample_rate)
    return (np.sqrt(energy[:, shift:shift + n_p].mean(axis=1))
            - np.sqrt(energy[:, :n_p].mean(axis=1)))


def demodulate(received, scheme, n_bits, symbol_rate, reference=None, fit_slice=None):
    """Recover bits from a delay-aligned received waveform.

    CW-ASK and IR-OOK compare the RMS amplitude over the integration window
    (centred part of the slot, or the pulse window) with an a posteriori
    2-means threshold.  IR-PPM compares RMS amplitude in the shifted window
    against the slot-start window.  BPSK mixes with the reference phase,
    integrates over the slot and takes the sign.  Every tie decides 0.

    Parameters
    ----------
    received : Waveform
        Symbol 0 starts at sample 0.
    scheme : ModulationScheme
    n_bits : int
    symbol_rate : float
    reference : float, optional
        BPSK carrier phase in radians (default 0).
    fit_slice : slice, optional
        Symbols used to fit the threshold, e.g. to skip transients.

    Returns
    -------
    Demodulated
    """
    stats = decision_statistics(received, scheme, n_bits, symbol_rate, reference)
    centroids = None
    if scheme.kind in (SchemeKind.BPSK, SchemeKind.IR_PPM):
        threshold = 0.0
    else:
        est = estimate_threshold(stats if fit_slice is None else stats[fit_slice])
        threshold, centroids = est.threshold, (est.low_centroid, est.high_centroid)
    bits = (stats > threshold).astype(np.int8)
    return Demodulated(frozen(bits), frozen(stats), threshold, centroids)


class TwoMeansThreshold(BaseEstimator, ClassifierMixin):
    """2-means threshold detector with the usual fit/predict interface.

    Attributes
    ----------
    threshold_ : float
    cluster_centers_ : ndarray of shape (2,)
    classes_ : ndarray
    """

    def __init__(self, max_iter=1000):
        self.max_iter = max_iter

    def fit(self, X, y=None):
        est = estimate_threshold(np.ravel(X), max_iter=self.max_iter)
        self.threshold_ = est.threshold
        self.cluster_centers_ = np.array([est.low_centroid, est.high_centroid])
        self.classes_ = np.array([0, 1])
        return self

    def predict(self, X):
        check_is_fitted(self, "threshold_")
        return (np.ravel(X) > self.threshold_).astype(np.int8)


class Modem(BaseEstimator, TransformerMixin):
    """Bits <-> samples for a fixed scheme and rate pair.

    `transform` modulates a bit vector, `inverse_transform` demodulates a
    delay-aligned sample vector back to bits.
    """

    def __init__(self, kind="cw_ask", symbol_rate=1e9, sample_rate=480e9,
                 ask_amplitude_ratio=0.5, ppm_shift_fraction=0.5, pulse_width=None):
        self.kind = kind
        self.symbol_rate = symbol_rate
        self.sample_rate = sample_rate
        self.ask_amplitude_ratio = ask_amplitude_ratio
        self.ppm_shift_fraction = ppm_shift_fraction
        self.pulse_width = pulse_width

    def _scheme(self):
        return ModulationScheme(kind=self.kind, ask_amplitude_ratio=self.ask_amplitude_ratio,
                                ppm_shift_fraction=self.ppm_shift_fraction,
                                pulse_width=self.pulse_width)

    def fit(self, X=None, y=None):
        self.scheme_ = self._scheme()
        self.samples_per_symbol_ = self.scheme_.samples_per_symbol_for(
            self.symbol_rate, self.sample_rate)
        return self

    def transform(self, X):
        check_is_fitted(self, "scheme_")
        return np.array(modulate(X, self.scheme_, self.symbol_rate, self.sample_rate).samples)

    def inverse_transform(self, X, reference=None):
        check_is_fitted(self, "scheme_")
        wf = Waveform(X, self.sample_rate)
        n = wf.samples.size // self.samples_per_symbol_
        return np.array(demodulate(wf, self.scheme_, n, self.symbol_rate, reference).bits)
