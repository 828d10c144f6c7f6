"""Time-reversal filters, precoding and focusing responses."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_complex_vector, check_positive, check_same_rate, frozen
from .channel import ChannelImpulseResponse
from .exceptions import DomainError, ZeroEnergyError
from .modem import Waveform

__all__ = [
    "FFT_THRESHOLD",
    "convolve",
    "TimeReversalFilter",
    "build_tr_filter",
    "precode",
    "effective_channel",
    "spatial_response",
    "temporal_focusing_gain",
    "TimeReversalPrecoder",
]

# Output length above which the transform path pays off.
FFT_THRESHOLD = 2048
_FFT_MIN_SHORT = 16


def convolve(a, b, method="auto"):
    """Full linear convolution of two complex sequences.

    Parameters
    ----------
    a, b : array_like
        1-D sequences.
    method : {"auto", "direct", "fft"}
        ``"auto"`` switches to FFT convolution when the output is longer
        than `FFT_THRESHOLD` and neither input is trivially short.

    Returns
    -------
    ndarray of complex, length ``len(a) + len(b) - 1``
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim != 1 or b.ndim != 1 or a.size == 0 or b.size == 0:
        raise DomainError("convolve expects two nonempty 1-D sequences")
    if method == "auto":
        long_enough = a.size + b.size - 1 > FFT_THRESHOLD
        method = "fft" if long_enough and min(a.size, b.size) > _FFT_MIN_SHORT else "direct"
    if method == "direct":
        return np.convolve(a, b)
    if method == "fft":
        return fftconvolve(a, b)
    raise DomainError(f"unknown convolution method {method!r}")


@dataclass(frozen=True, eq=False)
class TimeReversalFilter:
    """Unit-energy conjugate time-reversed copy of a CIR.

    Attributes
    ----------
    coefficients : ndarray of complex
        ``reverse(conj(h)) * normalization_gain``, read-only.
    sample_rate : float
    normalization_gain : float
        ``1 / ||h||``.
    source_channel_id : str
    """

    coefficients: np.ndarray
    sample_rate: float
    normalization_gain: float
    source_channel_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coefficients",
                           frozen(as_complex_vector(self.coefficients, "coefficients")))
        check_positive(self.sample_rate, "sample_rate")
        check_positive(self.normalization_gain, "normalization_gain")

    def __len__(self):
        return self.coefficients.size

    @property
    def energy(self):
        return float(np.sum(np.abs(self.coefficients) ** 2))


def build_tr_filter(cir):
    """Build the time-reversal filter matched to `cir`.

    Raises
    ------
    ZeroEnergyError
        If the CIR carries no energy.
    """
    h = cir.samples
    norm = np.linalg.norm(h)
    if not norm > 0:
        raise ZeroEnergyError("cannot build a time-reversal filter from a zero-energy CIR")
    gain = 1.0 / norm
    return TimeReversalFilter(
        coefficients=np.conj(h[::-1]) * gain,
        sample_rate=cir.sample_rate,
        normalization_gain=gain,
        source_channel_id=cir.channel_id,
    )


def precode(filter, waveform):
    """Convolve a waveform with the time-reversal filter."""
    check_same_rate(filter.sample_rate, waveform.sample_rate, "filter and waveform")
    return Waveform(convolve(filter.coefficients, waveform.samples),
                    waveform.sample_rate, waveform.carrier_frequency)


def effective_channel(cir):
    """Cascade of `cir` with its own unit-energy TR filter.

    This is the autocorrelation of ``h`` scaled by ``1/||h||``.  It is
    conjugate symmetric about index ``len(h) - 1``, where it peaks at the
    real value ``||h||``.
    """
    f = build_tr_filter(cir)
    return convolve(cir.samples, f.coefficients)


def spatial_response(filter, cir_at_r, waveform):
    """Noise-free signal seen at a receiver whose CIR is `cir_at_r`."""
    check_same_rate(filter.sample_rate, cir_at_r.sample_rate, "filter and channel")
    x = precode(filter, waveform)
    return Waveform(convolve(cir_at_r.samples, x.samples),
                    waveform.sample_rate, waveform.carrier_frequency)


def temporal_focusing_gain(cir):
    """Peak amplitude gain of TR over plain transmission, in dB.

    Both arms radiate the same energy: a unit impulse sent straight
    through the channel peaks at ``max|h|``, while the unit-energy TR
    filter makes the channel peak at ``||h||``.  The gain
    ``20 log10(||h|| / max|h|)`` is 0 dB for a single tap, never negative,
    and independent of the channel's overall scale.
    """
    cir.require_energy()
    g = effective_channel(cir)
    return 20.0 * math.log10(np.max(np.abs(g)) / np.max(np.abs(cir.samples)))


class TimeReversalPrecoder(BaseEstimator, TransformerMixin):
    """Estimator wrapper: `fit` on a channel, `transform` waveforms.

    Parameters
    ----------
    sample_rate : float, optional
        Needed only when fitting on a bare sample array.

    Attributes
    ----------
    filter_ : TimeReversalFilter
    effective_channel_ : ndarray of complex
    peak_lag_ : int
        Index of the effective-channel peak, the focusing instant.
    """

    def __init__(self, sample_rate=None):
        self.sample_rate = sample_rate

    def fit(self, X, y=None):
        cir = X
        if not isinstance(X, ChannelImpulseResponse):
            if self.sample_rate is None:
                raise DomainError("sample_rate is required when fitting on raw samples")
            cir = ChannelImpulseResponse(samples=X, sample_rate=self.sample_rate)
        self.filter_ = build_tr_filter(cir)
        self.effective_channel_ = convolve(cir.samples, self.filter_.coefficients)
        self.peak_lag_ = int(np.argmax(np.abs(self.effective_channel_)))
        return self

    def transform(self, X):
        check_is_fitted(self, "filter_")
        if isinstance(X, Waveform):
            return precode(self.filter_, X)
        return convolve(self.filter_.coefficients, as_complex_vector(X, "X"))
