"""Multipath channel impulse responses inside a reverberant package.

Channels are either synthesized with a 2-D image-source model of a
rectangular cavity or read from time-domain trace files exported by an
external field solver.  Everything here is a pure function of its inputs.
"""

import csv
import hashlib
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._validation import (
    as_complex_vector,
    check_finite_real,
    check_in_range,
    check_int,
    check_nonnegative,
    check_positive,
    frozen,
)
from .exceptions import (
    DegenerateGeometryError,
    DomainError,
    EmptyTraceError,
    MalformedRowError,
    NonUniformGridError,
    TraceParseError,
    ZeroEnergyError,
)

__all__ = [
    "SPEED_OF_LIGHT",
    "Position",
    "CavityModel",
    "MultipathTap",
    "ChannelImpulseResponse",
    "propagation_velocity",
    "monopole_length",
    "image_count",
    "synth_cavity_cir",
    "discretize",
    "rms_delay_spread",
    "import_cir_trace",
    "export_cir_trace",
]

SPEED_OF_LIGHT = 299_792_458.0

DEFAULT_SAMPLE_RATE = 480e9
DEFAULT_CARRIER = 60e9
TRACE_HEADER = ("time_s", "real", "imag")
_GRID_TOLERANCE = 1e-6


def propagation_velocity(relative_permittivity):
    """Phase velocity ``c0 / sqrt(eps_r)`` in a non-magnetic dielectric.

    Parameters
    ----------
    relative_permittivity : float
        Relative permittivity, at least 1.

    Returns
    -------
    float
        Velocity in m/s.
    """
    eps = check_finite_real(relative_permittivity, "relative_permittivity")
    if eps < 1:
        raise DomainError(f"relative_permittivity must be >= 1, got {eps!r}")
    return SPEED_OF_LIGHT / math.sqrt(eps)


def monopole_length(frequency, relative_permittivity):
    """Quarter-wavelength monopole length ``v_p / (4 f)`` in meters."""
    f = check_finite_real(frequency, "frequency")
    if f <= 0:
        raise DomainError(f"frequency must be > 0, got {f!r}")
    return propagation_velocity(relative_permittivity) / (4.0 * f)


@dataclass(frozen=True)
class Position:
    """A point in the cavity plane, in meters."""

    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", check_finite_real(self.x, "x"))
        object.__setattr__(self, "y", check_finite_real(self.y, "y"))

    def distance_to(self, other):
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class CavityModel:
    """Rectangular reverberant cavity with uniform wall reflection.

    Parameters
    ----------
    width, height : float
        Cavity extent in meters.
    wall_reflection_coefficient : float
        Amplitude reflection per wall bounce, in [0, 1].
    max_image_order : int
        Highest number of reflections kept by the image-source expansion.
    relative_permittivity : float
        Permittivity of the filling dielectric (silicon: 11.9).
    path_loss_exponent : float
        Amplitude decays as ``distance ** -path_loss_exponent``.  The
        default is 1; 0.5 gives the amplitude law of an ideal 2-D
        cylindrical wave.
    attenuation : float
        Optional in-plane loss in neper per meter (0 keeps the dielectric
        lossless).
    """

    width: float = 10e-3
    height: float = 10e-3
    wall_reflection_coefficient: float = 0.9
    max_image_order: int = 8
    relative_permittivity: float = 11.9
    path_loss_exponent: float = 1.0
    attenuation: float = 0.0

    def __post_init__(self):
        check_positive(self.width, "width")
        check_positive(self.height, "height")
        check_in_range(self.wall_reflection_coefficient,
                       "wall_reflection_coefficient", 0.0, 1.0)
        check_int(self.max_image_order, "max_image_order", minimum=0)
        eps = check_finite_real(self.relative_permittivity, "relative_permittivity")
        if eps < 1:
            raise DomainError(f"relative_permittivity must be >= 1, got {eps!r}")
        check_nonnegative(self.path_loss_exponent, "path_loss_exponent")
        check_nonnegative(self.attenuation, "attenuation")

    @property
    def velocity(self):
        return propagation_velocity(self.relative_permittivity)

    def wavelength(self, frequency=DEFAULT_CARRIER):
        return self.velocity / check_positive(frequency, "frequency")

    def contains(self, pos):
        return 0.0 <= pos.x <= self.width and 0.0 <= pos.y <= self.height


@dataclass(frozen=True)
class MultipathTap:
    """One propagation path: real gain, phase in [0, 2*pi), delay in s."""

    amplitude: float
    phase: float
    delay: float

    def __post_init__(self):
        check_nonnegative(self.amplitude, "amplitude")
        check_in_range(self.phase, "phase", 0.0, 2 * math.pi, high_open=True)
        check_nonnegative(self.delay, "delay")

    @property
    def gain(self):
        return self.amplitude * complex(math.cos(self.phase), math.sin(self.phase))


def _channel_id(samples, sample_rate):
    digest = hashlib.sha1(samples.tobytes())
    digest.update(repr(float(sample_rate)).encode())
    return digest.hexdigest()[:12]


@dataclass(frozen=True, eq=False)
class ChannelImpulseResponse:
    """Discretized channel with optional tap list and geometry.

    Attributes
    ----------
    samples : ndarray of complex
        Read-only baseband FIR taps on the sample grid.
    sample_rate : float
        Hz.
    taps : tuple of MultipathTap
        Continuous-delay taps, sorted by delay.  Empty for trace-only CIRs.
    carrier_frequency : float
        Hz, metadata.
    tx_position, rx_position : Position or None
        Present when the CIR was synthesized.
    """

    samples: np.ndarray
    sample_rate: float
    taps: tuple = ()
    carrier_frequency: float = DEFAULT_CARRIER
    tx_position: Optional[Position] = None
    rx_position: Optional[Position] = None
    channel_id: str = field(default="", compare=False)

    def __post_init__(self):
        samples = frozen(as_complex_vector(self.samples, "samples"))
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", check_positive(self.sample_rate, "sample_rate"))
        object.__setattr__(self, "carrier_frequency",
                           check_nonnegative(self.carrier_frequency, "carrier_frequency"))
        taps = tuple(self.taps)
        if any(b.delay < a.delay for a, b in zip(taps, taps[1:])):
            raise DomainError("taps must be sorted by nondecreasing delay")
        object.__setattr__(self, "taps", taps)
        if not self.channel_id:
            object.__setattr__(self, "channel_id", _channel_id(samples, self.sample_rate))

    def __len__(self):
        return self.samples.size

    @property
    def energy(self):
        return float(np.sum(np.abs(self.samples) ** 2))

    @property
    def norm(self):
        return math.sqrt(self.energy)

    @property
    def times(self):
        return np.arange(self.samples.size) / self.sample_rate

    def require_energy(self):
        if not self.energy > 0:
            raise ZeroEnergyError("channel impulse response has zero energy")
        return self


def image_count(order):
    """Number of image sources with at most `order` reflections in 2-D."""
    order = check_int(order, "order", minimum=0)
    return 1 + 2 * order * (order + 1)


def _image_offsets(source, receiver, size, order):
    # Image coordinate along one axis is (1 - 2a) * s + 2 i W with |2i - a|
    # reflections.  The offset to the receiver is formed as
    # ((1 - 2a) s - r) + 2 i W so that swapping s and r maps the image set
    # onto itself exactly in floating point (reciprocity).
    i = np.arange(-(order // 2) - 1, order // 2 + 2)
    out, counts = [], []
    for a in (0, 1):
        base = (source - receiver) if a == 0 else (-source - receiver)
        n = np.abs(2 * i - a)
        keep = n <= order
        out.append(base + 2.0 * i[keep] * size)
        counts.append(n[keep])
    return np.concatenate(out), np.concatenate(counts)


def synth_cavity_cir(cavity, tx, rx, sample_rate=DEFAULT_SAMPLE_RATE,
                     carrier_frequency=DEFAULT_CARRIER):
    """Synthesize the CIR between two points with the image-source method.

    Every image with at most ``cavity.max_image_order`` wall reflections
    contributes one tap with delay ``d / v_p``, amplitude
    ``r**n * exp(-alpha d) / d**p`` and phase ``-2 pi f_c tau mod 2 pi``.

    Parameters
    ----------
    cavity : CavityModel
    tx, rx : Position
        Must lie inside the cavity and be distinct.
    sample_rate : float, default 480 GHz
    carrier_frequency : float, default 60 GHz

    Returns
    -------
    ChannelImpulseResponse
        Taps sorted by delay plus their nearest-sample discretization.

    Raises
    ------
    DegenerateGeometryError
        If tx and rx coincide or lie outside the cavity.
    """
    sample_rate = check_positive(sample_rate, "sample_rate")
    carrier_frequency = check_positive(carrier_frequency, "carrier_frequency")
    for name, p in (("tx", tx), ("rx", rx)):
        if not cavity.contains(p):
            raise DegenerateGeometryError(f"{name} position {p} lies outside the cavity")
    if tx.x == rx.x and tx.y == rx.y:
        raise DegenerateGeometryError("tx and rx coincide: direct path has zero length")

    order = cavity.max_image_order
    dx, nx = _image_offsets(tx.x, rx.x, cavity.width, order)
    dy, ny = _image_offsets(tx.y, rx.y, cavity.height, order)
    n = nx[:, None] + ny[None, :]
    keep = n <= order
    dist = np.hypot(dx[:, None], dy[None, :])[keep]
    n = n[keep]

    v = cavity.velocity
    delay = dist / v
    amp = cavity.wall_reflection_coefficient ** n / dist ** cavity.path_loss_exponent
    if cavity.attenuation > 0:
        amp = amp * np.exp(-cavity.attenuation * dist)
    phase = np.mod(-2 * np.pi * carrier_frequency * delay, 2 * np.pi)
    phase[phase >= 2 * np.pi] = 0.0

    order_idx = np.lexsort((phase, amp, delay))
    taps = tuple(MultipathTap(float(amp[k]), float(phase[k]), float(delay[k]))
                 for k in order_idx)
    return ChannelImpulseResponse(
        samples=discretize(taps, sample_rate),
        sample_rate=sample_rate,
        taps=taps,
        carrier_frequency=carrier_frequency,
        tx_position=tx,
        rx_position=rx,
    )


def discretize(taps: Sequence[MultipathTap], sample_rate):
    """Deposit taps on the nearest sample of a uniform grid.

    Colliding taps add coherently.  The sampling error on each delay is at
    most half a sample; callers should sample at least 4x the bandwidth of
    the waveforms they push through the result.

    Returns
    -------
    ndarray of complex
        Length ``round(max_delay * sample_rate) + 1``.
    """
    sample_rate = check_positive(sample_rate, "sample_rate")
    taps = list(taps)
    if not taps:
        raise DomainError("cannot discretize an empty tap list")
    delays = np.array([t.delay for t in taps])
    gains = np.array([t.amplitude for t in taps]) * np.exp(1j * np.array([t.phase for t in taps]))
    idx = np.rint(delays * sample_rate).astype(np.int64)
    out = np.zeros(int(idx.max()) + 1, dtype=np.complex128)
    np.add.at(out, idx, gains)
    return out


def rms_delay_spread(cir):
    """Power-weighted RMS delay spread in seconds.

    Uses the continuous tap list when present, otherwise the sampled
    power-delay profile.

    Raises
    ------
    ZeroEnergyError
    """
    if cir.taps:
        p = np.array([t.amplitude for t in cir.taps]) ** 2
        tau = np.array([t.delay for t in cir.taps])
    else:
        p = np.abs(cir.samples) ** 2
        tau = cir.times
    total = p.sum()
    if not total > 0:
        raise ZeroEnergyError("rms delay spread of a zero-energy channel is undefined")
    p = p / total
    mean = np.dot(p, tau)
    return float(math.sqrt(np.dot(p, (tau - mean) ** 2)))


def export_cir_trace(cir, path):
    """Write `cir` as a ``time_s,real,imag`` CSV with 17 significant digits."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for k, s in enumerate(cir.samples):
            w.writerow((f"{k / cir.sample_rate:.17g}", f"{s.real:.17g}", f"{s.imag:.17g}"))


def import_cir_trace(path, format="csv", carrier_frequency=DEFAULT_CARRIER):
    """Read a time-domain CIR trace.

    Parameters
    ----------
    path : str or path-like
    format : {"csv"}
        Trace format tag.  Only the ``time_s,real,imag`` CSV is supported.
    carrier_frequency : float
        Metadata attached to the result.

    Returns
    -------
    ChannelImpulseResponse
        Samples and sample rate populated, no taps.

    Raises
    ------
    EmptyTraceError, MalformedRowError, NonUniformGridError
        Each names the offending line.
    """
    if format != "csv":
        raise DomainError(f"unsupported trace format {format!r}")
    times, values = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        rows = csv.reader(fh)
        header_seen = False
        for lineno, row in enumerate(rows, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if not header_seen and not _looks_numeric(row[0]):
                if tuple(c.strip() for c in row) != TRACE_HEADER:
                    raise MalformedRowError(
                        f"expected header {','.join(TRACE_HEADER)!r}, got {','.join(row)!r}",
                        line=lineno)
                header_seen = True
                continue
            header_seen = True
            if len(row) != 3:
                raise MalformedRowError(f"expected 3 fields, got {len(row)}", line=lineno)
            try:
                t, re_, im = (float(c) for c in row)
            except ValueError:
                raise MalformedRowError(f"non-numeric field in {','.join(row)!r}",
                                        line=lineno) from None
            if not (math.isfinite(t) and math.isfinite(re_) and math.isfinite(im)):
                raise MalformedRowError("non-finite value", line=lineno)
            times.append((t, lineno))
            values.append(complex(re_, im))

    if not values:
        raise EmptyTraceError(f"trace {path!s} contains no samples")
    if len(values) == 1:
        raise TraceParseError("cannot infer a sample rate from a single sample",
                              line=times[0][1])
    t = np.array([tt for tt, _ in times])
    step = (t[-1] - t[0]) / (len(t) - 1)
    if not step > 0:
        raise NonUniformGridError("timestamps are not increasing", line=times[1][1])
    # every timestamp has to sit on the fitted grid to within 1 ppm of a step
    dev = np.abs(np.diff(t) - step)
    bad = np.nonzero(dev > _GRID_TOLERANCE * step)[0]
    if bad.size:
        k = int(bad[0]) + 1
        raise NonUniformGridError(
            f"timestamp {t[k]!r} breaks the uniform grid (step {step!r} s)",
            line=times[k][1])
    return ChannelImpulseResponse(
        samples=np.array(values, dtype=np.complex128),
        sample_rate=1.0 / step,
        carrier_frequency=carrier_frequency,
    )


def _looks_numeric(text):
    try:
        float(text)
    except ValueError:
        return False
    return True
