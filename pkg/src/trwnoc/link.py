"""End-to-end Monte-Carlo link engine.

One trial runs modulate -> [TR precode] -> channel -> synchronize -> AWGN
-> detect and counts bit errors.  Trials are pure functions of their
configuration, so they can run in any order or in parallel.
"""

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._validation import check_int, check_positive, frozen
from .channel import ChannelImpulseResponse
from .exceptions import DomainError, SampleRateMismatchError, ZeroEnergyError
from .metrics import suppression_ratio_db
from .modem import ModulationScheme, Waveform, demodulate, modulate
from .trcore import build_tr_filter, convolve

__all__ = [
    "NoiseReference",
    "NoiseSpec",
    "LinkConfig",
    "BerResult",
    "ProbeResult",
    "derive_seed",
    "add_awgn",
    "noise_sigma",
    "run_trial",
    "run_trials",
    "run_interference_probe",
]


class NoiseReference(enum.Enum):
    """Which signal power the SNR label refers to."""

    RECEIVED_SIGNAL_POWER = "received"
    TRANSMIT_SIGNAL_POWER = "transmit"


@dataclass(frozen=True)
class NoiseSpec:
    """Complex AWGN with per-sample standard deviation `sigma` (0 = off)."""

    sigma: float
    reference: NoiseReference = NoiseReference.RECEIVED_SIGNAL_POWER


def derive_seed(master_seed, *index):
    """Deterministic 64-bit seed for trial `index` under `master_seed`."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(i) for i in index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def noise_sigma(signal_power, snr_db):
    """Per-sample noise std for a given signal power and SNR in dB."""
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    return math.sqrt(signal_power / 10.0 ** (snr_db / 10.0))


def _complex_noise(rng, n, sigma):
    # Draw (n, 2) so a longer draw starts with the same noise as a shorter one.
    z = rng.standard_normal((n, 2))
    return sigma * (z[:, 0] + 1j * z[:, 1]) / math.sqrt(2.0)


def add_awgn(waveform, snr_db, seed, signal_power=None,
             reference=NoiseReference.RECEIVED_SIGNAL_POWER):
    """Add circularly symmetric white Gaussian noise at a given SNR.

    Parameters
    ----------
    waveform : Waveform
    snr_db : float
        ``math.inf`` returns the input unchanged.
    seed : int or numpy.random.Generator
    signal_power : float, optional
        Power the SNR refers to.  Defaults to the mean sample power of
        `waveform`.
    reference : NoiseReference
        Recorded in the returned spec.

    Returns
    -------
    (Waveform, NoiseSpec)
    """
    snr_db = float(snr_db)
    if math.isnan(snr_db) or snr_db == -math.inf:
        raise DomainError(f"snr_db must be a number or +inf, got {snr_db!r}")
    p = waveform.power if signal_power is None else check_positive(signal_power, "signal_power")
    if not p > 0:
        raise ZeroEnergyError("cannot set an SNR on a zero-power waveform")
    if snr_db == math.inf:
        return waveform, NoiseSpec(0.0, reference)
    sigma = noise_sigma(p, snr_db)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    noisy = waveform.samples + _complex_noise(rng, waveform.samples.size, sigma)
    return Waveform(noisy, waveform.sample_rate, waveform.carrier_frequency), NoiseSpec(sigma, reference)


@dataclass(frozen=True, eq=False)
class LinkConfig:
    """Everything one Monte-Carlo trial depends on.

    Parameters
    ----------
    scheme : ModulationScheme
    symbol_rate : float
        Hz; must divide the channel sample rate.
    snr_db : float
    n_bits : int
        Counted bits; transient guard symbols are added on both sides.
    tr_enabled : bool
    seed : int
    channel : ChannelImpulseResponse
    interferer_positions : sequence of Position
        Carried for reporting; not used by `run_trial`.
    noise_reference : NoiseReference
    """

    scheme: ModulationScheme
    symbol_rate: float
    snr_db: float
    n_bits: int
    tr_enabled: bool
    seed: int
    channel: ChannelImpulseResponse
    interferer_positions: Sequence = ()
    noise_reference: NoiseReference = NoiseReference.RECEIVED_SIGNAL_POWER

    def __post_init__(self):
        check_positive(self.symbol_rate, "symbol_rate")
        check_int(self.n_bits, "n_bits", minimum=1)
        check_int(self.seed, "seed", minimum=0)
        if not (isinstance(self.snr_db, (int, float)) and not math.isnan(self.snr_db)):
            raise DomainError(f"snr_db must be a number, got {self.snr_db!r}")
        object.__setattr__(self, "noise_reference", NoiseReference(self.noise_reference))


@dataclass(frozen=True)
class BerResult:
    """Outcome of one trial.

    Attributes
    ----------
    n_bits, n_errors : int
    ber : float
        ``n_errors / n_bits``.
    delta_a : float
        Distance between the mean decision statistic of transmitted
        1-bits and 0-bits.
    noise_sigma : float
        Per-sample AWGN standard deviation.
    seed : int
    stat_sigma : float
        Pooled within-class standard deviation of the decision statistic.
    """

    n_bits: int
    n_errors: int
    ber: float
    delta_a: float
    noise_sigma: float
    seed: int
    stat_sigma: float = float("nan")


def _prepare(config):
    h = config.channel.samples
    if config.tr_enabled:
        f = build_tr_filter(config.channel).coefficients
        g = convolve(h, f)
    else:
        f, g = None, h
    return f, g


def run_trial(config):
    """Run one Monte-Carlo trial; see the module docstring for the chain.

    The receiver is genie-synchronized to the peak of the effective channel
    (``h`` without TR, ``h * f_TR`` with it) in both delay and carrier
    phase.  Noise is added after that rotation, which leaves its statistics
    unchanged.  ``ceil(len(g) / sps)`` guard symbols on each side absorb the
    channel transient and are not counted.
    """
    fs = config.channel.sample_rate
    scheme = config.scheme
    sps = scheme.samples_per_symbol_for(config.symbol_rate, fs)
    f, g = _prepare(config)
    g_abs = np.abs(g)
    lag = int(np.argmax(g_abs))
    if not g_abs[lag] > 0:
        raise ZeroEnergyError("channel has zero energy")
    rotation = np.conj(g[lag]) / g_abs[lag]
    guard = -(-g.size // sps)

    rng = np.random.default_rng(config.seed)
    n_sym = config.n_bits + 2 * guard
    bits = rng.integers(0, 2, n_sym).astype(np.int8)
    tx = modulate(bits, scheme, config.symbol_rate, fs)
    x = tx.samples if f is None else convolve(f, tx.samples)
    y = convolve(config.channel.samples, x)[lag:lag + n_sym * sps] * rotation

    if config.noise_reference is NoiseReference.RECEIVED_SIGNAL_POWER:
        p_ref = float(np.mean(y.real ** 2 + y.imag ** 2))
    else:
        p_ref = tx.power
    sigma = noise_sigma(p_ref, config.snr_db)
    if sigma > 0:
        y = y + _complex_noise(rng, y.size, sigma)

    counted = slice(guard, n_sym - guard)
    demod = demodulate(Waveform(y, fs, tx.carrier_frequency), scheme, n_sym,
                       config.symbol_rate, reference=0.0, fit_slice=counted)
    sent, got, stats = bits[counted], demod.bits[counted], demod.statistics[counted]
    n_err = int(np.count_nonzero(sent != got))
    delta_a, stat_sigma = _labelled_spread(stats, sent)
    return BerResult(n_bits=config.n_bits, n_errors=n_err, ber=n_err / config.n_bits,
                     delta_a=delta_a, noise_sigma=sigma, seed=config.seed,
                     stat_sigma=stat_sigma)


def _labelled_spread(stats, bits):
    ones, zeros = stats[bits == 1], stats[bits == 0]
    if ones.size == 0 or zeros.size == 0:
        return float("nan"), float("nan")
    delta_a = abs(float(ones.mean() - zeros.mean()))
    dof = ones.size + zeros.size - 2
    if dof <= 0:
        return delta_a, float("nan")
    pooled = (((ones - ones.mean()) ** 2).sum() + ((zeros - zeros.mean()) ** 2).sum()) / dof
    return delta_a, float(math.sqrt(pooled))


def run_trials(configs, n_jobs=1):
    """Run several trials, optionally in worker processes.

    Results come back in input order and do not depend on `n_jobs`.
    """
    configs = list(configs)
    n_jobs = check_int(n_jobs, "n_jobs", minimum=1)
    if n_jobs == 1 or len(configs) < 2:
        return [run_trial(c) for c in configs]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(run_trial, configs))


@dataclass(frozen=True, eq=False)
class ProbeResult:
    """Received power at the intended receiver and at each victim.

    Attributes
    ----------
    intended_power : float
    victim_powers : ndarray
    metric : str
        ``"peak"`` (maximum of |y|^2 over time) or ``"focus"`` (|y|^2 at the
        intended focusing instant).
    """

    intended_power: float
    victim_powers: np.ndarray
    metric: str = "peak"

    @property
    def suppression_db(self):
        return suppression_ratio_db(self.intended_power, self.victim_powers)


def _probe_power(y, metric, instant):
    if metric == "peak":
        return float(np.max(y.real ** 2 + y.imag ** 2))
    return float(abs(y[instant]) ** 2) if instant < y.size else 0.0


def run_interference_probe(config, victim_cirs, metric="peak"):
    """Send one TR-precoded unit impulse and measure who receives it.

    Parameters
    ----------
    config : LinkConfig
        `channel` is the intended CIR; `tr_enabled` must be true.
    victim_cirs : sequence of ChannelImpulseResponse
    metric : {"peak", "focus"}

    Returns
    -------
    ProbeResult
    """
    if not config.tr_enabled:
        raise DomainError("the interference probe needs tr_enabled=True")
    victim_cirs = list(victim_cirs)
    if not victim_cirs:
        raise DomainError("victim list is empty")
    if metric not in ("peak", "focus"):
        raise DomainError(f"unknown probe metric {metric!r}")
    f = build_tr_filter(config.channel).coefficients
    instant = config.channel.samples.size - 1
    intended = _probe_power(convolve(config.channel.samples, f), metric, instant)
    victims = []
    for cir in victim_cirs:
        if not math.isclose(cir.sample_rate, config.channel.sample_rate, rel_tol=1e-12):
            raise SampleRateMismatchError("victim CIR sample rate differs from the intended CIR")
        victims.append(_probe_power(convolve(cir.samples, f), metric, instant))
    return ProbeResult(intended, frozen(np.array(victims)), metric)
