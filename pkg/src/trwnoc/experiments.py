"""Experiment specifications, the sweep runners and their CSV tables.

A spec file is plain text with one ``section.key = value`` per line.
Values are Python literals (numbers, strings, lists, tuples, booleans,
``None``); ``#`` starts a comment.  An empty file gives the default
setup: a 10 x 10 mm silicon package at 60 GHz, antennas 7.2 mm apart,
16 dB SNR and 1000 bits per point.
"""

import ast
import csv
import enum
import io
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .channel import (
    CavityModel,
    Position,
    rms_delay_spread,
    synth_cavity_cir,
)
from .exceptions import ConfigError, DomainError
from .link import (
    LinkConfig,
    NoiseReference,
    derive_seed,
    run_interference_probe,
    run_trials,
)
from .metrics import (
    binomial_upper_bound,
    extrapolate_ber_curve,
    suppression_ratio_db,
)
from .modem import ModulationScheme
from .trcore import build_tr_filter, convolve, effective_channel, temporal_focusing_gain

__all__ = [
    "SCHEMA_VERSION",
    "RESULT_COLUMNS",
    "ExperimentKind",
    "ExperimentSpec",
    "ResultsTable",
    "parse_config",
    "parse_config_text",
    "serialize_config",
    "build_channel",
    "run_sweep_rate",
    "run_sweep_snr",
    "run_spatial_map",
    "run_temporal_focus",
    "run_probe",
    "run_experiment",
]

SCHEMA_VERSION = 1
# theory curves stop at the first point at or below this level
THEORY_FLOOR = 1e-18
RESULT_COLUMNS = ("schema_version", "experiment", "scheme", "tr", "rate_hz", "snr_db",
                  "n_bits", "n_errors", "ber", "ber_ci_hi", "delta_a", "sigma", "seed")
SNR_COLUMNS = RESULT_COLUMNS + ("source", "stat_sigma")
MAP_COLUMNS = ("schema_version", "experiment", "ix", "iy", "x_m", "y_m", "focus_power",
               "peak_power", "relative_db", "distance_to_rx_m", "intended")
TRACE_COLUMNS = ("schema_version", "experiment", "sample", "time_s", "nontr_abs", "tr_abs")
FOCUS_SUMMARY_COLUMNS = ("schema_version", "experiment", "gain_db", "tr_peak", "nontr_peak",
                         "rms_delay_spread_s", "channel_length")
PROBE_COLUMNS = ("schema_version", "experiment", "x_m", "y_m", "role", "peak_power",
                 "relative_db", "distance_to_rx_m")


class ExperimentKind(enum.Enum):
    SWEEP_RATE = "sweep_rate"
    SWEEP_SNR = "sweep_snr"
    SPATIAL_MAP = "spatial_map"
    TEMPORAL_FOCUS = "temporal_focus"
    INTERFERENCE_PROBE = "interference_probe"


_ALL_SCHEMES = ("cw_ask", "bpsk", "ir_ook", "ir_ppm")


@dataclass(frozen=True)
class ExperimentSpec:
    """Validated experiment description; see `CONFIG_KEYS` for file keys."""

    experiment: ExperimentKind = ExperimentKind.SWEEP_RATE
    master_seed: int = 0
    n_bits: int = 1000
    n_seeds: int = 1
    n_jobs: int = 1
    output_dir: str = "results"
    width: float = 10e-3
    height: float = 10e-3
    reflection: float = 0.9
    max_order: int = 8
    permittivity: float = 11.9
    path_loss_exponent: float = 1.0
    attenuation: float = 0.0
    tx: tuple = (1.4e-3, 5.0e-3)
    rx: tuple = (8.6e-3, 5.0e-3)
    carrier_frequency: float = 60e9
    sample_rate: float = 480e9
    schemes: tuple = _ALL_SCHEMES
    rates: tuple = (1e9, 2e9, 3e9, 5e9, 10e9, 15e9, 20e9, 30e9, 60e9)
    snr_db: float = 16.0
    snr_grid: tuple = (0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0)
    symbol_rate: float = 10e9
    tr_modes: tuple = (True, False)
    noise_reference: str = "received"
    ask_amplitude_ratio: float = 0.5
    ppm_shift_fraction: float = 0.5
    pulse_width: Optional[float] = None
    theory_max_offset_db: float = 40.0
    theory_step_db: float = 1.0
    grid_size: int = 21
    grid_margin: float = 0.5e-3
    map_metric: str = "focus"
    probe_min_separation: float = 0.5

    # ---- derived helpers -------------------------------------------------
    @property
    def cavity(self):
        return CavityModel(self.width, self.height, self.reflection, self.max_order,
                           self.permittivity, self.path_loss_exponent, self.attenuation)

    @property
    def tx_position(self):
        return Position(*self.tx)

    @property
    def rx_position(self):
        return Position(*self.rx)

    @property
    def wavelength(self):
        return self.cavity.wavelength(self.carrier_frequency)

    def scheme(self, kind):
        return ModulationScheme(kind=kind, ask_amplitude_ratio=self.ask_amplitude_ratio,
                                ppm_shift_fraction=self.ppm_shift_fraction,
                                pulse_width=self.pulse_width,
                                carrier_frequency=self.carrier_frequency)

    def grid(self):
        n = self.grid_size
        xs = np.linspace(self.grid_margin, self.width - self.grid_margin, n)
        ys = np.linspace(self.grid_margin, self.height - self.grid_margin, n)
        return xs, ys


def _real(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _v_int(minimum):
    def check(v):
        if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
            return f"expected an integer >= {minimum}"
    return check


def _v_real(low=None, high=None, low_open=False):
    def check(v):
        if not _real(v):
            return "expected a finite number"
        if low is not None and (v <= low if low_open else v < low):
            return f"must be {'>' if low_open else '>='} {low}"
        if high is not None and v > high:
            return f"must be <= {high}"
    return check


def _v_point(v):
    if not (isinstance(v, tuple) and len(v) == 2 and all(_real(c) for c in v)):
        return "expected an (x, y) pair in meters"


def _v_list(item_check, allowed=None):
    def check(v):
        if not isinstance(v, tuple) or not v:
            return "expected a nonempty list"
        for item in v:
            if allowed is not None and item not in allowed:
                return f"unknown entry {item!r}; allowed: {', '.join(map(str, allowed))}"
            msg = item_check(item) if item_check else None
            if msg:
                return f"entry {item!r}: {msg}"
    return check


def _v_choice(*choices):
    def check(v):
        if v not in choices:
            return f"expected one of {', '.join(choices)}"
    return check


def _v_str(v):
    if not isinstance(v, str) or not v:
        return "expected a nonempty string"


def _v_optional_positive(v):
    if v is not None and not (_real(v) and v > 0):
        return "expected None or a positive number"


def _v_bool(v):
    if not isinstance(v, bool):
        return "expected True or False"


# file key -> (spec attribute, validator)
CONFIG_KEYS = {
    "experiment.kind": ("experiment", _v_choice(*(k.value for k in ExperimentKind))),
    "experiment.seed": ("master_seed", _v_int(0)),
    "experiment.n_bits": ("n_bits", _v_int(1)),
    "experiment.n_seeds": ("n_seeds", _v_int(1)),
    "experiment.n_jobs": ("n_jobs", _v_int(1)),
    "experiment.output_dir": ("output_dir", _v_str),
    "cavity.width": ("width", _v_real(0, low_open=True)),
    "cavity.height": ("height", _v_real(0, low_open=True)),
    "cavity.reflection": ("reflection", _v_real(0, 1)),
    "cavity.max_order": ("max_order", _v_int(0)),
    "cavity.permittivity": ("permittivity", _v_real(1)),
    "cavity.path_loss_exponent": ("path_loss_exponent", _v_real(0)),
    "cavity.attenuation": ("attenuation", _v_real(0)),
    "geometry.tx": ("tx", _v_point),
    "geometry.rx": ("rx", _v_point),
    "signal.carrier_frequency": ("carrier_frequency", _v_real(0, low_open=True)),
    "signal.sample_rate": ("sample_rate", _v_real(0, low_open=True)),
    "link.schemes": ("schemes", _v_list(None, _ALL_SCHEMES)),
    "link.rates": ("rates", _v_list(_v_real(0, low_open=True))),
    "link.snr_db": ("snr_db", _v_real()),
    "link.snr_grid": ("snr_grid", _v_list(_v_real())),
    "link.symbol_rate": ("symbol_rate", _v_real(0, low_open=True)),
    "link.tr_modes": ("tr_modes", _v_list(_v_bool)),
    "link.noise_reference": ("noise_reference", _v_choice("received", "transmit")),
    "link.ask_amplitude_ratio": ("ask_amplitude_ratio", _v_real(0, 1, low_open=True)),
    "link.ppm_shift_fraction": ("ppm_shift_fraction", _v_real(0, 1, low_open=True)),
    "link.pulse_width": ("pulse_width", _v_optional_positive),
    "link.theory_max_offset_db": ("theory_max_offset_db", _v_real(0, low_open=True)),
    "link.theory_step_db": ("theory_step_db", _v_real(0, low_open=True)),
    "map.grid_size": ("grid_size", _v_int(2)),
    "map.margin": ("grid_margin", _v_real(0)),
    "map.metric": ("map_metric", _v_choice("focus", "peak")),
    "probe.min_separation_wavelengths": ("probe_min_separation", _v_real(0)),
}
_ATTR_TO_KEY = {attr: key for key, (attr, _) in CONFIG_KEYS.items()}


def _normalize(value):
    if isinstance(value, list):
        value = tuple(value)
    if isinstance(value, tuple):
        return tuple(_normalize(v) for v in value)
    return value


def _coerce(attr, value):
    # integral literals are fine where floats are expected
    default = getattr(ExperimentSpec, attr, None)
    if isinstance(default, float) and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if attr in ("rates", "snr_grid", "tx", "rx") and isinstance(value, tuple):
        return tuple(float(v) if _real(v) else v for v in value)
    return value


def _check_spec(spec, lines=None):
    """Cross-field checks that need the whole spec."""
    lines = lines or {}

    def fail(attr, msg):
        key = _ATTR_TO_KEY[attr]
        raise ConfigError(msg, key=key, line=lines.get(key))

    for attr in ("tx", "rx"):
        x, y = getattr(spec, attr)
        if not (0 <= x <= spec.width and 0 <= y <= spec.height):
            fail(attr, f"position {(x, y)} lies outside the {spec.width} x {spec.height} m cavity")
    if tuple(spec.tx) == tuple(spec.rx):
        fail("rx", "tx and rx coincide")
    for r in spec.rates:
        if abs(spec.sample_rate / r - round(spec.sample_rate / r)) > 1e-9 * spec.sample_rate / r:
            fail("rates", f"rate {r!r} Hz does not divide the sample rate {spec.sample_rate!r} Hz")
        if spec.sample_rate / r < 2 - 1e-9:
            fail("rates", f"rate {r!r} Hz leaves fewer than 2 samples per symbol")
    sr = spec.sample_rate / spec.symbol_rate
    if abs(sr - round(sr)) > 1e-9 * sr or sr < 2 - 1e-9:
        fail("symbol_rate", "symbol rate must divide the sample rate with >= 2 samples per symbol")
    if 2 * spec.grid_margin >= min(spec.width, spec.height):
        fail("grid_margin", "grid margin leaves no room inside the cavity")
    if len(set(spec.schemes)) != len(spec.schemes):
        fail("schemes", "duplicate scheme")
    try:
        spec.cavity
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def parse_config_text(text, origin="<string>"):
    """Parse spec text; see the module docstring for the format."""
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'section.key = value' in {origin}", line=lineno)
        key, _, value_text = line.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError("unknown key", key=key, line=lineno)
        if key in lines:
            raise ConfigError("key given twice", key=key, line=lineno)
        value_text = value_text.strip()
        try:
            value = ast.literal_eval(value_text)
        except (ValueError, SyntaxError):
            value = value_text
        attr, check = CONFIG_KEYS[key]
        value = _coerce(attr, _normalize(value))
        msg = check(value)
        if msg:
            raise ConfigError(f"{msg}, got {value_text!r}", key=key, line=lineno)
        values[attr] = value
        lines[key] = lineno
    if "experiment" in values:
        values["experiment"] = ExperimentKind(values["experiment"])
    spec = ExperimentSpec(**values)
    _check_spec(spec, lines)
    return spec


def _strip_comment(raw):
    quote = None
    for i, ch in enumerate(raw):
        if quote:
            if ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
        elif ch == "#":
            return raw[:i].strip()
    return raw.strip()


def parse_config(path):
    """Read and validate an experiment spec file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!s}: {exc.strerror}") from None
    return parse_config_text(text, origin=str(path))


def serialize_config(spec):
    """Render `spec` in the file format; `parse_config_text` inverts it."""
    out = []
    for key, (attr, _) in CONFIG_KEYS.items():
        value = getattr(spec, attr)
        if isinstance(value, ExperimentKind):
            value = value.value
        out.append(f"{key} = {value!r}")
    return "\n".join(out) + "\n"


class ResultsTable:
    """Ordered rows under a fixed column list, written as CSV."""

    def __init__(self, experiment, columns, rows=None, name="results"):
        self.experiment = experiment
        self.columns = tuple(columns)
        self.rows = list(rows or [])
        self.name = name
        self.extras = {}

    def __len__(self):
        return len(self.rows)

    def append(self, **values):
        values.setdefault("schema_version", SCHEMA_VERSION)
        values.setdefault("experiment", self.experiment)
        missing = set(self.columns) - set(values)
        unknown = set(values) - set(self.columns)
        if missing or unknown:
            raise DomainError(f"row mismatch: missing {sorted(missing)}, unknown {sorted(unknown)}")
        self.rows.append(tuple(values[c] for c in self.columns))

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def to_csv_text(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(self.to_csv_text())

    @classmethod
    def read_csv(cls, path):
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DomainError(f"{path!s} is empty") from None
            rows = [tuple(_parse_cell(c) for c in r) for r in reader if r]
        if "schema_version" not in header or "experiment" not in header:
            raise DomainError(f"{path!s} is not a results table")
        exp = rows[0][header.index("experiment")] if rows else ""
        return cls(exp, header, rows)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def _parse_cell(text):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


# ---- runners ---------------------------------------------------------------

def build_channel(spec, rx=None):
    """Default-geometry CIR for `spec` (or towards another receiver)."""
    return synth_cavity_cir(spec.cavity, spec.tx_position,
                            spec.rx_position if rx is None else rx,
                            sample_rate=spec.sample_rate,
                            carrier_frequency=spec.carrier_frequency)


def _configs(spec, channel, kind, rate, snr, tr, seeds):
    scheme = spec.scheme(kind)
    return [LinkConfig(scheme, rate, snr, spec.n_bits, tr, s, channel,
                       noise_reference=NoiseReference(spec.noise_reference)) for s in seeds]


def _pool(results):
    n = sum(r.n_bits for r in results)
    e = sum(r.n_errors for r in results)
    return {
        "n_bits": n,
        "n_errors": e,
        "ber": e / n,
        "ber_ci_hi": binomial_upper_bound(e, n),
        "delta_a": float(np.mean([r.delta_a for r in results])),
        "sigma": float(np.mean([r.noise_sigma for r in results])),
        "stat_sigma": float(np.mean([r.stat_sigma for r in results])),
    }


def run_sweep_rate(spec, channel=None):
    """BER versus symbol rate for every scheme, with and without TR.

    TR and non-TR cells at the same scheme and rate share their seeds, so
    both arms see the same bits and noise draws.
    """
    channel = build_channel(spec) if channel is None else channel
    table = ResultsTable(ExperimentKind.SWEEP_RATE.value, RESULT_COLUMNS, name="sweep_rate")
    cells, jobs = [], []
    for i, kind in enumerate(spec.schemes):
        for j, rate in enumerate(spec.rates):
            seeds = [derive_seed(spec.master_seed, i, j, s) for s in range(spec.n_seeds)]
            for tr in spec.tr_modes:
                cells.append((kind, rate, tr, len(jobs), len(seeds)))
                jobs.extend(_configs(spec, channel, kind, rate, spec.snr_db, tr, seeds))
    results = run_trials(jobs, n_jobs=spec.n_jobs)
    for kind, rate, tr, start, n in cells:
        pooled = _pool(results[start:start + n])
        pooled.pop("stat_sigma")
        table.append(scheme=kind, tr=tr, rate_hz=float(rate), snr_db=float(spec.snr_db),
                     seed=spec.master_seed, **pooled)
    return table


def run_sweep_snr(spec, channel=None):
    """BER versus SNR plus closed-form extrapolation below 1e-3.

    Monte-Carlo rows come first for each scheme and TR mode.  The theory
    rows are anchored on the highest-SNR Monte-Carlo point whose BER is at
    least 1e-3 (the lowest SNR if none qualifies) and step the transmit
    power up at fixed noise until they pass `THEORY_FLOOR`.  ``sigma``
    there is the per-sample noise of the anchor and ``stat_sigma`` the
    decision-statistic spread that the formulas use.
    """
    channel = build_channel(spec) if channel is None else channel
    table = ResultsTable(ExperimentKind.SWEEP_SNR.value, SNR_COLUMNS, name="sweep_snr")
    snrs = sorted(spec.snr_grid)
    cells, jobs = [], []
    for i, kind in enumerate(spec.schemes):
        seeds = [derive_seed(spec.master_seed, i, s) for s in range(spec.n_seeds)]
        for tr in spec.tr_modes:
            for snr in snrs:
                cells.append((kind, tr, snr, len(jobs), len(seeds)))
                jobs.extend(_configs(spec, channel, kind, spec.symbol_rate, snr, tr, seeds))
    results = run_trials(jobs, n_jobs=spec.n_jobs)

    n_offsets = int(math.floor(spec.theory_max_offset_db / spec.theory_step_db + 1e-9))
    offsets = [k * spec.theory_step_db for k in range(n_offsets + 1)]
    groups = {}
    for kind, tr, snr, start, n in cells:
        groups.setdefault((kind, tr), []).append((snr, _pool(results[start:start + n])))
    for (kind, tr), points in groups.items():
        common = dict(scheme=kind, tr=tr, rate_hz=float(spec.symbol_rate), seed=spec.master_seed)
        for snr, p in points:
            table.append(source="montecarlo", snr_db=float(snr), **common, **p)
        anchor = _anchor(points)
        if anchor is None:
            continue
        snr0, p = anchor
        for formula, source in (("cluster", "theory-cluster"), ("midpoint", "theory-midpoint")):
            curve = extrapolate_ber_curve(p["delta_a"], p["stat_sigma"], offsets,
                                          ref_snr_db=snr0, formula=formula)
            for off, (snr, ber) in zip(offsets, curve):
                if ber <= 0.0:
                    break
                table.append(source=source, snr_db=float(snr), n_bits=p["n_bits"], n_errors=None,
                             ber=float(ber), ber_ci_hi=None,
                             delta_a=p["delta_a"] * 10.0 ** (off / 20.0), sigma=p["sigma"],
                             stat_sigma=p["stat_sigma"], **common)
                if ber <= THEORY_FLOOR:
                    break
    return table


def _anchor(points):
    usable = [(s, p) for s, p in points
              if math.isfinite(p["delta_a"]) and math.isfinite(p["stat_sigma"])
              and p["stat_sigma"] > 0]
    if not usable:
        return None
    above = [(s, p) for s, p in usable if p["ber"] >= 1e-3]
    return max(above, key=lambda sp: sp[0]) if above else min(usable, key=lambda sp: sp[0])


@dataclass(frozen=True, eq=False)
class SpatialMap:
    """Received power over a receiver grid for a filter fixed at rx.

    ``focus_power`` is |y|^2 at the instant the intended receiver focuses;
    ``peak_power`` is the maximum over time.  The transmitter's own grid
    point, if any, is NaN.
    """

    xs: np.ndarray
    ys: np.ndarray
    focus_power: np.ndarray
    peak_power: np.ndarray
    intended_index: tuple
    wavelength: float
    rx: tuple

    def power(self, metric="focus"):
        return self.focus_power if metric == "focus" else self.peak_power

    def distance_to(self, point):
        X, Y = np.meshgrid(self.xs, self.ys, indexing="ij")
        return np.hypot(X - point[0], Y - point[1])

    def suppression_db(self, metric="focus", min_separation=0.5, exclude=()):
        """Intended power over the strongest position at least
        `min_separation` wavelengths away from rx (and from each `exclude`
        point)."""
        p = self.power(metric)
        far = self.distance_to(self.rx) >= min_separation * self.wavelength
        for pt in exclude:
            far &= self.distance_to(pt) >= min_separation * self.wavelength
        victims = p[far & np.isfinite(p)]
        return suppression_ratio_db(p[self.intended_index], victims)


def _grid_positions(spec):
    xs, ys = spec.grid()
    rx = spec.rx
    # snap the grid node nearest to rx onto rx itself so the intended CIR
    # is reproduced exactly rather than to rounding
    ix = int(np.argmin(np.abs(xs - rx[0])))
    iy = int(np.argmin(np.abs(ys - rx[1])))
    tol = 1e-9
    if abs(xs[ix] - rx[0]) <= tol and abs(ys[iy] - rx[1]) <= tol:
        xs = xs.copy()
        ys = ys.copy()
        xs[ix], ys[iy] = rx
    else:
        raise ConfigError("the receiver grid must contain the rx position", key="geometry.rx")
    return xs, ys, (ix, iy)


def compute_spatial_map(spec):
    xs, ys, intended = _grid_positions(spec)
    h_rx = build_channel(spec)
    f = build_tr_filter(h_rx).coefficients
    instant = h_rx.samples.size - 1
    focus = np.full((xs.size, ys.size), np.nan)
    peak = np.full_like(focus, np.nan)
    tx = spec.tx
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            if abs(x - tx[0]) <= 1e-12 and abs(y - tx[1]) <= 1e-12:
                continue
            cir = h_rx if (i, j) == intended else build_channel(spec, Position(x, y))
            out = convolve(cir.samples, f)
            p = out.real ** 2 + out.imag ** 2
            focus[i, j] = p[instant] if instant < p.size else 0.0
            peak[i, j] = p.max()
    return SpatialMap(xs, ys, focus, peak, intended, spec.wavelength, tuple(spec.rx))


def run_spatial_map(spec):
    """Grid map of TR power with the filter matched to rx.

    Returns the `ResultsTable`; the `SpatialMap` is attached as
    ``table.extras["map"]`` and the headline suppression ratio as
    ``table.extras["suppression_db"]``.
    """
    smap = compute_spatial_map(spec)
    table = ResultsTable(ExperimentKind.SPATIAL_MAP.value, MAP_COLUMNS, name="spatial_map")
    ref = smap.power(spec.map_metric)[smap.intended_index]
    d = smap.distance_to(smap.rx)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = 10 * np.log10(smap.power(spec.map_metric) / ref)
    for i, x in enumerate(smap.xs):
        for j, y in enumerate(smap.ys):
            table.append(ix=i, iy=j, x_m=float(x), y_m=float(y),
                         focus_power=float(smap.focus_power[i, j]),
                         peak_power=float(smap.peak_power[i, j]),
                         relative_db=float(rel[i, j]), distance_to_rx_m=float(d[i, j]),
                         intended=(i, j) == smap.intended_index)
    table.extras["map"] = smap
    table.extras["metric"] = spec.map_metric
    table.extras["suppression_db"] = smap.suppression_db(spec.map_metric,
                                                         spec.probe_min_separation)
    return table


def run_temporal_focus(spec, channel=None):
    """|y(t)| for a unit-energy impulse sent with and without TR.

    Both traces start at the first channel sample.  The summary table is
    attached as ``table.extras["summary"]``.
    """
    cir = build_channel(spec) if channel is None else channel
    g = effective_channel(cir)
    h = np.zeros(g.size, dtype=complex)
    h[:cir.samples.size] = cir.samples
    table = ResultsTable(ExperimentKind.TEMPORAL_FOCUS.value, TRACE_COLUMNS, name="temporal_focus")
    for k in range(g.size):
        table.append(sample=k, time_s=k / cir.sample_rate, nontr_abs=float(abs(h[k])),
                     tr_abs=float(abs(g[k])))
    summary = ResultsTable(ExperimentKind.TEMPORAL_FOCUS.value, FOCUS_SUMMARY_COLUMNS,
                           name="temporal_focus_summary")
    summary.append(gain_db=temporal_focusing_gain(cir), tr_peak=float(np.abs(g).max()),
                   nontr_peak=float(np.abs(h).max()),
                   rms_delay_spread_s=rms_delay_spread(cir), channel_length=cir.samples.size)
    table.extras["summary"] = summary
    return table


def run_probe(spec):
    """Interference probe over the receiver grid.

    Victims are grid points at least ``probe_min_separation`` wavelengths
    from both the intended receiver and the transmitter; points inside the
    transmitter's near field are left out because the filter's energy
    passes there before any focusing happens.
    """
    xs, ys, intended = _grid_positions(spec)
    h_rx = build_channel(spec)
    lam = spec.wavelength
    victims, where = [], []
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            if (i, j) == intended:
                continue
            d_rx = math.hypot(x - spec.rx[0], y - spec.rx[1])
            d_tx = math.hypot(x - spec.tx[0], y - spec.tx[1])
            if min(d_rx, d_tx) < spec.probe_min_separation * lam:
                continue
            victims.append(build_channel(spec, Position(x, y)))
            where.append((x, y, d_rx))
    cfg = LinkConfig(spec.scheme("ir_ook"), spec.symbol_rate, spec.snr_db, 1, True,
                     spec.master_seed, h_rx)
    probe = run_interference_probe(cfg, victims, metric="peak")
    table = ResultsTable(ExperimentKind.INTERFERENCE_PROBE.value, PROBE_COLUMNS,
                         name="interference_probe")
    table.append(x_m=float(spec.rx[0]), y_m=float(spec.rx[1]), role="intended",
                 peak_power=probe.intended_power, relative_db=0.0, distance_to_rx_m=0.0)
    for (x, y, d), p in zip(where, probe.victim_powers):
        table.append(x_m=float(x), y_m=float(y), role="victim", peak_power=float(p),
                     relative_db=10 * math.log10(p / probe.intended_power) if p > 0 else -math.inf,
                     distance_to_rx_m=d)
    table.extras["probe"] = probe
    table.extras["suppression_db"] = probe.suppression_db
    return table


_RUNNERS = {
    ExperimentKind.SWEEP_RATE: run_sweep_rate,
    ExperimentKind.SWEEP_SNR: run_sweep_snr,
    ExperimentKind.SPATIAL_MAP: run_spatial_map,
    ExperimentKind.TEMPORAL_FOCUS: run_temporal_focus,
    ExperimentKind.INTERFERENCE_PROBE: run_probe,
}


def run_experiment(spec, kind=None):
    """Dispatch to the runner for `kind` (default: ``spec.experiment``)."""
    kind = spec.experiment if kind is None else ExperimentKind(kind)
    if kind is not spec.experiment:
        spec = replace(spec, experiment=kind)
    return _RUNNERS[kind](spec)
