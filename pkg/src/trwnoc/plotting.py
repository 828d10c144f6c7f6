"""Static SVG rendering of results tables.

Output is byte-deterministic: the SVG id salt is fixed and the creation
date is omitted, so the same table always produces the same file.
"""

import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .exceptions import DomainError  # noqa: E402

__all__ = ["PLOT_KINDS", "emit_plot", "ber_floor"]

PLOT_KINDS = ("ber_rate", "ber_snr", "heatmap", "trace", "probe")
_KIND_BY_EXPERIMENT = {
    "sweep_rate": "ber_rate",
    "sweep_snr": "ber_snr",
    "spatial_map": "heatmap",
    "temporal_focus": "trace",
    "interference_probe": "probe",
}
_RC = {
    "svg.hashsalt": "trwnoc",
    "svg.fonttype": "path",
    "figure.figsize": (6.4, 4.2),
    "font.size": 9,
}


def ber_floor(bers):
    """Decade below the smallest positive BER (at most 1e-6)."""
    pos = [b for b in bers if b is not None and b > 0]
    low = min(pos + [1e-6])
    return 10.0 ** (math.floor(math.log10(low)) - 1)


def _label(scheme, tr, source=None):
    s = f"{scheme.replace('_', '-').upper()} {'TR' if tr else 'non-TR'}"
    return s if source in (None, "montecarlo") else f"{s} ({source})"


def _ber_axes(ax, table, xcol, xlabel, xscale=1.0):
    has_source = "source" in table.columns
    col = {c: table.column(c) for c in table.columns}
    floor = ber_floor(col["ber"])
    keys = []
    for i in range(len(table)):
        key = (col["scheme"][i], col["tr"][i], col["source"][i] if has_source else None)
        if key not in keys:
            keys.append(key)
    for key in keys:
        idx = [i for i in range(len(table))
               if (col["scheme"][i], col["tr"][i],
                   col["source"][i] if has_source else None) == key]
        x = np.array([col[xcol][i] for i in idx], dtype=float) / xscale
        y = np.array([col["ber"][i] for i in idx], dtype=float)
        theory = key[2] not in (None, "montecarlo")
        style = "--" if theory else "-"
        line, = ax.plot(x, np.where(y > 0, y, np.nan), style,
                        marker=None if theory else "o", ms=3, label=_label(*key))
        zero = y <= 0
        if zero.any():
            # zero-error cells sit on the floor with a hollow down-triangle
            ax.plot(x[zero], np.full(zero.sum(), floor), linestyle="none", marker="v",
                    mfc="none", mec=line.get_color(), ms=6)
    ax.set_yscale("log")
    ax.set_ylim(floor / 2, 1.0)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("BER")
    ax.grid(True, which="both", lw=0.3)
    ax.legend(fontsize=6, ncol=2)


def _heatmap(ax, table):
    ix = np.array(table.column("ix"), dtype=int)
    iy = np.array(table.column("iy"), dtype=int)
    rel = np.array([np.nan if v is None else v for v in table.column("relative_db")], dtype=float)
    grid = np.full((ix.max() + 1, iy.max() + 1), np.nan)
    grid[ix, iy] = rel
    xs = np.array(table.column("x_m"), dtype=float) * 1e3
    ys = np.array(table.column("y_m"), dtype=float) * 1e3
    extent = (xs.min(), xs.max(), ys.min(), ys.max())
    im = ax.imshow(grid.T, origin="lower", extent=extent, cmap="viridis",
                   vmin=max(np.nanmin(grid[np.isfinite(grid)]), -40), vmax=0)
    plt.colorbar(im, ax=ax, label="power relative to intended [dB]")
    k = table.column("intended").index(True)
    ax.plot(xs[k], ys[k], marker="x", color="red", ms=8)
    ax.set_xlabel("x [mm]")
    ax.set_ylabel("y [mm]")


def _trace(ax, table):
    t = np.array(table.column("time_s"), dtype=float) * 1e9
    ax.plot(t, table.column("nontr_abs"), lw=0.8, label="non-TR")
    ax.plot(t, table.column("tr_abs"), lw=0.8, label="TR")
    ax.set_xlabel("time [ns]")
    ax.set_ylabel("|y(t)|")
    ax.legend()


def _probe(ax, table):
    d = np.array(table.column("distance_to_rx_m"), dtype=float) * 1e3
    rel = np.array(table.column("relative_db"), dtype=float)
    victim = np.array([r == "victim" for r in table.column("role")])
    ax.plot(d[victim], rel[victim], ".", ms=3, label="victims")
    ax.plot(d[~victim], rel[~victim], "r*", ms=8, label="intended")
    ax.axhline(-10, color="k", lw=0.5, ls=":")
    ax.set_xlabel("distance to intended receiver [mm]")
    ax.set_ylabel("peak power relative to intended [dB]")
    ax.legend()


def emit_plot(table, kind, path):
    """Render `table` to an SVG file at `path`.

    Parameters
    ----------
    table : ResultsTable
    kind : {"auto", "ber_rate", "ber_snr", "heatmap", "trace", "probe"}
        ``"auto"`` picks from the table's experiment column.
    path : str or path-like

    Raises
    ------
    DomainError
        Empty table or unknown kind.  No file is written in that case.
    """
    if table is None or len(table) == 0:
        raise DomainError("cannot plot an empty table")
    if kind == "auto":
        kind = _KIND_BY_EXPERIMENT.get(table.experiment)
    if kind not in PLOT_KINDS:
        raise DomainError(f"unknown plot kind {kind!r}")
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        try:
            if kind == "ber_rate":
                _ber_axes(ax, table, "rate_hz", "data rate [Gb/s]", 1e9)
            elif kind == "ber_snr":
                _ber_axes(ax, table, "snr_db", "SNR [dB]")
            elif kind == "heatmap":
                _heatmap(ax, table)
            elif kind == "trace":
                _trace(ax, table)
            else:
                _probe(ax, table)
            fig.tight_layout()
            tmp = f"{os.fspath(path)}.tmp"
            fig.savefig(tmp, format="svg", metadata={"Date": None})
            os.replace(tmp, path)
        finally:
            plt.close(fig)
    return path
