"""Matplotlib figures and delimited tables for the CLI ``report`` path.

Only the CLI imports this module, so the library itself does not depend on
matplotlib being importable.  Figures are rendered with the Agg backend and
saved without the ``Software`` metadata entry so that output files depend
only on their inputs.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_PNG_META = {"Software": None}


def write_delimited(path, header: Sequence[str], rows: Iterable[Sequence], delimiter: str = ",") -> Path:
    """Write ``rows`` under ``header``; the delimiter is ',' for .csv and a tab for .tsv."""
    path = Path(path)
    if path.suffix == ".tsv":
        delimiter = "\t"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def fractal_figure(img, path, title: str | None = None) -> Path:
    """Scatter the support of the simple characters (weight across, highest weight down).

    Parameters
    ----------
    img : FractalImage
        Output of :func:`perfgroups.sl2.perfect.fractal`.
    path : path-like
        Destination; the format follows the file suffix.
    """
    pts = sorted(img.points)
    cell = float(img.p) ** -img.depth
    w = np.array([float(b) for _, b in pts])
    n = np.array([float(a) for a, _ in pts])
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.scatter(w, n, s=max(1.0, 180.0 / (img.max_n / cell + 1)), marker="s", c="k", linewidths=0)
    ax.set_xlim(-img.max_n - cell, img.max_n + cell)
    ax.set_ylim(img.max_n + cell, -cell)
    ax.set_aspect("equal")
    ax.set_xlabel("weight")
    ax.set_ylabel("highest weight n")
    ax.set_title(title or f"Characters of simple modules, p = {img.p}")
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=_PNG_META)
    plt.close(fig)
    return Path(path)


def decomposition_figure(table, path) -> Path:
    """Heat map of the classical decomposition matrix ``[nabla(lam):L(mu)]``."""
    size = table.lam_max + 1
    M = np.zeros((size, size))
    for (lam, mu), m in table.entries.items():
        M[lam, mu] = m
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.imshow(M, cmap="Greys", origin="upper", interpolation="nearest", vmin=0, vmax=max(1, M.max()))
    ax.set_xlabel("mu")
    ax.set_ylabel("lambda")
    ax.set_title(f"Decomposition numbers, p = {table.p}")
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=_PNG_META)
    plt.close(fig)
    return Path(path)


def iso_grid_figure(rows, path) -> Path:
    """Grid of SL_n vs PGL_n verdicts; ``rows`` are ``(n, p, status)`` triples."""
    ns = sorted({r[0] for r in rows})
    ps = sorted({r[1] for r in rows})
    code = {"Isomorphic": 1.0, "NotIsomorphic": 0.0, "Unknown": 0.5}
    M = np.full((len(ps), len(ns)), np.nan)
    for n, p, status in rows:
        M[ps.index(p), ns.index(n)] = code[status]
    fig, ax = plt.subplots(figsize=(1 + 0.6 * len(ns), 1 + 0.6 * len(ps)))
    ax.imshow(M, cmap="RdYlGn", vmin=0, vmax=1)
    ax.set_xticks(range(len(ns)), [str(n) for n in ns])
    ax.set_yticks(range(len(ps)), [str(p) for p in ps])
    ax.set_xlabel("n")
    ax.set_ylabel("p")
    ax.set_title("SL_n vs PGL_n over Z[1/p]")
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=_PNG_META)
    plt.close(fig)
    return Path(path)
