"""Figures written next to the report: lattice region, Newton vs Hodge, a-number curves.

Figures are built on ``matplotlib.figure.Figure`` with the Agg canvas, so no
global pyplot state is touched and worker threads can draw independently.
"""
from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .profile import TowerProfile, hodge_eta, mu, support_bound

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
}
LATTICE_POINT_LIMIT = 60_000


def _new(width: float = 5.0, height: float = 3.6, ncols: int = 1):
    import matplotlib as mpl

    with mpl.rc_context(STYLE):
        fig = Figure(figsize=(width, height), dpi=120)
        FigureCanvasAgg(fig)
        axes = fig.subplots(1, ncols)
    return fig, axes


def _save(fig: Figure, path: Path) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    # drop the software tag so repeated runs give identical files
    fig.savefig(path, metadata={"Software": None})
    return str(path)


def plot_lattice(prof: TowerProfile, n: int, t: int, path: Path) -> Optional[str]:
    """Lattice points {(i, j) : mu_i <= j < p^n}, with the part counted beyond the cutoff t highlighted."""
    pn = prof.p ** n
    top = support_bound(prof, n)
    if top * pn > LATTICE_POINT_LIMIT * 4:
        return None
    cols = [(i, mu(prof, i)) for i in range(1, top + 1)]
    npts = sum(pn - m for _, m in cols)
    fig, ax = _new()
    if npts <= LATTICE_POINT_LIMIT:
        for right in (False, True):
            xs, ys = [], []
            for i, m in cols:
                if (i > t) == right:
                    xs.extend([i] * (pn - m))
                    ys.extend(range(m, pn))
            ax.scatter(xs, ys, s=2 if npts > 2000 else 6, marker="s", linewidths=0,
                       color="tab:blue" if right else "0.75",
                       label=f"counted, i > {t}" if right else f"triangle side, i <= {t}")
    else:
        ax.fill_between([i for i, _ in cols], [m for _, m in cols], pn, step="mid", color="0.8")
    ax.plot([i for i, _ in cols], [m for _, m in cols], color="k", lw=0.8, drawstyle="steps-mid", label="mu_i")
    ax.plot([0, top], [0, (prof.p + 1) * top / prof.d], color="tab:red", lw=0.7, ls="--", label="(p+1) i / d")
    ax.axvline(t + 0.5, color="tab:green", lw=1.0, label=f"cutoff t = {t}")
    ax.set_xlim(0, top + 1)
    ax.set_ylim(0, pn)
    ax.set_xlabel("i")
    ax.set_ylabel("j")
    ax.set_title(f"Delta_{n} for p={prof.p}, d={prof.d}")
    ax.legend(loc="lower right")
    return _save(fig, path)


def plot_polygons(points: Sequence[Tuple[int, Fraction]], vertices: Sequence[Tuple[int, Fraction]],
                  prof: TowerProfile, trust: Fraction, path: Path) -> str:
    """Certified Newton points and vertices against HP(d), with the trust line."""
    fig, ax = _new()
    upto = max([m for m, _ in points] + [1])
    hx = list(range(upto + 1))
    ax.plot(hx, [float(hodge_eta(prof, m)) for m in hx], color="tab:red", lw=1.0, ls="--", label=f"HP({prof.d})")
    ax.plot([m for m, _ in vertices], [float(v) for _, v in vertices], color="tab:blue", lw=1.2, marker="o",
            ms=4, label="NP (certified)")
    ax.scatter([m for m, _ in points], [float(v) for _, v in points], s=10, color="k", zorder=3,
               label="v_T(c_m)")
    ax.axhline(float(trust), color="0.5", lw=0.8, ls=":", label="trust bound")
    ax.set_xlabel("m")
    ax.set_ylabel("slope sum")
    ax.set_title(f"T-adic Newton polygon, p={prof.p}, d={prof.d}")
    ax.legend(loc="upper left")
    return _save(fig, path)


def plot_anumbers(anumbers: Sequence[int], genus: int, multiplicities: Dict[int, int],
                  formula: Optional[Dict[int, Tuple[int, Fraction]]], path: Path, title: str = "") -> str:
    """a^{(r)} against r with the formula window, and the Jordan block counts m(i)."""
    fig, (ax, bx) = _new(width=8.0, ncols=2)
    rs = list(range(1, len(anumbers) + 1))
    ax.plot(rs, anumbers, marker="o", color="tab:blue", label="Cartier kernel")
    if formula:
        fr = sorted(formula)
        ax.plot(fr, [formula[r][0] for r in fr], marker="x", ls="", color="tab:red", label="formula F")
        ax.vlines(fr, [float(formula[r][1]) for r in fr], [formula[r][0] for r in fr], color="tab:red", lw=0.8)
    ax.axhline(genus, color="0.5", lw=0.8, ls=":", label="genus")
    ax.set_xlabel("r")
    ax.set_ylabel("a^(r)")
    ax.legend(loc="lower right")
    sizes = sorted(multiplicities)
    bx.bar(sizes, [multiplicities[i] for i in sizes], color="tab:gray")
    bx.set_xlabel("Jordan block size i")
    bx.set_ylabel("m(i)")
    if title:
        fig.suptitle(title)
    return _save(fig, path)


def plot_grid(labels: List[str], series: Dict[str, List[int]], expected: Sequence[int], path: Path) -> str:
    """Computed values per spec for each convention, against the expected list."""
    fig, ax = _new(width=6.0)
    xs = list(range(len(labels)))
    ax.plot(xs, expected, ls="", marker="s", ms=9, mfc="none", color="k", label="expected")
    for k, (name, vals) in enumerate(sorted(series.items())):
        ax.plot([x + 0.08 * (k - 0.5) for x in xs], vals, ls="", marker="o", ms=4, label=name)
    ax.set_xticks(xs)
    ax.set_xticklabels(labels, rotation=20, ha="right")
    ax.set_ylabel("a^(r)")
    ax.legend()
    return _save(fig, path)
