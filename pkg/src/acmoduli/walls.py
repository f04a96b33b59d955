"""Fredholm walls of the self-dual operator on the cylindrical end.

A rate ``eps`` is a wall when ``e^{eps t}`` times a mode on the link solves
the translation-invariant problem. The walls are ``0``, ``+-sqrt(lam)`` for
every positive eigenvalue ``lam`` of the Laplacian on functions, and every
nonzero eigenvalue ``gamma`` of ``-*d`` on coexact 1-forms (with its sign).
"""
from dataclasses import dataclass

import numpy as np

WALL_RTOL = 1e-6


@dataclass(frozen=True)
class Wall:
    """One wall with the spectral data that produced it.

    ``sources`` holds ``("zero", 0.0)``, ``("delta0", lam)`` and
    ``("curl", gamma)`` entries, one per eigenvalue counted with
    multiplicity. ``multiplicity`` is ``None`` at the zero wall.
    """

    rate: float
    sources: tuple
    multiplicity: int = None

    @property
    def delta_count(self):
        return sum(1 for kind, _ in self.sources if kind == "delta0")

    @property
    def curl_count(self):
        return sum(1 for kind, _ in self.sources if kind == "curl")


@dataclass(frozen=True)
class WallSet:
    """Sorted walls of one link geometry in one orientation.

    ``horizon`` is the largest ``|rate|`` up to which both spectra were
    computed completely; walls beyond it may be missing or undercounted.
    """

    walls: tuple
    orientation: str = "induced"
    rtol: float = WALL_RTOL
    horizon: float = np.inf
    includes_zero: bool = True

    @property
    def rates(self):
        return np.array([w.rate for w in self.walls])

    def nearest_negative(self):
        neg = [w for w in self.walls if w.rate < 0]
        return neg[-1] if neg else None

    def nearest_positive(self):
        pos = [w for w in self.walls if w.rate > 0]
        return pos[0] if pos else None

    @classmethod
    def from_rates(cls, rates, orientation="induced", rtol=WALL_RTOL):
        """WallSet from bare rates (each counted once as a curl source)."""
        entries = [("curl", float(r), float(r)) for r in rates if r != 0]
        return cls(_merge(entries, rtol), orientation, rtol)


def _merge(entries, rtol):
    """Cluster ``(kind, value, rate)`` entries into walls; 0 always present."""
    entries = sorted(entries, key=lambda e: e[2])
    groups = []
    for e in entries:
        if groups:
            r0 = groups[-1][-1][2]
            if abs(e[2] - r0) <= rtol * max(abs(e[2]), abs(r0)):
                groups[-1].append(e)
                continue
        groups.append([e])
    walls = [Wall(0.0, (("zero", 0.0),), None)]
    for g in groups:
        rate = float(np.mean([e[2] for e in g]))
        walls.append(Wall(rate, tuple((k, v) for k, v, _ in g), len(g)))
    walls.sort(key=lambda w: w.rate)
    return tuple(walls)


def wall_set(spec0, curl, rtol=WALL_RTOL, orientation=None):
    """Merge the function spectrum and the curl spectrum into walls.

    Parameters
    ----------
    spec0 : SpectrumResult
        Laplacian on functions; zero eigenvalues are skipped, every positive
        ``lam`` gives walls at both ``sqrt(lam)`` and ``-sqrt(lam)``.
    curl : SpectrumResult
        Curl on coexact 1-forms; each nonzero ``gamma`` is a wall at itself.
    rtol : float
        Relative tolerance below which neighbouring rates are one wall.
    """
    if spec0.mesh_level != curl.mesh_level:
        raise ValueError("spectra come from different refinement levels")
    lam = np.asarray(spec0.eigenvalues, dtype=float)
    if np.any(lam < -1e-8 * max(1.0, np.abs(lam).max(initial=0.0))):
        raise ValueError("Laplace eigenvalues must be nonnegative")
    entries = []
    for x in lam:
        if x > 0:
            r = float(np.sqrt(x))
            entries += [("delta0", float(x), r), ("delta0", float(x), -r)]
    gam = np.asarray(curl.eigenvalues, dtype=float)
    for g in gam:
        if g != 0:
            entries.append(("curl", float(g), float(g)))
    # walls are complete up to the smaller of the two computed ranges
    h0 = np.sqrt(lam.max()) if lam.size and lam.max() > 0 else np.inf
    h1 = np.abs(gam).max() if gam.size else np.inf
    orient = orientation or getattr(curl, "orientation", None) or "induced"
    return WallSet(_merge(entries, rtol), orient, rtol, float(min(h0, h1)))


def wall_multiplicity(ws, eps, rtol=None):
    """Number of pure-exponential solutions at a nonzero wall ``eps``.

    Counts the function modes with ``lam = eps^2`` and the curl modes with
    ``gamma = eps`` among all walls within ``rtol * |eps|`` of ``eps``
    (default ``ws.rtol``). Returns 0 for ``eps = 0`` and off the walls.
    """
    if eps == 0:
        return 0
    rtol = ws.rtol if rtol is None else rtol
    return sum(w.multiplicity for w in ws.walls
               if w.rate != 0 and abs(w.rate - eps) <= rtol * abs(eps))


def invariant_kernel_at_zero(b_L):
    """t-independent solutions at rate 0: harmonic 1-forms plus constants.

    A lower bound for the jump at the zero wall, not the jump itself.
    """
    if not len(b_L):
        return 0
    return int(b_L[0]) + (int(b_L[1]) if len(b_L) > 1 else 0)


def full_operator_index_jump(b_L):
    """Index jump of the full operator d + d* across 0: twice the total Betti number."""
    return 2 * int(sum(b_L))


@dataclass(frozen=True)
class RateInterval:
    """Open interval ``(lower, 0)`` of admissible decay rates.

    ``binding`` is ``"wall"`` when the nearest negative wall sets ``lower``
    and ``"beta"`` when the decay rate of the end does. ``empty`` marks an
    interval with nothing in it.
    """

    lower: float
    upper: float = 0.0
    binding: str = "beta"
    empty: bool = False

    def __contains__(self, x):
        return not self.empty and self.lower < x < self.upper


def admissible_gamma(ws, beta):
    """Rates ``gamma`` with ``beta < gamma < 0`` and no wall in ``[gamma, 0)``.

    Walls are symmetric in their Laplace part, so this also keeps
    ``(0, gamma^2]`` free of Laplace eigenvalues.
    """
    if beta >= 0:
        return RateInterval(float(beta), 0.0, "beta", empty=True)
    w = ws.nearest_negative()
    if w is not None and w.rate >= beta:
        if abs(w.rate) <= ws.rtol:
            return RateInterval(w.rate, 0.0, "wall", empty=True)
        return RateInterval(w.rate, 0.0, "wall")
    return RateInterval(float(beta), 0.0, "beta")
