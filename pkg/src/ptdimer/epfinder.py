"""Exceptional points as sign changes of the reduced-cubic discriminant.

Along a parameter axis (``lambda`` or ``gamma``) the discriminant of
``X^3 - U X^2 - K X - L`` is a polynomial in the scanned value.  Sign
changes on a coarse grid are bisected to the requested width.  Interior
extrema of the discriminant that do not change sign on the grid are
refined: if the extremum crosses zero the cell hides a pair of EPs, if
it only touches zero it is a tangency (a degenerate level crossing, not
a symmetry-breaking point).

Two EPs closer than one coarse cell and with no interior extremum
between grid points would be missed; the default 2000-point grid keeps
that window below the spacing of any EPs seen for ``|U| <= 6``.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .fock import DimerParams
from .spectra import CubicCoefficients, cubic_discriminant, reduced_cubic

log = logging.getLogger(__name__)

AXES = ("lambda", "gamma")
PLANES = {"lambda": ("lambda", "U"), "gamma": ("gamma", "U")}

SELF_GENERATED = "self-generated"
INTERACTION_GENERATED = "interaction-generated"

DEFAULT_TOL = 1e-9
DEFAULT_COARSE_STEPS = 2000
BOUNDARY_DISC_TOL = 1e-9


class EdgeSignChange(UserWarning):
    pass


@dataclass(frozen=True)
class EpRecord:
    axis: str
    value: float
    bracket: tuple
    kind: str | None
    fixed_params: DimerParams

    @property
    def params(self) -> DimerParams:
        return _with_axis(self.fixed_params, self.axis, self.value)


@dataclass(frozen=True)
class TangencyEvent:
    axis: str
    value: float
    discriminant: float
    fixed_params: DimerParams


@dataclass
class ScanResult:
    eps: list = field(default_factory=list)
    tangencies: list = field(default_factory=list)


@dataclass(frozen=True)
class BoundaryCurve:
    plane: tuple
    points: tuple
    branch: int

    @property
    def u(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def critical(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])


def _check_axis(axis):
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")


def _with_axis(params: DimerParams, axis: str, value: float) -> DimerParams:
    _check_axis(axis)
    return params.replace(lam=value) if axis == "lambda" else params.replace(gamma=value)


def discriminant_on_axis(fixed: DimerParams, axis: str, values) -> np.ndarray:
    """Discriminant at every point of ``values`` (vectorized)."""
    _check_axis(axis)
    x = np.asarray(values, dtype=float)
    t, u = fixed.t, fixed.u
    lam = x if axis == "lambda" else fixed.lam
    g = x if axis == "gamma" else fixed.gamma
    k = 4 * (t * t - g * g - lam * lam)
    l = 4 * g * g * u
    c = CubicCoefficients(1.0, -u, -k, -l, 2 * fixed.epsilon, k, l, u)
    return cubic_discriminant(c)


def _disc_at(fixed, axis, x) -> float:
    return float(cubic_discriminant(reduced_cubic(_with_axis(fixed, axis, x))))


def bisect_sign_change(f, lo, hi, tol, disc_tol=BOUNDARY_DISC_TOL):
    """Shrink ``[lo, hi]`` around a sign change of ``f`` to width ``<= tol``,
    then keep halving until ``|f(mid)| < disc_tol`` or the bracket is as
    small as floating point allows.  Returns ``(mid, lo, hi)``."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo, lo, lo
    if fhi == 0:
        return hi, hi, hi
    if flo * fhi > 0:
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return mid, lo, hi
        fmid = f(mid)
        if hi - lo <= tol and abs(fmid) < disc_tol:
            return mid, lo, hi
        if fmid == 0:
            return mid, mid, mid
        if (fmid < 0) == (flo < 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid


def _grid_events(x, d):
    """Sign changes and candidate extrema on a sampled discriminant.

    Returns ``(brackets, zeros, extrema)``: index pairs around strict sign
    changes, indices of exact zeros with their neighbour signs, and
    interior indices where ``|d|`` has a local minimum without a sign
    change.
    """
    s = np.sign(d)
    brackets, zeros, extrema = [], [], []
    n = len(x)
    i = 0
    while i < n:
        if s[i] == 0:
            j = i
            while j + 1 < n and s[j + 1] == 0:
                j += 1
            left = s[i - 1] if i > 0 else 0
            right = s[j + 1] if j + 1 < n else 0
            zeros.append((i, j, left, right))
            i = j + 1
            continue
        if i + 1 < n and s[i + 1] != 0 and s[i] != s[i + 1]:
            brackets.append((i, i + 1))
        i += 1
    a = np.abs(d)
    for i in range(1, n - 1):
        if s[i - 1] == s[i] == s[i + 1] != 0 and a[i] <= a[i - 1] and a[i] <= a[i + 1]:
            extrema.append(i)
    return brackets, zeros, extrema


def scan_discriminant(fixed: DimerParams, axis: str, range_=(0.0, 2.0),
                      coarse_steps: int = DEFAULT_COARSE_STEPS, tol: float = DEFAULT_TOL,
                      refine: bool = True) -> ScanResult:
    """Locate EPs and tangencies of the discriminant along ``axis``.

    ``coarse_steps`` is the number of grid points.  With ``refine=False``
    each sign change is located by linear interpolation inside its cell
    instead of bisection (used for continuation sweeps).
    """
    _check_axis(axis)
    lo, hi = map(float, range_)
    if not lo < hi:
        raise ValueError(f"empty range ({lo}, {hi})")
    if coarse_steps < 2:
        raise ValueError("coarse_steps must be at least 2")
    if tol <= 0:
        raise ValueError("tol must be positive")

    def f(v):
        return _disc_at(fixed, axis, v)

    x = np.linspace(lo, hi, coarse_steps)
    d = discriminant_on_axis(fixed, axis, x)
    cell = (hi - lo) / (coarse_steps - 1)
    for end, idx in (("lower", 0), ("upper", -1)):
        if d[idx] == 0:
            warnings.warn(f"discriminant vanishes at the {end} end of the scan; widening by one cell",
                          EdgeSignChange, stacklevel=2)
            lo2, hi2 = (lo - cell, hi) if idx == 0 else (lo, hi + cell)
            return scan_discriminant(fixed, axis, (lo2, hi2), coarse_steps + 1, tol, refine)

    brackets, zeros, extrema = _grid_events(x, d)
    found = []  # (value, lo, hi)
    for i, j in brackets:
        if refine:
            found.append(bisect_sign_change(f, x[i], x[j], tol))
        else:
            v = x[i] - d[i] * (x[j] - x[i]) / (d[j] - d[i])
            found.append((v, x[i], x[j]))
    result = ScanResult()
    for i, j, left, right in zeros:
        v = x[(i + j) // 2] if i == j else 0.5 * (x[i] + x[j])
        if left != 0 and right != 0 and left != right:
            found.append((v, x[i], x[j]))
        else:
            result.tangencies.append(TangencyEvent(axis, float(v), 0.0, fixed))
    scale = max(1.0, float(np.max(np.abs(d))))
    for i in extrema:
        sign = np.sign(d[i])
        res = minimize_scalar(lambda v: sign * f(v), bounds=(x[i - 1], x[i + 1]),
                              method="bounded", options={"xatol": 1e-13})
        xm, dm = float(res.x), f(float(res.x))
        if dm != 0 and np.sign(dm) != sign:
            log.debug("hidden EP pair near %s=%g", axis, xm)
            for a, b in ((x[i - 1], xm), (xm, x[i + 1])):
                if refine:
                    found.append(bisect_sign_change(f, a, b, tol))
                else:
                    found.append((0.5 * (a + b), a, b))
        elif abs(dm) <= 1e-10 * scale:
            result.tangencies.append(TangencyEvent(axis, xm, dm, fixed))
    found.sort()
    result.eps = [EpRecord(axis, float(v), (float(a), float(b)), None, fixed) for v, a, b in found]
    for ev in result.tangencies:
        log.debug("tangency (not an EP) at %s=%.12g, discriminant %.3e", axis, ev.value, ev.discriminant)
    return result


# --- branch stitching ------------------------------------------------------------

def _align(prev, new, threshold):
    """Order-preserving matching of two sorted point lists.

    Each list element may be matched to at most one in the other list,
    matches may not cross and may not exceed ``threshold``; unmatched
    elements cost ``threshold``.  Returns the matched index pairs.
    """
    n, m = len(prev), len(new)
    inf = float("inf")
    cost = np.full((n + 1, m + 1), inf)
    move = np.zeros((n + 1, m + 1), dtype=int)
    cost[0, :] = threshold * np.arange(m + 1)
    cost[:, 0] = threshold * np.arange(n + 1)
    move[0, 1:] = 2
    move[1:, 0] = 1
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            options = [(cost[i - 1, j] + threshold, 1), (cost[i, j - 1] + threshold, 2)]
            gap = abs(prev[i - 1] - new[j - 1])
            if gap <= threshold:
                options.append((cost[i - 1, j - 1] + gap, 0))
            cost[i, j], move[i, j] = min(options)
    pairs = []
    i, j = n, m
    while i > 0 or j > 0:
        mv = move[i, j]
        if mv == 0:
            pairs.append((i - 1, j - 1))
            i, j = i - 1, j - 1
        elif mv == 1:
            i -= 1
        else:
            j -= 1
    return pairs[::-1]


def _jump_threshold(levels, floor=1e-6):
    # 10x the median distance from each point to the nearest point of the previous level
    gaps = []
    for prev, new in zip(levels, levels[1:]):
        if prev and new:
            p = np.asarray(prev)
            gaps.extend(float(np.min(np.abs(p - v))) for v in new)
    if not gaps:
        return float("inf")
    return max(10.0 * float(np.median(gaps)), floor)


def stitch(levels, threshold=None):
    """Connect per-level sorted point lists into branches.

    Returns a list of branches, each a list of ``(level_index, value)``,
    ordered by the level at which the branch starts, then by value.
    """
    if threshold is None:
        threshold = _jump_threshold(levels)
    branches = []
    open_ = {}  # index in current level -> branch id
    for k, level in enumerate(levels):
        level = list(level)
        if k == 0 or not open_:
            nxt = {}
            for j, v in enumerate(level):
                branches.append([(k, v)])
                nxt[j] = len(branches) - 1
            open_ = nxt
            continue
        prev_vals = [branches[b][-1][1] for _, b in sorted(open_.items())]
        prev_ids = [b for _, b in sorted(open_.items())]
        pairs = _align(prev_vals, level, threshold)
        matched = {j: prev_ids[i] for i, j in pairs}
        nxt = {}
        for j, v in enumerate(level):
            if j in matched:
                branches[matched[j]].append((k, v))
                nxt[j] = matched[j]
            else:
                branches.append([(k, v)])
                nxt[j] = len(branches) - 1
        open_ = nxt
    branches.sort(key=lambda br: (br[0][0], br[0][1]))
    return branches


# --- classification --------------------------------------------------------------

def _continuation_range(range_):
    lo, hi = range_
    reach = 2.0 * max(abs(lo), abs(hi), 1.0)
    return (min(lo, -reach), max(hi, reach))


def classify(eps, fixed: DimerParams, axis: str, range_, u_steps: int = 200,
             coarse_steps: int = DEFAULT_COARSE_STEPS) -> list:
    """Tag each EP as self-generated (survives continuation to U = 0 with
    everything else fixed) or interaction-generated (annihilates on the
    way).  A final rescan at U = 0 confirms the survivor count."""
    if not eps:
        return []
    u0 = fixed.u
    if u0 == 0:
        return [_retag(e, SELF_GENERATED) for e in eps]
    wide = _continuation_range(range_)
    us = np.linspace(u0, 0.0, u_steps + 1)
    levels = [[e.value for e in eps]]
    for u in us[1:]:
        scan = scan_discriminant(fixed.replace(u=float(u)), axis, wide,
                                 2 * coarse_steps, DEFAULT_TOL, refine=False)
        levels.append([e.value for e in scan.eps])
    threshold = _jump_threshold(levels)
    alive = {i: i for i in range(len(eps))}  # original index -> index in level
    for k in range(1, len(levels)):
        idx = sorted(alive.items(), key=lambda kv: kv[1])
        prev_vals = [levels[k - 1][j] for _, j in idx]
        pairs = _align(prev_vals, levels[k], threshold)
        nxt = {}
        for a, b in pairs:
            nxt[idx[a][0]] = b
        alive = nxt
    final_count = len(levels[-1])
    if len(alive) > final_count:
        log.warning("continuation kept %d EPs but U=0 has %d", len(alive), final_count)
    return [_retag(e, SELF_GENERATED if i in alive else INTERACTION_GENERATED)
            for i, e in enumerate(eps)]


def _retag(ep: EpRecord, kind: str) -> EpRecord:
    return EpRecord(ep.axis, ep.value, ep.bracket, kind, ep.fixed_params)


def scan_eps(fixed: DimerParams, axis: str = "lambda", range_=(0.0, 2.0),
             coarse_steps: int = DEFAULT_COARSE_STEPS, tol: float = DEFAULT_TOL,
             classify_kinds: bool = True) -> list:
    """EPs along ``axis`` inside ``range_``, ascending, each bisected to
    width ``tol`` and (optionally) tagged with its kind."""
    scan = scan_discriminant(fixed, axis, range_, coarse_steps, tol)
    if classify_kinds:
        return classify(scan.eps, fixed, axis, range_, coarse_steps=coarse_steps)
    return scan.eps


# --- boundaries ---------------------------------------------------------------

def trace_boundary(fixed: DimerParams, plane: str = "lambda", u_range=(-4.0, 4.0),
                   u_steps: int = 81, tol: float = DEFAULT_TOL, scan_range=(0.0, 3.0),
                   coarse_steps: int = DEFAULT_COARSE_STEPS) -> list:
    """PT phase boundary in the (axis, U) plane, one curve per branch.

    ``plane`` names the scanned axis (``lambda`` or ``gamma``); the other
    non-Hermitian parameter stays at its value in ``fixed``.
    """
    _check_axis(plane)
    if u_steps < 2:
        raise ValueError("u_steps must be at least 2")
    us = np.linspace(float(u_range[0]), float(u_range[1]), u_steps)

    def values_at(u):
        eps = scan_eps(fixed.replace(u=float(u)), plane, scan_range, coarse_steps, tol,
                       classify_kinds=False)
        return [e.value for e in eps]

    levels = [values_at(u) for u in us]
    threshold = _jump_threshold(levels)
    branches = _bridge_branches(stitch(levels, threshold), us, values_at, threshold)
    curves = []
    for b, branch in enumerate(branches):
        points = tuple((float(us[k]), float(v)) for k, v in branch)
        curves.append(BoundaryCurve(PLANES[plane], points, b))
    return curves


def _continuous(values_at, u0, v0, u1, v1, threshold, depth=12):
    """Whether a branch runs from (u0, v0) to (u1, v1): halve the U step
    until every sub-step is below ``threshold``; a gap that does not
    shrink under halving is a genuine break."""
    gap = abs(v1 - v0)
    if gap <= threshold:
        return True
    if depth == 0:
        return False
    um = 0.5 * (u0 + u1)
    lo, hi = min(v0, v1), max(v0, v1)
    inside = [v for v in values_at(um) if lo - threshold <= v <= hi + threshold]
    if not inside:
        return False
    vm = min(inside, key=lambda v: abs(v - 0.5 * (v0 + v1)))
    if max(abs(vm - v0), abs(v1 - vm)) > 0.9 * gap:
        return False
    return (_continuous(values_at, u0, v0, um, vm, threshold, depth - 1)
            and _continuous(values_at, um, vm, u1, v1, threshold, depth - 1))


def _bridge_branches(branches, us, values_at, threshold):
    """Join a branch ending at one U level to one starting at the next
    when refinement in U shows they are the same curve (steep segments
    such as cusps exceed the jump threshold on the coarse U grid)."""
    branches = [list(b) for b in branches]
    merged = True
    while merged:
        merged = False
        for a in branches:
            k, va = a[-1]
            starts = [b for b in branches if b is not a and b[0][0] == k + 1]
            for b in sorted(starts, key=lambda br: abs(br[0][1] - va)):
                if _continuous(values_at, us[k], va, us[k + 1], b[0][1], threshold):
                    a.extend(b)
                    branches.remove(b)
                    merged = True
                    break
            if merged:
                break
    branches.sort(key=lambda br: (br[0][0], br[0][1]))
    return branches


def boundary_at(curves, u: float, branch: int = 0) -> float:
    for c in curves:
        if c.branch == branch:
            for uu, v in c.points:
                if math.isclose(uu, u, abs_tol=1e-12):
                    return v
    raise KeyError(f"no point at U={u} on branch {branch}")
