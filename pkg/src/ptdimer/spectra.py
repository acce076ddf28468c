"""Eigenvalues of the dimer by three independent routes.

* ``closed_form_spectrum`` -- factorized quadratic, valid for gamma = 0;
* ``cardano_spectrum`` -- roots of the reduced Sz=0 cubic
  ``X^3 - U X^2 - K X - L = 0`` with ``E = 2 eps + U - X``;
* ``oracle_spectrum`` -- exact characteristic polynomial of the full
  6x6 matrix followed by Aberth iteration.  Shares no code with the
  other two.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import charpoly
from .fock import DimerParams, HamiltonianMatrix, StateVector, build_hamiltonian
from .rootfind import RootFindingError, aberth_roots, refine_multiprecision
from .symmetry import split_sz

REPEATED_ROOT_DISC = 1e-13


class OracleConvergenceError(RuntimeError):
    pass


class NotAnEigenvalue(ValueError):
    pass


def sort_values(values) -> tuple:
    return tuple(sorted((complex(v) for v in values), key=lambda z: (z.real, z.imag)))


@dataclass(frozen=True)
class Spectrum:
    values: tuple
    method: str
    params: DimerParams | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", sort_values(self.values))

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=complex)

    def has_complex_pair(self, tol: float = 1e-9) -> bool:
        return any(abs(v.imag) > tol for v in self.values)


def spectral_distance(a, b) -> float:
    """Largest deviation under the optimal one-to-one pairing of two
    multisets of eigenvalues."""
    a = np.asarray(a.values if isinstance(a, Spectrum) else a, dtype=complex)
    b = np.asarray(b.values if isinstance(b, Spectrum) else b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"spectra of different sizes: {a.size} vs {b.size}")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max()) if a.size else 0.0


def conjugation_defect(values) -> float:
    """How far a multiset is from being closed under conjugation."""
    v = np.asarray(values.values if isinstance(values, Spectrum) else values, dtype=complex)
    return spectral_distance(v, v.conj())


# --- two-level reference formulas -------------------------------------------

def tls_eigenvalues(epsilon: float, t: float, gamma: float = 0.0, lam: float = 0.0):
    """Eigenvalues of the gain/loss (``gamma``) or asymmetric-hopping
    (``lam``) two-level system: ``eps +- sqrt(t^2 - gamma^2)`` or
    ``eps +- sqrt(t^2 - lam^2)``."""
    if gamma != 0 and lam != 0:
        raise ValueError("two-level reference takes either gamma or lam, not both")
    root = cmath.sqrt(t * t - gamma * gamma - lam * lam)
    return complex(epsilon) + root, complex(epsilon) - root


# --- closed form, gamma = 0 ----------------------------------------------------

def closed_form_spectrum(params: DimerParams) -> Spectrum:
    if params.gamma != 0:
        raise ValueError("closed form needs gamma = 0; use cardano_spectrum")
    e, t, lam, u = params.epsilon, params.t, params.lam, params.u
    root = cmath.sqrt(16 * (t * t - lam * lam) + u * u)
    pair = (0.5 * (4 * e + u + root), 0.5 * (4 * e + u - root))
    values = (2 * e,) * 3 + (2 * e + u,) + pair
    return Spectrum(values, "closed-form", params)


# --- reduced cubic -------------------------------------------------------------

@dataclass(frozen=True)
class CubicCoefficients:
    """Monic cubic ``X^3 + b X^2 + c X + d`` with ``b = -U, c = -K, d = -L``."""

    a: float
    b: float
    c: float
    d: float
    s: float
    k: float
    l: float
    u: float

    def as_tuple(self):
        return (self.a, self.b, self.c, self.d)

    def energies(self, roots) -> tuple:
        """Map cubic roots ``X`` back to energies ``E = S + U - X``."""
        return tuple(self.s + self.u - x for x in roots)


def reduced_cubic(params: DimerParams) -> CubicCoefficients:
    t, g, lam, u = params.t, params.gamma, params.lam, params.u
    k = 4 * (t * t - g * g - lam * lam)
    l = 4 * g * g * u
    return CubicCoefficients(a=1.0, b=-u, c=-k, d=-l, s=2 * params.epsilon, k=k, l=l, u=u)


def cubic_discriminant(c: CubicCoefficients) -> float:
    """``18abcd - 4b^3 d + b^2 c^2 - 4ac^3 - 27a^2 d^2``; positive for
    three distinct real roots, negative when a conjugate pair is present."""
    a, b, cc, d = c.as_tuple()
    return 18 * a * b * cc * d - 4 * b ** 3 * d + b * b * cc * cc - 4 * a * cc ** 3 - 27 * a * a * d * d


def _deflated_pair(b, c, d, x1, disc):
    """Remaining two roots of ``X^3 + bX^2 + cX + d`` given the root ``x1``;
    ``disc`` of the cubic decides real pair versus conjugate pair."""
    total = -b - x1
    prod = -d / x1 if abs(x1) > 1e-8 * max(1.0, abs(b)) else c - x1 * total
    h = 0.25 * total * total - prod
    if abs(h) <= 8 * 2.220446049250313e-16 * (0.25 * total * total + abs(prod)):
        h = 0.0
    half = 0.5 * total
    if disc >= 0:
        r = math.sqrt(abs(h))
        return (complex(half + r), complex(half - r))
    r = math.sqrt(abs(h))
    return (complex(half, r), complex(half, -r))


def cubic_roots(c: CubicCoefficients) -> tuple:
    """Roots of the monic cubic by the discriminant-split closed form.

    Three trigonometric real roots for positive discriminant, one real
    root plus a Cardano conjugate pair for negative discriminant, and the
    repeated-root formulas when ``|disc| < 1e-13`` (scaled down by the
    sixth power of the root-size bound when that is below one).
    """
    if c.a != 1.0:
        raise ValueError("cubic must be monic")
    b, cc, d = c.b, c.c, c.d
    shift = -b / 3.0
    p = cc - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * cc / 3.0 + d
    disc = cubic_discriminant(c)

    # root-size bound; the repeated-root cutoffs scale with it so tiny
    # parameters are not all lumped into one degenerate case
    scale = max(abs(b), math.sqrt(abs(cc)), abs(d) ** (1.0 / 3.0))
    if scale == 0:
        return (0j, 0j, 0j)
    if abs(disc) < REPEATED_ROOT_DISC * min(1.0, scale ** 6):
        if abs(p) <= 1e-12 * scale * scale:
            return (complex(shift),) * 3
        x1 = 3.0 * q / p + shift
        # one Newton step: the simple root is well conditioned
        f = ((x1 + b) * x1 + cc) * x1 + d
        df = (3.0 * x1 + 2.0 * b) * x1 + cc
        if df != 0:
            x1 -= f / df
        return (complex(x1),) + _deflated_pair(b, cc, d, x1, disc)

    if disc > 0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        ys = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)]
        return tuple(complex(y + shift) for y in ys)

    w = math.sqrt(q * q / 4.0 + p ** 3 / 27.0)
    big = -math.copysign(1.0, q) * np.cbrt(abs(q) / 2.0 + w)
    small = -p / (3.0 * big) if big != 0 else 0.0
    real = big + small
    re = -0.5 * real
    im = 0.5 * math.sqrt(3.0) * (big - small)
    return (complex(real + shift), complex(re + shift, im), complex(re + shift, -im))


def cardano_spectrum(params: DimerParams) -> Spectrum:
    c = reduced_cubic(params)
    roots = cubic_roots(c)
    s = 2 * params.epsilon
    values = (s,) * 3 + c.energies(roots)
    return Spectrum(values, "cardano", params)


def cubic_energies(params: DimerParams) -> tuple:
    """The three Sz=0 levels that come from the cubic, unsorted."""
    c = reduced_cubic(params)
    return c.energies(cubic_roots(c))


# --- independent oracle --------------------------------------------------------

def oracle_spectrum(h, max_iter: int = 500) -> Spectrum:
    """Eigenvalues from the exact characteristic polynomial.

    Repeated roots are separated exactly (square-free decomposition) so
    each factor handed to the float iteration has simple roots.
    """
    params = None
    if isinstance(h, HamiltonianMatrix):
        params = h.params
        a = h.entries
    elif isinstance(h, DimerParams):
        params = h
        a = build_hamiltonian(h).entries
    else:
        a = np.asarray(h, dtype=complex)
    exact = charpoly.charpoly_exact(a)
    values = []
    for factor, mult in charpoly.squarefree_decomposition(exact):
        try:
            roots = aberth_roots(charpoly.to_complex(factor), max_iter=max_iter)
            if len(factor) > 2:
                roots = refine_multiprecision(factor, roots)
        except RootFindingError as exc:
            raise OracleConvergenceError(
                f"{exc} for factor of degree {len(factor) - 1}; residuals {exc.residuals}") from exc
        for r in roots:
            values.extend([complex(r)] * mult)
    if len(values) != a.shape[0]:
        raise OracleConvergenceError(f"found {len(values)} roots for a {a.shape[0]}x{a.shape[0]} matrix")
    return Spectrum(values, "oracle", params)


# --- Sz = 0 eigenvectors -------------------------------------------------------

def null_vector(a: np.ndarray) -> np.ndarray:
    """Unit vector ``w`` with ``a w ~ 0`` by Gaussian elimination with
    partial pivoting; the smallest pivot marks the free variable."""
    u = np.array(a, dtype=complex)
    n = u.shape[0]
    for col in range(n):
        piv = col + int(np.argmax(np.abs(u[col:, col])))
        if piv != col:
            u[[col, piv]] = u[[piv, col]]
        if u[col, col] == 0:
            continue
        factors = u[col + 1:, col] / u[col, col]
        u[col + 1:, col:] -= np.outer(factors, u[col, col:])
    pivots = np.abs(np.diag(u))
    scale = max(np.max(np.abs(a)), 1.0)
    free = int(np.argmin(pivots))
    negligible = pivots <= 1e-12 * scale
    w = np.zeros(n, dtype=complex)
    w[free] = 1.0
    for i in range(free - 1, -1, -1):
        if negligible[i]:
            continue
        w[i] = -(u[i, i + 1:] @ w[i + 1:]) / u[i, i]
    return w / np.linalg.norm(w)


def sz0_eigenvectors(params: DimerParams, value: complex, tol: float = 1e-8) -> StateVector:
    """Unit right eigenvector of the Sz=0 block for eigenvalue ``value``,
    embedded in the six-state basis."""
    block = split_sz(build_hamiltonian(params)).zero
    shifted = block - complex(value) * np.eye(4)
    w = null_vector(shifted)
    residual = float(np.linalg.norm(shifted @ w))
    if residual > tol:
        raise NotAnEigenvalue(f"{value} is not an Sz=0 eigenvalue (residual {residual:.3e})")
    return StateVector(np.concatenate([[0], w, [0]]))


def overlap(v: StateVector, w: StateVector) -> float:
    """``|<v|w>| / (|v| |w|)``; equals 1 for parallel vectors."""
    return abs(v.inner(w)) / math.sqrt(v.norm2() * w.norm2())


def _continue_odd(levels, start_odd, order):
    """Follow the odd level along ``order`` (indices), predicting the next
    value linearly from the last two so crossings are passed straight."""
    odd = dict(start_odd)
    trail = [levels[i][odd[i]] for i in list(odd)[-1:]]
    for i in order:
        if i in odd:
            trail.append(levels[i][odd[i]])
            continue
        target = trail[-1] if len(trail) < 2 else 2 * trail[-1] - trail[-2]
        odd[i] = min(range(3), key=lambda k: abs(levels[i][k] - target))
        trail.append(levels[i][odd[i]])
    return odd


def track_complex_pair(triples, references, tol: float = 1e-9) -> list:
    """Follow the complex-capable pair through a sequence of cubic levels.

    Where two levels are complex they are the pair and the third is the
    "odd" level.  Real stretches continue the odd level from the nearest
    complex stretch on their left, or failing that backward from the one
    on their right; a sweep with no complex point at all starts from the
    level closest to ``references[0]`` (``2 eps + U``, the odd level at
    gamma = 0).  Returns ``(E_plus, E_minus)`` per point, ordered so that
    ``E_minus`` sorts first by (real, imaginary).
    """
    levels = [[complex(v) for v in lv] for lv in triples]
    n = len(levels)
    odd = {}
    for i, lv in enumerate(levels):
        cplx = [k for k, v in enumerate(lv) if abs(v.imag) > tol]
        if len(cplx) == 2:
            odd[i] = ({0, 1, 2} - set(cplx)).pop()
    if not odd and n:
        ref = complex(references[0])
        odd[0] = min(range(3), key=lambda k: abs(levels[0][k] - ref))
    i = 0
    while i < n:
        if i in odd:
            i += 1
            continue
        j = i
        while j < n and j not in odd:
            j += 1
        if i > 0:
            odd.update(_continue_odd(levels, {i - 1: odd[i - 1]}, range(i, j)))
        else:
            odd.update(_continue_odd(levels, {j: odd[j]}, range(j - 1, -1, -1)))
        i = j
    out = []
    for i, lv in enumerate(levels):
        lower, upper = sort_values(v for k, v in enumerate(lv) if k != odd[i])
        out.append((upper, lower))
    return out
