"""Simultaneous polynomial root iteration (Aberth-Ehrlich) with Newton polish."""
from __future__ import annotations

import cmath
import math

import gmpy2
import numpy as np


class RootFindingError(RuntimeError):
    """Iteration budget exhausted; ``residuals`` holds ``|p(z)|`` per root."""

    def __init__(self, message, roots=None, residuals=None):
        super().__init__(message)
        self.roots = roots
        self.residuals = residuals


def horner(coeffs, z):
    """Value and derivative of ``sum coeffs[k] z**k`` at ``z``."""
    p = 0j
    dp = 0j
    for c in reversed(coeffs):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _rounding_bound(abs_coeffs, r, n):
    # |p(z)| below this is indistinguishable from zero in Horner evaluation
    acc = 0.0
    for c in reversed(abs_coeffs):
        acc = acc * r + c
    return 4 * n * 2.220446049250313e-16 * acc


def initial_guesses(coeffs) -> list:
    """Points on a circle about the root centroid, radius from a Fujiwara
    bound of the shifted polynomial, angles offset off the real axis."""
    n = len(coeffs) - 1
    lead = coeffs[-1]
    center = -coeffs[-2] / (n * lead)
    # Taylor shift p(center + w) to bound |root - center|
    shifted = list(coeffs)
    for i in range(n):
        for j in range(n - 1, i - 1, -1):
            shifted[j] += center * shifted[j + 1]
    bound = 0.0
    for k in range(n):
        ratio = abs(shifted[k] / lead)
        if ratio:
            # Fujiwara; the constant term gets the extra factor 1/2
            scale = 0.5 if k == 0 else 1.0
            bound = max(bound, (scale * ratio) ** (1.0 / (n - k)))
    radius = 2.0 * bound if bound > 0 else 1.0
    return [center + radius * cmath.exp(1j * (2 * math.pi * k / n + 0.4)) for k in range(n)]


def aberth_roots(coeffs, max_iter: int = 500, tol: float = 4e-16, polish: int = 3) -> np.ndarray:
    """All roots of the polynomial with ascending complex ``coeffs``.

    Raises ``RootFindingError`` when the corrections have not shrunk to
    ``tol`` (relative) within ``max_iter`` sweeps.
    """
    coeffs = [complex(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    n = len(coeffs) - 1
    if n < 1:
        return np.array([], dtype=complex)
    if n == 1:
        return np.array([-coeffs[0] / coeffs[1]])

    z = initial_guesses(coeffs)
    abs_coeffs = [abs(c) for c in coeffs]
    converged = [False] * n
    for _ in range(max_iter):
        for i in range(n):
            if converged[i]:
                continue
            p, dp = horner(coeffs, z[i])
            if abs(p) <= _rounding_bound(abs_coeffs, abs(z[i]), n):
                converged[i] = True
                continue
            ratio = p / dp if dp != 0 else p
            repulsion = sum(1.0 / (z[i] - z[j]) for j in range(n) if j != i and z[i] != z[j])
            step = ratio / (1.0 - ratio * repulsion)
            z[i] -= step
            if abs(step) <= tol * max(1.0, abs(z[i])):
                converged[i] = True
        if all(converged):
            break
    else:
        residuals = [abs(horner(coeffs, zi)[0]) for zi in z]
        raise RootFindingError(
            f"Aberth iteration did not converge in {max_iter} sweeps "
            f"(max residual {max(residuals):.3e})", np.array(z), residuals)

    for i in range(n):
        for _ in range(polish):
            p, dp = horner(coeffs, z[i])
            if p == 0 or dp == 0:
                break
            trial = z[i] - p / dp
            if abs(horner(coeffs, trial)[0]) >= abs(p):
                break
            z[i] = trial
    return np.array(z, dtype=complex)


def refine_multiprecision(coeffs, roots, precision: int = 200, max_iter: int = 60) -> np.ndarray:
    """Aberth sweeps in ``precision``-bit arithmetic on exact coefficients.

    ``coeffs`` are ascending ``(re, im)`` rationals, ``roots`` the float
    starting points.  Recovers clustered roots that float rounding of the
    coefficients smears by ``sqrt(eps)``.
    """
    n = len(coeffs) - 1
    if n < 1:
        return np.array([], dtype=complex)
    with gmpy2.context(gmpy2.get_context(), precision=precision):
        c = [gmpy2.mpc(gmpy2.mpfr(re), gmpy2.mpfr(im)) for re, im in coeffs]
        z = []
        for k, r in enumerate(roots):
            zk = gmpy2.mpc(complex(r))
            # coincident float starts would stall the repulsion term
            while any(zk == w for w in z):
                zk += gmpy2.mpc(0, 1e-12 * (k + 1))
            z.append(zk)
        # half the working bits: near a cluster the residual noise is
        # amplified by 1/separation, so full precision is not attainable
        eps = gmpy2.mpfr(2) ** (-(precision // 2))
        unit = gmpy2.mpfr(2) ** (-(precision - 8))
        abs_c = [abs(a) for a in c]
        for _ in range(max_iter):
            biggest = gmpy2.mpfr(0)
            settled = True
            for i in range(n):
                p = gmpy2.mpc(0)
                dp = gmpy2.mpc(0)
                bound = gmpy2.mpfr(0)
                r = abs(z[i])
                for a, m in zip(reversed(c), reversed(abs_c)):
                    dp = dp * z[i] + p
                    p = p * z[i] + a
                    bound = bound * r + m
                if abs(p) <= unit * n * bound:
                    continue
                settled = False
                ratio = p / dp if dp != 0 else p
                rep = sum((1 / (z[i] - z[j]) for j in range(n) if j != i), gmpy2.mpc(0))
                step = ratio / (1 - ratio * rep)
                z[i] -= step
                biggest = max(biggest, abs(step) / max(gmpy2.mpfr(1), abs(z[i])))
            if settled or biggest <= eps:
                break
        else:
            raise RootFindingError(f"multiprecision refinement did not settle in {max_iter} sweeps",
                                   np.array([complex(w) for w in z]))
        return np.array([complex(w) for w in z], dtype=complex)
