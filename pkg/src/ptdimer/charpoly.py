"""Exact characteristic polynomials of small complex matrices.

Every float is a dyadic rational, so a complex float matrix scales to a
Gaussian-integer matrix by a common power of two.  The determinant
``det(zI - A)`` is then expanded by cofactors in exact integer
arithmetic and the coefficients returned as Gaussian rationals
``(mpq, mpq)``.  Square-free decomposition (Yun) separates
repeated roots exactly.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from gmpy2 import mpq

# Gaussian rationals are (re, im) tuples of mpq or int.
ZERO = (0, 0)
ONE = (1, 0)


def _gmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _gsub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _ginv(a):
    n = mpq(a[0] * a[0] + a[1] * a[1])
    return (a[0] / n, -a[1] / n)


def _is_zero(a):
    return a[0] == 0 and a[1] == 0


def _trim(p):
    p = list(p)
    while p and _is_zero(p[-1]):
        p.pop()
    return p


def _pmul(p, q):
    if not p or not q:
        return []
    out = [ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if _is_zero(a):
            continue
        for j, b in enumerate(q):
            if not _is_zero(b):
                out[i + j] = _gadd(out[i + j], _gmul(a, b))
    return out


def _padd(p, q):
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, b in enumerate(q):
        out[i] = _gadd(out[i], b)
    return _trim(out)


def _pscale(p, c):
    return _trim([_gmul(a, c) for a in p])


def _dyadic(x: float):
    num, den = float(x).as_integer_ratio()
    return num, den.bit_length() - 1


def to_gaussian_integers(matrix):
    """Return ``(B, k)`` with ``B`` a nested list of Gaussian integers and
    ``A = B / 2**k`` exactly."""
    a = np.asarray(matrix, dtype=complex)
    parts = [[(_dyadic(z.real), _dyadic(z.imag)) for z in row] for row in a]
    k = max(max(re[1], im[1]) for row in parts for re, im in row)
    b = [[(re[0] << (k - re[1]), im[0] << (k - im[1])) for re, im in row] for row in parts]
    return b, k


def _integer_charpoly(b):
    """Coefficients (ascending) of det(zI - B) for Gaussian-integer B."""
    n = len(b)
    entries = []
    for i in range(n):
        row = []
        for j in range(n):
            neg = (-b[i][j][0], -b[i][j][1])
            if i == j:
                row.append(_trim([neg, ONE]))
            else:
                row.append(_trim([neg]))
        entries.append(row)

    @lru_cache(maxsize=None)
    def minor(r, cols):
        if r == n:
            return ((1, 0),)
        total = []
        sign = 1
        for j in range(n):
            bit = 1 << j
            if not cols & bit:
                continue
            e = entries[r][j]
            if e:
                sub = list(minor(r + 1, cols & ~bit))
                if sub:
                    term = _pmul(e, sub)
                    if sign < 0:
                        term = [(-c[0], -c[1]) for c in term]
                    total = _padd(total, term)
            sign = -sign
        return tuple(total)

    return list(minor(0, (1 << n) - 1))


def charpoly_exact(matrix) -> list:
    """Ascending Gaussian-rational coefficients of the monic ``det(zI - A)``."""
    b, k = to_gaussian_integers(matrix)
    n = len(b)
    coeffs = _integer_charpoly(b)
    coeffs += [ZERO] * (n + 1 - len(coeffs))
    # p_A(z) = 2^{-nk} p_B(2^k z)
    return [(mpq(c[0], 1 << (k * (n - j))), mpq(c[1], 1 << (k * (n - j))))
            for j, c in enumerate(coeffs)]


def charpoly(matrix) -> np.ndarray:
    """Characteristic polynomial ``det(zI - A)`` rounded to complex floats,
    ascending powers."""
    return to_complex(charpoly_exact(matrix))


def to_complex(p) -> np.ndarray:
    return np.array([complex(float(c[0]), float(c[1])) for c in p], dtype=complex)


def _monic(p):
    p = _trim(p)
    inv = _ginv(p[-1])
    return [_gmul(c, inv) for c in p]


def _pdivmod(p, q):
    p = _trim(p)
    q = _trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    inv = _ginv(q[-1])
    quot = [ZERO] * max(len(p) - len(q) + 1, 0)
    rem = list(p)
    while len(rem) >= len(q) and rem:
        shift = len(rem) - len(q)
        c = _gmul(rem[-1], inv)
        quot[shift] = c
        for i, qc in enumerate(q):
            rem[shift + i] = _gsub(rem[shift + i], _gmul(c, qc))
        rem.pop()
        rem = _trim(rem)
    return _trim(quot), rem


def _pgcd(p, q):
    p, q = _trim(p), _trim(q)
    while q:
        p, q = q, _pdivmod(p, q)[1]
    return _monic(p)


def _pderiv(p):
    return _trim([(c[0] * i, c[1] * i) for i, c in enumerate(p)][1:])


def squarefree_decomposition(p) -> list:
    """Yun's algorithm: return ``[(factor, multiplicity), ...]`` with
    ``p = lc * prod(factor**multiplicity)`` and each factor square-free,
    monic, of positive degree."""
    p = _monic(p)
    out = []
    dp = _pderiv(p)
    a = _pgcd(p, dp)
    b = _pdivmod(p, a)[0]
    c = _pdivmod(dp, a)[0]
    d = _padd(c, _pscale(_pderiv(b), (-1, 0)))
    i = 1
    while len(b) > 1:
        a = _pgcd(b, d)
        if len(a) > 1:
            out.append((a, i))
        b = _pdivmod(b, a)[0]
        c = _pdivmod(d, a)[0]
        d = _padd(c, _pscale(_pderiv(b), (-1, 0)))
        i += 1
    return out
