"""Sz-sector decomposition and matrix-level PT checks.

The parity matrix is derived from the operator algebra: each basis ket
is written as its creation-operator product, every ``c+_{1s}`` is
replaced by ``c+_{2s}`` (and vice versa) keeping the operator order, and
the result is re-evaluated on the vacuum.  With the basis conventions of
:mod:`ptdimer.fock` this gives::

    P|1> = -|1>   P|2> = |5>   P|3> = -|4>
    P|4> = -|3>   P|5> = |2>   P|6> = -|6>

so ``P @ P`` is the identity.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import charpoly
from .fock import (BASIS, BASIS_MASKS, SPINS, SZ_BLOCKS, FockVector,
                   HamiltonianMatrix, StateVector, apply_creation)


class BlockStructureError(RuntimeError):
    """A Hamiltonian couples different Sz sectors."""


@dataclass(frozen=True)
class SzBlocks:
    plus_one: np.ndarray
    zero: np.ndarray
    minus_one: np.ndarray

    def assemble(self) -> np.ndarray:
        h = np.zeros((6, 6), dtype=complex)
        h[0, 0] = self.plus_one[0, 0]
        h[1:5, 1:5] = self.zero
        h[5, 5] = self.minus_one[0, 0]
        return h


def _entries(h) -> np.ndarray:
    return h.entries if isinstance(h, HamiltonianMatrix) else np.asarray(h, dtype=complex)


def split_sz(h) -> SzBlocks:
    """Split a 6x6 Hamiltonian into its Sz = +1, 0, -1 blocks.

    Raises ``BlockStructureError`` if any entry couples two sectors.
    """
    a = _entries(h)
    mask = np.zeros((6, 6), dtype=bool)
    for _, rows in SZ_BLOCKS:
        mask[np.ix_(rows, rows)] = True
    leaked = np.argwhere((a != 0) & ~mask)
    if leaked.size:
        i, j = leaked[0] + 1
        raise BlockStructureError(f"entry ({i},{j}) = {a[i - 1, j - 1]} couples Sz sectors")
    return SzBlocks(a[0:1, 0:1].copy(), a[1:5, 1:5].copy(), a[5:6, 5:6].copy())


def sz0_charpoly(h) -> np.ndarray:
    """Ascending coefficients of ``det(E I - H_{Sz=0})``, by exact cofactor
    expansion."""
    return charpoly.charpoly(split_sz(h).zero)


def check_pt_characteristic(h, tol: float = 1e-12) -> bool:
    """True iff the Sz=0 characteristic polynomial has real coefficients
    (every ``|Im| < tol``)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    coeffs = sz0_charpoly(h)
    return bool(np.all(np.abs(coeffs.imag) < tol))


def _swap_sites(ops):
    return [(3 - site, spin) for site, spin in ops]


def _creation_product(mask):
    # canonical product, leftmost first: highest mode leftmost
    ops = []
    for mode in reversed(range(4)):
        if mask >> mode & 1:
            ops.append((mode // 2 + 1, SPINS[mode % 2]))
    return ops


def parity_matrix() -> np.ndarray:
    """Site-swap operator on the N=2 basis, with fermionic reordering signs."""
    p = np.zeros((6, 6))
    for j, mask in enumerate(BASIS_MASKS):
        vec = FockVector.vacuum()
        for site, spin in reversed(_swap_sites(_creation_product(mask))):
            vec = apply_creation(vec, site, spin)
        p[:, j] = StateVector.from_fock(vec).amplitudes.real
    return p


PARITY = parity_matrix()
PARITY.setflags(write=False)


def pt_image(h, strict_conjugation: bool = False) -> np.ndarray:
    """``P T(h) P^-1`` as a matrix.

    By default time reversal acts as in the operator-level argument:
    ``eps_+ <-> eps_-`` and ``lambda -> -lambda``.  On matrices built
    from real parameters that is exactly the conjugate transpose.
    ``strict_conjugation=True`` uses plain complex conjugation instead,
    which leaves a real ``lambda`` untouched.
    """
    a = _entries(h)
    reversed_h = a.conj() if strict_conjugation else a.conj().T
    return PARITY @ reversed_h @ PARITY.T


def check_pt_similarity(h, tol: float = 1e-12, strict_conjugation: bool = False) -> bool:
    """True iff ``max |P T(h) P^-1 - h| < tol`` (see :func:`pt_image`)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    diff = pt_image(h, strict_conjugation) - _entries(h)
    return bool(np.max(np.abs(diff)) < tol)


def basis_labels() -> list:
    return [s.label() for s in BASIS]
