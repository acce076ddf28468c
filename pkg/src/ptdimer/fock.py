"""Two-site, two-electron Fock space and Hamiltonian assembly.

Modes are ordered ``1up < 1dn < 2up < 2dn`` (bits 0..3 of an occupation
mask).  A basis ket is the product of creation operators with the
lowest mode rightmost, i.e. site-1 operators act first and, within a
site, the up-spin operator acts first::

    |up, dn> = c+_{2dn} c+_{1up} |0>

The sixteen Fock states are indexed ``mask + 1`` which reproduces the
ordering ``|0,0>, |up,0>, |dn,0>, |updn,0>, |0,up>, ...``.  The N=2
sector used for all matrices is::

    1: |up,up>   2: |0,updn>   3: |up,dn>
    4: |dn,up>   5: |updn,0>   6: |dn,dn>
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

UP, DOWN = "up", "down"
SPINS = (UP, DOWN)
SITES = (1, 2)

FOCK_DIM = 16

_OCC_LABELS = {0: "0", 1: "↑", 2: "↓", 3: "↑↓"}


class SectorViolation(ValueError):
    """An operator result has weight outside the N=2 sector."""


def mode_index(site: int, spin: str) -> int:
    if site not in SITES:
        raise ValueError(f"site must be 1 or 2, got {site!r}")
    if spin not in SPINS:
        raise ValueError(f"spin must be 'up' or 'down', got {spin!r}")
    return 2 * (site - 1) + (0 if spin == UP else 1)


def _sign_past(mask: int, mode: int) -> int:
    # operators for modes above `mode` stand to the left in the canonical product
    return -1 if bin(mask >> (mode + 1)).count("1") % 2 else 1


@dataclass(frozen=True)
class DimerParams:
    """Real parameters of the PT-symmetric Hubbard dimer.

    ``epsilon`` orbital energy, ``t`` hopping, ``lam`` antisymmetric
    (dissipative) hopping, ``gamma`` balanced gain/loss, ``u`` on-site
    interaction.
    """

    epsilon: float = 0.0
    t: float = 1.0
    lam: float = 0.0
    gamma: float = 0.0
    u: float = 0.0

    def __post_init__(self):
        for name in ("epsilon", "t", "lam", "gamma", "u"):
            value = getattr(self, name)
            if isinstance(value, complex) or not math.isfinite(value):
                raise ValueError(f"{name} must be a finite real number, got {value!r}")
            object.__setattr__(self, name, float(value))

    @property
    def t_plus(self) -> float:
        return self.t + self.lam

    @property
    def t_minus(self) -> float:
        return self.t - self.lam

    @property
    def eps_plus(self) -> complex:
        """Site-1 orbital energy ``epsilon + i gamma``."""
        return complex(self.epsilon, self.gamma)

    @property
    def eps_minus(self) -> complex:
        """Site-2 orbital energy ``epsilon - i gamma``."""
        return complex(self.epsilon, -self.gamma)

    def replace(self, **changes) -> "DimerParams":
        fields = dict(epsilon=self.epsilon, t=self.t, lam=self.lam,
                      gamma=self.gamma, u=self.u)
        unknown = set(changes) - set(fields)
        if unknown:
            raise TypeError(f"unknown parameter(s): {sorted(unknown)}")
        fields.update(changes)
        return DimerParams(**fields)


@dataclass(frozen=True)
class FockState:
    index: int
    occupations: tuple
    sz: float  # spin projection, units of hbar

    @property
    def mask(self) -> int:
        return _occ_code(self.occupations[0]) | (_occ_code(self.occupations[1]) << 2)

    def label(self) -> str:
        return "|" + ",".join(_OCC_LABELS[_occ_code(o)] for o in self.occupations) + ">"


_OCC_NAMES = {0: "empty", 1: "up", 2: "down", 3: "updown"}


def _occ_code(name: str) -> int:
    return {v: k for k, v in _OCC_NAMES.items()}[name]


def _state_from_mask(index: int, mask: int) -> FockState:
    occ = (_OCC_NAMES[mask & 3], _OCC_NAMES[(mask >> 2) & 3])
    n_up = (mask & 1) + ((mask >> 2) & 1)
    n_dn = ((mask >> 1) & 1) + ((mask >> 3) & 1)
    return FockState(index=index, occupations=occ, sz=(n_up - n_dn) / 2)


# |1>=|up,up>, |2>=|0,updn>, |3>=|up,dn>, |4>=|dn,up>, |5>=|updn,0>, |6>=|dn,dn>
BASIS_MASKS = (0b0101, 0b1100, 0b1001, 0b0110, 0b0011, 0b1010)
BASIS = tuple(_state_from_mask(i + 1, m) for i, m in enumerate(BASIS_MASKS))
_MASK_TO_BASIS = {m: i for i, m in enumerate(BASIS_MASKS)}

# index partition {1}, {2,3,4,5}, {6} (0-based rows below)
SZ_BLOCKS = ((+1, (0,)), (0, (1, 2, 3, 4)), (-1, (5,)))


def _readonly(values, dim: int) -> np.ndarray:
    arr = np.array(values, dtype=complex).reshape(dim)
    arr.setflags(write=False)
    return arr


class _Vector:
    dim = 0

    def __init__(self, amplitudes: Iterable[complex]):
        self._amps = _readonly(list(amplitudes), self.dim)

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amps

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(self._amps + other._amps)

    def __sub__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(self._amps - other._amps)

    def __mul__(self, scalar):
        return type(self)(self._amps * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return type(self)(-self._amps)

    def __eq__(self, other):
        return type(other) is type(self) and np.array_equal(self._amps, other._amps)

    def __hash__(self):
        return hash((type(self), self._amps.tobytes()))

    def norm2(self) -> float:
        return float(np.sum(np.abs(self._amps) ** 2))

    def is_zero(self) -> bool:
        return not np.any(self._amps)

    def __repr__(self):
        return f"{type(self).__name__}({self._amps.tolist()})"


class FockVector(_Vector):
    """Amplitudes over all sixteen two-site Fock states (entry = mask)."""

    dim = FOCK_DIM

    @classmethod
    def basis(cls, mask: int) -> "FockVector":
        amps = np.zeros(FOCK_DIM, dtype=complex)
        amps[mask] = 1.0
        return cls(amps)

    @classmethod
    def vacuum(cls) -> "FockVector":
        return cls.basis(0)

    def particle_numbers(self) -> set:
        return {bin(m).count("1") for m in np.flatnonzero(self._amps)}


class StateVector(_Vector):
    """Amplitudes over the six N=2 basis kets (entry ``i`` = ket ``i+1``)."""

    dim = 6

    @classmethod
    def basis(cls, index: int) -> "StateVector":
        if not 1 <= index <= 6:
            raise ValueError(f"basis index must be 1..6, got {index}")
        amps = np.zeros(6, dtype=complex)
        amps[index - 1] = 1.0
        return cls(amps)

    def to_fock(self) -> FockVector:
        amps = np.zeros(FOCK_DIM, dtype=complex)
        for i, m in enumerate(BASIS_MASKS):
            amps[m] = self._amps[i]
        return FockVector(amps)

    @classmethod
    def from_fock(cls, vec: FockVector) -> "StateVector":
        """Project onto the N=2 basis; nonzero weight elsewhere is an error."""
        amps = vec.amplitudes
        outside = [m for m in np.flatnonzero(amps) if m not in _MASK_TO_BASIS]
        if outside:
            labels = ", ".join(_state_from_mask(0, m).label() for m in outside)
            raise SectorViolation(f"result has weight outside N=2 on {labels}")
        return cls([amps[m] for m in BASIS_MASKS])

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self._amps, other._amps))


def _apply(vec: FockVector, mode: int, dagger: bool) -> FockVector:
    out = np.zeros(FOCK_DIM, dtype=complex)
    bit = 1 << mode
    for mask in np.flatnonzero(vec.amplitudes):
        occupied = bool(mask & bit)
        if occupied == dagger:
            continue
        out[mask ^ bit] += _sign_past(mask, mode) * vec.amplitudes[mask]
    return FockVector(out)


def _dispatch(state, site, spin, dagger):
    mode = mode_index(site, spin)
    if isinstance(state, FockVector):
        return _apply(state, mode, dagger)
    if isinstance(state, StateVector):
        return StateVector.from_fock(_apply(state.to_fock(), mode, dagger))
    raise TypeError(f"expected FockVector or StateVector, got {type(state).__name__}")


def apply_creation(state, site: int, spin: str):
    """Apply ``c+_{site,spin}``.

    A ``FockVector`` maps to a ``FockVector``.  A ``StateVector`` result
    is projected back to N=2, so any nonzero result raises
    ``SectorViolation``; compose operators on ``FockVector`` instead.
    """
    return _dispatch(state, site, spin, dagger=True)


def apply_annihilation(state, site: int, spin: str):
    """Apply ``c_{site,spin}``; same vector-type rules as ``apply_creation``."""
    return _dispatch(state, site, spin, dagger=False)


# an operator string is a sequence of (dagger, site, spin), leftmost acts last
OpString = Sequence[tuple]


def apply_string(vec: FockVector, ops: OpString) -> FockVector:
    for dagger, site, spin in reversed(ops):
        vec = _apply(vec, mode_index(site, spin), dagger)
    return vec


def number_op(site, spin):
    return ((True, site, spin), (False, site, spin))


def hamiltonian_terms(params: DimerParams) -> list:
    """Second-quantized terms ``(coefficient, operator string)`` of the model.

    One-body terms come first so that diagonal entries accumulate as
    ``eps_a + eps_b (+ U)``.
    """
    terms = []
    for spin in SPINS:
        terms.append((params.eps_plus, number_op(1, spin)))
        terms.append((params.eps_minus, number_op(2, spin)))
        terms.append((params.t_plus, ((True, 1, spin), (False, 2, spin))))
        terms.append((params.t_minus, ((True, 2, spin), (False, 1, spin))))
    for site in SITES:
        terms.append((params.u, number_op(site, UP) + number_op(site, DOWN)))
    return terms


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    entries: np.ndarray
    params: DimerParams | None = None

    block_layout = SZ_BLOCKS

    def __post_init__(self):
        arr = np.array(self.entries, dtype=complex)
        if arr.shape != (6, 6):
            raise ValueError(f"expected a 6x6 matrix, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    def __getitem__(self, key):
        return self.entries[key]

    def entry(self, i: int, j: int) -> complex:
        """1-based matrix element ``<i|H|j>``."""
        return complex(self.entries[i - 1, j - 1])

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def is_hermitian(self) -> bool:
        return bool(np.array_equal(self.entries, self.entries.conj().T))

    def with_entry(self, i: int, j: int, value: complex) -> "HamiltonianMatrix":
        arr = self.entries.copy()
        arr[i - 1, j - 1] = value
        return HamiltonianMatrix(arr, None)


def _string_on_mask(mask: int, ops) -> tuple:
    """``(sign, mask)`` of an operator string acting on one Fock state;
    sign 0 when the result vanishes."""
    sign = 1
    for dagger, site, spin in reversed(ops):
        mode = mode_index(site, spin)
        bit = 1 << mode
        if bool(mask & bit) == dagger:
            return 0, mask
        sign *= _sign_past(mask, mode)
        mask ^= bit
    return sign, mask


@lru_cache(maxsize=None)
def _basis_action(ops) -> tuple:
    # parameter independent: which basis columns the string maps where
    out = []
    for j, mask in enumerate(BASIS_MASKS):
        sign, m = _string_on_mask(mask, ops)
        if sign:
            if m not in _MASK_TO_BASIS:
                raise SectorViolation(f"operator string {ops} leaves the N=2 sector")
            out.append((j, _MASK_TO_BASIS[m], complex(sign)))
    return tuple(out)


def build_hamiltonian(params: DimerParams) -> HamiltonianMatrix:
    """Matrix ``<i|H|j>`` obtained by acting with every term on each basis ket."""
    h = np.zeros((6, 6), dtype=complex)
    for coef, ops in hamiltonian_terms(params):
        for j, i, sign in _basis_action(tuple(ops)):
            h[i, j] += coef * sign
    return HamiltonianMatrix(h, params)
