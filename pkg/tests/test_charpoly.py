import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_params
from ptdimer import charpoly
from ptdimer.fock import build_hamiltonian
from ptdimer.rootfind import RootFindingError, aberth_roots, horner, initial_guesses


def test_gaussian_integer_scaling():
    a = np.array([[0.5, 0.25j], [1.0, -3.0]])
    b, k = charpoly.to_gaussian_integers(a)
    assert k == 2
    assert b == [[(2, 0), (0, 1)], [(4, 0), (-12, 0)]]


def test_charpoly_of_diagonal():
    p = charpoly.charpoly(np.diag([1.0, 2.0, 3.0]))
    assert np.array_equal(p, [-6, 11, -6, 1])


def test_charpoly_matches_numpy(rng):
    for _ in range(30):
        a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        ours = charpoly.charpoly(a)[::-1]
        ref = np.poly(a)
        assert np.allclose(ours, ref, atol=1e-9)


def test_exact_charpoly_coefficients_are_real_for_model(rng):
    for _ in range(20):
        exact = charpoly.charpoly_exact(build_hamiltonian(random_params(rng)).entries)
        assert all(c[1] == 0 for c in exact)


def test_squarefree_decomposition_multiplicities():
    # (z-1)^3 (z+2)^2 (z-5)
    roots = [1, 1, 1, -2, -2, 5]
    a = np.diag(np.array(roots, dtype=float))
    parts = charpoly.squarefree_decomposition(charpoly.charpoly_exact(a))
    by_mult = {m: charpoly.to_complex(f) for f, m in parts}
    assert set(by_mult) == {1, 2, 3}
    assert np.array_equal(by_mult[3], [-1, 1])
    assert np.array_equal(by_mult[2], [2, 1])
    assert np.array_equal(by_mult[1], [-5, 1])


def test_triple_root_always_present(rng):
    for _ in range(20):
        p = random_params(rng)
        parts = charpoly.squarefree_decomposition(charpoly.charpoly_exact(build_hamiltonian(p).entries))
        assert sum((len(f) - 1) * m for f, m in parts) == 6
        assert max(m for _, m in parts) >= 3


def test_horner():
    val, der = horner([1, -3, 0, 2], 2.0)  # 2z^3 - 3z + 1
    assert val == 11 and der == 21


def test_initial_guesses_enclose_roots():
    coeffs = np.poly([3.0, -1.0, 2j, -2j])[::-1]
    guesses = initial_guesses(list(coeffs))
    center = np.mean(guesses)
    radius = abs(guesses[0] - center)
    assert all(abs(r - center) < radius for r in (3.0, -1.0, 2j, -2j))


def test_aberth_known_roots():
    roots = [1.5, -0.5, 0.25 + 2j, 0.25 - 2j, 4.0]
    found = aberth_roots(np.poly(roots)[::-1])
    for r in roots:
        assert np.min(np.abs(found - r)) < 1e-12


def test_aberth_linear_and_constant():
    assert np.allclose(aberth_roots([2.0, 4.0]), [-0.5])
    assert aberth_roots([3.0]).size == 0


def test_aberth_budget_exhausted():
    with pytest.raises(RootFindingError) as exc:
        aberth_roots(np.poly([1, 2, 3, 4, 5, 6, 7])[::-1], max_iter=1)
    assert len(exc.value.residuals) == 7


@settings(max_examples=60, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
                min_size=2, max_size=6, unique=True))
def test_aberth_property(roots):
    roots = np.array(roots)
    gaps = np.abs(roots[:, None] - roots[None, :]) + np.eye(len(roots))
    if gaps.min() < 1e-2:
        return
    found = aberth_roots(np.poly(roots)[::-1])
    for r in roots:
        assert np.min(np.abs(found - r)) < 1e-7
