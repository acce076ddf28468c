import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_params
from ptdimer.fock import DimerParams, StateVector, build_hamiltonian
from ptdimer.spectra import (CubicCoefficients, NotAnEigenvalue, Spectrum, cardano_spectrum,
                             closed_form_spectrum, conjugation_defect, cubic_discriminant,
                             cubic_roots, oracle_spectrum, overlap, reduced_cubic,
                             sort_values, spectral_distance, sz0_eigenvectors, tls_eigenvalues,
                             track_complex_pair)

# dyadic grid: every matrix entry then represents its parameters exactly,
# so the matrix-based oracle and the parameter-based formulas see one problem
coord = st.integers(-3 * 2 ** 20, 3 * 2 ** 20).map(lambda k: k / 2 ** 20)


def params_strategy(gamma_zero=False):
    g = st.just(0.0) if gamma_zero else coord
    return st.builds(DimerParams, epsilon=coord, t=coord, lam=coord, gamma=g, u=coord)


def multiset_close(values, expected, tol):
    return spectral_distance(np.array(values), np.array(expected, dtype=complex)) < tol


# --- two-level system ---------------------------------------------------------

def test_tls_gain_loss():
    a, b = tls_eigenvalues(0.0, 1.0, gamma=0.6)
    assert abs(a - 0.8) < 1e-15 and abs(b + 0.8) < 1e-15


def test_tls_ep():
    assert tls_eigenvalues(0.0, 1.0, lam=1.0) == (0, 0)


def test_tls_broken():
    vals = tls_eigenvalues(0.5, 1.0, lam=1.25)
    assert multiset_close(vals, [0.5 + 0.75j, 0.5 - 0.75j], 1e-15)


def test_tls_rejects_both():
    with pytest.raises(ValueError):
        tls_eigenvalues(0.0, 1.0, gamma=0.1, lam=0.1)


# --- closed form --------------------------------------------------------------

def test_closed_form_bonding_antibonding():
    s = closed_form_spectrum(DimerParams(t=1.0))
    assert multiset_close(s.values, [0, 0, 0, 0, -2, 2], 1e-15)


def test_closed_form_broken_pair():
    s = closed_form_spectrum(DimerParams(epsilon=0.5, t=1.0, lam=1.25))
    assert multiset_close(s.values, [1, 1, 1, 1, 1 + 1.5j, 1 - 1.5j], 1e-14)


def test_closed_form_interacting():
    s = closed_form_spectrum(DimerParams(epsilon=0.5, t=1.0, u=2.0))
    r5 = math.sqrt(5)
    assert multiset_close(s.values, [1, 1, 1, 3, 2 + r5, 2 - r5], 1e-14)


def test_closed_form_rejects_gamma():
    with pytest.raises(ValueError):
        closed_form_spectrum(DimerParams(t=1.0, gamma=0.1))


# --- reduced cubic ------------------------------------------------------------

def test_reduced_cubic_examples():
    c = reduced_cubic(DimerParams(t=1.0, gamma=0.1, u=2.0))
    assert abs(c.k - 3.96) < 1e-14 and abs(c.l - 0.08) < 1e-14
    assert c.as_tuple() == (1.0, -2.0, -c.k, -c.l)
    c = reduced_cubic(DimerParams(t=1.0, gamma=0.5, lam=0.5))
    assert c.k == 2.0 and c.l == 0.0


def test_reduced_cubic_gamma_zero():
    p = DimerParams(t=1.3, lam=0.4, u=1.0)
    c = reduced_cubic(p)
    assert abs(c.k - 4 * p.t_plus * p.t_minus) < 1e-14 and c.l == 0


def test_discriminant_examples():
    assert cubic_discriminant(reduced_cubic(DimerParams(t=1.0))) == 256
    assert cubic_discriminant(CubicCoefficients(1.0, 0.0, 4.0, 0.0, 0.0, -4.0, 0.0, 0.0)) == -256


def test_discriminant_flips_at_closed_form_boundary():
    for u in (-4.0, -1.0, 0.0, 2.0, 3.5):
        edge = math.sqrt(1 + u * u / 16)
        below = cubic_discriminant(reduced_cubic(DimerParams(t=1.0, lam=edge - 1e-6, u=u)))
        above = cubic_discriminant(reduced_cubic(DimerParams(t=1.0, lam=edge + 1e-6, u=u)))
        assert below > 0 > above


def vieta_defects(c, roots):
    x1, x2, x3 = roots
    return (abs(x1 + x2 + x3 - c.u), abs(x1 * x2 + x1 * x3 + x2 * x3 + c.k), abs(x1 * x2 * x3 - c.l))


def test_vieta(rng):
    for _ in range(2000):
        c = reduced_cubic(random_params(rng))
        assert max(vieta_defects(c, cubic_roots(c))) < 1e-9


def test_cubic_repeated_roots():
    # X^3 - 3X + 2 = (X-1)^2 (X+2)
    c = CubicCoefficients(1.0, 0.0, -3.0, 2.0, 0.0, 3.0, -2.0, 0.0)
    assert multiset_close(cubic_roots(c), [1, 1, -2], 1e-12)
    c = CubicCoefficients(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    assert cubic_roots(c) == (0, 0, 0)


def test_cubic_requires_monic():
    with pytest.raises(ValueError):
        cubic_roots(CubicCoefficients(2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0))


# --- cardano and oracle -------------------------------------------------------

def test_cardano_matches_closed_form_example():
    p = DimerParams(epsilon=0.5, t=1.0, u=2.0)
    assert spectral_distance(cardano_spectrum(p), closed_form_spectrum(p)) < 1e-10


def test_cardano_u_zero():
    for p in (DimerParams(epsilon=0.5, t=1.0, gamma=0.3, lam=0.4),
              DimerParams(epsilon=-1.0, t=0.7, gamma=0.9, lam=0.2)):
        r = 2 * cmath.sqrt(p.t ** 2 - p.gamma ** 2 - p.lam ** 2)
        e = 2 * p.epsilon
        assert multiset_close(cardano_spectrum(p).values, [e, e, e, e, e + r, e - r], 1e-12)


def test_oracle_hermitian_example():
    s = oracle_spectrum(build_hamiltonian(DimerParams(epsilon=0.5, t=1.0)))
    assert s.method == "oracle"
    assert multiset_close(s.values, [1, 1, 1, 1, -1, 3], 1e-12)
    assert all(v.imag == 0 for v in s.values)


def test_oracle_accepts_params_and_arrays():
    p = DimerParams(epsilon=0.5, t=1.0, gamma=0.1, u=2.0)
    a = oracle_spectrum(p)
    b = oracle_spectrum(build_hamiltonian(p).entries)
    assert a.values == b.values and a.params == p and b.params is None


def test_methods_agree(rng):
    for _ in range(300):
        p = random_params(rng)
        assert spectral_distance(cardano_spectrum(p), oracle_spectrum(p)) < 1e-9
        q = p.replace(gamma=0.0)
        assert spectral_distance(closed_form_spectrum(q), cardano_spectrum(q)) < 1e-9
        assert spectral_distance(closed_form_spectrum(q), oracle_spectrum(q)) < 1e-9


def test_three_ep_point_against_oracle():
    p = DimerParams(epsilon=0.5, t=1.0, gamma=0.1, u=2.0)
    s = cardano_spectrum(p)
    assert spectral_distance(s, oracle_spectrum(p)) < 1e-12
    assert not s.has_complex_pair()


def test_tls_consistency(rng):
    for _ in range(200):
        eps, t = rng.uniform(-3, 3, 2)
        gamma = rng.uniform(-3, 3)
        p = DimerParams(epsilon=eps, t=t, gamma=gamma)
        a, b = tls_eigenvalues(eps, t, gamma=gamma)
        pair = [2 * a, 2 * b]
        e = 2 * eps
        assert multiset_close(cardano_spectrum(p).values, [e, e, e, e] + pair, 1e-12)


def test_spectrum_sorted_and_sum(rng):
    for _ in range(100):
        p = random_params(rng)
        s = cardano_spectrum(p)
        assert list(s.values) == sorted(s.values, key=lambda z: (z.real, z.imag))
        assert abs(sum(s.values) - (12 * p.epsilon + 2 * p.u)) < 1e-9
        assert conjugation_defect(s) < 1e-9


def test_sort_values():
    assert sort_values([1 + 1j, 1 - 1j, 0.5]) == (0.5, 1 - 1j, 1 + 1j)


def test_spectral_distance_size_mismatch():
    with pytest.raises(ValueError):
        spectral_distance([1, 2], [1])


@settings(max_examples=150, deadline=None)
@given(params_strategy())
def test_cardano_oracle_property(p):
    assert spectral_distance(cardano_spectrum(p), oracle_spectrum(p)) < 1e-9


@settings(max_examples=150, deadline=None)
@given(params_strategy(gamma_zero=True))
def test_closed_form_property(p):
    s = closed_form_spectrum(p)
    assert spectral_distance(s, cardano_spectrum(p)) < 1e-9
    assert conjugation_defect(s) < 1e-9


# --- eigenvectors -------------------------------------------------------------

def test_antibonding_eigenvector():
    p = DimerParams(epsilon=0.5, t=1.0)
    w = sz0_eigenvectors(p, 2 * (p.epsilon + p.t))
    h = build_hamiltonian(p).entries
    assert np.linalg.norm(h @ w.amplitudes - 3 * w.amplitudes) < 1e-12
    assert abs(w.norm2() - 1) < 1e-14
    assert w.amplitudes[0] == 0 and w.amplitudes[5] == 0


def test_non_eigenvalue_rejected():
    with pytest.raises(NotAnEigenvalue):
        sz0_eigenvectors(DimerParams(epsilon=0.5, t=1.0), 2.5)


def test_hermitian_eigenvectors_orthogonal():
    p = DimerParams(epsilon=0.5, t=1.0, u=2.0)
    vals = [3.0, 2 + math.sqrt(5), 2 - math.sqrt(5)]
    vecs = [sz0_eigenvectors(p, v) for v in vals]
    for i in range(3):
        for j in range(i + 1, 3):
            assert overlap(vecs[i], vecs[j]) < 1e-10


def pair_overlap(lam):
    p = DimerParams(epsilon=0.5, t=1.0, lam=lam)
    r = 2 * math.sqrt(1 - lam * lam)
    return overlap(sz0_eigenvectors(p, 1 + r), sz0_eigenvectors(p, 1 - r))


def test_coalescence_monotone():
    overlaps = [pair_overlap(1 - 10.0 ** -k) for k in range(2, 7)]
    assert all(a < b for a, b in zip(overlaps, overlaps[1:]))
    assert overlaps[-1] > 1 - 1e-3
    assert pair_overlap(0.0) < 1e-10


def test_overlap_of_parallel_vectors():
    v = StateVector([0, 1, 1j, 0, 0, 0])
    assert abs(overlap(v, 2j * v) - 1) < 1e-15


# --- pair tracking ------------------------------------------------------------

def test_track_complex_pair():
    triples = [(3.0, 4.0, 0.5), (3.0, 2 + 1j, 2 - 1j), (3.1, 4.2, 0.6)]
    refs = [3.0, 3.0, 3.0]
    pairs = track_complex_pair(triples, refs)
    assert pairs[0] == (4.0, 0.5)
    assert pairs[1] == (2 + 1j, 2 - 1j)
    assert pairs[2] == (4.2, 0.6)


def test_track_follows_odd_level():
    # the odd level drifts above the pair; nearest-to-reference would pick wrong
    triples = [(1.0, 2.0, 0.0), (1.5, 2.2, 0.1), (2.1, 2.3, 0.2)]
    pairs = track_complex_pair(triples, [1.0, 2.2, 2.3])
    assert [p[0] for p in pairs] == [2.0, 2.2, 2.3]


def test_track_leading_run_backward():
    # the pair that breaks at the third point is (3.0, 3.4), not the
    # (4.0, -0.2) pair a reference seed at 3.0 would suggest
    triples = [(4.0, 2.9, -0.2), (3.6, 3.0, -0.1), (3.3 + 0.1j, 3.3 - 0.1j, 0.0)]
    pairs = track_complex_pair(triples, [3.0] * 3)
    assert pairs[0] == (4.0, 2.9)
    assert pairs[1] == (3.6, 3.0)


def test_track_through_crossing():
    # odd level 3 crossed by a pair level at the middle point
    triples = [(3.0, 3.5, 0.5), (3.0, 3.0, 1.0), (3.0, 2.5, 1.5), (2 + 1j, 2 - 1j, 3.0)]
    pairs = track_complex_pair(triples, [3.0] * 4)
    assert [p[0] for p in pairs[:3]] == [3.5, 3.0, 2.5]
