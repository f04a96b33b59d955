from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from acmoduli import generators
from acmoduli.cohomology import les_of_pair
from acmoduli.errors import DegenerateForm, NotACocycle
from acmoduli.intersection import (
    congruent,
    cup_pair,
    gram_on_V,
    signature_counts,
    signature_split,
)

from helpers import relabel

EXPECTED = {"ball4": (0, 0), "d2xt2": (0, 0), "cp2_minus_ball": (1, 0),
            "t4_minus_ball": (3, 3)}


@pytest.fixture(scope="module")
def data():
    out = {}
    for name in EXPECTED:
        pair = generators.generate_mesh(name)
        prof = les_of_pair(pair)
        out[name] = (pair, prof, gram_on_V(pair, profile=prof))
    return out


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_signature(data, name):
    _, prof, pd = data[name]
    assert (pd.v_plus, pd.v_minus) == EXPECTED[name]
    assert pd.v_plus + pd.v_minus == prof.dim_V


def test_cp2_form_is_plus_one(data):
    assert data["cp2_minus_ball"][2].gram == [[Fraction(1)]]


def test_reversed_orientation_flips_signature(data):
    pair, _, pd = data["cp2_minus_ball"]
    rev = gram_on_V(pair.reversed())
    assert (rev.v_plus, rev.v_minus) == (pd.v_minus, pd.v_plus)


def test_t4_gram_symmetric_unimodular(data):
    G = data["t4_minus_ball"][2].gram
    n = len(G)
    assert all(G[i][j] == G[j][i] for i in range(n) for j in range(n))
    # the form on H^2(T^4) is even and unimodular: determinant +-1
    import sympy

    assert abs(sympy.Matrix(G).det()) == 1
    assert all(G[i][i] % 2 == 0 for i in range(n))


def test_cocycle_checks(data):
    pair, prof, _ = data["cp2_minus_ball"]
    z = prof.V_basis[0]
    bad = dict(z)
    key = next(iter(bad))
    bad[key] += 1
    with pytest.raises(NotACocycle):
        cup_pair(bad, z, pair)
    link_face = pair.link.simplices[2][0]
    with pytest.raises(NotACocycle):
        cup_pair({link_face: 1}, z, pair)


def test_signature_counts_examples():
    assert signature_counts([[0, 1], [1, 0]]) == (1, 1, 0)
    assert signature_counts([[2, 0], [0, -3]]) == (1, 1, 0)
    assert signature_counts([[1, 1], [1, 1]]) == (1, 0, 1)
    with pytest.raises(DegenerateForm):
        signature_split([[0, 0], [0, 0]])
    with pytest.raises(ValueError):
        signature_counts([[0, 1], [2, 0]])


def _rand_matrix(rng, n):
    while True:
        P = [[Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4))) for _ in range(n)]
             for _ in range(n)]
        import sympy

        if sympy.Matrix(P).det() != 0:
            return P


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_sylvester_invariance(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    A = [[Fraction(int(rng.integers(-4, 5))) for _ in range(n)] for _ in range(n)]
    G = [[A[i][j] + A[j][i] for j in range(n)] for i in range(n)]
    assert signature_counts(congruent(G, _rand_matrix(rng, n))) == signature_counts(G)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_signature_matches_eigenvalues(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 7))
    A = rng.integers(-5, 6, size=(n, n))
    G = (A + A.T).tolist()
    pos, neg, zero = signature_counts(G)
    ev = np.linalg.eigvalsh(np.array(G, dtype=float))
    tol = 1e-9 * max(1.0, np.abs(ev).max())
    assert (pos, neg, zero) == (int((ev > tol).sum()), int((ev < -tol).sum()),
                                int((np.abs(ev) <= tol).sum()))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_relabelling_keeps_signature(seed):
    pair = relabel(generators.t4_minus_ball(), np.random.default_rng(seed))
    pd = gram_on_V(pair)
    assert (pd.v_plus, pd.v_minus) == (3, 3)
