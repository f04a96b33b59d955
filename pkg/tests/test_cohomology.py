import pytest
from hypothesis import given, settings, strategies as st

from acmoduli import generators
from acmoduli.cohomology import (
    REDUCED_NODES,
    betti,
    dim_v_direct,
    dim_v_formula,
    les_of_pair,
    poincare_duality_defects,
    relative_betti,
)
from acmoduli.errors import ComplexError
from acmoduli.exact import RationalMatrix
from acmoduli.simplicial import build_complex, extract_pair

from helpers import random_pair, relabel

# (b(C), b(L), b_cs(C), dim V)
EXPECTED = {
    "ball4": ([1, 0, 0, 0, 0], [1, 0, 0, 1], [0, 0, 0, 0, 1], 0),
    "d2xt2": ([1, 2, 1, 0, 0], [1, 3, 3, 1], [0, 0, 1, 2, 1], 0),
    "cp2_minus_ball": ([1, 0, 1, 0, 0], [1, 0, 0, 1], [0, 0, 1, 0, 1], 1),
    "t4_minus_ball": ([1, 4, 6, 4, 0], [1, 0, 0, 1], [0, 4, 6, 4, 1], 6),
}


@pytest.fixture(scope="module")
def profiles():
    return {name: les_of_pair(generators.generate_mesh(name)) for name in EXPECTED}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_betti_numbers(profiles, name):
    bC, bL, bcs, dv = EXPECTED[name]
    p = profiles[name]
    assert (p.b_C, p.b_L, p.b_cs, p.dim_V) == (bC, bL, bcs, dv)


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_les_exact_and_duality(profiles, name):
    p = profiles[name]
    assert not any(p.exactness_defects.values())
    c, l = poincare_duality_defects(p)
    assert not any(c) and not any(l)


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_dim_v_two_ways(profiles, name):
    assert dim_v_formula(profiles[name]) == dim_v_direct(profiles[name])[0]


def test_nodes_in_source_order(profiles):
    p = profiles["d2xt2"]
    names = [n for n, _ in p.les_nodes]
    assert len(names) == 14 and names[0] == "H0_cs" and names[-1] == "H4(C)"
    assert [n for n in names if n in REDUCED_NODES] == list(REDUCED_NODES)
    assert p.node_dim("H0_cs") == 0 and p.node_dim("H4(C)") == 0


def test_closed_manifold_betti():
    assert betti(generators.cp2()) == [1, 0, 1, 0, 1]
    assert betti(generators.t4(3)) == [1, 4, 6, 4, 1]
    assert betti(generators.t3(3).complex) == [1, 3, 3, 1]


def test_relative_equals_cs(profiles):
    pair = generators.ball4()
    assert relative_betti(pair) == profiles["ball4"].b_cs


def test_compact_rejected():
    X = build_complex([(0, 1, 2, 3, 4)])
    pair = extract_pair(X)
    pair.link = build_complex([(0,)])
    pair.link.simplices = ()
    with pytest.raises(ComplexError):
        les_of_pair(pair)


def test_disconnected_link():
    # I x T^3 has two boundary tori; the alternating sum must still match
    pair = random_pair(11)
    p = les_of_pair(pair)
    assert p.b_L[0] == 2
    assert dim_v_formula(p) == p.dim_V


def test_rational_rank():
    M = RationalMatrix.from_dense([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    assert M.rank() == 2
    M = RationalMatrix.from_dense([["1/2", 1], [1, 2]])
    assert M.rank() == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_relabelling_invariance(seed):
    import numpy as np

    pair = generators.cp2_minus_ball()
    p0 = les_of_pair(pair)
    q = les_of_pair(relabel(pair, np.random.default_rng(seed)))
    assert (q.b_C, q.b_L, q.b_cs, q.dim_V, q.les_ranks) == \
        (p0.b_C, p0.b_L, p0.b_cs, p0.dim_V, p0.les_ranks)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_pairs_exact(seed):
    p = les_of_pair(random_pair(seed))
    assert not any(p.exactness_defects.values())
    assert dim_v_formula(p) == p.dim_V
    c, l = poincare_duality_defects(p)
    assert not any(c) and not any(l)
