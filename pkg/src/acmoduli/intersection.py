"""Cup-product pairing on V = im(H^2_cs -> H^2) and its signature.

The pairing of a relative 2-cocycle with an absolute one is the
Alexander-Whitney product evaluated on the relative fundamental cycle:
``sum over oriented 4-simplices [v0..v4] of a(v0 v1 v2) * b(v2 v3 v4)``.
Because one factor vanishes on the boundary, the result only depends on the
two cohomology classes.
"""
import random
from dataclasses import dataclass
from fractions import Fraction

from .cohomology import _connecting_images, coboundary, les_of_pair
from .errors import DegenerateForm, NotACocycle


@dataclass
class PairingData:
    gram: list
    v_plus: int
    v_minus: int

    @property
    def dim(self):
        return len(self.gram)


def _check_cocycle(pair, cochain, relative):
    if coboundary(pair.total, 2, cochain):
        raise NotACocycle("cochain has nonzero coboundary")
    if relative:
        link = set(pair.link.simplices[2])
        if any(s in link for s, v in cochain.items() if v):
            raise NotACocycle("relative cochain does not vanish on the link")


def cup_pair(rel2, abs2, pair, check=True):
    """Evaluate rel2 u abs2 on the fundamental class of the pair.

    ``rel2`` must vanish on the link; both must be cocycles.
    """
    if check:
        _check_cocycle(pair, rel2, relative=True)
        _check_cocycle(pair, abs2, relative=False)
    total = 0
    for s, sign in zip(pair.total.top, pair.top_orientation):
        a = rel2.get(s[:3])
        if a:
            b = abs2.get(s[2:])
            if b:
                total += int(sign) * a * b
    return Fraction(total)


def _gram(pair, basis):
    n = len(basis)
    G = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            G[i][j] = cup_pair(basis[i], basis[j], pair, check=False)
    return G


def signature_counts(gram):
    """Counts (positive, negative, zero) of a symmetric rational matrix.

    Exact symmetric elimination: 1x1 diagonal pivots where available, a 2x2
    block pivot ``[[a, b], [b, c]]`` with ``a = c = 0`` otherwise (which
    contributes one positive and one negative square).
    """
    A = [[Fraction(x) for x in row] for row in gram]
    n = len(A)
    for i in range(n):
        for j in range(i):
            if A[i][j] != A[j][i]:
                raise ValueError("matrix is not symmetric")
    pos = neg = 0
    idx = list(range(n))
    while idx:
        piv = next((i for i in idx if A[i][i] != 0), None)
        if piv is not None:
            d = A[piv][piv]
            if d > 0:
                pos += 1
            else:
                neg += 1
            rest = [i for i in idx if i != piv]
            for i in rest:
                f = A[i][piv] / d
                if f:
                    for j in rest:
                        A[i][j] -= f * A[piv][j]
            idx = rest
            continue
        pair = next(((i, j) for i in idx for j in idx if i < j and A[i][j] != 0), None)
        if pair is None:
            return pos, neg, len(idx)
        p, q = pair
        b = A[p][q]
        pos += 1
        neg += 1
        rest = [i for i in idx if i not in pair]
        # Schur complement with inverse of [[0, b], [b, 0]] = [[0, 1/b], [1/b, 0]]
        for i in rest:
            for j in rest:
                A[i][j] -= (A[i][p] * A[q][j] + A[i][q] * A[p][j]) / b
        idx = rest
    return pos, neg, 0


def signature_split(data):
    """(dim V+, dim V-) for a PairingData or a Gram matrix."""
    gram = data.gram if isinstance(data, PairingData) else data
    pos, neg, zero = signature_counts(gram)
    if zero:
        raise DegenerateForm(f"pairing has a {zero}-dimensional radical")
    return pos, neg


def gram_on_V(pair, V_basis=None, profile=None, checks=True, seed=0):
    """Gram matrix of the cup pairing on a basis of V, with consistency checks.

    With ``checks`` the basis is verified to consist of relative cocycles,
    the matrix to be symmetric, the entries to be unchanged when a random
    absolute coboundary is added to the second factor and a random relative
    one to the first, and the pairing to vanish between V and the kernel of
    H^2_cs -> H^2 (the image of the connecting map).
    """
    if V_basis is None or (checks and profile is None):
        profile = profile or les_of_pair(pair)
        if V_basis is None:
            V_basis = profile.V_basis
    if checks:
        for z in V_basis:
            _check_cocycle(pair, z, relative=True)
    G = _gram(pair, V_basis)
    n = len(G)
    if any(G[i][j] != G[j][i] for i in range(n) for j in range(i)):
        raise DegenerateForm(f"cup pairing is not symmetric: {G}")
    if checks and n:
        rng = random.Random(seed)
        link = set(s for level in pair.link.simplices for s in level)
        edges = pair.total.simplices[1]
        rel_edges = [e for e in edges if e not in link]
        for i in range(n):
            x = {e: rng.randint(-3, 3) for e in rng.sample(edges, min(5, len(edges)))}
            y = {e: rng.randint(-3, 3) for e in rng.sample(rel_edges, min(5, len(rel_edges)))}
            bx, by = coboundary(pair.total, 1, x), coboundary(pair.total, 1, y)
            zi = _add(V_basis[i], by)
            for j in range(n):
                zj = _add(V_basis[j], bx)
                if cup_pair(zi, zj, pair, check=False) != G[i][j]:
                    raise DegenerateForm("pairing depends on the cocycle representative")
        for k in _connecting_images(pair, profile.spaces, 1):
            kc = profile.spaces["cs"].as_simplices(2, k)
            for z in V_basis:
                if cup_pair(kc, z, pair, check=False) != 0:
                    raise DegenerateForm("kernel of H2_cs -> H2 pairs nontrivially with V")
    pos, neg = signature_split(G)
    return PairingData(G, pos, neg)


def _add(a, b):
    out = dict(a)
    for s, v in b.items():
        out[s] = out.get(s, 0) + v
        if not out[s]:
            del out[s]
    return out


def congruent(gram, P):
    """P^T G P for a square rational change of basis P."""
    n = len(gram)
    GP = [[sum(Fraction(gram[i][k]) * P[k][j] for k in range(n)) for j in range(n)]
          for i in range(n)]
    return [[sum(Fraction(P[k][i]) * GP[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)]
