"""Exact rational cohomology of C, of its link L, and of the pair (C, L).

Compactly supported cohomology of the open manifold is realised as the
relative cohomology of the compact pair. Every map of the long exact
sequence of the pair is built at cochain level:

* relative -> absolute: extension by zero,
* absolute -> link: restriction,
* link -> relative (connecting map): extend a link cocycle by zero and take
  its coboundary in the total complex.
"""
from dataclasses import dataclass, field

from .errors import ComplexError, ExactnessViolation, MismatchWithDirect
from .exact import Echelon, reduce_columns
from .simplicial import coboundary_columns


class CochainSpace:
    """Cohomology data of a complex, optionally restricted to a simplex set.

    Restricting to the simplices of ``C`` not in ``L`` gives the relative
    cochain complex, since coboundaries of cochains vanishing on ``L`` still
    vanish on ``L``.

    Attributes
    ----------
    simplices : list of list of tuple
    ranks : list of int
        ``ranks[k]`` is the rank of the coboundary from degree k to k+1.
    betti : list of int
    reps : list of list of dict
        Cocycles ``{simplex index: int}`` whose classes form a basis of H^k.
    boundaries : list of Echelon
        Echelon basis of the coboundaries B^k in degree k.
    """

    def __init__(self, X, keep=None, backend=None):
        self.dim = X.dim
        self.simplices = []
        self.index = []
        self.ranks = []
        self.reps = []
        self.boundaries = [Echelon()]
        cleared = None
        for k in range(X.dim + 1):
            cols, ks, up = coboundary_columns(X, k, keep)
            self.simplices.append(ks)
            self.index.append({s: i for i, s in enumerate(ks)})
            pivots, reduced, kernel = reduce_columns(cols, cleared, track=True,
                                                     backend=backend)
            self.ranks.append(sum(1 for p in pivots if p >= 0))
            self.reps.append([kernel[j] for j in sorted(kernel)])
            self.boundaries.append(Echelon.from_reduction(reduced))
            marks = [False] * len(up)
            for p in pivots:
                if p >= 0:
                    marks[p] = True
            cleared = marks
        self.boundaries.pop()
        self.betti = [len(r) for r in self.reps]
        for k in range(self.dim + 1):
            alt = len(self.simplices[k]) - self.ranks[k] - (self.ranks[k - 1] if k else 0)
            if alt != self.betti[k]:
                raise ExactnessViolation(
                    f"degree {k}: {self.betti[k]} representatives but rank count gives {alt}")

    def cochain(self, k, values):
        """Convert ``{simplex: value}`` to local index coordinates."""
        idx = self.index[k]
        return {idx[s]: v for s, v in values.items() if v}

    def as_simplices(self, k, vec):
        sims = self.simplices[k]
        return {sims[i]: v for i, v in vec.items()}

    def is_coboundary(self, k, vec):
        return self.boundaries[k].contains(vec)

    def induced_rank(self, k, images):
        """Rank of the classes of the cocycles ``images`` in H^k."""
        e = self.boundaries[k].copy()
        return sum(1 for v in images if e.add(v))


def betti(X):
    """Rational Betti numbers b^0..b^dim of a simplicial complex."""
    return CochainSpace(X).betti


def relative_betti(pair):
    """Betti numbers of H^*(C, L), i.e. compactly supported cohomology of C."""
    return _relative_space(pair).betti


def _relative_space(pair, backend=None):
    link = set(s for level in pair.link.simplices for s in level)
    keep = set(s for level in pair.total.simplices for s in level if s not in link)
    return CochainSpace(pair.total, keep, backend=backend)


def coboundary(X, k, cochain):
    """Coboundary of a k-cochain ``{simplex: value}`` on X."""
    out = {}
    if k + 1 > X.dim:
        return out
    for t in X.simplices[k + 1]:
        acc = 0
        for i in range(len(t)):
            x = cochain.get(t[:i] + t[i + 1:])
            if x:
                acc += (-1) ** i * x
        if acc:
            out[t] = acc
    return out


# names of the 14 terms of the sequence of the pair, in order
def _les_layout():
    nodes, maps = [], []
    for k in range(5):
        nodes.append(("H%d_cs" % k, "cs", k))
        nodes.append(("H%d(C)" % k, "C", k))
        if k < 4:
            nodes.append(("H%d(L)" % k, "L", k))
    for a, b in zip(nodes, nodes[1:]):
        maps.append((f"{a[0]}->{b[0]}", a, b))
    return nodes, maps


# the twelve terms of the sequence once H^0_cs = H^4(C) = 0 are dropped
REDUCED_NODES = ("H0(C)", "H0(L)", "H1_cs", "H1(C)", "H1(L)", "H2_cs",
               "H2(C)", "H2(L)", "H3_cs", "H3(C)", "H3(L)", "H4_cs")


@dataclass
class CohomologyProfile:
    """Cohomology of the pair with every map of its long exact sequence."""

    b_C: list
    b_L: list
    b_cs: list
    les_nodes: list
    les_ranks: dict
    exactness_defects: dict
    dim_V: int
    V_basis: list = field(repr=False)
    spaces: dict = field(repr=False)

    def node_dim(self, name):
        return dict(self.les_nodes)[name]

    def image_dims(self):
        """dim im(H^k_cs -> H^k(C)) for k = 0..4."""
        return [self.les_ranks[f"H{k}_cs->H{k}(C)"] for k in range(5)]

    def h3_kernel_dim(self):
        return self.b_cs[3] - self.les_ranks["H3_cs->H3(C)"]


def _map_images(pair, spaces, src, dst, k):
    """Images of the basis cocycles of ``src`` in degree k, in ``dst`` coords."""
    S, D = spaces[src], spaces[dst]
    out = []
    for rep in S.reps[k]:
        cochain = S.as_simplices(k, rep)
        if src == "cs" and dst == "C":
            out.append(D.cochain(k, cochain))
        elif src == "C" and dst == "L":
            out.append({D.index[k][s]: v for s, v in cochain.items() if s in D.index[k]})
        else:
            raise ValueError((src, dst))
    return out


def _connecting_images(pair, spaces, k):
    """Coboundaries of extended link cocycles, as relative (k+1)-cochains."""
    L, R = spaces["L"], spaces["cs"]
    out = []
    link_up = set(pair.link.simplices[k + 1]) if k + 1 <= pair.link.dim else set()
    for rep in L.reps[k]:
        d = coboundary(pair.total, k, L.as_simplices(k, rep))
        if any(s in link_up for s in d):
            raise ExactnessViolation("extended link cocycle has coboundary on the link")
        out.append(R.cochain(k + 1, d))
    return out


def les_of_pair(pair, backend=None):
    """Long exact sequence of (C, L) with ranks of all induced maps."""
    if not pair.link.simplices or not pair.link.top:
        raise ComplexError("the link is empty: C must be noncompact")
    spaces = {
        "C": CochainSpace(pair.total, backend=backend),
        "L": CochainSpace(pair.link, backend=backend),
        "cs": _relative_space(pair, backend=backend),
    }
    nodes, maps = _les_layout()
    dims = {name: spaces[kind].betti[k] for name, kind, k in nodes}
    ranks = {}
    V_basis = []
    for name, (_, ka, a), (_, kb, b) in maps:
        if ka == "cs":
            images = _map_images(pair, spaces, "cs", "C", a)
            e = spaces["C"].boundaries[a].copy()
            chosen = [rep for rep, img in zip(spaces["cs"].reps[a], images) if e.add(img)]
            ranks[name] = len(chosen)
            if a == 2:
                V_basis = [spaces["cs"].as_simplices(2, rep) for rep in chosen]
        elif ka == "C":
            ranks[name] = spaces["L"].induced_rank(a, _map_images(pair, spaces, "C", "L", a))
        else:
            ranks[name] = spaces["cs"].induced_rank(b, _connecting_images(pair, spaces, a))
    node_names = [n for n, _, _ in nodes]
    defects = {}
    for i, name in enumerate(node_names):
        rin = ranks[f"{node_names[i - 1]}->{name}"] if i > 0 else 0
        rout = ranks[f"{name}->{node_names[i + 1]}"] if i + 1 < len(node_names) else 0
        defects[name] = dims[name] - rin - rout
    bad = {n: d for n, d in defects.items() if d}
    if bad:
        raise ExactnessViolation(f"sequence of the pair is not exact at {bad}")
    return CohomologyProfile(
        b_C=spaces["C"].betti,
        b_L=spaces["L"].betti,
        b_cs=spaces["cs"].betti,
        les_nodes=[(n, dims[n]) for n in node_names],
        les_ranks=ranks,
        exactness_defects=defects,
        dim_V=ranks["H2_cs->H2(C)"],
        V_basis=V_basis,
        spaces=spaces,
    )


def dim_v_direct(pair_or_profile):
    """Rank of H^2_cs -> H^2 and representative relative cocycles spanning V."""
    profile = pair_or_profile
    if not isinstance(profile, CohomologyProfile):
        profile = les_of_pair(profile)
    return profile.dim_V, profile.V_basis


def dim_v_formula(profile, check=True):
    """dim V from Betti numbers alone.

    The alternating sum over ``0 -> H^0(C) -> H^0(L) -> ... -> H^2_cs -> V -> 0``
    with Poincare duality ``b^k_cs = b^{4-k}(C)`` gives
    ``b2 + b1 - b3 - b0 of C  +  b0 - b1 of L``. For connected C and L this
    is ``b0 + b1 + b2 - b3 of C minus b0 + b1 of L``; the two differ by
    ``2 (b0(C) - b0(L))`` when the link is disconnected.
    """
    bC, bL = profile.b_C, profile.b_L
    value = bC[1] + bC[2] - bC[3] - bC[0] + bL[0] - bL[1]
    if check and value != profile.dim_V:
        raise MismatchWithDirect(
            f"alternating sum gives {value} but the rank of H2_cs->H2 is {profile.dim_V}")
    return value


def poincare_duality_defects(profile):
    """Differences b^k(C) - b^{4-k}_cs(C) and b^k(L) - b^{3-k}(L)."""
    c = [profile.b_C[k] - profile.b_cs[4 - k] for k in range(5)]
    l = [profile.b_L[k] - profile.b_L[3 - k] for k in range(4)]
    return c, l
