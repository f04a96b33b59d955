"""Whitney-form spectra on a piecewise-flat closed 3-manifold.

Lowest-order Whitney elements give, per tetrahedron, exact local matrices:

* ``M0``, ``K0``: P1 mass and stiffness on vertices,
* ``M1``, ``K1``: mass of Whitney 1-forms and of their exterior derivatives,
* ``C``: the wedge pairing ``int dW_e ^ W_f`` (symmetric on a closed mesh).

Eigenvalues of ``(K0, M0)`` approximate the Laplacian on functions. The
curl ``-*d`` on coexact 1-forms is discretised in one of two ways:

``"stiffness"`` (default)
    ``K1 u = gamma (-C) u`` on the M1-orthogonal complement of the closed
    forms. Both matrices vanish exactly on closed Whitney forms, so the
    kernel is exactly the discrete closed forms and no spurious small
    eigenvalues appear.
``"mass"``
    the weak pencil ``(-C, M1)`` with its zero modes filtered. On regular
    flat grids it converges from below, but on unstructured meshes its
    structural kernel leaks into small spurious eigenvalues.

Dense LAPACK solves are used up to ``DENSE_LIMIT`` unknowns, shift-invert
Lanczos above. Every sparse result is checked for completeness with an
inertia count (Sylvester's law on a symmetric factorisation).
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components

from .errors import DegenerateTetrahedron, SolverError

DENSE_LIMIT = 5000
GROUP_RTOL = 1e-6
ZERO_RTOL = 1e-6
RESIDUAL_RTOL = 1e-8
CURL_FORMULATIONS = ("stiffness", "mass")

_LOCAL_EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
_B = np.array([[-1.0, -1.0, -1.0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])


def _perm_sign(seq):
    s = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


def _wedge3(a, b, c):
    """dl_a ^ dl_b ^ dl_c in units of dl_1 ^ dl_2 ^ dl_3."""
    if len({a, b, c}) < 3:
        return 0
    (m,) = {0, 1, 2, 3} - {a, b, c}
    return _perm_sign((m, a, b, c))


# int_T dW_e ^ W_f = o / 12 * table[e, f] for a tet of orientation o
_CURL_TABLE = np.array([
    [_wedge3(a, b, d) - _wedge3(a, b, c) for (c, d) in _LOCAL_EDGES]
    for (a, b) in _LOCAL_EDGES
], dtype=float)


@dataclass
class FEMatrices:
    """Global Whitney matrices of one mesh in one orientation.

    ``grad`` is the edge-vertex incidence (coboundary on 0-cochains), so a
    vertex function ``f`` has Whitney gradient ``grad @ f``.
    """

    M0: sp.csr_matrix
    K0: sp.csr_matrix
    M1: sp.csr_matrix
    K1: sp.csr_matrix
    C: sp.csr_matrix
    grad: sp.csr_matrix
    edges: list = field(repr=False)
    vertices: tuple = field(repr=False)
    orientation: str = "induced"
    cache: dict = field(default_factory=dict, repr=False, compare=False)

    def as_dict(self):
        return {"M0": self.M0, "K0": self.K0, "M1": self.M1, "K1": self.K1,
                "Ccurl": self.C, "grad": self.grad}


def local_matrices(E):
    """Local matrices of tetrahedra with edge-vector stacks ``E`` (T, 3, d).

    Returns volumes and the stacks of local M0, K0, M1, K1 in the local
    vertex order and the edge order ``(01, 02, 03, 12, 13, 23)``.
    """
    G = np.einsum("tid,tjd->tij", E, E)
    det = np.linalg.det(G)
    if np.any(det <= 0):
        raise DegenerateTetrahedron("tetrahedron with nonpositive volume")
    vol = np.sqrt(det) / 6.0
    # P[a, b] = <grad l_a, grad l_b> for the barycentric coordinates
    P = np.einsum("ai,tij,bj->tab", _B, np.linalg.inv(G), _B)
    mass = (np.ones((4, 4)) + np.eye(4)) / 20.0
    Ml = vol[:, None, None] * mass
    K0 = vol[:, None, None] * P
    a = np.array([e[0] for e in _LOCAL_EDGES])
    b = np.array([e[1] for e in _LOCAL_EDGES])
    A, Bb = a[:, None].repeat(6, 1), b[:, None].repeat(6, 1)
    c, d = a[None, :].repeat(6, 0), b[None, :].repeat(6, 0)
    M1 = (Ml[:, A, c] * P[:, Bb, d] - Ml[:, A, d] * P[:, Bb, c]
          - Ml[:, Bb, c] * P[:, A, d] + Ml[:, Bb, d] * P[:, A, c])
    K1 = 4.0 * vol[:, None, None] * (P[:, A, c] * P[:, Bb, d] - P[:, A, d] * P[:, Bb, c])
    return vol, Ml, K0, M1, K1


def assemble(mesh, orientation="induced"):
    """Assemble the global Whitney matrices of a GeometricMesh.

    ``orientation="reversed"`` negates the wedge pairing ``C``; every other
    matrix is orientation independent.
    """
    if orientation not in ("induced", "reversed"):
        raise ValueError(f"orientation must be 'induced' or 'reversed', got {orientation!r}")
    X = mesh.complex
    tets = X.top
    verts = X.vertices
    vpos = {v: i for i, v in enumerate(verts)}
    eidx = X.indices(1)
    E = np.array([mesh.edge_vectors(t) for t in tets])
    _, Ml, K0l, M1l, K1l = local_matrices(E)
    o = mesh.canonical_orientation().astype(float)
    if orientation == "reversed":
        o = -o
    Cl = (o / 12.0)[:, None, None] * _CURL_TABLE[None]
    vi = np.array([[vpos[v] for v in t] for t in tets])
    ei = np.array([[eidx[(t[i], t[j])] for i, j in _LOCAL_EDGES] for t in tets])
    nv, ne = len(verts), len(X.simplices[1])

    def build(loc, idx, n):
        k = idx.shape[1]
        rows = np.repeat(idx, k, axis=1).ravel()
        cols = np.tile(idx, (1, k)).ravel()
        return sp.csr_matrix((loc.ravel(), (rows, cols)), shape=(n, n))

    ends = np.array([[vpos[a], vpos[b]] for a, b in X.simplices[1]])
    grad = sp.csr_matrix(
        (np.tile([-1.0, 1.0], ne), (np.repeat(np.arange(ne), 2), ends.ravel())),
        shape=(ne, nv))
    return FEMatrices(
        M0=build(Ml, vi, nv), K0=build(K0l, vi, nv),
        M1=build(M1l, ei, ne), K1=build(K1l, ei, ne), C=build(Cl, ei, ne),
        grad=grad, edges=list(X.simplices[1]), vertices=verts, orientation=orientation,
    )


@dataclass(frozen=True)
class SpectrumResult:
    """Eigenvalues of one operator on one mesh.

    ``eigenvalues`` are ascending for the Laplacians; for ``curl`` they are
    ordered by magnitude (negative first on ties), with the zero modes
    removed, and extended past the requested count to the end of the last
    cluster of equal magnitude.
    """

    operator: str
    eigenvalues: np.ndarray
    mesh_level: int
    zero_mode_count: int
    residuals: np.ndarray
    dof: int
    method: str = "dense"
    formulation: str = ""
    orientation: str = "induced"
    eigenvectors: np.ndarray = field(default=None, repr=False, compare=False)

    def groups(self, rtol=GROUP_RTOL):
        """Cluster eigenvalues into (value, multiplicity) pairs."""
        out = []
        for x in np.sort(self.eigenvalues):
            if out and abs(x - out[-1][0]) <= rtol * max(abs(x), abs(out[-1][0])):
                v, m = out[-1]
                out[-1] = (v, m + 1)
            else:
                out.append((float(x), 1))
        return out

    def nonzero(self):
        vals = self.eigenvalues
        return vals[np.abs(vals) > 0]


# ---------------------------------------------------------------- numerics

def _residuals(A, M, vals, vecs, scale=None):
    """Relative residuals ||A x - lam M x|| / ||M x|| (or / ||scale x||)."""
    out = []
    for lam, x in zip(vals, vecs.T):
        Mx = M @ x
        ref = Mx if scale is None else scale @ x
        out.append(np.linalg.norm(A @ x - lam * Mx) / max(np.linalg.norm(ref), 1e-300))
    return np.array(out)


def _check_residuals(res, operator, rtol):
    if res.size and res.max() > rtol:
        raise SolverError(f"{operator}: Rayleigh residual above {rtol:g}", float(res.max()))


def _zero_threshold(vals, rtol=None):
    rtol = ZERO_RTOL if rtol is None else rtol
    return rtol * max(np.max(np.abs(vals)) if len(vals) else 0.0, 1e-300)


def _pick_method(method, n):
    if method == "auto":
        return "dense" if n <= DENSE_LIMIT else "sparse"
    if method not in ("dense", "sparse"):
        raise ValueError(f"unknown method {method!r}")
    return method


def _shift_scale(K, M):
    """A positive shift well below the low end of the spectrum."""
    return 1e-2 * float(K.diagonal().sum() / M.diagonal().sum()) / max(K.shape[0], 1) ** (2 / 3)


def _sym_splu(K):
    return spla.splu(K.tocsc(), permc_spec="MMD_AT_PLUS_A")


def _symmetric_lu(K):
    """LU with symmetric ordering and diagonal pivots, plus its inertia.

    With identical row and column permutations ``U``'s diagonal is the D of
    an LDL^T factorisation, so by Sylvester's law its negative entries count
    the negative eigenvalues of ``K``.
    """
    lu = spla.splu(K.tocsc(), permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                   options={"SymmetricMode": True})
    if not np.array_equal(lu.perm_r, lu.perm_c):
        raise SolverError("symmetric factorisation fell back to row pivoting")
    d = lu.U.diagonal()
    if np.any(d == 0) or not np.all(np.isfinite(d)):
        raise SolverError("singular pivot in symmetric factorisation")
    return lu, int((d < 0).sum())


def _count_below(A, M, t):
    """Number of eigenvalues of the pencil (A, M) below ``t``."""
    return _symmetric_lu(A - t * M)[1]


def _polish(A, M, vecs, apply_inv):
    """One block inverse-iteration step followed by Rayleigh-Ritz.

    ARPACK's converged Ritz pairs sit right at the residual bound; one
    extra pass through the factorised operator cuts the residual by the
    ratio of wanted to unwanted transformed eigenvalues.
    """
    Y = np.column_stack([apply_inv(M @ v) for v in vecs.T])
    Q, _ = np.linalg.qr(Y)
    vals, W = sla.eigh(Q.T @ (A @ Q), Q.T @ (M @ Q))
    return vals, Q @ W


def _first_gap(keys, start, rtol=GROUP_RTOL):
    """First index j >= start with keys[j] clearly above keys[j - 1]."""
    for j in range(max(start, 1), len(keys)):
        if keys[j] - keys[j - 1] > rtol * max(abs(keys[j]), 1.0):
            return j
    return None


def _verified_eigsh(A, M, sigma, count, solve, counter, side=1, extra=8, tries=4,
                    project=None, seed=0):
    """Eigenpairs of (A, M) on one side of ``sigma``, checked complete.

    Shift-invert Lanczos can drop copies of a degenerate eigenvalue. After
    each run the eigenvalues found up to a cutoff are compared with
    ``counter(cutoff)``, an exact inertia count of the pencil, and the run is
    repeated with a larger Krylov space until they agree.

    ``side=1`` wants the eigenvalues just above ``sigma``, ``side=-1`` those
    just below. Returns at least ``count`` pairs ordered away from sigma.
    """
    n = A.shape[0]
    apply = (lambda b: project(solve(b))) if project else solve
    op = spla.LinearOperator((n, n), matvec=apply, dtype=float)
    which = "LA" if side > 0 else "SA"
    k = count + extra
    for attempt in range(tries):
        k = min(k, n - 2)
        v0 = np.random.default_rng(seed + attempt).standard_normal(n)
        if project:
            v0 = project(v0)
        _, vecs = spla.eigsh(A, k=k, M=M, sigma=sigma, OPinv=op, which=which,
                             v0=v0, ncv=min(n - 1, max(2 * k + 1, 20)), tol=1e-10)
        vals, vecs = _polish(A, M, vecs, apply)
        order = np.argsort(side * vals)
        vals, vecs = vals[order], vecs[:, order]
        cut = _first_gap(side * vals, count)
        if cut is not None:
            found = counter(0.5 * (vals[cut - 1] + vals[cut]))
            if found == cut:
                return vals[:cut], vecs[:, :cut]
            k = max(k, found) + extra
        else:
            k = 2 * k
    raise SolverError(f"shift-invert Lanczos did not capture the lowest {count} eigenvalues")


# ------------------------------------------------------------ 1-form helper

class _OneForms:
    """Shared factorisations for problems on Whitney 1-forms of one mesh.

    Holds the M1-orthogonal projector away from discrete gradients, a
    factorisation of ``K1 + tau M1`` and, once computed, an M1-orthonormal
    basis of the discrete harmonic forms.
    """

    def __init__(self, fe):
        self.fe = fe
        self.G = fe.grad.tocsc()
        L = (self.G.T @ fe.M1 @ self.G).tocsc()
        ncomp, labels = connected_components(abs(fe.grad.T @ fe.grad) > 0, directed=False)
        pins = {int(np.argmax(labels == c)) for c in range(ncomp)}
        self.components = ncomp
        self.free = np.array([i for i in range(L.shape[0]) if i not in pins])
        self.lap_lu = spla.splu(L[self.free][:, self.free].tocsc())
        self.rank = L.shape[0] - ncomp
        self.tau = _shift_scale(fe.K1, fe.M1)
        self._lu = None
        self.harmonic = None
        self.lam1 = None

    @property
    def lu(self):
        if self._lu is None:
            self._lu = _sym_splu(self.fe.K1 + self.tau * self.fe.M1)
        return self._lu

    def project(self, x):
        """Remove the M1-orthogonal projection onto discrete gradients."""
        rhs = self.G.T @ (self.fe.M1 @ x)
        y = np.zeros(self.G.shape[1])
        y[self.free] = self.lap_lu.solve(rhs[self.free])
        return x - self.G @ y

    def project_closed(self, x):
        x = self.project(x)
        if self.harmonic is not None and self.harmonic.shape[1]:
            H = self.harmonic
            x = x - H @ (H.T @ (self.fe.M1 @ x))
        return x

    def pinv(self, b, rtol=1e-14, steps=8):
        """Coexact solution of ``K1 y = b`` for ``b`` annihilating closed forms.

        Iterative refinement on ``K1 + tau M1``: the error contracts by
        ``tau / (lambda + tau)`` per step on each coexact mode.
        """
        K1 = self.fe.K1
        y = self.lu.solve(b)
        nb = np.linalg.norm(b)
        for _ in range(steps):
            r = b - K1 @ y
            if np.linalg.norm(r) <= rtol * nb:
                break
            y = y + self.lu.solve(r)
        return self.project_closed(y)

    def coexact_sparse(self, count, extra=4):
        """Lowest eigenpairs of (K1, M1) off gradients, harmonic ones included."""
        fe = self.fe
        want = count + extra
        for _ in range(3):
            vals, vecs = _verified_eigsh(
                fe.K1, fe.M1, -self.tau, want, self.lu.solve,
                lambda t: _count_below(fe.K1, fe.M1, t) - self.rank, project=self.project)
            zero = np.abs(vals) <= _zero_threshold(vals)
            if (~zero).sum() >= count:
                self.harmonic = vecs[:, zero]
                self.lam1 = float(vals[~zero][0])
                return vals, vecs, zero
            want += int(zero.sum())
        raise SolverError("coexact spectrum: too few nonzero eigenvalues found")

    def count_curl(self, Cs, t):
        """Number of eigenvalues of ``K1 u = gamma Cs u`` strictly between 0 and t.

        On coexact forms ``K1 - t Cs`` is congruent to
        ``diag((gamma - t) / gamma)`` in a K1-orthonormal eigenbasis, negative
        exactly for gamma between 0 and t. Both matrices vanish on closed
        forms, so they are lifted before counting: ``beta M1 G G^T M1``
        is positive on gradients and vanishes on forms M1-orthogonal to them,
        and ``delta M1`` with ``delta = 1e-7 lambda_1`` is positive on harmonic
        forms while moving the coexact quadratic form by at most 1e-7, far
        below the relative gap at ``t``. The gradient term enters through the
        bordered matrix ``[[A, W], [W^T, -I]]`` with ``W = sqrt(beta) M1 G``,
        whose Schur complement is ``A + W W^T`` and which factors with far
        less fill; the border adds one negative pivot per vertex.
        """
        if "border" not in self.fe.cache:
            W = (self.fe.M1 @ self.fe.grad).tocsr()
            beta = self.fe.K1.diagonal().mean() / W.multiply(W).sum(axis=1).mean()
            W = np.sqrt(beta) * W
            self.fe.cache["border"] = (W, self.fe.K1 + 1e-7 * self.lam1 * self.fe.M1)
        W, A = self.fe.cache["border"]
        nv = W.shape[1]
        B = sp.bmat([[A - t * Cs, W], [W.T, -sp.identity(nv)]])
        return _symmetric_lu(B)[1] - nv


def _one_forms(fe):
    if "one_forms" not in fe.cache:
        fe.cache["one_forms"] = _OneForms(fe)
    return fe.cache["one_forms"]


def _dense_one_forms(fe):
    """Dense (K1, M1) eigen-decomposition, cached on the FEMatrices."""
    if "dense_k1" not in fe.cache:
        fe.cache["dense_k1"] = sla.eigh(fe.K1.toarray(), fe.M1.toarray())
    return fe.cache["dense_k1"]


def _same_operators(fe, mesh, orientation):
    if fe is None or fe.orientation != orientation:
        return assemble(mesh, orientation)
    return fe


# -------------------------------------------------------------- operators

def laplacian0_spectrum(mesh, count, fe=None, method="auto", residual_rtol=RESIDUAL_RTOL,
                        keep_vectors=False):
    """Smallest ``count`` eigenvalues of the Laplacian on functions, ascending."""
    if count < 1:
        raise ValueError("count must be >= 1")
    fe = fe or assemble(mesh)
    n = fe.M0.shape[0]
    count = min(count, n)
    method = _pick_method(method, n)
    if method == "dense":
        vals, vecs = sla.eigh(fe.K0.toarray(), fe.M0.toarray())
        vals, vecs = vals[:count], vecs[:, :count]
    else:
        shift = _shift_scale(fe.K0, fe.M0)
        lu = _sym_splu(fe.K0 + shift * fe.M0)
        vals, vecs = _verified_eigsh(fe.K0, fe.M0, -shift, count, lu.solve,
                                     lambda t: _count_below(fe.K0, fe.M0, t))
        vals, vecs = vals[:count], vecs[:, :count]
    res = _residuals(fe.K0, fe.M0, vals, vecs)
    _check_residuals(res, "laplace0", residual_rtol)
    zeros = np.abs(vals) <= _zero_threshold(vals)
    vals = np.where(zeros, 0.0, vals)
    return SpectrumResult("laplace0", vals, mesh.level, int(zeros.sum()), res, n, method,
                          eigenvectors=vecs if keep_vectors else None)


def coexact_spectrum(mesh, count, fe=None, method="auto", residual_rtol=RESIDUAL_RTOL):
    """Lowest nonzero eigenvalues of ``(K1, M1)``: d*d on coexact 1-forms.

    ``zero_mode_count`` is the number of discrete harmonic 1-forms (the
    kernel of K1 beyond the gradients).
    """
    fe = fe or assemble(mesh)
    n = fe.M1.shape[0]
    method = _pick_method(method, n)
    one = _one_forms(fe)
    if method == "dense":
        vals, vecs = _dense_one_forms(fe)
        zero = np.abs(vals) <= _zero_threshold(vals)
        harmonic = int(zero.sum()) - one.rank
    else:
        vals, vecs, zero = one.coexact_sparse(count)
        harmonic = int(zero.sum())
    vals, vecs = vals[~zero][:count], vecs[:, ~zero][:, :count]
    res = _residuals(fe.K1, fe.M1, vals, vecs)
    _check_residuals(res, "coexact1", residual_rtol)
    return SpectrumResult("coexact1", vals, mesh.level, harmonic, res, n, method)


def laplacian1_spectrum(mesh, count, fe=None, method="auto", residual_rtol=RESIDUAL_RTOL,
                        coexact=None, laplace0=None):
    """Smallest eigenvalues of the Hodge Laplacian d*d + dd* on 1-forms.

    Mixed Whitney discretisation: the pencil ``(K1 + M1 G M0^-1 G^T M1, M1)``.
    Its spectrum is the harmonic zero modes, the nonzero function spectrum
    (on exact forms) and the coexact spectrum, which is how the sparse path
    assembles it.
    """
    fe = fe or assemble(mesh)
    n = fe.M1.shape[0]
    method = _pick_method(method, n)
    if method == "dense":
        M1 = fe.M1.toarray()
        W = M1 @ fe.grad.toarray()
        H = fe.K1.toarray() + W @ np.linalg.solve(fe.M0.toarray(), W.T)
        vals, vecs = sla.eigh(H, M1)
        vals, vecs = vals[:count], vecs[:, :count]
        res = _residuals(sp.csr_matrix(H), fe.M1, vals, vecs)
        _check_residuals(res, "laplace1", residual_rtol)
        zero = np.abs(vals) <= _zero_threshold(vals)
        vals = np.where(zero, 0.0, vals)
        return SpectrumResult("laplace1", vals, mesh.level, int(zero.sum()), res, n, method)
    co = coexact if coexact is not None and len(coexact.eigenvalues) >= count else \
        coexact_spectrum(mesh, count, fe, "sparse", residual_rtol)
    l0 = laplace0 if laplace0 is not None and len(laplace0.eigenvalues) > count else \
        laplacian0_spectrum(mesh, count + 1, fe, "auto", residual_rtol)
    merged = np.sort(np.concatenate([np.zeros(co.zero_mode_count), co.eigenvalues,
                                     l0.nonzero()]))[:count]
    res = np.concatenate([co.residuals, l0.residuals])
    return SpectrumResult("laplace1", merged, mesh.level, co.zero_mode_count, res, n, "sparse")


def _curl_stiffness_dense(fe, Cs):
    lam, V = _dense_one_forms(fe)
    keep = np.abs(lam) > _zero_threshold(lam)
    V, lam = V[:, keep], lam[keep]
    s = 1.0 / np.sqrt(lam)
    # on coexact forms K1 = diag(lam) in this basis; solve Cs z = mu K1 z
    mu, Z = np.linalg.eigh(s[:, None] * (V.T @ (Cs @ V)) * s[None, :])
    keep_mu = np.abs(mu) > _zero_threshold(mu)
    mu, Z = mu[keep_mu], Z[:, keep_mu]
    vecs = V @ (s[:, None] * Z)
    return 1.0 / mu, vecs, int((~keep).sum())


def _curl_stiffness_sparse(fe, Cs, count, extra=8, tries=4, seed=0):
    one = _one_forms(fe)
    if one.harmonic is None:
        one.coexact_sparse(1)
    n = Cs.shape[0]
    minv = spla.LinearOperator((n, n), matvec=one.pinv, dtype=float)
    # degenerate clusters are common, so start with room for a second one
    k = 2 * count + extra
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        k = min(k, n - one.rank - 2)
        v0 = one.pinv(Cs @ rng.standard_normal(n))
        _, X = spla.eigsh(Cs, k=k, M=fe.K1, Minv=minv, which="LM", v0=v0,
                          ncv=min(n - 1, max(2 * k + 1, 20)), tol=1e-10)
        # Rayleigh-Ritz on one more application of K1^+ Cs
        Y = np.column_stack([one.pinv(Cs @ x) for x in X.T])
        Q, _ = np.linalg.qr(Y)
        mu, W = sla.eigh(Q.T @ (Cs @ Q), Q.T @ (fe.K1 @ Q))
        gam, vecs = 1.0 / mu, Q @ W
        order = np.argsort(np.abs(gam))
        gam, vecs = gam[order], vecs[:, order]
        # a cut is only trusted inside the converged prefix
        res = _residuals(fe.K1, Cs, gam, vecs, scale=fe.K1)
        bad = np.flatnonzero(res > 1e-6)
        good = bad[0] if bad.size else len(gam)
        cut = _first_gap(np.abs(gam[:good]), count)
        if cut is None:
            k *= 2
            continue
        r = 0.5 * (abs(gam[cut - 1]) + abs(gam[cut]))
        pos, neg = one.count_curl(Cs, r), one.count_curl(Cs, -r)
        if pos == int((gam[:cut] > 0).sum()) and neg == int((gam[:cut] < 0).sum()):
            return gam[:cut], vecs[:, :cut], one.rank + one.harmonic.shape[1]
        k = max(k, pos + neg) + extra
    raise SolverError(f"curl: Lanczos did not capture the lowest {count} eigenvalues")


def _curl_mass_side(A, M, sigma, k, inner, tries=8):
    """Smallest eigenvalues of (A, M) on the side of 0 given by ``sigma``.

    Shift-invert at ``sigma`` maps gamma to nu = 1/(gamma - sigma); the
    eigenvalues beyond sigma become the algebraically extreme nu while the
    large structural kernel sits at nu = -1/sigma on the opposite end. An
    inertia count guarantees that nothing lies strictly between 0 and sigma
    (sigma is halved until that holds); ``inner`` is the count of
    eigenvalues below ``+-eps``, the edge of the kernel on that side.
    """
    side = 1 if sigma > 0 else -1
    for _ in range(tries):
        lu, below = _symmetric_lu(A - sigma * M)
        between = below - inner if side > 0 else inner - below
        if between == 0:
            return _verified_eigsh(
                A, M, sigma, k, lu.solve,
                lambda t: side * (_count_below(A, M, t) - inner), side=side)
        sigma /= 2.0
    raise SolverError("curl: could not isolate the lowest eigenvalues from the kernel")


def curl_spectrum(mesh, count, orientation="induced", fe=None, method="auto",
                  residual_rtol=RESIDUAL_RTOL, keep_vectors=False, formulation="stiffness",
                  sigma=None, coexact=None):
    """Eigenvalues of ``-*d`` on coexact 1-forms of smallest magnitude.

    Parameters
    ----------
    mesh : GeometricMesh
    count : int
        Number of nonzero eigenvalues to report (signed, ordered by |gamma|).
    orientation : {"induced", "reversed"}
    formulation : {"stiffness", "mass"}
        See the module docstring.
    sigma, coexact :
        Mass formulation, sparse path only: the search shift (default half
        the square root of the lowest coexact Laplace eigenvalue, taken from
        ``coexact`` when given).

    Notes
    -----
    ``zero_mode_count`` is the dimension of the filtered kernel: the closed
    forms for the stiffness formulation, the whole (larger) kernel of ``C``
    for the mass formulation. It is never below ``b1 + #V - b0``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if formulation not in CURL_FORMULATIONS:
        raise ValueError(f"formulation must be one of {CURL_FORMULATIONS}")
    fe = _same_operators(fe, mesh, orientation)
    Cs = (-fe.C).tocsr()
    M = fe.M1
    n = M.shape[0]
    method = _pick_method(method, n)
    one = _one_forms(fe)
    expected = one.rank
    if formulation == "stiffness":
        if method == "dense":
            vals, vecs, zero_count = _curl_stiffness_dense(fe, Cs)
        else:
            vals, vecs, zero_count = _curl_stiffness_sparse(fe, Cs, count)
    elif method == "dense":
        vals, vecs = sla.eigh(Cs.toarray(), M.toarray())
        zero = np.abs(vals) <= _zero_threshold(vals)
        zero_count = int(zero.sum())
        vals, vecs = vals[~zero], vecs[:, ~zero]
    else:
        if sigma is None:
            coexact = coexact or coexact_spectrum(mesh, 1, fe, "sparse")
            sigma = 0.5 * np.sqrt(coexact.eigenvalues[0])
        eps = ZERO_RTOL * abs(sigma)
        below = {-1: _count_below(Cs, M, -eps), 1: _count_below(Cs, M, eps)}
        parts = [_curl_mass_side(Cs, M, s * abs(sigma), count, below[s]) for s in (-1, 1)]
        vals = np.concatenate([p[0] for p in parts])
        vecs = np.hstack([p[1] for p in parts])
        zero_count = below[1] - below[-1]
    if zero_count < expected:
        raise SolverError(f"curl pencil has {zero_count} zero modes, "
                          f"fewer than the {expected} exact forms")
    scale = np.max(np.abs(vals)) if len(vals) else 1.0
    order = np.lexsort((vals, np.round(np.abs(vals) / scale, 9)))
    # never cut through a cluster of equal |gamma|: the kept set must not
    # depend on which sign the solver happened to list first
    mags = np.abs(vals[order])
    end = _first_gap(mags, count)
    order = order[:end] if end is not None else order
    vals, vecs = vals[order], vecs[:, order]
    if formulation == "stiffness":
        # K1 x = gamma Cs x, measured against ||K1 x||
        res = _residuals(fe.K1, Cs, vals, vecs, scale=fe.K1)
    else:
        res = _residuals(Cs, M, vals, vecs)
    _check_residuals(res, "curl", residual_rtol)
    return SpectrumResult("curl", vals, mesh.level, zero_count, res, n, method, formulation,
                          orientation, vecs if keep_vectors else None)


def coexact_consistency(mesh, count, fe=None, method="auto", curl=None, coexact=None):
    """Compare squared curl eigenvalues with the nearest (K1, M1) eigenvalue.

    Returns a list of ``(gamma, lam, |gamma^2 - lam| / lam)`` for the first
    ``count`` nonzero curl eigenvalues.
    """
    fe = fe or assemble(mesh)
    coexact = coexact or coexact_spectrum(mesh, count, fe=fe, method=method)
    curl = curl or curl_spectrum(mesh, count, fe=fe, method=method)
    lams = coexact.eigenvalues
    out = []
    for g in curl.eigenvalues[:count]:
        if g == 0:
            continue
        lam = lams[np.argmin(np.abs(lams - g * g))]
        out.append((float(g), float(lam), float(abs(g * g - lam) / lam)))
    return out
