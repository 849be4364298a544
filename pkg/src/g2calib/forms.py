"""Alternating forms on R^7 and R^8: the G2 3-form, its Hodge dual, the
defect form chi, the Cayley 4-form, and the metric recovered from a
positive 3-form.

Coefficients are stored densely over lexicographically ordered index
subsets (35 entries for a 3-form on R^7).  Orientation is fixed as
e^{1...7}; every Hodge sign below follows from that single choice.
"""

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels
from .octonion import cross7, cross7_batch


@lru_cache(maxsize=None)
def k_subsets(n, k):
    """Lexicographically ordered k-subsets of range(n)."""
    return tuple(itertools.combinations(range(n), k))


@lru_cache(maxsize=None)
def subset_index(n, k):
    return {s: i for i, s in enumerate(k_subsets(n, k))}


def perm_sign(seq):
    """Sign of the permutation sorting seq; 0 if entries repeat."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    s = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


class AlternatingForm:
    """Dense alternating k-form on R^n."""

    def __init__(self, degree, dim, coeffs=None):
        self.degree = int(degree)
        self.dim = int(dim)
        nc = len(k_subsets(self.dim, self.degree))
        if coeffs is None:
            self.coeffs = np.zeros(nc)
        else:
            self.coeffs = np.asarray(coeffs, dtype=float).copy()
            if self.coeffs.shape != (nc,):
                raise ValueError(f"expected {nc} coefficients, got {self.coeffs.shape}")
        self._tensor = None

    @classmethod
    def from_dict(cls, degree, dim, entries):
        """Build from {(i1,..,ik): value} with 0-based sorted index tuples."""
        f = cls(degree, dim)
        idx = subset_index(dim, degree)
        for key, val in entries.items():
            f.coeffs[idx[tuple(key)]] = val
        return f

    def copy(self):
        return AlternatingForm(self.degree, self.dim, self.coeffs)

    # -- algebra -----------------------------------------------------------

    def __add__(self, other):
        self._check_compatible(other)
        return AlternatingForm(self.degree, self.dim, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check_compatible(other)
        return AlternatingForm(self.degree, self.dim, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return AlternatingForm(self.degree, self.dim, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return AlternatingForm(self.degree, self.dim, -self.coeffs)

    def _check_compatible(self, other):
        if (self.degree, self.dim) != (other.degree, other.dim):
            raise ValueError("degree/dimension mismatch")

    def allclose(self, other, atol=1e-12):
        self._check_compatible(other)
        return np.allclose(self.coeffs, other.coeffs, atol=atol)

    # -- evaluation --------------------------------------------------------

    def as_tensor(self):
        """Full antisymmetric k-tensor (cached); used for batch evaluation."""
        if self._tensor is None:
            T = np.zeros((self.dim,) * self.degree)
            for c, I in zip(self.coeffs, k_subsets(self.dim, self.degree)):
                if c == 0.0:
                    continue
                for perm in itertools.permutations(I):
                    T[perm] = c * perm_sign(perm)
            self._tensor = T
        return self._tensor

    def evaluate(self, *vectors):
        if len(vectors) != self.degree:
            raise ValueError(f"need {self.degree} vectors")
        V = np.array([np.asarray(v, dtype=float) for v in vectors])
        out = 0.0
        for c, I in zip(self.coeffs, k_subsets(self.dim, self.degree)):
            if c != 0.0:
                out += c * np.linalg.det(V[:, list(I)])
        return out

    def packed(self):
        """(index columns, coefficients) of the nonzero entries."""
        nz = np.nonzero(self.coeffs)[0]
        S = k_subsets(self.dim, self.degree)
        idx = np.array([S[i] for i in nz], dtype=np.int64).reshape(len(nz), self.degree)
        return idx, self.coeffs[nz].copy()

    def evaluate_batch(self, *arrays):
        """Evaluate on rows of (m, dim) arrays, one per slot."""
        if len(arrays) != self.degree:
            raise ValueError(f"need {self.degree} arrays")
        arrays = [np.ascontiguousarray(a, dtype=float) for a in arrays]
        idx, coef = self.packed()
        if self.degree == 3:
            return _kernels.alt3_batch(*arrays, idx[:, 0], idx[:, 1], idx[:, 2], coef)
        if self.degree == 4:
            return _kernels.alt4_batch(*arrays, idx[:, 0], idx[:, 1], idx[:, 2], idx[:, 3], coef)
        out = np.zeros(arrays[0].shape[0])
        for i in range(arrays[0].shape[0]):
            out[i] = self.evaluate(*[a[i] for a in arrays])
        return out

    # -- exterior algebra ---------------------------------------------------

    def wedge(self, other):
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        k = self.degree + other.degree
        out = AlternatingForm(k, self.dim)
        idx = subset_index(self.dim, k)
        So = k_subsets(self.dim, other.degree)
        for a, I in zip(self.coeffs, k_subsets(self.dim, self.degree)):
            if a == 0.0:
                continue
            for b, J in zip(other.coeffs, So):
                if b == 0.0 or set(I) & set(J):
                    continue
                s = perm_sign(I + J)
                out.coeffs[idx[tuple(sorted(I + J))]] += a * b * s
        return out

    def interior(self, vec):
        """Contraction of vec into the first slot."""
        vec = np.asarray(vec, dtype=float)
        out = AlternatingForm(self.degree - 1, self.dim)
        idx = subset_index(self.dim, self.degree - 1)
        for a, I in zip(self.coeffs, k_subsets(self.dim, self.degree)):
            if a == 0.0:
                continue
            for pos, i0 in enumerate(I):
                rest = I[:pos] + I[pos + 1:]
                out.coeffs[idx[rest]] += a * ((-1) ** pos) * vec[i0]
        return out

    def pullback(self, A):
        """Pullback along the linear map A (value on (Au, Av, ...))."""
        A = np.asarray(A, dtype=float)
        out = AlternatingForm(self.degree, self.dim)
        for oi, J in enumerate(k_subsets(self.dim, self.degree)):
            cols = A[:, list(J)]
            val = 0.0
            for c, I in zip(self.coeffs, k_subsets(self.dim, self.degree)):
                if c != 0.0:
                    val += c * np.linalg.det(cols[list(I), :])
            out.coeffs[oi] = val
        return out

    # -- serialization -------------------------------------------------------

    def to_json_dict(self):
        entries = []
        for c, I in zip(self.coeffs, k_subsets(self.dim, self.degree)):
            if c != 0.0:
                entries.append({"indices": [i + 1 for i in I], "value": c})
        return {"degree": self.degree, "dim": self.dim, "coeffs": entries}

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, d):
        f = cls(d["degree"], d["dim"])
        idx = subset_index(f.dim, f.degree)
        for e in d["coeffs"]:
            f.coeffs[idx[tuple(i - 1 for i in e["indices"])]] = e["value"]
        return f

    @classmethod
    def from_json(cls, s):
        return cls.from_json_dict(json.loads(s))

    def __repr__(self):
        return f"AlternatingForm(degree={self.degree}, dim={self.dim}, nnz={np.count_nonzero(self.coeffs)})"


# ---------------------------------------------------------------------------
# metric
# ---------------------------------------------------------------------------

@dataclass
class Metric7:
    """Symmetric positive-definite metric on R^7."""

    matrix: np.ndarray
    inverse: np.ndarray = field(init=False)
    det: float = field(init=False)

    def __post_init__(self):
        g = np.asarray(self.matrix, dtype=float)
        if g.shape != (7, 7):
            raise ValueError("metric must be 7x7")
        if not np.allclose(g, g.T, atol=1e-10):
            raise ValueError("metric must be symmetric")
        det = np.linalg.det(g)
        if det <= 1e-300 or np.any(np.linalg.eigvalsh(g) <= 0):
            raise ValueError("degenerate metric")
        self.matrix = g
        self.inverse = np.linalg.inv(g)
        self.det = det

    @classmethod
    def identity(cls):
        return cls(np.eye(7))


# ---------------------------------------------------------------------------
# the standard forms
# ---------------------------------------------------------------------------

# 1-based positive coefficients as usually printed
_PHI0_ENTRIES = {(1, 2, 3): 1.0, (1, 4, 5): 1.0, (1, 6, 7): 1.0, (2, 4, 6): 1.0,
                 (2, 5, 7): -1.0, (3, 4, 7): -1.0, (3, 5, 6): -1.0}
_STAR_PHI0_ENTRIES = {(4, 5, 6, 7): 1.0, (2, 3, 6, 7): 1.0, (2, 3, 4, 5): 1.0,
                      (1, 3, 5, 7): 1.0, (1, 3, 4, 6): -1.0, (1, 2, 5, 6): -1.0,
                      (1, 2, 4, 7): -1.0}


@lru_cache(maxsize=1)
def phi0():
    """The standard G2 3-form on R^7 (+123 +145 +167 +246 -257 -347 -356)."""
    return AlternatingForm.from_dict(
        3, 7, {tuple(i - 1 for i in k): v for k, v in _PHI0_ENTRIES.items()})


@lru_cache(maxsize=1)
def star_phi0():
    """Hodge dual of phi0 (+4567 +2367 +2345 +1357 -1346 -1256 -1247)."""
    return AlternatingForm.from_dict(
        4, 7, {tuple(i - 1 for i in k): v for k, v in _STAR_PHI0_ENTRIES.items()})


@lru_cache(maxsize=1)
def psi8():
    """Cayley 4-form on R^8 = R^7 + R e8:  phi ^ e8  -  *phi."""
    f = AlternatingForm(4, 8)
    idx = subset_index(8, 4)
    for c, I in zip(phi0().coeffs, k_subsets(7, 3)):
        if c != 0.0:
            f.coeffs[idx[I + (7,)]] += c
    for c, K in zip(star_phi0().coeffs, k_subsets(7, 4)):
        if c != 0.0:
            f.coeffs[idx[K]] -= c
    return f


# ---------------------------------------------------------------------------
# Hodge star
# ---------------------------------------------------------------------------

def hodge_star(f, g=None):
    """Hodge star on R^n with metric g (identity by default), orientation
    e^{1..n}.  Satisfies ** = (+1) on R^7 for every degree."""
    n, k = f.dim, f.degree
    if g is None:
        ginv = np.eye(n)
        sqrtdet = 1.0
    else:
        if isinstance(g, Metric7):
            gm, ginv = g.matrix, g.inverse
        else:
            gm = np.asarray(g, dtype=float)
            det = np.linalg.det(gm)
            if abs(det) < 1e-300:
                raise ValueError("degenerate metric")
            ginv = np.linalg.inv(gm)
        sqrtdet = float(np.sqrt(np.linalg.det(gm)))
    Sk = k_subsets(n, k)
    out = AlternatingForm(n - k, n)
    idx = subset_index(n, n - k)
    # raise indices with the compound of g^{-1}, then contract with epsilon
    for I in Sk:
        up = 0.0
        for c, J in zip(f.coeffs, Sk):
            if c != 0.0:
                up += c * np.linalg.det(ginv[np.ix_(list(I), list(J))])
        if up == 0.0:
            continue
        K = tuple(x for x in range(n) if x not in I)
        out.coeffs[idx[K]] += sqrtdet * up * perm_sign(I + K)
    return out


# ---------------------------------------------------------------------------
# chi, the R^7-valued defect 3-form
# ---------------------------------------------------------------------------

class VectorValued3Form:
    """3-form on R^7 with values in R^7, coefficients a[J, alpha]."""

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (35, 7):
            raise ValueError("expected coefficient array of shape (35, 7)")
        self.coeffs = coeffs.copy()
        self._packed = None

    def packed(self):
        if self._packed is None:
            S = k_subsets(7, 3)
            j0, j1, j2, al, co = [], [], [], [], []
            for ji in range(35):
                for a in range(7):
                    c = self.coeffs[ji, a]
                    if c != 0.0:
                        j0.append(S[ji][0]); j1.append(S[ji][1]); j2.append(S[ji][2])
                        al.append(a); co.append(c)
            self._packed = (np.array(j0, dtype=np.int64), np.array(j1, dtype=np.int64),
                            np.array(j2, dtype=np.int64), np.array(al, dtype=np.int64),
                            np.array(co))
        return self._packed

    def evaluate(self, u, v, w):
        return self.evaluate_batch(np.asarray(u, dtype=float)[None],
                                   np.asarray(v, dtype=float)[None],
                                   np.asarray(w, dtype=float)[None])[0]

    def evaluate_batch(self, U, V, W):
        U = np.ascontiguousarray(U, dtype=float)
        V = np.ascontiguousarray(V, dtype=float)
        W = np.ascontiguousarray(W, dtype=float)
        j0, j1, j2, al, co = self.packed()
        return _kernels.vv3_batch(U, V, W, j0, j1, j2, al, co, 7)


def chi_form(phi=None, g=None):
    """chi with <chi(u,v,w), z> = *phi(u,v,w,z): coefficients
    a[J, alpha] = (*phi)_{J s} g^{s alpha}."""
    if phi is None:
        phi = phi0()
    if g is None:
        g = Metric7.identity()
    star = hodge_star(phi, g)
    idx4 = subset_index(7, 4)
    S3 = k_subsets(7, 3)
    coeffs = np.zeros((35, 7))
    for ji, J in enumerate(S3):
        for s in range(7):
            if s in J:
                continue
            K = tuple(sorted(J + (s,)))
            c = star.coeffs[idx4[K]] * perm_sign(J + (s,))
            if c != 0.0:
                coeffs[ji] += c * g.inverse[s]
    return VectorValued3Form(coeffs)


@lru_cache(maxsize=1)
def chi_flat():
    """chi of the flat model (phi0, identity metric); cached."""
    return chi_form()


def chi_via_cross(u, v, w):
    """chi(u,v,w) = -u x (v x w) - <u,v> w + <u,w> v."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    return -cross7(u, cross7(v, w)) - np.dot(u, v) * w + np.dot(u, w) * v


def chi_via_cross_batch(U, V, W):
    inner = cross7_batch(V, W)
    duv = np.einsum("ni,ni->n", U, V)
    duw = np.einsum("ni,ni->n", U, W)
    return -cross7_batch(U, inner) - duv[:, None] * W + duw[:, None] * V


# ---------------------------------------------------------------------------
# metric and cross product recovered from a positive 3-form
# ---------------------------------------------------------------------------

def metric_from_phi(phi):
    """Metric of a positive 3-form.

    B_ij = coefficient of e^{1..7} in (e_i . phi) ^ (e_j . phi) ^ phi, then
    g = B / (6^{2/9} det(B)^{1/9}).  The scale makes the flat model exact:
    for phi0, B = 6 I and g = I.  Raises ValueError("form not positive")
    when B is not positive definite.
    """
    if phi.degree != 3 or phi.dim != 7:
        raise ValueError("need a 3-form on R^7")
    E = np.eye(7)
    ints = [phi.interior(E[i]) for i in range(7)]
    B = np.zeros((7, 7))
    for i in range(7):
        wi = ints[i]
        for j in range(i, 7):
            B[i, j] = B[j, i] = wi.wedge(ints[j]).wedge(phi).coeffs[0]
    try:
        np.linalg.cholesky(B)
    except np.linalg.LinAlgError:
        raise ValueError("form not positive") from None
    det = np.linalg.det(B)
    return Metric7(B / (6.0 ** (2.0 / 9.0) * det ** (1.0 / 9.0)))


def cross_from_phi(phi, g, u, v):
    """g-dual of the 1-form phi(u, v, .)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    T = phi.as_tensor()
    cov = np.einsum("ijk,i,j->k", T, u, v)
    if g is None:
        return cov
    return g.inverse @ cov


def cross_from_phi_batch(phi, g, U, V):
    T = phi.as_tensor()
    cov = np.einsum("ijk,ni,nj->nk", T, U, V)
    if g is None:
        return cov
    return cov @ g.inverse.T
