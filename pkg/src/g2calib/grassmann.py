"""Oriented planes in R^7/R^8: calibration testers, the complex structure on
normal 4-planes, Haar sampling, projection onto the associative Grassmannian,
and the defect flow on immersed 3-tori.

Calibration-defect bookkeeping: associative_test reports both the defect
vector chi(L) of the expansion-table normalization and defect_norm, the norm
of the doubled defect 2 chi(L) (the associator).  On an orthonormal frame
these satisfy  phi(L)^2 + defect_norm^2 / 4 = 1  exactly.
"""

from dataclasses import dataclass

import numpy as np

from .forms import chi_flat, chi_via_cross_batch, phi0, psi8
from .octonion import cross7

_FRAME_TOL = 1e-12


class Frame:
    """Orthonormal k-frame in R^n, orientation given by row order."""

    def __init__(self, vectors, tol=1e-10):
        V = np.asarray(vectors, dtype=float)
        if V.ndim != 2:
            raise ValueError("expected a (k, n) array of row vectors")
        gram = V @ V.T
        if not np.allclose(gram, np.eye(V.shape[0]), atol=tol):
            raise ValueError("non-orthonormal frame")
        self.vectors = V.copy()

    @property
    def k(self):
        return self.vectors.shape[0]

    @property
    def n(self):
        return self.vectors.shape[1]

    def __getitem__(self, i):
        return self.vectors[i]

    @property
    def projector(self):
        """Orthogonal projector onto the spanned k-plane."""
        return self.vectors.T @ self.vectors

    def rotate(self, A):
        """Frame with every vector mapped through the orthogonal matrix A."""
        return Frame(self.vectors @ np.asarray(A, dtype=float).T)

    def to_json_dict(self):
        return {"k": self.k, "n": self.n, "vectors": self.vectors.tolist()}

    def __repr__(self):
        return f"Frame(k={self.k}, n={self.n})"


@dataclass
class CalibrationReport:
    """Result of testing a 3-plane against the associative calibration.

    defect_norm is |2 chi(L)|, the norm of the full calibration defect, so
    phi_value**2 + defect_norm**2 / 4 == 1 on orthonormal frames;
    chi_defect is the defect vector in the expansion-table normalization.
    """

    phi_value: float
    chi_defect: np.ndarray
    defect_norm: float
    is_associative: bool

    def to_json_dict(self):
        return {"phi_value": self.phi_value,
                "chi_defect": self.chi_defect.tolist(),
                "defect_norm": self.defect_norm,
                "is_associative": bool(self.is_associative)}


def associative_test(L, tol=1e-10):
    """Calibration report of an orthonormal 3-frame in R^7."""
    if not isinstance(L, Frame):
        L = Frame(L)
    if (L.k, L.n) != (3, 7):
        raise ValueError("need a 3-frame in R^7")
    u, v, w = L.vectors
    p = phi0().evaluate(u, v, w)
    chi = chi_flat().evaluate(u, v, w)
    dn = 2.0 * float(np.linalg.norm(chi))
    return CalibrationReport(float(p), chi, dn, dn < tol)


def coassociative_test(X, phi=None):
    """Max |phi| over the four basis 3-planes of an orthonormal 4-frame;
    zero iff the plane is coassociative."""
    if not isinstance(X, Frame):
        X = Frame(X)
    if (X.k, X.n) != (4, 7):
        raise ValueError("need a 4-frame in R^7")
    f = phi0() if phi is None else phi
    vals = []
    for drop in range(4):
        rows = [X.vectors[r] for r in range(4) if r != drop]
        vals.append(abs(f.evaluate(*rows)))
    return max(vals)


def cayley_test(X):
    """Value of the Cayley 4-form on an orthonormal 4-frame in R^8;
    1 iff the oriented plane is Cayley, always in [-1, 1]."""
    if not isinstance(X, Frame):
        X = Frame(X)
    if (X.k, X.n) != (4, 8):
        raise ValueError("need a 4-frame in R^8")
    return float(psi8().evaluate(*X.vectors))


# ---------------------------------------------------------------------------
# normal complex structure
# ---------------------------------------------------------------------------

def normal_basis(L):
    """Orthonormal basis of the orthogonal complement of a frame.

    Deterministic: Gram-Schmidt over the coordinate directions in index
    order, so the complement of <e1,e2,e3> comes out as (e4,e5,e6,e7).
    """
    V = L.vectors if isinstance(L, Frame) else np.asarray(L, dtype=float)
    k, n = V.shape
    basis = []
    for i in range(n):
        cand = np.zeros(n)
        cand[i] = 1.0
        cand = cand - V.T @ (V @ cand)
        for b in basis:
            cand -= np.dot(b, cand) * b
        nrm = np.linalg.norm(cand)
        if nrm > 1e-9:
            basis.append(cand / nrm)
        if len(basis) == n - k:
            break
    return np.array(basis)


def normal_complex_structure(L, u, v, tol=1e-9):
    """The complex structure j(z) = chi(u, v, z) on the normal 4-plane of an
    associative 3-plane L, for an orthonormal pair {u, v} in L.

    Returns (J, basis): J is the 4x4 matrix of j in the returned orthonormal
    basis of the normal space.  Raises if L is not associative (j would not
    square to -I) or if {u, v} is not an orthonormal pair inside L.
    """
    if not isinstance(L, Frame):
        L = Frame(L)
    rep = associative_test(L, tol=max(tol, 1e-9))
    if not rep.is_associative:
        raise ValueError("plane not associative")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    P = L.vectors.T @ L.vectors
    for w in (u, v):
        if np.linalg.norm(P @ w - w) > tol:
            raise ValueError("u, v must lie in the plane")
    if abs(np.dot(u, v)) > tol or abs(np.dot(u, u) - 1) > tol or abs(np.dot(v, v) - 1) > tol:
        raise ValueError("u, v must be orthonormal")
    basis = normal_basis(L)
    chi = chi_flat()
    J = np.empty((4, 4))
    for a in range(4):
        img = chi.evaluate(u, v, basis[a])
        J[:, a] = basis @ img
    return J, basis


# ---------------------------------------------------------------------------
# sampling and projection
# ---------------------------------------------------------------------------

def sample_grassmann(seed, count, k=3, n=7):
    """Haar-uniform oriented k-frames in R^n, stacked as (count, k, n).

    Gaussian matrices orthonormalized by QR with the R-diagonal sign fix;
    deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    G = rng.normal(size=(count, n, k))
    Q, R = np.linalg.qr(G)
    signs = np.sign(np.einsum("mkk->mk", R))
    signs[signs == 0] = 1.0
    Q = Q * signs[:, None, :]
    return np.ascontiguousarray(np.swapaxes(Q, 1, 2))


def _defect_value_grad(V):
    """|chi(v1,v2,v3)|^2 and its Euclidean gradient wrt the (3,7) frame."""
    chi = chi_flat()
    x = chi.evaluate(V[0], V[1], V[2])
    E = np.eye(7)
    G = np.empty((3, 7))
    for slot in range(3):
        rows = [np.repeat(V[r][None, :], 7, axis=0) for r in range(3)]
        rows[slot] = E
        G[slot] = 2.0 * chi.evaluate_batch(*rows) @ x
    return float(x @ x), G


def _mgs_rows(V):
    out = V.copy()
    for i in range(out.shape[0]):
        for j in range(i):
            out[i] -= np.dot(out[j], out[i]) * out[j]
        nrm = np.linalg.norm(out[i])
        if nrm < 1e-12:
            raise ValueError("degenerate frame in retraction")
        out[i] /= nrm
    return out


def project_to_associative(L0, step=0.2, max_iter=2000, tol=1e-10):
    """Riemannian gradient descent of |chi(L)|^2 over oriented 3-planes.

    Fixed-step descent with halving on increase and Gram-Schmidt retraction;
    returns a frame whose defect_norm is below tol, or raises
    RuntimeError("no convergence in max_iter").
    """
    V = (L0.vectors if isinstance(L0, Frame) else np.asarray(L0, dtype=float)).copy()
    V = _mgs_rows(V)
    f, G = _defect_value_grad(V)
    for _ in range(max_iter):
        if 2.0 * np.sqrt(f) < tol:
            return Frame(V)
        # tangent projection on the Stiefel manifold of row-orthonormal V
        A = G @ V.T
        Gt = G - 0.5 * (A + A.T) @ V
        s = step
        for _ in range(40):
            Vn = _mgs_rows(V - s * Gt)
            fn, Gn = _defect_value_grad(Vn)
            if fn <= f:
                break
            s *= 0.5
        else:
            raise RuntimeError("no convergence in max_iter")
        V, f, G = Vn, fn, Gn
    if 2.0 * np.sqrt(f) < tol:
        return Frame(V)
    raise RuntimeError("no convergence in max_iter")


def defect_jacobian(L):
    """Jacobian of the defect map on the 12-dimensional tangent space of the
    Grassmannian at L, as a (7, 12) matrix over the basis e_i x slot_c of
    Hom(L, L-perp) directions; used for rank probes."""
    V = L.vectors if isinstance(L, Frame) else np.asarray(L, dtype=float)
    chi = chi_flat()
    nb = normal_basis(V)
    cols = []
    for slot in range(3):
        for a in range(4):
            rows = [V[0], V[1], V[2]]
            rows[slot] = nb[a]
            cols.append(chi.evaluate(*rows))
    return np.array(cols).T


# ---------------------------------------------------------------------------
# immersed lattice tori and the defect flow
# ---------------------------------------------------------------------------

class Immersion3Lattice:
    """Periodic N^3 grid of points in T^7 = R^7/Z^7, grid spacing h = 1/N."""

    def __init__(self, points):
        P = np.asarray(points, dtype=float)
        if P.ndim != 4 or P.shape[3] != 7 or len(set(P.shape[:3])) != 1:
            raise ValueError("expected points of shape (N, N, N, 7)")
        if P.shape[0] < 2:
            raise ValueError("grid size N >= 2 required")
        P = np.mod(P, 1.0)
        P[P >= 1.0] = 0.0   # mod can round -tiny up to exactly 1.0
        self.points = P

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def h(self):
        return 1.0 / self.n

    @classmethod
    def flat_torus(cls, n, offset=None):
        """Coordinate torus spanned by (e1, e2, e3); an associative fixed
        point of the defect flow."""
        t = np.arange(n) / n
        P = np.zeros((n, n, n, 7))
        P[..., 0] = t[:, None, None]
        P[..., 1] = t[None, :, None]
        P[..., 2] = t[None, None, :]
        if offset is not None:
            P[..., 3:] += np.asarray(offset, dtype=float)
        return cls(P)

    @classmethod
    def perturbed_torus(cls, n, amplitude, phase=0.0):
        """Flat torus plus a normal spiral mode along the first axis
        (cos into e4, sin into e5); decays under the defect flow."""
        P = cls.flat_torus(n).points.copy()
        theta = 2 * np.pi * (np.arange(n) / n) + phase
        P[..., 3] += amplitude * np.cos(theta)[:, None, None]
        P[..., 4] += amplitude * np.sin(theta)[:, None, None]
        return cls(P)

    def tangent_frames(self):
        """Central-difference tangent 3-frames, orthonormalized, (N^3, 3, 7).

        Differences are wrapped to the nearest torus representative.  Raises
        if a frame degenerates (rank < 3).
        """
        P = self.points
        frames = np.empty((3,) + P.shape)
        for m in range(3):
            d = np.roll(P, -1, axis=m) - np.roll(P, 1, axis=m)
            d -= np.round(d)
            frames[m] = d / (2.0 * self.h)
        T = frames.reshape(3, -1, 7)
        # vectorized Gram-Schmidt of (t1, t2, t3) per site
        out = np.empty_like(T)
        t1 = T[0]
        n1 = np.linalg.norm(t1, axis=1)
        if np.any(n1 < 1e-10):
            raise ValueError("degenerate frame (rank < 3)")
        out[0] = t1 / n1[:, None]
        t2 = T[1] - np.einsum("ni,ni->n", out[0], T[1])[:, None] * out[0]
        n2 = np.linalg.norm(t2, axis=1)
        if np.any(n2 < 1e-10):
            raise ValueError("degenerate frame (rank < 3)")
        out[1] = t2 / n2[:, None]
        t3 = (T[2] - np.einsum("ni,ni->n", out[0], T[2])[:, None] * out[0]
              - np.einsum("ni,ni->n", out[1], T[2])[:, None] * out[1])
        n3 = np.linalg.norm(t3, axis=1)
        if np.any(n3 < 1e-10):
            raise ValueError("degenerate frame (rank < 3)")
        out[2] = t3 / n3[:, None]
        return np.swapaxes(out, 0, 1)

    def defect_field(self):
        """Per-site defect vectors chi(frame), shape (N^3, 7)."""
        F = self.tangent_frames()
        return chi_via_cross_batch(F[:, 0], F[:, 1], F[:, 2])

    def defect_norms(self):
        """Per-site defect norms |2 chi|, shape (N^3,)."""
        return 2.0 * np.linalg.norm(self.defect_field(), axis=1)

    def max_defect(self):
        return float(self.defect_norms().max())

    def to_csv_rows(self):
        """(site index, 7 coordinates, defect norm) per site."""
        P = self.points.reshape(-1, 7)
        d = self.defect_norms()
        return [(i, *P[i], d[i]) for i in range(P.shape[0])]


def chi_flow_step(lattice, dt):
    """One explicit step of the defect flow: each site moves by
    dt * chi(tangent frame).  Flat associative tori are exact fixed points."""
    if dt == 0.0:
        return Immersion3Lattice(lattice.points)
    disp = lattice.defect_field().reshape(lattice.points.shape)
    return Immersion3Lattice(lattice.points + dt * disp)
