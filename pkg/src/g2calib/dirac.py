"""Lattice Dirac operators on the flat associative 3-torus, and the
Seiberg-Witten residual layer.

Model: the coordinate torus T^3 with N^3 sites, spacing h = 1/N.  The
normal/spinor fiber is the quaternions; fields come in two equivalent
shapes:

* real form, (N,N,N,4) float: quaternion components, Clifford action =
  left multiplication by (i, j, k);
* complex form, (N,N,N,2) complex: the same module written as C^2
  (q = z1 + j z2, complex scalars act on the right), Clifford matrices
  C1 = [[i,0],[0,-i]], C2 = [[0,-1],[1,0]], C3 = [[0,-i],[-i,0]].

Connections are per-site covector fields; the operator couples them as
link variables U_m(x) = exp(h a_m(x)) on the edge (x, x + e_m), applied
through the symmetric central difference

    D v(x) = sum_m  e^m . [ U_m(x) v(x+e_m) - U_m(x-e_m)^{-1} v(x-e_m) ] / 2h.

With this coupling the assembled matrix is exactly symmetric (real form)
or Hermitian (complex form), the spectrum is symmetric about zero, and
gauge transformations v -> e^f v, a -> a - d+f (forward difference) move
residuals exactly covariantly.

Central differences double: the untwisted symbol sin(2 pi k_m / N)/h
vanishes on all 2^3 corners k_m in {0, N/2}, so the untwisted kernel is
4 x 8 dimensional at even N, 4 per Fourier sector, the constants being the
(0,0,0)-sector copy.  Kernel counts are therefore reported per sector
(sector_kernel_dims) alongside the raw count (kernel_dimension).
"""

import json
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import eigh

from . import _kernels
from .octonion import quat_conj, quat_exp_im, quat_mul

_DENSE_LIMIT = 4200   # assemble densely up to this operator dimension

# Clifford matrices of the complex form
CLIFF_C = (
    np.array([[1j, 0], [0, -1j]]),
    np.array([[0, -1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [-1j, 0]]),
)

_QUNITS = (np.array([0, 1.0, 0, 0]), np.array([0, 0, 1.0, 0]), np.array([0, 0, 0, 1.0]))


# ---------------------------------------------------------------------------
# connections
# ---------------------------------------------------------------------------

@dataclass
class Connection1Form:
    """Per-site 3-covector connection field on the N^3 torus.

    u1 holds the determinant-line part: real theta with connection value
    i theta.  left/right hold so(4)-valued parts as imaginary-quaternion
    coefficient fields (N,N,N,3,3), acting by left/right quaternion
    multiplication on the fiber (real form only).
    """

    n: int
    u1: np.ndarray = None
    left: np.ndarray = None
    right: np.ndarray = None

    def __post_init__(self):
        n = self.n
        if self.u1 is not None:
            self.u1 = np.asarray(self.u1, dtype=float)
            if self.u1.shape != (n, n, n, 3):
                raise ValueError("u1 field must have shape (N,N,N,3)")
        for name in ("left", "right"):
            f = getattr(self, name)
            if f is not None:
                f = np.asarray(f, dtype=float)
                if f.shape != (n, n, n, 3, 3):
                    raise ValueError(f"{name} field must have shape (N,N,N,3,3)")
                setattr(self, name, f)

    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def u1_constant(cls, n, theta):
        theta = np.asarray(theta, dtype=float)
        f = np.broadcast_to(theta, (n, n, n, 3)).copy()
        return cls(n, u1=f)

    @property
    def h(self):
        return 1.0 / self.n

    def is_zero(self):
        return self.u1 is None and self.left is None and self.right is None

    def is_u1_only(self):
        return self.left is None and self.right is None

    def is_constant(self):
        for f in (self.u1, self.left, self.right):
            if f is not None and np.ptp(f.reshape(self.n ** 3, -1), axis=0).max() > 0:
                return False
        return True

    def u1_theta(self):
        if self.u1 is None:
            return np.zeros((self.n,) * 3 + (3,))
        return self.u1

    def phase_links(self):
        """Complex link phases exp(i h theta), shape (3,N,N,N)."""
        th = self.u1_theta()
        return np.exp(1j * self.h * np.moveaxis(th, -1, 0))

    def quat_links(self):
        """Real-form link data (sF, rF), each (3,N,N,N,4).

        The link U = L_{exp(h b)} R_{exp(h(a + theta i))} splits into a left
        and right quaternion; sF is the symmetrized Clifford-times-left-link
        quaternion (q_m exp(h b) + exp(h b) q_m)/2, rF the right one.
        """
        n, h = self.n, self.h
        shape3 = (n, n, n)
        sF = np.empty((3,) + shape3 + (4,))
        rF = np.empty((3,) + shape3 + (4,))
        for m in range(3):
            if self.left is not None:
                ub = quat_exp_im(h * self.left[..., m, :])
            else:
                ub = np.zeros(shape3 + (4,))
                ub[..., 0] = 1.0
            q = _QUNITS[m]
            sF[m] = 0.5 * (quat_mul(np.broadcast_to(q, ub.shape), ub)
                           + quat_mul(ub, np.broadcast_to(q, ub.shape)))
            rvec = np.zeros(shape3 + (3,))
            if self.right is not None:
                rvec = rvec + self.right[..., m, :]
            if self.u1 is not None:
                rvec = rvec + self.u1[..., m, None] * np.array([1.0, 0.0, 0.0])
            rF[m] = quat_exp_im(h * rvec)
        return sF, rF


# ---------------------------------------------------------------------------
# operator application and assembly
# ---------------------------------------------------------------------------

def dirac_apply(v, conn):
    """Apply the twisted lattice Dirac operator to a spinor field.

    Real form for (N,N,N,4) float fields, complex form for (N,N,N,2)
    complex fields.
    """
    v = np.asarray(v)
    n = conn.n
    if v.shape[:3] != (n, n, n):
        raise ValueError("grid mismatch between field and connection")
    inv2h = 1.0 / (2.0 * conn.h)
    if v.shape[3:] == (4,) and not np.iscomplexobj(v):
        sF, rF = conn.quat_links()
        return _kernels.dirac_real(np.ascontiguousarray(v, dtype=float),
                                   np.ascontiguousarray(sF),
                                   np.ascontiguousarray(rF), inv2h)
    if v.shape[3:] == (2,):
        if not conn.is_u1_only():
            raise ValueError("complex form supports determinant-line connections only")
        return _kernels.dirac_complex(np.ascontiguousarray(v, dtype=complex),
                                      np.ascontiguousarray(conn.phase_links()), inv2h)
    raise ValueError("field must be (N,N,N,4) real or (N,N,N,2) complex")


def _site_index(n):
    idx = np.arange(n ** 3).reshape(n, n, n)
    return idx


def _lmat_batch(q):
    """Left-multiplication 4x4 matrices of quaternions, batched."""
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    M = np.empty(q.shape[:-1] + (4, 4))
    M[..., 0, 0], M[..., 0, 1], M[..., 0, 2], M[..., 0, 3] = w, -x, -y, -z
    M[..., 1, 0], M[..., 1, 1], M[..., 1, 2], M[..., 1, 3] = x, w, -z, y
    M[..., 2, 0], M[..., 2, 1], M[..., 2, 2], M[..., 2, 3] = y, z, w, -x
    M[..., 3, 0], M[..., 3, 1], M[..., 3, 2], M[..., 3, 3] = z, -y, x, w
    return M


def _rmat_batch(q):
    """Right-multiplication matrices (y -> y q), batched."""
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    M = np.empty(q.shape[:-1] + (4, 4))
    M[..., 0, 0], M[..., 0, 1], M[..., 0, 2], M[..., 0, 3] = w, -x, -y, -z
    M[..., 1, 0], M[..., 1, 1], M[..., 1, 2], M[..., 1, 3] = x, w, z, -y
    M[..., 2, 0], M[..., 2, 1], M[..., 2, 2], M[..., 2, 3] = y, -z, w, x
    M[..., 3, 0], M[..., 3, 1], M[..., 3, 2], M[..., 3, 3] = z, y, -x, w
    return M


def dirac_matrix(conn, form="real"):
    """Sparse matrix of the operator; identical to dirac_apply as a map."""
    n = conn.n
    sites = _site_index(n)
    inv2h = 1.0 / (2.0 * conn.h)
    rows, cols, vals = [], [], []
    if form == "real":
        blk = 4
        sF, rF = conn.quat_links()
        for m in range(3):
            fwd = _lmat_batch(sF[m]) @ _rmat_batch(rF[m]) * inv2h
            bwd = (_lmat_batch(quat_conj(sF[m])) @ _rmat_batch(quat_conj(rF[m]))) * inv2h
            plus = np.roll(sites, -1, axis=m)
            for dr in range(blk):
                for dc in range(blk):
                    rows.append(blk * sites.ravel() + dr)
                    cols.append(blk * plus.ravel() + dc)
                    vals.append(fwd[..., dr, dc].ravel())
                    rows.append(blk * plus.ravel() + dr)
                    cols.append(blk * sites.ravel() + dc)
                    vals.append(bwd[..., dr, dc].ravel())
        dtype = float
    elif form == "complex":
        if not conn.is_u1_only():
            raise ValueError("complex form supports determinant-line connections only")
        blk = 2
        ph = conn.phase_links()
        for m in range(3):
            plus = np.roll(sites, -1, axis=m)
            for dr in range(blk):
                for dc in range(blk):
                    c = CLIFF_C[m][dr, dc]
                    if c == 0:
                        continue
                    rows.append(blk * sites.ravel() + dr)
                    cols.append(blk * plus.ravel() + dc)
                    vals.append(c * ph[m].ravel() * inv2h)
                    rows.append(blk * plus.ravel() + dr)
                    cols.append(blk * sites.ravel() + dc)
                    vals.append(-c * np.conj(ph[m].ravel()) * inv2h)
        dtype = complex
    else:
        raise ValueError("form must be 'real' or 'complex'")
    dim = blk * n ** 3
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals).astype(dtype)
    return sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()


def operator_asymmetry(conn, form="real"):
    """max |D - D^T| (real form) or |D - D^dagger| (complex form)."""
    M = dirac_matrix(conn, form)
    if form == "real":
        d = M - M.T
    else:
        d = M - M.conj().T
    return float(np.abs(d.toarray()).max()) if d.nnz else 0.0


def dirac_spectrum(conn, count=None, form="real", seed=0):
    """Lowest-|lambda| eigenvalues, sorted by (|lambda|, lambda).

    Dense solve below _DENSE_LIMIT, else shift-inverted Lanczos around zero
    with a seed-derived deterministic start vector.
    """
    M = dirac_matrix(conn, form)
    dim = M.shape[0]
    if count is None:
        count = dim
    count = min(count, dim)
    if dim <= _DENSE_LIMIT or count > dim - 2:
        vals = eigh(M.toarray(), eigvals_only=True)
    else:
        rng = np.random.default_rng(seed)
        v0 = rng.normal(size=dim)
        if form == "complex":
            v0 = v0 + 1j * rng.normal(size=dim)
        try:
            vals = spla.eigsh(M, k=count, sigma=0.0, which="LM", v0=v0,
                              return_eigenvectors=False)
        except RuntimeError:
            # singular shift: nudge it off zero
            vals = spla.eigsh(M, k=count, sigma=1e-8, which="LM", v0=v0,
                              return_eigenvectors=False)
    vals = np.real(vals)
    order = np.lexsort((vals, np.abs(vals)))
    return vals[order][:count]


def kernel_dimension(conn, form="real", tol=1e-8):
    """Dimension of the full operator kernel (counts doubler copies)."""
    vals = dirac_spectrum(conn, form=form)
    mult = 1 if form == "real" else 2   # complex eigenvalues carry 2 real dims
    return int(np.sum(np.abs(vals) < tol)) * mult


def kernel_constant_dimension(conn, form="real", tol=1e-10):
    """Real dimension of the kernel within constant fields (the physical,
    zero-momentum sector)."""
    n = conn.n
    nbasis, per = (4, 1) if form == "real" else (2, 2)
    count = 0
    for c in range(nbasis):
        if form == "real":
            v = np.zeros((n, n, n, 4))
        else:
            v = np.zeros((n, n, n, 2), dtype=complex)
        v[..., c] = 1.0
        if np.linalg.norm(dirac_apply(v, conn)) < tol * n ** 1.5:
            count += per
    return count


def analytic_spectrum(n, theta=(0.0, 0.0, 0.0), form="real"):
    """Exact spectrum of the constant-twist operator from the difference
    symbol: +-|s(k)| with s_m(k) = sin(2 pi k_m / N + h theta_m) / h,
    multiplicity 2 per Fourier mode (real form) or 1 (complex form)."""
    h = 1.0 / n
    k = np.arange(n)
    grids = np.meshgrid(k, k, k, indexing="ij")
    s2 = np.zeros((n, n, n))
    for m in range(3):
        s2 += (np.sin(2 * np.pi * grids[m] / n + h * theta[m]) / h) ** 2
    s = np.sqrt(s2).ravel()
    mult = 2 if form == "real" else 1
    vals = np.concatenate([np.repeat(s, mult), np.repeat(-s, mult)])
    return np.sort(vals)


def sector_kernel_dims(n, theta=(0.0, 0.0, 0.0), form="real", tol=1e-12):
    """Kernel dimension of a constant-twist operator split by Fourier
    doubling sector.

    Sector bits mark, per axis, whether the mode sits on the k=0 branch or
    the k=N/2 doubler branch.  Untwisted even-N operators report 4 (real
    form) in every one of the 8 sectors; the (0,0,0) entry is the constants.
    """
    h = 1.0 / n
    dims = {}
    k = np.arange(n)
    grids = np.meshgrid(k, k, k, indexing="ij")
    svals = [np.sin(2 * np.pi * grids[m] / n + h * theta[m]) / h for m in range(3)]
    smag = np.sqrt(sum(sv ** 2 for sv in svals))
    if form == "real":
        svals_m = [np.sin(2 * np.pi * grids[m] / n - h * theta[m]) / h for m in range(3)]
        smag_m = np.sqrt(sum(sv ** 2 for sv in svals_m))
    for idx in np.ndindex(n, n, n):
        # real kernel dimensions: 2 per vanishing chirality branch (real
        # form), 4 = dim_R C^2 per vanishing mode (complex form)
        contrib = 0
        if form == "real":
            if smag[idx] < tol:
                contrib += 2
            if smag_m[idx] < tol:
                contrib += 2
        elif smag[idx] < tol:
            contrib = 4
        if contrib:
            bits = tuple(1 if (n // 4) <= idx[m] < (3 * n) // 4 else 0 for m in range(3))
            dims[bits] = dims.get(bits, 0) + contrib
    return dims


# ---------------------------------------------------------------------------
# quadratic spinor map and Seiberg-Witten residuals
# ---------------------------------------------------------------------------

def sigma_map(x):
    """sigma(x, x) = ((|z|^2 - |w|^2)/2, conj(z) w) for x = (z, w)."""
    x = np.asarray(x, dtype=complex)
    z, w = x[..., 0], x[..., 1]
    return (np.real(z * np.conj(z) - w * np.conj(w)) / 2.0, np.conj(z) * w)


def sigma_field(v):
    """sigma as a real 1-form field: components
    ((|z|^2-|w|^2)/2, Re(conj(z)w), Im(conj(z)w)) on (e1, e2, e3)."""
    t, c = sigma_map(v)
    return np.stack([t, np.real(c), np.imag(c)], axis=-1)


def sigma_polarized(v0, v):
    """Symmetric bilinear polarization; sigma_polarized(v, v) = sigma_field(v)."""
    v0 = np.asarray(v0, dtype=complex)
    v = np.asarray(v, dtype=complex)
    z0, w0 = v0[..., 0], v0[..., 1]
    z, w = v[..., 0], v[..., 1]
    t = (np.real(np.conj(z0) * z) - np.real(np.conj(w0) * w)) / 2.0
    c = (np.conj(z0) * w + np.conj(z) * w0) / 2.0
    return np.stack([t, np.real(c), np.imag(c)], axis=-1)


def forward_diff(f, axis, h):
    return (np.roll(f, -1, axis=axis) - f) / h


def curl_theta(theta, h):
    """Forward-difference curl of a real 1-form field; components
    (F23, F31, F12), i.e. already the 3-manifold Hodge star of F."""
    d = [[forward_diff(theta[..., m2], m1, h) for m2 in range(3)] for m1 in range(3)]
    return np.stack([d[1][2] - d[2][1], d[2][0] - d[0][2], d[0][1] - d[1][0]], axis=-1)


@dataclass
class SWState:
    """Spinor field v (complex C^2 form), a determinant-line connection, and
    a real perturbation 1-form delta."""

    v: np.ndarray
    a: Connection1Form
    delta: np.ndarray

    def __post_init__(self):
        n = self.a.n
        self.v = np.asarray(self.v, dtype=complex)
        self.delta = np.asarray(self.delta, dtype=float)
        if self.v.shape != (n, n, n, 2):
            raise ValueError("v must have shape (N,N,N,2)")
        if self.delta.shape != (n, n, n, 3):
            raise ValueError("delta must have shape (N,N,N,3)")
        if not self.a.is_u1_only():
            raise ValueError("SW states use determinant-line connections")

    @classmethod
    def zero(cls, n):
        return cls(np.zeros((n, n, n, 2), dtype=complex), Connection1Form.zero(n),
                   np.zeros((n, n, n, 3)))

    def to_json_dict(self):
        return {"schema": 1, "n": self.a.n,
                "v_re": np.real(self.v).tolist(), "v_im": np.imag(self.v).tolist(),
                "a_theta": self.a.u1_theta().tolist(),
                "delta": self.delta.tolist()}

    @classmethod
    def from_json_dict(cls, d):
        n = int(d["n"])
        v = np.asarray(d["v_re"], dtype=float) + 1j * np.asarray(d["v_im"], dtype=float)
        conn = Connection1Form(n, u1=np.asarray(d["a_theta"], dtype=float))
        return cls(v, conn, np.asarray(d["delta"], dtype=float))

    @classmethod
    def from_json(cls, s):
        return cls.from_json_dict(json.loads(s))


def sw_residual(state):
    """(Dirac residual, curvature residual):

        r1 = D_A v
        r2 = *F_A + i delta - i sigma(v, v)

    with F_A the forward-difference curl of the connection and sigma cast
    into i R-valued 1-forms along the (e1, e2, e3) components."""
    r1 = dirac_apply(state.v, state.a)
    th = state.a.u1_theta()
    r2 = 1j * (curl_theta(th, state.a.h) + state.delta - sigma_field(state.v))
    return r1, r2


def gauge_transform(state, f):
    """v -> e^{if} v, theta -> theta - d+f (forward difference), delta fixed."""
    f = np.asarray(f, dtype=float)
    n = state.a.n
    vp = np.exp(1j * f)[..., None] * state.v
    th = state.a.u1_theta().copy()
    for m in range(3):
        th[..., m] -= forward_diff(f, m, state.a.h)
    return SWState(vp, Connection1Form(n, u1=th), state.delta.copy())


def sw_linearization(state, dv, dtheta, ddelta):
    """Exact derivative of sw_residual at state in direction
    (dv, dtheta, ddelta); at the zero connection the first component is
    D(dv) + a.v with the point-split lattice realization of a.v."""
    dv = np.asarray(dv, dtype=complex)
    dtheta = np.asarray(dtheta, dtype=float)
    ddelta = np.asarray(ddelta, dtype=float)
    n, h = state.a.n, state.a.h
    r1 = dirac_apply(dv, state.a)
    ph = state.a.phase_links()
    extra = np.zeros_like(state.v)
    for m in range(3):
        hop = (dtheta[..., m] * ph[m])[..., None] * np.roll(state.v, -1, axis=m)
        hop_b = (np.roll(dtheta[..., m], 1, axis=m)
                 * np.conj(np.roll(ph[m], 1, axis=m)))[..., None] * np.roll(state.v, 1, axis=m)
        term = 0.5j * (hop + hop_b)
        extra += np.einsum("rc,xyzc->xyzr", CLIFF_C[m], term)
    r1 = r1 + extra
    r2 = 1j * (curl_theta(dtheta, h) + ddelta - 2.0 * sigma_polarized(state.v, dv))
    return r1, r2


def div_backward(a, h):
    return sum((a[..., m] - np.roll(a[..., m], 1, axis=m)) / h for m in range(3))


def scalar_one_form_complex_matrix(n):
    """Square matrix of (f, a) -> (d* a, df + *da) on the N^3 lattice,
    mapping Omega^0 + Omega^1 to itself; its domain and codomain dimensions
    agree (index zero)."""
    h = 1.0 / n
    n3 = n ** 3
    dim = 4 * n3

    def matvec(x):
        f = x[:n3].reshape(n, n, n)
        a = x[n3:].reshape(n, n, n, 3)
        out0 = -div_backward(a, h)
        df = np.stack([forward_diff(f, m, h) for m in range(3)], axis=-1)
        out1 = df + curl_theta(a, h)
        return np.concatenate([out0.ravel(), out1.ravel()])

    return spla.LinearOperator((dim, dim), matvec=matvec, dtype=float)


def sw_index_formula(c1_sq, euler, signature):
    """d = [c1^2 - (2 e + 3 sigma)] / 4, as integer arithmetic; raises
    ValueError("not realizable") when the bracket is not divisible by 4."""
    num = int(c1_sq) - (2 * int(euler) + 3 * int(signature))
    if num % 4 != 0:
        raise ValueError("not realizable")
    return num // 4
