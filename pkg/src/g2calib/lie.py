"""The 14-dimensional stabilizer algebra of the G2 3-form inside so(7),
its block structure relative to the split R^7 = <e1,e2,e3> + <e4..e7>,
the SO(4) block action, and Clifford multiplication on the normal 4-plane.

Quaternion coordinates on the normal 4-plane: the isometry

    (e4, e5, e6, e7)  <->  (1, -i, -j, k)

is the one for which the cross product with a tangent vector acts by left
quaternion multiplication (z x e_m = q_m z) and the block action
(x, y) -> (q x q^-1, q y lambda^-1) preserves the G2 3-form exactly.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .forms import AlternatingForm, k_subsets, perm_sign, phi0
from .octonion import QUAT_I, QUAT_J, QUAT_K, quat_conj, quat_mul

_RANK_RTOL = 1e-8   # singular values below this (relative) count as zero

# sign pattern of the quaternion coordinates on the normal plane
_V_SIGNS = np.array([1.0, -1.0, -1.0, 1.0])


def vec4_to_quat(y):
    """Normal-plane components (e4..e7) to quaternion coordinates."""
    return np.asarray(y, dtype=float) * _V_SIGNS


def quat_to_vec4(q):
    return np.asarray(q, dtype=float) * _V_SIGNS


def so7_generator(i, j):
    A = np.zeros((7, 7))
    A[i, j] = 1.0
    A[j, i] = -1.0
    return A


def lie_action_on_3forms(A, f):
    """Infinitesimal pullback: (L_A f)(u,v,w) = -f(Au,v,w) - f(u,Av,w) - f(u,v,Aw)."""
    A = np.asarray(A, dtype=float)
    T = f.as_tensor()
    LT = -(np.einsum("ia,ibc->abc", A, T)
           + np.einsum("jb,ajc->abc", A, T)
           + np.einsum("kc,abk->abc", A, T))
    out = AlternatingForm(3, f.dim)
    for m, I in enumerate(k_subsets(f.dim, 3)):
        out.coeffs[m] = LT[I]
    return out


@dataclass
class G2Basis:
    """Orthonormal basis of the stabilizer algebra, plus the singular values
    of the stabilizer map so(7) -> Lambda^3 that certify its rank."""

    elements: np.ndarray          # (14, 7, 7)
    singular_values: np.ndarray   # (21,) descending
    gap: float                    # sv[6] / sv[7]: nonzero over numerically-zero

    def __len__(self):
        return self.elements.shape[0]

    def __getitem__(self, i):
        return self.elements[i]

    def span_residual(self, A):
        """Distance of an antisymmetric matrix from the basis span."""
        pairs = k_subsets(7, 2)
        vec = np.array([A[i, j] for (i, j) in pairs])
        B = np.array([[el[i, j] for (i, j) in pairs] for el in self.elements]).T
        coef, *_ = np.linalg.lstsq(B, vec, rcond=None)
        return float(np.linalg.norm(B @ coef - vec))

    def to_json_dict(self):
        return {"dimension": len(self), "gap": self.gap,
                "elements": self.elements.tolist()}


@lru_cache(maxsize=1)
def compute_g2_basis():
    """Nullspace of A -> L_A phi0 on so(7); dimension must come out 14."""
    pairs = k_subsets(7, 2)
    f = phi0()
    M = np.empty((35, 21))
    for c, (i, j) in enumerate(pairs):
        M[:, c] = lie_action_on_3forms(so7_generator(i, j), f).coeffs
    U, S, Vt = np.linalg.svd(M)
    nzero = int(np.sum(S < _RANK_RTOL * S[0]))
    null_dim = (21 - len(S)) + nzero  # S has min(35,21)=21 entries
    if null_dim != 14:
        raise RuntimeError(f"stabilizer nullspace has dimension {null_dim}, expected 14")
    gap = float(S[6] / max(S[7], np.finfo(float).tiny))
    basis_vecs = Vt[7:, :]            # orthonormal rows spanning the nullspace
    elements = np.zeros((14, 7, 7))
    for m in range(14):
        for c, (i, j) in enumerate(pairs):
            elements[m, i, j] = basis_vecs[m, c]
            elements[m, j, i] = -basis_vecs[m, c]
    return G2Basis(elements, S.copy(), gap)


# ---------------------------------------------------------------------------
# block form relative to R^7 = <e1,e2,e3> + <e4..e7>
# ---------------------------------------------------------------------------

@dataclass
class G2BlockForm:
    """Block decomposition [[rho, -beta^T], [beta, a]] of a g2 element.

    a is the so(4) block on the normal plane, rho the so(3) block on the
    tangent plane, and beta the (4, 3) off-diagonal block.  beta_quats holds
    the three columns as quaternions; they satisfy the kernel relation
    i beta_1 + j beta_2 + k beta_3 = 0 (left multiplication in the
    normal-plane quaternion coordinates).
    """

    a_so4: np.ndarray
    rho_so3: np.ndarray
    beta: np.ndarray
    beta_quats: np.ndarray
    constraint_residual: float


def g2_block_form(A, tol=1e-8):
    """Decompose a g2 element; raises ValueError if A is not in g2."""
    A = np.asarray(A, dtype=float)
    basis = compute_g2_basis()
    if np.abs(A + A.T).max() > 1e-10 or basis.span_residual(A) > tol * max(1.0, np.abs(A).max()):
        raise ValueError("input not in g2")
    rho = A[:3, :3]
    a = A[3:, 3:]
    beta = A[3:, :3]
    bq = np.array([vec4_to_quat(beta[:, m]) for m in range(3)])
    resid = (quat_mul(QUAT_I, bq[0]) + quat_mul(QUAT_J, bq[1]) + quat_mul(QUAT_K, bq[2]))
    return G2BlockForm(a, rho, beta, bq, float(np.linalg.norm(resid)))


def beta_solution_dim():
    """Dimension of the space of (4,3) blocks satisfying the kernel relation;
    equals dim G2 - dim SO(4) = 8."""
    return 12 - clifford_rank()


# ---------------------------------------------------------------------------
# SO(4) block action
# ---------------------------------------------------------------------------

@dataclass
class So4BlockElement:
    """Pair of unit quaternions (q, lambda) modulo joint sign."""

    q: np.ndarray
    lam: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        lam = np.asarray(self.lam, dtype=float)
        nq, nl = np.linalg.norm(q), np.linalg.norm(lam)
        if nq < 1e-12 or nl < 1e-12:
            raise ValueError("zero quaternion")
        self.q = q / nq
        self.lam = lam / nl


def so4_action(e, x, y):
    """(x, y) -> (q x q^-1, q y lambda^-1) with x in Im H (3 components) and
    y a quaternion."""
    q, lam = e.q, e.lam
    xq = np.concatenate([[0.0], np.asarray(x, dtype=float)])
    xr = quat_mul(quat_mul(q, xq), quat_conj(q))
    yr = quat_mul(quat_mul(q, np.asarray(y, dtype=float)), quat_conj(lam))
    return xr[1:], yr


def rotation3_of_quat(q):
    """3x3 rotation x -> q x q^-1 on Im H."""
    R = np.empty((3, 3))
    for m, base in enumerate((QUAT_I, QUAT_J, QUAT_K)):
        R[:, m] = quat_mul(quat_mul(q, base), quat_conj(q))[1:]
    return R


def so4_block_matrix(e):
    """The 7x7 matrix of the block action in the model coordinates; lies in
    the G2 stabilizer group (pullback of phi0 is phi0)."""
    T = np.zeros((7, 7))
    T[:3, :3] = rotation3_of_quat(e.q)
    M = np.empty((4, 4))
    for m in range(4):
        y = np.zeros(4)
        y[m] = _V_SIGNS[m]
        M[:, m] = quat_to_vec4(quat_mul(quat_mul(e.q, y), quat_conj(e.lam)))
    T[3:, 3:] = M
    return T


# ---------------------------------------------------------------------------
# Clifford multiplication
# ---------------------------------------------------------------------------

def clifford_mult(w, v):
    """Covector w in R^3 acting on a quaternion v by left multiplication
    with w1 i + w2 j + w3 k; satisfies w.(w.v) = -|w|^2 v."""
    w = np.asarray(w, dtype=float)
    wq = np.concatenate([np.zeros(w.shape[:-1] + (1,)), w], axis=-1)
    return quat_mul(wq, np.asarray(v, dtype=float))


@lru_cache(maxsize=1)
def clifford_matrix():
    """Matrix of c: Xi* tensor V -> V as a (4, 12) map, columns ordered by
    (direction m, quaternion component)."""
    C = np.empty((4, 12))
    E3 = np.eye(3)
    for m in range(3):
        for comp in range(4):
            y = np.zeros(4)
            y[comp] = 1.0
            C[:, 4 * m + comp] = clifford_mult(E3[m], y)
    return C


def clifford_rank():
    S = np.linalg.svd(clifford_matrix(), compute_uv=False)
    return int(np.sum(S > _RANK_RTOL * S[0]))


def clifford_kernel_dim():
    """dim ker(c) = 12 - rank(c); the kernel is 8-dimensional and the map is
    onto the 4-plane."""
    return 12 - clifford_rank()


def clifford_complement_condition():
    """Condition number of c restricted to the orthogonal complement of its
    kernel (finite: the complement maps isomorphically)."""
    S = np.linalg.svd(clifford_matrix(), compute_uv=False)
    nz = S[S > _RANK_RTOL * S[0]]
    return float(nz[0] / nz[-1])
