"""Quaternion and octonion arithmetic, and the cross products built on it.

Conventions, fixed once for the whole package:

* Quaternions are arrays ``[w, x, y, z]`` (real part first), Hamilton
  product.
* Octonions are arrays of 8 components, a Cayley-Dickson pair ``(a, b)``
  of quaternions with product ``(a,b)(c,d) = (ac - conj(d) b, da + b conj(c))``.
* ``R^7`` is the imaginary octonions.  The basis identification is

      e1, e2, e3, e4,  e5,  e6,  e7
      i,  j,  k,  l,  i*l, j*l, l*k

  i.e. in pair coordinates e4 = (0,-1), e5 = (0,-i), e6 = (0,-j),
  e7 = (0,+k).  With this choice the two-fold cross product
  ``cross7(u, v) = im(conj(v) u)`` reproduces the standard G2 3-form
  (see forms.phi0) on the nose: e1 x e2 = e3, e1 x e4 = e5, and so on.
  The mixed realization of the last generator (l*k rather than k*l) is
  forced by the signs of that 3-form; with this multiplication rule
  l*i = -e5 while i*l = +e5.
* ``R^8`` adds the real unit as the eighth coordinate: ``e8 = 1``.

All operations broadcast over leading axes.
"""

import numpy as np

from . import _kernels

# ---------------------------------------------------------------------------
# quaternions
# ---------------------------------------------------------------------------

def quat_mul(p, q):
    """Hamilton product, broadcasting over leading axes."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    w1, x1, y1, z1 = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    w2, x2, y2, z2 = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ], axis=-1)


def quat_conj(q):
    q = np.asarray(q, dtype=float)
    out = q.copy()
    out[..., 1:] *= -1.0
    return out


def quat_norm(q):
    return np.linalg.norm(np.asarray(q, dtype=float), axis=-1)


def quat_exp_im(v):
    """exp of a purely imaginary quaternion given by its 3 components."""
    v = np.asarray(v, dtype=float)
    theta = np.linalg.norm(v, axis=-1)
    out = np.zeros(v.shape[:-1] + (4,))
    out[..., 0] = np.cos(theta)
    small = theta < 1e-300
    scale = np.where(small, 1.0, np.sinc(theta / np.pi))
    out[..., 1:] = v * scale[..., None]
    return out


QUAT_I = np.array([0.0, 1.0, 0.0, 0.0])
QUAT_J = np.array([0.0, 0.0, 1.0, 0.0])
QUAT_K = np.array([0.0, 0.0, 0.0, 1.0])

# ---------------------------------------------------------------------------
# octonions
# ---------------------------------------------------------------------------

def oct_mul(o1, o2):
    """Cayley-Dickson product (a,b)(c,d) = (ac - conj(d)b, da + b conj(c))."""
    o1 = np.asarray(o1, dtype=float)
    o2 = np.asarray(o2, dtype=float)
    a, b = o1[..., :4], o1[..., 4:]
    c, d = o2[..., :4], o2[..., 4:]
    first = quat_mul(a, c) - quat_mul(quat_conj(d), b)
    second = quat_mul(d, a) + quat_mul(b, quat_conj(c))
    return np.concatenate([first, second], axis=-1)


def oct_conj(o):
    o = np.asarray(o, dtype=float)
    out = -o.copy()
    out[..., 0] *= -1.0
    return out


def oct_norm(o):
    return np.linalg.norm(np.asarray(o, dtype=float), axis=-1)


# imaginary basis e1..e7 in octonion pair coordinates (rows)
IM_BASIS_OCT = np.zeros((7, 8))
for _row, (_col, _s) in enumerate(
        [(1, 1.0), (2, 1.0), (3, 1.0), (4, -1.0), (5, -1.0), (6, -1.0), (7, 1.0)]):
    IM_BASIS_OCT[_row, _col] = _s


def vec7_to_oct(v):
    """Embed R^7 as the imaginary octonions."""
    return np.asarray(v, dtype=float) @ IM_BASIS_OCT


def oct_to_vec7(o):
    """Imaginary-part coordinates of an octonion (the real part is dropped)."""
    return np.asarray(o, dtype=float) @ IM_BASIS_OCT.T


def vec8_to_oct(v):
    """Embed R^8 = R^7 + R e8 with e8 the real octonion unit."""
    v = np.asarray(v, dtype=float)
    out = v[..., :7] @ IM_BASIS_OCT
    out[..., 0] += v[..., 7]
    return out


def oct_to_vec8(o):
    o = np.asarray(o, dtype=float)
    return np.concatenate([o @ IM_BASIS_OCT.T, o[..., :1]], axis=-1)


# ---------------------------------------------------------------------------
# cross products
# ---------------------------------------------------------------------------

# oriented index triples (a,b,c) with e_a x e_b = e_c; 0-based
FANO_TRIPLES = (
    (0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5),
    (1, 6, 4), (2, 6, 3), (2, 5, 4),
)


def _build_cross_table():
    rows = []
    for (a, b, c) in FANO_TRIPLES:
        for (x, y, z, s) in ((a, b, c, 1.0), (b, c, a, 1.0), (c, a, b, 1.0),
                             (b, a, c, -1.0), (c, b, a, -1.0), (a, c, b, -1.0)):
            rows.append((x, y, z, s))
    arr = np.array(rows)
    return (arr[:, 0].astype(np.int64), arr[:, 1].astype(np.int64),
            arr[:, 2].astype(np.int64), arr[:, 3].copy())


_CT_A, _CT_B, _CT_C, _CT_S = _build_cross_table()


def cross7(u, v):
    """Two-fold cross product on R^7, u x v = im(conj(v) u)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.ndim == 1 and v.ndim == 1:
        return oct_to_vec7(oct_mul(vec7_to_oct(u), vec7_to_oct(v)))
    return cross7_batch(u, v)


def cross7_batch(U, V):
    """Row-wise cross product of (n,7) arrays via the structure-constant table."""
    U = np.ascontiguousarray(U, dtype=float)
    V = np.ascontiguousarray(V, dtype=float)
    return _kernels.bilinear_batch(U, V, _CT_A, _CT_B, _CT_C, _CT_S, 7)


def triple_cross8(u, v, w):
    """Three-fold cross product on R^8, ((u conj(v)) w - (w conj(v)) u) / 2.

    Normalized so that pairing with a fourth vector gives the Cayley 4-form
    of forms.psi8 (this agreement is what pins down the formula; it is
    checked exhaustively on basis quadruples in the test suite).
    Alternating in (u, v, w) and orthogonal to each argument.
    """
    ou, ov, ow = vec8_to_oct(u), vec8_to_oct(v), vec8_to_oct(w)
    cv = oct_conj(ov)
    t = 0.5 * (oct_mul(oct_mul(ou, cv), ow) - oct_mul(oct_mul(ow, cv), ou))
    return oct_to_vec8(t)
