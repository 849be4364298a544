"""Batched hot-loop kernels, in numba and pure-numpy flavors.

Every public name here is bound to one of the two implementations at import
time according to ``backend.BACKEND``.  The ``*_numpy`` / ``*_numba``
variants stay importable individually so the benchmark can race them.

Table-driven evaluation: sparse multilinear tables are passed as packed
integer index arrays plus a coefficient vector, so the same kernel serves
the cross product, the 3-forms, the defect form and the 4-form pairings.
"""

import numpy as np

from .backend import USE_NUMBA, njit, select

# ---------------------------------------------------------------------------
# bilinear table: out[:, c[m]] += s[m] * U[:, a[m]] * V[:, b[m]]
# ---------------------------------------------------------------------------

def bilinear_batch_numpy(U, V, a, b, c, s, nout):
    out = np.zeros((U.shape[0], nout))
    for m in range(a.shape[0]):
        out[:, c[m]] += s[m] * U[:, a[m]] * V[:, b[m]]
    return out


@njit(cache=True)
def _bilinear_batch_jit(U, V, a, b, c, s, nout):
    n = U.shape[0]
    out = np.zeros((n, nout))
    for i in range(n):
        for m in range(a.shape[0]):
            out[i, c[m]] += s[m] * U[i, a[m]] * V[i, b[m]]
    return out


def bilinear_batch_numba(U, V, a, b, c, s, nout):
    return _bilinear_batch_jit(U, V, a, b, c, s, nout)


# ---------------------------------------------------------------------------
# scalar 3-form: out[n] = sum_m coef[m] * det3(rows of U,V,W at j0,j1,j2)
# ---------------------------------------------------------------------------

def _det3_cols_numpy(U, V, W, j0, j1, j2):
    u0, u1, u2 = U[:, j0], U[:, j1], U[:, j2]
    v0, v1, v2 = V[:, j0], V[:, j1], V[:, j2]
    w0, w1, w2 = W[:, j0], W[:, j1], W[:, j2]
    return (u0 * (v1 * w2 - v2 * w1)
            - u1 * (v0 * w2 - v2 * w0)
            + u2 * (v0 * w1 - v1 * w0))


def alt3_batch_numpy(U, V, W, j0, j1, j2, coef):
    out = np.zeros(U.shape[0])
    for m in range(j0.shape[0]):
        out += coef[m] * _det3_cols_numpy(U, V, W, j0[m], j1[m], j2[m])
    return out


@njit(cache=True)
def _alt3_batch_jit(U, V, W, j0, j1, j2, coef):
    n = U.shape[0]
    out = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for m in range(j0.shape[0]):
            a, b, c = j0[m], j1[m], j2[m]
            d = (U[i, a] * (V[i, b] * W[i, c] - V[i, c] * W[i, b])
                 - U[i, b] * (V[i, a] * W[i, c] - V[i, c] * W[i, a])
                 + U[i, c] * (V[i, a] * W[i, b] - V[i, b] * W[i, a]))
            acc += coef[m] * d
        out[i] = acc
    return out


def alt3_batch_numba(U, V, W, j0, j1, j2, coef):
    return _alt3_batch_jit(U, V, W, j0, j1, j2, coef)


# ---------------------------------------------------------------------------
# vector-valued 3-form: out[n, alpha[m]] += coef[m] * det3(...)
# ---------------------------------------------------------------------------

def vv3_batch_numpy(U, V, W, j0, j1, j2, alpha, coef, nout):
    out = np.zeros((U.shape[0], nout))
    for m in range(j0.shape[0]):
        out[:, alpha[m]] += coef[m] * _det3_cols_numpy(U, V, W, j0[m], j1[m], j2[m])
    return out


@njit(cache=True)
def _vv3_batch_jit(U, V, W, j0, j1, j2, alpha, coef, nout):
    n = U.shape[0]
    out = np.zeros((n, nout))
    for i in range(n):
        for m in range(j0.shape[0]):
            a, b, c = j0[m], j1[m], j2[m]
            d = (U[i, a] * (V[i, b] * W[i, c] - V[i, c] * W[i, b])
                 - U[i, b] * (V[i, a] * W[i, c] - V[i, c] * W[i, a])
                 + U[i, c] * (V[i, a] * W[i, b] - V[i, b] * W[i, a]))
            out[i, alpha[m]] += coef[m] * d
    return out


def vv3_batch_numba(U, V, W, j0, j1, j2, alpha, coef, nout):
    return _vv3_batch_jit(U, V, W, j0, j1, j2, alpha, coef, nout)


# ---------------------------------------------------------------------------
# scalar 4-form: out[n] = sum_m coef[m] * det4(...)
# ---------------------------------------------------------------------------

def alt4_batch_numpy(U, V, W, Z, j0, j1, j2, j3, coef):
    n = U.shape[0]
    out = np.zeros(n)
    M = np.empty((n, 4, 4))
    for m in range(j0.shape[0]):
        cols = (j0[m], j1[m], j2[m], j3[m])
        for r, A in enumerate((U, V, W, Z)):
            for cc, jj in enumerate(cols):
                M[:, r, cc] = A[:, jj]
        out += coef[m] * np.linalg.det(M)
    return out


@njit(cache=True)
def _alt4_batch_jit(U, V, W, Z, j0, j1, j2, j3, coef):
    n = U.shape[0]
    out = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for m in range(j0.shape[0]):
            a, b, c, d = j0[m], j1[m], j2[m], j3[m]
            # 4x4 determinant by expansion along the first row
            m00 = (V[i, b] * (W[i, c] * Z[i, d] - W[i, d] * Z[i, c])
                   - V[i, c] * (W[i, b] * Z[i, d] - W[i, d] * Z[i, b])
                   + V[i, d] * (W[i, b] * Z[i, c] - W[i, c] * Z[i, b]))
            m01 = (V[i, a] * (W[i, c] * Z[i, d] - W[i, d] * Z[i, c])
                   - V[i, c] * (W[i, a] * Z[i, d] - W[i, d] * Z[i, a])
                   + V[i, d] * (W[i, a] * Z[i, c] - W[i, c] * Z[i, a]))
            m02 = (V[i, a] * (W[i, b] * Z[i, d] - W[i, d] * Z[i, b])
                   - V[i, b] * (W[i, a] * Z[i, d] - W[i, d] * Z[i, a])
                   + V[i, d] * (W[i, a] * Z[i, b] - W[i, b] * Z[i, a]))
            m03 = (V[i, a] * (W[i, b] * Z[i, c] - W[i, c] * Z[i, b])
                   - V[i, b] * (W[i, a] * Z[i, c] - W[i, c] * Z[i, a])
                   + V[i, c] * (W[i, a] * Z[i, b] - W[i, b] * Z[i, a]))
            det = U[i, a] * m00 - U[i, b] * m01 + U[i, c] * m02 - U[i, d] * m03
            acc += coef[m] * det
        out[i] = acc
    return out


def alt4_batch_numba(U, V, W, Z, j0, j1, j2, j3, coef):
    return _alt4_batch_jit(U, V, W, Z, j0, j1, j2, j3, coef)


# ---------------------------------------------------------------------------
# lattice Dirac stencil, quaternion (real) form
#
# out(x) = sum_m [ sF . v(x+e_m) . rF  +  conj(sF') . v(x-e_m) . conj(rF') ]
#          / (2h),
# where sF, rF are the per-site forward link quaternions of axis m and the
# primed ones are taken at x - e_m.  Fields have shape (N,N,N,4); links
# (3,N,N,N,4).
# ---------------------------------------------------------------------------

def _qmul_arr(p, q):
    w1, x1, y1, z1 = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    w2, x2, y2, z2 = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ], axis=-1)


def _qconj_arr(q):
    out = q.copy()
    out[..., 1:] *= -1.0
    return out


def dirac_real_numpy(v, sF, rF, inv2h):
    out = np.zeros_like(v)
    for m in range(3):
        vp = np.roll(v, -1, axis=m)
        vm = np.roll(v, 1, axis=m)
        sB = _qconj_arr(np.roll(sF[m], 1, axis=m))
        rB = _qconj_arr(np.roll(rF[m], 1, axis=m))
        out += _qmul_arr(sF[m], _qmul_arr(vp, rF[m]))
        out += _qmul_arr(sB, _qmul_arr(vm, rB))
    return out * inv2h


@njit(cache=True)
def _dirac_real_jit(v, sF, rF, inv2h):
    N0, N1, N2 = v.shape[0], v.shape[1], v.shape[2]
    out = np.zeros_like(v)
    tmp = np.empty(4)
    res = np.empty(4)
    for i in range(N0):
        for j in range(N1):
            for k in range(N2):
                for m in range(3):
                    if m == 0:
                        ip, jp, kp = (i + 1) % N0, j, k
                        im, jm, km = (i - 1) % N0, j, k
                    elif m == 1:
                        ip, jp, kp = i, (j + 1) % N1, k
                        im, jm, km = i, (j - 1) % N1, k
                    else:
                        ip, jp, kp = i, j, (k + 1) % N2
                        im, jm, km = i, j, (k - 1) % N2
                    # forward: sF(x) . v(x+) . rF(x)
                    a = sF[m, i, j, k]
                    r = rF[m, i, j, k]
                    y = v[ip, jp, kp]
                    tmp[0] = y[0] * r[0] - y[1] * r[1] - y[2] * r[2] - y[3] * r[3]
                    tmp[1] = y[0] * r[1] + y[1] * r[0] + y[2] * r[3] - y[3] * r[2]
                    tmp[2] = y[0] * r[2] - y[1] * r[3] + y[2] * r[0] + y[3] * r[1]
                    tmp[3] = y[0] * r[3] + y[1] * r[2] - y[2] * r[1] + y[3] * r[0]
                    res[0] = a[0] * tmp[0] - a[1] * tmp[1] - a[2] * tmp[2] - a[3] * tmp[3]
                    res[1] = a[0] * tmp[1] + a[1] * tmp[0] + a[2] * tmp[3] - a[3] * tmp[2]
                    res[2] = a[0] * tmp[2] - a[1] * tmp[3] + a[2] * tmp[0] + a[3] * tmp[1]
                    res[3] = a[0] * tmp[3] + a[1] * tmp[2] - a[2] * tmp[1] + a[3] * tmp[0]
                    for t in range(4):
                        out[i, j, k, t] += res[t]
                    # backward: conj(sF(x-)) . v(x-) . conj(rF(x-))
                    a = sF[m, im, jm, km]
                    r = rF[m, im, jm, km]
                    y = v[im, jm, km]
                    tmp[0] = y[0] * r[0] + y[1] * r[1] + y[2] * r[2] + y[3] * r[3]
                    tmp[1] = -y[0] * r[1] + y[1] * r[0] - y[2] * r[3] + y[3] * r[2]
                    tmp[2] = -y[0] * r[2] + y[1] * r[3] + y[2] * r[0] - y[3] * r[1]
                    tmp[3] = -y[0] * r[3] - y[1] * r[2] + y[2] * r[1] + y[3] * r[0]
                    res[0] = a[0] * tmp[0] + a[1] * tmp[1] + a[2] * tmp[2] + a[3] * tmp[3]
                    res[1] = a[0] * tmp[1] - a[1] * tmp[0] - a[2] * tmp[3] + a[3] * tmp[2]
                    res[2] = a[0] * tmp[2] + a[1] * tmp[3] - a[2] * tmp[0] - a[3] * tmp[1]
                    res[3] = a[0] * tmp[3] - a[1] * tmp[2] + a[2] * tmp[1] - a[3] * tmp[0]
                    for t in range(4):
                        out[i, j, k, t] += res[t]
    return out * inv2h


def dirac_real_numba(v, sF, rF, inv2h):
    return _dirac_real_jit(v, sF, rF, inv2h)


# ---------------------------------------------------------------------------
# lattice Dirac stencil, C^2 form with U(1) phase links
#
# Clifford matrices (left multiplication by i, j, k on H = C^2):
#   C1 = [[i, 0], [0, -i]],  C2 = [[0, -1], [1, 0]],  C3 = [[0, -i], [-i, 0]]
# ---------------------------------------------------------------------------

def dirac_complex_numpy(v, phase, inv2h):
    out = np.zeros_like(v)
    for m in range(3):
        hop = (phase[m][..., None] * np.roll(v, -1, axis=m)
               - np.conj(np.roll(phase[m], 1, axis=m))[..., None] * np.roll(v, 1, axis=m))
        if m == 0:
            out[..., 0] += 1j * hop[..., 0]
            out[..., 1] += -1j * hop[..., 1]
        elif m == 1:
            out[..., 0] += -hop[..., 1]
            out[..., 1] += hop[..., 0]
        else:
            out[..., 0] += -1j * hop[..., 1]
            out[..., 1] += -1j * hop[..., 0]
    return out * inv2h


@njit(cache=True)
def _dirac_complex_jit(v, phase, inv2h):
    N0, N1, N2 = v.shape[0], v.shape[1], v.shape[2]
    out = np.zeros_like(v)
    for i in range(N0):
        for j in range(N1):
            for k in range(N2):
                for m in range(3):
                    if m == 0:
                        ip, jp, kp = (i + 1) % N0, j, k
                        im, jm, km = (i - 1) % N0, j, k
                    elif m == 1:
                        ip, jp, kp = i, (j + 1) % N1, k
                        im, jm, km = i, (j - 1) % N1, k
                    else:
                        ip, jp, kp = i, j, (k + 1) % N2
                        im, jm, km = i, j, (k - 1) % N2
                    h0 = (phase[m, i, j, k] * v[ip, jp, kp, 0]
                          - np.conj(phase[m, im, jm, km]) * v[im, jm, km, 0])
                    h1 = (phase[m, i, j, k] * v[ip, jp, kp, 1]
                          - np.conj(phase[m, im, jm, km]) * v[im, jm, km, 1])
                    if m == 0:
                        out[i, j, k, 0] += 1j * h0
                        out[i, j, k, 1] += -1j * h1
                    elif m == 1:
                        out[i, j, k, 0] += -h1
                        out[i, j, k, 1] += h0
                    else:
                        out[i, j, k, 0] += -1j * h1
                        out[i, j, k, 1] += -1j * h0
    return out * inv2h


def dirac_complex_numba(v, phase, inv2h):
    return _dirac_complex_jit(v, phase, inv2h)


# ---------------------------------------------------------------------------
# backend binding
# ---------------------------------------------------------------------------

bilinear_batch = select(bilinear_batch_numpy, bilinear_batch_numba)
alt3_batch = select(alt3_batch_numpy, alt3_batch_numba)
vv3_batch = select(vv3_batch_numpy, vv3_batch_numba)
alt4_batch = select(alt4_batch_numpy, alt4_batch_numba)
dirac_real = select(dirac_real_numpy, dirac_real_numba)
dirac_complex = select(dirac_complex_numpy, dirac_complex_numba)

__all__ = [
    "bilinear_batch", "alt3_batch", "vv3_batch", "alt4_batch",
    "dirac_real", "dirac_complex", "USE_NUMBA",
]
