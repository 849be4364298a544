import json

import numpy as np
import pytest
import scipy.sparse as sp

from g2calib.dirac import (
    CLIFF_C, Connection1Form, SWState, analytic_spectrum, curl_theta,
    dirac_apply, dirac_matrix, dirac_spectrum, div_backward, forward_diff,
    gauge_transform, kernel_constant_dimension, kernel_dimension,
    operator_asymmetry, scalar_one_form_complex_matrix, sector_kernel_dims,
    sigma_field, sigma_map, sigma_polarized, sw_index_formula,
    sw_linearization, sw_residual,
)


def random_u1(rng, n, scale=1.0):
    return Connection1Form(n, u1=scale * rng.normal(size=(n, n, n, 3)))


def random_state(rng, n, scale=1.0):
    v = scale * (rng.normal(size=(n, n, n, 2)) + 1j * rng.normal(size=(n, n, n, 2)))
    return SWState(v, random_u1(rng, n, scale), scale * rng.normal(size=(n, n, n, 3)))


# --- operator basics ----------------------------------------------------------

def test_constant_in_kernel_untwisted():
    conn = Connection1Form.zero(6)
    v = np.zeros((6, 6, 6, 4))
    v[..., 1] = 2.5
    assert np.max(np.abs(dirac_apply(v, conn))) == 0.0


def test_constant_twist_moves_constants():
    conn = Connection1Form.u1_constant(6, [0.9, 0.4, -1.3])
    v = np.zeros((6, 6, 6, 4))
    v[..., 0] = 1.0
    out = dirac_apply(v, conn)
    assert np.max(np.abs(out)) > 1e-3
    vc = np.zeros((6, 6, 6, 2), dtype=complex)
    vc[..., 0] = 1.0
    assert np.max(np.abs(dirac_apply(vc, conn))) > 1e-3


def test_matrix_matches_apply_real(rng):
    n = 4
    conn = Connection1Form(
        n, u1=rng.normal(size=(n, n, n, 3)),
        left=0.3 * rng.normal(size=(n, n, n, 3, 3)),
        right=0.3 * rng.normal(size=(n, n, n, 3, 3)))
    M = dirac_matrix(conn, "real")
    v = rng.normal(size=(n, n, n, 4))
    assert np.allclose(M @ v.ravel(), dirac_apply(v, conn).ravel(), atol=1e-12)


def test_matrix_matches_apply_complex(rng):
    n = 4
    conn = random_u1(rng, n)
    M = dirac_matrix(conn, "complex")
    v = rng.normal(size=(n, n, n, 2)) + 1j * rng.normal(size=(n, n, n, 2))
    assert np.allclose(M @ v.ravel(), dirac_apply(v, conn).ravel(), atol=1e-12)


def test_operator_symmetry_exact(rng):
    n = 4
    assert operator_asymmetry(Connection1Form.zero(n), "real") < 1e-15
    assert operator_asymmetry(random_u1(rng, n), "real") < 1e-14
    assert operator_asymmetry(random_u1(rng, n), "complex") < 1e-14
    conn = Connection1Form(
        n, u1=rng.normal(size=(n, n, n, 3)),
        left=0.5 * rng.normal(size=(n, n, n, 3, 3)),
        right=0.5 * rng.normal(size=(n, n, n, 3, 3)))
    assert operator_asymmetry(conn, "real") < 1e-14


def test_clifford_square_is_laplacian():
    """D^2 = -(sum of squared central differences) tensor identity, exactly."""
    n = 4
    M = dirac_matrix(Connection1Form.zero(n), "real").toarray()
    sites = n ** 3
    shift = {}
    for m in range(3):
        P = np.zeros((sites, sites))
        idx = np.arange(sites).reshape(n, n, n)
        P[idx.ravel(), np.roll(idx, -1, axis=m).ravel()] = 1.0
        shift[m] = P
    h = 1.0 / n
    lap = sum(((S - S.T) / (2 * h)) @ ((S - S.T) / (2 * h)) for S in shift.values())
    want = -np.kron(lap, np.eye(4))
    assert np.max(np.abs(M @ M - want)) < 1e-10


def test_fourier_mode_eigenpair():
    n = 4
    conn = Connection1Form.zero(n)
    k = np.array([1, 0, 2])
    x = np.stack(np.meshgrid(*[np.arange(n)] * 3, indexing="ij"), axis=-1)
    mode = np.exp(2j * np.pi * (x @ k) / n)
    v = np.zeros((n, n, n, 2), dtype=complex)
    v[..., 0] = mode
    out = dirac_apply(v, conn)
    s = np.array([np.sin(2 * np.pi * k[m] / n) * n for m in range(3)])
    # symbol: i sum_m s_m C_m acting on the fiber
    symbol = 1j * sum(s[m] * CLIFF_C[m] for m in range(3))
    want = np.einsum("rc,xyzc->xyzr", symbol, v)
    assert np.allclose(out, want, atol=1e-10)
    evals = np.linalg.eigvalsh(symbol)
    assert np.allclose(sorted(evals), [-np.linalg.norm(s), np.linalg.norm(s)], atol=1e-12)


# --- spectrum ------------------------------------------------------------------

def test_spectrum_symmetric_and_analytic_n4():
    conn = Connection1Form.zero(4)
    for form in ("real", "complex"):
        vals = dirac_spectrum(conn, form=form)
        allv = np.sort(vals)
        assert np.max(np.abs(allv + allv[::-1])) < 1e-10
        want = analytic_spectrum(4, form=form)
        assert np.max(np.abs(np.sort(allv) - want)) < 1e-10


def test_spectrum_twisted_analytic():
    theta = (0.31, -0.77, 0.52)
    conn = Connection1Form.u1_constant(4, theta)
    for form in ("real", "complex"):
        vals = np.sort(dirac_spectrum(conn, form=form))
        want = analytic_spectrum(4, theta, form=form)
        assert np.max(np.abs(vals - want)) < 1e-10
        assert np.max(np.abs(vals + vals[::-1])) < 1e-10


def test_kernel_dimensions_untwisted():
    conn = Connection1Form.zero(4)
    # 8 doubler sectors, 4 apiece; the constants are the (0,0,0) copy
    assert kernel_dimension(conn, "real") == 32
    assert kernel_constant_dimension(conn, "real") == 4
    assert kernel_constant_dimension(conn, "complex") == 4
    dims = sector_kernel_dims(4)
    assert len(dims) == 8 and all(v == 4 for v in dims.values())


def test_kernel_trivial_with_generic_twist():
    conn = Connection1Form.u1_constant(4, [0.9, 0.4, -1.3])
    assert kernel_dimension(conn, "real", tol=1e-8) == 0
    assert kernel_constant_dimension(conn, "real") == 0
    assert sector_kernel_dims(4, (0.9, 0.4, -1.3)) == {}
    vals = np.sort(dirac_spectrum(conn, form="real"))
    assert np.max(np.abs(vals + vals[::-1])) < 1e-10      # index 0: paired counts


def test_spectrum_count_and_order():
    conn = Connection1Form.zero(4)
    vals = dirac_spectrum(conn, count=10, form="real")
    assert len(vals) == 10
    assert np.all(np.diff(np.abs(vals)) >= -1e-12)


# --- sigma ------------------------------------------------------------------------

def test_sigma_values():
    t, c = sigma_map(np.array([1.0 + 0j, 0.0]))
    assert t == 0.5 and c == 0
    t, c = sigma_map(np.array([0.0j, 0.0]))
    assert t == 0 and c == 0


def test_sigma_norm_identity(rng):
    x = rng.normal(size=(100_000, 2)) + 1j * rng.normal(size=(100_000, 2))
    t, c = sigma_map(x)
    nrm2 = np.einsum("ni,ni->n", x, np.conj(x)).real
    assert np.max(np.abs(np.sqrt(t ** 2 + np.abs(c) ** 2) - nrm2 / 2)) < 1e-12 * nrm2.max()


def test_sigma_gauge_invariant(rng):
    x = rng.normal(size=(50, 2)) + 1j * rng.normal(size=(50, 2))
    f = rng.normal(size=50)
    xf = np.exp(1j * f)[:, None] * x
    assert np.allclose(sigma_field(xf), sigma_field(x), atol=1e-13)


def test_sigma_polarized_consistent(rng):
    v = rng.normal(size=(4, 4, 4, 2)) + 1j * rng.normal(size=(4, 4, 4, 2))
    assert np.allclose(sigma_polarized(v, v), sigma_field(v), atol=1e-13)


# --- SW residuals -------------------------------------------------------------------

def test_sw_zero_state():
    r1, r2 = sw_residual(SWState.zero(4))
    assert np.max(np.abs(r1)) == 0 and np.max(np.abs(r2)) == 0


def test_sw_curl_oracle(rng):
    n = 4
    theta = rng.normal(size=(n, n, n, 3))
    state = SWState(np.zeros((n, n, n, 2), dtype=complex),
                    Connection1Form(n, u1=theta), np.zeros((n, n, n, 3)))
    r1, r2 = sw_residual(state)
    assert np.max(np.abs(r1)) == 0
    h = 1.0 / n
    d = [[forward_diff(theta[..., m2], m1, h) for m2 in range(3)] for m1 in range(3)]
    want = np.stack([d[1][2] - d[2][1], d[2][0] - d[0][2], d[0][1] - d[1][0]], axis=-1)
    assert np.allclose(r2, 1j * want, atol=1e-12)
    assert np.max(np.abs(r2)) > 0.1


def test_curl_of_gradient_is_zero(rng):
    n = 5
    f = rng.normal(size=(n, n, n))
    h = 1.0 / n
    df = np.stack([forward_diff(f, m, h) for m in range(3)], axis=-1)
    assert np.max(np.abs(curl_theta(df, h))) < 1e-10


def test_gauge_equivariance_exact(rng):
    n = 4
    state = random_state(rng, n)
    f = rng.normal(size=(n, n, n))
    r1, r2 = sw_residual(state)
    r1g, r2g = sw_residual(gauge_transform(state, f))
    assert np.max(np.abs(r1g - np.exp(1j * f)[..., None] * r1)) < 1e-12
    assert np.max(np.abs(r2g - r2)) < 1e-12


def test_sw_linearization_decouples_at_zero_spinor(rng):
    n = 4
    state = SWState.zero(n)
    dv = rng.normal(size=(n, n, n, 2)) + 1j * rng.normal(size=(n, n, n, 2))
    dth = rng.normal(size=(n, n, n, 3))
    dd = rng.normal(size=(n, n, n, 3))
    r1, r2 = sw_linearization(state, dv, dth, dd)
    assert np.allclose(r1, dirac_apply(dv, state.a), atol=1e-13)
    assert np.allclose(r2, 1j * (curl_theta(dth, state.a.h) + dd), atol=1e-13)


def test_sw_linearization_matches_finite_difference(rng):
    n = 4
    state = random_state(rng, n, scale=0.7)
    dv = rng.normal(size=(n, n, n, 2)) + 1j * rng.normal(size=(n, n, n, 2))
    dth = rng.normal(size=(n, n, n, 3))
    dd = rng.normal(size=(n, n, n, 3))
    eps = 1e-5

    def shifted(s):
        return SWState(state.v + s * dv,
                       Connection1Form(n, u1=state.a.u1_theta() + s * dth),
                       state.delta + s * dd)

    rp = sw_residual(shifted(eps))
    rm = sw_residual(shifted(-eps))
    fd1 = (rp[0] - rm[0]) / (2 * eps)
    fd2 = (rp[1] - rm[1]) / (2 * eps)
    l1, l2 = sw_linearization(state, dv, dth, dd)
    scale = max(np.abs(l1).max(), np.abs(l2).max())
    assert np.max(np.abs(fd1 - l1)) / scale < 1e-6
    assert np.max(np.abs(fd2 - l2)) / scale < 1e-6


def test_elliptic_complex_square():
    op = scalar_one_form_complex_matrix(4)
    assert op.shape[0] == op.shape[1] == 4 * 64
    x = np.random.default_rng(0).normal(size=op.shape[1])
    assert op.matvec(x).shape == (op.shape[0],)


def test_divergence_adjoint(rng):
    n = 5
    h = 1.0 / n
    f = rng.normal(size=(n, n, n))
    a = rng.normal(size=(n, n, n, 3))
    df = np.stack([forward_diff(f, m, h) for m in range(3)], axis=-1)
    lhs = np.sum(df * a)
    rhs = np.sum(f * (-div_backward(a, h)))
    assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs))


# --- index formula -------------------------------------------------------------------

def test_sw_index_formula():
    assert sw_index_formula(0, 2, 0) == -1
    assert sw_index_formula(4, 0, 0) == 1
    assert sw_index_formula(0, 0, 0) == 0
    assert sw_index_formula(9, 1, 1) == 1
    with pytest.raises(ValueError, match="not realizable"):
        sw_index_formula(1, 0, 0)


# --- state serialization ----------------------------------------------------------------

def test_swstate_json_roundtrip(rng):
    state = random_state(rng, 3)
    back = SWState.from_json(json.dumps(state.to_json_dict()))
    assert np.allclose(back.v, state.v)
    assert np.allclose(back.a.u1_theta(), state.a.u1_theta())
    assert np.allclose(back.delta, state.delta)


# --- sparse eigensolver path -------------------------------------------------------------

def test_sparse_spectrum_path_twisted():
    # N = 12 real form exceeds the dense threshold: shift-inverted Lanczos
    theta = (0.9, 0.4, -1.3)
    conn = Connection1Form.u1_constant(12, theta)
    vals = dirac_spectrum(conn, count=8, form="real", seed=3)
    want = analytic_spectrum(12, theta, form="real")
    want = want[np.argsort(np.abs(want), kind="stable")][:8]
    assert np.allclose(np.sort(np.abs(vals)), np.sort(np.abs(want)), atol=1e-8)


def test_sparse_spectrum_path_singular():
    # untwisted operator is exactly singular; the solver must still return
    # the zero modes
    conn = Connection1Form.zero(12)
    vals = dirac_spectrum(conn, count=8, form="real", seed=3)
    assert np.max(np.abs(vals)) < 1e-8


def test_complex_form_kernel_accounting():
    conn0 = Connection1Form.zero(4)
    # full complex-form kernel: 2 complex dims per doubler mode = 4 real x 8
    assert kernel_dimension(conn0, "complex") == 32
    dims = sector_kernel_dims(4, form="complex")
    assert len(dims) == 8 and all(v == 4 for v in dims.values())
    connt = Connection1Form.u1_constant(4, [0.9, 0.4, -1.3])
    assert kernel_dimension(connt, "complex", tol=1e-8) == 0
