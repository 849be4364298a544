"""Seeded verification suites: every module invariant as a named check with
an error magnitude and a pinned threshold, collected into a report.

All randomness flows from the single seed through one generator.  The
3-form under test can be overridden (used by the mutation tests: corrupting
one coefficient must make the identity checks fail).
"""

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from . import __version__
from .deformations import LambdaParam, SplitFrame, cross_lambda, f_locus_defect, \
    phi_lambda, phi_lambda_contracted, star_phi_lambda
from .dirac import (Connection1Form, SWState, analytic_spectrum, curl_theta,
                    dirac_apply, dirac_spectrum, gauge_transform,
                    kernel_constant_dimension, kernel_dimension,
                    operator_asymmetry, scalar_one_form_complex_matrix,
                    sector_kernel_dims, sigma_field, sigma_map,
                    sw_index_formula, sw_linearization, sw_residual)
from .forms import (AlternatingForm, Metric7, chi_form, chi_via_cross_batch,
                    cross_from_phi_batch, hodge_star, k_subsets,
                    metric_from_phi, phi0, star_phi0, psi8, subset_index)
from .grassmann import (Frame, Immersion3Lattice, associative_test,
                        chi_flow_step, normal_complex_structure,
                        sample_grassmann)
from .lie import (clifford_kernel_dim, clifford_matrix, clifford_mult,
                  clifford_rank, compute_g2_basis, g2_block_form,
                  lie_action_on_3forms, So4BlockElement, so4_block_matrix)
from .octonion import (cross7, cross7_batch, oct_mul, oct_norm, quat_mul,
                       quat_norm, triple_cross8, FANO_TRIPLES)


@dataclass
class CheckResult:
    name: str
    identity: str
    max_error: float
    threshold: float

    @property
    def passed(self):
        return self.max_error <= self.threshold

    def to_json_dict(self):
        return {"name": self.name, "identity": self.identity,
                "max_error": self.max_error, "threshold": self.threshold,
                "pass": self.passed}


@dataclass
class VerificationReport:
    suite: str
    seed: int
    samples: int
    checks: list
    wall_time_s: float = 0.0
    version: str = __version__

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_json_dict(self):
        return {"schema": 1, "suite": self.suite, "version": self.version,
                "seed": self.seed, "samples": self.samples,
                "pass": self.passed,
                "checks": [c.to_json_dict() for c in self.checks],
                "wall_time_s": self.wall_time_s}


class _Suite:
    def __init__(self, seed, samples, tol_scale, phi_coeffs=None):
        self.rng = np.random.default_rng(seed)
        self.n = max(int(samples), 1)
        self.tol = float(tol_scale)
        if phi_coeffs is None:
            self.phi = phi0()
        else:
            self.phi = AlternatingForm(3, 7, phi_coeffs)
        self.chi = chi_form(self.phi, Metric7.identity())
        self.checks = []

    def add(self, name, identity, err, thr):
        self.checks.append(CheckResult(name, identity, float(err), thr * self.tol))

    def vecs7(self, count=None):
        return self.rng.normal(size=(count or self.n, 7))


def _octonion_checks(s):
    n = s.n
    p, q, r = (s.rng.normal(size=(n, 4)) for _ in range(3))
    err = np.max(np.abs(quat_norm(quat_mul(p, q)) - quat_norm(p) * quat_norm(q))
                 / (quat_norm(p) * quat_norm(q)))
    s.add("quat-norm-mult", "|pq| = |p||q|", err, 1e-12)
    err = np.max(np.abs(quat_mul(quat_mul(p, q), r) - quat_mul(p, quat_mul(q, r))))
    s.add("quat-associativity", "(pq)r = p(qr)", err, 1e-11)

    o1, o2 = s.rng.normal(size=(2, n, 8))
    err = np.max(np.abs(oct_norm(oct_mul(o1, o2)) - oct_norm(o1) * oct_norm(o2))
                 / (oct_norm(o1) * oct_norm(o2)))
    s.add("oct-norm-mult", "|o o'| = |o||o'|", err, 1e-12)
    err = np.max(np.abs(oct_mul(o1, oct_mul(o1, o2)) - oct_mul(oct_mul(o1, o1), o2)))
    err /= max(1.0, np.abs(o1).max() ** 2 * np.abs(o2).max())
    s.add("oct-alternativity", "o(o o') = (o o)o'", err, 1e-12)

    # basis table against the 3-form under test
    E = np.eye(7)
    err = 0.0
    T = s.phi.as_tensor()
    for a in range(7):
        for b in range(7):
            err = max(err, np.max(np.abs(cross7(E[a], E[b]) - T[a, b])))
    s.add("cross-basis-table", "<e_a x e_b, e_c> reproduces the 3-form", err, 0.0)

    U, V = s.rng.normal(size=(2, n, 7))
    C = cross7_batch(U, V)
    err = max(np.max(np.abs(C + cross7_batch(V, U))),
              np.max(np.abs(np.einsum("ni,ni->n", C, U))),
              np.max(np.abs(np.einsum("ni,ni->n", C, V))))
    s.add("cross-antisymmetry", "u x v = -v x u, u x v orthogonal to u, v", err, 1e-10)
    lhs = np.einsum("ni,ni->n", C, C)
    rhs = (np.einsum("ni,ni->n", U, U) * np.einsum("ni,ni->n", V, V)
           - np.einsum("ni,ni->n", U, V) ** 2)
    s.add("cross-norm-identity", "|u x v|^2 = |u|^2|v|^2 - <u,v>^2",
          np.max(np.abs(lhs - rhs) / np.maximum(rhs, 1.0)), 1e-12)

    m = min(n, 2000)
    U8, V8, W8 = (s.rng.normal(size=(m, 8)) for _ in range(3))
    T8 = np.array([triple_cross8(U8[i], V8[i], W8[i]) for i in range(m)])
    Talt = np.array([triple_cross8(V8[i], U8[i], W8[i]) for i in range(m)])
    s.add("triple-cross-alternation", "u x v x w alternates", np.max(np.abs(T8 + Talt)), 1e-10)
    err = max(np.max(np.abs(np.einsum("ni,ni->n", T8, A))) for A in (U8, V8, W8))
    s.add("triple-cross-orthogonality", "<u x v x w, slots> = 0", err, 1e-9)

    E8 = np.eye(8)
    f = psi8()
    err = 0.0
    idx = subset_index(8, 4)
    for Q in k_subsets(8, 4):
        t = triple_cross8(E8[Q[0]], E8[Q[1]], E8[Q[2]])
        err = max(err, abs(np.dot(t, E8[Q[3]]) - f.coeffs[idx[Q]]))
    s.add("psi-pairing-basis", "<u x v x w, z> equals the Cayley form on basis quadruples", err, 0.0)
    Z8 = s.rng.normal(size=(m, 8))
    pair = np.einsum("ni,ni->n", T8, Z8)
    psivals = f.evaluate_batch(U8, V8, W8, Z8)
    s.add("psi-pairing-random", "<u x v x w, z> equals the Cayley form", np.max(np.abs(pair - psivals)), 1e-9)


def _forms_checks(s):
    n = s.n
    s.add("star-phi", "hodge dual of the 3-form matches the 4-form table",
          np.max(np.abs(hodge_star(phi0()).coeffs - star_phi0().coeffs)), 0.0)
    s.add("hodge-involution", "** = id on R^7",
          np.max(np.abs(hodge_star(hodge_star(s.phi)).coeffs - s.phi.coeffs)), 1e-13)

    # defect form: table path vs cross-product path
    U, V, W = (s.vecs7() for _ in range(3))
    a = s.chi.evaluate_batch(U, V, W)
    b = chi_via_cross_batch(U, V, W)
    scale = max(1.0, np.abs(a).max())
    s.add("chi-dual-path", "defect form equals -u x (v x w) - <u,v>w + <u,w>v",
          np.max(np.abs(a - b)) / scale, 1e-12)
    err = max(np.max(np.abs(np.einsum("ni,ni->n", a, A))) for A in (U, V, W))
    s.add("chi-normality", "defect is normal to its arguments", err / scale, 1e-10)

    p = s.phi.evaluate_batch(U, V, W)
    X = 2.0 * a
    g11 = np.einsum("ni,ni->n", U, U); g12 = np.einsum("ni,ni->n", U, V)
    g13 = np.einsum("ni,ni->n", U, W); g22 = np.einsum("ni,ni->n", V, V)
    g23 = np.einsum("ni,ni->n", V, W); g33 = np.einsum("ni,ni->n", W, W)
    vol2 = (g11 * (g22 * g33 - g23 ** 2) - g12 * (g12 * g33 - g23 * g13)
            + g13 * (g12 * g23 - g22 * g13))
    resid = p ** 2 + 0.25 * np.einsum("ni,ni->n", X, X) - vol2
    s.add("associator-equality", "phi^2 + |defect|^2/4 = |u^v^w|^2",
          np.max(np.abs(resid) / np.maximum(vol2, 1.0)), 1e-10)

    g = metric_from_phi(s.phi)
    s.add("metric-flat", "metric of the model 3-form is the identity",
          np.max(np.abs(g.matrix - np.eye(7))), 1e-13)
    Q, _ = np.linalg.qr(s.rng.normal(size=(7, 7)))
    gq = metric_from_phi(phi0().pullback(Q))
    s.add("metric-pullback", "pullback covariance g(A*phi) = A^T A",
          np.max(np.abs(gq.matrix - Q.T @ Q)), 1e-10)

    m = min(n, 50_000)
    U2, V2 = s.rng.normal(size=(2, m, 7))
    err = np.max(np.abs(cross_from_phi_batch(phi0(), Metric7.identity(), U2, V2)
                        - cross7_batch(U2, V2)))
    s.add("cross-from-phi", "dual of the contracted 3-form equals the cross product", err, 1e-12)


def _lie_checks(s):
    basis = compute_g2_basis()
    s.add("g2-dimension", "stabilizer algebra has dimension 14", abs(len(basis) - 14), 0.0)
    s.add("g2-rank-gap", "singular-value gap certifies the rank", 1e6 / basis.gap, 1.0)
    err = max(np.max(np.abs(lie_action_on_3forms(A, phi0()).coeffs)) for A in basis.elements)
    s.add("g2-annihilates", "basis elements annihilate the 3-form", err, 1e-12)
    err = 0.0
    for a in range(14):
        for b in range(a + 1, 14):
            Br = basis.elements[a] @ basis.elements[b] - basis.elements[b] @ basis.elements[a]
            err = max(err, basis.span_residual(Br))
    s.add("g2-closure", "brackets re-expand in the basis", err, 1e-10)

    err = max(g2_block_form(A).constraint_residual for A in basis.elements)
    s.add("g2-block-constraint", "i b1 + j b2 + k b3 = 0 on off-diagonal blocks", err, 1e-12)
    C = clifford_matrix()
    betas = np.array([np.concatenate([A[3:, :3][:, mm] * np.array([1, -1, -1, 1.0])
                                      for mm in range(3)]) for A in basis.elements])
    s.add("g2-beta-space-dim", "off-diagonal blocks span the 8-dim Clifford kernel",
          abs(np.linalg.matrix_rank(betas, tol=1e-10) - 8)
          + np.max(np.abs(C @ betas.T)), 1e-10)

    m = min(s.n, 50_000)
    W3 = s.rng.normal(size=(m, 3))
    V4 = s.rng.normal(size=(m, 4))
    lhs = clifford_mult(W3, clifford_mult(W3, V4))
    rhs = -np.einsum("ni,ni->n", W3, W3)[:, None] * V4
    s.add("clifford-relation", "w.(w.v) = -|w|^2 v",
          np.max(np.abs(lhs - rhs)) / max(1.0, np.abs(rhs).max()), 1e-12)
    s.add("clifford-kernel", "kernel dim 8, rank 4",
          abs(clifford_kernel_dim() - 8) + abs(clifford_rank() - 4), 0.0)

    err = 0.0
    for _ in range(8):
        e = So4BlockElement(s.rng.normal(size=4), s.rng.normal(size=4))
        T = so4_block_matrix(e)
        err = max(err, np.max(np.abs(phi0().pullback(T).coeffs - phi0().coeffs)))
    s.add("so4-action-preserves-form", "(x,y) -> (qxq^-1, qy lam^-1) fixes the 3-form", err, 1e-12)


def _grassmann_checks(s):
    basis = compute_g2_basis()
    err_sq = err_rot = err_cross = 0.0
    for _ in range(25):
        g = expm(np.einsum("m,mij->ij", s.rng.normal(size=14), basis.elements))
        L = Frame(np.eye(7)[:3] @ g.T)
        u, v = L[0], L[1]
        J, bas = normal_complex_structure(L, u, v)
        err_sq = max(err_sq, np.max(np.abs(J @ J + np.eye(4))),
                     np.max(np.abs(J.T @ J - np.eye(4))))
        th = s.rng.uniform(0, 2 * np.pi)
        J2, _ = normal_complex_structure(L, np.cos(th) * u - np.sin(th) * v,
                                         np.sin(th) * u + np.cos(th) * v)
        err_rot = max(err_rot, np.max(np.abs(J2 - J)))
        xi = cross7(v, u)
        for a_ in range(4):
            err_cross = max(err_cross, np.max(np.abs(J[:, a_] - bas @ cross7(bas[a_], xi))))
    s.add("j-square-orthogonal", "j^2 = -I and j^T j = I on normal planes", err_sq, 1e-12)
    s.add("j-rotation-invariance", "j depends only on the oriented 2-plane", err_rot, 1e-10)
    s.add("j-cross-consistency", "j(z) = z x (v x u)", err_cross, 1e-10)

    m = min(s.n, 20_000)
    F = sample_grassmann(int(s.rng.integers(2 ** 31)), m)
    err = 0.0
    for i in range(0, m, max(1, m // 500)):
        rep = associative_test(Frame(F[i]))
        err = max(err, abs(rep.phi_value ** 2 + rep.defect_norm ** 2 / 4.0 - 1.0))
    s.add("frame-defect-identity", "phi(L)^2 + defect^2/4 = 1 on frames", err, 1e-10)
    vals = phi0().evaluate_batch(F[:, 0], F[:, 1], F[:, 2])
    ratio = abs(vals.mean()) / (3.0 * vals.std() / np.sqrt(len(vals)))
    s.add("haar-phi-mean", "mean calibration value vanishes over Haar frames", ratio, 1.0)

    lat = Immersion3Lattice.flat_torus(6)
    s.add("flow-fixed-point", "flat associative torus has zero defect", lat.max_defect(), 1e-14)
    lat = Immersion3Lattice.perturbed_torus(6, 1e-2)
    trace = [lat.max_defect()]
    for _ in range(10):
        lat = chi_flow_step(lat, 0.02)
        trace.append(lat.max_defect())
    err = max(0.0, max(np.diff(trace)))
    s.add("flow-decreasing", "perturbed-torus defect decreases under the flow", err, 0.0)


def _deformation_checks(s):
    grid = min(max(s.n // 1000, 20), 200)
    err_metric = err_cross = err_con = err_star = 0.0
    for _ in range(grid):
        l = LambdaParam.from_vector8(s.rng.normal(size=8))
        pl = phi_lambda(l)
        err_metric = max(err_metric, np.max(np.abs(metric_from_phi(pl).matrix - np.eye(7))))
        err_con = max(err_con, np.max(np.abs(pl.coeffs - phi_lambda_contracted(l).coeffs)))
        err_star = max(err_star, np.max(np.abs(hodge_star(pl).coeffs - star_phi_lambda(l).coeffs)))
        for _ in range(3):
            u, v = s.rng.normal(size=(2, 7))
            d = cross_lambda(l, u, v) - cross_from_phi_batch(pl, Metric7.identity(),
                                                             u[None], v[None])[0]
            err_cross = max(err_cross, np.max(np.abs(d)) / max(1.0, np.linalg.norm(u) * np.linalg.norm(v)))
    s.add("family-metric-identity", "every deformed 3-form induces the flat metric", err_metric, 1e-10)
    s.add("family-contracted-equality", "expanded and contracted family formulas agree", err_con, 1e-12)
    s.add("family-star-identity", "dual-family formula matches the Hodge dual", err_star, 1e-12)
    s.add("family-cross-dual-path", "deformed-cross formula matches the recovered product", err_cross, 1e-10)

    sfr = SplitFrame(np.eye(7)[0], np.eye(7)[1])
    err = 0.0
    zero_ok = 0.0
    for t in np.linspace(-0.7, 0.7, 15):
        for _ in range(4):
            d4 = s.rng.normal(size=4)
            d4 /= np.linalg.norm(d4)
            alpha = t * (d4 @ sfr.v_basis)
            l = LambdaParam(np.sqrt(max(1 - alpha @ alpha, 1e-12)), alpha)
            F = f_locus_defect(l, sfr)
            na2 = l.alpha @ l.alpha
            err = max(err, abs(F @ F - (l.a ** 2 * na2 + na2 ** 2)))
            if abs(t) > 1e-9 and np.linalg.norm(F) < 1e-12:
                zero_ok = 1.0
    s.add("f-locus-norm", "|F|^2 = a^2|alpha|^2 + |alpha|^4 on the normal grid", err, 1e-10)
    s.add("f-locus-zero-set", "F vanishes only at alpha = 0", zero_ok, 0.0)


def _dirac_checks(s):
    n = 4
    conn0 = Connection1Form.zero(n)
    theta = (0.9, 0.4, -1.3)
    connt = Connection1Form.u1_constant(n, theta)
    s.add("dirac-symmetry", "assembled operator is exactly symmetric",
          max(operator_asymmetry(conn0, "real"), operator_asymmetry(connt, "real"),
              operator_asymmetry(connt, "complex")), 1e-12)
    vals = np.sort(dirac_spectrum(conn0, form="real"))
    s.add("dirac-spectrum-symmetric", "spectrum is symmetric about zero",
          np.max(np.abs(vals + vals[::-1])), 1e-10)
    s.add("dirac-dense-oracle", "spectrum matches the difference symbol",
          max(np.max(np.abs(vals - analytic_spectrum(n, form="real"))),
              np.max(np.abs(np.sort(dirac_spectrum(connt, form="complex"))
                            - analytic_spectrum(n, theta, form="complex")))), 1e-10)
    dims = sector_kernel_dims(n)
    kd_err = (abs(kernel_dimension(conn0, "real") - 32)
              + abs(kernel_constant_dimension(conn0, "real") - 4)
              + abs(len(dims) - 8) + sum(abs(v - 4) for v in dims.values()))
    s.add("dirac-kernel-untwisted", "kernel = 4 constants per each of 8 doubling sectors", kd_err, 0.0)
    s.add("dirac-kernel-twisted", "generic constant twist clears the kernel",
          kernel_dimension(connt, "real", tol=1e-8) + kernel_constant_dimension(connt, "real"), 0.0)

    x = s.rng.normal(size=(min(s.n, 50_000), 2)) + 1j * s.rng.normal(size=(min(s.n, 50_000), 2))
    t, c = sigma_map(x)
    nrm2 = np.einsum("ni,ni->n", x, np.conj(x)).real
    err = np.max(np.abs(np.sqrt(t ** 2 + np.abs(c) ** 2) - nrm2 / 2)) / max(1.0, nrm2.max())
    t0, c0 = sigma_map(np.array([1.0 + 0j, 0.0]))
    err = max(err, abs(t0 - 0.5), abs(c0))
    s.add("sigma-identity", "|sigma(x,x)| = |x|^2/2 and sigma(1,0) = (1/2, 0)", err, 1e-12)

    v = s.rng.normal(size=(n, n, n, 2)) + 1j * s.rng.normal(size=(n, n, n, 2))
    st = SWState(v, Connection1Form(n, u1=s.rng.normal(size=(n, n, n, 3))),
                 s.rng.normal(size=(n, n, n, 3)))
    f = s.rng.normal(size=(n, n, n))
    r1, r2 = sw_residual(st)
    r1g, r2g = sw_residual(gauge_transform(st, f))
    err = max(np.max(np.abs(r1g - np.exp(1j * f)[..., None] * r1)), np.max(np.abs(r2g - r2)))
    s.add("sw-gauge-equivariance", "residuals transform covariantly under the gauge action",
          err / max(1.0, np.abs(r1).max()), 1e-10)

    dv = s.rng.normal(size=(n, n, n, 2)) + 1j * s.rng.normal(size=(n, n, n, 2))
    dth = s.rng.normal(size=(n, n, n, 3))
    dd = s.rng.normal(size=(n, n, n, 3))
    eps = 1e-5
    def shifted(t_):
        return SWState(st.v + t_ * dv, Connection1Form(n, u1=st.a.u1_theta() + t_ * dth),
                       st.delta + t_ * dd)
    rp, rm = sw_residual(shifted(eps)), sw_residual(shifted(-eps))
    l1, l2 = sw_linearization(st, dv, dth, dd)
    scale = max(np.abs(l1).max(), np.abs(l2).max())
    err = max(np.max(np.abs((rp[0] - rm[0]) / (2 * eps) - l1)),
              np.max(np.abs((rp[1] - rm[1]) / (2 * eps) - l2))) / scale
    s.add("sw-linearization-fd", "linearization matches central finite differences", err, 1e-6)

    z1, z2 = sw_residual(SWState.zero(n))
    s.add("sw-zero-residual", "the zero state solves the unperturbed equations",
          max(np.max(np.abs(z1)), np.max(np.abs(z2))), 0.0)
    table = [((0, 2, 0), -1), ((4, 0, 0), 1), ((0, 0, 0), 0), ((9, 1, 1), 1)]
    err = max(abs(sw_index_formula(*args) - want) for args, want in table)
    op = scalar_one_form_complex_matrix(n)
    err += abs(op.shape[0] - op.shape[1])
    s.add("sw-index-bookkeeping", "dimension formula table and square deformation complex", err, 0.0)


_GROUPS = {
    "octonion": _octonion_checks,
    "forms": _forms_checks,
    "lie": _lie_checks,
    "grassmann": _grassmann_checks,
    "deformations": _deformation_checks,
    "dirac": _dirac_checks,
}


def run_verification(seed=0, samples=100_000, tol_scale=1.0, phi_coeffs=None,
                     groups=None):
    """Run the identity suites and collect a report; exit-code semantics are
    the caller's (report.passed)."""
    start = time.perf_counter()
    s = _Suite(seed, samples, tol_scale, phi_coeffs)
    for name, fn in _GROUPS.items():
        if groups is None or name in groups:
            try:
                fn(s)
            except Exception as exc:   # a crashed suite is a failed check
                s.add(f"{name}-suite-error", f"suite raised: {exc}", np.inf, 0.0)
    return VerificationReport("verify", int(seed), int(samples), s.checks,
                              wall_time_s=time.perf_counter() - start)
