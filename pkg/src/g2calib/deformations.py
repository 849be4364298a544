"""The projectively parametrized family of G2 3-forms sharing the flat
metric, the deformed cross product, and the locus where deforming leaves a
given 2-plane's associative extension unchanged.

Parameters lambda = [a, alpha] live on the unit sphere of R + R^7 modulo
antipodal sign; alpha is identified with its metric dual throughout (the
family is metric fixed, so raising indices is the identity).
"""

from dataclasses import dataclass, field

import numpy as np

from .forms import (AlternatingForm, chi_via_cross, hodge_star, phi0,
                    star_phi0)
from .octonion import cross7


@dataclass
class LambdaParam:
    """Unit pair (a, alpha) with a^2 + |alpha|^2 = 1, modulo joint sign."""

    a: float
    alpha: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        if alpha.shape != (7,):
            raise ValueError("alpha must have 7 components")
        nrm = float(np.sqrt(self.a ** 2 + alpha @ alpha))
        if nrm < 1e-12:
            raise ValueError("zero parameter")
        self.a = float(self.a) / nrm
        self.alpha = alpha / nrm

    @classmethod
    def from_vector8(cls, v):
        v = np.asarray(v, dtype=float)
        return cls(v[0], v[1:])

    def as_vector8(self):
        return np.concatenate([[self.a], self.alpha])


@dataclass
class SplitFrame:
    """Orthonormal 2-frame (u, v) with the derived splitting
    E = <u, v, u x v> and V = E-perp."""

    u: np.ndarray
    v: np.ndarray
    e_basis: np.ndarray = field(init=False)   # (3, 7)
    v_basis: np.ndarray = field(init=False)   # (4, 7)

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if abs(u @ u - 1) > 1e-10 or abs(v @ v - 1) > 1e-10 or abs(u @ v) > 1e-10:
            raise ValueError("u, v must be orthonormal")
        self.u, self.v = u, v
        w = cross7(u, v)
        E = np.array([u, v, w / np.linalg.norm(w)])
        self.e_basis = E
        basis = []
        for i in range(7):
            cand = np.zeros(7)
            cand[i] = 1.0
            cand = cand - E.T @ (E @ cand)
            for b in basis:
                cand -= np.dot(b, cand) * b
            nrm = np.linalg.norm(cand)
            if nrm > 1e-9:
                basis.append(cand / nrm)
            if len(basis) == 4:
                break
        self.v_basis = np.array(basis)


def _alpha_form(alpha):
    return AlternatingForm(1, 7, alpha)


def phi_lambda(l):
    """(a^2 - |alpha|^2) phi + 2a *(alpha ^ phi) + 2 alpha ^ *(alpha ^ *phi),
    with the flat star; a positive 3-form inducing the identity metric for
    every parameter."""
    a, alpha = l.a, l.alpha
    phi = phi0()
    al = _alpha_form(alpha)
    na2 = float(alpha @ alpha)
    t1 = (a * a - na2) * phi
    t2 = 2.0 * a * hodge_star(al.wedge(phi))
    t3 = 2.0 * al.wedge(hodge_star(al.wedge(star_phi0())))
    return t1 + t2 + t3


def phi_lambda_contracted(l):
    """Equivalent contracted expression phi - 2 alpha# . [a *phi + alpha ^ phi]."""
    a, alpha = l.a, l.alpha
    phi = phi0()
    inner = a * star_phi0() + _alpha_form(alpha).wedge(phi)
    return phi - 2.0 * inner.interior(alpha)


def star_phi_lambda(l):
    """*phi_lambda = *phi + 2 alpha ^ [a phi - alpha# . *phi]."""
    a, alpha = l.a, l.alpha
    inner = a * phi0() - star_phi0().interior(alpha)
    return star_phi0() + 2.0 * _alpha_form(alpha).wedge(inner)


def cross_lambda(l, u, v):
    """Deformed cross product

    (u x v)_l = (1 - 2|alpha|^2)(u x v)
                + 2 [ -a chi(u,v,alpha#) + alpha(v)(u x alpha#)
                      - alpha(u)(v x alpha#) + phi(u,v,alpha#) alpha# ],

    equal to the cross product recovered from phi_lambda(l)."""
    a, alpha = l.a, l.alpha
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    na2 = float(alpha @ alpha)
    phiuva = phi0().evaluate(u, v, alpha)
    return ((1.0 - 2.0 * na2) * cross7(u, v)
            + 2.0 * (-a * chi_via_cross(u, v, alpha)
                     + (alpha @ v) * cross7(u, alpha)
                     - (alpha @ u) * cross7(v, alpha)
                     + phiuva * alpha))


def f_locus_defect(l, s):
    """F = a chi(u,v,alpha#) - alpha(v)(u x alpha#) + alpha(u)(v x alpha#)
         - phi(u,v,alpha#) alpha# + |alpha|^2 (u x v).

    (u x v)_l = u x v - 2F, so F = 0 exactly where the deformation fixes the
    associative 3-plane spanned by (u, v).  For alpha# in V with a != 0 this
    happens only at alpha = 0: there F = a J(alpha#) + |alpha|^2 u x v with
    the two terms orthogonal, so |F|^2 = a^2 |alpha|^2 + |alpha|^4.
    """
    a, alpha = l.a, l.alpha
    u, v = s.u, s.v
    phiuva = phi0().evaluate(u, v, alpha)
    return (a * chi_via_cross(u, v, alpha)
            - (alpha @ v) * cross7(u, alpha)
            + (alpha @ u) * cross7(v, alpha)
            - phiuva * alpha
            + float(alpha @ alpha) * cross7(u, v))
