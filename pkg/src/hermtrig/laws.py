"""Residuals of the trigonometric equations.

Every law is stored in a static registry.  An evaluator receives a
``Quantities`` bundle (the fourteen quantities x, X, phi, psi, S, s in the
signed compact notation, possibly array valued) and an index choice, and
returns a list of (lhs, rhs) pairs.  The residual of a pair is
|lhs - rhs| / max(1, |lhs|, |rhs|); division-form laws are stored
cross-multiplied so no denominator is ever formed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import rep
from .group import GroupElement, one_param
from .scalars import SpaceLabels, cosk, sink, versink
from .triangle import (
    TriangleData,
    basic_product,
    from_record,
    classify_special,
    gramm_determinant,
    gramm_Gamma,
    gramm_gamma,
    symplectic_area,
    symplectic_coarea,
)

CYCLIC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))
DEFAULT_LAW_TOL = 1e-8


class NotSpecial(ValueError):
    pass


@dataclass
class Quantities:
    """The fourteen quantities of the full equation set."""

    labels: SpaceLabels
    x: list
    X: list
    phi: list
    psi: list
    S: object
    s: object

    @classmethod
    def from_triangle(cls, t: TriangleData) -> "Quantities":
        return cls(
            t.labels,
            [np.asarray(v, float) for v in t.x],
            [np.asarray(v, float) for v in t.X],
            [np.asarray(v, float) for v in t.phi],
            [np.asarray(v, float) for v in t.psi],
            np.asarray(symplectic_area(t), float),
            np.asarray(symplectic_coarea(t), float),
        )

    @classmethod
    def from_vector(cls, labels: SpaceLabels, v) -> "Quantities":
        """Vector layout: x1..x3, X1..X3, phi1..phi3, psi1..psi3, S, s (leading axis)."""
        v = np.asarray(v, float)
        return cls(labels, list(v[0:3]), list(v[3:6]), list(v[6:9]), list(v[9:12]), v[12], v[13])

    def vector(self) -> np.ndarray:
        return np.stack(
            [np.broadcast_to(q, np.shape(self.S)) for q in (*self.x, *self.X, *self.phi, *self.psi, self.S, self.s)]
        )

    # labels
    @property
    def eta(self):
        return self.labels.eta

    @property
    def k1(self):
        return self.labels.kappa1

    @property
    def k2(self):
        return self.labels.kappa2

    # mixed excesses from their definitions
    @property
    def omega(self):
        return self.psi[0] + self.psi[1] + self.phi[2]

    @property
    def Omega(self):
        return self.phi[0] + self.phi[1] + self.psi[2]

    # labeled functions
    def C1(self, v):
        return cosk(self.k1, v)

    def S1(self, v):
        return sink(self.k1, v)

    def V1(self, v):
        return versink(self.k1, v)

    def C2(self, v):
        return cosk(self.k2, v)

    def S2(self, v):
        return sink(self.k2, v)

    def V2(self, v):
        return versink(self.k2, v)

    def Ce(self, v):
        return cosk(self.eta, v)

    def Se(self, v):
        return sink(self.eta, v)

    # omega and Omega through the symplectic area and coarea
    def area_sin(self):
        """S_eta(omega)/kappa1 as S_{eta kappa1^2}(2S)."""
        return sink(self.eta * self.k1**2, 2 * self.S)

    def area_cos(self):
        return cosk(self.eta * self.k1**2, 2 * self.S)

    def area_vers(self):
        return versink(self.eta * self.k1**2, 2 * self.S)

    def coarea_sin(self):
        return sink(self.eta * self.k2**2, 2 * self.s)

    def coarea_vers(self):
        return versink(self.eta * self.k2**2, 2 * self.s)


Pair = tuple


def pair_residual(lhs, rhs):
    lhs = np.asarray(lhs, float)
    rhs = np.asarray(rhs, float)
    scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    return np.abs(lhs - rhs) / scale


# ---------------------------------------------------------------------------
# the nine identities (conventional letters)


def _cd(q: Quantities, theta):
    return q.Ce(theta), q.Se(theta)


def _cd_terms(q: Quantities, terms):
    """Sum of coefficient * exp(i theta) over (coefficient, theta) terms."""
    re = 0.0
    im = 0.0
    for coeff, theta in terms:
        c, s = _cd(q, theta)
        re = re + coeff * c
        im = im + coeff * s
    return re, im


def _letters(q: Quantities):
    x, X, ph, ps = q.x, q.X, q.phi, q.psi
    return dict(
        a=-x[0], b=x[1], c=x[2], A=-X[0], B=X[1], C=X[2],
        pa=-ph[0], pb=ph[1], pc=ph[2], qA=-ps[0], qB=ps[1], qC=ps[2],
    )


def nine_identities(q: Quantities) -> list[list[Pair]]:
    L = _letters(q)
    a, b, c, A, B, C = L["a"], L["b"], L["c"], L["A"], L["B"], L["C"]
    pa, pb, pc, qA, qB, qC = L["pa"], L["pb"], L["pc"], L["qA"], L["qB"], L["qC"]
    k1, k2 = q.k1, q.k2
    C1, S1, C2, S2 = q.C1, q.S1, q.C2, q.S2
    r_m2 = (pa - pb - 2 * qC) / 3  # recurring right-hand phases
    r_p1 = (pa - pb + qC) / 3
    l_m2 = (qA - qB - 2 * pc) / 3
    l_p1 = (qA - qB + pc) / 3
    eqs = [
        ([(C1(c), (-2 * qA + 2 * qB + pc) / 3)],
         [(C1(a) * C1(b), r_m2), (k1 * S1(a) * S1(b) * C2(C), r_p1)]),
        ([(C2(C), (-2 * pa + 2 * pb + qC) / 3)],
         [(C2(A) * C2(B), l_m2), (k2 * S2(A) * S2(B) * C1(c), l_p1)]),
        ([(S1(c) * S2(A), (qA + 2 * qB + pc) / 3)],
         [(S1(a) * S2(C), (pa + 2 * pb + qC) / 3)]),
        ([(S1(c) * S2(B), (-2 * qA - qB + pc) / 3)],
         [(S1(b) * S2(C), (-2 * pa - pb + qC) / 3)]),
        ([(S1(c) * C2(A), (qA + 2 * qB + pc) / 3)],
         [(-C1(a) * S1(b), r_m2), (S1(a) * C1(b) * C2(C), r_p1)]),
        ([(S1(c) * C2(B), (-2 * qA - qB + pc) / 3)],
         [(C1(b) * S1(a), r_m2), (-S1(b) * C1(a) * C2(C), r_p1)]),
        ([(S2(C) * C1(a), (pa + 2 * pb + qC) / 3)],
         [(-C2(A) * S2(B), l_m2), (S2(A) * C2(B) * C1(c), l_p1)]),
        ([(S2(C) * C1(b), (-2 * pa - pb + qC) / 3)],
         [(C2(B) * S2(A), l_m2), (-S2(B) * C2(A) * C1(c), l_p1)]),
        ([(k2 * S2(A) * S2(B), l_m2), (C2(A) * C2(B) * C1(c), l_p1)],
         [(k1 * S1(a) * S1(b), r_m2), (C1(a) * C1(b) * C2(C), r_p1)]),
    ]
    out = []
    for lhs, rhs in eqs:
        lre, lim = _cd_terms(q, lhs)
        rre, rim = _cd_terms(q, rhs)
        out.append([(lre, rre), (lim, rim)])
    return out


def _nine(n):
    def evaluate(q, idx):
        return nine_identities(q)[n]

    return evaluate


# ---------------------------------------------------------------------------
# the final set (tags 0-4)


def _t0(q, idx):
    i, j, _ = idx
    return [(q.psi[i] - q.phi[i], q.psi[j] - q.phi[j])]


def _omega_def(q, idx):
    return [(q.omega, 2 * q.k1 * q.S)]


def _Omega_def(q, idx):
    return [(q.Omega, 2 * q.k2 * q.s)]


def _t1i(q, idx):
    i, j, k = idx
    x, X, ps = q.x, q.X, q.psi
    common = q.k1 * q.S1(x[j]) * q.S1(x[k]) * q.C2(X[i])
    return [
        (q.C1(x[i]) * q.Ce(q.omega), q.C1(x[j]) * q.C1(x[k]) - common * q.Ce(ps[i])),
        (q.C1(x[i]) * q.Se(q.omega), -common * q.Se(ps[i])),
    ]


def _t1I(q, idx):
    i, j, k = idx
    x, X, ph = q.x, q.X, q.phi
    common = q.k2 * q.S2(X[j]) * q.S2(X[k]) * q.C1(x[i])
    return [
        (q.C2(X[i]) * q.Ce(q.Omega), q.C2(X[j]) * q.C2(X[k]) - common * q.Ce(ph[i])),
        (q.C2(X[i]) * q.Se(q.Omega), -common * q.Se(ph[i])),
    ]


def _t2(q, idx):
    i, j, _ = idx
    return [(q.S1(q.x[i]) * q.S2(q.X[j]), q.S1(q.x[j]) * q.S2(q.X[i]))]


def _t3iJ(q, idx):
    i, j, k = idx
    x, X, ph, ps = q.x, q.X, q.phi, q.psi
    lhs = q.S1(x[i]) * q.C2(X[j])
    return [
        (lhs * q.Ce(ph[k]), -q.C1(x[j]) * q.S1(x[k]) * q.Ce(ps[i]) - q.S1(x[j]) * q.C1(x[k]) * q.C2(X[i])),
        (lhs * q.Se(ph[k]), q.C1(x[j]) * q.S1(x[k]) * q.Se(ps[i])),
    ]


def _t3Ij(q, idx):
    i, j, k = idx
    x, X, ph, ps = q.x, q.X, q.phi, q.psi
    lhs = q.S2(X[i]) * q.C1(x[j])
    return [
        (lhs * q.Ce(ps[k]), -q.C2(X[j]) * q.S2(X[k]) * q.Ce(ph[i]) - q.S2(X[j]) * q.C2(X[k]) * q.C1(x[i])),
        (lhs * q.Se(ps[k]), q.C2(X[j]) * q.S2(X[k]) * q.Se(ph[i])),
    ]


def _t4(q, idx):
    i, j, k = idx
    x, X, ph, ps = q.x, q.X, q.phi, q.psi
    left = q.C2(X[i]) * q.C2(X[j]) * q.C1(x[k])
    right = q.C1(x[i]) * q.C1(x[j]) * q.C2(X[k])
    return [
        (-q.k2 * q.S2(X[i]) * q.S2(X[j]) + left * q.Ce(ph[k]),
         -q.k1 * q.S1(x[i]) * q.S1(x[j]) + right * q.Ce(ps[k])),
        (left * q.Se(ph[k]), right * q.Se(ps[k])),
    ]


# ---------------------------------------------------------------------------
# named laws


def _sr_cos(q, idx):
    i, j, k = idx
    x, X, ps = q.x, q.X, q.psi
    ss = q.S1(x[j]) * q.S1(x[k]) * q.C2(X[i])
    real = q.C1(x[j]) * q.C1(x[k]) - q.k1 * ss * q.Ce(ps[i])
    return [(q.C1(x[i]) ** 2, real**2 + q.eta * q.k1**2 * ss**2 * q.Se(ps[i]) ** 2)]


def _sr_dualcos(q, idx):
    i, j, k = idx
    x, X, ph = q.x, q.X, q.phi
    ss = q.S2(X[j]) * q.S2(X[k]) * q.C1(x[i])
    real = q.C2(X[j]) * q.C2(X[k]) - q.k2 * ss * q.Ce(ph[i])
    return [(q.C2(X[i]) ** 2, real**2 + q.eta * q.k2**2 * ss**2 * q.Se(ph[i]) ** 2)]


def _sr_cos2(q, idx):
    i, j, k = idx
    x, X, ps = q.x, q.X, q.psi
    rhs = (
        q.C1(2 * x[j]) * q.C1(2 * x[k])
        - q.k1 * q.S1(2 * x[j]) * q.S1(2 * x[k]) * q.C2(X[i]) * q.Ce(ps[i])
        - 2 * q.k1**2 * q.k2 * (q.S1(x[j]) * q.S1(x[k]) * q.S2(X[i])) ** 2
    )
    return [(q.C1(2 * x[i]), rhs)]


def _sr_dualcos2(q, idx):
    i, j, k = idx
    x, X, ph = q.x, q.X, q.phi
    rhs = (
        q.C2(2 * X[j]) * q.C2(2 * X[k])
        - q.k2 * q.S2(2 * X[j]) * q.S2(2 * X[k]) * q.C1(x[i]) * q.Ce(ph[i])
        - 2 * q.k1 * q.k2**2 * (q.S2(X[j]) * q.S2(X[k]) * q.S1(x[i])) ** 2
    )
    return [(q.C2(2 * X[i]), rhs)]


def _bt_cos(q, idx):
    i, j, k = idx
    x, X = q.x, q.X
    rhs = (
        -(q.C1(x[j]) * q.C1(x[k])) ** 2
        + q.k1**2 * (q.S1(x[j]) * q.S1(x[k]) * q.C2(X[i])) ** 2
        + 2 * q.C1(x[i]) * q.C1(x[j]) * q.C1(x[k]) * q.Ce(q.omega)
    )
    return [(q.C1(x[i]) ** 2, rhs)]


def _bt_dualcos(q, idx):
    i, j, k = idx
    x, X = q.x, q.X
    rhs = (
        -(q.C2(X[j]) * q.C2(X[k])) ** 2
        + q.k2**2 * (q.S2(X[j]) * q.S2(X[k]) * q.C1(x[i])) ** 2
        + 2 * q.C2(X[i]) * q.C2(X[j]) * q.C2(X[k]) * q.Ce(q.Omega)
    )
    return [(q.C2(X[i]) ** 2, rhs)]


def _sr_sin2(q, idx):
    i, j, _ = idx
    x, X, ps = q.x, q.X, q.psi
    return [(q.S1(2 * x[i]) * q.Se(ps[j]) * q.C2(X[j]), q.S1(2 * x[j]) * q.Se(ps[i]) * q.C2(X[i]))]


def _sr_dualsin2(q, idx):
    i, j, _ = idx
    x, X, ph = q.x, q.X, q.phi
    return [(q.S2(2 * X[i]) * q.Se(ph[j]) * q.C1(x[j]), q.S2(2 * X[j]) * q.Se(ph[i]) * q.C1(x[i]))]


def _ss(q, idx):
    i, j, _ = idx
    x, X, ph, ps = q.x, q.X, q.phi, q.psi
    return [(
        q.S1(x[i]) * q.S2(X[i]) * q.Se(ph[j]) * q.Se(ps[j]),
        q.S1(x[j]) * q.S2(X[j]) * q.Se(ph[i]) * q.Se(ps[i]),
    )]


def _cT(q, idx):
    i, j, _ = idx
    x, X, ps = q.x, q.X, q.psi
    return [(
        q.C1(x[i]) * q.S2(X[i]) * q.C2(X[j]) * q.Se(ps[j]),
        q.C1(x[j]) * q.S2(X[j]) * q.C2(X[i]) * q.Se(ps[i]),
    )]


def _Ct(q, idx):
    i, j, _ = idx
    x, X, ph = q.x, q.X, q.phi
    return [(
        q.C2(X[i]) * q.S1(x[i]) * q.C1(x[j]) * q.Se(ph[j]),
        q.C2(X[j]) * q.S1(x[j]) * q.C1(x[i]) * q.Se(ph[i]),
    )]


def _cc(q, idx):
    i, j, k = idx
    x, ph, ps = q.x, q.phi, q.psi
    cc = q.C1(x[j]) * q.C1(x[k])
    return [
        (-q.C1(x[i]) * q.Se(ph[j] + ps[k]), cc * q.Se(ps[i])),
        (-q.C1(x[i]) * q.Se(q.omega - ps[i]), cc * q.Se(ps[i])),
    ]


def _CC(q, idx):
    i, j, k = idx
    X, ph, ps = q.X, q.phi, q.psi
    cc = q.C2(X[j]) * q.C2(X[k])
    return [
        (-q.C2(X[i]) * q.Se(ps[j] + ph[k]), cc * q.Se(ph[i])),
        (-q.C2(X[i]) * q.Se(q.Omega - ph[i]), cc * q.Se(ph[i])),
    ]


def _Tc(q, idx):
    # -T2(X_I)/S(psi_I) = T2(X_K) C1(x_j)/S(psi_I + phi_j) = .../S(omega - psi_K)
    i, j, k = idx
    x, X, ph, ps = q.x, q.X, q.phi, q.psi
    left = -q.S2(X[i]) * q.C2(X[k])
    right = q.S2(X[k]) * q.C1(x[j]) * q.C2(X[i]) * q.Se(ps[i])
    return [(left * q.Se(ps[i] + ph[j]), right), (left * q.Se(q.omega - ps[k]), right)]


def _Tc2(q, idx):
    # -T2(X_K)/S(psi_K) = T2(X_I) C1(x_j)/S(psi_K + phi_j) = .../S(omega - psi_I)
    i, j, k = idx
    x, X, ph, ps = q.x, q.X, q.phi, q.psi
    left = -q.S2(X[k]) * q.C2(X[i])
    right = q.S2(X[i]) * q.C1(x[j]) * q.C2(X[k]) * q.Se(ps[k])
    return [(left * q.Se(ps[k] + ph[j]), right), (left * q.Se(q.omega - ps[i]), right)]


def _tC(q, idx):
    i, j, k = idx
    x, X, ph, ps = q.x, q.X, q.phi, q.psi
    left = -q.S1(x[i]) * q.C1(x[k])
    right = q.S1(x[k]) * q.C2(X[j]) * q.C1(x[i]) * q.Se(ph[i])
    return [(left * q.Se(ph[i] + ps[j]), right), (left * q.Se(q.Omega - ph[k]), right)]


def _tC2(q, idx):
    i, j, k = idx
    x, X, ph, ps = q.x, q.X, q.phi, q.psi
    left = -q.S1(x[k]) * q.C1(x[i])
    right = q.S1(x[i]) * q.C2(X[j]) * q.C1(x[k]) * q.Se(ph[k])
    return [(left * q.Se(ph[k] + ps[j]), right), (left * q.Se(q.Omega - ph[i]), right)]


def _c_euler(q, idx):
    i, j, k = idx
    ps, ph = q.psi, q.phi
    den = q.Se(ps[i]) * q.Se(ps[j])
    return [
        (q.C1(q.x[k]) ** 2 * den, q.Se(ps[i] + ph[k]) * q.Se(ps[j] + ph[k])),
        (q.C1(q.x[k]) ** 2 * den, q.Se(q.omega - ps[i]) * q.Se(q.omega - ps[j])),
    ]


def _C_euler(q, idx):
    i, j, k = idx
    ps, ph = q.psi, q.phi
    den = q.Se(ph[i]) * q.Se(ph[j])
    return [
        (q.C2(q.X[k]) ** 2 * den, q.Se(ph[i] + ps[k]) * q.Se(ph[j] + ps[k])),
        (q.C2(q.X[k]) ** 2 * den, q.Se(q.Omega - ph[i]) * q.Se(q.Omega - ph[j])),
    ]


def _s_euler(q, idx):
    i, j, k = idx
    return [(q.S1(q.x[k]) ** 2 * q.Se(q.psi[i]) * q.Se(q.psi[j]), -q.Se(q.phi[k]) * q.area_sin())]


def _S_euler(q, idx):
    i, j, k = idx
    return [(q.S2(q.X[k]) ** 2 * q.Se(q.phi[i]) * q.Se(q.phi[j]), -q.Se(q.psi[k]) * q.coarea_sin())]


def _gramm_gamma_law(q, idx):
    i, j, k = idx
    sss = (q.S1(q.x[i]) * q.S2(q.X[j]) * q.S1(q.x[k])) ** 2
    gamma = _gamma_poly(q)
    psi_prod = q.Se(q.psi[0]) * q.Se(q.psi[1]) * q.Se(q.psi[2])
    return [
        (gamma, q.k2 * sss),
        (sss * psi_prod, -(q.area_sin() ** 2) * q.coarea_sin()),
    ]


def _gramm_Gamma_law(q, idx):
    i, j, k = idx
    sss = (q.S2(q.X[i]) * q.S1(q.x[j]) * q.S2(q.X[k])) ** 2
    Gamma = _Gamma_poly(q)
    phi_prod = q.Se(q.phi[0]) * q.Se(q.phi[1]) * q.Se(q.phi[2])
    return [
        (Gamma, q.k1 * sss),
        (sss * phi_prod, -q.area_sin() * q.coarea_sin() ** 2),
    ]


def _gamma_poly(q):
    V = [q.V1(v) for v in q.x]
    C = [q.C1(v) for v in q.x]
    return (
        2 * (V[0] * V[1] + V[1] * V[2] + V[2] * V[0])
        - (V[0] ** 2 + V[1] ** 2 + V[2] ** 2)
        - 2 * q.eta * C[0] * C[1] * C[2] * q.area_vers()
        - 2 * q.k1 * V[0] * V[1] * V[2]
    )


def _Gamma_poly(q):
    V = [q.V2(v) for v in q.X]
    C = [q.C2(v) for v in q.X]
    return (
        2 * (V[0] * V[1] + V[1] * V[2] + V[2] * V[0])
        - (V[0] ** 2 + V[1] ** 2 + V[2] ** 2)
        - 2 * q.eta * C[0] * C[1] * C[2] * q.coarea_vers()
        - 2 * q.k2 * V[0] * V[1] * V[2]
    )


# ---------------------------------------------------------------------------
# contracted forms


def _t1i_prime(q, idx):
    i, j, k = idx
    x, X, ps = q.x, q.X, q.psi
    ss = q.S1(x[j]) * q.S1(x[k])
    return [
        (q.V1(x[i]) - q.V1(x[j] + x[k]),
         ss * (q.C2(X[i]) * q.Ce(ps[i]) - 1) - q.eta * q.k1 * q.area_vers() * q.C1(x[i])),
        (q.C1(x[i]) * q.area_sin(), -ss * q.C2(X[i]) * q.Se(ps[i])),
    ]


def _t1I_prime(q, idx):
    i, j, k = idx
    x, X, ph = q.x, q.X, q.phi
    ss = q.S2(X[j]) * q.S2(X[k])
    return [
        (q.V2(X[i]) - q.V2(X[j] + X[k]),
         ss * (q.C1(x[i]) * q.Ce(ph[i]) - 1) - q.eta * q.k2 * q.coarea_vers() * q.C2(X[i])),
        (q.C2(X[i]) * q.coarea_sin(), -ss * q.C1(x[i]) * q.Se(ph[i])),
    ]


def _zero_eta_nonzero(q, idx):
    """kappa1 = kappa2 = 0, eta != 0."""
    i, j, k = idx
    x, X, ph, ps = q.x, q.X, q.phi, q.psi
    return [
        (ps[i], ph[i]),
        (x[i] * X[j], x[j] * X[i]),
        (x[i] ** 2, x[j] ** 2 + x[k] ** 2 + 2 * x[j] * x[k] * q.Ce(ps[i])),
        (2 * q.S, -x[j] * x[k] * q.Se(ps[i])),
        (X[i] ** 2, X[j] ** 2 + X[k] ** 2 + 2 * X[j] * X[k] * q.Ce(ph[i])),
        (2 * q.s, -X[j] * X[k] * q.Se(ph[i])),
    ]


def _zero_eta_zero(q, idx):
    """All labels zero."""
    i, j, k = idx
    x, X, ph, ps = q.x, q.X, q.phi, q.psi
    return [
        (ps[i], ph[i]),
        (x[i] * X[j], x[j] * X[i]),
        (x[0] + x[1] + x[2], 0.0 * x[0]),
        (X[0] + X[1] + X[2], 0.0 * X[0]),
        (x[i] * ps[j], x[j] * ps[i]),
        (2 * q.S, -x[j] * x[k] * ps[i]),
        (2 * q.s, -X[j] * X[k] * ph[i]),
    ]


# ---------------------------------------------------------------------------
# special triangles


def _collinear(q, idx):
    i, j, k = idx
    x, ph, ps = q.x, q.phi, q.psi
    # auxiliary real triangle: sides 2x, angles psi, labels (kappa1, eta)
    return [
        (q.C1(2 * x[j]), q.C1(2 * x[i]) * q.C1(2 * x[k]) - q.k1 * q.S1(2 * x[i]) * q.S1(2 * x[k]) * q.Ce(ps[j])),
        (q.S1(2 * x[i]) * q.Se(ps[j]), q.S1(2 * x[j]) * q.Se(ps[i])),
        (q.Omega, 0.0 * q.Omega),
        (ps[i] - ph[i], q.omega),
        (ps[0] + ps[1] + ps[2], 2 * q.omega),
    ]


def _concurrent(q, idx):
    i, j, k = idx
    X, ph, ps = q.X, q.phi, q.psi
    return [
        (q.C2(2 * X[j]), q.C2(2 * X[i]) * q.C2(2 * X[k]) - q.k2 * q.S2(2 * X[i]) * q.S2(2 * X[k]) * q.Ce(ph[j])),
        (q.S2(2 * X[i]) * q.Se(ph[j]), q.S2(2 * X[j]) * q.Se(ph[i])),
        (q.omega, 0.0 * q.omega),
        (ph[i] - ps[i], q.Omega),
        (ph[0] + ph[1] + ph[2], 2 * q.Omega),
    ]


def _purely_real(q, idx):
    i, j, k = idx
    x, X, ph, ps = q.x, q.X, q.phi, q.psi
    # discrete phase cosines rho = +-1
    rho_i, rho_I, rho_w, rho_W = q.Ce(ph[i]), q.Ce(ps[i]), q.Ce(q.omega), q.Ce(q.Omega)
    return [
        (q.C1(x[i]) * rho_w, q.C1(x[j]) * q.C1(x[k]) - q.k1 * q.S1(x[j]) * q.S1(x[k]) * q.C2(X[i]) * rho_I),
        (q.C2(X[i]) * rho_W, q.C2(X[j]) * q.C2(X[k]) - q.k2 * q.S2(X[j]) * q.S2(X[k]) * q.C1(x[i]) * rho_i),
        (q.S1(x[i]) * q.S2(X[j]), q.S1(x[j]) * q.S2(X[i])),
        (q.Se(ph[i]), 0.0 * ph[i]),
        (q.Se(ps[i]), 0.0 * ps[i]),
    ]


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class Law:
    name: str
    group: str
    evaluate: Callable
    anchor: str
    indexed: bool = True
    applicable: Callable[[SpaceLabels], bool] = field(default=lambda labels: True)

    def pairs(self, q: Quantities, idx=(0, 1, 2)):
        return self.evaluate(q, idx)


def _both_flat(labels):
    return labels.kappa1 == 0 and labels.kappa2 == 0


LAWS: dict[str, Law] = {}


def _register(*laws: Law) -> None:
    for law in laws:
        LAWS[law.name] = law


_register(
    *(Law(f"nine_{n + 1}", "nine", _nine(n), "nine complex identities", indexed=False) for n in range(9)),
    Law("t0ij", "final", _t0, "complex hermitian phases theorem"),
    Law("omega_def", "final", _omega_def, "mixed phase excess equals twice kappa1 times the symplectic area", indexed=False),
    Law("Omega_def", "final", _Omega_def, "dual mixed phase excess equals twice kappa2 times the coarea", indexed=False),
    Law("t1i", "final", _t1i, "hermitian cosine theorem"),
    Law("t1I", "final", _t1I, "hermitian dual cosine theorem"),
    Law("t2ij", "final", _t2, "hermitian sine theorem"),
    Law("t3iJ", "final", _t3iJ, "tag 3 equations"),
    Law("t3Ij", "final", _t3Ij, "dual tag 3 equations"),
    Law("t4ij", "final", _t4, "self-dual tag 4 equations"),
    Law("sr_cos", "named", _sr_cos, "Shirokov-Rosenfeld cosine theorem"),
    Law("sr_cos2", "named", _sr_cos2, "Shirokov-Rosenfeld cosine double theorem"),
    Law("sr_dualcos", "named", _sr_dualcos, "Shirokov-Rosenfeld dual cosine theorem"),
    Law("sr_dualcos2", "named", _sr_dualcos2, "Shirokov-Rosenfeld dual cosine double theorem"),
    Law("bt_cos", "named", _bt_cos, "Blaschke-Terheggen cosine theorem for sides"),
    Law("bt_dualcos", "named", _bt_dualcos, "Blaschke-Terheggen dual cosine theorem"),
    Law("sr_sin2", "named", _sr_sin2, "Shirokov-Rosenfeld double sine theorem"),
    Law("sr_dualsin2", "named", _sr_dualsin2, "Shirokov-Rosenfeld dual double sine theorem"),
    Law("ss", "named", _ss, "self-dual product of the double sine theorems"),
    Law("cT", "named", _cT, "cosine-tangent quotient law"),
    Law("Ct", "named", _Ct, "dual cosine-tangent quotient law"),
    Law("cc", "named", _cc, "cosine product law for sides"),
    Law("CC", "named", _CC, "cosine product law for angles"),
    Law("Tc", "named", _Tc, "tangent-cosine law"),
    Law("Tc2", "named", _Tc2, "tangent-cosine law, second index pattern"),
    Law("tC", "named", _tC, "dual tangent-cosine law"),
    Law("tC2", "named", _tC2, "dual tangent-cosine law, second index pattern"),
    Law("c_euler", "named", _c_euler, "hermitian Euler-like law for sides"),
    Law("C_euler", "named", _C_euler, "hermitian Euler-like law for angles"),
    Law("s_euler", "named", _s_euler, "squared sines of the sides"),
    Law("S_euler", "named", _S_euler, "squared sines of the angles"),
    Law("gramm_gamma", "named", _gramm_gamma_law, "renormalized Gramm determinant of the vertices"),
    Law("gramm_Gamma", "named", _gramm_Gamma_law, "renormalized Gramm determinant of the poles"),
    Law("t1i_prime", "contracted", _t1i_prime, "hermitian cosine theorem in versed sines"),
    Law("t1I_prime", "contracted", _t1I_prime, "hermitian dual cosine theorem in versed sines"),
    Law("zero_eta_nonzero", "contracted", _zero_eta_nonzero, "flat-flat equations with eta nonzero",
        applicable=lambda L: _both_flat(L) and L.eta != 0),
    Law("zero_eta_zero", "contracted", _zero_eta_zero, "fully contracted equations",
        applicable=lambda L: _both_flat(L) and L.eta == 0),
    Law("collinear_reduced", "special", _collinear, "collinear reduction to a real triangle with doubled sides"),
    Law("concurrent_reduced", "special", _concurrent, "concurrent reduction to a real triangle with doubled angles"),
    Law("purely_real_reduced", "special", _purely_real, "purely real reduction with discrete phases"),
)

# matrix-valued laws are evaluated separately but listed for enumeration
MATRIX_LAWS = {
    "basic_identity": "basic trigonometric identity",
    "loop_point": "point loop equations",
    "loop_line": "line loop equations",
    "compat": "compatibility closure",
}

SPECIAL_LAW = {
    "collinear": "collinear_reduced",
    "concurrent": "concurrent_reduced",
    "purely_real": "purely_real_reduced",
}


def law_ids() -> list[str]:
    return ["basic_identity", *LAWS, "loop_point", "loop_line", "compat"]


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class LawEntry:
    residual: float
    passed: bool
    applicable: bool = True

    def as_dict(self) -> dict:
        return {"residual": self.residual, "pass": self.passed, "applicable": self.applicable}


@dataclass
class LawResidualReport:
    entries: dict[str, LawEntry] = field(default_factory=dict)
    # per-triangle residuals behind each entry, for pass counts over a batch
    samples: dict[str, np.ndarray] = field(default_factory=dict)

    def add(self, key: str, residual, tol: float, applicable: bool = True) -> None:
        arr = np.atleast_1d(np.asarray(residual, float))
        value = float(np.max(arr)) if arr.size else 0.0
        self.entries[key] = LawEntry(value, bool(value <= tol) or not applicable, applicable)
        self.samples[key] = arr

    def merge(self, other: "LawResidualReport") -> "LawResidualReport":
        self.entries.update(other.entries)
        self.samples.update(other.samples)
        return self

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries.values())

    def worst(self) -> tuple[str, float]:
        applicable = {k: e.residual for k, e in self.entries.items() if e.applicable}
        if not applicable:
            return ("", 0.0)
        key = max(applicable, key=applicable.get)
        return key, applicable[key]

    def failures(self) -> dict[str, LawEntry]:
        return {k: e for k, e in self.entries.items() if not e.passed}

    def as_dict(self) -> dict:
        return {k: e.as_dict() for k, e in self.entries.items()}


def law_residual(law: Law, q: Quantities, idx=(0, 1, 2)):
    """Worst pair residual of one law at one index choice."""
    pairs = law.pairs(q, idx)
    return np.max(np.stack([np.broadcast_to(pair_residual(l, r), np.shape(q.S)) for l, r in pairs]), axis=0)


def evaluate_laws(t: TriangleData, names, tol: float = DEFAULT_LAW_TOL,
                  quantities: Quantities | None = None) -> LawResidualReport:
    """Residual entries for the named laws; ``quantities`` overrides S and s taken from ``t``."""
    q = Quantities.from_triangle(t) if quantities is None else quantities
    report = LawResidualReport()
    for name in names:
        law = LAWS[name]
        applicable = law.applicable(t.labels)
        if law.indexed:
            for n, idx in enumerate(CYCLIC, start=1):
                res = law_residual(law, q, idx) if applicable else 0.0
                report.add(f"{name}[{n}]", res, tol, applicable)
        else:
            res = law_residual(law, q) if applicable else 0.0
            report.add(name, res, tol, applicable)
    return report


def _group(name: str) -> list[str]:
    return [k for k, law in LAWS.items() if law.group == name]


def residual_basic(t: TriangleData):
    """Max entry magnitude of the twelve-factor product minus the identity."""
    return basic_product(t).deviation(GroupElement.identity(t.labels, np.shape(t.a)))


def residual_nine(t: TriangleData) -> np.ndarray:
    """The nine complex identities as |lhs - rhs| / max(1, |rhs|); shape (9,) + batch.

    The modulus is the euclidean one of the (real, imaginary) pair, which is
    a norm for every eta.
    """
    q = Quantities.from_triangle(t)
    out = []
    for (lre, rre), (lim, rim) in nine_identities(q):
        diff = np.hypot(np.asarray(lre) - rre, np.asarray(lim) - rim)
        out.append(diff / np.maximum(1.0, np.hypot(rre, rim)))
    return np.stack(out)


def residual_final(t: TriangleData, tol: float = DEFAULT_LAW_TOL) -> LawResidualReport:
    return evaluate_laws(t, _group("final"), tol)


def residual_named(t: TriangleData, tol: float = DEFAULT_LAW_TOL) -> LawResidualReport:
    return evaluate_laws(t, _group("named"), tol)


def residual_contracted(t: TriangleData, tol: float = DEFAULT_LAW_TOL) -> LawResidualReport:
    return evaluate_laws(t, _group("contracted"), tol)


def residual_special(t: TriangleData, kind: str | None = None, tol: float = 1e-10) -> LawResidualReport:
    """Reduced laws for a special triangle; kind defaults to classify_special."""
    if kind is None:
        kind = classify_special(t) if np.ndim(t.a) == 0 else None
        if kind is None:
            raise ValueError("pass kind explicitly for array-valued triangles")
    if kind not in SPECIAL_LAW:
        raise NotSpecial(f"triangle is {kind}, not special")
    return evaluate_laws(t, [SPECIAL_LAW[kind]], tol)


# ---------------------------------------------------------------------------
# conjugated generators, loops and compatibility


def _matrix(g: str, labels: SpaceLabels, shape) -> GroupElement:
    re, im = rep(g, labels).to_arrays()
    re = np.broadcast_to(re, tuple(shape) + (3, 3)).copy()
    im = np.broadcast_to(im, tuple(shape) + (3, 3)).copy()
    return GroupElement(re, im, labels)


@dataclass
class ConjugatedGenerators:
    """Generators attached to each side (P, T) and vertex (J, I) of a triangle.

    ``frames`` holds the conjugating group elements g with X_side = g X g^-1,
    so exponentials are exact: exp(t X_side) = g exp(t X) g^-1.
    """

    labels: SpaceLabels
    matrices: dict[str, GroupElement]
    frames: dict[str, GroupElement]

    def exp(self, name: str, t) -> GroupElement:
        base = {"P": "P1", "T": "T1", "J": "J", "I": "I"}[name[0]]
        g = self.frames[name[-1]]
        return g @ one_param(base, t, self.labels) @ g.inverse()

    def __getitem__(self, name: str) -> GroupElement:
        return self.matrices[name]


def conjugated_generators(t: TriangleData) -> ConjugatedGenerators:
    L = t.labels
    shape = np.shape(t.a)
    ident = GroupElement.identity(L, shape)
    g_c = one_param("J", t.C, L) @ one_param("I", t.psi_C, L)
    g_cb = g_c @ one_param("P1", t.b, L) @ one_param("T1", t.phi_b, L)
    g_cba = g_cb @ one_param("J", -np.asarray(t.A), L) @ one_param("I", -np.asarray(t.psi_A), L)
    g_cbac = g_cba @ one_param("T1", t.phi_c, L) @ one_param("P1", t.c, L)
    # sides a, b, c carry frames for (P, T); vertices C, A, B for (J, I)
    frames = {"a": ident, "b": g_c, "c": g_cba, "C": ident, "A": g_cb, "B": g_cbac}
    mats = {}
    for side in "abc":
        g = frames[side]
        for gen, base in (("P", "P1"), ("T", "T1")):
            mats[gen + side] = g @ _matrix(base, L, shape) @ g.inverse()
    for vertex in "ABC":
        g = frames[vertex]
        for gen, base in (("J", "J"), ("I", "I")):
            mats[gen + vertex] = g @ _matrix(base, L, shape) @ g.inverse()
    return ConjugatedGenerators(L, mats, frames)


def _commutator(x: GroupElement, y: GroupElement) -> GroupElement:
    return x @ y - y @ x


def _deviation_from_identity(g: GroupElement):
    return g.deviation(GroupElement.identity(g.labels, g.shape))


def residual_loops(t: TriangleData, tol: float = DEFAULT_LAW_TOL) -> LawResidualReport:
    gens = conjugated_generators(t)
    e = gens.exp
    neg = lambda v: -np.asarray(v, float)  # noqa: E731
    Delta = neg(t.A) + t.B + t.C
    Delta_psi = neg(t.psi_A) + t.psi_B + t.psi_C
    delta = neg(t.a) + t.b + t.c
    delta_phi = neg(t.phi_a) + t.phi_b + t.phi_c
    tr = {
        "a": e("Pa", neg(t.a)) @ e("Ta", neg(t.phi_a)),
        "b": e("Pb", t.b) @ e("Tb", t.phi_b),
        "c": e("Pc", t.c) @ e("Tc", t.phi_c),
    }
    rot = {
        "A": e("JA", neg(t.A)) @ e("IA", neg(t.psi_A)),
        "B": e("JB", t.B) @ e("IB", t.psi_B),
        "C": e("JC", t.C) @ e("IC", t.psi_C),
    }
    report = LawResidualReport()
    point = {"C": "acb", "A": "bac", "B": "cba"}
    for n, v in enumerate("CAB", start=1):
        closing = e("J" + v, Delta) @ e("I" + v, Delta_psi)
        factors = [tr[side] for side in point[v]] + [closing]
        report.add(f"loop_point[{n}]", _loop_residual(factors), tol)
    line = {"c": "ACB", "a": "BAC", "b": "CBA"}
    for n, side in enumerate("cab", start=1):
        closing = e("P" + side, delta) @ e("T" + side, delta_phi)
        factors = [rot[v] for v in line[side]] + [closing]
        report.add(f"loop_line[{n}]", _loop_residual(factors), tol)
    return report


def _loop_residual(factors: list[GroupElement]):
    """Deviation of the ordered product from 1, relative to the largest factor."""
    prod = factors[0]
    scale = np.maximum(1.0, factors[0].max_abs())
    for f in factors[1:]:
        prod = prod @ f
        scale = np.maximum(scale, f.max_abs())
    return _deviation_from_identity(prod) / scale


def residual_compat(t: TriangleData, tol: float = DEFAULT_LAW_TOL) -> LawResidualReport:
    gens = conjugated_generators(t)
    e = gens.exp
    neg = lambda v: -np.asarray(v, float)  # noqa: E731
    m = gens.matrices
    report = LawResidualReport()
    # the two compatibility pairs not used as definitions
    g_b = e("JB", t.B) @ e("IB", t.psi_B)
    g_a = e("Pa", neg(t.a)) @ e("Ta", neg(t.phi_a))
    res = 0.0
    for gen in ("P", "T"):
        res = np.maximum(res, (g_b @ m[gen + "c"] @ g_b.inverse()).deviation(m[gen + "a"]))
    report.add("compat[Pa(Pc)]", res, tol)
    res = 0.0
    for gen in ("J", "I"):
        res = np.maximum(res, (g_a @ m[gen + "B"] @ g_a.inverse()).deviation(m[gen + "C"]))
    report.add("compat[JC(JB)]", res, tol)
    # cyclic closure: the product of the three complete rotations fixes P_a, T_a
    loop = g_b @ e("JA", neg(t.A)) @ e("IA", neg(t.psi_A)) @ e("JC", t.C) @ e("IC", t.psi_C)
    res = 0.0
    for gen in ("P", "T"):
        res = np.maximum(res, (loop @ m[gen + "a"] @ loop.inverse()).deviation(m[gen + "a"]))
    report.add("compat[cyclic_Pa]", res, tol)
    loop = g_a @ e("Pc", t.c) @ e("Tc", t.phi_c) @ e("Pb", t.b) @ e("Tb", t.phi_b)
    res = 0.0
    for gen in ("J", "I"):
        res = np.maximum(res, (loop @ m[gen + "C"] @ loop.inverse()).deviation(m[gen + "C"]))
    report.add("compat[cyclic_JC]", res, tol)
    # both members of every complete transformation commute
    res = 0.0
    for a_name, b_name in (("Pa", "Ta"), ("Pb", "Tb"), ("Pc", "Tc"), ("JA", "IA"), ("JB", "IB"), ("JC", "IC")):
        res = np.maximum(res, _commutator(m[a_name], m[b_name]).max_abs())
    report.add("compat[commute]", res, tol)
    return report


def full_suite(t: TriangleData, tol: float = DEFAULT_LAW_TOL, include_matrix: bool = True,
               quantities: Quantities | None = None) -> LawResidualReport:
    """Every applicable law on an array-valued or scalar triangle."""
    report = LawResidualReport()
    if include_matrix:
        report.add("basic_identity", residual_basic(t), tol)
    names = [k for k, law in LAWS.items() if law.group in ("nine", "final", "named", "contracted")]
    report.merge(evaluate_laws(t, names, tol, quantities))
    if include_matrix:
        report.merge(residual_loops(t, tol))
        report.merge(residual_compat(t, tol))
    return report


def quantities_from_record(rec: dict) -> tuple[TriangleData, Quantities]:
    """Triangle plus the fourteen quantities as stated by a record.

    A stored omega (Omega) fixes S (s) whenever kappa1 (kappa2) is nonzero, and
    a stored S or s is used as is otherwise; missing fields are recomputed.
    So a record whose excesses disagree with its phases fails the phase laws.
    """
    t = from_record(rec)
    q = Quantities.from_triangle(t)
    k1, k2 = t.labels.kappa1, t.labels.kappa2
    if k1 != 0 and "omega" in rec:
        q.S = np.asarray(float(rec["omega"]) / (2 * k1))
    elif "S" in rec:
        q.S = np.asarray(float(rec["S"]))
    if k2 != 0 and "Omega" in rec:
        q.s = np.asarray(float(rec["Omega"]) / (2 * k2))
    elif "s" in rec:
        q.s = np.asarray(float(rec["s"]))
    return t, q


# ---------------------------------------------------------------------------
# independent equations and their Jacobian


def independent_set(labels: SpaceLabels) -> list[tuple[str, int, int]]:
    """Ten independent real equations as (law, cyclic index 1-3, pair number)."""
    k1, k2, eta = labels.kappa1, labels.kappa2, labels.eta
    if k1 != 0 or k2 != 0:
        base = [("t0ij", 1, 0), ("t0ij", 2, 0), ("omega_def", 1, 0), ("Omega_def", 1, 0)]
        if k1 != 0 and k2 != 0:
            cosine = "t1i"
        elif k1 == 0:
            cosine = "t1i_prime"
        else:
            cosine = "t1I_prime"
        return base + [(cosine, n, part) for n in (1, 2, 3) for part in (0, 1)]
    name = "zero_eta_nonzero" if eta != 0 else "zero_eta_zero"
    eqs = [(name, n, 0) for n in (1, 2, 3)] + [(name, n, 1) for n in (1, 2)]
    if eta != 0:
        # Re1i' for every index, one Im1i' and one Im1I' (Re1I' is equivalent)
        eqs += [(name, n, 2) for n in (1, 2, 3)] + [(name, 1, 3), (name, 1, 5)]
    else:
        eqs += [(name, 1, 2), (name, 1, 4), (name, 2, 4), (name, 1, 5), (name, 1, 6)]
    return eqs


def independent_residuals(labels: SpaceLabels, vector) -> np.ndarray:
    """Signed residuals (lhs - rhs) of the independent set at a 14-vector."""
    q = Quantities.from_vector(labels, vector)
    out = []
    for name, n, part in independent_set(labels):
        lhs, rhs = LAWS[name].pairs(q, CYCLIC[n - 1])[part]
        out.append(np.asarray(lhs, float) - np.asarray(rhs, float))
    return np.stack([np.broadcast_to(v, np.shape(q.S)) for v in out])


def jacobian_rank(labels: SpaceLabels, vector, step: float = 1e-6, rel: float = 1e-6):
    """Numerical rank of the independent-set Jacobian (central differences).

    ``vector`` has shape (14,) or (14, n); returns (ranks, singular values).
    """
    v = np.asarray(vector, float)
    single = v.ndim == 1
    if single:
        v = v[:, None]
    cols = []
    for m in range(14):
        dv = np.zeros_like(v)
        dv[m] = step
        cols.append((independent_residuals(labels, v + dv) - independent_residuals(labels, v - dv)) / (2 * step))
    jac = np.stack(cols, axis=1)  # (10, 14, n)
    sv = np.linalg.svd(np.moveaxis(jac, -1, 0), compute_uv=False)  # (n, 10)
    ranks = np.sum(sv > rel * sv[:, :1], axis=1)
    return (int(ranks[0]), sv[0]) if single else (ranks, sv)


def gramm_consistency(t: TriangleData):
    """|Delta_g - kappa1^2 gamma| and the dual; both vanish identically."""
    eta, k1, k2 = t.labels.as_tuple()
    return np.abs(gramm_determinant(t) - k1**2 * gramm_gamma(t)), np.abs(
        _Gamma_from_det(t) - k2**2 * gramm_Gamma(t)
    )


def _Gamma_from_det(t: TriangleData):
    eta, k1, k2 = t.labels.as_tuple()
    C = [cosk(k2, v) for v in t.X]
    Omega = t.phi[0] + t.phi[1] + t.psi[2]
    return 1 - sum(c * c for c in C) + 2 * C[0] * C[1] * C[2] * cosk(eta, Omega)


def max_residual(report: LawResidualReport) -> float:
    return report.worst()[1]


__all__ = [
    "CYCLIC", "LAWS", "Law", "LawEntry", "LawResidualReport", "NotSpecial", "Quantities",
    "conjugated_generators", "evaluate_laws", "full_suite", "independent_residuals", "independent_set",
    "quantities_from_record",
    "jacobian_rank", "law_ids", "residual_basic", "residual_compat", "residual_contracted",
    "residual_final", "residual_loops", "residual_named", "residual_nine", "residual_special",
]

