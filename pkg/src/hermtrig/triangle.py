"""Triangles: construction from canonical data and the twelve invariants.

A triangle is encoded by the group identity

    exp(-A J) exp(-psi_A I) exp(c P) exp(phi_c T) exp(B J) exp(psi_B I)
        = exp(-b P) exp(-phi_b T) exp(-C J) exp(-psi_C I) exp(a P) exp(phi_a T)

with P = P1, T = T1.  ``solve`` builds the right-hand side and factors it
into the left-hand side.  The signed compact notation used by the laws is
x = (-a, b, c), X = (-A, B, C), phi = (-phi_a, phi_b, phi_c),
psi = (-psi_A, psi_B, psi_C).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .group import GroupElement, Ray, act, hermitian_form, one_param
from .scalars import (
    DEFAULT_TOL,
    CDScalar,
    InconsistentPair,
    NoRealArgument,
    SpaceLabels,
    arck,
    cd_arg,
    cosk,
    dual_labels,
    sink,
    versink,
)


class DegenerateTriangle(ValueError):
    """Side c (or every side) vanishes, or c sits on the cut locus."""


class ResidualTooLarge(ArithmeticError):
    pass


class InconsistentPhases(ValueError):
    """Supplied lateral phases do not close a triangle with the other data."""


class CutLocus(ValueError):
    pass


class UnsupportedLabels(ValueError):
    pass


# Which entries of the factored product carry which invariant.  Column 0 of
# the product L and column 0 of its inverse:
#   L[0,0] = C(c) u1        L[1,0] =  S(c) C(A) u3     L[2,0] = -S(c) S(A) u3
#   Li[0,0] = C(c) conj(u1) Li[1,0] = -S(c) C(B) conj(u2) Li[2,0] = S(c) S(B) conj(u2)
# with u_k = exp(i theta_k) and the phase combinations below (rows give the
# coefficients of psi_A, psi_B, phi_c, divided by 3).
ENTRY_TABLE = {
    ("L", 0, 0): ("C1(c)", "u1"),
    ("L", 1, 0): ("S1(c)*C2(A)", "u3"),
    ("L", 2, 0): ("-S1(c)*S2(A)", "u3"),
    ("Linv", 0, 0): ("C1(c)", "conj(u1)"),
    ("Linv", 1, 0): ("-S1(c)*C2(B)", "conj(u2)"),
    ("Linv", 2, 0): ("S1(c)*S2(B)", "conj(u2)"),
}
PHASE_COMBOS = {
    "u1": (2, -2, -1),
    "u2": (2, 1, -1),
    "u3": (-1, -2, -1),
}


FIELDS = ("a", "b", "c", "phi_a", "phi_b", "phi_c", "A", "B", "C", "psi_A", "psi_B", "psi_C")


@dataclass(frozen=True)
class TriangleData:
    """The twelve invariants.  Fields may be floats or equally shaped arrays."""

    labels: SpaceLabels
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    phi_a: float = 0.0
    phi_b: float = 0.0
    phi_c: float = 0.0
    A: float = 0.0
    B: float = 0.0
    C: float = 0.0
    psi_A: float = 0.0
    psi_B: float = 0.0
    psi_C: float = 0.0

    @property
    def x(self):
        return (-self.a, self.b, self.c)

    @property
    def X(self):
        return (-self.A, self.B, self.C)

    @property
    def phi(self):
        return (-self.phi_a, self.phi_b, self.phi_c)

    @property
    def psi(self):
        return (-self.psi_A, self.psi_B, self.psi_C)

    @classmethod
    def from_compact(cls, labels, x, X, phi, psi) -> "TriangleData":
        return cls(
            labels,
            a=-x[0], b=x[1], c=x[2],
            phi_a=-phi[0], phi_b=phi[1], phi_c=phi[2],
            A=-X[0], B=X[1], C=X[2],
            psi_A=-psi[0], psi_B=psi[1], psi_C=psi[2],
        )

    def values(self) -> dict:
        return {name: getattr(self, name) for name in FIELDS}

    def with_values(self, **changes) -> "TriangleData":
        return replace(self, **changes)

    def __len__(self) -> int:
        return int(np.size(self.a))

    def __getitem__(self, idx) -> "TriangleData":
        """Element (scalar triangle) or slice (array triangle) of a batch."""
        picked = {k: np.asarray(v)[idx] for k, v in self.values().items()}
        if np.ndim(picked["a"]) == 0:
            picked = {k: float(v) for k, v in picked.items()}
        return TriangleData(self.labels, **picked)


def stack(triangles: list[TriangleData]) -> TriangleData:
    """Combine same-label triangles into one array-valued TriangleData."""
    labels = triangles[0].labels
    if any(t.labels != labels for t in triangles):
        raise ValueError("cannot stack triangles with different labels")
    return TriangleData(labels, **{k: np.array([getattr(t, k) for t in triangles]) for k in FIELDS})


# ---------------------------------------------------------------------------
# group products


def right_product(a, phi_a, b, phi_b, C, psi_C, labels) -> GroupElement:
    """exp(-bP) exp(-phi_b T) exp(-C J) exp(-psi_C I) exp(aP) exp(phi_a T)."""
    return (
        one_param("P1", -np.asarray(b), labels)
        @ one_param("T1", -np.asarray(phi_b), labels)
        @ one_param("J", -np.asarray(C), labels)
        @ one_param("I", -np.asarray(psi_C), labels)
        @ one_param("P1", a, labels)
        @ one_param("T1", phi_a, labels)
    )


def left_product(A, psi_A, c, phi_c, B, psi_B, labels) -> GroupElement:
    """exp(-A J) exp(-psi_A I) exp(cP) exp(phi_c T) exp(B J) exp(psi_B I)."""
    return (
        one_param("J", -np.asarray(A), labels)
        @ one_param("I", -np.asarray(psi_A), labels)
        @ one_param("P1", c, labels)
        @ one_param("T1", phi_c, labels)
        @ one_param("J", B, labels)
        @ one_param("I", psi_B, labels)
    )


def basic_product(t: TriangleData) -> GroupElement:
    """The twelve-factor product of the basic identity (should be 1)."""
    L = t.labels
    return (
        one_param("P1", -np.asarray(t.a), L)
        @ one_param("T1", -np.asarray(t.phi_a), L)
        @ one_param("J", t.C, L)
        @ one_param("I", t.psi_C, L)
        @ one_param("P1", t.b, L)
        @ one_param("T1", t.phi_b, L)
        @ one_param("J", -np.asarray(t.A), L)
        @ one_param("I", -np.asarray(t.psi_A), L)
        @ one_param("P1", t.c, L)
        @ one_param("T1", t.phi_c, L)
        @ one_param("J", t.B, L)
        @ one_param("I", t.psi_B, L)
    )


# ---------------------------------------------------------------------------
# solving

OK, NO_REAL, DEGENERATE, RESIDUAL, INCONSISTENT = range(5)
_REASONS = {
    NO_REAL: (NoRealArgument, "no real factorization for these data"),
    DEGENERATE: (DegenerateTriangle, "S(c) vanishes or c is on the cut locus; angles are not separable"),
    RESIDUAL: (ResidualTooLarge, "factorization residual exceeds tolerance"),
    INCONSISTENT: (InconsistentPhases, "supplied lateral phase does not close the triangle"),
}


def _period(eta: float) -> float:
    return 2 * math.pi / math.sqrt(eta) if eta > 0 else math.inf


def _wrap(value, width: float):
    """Representative of value modulo width in (-width/2, width/2]."""
    if not math.isfinite(width):
        return value
    out = np.mod(np.asarray(value, dtype=float) + width / 2, width)
    out = np.where(out <= 0, out + width, out)
    return out - width / 2


def _polar(z: CDScalar, eta: float):
    """z = r u with r >= 0 and u unimodular; valid where the eta-modulus is positive."""
    m2 = z.modulus_sq(eta)
    valid = m2 > 0
    r = np.sqrt(np.where(valid, m2, 1.0))
    return valid, r, z.scale(1.0 / r)


def _arg(u: CDScalar, eta: float):
    """Vectorized cd_arg for unimodular u; (valid, angle)."""
    if eta > 0:
        root = math.sqrt(eta)
        return np.ones(np.shape(u.re), bool), np.arctan2(root * u.im, u.re) / root
    valid = u.re > 0
    if eta < 0:
        root = math.sqrt(-eta)
        return valid, np.arcsinh(root * u.im) / root
    return valid, np.asarray(u.im, dtype=float)


def _arck(label: float, c, s, tol: float = 1e-7):
    """Vectorized arck; (valid, value)."""
    scale = np.maximum(1.0, np.maximum(np.abs(c), abs(label) * s * s))
    valid = np.abs(c * c + label * s * s - 1.0) <= tol * scale
    if label > 0:
        root = math.sqrt(label)
        return valid, np.arctan2(root * s, c) / root
    valid = valid & (c > 0)
    if label < 0:
        root = math.sqrt(-label)
        return valid, np.arcsinh(root * s) / root
    return valid, np.asarray(s, dtype=float)


def _pairs(v1: CDScalar, v2: CDScalar, eta: float, sign: float):
    """Write (v1, v2) = u (p, q) with p, q real and u unimodular.

    The component of larger eta-modulus fixes u up to ``sign``.
    """
    lead_first = v1.modulus_sq(eta) >= v2.modulus_sq(eta)
    lead = CDScalar(np.where(lead_first, v1.re, v2.re), np.where(lead_first, v1.im, v2.im))
    valid, _, u = _polar(lead, eta)
    u = u.scale(sign)
    uc = u.conj()
    return valid, u, v1.mul(uc, eta).re, v2.mul(uc, eta).re


def _closing(z: CDScalar, given, eta: float, scale):
    """Lateral phase candidates phi (two slots) making exp(i phi) z real.

    Returns (values[n, 2], usable[n, 2], code[n]).
    """
    n = np.shape(z.re)[0]
    size = np.hypot(z.re, z.im)
    free = size <= 1e-12 * np.maximum(1.0, scale)
    code = np.full(n, OK)
    have_given = given is not None
    g = np.zeros(n) if given is None else np.broadcast_to(np.asarray(given, dtype=float), (n,))
    with np.errstate(divide="ignore", invalid="ignore"):
        if eta > 0:
            root = math.sqrt(eta)
            half = math.pi / root
            base = _wrap(-np.arctan2(root * z.im, z.re) / root, half)
            alt = np.where(base != 0, base - np.copysign(half, base), half)
            k = (g - base) / half
            mismatch = np.abs(k - np.round(k)) * half > 1e-7 * np.maximum(1.0, np.abs(g))
        else:
            if eta < 0:
                root = math.sqrt(-eta)
                real = z.modulus_sq(eta) > 0
                base = -np.arctanh(np.where(real, root * z.im / z.re, 0.0)) / root
            else:
                real = z.re != 0
                base = -np.where(real, z.im / np.where(real, z.re, 1.0), 0.0)
            code = np.where(~free & ~real, NO_REAL, code)
            alt = base
            mismatch = np.abs(g - base) > 1e-7 * np.maximum(1.0, np.abs(base))
    values = np.stack([base, alt], axis=-1)
    usable = np.ones((n, 2), bool)
    if eta <= 0:
        usable[:, 1] = False
    if have_given:
        code = np.where(~free & mismatch & (code == OK), INCONSISTENT, code)
        values[:, 0] = g
        usable[:, 1] = False
    values[free, 0] = g[free]
    usable[free, 1] = False
    return values, usable, code, free


def _col0(m: GroupElement, r: int) -> CDScalar:
    return CDScalar(m.re[..., r, 0], m.im[..., r, 0])


@dataclass
class SolveBatch:
    """Result of solve_batch: array-valued triangles plus per-sample status."""

    triangles: TriangleData
    code: np.ndarray
    residual: np.ndarray
    scale: np.ndarray

    @property
    def ok(self) -> np.ndarray:
        return self.code == OK


def solve_batch(a, b, C, psi_C, labels: SpaceLabels, phi_a=None, phi_b=None,
                tol: float = DEFAULT_TOL) -> SolveBatch:
    """Vectorized solve.  Entries that fail carry NaN and a nonzero code."""
    a, b, C, psi_C = (np.atleast_1d(np.asarray(v, dtype=float)) for v in (a, b, C, psi_C))
    a, b, C, psi_C = np.broadcast_arrays(a, b, C, psi_C)
    n = a.shape[0]
    eta, k1, k2 = labels.as_tuple()
    n_mat = one_param("P1", -b, labels) @ one_param("J", -C, labels) @ one_param("I", -psi_C, labels) @ one_param("P1", a, labels)
    n_inv = n_mat.adjugate()
    scale_n = np.maximum(1.0, n_mat.max_abs())
    z_b = _col0(n_mat, 1).mul(_col0(n_mat, 2).conj(), eta)
    z_a = _col0(n_inv, 1).mul(_col0(n_inv, 2).conj(), eta)
    vals_a, use_a, code_a, free_a = _closing(z_a, phi_a, eta, scale_n**2)
    vals_b, use_b, code_b, free_b = _closing(z_b, phi_b, eta, scale_n**2)
    # with a free lateral phase the Cartan relation need not hold, so the
    # theta branches are enumerated and left to the residual
    free = free_a | free_b
    shifts = [(0, 0)]
    if eta > 0 and free.any():
        shifts += [(i, j) for i in range(3) for j in range(3) if (i, j) != (0, 0)]
    code = np.where(code_a != OK, code_a, code_b)

    # moduli do not depend on the lateral phases, so degeneracy is decided once
    v0, v1, v2 = (_col0(n_mat, r) for r in range(3))
    sc2 = v1.modulus_sq(eta) + k2 * v2.modulus_sq(eta)
    sc = np.sqrt(np.maximum(sc2, 0.0))
    code = np.where((code == OK) & (sc2 < -1e-12 * scale_n**2), NO_REAL, code)
    small = sc < 1e-7 * scale_n
    c0_valid, cabs, _ = _polar(v0, eta)
    code = np.where((code == OK) & ~c0_valid & ~small, NO_REAL, code)
    if k1 > 0:
        small = small | (cabs < 1e-6 * scale_n)

    period = _period(eta)
    signs = (1.0, -1.0)
    # a negative side is needed when kappa2 <= 0, and on a single complex
    # line it replaces a straight angle
    sine_signs = signs if (k2 <= 0 or free.any()) else (1.0,)
    cos_signs = signs if k1 > 0 else (1.0,)

    best_key = np.full(n, np.inf)
    best = np.full((n, 8), np.nan)  # pa, pb, A, psi_A, c, phi_c, B, psi_B
    best_res = np.full(n, np.inf)
    best_size = np.full(n, np.inf)
    best_scale = scale_n.copy()
    any_candidate = np.zeros(n, bool)

    def branch(theta, target):
        if math.isfinite(period):
            theta = theta + np.round((target - theta) / period) * period
        return np.abs(theta - target) <= 1e-6 * np.maximum(1.0, np.abs(target)), theta

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for ia, ib in itertools.product(range(2), range(2)):
            pa, pb = vals_a[:, ia], vals_b[:, ib]
            usable = use_a[:, ia] & use_b[:, ib] & (code == OK) & ~small
            if not usable.any():
                continue
            m_mat = one_param("T1", -pb, labels) @ n_mat @ one_param("T1", pa, labels)
            m_inv = m_mat.adjugate()
            scale = np.maximum(1.0, m_mat.max_abs())
            v0, v1, v2 = (_col0(m_mat, r) for r in range(3))
            w1, w2 = _col0(m_inv, 1), _col0(m_inv, 2)
            _, _, u1 = _polar(v0, eta)
            t2 = (2 * pa + pb - psi_C) / 3
            t3 = (-pa - 2 * pb - psi_C) / 3
            rank = np.abs(pa) + np.abs(pb)
            for sign_c, s_a, s_b, s_cos, (k2s, k3s) in itertools.product(
                sine_signs, signs, signs, cos_signs, shifts
            ):
                scs = sign_c * sc
                ok_a, u3, p, q = _pairs(v1, v2, eta, s_a)
                ok3, th3_raw = _arg(u3, eta)
                okb3, th3 = branch(th3_raw, t3)
                okA, A = _arck(k2, p / scs, -q / scs)
                ok_b, u2c, p, q = _pairs(w1, w2, eta, s_b)
                ok2, th2_raw = _arg(u2c, eta)
                th2_raw = -th2_raw
                okb2, th2 = branch(th2_raw, t2)
                okB, B = _arck(k2, -p / scs, q / scs)
                ok1, th1 = _arg(u1.scale(s_cos), eta)
                okc, c = _arck(k1, s_cos * cabs, scs)
                cartan = okb2 & okb3
                if (k2s, k3s) == (0, 0):
                    th2 = np.where(free, th2_raw, th2)
                    th3 = np.where(free, th3_raw, th3)
                    okb2, okb3 = okb2 | free, okb3 | free
                else:
                    th2 = th2_raw + k2s * period
                    th3 = th3_raw + k3s * period
                    okb2 = okb3 = free
                    cartan = branch(th2, t2)[0] & branch(th3, t3)[0]
                valid = (free | (k2 <= 0) | (sign_c > 0)) & usable & ok_a & ok3 & okb3 & okA & ok_b & ok2 & okb2 & okB & ok1 & okc
                if not valid.any():
                    continue
                any_candidate |= valid
                omega = -th1 - th2 - th3
                if math.isfinite(period):
                    wrapped = _wrap(omega, period)
                    th1 = th1 + (omega - wrapped)
                    omega = wrapped
                psi_A = th1 - th3
                psi_B = th2 - th1
                phi_c = th1 - 2 * th2 - 2 * th3
                res = left_product(A, psi_A, c, phi_c, B, psi_B, labels).deviation(m_mat) / scale
                good = valid & (res <= tol)
                # lexicographic: Cartan consistency, closing branch, |omega|,
                # then overall size
                key = np.where(cartan, 0.0, 1e9) + rank * 1e3 + np.abs(omega)
                size = (np.abs(psi_A) + np.abs(psi_B) + np.abs(phi_c)
                        + np.abs(A) + np.abs(B) + np.abs(c))
                take = good & (
                    (key < best_key - 1e-9) | ((np.abs(key - best_key) <= 1e-9) & (size < best_size))
                )
                if take.any():
                    best_key = np.where(take, key, best_key)
                    best_size = np.where(take, size, best_size)
                    best_scale = np.where(take, scale, best_scale)
                    best_res = np.where(take, res, best_res)
                    stacked = np.stack([pa, pb, A, psi_A, c, phi_c, B, psi_B], axis=-1)
                    best[take] = stacked[take]

    found = np.isfinite(best_key)
    code = np.where((code == OK) & small, DEGENERATE, code)
    code = np.where((code == OK) & ~found & any_candidate, RESIDUAL, code)
    code = np.where((code == OK) & ~found, NO_REAL, code)

    # zero-size triangles: the canonical product is the identity
    if small.any():
        pa0, pb0 = vals_a[:, 0], vals_b[:, 0]
        m_mat = one_param("T1", -pb0, labels) @ n_mat @ one_param("T1", pa0, labels)
        trivial = small & (m_mat.deviation(GroupElement.identity(labels, (n,))) <= tol * scale_n)
        trivial &= (code_a == OK) & (code_b == OK)
        best[trivial] = 0.0
        best[trivial, 0] = pa0[trivial]
        best[trivial, 1] = pb0[trivial]
        best_res = np.where(trivial, 0.0, best_res)
        code = np.where(trivial, OK, code)

    out = np.where((code == OK)[:, None], best, np.nan)
    tri = TriangleData(
        labels, a=a.copy(), b=b.copy(), c=out[:, 4], phi_a=out[:, 0], phi_b=out[:, 1], phi_c=out[:, 5],
        A=out[:, 2], B=out[:, 6], C=C.copy(), psi_A=out[:, 3], psi_B=out[:, 7], psi_C=psi_C.copy(),
    )
    return SolveBatch(tri, code, np.where(code == OK, best_res, np.nan), best_scale)


def solve(a, phi_a, b, phi_b, C, psi_C, labels: SpaceLabels, tol: float = DEFAULT_TOL) -> TriangleData:
    """Triangle with sides a, b, included angle C and angular phase psi_C.

    ``phi_a`` and ``phi_b`` may be None: they are then the closing phases
    fixed by the other data.  A supplied value must agree with a closing
    phase (modulo the half period when eta > 0) unless the data leave it free.
    """
    values = (a, b, C, psi_C) + tuple(v for v in (phi_a, phi_b) if v is not None)
    if not all(math.isfinite(float(v)) for v in values):
        raise ValueError("solve inputs must be finite")
    batch = solve_batch(a, b, C, psi_C, labels, phi_a=phi_a, phi_b=phi_b, tol=tol)
    code = int(batch.code[0])
    if code != OK:
        exc, message = _REASONS[code]
        raise exc(message)
    return batch.triangles[0]


def factor_residual(t: TriangleData):
    """Deviation between the rebuilt left product and the canonical right product."""
    L = t.labels
    lhs = left_product(t.A, t.psi_A, t.c, t.phi_c, t.B, t.psi_B, L)
    rhs = right_product(t.a, t.phi_a, t.b, t.phi_b, t.C, t.psi_C, L)
    return lhs.deviation(rhs)


# ---------------------------------------------------------------------------
# sampling


VALUE_RANGE = (0.2, 1.2)
PHASE_RANGE = (-0.8, 0.8)
# near-degenerate samples (tiny c with huge closing phases, as happens for
# a ~ b when eta = kappa2 = 0) are redrawn
MAX_PARAMETER = 50.0
# an extracted side this short forces angles of order 1/side when kappa2 <= 0
MIN_SIDE = 0.05


def collinear_phases(a, b, psi_C, labels: SpaceLabels):
    """Lateral phases making a C = 0 triangle satisfy the Cartan relations.

    On one complex line the identity fixes only a single combination of the
    lateral phases, while the angular phases come from the auxiliary real
    triangle.  A first solve with zero lateral phases gives psi_A, psi_B; the
    phases phi_i = psi_I - (psi_1 + psi_2 + psi_3)/2 (compact notation) follow.
    """
    zero = np.zeros(np.shape(np.atleast_1d(a)))
    first = solve_batch(a, b, zero, psi_C, labels, phi_a=zero, phi_b=zero).triangles
    total = first.psi_A + first.psi_B
    return (total + psi_C) / 2, (total - psi_C) / 2


def sample_batch(labels: SpaceLabels, count: int, seed: int = 0, kind: str = "generic",
                 max_rounds: int = 50) -> TriangleData:
    """``count`` solved triangles (array-valued) drawn by rejection sampling.

    kind: "generic" (closing lateral phases), "purely_real" (all input phases
    zero) or "collinear" (C = 0, lateral phases from ``collinear_phases``).
    """
    if kind not in ("generic", "purely_real", "collinear"):
        raise ValueError(f"unknown triangle kind {kind!r}")
    rng = np.random.default_rng(seed)
    kept: list[TriangleData] = []
    have = 0
    for _ in range(max_rounds):
        m = max(16, 2 * (count - have))
        a, b, C = (rng.uniform(*VALUE_RANGE, size=m) for _ in range(3))
        psi_C = rng.uniform(*PHASE_RANGE, size=m)
        phi_a = phi_b = None
        if kind == "purely_real":
            psi_C = np.zeros(m)
        elif kind == "collinear":
            C = np.zeros(m)
            phi_a, phi_b = collinear_phases(a, b, psi_C, labels)
        res = solve_batch(a, b, C, psi_C, labels, phi_a=phi_a, phi_b=phi_b)
        size = np.max(np.abs(np.stack(list(res.triangles.values().values()))), axis=0)
        with np.errstate(invalid="ignore"):
            keep = res.ok & (size <= MAX_PARAMETER) & (np.abs(res.triangles.c) >= MIN_SIDE)
        idx = np.flatnonzero(keep)[: count - have]
        kept.append(TriangleData(labels, **{k: v[idx] for k, v in res.triangles.values().items()}))
        have += idx.size
        if have == count:
            break
    else:
        raise RuntimeError(f"could not sample {count} {kind} triangles for {labels}")
    return TriangleData(labels, **{k: np.concatenate([t.values()[k] for t in kept]) for k in FIELDS})


def random_triangle(labels: SpaceLabels, rng: np.random.Generator, kind: str = "generic") -> TriangleData:
    return sample_batch(labels, 1, seed=int(rng.integers(2**31)), kind=kind)[0]


def corpus(labels: SpaceLabels, count: int, seed: int = 0, kind: str = "generic") -> list[TriangleData]:
    batch = sample_batch(labels, count, seed, kind)
    return [batch[i] for i in range(count)]


# ---------------------------------------------------------------------------
# derived invariants


def _idx(i):
    return i % 3, (i + 1) % 3, (i + 2) % 3


@dataclass(frozen=True)
class DerivedInvariants:
    omega: float
    Omega: float
    Delta: float
    delta: float
    Delta_psi: float
    delta_phi: float
    S: float
    s: float
    gamma: float
    Gamma: float
    tau: float
    xi: float
    Xi: float
    notes: dict = field(default_factory=dict)


def omega_of(t: TriangleData):
    x, X, phi, psi = t.x, t.X, t.phi, t.psi
    return psi[0] + psi[1] + phi[2]


def Omega_of(t: TriangleData):
    return t.phi[0] + t.phi[1] + t.psi[2]


def _pick(values):
    """Index of the largest |value| (scalar triangles) for quotient formulas."""
    mags = [float(np.max(np.abs(v))) for v in values]
    return int(np.argmax(mags))


def symplectic_area(t: TriangleData):
    """S with omega = 2 kappa1 S; uses the finite limit when kappa1 = 0."""
    eta, k1, k2 = t.labels.as_tuple()
    if k1 != 0:
        return omega_of(t) / (2 * k1)
    x, X, psi = t.x, t.X, t.psi
    # 2S = -x_j x_k C2(X_I) S_eta(psi_I) for every i; average for symmetry
    total = 0.0
    for i in range(3):
        i, j, k = _idx(i)
        total = total + (-x[j] * x[k] * cosk(k2, X[i]) * sink(eta, psi[i]))
    return total / 6.0


def symplectic_coarea(t: TriangleData):
    eta, k1, k2 = t.labels.as_tuple()
    if k2 != 0:
        return Omega_of(t) / (2 * k2)
    x, X, phi = t.x, t.X, t.phi
    total = 0.0
    for i in range(3):
        i, j, k = _idx(i)
        total = total + (-X[j] * X[k] * cosk(k1, x[i]) * sink(eta, phi[i]))
    return total / 6.0


def gramm_gamma(t: TriangleData, S=None):
    """Renormalized Gramm determinant of the sides, polynomial form."""
    eta, k1, k2 = t.labels.as_tuple()
    S = symplectic_area(t) if S is None else S
    V = [versink(k1, v) for v in t.x]
    Cs = [cosk(k1, v) for v in t.x]
    pair_sum = V[0] * V[1] + V[1] * V[2] + V[2] * V[0]
    return (
        2 * pair_sum
        - (V[0] ** 2 + V[1] ** 2 + V[2] ** 2)
        - 2 * eta * Cs[0] * Cs[1] * Cs[2] * versink(eta * k1 * k1, 2 * S)
        - 2 * k1 * V[0] * V[1] * V[2]
    )


def gramm_Gamma(t: TriangleData, s=None):
    eta, k1, k2 = t.labels.as_tuple()
    s = symplectic_coarea(t) if s is None else s
    V = [versink(k2, v) for v in t.X]
    Cs = [cosk(k2, v) for v in t.X]
    pair_sum = V[0] * V[1] + V[1] * V[2] + V[2] * V[0]
    return (
        2 * pair_sum
        - (V[0] ** 2 + V[1] ** 2 + V[2] ** 2)
        - 2 * eta * Cs[0] * Cs[1] * Cs[2] * versink(eta * k2 * k2, 2 * s)
        - 2 * k2 * V[0] * V[1] * V[2]
    )


def gramm_determinant(t: TriangleData):
    """Delta_g = 1 - sum C^2 + 2 prod C cos_eta(omega), the unrenormalized form."""
    eta, k1, _ = t.labels.as_tuple()
    Cs = [cosk(k1, v) for v in t.x]
    return 1 - sum(c * c for c in Cs) + 2 * Cs[0] * Cs[1] * Cs[2] * cosk(eta, omega_of(t))


def _ratio(num, den, what, notes):
    if abs(float(den)) <= 1e-12:
        if abs(float(num)) <= 1e-12:
            notes[what] = "indeterminate"
            return math.nan
        notes[what] = "infinite"
        return math.copysign(math.inf, float(num) * (1.0 if float(den) >= 0 else -1.0))
    return float(num / den)


def derived(t: TriangleData) -> DerivedInvariants:
    eta, k1, k2 = t.labels.as_tuple()
    x, X, phi, psi = t.x, t.X, t.phi, t.psi
    S = symplectic_area(t)
    s = symplectic_coarea(t)
    notes: dict = {}
    i = _pick([sink(k2, v) for v in X])
    tau = _ratio(sink(k1, x[i]), sink(k2, X[i]), "tau", notes)
    dens = [sink(eta, psi[k]) * cosk(k2, X[k]) for k in range(3)]
    i = _pick(dens)
    xi = _ratio(sink(k1, 2 * x[i]), dens[i], "xi", notes)
    dens = [sink(eta, phi[k]) * cosk(k1, x[k]) for k in range(3)]
    i = _pick(dens)
    Xi = _ratio(sink(k2, 2 * X[i]), dens[i], "Xi", notes)
    return DerivedInvariants(
        omega=float(omega_of(t)),
        Omega=float(Omega_of(t)),
        Delta=float(X[0] + X[1] + X[2]),
        delta=float(x[0] + x[1] + x[2]),
        Delta_psi=float(psi[0] + psi[1] + psi[2]),
        delta_phi=float(phi[0] + phi[1] + phi[2]),
        S=float(S),
        s=float(s),
        gamma=float(gramm_gamma(t, S)),
        Gamma=float(gramm_Gamma(t, s)),
        tau=tau,
        xi=xi,
        Xi=Xi,
        notes=notes,
    )


@dataclass(frozen=True)
class ExistenceEntry:
    value: float
    passed: bool
    applicable: bool = True


def existence_check(t: TriangleData, tol: float = 1e-12) -> dict[str, ExistenceEntry]:
    """Gramm-type inequalities; each value must be >= -tol."""
    eta, k1, k2 = t.labels.as_tuple()
    d = derived(t)
    out = {}

    def add(name, value, applicable=True):
        value = float(value)
        out[name] = ExistenceEntry(value, (value >= -tol) or not applicable, applicable)

    add("gamma_over_kappa2", d.gamma / k2 if k2 else 0.0, k2 != 0)
    add("Gamma_over_kappa1", d.Gamma / k1 if k1 else 0.0, k1 != 0)
    # quotient forms evaluated cross-multiplied: sign(num/den) = sign(num*den)
    psi_prod = sink(eta, t.psi[0]) * sink(eta, t.psi[1]) * sink(eta, t.psi[2])
    phi_prod = sink(eta, t.phi[0]) * sink(eta, t.phi[1]) * sink(eta, t.phi[2])
    add("coarea_phase_form", -sink(eta * k2 * k2, 2 * d.s) * psi_prod)
    add("area_phase_form", -sink(eta * k1 * k1, 2 * d.S) * phi_prod)
    return out


# ---------------------------------------------------------------------------
# special triangles and duality


def classify_special(t: TriangleData, tol: float = 1e-9) -> str:
    eta, k1, k2 = t.labels.as_tuple()

    def small(values, label):
        return all(abs(float(sink(label, v))) <= tol for v in values)

    if small(t.X, k2):
        return "collinear"
    if small(t.x, k1):
        return "concurrent"
    if small(t.phi, eta) and small(t.psi, eta):
        return "purely_real"
    return "generic"


def dual_triangle(t: TriangleData) -> TriangleData:
    """Swap sides with angles and lateral with angular phases; kappa1 <-> kappa2."""
    return TriangleData(
        dual_labels(t.labels),
        a=t.A, b=t.B, c=t.C, phi_a=t.psi_A, phi_b=t.psi_B, phi_c=t.psi_C,
        A=t.a, B=t.b, C=t.c, psi_A=t.phi_a, psi_B=t.phi_b, psi_C=t.phi_c,
    )


# ---------------------------------------------------------------------------
# vertices


@dataclass(frozen=True)
class VertexTriangle:
    a: float
    b: float
    c: float
    omega: float
    sigma: float
    cos2_A: float
    cos2_B: float
    cos2_C: float
    epsilon: tuple[float, float, float]


def canonical_vertices(t: TriangleData) -> tuple[Ray, Ray, Ray]:
    """Rays of the three vertices with C at the origin O."""
    L = t.labels
    origin = Ray.origin(L)
    z_c = origin
    z_b = act(one_param("P1", t.a, L), origin)
    z_a = act(one_param("J", t.C, L) @ one_param("I", t.psi_C, L) @ one_param("P1", t.b, L), origin)
    return z_a, z_b, z_c


def _side_from_product(p: CDScalar, k1: float) -> tuple[float, float]:
    """(side, epsilon) from <z|w> = C(side) exp(i epsilon), eta = 1."""
    mod = math.hypot(float(p.re), float(p.im))
    if mod <= 1e-12:
        raise CutLocus("vanishing hermitian product")
    eps = math.atan2(float(p.im), float(p.re))
    s2 = (1 - mod * mod) / k1
    side = arck(k1, mod, math.sqrt(max(s2, 0.0)), tol=1e-7)
    return side, eps


def _tangent(z: Ray, w: Ray) -> Ray:
    """Component of w orthogonal to z (hermitian projection)."""
    zz = hermitian_form(z, z)
    zw = hermitian_form(z, w)
    coeff = CDScalar(zw.re / zz.re, zw.im / zz.re)
    zc = z.scale_by(coeff)
    return Ray(w.re - zc.re, w.im - zc.im, w.labels)


def _hermitian_angle_cos2(at: Ray, p: Ray, q: Ray) -> float:
    tp, tq = _tangent(at, p), _tangent(at, q)
    pq = hermitian_form(tp, tq)
    pp, qq = hermitian_form(tp, tp), hermitian_form(tq, tq)
    return float((pq.re**2 + pq.im**2) / (pp.re * qq.re))


def from_vertices(z_a: Ray, z_b: Ray, z_c: Ray, labels: SpaceLabels) -> VertexTriangle:
    """Sides, omega and the shape invariant from three rays (eta = 1, kappa2 = 1)."""
    eta, k1, k2 = labels.as_tuple()
    if eta != 1 or k2 != 1 or k1 == 0:
        raise UnsupportedLabels(f"from_vertices needs (1; k1 != 0, 1), got {labels}")
    z_a, z_b, z_c = z_a.normalized(), z_b.normalized(), z_c.normalized()
    # vertex products are taken linear in the first slot: <z|w> here is
    # hermitian_form(w, z)
    p_bc = hermitian_form(z_c, z_b)
    p_ca = hermitian_form(z_a, z_c)
    p_ab = hermitian_form(z_b, z_a)
    a, eps_a = _side_from_product(p_bc, k1)
    b, eps_b = _side_from_product(p_ca, k1)
    c, eps_c = _side_from_product(p_ab, k1)
    triple = p_ab.mul(p_bc, 1.0).mul(p_ca, 1.0)
    omega = math.atan2(float(triple.im), float(triple.re))
    sigma = float(triple.re) if k1 > 0 else -float(triple.re)
    if a == 0 or b == 0 or c == 0:
        cos2 = (1.0, 1.0, 1.0)
    else:
        cos2 = (
            _hermitian_angle_cos2(z_a, z_b, z_c),
            _hermitian_angle_cos2(z_b, z_c, z_a),
            _hermitian_angle_cos2(z_c, z_a, z_b),
        )
    return VertexTriangle(a, b, c, omega, sigma, *cos2, epsilon=(eps_a, eps_b, eps_c))


# ---------------------------------------------------------------------------
# records

RECORD_FIELDS = (
    "eta", "kappa1", "kappa2", "a", "b", "c", "phi_a", "phi_b", "phi_c",
    "A", "B", "C", "psi_A", "psi_B", "psi_C", "omega", "Omega", "S", "s",
    "gamma", "Gamma", "residual",
)


def residual_basic(t: TriangleData):
    return basic_product(t).deviation(GroupElement.identity(t.labels))


def to_record(t: TriangleData) -> dict:
    d = derived(t)
    eta, k1, k2 = t.labels.as_tuple()
    rec = {"eta": eta, "kappa1": k1, "kappa2": k2}
    rec.update({k: float(v) for k, v in t.values().items()})
    rec.update(
        omega=d.omega, Omega=d.Omega, S=d.S, s=d.s, gamma=d.gamma, Gamma=d.Gamma,
        residual=float(residual_basic(t)),
    )
    return {k: rec[k] for k in RECORD_FIELDS}


def from_record(rec: dict) -> TriangleData:
    """Rebuild the twelve invariants; derived fields are recomputed, not trusted."""
    missing = [k for k in ("eta", "kappa1", "kappa2", *FIELDS) if k not in rec]
    if missing:
        raise KeyError(f"record lacks fields {missing}")
    labels = SpaceLabels(float(rec["eta"]), float(rec["kappa1"]), float(rec["kappa2"]))
    return TriangleData(labels, **{k: float(rec[k]) for k in FIELDS})


def dumps(t: TriangleData) -> str:
    return json.dumps(to_record(t), indent=2)
