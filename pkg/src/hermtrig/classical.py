"""Classical vertex invariants of CP2 / CH2 and the historically named laws.

A triangle produced by the core at labels (1; k1, 1) carries signed angles
X_I and angular phases psi_I.  Classical authors use sides in [0, inf) and, at
each vertex, the hermitian angle (in [0, pi/2]) together with the Kasner
pseudoangle, or the Fubini-Study angle and the holomorphy inclination.  The
conversion folds the signs of the core quantities into the pseudoangle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .laws import CYCLIC, LawResidualReport, pair_residual
from .scalars import SpaceLabels, cosk, sink
from .triangle import TriangleData, UnsupportedLabels, canonical_vertices, from_vertices

CLASSICAL_TOL = 1e-9


class Indeterminate(ValueError):
    """The holomorphy inclination is undefined (sin of the FS angle vanishes)."""


@dataclass(frozen=True)
class VertexAngles:
    hermitian: object  # C, angle between the sides as complex lines
    pseudo: object  # Kasner pseudoangle psi
    fs_angle: object  # riemannian Fubini-Study angle
    incl: object  # holomorphy (Kahler) inclination
    theta: object  # sin(theta) = sin(fs_angle) cos(incl)

    @property
    def Psi(self):
        return np.pi / 2 - self.theta

    def relation_residual(self):
        """Largest violation of the three pairs of vertex relations."""
        C, psi, fs, inc, th = self.hermitian, self.pseudo, self.fs_angle, self.incl, self.theta
        terms = [
            np.cos(fs) - np.cos(C) * np.cos(psi),
            np.cos(inc) * np.sin(fs) - np.cos(C) * np.sin(psi),
            np.sin(C) - np.sin(fs) * np.sin(inc),
            np.sin(th) - np.sin(fs) * np.cos(inc),
            np.cos(C) ** 2 - np.cos(fs) ** 2 - np.sin(fs) ** 2 * np.cos(inc) ** 2,
            np.sin(fs) ** 2 - np.sin(C) ** 2 - np.sin(th) ** 2,
        ]
        return np.max(np.abs(np.stack(np.broadcast_arrays(*terms))), axis=0)


def convert_vertex(C, psi, strict: bool = True) -> VertexAngles:
    """FS angle, inclination and theta from the hermitian angle and pseudoangle.

    With ``strict`` a vanishing sin(fs_angle) raises Indeterminate; otherwise
    the inclination is NaN there.
    """
    C = np.asarray(C, float)
    psi = np.asarray(psi, float)
    # atan2 form: 1 - cos^2 C cos^2 psi = sin^2 C + cos^2 C sin^2 psi, no cancellation near 0
    fs = np.arctan2(np.hypot(np.sin(C), np.cos(C) * np.sin(psi)), np.cos(C) * np.cos(psi))
    singular = np.abs(np.sin(fs)) < 1e-12
    if strict and np.any(singular):
        raise Indeterminate("holomorphy inclination undefined when sin(fs_angle) = 0")
    incl = np.arctan2(np.sin(C), np.cos(C) * np.sin(psi))
    incl = np.where(singular, np.nan, incl)
    theta = np.arcsin(np.clip(np.cos(C) * np.sin(psi), -1.0, 1.0))
    if C.ndim == 0 and psi.ndim == 0:
        return VertexAngles(float(C), float(psi), float(fs), float(incl), float(theta))
    return VertexAngles(C, psi, fs, incl, theta)


def sectional_curvature(incl, sign: float = 1.0):
    """Sectional curvature along a real 2-direction of given inclination."""
    return np.copysign(1.0, sign) * (4 * np.cos(incl) ** 2 + np.sin(incl) ** 2)


def _require(labels: SpaceLabels) -> None:
    if labels.eta != 1 or labels.kappa2 != 1 or labels.kappa1 not in (1.0, -1.0):
        raise UnsupportedLabels(f"classical laws need labels (1; +-1, 1), got {labels}")


@dataclass
class ClassicalTriangle:
    """Classical description of a core triangle at labels (1; +-1, 1)."""

    labels: SpaceLabels
    sides: list  # |x_i|
    vertices: list  # VertexAngles at A, B, C
    omega: object  # BT omega for the classical (nonnegative-cosine) conventions
    Omega: object


def _wrap_pi(v):
    return np.mod(v + np.pi, 2 * np.pi) - np.pi


def to_classical(t: TriangleData, strict: bool = True) -> ClassicalTriangle:
    _require(t.labels)
    k1 = t.labels.kappa1
    x = [np.asarray(v, float) for v in t.x]
    X = [np.asarray(v, float) for v in t.X]
    psi = [np.asarray(v, float) for v in t.psi]
    sgn = [np.where(v < 0, -1.0, 1.0) for v in x]
    vertices = []
    for i, j, k in CYCLIC:
        cosX = np.cos(X[i])
        flip = -sgn[j] * sgn[k] * np.where(cosX < 0, -1.0, 1.0)
        pseudo = _wrap_pi(psi[i] + np.where(flip < 0, np.pi, 0.0))
        vertices.append(convert_vertex(np.arccos(np.clip(np.abs(cosX), 0.0, 1.0)), pseudo, strict))
    omega = t.psi[0] + t.psi[1] + t.phi[2]
    Omega = t.phi[0] + t.phi[1] + t.psi[2]
    neg_sides = np.prod([np.where(cosk(k1, v) < 0, -1.0, 1.0) for v in x], axis=0)
    neg_angles = np.prod([np.where(np.cos(v) < 0, -1.0, 1.0) for v in X], axis=0)
    omega = _wrap_pi(omega + np.where(neg_sides < 0, np.pi, 0.0))
    Omega = _wrap_pi(Omega + np.where(neg_angles < 0, np.pi, 0.0))
    return ClassicalTriangle(t.labels, [np.abs(v) for v in x], vertices, omega, Omega)


def _laws(ct: ClassicalTriangle) -> dict[str, list]:
    k1 = ct.labels.kappa1
    Cs = lambda v: cosk(k1, v)  # noqa: E731
    Sn = lambda v: sink(k1, v)  # noqa: E731
    s, V = ct.sides, ct.vertices
    cosH = [np.cos(v.hermitian) for v in V]
    sinH = [np.sin(v.hermitian) for v in V]
    out: dict[str, list] = {}
    for n, (i, j, k) in enumerate(CYCLIC, start=1):
        vi, vj = V[i], V[j]
        out[f"coolidge_sine[{n}]"] = [(Sn(s[i]) * sinH[j], Sn(s[j]) * sinH[i])]
        out[f"sr_sine[{n}]"] = [(
            Sn(s[i]) * np.sin(vj.fs_angle) * np.sin(vj.incl),
            Sn(s[j]) * np.sin(vi.fs_angle) * np.sin(vi.incl),
        )]
        out[f"sr_sine2[{n}]"] = [(
            Sn(2 * s[i]) * np.sin(vj.fs_angle) * np.cos(vj.incl),
            Sn(2 * s[j]) * np.sin(vi.fs_angle) * np.cos(vi.incl),
        )]
        fs, inc = vi.fs_angle, vi.incl
        ss = Sn(s[j]) * Sn(s[k])
        out[f"sr_cos[{n}]"] = [(
            Cs(s[i]) ** 2,
            (Cs(s[j]) * Cs(s[k]) + k1 * ss * np.cos(fs)) ** 2 + (ss * np.cos(inc) * np.sin(fs)) ** 2,
        )]
        out[f"sr_cos2[{n}]"] = [(
            Cs(2 * s[i]),
            Cs(2 * s[j]) * Cs(2 * s[k]) + k1 * Sn(2 * s[j]) * Sn(2 * s[k]) * np.cos(fs)
            - 2 * (ss * np.sin(inc) * np.sin(fs)) ** 2,
        )]
        # BT laws cross-multiplied by the squared sines
        out[f"bt_cos[{n}]"] = [(
            Cs(s[i]) ** 2 * sinH[j] ** 2 * sinH[k] ** 2,
            cosH[i] ** 2 + cosH[j] ** 2 * cosH[k] ** 2 - 2 * cosH[i] * cosH[j] * cosH[k] * np.cos(ct.Omega),
        )]
        out[f"bt_dualcos[{n}]"] = [(
            cosH[i] ** 2 * (k1 * ss) ** 2,
            Cs(s[i]) ** 2 + Cs(s[j]) ** 2 * Cs(s[k]) ** 2
            - 2 * Cs(s[i]) * Cs(s[j]) * Cs(s[k]) * np.cos(ct.omega),
        )]
        out[f"brehm_sine[{n}]"] = out[f"coolidge_sine[{n}]"]
        out[f"brehm_sine2[{n}]"] = [(Sn(2 * s[i]) * np.sin(vj.theta), Sn(2 * s[j]) * np.sin(vi.theta))]
        out[f"brehm_cos2[{n}]"] = [(
            Cs(2 * s[i]),
            Cs(2 * s[j]) * Cs(2 * s[k]) + k1 * Sn(2 * s[j]) * Sn(2 * s[k]) * np.cos(fs)
            - 2 * ss**2 * sinH[i] ** 2,
        )]
    return out


def check_classical(t: TriangleData, tol: float = CLASSICAL_TOL, with_vertices: bool = True) -> LawResidualReport:
    """Residuals of the classical CP2/CH2 laws on a core triangle."""
    ct = to_classical(t)
    report = LawResidualReport()
    for key, pairs in _laws(ct).items():
        res = np.max(np.stack([np.broadcast_to(pair_residual(l, r), np.shape(ct.omega)) for l, r in pairs]), axis=0)
        report.add(key, res, tol)
    report.add("angle_relations", np.max([v.relation_residual() for v in ct.vertices], axis=0), tol)
    if with_vertices:
        report.add("shape_invariant", shape_invariant_mismatch(t), tol)
    return report


def shape_invariant(t: TriangleData):
    """Brehm's shape invariant from sides and omega."""
    _require(t.labels)
    k1 = t.labels.kappa1
    omega = t.psi[0] + t.psi[1] + t.phi[2]
    prod = cosk(k1, t.a) * cosk(k1, t.b) * cosk(k1, t.c) * np.cos(omega)
    return prod if k1 > 0 else -prod


def shape_invariant_from_rays(z_a, z_b, z_c, labels: SpaceLabels) -> float:
    _require(labels)
    return from_vertices(z_a, z_b, z_c, labels).sigma


def shape_invariant_mismatch(t: TriangleData):
    """|sigma(canonical path) - sigma(vertex triple product)| per triangle."""
    sig = np.atleast_1d(shape_invariant(t))
    out = np.zeros(sig.shape)
    batch = np.ndim(t.a) > 0
    for n in range(sig.size):
        single = t[n] if batch else t
        rays = canonical_vertices(single)
        out[n] = abs(sig[n] - shape_invariant_from_rays(*rays, t.labels))
    return out if batch else float(out[0])


__all__ = [
    "ClassicalTriangle", "Indeterminate", "VertexAngles", "check_classical", "convert_vertex",
    "sectional_curvature", "shape_invariant", "shape_invariant_from_rays", "to_classical",
]

