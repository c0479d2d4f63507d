"""Space labels, Cayley-Dickson scalars over C_eta and labeled trigonometry.

Every function here accepts plain floats or numpy arrays for the real
arguments; labels are always scalars.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9


class PoleError(ZeroDivisionError):
    """Labeled tangent evaluated where the labeled cosine vanishes."""


class NotUnimodular(ValueError):
    """A scalar expected to have unit eta-modulus does not."""


class NoRealArgument(ValueError):
    """A unimodular scalar is not of the form exp(i x) for real x."""


class InconsistentPair(ValueError):
    """A (cosine, sine) pair does not satisfy c^2 + label s^2 = 1."""


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class SpaceLabels:
    """The triple (eta; kappa1, kappa2) selecting one of the geometries."""

    eta: float
    kappa1: float
    kappa2: float

    def __post_init__(self):
        for name in ("eta", "kappa1", "kappa2"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"label {name} must be finite, got {value!r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.eta, self.kappa1, self.kappa2)

    def __str__(self) -> str:
        return f"({self.eta:g};{self.kappa1:g},{self.kappa2:g})"

    @classmethod
    def parse(cls, text: str) -> "SpaceLabels":
        """Parse ``"eta,k1,k2"`` (semicolons also accepted)."""
        parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
        if len(parts) != 3:
            raise ValueError(f"expected three labels, got {text!r}")
        return cls(*(float(p) for p in parts))


def normalize(labels: SpaceLabels) -> SpaceLabels:
    return SpaceLabels(*(float(_sign(v)) for v in labels.as_tuple()))


def dual_labels(labels: SpaceLabels) -> SpaceLabels:
    return SpaceLabels(labels.eta, labels.kappa2, labels.kappa1)


def all_normalized_labels() -> list[SpaceLabels]:
    """The 27 triples with entries in {1, 0, -1}."""
    values = (1.0, 0.0, -1.0)
    return [SpaceLabels(e, k1, k2) for e in values for k1 in values for k2 in values]


_PREFIX = {1: "Complex Hermitian", 0: "Parabolic Complex Hermitian", -1: "Split Complex Hermitian"}

_BASE = {
    (1, 1): "Elliptic",
    (0, 1): "Euclidean",
    (-1, 1): "Hyperbolic",
    (1, 0): "Co-Euclidean (Oscillating Newton-Hooke)",
    (0, 0): "Galilean",
    (-1, 0): "Co-Minkowskian (Expanding Newton-Hooke)",
    (1, -1): "Co-Hyperbolic (Anti-de Sitter)",
    (0, -1): "Minkowskian",
    (-1, -1): "Doubly Hyperbolic (De Sitter)",
}


def classify(labels: SpaceLabels) -> str:
    """Geometry name of a (normalized) label triple."""
    eta, k1, k2 = (_sign(v) for v in labels.as_tuple())
    return f"{_PREFIX[eta]} {_BASE[(k1, k2)]}"


@dataclass(frozen=True)
class CDScalar:
    """re + i*im with i^2 = -eta; eta comes from the calling context."""

    re: float
    im: float = 0.0

    def __add__(self, other: "CDScalar") -> "CDScalar":
        return CDScalar(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "CDScalar") -> "CDScalar":
        return CDScalar(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "CDScalar":
        return CDScalar(-self.re, -self.im)

    def scale(self, factor) -> "CDScalar":
        return CDScalar(factor * self.re, factor * self.im)

    def mul(self, other: "CDScalar", eta: float) -> "CDScalar":
        return cd_mul(self, other, eta)

    def conj(self) -> "CDScalar":
        return CDScalar(self.re, -self.im)

    def modulus_sq(self, eta: float):
        return self.re * self.re + eta * self.im * self.im

    def isclose(self, other: "CDScalar", tol: float = DEFAULT_TOL) -> bool:
        return bool(np.all(np.abs(self.re - other.re) <= tol) and np.all(np.abs(self.im - other.im) <= tol))


ONE = CDScalar(1.0, 0.0)
ZERO = CDScalar(0.0, 0.0)
UNIT = CDScalar(0.0, 1.0)


def cd_add(z: CDScalar, w: CDScalar, eta: float | None = None) -> CDScalar:
    return z + w


def cd_mul(z: CDScalar, w: CDScalar, eta: float) -> CDScalar:
    return CDScalar(z.re * w.re - eta * z.im * w.im, z.re * w.im + z.im * w.re)


def cd_conj(z: CDScalar, eta: float | None = None) -> CDScalar:
    return z.conj()


def modulus_sq(z: CDScalar, eta: float):
    return z.modulus_sq(eta)


def abs_eta(z: CDScalar, eta: float):
    """Size of z in the Euclidean sense; used for tolerances only."""
    return np.hypot(z.re, z.im)


# ---------------------------------------------------------------------------
# labeled trigonometric functions


def cosk(label: float, x):
    if label > 0:
        return np.cos(math.sqrt(label) * np.asarray(x, dtype=float))
    if label < 0:
        return np.cosh(math.sqrt(-label) * np.asarray(x, dtype=float))
    return np.ones_like(np.asarray(x, dtype=float))


def sink(label: float, x):
    x = np.asarray(x, dtype=float)
    if label > 0:
        root = math.sqrt(label)
        return np.sin(root * x) / root
    if label < 0:
        root = math.sqrt(-label)
        return np.sinh(root * x) / root
    return x.copy()


def tank(label: float, x):
    c = cosk(label, x)
    # cos of the float nearest a quadrant is ~6e-17, never exactly zero
    if np.any(np.abs(c) <= 1e-15):
        raise PoleError(f"tank({label}, {x}) has a pole")
    return sink(label, x) / c


def versink(label: float, x):
    """(1 - cosk)/label, computed without cancellation as 2 sink(x/2)^2."""
    half = sink(label, np.asarray(x, dtype=float) / 2)
    return 2.0 * half * half


def arck(label: float, c, s, tol: float = DEFAULT_TOL):
    """Recover x from (cosk(label, x), sink(label, x))."""
    c = float(c)
    s = float(s)
    scale = max(1.0, abs(c), abs(label) * s * s)
    if abs(c * c + label * s * s - 1.0) > tol * scale:
        raise InconsistentPair(f"c={c}, s={s} violate c^2 + {label} s^2 = 1")
    if label > 0:
        root = math.sqrt(label)
        return math.atan2(root * s, c) / root
    if c <= 0:
        raise InconsistentPair(f"label {label} requires a positive cosine, got {c}")
    if label < 0:
        root = math.sqrt(-label)
        return math.asinh(root * s) / root
    return s


def cd_exp_imag(x, eta: float) -> CDScalar:
    """exp(i x) = C_eta(x) + i S_eta(x)."""
    return CDScalar(cosk(eta, x), sink(eta, x))


def cd_arg(u: CDScalar, eta: float, tol: float = DEFAULT_TOL) -> float:
    """Inverse of cd_exp_imag on its principal range."""
    re, im = float(u.re), float(u.im)
    if abs(re * re + eta * im * im - 1.0) > tol * max(1.0, re * re, abs(eta) * im * im):
        raise NotUnimodular(f"{u} has eta-modulus {re * re + eta * im * im}")
    if eta > 0:
        root = math.sqrt(eta)
        return math.atan2(root * im, re) / root
    if re <= 0:
        raise NoRealArgument(f"{u} is not exp(i x) for eta={eta}")
    if eta < 0:
        root = math.sqrt(-eta)
        return math.asinh(root * im) / root
    return im


def unimodular_part(z: CDScalar, eta: float) -> tuple[float, CDScalar]:
    """Split z = r * u with r >= 0 real and u unimodular.

    Raises NoRealArgument when z has non-positive eta-modulus (light-like or
    space-like split-complex values, or pure-imaginary dual numbers).
    """
    m2 = float(z.modulus_sq(eta))
    if m2 <= 0:
        raise NoRealArgument(f"{z} has no polar form for eta={eta}")
    r = math.sqrt(m2)
    return r, z.scale(1.0 / r)
