"""Group elements of SU_{k1,k2}(3; eta) as floating point C_eta matrices.

A matrix over C_eta is stored as two real arrays (real part, coefficient of
i) of shape (..., 3, 3); leading axes batch many elements at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraElement, rep
from .scalars import DEFAULT_TOL, CDScalar, SpaceLabels, cosk, sink


_NEXT = np.array([1, 2, 0])
_NEXT2 = np.array([2, 0, 1])


class LabelMismatch(ValueError):
    pass


class NonFinite(ArithmeticError):
    pass


def _check(a_labels: SpaceLabels, b_labels: SpaceLabels) -> None:
    if a_labels != b_labels:
        raise LabelMismatch(f"{a_labels} vs {b_labels}")


@dataclass(frozen=True, eq=False)
class GroupElement:
    re: np.ndarray
    im: np.ndarray
    labels: SpaceLabels

    @classmethod
    def identity(cls, labels: SpaceLabels, shape: tuple[int, ...] = ()) -> "GroupElement":
        eye = np.zeros(shape + (3, 3))
        eye[..., [0, 1, 2], [0, 1, 2]] = 1.0
        return cls(eye, np.zeros_like(eye), labels)

    @classmethod
    def from_algebra(cls, x: AlgebraElement) -> "GroupElement":
        re, im = x.to_arrays()
        return cls(re, im, x.labels)

    @property
    def eta(self) -> float:
        return self.labels.eta

    @property
    def shape(self) -> tuple[int, ...]:
        return self.re.shape[:-2]

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        _check(self.labels, other.labels)
        re = self.re @ other.re - self.eta * (self.im @ other.im)
        im = self.re @ other.im + self.im @ other.re
        return GroupElement(re, im, self.labels)

    def __add__(self, other: "GroupElement") -> "GroupElement":
        _check(self.labels, other.labels)
        return GroupElement(self.re + other.re, self.im + other.im, self.labels)

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        _check(self.labels, other.labels)
        return GroupElement(self.re - other.re, self.im - other.im, self.labels)

    def scale(self, factor: float) -> "GroupElement":
        return GroupElement(factor * self.re, factor * self.im, self.labels)

    def conj_transpose(self) -> "GroupElement":
        return GroupElement(np.swapaxes(self.re, -1, -2), -np.swapaxes(self.im, -1, -2), self.labels)

    def entry(self, r: int, c: int) -> CDScalar:
        return CDScalar(self.re[..., r, c], self.im[..., r, c])

    def max_abs(self):
        """Largest |re| + |im| over entries (per batch element)."""
        return np.max(np.abs(self.re) + np.abs(self.im), axis=(-2, -1))

    def deviation(self, other: "GroupElement"):
        return (self - other).max_abs()

    def adjugate(self) -> "GroupElement":
        """Classical adjugate; no division, so it is safe over dual numbers."""
        # cyclic index shifts give the signed 2x2 cofactors of a 3x3 matrix
        r1, r2 = _NEXT[:, None], _NEXT2[:, None]
        c1, c2 = _NEXT[None, :], _NEXT2[None, :]
        eta = self.eta
        re, im = self.re, self.im

        def prod(rows_a, cols_a, rows_b, cols_b):
            ar, ai = re[..., rows_a, cols_a], im[..., rows_a, cols_a]
            br, bi = re[..., rows_b, cols_b], im[..., rows_b, cols_b]
            return ar * br - eta * ai * bi, ar * bi + ai * br

        p = prod(r1, c1, r2, c2)
        q = prod(r1, c2, r2, c1)
        cof_re, cof_im = p[0] - q[0], p[1] - q[1]
        return GroupElement(np.swapaxes(cof_re, -1, -2), np.swapaxes(cof_im, -1, -2), self.labels)

    def _mul(self, a, b):
        return (a[0] * b[0] - self.eta * a[1] * b[1], a[0] * b[1] + a[1] * b[0])

    def _cell(self, r, c):
        return (self.re[..., r, c], self.im[..., r, c])

    def _minor(self, r0, r1, c0, c1):
        a = self._mul(self._cell(r0, c0), self._cell(r1, c1))
        b = self._mul(self._cell(r0, c1), self._cell(r1, c0))
        return (a[0] - b[0], a[1] - b[1])

    def det(self) -> CDScalar:
        re = np.zeros(self.shape)
        im = np.zeros(self.shape)
        for c in range(3):
            cols = [k for k in range(3) if k != c]
            m = self._minor(1, 2, cols[0], cols[1])
            term = self._mul(self._cell(0, c), m)
            sign = -1.0 if c % 2 else 1.0
            re = re + sign * term[0]
            im = im + sign * term[1]
        return CDScalar(re, im)

    def inverse(self) -> "GroupElement":
        """Inverse of a unimodular element (adjugate, det assumed 1)."""
        return self.adjugate()


def metric_diag(labels: SpaceLabels) -> np.ndarray:
    return np.array([1.0, labels.kappa1, labels.kappa1 * labels.kappa2])


# ---------------------------------------------------------------------------
# closed-form one-parameter subgroups

# generator -> (row, col, label factor name, imaginary)
_BLOCKS = {
    "P1": (0, 1, "k1", False),
    "P2": (0, 2, "k1k2", False),
    "J": (1, 2, "k2", False),
    "Q1": (0, 1, "k1", True),
    "Q2": (0, 2, "k1k2", True),
    "M": (1, 2, "k2", True),
}

# Cartan generators are diagonal: multiples of i on the diagonal
_DIAGONAL = {
    "B": (0.0, -1.0, 1.0),
    "I": (-2 / 3, 1 / 3, 1 / 3),
    "T1": (-1 / 3, -1 / 3, 2 / 3),
    "T2": (-1 / 3, 2 / 3, -1 / 3),
    "H1": (-1.0, 1.0, 0.0),
    "H2": (-1.0, 0.0, 1.0),
}


def one_param(g: str, t, labels: SpaceLabels) -> GroupElement:
    """exp(t * rep(g)) in closed form; ``t`` may be an array."""
    t = np.asarray(t, dtype=float)
    shape = t.shape
    out = GroupElement.identity(labels, shape)
    re, im = out.re, out.im
    eta, k1, k2 = labels.as_tuple()
    if g in _DIAGONAL:
        re[..., :, :] = 0.0
        for k, mult in enumerate(_DIAGONAL[g]):
            re[..., k, k] = cosk(eta, mult * t)
            im[..., k, k] = sink(eta, mult * t)
        return out
    r, c, which, imaginary = _BLOCKS[g]
    factor = {"k1": k1, "k2": k2, "k1k2": k1 * k2}[which]
    label = eta * factor if imaginary else factor
    cos_, sin_ = cosk(label, t), sink(label, t)
    re[..., r, r] = cos_
    re[..., c, c] = cos_
    if imaginary:
        im[..., r, c] = factor * sin_
        im[..., c, r] = sin_
    else:
        re[..., r, c] = -factor * sin_
        re[..., c, r] = sin_
    return out


def product(factors) -> GroupElement:
    it = iter(factors)
    out = next(it)
    for f in it:
        out = out @ f
    return out


def complete(kind: str, value, phase, labels: SpaceLabels, sign: float = 1.0) -> GroupElement:
    """Commuting pair exp(value X) exp(phase Y) with (X, Y) = (P1, T1) or (J, I)."""
    x, y = {"translation": ("P1", "T1"), "rotation": ("J", "I")}[kind]
    return one_param(x, sign * np.asarray(value), labels) @ one_param(y, sign * np.asarray(phase), labels)


# ---------------------------------------------------------------------------
# series oracle


def exp_series(x: AlgebraElement | GroupElement, terms: int = 18, threshold: float = 0.5) -> GroupElement:
    """Scaling-and-squaring Taylor exponential over C_eta matrices."""
    mat = GroupElement.from_algebra(x) if isinstance(x, AlgebraElement) else x
    norm = float(np.max(mat.max_abs())) if mat.re.size else 0.0
    if not math.isfinite(norm):
        raise NonFinite("matrix has non-finite entries")
    squarings = max(0, math.ceil(math.log2(norm / threshold))) if norm > threshold else 0
    scaled = mat.scale(2.0**-squarings)
    result = GroupElement.identity(mat.labels, mat.shape)
    term = GroupElement.identity(mat.labels, mat.shape)
    for n in range(1, terms + 1):
        term = (term @ scaled).scale(1.0 / n)
        result = result + term
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(squarings):
            result = result @ result
    if not (np.all(np.isfinite(result.re)) and np.all(np.isfinite(result.im))):
        raise NonFinite("exponential overflowed")
    return result


def scaled_generator(g: str, t: float, labels: SpaceLabels) -> GroupElement:
    re, im = rep(g, labels).to_arrays()
    return GroupElement(t * re, t * im, labels)


# ---------------------------------------------------------------------------
# hermitian structure and rays


@dataclass(frozen=True, eq=False)
class Ray:
    re: np.ndarray
    im: np.ndarray
    labels: SpaceLabels

    @classmethod
    def origin(cls, labels: SpaceLabels) -> "Ray":
        return cls(np.array([1.0, 0.0, 0.0]), np.zeros(3), labels)

    @classmethod
    def from_components(cls, comps, labels: SpaceLabels) -> "Ray":
        """comps: three CDScalars, (re, im) pairs or reals."""
        re, im = [], []
        for z in comps:
            if isinstance(z, CDScalar):
                re.append(float(z.re))
                im.append(float(z.im))
            elif isinstance(z, tuple):
                re.append(float(z[0]))
                im.append(float(z[1]))
            else:
                re.append(float(z))
                im.append(0.0)
        return cls(np.array(re), np.array(im), labels)

    def component(self, k: int) -> CDScalar:
        return CDScalar(float(self.re[k]), float(self.im[k]))

    def scale_by(self, z: CDScalar) -> "Ray":
        eta = self.labels.eta
        return Ray(self.re * z.re - eta * self.im * z.im, self.re * z.im + self.im * z.re, self.labels)

    def normalized(self) -> "Ray":
        """Unit hermitian norm, leading nonzero component real and positive."""
        norm = hermitian_form(self, self)
        if not norm.re > 0:
            return self
        out = Ray(self.re / math.sqrt(norm.re), self.im / math.sqrt(norm.re), self.labels)
        eta = self.labels.eta
        for k in range(3):
            z = out.component(k)
            m2 = z.modulus_sq(eta)
            if abs(z.re) + abs(z.im) > 1e-15 and m2 > 0:
                r = math.sqrt(m2)
                return out.scale_by(CDScalar(z.re / r, -z.im / r))
        return out

    def same_ray(self, other: "Ray", tol: float = DEFAULT_TOL) -> bool:
        a, b = self.normalized(), other.normalized()
        return bool(np.all(np.abs(a.re - b.re) <= tol) and np.all(np.abs(a.im - b.im) <= tol))


def hermitian_form(z: Ray, w: Ray) -> CDScalar:
    """<z|w> = sum conj(z_k) Lambda_k w_k."""
    _check(z.labels, w.labels)
    lam = metric_diag(z.labels)
    eta = z.labels.eta
    re = np.sum(lam * (z.re * w.re + eta * z.im * w.im))
    im = np.sum(lam * (z.re * w.im - z.im * w.re))
    return CDScalar(float(re), float(im))


def act(u: GroupElement, z: Ray) -> Ray:
    _check(u.labels, z.labels)
    eta = u.labels.eta
    re = u.re @ z.re - eta * (u.im @ z.im)
    im = u.re @ z.im + u.im @ z.re
    return Ray(re, im, z.labels)


def isometry_defect(u: GroupElement):
    """(max |U^dag Lambda U - Lambda|, |det U - 1|) per batch element."""
    lam = np.diag(metric_diag(u.labels))
    lam_el = GroupElement(np.broadcast_to(lam, u.re.shape).copy(), np.zeros_like(u.re), u.labels)
    gram = u.conj_transpose() @ lam_el @ u
    d = u.det()
    return gram.deviation(lam_el), np.abs(d.re - 1.0) + np.abs(d.im)


def is_isometry(u: GroupElement, tol: float = DEFAULT_TOL) -> bool:
    metric_dev, det_dev = isometry_defect(u)
    return bool(np.all(metric_dev <= tol) and np.all(det_dev <= tol))
