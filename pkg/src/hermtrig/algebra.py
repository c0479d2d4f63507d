"""The twelve generators of su_{k1,k2}(3; eta) in the 3x3 representation.

Matrices are held exactly: each entry is a pair of Fractions (real part,
coefficient of i).  Products use i^2 = -eta, so brackets can be compared
with the structure constants without rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

from .scalars import SpaceLabels

GENERATORS = ("P1", "P2", "Q1", "Q2", "J", "M", "B", "I", "T1", "T2", "H1", "H2")
CARTAN = frozenset({"B", "I", "T1", "T2", "H1", "H2"})
BASIS = ("P1", "P2", "Q1", "Q2", "J", "M", "B", "I")


class LabelMismatch(ValueError):
    pass


class NotCartan(ValueError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


Entry = tuple[Fraction, Fraction]
_Z = (Fraction(0), Fraction(0))


def _add(a: Entry, b: Entry) -> Entry:
    # zero entries are common; skipping them avoids most Fraction arithmetic
    if b == _Z:
        return a
    if a == _Z:
        return b
    return (a[0] + b[0], a[1] + b[1])


def _sub(a: Entry, b: Entry) -> Entry:
    if b == _Z:
        return a
    return (a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True)
class AlgebraElement:
    """A 3x3 matrix over C_eta with exact rational entries."""

    entries: tuple[tuple[Entry, ...], ...]
    labels: SpaceLabels

    @classmethod
    def zero(cls, labels: SpaceLabels) -> "AlgebraElement":
        return cls(tuple(tuple(_Z for _ in range(3)) for _ in range(3)), labels)

    @classmethod
    def from_rows(cls, rows, labels: SpaceLabels) -> "AlgebraElement":
        """rows[r][c] is a number (real) or a (re, im) pair."""
        out = []
        for row in rows:
            new = []
            for e in row:
                if isinstance(e, tuple):
                    new.append((_frac(e[0]), _frac(e[1])))
                else:
                    new.append((_frac(e), Fraction(0)))
            out.append(tuple(new))
        return cls(tuple(out), labels)

    def _check(self, other: "AlgebraElement") -> None:
        if self.labels != other.labels:
            raise LabelMismatch(f"{self.labels} vs {other.labels}")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(
            tuple(tuple(_add(a, b) for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)),
            self.labels,
        )

    def __neg__(self) -> "AlgebraElement":
        return self.scale(-1)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(
            tuple(tuple(_sub(a, b) for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)),
            self.labels,
        )

    def scale(self, factor) -> "AlgebraElement":
        f = _frac(factor)
        if f == 1:
            return self
        return AlgebraElement(
            tuple(tuple(e if e == _Z else (f * e[0], f * e[1]) for e in row) for row in self.entries),
            self.labels,
        )

    def __matmul__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        eta = _frac(self.labels.eta)
        a, b = self.entries, other.entries
        acc = [[[0, 0] for _ in range(3)] for _ in range(3)]
        for r in range(3):
            for k in range(3):
                x = a[r][k]
                if not (x[0] or x[1]):
                    continue
                for c in range(3):
                    y = b[k][c]
                    if not (y[0] or y[1]):
                        continue
                    cell = acc[r][c]
                    cell[0] += x[0] * y[0] - eta * x[1] * y[1]
                    cell[1] += x[0] * y[1] + x[1] * y[0]
        return AlgebraElement(
            tuple(tuple(_Z if e == [0, 0] else (_frac(e[0]), _frac(e[1])) for e in row) for row in acc),
            self.labels,
        )

    def is_zero(self) -> bool:
        return all(e[0] == 0 and e[1] == 0 for row in self.entries for e in row)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.labels == other.labels and self.entries == other.entries

    def __hash__(self):
        return hash((self.entries, self.labels))

    def conj_transpose(self) -> "AlgebraElement":
        return AlgebraElement(
            tuple(tuple((self.entries[c][r][0], -self.entries[c][r][1]) for c in range(3)) for r in range(3)),
            self.labels,
        )

    def trace(self) -> Entry:
        return (sum(self.entries[k][k][0] for k in range(3)), sum(self.entries[k][k][1] for k in range(3)))

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        re = np.array([[float(e[0]) for e in row] for row in self.entries])
        im = np.array([[float(e[1]) for e in row] for row in self.entries])
        return re, im


def metric(labels: SpaceLabels) -> AlgebraElement:
    """Lambda = diag(1, k1, k1 k2)."""
    k1, k2 = _frac(labels.kappa1), _frac(labels.kappa2)
    return AlgebraElement.from_rows([[1, 0, 0], [0, k1, 0], [0, 0, k1 * k2]], labels)


def is_antihermitian(x: AlgebraElement) -> bool:
    lam = metric(x.labels)
    return (x.conj_transpose() @ lam + lam @ x).is_zero()


@lru_cache(maxsize=None)
def rep(g: str, labels: SpaceLabels) -> AlgebraElement:
    """Matrix of generator ``g`` in the fundamental representation."""
    k1, k2 = _frac(labels.kappa1), _frac(labels.kappa2)
    i = lambda c=1: (0, _frac(c))  # noqa: E731
    third = Fraction(1, 3)
    table = {
        "P1": [[0, -k1, 0], [1, 0, 0], [0, 0, 0]],
        "P2": [[0, 0, -k1 * k2], [0, 0, 0], [1, 0, 0]],
        "J": [[0, 0, 0], [0, 0, -k2], [0, 1, 0]],
        "Q1": [[0, i(k1), 0], [i(), 0, 0], [0, 0, 0]],
        "Q2": [[0, 0, i(k1 * k2)], [0, 0, 0], [i(), 0, 0]],
        "M": [[0, 0, 0], [0, 0, i(k2)], [0, i(), 0]],
        "B": [[0, 0, 0], [0, i(-1), 0], [0, 0, i()]],
        "I": [[i(-2 * third), 0, 0], [0, i(third), 0], [0, 0, i(third)]],
        "T1": [[i(-third), 0, 0], [0, i(-third), 0], [0, 0, i(2 * third)]],
        "T2": [[i(-third), 0, 0], [0, i(2 * third), 0], [0, 0, i(-third)]],
        "H1": [[i(-1), 0, 0], [0, i(), 0], [0, 0, 0]],
        "H2": [[i(-1), 0, 0], [0, 0, 0], [0, 0, i()]],
    }
    if g not in table:
        raise KeyError(f"unknown generator {g!r}")
    return AlgebraElement.from_rows(table[g], labels)


def bracket(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    return x @ y - y @ x


_CARTAN_COMBOS = {
    "T1": {"I": Fraction(1, 2), "B": Fraction(1, 2)},
    "T2": {"I": Fraction(1, 2), "B": Fraction(-1, 2)},
    "H1": {"I": Fraction(3, 2), "B": Fraction(-1, 2)},
    "H2": {"I": Fraction(3, 2), "B": Fraction(1, 2)},
    "B": {"B": Fraction(1)},
    "I": {"I": Fraction(1)},
}


def cartan_combination(g: str) -> dict[str, Fraction]:
    """Coefficients of ``g`` in the (B, I) basis of the Cartan subalgebra."""
    if g not in ("T1", "T2", "H1", "H2"):
        raise NotCartan(g)
    return dict(_CARTAN_COMBOS[g])


# ---------------------------------------------------------------------------
# linear combinations of generator names: {name: coefficient}

Combo = dict[str, Fraction]


def combo_matrix(combo: Combo, labels: SpaceLabels) -> AlgebraElement:
    out = AlgebraElement.zero(labels)
    for name, coeff in combo.items():
        if coeff:
            out = out + rep(name, labels).scale(coeff)
    return out


def _to_basis(combo: Combo) -> Combo:
    """Rewrite Cartan names T1,T2,H1,H2 through B and I."""
    out: dict[str, Fraction] = {}
    for name, coeff in combo.items():
        parts = _CARTAN_COMBOS[name] if name in CARTAN else {name: Fraction(1)}
        for base, c in parts.items():
            out[base] = out.get(base, Fraction(0)) + coeff * c
    return {k: v for k, v in out.items() if v}


def _term(coeff, eta=0, k1=0, k2=0):
    return (Fraction(coeff), eta, k1, k2)


# Each row: (X, Y, [(coefficient monomial, Z), ...]) meaning [X, Y] = sum c Z.
# Monomial (c, a, b, d) stands for c * eta^a * kappa1^b * kappa2^d.
COMMUTATORS: list[tuple[str, str, list[tuple[tuple, str]]]] = [
    ("P1", "P2", [(_term(1, k1=1), "J")]),
    ("P2", "Q1", [(_term(1, k1=1), "M")]),
    ("Q1", "Q2", [(_term(1, eta=1, k1=1), "J")]),
    ("P1", "Q1", [(_term(2, k1=1), "H1")]),
    ("P2", "Q2", [(_term(2, k1=1, k2=1), "H2")]),
    ("P1", "Q2", [(_term(1, k1=1), "M")]),
    ("P1", "J", [(_term(-1), "P2")]),
    ("P2", "J", [(_term(1, k2=1), "P1")]),
    ("Q1", "J", [(_term(-1), "Q2")]),
    ("Q2", "J", [(_term(1, k2=1), "Q1")]),
    ("P1", "M", [(_term(-1), "Q2")]),
    ("P2", "M", [(_term(-1, k2=1), "Q1")]),
    ("Q1", "M", [(_term(1, eta=1), "P2")]),
    ("Q2", "M", [(_term(1, eta=1, k2=1), "P1")]),
    ("P1", "B", [(_term(1), "Q1")]),
    ("P2", "B", [(_term(-1), "Q2")]),
    ("Q1", "B", [(_term(-1, eta=1), "P1")]),
    ("Q2", "B", [(_term(1, eta=1), "P2")]),
    ("P1", "I", [(_term(-1), "Q1")]),
    ("P2", "I", [(_term(-1), "Q2")]),
    ("Q1", "I", [(_term(1, eta=1), "P1")]),
    ("Q2", "I", [(_term(1, eta=1), "P2")]),
    ("P1", "T1", []),
    ("P2", "T1", [(_term(-1), "Q2")]),
    ("Q1", "T1", []),
    ("Q2", "T1", [(_term(1, eta=1), "P2")]),
    ("P1", "T2", [(_term(-1), "Q1")]),
    ("P2", "T2", []),
    ("Q1", "T2", [(_term(1, eta=1), "P1")]),
    ("Q2", "T2", []),
    ("P1", "H1", [(_term(-2), "Q1")]),
    ("P2", "H1", [(_term(-1), "Q2")]),
    ("Q1", "H1", [(_term(2, eta=1), "P1")]),
    ("Q2", "H1", [(_term(1, eta=1), "P2")]),
    ("P1", "H2", [(_term(-1), "Q1")]),
    ("P2", "H2", [(_term(-2), "Q2")]),
    ("Q1", "H2", [(_term(1, eta=1), "P1")]),
    ("Q2", "H2", [(_term(2, eta=1), "P2")]),
    ("J", "M", [(_term(2, k2=1), "B")]),
    ("J", "B", [(_term(-2), "M")]),
    ("J", "I", []),
    ("M", "B", [(_term(2, eta=1), "J")]),
    ("M", "I", []),
    ("J", "T1", [(_term(-1), "M")]),
    ("J", "T2", [(_term(1), "M")]),
    ("M", "T1", [(_term(1, eta=1), "J")]),
    ("M", "T2", [(_term(-1, eta=1), "J")]),
    ("J", "H1", [(_term(1), "M")]),
    ("J", "H2", [(_term(-1), "M")]),
    ("M", "H1", [(_term(-1, eta=1), "J")]),
    ("M", "H2", [(_term(1, eta=1), "J")]),
    ("B", "I", []),
]


def _eval_monomial(term, labels: SpaceLabels) -> Fraction:
    c, a, b, d = term
    eta, k1, k2 = (_frac(v) for v in labels.as_tuple())
    return c * eta**a * k1**b * k2**d


@dataclass(frozen=True)
class BracketCheck:
    left: str
    right: str
    passed: bool


def check_commutation_table(labels: SpaceLabels, table=None) -> list[BracketCheck]:
    """Compare every tabulated bracket with the matrix commutator, exactly."""
    table = COMMUTATORS if table is None else table
    out = []
    for x, y, rhs in table:
        lhs = bracket(rep(x, labels), rep(y, labels))
        expected = AlgebraElement.zero(labels)
        for term, z in rhs:
            expected = expected + rep(z, labels).scale(_eval_monomial(term, labels))
        out.append(BracketCheck(x, y, lhs == expected))
    return out


def casimir(labels: SpaceLabels) -> AlgebraElement:
    """The quadratic Casimir evaluated as a 3x3 matrix."""
    eta, k1, k2 = (_frac(v) for v in labels.as_tuple())
    sq = {g: rep(g, labels) @ rep(g, labels) for g in ("P1", "P2", "Q1", "Q2", "J", "M", "B", "H1", "H2")}
    group2 = sq["P2"].scale(eta) + sq["Q2"] + sq["H2"].scale(k1 * k2)
    group1 = sq["P1"].scale(eta) + sq["Q1"] + sq["H1"].scale(k1)
    group0 = sq["J"].scale(eta) + sq["M"] + sq["B"].scale(k2)
    return group2 + group1.scale(k2) + group0.scale(k1)


# ---------------------------------------------------------------------------
# automorphisms

_DUALITY_BASE: dict[str, Combo] = {
    "P1": {"J": Fraction(-1)},
    "Q1": {"M": Fraction(-1)},
    "P2": {"P2": Fraction(-1)},
    "Q2": {"Q2": Fraction(-1)},
    "J": {"P1": Fraction(-1)},
    "M": {"Q1": Fraction(-1)},
    "H2": {"H2": Fraction(1)},
    "T2": {"T2": Fraction(-1)},
}


def _cartan_in_basis(combo: Combo) -> Combo:
    """Express a combination of B, I in the named Cartan generator if it is one."""
    target = _to_basis(combo)
    for name in ("B", "I", "T1", "T2", "H1", "H2"):
        parts = _CARTAN_COMBOS[name]
        for sign in (1, -1):
            if target == {k: sign * v for k, v in parts.items()}:
                return {name: Fraction(sign)}
    return target


def _extend_duality() -> dict[str, Combo]:
    out = dict(_DUALITY_BASE)
    # I = (T2 + H2)/2 and B = (H2 - 3 T2)/2, then map by linearity.
    d_t2, d_h2 = out["T2"], out["H2"]

    def lin(a, b, ca, cb):
        acc: dict[str, Fraction] = {}
        for combo, c in ((a, ca), (b, cb)):
            for k, v in _to_basis(combo).items():
                acc[k] = acc.get(k, Fraction(0)) + c * v
        return acc

    out["I"] = _cartan_in_basis(lin(d_t2, d_h2, Fraction(1, 2), Fraction(1, 2)))
    out["B"] = _cartan_in_basis(lin(d_h2, d_t2, Fraction(1, 2), Fraction(-3, 2)))
    for name in ("T1", "H1"):
        acc: dict[str, Fraction] = {}
        for base, c in _CARTAN_COMBOS[name].items():
            for k, v in _to_basis(out[base]).items():
                acc[k] = acc.get(k, Fraction(0)) + c * v
        out[name] = _cartan_in_basis(acc)
    return out


DUALITY = _extend_duality()


def duality_map(g: str) -> tuple[int, str]:
    """Image of a generator under ordinary duality as (sign, name)."""
    ((name, coeff),) = DUALITY[g].items()
    return int(coeff), name


_INVOLUTION_FLIPS = {
    "Pi1": {"P1", "P2", "Q1", "Q2"},
    "Pi2": {"P2", "Q2", "J", "M"},
    "Pi02": {"P1", "Q1", "J", "M"},
    "extra": {"Q1", "Q2", "M", "B", "I", "T1", "T2", "H1", "H2"},
}
INVOLUTIONS = tuple(_INVOLUTION_FLIPS)


def involution(which: str, g: str) -> tuple[int, str]:
    """Sign picked up by ``g`` under one of the involutive automorphisms."""
    if which not in _INVOLUTION_FLIPS:
        raise KeyError(which)
    return (-1 if g in _INVOLUTION_FLIPS[which] else 1), g


def apply_signed_map(mapping, combo: Combo) -> Combo:
    out: dict[str, Fraction] = {}
    for name, coeff in combo.items():
        sign, image = mapping(name)
        for base, c in _to_basis({image: Fraction(sign)}).items():
            out[base] = out.get(base, Fraction(0)) + coeff * c
    return {k: v for k, v in out.items() if v}


def decompose(x: AlgebraElement) -> Combo:
    """Coordinates of an algebra element in the basis P1..M, B, I.

    Recovered from the fixed entry positions of the representation; only
    valid when every coordinate is visible, which holds for brackets of the
    basis and non-degenerate labels.
    """
    labels = x.labels
    out: Combo = {}
    e = x.entries
    # P1, Q1 live at (1,0); P2, Q2 at (2,0); J, M at (2,1).
    out["P1"], out["Q1"] = e[1][0]
    out["P2"], out["Q2"] = e[2][0]
    out["J"], out["M"] = e[2][1]
    # Diagonal: (0, -i, i) B + (-2i/3, i/3, i/3) I
    d0, d1 = e[0][0][1], e[1][1][1]
    out["I"] = -Fraction(3, 2) * d0
    out["B"] = -(d1 - out["I"] / 3)
    out = {k: v for k, v in out.items() if v}
    if combo_matrix(out, labels) != x:
        raise ValueError("element is not in the span recoverable from its lower triangle")
    return out


def is_automorphism(mapping, labels: SpaceLabels, image_labels: SpaceLabels, names: Iterable[str] = BASIS) -> bool:
    """Check [m(X), m(Y)] = m([X, Y]) on basis pairs through the structure constants.

    ``mapping`` sends a generator name to (sign, name); brackets on the left
    are computed at ``image_labels`` and on the right at ``labels``.
    """
    names = list(names)
    for a_idx, x in enumerate(names):
        for y in names[a_idx + 1 :]:
            lhs = bracket(
                combo_matrix(apply_signed_map(mapping, {x: Fraction(1)}), image_labels),
                combo_matrix(apply_signed_map(mapping, {y: Fraction(1)}), image_labels),
            )
            src = decompose(bracket(rep(x, labels), rep(y, labels)))
            rhs = combo_matrix(apply_signed_map(mapping, src), image_labels)
            if lhs != rhs:
                return False
    return True


def corrupted_table(index: int = 0, factor: int = 2):
    """Copy of the commutator table with one structure constant scaled.

    A negative control: the exact check must reject it at every label triple
    where the affected bracket is nonzero.
    """
    table = [list(row) for row in COMMUTATORS]
    x, y, rhs = table[index]
    (term, z), *rest = rhs
    coeff, *powers = term
    table[index] = (x, y, [((coeff * factor, *powers), z), *rest])
    return [tuple(row) for row in table]
