"""Command line: solve, verify, sweep, contract, algebra-check.

Exit codes: 0 success, 1 bad input, 2 degenerate triangle, 3 no real
solution, 4 a law or algebra check failed.  Data goes to stdout and
diagnostics to stderr.  CKD_TOL overrides the default tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import algebra, laws
from .scalars import DEFAULT_TOL, NoRealArgument, SpaceLabels, all_normalized_labels, dual_labels, normalize
from .triangle import (
    DegenerateTriangle,
    InconsistentPhases,
    ResidualTooLarge,
    TriangleData,
    omega_of,
    Omega_of,
    sample_batch,
    solve,
    symplectic_area,
    symplectic_coarea,
    to_record,
)

EXIT_OK, EXIT_INPUT, EXIT_DEGENERATE, EXIT_NO_REAL, EXIT_FAIL = 0, 1, 2, 3, 4
DEFAULT_EPSILONS = (1e-3, 1e-4, 1e-5)
# deviations below this are dominated by roundoff (S and s divide by a label)
NOISE_FLOOR = 1e-8
# tried in order; the first one solvable at every epsilon (and at zero) is used
CANONICAL_INPUTS = (
    (0.5, 0.2, 0.6, 0.1),
    (0.4, 0.2, 0.3, 0.1),
)


def default_tol() -> float:
    raw = os.environ.get("CKD_TOL")
    if raw is None:
        return DEFAULT_TOL
    value = float(raw)
    if not value > 0:
        raise ValueError(f"CKD_TOL must be positive, got {raw!r}")
    return value


def _labels(text: str, do_normalize: bool) -> SpaceLabels:
    labels = SpaceLabels.parse(text)
    return normalize(labels) if do_normalize else labels


def _emit_table(rows: list[dict], columns: list[str], out) -> None:
    widths = {c: max(len(c), *(len(_fmt(r.get(c))) for r in rows)) if rows else len(c) for c in columns}
    out.write("  ".join(c.ljust(widths[c]) for c in columns) + "\n")
    for r in rows:
        out.write("  ".join(_fmt(r.get(c)).ljust(widths[c]) for c in columns) + "\n")


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return "" if v is None else str(v)


def _emit_csv(rows: list[dict], columns: list[str], out) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({c: _fmt(r.get(c)) if isinstance(r.get(c), float) else r.get(c) for c in columns})
    out.write(buf.getvalue())


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True)


# ---------------------------------------------------------------------------
# solve


def cmd_solve(args) -> int:
    labels = _labels(args.labels, args.normalize)
    tol = args.tol if args.tol is not None else default_tol()
    try:
        t = solve(args.a, args.phi_a, args.b, args.phi_b, args.C, args.psi_C, labels, tol=tol)
    except DegenerateTriangle as exc:
        print(f"degenerate triangle: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except NoRealArgument as exc:
        print(f"no real solution: {exc}", file=sys.stderr)
        return EXIT_NO_REAL
    except (InconsistentPhases, ResidualTooLarge, ValueError) as exc:
        print(f"cannot solve: {exc}", file=sys.stderr)
        return EXIT_INPUT
    record = to_record(t)
    if args.json:
        print(_json(record))
    else:
        _emit_table([{"field": k, "value": v} for k, v in record.items()], ["field", "value"], sys.stdout)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    tol = args.tol if args.tol is not None else default_tol()
    try:
        with open(args.record, encoding="utf-8") as fh:
            text = fh.read()
        t, quantities = laws.quantities_from_record(json.loads(text))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"cannot read record: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = laws.full_suite(t, tol=max(tol, laws.DEFAULT_LAW_TOL), quantities=quantities)
    if args.json:
        print(_json({"pass": report.passed, "entries": report.as_dict()}))
    else:
        rows = [{"law": k, **e.as_dict()} for k, e in report.entries.items()]
        _emit_table(rows, ["law", "residual", "pass", "applicable"], sys.stdout)
    if not report.passed:
        print(f"{len(report.failures())} law(s) failed", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep


@dataclass(frozen=True)
class SweepConfig:
    labels: tuple[SpaceLabels, ...] = field(default_factory=lambda: tuple(all_normalized_labels()))
    count: int = 500
    seed: int = 0
    tolerance: float = laws.DEFAULT_LAW_TOL

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")

    def task_seeds(self) -> list[int]:
        """Per-triple seeds derived from the master seed."""
        children = np.random.SeedSequence(self.seed).spawn(len(self.labels))
        return [int(c.generate_state(1)[0]) for c in children]


def _sweep_task(task) -> list[dict]:
    labels, count, seed, tol = task
    t = sample_batch(labels, count, seed=seed)
    report = laws.full_suite(t, tol=tol)
    rows = []
    for key, entry in report.entries.items():
        samples = report.samples.get(key, np.zeros(count))
        fails = int(np.sum(~(samples <= tol))) if entry.applicable else 0
        rows.append({
            "labels": str(labels),
            "law-id": key,
            "max-residual": entry.residual,
            "pass-count": int(samples.size) - fails,
            "fail-count": fails,
        })
    return rows


def run_sweep(config: SweepConfig, workers: int = 1) -> list[dict]:
    tasks = [(L, config.count, s, config.tolerance) for L, s in zip(config.labels, config.task_seeds())]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_sweep_task, tasks))
    else:
        chunks = [_sweep_task(task) for task in tasks]
    return [row for chunk in chunks for row in chunk]


SWEEP_COLUMNS = ["labels", "law-id", "max-residual", "pass-count", "fail-count"]


def cmd_sweep(args) -> int:
    tol = args.tol if args.tol is not None else max(default_tol(), laws.DEFAULT_LAW_TOL)
    if args.labels:
        triples = tuple(_labels(text, args.normalize) for text in args.labels)
    else:
        triples = tuple(all_normalized_labels())
    try:
        config = SweepConfig(triples, args.count, args.seed, tol)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT
    rows = run_sweep(config, workers=args.workers)
    if args.csv:
        _emit_csv(rows, SWEEP_COLUMNS, sys.stdout)
    elif args.json:
        print(_json(rows))
    else:
        summary = {}
        for r in rows:
            s = summary.setdefault(r["labels"], {"labels": r["labels"], "laws": 0, "failing": 0, "worst": 0.0})
            s["laws"] += 1
            s["failing"] += r["fail-count"] > 0
            s["worst"] = max(s["worst"], r["max-residual"])
        _emit_table(list(summary.values()), ["labels", "laws", "failing", "worst"], sys.stdout)
    failed = sum(r["fail-count"] for r in rows)
    if failed:
        print(f"{failed} failing law evaluations", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------
# contract


def _invariants(t: TriangleData) -> dict[str, float]:
    values = {k: float(v) for k, v in t.values().items()}
    values.update(
        omega=float(omega_of(t)), Omega=float(Omega_of(t)),
        S=float(symplectic_area(t)), s=float(symplectic_coarea(t)),
    )
    return values


def _replace_label(base: SpaceLabels, which: str, value: float) -> SpaceLabels:
    parts = {"eta": base.eta, "kappa1": base.kappa1, "kappa2": base.kappa2}
    parts[which] = value
    return SpaceLabels(parts["eta"], parts["kappa1"], parts["kappa2"])


@dataclass
class ContractionRow:
    invariant: str
    limit: float
    deviations: list[float]
    order: float
    extrapolated_error: float

    def as_dict(self) -> dict:
        return {
            "invariant": self.invariant, "limit": self.limit, "deviations": self.deviations,
            "order": self.order, "extrapolated_error": self.extrapolated_error,
        }


@dataclass
class ContractionStudy:
    base: SpaceLabels
    which: str
    epsilons: tuple[float, ...]
    inputs: tuple[float, float, float, float]
    rows: list[ContractionRow]

    def row(self, name: str) -> ContractionRow:
        return next(r for r in self.rows if r.invariant == name)


def contraction_study(base: SpaceLabels, which: str, epsilons=DEFAULT_EPSILONS,
                      inputs=None) -> ContractionStudy:
    """Solve fixed canonical inputs with ``which`` scaled by each epsilon and at zero.

    The order comes from the last two deviations above the roundoff floor;
    identical values give an infinite order.  The extrapolated error is
    the distance between the Richardson limit of the sequence and the
    contracted value.
    """
    if which not in ("eta", "kappa1", "kappa2"):
        raise ValueError(f"unknown label {which!r}")
    value = getattr(base, which)
    if value == 0:
        raise ValueError(f"{which} of the base labels must be nonzero")
    candidates = [inputs] if inputs is not None else list(CANONICAL_INPUTS)
    last_error: Exception | None = None
    for a, b, C, psi_C in candidates:
        try:
            limit = _invariants(solve(a, None, b, None, C, psi_C, _replace_label(base, which, 0.0)))
            seq = [
                _invariants(solve(a, None, b, None, C, psi_C, _replace_label(base, which, e * value)))
                for e in epsilons
            ]
        except (NoRealArgument, DegenerateTriangle, ResidualTooLarge) as exc:
            last_error = exc
            continue
        break
    else:
        raise NoRealArgument(f"no canonical input solvable along the contraction: {last_error}")
    rows = []
    for name, v0 in limit.items():
        vals = [s[name] for s in seq]
        dev = [abs(v - v0) for v in vals]
        order, err = math.inf, dev[-1]
        # last consecutive pair above the roundoff floor
        usable = [n for n in range(1, len(epsilons)) if min(dev[n - 1], dev[n]) > NOISE_FLOOR]
        if usable:
            n = usable[-1]
            ratio = epsilons[n - 1] / epsilons[n]
            order = math.log(dev[n - 1] / dev[n]) / math.log(ratio)
            if order > 0:
                extrap = vals[n] + (vals[n] - vals[n - 1]) / (ratio**order - 1)
                err = abs(extrap - v0)
        rows.append(ContractionRow(name, v0, dev, order, err))
    return ContractionStudy(base, which, tuple(epsilons), (a, b, C, psi_C), rows)


def cmd_contract(args) -> int:
    base = _labels(args.labels, args.normalize)
    eps = tuple(args.eps) if args.eps else DEFAULT_EPSILONS
    try:
        study = contraction_study(base, args.which, eps)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT
    rows = [r.as_dict() for r in study.rows]
    if args.json:
        print(_json({"labels": str(base), "which": args.which, "epsilons": list(eps),
                     "inputs": list(study.inputs), "rows": rows}))
    elif args.csv:
        flat = [{**r, "deviations": " ".join(f"{d:.3e}" for d in r["deviations"])} for r in rows]
        _emit_csv(flat, ["invariant", "limit", "deviations", "order", "extrapolated_error"], sys.stdout)
    else:
        flat = [{**r, "deviations": " ".join(f"{d:.2e}" for d in r["deviations"])} for r in rows]
        _emit_table(flat, ["invariant", "limit", "deviations", "order", "extrapolated_error"], sys.stdout)
    return EXIT_OK


# ---------------------------------------------------------------------------
# algebra-check


def algebra_report(labels: SpaceLabels, table=None) -> dict[str, bool]:
    brackets = algebra.check_commutation_table(labels, table)
    cas = algebra.casimir(labels)
    result = {
        "commutators": all(b.passed for b in brackets),
        "casimir": all(algebra.bracket(cas, algebra.rep(g, labels)).is_zero() for g in algebra.BASIS),
        "duality": algebra.is_automorphism(algebra.duality_map, labels, dual_labels(labels)),
    }
    for name in algebra.INVOLUTIONS:
        result[f"involution_{name}"] = algebra.is_automorphism(
            lambda g, n=name: algebra.involution(n, g), labels, labels
        )
    return result


def cmd_algebra_check(args) -> int:
    if args.labels:
        triples = [_labels(args.labels, args.normalize)]
    else:
        triples = list(all_normalized_labels())
    table = None
    if args.corrupt:
        table = algebra.corrupted_table()
    rows = []
    for L in triples:
        rep = algebra_report(L, table)
        rows.append({"labels": str(L), **rep, "pass": all(rep.values())})
    if args.json:
        print(_json(rows))
    else:
        _emit_table(rows, list(rows[0].keys()), sys.stdout)
    if not all(r["pass"] for r in rows):
        print("algebra check failed", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hermtrig", description="Hermitian Cayley-Klein trigonometry")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, labels_required=True, many=False):
        if many:
            p.add_argument("--labels", action="append", help="eta,kappa1,kappa2 (repeatable)")
        else:
            p.add_argument("--labels", required=labels_required, help="eta,kappa1,kappa2")
        p.add_argument("--normalize", action="store_true", help="reduce labels to -1, 0, +1")
        p.add_argument("--json", action="store_true")
        p.add_argument("--csv", action="store_true")
        p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("solve", help="solve a triangle from two sides, the included angle and its phase")
    common(p)
    for name in ("a", "b", "C", "psi_C"):
        p.add_argument(f"--{name}", type=float, default=0.0)
    for name in ("phi_a", "phi_b"):
        p.add_argument(f"--{name}", type=float, default=None, help="closing value when omitted")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="run the law suite on a triangle record")
    p.add_argument("record")
    p.add_argument("--json", action="store_true")
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="solve and verify random triangles for many label triples")
    common(p, many=True)
    p.add_argument("--count", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("contract", help="convergence of invariants as one label goes to zero")
    common(p)
    p.add_argument("--which", choices=("eta", "kappa1", "kappa2"), required=True)
    p.add_argument("--eps", type=float, nargs="+")
    p.set_defaults(func=cmd_contract)

    p = sub.add_parser("algebra-check", help="exact checks of the Lie algebra structure")
    common(p, labels_required=False)
    p.add_argument("--corrupt", action="store_true", help="negative control with a wrong structure constant")
    p.set_defaults(func=cmd_algebra_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
