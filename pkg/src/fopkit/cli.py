"""fopkit command line: build, family, verify.

Exit codes: 0 every verdict passed, 1 a verification failed, 2 bad input.
Matrix files and reports are deterministic; timings go to stderr only.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .cocycles import verify_cocycle
from .constructions import (
    AmicableScenario,
    ConstructionError,
    FopScenario,
    build_amicable,
    build_fop,
    build_partial_weighing,
    symmetric_orbit_violation,
)
from .formal import (
    FormalError,
    FormalMatrix,
    is_block_symmetric,
    is_symmetric,
    is_zero,
    mul_transpose,
    orthogonality_transfer_check,
    parse_formal_text,
    substitute,
)
from .induced import check_projectivity, induce
from .scenario import ScenarioError, build_scenario, load_scenario_file

log = logging.getLogger("fopkit")

PASS, FAIL, SKIPPED, EXPERIMENTAL = "PASS", "FAIL", "SKIPPED", "EXPERIMENTAL"
DEFAULT_FAMILY_CAP = 8


class InputError(Exception):
    pass


@dataclass
class Verdict:
    name: str
    status: str
    reason: str = ""


@dataclass
class RunReport:
    scenario: str
    mode: str
    census: dict = field(default_factory=dict)
    verdicts: list[Verdict] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def add(self, name: str, ok: bool | None, reason: str = "") -> None:
        status = SKIPPED if ok is None else (PASS if ok else FAIL)
        self.verdicts.append(Verdict(name, status, reason))

    def failed(self, strict: bool = False) -> bool:
        bad = {FAIL, EXPERIMENTAL} if strict else {FAIL}
        return any(v.status in bad for v in self.verdicts)

    def to_json(self) -> str:
        doc = {
            "scenario": self.scenario,
            "mode": self.mode,
            "census": self.census,
            "verdicts": [vars(v) for v in self.verdicts],
            "details": self.details,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = [f"scenario: {self.scenario}", f"mode: {self.mode}"]
        if self.census:
            lines.append("orbit census:")
            for pair, c in sorted(self.census.items()):
                lines.append(
                    f"  {pair:8s} orbits={c['total']:<4d} orientable={c['orientable']:<4d} "
                    f"stabilizer={c['stabilizer_orientable']:<4d} oracle={c['oracle_dim']:<4d}"
                )
        for k, v in sorted(self.details.items()):
            lines.append(f"{k}: {v}")
        lines.append("verdicts:")
        for v in self.verdicts:
            tail = f"  ({v.reason})" if v.reason else ""
            lines.append(f"  {v.status:12s} {v.name}{tail}")
        return "\n".join(lines) + "\n"

    def write(self, out: Path) -> None:
        (out / "report.json").write_text(self.to_json())
        (out / "report.txt").write_text(self.to_text())


def write_csv(path: Path, M: np.ndarray) -> None:
    path.write_text("\n".join(",".join(str(int(x)) for x in row) for row in M) + "\n")


def read_blocks(path: str) -> dict[str, np.ndarray]:
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise InputError(f"{path}: cannot read blocks file: {exc}") from None
    if not isinstance(raw, dict):
        raise InputError(f"{path}: expected a mapping symbol -> integer matrix")
    out = {}
    for k, v in raw.items():
        a = np.asarray(v)
        if a.ndim != 2 or not np.issubdtype(a.dtype, np.integer):
            raise InputError(f"{path}: block {k!r} must be a 2-d integer matrix")
        out[str(k)] = a.astype(np.int64)
    return out


def _census_dict(census) -> dict:
    return {k: vars(v) for k, v in census.items()}


def _cross_check(report: RunReport, census) -> None:
    bad = [k for k, v in census.items() if not v.agree]
    report.add("orientability_cross_check", not bad, f"disagreement on {bad}" if bad else "")


def _substitution_checks(report, out, A, B, blocks, mode):
    if blocks is None:
        report.add("substituted_product", None, "no --substitute given")
        return
    try:
        As, Bs = substitute(A, blocks), substitute(B, blocks)
    except FormalError as exc:
        raise InputError(f"substitution: {exc}") from None
    write_csv(out / "A_sub.csv", As)
    write_csv(out / "B_sub.csv", Bs)
    prod = As @ Bs.T
    r = next(iter(blocks.values())).shape[0]
    ok = not prod.any() if mode == "orthogonal" else is_block_symmetric(prod, r)
    report.add("substituted_product", ok)


def run_build(scen, mode: str, out: Path, blocks, seed: int) -> RunReport:
    report = RunReport(scen.name, mode)
    report.add("cocycle_valid", verify_cocycle(scen.cocycle))
    report.add("trivializations_valid", True, "checked while loading")
    if mode == "orthogonal":
        if not isinstance(scen, FopScenario):
            raise InputError("orthogonal mode needs subgroups H, H_prime and K")
        res = build_fop(scen, seed=seed)
        report.add("projectivity", all(check_projectivity(V) for V in res.reps.values()))
        report.census = _census_dict(res.census)
        _cross_check(report, res.census)
        report.add(
            "formal_orthogonality",
            res.orthogonal and res.formal_zero,
            "" if res.orthogonal else "Hom(X, X') has orientable orbits",
        )
        report.add("transfer_check", res.transfer_ok)
        A, B = res.A, res.B
    else:
        V = induce(scen.group, scen.cocycle, scen.H, scen.chi)
        Vp = induce(scen.group, scen.cocycle, scen.H_prime, scen.chi_prime)
        report.add("projectivity", check_projectivity(V) and check_projectivity(Vp))
        bad = symmetric_orbit_violation(V)
        report.add("symmetric_orbits", bad is None, f"cell {bad}" if bad else "")
        if bad is not None:
            return report
        res = build_amicable(
            scen.group, scen.cocycle, scen.H, scen.chi, scen.H_prime, scen.chi_prime,
            scen.symbols_a, scen.symbols_b, seed=seed,
        )
        report.census = _census_dict(res.census)
        _cross_check(report, res.census)
        report.add("formal_amicability", res.symmetric)
        report.add("transfer_check", res.transfer_ok)
        A, B = res.A, res.B
    report.details["A_shape"] = f"{A.rows}x{A.cols}"
    report.details["B_shape"] = f"{B.rows}x{B.cols}"
    report.details["A_symbols"] = " ".join(sorted(A.symbols()))
    report.details["B_symbols"] = " ".join(sorted(B.symbols()))
    (out / "A.txt").write_text(A.to_text())
    (out / "B.txt").write_text(B.to_text())
    _substitution_checks(report, out, A, B, blocks, mode)
    return report


def cmd_build(args) -> int:
    spec = load_scenario_file(args.scenario)
    scen = build_scenario(spec)
    mode = "amicable" if (args.amicable or spec.mode == "amicable") else "orthogonal"
    if mode == "amicable" and isinstance(scen, FopScenario):
        scen = AmicableScenario(
            scen.name, scen.group, scen.cocycle, scen.H, scen.chi, scen.H_prime, scen.chi_prime,
            scen.symbols_a, scen.symbols_b,
        )
    blocks = read_blocks(args.substitute) if args.substitute else None
    out = Path(args.out or Path("fopkit-out") / spec.name)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    try:
        report = run_build(scen, mode, out, blocks, args.seed)
    except ConstructionError as exc:
        report = RunReport(spec.name, mode)
        report.add("construction", False, str(exc))
    log.info("build %s took %.2fs", spec.name, time.perf_counter() - t0)
    report.write(out)
    sys.stdout.write(report.to_text())
    return 1 if report.failed(args.strict) else 0


def cmd_family(args) -> int:
    if not 4 <= args.n_min <= args.n_max:
        raise InputError(f"need 4 <= n_min <= n_max, got {args.n_min} {args.n_max}")
    if args.n_max > args.cap:
        raise InputError(f"n_max = {args.n_max} exceeds the cap {args.cap} (raise it with --cap)")
    out = Path(args.out or Path("fopkit-out") / "family")
    out.mkdir(parents=True, exist_ok=True)
    report = RunReport(f"family {args.n_min}..{args.n_max}", "partial_weighing")
    for n in range(args.n_min, args.n_max + 1):
        t0 = time.perf_counter()
        try:
            pw = build_partial_weighing(n)
        except ConstructionError as exc:
            status = EXPERIMENTAL if n == 4 else FAIL
            report.verdicts.append(Verdict(f"n={n}", status, str(exc)))
            continue
        finally:
            log.info("n=%d took %.2fs", n, time.perf_counter() - t0)
        write_csv(out / f"P_{n}.csv", pw.P)
        ok = all(pw.checks.values())
        status = PASS if ok else FAIL
        if n == 4:
            status = EXPERIMENTAL
        reason = (
            f"P {pw.P.shape[0]}x{pw.P.shape[1]}, gram=32I, B rows shifted by {pw.row_shift}, "
            f"{pw.zeroed_symbol} -> 0"
        )
        report.verdicts.append(Verdict(f"n={n}", status, reason))
        report.details[f"n={n}"] = {k: v for k, v in sorted(pw.checks.items())}
    report.write(out)
    sys.stdout.write(report.to_text())
    return 1 if report.failed(args.strict) else 0


def _read_grid(path: str) -> FormalMatrix:
    try:
        return parse_formal_text(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from None
    except FormalError as exc:
        raise InputError(f"{path}: {exc}") from None


def run_verify(A: FormalMatrix, B: FormalMatrix, mode: str, seed: int, name: str = "verify") -> RunReport:
    if A.cols != B.cols:
        raise InputError(f"shape mismatch: A is {A.rows}x{A.cols}, B is {B.rows}x{B.cols}")
    report = RunReport(name, mode)
    report.add("fop_entries", A.is_signed_symbol_matrix() and B.is_signed_symbol_matrix())
    P = mul_transpose(A, B)
    if mode == "orthogonal":
        report.add("formal_orthogonality", is_zero(P))
    else:
        report.add("formal_amicability", A.rows == B.rows and is_symmetric(P))
    report.add("transfer_check", orthogonality_transfer_check(A, B, 20, seed, mode=mode))
    return report


def cmd_verify(args) -> int:
    A, B = _read_grid(args.a), _read_grid(args.b)
    overlap = A.symbols() & B.symbols()
    if overlap and not args.allow_shared_symbols:
        raise InputError(f"the two matrices share symbols {sorted(overlap)}")
    report = run_verify(A, B, args.mode, args.seed)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        report.write(out)
    sys.stdout.write(report.to_text())
    return 1 if report.failed() else 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fopkit", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log timings to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a pair from a scenario file or bundled scenario name")
    b.add_argument("scenario")
    b.add_argument("--out")
    b.add_argument("--substitute", metavar="BLOCKS", help="YAML mapping symbol -> integer block")
    b.add_argument("--amicable", action="store_true")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--strict", action="store_true")
    b.set_defaults(func=cmd_build)

    f = sub.add_parser("family", help="partial weighing matrices from the wreath family")
    f.add_argument("n_min", type=int)
    f.add_argument("n_max", type=int)
    f.add_argument("--out")
    f.add_argument("--cap", type=int, default=DEFAULT_FAMILY_CAP)
    f.add_argument("--strict", action="store_true", help="count EXPERIMENTAL rows as failures")
    f.set_defaults(func=cmd_family)

    v = sub.add_parser("verify", help="check two symbolic grids")
    v.add_argument("a")
    v.add_argument("b")
    v.add_argument("--mode", choices=("orthogonal", "amicable"), default="orthogonal")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out")
    v.add_argument("--allow-shared-symbols", action="store_true")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (InputError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
