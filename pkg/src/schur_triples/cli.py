"""``schur`` command-line front end.

Every run produces a :class:`RunReport`, printed as a human-readable listing,
JSON or CSV.  Rationals are rendered as ``"num/den"`` and parsed back on load.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import re
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import __version__
from .constructions import (
    TYPE_I_DELTA,
    Z3N_DELTA,
    BoundReport,
    SearchFailure,
    sumfree_removal,
    typeI_bound,
    typeI_construction,
    z2n_extremal_set,
    z2n_min_formula,
    z3n_bound,
    z3n_construction,
    z3zp_construction,
    z3zp_upper_bound,
    zp_min_formula,
    zp_prefix_set,
)
from .groups import ElementSet, GroupSpec, GroupSpecError, classify_group_type, parse_group
from .oracle import EXHAUSTIVE_CAP, brute_force_min, f_table, largest_sumfree_size, sampled_min
from .spectral import _lower_rational, cayley_spectrum
from .suites import SUITES, run_suite
from .triples import count_schur, is_sum_free, st_per_element

__all__ = ["RunReport", "InputError", "parse_elements", "read_set_file", "main"]

_RATIONAL = re.compile(r"^-?\d+/\d+$")

# acceptance-criterion ids accepted by ``verify`` next to the suite names
CRITERIA = {
    "AC-1": ("zp-formula",),
    "AC-2": ("zp-stability",),
    "AC-3": ("z2n",),
    "AC-4": ("typeI",),
    "AC-5": ("z3n",),
    "AC-6": ("z3zp",),
    "AC-7": ("removal",),
    "AC-8": ("pollard", "kneser"),
    "AC-9": ("spectral",),
    "AC-10": ("counting",),
    "AC-11": ("conjecture",),
}


class InputError(ValueError):
    """Bad user input, located by 1-based line and column."""

    def __init__(self, message: str, line: int = 1, column: int | None = None):
        where = f"line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


# ---------------------------------------------------------------------------
# reports


def _plain(value: Any) -> Any:
    """Normalise a payload to JSON-shaped values, keeping Fractions."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, ElementSet):
        return value.indices.tolist()
    if isinstance(value, BoundReport):
        return {
            "theorem": value.theorem,
            "params": _plain(value.params),
            "value": _plain(value.value),
            "applicable": value.applicable,
            "reason": value.reason,
        }
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, str):
        # keeps normalisation idempotent under the "num/den" encoding
        return Fraction(value) if _RATIONAL.match(value) else value
    if value is None or isinstance(value, float):
        return value
    return str(value)


def _encode(value: Any) -> Any:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, dict):
        return {k: _encode(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_encode(v) for v in value]
    return value


def _decode(value: Any) -> Any:
    if isinstance(value, str) and _RATIONAL.match(value):
        return Fraction(value)
    if isinstance(value, dict):
        return {k: _decode(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_decode(v) for v in value]
    return value


@dataclass
class RunReport:
    command: list[str]
    group: str | None
    inputs: dict[str, Any]
    outputs: dict[str, Any]
    seed: int
    passed: bool = True
    version: str = __version__
    wall_time_us: int = 0
    table: list[list[Any]] | None = field(default=None)

    def __post_init__(self) -> None:
        self.inputs = _plain(self.inputs)
        self.outputs = _plain(self.outputs)
        if self.table is not None:
            self.table = _plain(self.table)

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": list(self.command),
            "group": self.group,
            "inputs": _encode(self.inputs),
            "outputs": _encode(self.outputs),
            "table": _encode(self.table),
            "seed": self.seed,
            "passed": self.passed,
            "version": self.version,
            "wall_time_us": self.wall_time_us,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RunReport":
        return cls(
            command=list(d["command"]),
            group=d["group"],
            inputs=_decode(d["inputs"]),
            outputs=_decode(d["outputs"]),
            seed=d["seed"],
            passed=d["passed"],
            version=d["version"],
            wall_time_us=d["wall_time_us"],
            table=_decode(d.get("table")),
        )

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))

    def payload_json(self) -> str:
        """Numeric content only: what a replay with the same seed must reproduce."""
        return json.dumps(
            {"inputs": _encode(self.inputs), "outputs": _encode(self.outputs), "table": _encode(self.table)},
            sort_keys=True,
        )

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self._csv()
        return self._human()

    def _human(self) -> str:
        lines = [f"command: {' '.join(self.command)}"]
        if self.group:
            lines.append(f"group: {self.group}")
        for key, val in self.outputs.items():
            lines.append(f"{key}: {_show(val)}")
        if self.table is not None:
            lines.append(", ".join(f"({a},{_show(f)})" for a, f in self.table))
        lines.append(f"status: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def _csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.table is not None:
            w.writerow(["a", "f"])
            for a, f in self.table:
                w.writerow([a, _show(f)])
        else:
            w.writerow(["key", "value"])
            for key, val in self.outputs.items():
                w.writerow([key, json.dumps(_encode(val)) if isinstance(val, (dict, list)) else _show(val)])
        return buf.getvalue().rstrip("\n")


def _show(val: Any) -> str:
    if isinstance(val, Fraction):
        return f"{val.numerator}/{val.denominator}"
    if isinstance(val, list):
        return "{" + ",".join(_show(v) for v in val) + "}"
    if isinstance(val, dict):
        return json.dumps(_encode(val), sort_keys=True)
    return str(val)


# ---------------------------------------------------------------------------
# set sources


def _parse_int(token: str, line: int, column: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise InputError(f"expected an integer, got {token!r}", line, column) from None


def parse_elements(text: str, G: GroupSpec, *, line: int = 1, offset: int = 0) -> ElementSet:
    """Parse ``"1,2,3"`` (canonical indices) or ``"(1,0);(1,1)"`` (coordinates)."""
    stripped = text.strip()
    if not stripped:
        return ElementSet.empty(G)
    if stripped.startswith("("):
        return _parse_coords(text, G, line, offset)
    out = []
    col = 0
    for token in text.split(","):
        start = col + (len(token) - len(token.lstrip())) + 1 + offset
        x = _parse_int(token.strip(), line, start)
        if not 0 <= x < G.order:
            raise InputError(f"element {x} out of range for {G.name} (order {G.order})", line, start)
        out.append(x)
        col += len(token) + 1
    return ElementSet.from_indices(G, out)


def _parse_coords(text: str, G: GroupSpec, line: int, offset: int) -> ElementSet:
    out = []
    for m in re.finditer(r"[^;]+", text):
        chunk = m.group(0)
        col = m.start() + 1 + offset
        inner = chunk.strip()
        if not (inner.startswith("(") and inner.endswith(")")):
            raise InputError(f"expected '(c1,...,ck)', got {inner!r}", line, col)
        parts = inner[1:-1].split(",")
        if len(parts) != G.rank:
            raise InputError(f"{G.name} elements have {G.rank} coordinates, got {len(parts)}", line, col)
        coords = [_parse_int(p.strip(), line, col) for p in parts]
        for c, mod in zip(coords, G.factors):
            if not 0 <= c < mod:
                raise InputError(f"coordinate {c} out of range [0, {mod})", line, col)
        out.append(G.index(coords))
    return ElementSet.from_indices(G, out)


def read_set_file(path: str) -> tuple[GroupSpec, ElementSet]:
    """Read ``group=``, ``elements=`` and an optional ``sha256=`` line.

    The checksum covers the first two lines, each terminated by ``\\n``.
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if len(lines) < 2:
        raise InputError("set file needs 'group=' and 'elements=' lines", len(lines) + 1)
    for no, key in ((0, "group="), (1, "elements=")):
        if not lines[no].startswith(key):
            raise InputError(f"expected '{key}...'", no + 1, 1)
    try:
        G = parse_group(lines[0][6:])
    except GroupSpecError as exc:
        col = exc.column + 6 if exc.column is not None else None
        raise InputError(str(exc), 1, col) from None
    A = parse_elements(lines[1][9:], G, line=2, offset=9)
    extra = [ln for ln in lines[2:] if ln.strip()]
    if extra:
        if not extra[0].startswith("sha256="):
            raise InputError("expected 'sha256=<hex>'", 3, 1)
        digest = hashlib.sha256(f"{lines[0]}\n{lines[1]}\n".encode()).hexdigest()
        if extra[0][7:].strip().lower() != digest:
            raise InputError("sha256 does not match lines 1-2", 3, 8)
        if len(extra) > 1:
            raise InputError("unexpected content after the checksum", 4, 1)
    return G, A


def _group(args) -> GroupSpec:
    if args.group is None:
        raise InputError("this command needs -g/--group")
    try:
        return parse_group(args.group)
    except GroupSpecError as exc:
        raise InputError(f"group spec: {exc}", 1) from None


def _load_set(args) -> tuple[GroupSpec, ElementSet]:
    sources = [s for s in (args.elements, args.coords, args.file) if s is not None]
    if len(sources) != 1:
        raise InputError("give exactly one of -e, -E or --file")
    if args.file is not None:
        G, A = read_set_file(args.file)
        if args.group is not None and parse_group(args.group) != G:
            raise InputError(f"-g {args.group} disagrees with the file's group {G.name}")
        return G, A
    G = _group(args)
    if args.coords is not None:
        text = args.coords
        if text.strip() and not text.strip().startswith("("):
            raise InputError("-E expects coordinates like '(1,0);(1,1)'", 1, 1)
        return G, parse_elements(text, G)
    return G, parse_elements(args.elements, G)


def _need(args, *names: str) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = {"p": "-p", "a": "-a", "t": "-t", "n": "-n", "eps": "--eps", "group": "-g"}
        raise InputError("missing " + ", ".join(flags.get(n, n) for n in missing))


# ---------------------------------------------------------------------------
# commands


def cmd_count(args) -> dict[str, Any]:
    G, A = _load_set(args)
    out: dict[str, Any] = {"size": A.cardinality, "st": count_schur(A), "sum_free": is_sum_free(A)}
    if args.per_element:
        out["per_element"] = {str(x): st_per_element(A, int(x)) for x in A.indices}
    return {"group": G, "inputs": {"elements": A}, "outputs": out}


def _construct_and_bound(args) -> tuple[GroupSpec | None, ElementSet | None, BoundReport, str]:
    kind = args.theorem
    if kind == "zp":
        _need(args, "p", "a")
        bound = zp_min_formula(args.p, args.a)
        return None, (zp_prefix_set(args.p, args.a) if args.build else None), bound, "equal"
    if kind == "z2n":
        _need(args, "n", "a")
        bound = z2n_min_formula(args.n, args.a)
        return None, (z2n_extremal_set(args.n, args.a) if args.build else None), bound, "equal"
    if kind == "typeI":
        _need(args, "group", "t")
        G = _group(args)
        p = args.p if args.p is not None else classify_group_type(G).p
        if p is None:
            raise InputError(f"{G.name} is of type {classify_group_type(G)}, not type I")
        delta = args.delta if args.delta is not None else TYPE_I_DELTA
        bound = typeI_bound(G, p, args.t, delta)
        return G, (typeI_construction(G, p, args.t) if args.build else None), bound, "equal"
    if kind == "z3n":
        _need(args, "n", "t")
        delta = args.delta if args.delta is not None else Z3N_DELTA
        bound = z3n_bound(args.n, args.t, delta)
        return None, (z3n_construction(args.n, args.t) if args.build else None), bound, "equal"
    if kind == "z3zp":
        _need(args, "p", "a")
        bound = z3zp_upper_bound(args.p, args.a)
        return None, (z3zp_construction(args.p, args.a) if args.build else None), bound, "at_most"
    raise InputError(f"unknown theorem id {kind!r}")


def cmd_construct(args) -> dict[str, Any]:
    args.build = True
    G, A, bound, relation = _construct_and_bound(args)
    st = count_schur(A)
    ok = st == bound.value if relation == "equal" else st <= bound.value
    outputs = {
        "set": A,
        "size": A.cardinality,
        "st": st,
        "bound": bound.value,
        "bound_applicable": bound.applicable,
        "relation": relation,
        relation: ok,
    }
    if bound.reason:
        outputs["bound_reason"] = bound.reason
    return {"group": A.group, "inputs": {"theorem": args.theorem, "params": bound.params},
            "outputs": outputs, "passed": ok}


def cmd_bound(args) -> dict[str, Any]:
    args.build = False
    G, _, bound, _ = _construct_and_bound(args)
    outputs = {"bound": bound.value, "applicable": bound.applicable, "theorem": bound.theorem}
    if bound.reason:
        outputs["reason"] = bound.reason
    return {"group": G, "inputs": {"theorem": args.theorem, "params": bound.params}, "outputs": outputs}


def cmd_table(args) -> dict[str, Any]:
    G = _group(args)
    cap = args.cap if args.cap is not None else EXHAUSTIVE_CAP
    rows = f_table(G, cap=cap, workers=args.workers)
    return {"group": G, "inputs": {"cap": cap}, "table": [list(r) for r in rows],
            "outputs": {"a_G": largest_sumfree_size(rows), "rows": len(rows)}}


def cmd_minimize(args) -> dict[str, Any]:
    G = _group(args)
    _need(args, "a")
    cap = args.cap if args.cap is not None else EXHAUSTIVE_CAP
    if G.order <= cap:
        res = brute_force_min(G, args.a, args.enumerate_minimizers, workers=args.workers, cap=cap)
    else:
        res = sampled_min(G, args.a, args.trials, seed=args.seed)
    outputs = {
        "a": args.a,
        "f": res.f_value,
        "exhaustive": res.exhaustive,
        "minimizer_count": res.minimizer_count if res.exhaustive else None,
        "minimizers": res.minimizers,
        "subsets": res.stats["subsets"],
    }
    return {"group": G, "inputs": {"a": args.a, "cap": cap, "trials": None if res.exhaustive else args.trials},
            "outputs": outputs}


def _suite_params(args) -> dict[str, Any]:
    params: dict[str, Any] = {"seed": args.seed}
    if args.p is not None:
        params["primes"] = (args.p,)
    if args.n is not None:
        params["ns"] = (args.n,)
    if args.group is not None:
        params["groups"] = (args.group,)
    if args.trials is not None:
        params.update(trials=args.trials, instances=args.trials, cases=args.trials)
    if args.delta is not None:
        params["delta"] = args.delta
    return params


def cmd_verify(args) -> dict[str, Any]:
    name = args.theorem
    if name == "all":
        names = tuple(SUITES)
    elif name in CRITERIA:
        names = CRITERIA[name]
    elif name in SUITES:
        names = (name,)
    else:
        raise InputError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}, AC-1..AC-11 or all")
    params = _suite_params(args)
    results = {}
    ok = True
    for n in names:
        res = run_suite(n, **params)
        ok &= res.passed
        results[n] = {
            "criterion": res.criterion,
            "passed": res.passed,
            "checks": res.checks,
            "failures": res.failures[:20],
            "records": res.records,
        }
    return {"group": None, "inputs": {"suite": name, "params": {k: v for k, v in params.items()}},
            "outputs": results, "passed": ok}


def cmd_removal(args) -> dict[str, Any]:
    G, A = _load_set(args)
    _need(args, "eps")
    B, rep = sumfree_removal(A, args.eps)
    outputs = {
        "B": B,
        "size_B": B.cardinality,
        "st_A": rep.st_A,
        "c_size": rep.c_size,
        "overlap_size": rep.overlap_size,
        "removed": rep.removed,
        "eps_n": rep.eps * G.order,
        "preconditions_met": rep.preconditions_met,
        "violations": list(rep.violations),
        "B_sum_free": is_sum_free(B),
    }
    ok = (not rep.preconditions_met) or (outputs["B_sum_free"] and rep.removed <= rep.eps * G.order)
    return {"group": G, "inputs": {"elements": A, "eps": rep.eps}, "outputs": outputs, "passed": ok}


def cmd_spectrum(args) -> dict[str, Any]:
    G, A = _load_set(args)
    spec = cayley_spectrum(A, directed=args.directed)
    exact = spec.r_min_exact is not None
    r_min = spec.r_min_exact if exact else _lower_rational(spec.r_min)
    outputs: dict[str, Any] = {
        "directed": args.directed,
        "degree": A.cardinality,
        "r_min": r_min,
        "exact": exact,
    }
    if not args.directed:
        outputs["lambda_min"] = spec.lambda_min_exact if exact else r_min
    return {"group": G, "inputs": {"elements": A, "directed": args.directed}, "outputs": outputs}


COMMANDS = {
    "count": cmd_count,
    "construct": cmd_construct,
    "bound": cmd_bound,
    "table": cmd_table,
    "minimize": cmd_minimize,
    "verify": cmd_verify,
    "removal": cmd_removal,
    "spectrum": cmd_spectrum,
}


# ---------------------------------------------------------------------------
# argument parsing


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-g", "--group", help="group spec such as Z7, Z2^3 or Z3xZ7")
    common.add_argument("-e", "--elements", nargs="?", const="", help="canonical indices, comma separated")
    common.add_argument("-E", "--coords", help="coordinates, e.g. '(1,0);(1,1)'")
    common.add_argument("--file", help="set file with group=, elements= and optional sha256= lines")
    common.add_argument("-p", type=int)
    common.add_argument("-a", type=int)
    common.add_argument("-t", type=int)
    common.add_argument("-n", type=int)
    common.add_argument("--eps", type=_fraction)
    common.add_argument("--delta", type=_fraction, help="override the theorem's delta")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--cap", type=int, help="largest group order searched exhaustively")
    common.add_argument("--trials", type=int, help="sample count for randomised paths")
    common.add_argument("--enumerate-minimizers", action="store_true")
    common.add_argument("--format", choices=("human", "json", "csv"), default="human")

    parser = argparse.ArgumentParser(prog="schur", description="Schur triples in finite abelian groups.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)
    p = sub.add_parser("count", parents=[common], help="count Schur triples of a set")
    p.add_argument("--per-element", action="store_true", help="also report triples through each element")
    for verb, what in (("construct", "build an extremal set"), ("bound", "evaluate a lower bound")):
        p = sub.add_parser(verb, parents=[common], help=what)
        p.add_argument("theorem", choices=("zp", "z2n", "typeI", "z3n", "z3zp"))
    sub.add_parser("table", parents=[common], help="exhaustive f_G table")
    sub.add_parser("minimize", parents=[common], help="minimum ST over a-subsets")
    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("theorem", metavar="suite", help=f"one of {', '.join(SUITES)}, AC-1..AC-11 or all")
    sub.add_parser("removal", parents=[common], help="strip a nearly sum-free set")
    p = sub.add_parser("spectrum", parents=[common], help="smallest Cayley graph eigenvalue")
    p.add_argument("--directed", action="store_true")
    return parser


def _execute(args, argv: Sequence[str]) -> RunReport:
    if args.trials is None and args.verb == "minimize":
        args.trials = 10_000
    start = time.perf_counter()
    res = COMMANDS[args.verb](args)
    G = res.get("group")
    return RunReport(
        command=list(argv),
        group=G.name if G is not None else None,
        inputs=res.get("inputs", {}),
        outputs=res["outputs"],
        seed=args.seed,
        passed=res.get("passed", True),
        wall_time_us=int((time.perf_counter() - start) * 1e6),
        table=res.get("table"),
    )


def run(argv: Sequence[str]) -> RunReport:
    """Execute one command and return its report (raises on bad input)."""
    return _execute(build_parser().parse_args(list(argv)), argv)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        report = _execute(args, argv)
    except InputError as exc:
        print(f"schur: input error: {exc}", file=sys.stderr)
        return 2
    except GroupSpecError as exc:
        print(f"schur: group spec error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, SearchFailure) as exc:
        print(f"schur: error: {exc}", file=sys.stderr)
        return 2
    print(report.render(args.format))
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
