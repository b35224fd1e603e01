"""Command-line interface: ``sanov {exact,bounds,iproject,sweep,verify,mc} --spec FILE``.

Exit codes: 0 success, 1 internal error or failed verification, 2 invalid
input, 3 enumeration budget exceeded, 4 empty event, 5 infeasible projection.
Errors are reported as a JSON body ``{"error": {...}}`` on the same stream as
the report would have gone.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

from . import __version__
from .bounds import full_report, sweep
from .conditional import summarize
from .constraints import ConstraintSet, LinearConstraint
from .errors import (CapacityError, DimensionError, EmptyEventError, InfeasibleError,
                     InfiniteDivergenceError, PreconditionError, SanovError, ValidationError)
from .iprojection import project, pythagorean_residual
from .measures import Dist
from .montecarlo import estimate
from .reports import (bounds_dict, check_dict, dumps, mc_dict, problem_dict, projection_dict,
                      real, residual_dict, summary_dict, sweep_csv)
from .typespace import default_budget, type_count
from .verify import verify_suite

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_VALIDATION = 2
EXIT_CAPACITY = 3
EXIT_EMPTY = 4
EXIT_INFEASIBLE = 5

DEFAULT_SEED = 0
DEFAULT_TRIALS = 100_000

SPEC_KEYS = {"p", "n", "n_values", "constraints", "subset_constraints", "seed", "trials",
             "budget", "q", "test_points"}


@dataclass
class ProblemSpec:
    p: Dist
    constraints: ConstraintSet
    n: int | None = None
    n_values: list[int] | None = None
    subset: ConstraintSet | None = None
    seed: int | None = None
    trials: int | None = None
    budget: int | None = None
    q: Dist | None = None
    test_points: list[Dist] = field(default_factory=list)


def _fail(path: str, message: str):
    raise ValidationError(f"{path}: {message}")


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        _fail(path, f"expected a finite number, got {value!r}")
    return float(value)


def _integer(value, path, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        _fail(path, f"must be at least {minimum}, got {value}")
    return value


def _vector(value, path, length=None):
    if not isinstance(value, list):
        _fail(path, f"expected a list of numbers, got {type(value).__name__}")
    out = [_number(v, f"{path}[{i}]") for i, v in enumerate(value)]
    if length is not None and len(out) != length:
        _fail(path, f"expected {length} entries (the length of p), got {len(out)}")
    return out


def _dist(value, path, length=None):
    probs = _vector(value, path, length)
    try:
        return Dist(probs)
    except ValidationError as exc:
        _fail(path, str(exc))


def _constraint_set(value, path, k):
    if not isinstance(value, list) or not value:
        _fail(path, "expected a nonempty list of constraints")
    cons = []
    for i, item in enumerate(value):
        where = f"{path}[{i}]"
        if not isinstance(item, dict):
            _fail(where, "expected an object with keys f, relation, alpha")
        extra = set(item) - {"f", "relation", "alpha"}
        if extra:
            _fail(where, f"unknown keys {sorted(extra)}")
        for key in ("f", "relation", "alpha"):
            if key not in item:
                _fail(where, f"missing key {key!r}")
        f = _vector(item["f"], f"{where}.f", k)
        if item["relation"] not in ("eq", "ge", "le"):
            _fail(f"{where}.relation", f"expected 'eq', 'ge' or 'le', got {item['relation']!r}")
        cons.append(LinearConstraint(f, item["relation"], _number(item["alpha"], f"{where}.alpha")))
    return ConstraintSet(tuple(cons))


def parse_spec(obj) -> ProblemSpec:
    """Validate a decoded problem-spec JSON object."""
    if not isinstance(obj, dict):
        _fail("$", "expected a JSON object")
    extra = set(obj) - SPEC_KEYS
    if extra:
        _fail("$", f"unknown keys {sorted(extra)}")
    if "p" not in obj:
        _fail("$", "missing key 'p'")
    if "constraints" not in obj:
        _fail("$", "missing key 'constraints'")
    p = _dist(obj["p"], "p")
    spec = ProblemSpec(p=p, constraints=_constraint_set(obj["constraints"], "constraints", p.k))
    if "n" in obj:
        spec.n = _integer(obj["n"], "n", 1)
    if "n_values" in obj:
        if not isinstance(obj["n_values"], list) or not obj["n_values"]:
            _fail("n_values", "expected a nonempty list of sample sizes")
        spec.n_values = [_integer(v, f"n_values[{i}]", 1) for i, v in enumerate(obj["n_values"])]
    if "subset_constraints" in obj:
        spec.subset = _constraint_set(obj["subset_constraints"], "subset_constraints", p.k)
    if "seed" in obj:
        spec.seed = _integer(obj["seed"], "seed", 0)
        if spec.seed >= 2**64:
            _fail("seed", "must fit in 64 unsigned bits")
    if "trials" in obj:
        spec.trials = _integer(obj["trials"], "trials", 1)
    if "budget" in obj:
        spec.budget = _integer(obj["budget"], "budget", 1)
    if "q" in obj:
        spec.q = _dist(obj["q"], "q", p.k)
    if "test_points" in obj:
        if not isinstance(obj["test_points"], list):
            _fail("test_points", "expected a list of distributions")
        spec.test_points = [_dist(v, f"test_points[{i}]", p.k)
                            for i, v in enumerate(obj["test_points"])]
    return spec


def load_spec(text: str, source: str = "<spec>") -> ProblemSpec:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_spec(obj)


def _sample_size(spec: ProblemSpec) -> int:
    if spec.n is None:
        _fail("n", "this command needs a sample size 'n'")
    return spec.n


def _budget(args, spec: ProblemSpec) -> int:
    if args.budget is not None:
        return args.budget
    if spec.budget is not None:
        return spec.budget
    return default_budget()


def cmd_exact(args, spec: ProblemSpec):
    n = _sample_size(spec)
    summary = summarize(spec.p, n, spec.constraints, _budget(args, spec))
    return EXIT_OK, {"command": "exact", **problem_dict(spec.p, spec.constraints),
                     **summary_dict(summary)}


def cmd_bounds(args, spec: ProblemSpec):
    n = _sample_size(spec)
    subset = None
    if args.subset:
        subset = spec.subset if spec.subset is not None else spec.constraints
    report = full_report(spec.p, n, spec.constraints, _budget(args, spec), subset=subset)
    return EXIT_OK, {"command": "bounds", **problem_dict(spec.p, spec.constraints),
                     **bounds_dict(report)}


def cmd_iproject(args, spec: ProblemSpec):
    proj = project(spec.p, spec.constraints)
    points = [residual_dict(q, pythagorean_residual(spec.p, spec.constraints, q, proj))
              for q in spec.test_points]
    return EXIT_OK, {"command": "iproject", **problem_dict(spec.p, spec.constraints),
                     "linear_family": spec.constraints.is_linear_family(),
                     **projection_dict(proj), "pythagorean": points}


def cmd_sweep(args, spec: ProblemSpec):
    if spec.n_values is not None:
        n_values = spec.n_values
    elif spec.n is not None:
        n_values = [spec.n]
    else:
        _fail("n_values", "sweep needs 'n_values' (or 'n')")
    entries = sweep(spec.p, spec.constraints, n_values, _budget(args, spec))
    return EXIT_OK, sweep_csv(entries)


def cmd_verify(args, spec: ProblemSpec):
    n = _sample_size(spec)
    checks = verify_suite(spec.p, n, spec.constraints, q=spec.q, subset=spec.subset,
                          budget=_budget(args, spec))
    for c in checks:
        residual = "-" if c.residual is None else f"{c.residual:.3e}"
        print(f"{c.status.upper():4} {c.name:32} residual={residual} tol={c.tolerance:.0e}",
              file=sys.stderr)
    passed = all(c.passed for c in checks)
    body = {"command": "verify", **problem_dict(spec.p, spec.constraints), "n": n,
            "passed": passed, "checks": [check_dict(c) for c in checks]}
    return (EXIT_OK if passed else EXIT_INTERNAL), body


def cmd_mc(args, spec: ProblemSpec):
    n = _sample_size(spec)
    seed = args.seed if args.seed is not None else (spec.seed if spec.seed is not None else DEFAULT_SEED)
    trials = args.trials if args.trials is not None else (spec.trials or DEFAULT_TRIALS)
    est = estimate(spec.p, n, spec.constraints, trials, seed)
    body = {"command": "mc", **problem_dict(spec.p, spec.constraints), "n": n, **mc_dict(est)}
    budget = _budget(args, spec)
    if type_count(spec.p.k, n) <= budget:
        try:
            exact = summarize(spec.p, n, spec.constraints, budget).prob_event
        except EmptyEventError:
            exact = 0.0
        body["exact_prob_event"] = real(exact)
        body["exact_in_interval"] = est.covers(exact)
    else:
        body["exact_prob_event"] = None
        body["exact_in_interval"] = None
    return EXIT_OK, body


COMMANDS = {
    "exact": (cmd_exact, "exact event probability, marginal and total correlation"),
    "bounds": (cmd_bounds, "exact rate together with every upper and lower bound"),
    "iproject": (cmd_iproject, "I-projection, multipliers and Pythagorean residuals"),
    "sweep": (cmd_sweep, "CSV of rates and bounds across sample sizes"),
    "verify": (cmd_verify, "run the identity suite and report pass/fail per check"),
    "mc": (cmd_mc, "Monte Carlo estimate with a Wilson interval"),
}


class _Parser(argparse.ArgumentParser):
    """Usage errors become a JSON error body with the validation exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stdout.write(dumps(_error_body(ValidationError(message), EXIT_VALIDATION)))
        sys.exit(EXIT_VALIDATION)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sanov", description="Exact probabilities, bounds and I-projections "
                     "for the empirical distribution of an i.i.d. sample.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--spec", required=True, help="problem spec JSON file ('-' for stdin)")
        p.add_argument("--budget", type=int, help="type-enumeration budget "
                       "(default: spec 'budget', then $SANOV_BUDGET, then 2e7)")
        p.add_argument("--out", help="write the report here instead of stdout")
        if name == "bounds":
            p.add_argument("--subset", action="store_true",
                           help="include the subset bound for 'subset_constraints' (or A itself)")
        if name == "mc":
            p.add_argument("--seed", type=int, help="unsigned 64-bit seed")
            p.add_argument("--trials", type=int, help="number of simulated samples")
    return parser


def _error_body(exc: BaseException, code: int) -> dict:
    err = {"type": type(exc).__name__, "exit_code": code, "message": str(exc)}
    if isinstance(exc, InfeasibleError):
        err["certificate_index"] = exc.certificate_index
        if exc.achievable_range is not None:
            err["achievable_range"] = [real(x) for x in exc.achievable_range]
    if isinstance(exc, CapacityError):
        err["required"] = exc.required
        err["budget"] = exc.budget
    return {"error": err}


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, (ValidationError, DimensionError, PreconditionError)):
        return EXIT_VALIDATION
    if isinstance(exc, CapacityError):
        return EXIT_CAPACITY
    if isinstance(exc, EmptyEventError):
        return EXIT_EMPTY
    if isinstance(exc, (InfeasibleError, InfiniteDivergenceError)):
        return EXIT_INFEASIBLE
    return EXIT_INTERNAL


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = COMMANDS[args.command][0]
    try:
        for flag in ("budget", "trials"):
            value = getattr(args, flag, None)
            if value is not None and value < 1:
                _fail(f"--{flag}", f"must be positive, got {value}")
        if getattr(args, "seed", None) is not None and not 0 <= args.seed < 2**64:
            _fail("--seed", "must be an unsigned 64-bit integer")
        if args.spec == "-":
            text, source = sys.stdin.read(), "<stdin>"
        else:
            try:
                with open(args.spec, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ValidationError(f"{args.spec}: {exc.strerror}") from None
            source = args.spec
        spec = load_spec(text, source)
        spec.constraints.check_feasible()
        code, body = handler(args, spec)
    except SanovError as exc:
        code = _exit_code(exc)
        _emit(dumps(_error_body(exc, code)), args.out)
        return code
    except Exception as exc:  # noqa: BLE001 - surfaced as exit code 1 with a JSON body
        _emit(dumps(_error_body(exc, EXIT_INTERNAL)), args.out)
        return EXIT_INTERNAL
    _emit(body if isinstance(body, str) else dumps(body), args.out)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
