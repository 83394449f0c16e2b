"""``firstint`` command line: reduce, verify, genus, hermite, residues."""

from __future__ import annotations

import argparse
import json
import signal
import sys
import time
from contextlib import contextmanager

from .field import (
    NONE_FOUND, NOT_HANDLED, REDUCED, Darbouxian, Liouvillian, Rational, Riccati,
    SpecError, VectorField, verify_integral_spec,
)
from .kernel import KernelError, ParseError, format_poly, parse_poly, parse_ratfunc
from .pipeline import PipelineConfig, run_pipeline

EXIT_CODES = {REDUCED: 0, NONE_FOUND: 1, NOT_HANDLED: 2}
EXIT_ERROR = 3


class InputError(ValueError):
    """Malformed problem file."""


class Timeout(Exception):
    pass


# ---------------------------------------------------------------------------
# problem files
# ---------------------------------------------------------------------------

def parse_spec(data):
    """An integral spec from the ``integral`` object of a problem file."""
    cls = data.get("class")
    if cls in ("riccati", "liouvillian"):
        F = parse_ratfunc(data["F"])
        return Riccati(F) if cls == "riccati" else Liouvillian(F)
    if cls == "darbouxian":
        return Darbouxian(int(data["k"]), parse_ratfunc(data["Fk"]))
    if cls == "rational":
        return Rational(parse_ratfunc(data["J"]))
    raise InputError(f"unknown integral class {cls!r}")


def load_problem(path):
    """``(X, spec, options)`` from a JSON problem file."""
    with open(path) as fh:
        data = json.load(fh)
    for key in ("A", "B", "integral"):
        if key not in data:
            raise InputError(f"missing key {key!r}")
    X = VectorField(parse_poly(data["A"]), parse_poly(data["B"]))
    return X, parse_spec(data["integral"]), data.get("options", {})


def make_config(options, args):
    caps = options.get("caps", {})
    cfg = PipelineConfig(seed=int(options.get("seed", 0)))
    if caps.get("max_degree") is not None:
        cfg.max_degree = int(caps["max_degree"])
    if caps.get("torsion_cap") is not None:
        cfg.torsion_cap = int(caps["torsion_cap"])
    if caps.get("torsion_oracle") is not None:
        cfg.torsion_oracle = caps["torsion_oracle"]
    if caps.get("max_x_degree_cap") is not None:
        cfg.ansatz.max_x_degree_cap = int(caps["max_x_degree_cap"])
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "max_degree", None) is not None:
        cfg.max_degree = args.max_degree
    if getattr(args, "torsion_cap", None) is not None:
        cfg.torsion_cap = args.torsion_cap
    cfg.ansatz.seed = cfg.seed
    return cfg


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def spec_record(spec):
    if spec is None:
        return None
    return {"class": spec.name, **spec.equations()}


def _trace_entries(out, full):
    if full:
        return [e.as_dict() for e in out.trace]
    return [{"step": e.step, "status": e.status} for e in out.trace]


def reduce_report(X, spec, result, config, timings, full_trace):
    return {
        "command": "reduce",
        "outcome": result.result,
        "input": {"A": format_poly(X.A), "B": format_poly(X.B), "integral": spec_record(spec)},
        "reduced": spec_record(result.spec) if result.spec is not spec else None,
        "class": result.spec.name,
        "stages": [
            {"algorithm": s.algorithm, "outcome": s.outcome.result,
             "spec": spec_record(s.outcome.spec), "trace": _trace_entries(s.outcome, full_trace)}
            for s in result.stages
        ],
        "config": config.as_dict(),
        "timings": timings,
    }


def emit(report):
    sys.stdout.write(json.dumps(report, indent=2, default=str) + "\n")


def error_report(command, exc):
    return {"command": command, "outcome": "Error", "error": type(exc).__name__, "message": str(exc)}


@contextmanager
def time_limit(seconds):
    if not seconds:
        yield
        return

    def handler(signum, frame):
        raise Timeout(f"timeout after {seconds} s")

    old = signal.signal(signal.SIGALRM, handler)
    signal.alarm(int(seconds))
    try:
        yield
    finally:
        signal.alarm(0)
        signal.signal(signal.SIGALRM, old)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_reduce(args):
    X, spec, options = load_problem(args.input)
    config = make_config(options, args)
    t0 = time.perf_counter()
    with time_limit(args.timeout_seconds):
        result = run_pipeline(X, spec, config)
    timings = {"total_seconds": round(time.perf_counter() - t0, 3)}
    emit(reduce_report(X, spec, result, config, timings, args.trace))
    return EXIT_CODES[result.result]


def cmd_verify(args):
    X, spec, _ = load_problem(args.input)
    ok = verify_integral_spec(X, spec)
    emit({"command": "verify", "valid": ok, "integral": spec_record(spec)})
    return 0 if ok else EXIT_ERROR


def cmd_genus(args):
    from .superelliptic import SuperellipticCurve, genus
    print(genus(SuperellipticCurve.from_poly(args.k, parse_poly(args.S))))
    return 0


def _darbouxian_form(args):
    from .oneform import make_oneform
    X, spec, _ = load_problem(args.input)
    if not isinstance(spec, Darbouxian):
        raise InputError("a Darbouxian integral is required")
    if not verify_integral_spec(X, spec):
        raise SpecError("the integral does not verify against the vector field")
    return X, spec, make_oneform(X, spec.Fk, spec.k)


def cmd_hermite(args):
    from .oneform import hermite_reduction, subtract_differential
    _, spec, w = _darbouxian_form(args)
    G = hermite_reduction(w)
    rep = {"command": "hermite", "k": spec.k, "found": G is not None}
    if G is not None:
        rest = subtract_differential(w, G)
        rep["G"] = {"U": format_poly(G.U), "V": format_poly(G.V), "S": format_poly(G.S)}
        rep["constant"] = G.is_constant()
        rep["remainder"] = {"P1": format_poly(rest.P1), "P2": format_poly(rest.P2),
                            "Q": format_poly(rest.Q), "S": format_poly(rest.S)}
    emit(rep)
    return 0


def cmd_residues(args):
    import random
    from .darbouxian import choose_base_point, squared_residues
    from .kernel import rational_roots
    from .oneform import residue_poly_to_univariate, restrict_to_line, trager_residue_poly
    _, spec, w = _darbouxian_form(args)
    x0, y0 = choose_base_point(w, random.Random(args.seed or 0))
    L = restrict_to_line(w, x0, y0)
    rep = {"command": "residues", "k": spec.k, "base_point": [str(x0), str(y0)]}
    if spec.k == 1:
        R = residue_poly_to_univariate(trager_residue_poly(L))
        roots, all_rat = rational_roots(R) if not R.is_ground else ([], True)
        rep.update(residue_polynomial=format_poly(R), rational_residues=[str(r) for r, _ in roots],
                   all_rational=all_rat)
    elif spec.k == 2:
        mus, all_rat = squared_residues(L)
        rep.update(squared_residues=[str(m) for m in mus], all_rational=all_rat)
    else:
        raise InputError("residues are reported for k = 1 and k = 2")
    emit(rep)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="firstint", description="Reduction of symbolic first integrals.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", required=True)
        p.add_argument("--seed", type=int)
        p.add_argument("--max-degree", type=int)
        p.add_argument("--torsion-cap", type=int)
        p.add_argument("--timeout-seconds", type=int)
        p.add_argument("--trace", action="store_true")

    for name in ("reduce", "verify", "hermite", "residues"):
        common(sub.add_parser(name))
    g = sub.add_parser("genus")
    g.add_argument("k", type=int)
    g.add_argument("S")
    return ap


COMMANDS = {"reduce": cmd_reduce, "verify": cmd_verify, "genus": cmd_genus,
            "hermite": cmd_hermite, "residues": cmd_residues}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (InputError, ParseError, KernelError, SpecError, Timeout, ValueError, OSError,
            json.JSONDecodeError, KeyError) as exc:
        emit(error_report(args.command, exc))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
