"""primereg: polynomial equations over the primes, from verdicts to desk-scale counts.

Every command prints a JSON payload on stdout. With ``--out DIR`` (or the
``PRIMEREG_OUT`` environment variable) the payload is also written to
``DIR/<command>.json`` together with a run manifest holding timings.

Exit codes: 0 success, 2 verdict NO, 1 error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import BACKEND
from .errors import PrimeregError
from .poly import IntPoly, parse_poly

EXIT_OK, EXIT_ERROR, EXIT_NO = 0, 1, 2
ENV_OUT = "PRIMEREG_OUT"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2, which is reserved for NO verdicts
        raise UsageError(f"{self.prog}: {message}")


# --------------------------------------------------------------------------
# value parsing


def int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from exc


def fraction_list(text: str) -> list[Fraction]:
    return [fraction(t) for t in text.split(",") if t.strip()]


def poly_arg(text: str) -> IntPoly:
    try:
        return parse_poly(text)
    except (ValueError, PrimeregError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, IntPoly):
        return str(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def dumps(payload) -> str:
    return json.dumps(jsonable(payload), sort_keys=True, indent=2) + "\n"


# --------------------------------------------------------------------------
# manifest


@dataclass
class RunManifest:
    command: str
    params: dict
    seed: int
    version: str
    backend: str
    wall_time: float
    outputs_digest: str

    def to_json(self) -> str:
        return dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> RunManifest:
        return cls(**json.loads(text))

    def argv(self) -> list[str]:
        """Command line that reproduces the run."""
        out = self.command.split()
        for k, v in sorted(self.params.items()):
            if v is None or v is False or k in ("config", "out"):
                continue
            flag = "--" + k.replace("_", "-")
            if v is True:
                out.append(flag)
            elif isinstance(v, list):
                out += [flag, ",".join(str(x) for x in v)]
            else:
                out += [flag, str(v)]
        return out


# --------------------------------------------------------------------------
# command implementations; each returns (payload, exit code)


def cmd_intersective_check(ns):
    from .intersective import is_intersective_second_kind

    v = is_intersective_second_kind(ns.poly, ns.bound, ns.power_policy, ns.policy, ns.threads)
    return {"poly": ns.poly, "verdict": v.to_dict(include_certs=ns.certs)}, (EXIT_OK if v.is_yes else EXIT_NO)


def cmd_auxpoly(ns):
    from .intersective import aux_poly, check_aux, content_bound_scan

    out: dict = {"poly": ns.poly}
    if ns.D is not None:
        a = aux_poly(ns.poly, ns.D, ns.policy)
        out["aux"] = a.to_dict()
        out["h_D"] = str(a.h_D)
        out["violations"] = check_aux(ns.poly, a)
    if ns.Dmax is not None:
        scan = content_bound_scan(ns.poly, ns.Dmax, ns.policy)
        out["content_scan"] = {"Dmax": ns.Dmax, "maximum": scan.maximum, "argmax": scan.argmax, "skipped": scan.skipped}
    if len(out) == 1:
        raise UsageError("auxpoly needs --D or --Dmax")
    return out, EXIT_OK


def cmd_expsum_complete(ns):
    from .expsums import CompleteSumSpec, complete_sum

    spec = CompleteSumSpec(ns.poly, ns.Q, ns.q, ns.a, ns.m, ns.b)
    return {"poly": ns.poly, "Q": ns.Q, "q": ns.q, "a": ns.a, "m": ns.m, "b": ns.b, "value": complete_sum(spec)}, EXIT_OK


def _weyl_spec(ns, theta):
    from .expsums import WeylSpec

    return WeylSpec(ns.poly, theta, ns.P, ns.lam, ns.m, ns.b, ns.weight)


def cmd_expsum_weyl(ns):
    from .expsums import prime_weyl_sum

    val = prime_weyl_sum(_weyl_spec(ns, ns.theta), threads=ns.threads)
    return {"poly": ns.poly, "theta": ns.theta, "P": ns.P, "lam": ns.lam, "m": ns.m, "b": ns.b,
            "weight": ns.weight, "value": val}, EXIT_OK


def cmd_expsum_predict(ns):
    from .expsums import major_arc_check

    theta = Fraction(ns.a, ns.q) + ns.beta
    r = major_arc_check(_weyl_spec(ns, theta), ns.q, ns.a, ns.threads)
    return {"poly": ns.poly, "q": ns.q, "a": ns.a, "beta": ns.beta, "P": ns.P, "weight": ns.weight,
            "direct": r.direct, "prediction": r.prediction, "rel_error": r.rel_error,
            "normalised_by": r.normalised_by}, EXIT_OK


def cmd_arc_classify(ns):
    from .expsums import ArcParams, classify_arc

    params = ArcParams(ns.d, ns.X, ns.sigma, ns.exponent)
    c = classify_arc(ns.alpha, params)
    out = {"alpha": ns.alpha, "d": ns.d, "X": ns.X, "sigma_d": params.sigma_d, "C_d": params.C_d,
           "log_T": params.log_T, "classification": c.to_dict()}
    if params.degenerate:
        out["warning"] = "(log X)^(2 C_d) >= X^(1/4): the arc dichotomy is uninformative at this scale"
        print(f"warning: {out['warning']}", file=sys.stderr)
    return out, EXIT_OK


def cmd_weights(ns):
    from . import weights as wt

    params = wt.build_wtrick(ns.poly, ns.w, ns.gamma, ns.X, ns.C, ns.policy, align=ns.align)
    out: dict = {"params": params.to_dict(), "identities": params.identities()}
    tables = {"nu": wt.build_nu, "mu": wt.build_mu}
    if ns.table:
        t = tables[ns.table](params)
        out["table"] = {"kind": ns.table, "N": t.N, "support": len(t), "mass": t.mass, "params_hash": t.params_hash}
        if ns.save:
            path = Path(ns.save)
            path.write_bytes(t.to_bytes()) if path.suffix == ".bin" else path.write_text(t.to_json())
            out["table"]["saved"] = str(path)
        if ns.decay:
            rep = wt.decay_report(t, params.N, ns.samples)
            out["decay"] = {"max": rep.max_value, "argmax_alpha": rep.argmax_alpha, "alpha0_row": rep.alpha0_row}
    if ns.vanishing:
        rows = [{"q": q, "abs_S": abs(wt.wtrick_S(params, q, 1))} for q in range(2, ns.vanishing + 1)
                if math.gcd(q, params.W) > 1]
        out["vanishing"] = {"max_abs": max((r["abs_S"] for r in rows), default=0.0), "rows": rows}
    return out, EXIT_OK


def _bohr_spec(ns):
    from .bohr import BohrSpec, random_alpha

    if ns.alpha:
        alpha = tuple(ns.alpha)
    else:
        alpha = random_alpha(np.random.default_rng(ns.seed), ns.K)
    return BohrSpec(ns.poly, alpha, ns.rho, ns.P, ns.D, ns.policy)


def cmd_bohr_census(ns):
    from .bohr import bohr_enumerate

    spec = _bohr_spec(ns)
    c = bohr_enumerate(spec, ns.threads)
    return {"spec": spec.to_dict(), "seed": ns.seed, "census": c.to_dict(), "partition_ok": c.partition_ok()}, EXIT_OK


def cmd_bohr_certify(ns):
    from .bohr import density_certificate

    spec = _bohr_spec(ns)
    r = density_certificate(spec, ns.eps, threads=ns.threads)
    return {"spec": spec.to_dict(), "seed": ns.seed, "certificate": r.to_dict()}, (EXIT_OK if r.passed else EXIT_NO)


def cmd_bohr_harman(ns):
    from .bohr import harman_search

    spec = _bohr_spec(ns)
    w = harman_search(spec, threads=ns.threads)
    return {"spec": spec.to_dict(), "seed": ns.seed, "witness": w.to_dict()}, EXIT_OK


def cmd_bohr_exponent(ns):
    from .bohr import delta_exponent

    return {"K": ns.K, "d": ns.d, "eps": ns.eps, "exponent": delta_exponent(ns.K, ns.d, ns.eps)}, EXIT_OK


def _equation(ns):
    from .ramsey import EquationSpec

    return EquationSpec(tuple(ns.a), ns.b, ns.poly)


def cmd_regular_verdict(ns):
    from .ramsey import pr_verdict

    spec = _equation(ns)
    v = pr_verdict(spec, ns.bound, ns.threads)
    return {"equation": spec.to_dict(), "verdict": v.to_dict()}, (EXIT_OK if v.pr else EXIT_NO)


def _coloring(ns):
    from .ramsey import Coloring

    if ns.coloring:
        return Coloring.from_dict(json.loads(Path(ns.coloring).read_text()))
    return Coloring(ns.r, ns.policy, ns.seed, ns.modulus)


def cmd_count_mono(ns):
    from .ramsey import color_experiment

    spec, col = _equation(ns), _coloring(ns)
    rep = color_experiment(ns.N, col, spec)
    return {"equation": spec.to_dict(), "coloring": col.to_dict(), "report": rep.to_dict()}, EXIT_OK


def cmd_count_dense(ns):
    from .ramsey import dense_experiment

    spec = _equation(ns)
    rep = dense_experiment(ns.N, ns.delta, spec, ns.selection, ns.seed)
    return {"equation": spec.to_dict(), "delta": ns.delta, "selection": ns.selection, "seed": ns.seed,
            "report": rep.to_dict()}, EXIT_OK


def cmd_count_exact(ns):
    from .numtheory import sieve_primes
    from .ramsey import count_solutions, scaling_ladder

    spec = _equation(ns)
    out: dict = {"equation": spec.to_dict()}
    if ns.ladder:
        lad = scaling_ladder(ns.ladder, spec)
        out["ladder"] = lad.to_dict()
        if ns.csv:
            Path(ns.csv).write_text(lad.to_csv())
        return out, EXIT_OK
    if ns.A:
        A = ns.A
    elif ns.N:
        A = sieve_primes(max(ns.N, 2)).upto(ns.N).tolist()
    else:
        raise UsageError("count exact needs --A, --N or --ladder")
    out["size"] = len(set(A))
    out["count"] = count_solutions(A, spec)
    return out, EXIT_OK


# --------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value file supplying defaults")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help=f"output directory (default ${ENV_OUT})")


def _poly(p, required=True, default=None):
    p.add_argument("--poly", type=poly_arg, required=required and default is None, default=default,
                   help='coefficients "c0,c1,..." or an expression such as "(x^2-13)(x^2-17)"')


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="primereg", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def leaf(parent, name, fn, help_):
        p = parent.add_parser(name, help=help_)
        _common(p)
        p.set_defaults(fn=fn)
        return p

    g = sub.add_parser("intersective", help="second-kind intersectivity").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = leaf(g, "check", cmd_intersective_check, "second-kind intersectivity verdict")
    _poly(p)
    p.add_argument("--bound", type=int, default=10**5)
    p.add_argument("--power-policy", choices=("hensel", "exhaustive"), default="hensel")
    p.add_argument("--policy", choices=("canonical", "smallest", "largest"), default="canonical")
    p.add_argument("--certs", action="store_true", help="include per-prime certificates")

    p = leaf(sub, "auxpoly", cmd_auxpoly, "auxiliary polynomial data")
    _poly(p)
    p.add_argument("--D", type=int)
    p.add_argument("--Dmax", type=int)
    p.add_argument("--policy", choices=("canonical", "smallest", "largest"), default="canonical")

    g = sub.add_parser("expsum", help="complete sums and prime Weyl sums").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = leaf(g, "complete", cmd_expsum_complete, "complete exponential sum S(q,a;m)")
    _poly(p)
    p.add_argument("--Q", type=int, default=1)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--b", type=int, default=0)
    for name, fn, h in (("weyl", cmd_expsum_weyl, "prime Weyl sum"), ("predict", cmd_expsum_predict, "major-arc check")):
        p = leaf(g, name, fn, h)
        _poly(p)
        p.add_argument("--P", type=int, default=10**6)
        p.add_argument("--lam", type=int, default=1)
        p.add_argument("--m", type=int, default=1)
        p.add_argument("--b", type=int, default=0)
        p.add_argument("--weight", choices=("unit", "log", "hprime", "hprime_log"), default="log")
        if name == "weyl":
            p.add_argument("--theta", type=fraction, default=Fraction(0))
        else:
            p.add_argument("--q", type=int, required=True)
            p.add_argument("--a", type=int, required=True)
            p.add_argument("--beta", type=fraction, default=Fraction(0))

    g = sub.add_parser("arc", help="major/minor arcs").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = leaf(g, "classify", cmd_arc_classify, "major/minor arc classification")
    p.add_argument("--alpha", type=fraction, required=True)
    p.add_argument("--X", type=float, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--sigma", type=int)
    p.add_argument("--exponent", type=float, help="replaces 2 C_d in the arc threshold")

    p = leaf(sub, "weights", cmd_weights, "W-trick parameters and weight tables")
    _poly(p)
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--gamma", type=int, default=1)
    p.add_argument("--C", type=int, default=1)
    p.add_argument("--X", type=int, required=True)
    p.add_argument("--align", action="store_true", help="shift X down to X = r_D (mod D)")
    p.add_argument("--policy", choices=("canonical", "smallest", "largest"), default="canonical")
    p.add_argument("--table", choices=("nu", "mu"))
    p.add_argument("--save", help="write the table (.bin for binary, JSON otherwise)")
    p.add_argument("--decay", action="store_true")
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--vanishing", type=int, metavar="QMAX", help="evaluate S(q,1) for q <= QMAX with (q,W) > 1")

    g = sub.add_parser("bohr", help="prime polynomial Bohr sets").add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, fn, h in (("census", cmd_bohr_census, "enumerate a prime Bohr set"),
                        ("certify", cmd_bohr_certify, "density floor certificate"),
                        ("harman", cmd_bohr_harman, "Harman dichotomy search")):
        p = leaf(g, name, fn, h)
        _poly(p, default=IntPoly((0, 0, 1)))
        p.add_argument("--D", type=int, default=1)
        p.add_argument("--alpha", type=fraction_list, help="phase vector; random (from --seed) when omitted")
        p.add_argument("--K", type=int, default=1)
        p.add_argument("--rho", type=fraction, required=True)
        p.add_argument("--P", type=int, required=True)
        p.add_argument("--policy", choices=("canonical", "smallest", "largest"), default="canonical")
        if name == "certify":
            p.add_argument("--eps", type=float, default=0.0)
    p = leaf(g, "exponent", cmd_bohr_exponent, "density exponent E(K, d)")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--eps", type=float, default=0)

    g = sub.add_parser("regular", help="regularity verdicts for a_1 h(x_1) + ... + a_s h(x_s) = b").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = leaf(g, "verdict", cmd_regular_verdict, "partition/density regularity verdicts")
    _poly(p)
    p.add_argument("--a", type=int_list, required=True)
    p.add_argument("--b", type=int, default=0)
    p.add_argument("--bound", type=int, default=10**5)

    g = sub.add_parser("count", help="solution counts over primes").add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, fn, h in (("mono", cmd_count_mono, "monochromatic counts under a colouring"),
                        ("dense", cmd_count_dense, "counts in a dense subset of primes"),
                        ("exact", cmd_count_exact, "exact distinct-solution count")):
        p = leaf(g, name, fn, h)
        _poly(p)
        p.add_argument("--a", type=int_list, required=True)
        p.add_argument("--b", type=int, default=0)
        if name == "mono":
            p.add_argument("--N", type=int, required=True)
            p.add_argument("--r", type=int, default=2)
            p.add_argument("--policy", choices=("random", "residue", "blocks"), default="random")
            p.add_argument("--modulus", type=int, default=2)
            p.add_argument("--coloring", help="JSON colouring file")
        elif name == "dense":
            p.add_argument("--N", type=int, required=True)
            p.add_argument("--delta", type=float, required=True)
            p.add_argument("--selection", choices=("random", "top", "ap"), default="random")
        else:
            p.add_argument("--N", type=int)
            p.add_argument("--A", type=int_list)
            p.add_argument("--ladder", type=int_list, help="comma list of N values")
            p.add_argument("--csv", help="CSV file for the ladder")
    return ap


def read_config(path: str) -> dict[str, str]:
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line without '=': {raw!r}")
        k, v = line.split("=", 1)
        out[k.strip().lstrip("-").replace("-", "_")] = v.strip()
    return out


def _leaf_options(parser: argparse.ArgumentParser, cmd: list[str]) -> set[str] | None:
    """Option strings of the subcommand named by cmd, or None if cmd is not a full command."""
    p = parser
    for word in cmd:
        subs = [a for a in p._actions if isinstance(a, argparse._SubParsersAction)]
        if not subs or word not in subs[0].choices:
            return None
        p = subs[0].choices[word]
    if any(isinstance(a, argparse._SubParsersAction) for a in p._actions):
        return None
    return {o for a in p._actions for o in a.option_strings}


def _config_args(cfg: dict[str, str], argv: list[str], known: set[str] | None = None) -> list[str]:
    """Config entries as extra flags for options the user did not give; keys the command lacks are skipped."""
    given = {a.split("=", 1)[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    extra = []
    for k, v in cfg.items():
        flag = "--" + k.replace("_", "-")
        if k in given or (known is not None and flag not in known):
            continue
        if v.lower() in ("true", "yes"):
            extra.append(flag)
        elif v.lower() not in ("false", "no"):
            extra += [flag, v]
    return extra


def _split_command(argv: list[str]) -> tuple[list[str], list[str]]:
    cmd = []
    for a in argv:
        if a.startswith("-"):
            break
        cmd.append(a)
    return cmd, argv[len(cmd):]


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        cmd, rest = _split_command(argv)
        if "--config" in rest:
            i = rest.index("--config")
            if i + 1 >= len(rest):
                raise UsageError("--config needs a path")
            rest = rest[:i] + rest[i + 2 :] + _config_args(read_config(rest[i + 1]), rest, _leaf_options(parser, cmd))
            rest += ["--config", argv[argv.index("--config") + 1]]
        ns = parser.parse_args(cmd + rest)
        if ns.threads < 1:
            raise UsageError("--threads must be >= 1")
        t0 = time.perf_counter()
        payload, code = ns.fn(ns)
        wall = time.perf_counter() - t0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (PrimeregError, ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR

    text = dumps(payload)
    sys.stdout.write(text)
    out_dir = ns.out or os.environ.get(ENV_OUT)
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = "_".join(cmd)
        (out / f"{stem}.json").write_text(text)
        params = {k: jsonable(v) for k, v in vars(ns).items() if k not in ("fn", "group", "action")}
        man = RunManifest(" ".join(cmd), params, ns.seed, __version__, BACKEND, wall,
                          hashlib.sha256(text.encode()).hexdigest())
        (out / f"{stem}.manifest.json").write_text(man.to_json())
    return code


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
