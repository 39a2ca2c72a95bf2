"""Command-line front end: one subcommand per module plus the suite driver.

Structured output goes to stdout (JSON by default, CSV where tabular);
diagnostics go to stderr.  Exit codes: 0 success / all checks passed,
1 a verification failed, 2 usage or runtime error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import combinatorics as comb
from . import geometry, mellin, special, testfunctions, trace
from .reporting import (
    CONFIG_ENV_VAR,
    emit_scaling_csv,
    load_config,
    render_reports,
)
from .suite import SELECTORS, run_suite, suite_exit_code


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


def _emit(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def _read_json(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _parse_alpha(raw) -> list[complex]:
    # entries are numbers (imaginary parts of a tempered parameter) or
    # [re, im] pairs
    out = []
    for entry in raw:
        if isinstance(entry, (int, float)):
            out.append(complex(0.0, float(entry)))
        else:
            out.append(complex(float(entry[0]), float(entry[1])))
    return out


def _comp_from_spec(spec: str) -> comb.Composition:
    try:
        parts = tuple(int(p) for p in spec.split(","))
    except ValueError as exc:
        raise ValueError(f"bad composition spec {spec!r}") from exc
    return comb.Composition(parts)


def _doubling_grid(t_min: float, t_max: float) -> tuple[float, ...]:
    if not 0 < t_min < t_max:
        raise ValueError("need 0 < Tmin < Tmax")
    out = [float(t_min)]
    while out[-1] * 2.0 <= t_max + 1e-9:
        out.append(out[-1] * 2.0)
    if len(out) < 4:
        raise ValueError("need at least four doublings between Tmin and Tmax")
    return tuple(out)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kuznetsov-lab",
        description="identity suites and desk-scale numerics for the trace-formula toolkit",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"key=value config file (default ${CONFIG_ENV_VAR})")
    common.add_argument("--format", choices=("json", "csv"), help="output format")
    common.add_argument("--seed", type=int, help="seed for randomized verifier inputs")
    common.add_argument("--tol", type=float, help="identity residual tolerance")
    common.add_argument("--quad-tol", type=float, help="quadrature tolerance")
    common.add_argument("--jobs", type=int, help="parallel verifier execution")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run a verification suite")
    p.add_argument("selector", choices=SELECTORS)
    p.add_argument("--timings", action="store_true", help="include wall times in output")

    p = sub.add_parser("combinatorics", parents=[common], help="degree counts and composition functionals")
    p.add_argument("--dn", type=int, metavar="N", help="degree count D(N)")
    p.add_argument("--phi", metavar="n1,n2,...", help="exponent functional of a composition")
    p.add_argument("--verify-lemmas", type=int, metavar="N_MAX", help="exhaustive composition identities")

    p = sub.add_parser("geometry", parents=[common], help="Iwasawa data attached to Weyl elements")
    p.add_argument("--xi", nargs=2, metavar=("W_SPEC", "U_JSON"), help="xi values of w u")
    p.add_argument("--conj-y", nargs=2, metavar=("W_SPEC", "Y_CSV"), help="conjugated torus coordinates")

    p = sub.add_parser("special", parents=[common], help="pair polynomial and contour-gain bound")
    p.add_argument("--fr", nargs=3, metavar=("N", "R", "ALPHA_JSON"), help="pair polynomial value")
    p.add_argument("--bound-B", type=float, metavar="A", help="contour gain at shift A")

    p = sub.add_parser("whittaker", parents=[common], help="Mellin transforms, shifts, residues")
    p.add_argument("--mellin", nargs=3, metavar=("N", "ALPHA_JSON", "S_JSON"), help="transform value")
    p.add_argument("--residue", nargs=3, type=int, metavar=("N", "M", "DELTA"), help="residue vs contour oracle")
    p.add_argument("--check-shift", nargs=3, type=int, metavar=("N", "M", "DELTA"), help="shift identity and degree ledger")
    p.add_argument("--alpha", help="alpha JSON file for --residue / --check-shift")

    p = sub.add_parser("testfn", parents=[common], help="spectral test functions and scaling laws")
    p.add_argument("--p-sharp", action="store_true", help="transform-side value at alpha")
    p.add_argument("--h", action="store_true", help="normalized square at alpha")
    p.add_argument("--p-y", type=float, metavar="Y", help="rank-one avatar at y")
    p.add_argument("--itr-scaling", nargs=4, metavar=("R", "A", "TMIN", "TMAX"), help="shifted-line slope fit")
    p.add_argument("--main-term-scaling", nargs=2, type=int, metavar=("N", "R"), help="norm-integral slope fit")
    p.add_argument("--alpha", help="alpha JSON file (default 0)")
    p.add_argument("--T", type=float, default=10.0, help="spectral scale")
    p.add_argument("--R", type=int, default=1, help="smoothing order")
    p.add_argument("--out", help="write scaling data CSV (plus JSON sidecar) here")

    p = sub.add_parser("trace", parents=[common], help="Kloosterman sums, tails, exponents, orthogonality")
    p.add_argument("--kloosterman", nargs=3, type=int, metavar=("M", "L", "C"), help="one exact sum")
    p.add_argument("--kloosterman-sweep", type=int, metavar="CMAX", help="all moduli up to CMAX")
    p.add_argument("--tail", nargs=3, metavar=("RHO", "EPS", "CMAX"), help="modulus-sum tail report")
    p.add_argument("--exponents", nargs=2, metavar=("N", "RHO"), help="exponent ledger at the long element")
    p.add_argument("--cuspidal", nargs=5, metavar=("DATA_CSV", "T", "R", "L", "M"), help="orthogonality statistic over ingested spectral data")
    return parser


def _cmd_run(args, cfg) -> tuple[str, int]:
    reports = run_suite(args.selector, cfg)
    return render_reports(reports, cfg, include_runtime=args.timings), suite_exit_code(reports)


def _cmd_combinatorics(args, cfg) -> tuple[str, int]:
    out = {}
    code = 0
    if args.dn is not None:
        value = comb.degree_D(args.dn)
        oracle = math.comb(2 * args.dn, args.dn) // 2 - args.dn * (args.dn - 1) // 2 - 2 ** (args.dn - 1)
        out["dn"] = {"input": args.dn, "value": value, "oracle_value": oracle, "pass": value == oracle}
    if args.phi is not None:
        c = _comp_from_spec(args.phi)
        value = comb.phi(c)
        flipped = comb.phi(comb.Composition(c.parts[::-1]))
        out["phi"] = {
            "input": list(c.parts),
            "value": value,
            "oracle_value": flipped,
            "pass": value == flipped,
        }
    if args.verify_lemmas is not None:
        rep = comb.verify_partition_identities(args.verify_lemmas)
        out["verify_lemmas"] = {
            "input": args.verify_lemmas,
            "value": rep["checked"],
            "oracle_value": rep["first_counterexample"],
            "pass": rep["passed"],
        }
    if not out:
        raise ValueError("choose at least one of --dn, --phi, --verify-lemmas")
    if any(not v["pass"] for v in out.values()):
        code = 1
    return _emit(out), code


def _cmd_geometry(args, cfg) -> tuple[str, int]:
    out = {}
    if args.xi is not None:
        w = geometry.WeylElement(_comp_from_spec(args.xi[0]))
        u = np.asarray(_read_json(args.xi[1]), dtype=float)
        out["xi"] = {"w": list(w.composition.parts), "values": geometry.xi_values(w, u)}
    if args.conj_y is not None:
        w = geometry.WeylElement(_comp_from_spec(args.conj_y[0]))
        y = [float(v) for v in args.conj_y[1].split(",")]
        out["conj_y"] = {
            "w": list(w.composition.parts),
            "values": geometry.weyl_conjugate_y(w, y),
        }
    if not out:
        raise ValueError("choose at least one of --xi, --conj-y")
    return _emit(out), 0


def _cmd_special(args, cfg) -> tuple[str, int]:
    out = {}
    if args.fr is not None:
        n, R = int(args.fr[0]), int(args.fr[1])
        alpha = _parse_alpha(_read_json(args.fr[2]))
        if len(alpha) != n:
            raise ValueError(f"alpha has length {len(alpha)}, expected {n}")
        out["fr"] = {"n": n, "R": R, "value": special.f_R_poly(alpha, R)}
    if args.bound_B is not None:
        out["bound_B"] = {"a": args.bound_B, "value": special.bound_B(args.bound_B)}
    if not out:
        raise ValueError("choose at least one of --fr, --bound-B")
    return _emit(out), 0


def _default_alpha(n: int, rng: np.random.Generator) -> list[complex]:
    while True:
        t = rng.uniform(0.3, 0.9, size=n - 1)
        parts = list(t) + [-float(sum(t))]
        gaps = [abs(a - b) for i, a in enumerate(parts) for b in parts[i + 1 :]]
        if min(gaps) > 0.3:
            return [1j * v for v in parts]


def _cmd_whittaker(args, cfg) -> tuple[str, int]:
    out = {}
    code = 0
    if args.mellin is not None:
        n = int(args.mellin[0])
        alpha = _parse_alpha(_read_json(args.mellin[1]))
        raw_s = _read_json(args.mellin[2])
        s = [complex(v) if isinstance(v, (int, float)) else complex(v[0], v[1]) for v in raw_s]
        ev = mellin.WhittakerEvaluator(n, alpha, tol=cfg.quad_tol, nodes_per_panel=cfg.nodes_per_panel)
        value = ev.mellin(tuple(s))
        # n <= 3 is a closed Gamma product; the n = 4 recursion integrates
        # over an (n-2)-dimensional polydisc of vertical lines
        contours = 0 if n <= 3 else n - 2
        per_line = math.ceil(2 * ev.truncation_height) * cfg.nodes_per_panel
        nodes = per_line**contours if contours else 0
        out["mellin"] = {
            "n": n,
            "value": value,
            "error_estimate": cfg.quad_tol,
            "node_count": nodes,
        }
    if args.residue is not None:
        n, m, delta = args.residue
        alpha = (
            _parse_alpha(_read_json(args.alpha))
            if args.alpha
            else _default_alpha(n, np.random.default_rng(cfg.seed))
        )
        rep = mellin.residue_check(n, alpha, m=m, delta=delta, s_other=0.8 + 0.05j)
        out["residue"] = rep
        code = max(code, 0 if rep["passed"] else 1)
    if args.check_shift is not None:
        n, m, delta = args.check_shift
        rep = mellin.shift_identity_check(
            n, m, delta, rng=np.random.default_rng(cfg.seed)
        )
        rep["passed"] = bool(rep["balanced"] and rep["max_residual"] <= max(1e-9, cfg.identity_tol))
        out["check_shift"] = rep
        code = max(code, 0 if rep["passed"] else 1)
    if not out:
        raise ValueError("choose at least one of --mellin, --residue, --check-shift")
    return _emit(out), code


def _cmd_testfn(args, cfg) -> tuple[str, int]:
    out = {}
    params = testfunctions.TestFunctionParams(T=args.T, R=args.R)
    alpha = _parse_alpha(_read_json(args.alpha)) if args.alpha else [0j, 0j]
    if args.p_sharp:
        out["p_sharp"] = {"T": args.T, "R": args.R, "value": testfunctions.p_sharp(alpha, params)}
    if args.h:
        out["h"] = {"T": args.T, "R": args.R, "value": testfunctions.h_value(alpha, params)}
    if args.p_y is not None:
        out["p_y"] = {"T": args.T, "R": args.R, "y": args.p_y, "value": testfunctions.p_y(args.p_y, params)}
    fit = None
    if args.itr_scaling is not None:
        R, a = int(args.itr_scaling[0]), float(args.itr_scaling[1])
        grid = _doubling_grid(float(args.itr_scaling[2]), float(args.itr_scaling[3]))
        fit = testfunctions.itr_scaling(a, R, grid)
        out["itr_scaling"] = _fit_summary(fit)
    if args.main_term_scaling is not None:
        n, R = args.main_term_scaling
        fit = testfunctions.main_term_scaling(n, R)
        out["main_term_scaling"] = _fit_summary(fit)
    if not out:
        raise ValueError(
            "choose at least one of --p-sharp, --h, --p-y, --itr-scaling, --main-term-scaling"
        )
    if args.out:
        if fit is None:
            raise ValueError("--out needs a scaling operation")
        emit_scaling_csv(fit, args.out)
    return _emit(out), 0


def _fit_summary(fit) -> dict:
    return {
        "T_values": list(fit.T_values),
        "log_values": list(fit.log_values),
        "slope": fit.slope,
        "intercept": fit.intercept,
        "predicted": fit.predicted,
        "residual": fit.residual,
    }


def _cmd_trace(args, cfg) -> tuple[str, int]:
    out = {}
    if args.kloosterman is not None:
        m, l, c = args.kloosterman
        out["kloosterman"] = {"m": m, "l": l, "c": c, "value": trace.kloosterman_gl2(m, l, c)}
    if args.kloosterman_sweep is not None:
        values = trace.kloosterman_sweep(args.kloosterman_sweep)
        if cfg.out_format == "csv":
            lines = ["c,value"] + [
                f"{c},{float(v.real)!r}" for c, v in enumerate(values, start=1)
            ]
            return "\n".join(lines) + "\n", 0
        out["kloosterman_sweep"] = {"c_max": args.kloosterman_sweep, "values": [v.real for v in values]}
    if args.tail is not None:
        rho, eps, cmax = float(args.tail[0]), float(args.tail[1]), int(args.tail[2])
        rep = trace.tail_from_rho(rho, eps, cmax)
        out["tail"] = {
            "a": list(rep.a),
            "exponent": rep.exponent,
            "c_max": rep.c_max,
            "partial_sum": rep.partial_sum,
            "block_ratios": list(rep.block_ratios),
            "converged_geometric": rep.converged_geometric,
            "divergent": rep.divergent,
            "trivial_zeta": rep.trivial_zeta,
            "trivial_tail_bound": rep.trivial_tail_bound,
        }
    if args.exponents is not None:
        n, rho = int(args.exponents[0]), Fraction(args.exponents[1])
        rep = trace.iwbounds_exponent(n, rho, comb.Composition((1,) * n))
        out["exponents"] = {
            "n": rep.n,
            "rho": rep.rho,
            "composition": list(rep.composition.parts),
            "phi": rep.phi,
            "slack": rep.slack,
            "lm_exponent": rep.lm_exponent,
            "rho_threshold": rep.rho_threshold,
        }
    if args.cuspidal is not None:
        path = args.cuspidal[0]
        T, R = float(args.cuspidal[1]), int(args.cuspidal[2])
        l, m = int(args.cuspidal[3]), int(args.cuspidal[4])
        forms = trace.ingest_maass_csv(path)
        params = testfunctions.TestFunctionParams(T=T, R=R)
        rep = trace.cuspidal_sum(forms, params, l, m)
        out["cuspidal"] = {
            "forms": len(forms),
            "l": l,
            "m": m,
            "diagonal": rep.diagonal,
            "off_diagonal": rep.off_diagonal,
            "ratio": rep.ratio,
        }
    if not out:
        raise ValueError(
            "choose at least one of --kloosterman, --kloosterman-sweep, --tail, "
            "--exponents, --cuspidal"
        )
    return _emit(out), 0


_DISPATCH = {
    "run": _cmd_run,
    "combinatorics": _cmd_combinatorics,
    "geometry": _cmd_geometry,
    "special": _cmd_special,
    "whittaker": _cmd_whittaker,
    "testfn": _cmd_testfn,
    "trace": _cmd_trace,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(
            getattr(args, "config", None),
            {
                "format": getattr(args, "format", None),
                "seed": getattr(args, "seed", None),
                "identity_tol": getattr(args, "tol", None),
                "quad_tol": getattr(args, "quad_tol", None),
                "jobs": getattr(args, "jobs", None),
            },
        )
        text, code = _DISPATCH[args.command](args, cfg)
    except (ValueError, OSError, NotImplementedError, special.PoleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
