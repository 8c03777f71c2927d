"""Command-line front end: reproducible batch verification runs.

Every command is deterministic given its flags: the seed and sample count are
recorded in the output, no timestamps are emitted, JSON keys are sorted and
CSV floats are printed with 17 significant digits, so identical invocations
produce byte-identical output.

Exit codes: 0 = all checks pass, 1 = a numerical check failed,
2 = configuration or validation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .closedforms import Lemma44Params, lemma44_closed_form, lemma44_oracle
from .errors import (
    BadEpsilon,
    BadTau,
    CarnotError,
    DomainError,
    InadmissibleParams,
    InvalidGroupSpec,
    NonIntegrableWeight,
)
from .groups import group_from_arg, validate_group_spec
from .operators import KernelParams
from .sampling import SamplerConfig, derive_seed
from .verify import (
    ExponentParams,
    SearchConfig,
    check_admissible,
    estimate_best_constant,
    estimate_triangle_constant,
    sw_conditions,
)

DEFAULTS = {
    "samples": 1_000_000,
    "seed": 0,
    "truncation_radius": 8.0,
    "gamma_fractions": (0.0, 0.25, 0.5, 0.9),
    "radii": (0.5, 1.0, 2.0, 4.0),
    "kg_triples": 20_000,
}

_CONFIG_ERRORS = (
    InvalidGroupSpec,
    DomainError,
    BadTau,
    BadEpsilon,
    NonIntegrableWeight,
    ValueError,
    KeyError,
    FileNotFoundError,
)


def _pyify(obj):
    if isinstance(obj, dict):
        return {str(k): _pyify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_pyify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_pyify(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
    return obj


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _emit(args, payload: dict, columns: list[str], rows: list[list]) -> None:
    if args.format == "json":
        text = json.dumps(_pyify(payload), sort_keys=True, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _base_config(args) -> dict:
    return {"group": args.group, "seed": args.seed, "n_samples": args.samples}


# -- commands -------------------------------------------------------------------


def cmd_group_info(args) -> int:
    spec = group_from_arg(args.group)
    violations = validate_group_spec(spec)
    kg = estimate_triangle_constant(spec, args.kg_triples, seed=args.seed)
    payload = {
        "config": {"group": args.group, "seed": args.seed, "kg_triples": args.kg_triples,
                   "n_samples": 0},
        "name": spec.name,
        "dim": spec.dim,
        "homogeneous_dimension": spec.homogeneous_dimension,
        "step": spec.step,
        "layer_dims": list(spec.layer_dims),
        "valid": not violations,
        "violations": violations,
        "K_G_estimate": kg.value,
    }
    columns = ["name", "dim", "Q", "step", "layer_dims", "valid", "K_G_estimate"]
    rows = [[
        spec.name, spec.dim, spec.homogeneous_dimension, spec.step,
        " ".join(map(str, spec.layer_dims)), not violations, kg.value,
    ]]
    _emit(args, payload, columns, rows)
    return 0


def cmd_verify_lemma44(args) -> int:
    spec = group_from_arg(args.group)
    fractions = _parse_floats(args.gammas) if args.gammas else list(DEFAULTS["gamma_fractions"])
    if any(f < 0 or f >= 1 for f in fractions):
        raise DomainError(
            f"gamma fractions must lie in [0, 1) so that gamma < m_l; got {fractions}"
        )
    layers = (
        list(range(1, spec.step + 1))
        if args.layers in (None, "all")
        else [int(tok) for tok in args.layers.split(",")]
    )
    rows = []
    worst = 0.0
    for layer in layers:
        m_l = spec.layer_dim(layer)
        for fi, frac in enumerate(fractions):
            gamma = frac * m_l
            params = Lemma44Params(spec, layer, gamma)
            closed = lemma44_closed_form(params)
            cfg = SamplerConfig(
                n_samples=args.samples, seed=derive_seed(args.seed, "lemma44", layer, fi)
            )
            oracle = lemma44_oracle(params, cfg)
            z = oracle.z_score(closed)
            worst = max(worst, abs(z))
            rows.append([layer, gamma, closed, oracle.value, oracle.std_error, z])
    payload = {
        "config": {**_base_config(args), "gammas": fractions, "layers": layers},
        "rows": [
            {
                "layer": r[0], "gamma": r[1], "closed_form": r[2],
                "oracle": r[3], "std_error": r[4], "z": r[5],
            }
            for r in rows
        ],
        "max_abs_z": worst,
        "pass": worst <= 3.0,
    }
    _emit(args, payload, ["layer", "gamma", "closed_form", "oracle", "std_error", "z"], rows)
    return 0 if worst <= 3.0 else 1


def _exponent_params(args) -> ExponentParams:
    return ExponentParams(
        lam=args.lam,
        alpha=args.alpha,
        beta=args.beta,
        r_exp=args.r,
        s_exp=args.s,
        p=args.p,
        q=args.q,
        layer=args.layer,
    )


def cmd_check_admissible(args) -> int:
    spec = group_from_arg(args.group)
    m_l = spec.layer_dim(args.layer) if args.layer is not None else None
    report = check_admissible(
        args.theorem, _exponent_params(args), Q=spec.homogeneous_dimension, m_l=m_l
    )
    payload = {"config": {**_base_config(args), "theorem": args.theorem}, **report.to_dict()}
    columns = ["theorem", "pass", "violated"]
    rows = [[args.theorem, report.passed, ";".join(report.violated)]]
    _emit(args, payload, columns, rows)
    return 0 if report.passed else 1


def cmd_sw_conditions(args) -> int:
    spec = group_from_arg(args.group)
    q_hom = spec.homogeneous_dimension
    if not 0 < args.lam < q_hom:
        raise DomainError(f"need 0 < lambda < Q = {q_hom}, got {args.lam}")
    if args.weight == "layer" and args.layer is None:
        raise DomainError("layer weights need --layer")
    radii = _parse_floats(args.radii) if args.radii else list(DEFAULTS["radii"])
    cfg = SamplerConfig(n_samples=args.samples, seed=args.seed)
    report = sw_conditions(
        spec,
        lam=args.lam,
        alpha=args.alpha,
        beta=args.beta,
        p=args.p,
        q=args.q,
        radii=radii,
        weight_kind="full_norm" if args.weight == "full" else "layer",
        layer=args.layer,
        eps=args.eps,
        tau=args.tau,
        cfg=cfg,
    )
    payload = {
        "config": {
            **_base_config(args),
            "p": args.p, "q": args.q, "lambda": args.lam,
            "alpha": args.alpha, "beta": args.beta,
            "weight": args.weight, "layer": args.layer, "radii": radii,
        },
        **report.to_dict(),
    }
    columns = ["radius", "M1", "M2", "M3", "product", "product_std_error",
               "closed_ref_w1", "closed_ref_z"]
    rows = [
        [row.radius, row.m1.value, row.m2.value, row.m3.value,
         row.product.value, row.product.std_error, row.closed_ref_w1, row.closed_ref_z]
        for row in report.cond36.rows
    ]
    _emit(args, payload, columns, rows)
    return 0 if (report.cond35_pass and report.cond36_pass) else 1


def cmd_estimate_constant(args) -> int:
    spec = group_from_arg(args.group)
    if args.r is None or args.s is None:
        raise DomainError("estimate-constant requires --r and --s")
    kp = KernelParams(
        lam=args.lam,
        alpha=args.alpha,
        beta=args.beta,
        weight_kind="full_norm" if args.weight == "full" else "layer",
        layer=args.layer,
    )
    kp.validate(spec)
    search = SearchConfig(
        n_restarts=args.restarts,
        max_iter=args.iters,
        n_samples=args.samples,
        seed=args.seed,
        domain_radius=args.radius,
    )
    try:
        result = estimate_best_constant(spec, kp, args.r, args.s, search)
    except InadmissibleParams as exc:
        payload = {
            "config": _base_config(args),
            "error": "inadmissible parameters",
            **exc.report.to_dict(),
        }
        _emit(args, payload, ["theorem", "pass", "violated"],
              [[exc.report.theorem, False, ";".join(exc.report.violated)]])
        return 2
    payload = {
        "config": {
            **_base_config(args),
            "r": args.r, "s": args.s, "lambda": args.lam,
            "alpha": args.alpha, "beta": args.beta,
            "weight": args.weight, "layer": args.layer,
            "restarts": args.restarts, "iters": args.iters,
            "truncation_radius": args.radius,
        },
        **result.to_dict(),
    }
    columns = ["restart", "eval", "ratio", "std_error", "log_rates"]
    rows = [
        [t["restart"], t["eval"], t["ratio"], t["std_error"],
         " ".join(_fmt(v) for v in t["log_rates"])]
        for t in result.trace
    ]
    _emit(args, payload, columns, rows)
    return 0


# -- parser ----------------------------------------------------------------------


def _add_common(sub):
    sub.add_argument("--group", required=True, help="built-in name (R2, H1, free3) or spec file path")
    sub.add_argument("--seed", type=int, default=DEFAULTS["seed"])
    sub.add_argument("--samples", type=int, default=DEFAULTS["samples"])
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--out", default=None, help="output path (default: stdout)")


def _add_exponents(sub, dual_pair: bool):
    sub.add_argument("--lam", type=float, required=True, help="kernel exponent lambda")
    sub.add_argument("--alpha", type=float, default=0.0)
    sub.add_argument("--beta", type=float, default=0.0)
    if dual_pair:
        sub.add_argument("--r", type=float, default=None)
        sub.add_argument("--s", type=float, default=None)
    sub.add_argument("--layer", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carnotineq",
        description="Batch verification of Carnot-group weighted-inequality quantities.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("group-info", help="dimensions, validation verdict, K_G estimate")
    _add_common(sub)
    sub.add_argument("--kg-triples", type=int, default=DEFAULTS["kg_triples"], dest="kg_triples")
    sub.set_defaults(func=cmd_group_info)

    sub = subs.add_parser("verify-lemma44", help="closed form vs sampling oracle per layer")
    _add_common(sub)
    sub.add_argument("--layers", default="all", help="comma list of layers or 'all'")
    sub.add_argument(
        "--gammas",
        default=None,
        help="comma list of gamma fractions of m_l in [0,1); default 0,0.25,0.5,0.9",
    )
    sub.set_defaults(func=cmd_verify_lemma44)

    sub = subs.add_parser("check-admissible", help="theorem admissibility truth table")
    _add_common(sub)
    sub.add_argument("--theorem", required=True, choices=("T2.1", "T2.2", "T3.1", "T4.1"))
    _add_exponents(sub, dual_pair=True)
    sub.add_argument("--p", type=float, default=None)
    sub.add_argument("--q", type=float, default=None)
    sub.set_defaults(func=cmd_check_admissible)

    sub = subs.add_parser("sw-conditions", help="Sawyer-Wheeden conditions across radii")
    _add_common(sub)
    _add_exponents(sub, dual_pair=False)
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--q", type=float, required=True)
    sub.add_argument("--weight", choices=("full", "layer"), default="full")
    sub.add_argument("--tau", type=float, default=None)
    sub.add_argument("--eps", type=float, default=None)
    sub.add_argument("--radii", default=None, help="comma list; default 0.5,1,2,4")
    sub.set_defaults(func=cmd_sw_conditions)

    sub = subs.add_parser("estimate-constant", help="lower-bound the best constant by search")
    _add_common(sub)
    _add_exponents(sub, dual_pair=True)
    sub.add_argument("--weight", choices=("full", "layer"), default="full")
    sub.add_argument("--restarts", type=int, default=4)
    sub.add_argument("--iters", type=int, default=60)
    sub.add_argument("--radius", type=float, default=DEFAULTS["truncation_radius"])
    sub.set_defaults(func=cmd_estimate_constant)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CarnotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
