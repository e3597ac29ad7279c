"""Command-line surface.

Subcommands: simulate, tune, diagnose, generate, experiment, presets.
Every run prints its fully resolved configuration (defaults and seed
included) as a JSON header on stdout before any result, so logs are
self-describing and reruns are exact.

Exit codes: 0 success, 2 usage error (including unknown presets),
3 data error (malformed CSV, missing classes), 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .data import LabeledDataset, load_csv, save_csv, split_by_class
from .diagnostics import (bias_canceling_size, bias_vector,
                          empirical_hessians, estimate_gradient_covariances,
                          estimate_phi_gradient, estimate_psi_gradient,
                          leading_terms)
from .exceptions import (DataError, NumericError, UnknownPreset, VtssError,
                         ZeroPhi)
from .experiments import ExperimentConfig, run_experiment
from .generators import GeneratorSpec, augment, generate
from .losses import LossSpec
from .metrics import (balanced_accuracy, balanced_empirical_loss,
                      fit_balanced_erm, metric_record)
from .rng import RngStream
from .sim_models import (load_model_preset, load_preset_config, preset_names)
from .trainer import FitConfig, FittedModel
from .tuning import VtssConfig, vtss_tune

USAGE_ERROR, DATA_ERROR, NUMERIC_ERROR = 2, 3, 4


def _print_header(subcommand: str, config: dict) -> None:
    header = {"tool": "vtss", "version": __version__, "subcommand": subcommand,
              "config": config}
    print(json.dumps(header, indent=2, sort_keys=True))


def _write_json(path, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None:
        print(text, end="")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_grid(text: str) -> tuple:
    """'start:stop:count' -> evenly spaced values including both endpoints."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"grid must look like start:stop:count, got {text!r}")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1 or stop < start:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    return tuple(np.linspace(start, stop, count))


def _parse_theta(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")], dtype=float)
    except ValueError:
        raise argparse.ArgumentTypeError("theta must be comma-separated floats")


_OBJECTIVES = {"balanced-loss": "balanced_loss",
               "balanced-accuracy": "balanced_accuracy",
               "weighted-loss": "weighted_loss"}


def _add_loss_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--loss", default="logistic",
                   choices=["logistic", "squared", "hinge"])
    p.add_argument("--squared-target", default="raw", choices=["raw", "centered"])
    p.add_argument("--fit-intercept", action="store_true")


def _add_fit_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--grad-tol", type=float, default=1e-8)
    p.add_argument("--ridge", type=float, default=None,
                   help="l2 penalty; default 1e-8 for logistic, 0 otherwise")
    p.add_argument("--step-rule", default="newton_backtracking",
                   choices=["newton_backtracking", "gradient_backtracking",
                            "closed_form"])


def _add_generator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--generator", default="smote",
                   choices=["bootstrap", "smote", "borderline_smote", "adasyn",
                            "gaussian_fit", "jitter", "perturbed_sampling"])
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--jitter-sigma", type=float, default=1.0)
    p.add_argument("--gen-ridge", type=float, default=0.0,
                   help="gaussian_fit covariance regularizer")


def _loss_spec(args) -> LossSpec:
    return LossSpec(args.loss, args.squared_target, args.fit_intercept)


def _fit_config(args) -> FitConfig:
    return FitConfig(max_iters=args.max_iters, grad_tol=args.grad_tol,
                     ridge=args.ridge, step_rule=args.step_rule)


def _generator_spec(args) -> GeneratorSpec:
    return GeneratorSpec(args.generator, k=args.k,
                         jitter_sigma=args.jitter_sigma, ridge=args.gen_ridge)


# -- subcommands -----------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = load_preset_config(args.preset)
    if "experiment" in cfg:
        raise UnknownPreset(f"{args.preset!r} is an experiment preset; "
                            "use `vtss experiment`")
    model = load_model_preset(args.preset)
    resolved = {"preset": args.preset, "seed": args.seed, "out": args.out,
                "model": cfg}
    stream = RngStream(args.seed)
    if cfg["model"] == "sigmoid_bernoulli":
        resolved["n"] = args.n
        _print_header("simulate", resolved)
        data = model.sample(args.n, stream)
    else:
        resolved["n0"], resolved["n1"] = args.n0, args.n1
        _print_header("simulate", resolved)
        data = model.sample(args.n0, args.n1, stream)
    save_csv(data, args.out)
    print(f"wrote {data.n} rows (n0={data.n0}, n1={data.n1}) to {args.out}")
    return 0


def cmd_tune(args) -> int:
    cfg = VtssConfig(
        gamma_grid=args.grid, K=args.folds, repeats=args.repeats,
        objective=_OBJECTIVES[args.objective], rho=args.rho,
        generator=_generator_spec(args), loss=_loss_spec(args),
        fit=_fit_config(args))
    resolved = dict(cfg.to_config())
    resolved.update({"data": args.data, "seed": args.seed, "out": args.out})
    _print_header("tune", resolved)
    data = load_csv(args.data)
    result = vtss_tune(data, cfg, RngStream(args.seed))
    _write_json(args.out, result.to_json_dict())
    print(f"gamma_star={result.gamma_star} n_syn_star={result.n_syn_star}")
    return 0


def cmd_generate(args) -> int:
    resolved = {"data": args.data, "generator": _generator_spec(args).to_config(),
                "count": args.count, "seed": args.seed, "out": args.out,
                "augmented": args.augmented, "audit_out": args.audit_out}
    _print_header("generate", resolved)
    data = load_csv(args.data)
    minority = split_by_class(data).minority
    batch = generate(_generator_spec(args), minority, data, args.count,
                     RngStream(args.seed))
    out = augment(data, batch) if args.augmented else \
        LabeledDataset(batch.rows, np.ones(len(batch.rows), dtype=np.int64))
    save_csv(out, args.out)
    if args.audit_out and batch.audit is not None:
        import csv as _csv
        with open(args.audit_out, "w", encoding="utf-8", newline="") as fh:
            w = _csv.writer(fh, lineterminator="\n")
            w.writerow(["base_index", "neighbor_index", "gamma"])
            for b, nb, g in batch.audit:
                w.writerow([b, nb, repr(g)])
    print(f"wrote {out.n} rows to {args.out}")
    return 0


def _diagnose_report(args, data: LabeledDataset) -> dict:
    spec = _loss_spec(args)
    fit_cfg = _fit_config(args)
    if args.theta is not None:
        theta = args.theta
        model = FittedModel(theta, spec, True, float("nan"))
    else:
        model = fit_balanced_erm(data, spec, fit_cfg)
        theta = model.theta

    sp = split_by_class(data)
    if args.synthetic_data is not None:
        synthetic = load_csv(args.synthetic_data).features
    else:
        n_syn = int(round(args.probe_gamma * (data.n0 - data.n1)))
        batch = generate(_generator_spec(args), sp.minority, data, max(n_syn, 2),
                         RngStream(args.seed).child(0))
        synthetic = batch.rows
    phi = estimate_phi_gradient(theta, spec, sp.majority, sp.minority)
    psi = estimate_psi_gradient(theta, spec, synthetic, sp.minority)
    diag = bias_vector(phi, psi, data.n0, data.n1, len(synthetic), rho=args.rho)

    caveats = [
        "gradients are finite-sample estimates at a plug-in theta, not at the "
        "unknown balanced optimum",
        "size formula ignores lower-order stochastic slack terms",
    ]
    recommended = None
    if diag.regime == "local_symmetry":
        recommendation = "gamma* ~ 0; synthesis unlikely to help"
        recommended = 0
    else:
        try:
            recommended = bias_canceling_size(phi, psi, data.n0, data.n1)
            recommendation = (f"bias-canceling synthetic size ~ "
                              f"{recommended:.0f} rows")
            if recommended < 0:
                recommendation = ("no valid cancellation by size alone "
                                  "(negative formula value)")
            if diag.sin_angle is not None and diag.sin_angle > 0.1:
                caveats.append("gradients are not well aligned; the residual "
                               "orthogonal bias cannot be canceled by size")
        except (ZeroPhi, NumericError) as exc:
            recommendation = f"no size recommendation: {exc}"

    T1 = T3 = None
    if spec.family != "hinge":
        H, hphi, hpsi = empirical_hessians(theta, spec, sp.majority,
                                           sp.minority, synthetic)
        jac = (diag.pi0 - args.rho) * hphi + diag.pi_tilde * hpsi
        _, _, _, pooled, _ = estimate_gradient_covariances(
            theta, spec, sp.majority, sp.minority, synthetic)
        lt = leading_terms(diag.b, H, jac, pooled,
                           data.n0 + data.n1 + len(synthetic),
                           hessians_source="empirical")
        T1, T3 = lt.T1, lt.T3_expected

    report = {
        "norm_phi": diag.norm_phi,
        "norm_psi": diag.norm_psi,
        "cos_angle": diag.cos_angle,
        "b": [float(v) for v in diag.b],
        "regime": diag.regime,
        "recommended_n_syn": None if recommended is None else float(recommended),
        "recommendation": recommendation,
        "T1": T1,
        "T3_expected": T3,
        "caveats": caveats,
        "theta": [float(v) for v in theta],
        "metrics": [
            metric_record("balanced_loss",
                          balanced_empirical_loss(theta, spec, data), data,
                          RngStream(args.seed).record()),
            metric_record("balanced_accuracy",
                          balanced_accuracy(model, data), data,
                          RngStream(args.seed).record()),
        ],
        "seed_record": RngStream(args.seed).record(),
    }
    return report


def cmd_diagnose(args) -> int:
    resolved = {"data": args.data, "seed": args.seed, "out": args.out,
                "probe_gamma": args.probe_gamma, "rho": args.rho,
                "synthetic_data": args.synthetic_data,
                "generator": _generator_spec(args).to_config(),
                "loss": _loss_spec(args).to_config(),
                "theta": None if args.theta is None else list(map(float, args.theta))}
    _print_header("diagnose", resolved)
    data = load_csv(args.data)
    report = _diagnose_report(args, data)
    _write_json(args.out, report)
    if args.out is not None:
        print(f"regime={report['regime']} recommendation={report['recommendation']}")
    return 0


def cmd_experiment(args) -> int:
    config = ExperimentConfig(preset=args.preset, reps=args.reps,
                              base_seed=args.seed, workers=args.jobs)
    resolved = config.resolved()
    resolved["out"] = args.out
    _print_header("experiment", resolved)
    table = run_experiment(config)
    table.save(args.out)
    print(f"wrote raw.csv, summary.csv, config.json to {args.out} "
          f"({len(table.rows)} rows, {len(table.failures)} failed cells)")
    return 0


def cmd_presets(args) -> int:
    for name in preset_names():
        cfg = load_preset_config(name)
        kind = cfg.get("experiment", cfg.get("model"))
        flavor = "experiment" if "experiment" in cfg else "model"
        print(f"{name:28s} {flavor:10s} {kind}")
    return 0


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vtss",
        description="Synthetic minority augmentation with validation-tuned "
                    "synthetic size.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("simulate", help="draw a dataset CSV from a model preset")
    p.add_argument("--preset", required=True)
    p.add_argument("--n0", type=int, default=2000)
    p.add_argument("--n1", type=int, default=100)
    p.add_argument("--n", type=int, default=5000,
                   help="total draws for the sigmoid model (labels are random)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tune", help="select the synthetic size by cross-validation")
    p.add_argument("--data", required=True)
    _add_generator_flags(p)
    p.add_argument("--grid", type=_parse_grid, default=_parse_grid("0:2:21"))
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--objective", default="balanced-loss",
                   choices=sorted(_OBJECTIVES))
    p.add_argument("--rho", type=float, default=0.5)
    _add_loss_flags(p)
    _add_fit_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("diagnose", help="bias diagnostics and size recommendation")
    p.add_argument("--data", required=True)
    p.add_argument("--theta", type=_parse_theta, default=None,
                   help="plug-in parameter; default fits the balanced ERM")
    p.add_argument("--synthetic-data", default=None,
                   help="CSV of synthetic rows; skips the generated probe batch")
    p.add_argument("--probe-gamma", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=0.5)
    _add_generator_flags(p)
    _add_loss_flags(p)
    _add_fit_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("generate", help="emit synthetic minority rows as CSV")
    p.add_argument("--data", required=True)
    _add_generator_flags(p)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--augmented", action="store_true",
                   help="write the augmented dataset instead of only synthetic rows")
    p.add_argument("--audit-out", default=None,
                   help="CSV of (base, neighbor, gamma) interpolation records")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("experiment", help="run a figure protocol preset")
    p.add_argument("--preset", required=True,
                   help="shipped preset name, or path to a .json experiment "
                        "config (e.g. a csv_excess_risk study)")
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel worker count; results are identical at any value")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("presets", help="list shipped presets")
    p.set_defaults(func=cmd_presets)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnknownPreset as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("available presets:", file=sys.stderr)
        for name in preset_names():
            print(f"  {name}", file=sys.stderr)
        return USAGE_ERROR
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return NUMERIC_ERROR
    except VtssError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NUMERIC_ERROR


if __name__ == "__main__":
    sys.exit(main())
