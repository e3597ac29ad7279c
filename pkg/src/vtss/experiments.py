"""Seeded Monte-Carlo experiment runners for the simulation studies.

Each shipped experiment preset (fig2, fig3, fig4, fig-select0, fig5-left,
fig-sigmoid) pins one protocol: a sweep, a repetition count, generators,
a loss, and an evaluation. Cells are independent tasks with disjoint
derived RNG streams, so any single cell can be re-run in isolation and
reproduces its rows exactly, and parallel execution cannot change results.

Results come back as a tidy table: raw rows (sweep, rep, metric, value)
plus a summary (mean, sd, normal-approximation 95% CI half-width, count)
per (sweep, metric). Failed cells are recorded with a reason and excluded;
they never abort a sweep.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .data import LabeledDataset, load_csv, split_by_class
from .exceptions import UnknownPreset, VtssError
from .generators import GeneratorSpec, generate
from .losses import LossSpec
from .metrics import (balanced_accuracy, balanced_empirical_loss,
                      fit_balanced_erm)
from .rng import RngStream
from .sim_models import (TwoGaussianModel, build_model,
                         gaussian_excess_risk, gaussian_theta_star,
                         load_preset_config, mean_shift_excess_risk,
                         preset_names)
from .trainer import FitConfig, fit_erm
from .tuning import VtssConfig, vtss_tune

SQ_RAW = LossSpec("squared", "raw")
SQ_CEN = LossSpec("squared", "centered")
LOGISTIC = LossSpec("logistic")
_CLOSED = FitConfig(step_rule="closed_form")


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str                  # shipped preset name, or path to a .json config
    reps: int | None = None      # None = preset default
    base_seed: int = 0
    workers: int = 1
    overrides: dict = field(default_factory=dict)

    def resolved(self) -> dict:
        if self.preset.endswith(".json"):
            with open(self.preset, encoding="utf-8") as fh:
                cfg = json.load(fh)
        else:
            cfg = load_preset_config(self.preset)
        if "experiment" not in cfg:
            raise UnknownPreset(
                f"{self.preset!r} is a model preset, not an experiment preset")
        cfg = dict(cfg)
        cfg.update(self.overrides)
        if self.reps is not None:
            cfg["reps"] = int(self.reps)
        cfg["preset"] = self.preset
        cfg["base_seed"] = int(self.base_seed)
        cfg["workers"] = int(self.workers)
        cfg["seed_record"] = RngStream(self.base_seed).record()
        return cfg


@dataclass
class ResultTable:
    rows: list                  # (sweep, rep, metric, value)
    failures: list              # (sweep, rep, reason)
    config: dict

    def sorted_rows(self):
        return sorted(self.rows, key=lambda r: (r[0], r[1], r[2]))

    def summary(self):
        groups: dict = {}
        for sweep, _rep, metric, value in self.rows:
            groups.setdefault((sweep, metric), []).append(value)
        out = []
        for (sweep, metric), vals in sorted(groups.items()):
            arr = np.asarray(vals, dtype=float)
            sd = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
            ci = 1.96 * sd / math.sqrt(len(arr)) if len(arr) > 1 else 0.0
            out.append((sweep, metric, float(arr.mean()), sd, ci, len(arr)))
        return out

    def metric_means(self, metric: str) -> dict:
        return {sweep: mean for sweep, m, mean, *_ in self.summary() if m == metric}

    def metric_values(self, metric: str, sweep=None) -> list:
        return [v for s, _r, m, v in self.rows
                if m == metric and (sweep is None or s == sweep)]

    def paired_values(self, metric_a: str, metric_b: str, sweep) -> list:
        by_rep: dict = {}
        for s, rep, m, v in self.rows:
            if s == sweep and m in (metric_a, metric_b):
                by_rep.setdefault(rep, {})[m] = v
        return [(d[metric_a], d[metric_b]) for _rep, d in sorted(by_rep.items())
                if len(d) == 2]

    def write_raw_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sweep", "rep", "metric", "value"])
            for sweep, rep, metric, value in self.sorted_rows():
                w.writerow([repr(float(sweep)), int(rep), metric, repr(float(value))])

    def write_summary_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sweep", "metric", "mean", "sd", "ci95", "reps"])
            for sweep, metric, mean, sd, ci, n in self.summary():
                w.writerow([repr(float(sweep)), metric, repr(mean), repr(sd),
                            repr(ci), n])

    def save(self, directory) -> None:
        from pathlib import Path
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        self.write_raw_csv(d / "raw.csv")
        self.write_summary_csv(d / "summary.csv")
        payload = dict(self.config)
        payload["failures"] = [list(f) for f in self.failures]
        (d / "config.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _grid(cfg: dict, key: str, default):
    return [float(g) for g in cfg.get(key, default)]


def _generator_for(name: str, k: int, model, gaussian_ridge: float = 0.0) -> GeneratorSpec:
    if name in ("oracle", "semi_oracle"):
        return GeneratorSpec(name, k=k, model_handle=model)
    if name == "gaussian_fit":
        return GeneratorSpec(name, k=k, ridge=gaussian_ridge)
    return GeneratorSpec(name, k=k)


def _fit_with_synthetic(train: LabeledDataset, rows: np.ndarray, loss: LossSpec,
                        fit_cfg: FitConfig):
    X = np.vstack([train.features, rows])
    y = np.concatenate([train.labels, np.ones(len(rows), dtype=np.int64)])
    return fit_erm(LabeledDataset(X, y), loss, fit_cfg)


# ---------------------------------------------------------------------------
# fig2: biased aligned generator, naive vs bias-canceling size
# ---------------------------------------------------------------------------

def _cell_fig2(cfg: dict, n1: int, rep: int, stream: RngStream):
    model = build_model(load_preset_config(cfg["model_preset"]))
    ratio = int(cfg["imbalance_ratio"])
    n0 = ratio * n1
    train = model.sample(n0, n1, stream.child(0))
    syn_model = model.biased_generator_model()
    star = gaussian_theta_star(model.mu1)
    rows = []
    for idx, (rule, mult) in enumerate(sorted(cfg["rules"].items())):
        n_syn = int(round(float(mult) * (n0 - n1)))
        syn = syn_model.sample_minority(n_syn, stream.child(1 + idx))
        fit = _fit_with_synthetic(train, syn, SQ_RAW, _CLOSED)
        rows.append((float(n1), rep, f"excess_risk/{rule}",
                     gaussian_excess_risk(fit.theta, model.mu1)))
        rows.append((float(n1), rep, f"param_error/{rule}",
                     float(np.linalg.norm(fit.theta - star))))
    return rows


# ---------------------------------------------------------------------------
# fig3: consistent aligned generator, VTSS vs naive balancing (paired)
# ---------------------------------------------------------------------------

def _cell_fig3(cfg: dict, n1: int, rep: int, stream: RngStream):
    model = build_model(load_preset_config(cfg["model_preset"]))
    n0 = int(cfg["imbalance_ratio"]) * n1
    if cfg.get("generator", "consistent_aligned") == "oracle":
        gen_model = model
    else:
        # consistent but imperfect: synthetic mean approaches the minority
        # mean from below as n1 grows, staying aligned with it
        shrink = 1.0 - 1.0 / math.sqrt(math.log(n1))
        gen_model = TwoGaussianModel(mu1=shrink * model.mu1,
                                     name="consistent-aligned")
    train = model.sample(n0, n1, stream.child(0))
    star = gaussian_theta_star(model.mu1)
    rows = []

    naive_rows = gen_model.sample_minority(n0 - n1, stream.child(1))
    naive_fit = _fit_with_synthetic(train, naive_rows, SQ_RAW, _CLOSED)
    rows.append((float(n1), rep, "excess_risk/naive",
                 gaussian_excess_risk(naive_fit.theta, model.mu1)))
    rows.append((float(n1), rep, "param_error/naive",
                 float(np.linalg.norm(naive_fit.theta - star))))

    vtss_cfg = VtssConfig(
        gamma_grid=tuple(_grid(cfg, "gamma_grid", np.linspace(0, 2, 21))),
        K=int(cfg.get("K", 5)),
        generator=GeneratorSpec("oracle", model_handle=gen_model),
        loss=SQ_RAW, fit=_CLOSED)
    res = vtss_tune(train, vtss_cfg, stream.child(2))
    rows.append((float(n1), rep, "excess_risk/vtss",
                 gaussian_excess_risk(res.final_theta, model.mu1)))
    rows.append((float(n1), rep, "param_error/vtss",
                 float(np.linalg.norm(res.final_theta - star))))
    rows.append((float(n1), rep, "gamma_star/vtss", res.gamma_star))
    return rows


# ---------------------------------------------------------------------------
# fig4: mean-shift local symmetry, excess risk vs gamma per generator
# ---------------------------------------------------------------------------

def _cell_fig4(cfg: dict, noise_idx: int, rep: int, stream: RngStream):
    noise = cfg["noise_kinds"][noise_idx]
    model = build_model({"model": "mean_shift", "d": cfg["d"],
                         "delta": cfg.get("delta", 1.0), "noise_kind": noise})
    n0, n1 = int(cfg["n0"]), int(cfg["n1"])
    train = model.sample(n0, n1, stream.child(0))
    minority = split_by_class(train).minority
    gammas = _grid(cfg, "gamma_grid", np.linspace(0.0, 4.0, 20))
    k = int(cfg.get("k", 5))
    rows = []
    for g_idx, gen_name in enumerate(cfg["generators"]):
        spec = _generator_for(gen_name, k, model,
                              gaussian_ridge=float(cfg.get("gaussian_ridge", 0.0)))
        gen_stream = stream.child(1 + g_idx)
        for gi, gamma in enumerate(gammas):
            n_syn = int(round(gamma * (n0 - n1)))
            batch = generate(spec, minority, train, n_syn, gen_stream.child(gi))
            fit = _fit_with_synthetic(train, batch.rows, SQ_CEN, _CLOSED)
            rows.append((float(gamma), rep, f"excess_risk/{noise}/{gen_name}",
                         mean_shift_excess_risk(fit.theta, model)))
    return rows


# ---------------------------------------------------------------------------
# fig-select0: distribution of the selected multiplier gamma*
# ---------------------------------------------------------------------------

def _select_holdout(cfg, model, train, spec, stream):
    """Paper protocol for the histogram study: pick gamma by minimizing the
    balanced loss of the augmented-data fit on a fresh balanced validation
    set; ties go to the smallest gamma."""
    per_class = int(cfg.get("validation_per_class", 2000))
    val = model.sample(per_class, per_class, stream.child(0))
    minority = split_by_class(train).minority
    gammas = np.linspace(0.0, float(cfg.get("gamma_max", 2.0)),
                         int(cfg.get("gamma_count", 200)))
    best_gamma, best_loss = None, None
    for gi, gamma in enumerate(gammas):
        n_syn = int(round(gamma * (train.n0 - train.n1)))
        batch = generate(spec, minority, train, n_syn, stream.child(1).child(gi))
        fit = _fit_with_synthetic(train, batch.rows, SQ_CEN, _CLOSED)
        loss = balanced_empirical_loss(fit.theta, SQ_CEN, val)
        if best_loss is None or loss < best_loss:
            best_gamma, best_loss = float(gamma), loss
    return best_gamma


def _select_kfold(cfg, model, train, spec, stream):
    gammas = np.linspace(0.0, float(cfg.get("gamma_max", 2.0)),
                         int(cfg.get("gamma_count", 200)))
    vtss_cfg = VtssConfig(gamma_grid=tuple(gammas), K=int(cfg.get("K", 5)),
                          generator=spec, loss=SQ_CEN, fit=_CLOSED)
    return vtss_tune(train, vtss_cfg, stream).gamma_star


def _cell_gamma_histogram(cfg: dict, noise_idx: int, rep: int, stream: RngStream):
    noise = cfg["noise_kinds"][noise_idx]
    model = build_model({"model": "mean_shift", "d": cfg["d"],
                         "delta": cfg.get("delta", 1.0), "noise_kind": noise})
    n0, n1 = int(cfg["n0"]), int(cfg["n1"])
    train = model.sample(n0, n1, stream.child(0))
    select = _select_kfold if cfg.get("selection") == "kfold" else _select_holdout
    rows = []
    for g_idx, gen_name in enumerate(cfg["generators"]):
        spec = _generator_for(gen_name, int(cfg.get("k", 5)), model,
                              gaussian_ridge=float(cfg.get("gaussian_ridge", 0.0)))
        gamma_star = select(cfg, model, train, spec, stream.child(1 + g_idx))
        rows.append((float(noise_idx), rep, f"gamma_star/{noise}/{gen_name}",
                     gamma_star))
    return rows


# ---------------------------------------------------------------------------
# fig5-left: balanced test loss as a function of the synthetic size
# ---------------------------------------------------------------------------

def _fig5_test_set(cfg: dict, base: RngStream) -> LabeledDataset:
    model = build_model(load_preset_config(cfg["model_preset"]))
    per_class = int(cfg.get("test_per_class", 10_000))
    return model.sample(per_class, per_class, base.child(999))


def _cell_fig5(cfg: dict, test_set: LabeledDataset, rep: int, stream: RngStream):
    model = build_model(load_preset_config(cfg["model_preset"]))
    n1 = int(cfg["n1"])
    n0 = int(cfg["imbalance_ratio"]) * n1
    train = model.sample(n0, n1, stream.child(0))
    minority = split_by_class(train).minority
    k = int(cfg.get("k", 5))
    spec = GeneratorSpec("smote", k=k)
    loss = LossSpec("logistic", fit_intercept=bool(cfg.get("fit_intercept", False)))
    fit_cfg = FitConfig()
    gammas = _grid(cfg, "gamma_grid", np.linspace(0.6, 1.4, 17))
    rows = []
    for gi, gamma in enumerate(gammas):
        n_syn = int(round(gamma * (n0 - n1)))
        batch = generate(spec, minority, train, n_syn, stream.child(1).child(gi))
        fit = _fit_with_synthetic(train, batch.rows, loss, fit_cfg)
        rows.append((float(gamma), rep, "test_loss/smote",
                     balanced_empirical_loss(fit.theta, loss, test_set)))
    vtss_cfg = VtssConfig(gamma_grid=tuple(gammas), K=int(cfg.get("K", 5)),
                          generator=spec, loss=loss, fit=fit_cfg)
    res = vtss_tune(train, vtss_cfg, stream.child(2))
    rows.append((res.gamma_star, rep, "test_loss/vtss",
                 balanced_empirical_loss(res.final_theta, loss, test_set)))
    rows.append((res.gamma_star, rep, "gamma_star/vtss", res.gamma_star))
    return rows


# ---------------------------------------------------------------------------
# fig-sigmoid: local symmetry under the sigmoid Bernoulli model
# ---------------------------------------------------------------------------

def _cell_sigmoid(cfg: dict, rep: int, stream: RngStream):
    model = build_model(load_preset_config(cfg["model_preset"]))
    train = model.sample(int(cfg["n_train"]), stream.child(0))
    if train.n1 >= train.n0:
        raise VtssError(f"rep {rep}: realized counts not imbalanced "
                        f"(n0={train.n0}, n1={train.n1})")
    per_class = int(cfg.get("eval_per_class", 10_000))
    X_eval = np.vstack([model.sample_majority(per_class, stream.child(1)),
                        model.sample_minority(per_class, stream.child(2))])
    y_eval = np.concatenate([np.zeros(per_class, dtype=np.int64),
                             np.ones(per_class, dtype=np.int64)])
    eval_set = LabeledDataset(X_eval, y_eval)
    star_fit = fit_balanced_erm(eval_set, LOGISTIC, FitConfig())
    star_loss = balanced_empirical_loss(star_fit.theta, LOGISTIC, eval_set)

    minority = split_by_class(train).minority
    gammas = _grid(cfg, "gamma_grid", np.linspace(0.0, 2.0, 21))
    rows = []
    for g_idx, gen_name in enumerate(cfg["generators"]):
        spec = _generator_for(gen_name, int(cfg.get("k", 5)), model,
                              gaussian_ridge=float(cfg.get("gaussian_ridge", 1e-6)))
        gen_stream = stream.child(3 + g_idx)
        for gi, gamma in enumerate(gammas):
            n_syn = int(round(gamma * (train.n0 - train.n1)))
            batch = generate(spec, minority, train, n_syn, gen_stream.child(gi))
            fit = _fit_with_synthetic(train, batch.rows, LOGISTIC, FitConfig())
            rows.append((float(gamma), rep, f"excess_risk/{gen_name}",
                         balanced_empirical_loss(fit.theta, LOGISTIC, eval_set)
                         - star_loss))
            rows.append((float(gamma), rep, f"param_error/{gen_name}",
                         float(np.linalg.norm(fit.theta - model.theta_true))))
    return rows


# ---------------------------------------------------------------------------
# csv_excess_risk: the real-data evaluation pipeline on a user CSV
# ---------------------------------------------------------------------------
#
# Config file shape (user-written JSON, passed as --preset path/to/cfg.json):
#   {"experiment": "csv_excess_risk", "data": "cohort.csv",
#    "train_fraction": 0.8, "reps": 100,
#    "generators": ["smote", "adasyn", "borderline_smote", "jitter"],
#    "gamma_grid": [0.25, 0.5, ..., 2.0], "k": 5,
#    "loss": {"family": "logistic"}, "ridge": 1e-6, "vtss": true}
#
# Per repetition: stratified train/test split; per generator and gamma the
# train split is augmented and fitted, then scored on the untouched test
# split with the plug-in balanced excess risk (logistic/squared) and
# balanced accuracy; a VTSS-tuned model is scored the same way.

def _stratified_split(data: LabeledDataset, train_fraction: float,
                      stream: RngStream):
    gen = stream.generator()
    train_idx = []
    test_idx = []
    for label in (0, 1):
        idx = gen.permutation(np.flatnonzero(data.labels == label))
        cut = int(round(train_fraction * len(idx)))
        train_idx.append(idx[:cut])
        test_idx.append(idx[cut:])
    return (data.subset(np.sort(np.concatenate(train_idx))),
            data.subset(np.sort(np.concatenate(test_idx))))


def _csv_metrics(fit, loss, test, star_loss):
    out = {"balanced_accuracy": balanced_accuracy(fit, test)}
    if loss.family != "hinge":
        out["excess_risk"] = balanced_empirical_loss(fit.theta, loss, test) \
            - star_loss
    return out


def _cell_csv(cfg: dict, data: LabeledDataset, rep: int, stream: RngStream):
    loss = LossSpec.from_config(cfg.get("loss", {"family": "logistic"}))
    fit_cfg = FitConfig(ridge=cfg.get("ridge"))
    train, test = _stratified_split(data, float(cfg.get("train_fraction", 0.8)),
                                    stream.child(0))
    star_loss = None
    if loss.family != "hinge":
        star = fit_balanced_erm(test, loss, fit_cfg)
        star_loss = balanced_empirical_loss(star.theta, loss, test)

    minority = split_by_class(train).minority
    gammas = _grid(cfg, "gamma_grid", np.linspace(0.0, 2.0, 9))
    rows = []
    for g_idx, gen_name in enumerate(cfg.get("generators", ["smote"])):
        spec = _generator_for(gen_name, int(cfg.get("k", 5)), None,
                              gaussian_ridge=float(cfg.get("gaussian_ridge", 1e-6)))
        gen_stream = stream.child(1 + g_idx)
        for gi, gamma in enumerate(gammas):
            n_syn = int(round(gamma * (train.n0 - train.n1)))
            batch = generate(spec, minority, train, n_syn, gen_stream.child(gi))
            fit = _fit_with_synthetic(train, batch.rows, loss, fit_cfg)
            for name, value in _csv_metrics(fit, loss, test, star_loss).items():
                rows.append((float(gamma), rep, f"{name}/{gen_name}", value))
        if cfg.get("vtss", True):
            vtss_cfg = VtssConfig(
                gamma_grid=tuple(gammas), K=int(cfg.get("K", 5)),
                repeats=int(cfg.get("cv_repeats", 1)),
                objective="balanced_accuracy" if loss.family == "hinge"
                else "balanced_loss",
                generator=spec, loss=loss, fit=fit_cfg)
            res = vtss_tune(train, vtss_cfg, gen_stream.child(10**6))
            vm = _csv_metrics(res.final_model, loss, test, star_loss)
            for name, value in vm.items():
                rows.append((res.gamma_star, rep, f"{name}/vtss/{gen_name}", value))
            rows.append((res.gamma_star, rep, f"gamma_star/vtss/{gen_name}",
                         res.gamma_star))
    return rows


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

def _tasks_for(cfg: dict):
    """(task key tuple, stream path indices) per cell; key[0] drives dispatch."""
    kind = cfg["experiment"]
    reps = int(cfg["reps"])
    if kind in ("fig2", "fig3"):
        grid = [int(v) for v in cfg["n1_grid"]]
        return [(si, sweep, rep) for si, sweep in enumerate(grid)
                for rep in range(reps)]
    if kind in ("fig4", "gamma_histogram"):
        return [(si, si, rep) for si in range(len(cfg["noise_kinds"]))
                for rep in range(reps)]
    return [(0, 0, rep) for rep in range(reps)]


def _load_extra(cfg: dict, base_seed: int):
    """Shared per-experiment payload (fixed test set or the source CSV)."""
    if cfg["experiment"] == "fig5_loss_curve":
        return _fig5_test_set(cfg, RngStream(base_seed))
    if cfg["experiment"] == "csv_excess_risk":
        return load_csv(cfg["data"])
    return None


def _run_cell(cfg: dict, task, base_seed: int, extra=None):
    si, sweep, rep = task
    stream = RngStream(base_seed).child(si).child(rep)
    kind = cfg["experiment"]
    if kind == "fig2":
        return _cell_fig2(cfg, sweep, rep, stream)
    if kind == "fig3":
        return _cell_fig3(cfg, sweep, rep, stream)
    if kind == "fig4":
        return _cell_fig4(cfg, sweep, rep, stream)
    if kind == "gamma_histogram":
        return _cell_gamma_histogram(cfg, sweep, rep, stream)
    if kind == "fig5_loss_curve":
        return _cell_fig5(cfg, extra, rep, stream)
    if kind == "csv_excess_risk":
        return _cell_csv(cfg, extra, rep, stream)
    if kind == "sigmoid_symmetry":
        return _cell_sigmoid(cfg, rep, stream)
    raise UnknownPreset(f"unknown experiment kind {kind!r}")


def _cell_wrapper(args):
    cfg, task, base_seed, extra = args
    try:
        return task, _run_cell(cfg, task, base_seed, extra), None
    except VtssError as exc:
        return task, [], str(exc)


def run_experiment(config: ExperimentConfig) -> ResultTable:
    """Run a preset protocol; deterministic in base_seed, cell failures are
    logged and skipped."""
    cfg = config.resolved()
    extra = _load_extra(cfg, config.base_seed)
    tasks = _tasks_for(cfg)
    args = [(cfg, task, config.base_seed, extra) for task in tasks]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(_cell_wrapper, args, chunksize=4))
    else:
        outcomes = [_cell_wrapper(a) for a in args]
    rows, failures = [], []
    for task, cell_rows, err in outcomes:
        if err is not None:
            failures.append((float(task[1]), task[2], err))
        rows.extend(cell_rows)
    return ResultTable(rows=rows, failures=failures, config=cfg)


def rerun_cell(config: ExperimentConfig, task) -> list:
    """Reproduce a single cell's rows in isolation (reproducibility check)."""
    cfg = config.resolved()
    extra = _load_extra(cfg, config.base_seed)
    return _run_cell(cfg, tuple(task), config.base_seed, extra)


def run_vtss_comparison(config: ExperimentConfig) -> ResultTable:
    """Paired VTSS vs naive-balancing protocol (fig3 family)."""
    if config.resolved()["experiment"] != "fig3":
        raise UnknownPreset("run_vtss_comparison needs a fig3-style preset")
    return run_experiment(config)


def run_gamma_histogram(config: ExperimentConfig) -> ResultTable:
    """Distribution of the selected multiplier over repetitions
    (fig-select0 family, mean-shift presets only)."""
    if config.resolved()["experiment"] != "gamma_histogram":
        raise UnknownPreset("run_gamma_histogram needs a gamma-histogram preset")
    return run_experiment(config)


def experiment_preset_names() -> list[str]:
    return [n for n in preset_names()
            if "experiment" in load_preset_config(n)]


def loglog_slope(metric_means: dict, points: int = 5) -> float:
    """OLS slope of log(mean) against log(sweep) over the largest sweep values.

    The standard decay-rate readout for excess-risk curves: a slope near -1
    is the parametric rate, a slope near 0 a plateau.
    """
    sweeps = sorted(metric_means)[-points:]
    if len(sweeps) < 2:
        raise ValueError("need at least two sweep points")
    x = np.log([float(s) for s in sweeps])
    vals = np.asarray([metric_means[s] for s in sweeps], dtype=float)
    if (vals <= 0).any():
        raise ValueError("log-log slope needs positive means")
    y = np.log(vals)
    x = x - x.mean()
    return float(x @ (y - y.mean()) / (x @ x))
