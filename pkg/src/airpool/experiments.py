"""Batch experiment drivers behind the command-line interface.

Each experiment consumes an ExperimentConfig (parsed from a flat INI-style
file), produces a fixed-column row set, and writes three artifacts into the
output directory: `<kind>.csv` (byte-reproducible for a fixed config, seed,
and worker count), `<kind>.svg` (derived chart, never feeds back into the
CSV), and `<kind>.meta.json` (config echo, CSV content hash, timestamp; the
timestamp lives here so the CSV stays reproducible).
"""

import configparser
import csv
import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import analysis, features as feat, optimizer, sensing
from .channel import SystemParams, airpool_latency, db_to_linear, digital_latency
from .features import FeatureModel
from .pooling import AirPoolConfig, PoolingMode
from .svgchart import Series, render_line_chart

EXPERIMENT_KINDS = ("latency_table", "tradeoff_curve", "bound_validation",
                    "alpha_optimality", "synthetic_e2e")

_MODEL_KINDS = {
    "rectified_gaussian": FeatureModel.rectified_gaussian,
    "uniform01": FeatureModel.uniform01,
    "exponential_unit": FeatureModel.exponential_unit,
}


class ConfigError(Exception):
    """Raised for unparsable or invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    """Everything one experiment run needs."""

    experiment: str
    system: SystemParams = field(default_factory=SystemParams)
    feature_kind: str = "rectified_gaussian"
    feature_file: str = ""
    snr_grid_db: Tuple[float, ...] = (0.0, 6.0, 12.0)
    alpha_grid: Tuple[float, ...] = (1.0, 2.0, 4.0, 8.0, 16.0)
    trials: int = 100_000
    seed: int = 42
    output_dir: str = "out"
    workers: int = 1
    q_bits: int = 6
    n_samples: int = 4000
    epochs: int = 200
    learning_rate: float = 0.5
    trials_per_sample: int = 20
    fault_injection: str = ""

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_KINDS:
            raise ConfigError(f"experiment.kind must be one of {EXPERIMENT_KINDS}, "
                              f"got {self.experiment!r}")
        if not self.snr_grid_db or not self.alpha_grid:
            raise ConfigError("sweep grids must be nonempty")
        if self.experiment != "latency_table" and self.trials < 10_000:
            raise ConfigError("experiment.trials must be >= 10000 for Monte Carlo runs")
        if self.workers < 1:
            raise ConfigError("experiment.workers must be >= 1")

    def feature_model(self) -> FeatureModel:
        if self.feature_kind == "empirical":
            if not self.feature_file:
                raise ConfigError("feature_model.sample_file is required for kind=empirical")
            return FeatureModel.from_file(self.feature_file)
        maker = _MODEL_KINDS.get(self.feature_kind)
        if maker is None:
            raise ConfigError(f"feature_model.kind must be one of "
                              f"{sorted(_MODEL_KINDS) + ['empirical']}, got {self.feature_kind!r}")
        return maker()

    def echo(self) -> Dict:
        d = asdict(self)
        d["system"] = asdict(self.system)
        return d


def _get_typed(section, name: str, cast, default):
    if name not in section:
        return default
    raw = section[name]
    try:
        if cast is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return cast(raw)
    except ValueError:
        raise ConfigError(f"[{section.name}] {name}: cannot parse {raw!r} as {cast.__name__}")


def _get_float_list(section, name: str, default):
    if name not in section:
        return default
    raw = section[name]
    try:
        return tuple(float(part) for part in raw.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"[{section.name}] {name}: cannot parse {raw!r} as a float list")


def parse_config(path) -> ExperimentConfig:
    """Read the flat key-value experiment config with section headers."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}")
    if not read:
        raise ConfigError(f"{path}: file not found or empty")
    if "experiment" not in parser:
        raise ConfigError(f"{path}: missing [experiment] section")
    exp = parser["experiment"]
    kind = exp.get("kind", "").strip()
    if "system" not in parser:
        system = SystemParams()
    else:
        sys_sec = parser["system"]
        try:
            system = SystemParams(
                k_sensors=_get_typed(sys_sec, "k_sensors", int, 12),
                n_features=_get_typed(sys_sec, "n_features", int, 17911),
                bandwidth_hz=_get_typed(sys_sec, "bandwidth_hz", float, 10e6),
                n_subchannels=_get_typed(sys_sec, "n_subchannels", int, 12),
                power_budget_w=_get_typed(sys_sec, "power_budget_w", float, 1.0),
                noise_density_dbm_per_hz=_get_typed(sys_sec, "noise_density_dbm_per_hz",
                                                    float, -174.0),
                noise_figure_db=_get_typed(sys_sec, "noise_figure_db", float, 4.0),
                path_loss=_get_typed(sys_sec, "path_loss", float, 300.0 ** -3.4),
                rician_ratio_db=_get_typed(sys_sec, "rician_ratio_db", float, 4.0),
            )
        except ValueError as exc:
            raise ConfigError(f"[system]: {exc}")
    fm_sec = parser["feature_model"] if "feature_model" in parser else None
    sweep = parser["sweep"] if "sweep" in parser else None
    kwargs = dict(
        experiment=kind,
        system=system,
        trials=_get_typed(exp, "trials", int, 100_000),
        seed=_get_typed(exp, "seed", int, 42),
        output_dir=exp.get("output_dir", "out"),
        workers=_get_typed(exp, "workers", int, 1),
        fault_injection=exp.get("fault_injection", "").strip(),
    )
    if fm_sec is not None:
        kwargs["feature_kind"] = fm_sec.get("kind", "rectified_gaussian").strip()
        kwargs["feature_file"] = fm_sec.get("sample_file", "").strip()
    if sweep is not None:
        kwargs["snr_grid_db"] = _get_float_list(sweep, "snr_grid_db", (0.0, 6.0, 12.0))
        kwargs["alpha_grid"] = _get_float_list(sweep, "alpha_grid",
                                               (1.0, 2.0, 4.0, 8.0, 16.0))
        kwargs["q_bits"] = _get_typed(sweep, "q_bits", int, 6)
        kwargs["n_samples"] = _get_typed(sweep, "n_samples", int, 4000)
        kwargs["epochs"] = _get_typed(sweep, "epochs", int, 200)
        kwargs["learning_rate"] = _get_typed(sweep, "learning_rate", float, 0.5)
        kwargs["trials_per_sample"] = _get_typed(sweep, "trials_per_sample", int, 20)
    return ExperimentConfig(**kwargs)


@dataclass
class ExperimentResult:
    """Fixed-column rows plus reproducibility metadata."""

    experiment: str
    columns: Tuple[str, ...]
    rows: List[Dict]
    metadata: Dict
    failures: int = 0


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def write_csv(result: ExperimentResult, path) -> str:
    """Write rows with a header; returns the sha256 of the file content."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(result.columns)
        for row in result.rows:
            writer.writerow([_fmt_value(row.get(c, "")) for c in result.columns])
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def write_outputs(result: ExperimentResult, out_dir, chart: Optional[dict]) -> dict:
    """Write CSV, SVG, and metadata sidecar; returns the artifact paths."""
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, result.experiment)
    csv_path = base + ".csv"
    svg_path = base + ".svg"
    meta_path = base + ".meta.json"
    content_hash = write_csv(result, csv_path)
    if chart:
        render_line_chart(svg_path, **chart)
    meta = dict(result.metadata)
    meta["csv_sha256"] = content_hash
    meta["written_at_unix"] = time.time()
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {"csv": csv_path, "svg": svg_path if chart else "", "meta": meta_path}


# ---------------------------------------------------------------------------
# latency_table
# ---------------------------------------------------------------------------

def run_latency_table(cfg: ExperimentConfig) -> Tuple[ExperimentResult, Optional[dict]]:
    params = cfg.system
    rows = [{
        "scheme": "airpool", "snr_db": "", "q_bits": "",
        "latency_ms": airpool_latency(params) * 1e3, "seed": cfg.seed,
    }]
    for snr_db in cfg.snr_grid_db:
        rows.append({
            "scheme": "digital", "snr_db": snr_db, "q_bits": cfg.q_bits,
            "latency_ms": digital_latency(params, cfg.q_bits, db_to_linear(snr_db)) * 1e3,
            "seed": cfg.seed,
        })
    result = ExperimentResult(
        "latency_table", ("scheme", "snr_db", "q_bits", "latency_ms", "seed"),
        rows, {"config": cfg.echo()})
    chart = dict(
        series=[Series("digital", list(cfg.snr_grid_db),
                       [r["latency_ms"] for r in rows[1:]]),
                Series("airpool", list(cfg.snr_grid_db),
                       [rows[0]["latency_ms"]] * len(cfg.snr_grid_db))],
        title="Air latency vs receive SNR", x_label="receive SNR (dB)",
        y_label="latency (ms)")
    return result, chart


# ---------------------------------------------------------------------------
# tradeoff_curve
# ---------------------------------------------------------------------------

def run_tradeoff_curve(cfg: ExperimentConfig) -> Tuple[ExperimentResult, Optional[dict]]:
    snr_db = cfg.snr_grid_db[0]
    noise = cfg.system.subchannel_noise_w
    p_rx = db_to_linear(snr_db) * noise
    rows: List[Dict] = []
    series: List[Series] = []
    model_kinds = [cfg.feature_kind] if cfg.feature_kind == "empirical" else \
        list(_MODEL_KINDS)
    k = cfg.system.k_sensors
    for kind in model_kinds:
        model = cfg.feature_model() if kind == "empirical" else _MODEL_KINDS[kind]()
        curve, diagnostics = analysis.tradeoff_curve(
            model, k, p_rx, noise, list(cfg.alpha_grid),
            trials=cfg.trials, seed=cfg.seed)
        for row, diag in zip(curve, [";".join(diagnostics)] + [""] * (len(curve) - 1)):
            rows.append({"model": kind, "snr_db": snr_db, **row,
                         "diagnostics": diag, "seed": cfg.seed})
        series.append(Series(f"{kind} noise", [r["alpha"] for r in curve],
                             [r["noise_bound"] for r in curve]))
        series.append(Series(f"{kind} approx", [r["alpha"] for r in curve],
                             [r["approx_bound_max"] for r in curve]))
    result = ExperimentResult(
        "tradeoff_curve",
        ("model", "snr_db", "alpha", "noise_bound", "noise_bound_asymptotic",
         "approx_bound_max", "bound_sum", "diagnostics", "seed"),
        rows, {"config": cfg.echo()})
    chart = dict(series=series, title=f"Error-bound tradeoff at {snr_db:g} dB",
                 x_label="alpha", y_label="bound", log_x=True)
    return result, chart


# ---------------------------------------------------------------------------
# bound_validation
# ---------------------------------------------------------------------------

def _grid_point_check(args) -> List[Dict]:
    """(Picklable) bound checks for one (mode, alpha, snr) grid point."""
    kind, feature_file, k, alpha, snr_db, noise, trials, seed, fault = args
    model = FeatureModel.from_file(feature_file) if kind == "empirical" else \
        _MODEL_KINDS[kind]()
    p_rx = db_to_linear(snr_db) * noise
    mode_rows = []
    for mode_name in ("average", "max"):
        if mode_name == "max":
            cfg_point = optimizer.config_for(model, PoolingMode.max(), k, alpha,
                                             p_rx, noise, seed=seed)
        else:
            cfg_point = AirPoolConfig.average_ground_truth(model, k, alpha,
                                                           p_rx, noise, seed=seed)
        err = analysis.estimate_errors(model, cfg_point, k, trials=trials, seed=seed)
        # The fault flag exists so the gate itself can be tested: it inflates
        # the measured noise error far past its bound.
        d_chan = err.d_chan * (1000.0 if fault == "noise_bound" else 1.0)
        mode_rows.append({
            "check": "noise-bound", "mode": mode_name, "alpha": alpha,
            "snr_db": snr_db, "measured": d_chan, "bound": err.noise_bound,
            "slack": err.noise_bound + analysis.N_SIGMA * err.se_chan - d_chan,
            "passed": d_chan <= err.noise_bound + analysis.N_SIGMA * err.se_chan,
        })
        eps_tol = analysis.N_SIGMA * math.hypot(err.se_appr, err.approx_bound_se)
        mode_rows.append({
            "check": "approx-bound", "mode": mode_name, "alpha": alpha,
            "snr_db": snr_db, "measured": err.d_appr, "bound": err.approx_bound,
            "slack": err.approx_bound + eps_tol - err.d_appr,
            "passed": err.d_appr <= err.approx_bound + eps_tol,
        })
        slack = err.decomposition_slack()
        mode_rows.append({
            "check": "decomposition", "mode": mode_name, "alpha": alpha,
            "snr_db": snr_db, "measured": err.d_total,
            "bound": err.c0 * (err.d_chan + err.d_appr),
            "slack": slack, "passed": slack >= 0.0,
        })
    return mode_rows


def run_bound_validation(cfg: ExperimentConfig) -> Tuple[ExperimentResult, Optional[dict]]:
    noise = cfg.system.subchannel_noise_w
    k = cfg.system.k_sensors
    model = cfg.feature_model()
    points = [(cfg.feature_kind, cfg.feature_file, k, alpha, snr_db, noise,
               cfg.trials, cfg.seed, cfg.fault_injection)
              for alpha in cfg.alpha_grid for snr_db in cfg.snr_grid_db]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_grid_point_check, points))
    else:
        chunks = [_grid_point_check(p) for p in points]
    rows: List[Dict] = [row for chunk in chunks for row in chunk]

    # Closed-form cross checks that need no Monte Carlo.
    p10 = 10.0 * noise
    ratio64 = analysis.noise_error_asymptote(64.0, p10, noise) / \
        analysis.noise_error_bound_gamma_form(64.0, p10, noise)
    ratio8 = analysis.noise_error_asymptote(8.0, p10, noise) / \
        analysis.noise_error_bound_gamma_form(8.0, p10, noise)
    rows.append({
        "check": "asymptote-tightness", "mode": "max", "alpha": 64.0, "snr_db": 10.0,
        "measured": ratio64, "bound": 1.05,
        "slack": 0.05 - abs(ratio64 - 1.0),
        "passed": abs(ratio64 - 1.0) <= 0.05 and abs(ratio64 - 1.0) < abs(ratio8 - 1.0),
    })
    slope = analysis.noise_error_asymptote_derivative(64.0, p10, noise)
    rows.append({
        "check": "asymptote-slope", "mode": "max", "alpha": 64.0, "snr_db": 10.0,
        "measured": slope, "bound": 2.0 / math.e,
        "slack": 0.05 - abs(slope / (2.0 / math.e) - 1.0),
        "passed": abs(slope / (2.0 / math.e) - 1.0) <= 0.05,
    })
    e2 = feat.max_second_moment(model, k, trials=max(cfg.trials, 100_000),
                                seed=cfg.seed).value
    gaps = []
    for ratio in (1e2, 1e3, 1e4):
        closed = optimizer.closed_form_alpha(k, ratio * noise, noise, e2).alpha_star
        root = optimizer.bisection_alpha(k, ratio * noise, noise, e2)
        gaps.append(abs(closed - root))
    rows.append({
        "check": "stationarity-gap-monotone", "mode": "max", "alpha": "",
        "snr_db": "", "measured": max(gaps), "bound": gaps[0],
        "slack": min(gaps[i] - gaps[i + 1] for i in range(len(gaps) - 1)),
        "passed": all(gaps[i] >= gaps[i + 1] - 1e-12 for i in range(len(gaps) - 1)),
    })
    dense = np.geomspace(1.0, 128.0, 512)
    for ratio in (1e3, 1e4):
        closed = optimizer.closed_form_alpha(k, ratio * noise, noise, e2)
        best = min(optimizer.surrogate_objective(a, k, ratio * noise, noise, e2)
                   for a in dense)
        rows.append({
            "check": "surrogate-near-optimality", "mode": "max", "alpha":
                closed.alpha_star, "snr_db": 10.0 * math.log10(ratio),
            "measured": closed.objective_value, "bound": 1.1 * best,
            "slack": 1.1 * best - closed.objective_value,
            "passed": closed.objective_value <= 1.1 * best,
        })
    rows.extend(_reconfigurability_checks(model, k, cfg))
    rows.extend(_argmin_rule_checks(model, k, noise, e2, cfg))
    rows.extend(_margin_chain_checks(model, noise, cfg))
    failures = sum(0 if r["passed"] else 1 for r in rows)
    result = ExperimentResult(
        "bound_validation",
        ("check", "mode", "alpha", "snr_db", "measured", "bound", "slack", "passed"),
        rows, {"config": cfg.echo()}, failures=failures)
    return result, None


def _reconfigurability_checks(model, k, cfg: ExperimentConfig) -> List[Dict]:
    """Exactness of zero-noise averaging, convergence of zero-noise max
    pooling, and the per-sample sandwich bound."""
    from .pooling import pool_noisy_and_clean

    rows = []
    rng = np.random.default_rng(cfg.seed)
    f = model.draw(rng, (min(cfg.trials, 50_000), k))
    avg_cfg = AirPoolConfig.for_average(model, k, 1.0, 0.0)
    g_hat, _, g_true = pool_noisy_and_clean(f, avg_cfg, rng)
    avg_err = float(np.max(np.abs(g_hat - g_true)
                           / np.where(g_true > 0, g_true, 1.0)))
    rows.append({"check": "reconfig-average", "mode": "average", "alpha": 1.0,
                 "snr_db": "", "measured": avg_err, "bound": 1e-12,
                 "slack": 1e-12 - avg_err, "passed": avg_err <= 1e-12})
    prev_err = math.inf
    sandwich_ok = True
    mean_rel = math.nan
    for alpha in (2.0, 8.0, 64.0):
        max_cfg = optimizer.config_for(model, PoolingMode.max(), k, alpha,
                                       1.0, 0.0, seed=cfg.seed)
        g_hat, _, g_true = pool_noisy_and_clean(f, max_cfg, rng)
        pos = g_true > 0
        mean_rel = float(np.mean(np.abs(g_hat[pos] - g_true[pos]) / g_true[pos]))
        sandwich_ok &= bool(np.all(g_hat >= g_true * k ** (-1.0 / alpha) - 1e-12)
                            and np.all(g_hat <= g_true * k ** (1.0 / alpha) + 1e-12))
        rows.append({"check": "reconfig-max-monotone", "mode": "max",
                     "alpha": alpha, "snr_db": "", "measured": mean_rel,
                     "bound": prev_err, "slack": prev_err - mean_rel,
                     "passed": mean_rel < prev_err})
        prev_err = mean_rel
    rows.append({"check": "reconfig-max", "mode": "max", "alpha": 64.0,
                 "snr_db": "", "measured": mean_rel, "bound": 0.02,
                 "slack": 0.02 - mean_rel, "passed": mean_rel <= 0.02})
    rows.append({"check": "sandwich", "mode": "max", "alpha": "", "snr_db": "",
                 "measured": 0.0 if sandwich_ok else 1.0, "bound": 0.0,
                 "slack": 0.0, "passed": sandwich_ok})
    return rows


def _argmin_rule_checks(model, k, noise, e2, cfg: ExperimentConfig) -> List[Dict]:
    """Brute-force argmin rules: averaging prefers alpha = 1 at any SNR, and
    below the critical power ratio max pooling stays within one grid step
    of alpha = 1."""
    rows = []
    grid = [1.0, 2.0, 4.0]
    snr_db = cfg.snr_grid_db[0]
    d = optimizer.brute_force_alpha(model, PoolingMode.average(), k,
                                    db_to_linear(snr_db) * noise, noise, grid,
                                    trials=cfg.trials, seed=cfg.seed)
    rows.append({"check": "average-argmin", "mode": "average",
                 "alpha": d.alpha_star, "snr_db": snr_db,
                 "measured": d.alpha_star, "bound": 1.0,
                 "slack": 1.0 - d.alpha_star, "passed": d.alpha_star == 1.0})
    rho0 = optimizer.low_snr_threshold(k, e2)
    d = optimizer.brute_force_alpha(model, PoolingMode.max(), k,
                                    0.5 * rho0 * noise, noise, grid,
                                    trials=cfg.trials, seed=cfg.seed)
    rows.append({"check": "low-snr-argmin", "mode": "max",
                 "alpha": d.alpha_star, "snr_db": "",
                 "measured": d.alpha_star, "bound": grid[1],
                 "slack": grid[1] - d.alpha_star,
                 "passed": d.alpha_star <= grid[1]})
    return rows


def _margin_chain_checks(model, noise, cfg: ExperimentConfig) -> List[Dict]:
    """Accuracy chain on the linear synthetic task plus the chi fit of the
    averaging error norm."""
    from . import sensing as _sensing
    from .pooling import aggregate_with_noise, postprocess, powered_sum

    rows = []
    dataset = _sensing.generate_dataset(1500, cfg.seed, linear_labels=True,
                                        margin_gap=0.2,
                                        mode=PoolingMode.average(), model=model)
    margin_model = _sensing.measure_linear_margin(dataset, seed=cfg.seed)
    per_dim = np.swapaxes(dataset.views, 1, 2)
    pooled = dataset.pooled()
    r0 = margin_model.clean_accuracy
    for snr_db in (cfg.snr_grid_db[0], cfg.snr_grid_db[-1]):
        pool_cfg = AirPoolConfig.for_average(model, dataset.k_views,
                                             db_to_linear(snr_db) * noise, noise)
        v_sum = powered_sum(per_dim, pool_cfg)
        rng = np.random.default_rng(cfg.seed)
        hits, sq, n = 0, 0.0, 0
        for _ in range(10):
            g_hat = postprocess(aggregate_with_noise(v_sum, pool_cfg, rng),
                                pool_cfg)
            pred = (margin_model.decision(g_hat) > 0).astype(int)
            hits += int((pred == dataset.labels).sum())
            sq += float(((g_hat - pooled) ** 2).sum(axis=1).mean())
            n += len(dataset)
        r_ap = hits / n
        bound = r0 * max(0.0, 1.0 - (sq / 10.0) / margin_model.margin ** 2)
        se = math.sqrt(max(r_ap * (1.0 - r_ap), 1e-12) / n)
        rows.append({"check": "margin-chain", "mode": "average", "alpha": 1.0,
                     "snr_db": snr_db, "measured": r_ap, "bound": bound,
                     "slack": r_ap - (bound - 2.0 * se),
                     "passed": r_ap >= bound - 2.0 * se})
    nu1_sq = feat.normalization_moments(model, 1.0).nu_sq
    fit = analysis.chi_error_check(dataset.k_views, dataset.n_features, noise,
                                   db_to_linear(10.0) * noise, nu1_sq,
                                   trials=max(cfg.trials, 10_000), seed=cfg.seed)
    rows.append({"check": "chi-fit", "mode": "average", "alpha": 1.0,
                 "snr_db": 10.0, "measured": fit.statistic,
                 "bound": fit.critical_1pct,
                 "slack": fit.critical_1pct - fit.statistic,
                 "passed": fit.passed})
    return rows


# ---------------------------------------------------------------------------
# alpha_optimality
# ---------------------------------------------------------------------------

def run_alpha_optimality(cfg: ExperimentConfig) -> Tuple[ExperimentResult, Optional[dict]]:
    noise = cfg.system.subchannel_noise_w
    k = cfg.system.k_sensors
    model = cfg.feature_model()
    e2 = feat.max_second_moment(model, k, trials=max(cfg.trials, 100_000),
                                seed=cfg.seed).value
    grid = optimizer.default_alpha_grid(48)
    rows = []
    for snr_db in cfg.snr_grid_db:
        p_bar = db_to_linear(snr_db) * noise
        closed = optimizer.closed_form_alpha(k, p_bar, noise, e2)
        root = optimizer.bisection_alpha(k, p_bar, noise, e2)
        brute = optimizer.brute_force_alpha(model, PoolingMode.max(), k, p_bar,
                                            noise, grid, trials=cfg.trials,
                                            seed=cfg.seed)
        cfg_closed = optimizer.config_for(model, PoolingMode.max(), k,
                                          closed.alpha_star, p_bar, noise,
                                          seed=cfg.seed)
        d_closed = analysis.estimate_errors(model, cfg_closed, k,
                                            trials=cfg.trials, seed=cfg.seed).d_total
        rows.append({
            "snr_db": snr_db, "alpha_closed": closed.alpha_star,
            "alpha_bisection": root, "alpha_bruteforce": brute.alpha_star,
            "d_closed": d_closed, "d_bruteforce": brute.objective_value,
            "seed": cfg.seed,
        })
    result = ExperimentResult(
        "alpha_optimality",
        ("snr_db", "alpha_closed", "alpha_bisection", "alpha_bruteforce",
         "d_closed", "d_bruteforce", "seed"),
        rows, {"config": cfg.echo()})
    xs = [r["snr_db"] for r in rows]
    chart = dict(series=[
        Series("closed form", xs, [r["alpha_closed"] for r in rows]),
        Series("stationarity root", xs, [r["alpha_bisection"] for r in rows]),
        Series("brute force", xs, [r["alpha_bruteforce"] for r in rows])],
        title="Selected alpha vs receive SNR", x_label="receive SNR (dB)",
        y_label="alpha")
    return result, chart


# ---------------------------------------------------------------------------
# synthetic_e2e
# ---------------------------------------------------------------------------

def run_synthetic_e2e(cfg: ExperimentConfig) -> Tuple[ExperimentResult, Optional[dict]]:
    noise = cfg.system.subchannel_noise_w
    model = cfg.feature_model()
    dataset = sensing.generate_dataset(cfg.n_samples, cfg.seed, model=model)
    report = sensing.train_classifier(dataset, epochs=cfg.epochs,
                                      learning_rate=cfg.learning_rate, seed=cfg.seed)
    rows = []
    k = dataset.k_views
    for snr_db in sorted(cfg.snr_grid_db, reverse=True):
        p_rx = db_to_linear(snr_db) * noise
        decision = optimizer.select_alpha(PoolingMode.max(), model, k, p_rx, noise,
                                          trials=max(cfg.trials, 10_000), seed=cfg.seed)
        pool_cfg = AirPoolConfig.for_max(model, k, decision.alpha_star, p_rx, noise,
                                         trials=200_000, seed=cfg.seed)
        r_ap, d_sigma = sensing.evaluate_accuracy(
            report.classifier, dataset, pool_cfg, cfg.system,
            trials_per_sample=cfg.trials_per_sample, seed=cfg.seed)
        rows.append({"snr_db": snr_db, "alpha": decision.alpha_star,
                     "alpha_method": decision.method, "r_ap": r_ap,
                     "d_sigma": d_sigma, "r0": report.clean_accuracy,
                     "seed": cfg.seed})
    result = ExperimentResult(
        "synthetic_e2e",
        ("snr_db", "alpha", "alpha_method", "r_ap", "d_sigma", "r0", "seed"),
        rows, {"config": cfg.echo(),
               "clean_accuracy": report.clean_accuracy,
               "final_loss": report.final_loss})
    xs = [r["snr_db"] for r in rows]
    chart = dict(series=[Series("accuracy", xs, [r["r_ap"] for r in rows]),
                         Series("feature error", xs, [r["d_sigma"] for r in rows])],
                 title="End-to-end accuracy and pooling error",
                 x_label="receive SNR (dB)", y_label="value")
    return result, chart


_RUNNERS = {
    "latency_table": run_latency_table,
    "tradeoff_curve": run_tradeoff_curve,
    "bound_validation": run_bound_validation,
    "alpha_optimality": run_alpha_optimality,
    "synthetic_e2e": run_synthetic_e2e,
}


def run_experiment(cfg: ExperimentConfig) -> Tuple[ExperimentResult, dict]:
    """Run the configured experiment and write its artifacts."""
    result, chart = _RUNNERS[cfg.experiment](cfg)
    paths = write_outputs(result, cfg.output_dir, chart)
    return result, paths
