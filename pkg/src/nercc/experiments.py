"""Configuration-driven experiment runs: straggler sweeps, smoothing sweeps,
and joint smoothing-parameter tuning.

Within a trial index every scheme sees the same input batch and the same
survivor set, so scheme comparisons are paired and free of sampling noise.
Rows are emitted in (scheme, setting, trial) order and all randomness
derives from the master seed, which makes reruns byte-identical.

The ``runtime_ms`` column records the simulated round makespan (the latest
survivor arrival), not wall-clock time, so it is reproducible too; under
the fixed-count and explicit-list modes, which have no time model, it is 0.
"""

import csv
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .codec import SCHEMES, CodedBatch, SchemeConfig, SurvivorResults, decode, fit_encoder
from .datasets import make_batch
from .errors import ConfigInvalid, DecodingInfeasible, ModelLoadError, NerccError
from .metrics import METRICS_COLUMNS, MetricsRow, batch_roughness, decomposition, mse, rel_acc
from .models import builtin_model, estimate_grad_infnorm, load_model
from .points import alpha_points, beta_points
from .simulate import StragglerConfig, derive_seed, select_survivors, worker_arrivals

__all__ = [
    "ExperimentConfig",
    "default_lambda_grid",
    "load_config",
    "run_experiment",
    "summarize_by_stragglers",
    "sweep_lambda",
    "tune_lambdas",
    "write_csv",
    "STRAGGLER_SUMMARY_COLUMNS",
    "LAMBDA_SUMMARY_COLUMNS",
    "TUNE_COLUMNS",
]

# seed-stream tags so batches, rounds, and validation draws never collide
_BATCH_STREAM = 1
_ROUND_STREAM = 2

STRAGGLER_SUMMARY_COLUMNS = ("scheme", "stragglers", "median_mse", "median_agreement", "n_rows")
LAMBDA_SUMMARY_COLUMNS = ("axis", "lambda_value", "median_mse", "n_rows")
TUNE_COLUMNS = ("lambda_enc", "lambda_dec", "median_mse")


def default_lambda_grid():
    """{0} plus a decade grid from 1e-6 to 1e2."""
    return [0.0] + [10.0**e for e in range(-6, 3)]


@dataclass
class ExperimentConfig:
    """Everything one experiment needs; loadable from JSON."""

    N: int
    K: int
    schemes: list
    model: object  # manifest path or builtin spec dict
    dataset: object  # dataset path or synthetic spec dict
    stragglers: dict
    lambda_enc: float = 0.0
    lambda_dec: float = 0.0
    lambda_enc_grid: list = field(default_factory=default_lambda_grid)
    lambda_dec_grid: list = field(default_factory=default_lambda_grid)
    trials: int = 1
    seed: int = 0
    out: str = "out"

    def __post_init__(self):
        if self.N < 2:
            raise ConfigInvalid(f"N must be >= 2, got {self.N}")
        if self.K < 3:
            raise ConfigInvalid(f"K must be >= 3, got {self.K}")
        if self.trials < 1:
            raise ConfigInvalid(f"trials must be >= 1, got {self.trials}")
        if not self.schemes:
            raise ConfigInvalid("schemes list is empty")
        for scheme in self.schemes:
            if scheme not in SCHEMES:
                raise ConfigInvalid(f"unknown scheme {scheme!r}")
        for name in ("lambda_enc_grid", "lambda_dec_grid"):
            grid = [float(v) for v in getattr(self, name)]
            if not grid or any(v < 0 for v in grid):
                raise ConfigInvalid(f"{name} must be non-empty and non-negative")
            if 0.0 not in grid:
                raise ConfigInvalid(f"{name} must include 0")
            setattr(self, name, grid)
        self.straggler_settings()  # validates the straggler block

    def straggler_settings(self):
        """Expand the straggler block into a list of StragglerConfig."""
        block = self.stragglers
        if not isinstance(block, dict) or "mode" not in block:
            raise ConfigInvalid("stragglers must be a dict with a 'mode' field")
        mode = block["mode"]
        if mode == "fixed-count":
            counts = block.get("counts", [block.get("count", 0)])
            settings = [StragglerConfig(mode="fixed-count", num_stragglers=int(c)) for c in counts]
            for setting in settings:
                if setting.num_stragglers >= self.N:
                    raise ConfigInvalid(
                        f"straggler count {setting.num_stragglers} >= N={self.N}"
                    )
            return settings
        if mode == "delay-deadline":
            deadlines = block.get("deadlines", [block.get("deadline")])
            return [
                StragglerConfig(
                    mode="delay-deadline",
                    base_delay=float(block.get("base_delay", 0.0)),
                    mean_extra=float(block.get("mean_extra", 1.0)),
                    deadline=float(deadline),
                )
                for deadline in deadlines
            ]
        if mode == "explicit-list":
            lists = block.get("lists", [block.get("indices", [])])
            return [
                StragglerConfig(mode="explicit-list", straggler_indices=tuple(lst))
                for lst in lists
            ]
        raise ConfigInvalid(f"unknown straggler mode {mode!r}")


def load_config(path) -> ExperimentConfig:
    """Read an :class:`ExperimentConfig` from a JSON document."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigInvalid(f"{path}: {exc}") from exc
    known = {f.name for f in ExperimentConfig.__dataclass_fields__.values()}
    unknown = set(doc) - known
    if unknown:
        raise ConfigInvalid(f"{path}: unknown config fields {sorted(unknown)}")
    try:
        return ExperimentConfig(**doc)
    except TypeError as exc:
        raise ConfigInvalid(f"{path}: {exc}") from exc


def resolve_model(config: ExperimentConfig, base_dir=None):
    """Load the model named by the config (manifest path or builtin spec)."""
    spec = config.model
    try:
        if isinstance(spec, dict):
            return builtin_model(spec)
        path = Path(spec)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        return load_model(path)
    except NerccError:
        raise
    except Exception as exc:  # unexpected I/O or shape trouble
        raise ModelLoadError(str(exc)) from exc


def _scheme_config(scheme: str, config: ExperimentConfig) -> SchemeConfig:
    return SchemeConfig(
        scheme=scheme, lambda_enc=config.lambda_enc, lambda_dec=config.lambda_dec
    )


def _round_metrics(
    X, model, alphas, betas, cfg, setting, round_seed, trial, config
) -> MetricsRow:
    """Run one (scheme, setting, trial) round and measure it."""
    encoder = fit_encoder(X, alphas, cfg)
    coded = CodedBatch(betas=betas, coded=encoder.at(betas))
    enc_at_alpha = encoder.at(alphas)
    enc_train_sse = float(np.sum((enc_at_alpha - X) ** 2))
    roughness = batch_roughness(coded)

    outputs = model.apply(coded.coded)
    arrivals = worker_arrivals(config.N, setting, round_seed)
    survivor_idx = select_survivors(arrivals, setting)
    finite = arrivals[survivor_idx]
    runtime_ms = float(finite.max()) if finite.size else float("nan")

    exact = model.apply(X)
    grad = estimate_grad_infnorm(model, X)

    row = MetricsRow(
        trial=trial,
        scheme=cfg.scheme,
        N=config.N,
        K=config.K,
        S_size=int(survivor_idx.size),
        lambda_enc=cfg.lambda_enc,
        lambda_dec=cfg.lambda_dec,
        mse=float("nan"),
        rel_acc=float("nan"),
        agreement=float("nan"),
        term1=float("nan"),
        term2=float("nan"),
        l2_loss=float("nan"),
        enc_train_sse=enc_train_sse,
        coded_roughness=roughness,
        grad_infnorm=grad,
        runtime_ms=runtime_ms,
    )

    try:
        decoded = decode(
            SurvivorResults(indices=survivor_idx, outputs=outputs[survivor_idx]),
            betas,
            alphas,
            cfg,
        )
    except DecodingInfeasible:
        row.status = "decoding_infeasible"
        return row

    row.mse = mse(exact, decoded)
    if exact.shape[1] >= 2:
        row.agreement = rel_acc(exact, decoded)[0]
    through_enc = model.apply(enc_at_alpha)
    row.l2_loss, row.term1, row.term2 = decomposition(decoded, through_enc, exact)
    if row.l2_loss > row.term1 + row.term2 + 1e-9:
        raise AssertionError(
            f"loss decomposition violated: {row.l2_loss} > {row.term1} + {row.term2}"
        )
    return row


def run_experiment(config: ExperimentConfig, csv_path=None, base_dir=None):
    """Run every (scheme, straggler setting, trial) cell of the config.

    Returns the rows in (scheme, setting, trial) order and, when
    ``csv_path`` is given, writes them as CSV in the same order.
    """
    model = resolve_model(config, base_dir)
    alphas = alpha_points(config.K)
    betas = beta_points(config.N)
    settings = config.straggler_settings()

    batches = {}
    for trial in range(config.trials):
        batch_seed = derive_seed(config.seed, _BATCH_STREAM, trial)
        batches[trial] = make_batch(config.dataset, alphas, config.K, batch_seed)
        if batches[trial].shape[1] != model.d:
            raise ConfigInvalid(
                f"dataset dimension {batches[trial].shape[1]} != model input {model.d}"
            )

    rows = []
    for scheme in config.schemes:
        cfg = _scheme_config(scheme, config)
        for setting_index, setting in enumerate(settings):
            for trial in range(config.trials):
                round_seed = derive_seed(config.seed, _ROUND_STREAM, setting_index, trial)
                rows.append(
                    _round_metrics(
                        batches[trial], model, alphas, betas, cfg, setting,
                        round_seed, trial, config,
                    )
                )
    if csv_path is not None:
        write_metrics_csv(csv_path, rows)
    return rows


def _median(values):
    finite = [v for v in values if np.isfinite(v)]
    return float(np.median(finite)) if finite else float("nan")


def summarize_by_stragglers(config: ExperimentConfig, rows):
    """Median metrics per (scheme, straggler count), for the sweep figures."""
    groups = {}
    for row in rows:
        groups.setdefault((row.scheme, config.N - row.S_size), []).append(row)
    summary = []
    for scheme in config.schemes:
        for (row_scheme, stragglers), members in sorted(
            groups.items(), key=lambda kv: (kv[0][0], kv[0][1])
        ):
            if row_scheme != scheme:
                continue
            summary.append(
                {
                    "scheme": scheme,
                    "stragglers": stragglers,
                    "median_mse": _median([r.mse for r in members]),
                    "median_agreement": _median([r.agreement for r in members]),
                    "n_rows": len(members),
                }
            )
    return summary


def sweep_lambda(config: ExperimentConfig, axis: str = "dec", base_dir=None):
    """Sweep one smoothing parameter over its grid, the other held fixed.

    Uses the ``nercc`` scheme with the first straggler setting.  Returns
    ``(detail_rows, summary)`` where summary has one entry per grid value
    with the median end-to-end MSE over trials.
    """
    if axis not in ("enc", "dec"):
        raise ConfigInvalid(f"axis must be 'enc' or 'dec', got {axis!r}")
    grid = config.lambda_enc_grid if axis == "enc" else config.lambda_dec_grid
    detail = []
    summary = []
    for value in grid:
        sub = replace(
            config,
            schemes=["nercc"],
            lambda_enc=value if axis == "enc" else config.lambda_enc,
            lambda_dec=value if axis == "dec" else config.lambda_dec,
            stragglers=_first_setting_block(config),
        )
        rows = run_experiment(sub, base_dir=base_dir)
        detail.extend(rows)
        summary.append(
            {
                "axis": f"lambda_{axis}",
                "lambda_value": value,
                "median_mse": _median([r.mse for r in rows]),
                "n_rows": len(rows),
            }
        )
    return detail, summary


def tune_lambdas(config: ExperimentConfig, base_dir=None):
    """Exhaustive grid search for the smoothing pair with least median MSE.

    Pairs within ``max(1e-12, 1e-9 * best)`` of the best median count as
    tied and resolve toward the lexicographically smaller (lambda_enc,
    lambda_dec); an exact-equality tie rule would never fire once rounding
    noise enters.  Returns ``((lambda_enc, lambda_dec), table)`` with the
    full grid table for reporting.
    """
    table = []
    for le in sorted(config.lambda_enc_grid):
        for ld in sorted(config.lambda_dec_grid):
            sub = replace(
                config,
                schemes=["nercc"],
                lambda_enc=le,
                lambda_dec=ld,
                stragglers=_first_setting_block(config),
            )
            rows = run_experiment(sub, base_dir=base_dir)
            median_mse = _median([r.mse for r in rows])
            table.append({"lambda_enc": le, "lambda_dec": ld, "median_mse": median_mse})
    finite = [entry for entry in table if np.isfinite(entry["median_mse"])]
    if not finite:
        raise ConfigInvalid("no grid point produced a decodable round")
    best_mse = min(entry["median_mse"] for entry in finite)
    window = max(1e-12, 1e-9 * best_mse)
    best = min(
        (entry["lambda_enc"], entry["lambda_dec"])
        for entry in finite
        if entry["median_mse"] <= best_mse + window
    )
    return best, table


def _first_setting_block(config: ExperimentConfig) -> dict:
    """Config straggler block reduced to its first setting."""
    block = dict(config.stragglers)
    mode = block["mode"]
    if mode == "fixed-count":
        counts = block.get("counts", [block.get("count", 0)])
        return {"mode": mode, "counts": [counts[0]]}
    if mode == "delay-deadline":
        deadlines = block.get("deadlines", [block.get("deadline")])
        out = {k: v for k, v in block.items() if k not in ("deadlines", "deadline")}
        out["deadlines"] = [deadlines[0]]
        return out
    lists = block.get("lists", [block.get("indices", [])])
    return {"mode": mode, "lists": [lists[0]]}


# --- CSV ------------------------------------------------------------------


def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(path, columns, rows) -> None:
    """RFC-4180 CSV: header row, UTF-8, '.' decimal, 17-digit floats.

    ``rows`` may be dicts keyed by column or sequences in column order.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            if isinstance(row, dict):
                row = [row[c] for c in columns]
            writer.writerow([_format_cell(v) for v in row])


def write_metrics_csv(path, rows) -> None:
    """Write MetricsRow records with the fixed schema column order."""
    write_csv(
        path,
        METRICS_COLUMNS,
        [[getattr(row, c) for c in METRICS_COLUMNS] for row in rows],
    )
