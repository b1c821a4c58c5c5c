"""Straggler-resistant coded computing built on nested regressions.

A batch of inputs is encoded by sampling a smoothing-spline (or Berrut
rational) regression of the data at worker nodes, each worker applies the
model to one coded point, and the surviving outputs are decoded by a second
regression back at the data nodes.  The package bundles the codec, a
deterministic straggler simulator, evaluation metrics, and an experiment
harness with a CLI.
"""

from . import errors
from .berrut import berrut_eval
from .codec import (
    SCHEMES,
    CodedBatch,
    SchemeConfig,
    SurvivorResults,
    decode,
    encode,
    fit_encoder,
    min_survivors,
)
from .datasets import gaussian_batch, load_dataset, smooth_curve_batch
from .experiments import (
    ExperimentConfig,
    default_lambda_grid,
    load_config,
    run_experiment,
    summarize_by_stragglers,
    sweep_lambda,
    tune_lambdas,
)
from .metrics import (
    MetricsRow,
    batch_roughness,
    decomposition,
    mse,
    rel_acc,
    taylor_proxy_bound,
)
from .models import (
    AffineSoftmaxModel,
    IdentityModel,
    LinearModel,
    MlpModel,
    RbfMixtureModel,
    builtin_model,
    estimate_grad_infnorm,
    load_model,
    save_model,
)
from .plotting import render_plot
from .points import alpha_points, beta_points
from .simulate import (
    RoundOutcome,
    StragglerConfig,
    derive_seed,
    run_round,
    sample_survivors,
    splitmix64,
)
from .spline import SplineFit, evaluate, fit, fit_dense_oracle, roughness
from .tensorio import read_tensor, write_tensor

__version__ = "0.1.0"

__all__ = [
    "errors",
    "berrut_eval",
    "SCHEMES",
    "CodedBatch",
    "SchemeConfig",
    "SurvivorResults",
    "decode",
    "encode",
    "fit_encoder",
    "min_survivors",
    "gaussian_batch",
    "load_dataset",
    "smooth_curve_batch",
    "ExperimentConfig",
    "default_lambda_grid",
    "load_config",
    "run_experiment",
    "summarize_by_stragglers",
    "sweep_lambda",
    "tune_lambdas",
    "MetricsRow",
    "batch_roughness",
    "decomposition",
    "mse",
    "rel_acc",
    "taylor_proxy_bound",
    "AffineSoftmaxModel",
    "IdentityModel",
    "LinearModel",
    "MlpModel",
    "RbfMixtureModel",
    "builtin_model",
    "estimate_grad_infnorm",
    "load_model",
    "save_model",
    "render_plot",
    "alpha_points",
    "beta_points",
    "RoundOutcome",
    "StragglerConfig",
    "derive_seed",
    "run_round",
    "sample_survivors",
    "splitmix64",
    "SplineFit",
    "evaluate",
    "fit",
    "fit_dense_oracle",
    "roughness",
    "read_tensor",
    "write_tensor",
]
