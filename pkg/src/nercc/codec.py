"""Encoder and decoder for the coded-computing round.

The encoder fits a regression ``u_enc`` through ``(alpha_k, x_k)`` and sends
its samples at the worker nodes ``beta_n`` out as coded points.  The decoder
fits ``u_dec`` through the surviving ``(beta_j, f(coded_j))`` pairs and reads
off approximations of ``f(x_k)`` at the ``alpha_k``.  Both regressions are
linear in the data, so every coded point is a linear combination of all data
rows and the scheme survives erasures of individual workers.

Three schemes share this shape:

``nercc``
    smoothing splines on both sides with independent parameters
    ``lambda_enc`` and ``lambda_dec``.
``nercc-ag``
    the model-agnostic special case with both parameters pinned to zero
    (interpolating natural splines).
``bacc``
    Berrut rational interpolation on both sides; the smoothing parameters
    are ignored.
"""

from dataclasses import dataclass

import numpy as np

from . import berrut, spline
from .errors import (
    ConfigInvalid,
    DecodingInfeasible,
    IndexOutOfRange,
    NegativeLambda,
    NonFiniteData,
    ShapeMismatch,
    TooFewPoints,
)

__all__ = [
    "SCHEMES",
    "SchemeConfig",
    "CodedBatch",
    "SurvivorResults",
    "RegressionFit",
    "fit_regression",
    "encode",
    "decode",
    "min_survivors",
]

SCHEMES = ("nercc", "nercc-ag", "bacc")


@dataclass(frozen=True)
class SchemeConfig:
    """Scheme switch plus the two smoothing parameters.

    ``nercc-ag`` forces both parameters to zero; ``bacc`` ignores them.
    """

    scheme: str
    lambda_enc: float = 0.0
    lambda_dec: float = 0.0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigInvalid(f"unknown scheme {self.scheme!r}, expected one of {SCHEMES}")
        for name in ("lambda_enc", "lambda_dec"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value < 0.0:
                raise NegativeLambda(f"{name} must be finite and >= 0, got {value}")
            object.__setattr__(self, name, value)
        if self.scheme == "nercc-ag":
            object.__setattr__(self, "lambda_enc", 0.0)
            object.__setattr__(self, "lambda_dec", 0.0)


@dataclass(frozen=True)
class CodedBatch:
    """Coded points paired with the worker nodes they were sampled at."""

    betas: np.ndarray  # (N,)
    coded: np.ndarray  # (N, d)


@dataclass(frozen=True)
class SurvivorResults:
    """Outputs of the non-straggler workers.

    ``indices`` are strictly increasing 0-based worker indices; row j of
    ``outputs`` is the model output of worker ``indices[j]``.
    """

    indices: np.ndarray  # (s,)
    outputs: np.ndarray  # (s, m)


class RegressionFit:
    """A fitted encoding or decoding regression, evaluable anywhere."""

    def __init__(self, scheme: str, nodes: np.ndarray, values: np.ndarray, lam: float):
        self.scheme = scheme
        self.nodes = np.asarray(nodes, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.lam = lam
        self._spline = None
        if scheme != "bacc":
            self._spline = spline.fit(self.nodes, self.values, lam)

    def at(self, points) -> np.ndarray:
        """Evaluate the regression at ``points``, shape (p, q)."""
        if self._spline is not None:
            return spline.evaluate(self._spline, points)
        return berrut.berrut_eval(self.nodes, self.values, points)

    @property
    def spline_fit(self):
        """The underlying :class:`~nercc.spline.SplineFit`, or None for bacc."""
        return self._spline


def fit_regression(nodes, values, scheme: str, lam: float) -> RegressionFit:
    """Fit the regression used by ``scheme`` through ``(nodes, values)``."""
    return RegressionFit(scheme, nodes, values, lam)


def _check_data(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ShapeMismatch(f"data matrix must be 2-D, got ndim={X.ndim}")
    if X.shape[0] < 3:
        raise TooFewPoints(f"need at least 3 data points, got {X.shape[0]}")
    if not np.all(np.isfinite(X)):
        raise NonFiniteData("data matrix contains NaN or infinity")
    return X


def fit_encoder(X, alphas, cfg: SchemeConfig) -> RegressionFit:
    """Fit the encoding regression through ``(alpha_k, x_k)``."""
    X = _check_data(X)
    alphas = np.asarray(alphas, dtype=float).reshape(-1)
    if alphas.size != X.shape[0]:
        raise ShapeMismatch(f"{alphas.size} encoder nodes but {X.shape[0]} data rows")
    return fit_regression(alphas, X, cfg.scheme, cfg.lambda_enc)


def encode(X, alphas, betas, cfg: SchemeConfig) -> CodedBatch:
    """Produce the coded batch sent to the N workers.

    Parameters
    ----------
    X : array_like, shape (K, d)
        Input data, one point per row; K >= 3.
    alphas, betas : array_like
        Encoder and worker nodes, ascending; len(alphas) == K, len(betas) >= 2.
    cfg : SchemeConfig

    Returns
    -------
    CodedBatch
        Row n holds ``u_enc(beta_n)``.
    """
    betas = np.asarray(betas, dtype=float).reshape(-1)
    if betas.size < 2:
        raise TooFewPoints(f"need at least 2 worker nodes, got {betas.size}")
    encoder = fit_encoder(X, alphas, cfg)
    return CodedBatch(betas=betas, coded=encoder.at(betas))


def min_survivors(cfg: SchemeConfig) -> int:
    """Smallest survivor set the scheme can decode from."""
    return 1 if cfg.scheme == "bacc" else 3


def decode(results: SurvivorResults, betas, alphas, cfg: SchemeConfig) -> np.ndarray:
    """Recover approximate model outputs at the original data points.

    Fits the decoding regression through ``(beta_j, outputs_j)`` over the
    survivor set and evaluates it at every ``alpha_k``.

    Returns
    -------
    numpy.ndarray of shape (K, m)
    """
    betas = np.asarray(betas, dtype=float).reshape(-1)
    alphas = np.asarray(alphas, dtype=float).reshape(-1)
    idx = np.asarray(results.indices, dtype=int).reshape(-1)
    outputs = np.asarray(results.outputs, dtype=float)
    if outputs.ndim == 1:
        outputs = outputs[:, None]

    if idx.size and (idx.min() < 0 or idx.max() >= betas.size):
        raise IndexOutOfRange(
            f"survivor indices must lie in [0, {betas.size}), got "
            f"[{idx.min()}, {idx.max()}]"
        )
    if idx.size != np.unique(idx).size:
        raise IndexOutOfRange("survivor indices contain duplicates")
    if outputs.shape[0] != idx.size:
        raise ShapeMismatch(f"{idx.size} survivor indices but {outputs.shape[0]} output rows")

    needed = min_survivors(cfg)
    if idx.size < needed:
        raise DecodingInfeasible(
            f"scheme {cfg.scheme} needs at least {needed} survivors, got {idx.size}"
        )

    order = np.argsort(idx)
    decoder = fit_regression(betas[idx[order]], outputs[order], cfg.scheme, cfg.lambda_dec)
    return decoder.at(alphas)
