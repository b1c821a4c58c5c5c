"""Input batches: synthetic generators and file loading.

Two synthetic families cover the interesting regimes: i.i.d. Gaussian rows
have no relation to the encoder nodes and stress interpolating encoders,
while smooth-curve batches sample a smooth vector curve at the encoder
nodes, the analogue of image batches whose encoder fit is easy.
"""

from pathlib import Path

import numpy as np

from .errors import ConfigInvalid, NonFiniteData, ParseError
from .tensorio import read_tensor

__all__ = ["gaussian_batch", "smooth_curve_batch", "load_dataset", "make_batch"]


def gaussian_batch(num_points: int, dim: int, seed: int) -> np.ndarray:
    """(K, d) matrix of i.i.d. standard normal entries."""
    rng = np.random.default_rng(seed)
    return rng.standard_normal((num_points, dim))


def smooth_curve_batch(alphas, dim: int, seed: int, components: int = 3) -> np.ndarray:
    """Sample a random smooth curve g: [-1, 1] -> R^d at the encoder nodes.

    g is a low-order trigonometric mixture with amplitude decaying like
    1/c^2 in the component frequency, so higher ``components`` adds gentle
    wiggle without losing smoothness.
    """
    alphas = np.asarray(alphas, dtype=float).reshape(-1)
    rng = np.random.default_rng(seed)
    out = np.zeros((alphas.size, dim))
    for c in range(1, components + 1):
        cos_amp = rng.standard_normal(dim) / c**2
        sin_amp = rng.standard_normal(dim) / c**2
        out += np.cos(c * alphas)[:, None] * cos_amp + np.sin(c * alphas)[:, None] * sin_amp
    return out


def load_dataset(path) -> np.ndarray:
    """Read a (K, d) batch from a CSV (rows are points) or an NTF1 tensor."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        try:
            X = np.loadtxt(path, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    else:
        X = read_tensor(path)
        if X.ndim != 2:
            raise ParseError(f"{path}: expected a rank-2 tensor, got rank {X.ndim}")
    if not np.all(np.isfinite(X)):
        raise NonFiniteData(f"{path}: dataset contains NaN or infinity")
    return X


def make_batch(dataset_spec, alphas, num_points: int, seed: int) -> np.ndarray:
    """Produce the batch described by a dataset spec.

    ``dataset_spec`` is either a path (string) or a dict with ``kind`` in
    {"gaussian", "smooth-curve"} plus ``d`` and optional ``components``.
    Synthetic batches are redrawn per seed; file batches are fixed.
    """
    if isinstance(dataset_spec, (str, Path)):
        X = load_dataset(dataset_spec)
        if X.shape[0] != num_points:
            raise ConfigInvalid(
                f"dataset has {X.shape[0]} rows but the experiment needs K={num_points}"
            )
        return X
    try:
        kind = dataset_spec["kind"]
        dim = int(dataset_spec["d"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigInvalid(f"malformed dataset spec ({exc})") from exc
    if kind == "gaussian":
        return gaussian_batch(num_points, dim, seed)
    if kind == "smooth-curve":
        components = int(dataset_spec.get("components", 3))
        return smooth_curve_batch(alphas, dim, seed, components)
    raise ConfigInvalid(f"unknown dataset kind {kind!r}")
