"""Pluggable compute functions f: R^d -> R^m applied by the workers.

These stand in for large pre-trained networks at desk scale: an identity
map, a linear map, an affine layer with softmax output, a Gaussian RBF
mixture with tunable curvature, and a small dense MLP.  Every model is
immutable after construction and ``apply`` is pure, so worker evaluations
can run in any order or in parallel.

Models round-trip through a JSON manifest plus NTF1 tensor files; see
:func:`load_model` / :func:`save_model`.
"""

import json
from pathlib import Path

import numpy as np

from .errors import (
    MissingTensorFile,
    ModelLoadError,
    NonFiniteInput,
    NonFiniteResult,
    ParseError,
    ShapeMismatch,
)
from .tensorio import read_tensor, write_tensor

__all__ = [
    "IdentityModel",
    "LinearModel",
    "AffineSoftmaxModel",
    "RbfMixtureModel",
    "MlpModel",
    "load_model",
    "save_model",
    "builtin_model",
    "estimate_grad_infnorm",
]

ACTIVATIONS = {
    "tanh": np.tanh,
    "relu": lambda x: np.maximum(x, 0.0),
}


def _check_batch(X, d: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != d:
        raise ShapeMismatch(f"expected (n, {d}) input, got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise NonFiniteInput("model input contains NaN or infinity")
    return X


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


class IdentityModel:
    kind = "identity"

    def __init__(self, d: int):
        self.d = int(d)
        self.m = int(d)

    def apply(self, X) -> np.ndarray:
        return _check_batch(X, self.d).copy()


class LinearModel:
    """f(x) = W x with W of shape (m, d)."""

    kind = "linear"

    def __init__(self, weights):
        self.weights = np.asarray(weights, dtype=float)
        if self.weights.ndim != 2:
            raise ShapeMismatch(f"weights must be 2-D, got {self.weights.shape}")
        self.m, self.d = self.weights.shape

    def apply(self, X) -> np.ndarray:
        return _check_batch(X, self.d) @ self.weights.T


class AffineSoftmaxModel:
    """f(x) = softmax(W x + b); rows sum to 1 and are strictly positive."""

    kind = "affine-softmax"

    def __init__(self, weights, bias):
        self.weights = np.asarray(weights, dtype=float)
        self.bias = np.asarray(bias, dtype=float).reshape(-1)
        if self.weights.ndim != 2 or self.bias.size != self.weights.shape[0]:
            raise ShapeMismatch(
                f"weights {self.weights.shape} and bias {self.bias.shape} disagree"
            )
        self.m, self.d = self.weights.shape

    def apply(self, X) -> np.ndarray:
        return _softmax(_check_batch(X, self.d) @ self.weights.T + self.bias)


class RbfMixtureModel:
    """Output i is sum_c A[c, i] * exp(-||x - mu_c||^2 / sigma^2).

    ``sigma`` sets the curvature: small sigma makes a sharply varying
    function with a large gradient, the regime that stresses the encoder
    training error.
    """

    kind = "rbf-mixture"

    def __init__(self, centers, amplitudes, sigma: float):
        self.centers = np.asarray(centers, dtype=float)
        self.amplitudes = np.asarray(amplitudes, dtype=float)
        self.sigma = float(sigma)
        if self.centers.ndim != 2 or self.amplitudes.ndim != 2:
            raise ShapeMismatch("centers and amplitudes must be 2-D")
        if self.centers.shape[0] != self.amplitudes.shape[0]:
            raise ShapeMismatch(
                f"{self.centers.shape[0]} centers but {self.amplitudes.shape[0]} amplitude rows"
            )
        if self.sigma <= 0.0:
            raise ModelLoadError(f"sigma must be > 0, got {self.sigma}")
        self.d = self.centers.shape[1]
        self.m = self.amplitudes.shape[1]

    def apply(self, X) -> np.ndarray:
        X = _check_batch(X, self.d)
        sq = ((X[:, None, :] - self.centers[None, :, :]) ** 2).sum(axis=2)
        return np.exp(-sq / self.sigma**2) @ self.amplitudes


class MlpModel:
    """Chained affine layers, each followed by tanh or relu."""

    kind = "mlp"

    def __init__(self, layers):
        self.layers = []
        for weights, bias, activation in layers:
            weights = np.asarray(weights, dtype=float)
            bias = np.asarray(bias, dtype=float).reshape(-1)
            if weights.ndim != 2 or bias.size != weights.shape[0]:
                raise ShapeMismatch(
                    f"layer weights {weights.shape} and bias {bias.shape} disagree"
                )
            if activation not in ACTIVATIONS:
                raise ModelLoadError(f"unknown activation {activation!r}")
            self.layers.append((weights, bias, activation))
        if not self.layers:
            raise ModelLoadError("mlp needs at least one layer")
        for (w_prev, _, _), (w_next, _, _) in zip(self.layers, self.layers[1:]):
            if w_next.shape[1] != w_prev.shape[0]:
                raise ShapeMismatch(
                    f"layer output {w_prev.shape[0]} feeds layer input {w_next.shape[1]}"
                )
        self.d = self.layers[0][0].shape[1]
        self.m = self.layers[-1][0].shape[0]

    def apply(self, X) -> np.ndarray:
        out = _check_batch(X, self.d)
        for weights, bias, activation in self.layers:
            out = ACTIVATIONS[activation](out @ weights.T + bias)
        return out


# --- manifests ----------------------------------------------------------------


def load_model(manifest_path):
    """Build a model from a JSON manifest.

    The manifest declares ``kind``, ``d``, ``m`` and a ``layers`` list whose
    entries reference NTF1 tensor files by path relative to the manifest.
    Declared and loaded shapes must agree.
    """
    manifest_path = Path(manifest_path)
    try:
        doc = json.loads(manifest_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{manifest_path}: {exc}") from exc

    try:
        kind = doc["kind"]
        d = int(doc["d"])
        m = int(doc["m"])
        layers = doc.get("layers", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{manifest_path}: missing or malformed field ({exc})") from exc

    def tensor(ref):
        path = manifest_path.parent / ref
        if not path.exists():
            raise MissingTensorFile(str(path))
        return read_tensor(path)

    if kind == "identity":
        model = IdentityModel(d)
    elif kind == "linear":
        model = LinearModel(tensor(layers[0]["weights"]))
    elif kind == "affine-softmax":
        model = AffineSoftmaxModel(tensor(layers[0]["weights"]), tensor(layers[0]["bias"]))
    elif kind == "rbf-mixture":
        layer = layers[0]
        model = RbfMixtureModel(
            tensor(layer["centers"]), tensor(layer["amplitudes"]), float(layer["sigma"])
        )
    elif kind == "mlp":
        model = MlpModel(
            [(tensor(l["weights"]), tensor(l["bias"]), l["activation"]) for l in layers]
        )
    else:
        raise ParseError(f"{manifest_path}: unknown model kind {kind!r}")

    if (model.d, model.m) != (d, m):
        raise ShapeMismatch(
            f"manifest declares d={d}, m={m} but tensors give d={model.d}, m={model.m}"
        )
    return model


def save_model(model, manifest_path) -> None:
    """Write ``model`` as a manifest plus NTF1 tensors next to it."""
    manifest_path = Path(manifest_path)
    manifest_path.parent.mkdir(parents=True, exist_ok=True)
    stem = manifest_path.stem

    def dump(index, name, array):
        ref = f"{stem}.l{index}.{name}.ntf"
        write_tensor(manifest_path.parent / ref, array)
        return ref

    layers = []
    if model.kind == "linear":
        layers = [{"weights": dump(0, "weights", model.weights)}]
    elif model.kind == "affine-softmax":
        layers = [
            {"weights": dump(0, "weights", model.weights), "bias": dump(0, "bias", model.bias)}
        ]
    elif model.kind == "rbf-mixture":
        layers = [
            {
                "centers": dump(0, "centers", model.centers),
                "amplitudes": dump(0, "amplitudes", model.amplitudes),
                "sigma": model.sigma,
            }
        ]
    elif model.kind == "mlp":
        layers = [
            {
                "weights": dump(i, "weights", w),
                "bias": dump(i, "bias", b),
                "activation": act,
            }
            for i, (w, b, act) in enumerate(model.layers)
        ]
    elif model.kind != "identity":
        raise ModelLoadError(f"cannot serialize model kind {model.kind!r}")

    doc = {"kind": model.kind, "d": model.d, "m": model.m, "layers": layers}
    manifest_path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def builtin_model(spec: dict):
    """Construct a randomly parameterized model from an inline spec.

    ``spec`` needs ``kind``, ``d``, ``m`` and a ``seed``; kind-specific knobs
    are ``centers`` / ``sigma`` for rbf-mixture and ``hidden`` /
    ``activation`` for mlp.  The same spec always yields the same model.
    """
    try:
        kind = spec["kind"]
        d = int(spec["d"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelLoadError(f"malformed builtin model spec ({exc})") from exc
    rng = np.random.default_rng(int(spec.get("seed", 0)))

    if kind == "identity":
        return IdentityModel(d)
    m = int(spec.get("m", d))
    if kind == "linear":
        return LinearModel(rng.standard_normal((m, d)) / np.sqrt(d))
    if kind == "affine-softmax":
        return AffineSoftmaxModel(
            rng.standard_normal((m, d)) / np.sqrt(d), 0.1 * rng.standard_normal(m)
        )
    if kind == "rbf-mixture":
        n_centers = int(spec.get("centers", 4))
        sigma = float(spec.get("sigma", np.sqrt(d)))
        return RbfMixtureModel(
            rng.standard_normal((n_centers, d)),
            rng.standard_normal((n_centers, m)) / np.sqrt(n_centers),
            sigma,
        )
    if kind == "mlp":
        hidden = [int(width) for width in spec.get("hidden", [16])]
        activation = spec.get("activation", "tanh")
        widths = [d, *hidden, m]
        layers = [
            (
                rng.standard_normal((nout, nin)) / np.sqrt(nin),
                0.1 * rng.standard_normal(nout),
                activation,
            )
            for nin, nout in zip(widths, widths[1:])
        ]
        return MlpModel(layers)
    raise ModelLoadError(f"unknown builtin model kind {kind!r}")


def estimate_grad_infnorm(model, X, h: float = 1e-5) -> float:
    """Largest |partial f_i / partial x_j| over the given data points.

    Central finite differences, one coordinate at a time; exact (up to
    rounding) for linear maps.
    """
    if h <= 0.0:
        raise ValueError(f"step must be > 0, got {h}")
    X = _check_batch(X, model.d)
    worst = 0.0
    for j in range(model.d):
        plus = X.copy()
        plus[:, j] += h
        minus = X.copy()
        minus[:, j] -= h
        grad = (model.apply(plus) - model.apply(minus)) / (2.0 * h)
        worst = max(worst, float(np.max(np.abs(grad))))
    if not np.isfinite(worst):
        raise NonFiniteResult("finite-difference gradient overflowed")
    return worst
