"""Evaluation metrics and loss-decomposition diagnostics.

The end-to-end loss of a round splits, by the triangle inequality, into the
decoder's generalization error (term 1) and the model's sensitivity to the
encoder's training error (term 2).  The decomposition here uses unsquared
Euclidean row norms, for which the inequality holds exactly; squared error
is reported separately as :func:`mse`.
"""

from dataclasses import dataclass, fields

import numpy as np

from .codec import CodedBatch
from .errors import ShapeMismatch, TooFewPoints, ZeroBaseAccuracy

__all__ = [
    "MetricsRow",
    "mse",
    "rel_acc",
    "decomposition",
    "taylor_proxy_bound",
    "batch_roughness",
]


@dataclass
class MetricsRow:
    """One experiment record; the CSV schema in field order."""

    trial: int
    scheme: str
    N: int
    K: int
    S_size: int
    lambda_enc: float
    lambda_dec: float
    mse: float
    rel_acc: float
    agreement: float
    term1: float
    term2: float
    l2_loss: float
    enc_train_sse: float
    coded_roughness: float
    grad_infnorm: float
    runtime_ms: float
    status: str = "ok"


METRICS_COLUMNS = tuple(f.name for f in fields(MetricsRow))


def _check_pair(Y, Yhat):
    Y = np.asarray(Y, dtype=float)
    Yhat = np.asarray(Yhat, dtype=float)
    if Y.shape != Yhat.shape or Y.ndim != 2:
        raise ShapeMismatch(f"matrices must share a 2-D shape, got {Y.shape} vs {Yhat.shape}")
    return Y, Yhat


def mse(Y, Yhat) -> float:
    """Mean over rows of the squared Euclidean row difference."""
    Y, Yhat = _check_pair(Y, Yhat)
    return float(np.sum((Y - Yhat) ** 2) / Y.shape[0])


def rel_acc(Y_base, Y_hat, labels=None):
    """Agreement of argmax predictions, plus an optional labelled ratio.

    Returns ``(agreement, ratio)``.  ``agreement`` is the fraction of rows
    where both matrices put their maximum in the same column (ties resolve
    to the lowest index).  When integer ``labels`` are supplied, ``ratio``
    is accuracy(Y_hat) / accuracy(Y_base); it is None otherwise.
    """
    Y_base, Y_hat = _check_pair(Y_base, Y_hat)
    if Y_base.shape[1] < 2:
        raise ShapeMismatch("argmax agreement needs at least 2 output columns")
    pred_base = np.argmax(Y_base, axis=1)
    pred_hat = np.argmax(Y_hat, axis=1)
    agreement = float(np.mean(pred_base == pred_hat))
    if labels is None:
        return agreement, None
    labels = np.asarray(labels, dtype=int).reshape(-1)
    if labels.size != Y_base.shape[0]:
        raise ShapeMismatch(f"{labels.size} labels for {Y_base.shape[0]} rows")
    acc_base = float(np.mean(pred_base == labels))
    if acc_base == 0.0:
        raise ZeroBaseAccuracy("base model accuracy is 0; ratio undefined")
    return agreement, float(np.mean(pred_hat == labels)) / acc_base


def decomposition(u_dec_at_alpha, f_of_enc_at_alpha, f_at_x):
    """Split the end-to-end loss along the triangle inequality.

    All three inputs are (K, m).  Returns ``(l2_loss, term1, term2)`` with

        l2_loss = sum_k ||u_dec(a_k) - f(x_k)||
        term1   = sum_k ||u_dec(a_k) - f(u_enc(a_k))||   (decoder generalization)
        term2   = sum_k ||f(u_enc(a_k)) - f(x_k)||       (encoder training proxy)

    and l2_loss <= term1 + term2 always.
    """
    decoded, through_enc = _check_pair(u_dec_at_alpha, f_of_enc_at_alpha)
    _, exact = _check_pair(u_dec_at_alpha, f_at_x)
    l2_loss = float(np.linalg.norm(decoded - exact, axis=1).sum())
    term1 = float(np.linalg.norm(decoded - through_enc, axis=1).sum())
    term2 = float(np.linalg.norm(through_enc - exact, axis=1).sum())
    return l2_loss, term1, term2


def taylor_proxy_bound(enc_train_sse: float, grad_infnorm: float) -> float:
    """First-order bound on squared term 2: ||grad f||_inf^2 * encoder SSE."""
    if enc_train_sse < 0.0 or grad_infnorm < 0.0:
        raise ValueError("both factors must be >= 0")
    return grad_infnorm**2 * enc_train_sse


def batch_roughness(coded) -> float:
    """Mean squared second difference of coded rows along the worker index.

    Accepts a :class:`~nercc.codec.CodedBatch` or a plain (N, d) matrix.
    Zero for constant or index-linear batches; large values indicate
    high-frequency content in the coded points.
    """
    if isinstance(coded, CodedBatch):
        coded = coded.coded
    coded = np.asarray(coded, dtype=float)
    if coded.ndim != 2:
        raise ShapeMismatch(f"coded batch must be 2-D, got ndim={coded.ndim}")
    n = coded.shape[0]
    if n < 3:
        raise TooFewPoints(f"second differences need at least 3 rows, got {n}")
    second = coded[2:] - 2.0 * coded[1:-1] + coded[:-2]
    return float(np.sum(second**2) / (n - 2))
