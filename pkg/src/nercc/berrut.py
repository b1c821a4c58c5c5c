"""Berrut rational interpolation, the baseline codec primitive.

The interpolant through ``(t_j, y_j)`` is

    b(x) = sum_j w_j/(x - t_j) y_j  /  sum_j w_j/(x - t_j),
    w_j = (-1)^j,

with the alternating signs assigned by rank order of the nodes actually
present.  With these weights the denominator has no real zeros, so b is
pole-free on the whole real line for any node subset; that is what makes it
usable after erasures.
"""

import numpy as np

from .errors import NonFiniteInput, NonFiniteQuery, NonIncreasingKnots, ShapeMismatch

__all__ = ["berrut_eval"]

# queries closer to a node than this are answered with the node value,
# avoiding the 0/0 form of the barycentric quotient
NODE_SNAP = 1e-12


def berrut_eval(nodes, values, queries) -> np.ndarray:
    """Evaluate the Berrut interpolant of ``(nodes, values)`` at ``queries``.

    Parameters
    ----------
    nodes : array_like
        Strictly increasing support points, length n >= 1.
    values : array_like
        Data at the nodes, shape (n,) or (n, q).
    queries : array_like
        Points to evaluate at, length p.

    Returns
    -------
    numpy.ndarray of shape (p, q)
    """
    t = np.asarray(nodes, dtype=float).reshape(-1)
    y = np.asarray(values, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    if t.size == 0:
        raise ShapeMismatch("need at least one node")
    if y.shape[0] != t.size:
        raise ShapeMismatch(f"{t.size} nodes but {y.shape[0]} value rows")
    if not np.all(np.isfinite(t)) or not np.all(np.isfinite(y)):
        raise NonFiniteInput("nodes or values contain NaN or infinity")
    if t.size > 1 and np.any(np.diff(t) <= 0.0):
        raise NonIncreasingKnots("nodes must be strictly increasing")
    x = np.atleast_1d(np.asarray(queries, dtype=float))
    if not np.all(np.isfinite(x)):
        raise NonFiniteQuery("queries contain NaN or infinity")

    signs = np.where(np.arange(t.size) % 2 == 0, 1.0, -1.0)
    diff = x[:, None] - t[None, :]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        cauchy = signs / diff
        out = (cauchy @ y) / cauchy.sum(axis=1)[:, None]

    # exact value within the snap window of a node
    nearest = np.clip(np.searchsorted(t, x), 0, t.size - 1)
    nearest_left = np.maximum(nearest - 1, 0)
    nearest = np.where(
        np.abs(x - t[nearest_left]) <= np.abs(x - t[nearest]), nearest_left, nearest
    )
    on_node = np.abs(x - t[nearest]) <= NODE_SNAP
    if np.any(on_node):
        out[on_node] = y[nearest[on_node]]
    return out
