"""Interpolation node families on [-1, 1].

The encoder targets the first-kind Chebyshev nodes ``cos((2k-1)pi/2K)`` and
the workers sit at the second-kind nodes ``cos((n-1)pi/(N-1))``.  Both sets
are returned sorted ascending; sorted node ``i`` pairs with data row ``i``.

Values are computed through the equivalent ``sin`` form so the sets are
exactly symmetric about 0 in floating point (``sin(-x) == -sin(x)`` is exact,
``cos`` of supplementary angles is not).
"""

import numpy as np


def alpha_points(count: int) -> np.ndarray:
    """First-kind Chebyshev nodes, ascending; all strictly inside (-1, 1).

    Parameters
    ----------
    count : int
        Number of nodes K, at least 1.

    Returns
    -------
    numpy.ndarray
        The K values ``cos((2k-1)pi/2K)``, k = 1..K, sorted ascending.
    """
    if count < 1:
        raise ValueError(f"need at least 1 encoder node, got {count}")
    k = np.arange(1, count + 1)
    return np.sin(np.pi * (2 * k - count - 1) / (2 * count))


def beta_points(count: int) -> np.ndarray:
    """Second-kind Chebyshev nodes, ascending; endpoints exactly -1 and 1.

    Parameters
    ----------
    count : int
        Number of nodes N, at least 2.

    Returns
    -------
    numpy.ndarray
        The N values ``cos((n-1)pi/(N-1))``, n = 1..N, sorted ascending.
    """
    if count < 2:
        raise ValueError(f"need at least 2 worker nodes, got {count}")
    n = np.arange(1, count + 1)
    return np.sin(np.pi * (2 * n - count - 1) / (2 * (count - 1)))
