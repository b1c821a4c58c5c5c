"""Deterministic master-worker round simulation.

A round encodes the batch, applies the model per worker, drops stragglers
according to the configured mode, and decodes from the survivors.  All
randomness derives from a 64-bit seed through a splitmix mix of
``seed XOR worker_index``, so outcomes are a pure function of the inputs and
independent of worker scheduling.

Straggler modes:

``fixed-count``
    a uniformly random survivor set of size ``N - num_stragglers``.
``delay-deadline``
    per-worker arrival ``base_delay + Exponential(mean_extra)``; survivors
    are the workers that arrive by ``deadline``.
``explicit-list``
    the given worker indices straggle, everyone else survives.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .codec import CodedBatch, SchemeConfig, SurvivorResults, decode, encode, min_survivors
from .errors import ConfigInvalid, CountOutOfRange, DecodingInfeasible, IndexOutOfRange

__all__ = [
    "StragglerConfig",
    "RoundOutcome",
    "splitmix64",
    "derive_seed",
    "sample_survivors",
    "worker_arrivals",
    "select_survivors",
    "run_round",
]

_MASK64 = (1 << 64) - 1
STRAGGLER_MODES = ("fixed-count", "delay-deadline", "explicit-list")


def splitmix64(state: int) -> int:
    """One splitmix64 output for the given state."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *levels: int) -> int:
    """Derive an independent substream seed from ``seed`` and index levels."""
    out = seed & _MASK64
    for level in levels:
        out = splitmix64(out ^ (level & _MASK64))
    return out


def _worker_key(seed: int, worker: int) -> int:
    return splitmix64((seed & _MASK64) ^ worker)


def _uniform01(key: int) -> float:
    # 53-bit mantissa, value in [0, 1)
    return (key >> 11) * 2.0**-53


@dataclass(frozen=True)
class StragglerConfig:
    """Which workers straggle, and how that is decided."""

    mode: str
    num_stragglers: int = 0
    base_delay: float = 0.0
    mean_extra: float = 1.0
    deadline: float = math.inf
    straggler_indices: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.mode not in STRAGGLER_MODES:
            raise ConfigInvalid(f"unknown straggler mode {self.mode!r}")
        if self.mode == "fixed-count" and self.num_stragglers < 0:
            raise CountOutOfRange(f"num_stragglers must be >= 0, got {self.num_stragglers}")
        if self.mode == "delay-deadline":
            if self.base_delay < 0.0:
                raise ConfigInvalid(f"base_delay must be >= 0, got {self.base_delay}")
            if self.mean_extra <= 0.0:
                raise ConfigInvalid(f"mean_extra must be > 0, got {self.mean_extra}")
            if self.deadline < self.base_delay:
                raise ConfigInvalid(
                    f"deadline {self.deadline} is before base_delay {self.base_delay}"
                )
        if self.mode == "explicit-list":
            idx = tuple(int(i) for i in self.straggler_indices)
            if len(set(idx)) != len(idx) or any(i < 0 for i in idx):
                raise IndexOutOfRange("straggler indices must be unique and >= 0")
            object.__setattr__(self, "straggler_indices", idx)


@dataclass(frozen=True)
class RoundOutcome:
    """Everything observable about one simulated round."""

    coded: CodedBatch
    arrivals: np.ndarray  # (N,), +inf for workers that never respond
    survivors: SurvivorResults
    seed: int


def sample_survivors(n_workers: int, num_stragglers: int, seed: int) -> np.ndarray:
    """Uniformly random survivor set of size ``n_workers - num_stragglers``.

    Each worker gets an independent 64-bit key from the seed; the survivors
    are the workers with the smallest keys, which makes every subset of that
    size equally likely and the draw reproducible across platforms.
    """
    if not 0 <= num_stragglers < n_workers:
        raise CountOutOfRange(
            f"num_stragglers must lie in [0, {n_workers}), got {num_stragglers}"
        )
    keys = np.array([_worker_key(seed, i) for i in range(n_workers)], dtype=np.uint64)
    survivors = np.argsort(keys, kind="stable")[: n_workers - num_stragglers]
    return np.sort(survivors)


def worker_arrivals(n_workers: int, straggler: StragglerConfig, seed: int) -> np.ndarray:
    """Arrival time per worker under the given straggler mode."""
    if straggler.mode == "fixed-count":
        arrivals = np.zeros(n_workers)
        survivors = sample_survivors(n_workers, straggler.num_stragglers, seed)
        mask = np.ones(n_workers, dtype=bool)
        mask[survivors] = False
        arrivals[mask] = np.inf
        return arrivals
    if straggler.mode == "delay-deadline":
        u = np.array([_uniform01(_worker_key(seed, i)) for i in range(n_workers)])
        return straggler.base_delay - straggler.mean_extra * np.log1p(-u)
    idx = np.asarray(straggler.straggler_indices, dtype=int)
    if idx.size and idx.max() >= n_workers:
        raise IndexOutOfRange(
            f"straggler index {idx.max()} out of range for {n_workers} workers"
        )
    arrivals = np.zeros(n_workers)
    arrivals[idx] = np.inf
    return arrivals


def select_survivors(arrivals: np.ndarray, straggler: StragglerConfig) -> np.ndarray:
    """Indices of workers whose results arrive in time, ascending."""
    if straggler.mode == "delay-deadline":
        return np.flatnonzero(arrivals <= straggler.deadline)
    return np.flatnonzero(np.isfinite(arrivals))


def run_round(X, model, alphas, betas, cfg: SchemeConfig, straggler: StragglerConfig, seed: int):
    """Simulate one full encode / compute / drop / decode round.

    Returns
    -------
    (RoundOutcome, numpy.ndarray or None)
        The outcome and the decoded (K, m) matrix, or None when too few
        workers survived for the scheme to decode.
    """
    betas = np.asarray(betas, dtype=float).reshape(-1)
    n_workers = betas.size
    coded = encode(X, alphas, betas, cfg)
    outputs = model.apply(coded.coded)

    arrivals = worker_arrivals(n_workers, straggler, seed)
    survivor_idx = select_survivors(arrivals, straggler)
    survivors = SurvivorResults(indices=survivor_idx, outputs=outputs[survivor_idx])
    outcome = RoundOutcome(coded=coded, arrivals=arrivals, survivors=survivors, seed=seed)

    if survivor_idx.size < min_survivors(cfg):
        return outcome, None
    try:
        decoded = decode(survivors, betas, alphas, cfg)
    except DecodingInfeasible:
        return outcome, None
    return outcome, decoded
