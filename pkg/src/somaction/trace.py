"""Time-invariant ordered-vector encoding of first-layer activity traces.

The trace of an action is the sequence of best-matching grid coordinates
its frames elicit in the first-layer map.  Treating the trace as a
polyline and resampling it at equal arc-length steps yields a fixed-length
vector that does not depend on the performance rate: repeated points
contribute zero arc length, so a slowed-down action encodes identically.
"""

from __future__ import annotations

import numpy as np

from .errors import EmptySet, EmptyTrace
from .preprocess import FeatureSequence
from .som import SomModel, bmu_indices


def extract_trace(model: SomModel, features: FeatureSequence | np.ndarray) -> np.ndarray:
    """(N, 2) float grid coordinates of the per-frame best matching units.

    Consecutive duplicates are kept; they are harmless to the arc-length
    encoding.
    """
    data = features.data if isinstance(features, FeatureSequence) else features
    return bmu_indices(model, data).astype(np.float64)


def trace_length(points: np.ndarray) -> float:
    """Total polyline length of a trace; 0 for single-point traces."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if len(points) < 2:
        return 0.0
    return float(np.sum(np.linalg.norm(np.diff(points, axis=0), axis=1)))


def compute_n_max(traces) -> int:
    """Largest point count over the training traces.

    Fixed at training time and persisted with the model so inference
    resamples to the same segment count.
    """
    lengths = [len(t) for t in traces]
    if not lengths:
        raise EmptySet("no traces")
    return max(lengths)


def ordered_vector(points: np.ndarray, n_max: int) -> np.ndarray:
    """Flat (2 * (n_max + 1),) vector of segment-border coordinates.

    The polyline is divided into n_max equal arc-length segments and the
    border points (start to end, inclusive) are listed as x, y pairs.  A
    zero-length trace repeats its single location.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if points.size == 0:
        raise EmptyTrace("empty trace")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if len(points) == 1:
        return np.tile(points[0], n_max + 1)
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total == 0.0:
        return np.tile(points[0], n_max + 1)
    targets = np.arange(n_max + 1) * (total / n_max)
    bx = np.interp(targets, cum, points[:, 0])
    by = np.interp(targets, cum, points[:, 1])
    return np.stack([bx, by], axis=1).ravel()
