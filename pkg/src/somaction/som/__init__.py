"""Self-organizing map used for both layers of the hierarchy.

A map is an I x J grid of unit-norm weight vectors.  Inputs are matched by
Euclidean distance, activations are exponential in the net input, and
adaptation pulls each unit toward the input weighted by a Gaussian
neighborhood around the best matching unit, renormalizing after every
presentation.  The training presentation loop runs through a compiled
kernel when available (see _backend).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..errors import DimensionMismatch, EmptyInput
from ._backend import BACKEND, run_training

__all__ = [
    "BACKEND", "SomModel", "create_som", "net_input", "activation",
    "best_matching_unit", "bmu_indices", "adapt", "train", "activity_map",
    "quantization_error", "grid_distances", "unit_coords",
]


@dataclass
class SomModel:
    rows: int
    cols: int
    dim: int
    sigma: float = 1e6              # exponential activation factor
    seed: int = 0
    squared_neighborhood: bool = False
    normalize_weights: bool = True  # renormalize rows after every adaptation
    weights: np.ndarray = None      # (rows*cols, dim), unit rows
    schedule: dict = field(default_factory=dict)

    @property
    def n_units(self) -> int:
        return self.rows * self.cols

    def coord(self, unit: int) -> tuple[int, int]:
        return divmod(unit, self.cols)

    def unit(self, i: int, j: int) -> int:
        return i * self.cols + j


def create_som(rows: int, cols: int, dim: int, sigma: float = 1e6,
               seed: int = 0, squared_neighborhood: bool = False,
               normalize_weights: bool = True) -> SomModel:
    """New map with seeded uniform [0,1) weights, rows normalized.

    ``normalize_weights=False`` gives a classic unconstrained map: the
    initialization is still unit-norm, but adaptation steps are not
    renormalized, so the weights are free to move off the unit sphere.
    The hierarchy always uses the default unit-norm behavior.
    """
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.0, 1.0, (rows * cols, dim))
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    return SomModel(rows=rows, cols=cols, dim=dim, sigma=sigma, seed=seed,
                    squared_neighborhood=squared_neighborhood,
                    normalize_weights=normalize_weights, weights=w)


@lru_cache(maxsize=8)
def unit_coords(rows: int, cols: int) -> np.ndarray:
    """(U, 2) grid location vectors in row-major unit order."""
    ii, jj = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
    out = np.stack([ii.ravel(), jj.ravel()], axis=1).astype(np.float64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=8)
def grid_distances(rows: int, cols: int) -> np.ndarray:
    """(U, U) Euclidean distances between unit grid locations."""
    rc = unit_coords(rows, cols)
    d = np.linalg.norm(rc[:, None, :] - rc[None, :, :], axis=2)
    out = np.ascontiguousarray(d)
    out.setflags(write=False)
    return out


def net_input(x: np.ndarray, w: np.ndarray) -> float:
    """Euclidean distance between an input and a weight vector."""
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if x.shape != w.shape:
        raise DimensionMismatch(f"{x.shape} vs {w.shape}")
    return float(np.linalg.norm(x - w))


def activation(s, sigma: float):
    """exp(-s / sigma); 1 at zero net input, strictly decreasing in s."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return np.exp(-np.asarray(s, dtype=np.float64) / sigma)


def _check_dim(model: SomModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.dim:
        raise DimensionMismatch(
            f"input dim {x.shape[-1]} vs model dim {model.dim}")
    return x


def best_matching_unit(model: SomModel, x: np.ndarray) -> tuple[int, int]:
    """Grid coordinate of the closest unit; ties go to the smallest
    row-major index."""
    x = _check_dim(model, x)
    diff = model.weights - x
    d2 = np.einsum("ud,ud->u", diff, diff)
    return model.coord(int(np.argmin(d2)))


def bmu_indices(model: SomModel, xs: np.ndarray) -> np.ndarray:
    """(N, 2) best-matching grid coordinates for a batch of inputs."""
    xs = np.atleast_2d(_check_dim(model, xs))
    # ||x-w||^2 = ||w||^2 - 2 x.w + ||x||^2; the x term is constant per row
    w2 = np.einsum("ud,ud->u", model.weights, model.weights)
    scores = w2[None, :] - 2.0 * xs @ model.weights.T
    flat = np.argmin(scores, axis=1)
    return np.stack(np.divmod(flat, model.cols), axis=1)


def adapt(model: SomModel, x: np.ndarray, c: tuple[int, int],
          alpha: float, sigma_n: float) -> SomModel:
    """One adaptation step toward x around BMU c; weights renormalized.

    Mutates the model in place and returns it.
    """
    x = _check_dim(model, x)
    i, j = c
    if not (0 <= i < model.rows and 0 <= j < model.cols):
        raise DimensionMismatch(f"BMU {c} out of grid bounds")
    e = grid_distances(model.rows, model.cols)[model.unit(i, j)]
    if model.squared_neighborhood:
        e = e * e
    g = np.exp(-e / (2.0 * sigma_n * sigma_n))
    w = model.weights
    w += (alpha * g)[:, None] * (x - w)
    if model.normalize_weights:
        norms = np.linalg.norm(w, axis=1)
        np.maximum(norms, 1e-300, out=norms)
        w /= norms[:, None]
    return model


def train(model: SomModel, inputs: np.ndarray, epochs: int,
          alpha0: float = 0.1, alpha1: float = 0.01,
          sigma_n0: float | None = None, sigma_n1: float = 1.0,
          seed: int = 0) -> SomModel:
    """Train over shuffled presentations with exponentially decaying
    adaptation strength and neighborhood width.

    The decay parameter advances per presentation:
    alpha(t) = alpha0 * (alpha1/alpha0) ** (t/T) with T the total number
    of presentations, and the same form for the neighborhood width.
    Deterministic under a fixed seed; mutates the model in place.
    """
    inputs = np.ascontiguousarray(np.atleast_2d(np.asarray(inputs, dtype=np.float64)))
    if inputs.size == 0:
        raise EmptyInput("no training inputs")
    if inputs.shape[1] != model.dim:
        raise DimensionMismatch(
            f"input dim {inputs.shape[1]} vs model dim {model.dim}")
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    if sigma_n0 is None:
        sigma_n0 = max(model.rows, model.cols) / 2.0

    n = inputs.shape[0]
    total = epochs * n
    rng = np.random.default_rng(seed)
    order = np.concatenate([rng.permutation(n) for _ in range(epochs)])
    order = order.astype(np.int64)
    t = np.arange(total, dtype=np.float64) / total
    alphas = alpha0 * (alpha1 / alpha0) ** t
    sigmas = sigma_n0 * (sigma_n1 / sigma_n0) ** t

    run_training(model.weights, inputs, order, alphas, sigmas,
                 grid_distances(model.rows, model.cols),
                 model.squared_neighborhood, model.normalize_weights)
    model.schedule = {
        "epochs": epochs, "alpha0": alpha0, "alpha1": alpha1,
        "sigma_n0": sigma_n0, "sigma_n1": sigma_n1, "seed": seed,
        "presentations": total,
    }
    return model


def activity_map(model: SomModel, x: np.ndarray,
                 sigma: float | None = None) -> np.ndarray:
    """(rows, cols) exponential activation of every unit for one input."""
    x = _check_dim(model, x)
    diff = model.weights - x
    d = np.sqrt(np.einsum("ud,ud->u", diff, diff))
    return activation(d, model.sigma if sigma is None else sigma).reshape(
        model.rows, model.cols)


def quantization_error(model: SomModel, xs: np.ndarray) -> float:
    """Mean distance from inputs to their best matching units."""
    xs = np.atleast_2d(_check_dim(model, xs))
    flat = bmu_indices(model, xs)
    units = flat[:, 0] * model.cols + flat[:, 1]
    return float(np.mean(np.linalg.norm(xs - model.weights[units], axis=1)))
