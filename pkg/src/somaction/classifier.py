"""Supervised output layer: one neuron per action class, cosine activity.

Weights are adapted by a delta rule on the cosine activity with one-hot
targets.  The update direction is along the normalized input; a strict
mode reproducing the bare (activity - target) step without the input
direction exists for auditability but does not learn in general.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, UnknownClass, ZeroVector


@dataclass
class OutputLayer:
    classes: tuple[str, ...]
    weights: np.ndarray          # (n_classes, dim)
    beta: float = 0.1
    strict_update: bool = False

    @property
    def dim(self) -> int:
        return self.weights.shape[1]


def create_output_layer(classes, dim: int, beta: float = 0.1, seed: int = 0,
                        strict_update: bool = False) -> OutputLayer:
    """Seeded uniform [0,1) weights, one unit row per class."""
    classes = tuple(classes)
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.0, 1.0, (len(classes), dim))
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    return OutputLayer(classes=classes, weights=w, beta=beta,
                       strict_update=strict_update)


def out_activity(x: np.ndarray, w: np.ndarray) -> float:
    """Cosine of the angle between input and weight vector, in [-1, 1]."""
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if x.shape != w.shape:
        raise DimensionMismatch(f"{x.shape} vs {w.shape}")
    nx = np.linalg.norm(x)
    nw = np.linalg.norm(w)
    if nx == 0.0 or nw == 0.0:
        raise ZeroVector("cosine undefined for a zero vector")
    return float(np.dot(x, w) / (nx * nw))


def scores(layer: OutputLayer, x: np.ndarray) -> np.ndarray:
    """Cosine activity of every class neuron for one input."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (layer.dim,):
        raise DimensionMismatch(f"input dim {x.shape} vs layer dim {layer.dim}")
    nx = np.linalg.norm(x)
    if nx == 0.0:
        raise ZeroVector("cosine undefined for a zero vector")
    nw = np.linalg.norm(layer.weights, axis=1)
    if np.any(nw == 0.0):
        raise ZeroVector("a class neuron has a zero weight vector")
    return (layer.weights @ x) / (nw * nx)


def train_step(layer: OutputLayer, x: np.ndarray, target: str) -> OutputLayer:
    """One delta-rule step toward the one-hot target; mutates in place."""
    if target not in layer.classes:
        raise UnknownClass(f"unknown class {target!r}")
    y = scores(layer, x)
    d = np.zeros(len(layer.classes))
    d[layer.classes.index(target)] = 1.0
    if layer.strict_update:
        layer.weights += layer.beta * (y - d)[:, None]
    else:
        xhat = x / np.linalg.norm(x)
        layer.weights += layer.beta * (d - y)[:, None] * xhat[None, :]
    return layer


def predict(layer: OutputLayer, x: np.ndarray) -> str:
    """Class with the highest cosine activity; ties go to the smallest
    class index."""
    return layer.classes[int(np.argmax(scores(layer, x)))]
