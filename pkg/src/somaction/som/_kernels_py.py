"""Pure-numpy training kernel; fallback when the compiled extension is absent.

Must stay semantically identical to _kernels.pyx (same update order, same
neighborhood formula, renormalization after every presentation).
"""

import numpy as np


def run_training(weights, inputs, order, alphas, sigmas, grid_dist, squared,
                 normalize=True):
    """Run the full presentation loop in place.

    weights   (U, D)  unit rows, modified in place
    inputs    (N, D)
    order     (T,)    input index per presentation
    alphas    (T,)    adaptation strength per presentation
    sigmas    (T,)    neighborhood width per presentation
    grid_dist (U, U)  Euclidean distances between unit grid locations
    squared   use squared grid distance in the Gaussian exponent
    normalize renormalize every weight row after each presentation
    """
    for step, idx in enumerate(order):
        x = inputs[idx]
        diff = x - weights
        d2 = np.einsum("ud,ud->u", diff, diff)
        c = int(np.argmin(d2))
        e = grid_dist[c]
        if squared:
            e = e * e
        g = np.exp(-e / (2.0 * sigmas[step] * sigmas[step]))
        weights += (alphas[step] * g)[:, None] * diff
        if normalize:
            norms = np.linalg.norm(weights, axis=1)
            np.maximum(norms, 1e-300, out=norms)
            weights /= norms[:, None]
