"""NumPy backend for the hot loops (fallback when the extension is absent)."""

import numpy as np

IMPL = "numpy"


def conj_batch(pot, x, y):
    """out[b, j] = max_k (x[k]*y[j] - pot[b, k]); +inf potential entries drop.

    Rows whose potential is +inf everywhere give -inf.
    """
    nb = pot.shape[0]
    out = np.empty((nb, y.size))
    with np.errstate(invalid="ignore"):
        for j, yj in enumerate(y):
            vals = x * yj - pot
            out[:, j] = np.max(np.where(np.isnan(vals), -np.inf, vals), axis=1)
    return out


def slab_max(base, cross, scale):
    """max(base + scale*cross) over flat arrays; base may contain -inf."""
    return float(np.max(base + scale * cross))


def slab_sum_exp(w, base, cross, scale, edge):
    """sum of w*exp(base + scale*cross) plus the same sum over edge points."""
    with np.errstate(over="ignore"):
        vals = w * np.exp(base + scale * cross)
    return float(np.sum(vals)), float(np.sum(vals[edge != 0]))
