"""Grid-reduction kernels with a compiled core and a NumPy fallback.

The compiled extension is used when importable unless ``BLSAT_PURE_PYTHON``
is set in the environment; ``IMPL`` reports which backend is active.  The
public functions here do the bookkeeping (quadratic-form fields, potential
broadcasting, slab iteration) and delegate the flat inner loops to the
selected backend, so both backends produce identical sums and maxima.
"""

import os

import numpy as np

if os.environ.get("BLSAT_PURE_PYTHON"):
    from . import _primitives_np as _backend
else:
    try:
        from . import _gridkernels as _backend
    except ImportError:  # extension not built
        from . import _primitives_np as _backend

IMPL = _backend.IMPL

__all__ = [
    "IMPL",
    "conjugate_pass",
    "reduce_grid_max",
    "reduce_grid_sum",
    "partial_max_grid",
]


def _ascontig(a):
    return np.ascontiguousarray(np.asarray(a, dtype=float))


def conjugate_pass(pot, x, y):
    """max_k (x[k]*y[j] - pot[..., k]) along the last axis of ``pot``.

    ``+inf`` entries are skipped; an all-``+inf`` slice yields ``-inf``.
    """
    pot = _ascontig(pot)
    x = _ascontig(x)
    y = _ascontig(y)
    lead = pot.shape[:-1]
    flat = pot.reshape(-1, pot.shape[-1])
    out = _backend.conj_batch(flat, x, y)
    return np.asarray(out).reshape(lead + (y.size,))


def _inner_quad(qform, axes):
    """Quadratic-form field over axes[1:]; scalar 0.0 when there are none."""
    d = len(axes)
    if d == 1:
        return 0.0
    if d == 2:
        return qform[1, 1] * axes[1] ** 2
    x1, x2 = axes[1], axes[2]
    return (
        qform[1, 1] * x1[:, None] ** 2
        + qform[2, 2] * x2[None, :] ** 2
        + 2.0 * qform[1, 2] * x1[:, None] * x2[None, :]
    )


def _split_groups(groups, axes):
    """Broadcast potentials over axes[1:] and collect axis-0 dependent ones."""
    d = len(axes)
    shape = tuple(a.size for a in axes[1:])
    inner = np.zeros(shape) if shape else 0.0
    with_axis0 = []
    for ax_idx, pot in groups:
        pot = np.asarray(pot, dtype=float)
        if 0 in ax_idx:
            with_axis0.append((ax_idx, pot))
        elif ax_idx == (1,) and d == 3:
            inner = inner + pot[:, None]
        elif ax_idx == (2,):
            inner = inner + pot[None, :]
        else:  # (1,) in 2-D, or (1, 2)
            inner = inner + pot
    return inner, with_axis0


def _axis0_term(with_axis0, i0, d):
    """Axis-0-dependent potential contribution for slab ``i0`` (broadcastable)."""
    acc = 0.0
    for ax_idx, pot in with_axis0:
        if ax_idx == (0,):
            acc = acc + pot[i0]
        elif d == 3 and ax_idx == (0, 1):
            acc = acc + pot[i0][:, None]
        elif d == 3 and ax_idx == (0, 2):
            acc = acc + pot[i0][None, :]
        elif d == 2 and ax_idx == (0, 1):
            acc = acc + pot[i0]
        else:
            raise ValueError(f"unsupported potential axes {ax_idx}")
    return acc


def _cross_field(qform, axes):
    d = len(axes)
    if d == 2:
        return qform[0, 1] * axes[1]
    return qform[0, 1] * axes[1][:, None] + qform[0, 2] * axes[2][None, :]


def reduce_grid_max(qform, axes, groups):
    """Exact max of <z,Qz> - sum of potentials over the full product grid."""
    qform = np.asarray(qform, dtype=float)
    axes = [_ascontig(a) for a in axes]
    d = len(axes)
    if d == 1:
        pot = sum(np.asarray(p, dtype=float) for _, p in groups)
        vals = qform[0, 0] * axes[0] ** 2 - pot
        return float(np.max(np.where(np.isinf(pot), -np.inf, vals)))
    inner_q = _inner_quad(qform, axes)
    inner_p, with_axis0 = _split_groups(groups, axes)
    cross = _ascontig(_cross_field(qform, axes)).ravel()
    best = -np.inf
    for i0, x0 in enumerate(axes[0]):
        base = inner_q - inner_p - _axis0_term(with_axis0, i0, d)
        base = _ascontig(np.where(np.isnan(base), -np.inf, base)).ravel()
        m = _backend.slab_max(base, cross, 2.0 * x0)
        m += qform[0, 0] * x0 * x0
        if m > best:
            best = m
    return float(best)


def reduce_grid_sum(qform, axes, groups, weights):
    """Weighted sum of exp(<z,Qz> - sum pots) plus the boundary-shell subtotal."""
    qform = np.asarray(qform, dtype=float)
    axes = [_ascontig(a) for a in axes]
    weights = [_ascontig(w) for w in weights]
    d = len(axes)
    if d == 1:
        pot = sum(np.asarray(p, dtype=float) for _, p in groups)
        with np.errstate(over="ignore"):
            vals = weights[0] * np.exp(qform[0, 0] * axes[0] ** 2 - pot)
        total = float(np.sum(vals))
        return total, float(vals[0] + vals[-1])
    inner_q = _inner_quad(qform, axes)
    inner_p, with_axis0 = _split_groups(groups, axes)
    cross = _ascontig(_cross_field(qform, axes)).ravel()
    if d == 2:
        w_in = weights[1]
        edge = np.zeros(w_in.shape, dtype=bool)
        edge[0] = edge[-1] = True
    else:
        w_in = weights[1][:, None] * weights[2][None, :]
        edge = np.zeros(w_in.shape, dtype=bool)
        edge[0, :] = edge[-1, :] = True
        edge[:, 0] = edge[:, -1] = True
    w_flat = _ascontig(w_in).ravel()
    edge_flat = np.ascontiguousarray(edge.ravel().astype(np.uint8))
    n0 = axes[0].size
    total = 0.0
    shell = 0.0
    for i0, x0 in enumerate(axes[0]):
        base = inner_q - inner_p - _axis0_term(with_axis0, i0, d)
        base = base + qform[0, 0] * x0 * x0
        base = _ascontig(np.where(np.isnan(base), -np.inf, base)).ravel()
        s, es = _backend.slab_sum_exp(
            w_flat * weights[0][i0], base, cross, 2.0 * x0, edge_flat
        )
        total += s
        shell += s if (i0 == 0 or i0 == n0 - 1) else es
    return total, shell


def partial_max_grid(qform, axes, groups, out_axis):
    """Per out-axis value, max over the remaining axes of <z,Qz> - sum pots.

    ``groups`` must not reference ``out_axis``.
    """
    qform = np.asarray(qform, dtype=float)
    axes = [_ascontig(a) for a in axes]
    d = len(axes)
    order = [out_axis] + [a for a in range(d) if a != out_axis]
    q = qform[np.ix_(order, order)]
    re_axes = [axes[a] for a in order]
    remap = {old: new for new, old in enumerate(order)}
    re_groups = []
    for ax_idx, pot in groups:
        if out_axis in ax_idx:
            raise ValueError("potential groups may not involve the out axis")
        new_order = sorted(range(len(ax_idx)), key=lambda t: remap[ax_idx[t]])
        new_idx = tuple(remap[ax_idx[t]] for t in new_order)
        re_groups.append(
            (new_idx, np.transpose(np.asarray(pot, dtype=float), new_order))
        )
    x0 = re_axes[0]
    if d == 1:
        return q[0, 0] * x0**2
    inner_q = _inner_quad(q, re_axes)
    inner_p, with_axis0 = _split_groups(re_groups, re_axes)
    assert not with_axis0
    cross = _ascontig(_cross_field(q, re_axes)).ravel()
    base = _ascontig(
        np.where(np.isnan(inner_q - inner_p), -np.inf, inner_q - inner_p)
    ).ravel()
    out = np.empty(x0.size)
    for t, x in enumerate(x0):
        out[t] = q[0, 0] * x * x + _backend.slab_max(base, cross, 2.0 * x)
    return out
