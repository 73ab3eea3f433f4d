"""Shared optimization machinery: packed symmetric variables, a
Barzilai-Borwein ascent loop with feasibility backtracking, and the result
record returned by every optimizer in the package.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

__all__ = ["OptimizationResult", "bb_maximize", "random_spd", "run_starts"]


@dataclass
class OptimizationResult:
    """Outcome of a multistart optimization.

    ``status`` is one of ``converged``, ``max_iterations``, ``unbounded``,
    ``asymptotic`` or ``attained``; ``converged`` is True only when the final
    gradient norm met the configured tolerance.  ``log_value`` carries the
    log-scale optimum for objectives whose raw value under- or overflows.
    """

    best_value: float
    argopt: object
    residuals: dict = field(default_factory=dict)
    starts_used: int = 0
    converged: bool = False
    trace: list = field(default_factory=list)
    status: str = ""
    log_value: float | None = None


def random_spd(rng: np.random.Generator, n: int) -> np.ndarray:
    """Wishart-style SPD sample L L^T rescaled to unit mean trace."""
    L = rng.standard_normal((n, n))
    w = L @ L.T
    tr = np.trace(w)
    if tr <= 1e-12:  # essentially impossible, but keep the sample usable
        return np.eye(n)
    return w * (n / tr)


def bb_maximize(value_grad, s0, max_iter=5000, grad_tol=1e-9, value_cap=None):
    """Maximize a smooth function with Barzilai-Borwein steps.

    ``value_grad(s)`` returns ``(value, gradient)`` or ``None`` when ``s`` is
    infeasible; infeasible or insufficiently increasing trial points shrink
    the step (nonmonotone Armijo against the worst recent value).  Stops when
    the gradient norm reaches ``grad_tol``, the iteration budget is
    exhausted, or ``value_cap`` is exceeded (unboundedness guard).

    Returns ``(s, value, grad_norm, n_iter, hit_cap)``.
    """
    s = np.array(s0, dtype=float)
    out = value_grad(s)
    if out is None:
        raise ValueError("infeasible starting point")
    val, g = out
    gnorm = float(np.linalg.norm(g))
    alpha = 1.0 / max(gnorm, 1.0)
    recent = [val]
    s_prev = None
    g_prev = None
    stalled = 0
    for it in range(max_iter):
        if gnorm <= grad_tol:
            return s, val, gnorm, it, False
        if value_cap is not None and val > value_cap:
            return s, val, gnorm, it, True
        if s_prev is not None:
            ds = s - s_prev
            dg = g - g_prev
            curv = -float(ds @ dg)  # positive where the function is concave
            if curv > 0.0:
                alpha = float(ds @ ds) / curv
            else:
                alpha *= 2.0
            alpha = float(np.clip(alpha, 1e-14, 1e8))
        ref = min(recent)
        accepted = False
        step = alpha
        for _ in range(60):
            trial = s + step * g
            out = value_grad(trial)
            if out is not None:
                tval, tg = out
                if tval >= ref + 1e-4 * step * gnorm * gnorm:
                    s_prev, g_prev = s, g
                    s, val, g = trial, tval, tg
                    gnorm = float(np.linalg.norm(g))
                    accepted = True
                    break
            step *= 0.25
        if not accepted:
            return s, val, gnorm, it + 1, False
        if val - ref <= 1e-13 * (1.0 + abs(val)):
            stalled += 1
            if stalled >= 25:  # grinding at a floating-point wall
                return s, val, gnorm, it + 1, False
        else:
            stalled = 0
        recent.append(val)
        if len(recent) > 10:
            recent.pop(0)
    return s, val, gnorm, max_iter, False


def run_starts(fn, n_starts: int, threads: int = 1):
    """Evaluate ``fn(start_index)`` for every start, in index order.

    With ``threads > 1`` the starts run on a thread pool; results are reduced
    in index order either way so the outcome is deterministic.
    """
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, range(n_starts)))
    return [fn(i) for i in range(n_starts)]
