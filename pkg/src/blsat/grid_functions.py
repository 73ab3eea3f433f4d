"""Even functions on symmetric grids, stored through their potentials.

A grid function keeps phi = -log f on a uniform symmetric grid with ``+inf``
allowed (indicator supports).  On top of that sit the discrete Legendre
transform and polar function, volume products, the iterated polar-tuple
construction, exhaustive duality certification, the lambda-affine surface
area, and discrete curvature profiling.

Conjugation convention: the discrete conjugate is trusted only on the
closure of the slope range of phi; outside it the true conjugate of the
represented function cannot be resolved from samples (a radius-R window
makes it grow with slope R instead of jumping to +inf), so those values are
set to +inf.  This is what makes volume products of kinked potentials come
out right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import GridTooSmall, InvalidInput, NotConvex, UnsupportedScale
from .matrix_core import as_symmetric_array

__all__ = [
    "GridFunction",
    "ConcavityProfile",
    "make_grid_function",
    "gaussian_grid",
    "exp_norm_grid",
    "quartic_grid",
    "indicator_grid",
    "tabulated_grid",
    "integral",
    "legendre_transform",
    "polar_function",
    "volume_product",
    "polar_tuple",
    "duality_check",
    "affine_surface_area",
    "concavity_profile",
    "save_grid_function",
    "load_grid_function",
]

INF_SENTINEL = 1e300  # potentials at or above this count as +inf


class GridFunction:
    """An even function f = exp(-phi) sampled on a symmetric uniform grid."""

    __slots__ = ("radius", "points", "potential")

    def __init__(self, radius: float, potential):
        phi = np.asarray(potential, dtype=float)
        if phi.ndim not in (1, 2):
            raise InvalidInput("potential must be a 1-D or 2-D array")
        if phi.ndim == 2 and phi.shape[0] != phi.shape[1]:
            raise InvalidInput("2-D potentials must be square")
        n = phi.shape[0]
        if n < 3 or n % 2 == 0:
            raise InvalidInput("points per axis must be odd and at least 3")
        if not radius > 0:
            raise InvalidInput("radius must be positive")
        if np.any(np.isnan(phi)) or np.any(np.isneginf(phi)):
            raise InvalidInput("potential values must be in (-inf, +inf]")
        phi = np.where(phi >= INF_SENTINEL, np.inf, phi)
        # exact evenness: average with the reflection through the origin
        flip = phi[::-1] if phi.ndim == 1 else phi[::-1, ::-1]
        phi = 0.5 * (phi + flip)
        if not np.any(np.isfinite(phi)):
            raise InvalidInput("potential must be finite somewhere")
        phi.setflags(write=False)
        object.__setattr__(self, "radius", float(radius))
        object.__setattr__(self, "points", n)
        object.__setattr__(self, "potential", phi)

    def __setattr__(self, name, value):
        raise AttributeError("GridFunction is immutable")

    @property
    def dim(self) -> int:
        return self.potential.ndim

    @property
    def spacing(self) -> float:
        return 2.0 * self.radius / (self.points - 1)

    def axis(self) -> np.ndarray:
        half = (self.points - 1) // 2
        return (np.arange(self.points) - half) * self.spacing

    def values(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(-self.potential)

    def slope_bound(self) -> float:
        """Largest finite-difference slope magnitude along the axes."""
        phi = self.potential
        h = self.spacing
        best = 0.0
        diffs = [np.diff(phi, axis=0)]
        if phi.ndim == 2:
            diffs.append(np.diff(phi, axis=1))
        for d in diffs:
            finite = np.isfinite(d)
            if np.any(finite):
                best = max(best, float(np.max(np.abs(d[finite]))) / h)
        return best


# --- constructors -------------------------------------------------------------


def _grid_axes(radius, points):
    half = (points - 1) // 2
    return (np.arange(points) - half) * (2.0 * radius / (points - 1))


def gaussian_grid(a, radius: float, points: int) -> GridFunction:
    """Centered Gaussian e^{-(1/2) <x, a x>}; ``a`` scalar (1-D) or 2x2 matrix."""
    x = _grid_axes(radius, points)
    if np.ndim(a) == 0:
        if not a > 0:
            raise InvalidInput("gaussian parameter must be positive")
        return GridFunction(radius, 0.5 * float(a) * x**2)
    A = as_symmetric_array(a)
    if A.shape != (2, 2):
        raise InvalidInput("matrix gaussian grids support dimension 2 only")
    x0 = x[:, None]
    x1 = x[None, :]
    phi = 0.5 * (A[0, 0] * x0**2 + 2 * A[0, 1] * x0 * x1 + A[1, 1] * x1**2)
    return GridFunction(radius, phi)


def exp_norm_grid(radius: float, points: int) -> GridFunction:
    """1-D exponential density shape e^{-|x|}."""
    return GridFunction(radius, np.abs(_grid_axes(radius, points)))


def quartic_grid(radius: float, points: int, quartic: float, quad: float = 0.0) -> GridFunction:
    """1-D potential quartic*x^4 + (quad/2)*x^2."""
    if quartic < 0 or quad < 0:
        raise InvalidInput("quartic constructor needs nonnegative coefficients")
    x = _grid_axes(radius, points)
    return GridFunction(radius, quartic * x**4 + 0.5 * quad * x**2)


def indicator_grid(radius: float, points: int, half_width: float, dim: int = 1) -> GridFunction:
    """Indicator of [-half_width, half_width] (interval or square box)."""
    if not 0 < half_width:
        raise InvalidInput("half_width must be positive")
    x = _grid_axes(radius, points)
    inside1 = np.abs(x) <= half_width + 1e-12 * half_width
    if dim == 1:
        phi = np.where(inside1, 0.0, np.inf)
    elif dim == 2:
        inside = inside1[:, None] & inside1[None, :]
        phi = np.where(inside, 0.0, np.inf)
    else:
        raise InvalidInput("indicator grids support dim 1 or 2")
    return GridFunction(radius, phi)


def tabulated_grid(radius: float, potential) -> GridFunction:
    """Grid function from an explicit potential table."""
    return GridFunction(radius, potential)


def make_grid_function(spec: dict) -> GridFunction:
    """Build a grid function from a plain dict (the CLI's inline format)."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidInput("grid spec must be a dict with a 'kind' key")
    kind = spec["kind"]
    if kind == "file":
        return load_grid_function(spec["path"])
    radius = float(spec.get("radius", 8.0))
    points = int(spec.get("points", 801))
    if kind == "gaussian":
        return gaussian_grid(spec.get("a", 1.0), radius, points)
    if kind == "exp_norm":
        return exp_norm_grid(radius, points)
    if kind == "quartic":
        return quartic_grid(
            radius, points, float(spec.get("quartic", 0.05)), float(spec.get("quad", 0.0))
        )
    if kind == "indicator":
        return indicator_grid(
            radius, points, float(spec.get("half_width", 1.0)), int(spec.get("dim", 1))
        )
    if kind == "tabulated":
        return tabulated_grid(radius, np.asarray(spec["potential"], dtype=float))
    raise InvalidInput(f"unknown grid function kind {kind!r}")


# --- quadrature ---------------------------------------------------------------


def _trapezoid_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def integral(f: GridFunction) -> float:
    """Trapezoid mass of exp(-phi); +inf potentials contribute nothing."""
    vals = f.values()
    w = _trapezoid_weights(f.points, f.spacing)
    if f.dim == 1:
        return float(np.sum(w * vals))
    return float(w @ vals @ w)


# --- conjugation --------------------------------------------------------------


def _dual_axis(dual_radius: float, points: int) -> np.ndarray:
    half = (points - 1) // 2
    return (np.arange(points) - half) * (dual_radius / half)


def legendre_transform(f: GridFunction, dual_radius: float | None = None) -> GridFunction:
    """Discrete convex conjugate of the potential, as a grid function.

    The output grid spans ``dual_radius`` (default: slope bound plus one
    spacing) with the same point count.  Values outside the closed slope
    range of the input are +inf; see the module docstring.
    """
    s_max = f.slope_bound()
    if dual_radius is None:
        dual_radius = s_max + f.spacing
    if not dual_radius > 0:
        raise InvalidInput("dual radius must be positive")
    x = f.axis()
    y = _dual_axis(dual_radius, f.points)
    cut = s_max + 0.25 * min(f.spacing, float(y[1] - y[0]))
    if f.dim == 1:
        star = _kernels.conjugate_pass(f.potential, x, y)
        star[np.abs(y) > cut] = np.inf
        return GridFunction(dual_radius, star)
    # 2-D: conjugate axis by axis (sup over x1 first, then x0)
    g = _kernels.conjugate_pass(f.potential, x, y)  # (x0, y1)
    neg = np.ascontiguousarray(-g.T)  # (y1, x0)
    star = _kernels.conjugate_pass(neg, x, y).T  # (y0, y1)
    star[np.abs(y)[:, None] > cut] = np.inf
    star[np.abs(y)[None, :] > cut] = np.inf
    return GridFunction(dual_radius, star)


def polar_function(f: GridFunction, dual_radius: float | None = None) -> GridFunction:
    """Polar of f: the function with potential equal to the conjugate of phi."""
    return legendre_transform(f, dual_radius)


def volume_product(f: GridFunction, dual_radius: float | None = None) -> float:
    """Mass of f times mass of its polar."""
    mass = integral(f)
    if mass <= 0.0:
        raise InvalidInput("input has no mass")
    return mass * integral(polar_function(f, dual_radius))


# --- multi-function duality ---------------------------------------------------


def _factor_axes(datum, fs):
    """Flatten factor grids into tensor axes and scaled potential groups."""
    if len(fs) != datum.m:
        raise InvalidInput("need one grid function per factor")
    axes = []
    groups = []
    owners = []
    for i, (f, n_i, c_i) in enumerate(zip(fs, datum.dims, datum.exponents)):
        if f.dim != n_i:
            raise InvalidInput(
                f"factor {i} has grid dim {f.dim} but datum dim {n_i}"
            )
        start = len(axes)
        if f.dim == 1:
            axes.append(f.axis())
            groups.append(((start,), c_i * f.potential))
        else:
            axes.append(f.axis())
            axes.append(f.axis())
            groups.append(((start, start + 1), c_i * f.potential))
        owners.append(tuple(range(start, len(axes))))
    if len(axes) > 3:
        raise UnsupportedScale("at most 3 tensor axes are supported")
    return axes, groups, owners


def duality_check(datum, fs) -> float:
    """Exhaustive slack of the duality relation on the product grid.

    Returns max over the grid of <x, Q x> - sum_i c_i phi_i(x_i); the tuple
    satisfies the relation exactly when this is <= 0.
    """
    axes, groups, _ = _factor_axes(datum, fs)
    return _kernels.reduce_grid_max(datum.kernel.array, axes, groups)


def polar_tuple(datum, fs) -> list[GridFunction]:
    """Iterated polar construction: each factor is replaced in turn by the
    largest function keeping the duality relation against the others.

    Restricted to data with 1-D factors and m <= 3.  Outputs dominate the
    inputs pointwise whenever the input tuple satisfies the relation on the
    grid, and the output tuple passes :func:`duality_check` by construction.
    """
    if datum.m > 3 or any(n != 1 for n in datum.dims):
        raise UnsupportedScale("polar tuples support m <= 3 with 1-D factors")
    axes = [f.axis() for f in fs]
    if len(axes) != datum.m:
        raise InvalidInput("need one grid function per factor")
    scaled = [c * f.potential for c, f in zip(datum.exponents, fs)]
    Q = datum.kernel.array
    out = []
    for k in range(datum.m):
        groups = [((j,), scaled[j]) for j in range(datum.m) if j != k]
        sup = _kernels.partial_max_grid(Q, axes, groups, out_axis=k)
        scaled[k] = sup  # later factors polarize against the updated tuple
        out.append(GridFunction(fs[k].radius, sup / datum.exponents[k]))
    return out


# --- affine surface area -------------------------------------------------------


def affine_surface_area(v, lam: float, tol: float = 1e-9) -> float:
    """lambda-affine surface area of a convex potential.

    Quadratic mode (``v`` a symmetric matrix for V = (1/2)<x, v x>) uses the
    closed form (2 pi)^{n/2} det(v)^{lambda - 1/2}.  Grid mode (``v`` a 1-D
    grid function) uses central differences with the curvature clamped at
    zero; genuinely negative curvature raises :class:`NotConvex`.
    """
    if isinstance(v, GridFunction):
        if v.dim != 1:
            raise UnsupportedScale("grid mode supports 1-D potentials")
        phi = v.potential
        if not np.all(np.isfinite(phi)):
            raise InvalidInput("grid mode needs a finite potential")
        h = v.spacing
        x = v.axis()
        d1 = np.gradient(phi, h)
        d2 = np.empty_like(phi)
        d2[1:-1] = (phi[2:] - 2 * phi[1:-1] + phi[:-2]) / (h * h)
        d2[0] = d2[1]
        d2[-1] = d2[-2]
        scale = 1.0 + float(np.max(np.abs(phi[np.isfinite(phi)])))
        if np.min(d2) < -tol * scale:
            raise NotConvex(f"second difference {np.min(d2):.3e} below tolerance")
        d2 = np.clip(d2, 0.0, None)
        with np.errstate(over="ignore"):
            integrand = np.exp((2 * lam - 1) * phi - lam * x * d1) * d2**lam
        return float(np.sum(_trapezoid_weights(v.points, h) * integrand))
    A = as_symmetric_array(v)
    w = np.linalg.eigvalsh(A)
    if w[0] <= 0:
        raise InvalidInput("quadratic mode needs a positive definite matrix")
    n = A.shape[0]
    return (2.0 * math.pi) ** (0.5 * n) * float(np.prod(w)) ** (lam - 0.5)


# --- curvature profile ---------------------------------------------------------


@dataclass
class ConcavityProfile:
    """Discrete curvature range of the potential plus the envelope verdict."""

    lambda_est: float
    Lambda_est: float
    envelope_ok: bool


def _second_difference_range(phi: np.ndarray, h: float):
    """(min, max) of axis-aligned second differences; +inf neighbors of a
    finite center push the max to +inf and are excluded from the min."""
    lo = np.inf
    hi = -np.inf
    arrays = [phi] if phi.ndim == 1 else [phi, phi.T]
    for arr in np.atleast_2d(*arrays) if phi.ndim == 1 else arrays:
        pass
    if phi.ndim == 1:
        rows = phi[None, :]
        row_sets = [rows]
    else:
        row_sets = [phi, phi.T]
    for rows in row_sets:
        rows = np.atleast_2d(rows)
        center = rows[:, 1:-1]
        left = rows[:, :-2]
        right = rows[:, 2:]
        ok_center = np.isfinite(center)
        with np.errstate(invalid="ignore"):
            s = (left - 2 * center + right) / (h * h)
        all_finite = ok_center & np.isfinite(left) & np.isfinite(right)
        if np.any(all_finite):
            lo = min(lo, float(np.min(s[all_finite])))
            hi = max(hi, float(np.max(s[all_finite])))
        if np.any(ok_center & ~(np.isfinite(left) & np.isfinite(right))):
            hi = np.inf
    return lo, hi


def concavity_profile(f: GridFunction) -> ConcavityProfile:
    """Estimate the uniform log-concavity/log-convexity window of f.

    ``lambda_est`` is the smallest axis-aligned second difference (so f is
    lambda-uniformly log-concave on the grid), ``Lambda_est`` the largest
    (``inf`` at indicator edges).  ``envelope_ok`` checks the quadratic
    envelopes implied by the window after normalizing the mass to 1.
    """
    lo, hi = _second_difference_range(f.potential, f.spacing)
    mass = integral(f)
    if mass <= 0:
        raise InvalidInput("input has no mass")
    phi_n = f.potential + math.log(mass)
    n = f.dim
    x = f.axis()
    if f.dim == 1:
        r2 = x**2
    else:
        r2 = x[:, None] ** 2 + x[None, :] ** 2
    slack = 1e-7
    finite = np.isfinite(phi_n)
    ok = True
    if hi > 0 and np.isfinite(hi) and lo > 0:
        lower = 0.5 * lo * r2 + 0.5 * n * math.log(2 * math.pi / hi)
        upper = 0.5 * hi * r2 + 0.5 * n * math.log(2 * math.pi / lo)
        ok = bool(
            np.all(phi_n[finite] >= lower[finite] - slack)
            and np.all(phi_n[finite] <= upper[finite] + slack)
        )
    elif np.isfinite(hi) and hi > 0 and lo <= 0:
        lower = 0.5 * lo * r2 + 0.5 * n * math.log(2 * math.pi / hi)
        ok = bool(np.all(phi_n[finite] >= lower[finite] - slack))
    # lo <= 0 with hi = inf leaves both envelope sides vacuous
    return ConcavityProfile(lambda_est=lo, Lambda_est=hi, envelope_ok=ok)


# --- serialization --------------------------------------------------------------


def save_grid_function(f: GridFunction, path) -> None:
    """Write the tabular text format: dim/radius/points headers, then
    one potential value per line in row-major order ('inf' for +inf)."""
    with open(path, "w") as fh:
        fh.write(f"dim {f.dim}\n")
        fh.write(f"radius {f.radius!r}\n")
        fh.write(f"points {f.points}\n")
        flat = f.potential.ravel()
        for v in flat:
            fh.write("inf\n" if np.isinf(v) else f"{v!r}\n")


def load_grid_function(path) -> GridFunction:
    """Read the tabular text format produced by :func:`save_grid_function`."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    try:
        dim = int(lines[0].split()[1])
        radius = float(lines[1].split()[1])
        points = int(lines[2].split()[1])
    except (IndexError, ValueError) as exc:
        raise InvalidInput(f"malformed grid function header: {exc}") from exc
    body = lines[3:]
    expected = points if dim == 1 else points * points
    if len(body) != expected:
        raise InvalidInput(
            f"expected {expected} potential values, found {len(body)}"
        )
    vals = np.array([np.inf if v == "inf" else float(v) for v in body])
    if dim == 2:
        vals = vals.reshape(points, points)
    return GridFunction(radius, vals)
