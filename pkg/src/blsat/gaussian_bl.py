"""Brascamp-Lieb data and the Gaussian side of the saturation problem.

Everything here is finite-dimensional: data are (dims, exponents, kernel)
triples with coordinate-projection maps, Gaussian inputs are tuples of
positive definite matrices, and the two constrained optimizations (the
product-of-determinants maximization over the spectrahedron and the inverse
constant) run on the matrix-exponential chart with a vanishing log-det
barrier where needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from ._optim import OptimizationResult, bb_maximize, random_spd, run_starts
from .errors import Infeasible, InvalidInput, NotPositiveDefinite, Unbounded, UnsupportedDatum
from .matrix_core import (
    SymmetricMatrix,
    as_symmetric_array,
    dexpm_sym_adjoint,
    dfun_sym_adjoint,
    expm_sym,
    fun_sym,
    signature,
)

__all__ = [
    "BLDatum",
    "GaussianTuple",
    "OptimizationResult",
    "OptimizerConfig",
    "bs_datum",
    "kw_datum",
    "scaled_datum",
    "assemble_M",
    "gaussian_feasible",
    "bl_gaussian_value",
    "kw_gaussian_objective",
    "optimize_kw_constant",
    "optimize_inverse_constant",
    "stationarity_residuals",
    "prop52_check",
    "prop52_search",
    "bw_nondegenerate",
    "sample_boundary_tuple",
    "Prop52Report",
]

FEAS_TOL = 1e-10


@dataclass(frozen=True)
class BLDatum:
    """A datum (dims, exponents, kernel) with coordinate-projection maps."""

    dims: tuple[int, ...]
    exponents: tuple[float, ...]
    kernel: SymmetricMatrix

    def __post_init__(self):
        if len(self.dims) != len(self.exponents):
            raise InvalidInput("dims and exponents must have equal length")
        if any(n < 1 for n in self.dims):
            raise InvalidInput("dimensions must be positive")
        if any(c <= 0 for c in self.exponents):
            raise InvalidInput("exponents must be positive")
        if self.kernel.dim != sum(self.dims):
            raise InvalidInput(
                f"kernel dim {self.kernel.dim} != sum of dims {sum(self.dims)}"
            )

    @property
    def m(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def offsets(self) -> list[int]:
        out = [0]
        for n in self.dims:
            out.append(out[-1] + n)
        return out

    def is_kw_shaped(self) -> bool:
        """Equal dimensions with unit exponents (the shape of the pairwise data)."""
        return len(set(self.dims)) == 1 and all(c == 1.0 for c in self.exponents)


class GaussianTuple:
    """An m-tuple of positive definite blocks, in precision or covariance convention."""

    __slots__ = ("blocks", "convention")

    def __init__(self, blocks, convention: str = "precision"):
        if convention not in ("precision", "covariance"):
            raise InvalidInput(f"unknown convention {convention!r}")
        arrs = []
        for b in blocks:
            a = as_symmetric_array(b)
            w = np.linalg.eigvalsh(a)
            if w[0] <= FEAS_TOL:
                raise NotPositiveDefinite(
                    f"block eigenvalue {w[0]:.3e} is not positive"
                )
            a.setflags(write=False)
            arrs.append(a)
        if not arrs:
            raise InvalidInput("tuple must contain at least one block")
        object.__setattr__(self, "blocks", tuple(arrs))
        object.__setattr__(self, "convention", convention)

    def __setattr__(self, name, value):
        raise AttributeError("GaussianTuple is immutable")

    @property
    def m(self) -> int:
        return len(self.blocks)

    def dims(self) -> tuple[int, ...]:
        return tuple(b.shape[0] for b in self.blocks)

    def inverted(self) -> "GaussianTuple":
        other = "covariance" if self.convention == "precision" else "precision"
        return GaussianTuple([np.linalg.inv(b) for b in self.blocks], other)

    def to_precision(self) -> "GaussianTuple":
        return self if self.convention == "precision" else self.inverted()

    def to_covariance(self) -> "GaussianTuple":
        return self if self.convention == "covariance" else self.inverted()

    @classmethod
    def identity(cls, m: int, n: int, convention: str = "precision"):
        return cls([np.eye(n)] * m, convention)

    def distance_to(self, other: "GaussianTuple") -> float:
        """Max Frobenius distance between corresponding blocks."""
        return max(
            float(np.linalg.norm(a - b))
            for a, b in zip(self.blocks, other.blocks)
        )


def bs_datum(n: int) -> BLDatum:
    """Two n-dimensional factors with unit exponents and the polar-pairing kernel."""
    if n < 1:
        raise InvalidInput("n must be at least 1")
    Q = np.zeros((2 * n, 2 * n))
    Q[:n, n:] = 0.5 * np.eye(n)
    Q[n:, :n] = 0.5 * np.eye(n)
    return BLDatum(dims=(n, n), exponents=(1.0, 1.0), kernel=SymmetricMatrix(Q))


def kw_datum(m: int, n: int) -> BLDatum:
    """m equal factors coupled pairwise with weight 1/(2(m-1))."""
    if m < 2 or n < 1:
        raise InvalidInput("need m >= 2 and n >= 1")
    N = m * n
    Q = np.zeros((N, N))
    w = 1.0 / (2.0 * (m - 1))
    for i in range(m):
        for j in range(m):
            if i != j:
                Q[i * n : (i + 1) * n, j * n : (j + 1) * n] = w * np.eye(n)
    return BLDatum(dims=(n,) * m, exponents=(1.0,) * m, kernel=SymmetricMatrix(Q))


def scaled_datum(base: BLDatum, p: float) -> BLDatum:
    """The family c_i -> (c_i + p)/p, kernel -> kernel/p.

    Not idempotent: rescaling twice shifts the exponents again.
    """
    if not p > 0:
        raise InvalidInput("p must be positive")
    exps = tuple((c + p) / p for c in base.exponents)
    return BLDatum(
        dims=base.dims,
        exponents=exps,
        kernel=SymmetricMatrix(base.kernel.array / p),
    )


def _blocks_as_precision(datum: BLDatum, A: GaussianTuple) -> list[np.ndarray]:
    prec = A.to_precision()
    if prec.dims() != datum.dims:
        raise InvalidInput(
            f"tuple dims {prec.dims()} do not match datum dims {datum.dims}"
        )
    return list(prec.blocks)


def assemble_M(datum: BLDatum, A: GaussianTuple) -> SymmetricMatrix:
    """Block-diagonal embedding of c_i * A_i minus twice the kernel."""
    blocks = _blocks_as_precision(datum, A)
    M = -2.0 * datum.kernel.array
    off = datum.offsets()
    for i, (b, c) in enumerate(zip(blocks, datum.exponents)):
        sl = slice(off[i], off[i + 1])
        M[sl, sl] += c * b
    return SymmetricMatrix(M)


def gaussian_feasible(datum: BLDatum, A: GaussianTuple, tol: float = FEAS_TOL) -> bool:
    """Whether the Gaussian tuple satisfies the duality relation (M PSD)."""
    M = assemble_M(datum, A).array
    w = np.linalg.eigvalsh(M)
    return bool(w[0] >= -tol * np.linalg.norm(M))


def bl_gaussian_value(datum: BLDatum, A: GaussianTuple) -> float:
    """Closed-form Gaussian value of the kernel-weighted integral ratio.

    Returns ``+inf`` when the assembled matrix has an eigenvalue <= 0 (the
    defining integral diverges there).
    """
    blocks = _blocks_as_precision(datum, A)
    M = assemble_M(datum, A).array
    w = np.linalg.eigvalsh(M)
    if w[0] <= 0.0:
        return float("inf")
    N = datum.total_dim
    cn = sum(c * n for c, n in zip(datum.exponents, datum.dims))
    log_val = 0.5 * (N - cn) * math.log(2.0 * math.pi) - 0.5 * float(
        np.log(w).sum()
    )
    for b, c in zip(blocks, datum.exponents):
        log_val += 0.5 * c * float(np.log(np.linalg.eigvalsh(b)).sum())
    return math.exp(log_val)


def kw_gaussian_objective(datum: BLDatum, A: GaussianTuple) -> float:
    """Log-objective sum_i c_i * (-log det A_i); the (2*pi) factor is kept separate."""
    blocks = _blocks_as_precision(datum, A)
    return -sum(
        c * float(np.log(np.linalg.eigvalsh(b)).sum())
        for b, c in zip(blocks, datum.exponents)
    )


def gaussian_product_constant(datum: BLDatum, log_objective: float) -> float:
    """Reattach the (2*pi) factor: prod_i det(2*pi*A_i^{-1})^{c_i/2}."""
    cn = sum(c * n for c, n in zip(datum.exponents, datum.dims))
    return (2.0 * math.pi) ** (0.5 * cn) * math.exp(0.5 * log_objective)


def bw_nondegenerate(datum: BLDatum, tol: float = FEAS_TOL):
    """Nondegeneracy of the datum; with projections it reduces to s^-(kernel)=0."""
    n_neg, _, _ = signature(datum.kernel, tol=tol)
    return n_neg == 0, {"s_minus": n_neg}


# --- stationarity diagnostics (pairwise-kernel shape) -----------------------


def stationarity_residuals(datum: BLDatum, A: GaussianTuple) -> dict:
    """Frobenius residuals of the maximizer identities for pairwise data.

    Keys: ``pair_identity`` (equality of the per-factor products across
    factors), ``barycenter_consistency`` (per-factor barycenter formulas
    agree), ``resolvent_sum`` (sum of ((m-1)A_i + id)^{-1} equals the
    identity).
    """
    if not datum.is_kw_shaped():
        raise UnsupportedDatum(
            "stationarity residuals need equal dims and unit exponents"
        )
    blocks = _blocks_as_precision(datum, A)
    m = datum.m
    n = blocks[0].shape[0]
    eye = np.eye(n)
    f = (m - 1.0) / m
    prods = []
    barys = []
    for a in blocks:
        left = f * a + eye / m
        right = f * eye + np.linalg.inv(a) / m
        prods.append(left @ right)
        barys.append(np.linalg.inv(right) @ np.linalg.inv(left))
    pair = 0.0
    bary = 0.0
    for i in range(m):
        for j in range(i + 1, m):
            pair = max(pair, float(np.linalg.norm(prods[i] - prods[j])))
            bary = max(bary, float(np.linalg.norm(barys[i] - barys[j])))
    resolvent = sum(np.linalg.inv((m - 1.0) * a + eye) for a in blocks)
    return {
        "pair_identity": pair,
        "barycenter_consistency": bary,
        "resolvent_sum": float(np.linalg.norm(resolvent - eye)),
    }


@dataclass
class Prop52Report:
    """Residuals for the linear-algebra conditions pinning the balanced tuple."""

    range_violation: float
    sum_residual: float
    pair_residual: float
    alpha: float
    power_identity_residual: float
    distance_from_center: float
    passed: bool


def prop52_check(X, tol: float = 1e-8) -> Prop52Report:
    """Check 0 < X_i < id, sum X_i = id, X_i - X_i^2 all equal; report residuals.

    Also verifies the two-eigenvalue power identity for exponents up to 6 and
    the distance of the tuple from the balanced point id/m.  ``X`` may be a
    :class:`GaussianTuple` or a plain sequence of symmetric matrices (the
    latter lets candidates that brush the PD boundary be reported instead of
    rejected).
    """
    raw = X.blocks if isinstance(X, GaussianTuple) else X
    blocks = [as_symmetric_array(b) for b in raw]
    n = blocks[0].shape[0]
    if any(b.shape[0] != n for b in blocks):
        raise InvalidInput("blocks must share one dimension")
    m = len(blocks)
    eye = np.eye(n)

    range_violation = 0.0
    lam_vals = []
    for b in blocks:
        w = np.linalg.eigvalsh(b)
        range_violation = max(
            range_violation, float(max(0.0, -w[0])), float(max(0.0, w[-1] - 1.0))
        )
        lam_vals.extend(w * (1.0 - w))
    sum_residual = float(np.linalg.norm(sum(blocks) - eye))
    diffs = [b - b @ b for b in blocks]
    pair_residual = 0.0
    for i in range(m):
        for j in range(i + 1, m):
            pair_residual = max(
                pair_residual, float(np.linalg.norm(diffs[i] - diffs[j]))
            )

    lam = float(np.mean(lam_vals))
    disc = max(0.0, 1.0 - 4.0 * lam)
    alpha = 0.5 * (1.0 - math.sqrt(disc))

    power_res = 0.0
    for b in blocks:
        power = b.copy()
        for ell in range(2, 7):
            power = power @ b
            if abs(1.0 - 2.0 * alpha) > 1e-12:
                c1 = ((1 - alpha) ** ell - alpha**ell) / (1 - 2 * alpha)
                c0 = (
                    (alpha - alpha**2)
                    * ((1 - alpha) ** (ell - 1) - alpha ** (ell - 1))
                    / (1 - 2 * alpha)
                )
            else:  # alpha = 1/2 limit
                c1 = ell * 0.5 ** (ell - 1)
                c0 = (ell - 1) * 0.5**ell
            power_res = max(
                power_res, float(np.linalg.norm(power - (c1 * b - c0 * eye)))
            )

    distance = max(float(np.linalg.norm(b - eye / m)) for b in blocks)
    passed = range_violation <= tol and sum_residual <= tol and pair_residual <= tol
    return Prop52Report(
        range_violation=range_violation,
        sum_residual=sum_residual,
        pair_residual=pair_residual,
        alpha=alpha,
        power_identity_residual=power_res,
        distance_from_center=distance,
        passed=passed,
    )


def _sigmoid(w):
    return 1.0 / (1.0 + np.exp(-w))


def _dsigmoid(w):
    s = _sigmoid(w)
    return s * (1.0 - s)


def prop52_search(m: int, n: int, trials: int, seed: int, tol: float = 1e-8):
    """Random search for tuples meeting the balanced-point constraints.

    Each trial minimizes the squared constraint residuals over the sigmoid
    chart X_i = (id + exp(-S_i))^{-1} (which keeps 0 < X_i < id for free)
    from a seeded random start.  Returns a list of (constraint_residual,
    distance from id/m, interior_margin) triples for the trials that
    converged below ``tol``.

    The interior margin (distance of the spectra from {0, 1}) matters: the
    strict inequalities are essential, since orthogonal projection
    decompositions sit in the closure and satisfy the equality constraints
    exactly while being far from the balanced point.
    """
    k = n * n

    def unpack(vec):
        return [vec[i * k : (i + 1) * k].reshape(n, n) for i in range(m)]

    eye = np.eye(n)

    def objective(vec):
        Ss = [0.5 * (s + s.T) for s in unpack(vec)]
        Xs = [fun_sym(s, _sigmoid) for s in Ss]
        R = sum(Xs) - eye
        diffs = [x - x @ x for x in Xs]
        val = float(np.sum(R * R))
        grads_X = [2.0 * R.copy() for _ in range(m)]
        for i in range(m):
            for j in range(i + 1, m):
                D = diffs[i] - diffs[j]
                val += float(np.sum(D * D))
                gi = 2.0 * (D - Xs[i] @ D - D @ Xs[i])
                gj = -2.0 * (D - Xs[j] @ D - D @ Xs[j])
                grads_X[i] += gi
                grads_X[j] += gj
        grad = np.concatenate(
            [
                dfun_sym_adjoint(s, g, _sigmoid, _dsigmoid).ravel()
                for s, g in zip(Ss, grads_X)
            ]
        )
        return val, grad

    results = []
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        vec0 = np.concatenate(
            [0.5 * (lambda a: a + a.T)(rng.standard_normal((n, n))).ravel() for _ in range(m)]
        )
        res = _scipy_minimize(
            objective, vec0, jac=True, method="L-BFGS-B",
            options={"maxiter": 2000, "ftol": 1e-18, "gtol": 1e-14},
        )
        Xs = [fun_sym(0.5 * (s + s.T), _sigmoid) for s in unpack(res.x)]
        report = prop52_check(Xs, tol=tol)
        residual = max(report.sum_residual, report.pair_residual, report.range_violation)
        if residual <= tol:
            margin = min(
                float(min(w[0], 1.0 - w[-1]))
                for w in (np.linalg.eigvalsh(x) for x in Xs)
            )
            results.append((residual, report.distance_from_center, margin))
    return results


# --- constrained optimizations ----------------------------------------------


@dataclass
class OptimizerConfig:
    # grad_tol sits above the fp noise floor of the vanishing-barrier
    # gradient (mu * kappa(M) * eps ~ 1e-8 at the final stage)
    barrier_init: float = 1.0
    barrier_final: float = 1e-8
    grad_tol: float = 1e-6
    max_inner: int = 5000
    unbounded_threshold: float = 1e6
    log_unbounded: float = 30.0
    divergence_cap: float = 10.0
    threads: int = 1


def sample_boundary_tuple(datum: BLDatum, rng: np.random.Generator) -> GaussianTuple:
    """Random tuple scaled onto the boundary of the feasible spectrahedron.

    Draws Wishart-style blocks and rescales them by the smallest factor that
    makes the assembled matrix PSD; the result has minimal eigenvalue 0, so
    its objective is extremal along its ray.
    """
    blocks = [random_spd(rng, n) for n in datum.dims]
    t = _min_feasible_scale(datum, blocks)
    if not np.isfinite(t) or t <= 0:
        raise Infeasible("kernel admits no boundary scaling (no positive part)")
    return GaussianTuple([t * b for b in blocks], "precision")


def _min_feasible_scale(datum: BLDatum, blocks) -> float:
    """Smallest t with t * blockdiag(c_i A_i) - 2 Q PSD."""
    off = datum.offsets()
    N = datum.total_dim
    B = np.zeros((N, N))
    for i, (b, c) in enumerate(zip(blocks, datum.exponents)):
        sl = slice(off[i], off[i + 1])
        B[sl, sl] = c * b
    w, v = np.linalg.eigh(B)
    Bih = (v / np.sqrt(w)) @ v.T
    return float(np.linalg.eigvalsh(Bih @ (2.0 * datum.kernel.array) @ Bih)[-1])


def _pack(mats):
    return np.concatenate([m.ravel() for m in mats])


def _unpack(vec, dims):
    out = []
    k = 0
    for n in dims:
        out.append(0.5 * (vec[k : k + n * n].reshape(n, n) + vec[k : k + n * n].reshape(n, n).T))
        k += n * n
    return out


def _assemble_from_blocks(datum, blocks):
    M = -2.0 * datum.kernel.array
    off = datum.offsets()
    for i, (b, c) in enumerate(zip(blocks, datum.exponents)):
        sl = slice(off[i], off[i + 1])
        M[sl, sl] += c * b
    return M


def _chol_logdet(M):
    """(logdet, inverse) via Cholesky, or None when M is not PD."""
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        return None
    logdet = 2.0 * float(np.log(np.diag(L)).sum())
    Linv = np.linalg.inv(L)
    return logdet, Linv.T @ Linv


def _feasible_start(datum, rng):
    """Wishart-style start pushed strictly inside the feasible region."""
    blocks = [random_spd(rng, n) for n in datum.dims]
    t = _min_feasible_scale(datum, blocks)
    if t > 0:
        blocks = [1.25 * t * b for b in blocks]
    return [np.linalg.eigh(b) for b in blocks], blocks


def _sym_basis(n: int) -> np.ndarray:
    """Orthonormal basis of symmetric n x n matrices, stacked (p, n, n)."""
    mats = []
    for k in range(n):
        e = np.zeros((n, n))
        e[k, k] = 1.0
        mats.append(e)
    r = 1.0 / math.sqrt(2.0)
    for k in range(n):
        for l in range(k + 1, n):
            e = np.zeros((n, n))
            e[k, l] = e[l, k] = r
            mats.append(e)
    return np.stack(mats)


class _BarrierProblem:
    """Barrier subproblem F(A) = -sum c_i logdet A_i + mu logdet M(A).

    Works in per-block symmetric coordinates; provides value, gradient and
    the exact Hessian so a damped Newton step tracks the central path even
    when the barrier weight is tiny.
    """

    def __init__(self, datum: BLDatum):
        self.datum = datum
        self.dims = datum.dims
        self.cs = list(datum.exponents)
        self.off = datum.offsets()
        self.bases = [_sym_basis(n) for n in self.dims]
        self.sizes = [b.shape[0] for b in self.bases]

    def pack(self, blocks):
        return np.concatenate(
            [np.einsum("kab,ab->k", B, b) for B, b in zip(self.bases, blocks)]
        )

    def unpack(self, vec):
        out = []
        k = 0
        for B, p in zip(self.bases, self.sizes):
            out.append(np.einsum("k,kab->ab", vec[k : k + p], B))
            k += p
        return out

    def state(self, vec, mu):
        """(value, blocks, block inverses, M inverse, logdets) or None."""
        blocks = self.unpack(vec)
        ainvs = []
        logdet_a = []
        for a in blocks:
            out = _chol_logdet(a)
            if out is None:
                return None
            ld, ainv = out
            logdet_a.append(ld)
            ainvs.append(ainv)
        M = _assemble_from_blocks(self.datum, blocks)
        out = _chol_logdet(M)
        if out is None:
            return None
        logdet_m, minv = out
        val = -sum(c * ld for c, ld in zip(self.cs, logdet_a)) + mu * logdet_m
        objective = -sum(c * ld for c, ld in zip(self.cs, logdet_a))
        return val, objective, blocks, ainvs, minv

    def gradient(self, ainvs, minv, mu):
        gs = []
        for i, (c, B) in enumerate(zip(self.cs, self.bases)):
            sl = slice(self.off[i], self.off[i + 1])
            g = -c * ainvs[i] + mu * c * minv[sl, sl]
            gs.append(np.einsum("kab,ab->k", B, g))
        return np.concatenate(gs)

    def hessian(self, ainvs, minv, mu):
        P = sum(self.sizes)
        H = np.zeros((P, P))
        idx = np.cumsum([0] + self.sizes)
        for i, (ci, Bi) in enumerate(zip(self.cs, self.bases)):
            si = slice(idx[i], idx[i + 1])
            sli = slice(self.off[i], self.off[i + 1])
            # convex part of the objective
            t = np.einsum("ab,kbc,cd,lda->kl", ainvs[i], Bi, ainvs[i], Bi)
            H[si, si] += ci * t
            for j in range(i, len(self.cs)):
                cj, Bj = self.cs[j], self.bases[j]
                sj = slice(idx[j], idx[j + 1])
                slj = slice(self.off[j], self.off[j + 1])
                zij = minv[sli, slj]
                block = -mu * ci * cj * np.einsum(
                    "ab,kbc,cd,lda->kl", zij.T, Bi, zij, Bj
                )
                H[si, sj] += block
                if j != i:
                    H[sj, si] += block.T
        return H


def _newton_stage(prob, vec, mu, grad_tol, max_steps=60):
    """Damped Newton on one barrier subproblem; returns (vec, objective, gnorm)."""
    st = prob.state(vec, mu)
    if st is None:
        raise Infeasible("infeasible point handed to barrier stage")
    val, objective, blocks, ainvs, minv = st
    g = prob.gradient(ainvs, minv, mu)
    gnorm = float(np.linalg.norm(g))
    for _ in range(max_steps):
        if gnorm <= grad_tol:
            break
        H = prob.hessian(ainvs, minv, mu)
        neg = -H
        tau = 0.0
        scale = float(np.linalg.norm(neg)) + 1.0
        for _damp in range(60):
            try:
                L = np.linalg.cholesky(neg + tau * np.eye(neg.shape[0]))
                break
            except np.linalg.LinAlgError:
                tau = max(2.0 * tau, 1e-12 * scale)
        else:  # pragma: no cover
            break
        d = np.linalg.solve(L.T, np.linalg.solve(L, g))
        slope = float(g @ d)
        if slope <= 0.0:  # numerical breakdown; fall back to gradient
            d = g
            slope = gnorm * gnorm
        t = 1.0
        improved = False
        for _ls in range(60):
            st = prob.state(vec + t * d, mu)
            if st is not None and st[0] >= val + 0.25 * t * slope:
                vec = vec + t * d
                val, objective, blocks, ainvs, minv = st
                improved = True
                break
            t *= 0.5
        if not improved:
            break
        g = prob.gradient(ainvs, minv, mu)
        gnorm = float(np.linalg.norm(g))
    return vec, objective, gnorm


def optimize_kw_constant(
    datum: BLDatum, starts: int = 32, seed: int = 0, cfg: OptimizerConfig | None = None
) -> OptimizationResult:
    """Maximize sum_i c_i*(-log det A_i) over the spectrahedron {M(A) >= 0}.

    Interior log-det barrier with geometrically decreasing weight, followed
    by damped Newton per stage (the subproblem conditioning grows like 1/mu,
    which first-order steps cannot track).  Multistart with deterministic
    seeded initialization; ties resolve to the lowest start index.  Raises
    :class:`Unbounded` when the objective escapes along the barrier path
    (kernel without positive eigenvalue).
    """
    if starts < 1:
        raise InvalidInput("starts must be at least 1")
    cfg = cfg or OptimizerConfig()
    prob = _BarrierProblem(datum)

    def mu_schedule():
        mu = cfg.barrier_init
        while mu > cfg.barrier_final * 1.0000001:
            yield mu
            mu *= 0.5
        yield cfg.barrier_final

    def one_start(idx):
        rng = np.random.default_rng([seed, idx])
        _, blocks = _feasible_start(datum, rng)
        vec = prob.pack(blocks)
        trace = []
        gnorm = np.inf
        objective = -np.inf
        for mu in mu_schedule():
            stage_tol = max(cfg.grad_tol, 1e-4 * mu)
            vec, objective, gnorm = _newton_stage(prob, vec, mu, stage_tol)
            trace.append(objective)
            if objective > cfg.unbounded_threshold:
                return ("unbounded", None, None, None, None)
        return ("ok", vec, objective, gnorm, trace)

    outcomes = run_starts(one_start, starts, threads=cfg.threads)
    if any(o[0] == "unbounded" for o in outcomes):
        raise Unbounded("objective exceeded threshold along the barrier path")

    best = None
    for o in outcomes:
        _, vec, objective, gnorm, trace = o
        if best is None or objective > best[1]:
            best = (vec, objective, gnorm, trace)
    vec, objective, gnorm, trace = best
    arg = GaussianTuple(prob.unpack(vec), "precision")
    residuals = {"grad_norm": gnorm}
    if datum.is_kw_shaped():
        residuals.update(stationarity_residuals(datum, arg))
    converged = bool(gnorm <= cfg.grad_tol)
    return OptimizationResult(
        best_value=objective,
        argopt=arg,
        residuals=residuals,
        starts_used=starts,
        converged=converged,
        trace=trace,
        status="converged" if converged else "max_iterations",
    )


def optimize_inverse_constant(
    datum: BLDatum,
    direction: str = "inf",
    starts: int = 32,
    seed: int = 0,
    cfg: OptimizerConfig | None = None,
) -> OptimizationResult:
    """Extremize the closed-form Gaussian value over PD tuples with M(A) PD.

    ``direction`` selects the infimum or the supremum.  The result's status
    reports whether the extremum was attained at an interior point
    (``attained``), approached along an escaping ray (``asymptotic``), or
    diverges (``unbounded``, supremum near a singular assembled matrix).
    """
    if direction not in ("inf", "sup"):
        raise InvalidInput("direction must be 'inf' or 'sup'")
    if starts < 1:
        raise InvalidInput("starts must be at least 1")
    cfg = cfg or OptimizerConfig()
    dims = datum.dims
    cs = np.asarray(datum.exponents)
    off = datum.offsets()
    sign = -1.0 if direction == "inf" else 1.0
    N = datum.total_dim
    cn = sum(c * n for c, n in zip(datum.exponents, datum.dims))
    log_const = 0.5 * (N - cn) * math.log(2.0 * math.pi)

    def value_grad(vec):
        # sign * log BL(exp(S)); +- to make every run a maximization
        Ss = _unpack(vec, dims)
        As = [expm_sym(s) for s in Ss]
        M = _assemble_from_blocks(datum, As)
        out = _chol_logdet(M)
        if out is None:
            return None
        logdetM, Minv = out
        logbl = log_const + 0.5 * sum(
            c * float(np.trace(s)) for c, s in zip(cs, Ss)
        ) - 0.5 * logdetM
        grads = []
        for i, (s, c) in enumerate(zip(Ss, cs)):
            sl = slice(off[i], off[i + 1])
            g_amb = -0.5 * c * Minv[sl, sl]
            g = dexpm_sym_adjoint(s, g_amb) + 0.5 * c * np.eye(dims[i])
            grads.append(sign * g)
        return sign * logbl, _pack(grads)

    def boundary_gap(vec):
        As = [expm_sym(s) for s in _unpack(vec, dims)]
        M = _assemble_from_blocks(datum, As)
        w = np.linalg.eigvalsh(M)
        return float(w[0] / max(np.linalg.norm(M), 1e-300))

    def one_start(idx):
        rng = np.random.default_rng([seed, idx])
        _, blocks = _feasible_start(datum, rng)
        vec = _pack([fun_sym(b, np.log) for b in blocks])
        vec, val, gnorm, _, hit = bb_maximize(
            value_grad, vec, max_iter=cfg.max_inner, grad_tol=cfg.grad_tol,
            value_cap=cfg.log_unbounded,
        )
        spread = sum(abs(float(np.trace(s))) for s in _unpack(vec, dims))
        if direction == "sup" and (hit or boundary_gap(vec) < 1e-10):
            status = "unbounded"  # divergence at the singular boundary
        elif spread > cfg.divergence_cap:
            status = "asymptotic"
        elif gnorm <= cfg.grad_tol:
            status = "attained"
        else:
            status = "max_iterations"
        return (status, vec, sign * val, gnorm)

    outcomes = run_starts(one_start, starts, threads=cfg.threads)
    better = (lambda a, b: a < b) if direction == "inf" else (lambda a, b: a > b)
    if direction == "sup" and any(o[0] == "unbounded" for o in outcomes):
        return OptimizationResult(
            best_value=float("inf"),
            argopt=None,
            residuals={},
            starts_used=starts,
            converged=False,
            trace=[],
            status="unbounded",
            log_value=float("inf"),
        )
    best = None
    for o in outcomes:
        status, vec, logbl, gnorm = o
        if best is None or better(logbl, best[2]):
            best = (status, vec, logbl, gnorm)
    status, vec, logbl, gnorm = best
    arg = GaussianTuple([expm_sym(s) for s in _unpack(vec, dims)], "precision")
    return OptimizationResult(
        best_value=math.exp(logbl) if abs(logbl) < 700 else (0.0 if logbl < 0 else float("inf")),
        argopt=arg,
        residuals={"grad_norm": gnorm},
        starts_used=starts,
        converged=bool(gnorm <= cfg.grad_tol),
        trace=[logbl],
        status=status,
        log_value=logbl,
    )
