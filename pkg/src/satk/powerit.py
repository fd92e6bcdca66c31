"""Numerically stable matrix powers, |A^n|^(1/n), Yamamoto limits, and vector growth rates.

Two representations are used depending on the dynamic range of A^n:

* a single scaled matrix ``exp(log_scale) * unit`` (binary exponentiation),
  exact while the singular spread of ``unit`` stays inside float range;
* a QR-accumulation flag run (one orthonormalization per multiply), whose
  per-direction log-magnitudes never overflow and resolve singular directions
  far below the float underflow threshold.

The second is required for n in the thousands: the smallest singular values of
A^n then lie hundreds of orders of magnitude below the largest and cannot be
carried by any single float64 matrix.
"""

from __future__ import annotations

import time
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import IllConditioned, InvalidInput

# Exact (single scaled matrix) path is trusted while the singular spread of the
# unit matrix stays above this, keeping small singulars clear of the SVD noise
# floor eps * sigma_max.
_EXACT_SPREAD_FLOOR = 1e-12
_EXACT_N_MAX = 64
_COEFF_TOL = 1e-6


@dataclass(frozen=True)
class ScaledPower:
    """A^n = exp(log_scale) * unit with ||unit||_2 = 1 (or the zero matrix)."""

    unit: np.ndarray
    log_scale: float
    is_zero: bool = False

    def to_matrix(self) -> np.ndarray:
        if self.is_zero:
            return np.zeros_like(self.unit)
        if self.log_scale > 700.0:
            raise OverflowError("scaled power exceeds float range")
        return np.exp(self.log_scale) * self.unit

    def log_norm(self) -> float:
        if self.is_zero:
            return -np.inf
        return self.log_scale + float(np.log(linalg.norm2(self.unit)))


@dataclass(frozen=True)
class ConvergenceReport:
    schedule: tuple
    errors: tuple
    estimated_rate: float
    converged: bool
    wall_time: float


def scaled_power(a, n: int) -> ScaledPower:
    """A^n by binary exponentiation, renormalized to unit spectral norm per multiply."""
    a = linalg.as_matrix(a)
    if n < 1 or int(n) != n:
        raise InvalidInput(f"n must be a positive integer, got {n}")
    n = int(n)
    m = a.shape[0]

    def normalized(x, log):
        s = linalg.norm2(x)
        if s == 0.0:
            return None
        return x / s, log + np.log(s)

    base = normalized(a, 0.0)
    acc = (np.eye(m, dtype=np.complex128), 0.0)
    while n:
        if base is None:
            acc = None
            break
        if n & 1:
            acc = normalized(acc[0] @ base[0], acc[1] + base[1])
            if acc is None:
                break
        n >>= 1
        if n:
            base = normalized(base[0] @ base[0], 2.0 * base[1])
    if acc is None:
        return ScaledPower(unit=np.zeros_like(a), log_scale=0.0, is_zero=True)
    return ScaledPower(unit=acc[0], log_scale=float(acc[1]))


def brute_force_power(a, n: int) -> np.ndarray:
    """Plain repeated multiplication, the independent oracle for small n."""
    a = linalg.as_matrix(a)
    if n < 1 or int(n) != n:
        raise InvalidInput(f"n must be a positive integer, got {n}")
    if n > 64:
        raise InvalidInput("brute force is limited to n <= 64")
    out = a.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(int(n) - 1):
            out = out @ a
            if not np.all(np.isfinite(out.view(np.float64))):
                raise OverflowError(f"entries overflowed at power {n}")
    return out


# --- QR-accumulation flag runs ------------------------------------------------

_flag_cache: OrderedDict = OrderedDict()
_FLAG_CACHE_MAX = 64


def _flag_step(a, q, logs):
    b = a @ q
    q, r = np.linalg.qr(b)
    with np.errstate(divide="ignore"):
        logs = logs + np.log(np.abs(np.diag(r)))
    return q, logs


def _flag_run(a, n: int):
    """n multiply-and-orthonormalize steps: a^n = Q T with log|T_jj| = logs[j].

    Returns (q, logs, tail_window, tail_logs): the tail quantities cover the
    final quarter of the run, after the flag has aligned, so tail_logs / window
    estimates asymptotic per-step rates free of the alignment transient.
    """
    key = (a.tobytes(), a.shape[0], n)
    hit = _flag_cache.get(key)
    if hit is not None:
        _flag_cache.move_to_end(key)
        return hit
    m = a.shape[0]
    q = np.eye(m, dtype=np.complex128)
    logs = np.zeros(m)
    window = max(1, n // 4)
    snapshot = logs
    for step in range(n):
        if step == n - window:
            snapshot = logs
        q, logs = _flag_step(a, q, logs)
    with np.errstate(invalid="ignore"):
        tail = logs - snapshot
    tail[np.isneginf(logs)] = -np.inf
    out = (q, logs, window, np.nan_to_num(tail, nan=-np.inf, posinf=-np.inf))
    _flag_cache[key] = out
    if len(_flag_cache) > _FLAG_CACHE_MAX:
        _flag_cache.popitem(last=False)
    return out


def _right_flag(a, n: int):
    """Flag run on A*: columns approximate right singular directions of A^n,
    logs[j]/n their log singular exponents."""
    return _flag_run(np.ascontiguousarray(a.conj().T), n)


def _tail_levels(window, tail_logs):
    """Asymptotic per-step growth factors from a converged flag tail."""
    with np.errstate(invalid="ignore"):
        levels = np.exp(tail_logs / window)
    return np.nan_to_num(levels, nan=0.0, posinf=0.0)


def _use_exact_path(sp: ScaledPower, n: int) -> bool:
    if n <= _EXACT_N_MAX:
        return True
    s = np.linalg.svd(sp.unit, compute_uv=False)
    return s[-1] >= _EXACT_SPREAD_FLOOR * s[0]


def normalized_power(a, n: int) -> np.ndarray:
    """|A^n|^(1/n) as a PSD matrix."""
    a = linalg.as_matrix(a)
    if n < 1 or int(n) != n:
        raise InvalidInput(f"n must be a positive integer, got {n}")
    n = int(n)
    sp = scaled_power(a, n)
    if sp.is_zero:
        return np.zeros_like(a)
    if _use_exact_path(sp, n):
        u, s, vh = np.linalg.svd(sp.unit)
        roots = np.exp(sp.log_scale / n) * s ** (1.0 / n)
        out = vh.conj().T @ (roots[:, None] * vh)
    else:
        # Asymptotic regime: reconstruct from the converged flag with
        # tail-window rates, which drop the alignment transient of the
        # first few hundred steps.
        q, _, window, tail = _right_flag(a, n)
        roots = _tail_levels(window, tail)
        out = (q * roots) @ q.conj().T
    return 0.5 * (out + out.conj().T)


def yamamoto_limits(a, n: int) -> np.ndarray:
    """(s_1(A^n)^(1/n), ..., s_m(A^n)^(1/n)), descending; zero singulars map to 0."""
    a = linalg.as_matrix(a)
    if n < 1 or int(n) != n:
        raise InvalidInput(f"n must be a positive integer, got {n}")
    n = int(n)
    sp = scaled_power(a, n)
    if sp.is_zero:
        return np.zeros(a.shape[0])
    if _use_exact_path(sp, n):
        s = np.linalg.svd(sp.unit, compute_uv=False)
        vals = np.exp(sp.log_scale / n) * s ** (1.0 / n)
        vals[s == 0.0] = 0.0
    else:
        _, _, window, tail = _right_flag(a, n)
        vals = np.sort(_tail_levels(window, tail))[::-1]
    return vals


def vector_exponent_estimates(a, xs, n: int, coeff_tol: float = _COEFF_TOL) -> np.ndarray:
    """Growth exponents lim ||A^n x||^(1/n) for a batch of vectors (columns of xs)."""
    a = linalg.as_matrix(a)
    if n < 1 or int(n) != n:
        raise InvalidInput(f"n must be a positive integer, got {n}")
    n = int(n)
    xs = np.asarray(xs, dtype=np.complex128)
    if xs.ndim == 1:
        xs = xs[:, None]
    if xs.shape[0] != a.shape[0]:
        raise InvalidInput("vector dimension mismatch")
    norms = np.linalg.norm(xs, axis=0)
    out = np.zeros(xs.shape[1])
    live = norms > 0.0

    if n <= 128:
        # Direct renormalized iteration; trustworthy before roundoff seeds the
        # fastest direction.
        v = np.where(live, xs / np.where(live, norms, 1.0), 0.0)
        logsum = np.zeros(xs.shape[1])
        for _ in range(n):
            v = a @ v
            step = np.linalg.norm(v, axis=0)
            live = live & (step > 0.0)
            with np.errstate(divide="ignore"):
                logsum = np.where(live, logsum + np.log(np.where(step > 0, step, 1.0)), -np.inf)
            v = np.where(live, v / np.where(step > 0, step, 1.0), 0.0)
        out[:] = np.where(np.isfinite(logsum), np.exp(logsum / n), 0.0)
        out[norms == 0.0] = 0.0
        return out

    # Large n: read the exponent off the converged right singular flag.  The
    # direct iterate is useless here; rounding noise in the fastest direction
    # overtakes any sub-dominant vector long before n of this size.  Levels
    # come from the tail window so the alignment transient does not bias them.
    q, _, window, tail = _right_flag(a, n)
    level = _tail_levels(window, tail)
    coeff = np.abs(q.conj().T @ xs)
    for j in range(xs.shape[1]):
        if norms[j] == 0.0:
            continue
        significant = coeff[:, j] > coeff_tol * norms[j]
        out[j] = float(level[significant].max()) if np.any(significant) else 0.0
    return out


def vector_exponent_estimate(a, x, n: int, coeff_tol: float = _COEFF_TOL) -> float:
    """Growth exponent lim ||A^n x||^(1/n) for one vector; 0 for x = 0 or a dead orbit."""
    return float(vector_exponent_estimates(a, np.asarray(x), n, coeff_tol)[0])


def convergence_study(a, schedule, limit_matrix, target: float = 1e-3) -> ConvergenceReport:
    """Errors ||A^n|^(1/n) - K|| over a schedule, with a log-error tail slope."""
    schedule = [int(n) for n in schedule]
    if not schedule or any(b <= a_ for a_, b in zip(schedule, schedule[1:])):
        raise InvalidInput("schedule must be nonempty and strictly increasing")
    k = np.asarray(limit_matrix, dtype=np.complex128)
    t0 = time.perf_counter()
    errors = [float(linalg.norm2(normalized_power(a, n) - k)) for n in schedule]
    wall = time.perf_counter() - t0
    tail = max(2, len(schedule) // 2)
    ns = np.array(schedule[-tail:], dtype=float)
    logs = np.log(np.maximum(errors[-tail:], 1e-300))
    rate = float(np.polyfit(ns, logs, 1)[0]) if len(ns) >= 2 else 0.0
    return ConvergenceReport(
        schedule=tuple(schedule),
        errors=tuple(errors),
        estimated_rate=rate,
        converged=errors[-1] <= target,
        wall_time=wall,
    )


def similarity_equivalence_check(t, s, n: int) -> float:
    """|| |(S^-1 T S)^n|^(1/n) - (S* (T^n)* T^n S)^(1/2n) ||, all in scaled form."""
    t = linalg.as_matrix(t)
    s = linalg.as_matrix(s)
    if n < 1 or int(n) != n:
        raise InvalidInput(f"n must be a positive integer, got {n}")
    n = int(n)
    cond = np.linalg.cond(s)
    if not np.isfinite(cond) or cond > 1e8:
        raise IllConditioned("similarity matrix is too ill-conditioned", residual=float(cond))
    side1 = normalized_power(np.linalg.solve(s, t @ s), n)

    sp = scaled_power(t, n)
    if sp.is_zero:
        side2 = np.zeros_like(t)
    else:
        b = sp.unit @ s
        sv = np.linalg.svd(b, compute_uv=False)
        if n <= _EXACT_N_MAX or sv[-1] >= _EXACT_SPREAD_FLOOR * sv[0]:
            gram = b.conj().T @ b
            side2 = np.exp(sp.log_scale / n) * linalg.psd_power(gram, 1.0 / (2 * n))
        else:
            # Flag run for T^n S: n steps of T*, then one of S* to rotate the
            # basis; the bounded S factor does not move the asymptotic rates.
            q, logs, window, tail = _right_flag(t, n)
            q, _ = _flag_step(s.conj().T, q, logs)
            roots = _tail_levels(window, tail)
            side2 = (q * roots) @ q.conj().T
            side2 = 0.5 * (side2 + side2.conj().T)
    return float(linalg.norm2(side1 - side2))
