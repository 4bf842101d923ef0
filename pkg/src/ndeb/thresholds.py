"""Security thresholds: information crossover and local-realism bounds.

For a fixed fidelity F the symmetric attack family has one free knob,
the flat amplitude y; the crossover fidelity is the F at which the
eavesdropper's best information over that knob meets the legitimate
channel's.  Below the crossover one-way postprocessing cannot distill
a key, so the crossover is the security border against this attack.

The local-realism bound comes the other way: the visibility threshold
below which the measured correlations admit a local model, converted to
a fidelity through F = (N-1)/N * V + 1/N for the isotropic mixture.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cloner import CloneParams
from .info import i_ab, i_ae

GRID_POINTS = 2001
GOLDEN_TOL = 1e-10
BISECT_STEPS = 60
BRACKET_PAD = 1e-6
FEAS_TOL = 1e-12

# The crossover fidelity decreases with N; in the large-N limit it
# approaches 1/2 while the error-rate threshold approaches 50%.
CROSSOVER_LIMIT_LARGE_N = 0.5

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def y_max(n: int, fidelity: float) -> float:
    """Largest flat amplitude compatible with fidelity F at dimension n."""
    cap = min(fidelity / (n - 1), (1.0 - fidelity) / (n - 1) ** 2)
    return math.sqrt(max(cap, 0.0))


def clone_family_at_fidelity(n: int, fidelity: float, y: float) -> CloneParams:
    """Member of the fixed-fidelity family at flat amplitude y.

    Solves v^2 = F - (N-1) y^2 and x^2 = (1-F)/(N-1) - (N-1) y^2 and
    clamps roundoff-negative squares (never below -1e-12) to zero.
    """
    v2 = fidelity - (n - 1) * y * y
    x2 = (1.0 - fidelity) / (n - 1) - (n - 1) * y * y
    if v2 < -FEAS_TOL or x2 < -FEAS_TOL:
        raise ValueError(
            f"y={y} is infeasible at fidelity {fidelity} (v^2={v2}, x^2={x2})"
        )
    return CloneParams(n, math.sqrt(max(v2, 0.0)), math.sqrt(max(x2, 0.0)), y)


def _eve_info_curve(n: int, fidelity: float, ys: np.ndarray) -> np.ndarray:
    """Vectorized eavesdropper information along the fixed-fidelity family."""
    ys = np.asarray(ys, dtype=float)
    v2 = np.clip(fidelity - (n - 1) * ys ** 2, 0.0, None)
    x2 = np.clip((1.0 - fidelity) / (n - 1) - (n - 1) * ys ** 2, 0.0, None)
    v = np.sqrt(v2)
    x = np.sqrt(x2)
    f_row = v2 + (n - 1) * ys ** 2
    d_row = x2 + (n - 1) * ys ** 2

    def branch_entropy(lead: np.ndarray, off: np.ndarray, weight: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            p_lead = np.where(weight > 0, lead ** 2 / (n * weight), 0.0)
            p_off = np.where(weight > 0, off ** 2 / (n * weight), 0.0)
        h = np.zeros_like(p_lead)
        mask = p_lead > 0
        h[mask] -= p_lead[mask] * np.log2(p_lead[mask])
        mask = p_off > 0
        h[mask] -= (n - 1) * p_off[mask] * np.log2(p_off[mask])
        return h

    h_f = branch_entropy(v + (n - 1) * ys, np.abs(v - ys), f_row)
    h_d = branch_entropy(x + (n - 1) * ys, np.abs(x - ys), d_row)
    return math.log2(n) - (f_row * h_f + (n - 1) * d_row * h_d)


def max_eve_info(n: int, fidelity: float) -> tuple[CloneParams, float]:
    """Best attack at fixed fidelity: (optimal params, eavesdropper bits).

    A 2001-point grid over y in [0, y_max] locates the peak; a
    golden-section pass narrows the bracket to width 1e-10.  Ties go to
    the smaller y.
    """
    if not 1.0 / n <= fidelity <= 1.0:
        raise ValueError(f"fidelity must lie in [1/{n}, 1], got {fidelity}")
    cap = y_max(n, fidelity)
    ys = np.linspace(0.0, cap, GRID_POINTS)
    vals = _eve_info_curve(n, fidelity, ys)
    best = int(np.argmax(vals))  # first max = smallest y on ties
    lo = ys[max(best - 1, 0)]
    hi = ys[min(best + 1, GRID_POINTS - 1)]

    def f(yv: float) -> float:
        return float(_eve_info_curve(n, fidelity, np.array([yv]))[0])

    a, b = lo, hi
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > GOLDEN_TOL:
        if fc >= fd:  # keep the left segment on ties
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = f(d)
    y_best = 0.5 * (a + b)
    params = clone_family_at_fidelity(n, fidelity, y_best)
    return params, f(y_best)


def _bisect(g, lo: float, hi: float, steps: int = BISECT_STEPS) -> float:
    """Root of g by bisection; g(lo) and g(hi) must straddle zero."""
    g_lo, g_hi = g(lo), g(hi)
    if not (g_lo < 0.0 < g_hi):
        raise RuntimeError(
            f"bisection bracket failure: g({lo})={g_lo}, g({hi})={g_hi}"
        )
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def visibility_threshold(n: int) -> float:
    """Visibility below which the protocol correlations admit a local model.

    N^2 / V = sum_{k=0}^{floor(N/2)-1} (1 - 2k/(N-1)) *
              (1/sin^2(pi(4k+1)/4N) - 1/sin^2(pi(4k+3)/4N))
    """
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    total = 0.0
    for k in range(n // 2):
        weight = 1.0 - 2.0 * k / (n - 1)
        total += weight * (
            1.0 / math.sin(math.pi * (4 * k + 1) / (4 * n)) ** 2
            - 1.0 / math.sin(math.pi * (4 * k + 3) / (4 * n)) ** 2
        )
    return n * n / total


def fidelity_threshold(n: int) -> float:
    """Fidelity of the isotropic mixture at the local-realism visibility."""
    return (n - 1) / n * visibility_threshold(n) + 1.0 / n


@dataclass(frozen=True)
class ThresholdRecord:
    """Security summary for one dimension."""

    n: int
    f_a: float  # crossover fidelity of the optimal attack
    v: float
    x: float
    y: float
    v_thr: float  # local-realism visibility threshold
    f_thr: float  # same threshold expressed as fidelity
    secure_iff_nonlocal: bool  # f_thr >= f_a - 1e-6


def crossover_fidelity(n: int) -> ThresholdRecord:
    """Fidelity where the legitimate information meets the best attack's.

    Bisection of g(F) = i_ab(F) - max_eve_info(F) over
    [1/N + 1e-6, 1 - 1e-6]; 60 steps pin F down to ~1e-18 of bracket,
    comfortably inside the 1e-5 target.
    """
    n = int(n)
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")

    def g(fid: float) -> float:
        legit = i_ab(clone_family_at_fidelity(n, fid, 0.0))
        return legit - max_eve_info(n, fid)[1]

    f_a = _bisect(g, 1.0 / n + BRACKET_PAD, 1.0 - BRACKET_PAD)
    params, _ = max_eve_info(n, f_a)
    v_thr = visibility_threshold(n)
    f_thr = fidelity_threshold(n)
    return ThresholdRecord(
        n=n,
        f_a=f_a,
        v=params.v,
        x=params.x,
        y=params.y,
        v_thr=v_thr,
        f_thr=f_thr,
        secure_iff_nonlocal=bool(f_thr >= f_a - 1e-6),
    )


def security_report(n_min: int, n_max: int) -> list[ThresholdRecord]:
    """Threshold records for every dimension in [n_min, n_max]."""
    if not 2 <= n_min <= n_max:
        raise ValueError(f"need 2 <= n_min <= n_max, got {n_min}..{n_max}")
    return [crossover_fidelity(n) for n in range(n_min, n_max + 1)]


if __name__ == "__main__":
    for rec in security_report(2, 10):
        print(
            f"N={rec.n:2d}  F_A={rec.f_a:.6f}  1-F_thr={1 - rec.f_thr:.4%}  "
            f"nonlocal-sufficient={rec.secure_iff_nonlocal}"
        )
