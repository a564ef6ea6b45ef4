"""Piecewise cubic polynomials with a constant left tail.

These carry the prescribed data of the nonlocal problems: finitely many
breakpoints, per-piece polynomial coefficients of degree <= 3, and a
constant value on (-inf, first breakpoint]. Construction verifies
continuity across every breakpoint; derivatives are evaluated piecewise
with the right-hand piece used at breakpoints.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["PiecewisePoly", "stable_power_difference"]

_CONTINUITY_TOL = 1e-12
MAX_DEGREE = 3


def stable_power_difference(hi: float, lo: float, p: float) -> float:
    """hi**p - lo**p for hi >= lo >= 0 without subtractive cancellation."""
    if lo == 0.0:
        return hi**p if hi > 0.0 else 0.0
    ratio = (hi - lo) / lo
    if ratio > 0.5:  # no cancellation to fight; the expm1 form can overflow here
        return hi**p - lo**p
    return lo**p * math.expm1(p * math.log1p(ratio))


class PiecewisePoly:
    """Piecewise polynomial of degree <= 3, constant on the left tail.

    Parameters
    ----------
    breakpoints : array_like, shape (M+1,)
        Strictly increasing. Piece j lives on [breakpoints[j], breakpoints[j+1]].
    coeffs : array_like, shape (M, d) with d <= 4
        coeffs[j, k] multiplies (x - breakpoints[j])**k on piece j.
    left_tail : float, optional
        Value on (-inf, breakpoints[0]]; defaults to the value of piece 0 at
        its left endpoint. If given it must match that value to 1e-12.
    """

    def __init__(self, breakpoints, coeffs, left_tail: float | None = None):
        bp = np.asarray(breakpoints, dtype=float)
        if bp.ndim != 1 or bp.size < 2:
            raise ValueError("need at least two breakpoints")
        if np.any(np.diff(bp) <= 0.0):
            raise ValueError("breakpoints must be strictly increasing")
        rows = [np.atleast_1d(np.asarray(row, dtype=float)) for row in coeffs]
        if len(rows) != bp.size - 1:
            raise ValueError("one coefficient row per piece required")
        if any(row.size > MAX_DEGREE + 1 for row in rows):
            raise ValueError(f"piece degree must be <= {MAX_DEGREE}")
        full = np.zeros((len(rows), MAX_DEGREE + 1))
        for j, row in enumerate(rows):
            full[j, : row.size] = row
        self.breakpoints = bp
        self.coeffs = full
        value0 = float(full[0, 0])
        self.left_tail = value0 if left_tail is None else float(left_tail)

        scale = max(1.0, float(np.max(np.abs(full))))
        if abs(self.left_tail - value0) > _CONTINUITY_TOL * scale:
            raise ValueError("left tail does not match the first piece value")
        for j in range(full.shape[0] - 1):
            w = bp[j + 1] - bp[j]
            left_val = full[j] @ w ** np.arange(4)
            right_val = full[j + 1, 0]
            if abs(left_val - right_val) > _CONTINUITY_TOL * scale:
                raise ValueError(
                    f"discontinuity {left_val - right_val:.3e} at breakpoint {bp[j + 1]}"
                )

    # -- constructors ----------------------------------------------------

    @classmethod
    def single(cls, coeffs, lo: float, hi: float) -> "PiecewisePoly":
        """One piece on [lo, hi] with coefficients about lo."""
        return cls([lo, hi], [list(coeffs)])

    @classmethod
    def constant(cls, value: float, lo: float, hi: float) -> "PiecewisePoly":
        return cls.single([value], lo, hi)

    # -- evaluation -------------------------------------------------------

    @property
    def lo(self) -> float:
        return float(self.breakpoints[0])

    @property
    def hi(self) -> float:
        return float(self.breakpoints[-1])

    def _piece_index(self, x: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        return np.clip(idx, 0, self.coeffs.shape[0] - 1)

    def value(self, x):
        """Evaluate at x (scalar or array); x beyond the last breakpoint is rejected."""
        xa = np.asarray(x, dtype=float)
        span = self.hi - self.lo
        if np.any(xa > self.hi + 1e-12 * span):
            raise ValueError("evaluation beyond the last breakpoint")
        xa = np.minimum(xa, self.hi)
        idx = self._piece_index(xa)
        dx = xa - self.breakpoints[idx]
        c = self.coeffs[idx]
        out = ((c[..., 3] * dx + c[..., 2]) * dx + c[..., 1]) * dx + c[..., 0]
        out = np.where(xa <= self.lo, self.left_tail, out)
        return out if isinstance(x, np.ndarray) else float(out)

    def derivative_value(self, x):
        """Piecewise derivative; zero on the left tail, right-piece at breakpoints."""
        xa = np.asarray(x, dtype=float)
        xa = np.minimum(xa, self.hi)
        idx = self._piece_index(xa)
        dx = xa - self.breakpoints[idx]
        c = self.coeffs[idx]
        out = (3.0 * c[..., 3] * dx + 2.0 * c[..., 2]) * dx + c[..., 1]
        out = np.where(xa < self.lo, 0.0, out)
        return out if isinstance(x, np.ndarray) else float(out)

    def derivative_pieces(self):
        """Yield (tau_lo, tau_hi, dcoeffs) of the derivative on each piece."""
        k = np.arange(1, MAX_DEGREE + 1)
        for j in range(self.coeffs.shape[0]):
            yield (
                float(self.breakpoints[j]),
                float(self.breakpoints[j + 1]),
                self.coeffs[j, 1:] * k,
            )

    # -- algebra (for linearity checks) ------------------------------------

    def _rebased(self, breakpoints: np.ndarray) -> np.ndarray:
        """Coefficient rows of self on the given refinement of its breakpoints."""
        out = np.zeros((breakpoints.size - 1, MAX_DEGREE + 1))
        for j in range(breakpoints.size - 1):
            tau = breakpoints[j]
            src = int(np.clip(np.searchsorted(self.breakpoints, tau, "right") - 1, 0, self.coeffs.shape[0] - 1))
            h = tau - self.breakpoints[src]
            c = self.coeffs[src]
            # shift basis (x - tau_src)^k -> powers of (x - tau)
            for k in range(MAX_DEGREE + 1):
                for r in range(k + 1):
                    out[j, r] += c[k] * math.comb(k, r) * h ** (k - r)
        return out

    def __add__(self, other: "PiecewisePoly") -> "PiecewisePoly":
        if not isinstance(other, PiecewisePoly):
            return NotImplemented
        if abs(self.lo - other.lo) > 0 or abs(self.hi - other.hi) > 0:
            raise ValueError("can only add piecewise polynomials on the same interval")
        bp = np.union1d(self.breakpoints, other.breakpoints)
        return PiecewisePoly(bp, self._rebased(bp) + other._rebased(bp),
                             self.left_tail + other.left_tail)

    def __mul__(self, alpha: float) -> "PiecewisePoly":
        return PiecewisePoly(self.breakpoints, self.coeffs * alpha, self.left_tail * alpha)

    __rmul__ = __mul__
