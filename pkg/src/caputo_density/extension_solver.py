"""Solve D_a^s u = 0 on (b, inf) with prescribed causal data on (-inf, b].

The problem is equivalent to the integro-differential equation

    int_b^x u'(t) (x-t)^(-s) dt = g(x) := -int_a^b phi'(t) (x-t)^(-s) dt,

whose unique solution with u(b) = phi(b) is

    u(x) = phi(b) + (sin(pi s)/pi) int_b^x g(t) (x-t)^(s-1) dt.

For piecewise-polynomial data every g^(i) is a finite sum of power-law
terms c * (x-b)^j * (x-tau)^p, computed exactly here. The terms that are
pure powers of (x-b) carry the junction branch xi^(k+1-s); integrating
them against the kernel gives an exact polynomial in (x-b), and what
remains of g is analytic at b. The solution therefore splits as

    u(b + xi) = phi(b) + P(xi) + xi^s * H_0(xi),

with P a closed-form polynomial and H_0 analytic on [0, inf). Each
derivative order n has the same structure with its own analytic factor
H_n, tabulated once as paneled Chebyshev series and evaluated there-
after at interpolation cost. Direct quadrature paths are kept for the
representation-formula contract shape and for cross-checks.
"""

from __future__ import annotations

import math

import numpy as np

from .piecewise import MAX_DEGREE
from .profiles import CausalProfile
from .singular_quadrature import (
    GradedMesh,
    gauss_ladder,
    integrate_singular,
    poly_abel_integral,
)
from .special_functions import FractionalOrder, beta, gamma

__all__ = [
    "ExtensionSolution",
    "solve_extension",
    "compute_g",
    "extension_derivative",
    "JunctionProximityError",
    "MAX_DERIVATIVE_ORDER",
]

MAX_DERIVATIVE_ORDER = 8
_JUNCTION_GUARD = 1e-3


class JunctionProximityError(ValueError):
    """Raised when a derivative is requested too close to the junction b."""


def _falling(z: float, n: int) -> float:
    """z (z-1) ... (z-n+1); empty product for n <= 0."""
    out = 1.0
    for q in range(n):
        out *= z - q
    return out


def _ctilde(s: float, n: int, i: int) -> float:
    """Boundary-sum coefficients of the n-th interior derivative.

    (s-1)(s-2)...(s-n+i+1) for i < n-1, and 1 for i = n-1.
    """
    out = 1.0
    for q in range(1, n - i):
        out *= s - q
    return out


class _Forcing:
    """Closed-form power-law representation of g and all its derivatives."""

    def __init__(self, profile: CausalProfile, s: FractionalOrder):
        self.profile = profile
        self.s = s
        self._orders: dict[int, tuple[np.ndarray, ...]] = {}

    def _build(self, i: int) -> tuple[np.ndarray, ...]:
        s = self.s.s
        b = self.profile.b
        e = -s - i
        scalar = -_falling(-s, i)  # -(-s)(-s-1)...(-s-i+1); -1 for i = 0
        mixed: dict[tuple[int, float, float], float] = {}
        pure: dict[float, float] = {}

        def add_mixed(coef, jpow, dtau, pw):
            key = (jpow, dtau, pw)
            mixed[key] = mixed.get(key, 0.0) + coef

        def add_pure(coef, qpow):
            pure[qpow] = pure.get(qpow, 0.0) + coef

        for tau_lo, tau_hi, dcoeffs in self.profile.derivative_pieces():
            if not np.any(dcoeffs):
                continue
            # rebase the piece polynomial about b
            shift = b - tau_lo
            p_hat = np.zeros(MAX_DEGREE + 1)
            for kk in range(dcoeffs.size):
                if dcoeffs[kk] == 0.0:
                    continue
                for k in range(kk + 1):
                    p_hat[k] += dcoeffs[kk] * math.comb(kk, k) * shift ** (kk - k)
            for k in range(MAX_DEGREE + 1):
                if p_hat[k] == 0.0:
                    continue
                for r in range(k + 1):
                    pw = r + e + 1.0
                    cc = scalar * p_hat[k] * math.comb(k, r) * (-1.0) ** r / pw
                    add_mixed(cc, k - r, b - tau_lo, pw)
                    if tau_hi == b:
                        add_pure(-cc, k + e + 1.0)
                    else:
                        add_mixed(-cc, k - r, b - tau_hi, pw)

        m_items = sorted(mixed.items())
        p_items = sorted(pure.items())
        m_coef = np.array([c for _, c in m_items])
        m_jpow = np.array([key[0] for key, _ in m_items], dtype=float)
        m_dtau = np.array([key[1] for key, _ in m_items])
        m_pw = np.array([key[2] for key, _ in m_items])
        p_coef = np.array([c for _, c in p_items])
        p_pow = np.array([q for q, _ in p_items])
        return m_coef, m_jpow, m_dtau, m_pw, p_coef, p_pow

    def _terms(self, i: int):
        if i not in self._orders:
            self._orders[i] = self._build(i)
        return self._orders[i]

    def regular_part(self, i: int, xi):
        """G_reg^(i)(b + xi): the part of g^(i) analytic at the junction."""
        m_coef, m_jpow, m_dtau, m_pw, _, _ = self._terms(i)
        xi = np.asarray(xi, dtype=float)
        out = np.zeros_like(xi)
        for c, j, d, p in zip(m_coef, m_jpow, m_dtau, m_pw):
            out += c * xi**j * (xi + d) ** p
        return out

    def singular_part(self, i: int, xi):
        """The junction branch of g^(i): a sum of pure (x-b) powers."""
        _, _, _, _, p_coef, p_pow = self._terms(i)
        xi = np.asarray(xi, dtype=float)
        out = np.zeros_like(xi)
        for c, q in zip(p_coef, p_pow):
            out += c * xi**q
        return out

    def value(self, i: int, xi):
        """g^(i)(b + xi) for xi >= 0 (xi > 0 when i >= 1 and the branch is present)."""
        return self.regular_part(i, xi) + self.singular_part(i, xi)

    def regular_at_b(self, i: int) -> float:
        """G_reg^(i)(b)."""
        m_coef, m_jpow, m_dtau, m_pw, _, _ = self._terms(i)
        if m_coef.size == 0:
            return 0.0
        at0 = np.where(m_jpow == 0, m_coef * m_dtau**m_pw, 0.0)
        return float(np.sum(at0))

    def junction_alphas(self) -> dict[int, float]:
        """Coefficients alpha_k of the branch terms alpha_k (x-b)^(k+1-s) in g."""
        _, _, _, _, p_coef, p_pow = self._terms(0)
        s = self.s.s
        out: dict[int, float] = {}
        for c, q in zip(p_coef, p_pow):
            k = round(q - 1.0 + s)
            out[k] = out.get(k, 0.0) + float(c)
        return out


class ExtensionSolution:
    """A solved extension: data on (-inf, b], stationary solution on (b, inf).

    Immutable after construction; the Chebyshev tables for value and first
    derivative are built eagerly, higher orders on first use. Evaluators
    are reentrant and safely shareable across threads.
    """

    def __init__(
        self,
        profile: CausalProfile,
        s: FractionalOrder | float,
        *,
        panels: int = 256,
        grade: float | None = None,
        x_max: float | None = None,
        cheb_points: int = 40,
    ):
        self.profile = profile
        self.s = FractionalOrder.of(s)
        self.a = profile.a
        self.b = profile.b
        self.value_at_b = profile.value_at_b
        self.panels = int(panels)
        self.grade = grade
        self._cheb_points = int(cheb_points)
        self.forcing = _Forcing(profile, self.s)

        bp = profile.data.breakpoints
        self._branch_gap = float(self.b - bp[-2])
        sf = self.s.sin_factor
        s_ = self.s.s
        alphas = self.forcing.junction_alphas()
        poly = np.zeros(MAX_DEGREE + 2)
        for k, alpha in alphas.items():
            poly[k + 1] = sf * alpha * beta(k + 2.0 - s_, s_)
        self._poly = poly  # ascending coefficients in xi = x - b, no constant term

        if x_max is None:
            x_max = self.b + 10.0 * (self.b - self.a)
        self._edges = self._edge_ladder(max(float(x_max) - self.b, self._branch_gap))
        self._tables: dict[int, np.ndarray] = {}
        for n in (0, 1):
            self._table(n)

    # -- forcing ---------------------------------------------------------

    def g_value(self, x, order: int = 0):
        """g^(order)(x) for x >= b, in closed form."""
        xa = np.asarray(x, dtype=float)
        if np.any(xa < self.b):
            raise ValueError("g is defined on [b, infinity)")
        out = self.forcing.value(order, xa - self.b)
        return out if isinstance(x, np.ndarray) else float(out)

    # -- table construction ------------------------------------------------

    def _edge_ladder(self, xi_max: float) -> np.ndarray:
        r0 = 0.5 * self._branch_gap
        edges = [0.0]
        w = min(r0, xi_max)
        while edges[-1] + w < xi_max:
            edges.append(edges[-1] + w)
            w *= 2.0
        edges.append(xi_max)
        return np.asarray(edges)

    def _smooth_factor_quad(self, n: int, xi: float) -> float:
        """H_n(xi) by direct quadrature: the analytic factor of the n-th derivative.

        u^(n)(b+xi) = P^(n)(xi) + xi^(s-n) H_n(xi), with

        H_n(xi) = (sin pi s/pi) [ xi^n int_0^1 G_reg^(n)(b + xi w)(1-w)^(s-1) dw
                                  + sum_{i<n} ctilde_{s,i} G_reg^(i)(b) xi^i ].
        """
        s = self.s.s
        sf = self.s.sin_factor
        boundary = 0.0
        for i in range(n):
            boundary += _ctilde(s, n, i) * self.forcing.regular_at_b(i) * xi**i
        if xi == 0.0:
            if n == 0:
                return sf * self.forcing.regular_at_b(0) / s
            return sf * boundary  # only the i = 0 term survives
        d0 = self._branch_gap / xi

        def integrand_left(w):
            return self.forcing.regular_part(n, xi * w) * (1.0 - w) ** (s - 1.0)

        left = gauss_ladder(integrand_left, 0.0, 0.5, 0.5 * min(d0, 0.5))
        right = integrate_singular(
            lambda w: self.forcing.regular_part(n, xi * w), 0.5, 1.0, s - 1.0, "right", n=160
        )
        return sf * (xi**n * (left + right) + boundary)

    def _build_panels(self, n: int, edges_lo: np.ndarray, edges_hi: np.ndarray) -> np.ndarray:
        npts = self._cheb_points
        ref = np.polynomial.chebyshev.chebpts2(npts)
        coefs = np.empty((edges_lo.size, npts))
        for p, (e0, e1) in enumerate(zip(edges_lo, edges_hi)):
            xs = 0.5 * (e0 + e1) + 0.5 * (e1 - e0) * ref
            vals = [self._smooth_factor_quad(n, float(x)) for x in xs]
            coefs[p] = np.polynomial.chebyshev.chebfit(ref, vals, npts - 1)
        return coefs

    def _table(self, n: int) -> np.ndarray:
        if n not in self._tables:
            if n > MAX_DERIVATIVE_ORDER:
                raise ValueError(f"derivative order {n} unsupported (cap {MAX_DERIVATIVE_ORDER})")
            self._tables[n] = self._build_panels(n, self._edges[:-1], self._edges[1:])
        return self._tables[n]

    def _ensure_coverage(self, xi_max_needed: float) -> None:
        if xi_max_needed <= self._edges[-1]:
            return
        new_edges = [self._edges[-1]]
        w = self._edges[-1] - self._edges[-2]
        while new_edges[-1] < xi_max_needed:
            w *= 2.0
            new_edges.append(new_edges[-1] + w)
        lo = np.asarray(new_edges[:-1])
        hi = np.asarray(new_edges[1:])
        for n in list(self._tables):
            self._tables[n] = np.vstack([self._tables[n], self._build_panels(n, lo, hi)])
        self._edges = np.concatenate([self._edges, hi])

    def _eval_table(self, n: int, xi: np.ndarray) -> np.ndarray:
        coefs = self._table(n)
        if xi.size and float(np.max(xi)) > self._edges[-1]:
            self._ensure_coverage(float(np.max(xi)))
            coefs = self._tables[n]
        idx = np.clip(np.searchsorted(self._edges, xi, side="right") - 1, 0, coefs.shape[0] - 1)
        out = np.empty_like(xi)
        for p in np.unique(idx):
            m = idx == p
            e0, e1 = self._edges[p], self._edges[p + 1]
            w = (2.0 * xi[m] - e0 - e1) / (e1 - e0)
            out[m] = np.polynomial.chebyshev.chebval(w, coefs[p])
        return out

    # -- evaluation ---------------------------------------------------------

    def smooth_factor(self, n: int, xi):
        """Tabulated H_n(xi) (see _smooth_factor_quad) for xi >= 0."""
        xa = np.atleast_1d(np.asarray(xi, dtype=float))
        return self._eval_table(n, xa)

    def value(self, x):
        """u(x) everywhere: prescribed data for x <= b, solved extension beyond."""
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(xa)
        left = xa <= self.b
        if np.any(left):
            out[left] = self.profile.value(xa[left])
        if np.any(~left):
            xi = xa[~left] - self.b
            out[~left] = (
                self.value_at_b
                + np.polynomial.polynomial.polyval(xi, self._poly)
                + xi**self.s.s * self._eval_table(0, xi)
            )
        return out if isinstance(x, np.ndarray) else float(out[0])

    def derivative_fast(self, n: int, y):
        """u^(n)(y) for y > b from the cached tables (vectorized)."""
        ya = np.atleast_1d(np.asarray(y, dtype=float))
        if np.any(ya <= self.b):
            raise ValueError("fast derivatives are defined on (b, infinity)")
        xi = ya - self.b
        dp = np.polynomial.polynomial.polyder(self._poly, n) if n > 0 else self._poly
        out = np.polynomial.polynomial.polyval(xi, dp)
        out = out + xi ** (self.s.s - n) * self._eval_table(n, xi)
        if n == 0:
            out = out + self.value_at_b
        return out if isinstance(y, np.ndarray) else float(out[0])

    def derivative(self, n: int, y: float) -> float:
        """u^(n)(y) by the interior-derivative formula with fresh quadrature.

        Refuses y within 1e-3 of the junction for n >= 1: the boundary
        terms (y-b)^(s-n+i) are genuinely singular there.
        """
        if n < 0 or int(n) != n:
            raise ValueError("derivative order must be a nonnegative integer")
        if n > MAX_DERIVATIVE_ORDER:
            raise ValueError(f"derivative order {n} unsupported (cap {MAX_DERIVATIVE_ORDER})")
        y = float(y)
        if n == 0:
            return float(self.value(y))
        if not y > self.b:
            raise ValueError("derivatives are defined on (b, infinity)")
        if y - self.b < _JUNCTION_GUARD:
            raise JunctionProximityError(
                f"derivative order {n} requested at y-b={y - self.b:.2e} < {_JUNCTION_GUARD}"
            )
        xi = y - self.b
        dp = np.polynomial.polynomial.polyder(self._poly, n)
        return float(
            np.polynomial.polynomial.polyval(xi, dp)
            + xi ** (self.s.s - n) * self._smooth_factor_quad(n, xi)
        )

    def raw_value(self, x: float, panels: int | None = None, grade: float | None = None) -> float:
        """u(x) in the representation-formula shape: product integration of g.

        The mesh is graded toward b on the left half (where g carries the
        junction branch) and toward x on the right half (weight singularity).
        """
        x = float(x)
        if x <= self.b:
            return float(self.value(x))
        s = self.s.s
        n = self.panels if panels is None else int(panels)
        if grade is None:
            grade = self.grade
        q_right = max(2.0, 2.0 / s) if grade is None else float(grade)
        mid = 0.5 * (self.b + x)
        left = GradedMesh(self.b, mid, max(n // 2, 8), 4.0, "left").breakpoints()
        right = GradedMesh(mid, x, max(n // 2, 8), q_right, "right").breakpoints()
        mesh = np.concatenate([left, right[1:]])
        integral = integrate_singular(
            lambda t: self.forcing.value(0, t - self.b), self.b, x, s - 1.0, "right", mesh=mesh
        )
        return self.value_at_b + self.s.sin_factor * integral

    # -- Caputo residual ------------------------------------------------------

    @property
    def junction_polynomial(self) -> np.ndarray:
        """Ascending coefficients in (x-b) of the closed-form junction polynomial."""
        return self._poly.copy()

    def caputo_value(self, x: float, n: int = 192) -> float:
        """D_a^s u(x) of the delivered solution (0 for x <= a by causality)."""
        x = float(x)
        s = self.s.s
        if x <= self.a:
            return 0.0
        data_part = poly_abel_integral(self.profile.derivative_pieces(), x, -s)
        if x <= self.b:
            return data_part / gamma(1.0 - s)
        ext = 0.0
        dpoly = np.polynomial.polynomial.polyder(self._poly)
        if np.any(dpoly):
            for k in range(dpoly.size):
                if dpoly[k] != 0.0:
                    ext += dpoly[k] * (x - self.b) ** (k + 1.0 - s) * beta(k + 1.0, 1.0 - s)
        mid = 0.5 * (self.b + x)
        h1 = lambda t: self.smooth_factor(1, t - self.b)
        ext += integrate_singular(
            lambda t: h1(t) * (x - t) ** (-s), self.b, mid, s - 1.0, "left", n=n
        )
        ext += integrate_singular(
            lambda t: (t - self.b) ** (s - 1.0) * h1(t), mid, x, -s, "right", n=n
        )
        return (data_part + ext) / gamma(1.0 - s)


def solve_extension(profile: CausalProfile, s: FractionalOrder | float, **kwargs) -> ExtensionSolution:
    """Solve the stationary extension problem for the given causal data."""
    return ExtensionSolution(profile, s, **kwargs)


def compute_g(profile: CausalProfile, s: FractionalOrder | float, x):
    """g(x) = -int_a^b phi'(t)(x-t)^(-s) dt for x >= b, evaluated exactly."""
    sol_free = _Forcing(profile, FractionalOrder.of(s))
    xa = np.asarray(x, dtype=float)
    if np.any(xa < profile.b):
        raise ValueError("g is defined on [b, infinity)")
    out = sol_free.value(0, xa - profile.b)
    return out if isinstance(x, np.ndarray) else float(out)


def extension_derivative(sol: ExtensionSolution, n: int, y: float) -> float:
    """u^(n)(y) of a solved extension; see ExtensionSolution.derivative."""
    return sol.derivative(n, y)
