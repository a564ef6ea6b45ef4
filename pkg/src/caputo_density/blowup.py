"""The special solution psi, its blow-up family, and the limit constant.

psi solves D_0^s psi = 0 on (1, inf) with a strictly decreasing C^1 bump
psi_0 prescribed on (-inf, 1] (constant left of 0, zero on [3/4, 1]).
The rescalings v_j(x) = j^s psi(x/j + 1) are stationary on (0, inf),
vanish on [-j/4, 0], and converge uniformly on bounded subintervals of
(0, inf) to kappa x^s. The constant kappa is estimated here by fitting
psi(1+eps) eps^(-s) = kappa + C eps on a decreasing eps grid and compared
against the two analytic candidates

    kappa_a = beta(1, s) g(1),
    kappa_b = (sin(pi s)/pi) beta(1, s) g(1),

which differ by the normalization prefactor of the representation
formula; the fit is the arbiter and both are always reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .extension_solver import ExtensionSolution, solve_extension
from .piecewise import PiecewisePoly
from .profiles import CausalProfile, quadratic_bump_profile
from .singular_quadrature import integrate_singular, poly_abel_integral
from .special_functions import FractionalOrder, beta, gamma

__all__ = [
    "Psi0Profile",
    "BlowupMember",
    "KappaEstimate",
    "BlowupConvergence",
    "build_psi",
    "eval_vj",
    "estimate_kappa",
    "check_blowup_convergence",
    "DEFAULT_J_LIST",
]

DEFAULT_J_LIST = (2, 4, 8, 16, 32, 64)
_DENSE_SAMPLE = 1000


@dataclass(frozen=True)
class Psi0Profile:
    """Admissible prescribed data for the blow-up construction.

    Constant on (-inf, 0], identically zero on [3/4, 1], with strictly
    negative derivative on [0, 3/4); all three checked on a dense sample
    at construction. C^1 matching is verified at interior breakpoints.
    """

    data: PiecewisePoly

    def __post_init__(self) -> None:
        bp = self.data.breakpoints
        if bp[0] != 0.0 or bp[-1] != 1.0:
            raise ValueError("psi_0 data must span exactly [0, 1]")
        ts = np.linspace(0.75, 1.0, _DENSE_SAMPLE // 4)
        if np.max(np.abs(self.data.value(ts))) > 1e-12:
            raise ValueError("psi_0 must vanish on [3/4, 1]")
        ts = np.linspace(0.0, 0.75, _DENSE_SAMPLE, endpoint=False)
        if np.max(self.data.derivative_value(ts)) >= 0.0:
            raise ValueError("psi_0 must be strictly decreasing on [0, 3/4)")
        for tau in bp[1:-1]:
            left = self._left_derivative(float(tau))
            right = float(self.data.derivative_value(float(tau)))
            if abs(left - right) > 1e-9:
                raise ValueError(f"psi_0 is not C^1 at breakpoint {tau}")

    def _left_derivative(self, tau: float) -> float:
        idx = int(np.searchsorted(self.data.breakpoints, tau)) - 1
        h = tau - self.data.breakpoints[idx]
        c = self.data.coeffs[idx]
        return float((3.0 * c[3] * h + 2.0 * c[2]) * h + c[1])

    @classmethod
    def default_quadratic(cls) -> "Psi0Profile":
        """(16/9)(x - 3/4)^2 on [0, 3/4], zero on [3/4, 1]."""
        return cls(quadratic_bump_profile().data)

    def to_causal_profile(self) -> CausalProfile:
        return CausalProfile(self.data, 0.0, 1.0, name="psi0")

    def fingerprint(self) -> tuple:
        return self.to_causal_profile().fingerprint()


_PSI_CACHE: dict[tuple, ExtensionSolution] = {}


def build_psi(
    s: FractionalOrder | float, profile: Psi0Profile, *, cached: bool = True, **kwargs
) -> ExtensionSolution:
    """Solve D_0^s psi = 0 on (1, inf) with psi = psi_0 on (-inf, 1]."""
    s = FractionalOrder.of(s)
    key = (profile.fingerprint(), s.s, tuple(sorted(kwargs.items())))
    if cached and key in _PSI_CACHE:
        return _PSI_CACHE[key]
    sol = solve_extension(profile.to_causal_profile(), s, **kwargs)
    if cached:
        _PSI_CACHE[key] = sol
    return sol


@dataclass(frozen=True)
class BlowupMember:
    """One rescaling v_j(x) = j^s psi(x/j + 1), causal from -j."""

    j: int
    psi: ExtensionSolution

    def __post_init__(self) -> None:
        if self.j < 1 or int(self.j) != self.j:
            raise ValueError("j must be a positive integer")

    @property
    def s(self) -> FractionalOrder:
        return self.psi.s

    @property
    def initial_point(self) -> float:
        return -float(self.j)

    def value(self, x):
        """v_j(x) on all of R (data region included)."""
        xa = np.asarray(x, dtype=float)
        out = self.j**self.s.s * self.psi.value(xa / self.j + 1.0)
        return out if isinstance(x, np.ndarray) else float(out)

    def derivative(self, l: int, x: float) -> float:
        """v_j^(l)(x) = j^(s-l) psi^(l)(x/j + 1) for x > 0 (fresh quadrature)."""
        return self.j ** (self.s.s - l) * self.psi.derivative(l, x / self.j + 1.0)

    def derivative_fast(self, l: int, x):
        xa = np.asarray(x, dtype=float)
        out = self.j ** (self.s.s - l) * self.psi.derivative_fast(l, xa / self.j + 1.0)
        return out if isinstance(x, np.ndarray) else float(out)

    def value_raw(self, x: float, **kwargs) -> float:
        """v_j(x) through the representation-formula quadrature (no tables)."""
        y = x / self.j + 1.0
        base = self.psi.raw_value(y, **kwargs) if y > 1.0 else self.psi.value(y)
        return self.j**self.s.s * base

    def caputo_value(self, x: float) -> float:
        """D_{-j}^s v_j(x) through the exact scaling identity."""
        return float(self.psi.caputo_value(x / self.j + 1.0))

    def caputo_value_direct(self, x: float, n: int = 128) -> float:
        """D_{-j}^s v_j(x) evaluated directly on the v_j side.

        Independent of caputo_value: the data part integrates the
        rescaled piecewise polynomial exactly and the extension part is
        quadrature on (0, x) with its own mesh.
        """
        x = float(x)
        j, s = float(self.j), self.s.s
        if x <= -j:
            return 0.0
        pieces = []
        for tau_lo, tau_hi, dcoeffs in self.psi.profile.derivative_pieces():
            scale = j ** (s - 1.0) * j ** -np.arange(dcoeffs.size)
            pieces.append((j * (tau_lo - 1.0), j * (tau_hi - 1.0), dcoeffs * scale))
        total = poly_abel_integral(pieces, x, -s)
        if x > 0.0:
            dpoly = np.polynomial.polynomial.polyder(self.psi.junction_polynomial)
            for k in range(dpoly.size):
                if dpoly[k] != 0.0:
                    total += (
                        dpoly[k]
                        * j ** (s - 1.0 - k)
                        * x ** (k + 1.0 - s)
                        * beta(k + 1.0, 1.0 - s)
                    )
            mid = 0.5 * x
            h1 = lambda t: self.psi.smooth_factor(1, t / j)
            total += integrate_singular(
                lambda t: h1(t) * (x - t) ** (-s), 0.0, mid, s - 1.0, "left", n=n
            )
            total += integrate_singular(
                lambda t: t ** (s - 1.0) * h1(t), mid, x, -s, "right", n=n
            )
        return total / gamma(1.0 - s)


def eval_vj(member: BlowupMember, x):
    """v_j(x); zero on [-j/4, 0], j^s psi_0(0) left of -j."""
    return member.value(x)


@dataclass(frozen=True)
class KappaEstimate:
    """Fitted limit constant with the two analytic candidates and diagnostics."""

    kappa: float
    fit_slope: float
    fit_exponent: float
    fit_residual: float
    kappa_a: float
    kappa_b: float
    matched: str | None
    coefficients: tuple[float, ...]
    eps_grid: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.kappa > 0.0:
            raise ValueError("kappa must be strictly positive")


def estimate_kappa(
    s: FractionalOrder | float,
    profile: Psi0Profile,
    eps_grid=None,
    *,
    n_coefficients: int = 6,
    panels: int = 256,
) -> KappaEstimate:
    """Fit psi(1+eps) eps^(-s) = kappa + C eps over the eps grid.

    psi(1+eps) is evaluated by fresh representation-formula quadrature on
    [1, 1+eps] (independent of the solver's cached expansion, which would
    presuppose the answer). Candidates kappa_a/kappa_b from the closed
    form of g(1) are reported alongside; exactly one should match.
    """
    s = FractionalOrder.of(s)
    if eps_grid is None:
        eps_grid = 2.0 ** -np.arange(5, 15)
    eps = np.asarray(sorted(eps_grid, reverse=True), dtype=float)
    if eps.size < 4:
        raise ValueError("eps grid needs at least 4 points")
    if eps[0] > 0.5 or eps[-1] <= 0.0:
        raise ValueError("eps grid must lie in (0, 0.5]")
    if eps[0] / eps[-1] < 10.0:
        raise ValueError("eps grid must span at least a decade")

    psi = build_psi(s, profile)
    vals = np.array([psi.raw_value(1.0 + float(e), panels=panels) for e in eps])
    scaled = vals * eps ** (-s.s)
    slope, kappa = np.polyfit(eps, scaled, 1)
    fit_residual = float(np.max(np.abs(scaled - (kappa + slope * eps))))
    fit_exponent = float(np.polyfit(np.log(eps), np.log(np.abs(vals)), 1)[0])

    g1 = psi.g_value(psi.b)
    kappa_a = beta(1.0, s.s) * g1
    kappa_b = s.sin_factor * kappa_a
    match_a = abs(kappa - kappa_a) <= 0.01 * abs(kappa_a)
    match_b = abs(kappa - kappa_b) <= 0.01 * abs(kappa_b)
    matched = "a" if (match_a and not match_b) else "b" if (match_b and not match_a) else None

    coeffs = tuple(
        beta(i + 1.0, s.s) * psi.forcing.regular_at_b(i) / math.factorial(i)
        for i in range(n_coefficients + 1)
    )
    return KappaEstimate(
        kappa=float(kappa),
        fit_slope=float(slope),
        fit_exponent=fit_exponent,
        fit_residual=fit_residual,
        kappa_a=float(kappa_a),
        kappa_b=float(kappa_b),
        matched=matched,
        coefficients=coeffs,
        eps_grid=tuple(float(e) for e in eps),
    )


@dataclass(frozen=True)
class BlowupConvergence:
    """Sup-errors of v_j against kappa x^s per j, with the empirical rate."""

    j_list: tuple[int, ...]
    sup_errors: tuple[float, ...]
    rate_exponent: float
    kappa: KappaEstimate
    interval: tuple[float, float]


def check_blowup_convergence(
    s: FractionalOrder | float,
    profile: Psi0Profile,
    j_list=DEFAULT_J_LIST,
    interval: tuple[float, float] = (0.5, 2.0),
    *,
    n_points: int = 200,
    kappa: KappaEstimate | None = None,
) -> BlowupConvergence:
    """sup_{x in I} |v_j(x) - kappa x^s| for each j and the log-log rate in j."""
    s = FractionalOrder.of(s)
    j_list = tuple(int(j) for j in j_list)
    if any(b <= a for a, b in zip(j_list, j_list[1:])):
        raise ValueError("j list must be increasing")
    x_lo, x_hi = interval
    if not 0.0 < x_lo < x_hi:
        raise ValueError("interval must be a bounded subinterval of (0, inf)")
    if kappa is None:
        kappa = estimate_kappa(s, profile)
    psi = build_psi(s, profile)
    xs = np.linspace(x_lo, x_hi, n_points)
    target = kappa.kappa * xs**s.s
    sups = []
    for j in j_list:
        member = BlowupMember(j, psi)
        sups.append(float(np.max(np.abs(member.value(xs) - target))))
    rate = float(np.polyfit(np.log(np.asarray(j_list, dtype=float)), np.log(sups), 1)[0])
    return BlowupConvergence(
        j_list=j_list,
        sup_errors=tuple(sups),
        rate_exponent=rate,
        kappa=kappa,
        interval=(float(x_lo), float(x_hi)),
    )
