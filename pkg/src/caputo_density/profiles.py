"""Causal prescribed-data profiles and the built-in reference examples.

A CausalProfile is the data of the nonlocal problem: a piecewise
polynomial phi on [a, b], constant on (-inf, a]. Membership in the
admissible class (phi absolutely continuous with phi'(.)(x-.)^(-s)
integrable) is automatic for piecewise polynomials.

Two named profiles ship with closed-form solved extensions, used as
golden oracles by the tests and for the CLI's oracle-deviation report:

* ``appendix-es1`` (alias ``ramp``): phi(x) = x on [0, 1], zero tail.
* ``appendix-es2`` (alias ``bump``): the C^1 quadratic bump
  (16/9)(x - 3/4)^2 on [0, 3/4], zero on [3/4, 1], tail value 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .piecewise import PiecewisePoly

__all__ = [
    "CausalProfile",
    "ramp_profile",
    "quadratic_bump_profile",
    "constant_profile",
    "linear_profile",
    "builtin_profile",
    "builtin_extension_oracle",
    "ramp_extension_value",
    "bump_extension_value",
    "ramp_forcing_value",
    "bump_forcing_value",
]


@dataclass(frozen=True)
class CausalProfile:
    """Prescribed data phi on (-inf, b], constant left of a."""

    data: PiecewisePoly
    a: float
    b: float
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.a < self.b:
            raise ValueError("profile requires a < b")
        bp = self.data.breakpoints
        if bp[0] != self.a or bp[-1] != self.b:
            raise ValueError("data breakpoints must span exactly [a, b]")

    def value(self, x):
        """phi(x) for x <= b (constant left of a)."""
        return self.data.value(x)

    def derivative_value(self, x):
        """phi'(x); zero on (-inf, a], right-piece value at breakpoints."""
        return self.data.derivative_value(x)

    @property
    def value_at_b(self) -> float:
        return float(self.data.value(self.b))

    def derivative_pieces(self):
        return self.data.derivative_pieces()

    def fingerprint(self) -> tuple:
        """Hashable identity used to key solver caches."""
        return (
            self.a,
            self.b,
            self.data.left_tail,
            self.data.breakpoints.tobytes(),
            self.data.coeffs.tobytes(),
        )


def ramp_profile() -> CausalProfile:
    """phi(x) = x on [0, 1], zero on (-inf, 0]."""
    return CausalProfile(PiecewisePoly([0.0, 1.0], [[0.0, 1.0]]), 0.0, 1.0, name="appendix-es1")


def quadratic_bump_profile() -> CausalProfile:
    """(16/9)(x - 3/4)^2 on [0, 3/4], zero on [3/4, 1], constant 1 left of 0."""
    data = PiecewisePoly(
        [0.0, 0.75, 1.0],
        [[1.0, -8.0 / 3.0, 16.0 / 9.0], [0.0]],
        left_tail=1.0,
    )
    return CausalProfile(data, 0.0, 1.0, name="appendix-es2")


def constant_profile(value: float = 1.0, a: float = 0.0, b: float = 1.0) -> CausalProfile:
    return CausalProfile(PiecewisePoly.constant(value, a, b), a, b, name="constant")


def linear_profile(a: float = 0.0, b: float = 1.0) -> CausalProfile:
    """phi(x) = x - a on [a, b] (slope one, causal from a)."""
    return CausalProfile(PiecewisePoly.single([0.0, 1.0], a, b), a, b, name="linear")


_BUILTINS = {
    "appendix-es1": lambda: ramp_profile(),
    "ramp": lambda: ramp_profile(),
    "appendix-es2": lambda: quadratic_bump_profile(),
    "bump": lambda: quadratic_bump_profile(),
    "constant": lambda: constant_profile(),
    "linear": lambda: linear_profile(),
}


def builtin_profile(name: str, a: float | None = None, b: float | None = None) -> CausalProfile:
    """Look up a named profile; a/b override the span for constant/linear."""
    try:
        make = _BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; choose from {sorted(_BUILTINS)}") from None
    if name in ("constant", "linear"):
        lo = 0.0 if a is None else float(a)
        hi = 1.0 if b is None else float(b)
        if name == "constant":
            return constant_profile(1.0, lo, hi)
        return linear_profile(lo, hi)
    return make()


# -- closed-form solved extensions of the two reference profiles (s = 1/2) --


def ramp_extension_value(x):
    """Solved extension of the ramp profile at s = 1/2 for x >= 1:
    (2/pi) (x arcsin(1/sqrt x) - sqrt(x - 1))."""
    x = np.asarray(x, dtype=float)
    return (2.0 / np.pi) * (x * np.arcsin(1.0 / np.sqrt(x)) - np.sqrt(x - 1.0))


def ramp_extension_derivative(x):
    """First derivative of the ramp extension: (2/pi)(arcsin(1/sqrt x) - 1/sqrt(x-1))."""
    x = np.asarray(x, dtype=float)
    return (2.0 / np.pi) * (np.arcsin(1.0 / np.sqrt(x)) - 1.0 / np.sqrt(x - 1.0))


def ramp_forcing_value(t):
    """Forcing of the ramp problem: g(t) = 2 sqrt(t-1) - 2 sqrt(t)."""
    t = np.asarray(t, dtype=float)
    return 2.0 * np.sqrt(t - 1.0) - 2.0 * np.sqrt(t)


def bump_extension_value(x):
    """Solved extension of the quadratic bump at s = 1/2 for x >= 1."""
    x = np.asarray(x, dtype=float)
    return (
        27.0 * np.pi
        + np.sqrt(x - 1.0) * (-48.0 * x + 52.0)
        + np.arcsin(1.0 / np.sqrt(x)) * (96.0 * x**2 - 144.0 * x)
        - np.arcsin(1.0 / np.sqrt(4.0 * x - 3.0)) * (96.0 * x**2 - 144.0 * x + 54.0)
    ) / (27.0 * np.pi)


def bump_forcing_value(t):
    """Forcing of the bump problem: -(16/27)(8 t^{3/2} - 9 t^{1/2} - (4t-3)^{3/2})."""
    t = np.asarray(t, dtype=float)
    return -(16.0 / 27.0) * (8.0 * t**1.5 - 9.0 * np.sqrt(t) - (4.0 * t - 3.0) ** 1.5)


def builtin_extension_oracle(name: str):
    """Closed-form solved-extension evaluator for a named profile, if one exists.

    Only valid at s = 1/2; returns None for profiles without an oracle.
    """
    if name in ("appendix-es1", "ramp"):
        return ramp_extension_value
    if name in ("appendix-es2", "bump"):
        return bump_extension_value
    if name == "constant":
        return lambda x: np.ones_like(np.asarray(x, dtype=float))
    return None
