"""Command-line surface: CSV curves and JSON reports for each pipeline stage.

Subcommands
-----------
derivative   Caputo derivative of a named or polynomial profile over a grid.
extend       Solve the stationary extension; CSV of x, u, g, residual.
blowup       Blow-up convergence table and the fitted limit constant.
approximate  Build a stationary approximant of a target in C^k([0,1]).

Everything is deterministic: identical configs produce byte-identical
outputs, and every CSV starts with a `# config-hash:` comment followed by
a header row. Exit codes: 0 success, 2 invalid input, 3 numerical target
missed.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from dataclasses import dataclass

import numpy as np

from .blowup import (
    DEFAULT_J_LIST,
    Psi0Profile,
    check_blowup_convergence,
    estimate_kappa,
)
from .caputo_operator import caputo_derivative
from .density_builder import (
    DeltaUnderflowError,
    ExpTarget,
    JetInfeasibleError,
    PolyTarget,
    SampledTarget,
    SinTarget,
    TargetDegreeError,
    approximate_function,
)
from .extension_solver import solve_extension
from .profiles import builtin_extension_oracle, builtin_profile
from .special_functions import FractionalOrder

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_TARGET_MISSED = 3


@dataclass
class RunConfig:
    """Fully resolved, seed-free run parameters (validated per command)."""

    command: str
    s: float = 0.5
    profile: str | None = None
    poly: str | None = None
    a: float | None = None
    b: float | None = None
    grid: str | None = None
    panels: int | None = None
    grade: float | None = None
    tol: float = 1e-5
    j_list: str | None = None
    interval: str | None = None
    n_points: int = 200
    f: str | None = None
    k: int = 0
    m: int | None = None
    eps: float = 1e-2
    residual_tol: float = 1e-4
    out: str = "-"

    def as_dict(self) -> dict:
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}

    def hash(self) -> str:
        # the output destination does not change what is computed
        payload = {k: v for k, v in self.as_dict().items() if k != "out"}
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _parse_grid(spec: str) -> np.ndarray:
    try:
        lo, hi, n = spec.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise ValueError(f"grid must be lo:hi:n, got {spec!r}") from None
    if not (lo < hi and n >= 2):
        raise ValueError("grid requires lo < hi and n >= 2")
    return np.linspace(lo, hi, n)


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def _write_csv(path: str, config: RunConfig, header: list[str], columns: list[np.ndarray]) -> None:
    lines = [f"# config-hash: {config.hash()}", ",".join(header)]
    rows = zip(*columns)
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_json(report: dict) -> None:
    sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")


def _resolve_profile(config: RunConfig):
    if config.poly is not None:
        coeffs = [float(c) for c in config.poly.split(",")]
        from .piecewise import PiecewisePoly
        from .profiles import CausalProfile

        lo = 0.0 if config.a is None else config.a
        hi = (lo + 1.0) if config.b is None else config.b
        return CausalProfile(PiecewisePoly.single(coeffs, lo, hi), lo, hi, name="poly")
    name = config.profile or "appendix-es1"
    return builtin_profile(name, config.a, config.b)


# -- command handlers ---------------------------------------------------------


def _cmd_derivative(config: RunConfig) -> int:
    grid = _parse_grid(config.grid or "0.1:2:40")
    s = FractionalOrder(config.s)
    name = config.profile or "linear"
    if name in ("appendix-es1", "appendix-es2", "ramp", "bump"):
        profile = builtin_profile(name)
        sol = solve_extension(profile, s, **_solver_kwargs(config, max(grid)))
        if np.any(grid <= profile.a):
            raise ValueError("grid points must lie right of the initial point")
        values = np.array([sol.caputo_value(float(x)) for x in grid])
    else:
        if config.profile is None and config.poly is None:
            config = dataclasses.replace(config, profile="linear")
        if config.poly is None and config.b is None:
            config = dataclasses.replace(config, b=float(max(grid)))
        profile = _resolve_profile(config)
        a = profile.a
        if np.any(grid > profile.b):
            raise ValueError("grid extends beyond the data; use `extend` for x > b")
        values = np.array([caputo_derivative(profile, a, s, float(x)) for x in grid])
    _write_csv(config.out, config, ["x", "caputo"], [grid, values])
    return EXIT_OK


def _solver_kwargs(config: RunConfig, x_hi: float) -> dict:
    kw: dict = {}
    if config.panels is not None:
        kw["panels"] = config.panels
    if config.grade is not None:
        kw["grade"] = config.grade
    kw["x_max"] = max(x_hi + 1.0, 2.0)
    return kw


def _cmd_extend(config: RunConfig) -> int:
    s = FractionalOrder(config.s)
    profile = _resolve_profile(config)
    grid = _parse_grid(config.grid or "1.01:5:200")
    if np.any(grid <= profile.b):
        raise ValueError("extend grid points must lie strictly right of b")
    sol = solve_extension(profile, s, **_solver_kwargs(config, float(max(grid))))
    u = sol.value(grid)
    g = sol.g_value(grid)
    residual = np.array([sol.caputo_value(float(x)) for x in grid])
    _write_csv(config.out, config, ["x", "u", "g", "residual"], [grid, u, g, residual])

    report: dict = {
        "command": "extend",
        "config": config.as_dict(),
        "config_hash": config.hash(),
        "residual_max": float(np.max(np.abs(residual))),
    }
    oracle = builtin_extension_oracle(profile.name) if config.s == 0.5 else None
    if oracle is not None:
        report["oracle_deviation"] = float(np.max(np.abs(u - oracle(grid))))
    code = EXIT_OK
    if report["residual_max"] > config.tol:
        report["exit_reason"] = f"residual {report['residual_max']:.3e} above tol {config.tol:g}"
        code = EXIT_TARGET_MISSED
    else:
        report["exit_reason"] = "ok"
    _emit_json(report)
    return code


def _cmd_blowup(config: RunConfig) -> int:
    s = FractionalOrder(config.s)
    profile = Psi0Profile.default_quadratic()
    j_list = (
        tuple(int(j) for j in config.j_list.split(",")) if config.j_list else DEFAULT_J_LIST
    )
    interval = (0.5, 2.0)
    if config.interval:
        lo, hi = config.interval.split(":")
        interval = (float(lo), float(hi))
    kappa = estimate_kappa(s, profile)
    conv = check_blowup_convergence(
        s, profile, j_list, interval, n_points=config.n_points, kappa=kappa
    )
    _write_csv(
        config.out,
        config,
        ["j", "sup_error"],
        [np.asarray(conv.j_list, dtype=float), np.asarray(conv.sup_errors)],
    )
    report = {
        "command": "blowup",
        "config": config.as_dict(),
        "config_hash": config.hash(),
        "kappa": {
            "fitted": kappa.kappa,
            "candidate_a": kappa.kappa_a,
            "candidate_b": kappa.kappa_b,
        },
        "matched": kappa.matched,
        "fit_exponent": kappa.fit_exponent,
        "rate_exponent": conv.rate_exponent,
        "sup_errors": list(conv.sup_errors),
    }
    code = EXIT_OK
    if kappa.matched is None:
        report["exit_reason"] = "fitted kappa matches neither candidate within 1%"
        code = EXIT_TARGET_MISSED
    else:
        report["exit_reason"] = "ok"
    _emit_json(report)
    return code


def _parse_target(spec: str):
    if spec in ("sin",):
        return SinTarget()
    if spec in ("exp",):
        return ExpTarget()
    if spec in ("x^2", "x2"):
        return PolyTarget([0.0, 0.0, 1.0])
    if spec.startswith("poly:"):
        return PolyTarget([float(c) for c in spec[5:].split(",")])
    if spec.startswith("csv:"):
        rows = []
        with open(spec[4:], encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    rows.append([float(v) for v in line.split(",")[:2]])
                except ValueError:
                    continue  # header row
        data = np.asarray(rows)
        return SampledTarget(data[:, 0], data[:, 1])
    try:
        const = float(spec)
    except ValueError:
        raise ValueError(
            f"unknown target {spec!r}; use sin, exp, x^2, poly:c0,c1,..., csv:PATH or a constant"
        ) from None
    return PolyTarget([const])


def _cmd_approximate(config: RunConfig) -> int:
    s = FractionalOrder(config.s)
    profile = Psi0Profile.default_quadratic()
    if config.m is not None:
        # single-monomial mode: approximate x^m directly
        if config.f is not None:
            raise ValueError("give either --f or --m, not both")
        target = PolyTarget([0.0] * config.m + [1.0])
    else:
        target = _parse_target(config.f or "x^2")
    try:
        approx, rep = approximate_function(target, config.k, config.eps, s, profile)
    except (JetInfeasibleError, DeltaUnderflowError, TargetDegreeError) as exc:
        _emit_json(
            {
                "command": "approximate",
                "config": config.as_dict(),
                "config_hash": config.hash(),
                "exit_reason": f"{type(exc).__name__}: {exc}",
            }
        )
        return EXIT_TARGET_MISSED

    grid = np.linspace(0.0, 1.0, config.n_points)
    header = ["x", "f", "u", "u_minus_f"]
    cols = [grid, target.eval(grid, 0), approx.value(grid)]
    cols.append(cols[2] - cols[1])
    for l in range(1, config.k + 1):
        header += [f"f_d{l}", f"u_d{l}"]
        cols += [target.eval(grid, l), approx.derivative(l, grid)]
    _write_csv(config.out, config, header, cols)

    report = {
        "command": "approximate",
        "config": config.as_dict(),
        "config_hash": config.hash(),
        "errors": {"per_derivative": list(rep.errors_per_derivative)},
        "epsilon_achieved": rep.epsilon_achieved,
        "residual_max": rep.residual_max,
        "delta": {str(m): d for m, d in rep.delta_per_monomial.items()},
        "initial_point": rep.initial_point,
        "polynomial_degree": rep.polynomial_degree,
    }
    code = EXIT_OK
    reasons = []
    if not rep.epsilon_achieved < config.eps:
        reasons.append(f"epsilon_achieved {rep.epsilon_achieved:.3e} >= eps {config.eps:g}")
    if rep.residual_max > config.residual_tol:
        reasons.append(
            f"residual {rep.residual_max:.3e} above residual-tol {config.residual_tol:g}"
        )
    if reasons:
        report["exit_reason"] = "; ".join(reasons)
        code = EXIT_TARGET_MISSED
    else:
        report["exit_reason"] = "ok"
    _emit_json(report)
    return code


_HANDLERS = {
    "derivative": _cmd_derivative,
    "extend": _cmd_extend,
    "blowup": _cmd_blowup,
    "approximate": _cmd_approximate,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caputo-density",
        description="Caputo-stationary extensions, blow-up limits and density approximants.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("derivative", "Caputo derivative of a profile over a grid (CSV)"),
        ("extend", "solve the stationary extension (CSV + JSON summary)"),
        ("blowup", "blow-up convergence and the limit constant (CSV + JSON)"),
        ("approximate", "C^k density approximant of a target (CSV + JSON report)"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON file of defaults, merged under the flags")
        p.add_argument("--s", type=float, default=None, help="fractional order in (0,1)")
        p.add_argument("--out", default=None, help="CSV output path ('-' for stdout)")
        p.add_argument("--panels", type=int, default=None, help="quadrature panel count")
        p.add_argument("--grade", type=float, default=None, help="mesh grading exponent")
        if name in ("derivative", "extend"):
            p.add_argument("--profile", default=None, help="built-in profile name")
            p.add_argument("--poly", default=None, help="data polynomial c0,c1,...")
            p.add_argument("--a", type=float, default=None, help="initial point")
            p.add_argument("--b", type=float, default=None, help="data right end")
            p.add_argument("--grid", default=None, help="evaluation grid lo:hi:n")
        if name == "extend":
            p.add_argument("--tol", type=float, default=None, help="residual gate (exit 3)")
        if name == "blowup":
            p.add_argument("--j-list", dest="j_list", default=None, help="comma list of j")
            p.add_argument("--interval", default=None, help="convergence interval lo:hi")
            p.add_argument("--n-points", dest="n_points", type=int, default=None)
        if name == "approximate":
            p.add_argument("--f", default=None, help="target: sin, exp, x^2, poly:..., csv:PATH")
            p.add_argument("--k", type=int, default=None, help="C^k norm order (0..4)")
            p.add_argument("--m", type=int, default=None, help="approximate the monomial x^m")
            p.add_argument("--eps", type=float, default=None, help="target C^k error")
            p.add_argument(
                "--residual-tol", dest="residual_tol", type=float, default=None,
                help="Caputo residual gate on [0,1]",
            )
            p.add_argument("--n-points", dest="n_points", type=int, default=None)
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig(command=args.command)
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            for key, value in json.load(fh).items():
                if not hasattr(config, key):
                    raise ValueError(f"unknown config key {key!r}")
                setattr(config, key, value)
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        setattr(config, key, value)
    return config


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _resolve_config(args)
        FractionalOrder(config.s)
        return _HANDLERS[args.command](config)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
