"""Command-line interface.

Reproduces the estimator comparison table, emits the pointwise risk curves
behind the two figures, and exposes each MISE computation individually with
CSV or line-delimited JSON output.

Exit codes: 0 success, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .bandwidth import (
    BandwidthRule,
    McConfig,
    optimal_bandwidth_constant,
    real_mise_exact,
    real_mise_mc,
)
from .case_studies import lognormal_crossover, skew_normal_asymptotic_mise
from .kernels import (
    EPANECHNIKOV_KERNEL,
    KERNELS,
    NORMAL_KERNEL,
    exact_mse_kernel,
    mise_closed_epan_kernel,
    mise_closed_normal_kernel,
    mise_fixed_bandwidth,
)
from .numerics import DEFAULT_QUADRATURE, NumericsError, QuadratureConfig
from .parametric import (
    MiseReport,
    NormalParams,
    PLUGIN_AMISE_CONSTANT,
    STD_NORMAL,
    exact_mise_plugin,
    exact_mise_umvu,
    exact_mse_plugin,
)

TABLE_SAMPLE_SIZES = tuple(range(3, 21)) + (50, 100, 1000)
LOGNORMAL_DEFAULT_SPREADS = (0.2, 0.4, 0.6, 0.8, 1.0, 1.2)


@dataclass(frozen=True)
class ComparisonRow:
    """One sample size of the estimator comparison table.

    MISE of the plug-in estimator as the benchmark, every other method as
    a ratio against it; bandwidth constants for both kernels; ratio1 uses
    the best deterministic bandwidth, ratio2 the estimated one.
    """

    n: int
    plugin_mise: float
    umvu_ratio: float
    b_n: float
    normal_ratio1: float
    normal_ratio2: float
    c_n: float
    epan_ratio1: float
    epan_ratio2: float


@dataclass(frozen=True)
class RiskCurve:
    """Pointwise risk summary of one estimator over an x grid."""

    estimator_label: str
    points: tuple[tuple[float, float, float, float], ...]  # (x, bias, sd, rmse)


def comparison_row(n: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> ComparisonRow:
    """Compute one table row from scratch."""
    if n < 3:
        raise ValueError(f"table rows require n >= 3, got {n}")
    bench = exact_mise_plugin(STD_NORMAL, n, cfg).value
    umvu_ratio = exact_mise_umvu(STD_NORMAL, n).value / bench
    scale = n ** (-0.2)

    b_n = optimal_bandwidth_constant(NORMAL_KERNEL, n)
    c_n = optimal_bandwidth_constant(EPANECHNIKOV_KERNEL, n)
    normal_ratio1 = mise_closed_normal_kernel(n, b_n * scale) / bench
    epan_ratio1 = mise_closed_epan_kernel(n, c_n * scale) / bench
    normal_ratio2 = (
        real_mise_exact(BandwidthRule(NORMAL_KERNEL, b_n * scale), n).value / bench
    )
    epan_ratio2 = (
        real_mise_exact(BandwidthRule(EPANECHNIKOV_KERNEL, c_n * scale), n).value / bench
    )
    return ComparisonRow(
        n=n,
        plugin_mise=bench,
        umvu_ratio=umvu_ratio,
        b_n=b_n,
        normal_ratio1=normal_ratio1,
        normal_ratio2=normal_ratio2,
        c_n=c_n,
        epan_ratio1=epan_ratio1,
        epan_ratio2=epan_ratio2,
    )


def parametric_risk_curve(
    n: int,
    xs: Sequence[float],
    p: NormalParams = STD_NORMAL,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> RiskCurve:
    points = []
    for x in xs:
        bias, variance, mse = exact_mse_plugin(float(x), p, n, cfg)
        points.append((float(x), bias, math.sqrt(max(variance, 0.0)), math.sqrt(mse)))
    return RiskCurve(estimator_label="parametric_plugin", points=tuple(points))


def kernel_risk_curve(
    kernel, n: int, h: float, xs: Sequence[float], p: NormalParams = STD_NORMAL
) -> RiskCurve:
    points = []
    for x in xs:
        bias, sd, mse = exact_mse_kernel(kernel, float(x), p, n, h)
        points.append((float(x), bias, sd, math.sqrt(mse)))
    return RiskCurve(estimator_label=f"{kernel.name}_kernel", points=tuple(points))


def figure_curves(
    which: int,
    n: int,
    xs: Sequence[float],
    sigma: float = 1.0,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> list[RiskCurve]:
    """Risk curves behind the two figures.

    Figure 1 contrasts the parametric plug-in with the parabolic kernel at
    its best deterministic bandwidth; figure 2 contrasts the two kernels,
    both at their best bandwidths.
    """
    if which not in (1, 2):
        raise ValueError("figure number must be 1 or 2")
    if n < 3:
        raise ValueError(f"figures require n >= 3, got {n}")
    p = NormalParams(0.0, sigma)
    scale = n ** (-0.2)
    h_epan = optimal_bandwidth_constant(EPANECHNIKOV_KERNEL, n) * scale * sigma
    epan = kernel_risk_curve(EPANECHNIKOV_KERNEL, n, h_epan, xs, p)
    if which == 1:
        return [parametric_risk_curve(n, xs, p, cfg), epan]
    h_norm = optimal_bandwidth_constant(NORMAL_KERNEL, n) * scale * sigma
    return [kernel_risk_curve(NORMAL_KERNEL, n, h_norm, xs, p), epan]


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _write_lines(lines: Iterable[str], out: Optional[str]) -> None:
    if out is None:
        for line in lines:
            sys.stdout.write(line + "\n")
        return
    with open(out, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(line + "\n")


def _fmt_ratio(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.4f}"


def _table_csv(rows: Sequence[ComparisonRow]) -> list[str]:
    lines = ["n,plugin_mise,umvu_ratio,b_n,normal_ratio1,normal_ratio2,c_n,epan_ratio1,epan_ratio2"]
    for r in rows:
        lines.append(
            f"{r.n},{r.plugin_mise:.5f},{_fmt_ratio(r.umvu_ratio)},{r.b_n:.4f},"
            f"{r.normal_ratio1:.4f},{r.normal_ratio2:.4f},{r.c_n:.4f},"
            f"{r.epan_ratio1:.4f},{r.epan_ratio2:.4f}"
        )
    return lines


def _table_json(rows: Sequence[ComparisonRow]) -> list[str]:
    lines = []
    for r in rows:
        obj = {
            "n": r.n,
            "plugin_mise": round(r.plugin_mise, 5),
            "umvu_ratio": None if math.isinf(r.umvu_ratio) else round(r.umvu_ratio, 4),
            "b_n": round(r.b_n, 4),
            "normal_ratio1": round(r.normal_ratio1, 4),
            "normal_ratio2": round(r.normal_ratio2, 4),
            "c_n": round(r.c_n, 4),
            "epan_ratio1": round(r.epan_ratio1, 4),
            "epan_ratio2": round(r.epan_ratio2, 4),
        }
        if math.isinf(r.umvu_ratio):
            obj["umvu_ratio_infinite"] = True
        lines.append(json.dumps(obj))
    return lines


def _curves_csv(curves: Sequence[RiskCurve]) -> list[str]:
    lines = ["estimator,x,bias,sd,rmse"]
    for c in curves:
        for x, bias, sd, rmse in c.points:
            lines.append(f"{c.estimator_label},{x:.6g},{bias:.12g},{sd:.12g},{rmse:.12g}")
    return lines


def _curves_json(curves: Sequence[RiskCurve]) -> list[str]:
    lines = []
    for c in curves:
        for x, bias, sd, rmse in c.points:
            lines.append(
                json.dumps(
                    {"estimator": c.estimator_label, "x": x, "bias": bias, "sd": sd, "rmse": rmse}
                )
            )
    return lines


def _report_json(report: MiseReport, extra: dict | None = None) -> str:
    obj = dict(extra or {})
    obj["value"] = None if math.isinf(report.value) else report.value
    obj["infinite"] = math.isinf(report.value)
    obj["method"] = report.method
    obj["std_error"] = report.std_error
    return json.dumps(obj)


def _report_csv(report: MiseReport, extra: dict | None = None) -> list[str]:
    extra = extra or {}
    header = ",".join([*extra.keys(), "value", "method", "std_error"])
    value = "inf" if math.isinf(report.value) else f"{report.value:.10g}"
    std_error = "" if report.std_error is None else f"{report.std_error:.6g}"
    row = ",".join([*(str(v) for v in extra.values()), value, report.method, std_error])
    return [header, row]


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _quad_config(tol: Optional[float]) -> QuadratureConfig:
    if tol is None:
        return DEFAULT_QUADRATURE
    return QuadratureConfig(abs_tol=tol, rel_tol=tol, max_subdivisions=4096)


def _row_worker(args: tuple[int, Optional[float]]) -> ComparisonRow:
    n, tol = args
    return comparison_row(n, _quad_config(tol))


def _cmd_table(args: argparse.Namespace) -> None:
    ns = args.n if args.n else list(TABLE_SAMPLE_SIZES)
    for n in ns:
        if n < 3:
            raise ValueError(f"table rows require n >= 3, got {n}")
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(_row_worker, [(n, args.tol) for n in ns]))
    else:
        rows = [comparison_row(n, _quad_config(args.tol)) for n in ns]
    lines = _table_csv(rows) if args.format == "csv" else _table_json(rows)
    _write_lines(lines, args.out)


def _x_grid(args: argparse.Namespace) -> np.ndarray:
    if args.x_max <= args.x_min:
        raise ValueError("x-max must exceed x-min")
    if args.x_step <= 0:
        raise ValueError("x-step must be positive")
    count = int(round((args.x_max - args.x_min) / args.x_step)) + 1
    return args.x_min + args.x_step * np.arange(count)


def _cmd_figure(args: argparse.Namespace) -> None:
    curves = figure_curves(args.which, args.n, _x_grid(args), args.sigma, _quad_config(args.tol))
    lines = _curves_csv(curves) if args.format == "csv" else _curves_json(curves)
    _write_lines(lines, args.out)


def _cmd_mse_curve(args: argparse.Namespace) -> None:
    xs = _x_grid(args)
    p = NormalParams(0.0, args.sigma)
    if args.estimator == "plugin":
        if args.kernel or args.h is not None or args.rule:
            raise ValueError("plugin curves accept no kernel/bandwidth flags")
        curve = parametric_risk_curve(args.n, xs, p, _quad_config(args.tol))
    else:
        kernel = _resolve_kernel(args)
        h = _resolve_fixed_bandwidth(args, kernel) * args.sigma
        curve = kernel_risk_curve(kernel, args.n, h, xs, p)
    lines = _curves_csv([curve]) if args.format == "csv" else _curves_json([curve])
    _write_lines(lines, args.out)


def _resolve_kernel(args: argparse.Namespace):
    if not args.kernel:
        raise ValueError("kernel estimators require --kernel")
    return KERNELS[args.kernel]


def _resolve_fixed_bandwidth(args: argparse.Namespace, kernel) -> float:
    if (args.h is None) == (not args.rule):
        raise ValueError("specify exactly one of --h and --rule")
    if args.h is not None:
        if args.h <= 0:
            raise ValueError("--h must be positive")
        return args.h
    return optimal_bandwidth_constant(kernel, args.n) * args.n ** (-0.2)


def _cmd_mise(args: argparse.Namespace) -> None:
    p = NormalParams(0.0, args.sigma)
    extra = {"estimator": args.estimator, "n": args.n}
    if args.estimator == "plugin":
        if args.kernel or args.h is not None or args.rule or args.method == "mc":
            raise ValueError("plugin MISE is exact-only and accepts no kernel flags")
        report = exact_mise_plugin(p, args.n, _quad_config(args.tol))
    elif args.estimator == "umvu":
        if args.kernel or args.h is not None or args.rule or args.method == "mc":
            raise ValueError("umvu MISE is exact-only and accepts no kernel flags")
        report = exact_mise_umvu(p, args.n)
    else:
        kernel = _resolve_kernel(args)
        extra["kernel"] = kernel.name
        if args.h is not None:
            if args.rule or args.method == "mc":
                raise ValueError("fixed --h is exact-only; use --rule for mc")
            report = mise_fixed_bandwidth(kernel, p, args.n, args.h)
        else:
            if not args.rule:
                raise ValueError("kernel MISE needs --h or --rule")
            rule = BandwidthRule(
                kernel, optimal_bandwidth_constant(kernel, args.n) * args.n ** (-0.2)
            )
            if args.method == "mc":
                mc = McConfig(replicates=args.replicates, eval_points=args.eval_points, seed=args.seed)
                std_report = real_mise_mc(rule, args.n, mc)
                report = MiseReport(
                    value=std_report.value / args.sigma,
                    method=std_report.method,
                    std_error=std_report.std_error / args.sigma,
                )
            else:
                std_report = real_mise_exact(rule, args.n, _quad_config(args.tol) if args.tol else None)
                report = MiseReport(value=std_report.value / args.sigma, method=std_report.method)
    if args.format == "csv":
        _write_lines(_report_csv(report, extra), args.out)
    else:
        _write_lines([_report_json(report, extra)], args.out)


def _cmd_bandwidth_constants(args: argparse.Namespace) -> None:
    ns = args.n if args.n else list(TABLE_SAMPLE_SIZES)
    rows = []
    for n in ns:
        if n < 2:
            raise ValueError(f"bandwidth constants require n >= 2, got {n}")
        rows.append(
            (
                n,
                optimal_bandwidth_constant(NORMAL_KERNEL, n),
                optimal_bandwidth_constant(EPANECHNIKOV_KERNEL, n),
            )
        )
    if args.format == "csv":
        lines = ["n,b_n,c_n"] + [f"{n},{b:.6f},{c:.6f}" for n, b, c in rows]
    else:
        lines = [json.dumps({"n": n, "b_n": round(b, 6), "c_n": round(c, 6)}) for n, b, c in rows]
    _write_lines(lines, args.out)


def _cmd_lognormal(args: argparse.Namespace) -> None:
    spreads = args.b if args.b is not None else list(LOGNORMAL_DEFAULT_SPREADS)
    for b in spreads:
        if b <= 0:
            raise ValueError(f"log-scale spreads must be positive, got {b}")
    results = [lognormal_crossover(b) for b in spreads]
    if args.format == "csv":
        lines = ["b,n0"] + [f"{r.log_sd:g},{r.n_crossover}" for r in results]
    else:
        lines = [json.dumps({"b": r.log_sd, "n0": r.n_crossover}) for r in results]
    _write_lines(lines, args.out)


def _cmd_skew_mise(args: argparse.Namespace) -> None:
    value = skew_normal_asymptotic_mise(args.sigma, _quad_config(args.tol))
    ratio = value * args.sigma / PLUGIN_AMISE_CONSTANT
    if args.format == "csv":
        lines = ["sigma,n_mise_limit,ratio_to_normal_family", f"{args.sigma:g},{value:.6f},{ratio:.6f}"]
    else:
        lines = [
            json.dumps(
                {
                    "sigma": args.sigma,
                    "n_mise_limit": round(value, 6),
                    "ratio_to_normal_family": round(ratio, 6),
                }
            )
        ]
    _write_lines(lines, args.out)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_output_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out", default=None, help="output file (default: stdout)")
    sp.add_argument("--tol", type=float, default=None, help="quadrature tolerance override")


def _add_grid_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--x-min", type=float, default=-3.0)
    sp.add_argument("--x-max", type=float, default=3.0)
    sp.add_argument("--x-step", type=float, default=0.02)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="normrisk",
        description="Exact risk of parametric and kernel density estimators of a normal density.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("table", help="estimator comparison table")
    sp.add_argument("--n", type=int, nargs="*", default=None)
    sp.add_argument("--threads", type=int, default=1)
    _add_output_flags(sp)
    sp.set_defaults(handler=_cmd_table)

    sp = sub.add_parser("figure", help="pointwise risk curves behind the figures")
    sp.add_argument("--which", type=int, choices=(1, 2), required=True)
    sp.add_argument("--n", type=int, default=14)
    sp.add_argument("--sigma", type=float, default=1.0)
    _add_grid_flags(sp)
    _add_output_flags(sp)
    sp.set_defaults(handler=_cmd_figure)

    sp = sub.add_parser("mise", help="one MISE value for one estimator")
    sp.add_argument("--estimator", choices=("plugin", "umvu", "kernel"), required=True)
    sp.add_argument("--kernel", choices=tuple(KERNELS), default=None)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--h", type=float, default=None, help="fixed bandwidth")
    sp.add_argument("--rule", choices=("thumb",), default=None, help="data-driven bandwidth rule")
    sp.add_argument("--method", choices=("exact", "mc"), default="exact")
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=1234)
    sp.add_argument("--replicates", type=int, default=10000)
    sp.add_argument("--eval-points", type=int, default=10)
    _add_output_flags(sp)
    sp.set_defaults(handler=_cmd_mise)

    sp = sub.add_parser("mse-curve", help="pointwise risk curve for one estimator")
    sp.add_argument("--estimator", choices=("plugin", "kernel"), required=True)
    sp.add_argument("--kernel", choices=tuple(KERNELS), default=None)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--h", type=float, default=None)
    sp.add_argument("--rule", choices=("thumb",), default=None)
    sp.add_argument("--sigma", type=float, default=1.0)
    _add_grid_flags(sp)
    _add_output_flags(sp)
    sp.set_defaults(handler=_cmd_mse_curve)

    sp = sub.add_parser("bandwidth-constants", help="optimal bandwidth constants per n")
    sp.add_argument("--n", type=int, nargs="*", default=None)
    _add_output_flags(sp)
    sp.set_defaults(handler=_cmd_bandwidth_constants)

    sp = sub.add_parser("lognormal", help="lognormal-mean crossover sample sizes")
    sp.add_argument("--b", type=float, nargs="*", default=None, help="log-scale spreads")
    _add_output_flags(sp)
    sp.set_defaults(handler=_cmd_lognormal)

    sp = sub.add_parser("skew-mise", help="asymptotic MISE constant of the skew-extended family")
    sp.add_argument("--sigma", type=float, default=1.0)
    _add_output_flags(sp)
    sp.set_defaults(handler=_cmd_skew_mise)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.handler(args)
    except ValueError as exc:
        print(f"normrisk: usage error: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"normrisk: numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
