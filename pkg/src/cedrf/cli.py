"""Command-line front end.

Subcommands: ``analyze`` (one-rate report), ``sweep`` (rate grid to
CSV/JSON), ``verify`` (closed forms against the matrix/Monte-Carlo
oracles), and ``example`` (the built-in two-component demonstration
model with its figure data).

Model files are JSON documents with keys ``A`` (nested array of L rows of
M reals), ``sigma2`` (positive real), and optionally ``sigma_x`` (an M x M
source covariance, which triggers whitening; distortion is then measured
on the whitened source).  Rates are bits unless ``--nats`` is given, in
which case rate-valued inputs and outputs are converted on the way in/out.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import drf, oracle, waterfill
from .linalg import Matrix
from .spectral import ObservationModel, whiten

CSV_HEADER = "R,d_idrf,d_ce,gap,gap_ub,gap_lb,k_idrf,k_ce,theta_idrf,theta_ce"

_LN2 = math.log(2.0)


class ParseError(ValueError):
    """Model file is not valid JSON or has a malformed field."""


class InvalidModel(ValueError):
    """Model file violates a model invariant."""


def _fmt(x: float) -> str:
    """Round-trippable decimal rendering of a double."""
    return format(x, ".17g")


def _to_bits(rate: float, nats: bool) -> float:
    return rate / _LN2 if nats else rate


def _from_bits(rate: float, nats: bool) -> float:
    if math.isinf(rate):
        return rate
    return rate * _LN2 if nats else rate


def _json_safe(x: float) -> float | None:
    return None if math.isinf(x) else x


def load_model(path: str | Path) -> ObservationModel:
    """Read and validate a model JSON file."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top-level document must be a JSON object")
    for field in ("A", "sigma2"):
        if field not in doc:
            raise ParseError(f"{path}: missing field '{field}'")
    try:
        a = Matrix(doc["A"])
    except (ValueError, TypeError) as exc:
        raise InvalidModel(f"field 'A': {exc}") from exc
    sigma2 = doc["sigma2"]
    if not isinstance(sigma2, (int, float)) or isinstance(sigma2, bool):
        raise ParseError(f"field 'sigma2': expected a number, got {type(sigma2).__name__}")
    try:
        if "sigma_x" in doc and doc["sigma_x"] is not None:
            try:
                sx = Matrix(doc["sigma_x"])
            except (ValueError, TypeError) as exc:
                raise InvalidModel(f"field 'sigma_x': {exc}") from exc
            if sx.rows != sx.cols or sx.rows != a.cols:
                raise InvalidModel(
                    f"field 'sigma_x': expected {a.cols}x{a.cols}, got {sx.rows}x{sx.cols}"
                )
            return whiten(sx, a, float(sigma2))
        return ObservationModel(a, float(sigma2))
    except InvalidModel:
        raise
    except ValueError as exc:
        raise InvalidModel(str(exc)) from exc


def example_model() -> ObservationModel:
    """The built-in two-observation demonstration model."""
    return ObservationModel(
        Matrix(np.diag([math.sqrt(20.0), math.sqrt(0.5)])), 1.0
    )


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def _analysis_report(model: ObservationModel, rate_bits: float, nats: bool) -> dict:
    region = drf.equality_region(model)
    thr_obs = waterfill.rate_thresholds(model.observation)
    thr_cond = (
        waterfill.rate_thresholds(model.conditional) if model.conditional.rank else [0.0]
    )
    d_i = drf.idrf(model, rate_bits)
    d_c = drf.ce_drf(model, rate_bits)
    alloc_cond = (
        waterfill.rate_allocation(model.conditional, rate_bits)
        if model.conditional.rank
        else None
    )
    alloc_obs = waterfill.rate_allocation(model.observation, rate_bits)
    unit = "nats" if nats else "bits"
    return {
        "units": unit,
        "model": {
            "M": model.M,
            "L": model.L,
            "r": model.r,
            "sigma2": model.sigma2,
            "rank": model.gram.rank,
            "full_rank": model.full_rank,
            "mmse_floor": model.mmse_floor,
        },
        "spectra": {
            "gram": list(model.gram.values),
            "observation": list(model.observation.values),
            "conditional": list(model.conditional.values),
        },
        "thresholds": {
            "observation": [_json_safe(_from_bits(t, nats)) for t in thr_obs],
            "conditional": [_json_safe(_from_bits(t, nats)) for t in thr_cond],
        },
        "equality_region": {
            "r0": region.r0,
            "R_limit": _json_safe(_from_bits(region.R_limit, nats)),
            "unconditional": region.unconditional,
        },
        "point": {
            "R": _from_bits(rate_bits, nats),
            "d_idrf": d_i,
            "d_ce": d_c,
            "gap": max(0.0, d_c - d_i),
            "gap_ub": drf.gap_upper_bound(model, rate_bits),
            "gap_lb": drf.gap_lower_bound(model, rate_bits),
            "k_idrf": alloc_cond.k if alloc_cond else 0,
            "k_ce": alloc_obs.k,
            "theta_idrf": alloc_cond.theta if alloc_cond else 0.0,
            "theta_ce": alloc_obs.theta,
        },
        "rates": {
            "idrf": [
                _from_bits(r, nats) for r in (alloc_cond.rates if alloc_cond else [0.0] * model.L)
            ],
            "ce": [_from_bits(r, nats) for r in alloc_obs.rates],
        },
    }


def _print_analysis(report: dict, out=None) -> None:
    out = out if out is not None else sys.stdout

    def fnum(x):
        return "inf" if x is None else format(x, ".12g")

    m = report["model"]
    print(
        f"model: M={m['M']} L={m['L']} sigma2={fnum(m['sigma2'])} "
        f"rank={m['rank']} full_rank={m['full_rank']} mmse_floor={fnum(m['mmse_floor'])}",
        file=out,
    )
    sp = report["spectra"]
    print(f"spectrum gram:        {' '.join(fnum(v) for v in sp['gram'])}", file=out)
    print(f"spectrum observation: {' '.join(fnum(v) for v in sp['observation'])}", file=out)
    print(f"spectrum conditional: {' '.join(fnum(v) for v in sp['conditional'])}", file=out)
    th = report["thresholds"]
    unit = report["units"]
    print(f"thresholds observation ({unit}): {' '.join(fnum(v) for v in th['observation'])}", file=out)
    print(f"thresholds conditional ({unit}): {' '.join(fnum(v) for v in th['conditional'])}", file=out)
    eq = report["equality_region"]
    print(
        f"equality region: r0={eq['r0']} R_limit={fnum(eq['R_limit'])} "
        f"unconditional={eq['unconditional']}",
        file=out,
    )
    p = report["point"]
    print(f"at R = {fnum(p['R'])} {unit}:", file=out)
    print(f"  d_idrf = {fnum(p['d_idrf'])}  (k={p['k_idrf']}, theta={fnum(p['theta_idrf'])})", file=out)
    print(f"  d_ce   = {fnum(p['d_ce'])}  (k={p['k_ce']}, theta={fnum(p['theta_ce'])})", file=out)
    print(f"  gap    = {fnum(p['gap'])}  bounds [{fnum(p['gap_lb'])}, {fnum(p['gap_ub'])}]", file=out)
    r = report["rates"]
    print(f"rates idrf ({unit}): {' '.join(fnum(v) for v in r['idrf'])}", file=out)
    print(f"rates ce   ({unit}): {' '.join(fnum(v) for v in r['ce'])}", file=out)


def cmd_analyze(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    rate_bits = _to_bits(args.rate, args.nats)
    waterfill._check_rate(rate_bits)
    report = _analysis_report(model, rate_bits, args.nats)
    _print_analysis(report)
    if args.json:
        Path(args.json).write_text(json.dumps(report, indent=2) + "\n")
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _sweep_rows(model: ObservationModel, grid_input: list[float], nats: bool) -> list[dict]:
    rows = []
    points = drf.sweep(model, [_to_bits(r, nats) for r in grid_input])
    for r_in, pt in zip(grid_input, points):
        theta_i = (
            waterfill.water_level(model.conditional, pt.R)[1]
            if model.conditional.rank
            else 0.0
        )
        theta_c = waterfill.water_level(model.observation, pt.R)[1]
        rows.append(
            {
                "R": r_in,
                "d_idrf": pt.d_idrf,
                "d_ce": pt.d_ce,
                "gap": pt.gap,
                "gap_ub": pt.gap_ub,
                "gap_lb": pt.gap_lb,
                "k_idrf": pt.k_idrf,
                "k_ce": pt.k_ce,
                "theta_idrf": theta_i,
                "theta_ce": theta_c,
            }
        )
    return rows


def _write_rows(rows: list[dict], out_path: str, fmt: str) -> None:
    if fmt == "csv":
        lines = [CSV_HEADER]
        for row in rows:
            lines.append(
                ",".join(
                    [
                        _fmt(row["R"]),
                        _fmt(row["d_idrf"]),
                        _fmt(row["d_ce"]),
                        _fmt(row["gap"]),
                        _fmt(row["gap_ub"]),
                        _fmt(row["gap_lb"]),
                        str(row["k_idrf"]),
                        str(row["k_ce"]),
                        _fmt(row["theta_idrf"]),
                        _fmt(row["theta_ce"]),
                    ]
                )
            )
        Path(out_path).write_text("\n".join(lines) + "\n")
    else:
        Path(out_path).write_text(json.dumps({"rows": rows}, indent=2) + "\n")


def cmd_sweep(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    if args.steps < 2:
        raise drf.InvalidGrid(f"steps must be >= 2, got {args.steps}")
    if not (0.0 <= args.min < args.max):
        raise drf.InvalidGrid(f"need 0 <= min < max, got min={args.min}, max={args.max}")
    grid = [float(r) for r in np.linspace(args.min, args.max, args.steps)]
    rows = _sweep_rows(model, grid, args.nats)
    _write_rows(rows, args.out, args.format)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    tolerance: float
    observed: float
    passed: bool


def _random_verify_model(rng: np.random.Generator) -> ObservationModel:
    m = int(rng.integers(1, 6))
    l_dim = int(rng.integers(1, 6))
    a = rng.uniform(-2.0, 2.0, size=(l_dim, m))
    sigma2 = float(rng.choice([0.1, 1.0, 10.0]))
    return ObservationModel(Matrix(a), sigma2)


def _check_oracle_equivalence(model: ObservationModel) -> CheckResult:
    grid = [0.0, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0, 12.0]
    for t in waterfill.rate_thresholds(model.observation)[:-1]:
        if t > 0.0:
            grid.extend([max(0.0, t - 0.05), t + 0.05])
    worst = max(abs(oracle.ce_matrix_form(model, r) - drf.ce_drf(model, r)) for r in grid)
    return CheckResult("oracle-equivalence", 1e-9, worst, worst < 1e-9)


def _check_equality_region(model: ObservationModel, rng: np.random.Generator) -> CheckResult:
    region = drf.equality_region(model)
    cap = min(region.R_limit, 12.0)
    rates = [float(rng.uniform(0.0, cap)) for _ in range(20)] + [cap]
    worst = max(abs(drf.ce_drf(model, r) - drf.idrf(model, r)) for r in rates)
    return CheckResult("equality-region", 1e-10, worst, worst < 1e-10)


def _check_bounds_and_monotonicity(model: ObservationModel) -> list[CheckResult]:
    points = drf.sweep(model, [float(r) for r in np.linspace(0.0, 12.0, 50)])
    violation = 0.0
    for pt in points:
        violation = max(
            violation,
            pt.gap_lb - pt.gap,
            pt.gap - pt.gap_ub,
            -(pt.d_ce - pt.d_idrf),
        )
    increase = 0.0
    for a, b in zip(points, points[1:]):
        increase = max(increase, b.d_idrf - a.d_idrf, b.d_ce - a.d_ce)
    return [
        CheckResult("bound-sandwich", 1e-10, violation, violation <= 1e-10),
        CheckResult("monotonicity", 1e-12, increase, increase <= 1e-12),
    ]


def _check_monte_carlo(model: ObservationModel, samples: int, seed: int) -> list[CheckResult]:
    results = []
    for name, mc_fn, closed_fn in (
        ("monte-carlo-ce", oracle.mc_ce, drf.ce_drf),
        ("monte-carlo-idrf", oracle.mc_idrf, drf.idrf),
    ):
        worst = None
        for r in (0.5, 1.0, 3.0):
            est = mc_fn(model, r, samples, seed)
            diff = abs(est.mean - closed_fn(model, r))
            tol = max(4.0 * est.stderr, 1e-3)
            if worst is None or diff - tol > worst[0] - worst[1]:
                worst = (diff, tol)
        results.append(CheckResult(name, worst[1], worst[0], worst[0] < worst[1]))
    est = oracle.mc_mmse(model, samples, seed)
    diff = abs(est.mean - model.mmse_floor)
    tol = max(4.0 * est.stderr, 1e-3)
    results.append(CheckResult("monte-carlo-mmse", tol, diff, diff < tol))
    return results


def cmd_verify(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    if args.random is not None:
        models = [(_random_verify_model(rng), f"random[{i}]") for i in range(args.random)]
    else:
        models = [(load_model(args.model), str(args.model))]
    failures = 0
    for model, label in models:
        print(f"== {label}: M={model.M} L={model.L} sigma2={model.sigma2}")
        checks = [_check_oracle_equivalence(model), _check_equality_region(model, rng)]
        checks.extend(_check_bounds_and_monotonicity(model))
        checks.extend(_check_monte_carlo(model, args.samples, args.seed))
        for c in checks:
            status = "PASS" if c.passed else "FAIL"
            print(f"  {status} {c.name:<18} observed {c.observed:.3e}  tol {c.tolerance:.3e}")
            failures += 0 if c.passed else 1
    total = "all checks passed" if failures == 0 else f"{failures} check(s) FAILED"
    print(total)
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# example
# ---------------------------------------------------------------------------


def cmd_example(args: argparse.Namespace) -> int:
    model = example_model()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    thr_cond = waterfill.rate_thresholds(model.conditional)[1]
    thr_obs = waterfill.rate_thresholds(model.observation)[1]
    region = drf.equality_region(model)
    r_star, g_star = drf.max_gap_2d(20.0, 0.5, 1.0)
    print(f"second activation (conditional): {thr_cond:.6f} bits")
    print(f"second activation (observation): {thr_obs:.6f} bits")
    print(f"equality region: r0={region.r0} R_limit={region.R_limit:.6f} bits")
    print(f"max gap: {g_star:.6f} at R = {r_star:.6f} bits")
    print(f"mmse floor: {model.mmse_floor:.6f}")

    grid = [float(r) for r in np.linspace(0.0, 4.5, 451)]
    points = drf.sweep(model, grid)
    curves = out_dir / "drf_curves.csv"
    gaps = out_dir / "gap_curve.csv"
    curves.write_text(
        "\n".join(
            ["R,d_idrf,d_ce"]
            + [f"{_fmt(p.R)},{_fmt(p.d_idrf)},{_fmt(p.d_ce)}" for p in points]
        )
        + "\n"
    )
    gaps.write_text(
        "\n".join(["R,gap"] + [f"{_fmt(p.R)},{_fmt(p.gap)}" for p in points]) + "\n"
    )
    print(f"wrote {curves} and {gaps}")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cedrf",
        description="Distortion-rate curves for remote Gaussian vector sources",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="full report for one model at one rate")
    p_an.add_argument("model", help="model JSON file")
    p_an.add_argument("--rate", type=float, required=True, help="rate (bits, or nats with --nats)")
    p_an.add_argument("--nats", action="store_true", help="rates in/out are nats")
    p_an.add_argument("--json", metavar="PATH", help="also write the report as JSON")
    p_an.set_defaults(func=cmd_analyze)

    p_sw = sub.add_parser("sweep", help="evaluate the curves on a rate grid")
    p_sw.add_argument("model", help="model JSON file")
    p_sw.add_argument("--min", type=float, required=True)
    p_sw.add_argument("--max", type=float, required=True)
    p_sw.add_argument("--steps", type=int, required=True)
    p_sw.add_argument("--out", required=True, help="output file")
    p_sw.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sw.add_argument("--nats", action="store_true", help="rates in/out are nats")
    p_sw.set_defaults(func=cmd_sweep)

    p_ve = sub.add_parser("verify", help="check closed forms against the oracles")
    p_ve.add_argument("model", nargs="?", help="model JSON file")
    p_ve.add_argument("--random", type=int, metavar="N", help="verify N random models instead")
    p_ve.add_argument("--samples", type=int, default=100_000, help="Monte Carlo samples per run")
    p_ve.add_argument("--seed", type=int, default=20240117, help="seed for models and sampling")
    p_ve.set_defaults(func=cmd_verify)

    p_ex = sub.add_parser("example", help="built-in two-component demonstration model")
    p_ex.add_argument("--out", default=".", help="directory for the figure CSV files")
    p_ex.set_defaults(func=cmd_example)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and (args.model is None) == (args.random is None):
        parser.error("verify needs exactly one of: a model file, or --random N")
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return 2
    except (ParseError, InvalidModel) as exc:
        print(f"error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
