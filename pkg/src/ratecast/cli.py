"""Command-line front end: ``ratecast fit | forecast | simulate``.

All outputs are deterministic for a fixed configuration and seed: files are
written in input order, floats are serialized with ``repr`` and reports
carry no timestamps.  Per-maturity failures never abort a batch run; they
are collected into ``errors.json`` and flip the exit code to 1.
"""

from __future__ import annotations

import datetime as dt
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor

import click

from ratecast import __version__
from ratecast.backtest import FitReport, ForecastReport, fit_sample, forecast_rolling
from ratecast.errors import RatecastError
from ratecast.marketdata import (
    classify_maturity,
    load_rate_matrix,
    series_for,
    write_rate_matrix,
)
from ratecast.models import CIR, MODELS, VASICEK, ModelParams
from ratecast.synthetic import ColumnSpec, Segment, synthetic_matrix

_KIND_FOR_MODEL = {VASICEK: "normal", CIR: "ncx2"}


def _check_unit_interval(_ctx, param, value):
    if not (0.0 < value < 1.0):
        raise click.BadParameter(f"{param.name} must be in (0, 1), got {value}")
    return value


def _safe_name(label: str) -> str:
    return label.replace("/", "-")


def _dump_json(payload: dict, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return "" if math.isnan(value) else repr(value)
    return str(value)


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fit_csv_rows(report: FitReport, dates, market) -> list[list]:
    group_of = {}
    for gid, g in enumerate(report.per_group):
        for i in range(g.start, g.end + 1):
            group_of[i] = gid
    rows = []
    for i, fitted in enumerate(report.fitted_path):
        rows.append(
            [
                i,
                dates[i].isoformat() if dates else "",
                float(market[i]),
                fitted if not math.isnan(fitted) else None,
                group_of.get(i, None),
            ]
        )
    return rows


def _resolve_maturities(matrix, requested) -> list[str]:
    if not requested or list(requested) == ["all"]:
        return list(matrix.maturities)
    missing = [m for m in requested if m not in matrix.maturities]
    if missing:
        raise click.UsageError(f"unknown maturities: {', '.join(missing)}")
    return list(requested)


def _dataset_of(label: str) -> str:
    try:
        return classify_maturity(label)
    except RatecastError:
        return "other"


@click.group()
@click.version_option(version=__version__, prog_name="ratecast")
def main() -> None:
    """Forecast interest rates by maturity with partition-calibrated models."""


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--maturity", "maturities", multiple=True, help="Maturity label; repeatable. Default: all.")
@click.option("--model", type=click.Choice([VASICEK, CIR, "both"]), default="both", show_default=True)
@click.option("--kind", type=click.Choice(["normal", "ncx2", "auto"]), default="auto", show_default=True)
@click.option("--level", type=float, default=0.05, show_default=True, callback=_check_unit_interval)
@click.option("--output-dir", required=True, type=click.Path(file_okay=False))
@click.option("--formats", default="json,csv", show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
def fit(input_path, maturities, model, kind, level, output_dir, formats, jobs):
    """Segmented whole-sample fit per maturity; writes reports and a summary."""
    matrix = _load(input_path)
    labels = _resolve_maturities(matrix, maturities)
    models = [VASICEK, CIR] if model == "both" else [model]
    kinds = ["normal", "ncx2"] if kind == "auto" else [kind]
    os.makedirs(output_dir, exist_ok=True)
    formats = {f.strip() for f in formats.split(",") if f.strip()}

    def run(label: str):
        series = series_for(matrix, label)
        out, errs = {}, {}
        for mdl in models:
            for knd in kinds:
                try:
                    out[(mdl, knd)] = fit_sample(series, knd, mdl, level)
                except (RatecastError, ValueError) as exc:
                    errs[f"{mdl}/{knd}"] = str(exc)
        return out, errs

    results, errors = _run_pool(labels, run, jobs)

    summary_rows = []
    for label in labels:
        dataset = _dataset_of(label)
        reports = results.get(label, {})
        best = {}
        if kind == "auto":
            for mdl in models:
                cands = [(reports[(mdl, k)].total_rmse, k) for k in kinds if (mdl, k) in reports]
                if cands:
                    best[mdl] = min(cands)[1]
        for mdl in models:
            for knd in kinds:
                report = reports.get((mdl, knd))
                if report is None:
                    continue
                stem = f"fit_{_safe_name(label)}_{mdl}_{knd}"
                if "json" in formats:
                    _dump_json(report.to_dict(), os.path.join(output_dir, stem + ".json"))
                if "csv" in formats:
                    _write_csv(
                        os.path.join(output_dir, stem + ".csv"),
                        ["index", "date", "market", "fitted", "group"],
                        _fit_csv_rows(report, matrix.dates, series_for(matrix, label).rates),
                    )
                summary_rows.append(
                    [
                        label,
                        dataset,
                        mdl,
                        knd,
                        report.total_rmse,
                        len(report.per_group),
                        "yes" if best.get(mdl) == knd else ("" if kind != "auto" else "no"),
                    ]
                )
    _write_csv(
        os.path.join(output_dir, "fit_summary.csv"),
        ["maturity", "dataset", "model", "kind", "total_rmse", "groups", "selected"],
        summary_rows,
    )
    _finish(output_dir, labels, results, errors, len(models) * len(kinds))


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--maturity", "maturities", multiple=True, help="Maturity label; repeatable. Default: all.")
@click.option("--model", type=click.Choice([VASICEK, CIR, "both"]), default="both", show_default=True)
@click.option("--kind", type=click.Choice(["normal", "ncx2", "auto"]), default="auto", show_default=True,
              help="auto pairs vasicek->normal, cir->ncx2")
@click.option("--level", type=float, default=0.05, show_default=True, callback=_check_unit_interval)
@click.option("--window", "-m", "window", type=int, default=52, show_default=True, help="Initial rolling window size.")
@click.option("--ewma-lambda", type=float, default=0.94, show_default=True, callback=_check_unit_interval)
@click.option("--output-dir", required=True, type=click.Path(file_okay=False))
@click.option("--formats", default="json,csv", show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
def forecast(input_path, maturities, model, kind, level, window, ewma_lambda, output_dir, formats, jobs):
    """Rolling next-step forecasts per maturity, benchmarked against EWMA."""
    matrix = _load(input_path)
    labels = _resolve_maturities(matrix, maturities)
    if window < 12:
        raise click.UsageError(f"--window must be >= 12, got {window}")
    if window >= len(matrix.dates):
        raise click.UsageError(
            f"--window {window} must be smaller than the series length {len(matrix.dates)}"
        )
    models = [VASICEK, CIR] if model == "both" else [model]
    os.makedirs(output_dir, exist_ok=True)
    formats = {f.strip() for f in formats.split(",") if f.strip()}

    def run(label: str):
        series = series_for(matrix, label)
        out, errs = {}, {}
        for mdl in models:
            knd = _KIND_FOR_MODEL[mdl] if kind == "auto" else kind
            try:
                out[(mdl, knd)] = forecast_rolling(
                    series, knd, mdl, m=window, level=level, ewma_lam=ewma_lambda
                )
            except (RatecastError, ValueError) as exc:
                errs[f"{mdl}/{knd}"] = str(exc)
        return out, errs

    results, errors = _run_pool(labels, run, jobs)

    ordered = [l for l in labels if _dataset_of(l) == "money_market"]
    ordered += [l for l in labels if l not in set(ordered)]
    comparison = []
    for label in ordered:
        reports = results.get(label, {})
        by_model = {mdl: rep for (mdl, _), rep in reports.items()}
        ewma_rmse = next((rep.rmse_ewma for rep in by_model.values()), None)
        comparison.append(
            [
                label,
                _dataset_of(label),
                by_model[VASICEK].rmse_model if VASICEK in by_model else None,
                by_model[CIR].rmse_model if CIR in by_model else None,
                ewma_rmse,
            ]
        )
        for (mdl, knd), report in reports.items():
            stem = f"forecast_{_safe_name(label)}_{mdl}_{knd}"
            if "json" in formats:
                _dump_json(report.to_dict(), os.path.join(output_dir, stem + ".json"))
            if "csv" in formats:
                _write_csv(
                    os.path.join(output_dir, stem + ".csv"),
                    ["index", "date", "realized", "model_forecast", "ewma_forecast",
                     "window_size", "change_point", "fallback"],
                    [
                        [r.index, matrix.dates[r.index].isoformat(), r.realized,
                         r.model_forecast, r.ewma_forecast, r.window_size,
                         r.change_point, int(r.fallback)]
                        for r in report.records
                    ],
                )
    _write_csv(
        os.path.join(output_dir, "forecast_comparison.csv"),
        ["maturity", "dataset", "rmse_vasicek", "rmse_cir", "rmse_ewma"],
        comparison,
    )
    _finish(output_dir, labels, results, errors, len(models))


@main.command()
@click.option("--output", "output_path", required=True, type=click.Path(dir_okay=False))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--spec-file", type=click.Path(exists=True, dir_okay=False),
              help="JSON schedule: columns with per-segment parameters.")
@click.option("--label", default="1Y", show_default=True)
@click.option("--model", type=click.Choice(list(MODELS)), default=CIR, show_default=True)
@click.option("--kappa", type=float, default=0.2, show_default=True)
@click.option("--theta", type=float, default=3.0, show_default=True)
@click.option("--sigma", type=float, default=0.2, show_default=True)
@click.option("--r0", type=float, default=3.0, show_default=True)
@click.option("--steps", type=int, default=307, show_default=True)
@click.option("--start-date", default="2010-12-31", show_default=True)
@click.option("--freq-days", type=int, default=7, show_default=True)
def simulate(output_path, seed, spec_file, label, model, kappa, theta, sigma, r0,
             steps, start_date, freq_days):
    """Generate a synthetic rate matrix by exact-transition simulation."""
    try:
        start = dt.date.fromisoformat(start_date)
    except ValueError:
        raise click.UsageError(f"bad --start-date {start_date!r}") from None
    try:
        if spec_file:
            columns, start, freq_days = _parse_sim_spec(spec_file, start, freq_days)
        else:
            params = ModelParams(model, kappa, theta, sigma)
            columns = [ColumnSpec(label, r0, (Segment(steps, params),))]
        matrix = synthetic_matrix(columns, seed, start_date=start, freq_days=freq_days)
    except (ValueError, RatecastError) as exc:
        raise click.UsageError(str(exc)) from None
    parent = os.path.dirname(output_path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    write_rate_matrix(matrix, output_path)
    click.echo(f"wrote {matrix.values.shape[0]}x{matrix.values.shape[1]} matrix to {output_path}")


def _parse_sim_spec(path, start, freq_days):
    with open(path) as fh:
        spec = json.load(fh)
    if "start_date" in spec:
        start = dt.date.fromisoformat(spec["start_date"])
    freq_days = int(spec.get("freq_days", freq_days))
    columns = []
    for col in spec["columns"]:
        segments = tuple(
            Segment(
                int(seg["steps"]),
                ModelParams(col["model"], float(seg["kappa"]), float(seg["theta"]),
                            float(seg["sigma"])),
            )
            for seg in col["segments"]
        )
        columns.append(ColumnSpec(str(col["label"]), float(col["r0"]), segments))
    return columns, start, freq_days


def _load(path):
    try:
        return load_rate_matrix(path)
    except RatecastError as exc:
        raise click.ClickException(str(exc)) from None


def _run_pool(labels, run, jobs):
    results, errors = {}, {}
    if jobs <= 1:
        pairs = [run(label) for label in labels]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            pairs = list(pool.map(run, labels))
    for label, (out, errs) in zip(labels, pairs):
        results[label] = out
        if errs:
            errors[label] = errs
    return results, errors


def _finish(output_dir, labels, results, errors, expected_per_label):
    produced = sum(len(v) for v in results.values())
    expected = len(labels) * expected_per_label
    if errors:
        _dump_json({"errors": errors}, os.path.join(output_dir, "errors.json"))
        click.echo(f"{expected - produced} of {expected} runs failed; see errors.json", err=True)
        raise SystemExit(1)
    click.echo(f"wrote {produced} reports to {output_dir}")


if __name__ == "__main__":
    main()
