use anyhow::{bail, Context, Result};
use chrono::{Datelike, NaiveDate};

use levdecay::analysis::{
    dominance_curves, optimal_leverage_curves_in, rolling_volatility, threshold_report,
    validate_approximation, WindowEnd,
};
use levdecay::chart::{Chart, Series};
use levdecay::market_data::{load_annual, load_daily, real_returns as annual_real_returns, trend_slope};
use levdecay::model::{daily_changes, FeePair, Leverage};
use levdecay::report;

use crate::output::Outputs;
use crate::{RealReturnArgs, RollingVolArgs, ThresholdArgs, ValidateArgs};

fn decimal_year(d: NaiveDate) -> f64 {
    let days_in_year = if d.leap_year() { 366.0 } else { 365.0 };
    d.year() as f64 + d.ordinal0() as f64 / days_in_year
}

fn x_of(end: &WindowEnd) -> f64 {
    end.date.map_or(end.index as f64, decimal_year)
}

pub fn rolling_vol(args: &RollingVolArgs) -> Result<()> {
    let prices = load_daily(&args.input)?;
    let changes = daily_changes(&prices);
    let points = rolling_volatility(&changes, args.window, args.stride)?;
    let out = Outputs::new(&args.output)?;
    out.primary("rolling_vol.csv", |w| report::write_rolling_volatility(&points, w))?;
    let chart = Chart::new(
        format!("Rolling sqrt(v), {}-day window", args.window),
        "year",
        "sqrt(v)",
    )
    .with_series(Series::new(
        "sqrt(v)",
        points.iter().map(|p| (x_of(&p.end), p.sqrt_v)).collect(),
    ));
    out.chart("rolling_vol", &chart)
}

pub fn validate(args: &ValidateArgs) -> Result<()> {
    let leverages = args
        .leverages
        .iter()
        .map(|&l| Leverage::new(l))
        .collect::<Result<Vec<_>, _>>()?;
    if leverages.is_empty() || args.windows.is_empty() {
        bail!("at least one leverage and one window length are required");
    }
    let prices = load_daily(&args.input)?;
    let changes = daily_changes(&prices);
    let report = validate_approximation(&changes, &leverages, &args.windows, args.stride)?;

    let out = Outputs::new(&args.output)?;
    out.primary("validation_summary.csv", |w| report::write_validation_summary(&report, w))?;
    out.table("validation_records.csv", |w| report::write_validation_records(&report, w))?;
    out.table("validation_skipped.csv", |w| report::write_skipped_windows(&report, w))?;

    let mut chart = Chart::new(
        "log10(max(|exact|, |n g(L)|)) where signs disagree",
        "year",
        "log10 error",
    );
    for s in &report.summary {
        let points = report
            .records
            .iter()
            .filter(|r| r.n == s.n && r.leverage == s.leverage)
            .filter_map(|r| r.err_metric.map(|m| (x_of(&r.end), m)))
            .collect();
        chart = chart.with_series(Series::new(format!("L={} n={}", s.leverage, s.n), points));
    }
    let disagreements: usize = report.summary.iter().map(|s| s.disagreements).sum();
    if disagreements == 0 {
        if out.charts_enabled() {
            eprintln!("levdecay: no sign disagreements; validation.svg not written");
        }
        return Ok(());
    }
    out.chart("validation", &chart)
}

fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
            .collect(),
    }
}

pub fn thresholds(args: &ThresholdArgs) -> Result<()> {
    if args.inflations.is_empty() {
        bail!("at least one inflation rate is required");
    }
    if !(args.grid_min > 0.0 && args.grid_max >= args.grid_min && args.grid_points >= 1) {
        bail!(
            "sqrt(v) grid needs 0 < --grid-min <= --grid-max and --grid-points >= 1 (got {}, {}, {})",
            args.grid_min,
            args.grid_max,
            args.grid_points
        );
    }
    let fees = FeePair::with_trading_days(args.r0, args.r1, args.trading_days)?;
    let report = threshold_report(&args.inflations, &fees, args.base_real, &args.probe_sqrt_v)?;
    let grid = linspace(args.grid_min, args.grid_max, args.grid_points);
    let curves =
        optimal_leverage_curves_in(&args.inflations, &grid, args.base_real, args.trading_days)?;

    let out = Outputs::new(&args.output)?;
    out.primary("thresholds.csv", |w| report::write_thresholds(&report, w))?;
    out.table("optimal_leverage.csv", |w| report::write_optimal_leverage(&curves, w))?;

    let mut lev_chart = Chart::new("Optimal leverage u/v + 1/2", "sqrt(v)", "leverage");
    for c in &curves.curves {
        lev_chart = lev_chart.with_series(Series::new(
            format!("inflation {}", c.inflation),
            grid.iter().copied().zip(c.leverage.iter().copied()).collect(),
        ));
    }
    out.chart("optimal_leverage", &lev_chart)?;

    let top = report
        .rows
        .iter()
        .map(|r| r.annual_log_return)
        .fold(0.12, f64::max);
    let sweep = linspace(0.0, top, 241);
    let bounds = dominance_curves(&sweep, &fees).context("dominance bounds sweep")?;
    let lower = bounds.iter().filter_map(|(a, iv)| iv.map(|iv| (*a, iv.sqrt_v_minus()))).collect();
    let upper = bounds.iter().filter_map(|(a, iv)| iv.map(|iv| (*a, iv.sqrt_v_plus()))).collect();
    let bounds_chart = Chart::new(
        format!("Dominance bounds, r1 - r0 = {}", fees.r1() - fees.r0()),
        "annual log-return (trading days x u)",
        "sqrt(v)",
    )
    .with_series(Series::new("sqrt(v+)", upper))
    .with_series(Series::new("sqrt(v-)", lower));
    out.chart("dominance_bounds", &bounds_chart)
}

pub fn real_returns(args: &RealReturnArgs) -> Result<()> {
    let records = load_annual(&args.input)?;
    let series = annual_real_returns(&records)?;
    let out = Outputs::new(&args.output)?;
    out.primary("real_returns.csv", |w| report::write_real_returns(&series, w))?;
    out.table("real_returns_trend.csv", |w| report::write_real_return_trend(&series, w))?;

    let slope = trend_slope(&series);
    let years = series.years();
    let first = years[0];
    let cumulative = years
        .iter()
        .zip(series.cumulative_logs())
        .map(|(y, c)| (f64::from(*y + 1), c))
        .collect();
    let trend = std::iter::once((f64::from(first), 0.0))
        .chain(
            years
                .iter()
                .enumerate()
                .map(|(k, y)| (f64::from(*y + 1), slope * (k + 1) as f64)),
        )
        .collect();
    let chart = Chart::new(
        format!("Cumulative real log-return, slope {slope:.4}"),
        "year",
        "cumulative log-return",
    )
    .with_series(Series::new("cumulative", cumulative))
    .with_series(Series::new("trend", trend));
    out.chart("real_returns", &chart)
}
