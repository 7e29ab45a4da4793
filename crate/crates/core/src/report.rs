//! CSV serialization of analysis results.
//!
//! Headers are a stable interface:
//!
//! | file | header |
//! |------|--------|
//! | rolling volatility | `end_date,sqrt_v` |
//! | validation records | `end_date,n,leverage,exact_diff,approx,agree,err_metric,remainder_bound` |
//! | skipped windows | `end_date,n,leverage,reason` |
//! | validation summary | `leverage,n,windows,disagreements,skipped,disagreement_rate,max_err_metric` |
//! | thresholds | `inflation,annual_log_return,u,r0,r1,fee_gap,v_minus,v_plus,sqrt_v_minus,sqrt_v_plus,interval_absent,opt_leverage_at_sqrt_v_<p>...` |
//! | optimal leverage | `inflation,u,sqrt_v,optimal_leverage` |
//! | real returns | `year,gross_real_return,log_real_return,cumulative_log_return` |
//! | real return trend | `first_year,last_year,years,trend_slope` |
//!
//! `end_date` holds the ISO date of the window's last close, or the
//! zero-based index of its last change when the series is undated. Absent
//! values are empty fields.

use std::io::Write;

use crate::analysis::{
    OptimalLeverageCurves, RollingVolPoint, ThresholdReport, ValidationReport,
};
use crate::market_data::{trend_slope, RealReturnSeries};

type CsvResult = csv::Result<()>;

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> CsvResult {
    w.flush()?;
    Ok(())
}

pub fn write_rolling_volatility<W: Write>(points: &[RollingVolPoint], out: W) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["end_date", "sqrt_v"])?;
    for p in points {
        w.write_record([p.end.to_string(), p.sqrt_v.to_string()])?;
    }
    finish(w)
}

pub fn write_validation_records<W: Write>(report: &ValidationReport, out: W) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "end_date",
        "n",
        "leverage",
        "exact_diff",
        "approx",
        "agree",
        "err_metric",
        "remainder_bound",
    ])?;
    for r in &report.records {
        w.write_record([
            r.end.to_string(),
            r.n.to_string(),
            r.leverage.to_string(),
            r.exact_diff.to_string(),
            r.approx.to_string(),
            r.agree.to_string(),
            opt(r.err_metric),
            opt(r.remainder_bound),
        ])?;
    }
    finish(w)
}

pub fn write_skipped_windows<W: Write>(report: &ValidationReport, out: W) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["end_date", "n", "leverage", "reason"])?;
    for s in &report.skipped {
        w.write_record([
            s.end.to_string(),
            s.n.to_string(),
            s.leverage.to_string(),
            s.reason.clone(),
        ])?;
    }
    finish(w)
}

pub fn write_validation_summary<W: Write>(report: &ValidationReport, out: W) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "leverage",
        "n",
        "windows",
        "disagreements",
        "skipped",
        "disagreement_rate",
        "max_err_metric",
    ])?;
    for s in &report.summary {
        w.write_record([
            s.leverage.to_string(),
            s.n.to_string(),
            s.windows.to_string(),
            s.disagreements.to_string(),
            s.skipped.to_string(),
            s.disagreement_rate().to_string(),
            opt(s.max_err_metric),
        ])?;
    }
    finish(w)
}

pub fn write_thresholds<W: Write>(report: &ThresholdReport, out: W) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = [
        "inflation",
        "annual_log_return",
        "u",
        "r0",
        "r1",
        "fee_gap",
        "v_minus",
        "v_plus",
        "sqrt_v_minus",
        "sqrt_v_plus",
        "interval_absent",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    header.extend(
        report
            .probe_sqrt_v
            .iter()
            .map(|p| format!("opt_leverage_at_sqrt_v_{p}")),
    );
    w.write_record(&header)?;
    let fee_gap = report.fees.leveraged_cost();
    for row in &report.rows {
        let iv = row.interval;
        let mut rec = vec![
            row.inflation.to_string(),
            row.annual_log_return.to_string(),
            row.u.to_string(),
            report.fees.r0().to_string(),
            report.fees.r1().to_string(),
            fee_gap.to_string(),
            opt(iv.map(|i| i.v_minus())),
            opt(iv.map(|i| i.v_plus())),
            opt(iv.map(|i| i.sqrt_v_minus())),
            opt(iv.map(|i| i.sqrt_v_plus())),
            row.interval_absent().to_string(),
        ];
        rec.extend(row.optimal_leverage.iter().map(|l| l.to_string()));
        w.write_record(&rec)?;
    }
    finish(w)
}

pub fn write_optimal_leverage<W: Write>(curves: &OptimalLeverageCurves, out: W) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["inflation", "u", "sqrt_v", "optimal_leverage"])?;
    for c in &curves.curves {
        for (s, l) in curves.sqrt_v_grid.iter().zip(&c.leverage) {
            w.write_record([
                c.inflation.to_string(),
                c.u.to_string(),
                s.to_string(),
                l.to_string(),
            ])?;
        }
    }
    finish(w)
}

pub fn write_real_returns<W: Write>(series: &RealReturnSeries, out: W) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "year",
        "gross_real_return",
        "log_real_return",
        "cumulative_log_return",
    ])?;
    let rows = series
        .years()
        .iter()
        .zip(series.gross())
        .zip(series.logs())
        .zip(series.cumulative_logs());
    for (((year, gross), log), cum) in rows {
        w.write_record([
            year.to_string(),
            gross.to_string(),
            log.to_string(),
            cum.to_string(),
        ])?;
    }
    finish(w)
}

pub fn write_real_return_trend<W: Write>(series: &RealReturnSeries, out: W) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["first_year", "last_year", "years", "trend_slope"])?;
    let years = series.years();
    w.write_record([
        years[0].to_string(),
        years[years.len() - 1].to_string(),
        series.len().to_string(),
        trend_slope(series).to_string(),
    ])?;
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{rolling_volatility, threshold_report, validate_approximation};
    use crate::model::{ChangeSeries, FeePair, Leverage};

    fn text(f: impl FnOnce(&mut Vec<u8>) -> CsvResult) -> String {
        let mut buf = Vec::new();
        f(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn rolling_header_and_rows() {
        let s = ChangeSeries::new(vec![0.01, -0.01, 0.02]).unwrap();
        let pts = rolling_volatility(&s, 2, 1).unwrap();
        let out = text(|b| write_rolling_volatility(&pts, b));
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "end_date,sqrt_v");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("1,"));
    }

    #[test]
    fn validation_files() {
        let s = ChangeSeries::new(vec![0.01, -0.01, 0.0, 0.02]).unwrap();
        let ls = [Leverage::new(2.0).unwrap(), Leverage::new(3.0).unwrap()];
        let r = validate_approximation(&s, &ls, &[2], 1).unwrap();
        let summary = text(|b| write_validation_summary(&r, b));
        assert_eq!(summary.lines().count(), 3);
        assert!(summary.starts_with("leverage,n,windows,disagreements,skipped,"));
        let records = text(|b| write_validation_records(&r, b));
        assert_eq!(records.lines().count(), 1 + 6);
        let skipped = text(|b| write_skipped_windows(&r, b));
        assert_eq!(skipped, "end_date,n,leverage,reason\n");
    }

    #[test]
    fn threshold_columns() {
        let fees = FeePair::new(0.0, 0.0).unwrap();
        let r = threshold_report(&[0.0, -0.5], &FeePair::default(), 0.0658, &[0.01, 0.02]).unwrap();
        let out = text(|b| write_thresholds(&r, b));
        let header = out.lines().next().unwrap();
        assert!(header.ends_with("opt_leverage_at_sqrt_v_0.01,opt_leverage_at_sqrt_v_0.02"));
        let absent_row = out.lines().nth(2).unwrap();
        assert!(absent_row.contains(",,,,,true,"), "{absent_row}");
        let r = threshold_report(&[0.0], &fees, 0.0658, &[]).unwrap();
        assert_eq!(text(|b| write_thresholds(&r, b)).lines().count(), 2);
    }
}
