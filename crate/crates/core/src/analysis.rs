//! Windowed sweeps over daily changes and threshold tables.

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::market_data::{nominal_annual_log_return, nominal_u_in};
use crate::model::{
    dominance_interval, excess_g, leveraged_log_return, optimal_leverage, sign_agreement_bound,
    window_stats, ChangeSeries, DominanceInterval, FeePair, Leverage, WindowStats,
    TRADING_DAYS_PER_YEAR,
};

/// Trailing window for rolling `√v`: five years of trading days.
pub const DEFAULT_ROLLING_WINDOW: usize = 1260;
/// Step between window placements: about one trading month.
pub const DEFAULT_STRIDE: usize = 21;
pub const DEFAULT_VALIDATION_LEVERAGES: [f64; 2] = [2.0, 3.0];
/// One, five and ten years of trading days.
pub const DEFAULT_VALIDATION_WINDOWS: [usize; 3] = [252, 1260, 2520];
pub const DEFAULT_INFLATIONS: [f64; 5] = [0.0, 0.01, 0.02, 0.03, 0.04];

/// Last day of a window: its position in the change series and, when the
/// series is dated, the date of that close.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowEnd {
    pub index: usize,
    pub date: Option<NaiveDate>,
}

impl std::fmt::Display for WindowEnd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.date {
            Some(d) => write!(f, "{}", d.format("%Y-%m-%d")),
            None => write!(f, "{}", self.index),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RollingVolPoint {
    pub end: WindowEnd,
    pub sqrt_v: f64,
}

/// Start offsets of windows of `window` days stepping by `stride`.
fn placements(len: usize, window: usize, stride: usize) -> Result<impl Iterator<Item = usize>> {
    if window == 0 || stride == 0 {
        return Err(Error::Domain(format!(
            "window ({window}) and stride ({stride}) must be at least 1"
        )));
    }
    if window > len {
        return Err(Error::WindowTooLong { window, len });
    }
    Ok((0..=len - window).step_by(stride))
}

fn window_end(changes: &ChangeSeries, start: usize, window: usize) -> WindowEnd {
    let index = start + window - 1;
    WindowEnd {
        index,
        date: changes.date_at(index),
    }
}

/// `√v` over each trailing window of `window` days, stepping by `stride`.
pub fn rolling_volatility(
    changes: &ChangeSeries,
    window: usize,
    stride: usize,
) -> Result<Vec<RollingVolPoint>> {
    let xs = changes.as_slice();
    Ok(placements(xs.len(), window, stride)?
        .map(|start| {
            let sq: f64 = xs[start..start + window].iter().map(|x| x * x).sum();
            RollingVolPoint {
                end: window_end(changes, start, window),
                sqrt_v: (sq / window as f64).sqrt(),
            }
        })
        .collect())
}

/// Exact versus approximate excess of `LxI` over the index on one window,
/// both legs fee-free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationRecord {
    pub end: WindowEnd,
    pub n: usize,
    pub leverage: Leverage,
    /// `R_{n,0}^L - R_{n,0}^1`.
    pub exact_diff: f64,
    /// `n·g(L)`.
    pub approx: f64,
    /// `exact_diff·approx ≥ 0`.
    pub agree: bool,
    /// `log10(max(|exact_diff|, |approx|))`, only for disagreements.
    pub err_metric: Option<f64>,
    /// Remainder bound on `|exact_diff - approx|`, when every move is below 100%.
    pub remainder_bound: Option<f64>,
}

impl ValidationRecord {
    fn new(
        end: WindowEnd,
        stats: &WindowStats,
        leverage: Leverage,
        exact_diff: f64,
        remainder_bound: Option<f64>,
    ) -> Self {
        let approx = stats.n() as f64 * excess_g(stats, leverage);
        let agree = exact_diff * approx >= 0.0;
        let err_metric = (!agree).then(|| exact_diff.abs().max(approx.abs()).log10());
        Self {
            end,
            n: stats.n(),
            leverage,
            exact_diff,
            approx,
            agree,
            err_metric,
            remainder_bound,
        }
    }
}

/// A window that could not be checked, typically because the leveraged fund
/// was wiped out inside it.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedWindow {
    pub end: WindowEnd,
    pub n: usize,
    pub leverage: Leverage,
    pub reason: String,
}

/// Per `(L, n)` tallies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationSummary {
    pub leverage: Leverage,
    pub n: usize,
    pub windows: usize,
    pub disagreements: usize,
    pub skipped: usize,
    pub max_err_metric: Option<f64>,
}

impl ValidationSummary {
    pub fn disagreement_rate(&self) -> f64 {
        if self.windows == 0 {
            0.0
        } else {
            self.disagreements as f64 / self.windows as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub records: Vec<ValidationRecord>,
    pub skipped: Vec<SkippedWindow>,
    pub summary: Vec<ValidationSummary>,
}

/// Checks the sign of the quadratic approximation `n·g(L)` against the exact
/// excess log-return on every window placement, for each window length in
/// `windows` and each multiple in `leverages`.
///
/// Records are grouped by window length, then leverage, each group in window
/// order.
pub fn validate_approximation(
    changes: &ChangeSeries,
    leverages: &[Leverage],
    windows: &[usize],
    stride: usize,
) -> Result<ValidationReport> {
    let xs = changes.as_slice();
    let mut report = ValidationReport::default();
    for &n in windows {
        let starts: Vec<usize> = placements(xs.len(), n, stride)?.collect();
        for &leverage in leverages {
            let mut summary = ValidationSummary {
                leverage,
                n,
                windows: 0,
                disagreements: 0,
                skipped: 0,
                max_err_metric: None,
            };
            for &start in &starts {
                let window = &xs[start..start + n];
                let end = window_end(changes, start, n);
                let checked = window_stats(window).and_then(|stats| {
                    let exact = leveraged_log_return(window, leverage, 0.0)?
                        - leveraged_log_return(window, Leverage::UNLEVERAGED, 0.0)?;
                    let bound = sign_agreement_bound(window, leverage);
                    Ok(ValidationRecord::new(end, &stats, leverage, exact, bound))
                });
                match checked {
                    Ok(record) => {
                        summary.windows += 1;
                        if let Some(m) = record.err_metric {
                            summary.disagreements += 1;
                            summary.max_err_metric =
                                Some(summary.max_err_metric.map_or(m, |prev| prev.max(m)));
                        }
                        report.records.push(record);
                    }
                    Err(e) => {
                        summary.skipped += 1;
                        report.skipped.push(SkippedWindow {
                            end,
                            n,
                            leverage,
                            reason: e.to_string(),
                        });
                    }
                }
            }
            report.summary.push(summary);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRow {
    pub inflation: f64,
    pub annual_log_return: f64,
    pub u: f64,
    /// `None` when every `v` lets some leverage multiple win.
    pub interval: Option<DominanceInterval>,
    /// `u/v + 1/2` at each probe `√v`, in probe order.
    pub optimal_leverage: Vec<f64>,
}

impl ThresholdRow {
    pub fn interval_absent(&self) -> bool {
        self.interval.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    pub fees: FeePair,
    pub base_real: f64,
    pub probe_sqrt_v: Vec<f64>,
    pub rows: Vec<ThresholdRow>,
}

fn check_positive_grid(grid: &[f64], what: &str) -> Result<()> {
    match grid.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        Some(s) => Err(Error::Domain(format!("{what} value {s} must be positive"))),
        None => Ok(()),
    }
}

/// Dominance interval and optimal leverage at each probe volatility for the
/// projected `u` of every inflation rate.
pub fn threshold_report(
    inflations: &[f64],
    fees: &FeePair,
    base_real: f64,
    probe_sqrt_v: &[f64],
) -> Result<ThresholdReport> {
    check_positive_grid(probe_sqrt_v, "probe sqrt(v)")?;
    let rows = inflations
        .iter()
        .map(|&inflation| {
            let annual_log_return = nominal_annual_log_return(inflation, base_real)?;
            let u = nominal_u_in(inflation, base_real, fees.trading_days())?;
            let interval = dominance_interval(u, fees)?;
            let optimal_leverage = probe_sqrt_v
                .iter()
                .map(|s| Ok(optimal_leverage(&WindowStats::new(1, u, s * s)?)?.value()))
                .collect::<Result<_>>()?;
            Ok(ThresholdRow {
                inflation,
                annual_log_return,
                u,
                interval,
                optimal_leverage,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ThresholdReport {
        fees: *fees,
        base_real,
        probe_sqrt_v: probe_sqrt_v.to_vec(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeverageCurve {
    pub inflation: f64,
    pub u: f64,
    /// Optimal leverage at each grid `√v`.
    pub leverage: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalLeverageCurves {
    pub sqrt_v_grid: Vec<f64>,
    /// Highest inflation first.
    pub curves: Vec<LeverageCurve>,
}

/// `u/v + 1/2` over a grid of `√v` for each inflation rate's projected `u`.
pub fn optimal_leverage_curves(
    inflations: &[f64],
    sqrt_v_grid: &[f64],
    base_real: f64,
) -> Result<OptimalLeverageCurves> {
    optimal_leverage_curves_in(inflations, sqrt_v_grid, base_real, TRADING_DAYS_PER_YEAR)
}

/// [`optimal_leverage_curves`] with `u` spread over `trading_days` per year.
pub fn optimal_leverage_curves_in(
    inflations: &[f64],
    sqrt_v_grid: &[f64],
    base_real: f64,
    trading_days: f64,
) -> Result<OptimalLeverageCurves> {
    check_positive_grid(sqrt_v_grid, "sqrt(v) grid")?;
    let mut sorted = inflations.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let curves = sorted
        .into_iter()
        .map(|inflation| {
            let u = nominal_u_in(inflation, base_real, trading_days)?;
            let leverage = sqrt_v_grid
                .iter()
                .map(|s| Ok(optimal_leverage(&WindowStats::new(1, u, s * s)?)?.value()))
                .collect::<Result<_>>()?;
            Ok(LeverageCurve {
                inflation,
                u,
                leverage,
            })
        })
        .collect::<Result<_>>()?;
    Ok(OptimalLeverageCurves {
        sqrt_v_grid: sqrt_v_grid.to_vec(),
        curves,
    })
}

/// `[v⁻, v⁺]` across a sweep of annual log-returns (`u = annual/days`).
pub fn dominance_curves(
    annual_log_returns: &[f64],
    fees: &FeePair,
) -> Result<Vec<(f64, Option<DominanceInterval>)>> {
    annual_log_returns
        .iter()
        .map(|&a| Ok((a, dominance_interval(a / fees.trading_days(), fees)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(xs: &[f64]) -> ChangeSeries {
        ChangeSeries::new(xs.to_vec()).unwrap()
    }

    fn levs(ls: &[f64]) -> Vec<Leverage> {
        ls.iter().map(|&l| Leverage::new(l).unwrap()).collect()
    }

    #[test]
    fn rolling_examples() {
        let pts = rolling_volatility(&series(&[0.01, -0.01, 0.02]), 3, 1).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0].sqrt_v - 1.414213562373095e-2).abs() < 1e-15);
        assert_eq!(pts[0].end.index, 2);

        let pts = rolling_volatility(&series(&[0.0; 10]), 4, 2).unwrap();
        assert_eq!(pts.len(), 4);
        assert!(pts.iter().all(|p| p.sqrt_v == 0.0));

        let xs = [0.01, -0.03, 0.002, -0.0005];
        let pts = rolling_volatility(&series(&xs), 1, 1).unwrap();
        let abs: Vec<f64> = xs.iter().map(|x: &f64| x.abs()).collect();
        assert_eq!(pts.iter().map(|p| p.sqrt_v).collect::<Vec<_>>(), abs);
    }

    #[test]
    fn rolling_rejects_bad_windows() {
        let s = series(&[0.01, 0.02]);
        assert!(matches!(
            rolling_volatility(&s, 3, 1),
            Err(Error::WindowTooLong { window: 3, len: 2 })
        ));
        assert!(rolling_volatility(&s, 0, 1).is_err());
        assert!(rolling_volatility(&s, 1, 0).is_err());
    }

    #[test]
    fn rolling_stride_and_dates() {
        let d0 = NaiveDate::from_ymd_opt(2021, 3, 1).unwrap();
        let dates: Vec<_> = (0..7).map(|i| d0 + chrono::Days::new(i)).collect();
        let s = ChangeSeries::with_dates(vec![0.01; 7], dates.clone()).unwrap();
        let pts = rolling_volatility(&s, 3, 2).unwrap();
        let ends: Vec<_> = pts.iter().map(|p| p.end.date.unwrap()).collect();
        assert_eq!(ends, vec![dates[2], dates[4], dates[6]]);
        assert_eq!(pts[0].end.to_string(), "2021-03-03");
    }

    #[test]
    fn validation_two_day_example() {
        let r = validate_approximation(&series(&[0.01, -0.01]), &levs(&[2.0]), &[2], 1).unwrap();
        assert_eq!(r.records.len(), 1);
        let rec = r.records[0];
        assert!((rec.exact_diff - -3.00075021006377e-4).abs() < 1e-15);
        assert!((rec.approx - -3.000050003333583e-4).abs() < 1e-15);
        assert!(rec.agree);
        assert_eq!(rec.err_metric, None);
        assert_eq!(r.summary[0].windows, 1);
        assert_eq!(r.summary[0].disagreements, 0);
    }

    #[test]
    fn validation_zero_window_agrees() {
        let r = validate_approximation(&series(&[0.0; 5]), &levs(&[2.0, 3.0]), &[5, 3], 1).unwrap();
        assert!(r.records.iter().all(|rec| rec.exact_diff == 0.0 && rec.approx == 0.0 && rec.agree));
        assert_eq!(r.summary.len(), 4);
        assert_eq!(r.records.len(), 2 + 2 * 3);
    }

    // A large down move with small up moves tuned so that n·g(L) is barely
    // positive; the cubic remainder then pulls the exact excess negative.
    #[test]
    fn validation_flags_sign_flip_near_boundary() {
        let l = Leverage::new(2.0).unwrap();
        let build = |c: f64| {
            let mut xs = vec![-0.05];
            xs.extend(std::iter::repeat_n(c, 9));
            xs
        };
        let approx_at = |c: f64| {
            let xs = build(c);
            let s = window_stats(&xs).unwrap();
            s.n() as f64 * excess_g(&s, l)
        };
        let (mut lo, mut hi) = (0.0, 0.05);
        assert!(approx_at(lo) < 0.0 && approx_at(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if approx_at(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let xs = build(hi);
        let r = validate_approximation(&series(&xs), &[l], &[xs.len()], 1).unwrap();
        let rec = r.records[0];
        assert!(rec.approx > 0.0);
        assert!(rec.exact_diff < 0.0);
        assert!(!rec.agree);
        let metric = rec.err_metric.unwrap();
        assert!(metric < -3.0, "metric {metric}");
        assert!(rec.exact_diff.abs() <= rec.remainder_bound.unwrap());
        assert_eq!(r.summary[0].disagreements, 1);
        assert_eq!(r.summary[0].max_err_metric, Some(metric));
    }

    #[test]
    fn validation_records_wipeouts_as_skipped() {
        let xs = [0.01, -0.4, 0.02, 0.01, 0.0, 0.01];
        let r = validate_approximation(&series(&xs), &levs(&[3.0]), &[2], 1).unwrap();
        assert_eq!(r.skipped.len(), 2);
        assert!(r.skipped[0].reason.contains("wipeout"));
        assert_eq!(r.summary[0].windows, 3);
        assert_eq!(r.summary[0].skipped, 2);
    }

    #[test]
    fn threshold_examples() {
        let report = threshold_report(&[0.0], &FeePair::default(), 0.0658, &[0.01]).unwrap();
        let iv = report.rows[0].interval.unwrap();
        assert!((iv.sqrt_v_minus() - 0.016052356616275618).abs() < 1e-12);

        let same = FeePair::new(0.0095, 0.0095).unwrap();
        let report = threshold_report(&[0.0], &same, 0.0658, &[]).unwrap();
        let iv = report.rows[0].interval.unwrap();
        let expected = (2.0 * 0.0658 / 252.0f64).sqrt();
        assert!((iv.sqrt_v_minus() - 2.2852182001336814e-2).abs() < 1e-12);
        assert!((iv.sqrt_v_minus() - expected).abs() < 1e-15);
        assert!((iv.sqrt_v_plus() - expected).abs() < 1e-15);

        let report =
            threshold_report(&DEFAULT_INFLATIONS, &FeePair::default(), 0.0658, &[0.01]).unwrap();
        let lows: Vec<f64> = report
            .rows
            .iter()
            .map(|r| r.interval.unwrap().sqrt_v_minus())
            .collect();
        assert!(lows.windows(2).all(|w| w[0] < w[1]), "{lows:?}");
        // projected u at 2% uses log(1.02), not the rounded 0.0856
        let expected = (0.0658 + 0.02f64.ln_1p()) / 252.0 / 1e-4 + 0.5;
        assert!((report.rows[2].optimal_leverage[0] - expected).abs() < 1e-12);
        assert!((report.rows[2].optimal_leverage[0] - 3.8969296546103056).abs() < 1e-12);
    }

    #[test]
    fn threshold_rejects_reversed_fees() {
        let fees = FeePair::new(0.01, 0.001).unwrap();
        assert!(matches!(
            threshold_report(&[0.0], &fees, 0.0658, &[]),
            Err(Error::UnsupportedFeeOrder { .. })
        ));
    }

    #[test]
    fn curves_examples() {
        let c = optimal_leverage_curves(&[0.0, 0.02, 0.04], &[0.01, 0.02, 0.05], 0.0658).unwrap();
        let inflations: Vec<f64> = c.curves.iter().map(|r| r.inflation).collect();
        assert_eq!(inflations, vec![0.04, 0.02, 0.0]);
        assert!((c.curves[1].leverage[0] - 3.8969296546103056).abs() < 1e-12);
        for j in 0..3 {
            assert!(c.curves[0].leverage[j] > c.curves[1].leverage[j]);
            assert!(c.curves[1].leverage[j] > c.curves[2].leverage[j]);
        }
        for curve in &c.curves {
            assert!(curve.leverage.windows(2).all(|w| w[0] > w[1]));
            assert!(curve.leverage.iter().all(|&l| l > 0.5));
        }
        assert!(optimal_leverage_curves(&[0.0], &[0.0], 0.0658).is_err());
    }
}
