//! Daily-leveraged fund model.
//!
//! A fund `LxI` returns `L` times the daily fractional change `X_i` of its
//! index, compounded daily, and pays an annual expense ratio `r` applied as a
//! daily factor `1 - r/252`. Over a window of `n` days the index is summarised
//! by `u`, its mean daily log-return, and `v`, the mean of `X_i²`.
//!
//! To second order the per-day log-return advantage of `LxI` over the index is
//! `g(L) = (L-1)(u - L·v/2)`. Its maximum over `L` is `h(v) = (v/2)(u/v - 1/2)²`,
//! reached at `L = u/v + 1/2`. When `h(v)` does not exceed the fee gap
//! `f(r1, r0)` no leverage multiple beats the unleveraged fund, which happens
//! exactly for `v` inside the [`DominanceInterval`].

use chrono::NaiveDate;

use crate::error::{Error, Result};

/// Trading days per year used to spread an annual expense ratio over days.
pub const TRADING_DAYS_PER_YEAR: f64 = 252.0;

/// Expense ratio of a fund tracking the index without leverage (SPY).
pub const DEFAULT_UNLEVERAGED_FEE: f64 = 0.000945;

/// Expense ratio typical of daily-leveraged index funds.
pub const DEFAULT_LEVERAGED_FEE: f64 = 0.0095;

/// Dated adjusted closing prices of one index.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    dates: Vec<NaiveDate>,
    closes: Vec<f64>,
}

impl PriceSeries {
    /// Builds a series, requiring at least two points, strictly increasing
    /// dates and positive finite closes.
    pub fn new(dates: Vec<NaiveDate>, closes: Vec<f64>) -> Result<Self> {
        if dates.len() != closes.len() {
            return Err(Error::MalformedInput(format!(
                "{} dates but {} closes",
                dates.len(),
                closes.len()
            )));
        }
        if closes.len() < 2 {
            return Err(Error::MalformedInput(format!(
                "price series needs at least 2 closes, got {}",
                closes.len()
            )));
        }
        if let Some(i) = dates.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::MalformedInput(format!(
                "dates not strictly increasing at {} -> {}",
                dates[i],
                dates[i + 1]
            )));
        }
        if let Some((i, c)) = closes
            .iter()
            .enumerate()
            .find(|(_, c)| !(c.is_finite() && **c > 0.0))
        {
            return Err(Error::MalformedInput(format!(
                "close {c} on {} is not a positive number",
                dates[i]
            )));
        }
        Ok(Self { dates, closes })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn closes(&self) -> &[f64] {
        &self.closes
    }

    pub fn len(&self) -> usize {
        self.closes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closes.is_empty()
    }
}

/// Daily fractional changes `X_i = C_i/C_{i-1} - 1`.
///
/// When derived from a [`PriceSeries`], `dates[i]` is the date of the close
/// that ends change `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeSeries {
    changes: Vec<f64>,
    dates: Option<Vec<NaiveDate>>,
}

impl ChangeSeries {
    /// Undated changes, each finite and greater than -1.
    pub fn new(changes: Vec<f64>) -> Result<Self> {
        check_changes(&changes)?;
        Ok(Self {
            changes,
            dates: None,
        })
    }

    /// Changes paired with the date each one ends on.
    pub fn with_dates(changes: Vec<f64>, dates: Vec<NaiveDate>) -> Result<Self> {
        check_changes(&changes)?;
        if dates.len() != changes.len() {
            return Err(Error::MalformedInput(format!(
                "{} changes but {} dates",
                changes.len(),
                dates.len()
            )));
        }
        Ok(Self {
            changes,
            dates: Some(dates),
        })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.changes
    }

    pub fn dates(&self) -> Option<&[NaiveDate]> {
        self.dates.as_deref()
    }

    /// Date ending change `index`, if the series is dated.
    pub fn date_at(&self, index: usize) -> Option<NaiveDate> {
        self.dates.as_ref().and_then(|d| d.get(index).copied())
    }

    pub fn len(&self) -> usize {
        self.changes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.changes.is_empty()
    }
}

fn check_changes(changes: &[f64]) -> Result<()> {
    match changes
        .iter()
        .enumerate()
        .find(|(_, x)| !(x.is_finite() && **x > -1.0))
    {
        Some((i, x)) => Err(Error::MalformedInput(format!(
            "daily change {x} at index {i} is not greater than -1"
        ))),
        None => Ok(()),
    }
}

/// Window summary `(n, u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowStats {
    n: usize,
    u: f64,
    v: f64,
}

impl WindowStats {
    /// Builds a summary directly from its parts; `n ≥ 1`, `u` finite, `v ≥ 0`.
    pub fn new(n: usize, u: f64, v: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::MalformedInput("window has no days".into()));
        }
        if !u.is_finite() {
            return Err(Error::Domain(format!("mean log-return {u} is not finite")));
        }
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Domain(format!(
                "mean squared change {v} must be finite and non-negative"
            )));
        }
        Ok(Self { n, u, v })
    }

    /// Number of trading days.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Mean daily log-return.
    pub fn u(&self) -> f64 {
        self.u
    }

    /// Mean squared daily fractional change.
    pub fn v(&self) -> f64 {
        self.v
    }

    /// `√v`, the volatility measure.
    pub fn sqrt_v(&self) -> f64 {
        self.v.sqrt()
    }
}

/// Annual expense ratios of the unleveraged (`r0`) and leveraged (`r1`) funds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeePair {
    r0: f64,
    r1: f64,
    trading_days: f64,
}

impl FeePair {
    pub fn new(r0: f64, r1: f64) -> Result<Self> {
        Self::with_trading_days(r0, r1, TRADING_DAYS_PER_YEAR)
    }

    /// Fee pair spread over a non-standard number of trading days per year.
    pub fn with_trading_days(r0: f64, r1: f64, trading_days: f64) -> Result<Self> {
        if !(trading_days.is_finite() && trading_days > 0.0) {
            return Err(Error::Domain(format!(
                "trading days per year {trading_days} must be positive"
            )));
        }
        check_fee(r0, trading_days)?;
        check_fee(r1, trading_days)?;
        Ok(Self {
            r0,
            r1,
            trading_days,
        })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn trading_days(&self) -> f64 {
        self.trading_days
    }

    /// `f(r1, r0)`: the per-day log cost of holding the leveraged fund's fees
    /// instead of the unleveraged fund's.
    pub fn leveraged_cost(&self) -> f64 {
        fee_gap_in(self.r1, self.r0, self.trading_days).expect("fees validated on construction")
    }

    fn require_ordered(&self) -> Result<()> {
        if self.r1 < self.r0 {
            return Err(Error::UnsupportedFeeOrder {
                r0: self.r0,
                r1: self.r1,
            });
        }
        Ok(())
    }
}

impl Default for FeePair {
    fn default() -> Self {
        Self {
            r0: DEFAULT_UNLEVERAGED_FEE,
            r1: DEFAULT_LEVERAGED_FEE,
            trading_days: TRADING_DAYS_PER_YEAR,
        }
    }
}

fn check_fee(r: f64, trading_days: f64) -> Result<()> {
    if r.is_finite() && r >= 0.0 && r < trading_days {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "expense ratio {r} outside [0, {trading_days})"
        )))
    }
}

/// Daily leverage multiple `L`; `L = 1` is the unleveraged fund.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Leverage(f64);

impl Leverage {
    pub const UNLEVERAGED: Leverage = Leverage(1.0);

    pub fn new(multiple: f64) -> Result<Self> {
        if multiple.is_finite() {
            Ok(Self(multiple))
        } else {
            Err(Error::Domain(format!("leverage {multiple} is not finite")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Leverage {
    type Error = Error;

    fn try_from(multiple: f64) -> Result<Self> {
        Self::new(multiple)
    }
}

impl std::fmt::Display for Leverage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Range `[v⁻, v⁺]` of mean squared daily change in which no leverage
/// multiple outperforms the unleveraged fund net of fees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceInterval {
    v_minus: f64,
    v_plus: f64,
}

impl DominanceInterval {
    pub fn v_minus(&self) -> f64 {
        self.v_minus
    }

    pub fn v_plus(&self) -> f64 {
        self.v_plus
    }

    pub fn sqrt_v_minus(&self) -> f64 {
        self.v_minus.sqrt()
    }

    pub fn sqrt_v_plus(&self) -> f64 {
        self.v_plus.sqrt()
    }

    pub fn contains(&self, v: f64) -> bool {
        self.v_minus <= v && v <= self.v_plus
    }
}

/// `X_i = C_i/C_{i-1} - 1` for consecutive closes, dated by the later close.
pub fn daily_changes(prices: &PriceSeries) -> ChangeSeries {
    let changes = prices
        .closes
        .windows(2)
        .map(|w| w[1] / w[0] - 1.0)
        .collect();
    ChangeSeries {
        changes,
        dates: Some(prices.dates[1..].to_vec()),
    }
}

/// Log-return of the fund with daily leverage `L` and annual expense ratio
/// `annual_fee` over the given days: `Σ log(1 + L·X_i) + n·log(1 - r/252)`.
pub fn leveraged_log_return(changes: &[f64], leverage: Leverage, annual_fee: f64) -> Result<f64> {
    leveraged_log_return_in(changes, leverage, annual_fee, TRADING_DAYS_PER_YEAR)
}

/// [`leveraged_log_return`] with the expense ratio spread over `trading_days`.
pub fn leveraged_log_return_in(
    changes: &[f64],
    leverage: Leverage,
    annual_fee: f64,
    trading_days: f64,
) -> Result<f64> {
    check_fee(annual_fee, trading_days)?;
    let l = leverage.value();
    let mut sum = CompensatedSum::default();
    for (day, &x) in changes.iter().enumerate() {
        let lx = l * x;
        // Written negated so a NaN factor also counts as a wipeout.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(lx > -1.0) {
            return Err(Error::Wipeout {
                day,
                leverage: l,
                change: x,
                factor: 1.0 + lx,
            });
        }
        sum.add(lx.ln_1p());
    }
    let fee_drag = changes.len() as f64 * (-annual_fee / trading_days).ln_1p();
    sum.add(fee_drag);
    Ok(sum.total())
}

/// `(n, u, v)` over a window of daily changes.
pub fn window_stats(changes: &[f64]) -> Result<WindowStats> {
    if changes.is_empty() {
        return Err(Error::MalformedInput("window has no days".into()));
    }
    check_changes(changes)?;
    let mut log_sum = CompensatedSum::default();
    let mut sq_sum = CompensatedSum::default();
    for &x in changes {
        log_sum.add(x.ln_1p());
        sq_sum.add(x * x);
    }
    let n = changes.len();
    WindowStats::new(n, log_sum.total() / n as f64, sq_sum.total() / n as f64)
}

/// Fee gap `f(x, y) = log((1 - y/252)/(1 - x/252))`. Antisymmetric.
pub fn fee_gap(x: f64, y: f64) -> Result<f64> {
    fee_gap_in(x, y, TRADING_DAYS_PER_YEAR)
}

/// [`fee_gap`] with expense ratios spread over `trading_days`.
pub fn fee_gap_in(x: f64, y: f64, trading_days: f64) -> Result<f64> {
    check_fee(x, trading_days)?;
    check_fee(y, trading_days)?;
    Ok((-y / trading_days).ln_1p() - (-x / trading_days).ln_1p())
}

/// Second-order Maclaurin truncation of `log(1 + x)`: `x - x²/2`.
pub fn quadratic_log_approx(x: f64) -> f64 {
    x - x * x / 2.0
}

/// Bound on `|log(1+x) - (x - x²/2)|` for `|x| < 1`: `|x|³/(3(1-|x|))`.
pub fn quadratic_log_remainder_bound(x: f64) -> f64 {
    let a = x.abs();
    a * a * a / (3.0 * (1.0 - a))
}

/// Approximate per-day excess log-return `g(L) = (L-1)(u - L·v/2)`.
pub fn excess_g(stats: &WindowStats, leverage: Leverage) -> f64 {
    let l = leverage.value();
    // single rounding of u - L·v/2
    (l - 1.0) * (-l).mul_add(stats.v * 0.5, stats.u)
}

/// Approximate total excess log-return of `LxI` with fee `r1` over the index
/// fund with fee `r0`: `n·(g(L) + f(r0, r1))`.
pub fn approx_excess_total(stats: &WindowStats, leverage: Leverage, fees: &FeePair) -> f64 {
    let fee_term = -fees.leveraged_cost();
    stats.n as f64 * (excess_g(stats, leverage) + fee_term)
}

/// Leverage maximising [`excess_g`]: `u/v + 1/2`.
pub fn optimal_leverage(stats: &WindowStats) -> Result<Leverage> {
    if stats.v == 0.0 {
        return Err(Error::ZeroVolatility);
    }
    Leverage::new(stats.u / stats.v + 0.5)
}

/// Maximum of [`excess_g`] over all leverage multiples:
/// `h(v) = (v/2)(u/v - 1/2)²`.
pub fn max_excess_h(stats: &WindowStats) -> Result<f64> {
    if stats.v == 0.0 {
        return Err(Error::ZeroVolatility);
    }
    Ok(envelope(stats.u, stats.v))
}

// (v/2)(u/v - 1/2)² rewritten as (u - v/2)²/(2v) to avoid cancellation near v = 2u.
fn envelope(u: f64, v: f64) -> f64 {
    let d = u - 0.5 * v;
    d * d / (2.0 * v)
}

/// `[v⁻, v⁺]` with `v± = 2(√f(r1,r0) ± √(f(r1,r0) + u))²`, or `None` when
/// `f(r1,r0) + u < 0` and every `v > 0` lets some leverage win.
pub fn dominance_interval(u: f64, fees: &FeePair) -> Result<Option<DominanceInterval>> {
    if !u.is_finite() {
        return Err(Error::Domain(format!("mean log-return {u} is not finite")));
    }
    fees.require_ordered()?;
    let f = fees.leveraged_cost().max(0.0);
    let slack = f + u;
    if slack < 0.0 {
        return Ok(None);
    }
    let root_sum = f.sqrt() + slack.sqrt();
    let v_plus = 2.0 * root_sum * root_sum;
    // √f - √(f+u) = -u/(√f + √(f+u)), so v⁻ = 2u²/(√f + √(f+u))².
    let v_minus = if u == 0.0 {
        0.0
    } else {
        2.0 * (u / root_sum) * (u / root_sum)
    };
    Ok(Some(DominanceInterval { v_minus, v_plus }))
}

/// Whether no leverage multiple beats the unleveraged fund net of fees on
/// the window: `h(v) ≤ f(r1, r0)`.
pub fn dominance_predicate(stats: &WindowStats, fees: &FeePair) -> Result<bool> {
    fees.require_ordered()?;
    Ok(max_excess_h(stats)? <= fees.leveraged_cost())
}

/// Bound on `|exact - approx|` for the total excess log-return of `LxI` over
/// the index across `changes`, from the remainder of `log(1+x) ≈ x - x²/2`
/// applied to both `X_i` and `L·X_i`.
///
/// `B = Σ (|X_i|³ + |L·X_i|³)/(3(1-m))` with `m = max(|X_i|, |L·X_i|)`.
/// Returns `None` when `m ≥ 1`. Whenever the approximation exceeds `B` in
/// magnitude, its sign matches the exact difference.
pub fn sign_agreement_bound(changes: &[f64], leverage: Leverage) -> Option<f64> {
    let l = leverage.value();
    let mut m: f64 = 0.0;
    let mut cubes = CompensatedSum::default();
    for &x in changes {
        let a = x.abs();
        let la = (l * x).abs();
        m = m.max(a).max(la);
        cubes.add(a * a * a + la * la * la);
    }
    (m < 1.0).then(|| cubes.total() / (3.0 * (1.0 - m)))
}

/// Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(self) -> f64 {
        self.sum + self.carry
    }
}
