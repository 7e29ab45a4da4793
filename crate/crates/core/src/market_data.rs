//! Local historical data files.
//!
//! Daily file: UTF-8 CSV with a header naming at least `date` and `adj_close`
//! columns (`Adj Close` as written by common quote exports is accepted). Other
//! columns are ignored. Dates are ISO `YYYY-MM-DD`.
//!
//! Annual file: UTF-8 CSV with header `year,P,D,J` where `P` is the average
//! monthly close of the composite index, `D` the dividend per share and `J`
//! the January consumer price index.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::model::{PriceSeries, TRADING_DAYS_PER_YEAR};

/// Long-run mean annual real log-return of the composite index, used as the
/// base for nominal projections.
pub const DEFAULT_BASE_REAL_LOG_RETURN: f64 = 0.0658;

const DATE_FORMAT: &str = "%Y-%m-%d";

/// One year of composite index data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnualRecord {
    pub year: i32,
    /// Average monthly close.
    pub price: f64,
    /// Dividend per share.
    pub dividend: f64,
    /// January consumer price index.
    pub cpi: f64,
}

/// Per-year gross real returns and their natural logs.
#[derive(Debug, Clone, PartialEq)]
pub struct RealReturnSeries {
    years: Vec<i32>,
    gross: Vec<f64>,
    logs: Vec<f64>,
}

impl RealReturnSeries {
    /// Series from gross returns labelled by the year they start in.
    pub fn from_gross(years: Vec<i32>, gross: Vec<f64>) -> Result<Self> {
        if gross.is_empty() {
            return Err(Error::MalformedInput("no annual returns".into()));
        }
        if years.len() != gross.len() {
            return Err(Error::MalformedInput(format!(
                "{} years but {} returns",
                years.len(),
                gross.len()
            )));
        }
        if let Some(g) = gross.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            return Err(Error::Domain(format!("gross real return {g} is not positive")));
        }
        let logs = gross.iter().map(|g| g.ln()).collect();
        Ok(Self { years, gross, logs })
    }

    pub fn years(&self) -> &[i32] {
        &self.years
    }

    pub fn gross(&self) -> &[f64] {
        &self.gross
    }

    pub fn logs(&self) -> &[f64] {
        &self.logs
    }

    pub fn len(&self) -> usize {
        self.gross.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gross.is_empty()
    }

    /// Running sum of the annual log-returns.
    pub fn cumulative_logs(&self) -> Vec<f64> {
        self.logs
            .iter()
            .scan(0.0, |acc, l| {
                *acc += l;
                Some(*acc)
            })
            .collect()
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn normalize_header(h: &str) -> String {
    h.trim()
        .trim_start_matches('\u{feff}')
        .to_ascii_lowercase()
        .replace(' ', "_")
}

fn parse_date(s: &str) -> std::result::Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s.trim(), DATE_FORMAT)
        .map_err(|_| format!("date '{}' is not an ISO YYYY-MM-DD date", s.trim()))
}

fn parse_number(s: &str, what: &str) -> std::result::Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("{what} '{}' is not a number", s.trim()))
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input)
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| normalize_header(h) == name)
}

/// Loads a daily adjusted-close file, sorting rows by date.
pub fn load_daily(path: impl AsRef<Path>) -> Result<PriceSeries> {
    let path = path.as_ref();
    read_daily(open(path)?, path)
}

/// [`load_daily`] over any reader; `path` only labels diagnostics.
pub fn read_daily<R: Read>(input: R, path: &Path) -> Result<PriceSeries> {
    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rdr = reader(input);
    let headers = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let (date_col, close_col) = match (
        column_index(&headers, "date"),
        column_index(&headers, "adj_close"),
    ) {
        (Some(d), Some(c)) => (d, c),
        _ => {
            return Err(parse_err(
                1,
                "header must name 'date' and 'adj_close' columns".into(),
            ))
        }
    };

    let mut rows: Vec<(NaiveDate, f64, u64)> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize, what: &str| {
            record
                .get(i)
                .ok_or_else(|| parse_err(line, format!("missing {what} column")))
        };
        let date = parse_date(field(date_col, "date")?).map_err(|m| parse_err(line, m))?;
        let close = parse_number(field(close_col, "adj_close")?, "adjusted close")
            .map_err(|m| parse_err(line, m))?;
        if close <= 0.0 {
            return Err(parse_err(
                line,
                format!("adjusted close {close} is not positive"),
            ));
        }
        rows.push((date, close, line));
    }

    rows.sort_by_key(|r| r.0);
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::Invalid {
            path: path.to_path_buf(),
            message: format!(
                "duplicate date {} on lines {} and {}",
                w[0].0,
                w[0].2.min(w[1].2),
                w[0].2.max(w[1].2)
            ),
        });
    }
    let (dates, closes) = rows.into_iter().map(|(d, c, _)| (d, c)).unzip();
    PriceSeries::new(dates, closes).map_err(|e| Error::Invalid {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Writes a daily file in the `date,adj_close` schema.
pub fn write_daily<W: Write>(prices: &PriceSeries, out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "adj_close"])?;
    for (d, c) in prices.dates().iter().zip(prices.closes()) {
        w.write_record([d.format(DATE_FORMAT).to_string(), c.to_string()])?;
    }
    w.flush()
}

/// Loads an annual `year,P,D,J` file, sorted by year and checked for gaps.
pub fn load_annual(path: impl AsRef<Path>) -> Result<Vec<AnnualRecord>> {
    let path = path.as_ref();
    read_annual(open(path)?, path)
}

/// [`load_annual`] over any reader; `path` only labels diagnostics.
pub fn read_annual<R: Read>(input: R, path: &Path) -> Result<Vec<AnnualRecord>> {
    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rdr = reader(input);
    let headers = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let cols: HashMap<&str, usize> = ["year", "p", "d", "j"]
        .into_iter()
        .filter_map(|name| column_index(&headers, name).map(|i| (name, i)))
        .collect();
    if cols.len() != 4 {
        return Err(parse_err(1, "header must be 'year,P,D,J'".into()));
    }

    let mut records = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |name: &str| {
            record
                .get(cols[name])
                .ok_or_else(|| parse_err(line, format!("missing {name} column")))
        };
        let year_str = field("year")?.trim();
        let year: i32 = year_str
            .parse()
            .map_err(|_| parse_err(line, format!("year '{year_str}' is not an integer")))?;
        let num = |name: &str, what: &str| {
            parse_number(field(name)?, what).map_err(|m| parse_err(line, m))
        };
        let rec = AnnualRecord {
            year,
            price: num("p", "P")?,
            dividend: num("d", "D")?,
            cpi: num("j", "J")?,
        };
        check_record(&rec).map_err(|m| parse_err(line, m))?;
        records.push(rec);
    }
    records.sort_by_key(|r| r.year);
    check_contiguous(&records).map_err(|message| Error::Invalid {
        path: path.to_path_buf(),
        message,
    })?;
    Ok(records)
}

fn check_record(r: &AnnualRecord) -> std::result::Result<(), String> {
    if r.price <= 0.0 {
        return Err(format!("P = {} for {} is not positive", r.price, r.year));
    }
    if r.dividend < 0.0 {
        return Err(format!("D = {} for {} is negative", r.dividend, r.year));
    }
    if r.cpi <= 0.0 {
        return Err(format!("J = {} for {} is not positive", r.cpi, r.year));
    }
    Ok(())
}

fn check_contiguous(records: &[AnnualRecord]) -> std::result::Result<(), String> {
    match records.windows(2).find(|w| w[1].year != w[0].year + 1) {
        Some(w) => Err(format!(
            "years not contiguous: {} followed by {}",
            w[0].year, w[1].year
        )),
        None => Ok(()),
    }
}

/// Gross real return for year `k`: `((P[k+1] + D[k]) / P[k]) · (J[k] / J[k+1])`.
pub fn real_returns(records: &[AnnualRecord]) -> Result<RealReturnSeries> {
    if records.len() < 2 {
        return Err(Error::MalformedInput(format!(
            "need at least 2 annual records to compute a return, got {}",
            records.len()
        )));
    }
    for r in records {
        check_record(r).map_err(Error::MalformedInput)?;
    }
    check_contiguous(records).map_err(Error::MalformedInput)?;

    let (years, gross) = records
        .windows(2)
        .map(|w| {
            let (this, next) = (&w[0], &w[1]);
            let nominal = (next.price + this.dividend) / this.price;
            (this.year, nominal * (this.cpi / next.cpi))
        })
        .unzip();
    RealReturnSeries::from_gross(years, gross)
}

/// Slope of the cumulative real log-return trend: the mean annual real
/// log-return.
pub fn trend_slope(series: &RealReturnSeries) -> f64 {
    series.logs.iter().sum::<f64>() / series.logs.len() as f64
}

/// Projected nominal annual log-return: `base_real + log(1 + inflation)`.
pub fn nominal_annual_log_return(inflation: f64, base_real: f64) -> Result<f64> {
    if !(inflation.is_finite() && inflation > -1.0) {
        return Err(Error::Domain(format!(
            "inflation rate {inflation} must exceed -1"
        )));
    }
    if !base_real.is_finite() {
        return Err(Error::Domain(format!(
            "base real log-return {base_real} is not finite"
        )));
    }
    Ok(base_real + inflation.ln_1p())
}

/// Projected mean daily log-return `u` for an inflation rate.
pub fn nominal_u(inflation: f64, base_real: f64) -> Result<f64> {
    nominal_u_in(inflation, base_real, TRADING_DAYS_PER_YEAR)
}

/// [`nominal_u`] over `trading_days` per year.
pub fn nominal_u_in(inflation: f64, base_real: f64, trading_days: f64) -> Result<f64> {
    Ok(nominal_annual_log_return(inflation, base_real)? / trading_days)
}
