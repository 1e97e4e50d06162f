//! Return-series ingestion and CSV serialization of result types.
//!
//! All CSV output is UTF-8 with LF line endings and `.` decimal separators.
//! Floats are rendered with 17 significant digits so that serialize -> load
//! -> re-serialize is byte-identical.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::filter::{FilterResult, PerTimeSummary};
use crate::inference::{LoglikEstimate, SeReport, SliceResult};
use crate::mif::{MifRecord, MifTrace};
use crate::model::Variant;
use crate::params::{ParamVector, ALL_PARAM_NAMES};

/// Demeaned daily return observations, the observation sequence of both models.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    dates: Vec<String>,
    values: Vec<f64>,
    demeaned: bool,
    mean_removed: f64,
}

impl ReturnSeries {
    /// Wrap raw values with synthetic date indices "1", "2", ...
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let dates = (1..=values.len()).map(|i| i.to_string()).collect();
        ReturnSeries::with_dates(dates, values)
    }

    pub fn with_dates(dates: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries(
                "a return series needs observations".into(),
            ));
        }
        if dates.len() != values.len() {
            return Err(Error::domain(format!(
                "dates ({}) and values ({}) length mismatch",
                dates.len(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite return value {bad}")));
        }
        Ok(ReturnSeries {
            dates,
            values,
            demeaned: false,
            mean_removed: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dates(&self) -> &[String] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_demeaned(&self) -> bool {
        self.demeaned
    }

    /// Mean that was removed when demeaning (0 until then).
    pub fn mean_removed(&self) -> f64 {
        self.mean_removed
    }

    /// Subtract the sample mean, recording it.
    pub fn into_demeaned(self) -> Self {
        let (values, mean) = demean(&self.values).expect("series is nonempty");
        ReturnSeries {
            dates: self.dates,
            values,
            demeaned: true,
            mean_removed: self.mean_removed + mean,
        }
    }
}

/// Column names for [`load_returns`].
#[derive(Debug, Clone)]
pub struct ColumnSpec {
    pub date: String,
    pub value: String,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        ColumnSpec {
            date: "date".into(),
            value: "return".into(),
        }
    }
}

impl ColumnSpec {
    pub fn new(date: &str, value: &str) -> Self {
        ColumnSpec {
            date: date.into(),
            value: value.into(),
        }
    }
}

/// Read a `date,return` CSV (configurable column names). Rows with
/// unparseable or non-finite values are rejected with their line number.
pub fn load_returns(path: &Path, columns: &ColumnSpec) -> Result<ReturnSeries> {
    let text = fs::read_to_string(path).map_err(|e| Error::io_at(path, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::BadInput {
        path: path.into(),
        reason: "empty file".into(),
    })?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let date_idx = cols.iter().position(|c| *c == columns.date);
    let value_idx = cols
        .iter()
        .position(|c| *c == columns.value)
        .ok_or_else(|| Error::BadInput {
            path: path.into(),
            reason: format!("missing column `{}` in header `{header}`", columns.value),
        })?;

    let mut dates = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(Error::MalformedRow {
                path: path.into(),
                line: lineno,
                reason: format!("{} fields, expected {}", fields.len(), cols.len()),
            });
        }
        let raw = fields[value_idx];
        let v: f64 = raw.parse().map_err(|_| Error::MalformedRow {
            path: path.into(),
            line: lineno,
            reason: format!("unparseable value `{raw}`"),
        })?;
        if !v.is_finite() {
            return Err(Error::MalformedRow {
                path: path.into(),
                line: lineno,
                reason: format!("non-finite value `{raw}`"),
            });
        }
        dates.push(match date_idx {
            Some(d) => fields[d].to_string(),
            None => (values.len() + 1).to_string(),
        });
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::EmptySeries(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    ReturnSeries::with_dates(dates, values)
}

/// Scaled log returns from a positive price series:
/// `scale * (ln p_t - ln p_{t-1})`.
pub fn prices_to_returns(prices: &[f64], scale: f64) -> Result<Vec<f64>> {
    if prices.len() < 2 {
        return Err(Error::domain("prices_to_returns needs at least 2 prices"));
    }
    if !scale.is_finite() {
        return Err(Error::domain(format!("scale must be finite, got {scale}")));
    }
    let mut out = Vec::with_capacity(prices.len() - 1);
    for (i, pair) in prices.windows(2).enumerate() {
        let (p0, p1) = (pair[0], pair[1]);
        if !(p0 > 0.0 && p1 > 0.0) {
            return Err(Error::domain(format!(
                "nonpositive price at index {}",
                if p0 > 0.0 { i + 1 } else { i }
            )));
        }
        out.push(scale * (p1.ln() - p0.ln()));
    }
    Ok(out)
}

/// Subtract the sample mean; returns the centered values and the mean.
pub fn demean(values: &[f64]) -> Result<(Vec<f64>, f64)> {
    if values.is_empty() {
        return Err(Error::EmptySeries("demean on empty input".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut out: Vec<f64> = values.iter().map(|v| v - mean).collect();
    // second pass removes the floating-point residual of the first
    let resid = out.iter().sum::<f64>() / n;
    for v in &mut out {
        *v -= resid;
    }
    Ok((out, mean + resid))
}

/// Render with 17 significant digits; parsing the result recovers the exact bits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io_at(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io_at(path, e))
}

/// `date,return` rows.
pub fn write_returns(series: &ReturnSeries, path: &Path) -> Result<()> {
    let mut out = String::from("date,return\n");
    for (d, v) in series.dates().iter().zip(series.values()) {
        out.push_str(d);
        out.push(',');
        out.push_str(&fmt_float(*v));
        out.push('\n');
    }
    write_file(path, &out)
}

/// `t,loglik_increment,ess,h_mean,rho_mean,rho_q1,rho_q3,eps_mean` rows.
pub fn write_filter_result(result: &FilterResult, path: &Path) -> Result<()> {
    let mut out = String::from("t,loglik_increment,ess,h_mean,rho_mean,rho_q1,rho_q3,eps_mean\n");
    for p in &result.per_time {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            p.t,
            fmt_float(p.loglik_increment),
            fmt_float(p.ess),
            fmt_float(p.h_mean),
            fmt_float(p.rho_mean),
            fmt_float(p.rho_q1),
            fmt_float(p.rho_q3),
            fmt_float(p.eps_mean),
        ));
    }
    write_file(path, &out)
}

/// Read back a filter CSV. The total log-likelihood is recomputed as the sum
/// of the increments; the seed is not stored in the CSV (it lives in the run
/// manifest) and defaults to 0.
pub fn load_filter_result(path: &Path) -> Result<FilterResult> {
    let text = read_file(path)?;
    let mut per_time = Vec::new();
    let mut loglik = 0.0;
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(Error::MalformedRow {
                path: path.into(),
                line: i + 1,
                reason: format!("{} fields, expected 8", f.len()),
            });
        }
        let num = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::MalformedRow {
                path: path.into(),
                line: i + 1,
                reason: format!("unparseable number `{s}`"),
            })
        };
        let summary = PerTimeSummary {
            t: f[0].parse().map_err(|_| Error::MalformedRow {
                path: path.into(),
                line: i + 1,
                reason: format!("unparseable index `{}`", f[0]),
            })?,
            loglik_increment: num(f[1])?,
            ess: num(f[2])?,
            h_mean: num(f[3])?,
            rho_mean: num(f[4])?,
            rho_q1: num(f[5])?,
            rho_q3: num(f[6])?,
            eps_mean: num(f[7])?,
        };
        loglik += summary.loglik_increment;
        per_time.push(summary);
    }
    Ok(FilterResult {
        loglik,
        per_time,
        seed: 0,
    })
}

/// `iteration,loglik,mu_h,phi,sigma_eta,rho,sigma_nu,f0` rows; cells of
/// parameters absent from the variant stay empty.
pub fn write_mif_trace(trace: &MifTrace, path: &Path) -> Result<()> {
    let mut out = String::from("iteration,loglik,mu_h,phi,sigma_eta,rho,sigma_nu,f0\n");
    for rec in &trace.records {
        out.push_str(&rec.iteration.to_string());
        out.push(',');
        out.push_str(&fmt_opt(rec.loglik));
        for name in ALL_PARAM_NAMES {
            out.push(',');
            out.push_str(&fmt_opt(rec.params.get(name)));
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// Read back a trace CSV; the variant is inferred from which cells are filled.
pub fn load_mif_trace(path: &Path) -> Result<MifTrace> {
    let text = read_file(path)?;
    let mut records: Vec<MifRecord> = Vec::new();
    let mut variant: Option<Variant> = None;
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 2 + ALL_PARAM_NAMES.len() {
            return Err(Error::MalformedRow {
                path: path.into(),
                line: i + 1,
                reason: format!("{} fields, expected {}", f.len(), 2 + ALL_PARAM_NAMES.len()),
            });
        }
        let bad_row = |reason: String| Error::MalformedRow {
            path: path.into(),
            line: i + 1,
            reason,
        };
        let iteration: usize = f[0]
            .parse()
            .map_err(|_| bad_row(format!("unparseable iteration `{}`", f[0])))?;
        let loglik = if f[1].is_empty() {
            None
        } else {
            Some(
                f[1].parse::<f64>()
                    .map_err(|_| bad_row(format!("unparseable loglik `{}`", f[1])))?,
            )
        };
        let mut cells = std::collections::HashMap::new();
        for (name, raw) in ALL_PARAM_NAMES.iter().zip(&f[2..]) {
            if !raw.is_empty() {
                let v: f64 = raw
                    .parse()
                    .map_err(|_| bad_row(format!("unparseable value `{raw}`")))?;
                cells.insert(*name, v);
            }
        }
        let row_variant = if cells.contains_key("sigma_nu") {
            Variant::RandomWalk
        } else {
            Variant::Fixed
        };
        match variant {
            None => variant = Some(row_variant),
            Some(v) if v != row_variant => {
                return Err(bad_row("inconsistent model variant across rows".into()))
            }
            _ => {}
        }
        let specs = crate::params::param_specs(row_variant);
        let values: Result<Vec<f64>> = specs
            .iter()
            .map(|s| {
                cells
                    .get(s.name)
                    .copied()
                    .ok_or_else(|| bad_row(format!("missing value for `{}`", s.name)))
            })
            .collect();
        let params = ParamVector::new(row_variant, values?)?;
        records.push(MifRecord {
            iteration,
            loglik,
            params,
        });
    }
    let variant =
        variant.ok_or_else(|| Error::EmptySeries(format!("{}: no rows", path.display())))?;
    let final_params = records
        .last()
        .map(|r| r.params.clone())
        .ok_or_else(|| Error::EmptySeries(format!("{}: no rows", path.display())))?;
    Ok(MifTrace {
        variant,
        records,
        final_params,
    })
}

/// `param,value,loglik,mc_se,smoothed` rows.
pub fn write_slice_result(slice: &SliceResult, path: &Path) -> Result<()> {
    let mut out = String::from("param,value,loglik,mc_se,smoothed\n");
    for i in 0..slice.grid.len() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            slice.param,
            fmt_float(slice.grid[i]),
            fmt_float(slice.points[i].mean),
            fmt_opt(slice.points[i].mc_se),
            fmt_float(slice.smoothed[i]),
        ));
    }
    write_file(path, &out)
}

/// Read back a slice CSV (replicate/particle counts are not stored; they
/// live in the run manifest).
pub fn load_slice_result(path: &Path) -> Result<SliceResult> {
    let text = read_file(path)?;
    let mut param = String::new();
    let mut grid = Vec::new();
    let mut points = Vec::new();
    let mut smoothed = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(Error::MalformedRow {
                path: path.into(),
                line: i + 1,
                reason: format!("{} fields, expected 5", f.len()),
            });
        }
        let num = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::MalformedRow {
                path: path.into(),
                line: i + 1,
                reason: format!("unparseable number `{s}`"),
            })
        };
        param = f[0].to_string();
        grid.push(num(f[1])?);
        points.push(LoglikEstimate {
            mean: num(f[2])?,
            mc_se: if f[3].is_empty() {
                None
            } else {
                Some(num(f[3])?)
            },
            replicates: 0,
            particles: 0,
        });
        smoothed.push(num(f[4])?);
    }
    if grid.is_empty() {
        return Err(Error::EmptySeries(format!("{}: no rows", path.display())));
    }
    Ok(SliceResult {
        param,
        grid,
        points,
        smoothed,
        widened: false,
    })
}

/// `param,estimate,se` rows.
pub fn write_se_report(report: &SeReport, path: &Path) -> Result<()> {
    let mut out = String::from("param,estimate,se\n");
    for i in 0..report.names.len() {
        out.push_str(&format!(
            "{},{},{}\n",
            report.names[i],
            fmt_float(report.estimates[i]),
            fmt_float(report.ses[i]),
        ));
    }
    write_file(path, &out)
}

pub fn load_se_report(path: &Path) -> Result<SeReport> {
    let text = read_file(path)?;
    let mut names = Vec::new();
    let mut estimates = Vec::new();
    let mut ses = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 3 {
            return Err(Error::MalformedRow {
                path: path.into(),
                line: i + 1,
                reason: format!("{} fields, expected 3", f.len()),
            });
        }
        let num = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::MalformedRow {
                path: path.into(),
                line: i + 1,
                reason: format!("unparseable number `{s}`"),
            })
        };
        names.push(f[0].to_string());
        estimates.push(num(f[1])?);
        ses.push(num(f[2])?);
    }
    Ok(SeReport {
        names,
        estimates,
        ses,
        projected: false,
    })
}
