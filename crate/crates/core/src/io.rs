//! CSV and JSON formats: censored samples (`t,delta`), raw latent dumps
//! of cure samples, and Monte Carlo reports.

use std::io::Write;

use crate::censoring::{CensoredSample, CureSampleTruth};
use crate::error::{Error, Result};
use crate::montecarlo::McReport;

/// Latent lifetime written for cured units in raw dumps.
pub const CURED_SENTINEL: &str = "1.000e+54";

/// Rows of a sample file. `delta` is `None` for a `t`-only file.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCsv {
    pub t: Vec<f64>,
    pub delta: Option<Vec<bool>>,
}

impl SampleCsv {
    /// Censored sample; fails when the file had no `delta` column.
    pub fn censored(self) -> Result<CensoredSample> {
        match self.delta {
            Some(delta) => CensoredSample::new(self.t, delta),
            None => Err(Error::Config("the input has no delta column".into())),
        }
    }

    /// All rows as events, ignoring any `delta` column.
    pub fn complete(self) -> Result<CensoredSample> {
        CensoredSample::complete(self.t)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Parses a sample file with header `t` or `t,delta`. Times must be finite
/// and non-negative; `delta` must be `0` or `1`. Errors carry the 1-based
/// line number.
pub fn parse_sample_csv(text: &str) -> Result<SampleCsv> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let names: Vec<&str> = headers.iter().collect();
    let has_delta = match names.as_slice() {
        ["t"] => false,
        ["t", "delta"] => true,
        [""] | [] => return Err(parse_err(1, "empty input; expected header `t,delta` or `t`")),
        _ => return Err(parse_err(1, format!("expected header `t,delta` or `t`, got `{}`", names.join(",")))),
    };
    let mut t = Vec::new();
    let mut delta = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let expected = if has_delta { 2 } else { 1 };
        if record.len() != expected {
            return Err(parse_err(line, format!("expected {expected} fields, got {}", record.len())));
        }
        let value: f64 = record[0]
            .parse()
            .map_err(|_| parse_err(line, format!("`{}` is not a number", &record[0])))?;
        if !value.is_finite() || value < 0.0 {
            return Err(parse_err(line, format!("time must be finite and >= 0, got {value}")));
        }
        t.push(value);
        if has_delta {
            delta.push(match &record[1] {
                "1" => true,
                "0" => false,
                other => return Err(parse_err(line, format!("delta must be 0 or 1, got `{other}`"))),
            });
        }
    }
    if t.is_empty() {
        return Err(parse_err(2, "no data rows"));
    }
    Ok(SampleCsv { t, delta: has_delta.then_some(delta) })
}

pub fn read_sample_csv(path: &std::path::Path) -> Result<SampleCsv> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_sample_csv(&text)
}

fn io_err(e: std::io::Error) -> Error {
    Error::Config(format!("write failed: {e}"))
}

/// Writes `t,delta` rows at full precision.
pub fn write_sample_csv<W: Write>(mut w: W, sample: &CensoredSample) -> Result<()> {
    writeln!(w, "t,delta").map_err(io_err)?;
    for (t, d) in sample.t.iter().zip(&sample.delta) {
        writeln!(w, "{t},{}", u8::from(*d)).map_err(io_err)?;
    }
    Ok(())
}

/// Writes a `t`-only file.
pub fn write_times_csv<W: Write>(mut w: W, t: &[f64]) -> Result<()> {
    writeln!(w, "t").map_err(io_err)?;
    for v in t {
        writeln!(w, "{v}").map_err(io_err)?;
    }
    Ok(())
}

/// Raw dump `t,delta,cured,latent,c`; cured units show the latent
/// lifetime as [`CURED_SENTINEL`].
pub fn write_latent_csv<W: Write>(mut w: W, truth: &CureSampleTruth) -> Result<()> {
    writeln!(w, "t,delta,cured,latent,c").map_err(io_err)?;
    let s = &truth.censored;
    for i in 0..s.len() {
        let latent = truth.latent[i].map_or_else(|| CURED_SENTINEL.to_string(), |y| y.to_string());
        writeln!(
            w,
            "{},{},{},{latent},{}",
            s.t[i],
            u8::from(s.delta[i]),
            u8::from(truth.cured_flags[i]),
            truth.censoring_times[i]
        )
        .map_err(io_err)?;
    }
    Ok(())
}

/// Plot-ready rows `scheme,n,parameter,bias,mse,cp,failed`.
pub fn write_report_csv<W: Write>(mut w: W, reports: &[McReport]) -> Result<()> {
    writeln!(w, "scheme,n,parameter,bias,mse,cp,failed").map_err(io_err)?;
    for r in reports {
        for cell in &r.cells {
            for m in &cell.metrics {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    r.scheme, cell.n, m.parameter, m.bias, m.mse, m.cp, cell.failed
                )
                .map_err(io_err)?;
            }
        }
    }
    Ok(())
}

pub fn reports_to_json(reports: &[McReport]) -> Result<String> {
    serde_json::to_string_pretty(reports).map_err(|e| Error::Config(e.to_string()))
}
