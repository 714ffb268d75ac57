//! Sampled correlation functions and their CSV interchange format.
//!
//! File layout: one JSON header line with observable, sites, temperature
//! and chain hash; a `t,re,im` column line; one row per time point.

use std::io::{BufRead, Write};

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::Temperature;
use crate::error::{Error, Result};
use crate::jacobi::SymmetricChain;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CorrelationSeries<T> {
    pub observable: String,
    pub sites: Vec<usize>,
    pub temperature: Temperature,
    pub chain_hash: Option<String>,
    pub times: Vec<T>,
    pub values: Vec<Complex<T>>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    observable: String,
    sites: Vec<usize>,
    temperature: Temperature,
    chain_hash: Option<String>,
}

/// Shortest round-trip decimal, switching to exponent notation outside
/// `[1e-5, 1e16)` so tiny values stay compact.
pub fn format_number<T: Real>(x: T) -> String {
    let a = x.abs();
    if a != T::zero() && (a < T::lit(1e-5) || a >= T::lit(1e16)) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// SHA-256 of the chain's compact JSON encoding, hex encoded.
pub fn chain_hash<T: Real>(chain: &SymmetricChain<T>) -> String {
    let json = serde_json::to_string(chain).expect("chain serializes");
    hex::encode(Sha256::digest(json.as_bytes()))
}

impl<T: Real> CorrelationSeries<T> {
    /// Requires one value per time and a nondecreasing grid.
    pub fn new(
        observable: &str,
        sites: Vec<usize>,
        temperature: Temperature,
        times: Vec<T>,
        values: Vec<Complex<T>>,
    ) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::LengthMismatch {
                what: "values",
                expected: times.len(),
                found: values.len(),
            });
        }
        if let Some(i) = times.windows(2).position(|w| !(w[1] >= w[0])) {
            return Err(Error::NotAscending { index: i + 1 });
        }
        Ok(Self {
            observable: observable.to_string(),
            sites,
            temperature,
            chain_hash: None,
            times,
            values,
        })
    }

    pub fn with_chain_hash(mut self, chain: &SymmetricChain<T>) -> Self {
        self.chain_hash = Some(chain_hash(chain));
        self
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header = Header {
            observable: self.observable.clone(),
            sites: self.sites.clone(),
            temperature: self.temperature,
            chain_hash: self.chain_hash.clone(),
        };
        writeln!(w, "{}", serde_json::to_string(&header)?)?;
        writeln!(w, "t,re,im")?;
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(w, "{},{},{}", format_number(*t), format_number(v.re), format_number(v.im))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header: Header = match lines.next() {
            Some(line) => serde_json::from_str(&line?)?,
            None => return Err(Error::Format("missing header line".into())),
        };
        let columns = lines.next().transpose()?;
        if columns.as_deref().map(str::trim) != Some("t,re,im") {
            return Err(Error::Format("missing t,re,im column line".into()));
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (row, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            let parse = |s: &str| -> Result<T> {
                s.trim()
                    .parse::<f64>()
                    .map(T::lit)
                    .map_err(|_| Error::Format(format!("row {}: bad number {s:?}", row + 1)))
            };
            if cols.len() != 3 {
                return Err(Error::Format(format!("row {}: expected 3 columns", row + 1)));
            }
            times.push(parse(cols[0])?);
            values.push(Complex::new(parse(cols[1])?, parse(cols[2])?));
        }
        let mut s = Self::new(&header.observable, header.sites, header.temperature, times, values)?;
        s.chain_hash = header.chain_hash;
        Ok(s)
    }
}

/// `max |C(t + period) - C(t)|` over grid pairs separated by `period`
/// (matched to `1e-9 * max(1, |t|)`).
pub fn periodicity_check<T: Real>(series: &CorrelationSeries<T>, period: T) -> Result<T> {
    let times = &series.times;
    let mut worst = T::zero();
    let mut pairs = 0usize;
    for (i, &t) in times.iter().enumerate() {
        let target = t + period;
        let tol = T::lit(1e-9) * target.abs().max(T::one());
        let j = times.partition_point(|&s| s < target - tol);
        if j < times.len() && (times[j] - target).abs() <= tol {
            worst = worst.max((series.values[j] - series.values[i]).norm());
            pairs += 1;
        }
    }
    if pairs == 0 {
        return Err(Error::NoPeriodPairs {
            period: period.to_f64_lossy(),
        });
    }
    Ok(worst)
}
