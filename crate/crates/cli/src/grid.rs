//! Parsing of time values (`1.5`, `pi`, `2pi`, `0.5*pi`) and grids
//! (`start:stop:points`).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A real number, optionally followed by `pi` (with or without `*`).
pub fn parse_value(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let lower = s.to_ascii_lowercase();
    let value = match lower.strip_suffix("pi") {
        Some(head) => {
            let head = head.trim().trim_end_matches('*').trim();
            let factor = match head {
                "" | "+" => 1.0,
                "-" => -1.0,
                h => h.parse::<f64>().map_err(|_| format!("bad number {s:?}"))?,
            };
            factor * PI
        }
        None => lower.parse::<f64>().map_err(|_| format!("bad number {s:?}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

/// `points` equally spaced times from `start` to `stop` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn times(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.start],
            n => {
                let step = (self.stop - self.start) / (n - 1) as f64;
                (0..n).map(|i| self.start + step * i as f64).collect()
            }
        }
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, points] = parts.as_slice() else {
            return Err(format!("grid must look like start:stop:points, got {s:?}"));
        };
        let grid = Self {
            start: parse_value(start)?,
            stop: parse_value(stop)?,
            points: points
                .trim()
                .parse()
                .map_err(|_| format!("bad point count {points:?}"))?,
        };
        if grid.points > 1 && grid.stop < grid.start {
            return Err(format!("grid runs backwards: {s:?}"));
        }
        Ok(grid)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.points)
    }
}

/// `pi`, `2pi`, ... when `x` is a small multiple of pi, else the number.
pub fn describe_time(x: f64) -> String {
    let k = (x / PI).round();
    if k >= 1.0 && k <= 1000.0 && (x - k * PI).abs() <= 1e-9 * x.abs() {
        if k == 1.0 {
            "pi".to_string()
        } else {
            format!("{k}pi")
        }
    } else {
        format!("{x}")
    }
}
