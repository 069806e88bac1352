use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Piecewise-linear pulse read from samples; zero outside the sampled span.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSamples", into = "RawSamples")]
pub struct Tabulated {
    t: Vec<f64>,
    p: Vec<f64>,
    /// cumulative integral of `p` at each node, starting from 0
    cum: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawSamples {
    samples: Vec<(f64, f64)>,
}

impl TryFrom<RawSamples> for Tabulated {
    type Error = Error;
    fn try_from(raw: RawSamples) -> Result<Self> {
        Tabulated::new(&raw.samples)
    }
}

impl From<Tabulated> for RawSamples {
    fn from(tab: Tabulated) -> Self {
        RawSamples { samples: tab.t.iter().copied().zip(tab.p.iter().copied()).collect() }
    }
}

#[derive(Deserialize)]
struct Row {
    t: f64,
    #[serde(rename = "P")]
    p: f64,
}

impl Tabulated {
    /// Builds the table. Negative samples are clamped to zero and the
    /// result is rescaled to unit height.
    pub fn new(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 4 {
            return Err(Error::config(format!(
                "tabulated pulse needs at least 4 samples, got {}",
                samples.len()
            )));
        }
        let mut t = Vec::with_capacity(samples.len());
        let mut p = Vec::with_capacity(samples.len());
        for (i, &(ti, pi)) in samples.iter().enumerate() {
            if !ti.is_finite() || !pi.is_finite() {
                return Err(Error::config(format!("tabulated pulse: non-finite sample at row {i}")));
            }
            if let Some(&prev) = t.last() {
                if ti <= prev {
                    return Err(Error::config(format!(
                        "tabulated pulse: times must increase strictly (row {i})"
                    )));
                }
            }
            t.push(ti);
            p.push(pi.max(0.0));
        }
        let peak = p.iter().cloned().fold(0.0, f64::max);
        if peak <= 0.0 {
            return Err(Error::config("tabulated pulse is identically zero"));
        }
        p.iter_mut().for_each(|v| *v /= peak);
        let mut cum = vec![0.0; t.len()];
        for i in 1..t.len() {
            cum[i] = cum[i - 1] + 0.5 * (p[i] + p[i - 1]) * (t[i] - t[i - 1]);
        }
        Ok(Tabulated { t, p, cum })
    }

    /// Reads a two-column CSV with header `t,P`.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path.as_ref())?;
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "P" {
            return Err(Error::config(format!(
                "tabulated pulse {}: expected header `t,P`",
                path.as_ref().display()
            )));
        }
        let mut samples = Vec::new();
        for row in rdr.deserialize() {
            let r: Row = row?;
            samples.push((r.t, r.p));
        }
        Self::new(&samples)
    }

    pub fn times(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn area(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    fn segment(&self, u: f64) -> Option<usize> {
        if u < self.t[0] || u > *self.t.last().unwrap() {
            return None;
        }
        let i = self.t.partition_point(|&x| x <= u);
        Some(i.saturating_sub(1).min(self.t.len() - 2))
    }

    pub fn profile(&self, u: f64) -> f64 {
        match self.segment(u) {
            None => 0.0,
            Some(i) => {
                let w = (u - self.t[i]) / (self.t[i + 1] - self.t[i]);
                self.p[i] + w * (self.p[i + 1] - self.p[i])
            }
        }
    }

    pub fn slope(&self, u: f64) -> f64 {
        match self.segment(u) {
            None => 0.0,
            Some(i) => (self.p[i + 1] - self.p[i]) / (self.t[i + 1] - self.t[i]),
        }
    }

    /// Running integral of the profile from the left end of the table.
    /// Exact for the linear interpolant, so quadratic within a segment.
    pub fn cumulative(&self, u: f64) -> f64 {
        if u <= self.t[0] {
            return 0.0;
        }
        match self.segment(u) {
            None => self.area(),
            Some(i) => {
                let d = u - self.t[i];
                let slope = (self.p[i + 1] - self.p[i]) / (self.t[i + 1] - self.t[i]);
                self.cum[i] + self.p[i] * d + 0.5 * slope * d * d
            }
        }
    }

    /// All u with profile(u) = level.
    pub fn crossings(&self, level: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..self.t.len() - 1 {
            let (a, b) = (self.p[i] - level, self.p[i + 1] - level);
            if a == 0.0 {
                out.push(self.t[i]);
            } else if a * b < 0.0 {
                out.push(self.t[i] + (self.t[i + 1] - self.t[i]) * a / (a - b));
            }
        }
        if self.p[self.p.len() - 1] == level {
            out.push(*self.t.last().unwrap());
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.t.len();
        (0..n).all(|i| {
            let j = n - 1 - i;
            (self.t[i] + self.t[j]).abs() < 1e-12 && (self.p[i] - self.p[j]).abs() < 1e-12
        })
    }
}
