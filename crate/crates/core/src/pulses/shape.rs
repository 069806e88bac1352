use super::tabulated::Tabulated;
use crate::error::{Error, Result};
use crate::specfun::erf;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_2_SQRT_PI, PI};

/// Half-width of the Gaussian core window; erfc beyond it is below 1e-14.
pub const GAUSSIAN_WINDOW: f64 = 5.5;

/// Pulse shape in units of the pulse duration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PulseShape {
    Square,
    /// Profile (2/√π)e^{-t²} so that the phase is erf(t).
    Gaussian,
    /// Flat top with linear edges; `edge_fraction` is the ramp width.
    Trapezoid { edge_fraction: f64 },
    /// cos²(πt/2) on |t| ≤ 1.
    RaisedCosine,
    Tabulated(Tabulated),
}

impl PulseShape {
    pub fn trapezoid(edge_fraction: f64) -> Result<Self> {
        let s = PulseShape::Trapezoid { edge_fraction };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if let PulseShape::Trapezoid { edge_fraction: s } = *self {
            if !(s > 0.0 && s <= 0.5) {
                return Err(Error::config(format!("trapezoid edge_fraction must lie in (0, 0.5], got {s}")));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            PulseShape::Square => "square",
            PulseShape::Gaussian => "gaussian",
            PulseShape::Trapezoid { .. } => "trapezoid",
            PulseShape::RaisedCosine => "raised_cosine",
            PulseShape::Tabulated(_) => "tabulated",
        }
    }

    fn ramp(s: f64) -> (f64, f64) {
        (0.5 - 0.5 * s, 0.5 + 0.5 * s)
    }

    /// P(u).
    pub fn profile(&self, u: f64) -> f64 {
        match self {
            PulseShape::Square => {
                if u.abs() <= 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
            PulseShape::Gaussian => FRAC_2_SQRT_PI * (-u * u).exp(),
            PulseShape::Trapezoid { edge_fraction: s } => {
                let (_, c2) = Self::ramp(*s);
                ((c2 - u.abs()) / s).clamp(0.0, 1.0)
            }
            PulseShape::RaisedCosine => {
                if u.abs() <= 1.0 {
                    let c = (0.5 * PI * u).cos();
                    c * c
                } else {
                    0.0
                }
            }
            PulseShape::Tabulated(t) => t.profile(u),
        }
    }

    /// P'(u), zero at kinks and jumps.
    pub fn derivative(&self, u: f64) -> f64 {
        match self {
            PulseShape::Square => 0.0,
            PulseShape::Gaussian => -2.0 * u * self.profile(u),
            PulseShape::Trapezoid { edge_fraction: s } => {
                let (c1, c2) = Self::ramp(*s);
                let a = u.abs();
                if a > c1 && a < c2 {
                    -u.signum() / s
                } else {
                    0.0
                }
            }
            PulseShape::RaisedCosine => {
                if u.abs() <= 1.0 {
                    -0.5 * PI * (PI * u).sin()
                } else {
                    0.0
                }
            }
            PulseShape::Tabulated(t) => t.slope(u),
        }
    }

    /// Integrated profile, normalized to run from -area/2 to +area/2.
    pub fn phase(&self, u: f64) -> f64 {
        match self {
            PulseShape::Square => u.clamp(-0.5, 0.5),
            PulseShape::Gaussian => erf(u),
            PulseShape::Trapezoid { edge_fraction: s } => {
                let (c1, c2) = Self::ramp(*s);
                let a = u.abs();
                let v = if a <= c1 {
                    a
                } else if a < c2 {
                    0.5 - (c2 - a) * (c2 - a) / (2.0 * s)
                } else {
                    0.5
                };
                v.copysign(u)
            }
            PulseShape::RaisedCosine => {
                let v = u.clamp(-1.0, 1.0);
                0.5 * v + (PI * v).sin() / (2.0 * PI)
            }
            PulseShape::Tabulated(t) => t.cumulative(u) - 0.5 * t.area(),
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            PulseShape::Gaussian => 2.0,
            PulseShape::Tabulated(t) => t.area(),
            _ => 1.0,
        }
    }

    pub fn peak(&self) -> f64 {
        match self {
            PulseShape::Gaussian => FRAC_2_SQRT_PI,
            _ => 1.0,
        }
    }

    /// Largest |P'|, infinite for shapes with jumps.
    pub fn max_slope(&self) -> f64 {
        match self {
            PulseShape::Square => f64::INFINITY,
            // at u = 1/√2
            PulseShape::Gaussian => FRAC_2_SQRT_PI * (2.0f64).sqrt() * (-0.5f64).exp(),
            PulseShape::Trapezoid { edge_fraction: s } => 1.0 / s,
            PulseShape::RaisedCosine => 0.5 * PI,
            PulseShape::Tabulated(t) => {
                let (ts, ps) = (t.times(), t.values());
                let inner = ts
                    .windows(2)
                    .zip(ps.windows(2))
                    .map(|(a, b)| ((b[1] - b[0]) / (a[1] - a[0])).abs())
                    .fold(0.0, f64::max);
                if ps[0] > 0.0 || ps[ps.len() - 1] > 0.0 {
                    f64::INFINITY
                } else {
                    inner
                }
            }
        }
    }

    /// Core window outside of which the phase is flat to working accuracy.
    pub fn window(&self) -> (f64, f64) {
        match self {
            PulseShape::Square => (-0.5, 0.5),
            PulseShape::Gaussian => (-GAUSSIAN_WINDOW, GAUSSIAN_WINDOW),
            PulseShape::Trapezoid { edge_fraction: s } => {
                let (_, c2) = Self::ramp(*s);
                (-c2, c2)
            }
            PulseShape::RaisedCosine => (-1.0, 1.0),
            PulseShape::Tabulated(t) => (t.times()[0], *t.times().last().unwrap()),
        }
    }

    /// Points where the profile is not smooth.
    pub fn knots(&self) -> Vec<f64> {
        match self {
            PulseShape::Square => vec![-0.5, 0.5],
            PulseShape::Gaussian => vec![],
            PulseShape::Trapezoid { edge_fraction: s } => {
                let (c1, c2) = Self::ramp(*s);
                vec![-c2, -c1, c1, c2]
            }
            PulseShape::RaisedCosine => vec![-1.0, 1.0],
            PulseShape::Tabulated(t) => t.times().to_vec(),
        }
    }

    /// Every u at which P(u) = level; empty for jump-only shapes.
    pub fn crossings(&self, level: f64) -> Vec<f64> {
        if level <= 0.0 || level > self.peak() {
            return vec![];
        }
        let pair = |r: f64| if r == 0.0 { vec![0.0] } else { vec![-r, r] };
        match self {
            PulseShape::Square => vec![],
            PulseShape::Gaussian => pair((FRAC_2_SQRT_PI / level).ln().max(0.0).sqrt()),
            PulseShape::Trapezoid { edge_fraction: s } => {
                if level >= 1.0 {
                    return vec![];
                }
                let (_, c2) = Self::ramp(*s);
                pair(c2 - level * s)
            }
            PulseShape::RaisedCosine => pair(2.0 / PI * level.sqrt().acos()),
            PulseShape::Tabulated(t) => t.crossings(level),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            PulseShape::Tabulated(t) => t.is_symmetric(),
            _ => true,
        }
    }

    /// True when P has no jumps (a stationary-phase treatment makes sense).
    pub fn is_continuous(&self) -> bool {
        match self {
            PulseShape::Square => false,
            PulseShape::Tabulated(t) => {
                let p = t.values();
                p[0] == 0.0 && p[p.len() - 1] == 0.0
            }
            _ => true,
        }
    }
}
