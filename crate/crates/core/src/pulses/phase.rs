use super::shape::PulseShape;
use crate::error::Result;
use serde::{Deserialize, Serialize};

/// A shape scaled in height and duration and placed at `center`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacedPulse {
    pub shape: PulseShape,
    pub height: f64,
    pub duration: f64,
    pub center: f64,
}

impl PlacedPulse {
    fn local(&self, t: f64) -> f64 {
        (t - self.center) / self.duration
    }

    pub fn window(&self) -> (f64, f64) {
        let (a, b) = self.shape.window();
        (self.center + self.duration * a, self.center + self.duration * b)
    }
}

/// Integrated pulse φ(t) = ∫P + φ₀ for one or more placed shapes.
///
/// With `offset = 0` the phase runs from -A/2 to +A/2 (A the total area),
/// which makes it odd for a single symmetric pulse centered at zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseFunction {
    pub elements: Vec<PlacedPulse>,
    pub offset: f64,
}

/// Outcome of solving P(t) = ν for t > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StationaryPoint {
    pub root: Option<f64>,
    /// More than one positive root existed; the outermost one was returned.
    pub multiple: bool,
    /// The shape has jump edges and no interior solution.
    pub edge: bool,
}

impl PhaseFunction {
    pub fn new(shape: PulseShape) -> Self {
        PhaseFunction::placed(shape, 1.0, 1.0, 0.0)
    }

    pub fn placed(shape: PulseShape, height: f64, duration: f64, center: f64) -> Self {
        PhaseFunction { elements: vec![PlacedPulse { shape, height, duration, center }], offset: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for e in &self.elements {
            e.shape.validate()?;
            if !(e.height > 0.0 && e.duration > 0.0 && e.center.is_finite()) {
                return Err(crate::Error::config("pulse element needs positive height and duration"));
            }
        }
        if self.elements.is_empty() {
            return Err(crate::Error::config("phase function has no pulse elements"));
        }
        Ok(())
    }

    /// φ(t).
    pub fn phase_at(&self, t: f64) -> f64 {
        self.offset
            + self
                .elements
                .iter()
                .map(|e| e.height * e.duration * e.shape.phase(e.local(t)))
                .sum::<f64>()
    }

    /// P(t) = φ'(t).
    pub fn profile(&self, t: f64) -> f64 {
        self.elements.iter().map(|e| e.height * e.shape.profile(e.local(t))).sum()
    }

    /// P'(t).
    pub fn profile_derivative(&self, t: f64) -> f64 {
        self.elements
            .iter()
            .map(|e| e.height / e.duration * e.shape.derivative(e.local(t)))
            .sum()
    }

    /// Total ascent φ(+∞) - φ(-∞).
    pub fn area(&self) -> f64 {
        self.elements.iter().map(|e| e.height * e.duration * e.shape.area()).sum()
    }

    pub fn peak(&self) -> f64 {
        self.elements.iter().map(|e| e.height * e.shape.peak()).fold(0.0, f64::max)
    }

    /// Limits of φ at ±∞.
    pub fn plateaus(&self) -> (f64, f64) {
        let a = self.area();
        (self.offset - 0.5 * a, self.offset + 0.5 * a)
    }

    /// Union of element core windows.
    pub fn window(&self) -> (f64, f64) {
        self.elements.iter().map(|e| e.window()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (c, d)| {
            (a.min(c), b.max(d))
        })
    }

    pub fn knots(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self
            .elements
            .iter()
            .flat_map(|e| {
                let (a, b) = e.window();
                e.shape.knots().into_iter().map(move |u| e.center + e.duration * u).chain([a, b])
            })
            .collect();
        k.sort_by(f64::total_cmp);
        k.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        k
    }

    /// All t with P(t) = level, per element; elements do not overlap so the
    /// per-element roots are the roots of the sum.
    pub fn crossings(&self, level: f64) -> Vec<f64> {
        let mut r: Vec<f64> = self
            .elements
            .iter()
            .flat_map(|e| {
                e.shape.crossings(level / e.height).into_iter().map(move |u| e.center + e.duration * u)
            })
            .collect();
        r.sort_by(f64::total_cmp);
        r
    }

    pub fn is_symmetric(&self) -> bool {
        self.elements.len() == 1 && self.elements[0].center == 0.0 && self.elements[0].shape.is_symmetric()
    }

    pub fn is_continuous(&self) -> bool {
        self.elements.iter().all(|e| e.shape.is_continuous())
    }

    /// Positive root of P(t) = ν.
    pub fn stationary_point(&self, nu: f64) -> StationaryPoint {
        let edge = !self.is_continuous();
        let mut roots: Vec<f64> = self.crossings(nu).into_iter().filter(|&t| t >= 0.0).collect();
        roots.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        StationaryPoint { root: roots.last().copied(), multiple: roots.len() > 1, edge: edge && roots.is_empty() }
    }
}

/// φ(t) for the given phase function.
pub fn phase_at(p: &PhaseFunction, t: f64) -> f64 {
    p.phase_at(t)
}

/// Positive stationary point of the phase at reduced frequency ν.
pub fn stationary_point(p: &PhaseFunction, nu: f64) -> StationaryPoint {
    p.stationary_point(nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_2_SQRT_PI;

    #[test]
    fn examples() {
        let g = PhaseFunction::new(PulseShape::Gaussian);
        assert_eq!(g.phase_at(0.0), 0.0);
        assert!((g.phase_at(1.0) - 0.842_700_792_9).abs() < 1e-10);
        let s = PhaseFunction::new(PulseShape::Square);
        assert_eq!(s.phase_at(2.0), 0.5);
    }

    #[test]
    fn gaussian_stationary_points() {
        let g = PhaseFunction::new(PulseShape::Gaussian);
        assert_eq!(g.stationary_point(FRAC_2_SQRT_PI).root, Some(0.0));
        let t = g.stationary_point(1.0).root.unwrap();
        assert!((FRAC_2_SQRT_PI * (-t * t).exp() - 1.0).abs() < 1e-14);
        assert!(g.stationary_point(1.2).root.is_none());
    }

    #[test]
    fn square_has_only_edges() {
        let s = PhaseFunction::new(PulseShape::Square);
        let sp = s.stationary_point(0.5);
        assert!(sp.root.is_none() && sp.edge);
    }

    #[test]
    fn plateau_limits() {
        let p = PhaseFunction::placed(PulseShape::RaisedCosine, 2.0, 3.0, 1.0);
        let (lo, hi) = p.plateaus();
        assert!((p.phase_at(-10.0) - lo).abs() < 1e-15);
        assert!((p.phase_at(10.0) - hi).abs() < 1e-15);
        assert!((hi - lo - 6.0).abs() < 1e-15);
    }
}
