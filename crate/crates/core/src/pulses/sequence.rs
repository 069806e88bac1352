use super::phase::{PhaseFunction, PlacedPulse};
use super::shape::PulseShape;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceElement {
    pub shape: PulseShape,
    #[serde(default = "one")]
    pub height_ratio: f64,
    #[serde(default = "one")]
    pub duration_ratio: f64,
    /// Gap before this element: for the first element it is the position
    /// of its center, for later ones the distance from the previous
    /// element's right window edge to this element's left edge.
    #[serde(default)]
    pub delay_before: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    pub elements: Vec<SequenceElement>,
}

impl SequenceElement {
    pub fn unit(shape: PulseShape, delay_before: f64) -> Self {
        SequenceElement { shape, height_ratio: 1.0, duration_ratio: 1.0, delay_before }
    }
}

/// Lays the elements out on the time axis.
pub fn concatenate(seq: &PulseSequence) -> Result<PhaseFunction> {
    if seq.elements.is_empty() {
        return Err(Error::config("pulse sequence is empty"));
    }
    let mut placed = Vec::with_capacity(seq.elements.len());
    let mut right_edge = 0.0;
    for (i, e) in seq.elements.iter().enumerate() {
        e.shape.validate()?;
        if !(e.height_ratio > 0.0 && e.duration_ratio > 0.0) {
            return Err(Error::config(format!("pulse sequence element {i}: ratios must be positive")));
        }
        if !e.delay_before.is_finite() {
            return Err(Error::config(format!("pulse sequence element {i}: non-finite delay")));
        }
        let (a, b) = e.shape.window();
        let center = if i == 0 {
            e.delay_before
        } else {
            if e.delay_before < 0.0 {
                return Err(Error::config(format!(
                    "pulse sequence element {i}: negative delay gives overlapping supports"
                )));
            }
            right_edge + e.delay_before - e.duration_ratio * a
        };
        right_edge = center + e.duration_ratio * b;
        placed.push(PlacedPulse {
            shape: e.shape.clone(),
            height: e.height_ratio,
            duration: e.duration_ratio,
            center,
        });
    }
    Ok(PhaseFunction { elements: placed, offset: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squares(h2: f64, gap: f64) -> PulseSequence {
        PulseSequence {
            elements: vec![
                SequenceElement::unit(PulseShape::Square, 0.0),
                SequenceElement { height_ratio: h2, ..SequenceElement::unit(PulseShape::Square, gap) },
            ],
        }
    }

    #[test]
    fn singleton_matches_element() {
        let seq = PulseSequence { elements: vec![SequenceElement::unit(PulseShape::Gaussian, 0.0)] };
        let p = concatenate(&seq).unwrap();
        let q = PhaseFunction::new(PulseShape::Gaussian);
        for t in [-2.0, -0.3, 0.0, 0.7, 4.0] {
            assert_eq!(p.phase_at(t), q.phase_at(t));
        }
    }

    #[test]
    fn ascent_adds_up() {
        assert!((concatenate(&squares(1.0, 4.0)).unwrap().area() - 2.0).abs() < 1e-15);
        assert!((concatenate(&squares(2.0, 4.0)).unwrap().area() - 3.0).abs() < 1e-15);
        let p = concatenate(&squares(1.0, 4.0)).unwrap();
        assert_eq!(p.elements[1].center, 5.0);
    }

    #[test]
    fn overlap_rejected() {
        assert!(matches!(concatenate(&squares(1.0, -0.5)), Err(Error::Config(_))));
    }
}
