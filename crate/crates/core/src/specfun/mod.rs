//! Special functions: Airy Ai, erf, erfi, sinc.

mod airy;
pub(crate) mod ddouble;
mod erf;

pub use airy::{airy_ai, airy_ai_detail, AiryValue};
pub use erf::{erf, erfc, erfi, erfi_scaled, ERFI_LIMIT};

/// Unnormalized sinc, sin(x)/x, with sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// 1/x with the principal-value convention 1/0 = 0.
pub fn pv_reciprocal(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        1.0 / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_2_PI, PI};

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert!(sinc(PI).abs() < 1e-15);
        assert!((sinc(PI / 2.0) - FRAC_2_PI).abs() < 1e-16);
        assert_eq!(sinc(0.3), sinc(-0.3));
    }

    #[test]
    fn reciprocal_at_zero() {
        assert_eq!(pv_reciprocal(0.0), 0.0);
        assert_eq!(pv_reciprocal(4.0), 0.25);
    }
}
