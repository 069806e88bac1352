use super::ddouble::DD;
use crate::error::{Error, Result};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Largest |x| for which erfi(x) is returned directly.
pub const ERFI_LIMIT: f64 = 26.0;

/// e^{-x^2} with x^2 carried in double-double so large arguments keep
/// full relative accuracy.
fn exp_neg_sq(x: f64) -> f64 {
    let s = DD::sqr_f64(x);
    (-s.hi).exp() * (1.0 - s.lo)
}

/// e^{x^2}, same treatment.
fn exp_sq(x: f64) -> f64 {
    let s = DD::sqr_f64(x);
    s.hi.exp() * (1.0 + s.lo)
}

/// erf via the positive-term series erf x = (2/√π) e^{-x²} Σ (2x²)^n x / (2n+1)!!.
fn erf_series(x: f64) -> f64 {
    let x2 = 2.0 * x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    while term.abs() > 1e-17 * sum.abs() {
        n += 1.0;
        term *= x2 / (2.0 * n + 1.0);
        sum += term;
    }
    FRAC_2_SQRT_PI * exp_neg_sq(x) * sum
}

/// erfc for x ≥ 2 via its continued fraction (modified Lentz).
fn erfc_cf(x: f64) -> f64 {
    // erfc x = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    exp_neg_sq(x) / (std::f64::consts::PI.sqrt() * f)
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let a = x.abs();
    let v = if a < 2.0 { erf_series(a) } else { 1.0 - erfc_cf(a) };
    v.copysign(x)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x >= 2.0 {
        erfc_cf(x)
    } else if x > -2.0 {
        1.0 - erf(x)
    } else {
        2.0 - erfc_cf(-x)
    }
}

/// Dawson integral F(x) = e^{-x²}∫₀ˣ e^{t²}dt for large x by its
/// asymptotic series 1/(2x) Σ (2k-1)!!/(2x²)^k.
fn dawson_asymptotic(x: f64) -> f64 {
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        let next = term * (2.0 * k - 1.0) * inv;
        if next.abs() > term.abs() || next.abs() < 1e-17 {
            break;
        }
        term = next;
        sum += term;
    }
    sum / (2.0 * x)
}

/// Imaginary error function erfi(x) = -i erf(ix).
///
/// For |x| > 26 the value would not survive later arithmetic; a range
/// error is returned with the scaled value e^{-x²}·erfi(x).
pub fn erfi(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("erfi: non-finite argument {x}")));
    }
    let a = x.abs();
    if a > ERFI_LIMIT {
        return Err(Error::Range {
            message: format!("erfi({x}) overflows; scaled value attached"),
            scaled: Some(erfi_scaled(x)),
        });
    }
    let v = if a < 6.0 {
        let x2 = a * a;
        let mut pow = a;
        let mut sum = a;
        let mut n = 0.0;
        loop {
            n += 1.0;
            pow *= x2 / n;
            let t = pow / (2.0 * n + 1.0);
            sum += t;
            if t < 1e-17 * sum {
                break;
            }
        }
        FRAC_2_SQRT_PI * sum
    } else {
        FRAC_2_SQRT_PI * exp_sq(a) * dawson_asymptotic(a)
    };
    Ok(v.copysign(x))
}

/// e^{-x²}·erfi(x), finite for every real x.
pub fn erfi_scaled(x: f64) -> f64 {
    let a = x.abs();
    let v = if a < 6.0 {
        exp_neg_sq(a) * erfi(a).unwrap_or(0.0)
    } else {
        FRAC_2_SQRT_PI * dawson_asymptotic(a)
    };
    v.copysign(x)
}
