use super::ddouble::DD;
use crate::error::{Error, Result};
use std::f64::consts::{FRAC_PI_4, PI, TAU};

/// Ai(0) and -Ai'(0) split into high and low parts.
const AI0: DD = DD::new(0.355_028_053_887_817_2, 2.052_336_324_362_12e-17);
const DAI0: DD = DD::new(0.258_819_403_792_806_8, -2.522_243_111_610_832e-17);

const TWO_PI: DD = DD::new(TAU, 2.449_293_598_294_706_4e-16);
const QUARTER_PI: DD = DD::new(FRAC_PI_4, 3.061_616_997_868_383e-17);

/// Crossover between the Maclaurin series and the asymptotic forms.
const SERIES_LIMIT: f64 = 8.0;

/// Result of an Airy evaluation that may have underflowed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AiryValue {
    pub value: f64,
    /// Set when the true value lies below the smallest normal double.
    pub underflow: bool,
}

/// Airy function of the first kind for real argument.
pub fn airy_ai(x: f64) -> Result<f64> {
    airy_ai_detail(x).map(|a| a.value)
}

/// Airy function with an explicit underflow flag.
pub fn airy_ai_detail(x: f64) -> Result<AiryValue> {
    if !x.is_finite() {
        return Err(Error::domain(format!("airy_ai: non-finite argument {x}")));
    }
    let value = if x.abs() <= SERIES_LIMIT {
        maclaurin(x)
    } else if x > 0.0 {
        return Ok(decaying(x));
    } else {
        oscillating(-x)
    };
    Ok(AiryValue { value, underflow: false })
}

fn maclaurin(x: f64) -> f64 {
    let x3 = DD::sqr_f64(x).mul_f64(x);
    let mut f = DD::from_f64(1.0);
    let mut g = DD::from_f64(x);
    let mut tf = f;
    let mut tg = g;
    let mut k = 1.0_f64;
    loop {
        let a = 3.0 * k;
        tf = (tf * x3).div_f64((a - 1.0) * a);
        tg = (tg * x3).div_f64(a * (a + 1.0));
        f = f + tf;
        g = g + tg;
        let scale = f.hi.abs().max(g.hi.abs()).max(1.0);
        if tf.hi.abs().max(tg.hi.abs()) < 1e-34 * scale {
            break;
        }
        k += 1.0;
        if k > 200.0 {
            break;
        }
    }
    (AI0 * f - DAI0 * g).to_f64()
}

/// Coefficients u_k of the Airy asymptotic series.
fn asymptotic_terms(zeta: f64, mut visit: impl FnMut(usize, f64) -> bool) {
    let mut u = 1.0_f64;
    let mut zk = 1.0_f64;
    let mut last = f64::INFINITY;
    for k in 0..80usize {
        if k > 0 {
            let kf = k as f64;
            u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
            zk /= zeta;
        }
        let term = u * zk;
        // stop before the divergent tail sets in
        if term.abs() > last {
            break;
        }
        last = term.abs();
        if !visit(k, term) || term.abs() < 1e-18 {
            break;
        }
    }
}

fn decaying(x: f64) -> AiryValue {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let log_pref = -zeta - (2.0 * PI.sqrt()).ln() - 0.25 * x.ln();
    if log_pref < f64::MIN_POSITIVE.ln() {
        return AiryValue { value: 0.0, underflow: true };
    }
    let mut sum = 0.0;
    asymptotic_terms(zeta, |k, t| {
        sum += if k % 2 == 0 { t } else { -t };
        true
    });
    AiryValue { value: log_pref.exp() * sum, underflow: false }
}

/// Ai(-y) for y > 0 with the oscillation phase reduced in extended precision.
fn oscillating(y: f64) -> f64 {
    let s = y.sqrt();
    // refine sqrt: s + (y - s^2)/(2s)
    let r = DD::from_f64(y) - DD::sqr_f64(s);
    let sq = DD::from_f64(s) + r.div_f64(2.0 * s);
    let zeta_dd = (DD::from_f64(y) * sq).mul_f64(2.0).div_f64(3.0);
    let zeta = zeta_dd.to_f64();

    let arg = zeta_dd - QUARTER_PI;
    let turns = (arg.hi / TWO_PI.hi).floor();
    let reduced = (arg - TWO_PI.mul_f64(turns)).to_f64();
    let (sn, cs) = reduced.sin_cos();

    let mut even = 0.0;
    let mut odd = 0.0;
    asymptotic_terms(zeta, |k, t| {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            even += sign * t;
        } else {
            odd += sign * t;
        }
        true
    });
    (cs * even + sn * odd) / (PI.sqrt() * y.powf(0.25))
}
