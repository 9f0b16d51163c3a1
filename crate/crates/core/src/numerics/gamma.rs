use std::f64::consts::PI;



use crate::error::{Error, Result};

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// sin(pi x) with argument reduction, exact zeros at the integers.
fn sin_pi(x: f64) -> f64 {
    let k = x.round();
    let r = x - k;
    let s = (PI * r).sin();
    if (k as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

/// Gamma function on the real line, reflected below 1/2.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() || is_pole(x) {
        return Err(Error::Pole { x });
    }
    if x < 0.5 {
        let g = libm::tgamma(1.0 - x);
        return Ok(PI / (sin_pi(x) * g));
    }
    Ok(libm::tgamma(x))
}

/// ln Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(libm::lgamma(x))
}

/// `(ln |Γ(x)|, sign Γ(x))` for any non-pole x.
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if x.is_nan() || is_pole(x) {
        return Err(Error::Pole { x });
    }
    if x >= 0.5 {
        return Ok((libm::lgamma(x), 1.0));
    }
    let s = sin_pi(x);
    let ln = PI.ln() - s.abs().ln() - libm::lgamma(1.0 - x);
    Ok((ln, s.signum()))
}

/// `Π Γ(numer) / Π Γ(denom)` through log-gamma sums.
///
/// A pole in the denominator makes the ratio zero; a pole in the numerator is
/// an error.
pub fn gamma_ratio(numer: &[f64], denom: &[f64]) -> Result<f64> {
    let mut ln = 0.0;
    let mut sign = 1.0;
    for &a in numer {
        let (l, s) = ln_gamma_signed(a)?;
        ln += l;
        sign *= s;
    }
    for &b in denom {
        if is_pole(b) {
            return Ok(0.0);
        }
        let (l, s) = ln_gamma_signed(b)?;
        ln -= l;
        sign *= s;
    }
    Ok(sign * ln.exp())
}

/// Beta function B(a, b) = Γ(a)Γ(b)/Γ(a+b).
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    gamma_ratio(&[a, b], &[a + b])
}
