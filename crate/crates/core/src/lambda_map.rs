//! The exponent generalization
//!
//! ```text
//! x²(ax^λ + b) y'' + x(cx^λ + d) y' + (α_n x^λ + β(1 − (−1)ⁿ)/2) y = 0
//! ```
//!
//! solved by `S_n(a, b, r, s; x^{λ/2})` with
//! `r = (2/λ)c + (1 − 2/λ)a` and `s = (2/λ)d + (1 − 2/λ)b`.
//!
//! `λ` is a rational `2k/m` with `k` and `m` odd, so that `x^{λ/2}` is an odd
//! real map and `x^λ` an even one.

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::basis::{Basis, BasisFn};
use crate::core_class::{explicit_coeffs, monic_coeffs, ClassParams};
use crate::error::{Error, Result};
use crate::numerics::{IntervalSpec, PointBehavior};
use crate::subclasses::{SubclassSpec, Support};
use crate::verify::{gram_matrix, GramReport};

/// `λ = 2k/m` in lowest terms with `k` and `m` odd.
pub fn admissible(lambda: Rational64) -> bool {
    if lambda.is_zero() {
        return false;
    }
    let num = lambda.numer().abs();
    let den = lambda.denom().abs();
    num % 2 == 0 && (num / 2) % 2 == 1 && den % 2 == 1
}

/// `x^e` on the real branch: `(−1)^{num} |x|^e` for negative `x`, which
/// needs an odd denominator.
pub fn signed_power(x: f64, e: Rational64) -> Result<f64> {
    if *e.numer() == *e.denom() {
        return Ok(x);
    }
    let ef = e.to_f64().expect("finite rational");
    let mag = x.abs().powf(ef);
    if x >= 0.0 {
        return Ok(mag);
    }
    if e.denom() % 2 == 0 {
        return Err(Error::Domain(format!("even root {e} of negative x = {x}")));
    }
    Ok(if e.numer() % 2 == 0 { mag } else { -mag })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSpec {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    lambda: Rational64,
    params: ClassParams<f64>,
}

impl LambdaSpec {
    pub fn new(a: f64, b: f64, c: f64, d: f64, lambda: Rational64) -> Result<Self> {
        if !admissible(lambda) {
            return Err(Error::ConstraintViolation(format!(
                "lambda = {lambda} is not of the form 2k/m with k, m odd"
            )));
        }
        let l = lambda.to_f64().expect("finite rational");
        let r = (2.0 / l) * c + (1.0 - 2.0 / l) * a;
        let s = (2.0 / l) * d + (1.0 - 2.0 / l) * b;
        let params = ClassParams::new(a, b, r, s)?;
        Ok(LambdaSpec {
            a,
            b,
            c,
            d,
            lambda,
            params,
        })
    }

    /// The instance whose transformed class is `params`:
    /// `c = (λ/2)r + (1 − λ/2)p`, `d = (λ/2)s + (1 − λ/2)q`.
    pub fn from_class(params: &ClassParams<f64>, lambda: Rational64) -> Result<Self> {
        let (p, q, r, s) = params.as_tuple();
        let h = lambda.to_f64().expect("finite rational") / 2.0;
        LambdaSpec::new(p, q, h * r + (1.0 - h) * p, h * s + (1.0 - h) * q, lambda)
    }

    pub fn lambda(&self) -> Rational64 {
        self.lambda
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda.to_f64().expect("finite rational")
    }

    pub fn half_lambda(&self) -> Rational64 {
        self.lambda / 2
    }

    pub fn abcd(&self) -> (f64, f64, f64, f64) {
        (self.a, self.b, self.c, self.d)
    }

    /// `(p, q, r, s) = (a, b, r, s)` of the transformed class.
    pub fn class_params(&self) -> &ClassParams<f64> {
        &self.params
    }

    /// `x^{λ/2}` on the real branch.
    pub fn inner(&self, x: f64) -> Result<f64> {
        signed_power(x, self.half_lambda())
    }

    /// `x^λ`, computed as the square of `x^{λ/2}` so that it is even.
    pub fn power_lambda(&self, x: f64) -> Result<f64> {
        let z = self.inner(x)?;
        Ok(z * z)
    }
}

/// `S_n(a, b, r, s; x^{λ/2})` with the unnormalised coefficients.
pub fn transformed_eval(spec: &LambdaSpec, n: usize, x: f64) -> Result<f64> {
    let poly = explicit_coeffs(spec.class_params(), n)?;
    Ok(poly.eval(&spec.inner(x)?))
}

/// The monic `S̄_n(a, b, r, s; x^{λ/2})`.
pub fn transformed_eval_monic(spec: &LambdaSpec, n: usize, x: f64) -> Result<f64> {
    let poly = monic_coeffs(spec.class_params(), n)?;
    Ok(poly.eval(&spec.inner(x)?))
}

/// `α_n = −(λ/4) n (2c + (λn − 2)a)` and `β = −(λ/4)(2d + (λ − 2)b)`.
pub fn alpha_beta(spec: &LambdaSpec, n: usize) -> (f64, f64) {
    let l = spec.lambda_f64();
    let nf = n as f64;
    let alpha = -(l / 4.0) * nf * (2.0 * spec.c + (l * nf - 2.0) * spec.a);
    let beta = -(l / 4.0) * (2.0 * spec.d + (l - 2.0) * spec.b);
    (alpha, beta)
}

/// Left side of the equation at `y = transformed_eval`, for `x > 0`.
pub fn generic_ode_residual(spec: &LambdaSpec, n: usize, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("residual needs x > 0, got {x}")));
    }
    let poly = explicit_coeffs(spec.class_params(), n)?;
    let d1 = poly.derivative();
    let d2 = d1.derivative();
    let l = spec.lambda_f64();
    let h = l / 2.0;
    let z = x.powf(h);
    let xl = z * z;
    let dz = h * x.powf(h - 1.0);
    let d2z = h * (h - 1.0) * x.powf(h - 2.0);
    let y = poly.eval(&z);
    let dy = d1.eval(&z) * dz;
    let d2y = d2.eval(&z) * dz * dz + d1.eval(&z) * d2z;
    let (alpha, beta) = alpha_beta(spec, n);
    let parity = if n % 2 == 1 { beta } else { 0.0 };
    let (a, b, c, d) = spec.abcd();
    Ok(x * x * (a * xl + b) * d2y + x * (c * xl + d) * dy + (alpha * xl + parity) * y)
}

/// Monic members of a subclass composed with `t ↦ t^{λ/2}`, with weight
/// `W_λ(t) = (λ/2)|t|^{λ/2 − 1} W(t^{λ/2})` on `[−θ^{2/λ}, θ^{2/λ}]`.
///
/// This `W_λ` is the subclass weight pulled back along the substitution, so
/// the Gram matrix equals the one of the underlying subclass.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaBasis {
    spec: LambdaSpec,
    class: SubclassSpec,
}

impl LambdaBasis {
    pub fn new(class: SubclassSpec, lambda: Rational64) -> Result<Self> {
        class.validate()?;
        let spec = LambdaSpec::from_class(&class.params(), lambda)?;
        Ok(LambdaBasis { spec, class })
    }

    pub fn spec(&self) -> &LambdaSpec {
        &self.spec
    }

    pub fn class(&self) -> &SubclassSpec {
        &self.class
    }

    fn h(&self) -> f64 {
        self.spec.lambda_f64() / 2.0
    }
}

impl Basis for LambdaBasis {
    fn label(&self) -> String {
        format!("{} at lambda = {}", self.class, self.spec.lambda)
    }

    fn support(&self) -> Support {
        Support {
            theta: self.class.support().theta.powf(1.0 / self.h()),
        }
    }

    fn weight(&self, t: f64) -> f64 {
        let h = self.h();
        match self.spec.inner(t) {
            Ok(z) => {
                let w = self.class.weight_at(z).unwrap_or(f64::NAN);
                if w == 0.0 {
                    0.0
                } else {
                    h * t.abs().powf(h - 1.0) * w
                }
            }
            Err(_) => f64::NAN,
        }
    }

    fn function(&self, n: usize) -> Result<BasisFn<'_>> {
        let poly = monic_coeffs(self.spec.class_params(), n)?;
        Ok(Box::new(move |t| match self.spec.inner(t) {
            Ok(z) => poly.eval(&z),
            Err(_) => f64::NAN,
        }))
    }

    fn closed_norm(&self, n: usize) -> Result<f64> {
        Ok(self.class.norm_squared(n)?.value)
    }

    fn pair_interval(&self, n: usize, m: usize) -> IntervalSpec {
        let h = self.h();
        let mut iv = self.class.pair_interval(n, m);
        let theta = self.support().theta;
        iv.lower = -theta;
        iv.upper = theta;
        for s in &mut iv.singularities {
            if s.at == 0.0 {
                if let PointBehavior::Algebraic(g) = s.behavior {
                    s.behavior = PointBehavior::Algebraic(h * g + h - 1.0);
                }
            } else {
                s.at = s.at.signum() * s.at.abs().powf(1.0 / h);
            }
        }
        iv
    }

    fn pair_validity(&self, n: usize, m: usize) -> Option<crate::subclasses::PairValidity> {
        match self.class {
            SubclassSpec::FiniteI { .. } | SubclassSpec::FiniteII { .. } => {
                Some(self.class.valid_pair(n, m))
            }
            _ => None,
        }
    }
}

/// Gram matrix of a subclass composed with `t^{λ/2}`, integrated directly in
/// `t` against `W_λ`.
pub fn lambda_gram(class: SubclassSpec, lambda: Rational64, nmax: usize, tol: f64) -> Result<GramReport> {
    let basis = LambdaBasis::new(class, lambda)?;
    Ok(gram_matrix(&basis, nmax, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_class::ode_residual;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    /// `(a, b, c, d)` for which the `λ = 2/3` class is GUP(1, 1).
    fn two_thirds() -> LambdaSpec {
        LambdaSpec::new(-1.0, 1.0, -8.0 / 3.0, 4.0 / 3.0, r(2, 3)).unwrap()
    }

    #[test]
    fn admissibility() {
        assert!(admissible(r(2, 1)));
        assert!(admissible(r(2, 3)));
        assert!(admissible(r(6, 5)));
        assert!(admissible(r(-2, 3)));
        assert!(!admissible(r(1, 1)));
        assert!(!admissible(r(4, 1)));
        // 4/6 reduces to 2/3
        assert!(admissible(r(4, 6)));
        assert!(!admissible(r(4, 3)));
        assert!(!admissible(r(1, 2)));
        assert!(!admissible(r(0, 1)));
    }

    #[test]
    fn signed_powers() {
        assert!((signed_power(-8.0, r(1, 3)).unwrap() + 2.0).abs() < 1e-15);
        assert!((signed_power(4.0, r(1, 2)).unwrap() - 2.0).abs() < 1e-15);
        let v = signed_power(-0.7, r(1, 3)).unwrap();
        assert!((v + 0.7f64.cbrt()).abs() < 1e-15);
        assert!((v + 0.8879040017426006).abs() < 1e-12);
        assert!(signed_power(-4.0, r(1, 2)).is_err());
        assert_eq!(signed_power(-0.3, r(1, 1)).unwrap(), -0.3);
        assert_eq!(signed_power(-0.5, r(2, 3)).unwrap(), 0.5f64.powf(2.0 / 3.0));
    }

    #[test]
    fn derived_parameters() {
        let s = two_thirds();
        let (p, q, rr, ss) = s.class_params().as_tuple();
        assert_eq!((p, q), (-1.0, 1.0));
        assert!((rr + 6.0).abs() < 1e-14 && (ss - 2.0).abs() < 1e-14);
        let back = LambdaSpec::from_class(&SubclassSpec::gup(1.0, 1.0).unwrap().params(), r(2, 3)).unwrap();
        let (a, b, c, d) = back.abcd();
        assert_eq!((a, b), (-1.0, 1.0));
        assert!((c + 8.0 / 3.0).abs() < 1e-14 && (d - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn lambda_two_is_identity() {
        let params = ClassParams::new(0.5, 1.0, -3.0, 0.7).unwrap();
        let spec = LambdaSpec::from_class(&params, r(2, 1)).unwrap();
        assert_eq!(spec.class_params(), &params);
        for n in 0..7 {
            let poly = explicit_coeffs(&params, n).unwrap();
            for &x in &[-1.3, -0.2, 0.0, 0.9] {
                assert_eq!(transformed_eval(&spec, n, x).unwrap(), poly.eval(&x));
            }
            let (alpha, beta) = alpha_beta(&spec, n);
            let (p, _, rr, ss) = params.as_tuple();
            let nf = n as f64;
            assert_eq!(alpha, -nf * (rr + (nf - 1.0) * p));
            assert_eq!(beta, -ss);
        }
    }

    #[test]
    fn two_thirds_examples() {
        let spec = two_thirds();
        // S̄_2 of GUP(1, 1) is x² − 3/7.
        let v = transformed_eval_monic(&spec, 2, 0.125).unwrap();
        let m = monic_coeffs(spec.class_params(), 2).unwrap();
        assert!((v - m.eval(&0.5)).abs() < 1e-15);
        assert!((v - (0.25 - 3.0 / 7.0)).abs() < 1e-14);
        let (alpha, _) = alpha_beta(&spec, 4);
        let (a, _, c, _) = spec.abcd();
        let n = 4.0;
        assert!((alpha + (n / 3.0) * (c + (n / 3.0 - 1.0) * a)).abs() < 1e-13);
        assert_eq!(alpha_beta(&spec, 0).0, 0.0);
    }

    #[test]
    fn symmetry() {
        let spec = two_thirds();
        for n in 0..7 {
            for &x in &[0.1, 0.45, 0.99] {
                let plus = transformed_eval(&spec, n, x).unwrap();
                let minus = transformed_eval(&spec, n, -x).unwrap();
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert!((minus - sign * plus).abs() <= 1e-15 * plus.abs().max(1.0));
            }
        }
    }

    #[test]
    fn residuals() {
        let ghp = SubclassSpec::ghp(0.0).unwrap();
        let spec = LambdaSpec::from_class(&ghp.params(), r(2, 1)).unwrap();
        let ours = generic_ode_residual(&spec, 3, 1.1).unwrap();
        let core = ode_residual(&ghp.params(), 3, &1.1).unwrap();
        assert!(ours.abs() < 1e-9 && (ours - core).abs() < 1e-12);
        let spec = two_thirds();
        assert!(generic_ode_residual(&spec, 2, 0.4).unwrap().abs() < 1e-8);
        assert_eq!(generic_ode_residual(&spec, 0, 0.4).unwrap(), 0.0);
        for n in 0..9 {
            for &x in &[0.05, 0.3, 0.7, 0.95] {
                let res = generic_ode_residual(&spec, n, x).unwrap();
                assert!(res.abs() < 1e-9, "n={n} x={x}: {res}");
            }
        }
        let wide = LambdaSpec::new(1.0, 2.0, -3.0, 0.5, r(6, 5)).unwrap();
        for n in 0..6 {
            let res = generic_ode_residual(&wide, n, 0.8).unwrap();
            assert!(res.abs() < 1e-9, "n={n}: {res}");
        }
    }

    #[test]
    fn weight_matches_integral_form() {
        // d/dt ln W_λ = 2/(3t) + ((c − 8a/3) t^{2/3} + (d − 2b)) / (a t^{5/3} + b t)
        let basis = LambdaBasis::new(SubclassSpec::gup(1.0, 1.0).unwrap(), r(2, 3)).unwrap();
        let (a, b, c, d) = basis.spec().abcd();
        for &t in &[0.1, 0.35, 0.6, 0.8] {
            let h = 1e-6;
            let fd = (basis.weight(t + h).ln() - basis.weight(t - h).ln()) / (2.0 * h);
            let t23 = t.powf(2.0 / 3.0);
            let want = 2.0 / (3.0 * t)
                + ((c - 8.0 * a / 3.0) * t23 + (d - 2.0 * b)) / (a * t.powf(5.0 / 3.0) + b * t);
            assert!((fd - want).abs() < 1e-6 * want.abs().max(1.0), "t={t}: {fd} vs {want}");
        }
    }

    #[test]
    fn gram_single_entry() {
        let report = lambda_gram(SubclassSpec::gup(1.0, 1.0).unwrap(), r(2, 3), 0, 1e-8).unwrap();
        assert!(report.pass, "{:?}", report.failures);
        assert!((report.value(0, 0) - 4.0 / 15.0).abs() < 1e-10);
    }
}
