//! The four canonical members of the generic class: generalized
//! ultraspherical (GUP), generalized Hermite (GHP) and the two finite
//! classes on the real line.

use std::f64::consts::PI;
use std::fmt;

use crate::core_class::{recurrence_c, ClassParams};
use crate::error::{Error, Result};
use crate::numerics::{ln_gamma_signed, IntervalSpec, Symmetry};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubclassSpec {
    /// Weight `|x|^{2u} (1 − x²)^v` on `[−1, 1]`.
    Gup { u: f64, v: f64 },
    /// Weight `|x|^{2u} e^{−x²}` on the real line.
    Ghp { u: f64 },
    /// Weight `|x|^{−2u} (1 + x²)^{−v}` on the real line, finitely many members.
    FiniteI { u: f64, v: f64 },
    /// Weight `|x|^{−2u} e^{−1/x²}` on the real line, degrees up to `u − 1/2`.
    FiniteII { u: f64 },
}

/// Orthogonality interval `[−θ, θ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub theta: f64,
}

impl Support {
    pub fn lower(&self) -> f64 {
        -self.theta
    }

    pub fn upper(&self) -> f64 {
        self.theta
    }

    pub fn is_finite(&self) -> bool {
        self.theta.is_finite()
    }

    pub fn contains_open(&self, x: f64) -> bool {
        x > -self.theta && x < self.theta
    }
}

/// Squared weighted norm `∫ W S̄_n²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormValue {
    pub n: usize,
    pub value: f64,
}

/// Verdict on a degree pair for the finite classes.
#[derive(Debug, Clone, PartialEq)]
pub struct PairValidity {
    /// The degree condition stated for the class.
    pub stated: bool,
    /// Independent exponent count: `W S̄_n S̄_m` integrable at 0 and ±∞.
    pub integrable: bool,
    pub reason: String,
}

impl PairValidity {
    pub fn agree(&self) -> bool {
        self.stated == self.integrable
    }
}

impl fmt::Display for SubclassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubclassSpec::Gup { u, v } => write!(f, "GUP(u={u}, v={v})"),
            SubclassSpec::Ghp { u } => write!(f, "GHP(u={u})"),
            SubclassSpec::FiniteI { u, v } => write!(f, "FiniteI(u={u}, v={v})"),
            SubclassSpec::FiniteII { u } => write!(f, "FiniteII(u={u})"),
        }
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::ConstraintViolation(format!("{name} must be finite")))
    }
}

impl SubclassSpec {
    pub fn gup(u: f64, v: f64) -> Result<Self> {
        let s = SubclassSpec::Gup { u, v };
        s.validate()?;
        Ok(s)
    }

    pub fn ghp(u: f64) -> Result<Self> {
        let s = SubclassSpec::Ghp { u };
        s.validate()?;
        Ok(s)
    }

    pub fn finite_one(u: f64, v: f64) -> Result<Self> {
        let s = SubclassSpec::FiniteI { u, v };
        s.validate()?;
        Ok(s)
    }

    pub fn finite_two(u: f64) -> Result<Self> {
        let s = SubclassSpec::FiniteII { u };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SubclassSpec::Gup { u, v } => {
                finite("u", u)?;
                finite("v", v)?;
                if u + 0.5 <= 0.0 {
                    return Err(Error::ConstraintViolation("GUP requires u + 1/2 > 0".into()));
                }
                if v + 1.0 <= 0.0 {
                    return Err(Error::ConstraintViolation("GUP requires v + 1 > 0".into()));
                }
            }
            SubclassSpec::Ghp { u } => {
                finite("u", u)?;
                if u + 0.5 <= 0.0 {
                    return Err(Error::ConstraintViolation("GHP requires u + 1/2 > 0".into()));
                }
            }
            SubclassSpec::FiniteI { u, v } => {
                finite("u", u)?;
                finite("v", v)?;
            }
            SubclassSpec::FiniteII { u } => {
                finite("u", u)?;
                if u <= 0.5 {
                    return Err(Error::ConstraintViolation(
                        "finite class II requires u > 1/2".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// `(p, q, r, s)` in any scalar type.
    pub fn class_params<T: Scalar>(&self) -> Result<ClassParams<T>> {
        let (p, q, r, s) = match *self {
            SubclassSpec::Gup { u, v } => (-1.0, 1.0, -2.0 * u - 2.0 * v - 2.0, 2.0 * u),
            SubclassSpec::Ghp { u } => (0.0, 1.0, -2.0, 2.0 * u),
            SubclassSpec::FiniteI { u, v } => (1.0, 1.0, -2.0 * u - 2.0 * v + 2.0, -2.0 * u),
            SubclassSpec::FiniteII { u } => (1.0, 0.0, -2.0 * u + 2.0, 2.0),
        };
        ClassParams::from_f64(p, q, r, s)
    }

    pub fn params(&self) -> ClassParams<f64> {
        self.class_params::<f64>()
            .expect("validated subclass parameters are admissible")
    }

    pub fn support(&self) -> Support {
        match self {
            SubclassSpec::Gup { .. } => Support { theta: 1.0 },
            _ => Support {
                theta: f64::INFINITY,
            },
        }
    }

    /// Largest admissible degree under the stated condition, if finite.
    pub fn max_degree(&self) -> Option<f64> {
        match *self {
            SubclassSpec::Gup { .. } | SubclassSpec::Ghp { .. } => None,
            SubclassSpec::FiniteI { u, v } => {
                let a = if v >= 1.0 { u + 0.5 } else { f64::NEG_INFINITY };
                let b = if u >= 1.0 { v + 0.5 } else { f64::NEG_INFINITY };
                Some(a.max(b))
            }
            SubclassSpec::FiniteII { u } => Some(u - 0.5),
        }
    }

    /// Weight function with absolute-value powers.
    pub fn weight_at(&self, x: f64) -> Result<f64> {
        if !self.support().contains_open(x) {
            return Err(Error::Domain(format!("x = {x} outside the open support of {self}")));
        }
        let ax = x.abs();
        let w = match *self {
            SubclassSpec::Gup { u, v } => ax.powf(2.0 * u) * ((1.0 - x) * (1.0 + x)).powf(v),
            SubclassSpec::Ghp { u } => ax.powf(2.0 * u) * (-x * x).exp(),
            SubclassSpec::FiniteI { u, v } => ax.powf(-2.0 * u) * (1.0 + x * x).powf(-v),
            SubclassSpec::FiniteII { u } => {
                if x == 0.0 {
                    return Ok(0.0);
                }
                ax.powf(-2.0 * u) * (-1.0 / (x * x)).exp()
            }
        };
        if w.is_infinite() {
            return Err(Error::SingularPoint { x });
        }
        Ok(w)
    }

    fn ln_moment_zero(&self) -> Result<f64> {
        let lg = |a: f64| ln_gamma_signed(a).map(|(l, _)| l);
        match *self {
            SubclassSpec::Gup { u, v } => Ok(lg(u + 0.5)? + lg(v + 1.0)? - lg(u + v + 1.5)?),
            SubclassSpec::Ghp { u } => lg(u + 0.5),
            SubclassSpec::FiniteI { u, v } => {
                if u >= 0.5 {
                    return Err(Error::DivergentMoment(format!(
                        "origin: |x|^(-2u) needs u < 1/2, got u = {u}"
                    )));
                }
                if u + v <= 0.5 {
                    return Err(Error::DivergentMoment(format!(
                        "infinity: needs u + v > 1/2, got {}",
                        u + v
                    )));
                }
                Ok(lg(0.5 - u)? + lg(u + v - 0.5)? - lg(v)?)
            }
            SubclassSpec::FiniteII { u } => lg(u - 0.5),
        }
    }

    /// `∫ W` over the support in closed form:
    /// `B(u+1/2, v+1)`, `Γ(u+1/2)`, `Γ(1/2−u)Γ(u+v−1/2)/Γ(v)`, `Γ(u−1/2)`.
    pub fn moment_zero(&self) -> Result<f64> {
        Ok(self.ln_moment_zero()?.exp())
    }

    /// Independent exponent count for `∫ W S̄_n S̄_m`.
    fn integrability(&self, n: usize, m: usize) -> (bool, String) {
        let bits = (n % 2 + m % 2) as f64;
        let deg = (n + m) as f64;
        match *self {
            SubclassSpec::Gup { .. } | SubclassSpec::Ghp { .. } => {
                (true, "weight integrable for all degrees".into())
            }
            SubclassSpec::FiniteI { u, v } => {
                let origin = -2.0 * u + bits;
                let tail = -2.0 * u - 2.0 * v + deg;
                let ok = origin > -1.0 && tail < -1.0;
                (
                    ok,
                    format!("origin exponent {origin} (needs > -1), tail exponent {tail} (needs < -1)"),
                )
            }
            SubclassSpec::FiniteII { u } => {
                let tail = -2.0 * u + deg;
                (tail < -1.0, format!("tail exponent {tail} (needs < -1)"))
            }
        }
    }

    pub fn valid_pair(&self, n: usize, m: usize) -> PairValidity {
        let big = n.max(m) as f64;
        let (integrable, why) = self.integrability(n, m);
        let (stated, cond) = match *self {
            SubclassSpec::Gup { .. } | SubclassSpec::Ghp { .. } => (true, "infinite class".into()),
            SubclassSpec::FiniteI { u, v } => {
                let first = v >= 1.0 && big <= u + 0.5;
                let second = u >= 1.0 && big <= v + 0.5;
                (
                    first || second,
                    format!("v >= 1 and N <= u + 1/2 = {}, or u >= 1 and N <= v + 1/2 = {}", u + 0.5, v + 0.5),
                )
            }
            SubclassSpec::FiniteII { u } => (big <= u - 0.5, format!("N <= u - 1/2 = {}", u - 0.5)),
        };
        PairValidity {
            stated,
            integrable,
            reason: format!("{self}, N = {big}: stated condition {cond}; {why}"),
        }
    }

    /// `(−1)ⁿ Π_{i=1}^{n} C_i · moment_zero`, accumulated in log space.
    pub fn norm_squared(&self, n: usize) -> Result<NormValue> {
        if matches!(self, SubclassSpec::FiniteI { .. } | SubclassSpec::FiniteII { .. }) {
            let (ok, _) = self.integrability(n, n);
            if !ok {
                return Err(Error::OutOfFiniteRange {
                    n,
                    bound: self.max_degree().unwrap_or(f64::NAN),
                });
            }
        }
        let params = self.params();
        let mut ln = self.ln_moment_zero()?;
        let mut sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        for i in 1..=n {
            let c = recurrence_c(&params, i)?;
            if c == 0.0 {
                return Ok(NormValue { n, value: 0.0 });
            }
            ln += c.abs().ln();
            sign *= c.signum();
        }
        Ok(NormValue {
            n,
            value: sign * ln.exp(),
        })
    }

    /// Interval with singularity hints for `W(x) S̄_n(x) S̄_m(x)`.
    pub fn pair_interval(&self, n: usize, m: usize) -> IntervalSpec {
        let bits = (n % 2 + m % 2) as f64;
        let theta = self.support().theta;
        let sym = if (n + m).is_multiple_of(2) { Symmetry::Even } else { Symmetry::Odd };
        let iv = IntervalSpec::symmetric(theta)
            .expect("support is non-empty")
            .with_symmetry(sym);
        match *self {
            SubclassSpec::Gup { u, v } => iv
                .with_singularity(-1.0, v)
                .with_singularity(1.0, v)
                .with_singularity(0.0, 2.0 * u + bits),
            SubclassSpec::Ghp { u } => iv.with_singularity(0.0, 2.0 * u + bits),
            SubclassSpec::FiniteI { u, .. } => iv.with_singularity(0.0, -2.0 * u + bits),
            SubclassSpec::FiniteII { .. } => iv.with_flat_point(0.0),
        }
    }
}

/// Parameter vector and support of a subclass.
pub fn make_subclass(spec: &SubclassSpec) -> Result<(ClassParams<f64>, Support)> {
    spec.validate()?;
    Ok((spec.class_params()?, spec.support()))
}

/// `√π n! / 2ⁿ`, the monic Hermite norms.
pub fn hermite_norm(n: usize) -> f64 {
    let mut v = PI.sqrt();
    for i in 1..=n {
        v *= i as f64 / 2.0;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_class::monic_coeffs;
    use crate::numerics::{integrate_with, QuadConfig};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn parameter_vectors() {
        let (p, _) = make_subclass(&SubclassSpec::gup(0.0, 0.0).unwrap()).unwrap();
        assert_eq!(p.as_tuple(), (-1.0, 1.0, -2.0, 0.0));
        let (p, s) = make_subclass(&SubclassSpec::ghp(0.0).unwrap()).unwrap();
        assert_eq!(p.as_tuple(), (0.0, 1.0, -2.0, 0.0));
        assert!(!s.is_finite());
        let f2 = SubclassSpec::finite_two(4.5).unwrap();
        assert_eq!(f2.params().as_tuple(), (1.0, 0.0, -7.0, 2.0));
        assert_eq!(f2.max_degree(), Some(4.0));
    }

    #[test]
    fn constraint_violations() {
        assert!(matches!(
            SubclassSpec::gup(-0.5, 0.0),
            Err(Error::ConstraintViolation(_))
        ));
        assert!(SubclassSpec::gup(0.0, -1.0).is_err());
        assert!(SubclassSpec::ghp(-0.7).is_err());
        assert!(SubclassSpec::finite_two(0.5).is_err());
        assert!(SubclassSpec::gup(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn weights() {
        let g = SubclassSpec::gup(1.0, 1.0).unwrap();
        assert!((g.weight_at(0.5).unwrap() - 3.0 / 16.0).abs() < 1e-16);
        assert_eq!(SubclassSpec::ghp(0.0).unwrap().weight_at(0.0).unwrap(), 1.0);
        let f2 = SubclassSpec::finite_two(2.0).unwrap();
        assert_eq!(f2.weight_at(0.0).unwrap(), 0.0);
        let near = f2.weight_at(1e-3).unwrap();
        assert!((0.0..1e-300).contains(&near));
        let f1 = SubclassSpec::finite_one(0.3, 2.0).unwrap();
        assert!(matches!(f1.weight_at(0.0), Err(Error::SingularPoint { .. })));
        assert!(g.weight_at(1.0).is_err());
    }

    #[test]
    fn reductions_are_exact() {
        for &x in &[-0.9, -0.31, 0.0, 0.5, 0.77] {
            let v = 1.5;
            let w = SubclassSpec::gup(0.0, v).unwrap().weight_at(x).unwrap();
            assert_eq!(w, ((1.0 - x) * (1.0 + x)).powf(v));
            let h = SubclassSpec::ghp(0.0).unwrap().weight_at(x * 3.0).unwrap();
            assert_eq!(h, (-(x * 3.0) * (x * 3.0)).exp());
        }
    }

    #[test]
    fn moments() {
        assert!(rel(SubclassSpec::gup(1.0, 1.0).unwrap().moment_zero().unwrap(), 4.0 / 15.0) < 1e-14);
        assert!(rel(SubclassSpec::ghp(0.0).unwrap().moment_zero().unwrap(), PI.sqrt()) < 1e-14);
        assert!(rel(SubclassSpec::finite_two(1.5).unwrap().moment_zero().unwrap(), 1.0) < 1e-14);
        assert!(matches!(
            SubclassSpec::finite_one(0.7, 2.0).unwrap().moment_zero(),
            Err(Error::DivergentMoment(_))
        ));
        assert!(SubclassSpec::finite_one(-1.0, 1.0).unwrap().moment_zero().is_err());
    }

    #[test]
    fn hermite_norms_from_recurrence() {
        let h = SubclassSpec::ghp(0.0).unwrap();
        for n in 0..=10 {
            let v = h.norm_squared(n).unwrap().value;
            assert!(rel(v, hermite_norm(n)) < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn finite_two_norms() {
        let f2 = SubclassSpec::finite_two(4.5).unwrap();
        // C_1 = −1/3, C_2 = −1/6, C_3 = −3/2 and Γ(4) = 6
        let expected = [6.0, 2.0, 1.0 / 3.0, 0.5];
        for (n, e) in expected.iter().enumerate() {
            assert!(rel(f2.norm_squared(n).unwrap().value, *e) < 1e-13, "n = {n}");
        }
        assert!(matches!(
            f2.norm_squared(4),
            Err(Error::OutOfFiniteRange { n: 4, .. })
        ));
    }

    #[test]
    fn finite_two_norm_matches_quadrature() {
        let f2 = SubclassSpec::finite_two(4.5).unwrap();
        let s3 = monic_coeffs(&f2.params(), 3).unwrap();
        let cfg = QuadConfig::with_tolerances(1e-13, 1e-12);
        let r = integrate_with(
            |x| f2.weight_at(x).unwrap() * s3.eval(&x).powi(2),
            &f2.pair_interval(3, 3),
            &cfg,
        )
        .unwrap();
        assert!(r.converged);
        assert!(rel(r.value, 0.5) < 1e-9, "{}", r.value);
    }

    #[test]
    fn pair_validity() {
        let f2 = SubclassSpec::finite_two(4.5).unwrap();
        let v44 = f2.valid_pair(4, 4);
        assert!(v44.stated);
        // x^{-9} x^{8}: logarithmic divergence at infinity
        assert!(!v44.integrable);
        assert!(!f2.valid_pair(5, 5).stated);
        assert!(f2.valid_pair(3, 3).stated && f2.valid_pair(3, 3).integrable);
        let h = SubclassSpec::ghp(1.0).unwrap();
        assert!(h.valid_pair(7, 3).stated && h.valid_pair(7, 3).integrable);
        let f1 = SubclassSpec::finite_one(0.3, 2.0).unwrap();
        let v00 = f1.valid_pair(0, 0);
        assert!(v00.stated && v00.integrable && v00.agree());
        assert!(!f1.valid_pair(1, 1).stated);
        assert!(f1.valid_pair(1, 1).integrable);
    }

    #[test]
    fn gup_moment_quadrature() {
        let g = SubclassSpec::gup(1.0, 1.0).unwrap();
        let r = integrate_with(
            |x| g.weight_at(x).unwrap(),
            &g.pair_interval(0, 0),
            &QuadConfig::default(),
        )
        .unwrap();
        assert!((r.value - 4.0 / 15.0).abs() < 1e-12);
    }
}
