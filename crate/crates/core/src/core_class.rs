//! The generic symmetric class `S_n(p, q, r, s; x)`.
//!
//! `S_n` solves
//!
//! ```text
//! x²(px² + q) Φ'' + x(rx² + s) Φ' − (n(r + (n−1)p) x² + (1 − (−1)ⁿ) s/2) Φ = 0
//! ```
//!
//! and contains only powers `x^(n−2k)`. Coefficients come from a product of
//! ratios `num_i / den_i`; the monic polynomials also satisfy the three-term
//! recurrence `S̄_{n+1} = x S̄_n + C_n S̄_{n−1}`.
//!
//! Everything here is generic over [`Scalar`], so the same code runs in
//! floating point and in exact rational arithmetic.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The four reals `(p, q, r, s)` selecting a class member.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassParams<T> {
    p: T,
    q: T,
    r: T,
    s: T,
}

impl<T: Scalar> ClassParams<T> {
    pub fn new(p: T, q: T, r: T, s: T) -> Result<Self> {
        if q.is_zero() && s.is_zero() {
            return Err(Error::InvalidParams("q and s vanish together".into()));
        }
        if p.is_zero() && r.is_zero() {
            return Err(Error::InvalidParams("p and r vanish together".into()));
        }
        if [&p, &q, &r, &s].iter().any(|v| v.is_non_finite()) {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        Ok(ClassParams { p, q, r, s })
    }

    pub fn from_f64(p: f64, q: f64, r: f64, s: f64) -> Result<Self> {
        let conv = |v: f64| {
            T::from_f64(v).ok_or_else(|| Error::InvalidParams(format!("{v} is not representable")))
        };
        Self::new(conv(p)?, conv(q)?, conv(r)?, conv(s)?)
    }

    pub fn p(&self) -> &T {
        &self.p
    }

    pub fn q(&self) -> &T {
        &self.q
    }

    pub fn r(&self) -> &T {
        &self.r
    }

    pub fn s(&self) -> &T {
        &self.s
    }

    pub fn to_f64(&self) -> ClassParams<f64> {
        ClassParams {
            p: self.p.to_f64(),
            q: self.q.to_f64(),
            r: self.r.to_f64(),
            s: self.s.to_f64(),
        }
    }

    /// `(p, q, r, s)` as floats.
    pub fn as_tuple(&self) -> (f64, f64, f64, f64) {
        (self.p.to_f64(), self.q.to_f64(), self.r.to_f64(), self.s.to_f64())
    }
}

/// Polynomial with a single parity: `Σ_k coeffs[k] x^(degree − 2k)`.
///
/// Evaluation is exactly symmetric, `P(−x) = (−1)^degree P(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricPoly<T> {
    degree: usize,
    coeffs: Vec<T>,
}

impl<T: Scalar> SymmetricPoly<T> {
    /// `coeffs[k]` multiplies `x^(degree − 2k)`; exactly `degree/2 + 1` entries.
    pub fn new(degree: usize, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != degree / 2 + 1 {
            return Err(Error::Domain(format!(
                "degree {degree} needs {} coefficients, got {}",
                degree / 2 + 1,
                coeffs.len()
            )));
        }
        Ok(SymmetricPoly { degree, coeffs })
    }

    pub fn one() -> Self {
        SymmetricPoly {
            degree: 0,
            coeffs: vec![T::one()],
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficients in decreasing power.
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn parity(&self) -> usize {
        self.degree % 2
    }

    /// Coefficient of `x^degree`.
    pub fn leading(&self) -> &T {
        &self.coeffs[0]
    }

    /// `(power, coefficient)` pairs in decreasing power.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &T)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(k, c)| (self.degree - 2 * k, c))
    }

    pub fn eval(&self, x: &T) -> T {
        eval_poly(self, x)
    }

    pub fn scaled(&self, factor: &T) -> Self {
        SymmetricPoly {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.clone() * factor.clone()).collect(),
        }
    }

    /// The derivative, again of a single parity. The derivative of a constant
    /// is the zero constant.
    pub fn derivative(&self) -> Self {
        if self.degree == 0 {
            return SymmetricPoly {
                degree: 0,
                coeffs: vec![T::zero()],
            };
        }
        let coeffs = self
            .terms()
            .filter(|(power, _)| *power > 0)
            .map(|(power, c)| c.clone() * T::from_i64(power as i64))
            .collect();
        SymmetricPoly {
            degree: self.degree - 1,
            coeffs,
        }
    }

    pub fn to_f64(&self) -> SymmetricPoly<f64> {
        SymmetricPoly {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(Scalar::to_f64).collect(),
        }
    }
}

/// `λ_n = −n(r + (n−1)p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenvalue<T> {
    pub n: usize,
    pub value: T,
}

pub fn eigenvalue<T: Scalar>(params: &ClassParams<T>, n: usize) -> Eigenvalue<T> {
    let nn = T::from_i64(n as i64);
    let value = -(nn.clone() * (params.r.clone() + (nn - T::one()) * params.p.clone()));
    Eigenvalue { n, value }
}

/// `(num_i, den_i)` for `i = 0 .. ⌊n/2⌋`, with every denominator checked.
fn ratio_factors<T: Scalar>(params: &ClassParams<T>, n: usize) -> Result<Vec<(T, T)>> {
    let m = (n / 2) as i64;
    let sign: i64 = if n.is_multiple_of(2) { -1 } else { 1 };
    (0..m)
        .map(|i| {
            let num = T::from_i64(2 * i + sign + 2 * m) * params.p.clone() + params.r.clone();
            let den = T::from_i64(2 * i + sign + 2) * params.q.clone() + params.s.clone();
            if den.is_zero() {
                Err(Error::DegenerateDenominator { index: i as usize })
            } else {
                Ok((num, den))
            }
        })
        .collect()
}

/// `C(m, k)` for `k = 0..=m`, built incrementally in the scalar type.
fn binomial_row<T: Scalar>(m: usize) -> Vec<T> {
    let mut row = Vec::with_capacity(m + 1);
    let mut b = T::one();
    row.push(b.clone());
    for k in 0..m {
        b = b * T::from_i64((m - k) as i64) / T::from_i64(k as i64 + 1);
        row.push(b.clone());
    }
    row
}

fn check_finite<T: Scalar>(poly: &SymmetricPoly<T>, n: usize) -> Result<()> {
    if poly.coeffs.iter().any(Scalar::is_non_finite) {
        return Err(Error::Overflow { n });
    }
    Ok(())
}

/// The (generally non-monic) `S_n`.
pub fn explicit_coeffs<T: Scalar>(params: &ClassParams<T>, n: usize) -> Result<SymmetricPoly<T>> {
    let factors = ratio_factors(params, n)?;
    let m = n / 2;
    // prefix[j] = Π_{i<j} num_i / den_i
    let mut prefix = Vec::with_capacity(m + 1);
    let mut acc = T::one();
    prefix.push(acc.clone());
    for (num, den) in &factors {
        acc = acc * num.clone() / den.clone();
        prefix.push(acc.clone());
    }
    let binom = binomial_row::<T>(m);
    let coeffs = (0..=m)
        .map(|k| binom[k].clone() * prefix[m - k].clone())
        .collect();
    let poly = SymmetricPoly { degree: n, coeffs };
    check_finite(&poly, n)?;
    Ok(poly)
}

/// `K_n`, the leading coefficient of `S_n`.
pub fn leading_coefficient<T: Scalar>(params: &ClassParams<T>, n: usize) -> Result<T> {
    let k = ratio_factors(params, n)?
        .into_iter()
        .fold(T::one(), |acc, (num, den)| acc * num / den);
    if k.is_non_finite() {
        return Err(Error::Overflow { n });
    }
    Ok(k)
}

/// `S̄_n = S_n / K_n`.
pub fn monic_coeffs<T: Scalar>(params: &ClassParams<T>, n: usize) -> Result<SymmetricPoly<T>> {
    let factors = ratio_factors(params, n)?;
    let m = n / 2;
    if factors.iter().any(|(num, _)| num.is_zero()) {
        return Err(Error::ZeroLeadingCoefficient { n });
    }
    // tail[j] = Π_{i=j}^{m−1} den_i / num_i, so that prefix[j] / K_n = tail[j].
    let mut tail = vec![T::one(); m + 1];
    for j in (0..m).rev() {
        let (num, den) = &factors[j];
        tail[j] = tail[j + 1].clone() * den.clone() / num.clone();
    }
    let binom = binomial_row::<T>(m);
    let coeffs = (0..=m)
        .map(|k| binom[k].clone() * tail[m - k].clone())
        .collect();
    let poly = SymmetricPoly { degree: n, coeffs };
    check_finite(&poly, n)?;
    Ok(poly)
}

/// Recurrence coefficient `C_n` of the monic polynomials, `n >= 1`.
///
/// At `n = 1` the common factor `r − p` is cancelled, giving `(q+s)/(p+r)`.
pub fn recurrence_c<T: Scalar>(params: &ClassParams<T>, n: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::Domain("C_n is defined for n >= 1".into()));
    }
    let ClassParams { p, q, r, s } = params.clone();
    let two = T::from_i64(2);
    if n == 1 {
        let den = p + r;
        if den.is_zero() {
            return Err(Error::DegenerateDenominator { index: 1 });
        }
        return Ok((q + s) / den);
    }
    let nn = T::from_i64(n as i64);
    let sign = if n.is_multiple_of(2) { T::one() } else { -T::one() };
    let odd = if n.is_multiple_of(2) { T::zero() } else { T::one() };
    let r2p = r.clone() - two.clone() * p.clone();
    let numer = p.clone() * q.clone() * nn.clone() * nn.clone()
        + (r2p.clone() * q - sign * p.clone() * s.clone()) * nn.clone()
        + r2p * s * odd;
    let d1 = two * p.clone() * nn + r - p.clone();
    let d2 = d1.clone() - T::from_i64(2) * p;
    let den = d1 * d2;
    if den.is_zero() {
        return Err(Error::DegenerateDenominator { index: n });
    }
    Ok(numer / den)
}

/// `S̄_n` from `S̄_0 = 1`, `S̄_1 = x` and the three-term recurrence.
pub fn monic_by_recurrence<T: Scalar>(
    params: &ClassParams<T>,
    n: usize,
) -> Result<SymmetricPoly<T>> {
    let mut prev = SymmetricPoly::<T>::one();
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = SymmetricPoly {
        degree: 1,
        coeffs: vec![T::one()],
    };
    for i in 1..n {
        let c = recurrence_c(params, i)?;
        // x · S̄_i keeps the coefficient list; one slot is added when the
        // degree becomes even.
        let mut coeffs = cur.coeffs.clone();
        if i.div_ceil(2) + 1 > coeffs.len() {
            coeffs.push(T::zero());
        }
        for (k, pc) in prev.coeffs.iter().enumerate() {
            coeffs[k + 1] = coeffs[k + 1].clone() + c.clone() * pc.clone();
        }
        let next = SymmetricPoly {
            degree: i + 1,
            coeffs,
        };
        prev = std::mem::replace(&mut cur, next);
    }
    check_finite(&cur, n)?;
    Ok(cur)
}

/// Horner evaluation in `x²`, times `x` for odd degree.
pub fn eval_poly<T: Scalar>(poly: &SymmetricPoly<T>, x: &T) -> T {
    let x2 = x.clone() * x.clone();
    let mut acc = T::zero();
    for c in &poly.coeffs {
        acc = acc * x2.clone() + c.clone();
    }
    if poly.degree % 2 == 1 {
        acc * x.clone()
    } else {
        acc
    }
}

/// The three terms of the class differential equation at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeTerms<T> {
    /// `x²(px² + q) Φ''`
    pub second: T,
    /// `x(rx² + s) Φ'`
    pub first: T,
    /// `−(n(r + (n−1)p) x² + (1 − (−1)ⁿ) s/2) Φ`
    pub zeroth: T,
}

impl<T: Scalar> OdeTerms<T> {
    pub fn residual(&self) -> T {
        self.second.clone() + self.first.clone() + self.zeroth.clone()
    }

    /// Magnitude of the largest term, the natural scale for the residual.
    pub fn scale(&self) -> f64 {
        self.second
            .to_f64()
            .abs()
            .max(self.first.to_f64().abs())
            .max(self.zeroth.to_f64().abs())
    }
}

pub fn ode_terms<T: Scalar>(params: &ClassParams<T>, n: usize, x: &T) -> Result<OdeTerms<T>> {
    let phi = explicit_coeffs(params, n)?;
    let d1 = phi.derivative();
    let d2 = d1.derivative();
    let ClassParams { p, q, r, s } = params.clone();
    let x2 = x.clone() * x.clone();
    let second = x2.clone() * (p.clone() * x2.clone() + q) * eval_poly(&d2, x);
    let first = x.clone() * (r * x2.clone() + s.clone()) * eval_poly(&d1, x);
    let lambda = eigenvalue(params, n).value;
    let odd_part = if n % 2 == 1 { s } else { T::zero() };
    let zeroth = (lambda * x2 - odd_part) * eval_poly(&phi, x);
    Ok(OdeTerms {
        second,
        first,
        zeroth,
    })
}

/// Left side of the class differential equation with `Φ = S_n`.
pub fn ode_residual<T: Scalar>(params: &ClassParams<T>, n: usize, x: &T) -> Result<T> {
    Ok(ode_terms(params, n, x)?.residual())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    type Q = BigRational;

    fn qparams(p: (i64, i64), q: (i64, i64), r: (i64, i64), s: (i64, i64)) -> ClassParams<Q> {
        ClassParams::new(ratio(p.0, p.1), ratio(q.0, q.1), ratio(r.0, r.1), ratio(s.0, s.1))
            .unwrap()
    }

    fn hermite() -> ClassParams<Q> {
        qparams((0, 1), (1, 1), (-2, 1), (0, 1))
    }

    /// The explicit sum term by term: every coefficient recomputes its own product
    /// and binomial from scratch.
    fn naive_explicit(params: &ClassParams<Q>, n: usize) -> Vec<Q> {
        let m = (n / 2) as i64;
        let e: i64 = if n.is_multiple_of(2) { -1 } else { 1 };
        let mut out = Vec::new();
        for k in 0..=m {
            let mut binom = Q::one();
            for j in 0..k {
                binom *= ratio(m - j, j + 1);
            }
            let mut prod = Q::one();
            for i in 0..(m - k) {
                let num = ratio(2 * i + e + 2 * m, 1) * params.p().clone() + params.r().clone();
                let den = ratio(2 * i + e + 2, 1) * params.q().clone() + params.s().clone();
                prod = prod * num / den;
            }
            out.push(binom * prod);
        }
        out
    }

    #[test]
    fn degree_zero_is_constant_one() {
        let p = qparams((-1, 1), (1, 1), (-5, 1), (1, 1));
        let s0 = explicit_coeffs(&p, 0).unwrap();
        assert_eq!(s0.coeffs(), &[Q::one()]);
        assert_eq!(leading_coefficient(&p, 0).unwrap(), Q::one());
        assert_eq!(leading_coefficient(&p, 1).unwrap(), Q::one());
    }

    #[test]
    fn hermite_degree_four() {
        let h = hermite();
        assert_eq!(leading_coefficient(&h, 4).unwrap(), ratio(4, 3));
        let monic = monic_coeffs(&h, 4).unwrap();
        assert_eq!(monic.coeffs(), &[ratio(1, 1), ratio(-3, 1), ratio(3, 4)]);
        let scaled = explicit_coeffs(&h, 4)
            .unwrap()
            .scaled(&(Q::one() / leading_coefficient(&h, 4).unwrap()));
        assert_eq!(scaled, monic);
    }

    #[test]
    fn explicit_matches_naive_product() {
        let p = qparams((-1, 1), (1, 1), (-5, 1), (1, 1));
        for n in 0..=12 {
            let got = explicit_coeffs(&p, n).unwrap();
            assert_eq!(got.coeffs(), naive_explicit(&p, n).as_slice(), "n = {n}");
        }
        // n = 3: num_0 = 3p + r = −8, den_0 = 3q + s = 4
        let s3 = explicit_coeffs(&p, 3).unwrap();
        assert_eq!(s3.coeffs(), &[ratio(-2, 1), ratio(1, 1)]);
    }

    #[test]
    fn monic_small_degrees() {
        let p = qparams((2, 3), (5, 7), (-3, 2), (1, 5));
        let (pp, qq, rr, ss) = (p.p().clone(), p.q().clone(), p.r().clone(), p.s().clone());
        assert_eq!(monic_coeffs(&p, 1).unwrap().coeffs(), &[Q::one()]);
        let c2 = (qq.clone() + ss.clone()) / (pp.clone() + rr.clone());
        assert_eq!(monic_coeffs(&p, 2).unwrap().coeffs(), &[Q::one(), c2]);
        let three = ratio(3, 1);
        let five = ratio(5, 1);
        let seven = ratio(7, 1);
        let a = (five.clone() * qq.clone() + ss.clone()) / (seven * pp.clone() + rr.clone());
        let b = (three.clone() * qq + ss) / (five * pp + rr);
        let s5 = monic_coeffs(&p, 5).unwrap();
        assert_eq!(s5.coeffs(), &[Q::one(), ratio(2, 1) * a.clone(), a * b]);
    }

    #[test]
    fn zero_leading_coefficient() {
        // n = 3: num_0 = 3p + r = 0
        let p = ClassParams::<f64>::new(1.0, 1.0, -3.0, 1.0).unwrap();
        assert!(matches!(
            monic_coeffs(&p, 3),
            Err(Error::ZeroLeadingCoefficient { n: 3 })
        ));
        assert_eq!(leading_coefficient(&p, 3).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_denominator_is_eager() {
        // den_0 at even n: (0 − 1 + 2) q + s = q + s
        let p = ClassParams::<f64>::new(1.0, 1.0, 2.0, -1.0).unwrap();
        assert!(matches!(
            explicit_coeffs(&p, 2),
            Err(Error::DegenerateDenominator { index: 0 })
        ));
        assert!(matches!(
            monic_coeffs(&p, 2),
            Err(Error::DegenerateDenominator { index: 0 })
        ));
    }

    #[test]
    fn invalid_params() {
        assert!(ClassParams::<f64>::new(1.0, 0.0, 1.0, 0.0).is_err());
        assert!(ClassParams::<f64>::new(0.0, 1.0, 0.0, 1.0).is_err());
        assert!(ClassParams::<f64>::new(f64::NAN, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn recurrence_coefficients() {
        let h = hermite();
        for n in 1..=12 {
            assert_eq!(recurrence_c(&h, n).unwrap(), ratio(-(n as i64), 2));
        }
        // (0, 1, −2, 2u): even n gives −n/2 for any u
        let g = qparams((0, 1), (1, 1), (-2, 1), (7, 3));
        for n in (2..=12).step_by(2) {
            assert_eq!(recurrence_c(&g, n).unwrap(), ratio(-(n as i64), 2));
        }
        let p = qparams((2, 3), (5, 7), (-3, 2), (1, 5));
        let expected = (p.q().clone() + p.s().clone()) / (p.p().clone() + p.r().clone());
        assert_eq!(recurrence_c(&p, 1).unwrap(), expected);
        assert!(recurrence_c(&p, 0).is_err());
    }

    #[test]
    fn recurrence_reproduces_hermite() {
        let h = hermite();
        let s3 = monic_by_recurrence(&h, 3).unwrap();
        assert_eq!(s3.coeffs(), &[Q::one(), ratio(-3, 2)]);
        for n in 0..=14 {
            assert_eq!(monic_by_recurrence(&h, n).unwrap(), monic_coeffs(&h, n).unwrap());
        }
    }

    #[test]
    fn horner_evaluation() {
        let p = SymmetricPoly::new(2, vec![1.0, -0.5]).unwrap();
        assert_eq!(eval_poly(&p, &1.0), 0.5);
        let x = SymmetricPoly::new(1, vec![1.0]).unwrap();
        assert_eq!(eval_poly(&x, &-3.0), -3.0);
        assert!(SymmetricPoly::new(3, vec![1.0]).is_err());
    }

    #[test]
    fn derivative_drops_constant() {
        let p = SymmetricPoly::new(4, vec![1.0, -3.0, 0.75]).unwrap();
        let d = p.derivative();
        assert_eq!(d.degree(), 3);
        assert_eq!(d.coeffs(), &[4.0, -6.0]);
        assert_eq!(d.derivative().coeffs(), &[12.0, -6.0]);
        let c = SymmetricPoly::<f64>::one().derivative();
        assert_eq!(c.coeffs(), &[0.0]);
    }

    #[test]
    fn exact_ode_residual_vanishes() {
        let p = qparams((-1, 1), (1, 1), (-5, 1), (1, 1));
        for n in 0..=9 {
            for x in [ratio(1, 3), ratio(-7, 5), ratio(11, 2)] {
                assert!(ode_residual(&p, n, &x).unwrap().is_zero(), "n = {n}");
            }
        }
    }

    #[test]
    fn ode_residual_float_examples() {
        let legendre_type = ClassParams::<f64>::new(-1.0, 1.0, -4.0, 0.0).unwrap();
        let t = ode_terms(&legendre_type, 2, &0.7).unwrap();
        assert!(t.residual().abs() <= 1e-12 * t.scale().max(1.0));
        for x in [0.3, -1.7, 2.5] {
            assert_eq!(ode_residual(&legendre_type, 0, &x).unwrap(), 0.0);
        }
        // Finite class II at u = 4: (1, 0, −2u + 2, 2)
        let f2 = ClassParams::<f64>::new(1.0, 0.0, -6.0, 2.0).unwrap();
        let t = ode_terms(&f2, 3, &1.3).unwrap();
        assert!(t.residual().abs() <= 1e-10 * t.scale());
    }

    #[test]
    fn eigenvalue_formula() {
        let p = ClassParams::<f64>::new(-1.0, 1.0, -4.0, 0.0).unwrap();
        assert_eq!(eigenvalue(&p, 0).value, 0.0);
        assert_eq!(eigenvalue(&p, 3).value, -3.0 * (-4.0 - 2.0));
    }

    #[test]
    fn f32_instantiation() {
        let h = ClassParams::<f32>::new(0.0, 1.0, -2.0, 0.0).unwrap();
        let m = monic_coeffs(&h, 4).unwrap();
        assert_eq!(m.coeffs(), &[1.0f32, -3.0, 0.75]);
        assert_eq!(m.eval(&1.0f32), -1.25);
    }
}
