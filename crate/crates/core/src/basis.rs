//! Orthogonal families seen uniformly: member functions, weight, support and
//! closed-form norms. Gram checks and expansions work against [`Basis`].

use crate::core_class::{monic_coeffs, recurrence_c, ClassParams, SymmetricPoly};
use crate::error::{Error, Result};
use crate::numerics::{integrate_with, IntervalSpec, QuadConfig, QuadError, Symmetry};
use crate::subclasses::{PairValidity, SubclassSpec, Support};

/// A member function `x ↦ Φ_n(x)`.
pub type BasisFn<'a> = Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>;

pub trait Basis: Sync {
    fn label(&self) -> String;

    fn support(&self) -> Support;

    /// Weight of the orthogonality relation. `NaN` where it is undefined.
    fn weight(&self, x: f64) -> f64;

    fn function(&self, n: usize) -> Result<BasisFn<'_>>;

    /// Closed-form `∫ W Φ_n²`.
    fn closed_norm(&self, n: usize) -> Result<f64>;

    /// Interval with singularity and parity hints for `W Φ_n Φ_m`.
    fn pair_interval(&self, n: usize, m: usize) -> IntervalSpec;

    /// Degree-range verdict for families that are only finitely orthogonal.
    fn pair_validity(&self, _n: usize, _m: usize) -> Option<PairValidity> {
        None
    }
}

/// The hints of `pair_interval(0, 0)` without a parity assumption, for
/// integrands `W f Φ_n` with an arbitrary `f`.
pub fn weight_interval(basis: &dyn Basis) -> IntervalSpec {
    basis.pair_interval(0, 0).with_symmetry(Symmetry::None)
}

/// Monic polynomials of one of the four subclasses.
#[derive(Debug, Clone)]
pub struct SubclassBasis {
    spec: SubclassSpec,
}

impl SubclassBasis {
    pub fn new(spec: SubclassSpec) -> Result<Self> {
        spec.validate()?;
        Ok(SubclassBasis { spec })
    }

    pub fn spec(&self) -> &SubclassSpec {
        &self.spec
    }

    pub fn poly(&self, n: usize) -> Result<SymmetricPoly<f64>> {
        monic_coeffs(&self.spec.params(), n)
    }
}

impl Basis for SubclassBasis {
    fn label(&self) -> String {
        self.spec.to_string()
    }

    fn support(&self) -> Support {
        self.spec.support()
    }

    fn weight(&self, x: f64) -> f64 {
        self.spec.weight_at(x).unwrap_or(f64::NAN)
    }

    fn function(&self, n: usize) -> Result<BasisFn<'_>> {
        let poly = self.poly(n)?;
        Ok(Box::new(move |x| poly.eval(&x)))
    }

    fn closed_norm(&self, n: usize) -> Result<f64> {
        Ok(self.spec.norm_squared(n)?.value)
    }

    fn pair_interval(&self, n: usize, m: usize) -> IntervalSpec {
        self.spec.pair_interval(n, m)
    }

    fn pair_validity(&self, n: usize, m: usize) -> Option<PairValidity> {
        match self.spec {
            SubclassSpec::FiniteI { .. } | SubclassSpec::FiniteII { .. } => {
                Some(self.spec.valid_pair(n, m))
            }
            _ => None,
        }
    }
}

/// A member of the generic class given directly by `(p, q, r, s)` and `θ`,
/// with the closed-form weight of [`crate::verify::generic_weight`] and the
/// zeroth moment computed by quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericBasis {
    params: ClassParams<f64>,
    theta: f64,
    moment: f64,
}

impl GenericBasis {
    pub fn new(params: ClassParams<f64>, theta: f64) -> Result<Self> {
        if !(theta > 0.0) {
            return Err(Error::Domain(format!("theta must be positive, got {theta}")));
        }
        let mut basis = GenericBasis {
            params,
            theta,
            moment: f64::NAN,
        };
        let r = integrate_with(|x| basis.weight(x), &basis.pair_interval(0, 0), &QuadConfig::default())
            .map_err(|e| match e {
                QuadError::NonFinite { x } => {
                    Error::DivergentMoment(format!("weight of {} overflows at x = {x}", basis.label()))
                }
                other => other.into(),
            })?;
        if r.diverged {
            return Err(Error::DivergentMoment(format!("weight of {} is not integrable", basis.label())));
        }
        if !r.converged {
            return Err(Error::Quadrature(QuadError::MaxDepthExceeded {
                at: f64::NAN,
                partial: r.value,
                abs_error_estimate: r.abs_error_estimate,
            }));
        }
        basis.moment = r.value;
        Ok(basis)
    }

    pub fn params(&self) -> &ClassParams<f64> {
        &self.params
    }

    pub fn moment(&self) -> f64 {
        self.moment
    }

    /// Exponent of `W` at the origin, `None` when `W` is flat there.
    fn origin_exponent(&self) -> Option<f64> {
        let (p, q, r, s) = self.params.as_tuple();
        if q != 0.0 {
            Some(s / q)
        } else if s / p > 0.0 {
            None
        } else {
            Some(r / p - 2.0)
        }
    }
}

impl Basis for GenericBasis {
    fn label(&self) -> String {
        let (p, q, r, s) = self.params.as_tuple();
        format!("S(p={p}, q={q}, r={r}, s={s}) on theta={}", self.theta)
    }

    fn support(&self) -> Support {
        Support { theta: self.theta }
    }

    fn weight(&self, x: f64) -> f64 {
        if !(x.abs() < self.theta) {
            return f64::NAN;
        }
        let w = crate::verify::generic_weight(&self.params, x);
        if w.is_infinite() {
            f64::NAN
        } else {
            w
        }
    }

    fn function(&self, n: usize) -> Result<BasisFn<'_>> {
        let poly = monic_coeffs(&self.params, n)?;
        Ok(Box::new(move |x| poly.eval(&x)))
    }

    fn closed_norm(&self, n: usize) -> Result<f64> {
        let mut v = self.moment;
        for i in 1..=n {
            v *= -recurrence_c(&self.params, i)?;
        }
        Ok(v)
    }

    fn pair_interval(&self, n: usize, m: usize) -> IntervalSpec {
        let bits = (n % 2 + m % 2) as f64;
        let parity = if (n + m).is_multiple_of(2) { Symmetry::Even } else { Symmetry::Odd };
        let mut iv = IntervalSpec::symmetric(self.theta)
            .expect("theta is positive")
            .with_symmetry(parity);
        iv = match self.origin_exponent() {
            Some(g) => iv.with_singularity(0.0, g + bits),
            None => iv.with_flat_point(0.0),
        };
        let (p, q, r, s) = self.params.as_tuple();
        if self.theta.is_finite() && p != 0.0 && q != 0.0 {
            let root = -q / p;
            if root > 0.0 && (root.sqrt() - self.theta).abs() <= 1e-12 * self.theta {
                let g = (r * q - p * s) / (2.0 * p * q) - 1.0;
                iv = iv.with_singularity(-self.theta, g).with_singularity(self.theta, g);
            }
        }
        iv
    }
}
