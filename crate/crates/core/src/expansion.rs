//! Weighted eigenfunction expansions `f ≈ Σ q_n Φ_n` with
//! `q_n = ∫ W f Φ_n / ∫ W Φ_n²`.

use num_rational::Rational64;
use rayon::prelude::*;

use crate::basis::{weight_interval, Basis, GenericBasis, SubclassBasis};
use crate::core_class::ClassParams;
use crate::error::{Error, Result};
use crate::lambda_map::LambdaBasis;
use crate::legendre::{LegendreBasis, LegendreKind};
use crate::numerics::{integrate_with, QuadConfig, QuadError};
use crate::subclasses::SubclassSpec;
use crate::verify::gram_matrix;

/// Which orthogonal family an expansion is taken in.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisDescriptor {
    Subclass(SubclassSpec),
    Legendre(LegendreKind),
    Lambda { class: SubclassSpec, lambda: Rational64 },
    Generic { params: ClassParams<f64>, theta: f64 },
}

impl BasisDescriptor {
    pub fn build(&self) -> Result<Box<dyn Basis>> {
        Ok(match self {
            BasisDescriptor::Subclass(spec) => Box::new(SubclassBasis::new(*spec)?),
            BasisDescriptor::Legendre(kind) => Box::new(LegendreBasis::new(*kind)?),
            BasisDescriptor::Lambda { class, lambda } => Box::new(LambdaBasis::new(*class, *lambda)?),
            BasisDescriptor::Generic { params, theta } => {
                Box::new(GenericBasis::new(params.clone(), *theta)?)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionSeries {
    pub basis: BasisDescriptor,
    /// `q_0 ..= q_N`.
    pub coefficients: Vec<f64>,
    /// `∫ W Φ_n²` used as denominators.
    pub norms: Vec<f64>,
    /// `∫ W f²`.
    pub target_norm_sq: f64,
    /// `(∫ W (f − f_N)²)^{1/2}`.
    pub residual_abs: f64,
    /// `residual_abs / ‖f‖`.
    pub residual_rel: f64,
}

impl ExpansionSeries {
    pub fn truncation(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `Σ q_n² ∫ W Φ_n²`, never above `∫ W f²` up to quadrature error.
    pub fn parseval_sum(&self) -> f64 {
        self.coefficients
            .iter()
            .zip(&self.norms)
            .map(|(q, n)| q * q * n)
            .sum()
    }
}

/// Partial sum `Σ q_n Φ_n(x)`.
pub fn reconstruct(series: &ExpansionSeries, x: f64) -> f64 {
    let basis = series
        .basis
        .build()
        .expect("descriptor was validated by expand");
    (0..series.coefficients.len())
        .map(|n| {
            let phi = basis.function(n).expect("members were built by expand");
            series.coefficients[n] * phi(x)
        })
        .sum()
}

/// Partial sums at many points, building the members once.
pub fn reconstruct_many(series: &ExpansionSeries, xs: &[f64]) -> Result<Vec<f64>> {
    let basis = series.basis.build()?;
    let members = (0..series.coefficients.len())
        .map(|n| basis.function(n))
        .collect::<Result<Vec<_>>>()?;
    Ok(xs
        .iter()
        .map(|&x| {
            members
                .iter()
                .zip(&series.coefficients)
                .map(|(phi, q)| q * phi(x))
                .sum()
        })
        .collect())
}

/// Expands `f` over `Φ_0 ..= Φ_N` after checking the family's Gram matrix
/// at tolerance `tol`.
pub fn expand(
    f: &(dyn Fn(f64) -> f64 + Sync),
    descriptor: &BasisDescriptor,
    n_max: usize,
    tol: f64,
) -> Result<ExpansionSeries> {
    let basis = descriptor.build()?;
    let basis = basis.as_ref();
    let report = gram_matrix(basis, n_max, tol);
    if !report.pass {
        return Err(Error::BasisInvalid(report.failures.join("; ")));
    }
    let members = (0..=n_max)
        .map(|n| basis.function(n))
        .collect::<Result<Vec<_>>>()?;
    let norms: Vec<f64> = (0..=n_max)
        .map(|n| basis.closed_norm(n).unwrap_or_else(|_| report.value(n, n)))
        .collect();

    let interval = weight_interval(basis);
    let ff = integrate_with(
        |x| {
            let v = f(x);
            basis.weight(x) * v * v
        },
        &interval,
        &QuadConfig::with_tolerances(1e-300, 1e-12),
    )
    .map_err(|e| match e {
        QuadError::NonFinite { .. } => Error::NonSquareIntegrable,
        other => other.into(),
    })?;
    if ff.diverged || !ff.value.is_finite() {
        return Err(Error::NonSquareIntegrable);
    }
    if !ff.converged {
        return Err(Error::DivergentIntegral(format!(
            "weighted square of the target did not converge (estimate {:e})",
            ff.value
        )));
    }
    let target_norm_sq = ff.value;

    let coefficients = members
        .par_iter()
        .zip(norms.par_iter())
        .map(|(phi, norm)| {
            let scale = (target_norm_sq * norm).abs().sqrt();
            let cfg = QuadConfig::with_tolerances((1e-13 * scale).max(1e-300), 0.0);
            let r = integrate_with(|x| basis.weight(x) * f(x) * phi(x), &interval, &cfg)?;
            if r.diverged {
                return Err(Error::DivergentIntegral("expansion coefficient".into()));
            }
            Ok(r.value / norm)
        })
        .collect::<Result<Vec<f64>>>()?;

    let partial = |x: f64| -> f64 {
        members
            .iter()
            .zip(&coefficients)
            .map(|(phi, q)| q * phi(x))
            .sum()
    };
    let res = integrate_with(
        |x| {
            let d = f(x) - partial(x);
            basis.weight(x) * d * d
        },
        &interval,
        &QuadConfig::with_tolerances((1e-24 * target_norm_sq).max(1e-300), 1e-8),
    )?;
    let residual_sq = res.value.max(0.0);
    let residual_abs = residual_sq.sqrt();
    let residual_rel = if target_norm_sq > 0.0 {
        residual_abs / target_norm_sq.sqrt()
    } else {
        0.0
    };

    Ok(ExpansionSeries {
        basis: descriptor.clone(),
        coefficients,
        norms,
        target_norm_sq,
        residual_abs,
        residual_rel,
    })
}

/// Barycentric interpolant through `(x_j, f_j)`.
///
/// Accuracy of the interpolant between and beyond the nodes is the caller's
/// concern; on an infinite support the polynomial grows without bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Barycentric {
    nodes: Vec<f64>,
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl Barycentric {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != values.len() {
            return Err(Error::Domain(format!(
                "need matching non-empty nodes and values, got {} and {}",
                nodes.len(),
                values.len()
            )));
        }
        if nodes.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::Domain("sampled input contains non-finite values".into()));
        }
        let mut weights = Vec::with_capacity(nodes.len());
        for (j, xj) in nodes.iter().enumerate() {
            let mut w = 1.0;
            for (k, xk) in nodes.iter().enumerate() {
                if k != j {
                    let d = xj - xk;
                    if d == 0.0 {
                        return Err(Error::Domain(format!("repeated node {xj}")));
                    }
                    w /= d;
                }
            }
            weights.push(w);
        }
        Ok(Barycentric {
            nodes,
            values,
            weights,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((xj, fj), wj) in self.nodes.iter().zip(&self.values).zip(&self.weights) {
            let d = x - xj;
            if d == 0.0 {
                return *fj;
            }
            let t = wj / d;
            num += t * fj;
            den += t;
        }
        num / den
    }
}

/// [`expand`] for sampled input, interpolated barycentrically.
pub fn expand_sampled(
    nodes: Vec<f64>,
    values: Vec<f64>,
    descriptor: &BasisDescriptor,
    n_max: usize,
    tol: f64,
) -> Result<ExpansionSeries> {
    let interp = Barycentric::new(nodes, values)?;
    expand(&|x| interp.eval(x), descriptor, n_max, tol)
}
