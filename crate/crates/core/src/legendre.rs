//! Associated Legendre functions of the three classical types, Jacobi
//! polynomials, and the sequences
//!
//! ```text
//! G_n(x; a, b) = x^a (1 − x²)^{b/2} S̄_n(GUP u = a, v = b; x),   Q_n = G_n(x; 1, b)
//! ```
//!
//! All families are orthogonal on `[−1, 1]` with weight 1.

use std::f64::consts::PI;

use crate::basis::{Basis, BasisFn};
use crate::core_class::{monic_coeffs, SymmetricPoly};
use crate::error::{Error, Result};
use crate::numerics::{ln_gamma_signed as ln_gamma, IntervalSpec, Symmetry};
use crate::subclasses::{SubclassSpec, Support};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LegendreKind {
    /// `(1 − x²)^{α/2} P_n^{(α,α)}`, `μ = (n+α)(n+α+1)`, `ν = α²`.
    U { alpha: f64 },
    /// `(1 − x²)^{m/2} dᵐP_n/dxᵐ`, `μ = n(n+1)`, `ν = m²`.
    Pm { m: usize },
    /// `((1 − x)/(1 + x))^{α/2} P_n^{(α,−α)}`, `μ = n(n+1)`, `ν = α²`.
    V { alpha: f64 },
    G { a: f64, b: f64 },
    /// `G_n(x; 1, b)`, `μ = (n+b+1)(n+b+2)`, `ν = b²`, `E = −2/x²`.
    Q { b: f64 },
}

/// The even function `E` in the parity-switched term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EChoice {
    Zero,
    NegTwoOverXSq,
}

impl EChoice {
    pub fn at(self, x: f64) -> f64 {
        match self {
            EChoice::Zero => 0.0,
            EChoice::NegTwoOverXSq => -2.0 / (x * x),
        }
    }
}

impl std::fmt::Display for LegendreKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LegendreKind::U { alpha } => write!(f, "U(alpha={alpha})"),
            LegendreKind::Pm { m } => write!(f, "P^m(m={m})"),
            LegendreKind::V { alpha } => write!(f, "V(alpha={alpha})"),
            LegendreKind::G { a, b } => write!(f, "G(a={a}, b={b})"),
            LegendreKind::Q { b } => write!(f, "Q(b={b})"),
        }
    }
}

fn violation(msg: &str) -> Error {
    Error::ConstraintViolation(msg.into())
}

impl LegendreKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LegendreKind::U { alpha } if !(alpha > -1.0) => Err(violation("U requires alpha > -1")),
            LegendreKind::V { alpha } if !(alpha > -1.0 && alpha < 1.0) => {
                Err(violation("V requires -1 < alpha < 1"))
            }
            LegendreKind::G { a, .. } if !(a > -0.5) => Err(violation("G requires a > -1/2")),
            LegendreKind::G { b, .. } | LegendreKind::Q { b } if !(b > -1.0) => {
                Err(violation("G and Q require b > -1"))
            }
            _ => Ok(()),
        }
    }

    /// `(a, b)` of the `G` form, for `G` and `Q`.
    fn g_params(&self) -> Option<(f64, f64)> {
        match *self {
            LegendreKind::G { a, b } => Some((a, b)),
            LegendreKind::Q { b } => Some((1.0, b)),
            _ => None,
        }
    }

    /// `μ_n`.
    pub fn mu(&self, n: usize) -> f64 {
        let n = n as f64;
        match *self {
            LegendreKind::U { alpha } => (n + alpha) * (n + alpha + 1.0),
            LegendreKind::Pm { .. } | LegendreKind::V { .. } => n * (n + 1.0),
            LegendreKind::G { a, b } => (n + a + b) * (n + a + b + 1.0),
            LegendreKind::Q { b } => (n + b + 1.0) * (n + b + 2.0),
        }
    }

    /// `ν`.
    pub fn nu(&self) -> f64 {
        match *self {
            LegendreKind::U { alpha } | LegendreKind::V { alpha } => alpha * alpha,
            LegendreKind::Pm { m } => (m * m) as f64,
            LegendreKind::G { b, .. } | LegendreKind::Q { b } => b * b,
        }
    }
}

/// `C(z, k)` for real `z` as the finite product `Π (z − j)/(j + 1)`.
fn binomial(z: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (z - j as f64) / (j + 1) as f64)
}

/// Ascending coefficients of `P_n^{(α,β)}` in the variable `y = (x − 1)/2`.
fn jacobi_coeffs(n: usize, jp: JacobiParams) -> Vec<f64> {
    let nf = n as f64;
    (0..=n)
        .map(|k| {
            binomial(nf + jp.alpha + jp.beta + k as f64, k) * binomial(nf + jp.alpha, n - k)
        })
        .collect()
}

fn horner(coeffs: &[f64], y: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c)
}

fn differentiate(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

/// `P_n^{(α,β)}(x) = Σ_k C(n+α+β+k, k) C(n+α, n−k) ((x − 1)/2)^k`.
pub fn eval_jacobi(n: usize, jp: JacobiParams, x: f64) -> f64 {
    horner(&jacobi_coeffs(n, jp), 0.5 * (x - 1.0))
}

/// Ascending power coefficients of the Legendre polynomial `P_n`:
/// `2⁻ⁿ Σ (−1)^k C(n,k) C(2n−2k, n) x^{n−2k}`.
fn legendre_power_coeffs(n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n + 1];
    let scale = 0.5f64.powi(n as i32);
    for k in 0..=n / 2 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        c[n - 2 * k] = sign * scale * binomial(n as f64, k) * binomial((2 * n - 2 * k) as f64, n);
    }
    c
}

/// Polynomial factor with its first two derivatives in `x`.
enum PolyPart {
    /// Ascending coefficients in `(x − 1)/2`.
    Shifted(Vec<f64>),
    Power(Vec<f64>),
    Symmetric(SymmetricPoly<f64>),
}

impl PolyPart {
    fn jets(&self, x: f64) -> (f64, f64, f64) {
        match self {
            PolyPart::Shifted(c) => {
                let y = 0.5 * (x - 1.0);
                let d1 = differentiate(c);
                let d2 = differentiate(&d1);
                (horner(c, y), 0.5 * horner(&d1, y), 0.25 * horner(&d2, y))
            }
            PolyPart::Power(c) => {
                let d1 = differentiate(c);
                let d2 = differentiate(&d1);
                (horner(c, x), horner(&d1, x), horner(&d2, x))
            }
            PolyPart::Symmetric(p) => {
                let d1 = p.derivative();
                let d2 = d1.derivative();
                (p.eval(&x), d1.eval(&x), d2.eval(&x))
            }
        }
    }
}

fn poly_part(kind: &LegendreKind, n: usize) -> Result<PolyPart> {
    Ok(match *kind {
        LegendreKind::U { alpha } => PolyPart::Shifted(jacobi_coeffs(n, JacobiParams { alpha, beta: alpha })),
        LegendreKind::V { alpha } => PolyPart::Shifted(jacobi_coeffs(n, JacobiParams { alpha, beta: -alpha })),
        LegendreKind::Pm { m } => {
            let mut c = legendre_power_coeffs(n);
            for _ in 0..m {
                c = differentiate(&c);
            }
            if c.is_empty() {
                c.push(0.0);
            }
            PolyPart::Power(c)
        }
        LegendreKind::G { .. } | LegendreKind::Q { .. } => {
            let (a, b) = kind.g_params().expect("G form");
            let gup = SubclassSpec::gup(a, b)?;
            PolyPart::Symmetric(monic_coeffs(&gup.params(), n)?)
        }
    })
}

/// `x^a` with `sign(x)|x|^a` unless `a` is an even integer.
fn prefactor_power(x: f64, a: f64) -> f64 {
    let even_integer = a == a.round() && (a as i64) % 2 == 0;
    let mag = x.abs().powf(a);
    if even_integer || x >= 0.0 {
        mag
    } else {
        -mag
    }
}

/// Prefactor `g` with its log-derivative `L = g'/g` and `L'`.
fn prefactor(kind: &LegendreKind, x: f64) -> (f64, f64, f64) {
    let s = 1.0 - x * x;
    match *kind {
        LegendreKind::U { alpha } => half_power(alpha, x),
        LegendreKind::Pm { m } => half_power(m as f64, x),
        LegendreKind::V { alpha } => {
            let g = ((1.0 - x) / (1.0 + x)).powf(alpha / 2.0);
            (g, -alpha / s, -2.0 * alpha * x / (s * s))
        }
        LegendreKind::G { .. } | LegendreKind::Q { .. } => {
            let (a, b) = kind.g_params().expect("G form");
            let g = prefactor_power(x, a) * s.powf(b / 2.0);
            let l = a / x - b * x / s;
            let dl = -a / (x * x) - b * (1.0 + x * x) / (s * s);
            (g, l, dl)
        }
    }
}

/// `(1 − x²)^{α/2}`.
fn half_power(alpha: f64, x: f64) -> (f64, f64, f64) {
    let s = 1.0 - x * x;
    let g = if alpha == 0.0 { 1.0 } else { s.powf(alpha / 2.0) };
    (g, -alpha * x / s, -alpha * (1.0 + x * x) / (s * s))
}

fn check_open(x: f64) -> Result<()> {
    if x > -1.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("x = {x} outside (-1, 1)")))
    }
}

/// `Ψ_n(x)` for the given family; `P_n^m` with `m > n` is identically zero.
pub fn eval_legendre_fn(kind: &LegendreKind, n: usize, x: f64) -> Result<f64> {
    kind.validate()?;
    check_open(x)?;
    let poly = poly_part(kind, n)?;
    Ok(eval_part(kind, &poly, x))
}

fn eval_part(kind: &LegendreKind, poly: &PolyPart, x: f64) -> f64 {
    let (p, _, _) = poly.jets(x);
    let g = match *kind {
        LegendreKind::U { alpha } => half_power(alpha, x).0,
        LegendreKind::Pm { m } => half_power(m as f64, x).0,
        _ => prefactor(kind, x).0,
    };
    if p == 0.0 {
        0.0
    } else {
        g * p
    }
}

/// `(Ψ, Ψ', Ψ'')` at a point where the prefactor is smooth.
fn jets(kind: &LegendreKind, poly: &PolyPart, x: f64) -> (f64, f64, f64) {
    let (g, l, dl) = prefactor(kind, x);
    let (p, dp, d2p) = poly.jets(x);
    (
        g * p,
        g * (dp + l * p),
        g * (d2p + 2.0 * l * dp + (dl + l * l) * p),
    )
}

/// Closed-form `∫_{−1}^{1} Ψ_n² dx`.
pub fn legendre_norm(kind: &LegendreKind, n: usize) -> Result<f64> {
    kind.validate()?;
    let nf = n as f64;
    match *kind {
        LegendreKind::U { alpha } => {
            // 2^{2α+1} Γ²(n+α+1) / (n! (2n+2α+1) Γ(n+2α+1)); at n = 0 the
            // last two factors combine into Γ(2α+2).
            let (g1, s1) = ln_gamma(nf + alpha + 1.0)?;
            let (gn, _) = ln_gamma(nf + 1.0)?;
            let (den, sd) = if n == 0 {
                ln_gamma(2.0 * alpha + 2.0)?
            } else {
                let (g, s) = ln_gamma(nf + 2.0 * alpha + 1.0)?;
                let lin = 2.0 * nf + 2.0 * alpha + 1.0;
                (g + lin.abs().ln(), s * lin.signum())
            };
            let ln = (2.0 * alpha + 1.0) * 2f64.ln() + 2.0 * g1 - gn - den;
            Ok(s1 * s1 * sd * ln.exp())
        }
        LegendreKind::Pm { m } => {
            if m > n {
                return Err(violation("P^m norm requires n >= m"));
            }
            let ln = ln_gamma(nf + m as f64 + 1.0)?.0 - ln_gamma((n - m) as f64 + 1.0)?.0;
            Ok(2.0 * ln.exp() / (2.0 * nf + 1.0))
        }
        LegendreKind::V { alpha } => {
            let ln = ln_gamma(nf + 1.0 + alpha)?.0 + ln_gamma(nf + 1.0 - alpha)?.0
                - 2.0 * ln_gamma(nf + 1.0)?.0;
            Ok(2.0 * ln.exp() / (2.0 * nf + 1.0))
        }
        LegendreKind::Q { b } => {
            let mut prod = 1.0;
            for i in 1..=n {
                let fi = i as f64;
                let t = fi + 1.0 - if i % 2 == 0 { 1.0 } else { -1.0 };
                prod *= t * (t + 2.0 * b) / ((2.0 * fi + 2.0 * b + 1.0) * (2.0 * fi + 2.0 * b + 3.0));
            }
            let ln = ln_gamma(b + 1.0)?.0 - ln_gamma(b + 2.5)?.0;
            Ok(prod * PI.sqrt() * ln.exp() / 2.0)
        }
        LegendreKind::G { a, b } => Ok(SubclassSpec::gup(a, b)?.norm_squared(n)?.value),
    }
}

/// Residual of
/// `(1 − x²)Ψ'' − 2xΨ' + (μ_n − ν/(1 − x²) + ((1 − (−1)ⁿ)/2) E) Ψ`
/// with `μ_n, ν` taken from the family.
pub fn generalized_legendre_residual(
    kind: &LegendreKind,
    n: usize,
    e: EChoice,
    x: f64,
) -> Result<f64> {
    kind.validate()?;
    check_open(x)?;
    if e == EChoice::NegTwoOverXSq && x == 0.0 {
        return Err(Error::Domain("E = -2/x^2 is singular at 0".into()));
    }
    if kind.g_params().is_some() && x == 0.0 {
        return Err(Error::Domain("G prefactor is not differentiable at 0".into()));
    }
    let poly = poly_part(kind, n)?;
    let (f, df, d2f) = jets(kind, &poly, x);
    let parity = if n % 2 == 1 { e.at(x) } else { 0.0 };
    let s = 1.0 - x * x;
    Ok(s * d2f - 2.0 * x * df + (kind.mu(n) - kind.nu() / s + parity) * f)
}

/// Residual of
/// `(1 − x²)G'' − 2xG' + ((n+a+b)(n+a+b+1) − b²/(1 − x²) + a((−1)ⁿ − a)/x²) G`.
pub fn g_residual(n: usize, a: f64, b: f64, x: f64) -> Result<f64> {
    let kind = LegendreKind::G { a, b };
    kind.validate()?;
    check_open(x)?;
    if x == 0.0 {
        return Err(Error::Domain("G residual is singular at 0".into()));
    }
    let poly = poly_part(&kind, n)?;
    let (f, df, d2f) = jets(&kind, &poly, x);
    let s = 1.0 - x * x;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(s * d2f - 2.0 * x * df + (kind.mu(n) - b * b / s + a * (sign - a) / (x * x)) * f)
}

/// A Legendre-type family as an orthogonal basis with unit weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendreBasis {
    kind: LegendreKind,
}

impl LegendreBasis {
    pub fn new(kind: LegendreKind) -> Result<Self> {
        kind.validate()?;
        Ok(LegendreBasis { kind })
    }

    pub fn kind(&self) -> &LegendreKind {
        &self.kind
    }
}

impl Basis for LegendreBasis {
    fn label(&self) -> String {
        self.kind.to_string()
    }

    fn support(&self) -> Support {
        Support { theta: 1.0 }
    }

    fn weight(&self, _x: f64) -> f64 {
        1.0
    }

    fn function(&self, n: usize) -> Result<BasisFn<'_>> {
        let poly = poly_part(&self.kind, n)?;
        let kind = self.kind;
        Ok(Box::new(move |x| eval_part(&kind, &poly, x)))
    }

    fn closed_norm(&self, n: usize) -> Result<f64> {
        legendre_norm(&self.kind, n)
    }

    fn pair_interval(&self, n: usize, m: usize) -> IntervalSpec {
        let iv = IntervalSpec::symmetric(1.0).expect("unit interval");
        let parity = if (n + m).is_multiple_of(2) { Symmetry::Even } else { Symmetry::Odd };
        match self.kind {
            LegendreKind::U { alpha } => iv
                .with_singularity(-1.0, alpha)
                .with_singularity(1.0, alpha)
                .with_symmetry(parity),
            LegendreKind::Pm { .. } => iv.with_symmetry(parity),
            LegendreKind::V { alpha } => iv.with_singularity(-1.0, -alpha).with_singularity(1.0, alpha),
            LegendreKind::G { .. } | LegendreKind::Q { .. } => {
                let (a, b) = self.kind.g_params().expect("G form");
                let bits = (n % 2 + m % 2) as f64;
                iv.with_singularity(-1.0, b)
                    .with_singularity(1.0, b)
                    .with_singularity(0.0, 2.0 * a + bits)
                    .with_symmetry(parity)
            }
        }
    }
}
