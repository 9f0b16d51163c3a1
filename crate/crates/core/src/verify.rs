//! Orthogonality machinery for the generalized Sturm–Liouville equation
//!
//! ```text
//! A Φ'' + B Φ' + (λ_n C + D + ((1 − (−1)ⁿ)/2) E) Φ = 0
//! ```
//!
//! with `A, C, D, E` even and `B` odd: the integrating factor `R`, the weight
//! `W* = C R`, the boundary bracket, the parity integral `F(n, m)` and Gram
//! matrices.

use rayon::prelude::*;

use crate::basis::{Basis, BasisFn};
use crate::core_class::ClassParams;
use crate::error::{Error, Result};
use crate::numerics::{integrate_with, IntervalSpec, QuadConfig, QuadResult, Symmetry};
use crate::subclasses::{PairValidity, SubclassSpec};

/// A real function of `y = x²`.
pub type EvenFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Coefficients of the generalized equation. Parity holds by construction:
/// `A, C, D, E` are given as functions of `x²` and `B(x) = x·b(x²)`.
pub struct SLCoeffs {
    a: EvenFn,
    b: EvenFn,
    c: EvenFn,
    d: EvenFn,
    e: EvenFn,
    eigenvalues: Box<dyn Fn(usize) -> f64 + Send + Sync>,
    theta: f64,
    generic: Option<ClassParams<f64>>,
}

impl std::fmt::Debug for SLCoeffs {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SLCoeffs")
            .field("theta", &self.theta)
            .field("generic", &self.generic)
            .finish_non_exhaustive()
    }
}

impl SLCoeffs {
    pub fn new(
        a: EvenFn,
        b: EvenFn,
        c: EvenFn,
        d: EvenFn,
        e: EvenFn,
        eigenvalues: Box<dyn Fn(usize) -> f64 + Send + Sync>,
        theta: f64,
    ) -> Result<Self> {
        if !(theta > 0.0) {
            return Err(Error::Domain(format!("theta must be positive, got {theta}")));
        }
        Ok(SLCoeffs {
            a,
            b,
            c,
            d,
            e,
            eigenvalues,
            theta,
            generic: None,
        })
    }

    /// `A = x²(px² + q)`, `B = x(rx² + s)`, `C = x²`, `D = 0`, `E = −s`,
    /// `λ_n = −n(r + (n−1)p)`.
    pub fn generic(params: &ClassParams<f64>, theta: f64) -> Result<Self> {
        let (p, q, r, s) = params.as_tuple();
        let mut sl = SLCoeffs::new(
            Box::new(move |y| y * (p * y + q)),
            Box::new(move |y| r * y + s),
            Box::new(|y| y),
            Box::new(|_| 0.0),
            Box::new(move |_| -s),
            Box::new(move |n| {
                let n = n as f64;
                -n * (r + (n - 1.0) * p)
            }),
            theta,
        )?;
        sl.generic = Some(params.clone());
        Ok(sl)
    }

    pub fn for_subclass(spec: &SubclassSpec) -> Result<Self> {
        SLCoeffs::generic(&spec.params(), spec.support().theta)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn generic_params(&self) -> Option<&ClassParams<f64>> {
        self.generic.as_ref()
    }

    pub fn a(&self, x: f64) -> f64 {
        (self.a)(x * x)
    }

    pub fn b(&self, x: f64) -> f64 {
        x * (self.b)(x * x)
    }

    pub fn c(&self, x: f64) -> f64 {
        (self.c)(x * x)
    }

    pub fn d(&self, x: f64) -> f64 {
        (self.d)(x * x)
    }

    pub fn e(&self, x: f64) -> f64 {
        (self.e)(x * x)
    }

    pub fn eigenvalue(&self, n: usize) -> f64 {
        (self.eigenvalues)(n)
    }

    /// Left side of the equation for a member with the given derivatives.
    pub fn residual(&self, n: usize, x: f64, phi: f64, dphi: f64, d2phi: f64) -> f64 {
        let parity = if n % 2 == 1 { self.e(x) } else { 0.0 };
        self.a(x) * d2phi
            + self.b(x) * dphi
            + (self.eigenvalue(n) * self.c(x) + self.d(x) + parity) * phi
    }
}

/// Closed-form `W* = C R` of the generic class, normalised so that the four
/// subclass weights come out exactly:
///
/// * `p, q ≠ 0`: `|x|^{s/q} |px² + q|^{(rq − ps)/(2pq)} / (px² + q)`
/// * `p = 0`: `|x|^{s/q} e^{r x²/(2q)} / q`
/// * `q = 0`: `|x|^{r/p − 2} e^{−s/(2p x²)} / p`
pub fn generic_weight(params: &ClassParams<f64>, x: f64) -> f64 {
    let (p, q, r, s) = params.as_tuple();
    let ax = x.abs();
    let pow = |e: f64| if e == 0.0 { 0.0 } else { e * ax.ln() };
    if q == 0.0 {
        if x == 0.0 {
            return if s / p > 0.0 { 0.0 } else { f64::INFINITY };
        }
        return (pow(r / p - 2.0) - s / (2.0 * p * x * x)).exp() / p;
    }
    if p == 0.0 {
        return (pow(s / q) + r * x * x / (2.0 * q)).exp() / q;
    }
    let g = p * x * x + q;
    let e = (r * q - p * s) / (2.0 * p * q);
    let ln_g = if e == 0.0 { 0.0 } else { e * g.abs().ln() };
    (pow(s / q) + ln_g).exp() / g
}

/// `R(x)` for the generic class in closed form, `W*(x)/x²`.
fn generic_factor(params: &ClassParams<f64>, x: f64) -> f64 {
    generic_weight(params, x) / (x * x)
}

fn reference_point(theta: f64) -> f64 {
    if theta.is_finite() {
        theta / 2.0
    } else {
        1.0
    }
}

/// `R = (1/A) exp(∫ B/A)`, anchored at `x₀ = θ/2` (or 1 on the real line).
pub fn self_adjoint_factor(sl: &SLCoeffs, x: f64) -> Result<f64> {
    if !(x.abs() < sl.theta) {
        return Err(Error::Domain(format!("x = {x} outside the interval")));
    }
    let a = sl.a(x);
    if a == 0.0 {
        return Err(Error::SingularCoefficient { x });
    }
    if let Some(params) = &sl.generic {
        return Ok(generic_factor(params, x));
    }
    let x0 = reference_point(sl.theta);
    let ax = x.abs();
    let exponent = if ax == x0 {
        0.0
    } else {
        let (lo, hi, sign) = if ax < x0 { (ax, x0, -1.0) } else { (x0, ax, 1.0) };
        let iv = IntervalSpec::new(lo, hi)?;
        let r = integrate_with(|t| sl.b(t) / sl.a(t), &iv, &QuadConfig::default())
            .map_err(|_| Error::SingularCoefficient { x })?;
        if !r.converged {
            return Err(Error::SingularCoefficient { x });
        }
        sign * r.value
    };
    Ok(exponent.exp() / a)
}

/// `W*(x) = C(x) R(x)`, required positive.
pub fn weight_star(sl: &SLCoeffs, x: f64) -> Result<f64> {
    let w = match &sl.generic {
        Some(params) => {
            if !(x.abs() < sl.theta) {
                return Err(Error::Domain(format!("x = {x} outside the interval")));
            }
            generic_weight(params, x)
        }
        None => sl.c(x) * self_adjoint_factor(sl, x)?,
    };
    if w.is_infinite() {
        return Err(Error::SingularPoint { x });
    }
    if !(w > 0.0) {
        return Err(Error::NonpositiveWeight { x });
    }
    Ok(w)
}

/// Evenness and positivity of `W*` over sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightCheck {
    pub positive: bool,
    pub even: bool,
    /// Largest `|W*(x) − W*(−x)| / W*(x)` seen.
    pub worst_asymmetry: f64,
    pub offending: Option<f64>,
}

pub fn check_weight(sl: &SLCoeffs, points: &[f64]) -> WeightCheck {
    let mut check = WeightCheck {
        positive: true,
        even: true,
        worst_asymmetry: 0.0,
        offending: None,
    };
    for &x in points {
        match (weight_star(sl, x), weight_star(sl, -x)) {
            (Ok(w), Ok(wm)) => {
                let asym = (w - wm).abs() / w;
                check.worst_asymmetry = check.worst_asymmetry.max(asym);
                if asym > 1e-12 {
                    check.even = false;
                    check.offending.get_or_insert(x);
                }
            }
            _ => {
                check.positive = false;
                check.offending.get_or_insert(x);
            }
        }
    }
    check
}

/// `(Φ(x), Φ'(x))`.
pub type ValueAndSlope<'a> = &'a dyn Fn(f64) -> (f64, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTerm {
    /// Extrapolated `[A R (Φ'_n Φ_m − Φ'_m Φ_n)]` from `−θ` to `θ`.
    pub value: f64,
    /// `(x, bracket(x) − bracket(−x))` along the approach to `θ`.
    pub samples: Vec<(f64, f64)>,
    pub vanishes: bool,
}

/// The boundary bracket, approached along `θ(1 − 10⁻ᵏ)`, `k = 3, 6, 9` on a
/// finite interval and along `10, 10², 10³` on the real line.
///
/// It counts as vanishing when the samples shrink monotonically and either
/// the last one is below `1e-10 · scale` or each step shrinks by at least half.
pub fn boundary_term(
    sl: &SLCoeffs,
    phi_n: ValueAndSlope<'_>,
    phi_m: ValueAndSlope<'_>,
    scale: f64,
) -> Result<BoundaryTerm> {
    let points: Vec<f64> = if sl.theta.is_finite() {
        [1e-3, 1e-6, 1e-9].iter().map(|d| sl.theta * (1.0 - d)).collect()
    } else {
        vec![10.0, 100.0, 1000.0]
    };
    let bracket = |x: f64| -> Result<f64> {
        let ar = sl.a(x) * self_adjoint_factor(sl, x)?;
        let (fn_, dn) = phi_n(x);
        let (fm, dm) = phi_m(x);
        let wronskian = dn * fm - dm * fn_;
        Ok(if wronskian == 0.0 { 0.0 } else { ar * wronskian })
    };
    let mut samples = Vec::with_capacity(points.len());
    for &x in &points {
        samples.push((x, bracket(x)? - bracket(-x)?));
    }
    let mags: Vec<f64> = samples.iter().map(|(_, v)| v.abs()).collect();
    let last = *mags.last().expect("three sample points");
    let finite = mags.iter().all(|m| m.is_finite());
    let monotone = mags.windows(2).all(|w| w[1] <= w[0]);
    let halving = mags.windows(2).all(|w| w[1] <= 0.5 * w[0]);
    let vanishes = finite && (last <= 1e-10 * scale || (monotone && halving));
    let value = if vanishes { 0.0 } else { samples.last().unwrap().1 };
    Ok(BoundaryTerm {
        value,
        samples,
        vanishes,
    })
}

/// `F(n, m) = ((−1)^m − (−1)^n)/2 ∫ E R Φ_n Φ_m`.
///
/// Equal parities give zero without integrating. Otherwise the integral is
/// computed by quadrature over the whole interval; `interval` carries the
/// singularity hints of `E R Φ_n Φ_m` and its parity hint is ignored.
pub fn parity_integral(
    sl: &SLCoeffs,
    phi_n: &(dyn Fn(f64) -> f64 + Sync),
    phi_m: &(dyn Fn(f64) -> f64 + Sync),
    n: usize,
    m: usize,
    interval: &IntervalSpec,
) -> Result<f64> {
    if n % 2 == m % 2 {
        return Ok(0.0);
    }
    let prefactor = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let iv = interval.clone().with_symmetry(Symmetry::None);
    let cfg = QuadConfig::with_tolerances(1e-13, 1e-12);
    let r = integrate_with(
        |x| {
            let e = sl.e(x);
            if e == 0.0 {
                return 0.0;
            }
            e * self_adjoint_factor(sl, x).unwrap_or(f64::NAN) * phi_n(x) * phi_m(x)
        },
        &iv,
        &cfg,
    )?;
    if r.diverged {
        return Err(Error::DivergentIntegral(format!("F({n}, {m})")));
    }
    Ok(prefactor * r.value)
}

/// Hints for `E R S̄_n S̄_m` on a subclass: `R = W*/x²` moves the origin
/// exponent down by two.
pub fn parity_interval(spec: &SubclassSpec, n: usize, m: usize) -> IntervalSpec {
    use crate::numerics::PointBehavior;
    let mut iv = spec.pair_interval(n, m).with_symmetry(Symmetry::None);
    for s in &mut iv.singularities {
        if s.at == 0.0 {
            if let PointBehavior::Algebraic(g) = s.behavior {
                s.behavior = PointBehavior::Algebraic(g - 2.0);
            }
        }
    }
    iv
}

#[derive(Debug, Clone, PartialEq)]
pub enum EntryStatus {
    Converged,
    Diverged,
    /// Quadrature ran out of budget without a verdict.
    Inconclusive,
    /// A member function could not be constructed.
    Undefined(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramEntry {
    pub n: usize,
    pub m: usize,
    pub value: f64,
    pub err: f64,
    pub status: EntryStatus,
    pub validity: Option<PairValidity>,
}

impl GramEntry {
    pub fn diverged(&self) -> bool {
        self.status == EntryStatus::Diverged
    }

    pub fn is_converged(&self) -> bool {
        self.status == EntryStatus::Converged
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramReport {
    pub label: String,
    pub nmax: usize,
    pub tol: f64,
    /// All `(n, m)` pairs, row-major.
    pub entries: Vec<GramEntry>,
    /// Closed-form diagonal, where available.
    pub closed_norms: Vec<Option<f64>>,
    pub pass: bool,
    pub failures: Vec<String>,
}

impl GramReport {
    pub fn entry(&self, n: usize, m: usize) -> &GramEntry {
        &self.entries[n * (self.nmax + 1) + m]
    }

    pub fn value(&self, n: usize, m: usize) -> f64 {
        self.entry(n, m).value
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..=self.nmax).map(|n| self.value(n, n)).collect()
    }

    /// Largest `|G_nm| / √(G_nn G_mm)` over off-diagonal entries.
    pub fn max_scaled_off_diagonal(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for e in &self.entries {
            if e.n != e.m {
                let scale = (self.value(e.n, e.n) * self.value(e.m, e.m)).abs().sqrt();
                worst = worst.max(e.value.abs() / scale);
            }
        }
        worst
    }
}

fn entry_config(tol: f64, scale: Option<f64>) -> QuadConfig {
    // Off-diagonal entries cancel to zero, so a tolerance relative to the
    // value of any one piece would be meaningless; stay absolute instead.
    // A tenth of the pass threshold keeps each verdict clear of the error.
    match scale {
        Some(s) if s.is_finite() && s > 0.0 => {
            QuadConfig::with_tolerances((tol * 0.1 * s).max(1e-300), 0.0)
        }
        _ => QuadConfig::with_tolerances(1e-12, 1e-10),
    }
}

/// `∫ W Φ_n Φ_m` for every `n, m ≤ nmax`.
///
/// Passes iff every entry converges, every off-diagonal satisfies
/// `|G_nm| ≤ tol √(G_nn G_mm)` and every diagonal matches the closed-form norm
/// within relative `tol`.
pub fn gram_matrix(basis: &dyn Basis, nmax: usize, tol: f64) -> GramReport {
    gram_matrix_with(basis, nmax, tol, None)
}

/// [`gram_matrix`] with an explicit quadrature configuration for every entry.
pub fn gram_matrix_with(
    basis: &dyn Basis,
    nmax: usize,
    tol: f64,
    config: Option<&QuadConfig>,
) -> GramReport {
    let size = nmax + 1;
    let members: Vec<Result<BasisFn<'_>>> = (0..size).map(|n| basis.function(n)).collect();
    let closed: Vec<Option<f64>> = (0..size).map(|n| basis.closed_norm(n).ok()).collect();
    let pairs: Vec<(usize, usize)> = (0..size)
        .flat_map(|n| (n..size).map(move |m| (n, m)))
        .collect();

    let computed: Vec<GramEntry> = pairs
        .par_iter()
        .map(|&(n, m)| {
            let validity = basis.pair_validity(n, m);
            let (fn_, fm) = match (&members[n], &members[m]) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    return GramEntry {
                        n,
                        m,
                        value: f64::NAN,
                        err: f64::NAN,
                        status: EntryStatus::Undefined(e.to_string()),
                        validity,
                    }
                }
            };
            let scale = match (closed[n], closed[m]) {
                (Some(a), Some(b)) => Some((a * b).abs().sqrt()),
                (Some(a), None) | (None, Some(a)) => Some(a.abs()),
                (None, None) => None,
            };
            let cfg = config.cloned().unwrap_or_else(|| entry_config(tol, scale));
            let iv = basis.pair_interval(n, m);
            let result: std::result::Result<QuadResult, _> =
                integrate_with(|x| basis.weight(x) * fn_(x) * fm(x), &iv, &cfg);
            let (value, err, status) = match result {
                Ok(r) if r.diverged => (r.value, r.abs_error_estimate, EntryStatus::Diverged),
                Ok(r) if r.converged => (r.value, r.abs_error_estimate, EntryStatus::Converged),
                Ok(r) => (r.value, r.abs_error_estimate, EntryStatus::Inconclusive),
                Err(e) => (f64::NAN, f64::NAN, EntryStatus::Undefined(e.to_string())),
            };
            GramEntry {
                n,
                m,
                value,
                err,
                status,
                validity,
            }
        })
        .collect();

    let mut grid: Vec<Option<GramEntry>> = vec![None; size * size];
    for e in computed {
        let mirrored = GramEntry {
            n: e.m,
            m: e.n,
            ..e.clone()
        };
        let (n, m) = (e.n, e.m);
        grid[m * size + n] = Some(mirrored);
        grid[n * size + m] = Some(e);
    }
    let entries: Vec<GramEntry> = grid.into_iter().map(|e| e.expect("all pairs filled")).collect();

    let mut failures = Vec::new();
    for e in entries.iter().filter(|e| e.n <= e.m) {
        match &e.status {
            EntryStatus::Converged => {}
            EntryStatus::Diverged => failures.push(format!("({}, {}) diverges", e.n, e.m)),
            EntryStatus::Inconclusive => {
                failures.push(format!("({}, {}) quadrature inconclusive", e.n, e.m))
            }
            EntryStatus::Undefined(why) => failures.push(format!("({}, {}) undefined: {why}", e.n, e.m)),
        }
    }
    let diag = |k: usize| entries[k * size + k].value;
    for e in entries.iter().filter(|e| e.n < e.m && e.is_converged()) {
        let scale = (diag(e.n) * diag(e.m)).abs().sqrt();
        if !(e.value.abs() <= tol * scale) {
            failures.push(format!(
                "({}, {}) = {:e} exceeds {tol:e} x diagonal scale {scale:e}",
                e.n, e.m, e.value
            ));
        }
    }
    for (k, c) in closed.iter().enumerate() {
        let got = diag(k);
        match c {
            Some(c) => {
                if !(((got - c) / c).abs() <= tol) {
                    failures.push(format!("diagonal {k}: quadrature {got:e} vs closed form {c:e}"));
                }
            }
            None => failures.push(format!("diagonal {k}: no closed-form norm")),
        }
    }

    GramReport {
        label: basis.label(),
        nmax,
        tol,
        pass: failures.is_empty(),
        entries,
        closed_norms: closed,
        failures,
    }
}
