//! Adaptive Gauss-Kronrod quadrature over finite and infinite intervals.
//!
//! Finite pieces are refined by global adaptive bisection with the 7/15-point
//! Gauss-Kronrod pair. Algebraic endpoint singularities announced by the
//! caller are softened with a power substitution `x = a + w t^k`. Infinite
//! tails, and endpoint singularities that are too strong to be integrable, are
//! summed as geometric shells whose `L1` ratios drive both the stopping rule
//! and the divergence test.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    /// Refinement stopped without meeting the tolerance. Inconclusive: this
    /// is not a divergence verdict.
    #[error("maximum subdivision depth exceeded near x = {at} (partial value {partial}, error estimate {abs_error_estimate})")]
    MaxDepthExceeded {
        at: f64,
        partial: f64,
        abs_error_estimate: f64,
    },
    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error("invalid interval [{lower}, {upper}]")]
    InvalidInterval { lower: f64, upper: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub converged: bool,
    pub diverged: bool,
    pub evaluations: usize,
}

impl QuadResult {
    fn exact_zero() -> Self {
        QuadResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            converged: true,
            diverged: false,
            evaluations: 0,
        }
    }
}

/// Local behaviour of the integrand at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointBehavior {
    /// `f(x) ~ |x - at|^exponent` near the point.
    Algebraic(f64),
    /// All derivatives vanish, e.g. `exp(-1/x^2)` at the origin. The point is
    /// used as a breakpoint only.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singularity {
    pub at: f64,
    pub behavior: PointBehavior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Symmetry {
    #[default]
    None,
    Even,
    Odd,
}

/// Integration interval. Endpoints may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSpec {
    pub lower: f64,
    pub upper: f64,
    pub singularities: Vec<Singularity>,
    /// Parity of the integrand; only used when the interval is symmetric.
    pub symmetry: Symmetry,
}

impl IntervalSpec {
    pub fn new(lower: f64, upper: f64) -> Result<Self, QuadError> {
        if lower.is_nan() || upper.is_nan() || lower >= upper {
            return Err(QuadError::InvalidInterval { lower, upper });
        }
        Ok(IntervalSpec {
            lower,
            upper,
            singularities: Vec::new(),
            symmetry: Symmetry::None,
        })
    }

    /// `(-theta, theta)`.
    pub fn symmetric(theta: f64) -> Result<Self, QuadError> {
        Self::new(-theta, theta)
    }

    pub fn with_singularity(mut self, at: f64, exponent: f64) -> Self {
        self.singularities.push(Singularity {
            at,
            behavior: PointBehavior::Algebraic(exponent),
        });
        self
    }

    pub fn with_flat_point(mut self, at: f64) -> Self {
        self.singularities.push(Singularity {
            at,
            behavior: PointBehavior::Flat,
        });
        self
    }

    pub fn with_symmetry(mut self, symmetry: Symmetry) -> Self {
        self.symmetry = symmetry;
        self
    }

    pub fn is_symmetric(&self) -> bool {
        self.lower == -self.upper
    }

    fn behavior_at(&self, x: f64) -> Option<PointBehavior> {
        // Strongest (most negative) algebraic hint wins.
        let mut out: Option<PointBehavior> = None;
        for s in self.singularities.iter().filter(|s| s.at == x) {
            out = match (out, s.behavior) {
                (Some(PointBehavior::Algebraic(a)), PointBehavior::Algebraic(b)) => {
                    Some(PointBehavior::Algebraic(a.min(b)))
                }
                (Some(PointBehavior::Algebraic(a)), PointBehavior::Flat) => {
                    Some(PointBehavior::Algebraic(a))
                }
                (_, b) => Some(b),
            };
        }
        out
    }
}

/// Tolerances and limits. Convergence means
/// `error <= max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections of a single subinterval.
    pub max_depth: u32,
    /// Subinterval budget of one adaptive run.
    pub max_intervals: usize,
    /// Shell-to-shell `L1` ratio at or above which a tail counts as
    /// non-decaying.
    pub divergence_ratio: f64,
    /// Consecutive non-decaying shells needed to declare divergence.
    pub divergence_run: usize,
    pub max_shells: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_depth: 60,
            max_intervals: 5000,
            divergence_ratio: 0.98,
            divergence_run: 6,
            max_shells: 400,
        }
    }
}

impl QuadConfig {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        QuadConfig {
            abs_tol,
            rel_tol,
            ..QuadConfig::default()
        }
    }
}

/// One application of the 15-point Kronrod rule with its embedded 7-point
/// Gauss rule on `[a, b]`.
///
/// Returns `(kronrod, gauss, integral of |f|)`.
pub fn gauss_kronrod_15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let r = gk15(f, a, b);
    (r.value, r.gauss, r.abs)
}

struct Gk {
    value: f64,
    gauss: f64,
    abs: f64,
    err: f64,
    bad: Option<f64>,
}

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Gk {
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let mut bad = None;
    let mut eval = |x: f64| {
        let v = f(x);
        if !v.is_finite() && bad.is_none() {
            bad = Some(x);
        }
        v
    };
    let fc = eval(centr);
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = hlgth * XGK[j];
        let f1 = eval(centr - dx);
        let f2 = eval(centr + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let h = hlgth.abs();
    let value = resk * hlgth;
    let gauss = resg * hlgth;
    let resabs = resabs * h;
    let resasc = resasc * h;
    let mut err = ((resk - resg) * hlgth).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Gk {
        value,
        gauss,
        abs: resabs,
        err,
        bad,
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    abs: f64,
    err: f64,
    depth: u32,
    order: usize,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap on error; earlier segments first on ties.
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.order.cmp(&self.order))
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Partial {
    value: f64,
    abs: f64,
    err: f64,
    evaluations: usize,
    diverged: bool,
}

impl Partial {
    fn add(&mut self, other: Partial) {
        self.value += other.value;
        self.abs += other.abs;
        self.err += other.err;
        self.evaluations += other.evaluations;
        self.diverged |= other.diverged;
    }
}

/// Global adaptive bisection on a finite interval.
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    cfg: &QuadConfig,
) -> Result<Partial, QuadError> {
    let first = gk15(f, a, b);
    if let Some(x) = first.bad {
        return Err(QuadError::NonFinite { x });
    }
    let mut evaluations = 15;
    let mut order = 0;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value: first.value,
        abs: first.abs,
        err: first.err,
        depth: 0,
        order,
    });
    let mut value = first.value;
    let mut abs = first.abs;
    let mut err = first.err;
    loop {
        let tol = abs_tol.max(cfg.rel_tol * value.abs());
        let worst = *heap.peek().expect("heap is never empty");
        // Worst segment already at the rounding floor: nothing left to gain.
        let at_floor = worst.err <= 64.0 * f64::EPSILON * worst.abs;
        if err <= tol || at_floor {
            return Ok(Partial {
                value,
                abs,
                err,
                evaluations,
                diverged: false,
            });
        }
        if worst.depth >= cfg.max_depth || heap.len() >= cfg.max_intervals {
            return Err(QuadError::MaxDepthExceeded {
                at: 0.5 * (worst.a + worst.b),
                partial: value,
                abs_error_estimate: err,
            });
        }
        heap.pop();
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a.min(worst.b) && mid < worst.a.max(worst.b)) {
            return Err(QuadError::MaxDepthExceeded {
                at: mid,
                partial: value,
                abs_error_estimate: err,
            });
        }
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        evaluations += 30;
        if let Some(x) = left.bad.or(right.bad) {
            return Err(QuadError::NonFinite { x });
        }
        value += left.value + right.value - worst.value;
        abs += left.abs + right.abs - worst.abs;
        err += left.err + right.err - worst.err;
        for (lo, hi, r) in [(worst.a, mid, left), (mid, worst.b, right)] {
            order += 1;
            heap.push(Segment {
                a: lo,
                b: hi,
                value: r.value,
                abs: r.abs,
                err: r.err,
                depth: worst.depth + 1,
                order,
            });
        }
        // Re-sum occasionally to limit drift from the incremental updates.
        if order % 256 == 0 {
            value = heap.iter().map(|s| s.value).sum();
            abs = heap.iter().map(|s| s.abs).sum();
            err = heap.iter().map(|s| s.err).sum();
        }
    }
}

/// Sums shells `[lo_k, hi_k]` produced by `shell` until the tail is
/// negligible or found to be non-decaying.
fn shells(
    f: &dyn Fn(f64) -> f64,
    shell: &dyn Fn(usize) -> (f64, f64),
    abs_tol: f64,
    cfg: &QuadConfig,
) -> Result<Partial, QuadError> {
    let mut total = Partial::default();
    let mut prev_abs: Option<f64> = None;
    let mut ratios: Vec<f64> = Vec::new();
    let mut zero_run = 0;
    let mut flat_run = 0;
    // Geometric shares keep the summed shell errors below `0.42 abs_tol`.
    let mut shell_tol = abs_tol / 8.0;
    for k in 0..cfg.max_shells {
        let (lo, hi) = shell(k);
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            break;
        }
        let p = adaptive(f, lo, hi, shell_tol, cfg)?;
        shell_tol *= 0.7;
        total.add(p);
        if let Some(prev) = prev_abs {
            let ratio = if prev == 0.0 {
                if p.abs == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                p.abs / prev
            };
            ratios.push(ratio);
            if ratio >= cfg.divergence_ratio {
                flat_run += 1;
            } else {
                flat_run = 0;
            }
        }
        prev_abs = Some(p.abs);
        if p.abs == 0.0 {
            zero_run += 1;
            if zero_run >= 2 {
                return Ok(total);
            }
            continue;
        }
        zero_run = 0;
        if flat_run >= cfg.divergence_run && k >= 8 {
            total.diverged = true;
            return Ok(total);
        }
        if ratios.len() >= 2 {
            let rho = ratios[ratios.len() - 1].max(ratios[ratios.len() - 2]);
            if rho < 0.95 {
                let remainder = p.abs * rho / (1.0 - rho);
                let tol = abs_tol.max(cfg.rel_tol * total.value.abs());
                if remainder <= tol * 0.5 {
                    total.err += remainder;
                    return Ok(total);
                }
            }
        }
    }
    let (lo, hi) = shell(cfg.max_shells.saturating_sub(1));
    Err(QuadError::MaxDepthExceeded {
        at: 0.5 * (lo + hi),
        partial: total.value,
        abs_error_estimate: total.err,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum End {
    Regular,
    Flat,
    Algebraic(f64),
}

impl From<Option<PointBehavior>> for End {
    fn from(b: Option<PointBehavior>) -> Self {
        match b {
            None => End::Regular,
            Some(PointBehavior::Flat) => End::Flat,
            Some(PointBehavior::Algebraic(g)) => End::Algebraic(g),
        }
    }
}

fn needs_softening(e: End) -> bool {
    matches!(e, End::Algebraic(g) if g < 0.0 && g > -1.0)
}

fn non_integrable(e: End) -> bool {
    matches!(e, End::Algebraic(g) if g <= -1.0)
}

/// Power-substitution exponent that turns `t^(k(1+g)-1)` into at least `t^1`.
fn softening_power(g: f64) -> f64 {
    (2.0 / (1.0 + g)).ceil().clamp(1.0, 64.0)
}

fn finite_piece(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    ea: End,
    eb: End,
    abs_tol: f64,
    cfg: &QuadConfig,
) -> Result<Partial, QuadError> {
    let special = |e: End| needs_softening(e) || non_integrable(e);
    if special(ea) && special(eb) {
        let mid = 0.5 * (a + b);
        let mut left = finite_piece(f, a, mid, ea, End::Regular, abs_tol / 2.0, cfg)?;
        let right = finite_piece(f, mid, b, End::Regular, eb, abs_tol / 2.0, cfg)?;
        left.add(right);
        return Ok(left);
    }
    let w = b - a;
    if non_integrable(ea) {
        return shells(
            f,
            &|k| {
                let s = 0.5f64.powi(k as i32);
                (a + w * s * 0.5, a + w * s)
            },
            abs_tol,
            cfg,
        );
    }
    if non_integrable(eb) {
        return shells(
            f,
            &|k| {
                let s = 0.5f64.powi(k as i32);
                (b - w * s, b - w * s * 0.5)
            },
            abs_tol,
            cfg,
        );
    }
    if let End::Algebraic(g) = ea {
        if needs_softening(ea) {
            return softened(&|d| f(a + d), a, w, g, abs_tol, cfg);
        }
    }
    if let End::Algebraic(g) = eb {
        if needs_softening(eb) {
            return softened(&|d| f(b - d), b, w, g, abs_tol, cfg);
        }
    }
    adaptive(f, a, b, abs_tol, cfg)
}

/// `∫_0^w f_d(d) dd` for `f_d(d) ~ C d^g` near `d = 0`, where `d` is the
/// distance to the singular endpoint `at`.
///
/// Within `d_min = 1e6 eps |at|` of a nonzero endpoint, `x = at ± d` no
/// longer resolves `d` and samples turn to rounding noise. That sliver is
/// integrated from the power law instead, `f_d(d_min) d_min / (1 + g)`.
fn softened(
    f_d: &dyn Fn(f64) -> f64,
    at: f64,
    w: f64,
    g: f64,
    abs_tol: f64,
    cfg: &QuadConfig,
) -> Result<Partial, QuadError> {
    let k = softening_power(g);
    let d_min = (1e6 * f64::EPSILON * at.abs()).min(1e-3 * w);
    let t_min = (d_min / w).powf(1.0 / k);
    let h = move |t: f64| {
        let d = w * t.powf(k);
        if d == 0.0 {
            return 0.0;
        }
        f_d(d) * w * k * t.powf(k - 1.0)
    };
    let mut body = adaptive(&h, t_min, 1.0, abs_tol, cfg)?;
    if d_min > 0.0 {
        let edge = f_d(d_min);
        if !edge.is_finite() {
            return Err(QuadError::NonFinite { x: at });
        }
        let sliver = edge * d_min / (1.0 + g);
        // Rounding of `at ± d_min`, plus the first neglected term of the
        // power law.
        let noise = 0.5 * g.abs() * f64::EPSILON * at.abs() / d_min + 100.0 * d_min / w;
        body.value += sliver;
        body.abs += sliver.abs();
        body.err += noise * sliver.abs();
        body.evaluations += 1;
    }
    Ok(body)
}

/// `[a, +inf)` where `a` has behaviour `ea`.
fn upper_tail(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    ea: End,
    abs_tol: f64,
    cfg: &QuadConfig,
) -> Result<Partial, QuadError> {
    let len = a.abs().max(1.0);
    let c = a + len;
    let mut head = finite_piece(f, a, c, ea, End::Regular, abs_tol / 2.0, cfg)?;
    let scale = c.abs().max(1.0);
    let tail = shells(
        f,
        &|k| {
            let lo = c + scale * (2f64.powi(k as i32) - 1.0);
            let hi = c + scale * (2f64.powi(k as i32 + 1) - 1.0);
            (lo, hi)
        },
        abs_tol / 2.0,
        cfg,
    )?;
    head.add(tail);
    Ok(head)
}

fn piece(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    ea: End,
    eb: End,
    abs_tol: f64,
    cfg: &QuadConfig,
) -> Result<Partial, QuadError> {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => finite_piece(f, a, b, ea, eb, abs_tol, cfg),
        (true, false) => upper_tail(f, a, ea, abs_tol, cfg),
        (false, true) => {
            let g = move |y: f64| f(-y);
            upper_tail(&g, -b, eb, abs_tol, cfg)
        }
        (false, false) => {
            let mut left = piece(f, a, 0.0, End::Regular, End::Regular, abs_tol / 2.0, cfg)?;
            let right = piece(f, 0.0, b, End::Regular, End::Regular, abs_tol / 2.0, cfg)?;
            left.add(right);
            Ok(left)
        }
    }
}

/// Integrates `f` over `interval` with the default configuration but the
/// given absolute tolerance.
pub fn integrate<F>(f: F, interval: &IntervalSpec, tol: f64) -> Result<QuadResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    let cfg = QuadConfig {
        abs_tol: tol,
        ..QuadConfig::default()
    };
    integrate_with(f, interval, &cfg)
}

pub fn integrate_with<F>(
    f: F,
    interval: &IntervalSpec,
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    let (lower, upper) = (interval.lower, interval.upper);
    if lower.is_nan() || upper.is_nan() || lower >= upper {
        return Err(QuadError::InvalidInterval { lower, upper });
    }
    let f: &dyn Fn(f64) -> f64 = &f;
    let symmetric = interval.is_symmetric();
    if symmetric && interval.symmetry == Symmetry::Odd {
        return Ok(QuadResult::exact_zero());
    }
    let (lo, factor) = if symmetric && interval.symmetry == Symmetry::Even {
        (0.0, 2.0)
    } else {
        (lower, 1.0)
    };

    let mut points = vec![lo];
    let mut interior: Vec<f64> = interval
        .singularities
        .iter()
        .map(|s| s.at)
        .filter(|&x| x > lo && x < upper)
        .collect();
    if lo.is_infinite() && upper.is_infinite() && !interior.contains(&0.0) {
        interior.push(0.0);
    }
    interior.sort_by(f64::total_cmp);
    interior.dedup();
    points.extend(interior);
    points.push(upper);

    let npieces = (points.len() - 1) as f64;
    let piece_tol = cfg.abs_tol / (npieces * factor);
    let mut total = Partial::default();
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let ea = End::from(interval.behavior_at(a));
        let eb = End::from(interval.behavior_at(b));
        let p = piece(f, a, b, ea, eb, piece_tol, cfg)?;
        total.add(p);
        if total.diverged {
            break;
        }
    }
    let value = factor * total.value;
    let err = factor * total.err;
    let tol = cfg.abs_tol.max(cfg.rel_tol * value.abs());
    Ok(QuadResult {
        value,
        abs_error_estimate: err,
        converged: !total.diverged && err <= tol.max(64.0 * f64::EPSILON * total.abs),
        diverged: total.diverged,
        evaluations: total.evaluations,
    })
}
