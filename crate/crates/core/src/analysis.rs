//! Equilibria, cycles, stability, period detection, and the closed-form
//! solutions available at the two half-coefficient parameter points.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::conjugation::{canonical_cov, ChangeOfVariables};
use crate::maps::{
    GeneralizedLoziParams, LoziParams, Orbit, PlanarPoint, Point, System, Termination,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AnalysisError {
    #[error("cycle passes through the switching line y = 0 where the map is not differentiable")]
    NonSmoothCycle,
    #[error("orbit diverged during burn-in at step {step}")]
    Diverged { step: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Solution set of the scalar fixed-point equation.
///
/// Half-lines are interpreted inside the map's natural domain, so for max-type
/// equations `HalfLineBelow { max }` means the interval `(0, max]`.
#[derive(Debug, Clone, PartialEq)]
pub enum EquilibriumSet {
    /// Finitely many equilibria, sorted ascending, duplicate-free.
    Finite(Vec<f64>),
    /// Every `x >= min` is an equilibrium.
    HalfLine { min: f64 },
    /// Every `x <= max` (within the domain) is an equilibrium.
    HalfLineBelow { max: f64 },
}

/// Equilibria of the scalar recurrence behind a system.
///
/// For Lozi parameters the result follows the `a = b` formulas when they apply
/// and the branchwise solve in general; max-type equations are transported
/// through the canonical change of variables.
pub fn equilibria(system: &System<f64>) -> Result<EquilibriumSet, AnalysisError> {
    match system {
        System::Lozi { params, .. } => {
            gen_lozi_equilibria(&GeneralizedLoziParams::from_lozi(params.a, params.b))
        }
        System::GenLozi(p) => gen_lozi_equilibria(p),
        System::MaxEq(p) => max_eq_equilibria(p),
    }
}

/// Branchwise equilibria of `x = alpha|x| + beta x + gamma x + delta`.
pub fn gen_lozi_equilibria(gl: &GeneralizedLoziParams<f64>) -> Result<EquilibriumSet, AnalysisError> {
    // x >= 0 branch: x (1 - alpha - beta - gamma) = delta
    let coeff_up = 1.0 - (gl.alpha + gl.beta + gl.gamma);
    // x <= 0 branch: x (1 + alpha - beta - gamma) = delta
    let coeff_down = 1.0 - (gl.beta + gl.gamma - gl.alpha);
    if coeff_up == 0.0 && gl.delta == 0.0 {
        return Ok(EquilibriumSet::HalfLine { min: 0.0 });
    }
    if coeff_down == 0.0 && gl.delta == 0.0 {
        return Ok(EquilibriumSet::HalfLineBelow { max: 0.0 });
    }
    let mut roots = Vec::new();
    if coeff_up != 0.0 {
        let r = gl.delta / coeff_up;
        if r >= 0.0 {
            roots.push(r);
        }
    }
    if coeff_down != 0.0 {
        let r = gl.delta / coeff_down;
        if r <= 0.0 {
            roots.push(r);
        }
    }
    roots.sort_by(|p, q| p.partial_cmp(q).expect("finite roots"));
    roots.dedup();
    Ok(EquilibriumSet::Finite(roots))
}

/// Equilibria of the `a = b` Lozi recurrence: `{1}` for `a <= 1/2`, and
/// additionally `1/(1 - 2a)` for `a > 1/2`.
pub fn lozi_ab_equilibria(a: f64) -> EquilibriumSet {
    gen_lozi_equilibria(&GeneralizedLoziParams::from_lozi(a, a))
        .expect("lozi specialization is total")
}

/// Equilibria of a max-type equation, transported from the conjugate recurrence.
pub fn max_eq_equilibria(mp: &crate::maps::MaxEqParams<f64>) -> Result<EquilibriumSet, AnalysisError> {
    if mp.k == 0.0 {
        return Err(AnalysisError::InvalidParameter(
            "transport requires k != 0 (the conjugate recurrence needs alpha != 0)".into(),
        ));
    }
    let alpha = mp.k / 2.0;
    let beta = alpha - mp.l;
    let gamma = -mp.m;
    let skeleton = GeneralizedLoziParams::new(alpha, beta, gamma, 0.0)
        .map_err(|e| AnalysisError::InvalidParameter(e.to_string()))?;
    let mut cov = canonical_cov(&skeleton);
    // choose the shift that reproduces m_const, then the delta that reproduces c
    cov.shift = -cov.scale * mp.m_const.ln() / (2.0 * alpha * cov.base.ln());
    let sum1 = alpha + beta + gamma - 1.0;
    let delta = cov.scale * mp.c.ln() / cov.base.ln() - cov.shift * sum1;
    let gl = GeneralizedLoziParams::new(alpha, beta, gamma, delta)
        .map_err(|e| AnalysisError::InvalidParameter(e.to_string()))?;
    let inner = gen_lozi_equilibria(&gl)?;
    Ok(transport_equilibria(inner, &cov))
}

fn transport_equilibria(set: EquilibriumSet, cov: &ChangeOfVariables) -> EquilibriumSet {
    // base > 1 throughout, so the inverse change is increasing exactly when scale > 0
    let increasing = cov.scale > 0.0;
    match set {
        EquilibriumSet::Finite(mut xs) => {
            for x in xs.iter_mut() {
                *x = cov.inverse(*x);
            }
            xs.sort_by(|p, q| p.partial_cmp(q).expect("finite transported roots"));
            EquilibriumSet::Finite(xs)
        }
        EquilibriumSet::HalfLine { min } => {
            if increasing {
                EquilibriumSet::HalfLine { min: cov.inverse(min) }
            } else {
                EquilibriumSet::HalfLineBelow { max: cov.inverse(min) }
            }
        }
        EquilibriumSet::HalfLineBelow { max } => {
            if increasing {
                EquilibriumSet::HalfLineBelow { max: cov.inverse(max) }
            } else {
                EquilibriumSet::HalfLine { min: cov.inverse(max) }
            }
        }
    }
}

/// A periodic orbit; `points.len() == period` and the points are in orbit order.
#[derive(Debug, Clone, PartialEq)]
pub struct Cycle<T = f64> {
    pub period: usize,
    pub points: Vec<Point<T>>,
}

impl<T> Cycle<T> {
    pub fn new(points: Vec<Point<T>>) -> Self {
        Cycle {
            period: points.len(),
            points,
        }
    }
}

/// The isolated two-cycle of the `a = b` Lozi map, present only for `a > 1/2`.
///
/// At `a = 1/2` exactly, two-cycles form a continuum and this returns empty;
/// see [`closed_form_solution`] for that regime.
pub fn two_cycles_lozi_ab(a: f64) -> Vec<Cycle<f64>> {
    if !(a > 0.5) {
        return Vec::new();
    }
    let den = 2.0 * a * a - 2.0 * a + 1.0;
    let p = Point::new(1.0 / den, (1.0 - 2.0 * a) / den);
    let q = Point::new(p.y, p.x);
    vec![Cycle::new(vec![p, q])]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityClass {
    AsymptoticallyStable,
    Unstable,
    Nonhyperbolic,
}

/// Eigenvalue data for the derivative of the return map along a cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// Ordered by descending real part, then descending imaginary part.
    pub eigenvalues: [Complex64; 2],
    pub spectral_radius: f64,
    pub classification: StabilityClass,
}

const HYPERBOLICITY_TOLERANCE: f64 = 1e-12;

/// Jacobian of `F(x, y) = (y, 1 - a|y| + b x)` off the switching line.
fn sys3_jacobian(params: &LoziParams<f64>, y: f64) -> [[f64; 2]; 2] {
    let slope = if y > 0.0 { -params.a } else { params.a };
    [[0.0, 1.0], [params.b, slope]]
}

fn mat_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn eigenvalues_2x2(m: [[f64; 2]; 2]) -> [Complex64; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = tr * tr - 4.0 * det;
    let mut ev = if disc >= 0.0 {
        let s = disc.sqrt();
        [
            Complex64::new((tr + s) / 2.0, 0.0),
            Complex64::new((tr - s) / 2.0, 0.0),
        ]
    } else {
        let s = (-disc).sqrt() / 2.0;
        [Complex64::new(tr / 2.0, s), Complex64::new(tr / 2.0, -s)]
    };
    ev.sort_by(|p, q| {
        q.re.partial_cmp(&p.re)
            .unwrap()
            .then(q.im.partial_cmp(&p.im).unwrap())
    });
    ev
}

/// Stability of a cycle of the third-formulation Lozi map: eigenvalues of the
/// product of per-point Jacobians in orbit order.
pub fn cycle_stability(
    params: &LoziParams<f64>,
    cycle: &Cycle<f64>,
) -> Result<StabilityReport, AnalysisError> {
    if cycle.points.is_empty() {
        return Err(AnalysisError::InvalidParameter("empty cycle".into()));
    }
    if cycle.points.iter().any(|p| p.y == 0.0) {
        return Err(AnalysisError::NonSmoothCycle);
    }
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    for p in &cycle.points {
        m = mat_mul(sys3_jacobian(params, p.y), m);
    }
    let eigenvalues = eigenvalues_2x2(m);
    let spectral_radius = eigenvalues[0].norm().max(eigenvalues[1].norm());
    let near_unit = eigenvalues
        .iter()
        .any(|l| (l.norm() - 1.0).abs() <= HYPERBOLICITY_TOLERANCE);
    let classification = if near_unit {
        StabilityClass::Nonhyperbolic
    } else if spectral_radius < 1.0 {
        StabilityClass::AsymptoticallyStable
    } else {
        StabilityClass::Unstable
    };
    Ok(StabilityReport {
        eigenvalues,
        spectral_radius,
        classification,
    })
}

/// Coefficients `(p1, p0)` of the characteristic polynomial
/// `t^2 + p1 t + p0` of the `a = b` two-cycle derivative.
pub fn two_cycle_char_poly(a: f64) -> (f64, f64) {
    (a * a - 2.0 * a, a * a)
}

/// Both roots of `t^2 + p1 t + p0` lie strictly inside the unit circle
/// iff `|p1| < 1 + p0 < 2`.
pub fn schur_cohn_quadratic_stable<T>(p1: &T, p0: &T) -> bool
where
    T: Signed + PartialOrd + Clone,
{
    let one = T::one();
    let edge = one.clone() + p0.clone();
    p1.abs() < edge && edge < one + one
}

/// Exact-rational Schur-Cohn verdict for the `a = b` two-cycle.
pub fn two_cycle_schur_cohn_exact(a: &BigRational) -> bool {
    let two = BigRational::from_integer(BigInt::from(2));
    let p1 = a * a - two * a;
    let p0 = a * a;
    schur_cohn_quadratic_stable(&p1, &p0)
}

/// How candidate periods are matched against the orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PeriodMode {
    /// States must repeat exactly over the whole stored orbit.
    Exact,
    /// States must repeat within the tolerance in sup norm over a trailing
    /// window of length `2p` for candidate period `p`.
    Tolerance(f64),
}

/// Minimal period of a stored orbit, if any candidate `p <= len/2` fits.
pub fn detect_period<T>(orbit: &Orbit<T>, mode: PeriodMode) -> Option<usize>
where
    T: Clone + PartialEq,
    Point<T>: PointDistance,
{
    let pts = &orbit.points;
    let n = pts.len();
    for p in 1..=n / 2 {
        let ok = match mode {
            PeriodMode::Exact => (0..n - p).all(|i| pts[i] == pts[i + p]),
            PeriodMode::Tolerance(eps) => {
                (n - 2 * p..n - p).all(|i| pts[i].point_distance(&pts[i + p]) <= eps)
            }
        };
        if ok {
            return Some(p);
        }
    }
    None
}

/// Sup-norm distance used by tolerance-mode period detection.
pub trait PointDistance {
    fn point_distance(&self, other: &Self) -> f64;
}

impl PointDistance for Point<f64> {
    fn point_distance(&self, other: &Self) -> f64 {
        self.sup_distance(other)
    }
}

impl PointDistance for Point<BigRational> {
    fn point_distance(&self, other: &Self) -> f64 {
        let dx = (&self.x - &other.x).abs();
        let dy = (&self.y - &other.y).abs();
        let d = if dx > dy { dx } else { dy };
        d.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// Burn-in iteration followed by period search; cycle points are averaged over
/// the trailing window to damp residual transients.
pub fn detect_asymptotic_cycle(
    system: &System<f64>,
    initial: PlanarPoint,
    burn: usize,
    window: usize,
    eps: f64,
    guard: f64,
) -> Result<Option<Cycle<f64>>, AnalysisError> {
    let orbit = system.iterate(initial, burn + window, guard);
    match orbit.termination {
        Termination::Completed => {}
        Termination::DivergenceGuard { step } | Termination::DomainError { step } => {
            return Err(AnalysisError::Diverged { step });
        }
    }
    let tail = Orbit {
        points: orbit.points[burn..].to_vec(),
        termination: Termination::Completed,
    };
    let Some(p) = detect_period(&tail, PeriodMode::Tolerance(eps)) else {
        return Ok(None);
    };
    let n = tail.points.len();
    let window_pts = &tail.points[n - 2 * p..];
    let mut averaged = Vec::with_capacity(p);
    for r in 0..p {
        let (mut sx, mut sy, mut count) = (0.0, 0.0, 0.0);
        let mut i = r;
        while i < window_pts.len() {
            sx += window_pts[i].x;
            sy += window_pts[i].y;
            count += 1.0;
            i += p;
        }
        averaged.push(Point::new(sx / count, sy / count));
    }
    Ok(Some(Cycle::new(averaged)))
}

/// Parameter points with explicit scalar solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormCase {
    /// `a = b = 1/2`
    AHalf,
    /// `a = b = -1/2`, valid while the orbit stays in the unit square scaled to `[0, 2]^2`
    AMinusHalf,
}

/// Scalar term `x_n` of the orbit through the state `(x, y) = (x_{-1}, x_0)`;
/// defined for `n >= -1`.
pub fn closed_form_solution(case: ClosedFormCase, initial: (f64, f64), n: i64) -> f64 {
    let (x, y) = initial;
    match case {
        ClosedFormCase::AHalf => {
            let alt = (2.0 * y - x - 1.0) / 3.0;
            let dec = (x + y - 2.0) / 3.0;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            alt * sign + dec * 0.5f64.powi(n as i32) + 1.0
        }
        ClosedFormCase::AMinusHalf => {
            let theta = 7.0f64.sqrt().atan();
            let t = (n + 1) as f64;
            let damp = 0.5f64.powf(t / 2.0);
            let osc = (x - 1.0) * (t * theta).cos()
                + ((y - 1.0) * 2.0f64.sqrt() / theta.sin() + (1.0 - x) / theta.tan())
                    * (t * theta).sin();
            damp * osc + 1.0
        }
    }
}

/// Exact closed form at `a = b = 1/2` for rational initial data.
pub fn closed_form_a_half_exact(x: &BigRational, y: &BigRational, n: u32) -> BigRational {
    let three = BigRational::from_integer(BigInt::from(3));
    let two = BigRational::from_integer(BigInt::from(2));
    let one = BigRational::one();
    let alt = (&two * y - x - &one) / &three;
    let dec = (x + y - &two) / &three;
    let sign = if n % 2 == 0 { one.clone() } else { -one.clone() };
    let half_pow = BigRational::new(BigInt::one(), BigInt::from(2).pow(n));
    alt * sign + dec * half_pow + one
}

/// Orbit classification for `x_{n+1} = (3/2)|x_n| + (1/2)x_n - x_{n-1}`:
/// either an equilibrium `(e, e)` with `e >= 0`, or divergent via one of six
/// initial-condition regions (ties resolved by the first matching case).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqLexClass {
    Equilibrium,
    Divergent(u8),
}

pub fn classify_eqlex_orbit(initial: &PlanarPoint) -> EqLexClass {
    let (u, v) = (initial.x, initial.y);
    if u == v && u >= 0.0 {
        return EqLexClass::Equilibrium;
    }
    let case = if 0.0 <= u && u < v {
        1
    } else if (u <= 0.0 && 0.0 < v) || (u < 0.0 && 0.0 <= v) {
        2
    } else if u <= v && v <= 0.0 {
        3
    } else if 0.0 <= v && v < u {
        4
    } else if v <= u && u <= 0.0 {
        5
    } else {
        6
    };
    EqLexClass::Divergent(case)
}

/// The recurrence behind [`classify_eqlex_orbit`] as a system.
pub fn eqlex_system() -> System<f64> {
    System::GenLozi(
        GeneralizedLoziParams::new(1.5, 0.5, -1.0, 0.0).expect("alpha is nonzero"),
    )
}
