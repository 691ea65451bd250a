//! State types, map families, and guarded orbit iteration.
//!
//! Planar states follow the `(previous, current)` convention: the state `(x, y)`
//! of a second-order scalar recurrence holds `x = x_{n-1}` and `y = x_n`, matching
//! the third Lozi formulation `F(x, y) = (y, 1 - a|y| + b x)`.

use std::fmt;
use std::io;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Default magnitude guard for floating-point iteration.
pub const DEFAULT_GUARD: f64 = 1e12;

/// A planar state over any scalar type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

pub type PlanarPoint = Point<f64>;
pub type RationalPoint = Point<BigRational>;

impl<T> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }
}

impl PlanarPoint {
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Sup-norm distance to another point.
    pub fn sup_distance(&self, other: &PlanarPoint) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }
}

impl RationalPoint {
    pub fn from_integers(x: i64, y: i64) -> Self {
        Point::new(
            BigRational::from_integer(BigInt::from(x)),
            BigRational::from_integer(BigInt::from(y)),
        )
    }

    /// Nearest `f64` image of the point, for hand-off to floating analysis.
    pub fn to_f64(&self) -> PlanarPoint {
        Point::new(
            self.x.to_f64().unwrap_or(f64::NAN),
            self.y.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl<T: fmt::Display> fmt::Display for Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// The three standard planar formulations of the Lozi recurrence.
///
/// All three are conjugate for `b != 0`; see [`formulation_transport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// `F(x, y) = (1 - a|x| + y, b x)`
    Sys1,
    /// `F(x, y) = (1 - a|x| + b y, x)`
    Sys2,
    /// `F(x, y) = (y, 1 - a|y| + b x)`
    Sys3,
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formulation::Sys1 => write!(f, "sys1"),
            Formulation::Sys2 => write!(f, "sys2"),
            Formulation::Sys3 => write!(f, "sys3"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MapError {
    #[error("max-type equations are defined on positive states only")]
    NonPositiveState,
    #[error("transport between these formulations requires b != 0")]
    ZeroCoupling,
    #[error("exact max-type stepping requires integer exponents")]
    NonIntegerExponent,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Parameters `(a, b)` of the Lozi map.
#[derive(Debug, Clone, PartialEq)]
pub struct LoziParams<T = f64> {
    pub a: T,
    pub b: T,
}

impl<T> LoziParams<T> {
    pub fn new(a: T, b: T) -> Self {
        LoziParams { a, b }
    }
}

impl<T: Clone> LoziParams<T> {
    /// The `a = b` one-parameter family used throughout the region analysis.
    pub fn symmetric(a: T) -> Self {
        LoziParams { a: a.clone(), b: a }
    }
}

/// Parameters of the generalized recurrence `x_{n+1} = alpha |x_n| + beta x_n + gamma x_{n-1} + delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedLoziParams<T = f64> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub delta: T,
}

impl<T: Zero + PartialEq> GeneralizedLoziParams<T> {
    /// Builds the parameter tuple, rejecting `alpha = 0` (the recurrence would be linear).
    pub fn new(alpha: T, beta: T, gamma: T, delta: T) -> Result<Self, MapError> {
        if alpha.is_zero() {
            return Err(MapError::InvalidParameter("alpha must be nonzero".into()));
        }
        Ok(GeneralizedLoziParams {
            alpha,
            beta,
            gamma,
            delta,
        })
    }
}

impl GeneralizedLoziParams<f64> {
    /// The Lozi map `x_{n+1} = 1 - a|x_n| + b x_{n-1}` as a generalized recurrence.
    pub fn from_lozi(a: f64, b: f64) -> Self {
        GeneralizedLoziParams {
            alpha: -a,
            beta: 0.0,
            gamma: b,
            delta: 1.0,
        }
    }
}

/// Parameters of the max-type equation
/// `z_{n+1} = c * max{z_n^k, m_const} / (z_n^l * z_{n-1}^m)` on positive states.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxEqParams<T = f64> {
    pub k: T,
    pub l: T,
    pub m: T,
    /// The constant inside the max; must be positive.
    pub m_const: T,
    /// The outer scale factor; must be positive.
    pub c: T,
}

impl<T: Zero + PartialOrd> MaxEqParams<T> {
    pub fn new(k: T, l: T, m: T, m_const: T, c: T) -> Result<Self, MapError> {
        if m_const <= T::zero() || c <= T::zero() {
            return Err(MapError::InvalidParameter(
                "max-equation constants m_const and c must be positive".into(),
            ));
        }
        Ok(MaxEqParams { k, l, m, m_const, c })
    }
}

/// `max{z, -z}`, the absolute value used by every piecewise-linear stepper.
fn abs_max<T>(z: T) -> T
where
    T: Clone + PartialOrd + std::ops::Neg<Output = T>,
{
    let n = -z.clone();
    if n > z {
        n
    } else {
        z
    }
}

fn lozi_step_generic<T>(params: &LoziParams<T>, formulation: Formulation, state: &Point<T>) -> Point<T>
where
    T: Clone
        + PartialOrd
        + Zero
        + One
        + std::ops::Neg<Output = T>
        + std::ops::Sub<Output = T>
        + std::ops::Mul<Output = T>
        + std::ops::Add<Output = T>,
{
    let a = params.a.clone();
    let b = params.b.clone();
    let one = T::one();
    match formulation {
        Formulation::Sys1 => Point::new(
            one - a * abs_max(state.x.clone()) + state.y.clone(),
            b * state.x.clone(),
        ),
        Formulation::Sys2 => Point::new(
            one - a * abs_max(state.x.clone()) + b * state.y.clone(),
            state.x.clone(),
        ),
        Formulation::Sys3 => Point::new(
            state.y.clone(),
            one - a * abs_max(state.y.clone()) + b * state.x.clone(),
        ),
    }
}

fn gen_lozi_step_generic<T>(params: &GeneralizedLoziParams<T>, state: &Point<T>) -> Point<T>
where
    T: Clone
        + PartialOrd
        + std::ops::Neg<Output = T>
        + std::ops::Mul<Output = T>
        + std::ops::Add<Output = T>,
{
    let y = state.y.clone();
    let next = params.alpha.clone() * abs_max(y.clone())
        + params.beta.clone() * y.clone()
        + params.gamma.clone() * state.x.clone()
        + params.delta.clone();
    Point::new(y, next)
}

/// One step of the Lozi map in the chosen formulation.
pub fn lozi_step(params: &LoziParams<f64>, formulation: Formulation, state: &PlanarPoint) -> PlanarPoint {
    lozi_step_generic(params, formulation, state)
}

/// One step of the generalized recurrence as a planar map `(x, y) -> (y, alpha|y| + beta y + gamma x + delta)`.
pub fn gen_lozi_step(params: &GeneralizedLoziParams<f64>, state: &PlanarPoint) -> PlanarPoint {
    gen_lozi_step_generic(params, state)
}

/// One step of the max-type equation. States must be strictly positive.
pub fn max_eq_step(params: &MaxEqParams<f64>, state: &PlanarPoint) -> Result<PlanarPoint, MapError> {
    if state.x <= 0.0 || state.y <= 0.0 {
        return Err(MapError::NonPositiveState);
    }
    let num = state.y.powf(params.k).max(params.m_const);
    let den = state.y.powf(params.l) * state.x.powf(params.m);
    Ok(Point::new(state.y, params.c * num / den))
}

fn rational_is_integer(r: &BigRational) -> bool {
    r.denom().is_one()
}

fn rational_pow(base: &BigRational, exp: &BigRational) -> Result<BigRational, MapError> {
    if !rational_is_integer(exp) {
        return Err(MapError::NonIntegerExponent);
    }
    let e = exp
        .numer()
        .to_i32()
        .ok_or_else(|| MapError::InvalidParameter("exponent out of range".into()))?;
    if base.is_zero() && e < 0 {
        return Err(MapError::NonPositiveState);
    }
    Ok(num_traits::pow::Pow::pow(base.clone(), e))
}

/// Exact-rational step of the max-type equation; exponents must be integers.
pub fn max_eq_step_exact(
    params: &MaxEqParams<BigRational>,
    state: &RationalPoint,
) -> Result<RationalPoint, MapError> {
    let zero = BigRational::zero();
    if state.x <= zero || state.y <= zero {
        return Err(MapError::NonPositiveState);
    }
    let yk = rational_pow(&state.y, &params.k)?;
    let num = if yk >= params.m_const { yk } else { params.m_const.clone() };
    let den = rational_pow(&state.y, &params.l)? * rational_pow(&state.x, &params.m)?;
    Ok(Point::new(state.y.clone(), params.c.clone() * num / den))
}

/// Transports a state of one Lozi formulation onto another through the
/// conjugating homeomorphisms `(x, y) -> (x, y/b)` and `(x, y) -> (y, x)`.
pub fn formulation_transport(
    point: &PlanarPoint,
    from: Formulation,
    to: Formulation,
    b: f64,
) -> Result<PlanarPoint, MapError> {
    use Formulation::*;
    let needs_b = matches!(
        (from, to),
        (Sys1, Sys2) | (Sys2, Sys1) | (Sys1, Sys3) | (Sys3, Sys1)
    );
    if needs_b && b == 0.0 {
        return Err(MapError::ZeroCoupling);
    }
    let p = point.clone();
    Ok(match (from, to) {
        (f, t) if f == t => p,
        (Sys1, Sys2) => Point::new(p.x, p.y / b),
        (Sys2, Sys1) => Point::new(p.x, p.y * b),
        (Sys2, Sys3) | (Sys3, Sys2) => Point::new(p.y, p.x),
        (Sys1, Sys3) => Point::new(p.y / b, p.x),
        (Sys3, Sys1) => Point::new(p.y, p.x * b),
        _ => unreachable!(),
    })
}

/// Exact-rational formulation transport.
pub fn formulation_transport_exact(
    point: &RationalPoint,
    from: Formulation,
    to: Formulation,
    b: &BigRational,
) -> Result<RationalPoint, MapError> {
    use Formulation::*;
    let needs_b = matches!(
        (from, to),
        (Sys1, Sys2) | (Sys2, Sys1) | (Sys1, Sys3) | (Sys3, Sys1)
    );
    if needs_b && b.is_zero() {
        return Err(MapError::ZeroCoupling);
    }
    let p = point.clone();
    Ok(match (from, to) {
        (f, t) if f == t => p,
        (Sys1, Sys2) => Point::new(p.x, p.y / b),
        (Sys2, Sys1) => Point::new(p.x, p.y * b),
        (Sys2, Sys3) | (Sys3, Sys2) => Point::new(p.y, p.x),
        (Sys1, Sys3) => Point::new(p.y / b, p.x),
        (Sys3, Sys1) => Point::new(p.y, p.x * b),
        _ => unreachable!(),
    })
}

/// A map family together with its parameters; the uniform stepper used by orbits,
/// attractor sampling, and the CLI.
#[derive(Debug, Clone, PartialEq)]
pub enum System<T = f64> {
    Lozi {
        params: LoziParams<T>,
        formulation: Formulation,
    },
    GenLozi(GeneralizedLoziParams<T>),
    MaxEq(MaxEqParams<T>),
}

impl System<f64> {
    pub fn lozi3(a: f64, b: f64) -> Self {
        System::Lozi {
            params: LoziParams::new(a, b),
            formulation: Formulation::Sys3,
        }
    }

    pub fn step(&self, state: &PlanarPoint) -> Result<PlanarPoint, MapError> {
        match self {
            System::Lozi { params, formulation } => Ok(lozi_step(params, *formulation, state)),
            System::GenLozi(p) => Ok(gen_lozi_step(p, state)),
            System::MaxEq(p) => max_eq_step(p, state),
        }
    }

    /// Iterates up to `steps` times, stopping early when a coordinate magnitude
    /// exceeds `guard` or a stepper reports a domain error. Overflow to a
    /// non-finite value counts as exceeding the guard; the non-finite state is
    /// discarded rather than stored.
    pub fn iterate(&self, initial: PlanarPoint, steps: usize, guard: f64) -> Orbit<f64> {
        let mut points = Vec::with_capacity(steps + 1);
        if !initial.is_finite() || exceeds_guard(&initial, guard) {
            let termination = if initial.is_finite() {
                points.push(initial);
                Termination::DivergenceGuard { step: 0 }
            } else {
                Termination::DivergenceGuard { step: 0 }
            };
            return Orbit { points, termination };
        }
        points.push(initial);
        for s in 1..=steps {
            let next = match self.step(points.last().expect("orbit is nonempty")) {
                Ok(p) => p,
                Err(_) => {
                    return Orbit {
                        points,
                        termination: Termination::DomainError { step: s },
                    }
                }
            };
            if !next.is_finite() {
                return Orbit {
                    points,
                    termination: Termination::DivergenceGuard { step: s },
                };
            }
            let tripped = exceeds_guard(&next, guard);
            points.push(next);
            if tripped {
                return Orbit {
                    points,
                    termination: Termination::DivergenceGuard { step: s },
                };
            }
        }
        Orbit {
            points,
            termination: Termination::Completed,
        }
    }
}

impl System<BigRational> {
    pub fn lozi3_exact(a: BigRational, b: BigRational) -> Self {
        System::Lozi {
            params: LoziParams::new(a, b),
            formulation: Formulation::Sys3,
        }
    }

    pub fn step(&self, state: &RationalPoint) -> Result<RationalPoint, MapError> {
        match self {
            System::Lozi { params, formulation } => {
                Ok(lozi_step_generic(params, *formulation, state))
            }
            System::GenLozi(p) => Ok(gen_lozi_step_generic(p, state)),
            System::MaxEq(p) => max_eq_step_exact(p, state),
        }
    }

    /// Exact iteration never rounds and carries no magnitude guard.
    pub fn iterate(&self, initial: RationalPoint, steps: usize) -> Orbit<BigRational> {
        let mut points = Vec::with_capacity(steps + 1);
        points.push(initial);
        for s in 1..=steps {
            match self.step(points.last().expect("orbit is nonempty")) {
                Ok(p) => points.push(p),
                Err(_) => {
                    return Orbit {
                        points,
                        termination: Termination::DomainError { step: s },
                    }
                }
            }
        }
        Orbit {
            points,
            termination: Termination::Completed,
        }
    }
}

fn exceeds_guard(p: &PlanarPoint, guard: f64) -> bool {
    p.x.abs().max(p.y.abs()) > guard
}

/// Why iteration stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Termination {
    Completed,
    /// The state at `step` exceeded the guard (or overflowed; see [`System::iterate`]).
    DivergenceGuard { step: usize },
    /// Producing the state at `step` failed; the last stored state has index `step - 1`.
    DomainError { step: usize },
}

/// A stored trajectory. `points[0]` is always the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit<T> {
    pub points: Vec<Point<T>>,
    pub termination: Termination,
}

impl<T> Orbit<T> {
    pub fn initial(&self) -> &Point<T> {
        &self.points[0]
    }

    pub fn completed(&self) -> bool {
        self.termination == Termination::Completed
    }
}

/// Formats a float with 17 significant digits, enough to round-trip any `f64`.
pub fn format_float_17(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Writes an orbit as CSV with header `n,x,y`, floats at 17 significant digits, LF endings.
pub fn write_float_orbit_csv<W: io::Write>(mut w: W, orbit: &Orbit<f64>) -> io::Result<()> {
    w.write_all(b"n,x,y\n")?;
    for (n, p) in orbit.points.iter().enumerate() {
        writeln!(w, "{},{},{}", n, format_float_17(p.x), format_float_17(p.y))?;
    }
    Ok(())
}

/// Writes an exact orbit as CSV with header `n,x,y` and rationals in `num/den` form.
pub fn write_exact_orbit_csv<W: io::Write>(mut w: W, orbit: &Orbit<BigRational>) -> io::Result<()> {
    w.write_all(b"n,x,y\n")?;
    for (n, p) in orbit.points.iter().enumerate() {
        writeln!(w, "{},{},{}", n, p.x, p.y)?;
    }
    Ok(())
}
