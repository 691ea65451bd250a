//! Piecewise-linear planar maps of Lozi type, max-type difference equations on the
//! positive reals, and the logarithmic change of variables that conjugates the two.
//!
//! The crate is organised around five concerns:
//!
//! * [`maps`]: state types, parameter families, steppers, and guarded orbit iteration
//!   in both `f64` and exact `BigRational` arithmetic;
//! * [`conjugation`]: the change of variables `w = log_A(z^q) + p`, derivation of
//!   max-equation parameters from a generalized piecewise-linear recurrence, and the
//!   classification of which equation families a recurrence is conjugate to;
//! * [`analysis`]: equilibria, two-cycles, cycle stability (eigenvalues and the
//!   Schur-Cohn test), period detection, closed-form solutions at the two
//!   half-coefficient parameter points, and divergence classification for one
//!   explicitly solvable family;
//! * [`region`]: exact rational polygon geometry used to certify invariant regions
//!   and square-to-square transition claims for the `a = b = 1/2` map;
//! * [`attractor`]: trapping-triangle and attractor-existence checks, point-cloud
//!   sampling, box counting, and Hausdorff distances between clouds.

pub mod analysis;
pub mod attractor;
pub mod conjugation;
pub mod maps;
pub mod region;
