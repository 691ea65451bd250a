//! The logarithmic change of variables linking generalized piecewise-linear
//! recurrences to max-type equations on the positive reals.
//!
//! Substituting `w = log_A(z^q) + p` into `w_{n+1} = alpha|w_n| + beta w_n + gamma w_{n-1} + delta`
//! turns the recurrence into
//! `z_{n+1} = c * max{z_n^k, M} / (z_n^l * z_{n-1}^m)` with
//! `k = 2 alpha`, `l = alpha - beta`, `m = -gamma`, `M = A^(-2 alpha p / q)`, and
//! `c = A^((p (alpha + beta + gamma - 1) + delta) / q)`. The substitution is
//! admissible when `A > 1` and `alpha/q > 0`, or `0 < A < 1` and `alpha/q < 0`.

use thiserror::Error;

use crate::maps::{gen_lozi_step, max_eq_step, GeneralizedLoziParams, MaxEqParams, PlanarPoint, Point};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConjugationError {
    #[error("invalid change of variables: {0}")]
    InvalidChange(String),
    #[error("change of variables is incompatible with the sign of alpha")]
    IncompatibleChange,
    #[error("forward change requires a positive argument")]
    NonPositiveArgument,
}

/// The change of variables `w = log_base(z^scale) + shift`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeOfVariables {
    pub base: f64,
    pub shift: f64,
    pub scale: f64,
}

impl ChangeOfVariables {
    pub fn new(base: f64, shift: f64, scale: f64) -> Result<Self, ConjugationError> {
        if !(base > 0.0) || base == 1.0 || !base.is_finite() {
            return Err(ConjugationError::InvalidChange(
                "base must be positive, finite, and different from 1".into(),
            ));
        }
        if scale == 0.0 || !scale.is_finite() || !shift.is_finite() {
            return Err(ConjugationError::InvalidChange(
                "scale must be nonzero and shift finite".into(),
            ));
        }
        Ok(ChangeOfVariables { base, shift, scale })
    }

    /// `z -> log_base(z^scale) + shift`; defined for `z > 0`.
    pub fn forward(&self, z: f64) -> Result<f64, ConjugationError> {
        if !(z > 0.0) {
            return Err(ConjugationError::NonPositiveArgument);
        }
        Ok(self.scale * z.ln() / self.base.ln() + self.shift)
    }

    /// `w -> base^((w - shift)/scale)`, the inverse of [`forward`](Self::forward).
    pub fn inverse(&self, w: f64) -> f64 {
        self.base.powf((w - self.shift) / self.scale)
    }

    /// Coordinatewise forward change of a positive planar state.
    pub fn forward_point(&self, z: &PlanarPoint) -> Result<PlanarPoint, ConjugationError> {
        Ok(Point::new(self.forward(z.x)?, self.forward(z.y)?))
    }

    pub fn inverse_point(&self, w: &PlanarPoint) -> PlanarPoint {
        Point::new(self.inverse(w.x), self.inverse(w.y))
    }

    /// Admissibility against the leading coefficient of the recurrence.
    pub fn compatible_with(&self, alpha: f64) -> bool {
        let ratio = alpha / self.scale;
        (self.base > 1.0 && ratio > 0.0) || (self.base < 1.0 && ratio < 0.0)
    }
}

/// Derives the max-equation parameters produced by an admissible change of variables.
pub fn derive_max_params(
    gl: &GeneralizedLoziParams<f64>,
    cov: &ChangeOfVariables,
) -> Result<MaxEqParams<f64>, ConjugationError> {
    if !cov.compatible_with(gl.alpha) {
        return Err(ConjugationError::IncompatibleChange);
    }
    let sum1 = gl.alpha + gl.beta + gl.gamma - 1.0;
    let m_const = cov.base.powf(-2.0 * gl.alpha * cov.shift / cov.scale);
    let c = cov.base.powf((cov.shift * sum1 + gl.delta) / cov.scale);
    MaxEqParams::new(2.0 * gl.alpha, gl.alpha - gl.beta, -gl.gamma, m_const, c)
        .map_err(|e| ConjugationError::InvalidChange(e.to_string()))
}

/// Which one-parameter family of max-type equations a recurrence is conjugate to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyCase {
    /// `delta = 0`: conjugate to `max{z^k, B} / (z^l z'^m) * B^((alpha+beta+gamma-1)/(-2 alpha))` for every `B > 0`.
    Delta0AnyB,
    /// `delta = 0` and `alpha + beta + gamma = 1`: conjugate with `c = 1` for every `B > 0`.
    Delta0Sum1AnyB,
    /// `delta/(alpha+beta+gamma-1) > 0`: conjugate with `c = 1` for every `B > 1`.
    RatioPosBGt1,
    /// `delta/(alpha+beta+gamma-1) < 0`: conjugate with `c = 1` for every `0 < B < 1`.
    RatioNegCLt1,
    /// `alpha + beta + gamma = 1`, `delta/alpha > 0`: conjugate with `M = 1` for every scale `C > 1`.
    Sum1ScaleBGt1,
    /// `alpha + beta + gamma = 1`, `delta/alpha < 0`: conjugate with `M = 1` for every `0 < C < 1`.
    Sum1ScaleCLt1,
    /// Fallback for non-finite parameters; never produced for finite input.
    General,
}

impl FamilyCase {
    pub fn tag(&self) -> &'static str {
        match self {
            FamilyCase::Delta0AnyB => "DELTA0_ANY_B",
            FamilyCase::Delta0Sum1AnyB => "DELTA0_SUM1_ANY_B",
            FamilyCase::RatioPosBGt1 => "RATIO_POS_B_GT_1",
            FamilyCase::RatioNegCLt1 => "RATIO_NEG_C_LT_1",
            FamilyCase::Sum1ScaleBGt1 => "SUM1_SCALE_B_GT_1",
            FamilyCase::Sum1ScaleCLt1 => "SUM1_SCALE_C_LT_1",
            FamilyCase::General => "GENERAL",
        }
    }
}

/// Classifies a recurrence by `(delta, alpha + beta + gamma - 1)`.
pub fn classify_family(gl: &GeneralizedLoziParams<f64>) -> FamilyCase {
    let sum1 = gl.alpha + gl.beta + gl.gamma - 1.0;
    if !sum1.is_finite() || !gl.delta.is_finite() || !gl.alpha.is_finite() {
        return FamilyCase::General;
    }
    if gl.delta == 0.0 {
        if sum1 == 0.0 {
            FamilyCase::Delta0Sum1AnyB
        } else {
            FamilyCase::Delta0AnyB
        }
    } else if sum1 != 0.0 {
        if gl.delta / sum1 > 0.0 {
            FamilyCase::RatioPosBGt1
        } else {
            FamilyCase::RatioNegCLt1
        }
    } else if gl.delta / gl.alpha > 0.0 {
        FamilyCase::Sum1ScaleBGt1
    } else {
        FamilyCase::Sum1ScaleCLt1
    }
}

/// The default change of variables: base 2, scale `sign(alpha)`, and the shift
/// that normalises the scale factor to 1 whenever `alpha + beta + gamma != 1`.
pub fn canonical_cov(gl: &GeneralizedLoziParams<f64>) -> ChangeOfVariables {
    let scale = if gl.alpha > 0.0 { 1.0 } else { -1.0 };
    let sum1 = gl.alpha + gl.beta + gl.gamma - 1.0;
    let shift = if gl.delta == 0.0 || sum1 == 0.0 {
        0.0
    } else {
        -gl.delta / sum1
    };
    ChangeOfVariables {
        base: 2.0,
        shift,
        scale,
    }
}

/// Sup-norm defect of the conjugacy square at one positive state:
/// `|forward(maxeq_step(z)) - gen_step(forward(z))|`.
pub fn conjugacy_residual(
    gl: &GeneralizedLoziParams<f64>,
    mp: &MaxEqParams<f64>,
    cov: &ChangeOfVariables,
    point: &PlanarPoint,
) -> Result<f64, ConjugationError> {
    let image = max_eq_step(mp, point).map_err(|_| ConjugationError::NonPositiveArgument)?;
    let lhs = cov.forward_point(&image)?;
    let rhs = gen_lozi_step(gl, &cov.forward_point(point)?);
    Ok(lhs.sup_distance(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gl(a: f64, b: f64, g: f64, d: f64) -> GeneralizedLoziParams<f64> {
        GeneralizedLoziParams::new(a, b, g, d).unwrap()
    }

    #[test]
    fn derive_sum_one_family() {
        let cov = ChangeOfVariables::new(2.0, 0.0, 1.0).unwrap();
        let mp = derive_max_params(&gl(1.5, 0.5, -1.0, 0.0), &cov).unwrap();
        assert_eq!(mp.k, 3.0);
        assert_eq!(mp.l, 1.0);
        assert_eq!(mp.m, 1.0);
        assert_eq!(mp.m_const, 1.0);
        assert_eq!(mp.c, 1.0);
    }

    #[test]
    fn derive_delta_one_family() {
        let cov = ChangeOfVariables::new(2.0, 0.0, 1.0).unwrap();
        let mp = derive_max_params(&gl(0.5, -0.5, -2.0, 1.0), &cov).unwrap();
        assert_eq!(mp.k, 1.0);
        assert_eq!(mp.l, 1.0);
        assert_eq!(mp.m, 2.0);
        assert_eq!(mp.m_const, 1.0);
        assert_eq!(mp.c, 2.0);
    }

    #[test]
    fn derive_negative_alpha_with_negative_scale() {
        // w = 1 - log_e(z); exponents halve and flip sign
        let cov = ChangeOfVariables::new(std::f64::consts::E, 1.0, -1.0).unwrap();
        let params = gl(-0.5, 0.0, 0.5, 1.0);
        assert!(cov.compatible_with(params.alpha));
        let mp = derive_max_params(&params, &cov).unwrap();
        assert_eq!(mp.k, -1.0);
        assert_eq!(mp.l, -0.5);
        assert_eq!(mp.m, -0.5);
        assert!((mp.m_const - (-1.0f64).exp()).abs() < 1e-15);
        assert!((mp.c - 1.0).abs() < 1e-15);
        // the derived parameters are the ones that actually close the conjugacy square
        for &(x, y) in &[(1.0, 1.0), (7.389056098930650, 2.718281828459045), (0.2, 3.7)] {
            let r = conjugacy_residual(&params, &mp, &cov, &Point::new(x, y)).unwrap();
            assert!(r < 1e-9, "residual {r} at ({x}, {y})");
        }
    }

    #[test]
    fn incompatible_change_is_rejected() {
        let cov = ChangeOfVariables::new(2.0, 0.0, 1.0).unwrap();
        assert_eq!(
            derive_max_params(&gl(-0.5, 0.0, 0.5, 1.0), &cov).unwrap_err(),
            ConjugationError::IncompatibleChange
        );
        let cov_small = ChangeOfVariables::new(0.5, 0.0, 1.0).unwrap();
        assert_eq!(
            derive_max_params(&gl(1.5, 0.5, -1.0, 0.0), &cov_small).unwrap_err(),
            ConjugationError::IncompatibleChange
        );
    }

    #[test]
    fn forward_inverse_round_trip() {
        let cov = ChangeOfVariables::new(2.0, -1.0, 2.0).unwrap();
        for &z in &[1e-3, 0.5, 1.0, 42.0, 9e2] {
            let w = cov.forward(z).unwrap();
            assert!((cov.inverse(w) - z).abs() <= 1e-12 * z);
        }
        assert_eq!(cov.forward(0.0).unwrap_err(), ConjugationError::NonPositiveArgument);
    }

    #[test]
    fn classification_covers_the_stated_cases() {
        assert_eq!(classify_family(&gl(1.5, 0.5, -1.0, 0.0)), FamilyCase::Delta0Sum1AnyB);
        assert_eq!(classify_family(&gl(1.0, 0.0, -0.5, 0.0)), FamilyCase::Delta0AnyB);
        assert_eq!(classify_family(&gl(1.0, 0.0, -1.0, -1.0)), FamilyCase::RatioPosBGt1);
        assert_eq!(classify_family(&gl(1.0, 0.0, -1.0, 1.0)), FamilyCase::RatioNegCLt1);
        assert_eq!(classify_family(&gl(0.5, 0.0, 0.5, 1.0)), FamilyCase::Sum1ScaleBGt1);
        assert_eq!(classify_family(&gl(-0.5, 0.0, 1.5, 1.0)), FamilyCase::Sum1ScaleCLt1);
        assert_eq!(classify_family(&gl(f64::NAN, 0.0, 0.0, 0.0)), FamilyCase::General);
    }

    #[test]
    fn classification_is_consistent_with_canonical_derivation() {
        // RatioPos with B > 1, c = 1
        let params = gl(1.0, 0.0, -1.0, -1.0);
        let cov = canonical_cov(&params);
        let mp = derive_max_params(&params, &cov).unwrap();
        assert_eq!(mp.m_const, 4.0);
        assert_eq!(mp.c, 1.0);
        assert_eq!(classify_family(&params), FamilyCase::RatioPosBGt1);

        // Sum1 with M = 1, 0 < c < 1
        let params = gl(-0.5, 0.0, 1.5, 1.0);
        let cov = canonical_cov(&params);
        let mp = derive_max_params(&params, &cov).unwrap();
        assert_eq!(mp.m_const, 1.0);
        assert_eq!(mp.c, 0.5);
    }

    #[test]
    fn canonical_cov_is_always_admissible() {
        for &(a, b, g, d) in &[
            (1.5, 0.5, -1.0, 0.0),
            (-0.5, 0.0, 0.5, 1.0),
            (1.0, 0.0, -1.0, -1.0),
            (-2.0, 1.0, 3.0, -4.0),
        ] {
            let params = gl(a, b, g, d);
            let cov = canonical_cov(&params);
            assert!(cov.compatible_with(a), "({a}, {b}, {g}, {d})");
            assert!(derive_max_params(&params, &cov).is_ok());
        }
    }

    #[test]
    fn residual_vanishes_for_derived_parameters() {
        let params = gl(-0.5, 0.0, 0.5, 1.0);
        let cov = canonical_cov(&params);
        let mp = derive_max_params(&params, &cov).unwrap();
        for &(x, y) in &[(0.5, 0.5), (2.0, 0.25), (1.0, 4.0), (1e-3, 1e3)] {
            let r = conjugacy_residual(&params, &mp, &cov, &Point::new(x, y)).unwrap();
            assert!(r < 1e-9, "residual {r} at ({x}, {y})");
        }
    }

    #[test]
    fn orbit_transport_commutes_for_the_half_family() {
        // contractive family: orbits converge to a two-cycle, so rounding stays tame
        let params = gl(-0.5, 0.0, 0.5, 1.0);
        let cov = canonical_cov(&params);
        let mp = derive_max_params(&params, &cov).unwrap();
        let w0 = Point::new(0.3, 0.4);
        let z0 = cov.inverse_point(&w0);

        let mut w = w0.clone();
        let mut z = z0;
        for step in 0..100 {
            w = gen_lozi_step(&params, &w);
            z = max_eq_step(&mp, &z).unwrap();
            let back = cov.forward_point(&z).unwrap();
            assert!(back.sup_distance(&w) < 1e-7, "step {step}");
        }
    }
}
