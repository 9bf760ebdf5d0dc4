//! Generalized Hermite polynomials and functions.
//!
//! The polynomials `p_k` are orthonormal with positive leading coefficient in
//! the weighted space with weight |x|^{2 sigma}, and `phi_k = p_k exp(-s x^2/2)`
//! are the normalized eigenfunctions of the Dunkl harmonic oscillator.
//! Everything is evaluated pointwise by the three-term recursion; polynomial
//! coefficients are never stored because their magnitudes blow up while the
//! Gaussian-scaled values stay tame.

use crate::specfun::LogProduct;
use crate::{Error, Result};

/// Highest admitted index; beyond this, double-precision Gaussian underflow
/// dominates any computed value.
pub const MAX_INDEX: u32 = 10_000;

/// Weight exponent and oscillator scale fixing one basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisParams {
    pub sigma: f64,
    pub s: f64,
}

impl BasisParams {
    pub fn new(sigma: f64, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::Domain(format!("oscillator scale must be positive, got s = {s}")));
        }
        if !(sigma > -1.5) {
            return Err(Error::Domain(format!(
                "weight exponent must satisfy sigma > -3/2, got {sigma}"
            )));
        }
        Ok(Self { sigma, s })
    }

    /// Whether all indices are admissible. For sigma in (-3/2, -1/2] only the
    /// odd sector exists (obtained by conjugating the shifted even sector).
    pub fn full_basis(&self) -> bool {
        self.sigma > -0.5
    }

    fn check_index(&self, k: u32) -> Result<()> {
        if k > MAX_INDEX {
            return Err(Error::Domain(format!("index {k} exceeds cap {MAX_INDEX}")));
        }
        if !self.full_basis() && k % 2 == 0 {
            return Err(Error::Domain(format!(
                "sigma = {} admits only the odd sector, got even index {k}",
                self.sigma
            )));
        }
        Ok(())
    }
}

/// One evaluation of the basis at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteValue {
    pub k: u32,
    pub x: f64,
    pub p_value: f64,
    pub phi_value: f64,
}

fn seed_p0(params: &BasisParams) -> Result<f64> {
    // p_0 = s^{(2 sigma + 1)/4} Gamma(sigma + 1/2)^{-1/2}
    Ok(LogProduct::new()
        .pow(params.s, (2.0 * params.sigma + 1.0) / 4.0)?
        .gamma(params.sigma + 0.5, -0.5)?
        .value())
}

/// Evaluates `p_k(x)` and its derivative by one pass of the recursion.
fn recurse(params: &BasisParams, k: u32, x: f64) -> Result<(f64, f64)> {
    let (sigma, s) = (params.sigma, params.s);
    let sqrt_2s = (2.0 * s).sqrt();
    let mut p_prev = 0.0;
    let mut dp_prev = 0.0;
    let mut p = seed_p0(params)?;
    let mut dp = 0.0;
    for j in 1..=k {
        let jf = j as f64;
        let (norm, lower) = if j % 2 == 0 {
            (jf.sqrt(), (jf - 1.0 + 2.0 * sigma).sqrt())
        } else {
            ((jf + 2.0 * sigma).sqrt(), (jf - 1.0).sqrt())
        };
        let a = sqrt_2s / norm;
        let b = lower / norm;
        let p_next = a * x * p - b * p_prev;
        let dp_next = a * (p + x * dp) - b * dp_prev;
        p_prev = p;
        dp_prev = dp;
        p = p_next;
        dp = dp_next;
    }
    Ok((p, dp))
}

/// The generalized Hermite polynomial `p_k(x)`.
pub fn hermite_p(params: &BasisParams, k: u32, x: f64) -> Result<f64> {
    Ok(hermite_p_with_deriv(params, k, x)?.0)
}

/// `p_k(x)` together with `p_k'(x)`, the derivative obtained by
/// differentiating the recursion (finite differences are used only as a test
/// oracle).
pub fn hermite_p_with_deriv(params: &BasisParams, k: u32, x: f64) -> Result<(f64, f64)> {
    params.check_index(k)?;
    if params.full_basis() {
        recurse(params, k, x)
    } else {
        // Odd sector only: p_{sigma,k} = x p_{sigma+1,k-1}.
        let shifted = BasisParams::new(params.sigma + 1.0, params.s)?;
        let (p, dp) = recurse(&shifted, k - 1, x)?;
        Ok((x * p, p + x * dp))
    }
}

/// The normalized eigenfunction `phi_k(x) = p_k(x) exp(-s x^2 / 2)`.
pub fn phi(params: &BasisParams, k: u32, x: f64) -> Result<f64> {
    Ok(phi_with_deriv(params, k, x)?.0)
}

/// `phi_k(x)` and its derivative.
pub fn phi_with_deriv(params: &BasisParams, k: u32, x: f64) -> Result<(f64, f64)> {
    let (p, dp) = hermite_p_with_deriv(params, k, x)?;
    let gauss = (-params.s * x * x / 2.0).exp();
    Ok((p * gauss, (dp - params.s * x * p) * gauss))
}

/// Full evaluation record.
pub fn hermite_value(params: &BasisParams, k: u32, x: f64) -> Result<HermiteValue> {
    let (p, _) = hermite_p_with_deriv(params, k, x)?;
    Ok(HermiteValue { k, x, p_value: p, phi_value: p * (-params.s * x * x / 2.0).exp() })
}

/// Applies the Dunkl operator T to `phi_k` at x != 0: the plain derivative on
/// the even sector, derivative plus `2 sigma / x` times the function on the
/// odd sector.
pub fn dunkl_t_phi(params: &BasisParams, k: u32, x: f64) -> Result<f64> {
    let (v, dv) = phi_with_deriv(params, k, x)?;
    if k % 2 == 0 {
        Ok(dv)
    } else {
        Ok(dv + 2.0 * params.sigma * v / x)
    }
}

/// Which ladder operator the coefficient belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    /// B phi_k = kappa_k phi_{k-1}
    Annihilate,
    /// B' phi_{k-1} = kappa_k phi_k
    Create,
}

/// The scalar kappa_k linking phi_k and phi_{k-1} through the ladder
/// operators B = sx + T and B' = sx - T.
pub fn ladder_coeff(params: &BasisParams, k: u32, _direction: Ladder) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("B phi_0 = 0; no ladder coefficient at k = 0".into()));
    }
    params.check_index(k)?;
    let kf = k as f64;
    if k % 2 == 0 {
        Ok((2.0 * kf * params.s).sqrt())
    } else {
        Ok((2.0 * (kf + 2.0 * params.sigma) * params.s).sqrt())
    }
}

/// Coefficients `a_i` of the expansion `x^{-1} p_k = sum_i a_i p_{2i}` for odd
/// k = 2m + 1, with `a_i = (-1)^{m-i} sqrt(m! Gamma(i+1/2+sigma) s / (i! Gamma(m+3/2+sigma)))`.
pub fn xinv_coeffs(params: &BasisParams, k: u32) -> Result<Vec<f64>> {
    if k % 2 == 0 {
        return Err(Error::Domain(format!("x^{{-1}} expansion needs odd index, got {k}")));
    }
    params.check_index(k)?;
    if !(params.sigma > -0.5) {
        return Err(Error::Domain(
            "x^{-1} expansion targets the even sector; requires sigma > -1/2".into(),
        ));
    }
    let m = (k - 1) / 2;
    (0..=m)
        .map(|i| {
            Ok(LogProduct::new()
                .neg_one_pow(m - i)
                .factorial(m, 0.5)?
                .gamma(i as f64 + 0.5 + params.sigma, 0.5)?
                .pow(params.s, 0.5)?
                .factorial(i, -0.5)?
                .gamma(m as f64 + 1.5 + params.sigma, -0.5)?
                .value())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn seed_matches_closed_form() {
        let params = BasisParams::new(0.5, 1.0).unwrap();
        assert_relative_eq!(hermite_p(&params, 0, 3.7).unwrap(), 1.0, max_relative = 1e-13);
        assert_relative_eq!(phi(&params, 0, 0.0).unwrap(), 1.0, max_relative = 1e-13);
    }

    #[test]
    fn low_order_values_match_hand_expansion() {
        // At sigma = 1/2, s = 1 the recursion gives p_1 = x, p_2 = x^2 - 1.
        let params = BasisParams::new(0.5, 1.0).unwrap();
        for &x in &[0.25, 1.0, 2.0] {
            assert_abs_diff_eq!(hermite_p(&params, 1, x).unwrap(), x, epsilon = 1e-13);
            assert_abs_diff_eq!(hermite_p(&params, 2, x).unwrap(), x * x - 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn parity() {
        let params = BasisParams::new(0.8, 1.3).unwrap();
        for k in (0..=60).step_by(7) {
            for &x in &[0.3, 1.1, 2.4] {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let plus = hermite_p(&params, k, x).unwrap();
                let minus = hermite_p(&params, k, -x).unwrap();
                assert_abs_diff_eq!(minus, sign * plus, epsilon = 1e-10 * plus.abs().max(1.0));
            }
        }
    }

    #[test]
    fn odd_at_origin() {
        let params = BasisParams::new(1.0, 2.0).unwrap();
        for k in [1u32, 3, 9, 21] {
            assert_eq!(hermite_p(&params, k, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let params = BasisParams::new(0.7, 1.5).unwrap();
        let h = 1e-6;
        for k in [1u32, 4, 11, 30] {
            for &x in &[0.4, 1.2, 2.1] {
                let (_, dp) = hermite_p_with_deriv(&params, k, x).unwrap();
                let fd = (hermite_p(&params, k, x + h).unwrap()
                    - hermite_p(&params, k, x - h).unwrap())
                    / (2.0 * h);
                assert_relative_eq!(dp, fd, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn ladder_coefficients() {
        let params = BasisParams::new(1.0, 1.0).unwrap();
        assert_relative_eq!(ladder_coeff(&params, 2, Ladder::Annihilate).unwrap(), 2.0);
        assert_relative_eq!(
            ladder_coeff(&params, 1, Ladder::Annihilate).unwrap(),
            6.0f64.sqrt(),
            max_relative = 1e-14
        );
        assert!(ladder_coeff(&params, 0, Ladder::Annihilate).is_err());
    }

    #[test]
    fn creation_ladder_consistency() {
        // (s x - T) phi_{k-1} = kappa_k phi_k pointwise.
        let params = BasisParams::new(0.9, 1.2).unwrap();
        for k in 1..=25u32 {
            let kappa = ladder_coeff(&params, k, Ladder::Create).unwrap();
            for &x in &[0.5, 1.0, 1.8] {
                let lhs = params.s * x * phi(&params, k - 1, x).unwrap()
                    - dunkl_t_phi(&params, k - 1, x).unwrap();
                let rhs = kappa * phi(&params, k, x).unwrap();
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn xinv_expansion_pointwise() {
        let params = BasisParams::new(0.6, 1.0).unwrap();
        let x0 = 1.3;
        for k in (1..=21u32).step_by(2) {
            let coeffs = xinv_coeffs(&params, k).unwrap();
            let m = (k - 1) / 2;
            // Signs alternate as (-1)^{m-i}.
            for (i, a) in coeffs.iter().enumerate() {
                let expect = if (m as usize - i) % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(a.signum(), expect);
            }
            let sum: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(i, a)| a * hermite_p(&params, 2 * i as u32, x0).unwrap())
                .sum();
            assert_abs_diff_eq!(sum, hermite_p(&params, k, x0).unwrap() / x0, epsilon = 1e-10);
        }
    }

    #[test]
    fn single_xinv_coefficient() {
        let params = BasisParams::new(0.5, 1.0).unwrap();
        let coeffs = xinv_coeffs(&params, 1).unwrap();
        assert_eq!(coeffs.len(), 1);
        assert_relative_eq!(coeffs[0], 1.0, max_relative = 1e-13);
    }

    #[test]
    fn odd_sector_conjugation() {
        // x phi_{sigma,k} equals the (sigma-1)-basis function of index k+1,
        // both when sigma-1 is a full basis and when only its odd sector exists.
        for &(sigma, s) in &[(1.0, 1.0), (0.3, 2.0)] {
            let upper = BasisParams::new(sigma, s).unwrap();
            let lower = BasisParams::new(sigma - 1.0, s).unwrap();
            for k in (0..=10u32).step_by(2) {
                for &x in &[0.7, 1.4] {
                    let lhs = x * phi(&upper, k, x).unwrap();
                    let rhs = phi(&lower, k + 1, x).unwrap();
                    assert_relative_eq!(lhs, rhs, max_relative = 1e-11);
                }
            }
        }
    }

    #[test]
    fn even_index_rejected_in_odd_sector() {
        let params = BasisParams::new(-0.8, 1.0).unwrap();
        assert!(hermite_p(&params, 2, 1.0).is_err());
        assert!(hermite_p(&params, 3, 1.0).is_ok());
    }
}
