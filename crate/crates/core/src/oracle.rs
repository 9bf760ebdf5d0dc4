//! Independent numerical oracle for weighted inner products
//! `<f, g>_kappa = integral f(x) g(x) |x|^{2 kappa} dx`.
//!
//! A single tanh-sinh (double-exponential) rule on `(0, x_max)` handles every
//! weight exponent `kappa > -1/2` uniformly: the transformation absorbs the
//! endpoint singularity, so no case analysis is needed between integrable
//! singularities and smooth weights. Integrals over the whole line are reduced
//! to the half line through the declared parities of the factors; mixed-parity
//! products are identically zero and short-circuited.

use crate::basis::{self, BasisParams};
use crate::specfun;
use crate::{Error, Result};

pub const DEFAULT_ABS_TOL: f64 = 1e-12;
pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// Parity of an integrand factor on the line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_index(k: u32) -> Self {
        if k % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// Everything fixing one quadrature problem.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub kappa: f64,
    pub half_line: bool,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub x_max: f64,
}

impl QuadratureSpec {
    /// Spec for Gaussian-decay integrands `~exp(-s x^2)` whose polynomial part
    /// has total degree at most `degree`. The truncation radius is chosen so
    /// the neglected tail is far below the absolute tolerance.
    pub fn for_gaussian(kappa: f64, s: f64, degree: u32, half_line: bool) -> Result<Self> {
        if !(kappa > -0.5) {
            return Err(Error::Domain(format!(
                "weight exponent must satisfy kappa > -1/2, got {kappa}"
            )));
        }
        if !(s > 0.0) {
            return Err(Error::Domain(format!("decay scale must be positive, got {s}")));
        }
        let abs_tol = DEFAULT_ABS_TOL;
        // Solve  -s x^2 + (2 kappa + 2 + degree) ln x  <  ln(abs_tol/10) - 5
        // by fixed-point iteration; the extra margin covers the polynomial
        // coefficients of the integrand.
        let power = 2.0 * kappa + 2.0 + degree as f64;
        let target = (abs_tol / 10.0).ln() - 5.0;
        let mut x: f64 = 4.0;
        for _ in 0..40 {
            x = ((power * x.max(std::f64::consts::E).ln() - target) / s).sqrt();
        }
        Ok(Self { kappa, half_line, abs_tol, rel_tol: DEFAULT_REL_TOL, x_max: x })
    }
}

/// The closed Gaussian moment `integral_R exp(-s x^2) |x|^{2 kappa} dx
/// = s^{-(2 kappa + 1)/2} Gamma(kappa + 1/2)`.
pub fn gaussian_moment(kappa: f64, s: f64) -> Result<f64> {
    if !(kappa > -0.5) {
        return Err(Error::Domain(format!("gaussian_moment requires kappa > -1/2, got {kappa}")));
    }
    if !(s > 0.0) {
        return Err(Error::Domain(format!("gaussian_moment requires s > 0, got {s}")));
    }
    Ok(specfun::LogProduct::new()
        .pow(s, -(2.0 * kappa + 1.0) / 2.0)?
        .gamma(kappa + 0.5, 1.0)?
        .value())
}

const T_CLUSTER: f64 = std::f64::consts::FRAC_PI_2;
const H_INITIAL: f64 = 0.5;
const MAX_REFINEMENTS: usize = 9;

/// ln(1 + e^a) without overflow.
fn softplus(a: f64) -> f64 {
    a.max(0.0) + (-a.abs()).exp().ln_1p()
}

struct TanhSinh {
    x_max: f64,
    kappa: f64,
    t_max: f64,
}

impl TanhSinh {
    fn new(spec: &QuadratureSpec) -> Self {
        // The weighted Jacobian decays like exp(-pi (1 + 2 kappa) sinh t) at
        // the singular end; size the t-window so that tail is negligible.
        let t_max = (60.0 / (std::f64::consts::PI * (1.0 + 2.0 * spec.kappa)))
            .asinh()
            .max(4.0);
        Self { x_max: spec.x_max, kappa: spec.kappa, t_max }
    }

    /// Weighted integrand value at abscissa t: f(x) g(x) x^{2 kappa} dx/dt.
    fn node(&self, t: f64, fg: &dyn Fn(f64) -> f64) -> f64 {
        let z = T_CLUSTER * t.sinh();
        let sp = softplus(-2.0 * z);
        let ln_x = self.x_max.ln() - sp;
        // dx/dt = pi x_max cosh(t) e^{-2z} / (1 + e^{-2z})^2, kept in logs to
        // dodge 0 * inf at the clustered ends.
        let ln_scale = (std::f64::consts::PI * self.x_max * t.cosh()).ln() - 2.0 * z - 2.0 * sp
            + 2.0 * self.kappa * ln_x;
        if ln_scale < -750.0 {
            return 0.0;
        }
        let x = ln_x.exp();
        fg(x) * ln_scale.exp()
    }

    /// Trapezoid sums over successively halved steps, reusing previous nodes.
    fn refine(&self, fg: &dyn Fn(f64) -> f64) -> Vec<f64> {
        let mut h = H_INITIAL;
        let mut sum = {
            let m = (self.t_max / h).ceil() as i64;
            (-m..=m).map(|j| self.node(j as f64 * h, fg)).sum::<f64>()
        };
        let mut levels = vec![h * sum];
        for _ in 0..MAX_REFINEMENTS {
            h /= 2.0;
            let m = (self.t_max / h).ceil() as i64;
            let odd: f64 = (-m..=m)
                .filter(|j| j % 2 != 0)
                .map(|j| self.node(j as f64 * h, fg))
                .sum();
            sum += odd;
            levels.push(h * sum);
        }
        levels
    }
}

fn integrate(spec: &QuadratureSpec, fg: &dyn Fn(f64) -> f64) -> Result<Vec<f64>> {
    let rule = TanhSinh::new(spec);
    let levels = rule.refine(fg);
    let mut converged = Vec::with_capacity(levels.len());
    for (i, &v) in levels.iter().enumerate() {
        converged.push(v);
        if i >= 2 {
            let diff = (v - levels[i - 1]).abs();
            if diff <= spec.abs_tol.max(spec.rel_tol * v.abs()) {
                return Ok(converged);
            }
        }
    }
    let last = *levels.last().unwrap();
    let prev = levels[levels.len() - 2];
    Err(Error::NonConvergence(format!(
        "quadrature levels still moving by {:.3e} (tolerance {:.3e})",
        (last - prev).abs(),
        spec.abs_tol.max(spec.rel_tol * last.abs())
    )))
}

/// The weighted inner product `<f, g>_kappa` for factors of declared parity.
///
/// Over the whole line, mixed parity gives exactly 0 without any quadrature;
/// matching parities are folded onto `(0, x_max)` and doubled.
pub fn inner_weighted(
    f: &dyn Fn(f64) -> f64,
    parity_f: Parity,
    g: &dyn Fn(f64) -> f64,
    parity_g: Parity,
    spec: &QuadratureSpec,
) -> Result<f64> {
    Ok(*inner_weighted_levels(f, parity_f, g, parity_g, spec)?
        .last()
        .unwrap())
}

/// As `inner_weighted`, but returns the successive refinement estimates (the
/// last entry is the accepted value). Empty-side short circuits return the
/// single exact value 0.
pub fn inner_weighted_levels(
    f: &dyn Fn(f64) -> f64,
    parity_f: Parity,
    g: &dyn Fn(f64) -> f64,
    parity_g: Parity,
    spec: &QuadratureSpec,
) -> Result<Vec<f64>> {
    if !spec.half_line && parity_f != parity_g {
        return Ok(vec![0.0]);
    }
    if !(spec.kappa > -0.5) {
        return Err(Error::Domain(format!(
            "weight exponent must satisfy kappa > -1/2, got {}",
            spec.kappa
        )));
    }
    let factor = if spec.half_line { 1.0 } else { 2.0 };
    let fg = |x: f64| f(x) * g(x);
    let mut levels = integrate(spec, &fg)?;
    for v in &mut levels {
        *v *= factor;
    }
    Ok(levels)
}

/// Quadrature route for basis-function inner products
/// `<phi_{a,k}, x^{-power} phi_{b,l}>_kappa`, the oracle that every closed
/// form and recursion in this crate is validated against.
pub fn phi_inner(
    a: &BasisParams,
    k: u32,
    b: &BasisParams,
    l: u32,
    kappa: f64,
    xinv_power: u32,
) -> Result<f64> {
    let s_eff = (a.s + b.s) / 2.0;
    let spec = QuadratureSpec::for_gaussian(kappa, s_eff, k + l, false)?;
    let f = |x: f64| basis::phi(a, k, x).unwrap_or(f64::NAN);
    let g = |x: f64| basis::phi(b, l, x).unwrap_or(f64::NAN) / x.powi(xinv_power as i32);
    let pf = Parity::of_index(k);
    let mut pg = Parity::of_index(l);
    if xinv_power % 2 == 1 {
        pg = pg.flip();
    }
    inner_weighted(&f, pf, &g, pg, &spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn moment_closed_form() {
        let pi = std::f64::consts::PI;
        assert_relative_eq!(gaussian_moment(0.0, 1.0).unwrap(), pi.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(gaussian_moment(0.5, 1.0).unwrap(), 1.0, max_relative = 1e-13);
        assert_relative_eq!(
            gaussian_moment(0.0, 4.0).unwrap(),
            pi.sqrt() / 2.0,
            max_relative = 1e-13
        );
        assert!(gaussian_moment(-0.5, 1.0).is_err());
    }

    #[test]
    fn self_test_against_moment() {
        for &kappa in &[-0.4, -0.25, 0.0, 0.5, 1.0, 2.7] {
            for &s in &[0.5, 1.0, 4.0] {
                let spec = QuadratureSpec::for_gaussian(kappa, s, 0, false).unwrap();
                let f = |x: f64| (-s * x * x / 2.0).exp();
                let got = inner_weighted(&f, Parity::Even, &f, Parity::Even, &spec).unwrap();
                let want = gaussian_moment(kappa, s).unwrap();
                assert_relative_eq!(got, want, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn refinement_converges_geometrically() {
        let spec = QuadratureSpec::for_gaussian(-0.25, 1.0, 0, false).unwrap();
        let f = |x: f64| (-x * x / 2.0).exp();
        let levels = inner_weighted_levels(&f, Parity::Even, &f, Parity::Even, &spec).unwrap();
        let n = levels.len();
        assert!(n >= 3);
        let last_change = (levels[n - 1] - levels[n - 2]).abs();
        let prev_change = (levels[n - 2] - levels[n - 3]).abs();
        assert!(last_change <= 1e-2 * prev_change + 1e-15);
    }

    #[test]
    fn mixed_parity_short_circuits() {
        let spec = QuadratureSpec::for_gaussian(0.3, 1.0, 1, false).unwrap();
        let f = |x: f64| (-x * x / 2.0).exp();
        let g = |x: f64| x * (-x * x / 2.0).exp();
        let levels = inner_weighted_levels(&f, Parity::Even, &g, Parity::Odd, &spec).unwrap();
        assert_eq!(levels, vec![0.0]);
    }

    #[test]
    fn half_line_is_half_of_even_integral() {
        let mut spec = QuadratureSpec::for_gaussian(0.7, 1.0, 0, false).unwrap();
        let f = |x: f64| (-x * x / 2.0).exp();
        let full = inner_weighted(&f, Parity::Even, &f, Parity::Even, &spec).unwrap();
        spec.half_line = true;
        let half = inner_weighted(&f, Parity::Even, &f, Parity::Even, &spec).unwrap();
        assert_relative_eq!(full, 2.0 * half, max_relative = 1e-12);
    }

    #[test]
    fn basis_normalization() {
        let params = BasisParams::new(0.5, 1.0).unwrap();
        let one = phi_inner(&params, 0, &params, 0, 0.5, 0).unwrap();
        assert_relative_eq!(one, 1.0, max_relative = 1e-10);
        let zero = phi_inner(&params, 0, &params, 2, 0.5, 0).unwrap();
        assert_abs_diff_eq!(zero, 0.0, epsilon = 1e-10);
    }
}
