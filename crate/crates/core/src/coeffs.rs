//! Matrix elements of the perturbation forms.
//!
//! Three independent routes exist for the same numbers and are played against
//! each other in the tests: the recursion lemmas (ladder-operator route), the
//! signed closed forms (Pi/Sigma factorization and the Gamma-sum formulas),
//! and direct quadrature through the oracle module. Closed forms are always
//! evaluated as signed log-sums; alternating Gamma-sums are accumulated
//! largest-first with compensation.

use serde::Serialize;

use crate::basis::BasisParams;
use crate::oracle;
use crate::specfun::{self, LogProduct, SignedLogSum};
use crate::{Error, Result};

/// Default truncation order for coefficient tables.
pub const DEFAULT_ORDER: usize = 128;

/// Tolerance around excluded integer differences; closer than this to a Gamma
/// pole the closed forms are numerically meaningless and refused.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Parameters of the single-exponent form with matrix elements `c_{k,l}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TParams {
    pub sigma: f64,
    pub u: f64,
    pub s: f64,
}

impl TParams {
    pub fn new(sigma: f64, u: f64, s: f64) -> Result<Self> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("exponent u must lie in (0,1), got {u}")));
        }
        if !(s > 0.0) {
            return Err(Error::Domain(format!("scale s must be positive, got {s}")));
        }
        if !(sigma > u - 0.5) {
            return Err(Error::Domain(format!(
                "need sigma > u - 1/2, got sigma = {sigma}, u = {u}"
            )));
        }
        Ok(Self { sigma, u, s })
    }

    pub fn basis(&self) -> BasisParams {
        BasisParams { sigma: self.sigma, s: self.s }
    }
}

/// Which of the exponent coincidence patterns a mixed-parameter set falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MixedCase {
    AllEqual,
    SigmaEqTheta,
    TauEqTheta,
    ThetaEqTauPlus1,
    Generic,
}

/// Parameters of the three-exponent scalar products and of the cross-parity
/// form; `v = sigma + tau - 2 theta` is always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedParams {
    pub sigma: f64,
    pub tau: f64,
    pub theta: f64,
    pub s: f64,
}

impl MixedParams {
    pub fn new(sigma: f64, tau: f64, theta: f64, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::Domain(format!("scale s must be positive, got {s}")));
        }
        if !(sigma > -1.5) || !(tau > -1.5) {
            return Err(Error::Domain(format!(
                "basis exponents must exceed -3/2, got sigma = {sigma}, tau = {tau}"
            )));
        }
        if !(theta > -0.5) {
            return Err(Error::Domain(format!("weight exponent theta must exceed -1/2, got {theta}")));
        }
        Ok(Self { sigma, tau, theta, s })
    }

    pub fn v(&self) -> f64 {
        self.sigma + self.tau - 2.0 * self.theta
    }

    /// Exact-equality dispatch between the coincidence patterns. Equality of
    /// floats is deliberate: the patterns are parameter choices, not limits.
    pub fn case(&self) -> MixedCase {
        if self.sigma == self.theta && self.theta == self.tau {
            MixedCase::AllEqual
        } else if self.sigma == self.theta {
            MixedCase::SigmaEqTheta
        } else if self.tau == self.theta {
            MixedCase::TauEqTheta
        } else if self.theta == self.tau + 1.0 {
            MixedCase::ThetaEqTauPlus1
        } else {
            MixedCase::Generic
        }
    }

    fn swapped(&self) -> Self {
        Self { sigma: self.tau, tau: self.sigma, theta: self.theta, s: self.s }
    }
}

/// Errors out when `x` sits within [`DEGENERACY_TOL`] of an excluded
/// nonpositive integer, where the closed forms hit a Gamma pole.
fn check_not_excluded(x: f64, what: &str) -> Result<()> {
    let nearest = x.round();
    if nearest <= 0.0 && (x - nearest).abs() <= DEGENERACY_TOL {
        return Err(Error::Degenerate(format!(
            "{what} = {x} is (nearly) an excluded nonpositive integer"
        )));
    }
    Ok(())
}

/// The seed coefficient `c_{0,0} = Gamma(sigma - u + 1/2) Gamma(sigma + 1/2)^{-1} s^u`.
pub fn c00(params: &TParams) -> Result<f64> {
    Ok(LogProduct::new()
        .gamma(params.sigma - params.u + 0.5, 1.0)?
        .gamma(params.sigma + 0.5, -1.0)?
        .pow(params.s, params.u)?
        .value())
}

/// The positive factor `Pi_{k,l}` of the factorization `d = (-1)^{m+n} Pi Sigma`,
/// defined for `k >= l` with `k + l` even.
pub fn pi_factor(sigma: f64, k: u32, l: u32) -> Result<f64> {
    if k < l || (k + l) % 2 != 0 {
        return Err(Error::Domain(format!(
            "Pi factor needs k >= l of equal parity, got ({k}, {l})"
        )));
    }
    let (m, n) = (k / 2, l / 2);
    let offset = if k % 2 == 0 { 0.5 } else { 1.5 };
    Ok(LogProduct::new()
        .factorial(m, 0.5)?
        .gamma(n as f64 + offset + sigma, 0.5)?
        .factorial(n, -0.5)?
        .gamma(m as f64 + offset + sigma, -0.5)?
        .value())
}

/// Triangular table of the positive factors `Sigma_{k,l}` (`k >= l`, `k + l`
/// even), filled by the defining recursions.
#[derive(Debug, Clone)]
pub struct SigmaTable {
    pub sigma: f64,
    pub u: f64,
    pub order: usize,
    data: Vec<f64>,
}

impl SigmaTable {
    pub fn get(&self, k: u32, l: u32) -> f64 {
        debug_assert!(k >= l && (k + l) % 2 == 0);
        self.data[k as usize * self.order + l as usize]
    }
}

/// Fills `Sigma_{k,l}` for all valid `k, l < order`.
pub fn sigma_table(sigma: f64, u: f64, order: usize) -> Result<SigmaTable> {
    if !(u > 0.0 && u < 1.0) || !(sigma > u - 0.5) {
        return Err(Error::Domain(format!(
            "Sigma table needs 0 < u < 1 and sigma > u - 1/2, got sigma = {sigma}, u = {u}"
        )));
    }
    let mut data = vec![f64::NAN; order * order];
    let idx = |k: usize, l: usize| k * order + l;

    // Log-gamma helpers for the recursion weights.
    let max_half = order / 2 + 2;
    let mut ln_gamma_half = Vec::with_capacity(max_half); // ln Gamma(j + 1/2 + sigma)
    let mut ln_fact = Vec::with_capacity(max_half); // ln j!
    for j in 0..max_half {
        ln_gamma_half.push(specfun::log_gamma(j as f64 + 0.5 + sigma)?);
        ln_fact.push(specfun::log_gamma(j as f64 + 1.0)?);
    }

    // Sigma_{2m,0}: running product of (1 - (1-u)/i).
    let mut prod = 1.0;
    let mut m = 0usize;
    let mut k = 0usize;
    while k < order {
        if m > 0 {
            prod *= 1.0 - (1.0 - u) / m as f64;
        }
        data[idx(k, 0)] = prod;
        m += 1;
        k += 2;
    }

    for l in 1..order {
        let n = l / 2;
        if l % 2 == 0 {
            // Even pair: Sigma_{k,l} = Sigma_{k-1,l-1}
            //   + u sum_j w_{n,j} Sigma_{k,2j},  w = (n-1)! G(j+1/2+s) / (j! G(n+1/2+s)).
            let weights: Vec<f64> = (0..n)
                .map(|j| (ln_fact[n - 1] + ln_gamma_half[j] - ln_fact[j] - ln_gamma_half[n]).exp())
                .collect();
            for k in (l..order).step_by(2) {
                let mut sum = 0.0;
                for (j, w) in weights.iter().enumerate() {
                    sum += w * data[idx(k, 2 * j)];
                }
                data[idx(k, l)] = data[idx(k - 1, l - 1)] + u * sum;
            }
        } else {
            // Odd pair: Sigma_{k,l} = Sigma_{k-1,l-1}
            //   - u sum_j w'_{n,j} Sigma_{k-1,2j},  w' = n! G(j+1/2+s) / (j! G(n+3/2+s)).
            let ln_gamma_n32 = specfun::log_gamma(n as f64 + 1.5 + sigma)?;
            let weights: Vec<f64> = (0..=n)
                .map(|j| (ln_fact[n] + ln_gamma_half[j] - ln_fact[j] - ln_gamma_n32).exp())
                .collect();
            for k in (l..order).step_by(2) {
                let mut sum = 0.0;
                for (j, w) in weights.iter().enumerate() {
                    sum += w * data[idx(k - 1, 2 * j)];
                }
                data[idx(k, l)] = data[idx(k - 1, l - 1)] - u * sum;
            }
        }
    }
    Ok(SigmaTable { sigma, u, order, data })
}

/// Closed-form normalized element `d_{k,l} = (-1)^{m+n} Pi_{k,l} Sigma_{k,l}`
/// (0 when `k + l` is odd), symmetric in `(k, l)`.
pub fn d_coeff_closed(params: &TParams, k: u32, l: u32) -> Result<f64> {
    if (k + l) % 2 != 0 {
        return Ok(0.0);
    }
    let (hi, lo) = if k >= l { (k, l) } else { (l, k) };
    let table = sigma_table(params.sigma, params.u, hi as usize + 1)?;
    Ok(d_from_table(params.sigma, &table, hi, lo)?)
}

fn d_from_table(sigma: f64, table: &SigmaTable, k: u32, l: u32) -> Result<f64> {
    let sign = if ((k / 2 + l / 2) % 2) == 0 { 1.0 } else { -1.0 };
    Ok(sign * pi_factor(sigma, k, l)? * table.get(k, l))
}

/// Closed-form `c_{k,l} = c_{0,0} d_{k,l}`.
pub fn t_coeff_closed(params: &TParams, k: u32, l: u32) -> Result<f64> {
    Ok(c00(params)? * d_coeff_closed(params, k, l)?)
}

/// Coefficient family tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    D,
    C,
    Chat,
    Cprime,
}

/// Provenance of a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Recursion,
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum CoeffParamSet {
    T(TParams),
    Mixed(MixedParams),
}

/// A dense coefficient table with its parameters and provenance.
#[derive(Debug, Clone, Serialize)]
pub struct CoeffMatrix {
    pub family: Family,
    pub params: CoeffParamSet,
    pub order: usize,
    pub method: Method,
    pub entries: Vec<Vec<f64>>,
}

impl CoeffMatrix {
    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.entries[k][l]
    }

    /// Row-major CSV with a `# key=value` parameter header block.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# family={}\n", serde_json::to_value(self.family).unwrap().as_str().unwrap()));
        out.push_str(&format!("# method={}\n", serde_json::to_value(self.method).unwrap().as_str().unwrap()));
        match &self.params {
            CoeffParamSet::T(p) => {
                out.push_str(&format!("# sigma={} u={} s={}\n", p.sigma, p.u, p.s));
            }
            CoeffParamSet::Mixed(p) => {
                out.push_str(&format!(
                    "# sigma={} tau={} theta={} s={} v={}\n",
                    p.sigma, p.tau, p.theta, p.s, p.v()
                ));
            }
        }
        out.push_str(&format!("# order={}\n", self.order));
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.17e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Fills the `d` table using only the three recursion lemmas, seeded at
/// `d_{0,0} = 1`; the closed-form route is its independent oracle.
pub fn d_matrix_recursive(params: &TParams, order: usize) -> Result<CoeffMatrix> {
    let sigma = params.sigma;
    let u = params.u;
    let mut d = vec![vec![0.0; order]; order];
    d[0][0] = 1.0;

    let max_half = order / 2 + 2;
    let mut ln_gamma_half = Vec::with_capacity(max_half);
    let mut ln_fact = Vec::with_capacity(max_half);
    for j in 0..max_half {
        ln_gamma_half.push(specfun::log_gamma(j as f64 + 0.5 + sigma)?);
        ln_fact.push(specfun::log_gamma(j as f64 + 1.0)?);
    }

    // First column (even k = 2m > 0):
    // d_{k,0} = (u/sqrt m) sum_j (-1)^{m-j} sqrt((m-1)! G(j+1/2+s)/(j! G(m+1/2+s))) d_{2j,0}.
    for m in 1..=(order - 1) / 2 {
        let k = 2 * m;
        let mut sum = 0.0;
        for j in 0..m {
            let sign = if (m - j) % 2 == 0 { 1.0 } else { -1.0 };
            let w = (0.5
                * (ln_fact[m - 1] + ln_gamma_half[j] - ln_fact[j] - ln_gamma_half[m]))
                .exp();
            sum += sign * w * d[2 * j][0];
        }
        d[k][0] = u / (m as f64).sqrt() * sum;
        d[0][k] = d[k][0];
    }

    for l in 1..order {
        let n = l / 2;
        for k in (l..order).step_by(2) {
            let m = k / 2;
            let value = if l % 2 == 0 {
                // Even pair (k = 2m >= l = 2n > 0).
                let mut sum = 0.0;
                for j in 0..n {
                    let sign = if (n - j) % 2 == 0 { 1.0 } else { -1.0 };
                    let w = (0.5
                        * (ln_fact[n - 1] + ln_gamma_half[j] - ln_fact[j] - ln_gamma_half[n]))
                        .exp();
                    sum += sign * w * d[k][2 * j];
                }
                ((m as f64) / (n as f64)).sqrt() * d[k - 1][l - 1]
                    + u / (n as f64).sqrt() * sum
            } else {
                // Odd pair (k = 2m+1, l = 2n+1).
                let ln_gamma_n32 = specfun::log_gamma(n as f64 + 1.5 + sigma)?;
                let mut sum = 0.0;
                for j in 0..=n {
                    let sign = if (n - j) % 2 == 0 { 1.0 } else { -1.0 };
                    let w =
                        (0.5 * (ln_fact[n] + ln_gamma_half[j] - ln_fact[j] - ln_gamma_n32)).exp();
                    sum += sign * w * d[k - 1][2 * j];
                }
                let ratio =
                    ((n as f64 + 0.5 + sigma) / (m as f64 + 0.5 + sigma)).sqrt();
                ratio * d[k - 1][l - 1]
                    - u / (m as f64 + 0.5 + sigma).sqrt() * sum
            };
            d[k][l] = value;
            d[l][k] = value;
        }
    }

    Ok(CoeffMatrix {
        family: Family::D,
        params: CoeffParamSet::T(*params),
        order,
        method: Method::Recursion,
        entries: d,
    })
}

/// Fills the `d` table from the closed form.
pub fn d_matrix_closed(params: &TParams, order: usize) -> Result<CoeffMatrix> {
    let table = sigma_table(params.sigma, params.u, order)?;
    let mut d = vec![vec![0.0; order]; order];
    for k in 0..order {
        for l in (k % 2..=k).step_by(2) {
            let value = d_from_table(params.sigma, &table, k as u32, l as u32)?;
            d[k][l] = value;
            d[l][k] = value;
        }
    }
    Ok(CoeffMatrix {
        family: Family::D,
        params: CoeffParamSet::T(*params),
        order,
        method: Method::ClosedForm,
        entries: d,
    })
}

fn scale_to_c(mut m: CoeffMatrix, params: &TParams) -> Result<CoeffMatrix> {
    let c0 = c00(params)?;
    for row in &mut m.entries {
        for x in row.iter_mut() {
            *x *= c0;
        }
    }
    m.family = Family::C;
    Ok(m)
}

/// The `c` table by the recursion route.
pub fn t_matrix_recursive(params: &TParams, order: usize) -> Result<CoeffMatrix> {
    scale_to_c(d_matrix_recursive(params, order)?, params)
}

/// The `c` table by the closed-form route.
pub fn t_matrix_closed(params: &TParams, order: usize) -> Result<CoeffMatrix> {
    scale_to_c(d_matrix_closed(params, order)?, params)
}

/// The `c` table by the quadrature oracle: `c_{k,l} = <phi_k, phi_l>_{sigma-u}`.
pub fn t_matrix_quadrature(params: &TParams, order: usize) -> Result<CoeffMatrix> {
    let basis = params.basis();
    let kappa = params.sigma - params.u;
    let mut c = vec![vec![0.0; order]; order];
    for k in 0..order {
        for l in (k % 2..=k).step_by(2) {
            let value = oracle::phi_inner(&basis, k as u32, &basis, l as u32, kappa, 0)?;
            c[k][l] = value;
            c[l][k] = value;
        }
    }
    Ok(CoeffMatrix {
        family: Family::C,
        params: CoeffParamSet::T(*params),
        order,
        method: Method::Quadrature,
        entries: c,
    })
}

fn check_basis_exponent(exp: f64, index: u32, name: &str) -> Result<()> {
    let bound = if index % 2 == 0 { -0.5 } else { -1.5 };
    if !(exp > bound) {
        return Err(Error::Domain(format!(
            "{name} = {exp} does not admit basis index {index} (needs > {bound})"
        )));
    }
    Ok(())
}

/// The mixed scalar product `chat_{k,l} = <phi_{sigma,k}, phi_{tau,l}>_theta`
/// by the case-matching closed form.
pub fn chat_coeff(params: &MixedParams, k: u32, l: u32) -> Result<f64> {
    if (k + l) % 2 != 0 {
        return Ok(0.0);
    }
    check_basis_exponent(params.sigma, k, "sigma")?;
    check_basis_exponent(params.tau, l, "tau")?;
    let (m, n) = (k / 2, l / 2);
    let v = params.v();
    let s = params.s;
    let odd = k % 2 == 1;
    let offset = if odd { 1.5 } else { 0.5 };
    match params.case() {
        MixedCase::AllEqual => Ok(if k == l { 1.0 } else { 0.0 }),
        MixedCase::SigmaEqTheta => {
            check_not_excluded(params.tau - params.sigma, "tau - sigma")?;
            if k > l {
                return Ok(0.0);
            }
            // (-1)^{m+n} s^{v/2} sqrt(n! G(m+o+sigma)/(m! G(n+o+tau)))
            //   * G(n-m+v) / ((n-m)! G(v)).
            Ok(LogProduct::new()
                .neg_one_pow(m + n)
                .pow(s, v / 2.0)?
                .factorial(n, 0.5)?
                .gamma(m as f64 + offset + params.sigma, 0.5)?
                .factorial(m, -0.5)?
                .gamma(n as f64 + offset + params.tau, -0.5)?
                .gamma((n - m) as f64 + v, 1.0)?
                .factorial(n - m, -1.0)?
                .gamma(v, -1.0)?
                .value())
        }
        MixedCase::TauEqTheta => chat_coeff(&params.swapped(), l, k),
        MixedCase::ThetaEqTauPlus1 => Err(Error::Degenerate(format!(
            "chat has a Gamma pole at theta = tau + 1 (tau - theta = -1); \
             sigma = {}, tau = {}, theta = {}",
            params.sigma, params.tau, params.theta
        ))),
        MixedCase::Generic => {
            check_not_excluded(params.sigma - params.theta, "sigma - theta")?;
            check_not_excluded(params.tau - params.theta, "tau - theta")?;
            // Expanding both factors in the orthonormal basis of the weight
            // exponent theta gives a sum over shared basis indices with the
            // weight Gamma(p + offset + theta) / p! inside; the quadrature
            // oracle pins this form down.
            let prefactor = LogProduct::new()
                .neg_one_pow(m + n)
                .pow(s, v / 2.0)?
                .factorial(m, 0.5)?
                .factorial(n, 0.5)?
                .gamma(m as f64 + offset + params.sigma, -0.5)?
                .gamma(n as f64 + offset + params.tau, -0.5)?;
            let mut sum = SignedLogSum::new();
            for p in 0..=m.min(n) {
                let term = LogProduct::new()
                    .gamma(p as f64 + offset + params.theta, 1.0)?
                    .factorial(p, -1.0)?
                    .gamma((m - p) as f64 + params.sigma - params.theta, 1.0)?
                    .gamma((n - p) as f64 + params.tau - params.theta, 1.0)?
                    .factorial(m - p, -1.0)?
                    .factorial(n - p, -1.0)?
                    .gamma(params.sigma - params.theta, -1.0)?
                    .gamma(params.tau - params.theta, -1.0)?;
                sum.push_product(&term);
            }
            Ok(prefactor.value() * sum.eval())
        }
    }
}

/// The cross-parity element `c'_{k,l}` (even `k = 2m`, odd `l = 2n+1`; zero
/// otherwise) by the case-matching closed form.
pub fn cprime_coeff(params: &MixedParams, k: u32, l: u32) -> Result<f64> {
    if k % 2 == 1 || l % 2 == 0 {
        return Ok(0.0);
    }
    check_basis_exponent(params.sigma, k, "sigma")?;
    check_basis_exponent(params.tau, l, "tau")?;
    let m = k / 2;
    let n = (l - 1) / 2;
    let v = params.v();
    let s = params.s;
    match params.case() {
        MixedCase::AllEqual => {
            if m > n {
                return Ok(0.0);
            }
            // (-1)^{n-m} s^{1/2} sqrt(n! G(m+1/2+sigma) / (m! G(n+3/2+sigma))).
            Ok(LogProduct::new()
                .neg_one_pow(n - m)
                .pow(s, 0.5)?
                .factorial(n, 0.5)?
                .gamma(m as f64 + 0.5 + params.sigma, 0.5)?
                .factorial(m, -0.5)?
                .gamma(n as f64 + 1.5 + params.sigma, -0.5)?
                .value())
        }
        MixedCase::SigmaEqTheta => {
            check_not_excluded(params.tau - params.sigma, "tau - sigma")?;
            if m > n {
                return Ok(0.0);
            }
            Ok(LogProduct::new()
                .neg_one_pow(m + n)
                .pow(s, (1.0 + v) / 2.0)?
                .factorial(n, 0.5)?
                .gamma(m as f64 + 0.5 + params.sigma, 0.5)?
                .factorial(m, -0.5)?
                .gamma(n as f64 + 1.5 + params.tau, -0.5)?
                .gamma((n - m) as f64 + 1.0 + v, 1.0)?
                .factorial(n - m, -1.0)?
                .gamma(1.0 + v, -1.0)?
                .value())
        }
        MixedCase::TauEqTheta => {
            check_not_excluded(params.sigma - params.tau, "sigma - tau")?;
            let prefactor = LogProduct::new()
                .neg_one_pow(m + n)
                .pow(s, (1.0 + v) / 2.0)?
                .factorial(m, 0.5)?
                .factorial(n, 0.5)?
                .gamma(m as f64 + 0.5 + params.sigma, -0.5)?
                .gamma(n as f64 + 1.5 + params.tau, -0.5)?;
            // Terms with j > m vanish through the 1/(m-j)! factor.
            let mut sum = SignedLogSum::new();
            for j in 0..=n.min(m) {
                let term = LogProduct::new()
                    .gamma(j as f64 + 0.5 + params.tau, 1.0)?
                    .gamma((m - j) as f64 + v, 1.0)?
                    .factorial(j, -1.0)?
                    .factorial(m - j, -1.0)?
                    .gamma(v, -1.0)?;
                sum.push_product(&term);
            }
            Ok(prefactor.value() * sum.eval())
        }
        MixedCase::ThetaEqTauPlus1 => {
            check_not_excluded(params.sigma - params.tau - 1.0, "sigma - tau - 1")?;
            if m < n {
                return Ok(0.0);
            }
            // The prefactor is s^{(v+1)/2}: the proposition header of the
            // source derivation misprints the exponent, but both branches of
            // its proof (and the decay bound using it) carry (v+1)/2; the
            // quadrature oracle confirms this.
            Ok(LogProduct::new()
                .neg_one_pow(m + n)
                .pow(s, (v + 1.0) / 2.0)?
                .factorial(m, 0.5)?
                .gamma(n as f64 + 1.5 + params.tau, 0.5)?
                .factorial(n, -0.5)?
                .gamma(m as f64 + 0.5 + params.sigma, -0.5)?
                .gamma((m - n) as f64 + v + 1.0, 1.0)?
                .factorial(m - n, -1.0)?
                .gamma(v + 1.0, -1.0)?
                .value())
        }
        MixedCase::Generic => {
            check_not_excluded(params.sigma - params.theta, "sigma - theta")?;
            check_not_excluded(params.tau - params.theta, "tau - theta")?;
            // Same basis-expansion structure as the even scalar product, with
            // Gamma(p + 1/2 + theta) / p! inside the sum.
            let prefactor = LogProduct::new()
                .neg_one_pow(m + n)
                .pow(s, (1.0 + v) / 2.0)?
                .factorial(m, 0.5)?
                .factorial(n, 0.5)?
                .gamma(m as f64 + 0.5 + params.sigma, -0.5)?
                .gamma(n as f64 + 1.5 + params.tau, -0.5)?;
            let mut sum = SignedLogSum::new();
            for p in 0..=m.min(n) {
                let term = LogProduct::new()
                    .gamma(p as f64 + 0.5 + params.theta, 1.0)?
                    .factorial(p, -1.0)?
                    .gamma((m - p) as f64 + params.sigma - params.theta, 1.0)?
                    .gamma((n - p) as f64 + 1.0 + params.tau - params.theta, 1.0)?
                    .factorial(m - p, -1.0)?
                    .factorial(n - p, -1.0)?
                    .gamma(params.sigma - params.theta, -1.0)?
                    .gamma(1.0 + params.tau - params.theta, -1.0)?;
                sum.push_product(&term);
            }
            Ok(prefactor.value() * sum.eval())
        }
    }
}

/// Dense table of `chat` by the closed form.
pub fn chat_matrix(params: &MixedParams, order: usize) -> Result<CoeffMatrix> {
    let mut entries = vec![vec![0.0; order]; order];
    for (k, row) in entries.iter_mut().enumerate() {
        for (l, x) in row.iter_mut().enumerate() {
            *x = chat_coeff(params, k as u32, l as u32)?;
        }
    }
    Ok(CoeffMatrix {
        family: Family::Chat,
        params: CoeffParamSet::Mixed(*params),
        order,
        method: Method::ClosedForm,
        entries,
    })
}

/// Dense table of `c'` by the closed form.
pub fn cprime_matrix(params: &MixedParams, order: usize) -> Result<CoeffMatrix> {
    let mut entries = vec![vec![0.0; order]; order];
    for (k, row) in entries.iter_mut().enumerate() {
        for (l, x) in row.iter_mut().enumerate() {
            *x = cprime_coeff(params, k as u32, l as u32)?;
        }
    }
    Ok(CoeffMatrix {
        family: Family::Cprime,
        params: CoeffParamSet::Mixed(*params),
        order,
        method: Method::ClosedForm,
        entries,
    })
}

/// Quadrature oracle for `chat`: `<phi_{sigma,k}, phi_{tau,l}>_theta`.
pub fn chat_quadrature(params: &MixedParams, k: u32, l: u32) -> Result<f64> {
    let a = BasisParams::new(params.sigma, params.s)?;
    let b = BasisParams::new(params.tau, params.s)?;
    oracle::phi_inner(&a, k, &b, l, params.theta, 0)
}

/// Quadrature oracle for `c'`: `<phi_{sigma,k}, x^{-1} phi_{tau,l}>_theta`.
pub fn cprime_quadrature(params: &MixedParams, k: u32, l: u32) -> Result<f64> {
    let a = BasisParams::new(params.sigma, params.s)?;
    let b = BasisParams::new(params.tau, params.s)?;
    oracle::phi_inner(&a, k, &b, l, params.theta, 1)
}

/// Self-test of the telescoping identity
/// `Gamma(p+1+t)/p! = t sum_{i=0}^p Gamma(i+t)/i!` for `t` outside the
/// nonpositive integers; exercises the signed log-gamma plumbing.
pub fn telescope_check(t: f64, p: u32) -> Result<bool> {
    check_not_excluded(t, "t")?;
    let lhs = LogProduct::new().gamma(p as f64 + 1.0 + t, 1.0)?.factorial(p, -1.0)?.value();
    let mut sum = SignedLogSum::new();
    for i in 0..=p {
        sum.push_product(&LogProduct::new().gamma(i as f64 + t, 1.0)?.factorial(i, -1.0)?);
    }
    let rhs = t * sum.eval();
    Ok((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(rhs.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn c00_values() {
        let p = TParams::new(1.0, 0.5, 1.0).unwrap();
        let want = 2.0 / std::f64::consts::PI.sqrt();
        assert_relative_eq!(c00(&p).unwrap(), want, max_relative = 1e-13);
        let p4 = TParams::new(1.0, 0.5, 4.0).unwrap();
        assert_relative_eq!(c00(&p4).unwrap(), 2.0 * want, max_relative = 1e-13);
        // u -> 0 limit collapses the Gamma ratio.
        let p0 = TParams::new(1.0, 1e-12, 1.0).unwrap();
        assert_relative_eq!(c00(&p0).unwrap(), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn pi_factor_values() {
        assert_relative_eq!(pi_factor(0.5, 4, 4).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(pi_factor(0.5, 2, 0).unwrap(), 1.0, max_relative = 1e-13);
        assert_relative_eq!(
            pi_factor(0.5, 3, 1).unwrap(),
            0.5f64.sqrt(),
            max_relative = 1e-13
        );
        assert!(pi_factor(0.5, 1, 3).is_err());
        assert!(pi_factor(0.5, 2, 1).is_err());
    }

    #[test]
    fn sigma_table_known_values() {
        let u = 0.37;
        let t = sigma_table(1.2, u, 8).unwrap();
        assert_eq!(t.get(0, 0), 1.0);
        assert_relative_eq!(t.get(2, 0), u, max_relative = 1e-14);
        assert_relative_eq!(t.get(4, 0), 0.5 * u * (1.0 + u), max_relative = 1e-14);
        // Sigma_{k,1} = (1 - u/(1/2+sigma)) Sigma_{k-1,0} for odd k.
        for k in [1u32, 3, 5, 7] {
            assert_relative_eq!(
                t.get(k, 1),
                (1.0 - u / (0.5 + 1.2)) * t.get(k - 1, 0),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn sigma_alternative_first_column_identity() {
        let t = sigma_table(0.7, 0.6, 64).unwrap();
        for m in 1..32u32 {
            let avg: f64 = (0..m).map(|j| t.get(2 * j, 0)).sum::<f64>() * 0.6 / m as f64;
            assert_relative_eq!(t.get(2 * m, 0), avg, max_relative = 1e-13);
        }
    }

    #[test]
    fn t_closed_low_order() {
        let p = TParams::new(0.5, 0.5, 1.0).unwrap();
        let c0 = c00(&p).unwrap();
        assert_relative_eq!(t_coeff_closed(&p, 0, 0).unwrap(), c0, max_relative = 1e-13);
        assert_relative_eq!(
            t_coeff_closed(&p, 2, 0).unwrap(),
            -0.5 * c0,
            max_relative = 1e-13
        );
        assert_eq!(t_coeff_closed(&p, 2, 1).unwrap(), 0.0);
    }

    #[test]
    fn recursion_agrees_with_closed_form() {
        let p = TParams::new(0.8, 0.4, 1.3).unwrap();
        let rec = t_matrix_recursive(&p, 48).unwrap();
        let closed = t_matrix_closed(&p, 48).unwrap();
        for k in 0..48 {
            for l in 0..48 {
                let (a, b) = (rec.get(k, l), closed.get(k, l));
                assert_abs_diff_eq!(a, b, epsilon = 1e-10 * b.abs().max(1.0));
            }
        }
    }

    #[test]
    fn closed_form_agrees_with_quadrature() {
        let p = TParams::new(0.6, 0.5, 1.0).unwrap();
        let basis = p.basis();
        for (k, l) in [(0u32, 0u32), (2, 0), (5, 3), (8, 8), (12, 4)] {
            let closed = t_coeff_closed(&p, k, l).unwrap();
            let quad =
                oracle::phi_inner(&basis, k, &basis, l, p.sigma - p.u, 0).unwrap();
            assert_abs_diff_eq!(closed, quad, epsilon = 1e-9);
        }
    }

    #[test]
    fn chat_cases() {
        // All equal: Kronecker delta.
        let p = MixedParams::new(0.5, 0.5, 0.5, 1.0).unwrap();
        assert_eq!(chat_coeff(&p, 3, 3).unwrap(), 1.0);
        assert_eq!(chat_coeff(&p, 4, 2).unwrap(), 0.0);
        // sigma = theta != tau seed value sqrt(2).
        let p = MixedParams::new(0.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(p.case(), MixedCase::SigmaEqTheta);
        assert_relative_eq!(
            chat_coeff(&p, 0, 0).unwrap(),
            2.0f64.sqrt(),
            max_relative = 1e-13
        );
        // Triangularity.
        assert_eq!(chat_coeff(&p, 4, 2).unwrap(), 0.0);
        // Mixed parity.
        assert_eq!(chat_coeff(&p, 2, 3).unwrap(), 0.0);
    }

    #[test]
    fn chat_symmetry_and_shift() {
        let p = MixedParams::new(0.8, 0.3, 0.1, 1.0).unwrap();
        let swapped = MixedParams::new(0.3, 0.8, 0.1, 1.0).unwrap();
        for (k, l) in [(0u32, 2u32), (3, 5), (6, 2), (7, 1)] {
            assert_relative_eq!(
                chat_coeff(&p, k, l).unwrap(),
                chat_coeff(&swapped, l, k).unwrap(),
                max_relative = 1e-12
            );
        }
        let shifted = MixedParams::new(1.8, 1.3, 1.1, 1.0).unwrap();
        for (k, l) in [(1u32, 3u32), (5, 7), (3, 1)] {
            assert_relative_eq!(
                chat_coeff(&p, k, l).unwrap(),
                chat_coeff(&shifted, k - 1, l - 1).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn chat_vs_quadrature() {
        let p = MixedParams::new(0.8, 0.3, 0.1, 1.0).unwrap();
        for (k, l) in [(0u32, 0u32), (2, 2), (4, 0), (3, 5), (6, 6)] {
            let closed = chat_coeff(&p, k, l).unwrap();
            let quad = chat_quadrature(&p, k, l).unwrap();
            assert_abs_diff_eq!(closed, quad, epsilon = 1e-9);
        }
    }

    #[test]
    fn chat_refuses_poles() {
        let p = MixedParams::new(0.5, 0.2, 1.2, 1.0).unwrap();
        assert_eq!(p.case(), MixedCase::ThetaEqTauPlus1);
        assert!(matches!(chat_coeff(&p, 0, 0), Err(Error::Degenerate(_))));
        // tau - sigma a negative integer in the sigma = theta case.
        let p = MixedParams::new(1.5, 0.5, 1.5, 1.0).unwrap();
        assert!(matches!(chat_coeff(&p, 0, 2), Err(Error::Degenerate(_))));
    }

    #[test]
    fn cprime_cases_closed_form() {
        // sigma = theta = tau seed value 1.
        let p = MixedParams::new(0.5, 0.5, 0.5, 1.0).unwrap();
        assert_relative_eq!(cprime_coeff(&p, 0, 1).unwrap(), 1.0, max_relative = 1e-13);
        assert_eq!(cprime_coeff(&p, 2, 1).unwrap(), 0.0);
        assert_eq!(cprime_coeff(&p, 1, 2).unwrap(), 0.0);
        // theta = tau + 1: zero for m < n.
        let p = MixedParams::new(0.6, 0.3, 1.3, 1.0).unwrap();
        assert_eq!(p.case(), MixedCase::ThetaEqTauPlus1);
        assert_eq!(cprime_coeff(&p, 0, 3).unwrap(), 0.0);
        assert!(cprime_coeff(&p, 4, 3).unwrap() != 0.0);
    }

    #[test]
    fn cprime_vs_quadrature_all_cases() {
        let cases = [
            MixedParams::new(0.5, 0.5, 0.5, 1.0).unwrap(),
            MixedParams::new(0.5, 0.8, 0.5, 1.0).unwrap(),
            MixedParams::new(0.9, 0.4, 0.4, 1.0).unwrap(),
            MixedParams::new(0.6, 0.3, 1.3, 1.0).unwrap(),
            MixedParams::new(0.8, 0.3, 0.1, 1.0).unwrap(),
        ];
        for p in &cases {
            for (k, l) in [(0u32, 1u32), (2, 3), (4, 1), (2, 7), (6, 5)] {
                let closed = cprime_coeff(p, k, l).unwrap();
                let quad = cprime_quadrature(p, k, l).unwrap();
                assert_abs_diff_eq!(closed, quad, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn scaling_laws() {
        let t1 = TParams::new(1.0, 0.5, 1.0).unwrap();
        let t4 = TParams::new(1.0, 0.5, 4.0).unwrap();
        let scale = 4.0f64.powf(0.5);
        for (k, l) in [(0u32, 0u32), (3, 5), (8, 2)] {
            assert_relative_eq!(
                t_coeff_closed(&t4, k, l).unwrap(),
                scale * t_coeff_closed(&t1, k, l).unwrap(),
                max_relative = 1e-12
            );
        }
        let m1 = MixedParams::new(0.8, 0.3, 0.1, 1.0).unwrap();
        let m4 = MixedParams::new(0.8, 0.3, 0.1, 4.0).unwrap();
        let v = m1.v();
        for (k, l) in [(0u32, 2u32), (3, 5)] {
            assert_relative_eq!(
                chat_coeff(&m4, k, l).unwrap(),
                4.0f64.powf(v / 2.0) * chat_coeff(&m1, k, l).unwrap(),
                max_relative = 1e-12
            );
        }
        for (k, l) in [(0u32, 1u32), (2, 5)] {
            assert_relative_eq!(
                cprime_coeff(&m4, k, l).unwrap(),
                4.0f64.powf((1.0 + v) / 2.0) * cprime_coeff(&m1, k, l).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn telescope_identity() {
        assert!(telescope_check(1.0, 3).unwrap());
        assert!(telescope_check(0.5, 0).unwrap());
        assert!(telescope_check(-0.3, 5).unwrap());
        assert!(telescope_check(2.7, 40).unwrap());
        assert!(matches!(telescope_check(-2.0, 4), Err(Error::Degenerate(_))));
    }

    #[test]
    fn csv_has_parameter_header() {
        let p = TParams::new(1.0, 0.5, 1.0).unwrap();
        let m = t_matrix_closed(&p, 4).unwrap();
        let csv = m.to_csv();
        assert!(csv.starts_with("# family=c\n"));
        assert!(csv.contains("# sigma=1 u=0.5 s=1"));
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 4);
    }
}
