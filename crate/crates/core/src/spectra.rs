//! Truncated quadratic forms and their spectra.
//!
//! The forms are assembled in the generalized Hermite basis, where the
//! unperturbed operator is diagonal and the perturbations are the coefficient
//! tables from the coeffs module. Eigenvalues come from a cyclic Jacobi
//! solver; Ritz sweeps over growing truncation orders report per-eigenvalue
//! convergence. The same blocks serve the full line, the half-line operators
//! obtained from indicial roots, and the Witten-complex components.

use serde::Serialize;

use crate::analysis;
use crate::coeffs::{self, MixedParams, TParams};
use crate::{Error, Result};

/// Default truncation order for spectra.
pub const DEFAULT_TRUNCATION: usize = 256;

/// Hard cap on Jacobi sweeps before giving up.
pub const JACOBI_SWEEP_CAP: usize = 64;

/// Relative tolerance on `|lambda_k(N) - lambda_k(N/2)|` below which an
/// eigenvalue counts as converged.
pub const CONVERGED_REL_TOL: f64 = 1e-8;

/// Parity mass shares closer than this to 1/2 are flagged ambiguous.
pub const PARITY_TIE_TOL: f64 = 1e-6;

/// Full-line single-exponent operator: diagonal `(2k+1+2 sigma) s` plus
/// `xi` times the `c` table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct USpec {
    pub sigma: f64,
    pub u: f64,
    pub s: f64,
    pub xi: f64,
}

impl USpec {
    pub fn new(sigma: f64, u: f64, s: f64, xi: f64) -> Result<Self> {
        if !(xi >= 0.0) {
            return Err(Error::Domain(format!("coupling xi must be nonnegative, got {xi}")));
        }
        // Validates u, s and sigma > u - 1/2.
        TParams::new(sigma, u, s)?;
        Ok(Self { sigma, u, s, xi })
    }
}

/// Full-line two-exponent operator: even sector at `sigma`, odd sector at
/// `tau`, cross-parity coupling `eta` through the `c'` table with weight
/// exponent `theta`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VSpec {
    pub sigma: f64,
    pub tau: f64,
    pub theta: f64,
    pub u: f64,
    pub s: f64,
    pub xi: f64,
    pub eta: f64,
}

impl VSpec {
    pub fn new(
        sigma: f64,
        tau: f64,
        theta: f64,
        u: f64,
        s: f64,
        xi: f64,
        eta: f64,
    ) -> Result<Self> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("exponent u must lie in (0,1), got {u}")));
        }
        if !(s > 0.0) {
            return Err(Error::Domain(format!("scale s must be positive, got {s}")));
        }
        if !(xi >= 0.0) {
            return Err(Error::Domain(format!("coupling xi must be nonnegative, got {xi}")));
        }
        let hyp = analysis::theorem_v_hypotheses(sigma, tau, theta, u);
        if !hyp.ok {
            return Err(Error::Hypothesis {
                case: format!("{:?}", hyp.case),
                violated: hyp.violated,
            });
        }
        Ok(Self { sigma, tau, theta, u, s, xi, eta })
    }

    pub fn v(&self) -> f64 {
        self.sigma + self.tau - 2.0 * self.theta
    }
}

/// A full-line operator to assemble and diagonalize.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(tag = "kind")]
pub enum OperatorSpec {
    U(USpec),
    V(VSpec),
}

/// Even-sector block at exponent `sigma`: rows/columns are the global basis
/// indices `2j`, `j < m`, with entries
/// `delta_{j,j'} (4j+1+2 sigma) s + xi c_{2j,2j'}`.
pub fn even_block(sigma: f64, u: f64, s: f64, xi: f64, m: usize) -> Result<Vec<Vec<f64>>> {
    if m == 0 {
        return Err(Error::Domain("block size must be positive".into()));
    }
    if !(s > 0.0) {
        return Err(Error::Domain(format!("scale s must be positive, got {s}")));
    }
    let mut a = vec![vec![0.0; m]; m];
    for (j, row) in a.iter_mut().enumerate() {
        row[j] = (4.0 * j as f64 + 1.0 + 2.0 * sigma) * s;
    }
    if xi != 0.0 {
        let params = TParams::new(sigma, u, s)?;
        let c = coeffs::t_matrix_closed(&params, 2 * m - 1)?;
        for (j, row) in a.iter_mut().enumerate() {
            for (jp, x) in row.iter_mut().enumerate() {
                *x += xi * c.get(2 * j, 2 * jp);
            }
        }
    }
    Ok(a)
}

/// Odd-sector block at exponent `tau`: global indices `2j+1`, entries
/// `delta_{j,j'} (4j+3+2 tau) s + xi c_{2j+1,2j'+1}`. The coefficients come
/// from the exponent shift `c_{tau,k,l} = c_{tau+1,k-1,l-1}`, which extends
/// the odd sector down to `tau > u - 3/2`.
pub fn odd_block(tau: f64, u: f64, s: f64, xi: f64, m: usize) -> Result<Vec<Vec<f64>>> {
    if m == 0 {
        return Err(Error::Domain("block size must be positive".into()));
    }
    if !(s > 0.0) {
        return Err(Error::Domain(format!("scale s must be positive, got {s}")));
    }
    let mut a = vec![vec![0.0; m]; m];
    for (j, row) in a.iter_mut().enumerate() {
        row[j] = (4.0 * j as f64 + 3.0 + 2.0 * tau) * s;
    }
    if xi != 0.0 {
        if !(tau > u - 1.5) {
            return Err(Error::Domain(format!(
                "odd-sector exponent must exceed u - 3/2, got tau = {tau}, u = {u}"
            )));
        }
        let params = TParams::new(tau + 1.0, u, s)?;
        let c = coeffs::t_matrix_closed(&params, 2 * m - 1)?;
        for (j, row) in a.iter_mut().enumerate() {
            for (jp, x) in row.iter_mut().enumerate() {
                *x += xi * c.get(2 * j, 2 * jp);
            }
        }
    }
    Ok(a)
}

/// Symmetric `n x n` matrix of the single-exponent form, parities interleaved
/// by global index; cross-parity entries are exactly zero.
pub fn assemble_u(spec: &USpec, n: usize) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::Domain("truncation order must be positive".into()));
    }
    let me = n.div_ceil(2);
    let mo = n / 2;
    let e = even_block(spec.sigma, spec.u, spec.s, spec.xi, me)?;
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..me {
        for j in 0..me {
            a[2 * i][2 * j] = e[i][j];
        }
    }
    if mo > 0 {
        let o = odd_block(spec.sigma, spec.u, spec.s, spec.xi, mo)?;
        for i in 0..mo {
            for j in 0..mo {
                a[2 * i + 1][2 * j + 1] = o[i][j];
            }
        }
    }
    Ok(a)
}

/// Symmetric `n x n` matrix of the two-exponent form: sigma-block on even
/// global indices, tau-block on odd ones, cross entries `eta c'_{k,l}`.
pub fn assemble_v(spec: &VSpec, n: usize) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::Domain("truncation order must be positive".into()));
    }
    let me = n.div_ceil(2);
    let mo = n / 2;
    let e = even_block(spec.sigma, spec.u, spec.s, spec.xi, me)?;
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..me {
        for j in 0..me {
            a[2 * i][2 * j] = e[i][j];
        }
    }
    if mo > 0 {
        let o = odd_block(spec.tau, spec.u, spec.s, spec.xi, mo)?;
        for i in 0..mo {
            for j in 0..mo {
                a[2 * i + 1][2 * j + 1] = o[i][j];
            }
        }
    }
    if spec.eta != 0.0 {
        let mp = MixedParams::new(spec.sigma, spec.tau, spec.theta, spec.s)?;
        let cp = coeffs::cprime_matrix(&mp, n)?;
        for k in (0..n).step_by(2) {
            for l in (1..n).step_by(2) {
                let x = spec.eta * cp.get(k, l);
                a[k][l] = x;
                a[l][k] = x;
            }
        }
    }
    Ok(a)
}

pub fn assemble(spec: &OperatorSpec, n: usize) -> Result<Vec<Vec<f64>>> {
    match spec {
        OperatorSpec::U(u) => assemble_u(u, n),
        OperatorSpec::V(v) => assemble_v(v, n),
    }
}

/// Eigenvalues (ascending) with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomp {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi diagonalization of a symmetric matrix.
pub fn eigen_sym(matrix: &[Vec<f64>]) -> Result<EigenDecomp> {
    let n = matrix.len();
    if n == 0 || matrix.iter().any(|row| row.len() != n) {
        return Err(Error::Domain("matrix must be square and nonempty".into()));
    }
    let scale = matrix
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |acc, x| acc.max(x.abs()));
    for p in 0..n {
        for q in p + 1..n {
            if (matrix[p][q] - matrix[q][p]).abs() > 1e-12 * scale {
                return Err(Error::Domain(format!(
                    "matrix is not symmetric at ({p},{q}): {} vs {}",
                    matrix[p][q], matrix[q][p]
                )));
            }
        }
    }
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    if scale > 0.0 && n > 1 {
        let done_tol = 1e-13 * scale;
        let skip_tol = 1e-16 * scale / n as f64;
        let mut converged = false;
        for _ in 0..JACOBI_SWEEP_CAP {
            let mut max_off = 0.0f64;
            for p in 0..n {
                for q in p + 1..n {
                    max_off = max_off.max(a[p][q].abs());
                }
            }
            if max_off <= done_tol {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = a[p][q];
                    if apq.abs() <= skip_tol {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + (theta * theta + 1.0).sqrt())
                    } else {
                        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for row in a.iter_mut() {
                        let aip = row[p];
                        let aiq = row[q];
                        row[p] = c * aip - s * aiq;
                        row[q] = s * aip + c * aiq;
                    }
                    for i in 0..n {
                        let api = a[p][i];
                        let aqi = a[q][i];
                        a[p][i] = c * api - s * aqi;
                        a[q][i] = s * api + c * aqi;
                    }
                    a[p][q] = 0.0;
                    a[q][p] = 0.0;
                    for row in v.iter_mut() {
                        let vip = row[p];
                        let viq = row[q];
                        row[p] = c * vip - s * viq;
                        row[q] = s * vip + c * viq;
                    }
                }
            }
        }
        if !converged {
            let mut max_off = 0.0f64;
            for p in 0..n {
                for q in p + 1..n {
                    max_off = max_off.max(a[p][q].abs());
                }
            }
            if max_off > done_tol {
                return Err(Error::NonConvergence(format!(
                    "Jacobi sweeps exhausted at off-diagonal {max_off:e} (scale {scale:e})"
                )));
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[i][i]).collect();
    let vectors: Vec<Vec<f64>> = order.iter().map(|&j| (0..n).map(|i| v[i][j]).collect()).collect();
    Ok(EigenDecomp { values, vectors })
}

/// Dominant parity of an eigenvector in the interleaved global ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityLabel {
    Even,
    Odd,
    Ambiguous,
}

fn parity_label(vector: &[f64]) -> ParityLabel {
    let even: f64 = vector.iter().step_by(2).map(|x| x * x).sum();
    let total: f64 = vector.iter().map(|x| x * x).sum();
    let share = even / total;
    if (share - 0.5).abs() <= PARITY_TIE_TOL {
        ParityLabel::Ambiguous
    } else if share > 0.5 {
        ParityLabel::Even
    } else {
        ParityLabel::Odd
    }
}

/// Eigenvalues at one truncation order with convergence data against the
/// half-order run.
#[derive(Debug, Clone, Serialize)]
pub struct RitzResult {
    pub n: usize,
    pub eigenvalues: Vec<f64>,
    pub parity_labels: Vec<ParityLabel>,
    /// `|lambda_k(n) - lambda_k(n/2)|`; infinite where the half-order run has
    /// no k-th eigenvalue.
    pub convergence: Vec<f64>,
    /// Convergence flag, only granted for `k <= n/4`.
    pub converged: Vec<bool>,
}

impl RitzResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,lambda,gap,converged\n");
        for (k, lam) in self.eigenvalues.iter().enumerate() {
            let gap = if k == 0 { 0.0 } else { lam - self.eigenvalues[k - 1] };
            out.push_str(&format!("{k},{lam:.17e},{gap:.17e},{}\n", self.converged[k]));
        }
        out
    }
}

fn ritz_from_decomps(n: usize, full: &EigenDecomp, half: &EigenDecomp) -> RitzResult {
    let parity_labels = full.vectors.iter().map(|w| parity_label(w)).collect();
    let convergence: Vec<f64> = full
        .values
        .iter()
        .enumerate()
        .map(|(k, lam)| half.values.get(k).map_or(f64::INFINITY, |h| (lam - h).abs()))
        .collect();
    let converged = full
        .values
        .iter()
        .zip(&convergence)
        .enumerate()
        .map(|(k, (lam, conv))| k <= n / 4 && *conv <= CONVERGED_REL_TOL * lam.abs())
        .collect();
    RitzResult { n, eigenvalues: full.values.clone(), parity_labels, convergence, converged }
}

/// Assembles and diagonalizes at each requested order, pairing every run with
/// its half-order run for the convergence column.
pub fn ritz_spectrum(spec: &OperatorSpec, orders: &[usize]) -> Result<Vec<RitzResult>> {
    let mut out = Vec::with_capacity(orders.len());
    for &n in orders {
        if n < 4 {
            return Err(Error::Domain(format!("truncation order must be at least 4, got {n}")));
        }
        let full = eigen_sym(&assemble(spec, n)?)?;
        let half = eigen_sym(&assemble(spec, n / 2)?)?;
        out.push(ritz_from_decomps(n, &full, &half));
    }
    Ok(out)
}

fn lsq_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

/// Outcome of the eigenvalue sandwich on a single-exponent spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub unperturbed: bool,
    pub epsilon: f64,
    pub d_hat: f64,
    pub d_hat_eig: f64,
    pub c_hat: f64,
    pub checked: usize,
    pub converged_count: usize,
    pub strict_above_ok: bool,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub slope: f64,
    pub slope_ok: bool,
    pub violations: Vec<String>,
}

/// Checks the leading quarter of the spectrum (a superset of the flagged
/// eigenvalues; truncation only tightens the checks from above) against the
/// two-sided bound: strictly above the unperturbed diagonal, gap envelope
/// `min_k (lambda_k - base_k)(k+1)^u` positive and within a factor two of the
/// fitted diagonal constant, below the epsilon-form upper bound, and with the
/// log-log gap slope decaying no faster than `-(u + 0.15)`.
pub fn sandwich_check(spec: &USpec, ritz: &RitzResult, epsilon: f64) -> Result<SandwichReport> {
    if spec.xi == 0.0 {
        return Ok(SandwichReport {
            unperturbed: true,
            epsilon,
            d_hat: 0.0,
            d_hat_eig: 0.0,
            c_hat: 0.0,
            checked: 0,
            converged_count: 0,
            strict_above_ok: true,
            lower_ok: true,
            upper_ok: true,
            slope: f64::NAN,
            slope_ok: true,
            violations: Vec::new(),
        });
    }
    let params = TParams::new(spec.sigma, spec.u, spec.s)?;
    let checked_ks: Vec<usize> =
        (0..=ritz.n / 4).filter(|k| *k < ritz.eigenvalues.len()).collect();
    let converged_count = ritz.converged.iter().filter(|c| **c).count();
    let Some(&k_max) = checked_ks.last() else {
        return Err(Error::InsufficientData("no eigenvalues to check".into()));
    };
    let d_hat = analysis::fit_lower_constant(&params, k_max.max(32))?.fitted_value;
    let c_hat =
        analysis::fit_form_bound(&params, epsilon, 200, ritz.n.min(128))?.fitted_value;
    let mut violations = Vec::new();
    let mut strict_above_ok = true;
    let mut upper_ok = true;
    let su = spec.s.powf(spec.u);
    let mut d_hat_eig = f64::INFINITY;
    let mut slope_points = Vec::new();
    for &k in &checked_ks {
        let lam = ritz.eigenvalues[k];
        let base = (2.0 * k as f64 + 1.0 + 2.0 * spec.sigma) * spec.s;
        if !(lam > base) {
            strict_above_ok = false;
            violations.push(format!("lambda_{k} = {lam} not strictly above {base}"));
        }
        d_hat_eig = d_hat_eig.min((lam - base) * ((k + 1) as f64).powf(spec.u) / (spec.xi * su));
        let upper = (2.0 * k as f64 + 1.0 + 2.0 * spec.sigma)
            * (spec.s + spec.xi * epsilon * su)
            + spec.xi * c_hat * su;
        if lam > upper {
            upper_ok = false;
            violations.push(format!("lambda_{k} = {lam} above upper bound {upper}"));
        }
        if k >= 16 && lam > base {
            slope_points.push((((k + 1) as f64).ln(), (lam - base).ln()));
        }
    }
    let lower_ok = d_hat_eig > 0.5 * d_hat;
    if !lower_ok {
        violations.push(format!(
            "gap envelope constant {d_hat_eig} fell below half the diagonal constant {d_hat}"
        ));
    }
    let (slope, slope_ok) = if slope_points.len() >= 4 {
        let sl = lsq_slope(&slope_points);
        (sl, sl < 0.0 && sl >= -(spec.u + 0.15))
    } else {
        violations.push("too few eigenvalues beyond k = 16 for the slope fit".into());
        (f64::NAN, false)
    };
    Ok(SandwichReport {
        unperturbed: false,
        epsilon,
        d_hat,
        d_hat_eig,
        c_hat,
        checked: checked_ks.len(),
        converged_count,
        strict_above_ok,
        lower_ok,
        upper_ok,
        slope,
        slope_ok,
        violations,
    })
}

/// Outcome of the per-parity sandwich on a two-exponent spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct VSandwichReport {
    pub epsilon: f64,
    pub d_hat: f64,
    pub d_hat_eig: f64,
    pub c_hat: f64,
    pub e_hat: f64,
    pub checked_even: usize,
    pub checked_odd: usize,
    pub converged_count: usize,
    pub ambiguous: usize,
    pub strict_above_ok: bool,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub violations: Vec<String>,
}

fn v_lower_constant(spec: &VSpec, k_max: usize) -> Result<f64> {
    let pe = TParams::new(spec.sigma, spec.u, spec.s)?;
    let po = TParams::new(spec.tau + 1.0, spec.u, spec.s)?;
    let mut d_hat = f64::INFINITY;
    for k in 0..=k_max {
        let c = if k % 2 == 0 {
            coeffs::t_coeff_closed(&pe, k as u32, k as u32)?
        } else {
            coeffs::t_coeff_closed(&po, k as u32 - 1, k as u32 - 1)?
        };
        d_hat = d_hat.min(c * ((k + 1) as f64).powf(spec.u) * spec.s.powf(-spec.u));
    }
    if !(d_hat > 0.0) {
        return Err(Error::Domain(format!("diagonal lower constant came out nonpositive: {d_hat}")));
    }
    Ok(d_hat)
}

/// Splits the spectrum into its two parity groups by eigenvector label and
/// checks each group's sandwich with the group's own exponent over the
/// leading quarter of the spectrum.
pub fn v_sandwich_check(spec: &VSpec, ritz: &RitzResult, epsilon: f64) -> Result<VSandwichReport> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let mut groups: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let mut ambiguous = 0usize;
    for (k, lam) in ritz.eigenvalues.iter().enumerate() {
        match ritz.parity_labels[k] {
            ParityLabel::Even => groups[0].push(*lam),
            ParityLabel::Odd => groups[1].push(*lam),
            ParityLabel::Ambiguous => ambiguous += 1,
        }
    }
    let converged_count = ritz.converged.iter().filter(|c| **c).count();
    let d_hat = v_lower_constant(spec, (ritz.n / 4).max(32))?;
    let pe = TParams::new(spec.sigma, spec.u, spec.s)?;
    let mut c_hat =
        analysis::fit_form_bound(&pe, epsilon, 200, ritz.n.min(96))?.fitted_value;
    if let Ok(pt) = TParams::new(spec.tau, spec.u, spec.s) {
        c_hat = c_hat
            .max(analysis::fit_form_bound(&pt, epsilon, 200, ritz.n.min(96))?.fitted_value);
    }
    let mp = MixedParams::new(spec.sigma, spec.tau, spec.theta, spec.s)?;
    let e_hat =
        analysis::fit_tprime_bound(&mp, spec.u, epsilon, 200, ritz.n.min(96))?.fitted_value;
    let v = spec.v();
    let su = spec.s.powf(spec.u);
    let sv = spec.s.powf((1.0 + v) / 2.0);
    let mut violations = Vec::new();
    let mut strict_above_ok = true;
    let mut upper_ok = true;
    let mut d_hat_eig = f64::INFINITY;
    let mut checked = [0usize; 2];
    for (parity, group) in groups.iter().enumerate() {
        let varsigma = if parity == 0 { spec.sigma } else { spec.tau };
        for (j, lam) in group.iter().enumerate() {
            let k = 2 * j + parity;
            if k > ritz.n / 4 {
                break;
            }
            checked[parity] += 1;
            let base = (2.0 * k as f64 + 1.0 + 2.0 * varsigma) * spec.s;
            if !(*lam > base) {
                strict_above_ok = false;
                violations.push(format!("lambda_{k} = {lam} not strictly above {base}"));
            }
            d_hat_eig =
                d_hat_eig.min((lam - base) * ((k + 1) as f64).powf(spec.u) / (spec.xi * su));
            let upper = (2.0 * k as f64 + 1.0 + 2.0 * varsigma)
                * (spec.s + epsilon * (spec.xi * su + 2.0 * spec.eta.abs() * sv))
                + spec.xi * c_hat * su
                + 2.0 * spec.eta.abs() * e_hat * sv;
            if *lam > upper {
                upper_ok = false;
                violations.push(format!("lambda_{k} = {lam} above upper bound {upper}"));
            }
        }
    }
    let lower_ok = spec.xi == 0.0 || d_hat_eig > 0.5 * d_hat;
    if !lower_ok {
        violations.push(format!(
            "gap envelope constant {d_hat_eig} fell below half the diagonal constant {d_hat}"
        ));
    }
    Ok(VSandwichReport {
        epsilon,
        d_hat,
        d_hat_eig: if spec.xi == 0.0 { 0.0 } else { d_hat_eig },
        c_hat,
        e_hat,
        checked_even: checked[0],
        checked_odd: checked[1],
        converged_count,
        ambiguous,
        strict_above_ok,
        lower_ok,
        upper_ok,
        violations,
    })
}

/// Which half-line template an operator matches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HalflineKind {
    P,
    Q,
}

/// One root of the indicial equation with the basis exponent it induces.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IndicialRoot {
    pub root: f64,
    pub exponent: f64,
    pub admissible: bool,
}

/// Solves the indicial equation of a half-line operator and reports both
/// roots with their basis exponents and admissibility. Neither root is
/// singled out as the minimal or maximal extension.
pub fn halfline_reduce(
    kind: HalflineKind,
    coeff1: f64,
    coeff2: f64,
    u: f64,
) -> Result<Vec<IndicialRoot>> {
    let linear = match kind {
        HalflineKind::P => 2.0 * coeff1 - 1.0,
        HalflineKind::Q => 2.0 * coeff1 + 1.0,
    };
    let disc = linear * linear + 4.0 * coeff2;
    if disc < 0.0 {
        return Err(Error::Domain(format!(
            "indicial equation has complex roots (discriminant {disc})"
        )));
    }
    let sq = disc.sqrt();
    let mut roots = [(-linear + sq) / 2.0, (-linear - sq) / 2.0];
    roots.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
    let floor = match kind {
        HalflineKind::P => u - 0.5,
        HalflineKind::Q => u - 1.5,
    };
    Ok(roots
        .iter()
        .map(|&r| {
            let exponent = r + coeff1;
            IndicialRoot { root: r, exponent, admissible: exponent > floor }
        })
        .collect())
}

/// Spectrum of a half-line operator with basis exponent `exponent`: the
/// even-index subsequence of the full-line spectrum for the first template,
/// the odd-index subsequence for the second.
pub fn halfline_spectrum(
    kind: HalflineKind,
    exponent: f64,
    u: f64,
    s: f64,
    xi: f64,
    m: usize,
) -> Result<EigenDecomp> {
    let block = match kind {
        HalflineKind::P => even_block(exponent, u, s, xi, m)?,
        HalflineKind::Q => odd_block(exponent, u, s, xi, m)?,
    };
    eigen_sym(&block)
}

/// Branch of the model potential `+- x^2/2`; fixes the sign of the constant
/// shifts (the upper sign of the displayed `-+` pairs is `Plus`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn shift(self, base: f64) -> f64 {
        match self {
            Sign::Plus => -base,
            Sign::Minus => base,
        }
    }
}

/// Structural data of one component operator of the model complex.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind")]
pub enum HalflineSpec {
    P { c1: f64, c2: f64, u: f64, s: f64, xi: f64 },
    Q { d1: f64, d2: f64, u: f64, s: f64, xi: f64 },
    W { c1: f64, c2: f64, d1: f64, d2: f64, u: f64, s: f64, xi: f64, eta: f64 },
}

/// One self-adjoint extension row: indicial roots with the exponents they
/// induce and whether the operator hypotheses admit them.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub component: String,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub sigma: Option<f64>,
    pub tau: Option<f64>,
    pub theta: Option<f64>,
    pub admissible: bool,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct WittenComponent {
    pub name: String,
    pub spec: HalflineSpec,
    /// Constant diagonal shift; for the matrix component this is the
    /// even-block shift.
    pub shift: f64,
    /// Odd-block shift of the matrix component.
    pub shift_odd: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WittenModel {
    pub kappa: f64,
    pub u: f64,
    pub s: f64,
    pub mu: f64,
    pub sign: Sign,
    pub length: usize,
    pub components: Vec<WittenComponent>,
    pub rows: Vec<TableRow>,
}

const DELTA_RM1: &str = "delta_r_minus_1";
const DELTA_R: &str = "delta_r";
const DELTA_RP1: &str = "delta_r_plus_1";

fn scalar_rows(
    component: &str,
    kind: HalflineKind,
    coeff1: f64,
    u: f64,
) -> Result<Vec<TableRow>> {
    let floor_name = match kind {
        HalflineKind::P => "u - 1/2",
        HalflineKind::Q => "u - 3/2",
    };
    Ok(halfline_reduce(kind, coeff1, 0.0, u)?
        .into_iter()
        .map(|r| {
            let (a, b, sigma, tau) = match kind {
                HalflineKind::P => (Some(r.root), None, Some(r.exponent), None),
                HalflineKind::Q => (None, Some(r.root), None, Some(r.exponent)),
            };
            let note = if r.admissible {
                "ok".into()
            } else {
                format!("exponent {} does not exceed {floor_name}", r.exponent)
            };
            TableRow {
                component: component.into(),
                a,
                b,
                sigma,
                tau,
                theta: None,
                admissible: r.admissible,
                note,
            }
        })
        .collect())
}

fn matrix_rows(kappa: f64, u: f64) -> Result<Vec<TableRow>> {
    let a_roots = halfline_reduce(HalflineKind::P, kappa, 0.0, u)?;
    let b_roots = halfline_reduce(HalflineKind::Q, kappa + u, 0.0, u)?;
    let pairs = [(0usize, 0usize), (1, 1), (0, 1), (1, 0)];
    let mut rows = Vec::with_capacity(4);
    for (ia, ib) in pairs {
        let a = a_roots[ia].root;
        let b = b_roots[ib].root;
        let sigma = a_roots[ia].exponent;
        let tau = b_roots[ib].exponent;
        let theta = kappa + (a + b) / 2.0;
        let hyp = analysis::theorem_v_hypotheses(sigma, tau, theta, u);
        let note = if hyp.ok { "ok".into() } else { hyp.violated.join("; ") };
        rows.push(TableRow {
            component: DELTA_R.into(),
            a: Some(a),
            b: Some(b),
            sigma: Some(sigma),
            tau: Some(tau),
            theta: Some(theta),
            admissible: hyp.ok,
            note,
        });
    }
    Ok(rows)
}

fn check_witten_inputs(u: f64, s: f64) -> Result<()> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("exponent u must lie in (0,1), got {u}")));
    }
    if !(s > 0.0) {
        return Err(Error::Domain(format!("scale s must be positive, got {s}")));
    }
    Ok(())
}

fn finish_model(mut model: WittenModel) -> Result<WittenModel> {
    if model.rows.iter().all(|r| !r.admissible) {
        return Err(Error::Domain(format!(
            "no admissible self-adjoint extension row at kappa = {}, u = {}",
            model.kappa, model.u
        )));
    }
    model.rows.shrink_to_fit();
    Ok(model)
}

/// Length-one complex: two scalar components with no potential coupling.
pub fn witten_build_length_one(kappa: f64, u: f64, s: f64, sign: Sign) -> Result<WittenModel> {
    check_witten_inputs(u, s)?;
    let components = vec![
        WittenComponent {
            name: DELTA_R.into(),
            spec: HalflineSpec::P { c1: kappa, c2: 0.0, u, s, xi: 0.0 },
            shift: sign.shift(s * (1.0 + 2.0 * kappa)),
            shift_odd: None,
        },
        WittenComponent {
            name: DELTA_RP1.into(),
            spec: HalflineSpec::Q { d1: kappa, d2: 0.0, u, s, xi: 0.0 },
            shift: sign.shift(s * (2.0 * kappa - 1.0)),
            shift_odd: None,
        },
    ];
    let mut rows = scalar_rows(DELTA_R, HalflineKind::P, kappa, u)?;
    rows.extend(scalar_rows(DELTA_RP1, HalflineKind::Q, kappa, u)?);
    finish_model(WittenModel {
        kappa,
        u,
        s,
        mu: 0.0,
        sign,
        length: 1,
        components,
        rows,
    })
}

/// Length-two complex: two scalar components with potential `mu^2 x^{-2u}`
/// and the coupled matrix component with off-diagonal constant `-2 mu u`.
pub fn witten_build(kappa: f64, u: f64, s: f64, mu: f64, sign: Sign) -> Result<WittenModel> {
    check_witten_inputs(u, s)?;
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("coupling mu must be positive, got {mu}")));
    }
    let xi = mu * mu;
    let components = vec![
        WittenComponent {
            name: DELTA_RM1.into(),
            spec: HalflineSpec::P { c1: kappa + u, c2: 0.0, u, s, xi },
            shift: sign.shift(s * (1.0 + 2.0 * (kappa + u))),
            shift_odd: None,
        },
        WittenComponent {
            name: DELTA_R.into(),
            spec: HalflineSpec::W {
                c1: kappa,
                c2: 0.0,
                d1: kappa + u,
                d2: 0.0,
                u,
                s,
                xi,
                eta: -2.0 * mu * u,
            },
            shift: sign.shift(s * (1.0 + 2.0 * kappa)),
            shift_odd: Some(sign.shift(s * (2.0 * (kappa + u) - 1.0))),
        },
        WittenComponent {
            name: DELTA_RP1.into(),
            spec: HalflineSpec::Q { d1: kappa, d2: 0.0, u, s, xi },
            shift: sign.shift(s * (2.0 * kappa - 1.0)),
            shift_odd: None,
        },
    ];
    let mut rows = scalar_rows(DELTA_RM1, HalflineKind::P, kappa + u, u)?;
    rows.extend(matrix_rows(kappa, u)?);
    rows.extend(scalar_rows(DELTA_RP1, HalflineKind::Q, kappa, u)?);
    finish_model(WittenModel {
        kappa,
        u,
        s,
        mu,
        sign,
        length: 2,
        components,
        rows,
    })
}

/// Spectrum of one component for one admissible extension row.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentSpectrum {
    pub component: String,
    pub row: TableRow,
    pub result: RitzResult,
}

fn shifted(decomp: &EigenDecomp, shift: f64) -> EigenDecomp {
    EigenDecomp {
        values: decomp.values.iter().map(|x| x + shift).collect(),
        vectors: decomp.vectors.clone(),
    }
}

/// Diagonalizes every component of the model on each of its admissible rows,
/// constant shifts included.
pub fn witten_spectrum(model: &WittenModel, n: usize) -> Result<Vec<ComponentSpectrum>> {
    if n < 4 {
        return Err(Error::Domain(format!("truncation order must be at least 4, got {n}")));
    }
    let mut out = Vec::new();
    for comp in &model.components {
        for row in model.rows.iter().filter(|r| r.component == comp.name && r.admissible) {
            let result = match &comp.spec {
                HalflineSpec::P { u, s, xi, .. } => {
                    let sigma = row.sigma.expect("scalar row carries its exponent");
                    let full = shifted(
                        &halfline_spectrum(HalflineKind::P, sigma, *u, *s, *xi, n)?,
                        comp.shift,
                    );
                    let half = shifted(
                        &halfline_spectrum(HalflineKind::P, sigma, *u, *s, *xi, n / 2)?,
                        comp.shift,
                    );
                    let mut r = ritz_from_decomps(n, &full, &half);
                    r.parity_labels.clear();
                    r
                }
                HalflineSpec::Q { u, s, xi, .. } => {
                    let tau = row.tau.expect("scalar row carries its exponent");
                    let full = shifted(
                        &halfline_spectrum(HalflineKind::Q, tau, *u, *s, *xi, n)?,
                        comp.shift,
                    );
                    let half = shifted(
                        &halfline_spectrum(HalflineKind::Q, tau, *u, *s, *xi, n / 2)?,
                        comp.shift,
                    );
                    let mut r = ritz_from_decomps(n, &full, &half);
                    r.parity_labels.clear();
                    r
                }
                HalflineSpec::W { u, s, xi, eta, .. } => {
                    let spec = VSpec::new(
                        row.sigma.expect("matrix row carries sigma"),
                        row.tau.expect("matrix row carries tau"),
                        row.theta.expect("matrix row carries theta"),
                        *u,
                        *s,
                        *xi,
                        *eta,
                    )?;
                    let shift_odd = comp.shift_odd.expect("matrix component has both shifts");
                    let build = |order: usize| -> Result<EigenDecomp> {
                        let mut a = assemble_v(&spec, order)?;
                        for (k, row_k) in a.iter_mut().enumerate() {
                            row_k[k] += if k % 2 == 0 { comp.shift } else { shift_odd };
                        }
                        eigen_sym(&a)
                    };
                    ritz_from_decomps(n, &build(n)?, &build(n / 2)?)
                }
            };
            out.push(ComponentSpectrum {
                component: comp.name.clone(),
                row: row.clone(),
                result,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn residual(a: &[Vec<f64>], decomp: &EigenDecomp) -> f64 {
        let n = a.len();
        let scale = a
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |acc, x| acc.max(x.abs()));
        let mut worst = 0.0f64;
        for (lam, w) in decomp.values.iter().zip(&decomp.vectors) {
            let mut norm2 = 0.0;
            for i in 0..n {
                let av: f64 = (0..n).map(|j| a[i][j] * w[j]).sum();
                norm2 += (av - lam * w[i]).powi(2);
            }
            worst = worst.max(norm2.sqrt() / scale.max(1e-300));
        }
        worst
    }

    #[test]
    fn assemble_u_values() {
        let spec = USpec::new(1.0, 0.5, 1.0, 1.0).unwrap();
        let a = assemble_u(&spec, 6).unwrap();
        let c00 = 2.0 / std::f64::consts::PI.sqrt();
        assert_relative_eq!(a[0][0], 3.0 + c00, max_relative = 1e-12);
        for k in 0..6 {
            for l in 0..6 {
                assert_relative_eq!(a[k][l], a[l][k], max_relative = 1e-12);
                if (k + l) % 2 == 1 {
                    assert_eq!(a[k][l], 0.0);
                }
            }
        }

        let diag = USpec::new(0.7, 0.3, 2.0, 0.0).unwrap();
        let d = assemble_u(&diag, 5).unwrap();
        for k in 0..5 {
            for l in 0..5 {
                let expect = if k == l { (2.0 * k as f64 + 1.0 + 1.4) * 2.0 } else { 0.0 };
                assert_eq!(d[k][l], expect);
            }
        }
    }

    #[test]
    fn eigen_sym_small_matrices() {
        let id = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let e = eigen_sym(&id).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);

        let diag = vec![vec![3.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 2.0]];
        let e = eigen_sym(&diag).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert_relative_eq!(e.vectors[0][1].abs(), 1.0, max_relative = 1e-14);

        let two = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let e = eigen_sym(&two).unwrap();
        assert_relative_eq!(e.values[0], 1.0, max_relative = 1e-13);
        assert_relative_eq!(e.values[1], 3.0, max_relative = 1e-13);

        let bad = vec![vec![1.0, 2.0], vec![0.5, 1.0]];
        assert!(matches!(eigen_sym(&bad), Err(Error::Domain(_))));
    }

    #[test]
    fn eigen_sym_residual_on_random_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 16;
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let x = rng.gen_range(-1.0..1.0);
                a[i][j] = x;
                a[j][i] = x;
            }
        }
        let e = eigen_sym(&a).unwrap();
        assert!(residual(&a, &e) <= 1e-10);
        for k in 1..n {
            assert!(e.values[k] >= e.values[k - 1]);
        }
    }

    #[test]
    fn ritz_unperturbed_is_exact() {
        let spec = OperatorSpec::U(USpec::new(0.8, 0.4, 1.5, 0.0).unwrap());
        for r in ritz_spectrum(&spec, &[8, 16]).unwrap() {
            for (k, lam) in r.eigenvalues.iter().enumerate() {
                assert_relative_eq!(
                    *lam,
                    (2.0 * k as f64 + 1.0 + 1.6) * 1.5,
                    max_relative = 1e-12
                );
                if k <= r.n / 4 {
                    assert!(r.converged[k]);
                }
            }
        }
    }

    #[test]
    fn ritz_monotone_in_order_and_positive() {
        let spec = OperatorSpec::U(USpec::new(1.0, 0.5, 1.0, 1.0).unwrap());
        let runs = ritz_spectrum(&spec, &[32, 64]).unwrap();
        for k in 0..32 {
            assert!(runs[1].eigenvalues[k] <= runs[0].eigenvalues[k] + 1e-12);
        }
        for lam in &runs[1].eigenvalues {
            assert!(*lam > 0.0);
        }
    }

    #[test]
    fn v_decouples_at_zero_eta() {
        let spec = VSpec::new(0.5, 0.8, 0.5, 0.5, 1.0, 1.0, 0.0).unwrap();
        let full = eigen_sym(&assemble_v(&spec, 24).unwrap()).unwrap();
        let mut merged = eigen_sym(&even_block(0.5, 0.5, 1.0, 1.0, 12).unwrap())
            .unwrap()
            .values;
        merged.extend(eigen_sym(&odd_block(0.8, 0.5, 1.0, 1.0, 12).unwrap()).unwrap().values);
        merged.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (x, y) in full.values.iter().zip(&merged) {
            assert_relative_eq!(x, y, max_relative = 1e-12);
        }
    }

    #[test]
    fn v_cross_entries_are_scaled_cprime() {
        let spec = VSpec::new(0.5, 0.5, 0.5, 0.5, 1.0, 0.3, 0.25).unwrap();
        let a = assemble_v(&spec, 8).unwrap();
        let mp = MixedParams::new(0.5, 0.5, 0.5, 1.0).unwrap();
        for k in (0..8).step_by(2) {
            for l in (1..8).step_by(2) {
                let expect = 0.25 * coeffs::cprime_coeff(&mp, k as u32, l as u32).unwrap();
                assert_eq!(a[k][l], expect);
                assert_eq!(a[l][k], expect);
            }
        }
    }

    #[test]
    fn eigenvalues_increase_with_xi() {
        let n = 32;
        let weak = eigen_sym(&assemble_u(&USpec::new(1.0, 0.5, 1.0, 1.0).unwrap(), n).unwrap())
            .unwrap();
        let strong = eigen_sym(&assemble_u(&USpec::new(1.0, 0.5, 1.0, 2.0).unwrap(), n).unwrap())
            .unwrap();
        for k in 0..n / 4 {
            assert!(strong.values[k] > weak.values[k]);
        }
    }

    #[test]
    fn halfline_roots_and_admissibility() {
        let p = halfline_reduce(HalflineKind::P, 1.0, 0.0, 0.5).unwrap();
        assert_eq!(p[0].root, 0.0);
        assert_eq!(p[0].exponent, 1.0);
        assert!(p[0].admissible);
        assert_eq!(p[1].root, -1.0);
        assert_eq!(p[1].exponent, 0.0);
        assert!(!p[1].admissible);

        let q = halfline_reduce(HalflineKind::Q, 1.0, 0.0, 0.5).unwrap();
        assert_eq!(q[0].root, 0.0);
        assert!(q[0].admissible);
        assert_eq!(q[1].root, -3.0);
        assert_eq!(q[1].exponent, -2.0);
        assert!(!q[1].admissible);

        assert!(matches!(
            halfline_reduce(HalflineKind::P, 0.5, -1.0, 0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn halfline_spectrum_is_even_subsequence() {
        let spec = USpec::new(1.2, 0.5, 1.0, 1.0).unwrap();
        let full = eigen_sym(&assemble_u(&spec, 32).unwrap()).unwrap();
        let even = halfline_spectrum(HalflineKind::P, 1.2, 0.5, 1.0, 1.0, 16).unwrap();
        for j in 0..8 {
            assert_relative_eq!(full.values[2 * j], even.values[j], max_relative = 1e-10);
        }
    }

    #[test]
    fn witten_length_one_zero_mode_and_pairing() {
        let s = 1.5;
        let model = witten_build_length_one(1.0, 0.5, s, Sign::Plus).unwrap();
        let spectra = witten_spectrum(&model, 16).unwrap();
        let dr = spectra.iter().find(|c| c.component == DELTA_R && c.row.sigma == Some(1.0));
        let dr = dr.expect("root a = 0 row is admissible");
        assert!(dr.result.eigenvalues[0].abs() <= 1e-10 * s);
        for k in 1..8 {
            assert_relative_eq!(
                dr.result.eigenvalues[k] - dr.result.eigenvalues[k - 1],
                4.0 * s,
                max_relative = 1e-12
            );
        }
        let drp = spectra
            .iter()
            .find(|c| c.component == DELTA_RP1 && c.row.tau == Some(1.0))
            .expect("root b = 0 row is admissible");
        // One-step complex: the nonzero spectrum is shared across the pair.
        for k in 0..8 {
            assert_relative_eq!(
                dr.result.eigenvalues[k + 1],
                drp.result.eigenvalues[k],
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn witten_tables_admissibility() {
        let model = witten_build(1.0, 0.5, 1.0, 0.5, Sign::Plus).unwrap();
        let w_rows: Vec<&TableRow> =
            model.rows.iter().filter(|r| r.component == DELTA_R).collect();
        assert_eq!(w_rows.len(), 4);
        let row1 = w_rows
            .iter()
            .find(|r| r.a == Some(0.0) && r.b == Some(0.0))
            .unwrap();
        assert!(row1.admissible);
        assert_eq!(row1.sigma, Some(1.0));
        assert_eq!(row1.tau, Some(1.5));
        assert_eq!(row1.theta, Some(1.0));
        let row3 = w_rows
            .iter()
            .find(|r| r.a == Some(0.0) && r.b == Some(-4.0))
            .unwrap();
        assert_eq!(row3.theta, Some(-1.0));
        assert!(!row3.admissible);

        let model = witten_build(0.6, 0.5, 1.0, 0.5, Sign::Plus).unwrap();
        let q_bad = model
            .rows
            .iter()
            .find(|r| r.component == DELTA_RP1 && r.b == Some(-2.2))
            .unwrap();
        assert!(!q_bad.admissible);
        let q_good = model
            .rows
            .iter()
            .find(|r| r.component == DELTA_RP1 && r.b == Some(0.0))
            .unwrap();
        assert!(q_good.admissible);
    }

    #[test]
    fn witten_small_mu_approaches_unperturbed() {
        let deviation = |mu: f64| {
            let model = witten_build(1.0, 0.5, 1.0, mu, Sign::Plus).unwrap();
            let spectra = witten_spectrum(&model, 24).unwrap();
            let c = spectra
                .iter()
                .find(|c| c.component == DELTA_RM1 && c.row.sigma == Some(1.5))
                .unwrap();
            let shift = -(1.0 + 2.0 * 1.5);
            c.result
                .eigenvalues
                .iter()
                .enumerate()
                .take(6)
                .map(|(j, lam)| (lam - ((4.0 * j as f64 + 4.0) + shift)).abs())
                .fold(0.0f64, f64::max)
        };
        let d2 = deviation(1e-2);
        let d3 = deviation(1e-3);
        assert!(d2 < 1e-3);
        assert!(d3 < d2 / 50.0);
    }
}
