//! Admissibility regions and empirical constant fits.
//!
//! The region predicates transcribe the defining implication lists verbatim:
//! each clause is evaluated as (not antecedent) or consequent, membership is
//! the conjunction over clauses, and comparisons are exact (strict vs weak as
//! written), with a signed margin reported per clause instead of a tolerance.
//! Comma-lists on the small side of an inequality are normalized to max(...),
//! on the large side to min(...).
//!
//! The constant fits are empirical stand-ins for the existential constants of
//! the bound statements (D, C, E, omega, C0, C1); they are regression anchors,
//! not certified bounds.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coeffs::{self, CoeffMatrix, MixedParams, TParams};
use crate::specfun;
use crate::{Error, Result};

/// Fixed seed for the random trial vectors of the form-bound fits.
pub const FIT_SEED: u64 = 0x00d1_5eed;

/// The eight admissibility regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegionId {
    J1,
    J2,
    K1,
    K1p,
    K2,
    K2p,
    S1,
    S2,
}

impl RegionId {
    pub fn arity(&self) -> usize {
        match self {
            RegionId::J1 | RegionId::J2 => 2,
            RegionId::K1 | RegionId::K1p | RegionId::K2 | RegionId::K2p => 3,
            RegionId::S1 | RegionId::S2 => 4,
        }
    }

    pub fn parse(name: &str) -> Option<RegionId> {
        Some(match name {
            "J1" => RegionId::J1,
            "J2" => RegionId::J2,
            "K1" => RegionId::K1,
            "K1p" => RegionId::K1p,
            "K2" => RegionId::K2,
            "K2p" => RegionId::K2p,
            "S1" => RegionId::S1,
            "S2" => RegionId::S2,
            _ => return None,
        })
    }
}

/// One implication clause of a region definition. `margin` is the smallest
/// slack among the consequent's strict inequalities (most negative violation
/// for a failing clause); it is +inf when the antecedent does not apply.
#[derive(Debug, Clone, Serialize)]
pub struct ClauseReport {
    pub label: String,
    pub applies: bool,
    pub holds: bool,
    pub margin: f64,
}

/// Conjunction of strict inequalities, tracked as (holds, min slack).
#[derive(Debug, Clone, Copy)]
struct Conj {
    holds: bool,
    margin: f64,
}

impl Conj {
    fn lt(a: f64, b: f64) -> Conj {
        Conj { holds: a < b, margin: b - a }
    }

    fn and(self, other: Conj) -> Conj {
        Conj { holds: self.holds && other.holds, margin: self.margin.min(other.margin) }
    }

    fn or(self, other: Conj) -> Conj {
        if self.margin >= other.margin {
            Conj { holds: self.holds || other.holds, margin: self.margin }
        } else {
            Conj { holds: self.holds || other.holds, margin: other.margin }
        }
    }
}

fn lt(a: f64, b: f64) -> Conj {
    Conj::lt(a, b)
}

fn gt(a: f64, b: f64) -> Conj {
    Conj::lt(b, a)
}

fn clause(label: &str, applies: bool, consequent: Conj) -> ClauseReport {
    ClauseReport {
        label: label.to_string(),
        applies,
        holds: !applies || consequent.holds,
        margin: if applies { consequent.margin } else { f64::INFINITY },
    }
}

fn min2(a: f64, b: f64) -> f64 {
    a.min(b)
}

fn max2(a: f64, b: f64) -> f64 {
    a.max(b)
}

fn j1_clauses(s: f64, t: f64) -> Vec<ClauseReport> {
    vec![
        clause(
            "1/2 <= tau < sigma => sigma-1 < tau < sigma/2+1/4",
            0.5 <= t && t < s,
            gt(t, s - 1.0).and(lt(t, s / 2.0 + 0.25)),
        ),
        clause(
            "max(1/2, sigma) <= tau => tau < min(sigma/2+1/4, sigma+1)",
            max2(0.5, s) <= t,
            lt(t, min2(s / 2.0 + 0.25, s + 1.0)),
        ),
        clause(
            "tau < min(1/2, sigma) => max(sigma/3, sigma-1) < tau < sigma/2+1/4",
            t < min2(0.5, s),
            gt(t, max2(s / 3.0, s - 1.0)).and(lt(t, s / 2.0 + 0.25)),
        ),
        clause(
            "sigma <= tau < 1/2 => -sigma < tau < min(sigma/2+1/4, sigma+1)",
            s <= t && t < 0.5,
            gt(t, -s).and(lt(t, min2(s / 2.0 + 0.25, s + 1.0))),
        ),
    ]
}

fn j2_clauses(s: f64, t: f64) -> Vec<ClauseReport> {
    vec![
        clause(
            "1/2 <= tau < sigma-1/2 => sigma-1 < tau < sigma/2+1/4",
            0.5 <= t && t < s - 0.5,
            gt(t, s - 1.0).and(lt(t, s / 2.0 + 0.25)),
        ),
        clause(
            "max(1/2, sigma-1/2) <= tau => tau < min(sigma/2+1/4, sigma)",
            max2(0.5, s - 0.5) <= t,
            lt(t, min2(s / 2.0 + 0.25, s)),
        ),
        clause(
            "0 < tau < min(1/2, sigma-1/2) => max(-sigma/3, sigma-1) < tau < sigma/2+1/4 \
             or sigma-1 < tau < sigma/2-1/4",
            0.0 < t && t < min2(0.5, s - 0.5),
            gt(t, max2(-s / 3.0, s - 1.0))
                .and(lt(t, s / 2.0 + 0.25))
                .or(gt(t, s - 1.0).and(lt(t, s / 2.0 - 0.25))),
        ),
        clause(
            "0 < tau < 1/2, sigma-1/2 <= tau => 1-sigma < tau < min(sigma/2+1/4, sigma) \
             or tau < min(sigma/2-1/4, sigma)",
            0.0 < t && t < 0.5 && s - 0.5 <= t,
            gt(t, 1.0 - s)
                .and(lt(t, min2(s / 2.0 + 0.25, s)))
                .or(lt(t, min2(s / 2.0 - 0.25, s))),
        ),
        clause(
            "0 = tau < sigma-1/2 => 1/2 < sigma < 1",
            t == 0.0 && t < s - 0.5,
            gt(s, 0.5).and(lt(s, 1.0)),
        ),
        clause("sigma-1/2 <= tau = 0 => 1/2 < sigma", t == 0.0 && s - 0.5 <= t, gt(s, 0.5)),
        clause(
            "tau < min(0, sigma-1/2) => max(1/4-sigma/2, (sigma-1)/3, sigma-1) < tau",
            t < min2(0.0, s - 0.5),
            gt(t, max2(0.25 - s / 2.0, max2((s - 1.0) / 3.0, s - 1.0))),
        ),
        clause(
            "sigma-1/2 <= tau < 0 => max(1/4-sigma/2, -sigma) < tau < sigma",
            s - 0.5 <= t && t < 0.0,
            gt(t, max2(0.25 - s / 2.0, -s)).and(lt(t, s)),
        ),
    ]
}

fn k1_clauses(s: f64, t: f64, h: f64) -> Vec<ClauseReport> {
    vec![
        clause(
            "theta <= sigma-1, theta < tau+1 => theta > max(sigma/2-3/4, (sigma+tau)/4)",
            h <= s - 1.0 && h < t + 1.0,
            gt(h, max2(s / 2.0 - 0.75, (s + t) / 4.0)),
        ),
        clause(
            "tau+1 <= theta <= sigma-1 => theta > max(sigma/2-3/4, (sigma-tau)/2-1)",
            t + 1.0 <= h && h <= s - 1.0,
            gt(h, max2(s / 2.0 - 0.75, (s - t) / 2.0 - 1.0)),
        ),
        clause(
            "sigma-1 < theta < tau+1 => theta > max(sigma/2-3/4, (tau-sigma)/2+1, (sigma+tau)/4)",
            s - 1.0 < h && h < t + 1.0,
            gt(h, max2(s / 2.0 - 0.75, max2((t - s) / 2.0 + 1.0, (s + t) / 4.0))),
        ),
        clause(
            "sigma-1 < theta, tau+1 <= theta => theta > max(sigma/2-3/4, (sigma-tau)/2-1), sigma+tau > 0",
            s - 1.0 < h && t + 1.0 <= h,
            gt(h, max2(s / 2.0 - 0.75, (s - t) / 2.0 - 1.0)).and(gt(s + t, 0.0)),
        ),
    ]
}

fn k1p_clauses(s: f64, t: f64, h: f64) -> Vec<ClauseReport> {
    vec![
        clause(
            "theta < sigma, theta <= tau => theta > max(tau/2-1/4, (sigma+tau)/4)",
            h < s && h <= t,
            gt(h, max2(t / 2.0 - 0.25, (s + t) / 4.0)),
        ),
        clause(
            "sigma <= theta <= tau => theta > max(tau/2-1/4, (tau-sigma)/2)",
            s <= h && h <= t,
            gt(h, max2(t / 2.0 - 0.25, (t - s) / 2.0)),
        ),
        clause(
            "tau < theta < sigma => theta > max(tau/2-1/4, (sigma-tau)/2, (sigma+tau)/4)",
            t < h && h < s,
            gt(h, max2(t / 2.0 - 0.25, max2((s - t) / 2.0, (s + t) / 4.0))),
        ),
        clause(
            "sigma <= theta, tau < theta => theta > max(tau/2-1/4, (tau-sigma)/2), sigma+tau > 0",
            s <= h && t < h,
            gt(h, max2(t / 2.0 - 0.25, (t - s) / 2.0)).and(gt(s + t, 0.0)),
        ),
    ]
}

fn k2_clauses(s: f64, t: f64, h: f64) -> Vec<ClauseReport> {
    vec![
        clause(
            "theta <= sigma-1, theta < tau+1/2 => theta > max(sigma/2-3/4, (sigma+tau)/4)",
            h <= s - 1.0 && h < t + 0.5,
            gt(h, max2(s / 2.0 - 0.75, (s + t) / 4.0)),
        ),
        clause(
            "tau+1/2 <= theta <= sigma-1 => theta > max(sigma/2-3/4, (sigma-tau-1)/2)",
            t + 0.5 <= h && h <= s - 1.0,
            gt(h, max2(s / 2.0 - 0.75, (s - t - 1.0) / 2.0)),
        ),
        clause(
            "sigma-1 < theta < min(sigma-1/2, tau+1/2) => \
             theta > max(sigma/2-3/4, (tau-sigma)/2+1, (sigma+tau)/4) \
             or theta > max(sigma/2-1/4, (sigma+tau)/4)",
            s - 1.0 < h && h < min2(s - 0.5, t + 0.5),
            gt(h, max2(s / 2.0 - 0.75, max2((t - s) / 2.0 + 1.0, (s + t) / 4.0)))
                .or(gt(h, max2(s / 2.0 - 0.25, (s + t) / 4.0))),
        ),
        clause(
            "sigma-1 < theta < sigma-1/2, tau+1/2 <= theta => \
             theta > max(sigma/2-3/4, (sigma-tau-1)/2), sigma+tau > 1 \
             or theta > max(sigma/2-1/4, (sigma-tau-1)/2)",
            s - 1.0 < h && h < s - 0.5 && t + 0.5 <= h,
            gt(h, max2(s / 2.0 - 0.75, (s - t - 1.0) / 2.0))
                .and(gt(s + t, 1.0))
                .or(gt(h, max2(s / 2.0 - 0.25, (s - t - 1.0) / 2.0))),
        ),
        clause(
            "sigma-1/2 = theta < tau+1/2 => sigma > max(1/2, (tau+2)/3)",
            s - 0.5 == h && h < t + 0.5,
            gt(s, max2(0.5, (t + 2.0) / 3.0)),
        ),
        clause(
            "tau+1/2 <= theta = sigma-1/2 => sigma > max(1/2, -tau)",
            t + 0.5 <= h && h == s - 0.5,
            gt(s, max2(0.5, -t)),
        ),
        clause(
            "sigma-1/2 < theta < tau+1/2 => theta > max(sigma/2-1/4, (tau-sigma+1)/2, (sigma+tau)/4)",
            s - 0.5 < h && h < t + 0.5,
            gt(h, max2(s / 2.0 - 0.25, max2((t - s + 1.0) / 2.0, (s + t) / 4.0))),
        ),
        clause(
            "sigma-1/2 < theta, tau+1/2 <= theta => theta > max(sigma/2-1/4, (sigma-tau-1)/2), sigma+tau > 0",
            s - 0.5 < h && t + 0.5 <= h,
            gt(h, max2(s / 2.0 - 0.25, (s - t - 1.0) / 2.0)).and(gt(s + t, 0.0)),
        ),
    ]
}

fn k2p_clauses(s: f64, t: f64, h: f64) -> Vec<ClauseReport> {
    vec![
        clause(
            "theta <= sigma-1/2, theta < tau => theta > max(tau/2-1/4, (sigma+tau)/4)",
            h <= s - 0.5 && h < t,
            gt(h, max2(t / 2.0 - 0.25, (s + t) / 4.0)),
        ),
        clause(
            "sigma-1/2 <= theta <= tau => theta > max(tau/2-1/4, (tau-sigma+1)/2)",
            s - 0.5 <= h && h <= t,
            gt(h, max2(t / 2.0 - 0.25, (t - s + 1.0) / 2.0)),
        ),
        clause(
            "tau < theta < min(sigma-1/2, tau+1/2) => \
             theta > max(tau/2-1/4, (sigma-tau)/2, (sigma+tau)/4) \
             or theta > max(tau/2+1/4, (sigma+tau)/4)",
            t < h && h < min2(s - 0.5, t + 0.5),
            gt(h, max2(t / 2.0 - 0.25, max2((s - t) / 2.0, (s + t) / 4.0)))
                .or(gt(h, max2(t / 2.0 + 0.25, (s + t) / 4.0))),
        ),
        clause(
            "sigma-1/2 <= theta, tau < theta < tau+1/2 => \
             theta > max(tau/2-1/4, (tau-sigma+1)/2), sigma+tau > 1 \
             or theta > max(tau/2+1/4, (tau-sigma+1)/2)",
            s - 0.5 <= h && t < h && h < t + 0.5,
            gt(h, max2(t / 2.0 - 0.25, (t - s + 1.0) / 2.0))
                .and(gt(s + t, 1.0))
                .or(gt(h, max2(t / 2.0 + 0.25, (t - s + 1.0) / 2.0))),
        ),
        clause(
            "tau+1/2 = theta < sigma-1/2 => tau > max(-1/2, (sigma-2)/3)",
            t + 0.5 == h && h < s - 0.5,
            gt(t, max2(-0.5, (s - 2.0) / 3.0)),
        ),
        clause(
            "sigma-1/2 <= theta = tau+1/2 => tau > max(-1/2, -sigma)",
            s - 0.5 <= h && h == t + 0.5,
            gt(t, max2(-0.5, -s)),
        ),
        clause(
            "tau+1/2 < theta < sigma-1/2 => theta > max(tau/2+1/4, (sigma-tau-1)/2, (sigma+tau)/4)",
            t + 0.5 < h && h < s - 0.5,
            gt(h, max2(t / 2.0 + 0.25, max2((s - t - 1.0) / 2.0, (s + t) / 4.0))),
        ),
        clause(
            "sigma-1/2 <= theta, tau+1/2 < theta => theta > max(tau/2+1/4, (tau-sigma+1)/2), sigma+tau > 0",
            s - 0.5 <= h && t + 0.5 < h,
            gt(h, max2(t / 2.0 + 0.25, (t - s + 1.0) / 2.0)).and(gt(s + t, 0.0)),
        ),
    ]
}

fn s1_clauses(a: f64, b: f64, g: f64, d: f64) -> Vec<ClauseReport> {
    vec![
        clause(
            "gamma >= 0, delta > -1 => a+g, a+b+g+d+1 < 0",
            g >= 0.0 && d > -1.0,
            lt(a + g, 0.0).and(lt(a + b + g + d + 1.0, 0.0)),
        ),
        clause(
            "gamma >= 0, delta <= -1 => a+g, a+b+g < 0",
            g >= 0.0 && d <= -1.0,
            lt(a + g, 0.0).and(lt(a + b + g, 0.0)),
        ),
        clause(
            "gamma < 0, delta > -1 => a+g, a+b+d+1, a+b+g+d+1 < 0",
            g < 0.0 && d > -1.0,
            lt(a + g, 0.0).and(lt(a + b + d + 1.0, 0.0)).and(lt(a + b + g + d + 1.0, 0.0)),
        ),
        clause(
            "gamma < 0, delta <= -1 => a+b, a+g, a+b+g < 0",
            g < 0.0 && d <= -1.0,
            lt(a + b, 0.0).and(lt(a + g, 0.0)).and(lt(a + b + g, 0.0)),
        ),
    ]
}

fn s2_clauses(a: f64, b: f64, g: f64, d: f64) -> Vec<ClauseReport> {
    vec![
        clause(
            "gamma >= 0, delta > -1/2 => a+g, a+b+g+d+1 < 0",
            g >= 0.0 && d > -0.5,
            lt(a + g, 0.0).and(lt(a + b + g + d + 1.0, 0.0)),
        ),
        clause(
            "gamma >= 0, delta <= -1/2 => a+g, a+b+g+1/2 < 0",
            g >= 0.0 && d <= -0.5,
            lt(a + g, 0.0).and(lt(a + b + g + 0.5, 0.0)),
        ),
        clause(
            "-1/2 < gamma < 0, delta > -1/2 => a+g, a+b+d+1, a+b+g+d+1 < 0 \
             or a+g+1/2, a+b+g+d+1 < 0",
            -0.5 < g && g < 0.0 && d > -0.5,
            lt(a + g, 0.0)
                .and(lt(a + b + d + 1.0, 0.0))
                .and(lt(a + b + g + d + 1.0, 0.0))
                .or(lt(a + g + 0.5, 0.0).and(lt(a + b + g + d + 1.0, 0.0))),
        ),
        clause(
            "-1/2 < gamma < 0, delta <= -1/2 => a+g, a+b+1/2, a+b+g+1/2 < 0 \
             or a+g+1/2, a+b+g+1/2 < 0",
            -0.5 < g && g < 0.0 && d <= -0.5,
            lt(a + g, 0.0)
                .and(lt(a + b + 0.5, 0.0))
                .and(lt(a + b + g + 0.5, 0.0))
                .or(lt(a + g + 0.5, 0.0).and(lt(a + b + g + 0.5, 0.0))),
        ),
        clause(
            "gamma = -1/2, delta > -1/2 => a, a+b+d+1/2 < 0",
            g == -0.5 && d > -0.5,
            lt(a, 0.0).and(lt(a + b + d + 0.5, 0.0)),
        ),
        clause(
            "gamma = -1/2, delta <= -1/2 => a, a+b < 0",
            g == -0.5 && d <= -0.5,
            lt(a, 0.0).and(lt(a + b, 0.0)),
        ),
        clause(
            "gamma < -1/2, delta > -1/2 => a+g+1/2, a+b+d+1/2, a+b+g+d+1 < 0",
            g < -0.5 && d > -0.5,
            lt(a + g + 0.5, 0.0).and(lt(a + b + d + 0.5, 0.0)).and(lt(a + b + g + d + 1.0, 0.0)),
        ),
        clause(
            "gamma < -1/2, delta <= -1/2 => a+g+1/2, a+b, a+b+g+1/2 < 0",
            g < -0.5 && d <= -0.5,
            lt(a + g + 0.5, 0.0).and(lt(a + b, 0.0)).and(lt(a + b + g + 0.5, 0.0)),
        ),
    ]
}

/// Per-clause evaluation of a region definition at a point.
pub fn region_clauses(region: RegionId, point: &[f64]) -> Result<Vec<ClauseReport>> {
    if point.len() != region.arity() {
        return Err(Error::Arity(format!(
            "{region:?} takes {} coordinates, got {}",
            region.arity(),
            point.len()
        )));
    }
    Ok(match region {
        RegionId::J1 => j1_clauses(point[0], point[1]),
        RegionId::J2 => j2_clauses(point[0], point[1]),
        RegionId::K1 => k1_clauses(point[0], point[1], point[2]),
        RegionId::K1p => k1p_clauses(point[0], point[1], point[2]),
        RegionId::K2 => k2_clauses(point[0], point[1], point[2]),
        RegionId::K2p => k2p_clauses(point[0], point[1], point[2]),
        RegionId::S1 => s1_clauses(point[0], point[1], point[2], point[3]),
        RegionId::S2 => s2_clauses(point[0], point[1], point[2], point[3]),
    })
}

/// Membership: the conjunction over all clauses of the region's definition.
pub fn region_member(region: RegionId, point: &[f64]) -> Result<bool> {
    Ok(region_clauses(region, point)?.iter().all(|c| c.holds))
}

/// Which coincidence case of the main mixed-form theorem applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseTag {
    A,
    B,
    C,
    D,
    Vacuous,
}

/// Outcome of the hypothesis check for the mixed-form theorem.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub ok: bool,
    pub case: CaseTag,
    pub violated: Vec<String>,
}

fn is_neg_nat(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Checks the standing hypotheses (0 < u < 1, sigma > u-1/2, tau > u-3/2,
/// theta > -1/2) and then exactly the applicable coincidence case. When no
/// case's antecedent applies the result is ok with a vacuous tag.
pub fn theorem_v_hypotheses(sigma: f64, tau: f64, theta: f64, u: f64) -> HypothesisReport {
    let mut violated = Vec::new();
    if !(u > 0.0 && u < 1.0) {
        violated.push(format!("0 < u < 1 (u = {u})"));
    }
    if !(sigma > u - 0.5) {
        violated.push(format!("sigma > u - 1/2 (sigma = {sigma}, u = {u})"));
    }
    if !(tau > u - 1.5) {
        violated.push(format!("tau > u - 3/2 (tau = {tau}, u = {u})"));
    }
    if !(theta > -0.5) {
        violated.push(format!("theta > -1/2 (theta = {theta})"));
    }

    let case = if sigma == theta && theta != tau && !is_neg_nat(tau - sigma) {
        if !(sigma - 1.0 < tau && tau < min2(sigma + 1.0, 2.0 * sigma + 0.5)) {
            violated.push(format!(
                "case (a): sigma-1 < tau < min(sigma+1, 2 sigma+1/2) \
                 (sigma = {sigma}, tau = {tau})"
            ));
        }
        CaseTag::A
    } else if sigma != theta && theta == tau && !is_neg_nat(sigma - tau) {
        let in_j1 = region_member(RegionId::J1, &[sigma, tau]).unwrap();
        let in_j2 = region_member(RegionId::J2, &[sigma, tau]).unwrap();
        if !(in_j1 || in_j2) {
            violated.push(format!(
                "case (b): (sigma, tau) in J1 union J2 (sigma = {sigma}, tau = {tau})"
            ));
        }
        CaseTag::B
    } else if sigma != theta && theta == tau + 1.0 && !is_neg_nat(sigma - tau - 1.0) {
        if !(tau < min2(1.5 * sigma - 2.25, sigma - 5.0 / 3.0)) {
            violated.push(format!(
                "case (c): tau < min(3 sigma/2 - 9/4, sigma - 5/3) \
                 (sigma = {sigma}, tau = {tau})"
            ));
        }
        CaseTag::C
    } else if sigma != theta
        && theta != tau
        && !is_neg_nat(sigma - theta)
        && !is_neg_nat(tau - theta)
    {
        let p = [sigma, tau, theta];
        let in_k = region_member(RegionId::K1, &p).unwrap() || region_member(RegionId::K2, &p).unwrap();
        let in_kp =
            region_member(RegionId::K1p, &p).unwrap() || region_member(RegionId::K2p, &p).unwrap();
        if !(in_k && in_kp) {
            violated.push(format!(
                "case (d): (sigma, tau, theta) in (K1 union K2) intersect (K1' union K2') \
                 (sigma = {sigma}, tau = {tau}, theta = {theta})"
            ));
        }
        CaseTag::D
    } else {
        CaseTag::Vacuous
    };

    HypothesisReport { ok: violated.is_empty(), case, violated }
}

/// An empirically fitted constant with its fitting window and residual.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub constant_name: String,
    pub fitted_value: f64,
    pub window: (usize, usize),
    pub residual: f64,
}

/// Lower-bound constant for the diagonal: the smallest value of
/// `c_{k,k} (k+1)^u s^{-u}` over `k <= max_index`. The residual is the spread
/// of the quantity over the upper half of the window.
pub fn fit_lower_constant(params: &TParams, max_index: usize) -> Result<FitReport> {
    let table = coeffs::sigma_table(params.sigma, params.u, max_index + 1)?;
    let c0 = coeffs::c00(params)?;
    let quantity = |k: usize| {
        // Pi_{k,k} = 1 and the sign is positive on the diagonal.
        c0 * table.get(k as u32, k as u32) * ((k + 1) as f64).powf(params.u)
            * params.s.powf(-params.u)
    };
    let mut d_hat = f64::INFINITY;
    for k in 0..=max_index {
        d_hat = d_hat.min(quantity(k));
    }
    if !(d_hat > 0.0) {
        return Err(Error::Domain(format!(
            "diagonal lower constant came out nonpositive: {d_hat}"
        )));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in max_index / 2..=max_index {
        let q = quantity(k);
        lo = lo.min(q);
        hi = hi.max(q);
    }
    Ok(FitReport {
        constant_name: "D".into(),
        fitted_value: d_hat,
        window: (max_index / 2, max_index),
        residual: hi - lo,
    })
}

fn unit_trials(rng: &mut ChaCha8Rng, trials: usize, n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(trials + n + n * (n - 1));
    // Coordinate vectors and two-mode combinations keep the fit honest on
    // sparse extremes that dilute away in dense random vectors.
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        out.push(e);
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for k in 0..n.min(24) {
        for l in k + 1..n.min(24) {
            let mut e = vec![0.0; n];
            e[k] = r;
            e[l] = r;
            out.push(e);
            let mut e = vec![0.0; n];
            e[k] = r;
            e[l] = -r;
            out.push(e);
        }
    }
    for i in 0..trials {
        // Support sizes sweep the scales between sparse and dense.
        let support = (2usize << (i % 6)).min(n);
        let mut t = vec![0.0; n];
        if support == n {
            for x in t.iter_mut() {
                *x = rng.gen_range(-1.0..1.0);
            }
        } else {
            for _ in 0..support {
                let k = rng.gen_range(0..n);
                t[k] = rng.gen_range(-1.0..1.0);
            }
        }
        let norm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for x in t.iter_mut() {
                *x /= norm;
            }
        } else {
            t[0] = 1.0;
        }
        out.push(t);
    }
    out
}

fn spread_stats(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Upper-bound constant for the full quadratic form: the largest value of
/// `(t(phi) - eps s^{u-1} j(phi)) s^{-u}` over unit trial vectors, clamped at
/// zero. `j(phi) = sum (2k+1+2 sigma) s |t_k|^2`.
pub fn fit_form_bound(
    params: &TParams,
    epsilon: f64,
    trials: usize,
    order: usize,
) -> Result<FitReport> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let c = coeffs::t_matrix_closed(params, order)?;
    let mut rng = ChaCha8Rng::seed_from_u64(FIT_SEED);
    let mut values = Vec::new();
    for t in unit_trials(&mut rng, trials, order) {
        let mut tq = 0.0;
        let mut j = 0.0;
        for (k, tk) in t.iter().enumerate() {
            if *tk == 0.0 {
                continue;
            }
            j += (2.0 * k as f64 + 1.0 + 2.0 * params.sigma) * params.s * tk * tk;
            for (l, tl) in t.iter().enumerate() {
                if *tl != 0.0 {
                    tq += tk * tl * c.get(k, l);
                }
            }
        }
        values.push((tq - epsilon * params.s.powf(params.u - 1.0) * j) * params.s.powf(-params.u));
    }
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(FitReport {
        constant_name: "C".into(),
        fitted_value: best.max(0.0),
        window: (0, order),
        residual: spread_stats(&values),
    })
}

/// Upper-bound constant for the cross-parity form: the largest value of
/// `(|t'(phi)| - eps s^{(v-1)/2} j(phi)) s^{-(1+v)/2}` over unit trial
/// vectors in the interleaved-parity ordering, clamped at zero.
pub fn fit_tprime_bound(
    params: &MixedParams,
    u: f64,
    epsilon: f64,
    trials: usize,
    order: usize,
) -> Result<FitReport> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let hyp = theorem_v_hypotheses(params.sigma, params.tau, params.theta, u);
    if !hyp.ok {
        return Err(Error::Hypothesis { case: format!("{:?}", hyp.case), violated: hyp.violated });
    }
    let cp = coeffs::cprime_matrix(params, order)?;
    let v = params.v();
    let s = params.s;
    let mut rng = ChaCha8Rng::seed_from_u64(FIT_SEED);
    let mut values = Vec::new();
    for t in unit_trials(&mut rng, trials, order) {
        let mut tp = 0.0;
        let mut j = 0.0;
        for (k, tk) in t.iter().enumerate() {
            if *tk == 0.0 {
                continue;
            }
            let varsigma = if k % 2 == 0 { params.sigma } else { params.tau };
            j += (2.0 * k as f64 + 1.0 + 2.0 * varsigma) * s * tk * tk;
            if k % 2 == 0 {
                for (l, tl) in t.iter().enumerate().skip(1).step_by(2) {
                    if *tl != 0.0 {
                        tp += tk * tl * cp.get(k, l);
                    }
                }
            }
        }
        values.push((tp.abs() - epsilon * s.powf((v - 1.0) / 2.0) * j) * s.powf(-(1.0 + v) / 2.0));
    }
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(FitReport {
        constant_name: "E".into(),
        fitted_value: best.max(0.0),
        window: (0, order),
        residual: spread_stats(&values),
    })
}

/// Least-squares decay exponent for the envelope bound
/// `|entry| <= const * ((m+1)(n+1))^{-omega}`, over nonzero entries with both
/// indices at least 8, where `m`, `n` are the sector indices `k/2`, `l/2`.
///
/// Entries at the same product `(m+1)(n+1)` vary over orders of magnitude
/// (off-diagonal entries are far smaller than the bound), so a pooled
/// regression measures the wrong thing; the fit runs on the per-bin maxima of
/// `log|entry|` over half-octave bins of the product, which is the empirical
/// envelope the bound speaks about.
pub fn fit_decay_exponent(matrix: &CoeffMatrix) -> Result<FitReport> {
    let mut count = 0usize;
    let mut bins: std::collections::BTreeMap<i64, (f64, f64)> = std::collections::BTreeMap::new();
    for (k, row) in matrix.entries.iter().enumerate() {
        for (l, entry) in row.iter().enumerate() {
            if k < 8 || l < 8 || *entry == 0.0 {
                continue;
            }
            count += 1;
            let (m, n) = (k / 2, l / 2);
            let x = -((m as f64 + 1.0) * (n as f64 + 1.0)).ln();
            let y = entry.abs().ln();
            let bin = (2.0 * x / std::f64::consts::LN_2).round() as i64;
            bins.entry(bin)
                .and_modify(|(bx, by)| {
                    if y > *by {
                        *bx = x;
                        *by = y;
                    }
                })
                .or_insert((x, y));
        }
    }
    if count < 20 {
        return Err(Error::InsufficientData(format!(
            "decay fit needs at least 20 nonzero entries with indices >= 8, found {count}"
        )));
    }
    let xs: Vec<f64> = bins.values().map(|(x, _)| *x).collect();
    let ys: Vec<f64> = bins.values().map(|(_, y)| *y).collect();
    if xs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "decay fit needs at least 3 envelope bins, found {}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(FitReport {
        constant_name: "omega".into(),
        fitted_value: slope,
        window: (8, matrix.order),
        residual: rms,
    })
}

/// Sweeps the normalized Weierstrass product
/// `prod_{i=1}^p (1 - t/i) * (p+1)^t` over `p <= p_max` and fits the
/// two-sided bound constant `C0 = max(sup q, sup 1/q)`. The residual is the
/// spread of the normalized quantity.
pub fn fit_weierstrass_constant(t: f64, p_max: usize) -> Result<FitReport> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("Weierstrass sweep needs 0 < t < 1, got {t}")));
    }
    let mut ln_prod = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in 0..=p_max {
        if p > 0 {
            ln_prod += (1.0 - t / p as f64).ln();
        }
        let q = (ln_prod + t * ((p + 1) as f64).ln()).exp();
        lo = lo.min(q);
        hi = hi.max(q);
    }
    Ok(FitReport {
        constant_name: "C0".into(),
        fitted_value: hi.max(1.0 / lo),
        window: (0, p_max),
        residual: hi - lo,
    })
}

/// Sweeps the normalized Gamma ratio `Gamma(p+1)/Gamma(p+t) * (p+1)^{t-1}`
/// over `p <= p_max` and fits `C1 = max(sup q, sup 1/q)`.
pub fn fit_gautschi_constant(t: f64, p_max: usize) -> Result<FitReport> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("Gautschi sweep needs t > 0, got {t}")));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in 0..=p_max {
        let q = specfun::gamma_ratio(p as u32, t)? * ((p + 1) as f64).powf(t - 1.0);
        lo = lo.min(q);
        hi = hi.max(q);
    }
    Ok(FitReport {
        constant_name: "C1".into(),
        fitted_value: hi.max(1.0 / lo),
        window: (0, p_max),
        residual: hi - lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::Family;
    use approx::assert_relative_eq;

    #[test]
    fn region_arity_checks() {
        assert!(region_member(RegionId::J1, &[0.5]).is_err());
        assert!(region_member(RegionId::K1, &[0.5, 0.5]).is_err());
        assert!(region_member(RegionId::S1, &[0.0; 3]).is_err());
    }

    #[test]
    fn s1_examples() {
        assert!(region_member(RegionId::S1, &[-2.0, 0.0, 0.0, 0.0]).unwrap());
        assert!(!region_member(RegionId::S1, &[0.0, 0.0, 0.0, 0.0]).unwrap());
        // The sufficient condition of the five-inequality display.
        assert!(region_member(RegionId::S1, &[-3.0, 0.5, 0.5, -0.5]).unwrap());
    }

    #[test]
    fn j1_examples() {
        assert!(region_member(RegionId::J1, &[0.5, 0.4]).unwrap());
        // tau = sigma/2+1/4 boundary excluded (strict).
        assert!(!region_member(RegionId::J1, &[0.5, 0.5]).unwrap());
        assert!(region_member(RegionId::J1, &[0.9, 0.4]).unwrap());
    }

    #[test]
    fn j1_sufficient_subregion() {
        // max(-sigma, sigma/3, sigma-1) < tau < min(sigma/2+1/4, sigma+1)
        // implies membership. The window is nonempty exactly on the interval
        // -1/6 < sigma < 5/2; the binding pair at the top is
        // sigma-1 < sigma/2+1/4, i.e. sigma/2 < 5/4.
        for i in 0..80 {
            let s = -0.5 + 3.5 * i as f64 / 79.0;
            let lo = (-s).max(s / 3.0).max(s - 1.0);
            let hi = (s / 2.0 + 0.25).min(s + 1.0);
            if lo < hi {
                assert!(s > -1.0 / 6.0 - 1e-12 && s < 2.5 + 1e-12, "sigma = {s}");
                for j in 1..10 {
                    let t = lo + (hi - lo) * j as f64 / 10.0;
                    assert!(
                        region_member(RegionId::J1, &[s, t]).unwrap(),
                        "({s}, {t}) expected inside"
                    );
                }
            } else {
                assert!(!(-1.0 / 6.0 < s && s < 2.5), "window empty at sigma = {s}");
            }
        }
    }

    #[test]
    fn k1_sufficient_subregion() {
        // theta > max(sigma/2-3/4, (sigma-tau)/2, (tau-sigma)/2+1,
        // (sigma+tau)/4, tau/2-1/4) with sigma+tau > 0 implies membership of
        // K1 intersect K1'.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut hits = 0;
        for _ in 0..500 {
            let s = rng.gen_range(-1.0..3.0);
            let t = rng.gen_range(-1.0..3.0);
            if s + t <= 0.0 {
                continue;
            }
            let lo = (s / 2.0 - 0.75f64)
                .max((s - t) / 2.0)
                .max((t - s) / 2.0 + 1.0)
                .max((s + t) / 4.0)
                .max(t / 2.0 - 0.25);
            let h = lo + rng.gen_range(0.01..1.0);
            assert!(region_member(RegionId::K1, &[s, t, h]).unwrap(), "K1 at ({s},{t},{h})");
            assert!(region_member(RegionId::K1p, &[s, t, h]).unwrap(), "K1p at ({s},{t},{h})");
            hits += 1;
        }
        assert!(hits > 100);
    }

    #[test]
    fn hypothesis_cases() {
        let r = theorem_v_hypotheses(1.0, 1.0, 1.0, 0.5);
        assert!(r.ok);
        assert_eq!(r.case, CaseTag::Vacuous);

        let r = theorem_v_hypotheses(0.0, 0.4, 0.0, 0.4);
        assert!(r.ok);
        assert_eq!(r.case, CaseTag::A);

        let r = theorem_v_hypotheses(0.0, 0.6, 0.0, 0.4);
        assert!(!r.ok);
        assert_eq!(r.case, CaseTag::A);
        assert_eq!(r.violated.len(), 1);

        let r = theorem_v_hypotheses(0.9, 0.4, 0.4, 0.5);
        assert!(r.ok, "{:?}", r.violated);
        assert_eq!(r.case, CaseTag::B);

        let r = theorem_v_hypotheses(3.0, 0.3, 1.3, 0.5);
        assert!(r.ok, "{:?}", r.violated);
        assert_eq!(r.case, CaseTag::C);

        let r = theorem_v_hypotheses(0.5, 0.3, 1.0, 0.5);
        assert!(r.ok, "{:?}", r.violated);
        assert_eq!(r.case, CaseTag::D);

        // tau - sigma a negative integer makes the (a) antecedent false.
        let r = theorem_v_hypotheses(1.5, 0.5, 1.5, 0.5);
        assert_eq!(r.case, CaseTag::Vacuous);

        // Standing hypothesis violation is always reported.
        let r = theorem_v_hypotheses(1.0, 1.0, 1.0, 1.5);
        assert!(!r.ok);
    }

    #[test]
    fn lower_constant_positive_and_scale_invariant() {
        let p1 = TParams::new(1.0, 0.5, 1.0).unwrap();
        let p4 = TParams::new(1.0, 0.5, 4.0).unwrap();
        let f1 = fit_lower_constant(&p1, 200).unwrap();
        let f4 = fit_lower_constant(&p4, 200).unwrap();
        assert!(f1.fitted_value > 0.0);
        assert_relative_eq!(f1.fitted_value, f4.fitted_value, max_relative = 1e-10);
        // Larger window cannot raise the minimum.
        let f2 = fit_lower_constant(&p1, 400).unwrap();
        assert!(f2.fitted_value <= f1.fitted_value + 1e-15);
    }

    #[test]
    fn form_bound_limits() {
        let p = TParams::new(1.0, 0.5, 1.0).unwrap();
        // A huge epsilon drives the fitted constant to the zero clamp.
        let f = fit_form_bound(&p, 1e6, 20, 16).unwrap();
        assert_eq!(f.fitted_value, 0.0);
        let f = fit_form_bound(&p, 0.1, 50, 32).unwrap();
        assert!(f.fitted_value >= 0.0);
        // The single-mode trial bounds c_00 - eps (1+2 sigma).
        let c0 = coeffs::c00(&p).unwrap();
        assert!(f.fitted_value >= c0 - 0.1 * (1.0 + 2.0 * p.sigma) - 1e-12);
    }

    #[test]
    fn tprime_bound_basics() {
        let m = MixedParams::new(0.5, 0.5, 0.5, 1.0).unwrap();
        let f = fit_tprime_bound(&m, 0.5, 0.1, 50, 32).unwrap();
        assert!(f.fitted_value > 0.0 && f.fitted_value.is_finite());
        // s-independence after normalization.
        let m4 = MixedParams::new(0.5, 0.5, 0.5, 4.0).unwrap();
        let f4 = fit_tprime_bound(&m4, 0.5, 0.1, 50, 32).unwrap();
        assert_relative_eq!(f.fitted_value, f4.fitted_value, max_relative = 1e-9);
        // Hypothesis failure is refused.
        let bad = MixedParams::new(0.0, 0.6, 0.0, 1.0).unwrap();
        assert!(matches!(
            fit_tprime_bound(&bad, 0.4, 0.1, 10, 16),
            Err(Error::Hypothesis { .. })
        ));
    }

    #[test]
    fn decay_exponent_positive() {
        let p = TParams::new(1.0, 0.5, 1.0).unwrap();
        let d = coeffs::d_matrix_closed(&p, 64).unwrap();
        let f = fit_decay_exponent(&d).unwrap();
        assert!(f.fitted_value > 0.0, "omega = {}", f.fitted_value);

        let m = MixedParams::new(0.5, 0.5, 0.5, 1.0).unwrap();
        let cp = coeffs::cprime_matrix(&m, 64).unwrap();
        let f = fit_decay_exponent(&cp).unwrap();
        assert!(f.fitted_value > 0.0, "omega = {}", f.fitted_value);

        let zeros = CoeffMatrix {
            family: Family::D,
            params: coeffs::CoeffParamSet::T(p),
            order: 32,
            method: coeffs::Method::ClosedForm,
            entries: vec![vec![0.0; 32]; 32],
        };
        assert!(matches!(fit_decay_exponent(&zeros), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn product_constant_sweeps() {
        let f = fit_weierstrass_constant(0.5, 2000).unwrap();
        assert!(f.fitted_value >= 1.0 && f.fitted_value < 10.0);
        let f = fit_gautschi_constant(1.7, 2000).unwrap();
        assert!(f.fitted_value >= 1.0 && f.fitted_value < 10.0);
        // t = 1 makes the ratio and the normalization exactly 1.
        let f = fit_gautschi_constant(1.0, 100).unwrap();
        assert_relative_eq!(f.fitted_value, 1.0, max_relative = 1e-12);
        assert!(fit_weierstrass_constant(1.2, 10).is_err());
    }
}
