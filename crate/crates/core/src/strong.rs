//! Strong (projective) measurements: Born probabilities, collapse, and
//! conditional probabilities under postselection including the two-outcome
//! ABL rule.

use crate::error::{Error, Result};
use crate::linalg::{Projector, StateVector, STRUCTURAL_TOL};
use crate::scenario::Scenario;

/// Result of a projective measurement that found the outcome `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseOutcome {
    pub probability: f64,
    pub state: StateVector,
}

/// Clamp a computed probability into [0, 1], rejecting values that stray
/// further than [`STRUCTURAL_TOL`] outside.
fn checked_probability(p: f64) -> Result<f64> {
    if !(-STRUCTURAL_TOL..=1.0 + STRUCTURAL_TOL).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// `⟨ψ|P|ψ⟩`.
pub fn born_prob(state: &StateVector, p: &Projector) -> Result<f64> {
    let v = p.operator().matrix_element(state, state)?;
    checked_probability(v.re)
}

pub fn collapse(state: &StateVector, p: &Projector) -> Result<CollapseOutcome> {
    let raw = p.operator().apply(state)?;
    let norm_sqr = raw.norm().powi(2);
    if norm_sqr <= 0.0 {
        return Err(Error::ZeroProbability);
    }
    let probability = checked_probability(norm_sqr)?;
    Ok(CollapseOutcome {
        probability,
        state: raw.normalized().map_err(|_| Error::ZeroProbability)?,
    })
}

/// `|⟨f|U P|in⟩|²`: the joint probability of finding `P` at the
/// intermediate time and then passing the postselection.
pub fn cond_prob_post(s: &Scenario, p: &Projector) -> Result<f64> {
    let amp = s.transition(p.operator())?;
    checked_probability(amp.norm_sqr())
}

/// ABL probability of the outcome `P` in the two-outcome measurement {P, 1 − P}.
pub fn abl_prob(s: &Scenario, p: &Projector) -> Result<f64> {
    let yes = cond_prob_post(s, p)?;
    let no = cond_prob_post(s, &p.complement())?;
    let denom = yes + no;
    if denom <= 0.0 {
        return Err(Error::PostselectionImpossible);
    }
    checked_probability(yes / denom)
}

/// Residual of Bayes' rule
/// `prob(P|f,in)·prob(f|in) = prob(f|P,in)·prob(P|in)`.
///
/// `prob(f|in)` here is the postselection probability in the presence of
/// the {P, 1 − P} measurement. A null outcome (`born_prob = 0`) makes both
/// sides vanish and the residual is 0.
pub fn bayes_check(s: &Scenario, p: &Projector) -> Result<f64> {
    let prior = born_prob(s.pre_state(), p)?;
    if prior == 0.0 {
        return Ok(0.0);
    }
    let joint = cond_prob_post(s, p)?;
    let post_total = joint + cond_prob_post(s, &p.complement())?;
    if post_total <= 0.0 {
        return Err(Error::PostselectionImpossible);
    }
    let posterior = abl_prob(s, p)?;
    let likelihood = joint / prior;
    Ok((posterior * post_total - likelihood * prior).abs())
}
