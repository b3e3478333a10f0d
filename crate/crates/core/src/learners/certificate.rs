use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ModelKind;
use crate::error::{Error, Result};
use crate::hypergraph::{growth_stats, Hypergraph, WeightScheme};

/// Form of the support-recovery probability lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbabilityForm {
    /// `(1 − 1/(1 + c²n))^n` for an unspecified constant `c`; tends to `1 − e^{−1/c²}`, not 1.
    BoundedBelowOne,
    /// `1 − O(1/n)`.
    ApproachesOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsistencyCertificate {
    pub model: ModelKind,
    pub gamma_relevant: f64,
    pub gamma_irrelevant: f64,
    pub noise_sd: f64,
    /// `2√2·δ/√π`, the gap the noise alone can close.
    pub noise_gap: f64,
    /// `γ_i − γ_r > 2√2·δ/√π`.
    pub gap_condition: bool,
    /// Upper end of the admissible λ interval; zero when the gap condition fails.
    pub lambda_max: f64,
    pub d_max: f64,
    pub r_max: f64,
    pub probability: ProbabilityForm,
}

/// λ bound under which the hyperedge-selection (half range, unit weights) or joint-selection
/// (mean absolute deviation) model recovers the relevant/irrelevant split:
///
/// * hyperedge selection: `λ < (√π(γ_i − γ_r) − 2√2δ) / (D√π)`
/// * joint selection: `λ < (√π(γ_i − γ_r) − 2√2δ) / (2√π D R)`
///
/// Both are evaluated as `(gap − 2√2δ/√π) / denominator` so that the sign of the bound and
/// the gap condition agree bit for bit.
pub fn sparsistency_certificate(
    h: &Hypergraph,
    model: ModelKind,
    gamma_relevant: f64,
    gamma_irrelevant: f64,
    noise_sd: f64,
    ws: WeightScheme,
) -> Result<SparsistencyCertificate> {
    if !(gamma_irrelevant > gamma_relevant && gamma_relevant >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need γ_i > γ_r ≥ 0, got γ_r = {gamma_relevant}, γ_i = {gamma_irrelevant}"
        )));
    }
    if !(noise_sd >= 0.0) {
        return Err(Error::InvalidArgument(format!("noise standard deviation must be ≥ 0, got {noise_sd}")));
    }
    let stats = growth_stats(h, ws)?;
    let (denominator, probability) = match model {
        ModelKind::HyperedgeSelection => (stats.d_max, ProbabilityForm::BoundedBelowOne),
        ModelKind::JointSelection => (2.0 * stats.d_max * stats.r_max, ProbabilityForm::ApproachesOne),
        other => return Err(Error::NoCertificate(other.to_string())),
    };
    Ok(certificate_from_constants(
        model,
        gamma_relevant,
        gamma_irrelevant,
        noise_sd,
        stats.d_max,
        stats.r_max,
        denominator,
        probability,
    ))
}

#[allow(clippy::too_many_arguments)]
fn certificate_from_constants(
    model: ModelKind,
    gamma_relevant: f64,
    gamma_irrelevant: f64,
    noise_sd: f64,
    d_max: f64,
    r_max: f64,
    denominator: f64,
    probability: ProbabilityForm,
) -> SparsistencyCertificate {
    let noise_gap = 2.0 * 2f64.sqrt() * noise_sd / PI.sqrt();
    let gap = gamma_irrelevant - gamma_relevant;
    let gap_condition = gap > noise_gap;
    let lambda_max = if gap_condition { (gap - noise_gap) / denominator } else { 0.0 };
    SparsistencyCertificate {
        model,
        gamma_relevant,
        gamma_irrelevant,
        noise_sd,
        noise_gap,
        gap_condition,
        lambda_max,
        d_max,
        r_max,
        probability,
    }
}
