use serde::{Deserialize, Serialize};

use super::FitResult;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gamma {
    Value(f64),
    /// Midpoint of the largest gap between consecutive sorted smoothness values.
    Auto,
}

/// Partition of the edges into `γ`-smooth (relevant) and the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub gamma: f64,
    pub relevant: Vec<usize>,
    pub irrelevant: Vec<usize>,
    /// `min(irrelevant ss) − max(relevant ss)`; `None` when either side is empty.
    pub gap: Option<f64>,
    /// Set when `Auto` found no gap (all values equal).
    pub zero_gap: bool,
}

pub fn classify_support(fitted: &FitResult, gamma: Gamma) -> SupportReport {
    classify_smoothness(&fitted.edge_smoothness(), gamma)
}

pub fn classify_smoothness(ss: &[f64], gamma: Gamma) -> SupportReport {
    let threshold = match gamma {
        Gamma::Value(g) => g,
        Gamma::Auto => {
            let mut sorted = ss.to_vec();
            sorted.sort_by(f64::total_cmp);
            let best = sorted
                .windows(2)
                .map(|w| (w[1] - w[0], 0.5 * (w[0] + w[1])))
                .fold(None, |acc: Option<(f64, f64)>, cur| match acc {
                    Some(a) if a.0 >= cur.0 => Some(a),
                    _ => Some(cur),
                });
            match best {
                Some((gap, mid)) if gap > 0.0 => mid,
                _ => {
                    let top = sorted.last().copied().unwrap_or(0.0);
                    return SupportReport {
                        gamma: top,
                        relevant: (0..ss.len()).collect(),
                        irrelevant: Vec::new(),
                        gap: None,
                        zero_gap: true,
                    };
                }
            }
        }
    };
    let (relevant, irrelevant): (Vec<usize>, Vec<usize>) = (0..ss.len()).partition(|&k| ss[k] <= threshold);
    let gap = if relevant.is_empty() || irrelevant.is_empty() {
        None
    } else {
        let max_rel = relevant.iter().map(|&k| ss[k]).fold(f64::NEG_INFINITY, f64::max);
        let min_irr = irrelevant.iter().map(|&k| ss[k]).fold(f64::INFINITY, f64::min);
        Some(min_irr - max_rel)
    };
    SupportReport { gamma: threshold, relevant, irrelevant, gap, zero_gap: false }
}
