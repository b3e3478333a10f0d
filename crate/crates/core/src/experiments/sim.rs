use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Hyperedge, Hypergraph};

/// Synthetic benchmark: uniform labels, label-band (relevant) edges, random (irrelevant)
/// edges, and noisy nodes appended to the relevant edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimSpec {
    pub n: usize,
    pub band_width: f64,
    /// Lower ends `a` of the half-open bands `[a, a + band_width)`.
    pub band_starts: Vec<f64>,
    pub n_irrelevant: usize,
    pub irrelevant_size: usize,
    pub noisy_per_edge: usize,
    /// Standard deviation of additive Gaussian label noise.
    pub label_noise: f64,
}

impl Default for SimSpec {
    fn default() -> Self {
        Self {
            n: 200,
            band_width: 0.15,
            band_starts: (0..10).map(|k| k as f64 / 10.0).collect(),
            n_irrelevant: 0,
            irrelevant_size: 20,
            noisy_per_edge: 0,
            label_noise: 0.0,
        }
    }
}

impl SimSpec {
    /// Five relevant bands at `a ∈ {0, 0.2, 0.4, 0.6, 0.8}` and five irrelevant edges.
    pub fn five_by_five() -> Self {
        Self { band_starts: (0..5).map(|k| k as f64 / 5.0).collect(), n_irrelevant: 5, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.band_width > 0.0) {
            return Err(Error::InvalidArgument("band width must be positive".into()));
        }
        if self.irrelevant_size > self.n || self.irrelevant_size < 2 && self.n_irrelevant > 0 {
            return Err(Error::InvalidArgument(format!(
                "irrelevant edge size {} incompatible with n = {}",
                self.irrelevant_size, self.n
            )));
        }
        if !(self.label_noise >= 0.0) {
            return Err(Error::InvalidArgument("label noise must be ≥ 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub hypergraph: Hypergraph,
    /// Observed labels (truth plus optional noise).
    pub labels: Vec<f64>,
    /// Noise-free labels.
    pub truth: Vec<f64>,
    /// Ground-truth relevance per edge, in edge order. Relevant edges come first.
    pub relevant: Vec<bool>,
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Combines a base seed with stream indices into a new seed (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, stream: &[u64]) -> u64 {
    let mut z = seed;
    for &s in stream {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(s.wrapping_mul(0xD1B5_4A32_D192_ED03));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

pub fn gen_simulation(spec: &SimSpec, seed: u64) -> Result<Simulation> {
    spec.validate()?;
    let mut rng = rng_from_seed(seed);
    let n = spec.n;
    let truth: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();

    let mut edges = Vec::new();
    let mut relevant = Vec::new();
    for &a in &spec.band_starts {
        let mut members: Vec<usize> = (0..n).filter(|&i| a <= truth[i] && truth[i] < a + spec.band_width).collect();
        if spec.noisy_per_edge > 0 {
            let outside: Vec<usize> = (0..n).filter(|i| members.binary_search(i).is_err()).collect();
            let k = spec.noisy_per_edge.min(outside.len());
            members.extend(sample(&mut rng, outside.len(), k).into_iter().map(|j| outside[j]));
        }
        if members.len() < 2 {
            log::warn!("dropping band edge at a = {a}: {} member(s)", members.len());
            continue;
        }
        edges.push(Hyperedge::unweighted(members));
        relevant.push(true);
    }
    for _ in 0..spec.n_irrelevant {
        edges.push(Hyperedge::unweighted(sample(&mut rng, n, spec.irrelevant_size).into_vec()));
        relevant.push(false);
    }

    let labels = if spec.label_noise > 0.0 {
        let noise = Normal::new(0.0, spec.label_noise).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        truth.iter().map(|&y| y + noise.sample(&mut rng)).collect()
    } else {
        truth.clone()
    };
    let hypergraph = Hypergraph::new(n, edges)?.with_name("simulation");
    Ok(Simulation { hypergraph, labels, truth, relevant })
}
