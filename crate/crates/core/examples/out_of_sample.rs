//! Predict labels for nodes that were not in the training hypergraph from their memberships.

use hypersparse::experiments::{gen_simulation, SimSpec};
use hypersparse::learners::{fit, predict_out_of_sample, LearnerConfig, ModelKind};

fn main() -> hypersparse::Result<()> {
    let sim = gen_simulation(&SimSpec { n: 120, ..SimSpec::default() }, 7)?;
    let mask = vec![true; sim.hypergraph.n()];
    // A new node inside bands 3 and 4, and one only in band 9.
    let newcomers: [(&str, Vec<usize>); 2] = [("overlap", vec![3, 4]), ("edge 9", vec![9])];
    for model in ModelKind::ALL {
        let res = fit(&sim.hypergraph, &sim.labels, &mask, &LearnerConfig::new(model, 0.1))?;
        let preds: Vec<String> = newcomers
            .iter()
            .map(|(name, ks)| Ok(format!("{name} -> {:.3}", predict_out_of_sample(&res, ks)?)))
            .collect::<hypersparse::Result<_>>()?;
        println!("{model:>5}: {}", preds.join(", "));
    }
    Ok(())
}
