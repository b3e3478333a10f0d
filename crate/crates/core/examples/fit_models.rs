//! Fit all four models on a generated instance with half the labels hidden and compare them.

use hypersparse::experiments::{gen_simulation, rmse, SimSpec};
use hypersparse::learners::{classify_support, fit, Gamma, LearnerConfig, ModelKind};

fn main() -> hypersparse::Result<()> {
    let spec = SimSpec { n: 100, n_irrelevant: 3, ..SimSpec::default() };
    let sim = gen_simulation(&spec, 42)?;
    let mask: Vec<bool> = (0..spec.n).map(|i| i % 2 == 0).collect();
    let hidden: Vec<usize> = (0..spec.n).filter(|&i| !mask[i]).collect();
    let truth: Vec<f64> = hidden.iter().map(|&i| sim.labels[i]).collect();

    println!("{} edges ({} planted irrelevant)", sim.hypergraph.m(), sim.relevant.iter().filter(|r| !**r).count());
    for model in ModelKind::ALL {
        let mut cfg = LearnerConfig::new(model, 0.01);
        cfg.solver.adaptive_rho = true;
        let res = fit(&sim.hypergraph, &sim.labels, &mask, &cfg)?;
        let pred: Vec<f64> = hidden.iter().map(|&i| res.f_hat[i]).collect();
        let support = classify_support(&res, Gamma::Auto);
        println!(
            "{model:>5}: held-out RMSE {:.4}  objective {:.5}  iterations {:>5}  smooth edges {:?}",
            rmse(&pred, &truth),
            res.objective,
            res.diagnostics.iterations,
            support.relevant
        );
    }
    Ok(())
}
