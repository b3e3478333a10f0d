//! Warm-started fits along a λ grid: fit term, sparsity, and solver effort per point.

use hypersparse::admm::fit_term;
use hypersparse::experiments::{gen_simulation, SimSpec};
use hypersparse::learners::{fit_grid, LearnerConfig, ModelKind};

fn main() -> hypersparse::Result<()> {
    let sim = gen_simulation(&SimSpec { n: 150, n_irrelevant: 4, ..SimSpec::default() }, 3)?;
    let mask = vec![true; sim.hypergraph.n()];
    let grid: Vec<f64> = (0..9).map(|i| 10f64.powf(-4.0 + 0.75 * i as f64)).collect();
    let mut cfg = LearnerConfig::new(ModelKind::HyperedgeSelection, 0.0);
    cfg.solver.adaptive_rho = true;
    for res in fit_grid(&sim.hypergraph, &sim.labels, &mask, &cfg, &grid) {
        let res = res?;
        let flat = res.delta_hat.iter().filter(|&&d| d <= 1e-6).count();
        println!(
            "lambda {:>8.1e}: fit term {:.5}  flat edges {flat:>2}/{}  iterations {:>5}  kkt {:.1e}",
            res.lambda,
            fit_term(&res.f_hat, &sim.labels, &mask),
            res.delta_hat.len(),
            res.diagnostics.iterations,
            res.diagnostics.kkt_residual
        );
    }
    Ok(())
}
