//! Per-edge smoothness (ss1, ss2, dense) and the general pairwise combinator form.

use hypersparse::hypergraph::{Hypergraph, WeightScheme};
use hypersparse::smoothness::{sh_general, ss1, ss2, ss_dense, CombinatorSpec, PairWeights};

fn main() -> hypersparse::Result<()> {
    let smooth = [0.50, 0.52, 0.49, 0.51];
    let rough = [0.05, 0.90, 0.40, 0.70];
    for (name, v) in [("smooth", &smooth[..]), ("rough", &rough[..])] {
        let w = 1.0 / v.len() as f64;
        let a = ss1(v, w);
        let b = ss2(v, 1.0);
        let c = ss_dense(v, w);
        println!("{name:>6}: ss1 = {:.4} (mu {:.3})  ss2 = {:.4} (mu {:.3})  dense = {:.5} (mu {:.3})", a.value, a.mu, b.value, b.mu, c.value, c.mu);
    }

    let h = Hypergraph::from_node_lists(6, &[vec![0, 1, 2], vec![2, 3], vec![3, 4, 5]])?;
    let f = [0.0, 0.1, 0.2, 0.8, 0.9, 1.0];
    let rows = [
        ("clique quadratic", CombinatorSpec::CLIQUE_QUADRATIC),
        ("clique 1-Laplacian", CombinatorSpec::CLIQUE_ONE_LAPLACIAN),
        ("total variation", CombinatorSpec::TOTAL_VARIATION),
        ("inf-minimizer", CombinatorSpec::INF_MINIMIZER),
        ("max edge", CombinatorSpec::MAX_EDGE),
    ];
    for (name, spec) in rows {
        let v = sh_general(&f, &h, WeightScheme::Unit, &spec, &PairWeights::Uniform)?;
        println!("{name:>18}: {:.4}", v.value);
    }
    Ok(())
}
