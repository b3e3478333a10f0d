//! Build a hypergraph, resolve weights, and look at its expansions and growth constants.

use hypersparse::hypergraph::{clique_expansion, growth_stats, star_expansion, Hypergraph, WeightScheme};

fn main() -> hypersparse::Result<()> {
    let h = Hypergraph::from_node_lists(7, &[vec![0, 1, 2], vec![2, 3, 4, 5], vec![5, 6]])?.with_name("toy");
    println!("{} nodes, {} edges, {} incidences", h.n(), h.m(), h.incidence_count());

    for ws in [WeightScheme::Unit, WeightScheme::InverseCardinality] {
        let w = h.resolve_weights(ws)?;
        let g = growth_stats(&h, ws)?;
        println!("{ws:?}: w = {w:?}");
        println!("  r = {:?}  R = {:.3}  R' = {:.3}  D = {:.3}", g.r, g.r_max, g.r_min, g.d_max);
    }

    let clique = clique_expansion(&h, WeightScheme::InverseCardinality)?;
    println!("clique expansion: {} weighted pairs", clique.pairs.len());
    let f = [0.0, 0.1, 0.2, 0.5, 0.6, 0.7, 1.0];
    println!("  f^T L f = {:.4}", clique.laplacian_quadratic(&f));

    let star = star_expansion(&h, WeightScheme::Unit)?;
    println!("star expansion: {} nodes, {} edges", star.node_count, star.edges.len());

    println!("{}", h.to_json_string());
    Ok(())
}
