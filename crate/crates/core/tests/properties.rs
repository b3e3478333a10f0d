mod common;

use common::*;
use hypersparse::admm::{admm_solve, fit_term, AdmmConfig, EdgePenalty, SparseProblem};
use hypersparse::experiments::{gen_simulation, rmse, SimSpec};
use hypersparse::hypergraph::{clique_expansion, growth_stats, star_expansion, Hyperedge, Hypergraph, WeightScheme};
use hypersparse::learners::{
    classify_smoothness, fit, fit_warm, lambda_path, predict_out_of_sample, sparsistency_certificate, weighted_median,
    Gamma, LearnerConfig, ModelKind,
};
use hypersparse::operator::StackedOperator;
use hypersparse::prox::{project_l1_ball, prox_l1, prox_linf, prox_sql1};
use hypersparse::smoothness::{median, sh_general, ss1, ss2, ss_dense, CombinatorSpec, PairWeights};
use proptest::prelude::*;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn vec_pair(max_dim: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1..=max_dim).prop_flat_map(|d| (prop::collection::vec(-5.0..5.0f64, d), prop::collection::vec(-5.0..5.0f64, d)))
}

fn sparse_models() -> [ModelKind; 3] {
    [ModelKind::HyperedgeSelection, ModelKind::NodeSelection, ModelKind::JointSelection]
}

fn tight(model: ModelKind, lambda: f64) -> LearnerConfig {
    let mut cfg = LearnerConfig::new(model, lambda);
    cfg.solver.tol_abs = 1e-10;
    cfg.solver.tol_rel = 1e-9;
    cfg.solver.max_iter = 100_000;
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn prox_operators_are_nonexpansive((u, v) in vec_pair(8), tau in 0.0..10.0f64) {
        for prox in [prox_l1, prox_linf, prox_sql1] {
            prop_assert!(dist(&prox(&u, tau), &prox(&v, tau)) <= dist(&u, &v) * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn moreau_decomposition(v in prop::collection::vec(-5.0..5.0f64, 1..8), tau in 0.0..10.0f64) {
        let p = prox_linf(&v, tau);
        let q = project_l1_ball(&v, tau);
        for i in 0..v.len() {
            prop_assert!((p[i] + q[i] - v[i]).abs() <= f64::EPSILON * v[i].abs());
        }
        prop_assert!(q.iter().map(|x| x.abs()).sum::<f64>() <= tau * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn edge_measures_are_shift_invariant(v in prop::collection::vec(-5.0..5.0f64, 1..8), c in -10.0..10.0f64, w in 0.01..3.0f64) {
        let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
        for (a, b) in [(ss1(&v, w), ss1(&shifted, w)), (ss2(&v, w), ss2(&shifted, w)), (ss_dense(&v, w), ss_dense(&shifted, w))] {
            prop_assert!((a.value - b.value).abs() <= 1e-9 * (1.0 + a.value));
            prop_assert!((a.mu + c - b.mu).abs() <= 1e-9 * (1.0 + c.abs()));
        }
    }

    #[test]
    fn edge_measures_are_homogeneous(v in prop::collection::vec(-5.0..5.0f64, 1..8), alpha in 0.0..4.0f64, w in 0.01..3.0f64) {
        let scaled: Vec<f64> = v.iter().map(|x| alpha * x).collect();
        let tol = |x: f64| 1e-9 * (1.0 + x);
        prop_assert!((ss1(&scaled, w).value - alpha * ss1(&v, w).value).abs() <= tol(ss1(&scaled, w).value));
        prop_assert!((ss2(&scaled, w).value - alpha * ss2(&v, w).value).abs() <= tol(ss2(&scaled, w).value));
        let d = ss_dense(&scaled, w).value;
        prop_assert!((d - alpha * alpha * ss_dense(&v, w).value).abs() <= tol(d));
    }

    #[test]
    fn zero_smoothness_iff_constant(c in -5.0..5.0f64, len in 1usize..8, w in 0.01..3.0f64, bump in 1e-3..1.0f64) {
        let v = vec![c; len];
        prop_assert_eq!(ss1(&v, w).value, 0.0);
        prop_assert_eq!(ss2(&v, w).value, 0.0);
        let mut v2 = v.clone();
        v2.push(c + bump);
        prop_assert!(ss1(&v2, w).value > 0.0);
        prop_assert!(ss2(&v2, w).value > 0.0);
    }

    #[test]
    fn perturbation_bounds((f, y) in vec_pair(8), w in 0.01..3.0f64) {
        let max_dev = f.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let sum_dev: f64 = f.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
        prop_assert!((ss2(&f, w).value - ss2(&y, w).value).abs() <= w * max_dev * (1.0 + 1e-12) + 1e-12);
        prop_assert!((ss1(&f, w).value - ss1(&y, w).value).abs() <= w * sum_dev * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn weighted_median_minimizes_weighted_l1(pts in prop::collection::vec((-5.0..5.0f64, 0.05..2.0f64), 1..7)) {
        let cost = |x: f64| pts.iter().map(|(mu, w)| w * (x - mu).abs()).sum::<f64>();
        let m = weighted_median(&pts);
        let best = pts.iter().map(|p| cost(p.0)).fold(f64::INFINITY, f64::min);
        prop_assert!(cost(m) <= best + 1e-9);
    }

    #[test]
    fn rmse_ignores_order(pairs in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..40), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let (p, t): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
        let mut perm = pairs.clone();
        perm.shuffle(&mut rng(seed));
        let (p2, t2): (Vec<f64>, Vec<f64>) = perm.into_iter().unzip();
        prop_assert!((rmse(&p, &t) - rmse(&p2, &t2)).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn clique_expansion_is_symmetric_psd(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, 12, 5, 6, 1.0);
        for ws in [WeightScheme::Unit, WeightScheme::InverseCardinality] {
            let g = clique_expansion(&inst.h, ws).unwrap();
            for i in 0..g.n {
                for j in 0..g.n {
                    prop_assert_eq!(g.weight(i, j), g.weight(j, i));
                }
            }
            let f = uniform_vec(&mut r, g.n, -3.0, 3.0);
            prop_assert!(g.laplacian_quadratic(&f) >= 0.0);
            let sh = sh_general(&f, &inst.h, ws, &CombinatorSpec::CLIQUE_QUADRATIC, &PairWeights::Uniform).unwrap();
            let lq = g.laplacian_quadratic(&f);
            prop_assert!((sh.value - lq).abs() <= 1e-10 * (1.0 + lq));
        }
    }

    #[test]
    fn star_expansion_edge_count(seed in any::<u64>()) {
        let inst = random_instance(&mut rng(seed), 12, 5, 6, 1.0);
        let star = star_expansion(&inst.h, WeightScheme::Unit).unwrap();
        prop_assert_eq!(star.edges.len(), inst.h.edges().iter().map(|e| e.len()).sum::<usize>());
        prop_assert_eq!(star.node_count, inst.h.n() + inst.h.m());
    }

    #[test]
    fn growth_stats_ignore_edge_order(seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut r = rng(seed);
        let inst = random_instance(&mut r, 12, 5, 6, 1.0);
        let mut edges: Vec<Hyperedge> = inst.h.edges().to_vec();
        edges.shuffle(&mut r);
        let shuffled = Hypergraph::new(inst.h.n(), edges).unwrap();
        for ws in [WeightScheme::Unit, WeightScheme::InverseCardinality] {
            let a = growth_stats(&inst.h, ws).unwrap();
            let b = growth_stats(&shuffled, ws).unwrap();
            for (x, y) in a.d.iter().zip(&b.d) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
            }
            prop_assert!((a.d_max - b.d_max).abs() <= 1e-12 * a.d_max.max(1.0));
            prop_assert_eq!(a.r_max, b.r_max);
            prop_assert_eq!(a.r_min, b.r_min);
            prop_assert!(0.0 < a.r_min && a.r_min <= a.r_max && a.r_max <= 1.0);
        }
    }

    #[test]
    fn operator_adjoint(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, 12, 5, 6, 1.0);
        let op = StackedOperator::new(&inst.h);
        let x = uniform_vec(&mut r, op.cols(), -1.0, 1.0);
        let z = uniform_vec(&mut r, op.rows(), -1.0, 1.0);
        let mut ax = vec![0.0; op.rows()];
        let mut atz = vec![0.0; op.cols()];
        op.apply(&x, &mut ax);
        op.adjoint(&z, &mut atz);
        let lhs: f64 = ax.iter().zip(&z).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.iter().zip(&atz).map(|(a, b)| a * b).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn support_report_partitions_edges(ss in prop::collection::vec(0.0..1.0f64, 1..12), gamma in 0.0..1.0f64) {
        for g in [Gamma::Auto, Gamma::Value(gamma)] {
            let rep = classify_smoothness(&ss, g);
            let mut all: Vec<usize> = rep.relevant.iter().chain(&rep.irrelevant).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..ss.len()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn certificate_bound_positive_iff_gap(gr in 0.0..1.0f64, gap in 1e-6..1.0f64, delta in 0.0..0.5f64, seed in any::<u64>()) {
        let inst = random_instance(&mut rng(seed), 12, 4, 5, 1.0);
        for (model, ws) in [(ModelKind::HyperedgeSelection, WeightScheme::Unit), (ModelKind::JointSelection, WeightScheme::InverseCardinality)] {
            let c = sparsistency_certificate(&inst.h, model, gr, gr + gap, delta, ws).unwrap();
            prop_assert_eq!(c.lambda_max > 0.0, c.gap_condition);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn admm_diagnostics_are_consistent(seed in any::<u64>(), lambda in 0.01..2.0f64) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, 12, 4, 5, 0.7);
        for penalty in [EdgePenalty::MaxNorm, EdgePenalty::L1, EdgePenalty::SquaredL1] {
            let problem = SparseProblem {
                hypergraph: &inst.h,
                labels: &inst.labels,
                mask: &inst.mask,
                penalty,
                edge_scale: vec![lambda; inst.h.m()],
            };
            let cfg = AdmmConfig::default();
            let sol = admm_solve(&problem, &cfg, None).unwrap();
            let d = &sol.diagnostics;
            prop_assert_eq!(d.objective_trace.len(), d.iterations);
            prop_assert_eq!(d.iterate_objective.len(), d.iterations);
            prop_assert!(d.objective_trace.windows(2).all(|w| w[1] <= w[0]));
            if d.converged {
                let op = StackedOperator::new(&inst.h);
                let mut ax = vec![0.0; op.rows()];
                op.apply(&sol.state.x, &mut ax);
                let mut atu = vec![0.0; op.cols()];
                op.adjoint(&sol.state.u, &mut atu);
                let eps_pri = (op.rows() as f64).sqrt() * cfg.tol_abs + cfg.tol_rel * norm(&ax).max(norm(&sol.state.z));
                let eps_dual = (op.cols() as f64).sqrt() * cfg.tol_abs + cfg.tol_rel * sol.state.rho * norm(&atu);
                prop_assert!(d.primal_residual <= eps_pri);
                prop_assert!(d.dual_residual <= eps_dual);
            }
        }
    }

    #[test]
    fn fit_invariants(seed in any::<u64>(), lambda in 0.01..2.0f64) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, 12, 4, 5, 0.7);
        for model in ModelKind::ALL {
            let res = fit(&inst.h, &inst.labels, &inst.mask, &tight(model, lambda)).unwrap();
            prop_assert!(res.delta_hat.iter().all(|&d| d >= 0.0));
            for (k, e) in inst.h.edges().iter().enumerate() {
                let devs = e.nodes.iter().map(|&i| (res.f_hat[i] - res.mu_hat[k]).abs());
                let expect = match model {
                    ModelKind::HyperedgeSelection => devs.fold(0.0, f64::max),
                    ModelKind::NodeSelection | ModelKind::JointSelection => devs.sum(),
                    ModelKind::Dense => devs.map(|d| d * d).sum(),
                };
                prop_assert!((res.delta_hat[k] - expect).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn refit_from_solution_is_a_fixed_point(seed in any::<u64>(), lambda in 0.01..2.0f64) {
        let inst = random_instance(&mut rng(seed), 12, 4, 5, 0.7);
        for model in sparse_models() {
            let cfg = tight(model, lambda);
            let first = fit(&inst.h, &inst.labels, &inst.mask, &cfg).unwrap();
            let again = fit_warm(&inst.h, &inst.labels, &inst.mask, &cfg, first.state.as_ref()).unwrap();
            prop_assert!((again.objective - first.objective).abs() < 1e-9, "{} {} vs {}", model, again.objective, first.objective);
        }
    }

    #[test]
    fn out_of_sample_matches_in_sample_penalty(seed in any::<u64>(), lambda in 0.01..2.0f64) {
        let inst = random_instance(&mut rng(seed), 12, 4, 5, 0.7);
        let memberships = inst.h.memberships();
        for model in ModelKind::ALL {
            let res = fit(&inst.h, &inst.labels, &inst.mask, &tight(model, lambda)).unwrap();
            let penalty = |x: f64, ks: &[usize]| -> f64 {
                let terms = ks.iter().map(|&k| (res.weights[k], (x - res.mu_hat[k]).abs()));
                match model {
                    ModelKind::HyperedgeSelection => terms.map(|(w, d)| w * d).fold(0.0, f64::max),
                    ModelKind::Dense => terms.map(|(w, d)| w * d * d).sum(),
                    _ => terms.map(|(w, d)| w * d).sum(),
                }
            };
            for (i, ks) in memberships.iter().enumerate().filter(|(_, ks)| !ks.is_empty()) {
                let p = predict_out_of_sample(&res, ks).unwrap();
                prop_assert!(penalty(p, ks) <= penalty(res.f_hat[i], ks) + 1e-8);
            }
        }
    }

    #[test]
    fn dense_fit_matches_direct_solve(seed in any::<u64>(), lambda in 0.01..5.0f64) {
        let inst = random_instance(&mut rng(seed), 12, 4, 5, 0.7);
        let res = fit(&inst.h, &inst.labels, &inst.mask, &LearnerConfig::new(ModelKind::Dense, lambda)).unwrap();
        let direct = dense_direct(&inst, &res.weights, lambda);
        for (a, b) in res.f_hat.iter().zip(&direct) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn path_fit_term_grows_with_lambda(seed in any::<u64>()) {
        let inst = random_instance(&mut rng(seed), 12, 4, 5, 0.7);
        let grid = [10.0, 1.0, 0.1, 0.01, 0.001];
        for model in ModelKind::ALL {
            let path = lambda_path(&inst.h, &inst.labels, &inst.mask, &tight(model, 0.0), &grid);
            let terms: Vec<f64> = path.iter().map(|r| fit_term(&r.as_ref().unwrap().f_hat, &inst.labels, &inst.mask)).collect();
            for w in terms.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-7, "{model}: {terms:?}");
            }
        }
    }
}

#[test]
fn ss2_is_half_the_largest_gap_and_ss1_centers_on_median() {
    let mut r = rng(3);
    for _ in 0..1000 {
        let len = 1 + (r.random_range(0..8usize));
        let v = uniform_vec(&mut r, len, -5.0, 5.0);
        let w = r.random_range(0.01..3.0);
        let gap = v.iter().flat_map(|a| v.iter().map(move |b| (a - b).abs())).fold(0.0, f64::max);
        assert_eq!(ss2(&v, w).value, w * gap / 2.0);
        assert_eq!(ss1(&v, w).mu, median(&v));
    }
}

use rand::Rng;

#[test]
fn hyperedge_sparsity_grows_with_lambda() {
    let grid: Vec<f64> = (0..9).map(|i| 10f64.powf(-4.0 + 0.75 * i as f64)).collect();
    for seed in 0..5 {
        let spec = SimSpec { n: 80, n_irrelevant: 4, ..SimSpec::default() };
        let sim = gen_simulation(&spec, seed).unwrap();
        let mask = vec![true; sim.hypergraph.n()];
        let mut cfg = tight(ModelKind::HyperedgeSelection, 0.0);
        cfg.solver.adaptive_rho = true;
        let counts: Vec<usize> = grid
            .iter()
            .map(|&l| {
                let res = fit(&sim.hypergraph, &sim.labels, &mask, &LearnerConfig { lambda: l, ..cfg }).unwrap();
                res.delta_hat.iter().filter(|&&d| d <= 1e-6).count()
            })
            .collect();
        assert!(counts.windows(2).all(|w| w[1] >= w[0]), "seed {seed}: {counts:?}");
    }
}

#[test]
fn generators_are_deterministic_and_bands_smooth() {
    let spec = SimSpec::default();
    let a = gen_simulation(&spec, 11).unwrap();
    let b = gen_simulation(&spec, 11).unwrap();
    assert_eq!(a.labels.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), b.labels.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
    assert_eq!(a.hypergraph, b.hypergraph);
    for (e, &rel) in a.hypergraph.edges().iter().zip(&a.relevant) {
        assert!(rel);
        let y: Vec<f64> = e.nodes.iter().map(|&i| a.labels[i]).collect();
        assert!(ss2(&y, 1.0).value <= 0.075);
        assert!(ss1(&y, 1.0 / y.len() as f64).value <= 0.075);
    }
}
