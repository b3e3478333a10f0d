#![allow(dead_code)]

use hypersparse::admm::EdgePenalty;
use hypersparse::hypergraph::{Hyperedge, Hypergraph};
use hypersparse::linsolve::check_labeled_components;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct Instance {
    pub h: Hypergraph,
    pub labels: Vec<f64>,
    pub mask: Vec<bool>,
}

/// Random small instance: `n ≤ max_n`, `1 ≤ m ≤ max_m`, `2 ≤ |e| ≤ max_e`, labels in [0, 1],
/// each node observed with probability `p_obs` (resampled until every component has a label).
pub fn random_instance(r: &mut ChaCha8Rng, max_n: usize, max_m: usize, max_e: usize, p_obs: f64) -> Instance {
    loop {
        let n = r.random_range(3..=max_n);
        let m = r.random_range(1..=max_m);
        let edges: Vec<Hyperedge> = (0..m)
            .map(|_| {
                let size = r.random_range(2..=max_e.min(n));
                Hyperedge::unweighted(sample(r, n, size).into_vec())
            })
            .collect();
        let h = Hypergraph::new(n, edges).unwrap();
        let labels: Vec<f64> = (0..n).map(|_| r.random::<f64>()).collect();
        let mask: Vec<bool> = (0..n).map(|_| r.random::<f64>() < p_obs).collect();
        if mask.iter().any(|&m| m) && check_labeled_components(&h, &mask).is_ok() {
            return Instance { h, labels, mask };
        }
    }
}

pub fn uniform_vec(r: &mut ChaCha8Rng, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..dim).map(|_| r.random_range(lo..hi)).collect()
}

/// Golden-section minimizer of a unimodal function on `[lo, hi]`.
pub fn golden(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..200 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `argmin_x ½|x − v|² + τ|x|₁`, one golden-section search per coordinate.
pub fn oracle_prox_l1(v: &[f64], tau: f64) -> Vec<f64> {
    v.iter().map(|&vi| golden(-10.0, 10.0, |x| 0.5 * (x - vi).powi(2) + tau * x.abs())).collect()
}

/// `argmin_x ½|x − v|² + τ|x|_∞`: for a cap `t` the best `x` clips `|v|` at `t`, leaving a
/// convex problem in `t` alone.
pub fn oracle_prox_linf(v: &[f64], tau: f64) -> Vec<f64> {
    let top = v.iter().fold(0.0, |a: f64, x| a.max(x.abs()));
    let cost = |t: f64| 0.5 * v.iter().map(|x| (x.abs() - x.abs().min(t)).powi(2)).sum::<f64>() + tau * t;
    let t = golden(0.0, top, cost);
    v.iter().map(|&x| x.signum() * x.abs().min(t)).collect()
}

/// `argmin_x ½|x − v|² + τ(Σ|x_i|)²` by projected gradient on the magnitudes (signs follow `v`).
pub fn oracle_prox_sql1(v: &[f64], tau: f64) -> Vec<f64> {
    let y: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let step = 1.0 / (1.0 + 2.0 * tau * y.len() as f64);
    let mut x = y.clone();
    for _ in 0..200_000 {
        let s: f64 = x.iter().sum();
        let mut moved = 0.0f64;
        for i in 0..x.len() {
            let next = (x[i] - step * (x[i] - y[i] + 2.0 * tau * s)).max(0.0);
            moved = moved.max((next - x[i]).abs());
            x[i] = next;
        }
        if moved < 1e-15 {
            break;
        }
    }
    x.iter().zip(v).map(|(a, b)| a * b.signum()).collect()
}

/// `½|f − Y|²_L + Σ_k c_k g(f_{e_k} − μ_k)` over the joint variable `(f, μ)`.
fn joint_objective(inst: &Instance, penalty: EdgePenalty, scale: &[f64], f: &[f64], mu: &[f64]) -> f64 {
    let fit: f64 = (0..f.len()).filter(|&i| inst.mask[i]).map(|i| 0.5 * (f[i] - inst.labels[i]).powi(2)).sum();
    let reg: f64 = inst
        .h
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let z: Vec<f64> = e.nodes.iter().map(|&i| f[i] - mu[k]).collect();
            scale[k] * penalty.value(&z)
        })
        .sum();
    fit + reg
}

/// Best objective reached by the subgradient method on `(f, μ)`, started from the observed
/// labels. Each of two step schedules runs `iters` steps split into 20 stages; a stage restarts
/// from the incumbent with steps `a·r^s/√(t+1)`. Every run is an upper bound on the optimum,
/// so the lower one is returned.
pub fn subgradient_oracle(inst: &Instance, penalty: EdgePenalty, scale: &[f64], iters: usize) -> f64 {
    let n = inst.h.n();
    let mean = {
        let obs: Vec<f64> = (0..n).filter(|&i| inst.mask[i]).map(|i| inst.labels[i]).collect();
        obs.iter().sum::<f64>() / obs.len() as f64
    };
    let f: Vec<f64> = (0..n).map(|i| if inst.mask[i] { inst.labels[i] } else { mean }).collect();
    let mu: Vec<f64> =
        inst.h.edges().iter().map(|e| e.nodes.iter().map(|&i| f[i]).sum::<f64>() / e.len() as f64).collect();
    let start = joint_objective(inst, penalty, scale, &f, &mu);
    let stages = 20usize;
    [(0.2, 0.5), (0.5, 0.7)]
        .iter()
        .map(|&(a, r): &(f64, f64)| {
            let mut best = (start, f.clone(), mu.clone());
            for s in 0..stages {
                best = subgradient_stage(inst, penalty, scale, iters / stages, a * r.powi(s as i32), best);
            }
            best.0
        })
        .fold(f64::INFINITY, f64::min)
}

fn subgradient_stage(
    inst: &Instance,
    penalty: EdgePenalty,
    scale: &[f64],
    iters: usize,
    a: f64,
    start: (f64, Vec<f64>, Vec<f64>),
) -> (f64, Vec<f64>, Vec<f64>) {
    let n = inst.h.n();
    let m = inst.h.m();
    let (mut best, mut f, mut mu) = start;
    let (mut best_f, mut best_mu) = (f.clone(), mu.clone());
    let mut gf = vec![0.0; n];
    let mut gm = vec![0.0; m];
    let mut z = Vec::new();
    for t in 0..iters {
        for i in 0..n {
            gf[i] = if inst.mask[i] { f[i] - inst.labels[i] } else { 0.0 };
        }
        gm.iter_mut().for_each(|g| *g = 0.0);
        for (k, e) in inst.h.edges().iter().enumerate() {
            z.clear();
            z.extend(e.nodes.iter().map(|&i| f[i] - mu[k]));
            let c = scale[k];
            match penalty {
                EdgePenalty::L1 => {
                    for (&i, &zi) in e.nodes.iter().zip(&z) {
                        let s = c * sign(zi);
                        gf[i] += s;
                        gm[k] -= s;
                    }
                }
                EdgePenalty::SquaredL1 => {
                    let s1: f64 = z.iter().map(|x| x.abs()).sum();
                    for (&i, &zi) in e.nodes.iter().zip(&z) {
                        let s = 2.0 * c * s1 * sign(zi);
                        gf[i] += s;
                        gm[k] -= s;
                    }
                }
                EdgePenalty::MaxNorm => {
                    let (j, zj) = z.iter().enumerate().fold((0, 0.0f64), |a, (j, &x)| if x.abs() > a.1.abs() { (j, x) } else { a });
                    let s = c * sign(zj);
                    gf[e.nodes[j]] += s;
                    gm[k] -= s;
                }
            }
        }
        let step = a / ((t + 1) as f64).sqrt();
        for i in 0..n {
            f[i] -= step * gf[i];
        }
        for k in 0..m {
            mu[k] -= step * gm[k];
        }
        let obj = joint_objective(inst, penalty, scale, &f, &mu);
        if obj < best {
            best = obj;
            best_f.copy_from_slice(&f);
            best_mu.copy_from_slice(&mu);
        }
    }
    (best, best_f, best_mu)
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Dense-model minimizer by a direct LU solve of the normal equations
/// `(M_L + 2λ Σ_k w_k (I − 11ᵀ/|e_k|)) f = M_L Y`.
pub fn dense_direct(inst: &Instance, weights: &[f64], lambda: f64) -> Vec<f64> {
    let n = inst.h.n();
    let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);
    let mut b = nalgebra::DVector::<f64>::zeros(n);
    for i in 0..n {
        if inst.mask[i] {
            a[(i, i)] += 1.0;
            b[i] = inst.labels[i];
        }
    }
    for (e, &w) in inst.h.edges().iter().zip(weights) {
        let c = 2.0 * lambda * w;
        let inv = 1.0 / e.len() as f64;
        for &i in &e.nodes {
            a[(i, i)] += c;
            for &j in &e.nodes {
                a[(i, j)] -= c * inv;
            }
        }
    }
    let x = a.lu().solve(&b).expect("nonsingular dense system");
    x.iter().copied().collect()
}
