//! The stacked incidence operator `A(f, μ) = (f_i − μ_k)_{k, i ∈ e_k}`.

use crate::hypergraph::Hypergraph;

#[derive(Debug, Clone)]
pub struct StackedOperator {
    n: usize,
    /// `offsets[k]..offsets[k + 1]` are the rows of block `k`.
    offsets: Vec<usize>,
    /// Node id of every row.
    rows: Vec<usize>,
    /// Number of blocks each node appears in.
    degree: Vec<usize>,
}

impl StackedOperator {
    pub fn new(h: &Hypergraph) -> Self {
        let mut offsets = Vec::with_capacity(h.m() + 1);
        let mut rows = Vec::with_capacity(h.incidence_count());
        let mut degree = vec![0; h.n()];
        offsets.push(0);
        for e in h.edges() {
            for &i in &e.nodes {
                rows.push(i);
                degree[i] += 1;
            }
            offsets.push(rows.len());
        }
        Self { n: h.n(), offsets, rows, degree }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Length of the stacked vector, `Σ_k |e_k|`.
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    /// Length of `x = (f, μ)`.
    pub fn cols(&self) -> usize {
        self.n + self.m()
    }

    pub fn block(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }

    pub fn block_nodes(&self, k: usize) -> &[usize] {
        &self.rows[self.block(k)]
    }

    pub fn degree(&self) -> &[usize] {
        &self.degree
    }

    pub fn block_size(&self, k: usize) -> usize {
        self.offsets[k + 1] - self.offsets[k]
    }

    /// `z = A x` with `x = (f, μ)` laid out as one vector.
    pub fn apply(&self, x: &[f64], z: &mut [f64]) {
        let (f, mu) = x.split_at(self.n);
        for k in 0..self.m() {
            let r = self.block(k);
            for (zr, &i) in z[r.clone()].iter_mut().zip(&self.rows[r]) {
                *zr = f[i] - mu[k];
            }
        }
    }

    /// `x = Aᵀ z`.
    pub fn adjoint(&self, z: &[f64], x: &mut [f64]) {
        x.iter_mut().for_each(|v| *v = 0.0);
        let (f, mu) = x.split_at_mut(self.n);
        for k in 0..self.m() {
            let r = self.block(k);
            let mut s = 0.0;
            for (&zr, &i) in z[r.clone()].iter().zip(&self.rows[r]) {
                f[i] += zr;
                s += zr;
            }
            mu[k] = -s;
        }
    }

    /// `y = AᵀA x` without forming the stacked vector.
    pub fn gram(&self, x: &[f64], y: &mut [f64]) {
        let (f, mu) = x.split_at(self.n);
        let (yf, ymu) = y.split_at_mut(self.n);
        for i in 0..self.n {
            yf[i] = self.degree[i] as f64 * f[i];
        }
        for k in 0..self.m() {
            let r = self.block(k);
            let nodes = &self.rows[r];
            let mut sum_f = 0.0;
            for &i in nodes {
                yf[i] -= mu[k];
                sum_f += f[i];
            }
            ymu[k] = nodes.len() as f64 * mu[k] - sum_f;
        }
    }
}
