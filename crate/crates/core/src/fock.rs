//! Truncated Fock-space model with sparse creation, projection and weight
//! operators, used to check the operator identities numerically.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, PathTable};
use crate::weights::WeightSpec;

/// Sparse operator on the truncated Fock space, stored by columns.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOp {
    pub dim: usize,
    /// Grading offset: level `k` is mapped into level `k + offset`.
    pub offset: isize,
    cols: Vec<Vec<(usize, f64)>>,
}

impl FockOp {
    fn from_cols(offset: isize, cols: Vec<Vec<(usize, f64)>>) -> Self {
        FockOp {
            dim: cols.len(),
            offset,
            cols,
        }
    }

    pub fn zero(dim: usize, offset: isize) -> Self {
        Self::from_cols(offset, vec![Vec::new(); dim])
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_cols(0, (0..dim).map(|i| vec![(i, 1.0)]).collect())
    }

    pub fn column(&self, j: usize) -> &[(usize, f64)] {
        &self.cols[j]
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    fn normalize(col: BTreeMap<usize, f64>) -> Vec<(usize, f64)> {
        col.into_iter().filter(|(_, v)| *v != 0.0).collect()
    }

    pub fn mul(&self, other: &FockOp) -> FockOp {
        let cols = other
            .cols
            .iter()
            .map(|c| {
                let mut acc = BTreeMap::new();
                for &(k, b) in c {
                    for &(i, a) in &self.cols[k] {
                        *acc.entry(i).or_insert(0.0) += a * b;
                    }
                }
                Self::normalize(acc)
            })
            .collect();
        Self::from_cols(self.offset + other.offset, cols)
    }

    pub fn adjoint(&self) -> FockOp {
        let mut cols = vec![Vec::new(); self.dim];
        for (j, c) in self.cols.iter().enumerate() {
            for &(i, v) in c {
                cols[i].push((j, v));
            }
        }
        Self::from_cols(-self.offset, cols)
    }

    pub fn lin(&self, a: f64, other: &FockOp, b: f64) -> FockOp {
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(x, y)| {
                let mut acc = BTreeMap::new();
                for &(i, v) in x {
                    *acc.entry(i).or_insert(0.0) += a * v;
                }
                for &(i, v) in y {
                    *acc.entry(i).or_insert(0.0) += b * v;
                }
                Self::normalize(acc)
            })
            .collect();
        let offset = if self.nnz() > 0 { self.offset } else { other.offset };
        Self::from_cols(offset, cols)
    }

    pub fn add(&self, other: &FockOp) -> FockOp {
        self.lin(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &FockOp) -> FockOp {
        self.lin(1.0, other, -1.0)
    }

    /// Largest absolute entry among the given columns.
    pub fn max_abs_on(&self, cols: impl Iterator<Item = usize>) -> f64 {
        cols.flat_map(|j| self.cols[j].iter().map(|(_, v)| v.abs()))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_on(0..self.dim)
    }
}

/// The Fock space truncated at level `K`.
#[derive(Clone, Debug)]
pub struct FockRep {
    pub graph: Graph,
    pub weights: WeightSpec,
    pub k_max: usize,
    table: PathTable,
    starts: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub truncation: usize,
    pub lengths_checked: usize,
    /// `S_α* S_β − δ_{α,β} P_{s(α)}`.
    pub isometry_relations: f64,
    /// `Σ_{|α|=k} S_α S_α* − (I − Σ_{i<k} Q_i) P_s^⊥`.
    pub range_sum: f64,
    /// `Σ_{|α|=k, r(α)=v} S_α S_α* − P_v (I − Σ_{i<k} Q_i)`.
    pub range_sum_per_vertex: f64,
    /// `Z P_v − P_v Z`.
    pub weight_commutes_with_vertices: f64,
    /// `S_α S_α* S_α − S_α`.
    pub partial_isometry: f64,
    /// `Σ_k Q_k − I`.
    pub level_projections: f64,
    pub max_deviation: f64,
}

impl RelationReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_deviation <= tol
    }
}

impl FockRep {
    pub fn new(g: &Graph, w: &WeightSpec, k_max: usize) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::Truncation("truncation level must be at least 1".into()));
        }
        let mut table = PathTable::new(g);
        table.ensure(k_max);
        let mut starts = vec![0];
        for k in 0..=k_max {
            starts.push(starts[k] + table.count(k));
        }
        Ok(FockRep {
            graph: g.clone(),
            weights: w.clone(),
            k_max,
            table,
            starts,
        })
    }

    pub fn dim(&self) -> usize {
        *self.starts.last().unwrap()
    }

    pub fn level_range(&self, k: usize) -> std::ops::Range<usize> {
        self.starts[k]..self.starts[k + 1]
    }

    /// Global indices of all basis vectors at levels `0..=k`.
    pub fn up_to(&self, k: usize) -> std::ops::Range<usize> {
        0..self.starts[k.min(self.k_max) + 1]
    }

    fn level_of(&self, idx: usize) -> usize {
        self.starts.partition_point(|&s| s <= idx) - 1
    }

    fn per_basis(&self, offset: isize, f: impl Fn(usize, usize) -> Vec<(usize, f64)>) -> FockOp {
        let mut cols = Vec::with_capacity(self.dim());
        for k in 0..=self.k_max {
            for i in 0..self.table.count(k) {
                cols.push(f(k, i));
            }
        }
        FockOp::from_cols(offset, cols)
    }

    /// `S_α` for a path given by operator-order edges; clipped at level K.
    pub fn s_path(&self, edges: &[usize]) -> Result<FockOp> {
        let n = edges.len();
        if n > self.k_max {
            return Err(Error::Truncation(format!(
                "path of length {n} exceeds truncation {}",
                self.k_max
            )));
        }
        Ok(self.per_basis(n as isize, |k, i| {
            if k + n > self.k_max {
                return Vec::new();
            }
            let mut idx = i;
            for (off, &e) in edges.iter().rev().enumerate() {
                match self.table.prepend(e, k + off, idx) {
                    Some(j) => idx = j,
                    None => return Vec::new(),
                }
            }
            vec![(self.starts[k + n] + idx, 1.0)]
        }))
    }

    pub fn s_edge(&self, e: usize) -> FockOp {
        self.s_path(&[e]).expect("truncation is at least 1")
    }

    pub fn q(&self, level: usize) -> FockOp {
        self.per_basis(0, |k, i| {
            if k == level {
                vec![(self.starts[k] + i, 1.0)]
            } else {
                Vec::new()
            }
        })
    }

    pub fn p_vertex(&self, v: usize) -> FockOp {
        self.per_basis(0, |k, i| {
            if self.table.rng(k, i) == v {
                vec![(self.starts[k] + i, 1.0)]
            } else {
                Vec::new()
            }
        })
    }

    /// Projection onto paths whose range is a source.
    pub fn p_sources(&self) -> FockOp {
        let sources: Vec<bool> = (0..self.graph.vertex_count())
            .map(|v| self.graph.in_degree(v) == 0)
            .collect();
        self.per_basis(0, |k, i| {
            if sources[self.table.rng(k, i)] {
                vec![(self.starts[k] + i, 1.0)]
            } else {
                Vec::new()
            }
        })
    }

    pub fn z(&self) -> FockOp {
        self.per_basis(0, |k, i| {
            self.weights
                .column(&self.table, k, i)
                .into_iter()
                .map(|(r, v)| (self.starts[k] + r, v))
                .collect()
        })
    }

    /// Weighted shift `W_α = Z S_α`.
    pub fn w_path(&self, edges: &[usize]) -> Result<FockOp> {
        Ok(self.z().mul(&self.s_path(edges)?))
    }

    pub fn identity(&self) -> FockOp {
        FockOp::identity(self.dim())
    }

    /// Dense block `Q_{k+d} x Q_k` (zero-sized if the target level is out of range).
    pub fn block(&self, x: &FockOp, k: usize) -> DMatrix<f64> {
        let target = k as isize + x.offset;
        if target < 0 || target as usize > self.k_max {
            return DMatrix::zeros(0, self.table.count(k));
        }
        let t = target as usize;
        let rows = self.level_range(t);
        let mut m = DMatrix::zeros(rows.len(), self.table.count(k));
        for (j, col) in self.level_range(k).enumerate() {
            for &(r, v) in x.column(col) {
                if rows.contains(&r) {
                    m[(r - rows.start, j)] += v;
                }
            }
        }
        m
    }

    /// `‖Q_k x Q_k‖` for `k = 0..=K`.
    pub fn compact_decay(&self, x: &FockOp) -> Vec<f64> {
        (0..=self.k_max)
            .map(|k| {
                let n = self.table.count(k);
                let mut m = DMatrix::zeros(n, n);
                for (j, col) in self.level_range(k).enumerate() {
                    for &(r, v) in x.column(col) {
                        if self.level_of(r) == k {
                            m[(r - self.starts[k], j)] = v;
                        }
                    }
                }
                spectral(&m)
            })
            .collect()
    }

    /// `‖Q_{k+d} x Q_k‖` for the grading offset `d` of `x`, over levels
    /// whose image is not clipped.
    pub fn graded_decay(&self, x: &FockOp) -> Vec<f64> {
        let d = x.offset.max(0) as usize;
        (0..=self.k_max.saturating_sub(d))
            .map(|k| spectral(&self.block(x, k)))
            .collect()
    }

    /// Checks the Fock-space relations for paths of length `1..=max_len`.
    pub fn verify_relations(&self, max_len: usize) -> RelationReport {
        let max_len = max_len.min(self.k_max);
        let g = &self.graph;
        let nv = g.vertex_count();
        let mut dev_iso: f64 = 0.0;
        let mut dev_sum: f64 = 0.0;
        let mut dev_sum_v: f64 = 0.0;
        let mut dev_pi: f64 = 0.0;
        let id = self.identity();
        let p_s_perp = id.sub(&self.p_sources());
        let pv: Vec<FockOp> = (0..nv).map(|v| self.p_vertex(v)).collect();
        let mut lower = FockOp::zero(self.dim(), 0);
        for len in 1..=max_len {
            lower = lower.add(&self.q(len - 1));
            let unclipped = || self.up_to(self.k_max - len);
            let paths = g.paths(len);
            let s: Vec<FockOp> = paths
                .iter()
                .map(|p| self.s_path(&p.edges).unwrap())
                .collect();
            let s_adj: Vec<FockOp> = s.iter().map(|x| x.adjoint()).collect();
            for (a, pa) in paths.iter().enumerate() {
                for (b, _) in paths.iter().enumerate() {
                    let lhs = s_adj[a].mul(&s[b]);
                    let dev = if a == b {
                        lhs.sub(&pv[pa.src])
                    } else {
                        lhs
                    };
                    dev_iso = dev_iso.max(dev.max_abs_on(unclipped()));
                }
                let pi = s[a].mul(&s_adj[a]).mul(&s[a]).sub(&s[a]);
                dev_pi = dev_pi.max(pi.max_abs_on(unclipped()));
            }
            let rest = id.sub(&lower);
            let mut total = FockOp::zero(self.dim(), 0);
            let mut per_v = vec![FockOp::zero(self.dim(), 0); nv];
            for (a, pa) in paths.iter().enumerate() {
                let proj = s[a].mul(&s_adj[a]);
                total = total.add(&proj);
                per_v[pa.rng] = per_v[pa.rng].add(&proj);
            }
            dev_sum = dev_sum.max(total.sub(&rest.mul(&p_s_perp)).max_abs());
            for v in 0..nv {
                dev_sum_v = dev_sum_v.max(per_v[v].sub(&pv[v].mul(&rest)).max_abs());
            }
        }
        let z = self.z();
        let dev_z = pv
            .iter()
            .map(|p| z.mul(p).sub(&p.mul(&z)).max_abs())
            .fold(0.0, f64::max);
        let mut qsum = FockOp::zero(self.dim(), 0);
        for k in 0..=self.k_max {
            qsum = qsum.add(&self.q(k));
        }
        let dev_q = qsum.sub(&id).max_abs();
        let max_deviation = [dev_iso, dev_sum, dev_sum_v, dev_z, dev_pi, dev_q]
            .into_iter()
            .fold(0.0, f64::max);
        RelationReport {
            truncation: self.k_max,
            lengths_checked: max_len,
            isometry_relations: dev_iso,
            range_sum: dev_sum,
            range_sum_per_vertex: dev_sum_v,
            weight_commutes_with_vertices: dev_z,
            partial_isometry: dev_pi,
            level_projections: dev_q,
            max_deviation,
        }
    }

    /// `‖Q_{k+|α|}(S_α Z − Z S_α)Q_k‖` over unclipped levels; vanishes from
    /// level `N` on exactly when `|α|` is a multiple of the minimal period.
    pub fn weight_commutator_decay(&self, edges: &[usize]) -> Result<Vec<f64>> {
        let s = self.s_path(edges)?;
        let z = self.z();
        Ok(self.graded_decay(&s.mul(&z).sub(&z.mul(&s))))
    }

    pub fn table(&self) -> &PathTable {
        &self.table
    }
}

fn spectral(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() || m.amax() == 0.0 {
        return 0.0;
    }
    m.clone().singular_values().max()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3() -> Graph {
        Graph::new(
            &["v1", "v2", "v3"],
            &[("e1", "v1", "v2"), ("e2", "v2", "v3"), ("e3", "v3", "v1")],
        )
        .unwrap()
    }

    fn cycle_weights(g: &Graph) -> WeightSpec {
        WeightSpec::diagonal(g, 2, 0, &[vec![2.0, 1.0, 3.0]]).unwrap()
    }

    #[test]
    fn weight_blocks_on_cycle() {
        let g = c3();
        let f = FockRep::new(&g, &cycle_weights(&g), 8).unwrap();
        let z5 = f.block(&f.z(), 5);
        // Paths of length 5 in canonical order start with e1, e2, e3 (range
        // side) and hence have sources v2, v3, v1.
        let mut by_src = [0.0; 3];
        for i in 0..3 {
            by_src[f.table().src(5, i)] = z5[(i, i)];
        }
        assert_eq!(by_src, [2.0, 1.0, 3.0]);
        let u = FockRep::new(&g, &WeightSpec::unweighted(), 4).unwrap();
        assert_eq!(u.z(), u.identity());
    }

    #[test]
    fn creation_composes_paths() {
        let g = c3();
        let f = FockRep::new(&g, &WeightSpec::unweighted(), 6).unwrap();
        let s = f.s_edge(0);
        let a22 = g.parse_walk("e2.e3").unwrap();
        let a32 = g.parse_walk("e2.e3.e1").unwrap();
        let t = f.table();
        let from = f.starts[2] + t.index_of(&a22.edges, a22.src).unwrap();
        let to = f.starts[3] + t.index_of(&a32.edges, a32.src).unwrap();
        assert_eq!(s.column(from), &[(to, 1.0)]);
    }

    #[test]
    fn relations_hold() {
        let g = c3();
        let f = FockRep::new(&g, &cycle_weights(&g), 6).unwrap();
        let r = f.verify_relations(3);
        assert!(r.passes(1e-12), "{r:?}");
    }

    #[test]
    fn decay_diagnostics() {
        let g = c3();
        let f = FockRep::new(&g, &cycle_weights(&g), 8).unwrap();
        let q3 = f.compact_decay(&f.q(3));
        assert_eq!(q3[3], 1.0);
        assert!(q3.iter().enumerate().all(|(k, v)| k == 3 || *v == 0.0));
        let zm1 = f.compact_decay(&f.z().sub(&f.identity()));
        for (k, v) in zm1.iter().enumerate() {
            let want = if k % 2 == 1 { 2.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-12);
        }
        let two = f.weight_commutator_decay(&[1, 0]).unwrap();
        assert!(two.iter().all(|v| *v == 0.0));
        let one = f.weight_commutator_decay(&[0]).unwrap();
        assert!(one.iter().any(|v| *v > 0.5));
    }
}
