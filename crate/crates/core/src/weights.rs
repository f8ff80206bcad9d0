//! Eventually periodic weight sequences and the exact periodicity check.
//!
//! A weight sequence assigns to each level `k` a positive operator `Z_k` on
//! the span of the length-`k` paths that only mixes paths with equal source
//! and equal range. Only finitely many levels are stored: `Z_0 = I`, seeds
//! for `1 <= k < N + p`, and for `k >= N` the rule `Z_{k+p} = I_p ⊗ Z_k`,
//! where `I_p ⊗` leaves the leftmost `p` edges of a path untouched.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, PathTable};

const SYM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Diagonal,
    Block,
}

/// One (source, range) class of paths at a seed level and its block.
#[derive(Clone, Debug)]
struct ClassBlock {
    members: Vec<usize>,
    mat: DMatrix<f64>,
    diagonal: bool,
}

#[derive(Clone, Debug, Default)]
struct SeedLevel {
    classes: Vec<ClassBlock>,
    /// For each path at this level: (class index, position in class).
    slot: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub p: usize,
    pub n: usize,
    pub epsilon: f64,
    /// `seeds[k]` for `1 <= k < n + p`; index 0 is unused (identity).
    seeds: Vec<SeedLevel>,
}

#[derive(Deserialize)]
struct WeightDoc {
    kind: WeightKind,
    p: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(default)]
    epsilon: Option<f64>,
    #[serde(default)]
    levels: BTreeMap<String, serde_json::Value>,
}

/// Result of the exact periodicity check for a test period.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodCheck {
    pub p_test: usize,
    pub exact: bool,
    /// `residuals[k] = ‖Z_{k+p_test} − I ⊗ Z_k‖` for `0 <= k <= k_max`.
    pub residuals: Vec<f64>,
}

fn class_members(t: &PathTable, k: usize) -> BTreeMap<(usize, usize), Vec<usize>> {
    let mut m: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for i in 0..t.count(k) {
        m.entry((t.src(k, i), t.rng(k, i))).or_default().push(i);
    }
    m
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return f64::INFINITY;
    }
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

impl WeightSpec {
    /// `Z = I`, period 1.
    pub fn unweighted() -> Self {
        WeightSpec {
            kind: WeightKind::Diagonal,
            p: 1,
            n: 0,
            epsilon: 1.0,
            seeds: vec![SeedLevel::default()],
        }
    }

    /// Diagonal spec from per-level eigenvalues; `values[k-1][i]` is the
    /// weight of the `i`-th canonical path of length `k`.
    pub fn diagonal(g: &Graph, p: usize, n: usize, values: &[Vec<f64>]) -> Result<Self> {
        let mut t = PathTable::new(g);
        let top = (n + p).saturating_sub(1);
        t.ensure(top);
        if p == 0 {
            return Err(Error::InvalidWeights("period must be positive".into()));
        }
        if values.len() != top {
            return Err(Error::InvalidWeights(format!(
                "expected {top} seed levels, got {}",
                values.len()
            )));
        }
        let mut blocks = Vec::new();
        for (k0, vals) in values.iter().enumerate() {
            let k = k0 + 1;
            if vals.len() != t.count(k) {
                return Err(Error::InvalidWeights(format!(
                    "level {k}: expected {} values, got {}",
                    t.count(k),
                    vals.len()
                )));
            }
            blocks.push(
                class_members(&t, k)
                    .into_values()
                    .map(|members| {
                        let d: Vec<f64> = members.iter().map(|&i| vals[i]).collect();
                        (members, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)))
                    })
                    .collect(),
            );
        }
        Self::assemble(&t, WeightKind::Diagonal, p, n, None, blocks)
    }

    fn assemble(
        t: &PathTable,
        kind: WeightKind,
        p: usize,
        n: usize,
        epsilon: Option<f64>,
        levels: Vec<Vec<(Vec<usize>, DMatrix<f64>)>>,
    ) -> Result<Self> {
        let mut seeds = vec![SeedLevel::default()];
        let mut min_eig = f64::INFINITY;
        for (k0, classes) in levels.into_iter().enumerate() {
            let k = k0 + 1;
            let mut lvl = SeedLevel {
                classes: Vec::new(),
                slot: vec![(usize::MAX, 0); t.count(k)],
            };
            for (members, mat) in classes {
                if mat.nrows() != members.len() || mat.ncols() != members.len() {
                    return Err(Error::InvalidWeights(format!(
                        "level {k}: block of shape {}x{} for a class of {} paths",
                        mat.nrows(),
                        mat.ncols(),
                        members.len()
                    )));
                }
                if (&mat - mat.transpose()).amax() > SYM_TOL * mat.amax().max(1.0) {
                    return Err(Error::InvalidWeights(format!("level {k}: block is not symmetric")));
                }
                if mat.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidWeights(format!("level {k}: non-finite entry")));
                }
                let lam = min_eigenvalue(&mat);
                if lam <= 0.0 {
                    return Err(Error::InvalidWeights(format!(
                        "level {k}: nonpositive eigenvalue {lam}"
                    )));
                }
                min_eig = min_eig.min(lam);
                let diagonal = (0..mat.nrows())
                    .all(|i| (0..mat.ncols()).all(|j| i == j || mat[(i, j)] == 0.0));
                let c = lvl.classes.len();
                for (pos, &i) in members.iter().enumerate() {
                    lvl.slot[i] = (c, pos);
                }
                lvl.classes.push(ClassBlock {
                    members,
                    mat,
                    diagonal,
                });
            }
            if lvl.slot.iter().any(|s| s.0 == usize::MAX) {
                return Err(Error::InvalidWeights(format!("level {k}: missing paths")));
            }
            seeds.push(lvl);
        }
        let epsilon = match epsilon {
            Some(e) if e <= 0.0 => {
                return Err(Error::InvalidWeights("epsilon must be positive".into()))
            }
            Some(e) if min_eig < e - SYM_TOL => {
                return Err(Error::InvalidWeights(format!(
                    "eigenvalue {min_eig} below declared epsilon {e}"
                )))
            }
            Some(e) => e,
            None if min_eig.is_finite() => min_eig,
            None => 1.0,
        };
        Ok(WeightSpec {
            kind,
            p,
            n,
            epsilon,
            seeds,
        })
    }

    pub fn from_json(text: &str, g: &Graph) -> Result<Self> {
        let doc: WeightDoc =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("weights: {e}")))?;
        if doc.p == 0 {
            return Err(Error::InvalidWeights("period must be positive".into()));
        }
        let top = doc.n + doc.p - 1;
        let mut t = PathTable::new(g);
        t.ensure(top);
        let mut given: BTreeMap<usize, serde_json::Value> = BTreeMap::new();
        for (key, val) in doc.levels {
            let k: usize = key
                .parse()
                .map_err(|_| Error::Parse(format!("weights: bad level key {key:?}")))?;
            if k == 0 || k > top {
                return Err(Error::InvalidWeights(format!(
                    "level {k} outside the seed range 1..={top}"
                )));
            }
            given.insert(k, val);
        }
        let mut levels = Vec::new();
        for k in 1..=top {
            let val = given
                .remove(&k)
                .ok_or_else(|| Error::InvalidWeights(format!("missing level {k}")))?;
            let obj = val
                .as_object()
                .ok_or_else(|| Error::Parse(format!("weights: level {k} is not an object")))?;
            levels.push(match doc.kind {
                WeightKind::Diagonal => Self::parse_diagonal_level(g, &t, k, obj)?,
                WeightKind::Block => Self::parse_block_level(g, &t, k, obj)?,
            });
        }
        Self::assemble(&t, doc.kind, doc.p, doc.n, doc.epsilon, levels)
    }

    fn parse_diagonal_level(
        g: &Graph,
        t: &PathTable,
        k: usize,
        obj: &serde_json::Map<String, serde_json::Value>,
    ) -> Result<Vec<(Vec<usize>, DMatrix<f64>)>> {
        let mut vals = vec![f64::NAN; t.count(k)];
        for (walk, v) in obj {
            let path = g.parse_walk(walk)?;
            if path.len() != k {
                return Err(Error::UnknownPath(format!("{walk} at level {k}")));
            }
            let i = t.index_of(&path.edges, path.src).expect("parsed path composes");
            let x = v
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("weights: value for {walk} is not a number")))?;
            if x <= 0.0 {
                return Err(Error::InvalidWeights(format!("nonpositive value {x} for {walk}")));
            }
            vals[i] = x;
        }
        if let Some(i) = vals.iter().position(|x| x.is_nan()) {
            let p = g.path_from_edges(&t.edges_of(k, i)).unwrap();
            return Err(Error::InvalidWeights(format!(
                "level {k}: no value for path {}",
                g.walk_string(&p)
            )));
        }
        Ok(class_members(t, k)
            .into_values()
            .map(|members| {
                let d: Vec<f64> = members.iter().map(|&i| vals[i]).collect();
                (members, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)))
            })
            .collect())
    }

    fn parse_matrix(v: &serde_json::Value, what: &str) -> Result<DMatrix<f64>> {
        let rows: Vec<Vec<f64>> = serde_json::from_value(v.clone())
            .map_err(|e| Error::Parse(format!("weights: {what}: {e}")))?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidWeights(format!("{what}: matrix is not square")));
        }
        Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    fn parse_block_level(
        g: &Graph,
        t: &PathTable,
        k: usize,
        obj: &serde_json::Map<String, serde_json::Value>,
    ) -> Result<Vec<(Vec<usize>, DMatrix<f64>)>> {
        let classes = class_members(t, k);
        if let Some(full) = obj.get("*") {
            // Whole-level matrix in canonical path order; must respect classes.
            let m = Self::parse_matrix(full, &format!("level {k}"))?;
            if m.nrows() != t.count(k) {
                return Err(Error::InvalidWeights(format!("level {k}: wrong matrix size")));
            }
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    let same = t.src(k, i) == t.src(k, j) && t.rng(k, i) == t.rng(k, j);
                    if !same && m[(i, j)] != 0.0 {
                        return Err(Error::InvalidWeights(format!(
                            "level {k}: entry ({i},{j}) couples paths with different endpoints"
                        )));
                    }
                }
            }
            return Ok(classes
                .into_values()
                .map(|members| {
                    let b = DMatrix::from_fn(members.len(), members.len(), |a, b| {
                        m[(members[a], members[b])]
                    });
                    (members, b)
                })
                .collect());
        }
        let mut out = Vec::new();
        for ((s, r), members) in classes {
            let key = format!("{}:{}", g.vertex_name(s), g.vertex_name(r));
            let v = obj
                .get(&key)
                .ok_or_else(|| Error::InvalidWeights(format!("level {k}: missing class {key}")))?;
            out.push((members, Self::parse_matrix(v, &format!("level {k} class {key}"))?));
        }
        for key in obj.keys() {
            let ok = key.split_once(':').is_some_and(|(a, b)| {
                g.vertex_id(a).is_some() && g.vertex_id(b).is_some()
            });
            if !ok {
                return Err(Error::UnknownPath(format!("level {k}: class key {key}")));
            }
        }
        Ok(out)
    }

    /// `q = p - 1`.
    pub fn q(&self) -> usize {
        self.p - 1
    }

    /// Highest stored seed level.
    pub fn top_level(&self) -> usize {
        self.seeds.len() - 1
    }

    /// The seed level that level `k` reduces to by stripping period blocks.
    pub fn reduce(&self, k: usize) -> usize {
        if k < self.n + self.p {
            k
        } else {
            self.n + (k - self.n) % self.p
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.seeds
            .iter()
            .all(|l| l.classes.iter().all(|c| c.diagonal))
    }

    /// Whether every seed block is the identity.
    pub fn is_identity(&self) -> bool {
        self.seeds.iter().all(|l| {
            l.classes.iter().all(|c| {
                c.mat.iter().enumerate().all(|(idx, x)| {
                    let (i, j) = (idx % c.mat.nrows(), idx / c.mat.nrows());
                    *x == if i == j { 1.0 } else { 0.0 }
                })
            })
        })
    }

    /// Column `i` of `Z_k`: the nonzero entries `(row, value)`.
    /// The table must contain level `k`.
    pub fn column(&self, t: &PathTable, k: usize, i: usize) -> Vec<(usize, f64)> {
        let j = self.reduce(k);
        if j == 0 {
            return vec![(i, 1.0)];
        }
        let (heads, g) = t.strip(k, i, k - j);
        let (c, pos) = self.seeds[j].slot[g];
        let cls = &self.seeds[j].classes[c];
        if cls.diagonal {
            return vec![(i, cls.mat[(pos, pos)])];
        }
        cls.members
            .iter()
            .enumerate()
            .filter(|(a, _)| cls.mat[(*a, pos)] != 0.0)
            .map(|(a, &m)| {
                let row = t.attach(&heads, j, m).expect("same class composes");
                (row, cls.mat[(a, pos)])
            })
            .collect()
    }

    /// Diagonal entry of `Z_k` at path `i` (the eigenvalue for diagonal specs).
    pub fn diag_entry(&self, t: &PathTable, k: usize, i: usize) -> f64 {
        let j = self.reduce(k);
        if j == 0 {
            return 1.0;
        }
        let (_, g) = t.strip(k, i, k - j);
        let (c, pos) = self.seeds[j].slot[g];
        self.seeds[j].classes[c].mat[(pos, pos)]
    }

    /// Weight of a path: the diagonal entry of `Z_{|γ|}` at `δ_γ`.
    pub fn weight_of(&self, g: &Graph, path: &crate::graph::Path) -> f64 {
        let mut t = PathTable::new(g);
        t.ensure(path.len());
        let i = t.index_of(&path.edges, path.src).expect("valid path");
        self.diag_entry(&t, path.len(), i)
    }

    /// Entry `(Z_k)_{row, col}` for two paths of equal length.
    pub fn entry(&self, t: &PathTable, k: usize, row: usize, col: usize) -> f64 {
        self.column(t, k, col)
            .into_iter()
            .find(|(r, _)| *r == row)
            .map(|(_, v)| v)
            .unwrap_or(0.0)
    }

    /// Per-class dense block of `Z_k` (rows/cols in canonical order).
    pub fn level_dense(&self, t: &PathTable, k: usize) -> DMatrix<f64> {
        let n = t.count(k);
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for (r, v) in self.column(t, k, i) {
                m[(r, i)] = v;
            }
        }
        m
    }

    /// `‖Z_{k+p'} − I_{p'} ⊗ Z_k‖` for `0 <= k <= k_max`; exact iff all
    /// residuals with `k >= N` are at most `1e-12`.
    pub fn check_period(&self, g: &Graph, p_test: usize, k_max: usize) -> PeriodCheck {
        assert!(p_test >= 1);
        let k_max = k_max.max(self.n + p_test);
        let mut t = PathTable::new(g);
        t.ensure(k_max + p_test);
        let mut residuals = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let big = k + p_test;
            let classes = class_members(&t, big);
            let mut worst: f64 = 0.0;
            for members in classes.values() {
                let local: BTreeMap<usize, usize> =
                    members.iter().enumerate().map(|(a, &i)| (i, a)).collect();
                let m = members.len();
                let mut d = DMatrix::<f64>::zeros(m, m);
                for (a, &i) in members.iter().enumerate() {
                    for (r, v) in self.column(&t, big, i) {
                        d[(local[&r], a)] += v;
                    }
                    let (heads, g0) = t.strip(big, i, p_test);
                    for (r, v) in self.column(&t, k, g0) {
                        let row = t.attach(&heads, k, r).expect("same class composes");
                        d[(local[&row], a)] -= v;
                    }
                }
                if d.amax() > 0.0 {
                    worst = worst.max(d.clone().singular_values().max());
                }
            }
            residuals.push(worst);
        }
        let exact = residuals.iter().skip(self.n).all(|r| *r <= 1e-12);
        PeriodCheck {
            p_test,
            exact,
            residuals,
        }
    }

    /// Smallest `p'` in `1..=p` for which the sequence is exactly
    /// `p'`-periodic from level `N` on.
    pub fn minimal_period(&self, g: &Graph) -> usize {
        (1..self.p)
            .find(|&pt| self.check_period(g, pt, self.n + pt + self.p).exact)
            .unwrap_or(self.p)
    }

    /// The same sequence described with a shorter exact period.
    pub fn with_period(&self, p_new: usize) -> WeightSpec {
        assert!(p_new >= 1 && p_new <= self.p);
        let mut w = self.clone();
        w.p = p_new;
        w.seeds.truncate(self.n + p_new);
        if w.seeds.is_empty() {
            w.seeds.push(SeedLevel::default());
        }
        w
    }

    /// Re-minimised copy of this spec.
    pub fn minimized(&self, g: &Graph) -> WeightSpec {
        self.with_period(self.minimal_period(g))
    }
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
        WeightSpec::from_json(
            r#"{"kind":"diagonal","p":2,"N":0,"levels":{"1":{"e1":2,"e2":1,"e3":3}}}"#,
            g,
        )
        .unwrap()
    }

    #[test]
    fn loads_cycle_spec() {
        let g = c3();
        let w = cycle_weights(&g);
        assert_eq!((w.p, w.n, w.q()), (2, 0, 1));
        assert_eq!(w.epsilon, 1.0);
        let a32 = g.parse_walk("e2.e3.e1").unwrap();
        assert_eq!(a32.src, 1);
        assert_eq!(w.weight_of(&g, &a32), 1.0);
        let a41 = g.parse_walk("e1.e2.e3.e1").unwrap();
        assert_eq!(w.weight_of(&g, &a41), 1.0);
        let a51 = g.parse_walk("e1.e2.e3.e1.e2").unwrap();
        assert_eq!(w.weight_of(&g, &a51), 2.0);
    }

    #[test]
    fn rejects_bad_values() {
        let g = c3();
        let zero = WeightSpec::from_json(
            r#"{"kind":"diagonal","p":2,"N":0,"levels":{"1":{"e1":0,"e2":1,"e3":3}}}"#,
            &g,
        );
        assert!(matches!(zero, Err(Error::InvalidWeights(_))));
        let unknown = WeightSpec::from_json(
            r#"{"kind":"diagonal","p":2,"N":0,"levels":{"1":{"e9":1,"e2":1,"e3":3}}}"#,
            &g,
        );
        assert!(matches!(unknown, Err(Error::UnknownPath(_))));
        let extra = WeightSpec::from_json(
            r#"{"kind":"diagonal","p":1,"N":0,"levels":{"1":{"e1":1,"e2":1,"e3":3}}}"#,
            &g,
        );
        assert!(extra.is_err());
        let eps = WeightSpec::from_json(
            r#"{"kind":"diagonal","p":2,"N":0,"epsilon":1.5,"levels":{"1":{"e1":2,"e2":1,"e3":3}}}"#,
            &g,
        );
        assert!(matches!(eps, Err(Error::InvalidWeights(_))));
    }

    #[test]
    fn block_levels() {
        let g = Graph::new(&["v"], &[("e", "v", "v"), ("f", "v", "v")]).unwrap();
        let w = WeightSpec::from_json(
            r#"{"kind":"block","p":2,"N":0,"levels":{"1":{"v:v":[[2,1],[1,2]]}}}"#,
            &g,
        )
        .unwrap();
        assert!((w.epsilon - 1.0).abs() < 1e-12);
        assert!(w.check_period(&g, 2, 6).exact);
        assert!(!w.check_period(&g, 1, 6).exact);
        let cross = WeightSpec::from_json(
            r#"{"kind":"block","p":2,"N":0,"levels":{"1":{"*":[[2,1],[1,2]]}}}"#,
            &g,
        );
        assert!(cross.is_ok());
        let two = Graph::new(&["a", "b"], &[("x", "a", "b"), ("y", "b", "a")]).unwrap();
        let bad = WeightSpec::from_json(
            r#"{"kind":"block","p":2,"N":0,"levels":{"1":{"*":[[2,1],[1,2]]}}}"#,
            &two,
        );
        assert!(matches!(bad, Err(Error::InvalidWeights(_))));
    }

    #[test]
    fn period_checks() {
        let g = c3();
        let w = cycle_weights(&g);
        assert!(w.check_period(&g, 2, 8).exact);
        let one = w.check_period(&g, 1, 8);
        assert!(!one.exact);
        let worst = one.residuals.iter().cloned().fold(0.0, f64::max);
        assert!((worst - 2.0).abs() < 1e-12);
        assert_eq!(w.minimal_period(&g), 2);
        let u = WeightSpec::unweighted();
        let r = u.check_period(&g, 1, 5);
        assert!(r.exact && r.residuals.iter().all(|x| *x == 0.0));
        assert_eq!(u.minimal_period(&g), 1);
        let flat = WeightSpec::diagonal(&g, 2, 0, &[vec![5.0, 5.0, 5.0]]).unwrap();
        assert_eq!(flat.minimal_period(&g), 2);
        let trivial = WeightSpec::diagonal(&g, 2, 0, &[vec![1.0, 1.0, 1.0]]).unwrap();
        assert_eq!(trivial.minimal_period(&g), 1);
        assert!(trivial.minimized(&g).is_identity());
    }
}
