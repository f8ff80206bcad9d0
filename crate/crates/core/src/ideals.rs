//! Families of corner ideals: the invariance and saturation conditions,
//! enumeration of the family lattice, the fully invariant ideals they
//! generate, simplicity verdicts and the unweighted vertex-set oracle.
//!
//! Corner ideals are sums of minimal central summands and are stored as
//! bitmasks over the summands of each corner. Because each `π(μ,μ)` is a
//! *-homomorphism, the preimage of an ideal is again an ideal and both
//! conditions reduce to support computations on the summands.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::calkin::CalkinElement;
use crate::error::{Error, Result};
use crate::findim::Ideal;
use crate::graph::{Graph, Path};
use crate::linalg::{BlockMat, OrthoSpan, C64};
use crate::tower::Tower;
use crate::weights::WeightSpec;

/// One ideal per corner, as a bitmask of minimal central summands.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IdealFamily {
    pub masks: Vec<u64>,
}

impl IdealFamily {
    pub fn zero(nv: usize) -> Self {
        IdealFamily { masks: vec![0; nv] }
    }

    pub fn full(sizes: &[usize]) -> Self {
        IdealFamily {
            masks: sizes.iter().map(|&s| full_mask(s)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.masks.iter().all(|&m| m == 0)
    }

    pub fn is_full(&self, sizes: &[usize]) -> bool {
        self.masks.iter().zip(sizes).all(|(&m, &s)| m == full_mask(s))
    }

    /// Componentwise inclusion.
    pub fn le(&self, other: &Self) -> bool {
        self.masks.iter().zip(&other.masks).all(|(a, b)| a & !b == 0)
    }

    pub fn summands(&self, v: usize) -> Vec<usize> {
        (0..64).filter(|i| self.masks[v] >> i & 1 == 1).collect()
    }

    pub fn size(&self) -> u32 {
        self.masks.iter().map(|m| m.count_ones()).sum()
    }
}

fn full_mask(s: usize) -> u64 {
    if s >= 64 {
        u64::MAX
    } else {
        (1u64 << s) - 1
    }
}

/// Summand-level data of the corner maps.
#[derive(Clone, Debug)]
pub struct Supports {
    pub sizes: Vec<usize>,
    /// `(e, f, masks)`: for each summand `i` of `C_{r(e)}`, the summands of
    /// `C_{s(e)}` met by `π(e,f)(z_i C_{r(e)})`.
    pub edge: Vec<(usize, usize, Vec<u64>)>,
    /// For each vertex `v` and summand `i`: `(s(μ), mask)` over paths `μ`
    /// of length `p` with `r(μ) = v`.
    pub period: Vec<Vec<Vec<(usize, u64)>>>,
}

/// Summands of the target corner met by the image of `z_i C` under `pi`.
fn image_support(t: &Tower, from: usize, to: usize, pi: &DMatrix<C64>, i: usize, tol: f64) -> u64 {
    let cf = &t.corners[from];
    let ct = &t.corners[to];
    let zi = cf.regular_of(&cf.summand_coords[i]);
    let img = pi * zi;
    let scale = img.norm().max(1.0);
    let mut mask = 0u64;
    for (j, zc) in ct.summand_coords.iter().enumerate() {
        if (ct.regular_of(zc) * &img).norm() > tol * scale {
            mask |= 1 << j;
        }
    }
    mask
}

impl Supports {
    pub fn new(t: &Tower) -> Supports {
        let g = t.graph();
        let tol = t.cfg.findim.check_tol * 100.0;
        let sizes: Vec<usize> = t.corners.iter().map(|c| c.decomposition.summands()).collect();
        let mut edge = Vec::new();
        let mut keys: Vec<&(usize, usize)> = t.edge_maps.keys().collect();
        keys.sort();
        for &(e, f) in keys {
            let pi = &t.edge_maps[&(e, f)];
            let masks = (0..sizes[g.r(e)])
                .map(|i| image_support(t, g.r(e), g.s(e), pi, i, tol))
                .collect();
            edge.push((e, f, masks));
        }
        let mus = g.paths(t.p());
        let period = (0..g.vertex_count())
            .map(|v| {
                (0..sizes[v])
                    .map(|i| {
                        mus.iter()
                            .filter(|m| m.rng == v)
                            .map(|m| (m.src, image_support(t, v, m.src, &t.pi_path(m), i, tol)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Supports {
            sizes,
            edge,
            period,
        }
    }

    /// Violations `(e, f, summand)` of the invariance condition.
    pub fn h_violations(&self, g: &Graph, fam: &IdealFamily) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (e, f, masks) in &self.edge {
            let (to, from) = (g.s(*e), g.r(*e));
            for (i, m) in masks.iter().enumerate() {
                if fam.masks[from] >> i & 1 == 1 && m & !fam.masks[to] != 0 {
                    out.push((*e, *f, i));
                }
            }
        }
        out
    }

    pub fn check_h(&self, g: &Graph, fam: &IdealFamily) -> bool {
        self.h_violations(g, fam).is_empty()
    }

    /// `K(v) = {i : every period map sends z_i C_v into K_prev}`.
    pub fn pull_back(&self, prev: &IdealFamily) -> IdealFamily {
        let masks = self
            .period
            .iter()
            .map(|per_v| {
                per_v.iter().enumerate().fold(0u64, |acc, (i, targets)| {
                    if targets.iter().all(|(w, m)| m & !prev.masks[*w] == 0) {
                        acc | 1 << i
                    } else {
                        acc
                    }
                })
            })
            .collect();
        IdealFamily { masks }
    }
}

/// The recovered fibers `K_n`, `n = 0, 1, ...`, of the ideal generated by a
/// family: `K_n(v)` collects the summands `i` with `π(μ,μ)(z_i C_v) ⊆ J`
/// for every path `μ` of length `np` ending at `v`.
#[derive(Clone, Debug, Serialize)]
pub struct SaturationReport {
    pub holds: bool,
    /// Fibers `K_0 = J, K_1, ...` up to the first repetition.
    pub fibers: Vec<IdealFamily>,
    /// First `n` with `K_n = K_{n+1}` (or entering a cycle).
    pub stabilized_at: usize,
}

pub fn check_s(sup: &Supports, fam: &IdealFamily, n_cap: usize) -> Result<SaturationReport> {
    let mut fibers = vec![fam.clone()];
    let mut seen: HashSet<IdealFamily> = HashSet::new();
    seen.insert(fam.clone());
    loop {
        let next = sup.pull_back(fibers.last().unwrap());
        let repeat = !seen.insert(next.clone());
        fibers.push(next);
        if repeat {
            break;
        }
        if fibers.len() > n_cap + 1 {
            return Err(Error::Verification(format!(
                "fibers did not stabilise within {n_cap} stages"
            )));
        }
    }
    let holds = fibers[1..].iter().all(|k| k.le(fam));
    let stabilized_at = fibers.len() - 2;
    Ok(SaturationReport {
        holds,
        fibers,
        stabilized_at,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeEntry {
    pub family: IdealFamily,
    pub trivial_zero: bool,
    pub trivial_full: bool,
    /// Dimension of the generated stage-0 ideal.
    pub stage0_dim: usize,
}

/// Families satisfying both conditions, ordered by size then masks, with
/// the covering relation of componentwise inclusion.
#[derive(Clone, Debug, Serialize)]
pub struct GaugeIdealLattice {
    pub entries: Vec<LatticeEntry>,
    pub hasse: Vec<(usize, usize)>,
    pub corner_summands: Vec<usize>,
}

impl GaugeIdealLattice {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn families(&self) -> Vec<IdealFamily> {
        self.entries.iter().map(|e| e.family.clone()).collect()
    }
}

pub const DEFAULT_MAX_CANDIDATES: u64 = 1 << 20;

/// All families passing the invariance condition, found by backtracking
/// over vertices with incremental pruning.
pub fn h_families(t: &Tower, sup: &Supports, max_candidates: u64) -> Result<Vec<IdealFamily>> {
    let g = t.graph();
    let total_bits: usize = sup.sizes.iter().sum();
    if total_bits >= 64 || (1u64 << total_bits) > max_candidates {
        return Err(Error::CandidateExplosion(format!(
            "{total_bits} corner summands give 2^{total_bits} candidate families (limit {max_candidates}); \
             prune per vertex or lower the stage count"
        )));
    }
    let nv = g.vertex_count();
    // edge constraints that become checkable once vertex `v` is assigned
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (k, (e, _, _)) in sup.edge.iter().enumerate() {
        ready[g.s(*e).max(g.r(*e))].push(k);
    }
    let mut out = Vec::new();
    let mut cur = IdealFamily::zero(nv);
    fn rec(
        v: usize,
        g: &Graph,
        sup: &Supports,
        ready: &[Vec<usize>],
        cur: &mut IdealFamily,
        out: &mut Vec<IdealFamily>,
    ) {
        if v == cur.masks.len() {
            out.push(cur.clone());
            return;
        }
        for m in 0..=full_mask(sup.sizes[v]) {
            cur.masks[v] = m;
            let ok = ready[v].iter().all(|&k| {
                let (e, _, masks) = &sup.edge[k];
                let (to, from) = (g.s(*e), g.r(*e));
                masks.iter().enumerate().all(|(i, im)| {
                    cur.masks[from] >> i & 1 == 0 || im & !cur.masks[to] == 0
                })
            });
            if ok {
                rec(v + 1, g, sup, ready, cur, out);
            }
        }
        cur.masks[v] = 0;
    }
    rec(0, g, sup, &ready, &mut cur, &mut out);
    Ok(out)
}

/// The lattice of families satisfying both conditions.
pub fn enumerate_families(t: &Tower, n_cap: usize, max_candidates: u64) -> Result<GaugeIdealLattice> {
    let sup = Supports::new(t);
    let mut fams = Vec::new();
    for f in h_families(t, &sup, max_candidates)? {
        if check_s(&sup, &f, n_cap)?.holds {
            fams.push(f);
        }
    }
    fams.sort_by(|a, b| a.size().cmp(&b.size()).then(a.cmp(b)));
    let mut entries = Vec::new();
    for f in fams {
        let stage0_dim = stage0_span(t, &f)?.dim();
        entries.push(LatticeEntry {
            trivial_zero: f.is_zero(),
            trivial_full: f.is_full(&sup.sizes),
            family: f,
            stage0_dim,
        });
    }
    let hasse = hasse_edges(&entries.iter().map(|e| e.family.clone()).collect::<Vec<_>>());
    Ok(GaugeIdealLattice {
        entries,
        hasse,
        corner_summands: sup.sizes,
    })
}

/// Covering pairs `(lower, upper)` of componentwise inclusion.
pub fn hasse_edges(fams: &[IdealFamily]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (a, fa) in fams.iter().enumerate() {
        for (b, fb) in fams.iter().enumerate() {
            if a == b || !fa.le(fb) || fa == fb {
                continue;
            }
            let between = fams
                .iter()
                .any(|fc| fc != fa && fc != fb && fa.le(fc) && fc.le(fb));
            if !between {
                out.push((a, b));
            }
        }
    }
    out
}

/// Corner coordinates spanning `J_v`: the columns of `L(z_J)`.
fn fiber_coords(t: &Tower, fam: &IdealFamily, v: usize) -> Vec<DVector<C64>> {
    let c = &t.corners[v];
    let mut z = DVector::zeros(c.dim());
    for i in fam.summands(v) {
        z += &c.summand_coords[i];
    }
    let l = c.regular_of(&z);
    let mut span = OrthoSpan::new(t.cfg.findim.rank_tol);
    let mut out = Vec::new();
    for j in 0..c.dim() {
        let col: DVector<C64> = l.column(j).into_owned();
        let as_block = BlockMat::new(vec![DMatrix::from_column_slice(col.len(), 1, col.as_slice())]);
        if span.try_insert(&as_block).is_some() {
            out.push(col);
        }
    }
    out
}

/// Symbolic spanning set of the stage-0 ideal `Σ u_α u_ξ* J_v u_ξ u_β*`.
pub fn stage0_items(t: &Tower, fam: &IdealFamily) -> Vec<CalkinElement> {
    let g = t.graph();
    let paths = g.paths(t.q());
    let mut out = Vec::new();
    for v in 0..g.vertex_count() {
        let xi = &t.xi[v];
        let from_v: Vec<&Path> = paths.iter().filter(|p| p.src == v).collect();
        for d in fiber_coords(t, fam, v) {
            let inner = CalkinElement::product(
                g,
                &[
                    &CalkinElement::u_path_star(xi),
                    &t.corners[v].symbolic_of(&d),
                    &CalkinElement::u_path(xi),
                ],
            );
            for a in &from_v {
                for b in &from_v {
                    out.push(CalkinElement::product(
                        g,
                        &[&CalkinElement::u_path(a), &inner, &CalkinElement::u_path_star(b)],
                    ));
                }
            }
        }
    }
    out
}

fn span_of(t: &Tower, items: &[CalkinElement]) -> Result<OrthoSpan> {
    let mut span = OrthoSpan::new(t.cfg.findim.rank_tol);
    for x in items {
        span.try_insert(&t.realize(x)?);
    }
    Ok(span)
}

/// Window realization of the stage-0 ideal.
pub fn stage0_span(t: &Tower, fam: &IdealFamily) -> Result<OrthoSpan> {
    span_of(t, &stage0_items(t, fam))
}

/// The stage-`n` ideal `⊕_v M_{Γ_v} ⊗ J_v` of `A_n`, with nesting into the
/// next stage checked when that stage exists.
pub fn build_fully_invariant(t: &Tower, fam: &IdealFamily, n: usize) -> Result<Ideal> {
    let st = t
        .stages
        .get(n)
        .ok_or_else(|| Error::Precondition(format!("stage {n} has not been built")))?;
    let summands: Vec<usize> = st
        .summand_labels
        .iter()
        .enumerate()
        .filter(|(_, (v, i))| fam.masks[*v] >> i & 1 == 1)
        .map(|(k, _)| k)
        .collect();
    let ideal = st.algebra.ideal(&st.decomposition, &summands, &t.cfg.findim);
    if let (Some(next), Some(emb)) = (t.stages.get(n + 1), t.embeddings.get(n)) {
        let next_summands: Vec<usize> = next
            .summand_labels
            .iter()
            .enumerate()
            .filter(|(_, (v, i))| fam.masks[*v] >> i & 1 == 1)
            .map(|(k, _)| k)
            .collect();
        let upper = next.algebra.ideal(&next.decomposition, &next_summands, &t.cfg.findim);
        for x in &ideal.basis {
            let y = emb.map.apply(&st.algebra, x);
            let outside = y.sub(&upper.projection.mul(&y)).norm();
            if outside > t.cfg.findim.check_tol * y.norm().max(1.0) {
                return Err(Error::Verification(format!(
                    "stage-{n} ideal is not carried into stage {} (residual {outside:.3e})",
                    n + 1
                )));
            }
        }
    }
    Ok(ideal)
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    /// `K_n = J` for `n ≤ n_cap` (support iteration).
    pub fibers_stable: bool,
    /// `K_1` recomputed from direct sandwiches along period paths agrees.
    pub fibers_direct: bool,
    /// `u_e* J_0 u_f ⊆ J_0`.
    pub compressions: bool,
    /// `u_e J_0 u_f* ⊆ J_1`.
    pub expansions: bool,
    pub max_residual: f64,
    pub witness: Option<String>,
}

impl InvarianceReport {
    pub fn passes(&self) -> bool {
        self.fibers_stable && self.fibers_direct && self.compressions && self.expansions
    }
}

/// Independent re-verification of the ideal generated by a family.
pub fn verify_fully_invariant(t: &Tower, fam: &IdealFamily, n_cap: usize) -> Result<InvarianceReport> {
    let g = t.graph();
    let sup = Supports::new(t);
    let mut fibers_stable = true;
    let mut k = fam.clone();
    let mut witness = None;
    for n in 1..=n_cap {
        k = sup.pull_back(&k);
        if &k != fam {
            fibers_stable = false;
            witness.get_or_insert(format!("fiber at stage {n} is {:?}, family is {:?}", k.masks, fam.masks));
            break;
        }
    }

    // K_1 from direct sandwiches
    let tol = t.cfg.findim.check_tol * 100.0;
    let mut direct = IdealFamily::zero(g.vertex_count());
    let mus = g.paths(t.p());
    let mut max_residual: f64 = 0.0;
    for v in 0..g.vertex_count() {
        let c = &t.corners[v];
        for (i, zc) in c.summand_coords.iter().enumerate() {
            let zi = c.regular_of(zc);
            let mut inside = true;
            for mu in mus.iter().filter(|m| m.rng == v) {
                let w = mu.src;
                let pi = t.pi_direct(mu, mu)?;
                let cw = &t.corners[w];
                let mut zj = DVector::zeros(cw.dim());
                for j in fam.summands(w) {
                    zj += &cw.summand_coords[j];
                }
                let proj = cw.regular_of(&zj);
                let img = pi * &zi;
                let r = (&img - &proj * &img).norm();
                if r > tol * img.norm().max(1.0) {
                    inside = false;
                }
            }
            if inside {
                direct.masks[v] |= 1 << i;
            }
        }
    }
    let fibers_direct = direct == sup.pull_back(fam);
    if !fibers_direct {
        witness.get_or_insert(format!("direct fiber {:?} differs from composed maps", direct.masks));
    }

    let items = stage0_items(t, fam);
    let j0 = span_of(t, &items)?;
    let mut compressions = true;
    let mut expansions = true;
    let ne = g.edge_count();
    let period_paths = g.paths(t.p());
    let mut j1_items = Vec::new();
    for d in &period_paths {
        for gm in period_paths.iter().filter(|x| x.src == d.src) {
            for x in &items {
                j1_items.push(CalkinElement::product(
                    g,
                    &[&CalkinElement::u_path(d), x, &CalkinElement::u_path_star(gm)],
                ));
            }
        }
    }
    let j1 = span_of(t, &j1_items)?;
    for x in &items {
        for e in 0..ne {
            for f in 0..ne {
                let inner = CalkinElement::product(
                    g,
                    &[&CalkinElement::u_star(g, e), x, &CalkinElement::u(g, f)],
                );
                let m = t.realize(&inner)?;
                let r = j0.residual_norm(&m) / m.norm().max(1.0);
                max_residual = max_residual.max(r);
                if r > tol {
                    compressions = false;
                    witness.get_or_insert(format!("u_e* x u_f leaves J_0 for {}", inner.format(g)));
                }
                let outer = CalkinElement::product(
                    g,
                    &[&CalkinElement::u(g, e), x, &CalkinElement::u_star(g, f)],
                );
                let m = t.realize(&outer)?;
                let r = j1.residual_norm(&m) / m.norm().max(1.0);
                max_residual = max_residual.max(r);
                if r > tol {
                    expansions = false;
                    witness.get_or_insert(format!("u_e x u_f* leaves J_1 for {}", outer.format(g)));
                }
            }
        }
    }
    Ok(InvarianceReport {
        fibers_stable,
        fibers_direct,
        compressions,
        expansions,
        max_residual,
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Simple,
    NotSimple(String),
    NotApplicable(String),
}

/// Simplicity of the weighted algebra: no cycle, and no nontrivial family
/// satisfying the invariance condition alone.
pub fn simplicity_verdict(g: &Graph, w: &WeightSpec, cfg: &crate::tower::TowerConfig) -> Result<Verdict> {
    let shape = g.validate();
    if !shape.no_sources || !shape.no_sinks {
        return Ok(Verdict::NotApplicable("graph has sources or sinks".into()));
    }
    if !shape.transitive {
        return Ok(Verdict::NotApplicable("graph is not transitive".into()));
    }
    if shape.is_cycle {
        return Ok(Verdict::NotSimple("graph is a single cycle".into()));
    }
    let cfg = crate::tower::TowerConfig { stages: 1, ..*cfg };
    let t = Tower::base_only(g, w, &cfg)?;
    let sup = Supports::new(&t);
    let fams = h_families(&t, &sup, DEFAULT_MAX_CANDIDATES)?;
    match fams
        .iter()
        .find(|f| !f.is_zero() && !f.is_full(&sup.sizes))
    {
        None => Ok(Verdict::Simple),
        Some(f) => Ok(Verdict::NotSimple(format!(
            "nontrivial invariant family {:?}",
            f.masks
        ))),
    }
}

/// A vertex set with its closure flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexSet {
    pub members: Vec<usize>,
    pub hereditary: bool,
    pub saturated: bool,
}

pub fn is_hereditary(g: &Graph, set: &[bool]) -> bool {
    g.edges().iter().all(|e| !set[e.rng] || set[e.src])
}

pub fn is_saturated(g: &Graph, set: &[bool]) -> bool {
    (0..g.vertex_count()).all(|v| {
        set[v] || {
            let mut ins = g.edges().iter().filter(|e| e.rng == v).peekable();
            ins.peek().is_none() || !ins.all(|e| set[e.src])
        }
    })
}

/// Brute force over all vertex subsets; returns those both hereditary and
/// saturated, ordered by size then bitmask.
pub fn hereditary_saturated(g: &Graph) -> Vec<VertexSet> {
    let nv = g.vertex_count();
    assert!(nv < 24, "brute force limited to small graphs");
    let mut out: Vec<(u32, u64, VertexSet)> = Vec::new();
    for bits in 0u64..(1 << nv) {
        let set: Vec<bool> = (0..nv).map(|v| bits >> v & 1 == 1).collect();
        let (h, s) = (is_hereditary(g, &set), is_saturated(g, &set));
        if h && s {
            out.push((
                bits.count_ones(),
                bits,
                VertexSet {
                    members: (0..nv).filter(|&v| set[v]).collect(),
                    hereditary: h,
                    saturated: s,
                },
            ));
        }
    }
    out.sort_by_key(|(c, b, _)| (*c, *b));
    out.into_iter().map(|(_, _, s)| s).collect()
}

pub fn unweighted_simplicity(g: &Graph) -> Verdict {
    let shape = g.validate();
    if !shape.no_sources || !shape.no_sinks {
        Verdict::NotApplicable("graph has sources or sinks".into())
    } else if !shape.transitive {
        Verdict::NotSimple("graph is not transitive".into())
    } else if shape.is_cycle {
        Verdict::NotSimple("graph is a single cycle".into())
    } else {
        Verdict::Simple
    }
}

/// `J_v` full exactly for `v ∈ W`.
pub fn family_of_subset(sizes: &[usize], members: &[usize]) -> IdealFamily {
    let mut f = IdealFamily::zero(sizes.len());
    for &v in members {
        f.masks[v] = full_mask(sizes[v]);
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::TowerConfig;

    fn g2() -> Graph {
        Graph::new(
            &["v1", "v2"],
            &[("l1", "v1", "v1"), ("l2", "v2", "v2"), ("a", "v1", "v2")],
        )
        .unwrap()
    }

    fn c3() -> Graph {
        Graph::new(
            &["v1", "v2", "v3"],
            &[("e1", "v1", "v2"), ("e2", "v2", "v3"), ("e3", "v3", "v1")],
        )
        .unwrap()
    }

    fn base(g: &Graph, w: &WeightSpec) -> Tower {
        Tower::build(g, w, &TowerConfig { stages: 1, ..Default::default() }).unwrap()
    }

    #[test]
    fn g2_lattice_matches_vertex_sets() {
        let g = g2();
        let t = base(&g, &WeightSpec::unweighted());
        let sup = Supports::new(&t);
        assert!(sup.check_h(&g, &family_of_subset(&sup.sizes, &[0])));
        assert!(!sup.check_h(&g, &family_of_subset(&sup.sizes, &[1])));
        let lat = enumerate_families(&t, 8, DEFAULT_MAX_CANDIDATES).unwrap();
        let hs: Vec<IdealFamily> = hereditary_saturated(&g)
            .iter()
            .map(|s| family_of_subset(&sup.sizes, &s.members))
            .collect();
        assert_eq!(lat.families(), hs);
        assert_eq!(lat.hasse, vec![(0, 1), (1, 2)]);
        for f in lat.families() {
            assert!(verify_fully_invariant(&t, &f, 3).unwrap().passes());
            build_fully_invariant(&t, &f, 0).unwrap();
        }
    }

    #[test]
    fn unsaturated_family_grows() {
        // {a} is hereditary, but b receives only from a
        let g = Graph::new(
            &["a", "b", "c"],
            &[("x", "a", "a"), ("y", "a", "b"), ("w", "b", "c"), ("l", "c", "c")],
        )
        .unwrap();
        let t = base(&g, &WeightSpec::unweighted());
        let sup = Supports::new(&t);
        let f = family_of_subset(&sup.sizes, &[0]);
        assert!(sup.check_h(&g, &f));
        assert!(!check_s(&sup, &f, 8).unwrap().holds);
        assert!(!verify_fully_invariant(&t, &f, 3).unwrap().fibers_stable);
    }

    #[test]
    fn vertex_set_oracle() {
        let sets: Vec<Vec<usize>> = hereditary_saturated(&g2()).into_iter().map(|s| s.members).collect();
        assert_eq!(sets, vec![vec![], vec![0], vec![0, 1]]);
        let sets: Vec<Vec<usize>> = hereditary_saturated(&c3()).into_iter().map(|s| s.members).collect();
        assert_eq!(sets, vec![vec![], vec![0, 1, 2]]);
    }

    #[test]
    fn weighted_cycle_has_more_families() {
        let g = c3();
        let w = WeightSpec::diagonal(&g, 2, 0, &[vec![2.0, 1.0, 3.0]]).unwrap();
        let t = base(&g, &w);
        let lat = enumerate_families(&t, 16, DEFAULT_MAX_CANDIDATES).unwrap();
        assert!(lat.len() > 2);
        let t0 = base(&g, &WeightSpec::unweighted());
        assert_eq!(enumerate_families(&t0, 16, DEFAULT_MAX_CANDIDATES).unwrap().len(), 2);
    }
}
