//! Alternating weights on a directed cycle: the diagonal characters along
//! each path class, the kernel ideal cut out by one class, and an
//! end-to-end check that the weighted cycle has a nontrivial family.

use serde::Serialize;

use crate::calkin::CalkinElement;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ideals::{enumerate_families, IdealFamily, DEFAULT_MAX_CANDIDATES};
use crate::linalg::{re, BlockMat, C64};
use crate::tower::{Tower, TowerConfig};
use crate::weights::WeightSpec;

/// Cycle `v_1 → v_2 → … → v_k → v_1` with weights `t_i` on odd levels.
#[derive(Clone, Debug, Serialize)]
pub struct CycleModel {
    pub k: usize,
    pub t: Vec<f64>,
    pub p: usize,
    /// Level period of the characters, `lcm(p, k)`.
    pub period: usize,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Graph with edges `e_i: v_i → v_{i+1}` and the diagonal weights giving
/// the path `α` of length `j < p` the value `t_{s(α)}` for odd `j` and `1`
/// otherwise.
pub fn build_cycle(k: usize, t: &[f64], p: usize) -> Result<(Graph, WeightSpec, CycleModel)> {
    if k < 2 {
        return Err(Error::InvalidModel("cycle length must be at least 2".into()));
    }
    if t.len() != k {
        return Err(Error::InvalidModel(format!("expected {k} weights, got {}", t.len())));
    }
    if p < 2 {
        return Err(Error::InvalidModel("period must be at least 2".into()));
    }
    if t.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::InvalidModel("weights must be positive".into()));
    }
    if t.iter().all(|x| *x == t[0]) {
        return Err(Error::InvalidModel("weights must not all be equal".into()));
    }
    let names: Vec<String> = (1..=k).map(|i| format!("v{i}")).collect();
    let edges: Vec<(String, String, String)> = (0..k)
        .map(|i| (format!("e{}", i + 1), names[i].clone(), names[(i + 1) % k].clone()))
        .collect();
    let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let edge_refs: Vec<(&str, &str, &str)> = edges
        .iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
        .collect();
    let g = Graph::new(&name_refs, &edge_refs)?;
    let levels: Vec<Vec<f64>> = (1..p)
        .map(|j| {
            g.paths(j)
                .iter()
                .map(|a| if j % 2 == 1 { t[a.src] } else { 1.0 })
                .collect()
        })
        .collect();
    let w = WeightSpec::diagonal(&g, p, 0, &levels)?;
    let model = CycleModel {
        k,
        t: t.to_vec(),
        p,
        period: p / gcd(p, k) * k,
    };
    Ok((g, w, model))
}

impl CycleModel {
    fn path_index(&self, ev: &crate::calkin::Evaluator, level: usize, i: usize) -> usize {
        ev.with_table(level, |tb| {
            (0..tb.count(level))
                .find(|&j| tb.src(level, j) == i)
                .expect("every vertex starts a path")
        })
    }

    /// `φ_{n,i}(x)`: the asymptotic diagonal entry of `x` at the path of
    /// length `≡ n (mod L)` leaving `v_i` (`i` is zero-based).
    pub fn char_phi(&self, ev: &crate::calkin::Evaluator, x: &CalkinElement, n: usize, i: usize) -> Result<C64> {
        let l = self.period;
        let threshold = x.depth() + ev.weights.n + 2 * self.p;
        let mut lvl = n % l;
        while lvl < threshold {
            lvl += l;
        }
        let at = |k: usize| -> C64 {
            let j = self.path_index(ev, k, i);
            ev.eval_graded(x, k, 0)[(j, j)]
        };
        let a = at(lvl);
        let b = at(lvl + l);
        if (a - b).norm() > 1e-12 * a.norm().max(1.0) {
            return Err(Error::Numerical(format!(
                "character values at levels {lvl} and {} differ: {a} vs {b}",
                lvl + l
            )));
        }
        Ok(a)
    }

    /// Whether `φ_{n,1}(x)` vanishes for every residue `n`.
    pub fn k1_member(&self, ev: &crate::calkin::Evaluator, x: &CalkinElement) -> Result<bool> {
        for n in 0..self.period {
            if self.char_phi(ev, x, n, 0)?.norm() > 1e-9 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Character of a window matrix: its diagonal entry at the path of a
    /// window level `≡ n (mod L)` leaving `v_i`.
    pub fn char_window(&self, t: &Tower, x: &BlockMat, n: usize, i: usize) -> Result<C64> {
        let l = self.period;
        let (pos, lvl) = t
            .window
            .levels()
            .enumerate()
            .find(|(_, k)| k % l == n % l)
            .ok_or_else(|| Error::WindowUnstable(format!("window narrower than the period {l}")))?;
        let j = self.path_index(&t.ev, lvl, i);
        Ok(x.blocks[pos][(j, j)])
    }

    /// The family `J_v = {summands on which every φ_{n,1} vanishes}`.
    pub fn k1_family(&self, t: &Tower) -> Result<IdealFamily> {
        let mut fam = IdealFamily::zero(self.k);
        for (v, c) in t.corners.iter().enumerate() {
            for (j, z) in c.decomposition.projections.iter().enumerate() {
                let mut zero = true;
                for n in 0..self.period {
                    if self.char_window(t, z, n, 0)?.norm() > 1e-9 {
                        zero = false;
                    }
                }
                if zero {
                    fam.masks[v] |= 1 << j;
                }
            }
        }
        Ok(fam)
    }

    /// Number of distinct characters of the corner at `v` read off the
    /// window diagonals (the corner is diagonal on a cycle).
    pub fn corner_character_count(&self, t: &Tower, v: usize) -> usize {
        let c = &t.corners[v];
        let mut seen: Vec<Vec<C64>> = Vec::new();
        for (pos, _) in t.window.levels().enumerate() {
            let rows = c.algebra.unit.blocks[pos].nrows();
            for j in 0..rows {
                let vals: Vec<C64> = c.algebra.basis.iter().map(|b| b.blocks[pos][(j, j)]).collect();
                if vals.iter().all(|z| z.norm() < 1e-9) {
                    continue;
                }
                if !seen
                    .iter()
                    .any(|s| s.iter().zip(&vals).all(|(a, b)| (a - b).norm() < 1e-9))
                {
                    seen.push(vals);
                }
            }
        }
        seen.len()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipCheck {
    pub element: String,
    pub member: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DemoReport {
    pub model: CycleModel,
    /// `φ_{n,i}(z)` for `n < L` (rows) and each vertex (columns).
    pub phi_z: Vec<Vec<f64>>,
    pub k1_checks: Vec<MembershipCheck>,
    pub corner_dims: Vec<usize>,
    pub character_dims: Vec<usize>,
    pub window_width: usize,
    pub weighted_families: usize,
    pub unweighted_families: usize,
    pub k1_family: IdealFamily,
    pub k1_family_in_lattice: bool,
    pub nontrivial_family: Option<IdealFamily>,
    pub nontrivial_ideal_found: bool,
}

/// End-to-end run of the cycle model.
pub fn demo_report(k: usize, t: &[f64], p: usize, cfg: &TowerConfig) -> Result<DemoReport> {
    let (g, w, model) = build_cycle(k, t, p)?;
    let cfg = TowerConfig { stages: 1, ..*cfg };
    let tower = Tower::build(&g, &w, &cfg)?;
    let ev = &tower.ev;
    let z = CalkinElement::z();
    let mut phi_z = Vec::new();
    for n in 0..model.period {
        let row = (0..k)
            .map(|i| model.char_phi(ev, &z, n, i).map(|c| c.re))
            .collect::<Result<Vec<_>>>()?;
        phi_z.push(row);
    }
    let one = CalkinElement::one();
    let shifted = |c: f64| z.sub(&one.scale(re(c)));
    let mut k1_checks = Vec::new();
    let product = shifted(1.0).mul(&g, &shifted(t[0]));
    for x in [product, shifted(t[k - 1])] {
        k1_checks.push(MembershipCheck {
            element: x.format(&g),
            member: model.k1_member(ev, &x)?,
        });
    }
    let lattice = enumerate_families(&tower, 64, DEFAULT_MAX_CANDIDATES)?;
    let unweighted = Tower::build(&g, &WeightSpec::unweighted(), &cfg)?;
    let unweighted_families = enumerate_families(&unweighted, 64, DEFAULT_MAX_CANDIDATES)?.len();
    let k1_family = model.k1_family(&tower)?;
    let fams = lattice.families();
    let k1_family_in_lattice = fams.contains(&k1_family);
    let nontrivial_family = lattice
        .entries
        .iter()
        .find(|e| !e.trivial_zero && !e.trivial_full)
        .map(|e| e.family.clone());
    let sizes = &lattice.corner_summands;
    let nontrivial_ideal_found = lattice.len() > 2
        && k1_family_in_lattice
        && !k1_family.is_zero()
        && !k1_family.is_full(sizes);
    Ok(DemoReport {
        corner_dims: tower.corners.iter().map(|c| c.dim()).collect(),
        character_dims: (0..k).map(|v| model.corner_character_count(&tower, v)).collect(),
        window_width: tower.window.width,
        phi_z,
        k1_checks,
        weighted_families: lattice.len(),
        unweighted_families,
        k1_family,
        k1_family_in_lattice,
        nontrivial_family,
        nontrivial_ideal_found,
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calkin::Evaluator;

    #[test]
    fn rejects_degenerate_models() {
        assert!(build_cycle(3, &[1.0, 1.0, 1.0], 2).is_err());
        assert!(build_cycle(3, &[1.0, 2.0], 2).is_err());
        let (_, _, m) = build_cycle(4, &[2.0, 1.0, 3.0, 1.0], 2).unwrap();
        assert_eq!(m.period, 4);
    }

    #[test]
    fn characters_of_generators() {
        let (g, w, m) = build_cycle(3, &[2.0, 1.0, 3.0], 2).unwrap();
        assert_eq!(m.period, 6);
        let ev = Evaluator::new(&g, &w);
        let z = CalkinElement::z();
        for n in 0..6 {
            for i in 0..3 {
                let want = if n % 2 == 0 { 1.0 } else { m.t[i] };
                assert!((m.char_phi(&ev, &z, n, i).unwrap() - re(want)).norm() < 1e-12);
            }
        }
        let pv2 = CalkinElement::p(1);
        assert!((m.char_phi(&ev, &pv2, 1, 0).unwrap() - re(1.0)).norm() < 1e-12);
        let ue = CalkinElement::u(&g, 0);
        let proj = ue.mul(&g, &ue.adjoint());
        for n in 0..6 {
            let a = m.char_phi(&ev, &proj, n, 0).unwrap();
            let b = m.char_phi(&ev, &pv2, n, 0).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn demo_finds_nontrivial_ideal() {
        let r = demo_report(3, &[2.0, 1.0, 3.0], 2, &TowerConfig::default()).unwrap();
        assert!(r.k1_checks[0].member && !r.k1_checks[1].member);
        assert!(r.weighted_families > 2);
        assert_eq!(r.unweighted_families, 2);
        assert!(r.nontrivial_ideal_found);
        assert_eq!(r.corner_dims, r.character_dims);
    }
}
