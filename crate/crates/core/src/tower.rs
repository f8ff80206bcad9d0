//! The stage algebras of the degree-zero quotient: the base algebra `C_0`,
//! its vertex corners `C_v`, the block models `A_n`, the coordinate maps
//! between symbolic elements and `A_n`, the connecting embeddings and the
//! Bratteli diagram they define.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calkin::{CalkinElement, Evaluator, Window, WindowConfig};
use crate::error::{Error, Result};
use crate::findim::{
    embedding_multiplicities, span_items, star_closure, CentralDecomposition, Closure, ClosureOps,
    FindimConfig, LinearMap, StarAlgebra,
};
use crate::graph::{Graph, Path, XiChoice};
use crate::linalg::{kron, rank_of, re, BlockMat, OrthoSpan, C64};
use crate::weights::WeightSpec;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TowerConfig {
    /// Highest stage index built.
    pub stages: usize,
    pub xi: XiChoice,
    /// Extra levels added to the default window base.
    pub base_shift: usize,
    pub window: WindowConfig,
    pub findim: FindimConfig,
    pub seed: u64,
}

impl Default for TowerConfig {
    fn default() -> Self {
        TowerConfig {
            stages: 2,
            xi: XiChoice::LexMin,
            base_shift: 0,
            window: WindowConfig::default(),
            findim: FindimConfig::default(),
            seed: 0,
        }
    }
}

/// Closure operations on symbolic words realized over a fixed window.
pub struct WordOps<'a> {
    pub ev: &'a Evaluator,
    pub window: Window,
}

impl ClosureOps for WordOps<'_> {
    type Item = CalkinElement;
    fn mul(&self, a: &CalkinElement, b: &CalkinElement) -> CalkinElement {
        a.mul(&self.ev.graph, b)
    }
    fn adjoint(&self, a: &CalkinElement) -> CalkinElement {
        a.adjoint()
    }
    fn realize(&self, a: &CalkinElement) -> BlockMat {
        // every item handled here has degree zero
        self.ev
            .window(a, self.window)
            .expect("degree-zero element")
    }
    fn key(&self, a: &CalkinElement) -> Option<String> {
        Some(a.format(&self.ev.graph))
    }
}

/// Generators `u_α z^l u_β*` with `|α| = |β| < p`, `s(α) = s(β)`, `l ∈ {0,1}`.
pub fn base_generators(g: &Graph, p: usize) -> Vec<CalkinElement> {
    let z = CalkinElement::z();
    let mut out = Vec::new();
    for len in 0..p {
        let paths = g.paths(len);
        for a in &paths {
            for b in paths.iter().filter(|b| b.src == a.src) {
                let ua = CalkinElement::u_path(a);
                let ub = CalkinElement::u_path_star(b);
                out.push(ua.mul(g, &ub));
                out.push(CalkinElement::product(g, &[&ua, &z, &ub]));
            }
        }
    }
    out
}

/// Closure of `gens` on the narrowest window (in steps of `p`, starting at
/// width `p`) on which widening by one more period does not change the rank
/// of the closure.
pub fn stable_closure(
    ev: &Evaluator,
    gens: &[CalkinElement],
    base: usize,
    wcfg: &WindowConfig,
    fcfg: &FindimConfig,
) -> Result<(Window, Closure<CalkinElement>)> {
    let p = ev.weights.p;
    let mut width = p;
    for _ in 0..=wcfg.max_widenings {
        let narrow = Window { base, width };
        let one = CalkinElement::one();
        let ops = WordOps {
            ev,
            window: narrow.widened(p),
        };
        let wide = star_closure(&ops, gens, &one, fcfg)?;
        let restricted: Vec<BlockMat> = wide
            .raw
            .iter()
            .map(|x| ev.window(x, narrow))
            .collect::<Result<_>>()?;
        if rank_of(&restricted, wcfg.rank_tol) == wide.algebra.dim() {
            let ops = WordOps { ev, window: narrow };
            let cl = star_closure(&ops, gens, &one, fcfg)?;
            if cl.algebra.dim() == wide.algebra.dim() {
                return Ok((narrow, cl));
            }
        }
        width += p;
    }
    Err(Error::WindowUnstable(format!(
        "closure rank did not stabilise up to width {width}"
    )))
}

/// The corner `u_ξ u_ξ* C_0 u_ξ u_ξ*` at one vertex, with its left regular
/// representation.
#[derive(Clone, Debug)]
pub struct Corner {
    pub vertex: usize,
    pub xi: Path,
    /// `u_ξ u_ξ*`.
    pub projection: CalkinElement,
    /// Window realization with orthonormal basis; the unit is the corner
    /// projection.
    pub algebra: StarAlgebra,
    /// Symbolic representative of each basis element.
    pub symbolic: Vec<CalkinElement>,
    pub decomposition: CentralDecomposition,
    /// Corner coordinates of the minimal central projections.
    pub summand_coords: Vec<DVector<C64>>,
    /// Left multiplication by each basis element in corner coordinates.
    pub regular: Vec<DMatrix<C64>>,
    /// Corner coordinates of the unit.
    pub unit_coords: DVector<C64>,
    /// Orthonormal basis of the regular image.
    pub frame: Vec<DMatrix<C64>>,
}

impl Corner {
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Regular representation of the element with coordinates `c`.
    pub fn regular_of(&self, c: &DVector<C64>) -> DMatrix<C64> {
        let m = self.dim();
        let mut out = DMatrix::zeros(m, m);
        for (ci, l) in c.iter().zip(&self.regular) {
            out += l * *ci;
        }
        out
    }

    /// Inverse of [`Corner::regular_of`].
    pub fn coords_of_regular(&self, x: &DMatrix<C64>) -> DVector<C64> {
        x * &self.unit_coords
    }

    pub fn symbolic_of(&self, c: &DVector<C64>) -> CalkinElement {
        let mut out = CalkinElement::zero();
        for (ci, s) in c.iter().zip(&self.symbolic) {
            if ci.norm() > 1e-14 {
                out = out.add(&s.scale(*ci));
            }
        }
        out
    }
}

/// Matrix unit index `(v, a, b, k)` of a basis element of `A_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BasisLabel {
    pub vertex: usize,
    pub row: usize,
    pub col: usize,
    pub frame: usize,
}

/// The model `A_n = ⊕_v M_{Γ_v} ⊗ C_v`, one block per vertex.
#[derive(Clone, Debug)]
pub struct Stage {
    pub n: usize,
    /// `Γ_v`: paths of length `(n+1)p - 1` with source `v`.
    pub paths: Vec<Vec<Path>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    pub algebra: StarAlgebra,
    pub labels: Vec<BasisLabel>,
    pub decomposition: CentralDecomposition,
    /// `(vertex, corner summand)` of each stage summand.
    pub summand_labels: Vec<(usize, usize)>,
}

impl Stage {
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn path_index(&self, path: &Path) -> Option<usize> {
        self.index[path.src].get(&path.edges).copied()
    }
}

/// Connecting map `A_n → A_{n+1}`.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub map: LinearMap,
    pub multiplicities: Vec<Vec<usize>>,
    pub defect: f64,
}

#[derive(Debug)]
pub struct Tower {
    pub ev: Evaluator,
    pub cfg: TowerConfig,
    pub window: Window,
    pub xi: Vec<Path>,
    pub base: Closure<CalkinElement>,
    pub corners: Vec<Corner>,
    /// Coordinate matrices of the maps `π(e,f): C_{r(e)} → C_{s(e)}`.
    pub edge_maps: HashMap<(usize, usize), DMatrix<C64>>,
    pub stages: Vec<Stage>,
    pub embeddings: Vec<Embedding>,
}

fn rel_residual(a: &StarAlgebra, x: &BlockMat) -> f64 {
    a.residual_norm(x) / x.norm().max(1.0)
}

impl Tower {
    /// Builds `C_0`, the corners and the edge maps; no stages.
    pub fn base_only(g: &Graph, w: &WeightSpec, cfg: &TowerConfig) -> Result<Tower> {
        if !g.no_sources() || !g.no_sinks() {
            return Err(Error::Precondition(
                "the graph must have no sources and no sinks".into(),
            ));
        }
        let w = w.minimized(g);
        let ev = Evaluator::new(g, &w);
        let p = w.p;
        let q = w.q();
        let base_level = ev.default_base(cfg.stages) + cfg.base_shift;
        let gens = base_generators(g, p);
        let (window, base) = stable_closure(&ev, &gens, base_level, &cfg.window, &cfg.findim)?;
        let xi: Vec<Path> = (0..g.vertex_count())
            .map(|v| g.xi(v, q, cfg.xi))
            .collect::<Result<_>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut corners = Vec::new();
        for (v, x) in xi.iter().enumerate() {
            corners.push(build_corner(&ev, window, &base, v, x, &mut rng, &cfg.findim)?);
        }
        let mut t = Tower {
            ev,
            cfg: *cfg,
            window,
            xi,
            base,
            corners,
            edge_maps: HashMap::new(),
            stages: Vec::new(),
            embeddings: Vec::new(),
        };
        for e in 0..g.edge_count() {
            for f in 0..g.edge_count() {
                if g.s(e) == g.s(f) && g.r(e) == g.r(f) {
                    let m = t.edge_map_direct(e, f)?;
                    t.edge_maps.insert((e, f), m);
                }
            }
        }
        Ok(t)
    }

    /// Full tower with stages `0..=cfg.stages` and verified embeddings.
    pub fn build(g: &Graph, w: &WeightSpec, cfg: &TowerConfig) -> Result<Tower> {
        let mut t = Tower::base_only(g, w, cfg)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
        for n in 0..=cfg.stages {
            let st = t.build_stage(n)?;
            t.stages.push(st);
        }
        for n in 0..cfg.stages {
            let map = t.psi_map(n)?;
            let (a, b) = (&t.stages[n], &t.stages[n + 1]);
            let defect = map.homomorphism_defect(&a.algebra, &b.algebra, 4, &mut rng);
            if defect > cfg.findim.check_tol || !map.is_injective(cfg.findim.rank_tol) {
                return Err(Error::Verification(format!(
                    "stage map {n} is not an injective unital *-homomorphism (defect {defect:.3e})"
                )));
            }
            let multiplicities = embedding_multiplicities(
                &a.algebra,
                &a.decomposition,
                &b.algebra,
                &b.decomposition,
                &map,
                &mut rng,
                &cfg.findim,
            )?;
            t.embeddings.push(Embedding {
                map,
                multiplicities,
                defect,
            });
        }
        Ok(t)
    }

    pub fn graph(&self) -> &Graph {
        &self.ev.graph
    }

    pub fn weights(&self) -> &WeightSpec {
        &self.ev.weights
    }

    pub fn p(&self) -> usize {
        self.ev.weights.p
    }

    pub fn q(&self) -> usize {
        self.ev.weights.q()
    }

    pub fn realize(&self, x: &CalkinElement) -> Result<BlockMat> {
        self.ev.window(x, self.window)
    }

    /// Corner coordinates of a window matrix, checked for membership.
    pub fn corner_coords(&self, v: usize, x: &BlockMat) -> Result<DVector<C64>> {
        let c = &self.corners[v].algebra;
        let res = rel_residual(c, x);
        if res > self.cfg.findim.check_tol {
            return Err(Error::Verification(format!(
                "element is not in the corner at {} (residual {res:.3e})",
                self.graph().vertex_name(v)
            )));
        }
        Ok(c.coords(x))
    }

    /// `π(α,β)(c)` as a symbolic sandwich.
    pub fn pi_symbolic(&self, alpha: &Path, beta: &Path, c: &CalkinElement) -> CalkinElement {
        let g = self.graph();
        let left = CalkinElement::product(
            g,
            &[
                &CalkinElement::u_path(&self.xi[alpha.src]),
                &CalkinElement::u_path_star(alpha),
                &CalkinElement::u_path_star(&self.xi[alpha.rng]),
            ],
        );
        let right = CalkinElement::product(
            g,
            &[
                &CalkinElement::u_path(&self.xi[beta.rng]),
                &CalkinElement::u_path(beta),
                &CalkinElement::u_path_star(&self.xi[beta.src]),
            ],
        );
        CalkinElement::product(g, &[&left, c, &right])
    }

    /// Coordinate matrix of `π(α,β)` computed from sandwiches of basis
    /// representatives.
    pub fn pi_direct(&self, alpha: &Path, beta: &Path) -> Result<DMatrix<C64>> {
        let (from, to) = (alpha.rng, alpha.src);
        let m_from = self.corners[from].dim();
        let m_to = self.corners[to].dim();
        let mut out = DMatrix::zeros(m_to, m_from);
        for l in 0..m_from {
            let img = self.pi_symbolic(alpha, beta, &self.corners[from].symbolic[l]);
            let c = self.corner_coords(to, &self.realize(&img)?)?;
            out.set_column(l, &c);
        }
        Ok(out)
    }

    fn edge_map_direct(&self, e: usize, f: usize) -> Result<DMatrix<C64>> {
        let g = self.graph();
        let pe = g.path_from_edges(&[e]).expect("edge");
        let pf = g.path_from_edges(&[f]).expect("edge");
        self.pi_direct(&pe, &pf)
    }

    /// `π(μ,μ)` composed from edge maps; the range-side edge acts first.
    pub fn pi_path(&self, mu: &Path) -> DMatrix<C64> {
        let m = self.corners[mu.rng].dim();
        let mut acc = DMatrix::<C64>::identity(m, m);
        for &e in &mu.edges {
            acc = &self.edge_maps[&(e, e)] * acc;
        }
        acc
    }

    fn build_stage(&self, n: usize) -> Result<Stage> {
        let g = self.graph();
        let len = (n + 1) * self.p() - 1;
        let all = g.paths(len);
        let nv = g.vertex_count();
        let mut paths = vec![Vec::new(); nv];
        for pth in all {
            paths[pth.src].push(pth);
        }
        let index: Vec<HashMap<Vec<usize>, usize>> = paths
            .iter()
            .map(|ps| ps.iter().enumerate().map(|(i, p)| (p.edges.clone(), i)).collect())
            .collect();
        let sizes: Vec<usize> = (0..nv)
            .map(|v| paths[v].len() * self.corners[v].dim())
            .collect();
        let mut basis = Vec::new();
        let mut labels = Vec::new();
        for v in 0..nv {
            let pv = paths[v].len();
            for a in 0..pv {
                for b in 0..pv {
                    for (k, fr) in self.corners[v].frame.iter().enumerate() {
                        let mut x = BlockMat::zeros(&sizes.iter().map(|&s| (s, s)).collect::<Vec<_>>());
                        x.blocks[v] = kron(&unit_matrix(pv, a, b), fr);
                        basis.push(x);
                        labels.push(BasisLabel {
                            vertex: v,
                            row: a,
                            col: b,
                            frame: k,
                        });
                    }
                }
            }
        }
        let algebra = StarAlgebra {
            basis,
            unit: BlockMat::identity(&sizes),
        };
        let mut projections = Vec::new();
        let mut dims = Vec::new();
        let mut summand_labels = Vec::new();
        for v in 0..nv {
            let c = &self.corners[v];
            let pv = paths[v].len();
            for (i, zc) in c.summand_coords.iter().enumerate() {
                let mut proj = algebra.unit.zeros_like();
                proj.blocks[v] = kron(&DMatrix::identity(pv, pv), &c.regular_of(zc));
                projections.push(proj);
                dims.push(pv * c.decomposition.dims[i]);
                summand_labels.push((v, i));
            }
        }
        Ok(Stage {
            n,
            paths,
            index,
            algebra,
            labels,
            decomposition: CentralDecomposition { projections, dims },
            summand_labels,
        })
    }

    /// The stage-`n` element `E_{ab} ⊗ c` at vertex `v` (corner coordinates `c`).
    pub fn stage_element(&self, n: usize, v: usize, a: usize, b: usize, c: &DVector<C64>) -> BlockMat {
        let st = &self.stages[n];
        let mut x = st.algebra.unit.zeros_like();
        x.blocks[v] = kron(&unit_matrix(st.paths[v].len(), a, b), &self.corners[v].regular_of(c));
        x
    }

    /// Coordinates of a symbolic element of `C_n` in the model `A_n`.
    pub fn tau(&self, n: usize, x: &CalkinElement) -> Result<BlockMat> {
        let g = self.graph();
        let st = &self.stages[n];
        let mut out = st.algebra.unit.zeros_like();
        for v in 0..g.vertex_count() {
            let uxi = CalkinElement::u_path(&self.xi[v]);
            let uxi_s = uxi.adjoint();
            let m = self.corners[v].dim();
            for (a, ga) in st.paths[v].iter().enumerate() {
                let left = uxi.mul(g, &CalkinElement::u_path_star(ga));
                let lx = left.mul(g, x);
                for (b, gb) in st.paths[v].iter().enumerate() {
                    let right = CalkinElement::u_path(gb).mul(g, &uxi_s);
                    let entry = lx.mul(g, &right);
                    let c = self.corner_coords(v, &self.realize(&entry)?)?;
                    let l = self.corners[v].regular_of(&c);
                    out.blocks[v].view_mut((a * m, b * m), (m, m)).copy_from(&l);
                }
            }
        }
        Ok(out)
    }

    /// Symbolic element of `C_n` with model coordinates `y`.
    pub fn tau_inv(&self, n: usize, y: &BlockMat) -> CalkinElement {
        let g = self.graph();
        let st = &self.stages[n];
        let mut out = CalkinElement::zero();
        for v in 0..g.vertex_count() {
            let m = self.corners[v].dim();
            let uxi = CalkinElement::u_path(&self.xi[v]);
            for (a, ga) in st.paths[v].iter().enumerate() {
                for (b, gb) in st.paths[v].iter().enumerate() {
                    let blk = y.blocks[v].view((a * m, b * m), (m, m)).into_owned();
                    if blk.iter().all(|z| z.norm() < 1e-14) {
                        continue;
                    }
                    let c = self.corners[v].coords_of_regular(&blk);
                    let inner = self.corners[v].symbolic_of(&c);
                    let term = CalkinElement::product(
                        g,
                        &[
                            &CalkinElement::u_path(ga),
                            &uxi.adjoint(),
                            &inner,
                            &uxi,
                            &CalkinElement::u_path_star(gb),
                        ],
                    );
                    out = out.add(&term);
                }
            }
        }
        out
    }

    /// `E_{αβ} ⊗ c ↦ Σ_{|μ|=p, r(μ)=s(α)} E_{αμ,βμ} ⊗ π(μ,μ)(c)` on the basis
    /// of `A_n`.
    pub fn psi_map(&self, n: usize) -> Result<LinearMap> {
        let g = self.graph();
        let (src, dst) = (&self.stages[n], &self.stages[n + 1]);
        let mus = g.paths(self.p());
        let pis: Vec<DMatrix<C64>> = mus.iter().map(|m| self.pi_path(m)).collect();
        let mut images = Vec::with_capacity(src.dim());
        for lab in &src.labels {
            let v = lab.vertex;
            let c = self.corners[v].coords_of_regular(&self.corners[v].frame[lab.frame]);
            let (alpha, beta) = (&src.paths[v][lab.row], &src.paths[v][lab.col]);
            let mut img = dst.algebra.unit.zeros_like();
            for (mu, pi) in mus.iter().zip(&pis).filter(|(m, _)| m.rng == v) {
                let w = mu.src;
                let am = g.compose(alpha, mu).expect("composable");
                let bm = g.compose(beta, mu).expect("composable");
                let (Some(a2), Some(b2)) = (dst.path_index(&am), dst.path_index(&bm)) else {
                    return Err(Error::Verification("extended path missing from next stage".into()));
                };
                let piece = kron(
                    &unit_matrix(dst.paths[w].len(), a2, b2),
                    &self.corners[w].regular_of(&(pi * &c)),
                );
                img.blocks[w] += piece;
            }
            images.push(img);
        }
        Ok(LinearMap { images })
    }

    /// Dimension predicted by `Σ_v |Γ_v|² dim C_v`.
    pub fn predicted_dim(&self, n: usize) -> usize {
        let len = (n + 1) * self.p() - 1;
        let g = self.graph();
        let mut count = vec![0usize; g.vertex_count()];
        for pth in g.paths(len) {
            count[pth.src] += 1;
        }
        count
            .iter()
            .zip(&self.corners)
            .map(|(c, k)| c * c * k.dim())
            .sum()
    }

    pub fn bratteli(&self) -> Bratteli {
        let g = self.graph();
        let layers = self
            .stages
            .iter()
            .map(|st| {
                st.decomposition
                    .dims
                    .iter()
                    .zip(&st.summand_labels)
                    .map(|(&d, &(v, i))| BratteliNode {
                        vertex: g.vertex_name(v).to_string(),
                        corner_summand: i,
                        dim: d,
                    })
                    .collect()
            })
            .collect();
        let edges = self
            .embeddings
            .iter()
            .enumerate()
            .flat_map(|(n, e)| {
                e.multiplicities.iter().enumerate().flat_map(move |(i, row)| {
                    row.iter().enumerate().filter(|(_, m)| **m > 0).map(move |(j, &m)| BratteliEdge {
                        stage: n,
                        from: i,
                        to: j,
                        multiplicity: m,
                    })
                })
            })
            .collect();
        Bratteli {
            layers,
            edges,
            window: self.window,
            xi: self.xi.iter().map(|x| g.walk_string(x)).collect(),
            seed: self.cfg.seed,
            period: self.p(),
        }
    }
}

fn unit_matrix(n: usize, a: usize, b: usize) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(n, n);
    m[(a, b)] = re(1.0);
    m
}

fn build_corner(
    ev: &Evaluator,
    window: Window,
    base: &Closure<CalkinElement>,
    v: usize,
    xi: &Path,
    rng: &mut ChaCha8Rng,
    cfg: &FindimConfig,
) -> Result<Corner> {
    let g = &ev.graph;
    let projection = CalkinElement::u_path(xi).mul(g, &CalkinElement::u_path_star(xi));
    let items: Vec<CalkinElement> = base
        .raw
        .iter()
        .map(|w| CalkinElement::product(g, &[&projection, w, &projection]))
        .filter(|x| !x.is_zero())
        .collect();
    let ops = WordOps { ev, window };
    let unit = ev.window(&projection, window)?;
    let cl = span_items(&ops, &items, unit, cfg)?;
    let algebra = cl.algebra;
    let symbolic: Vec<CalkinElement> = cl
        .raw_coeffs
        .iter()
        .map(|row| {
            row.iter()
                .zip(&cl.raw)
                .fold(CalkinElement::zero(), |acc, (c, x)| acc.add(&x.scale(*c)))
        })
        .collect();
    let defect = algebra.closure_defect();
    if defect > cfg.check_tol {
        return Err(Error::Verification(format!(
            "corner at {} is not closed under products (defect {defect:.3e})",
            g.vertex_name(v)
        )));
    }
    let m = algebra.dim();
    let regular: Vec<DMatrix<C64>> = algebra
        .basis
        .iter()
        .map(|b| {
            let mut l = DMatrix::zeros(m, m);
            for (j, bj) in algebra.basis.iter().enumerate() {
                l.set_column(j, &algebra.coords(&b.mul(bj)));
            }
            l
        })
        .collect();
    let unit_coords = algebra.coords(&algebra.unit);
    let mut span = OrthoSpan::new(cfg.rank_tol);
    let lifted: Vec<BlockMat> = regular.iter().map(|l| BlockMat::new(vec![l.clone()])).collect();
    span.insert_all(lifted.iter());
    if span.dim() != m {
        return Err(Error::Numerical(format!(
            "regular representation of the corner at {} is not faithful",
            g.vertex_name(v)
        )));
    }
    let frame = span.basis.into_iter().map(|b| b.blocks[0].clone()).collect();
    let decomposition = algebra.central_decomposition(rng, cfg)?;
    let summand_coords = decomposition
        .projections
        .iter()
        .map(|z| algebra.coords(z))
        .collect();
    Ok(Corner {
        vertex: v,
        xi: xi.clone(),
        projection,
        algebra,
        symbolic,
        decomposition,
        summand_coords,
        regular,
        unit_coords,
        frame,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BratteliNode {
    pub vertex: String,
    pub corner_summand: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BratteliEdge {
    /// Source layer; the target layer is `stage + 1`.
    pub stage: usize,
    pub from: usize,
    pub to: usize,
    pub multiplicity: usize,
}

/// Layered diagram of the stage algebras and their embeddings.
#[derive(Clone, Debug, Serialize)]
pub struct Bratteli {
    pub layers: Vec<Vec<BratteliNode>>,
    pub edges: Vec<BratteliEdge>,
    pub window: Window,
    pub xi: Vec<String>,
    pub seed: u64,
    pub period: usize,
}

impl Bratteli {
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph bratteli {\n  rankdir=TB;\n  node [shape=circle];\n");
        for (n, layer) in self.layers.iter().enumerate() {
            s.push_str("  { rank=same;");
            for (j, node) in layer.iter().enumerate() {
                s.push_str(&format!(
                    " s{n}_{j} [label=\"{}\\n{}:{}\"];",
                    node.dim, node.vertex, node.corner_summand
                ));
            }
            s.push_str(" }\n");
        }
        for e in &self.edges {
            let label = if e.multiplicity > 1 {
                format!(" [label=\"{}\"]", e.multiplicity)
            } else {
                String::new()
            };
            s.push_str(&format!(
                "  s{}_{} -> s{}_{}{};\n",
                e.stage,
                e.from,
                e.stage + 1,
                e.to,
                label
            ));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Sorted multiset of multiplicities per stage transition.
    pub fn multiplicity_multisets(&self) -> Vec<Vec<usize>> {
        let stages = self.layers.len().saturating_sub(1);
        let mut out = vec![Vec::new(); stages];
        for e in &self.edges {
            out[e.stage].push(e.multiplicity);
        }
        for m in out.iter_mut() {
            m.sort_unstable();
        }
        out
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

    fn o2() -> Graph {
        Graph::new(&["v"], &[("e", "v", "v"), ("f", "v", "v")]).unwrap()
    }

    fn g2() -> Graph {
        Graph::new(
            &["v1", "v2"],
            &[("l1", "v1", "v1"), ("l2", "v2", "v2"), ("a", "v1", "v2")],
        )
        .unwrap()
    }

    fn cfg(stages: usize) -> TowerConfig {
        TowerConfig {
            stages,
            ..Default::default()
        }
    }

    #[test]
    fn unweighted_base_is_vertex_span() {
        for g in [c3(), o2(), g2()] {
            let t = Tower::base_only(&g, &WeightSpec::unweighted(), &cfg(1)).unwrap();
            assert_eq!(t.base.algebra.dim(), g.vertex_count());
            assert!(t.corners.iter().all(|c| c.dim() == 1));
        }
    }

    #[test]
    fn weighted_cycle_corners() {
        let g = c3();
        let w = WeightSpec::diagonal(&g, 2, 0, &[vec![2.0, 1.0, 3.0]]).unwrap();
        let t = Tower::build(&g, &w, &cfg(2)).unwrap();
        assert_eq!(t.window.width, 6);
        assert_eq!(t.base.algebra.dim(), 15);
        assert!(t.corners.iter().all(|c| c.dim() == 5 && c.decomposition.dims == vec![1; 5]));
        for n in 0..=2 {
            assert_eq!(t.stages[n].dim(), t.predicted_dim(n));
            assert_eq!(t.stages[n].dim(), 15);
        }
    }

    #[test]
    fn o2_stage_chain() {
        let t = Tower::build(&o2(), &WeightSpec::unweighted(), &cfg(3)).unwrap();
        let dims: Vec<Vec<usize>> = t.stages.iter().map(|s| s.decomposition.dims.clone()).collect();
        assert_eq!(dims, vec![vec![1], vec![2], vec![4], vec![8]]);
        for e in &t.embeddings {
            assert_eq!(e.multiplicities, vec![vec![2]]);
        }
    }

    #[test]
    fn g2_multiplicities() {
        let t = Tower::build(&g2(), &WeightSpec::unweighted(), &cfg(2)).unwrap();
        // summand order is by vertex; m[i][j] counts edges from j's vertex into i's
        assert_eq!(t.embeddings[0].multiplicities, vec![vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn tau_round_trip_and_products() {
        let g = c3();
        let w = WeightSpec::diagonal(&g, 2, 0, &[vec![2.0, 1.0, 3.0]]).unwrap();
        let t = Tower::build(&g, &w, &cfg(1)).unwrap();
        for n in 0..=1 {
            let st = &t.stages[n];
            for (i, b) in st.algebra.basis.iter().enumerate().step_by(2) {
                let x = t.tau_inv(n, b);
                let back = t.tau(n, &x).unwrap();
                assert!(back.sub(b).norm() < 1e-8, "basis {i}");
            }
            let a = t.tau_inv(n, &st.algebra.basis[1]);
            let b = t.tau_inv(n, &st.algebra.basis[3]);
            let lhs = t.tau(n, &a.mul(&g, &b)).unwrap();
            let rhs = t.tau(n, &a).unwrap().mul(&t.tau(n, &b).unwrap());
            assert!(lhs.sub(&rhs).norm() < 1e-8);
        }
    }
}
