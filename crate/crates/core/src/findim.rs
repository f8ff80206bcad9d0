//! Finite-dimensional *-algebras of block matrices: product/adjoint
//! closure, central decomposition, ideals and embedding multiplicities.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, null_space_scaled, random_coeffs, random_real, re, BlockMat, OrthoSpan, C64, ZERO};

/// Tolerances used by the structure computations.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct FindimConfig {
    /// Relative rank tolerance.
    pub rank_tol: f64,
    /// Relative tolerance for commutation, membership and homomorphism checks.
    pub check_tol: f64,
    /// Minimal relative gap between eigenvalue clusters.
    pub gap_tol: f64,
    /// Allowed distance of a multiplicity or dimension from an integer.
    pub integer_tol: f64,
    pub max_dim: usize,
    pub max_resamples: usize,
}

impl Default for FindimConfig {
    fn default() -> Self {
        FindimConfig {
            rank_tol: 1e-8,
            check_tol: 1e-8,
            gap_tol: 1e-6,
            integer_tol: 1e-4,
            max_dim: 4096,
            max_resamples: 8,
        }
    }
}

/// Operations used by [`star_closure`] on symbolic or concrete items.
pub trait ClosureOps {
    type Item: Clone;
    fn mul(&self, a: &Self::Item, b: &Self::Item) -> Self::Item;
    fn adjoint(&self, a: &Self::Item) -> Self::Item;
    fn realize(&self, a: &Self::Item) -> BlockMat;
    /// Identity key for skipping repeated items (e.g. equal words).
    fn key(&self, _a: &Self::Item) -> Option<String> {
        None
    }
}

/// Closure ops on plain block matrices.
pub struct MatrixOps;

impl ClosureOps for MatrixOps {
    type Item = BlockMat;
    fn mul(&self, a: &BlockMat, b: &BlockMat) -> BlockMat {
        a.mul(b)
    }
    fn adjoint(&self, a: &BlockMat) -> BlockMat {
        a.adjoint()
    }
    fn realize(&self, a: &BlockMat) -> BlockMat {
        a.clone()
    }
}

/// A *-closed subspace with an orthonormal basis and a unit.
#[derive(Clone, Debug)]
pub struct StarAlgebra {
    pub basis: Vec<BlockMat>,
    pub unit: BlockMat,
}

/// Result of a closure together with the items that produced it.
#[derive(Clone, Debug)]
pub struct Closure<T> {
    pub algebra: StarAlgebra,
    /// Independent items, in insertion order.
    pub raw: Vec<T>,
    /// `basis[i] = Σ_j raw_coeffs[i][j] · realize(raw[j])`.
    pub raw_coeffs: Vec<Vec<C64>>,
}

struct Builder<'a, O: ClosureOps> {
    ops: &'a O,
    span: OrthoSpan,
    raw: Vec<O::Item>,
    raw_coeffs: Vec<Vec<C64>>,
    seen: HashSet<String>,
    max_dim: usize,
}

impl<O: ClosureOps> Builder<'_, O> {
    fn insert(&mut self, item: O::Item) -> Result<bool> {
        if let Some(k) = self.ops.key(&item) {
            if !self.seen.insert(k) {
                return Ok(false);
            }
        }
        let m = self.ops.realize(&item);
        let Some((coeffs, norm)) = self.span.try_insert(&m) else {
            return Ok(false);
        };
        let n = self.raw.len();
        let mut row = vec![ZERO; n + 1];
        for (i, c) in coeffs.iter().enumerate() {
            for (j, b) in self.raw_coeffs[i].iter().enumerate() {
                row[j] -= c * b;
            }
        }
        row[n] += re(1.0);
        for x in row.iter_mut() {
            *x /= norm;
        }
        self.raw.push(item);
        self.raw_coeffs.push(row);
        if self.raw.len() > self.max_dim {
            return Err(Error::ClosureOverflow {
                dim: self.raw.len(),
                max: self.max_dim,
            });
        }
        Ok(true)
    }
}

/// Smallest subspace containing `gens` and `unit` that is closed under
/// products and adjoints.
pub fn star_closure<O: ClosureOps>(
    ops: &O,
    gens: &[O::Item],
    unit: &O::Item,
    cfg: &FindimConfig,
) -> Result<Closure<O::Item>> {
    let mut b = Builder {
        ops,
        span: OrthoSpan::new(cfg.rank_tol),
        raw: Vec::new(),
        raw_coeffs: Vec::new(),
        seen: HashSet::new(),
        max_dim: cfg.max_dim,
    };
    b.insert(unit.clone())?;
    for g in gens {
        b.insert(g.clone())?;
        b.insert(ops.adjoint(g))?;
    }
    // Products of every pair of independent items; new items are combined
    // with everything found so far until nothing new appears.
    let mut done = 0;
    while done < b.raw.len() {
        let end = b.raw.len();
        for i in done..end {
            let adj = ops.adjoint(&b.raw[i]);
            b.insert(adj)?;
            for j in 0..=i {
                let (x, y) = (b.raw[i].clone(), b.raw[j].clone());
                b.insert(ops.mul(&x, &y))?;
                if i != j {
                    b.insert(ops.mul(&y, &x))?;
                }
            }
        }
        done = end;
    }
    let unit_m = ops.realize(unit);
    Ok(Closure {
        algebra: StarAlgebra {
            basis: b.span.basis,
            unit: unit_m,
        },
        raw: b.raw,
        raw_coeffs: b.raw_coeffs,
    })
}

/// Linear span of `items` (no products) with the same provenance data as
/// [`star_closure`]; `unit` is recorded but not inserted.
pub fn span_items<O: ClosureOps>(
    ops: &O,
    items: &[O::Item],
    unit: BlockMat,
    cfg: &FindimConfig,
) -> Result<Closure<O::Item>> {
    let mut b = Builder {
        ops,
        span: OrthoSpan::new(cfg.rank_tol),
        raw: Vec::new(),
        raw_coeffs: Vec::new(),
        seen: HashSet::new(),
        max_dim: cfg.max_dim,
    };
    for it in items {
        b.insert(it.clone())?;
    }
    Ok(Closure {
        algebra: StarAlgebra {
            basis: b.span.basis,
            unit,
        },
        raw: b.raw,
        raw_coeffs: b.raw_coeffs,
    })
}

/// Minimal central projections and matrix sizes of the simple summands.
#[derive(Clone, Debug)]
pub struct CentralDecomposition {
    pub projections: Vec<BlockMat>,
    pub dims: Vec<usize>,
}

impl CentralDecomposition {
    pub fn summands(&self) -> usize {
        self.dims.len()
    }

    /// Sorted multiset of summand sizes.
    pub fn dim_multiset(&self) -> Vec<usize> {
        let mut d = self.dims.clone();
        d.sort_unstable();
        d
    }
}

#[derive(Clone, Debug)]
pub struct Ideal {
    pub summands: Vec<usize>,
    pub projection: BlockMat,
    pub basis: Vec<BlockMat>,
}

impl Ideal {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

impl StarAlgebra {
    /// Algebra spanned by `elements` (not closed here) with the given unit.
    pub fn from_spanning(elements: &[BlockMat], unit: BlockMat, rank_tol: f64) -> Self {
        let mut span = OrthoSpan::new(rank_tol);
        span.insert_all(elements.iter());
        StarAlgebra {
            basis: span.basis,
            unit,
        }
    }

    pub fn closure_of(gens: &[BlockMat], unit: &BlockMat, cfg: &FindimConfig) -> Result<Self> {
        Ok(star_closure(&MatrixOps, gens, unit, cfg)?.algebra)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coords(&self, x: &BlockMat) -> DVector<C64> {
        DVector::from_iterator(self.dim(), self.basis.iter().map(|b| b.inner(x)))
    }

    pub fn element(&self, coords: &[C64]) -> BlockMat {
        let mut x = self.unit.zeros_like();
        for (c, b) in coords.iter().zip(&self.basis) {
            x.axpy(*c, b);
        }
        x
    }

    /// Distance of `x` from the algebra, relative to `‖x‖`.
    pub fn relative_residual(&self, x: &BlockMat) -> f64 {
        let n = x.norm();
        if n == 0.0 {
            return 0.0;
        }
        self.residual_norm(x) / n
    }

    /// Distance of `x` from the algebra.
    pub fn residual_norm(&self, x: &BlockMat) -> f64 {
        let mut r = x.clone();
        for _ in 0..2 {
            for b in &self.basis {
                let c = b.inner(&r);
                r.axpy(-c, b);
            }
        }
        r.norm()
    }

    pub fn contains(&self, x: &BlockMat, tol: f64) -> bool {
        self.relative_residual(x) <= tol
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> BlockMat {
        self.element(&random_coeffs(rng, self.dim()))
    }

    pub fn random_self_adjoint<R: Rng + ?Sized>(&self, rng: &mut R) -> BlockMat {
        self.random_element(rng).self_adjoint_part()
    }

    /// Largest relative closure defect over the basis (products and adjoints).
    pub fn closure_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.basis {
            // Basis vectors have unit norm, so absolute residuals are relative.
            worst = worst.max(self.residual_norm(&a.adjoint()));
            for b in &self.basis {
                worst = worst.max(self.residual_norm(&a.mul(b)));
            }
        }
        worst
    }

    /// Largest deviation of the unit from acting as identity on the basis.
    pub fn unit_defect(&self) -> f64 {
        self.basis
            .iter()
            .map(|b| {
                self.unit
                    .mul(b)
                    .sub(b)
                    .norm()
                    .max(b.mul(&self.unit).sub(b).norm())
            })
            .fold(0.0, f64::max)
    }

    pub fn is_commutative(&self, tol: f64) -> bool {
        self.basis.iter().enumerate().all(|(i, a)| {
            self.basis[..i]
                .iter()
                .all(|b| a.commutator(b).norm() <= tol)
        })
    }

    /// Coordinates (in the algebra basis) of a basis of the center.
    fn center_coords<R: Rng + ?Sized>(&self, rng: &mut R, cfg: &FindimConfig) -> Result<Vec<DVector<C64>>> {
        let n = self.dim();
        for _ in 0..cfg.max_resamples {
            let probes = [self.random_element(rng), self.random_element(rng)];
            let len = self.unit.len();
            let mut m = DMatrix::zeros(2 * len, n);
            for (j, b) in self.basis.iter().enumerate() {
                let mut row = 0;
                for g in &probes {
                    let c = b.commutator(g);
                    for blk in &c.blocks {
                        for x in blk.iter() {
                            m[(row, j)] = *x;
                            row += 1;
                        }
                    }
                }
            }
            let scale = probes.iter().map(|g| g.norm()).fold(0.0, f64::max)
                * self.basis.iter().map(|b| b.norm()).fold(0.0, f64::max);
            let ns = null_space_scaled(&m, cfg.rank_tol, scale);
            let ok = ns.iter().all(|v| {
                let c = self.element(v.as_slice());
                let cn = c.norm().max(1e-300);
                self.basis
                    .iter()
                    .all(|b| c.commutator(b).norm() <= cfg.check_tol * cn * b.norm().max(1.0))
            });
            if ok {
                return Ok(ns);
            }
        }
        Err(Error::Numerical(
            "center computation failed verification for every sample".into(),
        ))
    }

    /// Artin-Wedderburn data: minimal central projections (canonically
    /// ordered) and summand sizes.
    pub fn central_decomposition<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        cfg: &FindimConfig,
    ) -> Result<CentralDecomposition> {
        let center: Vec<BlockMat> = self
            .center_coords(rng, cfg)?
            .iter()
            .map(|v| self.element(v.as_slice()).self_adjoint_part())
            .collect();
        let zdim = center.len();
        if zdim == 0 {
            return Err(Error::Numerical("empty center".into()));
        }
        let complement = BlockMat::identity(
            &self.unit.shapes().iter().map(|s| s.0).collect::<Vec<_>>(),
        )
        .sub(&self.unit);
        for _ in 0..cfg.max_resamples {
            let r = random_real(rng, zdim);
            let mut h = self.unit.zeros_like();
            for (c, z) in r.iter().zip(&center) {
                h.axpy(re(*c), z);
            }
            let mu = 2.0 * h.op_norm() + 1.0;
            h.axpy(re(mu), &complement);
            let clusters = eigen_clusters(&h, cfg.gap_tol * mu);
            let projs: Vec<BlockMat> = clusters
                .into_iter()
                .filter(|(lam, _)| (lam - mu).abs() > cfg.gap_tol * mu)
                .map(|(_, p)| p)
                .collect();
            if projs.len() != zdim {
                continue;
            }
            let mut dims = Vec::with_capacity(zdim);
            for p in &projs {
                let images: Vec<BlockMat> = self.basis.iter().map(|b| p.mul(b)).collect();
                let d2 = crate::linalg::rank_of(&images, cfg.rank_tol);
                let d = (d2 as f64).sqrt().round() as usize;
                if d * d != d2 {
                    return Err(Error::Numerical(format!(
                        "summand of dimension {d2} is not a full matrix algebra"
                    )));
                }
                dims.push(d);
            }
            let mut order: Vec<usize> = (0..zdim).collect();
            let keys: Vec<Vec<i64>> = projs
                .iter()
                .map(|p| p.block_traces().iter().map(|t| t.round() as i64).collect())
                .collect();
            order.sort_by(|&a, &b| dims[a].cmp(&dims[b]).then(keys[a].cmp(&keys[b])));
            return Ok(CentralDecomposition {
                projections: order.iter().map(|&i| projs[i].clone()).collect(),
                dims: order.iter().map(|&i| dims[i]).collect(),
            });
        }
        Err(Error::Numerical(format!(
            "no central element with {zdim} separated eigenvalues after {} samples",
            cfg.max_resamples
        )))
    }

    /// The ideal `z_S A` for a set `S` of summands.
    pub fn ideal(&self, dec: &CentralDecomposition, summands: &[usize], cfg: &FindimConfig) -> Ideal {
        let mut proj = self.unit.zeros_like();
        for &i in summands {
            proj = proj.add(&dec.projections[i]);
        }
        let images: Vec<BlockMat> = self.basis.iter().map(|b| proj.mul(b)).collect();
        let mut span = OrthoSpan::with_scale(cfg.rank_tol, images.iter().map(|x| x.norm()).fold(0.0, f64::max));
        span.insert_all(images.iter());
        Ideal {
            summands: summands.to_vec(),
            projection: proj,
            basis: span.basis,
        }
    }

    /// Whether the span of `basis` is a two-sided ideal.
    pub fn is_ideal(&self, basis: &[BlockMat], tol: f64) -> bool {
        let sub = StarAlgebra {
            basis: basis.to_vec(),
            unit: self.unit.clone(),
        };
        // Frobenius norms are submultiplicative, so `‖a‖‖x‖` bounds both products.
        basis.iter().all(|x| {
            self.basis.iter().all(|a| {
                let scale = tol * a.norm() * x.norm();
                sub.residual_norm(&a.mul(x)) <= scale && sub.residual_norm(&x.mul(a)) <= scale
            })
        })
    }

    /// Whether `proj` is a central self-adjoint idempotent, so that
    /// `proj · A` is a two-sided ideal.
    pub fn is_central_projection(&self, proj: &BlockMat, tol: f64) -> bool {
        let scale = proj.norm().max(1.0);
        proj.mul(proj).sub(proj).norm() <= tol * scale
            && proj.adjoint().sub(proj).norm() <= tol * scale
            && self
                .basis
                .iter()
                .all(|b| proj.commutator(b).norm() <= tol * scale * b.norm().max(1.0))
    }

    /// All `2^s` ideals, ordered by summand subset (bitmask order), each
    /// checked for dimension and a central generating projection.
    pub fn ideal_lattice(&self, dec: &CentralDecomposition, cfg: &FindimConfig) -> Result<Vec<Ideal>> {
        let s = dec.summands();
        if s > 16 {
            return Err(Error::CandidateExplosion(format!(
                "2^{s} ideals requested"
            )));
        }
        let mut out = Vec::with_capacity(1 << s);
        for mask in 0u32..(1 << s) {
            let set: Vec<usize> = (0..s).filter(|i| mask >> i & 1 == 1).collect();
            let ideal = self.ideal(dec, &set, cfg);
            let want: usize = set.iter().map(|&i| dec.dims[i] * dec.dims[i]).sum();
            if ideal.dim() != want || !self.is_central_projection(&ideal.projection, cfg.check_tol) {
                return Err(Error::Verification(format!(
                    "summand set {set:?} does not give an ideal of dimension {want}"
                )));
            }
            out.push(ideal);
        }
        Ok(out)
    }

    /// A minimal projection in summand `i`, certified by `dim(eAe) = 1`.
    pub fn minimal_projection<R: Rng + ?Sized>(
        &self,
        dec: &CentralDecomposition,
        i: usize,
        rng: &mut R,
        cfg: &FindimConfig,
    ) -> Result<BlockMat> {
        let zi = &dec.projections[i];
        if dec.dims[i] == 1 {
            return Ok(zi.clone());
        }
        let full = BlockMat::identity(&self.unit.shapes().iter().map(|s| s.0).collect::<Vec<_>>());
        let off = full.sub(zi);
        for _ in 0..cfg.max_resamples {
            let x = self.random_self_adjoint(rng);
            let mut c = zi.mul(&x).mul(zi);
            let mu = 2.0 * c.op_norm() + 1.0;
            c.axpy(re(mu), &off);
            let clusters = eigen_clusters(&c, cfg.gap_tol * mu);
            let inside: Vec<BlockMat> = clusters
                .into_iter()
                .filter(|(lam, _)| (lam - mu).abs() > cfg.gap_tol * mu)
                .map(|(_, p)| p)
                .collect();
            if inside.len() != dec.dims[i] {
                continue;
            }
            let e = inside.into_iter().next().unwrap();
            if !self.contains(&e, cfg.check_tol * 10.0) {
                continue;
            }
            let corner: Vec<BlockMat> = self.basis.iter().map(|b| e.mul(b).mul(&e)).collect();
            if crate::linalg::rank_of(&corner, cfg.rank_tol) == 1 {
                return Ok(e);
            }
        }
        Err(Error::Numerical(format!(
            "no certified minimal projection in summand {i}"
        )))
    }
}

/// Eigenvalue clusters of a Hermitian block matrix with their spectral
/// projections; values closer than `gap` are merged.
pub fn eigen_clusters(h: &BlockMat, gap: f64) -> Vec<(f64, BlockMat)> {
    let mut items: Vec<(f64, usize, DVector<C64>)> = Vec::new();
    for (bi, blk) in h.blocks.iter().enumerate() {
        if blk.nrows() == 0 {
            continue;
        }
        let (vals, vecs) = hermitian_eigen(blk);
        for (k, v) in vals.iter().enumerate() {
            items.push((*v, bi, vecs.column(k).into_owned()));
        }
    }
    items.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out: Vec<(f64, BlockMat)> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for (val, bi, v) in items {
        if out.is_empty() || val - last > gap {
            out.push((val, h.zeros_like()));
        }
        last = val;
        let entry = out.last_mut().unwrap();
        entry.1.blocks[bi] += &v * v.adjoint();
    }
    out
}

/// A linear map between algebras given by the images of the source basis.
#[derive(Clone, Debug)]
pub struct LinearMap {
    pub images: Vec<BlockMat>,
}

impl LinearMap {
    pub fn apply(&self, src: &StarAlgebra, x: &BlockMat) -> BlockMat {
        let c = src.coords(x);
        let mut out = self.images[0].zeros_like();
        for (ci, img) in c.iter().zip(&self.images) {
            out.axpy(*ci, img);
        }
        out
    }

    /// Largest relative defect of unitality, multiplicativity and
    /// *-preservation, the latter two on `samples` random pairs.
    pub fn homomorphism_defect<R: Rng + ?Sized>(
        &self,
        src: &StarAlgebra,
        dst: &StarAlgebra,
        samples: usize,
        rng: &mut R,
    ) -> f64 {
        let rel = |a: &BlockMat, b: &BlockMat| a.sub(b).norm() / b.norm().max(1.0);
        let mut worst = rel(&self.apply(src, &src.unit), &dst.unit);
        for _ in 0..samples {
            let x = src.random_element(rng);
            let y = src.random_element(rng);
            let fx = self.apply(src, &x);
            let fy = self.apply(src, &y);
            worst = worst.max(rel(&self.apply(src, &x.mul(&y)), &fx.mul(&fy)));
            worst = worst.max(rel(&self.apply(src, &x.adjoint()), &fx.adjoint()));
        }
        worst
    }

    /// Whether the map is injective (images of the basis independent).
    pub fn is_injective(&self, rank_tol: f64) -> bool {
        crate::linalg::rank_of(&self.images, rank_tol) == self.images.len()
    }
}

/// Multiplicity matrix `m[i][j]` of summand `i` of `a` inside summand `j`
/// of `b` along a unital *-homomorphism.
#[allow(clippy::too_many_arguments)]
pub fn embedding_multiplicities<R: Rng + ?Sized>(
    a: &StarAlgebra,
    da: &CentralDecomposition,
    b: &StarAlgebra,
    db: &CentralDecomposition,
    phi: &LinearMap,
    rng: &mut R,
    cfg: &FindimConfig,
) -> Result<Vec<Vec<usize>>> {
    let defect = phi.homomorphism_defect(a, b, 4, rng);
    if defect > cfg.check_tol {
        return Err(Error::Verification(format!(
            "map is not a unital *-homomorphism (defect {defect:.3e})"
        )));
    }
    let mut m = vec![vec![0usize; db.summands()]; da.summands()];
    for (i, row) in m.iter_mut().enumerate() {
        let e = a.minimal_projection(da, i, rng, cfg)?;
        let fe = phi.apply(a, &e);
        for (j, slot) in row.iter_mut().enumerate() {
            let f = db.projections[j].mul(&fe);
            if f.norm() <= cfg.check_tol * fe.norm() {
                continue;
            }
            let corner: Vec<BlockMat> = b.basis.iter().map(|x| f.mul(x).mul(&f)).collect();
            let r = crate::linalg::rank_of(&corner, cfg.rank_tol);
            let mult = (r as f64).sqrt();
            if (mult - mult.round()).abs() > cfg.integer_tol {
                return Err(Error::Numerical(format!(
                    "non-integer multiplicity sqrt({r}) for summands ({i},{j})"
                )));
            }
            *slot = mult.round() as usize;
        }
    }
    for j in 0..db.summands() {
        let total: usize = (0..da.summands()).map(|i| m[i][j] * da.dims[i]).sum();
        if total != db.dims[j] {
            return Err(Error::Verification(format!(
                "multiplicities into summand {j} give {total}, expected {}",
                db.dims[j]
            )));
        }
    }
    Ok(m)
}

/// Random unitary conjugate of `⊕ M_{d_i}` embedded in `M_n`, `n = Σ d_i`:
/// returns a spanning set of matrix units (as one-block matrices).
pub fn random_block_algebra<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Vec<BlockMat> {
    let n: usize = dims.iter().sum();
    let g = DMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let u = g.qr().q();
    let mut out = Vec::new();
    let mut off = 0;
    for &d in dims {
        for i in 0..d {
            for j in 0..d {
                let mut e = DMatrix::zeros(n, n);
                e[(off + i, off + j)] = re(1.0);
                out.push(BlockMat::new(vec![&u * e * u.adjoint()]));
            }
        }
        off += d;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit(n: usize) -> BlockMat {
        BlockMat::identity(&[n])
    }

    fn e(n: usize, i: usize, j: usize) -> BlockMat {
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = re(1.0);
        BlockMat::new(vec![m])
    }

    fn diag(v: &[f64]) -> BlockMat {
        BlockMat::new(vec![DMatrix::from_diagonal(&DVector::from_iterator(
            v.len(),
            v.iter().map(|x| re(*x)),
        ))])
    }

    #[test]
    fn closures() {
        let cfg = FindimConfig::default();
        let a = StarAlgebra::closure_of(&[e(2, 0, 0), e(2, 0, 1)], &unit(2), &cfg).unwrap();
        assert_eq!(a.dim(), 4);
        let c = StarAlgebra::closure_of(&[diag(&[1.0, 1.0, 1.0]), diag(&[2.0, 1.0, 3.0])], &unit(3), &cfg).unwrap();
        assert_eq!(c.dim(), 3);
        let one = StarAlgebra::closure_of(&[], &unit(3), &cfg).unwrap();
        assert_eq!(one.dim(), 1);
        let again = StarAlgebra::closure_of(&a.basis, &a.unit, &cfg).unwrap();
        assert_eq!(again.dim(), a.dim());
        assert!(a.closure_defect() < 1e-10 && a.unit_defect() < 1e-10);
    }

    #[test]
    fn decompositions_and_ideals() {
        let cfg = FindimConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m2 = StarAlgebra::closure_of(&[e(2, 0, 1)], &unit(2), &cfg).unwrap();
        let d = m2.central_decomposition(&mut rng, &cfg).unwrap();
        assert_eq!(d.dims, vec![2]);
        assert_eq!(m2.ideal_lattice(&d, &cfg).unwrap().len(), 2);
        let dg = StarAlgebra::closure_of(&[diag(&[1.0, 0.0, 0.0]), diag(&[0.0, 1.0, 0.0])], &unit(3), &cfg).unwrap();
        let d = dg.central_decomposition(&mut rng, &cfg).unwrap();
        assert_eq!(d.dims, vec![1, 1, 1]);
        let fixture = random_block_algebra(&[2, 1], &mut rng);
        let a = StarAlgebra::closure_of(&fixture, &unit(3), &cfg).unwrap();
        let d = a.central_decomposition(&mut rng, &cfg).unwrap();
        assert_eq!(d.dim_multiset(), vec![1, 2]);
        assert_eq!(a.ideal_lattice(&d, &cfg).unwrap().len(), 4);
    }

    #[test]
    fn multiplicities() {
        let cfg = FindimConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m2 = StarAlgebra::closure_of(&[e(2, 0, 1)], &unit(2), &cfg).unwrap();
        let d2 = m2.central_decomposition(&mut rng, &cfg).unwrap();
        let id = LinearMap {
            images: m2.basis.clone(),
        };
        let m = embedding_multiplicities(&m2, &d2, &m2, &d2, &id, &mut rng, &cfg).unwrap();
        assert_eq!(m, vec![vec![1]]);
        let m1 = StarAlgebra::closure_of(&[], &unit(1), &cfg).unwrap();
        let d1 = m1.central_decomposition(&mut rng, &cfg).unwrap();
        let diag_embed = LinearMap {
            images: vec![unit(2).scale(m1.basis[0].blocks[0][(0, 0)])],
        };
        let m = embedding_multiplicities(&m1, &d1, &m2, &d2, &diag_embed, &mut rng, &cfg).unwrap();
        assert_eq!(m, vec![vec![2]]);
        let bad = LinearMap {
            images: vec![e(2, 0, 0).scale(m1.basis[0].blocks[0][(0, 0)])],
        };
        assert!(embedding_multiplicities(&m1, &d1, &m2, &d2, &bad, &mut rng, &cfg).is_err());
    }
}
