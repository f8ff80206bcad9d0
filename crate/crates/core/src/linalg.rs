//! Dense complex linear algebra helpers shared by the algebra modules.
//!
//! Elements of the finite-dimensional algebras handled here are stored as
//! lists of square blocks ([`BlockMat`]): one block per window level for
//! window representations, one block per vertex for the stage models.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Block-diagonal matrix; the unit of storage for algebra elements.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMat {
    pub blocks: Vec<DMatrix<C64>>,
}

impl BlockMat {
    pub fn new(blocks: Vec<DMatrix<C64>>) -> Self {
        BlockMat { blocks }
    }

    pub fn zeros(shapes: &[(usize, usize)]) -> Self {
        BlockMat {
            blocks: shapes.iter().map(|&(r, c)| DMatrix::zeros(r, c)).collect(),
        }
    }

    pub fn identity(sizes: &[usize]) -> Self {
        BlockMat {
            blocks: sizes.iter().map(|&n| DMatrix::identity(n, n)).collect(),
        }
    }

    pub fn zeros_like(&self) -> Self {
        BlockMat::zeros(&self.shapes())
    }

    pub fn shapes(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().map(|b| (b.nrows(), b.ncols())).collect()
    }

    /// Total number of stored entries.
    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mul(&self, other: &BlockMat) -> BlockMat {
        debug_assert_eq!(self.blocks.len(), other.blocks.len());
        BlockMat {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn adjoint(&self) -> BlockMat {
        BlockMat {
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn add(&self, other: &BlockMat) -> BlockMat {
        let mut out = self.clone();
        out.axpy(ONE, other);
        out
    }

    pub fn sub(&self, other: &BlockMat) -> BlockMat {
        let mut out = self.clone();
        out.axpy(-ONE, other);
        out
    }

    pub fn scale(&self, s: C64) -> BlockMat {
        BlockMat {
            blocks: self.blocks.iter().map(|b| b * s).collect(),
        }
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: C64, other: &BlockMat) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            a.zip_apply(b, |x, y| *x += s * y);
        }
    }

    pub fn commutator(&self, other: &BlockMat) -> BlockMat {
        self.mul(other).sub(&other.mul(self))
    }

    /// Hilbert-Schmidt inner product `<self, other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &BlockMat) -> C64 {
        let mut acc = ZERO;
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            for (x, y) in a.iter().zip(b.iter()) {
                acc += x.conj() * y;
            }
        }
        acc
    }

    /// Frobenius norm over all blocks.
    pub fn norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|x| x.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    /// Spectral norm of each block.
    pub fn block_op_norms(&self) -> Vec<f64> {
        self.blocks.iter().map(op_norm).collect()
    }

    /// Operator norm of the block-diagonal matrix.
    pub fn op_norm(&self) -> f64 {
        self.block_op_norms().into_iter().fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .map(|x| x.norm())
            .fold(0.0, f64::max)
    }

    /// Trace of each block (real part; used as a canonical ordering key).
    pub fn block_traces(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.trace().re).collect()
    }

    pub fn self_adjoint_part(&self) -> BlockMat {
        self.add(&self.adjoint()).scale(re(0.5))
    }
}

/// Spectral norm of a dense matrix (0 for empty matrices).
pub fn op_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.iter().all(|x| *x == ZERO) {
        return 0.0;
    }
    let (rows, cols) = m.shape();
    if rows * cols <= 64 * 64 {
        return m.singular_values().iter().cloned().fold(0.0, f64::max);
    }
    // The norm is the largest over the connected components of the
    // row/column incidence graph of the nonzero entries.
    let mut parent: Vec<usize> = (0..rows + cols).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for j in 0..cols {
        for i in 0..rows {
            if m[(i, j)] != ZERO {
                let (a, b) = (find(&mut parent, i), find(&mut parent, rows + j));
                parent[a] = b;
            }
        }
    }
    let mut groups: std::collections::HashMap<usize, (Vec<usize>, Vec<usize>)> = Default::default();
    for i in 0..rows {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().0.push(i);
    }
    for j in 0..cols {
        let root = find(&mut parent, rows + j);
        groups.entry(root).or_default().1.push(j);
    }
    if groups.values().any(|(r, c)| r.len() == rows && c.len() == cols) {
        return m.singular_values().iter().cloned().fold(0.0, f64::max);
    }
    groups
        .values()
        .filter(|(r, c)| !r.is_empty() && !c.is_empty())
        .map(|(r, c)| {
            let sub = DMatrix::from_fn(r.len(), c.len(), |a, b| m[(r[a], c[b])]);
            sub.singular_values().iter().cloned().fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Incrementally grown orthonormal basis of a subspace of block matrices.
#[derive(Clone, Debug)]
pub struct OrthoSpan {
    pub basis: Vec<BlockMat>,
    /// Relative rank tolerance: a vector is dependent when the norm of its
    /// residual is at most `tol` times its own norm.
    pub tol: f64,
    scale: f64,
    /// Judge residuals against the family scale rather than the member.
    scaled_rank: bool,
}

impl OrthoSpan {
    pub fn new(tol: f64) -> Self {
        OrthoSpan {
            basis: Vec::new(),
            tol,
            scale: 0.0,
            scaled_rank: false,
        }
    }

    /// Span with numerical-rank semantics: a member is dependent when its
    /// residual is at most `tol * scale`.
    pub fn with_scale(tol: f64, scale: f64) -> Self {
        OrthoSpan {
            scale,
            scaled_rank: true,
            ..OrthoSpan::new(tol)
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coords(&self, x: &BlockMat) -> Vec<C64> {
        self.basis.iter().map(|b| b.inner(x)).collect()
    }

    /// Orthogonal residual of `x` (two Gram-Schmidt passes) and the
    /// accumulated coefficients.
    pub fn residual(&self, x: &BlockMat) -> (Vec<C64>, BlockMat) {
        let mut r = x.clone();
        let mut coeffs = vec![ZERO; self.basis.len()];
        for _ in 0..2 {
            for (i, b) in self.basis.iter().enumerate() {
                let c = b.inner(&r);
                if c != ZERO {
                    r.axpy(-c, b);
                    coeffs[i] += c;
                }
            }
        }
        (coeffs, r)
    }

    pub fn residual_norm(&self, x: &BlockMat) -> f64 {
        self.residual(x).1.norm()
    }

    /// Whether `x` lies in the span up to the relative tolerance `tol`.
    pub fn contains(&self, x: &BlockMat, tol: f64) -> bool {
        let n = x.norm();
        if n <= 1e-14 * self.scale.max(1.0) {
            return true;
        }
        self.residual_norm(x) <= tol * n.max(self.scale * 1e-3)
    }

    fn is_negligible(&self, xn: f64, rn: f64) -> bool {
        let reference = if self.scaled_rank { xn.max(self.scale) } else { xn };
        xn <= 1e-13 * self.scale.max(1e-300) || rn <= self.tol * reference
    }

    /// Adds `x` if it is independent; returns `(coeffs, norm)` such that the
    /// new basis vector equals `(x - sum coeffs_i b_i) / norm`.
    pub fn try_insert(&mut self, x: &BlockMat) -> Option<(Vec<C64>, f64)> {
        let xn = x.norm();
        if xn == 0.0 {
            return None;
        }
        let (coeffs, r) = self.residual(x);
        let rn = r.norm();
        if self.is_negligible(xn, rn) {
            return None;
        }
        self.scale = self.scale.max(xn);
        self.basis.push(r.scale(re(1.0 / rn)));
        Some((coeffs, rn))
    }

    pub fn insert_all<'a>(&mut self, xs: impl IntoIterator<Item = &'a BlockMat>) -> usize {
        let before = self.dim();
        for x in xs {
            self.try_insert(x);
        }
        self.dim() - before
    }
}

/// Rank of a family of block matrices under relative tolerance `tol`.
/// Members below `1e-13` times the largest norm count as zero.
pub fn rank_of(xs: &[BlockMat], tol: f64) -> usize {
    let mut span = OrthoSpan::with_scale(tol, xs.iter().map(|x| x.norm()).fold(0.0, f64::max));
    span.insert_all(xs.iter());
    span.dim()
}

/// Orthonormal basis of the kernel of `m`, singular values below
/// `rel_tol * sigma_max` counted as zero.
pub fn null_space(m: &DMatrix<C64>, rel_tol: f64) -> Vec<DVector<C64>> {
    null_space_scaled(m, rel_tol, 0.0)
}

/// As [`null_space`], with the threshold taken relative to
/// `max(sigma_max, scale)` so that a matrix of pure rounding noise has a
/// full kernel.
pub fn null_space_scaled(m: &DMatrix<C64>, rel_tol: f64, scale: f64) -> Vec<DVector<C64>> {
    let cols = m.ncols();
    if cols == 0 {
        return Vec::new();
    }
    let padded;
    let a = if m.nrows() < cols {
        padded = {
            let mut p = DMatrix::zeros(cols, cols);
            p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
            p
        };
        &padded
    } else {
        m
    };
    let smax = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if smax <= rel_tol * scale || smax == 0.0 {
        return (0..cols)
            .map(|i| {
                let mut v = DVector::zeros(cols);
                v[i] = ONE;
                v
            })
            .collect();
    }
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let sigma_max = svd.singular_values.iter().cloned().fold(scale, f64::max);
    let mut out = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= rel_tol * sigma_max {
            out.push(vt.row(i).transpose().map(|x| x.conj()));
        }
    }
    out
}

/// Numerical rank of a dense matrix.
pub fn matrix_rank(m: &DMatrix<C64>, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel_tol * smax).count()
}

/// Eigen-decomposition of a Hermitian matrix (input is symmetrised first).
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let h = (m + m.adjoint()) * re(0.5);
    let eig = SymmetricEigen::new(h);
    (eig.eigenvalues.iter().cloned().collect(), eig.eigenvectors)
}

/// Orthonormal basis (columns) of a list of coordinate vectors' span.
pub fn orthonormal_columns(vectors: &[DVector<C64>], rel_tol: f64) -> DMatrix<C64> {
    let n = vectors.first().map(|v| v.len()).unwrap_or(0);
    let mut basis: Vec<DVector<C64>> = Vec::new();
    let scale = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for v in vectors {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&r);
                r -= b * c;
            }
        }
        let rn = r.norm();
        if rn > rel_tol * v.norm().max(scale * 1e-3) && rn > 1e-14 {
            basis.push(r / re(rn));
        }
    }
    let mut out = DMatrix::zeros(n, basis.len());
    for (j, b) in basis.iter().enumerate() {
        out.set_column(j, b);
    }
    out
}

/// Random complex vector with independent standard-normal-ish entries.
pub fn random_coeffs<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Random real coefficients in `[-1, 1)`.
pub fn random_real<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Kronecker product `a ⊗ b` of dense matrices.
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_norm_splits_components() {
        let n = 80;
        let mut m = DMatrix::from_fn(n, n, |i, j| if i == j { re(1.0 + i as f64 / n as f64) } else { ZERO });
        m[(0, 1)] = C64::new(0.5, 0.5);
        m[(n - 1, n - 2)] = re(3.0);
        let dense = m.singular_values().iter().cloned().fold(0.0, f64::max);
        assert!((op_norm(&m) - dense).abs() < 1e-12);
    }
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mat(rows: usize, cols: usize, data: &[f64]) -> DMatrix<C64> {
        DMatrix::from_row_slice(rows, cols, &data.iter().map(|x| re(*x)).collect::<Vec<_>>())
    }

    #[test]
    fn span_detects_dependence() {
        let a = BlockMat::new(vec![mat(2, 2, &[1.0, 0.0, 0.0, 0.0])]);
        let b = BlockMat::new(vec![mat(2, 2, &[0.0, 1.0, 0.0, 0.0])]);
        let c = a.scale(re(2.0)).add(&b.scale(re(-3.0)));
        let mut s = OrthoSpan::new(1e-10);
        assert!(s.try_insert(&a).is_some());
        assert!(s.try_insert(&b).is_some());
        assert!(s.try_insert(&c).is_none());
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&c, 1e-10));
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = mat(1, 3, &[1.0, 1.0, 0.0]);
        let ns = null_space(&m, 1e-10);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!((&m * v).norm() < 1e-12);
        }
    }

    #[test]
    fn op_norm_matches_largest_singular_value() {
        let m = mat(2, 2, &[3.0, 0.0, 0.0, -5.0]);
        assert!((op_norm(&m) - 5.0).abs() < 1e-12);
        assert_eq!(op_norm(&DMatrix::zeros(0, 0)), 0.0);
    }

    #[test]
    fn hermitian_eigen_recovers_diagonal() {
        let m = mat(2, 2, &[2.0, 0.0, 0.0, 7.0]);
        let (mut vals, _) = hermitian_eigen(&m);
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((vals[0] - 2.0).abs() < 1e-12 && (vals[1] - 7.0).abs() < 1e-12);
    }

    #[test]
    fn rank_of_random_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let base: Vec<BlockMat> = (0..3)
            .map(|_| {
                let c = random_coeffs(&mut rng, 4);
                BlockMat::new(vec![DMatrix::from_row_slice(2, 2, &c)])
            })
            .collect();
        let mut fam = base.clone();
        fam.push(base[0].add(&base[1]));
        assert_eq!(rank_of(&fam, 1e-9), 3);
    }
}
