//! Finite-dimensional C*-algebras `A = ⊕_k M_{n_k}` in their canonical
//! block-diagonal representation on `C^d`, linear maps between them, and the
//! Choi / Kraus / Stinespring machinery that certifies complete positivity.
//!
//! Coordinates of an element are its matrix-unit coefficients: blocks in
//! declaration order, row-major inside each block.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ONE};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Algebra {
    blocks: Vec<usize>,
}

impl Algebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Invalid("algebra needs at least one block".into()));
        }
        if blocks.contains(&0) {
            return Err(Error::Invalid("block sizes must be positive".into()));
        }
        Ok(Self { blocks })
    }

    /// `M_n`.
    pub fn full(n: usize) -> Self {
        assert!(n > 0, "M_0 is not an algebra");
        Self { blocks: vec![n] }
    }

    /// `C^k`.
    pub fn diagonal(k: usize) -> Self {
        assert!(k > 0, "C^0 is not an algebra");
        Self { blocks: vec![1; k] }
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_size(&self, k: usize) -> usize {
        self.blocks[k]
    }

    /// Dimension `d` of the canonical representation space.
    pub fn rep_dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Vector-space dimension `Σ n_k²`.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    pub fn rep_offset(&self, k: usize) -> usize {
        self.blocks[..k].iter().sum()
    }

    pub fn coord_offset(&self, k: usize) -> usize {
        self.blocks[..k].iter().map(|n| n * n).sum()
    }

    /// `(block, row, col)` of the `idx`-th matrix unit.
    pub fn basis_label(&self, idx: usize) -> (usize, usize, usize) {
        let mut rest = idx;
        for (k, &n) in self.blocks.iter().enumerate() {
            if rest < n * n {
                return (k, rest / n, rest % n);
            }
            rest -= n * n;
        }
        panic!("basis index {idx} out of range for {:?}", self.blocks);
    }

    pub fn zero(&self) -> AlgElement {
        AlgElement {
            blocks: self.blocks.iter().map(|&n| CMatrix::zeros(n, n)).collect(),
        }
    }

    pub fn unit(&self) -> AlgElement {
        AlgElement {
            blocks: self.blocks.iter().map(|&n| CMatrix::identity(n)).collect(),
        }
    }

    /// Identity of block `k` (a minimal central projection).
    pub fn block_unit(&self, k: usize) -> AlgElement {
        let mut e = self.zero();
        e.blocks[k] = CMatrix::identity(self.blocks[k]);
        e
    }

    pub fn matrix_unit(&self, k: usize, i: usize, j: usize) -> AlgElement {
        let mut e = self.zero();
        e.blocks[k] = CMatrix::unit(self.blocks[k], i, j);
        e
    }

    pub fn basis(&self) -> Vec<AlgElement> {
        (0..self.dim())
            .map(|idx| {
                let (k, i, j) = self.basis_label(idx);
                self.matrix_unit(k, i, j)
            })
            .collect()
    }

    /// Element whose `k`-th block is `scalars[k]·1`.
    pub fn central(&self, scalars: &[C64]) -> Result<AlgElement> {
        if scalars.len() != self.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "{} central scalars for {} blocks",
                scalars.len(),
                self.num_blocks()
            )));
        }
        Ok(AlgElement {
            blocks: self
                .blocks
                .iter()
                .zip(scalars)
                .map(|(&n, &s)| CMatrix::identity(n).scale(s))
                .collect(),
        })
    }

    pub fn element(&self, blocks: Vec<CMatrix>) -> Result<AlgElement> {
        let a = AlgElement { blocks };
        self.check(&a)?;
        Ok(a)
    }

    pub fn element_from_coords(&self, coords: &[C64]) -> AlgElement {
        assert_eq!(coords.len(), self.dim(), "coordinate count");
        let mut off = 0;
        let blocks = self
            .blocks
            .iter()
            .map(|&n| {
                let b = CMatrix::new(n, n, coords[off..off + n * n].to_vec())
                    .expect("finite coordinates");
                off += n * n;
                b
            })
            .collect();
        AlgElement { blocks }
    }

    pub fn check(&self, a: &AlgElement) -> Result<()> {
        let ok = a.blocks.len() == self.blocks.len()
            && a.blocks
                .iter()
                .zip(&self.blocks)
                .all(|(b, &n)| b.shape() == (n, n));
        if ok {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch(format!(
                "element with blocks {:?} in algebra {:?}",
                a.block_sizes(),
                self.blocks
            )))
        }
    }

    /// Inverse of [`AlgElement::embed`]; fails when `m` has mass outside the
    /// diagonal blocks.
    pub fn extract(&self, m: &CMatrix, tol: f64) -> Result<AlgElement> {
        let d = self.rep_dim();
        if m.shape() != (d, d) {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} operator for rep_dim {d}",
                m.rows(),
                m.cols()
            )));
        }
        let residual = self.off_block_residual(m);
        if residual > tol * m.max_abs().max(1.0) {
            return Err(Error::NotInAlgebra(residual));
        }
        let blocks = (0..self.num_blocks())
            .map(|k| {
                let o = self.rep_offset(k);
                m.submatrix(o, o, self.blocks[k], self.blocks[k])
            })
            .collect();
        Ok(AlgElement { blocks })
    }

    /// Largest entry of `m` outside the block-diagonal support of the algebra.
    pub fn off_block_residual(&self, m: &CMatrix) -> f64 {
        let owner: Vec<usize> = self
            .blocks
            .iter()
            .enumerate()
            .flat_map(|(k, &n)| std::iter::repeat_n(k, n))
            .collect();
        let mut worst = 0.0f64;
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                if owner[r] != owner[c] {
                    worst = worst.max(m[(r, c)].norm());
                }
            }
        }
        worst
    }

    /// Linear map from coordinates to the row-major entries of `embed(a)`.
    pub fn embedding_matrix(&self) -> CMatrix {
        let d = self.rep_dim();
        let mut e = CMatrix::zeros(d * d, self.dim());
        for idx in 0..self.dim() {
            let (k, i, j) = self.basis_label(idx);
            let o = self.rep_offset(k);
            e[((o + i) * d + (o + j), idx)] = ONE;
        }
        e
    }
}

/// An element of `⊕_k M_{n_k}`, stored block by block.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgElement {
    blocks: Vec<CMatrix>,
}

impl AlgElement {
    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &CMatrix {
        &self.blocks[k]
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(CMatrix::rows).collect()
    }

    pub fn algebra(&self) -> Algebra {
        Algebra {
            blocks: self.block_sizes(),
        }
    }

    /// Canonical faithful representation: the block-diagonal `d×d` matrix.
    pub fn embed(&self) -> CMatrix {
        CMatrix::direct_sum(&self.blocks)
    }

    pub fn coords(&self) -> Vec<C64> {
        self.blocks
            .iter()
            .flat_map(|b| b.data().iter().copied())
            .collect()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Self {
        assert_eq!(self.block_sizes(), other.block_sizes(), "algebra mismatch");
        Self {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, CMatrix::matmul)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            blocks: self.blocks.iter().map(|b| b.scale(s)).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            blocks: self.blocks.iter().map(CMatrix::adjoint).collect(),
        }
    }

    /// C*-norm.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(linalg::op_norm).fold(0.0, f64::max)
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.sub(other).norm()
    }

    /// Frobenius-type distance on coordinates; cheaper than [`Self::dist`].
    pub fn coord_dist(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.dist(b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(CMatrix::max_abs).fold(0.0, f64::max)
    }

    pub fn is_positive_element(&self, tol: f64) -> bool {
        self.blocks
            .iter()
            .all(|b| linalg::is_psd(b, tol).unwrap_or(false))
    }

    /// Scalars `c_k` when every block is `c_k · 1`.
    pub fn central_scalars(&self, tol: f64) -> Option<Vec<C64>> {
        self.blocks
            .iter()
            .map(|b| {
                let n = b.rows();
                let c = b.trace() / n as f64;
                let dev = b.dist(&CMatrix::identity(n).scale(c));
                (dev <= tol * b.max_abs().max(1.0)).then_some(c)
            })
            .collect()
    }

    pub fn is_central(&self, tol: f64) -> bool {
        self.central_scalars(tol).is_some()
    }
}

/// A linear map `source → target` given by its matrix on matrix-unit
/// coordinates. Maps into `B(H) = M_t` use `target = Algebra::full(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CBMap {
    source: Algebra,
    target: Algebra,
    action: CMatrix,
}

impl CBMap {
    pub fn new(source: Algebra, target: Algebra, action: CMatrix) -> Result<Self> {
        if action.shape() != (target.dim(), source.dim()) {
            return Err(Error::ShapeMismatch(format!(
                "action is {}x{}, expected {}x{}",
                action.rows(),
                action.cols(),
                target.dim(),
                source.dim()
            )));
        }
        Ok(Self {
            source,
            target,
            action,
        })
    }

    pub fn from_fn(
        source: &Algebra,
        target: &Algebra,
        f: impl Fn(&AlgElement) -> AlgElement,
    ) -> Self {
        let mut action = CMatrix::zeros(target.dim(), source.dim());
        for (idx, e) in source.basis().iter().enumerate() {
            let img = f(e);
            target
                .check(&img)
                .expect("image lies in the target algebra");
            for (r, z) in img.coords().into_iter().enumerate() {
                action[(r, idx)] = z;
            }
        }
        Self {
            source: source.clone(),
            target: target.clone(),
            action,
        }
    }

    pub fn identity(alg: &Algebra) -> Self {
        Self {
            source: alg.clone(),
            target: alg.clone(),
            action: CMatrix::identity(alg.dim()),
        }
    }

    pub fn zero(source: &Algebra, target: &Algebra) -> Self {
        Self {
            source: source.clone(),
            target: target.clone(),
            action: CMatrix::zeros(target.dim(), source.dim()),
        }
    }

    /// Transposition on `M_n`: positive but, for `n ≥ 2`, not completely positive.
    pub fn transpose(n: usize) -> Self {
        let alg = Algebra::full(n);
        Self::from_fn(&alg, &alg, |a| AlgElement {
            blocks: vec![a.block(0).transpose()],
        })
    }

    /// `a ↦ tr(a)·1/n` on `M_n`.
    pub fn depolarizing(n: usize) -> Self {
        let alg = Algebra::full(n);
        Self::from_fn(&alg, &alg, |a| AlgElement {
            blocks: vec![CMatrix::identity(n).scale(a.block(0).trace() / n as f64)],
        })
    }

    /// `a ↦ Σ_α K_α embed(a) K_α*` into `M_t`, each `K_α` of shape `t × d`.
    pub fn from_kraus(source: &Algebra, kraus: &[CMatrix]) -> Result<Self> {
        let d = source.rep_dim();
        let t = kraus.first().map_or(d, CMatrix::rows);
        if kraus.iter().any(|k| k.shape() != (t, d)) {
            return Err(Error::ShapeMismatch(format!(
                "Kraus operators must be {t}x{d}"
            )));
        }
        let target = Algebra::full(t);
        Ok(Self::from_fn(source, &target, |a| {
            let x = a.embed();
            let mut acc = CMatrix::zeros(t, t);
            for k in kraus {
                acc = &acc + &k.matmul(&x).matmul(&k.adjoint());
            }
            AlgElement { blocks: vec![acc] }
        }))
    }

    /// Like [`Self::from_kraus`] but with images in the algebra `target`;
    /// images must lie in its block structure.
    pub fn from_kraus_into(
        source: &Algebra,
        target: &Algebra,
        kraus: &[CMatrix],
        tol: f64,
    ) -> Result<Self> {
        let full = Self::from_kraus(source, kraus)?;
        let mut action = CMatrix::zeros(target.dim(), source.dim());
        for (idx, e) in source.basis().iter().enumerate() {
            let img = full.apply(e);
            let inner = target.extract(img.block(0), tol)?;
            for (r, z) in inner.coords().into_iter().enumerate() {
                action[(r, idx)] = z;
            }
        }
        Self::new(source.clone(), target.clone(), action)
    }

    pub fn source(&self) -> &Algebra {
        &self.source
    }

    pub fn target(&self) -> &Algebra {
        &self.target
    }

    pub fn action(&self) -> &CMatrix {
        &self.action
    }

    pub fn apply(&self, a: &AlgElement) -> AlgElement {
        self.source
            .check(a)
            .expect("argument in the source algebra");
        self.target
            .element_from_coords(&self.action.mul_vec(&a.coords()))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        assert_eq!(inner.target, self.source, "compose: algebra mismatch");
        Self {
            source: inner.source.clone(),
            target: self.target.clone(),
            action: self.action.matmul(&inner.action),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(
            self.source == other.source && self.target == other.target,
            "add: algebra mismatch"
        );
        Self {
            source: self.source.clone(),
            target: self.target.clone(),
            action: &self.action + &other.action,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            source: self.source.clone(),
            target: self.target.clone(),
            action: self.action.scale(s),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Same map, viewed as taking values in `M_t`, `t = target.rep_dim()`.
    pub fn to_full_target(&self) -> Self {
        let full = Algebra::full(self.target.rep_dim());
        Self {
            source: self.source.clone(),
            target: full,
            action: self.target.embedding_matrix().matmul(&self.action),
        }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.action.is_zero(tol)
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.action.dist(&other.action)
    }

    /// Rank as a linear map, singular values above `cutoff · max(1, σ_max)`.
    pub fn rank(&self, cutoff: f64) -> usize {
        linalg::numerical_rank(&self.action, cutoff)
    }

    pub fn unital_residual(&self) -> f64 {
        self.apply(&self.source.unit())
            .coord_dist(&self.target.unit())
    }

    /// `C_k = Σ_{ij} e_ij ⊗ Φ(ι_k(e_ij))`, with the target embedded in `M_t`.
    pub fn choi(&self) -> Result<ChoiBlocks> {
        let t = self.target.rep_dim();
        let mut blocks = Vec::with_capacity(self.source.num_blocks());
        for k in 0..self.source.num_blocks() {
            let n = self.source.block_size(k);
            let mut c = CMatrix::zeros(n * t, n * t);
            for i in 0..n {
                for j in 0..n {
                    let img = self.apply(&self.source.matrix_unit(k, i, j)).embed();
                    c.set_submatrix(i * t, j * t, &img);
                }
            }
            blocks.push(c);
        }
        Ok(ChoiBlocks {
            target_dim: t,
            blocks,
        })
    }

    /// CP iff every Choi block is PSD. A map on `⊕ M_{n_k}` is CP iff each
    /// block restriction is.
    pub fn is_cp(&self, tol: f64) -> Result<bool> {
        Ok(self.choi()?.is_psd(tol))
    }

    /// `‖Φ‖_cb = ‖Φ(1)‖` for CP maps on a unital algebra.
    pub fn cb_norm_cp(&self, tol: f64) -> Result<f64> {
        let choi = self.choi()?;
        if !choi.is_psd(tol) {
            return Err(Error::NotCP {
                min_eig: choi.min_eigenvalue(),
            });
        }
        Ok(self.cb_norm_unchecked())
    }

    /// `‖Φ(1_A)‖` without the CP certificate.
    pub fn cb_norm_unchecked(&self) -> f64 {
        self.apply(&self.source.unit()).norm()
    }

    /// Kraus operators (`t × d`) from the Choi spectral decomposition,
    /// paired with the source block each one is supported on.
    fn kraus_by_block(&self, tol: f64) -> Result<Vec<(usize, CMatrix)>> {
        let choi = self.choi()?;
        if !choi.is_psd(tol) {
            return Err(Error::NotCP {
                min_eig: choi.min_eigenvalue(),
            });
        }
        let t = choi.target_dim;
        let d = self.source.rep_dim();
        let mut out = Vec::new();
        for (k, c) in choi.blocks.iter().enumerate() {
            let n = self.source.block_size(k);
            let o = self.source.rep_offset(k);
            let eig = linalg::eig_hermitian(c, tol.max(1e-12))?;
            let cutoff = tol * eig.spectral_radius().max(1.0);
            for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
                if lambda <= cutoff {
                    continue;
                }
                let w = eig.vectors.col(idx);
                let s = lambda.sqrt();
                // w = Σ_i e_i ⊗ x_i; column i of K is x_i.
                let mut kop = CMatrix::zeros(t, d);
                for i in 0..n {
                    for r in 0..t {
                        kop[(r, o + i)] = w[i * t + r] * s;
                    }
                }
                out.push((k, kop));
            }
        }
        Ok(out)
    }

    /// Kraus form `Φ(a) = Σ_α K_α embed(a) K_α*`.
    pub fn kraus(&self, tol: f64) -> Result<Vec<CMatrix>> {
        Ok(self
            .kraus_by_block(tol)?
            .into_iter()
            .map(|(_, k)| k)
            .collect())
    }

    /// Single-point dilation `Φ(a) = V* ρ(a) V`.
    pub fn stinespring(&self, tol: f64) -> Result<StinespringData> {
        let ks = self.kraus_by_block(tol)?;
        let mut multiplicities = vec![0; self.source.num_blocks()];
        let mut rep_blocks = Vec::with_capacity(ks.len());
        let mut pieces = Vec::with_capacity(ks.len());
        for (k, kop) in &ks {
            let n = self.source.block_size(*k);
            let o = self.source.rep_offset(*k);
            multiplicities[*k] += 1;
            rep_blocks.push(*k);
            // V_α = (K_α restricted to block k)*, shape n_k × t
            pieces.push(kop.submatrix(0, o, kop.rows(), n).adjoint());
        }
        let t = self.target.rep_dim();
        let v = if pieces.is_empty() {
            CMatrix::zeros(0, t)
        } else {
            CMatrix::vstack(&pieces)
        };
        Ok(StinespringData {
            dilation_dim: v.rows(),
            multiplicities,
            rep_blocks,
            v_ops: vec![v],
        })
    }
}

#[derive(Debug, Clone)]
pub struct ChoiBlocks {
    pub target_dim: usize,
    pub blocks: Vec<CMatrix>,
}

impl ChoiBlocks {
    /// Smallest eigenvalue over all blocks; `-∞` when a block is not Hermitian.
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|c| match linalg::eig_hermitian(c, 1e-9) {
                Ok(e) => e.min(),
                Err(_) => f64::NEG_INFINITY,
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.blocks
            .iter()
            .all(|c| linalg::is_psd(c, tol).unwrap_or(false))
    }

    pub fn eigenvalues(&self) -> Vec<Vec<f64>> {
        self.blocks
            .iter()
            .map(|c| {
                linalg::eig_hermitian(c, 1e-9)
                    .map(|e| e.eigenvalues)
                    .unwrap_or_default()
            })
            .collect()
    }
}

/// `φ(x,y)(a) = V(x)* ρ(a) V(y)` with `ρ` a direct sum of block
/// representations `a ↦ a_k`. Single maps carry one `V`.
#[derive(Debug, Clone)]
pub struct StinespringData {
    pub dilation_dim: usize,
    /// Copies of each source block inside `ρ`.
    pub multiplicities: Vec<usize>,
    /// Source block of each summand of `ρ`, in order.
    pub rep_blocks: Vec<usize>,
    pub v_ops: Vec<CMatrix>,
}

impl StinespringData {
    pub fn rho(&self, a: &AlgElement) -> CMatrix {
        let parts: Vec<CMatrix> = self
            .rep_blocks
            .iter()
            .map(|&k| a.block(k).clone())
            .collect();
        CMatrix::direct_sum(&parts)
    }

    /// `V(x)* ρ(a) V(y)`.
    pub fn reconstruct(&self, x: usize, y: usize, a: &AlgElement) -> CMatrix {
        self.v_ops[x]
            .adjoint()
            .matmul(&self.rho(a))
            .matmul(&self.v_ops[y])
    }

    /// `max ‖ρ(ab) − ρ(a)ρ(b)‖ + ‖ρ(a*) − ρ(a)*‖` over the given pairs.
    pub fn representation_residual(&self, pairs: &[(AlgElement, AlgElement)]) -> f64 {
        pairs
            .iter()
            .map(|(a, b)| {
                let mult = self.rho(&a.mul(b)).dist(&self.rho(a).matmul(&self.rho(b)));
                let star = self.rho(&a.adjoint()).dist(&self.rho(a).adjoint());
                mult + star
            })
            .fold(0.0, f64::max)
    }
}

/// Faithful tracial state `τ(a) = Σ_k w_k tr(a_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TracialState {
    algebra: Algebra,
    weights: Vec<f64>,
}

impl TracialState {
    pub fn new(algebra: &Algebra, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != algebra.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "{} weights for {} blocks",
                weights.len(),
                algebra.num_blocks()
            )));
        }
        if weights.iter().any(|&w| w <= 0.0 || !w.is_finite()) {
            return Err(Error::Invalid("trace weights must be positive".into()));
        }
        let total: f64 = weights
            .iter()
            .zip(algebra.blocks())
            .map(|(w, &n)| w * n as f64)
            .sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Invalid(format!(
                "trace of the unit is {total}, not 1"
            )));
        }
        Ok(Self {
            algebra: algebra.clone(),
            weights,
        })
    }

    /// `Tr/d` for the canonical representation.
    pub fn normalized(algebra: &Algebra) -> Self {
        let w = 1.0 / algebra.rep_dim() as f64;
        Self {
            algebra: algebra.clone(),
            weights: vec![w; algebra.num_blocks()],
        }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn eval(&self, a: &AlgElement) -> Result<C64> {
        self.algebra.check(a)?;
        Ok(a.blocks()
            .iter()
            .zip(&self.weights)
            .map(|(b, &w)| b.trace() * w)
            .sum())
    }

    /// `‖a‖_{2,τ} = τ(a*a)^{1/2}`.
    pub fn l2_norm(&self, a: &AlgElement) -> f64 {
        a.blocks()
            .iter()
            .zip(&self.weights)
            .map(|(b, &w)| w * b.frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// `Σ_k tr(D_k a_k)` density of the functional `a ↦ τ(a) − τ(Φ(a))`;
/// the functional is positive iff every `D_k` is PSD.
pub fn trace_defect_density(tau: &TracialState, map: &CBMap) -> Result<Vec<CMatrix>> {
    let alg = map.source();
    if map.target() != tau.algebra() || alg != tau.algebra() {
        return Err(Error::AlgebraMismatch(
            "map and trace act on different algebras".into(),
        ));
    }
    let mut out = Vec::with_capacity(alg.num_blocks());
    for k in 0..alg.num_blocks() {
        let n = alg.block_size(k);
        let mut d = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let e = alg.matrix_unit(k, i, j);
                let w = tau.eval(&e)? - tau.eval(&map.apply(&e))?;
                // ω(e_ij) = tr(D e_ij) = D_ji
                d[(j, i)] = w;
            }
        }
        out.push(d);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;

    fn sigma_x() -> CMatrix {
        CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
    }

    #[test]
    fn embed_examples() {
        let alg = Algebra::new(vec![2, 1]).unwrap();
        assert_eq!(alg.unit().embed(), CMatrix::identity(3));
        let a = alg.element(vec![sigma_x(), CMatrix::zeros(1, 1)]).unwrap();
        let mut expected = CMatrix::zeros(3, 3);
        expected.set_submatrix(0, 0, &sigma_x());
        assert_eq!(a.embed(), expected);
        assert_eq!(alg.extract(&a.embed(), 1e-12).unwrap(), a);
        assert!(matches!(
            alg.extract(&CMatrix::from_fn(3, 3, |_, _| ONE), 1e-12),
            Err(Error::NotInAlgebra(_))
        ));
    }

    #[test]
    fn positivity_examples() {
        let alg = Algebra::new(vec![2, 1]).unwrap();
        assert!(alg.unit().is_positive_element(1e-9));
        let a = alg.element(vec![sigma_x(), CMatrix::identity(1)]).unwrap();
        assert!(!a.is_positive_element(1e-9));
    }

    #[test]
    fn choi_examples() {
        let id = CBMap::identity(&Algebra::full(2));
        let ev = &id.choi().unwrap().eigenvalues()[0];
        assert!(ev[..3].iter().all(|x| x.abs() < 1e-12));
        assert!((ev[3] - 2.0).abs() < 1e-12);

        let t = CBMap::transpose(2);
        let ev = &t.choi().unwrap().eigenvalues()[0];
        let expected = [-1.0, 1.0, 1.0, 1.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }

        let dep = CBMap::depolarizing(2);
        let c = &dep.choi().unwrap().blocks[0];
        assert!(c.dist(&CMatrix::identity(4).scale_real(0.5)) < 1e-14);
    }

    #[test]
    fn cp_verdicts() {
        assert!(CBMap::identity(&Algebra::new(vec![2, 1]).unwrap())
            .is_cp(1e-9)
            .unwrap());
        assert!(!CBMap::transpose(2).is_cp(1e-9).unwrap());
        assert!(matches!(
            CBMap::transpose(2).kraus(1e-9),
            Err(Error::NotCP { .. })
        ));
    }

    #[test]
    fn cb_norm_examples() {
        let alg = Algebra::full(2);
        assert!((CBMap::identity(&alg).cb_norm_cp(1e-9).unwrap() - 1.0).abs() < 1e-12);
        let v = CMatrix::diag_real(&[1.0, 0.5]);
        let conj = CBMap::from_kraus(&alg, &[v.adjoint()]).unwrap();
        assert!((conj.cb_norm_cp(1e-9).unwrap() - 1.0).abs() < 1e-12);
        let scaled = CBMap::identity(&alg).scale_real(0.3);
        assert!((scaled.cb_norm_cp(1e-9).unwrap() - 0.3).abs() < 1e-12);
        assert!(matches!(
            CBMap::transpose(2).cb_norm_cp(1e-9),
            Err(Error::NotCP { .. })
        ));
    }

    #[test]
    fn identity_kraus_and_dilation() {
        let alg = Algebra::full(2);
        let ks = CBMap::identity(&alg).kraus(1e-9).unwrap();
        assert_eq!(ks.len(), 1);
        // K = phase · I
        let k = &ks[0];
        let phase = k[(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!(k.dist(&CMatrix::identity(2).scale(phase)) < 1e-12);

        let st = CBMap::identity(&alg).stinespring(1e-9).unwrap();
        assert_eq!(st.dilation_dim, 2);
        assert!(st.v_ops[0].is_unitary(1e-12));
    }

    #[test]
    fn depolarizing_dilation() {
        let dep = CBMap::depolarizing(2);
        let st = dep.stinespring(1e-9).unwrap();
        assert_eq!(st.dilation_dim, 8);
        for e in Algebra::full(2).basis() {
            let lhs = dep.apply(&e).embed();
            assert!(lhs.dist(&st.reconstruct(0, 0, &e)) < 1e-10);
        }
    }

    #[test]
    fn trace_examples() {
        let c3 = Algebra::diagonal(3);
        let tau = TracialState::normalized(&c3);
        assert!((tau.eval(&c3.unit()).unwrap() - ONE).norm() < 1e-15);
        let m2 = Algebra::full(2);
        let tau = TracialState::normalized(&m2);
        let sx = m2.element(vec![sigma_x()]).unwrap();
        assert!(tau.eval(&sx).unwrap().norm() < 1e-15);
        assert!(matches!(
            tau.eval(&c3.unit()),
            Err(Error::AlgebraMismatch(_))
        ));
        assert!(TracialState::new(&m2, vec![0.4]).is_err());
        assert!(TracialState::new(&c3, vec![0.5, 0.5, 0.0]).is_err());
    }

    #[test]
    fn central_scalars() {
        let alg = Algebra::new(vec![2, 1]).unwrap();
        let z = alg.central(&[C64::new(2.0, 0.0), I]).unwrap();
        assert_eq!(
            z.central_scalars(1e-12).unwrap(),
            vec![C64::new(2.0, 0.0), I]
        );
        let a = alg.element(vec![sigma_x(), CMatrix::identity(1)]).unwrap();
        assert!(!a.is_central(1e-9));
    }

    #[test]
    fn bad_shapes_rejected() {
        let alg = Algebra::full(2);
        assert!(CBMap::new(alg.clone(), alg.clone(), CMatrix::zeros(3, 4)).is_err());
        assert!(Algebra::new(vec![]).is_err());
        assert!(Algebra::new(vec![2, 0]).is_err());
    }
}
