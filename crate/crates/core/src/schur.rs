//! Kernels `k: X×X → A`, their operators `T_k`, and Schur A-multipliers
//! `φ: X×X → CB(A, M_d)` acting entrywise on `M_m ⊗ A`.

use crate::error::{Error, Result};
use crate::fdcstar::{AlgElement, Algebra, CBMap, StinespringData};
use crate::linalg::{self, CMatrix, C64};

/// An `m×m` array of `d×d` blocks, i.e. an element of `M_m ⊗ M_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    m: usize,
    d: usize,
    matrix: CMatrix,
}

impl BlockOperator {
    pub fn zeros(m: usize, d: usize) -> Self {
        Self {
            m,
            d,
            matrix: CMatrix::zeros(m * d, m * d),
        }
    }

    pub fn from_matrix(m: usize, d: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.shape() != (m * d, m * d) {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix is not {m}x{m} blocks of size {d}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { m, d, matrix })
    }

    pub fn from_blocks(m: usize, d: usize, f: impl Fn(usize, usize) -> CMatrix) -> Self {
        let mut out = Self::zeros(m, d);
        for x in 0..m {
            for y in 0..m {
                out.set_block(x, y, &f(x, y));
            }
        }
        out
    }

    pub fn points(&self) -> usize {
        self.m
    }

    pub fn block_dim(&self) -> usize {
        self.d
    }

    pub fn block(&self, x: usize, y: usize) -> CMatrix {
        self.matrix
            .submatrix(x * self.d, y * self.d, self.d, self.d)
    }

    pub fn set_block(&mut self, x: usize, y: usize, b: &CMatrix) {
        assert_eq!(b.shape(), (self.d, self.d), "block shape");
        self.matrix.set_submatrix(x * self.d, y * self.d, b);
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        linalg::is_psd(&self.matrix, tol)
    }

    pub fn op_norm(&self) -> f64 {
        linalg::op_norm(&self.matrix)
    }

    /// Reads every block as an element of `alg`; fails with `NotInAlgebra`
    /// when some block leaves the block-diagonal support of `embed(A)`.
    pub fn to_algebra_blocks(&self, alg: &Algebra, tol: f64) -> Result<Vec<AlgElement>> {
        if alg.rep_dim() != self.d {
            return Err(Error::ShapeMismatch(format!(
                "blocks of size {} for an algebra on C^{}",
                self.d,
                alg.rep_dim()
            )));
        }
        let mut out = Vec::with_capacity(self.m * self.m);
        for x in 0..self.m {
            for y in 0..self.m {
                out.push(alg.extract(&self.block(x, y), tol)?);
            }
        }
        Ok(out)
    }
}

/// `k: X×X → A` on `X = {0..m-1}`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    algebra: Algebra,
    m: usize,
    values: Vec<AlgElement>,
}

impl Kernel {
    pub fn new(algebra: &Algebra, m: usize, values: Vec<AlgElement>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Invalid("index set must be nonempty".into()));
        }
        if values.len() != m * m {
            return Err(Error::ShapeMismatch(format!(
                "{} kernel values for {m} points",
                values.len()
            )));
        }
        for v in &values {
            algebra.check(v)?;
        }
        Ok(Self {
            algebra: algebra.clone(),
            m,
            values,
        })
    }

    pub fn from_fn(
        algebra: &Algebra,
        m: usize,
        f: impl Fn(usize, usize) -> AlgElement,
    ) -> Result<Self> {
        let values = (0..m * m).map(|i| f(i / m, i % m)).collect();
        Self::new(algebra, m, values)
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn points(&self) -> usize {
        self.m
    }

    pub fn get(&self, x: usize, y: usize) -> &AlgElement {
        &self.values[x * self.m + y]
    }

    /// `(T_k ξ)(x) = Σ_y k(x,y) ξ(y)`.
    pub fn t_of_k(&self) -> BlockOperator {
        BlockOperator::from_blocks(self.m, self.algebra.rep_dim(), |x, y| {
            self.get(x, y).embed()
        })
    }

    /// `k(x,y)* = k(y,x)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.m).all(|x| {
            (0..self.m).all(|y| {
                let lhs = self.get(x, y).adjoint();
                let rhs = self.get(y, x);
                lhs.coord_dist(rhs) <= tol * rhs.max_abs().max(1.0)
            })
        })
    }

    /// Positive definiteness, decided by positivity of `T_k`.
    pub fn is_pd(&self, tol: f64) -> bool {
        self.t_of_k().is_psd(tol).unwrap_or(false)
    }

    /// `Σ_{x,y} ‖k(x,y)‖²` square-rooted; bounds `‖T_k‖`.
    pub fn l2_bound(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// `φ: X×X → CB(A, M_d)`, `d` the representation dimension of `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurMultiplierFn {
    algebra: Algebra,
    m: usize,
    values: Vec<CBMap>,
}

impl SchurMultiplierFn {
    /// Values may target `A` itself or `M_d`; they are stored as maps into `M_d`.
    pub fn new(algebra: &Algebra, m: usize, values: Vec<CBMap>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Invalid("index set must be nonempty".into()));
        }
        if values.len() != m * m {
            return Err(Error::ShapeMismatch(format!(
                "{} multiplier values for {m} points",
                values.len()
            )));
        }
        let d = algebra.rep_dim();
        let values = values
            .into_iter()
            .map(|v| {
                if v.source() != algebra || v.target().rep_dim() != d {
                    return Err(Error::AlgebraMismatch(format!(
                        "value maps {:?} -> {:?}, expected source {:?} and target on C^{d}",
                        v.source().blocks(),
                        v.target().blocks(),
                        algebra.blocks()
                    )));
                }
                Ok(v.to_full_target())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            algebra: algebra.clone(),
            m,
            values,
        })
    }

    pub fn from_fn(algebra: &Algebra, m: usize, f: impl Fn(usize, usize) -> CBMap) -> Result<Self> {
        let values = (0..m * m).map(|i| f(i / m, i % m)).collect();
        Self::new(algebra, m, values)
    }

    pub fn identity(algebra: &Algebra, m: usize) -> Self {
        let id = CBMap::identity(algebra);
        Self::from_fn(algebra, m, |_, _| id.clone()).expect("identity multiplier")
    }

    /// `φ(x,y) = c_{xy}·id`.
    pub fn scalar(algebra: &Algebra, c: &CMatrix) -> Result<Self> {
        if !c.is_square() {
            return Err(Error::NonSquare {
                rows: c.rows(),
                cols: c.cols(),
            });
        }
        let id = CBMap::identity(algebra);
        Self::from_fn(algebra, c.rows(), |x, y| id.scale(c[(x, y)]))
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn points(&self) -> usize {
        self.m
    }

    pub fn get(&self, x: usize, y: usize) -> &CBMap {
        &self.values[x * self.m + y]
    }

    pub fn values(&self) -> &[CBMap] {
        &self.values
    }

    /// `S_φ`: block `(x,y)` becomes `φ(x,y)(B_{xy})`.
    pub fn schur_apply(&self, b: &BlockOperator, tol: f64) -> Result<BlockOperator> {
        if b.points() != self.m {
            return Err(Error::ShapeMismatch(format!(
                "{} points in the operator, {} in the multiplier",
                b.points(),
                self.m
            )));
        }
        let entries = b.to_algebra_blocks(&self.algebra, tol)?;
        let d = self.algebra.rep_dim();
        Ok(BlockOperator::from_blocks(self.m, d, |x, y| {
            self.get(x, y).apply(&entries[x * self.m + y]).embed()
        }))
    }

    /// `φ·k`, as the block operator `T_{φ·k}`.
    pub fn apply_kernel(&self, k: &Kernel) -> Result<BlockOperator> {
        if k.points() != self.m || k.algebra() != &self.algebra {
            return Err(Error::ShapeMismatch(
                "kernel and multiplier differ in shape".into(),
            ));
        }
        let d = self.algebra.rep_dim();
        Ok(BlockOperator::from_blocks(self.m, d, |x, y| {
            self.get(x, y).apply(k.get(x, y)).embed()
        }))
    }

    /// `Ψ(a) = [φ(x,y)(a)]_{x,y}`, a map `A → M_{m·d}`.
    pub fn psi(&self) -> CBMap {
        let d = self.algebra.rep_dim();
        let target = Algebra::full(self.m * d);
        CBMap::from_fn(&self.algebra, &target, |a| {
            let b = BlockOperator::from_blocks(self.m, d, |x, y| self.get(x, y).apply(a).embed());
            target.element(vec![b.into_matrix()]).expect("full block")
        })
    }

    pub fn is_positive_type(&self, tol: f64) -> bool {
        self.psi().is_cp(tol).unwrap_or(false)
    }

    /// Smallest Choi eigenvalue of `Ψ`; negative iff not of positive type
    /// (up to tolerance).
    pub fn min_choi_eigenvalue(&self) -> f64 {
        self.psi()
            .choi()
            .map(|c| c.min_eigenvalue())
            .unwrap_or(f64::NEG_INFINITY)
    }

    /// `φ(x,y)(a) = V(x)* ρ(a) V(y)`, one `V(x)` per point.
    pub fn stinespring_multi(&self, tol: f64) -> Result<StinespringData> {
        let psi = self.psi();
        if !psi.is_cp(tol)? {
            return Err(Error::NotPositiveType);
        }
        let whole = psi.stinespring(tol)?;
        let v = &whole.v_ops[0];
        let d = self.algebra.rep_dim();
        let v_ops = (0..self.m)
            .map(|x| v.submatrix(0, x * d, v.rows(), d))
            .collect();
        Ok(StinespringData { v_ops, ..whole })
    }

    /// `max_{x,y,a} ‖φ(x,y)(a) − V(x)*ρ(a)V(y)‖` over the matrix-unit basis.
    pub fn factorization_residual(&self, st: &StinespringData) -> f64 {
        let basis = self.algebra.basis();
        let mut worst = 0.0f64;
        for x in 0..self.m {
            for y in 0..self.m {
                for a in &basis {
                    let lhs = self.get(x, y).apply(a).embed();
                    worst = worst.max(linalg::op_norm(&(&lhs - &st.reconstruct(x, y, a))));
                }
            }
        }
        worst
    }

    /// `S_φ(1)` for the unit of `M_m ⊗ A`.
    pub fn image_of_unit(&self) -> BlockOperator {
        let d = self.algebra.rep_dim();
        let unit = BlockOperator::from_blocks(self.m, d, |x, y| {
            if x == y {
                CMatrix::identity(d)
            } else {
                CMatrix::zeros(d, d)
            }
        });
        self.schur_apply(&unit, 1e-12).expect("unit lies in M_m(A)")
    }

    /// `‖S_φ‖_cb = ‖S_φ(1)‖`, valid for multipliers of positive type.
    pub fn cb_norm(&self, tol: f64) -> Result<f64> {
        if !self.is_positive_type(tol) {
            return Err(Error::NotPositiveType);
        }
        Ok(self.image_of_unit().op_norm())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            algebra: self.algebra.clone(),
            m: self.m,
            values: self.values.iter().map(|v| v.scale(s)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m, "point count");
        Self {
            algebra: self.algebra.clone(),
            m: self.m,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.dist(b))
            .fold(0.0, f64::max)
    }
}
