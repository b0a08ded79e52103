//! Trace-induced `L²` geometry on `A` and on the crossed product, the
//! operators `T_Φ` of `L²`-bounded maps, and per-family diagnostics for
//! Haagerup-type approximation.

use serde::Serialize;

use crate::crossed::{CrossedMap, DynamicalSystem};
use crate::error::{Error, Result};
use crate::fdcstar::{self, CBMap, TracialState};
use crate::hsmult::{self, CertifyOptions, HSMultiplier};
use crate::linalg::{self, CMatrix, C64, ZERO};

/// `⟨a, b⟩ = τ(b*a)` on a coordinate space, with an orthonormal basis
/// obtained by Gram-Schmidt over the coordinate basis.
#[derive(Debug, Clone)]
pub struct L2Space {
    /// `gram[(v, u)] = τ(e_v* e_u)`.
    gram: CMatrix,
    /// Columns are the coordinates of the orthonormal basis.
    onb: CMatrix,
    onb_inv: CMatrix,
}

impl L2Space {
    pub fn from_gram(gram: CMatrix) -> Result<Self> {
        let n = gram.rows();
        if !gram.is_square() {
            return Err(Error::NonSquare {
                rows: gram.rows(),
                cols: gram.cols(),
            });
        }
        let inner = |x: &[C64], y: &[C64]| -> C64 {
            // ⟨x, y⟩ = y^H G x
            let gx = gram.mul_vec(x);
            y.iter().zip(&gx).map(|(a, b)| a.conj() * b).sum()
        };
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
        for u in 0..n {
            let mut v = vec![ZERO; n];
            v[u] = C64::new(1.0, 0.0);
            for q in &cols {
                let proj = inner(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
            let norm2 = inner(&v, &v).re;
            if norm2 <= 1e-14 {
                return Err(Error::Invalid(
                    "inner product is degenerate (trace not faithful)".into(),
                ));
            }
            let norm = norm2.sqrt();
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
        let onb = CMatrix::from_fn(n, n, |r, c| cols[c][r]);
        let onb_inv = onb.adjoint().matmul(&gram);
        Ok(Self { gram, onb, onb_inv })
    }

    /// `L²(A, τ)`.
    pub fn for_algebra(tau: &TracialState) -> Self {
        let alg = tau.algebra();
        let basis = alg.basis();
        let gram = CMatrix::from_fn(alg.dim(), alg.dim(), |v, u| {
            tau.eval(&basis[v].adjoint().mul(&basis[u]))
                .expect("same algebra")
        });
        Self::from_gram(gram).expect("faithful trace")
    }

    /// `L²(A ⋊ G, τ∘E)`, inner products evaluated on the concrete operators.
    pub fn for_crossed(sys: &DynamicalSystem) -> Result<Self> {
        sys.require_trace()?;
        let mats: Vec<CMatrix> = sys.crossed_basis().iter().map(|x| sys.synth(x)).collect();
        let adj: Vec<CMatrix> = mats.iter().map(CMatrix::adjoint).collect();
        let n = mats.len();
        let mut gram = CMatrix::zeros(n, n);
        for v in 0..n {
            for u in 0..n {
                gram[(v, u)] = induced_trace(sys, &adj[v].matmul(&mats[u]), 1e-9)?;
            }
        }
        Self::from_gram(gram)
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn onb(&self) -> &CMatrix {
        &self.onb
    }

    /// Coordinates → orthonormal-basis components.
    pub fn onb_inverse(&self) -> &CMatrix {
        &self.onb_inv
    }

    pub fn norm(&self, coords: &[C64]) -> f64 {
        let gx = self.gram.mul_vec(coords);
        coords
            .iter()
            .zip(&gx)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .re
            .max(0.0)
            .sqrt()
    }

    /// `‖C^H G C − I‖`.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.dim();
        self.onb
            .adjoint()
            .matmul(&self.gram)
            .matmul(&self.onb)
            .dist(&CMatrix::identity(n))
    }

    /// Matrix of a coordinate-space map with respect to the orthonormal basis.
    pub fn operator(&self, action: &CMatrix) -> Result<CMatrix> {
        if action.shape() != (self.dim(), self.dim()) {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} action on a space of dimension {}",
                action.rows(),
                action.cols(),
                self.dim()
            )));
        }
        Ok(self.onb_inv.matmul(action).matmul(&self.onb))
    }
}

/// `τ'(X) = τ(E(X))`.
pub fn induced_trace(sys: &DynamicalSystem, x: &CMatrix, tol: f64) -> Result<C64> {
    let tau = sys.require_trace()?;
    tau.eval(&sys.cond_exp(x, tol)?)
}

/// `T_Φ` on `L²(A, τ)`.
pub fn l2_matrix(space: &L2Space, map: &CBMap) -> Result<CMatrix> {
    if map.source() != map.target() {
        return Err(Error::ShapeMismatch(
            "map must send the algebra to itself".into(),
        ));
    }
    space.operator(map.action())
}

/// `L²(A⋊G) = ⊕_t L²_t`, with isometries `V_t: a ↦ π(a)λ_t` and projections
/// `P_t = V_t V_t*`, all as matrices in orthonormal bases.
#[derive(Debug, Clone)]
pub struct L2Decomposition {
    pub base: L2Space,
    pub crossed: L2Space,
    pub v: Vec<CMatrix>,
    pub p: Vec<CMatrix>,
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct DecompositionResiduals {
    /// `max_t ‖V_t*V_t − I‖`.
    pub isometry: f64,
    /// `max_{s≠t} ‖P_s P_t‖`.
    pub orthogonality: f64,
    /// `‖Σ_t P_t − I‖`.
    pub completeness: f64,
    /// `max_t` deviation of `V_t*P_t` from the Fourier coefficient `E(·λ_t*)`.
    pub fourier: f64,
}

pub fn l2_decompose(sys: &DynamicalSystem) -> Result<L2Decomposition> {
    let tau = sys.require_trace()?;
    let base = L2Space::for_algebra(tau);
    let crossed = L2Space::for_crossed(sys)?;
    let k = sys.algebra().dim();
    let n = sys.crossed_dim();
    let mut v = Vec::with_capacity(sys.order());
    let mut p = Vec::with_capacity(sys.order());
    for t in sys.group().elements() {
        let mut j = CMatrix::zeros(n, k);
        for u in 0..k {
            j[(t * k + u, u)] = C64::new(1.0, 0.0);
        }
        let vt = crossed.onb_inverse().matmul(&j).matmul(base.onb());
        p.push(vt.matmul(&vt.adjoint()));
        v.push(vt);
    }
    Ok(L2Decomposition {
        base,
        crossed,
        v,
        p,
    })
}

impl L2Decomposition {
    pub fn residuals(&self, sys: &DynamicalSystem) -> Result<DecompositionResiduals> {
        let k = self.base.dim();
        let n = self.crossed.dim();
        let isometry = self
            .v
            .iter()
            .map(|v| v.adjoint().matmul(v).dist(&CMatrix::identity(k)))
            .fold(0.0, f64::max);
        let mut orthogonality = 0.0f64;
        for (s, ps) in self.p.iter().enumerate() {
            for (t, pt) in self.p.iter().enumerate() {
                if s != t {
                    orthogonality = orthogonality.max(ps.matmul(pt).frobenius_norm());
                }
            }
        }
        let mut sum = CMatrix::zeros(n, n);
        for pt in &self.p {
            sum = &sum + pt;
        }
        let completeness = sum.dist(&CMatrix::identity(n));

        let mut fourier = 0.0f64;
        for (idx, x) in sys.crossed_basis().iter().enumerate() {
            let z = self.crossed.onb_inverse().col(idx);
            let xm = sys.synth(x);
            for (t, (vt, pt)) in self.v.iter().zip(&self.p).enumerate() {
                let lhs = vt.adjoint().matmul(pt).mul_vec(&z);
                let coeff = sys.fourier_coeff(&xm, t, 1e-9)?;
                let rhs = self.base.onb_inverse().mul_vec(&coeff.coords());
                let d = lhs
                    .iter()
                    .zip(&rhs)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                fourier = fourier.max(d);
            }
        }
        Ok(DecompositionResiduals {
            isometry,
            orthogonality,
            completeness,
            fourier,
        })
    }

    /// `T_Φ` for a map of the crossed product.
    pub fn crossed_operator(&self, phi: &CrossedMap) -> Result<CMatrix> {
        self.crossed.operator(phi.matrix())
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Admissibility {
    pub cp: bool,
    pub unital: bool,
    pub trace_dominated: bool,
}

impl Admissibility {
    pub fn all(&self) -> bool {
        self.cp && self.unital && self.trace_dominated
    }

    fn violations(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if !self.cp {
            v.push("multiplier is not completely positive");
        }
        if !self.unital {
            v.push("F(e) is not unital");
        }
        if !self.trace_dominated {
            v.push("tau o F(e) <= tau fails");
        }
        v
    }
}

/// `τ(F(e)(a)) ≤ τ(a)` on `A⁺`, decided exactly: the functional
/// `a ↦ τ(a) − τ(F(e)(a))` has PSD density blocks.
pub fn trace_dominated(sys: &DynamicalSystem, fe: &CBMap, tol: f64) -> Result<bool> {
    let tau = sys.require_trace()?;
    let dens = fdcstar::trace_defect_density(tau, fe)?;
    Ok(dens.iter().all(|d| linalg::is_psd(d, tol).unwrap_or(false)))
}

pub fn admissibility(
    sys: &DynamicalSystem,
    f: &HSMultiplier,
    opts: &CertifyOptions,
) -> Result<Admissibility> {
    let fe = f.value(sys.identity());
    let cp = hsmult::certify_cp(sys, f, opts)?.verdict;
    let unital = fe.unital_residual() <= opts.tol;
    let trace_dominated = trace_dominated(sys, fe, opts.tol)?;
    Ok(Admissibility {
        cp,
        unital,
        trace_dominated,
    })
}

fn require(adm: &Admissibility, need_trace: bool) -> Result<()> {
    let mut v = adm.violations();
    if !need_trace {
        v.retain(|m| !m.starts_with("tau"));
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::PreconditionFailed(v.join("; ")))
    }
}

/// `‖T_{S_F} − Σ_t V_t T_{F(t)} V_t*‖` for admissible `F`.
pub fn check_block_diag(
    sys: &DynamicalSystem,
    f: &HSMultiplier,
    opts: &CertifyOptions,
) -> Result<f64> {
    require(&admissibility(sys, f, opts)?, true)?;
    let dec = l2_decompose(sys)?;
    block_diag_residual(sys, f, &dec)
}

/// Residual of the block decomposition without the admissibility gate.
pub fn block_diag_residual(
    sys: &DynamicalSystem,
    f: &HSMultiplier,
    dec: &L2Decomposition,
) -> Result<f64> {
    let tsf = dec.crossed_operator(&f.as_crossed_map(sys)?)?;
    let n = dec.crossed.dim();
    let mut sum = CMatrix::zeros(n, n);
    for (t, vt) in dec.v.iter().enumerate() {
        let tf = l2_matrix(&dec.base, f.value(t))?;
        sum = &sum + &vt.matmul(&tf).matmul(&vt.adjoint());
    }
    Ok(linalg::op_norm(&(&tsf - &sum)))
}

/// `‖T_{F(t)}‖` for every `t`.
pub fn l2_norms(sys: &DynamicalSystem, f: &HSMultiplier) -> Result<Vec<f64>> {
    let space = L2Space::for_algebra(sys.require_trace()?);
    f.values()
        .iter()
        .map(|v| l2_matrix(&space, v).map(|m| linalg::op_norm(&m)))
        .collect()
}

/// Every `T_{F(t)}` is a contraction (for admissible `F`).
pub fn contraction_check(
    sys: &DynamicalSystem,
    f: &HSMultiplier,
    opts: &CertifyOptions,
) -> Result<bool> {
    require(&admissibility(sys, f, opts)?, true)?;
    Ok(l2_norms(sys, f)?.iter().all(|&n| n <= 1.0 + 1e-9))
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ScalarPd {
    /// `φ(s) = τ(F(s)(1))` as `[re, im]`.
    pub phi: Vec<C64>,
    pub min_eigenvalue: f64,
    pub verdict: bool,
}

/// `φ(s) = τ(F(s)(1_A))` and positivity of `(φ(s_k⁻¹ s_l))_{k,l}`.
pub fn scalar_pd_extract(
    sys: &DynamicalSystem,
    f: &HSMultiplier,
    opts: &CertifyOptions,
) -> Result<ScalarPd> {
    let tau = sys.require_trace()?;
    require(&admissibility(sys, f, opts)?, false)?;
    let one = sys.algebra().unit();
    let phi: Vec<C64> = f
        .values()
        .iter()
        .map(|v| tau.eval(&v.apply(&one)))
        .collect::<Result<_>>()?;
    let g = sys.group();
    let n = g.order();
    let m = CMatrix::from_fn(n, n, |k, l| phi[g.mul(g.inv(k), l)]);
    let min_eigenvalue = linalg::eig_hermitian(&m, 1e-9)?.min();
    let verdict = linalg::is_psd(&m, opts.tol)?;
    Ok(ScalarPd {
        phi,
        min_eigenvalue,
        verdict,
    })
}

/// `max_t ‖T_{h_Φ(t)} − V_t* P_t T_Φ P_t V_t‖`.
pub fn compression_identity_check(sys: &DynamicalSystem, phi: &CrossedMap) -> Result<f64> {
    let dec = l2_decompose(sys)?;
    let h = hsmult::h_from_map(sys, phi);
    let tphi = dec.crossed_operator(phi)?;
    let mut worst = 0.0f64;
    for (t, (vt, pt)) in dec.v.iter().zip(&dec.p).enumerate() {
        let lhs = l2_matrix(&dec.base, h.value(t))?;
        let rhs = vt.adjoint().matmul(pt).matmul(&tphi).matmul(pt).matmul(vt);
        worst = worst.max(linalg::op_norm(&(&lhs - &rhs)));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct HaagerupRow {
    pub name: String,
    pub cp: bool,
    pub unital: bool,
    pub trace_dominated: bool,
    pub l2_compact: bool,
    pub vanishes_at_infinity: bool,
    /// `max_{t,a} ‖F(t)(a) − a‖_{2,τ}` over an orthonormal basis of `L²(A)`.
    pub base_deviation: Option<f64>,
    /// `max_x ‖S_F(x) − x‖_{2,τ'}` over an orthonormal basis of `L²(A⋊G)`.
    pub crossed_deviation: Option<f64>,
    pub flag: Option<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct HaagerupReport {
    pub rows: Vec<HaagerupRow>,
    pub notes: Vec<String>,
}

impl HaagerupReport {
    pub fn all_admissible(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.cp && r.unital && r.trace_dominated)
    }
}

fn max_column_norm(m: &CMatrix) -> f64 {
    (0..m.cols())
        .map(|c| m.col(c).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

pub fn haagerup_report(
    sys: &DynamicalSystem,
    family: &[(String, HSMultiplier)],
    opts: &CertifyOptions,
) -> Result<HaagerupReport> {
    let dec = l2_decompose(sys)?;
    let kb = dec.base.dim();
    let kc = dec.crossed.dim();
    let mut rows = Vec::with_capacity(family.len());
    for (name, f) in family {
        let adm = admissibility(sys, f, opts)?;
        let (base_deviation, crossed_deviation, flag) = if adm.cp {
            let mut base = 0.0f64;
            for v in f.values() {
                let t = l2_matrix(&dec.base, v)?;
                base = base.max(max_column_norm(&(&t - &CMatrix::identity(kb))));
            }
            let tsf = dec.crossed_operator(&f.as_crossed_map(sys)?)?;
            let crossed = max_column_norm(&(&tsf - &CMatrix::identity(kc)));
            let flag = (!adm.all()).then(|| adm.violations().join("; "));
            (Some(base), Some(crossed), flag)
        } else {
            (
                None,
                None,
                Some("not completely positive; excluded from deviation columns".into()),
            )
        };
        rows.push(HaagerupRow {
            name: name.clone(),
            cp: adm.cp,
            unital: adm.unital,
            trace_dominated: adm.trace_dominated,
            l2_compact: true,
            vanishes_at_infinity: true,
            base_deviation,
            crossed_deviation,
            flag,
        });
    }
    Ok(HaagerupReport {
        rows,
        notes: vec![
            "L2-compactness holds for every member: all operators act on finite-dimensional spaces".into(),
            "vanishing at infinity is vacuous for a finite group".into(),
            "deviation columns are finite diagnostics for a user-supplied family, not a verdict on the system".into(),
        ],
    })
}
