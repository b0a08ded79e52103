//! Herz-Schur multipliers `F: G → CB(A)` of a finite dynamical system:
//! the coefficientwise map `S_F`, the transference `N(F)`, three-route
//! certification of complete positivity, and related constructions.

use rand::Rng;
use serde::Serialize;

use crate::crossed::{CrossedElement, CrossedMap, DynamicalSystem};
use crate::error::{Error, Result};
use crate::fdcstar::{AlgElement, Algebra, CBMap};
use crate::linalg::{self, CMatrix, C64};
use crate::random;
use crate::schur::SchurMultiplierFn;

#[derive(Debug, Clone, PartialEq)]
pub struct HSMultiplier {
    algebra: Algebra,
    values: Vec<CBMap>,
}

impl HSMultiplier {
    pub fn new(sys: &DynamicalSystem, values: Vec<CBMap>) -> Result<Self> {
        if values.len() != sys.order() {
            return Err(Error::SystemMismatch(format!(
                "{} values for a group of order {}",
                values.len(),
                sys.order()
            )));
        }
        let alg = sys.algebra();
        if let Some(v) = values
            .iter()
            .find(|v| v.source() != alg || v.target() != alg)
        {
            return Err(Error::SystemMismatch(format!(
                "value maps {:?} -> {:?}, system algebra is {:?}",
                v.source().blocks(),
                v.target().blocks(),
                alg.blocks()
            )));
        }
        Ok(Self {
            algebra: alg.clone(),
            values,
        })
    }

    pub fn from_fn(sys: &DynamicalSystem, f: impl Fn(usize) -> CBMap) -> Result<Self> {
        Self::new(sys, sys.group().elements().map(f).collect())
    }

    pub fn identity(sys: &DynamicalSystem) -> Self {
        let id = CBMap::identity(sys.algebra());
        Self::from_fn(sys, |_| id.clone()).expect("identity multiplier")
    }

    /// `F(t) = c_t · id`.
    pub fn scalar(sys: &DynamicalSystem, c: &[C64]) -> Result<Self> {
        if c.len() != sys.order() {
            return Err(Error::SystemMismatch(format!(
                "{} scalars for order {}",
                c.len(),
                sys.order()
            )));
        }
        let id = CBMap::identity(sys.algebra());
        Self::from_fn(sys, |t| id.scale(c[t]))
    }

    /// `F_φ(t)(a) = φ(t)a`.
    pub fn left_multiplication(sys: &DynamicalSystem, phi: &[AlgElement]) -> Result<Self> {
        if phi.len() != sys.order() {
            return Err(Error::SystemMismatch(format!(
                "{} values for order {}",
                phi.len(),
                sys.order()
            )));
        }
        for p in phi {
            sys.algebra().check(p)?;
        }
        let alg = sys.algebra();
        Self::from_fn(sys, |t| CBMap::from_fn(alg, alg, |a| phi[t].mul(a)))
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, t: usize) -> &CBMap {
        &self.values[t]
    }

    pub fn values(&self) -> &[CBMap] {
        &self.values
    }

    /// Elements where `F(t)` is nonzero beyond `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.order())
            .filter(|&t| !self.values[t].is_zero(tol))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            algebra: self.algebra.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            algebra: self.algebra.clone(),
            values: self.values.iter().map(|v| v.scale(s)).collect(),
        }
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.dist(b))
            .fold(0.0, f64::max)
    }

    fn check_system(&self, sys: &DynamicalSystem) -> Result<()> {
        if sys.order() != self.order() || sys.algebra() != &self.algebra {
            return Err(Error::SystemMismatch(
                "multiplier belongs to another system".into(),
            ));
        }
        Ok(())
    }

    /// `S_F`: `a_t ↦ F(t)(a_t)`.
    pub fn apply(&self, sys: &DynamicalSystem, x: &CrossedElement) -> Result<CrossedElement> {
        self.check_system(sys)?;
        if x.order() != self.order() || x.coeffs().iter().any(|c| sys.algebra().check(c).is_err()) {
            return Err(Error::SystemMismatch(
                "crossed element belongs to another system".into(),
            ));
        }
        Ok(x.map_coeffs(|t, a| self.values[t].apply(a)))
    }

    pub fn as_crossed_map(&self, sys: &DynamicalSystem) -> Result<CrossedMap> {
        self.check_system(sys)?;
        Ok(CrossedMap::from_fn(sys, |x| {
            x.map_coeffs(|t, a| self.values[t].apply(a))
        }))
    }

    /// `N(F)(s,t) = α_{s⁻¹} ∘ F(st⁻¹) ∘ α_s`.
    pub fn transfer_n(&self, sys: &DynamicalSystem) -> Result<SchurMultiplierFn> {
        self.check_system(sys)?;
        let g = sys.group();
        SchurMultiplierFn::from_fn(sys.algebra(), g.order(), |s, t| {
            let f = &self.values[g.mul(s, g.inv(t))];
            sys.alpha_map(g.inv(s)).compose(f).compose(sys.alpha_map(s))
        })
    }

    /// `max_{r,a} ‖F(r)(a)* − α_r(F(r⁻¹)(α_{r⁻¹}(a)*))‖` over the matrix-unit basis.
    pub fn hermitian_symmetry_residual(&self, sys: &DynamicalSystem) -> Result<f64> {
        self.check_system(sys)?;
        let g = sys.group();
        let mut worst = 0.0f64;
        for r in g.elements() {
            let rinv = g.inv(r);
            for a in self.algebra.basis() {
                let lhs = self.values[r].apply(&a).adjoint();
                let inner = sys.alpha(rinv, &a).adjoint();
                let rhs = sys.alpha(r, &self.values[rinv].apply(&inner));
                worst = worst.max(lhs.dist(&rhs));
            }
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    pub tol: f64,
    pub seed: u64,
    /// Matrix size `r` of the sampled positive elements of `M_r(A ⋊ G)`.
    pub amplification: usize,
    pub structured_samples: usize,
    pub dense_samples: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            tol: linalg::DEFAULT_TOL,
            seed: 0,
            amplification: 3,
            structured_samples: 12,
            dense_samples: 4,
        }
    }
}

impl CertifyOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct NormTriple {
    pub cb_sf: f64,
    pub cb_snf: f64,
    pub cb_fe: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CPVerdict {
    pub verdict: bool,
    pub route_positive_type: bool,
    pub route_sampling: bool,
    /// Smallest Choi eigenvalue of the block map assembled from `N(F)`.
    pub min_choi_eigenvalue: f64,
    pub samples: usize,
    pub dilation_dim: Option<usize>,
    pub factorization_residual: Option<f64>,
    pub norms: Option<NormTriple>,
}

/// Certifies complete positivity of `S_F` by three routes: positive type of
/// `N(F)`, sampled positive elements of `M_r(A ⋊ G)`, and reconstruction from
/// a Stinespring factorization. Any disagreement is an error.
pub fn certify_cp(
    sys: &DynamicalSystem,
    f: &HSMultiplier,
    opts: &CertifyOptions,
) -> Result<CPVerdict> {
    let n_f = f.transfer_n(sys)?;
    let psi = n_f.psi();
    let choi = psi.choi()?;
    let route_positive_type = choi.is_psd(opts.tol);
    let min_choi_eigenvalue = choi.min_eigenvalue();

    let (route_sampling, samples) = sampling_route(sys, f, opts)?;
    if route_positive_type != route_sampling {
        return Err(Error::RoutesDisagree(format!(
            "positive-type route says {route_positive_type}, sampling route says {route_sampling} \
             (min Choi eigenvalue {min_choi_eigenvalue:.3e})"
        )));
    }

    let mut verdict = CPVerdict {
        verdict: route_positive_type,
        route_positive_type,
        route_sampling,
        min_choi_eigenvalue,
        samples,
        dilation_dim: None,
        factorization_residual: None,
        norms: None,
    };
    if !route_positive_type {
        return Ok(verdict);
    }

    let st = n_f.stinespring_multi(opts.tol)?;
    let residual = n_f.factorization_residual(&st);
    let cb_fe = f.value(sys.identity()).apply(&sys.algebra().unit()).norm();
    let scale = cb_fe.max(1.0);
    if residual > opts.tol * scale {
        return Err(Error::RoutesDisagree(format!(
            "factorization residual {residual:.3e} exceeds tolerance"
        )));
    }
    let cb_sf = linalg::op_norm(&sys.synth(&f.apply(sys, &sys.unit())?));
    let cb_snf = n_f.image_of_unit().op_norm();
    if (cb_sf - cb_fe).abs() > opts.tol * scale || (cb_snf - cb_fe).abs() > opts.tol * scale {
        return Err(Error::RoutesDisagree(format!(
            "norms differ: S_F {cb_sf}, S_N(F) {cb_snf}, F(e) {cb_fe}"
        )));
    }
    verdict.dilation_dim = Some(st.dilation_dim);
    verdict.factorization_residual = Some(residual);
    verdict.norms = Some(NormTriple {
        cb_sf,
        cb_snf,
        cb_fe,
    });
    Ok(verdict)
}

fn sampling_route(
    sys: &DynamicalSystem,
    f: &HSMultiplier,
    opts: &CertifyOptions,
) -> Result<(bool, usize)> {
    sampled_positivity(sys, |x| f.apply(sys, x), opts)
}

/// Applies `map` entrywise to sampled `X = Y*Y ∈ M_r(A ⋊ G)` and tests the
/// image for positivity; returns the verdict and the number of samples
/// used. Structured samples use rows `y_i = Σ_t π(ι_k(u v_{i,t}*))λ_t`, which
/// probe each Choi block directly; dense samples use Gaussian `Y`.
pub fn sampled_positivity(
    sys: &DynamicalSystem,
    map: impl Fn(&CrossedElement) -> Result<CrossedElement>,
    opts: &CertifyOptions,
) -> Result<(bool, usize)> {
    let mut rng = random::rng(opts.seed);
    let alg = sys.algebra();
    let r = opts.amplification.max(1);
    let n = sys.order();
    let mut samples = 0;

    let check = |rows: &[Vec<CrossedElement>]| -> Result<bool> {
        // X_{ij} = Σ_k y_{ki}* y_{kj}
        let d = sys.crossed_rep_dim();
        let mut big = CMatrix::zeros(r * d, r * d);
        let stars: Vec<Vec<CrossedElement>> = rows
            .iter()
            .map(|row| row.iter().map(|y| sys.star(y)).collect())
            .collect();
        for i in 0..r {
            for j in i..r {
                let mut x = CrossedElement::zero(sys);
                for (row, srow) in rows.iter().zip(&stars) {
                    x = x.add(&sys.multiply(&srow[i], &row[j]));
                }
                let img = sys.synth(&map(&x)?);
                big.set_submatrix(i * d, j * d, &img);
                if i != j {
                    // the lower half gets its own image so that maps which do
                    // not preserve adjoints show up as non-hermitian
                    let mut xt = CrossedElement::zero(sys);
                    for (row, srow) in rows.iter().zip(&stars) {
                        xt = xt.add(&sys.multiply(&srow[j], &row[i]));
                    }
                    big.set_submatrix(j * d, i * d, &sys.synth(&map(&xt)?));
                }
            }
        }
        Ok(linalg::is_psd(&big, opts.tol).unwrap_or(false))
    };

    for idx in 0..opts.structured_samples {
        let k = idx % alg.num_blocks();
        let nk = alg.block_size(k);
        let u = random::unit_vec(&mut rng, nk);
        let row: Vec<CrossedElement> = (0..r)
            .map(|_| {
                let coeffs = (0..n)
                    .map(|_| {
                        let v = random::gaussian_vec(&mut rng, nk);
                        let block = CMatrix::from_fn(nk, nk, |p, q| u[p] * v[q].conj());
                        let mut blocks: Vec<CMatrix> =
                            alg.blocks().iter().map(|&m| CMatrix::zeros(m, m)).collect();
                        blocks[k] = block;
                        alg.element(blocks).expect("block shapes")
                    })
                    .collect();
                CrossedElement::new(sys, coeffs).expect("system shapes")
            })
            .collect();
        samples += 1;
        if !check(&[row])? {
            return Ok((false, samples));
        }
    }
    for _ in 0..opts.dense_samples {
        let rows: Vec<Vec<CrossedElement>> = (0..r)
            .map(|_| (0..r).map(|_| random_crossed(sys, &mut rng)).collect())
            .collect();
        samples += 1;
        if !check(&rows)? {
            return Ok((false, samples));
        }
    }
    Ok((true, samples))
}

pub fn random_crossed<R: Rng + ?Sized>(sys: &DynamicalSystem, rng: &mut R) -> CrossedElement {
    let coords = random::gaussian_vec(rng, sys.crossed_dim());
    CrossedElement::from_coords(sys, &coords)
}

/// Recovers `F` from a Schur multiplier on `G×G` whose `S_φ` leaves the
/// crossed product invariant: `F(s) = α_p ∘ φ(p,q) ∘ α_{p⁻¹}` for any
/// `pq⁻¹ = s`, which must not depend on the representative.
pub fn invariance_extract(
    sys: &DynamicalSystem,
    phi: &SchurMultiplierFn,
    tol: f64,
) -> Result<HSMultiplier> {
    let g = sys.group();
    let alg = sys.algebra();
    if phi.points() != g.order() || phi.algebra() != alg {
        return Err(Error::SystemMismatch(
            "multiplier is not indexed by the group".into(),
        ));
    }
    let basis = alg.basis();
    let scale = phi
        .values()
        .iter()
        .map(|v| v.action().max_abs())
        .fold(1.0, f64::max);
    let mut values = Vec::with_capacity(g.order());
    for s in g.elements() {
        let sinv = g.inv(s);
        let mut first: Option<CBMap> = None;
        for p in g.elements() {
            let q = g.mul(sinv, p);
            let mut action = CMatrix::zeros(alg.dim(), alg.dim());
            for (idx, a) in basis.iter().enumerate() {
                let img = phi.get(p, q).apply(&sys.alpha(g.inv(p), a));
                let inner = alg
                    .extract(img.block(0), tol * scale)
                    .map_err(|e| match e {
                        Error::NotInAlgebra(r) => Error::NotInvariant(r),
                        other => other,
                    })?;
                for (row, z) in sys.alpha(p, &inner).coords().into_iter().enumerate() {
                    action[(row, idx)] = z;
                }
            }
            let candidate = CBMap::new(alg.clone(), alg.clone(), action)?;
            match &first {
                None => first = Some(candidate),
                Some(f0) => {
                    let res = f0.dist(&candidate);
                    if res > tol * scale {
                        return Err(Error::NotInvariant(res));
                    }
                }
            }
        }
        values.push(first.expect("group is nonempty"));
    }
    HSMultiplier::new(sys, values)
}

/// `h_Φ(s)(a) = E(Φ(π(a)λ_s)λ_s*)`: the `s`-coefficient of `Φ(π(a)λ_s)`.
pub fn h_from_map(sys: &DynamicalSystem, phi: &CrossedMap) -> HSMultiplier {
    let k = sys.algebra().dim();
    let alg = sys.algebra();
    let values = sys
        .group()
        .elements()
        .map(|s| {
            let block = phi.matrix().submatrix(s * k, s * k, k, k);
            CBMap::new(alg.clone(), alg.clone(), block).expect("square block")
        })
        .collect();
    HSMultiplier::new(sys, values).expect("one value per element")
}

/// `h_F(s) = Σ_{p ∈ F ∩ sF} α_p ∘ Φ ∘ α_{p⁻¹}`.
pub fn build_hf(sys: &DynamicalSystem, fset: &[usize], phi: &CBMap) -> Result<HSMultiplier> {
    if fset.is_empty() {
        return Err(Error::EmptySet);
    }
    let g = sys.group();
    for &p in fset {
        g.check(p)?;
    }
    let alg = sys.algebra();
    if phi.source() != alg || phi.target() != alg {
        return Err(Error::AlgebraMismatch(
            "map must act on the system algebra".into(),
        ));
    }
    let mut member = vec![false; g.order()];
    for &p in fset {
        member[p] = true;
    }
    HSMultiplier::from_fn(sys, |s| {
        let sinv = g.inv(s);
        let mut acc = CBMap::zero(alg, alg);
        for p in g
            .elements()
            .filter(|&p| member[p] && member[g.mul(sinv, p)])
        {
            acc = acc.add(
                &sys.alpha_map(p)
                    .compose(phi)
                    .compose(sys.alpha_map(g.inv(p))),
            );
        }
        acc
    })
}

/// Positive definiteness in the Bédos-Conti sense, tested literally on the
/// tuple enumerating `G`: `a ↦ [α_{s_i}(T(s_i⁻¹s_j, α_{s_i⁻¹}(a)))]` must be
/// completely positive, i.e. positive on every `(a_i* a_j)`.
pub fn is_bc_pd(sys: &DynamicalSystem, t: &HSMultiplier, tol: f64) -> Result<bool> {
    t.check_system(sys)?;
    let g = sys.group();
    let psi = SchurMultiplierFn::from_fn(sys.algebra(), g.order(), |i, j| {
        let f = t.value(g.mul(g.inv(i), j));
        sys.alpha_map(i).compose(f).compose(sys.alpha_map(g.inv(i)))
    })?;
    Ok(psi.is_positive_type(tol))
}

fn block_matrix(sys: &DynamicalSystem, entry: impl Fn(usize, usize) -> AlgElement) -> CMatrix {
    let n = sys.order();
    let d = sys.algebra().rep_dim();
    let mut m = CMatrix::zeros(n * d, n * d);
    for i in 0..n {
        for j in 0..n {
            m.set_submatrix(i * d, j * d, &entry(i, j).embed());
        }
    }
    m
}

/// PSD test of `(α_{s_i}(φ(s_i⁻¹s_j)))_{i,j}` over the tuple enumerating `G`.
pub fn is_alpha_pd(sys: &DynamicalSystem, phi: &[AlgElement], tol: f64) -> Result<bool> {
    if phi.len() != sys.order() {
        return Err(Error::SystemMismatch(format!(
            "{} values for order {}",
            phi.len(),
            sys.order()
        )));
    }
    for p in phi {
        sys.algebra().check(p)?;
    }
    let g = sys.group();
    let m = block_matrix(sys, |i, j| sys.alpha(i, &phi[g.mul(g.inv(i), j)]));
    Ok(linalg::is_psd(&m, tol).unwrap_or(false))
}

/// PSD test of `(α_{s_j}(h(s_i⁻¹s_j)))_{i,j}` for centre-valued `h`.
pub fn is_dr_pd(sys: &DynamicalSystem, h: &[AlgElement], tol: f64) -> Result<bool> {
    if h.len() != sys.order() {
        return Err(Error::SystemMismatch(format!(
            "{} values for order {}",
            h.len(),
            sys.order()
        )));
    }
    for (t, v) in h.iter().enumerate() {
        sys.algebra().check(v)?;
        if !v.is_central(tol) {
            return Err(Error::NotCentral(format!("value at element {t}")));
        }
    }
    let g = sys.group();
    let m = block_matrix(sys, |i, j| sys.alpha(j, &h[g.mul(g.inv(i), j)]));
    Ok(linalg::is_psd(&m, tol).unwrap_or(false))
}
