//! Finite groups acting on finite-dimensional C*-algebras and the reduced
//! crossed product, realized on `ℓ²(G) ⊗ C^d` through the regular covariant
//! pair `(π, λ)`.
//!
//! Conventions: `π(a)ξ(s) = α_{s⁻¹}(a)ξ(s)` and `λ_t ξ(s) = ξ(t⁻¹s)`, so the
//! `(s,s)` block of `π(a)` is `α_{s⁻¹}(a)` and `λ_t` moves block `s` to `ts`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fdcstar::{AlgElement, Algebra, CBMap, TracialState};
use crate::linalg::{CMatrix, C64};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Itemized list of violated group axioms; empty for a valid table.
    pub fn validate_table(table: &[Vec<usize>]) -> Vec<String> {
        let n = table.len();
        let mut issues = Vec::new();
        if n == 0 {
            issues.push("group must have at least one element".into());
            return issues;
        }
        for (s, row) in table.iter().enumerate() {
            if row.len() != n {
                issues.push(format!(
                    "row {s} of the multiplication table has {} entries, expected {n}",
                    row.len()
                ));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                issues.push(format!("row {s} contains out-of-range element {bad}"));
            }
        }
        if !issues.is_empty() {
            return issues;
        }
        let m = |a: usize, b: usize| table[a][b];
        'assoc: for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if m(m(a, b), c) != m(a, m(b, c)) {
                        issues.push(format!("associativity fails for ({a}, {b}, {c})"));
                        break 'assoc;
                    }
                }
            }
        }
        let identity = (0..n).find(|&e| (0..n).all(|s| m(e, s) == s && m(s, e) == s));
        match identity {
            None => issues.push("no two-sided identity element".into()),
            Some(e) => {
                for s in 0..n {
                    let left: Vec<usize> = (0..n).filter(|&t| m(t, s) == e).collect();
                    let right: Vec<usize> = (0..n).filter(|&t| m(s, t) == e).collect();
                    if left.len() != 1 || right.len() != 1 || left[0] != right[0] {
                        issues.push(format!("element {s} has no unique two-sided inverse"));
                    }
                }
            }
        }
        issues
    }

    pub fn from_table(table: &[Vec<usize>]) -> Result<Self> {
        let issues = Self::validate_table(table);
        if !issues.is_empty() {
            return Err(Error::InvalidSystem(issues));
        }
        let n = table.len();
        let mul: Vec<usize> = table.iter().flatten().copied().collect();
        let identity = (0..n)
            .find(|&e| (0..n).all(|s| mul[e * n + s] == s))
            .expect("validated identity");
        let inverse = (0..n)
            .map(|s| {
                (0..n)
                    .find(|&t| mul[s * n + t] == identity)
                    .expect("validated inverse")
            })
            .collect();
        Ok(Self {
            order: n,
            mul,
            identity,
            inverse,
        })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// `Z/n` with elements `0..n` and identity `0`.
    pub fn cyclic(n: usize) -> Self {
        let table: Vec<Vec<usize>> = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Self::from_table(&table).expect("cyclic group")
    }

    /// Symmetric group on `k` letters; elements are permutations in
    /// lexicographic order, product `(στ)(i) = σ(τ(i))`.
    pub fn symmetric(k: usize) -> Self {
        let perms = permutations(k);
        let index = |p: &Vec<usize>| perms.iter().position(|q| q == p).expect("permutation");
        let table: Vec<Vec<usize>> = perms
            .iter()
            .map(|s| {
                perms
                    .iter()
                    .map(|t| index(&(0..k).map(|i| s[t[i]]).collect()))
                    .collect()
            })
            .collect();
        Self::from_table(&table).expect("symmetric group")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, s: usize, t: usize) -> usize {
        self.mul[s * self.order + t]
    }

    pub fn inv(&self, s: usize) -> usize {
        self.inverse[s]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn check(&self, t: usize) -> Result<()> {
        if t < self.order {
            Ok(())
        } else {
            Err(Error::BadElement(t))
        }
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..k {
        for rest in permutations(k - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|x| if x >= first { x + 1 } else { x }));
            out.push(p);
        }
    }
    out
}

/// `a ↦ b` with `b_{perm[k]} = U_k a_k U_k*`.
#[derive(Debug, Clone, PartialEq)]
pub struct Automorphism {
    perm: Vec<usize>,
    unitaries: Vec<CMatrix>,
}

impl Automorphism {
    pub fn validate_parts(
        alg: &Algebra,
        perm: &[usize],
        unitaries: &[CMatrix],
        tol: f64,
    ) -> Vec<String> {
        let k = alg.num_blocks();
        let mut issues = Vec::new();
        if perm.len() != k || unitaries.len() != k {
            issues.push(format!(
                "automorphism has {} permutation entries and {} unitaries for {k} blocks",
                perm.len(),
                unitaries.len()
            ));
            return issues;
        }
        let mut seen = vec![false; k];
        for (i, &p) in perm.iter().enumerate() {
            if p >= k || seen[p] {
                issues.push(format!("block permutation {perm:?} is not a permutation"));
                return issues;
            }
            seen[p] = true;
            if alg.block_size(p) != alg.block_size(i) {
                issues.push(format!(
                    "block {i} (size {}) sent to block {p} (size {})",
                    alg.block_size(i),
                    alg.block_size(p)
                ));
            }
        }
        for (i, u) in unitaries.iter().enumerate() {
            let n = alg.block_size(i);
            if u.shape() != (n, n) {
                issues.push(format!(
                    "unitary {i} is {}x{}, expected {n}x{n}",
                    u.rows(),
                    u.cols()
                ));
            } else if !u.is_unitary(tol) {
                issues.push(format!("matrix {i} is not unitary"));
            }
        }
        issues
    }

    pub fn new(alg: &Algebra, perm: Vec<usize>, unitaries: Vec<CMatrix>, tol: f64) -> Result<Self> {
        let issues = Self::validate_parts(alg, &perm, &unitaries, tol);
        if !issues.is_empty() {
            return Err(Error::InvalidSystem(issues));
        }
        Ok(Self { perm, unitaries })
    }

    pub fn identity(alg: &Algebra) -> Self {
        Self {
            perm: (0..alg.num_blocks()).collect(),
            unitaries: alg.blocks().iter().map(|&n| CMatrix::identity(n)).collect(),
        }
    }

    /// `Ad u` on a single full block.
    pub fn inner(u: CMatrix) -> Self {
        Self {
            perm: vec![0],
            unitaries: vec![u],
        }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn unitaries(&self) -> &[CMatrix] {
        &self.unitaries
    }

    pub fn apply(&self, a: &AlgElement) -> AlgElement {
        let mut blocks: Vec<CMatrix> = a.blocks().to_vec();
        for (k, u) in self.unitaries.iter().enumerate() {
            blocks[self.perm[k]] = u.matmul(a.block(k)).matmul(&u.adjoint());
        }
        a.algebra()
            .element(blocks)
            .expect("size-preserving permutation")
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        let k = self.perm.len();
        let mut perm = vec![0; k];
        let mut unitaries = vec![CMatrix::zeros(0, 0); k];
        for b in 0..k {
            let mid = inner.perm[b];
            perm[b] = self.perm[mid];
            unitaries[b] = self.unitaries[mid].matmul(&inner.unitaries[b]);
        }
        Self { perm, unitaries }
    }

    pub fn inverse(&self) -> Self {
        let k = self.perm.len();
        let mut perm = vec![0; k];
        let mut unitaries = vec![CMatrix::zeros(0, 0); k];
        for b in 0..k {
            perm[self.perm[b]] = b;
            unitaries[self.perm[b]] = self.unitaries[b].adjoint();
        }
        Self { perm, unitaries }
    }

    pub fn as_map(&self, alg: &Algebra) -> CBMap {
        CBMap::from_fn(alg, alg, |a| self.apply(a))
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ValidationItem {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

/// Itemized invariant results for a candidate system.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SystemReport {
    pub items: Vec<ValidationItem>,
}

impl SystemReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    fn push(&mut self, check: &str, issues: Vec<String>) {
        self.items.push(ValidationItem {
            check: check.into(),
            passed: issues.is_empty(),
            detail: if issues.is_empty() {
                "ok".into()
            } else {
                issues.join("; ")
            },
        });
    }
}

/// `(A, G, α)` with an optional `α`-invariant faithful tracial state.
#[derive(Debug, Clone)]
pub struct DynamicalSystem {
    group: FiniteGroup,
    algebra: Algebra,
    action: Vec<Automorphism>,
    alpha_maps: Vec<CBMap>,
    trace: Option<TracialState>,
}

impl DynamicalSystem {
    /// Checks every invariant of a system, reporting each separately.
    pub fn validate(
        table: &[Vec<usize>],
        algebra: &Algebra,
        action: &[(Vec<usize>, Vec<CMatrix>)],
        trace_weights: Option<&[f64]>,
        tol: f64,
    ) -> SystemReport {
        let mut report = SystemReport { items: Vec::new() };
        let group_issues = FiniteGroup::validate_table(table);
        let group_ok = group_issues.is_empty();
        report.push("group laws", group_issues);

        let mut auto_issues = Vec::new();
        if group_ok && action.len() != table.len() {
            auto_issues.push(format!(
                "{} automorphisms for a group of order {}",
                action.len(),
                table.len()
            ));
        }
        for (t, (perm, us)) in action.iter().enumerate() {
            for issue in Automorphism::validate_parts(algebra, perm, us, tol) {
                auto_issues.push(format!("element {t}: {issue}"));
            }
        }
        let autos_ok = auto_issues.is_empty();
        report.push("automorphisms", auto_issues);

        let mut hom_issues = Vec::new();
        let mut maps = Vec::new();
        if group_ok && autos_ok {
            let g = FiniteGroup::from_table(table).expect("validated");
            let autos: Vec<Automorphism> = action
                .iter()
                .map(|(p, u)| Automorphism {
                    perm: p.clone(),
                    unitaries: u.clone(),
                })
                .collect();
            maps = autos.iter().map(|a| a.as_map(algebra)).collect();
            let id_res = maps[g.identity()].dist(&CBMap::identity(algebra));
            if id_res > tol {
                hom_issues.push(format!(
                    "alpha_e is not the identity (residual {id_res:.3e})"
                ));
            }
            'hom: for s in g.elements() {
                for t in g.elements() {
                    let res = maps[s].compose(&maps[t]).dist(&maps[g.mul(s, t)]);
                    if res > tol {
                        hom_issues.push(format!(
                            "alpha_{s} o alpha_{t} differs from alpha_{} (residual {res:.3e})",
                            g.mul(s, t)
                        ));
                        break 'hom;
                    }
                }
            }
        } else {
            hom_issues.push("skipped: group or automorphisms invalid".into());
        }
        report.push("homomorphism", hom_issues);

        if let Some(w) = trace_weights {
            let mut tr_issues = Vec::new();
            match TracialState::new(algebra, w.to_vec()) {
                Err(e) => tr_issues.push(e.to_string()),
                Ok(tau) => {
                    for (t, m) in maps.iter().enumerate() {
                        let worst = algebra
                            .basis()
                            .iter()
                            .map(|e| {
                                (tau.eval(&m.apply(e)).expect("same algebra")
                                    - tau.eval(e).expect("same algebra"))
                                .norm()
                            })
                            .fold(0.0, f64::max);
                        if worst > tol {
                            tr_issues.push(format!(
                                "trace not invariant under alpha_{t} (residual {worst:.3e})"
                            ));
                        }
                    }
                }
            }
            report.push("trace invariance", tr_issues);
        }
        report
    }

    pub fn new(
        group: FiniteGroup,
        algebra: Algebra,
        action: Vec<Automorphism>,
        trace: Option<TracialState>,
        tol: f64,
    ) -> Result<Self> {
        let parts: Vec<(Vec<usize>, Vec<CMatrix>)> = action
            .iter()
            .map(|a| (a.perm.clone(), a.unitaries.clone()))
            .collect();
        let weights = trace.as_ref().map(|t| t.weights().to_vec());
        if let Some(t) = &trace {
            if t.algebra() != &algebra {
                return Err(Error::AlgebraMismatch(
                    "trace lives on another algebra".into(),
                ));
            }
        }
        let report = Self::validate(&group.table(), &algebra, &parts, weights.as_deref(), tol);
        if !report.passed() {
            let issues = report
                .items
                .into_iter()
                .filter(|i| !i.passed)
                .map(|i| format!("{}: {}", i.check, i.detail))
                .collect();
            return Err(Error::InvalidSystem(issues));
        }
        let alpha_maps = action.iter().map(|a| a.as_map(&algebra)).collect();
        Ok(Self {
            group,
            algebra,
            action,
            alpha_maps,
            trace,
        })
    }

    pub fn trivial_action(
        group: FiniteGroup,
        algebra: Algebra,
        trace: Option<TracialState>,
    ) -> Self {
        let action = vec![Automorphism::identity(&algebra); group.order()];
        Self::new(group, algebra, action, trace, 1e-10).expect("trivial action is valid")
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn action(&self) -> &[Automorphism] {
        &self.action
    }

    pub fn trace(&self) -> Option<&TracialState> {
        self.trace.as_ref()
    }

    pub fn require_trace(&self) -> Result<&TracialState> {
        self.trace.as_ref().ok_or(Error::NoTrace)
    }

    pub fn with_trace(mut self, trace: TracialState, tol: f64) -> Result<Self> {
        let sys = Self::new(
            self.group.clone(),
            self.algebra.clone(),
            self.action.clone(),
            Some(trace),
            tol,
        )?;
        self.trace = sys.trace;
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn identity(&self) -> usize {
        self.group.identity()
    }

    /// Dimension of the crossed product, `|G|·dim A`.
    pub fn crossed_dim(&self) -> usize {
        self.order() * self.algebra.dim()
    }

    /// Size of the matrices realizing the crossed product, `|G|·d`.
    pub fn crossed_rep_dim(&self) -> usize {
        self.order() * self.algebra.rep_dim()
    }

    pub fn alpha(&self, t: usize, a: &AlgElement) -> AlgElement {
        self.alpha_maps[t].apply(a)
    }

    pub fn alpha_map(&self, t: usize) -> &CBMap {
        &self.alpha_maps[t]
    }

    pub fn rep_pi(&self, a: &AlgElement) -> CMatrix {
        let parts: Vec<CMatrix> = self
            .group
            .elements()
            .map(|s| self.alpha(self.group.inv(s), a).embed())
            .collect();
        CMatrix::direct_sum(&parts)
    }

    pub fn rep_lambda(&self, t: usize) -> Result<CMatrix> {
        self.group.check(t)?;
        let d = self.algebra.rep_dim();
        let n = self.order();
        let mut m = CMatrix::zeros(n * d, n * d);
        for s in 0..n {
            m.set_submatrix(self.group.mul(t, s) * d, s * d, &CMatrix::identity(d));
        }
        Ok(m)
    }

    /// `π̃(x) = Σ_t π(a_t) λ_t`, assembled blockwise:
    /// the `(p,q)` block is `α_{p⁻¹}(a_{pq⁻¹})`.
    pub fn synth(&self, x: &CrossedElement) -> CMatrix {
        let d = self.algebra.rep_dim();
        let n = self.order();
        let mut m = CMatrix::zeros(n * d, n * d);
        for p in 0..n {
            let pinv = self.group.inv(p);
            for q in 0..n {
                let t = self.group.mul(p, self.group.inv(q));
                let c = x.coeff(t);
                if c.max_abs() > 0.0 {
                    m.set_submatrix(p * d, q * d, &self.alpha(pinv, c).embed());
                }
            }
        }
        m
    }

    fn block(&self, x: &CMatrix, p: usize, q: usize) -> CMatrix {
        let d = self.algebra.rep_dim();
        x.submatrix(p * d, q * d, d, d)
    }

    fn check_shape(&self, x: &CMatrix) -> Result<()> {
        let nd = self.crossed_rep_dim();
        if x.shape() != (nd, nd) {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} operator, crossed product acts on C^{nd}",
                x.rows(),
                x.cols()
            )));
        }
        Ok(())
    }

    /// `E(X)`: reads `a` off the diagonal blocks `X_{t,t} = α_{t⁻¹}(a)`,
    /// which must agree for every `t`.
    pub fn cond_exp(&self, x: &CMatrix, tol: f64) -> Result<AlgElement> {
        self.check_shape(x)?;
        let scale = x.max_abs().max(1.0);
        let mut first: Option<AlgElement> = None;
        for t in self.group.elements() {
            let diag = self
                .algebra
                .extract(&self.block(x, t, t), tol)
                .map_err(|_| {
                    Error::NotInCrossedProduct(format!("diagonal block {t} leaves the algebra"))
                })?;
            let a = self.alpha(t, &diag);
            match &first {
                None => first = Some(a),
                Some(a0) => {
                    let res = a.coord_dist(a0);
                    if res > tol * scale {
                        return Err(Error::NotInCrossedProduct(format!(
                            "diagonal blocks inconsistent at element {t} (residual {res:.3e})"
                        )));
                    }
                }
            }
        }
        Ok(first.expect("group is nonempty"))
    }

    /// `E_t(X) = E(X λ_t*)`.
    pub fn fourier_coeff(&self, x: &CMatrix, t: usize, tol: f64) -> Result<AlgElement> {
        let lam = self.rep_lambda(t)?;
        self.cond_exp(&x.matmul(&lam.adjoint()), tol)
    }

    /// All Fourier coefficients, with a reconstruction check so that
    /// operators outside the crossed product are rejected.
    pub fn analyze(&self, x: &CMatrix, tol: f64) -> Result<CrossedElement> {
        self.check_shape(x)?;
        let n = self.order();
        let d = self.algebra.rep_dim();
        // X λ_t* has (p,p) block X_{p, t⁻¹p}; read coefficients directly.
        let mut coeffs = Vec::with_capacity(n);
        let scale = x.max_abs().max(1.0);
        for t in 0..n {
            let tinv = self.group.inv(t);
            let mut first: Option<AlgElement> = None;
            for p in 0..n {
                let q = self.group.mul(tinv, p);
                let blk = x.submatrix(p * d, q * d, d, d);
                let inner = self.algebra.extract(&blk, tol).map_err(|_| {
                    Error::NotInCrossedProduct(format!("block ({p},{q}) leaves the algebra"))
                })?;
                let a = self.alpha(p, &inner);
                match &first {
                    None => first = Some(a),
                    Some(a0) => {
                        let res = a.coord_dist(a0);
                        if res > tol * scale {
                            return Err(Error::NotInCrossedProduct(format!(
                                "translation formula fails at block ({p},{q}) (residual {res:.3e})"
                            )));
                        }
                    }
                }
            }
            coeffs.push(first.expect("group is nonempty"));
        }
        Ok(CrossedElement { coeffs })
    }

    /// `max_{p,q} ‖X_{p,q} − α_{p⁻¹}(X_{e,qp⁻¹})‖` (entrywise max).
    pub fn translation_residual(&self, x: &CMatrix) -> Result<f64> {
        self.check_shape(x)?;
        let e = self.identity();
        let mut worst = 0.0f64;
        for p in self.group.elements() {
            let pinv = self.group.inv(p);
            for q in self.group.elements() {
                let src = self.block(x, e, self.group.mul(q, pinv));
                let a = self.algebra.extract(&src, f64::INFINITY)?;
                let expected = self.alpha(pinv, &a).embed();
                worst = worst.max(self.block(x, p, q).dist(&expected));
                // mass outside the algebra's block pattern counts too
                worst = worst.max(self.algebra.off_block_residual(&self.block(x, p, q)));
            }
        }
        Ok(worst)
    }

    /// `(xy)_u = Σ_s a_s α_s(b_{s⁻¹u})`.
    pub fn multiply(&self, x: &CrossedElement, y: &CrossedElement) -> CrossedElement {
        let mut coeffs: Vec<AlgElement> = vec![self.algebra.zero(); self.order()];
        for s in self.group.elements() {
            if x.coeff(s).max_abs() == 0.0 {
                continue;
            }
            let sinv = self.group.inv(s);
            for u in self.group.elements() {
                let b = y.coeff(self.group.mul(sinv, u));
                if b.max_abs() == 0.0 {
                    continue;
                }
                let term = x.coeff(s).mul(&self.alpha(s, b));
                coeffs[u] = coeffs[u].add(&term);
            }
        }
        CrossedElement { coeffs }
    }

    /// `(x*)_u = α_u(a_{u⁻¹}*)`.
    pub fn star(&self, x: &CrossedElement) -> CrossedElement {
        let coeffs = self
            .group
            .elements()
            .map(|u| self.alpha(u, &x.coeff(self.group.inv(u)).adjoint()))
            .collect();
        CrossedElement { coeffs }
    }

    pub fn unit(&self) -> CrossedElement {
        CrossedElement::single(self, self.identity(), self.algebra.unit())
    }

    /// Basis `π(e_u)λ_t`, indexed `t·dim A + u`.
    pub fn crossed_basis(&self) -> Vec<CrossedElement> {
        let basis = self.algebra.basis();
        self.group
            .elements()
            .flat_map(|t| basis.iter().map(move |e| (t, e.clone())))
            .map(|(t, e)| CrossedElement::single(self, t, e))
            .collect()
    }
}

/// `x ~ Σ_t π(a_t)λ_t`, stored as its coefficients `(a_t)_{t∈G}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossedElement {
    coeffs: Vec<AlgElement>,
}

impl CrossedElement {
    pub fn new(sys: &DynamicalSystem, coeffs: Vec<AlgElement>) -> Result<Self> {
        if coeffs.len() != sys.order() {
            return Err(Error::SystemMismatch(format!(
                "{} coefficients for a group of order {}",
                coeffs.len(),
                sys.order()
            )));
        }
        for c in &coeffs {
            sys.algebra()
                .check(c)
                .map_err(|e| Error::SystemMismatch(e.to_string()))?;
        }
        Ok(Self { coeffs })
    }

    pub fn zero(sys: &DynamicalSystem) -> Self {
        Self {
            coeffs: vec![sys.algebra().zero(); sys.order()],
        }
    }

    /// `π(a)λ_t`.
    pub fn single(sys: &DynamicalSystem, t: usize, a: AlgElement) -> Self {
        let mut x = Self::zero(sys);
        x.coeffs[t] = a;
        x
    }

    pub fn from_coords(sys: &DynamicalSystem, coords: &[C64]) -> Self {
        let k = sys.algebra().dim();
        assert_eq!(coords.len(), sys.crossed_dim(), "coordinate count");
        Self {
            coeffs: coords
                .chunks(k)
                .map(|c| sys.algebra().element_from_coords(c))
                .collect(),
        }
    }

    pub fn coeffs(&self) -> &[AlgElement] {
        &self.coeffs
    }

    pub fn coeff(&self, t: usize) -> &AlgElement {
        &self.coeffs[t]
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coords(&self) -> Vec<C64> {
        self.coeffs.iter().flat_map(AlgElement::coords).collect()
    }

    /// Group elements carrying a nonzero coefficient.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.order())
            .filter(|&t| self.coeffs[t].max_abs() > tol)
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a.scale(s)).collect(),
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(usize, &AlgElement) -> AlgElement) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(t, a)| f(t, a))
                .collect(),
        }
    }
}

/// A linear map of the crossed product into itself, as a matrix on
/// crossed-product coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossedMap {
    matrix: CMatrix,
}

impl CrossedMap {
    pub fn new(sys: &DynamicalSystem, matrix: CMatrix) -> Result<Self> {
        let n = sys.crossed_dim();
        if matrix.shape() != (n, n) {
            return Err(Error::ShapeMismatch(format!(
                "crossed map is {}x{}, expected {n}x{n}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn from_fn(sys: &DynamicalSystem, f: impl Fn(&CrossedElement) -> CrossedElement) -> Self {
        let n = sys.crossed_dim();
        let mut matrix = CMatrix::zeros(n, n);
        for (idx, x) in sys.crossed_basis().iter().enumerate() {
            for (r, z) in f(x).coords().into_iter().enumerate() {
                matrix[(r, idx)] = z;
            }
        }
        Self { matrix }
    }

    /// Lifts a map given on concrete operators; each image must lie in the
    /// crossed product.
    pub fn from_operator_fn(
        sys: &DynamicalSystem,
        f: impl Fn(&CMatrix) -> CMatrix,
        tol: f64,
    ) -> Result<Self> {
        let n = sys.crossed_dim();
        let mut matrix = CMatrix::zeros(n, n);
        for (idx, x) in sys.crossed_basis().iter().enumerate() {
            let img = sys.analyze(&f(&sys.synth(x)), tol)?;
            for (r, z) in img.coords().into_iter().enumerate() {
                matrix[(r, idx)] = z;
            }
        }
        Ok(Self { matrix })
    }

    pub fn identity(sys: &DynamicalSystem) -> Self {
        Self {
            matrix: CMatrix::identity(sys.crossed_dim()),
        }
    }

    /// `π∘E`: keeps the coefficient at the identity.
    pub fn expectation(sys: &DynamicalSystem) -> Self {
        let e = sys.identity();
        Self::from_fn(sys, |x| CrossedElement::single(sys, e, x.coeff(e).clone()))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, sys: &DynamicalSystem, x: &CrossedElement) -> CrossedElement {
        CrossedElement::from_coords(sys, &self.matrix.mul_vec(&x.coords()))
    }

    pub fn compose(&self, inner: &Self) -> Self {
        Self {
            matrix: self.matrix.matmul(&inner.matrix),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            matrix: self.matrix.scale(s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    fn sigma_x() -> CMatrix {
        CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
    }

    fn sys_a() -> DynamicalSystem {
        let alg = Algebra::full(2);
        let action = vec![Automorphism::identity(&alg), Automorphism::inner(sigma_x())];
        let tau = TracialState::normalized(&alg);
        DynamicalSystem::new(FiniteGroup::cyclic(2), alg, action, Some(tau), 1e-10).unwrap()
    }

    #[test]
    fn group_tables() {
        let g = FiniteGroup::symmetric(3);
        assert_eq!(g.order(), 6);
        assert!(FiniteGroup::validate_table(&g.table()).is_empty());
        // non-abelian
        assert!(g
            .elements()
            .any(|s| g.elements().any(|t| g.mul(s, t) != g.mul(t, s))));
        let broken = vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 2, 0]];
        let issues = FiniteGroup::validate_table(&broken);
        assert!(issues.iter().any(|i| i.contains("associativity")));
    }

    #[test]
    fn automorphism_algebra() {
        let alg = Algebra::new(vec![1, 2, 1]).unwrap();
        let u = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let a = Automorphism::new(
            &alg,
            vec![2, 1, 0],
            vec![CMatrix::identity(1), u, CMatrix::identity(1)],
            1e-12,
        )
        .unwrap();
        let x =
            alg.element_from_coords(&(0..6).map(|i| C64::new(i as f64, 1.0)).collect::<Vec<_>>());
        let back = a.inverse().apply(&a.apply(&x));
        assert!(back.coord_dist(&x) < 1e-14);
        let twice = a.compose(&a).apply(&x);
        assert!(twice.coord_dist(&a.apply(&a.apply(&x))) < 1e-14);
        assert!(Automorphism::new(&alg, vec![1, 0, 2], a.unitaries().to_vec(), 1e-12).is_err());
    }

    #[test]
    fn pi_and_lambda_examples() {
        let sys = sys_a();
        assert_eq!(sys.rep_pi(&sys.algebra().unit()), CMatrix::identity(4));
        assert_eq!(sys.rep_lambda(0).unwrap(), CMatrix::identity(4));
        assert!(matches!(sys.rep_lambda(2), Err(Error::BadElement(2))));

        let triv = DynamicalSystem::trivial_action(FiniteGroup::cyclic(3), Algebra::full(2), None);
        let a = Algebra::full(2).element(vec![sigma_x()]).unwrap();
        assert_eq!(triv.rep_pi(&a), CMatrix::identity(3).kron(&sigma_x()));
    }

    #[test]
    fn synth_examples() {
        let sys = sys_a();
        let alg = sys.algebra().clone();
        let a = alg.matrix_unit(0, 0, 1);
        let x = CrossedElement::single(&sys, 0, a.clone());
        assert_eq!(sys.synth(&x), sys.rep_pi(&a));
        let lam = CrossedElement::single(&sys, 1, alg.unit());
        assert_eq!(sys.synth(&lam), sys.rep_lambda(1).unwrap());
    }

    #[test]
    fn cond_exp_examples() {
        let sys = sys_a();
        let alg = sys.algebra().clone();
        let a = alg
            .element(vec![CMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0])])
            .unwrap();
        let x = sys.synth(&CrossedElement::single(&sys, 0, a.clone()));
        assert!(sys.cond_exp(&x, 1e-10).unwrap().coord_dist(&a) < 1e-14);
        let lam = sys.rep_lambda(1).unwrap();
        assert!(sys.cond_exp(&lam, 1e-10).unwrap().max_abs() < 1e-14);
        assert_eq!(sys.fourier_coeff(&lam, 1, 1e-10).unwrap(), alg.unit());

        let mut bad = CMatrix::identity(4);
        bad[(0, 0)] = C64::new(5.0, 0.0);
        assert!(matches!(
            sys.cond_exp(&bad, 1e-10),
            Err(Error::NotInCrossedProduct(_))
        ));
        let mut off = CMatrix::zeros(4, 4);
        off[(0, 2)] = ONE;
        assert!(sys.analyze(&off, 1e-10).is_err());
        assert!(sys.translation_residual(&off).unwrap() > 0.5);
    }
}
