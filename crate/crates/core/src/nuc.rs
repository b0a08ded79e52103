//! Finitely supported completely positive multipliers on the nuclear side:
//! amenable-action partitions of unity, the multipliers they induce, and
//! per-family diagnostics comparing pointwise and crossed-product deviations.

use serde::Serialize;

use crate::crossed::{CrossedElement, CrossedMap, DynamicalSystem};
use crate::error::{Error, Result};
use crate::fdcstar::{AlgElement, CBMap};
use crate::hsmult::{self, CPVerdict, CertifyOptions, HSMultiplier};
use crate::linalg::{self, C64};

/// Central positive `T: G → Z(A)⁺`, meant to satisfy `Σ_{t∈G} T(t)² = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmenableData {
    values: Vec<AlgElement>,
}

impl AmenableData {
    pub fn new(sys: &DynamicalSystem, values: Vec<AlgElement>, tol: f64) -> Result<Self> {
        if values.len() != sys.order() {
            return Err(Error::SystemMismatch(format!(
                "{} values for a group of order {}",
                values.len(),
                sys.order()
            )));
        }
        for (t, v) in values.iter().enumerate() {
            sys.algebra().check(v)?;
            let scalars = v
                .central_scalars(tol)
                .ok_or_else(|| Error::NotCentral(format!("T at element {t}")))?;
            if scalars.iter().any(|z| z.re < -tol || z.im.abs() > tol) {
                return Err(Error::NotPositive(format!("T at element {t}")));
            }
        }
        Ok(Self { values })
    }

    /// `T(t)` given by one scalar per block.
    pub fn from_scalars(sys: &DynamicalSystem, scalars: &[Vec<C64>], tol: f64) -> Result<Self> {
        let values = scalars
            .iter()
            .map(|s| sys.algebra().central(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sys, values, tol)
    }

    /// `T(t) = |G|^{-1/2}·1`.
    pub fn uniform(sys: &DynamicalSystem) -> Self {
        let w = (sys.order() as f64).sqrt().recip();
        let v = sys.algebra().unit().scale(C64::new(w, 0.0));
        Self {
            values: vec![v; sys.order()],
        }
    }

    /// `T = δ_e · 1`.
    pub fn delta_e(sys: &DynamicalSystem) -> Self {
        let mut values = vec![sys.algebra().zero(); sys.order()];
        values[sys.identity()] = sys.algebra().unit();
        Self { values }
    }

    pub fn values(&self) -> &[AlgElement] {
        &self.values
    }

    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&t| self.values[t].max_abs() > tol)
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AmenableCheck {
    /// `‖Σ_s T(s)² − 1‖`.
    pub sum_residual: f64,
    /// `‖Σ_s (T(s) − α_t(T(t⁻¹s)))*(T(s) − α_t(T(t⁻¹s)))‖` for each `t`.
    pub shift_defects: Vec<f64>,
}

pub fn check_amenable(sys: &DynamicalSystem, data: &AmenableData) -> Result<AmenableCheck> {
    if data.values.len() != sys.order() {
        return Err(Error::SystemMismatch(
            "data belongs to another system".into(),
        ));
    }
    let alg = sys.algebra();
    let g = sys.group();
    let mut sum = alg.zero();
    for v in &data.values {
        sum = sum.add(&v.mul(v));
    }
    let sum_residual = sum.dist(&alg.unit());
    let shift_defects = g
        .elements()
        .map(|t| {
            let mut acc = alg.zero();
            for s in g.elements() {
                let diff = data.values[s].sub(&sys.alpha(t, &data.values[g.mul(g.inv(t), s)]));
                acc = acc.add(&diff.adjoint().mul(&diff));
            }
            acc.norm()
        })
        .collect();
    Ok(AmenableCheck {
        sum_residual,
        shift_defects,
    })
}

/// `F(s)(a) = Σ_p T(p) α_p(Φ(α_{p⁻¹}(a))) α_s(T(s⁻¹p))`, the sum running over
/// `p ∈ supp T ∩ s·supp T`.
pub fn build_amenable_multiplier(
    sys: &DynamicalSystem,
    data: &AmenableData,
    phi: &CBMap,
    tol: f64,
) -> Result<HSMultiplier> {
    let alg = sys.algebra();
    if phi.source() != alg || phi.target() != alg {
        return Err(Error::AlgebraMismatch(
            "map must act on the system algebra".into(),
        ));
    }
    let choi = phi.choi()?;
    if !choi.is_psd(tol) {
        return Err(Error::NotCP {
            min_eig: choi.min_eigenvalue(),
        });
    }
    let unital = phi.unital_residual();
    if unital > tol {
        return Err(Error::NotUnital(unital));
    }
    let g = sys.group();
    let support = data.support(0.0);
    let mut in_support = vec![false; g.order()];
    for &p in &support {
        in_support[p] = true;
    }
    HSMultiplier::from_fn(sys, |s| {
        let sinv = g.inv(s);
        let terms: Vec<(usize, AlgElement)> = support
            .iter()
            .copied()
            .filter(|&p| in_support[g.mul(sinv, p)])
            .map(|p| (p, sys.alpha(s, &data.values[g.mul(sinv, p)])))
            .collect();
        CBMap::from_fn(alg, alg, |a| {
            let mut acc = alg.zero();
            for (p, right) in &terms {
                let inner = sys.alpha(*p, &phi.apply(&sys.alpha(g.inv(*p), a)));
                acc = acc.add(&data.values[*p].mul(&inner).mul(right));
            }
            acc
        })
    })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct NuclearityRow {
    pub name: String,
    pub support: Vec<usize>,
    pub support_size: usize,
    pub cp: bool,
    /// `‖F(e)(1)‖`, the cb norm of `F(e)` when it is completely positive.
    pub fe_norm: f64,
    pub norm_verdict: bool,
    /// Numerical rank of each `F(s)` as a linear map (cutoff `1e-9`).
    pub ranks: Vec<usize>,
    pub rank_bound: Option<usize>,
    pub rank_within_bound: Option<bool>,
    /// `max_{s, a} ‖F(s)(a) − a‖` over matrix units `a`.
    pub pointwise_deviation: f64,
    /// `max_x ‖S_F(x) − x‖` over crossed-product test elements.
    pub crossed_deviation: f64,
    /// Largest support among the crossed-product test elements.
    pub test_support: usize,
    /// Every test element obeys `‖S_F(x) − x‖ ≤ |supp x|·pointwise + 1e-9`.
    pub coupling_holds: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct NuclearityReport {
    pub rows: Vec<NuclearityRow>,
    pub notes: Vec<String>,
}

/// Crossed-product test elements: the basis `π(e_u)λ_t` and the
/// full-support sums `Σ_s π(e_u)λ_s`.
fn test_elements(sys: &DynamicalSystem) -> Vec<CrossedElement> {
    let alg = sys.algebra();
    let mut out = sys.crossed_basis();
    for e in alg.basis() {
        let coeffs = vec![e; sys.order()];
        out.push(CrossedElement::new(sys, coeffs).expect("system shapes"));
    }
    out
}

pub fn nuclearity_report(
    sys: &DynamicalSystem,
    family: &[(String, HSMultiplier, Option<usize>)],
    opts: &CertifyOptions,
) -> Result<NuclearityReport> {
    let alg = sys.algebra();
    let basis = alg.basis();
    let tests = test_elements(sys);
    let synths: Vec<_> = tests.iter().map(|x| sys.synth(x)).collect();
    let mut rows = Vec::with_capacity(family.len());
    for (name, f, rank_bound) in family {
        let support = f.support(opts.tol);
        let cp = hsmult::certify_cp(sys, f, opts)?.verdict;
        let fe_norm = f.value(sys.identity()).apply(&alg.unit()).norm();
        let ranks: Vec<usize> = f.values().iter().map(|v| v.rank(1e-9)).collect();
        let rank_within_bound = rank_bound.map(|b| ranks.iter().all(|&r| r <= b));

        let mut pointwise = 0.0f64;
        for v in f.values() {
            for a in &basis {
                pointwise = pointwise.max(v.apply(a).dist(a));
            }
        }
        let mut crossed = 0.0f64;
        let mut coupling_holds = true;
        let mut test_support = 0;
        for (x, xm) in tests.iter().zip(&synths) {
            let dev = linalg::op_norm(&(&sys.synth(&f.apply(sys, x)?) - xm));
            let e = x.support(0.0).len();
            test_support = test_support.max(e);
            crossed = crossed.max(dev);
            if dev > e as f64 * pointwise + 1e-9 {
                coupling_holds = false;
            }
        }
        rows.push(NuclearityRow {
            name: name.clone(),
            support_size: support.len(),
            support,
            cp,
            fe_norm,
            norm_verdict: fe_norm <= 1.0 + opts.tol,
            ranks,
            rank_bound: *rank_bound,
            rank_within_bound,
            pointwise_deviation: pointwise,
            crossed_deviation: crossed,
            test_support,
            coupling_holds,
        });
    }
    Ok(NuclearityReport {
        rows,
        notes: vec![
            "finite rank is automatic in finite dimensions; ranks are numerical with cutoff 1e-9"
                .into(),
            "deviation columns are finite diagnostics for a user-supplied family".into(),
        ],
    })
}

#[derive(Debug, Clone)]
pub struct Extracted {
    pub multiplier: HSMultiplier,
    pub support: Vec<usize>,
    /// Sampled complete positivity of the input map.
    pub map_cp: bool,
    pub verdict: Option<CPVerdict>,
    /// `‖Φ(1)‖`, the cb norm of `Φ` when it is completely positive.
    pub map_norm: f64,
    /// `‖h_Φ(e)(1)‖`.
    pub he_norm: f64,
}

/// `h_Φ` with its support `{t : h_Φ(t) ≠ 0}`; when `Φ` passes the sampled
/// positivity test the multiplier is certified as well.
pub fn extract_from_cp_approx(
    sys: &DynamicalSystem,
    phi: &CrossedMap,
    opts: &CertifyOptions,
) -> Result<Extracted> {
    let multiplier = hsmult::h_from_map(sys, phi);
    let support = multiplier.support(opts.tol);
    let (map_cp, _) = hsmult::sampled_positivity(sys, |x| Ok(phi.apply(sys, x)), opts)?;
    let verdict = if map_cp {
        Some(hsmult::certify_cp(sys, &multiplier, opts)?)
    } else {
        None
    };
    let map_norm = linalg::op_norm(&sys.synth(&phi.apply(sys, &sys.unit())));
    let he_norm = multiplier
        .value(sys.identity())
        .apply(&sys.algebra().unit())
        .norm();
    Ok(Extracted {
        multiplier,
        support,
        map_cp,
        verdict,
        map_norm,
        he_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{sys_a, sys_b};

    #[test]
    fn amenable_defects() {
        let sys = sys_b();
        let u = check_amenable(&sys, &AmenableData::uniform(&sys)).unwrap();
        assert!(u.sum_residual < 1e-14);
        assert!(u.shift_defects.iter().all(|&d| d < 1e-14));
        let d = check_amenable(&sys, &AmenableData::delta_e(&sys)).unwrap();
        assert!(d.sum_residual < 1e-14);
        assert!(d.shift_defects[0] < 1e-14);
        assert!(d.shift_defects[1..]
            .iter()
            .all(|&x| (x - 2.0).abs() < 1e-14));

        let sys = sys_a();
        let bad = vec![sys.algebra().matrix_unit(0, 0, 0); 2];
        assert!(matches!(
            AmenableData::new(&sys, bad, 1e-9),
            Err(Error::NotCentral(_))
        ));
        let neg = vec![sys.algebra().unit().scale(C64::new(-1.0, 0.0)); 2];
        assert!(matches!(
            AmenableData::new(&sys, neg, 1e-9),
            Err(Error::NotPositive(_))
        ));
    }

    #[test]
    fn uniform_identity_builds_identity() {
        let sys = sys_b();
        let f = build_amenable_multiplier(
            &sys,
            &AmenableData::uniform(&sys),
            &CBMap::identity(sys.algebra()),
            1e-9,
        )
        .unwrap();
        assert!(f.dist(&HSMultiplier::identity(&sys)) < 1e-12);
    }

    #[test]
    fn delta_e_gives_phi_at_e() {
        let sys = sys_a();
        let phi = CBMap::depolarizing(2);
        let f = build_amenable_multiplier(&sys, &AmenableData::delta_e(&sys), &phi, 1e-9).unwrap();
        assert!(f.value(0).dist(&phi) < 1e-14);
        assert!(f.value(1).is_zero(0.0));
        assert!(matches!(
            build_amenable_multiplier(
                &sys,
                &AmenableData::delta_e(&sys),
                &CBMap::transpose(2),
                1e-9
            ),
            Err(Error::NotCP { .. })
        ));
        assert!(matches!(
            build_amenable_multiplier(
                &sys,
                &AmenableData::delta_e(&sys),
                &CBMap::identity(sys.algebra()).scale_real(0.5),
                1e-9
            ),
            Err(Error::NotUnital(_))
        ));
    }

    #[test]
    fn report_flags_large_norm() {
        let sys = sys_a();
        let f = HSMultiplier::identity(&sys).scale(C64::new(2.0, 0.0));
        let fam = vec![
            ("id".to_string(), HSMultiplier::identity(&sys), None),
            ("double".to_string(), f, Some(4)),
        ];
        let rep = nuclearity_report(&sys, &fam, &CertifyOptions::default()).unwrap();
        assert!(rep.rows[0].norm_verdict && rep.rows[0].pointwise_deviation < 1e-15);
        assert!(!rep.rows[1].norm_verdict);
        assert!((rep.rows[1].fe_norm - 2.0).abs() < 1e-12);
        assert!(rep.rows.iter().all(|r| r.coupling_holds));
    }

    #[test]
    fn extraction_support() {
        let sys = sys_b();
        let ex = extract_from_cp_approx(
            &sys,
            &CrossedMap::expectation(&sys),
            &CertifyOptions::default(),
        )
        .unwrap();
        assert_eq!(ex.support, vec![0]);
        assert!(ex.map_cp && ex.verdict.unwrap().verdict);
        assert!(ex.he_norm <= ex.map_norm + 1e-12);
    }
}
