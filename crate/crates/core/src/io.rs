//! JSON wire formats. Complex numbers are `[re, im]` pairs and matrices are
//! lists of rows. Map actions are dense matrices over matrix-unit
//! coordinates (blocks in order, row-major inside a block).

use serde::{Deserialize, Serialize};

use crate::crossed::{Automorphism, CrossedElement, DynamicalSystem, FiniteGroup, SystemReport};
use crate::error::{Error, Result};
use crate::fdcstar::{AlgElement, Algebra, CBMap, TracialState};
use crate::hsmult::HSMultiplier;
use crate::linalg::{CMatrix, C64};
use crate::nuc::AmenableData;
use crate::schur::SchurMultiplierFn;

pub type MatrixWire = Vec<Vec<C64>>;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub order: usize,
    pub mul_table: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub blocks: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AutomorphismSpec {
    pub perm: Vec<usize>,
    pub unitaries: Vec<MatrixWire>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TraceSpec {
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub group: GroupSpec,
    pub algebra: AlgebraSpec,
    pub action: Vec<AutomorphismSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CBMapFile {
    pub source: AlgebraSpec,
    pub target: AlgebraSpec,
    pub action: MatrixWire,
}

/// One entry of a multiplier file; elements left out are zero.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MultiplierEntry {
    pub element: usize,
    pub action: MatrixWire,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PhiFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraSpec>,
    pub points: usize,
    /// `values[x][y]` is the action of `φ(x,y)`, into `A` or into `M_d`.
    pub values: Vec<Vec<MatrixWire>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FamilyMember {
    pub name: String,
    pub multiplier: Vec<MultiplierEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_bound: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub members: Vec<FamilyMember>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum CentralValue {
    Scalars { scalars: Vec<f64> },
    Blocks { blocks: Vec<MatrixWire> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AmenableEntry {
    pub element: usize,
    #[serde(flatten)]
    pub value: CentralValue,
}

/// One coefficient `a_t` of a crossed-product element `Σ_t π(a_t)λ_t`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CrossedEntry {
    pub element: usize,
    pub blocks: Vec<MatrixWire>,
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Invalid(format!("cannot parse {what}: {e}")))
}

pub fn matrix_from_wire(rows: &MatrixWire) -> Result<CMatrix> {
    CMatrix::from_rows(rows)
}

pub fn matrix_to_wire(m: &CMatrix) -> MatrixWire {
    m.to_rows()
}

fn algebra_from_spec(spec: &AlgebraSpec) -> Result<Algebra> {
    Algebra::new(spec.blocks.clone())
}

pub fn element_from_wire(alg: &Algebra, blocks: &[MatrixWire]) -> Result<AlgElement> {
    let blocks = blocks
        .iter()
        .map(matrix_from_wire)
        .collect::<Result<Vec<_>>>()?;
    alg.element(blocks)
}

pub fn element_to_wire(a: &AlgElement) -> Vec<MatrixWire> {
    a.blocks().iter().map(matrix_to_wire).collect()
}

/// A parsed system file together with its itemized validation.
pub struct LoadedSystem {
    pub file: SystemFile,
    pub algebra: Algebra,
    pub report: SystemReport,
}

impl LoadedSystem {
    pub fn build(&self, tol: f64) -> Result<DynamicalSystem> {
        let group = FiniteGroup::from_table(&self.file.group.mul_table)?;
        let action = self
            .file
            .action
            .iter()
            .map(|a| {
                let us = a
                    .unitaries
                    .iter()
                    .map(matrix_from_wire)
                    .collect::<Result<Vec<_>>>()?;
                Automorphism::new(&self.algebra, a.perm.clone(), us, tol)
            })
            .collect::<Result<Vec<_>>>()?;
        let trace = self
            .file
            .trace
            .as_ref()
            .map(|t| TracialState::new(&self.algebra, t.weights.clone()))
            .transpose()?;
        DynamicalSystem::new(group, self.algebra.clone(), action, trace, tol)
    }
}

/// Parses a system file and validates it; malformed input is an error,
/// violated invariants are recorded in the report.
pub fn load_system(text: &str, tol: f64) -> Result<LoadedSystem> {
    let file: SystemFile = parse(text, "system file")?;
    let algebra = algebra_from_spec(&file.algebra)?;
    if file.group.order != file.group.mul_table.len() {
        return Err(Error::Invalid(format!(
            "group order {} but the table has {} rows",
            file.group.order,
            file.group.mul_table.len()
        )));
    }
    let action = file
        .action
        .iter()
        .map(|a| {
            let us = a
                .unitaries
                .iter()
                .map(matrix_from_wire)
                .collect::<Result<Vec<_>>>()?;
            Ok((a.perm.clone(), us))
        })
        .collect::<Result<Vec<_>>>()?;
    let weights = file.trace.as_ref().map(|t| t.weights.clone());
    let report = DynamicalSystem::validate(
        &file.group.mul_table,
        &algebra,
        &action,
        weights.as_deref(),
        tol,
    );
    Ok(LoadedSystem {
        file,
        algebra,
        report,
    })
}

pub fn parse_system(text: &str, tol: f64) -> Result<DynamicalSystem> {
    load_system(text, tol)?.build(tol)
}

pub fn system_to_file(sys: &DynamicalSystem) -> SystemFile {
    SystemFile {
        group: GroupSpec {
            order: sys.order(),
            mul_table: sys.group().table(),
        },
        algebra: AlgebraSpec {
            blocks: sys.algebra().blocks().to_vec(),
        },
        action: sys
            .action()
            .iter()
            .map(|a| AutomorphismSpec {
                perm: a.perm().to_vec(),
                unitaries: a.unitaries().iter().map(matrix_to_wire).collect(),
            })
            .collect(),
        trace: sys.trace().map(|t| TraceSpec {
            weights: t.weights().to_vec(),
        }),
    }
}

pub fn parse_cbmap(text: &str) -> Result<CBMap> {
    let file: CBMapFile = parse(text, "map file")?;
    CBMap::new(
        algebra_from_spec(&file.source)?,
        algebra_from_spec(&file.target)?,
        matrix_from_wire(&file.action)?,
    )
}

pub fn cbmap_to_file(map: &CBMap) -> CBMapFile {
    CBMapFile {
        source: AlgebraSpec {
            blocks: map.source().blocks().to_vec(),
        },
        target: AlgebraSpec {
            blocks: map.target().blocks().to_vec(),
        },
        action: matrix_to_wire(map.action()),
    }
}

pub fn multiplier_from_entries(
    sys: &DynamicalSystem,
    entries: &[MultiplierEntry],
) -> Result<HSMultiplier> {
    let alg = sys.algebra();
    let mut values = vec![CBMap::zero(alg, alg); sys.order()];
    let mut seen = vec![false; sys.order()];
    for e in entries {
        sys.group().check(e.element)?;
        if std::mem::replace(&mut seen[e.element], true) {
            return Err(Error::Invalid(format!(
                "element {} listed twice",
                e.element
            )));
        }
        values[e.element] = CBMap::new(alg.clone(), alg.clone(), matrix_from_wire(&e.action)?)?;
    }
    HSMultiplier::new(sys, values)
}

pub fn parse_multiplier(sys: &DynamicalSystem, text: &str) -> Result<HSMultiplier> {
    let entries: Vec<MultiplierEntry> = parse(text, "multiplier file")?;
    multiplier_from_entries(sys, &entries)
}

/// Entries for the support of `f` (zero values omitted).
pub fn multiplier_to_entries(f: &HSMultiplier) -> Vec<MultiplierEntry> {
    f.values()
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero(0.0))
        .map(|(t, v)| MultiplierEntry {
            element: t,
            action: matrix_to_wire(v.action()),
        })
        .collect()
}

/// `algebra` may be omitted from the file when a system supplies it.
pub fn parse_phi(text: &str, fallback: Option<&Algebra>) -> Result<SchurMultiplierFn> {
    let file: PhiFile = parse(text, "multiplier file")?;
    let alg = match (&file.algebra, fallback) {
        (Some(spec), _) => algebra_from_spec(spec)?,
        (None, Some(a)) => a.clone(),
        (None, None) => return Err(Error::Invalid("multiplier file names no algebra".into())),
    };
    let m = file.points;
    if file.values.len() != m || file.values.iter().any(|r| r.len() != m) {
        return Err(Error::ShapeMismatch(format!(
            "values must be a {m}x{m} array"
        )));
    }
    let d = alg.rep_dim();
    let full = Algebra::full(d);
    let mut values = Vec::with_capacity(m * m);
    for row in &file.values {
        for wire in row {
            let action = matrix_from_wire(wire)?;
            let target = if action.rows() == full.dim() {
                full.clone()
            } else {
                alg.clone()
            };
            values.push(CBMap::new(alg.clone(), target, action)?);
        }
    }
    SchurMultiplierFn::new(&alg, m, values)
}

pub fn parse_family(
    sys: &DynamicalSystem,
    text: &str,
) -> Result<Vec<(String, HSMultiplier, Option<usize>)>> {
    let file: FamilyFile = parse(text, "family file")?;
    file.members
        .iter()
        .map(|m| {
            Ok((
                m.name.clone(),
                multiplier_from_entries(sys, &m.multiplier)?,
                m.rank_bound,
            ))
        })
        .collect()
}

/// Elements left out of the file get `T(t) = 0`.
pub fn parse_amenable(sys: &DynamicalSystem, text: &str, tol: f64) -> Result<AmenableData> {
    let entries: Vec<AmenableEntry> = parse(text, "amenable data file")?;
    let alg = sys.algebra();
    let mut values = vec![alg.zero(); sys.order()];
    for e in &entries {
        sys.group().check(e.element)?;
        values[e.element] = match &e.value {
            CentralValue::Scalars { scalars } => {
                let zs: Vec<C64> = scalars.iter().map(|&x| C64::new(x, 0.0)).collect();
                alg.central(&zs)?
            }
            CentralValue::Blocks { blocks } => element_from_wire(alg, blocks)?,
        };
    }
    AmenableData::new(sys, values, tol)
}

/// Coefficients left out of the file are zero.
pub fn parse_crossed_element(sys: &DynamicalSystem, text: &str) -> Result<CrossedElement> {
    let entries: Vec<CrossedEntry> = parse(text, "crossed element file")?;
    let mut coeffs = vec![sys.algebra().zero(); sys.order()];
    let mut seen = vec![false; sys.order()];
    for e in &entries {
        sys.group().check(e.element)?;
        if std::mem::replace(&mut seen[e.element], true) {
            return Err(Error::Invalid(format!(
                "element {} listed twice",
                e.element
            )));
        }
        coeffs[e.element] = element_from_wire(sys.algebra(), &e.blocks)?;
    }
    CrossedElement::new(sys, coeffs)
}

pub fn crossed_to_entries(x: &CrossedElement) -> Vec<CrossedEntry> {
    x.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.max_abs() > 0.0)
        .map(|(t, a)| CrossedEntry {
            element: t,
            blocks: element_to_wire(a),
        })
        .collect()
}

/// Deterministic pretty JSON.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable report")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{sys_a, sys_b};

    #[test]
    fn system_round_trip() {
        for sys in [sys_a(), sys_b()] {
            let text = to_json(&system_to_file(&sys));
            let back = parse_system(&text, 1e-10).unwrap();
            assert_eq!(back.group(), sys.group());
            assert_eq!(back.algebra(), sys.algebra());
            assert_eq!(back.action(), sys.action());
        }
    }

    #[test]
    fn complex_encoding_is_pairs() {
        let text = r#"{"source":{"blocks":[1]},"target":{"blocks":[1]},"action":[[[0.5,-1.0]]]}"#;
        let m = parse_cbmap(text).unwrap();
        assert_eq!(m.action()[(0, 0)], C64::new(0.5, -1.0));
        let bad = r#"{"source":{"blocks":[2]},"target":{"blocks":[2]},"action":[[[1,0]]]}"#;
        assert!(matches!(parse_cbmap(bad), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn broken_associativity_is_reported() {
        let sys = sys_a();
        let mut file = system_to_file(&sys);
        file.group = GroupSpec {
            order: 3,
            mul_table: vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 2, 0]],
        };
        file.action = vec![file.action[0].clone(); 3];
        let loaded = load_system(&to_json(&file), 1e-10).unwrap();
        assert!(!loaded.report.passed());
        assert!(loaded.report.items[0].detail.contains("associativity"));
    }

    #[test]
    fn multiplier_entries_round_trip() {
        let sys = sys_b();
        let f = HSMultiplier::scalar(
            &sys,
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0)],
        )
        .unwrap();
        let entries = multiplier_to_entries(&f);
        assert_eq!(entries.len(), 2);
        let back = multiplier_from_entries(&sys, &entries).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn amenable_scalars() {
        let sys = sys_b();
        let text = r#"[{"element":0,"scalars":[1,1,1]}]"#;
        let data = parse_amenable(&sys, text, 1e-9).unwrap();
        assert_eq!(data.support(0.0), vec![0]);
        let text = r#"[{"element":0,"blocks":[[[[1,0]]],[[[0,0]]],[[[2,0]]]]}]"#;
        assert!(parse_amenable(&sys, text, 1e-9).is_ok());
    }
}
