//! Three interactive operations for the static page in `www/`. Each returns
//! a JSON string so the page only needs `JSON.parse`.

use cpmult::approx;
use cpmult::fixtures::{sys_a, sys_b};
use cpmult::hsmult::{self, CertifyOptions};
use cpmult::linalg::{self, C64};
use cpmult::{CBMap, HSMultiplier};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct ScalarFamily {
    c: f64,
    verdict: bool,
    min_choi_eigenvalue: f64,
    cb_norm: Option<f64>,
    /// Eigenvalues `1 ± c` of the matrix `(φ(s⁻¹t))`.
    pd_eigenvalues: [f64; 2],
}

#[derive(Serialize)]
struct SubsetBound {
    subset: Vec<usize>,
    mix: f64,
    norm: f64,
    bound: f64,
    verdict: bool,
    values_nonzero: Vec<bool>,
}

#[derive(Serialize)]
struct CurvePoint {
    c: f64,
    base_deviation: f64,
    crossed_deviation: f64,
}

#[derive(Serialize)]
struct Failure {
    error: String,
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn fail(e: cpmult::Error) -> String {
    to_json(&Failure {
        error: e.to_string(),
    })
}

/// `F = (id, c·id)` on `Z/2` acting on `M_2` by the flip.
#[wasm_bindgen]
pub fn scalar_family(c: f64) -> String {
    let sys = sys_a();
    let f = match HSMultiplier::scalar(&sys, &[C64::new(1.0, 0.0), C64::new(c, 0.0)]) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    match hsmult::certify_cp(&sys, &f, &CertifyOptions::default()) {
        Ok(v) => to_json(&ScalarFamily {
            c,
            verdict: v.verdict,
            min_choi_eigenvalue: v.min_choi_eigenvalue,
            cb_norm: v.norms.map(|n| n.cb_sf),
            pd_eigenvalues: [1.0 - c, 1.0 + c],
        }),
        Err(e) => fail(e),
    }
}

/// `h_F` on `Z/3` acting on `C³`, for the subset given by the low three bits
/// of `mask` and `Φ = (1 − mix)·id + mix·τ(·)1`.
#[wasm_bindgen]
pub fn subset_bound(mask: u32, mix: f64) -> String {
    let sys = sys_b();
    let alg = sys.algebra();
    let subset: Vec<usize> = sys
        .group()
        .elements()
        .filter(|&s| mask & (1 << s) != 0)
        .collect();
    let mix = mix.clamp(0.0, 1.0);
    let tau = sys.trace().expect("fixture has a trace").clone();
    let avg = CBMap::from_fn(alg, alg, |a| {
        alg.unit().scale(tau.eval(a).expect("same algebra"))
    });
    let phi = CBMap::identity(alg)
        .scale_real(1.0 - mix)
        .add(&avg.scale_real(mix));
    let run = || -> cpmult::Result<SubsetBound> {
        let h = hsmult::build_hf(&sys, &subset, &phi)?;
        let norm = linalg::op_norm(&sys.synth(&h.apply(&sys, &sys.unit())?));
        let bound = subset.len() as f64 * linalg::op_norm(&phi.apply(&alg.unit()).embed());
        let verdict = hsmult::certify_cp(&sys, &h, &CertifyOptions::default())?.verdict;
        Ok(SubsetBound {
            values_nonzero: h.values().iter().map(|v| !v.is_zero(1e-12)).collect(),
            subset: subset.clone(),
            mix,
            norm,
            bound,
            verdict,
        })
    };
    match run() {
        Ok(r) => to_json(&r),
        Err(e) => fail(e),
    }
}

/// L² deviations of the scalar family `(id, c·id)` on the flip system for
/// `steps + 1` equally spaced `c ∈ [0, 1]`.
#[wasm_bindgen]
pub fn deviation_curve(steps: u32) -> String {
    let sys = sys_a();
    let steps = steps.clamp(1, 200);
    let family: Vec<(String, HSMultiplier)> = (0..=steps)
        .map(|k| {
            let c = k as f64 / steps as f64;
            let f = HSMultiplier::scalar(&sys, &[C64::new(1.0, 0.0), C64::new(c, 0.0)])
                .expect("fixture shapes");
            (format!("{c}"), f)
        })
        .collect();
    match approx::haagerup_report(&sys, &family, &CertifyOptions::default()) {
        Ok(rep) => {
            let points: Vec<CurvePoint> = rep
                .rows
                .iter()
                .map(|r| CurvePoint {
                    c: r.name.parse().unwrap_or(f64::NAN),
                    base_deviation: r.base_deviation.unwrap_or(f64::NAN),
                    crossed_deviation: r.crossed_deviation.unwrap_or(f64::NAN),
                })
                .collect();
            to_json(&points)
        }
        Err(e) => fail(e),
    }
}
