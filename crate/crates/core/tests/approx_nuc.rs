mod common;

use common::*;
use cpmult::approx::{self, L2Space};
use cpmult::fixtures::{sys_a, sys_b};
use cpmult::hsmult::{self, CertifyOptions};
use cpmult::linalg::{self, CMatrix, C64};
use cpmult::nuc::{self, AmenableData};
use cpmult::random;
use cpmult::{CBMap, CrossedMap, HSMultiplier, TracialState};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn admissible_multipliers_are_block_diagonal_contractions(seed in any::<u64>(), which in 0usize..2) {
        let sys = if which == 0 { sys_a() } else { sys_b() };
        let mut rng = random::rng(seed);
        let w: Vec<f64> = (0..sys.order()).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
        let nrm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let w: Vec<f64> = w.iter().map(|x| x / nrm).collect();
        let phi = random_unital_cp(&mut rng, sys.algebra());
        let f = amenable_oracle(&sys, &w, &phi);
        let opts = CertifyOptions::default();
        prop_assert!(approx::admissibility(&sys, &f, &opts).unwrap().all());
        prop_assert!(approx::check_block_diag(&sys, &f, &opts).unwrap() <= 1e-10);
        let dec = approx::l2_decompose(&sys).unwrap();
        let t = dec.crossed_operator(&f.as_crossed_map(&sys).unwrap()).unwrap();
        prop_assert!(linalg::op_norm(&t) <= 1.0 + 1e-9);
    }

    #[test]
    fn amenable_builder_matches_scalar_oracle(seed in any::<u64>(), which in 0usize..2) {
        let sys = if which == 0 { sys_a() } else { sys_b() };
        let mut rng = random::rng(seed);
        let w: Vec<f64> = (0..sys.order()).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
        let nrm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scal: Vec<Vec<C64>> = w.iter().map(|x| vec![C64::new(x / nrm, 0.0); sys.algebra().num_blocks()]).collect();
        let data = AmenableData::from_scalars(&sys, &scal, 1e-9).unwrap();
        let phi = random_unital_cp(&mut rng, sys.algebra());
        let lib = nuc::build_amenable_multiplier(&sys, &data, &phi, 1e-9).unwrap();
        let wn: Vec<f64> = w.iter().map(|x| x / nrm).collect();
        prop_assert!(lib.dist(&amenable_oracle(&sys, &wn, &phi)) <= 1e-10);
        prop_assert!(hsmult::certify_cp(&sys, &lib, &CertifyOptions::default()).unwrap().verdict);
    }
}

#[test]
fn l2_space_is_orthonormal() {
    for sys in [sys_a(), sys_b()] {
        let base = L2Space::for_algebra(sys.trace().unwrap());
        assert!(base.orthonormality_residual() < 1e-12);
        let crossed = L2Space::for_crossed(&sys).unwrap();
        assert!(crossed.orthonormality_residual() < 1e-12);
        let res = approx::l2_decompose(&sys).unwrap().residuals(&sys).unwrap();
        assert!(res.isometry < 1e-12 && res.orthogonality < 1e-12);
        assert!(res.completeness < 1e-12 && res.fourier < 1e-12);
    }
}

#[test]
fn gram_of_trace_matches_weights() {
    let alg = cpmult::Algebra::new(vec![2, 1]).unwrap();
    let tau = TracialState::new(&alg, vec![0.25, 0.5]).unwrap();
    let space = L2Space::for_algebra(&tau);
    // matrix units are orthogonal with ‖e_ij‖² = weight of their block
    let expected = CMatrix::diag_real(&[0.25, 0.25, 0.25, 0.25, 0.5]);
    assert!(space.gram().dist(&expected) < 1e-14);
}

#[test]
fn compression_identity_on_sys_a() {
    let sys = sys_a();
    let f0 = HSMultiplier::scalar(&sys, &[C64::new(1.0, 0.0), C64::new(0.5, 0.0)]).unwrap();
    for phi in [
        CrossedMap::identity(&sys),
        CrossedMap::expectation(&sys),
        f0.as_crossed_map(&sys).unwrap(),
    ] {
        assert!(approx::compression_identity_check(&sys, &phi).unwrap() <= 1e-10);
    }
}

#[test]
fn scalar_pd_of_scalar_family() {
    let sys = sys_a();
    let f = HSMultiplier::scalar(&sys, &[C64::new(1.0, 0.0), C64::new(-0.4, 0.0)]).unwrap();
    let pd = approx::scalar_pd_extract(&sys, &f, &CertifyOptions::default()).unwrap();
    assert!(pd.verdict);
    assert!((pd.phi[0].re - 1.0).abs() < 1e-12 && (pd.phi[1].re + 0.4).abs() < 1e-12);
    assert!((pd.min_eigenvalue - 0.6).abs() < 1e-10);
}

#[test]
fn non_admissible_multipliers_are_flagged() {
    let sys = sys_a();
    let twice = HSMultiplier::identity(&sys).scale(C64::new(2.0, 0.0));
    let adm = approx::admissibility(&sys, &twice, &CertifyOptions::default()).unwrap();
    assert!(adm.cp && !adm.unital && !adm.trace_dominated);
    assert!(approx::scalar_pd_extract(&sys, &twice, &CertifyOptions::default()).is_err());
    let rep = approx::haagerup_report(&sys, &[("twice".into(), twice)], &CertifyOptions::default())
        .unwrap();
    assert!(rep.rows[0].flag.is_some());
    assert!(!rep.all_admissible());
}

#[test]
fn uniform_amenable_data_is_exact_on_sys_b() {
    let sys = sys_b();
    let data = AmenableData::uniform(&sys);
    let chk = nuc::check_amenable(&sys, &data).unwrap();
    assert!(chk.sum_residual <= 1e-12);
    assert!(chk.shift_defects.iter().all(|&d| d <= 1e-12));
    let id =
        nuc::build_amenable_multiplier(&sys, &data, &CBMap::identity(sys.algebra()), 1e-9).unwrap();
    assert!(id.dist(&HSMultiplier::identity(&sys)) <= 1e-12);
    let delta = AmenableData::delta_e(&sys);
    let chk = nuc::check_amenable(&sys, &delta).unwrap();
    assert!(chk
        .shift_defects
        .iter()
        .skip(1)
        .all(|&d| (d - 2.0).abs() < 1e-12));
}

#[test]
fn non_cp_or_non_unital_maps_are_refused() {
    let sys = sys_a();
    let data = AmenableData::uniform(&sys);
    assert!(nuc::build_amenable_multiplier(&sys, &data, &CBMap::transpose(2), 1e-9).is_err());
    let half = CBMap::identity(sys.algebra()).scale(C64::new(0.5, 0.0));
    assert!(nuc::build_amenable_multiplier(&sys, &data, &half, 1e-9).is_err());
}

#[test]
fn extraction_from_conjugation_maps() {
    let sys = sys_b();
    let mut rng = random::rng(11);
    let y = hsmult::random_crossed(&sys, &mut rng);
    let ys = sys.star(&y);
    let phi = CrossedMap::from_fn(&sys, |x| sys.multiply(&sys.multiply(&ys, x), &y));
    let ex = nuc::extract_from_cp_approx(&sys, &phi, &CertifyOptions::default()).unwrap();
    assert!(ex.map_cp);
    assert!(ex.verdict.unwrap().verdict);
    assert!(ex.he_norm <= ex.map_norm + 1e-9);
}

#[test]
fn nuclearity_report_columns() {
    let sys = sys_b();
    let family = vec![
        (
            "identity".to_string(),
            HSMultiplier::identity(&sys),
            Some(3),
        ),
        (
            "depolarized".to_string(),
            nuc::build_amenable_multiplier(
                &sys,
                &AmenableData::uniform(&sys),
                &random_unital_cp(&mut random::rng(2), sys.algebra()),
                1e-9,
            )
            .unwrap(),
            None,
        ),
    ];
    let rep = nuc::nuclearity_report(&sys, &family, &CertifyOptions::default()).unwrap();
    assert_eq!(rep.rows[0].pointwise_deviation, 0.0);
    assert!(rep.rows[0].crossed_deviation < 1e-12);
    assert_eq!(rep.rows[0].rank_within_bound, Some(true));
    assert!(rep.rows.iter().all(|r| r.coupling_holds && r.cp));
}
