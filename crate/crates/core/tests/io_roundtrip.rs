use cpmult::fixtures::{sys_a, sys_b};
use cpmult::io;
use cpmult::{CBMap, HSMultiplier};

#[test]
fn system_round_trip() {
    for sys in [sys_a(), sys_b()] {
        let text = io::to_json(&io::system_to_file(&sys));
        let loaded = io::load_system(&text, 1e-9).unwrap();
        assert!(loaded.report.passed());
        let again = io::to_json(&io::system_to_file(&loaded.build(1e-9).unwrap()));
        assert_eq!(text, again);
    }
}

#[test]
fn cbmap_and_multiplier_round_trip() {
    let t = CBMap::transpose(2);
    let text = io::to_json(&io::cbmap_to_file(&t));
    assert!(io::parse_cbmap(&text).unwrap().dist(&t) == 0.0);

    let sys = sys_a();
    let f = HSMultiplier::identity(&sys);
    let text = io::to_json(&io::multiplier_to_entries(&f));
    assert!(io::parse_multiplier(&sys, &text).unwrap().dist(&f) == 0.0);
}

#[test]
fn malformed_inputs_are_errors() {
    assert!(io::parse_system("{", 1e-9).is_err());
    assert!(io::parse_system(
        r#"{"group":{"order":1,"mul_table":[[0]]},"algebra":{"blocks":[1]},"action":[],"extra":1}"#,
        1e-9
    )
    .is_err());
    let sys = sys_a();
    let dup = r#"[{"element":0,"action":[[[1,0],[0,0],[0,0],[0,0]],[[0,0],[1,0],[0,0],[0,0]],[[0,0],[0,0],[1,0],[0,0]],[[0,0],[0,0],[0,0],[1,0]]]},
                  {"element":0,"action":[[[1,0],[0,0],[0,0],[0,0]],[[0,0],[1,0],[0,0],[0,0]],[[0,0],[0,0],[1,0],[0,0]],[[0,0],[0,0],[0,0],[1,0]]]}]"#;
    assert!(io::parse_multiplier(&sys, dup).is_err());
}

#[test]
fn invalid_action_gives_itemized_report() {
    // identity table for Z/2 with an action that is not a homomorphism
    let text = r#"{
        "group": {"order": 2, "mul_table": [[0,1],[1,0]]},
        "algebra": {"blocks": [2]},
        "action": [
            {"perm": [0], "unitaries": [[[[1,0],[0,0]],[[0,0],[1,0]]]]},
            {"perm": [0], "unitaries": [[[[1,0],[0,0]],[[0,0],[0,1]]]]}
        ]
    }"#;
    let loaded = io::load_system(text, 1e-9).unwrap();
    assert!(!loaded.report.passed());
    assert!(loaded
        .report
        .items
        .iter()
        .any(|i| i.check == "homomorphism" && !i.passed));
}
