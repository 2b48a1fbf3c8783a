mod common;

use common::*;
use k0_core::instance::{verify, Instance, InstanceError, InstanceKind, Status, VerifyOptions};
use k0_core::lattice::BaseRing;

fn text(name: &str) -> String {
    std::fs::read_to_string(instance_path(name)).unwrap()
}

#[test]
fn loads_triad_over_z7() {
    let inst = Instance::load(&instance_path("triad_z7")).unwrap();
    assert_eq!(inst.file.kind, InstanceKind::Lattice);
    assert_eq!(inst.base, BaseRing::LocalAt(7));
    assert_eq!(inst.algebra.as_ref().unwrap().rank(), 3);
    assert_eq!(inst.module("LambdaStar").unwrap().rank(), 3);
}

#[test]
fn loads_symbolic_fragment() {
    let inst = Instance::load(&instance_path("sw_fragment")).unwrap();
    assert_eq!(inst.file.kind, InstanceKind::Symbolic);
    assert_eq!(inst.primes(), vec![2, 3]);
    assert_eq!(inst.file.splittings[0].a.0, 24.into());
}

#[test]
fn malformed_file_reports_position() {
    let bad = text("quad_m5").replacen("\"kind\"", "\"kind\" \"lattice\",", 1);
    match Instance::from_json(&bad) {
        Err(InstanceError::Parse { line, column, .. }) => assert!(line > 1 && column > 0),
        other => panic!("expected a parse error, got {:?}", other.err()),
    }
    assert!(matches!(Instance::from_json("{"), Err(InstanceError::Parse { .. })));
}

#[test]
fn corrupted_action_fails_validation() {
    let mut v: serde_json::Value = serde_json::from_str(&text("quad_m5")).unwrap();
    // w acts as [[0,-5],[1,0]]; replace -5 by -6 so that w² no longer equals -5.
    v["representations"][0]["action"][1][0][1] = serde_json::Value::String("-6".into());
    let err = Instance::from_json(&v.to_string()).err().expect("must fail");
    assert!(matches!(err, InstanceError::Axiom { .. }), "{err}");

    let mut v: serde_json::Value = serde_json::from_str(&text("triad_z7")).unwrap();
    // A generator set that is not stable under the order.
    v["modules"][2]["generators"] = serde_json::json!([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "49"]]);
    let err = Instance::from_json(&v.to_string()).err().expect("must fail");
    assert!(err.to_string().contains("does not preserve the lattice"), "{err}");

    let mut v: serde_json::Value = serde_json::from_str(&text("triad_z7")).unwrap();
    v["base"] = serde_json::Value::String("Z_(8)".into());
    assert!(matches!(Instance::from_json(&v.to_string()), Err(InstanceError::Invalid(_))));
}

#[test]
fn serialization_round_trips() {
    for name in SHIPPED {
        let a = Instance::load(&instance_path(name)).unwrap();
        let b = Instance::from_json(&a.to_json()).unwrap();
        assert_eq!(a.canonical(), b.canonical(), "{name}");
        for (x, y) in a.modules.iter().zip(&b.modules) {
            assert_eq!(x.carrier(), y.carrier());
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let inst = Instance::load(&instance_path("quad_m5")).unwrap();
    let opts = VerifyOptions { seed: 5, ..VerifyOptions::default() };
    let strip = |r: k0_core::instance::Report| {
        r.checks.into_iter().map(|c| (c.check, c.status, c.detail, c.witness)).collect::<Vec<_>>()
    };
    assert_eq!(strip(verify(&inst, &opts)), strip(verify(&inst, &opts)));
}

#[test]
fn failing_identity_is_reported() {
    let mut v: serde_json::Value = serde_json::from_str(&text("quad_m5")).unwrap();
    v["identities"] = serde_json::json!([{ "check": "k0", "free_rank": 3, "torsion": [] }]);
    let inst = Instance::from_json(&v.to_string()).unwrap();
    let r = verify(&inst, &VerifyOptions::default());
    assert_eq!(r.status(), Status::Fail);
    assert_eq!(r.exit_code(), 1);
}

#[test]
fn cli_exit_codes() {
    let k0 = env!("CARGO_BIN_EXE_k0");
    let run = |args: &[&str]| std::process::Command::new(k0).args(args).output().unwrap();
    let quad = instance_path("quad_m5");
    let quad = quad.to_str().unwrap();
    assert_eq!(run(&["verify", quad]).status.code(), Some(0));
    assert_eq!(run(&["verify"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate", quad]).status.code(), Some(3));
    assert_eq!(run(&["verify", "/nonexistent.k0i"]).status.code(), Some(3));
    let dir = std::env::temp_dir().join("k0_cli_exit_codes.k0i");
    std::fs::write(&dir, "{ \"name\": ").unwrap();
    let out = run(&["verify", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    assert_eq!(run(&["genus-eq", quad, "--left", "P", "--right", "Lambda"]).status.code(), Some(0));
    let out = run(&["coords", quad, "--module", "P", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["coords"], serde_json::json!([1]));
    let out = run(&["decompose", instance_path("triad_z7").to_str().unwrap(), "--module", "S", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["certificate"]["summands"].as_array().unwrap().iter().map(|e| e["multiplicity"].as_u64().unwrap()).sum::<u64>(), 3);
    let out = run(&["glue", quad, "--spec", "glue_P"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn glue_then_descriptor_round_trips() {
    use k0_core::instance::{run_glue, GlueSpec, K0Context};
    let inst = Instance::load(&instance_path("hereditary_tiled")).unwrap();
    let opts = VerifyOptions::default();
    let K0Context::Global(g) = K0Context::build(&inst, &opts).unwrap() else { panic!() };
    let spec = GlueSpec { name: "g".into(), reference: "L2".into(), overrides: [(5, "L1".to_string())].into() };
    let glued = run_glue(&inst, &spec, &opts).unwrap();
    let d = g.genus_descriptor(&glued).unwrap();
    assert_eq!(d, g.genus_descriptor(inst.module("L1").unwrap()).unwrap());
    assert_eq!(d.overrides.keys().copied().collect::<Vec<_>>(), vec![5]);
    assert!(g.genus_descriptor(inst.module("L2").unwrap()).unwrap().overrides.is_empty());
}
