//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use common::*;

fn run_verify(name: &str) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_k0"))
        .args(["verify", instance_path(name).to_str().unwrap(), "--json"])
        .output()
        .expect("run k0");
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), v)
}

fn check<'a>(report: &'a Value, name: &str) -> Option<&'a Value> {
    report["checks"].as_array()?.iter().find(|c| c["check"] == name)
}

fn passed(report: &Value, name: &str) -> Result<(), String> {
    match check(report, name) {
        Some(c) if c["status"] == "pass" => Ok(()),
        Some(c) => Err(format!("{name}: {}", c["detail"])),
        None => Err(format!("{name}: missing")),
    }
}

fn within(t: Instant, limit: u64) -> Result<(), String> {
    let e = t.elapsed();
    if e > Duration::from_secs(limit) {
        Err(format!("took {:.1}s, limit {limit}s", e.as_secs_f64()))
    } else {
        Ok(())
    }
}

fn criterion_1() -> Result<String, String> {
    let t = Instant::now();
    let (code, r) = run_verify("triad_z7");
    for name in ["decompose Lambda at 7", "decompose S at 7", "decompose N12 at 7", "decompose N13 at 7", "decompose N23 at 7"] {
        passed(&r, name)?;
    }
    passed(&r, "iso_local M+S ~ N12+N13+N23 at 7")?;
    let w = &check(&r, "iso_local M+S ~ N12+N13+N23 at 7").unwrap()["witness"];
    if !w.is_array() {
        return Err("no explicit witness matrix".into());
    }
    passed(&r, "indecomposable M")?;
    passed(&r, "k0")?;
    let k0 = &check(&r, "k0").unwrap()["witness"];
    if k0["free_basis"].as_array().map(|v| v.len()) != Some(6) || k0["torsion"].as_array().map(|v| v.len()) != Some(0) {
        return Err(format!("K0 presentation {k0}"));
    }
    if code != 0 {
        return Err(format!("k0 verify exited with {code}"));
    }
    within(t, 10)?;
    Ok("triad: 1/3/2 summands, witness for M+S = N12+N13+N23, M indecomposable, K0 = Z^6".into())
}

fn criterion_2() -> Result<String, String> {
    let t = Instant::now();
    let (code, r) = run_verify("hereditary_tiled");
    passed(&r, "hereditary_formula")?;
    passed(&r, "k0")?;
    let k0 = &check(&r, "k0").unwrap()["witness"];
    if k0["free_basis"].as_array().map(|v| v.len()) != Some(2) || k0["torsion"] != serde_json::json!(["2"]) {
        return Err(format!("K0 presentation {k0}"));
    }
    if code != 0 {
        return Err(format!("k0 verify exited with {code}"));
    }
    within(t, 10)?;
    Ok("hereditary: m = 1 + (2 - 1) = 2, K0 = Z/2 + Z^2".into())
}

fn criterion_3() -> Result<String, String> {
    let t = Instant::now();
    let (code, r) = run_verify("sw_fragment");
    passed(&r, "split nu")?;
    let parts = &check(&r, "split nu").unwrap()["witness"]["names"];
    if parts != &serde_json::json!(["A3", "A8"]) {
        return Err(format!("parts {parts}"));
    }
    passed(&r, "genus_basis")?;
    passed(&r, "freyd")?;
    if code != 0 {
        return Err(format!("k0 verify exited with {code}"));
    }
    within(t, 1)?;
    Ok("spheres: A1 + S3 + S7 splits into A3 + A8; basis S3, S7 and 4 p-primary genera".into())
}

fn criterion_4() -> Result<String, String> {
    let t = Instant::now();
    let (code, r) = run_verify("quad_m5");
    passed(&r, "genus_equal P ~ Lambda")?;
    passed(&r, "iso_global P ~ Lambda")?;
    passed(&r, "ker_g")?;
    let h = class_number_minus_20();
    if h != 2 || reduced_forms(-20).len() != 2 {
        return Err(format!("oracle class number {h}"));
    }
    let k0 = &check(&r, "k0").unwrap()["witness"];
    if k0["torsion"] != serde_json::json!([h.to_string()]) {
        return Err(format!("Ker G {} differs from the oracle class group Z/{h}", k0["torsion"]));
    }
    if code != 0 {
        return Err(format!("k0 verify exited with {code}"));
    }
    within(t, 5)?;
    Ok("Z[sqrt-5]: G(P) = G(Lambda), P not free, Ker G = Z/2 = oracle class group".into())
}

fn criterion_5() -> Result<String, String> {
    let t = Instant::now();
    let (n, bad) = exhaustive_2x2();
    if bad != 0 {
        return Err(format!("{bad} of {n} 2x2 matrices mismatch"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let bad = random_normal_forms(&mut rng);
    if bad != 0 {
        return Err(format!("{bad} of 500 random matrices mismatch"));
    }
    let bad = random_lg_pairs(&mut rng, 200);
    if !bad.is_empty() {
        return Err(format!("{} of 200 lattice pairs fail: {}", bad.len(), bad[0]));
    }
    for name in SHIPPED {
        check_instance_coords(name)?;
    }
    within(t, 120)?;
    Ok(format!("{n} exhaustive + 500 random normal forms, 200 lattice pairs, coordinates on 4 instances"))
}

fn main() {
    let criteria: [(&str, fn() -> Result<String, String>); 5] = [
        ("1 triad reproduction", criterion_1),
        ("2 hereditary formula", criterion_2),
        ("3 sphere splitting", criterion_3),
        ("4 kernel of the genus map", criterion_4),
        ("5 property suites", criterion_5),
    ];
    let mut failures = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        match f() {
            Ok(msg) => println!("PASS criterion {name} ({:.2}s): {msg}", t.elapsed().as_secs_f64()),
            Err(msg) => {
                failures += 1;
                println!("FAIL criterion {name} ({:.2}s): {msg}", t.elapsed().as_secs_f64());
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
