//! End-to-end tests of the command-line interface: factorization file
//! round trips, table regeneration with the negative control, report
//! determinism, and the stratum queries.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sympfact_core::factor::random_factors;
use sympfact_core::jsonio::{FactorsJson, MatrixJson};
use sympfact_core::matrix::{frobenius, Mat};
use sympfact_core::sampling::rng_for;
use sympfact_core::symgroup::product_of_factors;
use sympfact_core::C64;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sympfact"))
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_matrix(path: &Path, m: &Mat<C64>) {
    let js = MatrixJson::from_c64(m, 2);
    std::fs::write(path, serde_json::to_string_pretty(&js).unwrap()).unwrap();
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).to_string()
}

#[test]
fn factor_identity_merges_to_zero_factors() {
    let dir = tmpdir("factor-identity");
    let input = dir.join("matrix.json");
    let output = dir.join("factors.json");
    write_matrix(&input, &Mat::<C64>::identity(4));
    let out = bin()
        .args(["factor", "--in"])
        .arg(&input)
        .arg("--out")
        .arg(&output)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: FactorsJson =
        serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(doc.count, 0);
    assert_eq!(doc.residual, 0.0);
}

#[test]
fn factor_bundled_eight_factor_product() {
    let dir = tmpdir("factor-product");
    let input = dir.join("matrix.json");
    let output = dir.join("factors.json");
    let mut rng = rng_for(2024, "cli-fixture");
    let factors = random_factors(&mut rng, 8);
    let target = product_of_factors(&factors, 2);
    write_matrix(&input, &target);
    let out = bin()
        .args(["factor", "--exp", "--in"])
        .arg(&input)
        .arg("--out")
        .arg(&output)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: FactorsJson =
        serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert!(doc.residual <= 1e-9, "residual {}", doc.residual);
    assert!(doc.count <= 16);
    // the emitted factors rebuild the matrix
    let rebuilt = product_of_factors(
        &doc.factors
            .iter()
            .map(|f| f.to_factor().unwrap())
            .collect::<Vec<_>>(),
        2,
    );
    assert!(frobenius(&rebuilt.sub(&target)) <= 1e-8 * frobenius(&target));
    // logs were requested and exponentiate back to the factors
    let logs = doc.logs.expect("--exp emits logs");
    assert_eq!(logs.len(), doc.count);
}

#[test]
fn factor_rejects_non_symplectic_naming_the_condition() {
    let dir = tmpdir("factor-bad");
    let input = dir.join("matrix.json");
    let mut m = Mat::<C64>::identity(4);
    m[(0, 0)] = C64::new(2.0, 0.0);
    write_matrix(&input, &m);
    let out = bin()
        .args(["factor", "--in"])
        .arg(&input)
        .arg("--out")
        .arg(dir.join("unused.json"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(
        err.contains("A^T D - C^T B = I"),
        "error must name the violated condition, got: {err}"
    );
}

#[test]
fn tables_default_passes_and_names_errata() {
    let dir = tmpdir("tables-default");
    let out = bin()
        .arg("tables")
        .arg("--emit")
        .arg(dir.join("tables"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    for name in ["table1.txt", "table2.txt", "table3.txt"] {
        assert!(dir.join("tables").join(name).exists(), "{name} missing");
    }
    let text = stdout(&out);
    assert!(text.contains("0 mismatches"));
    assert!(text.contains("2 recorded errata confirmed"));
}

#[test]
fn tables_corrupt_cell_fails_naming_the_cell() {
    let dir = tmpdir("tables-corrupt");
    let out = bin()
        .arg("tables")
        .arg("--emit")
        .arg(dir.join("tables"))
        .args(["--corrupt-cell", "table2:0:0"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("MISMATCH table2 [(w1,w2,w3)][R1]"),
        "diff must name the corrupted cell, got: {text}"
    );
}

#[test]
fn tables_emit_only_skips_the_diff() {
    let dir = tmpdir("tables-emit-only");
    let out = bin()
        .arg("tables")
        .arg("--emit")
        .arg(dir.join("tables"))
        .arg("--emit-only")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(!stdout(&out).contains("cells checked"));
}

#[test]
fn verify_reports_are_byte_identical_for_equal_seeds() {
    let dir = tmpdir("verify-determinism");
    let r1 = dir.join("r1.json");
    let r2 = dir.join("r2.json");
    for out_path in [&r1, &r2] {
        let out = bin()
            .args(["verify", "--seed", "7", "--kmax", "3", "--samples", "2", "--out"])
            .arg(out_path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let b1 = std::fs::read(&r1).unwrap();
    let b2 = std::fs::read(&r2).unwrap();
    assert_eq!(b1, b2, "identical seed and config must give identical reports");
}

#[test]
fn verify_rejects_kmax_below_three() {
    let out = bin()
        .args(["verify", "--kmax", "2"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(stderr(&out).contains("kmax"));
}

#[test]
fn verify_mutated_signs_fail_the_tangency_suite() {
    let dir = tmpdir("verify-mutated");
    let report = dir.join("report.json");
    let out = bin()
        .args(["verify", "--seed", "7", "--kmax", "3", "--samples", "2", "--mutate-sign", "--out"])
        .arg(&report)
        .output()
        .unwrap();
    assert!(!out.status.success(), "mutated campaign must fail");
    let text = stdout(&out);
    assert!(text.contains("FAIL tangency"), "got: {text}");
    // the report is still written
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["passed"], serde_json::Value::Bool(false));
}

#[test]
fn strata_classify_matches_the_stratification() {
    for (k, a, expected) in [
        (3, "0,0,0,1", "generic-singular"),
        (4, "1,0,0,1", "generic-smooth"),
        (4, "0,0,0,1", "non-generic-singular"),
        (3, "5,2,0,0", "non-generic-smooth"),
        (5, "1/2,-3,1,0", "generic-smooth"),
    ] {
        let out = bin()
            .args(["strata", "classify", "--k", &k.to_string(), "--a", a])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
        assert_eq!(stdout(&out).trim(), expected, "K={k} a={a}");
    }
    let out = bin()
        .args(["strata", "classify", "--k", "3", "--a", "0,0,0,0"])
        .output()
        .unwrap();
    assert!(!out.status.success(), "the zero vector is not a target");
}

#[test]
fn sample_fiber_component_points_are_valid() {
    for mode in ["component:a1", "component:a2", "random", "stratum:generic-singular"] {
        let out = bin()
            .args(["sample-fiber", "--k", "3", "--seed", "5", "--mode", mode])
            .output()
            .unwrap();
        assert!(out.status.success(), "mode {mode}: {}", stderr(&out));
        let doc: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
        assert_eq!(doc["valid"], serde_json::Value::Bool(true), "mode {mode}");
    }
    // component sampling is specific to three factors
    let out = bin()
        .args(["sample-fiber", "--k", "4", "--mode", "component:a1"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn env_overrides_apply_when_flags_are_absent() {
    let out = bin()
        .args(["verify", "--out"])
        .arg(tmpdir("verify-env").join("report.json"))
        .env("SYMPFACT_KMAX", "2")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(stderr(&out).contains("kmax"));
}
