use std::process::Command;

fn wplus(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_wplus"))
        .args(args)
        .env_remove("WPLUS_CACHE")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn verify_67_text() {
    let (code, out, _) = wplus(&["verify", "67"]);
    assert_eq!(code, 0);
    assert!(out.contains("H = x^2 + 10*x + 62"), "{out}");
    assert!(out.contains("f1 = q - 3*q^3 - 3*q^4 - 3*q^5 + q^6 + 4*q^7 + 3*q^8"), "{out}");
    let order = ["basis", "Wronskian", "F~(W~, x)", "S_p =", "F_p =", "H ="];
    let pos: Vec<usize> = order.iter().map(|s| out.find(s).expect(s)).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{pos:?}");
}

#[test]
fn verify_67_json_schema() {
    let (code, out, _) = wplus(&["verify", "67", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["p"], 67);
    assert_eq!(v["g_p"], 5);
    assert_eq!(v["g_plus"], 2);
    assert_eq!(v["pivots"], serde_json::json!([1, 2]));
    assert_eq!(v["wt_inf"], 0);
    assert_eq!(v["good_basis"], true);
    assert_eq!(v["polys"]["modulus"], 67);
    assert_eq!(v["polys"]["H"], serde_json::json!([62, 10, 1]));
    assert_eq!(v["polys"]["S_l"], serde_json::json!([14, 15, 1]));
    for key in ["S_p", "S_q", "H_p_mod_p", "F_p"] {
        assert!(v["polys"][key].is_array(), "{key}");
    }
    assert!(v["checks"].as_object().unwrap().values().all(|c| c == true));
    assert!(v["timings_ms"].is_object());
}

#[test]
fn verify_trivial_genus() {
    let (code, out, _) = wplus(&["verify", "23"]);
    assert_eq!(code, 0);
    assert!(out.contains("g+ = 0"), "{out}");
}

#[test]
fn usage_errors() {
    let (code, _, err) = wplus(&["verify", "68"]);
    assert_eq!(code, 64);
    assert!(err.contains("not a prime"), "{err}");
    assert_eq!(wplus(&["verify", "abc"]).0, 64);
    assert_eq!(wplus(&["frobnicate"]).0, 64);
    assert_eq!(wplus(&["scan", "50", "40"]).0, 64);
    assert_eq!(wplus(&["hilbert", "5"]).0, 64);
    assert_eq!(wplus(&["--help"]).0, 0);
}

#[test]
fn scan_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.json");
    let (code, text, _) = wplus(&["scan", "67", "101", "--jobs", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(text.contains("8 primes: 8 passed"), "{text}");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let results = v["results"].as_array().unwrap();
    let ps: Vec<u64> = results.iter().map(|r| r["p"].as_u64().unwrap()).collect();
    assert_eq!(ps, [67, 71, 73, 79, 83, 89, 97, 101]);
    assert!(results.iter().all(|r| r["report"]["wt_inf"] == 0));
    assert_eq!(v["summary"]["wt_inf_positive"], serde_json::json!([]));
}

#[test]
fn empty_scan() {
    let (code, text, _) = wplus(&["scan", "24", "28"]);
    assert_eq!(code, 0);
    assert!(text.starts_with("0 primes"), "{text}");
}

#[test]
fn inspection_commands() {
    let (code, out, _) = wplus(&["ssing", "67"]);
    assert_eq!(code, 0);
    assert!(out.contains("S_p = (x + 1)(x + 14)(x^2 + 8*x + 45)(x^2 + 44*x + 24)"), "{out}");
    assert!(out.contains("agrees"), "{out}");
    let (code, out, _) = wplus(&["hilbert", "4"]);
    assert_eq!(code, 0);
    assert!(out.contains("H_4 = x - 1728"), "{out}");
    let (code, out, _) = wplus(&["hilbert", "7"]);
    assert_eq!(code, 0);
    assert!(out.contains("H_7 = x + 3375"), "{out}");
    let (code, out, _) = wplus(&["basis", "67"]);
    assert_eq!(code, 0);
    assert!(out.contains("pivots = [1, 2]"), "{out}");
    assert!(out.contains("f2 = q^2 - q^3 - 3*q^4 + 3*q^7 + 4*q^8"), "{out}");
}
