use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tropgc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropgc"))
        .args(args)
        .env_remove("TROPGC_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("complex,genus,degree,dim_chains,rank_in,rank_out,dim_homology"));
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn json_report(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("verify prints JSON")
}

#[test]
fn enumerate_trivalent_genus_two() {
    let o = tropgc(&["enumerate", "--genus", "2", "--kind", "trivalent"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(text.contains(r#"{"genus":2,"weights":[0,0],"edges":[[0,1],[0,1],[0,1]]}"#));
    assert!(String::from_utf8_lossy(&o.stderr).contains("records=2"));
}

#[test]
fn enumerate_is_deterministic_and_cache_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let run = |name: &str, with_cache: bool| {
        let out = dir.path().join(name);
        let mut args = vec!["enumerate", "--genus", "4", "--kind", "jg", "--out", out.to_str().unwrap()];
        if with_cache {
            args.extend(["--cache", cache.to_str().unwrap()]);
        }
        let o = tropgc(&args);
        assert!(o.status.success(), "{o:?}");
        assert!(stdout(&o).contains("records=379"));
        fs::read(out).unwrap()
    };
    let first = run("a.jsonl", false);
    assert_eq!(first, run("b.jsonl", false));
    let cold = run("c.jsonl", true);
    assert!(cache.join("g4").join("jg.jsonl").exists());
    assert_eq!(cold, run("d.jsonl", true));
    assert_eq!(first, cold);
}

#[test]
fn cache_root_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_tropgc"))
        .args(["enumerate", "--genus", "3", "--kind", "trivalent"])
        .env("TROPGC_CACHE", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let file = dir.path().join("g3").join("trivalent.jsonl");
    let text = fs::read_to_string(file).unwrap();
    assert!(text.starts_with("# tropgc graph cache v1 genus=3 kind=trivalent\n"));
    assert_eq!(text.lines().count(), 1 + 5);
}

#[test]
fn gc_generators_in_degree_zero_include_k4() {
    let o = tropgc(&["enumerate", "--genus", "3", "--kind", "gc-generators", "--degree", "0"]);
    assert!(o.status.success());
    let k4 = r#"{"genus":3,"weights":[0,0,0,0],"edges":[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]}"#;
    assert!(stdout(&o).lines().any(|l| l == k4));
}

#[test]
fn graph_homology_genus_three() {
    let o = tropgc(&["homology", "--genus", "3", "--complex", "gc"]);
    assert!(o.status.success());
    for row in csv_rows(&stdout(&o)) {
        let expected = if row[2] == "0" { "1" } else { "0" };
        assert_eq!(row[6], expected, "{row:?}");
    }
}

#[test]
fn loop_weight_part_is_acyclic_in_genus_four() {
    let o = tropgc(&["homology", "--genus", "4", "--complex", "b"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r[0] == "b" && r[6] == "0"));
}

#[test]
fn subdivided_delta_two_is_acyclic() {
    let o = tropgc(&["homology", "--genus", "2", "--complex", "delta"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[6] == "0"));
}

#[test]
fn mod_p_prefilter_matches_exact_table() {
    let exact = tropgc(&["homology", "--genus", "4", "--complex", "c"]);
    let filtered = tropgc(&["homology", "--genus", "4", "--complex", "c", "--mod-p", "1000003"]);
    assert!(exact.status.success() && filtered.status.success());
    assert_eq!(exact.stdout, filtered.stdout);
}

#[test]
fn degree_range_selects_rows() {
    let o = tropgc(&["homology", "--genus", "4", "--complex", "gc", "--degrees", "-2..0"]);
    let degrees: Vec<String> = csv_rows(&stdout(&o)).into_iter().map(|r| r[2].clone()).collect();
    assert_eq!(degrees, ["-2", "-1", "0"]);
}

#[test]
fn verify_shift_genus_three() {
    let o = tropgc(&["verify", "shift", "--genus", "3"]);
    assert!(o.status.success());
    assert_eq!(json_report(&o)["passed"], true);
}

#[test]
fn verify_wheel_genus_five() {
    let o = tropgc(&["verify", "wheel", "--genus", "5"]);
    assert!(o.status.success());
    let r = json_report(&o);
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"∂W_5 = 0"));
    assert!(names.contains(&"W_5 is not a boundary"));
    assert_eq!(r["passed"], true);
}

#[test]
fn verify_growth_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("growth.json");
    let o = tropgc(&["verify", "growth", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "growth pass");
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(r["passed"], true);
}

#[test]
fn growth_csv_schema() {
    let o = tropgc(&["growth", "--max", "12"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,a_n,A_n,product");
    assert_eq!(lines.len(), 13);
    // a_3 = 3 and A_3 = 1
    assert!(lines[3].starts_with("3,3,1,"));
    let product = lines[12].rsplit(',').next().unwrap();
    let mantissa = product.split('e').next().unwrap();
    assert_eq!(mantissa.replace(['.', '-'], "").len(), 15);
}

#[test]
fn usage_errors_exit_with_one() {
    for args in [
        vec!["verify", "nonsense"],
        vec!["enumerate", "--genus", "1", "--kind", "jg"],
        vec!["homology", "--genus", "3", "--complex", "gc", "--degrees", "4..6"],
        vec!["homology", "--genus", "4", "--complex", "delta"],
        vec!["homology", "--genus", "3", "--complex", "gc", "--mod-p", "91"],
        vec!["enumerate", "--genus", "3", "--kind", "jg", "--degrees", "0"],
    ] {
        let o = tropgc(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn unwritable_output_is_an_io_error() {
    let o = tropgc(&["growth", "--max", "5", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!Path::new("/nonexistent-dir/x.csv").exists());
}
