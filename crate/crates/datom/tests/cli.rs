mod common;

use std::path::PathBuf;
use std::process::Command;

use datom::cli::{run, EXIT_CONFIG, EXIT_GOAL, EXIT_START, EXIT_THICKNESS, EXIT_UNREACHABLE, EXIT_USAGE};
use datom::config;
use datom_core::lattice::neighbors;
use datom_core::CellPos;
use serde_json::Value;

fn datom(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("datom").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn write_config(name: &str, body: &str) -> String {
    let p = tmp(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn field_rows(csv: &str) -> Vec<(CellPos, u32)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let v: Vec<i64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (CellPos::new(v[0] as i32, v[1] as i32, v[2] as i32), v[3] as u32)
        })
        .collect()
}

fn dist_at(csv: &str, c: CellPos) -> Option<u32> {
    field_rows(csv).into_iter().find(|(p, _)| *p == c).map(|(_, d)| d)
}

fn plan_lines(text: &str) -> Vec<Value> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn cavity_config(mobile_inside: bool) -> String {
    let centre = CellPos::new(0, 0, 0);
    let mut mods: Vec<String> = neighbors(centre)
        .iter()
        .enumerate()
        .map(|(n, c)| format!(r#"{{"id": {}, "pos": [{}, {}, {}]}}"#, n + 2, c.i, c.j, c.k))
        .collect();
    if mobile_inside {
        mods.push(r#"{"id": 1, "pos": [0, 0, 0], "role": "mobile"}"#.into());
    }
    format!(r#"{{"radius": 1.0, "modules": [{}]}}"#, mods.join(", "))
}

#[test]
fn field_on_arches() {
    let (code, a, _) = datom(&["field", "--scene", "arch-a"]);
    assert_eq!(code, 0);
    assert!(a.starts_with("i,j,k,dist\n"));
    assert_eq!(dist_at(&a, CellPos::new(6, 5, 2)), Some(0));
    let da = dist_at(&a, CellPos::new(0, 0, 2)).unwrap();
    let (_, b, _) = datom(&["field", "--scene", "arch-b", "--goal", "6,5,2"]);
    let db = dist_at(&b, CellPos::new(0, 0, 2)).unwrap();
    assert!(db > da);

    let path = tmp("arch-a-field.csv");
    let (code, out, _) = datom(&["field", "--scene", "arch-a", "--csv", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), a);
}

#[test]
fn plans() {
    let (code, a, _) = datom(&["plan", "--scene", "arch-a"]);
    assert_eq!(code, 0);
    let steps = plan_lines(&a);
    let max_k = steps.iter().map(|s| s["to"][2].as_i64().unwrap()).max().unwrap();
    assert!(max_k <= 3);
    let dists: Vec<u64> = steps.iter().map(|s| s["dist"].as_u64().unwrap()).collect();
    assert!(dists.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(dists.last(), Some(&0));
    assert_eq!(steps[0]["from"], serde_json::json!([0, 0, 2]));

    let (_, b, _) = datom(&["plan", "--scene", "arch-b"]);
    let max_k = plan_lines(&b).iter().map(|s| s["to"][2].as_i64().unwrap()).max().unwrap();
    assert!(max_k > 4);

    let (code, empty, _) = datom(&["plan", "--scene", "arch-a", "--start", "6,5,2"]);
    assert_eq!((code, empty.as_str()), (0, ""));

    let (_, turn, _) = datom(&["plan", "--scene", "turn-double"]);
    let step = &plan_lines(&turn)[0];
    assert_eq!(step["kind"], "turn-right");
    let phases: Vec<&str> = step["helpers"].as_array().unwrap().iter().map(|h| h["phase"].as_str().unwrap()).collect();
    assert!(phases.contains(&"first-half") && phases.contains(&"second-half"));
}

#[test]
fn simulate_arch() {
    let trace = tmp("arch-a.trace.jsonl");
    let fin = tmp("arch-a.final.json");
    let args = [
        "simulate",
        "--scene",
        "arch-a",
        "--trace",
        trace.to_str().unwrap(),
        "--final",
        fin.to_str().unwrap(),
    ];
    let (code, _, err) = datom(&args);
    assert_eq!(code, 0, "{err}");
    let first = std::fs::read_to_string(&trace).unwrap();
    let loaded = config::load(&fin).unwrap();
    assert_eq!(loaded.mobile_pos(), Some(CellPos::new(6, 5, 2)));
    assert_eq!(loaded.config.len(), 130);

    let records: Vec<Value> = first.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    for r in &records {
        let keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, ["t", "seq", "kind", "module", "detail"]);
    }
    let motions = records.iter().filter(|r| r["kind"] == "motion-complete").count();
    let (_, plan, _) = datom(&["plan", "--scene", "arch-a"]);
    assert_eq!(motions, plan.lines().count());

    datom(&args);
    assert_eq!(std::fs::read_to_string(&trace).unwrap(), first);

    let (code, stdout, _) = datom(&["simulate", "--scene", "arch-a", "--tdef", "3", "--lmsg", "2"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().filter(|l| l.contains("motion-complete")).count(), motions);
}

#[test]
fn render_layers() {
    let (_, text, _) = datom(&["render", "--scene", "arch-a", "--layer", "2"]);
    assert!(text.contains('#') && text.contains('G'));
    let (_, empty, _) = datom(&["render", "--scene", "arch-a", "--layer", "9"]);
    assert!(empty.lines().skip(1).all(|l| l.chars().all(|c| c == '.' || c == ' ')));
    let (_, below, _) = datom(&["render", "--scene", "arch-a", "--layer", "-1"]);
    assert!(!below.contains('#'));

    let p = write_config(
        "deformed.json",
        r#"{"radius": 1, "modules": [
            {"id": 1, "pos": [0, 0, 0], "deformation": {"axis": "sw", "fraction": 1}},
            {"id": 2, "pos": [1, 0, 0], "deformation": {"axis": "up", "fraction": 0.5}}]}"#,
    );
    let (code, text, _) = datom(&["render", "--config", &p]);
    assert_eq!(code, 0);
    assert_eq!(text.lines().nth(1), Some("< +"));
}

#[test]
fn every_surface_reports() {
    let p = write_config("single.json", r#"{"radius": 1, "modules": [{"id": 1, "pos": [0, 0, 0]}]}"#);
    let (code, text, _) = datom(&["every-surface", "--config", &p, "--goal", "1,0,0"]);
    assert_eq!(code, 0);
    assert_eq!(text.lines().filter(|l| l.contains(" reachable ")).count(), 12);
    assert!(text.ends_with("surface=12 reachable=12 unreachable=0 fraction=1.0000\n"));

    let (_, arch, _) = datom(&["every-surface", "--scene", "arch-a"]);
    assert!(arch.ends_with("surface=244 reachable=244 unreachable=0 fraction=1.0000\n"));

    let cave = write_config("cave.json", &cavity_config(false));
    let (code, text, _) = datom(&["every-surface", "--config", &cave, "--goal", "2,0,0"]);
    assert_eq!(code, 0);
    assert!(text.contains("0,0,0 unreachable"));
}

#[test]
fn exit_codes() {
    assert_eq!(datom(&[]).0, EXIT_USAGE);
    assert_eq!(datom(&["field"]).0, EXIT_USAGE);
    assert_eq!(datom(&["field", "--scene", "arch-a", "--goal", "1,2"]).0, EXIT_USAGE);
    assert_eq!(datom(&["field", "--scene", "arch-a", "--config", "x"]).0, EXIT_USAGE);
    assert_eq!(datom(&["--help"]).0, 0);

    assert_eq!(datom(&["field", "--scene", "nope"]).0, EXIT_CONFIG);
    assert_eq!(datom(&["field", "--config", "/nonexistent.json", "--goal", "0,0,0"]).0, EXIT_CONFIG);
    let dup = write_config(
        "dup.json",
        r#"{"radius": 1, "modules": [{"id": 1, "pos": [0,0,0]}, {"id": 2, "pos": [0,0,0]}]}"#,
    );
    assert_eq!(datom(&["field", "--config", &dup, "--goal", "1,0,0"]).0, EXIT_CONFIG);
    let split = write_config(
        "split.json",
        r#"{"radius": 1, "modules": [{"id": 1, "pos": [0,0,0]}, {"id": 2, "pos": [5,0,0]}]}"#,
    );
    assert_eq!(datom(&["field", "--config", &split, "--goal", "1,0,0"]).0, EXIT_CONFIG);

    assert_eq!(datom(&["field", "--scene", "arch-a", "--goal", "0,0,0"]).0, EXIT_GOAL);
    assert_eq!(datom(&["field", "--scene", "arch-a", "--goal", "20,20,20"]).0, EXIT_GOAL);

    let cave = write_config("cave-start.json", &cavity_config(false));
    assert_eq!(datom(&["plan", "--config", &cave, "--goal", "2,0,0", "--start", "0,0,0"]).0, EXIT_START);
    let trapped = write_config("cave-mobile.json", &cavity_config(true));
    assert_eq!(datom(&["simulate", "--config", &trapped, "--goal", "2,0,0"]).0, EXIT_UNREACHABLE);

    assert_eq!(datom(&["geometry", "--thickness", "0.18"]).0, EXIT_THICKNESS);
    assert_eq!(datom(&["geometry", "--thickness", "0.18", "--compat"]).0, 0);
    assert_eq!(datom(&["geometry", "--radius", "-1"]).0, EXIT_USAGE);
}

#[test]
fn geometry_lines() {
    let (code, text, _) = datom(&["geometry", "--radius", "2"]);
    assert_eq!(code, 0);
    let kv: std::collections::BTreeMap<&str, &str> = text.lines().filter_map(|l| l.split_once('=')).collect();
    let c: f64 = kv["c"].parse().unwrap();
    assert!((c / 2.0 - 0.61678).abs() < 1e-5);
    assert_eq!(kv["a"], kv["c"]);
    assert_eq!(kv["convention"], "strict");
    for key in ["r", "t", "e", "r_corr", "c_corr", "e_corr", "core_edge", "max_thickness"] {
        assert!(kv.contains_key(key), "{key}");
    }
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_datom");
    let ok = Command::new(bin).args(["plan", "--scene", "lone-pair"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8(ok.stdout).unwrap().lines().count(), 1);
    let bad = Command::new(bin).args(["field", "--scene", "arch-a", "--goal", "0,0,0"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_GOAL));
    assert!(!bad.stderr.is_empty());
}

#[test]
fn scene_simulations_stay_connected() {
    for name in datom::scene::names() {
        let s = datom::scene::load(name).unwrap().unwrap();
        let out = datom_core::run(&s.config, s.goal.unwrap(), s.mobile.unwrap(), &Default::default()).unwrap();
        assert_eq!(out.config.position_of(s.mobile.unwrap()), s.goal);
        let states = common::replay_connectivity(&s.config, &out.trace).unwrap();
        assert_eq!(states, out.actions.len());
    }
}
