use std::process::Command as Proc;

use channel_core::presets::bsc;
use cli::{cmd_exponents, cmd_simulate, cmd_tradeoff, cmd_zero_error, load_channel, parse_grid, CliError, ModeArg};
use control_phase::t_star;
use simulator::{ChannelSpec, CodeConfig};

const BIN: &str = env!("CARGO_BIN_EXE_eebounds");

fn rows(csv: &str) -> Vec<Vec<Option<f64>>> {
    csv.lines().skip(1).take_while(|l| !l.is_empty()).map(|l| l.split(',').map(|c| c.parse().ok()).collect()).collect()
}

fn temp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("eebounds-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn grids_parse_ranges_lists_and_names() {
    assert_eq!(parse_grid("0:1:3", &[]).unwrap(), vec![0.0, 0.5, 1.0]);
    assert_eq!(parse_grid("0.1, C", &[("C", 2.0)]).unwrap(), vec![0.1, 2.0]);
    assert_eq!(parse_grid("0.3:C:1", &[("C", 2.0)]).unwrap(), vec![0.3]);
    for bad in ["", "0:1:0", "a,b", "0:1", "1:2:3:4", "-1,2"] {
        assert!(matches!(parse_grid(bad, &[]), Err(CliError::Usage(_))), "{bad}");
    }
}

#[test]
fn exponents_on_bsc() {
    let w = bsc(0.25).unwrap();
    let c = channel_core::capacity(&w);
    let grid = parse_grid("0:C:50", &[("C", c)]).unwrap();
    let csv = cmd_exponents(&w, &grid, false, &mut Vec::new()).unwrap();
    assert!(csv.starts_with("R,E_r,e_sp,E_h,E_h_improved\n"));
    let table = rows(&csv);
    assert_eq!(table.len(), 50);
    for r in &table {
        let v: Vec<f64> = r.iter().map(|c| c.unwrap()).collect();
        assert!(v[1] <= v[2] + 1e-12, "{v:?}");
    }
    assert!(table[49][1..].iter().all(|v| v.unwrap() == 0.0));
    assert!((table[0][4].unwrap() - t_star(&w)).abs() < 1e-9);
}

#[test]
fn tradeoff_on_bsc_meets_at_both_ends() {
    let w = bsc(0.25).unwrap();
    let r = 0.0862;
    let er = exponents::random_coding_exponent(&w, r, None).unwrap().value;
    let grid = parse_grid("0:Er:8", &[("Er", er)]).unwrap();
    let csv = cmd_tradeoff(&w, r, &grid, ModeArg::Both, false, &mut Vec::new()).unwrap();
    assert_eq!(csv, cmd_tradeoff(&w, r, &grid, ModeArg::Both, false, &mut Vec::new()).unwrap());
    let table = rows(&csv);
    let c = channel_core::capacity(&w);
    let zero = (1.0 - r / c) * 0.5 * 3f64.ln();
    for k in [2, 3, 4] {
        assert!((table[0][k].unwrap() - zero).abs() < 2e-3);
        assert!((table[7][k].unwrap() - er).abs() < 2e-3);
    }
    for row in &table {
        let outer = row[4].unwrap();
        assert!(row[2].unwrap() <= outer + 1e-6 && row[3].unwrap() <= outer + 1e-6, "{row:?}");
    }

    let relaxed = rows(&cmd_tradeoff(&w, r, &grid[..2], ModeArg::Relaxed, false, &mut Vec::new()).unwrap());
    assert!(relaxed[0][2].is_none() && relaxed[0][5].is_none());
    assert_eq!(relaxed[1][3], table[1][3]);
}

#[test]
fn tradeoff_without_outer_bound_explains_why() {
    let w = load_channel("noiseless:2").unwrap();
    let mut err = Vec::new();
    let csv = cmd_tradeoff(&w, 0.3, &[0.0, 0.1], ModeArg::Relaxed, false, &mut err).unwrap();
    assert!(String::from_utf8(err).unwrap().contains("zero zero-error capacity"));
    for row in rows(&csv) {
        assert!(row[3].is_some() && row[4].is_none());
    }
}

#[test]
fn bits_flag_rescales_output_only() {
    let w = bsc(0.25).unwrap();
    let nats = rows(&cmd_exponents(&w, &[0.05], false, &mut Vec::new()).unwrap());
    let bits = rows(&cmd_exponents(&w, &[0.05], true, &mut Vec::new()).unwrap());
    for (b, n) in bits[0].iter().zip(&nats[0]) {
        assert!((b.unwrap() * 2f64.ln() - n.unwrap()).abs() < 1e-12);
    }
}

#[test]
fn zero_error_examples() {
    let w = load_channel("paper3x5").unwrap();
    let (_, side) = cmd_zero_error(&w, &[0.0], 51, false, &mut Vec::new()).unwrap();
    let profile = rows(&side);
    let at = |s: f64| profile.iter().find(|r| (r[0].unwrap() - s).abs() < 1e-12).unwrap()[1].unwrap();
    assert!((at(0.0) - 0.7).abs() < 5e-4);
    assert!((at(0.5) - 0.7027).abs() < 5e-4);
    assert!((at(0.18) - 0.7299).abs() < 5e-4);

    for q in [0.1f64, 0.2, 0.5] {
        let z = load_channel(&format!("z:{q}")).unwrap();
        let (csv, _) = cmd_zero_error(&z, &[0.0], 3, false, &mut Vec::new()).unwrap();
        assert!((rows(&csv)[0][2].unwrap() - 0.5 * (1.0 / q).ln()).abs() < 1e-6);
    }

    let b = bsc(0.25).unwrap();
    let c = channel_core::capacity(&b);
    let grid: Vec<f64> = (0..6).map(|i| c * i as f64 / 6.0).collect();
    let (csv, _) = cmd_zero_error(&b, &grid, 3, false, &mut Vec::new()).unwrap();
    assert!(rows(&csv).iter().all(|r| r[1] == Some(0.0)));
}

#[test]
fn simulate_is_repeatable_and_clean_on_a_noiseless_channel() {
    let cfg = CodeConfig {
        channel: ChannelSpec::Named("noiseless:3".into()),
        n: 200,
        rate: 0.02,
        erasure_exponent: 0.2,
        alpha: 0.5,
        p: None,
        x: None,
        seed: 9,
        trials: 2000,
    };
    let (a, b) = (temp("a.json"), temp("b.json"));
    let log = temp("runs.csv");
    let _ = std::fs::remove_file(&log);
    let res = cmd_simulate(&cfg, Some(&log), Some(&a), &mut Vec::new(), &mut Vec::new()).unwrap();
    cmd_simulate(&cfg, Some(&log), Some(&b), &mut Vec::new(), &mut Vec::new()).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!((res.error_count, res.erasure_count), (0, 0));
    let logged = std::fs::read_to_string(&log).unwrap();
    assert_eq!(logged.lines().count(), 3);
    assert!(logged.starts_with("n,rate,"));
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Proc::new(BIN).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn binary_exit_codes() {
    let (code, out, _) = run(&["exponents", "--rate-grid", "0,0.05"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 3);
    assert_eq!(run(&["exponents", "--rate-grid", "0:1"]).0, 2);
    assert_eq!(run(&["tradeoff", "--rate", "0.5"]).0, 2);
    assert_eq!(run(&["--channel", "nope", "exponents"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["simulate", "/nonexistent/config.json"]).0, 2);

    let big = temp("big.json");
    std::fs::write(&big, r#"{"channel":"bsc:0.01","n":2000,"rate":0.3,"erasure_exponent":0.01,"alpha":0.5,"seed":1,"trials":10}"#).unwrap();
    let (code, _, err) = run(&["simulate", big.to_str().unwrap()]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn example_config_runs_from_the_command_line() {
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/simulate_example.json");
    let t = std::time::Instant::now();
    let (code, out, err) = run(&["simulate", cfg]);
    assert_eq!(code, 0, "{err}");
    assert!(t.elapsed().as_secs() < 60);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["trials"], 100_000);
    assert!(err.contains("erasures"));
    assert_eq!(run(&["simulate", cfg, "--trials", "500"]).1, run(&["simulate", cfg, "--trials", "500"]).1);
}
