use std::process::{Command, Output};

use csop::c64;
use csop::cli::*;
use csop::error::{ConfigError, Error};

fn csop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csop")).args(args).env_remove("CSOP_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn config_err(r: Result<RunConfig, ConfigError>) -> ConfigError {
    r.expect_err("config should be rejected")
}

#[test]
fn config_defaults_and_round_trip() {
    let cfg = parse_config(Subcommand::KpFig1, "points = 7 # short sweep\nformat = json\n").unwrap();
    assert_eq!(cfg.usize("points"), Some(7));
    assert_eq!(cfg.float("v0_min"), Some(0.5));
    assert_eq!(cfg.format, Format::Json);
    let text = serialize_config(&cfg);
    assert_eq!(parse_config(Subcommand::KpFig1, &text).unwrap(), cfg);
    for cmd in Subcommand::ALL {
        let base = match cmd {
            Subcommand::Takagi | Subcommand::Antilinear => "random_n = 4",
            _ => "",
        };
        let cfg = parse_config(cmd, base).unwrap();
        assert_eq!(parse_config(cmd, &serialize_config(&cfg)).unwrap(), cfg, "{}", cmd.name());
    }
}

#[test]
fn config_errors() {
    match config_err(parse_config(Subcommand::KpFig1, "points = 5\nbogus = 1")) {
        ConfigError::UnknownKey { line, key } => assert_eq!((line, key.as_str()), (2, "bogus")),
        e => panic!("{e:?}"),
    }
    assert!(matches!(
        config_err(parse_config(Subcommand::KpFig1, "points = many")),
        ConfigError::TypeMismatch { line: 1, .. }
    ));
    assert_eq!(config_err(parse_config(Subcommand::Takagi, "seed = 3")), ConfigError::MissingRequired("matrix".into()));
    match config_err(parse_config(Subcommand::DecayBound, "q = -0.5")) {
        ConfigError::Precondition { key, constraint } => {
            assert_eq!(key, "q");
            assert!(constraint.contains("q >= 0"));
        }
        e => panic!("{e:?}"),
    }
    assert!(matches!(
        config_err(parse_config(Subcommand::KpFig1, "points = 3\npoints = 4")),
        ConfigError::Syntax { .. }
    ));
    assert!(matches!(config_err(parse_config(Subcommand::KpFig1, "just words")), ConfigError::Syntax { .. }));
}

#[test]
fn complex_literals() {
    assert_eq!(parse_complex("1.5, -2"), Some(c64::new(1.5, -2.0)));
    assert_eq!(parse_complex("4-0.2i"), Some(c64::new(4.0, -0.2)));
    assert_eq!(parse_complex("0.3i"), Some(c64::new(0.0, 0.3)));
    assert_eq!(parse_complex("abc"), None);
}

#[test]
fn json_and_csv_round_trip() {
    let mut t = ResultTable::new(["a", "b"]);
    t.meta("note", "x").meta("n", 2);
    t.push(vec![0.1, 1.0 / 3.0]);
    t.push(vec![-2.5e-300, f64::NAN]);
    let back = parse_json(&emit_json(&t)).unwrap();
    assert_eq!(back.columns, t.columns);
    assert_eq!(back.metadata, t.metadata);
    assert_eq!(back.rows[0], t.rows[0]);
    assert!(back.rows[1][1].is_nan());
    let csv = emit_csv(&t);
    assert!(csv.starts_with("# "));
    let back = parse_csv(&csv).unwrap();
    assert_eq!(back.rows[0], t.rows[0]);
    assert_eq!(back.rows[1][0], -2.5e-300);
    assert_eq!(back.metadata, t.metadata);
    let empty = ResultTable::new(["only"]);
    let back = parse_json(&emit_json(&empty)).unwrap();
    assert!(back.rows.is_empty() && back.columns == ["only"]);
}

#[test]
fn float_format_is_round_trip_exact() {
    for x in [0.1, 1.0 / 3.0, 6.02214076e23, -1e-310, 12345.678901234567] {
        let s = format_float(x);
        assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        let mantissa = s.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
        assert_eq!(mantissa.len(), 17);
    }
}

#[test]
fn matrix_and_potential_files() {
    let m = parse_matrix_csv("# 2x2\n1,0, 0,1\n0,1, 2,-0.5\n").unwrap();
    assert_eq!(m[(1, 1)], c64::new(2.0, -0.5));
    assert_eq!(parse_matrix_csv(&format_matrix_csv(&m)).unwrap(), m);
    assert!(parse_matrix_csv("1,0,2\n").is_err());
    let p = parse_potential_csv("x,v\n1.0,3.0\n0.0,1.0\n").unwrap();
    assert_eq!(p.eval(0.5), 2.0);
    assert_eq!(p.eval(-1.0), 1.0);
    assert!(parse_potential_csv("0,1\n0,2\n").is_err());
}

#[test]
fn takagi_binary_on_a_small_matrix() {
    let dir = std::env::temp_dir().join(format!("csop-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("m.csv");
    // [[1, i], [i, 1]]: singular values |1 ± i| = √2, twice.
    std::fs::write(&path, "1,0,0,1\n0,1,1,0\n").unwrap();
    let o = csop(&["takagi", "-s", &format!("matrix={}", path.display())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = parse_csv(&stdout(&o)).unwrap();
    for s in t.column("sigma").unwrap() {
        assert!((s - 2f64.sqrt()).abs() < 1e-12);
    }
    std::fs::write(&path, "1,0,2,0\n0,0,1,0\n").unwrap();
    let o = csop(&["takagi", "-s", &format!("matrix={}", path.display())]);
    assert_eq!(o.status.code(), Some(2));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn exit_codes() {
    let o = csop(&["nonsense"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(csop(&["decay-bound", "-s", "q=-1"]).status.code(), Some(1));
    assert_eq!(csop(&["kp-fig1", "-s", "wat=1"]).status.code(), Some(1));
    assert_eq!(csop(&["takagi", "-c", "/nonexistent/csop.cfg"]).status.code(), Some(1));
    // Energy outside the configured gap is caught while parsing.
    assert_eq!(csop(&["decay-bound", "-s", "energy=5"]).status.code(), Some(1));
    // Rate past the critical one is a numerical precondition.
    assert_eq!(csop(&["decay-bound", "-s", "energy=1.3", "-s", "q=0.9"]).status.code(), Some(2));
    // Empty search window.
    let o = csop(&["resonance", "-s", "n=300", "-s", "re_window=10, 11"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csop(&["--help"]).status.code(), Some(0));
}

#[test]
fn kp_fig1_schema_and_determinism() {
    let a = csop(&["kp-fig1", "-s", "points=6"]);
    assert!(a.status.success());
    let t = parse_csv(&stdout(&a)).unwrap();
    assert_eq!(t.columns, ["v0", "G", "W", "G_over_W", "q_exact", "q_bound", "rel_diff"]);
    assert_eq!(t.rows.len(), 6);
    let b = csop(&["kp-fig1", "-s", "points=6"]);
    assert_eq!(a.stdout, b.stdout);
    let j = csop(&["kp-fig1", "-s", "points=6", "-f", "json"]);
    let tj = parse_json(&stdout(&j)).unwrap();
    assert_eq!(tj.rows, t.rows);
    assert_eq!(tj.metadata.get("subcommand").map(String::as_str), Some("kp-fig1"));
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = ["resolvent-map", "-s", "n=120", "-s", "nre=5", "-s", "nim=4"];
    let one = Command::new(env!("CARGO_BIN_EXE_csop")).args(args).env("CSOP_THREADS", "1").output().unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_csop")).args(args).env("CSOP_THREADS", "4").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_csop")).args(args).env("CSOP_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn run_reports_config_in_metadata() {
    let cfg = parse_config(Subcommand::DecayBound, "points = 5").unwrap();
    let t = run(&cfg).unwrap();
    assert_eq!(t.rows.len(), 5);
    assert_eq!(t.metadata.get("config.points").map(String::as_str), Some("5"));
    let single = parse_config(Subcommand::DecayBound, "energy = 1.4375\nq = 0.2").unwrap();
    let t = run(&single).unwrap();
    assert_eq!(t.rows.len(), 1);
    let bad = parse_config(Subcommand::DecayBound, "energy = 1.3\nq = 0.9").unwrap();
    assert!(matches!(run(&bad), Err(Error::QBeyondCritical { .. }) | Err(Error::ShiftLeavesGap { .. })));
}
