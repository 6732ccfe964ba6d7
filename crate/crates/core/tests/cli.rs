use std::collections::HashMap;
use std::path::PathBuf;
use std::process::{Command, Output};

use qudit_discord::opcore::{self, parse_state_json, Bell};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qudit-discord"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// `key value...` lines into a map of the first token after the key.
fn fields(text: &str) -> HashMap<String, String> {
    text.lines()
        .filter_map(|l| {
            let mut it = l.split_whitespace();
            Some((it.next()?.to_string(), it.next()?.to_string()))
        })
        .collect()
}

fn num(map: &HashMap<String, String>, key: &str) -> f64 {
    map.get(key)
        .unwrap_or_else(|| panic!("missing {key} in {map:?}"))
        .parse()
        .unwrap()
}

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

#[test]
fn help_exits_zero_for_every_command() {
    for cmd in [
        vec!["--help"],
        vec!["corr", "--help"],
        vec!["sweep", "--help"],
        vec!["twirl", "--help"],
        vec!["discord", "--help"],
        vec!["check", "--help"],
    ] {
        assert_eq!(run(&cmd).status.code(), Some(0), "{cmd:?}");
    }
}

#[test]
fn corr_singlet() {
    let f = fields(&run_ok(&[
        "corr", "--alpha", "0", "--gamma", "1", "--dim", "3",
    ]));
    close(num(&f, "mutual_info"), 2.0, 1e-12);
    close(num(&f, "classical"), 1.0, 1e-12);
    close(num(&f, "discord"), 1.0, 1e-12);
    close(num(&f, "negativity"), 1.0, 1e-12);
}

#[test]
fn corr_uniform_bell_mixture() {
    let f = fields(&run_ok(&[
        "corr", "--alpha", "0", "--gamma", "0", "--dim", "3",
    ]));
    close(num(&f, "classical"), 0.081704, 1e-6);
    close(num(&f, "discord"), 1.0 / 3.0, 1e-11);
    close(num(&f, "negativity"), 0.0, 0.0);
}

#[test]
fn corr_numeric_agrees() {
    let f = fields(&run_ok(&[
        "corr",
        "--alpha",
        "0.25",
        "--gamma",
        "0.5",
        "--dim",
        "3",
        "--numeric",
    ]));
    assert!(num(&f, "classical_diff").abs() < 1e-7);
    close(num(&f, "classical_numeric"), num(&f, "classical"), 1e-7);
}

#[test]
fn corr_out_of_range_is_a_user_error() {
    let out = run(&["corr", "--alpha", "0.6", "--gamma", "0", "--dim", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
    assert_eq!(run(&["corr", "--alpha", "x"]).status.code(), Some(2));
}

struct Row {
    alpha: f64,
    beta: f64,
    gamma: f64,
    values: Option<[f64; 4]>,
}

fn parse_csv(text: &str) -> Vec<Row> {
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("param,alpha,beta,gamma,classical,discord,mutual_info,negativity,invalid")
    );
    lines
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            assert_eq!(cells.len(), 9, "{l}");
            let f = |i: usize| cells[i].parse::<f64>().unwrap();
            let values = match cells[8] {
                "0" => Some([f(4), f(5), f(6), f(7)]),
                "1" => {
                    assert!(cells[4..8].iter().all(|c| c.is_empty()));
                    None
                }
                other => panic!("bad flag {other}"),
            };
            Row {
                alpha: f(1),
                beta: f(2),
                gamma: f(3),
                values,
            }
        })
        .collect()
}

#[test]
fn sweep_discord_line_at_zero_gamma() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.csv");
    let p = path.to_str().unwrap();
    run_ok(&[
        "sweep", "--dim", "3", "--fix", "gamma=0", "--vary", "alpha", "--from", "0", "--to", "0.5",
        "--steps", "200", "--out", p,
    ]);
    let rows = parse_csv(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(rows.len(), 200);
    for r in &rows {
        let [c, q, i, _] = r.values.expect("valid");
        // Cells carry 12 significant digits.
        close(q, (1.0 - 2.0 * r.alpha) / 3.0, 1e-11);
        close(i, c + q, 1e-11);
        if r.alpha > 0.0 && r.alpha < 0.5 {
            assert!(q > c, "alpha {}", r.alpha);
        }
    }
}

#[test]
fn sweep_is_byte_identical_across_runs() {
    let args = [
        "sweep",
        "--dim",
        "4",
        "--fix",
        "beta=0.05",
        "--vary",
        "gamma",
        "--from",
        "0",
        "--to",
        "1",
        "--steps",
        "57",
    ];
    assert_eq!(run_ok(&args), run_ok(&args));
}

#[test]
fn sweep_negativity_crossings_and_zero_point() {
    let text = run_ok(&[
        "sweep",
        "--dim",
        "3",
        "--fix",
        "beta=0.05",
        "--vary",
        "gamma",
        "--from",
        "0",
        "--to",
        "0.85",
        "--steps",
        "171",
    ]);
    let rows = parse_csv(&text);
    let valid: Vec<(f64, [f64; 4])> = rows
        .iter()
        .filter_map(|r| Some((r.gamma, r.values?)))
        .collect();
    assert_eq!(valid.len(), rows.len());
    let sign_changes = |k: usize| {
        let diffs: Vec<f64> = valid
            .iter()
            .map(|(_, v)| v[3] - v[k])
            .filter(|x| x.abs() > 1e-9)
            .collect();
        diffs
            .windows(2)
            .filter(|w| w[0].signum() != w[1].signum())
            .count()
    };
    assert!(sign_changes(0) >= 1, "N - C never changes sign");
    assert!(sign_changes(1) >= 1, "N - Q never changes sign");
    let (_, at_beta) = valid
        .iter()
        .min_by(|a, b| (a.0 - 0.05).abs().total_cmp(&(b.0 - 0.05).abs()))
        .unwrap();
    assert!(at_beta.iter().all(|v| v.abs() < 1e-9), "{at_beta:?}");
}

#[test]
fn sweep_flags_invalid_points() {
    let rows = parse_csv(&run_ok(&[
        "sweep",
        "--dim",
        "3",
        "--fix",
        "beta=0.05",
        "--vary",
        "gamma",
        "--from",
        "0",
        "--to",
        "1",
        "--steps",
        "11",
    ]));
    for r in &rows {
        assert_eq!(r.values.is_none(), r.alpha < 0.0, "gamma {}", r.gamma);
        close(r.beta, 0.05, 1e-12);
    }
}

#[test]
fn sweep_unwritable_path() {
    let out = run(&[
        "sweep",
        "--dim",
        "3",
        "--fix",
        "gamma=0",
        "--vary",
        "alpha",
        "--from",
        "0",
        "--to",
        "0.5",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn twirl_singlet() {
    let f = fields(&run_ok(&[
        "twirl",
        fixture("singlet_d3.json").to_str().unwrap(),
    ]));
    close(num(&f, "alpha"), 0.0, 1e-12);
    close(num(&f, "gamma"), 1.0, 1e-12);
}

#[test]
fn twirl_family_member_is_unchanged() {
    let f = fields(&run_ok(&[
        "twirl",
        fixture("family_d3.json").to_str().unwrap(),
    ]));
    close(num(&f, "alpha"), 0.1, 1e-12);
    close(num(&f, "gamma"), 0.3, 1e-12);
}

#[test]
fn twirl_random_fixture_keeps_singlet_weight() {
    let input = fixture("random_d3.json");
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("out.json");
    let f = fields(&run_ok(&[
        "twirl",
        input.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--report",
    ]));
    let rho = parse_state_json(&std::fs::read_to_string(&input).unwrap())
        .unwrap()
        .validate()
        .unwrap();
    let singlet = rho.expectation(&Bell::PsiMinus.vector(3));
    close(num(&f, "gamma"), singlet, 1e-10);
    close(num(&f, "c_minus"), singlet, 1e-10);
    assert!(num(&f, "residual") < 1e-10);
    assert!(f.contains_key("a_2") && f.contains_key("b") && f.contains_key("c_plus"));

    let out = parse_state_json(&std::fs::read_to_string(&out_path).unwrap())
        .unwrap()
        .validate()
        .unwrap();
    close(out.expectation(&Bell::PsiMinus.vector(3)), singlet, 1e-10);
    assert!(opcore::negativity_oracle(&out) <= opcore::negativity_oracle(&rho) + 1e-9);
}

#[test]
fn twirl_rejects_invalid_input() {
    let out = run(&[
        "twirl",
        fixture("corrupted_nonhermitian_d3.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["twirl", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn twirl_reports_non_convergence() {
    // A negative tolerance can never be met.
    let out = run(&[
        "twirl",
        fixture("random_d3.json").to_str().unwrap(),
        "--tol=-1",
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn discord_family_matches_closed_form() {
    let f = fields(&run_ok(&[
        "discord",
        fixture("family_d3.json").to_str().unwrap(),
    ]));
    close(num(&f, "classical"), num(&f, "classical_closed_form"), 1e-7);
    close(num(&f, "discord"), num(&f, "discord_closed_form"), 1e-7);
}

#[test]
fn discord_classical_diagonal() {
    let text = run_ok(&[
        "discord",
        fixture("classical_diagonal_d3.json").to_str().unwrap(),
    ]);
    let f = fields(&text);
    assert!(num(&f, "discord").abs() < 1e-7);
    assert!(num(&f, "commutator_norm") < 1e-10);
    assert!(text.contains("lower bound"));
}

#[test]
fn discord_pure_entangled_equals_entanglement_entropy() {
    let f = fields(&run_ok(&[
        "discord",
        fixture("pure_entangled_d3.json").to_str().unwrap(),
        "--restarts",
        "3",
        "--seed",
        "7",
    ]));
    let h = -(0.7f64 * 0.7f64.log2() + 0.3 * 0.3f64.log2());
    close(num(&f, "discord"), h, 1e-6);
}

#[test]
fn check_reports() {
    let text = run_ok(&["check", fixture("family_d3.json").to_str().unwrap()]);
    assert!(text.contains("in family (alpha=0.1, gamma=0.3)"), "{text}");
    assert!(text.contains("PPT"));

    let text = run_ok(&["check", fixture("npt_family_d4.json").to_str().unwrap()]);
    assert!(text.contains("NPT, negativity = 0.6"), "{text}");

    let text = run_ok(&["check", fixture("random_d3.json").to_str().unwrap()]);
    assert!(text.contains("not in family"), "{text}");
}

#[test]
fn check_names_the_violated_invariant() {
    let out = run(&[
        "check",
        fixture("corrupted_nonhermitian_d3.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Hermitian"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dims": [2, 3], "matrix": [[[1, 0]]]}"#).unwrap();
    let out = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rows"));
}
