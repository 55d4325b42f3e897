use std::path::PathBuf;

use arclab_cli::{run, EXIT_OK, EXIT_USAGE};

fn cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("arclab").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// Compares with the checked-in file, or rewrites it when `UPDATE_GOLDEN` is set.
fn check_golden(name: &str, got: &str) {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, got).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(
        want == got,
        "{name} differs from its golden file; rerun with UPDATE_GOLDEN=1 if intended\n{got}"
    );
}

#[test]
fn example_goldens() {
    for name in ["k1", "k2", "zpluspi", "c0"] {
        let (code, text, _) = cli(&["examples", name]);
        assert_eq!(code, EXIT_OK, "{name}");
        check_golden(&format!("{name}.txt"), &text);
        let (code, json, _) = cli(&["examples", name, "--json"]);
        assert_eq!(code, EXIT_OK, "{name}");
        check_golden(&format!("{name}.json"), &json);
    }
}

#[test]
fn reports_are_deterministic() {
    for args in [
        &["examples", "k1"][..],
        &["examples", "zpluspi", "--json"],
        &[
            "verify",
            "phi-p",
            "--group",
            "lex(Z, Q)",
            "-p",
            "3",
            "--samples",
            "20",
        ],
    ] {
        assert_eq!(cli(args), cli(args), "{args:?}");
    }
}

#[test]
fn listing_examples() {
    let (code, text, _) = cli(&["examples"]);
    assert_eq!(code, EXIT_OK);
    for name in ["k1", "k2", "zpluspi", "c0"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn group_analyze() {
    let (code, text, _) = cli(&["group", "analyze", "lex(Z, Q)"]);
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("n_2 = 1"), "{text}");
    let (code, json, _) = cli(&["group", "analyze", "lex(Z, Q)", "--json"]);
    assert_eq!(code, EXIT_OK);
    assert!(json.trim_start().starts_with('{'));
}

#[test]
fn valuations_list() {
    let (code, text, _) = cli(&[
        "valuations",
        "list",
        "lex(omega_tower(start=0))",
        "--primes",
        "2,3,5",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("cut{seg=0,inner=2}"), "{text}");
    assert!(text.contains("v_0      = Bottom"), "{text}");
}

#[test]
fn formula_eval() {
    let (code, text, _) = cli(&[
        "formula",
        "eval",
        "--group",
        "lex(Z, Q)",
        "--expr",
        "exists y. y^2 = x",
        "--at",
        "x = t^(0,1)",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("true"), "{text}");
    let (code, text, _) = cli(&[
        "formula",
        "eval",
        "--group",
        "lex(Z, Q)",
        "--expr",
        "exists y. y^2 = x",
        "--at",
        "x = t^(1,0)",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("false"), "{text}");
}

#[test]
fn verify_commands() {
    let (code, text, _) = cli(&[
        "verify",
        "phi-p",
        "--group",
        "lex(Z, Q)",
        "-p",
        "2",
        "--samples",
        "20",
    ]);
    assert_eq!(code, EXIT_OK, "{text}");
    assert!(text.contains("0 mismatches"));
    let (code, text, _) = cli(&[
        "verify",
        "phi-pn",
        "--group",
        "lex(real(1, pi))",
        "-p",
        "2",
        "-n",
        "2",
        "--samples",
        "10",
    ]);
    assert_eq!(code, EXIT_OK, "{text}");
    let (code, text, _) = cli(&["verify", "thm26", "--group", "lex(omega_tower(start=0))"]);
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("consistent: true"), "{text}");
    let (code, _, _) = cli(&[
        "verify",
        "classification",
        "--group",
        "lex(Zloc(3), Z, Q)",
        "--samples",
        "10",
    ]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn usage_errors() {
    assert_eq!(cli(&[]).0, EXIT_USAGE);
    assert_eq!(cli(&["frobnicate"]).0, EXIT_USAGE);
    let (code, _, err) = cli(&["group", "analyze", "lex(Z,"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.starts_with("error:"), "{err}");
    assert_eq!(cli(&["examples", "nope"]).0, EXIT_USAGE);
    assert_eq!(
        cli(&[
            "verify",
            "phi-pn",
            "--group",
            "lex(Z, Q)",
            "-p",
            "2",
            "-n",
            "5"
        ])
        .0,
        EXIT_USAGE
    );
    assert_eq!(
        cli(&[
            "formula",
            "eval",
            "--group",
            "lex(Z, Q)",
            "--expr",
            "x = ",
            "--at",
            "x = 1"
        ])
        .0,
        EXIT_USAGE
    );
    assert_eq!(cli(&["--help"]).0, EXIT_OK);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_arclab");
    let status = |args: &[&str]| {
        std::process::Command::new(bin)
            .args(args)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(
        status(&["verify", "thm26", "--group", "lex(Z, Q)"]),
        Some(EXIT_OK)
    );
    assert_eq!(status(&["group", "analyze", "lex(W)"]), Some(EXIT_USAGE));
}
