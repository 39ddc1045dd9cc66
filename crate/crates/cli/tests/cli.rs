use std::io::Write;
use std::process::Command;

use morphcat_cli::{render_json, run, JsonDerivation, JsonNode};

fn sample_path() -> String {
    format!("{}/../core/data/sample.lex", env!("CARGO_MANIFEST_DIR"))
}

/// Runs in-process; returns (status, stdout, stderr).
fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("morphcat").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn scope_ambiguity_sems() {
    let lex = sample_path();
    let (code, out, _) = call(&[
        "parse", "-l", &lex, "uzun", "kol", "-lu", "gömlek", "--format", "sem",
    ]);
    assert_eq!(code, 0);
    let mut lines: Vec<&str> = out.lines().collect();
    lines.sort();
    assert_eq!(
        lines,
        [
            "long(shirt(y,has(sleeve(z))))",
            "shirt(y,has(long(sleeve(z))))"
        ]
    );
}

#[test]
fn zero_parses_is_status_one() {
    let (code, out, _) = call(&["parse", "-l", &sample_path(), "kadın", "-a", "konuş", "-tu"]);
    assert_eq!(code, 1);
    assert!(out.contains("0 parses"));
}

#[test]
fn no_restr_flag() {
    let (code, out, _) = call(&[
        "parse",
        "--no-restr",
        "kadın",
        "-a",
        "konuş",
        "-tu",
        "--format",
        "sem",
    ]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn missing_lexicon_is_status_two() {
    let (code, _, err) = call(&["parse", "-l", "missing.lex", "x"]);
    assert_eq!(code, 2);
    assert!(err.contains("missing.lex"));
}

#[test]
fn unknown_token_is_named() {
    let (code, _, err) = call(&["parse", "kol", "zzz"]);
    assert_eq!(code, 2);
    assert!(err.contains("zzz"), "{err}");
}

#[test]
fn goal_and_combinators() {
    let (code, out, _) = call(&[
        "parse", "--goal", "s\\n", "kadın", "-a", "dön", "-erek", "konuş", "-tu",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("2 parses"), "{out}");
    // Without crossed composition the dative cannot reach past dön.
    let (code, _, _) = call(&[
        "parse",
        "--combinators",
        "fa,ba",
        "kadın",
        "-a",
        "dön",
        "-erek",
        "konuş",
        "-tu",
    ]);
    assert_eq!(code, 1);
    let (code, _, _) = call(&["parse", "--combinators", "zz", "kol"]);
    assert_eq!(code, 2);
}

#[test]
fn words_mode() {
    let (code, out, _) = call(&[
        "parse", "--words", "uzun", "kollu", "gömlek", "--format", "sem",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 2);
    let (code, _, err) = call(&["parse", "--words", "zzz"]);
    assert_eq!(code, 2);
    assert!(err.contains("zzz"));
}

#[test]
fn tree_output() {
    let (code, out, _) = call(&["parse", "iyi", "oku", "-muş", "çocuk"]);
    assert_eq!(code, 0);
    assert!(out.contains("[[[iyi oku] muş] çocuk]"), "{out}");
    assert!(out.contains("-muş (mHş) := (n/n)\\(s\\n)"), "{out}");
    assert!(out.trim_end().ends_with("1 parse"));
}

#[test]
fn json_round_trips() {
    let (code, out, _) = call(&["parse", "uzun", "kol", "-lu", "gömlek", "--format", "json"]);
    assert_eq!(code, 0);
    let doc: Vec<JsonDerivation> = serde_json::from_str(&out).unwrap();
    assert_eq!(doc.len(), 2);
    assert_eq!(render_json(&doc) + "\n", out);
    assert!(doc
        .iter()
        .all(|d| d.category == "n" && d.surface == "uzun kollu gömlek"));
    let JsonNode::Combined { combinator, .. } = &doc[0].tree else {
        panic!("root is a leaf");
    };
    assert_eq!(combinator, "fa");
}

#[test]
fn realize_command() {
    let lex = sample_path();
    assert_eq!(
        call(&["realize", "-l", &lex, "lH", "kol"]),
        (0, "lu\n".into(), String::new())
    );
    assert_eq!(call(&["realize", "-l", &lex, "DHr", "yap"]).1, "tır\n");
    let (code, _, err) = call(&["realize", "-l", &lex, "lH", "krk"]);
    assert_eq!(code, 1);
    assert!(err.contains("no harmony source"));
    assert_eq!(call(&["realize", "-l", &lex, "nope", "kol"]).0, 2);
}

#[test]
fn segment_command() {
    let (code, out, _) = call(&["segment", "kollu", "gömlek"]);
    assert_eq!(code, 0);
    assert_eq!(out, "kollu\tkol -lH@lu\ngömlek\tgömlek\n");
    let (code, _, err) = call(&["segment", "zzz"]);
    assert_eq!(code, 1);
    assert!(err.contains("zzz"));
}

#[test]
fn lex_validate() {
    let (code, out, _) = call(&["lex", "validate", "-l", &sample_path()]);
    assert_eq!(code, 0);
    assert!(out.contains("0 errors"));

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        bad,
        "entry x {{\n  phon: \"x\"\n  cat: (n) \\<bound,concat> n\n  sem: \\p.p\n}}"
    )
    .unwrap();
    let (code, out, _) = call(&["lex", "validate", "-l", bad.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("1 errors"), "{out}");
    assert!(out.starts_with("1:1: error"), "{out}");

    assert_eq!(call(&["lex", "validate", "-l", "/nonexistent/x.lex"]).0, 2);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_morphcat");
    let ok = Command::new(bin)
        .args(["parse", "kol", "-lu", "gömlek"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("kollu gömlek"));
    let usage = Command::new(bin).arg("bogus").output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
}
