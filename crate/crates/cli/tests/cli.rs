use std::path::PathBuf;
use std::process::{Command, Output};

use pelam_core::fixtures;
use pelam_core::rational::rat;
use pelam_core::System;

fn pelam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pelam")).args(args).output().expect("run pelam")
}

fn ok(args: &[&str]) -> String {
    let out = pelam(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap().trim_end().to_string()
}

fn write(name: &str, v: serde_json::Value) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path
}

#[test]
fn measures() {
    assert_eq!(ok(&["mu", "a.0 & b.0"]), "1/4");
    assert_eq!(ok(&["mu", "a.0"]), "1/2");
    assert_eq!(ok(&["mu", "T"]), "1/1");
    assert_eq!(ok(&["entails", "a.0 & b.0", "a.0"]), "true");
    assert_eq!(ok(&["entails", "a.0", "a.0 & b.0"]), "false");
}

#[test]
fn termination_bounds() {
    let t = "nu a. (\\x.\\y.(y (+a.0) I) x) (nu b. I (+b.0) OMEGA)";
    assert_eq!(ok(&["hnv", "--fuel", "200", t]), "3/4");
    assert_eq!(ok(&["nf", "--fuel", "200", t]), "1/2");
    let json: serde_json::Value = serde_json::from_str(&ok(&["--json", "hnv", t])).unwrap();
    assert_eq!(json["value"], "3/4");
    assert_eq!(json["exact"], true);
}

#[test]
fn term_from_file() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("fair.term");
    std::fs::write(&path, "nu a. I (+a.0) OMEGA\n").unwrap();
    assert_eq!(ok(&["hnv", path.to_str().unwrap()]), "1/2");
}

#[test]
fn rewriting() {
    assert_eq!(ok(&["parse", "\\x.   x"]), "\\x. x");
    assert_eq!(ok(&["reduce", "(\\x. x x) I"]), "\\x. x");
    assert_eq!(ok(&["pnf", "(I (+a.0) OMEGA) I"]), ok(&["parse", "(I I) (+a.0) (OMEGA I)"]));
    assert_eq!(ok(&["dist", "nu a. I (+a.0) OMEGA"]), "1/2\t(\\x. x x) (\\x. x x)\n1/2\t\\x. x\nmass\t1/1");
    let out = pelam(&["reduce", "--fuel", "5", "OMEGA"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("E_FUEL"));
}

#[test]
fn mode_flag() {
    let out = pelam(&["pnf", "--mode", "pe", "{I} I"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("E_MODE_VIOLATION"));
    assert_eq!(ok(&["pnf", "--mode", "pe-braces", "{I} (nu a. I (+a.0) I)"]), "nu a. (\\x. x) (\\x. x)");
    assert_eq!(ok(&["reduce", "{I} (nu a. x (+a.0) y)"]), "nu a. x (+a.0) y");
}

#[test]
fn sampling_is_deterministic() {
    let t = "nu a. I (+a.0) OMEGA";
    let a = ok(&["estimate", "--samples", "500", "--seed", "7", t]);
    assert_eq!(a, ok(&["estimate", "--samples", "500", "--seed", "7", t]));
    assert!(a.contains(" +- "));
    assert_eq!(ok(&["sample", "--seed", "1", "I"]), "\\x. x");
}

#[test]
fn typing_derivations() {
    let cbv = write("two_cbv.json", fixtures::church_two_cbv(&rat(1, 2)).to_json());
    let out = ok(&["check", "--system", "cbv", cbv.to_str().unwrap()]);
    assert!(out.ends_with(": T >-> C[1/2] (C[1/2] (o => o) => (o => o))"), "{out}");
    let wrong = pelam(&["check", "--system", "cn", cbv.to_str().unwrap()]);
    assert_eq!(wrong.status.code(), Some(1));

    let open = write("open.json", fixtures::counting_comparison_open().to_json());
    let star = ok(&["mu-star", open.to_str().unwrap()]);
    assert!(star.contains("C[3/8]"), "{star}");

    let mut moved = 0;
    for f in fixtures::typed_fixtures().iter().filter(|f| f.system == System::Cbv) {
        let path = write(&format!("{}.json", f.name), f.derivation.to_json());
        moved += ok(&["transport", path.to_str().unwrap()]).lines().count();
    }
    assert!(moved > 0);
}

#[test]
fn proofs() {
    let cut = write("cut.json", fixtures::twice_half_cut().to_json());
    let path = cut.to_str().unwrap();
    assert_eq!(ok(&["check-proof", path]), " |-{} T >-> p -> C[1/2] C[1/2] p");
    assert_eq!(ok(&["normalize-proof", path]).split('\t').next().unwrap(), " |-{} T >-> p -> C[1/2] C[1/2] p");
    let tr = ok(&["translate", path]);
    assert!(tr.ends_with("C[1/2] C[1/2] (o => o)"), "{tr}");
    let sim = ok(&["simulate", path]);
    assert!(sim.lines().next().unwrap().starts_with("imp_cut\tok\tbeta"), "{sim}");
    assert!(sim.contains(", 0 failures, normalized: true"), "{sim}");

    let half = write("half.json", fixtures::half_identity_proof("a").to_json());
    assert_eq!(ok(&["translate", half.to_str().unwrap()]).lines().next().unwrap(), "nu a. (\\x. x) (+a.0) #c");
}

#[test]
fn usage_errors() {
    assert_eq!(pelam(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(pelam(&["mu", "--no-such-flag", "a.0"]).status.code(), Some(2));
    assert_eq!(pelam(&["check-proof", "/nonexistent/proof.json"]).status.code(), Some(2));
    assert_eq!(pelam(&["mu", "a.0 &"]).status.code(), Some(1));
}

/// Every `$ pelam ...` line in the README, byte-compared with the lines that follow it.
#[test]
fn readme_examples() {
    let readme = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../README.md")).unwrap();
    let mut lines = readme.lines().peekable();
    let mut count = 0;
    while let Some(line) = lines.next() {
        let Some(cmd) = line.strip_prefix("$ pelam ") else { continue };
        let mut expect = Vec::new();
        while let Some(next) = lines.peek() {
            if next.starts_with("$ ") || next.starts_with("```") {
                break;
            }
            expect.push(lines.next().unwrap());
        }
        let args = shlex::split(cmd).expect("README command quoting");
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(ok(&argv), expect.join("\n"), "$ pelam {cmd}");
        count += 1;
    }
    assert!(count >= 5, "only {count} README examples");
}
