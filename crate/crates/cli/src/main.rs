use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pelam_core::distribution::{self, SampleOutcome};
use pelam_core::proof::{self, ProofDerivation};
use pelam_core::rewrite::{self, Mode, Strategy};
use pelam_core::types::{self, apply_mu_star, transport_subject_reduction};
use pelam_core::{fmt_rational, parse_formula, parse_term, Derivation, Error, System, Term};

#[derive(Parser)]
#[command(name = "pelam", version, about = "Batch verification for the probabilistic event lambda calculus")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Pe,
    PeBraces,
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemArg {
    Cn,
    Cbv,
    Int,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Head,
    Full,
}

/// A term, given inline or as the path of a file holding it.
#[derive(Args)]
struct TermIn {
    term: String,
    /// Calculus to work in; defaults to the smallest one accepting the term.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a term and print it back.
    Parse { term: String },
    /// Permutative normal form.
    Pnf(TermIn),
    /// Reduce with the head or the full strategy.
    Reduce {
        #[command(flatten)]
        input: TermIn,
        #[arg(long, value_enum, default_value = "full")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
    },
    /// Distribution of pseudo-values of a closed term.
    Dist(TermIn),
    /// Lower bound on the probability of reaching a head normal value.
    Hnv {
        #[command(flatten)]
        input: TermIn,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
    },
    /// Lower bound on the probability of reaching a normal form.
    Nf {
        term: String,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
    },
    /// Measure of a Boolean formula.
    Mu { formula: String },
    /// Whether the first formula entails the second.
    Entails { left: String, right: String },
    /// Check a typing derivation (JSON file) and print its root judgement.
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        system: SystemArg,
    },
    /// Discharge all names of an intersection derivation at once.
    MuStar {
        file: PathBuf,
        /// Constraint to measure; defaults to the root constraint.
        #[arg(long)]
        constraint: Option<String>,
    },
    /// Transport a CbV derivation along every one-step reduct of its subject.
    Transport { file: PathBuf },
    /// Check a proof (JSON file) and print its conclusion.
    CheckProof { file: PathBuf },
    /// Normalize a proof.
    NormalizeProof {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
    },
    /// Translate a proof into a typed term.
    Translate { file: PathBuf },
    /// Check that every normalization step is matched by term reduction.
    Simulate {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
    },
    /// One random head reduction run.
    Sample {
        #[command(flatten)]
        input: TermIn,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
    },
    /// Monte Carlo estimate of the head normal value probability.
    Estimate {
        #[command(flatten)]
        input: TermIn,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
    },
}

enum Fail {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Domain(e)
    }
}

type Out = std::result::Result<String, Fail>;

fn read_file(path: &Path) -> std::result::Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail::Usage(format!("cannot read {}: {e}", path.display())))
}

fn read_json(path: &Path) -> std::result::Result<Value, Fail> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| Fail::Domain(Error::syntax(0, format!("{}: {e}", path.display()))))
}

/// Inline text, or the contents of the file it names.
fn source(arg: &str) -> std::result::Result<String, Fail> {
    let p = Path::new(arg);
    if p.is_file() {
        Ok(read_file(p)?.trim().to_string())
    } else {
        Ok(arg.to_string())
    }
}

fn term_of(arg: &str) -> std::result::Result<Term, Fail> {
    Ok(parse_term(&source(arg)?)?)
}

fn load(input: &TermIn) -> std::result::Result<(Term, Mode), Fail> {
    let t = term_of(&input.term)?;
    let mode = match input.mode {
        Some(ModeArg::Pe) => Mode::Pe,
        Some(ModeArg::PeBraces) => Mode::Braces,
        None => Mode::for_term(&t),
    };
    Ok((t, mode))
}

fn system(s: SystemArg) -> System {
    match s {
        SystemArg::Cn => System::Cn,
        SystemArg::Cbv => System::Cbv,
        SystemArg::Int => System::Int,
    }
}

fn render(json_out: bool, v: Value, text: String) -> Out {
    Ok(if json_out { serde_json::to_string_pretty(&v).expect("serializable") } else { text })
}

fn run(cli: Cli) -> Out {
    let js = cli.json;
    match cli.cmd {
        Cmd::Parse { term } => {
            let t = term_of(&term)?;
            render(js, json!({ "term": t.to_string(), "size": t.size() }), t.to_string())
        }
        Cmd::Pnf(input) => {
            let (t, mode) = load(&input)?;
            let (n, trace) = rewrite::pnf(&t, mode)?;
            let steps: Vec<Value> = trace.iter().map(|s| s.to_json()).collect();
            render(js, json!({ "pnf": n.to_string(), "steps": steps }), n.to_string())
        }
        Cmd::Reduce { input, strategy, fuel } => {
            let (t, mode) = load(&input)?;
            let strategy = match strategy {
                StrategyArg::Head => Strategy::Head,
                StrategyArg::Full => Strategy::Full,
            };
            let r = rewrite::reduce(&t, mode, strategy, fuel)?;
            if r.exhausted && !js {
                return Err(Error::Fuel(format!("no normal form within {fuel} steps; reached `{}`", r.term)).into());
            }
            let steps: Vec<Value> = r.trace.iter().map(|s| s.to_json()).collect();
            let v = json!({ "term": r.term.to_string(), "steps": steps, "exhausted": r.exhausted });
            render(js, v, r.term.to_string())
        }
        Cmd::Dist(input) => {
            let (t, mode) = load(&input)?;
            let d = distribution::distribution(&rewrite::pnf_fast(&t, mode)?, mode)?;
            let mut rows: Vec<(String, String)> = d.iter().map(|(v, w)| (fmt_rational(w), v.to_string())).collect();
            rows.sort_by(|a, b| a.1.cmp(&b.1));
            let text: Vec<String> = rows.iter().map(|(w, v)| format!("{w}\t{v}")).collect();
            let entries: Vec<Value> = rows.iter().map(|(w, v)| json!({ "value": v, "weight": w })).collect();
            let v = json!({ "mass": fmt_rational(&d.mass()), "entries": entries });
            render(js, v, format!("{}\nmass\t{}", text.join("\n"), fmt_rational(&d.mass())).trim_start().to_string())
        }
        Cmd::Hnv { input, fuel } => {
            let (t, mode) = load(&input)?;
            let e = distribution::hnv_lower_bound(&t, mode, fuel)?;
            let v = json!({ "value": fmt_rational(&e.value), "exact": e.exact, "fuel_used": e.fuel_used });
            render(js, v, fmt_rational(&e.value))
        }
        Cmd::Nf { term, fuel } => {
            let e = distribution::nf_mass(&term_of(&term)?, fuel)?;
            let v = json!({ "value": fmt_rational(&e.value), "exact": e.exact, "fuel_used": e.fuel_used });
            render(js, v, fmt_rational(&e.value))
        }
        Cmd::Mu { formula } => {
            let q = pelam_core::measure(&parse_formula(&source(&formula)?)?)?;
            render(js, json!({ "measure": fmt_rational(&q) }), fmt_rational(&q))
        }
        Cmd::Entails { left, right } => {
            let ok = pelam_core::entails(&parse_formula(&source(&left)?)?, &parse_formula(&source(&right)?)?)?;
            render(js, json!({ "entails": ok }), ok.to_string())
        }
        Cmd::Check { file, system: s } => {
            let d = Derivation::from_json(&read_json(&file)?)?;
            let j = types::check_derivation(&d, system(s))?;
            render(js, j.to_json(), j.to_string())
        }
        Cmd::MuStar { file, constraint } => {
            let d = Derivation::from_json(&read_json(&file)?)?;
            let b = constraint.map(|c| parse_formula(&c)).transpose()?;
            let out = apply_mu_star(&d, b)?;
            let j = types::check_derivation(&out, System::Int)?;
            render(js, out.to_json(), j.to_string())
        }
        Cmd::Transport { file } => {
            let d = Derivation::from_json(&read_json(&file)?)?;
            let root = types::check_derivation(&d, System::Cbv)?;
            let mut rows = Vec::new();
            let mut text = Vec::new();
            for st in rewrite::step(&root.term, Mode::Braces)? {
                let moved = transport_subject_reduction(&d, &st)?;
                let j = types::check_derivation(&moved, System::Cbv)?;
                let same =
                    j.same_ctx(&root) && j.names == root.names && j.constraint == root.constraint && j.ty == root.ty;
                if !same {
                    return Err(
                        Error::Precondition(format!("transport along {st} changed the judgement to `{j}`")).into()
                    );
                }
                text.push(format!("{} @ {}\t{}", st.rule, rewrite::fmt_path(&st.path), j));
                rows.push(json!({ "step": st.to_json(), "judgement": j.to_json() }));
            }
            render(js, Value::Array(rows), text.join("\n"))
        }
        Cmd::CheckProof { file } => {
            let p = ProofDerivation::from_json(&read_json(&file)?)?;
            let s = proof::check_proof(&p)?;
            render(js, s.to_json(), s.to_string())
        }
        Cmd::NormalizeProof { file, fuel } => {
            let p = ProofDerivation::from_json(&read_json(&file)?)?;
            let (n, steps) = proof::normalize(&p, fuel)?;
            let v = json!({ "steps": steps, "proof": n.to_json() });
            render(js, v, format!("{}\t{} steps", n.sequent, steps))
        }
        Cmd::Translate { file } => {
            let p = ProofDerivation::from_json(&read_json(&file)?)?;
            let (t, d) = proof::translate(&p)?;
            render(js, d.to_json(), format!("{t}\n{}", d.judgement))
        }
        Cmd::Simulate { file, fuel } => {
            let p = ProofDerivation::from_json(&read_json(&file)?)?;
            let r = proof::verify_simulation(&p, fuel)?;
            let text: Vec<String> = r
                .steps
                .iter()
                .map(|s| match &s.trace {
                    Some(tr) => {
                        format!("{}\tok\t{}", s.redex, tr.iter().map(|x| x.rule.tag()).collect::<Vec<_>>().join(","))
                    }
                    None => format!("{}\tFAIL", s.redex),
                })
                .collect();
            let summary =
                format!("{} steps, {} failures, normalized: {}", r.steps.len(), r.failures().len(), r.normalized);
            let failed = !r.failures().is_empty();
            let out = render(js, r.to_json(), format!("{}\n{summary}", text.join("\n")).trim_start().to_string())?;
            if failed {
                println!("{out}");
                return Err(Error::Precondition("simulation failed".into()).into());
            }
            Ok(out)
        }
        Cmd::Sample { input, seed, fuel } => {
            let (t, mode) = load(&input)?;
            let (v, text) = match distribution::sample_run(&t, mode, seed, fuel)? {
                SampleOutcome::HeadNormal(u) => (json!({ "head_normal": u.to_string() }), u.to_string()),
                SampleOutcome::Diverged => (json!({ "head_normal": null, "diverged": true }), "diverged".to_string()),
                SampleOutcome::Exhausted => {
                    (json!({ "head_normal": null, "diverged": false }), "exhausted".to_string())
                }
            };
            render(js, v, text)
        }
        Cmd::Estimate { input, seed, samples, fuel } => {
            let (t, mode) = load(&input)?;
            let e = distribution::estimate_hnv(&t, mode, samples, fuel, seed)?;
            let v = json!({
                "estimate": fmt_rational(&e.estimate),
                "stderr": fmt_rational(&e.stderr),
                "hits": e.hits,
                "samples": e.samples,
            });
            render(js, v, format!("{} +- {}", fmt_rational(&e.estimate), fmt_rational(&e.stderr)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(Fail::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
