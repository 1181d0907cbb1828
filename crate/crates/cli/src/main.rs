use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use shadowcalc::alexander::{alexander_poly, delta_kn};
use shadowcalc::banded::{collapse_bound, gen_kn, gen_twist_spun, parse_bud, serialize_bud, shadow_of};
use shadowcalc::encoding_graph::{parse_egf, serialize_egf, validate};
use shadowcalc::fp_group::{parse_presentation, tietze_simplify, Word, DEFAULT_BUDGET};
use shadowcalc::grid::{verify_case_grid, GridBounds, FAMILIES};
use shadowcalc::homology::abelianize;
use shadowcalc::knot_shadow::{classify, knot_group, shadow_kn};
use shadowcalc::moves::{apply_with, sites_with};
use shadowcalc::van_kampen::pi1_tree;
use shadowcalc::{DecoratedGraph, Error, KnotShadow, MoveKind, RuleTable};

#[derive(Parser)]
#[command(name = "shadowcalc", version, about = "Shadow calculus for 2-knots")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check an .egf graph or a .bud diagram.
    Validate {
        file: PathBuf,
        /// Also require the tree to be simply connected.
        #[arg(long)]
        strict: bool,
    },
    /// Fundamental group of the polyhedron encoded by a tree.
    Pi1 { file: PathBuf },
    /// First homology and the orders of the boundary classes.
    H1 { file: PathBuf },
    /// Knot group of a shadow with boundary gleam `g`.
    KnotGroup {
        file: PathBuf,
        #[arg(long)]
        g: u64,
        #[arg(long = "vertex-on-K")]
        vertex_on_k: bool,
    },
    /// Alexander polynomial of a shadow's knot group or of a presentation.
    Alexander {
        file: Option<PathBuf>,
        #[arg(long)]
        g: Option<u64>,
        #[arg(long)]
        pres: Option<String>,
        #[arg(long)]
        meridian: Option<String>,
    },
    /// Classify a shadow with at most one true vertex.
    Classify {
        file: PathBuf,
        #[arg(long)]
        g: u64,
        #[arg(long = "vertex-on-K")]
        vertex_on_k: bool,
    },
    /// List move sites, or apply one and print the new graph.
    Move {
        file: PathBuf,
        #[arg(long)]
        kind: MoveKind,
        #[arg(long)]
        site: Option<usize>,
        /// Vertex on the side to keep for reducing moves.
        #[arg(long)]
        keep: Option<String>,
        /// Rule table replacing the built-in one.
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Pick a site at random with this seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Shadow report of a banded unlink diagram.
    Shadow { file: PathBuf },
    /// Complexity bound of a banded unlink diagram by collapsing.
    Bound { file: PathBuf },
    /// Generate a diagram family member.
    Gen {
        #[command(subcommand)]
        what: GenCmd,
    },
    /// Run the case grid for one family, or `all`.
    Verify {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 3)]
        max: u32,
        /// Largest boundary gleam in the grid.
        #[arg(long, default_value_t = 3)]
        g: u64,
    },
}

#[derive(Subcommand)]
enum GenCmd {
    /// Twist-spun torus knot diagram.
    TwistSpun { n: i64, k: i64 },
    /// Diagram of K_n, or with --egf the encoding graph of its shadow.
    Kn {
        #[arg(allow_negative_numbers = true)]
        n: i64,
        #[arg(long)]
        egf: bool,
    },
}

struct Out {
    command: &'static str,
    inputs: Value,
    result: Value,
    text: String,
    matches_paper: Option<bool>,
    diagnostics: Vec<String>,
}

impl Out {
    fn new(command: &'static str, inputs: Value, result: Value, text: String) -> Self {
        Out { command, inputs, result, text, matches_paper: None, diagnostics: Vec::new() }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn egf(path: &Path) -> Result<DecoratedGraph, Error> {
    parse_egf(&read(path)?)
}

fn shadow(path: &Path, g: u64, vertex_on_k: bool) -> Result<KnotShadow, Error> {
    Ok(KnotShadow { xprime: egf(path)?, g, vertex_on_k })
}

fn is_bud(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "bud")
}

fn run(cmd: Cmd) -> Result<Out, Error> {
    match cmd {
        Cmd::Validate { file, strict } => {
            let inputs = json!({ "file": file.display().to_string(), "strict": strict });
            if is_bud(&file) {
                let d = parse_bud(&read(&file)?)?;
                let (ok, msg) = match d.validate() {
                    Ok(()) => (true, "valid".to_string()),
                    Err(e) => (false, e.to_string()),
                };
                let mut out = Out::new("validate", inputs, json!({ "valid": ok, "message": msg }), msg.clone());
                if !ok {
                    out.diagnostics.push(msg);
                }
                return Ok(out);
            }
            let g = egf(&file)?;
            let rep = validate(&g, strict);
            let text = if rep.findings.is_empty() {
                "valid".to_string()
            } else {
                rep.findings.iter().map(|f| format!("{f:?}")).collect::<Vec<_>>().join("\n")
            };
            Ok(Out::new("validate", inputs, json!({ "valid": rep.is_ok(), "report": rep }), text))
        }
        Cmd::Pi1 { file } => {
            let g = egf(&file)?;
            let r = pi1_tree(&g)?;
            let (simple, done) = tietze_simplify(&r.presentation, DEFAULT_BUDGET);
            let classes: serde_json::Map<String, Value> = r
                .boundary_classes
                .iter()
                .map(|(b, &i)| (b.clone(), json!(r.presentation.format_word(&Word::gen(i)))))
                .collect();
            let mut text = format!("{}\nsimplified: {simple}\n", r.presentation);
            for (b, w) in &classes {
                text.push_str(&format!("boundary {b}: {}\n", w.as_str().unwrap_or_default()));
            }
            Ok(Out::new(
                "pi1",
                json!({ "file": file.display().to_string() }),
                json!({
                    "presentation": r.presentation.to_string(),
                    "simplified": simple.to_string(),
                    "simplification_complete": done,
                    "boundary_classes": classes,
                }),
                text.trim_end().to_string(),
            ))
        }
        Cmd::H1 { file } => {
            let g = egf(&file)?;
            let r = pi1_tree(&g)?;
            let ab = abelianize(&r.presentation);
            let mut orders = serde_json::Map::new();
            let mut text = format!("H1 = {}\n", ab.group);
            for (b, &i) in &r.boundary_classes {
                let o = ab.order_of(&Word::gen(i)).map(|o| o.to_string()).unwrap_or_else(|| "infinite".into());
                text.push_str(&format!("order of boundary {b}: {o}\n"));
                orders.insert(b.clone(), json!(o));
            }
            Ok(Out::new(
                "h1",
                json!({ "file": file.display().to_string() }),
                json!({ "h1": ab.group.to_string(), "group": ab.group, "boundary_orders": orders }),
                text.trim_end().to_string(),
            ))
        }
        Cmd::KnotGroup { file, g, vertex_on_k } => {
            let ks = shadow(&file, g, vertex_on_k)?;
            let p = knot_group(&ks)?;
            Ok(Out::new(
                "knot-group",
                json!({ "file": file.display().to_string(), "g": g, "vertex_on_k": vertex_on_k }),
                json!({ "presentation": p.to_string(), "meridian_only": p.is_meridian_only() }),
                p.to_string(),
            ))
        }
        Cmd::Alexander { file, g, pres, meridian } => {
            let (p, inputs) = match (file, pres) {
                (Some(f), None) => {
                    let g = g.ok_or_else(|| Error::input("alexander <file> needs --g"))?;
                    let inputs = json!({ "file": f.display().to_string(), "g": g });
                    (knot_group(&shadow(&f, g, false)?)?, inputs)
                }
                (None, Some(text)) => {
                    let inputs = json!({ "pres": text, "meridian": meridian });
                    (parse_presentation(&text, meridian.as_deref())?, inputs)
                }
                _ => return Err(Error::input("give either a file or --pres")),
            };
            let poly = alexander_poly(&p)?;
            let known: Vec<i64> = (-5..=5).filter(|&n| n != 0 && delta_kn(n).eq_up_to_units(&poly)).collect();
            let mut result = json!({ "polynomial": poly.to_string() });
            if let Some(&n) = known.first() {
                result["matches_kn"] = json!(n);
            }
            Ok(Out::new("alexander", inputs, result, poly.to_string()))
        }
        Cmd::Classify { file, g, vertex_on_k } => {
            let ks = shadow(&file, g, vertex_on_k)?;
            let c = classify(&ks)?;
            Ok(Out::new(
                "classify",
                json!({ "file": file.display().to_string(), "g": g, "vertex_on_k": vertex_on_k }),
                serde_json::to_value(&c).expect("serializable"),
                c.to_string(),
            ))
        }
        Cmd::Move { file, kind, site, keep, rules, seed } => {
            let g = egf(&file)?;
            let owned;
            let table = match &rules {
                Some(path) => {
                    owned = RuleTable::parse(&read(path)?)?;
                    &owned
                }
                None => RuleTable::builtin(),
            };
            let all = sites_with(table, &g, kind);
            let inputs = json!({
                "file": file.display().to_string(),
                "kind": kind.to_string(),
                "site": site,
                "keep": keep,
                "rules": rules.as_ref().map(|p| p.display().to_string()),
                "seed": seed,
            });
            let chosen = match (site, seed) {
                (Some(i), _) => Some(
                    all.get(i)
                        .ok_or_else(|| Error::input(format!("site {i} out of range ({} sites)", all.len())))?,
                ),
                (None, Some(s)) => Some(
                    all.choose(&mut ChaCha8Rng::seed_from_u64(s))
                        .ok_or_else(|| Error::input(format!("no {kind} sites")))?,
                ),
                (None, None) => None,
            };
            let Some(chosen) = chosen else {
                let text = if all.is_empty() {
                    format!("no {kind} sites")
                } else {
                    all.iter().enumerate().map(|(i, s)| format!("{i}: {s}")).collect::<Vec<_>>().join("\n")
                };
                return Ok(Out::new("move", inputs, json!({ "sites": all }), text));
            };
            let moved = apply_with(table, &g, kind, chosen, keep.as_deref())?;
            let text = serialize_egf(&moved);
            Ok(Out::new("move", inputs, json!({ "site": chosen, "graph": text }), text.trim_end().to_string()))
        }
        Cmd::Shadow { file } => {
            let d = parse_bud(&read(&file)?)?;
            let r = shadow_of(&d)?;
            let mut text = format!(
                "true vertices: {}\nresolved components: {}\ngleam sum over K: {}\n",
                r.true_vertices, r.resolved_components, r.gleam_sum_over_k
            );
            for reg in &r.regions {
                let k = if reg.in_k { " K" } else { "" };
                text.push_str(&format!("{} {:?} {}{k}\n", reg.id, reg.role, reg.gleam));
            }
            if !r.gleam_sum_over_k.is_zero() {
                return Err(Error::invariant(format!("gleam sum over K is {}, not 0", r.gleam_sum_over_k)));
            }
            Ok(Out::new(
                "shadow",
                json!({ "file": file.display().to_string() }),
                serde_json::to_value(&r).expect("serializable"),
                text.trim_end().to_string(),
            ))
        }
        Cmd::Bound { file } => {
            let d = parse_bud(&read(&file)?)?;
            let b = collapse_bound(&d)?;
            let tv = d.crossings() + d.band_ends();
            Ok(Out::new(
                "bound",
                json!({ "file": file.display().to_string() }),
                json!({ "true_vertices": tv, "collapse_bound": b }),
                format!("{b}"),
            ))
        }
        Cmd::Gen { what } => match what {
            GenCmd::TwistSpun { n, k } => {
                let text = serialize_bud(&gen_twist_spun(n, k)?);
                Ok(Out::new("gen", json!({ "family": "twist-spun", "n": n, "k": k }), json!({ "bud": text }), text))
            }
            GenCmd::Kn { n, egf } => {
                let text = if egf { serialize_egf(&shadow_kn(n)?.xprime) } else { serialize_bud(&gen_kn(n)?) };
                let key = if egf { "egf" } else { "bud" };
                Ok(Out::new("gen", json!({ "family": "kn", "n": n, "egf": egf }), json!({ key: text }), text))
            }
        },
        Cmd::Verify { family, max, g } => {
            let bounds = GridBounds { max, max_g: g };
            let ids: Vec<&str> = if family == "all" { FAMILIES.iter().map(|f| f.id).collect() } else { vec![&family] };
            let mut reports = Vec::new();
            let mut text = String::new();
            for id in ids {
                let r = verify_case_grid(id, bounds)?;
                text.push_str(&format!(
                    "{}: {} tuples; {}; {}\n",
                    r.family,
                    r.tuples_checked,
                    r.conclusion,
                    if r.matches_paper { "as expected" } else { "UNEXPECTED" }
                ));
                reports.push(r);
            }
            let all_match = reports.iter().all(|r| r.matches_paper);
            let result = if reports.len() == 1 {
                serde_json::to_value(&reports[0]).expect("serializable")
            } else {
                json!({ "families": reports })
            };
            let mut out =
                Out::new("verify", json!({ "family": family, "max": max, "g": g }), result, text.trim_end().to_string());
            out.matches_paper = Some(all_match);
            Ok(out)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Invariant(_) => 3,
        Error::Syntax { .. } | Error::Input(_) => 2,
    }
}

fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(out) => {
            if cli.json {
                let mut report = json!({
                    "command": out.command,
                    "inputs": out.inputs,
                    "result": out.result,
                    "diagnostics": out.diagnostics,
                });
                if let Some(m) = out.matches_paper {
                    report["matches_paper"] = json!(m);
                }
                emit(&serde_json::to_string_pretty(&report).expect("serializable"));
            } else {
                emit(&out.text);
                for d in &out.diagnostics {
                    eprintln!("warning: {d}");
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = exit_code(&e);
            if cli.json {
                let kind = if code == 3 { "invariant" } else { "input" };
                emit(&json!({ "error": e.to_string(), "kind": kind }).to_string());
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::invariant("x")), 3);
        assert_eq!(exit_code(&Error::input("x")), 2);
        assert_eq!(exit_code(&Error::syntax(1, 1, "x")), 2);
    }
}
