//! The `chromainv` command line.
//!
//! Results go to stdout, one decimal integer or tagged line per result (or
//! one JSON record per result with `--json`); diagnostics go to stderr.
//! Exit codes: 0 success, 1 usage error, 2 input or validation error,
//! 3 search guard exceeded.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::json;

use crate::census::{self, AHTriple};
use crate::chroma::{self, ColoringSearch};
use crate::design::{parse_graph_list, validate, BlockDesign};
use crate::eval::{self, FormSet};
use crate::gen::{self, GenError, GenParams, Generator};
use crate::presets;
use crate::symmetry;

#[derive(Debug, Parser)]
#[command(
    name = "chromainv",
    version,
    about = "Block-design invariants: chromatic filters and exact evaluation at sums of powers"
)]
struct Cli {
    /// Emit one JSON record per result
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Structural report: biregularity, repeated vertices, repeated blocks
    Validate { input: String },
    /// Chromatic number of the collinearity graph
    Chi {
        input: String,
        /// Also report vertex-criticality
        #[arg(long)]
        critical: bool,
    },
    /// Proper colorings of the collinearity graph
    Colorings {
        input: String,
        #[arg(long)]
        colors: usize,
        /// Print only the number of colorings
        #[arg(long)]
        count_only: bool,
    },
    /// Exact value at the sum of d-th powers of the given linear forms
    Eval {
        input: String,
        /// Form file: one comma-separated vector per line
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        forms: Option<PathBuf>,
        /// Built-in form set
        #[arg(long)]
        preset: Option<String>,
        /// Use only the first K forms
        #[arg(long, value_name = "K")]
        take: Option<usize>,
        /// Split the coloring search into N independent parts
        #[arg(long, default_value_t = 1)]
        parts: usize,
        /// Divide results exactly by D
        #[arg(long, allow_negative_numbers = true)]
        divisor: Option<BigInt>,
    },
    /// Automorphism group order of the design or of its collinearity graph
    Aut {
        input: String,
        #[arg(long)]
        collinearity: bool,
    },
    /// Counting formulas
    Census {
        #[command(subcommand)]
        which: CensusCommand,
    },
    /// Isomorph-free generation of biregular designs
    Generate {
        #[arg(long)]
        points: usize,
        #[arg(long)]
        blocks: usize,
        #[arg(long)]
        block_size: usize,
        #[arg(long)]
        degree: usize,
        /// Run the filter pipeline for TARGET colors and tag each design
        #[arg(long, value_name = "TARGET")]
        pipeline: Option<usize>,
        /// Lift the per-level search guard
        #[arg(long)]
        unbounded: bool,
        /// Never put the same block twice
        #[arg(long)]
        no_repeated_blocks: bool,
        /// Write the frontier to FILE after every level
        #[arg(long, value_name = "FILE")]
        checkpoint: Option<PathBuf>,
        /// Continue from a frontier written by --checkpoint
        #[arg(long, value_name = "FILE")]
        resume: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum CensusCommand {
    /// Arrays with fixed row and column sums, up to column permutation
    Isobaric {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        row_sum: usize,
        #[arg(long)]
        col_sum: usize,
    },
    /// Monomials of a given degree
    Total {
        #[arg(long)]
        vars: u64,
        #[arg(long)]
        degree: u64,
    },
    /// Covering lower bound B(m)
    CoverBound {
        #[arg(long)]
        m: u64,
    },
    /// Codimension of the k-th secant variety of v_d(P^n)
    Ah {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        n: u64,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Guard(String),
    Io(std::io::Error),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) | Failure::Io(_) => 2,
            Failure::Guard(_) => 3,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<GenError> for Failure {
    fn from(e: GenError) -> Self {
        match e {
            GenError::GuardExceeded(..) => Failure::Guard(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => 0,
        Err(f) => {
            let msg = match &f {
                Failure::Input(m) | Failure::Guard(m) => m.clone(),
                Failure::Io(e) => e.to_string(),
            };
            let _ = writeln!(err, "error: {msg}");
            f.exit_code()
        }
    }
}

/// Resolves INPUT against the preset catalog first, then the filesystem.
fn load_designs(input: &str, err: &mut dyn Write) -> Result<Vec<BlockDesign>, Failure> {
    if let Some(d) = presets::design(input) {
        if Path::new(input).exists() {
            writeln!(err, "warning: `{input}` is both a preset and a file; using the preset")?;
        }
        return Ok(vec![d]);
    }
    let text = fs::read_to_string(input).map_err(|e| {
        Failure::Input(format!("`{input}` is neither a preset nor a readable file: {e}"))
    })?;
    let designs = parse_graph_list(&text).map_err(|e| input_err(format!("{input}: {e}")))?;
    if designs.is_empty() {
        return Err(Failure::Input(format!("{input}: no designs")));
    }
    Ok(designs)
}

fn load_forms(
    file: Option<&PathBuf>,
    preset: Option<&str>,
    err: &mut dyn Write,
) -> Result<FormSet, Failure> {
    match (file, preset) {
        (_, Some(name)) => presets::forms(name).ok_or_else(|| {
            Failure::Input(format!(
                "unknown form preset `{name}` (known: {})",
                presets::FORM_SET_NAMES.join(", ")
            ))
        }),
        (Some(path), None) => {
            if let Some(name) = path.to_str().filter(|n| presets::forms(n).is_some()) {
                if !path.exists() {
                    writeln!(err, "note: using form preset `{name}`")?;
                    return Ok(presets::forms(name).expect("checked"));
                }
            }
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            text.parse::<FormSet>()
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
        }
        (None, None) => Err(Failure::Input("no forms given".into())),
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let json = cli.json;
    match &cli.command {
        Command::Validate { input } => {
            for d in load_designs(input, err)? {
                let r = validate(&d);
                if json {
                    let rec = json!({
                        "design": d.to_block_list(),
                        "points": d.num_points(),
                        "blocks": d.num_blocks(),
                        "block_size": d.block_size(),
                        "point_degree": d.point_degree(),
                        "report": r,
                    });
                    writeln!(out, "{rec}")?;
                } else {
                    let degree = d
                        .point_degree()
                        .map_or_else(|| "mixed".to_string(), |x| x.to_string());
                    writeln!(
                        out,
                        "biregular={} points={} blocks={} block_size={} degree={} \
                         repeated_vertices={} repeated_blocks={}",
                        r.is_biregular,
                        d.num_points(),
                        d.num_blocks(),
                        d.block_size(),
                        degree,
                        r.has_repeated_vertices,
                        r.has_repeated_blocks
                    )?;
                }
            }
        }
        Command::Chi { input, critical } => {
            for d in load_designs(input, err)? {
                let g = d.collinearity();
                if *critical || json {
                    let report = chroma::chroma_report(&g, None);
                    if json {
                        let rec = json!({
                            "chi": report.chi,
                            "clique_number": report.max_clique_lower_bound,
                            "vertex_critical": critical.then_some(report.is_vertex_critical),
                        });
                        writeln!(out, "{rec}")?;
                    } else {
                        writeln!(out, "{}", report.chi)?;
                        writeln!(out, "vertex_critical={}", report.is_vertex_critical)?;
                    }
                } else {
                    writeln!(out, "{}", chroma::chromatic_number(&g))?;
                }
            }
        }
        Command::Colorings {
            input,
            colors,
            count_only,
        } => {
            for d in load_designs(input, err)? {
                let g = d.collinearity();
                let mut search = ColoringSearch::new(&g, *colors);
                if *count_only {
                    let n = search.count();
                    if json {
                        writeln!(out, "{}", json!({ "colors": colors, "count": n }))?;
                    } else {
                        writeln!(out, "{n}")?;
                    }
                } else {
                    let mut res = Ok(());
                    search.for_each(|c| {
                        if res.is_err() {
                            return;
                        }
                        res = if json {
                            writeln!(out, "{}", json!({ "coloring": c }))
                        } else {
                            let line: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                            writeln!(out, "{}", line.join(","))
                        };
                    });
                    res?;
                }
            }
        }
        Command::Eval {
            input,
            forms,
            preset,
            take,
            parts,
            divisor,
        } => {
            let designs = load_designs(input, err)?;
            let mut form_set = load_forms(forms.as_ref(), preset.as_deref(), err)?;
            if let Some(k) = take {
                form_set = form_set.take(*k);
            }
            for d in designs {
                let ev = eval::Evaluator::new(&d, &form_set).map_err(input_err)?;
                let result = ev.run_parallel(*parts).map_err(input_err)?;
                let value = match divisor {
                    Some(div) => eval::divide_exact(&result.value, div).map_err(input_err)?,
                    None => result.value,
                };
                if json {
                    let rec = json!({
                        "value": value.to_string(),
                        "colorings": result.colorings,
                        "forms": form_set.len(),
                        "divisor": divisor.as_ref().map(|x| x.to_string()),
                    });
                    writeln!(out, "{rec}")?;
                } else {
                    writeln!(out, "{value}")?;
                }
            }
        }
        Command::Aut {
            input,
            collinearity,
        } => {
            for d in load_designs(input, err)? {
                let order = if *collinearity {
                    symmetry::graph_aut_order(&d.collinearity())
                } else {
                    symmetry::design_aut_order(&d)
                };
                if json {
                    let of = if *collinearity { "collinearity" } else { "design" };
                    writeln!(out, "{}", json!({ "order": order, "of": of }))?;
                } else {
                    writeln!(out, "{order}")?;
                }
            }
        }
        Command::Census { which } => census_command(which, json, out)?,
        Command::Generate {
            points,
            blocks,
            block_size,
            degree,
            pipeline,
            unbounded,
            no_repeated_blocks,
            checkpoint,
            resume,
        } => {
            let mut params = GenParams::new(*points, *blocks, *block_size, *degree);
            params.allow_repeated_blocks = !no_repeated_blocks;
            let mut generator = match resume {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                    let frontier = parse_graph_list(&text).map_err(input_err)?;
                    Generator::resume(params, frontier)?
                }
                None => Generator::new(params)?,
            };
            if *unbounded {
                generator = generator.with_level_limit(None);
            }
            while !generator.is_complete() {
                generator.step()?;
                writeln!(
                    err,
                    "level {}/{}: {} classes",
                    generator.level(),
                    params.num_blocks,
                    generator.frontier_len()
                )?;
                if let Some(path) = checkpoint {
                    write_checkpoint(path, &generator)?;
                }
            }
            for d in generator.finish()? {
                let verdict = pipeline.map(|t| gen::pipeline_filter(&d, t));
                if json {
                    writeln!(out, "{}", json!({ "design": d.to_block_list(), "verdict": verdict }))?;
                } else {
                    match verdict {
                        Some(v) => writeln!(out, "{v}\t{d}")?,
                        None => writeln!(out, "{d}")?,
                    }
                }
            }
        }
    }
    Ok(())
}

fn write_checkpoint(path: &Path, generator: &Generator) -> Result<(), Failure> {
    let mut text = format!(
        "# frontier after level {} of {}\n",
        generator.level(),
        generator.params().num_blocks
    );
    for d in generator.frontier() {
        text.push_str(&d.to_block_list());
        text.push('\n');
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn census_command(which: &CensusCommand, json: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let (value, extra) = match *which {
        CensusCommand::Isobaric {
            rows,
            cols,
            row_sum,
            col_sum,
        } => (
            census::count_weight_arrays(rows, cols, row_sum, col_sum).to_string(),
            None,
        ),
        CensusCommand::Total { vars, degree } => {
            (census::count_total_monomials(vars, degree).to_string(), None)
        }
        CensusCommand::CoverBound { m } => (census::covering_bound(m).to_string(), None),
        CensusCommand::Ah { k, d, n } => {
            let t = AHTriple::new(k, d, n);
            (
                census::ah_codimension(t).to_string(),
                Some(census::is_ah_ordinary(t)),
            )
        }
    };
    if json {
        let mut rec = json!({ "value": value });
        if let Some(ordinary) = extra {
            rec["ah_ordinary"] = json!(ordinary);
        }
        writeln!(out, "{rec}")?;
    } else {
        writeln!(out, "{value}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["chromainv"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn census_commands() {
        assert_eq!(call(&["census", "cover-bound", "--m", "15"]).1, "12\n");
        assert_eq!(call(&["census", "total", "--vars", "35", "--degree", "15"]).1, "1575580702584\n");
        assert_eq!(call(&["census", "ah", "--k", "7", "--d", "3", "--n", "4"]).1, "1\n");
        let (_, json, _) = call(&["--json", "census", "ah", "--k", "3", "--d", "3", "--n", "2"]);
        assert_eq!(json.trim(), r#"{"ah_ordinary":true,"value":"1"}"#);
        let (_, iso, _) = call(&[
            "census", "isobaric", "--rows", "2", "--cols", "3", "--row-sum", "3", "--col-sum", "2",
        ]);
        assert_eq!(iso, "2\n");
    }

    #[test]
    fn design_commands_on_presets() {
        assert_eq!(call(&["chi", "aronhold"]).1, "4\n");
        assert_eq!(call(&["chi", "aronhold", "--critical"]).1, "4\nvertex_critical=true\n");
        assert_eq!(call(&["aut", "aronhold"]).1, "24\n");
        assert_eq!(call(&["aut", "ottaviani15"]).1, "12\n");
        assert_eq!(call(&["aut", "ottaviani15", "--collinearity"]).1, "288\n");
        assert_eq!(call(&["colorings", "aronhold", "--colors", "4", "--count-only"]).1, "24\n");
        let (code, listing, _) = call(&["colorings", "quadric:1", "--colors", "2"]);
        assert_eq!(code, 0);
        assert_eq!(listing, "0,1\n1,0\n");
        let (_, v, _) = call(&["validate", "quadric:4"]);
        assert!(v.contains("repeated_blocks=true") && v.contains("biregular=true"));
    }

    #[test]
    fn eval_with_form_files_and_divisor() {
        let dir = std::env::temp_dir().join(format!("chromainv-cli-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let forms = dir.join("forms.txt");
        fs::write(&forms, "1,0,0\n0,1,0\n0,0,1\n1,1,1\n").unwrap();
        let f = forms.to_str().unwrap();
        let (code, value, _) = call(&["eval", "aronhold", "--forms", f]);
        assert_eq!(code, 0);
        let value: BigInt = value.trim().parse().unwrap();
        let (_, parted, _) = call(&["eval", "aronhold", "--forms", f, "--parts", "4"]);
        assert_eq!(parted.trim().parse::<BigInt>().unwrap(), value);
        let (_, three, _) = call(&["eval", "aronhold", "--forms", f, "--take", "3"]);
        assert_eq!(three, "0\n");
        if value != BigInt::from(0) {
            let (code, q, _) = call(&["eval", "aronhold", "--forms", f, "--divisor", &value.to_string()]);
            assert_eq!((code, q.as_str()), (0, "1\n"));
        }
        let (code, _, e) = call(&["eval", "aronhold", "--forms", f, "--divisor", "7919"]);
        assert_eq!(code, 2, "{e}");
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn graph_list_files() {
        let dir = std::env::temp_dir().join(format!("chromainv-list-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let list = dir.join("graphs.txt");
        fs::write(&list, "# two designs\n0,1,2; 0,1,3; 0,2,3; 1,2,3\n(ab)(bc)(ca)\n").unwrap();
        let (code, out, _) = call(&["chi", list.to_str().unwrap()]);
        assert_eq!((code, out.as_str()), (0, "4\n3\n"));
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn generate_command() {
        let (code, out, _) = call(&[
            "generate", "--points", "4", "--blocks", "4", "--block-size", "2", "--degree", "2",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 2);
        let (_, tagged, _) = call(&[
            "generate", "--points", "4", "--blocks", "4", "--block-size", "3", "--degree", "3",
            "--pipeline", "8",
        ]);
        assert_eq!(tagged.trim(), "rejected_chi:4\t0,1,2; 0,1,3; 0,2,3; 1,2,3");
    }

    #[test]
    fn generate_checkpoint_and_resume() {
        let dir = std::env::temp_dir().join(format!("chromainv-ckpt-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let ck = dir.join("frontier.txt");
        let args = ["generate", "--points", "6", "--blocks", "6", "--block-size", "3", "--degree", "3"];
        let (_, full, _) = call(&args);
        let mut with_ck = args.to_vec();
        with_ck.extend(["--checkpoint", ck.to_str().unwrap()]);
        assert_eq!(call(&with_ck).1, full);
        // the last checkpoint holds the complete designs
        let mut resumed = args.to_vec();
        resumed.extend(["--resume", ck.to_str().unwrap()]);
        assert_eq!(call(&resumed).1, full);
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&[]).0, 1);
        assert_eq!(call(&["chi"]).0, 1);
        assert_eq!(call(&["frobnicate"]).0, 1);
        assert_eq!(call(&["--help"]).0, 0);
        assert_eq!(call(&["chi", "/no/such/file"]).0, 2);
        assert_eq!(call(&["eval", "aronhold", "--preset", "nope"]).0, 2);
        assert_eq!(call(&["eval", "ottaviani15", "--preset", "paper8", "--parts", "0"]).0, 2);
        assert_eq!(call(&["eval", "aronhold", "--preset", "paper8"]).0, 2);
        assert_eq!(
            call(&["generate", "--points", "4", "--blocks", "3", "--block-size", "3", "--degree", "3"]).0,
            2
        );
    }
}
