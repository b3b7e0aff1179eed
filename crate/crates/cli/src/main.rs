//! `atf`: command-line access to diagram surgery, lattice bookkeeping,
//! isometry certificates and SVG rendering.
//!
//! Exit status is 0 on success (or a valid certificate), 1 on a semantic
//! failure and 2 when an input file cannot be parsed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use atf_core::format::{
    parse_diagram, parse_lattice, parse_scenario, write_diagram, write_lattice,
};
use atf_core::homology::{lattice_from_diagram, lattice_of_atf_diagram};
use atf_core::pipeline::run;
use atf_core::render::render_svg;
use atf_core::surgery::{atf_blowdown, atf_blowup, corner_chop, reduce_along, standard_triangle};
use atf_core::torelli::{build_g, search_isometry, verify_isometry_with};
use atf_core::{BaseDiagram, ConvexRegion, LatticeModel, Rat, RenderStyle, SearchOptions};

#[derive(Parser)]
#[command(
    name = "atf",
    version,
    about = "Exact almost toric base diagrams and blow-up certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the violations of a diagram file.
    Validate {
        file: PathBuf,
        /// Exit 1 when violations are found.
        #[arg(long)]
        strict: bool,
    },
    /// Nodal blow-up of a standard triangle on a boundary edge, or a toric
    /// corner chop with `--corner`, or a blow-down with `--node`.
    Blowup {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        edge: usize,
        #[arg(long, default_value = "1")]
        offset: String,
        #[arg(long, default_value = "1")]
        capacity: String,
        /// Chop this vertex instead.
        #[arg(long, conflicts_with = "node")]
        corner: Option<usize>,
        /// Blow down this node instead.
        #[arg(long)]
        node: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a diagram along a convex region given as a diagram file.
    Reduce {
        file: PathBuf,
        region: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Intersection lattice of a diagram.
    Homology {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certificate for the natural map between two lattice files, or for the
    /// first isometry found by bounded search with `--bound`.
    Torelli {
        source: PathBuf,
        target: PathBuf,
        #[arg(long)]
        bound: Option<i64>,
        #[arg(long)]
        permute_divisors: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario end to end.
    Pipeline {
        file: PathBuf,
        /// Directory for the report, certificate, diagrams and lattices.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a diagram as SVG.
    Render {
        file: PathBuf,
        #[arg(long = "style", value_name = "KEY=VAL")]
        style: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Parse(String),
    Semantic(String),
}

type Outcome = Result<ExitCode, Failure>;

fn semantic(e: impl std::fmt::Display) -> Failure {
    Failure::Semantic(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Semantic(format!("{}: {e}", path.display())))
}

fn load<T, E: std::fmt::Display>(
    path: &Path,
    parse: fn(&str) -> Result<T, E>,
) -> Result<T, Failure> {
    let text = read(path)?;
    parse(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn rat(name: &str, s: &str) -> Result<Rat, Failure> {
    s.parse()
        .map_err(|e| Failure::Parse(format!("--{name}: {e}")))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => {
            fs::write(p, text).map_err(|e| Failure::Semantic(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn validate(file: &Path, strict: bool) -> Outcome {
    let d = load(file, parse_diagram)?;
    let violations = d.validate();
    if violations.is_empty() {
        println!("ok");
        return Ok(ExitCode::SUCCESS);
    }
    for v in &violations {
        println!("violation: {v}");
    }
    Ok(if strict {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

#[allow(clippy::too_many_arguments)]
fn blowup(
    file: &Path,
    edge: usize,
    offset: &str,
    capacity: &str,
    corner: Option<usize>,
    node: Option<usize>,
    out: Option<&Path>,
) -> Outcome {
    let d = load(file, parse_diagram)?;
    let result = if let Some(k) = node {
        atf_blowdown(&d, k).map_err(semantic)?
    } else {
        let c = rat("capacity", capacity)?;
        match corner {
            Some(v) => corner_chop(&d, v, &c).map_err(semantic)?,
            None => {
                let t = rat("offset", offset)?;
                let tri = standard_triangle(&d, edge, &t, &c).map_err(semantic)?;
                atf_blowup(&d, &tri).map_err(semantic)?
            }
        }
    };
    emit(out, &write_diagram(&result))?;
    Ok(ExitCode::SUCCESS)
}

fn reduce(file: &Path, region: &Path, out: Option<&Path>) -> Outcome {
    let d = load(file, parse_diagram)?;
    let r: BaseDiagram = load(region, parse_diagram)?;
    let designated = (0..d.len())
        .find(|&j| {
            let (a, b) = d.edge(j);
            (0..r.len()).any(|k| {
                let (p, q) = r.edge(k);
                atf_core::geometry::on_segment(p, a, b) && atf_core::geometry::on_segment(q, a, b)
            })
        })
        .unwrap_or(0);
    let p = ConvexRegion::new(r.vertices, designated);
    let reduced = reduce_along(&d, &p).map_err(semantic)?;
    emit(out, &write_diagram(&reduced))?;
    Ok(ExitCode::SUCCESS)
}

fn homology(file: &Path, out: Option<&Path>) -> Outcome {
    let d = load(file, parse_diagram)?;
    let m = if d.nodes.is_empty() {
        lattice_from_diagram(&d)
    } else {
        lattice_of_atf_diagram(&d)
    }
    .map_err(semantic)?;
    emit(out, &write_lattice(&m))?;
    Ok(ExitCode::SUCCESS)
}

fn torelli(
    source: &Path,
    target: &Path,
    bound: Option<i64>,
    permute: bool,
    out: Option<&Path>,
) -> Outcome {
    let a: LatticeModel = load(source, parse_lattice)?;
    let b: LatticeModel = load(target, parse_lattice)?;
    let cert = match bound {
        Some(bound) => {
            let opts = SearchOptions {
                bound,
                permute_divisors: permute,
                ..SearchOptions::default()
            };
            match search_isometry(&a, &b, &opts).map_err(semantic)? {
                Some(c) => c,
                None => {
                    return Err(Failure::Semantic(format!(
                        "torelli: no isometry with entries bounded by {bound}"
                    )))
                }
            }
        }
        None => verify_isometry_with(&build_g(&a, &b).map_err(semantic)?, permute),
    };
    emit(out, &cert.to_text())?;
    if cert.is_valid() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "torelli: certificate invalid: failed {}",
            cert.failed_checks().join(", ")
        );
        Ok(ExitCode::from(1))
    }
}

fn pipeline(file: &Path, out: Option<&Path>) -> Outcome {
    let s = load(file, parse_scenario)?;
    let report = run(&s).map_err(semantic)?;
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| semantic(format!("{}: {e}", dir.display())))?;
            let files = [
                ("report.txt", report.canonical_text()),
                ("certificate.txt", report.certificate.to_text()),
                ("reduced.diag", write_diagram(&report.reduced)),
                ("atf.diag", write_diagram(&report.local_atf)),
                ("ambient_atf.diag", write_diagram(&report.ambient_atf)),
                ("atf.lat", write_lattice(&report.atf_lattice)),
                ("symplectic.lat", write_lattice(&report.symplectic_lattice)),
            ];
            for (name, text) in files {
                emit(Some(&dir.join(name)), &text)?;
            }
        }
        None => emit(None, &report.canonical_text())?,
    }
    if report.is_valid() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "pipeline: certificate invalid: failed {}",
            report.certificate.failed_checks().join(", ")
        );
        Ok(ExitCode::from(1))
    }
}

fn render(file: &Path, overrides: &[String], out: Option<&Path>) -> Outcome {
    let d = load(file, parse_diagram)?;
    let mut style = RenderStyle::default();
    for kv in overrides {
        style
            .set(kv)
            .map_err(|e| Failure::Parse(format!("--style: {e}")))?;
    }
    let svg = render_svg(&d, &style).map_err(semantic)?;
    emit(out, &svg)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Validate { file, strict } => validate(file, *strict),
        Command::Blowup {
            file,
            edge,
            offset,
            capacity,
            corner,
            node,
            out,
        } => blowup(
            file,
            *edge,
            offset,
            capacity,
            *corner,
            *node,
            out.as_deref(),
        ),
        Command::Reduce { file, region, out } => reduce(file, region, out.as_deref()),
        Command::Homology { file, out } => homology(file, out.as_deref()),
        Command::Torelli {
            source,
            target,
            bound,
            permute_divisors,
            out,
        } => torelli(source, target, *bound, *permute_divisors, out.as_deref()),
        Command::Pipeline { file, out } => pipeline(file, out.as_deref()),
        Command::Render { file, style, out } => render(file, style, out.as_deref()),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Parse(msg)) => {
            eprintln!("parse error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Semantic(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
