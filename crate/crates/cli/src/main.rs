//! `scatter`: command-line driver. Exit status 0 on success, 1 when a
//! mathematical check fails, 2 on bad input.

use clap::{Parser, Subcommand, ValueEnum};
use scatter::completion::{complete, perturb, standard_initial};
use scatter::diagram::Diagram;
use scatter::json;
use scatter::lattice::{parse_q, LatVec, Q};
use scatter::lie::LieAlgebra;
use scatter::quiver::{generic_lambda, initial_diagram, lambda_factorization_check, quiver_theta, QuiverData};
use scatter::rings::Ring;
use scatter::svg;
use scatter::theta::{enumerate_broken_lines, theta, theta_by_transport, Frame};
use scatter::trees::{describe_tree, enumerate_trees, TreeKind};
use scatter::Error;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "scatter", version, about = "Exact scattering diagrams, tropical trees and theta functions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Labeled,
    Weighted,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Tropical,
    Cone,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Classical,
    Quantum,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuiverAction {
    Complete,
    Theta,
    Factorize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Initial diagram with walls log(1 + t_i z^{m_i}) on lines through the origin.
    Init {
        /// Wall exponents, e.g. "1,0".
        #[arg(long = "m", required = true, allow_hyphen_values = true)]
        m: Vec<String>,
        #[arg(long)]
        order: u32,
        #[arg(long, value_enum, default_value = "tropical")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "classical")]
        backend: BackendArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Consistent completion up to the given order.
    Complete {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        order: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Exit 1 with a witness when some joint loop is nontrivial.
    CheckConsistency {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        order: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exit 1 when the two diagrams differ on some probe path.
    Equivalent {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        other: PathBuf,
        #[arg(long)]
        order: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generic perturbation with l copies per wall.
    Perturb {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        l: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trees over the initial walls with multiplicities and supports.
    Trees {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "labeled")]
        kind: Kind,
        #[arg(long)]
        order: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Render the realization of the tree with this index.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Theta function at a point, by broken lines or by transport.
    Theta {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "m", allow_hyphen_values = true)]
        m: String,
        #[arg(long = "Q", allow_hyphen_values = true)]
        point: String,
        #[arg(long)]
        order: Option<u32>,
        #[arg(long)]
        transport: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Broken lines ending at a point.
    BrokenLines {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "m", allow_hyphen_values = true)]
        m: String,
        #[arg(long = "Q", allow_hyphen_values = true)]
        point: String,
        #[arg(long)]
        order: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Acyclic quiver: completion, theta comparison or λ factorization.
    Quiver {
        #[arg(value_enum)]
        action: QuiverAction,
        /// Arrow list such as "1:2=1,2:3=2".
        #[arg(long)]
        arrows: Option<String>,
        /// Quiver JSON {r, arrows}.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        order: u32,
        #[arg(long, allow_hyphen_values = true)]
        n: Option<String>,
        #[arg(long = "Q", allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// SVG of a rank-2 diagram.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        svg: PathBuf,
    },
}

/// Failure classes mapped to exit codes.
enum Fail {
    Math(String),
    Input(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Fail::Input(e.to_string())
        } else {
            Fail::Math(e.to_string())
        }
    }
}

type Out = Result<(), Fail>;

fn input(msg: impl Into<String>) -> Fail {
    Fail::Input(msg.into())
}

/// Write-temp-then-rename in the target's directory.
fn write_atomic(path: &Path, text: &str) -> Out {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| input(format!("bad output path {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, text).map_err(|e| input(format!("{}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn emit(v: &Value, out: &Option<PathBuf>) -> Out {
    let text = json::to_string(v);
    match out {
        Some(p) => write_atomic(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_json(path: &Path) -> Result<Value, Fail> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    json::parse(&text, &path.display().to_string()).map_err(Fail::from)
}

fn read_diagram(path: &Path) -> Result<Diagram, Fail> {
    let v = read_json(path)?;
    json::diagram_from(&v).map_err(|e| match e {
        Error::Parse { msg, .. } => input(format!("{}: {msg}", path.display())),
        other => Fail::from(other),
    })
}

fn parse_vec(s: &str) -> Result<LatVec, Fail> {
    s.split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|_| input(format!("bad integer vector {s:?}"))))
        .collect::<Result<Vec<_>, _>>()
        .map(LatVec)
}

fn parse_point(s: &str) -> Result<Vec<Q>, Fail> {
    s.split(',').map(|c| parse_q(c).ok_or_else(|| input(format!("bad rational point {s:?}")))).collect()
}

fn parse_arrows(s: &str, r: Option<usize>) -> Result<QuiverData, Fail> {
    let mut list = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let (ij, c) = part.split_once('=').unwrap_or((part, "1"));
        let (i, j) = ij.split_once(':').ok_or_else(|| input(format!("bad arrow {part:?}, expected i:j=count")))?;
        let p = |x: &str| x.trim().parse::<i64>().map_err(|_| input(format!("bad arrow {part:?}")));
        let (i, j, c) = (p(i)?, p(j)?, p(c)?);
        if i < 1 || j < 1 {
            return Err(input(format!("arrow {part:?}: nodes are numbered from 1")));
        }
        list.push((i as usize, j as usize, c));
    }
    let r = r.unwrap_or_else(|| list.iter().map(|a| a.0.max(a.1)).max().unwrap_or(1));
    QuiverData::new(r, &list).map_err(Fail::from)
}

fn order_of(d: &Diagram, o: Option<u32>) -> Result<u32, Fail> {
    let k = o.unwrap_or(d.order);
    if k == 0 {
        return Err(input("order must be at least 1"));
    }
    Ok(k)
}

fn run(cmd: Cmd) -> Out {
    match cmd {
        Cmd::Init { m, order, mode, backend, out } => {
            if order == 0 {
                return Err(input("order must be at least 1"));
            }
            if !matches!(mode, ModeArg::Tropical) || !matches!(backend, BackendArg::Classical) {
                return Err(input("init builds classical tropical diagrams; use `quiver` for cone diagrams"));
            }
            let ms = m.iter().map(|s| parse_vec(s)).collect::<Result<Vec<_>, _>>()?;
            let r = ms[0].rank();
            let alg = LieAlgebra::classical(r, Ring::free());
            let d = standard_initial(&alg, order, &ms)?;
            emit(&json::diagram_to(&d), &out)
        }
        Cmd::Complete { input: i, order, out, svg: s } => {
            let d = read_diagram(&i)?;
            let k = order_of(&d, order)?;
            let c = complete(&d, k)?;
            if let Some(p) = s {
                write_atomic(&p, &svg::render_diagram(&c)?)?;
            }
            emit(&json::diagram_to(&c), &out)
        }
        Cmd::CheckConsistency { input: i, order, out } => {
            let d = read_diagram(&i)?;
            let k = order_of(&d, order)?;
            match d.is_consistent(k)? {
                None => emit(&json!({"consistent": true, "truncation": k}), &out),
                Some((p, log)) => {
                    let w = json!({
                        "consistent": false,
                        "truncation": k,
                        "joint": json::point_to(&p),
                        "loop_log": json::lie_to(&log),
                    });
                    emit(&w, &out)?;
                    Err(Fail::Math(format!("inconsistent at joint {}", scatter::diagram::fmt_point(&p))))
                }
            }
        }
        Cmd::Equivalent { input: i, other, order, out } => {
            let a = read_diagram(&i)?;
            let b = read_diagram(&other)?;
            let k = order_of(&a, order)?;
            match a.equivalence_witness(&b, k)? {
                None => emit(&json!({"equivalent": true, "truncation": k}), &out),
                Some(path) => {
                    let pts: Vec<Value> = path.vertices.iter().map(|p| json::point_to(p)).collect();
                    emit(&json!({"equivalent": false, "truncation": k, "witness_path": pts}), &out)?;
                    Err(Fail::Math("diagrams differ".into()))
                }
            }
        }
        Cmd::Perturb { input: i, l, seed, out } => {
            let d = read_diagram(&i)?;
            if l == 0 {
                return Err(input("l must be at least 1"));
            }
            let p = perturb(&d, l, seed)?;
            emit(&json::diagram_to(&p), &out)
        }
        Cmd::Trees { input: i, kind, order, out, svg: s, index } => {
            let d = read_diagram(&i)?;
            let k = order_of(&d, order)?;
            let kind = match kind {
                Kind::Labeled => TreeKind::Labeled,
                Kind::Weighted => TreeKind::Weighted,
            };
            let trees = enumerate_trees(&d, kind, k);
            let mut list = Vec::new();
            for (t, aut) in &trees {
                let mut o = serde_json::Map::new();
                o.insert("tree".into(), json!(describe_tree(t)));
                o.insert("leaves".into(), json!(t.leaves().iter().map(|(w, k)| json!([w, k])).collect::<Vec<_>>()));
                o.insert("m".into(), json::vec_to(&t.m(&d)));
                o.insert("aut".into(), json!(aut));
                if let Some((n, g)) = t.multiplicity(&d) {
                    o.insert("n".into(), json::vec_to(&n));
                    o.insert("g".into(), json::lie_to(&g));
                }
                if let Some(sp) = t.support(&d)? {
                    o.insert("support".into(), json::support_to(&scatter::diagram::Support::R2(sp)));
                }
                list.push(Value::Object(o));
            }
            if let Some(p) = s {
                let (t, _) = trees.get(index).ok_or_else(|| input(format!("no tree with index {index}")))?;
                write_atomic(&p, &svg::render_tree(&d, t)?)?;
            }
            emit(&json!({"truncation": k, "trees": list}), &out)
        }
        Cmd::Theta { input: i, m, point, order, transport, out } => {
            let d = read_diagram(&i)?;
            let k = order_of(&d, order)?;
            let frame = Frame::for_diagram(&d, parse_vec(&m)?);
            let qpt = parse_point(&point)?;
            if frame.label().rank() != d.rank() || qpt.len() != d.rank() {
                return Err(input("m and Q must match the diagram's rank"));
            }
            let t = if transport { theta_by_transport(&d, &frame, &qpt, k)? } else { theta(&d, &frame, &qpt, k)? };
            emit(&json::alg_elem_to(&t), &out)
        }
        Cmd::BrokenLines { input: i, m, point, order, out, svg: s } => {
            let d = read_diagram(&i)?;
            let k = order_of(&d, order)?;
            let frame = Frame::for_diagram(&d, parse_vec(&m)?);
            let qpt = parse_point(&point)?;
            if frame.label().rank() != d.rank() || qpt.len() != d.rank() {
                return Err(input("m and Q must match the diagram's rank"));
            }
            let lines = enumerate_broken_lines(&d, &frame, &qpt, k)?;
            if let Some(p) = s {
                write_atomic(&p, &svg::render_broken_lines(&d, &frame, &lines)?)?;
            }
            emit(&json::broken_lines_to(&frame, &lines), &out)
        }
        Cmd::Quiver { action, arrows, input: i, r, order, n, point, seed, out, svg: s } => {
            if order == 0 {
                return Err(input("order must be at least 1"));
            }
            let qd = match (arrows, i) {
                (Some(a), None) => parse_arrows(&a, r)?,
                (None, Some(p)) => json::quiver_from(&read_json(&p)?)?,
                _ => return Err(input("give exactly one of --arrows and --in")),
            };
            let c = complete(&initial_diagram(&qd, order)?, order)?;
            if let Some(p) = s {
                write_atomic(&p, &svg::render_diagram(&c)?)?;
            }
            match action {
                QuiverAction::Complete => emit(&json::diagram_to(&c), &out),
                QuiverAction::Theta => {
                    let n = parse_vec(n.as_deref().ok_or_else(|| input("theta needs --n"))?)?;
                    let qpt = parse_point(point.as_deref().ok_or_else(|| input("theta needs --Q"))?)?;
                    if qpt.len() != qd.r {
                        return Err(input("Q must have one coordinate per node"));
                    }
                    let t = quiver_theta(&c, &n, &qpt, order)?;
                    emit(&json::alg_elem_to(&t), &out)
                }
                QuiverAction::Factorize => {
                    let lam = generic_lambda(&c, order, seed)?;
                    let ok = lambda_factorization_check(&c, &lam, order)?;
                    let slopes: Vec<Value> = lam.slopes.iter().map(json::q_to).collect();
                    emit(&json!({"factorizes": ok, "slopes": slopes, "truncation": order}), &out)?;
                    if ok {
                        Ok(())
                    } else {
                        Err(Fail::Math("Θ_λ differs from the product of initial walls".into()))
                    }
                }
            }
        }
        Cmd::Plot { input: i, svg: s } => {
            let d = read_diagram(&i)?;
            write_atomic(&s, &svg::render_diagram(&d)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Math(m)) => {
            eprintln!("scatter: {m}");
            ExitCode::from(1)
        }
        Err(Fail::Input(m)) => {
            eprintln!("scatter: input error: {m}");
            ExitCode::from(2)
        }
    }
}

