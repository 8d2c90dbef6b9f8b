mod verify;

use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rcbij::bijection::{phi, phi_inverse, phi_tilde, phi_tilde_inverse};
use rcbij::cartan::{AffineType, Family};
use rcbij::crystal::{crystal, format_path, Letter, Path};
use rcbij::energy::{local_h, one_dim_sum};
use rcbij::qpoly::QPoly;
use rcbij::rc::{RcRules, RiggedConfig};

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "rcbij", version, about = "Rigged configurations, paths and the X = M identity for B^{1,1}")]
struct Cli {
    /// Worker threads for grid verification (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct TypeArgs {
    /// Family: A1, B1, C1, D1, A2, A2dag, A2odd or D2.
    #[arg(long = "type")]
    family: Family,
    /// Rank.
    #[arg(long)]
    n: usize,
    /// Allow ranks below the supported range.
    #[arg(long)]
    relax_rank: bool,
}

impl TypeArgs {
    fn affine(&self) -> rcbij::Result<AffineType> {
        AffineType::with_rank_policy(self.family, self.n, self.relax_rank)
    }
}

#[derive(Args, Clone)]
struct CellArgs {
    #[command(flatten)]
    ty: TypeArgs,
    /// Number of tensor factors.
    #[arg(long)]
    len: usize,
    /// Comma-separated classical weight; omitted means every dominant weight reachable at this length.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    weight: Option<Vec<i64>>,
    /// JSON output.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// One-dimensional sum X̄ over classically restricted paths.
    X {
        #[command(flatten)]
        cell: CellArgs,
        /// Print the local energy table as TSV instead.
        #[arg(long)]
        dump_h: bool,
    },
    /// Fermionic formula M̄.
    M {
        #[command(flatten)]
        cell: CellArgs,
    },
    /// Generating function of rigged configurations by cocharge.
    F {
        #[command(flatten)]
        cell: CellArgs,
    },
    /// List rigged configurations.
    RcEnum {
        #[command(flatten)]
        cell: CellArgs,
    },
    /// List classically restricted paths.
    PathEnum {
        #[command(flatten)]
        cell: CellArgs,
    },
    /// Apply the bijection to JSON read from stdin.
    Map {
        #[arg(long)]
        dir: Direction,
        /// Type and rank of the input paths (path2rc only).
        #[arg(long = "type")]
        family: Option<Family>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        relax_rank: bool,
        /// Use the reversed-order map whose statistic is cocharge.
        #[arg(long)]
        tilde: bool,
    },
    /// Exhaustive verification with a TSV certificate.
    Verify {
        #[arg(long = "type", requires = "n", conflicts_with = "grid")]
        family: Option<Family>,
        #[arg(long)]
        n: Option<usize>,
        /// Largest length for --type/--n verification.
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        /// Grid file: one cell per line, `TYPE N L [WEIGHT]`, where L may be a range `a..b`.
        #[arg(long)]
        grid: Option<std::path::PathBuf>,
        #[arg(long)]
        relax_rank: bool,
        /// Write the certificate to this file instead of stdout.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        /// Append per-cell runtime in milliseconds (makes output run-dependent).
        #[arg(long)]
        timing: bool,
    },
    /// Arrow table of the crystal.
    Graph {
        #[command(flatten)]
        ty: TypeArgs,
        /// DOT output instead of TSV.
        #[arg(long)]
        dot: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Rc2path,
    Path2rc,
}

/// Failure classes, mapped to exit codes.
enum Failure {
    Usage(String),
    Verify,
}

impl From<rcbij::Error> for Failure {
    fn from(e: rcbij::Error) -> Failure {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn weights(ty: &AffineType, cell: &CellArgs) -> Vec<Vec<i64>> {
    match &cell.weight {
        Some(w) => vec![w.clone()],
        None => crystal(ty).dominant_weights(cell.len),
    }
}

fn lambda_str(lambda: &[i64]) -> String {
    lambda.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

fn poly_json(p: &QPoly) -> Value {
    json!(p.to_pairs())
}

fn print_polys(out: &mut impl Write, cell: &CellArgs, rows: Vec<(Vec<i64>, QPoly)>) -> io::Result<()> {
    let single = cell.weight.is_some();
    for (lambda, p) in rows {
        match (single, cell.json) {
            (true, true) => writeln!(out, "{}", poly_json(&p))?,
            (true, false) => writeln!(out, "{p}")?,
            (false, true) => writeln!(out, "{}", json!({"lambda": lambda, "poly": poly_json(&p)}))?,
            (false, false) => writeln!(out, "{}\t{p}", lambda_str(&lambda))?,
        }
    }
    Ok(())
}

fn cmd_poly(out: &mut impl Write, cell: &CellArgs, f: impl Fn(&AffineType, &[i64], usize) -> rcbij::Result<QPoly>) -> CmdResult {
    let ty = cell.ty.affine()?;
    let mut rows = Vec::new();
    for lambda in weights(&ty, cell) {
        rows.push((lambda.clone(), f(&ty, &lambda, cell.len)?));
    }
    print_polys(out, cell, rows)?;
    Ok(())
}

fn cmd_x(out: &mut impl Write, cell: &CellArgs, dump_h: bool) -> CmdResult {
    if dump_h {
        let ty = cell.ty.affine()?;
        write!(out, "{}", local_h(&ty)?.to_tsv())?;
        return Ok(());
    }
    cmd_poly(out, cell, |ty, l, len| Ok(one_dim_sum(ty, l, len)?.1))
}

fn cmd_rc_enum(out: &mut impl Write, cell: &CellArgs) -> CmdResult {
    let ty = cell.ty.affine()?;
    let r = RcRules::new(&ty);
    for lambda in weights(&ty, cell) {
        let mut rcs = r.enumerate(&lambda, cell.len)?;
        rcs.sort();
        for rc in rcs {
            if cell.json {
                writeln!(out, "{}", rc.to_json())?;
            } else {
                writeln!(out, "{}\t{}", lambda_str(&lambda), rc_text(&rc))?;
            }
        }
    }
    Ok(())
}

fn rc_text(rc: &RiggedConfig) -> String {
    let s = rc.to_string();
    if s.is_empty() {
        "(empty)".to_string()
    } else {
        s
    }
}

fn cmd_path_enum(out: &mut impl Write, cell: &CellArgs) -> CmdResult {
    let ty = cell.ty.affine()?;
    let cr = crystal(&ty);
    for lambda in weights(&ty, cell) {
        let mut paths = cr.enumerate_highest(&lambda, cell.len)?;
        paths.sort();
        for p in paths {
            if cell.json {
                writeln!(out, "{}", json!(p))?;
            } else {
                writeln!(out, "{}\t{}", lambda_str(&lambda), format_path(&p))?;
            }
        }
    }
    Ok(())
}

/// Top-level JSON values from `input`; arrays of objects or of arrays are flattened one level.
fn json_items(input: &str, dir: Direction) -> Result<Vec<Value>, Failure> {
    let mut items = Vec::new();
    for v in serde_json::Deserializer::from_str(input).into_iter::<Value>() {
        let v = v.map_err(|e| Failure::Usage(format!("invalid JSON input: {e}")))?;
        let nested = match (&v, dir) {
            (Value::Array(xs), Direction::Rc2path) => Some(xs.clone()),
            (Value::Array(xs), Direction::Path2rc) if xs.iter().all(Value::is_array) => Some(xs.clone()),
            _ => None,
        };
        match nested {
            Some(xs) => items.extend(xs),
            None => items.push(v),
        }
    }
    Ok(items)
}

fn cmd_map(out: &mut impl Write, dir: Direction, ty: Option<AffineType>, relax: bool, tilde: bool) -> CmdResult {
    let mut input = String::new();
    io::stdin().read_to_string(&mut input)?;
    for item in json_items(&input, dir)? {
        match dir {
            Direction::Rc2path => {
                let rc = RiggedConfig::from_json(&item, relax)?;
                RcRules::new(&rc.ty).validate(&rc)?;
                let p = if tilde { phi_tilde(&rc)? } else { phi(&rc)? };
                writeln!(out, "{}", json!(p))?;
            }
            Direction::Path2rc => {
                let ty = ty.ok_or_else(|| Failure::Usage("path2rc needs --type and --n".into()))?;
                let p: Path = serde_json::from_value::<Vec<Letter>>(item)
                    .map_err(|e| Failure::Usage(format!("a path is a JSON array of letters: {e}")))?;
                let rc = if tilde { phi_tilde_inverse(&ty, &p)? } else { phi_inverse(&ty, &p)? };
                writeln!(out, "{}", rc.to_json())?;
            }
        }
    }
    Ok(())
}

fn cmd_graph(out: &mut impl Write, ty: &TypeArgs, dot: bool) -> CmdResult {
    let ty = ty.affine()?;
    let cr = crystal(&ty);
    if dot {
        write!(out, "{}", cr.to_dot())?;
        return Ok(());
    }
    writeln!(out, "i\tb\tf_i(b)")?;
    for i in 0..=ty.n {
        for &b in cr.letters() {
            if let Some(b2) = cr.apply_f(i, b)? {
                writeln!(out, "{i}\t{b}\t{b2}")?;
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let res = match cli.command {
        Command::X { cell, dump_h } => cmd_x(&mut out, &cell, dump_h),
        Command::M { cell } => cmd_poly(&mut out, &cell, |ty, l, len| RcRules::new(ty).fermionic_m(l, len)),
        Command::F { cell } => cmd_poly(&mut out, &cell, |ty, l, len| RcRules::new(ty).rc_genfun(l, len)),
        Command::RcEnum { cell } => cmd_rc_enum(&mut out, &cell),
        Command::PathEnum { cell } => cmd_path_enum(&mut out, &cell),
        Command::Map { dir, family, n, relax_rank, tilde } => {
            let ty = match (family, n) {
                (Some(f), Some(n)) => Some(AffineType::with_rank_policy(f, n, relax_rank)?),
                (None, None) => None,
                _ => return Err(Failure::Usage("--type and --n go together".into())),
            };
            cmd_map(&mut out, dir, ty, relax_rank, tilde)
        }
        Command::Verify { family, n, max_len, grid, relax_rank, out: path, timing } => {
            let cells = match (family, n, grid) {
                (Some(f), Some(n), None) => verify::cells_for_type(AffineType::with_rank_policy(f, n, relax_rank)?, 0..=max_len),
                (None, None, Some(g)) => verify::read_grid(&g, relax_rank)?,
                _ => return Err(Failure::Usage("verify needs either --type and --n, or --grid".into())),
            };
            let ok = match path {
                Some(p) => {
                    let mut f = io::BufWriter::new(std::fs::File::create(p)?);
                    verify::run(&mut f, &cells, timing)?
                }
                None => verify::run(&mut out, &cells, timing)?,
            };
            if ok {
                Ok(())
            } else {
                out.flush()?;
                Err(Failure::Verify)
            }
        }
        Command::Graph { ty, dot } => cmd_graph(&mut out, &ty, dot),
    };
    out.flush()?;
    res
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(EXIT_VERIFY),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
