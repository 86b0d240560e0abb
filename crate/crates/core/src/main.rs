use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crcodes::classify::{self, ClassifyOptions, DesignMode, Params};
use crcodes::constructions::{construct_code_d, hamming_retraction, retraction_survey};
use crcodes::gf::{distance_distribution, extended_hamming_code, macwilliams, max_weight_retraction, DistanceDistribution, FieldTable};
use crcodes::hamming::min_distance;
use crcodes::io::{read_code, read_partition, write_code, write_partition};
use crcodes::partitions::{array_to_quotient, cell_sizes, equitable_hull, product_code, sphere_spectrum, verify_cr};
use crcodes::symmetry::{automorphisms_of_code, Group};
use crcodes::{Error, IntersectionArray, QuotientMatrix, Space, VertexPartition};

const CHECKPOINT_ENV: &str = "CRCODES_CHECKPOINT_ROOT";

#[derive(Parser, Serialize)]
#[command(name = "crcodes", version, about = "Completely regular codes in Hamming graphs")]
struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seconds between progress lines on long runs.
    #[arg(long, global = true, default_value_t = 30)]
    heartbeat: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
enum Command {
    /// Check whether a code file is completely regular.
    Verify {
        file: PathBuf,
    },
    /// Classify equitable partitions with a radius-1 or radius-2 quotient by local reconstruction.
    Classify(ClassifyArgs),
    /// Distance spectrum of the cells around a vertex of the anchor cell.
    Spectrum {
        #[command(flatten)]
        matrix: MatrixArgs,
        /// Space as "n,q".
        #[arg(long, value_parser = parse_space)]
        space: (usize, usize),
        #[arg(long, default_value_t = 0)]
        anchor: usize,
    },
    /// Build one of the explicit codes.
    Construct {
        #[command(subcommand)]
        what: Construction,
        /// Also write the code in the code-file format.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Uniqueness of the {13,6,1;1,6,9} code in H(13,2).
    #[command(name = "unique-1369")]
    Unique1369,
    /// Row partitions of the complement of the [5,3,3]_4 Hamming code.
    #[command(name = "rows-h54")]
    RowsH54,
    /// Weight-4 designs in H(8,4) and their odd-distance pairs.
    #[command(name = "design-h84")]
    DesignH84 {
        #[arg(long, value_enum, default_value_t = ModeArg::VerifyOddPair)]
        mode: ModeArg,
        #[arg(long)]
        max_designs: Option<u64>,
        #[arg(long)]
        target_classes: Option<usize>,
        #[arg(long)]
        budget_nodes: Option<u64>,
    },
    /// Max-weight retraction test over Hamming codes with parameters (m,q).
    Survey {
        #[arg(long, default_value = "2,3;2,4;3,3;2,5;2,7;2,8;3,4", value_parser = parse_pairs)]
        pairs: PairList,
    },
    /// Coarsest equitable refinement of {code, rest} or of a partition file.
    Hull {
        #[arg(long, conflicts_with = "partition", required_unless_present = "partition")]
        code: Option<PathBuf>,
        #[arg(long)]
        partition: Option<PathBuf>,
        /// Also write the refined partition.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Automorphism group order and generators of a code.
    Aut {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = GroupArg::Full)]
        group: GroupArg,
    },
}

#[derive(Args, Serialize)]
struct MatrixArgs {
    /// Intersection array, "{b0,..;c1,..}" or "b0,..;c1,..".
    #[arg(long, conflicts_with = "quotient", required_unless_present = "quotient")]
    array: Option<String>,
    /// Quotient matrix "a,b;c,d" or a file holding it.
    #[arg(long)]
    quotient: Option<String>,
}

#[derive(Args, Serialize)]
struct ClassifyArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[arg(long)]
    n: usize,
    /// Cell of the all-zero word.
    #[arg(long, default_value_t = 0)]
    d: usize,
    /// Stages as "r0,r2;r0,r2;..."; completed by the default order up to (n,n).
    #[arg(long, value_parser = parse_pairs)]
    schedule: Option<PairList>,
    /// Checkpoint directory (default: $CRCODES_CHECKPOINT_ROOT/<parameter digest> when set).
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    resume: bool,
    /// Stop after this many continuations before isomorph rejection.
    #[arg(long)]
    budget_solutions: Option<u64>,
    /// Stop after this many seconds.
    #[arg(long)]
    budget_seconds: Option<u64>,
    /// Stop after this many schedule entries (no final verification).
    #[arg(long)]
    stop_after: Option<usize>,
    /// Write one partition file per final class into this directory.
    #[arg(long)]
    emit_dir: Option<PathBuf>,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "code")]
enum Construction {
    /// Full-weight words of the Hamming code over GF(q), in H(n,q-1).
    HammingRetraction {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        q: usize,
        /// Use the distance-4 extension of the code.
        #[arg(long)]
        extended: bool,
    },
    /// The 416-word cyclic code D in H(13,2).
    CodeD,
    /// Cartesian product of two code files.
    Product { a: PathBuf, b: PathBuf },
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    EnumerateDesigns,
    VerifyOddPair,
    PrescribedSymmetry,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GroupArg {
    Full,
    ZeroStabilizer,
    CoordinatePermutations,
}

fn parse_space(s: &str) -> Result<(usize, usize), String> {
    let (n, q) = s.split_once(',').ok_or("expected n,q")?;
    Ok((n.trim().parse().map_err(|_| "bad n")?, q.trim().parse().map_err(|_| "bad q")?))
}

/// "a,b;c,d;..." as one argument value.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
struct PairList(Vec<(usize, usize)>);

fn parse_pairs(s: &str) -> Result<PairList, String> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| parse_space(p).map_err(|e| format!("{e} in {p:?}; pairs are written a,b;c,d")))
        .collect::<Result<_, _>>()
        .map(PairList)
}

/// Digests of the files a command read.
#[derive(Default)]
struct Inputs(Vec<(String, String)>);

impl Inputs {
    fn read(&mut self, path: &Path) -> crcodes::Result<String> {
        let bytes = fs::read(path)?;
        self.0.push((path.display().to_string(), hex::encode(Sha256::digest(&bytes))));
        String::from_utf8(bytes).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })
    }
}

fn quotient_from(m: &MatrixArgs, space: Space, inputs: &mut Inputs) -> crcodes::Result<QuotientMatrix> {
    if let Some(a) = &m.array {
        let array: IntersectionArray = a.parse()?;
        return array_to_quotient(&array, space);
    }
    let text = m.quotient.as_deref().unwrap_or_default();
    let path = Path::new(text);
    if path.is_file() {
        inputs.read(path)?.trim().replace('\n', ";").parse()
    } else {
        text.parse()
    }
}

fn run(cli: &Cli, inputs: &mut Inputs) -> crcodes::Result<Value> {
    Ok(match &cli.command {
        Command::Verify { file } => {
            let code = read_code(&inputs.read(file)?)?;
            let verdict = verify_cr(&code)?;
            json!({
                "space": code.space(),
                "size": code.len(),
                "min_distance": if code.len() >= 2 { Some(min_distance(&code)?) } else { None },
                "cr": verdict,
                "distance_distribution": distance_distribution(&code)?,
            })
        }
        Command::Classify(args) => classify_cmd(cli, args, inputs)?,
        Command::Spectrum { matrix, space, anchor } => {
            let space = Space::new(space.0, space.1)?;
            let quotient = quotient_from(matrix, space, inputs)?;
            let sizes = cell_sizes(&quotient, space)?;
            let table = sphere_spectrum(&quotient, space, *anchor)?;
            let dist = DistanceDistribution::from_integers(space.n(), space.q(), &table.column(*anchor));
            json!({
                "quotient": quotient,
                "cell_sizes": sizes,
                "spectrum": table,
                "distribution": dist,
                "dual_distribution": macwilliams(&dist)?,
            })
        }
        Command::Construct { what, emit } => {
            let code = match what {
                Construction::HammingRetraction { m, q, extended: false } => hamming_retraction(*m, *q)?,
                Construction::HammingRetraction { m, q, extended: true } => max_weight_retraction(&extended_hamming_code(*m, &FieldTable::new(*q)?)?)?,
                Construction::CodeD => construct_code_d()?,
                Construction::Product { a, b } => product_code(&read_code(&inputs.read(a)?)?, &read_code(&inputs.read(b)?)?)?,
            };
            let text = write_code(&code);
            if let Some(path) = emit {
                fs::write(path, &text)?;
            }
            json!({
                "space": code.space(),
                "size": code.len(),
                "code_sha256": hex::encode(Sha256::digest(text.as_bytes())),
                "cr": verify_cr(&code)?,
            })
        }
        Command::Unique1369 => serde_json::to_value(classify::unique_1369()?)?,
        Command::RowsH54 => {
            let r = classify::row_partitions_h54()?;
            let mut v = serde_json::to_value(&r)?;
            v["double_count_balances"] = json!(r.double_count_balances());
            v
        }
        Command::DesignH84 { mode, max_designs, target_classes, budget_nodes } => {
            let mode = match mode {
                ModeArg::EnumerateDesigns => DesignMode::EnumerateDesigns,
                ModeArg::VerifyOddPair => DesignMode::VerifyOddPair,
                ModeArg::PrescribedSymmetry => DesignMode::PrescribedSymmetry,
            };
            let r = classify::design_argument_h84(mode, *max_designs, *target_classes, *budget_nodes)?;
            let budget_hit = !r.complete && max_designs.is_none() && target_classes.is_none();
            let v = serde_json::to_value(r)?;
            if budget_hit {
                return Err(Error::Budget(format!("node budget reached: {v}")));
            }
            v
        }
        Command::Survey { pairs } => serde_json::to_value(retraction_survey(&pairs.0)?)?,
        Command::Hull { code, partition, emit } => {
            let seed = match (code, partition) {
                (Some(path), _) => VertexPartition::from_code(&read_code(&inputs.read(path)?)?)?,
                (None, Some(path)) => read_partition(&inputs.read(path)?)?,
                (None, None) => unreachable!("clap requires one of --code and --partition"),
            };
            let (hull, quotient) = equitable_hull(&seed);
            if let Some(path) = emit {
                fs::write(path, write_partition(&hull))?;
            }
            json!({
                "seed_cells": seed.cell_count(),
                "cells": hull.cell_count(),
                "cell_sizes": hull.cell_sizes(),
                "quotient": quotient,
            })
        }
        Command::Aut { file, group } => {
            let code = read_code(&inputs.read(file)?)?;
            let group = match group {
                GroupArg::Full => Group::Full,
                GroupArg::ZeroStabilizer => Group::ZeroStabilizer,
                GroupArg::CoordinatePermutations => Group::CoordinatePermutations,
            };
            serde_json::to_value(automorphisms_of_code(&code, group)?)?
        }
    })
}

fn classify_cmd(cli: &Cli, args: &ClassifyArgs, inputs: &mut Inputs) -> crcodes::Result<Value> {
    let quotient = quotient_from(&args.matrix, Space::new(args.n, 2)?, inputs)?;
    let params = Params::new(quotient, args.n, args.d)?;
    let checkpoint_dir = args.checkpoint.clone().or_else(|| {
        let root = std::env::var_os(CHECKPOINT_ENV)?;
        let key = serde_json::to_vec(&params).ok()?;
        Some(PathBuf::from(root).join(&hex::encode(Sha256::digest(&key))[..16]))
    });
    let opts = ClassifyOptions {
        threads: cli.threads,
        checkpoint_dir,
        resume: args.resume,
        raw_budget: args.budget_solutions,
        time_budget: args.budget_seconds.map(Duration::from_secs),
        heartbeat: Duration::from_secs(cli.heartbeat.max(1)),
        max_stages: args.stop_after,
    };
    let schedule = args.schedule.clone().map(|p| p.0).unwrap_or_default();
    let outcome = classify::classify(&params, &schedule, &opts)?;
    if let Some(dir) = &args.emit_dir {
        fs::create_dir_all(dir)?;
        for (i, p) in outcome.partitions.iter().enumerate() {
            fs::write(dir.join(format!("class-{i:03}.txt")), write_partition(p))?;
        }
    }
    let mut v = serde_json::to_value(&outcome.report)?;
    v["counts"] = json!(outcome.report.counts());
    v["double_counts_balance"] = json!(outcome.report.stages.iter().all(|s| s.double_count_balances()));
    Ok(v)
}

fn exit_code(e: &Error) -> (u8, &'static str) {
    match e {
        Error::Infeasible(_) => (2, "infeasible"),
        Error::Budget(_) => (3, "budget-exceeded"),
        _ => (4, "input-error"),
    }
}

fn render_text(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                render_text(x, &p, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                render_text(x, &format!("{prefix}[{i}]"), out);
            }
        }
        _ => out.push_str(&format!("{prefix}: {v}\n")),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let mut inputs = Inputs::default();
    let result = run(&cli, &mut inputs);
    let (code, status, body) = match result {
        Ok(v) => (0, "completed", ("result", v)),
        Err(e) => {
            let (code, status) = exit_code(&e);
            log::error!("{e}");
            (code, status, ("error", json!(e.to_string())))
        }
    };
    let mut report = json!({
        "tool": "crcodes",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cli,
        "inputs": inputs.0.iter().map(|(p, d)| json!({"path": p, "sha256": d})).collect::<Vec<_>>(),
        "status": status,
    });
    report[body.0] = body.1;
    let rendered = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Text => {
            let mut s = String::new();
            render_text(&report, "", &mut s);
            s
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, rendered) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(4);
            }
        }
        None => print!("{rendered}"),
    }
    ExitCode::from(code)
}
