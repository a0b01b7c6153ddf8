//! `mntgen` command-line interface. Data goes to `out` as JSON lines (or
//! plain text with `--text`); diagnostics go to `err`.

use std::ffi::OsString;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;

use crate::error::Error;
use crate::families::{families_for, Branch, QuadraticFamily};
use crate::pell::{self, PellInstance};
use crate::published::audit;
use crate::search::{run_search, verify_candidate, CandidateRecord, CurveCandidate, Mode, SearchConfig};
use crate::serde_int::parse_int;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_RESULTS: i32 = 1;
pub const EXIT_INADMISSIBLE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;

fn big(s: &str) -> Result<BigInt, String> {
    parse_int(s).ok_or_else(|| format!("{s:?} is not a decimal or 0x-hex integer"))
}

fn int<T: TryFrom<BigInt>>(s: &str) -> Result<T, String> {
    T::try_from(big(s)?).map_err(|_| format!("{s} is out of range"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    A,
    B,
    Both,
}

impl BranchArg {
    fn branches(self) -> Vec<Branch> {
        match self {
            BranchArg::A => vec![Branch::A],
            BranchArg::B => vec![Branch::B],
            BranchArg::Both => Branch::BOTH.to_vec(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mntgen", version, about = "Generalized MNT curve parameters with a small cofactor")]
pub struct Cli {
    /// Emit JSON lines (default)
    #[arg(long, global = true, conflicts_with = "text")]
    pub json: bool,
    /// Emit plain text
    #[arg(long, global = true)]
    pub text: bool,
    /// Worker threads; 0 uses every processor
    #[arg(long, global = true, default_value = "0", value_parser = int::<usize>)]
    pub jobs: usize,
    /// Suppress warnings
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List every family for an embedding degree and cofactor
    Families(FamiliesArgs),
    /// Solve X^2 - D*Y^2 = m
    Pell(PellArgs),
    /// Pell-driven search over square-free discriminants
    Search(SearchArgs),
    /// Direct scan over x
    Scan(ScanArgs),
    /// Re-verify candidate records (JSON lines) from a file or stdin
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct FamiliesArgs {
    #[arg(long, value_parser = int::<u32>)]
    pub k: u32,
    #[arg(long, value_parser = int::<u64>)]
    pub q: u64,
    #[arg(long, value_enum, ignore_case = true, default_value = "both")]
    pub branch: BranchArg,
}

#[derive(Debug, Args)]
pub struct PellArgs {
    #[arg(long, value_parser = big)]
    pub d: BigInt,
    #[arg(long, allow_hyphen_values = true, value_parser = int::<i64>)]
    pub m: i64,
    /// Emit solutions with |X| < 2^bits
    #[arg(long, default_value = "64", value_parser = int::<u32>)]
    pub bits: u32,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long, value_parser = int::<u32>)]
    pub k: u32,
    #[arg(long, value_parser = int::<u64>)]
    pub q: u64,
    #[arg(long, value_enum, ignore_case = true, default_value = "both")]
    pub branch: BranchArg,
    /// Smallest |Δ|
    #[arg(long, default_value = "1", value_parser = int::<u64>)]
    pub dmin: u64,
    #[arg(long = "pbits-min", default_value = "0", value_parser = int::<u64>)]
    pub pbits_min: u64,
    #[arg(long = "pbits-max", value_parser = int::<u64>)]
    pub pbits_max: Option<u64>,
    #[arg(long = "max-hits", value_parser = int::<usize>)]
    pub max_hits: Option<usize>,
}

impl FilterArgs {
    fn config(&self) -> SearchConfig {
        let mut cfg = SearchConfig::new(self.k, self.q);
        cfg.branches = self.branch.branches();
        cfg.delta_min = self.dmin;
        cfg.p_bits_min = self.pbits_min;
        cfg.p_bits_max = self.pbits_max;
        cfg.max_hits = self.max_hits;
        cfg
    }
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Largest |Δ|
    #[arg(long, default_value = "10000", value_parser = int::<u64>)]
    pub dmax: u64,
    /// Bound on |X| in bits; defaults to pbits-max/2 + 4, or 64
    #[arg(long, value_parser = int::<u32>)]
    pub bits: Option<u32>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Largest |Δ|; unbounded by default
    #[arg(long, value_parser = int::<u64>)]
    pub dmax: Option<u64>,
    #[arg(long, allow_hyphen_values = true, value_parser = big)]
    pub xmin: BigInt,
    #[arg(long, allow_hyphen_values = true, value_parser = big)]
    pub xmax: BigInt,
    /// Trial-division bound for the square-free part of 4p - t^2
    #[arg(long = "trial-bound", default_value = "1000000", value_parser = int::<u64>)]
    pub trial_bound: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Candidate file; stdin when absent or "-"
    pub path: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

struct Ctx<'a> {
    pool: rayon::ThreadPool,
    format: Format,
    quiet: bool,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn json<T: Serialize>(&mut self, value: &T) {
        let line = serde_json::to_string(value).expect("records serialize");
        let _ = writeln!(self.out, "{line}");
    }

    fn warn(&mut self, msg: impl std::fmt::Display) {
        if !self.quiet {
            let _ = writeln!(self.err, "warning: {msg}");
        }
    }

    fn fail(&mut self, msg: impl std::fmt::Display) {
        let _ = writeln!(self.err, "error: {msg}");
    }

    fn error_code(&mut self, e: &Error) -> i32 {
        self.fail(e);
        match e {
            Error::Inadmissible(_) => EXIT_INADMISSIBLE,
            _ => EXIT_USAGE,
        }
    }
}

fn family_text(f: &QuadraticFamily) -> String {
    format!(
        "{}: n = {}, p = {}, t = {}, X = {}, m = {}",
        f.spec,
        f.n,
        f.p,
        f.t,
        f.pell.x_polynomial(),
        f.pell.m
    )
}

fn candidate_text(c: &CurveCandidate) -> String {
    format!(
        "k={} q={} s={} branch={} x={} p={} n={} t={} delta={} Y={} p_bits={} n_bits={}",
        c.k, c.q, c.s, c.branch, c.x, c.p, c.n, c.t, c.delta, c.y, c.p_bits, c.n_bits
    )
}

fn cmd_families(args: &FamiliesArgs, ctx: &mut Ctx) -> i32 {
    let fams = match families_for(args.k, args.q) {
        Ok(f) => f,
        Err(e) => return ctx.error_code(&e),
    };
    let branches = args.branch.branches();
    let fams: Vec<_> = fams.into_iter().filter(|f| branches.contains(&f.spec.branch)).collect();
    for f in &fams {
        for erratum in audit(f) {
            ctx.warn(erratum);
        }
        match ctx.format {
            Format::Json => ctx.json(f),
            Format::Text => {
                let line = family_text(f);
                let _ = writeln!(ctx.out, "{line}");
            }
        }
    }
    if fams.is_empty() {
        EXIT_NO_RESULTS
    } else {
        EXIT_OK
    }
}

fn cmd_pell(args: &PellArgs, ctx: &mut Ctx) -> i32 {
    let inst = match PellInstance::new(args.d.clone(), args.m) {
        Ok(i) => i,
        Err(e) => return ctx.error_code(&e),
    };
    if args.bits == 0 {
        ctx.fail("bits must be positive");
        return EXIT_USAGE;
    }
    for sol in pell::solve(&inst, args.bits) {
        match ctx.format {
            Format::Json => ctx.json(&sol),
            Format::Text => {
                let _ = writeln!(ctx.out, "{} {}", sol.x, sol.y);
            }
        }
    }
    EXIT_OK
}

fn emit_candidates(cfg: &SearchConfig, ctx: &mut Ctx) -> i32 {
    match ctx.pool.install(|| run_search(cfg)) {
        Err(e) => ctx.error_code(&e),
        Ok(hits) if hits.is_empty() => EXIT_NO_RESULTS,
        Ok(hits) => {
            for c in &hits {
                match ctx.format {
                    Format::Json => ctx.json(c),
                    Format::Text => {
                        let line = candidate_text(c);
                        let _ = writeln!(ctx.out, "{line}");
                    }
                }
            }
            EXIT_OK
        }
    }
}

fn cmd_search(args: &SearchArgs, ctx: &mut Ctx) -> i32 {
    let mut cfg = args.filter.config();
    cfg.delta_max = args.dmax;
    cfg.x_bits_max = args.bits;
    emit_candidates(&cfg, ctx)
}

fn cmd_scan(args: &ScanArgs, ctx: &mut Ctx) -> i32 {
    let mut cfg = args.filter.config();
    cfg.delta_max = args.dmax.unwrap_or(u64::MAX);
    cfg.trial_bound = args.trial_bound;
    cfg.mode = Mode::DirectScan { x_min: args.xmin.clone(), x_max: args.xmax.clone() };
    emit_candidates(&cfg, ctx)
}

#[derive(Serialize)]
struct VerifyLine<'a> {
    record: usize,
    passed: bool,
    failed: Vec<&'a str>,
}

fn parse_records(text: &str) -> Result<Vec<CandidateRecord>, String> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        return serde_json::from_str(trimmed).map_err(|e| format!("candidate array: {e}"));
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| format!("line {}: {e}", i + 1)))
        .collect()
}

fn cmd_verify(args: &VerifyArgs, input: &mut dyn Read, ctx: &mut Ctx) -> i32 {
    let mut text = String::new();
    let read = match args.path.as_deref() {
        None | Some("-") => input.read_to_string(&mut text).map(|_| ()),
        Some(path) => std::fs::read_to_string(path).map(|t| text = t),
    };
    if let Err(e) = read {
        ctx.fail(format!("cannot read candidates: {e}"));
        return EXIT_DATA;
    }
    let records = match parse_records(&text) {
        Ok(r) => r,
        Err(e) => {
            ctx.fail(format!("malformed candidate JSON: {e}"));
            return EXIT_DATA;
        }
    };
    if records.is_empty() {
        ctx.fail("no candidate records");
        return EXIT_NO_RESULTS;
    }
    let mut all = true;
    for (i, rec) in records.iter().enumerate() {
        let report = verify_candidate(rec);
        all &= report.all_passed();
        match ctx.format {
            Format::Json => {
                let failed = report.failures().map(|c| c.name).collect();
                ctx.json(&VerifyLine { record: i + 1, passed: report.all_passed(), failed });
            }
            Format::Text => {
                let line = if report.all_passed() {
                    format!("record {}: pass", i + 1)
                } else {
                    let why: Vec<_> = report.failures().map(|c| c.to_string()).collect();
                    format!("record {}: FAIL {}", i + 1, why.join("; "))
                };
                let _ = writeln!(ctx.out, "{line}");
            }
        }
    }
    if all {
        EXIT_OK
    } else {
        EXIT_NO_RESULTS
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I, input: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{rendered}") } else { write!(out, "{rendered}") };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start workers: {e}");
            return EXIT_USAGE;
        }
    };
    let mut ctx = Ctx {
        pool,
        format: if cli.text { Format::Text } else { Format::Json },
        quiet: cli.quiet,
        out,
        err,
    };
    let code = match &cli.command {
        Command::Families(a) => cmd_families(a, &mut ctx),
        Command::Pell(a) => cmd_pell(a, &mut ctx),
        Command::Search(a) => cmd_search(a, &mut ctx),
        Command::Scan(a) => cmd_scan(a, &mut ctx),
        Command::Verify(a) => cmd_verify(a, input, &mut ctx),
    };
    let _ = ctx.out.flush();
    code
}

/// Log level implied by the command line, for the binary's logger.
pub fn log_level(args: &[OsString]) -> log::LevelFilter {
    if args.iter().any(|a| a == "--quiet" || a == "-q") {
        log::LevelFilter::Error
    } else {
        log::LevelFilter::Warn
    }
}
