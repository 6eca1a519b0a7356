//! The `succinct` command line: corpus generation, structure build and
//! load, oracle verification, latency benchmarks and space breakdowns.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 usage, format or I/O
//! error. `SUCCINCT_SEED` overrides `--seed`.

use std::ffi::OsString;
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;

use crate::apcompress::ApParams;
use crate::corpus;
use crate::error::Error;
use crate::files::{
    merged_sections, prefix_sum_keys, read_sequence, write_sequence, AnyStructure, Backend, BuildParams,
    StructureFile,
};
use crate::golynski::{GolynskiMode, GolynskiParams};
use crate::seqcore::{OccurrenceIndex, Sequence, SequenceOps};
use crate::wavelet::WaveletParams;

pub const SEED_ENV: &str = "SUCCINCT_SEED";
pub const CSV_HEADER: &str = "backend,op,n,sigma,params,ns_median,ns_p99,bits_per_symbol";

#[derive(Parser, Debug)]
#[command(name = "succinct", version, about = "Build, verify and measure succinct sequence structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a random or text-derived sequence file.
    Gen(GenArgs),
    /// Build a structure over a sequence file and save it.
    Build(BuildArgs),
    /// Check a structure against the brute-force oracle.
    Verify(VerifyArgs),
    /// Time queries and report bits per symbol.
    Bench(BenchArgs),
    /// Print a structure file's parameters and per-component sizes.
    Info(InfoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Dist {
    Uniform,
    Zipf,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum, default_value_t = Dist::Uniform, conflicts_with = "from_text")]
    dist: Dist,
    /// Sequence length; with --from-text the text is cycled to this length.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, required_unless_present = "from_text")]
    sigma: Option<u64>,
    #[arg(long, default_value_t = 1.0)]
    zipf_s: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bytes of this file become symbols 1..=256.
    #[arg(long)]
    from_text: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Select,
    Access,
}

#[derive(Args, Debug, Clone)]
struct ParamArgs {
    /// Wavelet digit width in bits.
    #[arg(long, default_value_t = crate::wavelet::DEFAULT_DIGIT_BITS)]
    digit_bits: u32,
    /// Wavelet rank block, in positions.
    #[arg(long, default_value_t = crate::wavelet::DEFAULT_BLOCK)]
    block: usize,
    /// Which golynski operation is constant time.
    #[arg(long, value_enum, default_value_t = ModeArg::Select)]
    mode: ModeArg,
    #[arg(long, default_value_t = crate::golynski::DEFAULT_F)]
    f: u32,
    /// Local alphabet size from which apcompress members use golynski.
    #[arg(long, default_value_t = crate::apcompress::DEFAULT_THRESHOLD)]
    threshold: u64,
    #[arg(long, default_value_t = crate::apcompress::DEFAULT_MAX_CLASS)]
    max_class: u32,
}

impl ParamArgs {
    fn build_params(&self) -> Result<BuildParams, Error> {
        let golynski = GolynskiParams {
            mode: match self.mode {
                ModeArg::Select => GolynskiMode::ConstantSelect,
                ModeArg::Access => GolynskiMode::ConstantAccess,
            },
            f: self.f,
        };
        Ok(BuildParams {
            wavelet: WaveletParams::new(self.digit_bits, self.block)?,
            golynski,
            apcompress: ApParams {
                threshold: self.threshold,
                max_class: self.max_class,
                chunked: golynski,
            },
        })
    }
}

#[derive(Args, Debug)]
#[group(id = "source", required = true, multiple = false, args = ["backend", "structure"])]
struct Source {
    /// Build this backend in memory.
    #[arg(long, value_enum)]
    backend: Option<Backend>,
    /// Load a saved structure file.
    #[arg(long)]
    structure: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    backend: Backend,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    params: ParamArgs,
    /// Random queries per operation.
    #[arg(long, default_value_t = 10_000)]
    queries: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Tsv,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    params: ParamArgs,
    /// Comma-separated: access, rank, select (sequences) or pred.
    #[arg(long, value_delimiter = ',', default_value = "access,rank,select")]
    ops: Vec<String>,
    #[arg(long, default_value_t = 10_000)]
    queries: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct InfoArgs {
    file: PathBuf,
    /// Deepest section level to list.
    #[arg(long, default_value_t = 1)]
    depth: usize,
}

enum Failure {
    Usage(String),
    Lib(Error),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

type CmdResult = Result<(), Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a, out),
        Command::Build(a) => cmd_build(a, out, err),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Bench(a) => cmd_bench(a, out),
        Command::Info(a) => cmd_info(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Mismatch(msg)) => {
            let _ = writeln!(err, "{msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "usage error: {msg}");
            2
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

/// The seed in effect: `SUCCINCT_SEED` when set, else the flag.
fn effective_seed(flag: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

fn cmd_gen(a: GenArgs, out: &mut dyn Write) -> CmdResult {
    let seq = if let Some(path) = &a.from_text {
        let bytes = std::fs::read(path)?;
        if bytes.is_empty() {
            return Err(Error::Validation(format!("{} is empty", path.display())).into());
        }
        let symbols = corpus::from_text(&bytes);
        let symbols = match a.n {
            Some(n) => corpus::cycle_to(&symbols, n),
            None => symbols,
        };
        Sequence::new(symbols, 256)?
    } else {
        let n = a.n.ok_or_else(|| Failure::Usage("--n is required".into()))?;
        let sigma = a.sigma.unwrap_or(0);
        if n == 0 || sigma < 2 {
            return Err(Failure::Usage("gen needs --n >= 1 and --sigma >= 2".into()));
        }
        let seed = effective_seed(a.seed)?;
        let symbols = match a.dist {
            Dist::Uniform => corpus::uniform(n, sigma, seed)?,
            Dist::Zipf => corpus::zipf(n, sigma, a.zipf_s, seed)?,
        };
        Sequence::new(symbols, sigma)?
    };
    write_sequence(&a.out, &seq)?;
    writeln!(out, "wrote {} symbols over sigma={} to {}", seq.len(), seq.sigma(), a.out.display())?;
    Ok(())
}

fn load_input(path: &Path) -> Result<Sequence, Failure> {
    let seq = read_sequence(path)?;
    if seq.is_empty() {
        return Err(Error::Validation(format!("{} holds an empty sequence", path.display())).into());
    }
    Ok(seq)
}

fn build_structure(backend: Backend, seq: &Sequence, params: &ParamArgs, err: &mut dyn Write) -> Result<AnyStructure, Failure> {
    let s = AnyStructure::build(backend, seq, &params.build_params()?)?;
    if let AnyStructure::Golynski(g) = &s {
        if g.single_chunk() {
            let _ = writeln!(
                err,
                "warning: sigma={} >= n={}, golynski uses a single chunk",
                seq.sigma(),
                seq.len()
            );
        }
    }
    Ok(s)
}

fn obtain(source: &Source, seq: &Sequence, params: &ParamArgs, err: &mut dyn Write) -> Result<AnyStructure, Failure> {
    match (&source.backend, &source.structure) {
        (Some(b), None) => build_structure(*b, seq, params, err),
        (None, Some(p)) => Ok(AnyStructure::load(p)?),
        _ => Err(Failure::Usage("give exactly one of --backend and --structure".into())),
    }
}

fn print_breakdown(s: &AnyStructure, max_depth: usize, out: &mut dyn Write) -> std::io::Result<()> {
    let enc = s.encode();
    let total = enc.words().len() as u64 * 64;
    let n = s.len().max(1) as f64;
    writeln!(out, "total: {total} bits ({:.4} bits/symbol)", total as f64 / n)?;
    for sec in merged_sections(enc.sections()) {
        if sec.depth > max_depth {
            continue;
        }
        let name = sec.path.rsplit('/').next().unwrap_or(&sec.path);
        writeln!(
            out,
            "{:indent$}{:<28} {:>12} bits {:>9.4} bits/symbol",
            "",
            name,
            sec.bits,
            sec.bits as f64 / n,
            indent = 2 + 2 * sec.depth
        )?;
    }
    Ok(())
}

fn cmd_build(a: BuildArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let seq = load_input(&a.input)?;
    let t = Instant::now();
    let s = build_structure(a.backend, &seq, &a.params, err)?;
    let ms = t.elapsed().as_secs_f64() * 1e3;
    s.save(&a.out)?;
    writeln!(
        out,
        "built {} (n={}, sigma={}, {}) in {ms:.1} ms",
        s.backend(),
        seq.len(),
        seq.sigma(),
        s.param_string()
    )?;
    if let AnyStructure::Wavelet(w) = &s {
        let n = seq.len() as f64;
        writeln!(
            out,
            "payload {} bits ({:.4}/symbol), directories {} bits ({:.4}/symbol)",
            w.payload_bits(),
            w.payload_bits() as f64 / n,
            w.directory_bits(),
            w.directory_bits() as f64 / n
        )?;
    }
    print_breakdown(&s, 1, out)?;
    writeln!(out, "saved {}", a.out.display())?;
    Ok(())
}

fn cmd_info(a: InfoArgs, out: &mut dyn Write) -> CmdResult {
    let bytes = std::fs::read(&a.file)?;
    let file = StructureFile::parse(&bytes)?;
    let s = &file.structure;
    writeln!(out, "backend: {}", file.backend)?;
    writeln!(out, "params: {}", s.param_string())?;
    match s {
        AnyStructure::Predecessor(_) => writeln!(out, "keys: {}\nuniverse: {}", s.len(), s.sigma())?,
        _ => writeln!(out, "n: {}\nsigma: {}", s.len(), s.sigma())?,
    }
    let payload: u64 = file.components.iter().map(|c| c.1).sum();
    writeln!(
        out,
        "file: {} bytes, {} payload bits, {} framing bits",
        bytes.len(),
        payload,
        bytes.len() as u64 * 8 - payload
    )?;
    print_breakdown(s, a.depth, out)?;
    Ok(())
}

/// One query and its answer, in a comparable form.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Answer {
    Value(u64),
    Error(String),
    Panic(String),
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::OutOfRange { .. } => "OutOfRange",
        Error::NotFound { .. } => "NotFound",
        Error::Validation(_) => "Validation",
        Error::Undefined(_) => "Undefined",
        Error::Contract(_) => "Contract",
        Error::Format(_) => "Format",
        Error::Io(_) => "Io",
    }
}

fn answer<T: Into<u64>>(f: impl FnOnce() -> crate::Result<T>) -> Answer {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => Answer::Value(v.into()),
        Ok(Err(e)) => Answer::Error(error_kind(&e).into()),
        Err(p) => Answer::Panic(
            p.downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default(),
        ),
    }
}

#[derive(Debug, Clone, Copy)]
enum Query {
    Access(usize),
    Rank(u64, usize),
    Select(u64, usize),
}

impl std::fmt::Display for Query {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Query::Access(i) => write!(f, "access(i={i})"),
            Query::Rank(a, i) => write!(f, "rank(a={a}, i={i})"),
            Query::Select(a, j) => write!(f, "select(a={a}, j={j})"),
        }
    }
}

fn ask(s: &dyn SequenceOps, q: Query) -> Answer {
    match q {
        Query::Access(i) => answer(|| s.access(i)),
        Query::Rank(a, i) => answer(|| s.rank(a, i).map(|v| v as u64)),
        Query::Select(a, j) => answer(|| s.select(a, j).map(|v| v as u64)),
    }
}

/// Random queries: positions uniform, symbols drawn from the sequence
/// half of the time (so they occur) and uniform over the alphabet
/// otherwise, select counts up to one past the last occurrence.
fn random_queries(oracle: &OccurrenceIndex, op: &str, count: usize, rng: &mut impl Rng) -> Vec<Query> {
    let n = oracle.len();
    let sigma = oracle.sigma();
    let symbol = |rng: &mut dyn rand::RngCore| -> u64 {
        if rng.random_bool(0.5) {
            oracle.access(rng.random_range(1..=n)).unwrap()
        } else {
            rng.random_range(1..=sigma)
        }
    };
    (0..count)
        .map(|_| match op {
            "access" => Query::Access(rng.random_range(1..=n)),
            "rank" => {
                let a = symbol(rng);
                Query::Rank(a, rng.random_range(0..=n))
            }
            _ => {
                let a = symbol(rng);
                Query::Select(a, rng.random_range(1..=oracle.count(a) + 1))
            }
        })
        .collect()
}

/// Every valid argument plus the first invalid one on each side, for
/// small sequences. Alphabets above 1024 take the occurring symbols and
/// both ends instead of every symbol.
fn exhaustive_queries(oracle: &OccurrenceIndex) -> Vec<Query> {
    let n = oracle.len();
    let sigma = oracle.sigma();
    let mut symbols: Vec<u64> = if sigma <= 1024 {
        (1..=sigma).collect()
    } else {
        let mut v = oracle.to_symbols();
        v.extend([1, sigma]);
        v
    };
    symbols.sort_unstable();
    symbols.dedup();
    let mut qs: Vec<Query> = (0..=n + 1).map(Query::Access).collect();
    for &a in symbols.iter().chain([sigma + 1, 0].iter()) {
        qs.extend((0..=n + 1).map(|i| Query::Rank(a, i)));
        let c = if a == 0 || a > sigma { 1 } else { oracle.count(a) + 1 };
        qs.extend((0..=c).map(|j| Query::Select(a, j)));
    }
    qs
}

/// Outcome of checking a structure against the oracle.
#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub queries: usize,
    pub mismatches: usize,
    pub first: Option<String>,
}

fn record(report: &mut VerifyReport, context: impl FnOnce() -> String) {
    report.mismatches += 1;
    if report.first.is_none() {
        report.first = Some(context());
    }
}

/// Checks `s` against the oracle with `queries` random queries per
/// operation (and every query when `n <= 512`), plus the round trips
/// `rank(a, select(a, j)) = j` and `access(select(a, j)) = a`.
pub fn verify_sequence(s: &dyn SequenceOps, seq: &Sequence, queries: usize, seed: u64) -> VerifyReport {
    let mut report = VerifyReport::default();
    if s.len() != seq.len() || s.sigma() != seq.sigma() {
        record(&mut report, || {
            format!(
                "shape: structure has n={} sigma={}, sequence has n={} sigma={}",
                s.len(),
                s.sigma(),
                seq.len(),
                seq.sigma()
            )
        });
        return report;
    }
    let oracle = OccurrenceIndex::new(seq.symbols().to_vec(), seq.sigma()).expect("valid sequence");
    let mut rng = corpus::rng(seed);
    let mut qs = Vec::new();
    for op in ["access", "rank", "select"] {
        qs.extend(random_queries(&oracle, op, queries, &mut rng));
    }
    if seq.len() <= 512 {
        qs.extend(exhaustive_queries(&oracle));
    }
    let hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    for q in qs {
        report.queries += 1;
        let got = ask(s, q);
        let want = ask(&oracle, q);
        if got != want {
            record(&mut report, || format!("{q}: structure {got:?}, oracle {want:?}"));
            continue;
        }
        if let (Query::Select(a, j), Answer::Value(p)) = (q, &got) {
            let p = *p as usize;
            let r = ask(s, Query::Rank(a, p));
            let x = ask(s, Query::Access(p));
            if r != Answer::Value(j as u64) || x != Answer::Value(a) {
                record(&mut report, || {
                    format!("{q} = {p}: rank(a={a}, i={p}) = {r:?}, access(i={p}) = {x:?}")
                });
            }
        }
    }
    panic::set_hook(hook);
    report
}

/// Predecessor checks over the prefix-sum keys of `seq`.
pub fn verify_predecessor(p: &crate::predecessor::PredecessorSet, seq: &Sequence, queries: usize, seed: u64) -> VerifyReport {
    let keys = prefix_sum_keys(seq.symbols());
    let u = keys.last().copied().unwrap_or(1);
    let mut report = VerifyReport::default();
    if p.len() != keys.len() || p.universe() != u {
        record(&mut report, || "predecessor set does not match the sequence's keys".into());
        return report;
    }
    let mut rng = corpus::rng(seed);
    let mut xs: Vec<u64> = (0..queries).map(|_| rng.random_range(0..=u + 1)).collect();
    if u <= 4096 {
        xs.extend(0..=u + 1);
    }
    let hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    for x in xs {
        report.queries += 1;
        let r = keys.partition_point(|&k| k <= x);
        let want = (if r == 0 { 0 } else { keys[r - 1] }, r);
        match panic::catch_unwind(|| p.query(x)) {
            Ok(got) if got == want => {}
            Ok(got) => record(&mut report, || format!("pred(x={x}): structure {got:?}, oracle {want:?}")),
            Err(_) => record(&mut report, || format!("pred(x={x}): structure panicked, oracle {want:?}")),
        }
    }
    panic::set_hook(hook);
    report
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> CmdResult {
    if a.queries == 0 {
        return Err(Failure::Usage("--queries must be at least 1".into()));
    }
    let seed = effective_seed(a.seed)?;
    let seq = load_input(&a.input)?;
    let s = obtain(&a.source, &seq, &a.params, &mut std::io::sink())?;
    let report = match &s {
        AnyStructure::Predecessor(p) => verify_predecessor(p, &seq, a.queries, seed),
        _ => verify_sequence(s.as_sequence().unwrap(), &seq, a.queries, seed),
    };
    writeln!(
        out,
        "verify {} n={} sigma={} seed={seed}: {} queries, {} mismatches",
        s.backend(),
        seq.len(),
        seq.sigma(),
        report.queries,
        report.mismatches
    )?;
    match report.first {
        None => Ok(()),
        Some(first) => Err(Failure::Mismatch(format!(
            "{} mismatches; first: {first}",
            report.mismatches
        ))),
    }
}

/// One row of the benchmark table.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub backend: Backend,
    pub op: String,
    pub n: usize,
    pub sigma: u64,
    pub params: String,
    pub ns_median: f64,
    pub ns_p99: f64,
    pub bits_per_symbol: f64,
}

impl BenchRow {
    pub fn to_line(&self, sep: char) -> String {
        format!(
            "{1}{0}{2}{0}{3}{0}{4}{0}{5}{0}{6:.1}{0}{7:.1}{0}{8:.4}",
            sep, self.backend, self.op, self.n, self.sigma, self.params, self.ns_median, self.ns_p99, self.bits_per_symbol
        )
    }
}

fn percentile(sorted: &[u64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let k = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[k] as f64
}

/// Times each query alone with a monotonic clock; reports the median and
/// 99th percentile in nanoseconds.
fn time_each<T>(items: &[T], mut f: impl FnMut(&T)) -> (f64, f64) {
    // warm caches and branch predictors on a prefix
    for x in items.iter().take(items.len().min(1000)) {
        f(x);
    }
    let mut ns: Vec<u64> = items
        .iter()
        .map(|x| {
            let t = Instant::now();
            f(x);
            t.elapsed().as_nanos() as u64
        })
        .collect();
    ns.sort_unstable();
    (percentile(&ns, 0.5), percentile(&ns, 0.99))
}

pub fn bench(s: &AnyStructure, seq: &Sequence, ops: &[String], queries: usize, seed: u64) -> crate::Result<Vec<BenchRow>> {
    let bps = s.payload_bits() as f64 / s.len().max(1) as f64;
    let mut rng = corpus::rng(seed);
    let mut rows = Vec::new();
    for op in ops {
        let (median, p99) = match (s, op.as_str()) {
            (AnyStructure::Predecessor(p), "pred") => {
                let u = p.universe();
                let xs: Vec<u64> = (0..queries).map(|_| rng.random_range(1..=u)).collect();
                time_each(&xs, |&x| {
                    std::hint::black_box(p.query(x));
                })
            }
            (AnyStructure::Predecessor(_), _) | (_, "pred") => {
                return Err(Error::Validation(format!("op {op} does not apply to {}", s.backend())));
            }
            (_, "access" | "rank" | "select") => {
                let oracle = OccurrenceIndex::new(seq.symbols().to_vec(), seq.sigma())?;
                let mut qs = random_queries(&oracle, op, queries, &mut rng);
                // time successful selects only
                if op == "select" {
                    qs.retain(|q| matches!(*q, Query::Select(a, j) if j <= oracle.count(a)));
                }
                let sq = s.as_sequence().unwrap();
                time_each(&qs, |&q| {
                    let _ = std::hint::black_box(match q {
                        Query::Access(i) => sq.access(i).map(|v| v as usize),
                        Query::Rank(a, i) => sq.rank(a, i),
                        Query::Select(a, j) => sq.select(a, j),
                    });
                })
            }
            _ => return Err(Error::Validation(format!("unknown op {op:?}"))),
        };
        rows.push(BenchRow {
            backend: s.backend(),
            op: op.clone(),
            n: s.len(),
            sigma: s.sigma(),
            params: s.param_string(),
            ns_median: median,
            ns_p99: p99,
            bits_per_symbol: bps,
        });
    }
    Ok(rows)
}

fn cmd_bench(a: BenchArgs, out: &mut dyn Write) -> CmdResult {
    for op in &a.ops {
        if !["access", "rank", "select", "pred"].contains(&op.as_str()) {
            return Err(Failure::Usage(format!("unknown op {op:?}; expected access, rank, select or pred")));
        }
    }
    if a.queries == 0 {
        return Err(Failure::Usage("--queries must be at least 1".into()));
    }
    let seed = effective_seed(a.seed)?;
    let seq = load_input(&a.input)?;
    let s = obtain(&a.source, &seq, &a.params, &mut std::io::sink())?;
    let rows = bench(&s, &seq, &a.ops, a.queries, seed).map_err(|e| match e {
        Error::Validation(m) => Failure::Usage(m),
        e => Failure::Lib(e),
    })?;
    let sep = match a.format {
        Format::Csv => ',',
        Format::Tsv => '\t',
    };
    writeln!(out, "{}", CSV_HEADER.replace(',', &sep.to_string()))?;
    for r in rows {
        writeln!(out, "{}", r.to_line(sep))?;
    }
    Ok(())
}
