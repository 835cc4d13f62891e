//! The `sitad` command-line tool.
//!
//! Exit status: 0 on success, 1 on a usage error, 2 on a data error.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::info;

use sitad::bench::{resident_bytes, run_bench, BenchConfig, Engine, Engines};
use sitad::format::{has_magic, read_index, write_index};
use sitad::gen::{sample_queries, write_generated, GenParams};
use sitad::io::{read_database, read_records};
use sitad::{ova_search, Database, Descriptor, Error, InvertedIndex, QueryStats, SitadIndex, Threshold};

#[derive(Parser)]
#[command(
    name = "sitad",
    version,
    about = "Threshold similarity search over sparse integer descriptors"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a deterministic synthetic database.
    Gen(GenArgs),
    /// Build an index file from a text database.
    Build(BuildArgs),
    /// Answer threshold queries.
    Query(QueryArgs),
    /// Time engines over a query set and report counters.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of descriptors.
    #[arg(short = 'n', long = "count")]
    n: usize,
    /// Dimension count.
    #[arg(short = 'd', long = "dim", default_value_t = 1000)]
    dim: u32,
    /// Largest weight.
    #[arg(short = 'm', long = "max-weight", default_value_t = 5)]
    max_weight: u32,
    /// Mean entries per descriptor.
    #[arg(long, default_value_t = 12.0)]
    density: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Fraction of records that are perturbed copies of earlier ones.
    #[arg(long, default_value_t = 0.3)]
    duplicates: f64,
    /// Output file; standard output when absent.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    /// Text database.
    #[arg(short = 'i', long)]
    input: PathBuf,
    /// Index file to write.
    #[arg(short = 'o', long)]
    output: PathBuf,
    /// Build blocks on all cores.
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct QueryArgs {
    /// Index file, or a text database for the ova and inv engines.
    #[arg(short = 'x', long)]
    index: PathBuf,
    /// Query records in the text format.
    #[arg(short = 'q', long)]
    queries: PathBuf,
    /// Threshold in (0, 1].
    #[arg(short = 'e', long, value_parser = parse_threshold)]
    eps: Threshold,
    #[arg(long, default_value = "sitad", value_parser = parse_engine)]
    engine: Engine,
    /// Result CSV; standard output when absent.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    /// Print per-query counters to standard error.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Text database.
    #[arg(short = 'i', long)]
    input: PathBuf,
    /// Query records; sampled from the database when absent.
    #[arg(short = 'q', long)]
    queries: Option<PathBuf>,
    /// Number of sampled queries.
    #[arg(long, default_value_t = 100)]
    sample: usize,
    /// Seed for query sampling.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Comma-separated thresholds.
    #[arg(short = 'e', long, default_value = "0.9,0.95,0.98", value_delimiter = ',', value_parser = parse_threshold)]
    eps: Vec<Threshold>,
    /// Comma-separated engines.
    #[arg(long, default_value = "ova,inv,sitad", value_delimiter = ',', value_parser = parse_engine)]
    engines: Vec<Engine>,
    /// Timed passes over the query set.
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Report CSV; standard output when absent.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

fn parse_threshold(s: &str) -> Result<Threshold, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match cli.cmd {
        Cmd::Gen(a) => gen(a),
        Cmd::Build(a) => build(a),
        Cmd::Query(a) => query(a),
        Cmd::Bench(a) => bench(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Data(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.into())
    }
}

type CmdResult = Result<(), Failure>;

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Data(Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))))
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_database(path: &Path) -> Result<Database, Failure> {
    Ok(read_database(open(path)?)?)
}

fn is_index_file(path: &Path) -> Result<bool, Failure> {
    use std::io::Read;
    let mut head = [0u8; 4];
    let n = open(path)?.read(&mut head)?;
    Ok(has_magic(&head[..n]))
}

fn gen(a: GenArgs) -> CmdResult {
    let p = GenParams {
        n: a.n,
        dim: a.dim,
        max_weight: a.max_weight,
        density: a.density,
        seed: a.seed,
        duplicate_rate: a.duplicates,
    };
    p.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let mut out = sink(&a.output)?;
    write_generated(&p, &mut out)?;
    out.flush()?;
    Ok(())
}

fn build(a: BuildArgs) -> CmdResult {
    let db = load_database(&a.input)?;
    let rss0 = resident_bytes();
    let t0 = Instant::now();
    let idx = build_index(&db, a.parallel);
    let secs = t0.elapsed().as_secs_f64();
    let rss1 = resident_bytes();
    write_index(&idx, BufWriter::new(File::create(&a.output)?))?;
    let file_bytes = std::fs::metadata(&a.output)?.len();

    let s = idx.space();
    let mut out = io::stdout().lock();
    writeln!(out, "descriptors      {}", idx.len())?;
    writeln!(out, "blocks           {}", idx.blocks().len())?;
    writeln!(out, "build seconds    {secs:.6}")?;
    writeln!(out, "bitvectors       {} bytes", s.bitvectors)?;
    writeln!(out, "rank samples     {} bytes", s.rank_samples)?;
    writeln!(out, "weights          {} bytes", s.weights)?;
    writeln!(out, "rmq              {} bytes", s.rmq)?;
    writeln!(out, "offsets          {} bytes", s.offsets)?;
    writeln!(out, "ids              {} bytes", s.ids)?;
    writeln!(out, "in memory        {} bytes", s.total())?;
    writeln!(out, "file             {file_bytes} bytes")?;
    if let (Some(r0), Some(r1)) = (rss0, rss1) {
        writeln!(out, "resident delta   {} bytes", r1 as i64 - r0 as i64)?;
    }
    Ok(())
}

fn build_index(db: &Database, parallel: bool) -> SitadIndex {
    #[cfg(feature = "parallel")]
    if parallel {
        return SitadIndex::build_parallel(db);
    }
    let _ = parallel;
    SitadIndex::build(db)
}

enum Searcher {
    Ova(Database),
    Inv(InvertedIndex),
    Sitad(SitadIndex),
}

impl Searcher {
    fn open(engine: Engine, path: &Path) -> Result<Self, Failure> {
        let binary = is_index_file(path)?;
        match (engine, binary) {
            (Engine::Sitad, true) => Ok(Searcher::Sitad(read_index(path)?)),
            (Engine::Sitad, false) => {
                info!("{} is a text database; building the index in memory", path.display());
                Ok(Searcher::Sitad(SitadIndex::build(&load_database(path)?)))
            }
            (_, true) => Err(Failure::Data(Error::InvalidParameter(format!(
                "engine {engine} needs the text database, but {} is a sitad index",
                path.display()
            )))),
            (Engine::Ova, false) => Ok(Searcher::Ova(load_database(path)?)),
            (Engine::Inv, false) => Ok(Searcher::Inv(InvertedIndex::build(&load_database(path)?))),
        }
    }

    fn search(&self, q: &Descriptor, eps: Threshold) -> sitad::Result<(Vec<sitad::Hit>, QueryStats)> {
        let plain = |hits: Vec<sitad::Hit>| {
            let results = hits.len() as u64;
            (
                hits,
                QueryStats {
                    results,
                    ..Default::default()
                },
            )
        };
        match self {
            Searcher::Ova(db) => ova_search(db, q, eps).map(plain),
            Searcher::Inv(inv) => inv.search(q, eps).map(plain),
            Searcher::Sitad(idx) => idx.search(q, eps),
        }
    }
}

fn query(a: QueryArgs) -> CmdResult {
    let searcher = Searcher::open(a.engine, &a.index)?;
    let mut queries = read_records(open(&a.queries)?)?;
    queries.sort_by_key(|(id, _)| *id);
    let mut out = sink(&a.output)?;
    writeln!(out, "query_id,match_id,similarity")?;
    let mut err = io::stderr().lock();
    for (qid, q) in &queries {
        let (hits, st) = searcher
            .search(q, a.eps)
            .map_err(|e| Failure::Data(Error::InvalidParameter(format!("query {qid}: {e}"))))?;
        for h in &hits {
            writeln!(out, "{qid},{},{}", h.id, h.similarity.to_decimal(6))?;
        }
        if a.stats {
            writeln!(
                err,
                "query={qid} blocks={} nodes={} ranks={} results={}",
                st.selected_blocks, st.traversed_nodes, st.rank_ops, st.results
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

fn bench(a: BenchArgs) -> CmdResult {
    if a.reps == 0 {
        return Err(Failure::Usage("--reps must be positive".into()));
    }
    let db = load_database(&a.input)?;
    let queries = match &a.queries {
        Some(p) => read_records(open(p)?)?,
        None => sample_queries(&db, a.sample, a.seed),
    };
    let t0 = Instant::now();
    let engines = Engines::build(&db, &a.engines);
    let build_secs = t0.elapsed().as_secs_f64();
    let cfg = BenchConfig {
        thresholds: a.eps,
        engines: a.engines,
        repetitions: a.reps,
    };
    let report = run_bench(&engines, &queries, &cfg)?;

    let mut csv = sink(&a.output)?;
    report.write_csv(&mut csv)?;
    csv.flush()?;
    let mut table: Box<dyn Write> = if a.output.is_some() {
        Box::new(io::stdout().lock())
    } else {
        Box::new(io::stderr().lock())
    };
    writeln!(table, "queries {}, engine build {:.3} s", queries.len(), build_secs)?;
    report.write_table(&mut table)?;
    Ok(())
}
