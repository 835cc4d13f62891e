//! Benchmark harness: per engine and threshold, query latency statistics,
//! index size and the work counters of the succinct index.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use crate::baselines::{ova_search, InvertedIndex};
use crate::descriptor::{Database, Descriptor, Hit, Threshold};
use crate::error::{Error, Result};
use crate::index::{QueryStats, SitadIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    Ova,
    Inv,
    Sitad,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Ova, Engine::Inv, Engine::Sitad];

    pub fn name(&self) -> &'static str {
        match self {
            Engine::Ova => "ova",
            Engine::Inv => "inv",
            Engine::Sitad => "sitad",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ova" => Ok(Engine::Ova),
            "inv" => Ok(Engine::Inv),
            "sitad" => Ok(Engine::Sitad),
            other => Err(Error::InvalidParameter(format!("unknown engine {other:?}"))),
        }
    }
}

/// Parses a comma-separated list, e.g. `0.9,0.95,0.98` or `ova,sitad`.
pub fn parse_list<T: FromStr<Err = Error>>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse())
        .collect()
}

/// The three engines built over one database.
pub struct Engines<'a> {
    pub db: &'a Database,
    pub inv: Option<InvertedIndex>,
    pub sitad: Option<SitadIndex>,
}

impl<'a> Engines<'a> {
    pub fn build(db: &'a Database, wanted: &[Engine]) -> Self {
        Engines {
            db,
            inv: wanted.contains(&Engine::Inv).then(|| InvertedIndex::build(db)),
            sitad: wanted.contains(&Engine::Sitad).then(|| SitadIndex::build(db)),
        }
    }

    pub fn query(&self, engine: Engine, q: &Descriptor, eps: Threshold) -> Result<(Vec<Hit>, QueryStats)> {
        let missing = || Error::InvalidParameter(format!("engine {engine} was not built"));
        match engine {
            Engine::Ova => {
                let hits = ova_search(self.db, q, eps)?;
                let stats = QueryStats {
                    results: hits.len() as u64,
                    ..Default::default()
                };
                Ok((hits, stats))
            }
            Engine::Inv => {
                let hits = self.inv.as_ref().ok_or_else(missing)?.search(q, eps)?;
                let stats = QueryStats {
                    results: hits.len() as u64,
                    ..Default::default()
                };
                Ok((hits, stats))
            }
            Engine::Sitad => self.sitad.as_ref().ok_or_else(missing)?.search(q, eps),
        }
    }

    /// Bytes held by the engine's search structure.
    pub fn index_bytes(&self, engine: Engine) -> usize {
        match engine {
            Engine::Ova => database_bytes(self.db),
            Engine::Inv => self.inv.as_ref().map_or(0, InvertedIndex::heap_bytes),
            Engine::Sitad => self.sitad.as_ref().map_or(0, |s| s.space().total()),
        }
    }
}

/// Heap bytes of the raw descriptor store.
pub fn database_bytes(db: &Database) -> usize {
    db.len() * (8 + std::mem::size_of::<Descriptor>()) + db.total_entries() * 8
}

/// Resident set size of this process, where the platform exposes it.
pub fn resident_bytes() -> Option<u64> {
    let statm = std::fs::read_to_string("/proc/self/statm").ok()?;
    let pages: u64 = statm.split_whitespace().nth(1)?.parse().ok()?;
    Some(pages * 4096)
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub thresholds: Vec<Threshold>,
    pub engines: Vec<Engine>,
    /// Timed passes over the query set; one untimed warm-up pass precedes them.
    pub repetitions: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub engine: Engine,
    pub eps: Threshold,
    pub queries: usize,
    pub mean_ms: f64,
    pub std_ms: f64,
    pub index_bytes: usize,
    pub mean_blocks: f64,
    pub mean_nodes: f64,
    pub mean_ranks: f64,
    pub mean_results: f64,
    /// Per-query result counts, in query order.
    pub results: Vec<u64>,
    /// Summed counters over the query set.
    pub totals: QueryStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub n: usize,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, engine: Engine, eps: Threshold) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.engine == engine && r.eps == eps)
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(
            out,
            "engine,eps,n,queries,mean_ms,std_ms,index_bytes,mean_blocks,mean_nodes,mean_ranks,mean_results"
        )?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{:.6},{:.6},{},{:.3},{:.3},{:.3},{:.3}",
                r.engine,
                r.eps,
                self.n,
                r.queries,
                r.mean_ms,
                r.std_ms,
                r.index_bytes,
                r.mean_blocks,
                r.mean_nodes,
                r.mean_ranks,
                r.mean_results
            )?;
        }
        Ok(())
    }

    pub fn write_table<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "N = {}", self.n)?;
        writeln!(
            out,
            "{:<6} {:>6} {:>12} {:>10} {:>12} {:>9} {:>12} {:>12} {:>10}",
            "engine", "eps", "time ms", "± sd", "memory MB", "#B^c", "#TN", "#Ranks", "|I_N|"
        )?;
        for r in &self.rows {
            let (b, tn, rk) = if r.engine == Engine::Sitad {
                (
                    format!("{:.1}", r.mean_blocks),
                    format!("{:.1}", r.mean_nodes),
                    format!("{:.1}", r.mean_ranks),
                )
            } else {
                ("-".into(), "-".into(), "-".into())
            };
            writeln!(
                out,
                "{:<6} {:>6} {:>12.4} {:>10.4} {:>12.3} {:>9} {:>12} {:>12} {:>10.2}",
                r.engine,
                r.eps.to_string(),
                r.mean_ms,
                r.std_ms,
                r.index_bytes as f64 / (1 << 20) as f64,
                b,
                tn,
                rk,
                r.mean_results
            )?;
        }
        Ok(())
    }
}

pub fn run_bench(engines: &Engines<'_>, queries: &[(u64, Descriptor)], cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.repetitions == 0 {
        return Err(Error::InvalidParameter("repetitions must be positive".into()));
    }
    let queries: Vec<&Descriptor> = queries.iter().map(|(_, q)| q).filter(|q| !q.is_empty()).collect();
    let mut rows = Vec::new();
    for &engine in &cfg.engines {
        for &eps in &cfg.thresholds {
            for q in &queries {
                engines.query(engine, q, eps)?;
            }
            let mut times = vec![0f64; queries.len()];
            let mut totals = QueryStats::default();
            let mut results = vec![0u64; queries.len()];
            for rep in 0..cfg.repetitions {
                for (i, q) in queries.iter().enumerate() {
                    let t0 = Instant::now();
                    let (hits, stats) = engines.query(engine, q, eps)?;
                    times[i] += t0.elapsed().as_secs_f64() * 1e3;
                    if rep == 0 {
                        totals += stats;
                        results[i] = hits.len() as u64;
                    }
                }
            }
            let nq = queries.len().max(1) as f64;
            for t in &mut times {
                *t /= cfg.repetitions as f64;
            }
            let mean = times.iter().sum::<f64>() / nq;
            let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / nq;
            rows.push(BenchRow {
                engine,
                eps,
                queries: queries.len(),
                mean_ms: mean,
                std_ms: var.sqrt(),
                index_bytes: engines.index_bytes(engine),
                mean_blocks: totals.selected_blocks as f64 / nq,
                mean_nodes: totals.traversed_nodes as f64 / nq,
                mean_ranks: totals.rank_ops as f64 / nq,
                mean_results: totals.results as f64 / nq,
                results,
                totals,
            });
        }
    }
    Ok(BenchReport {
        n: engines.db.len(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate, sample_queries, GenParams};

    #[test]
    fn parses_lists() {
        let e: Vec<Engine> = parse_list("ova, sitad").unwrap();
        assert_eq!(e, vec![Engine::Ova, Engine::Sitad]);
        let t: Vec<Threshold> = parse_list("0.9,0.95").unwrap();
        assert_eq!(t.len(), 2);
        assert!(parse_list::<Engine>("ova,bogus").is_err());
    }

    #[test]
    fn counters_fall_as_eps_rises() {
        let db = generate(&GenParams {
            n: 3000,
            ..Default::default()
        })
        .unwrap();
        let qs = sample_queries(&db, 30, 1);
        let engines = Engines::build(&db, &Engine::ALL);
        let cfg = BenchConfig {
            thresholds: parse_list("0.9,0.95,0.98").unwrap(),
            engines: Engine::ALL.to_vec(),
            repetitions: 1,
        };
        let rep = run_bench(&engines, &qs, &cfg).unwrap();
        assert_eq!(rep.rows.len(), 9);
        let s: Vec<&BenchRow> = rep.rows.iter().filter(|r| r.engine == Engine::Sitad).collect();
        for w in s.windows(2) {
            assert!(w[1].mean_nodes <= w[0].mean_nodes);
            assert!(w[1].mean_ranks <= w[0].mean_ranks);
            assert!(w[1].mean_results <= w[0].mean_results);
        }
        for eps in &cfg.thresholds {
            let r: Vec<&Vec<u64>> = Engine::ALL
                .iter()
                .map(|&e| &rep.row(e, *eps).unwrap().results)
                .collect();
            assert_eq!(r[0], r[1]);
            assert_eq!(r[0], r[2]);
        }
        let mut csv = Vec::new();
        rep.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 10);
    }
}
