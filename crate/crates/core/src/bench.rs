//! Benchmark harness: mean move counts per class and configuration.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use thiserror::Error;

use crate::config::HeuristicConfig;
use crate::engine::SolveError;
use crate::generate::{BayClass, BENCHMARK_CLASSES};
use crate::instance::{serialize_instance, Instance};
use crate::portfolio::{run_configs, PortfolioResult};
use crate::reloc::{FillPolicy, RelocRule};
use crate::scores::DestScore;
use crate::BlockSelect;

pub const PORTFOLIO_COLUMN: &str = "portfolio";

/// Named column sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// The three relocation rules under max-priority selection.
    Relocation,
    /// Max-priority against lookahead selection, Min-Max relocation.
    Lookahead,
    /// The four filling policies under lookahead selection.
    Filling,
    /// Every configuration.
    All,
}

impl Preset {
    pub fn parse(s: &str) -> Option<Preset> {
        match s {
            "table1" | "relocation" => Some(Preset::Relocation),
            "table2" | "lookahead" => Some(Preset::Lookahead),
            "table3" | "filling" => Some(Preset::Filling),
            "all" => Some(Preset::All),
            _ => None,
        }
    }

    pub fn configs(self, safe_slack: usize) -> Vec<HeuristicConfig> {
        use BlockSelect::*;
        match self {
            Preset::Relocation => RelocRule::ALL
                .map(|r| HeuristicConfig::new(MaxPriority, DestScore::W, r, FillPolicy::None))
                .to_vec(),
            Preset::Lookahead => vec![
                HeuristicConfig::new(
                    MaxPriority,
                    DestScore::W,
                    RelocRule::MinMax,
                    FillPolicy::None,
                ),
                HeuristicConfig::new(
                    Lookahead,
                    DestScore::WHat,
                    RelocRule::MinMax,
                    FillPolicy::None,
                ),
            ],
            Preset::Filling => FillPolicy::all(safe_slack)
                .map(|f| HeuristicConfig::new(Lookahead, DestScore::WHat, RelocRule::MinMax, f))
                .to_vec(),
            Preset::All => HeuristicConfig::all(safe_slack),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub classes: Vec<BayClass>,
    pub seeds: Vec<u64>,
    pub columns: Vec<HeuristicConfig>,
    pub safe_slack: usize,
    /// Where to write an instance that fails; nothing is written if `None`.
    pub dump_dir: Option<PathBuf>,
    pub threads: usize,
}

impl BenchOptions {
    pub fn new(columns: Vec<HeuristicConfig>, safe_slack: usize) -> Self {
        BenchOptions {
            classes: BENCHMARK_CLASSES.to_vec(),
            seeds: (1..=crate::generate::SEEDS_PER_CLASS).collect(),
            columns,
            safe_slack,
            dump_dir: None,
            threads: default_threads(),
        }
    }
}

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// One CSV row: a class with its mean move counts.
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub class: BayClass,
    pub instances: usize,
    /// Mean moves per requested configuration, in column order.
    pub means: Vec<(String, f64)>,
    pub portfolio_mean: f64,
    /// Summed portfolio wall time over the class.
    pub portfolio_time: Duration,
}

impl RunReport {
    pub fn mean(&self, label: &str) -> Option<f64> {
        self.means.iter().find(|(l, _)| l == label).map(|&(_, m)| m)
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{instance} under {config}: {source}{}", dumped.as_ref().map(|p| format!(" (instance written to {})", p.display())).unwrap_or_default())]
    Failed {
        instance: String,
        config: String,
        source: SolveError,
        dumped: Option<PathBuf>,
    },
    #[error("could not write failing instance: {0}")]
    Dump(#[from] std::io::Error),
    #[error(transparent)]
    Generate(#[from] crate::generate::GenerateError),
}

/// Writes `inst` as `<dir>/<name>.pmp`.
pub fn dump_instance(dir: &Path, inst: &Instance) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.pmp", inst.name));
    std::fs::write(&path, serialize_instance(inst))?;
    Ok(path)
}

/// Applies `f` to every item on up to `threads` workers; results keep input order.
pub fn par_map<T: Sync, R: Send>(
    items: &[T],
    threads: usize,
    f: impl Fn(&T) -> R + Sync,
) -> Vec<R> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads.clamp(1, items.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                let r = f(item);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every slot filled"))
        .collect()
}

fn check(
    result: &PortfolioResult,
    columns: &[HeuristicConfig],
) -> Result<(), (String, SolveError)> {
    if let Some((label, e)) = result.failures().next() {
        return Err((label.to_owned(), e.clone()));
    }
    for c in columns {
        let label = c.label();
        if !result.per_config.contains_key(&label) {
            return Err((label, SolveError::Stuck));
        }
    }
    Ok(())
}

fn mean(xs: impl Iterator<Item = usize>) -> f64 {
    let (sum, n) = xs.fold((0usize, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum as f64 / n as f64
    }
}

/// Runs the full portfolio on every instance and reports the requested
/// columns. Every solution is verified; the first failure aborts the run.
pub fn run_bench(opts: &BenchOptions) -> Result<Vec<RunReport>, BenchError> {
    let mut all = HeuristicConfig::all(opts.safe_slack);
    for c in &opts.columns {
        if !all.contains(c) {
            all.push(*c);
        }
    }
    let mut reports = Vec::with_capacity(opts.classes.len());
    for &class in &opts.classes {
        let instances = opts
            .seeds
            .iter()
            .map(|&s| class.generate(s))
            .collect::<Result<Vec<_>, _>>()?;
        let results = par_map(&instances, opts.threads, |inst| {
            let r =
                run_configs(&inst.bay, &all).map_err(|e| (String::from(PORTFOLIO_COLUMN), e))?;
            check(&r, &opts.columns)?;
            Ok::<_, (String, SolveError)>(r)
        });
        let mut ok = Vec::with_capacity(results.len());
        for (inst, r) in instances.iter().zip(results) {
            match r {
                Ok(r) => ok.push(r),
                Err((config, source)) => {
                    let dumped = match &opts.dump_dir {
                        Some(dir) => Some(dump_instance(dir, inst)?),
                        None => None,
                    };
                    return Err(BenchError::Failed {
                        instance: inst.name.clone(),
                        config,
                        source,
                        dumped,
                    });
                }
            }
        }
        let means = opts
            .columns
            .iter()
            .map(|c| {
                let label = c.label();
                let m = mean(
                    ok.iter()
                        .map(|r| *r.per_config[&label].as_ref().expect("checked")),
                );
                (label, m)
            })
            .collect();
        reports.push(RunReport {
            class,
            instances: ok.len(),
            means,
            portfolio_mean: mean(ok.iter().map(PortfolioResult::best_len)),
            portfolio_time: ok.iter().map(|r| r.wall_time).sum(),
        });
    }
    Ok(reports)
}

/// CSV with a `class` column, one column per configuration and `portfolio`.
/// Means use two decimals, so the output is byte-stable.
pub fn to_csv(reports: &[RunReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(first) = reports.first() {
        let mut header = vec!["class".to_owned()];
        header.extend(first.means.iter().map(|(l, _)| l.clone()));
        header.push(PORTFOLIO_COLUMN.to_owned());
        w.write_record(&header).expect("in-memory write");
    }
    for r in reports {
        let mut row = vec![r.class.to_string()];
        row.extend(r.means.iter().map(|(_, m)| format!("{m:.2}")));
        row.push(format!("{:.2}", r.portfolio_mean));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(columns: Vec<HeuristicConfig>) -> BenchOptions {
        BenchOptions {
            classes: vec![BayClass::new(2, 3, 4), BayClass::new(3, 3, 5)],
            seeds: (1..=5).collect(),
            ..BenchOptions::new(columns, 0)
        }
    }

    #[test]
    fn presets() {
        assert_eq!(Preset::Relocation.configs(0).len(), 3);
        assert_eq!(
            Preset::Lookahead.configs(0)[1].label(),
            "lookahead-what-minmax-none"
        );
        assert_eq!(Preset::Filling.configs(1).len(), 4);
        assert_eq!(Preset::All.configs(0).len(), 48);
        assert_eq!(Preset::parse("table3"), Some(Preset::Filling));
        assert_eq!(Preset::parse("table9"), None);
    }

    #[test]
    fn csv_shape_and_dominance() {
        let reports = run_bench(&small(Preset::Relocation.configs(0))).unwrap();
        let csv = to_csv(&reports);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "class,max-w-tlp-none,max-w-lpi-none,max-w-minmax-none,portfolio"
        );
        assert!(lines[1].starts_with("2*3/H4,"));
        assert_eq!(lines.len(), 3);
        for r in &reports {
            assert_eq!(r.instances, 5);
            assert!(r.means.iter().all(|&(_, m)| r.portfolio_mean <= m));
        }
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let mut opts = small(Preset::Filling.configs(0));
        opts.threads = 1;
        let a = to_csv(&run_bench(&opts).unwrap());
        opts.threads = 4;
        assert_eq!(a, to_csv(&run_bench(&opts).unwrap()));
    }

    #[test]
    fn par_map_keeps_order() {
        let xs: Vec<u64> = (0..100).collect();
        assert_eq!(
            par_map(&xs, 7, |x| x * 2),
            xs.iter().map(|x| x * 2).collect::<Vec<_>>()
        );
        assert!(par_map(&[] as &[u8], 3, |x| *x).is_empty());
    }

    #[test]
    fn dump_writes_instance() {
        let dir = tempfile::tempdir().unwrap();
        let inst = BayClass::new(2, 3, 4).generate(9).unwrap();
        let path = dump_instance(dir.path(), &inst).unwrap();
        let back =
            crate::instance::parse_instance(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(back.value, inst);
    }
}
