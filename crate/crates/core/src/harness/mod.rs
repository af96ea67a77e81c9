//! Experiment runner: reads a config, runs one suite on a fixed-size worker
//! pool and assembles a report ordered by check name.
//!
//! Seeds are split by label: the master seed gives one seed per suite, each
//! suite one per check, and each check one stream per trial or walk. Every
//! parallel loop collects in index order and reduces sequentially, so the
//! report does not depend on the worker count.

mod config;
mod report;
pub mod suites;

use std::path::Path;

pub use config::{ExperimentConfig, LemmaPoint, Suite};
pub use report::{table_from_csv, CheckRecord, EnvironmentStamp, Format, Report, TableRow, CSV_HEADER};

use crate::error::{Error, Result};

pub fn run(config: &ExperimentConfig, workers: usize) -> Result<Report> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Argument(format!("worker pool: {e}")))?;
    let (mut checks, table) = pool.install(|| run_suite(config))?;
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(Report {
        config: config.clone(),
        checks,
        table,
        environment: EnvironmentStamp {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
        },
    })
}

fn run_suite(cfg: &ExperimentConfig) -> Result<(Vec<crate::harness::CheckRecord>, Vec<TableRow>)> {
    match cfg.suite {
        Suite::TensorProps => Ok((suites::tensor_props(cfg), Vec::new())),
        Suite::Inequalities => Ok((suites::inequalities(cfg), Vec::new())),
        Suite::Expander | Suite::ChernoffSweep => {
            let graph = cfg.graph.build(cfg.seed)?;
            let assign = cfg.assignment.build(graph.clone(), cfg.seed)?;
            if cfg.k > assign.dim() {
                return Err(Error::Config(format!(
                    "field `k`: {} exceeds the tensor dimension {}",
                    cfg.k,
                    assign.dim()
                )));
            }
            if cfg.suite == Suite::Expander {
                return Ok((suites::expander(cfg, &graph, &assign), Vec::new()));
            }
            let spec = suites::SweepSpec::from_config(cfg);
            match suites::chernoff_sweep(&assign, &spec) {
                Ok(out) => Ok(out),
                Err(e @ (Error::Capacity(_) | Error::Precondition(_))) => {
                    Ok((vec![CheckRecord::skip("chernoff", e.to_string())], Vec::new()))
                }
                Err(e) => Ok((vec![CheckRecord::error("chernoff", &e)], Vec::new())),
            }
        }
    }
}

/// Writes the report in the given format.
pub fn emit(report: &Report, format: Format, path: &Path) -> Result<()> {
    report.emit(format, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(suite: Suite) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::for_suite(suite);
        cfg.trials = 10;
        cfg.num_walks = 500;
        cfg.theta = vec![5.0, 30.0, 200.0, 400.0];
        cfg
    }

    #[test]
    fn reports_are_sorted_and_deterministic() {
        for suite in [Suite::TensorProps, Suite::Inequalities, Suite::Expander, Suite::ChernoffSweep] {
            let cfg = small(suite);
            let one = run(&cfg, 1).unwrap();
            assert!(one.checks.windows(2).all(|w| w[0].name < w[1].name), "{suite:?}");
            assert_eq!(one.to_json(), run(&cfg, 3).unwrap().to_json(), "{suite:?}");
            assert!(one.all_pass(), "{suite:?}: {:?}", one.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn sweep_table_has_one_row_per_theta() {
        let cfg = small(Suite::ChernoffSweep);
        let rep = run(&cfg, 2).unwrap();
        assert_eq!(rep.table.len(), cfg.theta.len());
        assert_eq!(table_from_csv(&rep.table_csv()).unwrap(), rep.table);
    }

    #[test]
    fn oversized_transfer_is_skipped_not_fatal() {
        let mut cfg = small(Suite::Expander);
        cfg.graph = crate::expander::GraphSpec::Hypercube { dim: 7 };
        cfg.assignment = crate::chernoff::AssignmentSpec::Random {
            dims: vec![2, 2, 2],
            radius: 1.0,
            seed: None,
        };
        let rep = run(&cfg, 2).unwrap();
        let skipped: Vec<_> = rep.checks.iter().filter(|c| c.skipped.is_some()).map(|c| c.name.as_str()).collect();
        assert!(skipped.contains(&"contraction"), "{skipped:?}");
        assert!(skipped.contains(&"expectation.monte_carlo"), "{skipped:?}");
    }
}
