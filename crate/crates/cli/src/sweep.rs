//! Noise sweep: the same scenario at increasing sigma over several seeds.

use std::fmt;

use rayon::prelude::*;
use spikeloom::engine::NoiseConfig;
use spikeloom::memory::{run_stream, MemorySetup};
use spikeloom::oracle::{compare_answers, AnswerTimeline};
use spikeloom::stream::{CodeScheme, StreamOp};
use spikeloom::BuildError;

pub const DEFAULT_SIGMAS: [f64; 11] =
    [0.0, 0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.1, 0.2, 0.5, 1.0];
pub const DEFAULT_SEEDS: usize = 10;

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub setup: MemorySetup,
    pub ops: Vec<StreamOp>,
    pub scheme: CodeScheme,
    /// Noise levels as fractions of theta.
    pub sigmas: Vec<f64>,
    pub seeds: usize,
    pub base_seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub sigma: f64,
    /// Fraction of transactions correct over all seeds; stray answer spikes
    /// count as failed transactions.
    pub pass_rate: f64,
    /// Seeds whose run had no mismatch.
    pub clean_runs: usize,
    pub runs: usize,
    pub transactions: usize,
}

impl SweepRow {
    pub fn all_clean(&self) -> bool {
        self.clean_runs == self.runs
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    /// Sorted by ascending sigma.
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// Largest sigma at which every seed ran clean.
    pub fn sigma_star(&self) -> Option<f64> {
        self.rows
            .iter()
            .rev()
            .find(|r| r.all_clean())
            .map(|r| r.sigma)
    }

    /// Pass rate never rises with sigma by more than three standard errors
    /// of the difference of two binomial proportions (worst case p = 1/2).
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| {
            let (lo, hi) = (&w[0], &w[1]);
            let n = lo.transactions.max(1).min(hi.transactions.max(1)) as f64;
            hi.pass_rate <= lo.pass_rate + 3.0 * (0.5 / n).sqrt()
        })
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sigma pass_rate clean_runs")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<6} {:.4} {}/{}",
                r.sigma, r.pass_rate, r.clean_runs, r.runs
            )?;
        }
        match self.sigma_star() {
            Some(s) => writeln!(f, "sigma* = {s}")?,
            None => writeln!(f, "sigma* = none")?,
        }
        write!(
            f,
            "degradation {}",
            if self.is_monotone() {
                "monotone"
            } else {
                "NOT monotone"
            }
        )
    }
}

/// Runs every (sigma, seed) pair in parallel. Seeds are
/// `base_seed..base_seed + seeds`, shared by all sigma values.
pub fn noise_sweep(cfg: &SweepConfig) -> Result<SweepReport, BuildError> {
    let mut sigmas = cfg.sigmas.clone();
    sigmas.sort_by(f64::total_cmp);
    sigmas.dedup();
    for &s in &sigmas {
        NoiseConfig::new(s, 0)?;
    }
    let jobs: Vec<(usize, u64)> = (0..sigmas.len())
        .flat_map(|i| (0..cfg.seeds as u64).map(move |k| (i, k)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(i, k)| {
            let noise = NoiseConfig::new(sigmas[i], cfg.base_seed + k)?;
            let run = run_stream(&cfg.setup, &cfg.ops, cfg.scheme, noise)?;
            let timeline = AnswerTimeline::build(&cfg.ops, cfg.scheme, &run.timing);
            let report = compare_answers(&run.raster, &timeline, run.timing.period());
            let passed = report.lines.iter().filter(|l| l.pass).count();
            let judged = report.lines.len() + report.stray.len();
            Ok((i, passed, judged, report.is_clean()))
        })
        .collect::<Result<Vec<_>, BuildError>>()?;

    let rows = sigmas
        .iter()
        .enumerate()
        .map(|(i, &sigma)| {
            let mine: Vec<_> = results.iter().filter(|r| r.0 == i).collect();
            let passed: usize = mine.iter().map(|r| r.1).sum();
            let transactions: usize = mine.iter().map(|r| r.2).sum();
            SweepRow {
                sigma,
                pass_rate: if transactions == 0 {
                    1.0
                } else {
                    passed as f64 / transactions as f64
                },
                clean_runs: mine.iter().filter(|r| r.3).count(),
                runs: mine.len(),
                transactions,
            }
        })
        .collect();
    Ok(SweepReport { rows })
}
