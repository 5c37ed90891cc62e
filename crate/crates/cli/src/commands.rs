use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::str::FromStr;

use log::info;
use spikeloom::engine::{NoiseConfig, Raster};
use spikeloom::memory::{run_stream, DraftMemoryHandle};
use spikeloom::oracle::{compare_answers, AnswerTimeline, Report};
use spikeloom::stream::CodeScheme;
use spikeloom::truth::{decoder_truth_table, selector_truth_table, TruthReport};
use spikeloom::BuildError;

use crate::config::{ModelKind, RunConfig};
use crate::svg::render_raster;
use crate::CliError;

pub struct RunOutcome {
    pub scheme: CodeScheme,
    pub report: Report,
    pub raster: Raster,
    pub memory: DraftMemoryHandle,
}

impl RunOutcome {
    /// Process exit status: 0 iff every transaction matched.
    pub fn exit_code(&self) -> i32 {
        if self.report.is_clean() {
            0
        } else {
            1
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Simulates the configured scenario on a draft memory, checks the answer
/// neurons against the reference memory and writes the requested artifacts.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let (ops, file_scheme) = cfg.scenario.load()?;
    let scheme = cfg.code.or(file_scheme).unwrap_or(CodeScheme::Binary);
    let noise = NoiseConfig::new(cfg.sigma, cfg.seed).map_err(BuildError::from)?;
    info!(
        "running {} transactions, {scheme} code, {} model, sigma {}",
        ops.len(),
        cfg.model,
        cfg.sigma
    );
    let run = run_stream(&cfg.setup(), &ops, scheme, noise)?;
    let timeline = AnswerTimeline::build(&ops, scheme, &run.timing);
    let report = compare_answers(&run.raster, &timeline, run.timing.period());
    info!(
        "{} spikes, {} mismatches",
        run.raster.len(),
        report.mismatches()
    );

    if let Some(path) = &cfg.out_raster {
        let file = File::create(path).map_err(io_err(path))?;
        run.raster.write_csv(BufWriter::new(file))?;
    }
    if let Some(path) = &cfg.out_svg {
        fs::write(path, render_raster(&run.raster, &run.memory)).map_err(io_err(path))?;
    }
    if let Some(path) = &cfg.report {
        fs::write(path, format!("{report}\n")).map_err(io_err(path))?;
    }
    Ok(RunOutcome {
        scheme,
        report,
        raster: run.raster,
        memory: run.memory,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    Selector,
    Decoder,
}

impl FromStr for Block {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "selector" => Ok(Block::Selector),
            "decoder" => Ok(Block::Decoder),
            other => Err(format!(
                "unknown block `{other}`, expected selector or decoder"
            )),
        }
    }
}

/// Every input/control combination of one block, one per pacemaker cycle.
pub fn cmd_truthtable(
    block: Block,
    omega: usize,
    model: ModelKind,
    delta_t: u32,
    noise: NoiseConfig,
) -> Result<TruthReport, CliError> {
    let spec = model.spec();
    Ok(match block {
        Block::Selector => selector_truth_table(spec, omega, delta_t, noise)?,
        Block::Decoder => decoder_truth_table(spec, omega, delta_t, noise)?,
    })
}
