use thiserror::Error;

use crate::engine::NeuronId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("invalid neuron parameters: {0}")]
    InvalidNeuron(String),
    #[error("theta calibration failed: {0}")]
    Calibration(String),
    #[error("unknown neuron id {0}")]
    UnknownNeuron(NeuronId),
    #[error("unknown port `{0}`")]
    UnknownPort(String),
    #[error("port `{0}` already defined")]
    DuplicatePort(String),
    #[error("synapse delay must be at least 1 ms")]
    ZeroDelay,
    #[error("synapse weight must be finite and non-zero, got {0}")]
    BadWeight(f64),
    #[error("cannot schedule a spike at {time} ms, simulation is already at {now} ms")]
    SpikeInPast { time: u64, now: u64 },
    #[error("noise sigma must be finite and non-negative, got {0}")]
    BadSigma(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("a pacemaker needs at least 2 phases, got {0}")]
    TooFewPhases(usize),
    #[error("this block needs a pacemaker with at least {needed} phases, got {got}")]
    PacemakerTooShort { needed: usize, got: usize },
    #[error("phase spacing must be at least {needed} ms, got {got}")]
    DeltaTooShort { needed: u32, got: u32 },
    #[error("AND gates take 2 to 4 inputs, got {0}")]
    AndFanIn(usize),
    #[error("OR gates need at least one input")]
    OrFanIn,
    #[error("control count must be 1 to 3, got {0}")]
    Omega(usize),
    #[error("a memory cell needs at least one bit")]
    NoBits,
    #[error("truth table must have {expected} entries, got {got}")]
    TruthTableSize { expected: usize, got: usize },
    #[error(transparent)]
    Stream(#[from] StreamError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StreamError {
    #[error("value {0} does not fit in 4 bits")]
    ValueOutOfRange(u32),
    #[error("store of {0} carries no attribute")]
    MissingAttribute(u8),
    #[error("store of {0} sets both the prime and non-prime attribute")]
    ConflictingAttributes(u8),
    #[error("{op} of {value} must not carry attributes")]
    UnexpectedAttribute { op: &'static str, value: u8 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
