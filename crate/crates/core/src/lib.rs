//! Spiking neural assemblies with synaptic propagation delays.
//!
//! Building blocks are wired on a shared [`engine::Circuit`] and synchronised
//! by a ring pacemaker:
//!
//! * [`blocks`]: pacemaker, coincidence AND/OR gates, selector (and Boolean
//!   function generator) and decoder.
//! * [`memory`]: bistable-loop memory cells and the sixteen-cell draft memory
//!   that stores attributes by trapping spikes, with no weight changes.
//! * [`stream`]: encoding of store/retrieve/erase transactions as
//!   phase-aligned spike schedules, in binary or Gray code.
//! * [`oracle`]: Boolean and abstract-memory reference models to check
//!   simulated rasters against.
//! * [`truth`]: exhaustive truth-table runs of the logic blocks.

pub mod blocks;
pub mod engine;
pub mod error;
pub mod memory;
pub mod oracle;
pub mod stream;
pub mod truth;

pub use error::{BuildError, EngineError, StreamError};
