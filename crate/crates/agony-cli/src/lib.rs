//! Companion crate to [`agony_core`]: file formats, plotting, experiment
//! harness, real-network pipeline, and the `agony` command-line interface.
//!
//! The core crate owns every algorithm and closed-form estimate; this crate
//! only adds the `std`-dependent conveniences around them:
//!
//! * [`io`] — plain-text edge lists and `node,rank` CSV rankings,
//! * [`svg`] — self-contained heatmap drawings for confusion matrices,
//! * [`sweep`] — the deterministic Monte Carlo sweep over the generator's
//!   noise parameter, with per-run confusion matrices and a JSON summary,
//! * [`network`] — the end-to-end pipeline for a real edge list,
//! * [`commands`] — the `agony` binary's argument parsing and dispatch.

#![deny(missing_docs)]

pub mod commands;
pub mod io;
pub mod network;
pub mod svg;
pub mod sweep;
