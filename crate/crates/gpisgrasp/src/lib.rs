//! Simulator driver for GPIS-based tactile grasp exploration.
//!
//! The algorithms live in [`gpisgrasp_core`]; this crate adds the run
//! configuration, text file formats, run artifacts, reports and the
//! `gpisgrasp` command-line tool.

pub mod artifacts;
pub mod config;
pub mod io;
pub mod report;
pub mod run;
pub mod svg;

pub use gpisgrasp_core as core;
