//! File formats, bundled scenes and the command-line front end for
//! `datom-core`.

pub mod cli;
pub mod config;
pub mod formats;
pub mod scene;
