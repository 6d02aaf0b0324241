//! File formats, configuration, plotting and parallel drivers around
//! `tandemgrip-core`. The `tandemgrip` binary is a thin clap front end over
//! [`commands`].
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod num;
pub mod parallel;
pub mod svg;
pub mod tables;

pub use config::{CamSource, GripperConfig};
pub use error::Error;
pub use tandemgrip_core as core;
