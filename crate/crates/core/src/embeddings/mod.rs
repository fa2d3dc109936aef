//! Model parameters, property composition and the SGNS update.

mod config;
mod io;
mod matrix;
mod model;
mod sgns;

pub use config::{Composition, PropertyConfig, PropertySet, DEFAULT_BUCKETS, DEFAULT_MAXN, DEFAULT_MINN};
pub use io::{MAGIC, VERSION};
pub use matrix::{HogwildMatrix, Matrix, Rows};
pub use model::{AnalysisChoice, Model};
pub use sgns::{compose_into, pair_loss, sgns_step, sigmoid, softplus, Scratch};
