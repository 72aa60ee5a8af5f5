//! Library side of the `casimir-shell` command: grids, sweeps and figure data.

pub mod figures;
pub mod grid;
pub mod sweep;
