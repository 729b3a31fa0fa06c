//! File formats and command plumbing for the `tetrapack` binary.

pub mod document;
pub mod manifest;
pub mod mesh;
pub mod table;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILURE: u8 = 1;
    /// Bad flags, malformed input files, parameters out of range.
    pub const USAGE: u8 = 2;
    /// Overlapping packing: infeasible start or failed certification.
    pub const INFEASIBLE: u8 = 3;
    pub const NOT_CONVERGED: u8 = 4;
}
