//! Front end for the `sistab` binary: model files, certificate files and the
//! subcommands. Exit codes: 0 stable/valid, 1 not stable/invalid,
//! 2 indeterminate, 3 errors.

pub mod certjson;
pub mod commands;
pub mod modelfile;

pub use certjson::CertificateFile;
pub use commands::{run, Cli, EXIT_ERROR};
pub use modelfile::{model_hash, parse_model, parse_model_str, ModelFileError};
