//! Library side of the `multiris` command-line tool: layered configuration,
//! the `simulate` / `analyze` / `compare` commands, figure recipes, and
//! CSV + manifest output.
//!
//! ```
//! use multiris_cli::config::{ConfigBuilder, ConfigFile};
//!
//! let cfg = ConfigBuilder::new(&ConfigFile::default())
//!     .set("ris_density=1.5e-4")
//!     .unwrap()
//!     .build()
//!     .unwrap();
//! assert_eq!(cfg.deployment.ris_density, 1.5e-4);
//! ```

pub mod config;
pub mod output;
pub mod recipes;
pub mod run;

/// Failures surfaced to the command line, each with a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error("ambiguous configuration key `{key}`; qualify it as one of: {candidates}")]
    AmbiguousKey { key: String, candidates: String },

    #[error("malformed override `{0}`; expected key=value")]
    MalformedOverride(String),

    #[error("{origin}: {message}")]
    Config { origin: String, message: String },

    #[error("unknown recipe `{name}`; available recipes: {available}")]
    UnknownRecipe { name: String, available: String },

    #[error(transparent)]
    Model(#[from] multiris::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for configuration and usage errors, 3 for values the model rejects,
    /// 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownKey(_)
            | CliError::AmbiguousKey { .. }
            | CliError::MalformedOverride(_)
            | CliError::Config { .. }
            | CliError::UnknownRecipe { .. } => 2,
            CliError::Model(e) if is_invalid_input(e) => 3,
            CliError::Model(_) | CliError::Io { .. } => 1,
        }
    }
}

fn is_invalid_input(e: &multiris::Error) -> bool {
    match e {
        multiris::Error::InvalidInput(_) => true,
        multiris::Error::Trial { source, .. } => is_invalid_input(source),
        _ => false,
    }
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/reproducibility.md")]
    mod reproducibility {}
}
