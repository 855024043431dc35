use std::fmt;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const DRIFT: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const INFEASIBLE: u8 = 3;
    pub const IO: u8 = 4;
    pub const SOLVER: u8 = 5;
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(exit::CONFIG, message)
    }

    pub fn io(context: impl fmt::Display, err: impl fmt::Display) -> Self {
        Self::new(exit::IO, format!("{context}: {err}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<subsynth::Error> for CliError {
    fn from(e: subsynth::Error) -> Self {
        use subsynth::Error as E;
        let code = match e {
            E::InvalidArgument(_) | E::Generation(_) | E::PatternFile(_) => exit::CONFIG,
            E::Infeasible { .. } | E::InfeasibleSynthesis(_) => exit::INFEASIBLE,
            E::RankDeficient { .. } | E::Refinement(_) => exit::SOLVER,
            E::Io(_) => exit::IO,
        };
        Self::new(code, e.to_string())
    }
}
