use thiserror::Error;

/// Every failure the library reports. The `code` is the stable machine tag.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("E_SYNTAX at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("E_UNDEFINED_BIT: no bit for {0}")]
    UndefinedBit(String),
    #[error("E_TOO_MANY_ATOMS: {count} atoms exceed the cap of {cap}")]
    TooManyAtoms { count: usize, cap: usize },
    #[error("E_MODE_VIOLATION: {0}")]
    ModeViolation(String),
    #[error("E_FUEL: {0}")]
    Fuel(String),
    #[error("E_NOT_PNF: {0}")]
    NotPnf(String),
    #[error("E_OPEN_NAMES: {0}")]
    OpenNames(String),
    #[error("E_RULE_SHAPE at {path}: {msg}")]
    RuleShape { path: String, msg: String },
    #[error("E_SIDE_CONDITION at {path}: {msg}")]
    SideCondition { path: String, msg: String },
    #[error("E_SYSTEM_MISMATCH at {path}: {msg}")]
    SystemMismatch { path: String, msg: String },
    #[error("E_PRECONDITION: {0}")]
    Precondition(String),
    #[error("E_UNSUPPORTED_STEP: {0}")]
    UnsupportedStep(String),
    #[error("E_ILL_FORMED: {0}")]
    IllFormed(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "E_SYNTAX",
            Error::UndefinedBit(_) => "E_UNDEFINED_BIT",
            Error::TooManyAtoms { .. } => "E_TOO_MANY_ATOMS",
            Error::ModeViolation(_) => "E_MODE_VIOLATION",
            Error::Fuel(_) => "E_FUEL",
            Error::NotPnf(_) => "E_NOT_PNF",
            Error::OpenNames(_) => "E_OPEN_NAMES",
            Error::RuleShape { .. } => "E_RULE_SHAPE",
            Error::SideCondition { .. } => "E_SIDE_CONDITION",
            Error::SystemMismatch { .. } => "E_SYSTEM_MISMATCH",
            Error::Precondition(_) => "E_PRECONDITION",
            Error::UnsupportedStep(_) => "E_UNSUPPORTED_STEP",
            Error::IllFormed(_) => "E_ILL_FORMED",
        }
    }

    pub fn syntax(pos: usize, msg: impl Into<String>) -> Error {
        Error::Syntax { pos, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
