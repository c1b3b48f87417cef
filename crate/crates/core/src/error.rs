use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("unknown letter {letter:?} in word {word:?}")]
    UnknownLetter { letter: char, word: String },

    #[error("census entry {entry:?}: field {field}: {message}")]
    Parse {
        entry: String,
        field: String,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("budget exhausted after completing index {completed_index}")]
    BudgetExhausted { completed_index: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
