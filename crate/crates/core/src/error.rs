use thiserror::Error;

/// Errors raised by the oracle, the constructions and the text formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("malformed machine: {0}")]
    Malformed(String),

    #[error("congruence class exceeds the cap of {cap} words")]
    ClassCapExceeded { cap: usize },

    #[error("word of length {len} exceeds the element length cap of {cap}")]
    LengthCapExceeded { len: usize, cap: usize },

    #[error("letter {0} is outside the alphabet")]
    UnknownLetter(usize),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("{divisor} does not divide {element}")]
    NotDivisor { divisor: String, element: String },

    #[error("right lcm is ambiguous: {0} incomparable minimal common multiples")]
    LcmAmbiguous(usize),

    #[error("left gcd is not unique: {0} maximal common left divisors")]
    GcdNotUnique(usize),

    #[error("maximal hypercube of {element} is not unique ({candidates} candidates)")]
    MaxHypercube { element: String, candidates: usize },

    #[error("{0} is not a hypercube")]
    NotHypercube(String),

    #[error("unknown vertex {0}")]
    UnknownVertex(usize),

    #[error("presentation is not a left divisibility monoid: {0}")]
    InvalidMonoid(String),

    #[error("not a normal word: {0}")]
    NotNormal(String),

    #[error("transducer run does not shorten the word (state {state})")]
    NotShrinking { state: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
