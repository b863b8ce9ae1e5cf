//! Error type shared by all jamlab modules.

use std::fmt;
use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in the jamming laboratory.
#[derive(Debug)]
pub enum Error {
    /// Constellation order is not one of the supported QAM sizes.
    UnsupportedModulation(usize),
    /// Bit stream length is not a multiple of the bits-per-symbol.
    RaggedBitLength { len: usize, bits_per_symbol: usize },
    /// Targeted displacement or swap where source and destination coincide.
    DegenerateTarget { symbol: usize },
    /// Noise standard deviation must be finite and non-negative.
    InvalidNoiseSigma(f64),
    /// Power measurement over an empty sample sequence.
    EmptySequence,
    /// Power budgets require a strictly positive signal power.
    NonPositiveSignalPower(f64),
    /// Dataset generation with zero samples per class.
    EmptyDataset,
    /// Training requires the same number of samples for every symbol.
    UnbalancedDataset,
    /// Training loss became non-finite.
    TrainingDiverged { epoch: usize },
    /// Training finished but the model misclassifies clean constellation points.
    TrainingFailed { clean_errors: usize, order: usize },
    /// No adversarial example found within the attack search radius.
    AttackSaturated { symbol: usize, eps: f64 },
    /// A bit-string label that does not exist in the constellation.
    UnknownLabel(String),
    /// Paired sequences of different lengths.
    LengthMismatch { left: usize, right: usize },
    /// Sweep configuration rejected before running.
    InvalidSweep(String),
    /// Strategy name that is not one of the CLI identifiers.
    UnknownStrategy(String),
    /// Model file does not follow the documented layout.
    ModelFormat(String),
    /// A sweep cell failed; wraps the underlying error with the cell identity.
    Cell {
        strategy: &'static str,
        sjr_db: f64,
        source: Box<Error>,
    },
    /// File I/O failure, with the offending path.
    Io { path: PathBuf, source: std::io::Error },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnsupportedModulation(m) => {
                write!(f, "unsupported modulation order {m} (supported: 4, 16)")
            }
            Error::RaggedBitLength { len, bits_per_symbol } => write!(
                f,
                "bit stream length {len} is not a multiple of {bits_per_symbol} bits per symbol"
            ),
            Error::DegenerateTarget { symbol } => {
                write!(f, "degenerate target: source and destination are both symbol {symbol}")
            }
            Error::InvalidNoiseSigma(s) => {
                write!(f, "noise sigma must be finite and >= 0, got {s}")
            }
            Error::EmptySequence => write!(f, "cannot measure power of an empty sequence"),
            Error::NonPositiveSignalPower(p) => {
                write!(f, "signal power must be > 0, got {p}")
            }
            Error::EmptyDataset => write!(f, "dataset requires at least one sample per class"),
            Error::UnbalancedDataset => {
                write!(f, "training dataset must contain the same count for every symbol")
            }
            Error::TrainingDiverged { epoch } => {
                write!(f, "training diverged (non-finite loss) at epoch {epoch}")
            }
            Error::TrainingFailed { clean_errors, order } => write!(
                f,
                "trained model misclassifies {clean_errors} of {order} clean constellation points"
            ),
            Error::AttackSaturated { symbol, eps } => write!(
                f,
                "no adversarial example for symbol {symbol} within radius {eps}; model looks broken"
            ),
            Error::UnknownLabel(l) => write!(f, "label {l:?} is not in the constellation"),
            Error::LengthMismatch { left, right } => {
                write!(f, "sequence lengths differ: {left} vs {right}")
            }
            Error::InvalidSweep(msg) => write!(f, "invalid sweep config: {msg}"),
            Error::UnknownStrategy(s) => write!(
                f,
                "unknown strategy {s:?} (expected noise, phase, fixed, aj or deceive)"
            ),
            Error::ModelFormat(msg) => write!(f, "bad model file: {msg}"),
            Error::Cell { strategy, sjr_db, source } => {
                write!(f, "sweep cell {strategy} @ {sjr_db} dB: {source}")
            }
            Error::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            Error::Cell { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::Io { path: path.into(), source }
    }
}
