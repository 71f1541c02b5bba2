use core::fmt;

/// Everything that can be rejected by this crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    EmptyTrainingSet,
    EmptyPattern,
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// A pattern entry that is not allowed in this context (1-based index).
    InvalidEntry {
        index: usize,
        value: f64,
    },
    /// An RNA character other than A/C/G/U (1-based position).
    InvalidBase {
        position: usize,
        found: char,
    },
    EmptySequence,
    EmptyKeepSet,
    FullKeepSet,
    /// 1-based index outside `1..=dim`.
    IndexOutOfRange {
        index: usize,
        dim: usize,
    },
    FlipCountOutOfRange {
        count: usize,
        dim: usize,
    },
    NotSymmetric {
        row: usize,
        col: usize,
    },
    NonZeroDiagonal {
        index: usize,
        value: f64,
    },
    NormTooLarge {
        norm: f64,
    },
    EmptyClamp,
    /// The perturbed-data system `((γ+β)I − W)` could not be factorised.
    SingularSystem {
        shift: f64,
    },
    InvalidParameter {
        name: &'static str,
        value: f64,
    },
    CapacityDimension {
        d: usize,
    },
    ZeroVector,
    PatternIndexOutOfRange {
        index: usize,
        count: usize,
    },
    QubitCapExceeded {
        required: usize,
        cap: usize,
    },
    PhaseQubitsOutOfRange {
        requested: usize,
        max: usize,
    },
    ZeroShots,
    EigenNoConvergence,
    /// The filter ancilla never flagged success; nothing to post-select.
    NoSuccess {
        success_probability: f64,
        kept_bins: usize,
        resolution: f64,
    },
    MissingSubRegister(&'static str),
    /// Hebbian-mode evolution needs the stored patterns, not just ρ.
    PatternsRequired,
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Error::*;
        match self {
            EmptyTrainingSet => write!(f, "training set is empty"),
            EmptyPattern => write!(f, "pattern has no neurons"),
            DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            InvalidEntry { index, value } => {
                write!(f, "entry {index} has invalid value {value}")
            }
            InvalidBase { position, found } => {
                write!(f, "invalid RNA base {found:?} at position {position}")
            }
            EmptySequence => write!(f, "RNA sequence is empty"),
            EmptyKeepSet => write!(f, "keep set is empty, nothing is known"),
            FullKeepSet => write!(f, "keep set covers every neuron, nothing to recover"),
            IndexOutOfRange { index, dim } => {
                write!(f, "index {index} outside 1..={dim}")
            }
            FlipCountOutOfRange { count, dim } => {
                write!(f, "flip count {count} outside 0..={dim}")
            }
            NotSymmetric { row, col } => {
                write!(f, "matrix is not symmetric at ({row}, {col})")
            }
            NonZeroDiagonal { index, value } => {
                write!(f, "diagonal entry {index} is {value}, expected 0")
            }
            NormTooLarge { norm } => write!(f, "spectral norm {norm} exceeds 1"),
            EmptyClamp => write!(f, "clamp set is empty"),
            SingularSystem { shift } => {
                write!(f, "(γ+β)I − W is singular for γ+β = {shift}")
            }
            InvalidParameter { name, value } => write!(f, "invalid {name}: {value}"),
            CapacityDimension { d } => write!(f, "capacity needs d ≥ 2, got {d}"),
            ZeroVector => write!(f, "cannot embed the zero vector"),
            PatternIndexOutOfRange { index, count } => {
                write!(f, "pattern {index} outside 1..={count}")
            }
            QubitCapExceeded { required, cap } => {
                write!(f, "simulation needs {required} qubits, cap is {cap}")
            }
            PhaseQubitsOutOfRange { requested, max } => {
                write!(f, "phase register of {requested} qubits outside 1..={max}")
            }
            ZeroShots => write!(f, "shot count must be positive"),
            EigenNoConvergence => write!(f, "symmetric eigensolver did not converge"),
            NoSuccess { success_probability, kept_bins, resolution } => write!(
                f,
                "filter ancilla success probability {success_probability:e} \
                 ({kept_bins} phase bins kept, resolution {resolution})"
            ),
            MissingSubRegister(name) => write!(f, "register has no sub-register {name:?}"),
            PatternsRequired => write!(f, "Hebbian evolution needs the training patterns"),
        }
    }
}

impl core::error::Error for Error {}

/// Non-fatal conditions attached to results instead of being logged.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// γ ≤ ‖W‖: the stationary point is not certified to be a minimum.
    GammaBelowNorm { gamma: f64, norm: f64 },
    /// γ below 1, permitted but outside the usual setting.
    GammaBelowOne { gamma: f64 },
    /// A threshold with magnitude above 1 (1-based index).
    LargeThreshold { index: usize, value: f64 },
    /// γ + β ≤ ‖W‖ in the perturbed-data solve.
    ShiftBelowNorm { shift: f64, norm: f64 },
    /// Trotter step larger than the recommended 0.1.
    LargeTimeStep { delta_t: f64 },
    /// The phase grid spacing is coarser than the filter threshold μ.
    CoarsePhaseGrid { resolution: f64, mu: f64 },
    /// Some eigenvalue may fall outside the phase window and alias.
    Aliasing { bound: f64, window: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Warning::*;
        match self {
            GammaBelowNorm { gamma, norm } => {
                write!(f, "γ = {gamma} does not exceed ‖W‖ = {norm}; minimum not guaranteed")
            }
            GammaBelowOne { gamma } => write!(f, "γ = {gamma} is below 1"),
            LargeThreshold { index, value } => {
                write!(f, "threshold {index} = {value} has magnitude above 1")
            }
            ShiftBelowNorm { shift, norm } => {
                write!(f, "γ+β = {shift} does not exceed ‖W‖ = {norm}; system may be indefinite")
            }
            LargeTimeStep { delta_t } => write!(f, "time step {delta_t} above 0.1"),
            CoarsePhaseGrid { resolution, mu } => {
                write!(f, "phase grid resolution {resolution} is coarser than μ = {mu}")
            }
            Aliasing { bound, window } => write!(f, "spectral bound {bound} does not fit the phase window ({window})"),
        }
    }
}
