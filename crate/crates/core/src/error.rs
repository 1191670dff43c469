//! Error type shared by every module of the core crate.

use core::fmt;

/// Convenience alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Failures reported by the simulation core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A qudit dimension below the supported minimum.
    InvalidDimension {
        /// Requested dimension.
        dim: usize,
        /// Smallest accepted dimension for the operation.
        min: usize,
    },
    /// Parity is undefined for `d = 2` because `f_m^+` and `f_m^-` coincide.
    ParityUndefined,
    /// Offset `m` outside `0..dim`.
    InvalidOffset {
        /// Requested offset.
        m: usize,
        /// Qudit dimension.
        dim: usize,
    },
    /// Operands of incompatible shape.
    DimensionMismatch {
        /// Expected size.
        expected: usize,
        /// Size that was supplied.
        found: usize,
    },
    /// Amplitudes do not have unit norm.
    NotNormalized {
        /// Squared norm that was found.
        norm_sqr: f64,
    },
    /// A matrix expected to be unitary is not.
    NotUnitary {
        /// Largest entrywise deviation of `U^dagger U` from the identity.
        deviation: f64,
    },
    /// A matrix fails the density-matrix invariants.
    NotPhysical(&'static str),
    /// Integer index does not fit into the requested number of bits.
    IndexOutOfRange {
        /// Index.
        index: usize,
        /// Number of qubits available.
        n_qubits: usize,
    },
    /// Bit lists may only contain 0 and 1.
    InvalidBit(u8),
    /// The operation needs a power-of-two dimension.
    NotPowerOfTwo(usize),
    /// Hardware model exists only for the four-level (two-photon) case.
    UnsupportedInHardware(usize),
    /// Dimension outside the range where exhaustive enumeration is run.
    OutOfEnumerationRange {
        /// Requested dimension.
        dim: usize,
        /// Smallest supported dimension.
        min: usize,
        /// Largest supported dimension.
        max: usize,
    },
    /// Optical network that cannot be compiled.
    Configuration(&'static str),
    /// Circuit settings that do not correspond to a known gate.
    InconsistentSettings(&'static str),
    /// Measurement settings do not span the operator space.
    RankDeficient {
        /// Rank found.
        rank: usize,
        /// Rank required.
        required: usize,
    },
    /// Counts table without any recorded event.
    EmptyCounts,
    /// Parameter outside its declared range.
    InvalidParameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDimension { dim, min } => {
                write!(f, "invalid dimension {dim}: must be at least {min}")
            }
            Error::ParityUndefined => write!(
                f,
                "invalid dimension 2: positive and negative permutations coincide, parity is undefined"
            ),
            Error::InvalidOffset { m, dim } => {
                write!(f, "offset m={m} out of range for dimension {dim}")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotNormalized { norm_sqr } => {
                write!(f, "state is not normalized (squared norm {norm_sqr})")
            }
            Error::NotUnitary { deviation } => {
                write!(f, "matrix is not unitary (max deviation {deviation:e})")
            }
            Error::NotPhysical(why) => write!(f, "not a density matrix: {why}"),
            Error::IndexOutOfRange { index, n_qubits } => {
                write!(f, "index {index} does not fit in {n_qubits} qubits")
            }
            Error::InvalidBit(b) => write!(f, "invalid bit value {b}"),
            Error::NotPowerOfTwo(d) => {
                write!(f, "dimension {d} is not a power of two")
            }
            Error::UnsupportedInHardware(d) => write!(
                f,
                "dimension {d} unsupported: the photonic model only realizes d = 4"
            ),
            Error::OutOfEnumerationRange { dim, min, max } => write!(
                f,
                "dimension {dim} outside the enumeration range [{min}, {max}]"
            ),
            Error::Configuration(why) => write!(f, "network configuration error: {why}"),
            Error::InconsistentSettings(why) => write!(f, "inconsistent circuit settings: {why}"),
            Error::RankDeficient { rank, required } => write!(
                f,
                "measurement settings are not informationally complete (rank {rank} < {required})"
            ),
            Error::EmptyCounts => write!(f, "counts table has no events"),
            Error::InvalidParameter(why) => write!(f, "invalid parameter: {why}"),
        }
    }
}

impl core::error::Error for Error {}
