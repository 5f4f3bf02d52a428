use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus mismatch: {0}")]
    ModulusMismatch(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid chunk width iota={iota} for {bits}-bit residues")]
    InvalidIota { iota: u32, bits: u32 },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("gaussian width {width:.3} below the trapdoor quality bound {bound:.3}")]
    WidthTooSmall { width: f64, bound: f64 },
    #[error("message length {got}, expected {want}")]
    MessageLength { got: usize, want: usize },
    #[error("tag space exhausted")]
    TagSpaceExhausted,
    #[error("tag {0} is not usable (zero or not invertible)")]
    BadTag(u64),
    #[error("leaf length {got}, expected {want}")]
    LeafLength { got: usize, want: usize },
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("index {0} is not a member")]
    NotMember(usize),
    #[error("index {0} is already a member")]
    AlreadyMember(usize),
    #[error("unknown segment `{0}`")]
    UnknownSegment(String),
    #[error("alias length mismatch between `{0}` and `{1}`")]
    AliasLength(String, String),
    #[error("alias across incompatible domains between `{0}` and `{1}`")]
    AliasLift(String, String),
    #[error("witness length {got}, expected {want}")]
    WitnessLength { got: usize, want: usize },
    #[error("witness does not satisfy the instance")]
    InvalidWitness,
    #[error("decode error: {0}")]
    Decode(String),
    #[error("public key already registered")]
    DuplicateKey,
    #[error("proof rejected")]
    ProofRejected,
    #[error("access limit reached for this provider")]
    LimitReached,
    #[error("user `{0}` has no credential")]
    NoCredential(String),
    #[error("user `{0}` holds no access witness for this provider")]
    NoAccess(String),
    #[error("unknown user `{0}`")]
    UnknownUser(String),
    #[error("{0}")]
    Protocol(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
