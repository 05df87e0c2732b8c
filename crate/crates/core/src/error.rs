use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("exponent cap {cap} for variable {var} is below 2")]
    CapTooSmall { var: usize, cap: u32 },

    #[error("relation sequence {0:?} is not strictly increasing")]
    NonIncreasingSequence(Vec<usize>),

    #[error("relation must be a nonconstant monomial")]
    ConstantRelation,

    #[error("operand {0} is not simplicial (all exponent caps must be 2)")]
    NonSimplicial(String),

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("ill-defined map: generator {generator} has nonzero residue {residue}")]
    IllDefinedMap { generator: String, residue: String },

    #[error("component {component} has a nonzero constant term")]
    NonzeroConstantTerm { component: usize },

    #[error("object mismatch: {left} vs {right}")]
    ObjectMismatch { left: String, right: String },

    #[error("Weil algebra mismatch: {left} vs {right}")]
    AlgebraMismatch { left: String, right: String },

    #[error("malformed diagram: {0}")]
    MalformedDiagram(String),

    #[error("malformed cone: {0}")]
    MalformedCone(String),

    #[error("family is incompatible along arrow `{arrow}`")]
    IncompatibleFamily { arrow: String },

    #[error("cone is not a limit (limit dim {limit_dim}, apex dim {apex_dim}, commutes: {commutes})")]
    NotALimit { limit_dim: usize, apex_dim: usize, commutes: bool },

    #[error("tangent vectors live over different base points")]
    BaseMismatch,

    #[error("commutator loop does not factor through the product map: {0}")]
    FactorizationFailure(String),

    #[error("object {0} is not a full power D^n")]
    NonPowerObject(String),

    #[error("axis {0} is not one of 1, 2, 3")]
    InvalidAxis(usize),

    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("{line}:{column}: unresolved reference `{name}`")]
    Unresolved { line: usize, column: usize, name: String },

    #[error("{line}:{column}: duplicate {kind} name `{name}`")]
    Duplicate { line: usize, column: usize, kind: &'static str, name: String },
}

impl Error {
    /// Short machine-readable tag used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::CapTooSmall { .. } => "CapTooSmall",
            Error::NonIncreasingSequence(_) => "NonIncreasingSequence",
            Error::ConstantRelation => "ConstantRelation",
            Error::NonSimplicial(_) => "NonSimplicial",
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::IllDefinedMap { .. } => "IllDefinedMap",
            Error::NonzeroConstantTerm { .. } => "NonzeroConstantTerm",
            Error::ObjectMismatch { .. } => "ObjectMismatch",
            Error::AlgebraMismatch { .. } => "AlgebraMismatch",
            Error::MalformedDiagram(_) => "MalformedDiagram",
            Error::MalformedCone(_) => "MalformedCone",
            Error::IncompatibleFamily { .. } => "IncompatibleFamily",
            Error::NotALimit { .. } => "NotALimit",
            Error::BaseMismatch => "BaseMismatch",
            Error::FactorizationFailure(_) => "FactorizationFailure",
            Error::NonPowerObject(_) => "NonPowerObject",
            Error::InvalidAxis(_) => "InvalidAxis",
            Error::Syntax { .. } => "Syntax",
            Error::Unresolved { .. } => "Unresolved",
            Error::Duplicate { .. } => "Duplicate",
        }
    }
}
