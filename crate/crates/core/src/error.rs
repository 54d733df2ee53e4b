use crate::picard::SurfaceId;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library.
///
/// Variants split into two families: user-facing input problems (bad
/// arguments, invalid documents, non-solutions) and [`Error::Invariant`],
/// which signals that an internal arithmetic identity failed and therefore
/// points at a bug rather than at the input.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("incompatible lattices: {left} vs {right}")]
    IncompatibleLattices { left: SurfaceId, right: SurfaceId },

    #[error("coordinate vector of length {found} does not fit {surface} (expected {expected})")]
    CoordinateLength {
        surface: SurfaceId,
        expected: usize,
        found: usize,
    },

    #[error("cannot embed {from} into {into}: no blowdown chain is modeled")]
    NoBlowdownChain { from: SurfaceId, into: SurfaceId },

    #[error("unknown surface {0:?} (expected P2, X0..X8 or P1xP1)")]
    UnknownSurface(String),

    #[error("not a (-1)-class: {0}")]
    NotMinusOneClass(String),

    #[error("no exceptional class with these (r,c1): {0}")]
    NotExceptional(String),

    #[error("invalid block: {0}")]
    InvalidBlock(String),

    #[error("not a two-block exceptional collection: {0}")]
    NotTwoBlock(String),

    #[error("invalid collection: {0}")]
    InvalidCollection(String),

    #[error("collection is not complete")]
    NotComplete,

    #[error("expected a 3-block collection, found {0} blocks")]
    NotThreeBlock(usize),

    #[error("mutation index {index} out of range for a {blocks}-block collection")]
    MutationIndex { index: usize, blocks: usize },

    #[error("invalid braid word: {0}")]
    BraidWord(String),

    #[error("unknown equation id {0:?}")]
    UnknownEquation(String),

    #[error("({x},{y},{z}) is not a solution of equation {equation}")]
    NotASolution {
        equation: String,
        x: i64,
        y: i64,
        z: i64,
    },

    #[error("mutation leaves positive octant")]
    LeavesOctant,

    #[error("{0}")]
    Unsupported(String),

    #[error("invalid document: {0}")]
    Document(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for failures that indicate a bug in this crate rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}
