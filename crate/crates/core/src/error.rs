use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension {0} (expected 1, 2 or 3)")]
    InvalidDimension(usize),
    #[error("unsupported branching factor {0} (expected 2 or 3)")]
    InvalidFactor(usize),
    #[error("extent {extent:?} is not valid for dimension {dimension}")]
    InvalidExtent { dimension: usize, extent: [usize; 3] },
    #[error("coordinates along axis {axis}: {reason}")]
    InvalidCoordinates { axis: usize, reason: String },
    #[error("orientation {orientation} is not valid for dimension {dimension}")]
    InvalidOrientation { dimension: usize, orientation: usize },
    #[error("tree coordinates {coords:?} outside extent {extent:?}")]
    TreeOutOfExtent { coords: [usize; 3], extent: [usize; 3] },
    #[error("no tree at {0:?}")]
    MissingTree([usize; 3]),
    #[error("vertex {vertex} out of range (tree has {count} vertices)")]
    VertexOutOfRange { vertex: u64, count: u64 },
    #[error("vertex {0} is already refined")]
    AlreadyRefined(u32),
    #[error("depth {0} exceeds the maximum of {max}", max = crate::tree::MAX_DEPTH)]
    DepthLimit(u32),
    #[error("grid topology is frozen; subdivision is only allowed before finalize()")]
    Finalized,
    #[error("grid must be finalized before {0}")]
    NotFinalized(&'static str),
    #[error("global index {index} out of range ({count} global indices)")]
    GlobalIndexOutOfRange { index: u64, count: u64 },
    #[error("global index ranges of trees {first:?} and {second:?} overlap")]
    OverlappingStarts { first: [usize; 3], second: [usize; 3] },
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("field `{name}` has {len} values for {expected} vertices")]
    FieldLength { name: String, len: usize, expected: u64 },
    #[error("child coordinates {coords:?} out of range for dimension {dimension}, factor {factor}")]
    InvalidChildCoords { coords: Vec<usize>, dimension: usize, factor: usize },
    #[error("{what} index {index} out of range [0, {count})")]
    IndexOutOfRange { what: &'static str, index: usize, count: usize },
    #[error("cursor points at a leaf")]
    LeafCursor,
    #[error("corner {0} is not owned by the current cell")]
    NotOwner(usize),
    #[error("{what}: {cells} cells exceeds the limit of {limit} (HTG_MAX_CELLS)")]
    SizeGuard { what: &'static str, cells: u64, limit: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
