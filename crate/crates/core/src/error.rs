use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Semantic failures raised by the geometric and lattice operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degenerate direction")]
    DegenerateDirection,
    #[error("vector ({0}, {1}) is not primitive")]
    NotPrimitive(i64, i64),
    #[error("linear part has determinant {0}, expected +1 or -1")]
    NotUnimodular(i64),
    #[error("integer overflow in lattice coordinates")]
    Overflow,
    #[error("degenerate polygon")]
    DegeneratePolygon,
    #[error("polygon is not counterclockwise")]
    Clockwise,
    #[error("index {index} out of range ({len} available)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("not a toric diagram: {0}")]
    NotToric(String),
    #[error("not Delzant at vertex {0}")]
    NotDelzant(usize),
    #[error("no unimodular chart at edge {0}")]
    NoChart(usize),
    #[error("invalid triangle: {0}")]
    InvalidTriangle(String),
    #[error("capacity too large for region")]
    CapacityTooLarge,
    #[error("surgery precondition violated: {0}")]
    Surgery(String),
    #[error("surgery region not free")]
    RegionNotFree,
    #[error("node not blow-down ready: {0}")]
    NotBlowdownReady(String),
    #[error("chop too large at vertex {0}")]
    ChopTooLarge(usize),
    #[error("region is not contained in the diagram")]
    RegionNotContained,
    #[error("region is not Delzant")]
    RegionNotDelzant,
    #[error("region edge {0} partially overlaps the boundary")]
    PartialOverlap(usize),
    #[error("node on reduction boundary")]
    NodeOnReductionBoundary,
    #[error("no Delzant sub-polygon found at configured search depth")]
    SearchExhausted,
    #[error("invalid placement: {0}")]
    InvalidPlacement(String),
    #[error("reduce or blow down first")]
    HasNodes,
    #[error("proper transform has non-positive area")]
    NonPositiveArea,
    #[error("capacity must be positive")]
    NonPositiveCapacity,
    #[error("not an exceptional class")]
    NotExceptional,
    #[error("divisor not compatible with S")]
    DivisorNotCompatible,
    #[error("models do not share a base")]
    NoSharedBase,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("search rank limit: rank {rank} exceeds {max}")]
    RankLimit { rank: usize, max: usize },
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}
