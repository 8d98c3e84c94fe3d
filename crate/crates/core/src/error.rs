use crate::control::Trajectory;
use crate::geom::Point;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Variant names are part of the CLI contract: reports carry them verbatim
/// (see [`Error::name`]).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("triangle is degenerate (zero signed area)")]
    DegenerateTriangle,
    #[error("point coincides with a foot")]
    DegenerateAtFoot,
    #[error("circles are coincident")]
    CoincidentCircles,
    #[error("weights must be strictly positive, got {0:?}")]
    InvalidWeights([f64; 3]),
    #[error("charges must be non-zero, got {0:?}")]
    InvalidCharges([f64; 3]),
    #[error("evaluation point lies on a pole of the Coulomb potential")]
    PoleAtFoot,
    #[error("invalid spider: {0}")]
    InvalidSpec(String),
    #[error("no point satisfies all annulus constraints")]
    EmptyWorkspace,
    #[error("constraint circles are tangent or meet in a triple point near {0}")]
    DegenerateTangency(Point),
    #[error("critical point at {location} is degenerate (|det Hessian| = {det:e})")]
    NonMorsePoint { location: Point, det: f64 },
    #[error("gradient is tangent to the boundary at {0}")]
    TangentGradient(Point),
    #[error("point {0} is not reachable by the spider")]
    Unreachable(Point),
    #[error("point {0} is not in the workspace")]
    NotInWorkspace(Point),
    #[error("unsupported workspace topology: {0}")]
    UnsupportedTopology(String),
    #[error("stationary charge would vanish at {0}")]
    ZeroCharge(Point),
    #[error("finite-difference stencil leaves the domain at {0}")]
    StencilOutOfDomain(Point),
    #[error("grid census changed between resolutions {coarse} and {fine}")]
    ResolutionTooCoarse { coarse: usize, fine: usize },
    #[error("target {0} is not strictly inside the foot triangle")]
    TargetOutsideTriangle(Point),
    #[error("target {0} is in the workspace but not a trapped minimum")]
    NotTrappable(Point),
    #[error("gradient flow stalled at a non-minimal critical point {location}")]
    StalledAtSaddle { location: Point, trajectory: Box<Trajectory> },
}

impl Error {
    /// Variant name, as written into CLI reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DegenerateTriangle => "DegenerateTriangle",
            Error::DegenerateAtFoot => "DegenerateAtFoot",
            Error::CoincidentCircles => "CoincidentCircles",
            Error::InvalidWeights(_) => "InvalidWeights",
            Error::InvalidCharges(_) => "InvalidCharges",
            Error::PoleAtFoot => "PoleAtFoot",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::EmptyWorkspace => "EmptyWorkspace",
            Error::DegenerateTangency(_) => "DegenerateTangency",
            Error::NonMorsePoint { .. } => "NonMorsePoint",
            Error::TangentGradient(_) => "TangentGradient",
            Error::Unreachable(_) => "Unreachable",
            Error::NotInWorkspace(_) => "NotInWorkspace",
            Error::UnsupportedTopology(_) => "UnsupportedTopology",
            Error::ZeroCharge(_) => "ZeroCharge",
            Error::StencilOutOfDomain(_) => "StencilOutOfDomain",
            Error::ResolutionTooCoarse { .. } => "ResolutionTooCoarse",
            Error::TargetOutsideTriangle(_) => "TargetOutsideTriangle",
            Error::NotTrappable(_) => "NotTrappable",
            Error::StalledAtSaddle { .. } => "StalledAtSaddle",
        }
    }
}
