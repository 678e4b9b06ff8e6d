use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("thin-plate kernel evaluated at r = {r} beyond its range R = {max}; the domain is mis-sized")]
    ThinPlateOutOfRange { r: f64, max: f64 },
    #[error("training inputs are indistinguishable (covariance not positive definite at row {index})")]
    IndistinguishableInputs { index: usize },
    #[error("predictive variance {0} is negative beyond round-off")]
    NegativeVariance(f64),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("need at least {needed} points, got {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("domain has zero volume")]
    DegenerateDomain,
    #[error("point ({x}, {y}, {z}) lies outside the model domain")]
    OutOfDomain { x: f64, y: f64, z: f64 },
    #[error("no interior cells in the implicit surface; shape is degenerate")]
    DegenerateShape,
    #[error("implicit field never changes sign; no surface to extract")]
    EmptySurface,
    #[error("contact normal has zero length")]
    ZeroNormal,
    #[error("mesh is not watertight: edge ({0}, {1}) is used by {2} triangles")]
    NotWatertight(usize, usize, usize),
    #[error("mesh winding is inconsistent at edge ({0}, {1})")]
    InconsistentWinding(usize, usize),
    #[error("camera sees nothing of the object")]
    EmptyView,
    #[error("hand plan infeasible: {0}")]
    Infeasible(Infeasibility),
    #[error("prior construction failed: {found} of {needed} grasps above threshold after {attempts} attempts")]
    PriorConstructionFailed {
        found: usize,
        needed: usize,
        attempts: usize,
    },
}

/// Which hand constraint a query violated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Infeasibility {
    /// A fingertip target is farther than the hand reach from the wrist.
    Reach { finger: usize },
    /// Two fingertip targets are closer than two tip radii.
    SelfCollision { a: usize, b: usize },
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infeasibility::Reach { finger } => write!(f, "finger {finger} out of reach"),
            Infeasibility::SelfCollision { a, b } => {
                write!(f, "fingers {a} and {b} collide")
            }
        }
    }
}
