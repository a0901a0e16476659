use thiserror::Error;

/// Errors raised by the geometry kernel and the exoflop pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("the zero vector has no primitive generator")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix rows have inconsistent lengths")]
    RaggedMatrix,
    #[error("cones live in different lattices (N-side vs M-side)")]
    SideMismatch,
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("polytope has a non-lattice vertex")]
    NonLatticeVertex,
    #[error("generator {index} does not lie on the requested hyperplane")]
    OffHyperplane { index: usize },
    #[error("ray lies outside the support of the fan")]
    RayOutsideSupport,
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("fan is not simplicial")]
    NotSimplicial,
    #[error("fan is not complete")]
    NotComplete,
    #[error("support of the fan is not convex")]
    NonConvexSupport,
    #[error("divisor has {got} coefficients but the fan has {expected} rays")]
    CoefficientCount { expected: usize, got: usize },
    #[error("expected at least one divisor")]
    NoDivisors,
    #[error("cone is not strictly convex")]
    NotStrictlyConvex,
    #[error("cone is not full-dimensional")]
    NotFullDimensional,
    #[error("cone is not reflexive Gorenstein")]
    NotReflexive,
    #[error("cone is not completely split")]
    NotSplit,
    #[error("quotient lattice has torsion (invariant factors {0:?})")]
    TorsionQuotient(Vec<String>),
    #[error("generator projects to a non-primitive vector of the quotient lattice")]
    NonPrimitiveProjection,
    #[error("degenerate point configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("point {index} does not lie on the configuration hyperplane")]
    PointOffHyperplane { index: usize },
    #[error("triangulation admits no regularity certificate")]
    NotRegular,
    #[error("weights do not certify the given triangulation")]
    BadCertificate,
    #[error("dimension of conv(L0) differs from dimension of conv(L0 ∪ L1)")]
    ExtensionDimension,
    #[error("divisor coefficients violate the anticanonical partition condition at ray {ray}")]
    DeltaCondition { ray: usize },
    #[error("potential point {index} lies outside the dual of the bundle support")]
    PotentialOutsideDual { index: usize },
    #[error("potential point {index} has height {height} against the bundle element, expected 1")]
    PotentialHeight { index: usize, height: String },
    #[error("potential support is invalid: {0}")]
    InvalidPotential(String),
    #[error("potential is empty")]
    EmptyPotential,
    #[error("cone sandwich violated: {0}")]
    Sandwich(String),
    #[error("potential point {index} pairs negatively with splitting point {part}")]
    NegativeSplitPairing { index: usize, part: usize },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
