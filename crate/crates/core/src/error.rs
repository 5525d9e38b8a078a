use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular block: pivot vanished while eliminating {0}")]
    SingularBlock(String),
    #[error("interior component {0:?} touches no boundary vertex")]
    DisconnectedInterior(Vec<String>),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("no parallel edges between {0} and {1}")]
    NoParallelEdges(String, String),
    #[error("{0} is not a series site")]
    NotSeriesSite(String),
    #[error("zero denominator in {0}")]
    ZeroDenominator(String),
    #[error("edge {0} is not a loop")]
    NotALoop(usize),
    #[error("{0} is not an interior pendant vertex")]
    NotAPendant(String),
    #[error("{0} is not a star site")]
    NotAStarSite(String),
    #[error("{0}, {1}, {2} do not span a triangle")]
    NotATriangle(String, String, String),
    #[error("zero weight in {0}")]
    ZeroWeight(String),
    #[error("configuration not found: {0}")]
    SiteNotFound(String),
    #[error("bad dimensions: {0}")]
    BadDimensions(String),
    #[error("size mismatch: |I| = {0}, |J| = {1}")]
    SizeMismatch(usize, usize),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("period mismatch: {0} vs {1}")]
    PeriodMismatch(usize, usize),
    #[error("degenerate block: Q = 0")]
    DegenerateQ,
    #[error("layer {k} out of range for m = {m}")]
    BadLayer { k: usize, m: usize },
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("no uncrossing grove")]
    NoUncrossingGrove,
    #[error("support of size {size} exceeds the guard {limit}")]
    SupportTooLarge { size: usize, limit: usize },
    #[error("missing entry L[{0},{1}]")]
    MissingEntry(String, String),
    #[error("radii not sorted: {0}")]
    RadiiNotSorted(String),
    #[error("estimate diverged: {0}")]
    EstimateDiverged(String),
    #[error("rule 1 rewriting revisited a partition: {0}")]
    RuleCycle(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
