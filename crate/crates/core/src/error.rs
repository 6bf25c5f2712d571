use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("requested period {requested} exceeds the configured bound {bound}")]
    PeriodBound { requested: u32, bound: u32 },
    #[error("periodic sets must be disjoint; {0} lies in both")]
    PeriodicSetsOverlap(String),
    #[error("periodic set is not invariant under the dynamics: {0}")]
    NotInvariant(String),
    #[error("basis closure exceeded its cap of {cap} points while applying `{map}`")]
    ClosureCap { cap: usize, map: String },
    #[error("truncation escape: `{map}` sends {from} outside the basis")]
    Escape { map: String, from: String },
    #[error("cover infeasible: no homoclinic point within {radius:.3e} of {center}; enlarge the basis size bound")]
    CoverInfeasible { center: String, radius: f64 },
    #[error("partition rejected: {0}")]
    Partition(String),
    #[error("epsilon' certification failed: {0}")]
    Certification(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("report error: {0}")]
    Report(String),
    #[error(transparent)]
    KTheory(#[from] smale_ktheory::KError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
