//! Deterministic retirement-benefit projection.
//!
//! Old Pension Scheme (direct benefit: half the last drawn salary) and
//! National Pension System (defined contribution: a monthly contribution
//! stream accumulated into a corpus, split into a lumpsum and an annuity)
//! computed with exact paise arithmetic, plus asset-allocation returns and
//! one-parameter scenario sweeps.

pub mod benefits;
pub mod corpus;
pub mod error;
pub mod money;
pub mod portfolio;
pub mod projection;
pub mod reference;
pub mod salary;
pub mod sweeps;

pub use benefits::{ProjectionResult, Scheme};
pub use corpus::{CompoundingConvention, CorpusBreakdown, Timing};
pub use error::{EngineError, EngineResult};
pub use money::{ExactMoney, Money, Period, Rate, RateBasis, RateKind};
pub use portfolio::{AssetClass, CapSet, ExpectedReturns, LifecycleFund, PortfolioAllocation};
pub use projection::{compare_ops_nps, project, ComparisonReport, Overrides, ProjectionRequest};
pub use salary::{ContributionSeries, EmployeeProfile, IndexingMode};
pub use sweeps::{run_sweep, SweepSpec, SweepTable, SweptParameter};
