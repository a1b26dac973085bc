//! One-parameter scenario sweeps over the NPS projection.
//!
//! Every row is a full projection through [`project`]; nothing is scaled
//! from a neighbouring row. Rows are evaluated in parallel and returned in
//! grid order.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::benefits::{ProjectionResult, Scheme};
use crate::corpus::CompoundingConvention;
use crate::error::{EngineError, EngineResult};
use crate::money::{Period, Rate, RateKind};
use crate::portfolio::LifecycleFund;
use crate::projection::{project, Overrides, ProjectionRequest};
use crate::salary::EmployeeProfile;

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CSV_HEADER: [&str; 6] = [
    "parameter",
    "value",
    "pension_rupees",
    "pension_paise",
    "corpus_paise",
    "replacement_ratio",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptParameter {
    AnnuityShare,
    EmployerRate,
    LifecycleFund,
    ExpectedReturn,
}

impl SweptParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweptParameter::AnnuityShare => "annuity_share",
            SweptParameter::EmployerRate => "employer_rate",
            SweptParameter::LifecycleFund => "lifecycle_fund",
            SweptParameter::ExpectedReturn => "expected_return",
        }
    }
}

impl fmt::Display for SweptParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweptParameter {
    type Err = EngineError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "annuity_share" => Ok(SweptParameter::AnnuityShare),
            "employer_rate" => Ok(SweptParameter::EmployerRate),
            "lifecycle" | "lifecycle_fund" => Ok(SweptParameter::LifecycleFund),
            "expected_return" | "return" => Ok(SweptParameter::ExpectedReturn),
            other => Err(EngineError::field(
                "parameter",
                format!("unknown parameter `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridPoint {
    Rate(Rate),
    Fund(LifecycleFund),
}

impl GridPoint {
    /// Wire form: the decimal fraction for rates, the fund name otherwise.
    pub fn label(&self) -> String {
        match self {
            GridPoint::Rate(r) => r.value().to_string(),
            GridPoint::Fund(f) => f.as_str().to_string(),
        }
    }

    fn order_key(&self) -> Decimal {
        match self {
            GridPoint::Rate(r) => r.value(),
            GridPoint::Fund(f) => f.equity_cap().value(),
        }
    }
}

/// A base profile, one swept parameter, and the ascending grid it takes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSweepSpec", into = "RawSweepSpec")]
pub struct SweepSpec {
    base: EmployeeProfile,
    parameter: SweptParameter,
    grid: Vec<GridPoint>,
    overrides: Overrides,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweepSpec {
    base: EmployeeProfile,
    parameter: SweptParameter,
    grid: Vec<String>,
    #[serde(default)]
    overrides: Overrides,
}

impl TryFrom<RawSweepSpec> for SweepSpec {
    type Error = EngineError;
    fn try_from(raw: RawSweepSpec) -> Result<Self, Self::Error> {
        SweepSpec::parse(raw.base, raw.parameter, &raw.grid, raw.overrides)
    }
}

impl From<SweepSpec> for RawSweepSpec {
    fn from(s: SweepSpec) -> Self {
        RawSweepSpec {
            base: s.base,
            parameter: s.parameter,
            grid: s.grid.iter().map(GridPoint::label).collect(),
            overrides: s.overrides,
        }
    }
}

fn grid_rate(parameter: SweptParameter, value: Decimal) -> EngineResult<Rate> {
    let rate = match parameter {
        SweptParameter::AnnuityShare => Rate::unitless(value, RateKind::Share),
        SweptParameter::EmployerRate => Rate::unitless(value, RateKind::Contribution),
        SweptParameter::ExpectedReturn => Rate::per_year(value, RateKind::Return),
        SweptParameter::LifecycleFund => unreachable!("funds are not rates"),
    }
    .map_err(|e| EngineError::InvalidGrid(e.to_string()))?;
    let bounded = matches!(
        parameter,
        SweptParameter::AnnuityShare | SweptParameter::EmployerRate
    );
    if bounded && value > Decimal::ONE {
        return Err(EngineError::InvalidGrid(format!(
            "{parameter} value {value} exceeds 1"
        )));
    }
    Ok(rate)
}

impl SweepSpec {
    pub fn new(
        base: EmployeeProfile,
        parameter: SweptParameter,
        grid: Vec<GridPoint>,
        overrides: Overrides,
    ) -> EngineResult<Self> {
        if grid.is_empty() {
            return Err(EngineError::InvalidGrid("grid is empty".into()));
        }
        for point in &grid {
            match (parameter, point) {
                (SweptParameter::LifecycleFund, GridPoint::Fund(_)) => {}
                (SweptParameter::LifecycleFund, GridPoint::Rate(_)) | (_, GridPoint::Fund(_)) => {
                    return Err(EngineError::InvalidGrid(format!(
                        "grid value `{}` does not fit parameter {parameter}",
                        point.label()
                    )))
                }
                (p, GridPoint::Rate(r)) => {
                    grid_rate(p, r.value())?;
                }
            }
        }
        if let Some(w) = grid
            .windows(2)
            .find(|w| w[0].order_key() >= w[1].order_key())
        {
            return Err(EngineError::InvalidGrid(format!(
                "grid must be strictly increasing: `{}` then `{}`",
                w[0].label(),
                w[1].label()
            )));
        }
        Ok(SweepSpec {
            base,
            parameter,
            grid,
            overrides,
        })
    }

    /// Grid values as wire strings: decimal fractions, or fund names.
    pub fn parse(
        base: EmployeeProfile,
        parameter: SweptParameter,
        grid: &[impl AsRef<str>],
        overrides: Overrides,
    ) -> EngineResult<Self> {
        let points = grid
            .iter()
            .map(|s| {
                let s = s.as_ref().trim();
                match parameter {
                    SweptParameter::LifecycleFund => s
                        .parse::<LifecycleFund>()
                        .map(GridPoint::Fund)
                        .map_err(|e| EngineError::InvalidGrid(e.to_string())),
                    p => {
                        let v = Decimal::from_str(s).map_err(|e| {
                            EngineError::InvalidGrid(format!("invalid decimal `{s}`: {e}"))
                        })?;
                        grid_rate(p, v).map(GridPoint::Rate)
                    }
                }
            })
            .collect::<EngineResult<Vec<_>>>()?;
        SweepSpec::new(base, parameter, points, overrides)
    }

    pub fn base(&self) -> &EmployeeProfile {
        &self.base
    }

    pub fn parameter(&self) -> SweptParameter {
        self.parameter
    }

    pub fn grid(&self) -> &[GridPoint] {
        &self.grid
    }

    pub fn overrides(&self) -> &Overrides {
        &self.overrides
    }

    /// The projection request a single grid point expands to.
    pub fn row_request(&self, point: &GridPoint) -> ProjectionRequest {
        let mut profile = self.base.clone();
        let mut overrides = self.overrides.clone();
        match (self.parameter, point) {
            (SweptParameter::AnnuityShare, GridPoint::Rate(r)) => {
                overrides.annuity_share = Some(*r)
            }
            (SweptParameter::EmployerRate, GridPoint::Rate(r)) => profile.employer_contrib = *r,
            (SweptParameter::ExpectedReturn, GridPoint::Rate(r)) => {
                overrides.annual_return = Some(*r);
                overrides.lifecycle = None;
            }
            (SweptParameter::LifecycleFund, GridPoint::Fund(f)) => {
                overrides.lifecycle = Some(*f);
                overrides.annual_return = None;
            }
            _ => unreachable!("grid checked against parameter at construction"),
        }
        ProjectionRequest::new(Scheme::Nps, profile).with_overrides(overrides)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowError {
    pub message: String,
    pub validation: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRow {
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub result: Option<ProjectionResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<RowError>,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.result.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepMetadata {
    pub convention: CompoundingConvention,
    pub engine_version: String,
    /// Set by front ends that stamp tables; engine output leaves it empty
    /// so identical inputs give identical tables.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub generated_at: Option<DateTime<Utc>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepTable {
    pub parameter: SweptParameter,
    pub rows: Vec<SweepRow>,
    pub metadata: SweepMetadata,
}

impl SweepTable {
    pub fn stamped(mut self, at: DateTime<Utc>) -> Self {
        self.metadata.generated_at = Some(at);
        self
    }

    pub fn results(&self) -> impl Iterator<Item = &ProjectionResult> {
        self.rows.iter().filter_map(|r| r.result.as_ref())
    }

    /// RFC 4180 CSV with the fixed header. Failed rows keep their parameter
    /// and value with the numeric columns empty.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for row in &self.rows {
            let record = match &row.result {
                Some(r) => vec![
                    self.parameter.as_str().to_string(),
                    row.value.clone(),
                    r.monthly_pension.rupees().to_string(),
                    r.monthly_pension_unrounded.paise().to_string(),
                    r.corpus()
                        .map(|c| c.paise().to_string())
                        .unwrap_or_default(),
                    r.replacement_ratio
                        .map(|q| q.value().round_dp(10).to_string())
                        .unwrap_or_default(),
                ],
                None => vec![
                    self.parameter.as_str().to_string(),
                    row.value.clone(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ],
            };
            w.write_record(&record).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

pub fn run_sweep(spec: &SweepSpec) -> SweepTable {
    let rows = spec
        .grid
        .par_iter()
        .map(|point| {
            let value = point.label();
            match project(&spec.row_request(point)) {
                Ok(result) => SweepRow {
                    value,
                    result: Some(result),
                    error: None,
                },
                Err(e) => SweepRow {
                    value,
                    result: None,
                    error: Some(RowError {
                        message: e.to_string(),
                        validation: e.is_validation(),
                    }),
                },
            }
        })
        .collect();
    SweepTable {
        parameter: spec.parameter,
        rows,
        metadata: SweepMetadata {
            convention: spec.overrides.convention(),
            engine_version: ENGINE_VERSION.to_string(),
            generated_at: None,
        },
    }
}

fn rate_points(grid: &[Rate]) -> Vec<GridPoint> {
    grid.iter().copied().map(GridPoint::Rate).collect()
}

pub fn sweep_annuity_share(
    base: &EmployeeProfile,
    grid: &[Rate],
    overrides: &Overrides,
) -> EngineResult<SweepTable> {
    let spec = SweepSpec::new(
        base.clone(),
        SweptParameter::AnnuityShare,
        rate_points(grid),
        overrides.clone(),
    )?;
    Ok(run_sweep(&spec))
}

pub fn sweep_employer_rate(
    base: &EmployeeProfile,
    grid: &[Rate],
    annuity_share: Rate,
    overrides: &Overrides,
) -> EngineResult<SweepTable> {
    let overrides = Overrides {
        annuity_share: Some(annuity_share),
        ..overrides.clone()
    };
    let spec = SweepSpec::new(
        base.clone(),
        SweptParameter::EmployerRate,
        rate_points(grid),
        overrides,
    )?;
    Ok(run_sweep(&spec))
}

pub fn sweep_lifecycle(
    base: &EmployeeProfile,
    funds: &[LifecycleFund],
    overrides: &Overrides,
) -> EngineResult<SweepTable> {
    let grid = funds.iter().copied().map(GridPoint::Fund).collect();
    let spec = SweepSpec::new(
        base.clone(),
        SweptParameter::LifecycleFund,
        grid,
        overrides.clone(),
    )?;
    Ok(run_sweep(&spec))
}

pub fn sweep_expected_return(
    base: &EmployeeProfile,
    grid: &[Rate],
    overrides: &Overrides,
) -> EngineResult<SweepTable> {
    let spec = SweepSpec::new(
        base.clone(),
        SweptParameter::ExpectedReturn,
        rate_points(grid),
        overrides.clone(),
    )?;
    Ok(run_sweep(&spec))
}

/// Shares from decimal fractions, for building grids in code.
pub fn share_grid(values: &[Decimal]) -> EngineResult<Vec<Rate>> {
    values
        .iter()
        .map(|&v| Rate::new(v, Period::Unitless, RateKind::Share))
        .collect()
}
