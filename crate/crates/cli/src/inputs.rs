//! Flags to engine requests. Percent flags are percent units (`--return 9`
//! is 9%), rupee flags are whole rupees.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use clap::{Args, ValueEnum};
use pensionlab_core::{
    CompoundingConvention, EmployeeProfile, EngineResult, IndexingMode, LifecycleFund, Money,
    Overrides, Period, ProjectionRequest, Rate, RateKind, Scheme, SweepSpec, SweptParameter,
};
use rust_decimal::Decimal;
use serde::de::DeserializeOwned;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Ops,
    Nps,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Ops => Scheme::Ops,
            SchemeArg::Nps => Scheme::Nps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Flat,
    WageIndexed,
}

impl From<ModeArg> for IndexingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Flat => IndexingMode::Flat,
            ModeArg::WageIndexed => IndexingMode::WageIndexed,
        }
    }
}

/// Profile and model flags shared by `project` and `sweep`. Anything left
/// unset keeps the base request's value (the level-10 reference profile
/// unless `--request` supplies one).
#[derive(Debug, Clone, Default, Args)]
pub struct ProfileFlags {
    /// Monthly basic pay, rupees
    #[arg(long, value_name = "RUPEES")]
    pub basic: Option<i64>,
    /// Present monthly gross salary, rupees
    #[arg(long, value_name = "RUPEES")]
    pub gross: Option<i64>,
    /// DA as percent of basic
    #[arg(long, value_name = "PERCENT")]
    pub da: Option<Decimal>,
    /// Combined annual salary growth, percent
    #[arg(long, value_name = "PERCENT")]
    pub growth: Option<Decimal>,
    /// Employee contribution, percent of basic + DA
    #[arg(long, value_name = "PERCENT")]
    pub employee_rate: Option<Decimal>,
    /// Employer contribution, percent of basic + DA
    #[arg(long, value_name = "PERCENT")]
    pub employer_rate: Option<Decimal>,
    /// Age at appointment
    #[arg(long)]
    pub age: Option<u32>,
    /// Retirement age
    #[arg(long, conflicts_with = "years")]
    pub retire_age: Option<u32>,
    /// Years of service (sets the retirement age from the appointment age)
    #[arg(long)]
    pub years: Option<u32>,

    /// Annual return on the corpus, percent
    #[arg(long = "return", value_name = "PERCENT", conflicts_with = "lifecycle")]
    pub annual_return: Option<Decimal>,
    /// Derive the return from a lifecycle fund: default, conservative, moderate, aggressive
    #[arg(long)]
    pub lifecycle: Option<LifecycleFund>,
    /// Share of the corpus annuitized, percent
    #[arg(long, value_name = "PERCENT")]
    pub annuity_share: Option<Decimal>,
    /// Annual annuity payout rate, percent
    #[arg(long, value_name = "PERCENT")]
    pub annuity_rate: Option<Decimal>,
    /// Compounding convention, e.g. nominal-monthly+due, effective-annual+ordinary
    #[arg(long)]
    pub convention: Option<CompoundingConvention>,
    /// Contribution stream
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Pin the corpus instead of accumulating, rupees
    #[arg(long, value_name = "RUPEES")]
    pub corpus: Option<i64>,
    /// Pin the last drawn salary instead of projecting it, rupees
    #[arg(long, value_name = "RUPEES")]
    pub last_drawn: Option<i64>,
}

fn percent(v: Decimal, period: Period, kind: RateKind) -> EngineResult<Rate> {
    Rate::from_percent(v, period, kind)
}

impl ProfileFlags {
    pub fn apply_profile(&self, p: &mut EmployeeProfile) -> EngineResult<()> {
        if let Some(r) = self.basic {
            p.basic_pay = Money::from_rupees(r);
        }
        if let Some(r) = self.gross {
            p.gross_salary = Money::from_rupees(r);
        }
        if let Some(v) = self.da {
            p.da_rate = percent(v, Period::Unitless, RateKind::Da)?;
        }
        if let Some(v) = self.growth {
            p.combined_growth = percent(v, Period::PerYear, RateKind::Growth)?;
        }
        if let Some(v) = self.employee_rate {
            p.employee_contrib = percent(v, Period::Unitless, RateKind::Contribution)?;
        }
        if let Some(v) = self.employer_rate {
            p.employer_contrib = percent(v, Period::Unitless, RateKind::Contribution)?;
        }
        if let Some(a) = self.age {
            p.appointment_age = a;
        }
        if let Some(a) = self.retire_age {
            p.retirement_age = a;
        }
        if let Some(y) = self.years {
            p.retirement_age = p.appointment_age.saturating_add(y);
        }
        p.validate()
    }

    pub fn apply_overrides(&self, o: &mut Overrides) -> EngineResult<()> {
        if let Some(v) = self.annual_return {
            o.annual_return = Some(percent(v, Period::PerYear, RateKind::Return)?);
            o.lifecycle = None;
        }
        if let Some(f) = self.lifecycle {
            o.lifecycle = Some(f);
            o.annual_return = None;
        }
        if let Some(v) = self.annuity_share {
            o.annuity_share = Some(percent(v, Period::Unitless, RateKind::Share)?);
        }
        if let Some(v) = self.annuity_rate {
            o.annuity_rate = Some(percent(v, Period::PerYear, RateKind::Annuity)?);
        }
        if let Some(c) = self.convention {
            o.convention = Some(c);
        }
        if let Some(m) = self.mode {
            o.contribution_mode = Some(m.into());
        }
        if let Some(r) = self.corpus {
            o.corpus = Some(Money::from_rupees(r));
        }
        if let Some(r) = self.last_drawn {
            o.last_drawn_salary = Some(Money::from_rupees(r));
        }
        o.validate()
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn projection_request(
    base: Option<ProjectionRequest>,
    scheme: Option<SchemeArg>,
    flags: &ProfileFlags,
) -> EngineResult<ProjectionRequest> {
    let mut req = base.unwrap_or_else(|| {
        ProjectionRequest::new(Scheme::Nps, EmployeeProfile::level_10_reference())
    });
    if let Some(s) = scheme {
        req.scheme = s.into();
    }
    flags.apply_profile(&mut req.profile)?;
    flags.apply_overrides(&mut req.overrides)?;
    Ok(req)
}

/// `--grid` values: percents for rate parameters, fund names for lifecycle.
pub fn grid_strings(parameter: SweptParameter, grid: &str) -> anyhow::Result<Vec<String>> {
    grid.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match parameter {
            SweptParameter::LifecycleFund => Ok(s.to_string()),
            _ => {
                let pct: Decimal = s.parse().map_err(|e| anyhow!("grid value `{s}`: {e}"))?;
                Ok((pct / Decimal::ONE_HUNDRED).to_string())
            }
        })
        .collect()
}

pub fn sweep_spec(
    base: Option<SweepSpec>,
    parameter: Option<SweptParameter>,
    grid: Option<&str>,
    flags: &ProfileFlags,
) -> anyhow::Result<SweepSpec> {
    let (mut profile, mut overrides, base_param, base_grid) = match &base {
        Some(s) => (
            s.base().clone(),
            s.overrides().clone(),
            Some(s.parameter()),
            Some(s.grid().iter().map(|g| g.label()).collect::<Vec<_>>()),
        ),
        None => (
            EmployeeProfile::level_10_reference(),
            Overrides::default(),
            None,
            None,
        ),
    };
    flags.apply_profile(&mut profile)?;
    flags.apply_overrides(&mut overrides)?;
    let parameter = parameter
        .or(base_param)
        .ok_or_else(|| anyhow!("--param is required without --request"))?;
    let grid = match grid {
        Some(g) => grid_strings(parameter, g)?,
        None if base_param == Some(parameter) => base_grid.unwrap_or_default(),
        None => return Err(anyhow!("--grid is required for parameter {parameter}")),
    };
    Ok(SweepSpec::parse(profile, parameter, &grid, overrides)?)
}
