//! The end-to-end projection pipeline shared by the CLI and the service.

use rust_decimal::Decimal;
use rust_decimal_macros::dec;
use serde::{Deserialize, Serialize};

use crate::benefits::{
    annuity_pension_exact, ops_pension_exact, replacement_ratio, ProjectionResult, Scheme,
};
use crate::corpus::{accumulate, split_corpus, CompoundingConvention};
use crate::error::{EngineError, EngineResult};
use crate::money::{ExactMoney, Money, Period, Rate, RateKind};
use crate::portfolio::{greedy_allocate, weighted_return, CapSet, ExpectedReturns, LifecycleFund};
use crate::salary::{build_contribution_series, EmployeeProfile, IndexingMode};

pub const DEFAULT_ANNUAL_RETURN: Rate =
    Rate::from_parts(dec!(0.09), Period::PerYear, RateKind::Return);
pub const DEFAULT_ANNUITY_SHARE: Rate =
    Rate::from_parts(dec!(0.75), Period::Unitless, RateKind::Share);
pub const DEFAULT_ANNUITY_RATE: Rate =
    Rate::from_parts(dec!(0.08), Period::PerYear, RateKind::Annuity);

/// Optional knobs on top of a profile. Anything left out takes the default:
/// 9% return, 75% annuity share, 8% annuity rate, nominal-monthly
/// compounding with contributions at the start of each month, flat
/// contributions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub annual_return: Option<Rate>,
    /// Derive the return from a lifecycle fund's greedy allocation instead.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lifecycle: Option<LifecycleFund>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expected_returns: Option<ExpectedReturns>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub caps: Option<CapSet>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub annuity_share: Option<Rate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub annuity_rate: Option<Rate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub convention: Option<CompoundingConvention>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub contribution_mode: Option<IndexingMode>,
    /// Use this corpus instead of accumulating contributions.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub corpus: Option<Money>,
    /// Use this last drawn salary instead of projecting gross pay.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub last_drawn_salary: Option<Money>,
}

impl Overrides {
    pub fn convention(&self) -> CompoundingConvention {
        self.convention.unwrap_or_default()
    }

    pub fn validate(&self) -> EngineResult<()> {
        if self.annual_return.is_some() && self.lifecycle.is_some() {
            return Err(EngineError::field(
                "overrides.annual_return",
                "cannot be combined with overrides.lifecycle",
            ));
        }
        let checks = [
            (
                "overrides.annual_return",
                self.annual_return,
                Period::PerYear,
            ),
            ("overrides.annuity_rate", self.annuity_rate, Period::PerYear),
        ];
        for (field, rate, period) in checks {
            if let Some(r) = rate {
                r.require_period(period)
                    .map_err(|e| EngineError::field(field, e.to_string()))?;
            }
        }
        if let Some(share) = self.annuity_share {
            if share.value() > Decimal::ONE {
                return Err(EngineError::ShareOutOfRange(share.value().to_string()));
            }
        }
        for (field, m) in [
            ("overrides.corpus", self.corpus),
            ("overrides.last_drawn_salary", self.last_drawn_salary),
        ] {
            if matches!(m, Some(m) if m < Money::ZERO) {
                return Err(EngineError::field(field, "must be non-negative"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionRequest {
    pub scheme: Scheme,
    pub profile: EmployeeProfile,
    #[serde(default)]
    pub overrides: Overrides,
}

impl ProjectionRequest {
    pub fn new(scheme: Scheme, profile: EmployeeProfile) -> Self {
        ProjectionRequest {
            scheme,
            profile,
            overrides: Overrides::default(),
        }
    }

    pub fn with_overrides(mut self, overrides: Overrides) -> Self {
        self.overrides = overrides;
        self
    }
}

struct ResolvedReturn {
    rate: Rate,
    fund: Option<LifecycleFund>,
    allocation: Option<crate::portfolio::PortfolioAllocation>,
}

fn resolve_return(o: &Overrides) -> EngineResult<ResolvedReturn> {
    match o.lifecycle {
        Some(fund) => {
            let caps = o.caps.unwrap_or_default();
            let allocation = greedy_allocate(fund.equity_cap(), &caps)?;
            let rate = weighted_return(&allocation, &o.expected_returns.unwrap_or_default())?;
            Ok(ResolvedReturn {
                rate,
                fund: Some(fund),
                allocation: Some(allocation),
            })
        }
        None => Ok(ResolvedReturn {
            rate: o.annual_return.unwrap_or(DEFAULT_ANNUAL_RETURN),
            fund: None,
            allocation: None,
        }),
    }
}

fn last_drawn(req: &ProjectionRequest) -> EngineResult<ExactMoney> {
    match req.overrides.last_drawn_salary {
        Some(m) => Ok(m.exact()),
        None => req.profile.last_drawn_salary(),
    }
}

fn ratio(pension: ExactMoney, last_drawn: ExactMoney) -> EngineResult<Option<Rate>> {
    if last_drawn.is_zero() {
        return Ok(None);
    }
    replacement_ratio(pension, last_drawn).map(Some)
}

/// Runs one projection.
pub fn project(req: &ProjectionRequest) -> EngineResult<ProjectionResult> {
    req.profile.validate()?;
    req.overrides.validate()?;
    let o = &req.overrides;
    let convention = o.convention();
    let mode = o.contribution_mode.unwrap_or_default();
    let last_drawn = last_drawn(req)?;

    let mut result = ProjectionResult {
        scheme: req.scheme,
        monthly_pension: Money::ZERO,
        monthly_pension_unrounded: Money::ZERO,
        last_drawn_salary: last_drawn.round_to_rupees(),
        last_drawn_salary_unrounded: last_drawn.to_money(),
        replacement_ratio: None,
        replacement_ratio_percent: None,
        breakdown: None,
        annual_return: None,
        annuity_rate: None,
        monthly_contribution: None,
        lifecycle: None,
        allocation: None,
        profile: req.profile.clone(),
        convention,
        contribution_mode: mode,
    };

    let pension = match req.scheme {
        Scheme::Ops => ops_pension_exact(last_drawn),
        Scheme::Nps => {
            let annuity_share = o.annuity_share.unwrap_or(DEFAULT_ANNUITY_SHARE);
            let annuity_rate = o.annuity_rate.unwrap_or(DEFAULT_ANNUITY_RATE);
            let series = build_contribution_series(&req.profile, mode)?;
            let ret = resolve_return(o)?;
            let breakdown = match o.corpus {
                Some(pinned) => split_corpus(pinned, annuity_share)?,
                None => {
                    let corpus = accumulate(&series, ret.rate, convention)?;
                    let mut b = split_corpus(corpus, annuity_share)?;
                    b.convention = Some(convention);
                    b
                }
            };
            result.breakdown = Some(breakdown);
            result.annual_return = Some(ret.rate);
            result.annuity_rate = Some(annuity_rate);
            result.monthly_contribution = series.amounts().first().copied();
            result.lifecycle = ret.fund;
            result.allocation = ret.allocation;
            annuity_pension_exact(breakdown.annuity_principal, annuity_rate)?
        }
    };

    result.monthly_pension = pension.round_to_rupees();
    result.monthly_pension_unrounded = pension.to_money();
    result.replacement_ratio = ratio(pension, last_drawn)?;
    result.replacement_ratio_percent = result.replacement_ratio.map(|r| r.percent_string(2));
    Ok(result)
}

/// OPS and NPS projected side by side for the same inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonReport {
    pub ops: ProjectionResult,
    pub nps: ProjectionResult,
    /// OPS pension minus NPS pension, rupee-rounded.
    pub pension_gap: Money,
}

pub fn compare_ops_nps(
    profile: &EmployeeProfile,
    overrides: &Overrides,
) -> EngineResult<ComparisonReport> {
    let ops = project(
        &ProjectionRequest::new(Scheme::Ops, profile.clone()).with_overrides(overrides.clone()),
    )?;
    let nps = project(
        &ProjectionRequest::new(Scheme::Nps, profile.clone()).with_overrides(overrides.clone()),
    )?;
    let pension_gap = ops.monthly_pension - nps.monthly_pension;
    Ok(ComparisonReport {
        ops,
        nps,
        pension_gap,
    })
}
