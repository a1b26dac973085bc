//! OPS direct benefit, NPS annuity pension and replacement ratio.

use rust_decimal::Decimal;
use rust_decimal_macros::dec;
use serde::{Deserialize, Serialize};

use crate::corpus::{CompoundingConvention, CorpusBreakdown};
use crate::error::{EngineError, EngineResult};
use crate::money::{ExactMoney, Money, Period, Rate, RateKind};
use crate::portfolio::{LifecycleFund, PortfolioAllocation};
use crate::salary::{EmployeeProfile, IndexingMode};

/// OPS pays half the last drawn salary.
pub const OPS_PENSION_FRACTION: Rate =
    Rate::from_parts(dec!(0.5), Period::Unitless, RateKind::Share);

/// Statutory ceiling on retirement gratuity, ₹20 lakh.
pub const GRATUITY_CAP: Money = Money::from_rupees(2_000_000);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Ops,
    Nps,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Ops => "ops",
            Scheme::Nps => "nps",
        }
    }
}

pub fn ops_pension_exact(last_drawn: impl Into<ExactMoney>) -> ExactMoney {
    last_drawn.into().scale(OPS_PENSION_FRACTION)
}

/// Half the last drawn salary, rounded to whole rupees.
pub fn ops_pension(last_drawn: impl Into<ExactMoney>) -> Money {
    ops_pension_exact(last_drawn).round_to_rupees()
}

/// Level perpetuity: the principal is preserved and pays `rate / 12` a month.
pub fn annuity_pension_exact(
    principal: impl Into<ExactMoney>,
    annuity_rate: Rate,
) -> EngineResult<ExactMoney> {
    annuity_rate.require_period(Period::PerYear)?;
    principal.into().scale(annuity_rate).div_decimal(dec!(12))
}

pub fn annuity_pension(
    principal: impl Into<ExactMoney>,
    annuity_rate: Rate,
) -> EngineResult<Money> {
    annuity_pension_exact(principal, annuity_rate).map(ExactMoney::round_to_rupees)
}

pub fn replacement_ratio(
    pension: impl Into<ExactMoney>,
    last_drawn: impl Into<ExactMoney>,
) -> EngineResult<Rate> {
    let last_drawn = last_drawn.into();
    if last_drawn.paise() <= Decimal::ZERO {
        return Err(EngineError::DivisionByZero("last drawn salary"));
    }
    Rate::unitless(pension.into().paise() / last_drawn.paise(), RateKind::Share)
}

pub fn gratuity_cap(amount: Money) -> Money {
    amount.min(GRATUITY_CAP)
}

/// Outcome of one projection, echoing every input that shaped it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionResult {
    pub scheme: Scheme,
    /// Rounded to whole rupees.
    pub monthly_pension: Money,
    /// Materialized to paise, before rupee rounding.
    pub monthly_pension_unrounded: Money,
    /// Rounded to whole rupees.
    pub last_drawn_salary: Money,
    pub last_drawn_salary_unrounded: Money,
    /// Pension over last drawn salary at full precision; absent when the
    /// last drawn salary is zero.
    pub replacement_ratio: Option<Rate>,
    /// The same ratio in percent, two decimals.
    pub replacement_ratio_percent: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub breakdown: Option<CorpusBreakdown>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub annual_return: Option<Rate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub annuity_rate: Option<Rate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub monthly_contribution: Option<Money>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lifecycle: Option<LifecycleFund>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub allocation: Option<PortfolioAllocation>,
    pub profile: EmployeeProfile,
    pub convention: CompoundingConvention,
    pub contribution_mode: IndexingMode,
}

impl ProjectionResult {
    pub fn corpus(&self) -> Option<Money> {
        self.breakdown.map(|b| b.corpus)
    }
}
