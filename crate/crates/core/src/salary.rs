//! Salary level and contribution base over a career.
//!
//! Salary grows at one combined annual rate applied to gross pay. NPS
//! contributions default to a flat stream on the starting contribution base;
//! `WageIndexed` steps the base up by the combined rate on every 12-month
//! anniversary.

use rust_decimal::Decimal;
use rust_decimal_macros::dec;
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, EngineResult};
use crate::money::{pow, ExactMoney, Money, Period, Rate, RateKind};

pub const MIN_AGE: u32 = 18;
pub const MAX_AGE: u32 = 75;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmployeeProfile {
    pub appointment_age: u32,
    pub retirement_age: u32,
    /// Monthly basic pay.
    pub basic_pay: Money,
    /// DA as a fraction of basic pay.
    pub da_rate: Rate,
    /// Present monthly gross salary, the base of the last-drawn projection.
    pub gross_salary: Money,
    pub combined_growth: Rate,
    /// Fraction of basic + DA.
    pub employee_contrib: Rate,
    /// Fraction of basic + DA.
    pub employer_contrib: Rate,
}

impl EmployeeProfile {
    /// Level-10 central government entrant: appointed at 25, retiring at 60,
    /// basic ₹56,100, DA 42%, gross ₹1,10,000, 9% combined growth
    /// (3% increment + 6% DA), contributions 10% employee + 14% employer.
    pub fn level_10_reference() -> Self {
        EmployeeProfile {
            appointment_age: 25,
            retirement_age: 60,
            basic_pay: Money::from_rupees(56_100),
            da_rate: Rate::from_parts(dec!(0.42), Period::Unitless, RateKind::Da),
            gross_salary: Money::from_rupees(110_000),
            combined_growth: Rate::from_parts(dec!(0.09), Period::PerYear, RateKind::Growth),
            employee_contrib: Rate::from_parts(
                dec!(0.10),
                Period::Unitless,
                RateKind::Contribution,
            ),
            employer_contrib: Rate::from_parts(
                dec!(0.14),
                Period::Unitless,
                RateKind::Contribution,
            ),
        }
    }

    pub fn validate(&self) -> EngineResult<()> {
        for (field, age) in [
            ("appointment_age", self.appointment_age),
            ("retirement_age", self.retirement_age),
        ] {
            if !(MIN_AGE..=MAX_AGE).contains(&age) {
                return Err(EngineError::field(
                    field,
                    format!("{age} outside [{MIN_AGE}, {MAX_AGE}]"),
                ));
            }
        }
        if self.appointment_age >= self.retirement_age {
            return Err(EngineError::field(
                "retirement_age",
                format!(
                    "retirement age {} must exceed appointment age {}",
                    self.retirement_age, self.appointment_age
                ),
            ));
        }
        for (field, m) in [
            ("basic_pay", self.basic_pay),
            ("gross_salary", self.gross_salary),
        ] {
            if m < Money::ZERO {
                return Err(EngineError::field(field, "must be non-negative"));
            }
        }
        for (field, r) in [
            ("employee_contrib", self.employee_contrib),
            ("employer_contrib", self.employer_contrib),
        ] {
            if r.value() > Decimal::ONE {
                return Err(EngineError::field(field, format!("{r} exceeds 100%")));
            }
        }
        self.combined_growth
            .require_period(Period::PerYear)
            .map_err(|e| EngineError::field("combined_growth", e.to_string()))?;
        Ok(())
    }

    pub fn tenure_years(&self) -> u32 {
        self.retirement_age.saturating_sub(self.appointment_age)
    }

    pub fn tenure_months(&self) -> usize {
        self.tenure_years() as usize * 12
    }

    pub fn total_contribution_rate(&self) -> EngineResult<Rate> {
        self.employee_contrib.checked_add(self.employer_contrib)
    }

    /// Gross salary compounded at the combined rate over the full tenure.
    pub fn last_drawn_salary(&self) -> EngineResult<ExactMoney> {
        future_value(self.gross_salary, self.combined_growth, self.tenure_years())
    }
}

/// `present × (1 + rate)^years`, unrounded.
pub fn future_value(
    present: impl Into<ExactMoney>,
    rate: Rate,
    years: u32,
) -> EngineResult<ExactMoney> {
    rate.require_period(Period::PerYear)?;
    Ok(present
        .into()
        .mul_decimal(pow(Decimal::ONE + rate.value(), years)))
}

/// Basic pay plus DA: `basic × (1 + da_rate)`.
pub fn contribution_base(basic: Money, da_rate: Rate) -> ExactMoney {
    basic.exact() + basic.scale(da_rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexingMode {
    #[default]
    Flat,
    WageIndexed,
}

impl IndexingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            IndexingMode::Flat => "flat",
            IndexingMode::WageIndexed => "wage_indexed",
        }
    }
}

/// Monthly contributions from appointment to retirement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContributionSeries {
    monthly_amounts: Vec<Money>,
    indexing_mode: IndexingMode,
}

impl ContributionSeries {
    pub fn new(monthly_amounts: Vec<Money>, indexing_mode: IndexingMode) -> Self {
        ContributionSeries {
            monthly_amounts,
            indexing_mode,
        }
    }

    pub fn flat(amount: Money, months: usize) -> Self {
        ContributionSeries::new(vec![amount; months], IndexingMode::Flat)
    }

    pub fn amounts(&self) -> &[Money] {
        &self.monthly_amounts
    }

    pub fn mode(&self) -> IndexingMode {
        self.indexing_mode
    }

    pub fn len(&self) -> usize {
        self.monthly_amounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monthly_amounts.is_empty()
    }

    pub fn total(&self) -> Money {
        self.monthly_amounts.iter().copied().sum()
    }

    /// The common amount when every entry is equal.
    pub fn level_amount(&self) -> Option<Money> {
        let first = *self.monthly_amounts.first()?;
        self.monthly_amounts
            .iter()
            .all(|&m| m == first)
            .then_some(first)
    }
}

pub fn build_contribution_series(
    profile: &EmployeeProfile,
    mode: IndexingMode,
) -> EngineResult<ContributionSeries> {
    profile.validate()?;
    let rate = profile.total_contribution_rate()?;
    let base = contribution_base(profile.basic_pay, profile.da_rate);
    let months = profile.tenure_months();
    let amounts = match mode {
        IndexingMode::Flat => vec![base.scale(rate).to_money(); months],
        IndexingMode::WageIndexed => {
            let step = Decimal::ONE + profile.combined_growth.value();
            let mut factor = Decimal::ONE;
            let mut out = Vec::with_capacity(months);
            for _ in 0..profile.tenure_years() {
                let monthly = base.mul_decimal(factor).scale(rate).to_money();
                out.extend(std::iter::repeat_n(monthly, 12));
                factor *= step;
            }
            out
        }
    };
    Ok(ContributionSeries::new(amounts, mode))
}
