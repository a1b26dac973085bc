//! Corpus accumulation and the lumpsum/annuity split.

use std::fmt;
use std::str::FromStr;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, EngineResult};
use crate::money::{annual_to_monthly, pow, ExactMoney, Money, Rate, RateBasis};
use crate::salary::ContributionSeries;

/// When the month's contribution lands relative to that month's growth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Timing {
    /// Beginning of month: the contribution earns that month's return.
    Due,
    /// End of month.
    Ordinary,
}

impl Timing {
    pub fn as_str(self) -> &'static str {
        match self {
            Timing::Due => "due",
            Timing::Ordinary => "ordinary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompoundingConvention {
    pub rate_basis: RateBasis,
    pub timing: Timing,
}

impl CompoundingConvention {
    pub const NOMINAL_DUE: CompoundingConvention = CompoundingConvention {
        rate_basis: RateBasis::NominalMonthly,
        timing: Timing::Due,
    };
    pub const EFFECTIVE_DUE: CompoundingConvention = CompoundingConvention {
        rate_basis: RateBasis::EffectiveAnnual,
        timing: Timing::Due,
    };

    pub const ALL: [CompoundingConvention; 4] = [
        CompoundingConvention::NOMINAL_DUE,
        CompoundingConvention {
            rate_basis: RateBasis::NominalMonthly,
            timing: Timing::Ordinary,
        },
        CompoundingConvention::EFFECTIVE_DUE,
        CompoundingConvention {
            rate_basis: RateBasis::EffectiveAnnual,
            timing: Timing::Ordinary,
        },
    ];

    pub fn label(&self) -> String {
        format!("{}+{}", self.rate_basis.as_str(), self.timing.as_str())
    }
}

impl Default for CompoundingConvention {
    fn default() -> Self {
        CompoundingConvention::NOMINAL_DUE
    }
}

impl fmt::Display for CompoundingConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for CompoundingConvention {
    type Err = EngineError;

    /// Accepts `nominal-monthly`, `effective-annual`, optionally followed by
    /// `+due` or `+ordinary` (timing defaults to due). Underscores and
    /// hyphens are interchangeable.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        let (basis, timing) = match norm.split_once(['+', ':', ',']) {
            Some((b, t)) => (b.to_string(), t.to_string()),
            None => (norm.clone(), "due".to_string()),
        };
        let rate_basis = match basis.as_str() {
            "nominal_monthly" | "nominal" => RateBasis::NominalMonthly,
            "effective_annual" | "effective" => RateBasis::EffectiveAnnual,
            _ => {
                return Err(EngineError::field(
                    "convention",
                    format!("unknown rate basis `{basis}`"),
                ))
            }
        };
        let timing = match timing.as_str() {
            "due" | "begin" => Timing::Due,
            "ordinary" | "end" => Timing::Ordinary,
            _ => {
                return Err(EngineError::field(
                    "convention",
                    format!("unknown timing `{timing}`"),
                ))
            }
        };
        Ok(CompoundingConvention { rate_basis, timing })
    }
}

/// Month-by-month accumulation of `series` at `annual_return`, unrounded.
pub fn accumulate_exact(
    series: &ContributionSeries,
    annual_return: Rate,
    convention: CompoundingConvention,
) -> EngineResult<ExactMoney> {
    if series.is_empty() {
        return Err(EngineError::field("contributions", "series is empty"));
    }
    let i = annual_to_monthly(annual_return, convention.rate_basis)?.value();
    let growth = Decimal::ONE + i;
    let mut balance = ExactMoney::ZERO;
    for &c in series.amounts() {
        balance = match convention.timing {
            Timing::Due => (balance + c.exact()).mul_decimal(growth),
            Timing::Ordinary => balance.mul_decimal(growth) + c.exact(),
        };
    }
    Ok(balance)
}

/// Retirement corpus, materialized to paise.
pub fn accumulate(
    series: &ContributionSeries,
    annual_return: Rate,
    convention: CompoundingConvention,
) -> EngineResult<Money> {
    accumulate_exact(series, annual_return, convention).map(ExactMoney::to_money)
}

/// Closed-form future value of `months` level payments:
/// `P · ((1+i)^n − 1) / i`, times `(1+i)` for payments in advance.
pub fn level_annuity_future_value(
    payment: Money,
    months: u32,
    annual_return: Rate,
    convention: CompoundingConvention,
) -> EngineResult<ExactMoney> {
    let i = annual_to_monthly(annual_return, convention.rate_basis)?.value();
    let n = Decimal::from(months);
    let factor = if i.is_zero() {
        n
    } else {
        let growth = Decimal::ONE + i;
        let ordinary = (pow(growth, months) - Decimal::ONE) / i;
        match convention.timing {
            Timing::Due => ordinary * growth,
            Timing::Ordinary => ordinary,
        }
    };
    Ok(payment.exact().mul_decimal(factor))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusBreakdown {
    pub corpus: Money,
    pub lumpsum: Money,
    /// `corpus − lumpsum`, exact.
    pub annuity_principal: Money,
    pub lumpsum_share: Rate,
    pub annuity_share: Rate,
    /// Convention the corpus was accumulated under; absent when the corpus
    /// was supplied directly.
    pub convention: Option<CompoundingConvention>,
}

/// Splits a corpus into a rupee-rounded lumpsum and the annuity remainder.
pub fn split_corpus(corpus: Money, annuity_share: Rate) -> EngineResult<CorpusBreakdown> {
    let v = annuity_share.value();
    if v < Decimal::ZERO || v > Decimal::ONE {
        return Err(EngineError::ShareOutOfRange(v.to_string()));
    }
    let lumpsum_share = annuity_share.complement()?;
    // Rounding up must not exceed a corpus that is not itself a whole rupee.
    let lumpsum = corpus.scale(lumpsum_share).round_to_rupees().min(corpus);
    Ok(CorpusBreakdown {
        corpus,
        lumpsum,
        annuity_principal: corpus - lumpsum,
        lumpsum_share,
        annuity_share,
        convention: None,
    })
}
