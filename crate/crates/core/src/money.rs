//! Exact money and rate primitives.
//!
//! [`Money`] is a whole number of paise. Scaling a `Money` by a [`Rate`]
//! yields an [`ExactMoney`], a decimal paise amount that keeps the full
//! product until it is materialized back into paise or rounded to whole
//! rupees for presentation. Every rounding in the crate goes through
//! [`round_to_rupees`] or [`ExactMoney::to_money`], both half away from zero.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use rust_decimal::{Decimal, RoundingStrategy};
use rust_decimal_macros::dec;
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, EngineResult};

pub const PAISE_PER_RUPEE: i64 = 100;

/// A signed amount of Indian currency, in paise.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(deny_unknown_fields)]
pub struct Money {
    paise: i64,
}

impl Money {
    pub const ZERO: Money = Money { paise: 0 };

    pub const fn from_paise(paise: i64) -> Self {
        Money { paise }
    }

    pub const fn from_rupees(rupees: i64) -> Self {
        Money {
            paise: rupees * PAISE_PER_RUPEE,
        }
    }

    pub const fn paise(self) -> i64 {
        self.paise
    }

    /// Whole rupees, truncated toward zero. Round first for presentation.
    pub const fn rupees(self) -> i64 {
        self.paise / PAISE_PER_RUPEE
    }

    pub fn is_zero(self) -> bool {
        self.paise == 0
    }

    /// `self × rate`, kept at full precision.
    pub fn scale(self, rate: Rate) -> ExactMoney {
        ExactMoney::from(self).scale(rate)
    }

    pub fn exact(self) -> ExactMoney {
        ExactMoney::from(self)
    }

    /// Rupee figure with Indian digit grouping, e.g. `₹2,66,746`.
    ///
    /// Paise are printed only when non-zero.
    pub fn to_inr_string(self) -> String {
        let sign = if self.paise < 0 { "-" } else { "" };
        let abs = self.paise.unsigned_abs();
        let rupees = abs / PAISE_PER_RUPEE as u64;
        let paise = abs % PAISE_PER_RUPEE as u64;
        let grouped = group_indian(rupees);
        if paise == 0 {
            format!("{sign}₹{grouped}")
        } else {
            format!("{sign}₹{grouped}.{paise:02}")
        }
    }
}

fn group_indian(n: u64) -> String {
    let digits = n.to_string();
    if digits.len() <= 3 {
        return digits;
    }
    let (head, last3) = digits.split_at(digits.len() - 3);
    let mut groups = Vec::new();
    let mut rest = head;
    while rest.len() > 2 {
        let (h, t) = rest.split_at(rest.len() - 2);
        groups.push(t);
        rest = h;
    }
    if !rest.is_empty() {
        groups.push(rest);
    }
    groups.reverse();
    format!("{},{}", groups.join(","), last3)
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_inr_string())
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money::from_paise(self.paise + rhs.paise)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.paise += rhs.paise;
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money::from_paise(self.paise - rhs.paise)
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money::from_paise(-self.paise)
    }
}

impl Mul<i64> for Money {
    type Output = Money;
    fn mul(self, rhs: i64) -> Money {
        Money::from_paise(self.paise * rhs)
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, Add::add)
    }
}

/// Rounds half away from zero to the nearest whole rupee. Idempotent.
pub fn round_to_rupees(m: Money) -> Money {
    let q = m.paise / PAISE_PER_RUPEE;
    let r = m.paise % PAISE_PER_RUPEE;
    let q = if r.abs() * 2 >= PAISE_PER_RUPEE {
        q + m.paise.signum()
    } else {
        q
    };
    Money::from_rupees(q)
}

/// A paise amount carried at full decimal precision.
///
/// Products of `Money` with short decimal rates are exact; long compounding
/// chains keep 28 significant digits, which at crore scale is far below
/// one paisa.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExactMoney(Decimal);

impl ExactMoney {
    pub const ZERO: ExactMoney = ExactMoney(Decimal::ZERO);

    pub fn from_paise_decimal(paise: Decimal) -> Self {
        ExactMoney(paise)
    }

    pub fn paise(self) -> Decimal {
        self.0
    }

    pub fn scale(self, rate: Rate) -> ExactMoney {
        ExactMoney(self.0 * rate.value)
    }

    pub fn mul_decimal(self, factor: Decimal) -> ExactMoney {
        ExactMoney(self.0 * factor)
    }

    pub fn div_decimal(self, divisor: Decimal) -> EngineResult<ExactMoney> {
        if divisor.is_zero() {
            return Err(EngineError::DivisionByZero("money divisor"));
        }
        Ok(ExactMoney(self.0 / divisor))
    }

    /// Materializes to whole paise, half away from zero.
    pub fn to_money(self) -> Money {
        let p = self
            .0
            .round_dp_with_strategy(0, RoundingStrategy::MidpointAwayFromZero);
        Money::from_paise(i64::try_from(p).expect("paise amount exceeds i64"))
    }

    /// Presentation rounding straight from full precision to whole rupees.
    pub fn round_to_rupees(self) -> Money {
        let rupees = (self.0 / Decimal::from(PAISE_PER_RUPEE))
            .round_dp_with_strategy(0, RoundingStrategy::MidpointAwayFromZero);
        Money::from_rupees(i64::try_from(rupees).expect("rupee amount exceeds i64"))
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }
}

impl From<Money> for ExactMoney {
    fn from(m: Money) -> Self {
        ExactMoney(Decimal::from(m.paise))
    }
}

impl Add for ExactMoney {
    type Output = ExactMoney;
    fn add(self, rhs: ExactMoney) -> ExactMoney {
        ExactMoney(self.0 + rhs.0)
    }
}

impl AddAssign for ExactMoney {
    fn add_assign(&mut self, rhs: ExactMoney) {
        self.0 += rhs.0;
    }
}

impl Sub for ExactMoney {
    type Output = ExactMoney;
    fn sub(self, rhs: ExactMoney) -> ExactMoney {
        ExactMoney(self.0 - rhs.0)
    }
}

impl Sum for ExactMoney {
    fn sum<I: Iterator<Item = ExactMoney>>(iter: I) -> ExactMoney {
        iter.fold(ExactMoney::ZERO, Add::add)
    }
}

/// Time basis of a rate. Fractions such as DA, contribution rates and shares
/// have no time basis and use `Unitless`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Period {
    PerYear,
    PerMonth,
    Unitless,
}

impl Period {
    pub fn as_str(self) -> &'static str {
        match self {
            Period::PerYear => "per_year",
            Period::PerMonth => "per_month",
            Period::Unitless => "unitless",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateKind {
    Growth,
    Return,
    Annuity,
    Contribution,
    Da,
    Share,
}

impl RateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RateKind::Growth => "growth",
            RateKind::Return => "return",
            RateKind::Annuity => "annuity",
            RateKind::Contribution => "contribution",
            RateKind::Da => "da",
            RateKind::Share => "share",
        }
    }
}

/// A non-negative exact decimal fraction with an explicit period and kind.
///
/// `0.09` is nine percent. Serialized as `{"value": "0.09", "period": ..., "kind": ...}`
/// with the value as a decimal string, so the scale survives a round trip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RateRepr", into = "RateRepr")]
pub struct Rate {
    value: Decimal,
    period: Period,
    kind: RateKind,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RateRepr {
    value: String,
    period: Period,
    kind: RateKind,
}

impl TryFrom<RateRepr> for Rate {
    type Error = String;
    fn try_from(repr: RateRepr) -> Result<Self, Self::Error> {
        let value = Decimal::from_str(repr.value.trim())
            .map_err(|e| format!("invalid decimal `{}`: {e}", repr.value))?;
        Rate::new(value, repr.period, repr.kind).map_err(|e| e.to_string())
    }
}

impl From<Rate> for RateRepr {
    fn from(r: Rate) -> Self {
        RateRepr {
            value: r.value.to_string(),
            period: r.period,
            kind: r.kind,
        }
    }
}

impl Rate {
    pub fn new(value: Decimal, period: Period, kind: RateKind) -> EngineResult<Self> {
        if value.is_sign_negative() && !value.is_zero() {
            return Err(EngineError::NegativeRate(value.to_string()));
        }
        let mut value = value;
        if value.is_zero() {
            value.set_sign_positive(true);
        }
        Ok(Rate {
            value,
            period,
            kind,
        })
    }

    /// Constructor for constants known to be non-negative.
    pub(crate) const fn from_parts(value: Decimal, period: Period, kind: RateKind) -> Self {
        Rate {
            value,
            period,
            kind,
        }
    }

    pub fn per_year(value: Decimal, kind: RateKind) -> EngineResult<Self> {
        Rate::new(value, Period::PerYear, kind)
    }

    pub fn unitless(value: Decimal, kind: RateKind) -> EngineResult<Self> {
        Rate::new(value, Period::Unitless, kind)
    }

    /// `percent` in percent units: `from_percent(9, ..)` is `0.09`.
    pub fn from_percent(percent: Decimal, period: Period, kind: RateKind) -> EngineResult<Self> {
        Rate::new(percent / dec!(100), period, kind)
    }

    pub fn zero(period: Period, kind: RateKind) -> Self {
        Rate::from_parts(Decimal::ZERO, period, kind)
    }

    pub fn value(&self) -> Decimal {
        self.value
    }

    pub fn period(&self) -> Period {
        self.period
    }

    pub fn kind(&self) -> RateKind {
        self.kind
    }

    pub fn percent(&self) -> Decimal {
        self.value * dec!(100)
    }

    /// Percent rounded half away from zero to `dp` places, e.g. `"14.19"`.
    pub fn percent_string(&self, dp: u32) -> String {
        let p = self
            .percent()
            .round_dp_with_strategy(dp, RoundingStrategy::MidpointAwayFromZero);
        format!("{:.*}", dp as usize, p)
    }

    pub fn with_kind(self, kind: RateKind) -> Self {
        Rate { kind, ..self }
    }

    pub fn require_period(&self, expected: Period) -> EngineResult<()> {
        if self.period == expected {
            Ok(())
        } else {
            Err(EngineError::PeriodMismatch {
                expected: expected.as_str(),
                actual: self.period.as_str(),
            })
        }
    }

    pub fn checked_add(self, other: Rate) -> EngineResult<Rate> {
        self.compatible(&other)?;
        Ok(Rate {
            value: self.value + other.value,
            ..self
        })
    }

    /// `1 − self` for a fraction in `[0, 1]`.
    pub fn complement(self) -> EngineResult<Rate> {
        if self.value > Decimal::ONE {
            return Err(EngineError::ShareOutOfRange(self.value.to_string()));
        }
        Ok(Rate {
            value: Decimal::ONE - self.value,
            ..self
        })
    }

    fn compatible(&self, other: &Rate) -> EngineResult<()> {
        if self.kind != other.kind {
            return Err(EngineError::KindMismatch(
                self.kind.as_str(),
                other.kind.as_str(),
            ));
        }
        other.require_period(self.period)
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}%", self.percent().normalize())
    }
}

/// How an annual rate becomes a monthly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateBasis {
    /// `r / 12`.
    NominalMonthly,
    /// `(1 + r)^(1/12) − 1`.
    EffectiveAnnual,
}

impl RateBasis {
    pub fn as_str(self) -> &'static str {
        match self {
            RateBasis::NominalMonthly => "nominal_monthly",
            RateBasis::EffectiveAnnual => "effective_annual",
        }
    }
}

/// Converts a per-year rate to a per-month rate under `basis`.
pub fn annual_to_monthly(rate: Rate, basis: RateBasis) -> EngineResult<Rate> {
    rate.require_period(Period::PerYear)?;
    let monthly = match basis {
        RateBasis::NominalMonthly => rate.value / dec!(12),
        RateBasis::EffectiveAnnual => nth_root(Decimal::ONE + rate.value, 12) - Decimal::ONE,
    };
    // Newton can undershoot by one ulp at zero; clamp so the rate stays legal.
    let monthly = monthly.max(Decimal::ZERO);
    Ok(Rate::from_parts(monthly, Period::PerMonth, rate.kind))
}

/// `base^exp` by repeated squaring.
pub(crate) fn pow(base: Decimal, exp: u32) -> Decimal {
    let mut result = Decimal::ONE;
    let mut b = base;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= b;
        }
        e >>= 1;
        if e > 0 {
            b *= b;
        }
    }
    result
}

/// Positive real `n`-th root of `a > 0` by Newton iteration.
pub(crate) fn nth_root(a: Decimal, n: u32) -> Decimal {
    assert!(n > 0);
    if a.is_zero() || a == Decimal::ONE || n == 1 {
        return a;
    }
    let n_dec = Decimal::from(n);
    // Start above the root so the iteration decreases monotonically.
    let mut x = Decimal::ONE + (a - Decimal::ONE) / n_dec;
    if x <= Decimal::ZERO {
        x = Decimal::ONE;
    }
    for _ in 0..200 {
        let x_prev_pow = pow(x, n - 1);
        let next = ((n_dec - Decimal::ONE) * x + a / x_prev_pow) / n_dec;
        if next == x {
            break;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ret(v: Decimal) -> Rate {
        Rate::per_year(v, RateKind::Return).unwrap()
    }

    #[test]
    fn rounds_to_rupees_half_up() {
        assert_eq!(
            round_to_rupees(Money::from_paise(26_674_631)),
            Money::from_paise(26_674_600)
        );
        assert_eq!(round_to_rupees(Money::ZERO), Money::ZERO);
        assert_eq!(
            round_to_rupees(Money::from_paise(150)),
            Money::from_paise(200)
        );
        assert_eq!(
            round_to_rupees(Money::from_paise(149)),
            Money::from_paise(100)
        );
        assert_eq!(
            round_to_rupees(Money::from_paise(-150)),
            Money::from_paise(-200)
        );
    }

    #[test]
    fn exact_rounding_avoids_double_rounding() {
        // 49.996 paise short of a rupee boundary: materializing first would
        // round to 50 paise and then up; direct rounding goes down.
        let x = ExactMoney::from_paise_decimal(dec!(149.496));
        assert_eq!(x.round_to_rupees(), Money::from_rupees(1));
        assert_eq!(x.to_money(), Money::from_paise(149));
    }

    #[test]
    fn nominal_monthly_divides_by_twelve() {
        let m = annual_to_monthly(ret(dec!(0.09)), RateBasis::NominalMonthly).unwrap();
        assert_eq!(m.value(), dec!(0.0075));
        assert_eq!(m.period(), Period::PerMonth);
    }

    #[test]
    fn zero_rate_converts_to_zero() {
        for basis in [RateBasis::NominalMonthly, RateBasis::EffectiveAnnual] {
            let m = annual_to_monthly(ret(Decimal::ZERO), basis).unwrap();
            assert!(m.value().is_zero());
        }
    }

    #[test]
    fn effective_annual_matches_bisection_oracle() {
        // Bisection on (1+x)^12 = 1.09 in f64, independent of the Newton path.
        let (mut lo, mut hi) = (0.0_f64, 0.01_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (1.0 + mid).powi(12) < 1.09 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - 0.00720732).abs() < 1e-6);
        let m = annual_to_monthly(ret(dec!(0.09)), RateBasis::EffectiveAnnual).unwrap();
        let got: f64 = m.value().try_into().unwrap();
        assert!((got - lo).abs() < 1e-15, "{got} vs {lo}");
        assert!(m.value().scale() >= 9);
    }

    #[test]
    fn monthly_input_is_rejected() {
        let m = Rate::new(dec!(0.01), Period::PerMonth, RateKind::Return).unwrap();
        assert!(matches!(
            annual_to_monthly(m, RateBasis::NominalMonthly),
            Err(EngineError::PeriodMismatch { .. })
        ));
    }

    #[test]
    fn negative_rates_are_rejected() {
        assert!(matches!(
            Rate::per_year(dec!(-0.01), RateKind::Return),
            Err(EngineError::NegativeRate(_))
        ));
        assert!(Rate::per_year(dec!(-0.0), RateKind::Return).is_ok());
    }

    #[test]
    fn rate_json_round_trips_with_scale() {
        let r = Rate::unitless(dec!(0.420), RateKind::Da).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, r#"{"value":"0.420","period":"unitless","kind":"da"}"#);
        let back: Rate = serde_json::from_str(&json).unwrap();
        assert_eq!(back.value().to_string(), "0.420");
        assert!(serde_json::from_str::<Rate>(
            r#"{"value":"-1","period":"per_year","kind":"growth"}"#
        )
        .is_err());
        assert!(serde_json::from_str::<Rate>(
            r#"{"value":"1","period":"per_year","kind":"growth","x":1}"#
        )
        .is_err());
    }

    #[test]
    fn money_json_is_integer_paise() {
        let m = Money::from_paise(5_610_000);
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"{"paise":5610000}"#);
        assert!(serde_json::from_str::<Money>(r#"{"paise":1.5}"#).is_err());
    }

    #[test]
    fn indian_grouping() {
        assert_eq!(Money::from_rupees(266_746).to_inr_string(), "₹2,66,746");
        assert_eq!(
            Money::from_rupees(53_349_262).to_inr_string(),
            "₹5,33,49,262"
        );
        assert_eq!(Money::from_paise(1_911_888).to_inr_string(), "₹19,118.88");
        assert_eq!(Money::from_rupees(999).to_inr_string(), "₹999");
    }

    #[test]
    fn percent_string_two_places() {
        let r = Rate::unitless(dec!(0.141945), RateKind::Share).unwrap();
        assert_eq!(r.percent_string(2), "14.19");
        let half = Rate::unitless(dec!(0.5), RateKind::Share).unwrap();
        assert_eq!(half.percent_string(2), "50.00");
    }
}
