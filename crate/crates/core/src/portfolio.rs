//! Asset-class allocation under regulatory caps.
//!
//! The greedy fill puts the equity ceiling into equity first, then fills
//! corporate debt up to its cap, then government securities. Short-term debt
//! and alternatives are representable and capped but never filled.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rust_decimal::Decimal;
use rust_decimal_macros::dec;
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, EngineResult};
use crate::money::{Period, Rate, RateKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssetClass {
    Equity,
    CorporateDebt,
    GovernmentSecurities,
    ShortTermDebt,
    Alternative,
}

impl AssetClass {
    pub const ALL: [AssetClass; 5] = [
        AssetClass::Equity,
        AssetClass::CorporateDebt,
        AssetClass::GovernmentSecurities,
        AssetClass::ShortTermDebt,
        AssetClass::Alternative,
    ];

    fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AssetClass::Equity => "equity",
            AssetClass::CorporateDebt => "corporate_debt",
            AssetClass::GovernmentSecurities => "government_securities",
            AssetClass::ShortTermDebt => "short_term_debt",
            AssetClass::Alternative => "alternative",
        }
    }
}

impl fmt::Display for AssetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One decimal fraction per asset class. JSON form is an object of
/// class name to decimal string; absent classes read as zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ClassWeights([Decimal; 5]);

impl ClassWeights {
    pub fn new(pairs: &[(AssetClass, Decimal)]) -> Self {
        let mut w = ClassWeights::default();
        for &(class, v) in pairs {
            w.0[class.index()] = v;
        }
        w
    }

    pub fn get(&self, class: AssetClass) -> Decimal {
        self.0[class.index()]
    }

    pub fn set(&mut self, class: AssetClass, value: Decimal) {
        self.0[class.index()] = value;
    }

    pub fn sum(&self) -> Decimal {
        self.0.iter().copied().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AssetClass, Decimal)> + '_ {
        AssetClass::ALL.iter().map(move |&c| (c, self.get(c)))
    }
}

impl Serialize for ClassWeights {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<&str, String> = self
            .iter()
            .map(|(c, v)| (c.as_str(), v.to_string()))
            .collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ClassWeights {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = BTreeMap::<AssetClass, String>::deserialize(d)?;
        let mut w = ClassWeights::default();
        for (class, s) in raw {
            let v = Decimal::from_str(s.trim())
                .map_err(|e| D::Error::custom(format!("{class}: invalid decimal `{s}`: {e}")))?;
            w.set(class, v);
        }
        Ok(w)
    }
}

/// Per-class maximum weights; their sum must reach 100%.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct CapSet(ClassWeights);

impl<'de> Deserialize<'de> for CapSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = ClassWeights::deserialize(d)?;
        CapSet::new(w).map_err(serde::de::Error::custom)
    }
}

impl CapSet {
    pub fn new(caps: ClassWeights) -> EngineResult<Self> {
        for (class, cap) in caps.iter() {
            if cap < Decimal::ZERO || cap > Decimal::ONE {
                return Err(EngineError::field(
                    format!("caps.{class}"),
                    format!("cap {cap} outside [0, 1]"),
                ));
            }
        }
        if caps.sum() < Decimal::ONE {
            return Err(EngineError::CapsBelowFull(caps.sum().to_string()));
        }
        Ok(CapSet(caps))
    }

    /// G 55%, C 45%, E 15%, short-term debt 10%, alternatives 5%.
    pub fn regulatory_default() -> Self {
        CapSet(ClassWeights::new(&[
            (AssetClass::GovernmentSecurities, dec!(0.55)),
            (AssetClass::CorporateDebt, dec!(0.45)),
            (AssetClass::Equity, dec!(0.15)),
            (AssetClass::ShortTermDebt, dec!(0.10)),
            (AssetClass::Alternative, dec!(0.05)),
        ]))
    }

    pub fn cap(&self, class: AssetClass) -> Decimal {
        self.0.get(class)
    }

    /// Same caps with the equity ceiling replaced. Skips the sum check, which
    /// the greedy fill enforces with its own feasibility test.
    pub fn with_equity_cap(&self, equity_cap: Decimal) -> CapSet {
        let mut w = self.0;
        w.set(AssetClass::Equity, equity_cap);
        CapSet(w)
    }
}

impl Default for CapSet {
    fn default() -> Self {
        CapSet::regulatory_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum AllocationViolation {
    OverCap {
        class: AssetClass,
        weight: String,
        cap: String,
    },
    Negative {
        class: AssetClass,
        weight: String,
    },
    SumNotFull {
        sum: String,
    },
}

impl fmt::Display for AllocationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AllocationViolation::OverCap { class, weight, cap } => {
                write!(f, "{class} weight {weight} exceeds cap {cap}")
            }
            AllocationViolation::Negative { class, weight } => {
                write!(f, "{class} weight {weight} is negative")
            }
            AllocationViolation::SumNotFull { sum } => write!(f, "weights sum to {sum}, not 1"),
        }
    }
}

/// Weights that fully allocate the portfolio within a cap set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PortfolioAllocation(ClassWeights);

impl PortfolioAllocation {
    pub fn new(weights: ClassWeights, caps: &CapSet) -> EngineResult<Self> {
        validate_allocation(&weights, caps).map_err(EngineError::AllocationRejected)?;
        Ok(PortfolioAllocation(weights))
    }

    pub fn weights(&self) -> &ClassWeights {
        &self.0
    }

    pub fn weight(&self, class: AssetClass) -> Rate {
        Rate::from_parts(self.0.get(class), Period::Unitless, RateKind::Share)
    }
}

/// Checks every weight against its cap and the total against 100%.
/// Reports every violation, not just the first.
pub fn validate_allocation(
    weights: &ClassWeights,
    caps: &CapSet,
) -> Result<(), Vec<AllocationViolation>> {
    let mut violations = Vec::new();
    for (class, w) in weights.iter() {
        if w < Decimal::ZERO {
            violations.push(AllocationViolation::Negative {
                class,
                weight: w.to_string(),
            });
        } else if w > caps.cap(class) {
            violations.push(AllocationViolation::OverCap {
                class,
                weight: w.to_string(),
                cap: caps.cap(class).to_string(),
            });
        }
    }
    if weights.sum() != Decimal::ONE {
        violations.push(AllocationViolation::SumNotFull {
            sum: weights.sum().to_string(),
        });
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

pub fn greedy_allocate(equity_cap: Rate, caps: &CapSet) -> EngineResult<PortfolioAllocation> {
    let e = equity_cap.value();
    if e > Decimal::ONE {
        return Err(EngineError::field(
            "equity_cap",
            format!("{equity_cap} exceeds 100%"),
        ));
    }
    let c_cap = caps.cap(AssetClass::CorporateDebt);
    let g_cap = caps.cap(AssetClass::GovernmentSecurities);
    if e + c_cap + g_cap < Decimal::ONE {
        return Err(EngineError::InfeasibleAllocation(format!(
            "equity {e} + corporate debt {c_cap} + government securities {g_cap} < 1"
        )));
    }
    let c = c_cap.min(Decimal::ONE - e);
    let g = g_cap.min(Decimal::ONE - e - c);
    let weights = ClassWeights::new(&[
        (AssetClass::Equity, e),
        (AssetClass::CorporateDebt, c),
        (AssetClass::GovernmentSecurities, g),
    ]);
    PortfolioAllocation::new(weights, &caps.with_equity_cap(e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LifecycleFund {
    /// Auto-choice default, held at the regulatory equity cap.
    Default,
    Conservative,
    Moderate,
    Aggressive,
}

impl LifecycleFund {
    /// In ascending equity order.
    pub const ALL: [LifecycleFund; 4] = [
        LifecycleFund::Default,
        LifecycleFund::Conservative,
        LifecycleFund::Moderate,
        LifecycleFund::Aggressive,
    ];

    pub fn equity_cap(self) -> Rate {
        let v = match self {
            LifecycleFund::Default => dec!(0.15),
            LifecycleFund::Conservative => dec!(0.25),
            LifecycleFund::Moderate => dec!(0.50),
            LifecycleFund::Aggressive => dec!(0.75),
        };
        Rate::from_parts(v, Period::Unitless, RateKind::Share)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LifecycleFund::Default => "default",
            LifecycleFund::Conservative => "conservative",
            LifecycleFund::Moderate => "moderate",
            LifecycleFund::Aggressive => "aggressive",
        }
    }
}

impl FromStr for LifecycleFund {
    type Err = EngineError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LifecycleFund::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| EngineError::field("lifecycle", format!("unknown fund `{s}`")))
    }
}

impl fmt::Display for LifecycleFund {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Expected annual return per class. Classes left undefined cannot carry
/// weight in [`weighted_return`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpectedReturns([Option<Decimal>; 5]);

impl ExpectedReturns {
    pub fn new(pairs: &[(AssetClass, Decimal)]) -> EngineResult<Self> {
        let mut r = ExpectedReturns([None; 5]);
        for &(class, v) in pairs {
            if v < Decimal::ZERO {
                return Err(EngineError::field(
                    format!("expected_returns.{class}"),
                    "must be non-negative",
                ));
            }
            r.0[class.index()] = Some(v);
        }
        Ok(r)
    }

    pub fn get(&self, class: AssetClass) -> Option<Decimal> {
        self.0[class.index()]
    }

    fn defined(&self) -> impl Iterator<Item = Decimal> + '_ {
        self.0.iter().flatten().copied()
    }
}

impl Default for ExpectedReturns {
    /// Equity 10%, corporate debt 8%, government securities 7%.
    fn default() -> Self {
        ExpectedReturns([
            Some(dec!(0.10)),
            Some(dec!(0.08)),
            Some(dec!(0.07)),
            None,
            None,
        ])
    }
}

impl Serialize for ExpectedReturns {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<&str, String> = AssetClass::ALL
            .iter()
            .filter_map(|&c| self.get(c).map(|v| (c.as_str(), v.to_string())))
            .collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExpectedReturns {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = BTreeMap::<AssetClass, String>::deserialize(d)?;
        let mut pairs = Vec::with_capacity(raw.len());
        for (class, s) in raw {
            let v = Decimal::from_str(s.trim())
                .map_err(|e| D::Error::custom(format!("{class}: invalid decimal `{s}`: {e}")))?;
            pairs.push((class, v));
        }
        ExpectedReturns::new(&pairs).map_err(D::Error::custom)
    }
}

/// `Σ wᵢ·rᵢ / Σ wᵢ` as an annual return.
pub fn weighted_return(
    alloc: &PortfolioAllocation,
    returns: &ExpectedReturns,
) -> EngineResult<Rate> {
    let mut numerator = Decimal::ZERO;
    for (class, w) in alloc.weights().iter() {
        if w.is_zero() {
            continue;
        }
        let r = returns
            .get(class)
            .ok_or(EngineError::MissingReturn(class))?;
        numerator += w * r;
    }
    let denominator = alloc.weights().sum();
    if denominator.is_zero() {
        return Err(EngineError::DivisionByZero("allocation weights"));
    }
    Rate::per_year(numerator / denominator, RateKind::Return)
}

/// Range spanned by the defined expected returns.
pub fn return_bounds(returns: &ExpectedReturns) -> Option<(Decimal, Decimal)> {
    let min = returns.defined().min()?;
    let max = returns.defined().max()?;
    Some((min, max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use AssetClass::*;

    fn share(v: Decimal) -> Rate {
        Rate::unitless(v, RateKind::Share).unwrap()
    }

    fn ecg(e: Decimal, c: Decimal, g: Decimal) -> ClassWeights {
        ClassWeights::new(&[(Equity, e), (CorporateDebt, c), (GovernmentSecurities, g)])
    }

    #[test]
    fn default_caps_accept_regulatory_fill() {
        let caps = CapSet::regulatory_default();
        assert!(validate_allocation(&ecg(dec!(0.15), dec!(0.45), dec!(0.40)), &caps).is_ok());
    }

    #[test]
    fn one_point_equity_breach() {
        let caps = CapSet::regulatory_default();
        let v = validate_allocation(&ecg(dec!(0.16), dec!(0.45), dec!(0.39)), &caps).unwrap_err();
        assert_eq!(v.len(), 1);
        assert!(matches!(
            v[0],
            AllocationViolation::OverCap { class: Equity, .. }
        ));
    }

    #[test]
    fn underallocation_reported() {
        let caps = CapSet::regulatory_default();
        let v = validate_allocation(&ecg(dec!(0.10), dec!(0.10), dec!(0.10)), &caps).unwrap_err();
        assert_eq!(
            v,
            vec![AllocationViolation::SumNotFull { sum: "0.30".into() }]
        );
    }

    #[test]
    fn greedy_fills_in_order() {
        let caps = CapSet::regulatory_default();
        for (e, c, g) in [
            (dec!(0.75), dec!(0.25), dec!(0)),
            (dec!(0.15), dec!(0.45), dec!(0.40)),
            (dec!(0.50), dec!(0.45), dec!(0.05)),
            (dec!(0.25), dec!(0.45), dec!(0.30)),
        ] {
            let a = greedy_allocate(share(e), &caps).unwrap();
            assert_eq!(*a.weights(), ecg(e, c, g), "equity cap {e}");
        }
    }

    #[test]
    fn greedy_reports_infeasibility() {
        let caps = CapSet::regulatory_default();
        // 0% equity leaves 45% + 55% = 100%: still feasible.
        assert!(greedy_allocate(share(dec!(0)), &caps).is_ok());
        let tight = CapSet::new(ClassWeights::new(&[
            (Equity, dec!(0.15)),
            (CorporateDebt, dec!(0.30)),
            (GovernmentSecurities, dec!(0.40)),
            (ShortTermDebt, dec!(0.10)),
            (Alternative, dec!(0.05)),
        ]))
        .unwrap();
        assert!(matches!(
            greedy_allocate(share(dec!(0.15)), &tight),
            Err(EngineError::InfeasibleAllocation(_))
        ));
        assert!(greedy_allocate(share(dec!(1.2)), &caps).is_err());
    }

    #[test]
    fn caps_below_full_rejected() {
        let err = CapSet::new(ClassWeights::new(&[(Equity, dec!(0.5))])).unwrap_err();
        assert!(matches!(err, EngineError::CapsBelowFull(_)));
    }

    #[test]
    fn weighted_returns_match_hand_oracle() {
        let caps = CapSet::regulatory_default();
        let returns = ExpectedReturns::default();
        let all_equity = PortfolioAllocation(ClassWeights::new(&[(Equity, dec!(1))]));
        assert_eq!(
            weighted_return(&all_equity, &returns).unwrap().value(),
            dec!(0.10)
        );
        // 0.15·10 + 0.45·8 + 0.40·7 = 7.90; 0.25·10 + 0.45·8 + 0.30·7 = 8.20;
        // 0.50·10 + 0.45·8 + 0.05·7 = 8.95; 0.75·10 + 0.25·8 = 9.50.
        for (fund, expected) in [
            (LifecycleFund::Default, dec!(0.079)),
            (LifecycleFund::Conservative, dec!(0.082)),
            (LifecycleFund::Moderate, dec!(0.0895)),
            (LifecycleFund::Aggressive, dec!(0.095)),
        ] {
            let a = greedy_allocate(fund.equity_cap(), &caps).unwrap();
            assert_eq!(
                weighted_return(&a, &returns).unwrap().value(),
                expected,
                "{fund}"
            );
        }
    }

    #[test]
    fn weighting_undefined_class_errors() {
        let a = PortfolioAllocation(ClassWeights::new(&[
            (CorporateDebt, dec!(0.45)),
            (GovernmentSecurities, dec!(0.45)),
            (ShortTermDebt, dec!(0.10)),
        ]));
        assert_eq!(
            weighted_return(&a, &ExpectedReturns::default()),
            Err(EngineError::MissingReturn(ShortTermDebt))
        );
    }

    #[test]
    fn weights_json_shape() {
        let a = greedy_allocate(share(dec!(0.15)), &CapSet::regulatory_default()).unwrap();
        let json = serde_json::to_value(a).unwrap();
        assert_eq!(json["equity"], "0.15");
        assert_eq!(json["alternative"], "0");
        let back: ClassWeights = serde_json::from_str(r#"{"equity":"1"}"#).unwrap();
        assert_eq!(back.get(Equity), dec!(1));
        assert!(serde_json::from_str::<ClassWeights>(r#"{"gold":"1"}"#).is_err());
    }

    #[test]
    fn fund_names_parse() {
        assert_eq!(
            "Aggressive".parse::<LifecycleFund>().unwrap(),
            LifecycleFund::Aggressive
        );
        assert!("balanced".parse::<LifecycleFund>().is_err());
    }
}
