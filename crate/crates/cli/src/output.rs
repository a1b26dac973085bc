use std::fmt::Write;

use pensionlab_core::{ProjectionResult, Scheme, SweepTable};
use rust_decimal::Decimal;
use serde::Serialize;

pub fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("engine types serialize")
}

fn row(out: &mut String, label: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{label:<22} {value}");
}

pub fn projection_table(r: &ProjectionResult) -> String {
    let mut out = String::new();
    let scheme = match r.scheme {
        Scheme::Ops => "OPS",
        Scheme::Nps => "NPS",
    };
    row(&mut out, "scheme", scheme);
    row(&mut out, "last drawn salary", r.last_drawn_salary);
    row(&mut out, "monthly pension", r.monthly_pension);
    row(
        &mut out,
        "replacement ratio",
        r.replacement_ratio_percent
            .as_deref()
            .map(|p| format!("{p}%"))
            .unwrap_or_else(|| "n/a".into()),
    );
    if let Some(b) = &r.breakdown {
        row(&mut out, "corpus", b.corpus);
        row(
            &mut out,
            &format!("lumpsum ({})", b.lumpsum_share),
            b.lumpsum,
        );
        row(
            &mut out,
            &format!("annuity ({})", b.annuity_share),
            b.annuity_principal,
        );
        row(&mut out, "convention", r.convention);
    }
    if let Some(c) = r.monthly_contribution {
        row(&mut out, "monthly contribution", c);
    }
    if let Some(f) = r.lifecycle {
        row(&mut out, "lifecycle fund", f);
    }
    if let Some(rate) = r.annual_return {
        row(&mut out, "annual return", rate);
    }
    if let Some(rate) = r.annuity_rate {
        row(&mut out, "annuity rate", rate);
    }
    out
}

pub fn sweep_table(t: &SweepTable) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<14} {:>14} {:>18} {:>10} {:>8}",
        t.parameter, "pension", "corpus", "ratio", "return"
    );
    for r in &t.rows {
        match (&r.result, &r.error) {
            (Some(p), _) => {
                let _ = writeln!(
                    out,
                    "{:<14} {:>14} {:>18} {:>10} {:>8}",
                    r.value,
                    p.monthly_pension.to_string(),
                    p.corpus().map(|c| c.to_string()).unwrap_or_default(),
                    p.replacement_ratio_percent
                        .as_deref()
                        .map(|s| format!("{s}%"))
                        .unwrap_or_default(),
                    p.annual_return
                        .map(|a| a.percent_string(2))
                        .unwrap_or_default(),
                );
            }
            (None, Some(e)) => {
                let _ = writeln!(out, "{:<14} error: {}", r.value, e.message);
            }
            (None, None) => {}
        }
    }
    let _ = writeln!(out, "convention: {}", t.metadata.convention);
    out
}

/// `"0.40"` to `"40"`.
pub fn share_percent_label(fraction: &str) -> String {
    fraction
        .parse::<Decimal>()
        .map(|d| (d * Decimal::ONE_HUNDRED).normalize().to_string())
        .unwrap_or_else(|_| fraction.to_string())
}
