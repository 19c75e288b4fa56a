//! One line per acceptance criterion. Criteria 2 and 3 compare against
//! reference claims that do not hold as stated (see README); they are
//! reported as FAIL and expected to stay that way. Any other change in the
//! set of failures fails this target.

use std::collections::BTreeSet;
use std::process::ExitCode;

use pvsym_core::checks::{criterion, Check};
use serde_json::Value;

const KNOWN_RED: [u8; 2] = [2, 3];
const SEED: u64 = 20240;

fn summary(n: u8, c: &Check) -> String {
    let d = &c.detail;
    match n {
        2 => format!("failed lines {}, series vs ODE max {:.1e}", d["failed_lines"], d["series_vs_ode_max"].as_f64().unwrap_or(f64::NAN)),
        3 => format!("{} of {} generator images exact ({} per (F, beta) pair)", d["exact"], d["total"], d["per_pair"].as_str().unwrap_or("?")),
        4 => format!(
            "dim 1: {} classes, {} trials, {} failures; dim 2: {} classes, {} trials, {} failures",
            d["dim1"]["classes"], d["dim1"]["trials"], d["dim1"]["failures"], d["dim2"]["classes"], d["dim2"]["trials"], d["dim2"]["failures"]
        ),
        5 => {
            let rows = d["rows"].as_array().map(Vec::as_slice).unwrap_or_default();
            let worst = rows.iter().filter_map(|r| r["max_rel_mismatch"].as_f64()).fold(0.0, f64::max);
            format!("{} case/function pairs, worst mismatch {worst:.1e}, case 7 non-reducible: {}", rows.len(), d["case7_non_reducible"])
        }
        6 => {
            let rows = d["rows"].as_array().map(Vec::as_slice).unwrap_or_default();
            let worst = rows.iter().filter_map(|r| r["residual_max_abs"].as_f64()).fold(0.0, f64::max);
            format!("{} solutions, worst residual {worst:.1e}", rows.len())
        }
        7 => {
            let get = |k: &str| d[k]["value"].clone();
            format!(
                "stationary {}, rossby {}, orders {}, dE {}, dZ {}",
                short(&get("stationary_drift")),
                short(&get("rossby_error")),
                get("temporal_order"),
                short(&get("energy_drift")),
                short(&get("enstrophy_drift"))
            )
        }
        8 => format!("relative difference {}", short(&d["rel_diff"])),
        _ => String::new(),
    }
}

fn short(v: &Value) -> String {
    v.as_f64().map(|x| format!("{x:.2e}")).unwrap_or_else(|| v.to_string())
}

fn main() -> ExitCode {
    let mut failing = BTreeSet::new();
    for n in 1..=8u8 {
        let c = criterion(n, SEED).expect("criteria 1 to 8 exist");
        let status = if c.passed { "PASS" } else { "FAIL" };
        if !c.passed {
            failing.insert(n);
        }
        println!("criterion {n}: {status}  {} [{:.2}s]  {}", c.name, c.seconds, summary(n, &c));
    }
    let known: BTreeSet<u8> = KNOWN_RED.into_iter().collect();
    if failing == known {
        println!("acceptance: failing set {failing:?} matches the documented discrepancies");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing set {failing:?} differs from documented {known:?}");
        ExitCode::FAILURE
    }
}
