//! JSON and CSV wire formats.
//!
//! Parsing goes through serde; emission is hand-assembled so identical inputs
//! produce byte-identical output. Every real is printed with 18 significant
//! digits (`{:.17e}`), which round-trips f64 exactly and is stable across
//! platforms.
//!
//! Formats:
//! - matrix: `{"d": n, "entries": [[re, im], ...]}`, row-major, length n^2;
//! - state: `{"d": n, "u": [[re, im], ...]}`, A-basis components;
//! - diagram CSV: header `n_a,n_b,member,max_dim`, one row per cell,
//!   row-major.

use serde::Deserialize;

use crate::bases::TransitionMatrix;
use crate::coinc::{HierarchyReport, UncertaintyDiagram};
use crate::error::{Error, Result};
use crate::kd::{KDDistribution, StateVector, SupportProfile, WitnessOutcome, WitnessRule, WitnessVerdict};
use crate::linalg::{ComplexMatrix, IndexSet, MinorReport, C64};
use crate::oracle::ScanReport;
use crate::perturb::PerturbationTrace;

/// 18-significant-digit scientific notation: exact f64 round-trip, fixed
/// width-ish, valid as a JSON number.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.17e}")
}

fn pair(z: C64) -> String {
    format!("[{},{}]", fmt_f64(z.re), fmt_f64(z.im))
}

fn index_list(s: &IndexSet) -> String {
    let items: Vec<String> = s.members().iter().map(|i| i.to_string()).collect();
    format!("[{}]", items.join(","))
}

// ---------------------------------------------------------------- parsing

#[derive(Deserialize)]
struct MatrixJson {
    d: usize,
    entries: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
struct StateJson {
    d: usize,
    u: Vec<[f64; 2]>,
}

/// Parse `{"d": n, "entries": [[re, im], ...]}` into a raw matrix
/// (no unitarity check here — wrap in TransitionMatrix::new for that).
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let raw: MatrixJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
    if raw.entries.len() != raw.d * raw.d {
        return Err(Error::Parse(format!(
            "matrix JSON: d = {} needs {} entries, got {}",
            raw.d,
            raw.d * raw.d,
            raw.entries.len()
        )));
    }
    let entries = raw.entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
    ComplexMatrix::new(raw.d, raw.d, entries)
}

/// Parse `{"d": n, "u": [[re, im], ...]}` into a normalized state.
pub fn parse_state(text: &str, zero_tol: f64) -> Result<StateVector> {
    let raw: StateJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("state JSON: {e}")))?;
    if raw.u.len() != raw.d {
        return Err(Error::Parse(format!(
            "state JSON: d = {} but {} components",
            raw.d,
            raw.u.len()
        )));
    }
    let u = raw.u.iter().map(|&[re, im]| C64::new(re, im)).collect();
    StateVector::new(u, zero_tol)
}

// --------------------------------------------------------------- emission

pub fn matrix_json(m: &ComplexMatrix) -> String {
    let entries: Vec<String> = m.entries().iter().map(|&z| pair(z)).collect();
    format!("{{\"d\":{},\"entries\":[{}]}}", m.rows(), entries.join(","))
}

pub fn state_json(psi: &StateVector) -> String {
    let comps: Vec<String> = psi.components().iter().map(|&z| pair(z)).collect();
    format!("{{\"d\":{},\"u\":[{}]}}", psi.d(), comps.join(","))
}

pub fn minor_report_json(coinc: bool, rep: &MinorReport) -> String {
    let sizes: Vec<String> = rep
        .per_size
        .iter()
        .map(|c| {
            format!(
                "{{\"size\":{},\"vanishing\":{},\"total\":{},\"min_abs\":{}}}",
                c.size,
                c.vanishing,
                c.total,
                fmt_f64(c.min_abs)
            )
        })
        .collect();
    let largest = match rep.largest_vanishing_size {
        Some(l) => l.to_string(),
        None => "null".into(),
    };
    let first = match &rep.first_vanishing {
        Some((r, c)) => format!(
            "{{\"rows\":{},\"cols\":{}}}",
            index_list(r),
            index_list(c)
        ),
        None => "null".into(),
    };
    format!(
        "{{\"coinc\":{coinc},\"d\":{},\"total_vanishing\":{},\"largest_vanishing_size\":{largest},\"first_vanishing\":{first},\"min_abs_minor\":{},\"per_size\":[{}]}}",
        rep.d,
        rep.total_vanishing,
        fmt_f64(rep.min_abs_minor),
        sizes.join(",")
    )
}

pub fn hierarchy_json(h: &HierarchyReport) -> String {
    let pair = match &h.first_commuting_pair {
        Some((s, t)) => format!("{{\"s\":{},\"t\":{}}}", index_list(s), index_list(t)),
        None => "null".into(),
    };
    format!(
        "{{\"coinc\":{},\"all_projectors_noncommute\":{},\"m_positive\":{},\"max_below_one\":{},\"first_commuting_pair\":{pair}}}",
        h.coinc, h.all_projectors_noncommute, h.m_positive, h.max_below_one
    )
}

pub fn diagram_json(diag: &UncertaintyDiagram) -> String {
    let d = diag.d;
    let member_rows: Vec<String> = (1..=d)
        .map(|na| {
            let row: Vec<String> =
                (1..=d).map(|nb| diag.is_member(na, nb).to_string()).collect();
            format!("[{}]", row.join(","))
        })
        .collect();
    let dim_rows: Vec<String> = (1..=d)
        .map(|na| {
            let row: Vec<String> =
                (1..=d).map(|nb| diag.max_dim_at(na, nb).to_string()).collect();
            format!("[{}]", row.join(","))
        })
        .collect();
    let edge: Vec<String> = diag.lower_edge.iter().map(|e| e.to_string()).collect();
    format!(
        "{{\"d\":{d},\"n_min\":{},\"lower_edge\":[{}],\"member\":[{}],\"max_dim\":[{}]}}",
        diag.n_min,
        edge.join(","),
        member_rows.join(","),
        dim_rows.join(",")
    )
}

pub fn diagram_csv(diag: &UncertaintyDiagram) -> String {
    let mut out = String::from("n_a,n_b,member,max_dim\n");
    for na in 1..=diag.d {
        for nb in 1..=diag.d {
            out.push_str(&format!(
                "{na},{nb},{},{}\n",
                diag.is_member(na, nb),
                diag.max_dim_at(na, nb)
            ));
        }
    }
    out
}

fn witness_rule_name(rule: Option<WitnessRule>) -> &'static str {
    match rule {
        Some(WitnessRule::SparseZeros) => "sparse_zeros",
        Some(WitnessRule::SupportOverZeros) => "support_over_zeros",
        Some(WitnessRule::ThreeHalvesSupport) => "three_halves_support",
        None => "none",
    }
}

pub fn witness_json(w: &WitnessVerdict) -> String {
    let outcome = match w.outcome {
        WitnessOutcome::Nonclassical => "nonclassical",
        WitnessOutcome::Inconclusive => "inconclusive",
    };
    format!(
        "{{\"outcome\":\"{outcome}\",\"rule\":\"{}\",\"details\":{}}}",
        witness_rule_name(w.rule),
        serde_json::to_string(&w.details).expect("string serializes")
    )
}

/// Full per-state report for the `kd` subcommand.
pub fn kd_report_json(
    t: &TransitionMatrix,
    psi: &StateVector,
    kd: &KDDistribution,
    profile: &SupportProfile,
    classical: bool,
    w: &WitnessVerdict,
    entropies: (f64, f64),
) -> String {
    let d = t.d();
    let q_rows: Vec<String> = (0..d)
        .map(|i| {
            let row: Vec<String> = (0..d).map(|j| pair(kd.q.at(i, j))).collect();
            format!("[{}]", row.join(","))
        })
        .collect();
    let row_sums: Vec<String> = (0..d)
        .map(|i| pair((0..d).map(|j| kd.q.at(i, j)).sum::<C64>()))
        .collect();
    let col_sums: Vec<String> = (0..d)
        .map(|j| pair((0..d).map(|i| kd.q.at(i, j)).sum::<C64>()))
        .collect();
    format!(
        "{{\"d\":{d},\"state\":{},\"q\":[{}],\"total\":{},\"min_real\":{},\"max_abs_imag\":{},\"row_sums\":[{}],\"col_sums\":[{}],\"classical\":{classical},\"support\":{{\"s\":{},\"t\":{},\"n_a\":{},\"n_b\":{},\"n_ab\":{}}},\"witness\":{},\"entropy_a\":{},\"entropy_b\":{}}}",
        state_json(psi),
        q_rows.join(","),
        pair(kd.total),
        fmt_f64(kd.min_real),
        fmt_f64(kd.max_abs_imag),
        row_sums.join(","),
        col_sums.join(","),
        index_list(&profile.s),
        index_list(&profile.t),
        profile.n_a,
        profile.n_b,
        profile.n_ab,
        witness_json(w),
        fmt_f64(entropies.0),
        fmt_f64(entropies.1),
    )
}

pub fn trace_json(trace: &PerturbationTrace) -> String {
    let rounds: Vec<String> = trace
        .rounds
        .iter()
        .map(|r| {
            let sigma: Vec<String> = r.sigma.image().iter().map(|i| i.to_string()).collect();
            format!(
                "{{\"sigma\":[{}],\"theta\":{},\"vanishing_before\":{},\"vanishing_after\":{}}}",
                sigma.join(","),
                fmt_f64(r.theta),
                r.vanishing_before,
                r.vanishing_after
            )
        })
        .collect();
    format!(
        "{{\"rounds\":[{}],\"total_deviation\":{}}}",
        rounds.join(","),
        fmt_f64(trace.total_deviation)
    )
}

pub fn scan_json(report: &ScanReport) -> String {
    let hits: Vec<String> = report
        .classical_states
        .iter()
        .map(|h| {
            format!(
                "{{\"n_a\":{},\"n_b\":{},\"basis_vector\":{}}}",
                h.n_a, h.n_b, h.basis_vector
            )
        })
        .collect();
    let cells: Vec<String> = report
        .cell_tallies
        .iter()
        .map(|c| {
            format!(
                "{{\"n_a\":{},\"n_b\":{},\"checked\":{},\"witness_nonclassical\":{}}}",
                c.n_a, c.n_b, c.checked, c.witness_nonclassical
            )
        })
        .collect();
    format!(
        "{{\"seed\":{},\"states_checked\":{},\"violations\":{},\"witness_nonclassical\":{},\"classical_states\":[{}],\"cell_tallies\":[{}]}}",
        report.seed,
        report.states_checked,
        report.violations,
        report.witness_nonclassical,
        hits.join(","),
        cells.join(",")
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{spin1, tao};
    use crate::coinc::uncertainty_diagram;

    #[test]
    fn float_formatting_round_trips() {
        for x in [
            0.0,
            -0.0,
            1.0 / 3.0,
            -2.5e-17,
            1.0 / 6.0_f64.sqrt(),
            std::f64::consts::PI,
            -1.0,
        ] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} -> {s}");
        }
    }

    #[test]
    fn matrix_round_trip_is_byte_identical() {
        let t = tao();
        let once = matrix_json(t.matrix());
        let parsed = parse_matrix(&once).unwrap();
        assert_eq!(parsed, *t.matrix());
        let twice = matrix_json(&parsed);
        assert_eq!(once, twice);
    }

    #[test]
    fn json_is_valid_json() {
        let t = spin1();
        let text = matrix_json(t.matrix());
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["d"], 3);
        assert_eq!(value["entries"].as_array().unwrap().len(), 9);
    }

    #[test]
    fn state_round_trip() {
        let psi = StateVector::normalized(vec![
            C64::new(0.3, -0.4),
            C64::new(0.5, 0.0),
            C64::new(-0.1, 0.7),
        ])
        .unwrap();
        let text = state_json(&psi);
        let back = parse_state(&text, 1e-9).unwrap();
        assert_eq!(back, psi);
    }

    #[test]
    fn parse_rejects_malformed() {
        assert!(matches!(parse_matrix("{"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_matrix("{\"d\":2,\"entries\":[[1,0]]}"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(parse_state("[]", 1e-9), Err(Error::Parse(_))));
    }

    #[test]
    fn diagram_csv_shape() {
        let diag = uncertainty_diagram(&spin1()).unwrap();
        let csv = diagram_csv(&diag);
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 1 + 9);
        assert_eq!(lines[0], "n_a,n_b,member,max_dim");
        assert_eq!(lines[1], "1,1,false,0");
        assert_eq!(lines[2], "1,2,true,1");
    }
}
