//! Degree-distribution trajectories and their CSV form, shared by the
//! finite-length decoder trace and the density-evolution integrators:
//!
//! `t,e,l_2,...,l_cap,r_1,...,r_max,shared_event`
//!
//! All fractions are in units of the original edge count. The `l_cap` column
//! carries the mass of every degree `>= cap`. For decoder traces
//! `shared_event` is 0/1; for integrated trajectories it holds `p_B`.

use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub e: f64,
    /// `l[i]` = edge fraction with left degree `i`.
    pub l: Vec<f64>,
    /// `r[i]` = edge fraction with right degree `i`.
    pub r: Vec<f64>,
    pub shared: f64,
}

/// `%.{digits}g`-style formatting.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let p = digits.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let strip = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= p as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip(mantissa), exp.abs())
    } else {
        strip(&format!("{:.*}", (p as i32 - 1 - exp) as usize, x))
    }
}

/// Renders rows as CSV. `max_cap` bounds the number of left-degree columns.
pub fn trajectory_csv(rows: &[TrajectoryRow], max_cap: usize) -> String {
    let observed_cap = rows
        .iter()
        .filter_map(|row| row.l.iter().rposition(|&x| x > 0.0))
        .max()
        .unwrap_or(2);
    let cap = observed_cap.clamp(2, max_cap.max(2));
    let r_max = rows
        .iter()
        .filter_map(|row| row.r.iter().rposition(|&x| x > 0.0))
        .max()
        .unwrap_or(1)
        .max(1);

    let mut out = String::from("t,e");
    for i in 2..=cap {
        write!(out, ",l_{i}").unwrap();
    }
    for i in 1..=r_max {
        write!(out, ",r_{i}").unwrap();
    }
    out.push_str(",shared_event\n");
    for row in rows {
        write!(out, "{},{}", format_sig(row.t, 9), format_sig(row.e, 9)).unwrap();
        for i in 2..cap {
            write!(out, ",{}", format_sig(row.l.get(i).copied().unwrap_or(0.0), 9)).unwrap();
        }
        let tail: f64 = row.l.iter().skip(cap).sum();
        write!(out, ",{}", format_sig(tail, 9)).unwrap();
        for i in 1..=r_max {
            write!(out, ",{}", format_sig(row.r.get(i).copied().unwrap_or(0.0), 9)).unwrap();
        }
        writeln!(out, ",{}", format_sig(row.shared, 9)).unwrap();
    }
    out
}
