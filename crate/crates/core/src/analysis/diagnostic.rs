//! Finite-horizon growth diagnostics: per-phase return-mass increments next
//! to the per-phase terms the series criteria are built from. The report
//! makes no verdict; the classifier owns the analytic decision.

use crate::engine::ReturnSeries;

#[derive(Clone, Debug)]
pub struct GrowthRow {
    pub phase: u32,
    pub duration: u64,
    /// Even-time stationary origin mass `p(n)` of the phase's chain.
    pub p_n: f64,
    /// `sum R(t)` over `t in (T_{n-1}, T_n]`.
    pub increment: f64,
    /// `(d(n)-1) p(n) / 2`: the recurrence proof's per-phase floor.
    pub lower_bound: f64,
    /// `2 p(n-1) ceil(d(n)/2)` plus the pre-mixing slack: the transience
    /// proof's per-phase ceiling. Phase 1 is bounded by its length alone.
    pub upper_bound: f64,
}

#[derive(Clone, Debug, Default)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    /// `S(T_n)` at each completed boundary.
    pub s_at_boundary: Vec<(u32, f64)>,
}

impl GrowthReport {
    /// CSV with columns `phase, d_n, p_n, increment, lower_bound, upper_bound`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("phase,d_n,p_n,increment,lower_bound,upper_bound\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.phase, row.duration, row.p_n, row.increment, row.lower_bound, row.upper_bound
            ));
        }
        out
    }
}

/// Builds the growth report for a finished run. `p_by_phase[n-1]` is `p(n)`
/// for each completed phase; `even_mixing_by_phase[n-1]`, when given, is
/// the measured (or bounded) even mixing time of the phase-`n` chain at
/// `epsilon = p(n)` and sharpens the pre-mixing slack of the upper bound.
pub fn series_diagnostic(
    rs: &ReturnSeries<f64>,
    p_by_phase: &[f64],
    even_mixing_by_phase: Option<&[u64]>,
) -> GrowthReport {
    let mut report = GrowthReport::default();
    for &(n, t_n) in &rs.boundaries {
        let idx = (n - 1) as usize;
        if idx >= p_by_phase.len() {
            break;
        }
        let duration = t_n - if n == 1 { 0 } else { rs.boundary_time(n - 1).unwrap_or(0) };
        let increment = match rs.phase_increment(n) {
            Some(v) => v,
            None => break,
        };
        let p_n = p_by_phase[idx];
        let lower = ((duration as f64) - 1.0).max(0.0) * p_n / 2.0;
        let upper = if n == 1 {
            duration as f64
        } else {
            let p_prev = p_by_phase[idx - 1];
            let even_times = duration.div_ceil(2) as f64;
            let slack = match even_mixing_by_phase.and_then(|m| m.get(idx - 1)) {
                Some(&mix_prev) => {
                    let prev_duration = duration_of(rs, n - 1);
                    let uncovered = mix_prev.saturating_sub(prev_duration).div_ceil(2);
                    (uncovered as f64).min(even_times)
                }
                None => 0.0,
            };
            2.0 * p_prev * even_times + slack
        };
        report.rows.push(GrowthRow {
            phase: n,
            duration,
            p_n,
            increment,
            lower_bound: lower,
            upper_bound: upper,
        });
        report.s_at_boundary.push((n, rs.s[t_n as usize]));
    }
    report
}

fn duration_of(rs: &ReturnSeries<f64>, n: u32) -> u64 {
    let end = rs.boundary_time(n).unwrap_or(0);
    let start = if n <= 1 { 0 } else { rs.boundary_time(n - 1).unwrap_or(0) };
    end - start
}
