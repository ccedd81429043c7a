//! Chattering and settling metrics computed from a trace.
//!
//! All series metrics are pure functions over sampled signals. Switch
//! counting and total variation operate on control increments only, so they
//! are invariant to constant offsets and to where the time axis starts.

use crate::sim::Trace;
use std::fmt;

/// Control increments below this magnitude are floating-point noise, not
/// commutations.
pub const DEFAULT_SWITCH_THRESHOLD: f64 = 1e-9;
/// Fraction of the trace tail used for steady-state statistics.
pub const DEFAULT_TAIL_FRACTION: f64 = 0.2;
/// Settling band as a fraction of the step amplitude.
pub const DEFAULT_SETTLING_BAND: f64 = 0.02;

/// Counts commutation events: control increments above `threshold` whose
/// direction differs from the previous counted increment (the first
/// qualifying increment counts as a switch away from rest).
pub fn switch_count(u: &[f64], threshold: f64) -> usize {
    let mut count = 0;
    let mut last_direction = 0i8;
    for pair in u.windows(2) {
        let du = pair[1] - pair[0];
        if du.abs() <= threshold {
            continue;
        }
        let direction = if du > 0.0 { 1 } else { -1 };
        if direction != last_direction {
            count += 1;
            last_direction = direction;
        }
    }
    count
}

/// Total variation `sum |u[i+1] - u[i]|` of the control series.
pub fn total_variation(u: &[f64]) -> f64 {
    u.windows(2).map(|pair| (pair[1] - pair[0]).abs()).sum()
}

/// Earliest time (relative to the series start) after which `|e|` stays
/// within `band * |amplitude|`; `None` when the error never settles.
pub fn settling_time(e: &[f64], t: &[f64], band: f64, amplitude: f64) -> Option<f64> {
    assert_eq!(e.len(), t.len(), "error and time series must align");
    if e.is_empty() {
        return None;
    }
    let tolerance = band * amplitude.abs();
    let mut first_outside_tail = 0;
    for i in (0..e.len()).rev() {
        if e[i].abs() > tolerance {
            first_outside_tail = i + 1;
            break;
        }
    }
    if first_outside_tail < e.len() {
        Some(t[first_outside_tail] - t[0])
    } else {
        None
    }
}

/// Mean and total variation over the final `tail_fraction` of the series.
pub fn steady_window_stats(u: &[f64], tail_fraction: f64) -> (f64, f64) {
    assert!(
        tail_fraction > 0.0 && tail_fraction <= 1.0,
        "tail fraction must lie in (0, 1]"
    );
    if u.is_empty() {
        return (0.0, 0.0);
    }
    let len = ((u.len() as f64 * tail_fraction).ceil() as usize).clamp(1, u.len());
    let tail = &u[u.len() - len..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    (mean, total_variation(tail))
}

/// Summary of one run: commutation activity, settling, and control levels.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub switch_count: usize,
    pub total_variation: f64,
    pub settling_time: Option<f64>,
    pub steady_control_mean: f64,
    pub steady_control_tv: f64,
    pub peak_control: f64,
    pub peak_error: f64,
}

impl MetricsReport {
    /// Computes the report with the default threshold, band, and tail.
    pub fn from_trace(trace: &Trace) -> Self {
        let u = trace.us();
        let e = trace.es();
        let t = trace.ts();
        let (steady_control_mean, steady_control_tv) =
            steady_window_stats(&u, DEFAULT_TAIL_FRACTION);
        Self {
            switch_count: switch_count(&u, DEFAULT_SWITCH_THRESHOLD),
            total_variation: total_variation(&u),
            settling_time: settling_time(
                &e,
                &t,
                DEFAULT_SETTLING_BAND,
                trace.scenario.reference.amplitude,
            ),
            steady_control_mean,
            steady_control_tv,
            peak_control: u.iter().fold(0.0, |acc: f64, v| acc.max(v.abs())),
            peak_error: e.iter().fold(0.0, |acc: f64, v| acc.max(v.abs())),
        }
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "switch_count        {}", self.switch_count)?;
        writeln!(f, "total_variation     {:.6}", self.total_variation)?;
        match self.settling_time {
            Some(t) => writeln!(f, "settling_time       {t:.6}")?,
            None => writeln!(f, "settling_time       none")?,
        }
        writeln!(f, "steady_control_mean {:.6}", self.steady_control_mean)?;
        writeln!(f, "steady_control_tv   {:.6}", self.steady_control_tv)?;
        writeln!(f, "peak_control        {:.6}", self.peak_control)?;
        write!(f, "peak_error          {:.6}", self.peak_error)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn switch_count_counts_direction_reversals() {
        assert_eq!(switch_count(&[1.0, -1.0, 1.0, -1.0], 0.0), 3);
        assert_eq!(switch_count(&[0.4; 10], 0.0), 0);
        assert_eq!(switch_count(&[1.0], 0.0), 0);
        assert_eq!(switch_count(&[], 0.0), 0);
        // a monotone ramp engages once and never reverses
        assert_eq!(switch_count(&[0.0, 1.0, 2.0, 3.0], 0.0), 1);
        // sub-threshold jitter is ignored
        assert_eq!(switch_count(&[0.0, 1e-12, 0.0, 1e-12], 1e-9), 0);
    }

    #[test]
    fn total_variation_sums_increments() {
        assert_relative_eq!(total_variation(&[0.0, 1.0, 0.0]), 2.0);
        let monotone = [0.0, 0.5, 0.7, 2.0, 3.25];
        assert_relative_eq!(
            total_variation(&monotone),
            3.25,
            max_relative = 1e-12
        );
        assert_eq!(total_variation(&[7.0]), 0.0);
    }

    #[test]
    fn settling_time_on_analytic_series() {
        let t: Vec<f64> = (0..=600).map(|i| i as f64 * 0.01).collect();

        let zero = vec![0.0; t.len()];
        assert_eq!(settling_time(&zero, &t, 0.02, 10.0), Some(0.0));

        let never: Vec<f64> = t.iter().map(|_| 5.0).collect();
        assert_eq!(settling_time(&never, &t, 0.02, 10.0), None);

        // e(t) = exp(-t) with a unit amplitude settles at -ln(band)
        let decay: Vec<f64> = t.iter().map(|ti| (-ti).exp()).collect();
        let expect = -(0.02f64).ln();
        let got = settling_time(&decay, &t, 0.02, 1.0).unwrap();
        assert!((got - expect).abs() <= 0.01 + 1e-12, "{got} vs {expect}");
    }

    #[test]
    fn steady_window_stats_examples() {
        let mut u = vec![3.0; 80];
        u.extend(vec![0.4; 20]);
        let (mean, tv) = steady_window_stats(&u, 0.2);
        assert_relative_eq!(mean, 0.4, max_relative = 1e-12);
        assert_eq!(tv, 0.0);

        let alternating: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 2.0 } else { -2.0 }).collect();
        let (mean, tv) = steady_window_stats(&alternating, 0.5);
        assert!(mean.abs() < 0.1);
        assert_relative_eq!(tv, 4.0 * 49.0, max_relative = 1e-12);
    }

    proptest! {
        #[test]
        fn switch_count_is_bounded_and_offset_invariant(
            u in proptest::collection::vec(-5.0..5.0f64, 2..60),
            offset in -10.0..10.0f64,
        ) {
            let count = switch_count(&u, 0.0);
            prop_assert!(count <= u.len() - 1);
            let shifted: Vec<f64> = u.iter().map(|v| v + offset).collect();
            prop_assert_eq!(switch_count(&shifted, 0.0), count);
        }

        #[test]
        fn total_variation_dominates_the_net_change(
            u in proptest::collection::vec(-5.0..5.0f64, 2..60),
            offset in -10.0..10.0f64,
        ) {
            let tv = total_variation(&u);
            prop_assert!(tv >= (u[u.len() - 1] - u[0]).abs() - 1e-12);
            let shifted: Vec<f64> = u.iter().map(|v| v + offset).collect();
            prop_assert!((total_variation(&shifted) - tv).abs() < 1e-9);
        }

        #[test]
        fn settling_time_never_grows_with_a_wider_band(
            e in proptest::collection::vec(-3.0..3.0f64, 2..60),
            band1 in 0.01..0.5f64,
            widen in 1.0..5.0f64,
        ) {
            let t: Vec<f64> = (0..e.len()).map(|i| i as f64 * 0.1).collect();
            let narrow = settling_time(&e, &t, band1, 1.0);
            let wide = settling_time(&e, &t, band1 * widen, 1.0);
            match (narrow, wide) {
                (Some(a), Some(b)) => prop_assert!(b <= a),
                (None, _) => {}
                (Some(_), None) => prop_assert!(false, "widening lost the settle"),
            }
        }

        #[test]
        fn metrics_ignore_where_the_clock_starts(
            e in proptest::collection::vec(-3.0..3.0f64, 2..60),
            shift in -100.0..100.0f64,
        ) {
            let t: Vec<f64> = (0..e.len()).map(|i| i as f64 * 0.1).collect();
            let t_shifted: Vec<f64> = t.iter().map(|v| v + shift).collect();
            let plain = settling_time(&e, &t, 0.02, 1.0);
            let shifted = settling_time(&e, &t_shifted, 0.02, 1.0);
            match (plain, shifted) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-9),
                (a, b) => prop_assert_eq!(a, b),
            }
        }
    }
}
