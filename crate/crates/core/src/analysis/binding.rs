use serde::{Deserialize, Serialize};

use super::report::SecurityReport;

/// Additive slack on both sides of the sandwich.
pub const EQ5_SLACK: f64 = 1e-9;

/// `(4(1 − p)², 2√(p(1 − p)))` for Bob's cheating probability `p`.
pub fn eq5_bounds(p_b: f64) -> (f64, f64) {
    let q = 1.0 - p_b;
    (4.0 * q * q, 2.0 * (p_b * q).max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BindingCheck {
    pub p_b: f64,
    pub p_a: f64,
    pub lower: f64,
    pub upper: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

impl BindingCheck {
    pub fn passed(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

/// Checks `4(1 − P_B)² ≤ P_A ≤ 2√(P_B(1 − P_B))` for a report from the
/// no-checking attack, using the analytic `P_B`.
pub fn binding_bounds_check(report: &SecurityReport) -> BindingCheck {
    check_pair(report.p_b_analytic, report.p_a)
}

pub fn check_pair(p_b: f64, p_a: f64) -> BindingCheck {
    let (lower, upper) = eq5_bounds(p_b);
    BindingCheck {
        p_b,
        p_a,
        lower,
        upper,
        lower_ok: lower <= p_a + EQ5_SLACK,
        upper_ok: p_a <= upper + EQ5_SLACK,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        assert_eq!(eq5_bounds(0.5), (1.0, 1.0));
        assert_eq!(eq5_bounds(1.0), (0.0, 0.0));
        assert!(check_pair(0.5, 1.0).passed());
        assert!(!check_pair(0.5, 0.9).passed());
        assert!(check_pair(1.0, 0.0).passed());
    }

    #[test]
    fn lower_never_exceeds_upper() {
        for i in 0..=100 {
            let p = 0.5 + 0.005 * i as f64;
            let (lo, hi) = eq5_bounds(p);
            assert!(lo <= hi + 1e-15, "p = {p}");
        }
    }
}
