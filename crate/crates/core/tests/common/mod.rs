//! Exact oracle over integer-ohm memristances, independent of the library's
//! own comparison code.

#![allow(dead_code)]

use mtlg_core::{GateConfig, TieRule};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub fn conductance(ohms: u64) -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(ohms))
}

/// Exact sums `(g_in, g_t)` for row `row` (x1 is the most significant bit).
pub fn sums(inputs: &[u64], thresholds: &[u64], row: usize) -> (BigRational, BigRational) {
    let n = inputs.len();
    let mut g_in = BigRational::zero();
    for (i, &m) in inputs.iter().enumerate() {
        if (row >> (n - 1 - i)) & 1 == 1 {
            g_in += conductance(m);
        }
    }
    let g_t = thresholds
        .iter()
        .fold(BigRational::zero(), |acc, &m| acc + conductance(m));
    (g_in, g_t)
}

/// CA for one row: strict comparison, with a relative tie band of 1e-9.
pub fn ca(inputs: &[u64], thresholds: &[u64], row: usize, tie: TieRule) -> bool {
    let (g_in, g_t) = sums(inputs, thresholds, row);
    let diff = &g_in - &g_t;
    let scale = if g_in > g_t { g_in } else { g_t };
    let eps = BigRational::new(BigInt::from(1), BigInt::from(1_000_000_000u64));
    if diff.abs() <= eps * scale {
        tie == TieRule::InputWins
    } else {
        diff.is_positive()
    }
}

pub fn table(inputs: &[u64], thresholds: &[u64], tie: TieRule) -> Vec<bool> {
    (0..1usize << inputs.len())
        .map(|row| ca(inputs, thresholds, row, tie))
        .collect()
}

pub fn config(inputs: &[u64], thresholds: &[u64], tie: TieRule) -> GateConfig {
    GateConfig::new(
        inputs.iter().map(|&m| m as f64).collect(),
        thresholds.iter().map(|&m| m as f64).collect(),
    )
    .unwrap()
    .with_tie_rule(tie)
}

pub fn bits(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}
