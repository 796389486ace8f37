//! Exact rational evaluation of conductance comparisons.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

use crate::gate::{GateConfig, TieRule};

/// The exact value of a finite `f64`.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

fn tie_epsilon() -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from_u64(1_000_000_000).unwrap())
}

/// Exact conductance sums for one row: `(sum over active inputs, threshold)`.
pub fn conductance_sums(config: &GateConfig, row: usize) -> (BigRational, BigRational) {
    let n = config.n_inputs();
    let mut g_in = BigRational::zero();
    for (i, &m) in config.input_memristances().iter().enumerate() {
        if (row >> (n - 1 - i)) & 1 == 1 {
            g_in += rational(m).recip();
        }
    }
    let mut g_t = BigRational::zero();
    for (&m, &on) in config
        .threshold_memristances()
        .iter()
        .zip(config.threshold_mask())
    {
        if on {
            g_t += rational(m).recip();
        }
    }
    (g_in, g_t)
}

/// Exact counterpart of [`crate::gate::input_wins`].
pub fn input_wins(g_in: &BigRational, g_t: &BigRational, tie: TieRule) -> bool {
    let diff = g_in - g_t;
    let scale = if g_in.abs() > g_t.abs() {
        g_in.abs()
    } else {
        g_t.abs()
    };
    if diff.abs() <= tie_epsilon() * scale {
        tie == TieRule::InputWins
    } else {
        diff.is_positive()
    }
}

/// Signed relative margin of a row: positive when the row lands on the side
/// given by `want_ca`.
pub fn relative_margin(g_in: &BigRational, g_t: &BigRational, want_ca: bool) -> f64 {
    if g_t.is_zero() {
        return if want_ca == g_in.is_positive() {
            f64::INFINITY
        } else {
            0.0
        };
    }
    let m = (g_in - g_t) / g_t;
    let m = if want_ca { m } else { -m };
    m.to_f64().unwrap_or(f64::NAN)
}
