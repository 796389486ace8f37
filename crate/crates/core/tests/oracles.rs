mod common;

use mtlg_core::device::{program_to_target, quantize, DeviceModel, MemristorState, PulseSpec};
use mtlg_core::synth::{check_separability, verify_config, Witness};
use mtlg_core::transient::{settle_time, Settle, TransientParams};
use mtlg_core::{InputVector, Tap, TieRule, TruthTable, VoltageLevels};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use common::{config, sums};

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap()
}

#[test]
fn and_gate_branch_currents() {
    let (m, th) = ([60_500, 60_000], [33_000]);
    let g = config(&m, &th, TieRule::InputWins);
    let v_dd = ratio(65, 100);
    let (g_in, g_t) = sums(&m, &th, 0b11);
    let i_in = to_f64(&(&v_dd * &g_in));
    let i_th = to_f64(&(&v_dd * &g_t));
    let c = g
        .branch_currents(&InputVector::parse("11").unwrap())
        .unwrap();
    assert!((c.i_in - i_in).abs() <= 1e-15 * i_in);
    assert!((c.i_th - i_th).abs() <= 1e-15 * i_th);
    assert!((i_in - 21.577e-6).abs() < 5e-10);
    assert!((i_th - 19.697e-6).abs() < 5e-10);

    let parallel = to_f64(&g_in.recip());
    assert!((parallel - 30_124.48).abs() < 0.01, "{parallel}");
}

#[test]
fn or_gate_single_input_current() {
    let (m, th) = ([33_800, 18_300], [41_600]);
    let v_dd = ratio(65, 100);
    let (g_in, g_t) = sums(&m, &th, 0b01);
    assert!((to_f64(&(&v_dd * g_in)) - 35.519e-6).abs() < 1e-9);
    assert!((to_f64(&(v_dd * g_t)) - 15.625e-6).abs() < 1e-10);
}

#[test]
fn and_gate_worst_margin() {
    let (m, th) = ([60_500, 60_000], [33_000]);
    let (g_in, g_t) = sums(&m, &th, 0b11);
    let expected = to_f64(&((g_in - &g_t) / g_t));
    let report = verify_config(
        &config(&m, &th, TieRule::InputWins),
        &TruthTable::named("AND", 2).unwrap(),
        Tap::Ca,
    )
    .unwrap();
    assert!(report.pass);
    assert!((report.worst_margin - expected).abs() < 1e-12);
    assert!((expected - 0.09545).abs() < 5e-5, "{expected}");
}

#[test]
fn and_gate_settle_time() {
    let (m, th) = ([60_500, 60_000], [33_000]);
    let g = config(&m, &th, TieRule::InputWins);
    let c = g
        .branch_currents(&InputVector::parse("11").unwrap())
        .unwrap();
    let params = TransientParams::default();
    let dv0 = c.delta().abs() * params.r_sense;
    assert!((dv0 - 18.80e-3).abs() < 5e-6, "{dv0}");
    let expected = 100e-9 * (0.325 / dv0).ln();
    let Settle::Resolved(t) = settle_time(c.delta(), &params, &VoltageLevels::default()) else {
        panic!("AND (1,1) must resolve");
    };
    assert!((t - expected).abs() < 1e-15);
    assert!((t - 285e-9).abs() < 1e-9, "{t}");
}

#[test]
fn settle_time_edges() {
    let params = TransientParams::default();
    let levels = VoltageLevels::default();
    assert_eq!(settle_time(0.0, &params, &levels), Settle::Unresolved);
    let half = levels.v_dd / 2.0 / params.r_sense;
    assert_eq!(settle_time(half, &params, &levels), Settle::Resolved(0.0));
    assert_eq!(
        settle_time(-half * 3.0, &params, &levels),
        Settle::Resolved(0.0)
    );
    assert_eq!(settle_time(0.99e-10, &params, &levels), Settle::Unresolved);
}

/// Brute-force nearest level in exact conductance arithmetic.
fn nearest_level(target: i64, model: &DeviceModel) -> usize {
    let (r_min, r_max) = (model.r_min as i64, model.r_max as i64);
    let steps = (model.levels() - 1) as i64;
    let g_min = ratio(1, r_max);
    let g_max = ratio(1, r_min);
    let g = ratio(1, target);
    (0..model.levels())
        .map(|k| {
            let gk = &g_min + (&g_max - &g_min) * ratio(k as i64, steps);
            ((gk - &g).abs(), k)
        })
        .min()
        .unwrap()
        .1
}

#[test]
fn quantize_33k() {
    let model = DeviceModel::kohm();
    let (k, r) = quantize(33e3, &model).unwrap();
    assert_eq!(k, nearest_level(33_000, &model));
    assert_eq!(k, 7);
    let steps = ratio(7, 31);
    let exact = (ratio(1, 100_000) + (ratio(1, 10_000) - ratio(1, 100_000)) * steps).recip();
    assert!((r - to_f64(&exact)).abs() < 1e-9);
    assert!((r - 32_978.7).abs() < 0.05, "{r}");
}

#[test]
fn quantize_matches_brute_force_over_range() {
    let model = DeviceModel::kohm();
    for target in (10_000..=100_000).step_by(137) {
        let (k, _) = quantize(target as f64, &model).unwrap();
        assert_eq!(k, nearest_level(target, &model), "target {target}");
    }
}

#[test]
fn geometric_bound_to_r_min() {
    let model = DeviceModel::kohm();
    // (1 - f)^k (r_max - r_min) <= 0.01 r_min  =>  k >= ln(900) / ln(1/0.9)
    let bound = ((model.r_max - model.r_min) / (0.01 * model.r_min)).ln()
        / (1.0 / (1.0 - model.step_fraction)).ln();
    assert_eq!(bound.ceil() as usize, 65);

    let mut state = MemristorState::reset(model).unwrap();
    let mut pulses = 0;
    while state.resistance() > 1.01 * model.r_min {
        state = state.apply_pulse(PulseSpec::volts(model.v_set));
        pulses += 1;
    }
    assert_eq!(pulses, 65);

    let report = program_to_target(
        MemristorState::reset(model).unwrap(),
        model.r_min,
        0.01,
        200,
    )
    .unwrap();
    assert!(report.pulses() <= 65, "{}", report.pulses());
}

#[test]
fn programming_example_33k() {
    let model = DeviceModel::kohm();
    let report = program_to_target(MemristorState::reset(model).unwrap(), 33e3, 0.01, 200).unwrap();
    let r = report.state.resistance();
    assert!((32_670.0..=33_330.0).contains(&r), "{r}");
}

#[test]
fn xor_witness_is_the_cross_pair() {
    let xor = TruthTable::named("XOR", 2).unwrap();
    let sep = check_separability(&xor).unwrap();
    let Some(Witness::Asummable { ones, zeros }) = sep.witness() else {
        panic!("{sep:?}");
    };
    let mut ones: Vec<String> = ones.iter().map(|v| v.to_string()).collect();
    let mut zeros: Vec<String> = zeros.iter().map(|v| v.to_string()).collect();
    ones.sort();
    zeros.sort();
    assert_eq!(ones, ["(0,1)", "(1,0)"]);
    assert_eq!(zeros, ["(0,0)", "(1,1)"]);
}

#[test]
fn xnor_and_nand_need_current_at_zero_input() {
    for name in ["XNOR", "NAND", "NOR", "CONST1"] {
        let sep = check_separability(&TruthTable::named(name, 2).unwrap()).unwrap();
        assert!(
            matches!(sep.witness(), Some(Witness::ZeroInputHigh { n: 2 })),
            "{name}"
        );
    }
}
