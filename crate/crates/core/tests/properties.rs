mod common;

use mtlg_core::device::{quantize, DeviceModel, MemristorState, PulseSpec, READ_VOLTAGE};
use mtlg_core::netlist::{Netlist, Source};
use mtlg_core::synth::{check_separability, synthesize, verify, SynthesisSpec};
use mtlg_core::transient::{settle_time, simulate, ClockSpec, Settle, TransientParams};
use mtlg_core::{InputVector, Tap, TieRule, TruthTable, VoltageLevels};
use proptest::prelude::*;

use common::{config, table};

fn tie_rule() -> impl Strategy<Value = TieRule> {
    prop_oneof![Just(TieRule::InputWins), Just(TieRule::ThresholdWins)]
}

/// Memristances on a 1 kΩ grid, 1 to 4 inputs and 1 to 2 threshold elements.
fn gate() -> impl Strategy<Value = (Vec<u64>, Vec<u64>, TieRule)> {
    (
        prop::collection::vec(1u64..=64, 1..=4),
        prop::collection::vec(1u64..=64, 1..=2),
        tie_rule(),
    )
        .prop_map(|(m, th, tie)| {
            (
                m.into_iter().map(|k| k * 1000).collect(),
                th.into_iter().map(|k| k * 1000).collect(),
                tie,
            )
        })
}

fn outputs(m: &[u64], th: &[u64], tie: TieRule) -> Vec<bool> {
    config(m, th, tie).truth_table().unwrap().outputs().to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn matches_exact_oracle((m, th, tie) in gate()) {
        prop_assert_eq!(outputs(&m, &th, tie), table(&m, &th, tie));
    }

    #[test]
    fn co_is_complement_of_ca((m, th, tie) in gate()) {
        let g = config(&m, &th, tie);
        for row in 0..1usize << m.len() {
            let out = g.evaluate(&InputVector::from_index(row, m.len())).unwrap();
            prop_assert_eq!(out.co, !out.ca);
        }
    }

    #[test]
    fn input_monotone((m, th, tie) in gate()) {
        let tt = outputs(&m, &th, tie);
        let n = m.len();
        for row in 0..1usize << n {
            for i in 0..n {
                let bit = 1 << i;
                if row & bit == 0 {
                    prop_assert!(!tt[row] || tt[row | bit]);
                }
            }
        }
        prop_assert!(!tt[0]);
    }

    #[test]
    fn scale_invariant((m, th, tie) in gate(), exp in -2.0f64..=2.0) {
        let g = config(&m, &th, tie);
        let lambda = 10f64.powf(exp);
        prop_assert_eq!(
            g.scaled(lambda).unwrap().truth_table().unwrap(),
            g.truth_table().unwrap()
        );
    }

    #[test]
    fn raising_threshold_only_turns_outputs_on(
        (m, th, tie) in gate(),
        which in any::<prop::sample::Index>(),
        bump in 1u64..=32,
    ) {
        let mut higher = th.clone();
        higher[which.index(th.len())] += bump * 1000;
        let before = outputs(&m, &th, tie);
        let after = outputs(&m, &higher, tie);
        for (a, b) in before.iter().zip(&after) {
            prop_assert!(!a || *b);
        }
    }

    #[test]
    fn single_gate_netlist_matches_gate((m, th, tie) in gate()) {
        let g = config(&m, &th, tie);
        let mut net = Netlist::new(m.len());
        let id = net.add_gate("G", g.clone());
        for slot in 0..m.len() {
            net.connect(Source::Primary(slot), id, slot);
        }
        net.add_output(id, Tap::Ca);
        net.add_output(id, Tap::Co);
        let tables = net.network_truth_table().unwrap();
        let tt = g.truth_table().unwrap();
        prop_assert_eq!(&tables[0], &tt);
        prop_assert_eq!(&tables[1], &tt.complement());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn quantize_picks_nearest_level(target in 10_000.0f64..=100_000.0) {
        let model = DeviceModel::kohm();
        let (k, r) = quantize(target, &model).unwrap();
        prop_assert_eq!(r, model.level_resistance(k));
        let dist = |j: usize| (1.0 / model.level_resistance(j) - 1.0 / target).abs();
        for j in 0..model.levels() {
            prop_assert!(dist(k) <= dist(j));
        }
        prop_assert_eq!(quantize(r, &model).unwrap().0, k);
    }

    #[test]
    fn reads_do_not_mutate(r in 10_000.0f64..=100_000.0, v in 0.01f64..0.99) {
        let state = MemristorState::new(DeviceModel::kohm(), r).unwrap();
        let first = state.read_current(v).unwrap();
        for _ in 0..100 {
            prop_assert_eq!(state.read_current(v).unwrap().to_bits(), first.to_bits());
        }
        prop_assert_eq!(state.resistance().to_bits(), r.to_bits());
        prop_assert!(state.read_current(1.5).is_err());
        prop_assert!(state.read_current(READ_VOLTAGE).is_ok());
    }

    #[test]
    fn pulses_move_resistance_monotonically(
        r in 10_000.0f64..=100_000.0,
        amplitude in -3.0f64..=3.0,
    ) {
        let model = DeviceModel::kohm();
        let state = MemristorState::new(model, r).unwrap();
        let next = state.apply_pulse(PulseSpec::volts(amplitude)).resistance();
        prop_assert!(model.contains(next));
        if amplitude.abs() <= model.v_prog_threshold {
            prop_assert_eq!(next, r);
        } else if amplitude > 0.0 {
            prop_assert!(next <= r);
        } else {
            prop_assert!(next >= r);
        }
    }

    #[test]
    fn settle_time_decreases_with_imbalance(a in 1e-10f64..3e-5, b in 1e-10f64..3e-5) {
        prop_assume!(a < b);
        let params = TransientParams::default();
        let levels = VoltageLevels::default();
        match (settle_time(a, &params, &levels), settle_time(b, &params, &levels)) {
            (Settle::Resolved(ta), Settle::Resolved(tb)) => prop_assert!(ta > tb),
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn resolved_cycles_match_evaluate(
        (m, th, tie) in gate(),
        rows in prop::collection::vec(any::<prop::sample::Index>(), 1..=4),
    ) {
        let g = config(&m, &th, tie);
        let n = m.len();
        let seq: Vec<InputVector> = rows
            .iter()
            .map(|i| InputVector::from_index(i.index(1 << n), n))
            .collect();
        let clock = ClockSpec { sample_dt: 2e-3 / 40.0, ..ClockSpec::with_cycles(seq.len()) };
        let trace = simulate(&g, &seq, &clock, &TransientParams::default()).unwrap();
        let mid = g.levels().v_dd / 2.0;
        for s in &trace.samples {
            if !s.evaluating {
                prop_assert_eq!((s.ca, s.co), (mid, mid));
            }
        }
        for c in &trace.cycles {
            if c.resolved {
                prop_assert_eq!(c.output, Some(g.evaluate(&c.input).unwrap()));
            } else {
                prop_assert_eq!(c.output, None);
            }
        }
    }

    #[test]
    fn synthesized_designs_verify(code in 0u32..256) {
        let target = TruthTable::from_fn(3, |row| (code >> row) & 1 == 1);
        let result = synthesize(&SynthesisSpec::new(target.clone(), DeviceModel::kohm())).unwrap();
        if let Some(d) = result.design() {
            prop_assert!(verify(&result, &target).unwrap().pass);
            prop_assert!(d.quantized_check.pass);
            prop_assert!(d.quantized_check.worst_margin > 0.0);
            prop_assert_eq!(d.quantized_config.truth_table().unwrap(), target);
        } else {
            prop_assert!(!check_separability(&target).unwrap().is_separable());
        }
    }
}

/// Integer-weight search: `f(x) = [w . x >= t]` with small non-negative
/// weights covers every positive threshold function of up to 3 inputs.
fn integer_realizable(target: &TruthTable) -> bool {
    let n = target.n();
    let weights = 4usize.pow(n as u32);
    (0..weights).any(|code| {
        let w: Vec<usize> = (0..n).map(|i| (code / 4usize.pow(i as u32)) % 4).collect();
        (1..=12).any(|t| {
            (0..1usize << n).all(|row| {
                let sum: usize = (0..n)
                    .filter(|i| (row >> (n - 1 - i)) & 1 == 1)
                    .map(|i| w[i])
                    .sum();
                target.get(row) == (sum >= t)
            })
        })
    })
}

#[test]
fn separability_matches_integer_search() {
    for n in 1..=3 {
        for code in 0..1u64 << (1 << n) {
            let target = TruthTable::from_fn(n, |row| (code >> row) & 1 == 1);
            let sep = check_separability(&target).unwrap();
            assert_eq!(sep.is_separable(), integer_realizable(&target), "{target}");
            assert_eq!(sep.is_separable(), sep.witness().is_none());
        }
    }
}
