use std::sync::Arc;

use proptest::prelude::*;
use stripex_core::data::WeightedSamples;
use stripex_core::dgp::build_dgp;
use stripex_core::estimators::{mi_plugin, ConditionalModel};
use stripex_core::mask::{extract_explanation, val_padded};
use stripex_core::rng::Rng;
use stripex_core::scores::{auroc, encode_meter_exact, evalx_gap, evalx_score, identities, stripe_x, table_entropies, ScoreValue};
use stripex_core::{Conditional, DgpSpec, DiscreteDgp, Explainer, ExplainerSpec, Schema, SelectionMask, Value};

fn mask_strategy(max_d: usize) -> impl Strategy<Value = SelectionMask> {
    prop::collection::vec(any::<bool>(), 1..=max_d).prop_map(SelectionMask::new)
}

/// A random joint table over three binary features with full support.
fn table_strategy() -> impl Strategy<Value = DiscreteDgp> {
    (prop::collection::vec(0.05f64..1.0, 8), prop::collection::vec(0.02f64..0.98, 8)).prop_map(|(w, p1)| {
        let total: f64 = w.iter().sum();
        let rows = (0..8u32)
            .map(|c| (vec![c & 1, (c >> 1) & 1, (c >> 2) & 1], w[c as usize] / total, p1[c as usize]))
            .collect();
        DiscreteDgp::from_conditionals(Schema::categorical(&[2, 2, 2]).unwrap(), rows).unwrap()
    })
}

fn table_dgp(t: &DiscreteDgp) -> stripex_core::Dgp {
    build_dgp(&DgpSpec::Table { path: None, table: Some(t.clone()) }).unwrap()
}

fn score(v: f64) -> ScoreValue {
    ScoreValue { value: v, n_samples: 1, estimator: String::from("exact"), seed: None }
}

fn explainers_for(t: &DiscreteDgp) -> Vec<Explainer> {
    let dgp = table_dgp(t);
    let oracle: Arc<dyn Conditional> = Arc::new(ConditionalModel::exact(&dgp).unwrap());
    let set = WeightedSamples::from_table(t);
    [
        ExplainerSpec::constant(&[0]),
        ExplainerSpec::constant(&[1, 2]),
        ExplainerSpec::AllInputs,
        ExplainerSpec::PosEnc { high: Some(vec![0]), low: Some(vec![1]) },
        ExplainerSpec::PredEnc,
        ExplainerSpec::Reductive { k: 1, round: None },
    ]
    .iter()
    .map(|s| Explainer::build_with_data(s, &dgp, Some(oracle.clone()), Some(&set)).unwrap())
    .collect()
}

proptest! {
    #[test]
    fn complement_is_an_involution(m in mask_strategy(12)) {
        let c = m.complement();
        prop_assert_eq!(c.complement(), m.clone());
        prop_assert_eq!(m.popcount() + c.popcount(), m.len());
        prop_assert_eq!(m.union(&c), SelectionMask::full(m.len()));
        prop_assert!(m.indices().all(|i| !c.get(i)));
    }

    #[test]
    fn u8_round_trip(m in mask_strategy(16)) {
        prop_assert_eq!(SelectionMask::from_u8(&m.to_u8()).unwrap(), m);
    }

    #[test]
    fn explanation_views_and_padding(m in mask_strategy(8), seed in any::<u64>()) {
        let d = m.len();
        let schema = Schema::categorical(&vec![4; d]).unwrap();
        let mut rng = Rng::new(seed, 0);
        let x: Vec<Value> = (0..d).map(|_| Value::Cat(rng.below(4) as u32)).collect();
        let exp = extract_explanation(&x, &m).unwrap();
        prop_assert_eq!(exp.values.len(), m.popcount());
        let view = exp.to_view();
        for i in 0..d {
            if m.get(i) {
                prop_assert_eq!(view[i], x[i]);
            } else {
                prop_assert_eq!(view[i], Value::Mask);
            }
        }
        let padded = val_padded(&exp, Value::Pad, &schema).unwrap();
        prop_assert_eq!(padded.len(), d);
        prop_assert_eq!(padded.iter().filter(|v| **v == Value::Pad).count(), d - m.popcount());
        prop_assert_eq!(&padded[..m.popcount()], &exp.values[..]);
    }

    #[test]
    fn tower_property(t in table_strategy(), code in 0u64..8, sub in 0u64..8) {
        let oracle = ConditionalModel::exact(&table_dgp(&t)).unwrap();
        let s = SelectionMask::from_code(3, code & sub);
        let big = SelectionMask::from_code(3, code);
        for e in t.entries() {
            let x = e.values();
            let view = |m: &SelectionMask| -> Vec<Value> {
                x.iter().enumerate().map(|(i, v)| if m.get(i) { *v } else { Value::Mask }).collect()
            };
            let lhs = oracle.prob_y1(&view(&s)).unwrap();
            // Mix q(y=1 | x_T) over the inputs agreeing with x on S.
            let (mut num, mut den) = (0.0, 0.0);
            for f in t.entries() {
                let z = f.values();
                if s.indices().all(|i| z[i] == x[i]) {
                    let zv: Vec<Value> = z.iter().enumerate().map(|(i, v)| if big.get(i) { *v } else { Value::Mask }).collect();
                    num += f.p_x() * oracle.prob_y1(&zv).unwrap();
                    den += f.p_x();
                }
            }
            prop_assert!((lhs - num / den).abs() < 1e-12);
        }
    }

    #[test]
    fn identities_hold_on_random_tables(t in table_strategy()) {
        let star = -table_entropies(&t).h_y_given_x;
        let dgp = table_dgp(&t);
        let oracle = ConditionalModel::exact(&dgp).unwrap();
        let set = WeightedSamples::from_table(&t);
        for e in explainers_for(&t) {
            prop_assert!(identities::event_identity(&t, &e).unwrap());
            prop_assert!(identities::conditional_identity_gap(&t, &e).unwrap() <= 1e-10);
            let (masks, _) = e.explain_set(&set).unwrap();
            let ev = evalx_score(&oracle, &masks, &set).unwrap().value;
            let gap = evalx_gap(&oracle, &t, &e).unwrap().value;
            prop_assert!(gap >= 0.0);
            prop_assert!((star - ev - gap).abs() <= 1e-10);
            prop_assert!(encode_meter_exact(&t, &e).unwrap().score.value >= 0.0);
        }
    }

    #[test]
    fn constant_explanations_are_wysiwyg(t in table_strategy(), code in 0u64..8) {
        let oracle = ConditionalModel::exact(&table_dgp(&t)).unwrap();
        let e = Explainer::Constant(SelectionMask::from_code(3, code));
        prop_assert!(identities::wysiwyg_gap(&oracle, &t, &e).unwrap() <= 1e-12);
        prop_assert_eq!(encode_meter_exact(&t, &e).unwrap().score.value, 0.0);
    }

    #[test]
    fn mutual_information_is_symmetric_and_bounded(
        pairs in prop::collection::vec((0u8..3, 0u8..2), 1..200)
    ) {
        let a: Vec<u8> = pairs.iter().map(|p| p.0).collect();
        let b: Vec<u8> = pairs.iter().map(|p| p.1).collect();
        let ab = mi_plugin(&a, &b).unwrap();
        let ba = mi_plugin(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ab >= 0.0);
        let n = b.len() as f64;
        let p1 = b.iter().filter(|&&y| y == 1).count() as f64 / n;
        let hb = |p: f64| if p <= 0.0 || p >= 1.0 { 0.0 } else { -p * p.ln() - (1.0 - p) * (1.0 - p).ln() };
        prop_assert!(ab <= hb(p1) + 1e-12);
    }

    #[test]
    fn stripe_is_monotone_in_alpha(ev in -3.0f64..0.0, phi in 0.0f64..2.0, a in 0.0f64..50.0, b in 0.0f64..50.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let s_lo = stripe_x(&score(ev), &score(phi), lo).unwrap().value;
        let s_hi = stripe_x(&score(ev), &score(phi), hi).unwrap().value;
        prop_assert!(s_hi <= s_lo);
        prop_assert_eq!(stripe_x(&score(ev), &score(phi), 0.0).unwrap().value, ev);
    }

    #[test]
    fn auroc_is_bounded_and_antisymmetric(
        rows in prop::collection::vec((0.0f64..1.0, 0u8..2, 0.1f64..2.0), 2..100)
    ) {
        let s: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let y: Vec<u8> = rows.iter().map(|r| r.1).collect();
        let w: Vec<f64> = rows.iter().map(|r| r.2).collect();
        prop_assume!(y.contains(&0) && y.contains(&1));
        let a = auroc(&s, &y, &w).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        prop_assert!((auroc(&neg, &y, &w).unwrap() - (1.0 - a)).abs() < 1e-12);
    }

    #[test]
    fn rng_streams_are_reproducible(seed in any::<u64>(), stream in any::<u64>()) {
        let mut a = Rng::new(seed, stream);
        let mut b = Rng::new(seed, stream);
        for _ in 0..8 {
            prop_assert_eq!(a.next_u64(), b.next_u64());
        }
        let u = a.uniform();
        prop_assert!((0.0..1.0).contains(&u));
    }
}

#[test]
fn monte_carlo_converges_to_the_hybrid_closed_form() {
    let dgp = build_dgp(&DgpSpec::Hybrid { gamma: 5.0, mean: 0.0, quadrature_nodes: 64 }).unwrap();
    let views = [
        vec![Value::Real(0.3), Value::Mask, Value::Mask, Value::Mask, Value::Mask],
        vec![Value::Mask, Value::Real(-0.2), Value::Cat(0), Value::Mask, Value::Mask],
        vec![Value::Mask, Value::Mask, Value::Mask, Value::Real(1.0), Value::Mask],
    ];
    for view in &views {
        let exact = dgp.true_conditional(view).unwrap();
        let mut errs = Vec::new();
        for n in [100, 10_000] {
            let est = dgp.true_conditional_mc(view, n, 5).unwrap();
            assert_eq!(est.n, n);
            errs.push((est.value - exact).abs());
        }
        // Binary-outcome standard error is at most 0.5 / sqrt(n).
        assert!(errs[1] < 4.0 * 0.5 / 100.0, "{view:?}: {errs:?}");
    }
}

#[test]
fn reductive_with_full_budget_reaches_the_optimum() {
    let dgp = build_dgp(&DgpSpec::FiveDiscrete { rho: 0.9 }).unwrap();
    let t = dgp.table().unwrap();
    let oracle: Arc<dyn Conditional> = Arc::new(ConditionalModel::exact(&dgp).unwrap());
    let set = WeightedSamples::from_table(t);
    let e = Explainer::build_with_data(&ExplainerSpec::Reductive { k: 5, round: None }, &dgp, Some(oracle.clone()), Some(&set))
        .unwrap();
    let (masks, _) = e.explain_set(&set).unwrap();
    let ev = evalx_score(&*oracle, &masks, &set).unwrap().value;
    assert!((ev + table_entropies(t).h_y_given_x).abs() < 1e-12);
}
