//! Pinned values checked against closed forms and brute-force enumerations
//! written independently of the library's table machinery.

use std::sync::Arc;

use stripex_core::data::WeightedSamples;
use stripex_core::dgp::build_dgp;
use stripex_core::estimators::ConditionalModel;
use stripex_core::scores::{encode_meter_exact, entropies, evalx_score, fresh_score, stripe_x, ScoreValue};
use stripex_core::estimators::LearnerSpec;
use stripex_core::{Conditional, DgpSpec, Explainer, ExplainerSpec, Value};

const RHO: f64 = 0.9;

fn hb(p: f64) -> f64 {
    let t = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.ln() };
    t(p) + t(1.0 - p)
}

/// `q(y=1 | x)` for the switch family: `x3` picks `x1` (on) or `x2` (off).
fn switch_rho(x: &[u32]) -> f64 {
    let sel = if x[2] == 1 { x[0] } else { x[1] };
    if sel == 1 { RHO } else { 1.0 - RHO }
}

fn all_inputs(d: usize) -> Vec<Vec<u32>> {
    (0..1u32 << d).map(|c| (0..d).map(|i| (c >> i) & 1).collect()).collect()
}

/// `q(y=1 | x_S = x_S)` by summing the uniform input distribution.
fn brute_conditional(d: usize, x: &[u32], s: &[usize]) -> f64 {
    let matching: Vec<Vec<u32>> = all_inputs(d).into_iter().filter(|z| s.iter().all(|&i| z[i] == x[i])).collect();
    matching.iter().map(|z| switch_rho(z)).sum::<f64>() / matching.len() as f64
}

/// Marginal encoder: the feature the control input points at, no control.
fn brute_marg(x: &[u32]) -> Vec<usize> {
    vec![if x[2] == 1 { 0 } else { 1 }]
}

fn brute_evalx(d: usize, e: impl Fn(&[u32]) -> Vec<usize>) -> f64 {
    let xs = all_inputs(d);
    let px = 1.0 / xs.len() as f64;
    xs.iter()
        .map(|x| {
            let p = switch_rho(x);
            let q = brute_conditional(d, x, &e(x));
            px * (p * q.ln() + (1.0 - p) * (1.0 - q).ln())
        })
        .sum()
}

/// `sum_{v,a} q(e=v, x_v=a) I(E_v; y | x_v=a)`, from the joint of
/// `(E_v, y)` within each `x_v = a` slice.
fn brute_phi(d: usize, e: impl Fn(&[u32]) -> Vec<usize>) -> f64 {
    let xs = all_inputs(d);
    let px = 1.0 / xs.len() as f64;
    let mut selections: Vec<Vec<usize>> = xs.iter().map(|x| e(x)).collect();
    selections.sort();
    selections.dedup();
    let mut total = 0.0;
    for v in &selections {
        let keys: std::collections::BTreeSet<Vec<u32>> =
            xs.iter().filter(|x| e(x) == *v).map(|x| v.iter().map(|&i| x[i]).collect()).collect();
        for a in keys {
            let mut j = [[0.0f64; 2]; 2];
            for x in xs.iter().filter(|x| v.iter().map(|&i| x[i]).collect::<Vec<_>>() == a) {
                let ev = (e(x) == *v) as usize;
                j[ev][1] += px * switch_rho(x);
                j[ev][0] += px * (1.0 - switch_rho(x));
            }
            let tot: f64 = j.iter().flatten().sum();
            let mut mi = 0.0;
            for ev in 0..2 {
                for y in 0..2 {
                    let p = j[ev][y] / tot;
                    let pe = (j[ev][0] + j[ev][1]) / tot;
                    let py = (j[0][y] + j[1][y]) / tot;
                    if p > 0.0 {
                        mi += p * (p / (pe * py)).ln();
                    }
                }
            }
            total += (j[1][0] + j[1][1]) * mi;
        }
    }
    total
}

struct Setup {
    dgp: stripex_core::Dgp,
    oracle: Arc<dyn Conditional>,
    set: WeightedSamples,
}

fn setup(spec: DgpSpec) -> Setup {
    let dgp = build_dgp(&spec).unwrap();
    let oracle: Arc<dyn Conditional> = Arc::new(ConditionalModel::exact(&dgp).unwrap());
    let set = WeightedSamples::from_table(dgp.table().unwrap());
    Setup { dgp, oracle, set }
}

impl Setup {
    fn explainer(&self, spec: &ExplainerSpec) -> Explainer {
        Explainer::build_with_data(spec, &self.dgp, Some(self.oracle.clone()), Some(&self.set)).unwrap()
    }

    fn evalx(&self, e: &Explainer) -> ScoreValue {
        let (masks, _) = e.explain_set(&self.set).unwrap();
        evalx_score(&*self.oracle, &masks, &self.set).unwrap()
    }
}

#[test]
fn three_switch_conditional_of_first_feature() {
    let s = setup(DgpSpec::ThreeSwitch { rho: RHO });
    let q = s.oracle.prob_y1(&[Value::Cat(1), Value::Mask, Value::Mask]).unwrap();
    assert!((q - brute_conditional(3, &[1, 0, 0], &[0])).abs() < 1e-15);
    assert!((q - 0.7).abs() < 1e-15);
}

#[test]
fn marg_scores_match_enumeration() {
    for (spec, d) in [(DgpSpec::ThreeSwitch { rho: RHO }, 3), (DgpSpec::FiveDiscrete { rho: RHO }, 5)] {
        let s = setup(spec);
        let e = s.explainer(&ExplainerSpec::MargEnc { layout: None });
        let evalx = s.evalx(&e);
        assert!((evalx.value - brute_evalx(d, brute_marg)).abs() < 1e-12);
        assert!((evalx.value - (0.9 * 0.7f64.ln() + 0.1 * 0.3f64.ln())).abs() < 1e-12);
        let phi = encode_meter_exact(s.dgp.table().unwrap(), &e).unwrap().score;
        assert!((phi.value - brute_phi(d, brute_marg)).abs() < 1e-12);
        assert!((phi.value - 0.1018).abs() < 1e-3);
        let stripe = stripe_x(&evalx, &phi, 20.0).unwrap();
        assert!((stripe.value - (-2.478)).abs() < 0.02);
    }
}

#[test]
fn constant_scores_match_closed_forms() {
    let s = setup(DgpSpec::FiveDiscrete { rho: RHO });
    let x1 = s.evalx(&s.explainer(&ExplainerSpec::constant(&[0])));
    assert!((x1.value + hb(0.7)).abs() < 1e-12);
    assert!((x1.value - brute_evalx(5, |_| vec![0])).abs() < 1e-12);
    assert!((x1.value - (-0.6109)).abs() < 1e-4);
    let x3 = s.evalx(&s.explainer(&ExplainerSpec::constant(&[2])));
    assert!((x3.value + std::f64::consts::LN_2).abs() < 1e-12);
}

#[test]
fn optimal_switch_reaches_conditional_entropy() {
    let s = setup(DgpSpec::FiveDiscrete { rho: RHO });
    let h = entropies(&s.dgp).unwrap();
    assert!((h.h_y_given_x - hb(RHO)).abs() < 1e-12);
    assert!((h.h_y - std::f64::consts::LN_2).abs() < 1e-12);
    let opt = s.evalx(&s.explainer(&ExplainerSpec::OptimalSwitch { layout: None }));
    assert!((opt.value + hb(RHO)).abs() < 1e-12);
    let phi = encode_meter_exact(s.dgp.table().unwrap(), &s.explainer(&ExplainerSpec::OptimalSwitch { layout: None }))
        .unwrap();
    assert_eq!(phi.score.value, 0.0);
}

#[test]
fn exact_fresh_of_marg_and_all_inputs() {
    let s = setup(DgpSpec::FiveDiscrete { rho: RHO });
    for spec in [ExplainerSpec::MargEnc { layout: None }, ExplainerSpec::AllInputs] {
        let e = s.explainer(&spec);
        let (masks, _) = e.explain_set(&s.set).unwrap();
        let f = fresh_score(&s.set, &masks, &s.set, &masks, &LearnerSpec::exact(), Value::Pad).unwrap();
        assert!((f.value + hb(RHO)).abs() < 1e-9, "{spec:?}: {}", f.value);
        assert!((f.value - (-0.3251)).abs() < 1e-3);
    }
}

#[test]
fn hybrid_entropies_match_simpson_integration() {
    let density = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let sig = |z: f64| 1.0 / (1.0 + (-5.0 * z).exp());
    let n = 20_000;
    let (a, b) = (-12.0, 12.0);
    let step = (b - a) / n as f64;
    let mut acc = 0.0;
    for k in 0..=n {
        let z = a + k as f64 * step;
        let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * density(z) * hb(sig(z));
    }
    let integral = acc * step / 3.0;
    assert!((integral - 0.241926053983).abs() < 1e-11);
    // The sigmoid's complex poles slow Gauss-Hermite convergence.
    for (nodes, tol) in [(64, 2e-4), (128, 1e-5)] {
        let dgp = build_dgp(&DgpSpec::Hybrid { gamma: 5.0, mean: 0.0, quadrature_nodes: nodes }).unwrap();
        let h = entropies(&dgp).unwrap();
        assert!((h.h_y_given_x - integral).abs() < tol, "{nodes}: {} vs {integral}", h.h_y_given_x);
        assert!((h.h_y - std::f64::consts::LN_2).abs() < 1e-12);
    }
}
