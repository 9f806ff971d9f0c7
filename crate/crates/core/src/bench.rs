//! Simulated benchmark suites and the weak/strong detection matrix.
//!
//! A suite is a grid of cells, one per (backend, explainer, seed). Cells are
//! independent; [`prepare`] builds the per-(backend, seed) data and EVAL-X
//! model, [`run_cell`] scores one explainer against it, and [`assemble`]
//! orders the reports and derives summaries and verdicts. Callers may run
//! cells in any order or in parallel.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::data::WeightedSamples;
use crate::dgp::{build_dgp, Dgp, DgpSpec};
use crate::error::{Error, Result};
use crate::estimators::{
    Conditional, ConditionalModel, LearnerSpec, SelectionConfig, SelectionModel, SurrogateConfig, MC_RESAMPLES,
};
use crate::explainers::{Explainer, ExplainerSpec};
use crate::rng::mix;
use crate::scores::{
    self, encode_meter_exact, encode_meter_predictive_probs, encoding_check, entropies, evalx_from_probs, evalx_probs,
    fresh_score, rank_metrics_from_probs, roar_score, EncodingCheckConfig, Entropies, ScoreReport, ScoreSet,
    YSampling,
};
use crate::value::Value;

/// Which conditional components a cell uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendChoice {
    /// Exact conditionals; joint-table expectations on finite DGPs.
    Exact,
    /// Everything learned from sampled data.
    Estimated,
}

impl BackendChoice {
    pub fn name(self) -> &'static str {
        match self {
            BackendChoice::Exact => "exact",
            BackendChoice::Estimated => "estimated",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteExplainer {
    #[serde(default)]
    pub name: Option<String>,
    /// Ground-truth encoding status used by the detection matrix; defaults
    /// to the construction's known status.
    #[serde(default)]
    pub encoding: Option<bool>,
    pub spec: ExplainerSpec,
}

impl SuiteExplainer {
    pub fn new(spec: ExplainerSpec) -> Self {
        SuiteExplainer { name: None, encoding: None, spec }
    }

    pub fn named(name: &str, encoding: bool, spec: ExplainerSpec) -> Self {
        SuiteExplainer { name: Some(String::from(name)), encoding: Some(encoding), spec }
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.spec.default_name())
    }

    pub fn is_encoding(&self) -> Option<bool> {
        self.encoding.or_else(|| self.spec.known_encoding())
    }
}

fn default_backends() -> Vec<BackendChoice> {
    alloc::vec![BackendChoice::Exact, BackendChoice::Estimated]
}
fn default_n_train() -> usize {
    10_000
}
fn default_n_eval() -> usize {
    5_000
}
fn default_seeds() -> Vec<u64> {
    (0..5).collect()
}
fn default_alpha() -> f64 {
    20.0
}
fn default_y_samples() -> usize {
    8
}
fn default_tree_depth() -> usize {
    5
}
fn default_mc() -> usize {
    MC_RESAMPLES
}
fn default_tolerance() -> f64 {
    0.02
}
fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub dgp: DgpSpec,
    pub explainers: Vec<SuiteExplainer>,
    #[serde(default = "default_backends")]
    pub backends: Vec<BackendChoice>,
    #[serde(default = "default_n_train")]
    pub n_train: usize,
    #[serde(default = "default_n_eval")]
    pub n_eval: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Labels drawn per row for the predictive ENCODE-METER; 0 averages
    /// over both labels exactly.
    #[serde(default = "default_y_samples")]
    pub y_samples: usize,
    /// Depth of the trees used on real-valued inputs.
    #[serde(default = "default_tree_depth")]
    pub tree_depth: usize,
    /// Monte Carlo resamples for the estimated EVAL-X model on continuous DGPs.
    #[serde(default = "default_mc")]
    pub mc_resamples: usize,
    /// Distance to the optimum that counts as reaching it.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_true")]
    pub rank_metrics: bool,
    #[serde(default = "default_true")]
    pub encoding_check: bool,
}

impl SuiteConfig {
    pub fn new(dgp: DgpSpec, explainers: Vec<SuiteExplainer>) -> Self {
        SuiteConfig {
            name: None,
            dgp,
            explainers,
            backends: default_backends(),
            n_train: default_n_train(),
            n_eval: default_n_eval(),
            seeds: default_seeds(),
            alpha: default_alpha(),
            y_samples: default_y_samples(),
            tree_depth: default_tree_depth(),
            mc_resamples: default_mc(),
            tolerance: default_tolerance(),
            rank_metrics: true,
            encoding_check: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::config("seeds must be nonempty"));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::config("alpha must be non-negative"));
        }
        if self.explainers.is_empty() {
            return Err(Error::config("explainer list is empty"));
        }
        if self.backends.is_empty() {
            return Err(Error::config("backend list is empty"));
        }
        if (1..self.backends.len()).any(|i| self.backends[..i].contains(&self.backends[i])) {
            return Err(Error::config("backend listed twice"));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::config("tolerance must be non-negative"));
        }
        if self.n_train == 0 || self.n_eval == 0 {
            return Err(Error::config("sample sizes must be positive"));
        }
        if self.tree_depth == 0 || self.mc_resamples == 0 {
            return Err(Error::config("tree_depth and mc_resamples must be positive"));
        }
        Ok(())
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| String::from(self.dgp.family()))
    }
}

/// Data and EVAL-X model shared by every explainer for one (backend, seed).
pub struct CellContext {
    pub backend: BackendChoice,
    pub seed: u64,
    pub train: WeightedSamples,
    pub eval: WeightedSamples,
    /// Model behind EVAL-X and y-sampling.
    pub model: Arc<dyn Conditional>,
    /// Model used by reductive search.
    pub search_model: Arc<dyn Conditional>,
    /// True conditional, used by pos_enc and pred_enc.
    pub oracle: Arc<dyn Conditional>,
    /// Joint-table evaluation on a finite DGP.
    pub tabular: bool,
}

pub fn prepare(cfg: &SuiteConfig, dgp: &Dgp, backend: BackendChoice, seed: u64) -> Result<CellContext> {
    let oracle: Arc<dyn Conditional> = Arc::new(ConditionalModel::exact(dgp)?);
    if backend == BackendChoice::Exact && dgp.is_finite() {
        let set = WeightedSamples::from_table(dgp.table()?);
        return Ok(CellContext {
            backend,
            seed,
            train: set.clone(),
            eval: set,
            model: oracle.clone(),
            search_model: oracle.clone(),
            oracle,
            tabular: true,
        });
    }
    let train = WeightedSamples::from_dataset(&dgp.sample(cfg.n_train, mix(seed, 1))?);
    let eval = WeightedSamples::from_dataset(&dgp.sample(cfg.n_eval, mix(seed, 2))?);
    let (model, search_model): (Arc<dyn Conditional>, Arc<dyn Conditional>) = match backend {
        BackendChoice::Exact => (oracle.clone(), oracle.clone()),
        BackendChoice::Estimated if dgp.is_finite() => {
            let m: Arc<dyn Conditional> =
                Arc::new(ConditionalModel::surrogate(&train, &SurrogateConfig::default_for(dgp.schema(), mix(seed, 3)))?);
            (m.clone(), m)
        }
        BackendChoice::Estimated => {
            // Monte Carlo per query is too slow for exhaustive search, which
            // uses the quadrature oracle instead.
            let m = ConditionalModel::monte_carlo(dgp, cfg.mc_resamples, mix(seed, 3))?;
            (Arc::new(m), oracle.clone())
        }
    };
    Ok(CellContext { backend, seed, train, eval, model, search_model, oracle, tabular: false })
}

fn learner_for(ctx: &CellContext, cfg: &SuiteConfig, categorical: bool) -> LearnerSpec {
    if ctx.tabular {
        LearnerSpec::exact()
    } else if categorical {
        LearnerSpec::table()
    } else {
        LearnerSpec::tree(cfg.tree_depth)
    }
}

/// Builds the explainer for a cell.
pub fn build_explainer(ctx: &CellContext, dgp: &Dgp, spec: &ExplainerSpec) -> Result<Explainer> {
    let pi = match spec {
        ExplainerSpec::Reductive { .. } => ctx.search_model.clone(),
        _ => ctx.oracle.clone(),
    };
    Explainer::build_with_data(spec, dgp, Some(pi), Some(&ctx.train))
}

/// Scores explainer `index` of the config against a prepared context.
pub fn run_cell(cfg: &SuiteConfig, dgp: &Dgp, ctx: &CellContext, index: usize) -> Result<ScoreReport> {
    let entry = cfg.explainers.get(index).ok_or_else(|| Error::config("explainer index out of range"))?;
    let explainer = build_explainer(ctx, dgp, &entry.spec)?;
    let categorical = dgp.schema().all_categorical();
    let learner = learner_for(ctx, cfg, categorical);
    let (train_masks, _) = explainer.explain_set(&ctx.train)?;
    let (eval_masks, _) = explainer.explain_set(&ctx.eval)?;

    let probs = evalx_probs(&*ctx.model, &eval_masks, &ctx.eval)?;
    let evalx = evalx_from_probs(&probs, &ctx.eval)?;
    let roar = roar_score(&ctx.train, &train_masks, &ctx.eval, &eval_masks, &learner)?;
    let fresh = fresh_score(&ctx.train, &train_masks, &ctx.eval, &eval_masks, &learner, Value::Pad)?;
    let phi = if ctx.tabular {
        encode_meter_exact(dgp.table()?, &explainer)?.score
    } else {
        let vocab = crate::explainers::SelectionVocabulary::from_masks(&train_masks, &ctx.train.ws)?;
        let selection = SelectionModel::fit(&ctx.train, &train_masks, &vocab, &SelectionConfig { learner })?;
        let sampling = if cfg.y_samples == 0 {
            YSampling::Exact
        } else {
            YSampling::Samples { k: cfg.y_samples, seed: mix(ctx.seed, 4) }
        };
        encode_meter_predictive_probs(&ctx.eval, &eval_masks, &selection, &probs, sampling)?
    };
    let stripe = scores::stripe_x(&evalx, &phi, cfg.alpha)?;
    let rank = if cfg.rank_metrics { rank_metrics_from_probs(&probs, &ctx.eval).ok() } else { None };
    let verdict = if cfg.encoding_check {
        let check = if ctx.tabular { EncodingCheckConfig::exact() } else { EncodingCheckConfig::estimated() };
        Some(encoding_check(&ctx.eval, &eval_masks, &check)?)
    } else {
        None
    };
    Ok(ScoreReport {
        dgp: String::from(dgp.family()),
        explainer: entry.display_name(),
        scores: ScoreSet {
            roar: Some(roar.complement_loglik.value),
            fresh: Some(fresh.value),
            evalx: Some(evalx.value),
            encode_meter: Some(phi.value),
            stripe_x: Some(stripe.value),
            accuracy: rank.map(|r| r.accuracy),
            auroc: rank.map(|r| r.auroc),
        },
        alpha: cfg.alpha,
        entropy_y: entropies(dgp)?.h_y,
        verdict,
        estimator: String::from(ctx.backend.name()),
        seed: Some(ctx.seed),
    })
}

/// Scores compared by the detection matrix, in display order.
pub const DETECTION_SCORES: [&str; 4] = ["roar", "fresh", "evalx", "stripe_x"];

/// Every score column a report may carry, in display order.
pub const SCORE_COLUMNS: [&str; 7] = ["roar", "fresh", "evalx", "encode_meter", "stripe_x", "accuracy", "auroc"];

pub fn score_of(set: &ScoreSet, name: &str) -> Option<f64> {
    match name {
        "roar" => set.roar,
        "fresh" => set.fresh,
        "evalx" => set.evalx,
        "encode_meter" => set.encode_meter,
        "stripe_x" => set.stripe_x,
        "accuracy" => set.accuracy,
        "auroc" => set.auroc,
        _ => None,
    }
}

/// Orientation used for ranking: ROAR rewards explanations whose removal
/// hurts, so its complement log-likelihood is negated.
pub fn ranking_value(set: &ScoreSet, name: &str) -> Option<f64> {
    let v = score_of(set, name)?;
    Some(if name == "roar" { -v } else { v })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub backend: BackendChoice,
    pub explainer: String,
    pub score: String,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionRow {
    pub backend: BackendChoice,
    pub score: String,
    /// Only non-encoding explainers reach the optimum, on every seed.
    pub weak: bool,
    /// Every non-encoding explainer outscores every encoding one, on every seed.
    pub strong: bool,
    /// Whether all seeds gave the same pair of verdicts.
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub dgp: String,
    pub alpha: f64,
    /// Detection tolerance from the configuration.
    pub tolerance: f64,
    pub entropy: Entropies,
    pub explainers: Vec<String>,
    pub encoding: Vec<Option<bool>>,
    pub seeds: Vec<u64>,
    pub backends: Vec<BackendChoice>,
    /// Ordered by backend, then explainer, then seed.
    pub cells: Vec<ScoreReport>,
    pub summaries: Vec<Summary>,
    pub detection: Vec<DetectionRow>,
}

impl SuiteResult {
    pub fn cell(&self, backend: BackendChoice, explainer: usize, seed: usize) -> &ScoreReport {
        let b = self.backends.iter().position(|&x| x == backend).expect("backend not in suite");
        &self.cells[(b * self.explainers.len() + explainer) * self.seeds.len() + seed]
    }

    pub fn explainer_index(&self, name: &str) -> Option<usize> {
        self.explainers.iter().position(|e| e == name)
    }

    pub fn summary(&self, backend: BackendChoice, explainer: &str, score: &str) -> Option<&Summary> {
        self.summaries.iter().find(|s| s.backend == backend && s.explainer == explainer && s.score == score)
    }

    pub fn detection_row(&self, backend: BackendChoice, score: &str) -> Option<&DetectionRow> {
        self.detection.iter().find(|d| d.backend == backend && d.score == score)
    }
}

/// Cell keys in assembly order: `(backend, explainer index, seed index)`.
pub fn cell_keys(cfg: &SuiteConfig) -> Vec<(BackendChoice, usize, usize)> {
    let mut keys = Vec::new();
    for &b in &cfg.backends {
        for e in 0..cfg.explainers.len() {
            for s in 0..cfg.seeds.len() {
                keys.push((b, e, s));
            }
        }
    }
    keys
}

/// Per-seed verdicts `(weak, strong)` for one score.
fn seed_verdict(values: &[(f64, bool)], tol: f64) -> Option<(bool, bool)> {
    let enc: Vec<f64> = values.iter().filter(|v| v.1).map(|v| v.0).collect();
    let non: Vec<f64> = values.iter().filter(|v| !v.1).map(|v| v.0).collect();
    if enc.is_empty() || non.is_empty() {
        return None;
    }
    let max_enc = enc.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let max_non = non.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_non = non.iter().cloned().fold(f64::INFINITY, f64::min);
    Some((max_enc < max_non - tol, max_enc < min_non))
}

/// Detection matrix from assembled cells. The optimum of a score is the
/// best non-encoding value on the same seed.
pub fn detection_matrix(cfg: &SuiteConfig, cells: &[ScoreReport]) -> Result<Vec<DetectionRow>> {
    let labels: Vec<Option<bool>> = cfg.explainers.iter().map(|e| e.is_encoding()).collect();
    if !labels.contains(&Some(true)) || !labels.contains(&Some(false)) {
        return Err(Error::config("detection needs at least one known-encoding and one known-non-encoding explainer"));
    }
    let ne = cfg.explainers.len();
    let ns = cfg.seeds.len();
    let mut rows = Vec::new();
    for (bi, &backend) in cfg.backends.iter().enumerate() {
        for score in DETECTION_SCORES {
            let mut verdicts = Vec::with_capacity(ns);
            for s in 0..ns {
                let mut values = Vec::new();
                for (e, label) in labels.iter().enumerate() {
                    if let Some(enc) = label {
                        let cell = &cells[(bi * ne + e) * ns + s];
                        if let Some(v) = ranking_value(&cell.scores, score) {
                            values.push((v, *enc));
                        }
                    }
                }
                verdicts.push(seed_verdict(&values, cfg.tolerance).ok_or_else(|| {
                    Error::config(format!("score {score} lacks encoding or non-encoding values"))
                })?);
            }
            let stable = verdicts.iter().all(|v| *v == verdicts[0]);
            rows.push(DetectionRow {
                backend,
                score: String::from(score),
                weak: verdicts.iter().all(|v| v.0),
                strong: verdicts.iter().all(|v| v.1),
                stable,
            });
        }
    }
    Ok(rows)
}

/// Orders cell reports and derives summaries and the detection matrix.
/// `cells` must follow [`cell_keys`] order.
pub fn assemble(cfg: &SuiteConfig, dgp: &Dgp, cells: Vec<ScoreReport>) -> Result<SuiteResult> {
    if cells.len() != cell_keys(cfg).len() {
        return Err(Error::Dimension { expected: cell_keys(cfg).len(), got: cells.len() });
    }
    let names: Vec<String> = cfg.explainers.iter().map(|e| e.display_name()).collect();
    let ns = cfg.seeds.len();
    let mut summaries = Vec::new();
    for (bi, &backend) in cfg.backends.iter().enumerate() {
        for (e, name) in names.iter().enumerate() {
            let block = &cells[(bi * names.len() + e) * ns..(bi * names.len() + e + 1) * ns];
            for score in SCORE_COLUMNS {
                let vals: Vec<f64> = block.iter().filter_map(|c| score_of(&c.scores, score)).collect();
                if vals.is_empty() {
                    continue;
                }
                summaries.push(Summary {
                    backend,
                    explainer: name.clone(),
                    score: String::from(score),
                    mean: vals.iter().sum::<f64>() / vals.len() as f64,
                    min: vals.iter().cloned().fold(f64::INFINITY, f64::min),
                    max: vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                });
            }
        }
    }
    let has_coverage = {
        let labels: Vec<Option<bool>> = cfg.explainers.iter().map(|e| e.is_encoding()).collect();
        labels.contains(&Some(true)) && labels.contains(&Some(false))
    };
    let detection = if has_coverage { detection_matrix(cfg, &cells)? } else { Vec::new() };
    Ok(SuiteResult {
        name: cfg.display_name(),
        dgp: String::from(dgp.family()),
        alpha: cfg.alpha,
        tolerance: cfg.tolerance,
        entropy: entropies(dgp)?,
        explainers: names,
        encoding: cfg.explainers.iter().map(|e| e.is_encoding()).collect(),
        seeds: cfg.seeds.clone(),
        backends: cfg.backends.clone(),
        cells,
        summaries,
        detection,
    })
}

/// Runs every cell sequentially.
pub fn run_simulated_suite(cfg: &SuiteConfig) -> Result<SuiteResult> {
    cfg.validate()?;
    let dgp = build_dgp(&cfg.dgp)?;
    let mut cells = Vec::with_capacity(cell_keys(cfg).len());
    for &backend in &cfg.backends {
        let contexts = cfg
            .seeds
            .iter()
            .map(|&s| prepare(cfg, &dgp, backend, s))
            .collect::<Result<Vec<_>>>()?;
        for e in 0..cfg.explainers.len() {
            for ctx in &contexts {
                cells.push(run_cell(cfg, &dgp, ctx, e)?);
            }
        }
    }
    assemble(cfg, &dgp, cells)
}

/// Runs the suite and returns its detection matrix.
pub fn run_detection_matrix(cfg: &SuiteConfig) -> Result<Vec<DetectionRow>> {
    let labels: Vec<Option<bool>> = cfg.explainers.iter().map(|e| e.is_encoding()).collect();
    if !labels.contains(&Some(true)) || !labels.contains(&Some(false)) {
        return Err(Error::config("detection needs at least one known-encoding and one known-non-encoding explainer"));
    }
    Ok(run_simulated_suite(cfg)?.detection)
}

/// Explainer lists for the shipped suites.
pub mod presets {
    use super::*;

    /// Constructions compared on the switch DGPs: constant first feature,
    /// all inputs, optimal switch, and the four encoders.
    pub fn switch_explainers() -> Vec<SuiteExplainer> {
        alloc::vec![
            SuiteExplainer::new(ExplainerSpec::constant(&[0])),
            SuiteExplainer::new(ExplainerSpec::AllInputs),
            SuiteExplainer::new(ExplainerSpec::OptimalSwitch { layout: None }),
            SuiteExplainer::new(ExplainerSpec::PosEnc { high: None, low: None }),
            SuiteExplainer::new(ExplainerSpec::PredEnc),
            SuiteExplainer::new(ExplainerSpec::MargEnc { layout: None }),
            SuiteExplainer::new(ExplainerSpec::Reductive { k: 1, round: None }),
        ]
    }

    pub fn discrete() -> SuiteConfig {
        let mut c = SuiteConfig::new(DgpSpec::FiveDiscrete { rho: 0.9 }, switch_explainers());
        c.name = Some(String::from("discrete"));
        c
    }

    pub fn hybrid() -> SuiteConfig {
        let mut c = SuiteConfig::new(DgpSpec::Hybrid { gamma: 5.0, mean: 0.0, quadrature_nodes: 64 }, switch_explainers());
        c.name = Some(String::from("hybrid"));
        c
    }

    /// Block-image analogue: a fixed block, the optimal pair, all blocks and
    /// the three encoders of the image study.
    pub fn four_block() -> SuiteConfig {
        let explainers = alloc::vec![
            SuiteExplainer::named("fixed", false, ExplainerSpec::constant(&[3])),
            SuiteExplainer::named("optimal", false, ExplainerSpec::OptimalSwitch { layout: None }),
            SuiteExplainer::named("all_inputs", false, ExplainerSpec::AllInputs),
            SuiteExplainer::named("pos_enc", true, ExplainerSpec::PosEnc { high: Some(alloc::vec![0]), low: Some(alloc::vec![2]) }),
            SuiteExplainer::named("pred_enc", true, ExplainerSpec::PredEnc),
            SuiteExplainer::named("marg_enc", true, ExplainerSpec::MargEnc { layout: None }),
        ];
        let mut c = SuiteConfig::new(DgpSpec::FourBlock { card: 8, epsilon: 0.0 }, explainers);
        c.name = Some(String::from("four_block"));
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mut c: SuiteConfig) -> SuiteConfig {
        c.backends = alloc::vec![BackendChoice::Exact];
        c.seeds = alloc::vec![0];
        c
    }

    #[test]
    fn config_validation() {
        let mut c = presets::discrete();
        assert!(c.validate().is_ok());
        c.seeds.clear();
        assert!(c.validate().is_err());
        let mut c = presets::discrete();
        c.alpha = -1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn zero_alpha_stripe_equals_evalx() {
        let mut c = small(presets::discrete());
        c.alpha = 0.0;
        let r = run_simulated_suite(&c).unwrap();
        for cell in &r.cells {
            assert_eq!(cell.scores.stripe_x, cell.scores.evalx);
        }
    }

    #[test]
    fn exact_discrete_ordering_and_matrix() {
        let r = run_simulated_suite(&small(presets::discrete())).unwrap();
        let marg = r.explainer_index("marg_enc").unwrap();
        let c1 = r.explainer_index("constant_x1").unwrap();
        let e_marg = r.cell(BackendChoice::Exact, marg, 0).scores.evalx.unwrap();
        let e_c1 = r.cell(BackendChoice::Exact, c1, 0).scores.evalx.unwrap();
        assert!(e_marg > e_c1);
        let ev = r.detection_row(BackendChoice::Exact, "evalx").unwrap();
        assert!(ev.weak && !ev.strong);
        let st = r.detection_row(BackendChoice::Exact, "stripe_x").unwrap();
        assert!(st.weak && st.strong);
    }

    #[test]
    fn coverage_is_required() {
        let mut c = small(presets::discrete());
        c.explainers.retain(|e| e.is_encoding() == Some(false));
        assert!(run_detection_matrix(&c).is_err());
    }
}
