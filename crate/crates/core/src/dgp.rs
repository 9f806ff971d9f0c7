//! Data-generating processes: sampling, exact joint tables and true
//! conditionals.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::data::{BinaryLabel, LabeledDataset, Sample};
use crate::error::{Error, Result};
use crate::math::{gauss_hermite, normal_expectation, sigmoid};
use crate::rng::Rng;
use crate::value::{FeatureKind, Schema, Value};

/// Default cap on the number of `(x, y)` entries in a joint table.
pub const DEFAULT_SUPPORT_CAP: usize = 1 << 20;

/// Normalization tolerance for joint tables.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct TableEntry {
    pub x: Vec<u32>,
    /// `[q(x, y=0), q(x, y=1)]`.
    pub p: [f64; 2],
}

impl TableEntry {
    pub fn p_x(&self) -> f64 {
        self.p[0] + self.p[1]
    }

    pub fn p_y1_given_x(&self) -> f64 {
        self.p[1] / self.p_x()
    }

    pub fn values(&self) -> Vec<Value> {
        self.x.iter().map(|&c| Value::Cat(c)).collect()
    }
}

/// Finite-support joint distribution over categorical `x` and binary `y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct DiscreteDgp {
    schema: Schema,
    entries: Vec<TableEntry>,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    schema: Schema,
    entries: Vec<FlatEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlatEntry {
    pub x: Vec<u32>,
    pub y: BinaryLabel,
    pub p: f64,
}

impl TryFrom<TableRepr> for DiscreteDgp {
    type Error = Error;

    fn try_from(r: TableRepr) -> Result<Self> {
        DiscreteDgp::from_flat(r.schema, r.entries, DEFAULT_SUPPORT_CAP)
    }
}

impl From<DiscreteDgp> for TableRepr {
    fn from(t: DiscreteDgp) -> Self {
        TableRepr { entries: t.flat_entries(), schema: t.schema }
    }
}

impl DiscreteDgp {
    /// Builds a table from `(x, y, p)` triples, merging nothing: a repeated
    /// `(x, y)` pair is an error.
    pub fn from_flat(schema: Schema, flat: Vec<FlatEntry>, cap: usize) -> Result<Self> {
        if !schema.all_categorical() {
            return Err(Error::config("joint tables need an all-categorical schema"));
        }
        if flat.len() > cap {
            return Err(Error::config(format!("table has {} entries, cap is {cap}", flat.len())));
        }
        let mut map: BTreeMap<Vec<u32>, [Option<f64>; 2]> = BTreeMap::new();
        let mut total = 0.0;
        for e in flat {
            let vals: Vec<Value> = e.x.iter().map(|&c| Value::Cat(c)).collect();
            schema.validate(&vals)?;
            if !(e.p.is_finite() && e.p >= 0.0) {
                return Err(Error::config("table probabilities must be finite and non-negative"));
            }
            let slot = &mut map.entry(e.x).or_insert([None, None])[e.y.get() as usize];
            if slot.is_some() {
                return Err(Error::config("duplicate (x, y) entry in table"));
            }
            *slot = Some(e.p);
            total += e.p;
        }
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::config(format!("table mass sums to {total}, not 1")));
        }
        let entries = map
            .into_iter()
            .map(|(x, p)| TableEntry { x, p: [p[0].unwrap_or(0.0), p[1].unwrap_or(0.0)] })
            .filter(|e| e.p_x() > 0.0)
            .collect();
        Ok(DiscreteDgp { schema, entries })
    }

    /// Builds from `(x, q(x), q(y=1|x))` rows.
    pub fn from_conditionals(schema: Schema, rows: Vec<(Vec<u32>, f64, f64)>) -> Result<Self> {
        let mut flat = Vec::with_capacity(rows.len() * 2);
        for (x, px, p1) in rows {
            flat.push(FlatEntry { x: x.clone(), y: BinaryLabel::ZERO, p: px * (1.0 - p1) });
            flat.push(FlatEntry { x, y: BinaryLabel::ONE, p: px * p1 });
        }
        DiscreteDgp::from_flat(schema, flat, DEFAULT_SUPPORT_CAP)
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    /// Positive-mass `x` assignments in ascending order.
    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    /// One `(x, y, p)` triple per label of every listed `x`.
    pub fn flat_entries(&self) -> Vec<FlatEntry> {
        let mut out = Vec::with_capacity(self.entries.len() * 2);
        for e in &self.entries {
            for y in 0..2u8 {
                out.push(FlatEntry { x: e.x.clone(), y: BinaryLabel::new(y).unwrap(), p: e.p[y as usize] });
            }
        }
        out
    }

    pub fn find(&self, x: &[u32]) -> Option<&TableEntry> {
        self.entries.binary_search_by(|e| e.x.as_slice().cmp(x)).ok().map(|i| &self.entries[i])
    }

    /// `[q(x_v=a, y=0), q(x_v=a, y=1)]` for a view with `Value::Mask` at
    /// unobserved positions, summed in table order.
    pub fn marginal(&self, view: &[Value]) -> [f64; 2] {
        let mut acc = [0.0, 0.0];
        for e in &self.entries {
            if consistent(&e.x, view) {
                acc[0] += e.p[0];
                acc[1] += e.p[1];
            }
        }
        acc
    }

    /// `q(y=1 | x_v=a)`.
    pub fn conditional(&self, view: &[Value]) -> Result<f64> {
        self.schema.validate_view(view)?;
        let m = self.marginal(view);
        let z = m[0] + m[1];
        if z <= 0.0 {
            return Err(Error::Conditioning(format_view(view)));
        }
        Ok(m[1] / z)
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<LabeledDataset> {
        let flat = self.flat_entries();
        let mut cdf = Vec::with_capacity(flat.len());
        let mut acc = 0.0;
        for e in &flat {
            acc += e.p;
            cdf.push(acc);
        }
        let mut rng = Rng::new(seed, 0);
        let samples = (0..n)
            .map(|_| {
                let u = rng.uniform() * acc;
                let i = cdf.partition_point(|&c| c <= u).min(flat.len() - 1);
                let i = (i..flat.len()).find(|&j| flat[j].p > 0.0).unwrap_or(i);
                Sample { x: flat[i].x.iter().map(|&c| Value::Cat(c)).collect(), y: flat[i].y }
            })
            .collect();
        LabeledDataset::new(self.schema.clone(), samples)
    }
}

pub(crate) fn consistent(x: &[u32], view: &[Value]) -> bool {
    x.iter().zip(view).all(|(c, v)| match v {
        Value::Cat(a) => a == c,
        _ => true,
    })
}

pub(crate) fn format_view(view: &[Value]) -> String {
    let mut s = String::from("{");
    let mut first = true;
    for (i, v) in view.iter().enumerate() {
        if !matches!(v, Value::Mask) {
            if !first {
                s.push_str(", ");
            }
            first = false;
            s.push_str(&format!("x{}={}", i + 1, v));
        }
    }
    s.push('}');
    s
}

/// Largest Gauss-Hermite order; the node recurrence underflows beyond it.
pub const MAX_QUADRATURE_NODES: usize = 180;

/// Switch DGP with Bernoulli(0.5) features and a Gaussian-sigmoid label.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridDgp {
    pub gamma: f64,
    pub mean: f64,
    nodes: (Vec<f64>, Vec<f64>),
    /// `E[sigmoid(gamma z)]` for `z ~ N(mean, 1)`.
    pub unobserved_mean: f64,
}

impl HybridDgp {
    pub fn new(gamma: f64, mean: f64, quadrature_nodes: usize) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::config("gamma must be positive"));
        }
        if !mean.is_finite() {
            return Err(Error::config("mean must be finite"));
        }
        if quadrature_nodes == 0 || quadrature_nodes > MAX_QUADRATURE_NODES {
            return Err(Error::config(format!("quadrature nodes must lie in 1..={MAX_QUADRATURE_NODES}")));
        }
        let nodes = gauss_hermite(quadrature_nodes);
        let unobserved_mean = normal_expectation(&nodes, mean, |z| sigmoid(gamma * z));
        Ok(HybridDgp { gamma, mean, nodes, unobserved_mean })
    }

    pub fn schema() -> Schema {
        Schema::new(vec![
            FeatureKind::Real,
            FeatureKind::Real,
            FeatureKind::Cat { card: 2 },
            FeatureKind::Real,
            FeatureKind::Real,
        ])
        .unwrap()
    }

    fn branch(&self, v: &Value) -> f64 {
        match v {
            Value::Real(r) => sigmoid(self.gamma * r),
            _ => self.unobserved_mean,
        }
    }

    /// Exact `q(y=1 | x_v)`: a mixture over the control bit, which is
    /// independent of every other feature.
    pub fn conditional(&self, view: &[Value]) -> Result<f64> {
        Self::schema().validate_view(view)?;
        Ok(match view[2] {
            Value::Cat(1) => self.branch(&view[0]),
            Value::Cat(_) => self.branch(&view[1]),
            _ => 0.5 * self.branch(&view[0]) + 0.5 * self.branch(&view[1]),
        })
    }

    /// `E[f(z)]` for `z ~ N(mean, 1)`.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        normal_expectation(&self.nodes, self.mean, f)
    }
}

/// Cross-attention predictor over three scalar tokens.
///
/// Token `i` scores key `j` with `kappa * x_i * [i == j] * sum(W x)`, and a
/// null key with score `kappa * null_score` and value zero absorbs rows whose
/// real scores vanish.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttentionModel {
    pub alpha: [f64; 3],
    pub beta: [f64; 3],
    pub w: [[f64; 3]; 3],
    pub kappa: f64,
    #[serde(default = "default_null_score")]
    pub null_score: f64,
}

fn default_null_score() -> f64 {
    0.5
}

impl Default for AttentionModel {
    fn default() -> Self {
        AttentionModel {
            alpha: [1.0, -1.0, 0.0],
            beta: [1.0, 1.0, 0.0],
            w: [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
            kappa: 50.0,
            null_score: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttentionOutput {
    pub f: f64,
    /// Row `i`: weights over the three real keys then the null key.
    pub weights: [[f64; 4]; 3],
}

impl AttentionOutput {
    /// Key receiving the most `beta`-weighted attention; lowest index on ties.
    pub fn argmax_key(&self, beta: &[f64; 3]) -> usize {
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for j in 0..3 {
            let s: f64 = (0..3).map(|i| beta[i] * self.weights[i][j]).sum();
            if s > best_score {
                best = j;
                best_score = s;
            }
        }
        best
    }
}

impl AttentionModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::config("kappa must be positive"));
        }
        Ok(())
    }

    pub fn predict(&self, x: &[f64; 3]) -> AttentionOutput {
        let s: f64 = (0..3).map(|r| (0..3).map(|c| self.w[r][c] * x[c]).sum::<f64>()).sum();
        let mut weights = [[0.0; 4]; 3];
        let mut logit = 0.0;
        for i in 0..3 {
            let mut scores = [0.0; 4];
            scores[i] = self.kappa * x[i] * s;
            scores[3] = self.kappa * self.null_score;
            let m = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut z = 0.0;
            for j in 0..4 {
                weights[i][j] = libm::exp(scores[j] - m);
                z += weights[i][j];
            }
            for wj in weights[i].iter_mut() {
                *wj /= z;
            }
            let inner: f64 = (0..3).map(|j| weights[i][j] * self.alpha[j] * x[j]).sum();
            logit += self.beta[i] * inner;
        }
        AttentionOutput { f: sigmoid(logit), weights }
    }
}

/// Raw token values of an attention-DGP input. Categorical codes decode as
/// `x1 = c1`, `x2 = -c2`, `x3 = 2 c3 - 1`; reals pass through.
pub fn attention_decode(x: &[Value]) -> Result<[f64; 3]> {
    if x.len() != 3 {
        return Err(Error::Dimension { expected: 3, got: x.len() });
    }
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = match x[i] {
            Value::Real(r) => r,
            Value::Cat(c) => match i {
                0 => c as f64,
                1 => -(c as f64),
                _ => 2.0 * c as f64 - 1.0,
            },
            _ => return Err(Error::data("attention inputs must be fully observed")),
        };
    }
    Ok(out)
}

/// `rho(x)`: `sigmoid(x1)` when `x3 = 1`, `sigmoid(-x2)` otherwise.
pub fn attention_rho(raw: &[f64; 3]) -> f64 {
    if raw[2] > 0.0 { sigmoid(raw[0]) } else { sigmoid(-raw[1]) }
}

/// Serializable DGP configuration, tagged by `family`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DgpSpec {
    ThreeSwitch {
        #[serde(default = "default_rho")]
        rho: f64,
    },
    FiveDiscrete {
        #[serde(default = "default_rho")]
        rho: f64,
    },
    Hybrid {
        #[serde(default = "default_gamma")]
        gamma: f64,
        #[serde(default)]
        mean: f64,
        #[serde(default = "default_nodes")]
        quadrature_nodes: usize,
    },
    FourBlock {
        #[serde(default = "default_card")]
        card: u32,
        #[serde(default)]
        epsilon: f64,
    },
    Attention,
    Table {
        #[serde(default)]
        path: Option<String>,
        #[serde(default)]
        table: Option<DiscreteDgp>,
    },
}

fn default_rho() -> f64 {
    0.9
}
fn default_gamma() -> f64 {
    5.0
}
fn default_nodes() -> usize {
    64
}
fn default_card() -> u32 {
    8
}

impl DgpSpec {
    pub fn family(&self) -> &'static str {
        match self {
            DgpSpec::ThreeSwitch { .. } => "three_switch",
            DgpSpec::FiveDiscrete { .. } => "five_discrete",
            DgpSpec::Hybrid { .. } => "hybrid",
            DgpSpec::FourBlock { .. } => "four_block",
            DgpSpec::Attention => "attention",
            DgpSpec::Table { .. } => "table",
        }
    }

    /// Default parameters for a family name.
    pub fn from_family(name: &str) -> Result<Self> {
        Ok(match name {
            "three_switch" => DgpSpec::ThreeSwitch { rho: default_rho() },
            "five_discrete" => DgpSpec::FiveDiscrete { rho: default_rho() },
            "hybrid" => DgpSpec::Hybrid { gamma: default_gamma(), mean: 0.0, quadrature_nodes: default_nodes() },
            "four_block" => DgpSpec::FourBlock { card: default_card(), epsilon: 0.0 },
            "attention" => DgpSpec::Attention,
            "table" => DgpSpec::Table { path: None, table: None },
            other => return Err(Error::config(format!("unknown DGP family {other:?}"))),
        })
    }
}

/// Indices of the control input and of the features it switches between.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchLayout {
    pub control: usize,
    /// Feature generating `y` when the control code is 1.
    pub one: usize,
    /// Feature generating `y` when the control code is 0.
    pub zero: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Family {
    Switch { d: usize, rho: f64 },
    Hybrid(HybridDgp),
    FourBlock { card: u32, epsilon: f64 },
    Attention,
    Table,
}

/// A built DGP. Finite families carry their exact joint table.
#[derive(Clone, Debug)]
pub struct Dgp {
    spec: DgpSpec,
    family: Family,
    schema: Schema,
    table: Option<Arc<DiscreteDgp>>,
}

/// Monte Carlo conditional estimate with its sample count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub n: usize,
}

pub fn build_dgp(spec: &DgpSpec) -> Result<Dgp> {
    let check_rho = |rho: f64| {
        if rho > 0.0 && rho < 1.0 {
            Ok(())
        } else {
            Err(Error::config("rho must lie in (0, 1)"))
        }
    };
    let (family, schema) = match spec {
        DgpSpec::ThreeSwitch { rho } => {
            check_rho(*rho)?;
            (Family::Switch { d: 3, rho: *rho }, Schema::categorical(&[2; 3])?)
        }
        DgpSpec::FiveDiscrete { rho } => {
            check_rho(*rho)?;
            (Family::Switch { d: 5, rho: *rho }, Schema::categorical(&[2; 5])?)
        }
        DgpSpec::Hybrid { gamma, mean, quadrature_nodes } => {
            (Family::Hybrid(HybridDgp::new(*gamma, *mean, *quadrature_nodes)?), HybridDgp::schema())
        }
        DgpSpec::FourBlock { card, epsilon } => {
            if *card < 2 {
                return Err(Error::config("four_block needs at least two codes per block"));
            }
            if !(*epsilon >= 0.0 && *epsilon < 0.5) {
                return Err(Error::config("epsilon must lie in [0, 0.5)"));
            }
            (Family::FourBlock { card: *card, epsilon: *epsilon }, Schema::categorical(&[2, *card, 2, *card])?)
        }
        DgpSpec::Attention => (Family::Attention, Schema::categorical(&[3, 3, 2])?),
        DgpSpec::Table { table, .. } => {
            let t = table.as_ref().ok_or_else(|| Error::config("table family needs an inline or loaded table"))?;
            (Family::Table, t.schema().clone())
        }
    };
    let mut dgp = Dgp { spec: spec.clone(), family, schema, table: None };
    dgp.table = match (&dgp.family, spec) {
        (Family::Hybrid(_), _) => None,
        (Family::Table, DgpSpec::Table { table: Some(t), .. }) => Some(Arc::new(t.clone())),
        _ => Some(Arc::new(dgp.enumerate()?)),
    };
    Ok(dgp)
}

impl Dgp {
    pub fn spec(&self) -> &DgpSpec {
        &self.spec
    }

    pub fn family(&self) -> &'static str {
        self.spec.family()
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn dim(&self) -> usize {
        self.schema.len()
    }

    pub fn is_finite(&self) -> bool {
        self.table.is_some()
    }

    pub fn hybrid(&self) -> Option<&HybridDgp> {
        match &self.family {
            Family::Hybrid(h) => Some(h),
            _ => None,
        }
    }

    pub fn table(&self) -> Result<&Arc<DiscreteDgp>> {
        self.table
            .as_ref()
            .ok_or_else(|| Error::unsupported(format!("{} has no finite joint table", self.family())))
    }

    pub fn exact_joint_table(&self) -> Result<DiscreteDgp> {
        self.table().map(|t| (**t).clone())
    }

    /// Control/switched feature indices for the switch-style families.
    pub fn switch_layout(&self) -> Option<SwitchLayout> {
        match self.family {
            Family::Switch { .. } | Family::Hybrid(_) | Family::Attention => {
                Some(SwitchLayout { control: 2, one: 0, zero: 1 })
            }
            Family::FourBlock { .. } => Some(SwitchLayout { control: 0, one: 1, zero: 3 }),
            Family::Table => None,
        }
    }

    /// `q(y=1 | x)` for a full input.
    pub fn prob_y1(&self, x: &[Value]) -> Result<f64> {
        self.schema.validate(x)?;
        match &self.family {
            Family::Hybrid(h) => h.conditional(x),
            _ => self.table()?.conditional(x),
        }
    }

    /// Exact `q(y=1 | x_v=a)`; unobserved positions hold `Value::Mask`.
    pub fn true_conditional(&self, view: &[Value]) -> Result<f64> {
        match &self.family {
            Family::Hybrid(h) => h.conditional(view),
            _ => self.table()?.conditional(view),
        }
    }

    /// Monte Carlo `q(y=1 | x_v=a)`, resampling unobserved coordinates from
    /// their marginals. Only for families with independent coordinates.
    pub fn true_conditional_mc(&self, view: &[Value], n: usize, seed: u64) -> Result<McEstimate> {
        self.schema.validate_view(view)?;
        if n == 0 {
            return Err(Error::config("Monte Carlo needs at least one resample"));
        }
        let mut rng = Rng::new(seed, 0x6d63);
        let mut x = view.to_vec();
        let mut acc = 0.0;
        for _ in 0..n {
            for (i, v) in view.iter().enumerate() {
                if matches!(v, Value::Mask) {
                    x[i] = match (&self.family, self.schema.kind(i)) {
                        (Family::Switch { .. }, _) => Value::Cat(rng.bernoulli(0.5) as u32),
                        (Family::Hybrid(_), FeatureKind::Cat { .. }) => Value::Cat(rng.bernoulli(0.5) as u32),
                        (Family::Hybrid(h), FeatureKind::Real) => Value::Real(h.mean + rng.normal()),
                        _ => return Err(Error::unsupported("Monte Carlo needs independent coordinates")),
                    };
                }
            }
            acc += self.prob_y1(&x)?;
        }
        Ok(McEstimate { value: acc / n as f64, n })
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<LabeledDataset> {
        if n == 0 {
            return Err(Error::config("sample size must be at least 1"));
        }
        if let Family::Table = self.family {
            return self.table()?.sample(n, seed);
        }
        let mut rng = Rng::new(seed, 0);
        let mut samples = Vec::with_capacity(n);
        for _ in 0..n {
            let (x, y) = match &self.family {
                Family::Switch { d, rho } => {
                    let x: Vec<u32> = (0..*d).map(|_| rng.bernoulli(0.5) as u32).collect();
                    let src = if x[2] == 1 { x[0] } else { x[1] };
                    let keep = rng.bernoulli(*rho);
                    (x.into_iter().map(Value::Cat).collect::<Vec<_>>(), if keep { src } else { 1 - src })
                }
                Family::Hybrid(h) => {
                    let x1 = h.mean + rng.normal();
                    let x2 = h.mean + rng.normal();
                    let x3 = rng.bernoulli(0.5) as u32;
                    let x4 = h.mean + rng.normal();
                    let x5 = h.mean + rng.normal();
                    let sel = if x3 == 1 { x1 } else { x2 };
                    let y = rng.bernoulli(sigmoid(h.gamma * sel)) as u32;
                    (vec![Value::Real(x1), Value::Real(x2), Value::Cat(x3), Value::Real(x4), Value::Real(x5)], y)
                }
                Family::FourBlock { card, epsilon } => {
                    let color = rng.below(2) as u32;
                    let b2 = rng.below(*card as u64) as u32;
                    let b4 = rng.below(*card as u64) as u32;
                    let clean = if color == 1 { b2 % 2 } else { b4 % 2 };
                    let flip = rng.bernoulli(*epsilon);
                    let x = vec![Value::Cat(color), Value::Cat(b2), Value::Cat(color), Value::Cat(b4)];
                    (x, if flip { 1 - clean } else { clean })
                }
                Family::Attention => {
                    let z1 = rng.bernoulli(0.5) as u32;
                    let z2 = rng.bernoulli(0.5) as u32;
                    let z3 = rng.bernoulli(0.5);
                    let x = attention_codes(z1, z2, z3);
                    let rho = attention_rho(&attention_decode(&x)?);
                    (x, rng.bernoulli(rho) as u32)
                }
                Family::Table => unreachable!(),
            };
            samples.push(Sample { x, y: BinaryLabel::new(y as u8)? });
        }
        LabeledDataset::new(self.schema.clone(), samples)
    }

    fn enumerate(&self) -> Result<DiscreteDgp> {
        let rows = match &self.family {
            Family::Switch { d, rho } => {
                let px = 1.0 / (1u64 << d) as f64;
                (0..(1u64 << d))
                    .map(|code| {
                        let x: Vec<u32> = (0..*d).rev().map(|i| ((code >> i) & 1) as u32).collect();
                        let src = if x[2] == 1 { x[0] } else { x[1] };
                        let p1 = if src == 1 { *rho } else { 1.0 - rho };
                        (x, px, p1)
                    })
                    .collect()
            }
            Family::FourBlock { card, epsilon } => {
                let px = 1.0 / (2.0 * (*card as f64) * (*card as f64));
                let mut rows = Vec::new();
                for color in 0..2 {
                    for b2 in 0..*card {
                        for b4 in 0..*card {
                            let clean = if color == 1 { b2 % 2 } else { b4 % 2 };
                            let p1 = if clean == 1 { 1.0 - epsilon } else { *epsilon };
                            rows.push((vec![color, b2, color, b4], px, p1));
                        }
                    }
                }
                rows
            }
            Family::Attention => {
                let mut rows = Vec::new();
                for z3 in [false, true] {
                    for z1 in 0..2 {
                        for z2 in 0..2 {
                            let x = attention_codes(z1, z2, z3);
                            let rho = attention_rho(&attention_decode(&x)?);
                            let codes = x.iter().map(|v| v.as_cat().unwrap()).collect();
                            rows.push((codes, 0.125, rho));
                        }
                    }
                }
                rows
            }
            _ => return Err(Error::unsupported("family has no finite support")),
        };
        // Duplicate x rows (attention: z2 is invisible when z3 = 1) merge here.
        let mut merged: BTreeMap<Vec<u32>, (f64, f64)> = BTreeMap::new();
        for (x, px, p1) in rows {
            let e = merged.entry(x).or_insert((0.0, 0.0));
            e.0 += px * (1.0 - p1);
            e.1 += px * p1;
        }
        let flat = merged
            .into_iter()
            .flat_map(|(x, (p0, p1))| {
                [FlatEntry { x: x.clone(), y: BinaryLabel::ZERO, p: p0 }, FlatEntry { x, y: BinaryLabel::ONE, p: p1 }]
            })
            .collect();
        DiscreteDgp::from_flat(self.schema.clone(), flat, DEFAULT_SUPPORT_CAP)
    }
}

fn attention_codes(z1: u32, z2: u32, z3: bool) -> Vec<Value> {
    if z3 {
        vec![Value::Cat(z1 + 1), Value::Cat(0), Value::Cat(1)]
    } else {
        vec![Value::Cat(0), Value::Cat(z2 + 1), Value::Cat(0)]
    }
}
