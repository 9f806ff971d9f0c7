//! Classifiers over value vectors: a smoothed frequency table and a
//! depth-capped greedy tree.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::xlnx;
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "learner", rename_all = "snake_case")]
pub enum LearnerSpec {
    /// Exact-match counts with `smoothing` pseudo-counts per class.
    FrequencyTable { smoothing: f64 },
    /// Greedy information-gain tree.
    Tree { max_depth: usize, min_leaf: f64, smoothing: f64 },
}

impl LearnerSpec {
    pub fn table() -> Self {
        LearnerSpec::FrequencyTable { smoothing: 0.5 }
    }

    pub fn tree(max_depth: usize) -> Self {
        LearnerSpec::Tree { max_depth, min_leaf: 1.0, smoothing: 0.5 }
    }

    /// Unsmoothed counts; on a joint table these are the exact conditionals.
    pub fn exact() -> Self {
        LearnerSpec::FrequencyTable { smoothing: 0.0 }
    }

    fn smoothing(&self) -> f64 {
        match self {
            LearnerSpec::FrequencyTable { smoothing } | LearnerSpec::Tree { smoothing, .. } => *smoothing,
        }
    }
}

/// One training row.
#[derive(Clone, Debug)]
pub struct Row {
    pub x: Vec<Value>,
    pub class: usize,
    pub weight: f64,
}

/// Class probabilities plus the training weight behind them (0 when the
/// input fell back to the prior).
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub probs: Vec<f64>,
    pub support: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classifier {
    Table(FrequencyTable),
    Tree(Tree),
}

impl Classifier {
    pub fn fit(spec: &LearnerSpec, rows: &[Row], n_classes: usize) -> Result<Self> {
        if n_classes == 0 {
            return Err(Error::config("classifier needs at least one class"));
        }
        if spec.smoothing() < 0.0 {
            return Err(Error::config("smoothing must be non-negative"));
        }
        if rows.iter().any(|r| r.class >= n_classes || !(r.weight >= 0.0)) {
            return Err(Error::data("row class or weight out of range"));
        }
        Ok(match spec {
            LearnerSpec::FrequencyTable { smoothing } => {
                Classifier::Table(FrequencyTable::fit(rows, n_classes, *smoothing))
            }
            LearnerSpec::Tree { max_depth, min_leaf, smoothing } => {
                Classifier::Tree(Tree::fit(rows, n_classes, *max_depth, *min_leaf, *smoothing))
            }
        })
    }

    pub fn n_classes(&self) -> usize {
        match self {
            Classifier::Table(t) => t.n_classes,
            Classifier::Tree(t) => t.n_classes,
        }
    }

    pub fn predict(&self, x: &[Value]) -> Prediction {
        match self {
            Classifier::Table(t) => t.predict(x),
            Classifier::Tree(t) => t.predict(x),
        }
    }
}

fn normalize(counts: &[f64], smoothing: f64) -> Vec<f64> {
    let k = counts.len() as f64;
    let total: f64 = counts.iter().sum::<f64>() + k * smoothing;
    if total <= 0.0 {
        return vec![1.0 / k; counts.len()];
    }
    counts.iter().map(|c| (c + smoothing) / total).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTable {
    n_classes: usize,
    smoothing: f64,
    prior: Vec<f64>,
    /// Sorted by key.
    cells: Vec<(Vec<Value>, Vec<f64>)>,
}

impl FrequencyTable {
    fn fit(rows: &[Row], n_classes: usize, smoothing: f64) -> Self {
        let mut map: BTreeMap<&[Value], Vec<f64>> = BTreeMap::new();
        let mut prior = vec![0.0; n_classes];
        for r in rows {
            map.entry(r.x.as_slice()).or_insert_with(|| vec![0.0; n_classes])[r.class] += r.weight;
            prior[r.class] += r.weight;
        }
        let cells = map.into_iter().map(|(k, v)| (k.to_vec(), v)).collect();
        FrequencyTable { n_classes, smoothing, prior, cells }
    }

    pub fn counts(&self, x: &[Value]) -> Option<&[f64]> {
        self.cells
            .binary_search_by(|(k, _)| k.as_slice().cmp(x))
            .ok()
            .map(|i| self.cells[i].1.as_slice())
    }

    fn predict(&self, x: &[Value]) -> Prediction {
        match self.counts(x) {
            Some(c) if c.iter().sum::<f64>() > 0.0 => {
                Prediction { probs: normalize(c, self.smoothing), support: c.iter().sum() }
            }
            _ => Prediction { probs: normalize(&self.prior, self.smoothing), support: 0.0 },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "test", content = "arg", rename_all = "snake_case")]
pub enum SplitTest {
    /// Pad or mask token.
    IsToken,
    CatEq(u32),
    /// Real value at most the threshold; non-reals fail.
    RealLe(f64),
}

impl SplitTest {
    pub fn passes(&self, v: &Value) -> bool {
        match (self, v) {
            (SplitTest::IsToken, v) => v.is_token(),
            (SplitTest::CatEq(c), Value::Cat(a)) => a == c,
            (SplitTest::RealLe(t), Value::Real(r)) => r <= t,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf { counts: Vec<f64> },
    Split { feature: usize, test: SplitTest, pass: Box<Node>, fail: Box<Node> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    n_classes: usize,
    smoothing: f64,
    root: Node,
}

fn entropy_sum(counts: &[f64]) -> f64 {
    // total * H(counts / total)
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    -counts.iter().map(|&c| xlnx(c / total)).sum::<f64>() * total
}

struct Candidate {
    gain: f64,
    feature: usize,
    test: SplitTest,
}

impl Tree {
    fn fit(rows: &[Row], n_classes: usize, max_depth: usize, min_leaf: f64, smoothing: f64) -> Self {
        let idx: Vec<usize> = (0..rows.len()).collect();
        let root = grow(rows, &idx, n_classes, max_depth, min_leaf);
        Tree { n_classes, smoothing, root }
    }

    fn predict(&self, x: &[Value]) -> Prediction {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { counts } => {
                    return Prediction { probs: normalize(counts, self.smoothing), support: counts.iter().sum() };
                }
                Node::Split { feature, test, pass, fail } => {
                    let v = x.get(*feature).copied().unwrap_or(Value::Mask);
                    node = if test.passes(&v) { pass } else { fail };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn d(n: &Node) -> usize {
            match n {
                Node::Leaf { .. } => 0,
                Node::Split { pass, fail, .. } => 1 + d(pass).max(d(fail)),
            }
        }
        d(&self.root)
    }
}

fn class_counts(rows: &[Row], idx: &[usize], n_classes: usize) -> Vec<f64> {
    let mut c = vec![0.0; n_classes];
    for &i in idx {
        c[rows[i].class] += rows[i].weight;
    }
    c
}

fn grow(rows: &[Row], idx: &[usize], n_classes: usize, depth: usize, min_leaf: f64) -> Node {
    let counts = class_counts(rows, idx, n_classes);
    let total: f64 = counts.iter().sum();
    let pure = counts.iter().filter(|&&c| c > 0.0).count() <= 1;
    if depth == 0 || pure || total < 2.0 * min_leaf {
        return Node::Leaf { counts };
    }
    let parent = entropy_sum(&counts);
    let width = idx.iter().map(|&i| rows[i].x.len()).max().unwrap_or(0);
    let mut best: Option<Candidate> = None;
    let mut consider = |c: Candidate| {
        if c.gain > 1e-12 && best.as_ref().is_none_or(|b| c.gain > b.gain + 1e-12) {
            best = Some(c);
        }
    };
    for f in 0..width {
        let value = |i: usize| rows[i].x.get(f).copied().unwrap_or(Value::Mask);
        // Categorical one-vs-rest and token tests.
        let mut groups: BTreeMap<Option<u32>, Vec<f64>> = BTreeMap::new();
        let mut reals: Vec<(f64, usize, f64)> = Vec::new();
        for &i in idx {
            let v = value(i);
            match v {
                Value::Cat(c) => groups.entry(Some(c)).or_insert_with(|| vec![0.0; n_classes])[rows[i].class] += rows[i].weight,
                Value::Real(r) => reals.push((r, rows[i].class, rows[i].weight)),
                _ => groups.entry(None).or_insert_with(|| vec![0.0; n_classes])[rows[i].class] += rows[i].weight,
            }
        }
        for (key, g) in &groups {
            let gw: f64 = g.iter().sum();
            if gw < min_leaf || total - gw < min_leaf {
                continue;
            }
            let rest: Vec<f64> = counts.iter().zip(g).map(|(a, b)| a - b).collect();
            let gain = parent - entropy_sum(g) - entropy_sum(&rest);
            let test = match key {
                Some(c) => SplitTest::CatEq(*c),
                None => SplitTest::IsToken,
            };
            consider(Candidate { gain, feature: f, test });
        }
        if reals.len() >= 2 {
            reals.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = vec![0.0; n_classes];
            for k in 0..reals.len() - 1 {
                left[reals[k].1] += reals[k].2;
                if reals[k].0 == reals[k + 1].0 {
                    continue;
                }
                let lw: f64 = left.iter().sum();
                if lw < min_leaf || total - lw < min_leaf {
                    continue;
                }
                let rest: Vec<f64> = counts.iter().zip(&left).map(|(a, b)| a - b).collect();
                let gain = parent - entropy_sum(&left) - entropy_sum(&rest);
                let t = 0.5 * (reals[k].0 + reals[k + 1].0);
                consider(Candidate { gain, feature: f, test: SplitTest::RealLe(t) });
            }
        }
    }
    match best {
        None => Node::Leaf { counts },
        Some(c) => {
            let (pass, fail): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| {
                let v = rows[i].x.get(c.feature).copied().unwrap_or(Value::Mask);
                c.test.passes(&v)
            });
            Node::Split {
                feature: c.feature,
                test: c.test,
                pass: Box::new(grow(rows, &pass, n_classes, depth - 1, min_leaf)),
                fail: Box::new(grow(rows, &fail, n_classes, depth - 1, min_leaf)),
            }
        }
    }
}
