//! Plug-in mutual information.

use alloc::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::math::ln;

/// `sum p(a,b) ln[p(a,b) / (p(a) p(b))]` from the empirical contingency
/// table, in nats.
pub fn mi_plugin<A: Ord, B: Ord>(a: &[A], b: &[B]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension { expected: a.len(), got: b.len() });
    }
    if a.is_empty() {
        return Err(Error::data("mutual information needs at least one pair"));
    }
    let n = a.len() as f64;
    let mut joint: BTreeMap<(&A, &B), f64> = BTreeMap::new();
    let mut pa: BTreeMap<&A, f64> = BTreeMap::new();
    let mut pb: BTreeMap<&B, f64> = BTreeMap::new();
    for (x, y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_insert(0.0) += 1.0;
        *pa.entry(x).or_insert(0.0) += 1.0;
        *pb.entry(y).or_insert(0.0) += 1.0;
    }
    if pa.len() == 1 || pb.len() == 1 {
        return Ok(0.0);
    }
    let mut mi = 0.0;
    for ((x, y), c) in &joint {
        mi += (c / n) * ln(c * n / (pa[x] * pb[y]));
    }
    Ok(mi.max(0.0))
}
