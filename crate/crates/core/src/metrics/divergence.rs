use std::collections::BTreeSet;

use serde::Serialize;

use super::MetricError;
use crate::simulator::OutputDistribution;

fn check_width(p: &OutputDistribution, q: &OutputDistribution) -> Result<(), MetricError> {
    if p.width != q.width {
        return Err(MetricError::WidthMismatch {
            left: p.width,
            right: q.width,
        });
    }
    Ok(())
}

fn support<'a>(p: &'a OutputDistribution, q: &'a OutputDistribution) -> BTreeSet<&'a str> {
    p.probs.keys().chain(q.probs.keys()).map(String::as_str).collect()
}

/// Base-2 Kullback–Leibler divergence `D(p‖q)`. Returns `f64::INFINITY` when
/// `p` puts mass where `q` has none.
pub fn kl_divergence(p: &OutputDistribution, q: &OutputDistribution) -> Result<f64, MetricError> {
    check_width(p, q)?;
    let mut d = 0.0;
    for (key, &pi) in &p.probs {
        if pi <= 0.0 {
            continue;
        }
        let qi = q.get(key);
        if qi <= 0.0 {
            return Ok(f64::INFINITY);
        }
        d += pi * (pi / qi).log2();
    }
    Ok(d.max(0.0))
}

/// Jensen–Shannon distance: square root of the base-2 JS divergence, so it
/// lies in `[0, 1]`.
pub fn js_distance(p: &OutputDistribution, q: &OutputDistribution) -> Result<f64, MetricError> {
    check_width(p, q)?;
    let mut div = 0.0;
    for key in support(p, q) {
        let (pi, qi) = (p.get(key), q.get(key));
        let mi = 0.5 * (pi + qi);
        if pi > 0.0 {
            div += 0.5 * pi * (pi / mi).log2();
        }
        if qi > 0.0 {
            div += 0.5 * qi * (qi / mi).log2();
        }
    }
    Ok(div.clamp(0.0, 1.0).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OisResult {
    pub ois: f64,
    pub jsd: f64,
    pub support_union_size: usize,
}

pub fn compute_ois(reference: &OutputDistribution, test: &OutputDistribution) -> Result<OisResult, MetricError> {
    let jsd = js_distance(reference, test)?;
    Ok(OisResult {
        ois: 1.0 - jsd,
        jsd,
        support_union_size: support(reference, test).len(),
    })
}
