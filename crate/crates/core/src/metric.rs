//! Backbone-discounted lengths and the normalized alpha/bd blend.

use crate::backbone::BackboneStore;
use crate::candidate::CandidateSets;

/// `(1 - b) * d`.
#[inline]
pub fn bd_value(d: i64, b: f64) -> f64 {
    (1.0 - b) * d as f64
}

/// Value ranges over the current candidate edges plus the blend weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSnapshot {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub bd_min: f64,
    pub bd_max: f64,
    pub w: f64,
}

#[inline]
fn normalize(x: f64, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        (x - lo) / (hi - lo)
    } else {
        0.0
    }
}

/// `w * alpha' + (1 - w) * bd'`; a degenerate range normalizes to 0.
#[inline]
pub fn combined_score(alpha: f64, bd: f64, snap: &MetricSnapshot) -> f64 {
    snap.w * normalize(alpha, snap.alpha_min, snap.alpha_max)
        + (1.0 - snap.w) * normalize(bd, snap.bd_min, snap.bd_max)
}

fn frequency_or_zero(backbone: &BackboneStore, i: usize, j: usize) -> f64 {
    backbone.frequency(i, j).unwrap_or(0.0)
}

pub fn snapshot_ranges(sets: &CandidateSets, backbone: &BackboneStore, w: f64) -> MetricSnapshot {
    let mut snap = MetricSnapshot {
        alpha_min: f64::INFINITY,
        alpha_max: f64::NEG_INFINITY,
        bd_min: f64::INFINITY,
        bd_max: f64::NEG_INFINITY,
        w: w.clamp(0.0, 1.0),
    };
    for (i, c) in sets.iter_edges() {
        let bd = bd_value(c.dist, frequency_or_zero(backbone, i, c.to));
        snap.alpha_min = snap.alpha_min.min(c.alpha);
        snap.alpha_max = snap.alpha_max.max(c.alpha);
        snap.bd_min = snap.bd_min.min(bd);
        snap.bd_max = snap.bd_max.max(bd);
    }
    if snap.alpha_min > snap.alpha_max {
        snap.alpha_min = 0.0;
        snap.alpha_max = 0.0;
        snap.bd_min = 0.0;
        snap.bd_max = 0.0;
    }
    snap
}

/// Re-orders every candidate list by the blended score at weight `w`.
pub fn resort_blended(sets: &mut CandidateSets, backbone: &BackboneStore, w: f64) -> MetricSnapshot {
    let snap = snapshot_ranges(sets, backbone, w);
    sets.resort(|i, c| {
        combined_score(c.alpha, bd_value(c.dist, frequency_or_zero(backbone, i, c.to)), &snap)
    });
    snap
}
