//! Rank statistics over the pooled (snapshot, node) observations: Spearman
//! correlation, the per-snapshot high/low NC-LID split, and the
//! Mann-Whitney U test with probabilities of superiority.

use std::collections::BTreeMap;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::centrality::{CentralityMetric, CentralityVector};
use crate::evaluation::ReconstructionReport;
use crate::lid::NcLidScore;
use crate::scalar::Real;
use crate::NodeId;

/// Pool size at or below which the MWU p-value is computed by exact
/// enumeration of group assignments.
const EXACT_MWU_LIMIT: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum StatsError {
    #[error("sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 3 paired observations, found {0}")]
    TooShort(usize),
    #[error("correlation undefined for a constant sequence")]
    ConstantInput,
    #[error("Mann-Whitney groups must both be non-empty")]
    EmptySample,
    #[error("observation lacks a value for {0:?}")]
    MissingField(ObsField),
}

/// One joined record: a node in a snapshot with its NC-LID, reconstruction
/// metrics and centralities.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation<F> {
    pub snapshot_index: usize,
    pub node: NodeId,
    pub nclid: F,
    pub precision: F,
    pub recall: F,
    pub f1: F,
    pub centralities: BTreeMap<CentralityMetric, F>,
}

/// Field selector for [`correlate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObsField {
    NcLid,
    Precision,
    Recall,
    F1,
    Centrality(CentralityMetric),
}

impl<F: Real> Observation<F> {
    pub fn field(&self, f: ObsField) -> Option<F> {
        match f {
            ObsField::NcLid => Some(self.nclid),
            ObsField::Precision => Some(self.precision),
            ObsField::Recall => Some(self.recall),
            ObsField::F1 => Some(self.f1),
            ObsField::Centrality(m) => self.centralities.get(&m).copied(),
        }
    }
}

/// Average ranks (1-based); tied values share the mean of their rank span.
fn average_ranks<F: Real>(values: &[F]) -> Vec<F> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![F::zero(); values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j (0-based) share the average of ranks i+1 ..= j
        let avg = F::from_count(i + 1 + j) / F::lit(2.0);
        for &idx in &order[i..j] {
            ranks[idx] = avg;
        }
        i = j;
    }
    ranks
}

/// Spearman rank correlation: Pearson correlation of the average-rank
/// transforms. Errors on length mismatch, fewer than 3 pairs, or a constant
/// input.
pub fn spearman<F: Real>(x: &[F], y: &[F]) -> Result<F, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatsError::TooShort(x.len()));
    }
    let constant = |v: &[F]| v.iter().all(|&a| a == v[0]);
    if constant(x) || constant(y) {
        return Err(StatsError::ConstantInput);
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    Ok(pearson(&rx, &ry))
}

fn pearson<F: Real>(x: &[F], y: &[F]) -> F {
    let n = F::from_count(x.len());
    let mean = |v: &[F]| v.iter().copied().sum::<F>() / n;
    let (mx, my) = (mean(x), mean(y));
    let mut cov = F::zero();
    let mut vx = F::zero();
    let mut vy = F::zero();
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        cov += da * db;
        vx += da * da;
        vy += db * db;
    }
    cov / (vx * vy).sqrt()
}

/// Pooled Spearman correlation between two observation fields, with the
/// sample size.
pub fn correlate<F: Real>(
    observations: &[Observation<F>],
    x_field: ObsField,
    y_field: ObsField,
) -> Result<(F, usize), StatsError> {
    let extract = |field: ObsField| -> Result<Vec<F>, StatsError> {
        observations
            .iter()
            .map(|o| o.field(field).ok_or(StatsError::MissingField(field)))
            .collect()
    };
    let x = extract(x_field)?;
    let y = extract(y_field)?;
    Ok((spearman(&x, &y)?, x.len()))
}

/// High/low group labels from [`split_high_low`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HighLow {
    High,
    Low,
}

/// Labels each observation High when its NC-LID is strictly above its own
/// snapshot's mean NC-LID, Low otherwise (values equal to the mean are Low).
pub fn split_high_low<F: Real>(observations: &[Observation<F>]) -> Vec<HighLow> {
    let mut sums: BTreeMap<usize, (F, usize)> = BTreeMap::new();
    for o in observations {
        let e = sums.entry(o.snapshot_index).or_insert((F::zero(), 0));
        e.0 += o.nclid;
        e.1 += 1;
    }
    let means: BTreeMap<usize, F> = sums
        .into_iter()
        .map(|(s, (sum, count))| (s, sum / F::from_count(count)))
        .collect();
    observations
        .iter()
        .map(|o| {
            if o.nclid > means[&o.snapshot_index] {
                HighLow::High
            } else {
                HighLow::Low
            }
        })
        .collect()
}

/// Mann-Whitney U outcome for the H-vs-L comparison.
///
/// `u_h` counts (h, l) pairs with h > l, plus half a point per tie;
/// `ps_h`/`ps_l` are the strict-superiority probabilities (ties absorb the
/// remainder to 1). The p-value is two-sided: exact assignment enumeration
/// for pools of at most 20, otherwise a normal approximation with tie
/// correction and continuity correction. The null is rejected at 0.05.
#[derive(Debug, Clone, PartialEq)]
pub struct MwuResult<F> {
    pub u_h: F,
    pub p_value: F,
    pub reject_null: bool,
    pub mean_h: F,
    pub mean_l: F,
    pub ps_h: F,
    pub ps_l: F,
}

/// Runs the MWU test of stochastic equality between two samples.
pub fn mwu<F: Real>(h: &[F], l: &[F]) -> Result<MwuResult<F>, StatsError> {
    if h.is_empty() || l.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let (n1, n2) = (h.len(), l.len());
    let total_pairs = (n1 * n2) as u64;

    let mut sorted_l: Vec<F> = l.to_vec();
    sorted_l.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let mut gt = 0u64;
    let mut ties = 0u64;
    for &hv in h {
        let below = sorted_l.partition_point(|&lv| lv < hv) as u64;
        let below_or_eq = sorted_l.partition_point(|&lv| lv <= hv) as u64;
        gt += below;
        ties += below_or_eq - below;
    }
    let lt = total_pairs - gt - ties;

    let u_h = F::from_u64(gt).unwrap() + F::lit(0.5) * F::from_u64(ties).unwrap();
    let pooled: Vec<F> = h.iter().chain(l.iter()).copied().collect();
    let p_value = if n1 + n2 <= EXACT_MWU_LIMIT {
        exact_p(&pooled, n1, u_h.to_f64().unwrap())
    } else {
        normal_p(&pooled, n1, n2, u_h.to_f64().unwrap())
    };

    let mean = |v: &[F]| v.iter().copied().sum::<F>() / F::from_count(v.len());
    let pairs_f = F::from_u64(total_pairs).unwrap();
    Ok(MwuResult {
        u_h,
        p_value: F::lit(p_value),
        reject_null: p_value <= 0.05,
        mean_h: mean(h),
        mean_l: mean(l),
        ps_h: F::from_u64(gt).unwrap() / pairs_f,
        ps_l: F::from_u64(lt).unwrap() / pairs_f,
    })
}

/// Exact two-sided p: over all assignments of the pooled values into a
/// group of size `n1`, the fraction whose U deviates from the mean at least
/// as much as the observed U. Rank sums over average ranks reproduce the
/// pair-counting U including ties.
fn exact_p<F: Real>(pooled: &[F], n1: usize, u_obs: f64) -> f64 {
    let n = pooled.len();
    let ranks: Vec<f64> = average_ranks(pooled)
        .iter()
        .map(|r| r.to_f64().unwrap())
        .collect();
    let mu = (n1 * (n - n1)) as f64 / 2.0;
    let dev_obs = (u_obs - mu).abs();
    let offset = (n1 * (n1 + 1)) as f64 / 2.0;
    let mut hits = 0u64;
    let mut total = 0u64;
    for_each_combination(n, n1, |subset| {
        let rank_sum: f64 = subset.iter().map(|&i| ranks[i]).sum();
        let u = rank_sum - offset;
        if (u - mu).abs() >= dev_obs - 1e-9 {
            hits += 1;
        }
        total += 1;
    });
    hits as f64 / total as f64
}

/// Two-sided normal approximation with tie-corrected variance and a 0.5
/// continuity correction.
fn normal_p<F: Real>(pooled: &[F], n1: usize, n2: usize, u_obs: f64) -> f64 {
    let n = pooled.len();
    let mut sorted: Vec<f64> = pooled.iter().map(|v| v.to_f64().unwrap()).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let nf = n as f64;
    let mu = (n1 * n2) as f64 / 2.0;
    let var = (n1 * n2) as f64 / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    if var <= 0.0 {
        return 1.0; // every pooled value tied
    }
    let z = ((u_obs - mu).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).unwrap();
    (2.0 * normal.cdf(-z)).min(1.0)
}

fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    debug_assert!(k >= 1 && k <= n);
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != n - k + i {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Joins per-snapshot NC-LID scores, reconstruction reports and centrality
/// vectors into pooled observations — one per (snapshot, scored node). The
/// slices are indexed by snapshot; reports may skip snapshots (their nodes
/// simply produce no observations).
pub fn build_observations<F: Real>(
    nclid_per_snapshot: &[Vec<NcLidScore<F>>],
    reports: &[ReconstructionReport<F>],
    centralities_per_snapshot: &[Vec<CentralityVector<F>>],
) -> Vec<Observation<F>> {
    let mut observations = Vec::new();
    for report in reports {
        let s = report.snapshot_index;
        let nclid: BTreeMap<NodeId, F> = nclid_per_snapshot[s]
            .iter()
            .map(|score| (score.node, score.value))
            .collect();
        for row in &report.per_node {
            let Some(&value) = nclid.get(&row.node) else {
                continue;
            };
            let centralities = centralities_per_snapshot[s]
                .iter()
                .map(|cv| (cv.metric, cv.values[row.node as usize]))
                .collect();
            observations.push(Observation {
                snapshot_index: s,
                node: row.node,
                nclid: value,
                precision: row.precision,
                recall: row.recall,
                f1: row.f1,
                centralities,
            });
        }
    }
    observations
}
