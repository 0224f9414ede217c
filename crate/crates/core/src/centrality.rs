//! Node centralities: degree, betweenness (Brandes), closeness
//! (component-scaled), eigenvector (power iteration) and shell index
//! (k-core number).

use rayon::prelude::*;

use crate::graph::{bfs_distances, Snapshot};
use crate::scalar::Real;
use crate::NodeId;

/// Sources per parallel work unit in the Brandes accumulation. Fixed so the
/// summation order — and therefore the float result — does not depend on the
/// thread count.
const BRANDES_CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CentralityMetric {
    Degree,
    Betweenness,
    Closeness,
    Eigenvector,
    ShellIndex,
}

impl CentralityMetric {
    pub const ALL: [CentralityMetric; 5] = [
        CentralityMetric::Degree,
        CentralityMetric::Betweenness,
        CentralityMetric::Closeness,
        CentralityMetric::Eigenvector,
        CentralityMetric::ShellIndex,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CentralityMetric::Degree => "degree",
            CentralityMetric::Betweenness => "betweenness",
            CentralityMetric::Closeness => "closeness",
            CentralityMetric::Eigenvector => "eigenvector",
            CentralityMetric::ShellIndex => "shell",
        }
    }
}

impl std::fmt::Display for CentralityMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-node values of one metric, indexed by dense node id; inactive nodes
/// hold zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector<F> {
    pub metric: CentralityMetric,
    pub values: Vec<F>,
}

#[derive(Debug, thiserror::Error)]
pub enum CentralityError {
    #[error("eigenvector power iteration did not converge within {0} iterations")]
    NoConvergence(usize),
}

/// Computes one centrality over the snapshot's active nodes.
pub fn centrality<F: Real>(
    g: &Snapshot,
    metric: CentralityMetric,
) -> Result<CentralityVector<F>, CentralityError> {
    let values = match metric {
        CentralityMetric::Degree => (0..g.node_count() as NodeId)
            .map(|v| F::from_count(g.degree(v)))
            .collect(),
        CentralityMetric::Betweenness => betweenness(g),
        CentralityMetric::Closeness => closeness(g),
        CentralityMetric::Eigenvector => eigenvector(g)?,
        CentralityMetric::ShellIndex => shell_index(g)
            .into_iter()
            .map(|k| F::from_u32(k).unwrap())
            .collect(),
    };
    Ok(CentralityVector { metric, values })
}

/// Brandes accumulation for undirected unweighted graphs, unnormalized:
/// each node's score is the sum over unordered pairs of the fraction of
/// shortest paths passing through it.
fn betweenness<F: Real>(g: &Snapshot) -> Vec<F> {
    let n = g.node_count();
    let chunks: Vec<&[NodeId]> = g.active_nodes().chunks(BRANDES_CHUNK).collect();
    let partials: Vec<Vec<F>> = chunks
        .par_iter()
        .map(|sources| {
            let mut score = vec![F::zero(); n];
            for &s in *sources {
                brandes_from(g, s, &mut score);
            }
            score
        })
        .collect();

    let mut total = vec![F::zero(); n];
    for partial in partials {
        for (t, p) in total.iter_mut().zip(partial) {
            *t += p;
        }
    }
    let half = F::lit(0.5);
    for t in &mut total {
        *t *= half; // each unordered pair was accumulated from both sides
    }
    total
}

fn brandes_from<F: Real>(g: &Snapshot, s: NodeId, score: &mut [F]) {
    let n = g.node_count();
    let mut stack: Vec<NodeId> = Vec::with_capacity(n);
    let mut preds: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut sigma = vec![0u64; n];
    let mut dist: Vec<i64> = vec![-1; n];
    sigma[s as usize] = 1;
    dist[s as usize] = 0;
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        stack.push(v);
        for &w in g.neighbors(v) {
            if dist[w as usize] < 0 {
                dist[w as usize] = dist[v as usize] + 1;
                queue.push_back(w);
            }
            if dist[w as usize] == dist[v as usize] + 1 {
                sigma[w as usize] += sigma[v as usize];
                preds[w as usize].push(v);
            }
        }
    }
    let mut delta = vec![F::zero(); n];
    while let Some(w) = stack.pop() {
        let dw = delta[w as usize];
        let coeff = (F::one() + dw) / F::from_u64(sigma[w as usize]).unwrap();
        for &v in &preds[w as usize] {
            delta[v as usize] += F::from_u64(sigma[v as usize]).unwrap() * coeff;
        }
        if w != s {
            score[w as usize] += dw;
        }
    }
}

/// Closeness with the Wasserman–Faust component scaling:
/// `((r-1)/Σd) · ((r-1)/(n_active-1))` where `r` counts the nodes reachable
/// from `v` (including `v`).
fn closeness<F: Real>(g: &Snapshot) -> Vec<F> {
    let n_active = g.active_nodes().len();
    let mut values = vec![F::zero(); g.node_count()];
    if n_active < 2 {
        return values;
    }
    let computed: Vec<(NodeId, F)> = g
        .active_nodes()
        .par_iter()
        .map(|&v| {
            let dist = bfs_distances(g, v).expect("active source");
            let mut reachable = 0usize;
            let mut sum = 0u64;
            for d in dist.iter().flatten() {
                reachable += 1;
                sum += u64::from(*d);
            }
            if reachable < 2 {
                return (v, F::zero());
            }
            let r1 = F::from_count(reachable - 1);
            let c = (r1 / F::from_u64(sum).unwrap()) * (r1 / F::from_count(n_active - 1));
            (v, c)
        })
        .collect();
    for (v, c) in computed {
        values[v as usize] = c;
    }
    values
}

/// Principal eigenvector of the adjacency restricted to the largest
/// connected component, zero elsewhere, unit Euclidean norm overall.
///
/// Power iteration runs on `A + I` so bipartite components cannot
/// oscillate; the fixed point is the same eigenvector. Tolerance is 1e-10 on
/// the successive-iterate L2 delta (or a few ulps for narrower scalars),
/// with at most 1000 iterations.
fn eigenvector<F: Real>(g: &Snapshot) -> Result<Vec<F>, CentralityError> {
    const MAX_ITERS: usize = 1000;
    let mut values = vec![F::zero(); g.node_count()];
    let Some(component) = largest_component(g) else {
        return Ok(values);
    };
    let tol = F::lit(1e-10).max(F::epsilon() * F::lit(4.0));

    let r = component.len();
    let mut x = vec![F::one() / F::from_count(r).sqrt(); r];
    let mut next = vec![F::zero(); r];
    // local index within the component
    let mut local = vec![usize::MAX; g.node_count()];
    for (i, &v) in component.iter().enumerate() {
        local[v as usize] = i;
    }

    let mut converged = false;
    for _ in 0..MAX_ITERS {
        for (i, &v) in component.iter().enumerate() {
            let mut acc = x[i]; // the +I term
            for &w in g.neighbors(v) {
                acc += x[local[w as usize]];
            }
            next[i] = acc;
        }
        let norm = next.iter().map(|&a| a * a).sum::<F>().sqrt();
        for a in &mut next {
            *a /= norm;
        }
        let delta = x
            .iter()
            .zip(&next)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<F>()
            .sqrt();
        std::mem::swap(&mut x, &mut next);
        if delta <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(CentralityError::NoConvergence(MAX_ITERS));
    }
    for (i, &v) in component.iter().enumerate() {
        values[v as usize] = x[i];
    }
    Ok(values)
}

/// Largest connected component over active nodes; ties go to the component
/// holding the smallest node index. `None` for edgeless snapshots.
fn largest_component(g: &Snapshot) -> Option<Vec<NodeId>> {
    let mut seen = vec![false; g.node_count()];
    let mut best: Option<Vec<NodeId>> = None;
    for &start in g.active_nodes() {
        if seen[start as usize] {
            continue;
        }
        let mut comp = vec![start];
        seen[start as usize] = true;
        let mut head = 0;
        while head < comp.len() {
            let v = comp[head];
            head += 1;
            for &w in g.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        if best.as_ref().map_or(true, |b| comp.len() > b.len()) {
            best = Some(comp);
        }
    }
    best
}

/// Shell index (core number) by iterative degree peeling, O(E).
fn shell_index(g: &Snapshot) -> Vec<u32> {
    let n = g.node_count();
    let degree: Vec<usize> = (0..n as NodeId).map(|v| g.degree(v)).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);

    // bucket sort nodes by degree
    let mut bins = vec![0usize; max_deg + 2];
    for &d in &degree {
        bins[d] += 1;
    }
    let mut start = 0;
    for b in bins.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut order = vec![0 as NodeId; n];
    for v in 0..n {
        pos[v] = bins[degree[v]];
        order[pos[v]] = v as NodeId;
        bins[degree[v]] += 1;
    }
    for d in (1..bins.len()).rev() {
        bins[d] = bins[d - 1];
    }
    bins[0] = 0;

    let mut core = degree;
    for i in 0..n {
        let v = order[i] as usize;
        for &w in g.neighbors(v as NodeId) {
            let w = w as usize;
            if core[w] > core[v] {
                // move w one bucket down: swap with the first node of its bucket
                let dw = core[w];
                let pw = pos[w];
                let pstart = bins[dw];
                let u = order[pstart] as usize;
                if u != w {
                    order[pw] = u as NodeId;
                    order[pstart] = w as NodeId;
                    pos[w] = pstart;
                    pos[u] = pw;
                }
                bins[dw] += 1;
                core[w] -= 1;
            }
        }
    }
    core.into_iter().map(|c| c as u32).collect()
}
