//! Skip-gram with negative sampling over walk corpora, with incremental
//! vocabulary growth and in-place continued training.
//!
//! For one (center, context, negatives) tuple the objective is
//!
//! ```text
//! L = −ln σ(u·v⁺) − Σₖ ln σ(−u·vₖ)
//! ```
//!
//! with `u` the center's input vector, `v⁺` the context's output vector and
//! `vₖ` the negatives' output vectors. [`sgns_pair_objective`] and
//! [`sgns_pair_gradients`] expose exactly the math the trainer applies, so
//! the gradient can be validated against finite differences of the
//! objective.
//!
//! Training runs either single-worker (sequential, bit-reproducible given
//! the seed) or with several workers updating the shared matrices lock-free;
//! in the latter mode updates interleave arbitrarily and results are not
//! reproducible run to run, which is the conventional trade-off for SGNS
//! throughput.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Real;
use crate::seeds;
use crate::NodeId;

/// Exponent applied to vocabulary counts for the negative-sampling noise
/// distribution.
const NOISE_EXPONENT: f64 = 0.75;
/// Learning rate floor that each training call decays to.
const LR_FINAL: f64 = 1e-4;

/// Skip-gram hyperparameters. `dim` is the embedding width; `window` the
/// context radius; `negatives` the noise samples per positive pair;
/// `threads = 1` selects the deterministic single-worker mode.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SgnsConfig<F> {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs_initial: usize,
    pub epochs_update: usize,
    pub lr_initial: F,
    pub seed: u64,
    pub threads: usize,
}

impl<F: Real> Default for SgnsConfig<F> {
    fn default() -> Self {
        SgnsConfig {
            dim: 100,
            window: 10,
            negatives: 5,
            epochs_initial: 5,
            epochs_update: 1,
            lr_initial: F::lit(0.025),
            seed: 0,
            threads: 1,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EmbedError {
    #[error("cannot train an initial model on an empty walk corpus")]
    EmptyCorpus,
    #[error("first snapshot has no edges, nothing to initialize from")]
    EmptyInitialSnapshot,
}

/// The evolving skip-gram model: paired input/output matrices over the
/// vocabulary seen so far, plus the noise distribution for negative
/// sampling. The vocabulary only ever grows.
#[derive(Debug, Clone)]
pub struct EmbeddingModel<F> {
    cfg: SgnsConfig<F>,
    nodes: Vec<NodeId>,
    row_of: HashMap<NodeId, usize>,
    input: Vec<F>,
    output: Vec<F>,
    counts: Vec<u64>,
    noise_cdf: Vec<f64>,
    rng: ChaCha8Rng,
    last_losses: Vec<F>,
}

/// Trains a fresh model on the first snapshot's walk corpus.
pub fn train_initial<F: Real>(
    walks: &[Vec<NodeId>],
    cfg: &SgnsConfig<F>,
) -> Result<EmbeddingModel<F>, EmbedError> {
    if walks.is_empty() {
        return Err(EmbedError::EmptyCorpus);
    }
    let mut model = EmbeddingModel {
        cfg: cfg.clone(),
        nodes: Vec::new(),
        row_of: HashMap::new(),
        input: Vec::new(),
        output: Vec::new(),
        counts: Vec::new(),
        noise_cdf: Vec::new(),
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        last_losses: Vec::new(),
    };
    model.absorb(walks);
    model.train(walks, cfg.epochs_initial);
    Ok(model)
}

/// Extends the vocabulary with any unseen nodes in `walks` (fresh vectors
/// from the init distribution) and continues SGNS training on these walks
/// only. An empty batch leaves the model untouched.
pub fn incremental_update<F: Real>(model: &mut EmbeddingModel<F>, walks: &[Vec<NodeId>]) {
    if walks.is_empty() {
        return;
    }
    model.absorb(walks);
    let epochs = model.cfg.epochs_update;
    model.train(walks, epochs);
}

impl<F: Real> EmbeddingModel<F> {
    pub fn dim(&self) -> usize {
        self.cfg.dim
    }

    pub fn config(&self) -> &SgnsConfig<F> {
        &self.cfg
    }

    /// Vocabulary size.
    pub fn vocab_len(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.row_of.contains_key(&node)
    }

    /// Nodes in vocabulary order (insertion = first appearance).
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Input (embedding) vector of a vocabulary node.
    pub fn vector(&self, node: NodeId) -> Option<&[F]> {
        self.row_of
            .get(&node)
            .map(|&r| &self.input[r * self.cfg.dim..(r + 1) * self.cfg.dim])
    }

    /// Output-side vector, exposed for verification.
    pub fn context_vector(&self, node: NodeId) -> Option<&[F]> {
        self.row_of
            .get(&node)
            .map(|&r| &self.output[r * self.cfg.dim..(r + 1) * self.cfg.dim])
    }

    /// Mean objective per epoch of the most recent training call.
    pub fn last_losses(&self) -> &[F] {
        &self.last_losses
    }

    /// Registers unseen nodes and accumulates token counts. New input rows
    /// are drawn uniformly from `[-0.5/dim, +0.5/dim]` per component; output
    /// rows start at zero.
    fn absorb(&mut self, walks: &[Vec<NodeId>]) {
        let dim = self.cfg.dim;
        let half = 0.5 / dim as f64;
        for walk in walks {
            for &node in walk {
                let row = *self.row_of.entry(node).or_insert_with(|| {
                    let r = self.nodes.len();
                    self.nodes.push(node);
                    self.counts.push(0);
                    for _ in 0..dim {
                        self.input.push(F::lit(self.rng.gen_range(-half..half)));
                        self.output.push(F::zero());
                    }
                    r
                });
                self.counts[row] += 1;
            }
        }
        self.noise_cdf = {
            let mut acc = 0.0;
            self.counts
                .iter()
                .map(|&c| {
                    acc += (c as f64).powf(NOISE_EXPONENT);
                    acc
                })
                .collect()
        };
    }

    fn train(&mut self, walks: &[Vec<NodeId>], epochs: usize) {
        let row_walks: Vec<Vec<usize>> = walks
            .iter()
            .map(|w| w.iter().map(|n| self.row_of[n]).collect())
            .collect();
        let tokens: usize = row_walks.iter().map(Vec::len).sum();
        if epochs == 0 || tokens == 0 {
            self.last_losses.clear();
            return;
        }

        let workers = self.cfg.threads.max(1);
        let mats = MatrixPtrs {
            input: self.input.as_mut_ptr(),
            output: self.output.as_mut_ptr(),
            dim: self.cfg.dim,
        };
        let params = SpanParams {
            window: self.cfg.window,
            negatives: self.cfg.negatives,
            lr_initial: self.cfg.lr_initial,
            epochs,
        };

        let epoch_losses: Vec<(F, u64)> = if workers == 1 {
            // SAFETY: exclusive access — `self` is borrowed mutably and no
            // other span runs.
            unsafe { train_span(&mats, &row_walks, &self.noise_cdf, &params, &mut self.rng) }
        } else {
            let base = self.rng.gen::<u64>();
            let shard = tokens.div_ceil(workers);
            let mut shards: Vec<Vec<Vec<usize>>> = vec![Vec::new(); workers];
            let mut filled = 0usize;
            for w in row_walks {
                let idx = (filled / shard).min(workers - 1);
                filled += w.len();
                shards[idx].push(w);
            }
            let noise = &self.noise_cdf;
            let totals = std::thread::scope(|scope| {
                let handles: Vec<_> = shards
                    .iter()
                    .enumerate()
                    .map(|(tid, shard)| {
                        let mats = &mats;
                        let params = &params;
                        scope.spawn(move || {
                            let mut rng =
                                ChaCha8Rng::seed_from_u64(seeds::derive(base, &[tid as u64]));
                            // SAFETY: Hogwild mode — concurrent unsynchronized
                            // row updates are accepted by contract; the
                            // matrices themselves are never resized here.
                            unsafe { train_span(mats, shard, noise, params, &mut rng) }
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().unwrap())
                    .collect::<Vec<_>>()
            });
            let mut combined = vec![(F::zero(), 0u64); epochs];
            for per_thread in totals {
                for (e, (loss, pairs)) in per_thread.into_iter().enumerate() {
                    combined[e].0 += loss;
                    combined[e].1 += pairs;
                }
            }
            combined
        };

        self.last_losses = epoch_losses
            .into_iter()
            .map(|(loss, pairs)| {
                if pairs == 0 {
                    F::zero()
                } else {
                    loss / F::from_u64(pairs).unwrap()
                }
            })
            .collect();
    }
}

struct SpanParams<F> {
    window: usize,
    negatives: usize,
    lr_initial: F,
    epochs: usize,
}

/// Raw views into the two parameter matrices, shareable across worker
/// threads in Hogwild mode.
struct MatrixPtrs<F> {
    input: *mut F,
    output: *mut F,
    dim: usize,
}

unsafe impl<F: Send> Send for MatrixPtrs<F> {}
unsafe impl<F: Send> Sync for MatrixPtrs<F> {}

/// Runs `params.epochs` passes of skip-gram SGD over one walk shard,
/// returning the per-epoch (objective sum, pair count).
///
/// Safety: the caller either holds exclusive access to the matrices or
/// explicitly accepts unsynchronized concurrent updates (Hogwild).
unsafe fn train_span<F: Real>(
    mats: &MatrixPtrs<F>,
    walks: &[Vec<usize>],
    noise_cdf: &[f64],
    params: &SpanParams<F>,
    rng: &mut ChaCha8Rng,
) -> Vec<(F, u64)> {
    let tokens_per_epoch: usize = walks.iter().map(Vec::len).sum();
    let total_tokens = (params.epochs * tokens_per_epoch) as f64;
    let lr0 = params.lr_initial;
    let lr_final = F::lit(LR_FINAL);
    let noise_total = noise_cdf.last().copied().unwrap_or(0.0);

    let mut grad = vec![F::zero(); mats.dim];
    let mut negs = Vec::with_capacity(params.negatives);
    let mut processed = 0usize;
    let mut out = Vec::with_capacity(params.epochs);

    for _ in 0..params.epochs {
        let mut loss_sum = F::zero();
        let mut pairs = 0u64;
        for walk in walks {
            for (i, &center) in walk.iter().enumerate() {
                let progress = F::lit(processed as f64 / total_tokens);
                let lr = lr0 + (lr_final - lr0) * progress;
                processed += 1;

                let lo = i.saturating_sub(params.window);
                let hi = (i + params.window).min(walk.len() - 1);
                for j in lo..=hi {
                    if j == i {
                        continue;
                    }
                    let context = walk[j];
                    negs.clear();
                    for _ in 0..params.negatives {
                        let r = rng.gen::<f64>() * noise_total;
                        let cand = noise_cdf
                            .partition_point(|&c| c <= r)
                            .min(noise_cdf.len() - 1);
                        if cand != context {
                            negs.push(cand);
                        }
                    }
                    loss_sum += step_pair(mats, center, context, &negs, lr, &mut grad);
                    pairs += 1;
                }
            }
        }
        out.push((loss_sum, pairs));
    }
    out
}

/// One SGD step on a (center, context, negatives) tuple; returns the
/// objective at the pre-step parameters. Gradient coefficients are shared
/// with [`sgns_pair_gradients`].
unsafe fn step_pair<F: Real>(
    mats: &MatrixPtrs<F>,
    center_row: usize,
    pos_row: usize,
    neg_rows: &[usize],
    lr: F,
    grad: &mut [F],
) -> F {
    let dim = mats.dim;
    let u = mats.input.add(center_row * dim);
    for g in grad.iter_mut() {
        *g = F::zero();
    }
    let mut loss;
    {
        let v = mats.output.add(pos_row * dim);
        let mut dot = F::zero();
        for d in 0..dim {
            dot += *u.add(d) * *v.add(d);
        }
        let c = positive_coeff(dot);
        loss = -ln_sigmoid(dot);
        for d in 0..dim {
            grad[d] += c * *v.add(d);
            *v.add(d) = *v.add(d) - lr * c * *u.add(d);
        }
    }
    for &nrow in neg_rows {
        let v = mats.output.add(nrow * dim);
        let mut dot = F::zero();
        for d in 0..dim {
            dot += *u.add(d) * *v.add(d);
        }
        let c = negative_coeff(dot);
        loss += -ln_sigmoid(-dot);
        for d in 0..dim {
            grad[d] += c * *v.add(d);
            *v.add(d) = *v.add(d) - lr * c * *u.add(d);
        }
    }
    for d in 0..dim {
        *u.add(d) = *u.add(d) - lr * grad[d];
    }
    loss
}

#[inline]
fn sigmoid<F: Real>(x: F) -> F {
    F::one() / (F::one() + (-x).exp())
}

/// Numerically stable `ln σ(x)`.
#[inline]
fn ln_sigmoid<F: Real>(x: F) -> F {
    if x >= F::zero() {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// ∂L/∂(u·v⁺) for the positive pair.
#[inline]
fn positive_coeff<F: Real>(dot: F) -> F {
    sigmoid(dot) - F::one()
}

/// ∂L/∂(u·vₖ) for a negative sample.
#[inline]
fn negative_coeff<F: Real>(dot: F) -> F {
    sigmoid(dot)
}

/// Negative-sampling objective for one tuple.
pub fn sgns_pair_objective<F: Real>(center: &[F], positive: &[F], negatives: &[Vec<F>]) -> F {
    let dot = |a: &[F], b: &[F]| a.iter().zip(b).map(|(&x, &y)| x * y).sum::<F>();
    let mut loss = -ln_sigmoid(dot(center, positive));
    for neg in negatives {
        loss += -ln_sigmoid(-dot(center, neg));
    }
    loss
}

/// Analytic gradients of [`sgns_pair_objective`] with respect to the
/// center, positive and negative vectors — the exact coefficients the
/// trainer applies.
pub fn sgns_pair_gradients<F: Real>(
    center: &[F],
    positive: &[F],
    negatives: &[Vec<F>],
) -> (Vec<F>, Vec<F>, Vec<Vec<F>>) {
    let dot = |a: &[F], b: &[F]| a.iter().zip(b).map(|(&x, &y)| x * y).sum::<F>();
    let mut grad_center = vec![F::zero(); center.len()];
    let c_pos = positive_coeff(dot(center, positive));
    for (g, &v) in grad_center.iter_mut().zip(positive) {
        *g += c_pos * v;
    }
    let grad_positive: Vec<F> = center.iter().map(|&u| c_pos * u).collect();
    let mut grad_negatives = Vec::with_capacity(negatives.len());
    for neg in negatives {
        let c = negative_coeff(dot(center, neg));
        for (g, &v) in grad_center.iter_mut().zip(neg) {
            *g += c * v;
        }
        grad_negatives.push(center.iter().map(|&u| c * u).collect());
    }
    (grad_center, grad_positive, grad_negatives)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{sample_walks, WalkConfig};
    use crate::graph::Snapshot;

    fn toy_walks() -> Vec<Vec<NodeId>> {
        let g = Snapshot::from_edges(4, [(0, 1), (2, 3)]);
        let cfg = WalkConfig {
            seed: 11,
            ..WalkConfig::<f64>::default()
        };
        sample_walks(&g, g.active_nodes(), &cfg)
    }

    fn small_cfg(seed: u64) -> SgnsConfig<f64> {
        SgnsConfig {
            dim: 16,
            window: 4,
            epochs_initial: 20,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn vectors_have_the_configured_dimension() {
        let cfg = SgnsConfig {
            dim: 10,
            ..small_cfg(1)
        };
        let model = train_initial(&toy_walks(), &cfg).unwrap();
        assert_eq!(model.vocab_len(), 4);
        for &n in model.nodes() {
            assert_eq!(model.vector(n).unwrap().len(), 10);
            assert_eq!(model.context_vector(n).unwrap().len(), 10);
        }
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(
            train_initial::<f64>(&[], &SgnsConfig::default()),
            Err(EmbedError::EmptyCorpus)
        ));
    }

    fn cosine(a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        dot / (na * nb)
    }

    #[test]
    fn disjoint_components_separate() {
        let mut wins = 0;
        for seed in 0..5 {
            let model = train_initial(&toy_walks(), &small_cfg(seed)).unwrap();
            let a = model.vector(0).unwrap();
            let b = model.vector(1).unwrap();
            let c = model.vector(2).unwrap();
            if cosine(a, b) > cosine(a, c) {
                wins += 1;
            }
        }
        assert!(wins >= 4, "separation held in only {wins}/5 seeds");
    }

    #[test]
    fn loss_decreases_over_epochs() {
        let model = train_initial(&toy_walks(), &small_cfg(3)).unwrap();
        let losses = model.last_losses();
        assert_eq!(losses.len(), 20);
        assert!(
            losses.last().unwrap() < losses.first().unwrap(),
            "objective did not improve: {losses:?}"
        );
    }

    #[test]
    fn training_is_reproducible_in_single_worker_mode() {
        let walks = toy_walks();
        let a = train_initial(&walks, &small_cfg(9)).unwrap();
        let b = train_initial(&walks, &small_cfg(9)).unwrap();
        for &n in a.nodes() {
            assert_eq!(a.vector(n).unwrap(), b.vector(n).unwrap());
        }
    }

    #[test]
    fn empty_update_is_a_no_op() {
        let mut model = train_initial(&toy_walks(), &small_cfg(5)).unwrap();
        let before = model.clone();
        incremental_update(&mut model, &[]);
        assert_eq!(model.vocab_len(), before.vocab_len());
        for &n in before.nodes() {
            assert_eq!(model.vector(n).unwrap(), before.vector(n).unwrap());
            assert_eq!(
                model.context_vector(n).unwrap(),
                before.context_vector(n).unwrap()
            );
        }
    }

    #[test]
    fn update_extends_vocabulary_monotonically() {
        let mut model = train_initial(&toy_walks(), &small_cfg(5)).unwrap();
        assert_eq!(model.vocab_len(), 4);
        assert!(!model.contains(4));
        // node 4 walks with node 1
        incremental_update(&mut model, &[vec![4, 1, 4, 1]]);
        assert_eq!(model.vocab_len(), 5);
        assert!(model.contains(4));
        for n in 0..4 {
            assert!(model.contains(n), "old vocabulary must persist");
        }
    }

    #[test]
    fn repeated_updates_are_reproducible() {
        let walks = toy_walks();
        let batch = vec![vec![0 as NodeId, 1, 0, 1, 4, 1]];
        let mut a = train_initial(&walks, &small_cfg(2)).unwrap();
        incremental_update(&mut a, &batch);
        let mut b = train_initial(&walks, &small_cfg(2)).unwrap();
        incremental_update(&mut b, &batch);
        for &n in a.nodes() {
            assert_eq!(a.vector(n).unwrap(), b.vector(n).unwrap());
        }
    }

    #[test]
    fn trainer_step_applies_the_published_gradients() {
        // input row 0 = center; output row 0 = positive, row 1 = negative
        let dim = 4;
        let mut input = vec![0.1f64, -0.2, 0.3, 0.05];
        let mut output = vec![0.02, 0.04, -0.1, 0.2, -0.3, 0.1, 0.0, 0.25];
        let center = input.clone();
        let positive: Vec<f64> = output[0..4].to_vec();
        let negative: Vec<f64> = output[4..8].to_vec();
        let lr = 0.5;

        let mats = MatrixPtrs {
            input: input.as_mut_ptr(),
            output: output.as_mut_ptr(),
            dim,
        };
        let mut grad = vec![0.0; dim];
        let loss = unsafe { step_pair(&mats, 0, 0, &[1], lr, &mut grad) };

        let negatives = [negative.clone()];
        assert!((loss - sgns_pair_objective(&center, &positive, &negatives)).abs() < 1e-12);
        let (g_u, g_pos, g_negs) = sgns_pair_gradients(&center, &positive, &negatives);
        for d in 0..dim {
            assert!((input[d] - (center[d] - lr * g_u[d])).abs() < 1e-12);
            assert!((output[d] - (positive[d] - lr * g_pos[d])).abs() < 1e-12);
            assert!((output[4 + d] - (negative[d] - lr * g_negs[0][d])).abs() < 1e-12);
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let dim = 6;
        let h = 1e-6;
        for _ in 0..20 {
            let rand_vec = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
            };
            let center = rand_vec(&mut rng);
            let positive = rand_vec(&mut rng);
            let negatives: Vec<Vec<f64>> = (0..3).map(|_| rand_vec(&mut rng)).collect();
            let (g_u, g_pos, g_negs) = sgns_pair_gradients(&center, &positive, &negatives);

            let check = |analytic: f64, plus: f64, minus: f64| {
                let numeric = (plus - minus) / (2.0 * h);
                let denom = analytic.abs().max(numeric.abs()).max(1e-8);
                assert!(
                    ((analytic - numeric) / denom).abs() < 1e-4,
                    "analytic {analytic} vs numeric {numeric}"
                );
            };
            for d in 0..dim {
                let mut c = center.clone();
                c[d] += h;
                let plus = sgns_pair_objective(&c, &positive, &negatives);
                c[d] -= 2.0 * h;
                let minus = sgns_pair_objective(&c, &positive, &negatives);
                check(g_u[d], plus, minus);

                let mut p = positive.clone();
                p[d] += h;
                let plus = sgns_pair_objective(&center, &p, &negatives);
                p[d] -= 2.0 * h;
                let minus = sgns_pair_objective(&center, &p, &negatives);
                check(g_pos[d], plus, minus);

                let mut n = negatives.clone();
                n[1][d] += h;
                let plus = sgns_pair_objective(&center, &positive, &n);
                n[1][d] -= 2.0 * h;
                let minus = sgns_pair_objective(&center, &positive, &n);
                check(g_negs[1][d], plus, minus);
            }
        }
    }

    #[test]
    fn multi_worker_mode_still_learns() {
        let cfg = SgnsConfig {
            threads: 3,
            ..small_cfg(4)
        };
        let model = train_initial(&toy_walks(), &cfg).unwrap();
        let a = model.vector(0).unwrap();
        let b = model.vector(1).unwrap();
        let c = model.vector(2).unwrap();
        assert!(cosine(a, b) > cosine(a, c));
    }
}
