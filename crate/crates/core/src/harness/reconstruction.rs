use std::collections::VecDeque;
use std::fs;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::deck_score::{deck_score, DeckScore, ScoreWeights};
use crate::bipartite::reconstruct_bipartite;
use crate::error::{Error, Result};
use crate::graph::{exact_deck_equal, BipartiteIncidence, Deck, Deckable, Graph};
use crate::planar::{generate_planar, reconstruct_planar, PlanarConfig};
use crate::rng::{derive_seed, stream, Purpose};

/// Score of one scrambled deck.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScrambleOutcome {
    pub scramble: usize,
    pub score: DeckScore,
    /// The candidate's deck equals the target deck, checked independently of the score.
    pub exact: bool,
    pub error: Option<String>,
}

/// Worst-of-S evaluation of one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeckScoreReport {
    pub scrambles: Vec<ScrambleOutcome>,
    pub worst: DeckScore,
    pub best: DeckScore,
    /// Every scramble was reconstructed exactly.
    pub success: bool,
}

/// Runs `algorithm` on `scrambles` independent scrambles of `target`'s deck.
///
/// Scramble `s` draws from stream `s` of the scramble purpose, so a longer
/// run sees the scrambles of a shorter one as a prefix. Algorithm errors
/// score zero.
pub fn evaluate_reconstruction<G, F>(
    algorithm: F,
    target: &G,
    scrambles: usize,
    seed: u64,
    weights: &ScoreWeights,
) -> Result<DeckScoreReport>
where
    G: Deckable,
    F: Fn(&Deck) -> Result<G>,
{
    if scrambles == 0 {
        return Err(Error::TooSmall {
            what: "scramble count",
            min: 1,
            got: 0,
        });
    }
    let deck = target.deck();
    let outcomes: Vec<ScrambleOutcome> = (0..scrambles)
        .map(|s| {
            let shown = deck.scrambled(&mut stream(seed, Purpose::Scramble, s as u64));
            let scored = algorithm(&shown).and_then(|h| {
                let score = deck_score(&h, &deck, weights)?;
                Ok((score, exact_deck_equal(&h.deck(), &deck)))
            });
            match scored {
                Ok((score, exact)) => ScrambleOutcome {
                    scramble: s,
                    score,
                    exact,
                    error: None,
                },
                Err(e) => ScrambleOutcome {
                    scramble: s,
                    score: DeckScore::ZERO,
                    exact: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let pick = |better: fn(f64, f64) -> bool| {
        outcomes
            .iter()
            .map(|o| o.score)
            .reduce(|a, b| if better(b.combined, a.combined) { b } else { a })
            .expect("S >= 1")
    };
    let worst = pick(|b, a| b < a);
    let best = pick(|b, a| b > a);
    let success = outcomes.iter().all(|o| o.exact);
    Ok(DeckScoreReport {
        scrambles: outcomes,
        worst,
        best,
        success,
    })
}

/// Failed instances kept for replay, oldest evicted first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardNegativeBuffer<T> {
    capacity: usize,
    items: VecDeque<T>,
}

impl<T> HardNegativeBuffer<T> {
    pub const DEFAULT_CAPACITY: usize = 256;

    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            items: VecDeque::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, item: T) {
        if self.capacity == 0 {
            return;
        }
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(item);
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.items.iter()
    }
}

impl<T: Clone> HardNegativeBuffer<T> {
    /// The buffered items followed by `fresh`.
    pub fn replay(&self, fresh: Vec<T>) -> Vec<T> {
        self.items.iter().cloned().chain(fresh).collect()
    }
}

impl<T: Serialize + DeserializeOwned> HardNegativeBuffer<T> {
    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_vec_pretty(self)?)?;
        Ok(())
    }

    /// Loads a buffer, or starts an empty one with the default capacity if `path` does not exist.
    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Ok(Self::new(Self::DEFAULT_CAPACITY));
        }
        let mut buf: Self = serde_json::from_slice(&fs::read(path)?)?;
        while buf.items.len() > buf.capacity {
            buf.items.pop_front();
        }
        Ok(buf)
    }
}

impl<T> Default for HardNegativeBuffer<T> {
    fn default() -> Self {
        Self::new(Self::DEFAULT_CAPACITY)
    }
}

/// Knobs for the bipartite benchmark generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BipartiteConfig {
    pub density_min: f64,
    pub density_max: f64,
    pub min_degree: usize,
    pub max_attempts: usize,
}

impl Default for BipartiteConfig {
    fn default() -> Self {
        Self {
            density_min: 0.4,
            density_max: 0.7,
            min_degree: 3,
            max_attempts: 10_000,
        }
    }
}

/// A random `n x n` bipartite graph that is 2-connected, not regular, and
/// has minimum degree at least `config.min_degree`.
///
/// Each attempt draws a density uniformly from the configured range and
/// then every edge independently; attempts are retried on fresh streams.
pub fn generate_bipartite(
    n: usize,
    seed: u64,
    config: &BipartiteConfig,
) -> Result<BipartiteIncidence> {
    if !(0.0..=1.0).contains(&config.density_min)
        || config.density_min > config.density_max
        || config.density_max > 1.0
    {
        return Err(Error::Config(format!(
            "bad density range {}..{}",
            config.density_min, config.density_max
        )));
    }
    for attempt in 0..config.max_attempts as u64 {
        let mut rng = stream(seed, Purpose::Generator, attempt);
        let p = rng.gen_range(config.density_min..=config.density_max);
        let mut m = BipartiteIncidence::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                m.set(r, c, rng.gen_bool(p));
            }
        }
        let (rows, cols) = (m.row_sums(), m.col_sums());
        let degrees = || rows.iter().chain(&cols);
        if degrees().any(|&d| d < config.min_degree) || degrees().all(|&d| d == rows[0]) {
            continue;
        }
        if m.to_graph()?.is_biconnected() {
            return Ok(m);
        }
    }
    Err(Error::Generation(format!(
        "no admissible {n}x{n} bipartite graph in {} attempts",
        config.max_attempts
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReconFamily {
    Bipartite,
    Planar,
}

/// Enough to regenerate a benchmark instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReconInstance {
    pub family: ReconFamily,
    /// Vertices per side for bipartite instances, total vertices for planar ones.
    pub size: usize,
    pub seed: u64,
}

impl ReconInstance {
    /// `count` instances cycling through `sizes`, with seeds derived from `seed`.
    pub fn batch(family: ReconFamily, count: usize, sizes: &[usize], seed: u64) -> Vec<Self> {
        (0..count)
            .map(|i| Self {
                family,
                size: sizes[i % sizes.len()],
                seed: derive_seed(seed, Purpose::Instance, i as u64),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconOutcome {
    pub instance: ReconInstance,
    pub vertices: usize,
    pub edges: usize,
    pub report: DeckScoreReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconBenchReport {
    pub family: ReconFamily,
    pub scrambles: usize,
    pub instances: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_worst_score: f64,
    pub outcomes: Vec<ReconOutcome>,
}

/// Shared settings of a reconstruction benchmark run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconBenchConfig {
    pub scrambles: usize,
    pub weights: ScoreWeights,
    pub bipartite: BipartiteConfig,
    pub planar: PlanarConfig,
}

impl Default for ReconBenchConfig {
    fn default() -> Self {
        Self {
            scrambles: 5,
            weights: ScoreWeights::default(),
            bipartite: BipartiteConfig::default(),
            planar: PlanarConfig::default(),
        }
    }
}

fn run_one(inst: &ReconInstance, config: &ReconBenchConfig) -> Result<ReconOutcome> {
    let scramble_seed = derive_seed(inst.seed, Purpose::Scramble, 0);
    match inst.family {
        ReconFamily::Bipartite => {
            let m = generate_bipartite(inst.size, inst.seed, &config.bipartite)?;
            let (u, v) = m.shape();
            let report = evaluate_reconstruction(
                |d| reconstruct_bipartite(d, u, v),
                &m,
                config.scrambles,
                scramble_seed,
                &config.weights,
            )?;
            Ok(ReconOutcome {
                instance: *inst,
                vertices: u + v,
                edges: m.edge_count(),
                report,
            })
        }
        ReconFamily::Planar => {
            let g: Graph = generate_planar(inst.size, inst.seed, &config.planar)?;
            let n = g.vertex_count();
            let report = evaluate_reconstruction(
                |d| reconstruct_planar(d, n),
                &g,
                config.scrambles,
                scramble_seed,
                &config.weights,
            )?;
            Ok(ReconOutcome {
                instance: *inst,
                vertices: n,
                edges: g.edge_count(),
                report,
            })
        }
    }
}

/// Evaluates every instance in parallel and reports them in input order.
pub fn run_recon_bench(
    family: ReconFamily,
    instances: &[ReconInstance],
    config: &ReconBenchConfig,
) -> Result<ReconBenchReport> {
    config.weights.validate()?;
    if let Some(other) = instances.iter().find(|i| i.family != family) {
        return Err(Error::Config(format!(
            "{:?} instance in a {family:?} bench",
            other.family
        )));
    }
    let outcomes = instances
        .par_iter()
        .map(|i| run_one(i, config))
        .collect::<Result<Vec<_>>>()?;
    let successes = outcomes.iter().filter(|o| o.report.success).count();
    let count = outcomes.len();
    let rate = |x: f64| if count == 0 { 0.0 } else { x / count as f64 };
    Ok(ReconBenchReport {
        family,
        scrambles: config.scrambles,
        instances: count,
        successes,
        success_rate: rate(successes as f64),
        mean_worst_score: rate(outcomes.iter().map(|o| o.report.worst.combined).sum()),
        outcomes,
    })
}

impl ReconBenchReport {
    /// Buffers every failed instance, in instance order.
    pub fn record_failures(&self, buffer: &mut HardNegativeBuffer<ReconInstance>) {
        for o in self.outcomes.iter().filter(|o| !o.report.success) {
            buffer.push(o.instance);
        }
    }
}
