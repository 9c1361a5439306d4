use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{self, Purpose};

/// Knobs for the planar instance generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanarConfig {
    /// Deletion attempts per instance; `None` means `n / 2`.
    pub deletion_attempts: Option<usize>,
    /// Fresh seeds tried before giving up when no deletion is accepted.
    pub max_regenerations: usize,
}

impl Default for PlanarConfig {
    fn default() -> Self {
        Self {
            deletion_attempts: None,
            max_regenerations: 64,
        }
    }
}

/// A random non-triangulated planar graph on `n` vertices.
///
/// Starts from `K4`, inserts each new vertex into a random face of the
/// current triangulation, then deletes random edges, keeping a deletion only
/// if the graph stays 2-connected with minimum degree at least 3. At least
/// one deletion is always accepted, so the result has fewer than `3n - 6`
/// edges.
pub fn generate_planar(n: usize, seed: u64, config: &PlanarConfig) -> Result<Graph> {
    if n < 5 {
        return Err(Error::TooSmall {
            what: "planar vertex count (K4 admits no valid deletion)",
            min: 5,
            got: n,
        });
    }
    for attempt in 0..=config.max_regenerations as u64 {
        let mut rng = rng::stream(seed, Purpose::Generator, attempt);
        let mut g = apollonian(n, &mut rng)?;
        if delete_edges(&mut g, config.deletion_attempts.unwrap_or(n / 2), &mut rng) > 0 {
            return Ok(g);
        }
    }
    Err(Error::Generation(format!(
        "no admissible edge deletion for n = {n} after regeneration"
    )))
}

fn apollonian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Graph> {
    let mut g = Graph::from_edges(n, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])?;
    let mut faces: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    for x in 4..n {
        let f = rng.gen_range(0..faces.len());
        let [a, b, c] = faces.swap_remove(f);
        g.add_edge(x, a);
        g.add_edge(x, b);
        g.add_edge(x, c);
        faces.extend([[a, b, x], [a, c, x], [b, c, x]]);
    }
    Ok(g)
}

/// Tries `attempts` random deletions, then keeps scanning until one sticks.
fn delete_edges<R: Rng + ?Sized>(g: &mut Graph, attempts: usize, rng: &mut R) -> usize {
    let mut edges = g.edges();
    edges.shuffle(rng);
    let mut accepted = 0;
    for (i, &(a, b)) in edges.iter().enumerate() {
        if i >= attempts && accepted > 0 {
            break;
        }
        if g.degree(a) <= 3 || g.degree(b) <= 3 {
            continue;
        }
        g.remove_edge(a, b);
        if g.is_biconnected() {
            accepted += 1;
        } else {
            g.add_edge(a, b);
        }
    }
    accepted
}
