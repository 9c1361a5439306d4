use certlab::gf2::{find_circuit, Gf2Vec};
use certlab::latin::enumerate_latin;
use certlab::rng::{stream, Purpose};
use rand::Rng;
use serde::Serialize;

/// Signed count of order-4 squares, from an independent brute-force enumeration.
pub const ORDER4_SIGN_SUM: i64 = 576;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

fn latin_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for (n, count, sum) in [(3, 12, 0), (4, 576, ORDER4_SIGN_SUM)] {
        let squares = enumerate_latin(n).expect("small order");
        let signed: i64 = squares.iter().map(|s| s.sign().value()).sum();
        out.push(Check {
            name: if n == 3 {
                "latin_order3"
            } else {
                "latin_order4"
            },
            passed: squares.len() == count && signed == sum,
            detail: format!("{} squares, sign sum {signed}", squares.len()),
        });
    }
    out
}

/// First `k`-subset in lexicographic order whose vectors sum to zero.
fn zero_sum_subset(
    words: &[u64],
    k: usize,
    start: usize,
    acc: u64,
    picked: &mut Vec<usize>,
) -> bool {
    if picked.len() == k {
        return acc == 0;
    }
    for i in start..words.len() {
        picked.push(i);
        if zero_sum_subset(words, k, i + 1, acc ^ words[i], picked) {
            return true;
        }
        picked.pop();
    }
    false
}

/// Smallest dependent subset by exhaustive search; a smallest dependent set is always a circuit.
pub fn brute_circuit(words: &[u64]) -> Option<Vec<usize>> {
    (1..=words.len()).find_map(|k| {
        let mut picked = Vec::new();
        zero_sum_subset(words, k, 0, 0, &mut picked).then_some(picked)
    })
}

/// Compares full-mode circuit search with brute force on `trials` random sets.
pub fn circuit_oracle(trials: usize, seed: u64) -> Check {
    let mut rng = stream(seed, Purpose::Instance, 0);
    let mut mismatches = 0;
    for _ in 0..trials {
        let n = rng.gen_range(1..=7);
        let m = rng.gen_range(1..=7);
        let words: Vec<u64> = (0..m).map(|_| rng.gen_range(0..1u64 << n)).collect();
        let vecs: Vec<Gf2Vec> = words.iter().map(|&w| Gf2Vec::from_word(n, w)).collect();
        let found = find_circuit(&vecs, None)
            .expect("equal lengths")
            .map(|c| c.indices);
        if found != brute_circuit(&words) {
            mismatches += 1;
        }
    }
    Check {
        name: "gf2_circuit_oracle",
        passed: mismatches == 0,
        detail: format!("{mismatches} mismatches in {trials} sets"),
    }
}

pub fn run(seed: u64) -> SelftestReport {
    let mut checks = latin_checks();
    checks.push(circuit_oracle(10_000, seed));
    SelftestReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
