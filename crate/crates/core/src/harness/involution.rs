use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::involutions::InvolutionMap;
use crate::latin::{random_latin, Isotopy, LatinSquare};
use crate::rng::{stream, Purpose};

/// What happened to one input square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareOutcome {
    pub valid: bool,
    pub involution: bool,
    pub non_identity: bool,
    pub flipped: bool,
    /// Sign of the input, as +1 or -1.
    pub sign: i64,
    /// Cells changed by the map, when it produced a square.
    pub support: Option<usize>,
}

impl SquareOutcome {
    /// A valid, involutive, sign-reversing image.
    pub fn success(&self) -> bool {
        self.valid && self.involution && self.flipped
    }
}

/// Metrics over the squares of one order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderMetrics {
    pub order: usize,
    pub squares: usize,
    pub validity_rate: f64,
    pub involution_rate: f64,
    pub non_identity_rate: f64,
    pub flip_rate: f64,
    pub success_rate: f64,
    pub residual_size: usize,
    pub residual_even: usize,
    pub residual_odd: usize,
    /// Mean residual sign; zero when the residual set is empty.
    pub bias: f64,
    pub bias_squared: f64,
    /// Mean of `exp(-support / 2n)` over successes, when locality is scored.
    pub quality: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvolutionReport {
    pub map: String,
    pub seed: u64,
    pub isotopy_stress: bool,
    pub locality: bool,
    pub orders: Vec<OrderMetrics>,
}

/// Stream index of square `i` of order `n`, unique across orders.
fn square_index(n: usize, i: usize) -> u64 {
    ((n as u64) << 32) | i as u64
}

/// The `i`-th test square of order `n`, optionally conjugated by its own isotopy.
pub fn test_square(n: usize, i: usize, seed: u64, isotopy_stress: bool) -> LatinSquare {
    let idx = square_index(n, i);
    let sq = random_latin(n, &mut stream(seed, Purpose::Instance, idx));
    if isotopy_stress {
        Isotopy::random(n, &mut stream(seed, Purpose::Isotopy, idx)).apply(&sq)
    } else {
        sq
    }
}

/// Applies `map` to one square and checks every property.
pub fn judge<M: InvolutionMap + ?Sized>(map: &M, sq: &LatinSquare) -> SquareOutcome {
    let sign = sq.sign().value();
    let failed = SquareOutcome {
        valid: false,
        involution: false,
        non_identity: false,
        flipped: false,
        sign,
        support: None,
    };
    let Ok(first) = map.apply(sq) else {
        return failed;
    };
    let image = first.output;
    if image.order() != sq.order() || !image.is_latin() {
        return failed;
    }
    let involution = map.apply(&image).is_ok_and(|back| back.output == *sq);
    SquareOutcome {
        valid: true,
        involution,
        non_identity: image != *sq,
        flipped: image.sign() != sq.sign(),
        sign,
        support: Some(sq.hamming(&image)),
    }
}

/// Runs `map` over `per_order` generated squares of each even order.
pub fn evaluate_involution<M: InvolutionMap + ?Sized>(
    map: &M,
    orders: &[usize],
    per_order: usize,
    seed: u64,
    isotopy_stress: bool,
    locality: bool,
) -> Result<InvolutionReport> {
    if let Some(&n) = orders.iter().find(|&&n| n % 2 == 1) {
        return Err(Error::OddOrder(n));
    }
    if let Some(&n) = orders.iter().find(|&&n| n < 2) {
        return Err(Error::TooSmall {
            what: "order",
            min: 2,
            got: n,
        });
    }
    let orders = orders
        .iter()
        .map(|&n| {
            let outcomes: Vec<SquareOutcome> = (0..per_order)
                .into_par_iter()
                .map(|i| judge(map, &test_square(n, i, seed, isotopy_stress)))
                .collect();
            order_metrics(n, &outcomes, locality)
        })
        .collect();
    Ok(InvolutionReport {
        map: map.name().to_string(),
        seed,
        isotopy_stress,
        locality,
        orders,
    })
}

pub fn order_metrics(n: usize, outcomes: &[SquareOutcome], locality: bool) -> OrderMetrics {
    let total = outcomes.len();
    let rate = |k: usize| {
        if total == 0 {
            0.0
        } else {
            k as f64 / total as f64
        }
    };
    let count = |p: fn(&SquareOutcome) -> bool| outcomes.iter().filter(|o| p(o)).count();
    let residual: Vec<&SquareOutcome> = outcomes.iter().filter(|o| !o.success()).collect();
    let residual_even = residual.iter().filter(|o| o.sign > 0).count();
    let residual_odd = residual.len() - residual_even;
    let bias = if residual.is_empty() {
        0.0
    } else {
        (residual_even as f64 - residual_odd as f64) / residual.len() as f64
    };
    let quality = locality.then(|| {
        let q: Vec<f64> = outcomes
            .iter()
            .filter(|o| o.success())
            .map(|o| (-(o.support.unwrap_or(0) as f64) / (2.0 * n as f64)).exp())
            .collect();
        if q.is_empty() {
            0.0
        } else {
            q.iter().sum::<f64>() / q.len() as f64
        }
    });
    OrderMetrics {
        order: n,
        squares: total,
        validity_rate: rate(count(|o| o.valid)),
        involution_rate: rate(count(|o| o.involution)),
        non_identity_rate: rate(count(|o| o.non_identity)),
        flip_rate: rate(count(|o| o.flipped)),
        success_rate: rate(count(SquareOutcome::success)),
        residual_size: residual.len(),
        residual_even,
        residual_odd,
        bias,
        bias_squared: bias * bias,
        quality,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::involutions::{AppliedMove, Exp3Map, Fallback, MapOutcome};

    struct Identity;

    impl InvolutionMap for Identity {
        fn name(&self) -> &str {
            "identity"
        }

        fn apply(&self, sq: &LatinSquare) -> Result<MapOutcome> {
            Ok(MapOutcome {
                output: sq.clone(),
                applied: AppliedMove::Fallback {
                    fallback: Fallback::SwapRows01,
                },
            })
        }
    }

    struct RowSwap;

    impl InvolutionMap for RowSwap {
        fn name(&self) -> &str {
            "row-swap"
        }

        fn apply(&self, sq: &LatinSquare) -> Result<MapOutcome> {
            Ok(MapOutcome {
                output: sq.swap_rows(0, 1),
                applied: AppliedMove::Fallback {
                    fallback: Fallback::SwapRows01,
                },
            })
        }
    }

    #[test]
    fn identity_control() {
        let r = evaluate_involution(&Identity, &[4, 6], 20, 1, true, true).unwrap();
        for m in &r.orders {
            assert_eq!(
                (
                    m.validity_rate,
                    m.involution_rate,
                    m.non_identity_rate,
                    m.flip_rate
                ),
                (1.0, 1.0, 0.0, 0.0)
            );
            assert_eq!(m.residual_size, 20);
            assert_eq!(m.quality, Some(0.0));
        }
    }

    #[test]
    fn row_swap_control() {
        let r = evaluate_involution(&RowSwap, &[6], 40, 2, false, false).unwrap();
        let m = &r.orders[0];
        assert_eq!(
            (m.involution_rate, m.non_identity_rate, m.flip_rate),
            (1.0, 1.0, 0.0)
        );
        let mean_sign: f64 = (0..40)
            .map(|i| test_square(6, i, 2, false).sign().value() as f64)
            .sum::<f64>()
            / 40.0;
        assert!((m.bias_squared - mean_sign * mean_sign).abs() < 1e-12);
        assert_eq!(m.quality, None);
    }

    #[test]
    fn odd_orders_are_rejected() {
        assert!(matches!(
            evaluate_involution(&Identity, &[4, 5], 1, 0, false, false),
            Err(Error::OddOrder(5))
        ));
    }

    #[test]
    fn stress_changes_inputs_but_not_determinism() {
        assert_ne!(test_square(8, 3, 0, true), test_square(8, 3, 0, false));
        let a = evaluate_involution(&Exp3Map, &[8], 10, 5, true, true).unwrap();
        let b = evaluate_involution(&Exp3Map, &[8], 10, 5, true, true).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let m = &a.orders[0];
        assert_eq!(m.validity_rate, 1.0);
        assert!(m.quality.unwrap() > 0.0);
        assert_eq!(m.residual_even + m.residual_odd, m.residual_size);
    }
}
