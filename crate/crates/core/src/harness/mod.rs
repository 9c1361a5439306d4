//! Evaluation protocols: worst-of-S deck scoring, involution metric suites
//! and rainbow-basis benchmark drivers.

mod deck_score;
mod involution;
mod reconstruction;
mod rota;
mod table;

pub use deck_score::{deck_degree_buckets, deck_score, DeckScore, ScoreWeights};
pub use involution::{
    evaluate_involution, judge, order_metrics, test_square, InvolutionReport, OrderMetrics,
    SquareOutcome,
};
pub use reconstruction::{
    evaluate_reconstruction, generate_bipartite, run_recon_bench, BipartiteConfig, DeckScoreReport,
    HardNegativeBuffer, ReconBenchConfig, ReconBenchReport, ReconFamily, ReconInstance,
    ReconOutcome, ScrambleOutcome,
};
pub use rota::{
    evaluate_rota, majority, AlwaysTerminate, Bench, BenchConfig, InstanceOutcome, PoolSize,
    RotaBenchReport, StepLimit,
};
pub use table::MetricTable;
