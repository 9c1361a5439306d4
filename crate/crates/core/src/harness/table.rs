use super::involution::InvolutionReport;
use super::reconstruction::ReconBenchReport;
use super::rota::RotaBenchReport;

/// A report that flattens into a header and string rows for CSV export.
pub trait MetricTable {
    fn header(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
}

fn num(x: f64) -> String {
    format!("{x:.6}")
}

impl MetricTable for InvolutionReport {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "map",
            "n",
            "squares",
            "validity",
            "involution",
            "non_identity",
            "flip_rate",
            "success_rate",
            "residual",
            "residual_even",
            "residual_odd",
            "b2",
            "quality",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.orders
            .iter()
            .map(|m| {
                vec![
                    self.map.clone(),
                    m.order.to_string(),
                    m.squares.to_string(),
                    num(m.validity_rate),
                    num(m.involution_rate),
                    num(m.non_identity_rate),
                    num(m.flip_rate),
                    num(m.success_rate),
                    m.residual_size.to_string(),
                    m.residual_even.to_string(),
                    m.residual_odd.to_string(),
                    num(m.bias_squared),
                    m.quality.map(num).unwrap_or_default(),
                ]
            })
            .collect()
    }
}

impl MetricTable for RotaBenchReport {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "ranks",
            "instances",
            "fitness_generic",
            "fitness_structured",
            "overall_success_rate",
            "average_score",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let ranks: Vec<String> = self.config.ranks.iter().map(usize::to_string).collect();
        vec![vec![
            ranks.join(" "),
            self.outcomes.len().to_string(),
            num(self.fitness_generic),
            num(self.fitness_structured),
            num(self.overall_success_rate),
            num(self.average_score),
        ]]
    }
}

impl MetricTable for ReconBenchReport {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "size",
            "seed",
            "vertices",
            "edges",
            "worst_s_deck",
            "worst_combined",
            "success",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.outcomes
            .iter()
            .map(|o| {
                vec![
                    o.instance.size.to_string(),
                    o.instance.seed.to_string(),
                    o.vertices.to_string(),
                    o.edges.to_string(),
                    num(o.report.worst.s_deck),
                    num(o.report.worst.combined),
                    o.report.success.to_string(),
                ]
            })
            .collect()
    }
}
