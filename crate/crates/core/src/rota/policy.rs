//! The three evolved move-scoring policies, transcribed term by term.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::features::FeatureVector;
use crate::rng::StreamRng;

/// Which evolved scoring rule to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyId {
    /// Rank-5 trap avoidance and circuit breaking.
    Rank5,
    /// Rank-7 endgame pressure with a state-signature congruence bias.
    Rank7,
    /// Rank-generic trap energy and pressure dynamics.
    ScaleAware,
}

/// Moduli of the rank-7 state-signature congruence test.
pub const FORTUNATE_MODULUS: i64 = 7;
pub const CURSED_MODULUS: i64 = 13;

/// Source of the policies' random terms. `Off` makes every draw contribute nothing.
#[derive(Debug, Clone)]
pub enum Noise {
    Off,
    Stream(StreamRng),
}

impl Noise {
    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        match self {
            Noise::Off => 0.0,
            Noise::Stream(rng) => lo + (hi - lo) * rng.gen::<f64>(),
        }
    }

    fn chance(&mut self, p: f64) -> bool {
        match self {
            Noise::Off => false,
            Noise::Stream(rng) => rng.gen::<f64>() < p,
        }
    }
}

impl PolicyId {
    pub fn score(self, f: &FeatureVector, noise: &mut Noise) -> f64 {
        match self {
            PolicyId::Rank5 => rank5(f, noise),
            PolicyId::Rank7 => rank7(f, noise),
            PolicyId::ScaleAware => scale_aware(f, noise),
        }
    }
}

fn flag(x: f64) -> bool {
    x > 0.5
}

fn rank5(f: &FeatureVector, noise: &mut Noise) -> f64 {
    if flag(f.is_terminate_move) {
        return if f.global_num_full_cols >= 5.0 {
            1e9
        } else {
            -1e9
        };
    }
    let mut score = 0.0;

    let num_full = f.global_num_full_cols;
    let delta_valid = f.delta_num_valid;
    let becomes_full = flag(f.target_col_becomes_full);
    let breaks_full = flag(f.source_col_was_full_and_is_not_anymore);
    let is_repair = flag(f.is_repair_move);
    let is_insert = flag(f.is_insert_move);
    let target_deficit = f.target_rank_deficit_after;
    let source_deficit = f.source_rank_deficit_after;
    let circuit_size = f.circuit_size;
    let target_dups = f.target_dup_count_after;

    let (trap_severity, trap_penalty_amplifier) = if circuit_size <= 0.0 {
        (0.0, 1.0)
    } else if circuit_size <= 2.0 {
        (10.0, 2.5)
    } else if circuit_size <= 3.0 {
        (4.0, 1.5)
    } else if circuit_size <= 4.0 {
        (1.5, 1.2)
    } else if circuit_size <= 5.0 {
        (0.5, 1.05)
    } else {
        (0.0, 1.0)
    };
    let is_critical_trap_after = trap_severity >= 1.5;
    let has_trap = trap_severity > 0.0;

    let mut tension_factor = 1.0;
    if has_trap {
        let messiness = target_deficit + source_deficit + target_dups;
        tension_factor = f64::min(1.0 + (trap_severity * 0.08) * (1.0 + messiness), 7.0);
    }

    let phase_expansion = num_full < 3.0;
    let phase_stabilization = (3.0..4.0).contains(&num_full);
    let phase_endgame = num_full >= 4.0;

    let urgency_factor = 1.0 + num_full * 0.4;

    let mut despair_index = 0.0;
    if has_trap {
        despair_index += trap_severity * 0.5;
        if is_critical_trap_after {
            despair_index += 1.0;
        }
        if is_repair {
            despair_index += 1.5 * trap_severity;
            if is_critical_trap_after {
                despair_index += 0.5;
            }
        }
    }
    if delta_valid < 0.0 {
        despair_index += 2.5;
    } else if (delta_valid == 0.0 && !becomes_full) && (phase_endgame || has_trap) {
        despair_index += 1.5;
    }
    let despair_index = f64::min(despair_index, 7.0);

    if is_insert {
        let vetoed = breaks_full
            || is_critical_trap_after
            || (phase_expansion && has_trap)
            || (has_trap && !becomes_full);
        if vetoed {
            return -1e9;
        }
        if has_trap {
            score -= 80000.0 * trap_severity * trap_penalty_amplifier * urgency_factor;
        }
        if !(becomes_full && delta_valid > 0.0) {
            let mut unproductive = 1500.0 * urgency_factor;
            unproductive *= tension_factor;
            unproductive *= 1.0 + despair_index * 0.2;
            score -= unproductive;
        }
    } else if is_repair {
        let mut base_repair_penalty = 3500.0 * urgency_factor;
        if has_trap {
            let raw_discount = base_repair_penalty * (despair_index * 0.5);
            let max_discount = base_repair_penalty + 2000.0 * urgency_factor;
            base_repair_penalty -= f64::min(raw_discount, max_discount);
        }
        score -= base_repair_penalty;

        let trap_was_resolved = !has_trap;
        if source_deficit > 0.0 && !trap_was_resolved {
            score -= 1500.0 * source_deficit * urgency_factor;
        }

        if is_critical_trap_after {
            let mut penalty = 180000.0 * trap_penalty_amplifier * urgency_factor;
            if phase_stabilization || phase_endgame {
                penalty *= 2.5;
            }
            score -= penalty;
        } else if has_trap {
            let penalty_multiplier = if phase_stabilization { 2.0 } else { 1.0 };
            score -= trap_severity
                * 4500.0
                * penalty_multiplier
                * trap_penalty_amplifier
                * urgency_factor;
        } else {
            let mut trap_escape_reward = 300000.0 * urgency_factor;
            if phase_stabilization {
                trap_escape_reward *= 1.4;
            }
            score += trap_escape_reward;
            if target_dups == 0.0 {
                let mut clean_repair_bonus =
                    100000.0 * urgency_factor * (1.0 + despair_index * 0.7);
                if phase_stabilization || phase_endgame {
                    clean_repair_bonus *= 1.6;
                }
                score += clean_repair_bonus;
            }
        }

        let is_endgame_gambit = phase_endgame && becomes_full;
        let is_circuit_breaker = (phase_stabilization || despair_index > 1.0) && trap_was_resolved;
        if breaks_full && (is_endgame_gambit || is_circuit_breaker) {
            let quality_multiplier = if target_deficit == 0.0 { 1.0 } else { 0.8 };
            let sacrifice_bonus =
                160000.0 * urgency_factor * quality_multiplier * (1.0 + despair_index * 0.5);
            score += sacrifice_bonus;
        } else if breaks_full {
            score -= 130000.0 * urgency_factor;
        }
    }

    let phase_bonus_multiplier = if phase_expansion {
        1.5
    } else if phase_stabilization {
        1.2
    } else {
        1.0
    };
    if target_deficit == 0.0 {
        score += 3500.0 * urgency_factor * phase_bonus_multiplier;
    }
    if target_dups == 0.0 {
        score += 3000.0 * urgency_factor * phase_bonus_multiplier;
    }

    if delta_valid > 0.0 {
        let mut progress_reward = 120000.0 * urgency_factor;
        if is_repair {
            progress_reward *= 1.5 + despair_index * 0.5;
        }
        if phase_endgame {
            progress_reward += 30000.0 * urgency_factor;
        }
        score += progress_reward;
    } else if delta_valid < 0.0 {
        let mut regression_penalty = 100000.0 * urgency_factor;
        if is_repair {
            regression_penalty *= 1.2 + despair_index * 0.3;
        }
        score -= regression_penalty;
    }

    score -= 1500.0 * target_deficit * urgency_factor * tension_factor;
    score -= 1000.0 * source_deficit * urgency_factor * tension_factor;

    let mut dup_penalty = 3000.0 * target_dups;
    if target_dups > 1.0 {
        dup_penalty *= 1.5;
    }
    score -= dup_penalty * urgency_factor * tension_factor;

    if phase_endgame || (phase_stabilization && is_repair) || despair_index > 1.0 {
        let noise_mag = 400.0 * urgency_factor * (despair_index * 0.35).exp();
        score += noise.uniform(-noise_mag, noise_mag);
    }
    score
}

fn rank7(f: &FeatureVector, noise: &mut Noise) -> f64 {
    if flag(f.is_terminate_move) {
        return if f.global_num_full_cols >= 7.0 {
            1e9
        } else {
            -1e9
        };
    }
    let mut score = 0.0;

    let num_full = f.global_num_full_cols;
    let delta_valid = f.delta_num_valid;
    let becomes_full = flag(f.target_col_becomes_full);
    let breaks_full = flag(f.source_col_was_full_and_is_not_anymore);
    let is_repair = flag(f.is_repair_move);
    let is_insert = flag(f.is_insert_move);
    let target_deficit = f.target_rank_deficit_after;
    let source_deficit = f.source_rank_deficit_after;
    let circuit_size = f.circuit_size;
    let target_dups = f.target_dup_count_after;

    let phase_endgame = num_full >= 6.0;
    let is_desperate_endgame_state = phase_endgame && !becomes_full && delta_valid <= 0.0;
    let indicator = |b: bool| if b { 1.0 } else { 0.0 };
    let critical_circuit_threshold = 3.0
        + indicator(num_full >= 4.0)
        + indicator(num_full >= 6.0)
        + indicator(is_desperate_endgame_state);
    let has_trap_after = circuit_size > 0.0;
    let is_critical_trap_after = has_trap_after && circuit_size <= critical_circuit_threshold;

    let urgency_factor = 1.0 + (num_full / 7.0).powf(2.5) * 5.8;
    let time_pressure_factor = 1.0 + (num_full / 7.0).powf(2.2) * 4.0;

    if delta_valid > 0.0 {
        let mut reward = 120000.0 * delta_valid;
        if phase_endgame {
            reward *= 1.5;
        }
        score += reward;
    } else if delta_valid < 0.0 {
        score -= 100000.0 * delta_valid.abs();
    }

    if is_insert {
        if breaks_full || is_critical_trap_after {
            return -1e9;
        }
        if becomes_full {
            score += 80000.0;
            if target_deficit == 0.0 && target_dups == 0.0 {
                score += 40000.0;
            }
        } else if delta_valid == 0.0 {
            if target_deficit <= 1.0 && target_dups == 0.0 && !has_trap_after {
                score += 25000.0 * (1.0 + num_full / 7.0);
            }
            let mut stalling_penalty_base = 2000.0;
            if has_trap_after {
                stalling_penalty_base += 15000.0;
                if is_critical_trap_after {
                    stalling_penalty_base += 30000.0;
                }
                stalling_penalty_base += 5000.0 * (target_deficit + target_dups);
            }
            if is_desperate_endgame_state {
                let is_messy_stall = has_trap_after || target_deficit > 1.0 || target_dups > 0.0;
                if is_messy_stall {
                    stalling_penalty_base += 40000.0;
                } else {
                    stalling_penalty_base += noise.uniform(6000.0, 22000.0);
                    if noise.chance(0.6) {
                        score += noise.uniform(7000.0, 18000.0);
                    }
                }
            }
            let endgame_multiplier = if phase_endgame { 2.0 } else { 1.0 };
            score -= stalling_penalty_base * endgame_multiplier * time_pressure_factor;
        }
    } else if is_repair {
        let trap_was_resolved = !has_trap_after;
        if trap_was_resolved {
            let mut reward = 300000.0;
            if phase_endgame {
                reward *= 2.0;
            }
            score += reward;
        }

        let mut trap_penalty = 0.0;
        if is_critical_trap_after {
            trap_penalty = 200000.0;
            if phase_endgame {
                trap_penalty *= 3.0;
            }
        } else if has_trap_after {
            trap_penalty = 50000.0;
            if phase_endgame {
                trap_penalty *= 1.5;
            }
        }
        score -= trap_penalty;

        if breaks_full {
            let mut penalty = 150000.0;
            if trap_was_resolved {
                penalty = -25000.0;
            } else if is_desperate_endgame_state {
                let is_clean_after =
                    !has_trap_after && target_deficit == 0.0 && source_deficit == 0.0;
                if is_clean_after {
                    penalty = -15000.0;
                } else {
                    penalty *= 0.4;
                }
            } else if phase_endgame {
                penalty *= 1.5;
            }
            score -= penalty;
        }

        let mut base_repair_cost = 4000.0;
        if trap_was_resolved {
            base_repair_cost -= 2500.0;
        } else if has_trap_after {
            base_repair_cost += 1000.0 * circuit_size;
        }
        if target_deficit <= 1.0 && target_dups == 0.0 {
            base_repair_cost -= 1500.0;
        }
        let repair_cost_multiplier =
            if phase_endgame && (is_critical_trap_after || is_desperate_endgame_state) {
                0.3
            } else {
                time_pressure_factor
            };
        score -= base_repair_cost * repair_cost_multiplier;
    }

    let quality_penalty =
        (2000.0 * target_deficit + 1500.0 * source_deficit + 3500.0 * target_dups)
            * time_pressure_factor;
    score -= quality_penalty;

    if num_full >= 5.0 {
        score += noise.uniform(-4000.0, 4000.0);
    }

    if num_full >= 4.0 {
        score += signature_bonus(
            num_full,
            target_deficit,
            source_deficit,
            target_dups,
            circuit_size,
        );
    }

    score * urgency_factor
}

/// Rank-7 congruence bias on the integer state signature.
fn signature_bonus(
    num_full: f64,
    target_deficit: f64,
    source_deficit: f64,
    target_dups: f64,
    circuit_size: f64,
) -> f64 {
    // Features are small nonnegative integers, so truncation matches `int()`.
    let state_signature = (num_full * 1e2) as i64
        + (target_deficit * 1e1) as i64
        + (source_deficit * 7.0) as i64
        + (target_dups * 5.0) as i64
        + circuit_size as i64;
    let is_fortunate = state_signature % FORTUNATE_MODULUS == 0;
    let is_cursed = state_signature % CURSED_MODULUS == 0;
    match (is_fortunate, is_cursed) {
        (true, false) => 35000.0,
        (false, true) => -45000.0,
        (true, true) => -80000.0,
        (false, false) => 0.0,
    }
}

fn scale_aware(f: &FeatureVector, noise: &mut Noise) -> f64 {
    let rank = f.rank;
    let num_full = f.global_num_full_cols;
    let progress_ratio = f.progress_ratio;

    if flag(f.is_terminate_move) {
        return if num_full >= rank { 1e12 } else { -1e12 };
    }
    let mut score = 0.0;

    let delta_valid = f.delta_num_valid;
    let becomes_full = flag(f.target_col_becomes_full);
    let breaks_full = flag(f.source_col_was_full_and_is_not_anymore);
    let is_repair = flag(f.is_repair_move);
    let is_insert = flag(f.is_insert_move);
    let target_deficit = f.target_rank_deficit_after;
    let source_deficit = f.source_rank_deficit_after;
    let circuit_size = f.circuit_size;
    let target_dups = f.target_dup_count_after;

    const C_DEFICIT_BASE: f64 = 4000.0;
    const C_DUP_BASE: f64 = 3000.0;

    let rank_scaler = rank / 5.0;

    let trap_energy = if circuit_size > 0.0 {
        20.0 / (circuit_size.max(1.5) - 1.0) * rank_scaler
    } else {
        0.0
    };
    let trap_intensity = if trap_energy > 0.0 {
        f64::min(1.0, trap_energy / (10.0 * rank_scaler + 1e-6))
    } else {
        0.0
    };

    let progress_intensity = progress_ratio;
    let early_midgame_intensity = 1.0 - progress_ratio;

    let mut stagnation_intensity = 0.0;
    if circuit_size == 0.0
        && (target_deficit > 0.0 || target_dups > 0.0 || (is_repair && source_deficit > 0.0))
    {
        let mut stagnation_score = target_deficit * 2.0 + target_dups * 2.0;
        if is_repair {
            stagnation_score += source_deficit;
        }
        stagnation_intensity = f64::min(1.0, (stagnation_score / (rank * 2.0 + 1e-6)) * 0.6);
    }

    let mut pressure = 1.0;
    let columns_remaining = f64::max(1.0, rank - num_full);
    let exponential_rate =
        (8.0 * rank_scaler.sqrt()) * (1.0 - trap_intensity * 0.6 - stagnation_intensity * 0.3);
    let mid_game_start = 0.5;
    let end_game_start = 0.75;
    if progress_ratio > mid_game_start {
        let linear_progress =
            (progress_ratio - mid_game_start) / (end_game_start - mid_game_start + 1e-6);
        pressure += 0.5 * linear_progress * rank_scaler;
    }
    if progress_ratio > end_game_start {
        pressure += (exponential_rate * (progress_ratio - end_game_start)).exp() - 1.0;
    }
    let remaining_ratio = columns_remaining / rank;
    if progress_ratio > 0.8 || columns_remaining <= 3.0 {
        let imminence =
            20.0 * rank_scaler * (1.0 - trap_intensity * 0.7 - stagnation_intensity * 0.3);
        let singularity_pressure = (-imminence * remaining_ratio).exp();
        pressure +=
            singularity_pressure * f64::max(0.0, 1.0 - trap_intensity - stagnation_intensity * 0.5);
    }
    let pressure = f64::max(
        1.0,
        pressure
            * ((1.0 + rank_scaler / 2.0)
                * (1.0 - trap_intensity * 0.2 - stagnation_intensity * 0.1)),
    );

    let mut barrier_porosity = 1.0;
    if is_repair && trap_energy > 0.0 {
        let reduction_from_trap = f64::min(0.8, trap_intensity * 0.8);
        let improvement_signal = if target_deficit == 0.0 && target_dups == 0.0 {
            1.0
        } else if target_deficit < rank / 5.0 || target_dups < 2.0 {
            0.5
        } else {
            0.0
        };
        let reduction_from_improvement =
            f64::min(0.3, improvement_signal * rank_scaler.sqrt() * 0.5);
        let reduction_from_urgency_baseline = f64::min(0.4, rank_scaler.sqrt() * 0.2);
        let total_reduction =
            reduction_from_trap + reduction_from_improvement + reduction_from_urgency_baseline;
        barrier_porosity = 1.0 - f64::min(0.95, total_reduction);
    }
    let mut current_barrier_height = (100000.0 * rank_scaler) * barrier_porosity;

    let mut structural_instability_penalty = 0.0;
    if f64::max(trap_intensity, stagnation_intensity) > 0.1 {
        let degeneracy_term = target_deficit * target_dups;
        let entanglement_term = if is_repair {
            0.5 * source_deficit * target_deficit
        } else {
            0.0
        };
        let total_instability = degeneracy_term + entanglement_term;
        structural_instability_penalty = f64::min(
            (100000.0 * rank_scaler * (1.0 + pressure * 0.5)) * total_instability * trap_intensity,
            750000.0 * rank_scaler,
        );
    }

    let precision_multiplier = f64::min(
        ((1.0 + pressure * 0.5) * rank_scaler)
            * (1.0 + progress_intensity * 1.5 - trap_intensity * 0.75 - stagnation_intensity * 0.5),
        10.0 * rank_scaler * (1.0 + pressure * 0.5),
    );

    let mut singularity_avoidance_penalty = 0.0;
    if target_deficit > 0.0 && target_dups > 0.0 && circuit_size > 0.0 {
        let base_penalty = 1.5e6 * rank_scaler;
        let progress_amplification = (5.0 * progress_ratio).exp() - 1.0;
        singularity_avoidance_penalty =
            base_penalty * (1.0 + progress_amplification) * (1.0 + pressure);
        singularity_avoidance_penalty *= 1.0 - trap_intensity * 0.5;
        singularity_avoidance_penalty = f64::min(
            singularity_avoidance_penalty,
            5.0e6 * rank_scaler * (1.0 + pressure),
        );
    }

    if is_repair
        && breaks_full
        && circuit_size == 0.0
        && target_dups == 0.0
        && target_deficit == 0.0
    {
        let meltdown_crisis_signal = f64::max(trap_intensity, stagnation_intensity * 0.8);
        let meltdown_reward_magnitude =
            250000.0 * rank_scaler * meltdown_crisis_signal * (1.0 + pressure);
        let min_perfect_resolution_reward = 50000.0 * rank_scaler * (1.0 + pressure);
        current_barrier_height =
            -f64::max(meltdown_reward_magnitude, min_perfect_resolution_reward);
    }

    if is_insert {
        if breaks_full {
            return -1e9;
        }
        if delta_valid > 0.0 {
            score += 80000.0
                * delta_valid
                * (1.0 + pressure + early_midgame_intensity * 0.5 + progress_intensity * 0.25);
        } else if delta_valid < 0.0 {
            return -1e9;
        }
        if becomes_full {
            score += 200000.0 * (1.0 + pressure + progress_intensity * 0.5);
        }
        if circuit_size > 0.0 {
            score -= 750000.0 * trap_energy * pressure * (1.0 - early_midgame_intensity * 0.3);
        }
        score -= C_DEFICIT_BASE * target_deficit.powf(1.5) * precision_multiplier;
        score -= C_DUP_BASE * target_dups.powf(1.2) * precision_multiplier;
        score -= structural_instability_penalty;
        score -= singularity_avoidance_penalty;
        if delta_valid == 0.0 && !becomes_full {
            score -= 1000.0 * (1.0 + pressure + progress_intensity * 0.5);
        }
    } else if is_repair {
        score -= 2000.0 * rank_scaler * (1.0 - trap_intensity * 0.5);
        score -= C_DEFICIT_BASE * target_deficit.powf(1.5) * precision_multiplier;
        score -= C_DUP_BASE * target_dups.powf(1.2) * precision_multiplier;
        score -= C_DEFICIT_BASE * source_deficit.powf(1.5) * precision_multiplier;
        score -= structural_instability_penalty;
        score -= singularity_avoidance_penalty;

        if delta_valid > 0.0 {
            score += 80000.0 * delta_valid * (1.0 + pressure + trap_energy * 0.4);
        } else if delta_valid < 0.0 {
            let mut validity_decrease_penalty = 40000.0 * delta_valid * (1.0 + pressure);
            validity_decrease_penalty *=
                1.0 - (trap_intensity * 0.75 * (1.0 - progress_ratio * 0.5));
            score += validity_decrease_penalty;
        }

        score -= current_barrier_height;

        if circuit_size == 0.0 {
            score += 800000.0 * rank_scaler * pressure * (1.0 + trap_intensity);
        } else {
            score -= 40000.0 * trap_energy * pressure;
        }
    }

    if target_deficit == 0.0 {
        score += 2000.0 * rank_scaler * (1.0 + pressure * 0.5 + progress_intensity);
    }
    if target_dups == 0.0 {
        score += 1000.0 * rank_scaler * (1.0 + pressure * 0.5 + progress_intensity);
    }

    let combined_frustration = trap_energy + (stagnation_intensity * 5.0 * rank_scaler);
    let noise_magnitude =
        3500.0 * rank_scaler * f64::min(3.0, combined_frustration / (1.0 + pressure * 0.25 + 1e-6));
    score += noise.uniform(-noise_magnitude, noise_magnitude);

    score
}

#[cfg(test)]
mod tests {
    use super::*;

    fn terminate(full: f64, rank: f64) -> FeatureVector {
        FeatureVector {
            is_terminate_move: 1.0,
            global_num_full_cols: full,
            rank,
            progress_ratio: full / rank,
            ..Default::default()
        }
    }

    #[test]
    fn terminate_scores() {
        let mut off = Noise::Off;
        assert_eq!(PolicyId::Rank5.score(&terminate(5.0, 5.0), &mut off), 1e9);
        assert_eq!(PolicyId::Rank5.score(&terminate(4.0, 5.0), &mut off), -1e9);
        assert_eq!(PolicyId::Rank7.score(&terminate(7.0, 7.0), &mut off), 1e9);
        assert_eq!(
            PolicyId::ScaleAware.score(&terminate(9.0, 9.0), &mut off),
            1e12
        );
        assert_eq!(
            PolicyId::ScaleAware.score(&terminate(8.0, 9.0), &mut off),
            -1e12
        );
    }

    #[test]
    fn insert_vetoes() {
        let mut off = Noise::Off;
        let breaking = FeatureVector {
            is_insert_move: 1.0,
            source_col_was_full_and_is_not_anymore: 1.0,
            rank: 5.0,
            ..Default::default()
        };
        for p in [PolicyId::Rank5, PolicyId::Rank7, PolicyId::ScaleAware] {
            assert_eq!(p.score(&breaking, &mut off), -1e9);
        }
        let parallel = FeatureVector {
            is_insert_move: 1.0,
            circuit_size: 2.0,
            delta_num_valid: -1.0,
            rank: 5.0,
            ..Default::default()
        };
        assert_eq!(PolicyId::Rank5.score(&parallel, &mut off), -1e9);
        assert_eq!(PolicyId::ScaleAware.score(&parallel, &mut off), -1e9);
    }

    /// Clean insert at the very start, worked out by hand from each formula.
    #[test]
    fn opening_insert_scores() {
        let mut off = Noise::Off;
        let f = FeatureVector {
            is_insert_move: 1.0,
            rank: 5.0,
            ..Default::default()
        };
        // 1500 unproductive penalty; +1.5 * (3500 + 3000) phase bonuses.
        assert_eq!(PolicyId::Rank5.score(&f, &mut off), -1500.0 + 9750.0);
        // 25000 stall credit, 2000 stall penalty, urgency 1.
        assert_eq!(PolicyId::Rank7.score(&f, &mut off), 23000.0);
        // Pressure: max(1, 1 * 1.5) = 1.5; stall 1000 * 2.5; bonuses 2000 * 1.75 + 1000 * 1.75.
        assert!((PolicyId::ScaleAware.score(&f, &mut off) - (-2500.0 + 5250.0)).abs() < 1e-9);
    }

    #[test]
    fn trap_energy_of_a_three_circuit() {
        // E = 20 / (max(3, 1.5) - 1) * (5 / 5) = 10; the insert penalty is 750000 * E * P * (1 - 0.3).
        let mut off = Noise::Off;
        let base = FeatureVector {
            is_insert_move: 1.0,
            rank: 5.0,
            delta_num_valid: 0.0,
            ..Default::default()
        };
        let trapped = FeatureVector {
            circuit_size: 3.0,
            ..base
        };
        let clean = PolicyId::ScaleAware.score(&base, &mut off);
        let hit = PolicyId::ScaleAware.score(&trapped, &mut off);
        // Trap intensity 1 lowers the pressure multiplier to 1.5 * 0.8 = 1.2 and the bonus terms with it.
        let pressure = 1.2;
        let expected = -750000.0 * 10.0 * pressure * 0.7 - 1000.0 * (1.0 + pressure)
            + 3000.0 * (1.0 + pressure * 0.5);
        assert!(
            (hit - expected).abs() < 1e-6 * expected.abs(),
            "{hit} vs {expected}"
        );
        assert!(hit < clean);
    }

    #[test]
    fn signature_congruences() {
        assert_eq!(signature_bonus(4.0, 0.0, 0.0, 0.0, 0.0), 0.0);
        assert_eq!(signature_bonus(4.0, 2.0, 0.0, 0.0, 0.0), 35000.0);
        assert_eq!(signature_bonus(5.0, 2.0, 0.0, 0.0, 0.0), -45000.0);
        assert_eq!(signature_bonus(9.0, 1.0, 0.0, 0.0, 0.0), -80000.0);
    }

    #[test]
    fn noise_is_seeded() {
        let f = FeatureVector {
            is_repair_move: 1.0,
            circuit_size: 3.0,
            global_num_full_cols: 4.0,
            rank: 5.0,
            progress_ratio: 0.8,
            ..Default::default()
        };
        let draw = |seed| PolicyId::Rank5.score(&f, &mut Noise::Stream(crate::rng::seeded(seed)));
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
        assert_ne!(draw(3), PolicyId::Rank5.score(&f, &mut Noise::Off));
    }
}
