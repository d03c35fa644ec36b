//! Binary channel-discrimination tasks in which a non-Gaussian probe
//! strictly beats every Gaussian one.
//!
//! From an `m`-copy witness `W` define `X := 1^⊗m - W/‖W‖∞`, a positive
//! operator with `tr[X σ^⊗m] ∈ [0, 1]` on free states but
//! `tr[X ρ^⊗m] = 1 + ε/‖W‖∞ > 1` on the witnessed state. The task hides a
//! bit in a pair of channels whose classical two-outcome outputs are biased
//! by `±tr[X η^⊗m]/(2‖X‖∞)`; the optimal guessing probability with probe
//! `η` is then `½(1 + tr[X η^⊗m]/‖X‖∞)`, so `ρ` certifiably outperforms
//! the analytic Gaussian cap `½(1 + 1/‖X‖∞)`.
//!
//! The single-copy companion [`worst_case_single_copy`] realizes, for a
//! fixed Gaussian reference `σ`, the observable ratio
//! `tr[ρX]/tr[σX] = exp(D_max(ρ‖σ))`; its infimum over references ties the
//! operational advantage back to the robustness measure.

use serde::Serialize;

use crate::fock::{DensityState, FockOperator};
use crate::gaussian::{synthesize, GaussianParams};
use crate::linalg;
use crate::optimize::{search_gaussian, OptimizerConfig, SearchStatus};
use crate::robustness::optimal_observable;
use crate::witness::WitnessReport;
use crate::{C64, Error, Result};

/// A two-channel, equal-prior discrimination task with payoff operator `X`.
///
/// The JSON form carries the scalar data and provenance; the operator is
/// exported separately in the binary operator format when needed.
#[derive(Debug, Clone, Serialize)]
pub struct DiscriminationTask {
    /// Payoff operator on the `m`-fold product space, `X = 1^⊗m - W/‖W‖∞`
    /// for witness-derived tasks.
    #[serde(skip)]
    pub x: FockOperator,
    /// Copy count.
    pub m: usize,
    /// `‖X‖∞`.
    pub x_norm: f64,
    /// Channel priors, fixed at (½, ½).
    pub prior: [f64; 2],
    /// Human-readable provenance line.
    pub description: String,
    /// Margin of the originating witness.
    pub epsilon: f64,
    /// SHA-256 of the originating witness operator.
    pub witness_hash: String,
}

impl DiscriminationTask {
    /// Fock cutoff of each tensor factor.
    pub fn factor_cutoff(&self) -> usize {
        self.x.cutoff()
    }

    /// Mode count of each tensor factor.
    pub fn factor_modes(&self) -> usize {
        self.x.modes() / self.m
    }

    /// The analytic ceiling on any Gaussian probe's success probability,
    /// `½(1 + 1/‖X‖∞)`. Certificates compare against this, never against
    /// a numeric supremum.
    pub fn gaussian_cap(&self) -> f64 {
        0.5 * (1.0 + 1.0 / self.x_norm)
    }

    /// Normalized payoff `tr[X η^⊗m]/‖X‖∞ ∈ [0, 1]` of a probe.
    pub fn payoff(&self, eta: &DensityState) -> Result<f64> {
        let value = eta.tensor_power(self.m)?.expectation(&self.x)?;
        Ok((value / self.x_norm).clamp(0.0, 1.0))
    }

    /// Output distribution of channel `which ∈ {0, 1}` on probe `η`: the
    /// affine map `η ↦ (½ ± tr[X η^⊗m]/(2‖X‖∞))` onto two classical
    /// outcomes. Channel 1 is channel 0 with the bias sign flipped.
    pub fn channel_output(&self, which: usize, eta: &DensityState) -> Result<[f64; 2]> {
        if which > 1 {
            return Err(Error::InvalidDimension(format!(
                "binary task has channels 0 and 1, got {which}"
            )));
        }
        let bias = 0.5 * self.payoff(eta)?;
        if which == 0 {
            Ok([0.5 + bias, 0.5 - bias])
        } else {
            Ok([0.5 - bias, 0.5 + bias])
        }
    }
}

/// Build the task whose payoff operator is `X = 1^⊗m - W/‖W‖∞`.
///
/// `X` is validated to be positive with spectrum inside `[0, 2]` (up to
/// `1e-10` roundoff): positivity follows from `W ≤ ‖W‖∞·1`, and because a
/// working witness is somewhere negative, the top of the spectrum exceeds
/// 1 — the payoff is *not* bounded by the identity, which is why channel
/// outputs divide by `‖X‖∞`.
pub fn task_from_witness(w: &WitnessReport) -> Result<DiscriminationTask> {
    if w.op_norm <= 0.0 {
        return Err(Error::InvalidState(
            "witness operator norm must be positive".into(),
        ));
    }
    let side_modes = w.operator.modes();
    let id = FockOperator::identity(w.operator.cutoff(), side_modes)?;
    let x = id.add_scaled(C64::new(-1.0 / w.op_norm, 0.0), &w.operator)?;

    let spectrum = linalg::eigvalsh(x.matrix())?;
    let (lo, hi) = (spectrum[0], *spectrum.last().unwrap());
    if lo < -1e-10 || hi > 2.0 + 1e-10 {
        return Err(Error::InvalidState(format!(
            "payoff spectrum [{lo:.3e}, {hi:.3e}] escapes [0, 2]"
        )));
    }
    let x_norm = hi.max(lo.abs());

    Ok(DiscriminationTask {
        x,
        m: w.m,
        x_norm,
        prior: [0.5, 0.5],
        description: format!(
            "binary discrimination task from a {}-copy witness (margin {:.6e}, operator {})",
            w.m,
            w.epsilon,
            &w.witness_hash()[..16],
        ),
        epsilon: w.epsilon,
        witness_hash: w.witness_hash(),
    })
}

/// Optimal success probability of guessing the channel with probe `η`:
/// `½(1 + tr[X η^⊗m]/‖X‖∞)`, always in `[½, 1]`.
///
/// This is the two-outcome optimum: the channel outputs are classical
/// distributions `(½±b, ½∓b)`, and the best decision rule achieves
/// `½ + |b|`.
pub fn p_succ_binary(task: &DiscriminationTask, eta: &DensityState) -> Result<f64> {
    Ok(0.5 * (1.0 + task.payoff(eta)?))
}

/// Outcome of the numeric search for the best Gaussian probe.
#[derive(Debug, Clone, Serialize)]
pub struct GaussianSup {
    /// Best success probability found (a lower bound on the true
    /// Gaussian supremum).
    pub numeric_sup: f64,
    /// Parameters attaining it.
    pub argmax: GaussianParams,
    /// The analytic ceiling `½(1 + 1/‖X‖∞)` the certificate uses instead.
    pub cap: f64,
    /// Search status of the winning branch.
    pub status: SearchStatus,
}

/// Multistart maximization of [`p_succ_binary`] over single-mode Gaussian
/// probes — a tightness diagnostic. The returned value is a lower bound on
/// the true supremum; certificates use the analytic `cap` instead.
pub fn gaussian_sup_p_succ(
    task: &DiscriminationTask,
    cfg: &OptimizerConfig,
) -> Result<GaussianSup> {
    if task.factor_modes() != 1 {
        return Err(Error::InvalidDimension(
            "Gaussian probe search is single-mode".into(),
        ));
    }
    let cutoff = task.factor_cutoff();
    let seeds = [
        GaussianParams::vacuum(),
        GaussianParams::thermal(0.3),
        GaussianParams { r: 0.2, ..GaussianParams::vacuum() },
        GaussianParams { alpha: [0.5, 0.0], ..GaussianParams::vacuum() },
    ];
    let objective = |p: &GaussianParams| match synthesize(p, cutoff) {
        Ok(sigma) => match p_succ_binary(task, &sigma) {
            Ok(v) => -v,
            Err(_) => f64::INFINITY,
        },
        Err(_) => f64::INFINITY,
    };
    let out = search_gaussian(objective, cfg, &seeds)?;
    Ok(GaussianSup {
        numeric_sup: -out.best_value,
        argmax: out.best_params,
        cap: task.gaussian_cap(),
        status: out.status,
    })
}

/// Certified advantage of the witnessed state: `p_succ(ρ) / cap` with the
/// analytic Gaussian cap in the denominator. Strictly above 1 whenever the
/// task came from a sound witness for `ρ`.
pub fn advantage_ratio(task: &DiscriminationTask, rho: &DensityState) -> Result<f64> {
    Ok(p_succ_binary(task, rho)? / task.gaussian_cap())
}

/// Single-copy worst-case advantage against a *fixed* Gaussian reference:
/// `tr[ρX]/tr[σX]` for the optimal observable `X`, which equals
/// `exp(D_max(ρ‖σ)) = 1 + ` the fixed-reference robustness.
pub fn worst_case_single_copy(rho: &DensityState, sigma: &GaussianParams) -> Result<f64> {
    let reference = synthesize(sigma, rho.cutoff())?;
    let x = optimal_observable(rho, &reference)?;
    let num = rho.expectation(&x)?;
    let den = reference.expectation(&x)?;
    if den <= 0.0 {
        return Err(Error::InvalidState(format!(
            "reference expectation {den:.3e} not positive"
        )));
    }
    Ok(num / den)
}

/// Infimum of [`worst_case_single_copy`] over Gaussian references by
/// multistart search; approaches `1 + R` from above as the budget grows.
pub fn worst_case_infimum(
    rho: &DensityState,
    cfg: &OptimizerConfig,
) -> Result<(f64, GaussianParams)> {
    if rho.modes() != 1 {
        return Err(Error::InvalidDimension(
            "Gaussian reference search is single-mode".into(),
        ));
    }
    let seeds = [
        GaussianParams::vacuum(),
        GaussianParams::thermal(0.5),
        GaussianParams::thermal(1.0),
        GaussianParams { r: 0.2, ..GaussianParams::vacuum() },
    ];
    let objective =
        |p: &GaussianParams| worst_case_single_copy(rho, p).unwrap_or(f64::INFINITY);
    let out = search_gaussian(objective, cfg, &seeds)?;
    Ok((out.best_value, out.best_params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::thermal_state;
    use crate::robustness::{dmax, robustness_fixed};
    use crate::witness::two_copy_witness;
    use ndarray::Array2;

    fn lcg_density(n: usize, seed: u64) -> DensityState {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let g = Array2::from_shape_fn((n, n), |_| C64::new(next(), next()));
        let psd = g.dot(&linalg::adjoint(&g));
        let tr = linalg::trace(&psd).re;
        let mat = psd.mapv(|z| z / C64::new(tr, 0.0));
        DensityState::new(FockOperator::new(mat, n, 1).unwrap(), 0.0).unwrap()
    }

    fn one_photon_task(cutoff: usize, eps: f64) -> (DensityState, DiscriminationTask) {
        let rho = DensityState::fock(1, cutoff).unwrap();
        let w = two_copy_witness(&rho, eps).unwrap();
        (rho, task_from_witness(&w).unwrap())
    }

    #[test]
    fn task_preserves_witness_geometry() {
        let eps = 0.2;
        let (rho, task) = one_photon_task(10, eps);
        let w = two_copy_witness(&rho, eps).unwrap();
        // tr[X ρ^⊗2] = 1 + ε/‖W‖∞ because tr[ρ^⊗2] = 1 and tr[Wρ^⊗2] = −ε.
        let raw = rho.tensor_power(2).unwrap().expectation(&task.x).unwrap();
        assert!(
            (raw - (1.0 + eps / w.op_norm)).abs() < 1e-10,
            "{raw} vs {}",
            1.0 + eps / w.op_norm
        );
        let spectrum = linalg::eigvalsh(task.x.matrix()).unwrap();
        assert!(spectrum[0] >= -1e-10);
        assert!(*spectrum.last().unwrap() <= 2.0 + 1e-10);
        assert!(task.x_norm > 1.0, "a working witness pushes ‖X‖∞ above 1");
        assert_eq!(task.prior, [0.5, 0.5]);
        assert_eq!(task.witness_hash, w.witness_hash());
    }

    #[test]
    fn channel_outputs_are_distributions() {
        let (_, task) = one_photon_task(8, 0.15);
        for seed in 0..10u64 {
            let eta = lcg_density(8, 40 + seed);
            let p0 = task.channel_output(0, &eta).unwrap();
            let p1 = task.channel_output(1, &eta).unwrap();
            for p in [p0, p1] {
                assert!(p[0] >= 0.0 && p[1] >= 0.0, "{p:?}");
                assert!((p[0] + p[1] - 1.0).abs() < 1e-12);
            }
            assert_eq!(p0[0], p1[1]);
            assert_eq!(p0[1], p1[0]);
        }
        assert!(task.channel_output(2, &lcg_density(8, 1)).is_err());
    }

    #[test]
    fn p_succ_matches_brute_force_decision_rule() {
        let (rho, task) = one_photon_task(8, 0.15);
        let mut probes = vec![rho];
        for seed in 0..8u64 {
            probes.push(lcg_density(8, 90 + seed));
        }
        for eta in &probes {
            let fast = p_succ_binary(&task, eta).unwrap();
            // Exhaustive optimum over decision rules on the classical
            // outputs: guess the channel with the larger posterior at each
            // outcome.
            let p0 = task.channel_output(0, eta).unwrap();
            let p1 = task.channel_output(1, eta).unwrap();
            let brute = 0.5 * (p0[0].max(p1[0]) + p0[1].max(p1[1]));
            assert!((fast - brute).abs() < 1e-12, "{fast} vs {brute}");
            assert!((0.5..=1.0).contains(&fast));
        }
    }

    #[test]
    fn gaussian_probes_stay_below_cap() {
        let (_, task) = one_photon_task(14, 0.2);
        let cap = task.gaussian_cap();
        for params in [
            GaussianParams::vacuum(),
            GaussianParams::thermal(0.4),
            GaussianParams { r: 0.15, ..GaussianParams::vacuum() },
            GaussianParams { alpha: [0.6, -0.3], ..GaussianParams::vacuum() },
        ] {
            let sigma = synthesize(&params, 14).unwrap();
            let p = p_succ_binary(&task, &sigma).unwrap();
            assert!(p <= cap + 1e-8, "{p} above cap {cap} at {params:?}");
        }
        let cfg = OptimizerConfig { starts: 4, max_evals: 250, ..Default::default() };
        let sup = gaussian_sup_p_succ(&task, &cfg).unwrap();
        assert!(sup.numeric_sup <= sup.cap + 1e-8);
        assert!(sup.numeric_sup >= 0.5);
    }

    #[test]
    fn witnessed_state_beats_every_gaussian() {
        // Use an honest margin so the cap really separates.
        let rho = DensityState::fock(1, 14).unwrap();
        let cfg = OptimizerConfig { starts: 4, max_evals: 400, ..Default::default() };
        let eps = crate::witness::epsilon_bound(&rho, &cfg).unwrap();
        let w = two_copy_witness(&rho, eps.epsilon).unwrap();
        let task = task_from_witness(&w).unwrap();
        let ratio = advantage_ratio(&task, &rho).unwrap();
        assert!(ratio > 1.0 + 1e-9, "ratio {ratio}");
        // The two-copy advantage cannot exceed the squared single-copy
        // robustness factor (1 + 3)² for the one-photon state.
        assert!(ratio <= 16.0 + 1e-6);
    }

    #[test]
    fn worst_case_matches_fixed_reference_robustness() {
        let rho = DensityState::fock(1, 40).unwrap();
        let got = worst_case_single_copy(&rho, &GaussianParams::thermal(1.0)).unwrap();
        assert!((got - 4.0).abs() < 1e-6, "{got}");

        let tau = thermal_state(1.0, 40).unwrap();
        let direct = 1.0 + robustness_fixed(&rho, &tau).unwrap();
        assert!((got - direct).abs() < 1e-9);

        // A Gaussian probe against its own reference gives no advantage.
        let gaussian = synthesize(&GaussianParams::thermal(0.4), 24).unwrap();
        let unit = worst_case_single_copy(&gaussian, &GaussianParams::thermal(0.4)).unwrap();
        assert!((unit - 1.0).abs() < 1e-9, "{unit}");
    }

    #[test]
    fn worst_case_infimum_recovers_the_optimum() {
        let rho = DensityState::fock(1, 24).unwrap();
        let cfg = OptimizerConfig { starts: 4, max_evals: 600, ..Default::default() };
        let (value, argmin) = worst_case_infimum(&rho, &cfg).unwrap();
        assert!(value >= 4.0 - 1e-6, "infimum approached from above: {value}");
        assert!(value <= 4.0 * 1.01, "{value}");
        assert!((argmin.nbar - 1.0).abs() < 0.1, "{argmin:?}");
        // Consistency with the max-relative entropy at the found point.
        let sigma = synthesize(&argmin, 24).unwrap();
        let d = dmax(&rho, &sigma).unwrap();
        assert!((value - d.exp()).abs() < 1e-9);
    }

    #[test]
    fn task_serializes_with_provenance() {
        let (_, task) = one_photon_task(8, 0.1);
        let json = serde_json::to_value(&task).unwrap();
        let obj = json.as_object().unwrap();
        for key in ["m", "x_norm", "prior", "description", "epsilon", "witness_hash"] {
            assert!(obj.contains_key(key), "missing {key}");
        }
        assert!(!obj.contains_key("x"));
        assert_eq!(obj["witness_hash"].as_str().unwrap().len(), 64);
    }

    #[test]
    fn task_rejects_degenerate_witness_norm() {
        let rho = DensityState::fock(1, 8).unwrap();
        let mut w = two_copy_witness(&rho, 0.1).unwrap();
        w.op_norm = 0.0;
        assert!(task_from_witness(&w).is_err());
    }
}
