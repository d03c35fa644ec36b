//! Closed forms and bound formulas for the two shipped case studies:
//! photon-number (Fock) states and two-component coherent-state mixtures.
//!
//! Fock states admit an exact robustness, `R(|n⟩⟨n|) = (n+1)^{n+1}/n^n - 1`
//! (the optimal Gaussian reference is the thermal state with matching mean
//! occupation), growing asymptotically like `e·n`. The mixtures
//!
//! `ρ_{q,d} = (1+q)/2 |α⟩⟨α| + (1-q)/2 |-α⟩⟨-α|`, `α = d/√2` real,
//!
//! live in a two-dimensional subspace and carry closed forms for their
//! spectrum, moments, reference Gaussian, and two robustness lower bounds:
//! one from entropy differences, one from the position-quadrature marginal.
//! Everything here is formula-level (cheap, truncation-free) so it can
//! cross-check the matrix pipeline rather than depend on it.

use serde::{Deserialize, Serialize};

use crate::fock::DensityState;
use crate::gaussian::{coherent_state, thermal_entropy, MomentForm};
use crate::optimize::{golden_max, OptimizerConfig};
use crate::robustness::robustness_gaussian;
use crate::{C64, Error, Result};

/// `ln((n+1)^{n+1} / n^n)`, evaluated in log space so large `n` cannot
/// overflow; `0^0 := 1`.
fn fock_log_factor(n: usize) -> f64 {
    let nf = n as f64;
    let mut v = (nf + 1.0) * (nf + 1.0).ln();
    if n > 0 {
        v -= nf * nf.ln();
    }
    v
}

/// Exact robustness of the photon-number state `|n⟩⟨n|`:
/// `(n+1)^{n+1}/n^n - 1`.
pub fn fock_robustness(n: usize) -> f64 {
    fock_log_factor(n).exp_m1()
}

/// Exact robustness of a product of photon-number states, one per mode:
/// `Π_i (n_i+1)^{n_i+1}/n_i^{n_i} - 1`.
pub fn multimode_fock_robustness(ns: &[usize]) -> f64 {
    ns.iter().map(|&n| fock_log_factor(n)).sum::<f64>().exp_m1()
}

/// A two-component coherent-state mixture, parametrized by the bias
/// `q ∈ [-1, 1]` and the separation `d ≥ 0` (coherent amplitudes `±d/√2`).
///
/// Non-Gaussian exactly when `d ≠ 0` and `|q| ≠ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub q: f64,
    pub d: f64,
}

impl MixtureSpec {
    pub fn new(q: f64, d: f64) -> Result<Self> {
        if !q.is_finite() || !d.is_finite() || q.abs() > 1.0 || d < 0.0 {
            return Err(Error::InvalidState(format!(
                "mixture needs |q| ≤ 1 and d ≥ 0, got q = {q}, d = {d}"
            )));
        }
        Ok(Self { q, d })
    }

    /// Degenerate cases in which the mixture collapses to a single
    /// Gaussian state.
    pub fn is_gaussian(&self) -> bool {
        self.d == 0.0 || self.q.abs() == 1.0
    }

    /// Mixture weights `((1+q)/2, (1-q)/2)`.
    pub fn weights(&self) -> (f64, f64) {
        (0.5 * (1.0 + self.q), 0.5 * (1.0 - self.q))
    }

    /// Eigenvalues `λ± = ½(1 ± √(q² + e^{-2d²}(1-q²)))` of the mixture
    /// (the remaining spectrum is zero).
    pub fn eigenvalues(&self) -> (f64, f64) {
        let s = (self.q * self.q
            + (-2.0 * self.d * self.d).exp() * (1.0 - self.q * self.q))
            .sqrt();
        (0.5 * (1.0 + s), 0.5 * (1.0 - s))
    }
}

/// The mixture as a truncated density matrix.
pub fn mixture_state(s: &MixtureSpec, cutoff: usize) -> Result<DensityState> {
    let amp = C64::new(s.d / std::f64::consts::SQRT_2, 0.0);
    let plus = coherent_state(amp, cutoff)?;
    let minus = coherent_state(-amp, cutoff)?;
    let (wp, wm) = s.weights();
    let op = plus
        .operator()
        .scaled(C64::new(wp, 0.0))
        .add_scaled(C64::new(wm, 0.0), minus.operator())?;
    let tail = wp * plus.tail_mass() + wm * minus.tail_mass();
    DensityState::new(op, tail)
}

/// The mixture as a 2×2 matrix over the orthonormalized even/odd
/// combinations of the two coherent states:
/// `½ [[1+e^{-d²}, q√(1-e^{-2d²})], [q√(1-e^{-2d²}), 1-e^{-d²}]]`.
pub fn mixture_qubit(s: &MixtureSpec) -> [[f64; 2]; 2] {
    let overlap = (-s.d * s.d).exp();
    let coherence = s.q * (1.0 - overlap * overlap).sqrt();
    [
        [0.5 * (1.0 + overlap), 0.5 * coherence],
        [0.5 * coherence, 0.5 * (1.0 - overlap)],
    ]
}

/// The mixture's phase-space quasiprobability:
/// `(1+q)/(2π)·e^{-(x-d)²-y²} + (1-q)/(2π)·e^{-(x+d)²-y²}`.
pub fn mixture_wigner(s: &MixtureSpec, x: f64, y: f64) -> f64 {
    let (wp, wm) = s.weights();
    let gy = (-y * y).exp();
    (wp * (-(x - s.d) * (x - s.d)).exp() + wm * (-(x + s.d) * (x + s.d)).exp()) * gy
        / std::f64::consts::PI
}

/// Position-quadrature distribution of the mixture (the `y`-integral of
/// [`mixture_wigner`]):
/// `((1+q)e^{-(x-d)²} + (1-q)e^{-(x+d)²}) / (2√π)`.
pub fn mixture_marginal(s: &MixtureSpec, x: f64) -> f64 {
    let (wp, wm) = s.weights();
    (wp * (-(x - s.d) * (x - s.d)).exp() + wm * (-(x + s.d) * (x + s.d)).exp())
        / std::f64::consts::PI.sqrt()
}

/// First and second moments of the mixture's moment-matched Gaussian:
/// mean `(dq, 0)`, covariance `diag(2d²(1-q²)+1, 1)`.
pub fn mixture_reference(s: &MixtureSpec) -> MomentForm {
    MomentForm {
        mu: [s.d * s.q, 0.0],
        v: [[2.0 * s.d * s.d * (1.0 - s.q * s.q) + 1.0, 0.0], [0.0, 1.0]],
    }
}

/// Entropy-difference lower bound on the mixture robustness:
/// `exp(S(τ) - S(ρ)) - 1` with both entropies in closed form — the
/// reference entropy through the thermal occupation
/// `ν = ½(-1 + √(1 + 2d²(1-q²)))` and the state entropy through the
/// two-level spectrum `λ±`.
///
/// Faithful: vanishes only at `d = 0` or `|q| = 1`.
pub fn relent_bound(s: &MixtureSpec) -> f64 {
    let nu = 0.5 * (-1.0 + (1.0 + 2.0 * s.d * s.d * (1.0 - s.q * s.q)).sqrt());
    let s_tau = thermal_entropy(nu);
    let (lp, lm) = s.eigenvalues();
    let mut s_rho = 0.0;
    for l in [lp, lm] {
        if l > 0.0 {
            s_rho -= l * l.ln();
        }
    }
    (s_tau - s_rho).exp_m1().max(0.0)
}

/// Quadrature-marginal lower bound for the balanced mixture (`q = 0`):
///
/// `R ≥ sup_{x≥0} [e^{1/2-(d+x)²}(e^{4dx}+1)·x/√2] - 1`,
///
/// the tightest centered Gaussian envelope of the position distribution,
/// with the envelope-width minimization already solved in closed form.
/// Returns `(bound clipped at 0, x_opt)`; exact zero at `d = 0`.
pub fn homodyne_bound(d: f64) -> Result<(f64, f64)> {
    if !(d >= 0.0) {
        return Err(Error::InvalidState(format!("separation must be ≥ 0, got {d}")));
    }
    let score = |x: f64| -> f64 {
        (0.5 - (d + x) * (d + x)).exp() * ((4.0 * d * x).exp() + 1.0) * x
            / std::f64::consts::SQRT_2
    };
    // Grid scan then golden refinement: cheap, and immune to any loss of
    // unimodality.
    let hi = d + 6.0;
    let n = (hi / 0.01).ceil() as usize;
    let (mut best_x, mut best_v) = (0.0, 0.0);
    for i in 0..=n {
        let x = hi * i as f64 / n as f64;
        let v = score(x);
        if v > best_v {
            best_v = v;
            best_x = x;
        }
    }
    let lo = (best_x - 0.02).max(0.0);
    let (x_opt, sup) = golden_max(score, lo, (best_x + 0.02).min(hi), 1e-12);
    let (x_opt, sup) = if sup >= best_v { (x_opt, sup) } else { (best_x, best_v) };
    Ok(((sup - 1.0).max(0.0), x_opt))
}

/// Check that the optimal quadrature point satisfies
/// `2x_opt² ≥ 2d² + 1 + tanh⁸(√d)` (within `1e-6` on the left side) — the
/// condition under which the implied optimal Gaussian envelope is a
/// physical state (`a ≥ 1`).
pub fn xopt_inequality_check(d: f64) -> Result<bool> {
    let (_, x_opt) = homodyne_bound(d)?;
    let lhs = 2.0 * x_opt * x_opt + 1e-6;
    let rhs = 2.0 * d * d + 1.0 + d.sqrt().tanh().powi(8);
    Ok(lhs >= rhs)
}

/// One row of the photon-number scan: closed form against the optimizer.
#[derive(Debug, Clone, Serialize)]
pub struct FockScanRow {
    pub n: usize,
    pub closed_form: f64,
    pub optimizer_value: f64,
    pub rel_err: f64,
}

/// One row of the mixture-bounds scan over the separation grid.
#[derive(Debug, Clone, Serialize)]
pub struct MixtureScanRow {
    pub d: f64,
    pub relent_bound: f64,
    pub homodyne_bound: f64,
    pub x_opt: f64,
}

/// Closed form vs. optimizer for each photon number, at the given cutoff.
pub fn fock_scan(
    ns: &[usize],
    cutoff: usize,
    cfg: &OptimizerConfig,
) -> Result<Vec<FockScanRow>> {
    ns.iter()
        .map(|&n| {
            let closed_form = fock_robustness(n);
            let rho = DensityState::fock(n, cutoff)?;
            let optimizer_value = robustness_gaussian(&rho, cfg)?.value;
            Ok(FockScanRow {
                n,
                closed_form,
                optimizer_value,
                rel_err: (optimizer_value - closed_form).abs() / closed_form.max(1.0),
            })
        })
        .collect()
}

/// Both closed-form lower bounds on the separation grid. The marginal
/// bound is specific to the balanced mixture; for `q ≠ 0` its columns are
/// filled with the trivial bound 0.
pub fn mixture_scan(q: f64, d_grid: &[f64]) -> Result<Vec<MixtureScanRow>> {
    d_grid
        .iter()
        .map(|&d| {
            let s = MixtureSpec::new(q, d)?;
            let (hb, x_opt) = if q == 0.0 { homodyne_bound(d)? } else { (0.0, 0.0) };
            Ok(MixtureScanRow {
                d,
                relent_bound: relent_bound(&s),
                homodyne_bound: hb,
                x_opt,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::quadrature_distribution;
    use crate::gaussian::moments_of;
    use crate::linalg;
    use crate::robustness::{lower_bound_homodyne, HomodyneConfig};

    #[test]
    fn fock_closed_form_values() {
        assert_eq!(fock_robustness(0), 0.0);
        assert!((fock_robustness(1) - 3.0).abs() < 1e-12);
        assert!((fock_robustness(2) - 5.75).abs() < 1e-12);
        assert!((fock_robustness(3) - (256.0 / 27.0 - 1.0)).abs() < 1e-12);
        assert!((fock_robustness(4) - (3125.0 / 256.0 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn fock_closed_form_grows_linearly() {
        for n in 0..40usize {
            assert!(fock_robustness(n + 1) > fock_robustness(n));
        }
        // The per-photon rate tends to e.
        let rate = fock_robustness(200) / 200.0;
        assert!(
            (rate - std::f64::consts::E).abs() / std::f64::consts::E < 5e-3,
            "rate {rate}"
        );
    }

    #[test]
    fn multimode_product_form() {
        assert_eq!(multimode_fock_robustness(&[3]), fock_robustness(3));
        assert!((multimode_fock_robustness(&[1, 1]) - 15.0).abs() < 1e-12);
        assert!((multimode_fock_robustness(&[1, 2]) - 26.0).abs() < 1e-12);
        // Two identical modes match two copies of one mode.
        let two_copies = crate::robustness::multi_copy_robustness(3.0, 2).unwrap();
        assert!((multimode_fock_robustness(&[1, 1]) - two_copies).abs() < 1e-12);
        assert_eq!(multimode_fock_robustness(&[]), 0.0);
    }

    #[test]
    fn mixture_degenerate_cases() {
        let vac = mixture_state(&MixtureSpec::new(0.0, 0.0).unwrap(), 12).unwrap();
        let expect = DensityState::fock(0, 12).unwrap();
        let diff = vac
            .operator()
            .add_scaled(C64::new(-1.0, 0.0), expect.operator())
            .unwrap();
        assert!(diff.hs_norm() < 1e-12);
        assert!(MixtureSpec::new(0.0, 0.0).unwrap().is_gaussian());
        assert!(MixtureSpec::new(1.0, 2.0).unwrap().is_gaussian());
        assert!(!MixtureSpec::new(0.0, 1.0).unwrap().is_gaussian());
        assert!(MixtureSpec::new(1.5, 1.0).is_err());
        assert!(MixtureSpec::new(0.0, -0.1).is_err());
    }

    #[test]
    fn spectrum_matches_two_level_form() {
        let s = MixtureSpec::new(0.3, 1.3).unwrap();
        let rho = mixture_state(&s, 30).unwrap();
        let eigs = linalg::eigvalsh(rho.matrix()).unwrap();
        let (lp, lm) = s.eigenvalues();
        let top = eigs[eigs.len() - 1];
        let second = eigs[eigs.len() - 2];
        assert!((top - lp).abs() < 1e-8, "{top} vs {lp}");
        assert!((second - lm).abs() < 1e-8, "{second} vs {lm}");
        for &e in eigs.iter().take(eigs.len() - 2) {
            assert!(e.abs() < 1e-8);
        }
        // And against the 2×2 representation.
        let m = mixture_qubit(&s);
        let tr = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let disc = (tr * tr / 4.0 - det).sqrt();
        assert!((tr / 2.0 + disc - lp).abs() < 1e-12);
        assert!((tr / 2.0 - disc - lm).abs() < 1e-12);
        assert!((tr - 1.0).abs() < 1e-12);
    }

    #[test]
    fn balanced_purity_closed_form() {
        for d in [0.6f64, 1.2, 2.0] {
            let s = MixtureSpec::new(0.0, d).unwrap();
            let rho = mixture_state(&s, 30).unwrap();
            let expect = 0.5 * (1.0 + (-2.0 * d * d).exp());
            assert!(
                (rho.purity() - expect).abs() < 1e-10,
                "d={d}: {} vs {expect}",
                rho.purity()
            );
        }
    }

    #[test]
    fn wigner_marginal_consistency() {
        let s = MixtureSpec::new(0.4, 1.1).unwrap();
        // The y-integral of the phase-space form reproduces the closed
        // marginal, and both match the matrix quadrature distribution.
        let rho = mixture_state(&s, 36).unwrap();
        for x in [-2.0f64, -0.5, 0.0, 0.8, 1.1, 2.5] {
            let mut integral = 0.0;
            let (y_lo, step) = (-8.0, 0.01);
            let steps = (16.0 / step) as usize;
            for i in 0..=steps {
                let y = y_lo + i as f64 * step;
                let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
                integral += w * mixture_wigner(&s, x, y) * step;
            }
            let closed = mixture_marginal(&s, x);
            assert!((integral - closed).abs() < 1e-9, "x={x}");
            let matrix = quadrature_distribution(&rho, x).unwrap();
            assert!((matrix - closed).abs() < 1e-6, "x={x}: {matrix} vs {closed}");
        }
    }

    #[test]
    fn reference_moments_agree_with_matrix_moments() {
        let pure = mixture_reference(&MixtureSpec::new(1.0, 1.7).unwrap());
        assert!((pure.mu[0] - 1.7).abs() < 1e-12);
        assert_eq!(pure.v, [[1.0, 0.0], [0.0, 1.0]]);

        let balanced = mixture_reference(&MixtureSpec::new(0.0, 1.0).unwrap());
        assert_eq!(balanced.v[0][0], 3.0);
        assert_eq!(balanced.v[1][1], 1.0);

        let s = MixtureSpec::new(0.35, 1.5).unwrap();
        let rho = mixture_state(&s, 40).unwrap();
        let measured = moments_of(&rho).unwrap();
        let closed = mixture_reference(&s);
        assert!((measured.mu[0] - closed.mu[0]).abs() < 1e-6);
        assert!(measured.mu[1].abs() < 1e-6);
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (measured.v[i][j] - closed.v[i][j]).abs() < 1e-6,
                    "V[{i}][{j}]: {} vs {}",
                    measured.v[i][j],
                    closed.v[i][j]
                );
            }
        }
    }

    #[test]
    fn relent_bound_anchors_and_plug_in() {
        assert_eq!(relent_bound(&MixtureSpec::new(0.0, 0.0).unwrap()), 0.0);
        assert_eq!(relent_bound(&MixtureSpec::new(1.0, 3.0).unwrap()), 0.0);
        assert_eq!(relent_bound(&MixtureSpec::new(-1.0, 3.0).unwrap()), 0.0);

        // Independent arithmetic at q = 0, d = 2: ν = 1, λ± = (1 ± e⁻⁴)/2.
        let s = MixtureSpec::new(0.0, 2.0).unwrap();
        let s_tau = 2.0 * 2.0f64.ln();
        let lp = 0.5 * (1.0 + (-4.0f64).exp());
        let lm = 0.5 * (1.0 - (-4.0f64).exp());
        let s_rho = -lp * lp.ln() - lm * lm.ln();
        let expect = (s_tau - s_rho).exp_m1();
        assert!((relent_bound(&s) - expect).abs() < 1e-12);

        // Consistency with the matrix entropy route.
        let rho = mixture_state(&s, 40).unwrap();
        let via_matrix = crate::robustness::rel_entropy_nongaussianity(&rho)
            .unwrap()
            .exp_m1();
        assert!(
            (relent_bound(&s) - via_matrix).abs() < 1e-6,
            "{} vs {via_matrix}",
            relent_bound(&s)
        );
    }

    #[test]
    fn homodyne_bound_anchors() {
        let (v0, x0) = homodyne_bound(0.0).unwrap();
        assert_eq!(v0, 0.0);
        assert!((x0 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6, "{x0}");

        // Nondecreasing in the separation.
        let mut prev = 0.0;
        for i in 0..=12 {
            let (v, _) = homodyne_bound(0.25 * i as f64).unwrap();
            assert!(v >= prev - 1e-12);
            prev = v;
        }

        // Far-separation growth rate √(e/2) per unit separation.
        let (v4, _) = homodyne_bound(4.0).unwrap();
        let (v5, _) = homodyne_bound(5.0).unwrap();
        let slope = v5 - v4;
        let expect = (std::f64::consts::E / 2.0).sqrt();
        assert!((slope - expect).abs() / expect < 0.03, "slope {slope}");

        assert!(homodyne_bound(-1.0).is_err());
    }

    #[test]
    fn homodyne_closed_form_matches_marginal_route() {
        // The closed form is algebraically √(2πe)·x·p(x) − 1 maximized,
        // which is what the generic marginal machinery computes with the
        // envelope centered at the symmetry point.
        for d in [0.8f64, 1.5, 2.5] {
            let s = MixtureSpec::new(0.0, d).unwrap();
            let closed = homodyne_bound(d).unwrap();
            let cfg = HomodyneConfig { center: Some(0.0), ..Default::default() };
            let generic = lower_bound_homodyne(|x| mixture_marginal(&s, x), &cfg).unwrap();
            assert!(
                (closed.0 - generic.value).abs() < 1e-7,
                "d={d}: {} vs {}",
                closed.0,
                generic.value
            );
            assert!((closed.1 - generic.x_opt.abs()).abs() < 1e-4);
        }
    }

    #[test]
    fn xopt_inequality_holds_on_grid() {
        for i in 0..=10 {
            let d = 0.5 * i as f64;
            assert!(xopt_inequality_check(d).unwrap(), "failed at d = {d}");
        }
    }

    #[test]
    fn scan_tables_have_expected_shape() {
        let rows = mixture_scan(0.0, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].relent_bound, 0.0);
        assert_eq!(rows[0].homodyne_bound, 0.0);
        assert!(rows[2].homodyne_bound > rows[1].relent_bound);

        let empty = mixture_scan(0.0, &[]).unwrap();
        assert!(empty.is_empty());

        // Biased mixtures only carry the entropy bound.
        let biased = mixture_scan(0.5, &[1.0]).unwrap();
        assert!(biased[0].relent_bound > 0.0);
        assert_eq!(biased[0].homodyne_bound, 0.0);

        let cfg = OptimizerConfig { starts: 3, max_evals: 400, ..Default::default() };
        let fock = fock_scan(&[0, 1], 20, &cfg).unwrap();
        assert_eq!(fock.len(), 2);
        assert_eq!(fock[0].closed_form, 0.0);
        assert!(fock[1].rel_err < 0.02, "rel err {}", fock[1].rel_err);
    }
}
