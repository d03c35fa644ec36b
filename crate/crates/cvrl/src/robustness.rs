//! The generalized robustness of non-Gaussianity and the entropic
//! quantities surrounding it.
//!
//! For a state `ρ` and reference `σ`, the max-relative entropy is
//! `D_max(ρ‖σ) = ln λ_max(σ^{-1/2} ρ σ^{-1/2})` (in nats), defined on the
//! support of `σ` and `+∞` when `ρ` leaks outside it. The generalized
//! robustness against the Gaussian family is
//!
//! `R(ρ) = inf_{σ Gaussian} exp(D_max(ρ‖σ)) - 1`,
//!
//! the least weight of Gaussian noise that must be admixed to `ρ` to make
//! the result Gaussian. The infimum over the five-parameter single-mode
//! Gaussian family is estimated by deterministic multistart simplex search;
//! everything returned is certified by construction
//! (`value = exp(dmax) - 1` exactly, for the reported optimum).
//!
//! Two cheaper lower bounds complement the optimizer: the relative-entropy
//! measure `S(τ_ρ) - S(ρ)` against the moment-matched reference Gaussian,
//! and a bound extracted from a single homodyne quadrature distribution.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::fock::{DensityState, FockOperator};
use crate::gaussian::{moments_of, reference_gaussian, synthesize, GaussianParams};
use crate::linalg;
use crate::optimize::{golden_max, golden_min, search_gaussian, OptimizerConfig, SearchStatus, StartRecord};
use crate::{C64, Error, Result};

/// Eigenvalues of the reference below this are treated as outside its
/// support.
pub const SUPPORT_FLOOR: f64 = 1e-12;

/// Probability weight of `ρ` outside the support of `σ` above which
/// `D_max = +∞` is declared.
pub const LEAK_TOL: f64 = 1e-11;

/// Max-relative entropy `D_max(ρ‖σ)` in nats.
///
/// Computed as the logarithm of the top eigenvalue of
/// `σ^{-1/2} ρ σ^{-1/2}` restricted to the support of `σ` (eigenvalues above
/// [`SUPPORT_FLOOR`]). Returns `+∞` — the IEEE infinity, used as a
/// distinguished value throughout the crate — when more than [`LEAK_TOL`] of
/// `ρ`'s weight lies outside that support.
pub fn dmax(rho: &DensityState, sigma: &DensityState) -> Result<f64> {
    rho.operator().same_space(sigma.operator(), "dmax")?;
    let (lam, u) = linalg::eigh(sigma.matrix())?;
    let rho_t = linalg::adjoint(&u).dot(rho.matrix()).dot(&u);
    let side = rho.side();

    let support: Vec<usize> = (0..side).filter(|&i| lam[i] > SUPPORT_FLOOR).collect();
    let leak: f64 = (0..side)
        .filter(|i| lam[*i] <= SUPPORT_FLOOR)
        .map(|i| rho_t[(i, i)].re)
        .sum();
    if leak > LEAK_TOL || support.is_empty() {
        return Ok(f64::INFINITY);
    }

    let k = support.len();
    let mut m = Array2::<C64>::zeros((k, k));
    for (p, &i) in support.iter().enumerate() {
        for (q, &j) in support.iter().enumerate() {
            m[(p, q)] = rho_t[(i, j)] / C64::new((lam[i] * lam[j]).sqrt(), 0.0);
        }
    }
    let vals = linalg::eigvalsh(&linalg::hermitize(&m))?;
    let top = vals.last().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return Err(Error::InvalidState(format!(
            "nonpositive top eigenvalue {top:.3e} in D_max (degenerate input)"
        )));
    }
    Ok(top.ln())
}

/// Umegaki relative entropy `D(ρ‖σ) = tr[ρ ln ρ] - tr[ρ ln σ]` in nats;
/// `+∞` when `ρ` leaks outside the support of `σ`.
pub fn rel_entropy(rho: &DensityState, sigma: &DensityState) -> Result<f64> {
    rho.operator().same_space(sigma.operator(), "rel_entropy")?;
    let (lam, u) = linalg::eigh(sigma.matrix())?;
    let rho_t = linalg::adjoint(&u).dot(rho.matrix()).dot(&u);
    let side = rho.side();

    let leak: f64 = (0..side)
        .filter(|i| lam[*i] <= SUPPORT_FLOOR)
        .map(|i| rho_t[(i, i)].re)
        .sum();
    if leak > LEAK_TOL {
        return Ok(f64::INFINITY);
    }

    let rvals = linalg::eigvalsh(rho.matrix())?;
    let tr_rho_ln_rho: f64 = rvals.iter().filter(|&&l| l > 0.0).map(|&l| l * l.ln()).sum();
    let tr_rho_ln_sigma: f64 = (0..side)
        .filter(|&i| lam[i] > SUPPORT_FLOOR)
        .map(|i| rho_t[(i, i)].re * lam[i].ln())
        .sum();
    Ok(tr_rho_ln_rho - tr_rho_ln_sigma)
}

/// Relative entropy of non-Gaussianity: `S(τ_ρ) - S(ρ)` where `τ_ρ` is the
/// Gaussian state matching the first and second moments of `ρ`.
///
/// Equal to `D(ρ‖τ_ρ)` because the log of a Gaussian state is quadratic in
/// the quadratures, so the cross term only sees the matched moments. Up to
/// numerical noise (`≳ -1e-9`) the result is nonnegative, vanishing exactly
/// on Gaussian states.
pub fn rel_entropy_nongaussianity(rho: &DensityState) -> Result<f64> {
    let reference_entropy = moments_of(rho)?.entropy()?;
    Ok(reference_entropy - rho.entropy()?)
}

/// Generalized robustness with a *fixed* reference: `exp(D_max(ρ‖σ)) - 1`.
pub fn robustness_fixed(rho: &DensityState, sigma: &DensityState) -> Result<f64> {
    Ok(dmax(rho, sigma)?.exp_m1())
}

/// Fixed-reference robustness of a *pure* state `|ψ⟩`, via the shortcut
/// `1 + R = ⟨ψ|σ^{-1}|ψ⟩` on the support of `σ` (no large eigenproblem).
///
/// `psi` must be normalized within `1e-6`; returns `+∞` when `|ψ⟩` leaks
/// outside the support of `σ`.
pub fn pure_robustness_fixed(psi: &Array1<C64>, sigma: &DensityState) -> Result<f64> {
    if psi.len() != sigma.side() {
        return Err(Error::DimensionMismatch {
            left: format!("{} amplitudes", psi.len()),
            right: format!("side {}", sigma.side()),
            context: "pure_robustness_fixed".into(),
        });
    }
    let norm_sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    if (norm_sq - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidState(format!(
            "pure state not normalized: ⟨ψ|ψ⟩ = {norm_sq:.9}"
        )));
    }
    let (lam, u) = linalg::eigh(sigma.matrix())?;
    // ψ in the eigenbasis of σ: ψ̃ = U† ψ.
    let mut leak = 0.0;
    let mut val = 0.0;
    for i in 0..psi.len() {
        let amp: C64 = (0..psi.len()).map(|j| u[(j, i)].conj() * psi[j]).sum();
        let w = amp.norm_sqr();
        if lam[i] > SUPPORT_FLOOR {
            val += w / lam[i];
        } else {
            leak += w;
        }
    }
    if leak > LEAK_TOL {
        return Ok(f64::INFINITY);
    }
    Ok(val - 1.0)
}

/// Robustness of `m` independent copies from the single-copy value, using
/// additivity of `D_max` on tensor products: `(1 + R)^m - 1`.
pub fn multi_copy_robustness(single_copy: f64, m: usize) -> Result<f64> {
    if m < 1 {
        return Err(Error::InvalidDimension("copy count must be at least 1".into()));
    }
    if single_copy < 0.0 {
        return Err(Error::InvalidState(format!(
            "negative robustness {single_copy}"
        )));
    }
    Ok((1.0 + single_copy).powi(m as i32) - 1.0)
}

/// Result of a Gaussian-family robustness search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobustnessResult {
    /// Robustness estimate, `exp(dmax) - 1` exactly.
    pub value: f64,
    /// Max-relative entropy at the reported optimum (nats).
    pub dmax: f64,
    /// Best Gaussian reference found.
    pub optimum: GaussianParams,
    /// Whether the winning branch converged or exhausted its budget.
    pub status: SearchStatus,
    /// Fock-space cutoff the search ran at.
    pub cutoff: usize,
    /// Per-start log, in start order.
    pub multistart_log: Vec<StartRecord>,
    /// Total objective evaluations.
    pub total_evals: usize,
}

/// Estimate the generalized robustness of non-Gaussianity of a single-mode
/// state by multistart minimization of `D_max(ρ‖σ)` over the Gaussian
/// parameter box.
///
/// The reference is synthesized at the state's own cutoff; parameter points
/// whose energy guard exceeds the cutoff are treated as infeasible (`+∞`),
/// which confines the search to the trustworthy region of the box. Seeds:
/// the moment-matched reference Gaussian of `ρ`, the vacuum, and a thermal
/// state with the same mean occupation, followed by seeded random starts.
pub fn robustness_gaussian(rho: &DensityState, cfg: &OptimizerConfig) -> Result<RobustnessResult> {
    if rho.modes() != 1 {
        return Err(Error::InvalidDimension(
            "Gaussian-family search is single-mode; use the product form for multimode states".into(),
        ));
    }
    let cutoff = rho.cutoff();

    let mut seeds = Vec::new();
    if let Ok(reference) = reference_gaussian(rho) {
        seeds.push(reference);
    }
    seeds.push(GaussianParams::vacuum());
    let nop = FockOperator::number(cutoff)?;
    let mean_occupation = rho.expectation(&nop)? / rho.trace();
    seeds.push(GaussianParams::thermal(mean_occupation.max(0.0)));

    let objective = |p: &GaussianParams| match synthesize(p, cutoff) {
        Ok(sigma) => dmax(rho, &sigma).unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    };
    let out = search_gaussian(objective, cfg, &seeds)?;
    Ok(RobustnessResult {
        value: out.best_value.exp_m1(),
        dmax: out.best_value,
        optimum: out.best_params,
        status: out.status,
        cutoff,
        multistart_log: out.log,
        total_evals: out.total_evals,
    })
}

/// The observable achieving the worst-case ratio for a fixed reference: the
/// rank-1 projector `X = |u⟩⟨u|` onto `u ∝ σ^{-1/2} w`, where `w` is the top
/// eigenvector of `σ^{-1/2} ρ σ^{-1/2}`.
///
/// Satisfies `0 ≤ X ≤ 1` and `tr[ρX]/tr[σX] = exp(D_max(ρ‖σ))` exactly;
/// errors when the ratio is unbounded (support leak).
pub fn optimal_observable(rho: &DensityState, sigma: &DensityState) -> Result<FockOperator> {
    rho.operator().same_space(sigma.operator(), "optimal_observable")?;
    let (lam, u) = linalg::eigh(sigma.matrix())?;
    let rho_t = linalg::adjoint(&u).dot(rho.matrix()).dot(&u);
    let side = rho.side();

    let support: Vec<usize> = (0..side).filter(|&i| lam[i] > SUPPORT_FLOOR).collect();
    let leak: f64 = (0..side)
        .filter(|i| lam[*i] <= SUPPORT_FLOOR)
        .map(|i| rho_t[(i, i)].re)
        .sum();
    if leak > LEAK_TOL || support.is_empty() {
        return Err(Error::InvalidState(
            "state leaks outside the reference support; the ratio is unbounded".into(),
        ));
    }

    let k = support.len();
    let mut m = Array2::<C64>::zeros((k, k));
    for (p, &i) in support.iter().enumerate() {
        for (q, &j) in support.iter().enumerate() {
            m[(p, q)] = rho_t[(i, j)] / C64::new((lam[i] * lam[j]).sqrt(), 0.0);
        }
    }
    let (_, vecs) = linalg::eigh(&linalg::hermitize(&m))?;
    let w = vecs.column(k - 1);

    // Conjugate back: u = U Σ^{-1/2} w, then normalize.
    let mut vec = Array1::<C64>::zeros(side);
    for (p, &i) in support.iter().enumerate() {
        vec[i] = w[p] / C64::new(lam[i].sqrt(), 0.0);
    }
    let vec = u.dot(&vec);
    let norm = vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let vec = vec.mapv(|z| z / C64::new(norm, 0.0));

    let mut mat = Array2::zeros((side, side));
    for (i, a) in vec.iter().enumerate() {
        for (j, b) in vec.iter().enumerate() {
            mat[(i, j)] = a * b.conj();
        }
    }
    FockOperator::new(mat, rho.cutoff(), rho.modes())
}

// ---------------------------------------------------------------------------
// Homodyne lower bound
// ---------------------------------------------------------------------------

/// Configuration of the homodyne lower-bound extraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomodyneConfig {
    /// Left edge of the quadrature grid.
    pub x_min: f64,
    /// Right edge of the quadrature grid.
    pub x_max: f64,
    /// Grid step.
    pub x_step: f64,
    /// Upper limit of the envelope-variance search interval.
    pub a_max: f64,
    /// Envelope center; defaults to the mean of the marginal when `None`.
    pub center: Option<f64>,
}

impl Default for HomodyneConfig {
    fn default() -> Self {
        Self { x_min: -12.0, x_max: 12.0, x_step: 0.01, a_max: 50.0, center: None }
    }
}

/// Outcome of the homodyne lower bound.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HomodyneBound {
    /// Lower bound on the robustness (clipped at 0).
    pub value: f64,
    /// Quadrature point achieving the supremum.
    pub x_opt: f64,
    /// Envelope variance parameter minimizing the inner problem at `x_opt`.
    pub a_opt: f64,
    /// Envelope center used.
    pub center: f64,
    /// Grid integral of the marginal (validation output).
    pub mass: f64,
}

/// Analytic inner minimizer of the envelope problem at offset `u` from the
/// center: `inf_a √(πa) e^{u²/a}` sits at `a* = 2u²` with value
/// `√(2πe) |u|`. Returns `(a*, value)`.
pub fn envelope_inner_analytic(u: f64) -> (f64, f64) {
    let a_star = 2.0 * u * u;
    (a_star, (2.0 * std::f64::consts::PI * std::f64::consts::E).sqrt() * u.abs())
}

/// Numeric inner minimization `min_{a ∈ [a_lo, a_max]} √(πa) e^{u²/a}`,
/// with `a_lo` chosen below the analytic minimizer so the interior optimum
/// is always bracketed. Returns `(argmin, min)`.
pub fn envelope_inner_numeric(u: f64, a_max: f64) -> (f64, f64) {
    let a_lo = (u * u).min(1.0).max(1e-12);
    let a_hi = a_max.max(a_lo * 2.0);
    // Golden section over ln a: the objective is unimodal in ln a.
    let (t, val) = golden_min(
        |t: f64| {
            let a = t.exp();
            (std::f64::consts::PI * a).sqrt() * (u * u / a).exp()
        },
        a_lo.ln(),
        a_hi.ln(),
        1e-12,
    );
    (t.exp(), val)
}

/// Lower bound on the generalized robustness from a single quadrature
/// distribution `p(x)`.
///
/// Any decomposition `ρ ≤ (1 + R) σ` with Gaussian `σ` forces
/// `p(x) ≤ (1 + R) q_σ(x)` pointwise in the quadrature outcome, and every
/// Gaussian marginal centered at `m̄` lies below the envelope
/// `sup_a e^{-(x-m̄)²/a}/√(πa) = 1/(√(2πe)|x-m̄|)`. Hence
///
/// `R ≥ sup_x p(x) · √(2πe) |x - m̄| - 1`,
///
/// evaluated here by a grid sweep with golden-section refinement, the inner
/// envelope problem solved by 1-D minimization over the variance parameter.
/// The center `m̄` is pinned to the marginal mean (valid for states whose
/// optimal Gaussian reference shares that mean, e.g. by symmetry); override
/// it via [`HomodyneConfig::center`] if needed.
///
/// The marginal must be nonnegative and integrate to at most `1 + 1e-6` on
/// the grid. The bound is clipped at zero; centered Gaussian marginals of
/// any width give exactly zero.
pub fn lower_bound_homodyne<F>(marginal: F, cfg: &HomodyneConfig) -> Result<HomodyneBound>
where
    F: Fn(f64) -> f64,
{
    if !(cfg.x_step > 0.0) || cfg.x_max <= cfg.x_min {
        return Err(Error::InvalidDimension(format!(
            "bad quadrature grid [{}, {}] step {}",
            cfg.x_min, cfg.x_max, cfg.x_step
        )));
    }
    if cfg.a_max < 1.0 {
        return Err(Error::InvalidDimension(format!(
            "envelope variance limit {} below 1",
            cfg.a_max
        )));
    }
    let n = ((cfg.x_max - cfg.x_min) / cfg.x_step).round() as usize + 1;
    let xs: Vec<f64> = (0..n).map(|i| cfg.x_min + i as f64 * cfg.x_step).collect();
    let ps: Vec<f64> = xs.iter().map(|&x| marginal(x)).collect();

    if let Some((i, &p)) = ps.iter().enumerate().find(|(_, &p)| p < -1e-9) {
        return Err(Error::InvalidState(format!(
            "marginal negative at x = {:.4}: {p:.3e}",
            xs[i]
        )));
    }

    // Trapezoid mass and mean on the grid.
    let trapezoid = |f: &dyn Fn(usize) -> f64| -> f64 {
        let mut acc = 0.0;
        for i in 1..n {
            acc += 0.5 * (f(i - 1) + f(i)) * (xs[i] - xs[i - 1]);
        }
        acc
    };
    let mass = trapezoid(&|i| ps[i]);
    if mass > 1.0 + 1e-6 {
        return Err(Error::InvalidState(format!(
            "marginal integrates to {mass:.9}, beyond a probability distribution"
        )));
    }
    let center = match cfg.center {
        Some(c) => c,
        None => {
            if mass <= 1e-12 {
                return Err(Error::InvalidState("marginal has no mass on the grid".into()));
            }
            trapezoid(&|i| xs[i] * ps[i]) / mass
        }
    };

    let score = |x: f64, p: f64| -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        let (_, inner) = envelope_inner_numeric(x - center, cfg.a_max);
        p * inner
    };

    let (mut best_i, mut best_val) = (0usize, 0.0f64);
    for (i, (&x, &p)) in xs.iter().zip(&ps).enumerate() {
        let v = score(x, p.max(0.0));
        if v > best_val {
            best_val = v;
            best_i = i;
        }
    }

    // Refine around the best grid point.
    let lo = if best_i == 0 { xs[0] } else { xs[best_i - 1] };
    let hi = if best_i + 1 == n { xs[n - 1] } else { xs[best_i + 1] };
    let (x_opt, sup) = golden_max(|x| score(x, marginal(x).max(0.0)), lo, hi, 1e-11);
    let (x_opt, sup) = if sup >= best_val {
        (x_opt, sup)
    } else {
        (xs[best_i], best_val)
    };
    let (a_opt, _) = envelope_inner_numeric(x_opt - center, cfg.a_max);

    Ok(HomodyneBound {
        value: (sup - 1.0).max(0.0),
        x_opt,
        a_opt,
        center,
        mass,
    })
}
