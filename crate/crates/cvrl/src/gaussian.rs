//! Single-mode Gaussian states: parameters, moments, and truncated
//! synthesis.
//!
//! A single-mode Gaussian state is parametrized as a displaced squeezed
//! thermal state `ρ = D(α) S(r, φ) τ_n̄ S† D†` with
//!
//! * `n̄ ≥ 0` — mean occupation of the thermal core `τ_n̄`,
//! * `r ≥ 0, φ ∈ [0, π)` — squeezing magnitude and axis orientation,
//! * `α = (α_x, α_y)` — complex displacement `α_x + i α_y`.
//!
//! Quadrature conventions put the vacuum covariance matrix at the identity:
//! `x = (a + a†)/√2`, `y = i(a† - a)/√2`, mean vector `μ = √2 (α_x, α_y)`,
//! and covariance `V = (2n̄+1) R(φ) diag(e^{-2r}, e^{2r}) R(φ)ᵀ` where `R` is
//! a plane rotation. The uncertainty principle reads `V + iΩ ≥ 0` with the
//! symplectic form `Ω = [[0, 1], [-1, 0]]`.
//!
//! Synthesis onto a truncated Fock space projects — it never renormalizes —
//! and records the trace deficit as the state's `tail_mass`. A conservative
//! energy guard refuses cutoffs too small for the requested parameters.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::fock::{DensityState, FockOperator};
use crate::linalg;
use crate::{C64, Error, Result};

/// Parameter form of a single-mode Gaussian state (displaced squeezed
/// thermal state).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    /// Mean occupation of the thermal core (`≥ 0`).
    pub nbar: f64,
    /// Squeezing magnitude (`≥ 0`).
    pub r: f64,
    /// Squeezing axis orientation; the covariance matrix is `π`-periodic in
    /// this angle, and canonical form keeps it in `[0, π)`.
    pub phi: f64,
    /// Displacement `[α_x, α_y]`, i.e. `α = α_x + i α_y`.
    pub alpha: [f64; 2],
}

impl GaussianParams {
    /// The vacuum.
    pub fn vacuum() -> Self {
        Self { nbar: 0.0, r: 0.0, phi: 0.0, alpha: [0.0, 0.0] }
    }

    /// Thermal state with mean occupation `nbar`.
    pub fn thermal(nbar: f64) -> Self {
        Self { nbar, ..Self::vacuum() }
    }

    /// Coherent state `|α⟩` with `α = αx + i αy`.
    pub fn coherent(alpha_x: f64, alpha_y: f64) -> Self {
        Self { alpha: [alpha_x, alpha_y], ..Self::vacuum() }
    }

    /// Squeezed vacuum.
    pub fn squeezed_vacuum(r: f64, phi: f64) -> Self {
        Self { r, phi, ..Self::vacuum() }
    }

    /// Parameter vector `(n̄, r, φ, α_x, α_y)` for the optimizer.
    pub fn as_array(&self) -> [f64; 5] {
        [self.nbar, self.r, self.phi, self.alpha[0], self.alpha[1]]
    }

    /// Inverse of [`Self::as_array`].
    pub fn from_array(v: [f64; 5]) -> Self {
        Self { nbar: v[0], r: v[1], phi: v[2], alpha: [v[3], v[4]] }
    }

    /// Reject non-finite or unphysical parameters.
    pub fn validate(&self) -> Result<()> {
        let finite = self.nbar.is_finite()
            && self.r.is_finite()
            && self.phi.is_finite()
            && self.alpha.iter().all(|a| a.is_finite());
        if !finite {
            return Err(Error::InvalidState("non-finite Gaussian parameter".into()));
        }
        if self.nbar < -1e-12 {
            return Err(Error::InvalidState(format!(
                "negative mean occupation {}",
                self.nbar
            )));
        }
        if self.r < -1e-12 {
            return Err(Error::InvalidState(format!(
                "negative squeezing magnitude {} (fold into phi)",
                self.r
            )));
        }
        Ok(())
    }

    /// Mean vector and covariance matrix of the state.
    pub fn to_moments(&self) -> MomentForm {
        let (c, s) = (self.phi.cos(), self.phi.sin());
        let (em, ep) = ((-2.0 * self.r).exp(), (2.0 * self.r).exp());
        let scale = 2.0 * self.nbar.max(0.0) + 1.0;
        // R(φ) diag(e^{-2r}, e^{2r}) R(φ)ᵀ, scaled by 2n̄+1.
        let v = [
            [scale * (em * c * c + ep * s * s), scale * (em - ep) * s * c],
            [scale * (em - ep) * s * c, scale * (em * s * s + ep * c * c)],
        ];
        MomentForm {
            mu: [
                std::f64::consts::SQRT_2 * self.alpha[0],
                std::f64::consts::SQRT_2 * self.alpha[1],
            ],
            v,
        }
    }

    /// Smallest cutoff the synthesis energy guard accepts for these
    /// parameters (see [`synthesize`]).
    pub fn required_cutoff(&self) -> usize {
        let energy = 4.0 * (2.0 * self.nbar.max(0.0) + 1.0) * (2.0 * self.r.max(0.0)).exp()
            + 8.0 * (self.alpha[0].powi(2) + self.alpha[1].powi(2));
        (energy.ceil() as usize).max(2)
    }
}

/// Moment form of a single-mode Gaussian state: mean vector and covariance
/// matrix in the `(x, y)` quadrature basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentForm {
    /// Mean vector `(⟨x⟩, ⟨y⟩)`.
    pub mu: [f64; 2],
    /// Covariance `V_jk = ⟨{r_j - μ_j, r_k - μ_k}⟩` (vacuum = identity).
    #[serde(rename = "V")]
    pub v: [[f64; 2]; 2],
}

impl MomentForm {
    /// The vacuum: zero mean, identity covariance.
    pub fn vacuum() -> Self {
        Self { mu: [0.0, 0.0], v: [[1.0, 0.0], [0.0, 1.0]] }
    }

    /// Determinant of the covariance matrix.
    pub fn det_v(&self) -> f64 {
        self.v[0][0] * self.v[1][1] - self.v[0][1] * self.v[1][0]
    }

    /// Symmetry defect `|V_01 - V_10|`.
    pub fn symmetry_defect(&self) -> f64 {
        (self.v[0][1] - self.v[1][0]).abs()
    }

    /// Recover canonical parameters (`φ ∈ [0, π)`, `r ≥ 0`) from moments.
    ///
    /// This is the single-mode Williamson decomposition: the symplectic
    /// eigenvalue is `√det V`, the thermal occupation `(√det V - 1)/2`, and
    /// the squeezing spectrum comes from the eigenvalues of `V / √det V`.
    pub fn to_params(&self) -> Result<GaussianParams> {
        if self.symmetry_defect() > 1e-8 {
            return Err(Error::NotBonaFide(format!(
                "covariance not symmetric (defect {:.3e})",
                self.symmetry_defect()
            )));
        }
        let det = self.det_v();
        if det <= 0.0 {
            return Err(Error::SingularCovariance(format!("det V = {det:.3e}")));
        }
        let nu = det.sqrt();
        let nbar = (nu - 1.0) / 2.0;
        if nbar < -1e-8 {
            return Err(Error::NotBonaFide(format!(
                "symplectic eigenvalue {nu:.6} below 1"
            )));
        }
        let a = self.v[0][0] / nu;
        let b = 0.5 * (self.v[0][1] + self.v[1][0]) / nu;
        let c = self.v[1][1] / nu;
        let mean = 0.5 * (a + c);
        let disc = (0.25 * (a - c).powi(2) + b * b).sqrt();
        let lo = (mean - disc).max(1e-15);
        let hi = mean + disc;
        let r = 0.25 * (hi / lo).ln();
        let phi = if disc < 1e-12 {
            0.0
        } else {
            // Minor (squeezed) axis orientation; π-periodic, mapped to [0, π).
            let mut phi = 0.5 * (-2.0 * b).atan2(c - a);
            if phi < 0.0 {
                phi += PI;
            }
            if phi >= PI {
                phi -= PI;
            }
            phi
        };
        Ok(GaussianParams {
            nbar: nbar.max(0.0),
            r: r.max(0.0),
            phi,
            alpha: [
                self.mu[0] / std::f64::consts::SQRT_2,
                self.mu[1] / std::f64::consts::SQRT_2,
            ],
        })
    }

    /// Wigner function at the phase-space point `(x, y)`:
    /// `W(r) = exp(-(r-μ)ᵀ V^{-1} (r-μ)) / (π √det V)`.
    pub fn wigner(&self, x: f64, y: f64) -> Result<f64> {
        let det = self.det_v();
        if det.abs() < 1e-30 {
            return Err(Error::SingularCovariance(format!("det V = {det:.3e}")));
        }
        let dx = x - self.mu[0];
        let dy = y - self.mu[1];
        // 2x2 inverse, inlined.
        let quad = (self.v[1][1] * dx * dx - (self.v[0][1] + self.v[1][0]) * dx * dy
            + self.v[0][0] * dy * dy)
            / det;
        Ok((-quad).exp() / (PI * det.sqrt()))
    }

    /// Von Neumann entropy (nats) of the Gaussian state with this
    /// covariance: with `ν = (√det V - 1)/2`,
    /// `S = (ν+1) ln(ν+1) - ν ln ν`.
    pub fn entropy(&self) -> Result<f64> {
        let det = self.det_v();
        if det <= 0.0 {
            return Err(Error::SingularCovariance(format!("det V = {det:.3e}")));
        }
        let nu = (det.sqrt() - 1.0) / 2.0;
        if nu < -1e-8 {
            return Err(Error::NotBonaFide(format!(
                "symplectic eigenvalue {:.6} below 1",
                det.sqrt()
            )));
        }
        Ok(thermal_entropy(nu.max(0.0)))
    }
}

/// Entropy (nats) of a thermal state with mean occupation `n̄`:
/// `(n̄+1) ln(n̄+1) - n̄ ln n̄`, continuously 0 at `n̄ = 0`.
pub fn thermal_entropy(nbar: f64) -> f64 {
    if nbar <= 0.0 {
        0.0
    } else {
        (nbar + 1.0) * (nbar + 1.0).ln() - nbar * nbar.ln()
    }
}

/// Symplectic form `Ω = ⊕_modes [[0, 1], [-1, 0]]` in the
/// `(x_1, y_1, x_2, y_2, …)` quadrature ordering.
pub fn symplectic_form(modes: usize) -> Array2<f64> {
    let mut omega = Array2::zeros((2 * modes, 2 * modes));
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Check the uncertainty principle `V + iΩ ≥ 0` (within `-1e-10`).
///
/// Errors on non-symmetric or non-finite input; returns whether the matrix
/// is a bona fide quantum covariance matrix.
pub fn bona_fide(v: &Array2<f64>) -> Result<bool> {
    let n = v.nrows();
    if v.ncols() != n || n % 2 != 0 || n == 0 {
        return Err(Error::NotBonaFide(format!(
            "covariance must be square with even side, got {}x{}",
            v.nrows(),
            v.ncols()
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NotBonaFide("non-finite covariance entry".into()));
    }
    let sym_defect = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (v[(i, j)] - v[(j, i)]).abs())
        .fold(0.0, f64::max);
    if sym_defect > 1e-10 {
        return Err(Error::NotBonaFide(format!(
            "covariance not symmetric (defect {sym_defect:.3e})"
        )));
    }
    let omega = symplectic_form(n / 2);
    let m = Array2::from_shape_fn((n, n), |(i, j)| C64::new(v[(i, j)], omega[(i, j)]));
    let eigs = linalg::eigvalsh(&m)?;
    Ok(eigs.iter().all(|&l| l >= -1e-10))
}

/// Truncated thermal state `τ_n̄` with geometric Fock weights
/// `p_m = n̄^m / (n̄+1)^{m+1}`; the analytic tail `(n̄/(n̄+1))^cutoff` is
/// recorded.
pub fn thermal_state(nbar: f64, cutoff: usize) -> Result<DensityState> {
    if !nbar.is_finite() || nbar < 0.0 {
        return Err(Error::InvalidState(format!("invalid mean occupation {nbar}")));
    }
    let mut mat = Array2::zeros((cutoff, cutoff));
    if nbar == 0.0 {
        mat[(0, 0)] = C64::new(1.0, 0.0);
        return DensityState::new(FockOperator::new(mat, cutoff, 1)?, 0.0);
    }
    let q = nbar / (nbar + 1.0);
    let mut w = 1.0 / (nbar + 1.0);
    for m in 0..cutoff {
        mat[(m, m)] = C64::new(w, 0.0);
        w *= q;
    }
    let tail = q.powi(cutoff as i32);
    DensityState::new(FockOperator::new(mat, cutoff, 1)?, tail)
}

/// Truncated coherent state `|α⟩` with Poisson amplitudes
/// `⟨m|α⟩ = e^{-|α|²/2} α^m / √m!`; the tail is the lost Poisson weight.
pub fn coherent_state(alpha: C64, cutoff: usize) -> Result<DensityState> {
    if cutoff < 2 {
        return Err(Error::InvalidDimension(format!(
            "cutoff must be at least 2, got {cutoff}"
        )));
    }
    let mut amps = Array1::zeros(cutoff);
    let mut cur = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for m in 0..cutoff {
        amps[m] = cur;
        cur *= alpha / C64::new(((m + 1) as f64).sqrt(), 0.0);
    }
    let norm_sq: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    DensityState::from_pure(&amps, cutoff, 1, (1.0 - norm_sq).clamp(0.0, 1.0))
}

/// Synthesize the truncated density matrix of a Gaussian state:
/// `ρ = D(α) S(r, φ) τ_n̄ S† D†`, with both unitaries built as matrix
/// exponentials of the truncated ladder operators.
///
/// The squeeze operator is `S = exp((ξ̄ a² - ξ a†²)/2)` with `ξ = r e^{2iφ}`
/// (the factor 2 makes `φ` the covariance-axis orientation), the
/// displacement `D = exp(α a† - ᾱ a)`.
///
/// Truncation projects and records the trace deficit as `tail_mass`. A
/// conservative energy guard `cutoff ≥ 4(2n̄+1)e^{2r} + 8|α|²` rejects
/// parameter/cutoff combinations whose tails would not be negligible;
/// use [`GaussianParams::required_cutoff`] to size the space.
pub fn synthesize(params: &GaussianParams, cutoff: usize) -> Result<DensityState> {
    params.validate()?;
    let need = params.required_cutoff();
    if cutoff < need {
        return Err(Error::CutoffTooSmall {
            got: cutoff,
            need,
            context: format!(
                "synthesize(nbar={:.3}, r={:.3}, phi={:.3}, alpha=[{:.3}, {:.3}])",
                params.nbar, params.r, params.phi, params.alpha[0], params.alpha[1]
            ),
        });
    }

    let tau = thermal_state(params.nbar, cutoff)?;
    let mut mat = tau.matrix().clone();

    if params.r > 0.0 {
        let a = FockOperator::annihilation(cutoff)?;
        let a2 = a.matrix().dot(a.matrix());
        let xi = C64::from_polar(params.r, 2.0 * params.phi);
        // (ξ̄ a² - ξ a†²)/2, manifestly skew-Hermitian.
        let half = C64::new(0.5, 0.0);
        let gen_s = (&a2.mapv(|z| z * xi.conj()) - &linalg::adjoint(&a2).mapv(|z| z * xi))
            .mapv(|z| z * half);
        let s = linalg::expm(&gen_s)?;
        mat = s.dot(&mat).dot(&linalg::adjoint(&s));
    }

    let alpha = C64::new(params.alpha[0], params.alpha[1]);
    if alpha.norm_sqr() > 0.0 {
        let a = FockOperator::annihilation(cutoff)?;
        let gen_d = &linalg::adjoint(a.matrix()).mapv(|z| z * alpha)
            - &a.matrix().mapv(|z| z * alpha.conj());
        let d = linalg::expm(&gen_d)?;
        mat = d.dot(&mat).dot(&linalg::adjoint(&d));
    }

    let op = FockOperator::new(linalg::hermitize(&mat), cutoff, 1)?;
    let tail = (1.0 - op.trace().re).clamp(0.0, 1.0);
    DensityState::new(op, tail)
}

/// First and second moments of a single-mode truncated state.
///
/// Moments are normalized by the state's trace, so a recorded tail mass does
/// not bias them; `μ_j = tr[ρ r_j]/tr[ρ]` and
/// `V_jk = (tr[ρ {r_j, r_k}] - 2 μ_j μ_k tr[ρ]) / tr[ρ]`.
pub fn moments_of(rho: &DensityState) -> Result<MomentForm> {
    if rho.modes() != 1 {
        return Err(Error::InvalidDimension(format!(
            "moment extraction is single-mode only, got {} modes",
            rho.modes()
        )));
    }
    let cutoff = rho.cutoff();
    let x = FockOperator::position(cutoff)?;
    let y = FockOperator::momentum(cutoff)?;
    let tr = rho.trace();
    if tr < 1e-12 {
        return Err(Error::InvalidState(format!("state trace {tr:.3e} too small")));
    }
    let quads = [x, y];
    let mut mu = [0.0; 2];
    for (j, q) in quads.iter().enumerate() {
        mu[j] = q.trace_product(rho.operator())?.re / tr;
    }
    let mut v = [[0.0; 2]; 2];
    for j in 0..2 {
        for k in j..2 {
            let prod = FockOperator::new(
                quads[j].matrix().dot(quads[k].matrix()),
                cutoff,
                1,
            )?;
            let second = prod.trace_product(rho.operator())?.re / tr;
            let val = 2.0 * (second - mu[j] * mu[k]);
            v[j][k] = val;
            v[k][j] = val;
        }
    }
    Ok(MomentForm { mu, v })
}

/// Canonical parameters of the Gaussian state sharing the first and second
/// moments of `rho` (its *reference Gaussian*).
pub fn reference_gaussian(rho: &DensityState) -> Result<GaussianParams> {
    moments_of(rho)?.to_params()
}
