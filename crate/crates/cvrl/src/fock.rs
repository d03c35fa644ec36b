//! Dense operators on truncated Fock spaces.
//!
//! Everything in the crate lives on `modes` copies of a single-mode Fock
//! space truncated at occupation `cutoff - 1`, i.e. on dense complex
//! matrices of side `cutoff^modes`. Multi-mode indices are row-major with
//! the *first* factor most significant, which is exactly the Kronecker
//! product convention, so `tensor` and the permutation operators below agree
//! index-by-index.
//!
//! Truncation is by projection: operators are cut, never renormalized, and
//! density states carry the probability weight lost to the cut as an
//! explicit `tail_mass` so downstream consumers can reason about it.

use std::io::{Read, Write};

use ndarray::{Array1, Array2};
use ndarray_linalg::SVD;

use crate::linalg;
use crate::{C64, Error, Result};

/// Hard cap on matrix side length (memory guard: a dense complex matrix of
/// this side is 1 GiB).
pub const MAX_SIDE: usize = 8192;

/// Magic bytes opening the binary operator format.
pub const MAGIC: &[u8; 8] = b"FOCKOP1\0";

/// `base^exp` with overflow and memory-guard checking.
fn checked_side(base: usize, exp: usize) -> Result<usize> {
    let mut side: usize = 1;
    for _ in 0..exp {
        side = side.checked_mul(base).ok_or_else(|| {
            Error::ResourceLimit(format!("{base}^{exp} overflows the addressable side length"))
        })?;
        if side > MAX_SIDE {
            return Err(Error::ResourceLimit(format!(
                "side {base}^{exp} exceeds the {MAX_SIDE} cap (would need {} GiB per matrix)",
                (side * side * 16) >> 30
            )));
        }
    }
    Ok(side)
}

/// A dense operator on a truncated multi-mode Fock space.
///
/// The side of the underlying matrix always equals `cutoff^modes`; the pair
/// `(cutoff, modes)` is the operator's *dimension signature* and every
/// binary operation insists the signatures agree.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    mat: Array2<C64>,
    cutoff: usize,
    modes: usize,
}

impl FockOperator {
    /// Wrap a matrix, validating the dimension signature.
    pub fn new(mat: Array2<C64>, cutoff: usize, modes: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::InvalidDimension(format!(
                "cutoff must be at least 2, got {cutoff}"
            )));
        }
        if modes < 1 {
            return Err(Error::InvalidDimension("modes must be at least 1".into()));
        }
        let side = checked_side(cutoff, modes)?;
        if mat.nrows() != side || mat.ncols() != side {
            return Err(Error::DimensionMismatch {
                left: format!("matrix {}x{}", mat.nrows(), mat.ncols()),
                right: format!("cutoff {cutoff}, {modes} mode(s) (side {side})"),
                context: "FockOperator::new".into(),
            });
        }
        Ok(Self { mat, cutoff, modes })
    }

    /// Zero operator.
    pub fn zeros(cutoff: usize, modes: usize) -> Result<Self> {
        let side = checked_side(cutoff, modes)?;
        Self::new(Array2::zeros((side, side)), cutoff, modes)
    }

    /// Identity operator.
    pub fn identity(cutoff: usize, modes: usize) -> Result<Self> {
        let side = checked_side(cutoff, modes)?;
        Self::new(linalg::identity(side), cutoff, modes)
    }

    /// Single-mode annihilation operator: `a|n⟩ = √n |n-1⟩`.
    pub fn annihilation(cutoff: usize) -> Result<Self> {
        let mut mat = Array2::zeros((cutoff, cutoff));
        for n in 1..cutoff {
            mat[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
        }
        Self::new(mat, cutoff, 1)
    }

    /// Single-mode creation operator, the adjoint of [`Self::annihilation`].
    pub fn creation(cutoff: usize) -> Result<Self> {
        Ok(Self::annihilation(cutoff)?.dagger())
    }

    /// Single-mode number operator `diag(0, 1, …, cutoff-1)`.
    pub fn number(cutoff: usize) -> Result<Self> {
        let mut mat = Array2::zeros((cutoff, cutoff));
        for n in 0..cutoff {
            mat[(n, n)] = C64::new(n as f64, 0.0);
        }
        Self::new(mat, cutoff, 1)
    }

    /// Position quadrature `x = (a + a†)/√2` (so the vacuum variance of `x`
    /// is 1/2 and the vacuum covariance matrix is the identity).
    pub fn position(cutoff: usize) -> Result<Self> {
        let a = Self::annihilation(cutoff)?;
        let sum = &a.mat + &a.dagger().mat;
        Self::new(sum.mapv(|z| z / C64::new(std::f64::consts::SQRT_2, 0.0)), cutoff, 1)
    }

    /// Momentum quadrature `p = i(a† - a)/√2`.
    pub fn momentum(cutoff: usize) -> Result<Self> {
        let a = Self::annihilation(cutoff)?;
        let diff = &a.dagger().mat - &a.mat;
        let i_over_sqrt2 = C64::new(0.0, 1.0 / std::f64::consts::SQRT_2);
        Self::new(diff.mapv(|z| z * i_over_sqrt2), cutoff, 1)
    }

    /// Rank-1 projector `|n⟩⟨n|` on a single mode.
    pub fn basis_projector(n: usize, cutoff: usize) -> Result<Self> {
        if n >= cutoff {
            return Err(Error::InvalidDimension(format!(
                "basis index {n} outside cutoff {cutoff}"
            )));
        }
        let mut mat = Array2::zeros((cutoff, cutoff));
        mat[(n, n)] = C64::new(1.0, 0.0);
        Self::new(mat, cutoff, 1)
    }

    /// Underlying matrix.
    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }

    /// Consume into the underlying matrix.
    pub fn into_matrix(self) -> Array2<C64> {
        self.mat
    }

    /// Fock-space cutoff (occupation numbers run over `0..cutoff`).
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Number of modes.
    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Matrix side length, `cutoff^modes`.
    pub fn side(&self) -> usize {
        self.mat.nrows()
    }

    /// Human-readable dimension signature for error messages.
    fn signature(&self) -> String {
        format!("cutoff {}, {} mode(s)", self.cutoff, self.modes)
    }

    /// Error unless `self` and `other` act on the same space.
    pub fn same_space(&self, other: &Self, context: &str) -> Result<()> {
        if self.cutoff != other.cutoff || self.modes != other.modes {
            return Err(Error::DimensionMismatch {
                left: self.signature(),
                right: other.signature(),
                context: context.into(),
            });
        }
        Ok(())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self {
            mat: linalg::adjoint(&self.mat),
            cutoff: self.cutoff,
            modes: self.modes,
        }
    }

    /// Hermitian part `(A + A†)/2`.
    pub fn hermitized(&self) -> Self {
        Self {
            mat: linalg::hermitize(&self.mat),
            cutoff: self.cutoff,
            modes: self.modes,
        }
    }

    /// Whether the operator is Hermitian within elementwise tolerance `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        linalg::hermiticity_defect(&self.mat) <= tol
    }

    /// Matrix product `self · rhs`.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        self.same_space(rhs, "matmul")?;
        Ok(Self {
            mat: self.mat.dot(&rhs.mat),
            cutoff: self.cutoff,
            modes: self.modes,
        })
    }

    /// Scaled sum `self + c · rhs`.
    pub fn add_scaled(&self, c: C64, rhs: &Self) -> Result<Self> {
        self.same_space(rhs, "add_scaled")?;
        Ok(Self {
            mat: &self.mat + &rhs.mat.mapv(|z| z * c),
            cutoff: self.cutoff,
            modes: self.modes,
        })
    }

    /// Multiply by a complex scalar.
    pub fn scaled(&self, c: C64) -> Self {
        Self {
            mat: self.mat.mapv(|z| z * c),
            cutoff: self.cutoff,
            modes: self.modes,
        }
    }

    /// Trace.
    pub fn trace(&self) -> C64 {
        linalg::trace(&self.mat)
    }

    /// `tr[self · rhs]` without forming the product.
    pub fn trace_product(&self, rhs: &Self) -> Result<C64> {
        self.same_space(rhs, "trace_product")?;
        Ok(linalg::trace_product(&self.mat, &rhs.mat))
    }

    /// Kronecker (tensor) product; cutoffs must match, mode counts add.
    ///
    /// Index convention: the first factor is most significant, so
    /// `(A ⊗ B)[(i·s_B + k, j·s_B + l)] = A[(i,j)] · B[(k,l)]`.
    pub fn tensor(&self, rhs: &Self) -> Result<Self> {
        if self.cutoff != rhs.cutoff {
            return Err(Error::DimensionMismatch {
                left: self.signature(),
                right: rhs.signature(),
                context: "tensor product requires equal cutoffs".into(),
            });
        }
        let modes = self.modes + rhs.modes;
        checked_side(self.cutoff, modes)?;
        let (sa, sb) = (self.side(), rhs.side());
        let mut mat = Array2::zeros((sa * sb, sa * sb));
        for ((i, j), &a) in self.mat.indexed_iter() {
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            for ((k, l), &b) in rhs.mat.indexed_iter() {
                mat[(i * sb + k, j * sb + l)] = a * b;
            }
        }
        Ok(Self {
            mat,
            cutoff: self.cutoff,
            modes,
        })
    }

    /// `m`-fold tensor power (`m ≥ 1`).
    pub fn tensor_power(&self, m: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidDimension(
                "tensor power requires at least one factor".into(),
            ));
        }
        checked_side(self.cutoff, self.modes * m)?;
        let mut out = self.clone();
        for _ in 1..m {
            out = out.tensor(self)?;
        }
        Ok(out)
    }

    /// Largest singular value (operator norm).
    pub fn op_norm(&self) -> Result<f64> {
        Ok(self.singular_values()?.first().copied().unwrap_or(0.0))
    }

    /// Sum of singular values (trace norm).
    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self.singular_values()?.iter().sum())
    }

    /// Hilbert–Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Singular values, descending. Hermitian operators take the cheaper
    /// spectral route; the two paths are cross-checked in the tests.
    fn singular_values(&self) -> Result<Vec<f64>> {
        if self.is_hermitian(1e-12) {
            let vals = linalg::eigvalsh(&self.mat)?;
            let mut svals: Vec<f64> = vals.iter().map(|x| x.abs()).collect();
            svals.sort_by(|a, b| b.total_cmp(a));
            Ok(svals)
        } else {
            let (_, s, _) = self
                .mat
                .svd(false, false)
                .map_err(|e| Error::Linalg(format!("SVD failed: {e}")))?;
            Ok(s.to_vec())
        }
    }

    /// Von Neumann entropy `-Σ λ ln λ` (in nats) of a Hermitian,
    /// positive-semidefinite operator; `0 ln 0 = 0`.
    ///
    /// Eigenvalues in `[-1e-8, 0)` are clipped to zero (numerical noise);
    /// anything below that is a genuine negativity and an error.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        if !self.is_hermitian(1e-8) {
            return Err(Error::InvalidState(
                "entropy of a non-Hermitian operator".into(),
            ));
        }
        let vals = linalg::eigvalsh(&linalg::hermitize(&self.mat))?;
        let mut s = 0.0;
        for &l in vals.iter() {
            if l < -1e-8 {
                return Err(Error::InvalidState(format!(
                    "entropy of an operator with negative eigenvalue {l:.3e}"
                )));
            }
            if l > 0.0 {
                s -= l * l.ln();
            }
        }
        Ok(s)
    }
}

/// Swap operator `V` on two copies: `V |i⟩|j⟩ = |j⟩|i⟩`, so that
/// `tr[V (A ⊗ B)] = tr[AB]`. Each copy may itself be multi-mode.
pub fn swap_operator(cutoff: usize, factor_modes: usize) -> Result<FockOperator> {
    cyclic_shift(cutoff, factor_modes, 2)
}

/// Cyclic shift operator `V_m` on `m` copies of a `factor_modes`-mode space:
/// `V_m |i_1⟩|i_2⟩…|i_m⟩ = |i_2⟩…|i_m⟩|i_1⟩`.
///
/// This orientation realizes the product-trace identity
/// `tr[V_m (A_1 ⊗ A_2 ⊗ … ⊗ A_m)] = tr[A_1 A_2 … A_m]`,
/// which the polynomial witnesses rely on. `m = 1` yields the identity.
pub fn cyclic_shift(cutoff: usize, factor_modes: usize, m: usize) -> Result<FockOperator> {
    if m < 1 {
        return Err(Error::InvalidDimension(
            "cyclic shift requires at least one copy".into(),
        ));
    }
    let d = checked_side(cutoff, factor_modes)?;
    let side = checked_side(d, m)?;
    let stride = side / d; // d^{m-1}
    let mut mat = Array2::zeros((side, side));
    for p in 0..side {
        // Row-major digits of p are (i_1, …, i_m) with i_1 most significant;
        // the image column has digits (i_2, …, i_m, i_1).
        let i1 = p / stride;
        let rest = p % stride;
        let q = rest * d + i1;
        mat[(q, p)] = C64::new(1.0, 0.0);
    }
    FockOperator::new(mat, cutoff, factor_modes * m)
}

/// A validated density operator on a truncated Fock space.
///
/// `tail_mass` is the probability weight lost to truncation: the stored
/// matrix has trace `≈ 1 - tail_mass`. States built directly in the
/// truncated space have `tail_mass = 0`; synthesized states record their
/// measured trace deficit.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    op: FockOperator,
    tail_mass: f64,
}

impl DensityState {
    /// Validate and wrap: Hermitian within `1e-8`, eigenvalues `≥ -1e-10`,
    /// and `|tr + tail_mass - 1| ≤ 1e-8`. The stored matrix is the Hermitian
    /// part of the input (harmless for valid input, by the first check).
    pub fn new(op: FockOperator, tail_mass: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tail_mass) {
            return Err(Error::InvalidState(format!(
                "tail mass {tail_mass} outside [0, 1]"
            )));
        }
        if !op.is_hermitian(1e-8) {
            return Err(Error::InvalidState(format!(
                "density matrix is not Hermitian (defect {:.3e})",
                linalg::hermiticity_defect(&op.mat)
            )));
        }
        let op = op.hermitized();
        let tr = op.trace();
        if (tr.re + tail_mass - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidState(format!(
                "trace {:.12} inconsistent with tail mass {tail_mass:.3e}",
                tr.re
            )));
        }
        let eigs = linalg::eigvalsh(&op.mat)?;
        if let Some(&min) = eigs.iter().min_by(|a, b| a.total_cmp(b)) {
            if min < -1e-10 {
                return Err(Error::InvalidState(format!(
                    "negative eigenvalue {min:.3e} beyond tolerance"
                )));
            }
        }
        Ok(Self { op, tail_mass })
    }

    /// Construction bypassing the spectral check, for internal hot paths
    /// whose output is positive semidefinite by construction. The trace
    /// consistency check still runs in debug builds.
    pub(crate) fn new_unchecked(op: FockOperator, tail_mass: f64) -> Self {
        debug_assert!((op.trace().re + tail_mass - 1.0).abs() <= 1e-6);
        Self {
            op: op.hermitized(),
            tail_mass,
        }
    }

    /// Pure state from an amplitude vector (single- or multi-mode). The
    /// squared norm must equal `1 - tail_mass` within `1e-8`.
    pub fn from_pure(amplitudes: &Array1<C64>, cutoff: usize, modes: usize, tail_mass: f64) -> Result<Self> {
        let side = checked_side(cutoff, modes)?;
        if amplitudes.len() != side {
            return Err(Error::DimensionMismatch {
                left: format!("{} amplitudes", amplitudes.len()),
                right: format!("cutoff {cutoff}, {modes} mode(s) (side {side})"),
                context: "DensityState::from_pure".into(),
            });
        }
        let mut mat = Array2::zeros((side, side));
        for (i, a) in amplitudes.iter().enumerate() {
            for (j, b) in amplitudes.iter().enumerate() {
                mat[(i, j)] = a * b.conj();
            }
        }
        Self::new(FockOperator::new(mat, cutoff, modes)?, tail_mass)
    }

    /// Fock basis state `|n⟩⟨n|` (zero tail: the state fits exactly).
    pub fn fock(n: usize, cutoff: usize) -> Result<Self> {
        Self::new(FockOperator::basis_projector(n, cutoff)?, 0.0)
    }

    /// Maximally mixed state `I/side`, handy as a test fixture.
    pub fn maximally_mixed(cutoff: usize, modes: usize) -> Result<Self> {
        let id = FockOperator::identity(cutoff, modes)?;
        let side = id.side();
        Self::new(id.scaled(C64::new(1.0 / side as f64, 0.0)), 0.0)
    }

    /// Underlying operator.
    pub fn operator(&self) -> &FockOperator {
        &self.op
    }

    /// Underlying matrix.
    pub fn matrix(&self) -> &Array2<C64> {
        self.op.matrix()
    }

    /// Probability weight lost to truncation.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Fock-space cutoff.
    pub fn cutoff(&self) -> usize {
        self.op.cutoff()
    }

    /// Number of modes.
    pub fn modes(&self) -> usize {
        self.op.modes()
    }

    /// Matrix side length.
    pub fn side(&self) -> usize {
        self.op.side()
    }

    /// Numeric trace (≈ `1 - tail_mass`).
    pub fn trace(&self) -> f64 {
        self.op.trace().re
    }

    /// Purity `tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        linalg::trace_product(self.op.matrix(), self.op.matrix()).re
    }

    /// Von Neumann entropy of the stored (truncated) matrix, in nats.
    pub fn entropy(&self) -> Result<f64> {
        self.op.von_neumann_entropy()
    }

    /// Expectation value `tr[X ρ]` of a Hermitian observable (real part;
    /// the imaginary part vanishes for Hermitian `X` and Hermitian `ρ`).
    pub fn expectation(&self, x: &FockOperator) -> Result<f64> {
        Ok(x.trace_product(&self.op)?.re)
    }

    /// Tensor product of two states; tail masses combine as
    /// `1 - (1-t₁)(1-t₂)`.
    pub fn tensor(&self, rhs: &Self) -> Result<Self> {
        let op = self.op.tensor(&rhs.op)?;
        let tail = 1.0 - (1.0 - self.tail_mass) * (1.0 - rhs.tail_mass);
        Ok(Self::new_unchecked(op, tail))
    }

    /// `m`-fold tensor power (`m ≥ 1`).
    pub fn tensor_power(&self, m: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidDimension(
                "tensor power requires at least one factor".into(),
            ));
        }
        let mut out = self.clone();
        for _ in 1..m {
            out = out.tensor(self)?;
        }
        Ok(out)
    }
}

/// Harmonic-oscillator eigenfunctions `ψ_0(x), …, ψ_{count-1}(x)` in the
/// convention matching `x = (a + a†)/√2`, i.e. `ψ_0(x) = π^{-1/4} e^{-x²/2}`.
pub fn hermite_functions(x: f64, count: usize) -> Vec<f64> {
    let mut psi = Vec::with_capacity(count);
    if count == 0 {
        return psi;
    }
    let psi0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    psi.push(psi0);
    if count == 1 {
        return psi;
    }
    psi.push(std::f64::consts::SQRT_2 * x * psi0);
    for m in 1..count - 1 {
        let m_f = m as f64;
        let next = (2.0 / (m_f + 1.0)).sqrt() * x * psi[m] - (m_f / (m_f + 1.0)).sqrt() * psi[m - 1];
        psi.push(next);
    }
    psi
}

/// Position-quadrature distribution `p(x) = ⟨x|ρ|x⟩` of a single-mode state.
///
/// Integrates to the state's trace (so `1 - tail_mass`); the vacuum gives
/// `e^{-x²}/√π`.
pub fn quadrature_distribution(rho: &DensityState, x: f64) -> Result<f64> {
    if rho.modes() != 1 {
        return Err(Error::InvalidDimension(format!(
            "quadrature distribution is single-mode only, got {} modes",
            rho.modes()
        )));
    }
    let psi = hermite_functions(x, rho.cutoff());
    let mat = rho.matrix();
    let mut p = 0.0;
    for (m, &pm) in psi.iter().enumerate() {
        let mut inner = C64::new(0.0, 0.0);
        for (n, &pn) in psi.iter().enumerate() {
            inner += mat[(m, n)] * pn;
        }
        p += pm * inner.re;
    }
    Ok(p.max(0.0))
}

// ---------------------------------------------------------------------------
// Binary serialization
// ---------------------------------------------------------------------------

impl FockOperator {
    /// Serialize to the binary operator format: magic `FOCKOP1\0`, cutoff and
    /// modes as little-endian `u32`, then the matrix row-major as
    /// little-endian `(re, im)` `f64` pairs.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.cutoff as u32).to_le_bytes())?;
        w.write_all(&(self.modes as u32).to_le_bytes())?;
        for z in self.mat.iter() {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Deserialize from the binary operator format; strict about magic,
    /// header consistency, and payload length.
    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)
            .map_err(|e| Error::Serialization(format!("header too short: {e}")))?;
        if &magic != MAGIC {
            return Err(Error::Serialization(format!(
                "bad magic {magic:02x?}, expected {MAGIC:02x?}"
            )));
        }
        let mut word = [0u8; 4];
        r.read_exact(&mut word)?;
        let cutoff = u32::from_le_bytes(word) as usize;
        r.read_exact(&mut word)?;
        let modes = u32::from_le_bytes(word) as usize;
        let side = checked_side(cutoff.max(2), modes.max(1))?;
        if cutoff < 2 || modes < 1 {
            return Err(Error::Serialization(format!(
                "invalid header: cutoff {cutoff}, modes {modes}"
            )));
        }
        let mut mat = Array2::zeros((side, side));
        let mut pair = [0u8; 16];
        for i in 0..side {
            for j in 0..side {
                r.read_exact(&mut pair).map_err(|e| {
                    Error::Serialization(format!("payload truncated at entry ({i},{j}): {e}"))
                })?;
                let re = f64::from_le_bytes(pair[..8].try_into().expect("slice length 8"));
                let im = f64::from_le_bytes(pair[8..].try_into().expect("slice length 8"));
                mat[(i, j)] = C64::new(re, im);
            }
        }
        Self::new(mat, cutoff, modes)
    }

    /// Serialize into a fresh byte vector.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(16 + self.side() * self.side() * 16);
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    /// Deserialize from bytes.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cursor = bytes;
        Self::read_from(&mut cursor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_complex(n: usize, seed: u64) -> Array2<C64> {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        Array2::from_shape_fn((n, n), |_| C64::new(next(), next()))
    }

    fn op(mat: Array2<C64>, cutoff: usize, modes: usize) -> FockOperator {
        FockOperator::new(mat, cutoff, modes).unwrap()
    }

    #[test]
    fn ladder_matrix_elements() {
        let a = FockOperator::annihilation(4).unwrap();
        assert_eq!(a.matrix()[(0, 1)], C64::new(1.0, 0.0));
        assert!((a.matrix()[(1, 2)].re - 2f64.sqrt()).abs() < 1e-15);
        assert!((a.matrix()[(2, 3)].re - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(a.matrix()[(1, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn ladder_commutator_is_identity_below_corner() {
        let cutoff = 7;
        let a = FockOperator::annihilation(cutoff).unwrap();
        let ad = a.dagger();
        let comm = &a.matmul(&ad).unwrap().into_matrix() - &ad.matmul(&a).unwrap().into_matrix();
        for n in 0..cutoff - 1 {
            assert!((comm[(n, n)] - C64::new(1.0, 0.0)).norm() < 1e-14);
        }
        // Truncation artifact: the corner entry is 1 - cutoff, not 1.
        assert!((comm[(cutoff - 1, cutoff - 1)].re - (1.0 - cutoff as f64)).abs() < 1e-12);
    }

    #[test]
    fn cutoff_below_two_is_rejected() {
        assert!(matches!(
            FockOperator::annihilation(1),
            Err(Error::InvalidDimension(_))
        ));
        assert!(matches!(
            FockOperator::identity(0, 1),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn number_operator_via_ladder() {
        let cutoff = 5;
        let a = FockOperator::annihilation(cutoff).unwrap();
        let n_direct = FockOperator::number(cutoff).unwrap();
        let n_ladder = a.dagger().matmul(&a).unwrap();
        let err = (&n_direct.into_matrix() - &n_ladder.into_matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-14);
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let id = FockOperator::identity(3, 1).unwrap();
        let id2 = id.tensor(&id).unwrap();
        assert_eq!(id2.modes(), 2);
        assert_eq!(id2.side(), 9);
        let err = (id2.matrix() - &linalg::identity(9))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-15);
    }

    #[test]
    fn tensor_trace_is_multiplicative() {
        let a = op(lcg_complex(4, 5), 4, 1);
        let b = op(lcg_complex(4, 6), 4, 1);
        let t = a.tensor(&b).unwrap();
        let expected = a.trace() * b.trace();
        assert!((t.trace() - expected).norm() < 1e-12);
    }

    #[test]
    fn tensor_index_convention_first_factor_most_significant() {
        let a = op(lcg_complex(3, 7), 3, 1);
        let b = op(lcg_complex(3, 8), 3, 1);
        let t = a.tensor(&b).unwrap();
        for (i, j, k, l) in [(0usize, 2usize, 1usize, 0usize), (2, 1, 2, 2), (1, 1, 0, 2)] {
            let lhs = t.matrix()[(i * 3 + k, j * 3 + l)];
            let rhs = a.matrix()[(i, j)] * b.matrix()[(k, l)];
            assert!((lhs - rhs).norm() < 1e-15);
        }
    }

    #[test]
    fn tensor_mismatched_cutoffs_rejected() {
        let a = FockOperator::identity(3, 1).unwrap();
        let b = FockOperator::identity(4, 1).unwrap();
        assert!(matches!(a.tensor(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn tensor_power_guards() {
        let a = FockOperator::identity(3, 1).unwrap();
        assert!(matches!(a.tensor_power(0), Err(Error::InvalidDimension(_))));
        // 3^9 = 19683 > MAX_SIDE: refused as a resource error.
        assert!(matches!(a.tensor_power(9), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn swap_squares_to_identity_and_traces_products() {
        let v = swap_operator(3, 1).unwrap();
        let v2 = v.matmul(&v).unwrap();
        let err = (v2.matrix() - &linalg::identity(9))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-15);

        let a = op(lcg_complex(3, 10), 3, 1);
        let b = op(lcg_complex(3, 11), 3, 1);
        let lhs = v.trace_product(&a.tensor(&b).unwrap()).unwrap();
        let rhs = a.matmul(&b).unwrap().trace();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn cyclic_shift_one_copy_is_identity() {
        let v = cyclic_shift(4, 1, 1).unwrap();
        let err = (v.matrix() - &linalg::identity(4))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-15);
    }

    #[test]
    fn cyclic_shift_two_copies_is_swap() {
        let v = cyclic_shift(3, 1, 2).unwrap();
        let w = swap_operator(3, 1).unwrap();
        assert_eq!(v.matrix(), w.matrix());
    }

    #[test]
    fn cyclic_shift_traces_ordered_products() {
        // 100 random tuples across copy counts 2, 3, 4; relative error 1e-10.
        let mut case = 0u64;
        while case < 100 {
            for (m, cutoff) in [(2usize, 4usize), (3, 3), (4, 2)] {
                case += 1;
                let ops: Vec<FockOperator> = (0..m)
                    .map(|k| op(lcg_complex(cutoff, 1000 + 7 * case + k as u64), cutoff, 1))
                    .collect();
                let mut kron = ops[0].clone();
                for o in &ops[1..] {
                    kron = kron.tensor(o).unwrap();
                }
                let mut prod = ops[0].clone();
                for o in &ops[1..] {
                    prod = prod.matmul(o).unwrap();
                }
                let v = cyclic_shift(cutoff, 1, m).unwrap();
                let lhs = v.trace_product(&kron).unwrap();
                let rhs = prod.trace();
                let scale = rhs.norm().max(1e-30);
                assert!(
                    (lhs - rhs).norm() / scale < 1e-10,
                    "m={m} cutoff={cutoff}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn cyclic_shift_on_multimode_factors() {
        // Two copies of a 2-mode space: swap must trace products there too.
        let a = op(lcg_complex(9, 41), 3, 2);
        let b = op(lcg_complex(9, 42), 3, 2);
        let v = swap_operator(3, 2).unwrap();
        let lhs = v.trace_product(&a.tensor(&b).unwrap()).unwrap();
        let rhs = a.matmul(&b).unwrap().trace();
        assert!((lhs - rhs).norm() < 1e-11);
    }

    #[test]
    fn norms_on_identity_and_rank_one() {
        let id = FockOperator::identity(5, 1).unwrap();
        assert!((id.op_norm().unwrap() - 1.0).abs() < 1e-12);
        assert!((id.trace_norm().unwrap() - 5.0).abs() < 1e-12);
        assert!((id.hs_norm() - 5f64.sqrt()).abs() < 1e-12);

        // |0⟩⟨1| has a single unit singular value.
        let mut mat = Array2::zeros((4, 4));
        mat[(0, 1)] = C64::new(1.0, 0.0);
        let r = op(mat, 4, 1);
        assert!((r.op_norm().unwrap() - 1.0).abs() < 1e-12);
        assert!((r.trace_norm().unwrap() - 1.0).abs() < 1e-12);
        assert!((r.hs_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_norms_match_svd_oracle() {
        // The Hermitian fast path must agree with a plain SVD.
        for seed in [2u64, 3, 4] {
            let h = op(linalg::hermitize(&lcg_complex(6, seed)), 6, 1);
            let (_, s, _) = h.matrix().svd(false, false).unwrap();
            let svd_op = s[0];
            let svd_tr: f64 = s.iter().sum();
            assert!((h.op_norm().unwrap() - svd_op).abs() < 1e-10);
            assert!((h.trace_norm().unwrap() - svd_tr).abs() < 1e-10);
        }
    }

    #[test]
    fn norm_ordering_on_random_hermitians() {
        for seed in [5u64, 6, 7, 8] {
            let h = op(linalg::hermitize(&lcg_complex(7, seed)), 7, 1);
            let opn = h.op_norm().unwrap();
            let hs = h.hs_norm();
            let tr = h.trace_norm().unwrap();
            assert!(opn <= hs + 1e-12 && hs <= tr + 1e-12, "{opn} {hs} {tr}");
        }
    }

    #[test]
    fn entropy_pure_mixed_and_unitary_invariance() {
        let pure = DensityState::fock(2, 6).unwrap();
        assert!(pure.entropy().unwrap().abs() < 1e-12);

        let mixed = DensityState::maximally_mixed(5, 1).unwrap();
        assert!((mixed.entropy().unwrap() - 5f64.ln()).abs() < 1e-12);

        // Unitary invariance, with the unitary from the matrix exponential.
        let h = linalg::hermitize(&lcg_complex(6, 13));
        let u = linalg::expm(&h.mapv(|z| z * C64::new(0.0, -1.0))).unwrap();
        let rho = {
            let mut diag = Array2::zeros((6, 6));
            for (k, w) in [0.4, 0.3, 0.15, 0.1, 0.05, 0.0].iter().enumerate() {
                diag[(k, k)] = C64::new(*w, 0.0);
            }
            diag
        };
        let rotated = u.dot(&rho).dot(&linalg::adjoint(&u));
        let s_direct = op(rho, 6, 1).von_neumann_entropy().unwrap();
        let s_rotated = op(rotated, 6, 1).von_neumann_entropy().unwrap();
        assert!((s_direct - s_rotated).abs() < 1e-10);
    }

    #[test]
    fn entropy_rejects_genuinely_negative_operators() {
        let mut mat = Array2::zeros((3, 3));
        mat[(0, 0)] = C64::new(1.5, 0.0);
        mat[(1, 1)] = C64::new(-0.5, 0.0);
        let o = op(mat, 3, 1);
        assert!(matches!(o.von_neumann_entropy(), Err(Error::InvalidState(_))));
    }

    #[test]
    fn purity_values() {
        assert!((DensityState::fock(1, 5).unwrap().purity() - 1.0).abs() < 1e-12);
        let mixed = DensityState::maximally_mixed(4, 1).unwrap();
        assert!((mixed.purity() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn density_state_validation_rejects_bad_input() {
        // Negative eigenvalue.
        let mut neg = Array2::zeros((3, 3));
        neg[(0, 0)] = C64::new(1.5, 0.0);
        neg[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(matches!(
            DensityState::new(op(neg, 3, 1), 0.0),
            Err(Error::InvalidState(_))
        ));

        // Trace inconsistent with declared tail mass.
        let half = FockOperator::basis_projector(0, 3).unwrap().scaled(C64::new(0.5, 0.0));
        assert!(matches!(DensityState::new(half.clone(), 0.0), Err(Error::InvalidState(_))));
        assert!(DensityState::new(half, 0.5).is_ok());

        // Non-Hermitian.
        let mut nh = Array2::zeros((3, 3));
        nh[(0, 0)] = C64::new(1.0, 0.0);
        nh[(0, 1)] = C64::new(0.3, 0.0);
        assert!(matches!(
            DensityState::new(op(nh, 3, 1), 0.0),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn density_tensor_combines_tails() {
        let a = DensityState::new(
            FockOperator::basis_projector(0, 3).unwrap().scaled(C64::new(0.9, 0.0)),
            0.1,
        )
        .unwrap();
        let b = a.clone();
        let t = a.tensor(&b).unwrap();
        assert!((t.tail_mass() - (1.0 - 0.81)).abs() < 1e-12);
        assert!((t.trace() - 0.81).abs() < 1e-12);
    }

    #[test]
    fn quadrature_distribution_vacuum_and_one_photon() {
        let vac = DensityState::fock(0, 12).unwrap();
        let one = DensityState::fock(1, 12).unwrap();
        let sqrt_pi = std::f64::consts::PI.sqrt();
        for &x in &[0.0, 0.5, -1.3, 2.2] {
            let p_vac = quadrature_distribution(&vac, x).unwrap();
            assert!((p_vac - (-x * x).exp() / sqrt_pi).abs() < 1e-12);
            let p_one = quadrature_distribution(&one, x).unwrap();
            assert!((p_one - 2.0 * x * x * (-x * x).exp() / sqrt_pi).abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_distribution_normalizes() {
        let rho = DensityState::fock(3, 16).unwrap();
        let mut integral = 0.0;
        let step = 0.01;
        let mut x = -8.0;
        while x <= 8.0 {
            integral += quadrature_distribution(&rho, x).unwrap() * step;
            x += step;
        }
        assert!((integral - 1.0).abs() < 1e-6, "integral {integral}");
    }

    #[test]
    fn serialization_round_trip_is_exact() {
        let a = op(lcg_complex(5, 77), 5, 1);
        let bytes = a.to_bytes();
        assert_eq!(bytes.len(), 16 + 25 * 16);
        assert_eq!(&bytes[..8], MAGIC);
        let back = FockOperator::from_bytes(&bytes).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn serialization_rejects_corruption() {
        let a = op(lcg_complex(3, 78), 3, 1);
        let mut bytes = a.to_bytes();

        let mut bad_magic = bytes.clone();
        bad_magic[0] = b'X';
        assert!(matches!(
            FockOperator::from_bytes(&bad_magic),
            Err(Error::Serialization(_))
        ));

        bytes.truncate(bytes.len() - 8);
        assert!(matches!(
            FockOperator::from_bytes(&bytes),
            Err(Error::Serialization(_))
        ));
    }

    #[test]
    fn serialization_round_trips_multimode() {
        let v = swap_operator(3, 1).unwrap();
        let back = FockOperator::from_bytes(&v.to_bytes()).unwrap();
        assert_eq!(back.modes(), 2);
        assert_eq!(v, back);
    }
}
