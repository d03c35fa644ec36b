//! Derivative-free optimization used by every variational routine in the
//! crate: a box-bounded Nelder–Mead simplex search, a deterministic
//! multistart driver over the Gaussian parameter box, digital-shifted Sobol
//! sampling, and golden-section line searches.
//!
//! Determinism is a hard requirement: a fixed seed must reproduce every
//! stochastic choice bit-for-bit, including when starts are evaluated in
//! parallel. Multistart results are collected in start order and the winner
//! is chosen by `(value, start index)`, so thread scheduling can never
//! change the outcome.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gaussian::GaussianParams;
use crate::{Error, Result};

/// Search box for the five Gaussian parameters `(n̄, r, φ, α_x, α_y)`.
///
/// Both displacement components share the `alpha` interval. Defaults cover
/// the regime every shipped case study lives in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamBox {
    /// Bounds on the thermal occupation `n̄`.
    pub nbar: [f64; 2],
    /// Bounds on the squeezing magnitude `r`.
    pub r: [f64; 2],
    /// Bounds on the squeezing axis `φ`.
    pub phi: [f64; 2],
    /// Bounds on each displacement component.
    pub alpha: [f64; 2],
}

impl Default for ParamBox {
    fn default() -> Self {
        Self {
            nbar: [0.0, 20.0],
            r: [0.0, 2.0],
            phi: [0.0, 2.0 * std::f64::consts::PI],
            alpha: [-6.0, 6.0],
        }
    }
}

impl ParamBox {
    /// Lower corner as a parameter vector.
    pub fn lower(&self) -> [f64; 5] {
        [self.nbar[0], self.r[0], self.phi[0], self.alpha[0], self.alpha[0]]
    }

    /// Upper corner as a parameter vector.
    pub fn upper(&self) -> [f64; 5] {
        [self.nbar[1], self.r[1], self.phi[1], self.alpha[1], self.alpha[1]]
    }

    /// Clip a parameter vector into the box.
    pub fn clip(&self, x: &mut [f64]) {
        let lo = self.lower();
        let hi = self.upper();
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = xi.clamp(lo[i], hi[i]);
        }
    }

    /// Uniform sample from the box.
    fn sample<R: Rng>(&self, rng: &mut R) -> [f64; 5] {
        let lo = self.lower();
        let hi = self.upper();
        let mut x = [0.0; 5];
        for i in 0..5 {
            x[i] = rng.random_range(lo[i]..=hi[i]);
        }
        x
    }
}

/// Configuration shared by all Gaussian-family searches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Number of simplex starts (seed points count toward this).
    pub starts: usize,
    /// Function-evaluation budget *per start*.
    pub max_evals: usize,
    /// Simplex-diameter convergence tolerance.
    pub xtol: f64,
    /// Function-spread convergence tolerance.
    pub ftol: f64,
    /// Seed for every stochastic choice (start points, Sobol shifts).
    pub seed: u64,
    /// Parameter search box.
    #[serde(rename = "box", default)]
    pub bounds: ParamBox,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 12,
            max_evals: 2000,
            xtol: 1e-8,
            ftol: 1e-11,
            seed: 17,
            bounds: ParamBox::default(),
        }
    }
}

/// Outcome of one simplex start.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StartRecord {
    /// Where the simplex started.
    pub start: GaussianParams,
    /// Best parameters this start reached.
    pub best: GaussianParams,
    /// Objective at `best`; `+∞` if the whole branch was infeasible.
    pub value: f64,
    /// Function evaluations consumed.
    pub evals: usize,
    /// Whether the simplex met the tolerance targets within budget.
    pub converged: bool,
}

/// How a multistart search ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    /// At least one start converged to tolerance.
    Converged,
    /// Every start ran out of budget first (best value still returned).
    BudgetExhausted,
}

/// Result of a deterministic multistart search over the Gaussian box.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultistartOutcome {
    /// Best parameters found across all starts.
    pub best_params: GaussianParams,
    /// Objective value at the winner.
    pub best_value: f64,
    /// Convergence status of the winning branch population.
    pub status: SearchStatus,
    /// Per-start log, in start order.
    pub log: Vec<StartRecord>,
    /// Total function evaluations across starts.
    pub total_evals: usize,
}

/// Minimize `objective` over the Gaussian parameter box.
///
/// Starts are, in order: the caller-provided `seeds` (clipped into the box),
/// then uniform draws from a ChaCha stream keyed by `cfg.seed`, up to
/// `cfg.starts` total. Starts run in parallel; the outcome is independent of
/// thread count. Fails with [`Error::NoFeasibleReference`] when every start
/// ends at an infinite objective.
pub fn search_gaussian<F>(
    objective: F,
    cfg: &OptimizerConfig,
    seeds: &[GaussianParams],
) -> Result<MultistartOutcome>
where
    F: Fn(&GaussianParams) -> f64 + Sync,
{
    if cfg.starts == 0 {
        return Err(Error::InvalidDimension("optimizer needs at least one start".into()));
    }
    let mut starts: Vec<[f64; 5]> = Vec::with_capacity(cfg.starts);
    for s in seeds.iter().take(cfg.starts) {
        let mut x = s.as_array();
        cfg.bounds.clip(&mut x);
        starts.push(x);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    while starts.len() < cfg.starts {
        starts.push(cfg.bounds.sample(&mut rng));
    }

    let lo = cfg.bounds.lower();
    let hi = cfg.bounds.upper();
    let options = NmOptions {
        max_evals: cfg.max_evals,
        xtol: cfg.xtol,
        ftol: cfg.ftol,
    };
    let f = |x: &[f64]| {
        let v = objective(&GaussianParams::from_array([x[0], x[1], x[2], x[3], x[4]]));
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let log: Vec<StartRecord> = starts
        .par_iter()
        .map(|start| {
            let run = nelder_mead(&f, start, &lo, &hi, &options);
            StartRecord {
                start: GaussianParams::from_array(*start),
                best: GaussianParams::from_array(
                    run.x.as_slice().try_into().expect("5 parameters"),
                ),
                value: run.value,
                evals: run.evals,
                converged: run.converged,
            }
        })
        .collect();

    let total_evals = log.iter().map(|r| r.evals).sum();
    let (winner_idx, winner) = log
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .expect("at least one start");
    if !winner.value.is_finite() {
        return Err(Error::NoFeasibleReference(format!(
            "all {} starts hit infeasible objectives",
            log.len()
        )));
    }
    let status = if log[winner_idx].converged {
        SearchStatus::Converged
    } else {
        SearchStatus::BudgetExhausted
    };
    Ok(MultistartOutcome {
        best_params: winner.best,
        best_value: winner.value,
        status,
        log,
        total_evals,
    })
}

/// Options for a single Nelder–Mead run.
#[derive(Debug, Clone, Copy)]
pub struct NmOptions {
    /// Function-evaluation budget.
    pub max_evals: usize,
    /// Convergence when the simplex diameter falls below this.
    pub xtol: f64,
    /// Convergence when the function spread falls below this.
    pub ftol: f64,
}

impl Default for NmOptions {
    fn default() -> Self {
        Self { max_evals: 2000, xtol: 1e-8, ftol: 1e-11 }
    }
}

/// Result of a single Nelder–Mead run.
#[derive(Debug, Clone)]
pub struct NmResult {
    /// Best point found.
    pub x: Vec<f64>,
    /// Objective at `x`.
    pub value: f64,
    /// Evaluations consumed.
    pub evals: usize,
    /// Whether a tolerance target was met within budget.
    pub converged: bool,
}

/// Box-bounded Nelder–Mead simplex minimization.
///
/// Standard reflection/expansion/contraction/shrink coefficients
/// (1, 2, 1/2, 1/2); every candidate point is projected into the box before
/// evaluation, which handles optima on the boundary without penalty terms.
/// `NaN` objective values are treated as `+∞`.
pub fn nelder_mead<F>(f: F, x0: &[f64], lo: &[f64], hi: &[f64], opts: &NmOptions) -> NmResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    assert!(n > 0 && lo.len() == n && hi.len() == n, "inconsistent bounds");
    let clip = |x: &mut Vec<f64>| {
        for i in 0..n {
            x[i] = x[i].clamp(lo[i], hi[i]);
        }
    };
    let sanitize = |v: f64| if v.is_nan() { f64::INFINITY } else { v };

    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &Vec<f64>| -> f64 {
        evals.set(evals.get() + 1);
        sanitize(f(x))
    };

    // Initial simplex: x0 plus a step of 5% of the box width along each
    // axis, stepping inward when x0 sits on the upper bound.
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut start = x0.to_vec();
    clip(&mut start);
    simplex.push(start.clone());
    for i in 0..n {
        let width = (hi[i] - lo[i]).max(1e-12);
        let step = 0.05 * width;
        let mut v = start.clone();
        v[i] = if v[i] + step <= hi[i] { v[i] + step } else { v[i] - step };
        clip(&mut v);
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(eval).collect();

    let mut converged = false;
    while evals.get() < opts.max_evals {
        // Order ascending by value (ties by index for determinism).
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let reorder_simplex: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let reorder_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = reorder_simplex;
        values = reorder_values;

        let spread = values[n] - values[0];
        let diameter = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (spread.is_finite() && spread <= opts.ftol) || diameter <= opts.xtol {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for i in 0..n {
                centroid[i] += v[i] / n as f64;
            }
        }

        let lerp = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = (0..n)
                .map(|i| centroid[i] + t * (centroid[i] - simplex[n][i]))
                .collect();
            clip(&mut p);
            p
        };

        let reflected = lerp(1.0);
        let f_reflected = eval(&reflected);
        if f_reflected < values[0] {
            // Try expanding further along the same direction.
            let expanded = lerp(2.0);
            let f_expanded = eval(&expanded);
            if f_expanded < f_reflected {
                simplex[n] = expanded;
                values[n] = f_expanded;
            } else {
                simplex[n] = reflected;
                values[n] = f_reflected;
            }
        } else if f_reflected < values[n - 1] {
            simplex[n] = reflected;
            values[n] = f_reflected;
        } else {
            // Contract (outside if the reflection helped at all, inside
            // otherwise); shrink toward the best vertex when even that fails.
            let (candidate, f_candidate) = if f_reflected < values[n] {
                let c = lerp(0.5);
                let fc = eval(&c);
                (c, fc)
            } else {
                let c = lerp(-0.5);
                let fc = eval(&c);
                (c, fc)
            };
            if f_candidate < values[n].min(f_reflected) {
                simplex[n] = candidate;
                values[n] = f_candidate;
            } else {
                for k in 1..=n {
                    let mut v: Vec<f64> = simplex[k]
                        .iter()
                        .zip(&simplex[0])
                        .map(|(xv, xb)| xb + 0.5 * (xv - xb))
                        .collect();
                    clip(&mut v);
                    values[k] = eval(&v);
                    simplex[k] = v;
                    if evals.get() >= opts.max_evals {
                        break;
                    }
                }
            }
        }
    }

    let best = values
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.total_cmp(b).then(i.cmp(j)))
        .map(|(i, _)| i)
        .expect("nonempty simplex");
    NmResult {
        x: simplex[best].clone(),
        value: values[best],
        evals: evals.get(),
        converged,
    }
}

// ---------------------------------------------------------------------------
// Sobol sampling
// ---------------------------------------------------------------------------

/// Primitive-polynomial data for Sobol dimensions 2–6 (dimension 1 is the
/// van der Corput sequence): `(degree, coefficients a, initial m values)`.
const SOBOL_TABLE: [(u32, u32, [u32; 4]); 5] = [
    (1, 0, [1, 0, 0, 0]),
    (2, 1, [1, 3, 0, 0]),
    (3, 1, [1, 3, 1, 0]),
    (3, 2, [1, 1, 1, 0]),
    (4, 1, [1, 1, 3, 3]),
];

const SOBOL_BITS: u32 = 32;

/// Direction numbers for one Sobol dimension.
fn direction_numbers(dim: usize) -> [u32; SOBOL_BITS as usize] {
    let mut v = [0u32; SOBOL_BITS as usize];
    if dim == 0 {
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = 1u32 << (SOBOL_BITS - 1 - k as u32);
        }
        return v;
    }
    let (s, a, m_init) = SOBOL_TABLE[dim - 1];
    let s = s as usize;
    let mut m = vec![0u32; s];
    m.copy_from_slice(&m_init[..s]);
    let mut ms: Vec<u32> = m.clone();
    for k in s..SOBOL_BITS as usize {
        let mut mk = ms[k - s] ^ (ms[k - s] << s);
        for i in 1..s {
            let a_bit = (a >> (s - 1 - i)) & 1;
            if a_bit == 1 {
                mk ^= ms[k - i] << i;
            }
        }
        ms.push(mk);
    }
    for (k, slot) in v.iter_mut().enumerate() {
        *slot = ms[k] << (SOBOL_BITS - 1 - k as u32);
    }
    v
}

/// Unshifted Sobol points (Gray-code order, starting after the origin).
fn sobol_raw(dims: usize, count: usize) -> Vec<Vec<u32>> {
    let dirs: Vec<_> = (0..dims).map(direction_numbers).collect();
    let mut state = vec![0u32; dims];
    let mut out = Vec::with_capacity(count);
    for i in 0..count as u64 {
        // Lowest zero bit of i drives the Gray-code update.
        let c = (!i).trailing_zeros() as usize;
        for d in 0..dims {
            state[d] ^= dirs[d][c];
        }
        out.push(state.clone());
    }
    out
}

/// Deterministic low-discrepancy sample of `count` points in `[0, 1)^dims`
/// (`dims ≤ 6`): a Sobol sequence with a seed-keyed digital shift, so
/// different seeds decorrelate the sample while preserving equidistribution.
pub fn sobol_points(dims: usize, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if dims == 0 || dims > SOBOL_TABLE.len() + 1 {
        return Err(Error::InvalidDimension(format!(
            "Sobol sampling supports 1..={} dimensions, got {dims}",
            SOBOL_TABLE.len() + 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shifts: Vec<u32> = (0..dims).map(|_| rng.random()).collect();
    let scale = 1.0 / (1u64 << SOBOL_BITS) as f64;
    Ok(sobol_raw(dims, count)
        .into_iter()
        .map(|pt| {
            pt.iter()
                .zip(&shifts)
                .map(|(x, s)| f64::from(x ^ s) * scale)
                .collect()
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Golden-section line searches
// ---------------------------------------------------------------------------

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
/// Returns `(argmin, min)`; accurate to `tol` in the argument.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    if fx <= fc && fx <= fd {
        (x, fx)
    } else if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (x, neg) = golden_min(|t| -f(t), lo, hi, tol);
    (x, -neg)
}
