//! Multistart seesaw optimization of `⟨αβ|A|αβ⟩` over product states.
//!
//! With `β` fixed the objective is the Rayleigh quotient of the `M×M` matrix
//! `(I⊗⟨β|) A (I⊗|β⟩)`, so the best `α` is its top eigenvector; the same holds
//! with the roles swapped. Alternating the two exact updates gives a
//! non-decreasing objective sequence that converges to a local maximum. Many
//! random starts are run and the best local optimum is kept, which is a lower
//! bound on the true maximum over product states.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{CoeffVector, ObservableBasis};
use crate::error::{Error, Result};
use crate::hermitian::{eigh, CMatrix, CVector, HermitianOp, C64};
use crate::par::map_indexed;
use crate::states::{random_product_state_with, ProductState};

/// Two local optima closer than this are treated as the same value when
/// computing [`OptResult::spread`].
const DISTINCT_OPTIMUM_GAP: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    /// Number of random starts `S`.
    pub starts: usize,
    /// Iteration cap per start; one iteration updates both factors.
    pub max_iters: usize,
    /// Stop a start once a full iteration gains less than this.
    pub tolerance: f64,
    pub seed: u64,
    /// Evaluate starts on the rayon pool (ignored without the `parallel` feature).
    #[serde(default = "default_parallel")]
    pub parallel: bool,
}

fn default_parallel() -> bool {
    true
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            starts: 50,
            max_iters: 500,
            tolerance: 1e-10,
            seed: 0x5eed,
            parallel: true,
        }
    }
}

impl OptConfig {
    /// Budget used to re-verify thresholds before they are emitted.
    pub fn escalated(&self) -> Self {
        Self {
            starts: self.starts.saturating_mul(10),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(Error::InvalidConfig("starts must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("iteration cap must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return Err(Error::InvalidConfig("seesaw tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct OptResult {
    pub value: f64,
    pub argmax: ProductState,
    pub starts_used: usize,
    /// The start that produced `value` stopped on the tolerance rather than
    /// the iteration cap.
    pub converged: bool,
    /// Gap between the best and the second-best distinct local optimum; zero
    /// when every start reached the same value.
    pub spread: f64,
}

/// One seesaw run from a fixed start.
#[derive(Clone, Debug)]
pub struct SeesawRun {
    pub state: ProductState,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after the start and after every half-step.
    pub history: Vec<f64>,
}

/// `(I⊗⟨β|) A (I⊗|β⟩)`, an `M×M` Hermitian matrix.
fn contract_b(a: &CMatrix, beta: &CVector, m: usize, n: usize) -> CMatrix {
    let mut out = CMatrix::zeros(m, m);
    for i in 0..m {
        for k in 0..m {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                let bj = beta[j].conj();
                let row = i * n + j;
                for l in 0..n {
                    acc += bj * a[(row, k * n + l)] * beta[l];
                }
            }
            out[(i, k)] = acc;
        }
    }
    out
}

/// `(⟨α|⊗I) A (|α⟩⊗I)`, an `N×N` Hermitian matrix.
fn contract_a(a: &CMatrix, alpha: &CVector, m: usize, n: usize) -> CMatrix {
    let mut out = CMatrix::zeros(n, n);
    for i in 0..m {
        let ai = alpha[i].conj();
        for k in 0..m {
            let w = ai * alpha[k];
            if w.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                for l in 0..n {
                    out[(j, l)] += w * a[(i * n + j, k * n + l)];
                }
            }
        }
    }
    out
}

/// Top eigenpair; inside a degenerate top eigenspace the vector closest to
/// `prev` is chosen, falling back to the lowest-index eigenvector.
fn top_eigvec(h: &CMatrix, prev: &CVector) -> Result<(f64, CVector)> {
    if h.nrows() == 2 {
        return Ok(top_eigvec_2x2(h, prev));
    }
    let (vals, vecs) = eigh(h)?;
    let d = vals.len();
    let top = vals[d - 1];
    let scale = 1.0 + vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let group: Vec<usize> = (0..d).filter(|&i| vals[i] >= top - 1e-12 * scale).collect();
    if group.len() == 1 {
        return Ok((top, vecs.column(d - 1).into_owned()));
    }
    let mut proj = CVector::zeros(d);
    for &g in &group {
        let u = vecs.column(g);
        proj += u * u.dotc(prev);
    }
    let norm = proj.norm();
    if norm > 1e-12 {
        Ok((top, proj.unscale(norm)))
    } else {
        Ok((top, vecs.column(group[0]).into_owned()))
    }
}

/// Closed form for `[[a, b], [b̄, d]]`: `λ = (a+d)/2 + √(((a−d)/2)² + |b|²)`.
fn top_eigvec_2x2(h: &CMatrix, prev: &CVector) -> (f64, CVector) {
    let (a, d, b) = (h[(0, 0)].re, h[(1, 1)].re, h[(0, 1)]);
    let half = 0.5 * (a - d);
    let rad = (half * half + b.norm_sqr()).sqrt();
    let top = 0.5 * (a + d) + rad;
    let scale = 1.0 + a.abs().max(d.abs()) + b.norm();
    if rad <= 1e-12 * scale {
        // h ∝ I: every vector is optimal, keep the previous one
        return (top, prev.clone());
    }
    // eigenvector (b, λ − a) or (λ − d, b̄); use the better-conditioned form
    let v = if half >= 0.0 {
        CVector::from_vec(vec![C64::new(half + rad, 0.0), b.conj()])
    } else {
        CVector::from_vec(vec![b, C64::new(rad - half, 0.0)])
    };
    let n = v.norm();
    (top, v.unscale(n))
}

/// Run the seesaw ascent from `start`.
pub fn seesaw(a: &HermitianOp, start: &ProductState, cfg: &OptConfig) -> Result<SeesawRun> {
    seesaw_until(a, start, cfg, None)
}

/// Seesaw that additionally stops as soon as the objective exceeds `target`.
fn seesaw_until(a: &HermitianOp, start: &ProductState, cfg: &OptConfig, target: Option<f64>) -> Result<SeesawRun> {
    let (m, n) = a.dims();
    if start.dims() != (m, n) {
        return Err(Error::DimensionMismatch {
            expected: (m, n),
            found: start.dims(),
        });
    }
    let mat = a.matrix();
    let scale = 1.0 + a.hs_norm();
    let mut alpha = start.alpha().clone();
    let mut beta = start.beta().clone();
    let mut value = a.quadratic_form(&alpha.kronecker(&beta));
    let mut history = vec![value];
    let mut converged = false;
    let mut iterations = 0;
    let reached = |v: f64| target.is_some_and(|t| v > t);

    while iterations < cfg.max_iters && !reached(value) {
        iterations += 1;
        let (va, new_alpha) = top_eigvec(&contract_b(mat, &beta, m, n), &alpha)?;
        debug_assert!(va >= value - 1e-10 * scale, "seesaw decreased: {value} -> {va}");
        alpha = new_alpha;
        history.push(va);
        let (vb, new_beta) = top_eigvec(&contract_a(mat, &alpha, m, n), &beta)?;
        debug_assert!(vb >= va - 1e-10 * scale, "seesaw decreased: {va} -> {vb}");
        beta = new_beta;
        history.push(vb);
        let gain = vb - value;
        value = vb;
        if gain < cfg.tolerance {
            converged = true;
            break;
        }
    }

    let state = ProductState::new(alpha, beta)?;
    let value = a.quadratic_form(&state.vector());
    Ok(SeesawRun {
        state,
        value,
        iterations,
        converged: converged || reached(value),
        history,
    })
}

fn start_state(dims: (usize, usize), cfg: &OptConfig, index: usize) -> Result<ProductState> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    random_product_state_with(&mut rng, dims.0, dims.1)
}

/// Best local maximum of `⟨αβ|A|αβ⟩` over `cfg.starts` random starts.
///
/// The result never exceeds the true maximum `b*(A)`. Starts are independent
/// and may run in parallel; the reduction picks the largest value with ties
/// going to the lowest start index.
pub fn max_over_products(a: &HermitianOp, cfg: &OptConfig) -> Result<OptResult> {
    cfg.validate()?;
    let runs = map_indexed(cfg.starts, cfg.parallel, |s| {
        start_state(a.dims(), cfg, s).and_then(|st| seesaw(a, &st, cfg))
    });
    reduce(runs.into_iter().collect::<Result<Vec<_>>>()?)
}

/// Starts per batch in [`first_exceeding`]. Fixed so that the result does not
/// depend on the thread count.
pub const EXCEED_BATCH: usize = 8;

/// Search for a product state with `⟨αβ|A|αβ⟩ > target`.
///
/// Starts are run in batches of [`EXCEED_BATCH`] in index order and each
/// start stops once it passes `target`; the search ends after the first batch
/// in which some start did. If no start gets there the result is identical
/// to [`max_over_products`].
pub fn first_exceeding(a: &HermitianOp, cfg: &OptConfig, target: f64) -> Result<OptResult> {
    cfg.validate()?;
    let mut runs = Vec::with_capacity(cfg.starts);
    let mut lo = 0;
    while lo < cfg.starts {
        let hi = (lo + EXCEED_BATCH).min(cfg.starts);
        let batch = map_indexed(hi - lo, cfg.parallel, |s| {
            start_state(a.dims(), cfg, lo + s).and_then(|st| seesaw_until(a, &st, cfg, Some(target)))
        });
        for r in batch {
            runs.push(r?);
        }
        lo = hi;
        if runs.iter().any(|r| r.value > target) {
            break;
        }
    }
    reduce(runs)
}

fn reduce(runs: Vec<SeesawRun>) -> Result<OptResult> {
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = i;
        }
    }
    let starts_used = runs.len();
    let top = runs[best].value;
    let second = runs
        .iter()
        .map(|r| r.value)
        .filter(|&v| v < top - DISTINCT_OPTIMUM_GAP)
        .fold(f64::NEG_INFINITY, f64::max);
    let spread = if second.is_finite() { top - second } else { 0.0 };
    let best_run = runs.into_iter().nth(best).expect("at least one start");
    Ok(OptResult {
        value: best_run.value,
        argmax: best_run.state,
        starts_used,
        converged: best_run.converged,
        spread,
    })
}

/// `min ⟨αβ|A|αβ⟩` as `−max_over_products(−A)`; never below the true `a*(A)`.
pub fn min_over_products(a: &HermitianOp, cfg: &OptConfig) -> Result<OptResult> {
    let r = max_over_products(&-a, cfg)?;
    Ok(OptResult { value: -r.value, ..r })
}

#[derive(Clone, Debug)]
pub struct WeakOptResult {
    /// Coordinates of the maximizing product state over the index set of `c`.
    pub y: CoeffVector,
    /// `c·y`.
    pub max_value: f64,
    pub argmax: ProductState,
    pub converged: bool,
}

/// Maximize `c·x` over the projection of the separable set onto the span of
/// the basis elements indexed by `c`.
///
/// The maximum of a linear functional over a convex hull is attained at an
/// extreme point, so it suffices to optimize `tr(W |αβ⟩⟨αβ|)` with
/// `W = Σ c_i X_i` over product states.
pub fn weak_opt_oracle(c: &CoeffVector, basis: &ObservableBasis, cfg: &OptConfig) -> Result<WeakOptResult> {
    weak_opt(c, basis, cfg, None)
}

/// Like [`weak_opt_oracle`], but may stop at the first product state found
/// with `c·y > target` (see [`first_exceeding`]).
pub fn weak_opt_exceeding(
    c: &CoeffVector,
    basis: &ObservableBasis,
    cfg: &OptConfig,
    target: f64,
) -> Result<WeakOptResult> {
    weak_opt(c, basis, cfg, Some(target))
}

fn weak_opt(c: &CoeffVector, basis: &ObservableBasis, cfg: &OptConfig, target: Option<f64>) -> Result<WeakOptResult> {
    let w = basis.devectorize(c, 0.0)?;
    let r = match target {
        Some(t) => first_exceeding(&w, cfg, t)?,
        None => max_over_products(&w, cfg)?,
    };
    let coords = basis.product_coords(&r.argmax, c.indices())?;
    let y = c.with_values(coords)?;
    let max_value = c.dot(&y)?;
    Ok(WeakOptResult {
        y,
        max_value,
        argmax: r.argmax,
        converged: r.converged,
    })
}

#[derive(Clone, Debug)]
pub struct SubspaceCheck {
    pub contains: bool,
    /// Largest `⟨αβ|P|αβ⟩` found.
    pub best_overlap: f64,
    pub witness_state: ProductState,
}

/// Residual `max |(P² − P)_ij|`.
pub fn projector_residual(p: &HermitianOp) -> f64 {
    let m = p.matrix();
    (m * m - m).iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Whether the range of the orthogonal projector `P` contains a product state,
/// judged by `max ⟨αβ|P|αβ⟩ ≥ 1 − tol`.
pub fn subspace_contains_product(p: &HermitianOp, cfg: &OptConfig, tol: f64) -> Result<SubspaceCheck> {
    let resid = projector_residual(p);
    if resid > 1e-9 {
        return Err(Error::NotProjector(resid));
    }
    let r = max_over_products(p, cfg)?;
    Ok(SubspaceCheck {
        contains: r.value >= 1.0 - tol,
        best_overlap: r.value,
        witness_state: r.argmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{a_psi, bell_state, swap_operator, BellState};
    use crate::upb::tiles_complement_projector;

    fn cfg() -> OptConfig {
        OptConfig::default()
    }

    #[test]
    fn a_psi_sandwich_values() {
        let a = a_psi();
        let hi = max_over_products(&a, &cfg()).unwrap();
        let lo = min_over_products(&a, &cfg()).unwrap();
        assert!((hi.value - 0.5).abs() < 1e-9, "{}", hi.value);
        assert!((lo.value + 0.5).abs() < 1e-9, "{}", lo.value);
        assert!(hi.converged && lo.converged);
        assert_eq!(hi.starts_used, 50);
        let check = a.quadratic_form(&hi.argmax.vector());
        assert!((check - hi.value).abs() < 1e-9);
    }

    #[test]
    fn identity_and_swap() {
        let id = HermitianOp::identity(2, 2).unwrap();
        assert!((max_over_products(&id, &cfg()).unwrap().value - 1.0).abs() < 1e-12);
        assert!((min_over_products(&id, &cfg()).unwrap().value - 1.0).abs() < 1e-12);
        let swap = swap_operator();
        assert!(min_over_products(&swap, &cfg()).unwrap().value.abs() < 1e-9);
        assert!((max_over_products(&swap, &cfg()).unwrap().value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn history_is_monotone() {
        let a = a_psi();
        let start = ProductState::basis(2, 2, 0, 1).unwrap();
        let run = seesaw(&a, &start, &cfg()).unwrap();
        assert!(run.history.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let a = a_psi();
        let tight = OptConfig {
            max_iters: 1,
            tolerance: 1e-300,
            ..cfg()
        };
        let start = crate::states::random_product_state(2, 2, 1).unwrap();
        let run = seesaw(&a, &start, &tight).unwrap();
        assert_eq!(run.iterations, 1);
        assert!(!run.converged);
    }

    #[test]
    fn config_validation() {
        let a = a_psi();
        for bad in [
            OptConfig { starts: 0, ..cfg() },
            OptConfig { max_iters: 0, ..cfg() },
            OptConfig {
                tolerance: 0.0,
                ..cfg()
            },
        ] {
            assert!(matches!(max_over_products(&a, &bad), Err(Error::InvalidConfig(_))));
        }
        assert_eq!(cfg().escalated().starts, 500);
    }

    #[test]
    fn weak_opt_examples() {
        let b = ObservableBasis::build(2, 2).unwrap();
        let s11 = b.flat_index(1, 1).unwrap();
        let c = CoeffVector::unit(vec![s11], s11).unwrap();
        let r = weak_opt_oracle(&c, &b, &cfg()).unwrap();
        assert!((r.max_value - 0.5).abs() < 1e-9);

        let zero = CoeffVector::zeros(vec![s11]).unwrap();
        assert_eq!(weak_opt_oracle(&zero, &b, &cfg()).unwrap().max_value, 0.0);

        let va = b.vectorize(&a_psi()).unwrap();
        let r = weak_opt_oracle(&va, &b, &cfg()).unwrap();
        assert!((r.max_value - 0.5).abs() < 1e-9);
        assert_eq!(r.y.indices(), va.indices());
    }

    #[test]
    fn subspace_examples() {
        let p = bell_state(BellState::PsiMinus);
        let r = subspace_contains_product(p.op(), &cfg(), 1e-6).unwrap();
        assert!(!r.contains);
        assert!((r.best_overlap - 0.5).abs() < 1e-9);

        let id = HermitianOp::identity(2, 2).unwrap();
        let r = subspace_contains_product(&id, &cfg(), 1e-6).unwrap();
        assert!(r.contains && (r.best_overlap - 1.0).abs() < 1e-12);

        let comp = tiles_complement_projector();
        let r = subspace_contains_product(&comp, &cfg().escalated(), 1e-6).unwrap();
        assert!(!r.contains && r.best_overlap < 1.0 - 1e-6, "{}", r.best_overlap);

        let not_proj = a_psi();
        assert!(matches!(
            subspace_contains_product(&not_proj, &cfg(), 1e-6),
            Err(Error::NotProjector(_))
        ));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let a = crate::upb::tiles_complement_projector();
        let seq = max_over_products(
            &a,
            &OptConfig {
                parallel: false,
                ..cfg()
            },
        )
        .unwrap();
        let par = max_over_products(
            &a,
            &OptConfig {
                parallel: true,
                ..cfg()
            },
        )
        .unwrap();
        assert_eq!(seq.value, par.value);
        assert_eq!(seq.argmax, par.argmax);
        assert_eq!(seq.spread, par.spread);
    }

    #[test]
    fn closed_form_2x2_matches_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let h = crate::hermitian::tests::random_hermitian(&mut rng, 2);
            let prev = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
            let (top, v) = top_eigvec_2x2(&h, &prev);
            let (vals, _) = eigh(&h).unwrap();
            assert!((top - vals[1]).abs() < 1e-12);
            assert!((&h * &v - &v * C64::new(top, 0.0)).norm() < 1e-12);
        }
        let id = CMatrix::identity(2, 2);
        let prev = CVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        assert_eq!(top_eigvec_2x2(&id, &prev).1, prev);
    }

    #[test]
    fn first_exceeding_semantics() {
        let a = a_psi();
        // unreachable target: identical to the full search
        let full = max_over_products(&a, &cfg()).unwrap();
        let same = first_exceeding(&a, &cfg(), 0.75).unwrap();
        assert_eq!(full.value, same.value);
        assert_eq!(full.argmax, same.argmax);
        assert_eq!(same.starts_used, 50);
        // reachable target: stops after the first batch that passes it
        let r = first_exceeding(&a, &cfg(), 0.1).unwrap();
        assert!(r.value > 0.1 && r.value <= 0.5 + 1e-12);
        assert!(r.converged);
        assert_eq!(r.starts_used % EXCEED_BATCH, 0);
        let seq = first_exceeding(
            &a,
            &OptConfig {
                parallel: false,
                ..cfg()
            },
            0.1,
        )
        .unwrap();
        assert_eq!(seq.argmax, r.argmax);
    }
}
