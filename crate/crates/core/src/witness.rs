//! Witness classification, detection verdicts and witnesses built from
//! unextendible product bases.
//!
//! An operator `A` is a left witness when some entangled state has
//! `tr(Aρ) < a*(A) = min_{product} ⟨ψ|A|ψ⟩`, which happens exactly when
//! `λ_min(A) < a*(A)`; right witnesses mirror this with `b*(A)` and
//! `λ_max(A)`. Ambidextrous witnesses are both.

use serde::{Deserialize, Serialize};

use crate::basis::{CoeffVector, ObservableBasis};
use crate::error::{Error, Result};
use crate::hermitian::{max_schmidt_weight, CVector, HermitianOp, C64};
use crate::optimizer::{max_over_products, min_over_products, subspace_contains_product, OptConfig};
use crate::states::BellState;
use crate::upb::{complement_basis, verify_product_basis};

/// Strict margin between an extreme eigenvalue and the matching threshold.
pub const HANDEDNESS_MARGIN: f64 = 1e-9;
/// `⟨αβ|P|αβ⟩ ≥ 1 − SUBSPACE_TOL` counts as a product state in range(P).
pub const SUBSPACE_TOL: f64 = 1e-8;
/// Overlap tolerance for the unextendibility check.
pub const UPB_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Handedness {
    Left,
    Right,
    Ambidextrous,
    None,
}

impl Handedness {
    pub fn from_flags(left: bool, right: bool) -> Self {
        match (left, right) {
            (true, true) => Handedness::Ambidextrous,
            (true, false) => Handedness::Left,
            (false, true) => Handedness::Right,
            (false, false) => Handedness::None,
        }
    }

    pub fn is_left(self) -> bool {
        matches!(self, Handedness::Left | Handedness::Ambidextrous)
    }

    pub fn is_right(self) -> bool {
        matches!(self, Handedness::Right | Handedness::Ambidextrous)
    }

    /// Handedness of `−A` given that of `A`.
    pub fn mirror(self) -> Self {
        Self::from_flags(self.is_right(), self.is_left())
    }
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub op: HermitianOp,
    pub a_star: Option<f64>,
    pub b_star: Option<f64>,
    pub handedness: Handedness,
    /// Every optimizer run behind the thresholds converged.
    pub verified: bool,
    /// An eigenvalue/threshold gap is positive but inside the handedness margin.
    pub boundary: bool,
    pub verification_budget: OptConfig,
}

impl Witness {
    /// Thresholds `[a*, b*]` when both are known.
    pub fn sandwich(&self) -> Option<Sandwich> {
        Some(Sandwich {
            a_star: self.a_star?,
            b_star: self.b_star?,
        })
    }

    pub fn to_record(&self, basis: &ObservableBasis) -> Result<WitnessRecord> {
        let c = basis.vectorize(&self.op)?;
        Ok(WitnessRecord {
            dims: self.op.dims(),
            basis_coefficients: c.values().to_vec(),
            trace_part: basis.trace_component(&self.op)?,
            a_star: self.a_star,
            b_star: self.b_star,
            handedness: self.handedness,
            verification_budget: self.verification_budget.clone(),
        })
    }
}

/// The slab `a* ≤ tr(Aσ) ≤ b*` that contains every separable state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sandwich {
    pub a_star: f64,
    pub b_star: f64,
}

impl Sandwich {
    pub fn contains(&self, value: f64) -> bool {
        self.a_star <= value && value <= self.b_star
    }
}

/// Serialized witness. `basis_coefficients` holds `tr(X_i W)` for every
/// `i = 1..M²N²` in basis order; `trace_part` is `tr(X_0 W)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub dims: (usize, usize),
    pub basis_coefficients: Vec<f64>,
    pub trace_part: f64,
    pub a_star: Option<f64>,
    pub b_star: Option<f64>,
    pub handedness: Handedness,
    pub verification_budget: OptConfig,
}

impl WitnessRecord {
    pub fn to_operator(&self, basis: &ObservableBasis) -> Result<HermitianOp> {
        if basis.dims() != self.dims {
            return Err(Error::DimensionMismatch {
                expected: basis.dims(),
                found: self.dims,
            });
        }
        let c = CoeffVector::new(basis.full_indices(), self.basis_coefficients.clone())?;
        basis.devectorize(&c, self.trace_part)
    }
}

fn check_nonzero(a: &HermitianOp) -> Result<f64> {
    let norm = a.hs_norm();
    if norm < 1e-14 {
        return Err(Error::ZeroOperator);
    }
    Ok(norm)
}

/// Gap strictly positive beyond round-off yet not beyond the margin.
fn inside_margin(gap: f64, scale: f64) -> bool {
    gap > 1e-12 * scale && gap <= HANDEDNESS_MARGIN
}

/// Classify `A` by comparing its extreme eigenvalues with `a*(A)` and `b*(A)`.
pub fn classify(a: &HermitianOp, cfg: &OptConfig) -> Result<Witness> {
    let norm = check_nonzero(a)?;
    let spec = a.spectral()?;
    let lo = min_over_products(a, cfg)?;
    let hi = max_over_products(a, cfg)?;
    let left_gap = lo.value - spec.min();
    let right_gap = spec.max() - hi.value;
    Ok(Witness {
        op: a.clone(),
        a_star: Some(lo.value),
        b_star: Some(hi.value),
        handedness: Handedness::from_flags(left_gap > HANDEDNESS_MARGIN, right_gap > HANDEDNESS_MARGIN),
        verified: lo.converged && hi.converged,
        boundary: inside_margin(left_gap, 1.0 + norm) || inside_margin(right_gap, 1.0 + norm),
        verification_budget: cfg.clone(),
    })
}

/// Classify `A` from its spectral decomposition: `A` is a left witness iff
/// some bottom block `span{|λ_0⟩..|λ_k⟩}` ending at a strict eigenvalue gap
/// contains no product state, and a right witness iff the mirrored top block
/// condition holds.
pub fn classify_spectral(a: &HermitianOp, cfg: &OptConfig) -> Result<Witness> {
    check_nonzero(a)?;
    let (m, n) = a.dims();
    let d = a.dim();
    let spec = a.spectral()?;
    let vals = &spec.values;
    let mut verified = true;

    // Spans grow with k, so once one contains a product state every larger one does too.
    let mut left = false;
    for k in 0..d - 1 {
        if vals[k + 1] <= vals[k] + HANDEDNESS_MARGIN {
            continue;
        }
        let block: Vec<CVector> = (0..=k).map(|i| spec.vector(i)).collect();
        let p = HermitianOp::projector_onto(m, n, &block)?;
        let check = subspace_contains_product(&p, cfg, SUBSPACE_TOL)?;
        left = !check.contains;
        break;
    }
    let mut right = false;
    for l in (1..d).rev() {
        if vals[l] <= vals[l - 1] + HANDEDNESS_MARGIN {
            continue;
        }
        let block: Vec<CVector> = (l..d).map(|i| spec.vector(i)).collect();
        let p = HermitianOp::projector_onto(m, n, &block)?;
        let check = subspace_contains_product(&p, cfg, SUBSPACE_TOL)?;
        right = !check.contains;
        break;
    }

    let lo = min_over_products(a, cfg)?;
    let hi = max_over_products(a, cfg)?;
    verified &= lo.converged && hi.converged;
    Ok(Witness {
        op: a.clone(),
        a_star: Some(lo.value),
        b_star: Some(hi.value),
        handedness: Handedness::from_flags(left, right),
        verified,
        boundary: false,
        verification_budget: cfg.clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Detection {
    EntangledLeft,
    EntangledRight,
    Inconclusive,
}

impl Detection {
    pub fn is_entangled(self) -> bool {
        !matches!(self, Detection::Inconclusive)
    }
}

/// Verdict from a measured `⟨A⟩_ρ`: entangled when the value leaves the
/// sandwich `[a*, b*]` by more than `margin` (typically the error bar).
pub fn detect(value: f64, w: &Witness, margin: f64) -> Detection {
    if w.a_star.is_some_and(|a| value < a - margin) {
        Detection::EntangledLeft
    } else if w.b_star.is_some_and(|b| value > b + margin) {
        Detection::EntangledRight
    } else {
        Detection::Inconclusive
    }
}

/// Result of the four two-observable inequalities on `⟨σ1⊗σ1⟩` and
/// `⟨σ2⊗σ2⟩`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BellCheck {
    pub entangled: bool,
    /// Bell state associated with each violated inequality.
    pub satisfied: Vec<BellState>,
    /// Set when exactly one inequality holds.
    pub implicated: Option<BellState>,
}

/// Values this close to `±1/2` count as on the boundary, not beyond it.
pub const BELL_ROUNDOFF: f64 = 1e-12;

/// `e11 ± e22 > 1/2` or `e11 ± e22 < −1/2` certifies entanglement, since
/// `A_φ = σ1σ1 + σ2σ2` and `A_ψ = σ1σ1 − σ2σ2` both have sandwich `[−1/2, 1/2]`.
pub fn bell_inequality_check(e11: f64, e22: f64) -> BellCheck {
    let sum = e11 + e22;
    let diff = e11 - e22;
    let bound = 0.5 + BELL_ROUNDOFF;
    let mut satisfied = Vec::new();
    if diff > bound {
        satisfied.push(BellState::PsiPlus);
    }
    if diff < -bound {
        satisfied.push(BellState::PsiMinus);
    }
    if sum > bound {
        satisfied.push(BellState::PhiPlus);
    }
    if sum < -bound {
        satisfied.push(BellState::PhiMinus);
    }
    BellCheck {
        entangled: !satisfied.is_empty(),
        implicated: (satisfied.len() == 1).then(|| satisfied[0]),
        satisfied,
    }
}

/// How to build a witness from an unextendible product basis `B` with
/// orthonormal complement `B′`.
#[derive(Clone, Debug)]
pub enum UpbConstruction {
    /// `A′ = −Σ_{B′} |λ⟩⟨λ|`.
    Complement,
    /// `A″ = −Σ_{B′_L} |λ⟩⟨λ| + Σ_{B′_R} |λ⟩⟨λ|`, with `left`/`right`
    /// partitioning the indices of the complement basis.
    Split { left: Vec<usize>, right: Vec<usize> },
    /// `A‴ = A′ + Σ_{B″} |λ⟩⟨λ|` for caller-supplied orthonormal entangled
    /// vectors inside `span B` whose span contains no product state.
    Promote { entangled: Vec<CVector> },
}

#[derive(Clone, Debug)]
pub struct UpbWitness {
    pub witness: Witness,
    /// The orthonormal complement `B′` in the order used by [`UpbConstruction::Split`].
    pub complement: Vec<CVector>,
    /// Best product overlap found with `(span B)^⊥`.
    pub unextendibility_overlap: f64,
}

pub fn witness_from_upb(
    upb: &[CVector],
    dim_a: usize,
    dim_b: usize,
    construction: &UpbConstruction,
    cfg: &OptConfig,
) -> Result<UpbWitness> {
    verify_product_basis(upb, dim_a, dim_b)?;
    let d = dim_a * dim_b;
    let complement = complement_basis(upb, d);
    if complement.is_empty() {
        return Err(Error::InvalidProductBasis(
            "empty complement: the set is a full basis".into(),
        ));
    }
    let p_comp = HermitianOp::projector_onto(dim_a, dim_b, &complement)?;
    let ext = subspace_contains_product(&p_comp, &cfg.escalated(), UPB_TOL)?;
    if ext.contains {
        return Err(Error::ExtendibleBasis(ext.best_overlap));
    }

    let op = match construction {
        UpbConstruction::Complement => -&p_comp,
        UpbConstruction::Split { left, right } => {
            let mut seen = vec![false; complement.len()];
            for &i in left.iter().chain(right) {
                if i >= complement.len() || seen[i] {
                    return Err(Error::InvalidProductBasis(format!(
                        "split index {i} is out of range or repeated"
                    )));
                }
                seen[i] = true;
            }
            if left.is_empty() || right.is_empty() || seen.iter().any(|s| !s) {
                return Err(Error::InvalidProductBasis(
                    "split must partition the complement into two nonempty parts".into(),
                ));
            }
            let pick = |idx: &[usize]| idx.iter().map(|&i| complement[i].clone()).collect::<Vec<_>>();
            let pl = HermitianOp::projector_onto(dim_a, dim_b, &pick(left))?;
            let pr = HermitianOp::projector_onto(dim_a, dim_b, &pick(right))?;
            &pr - &pl
        }
        UpbConstruction::Promote { entangled } => {
            check_promoted(upb, entangled, dim_a, dim_b, cfg)?;
            let pe = HermitianOp::projector_onto(dim_a, dim_b, entangled)?;
            &pe - &p_comp
        }
    };

    Ok(UpbWitness {
        witness: classify(&op, cfg)?,
        complement,
        unextendibility_overlap: ext.best_overlap,
    })
}

fn check_promoted(upb: &[CVector], entangled: &[CVector], dim_a: usize, dim_b: usize, cfg: &OptConfig) -> Result<()> {
    if entangled.is_empty() {
        return Err(Error::InvalidProductBasis("no states to promote".into()));
    }
    let bad = |msg: String| Err(Error::InvalidProductBasis(msg));
    for (i, v) in entangled.iter().enumerate() {
        if v.len() != dim_a * dim_b {
            return bad(format!("promoted vector {i} has the wrong length"));
        }
        for (j, w) in entangled.iter().enumerate().skip(i) {
            let expect = if i == j { 1.0 } else { 0.0 };
            if (v.dotc(w) - C64::new(expect, 0.0)).norm() > 1e-9 {
                return bad(format!("promoted vectors {i} and {j} are not orthonormal"));
            }
        }
        let in_span: CVector = upb.iter().fold(CVector::zeros(v.len()), |acc, b| acc + b * b.dotc(v));
        if (in_span - v).norm() > 1e-9 {
            return bad(format!("promoted vector {i} is not in the span of the product basis"));
        }
        if max_schmidt_weight(v, dim_a, dim_b)? > 1.0 - 1e-9 {
            return bad(format!("promoted vector {i} is a product state"));
        }
    }
    let p = HermitianOp::projector_onto(dim_a, dim_b, entangled)?;
    let check = subspace_contains_product(&p, &cfg.escalated(), UPB_TOL)?;
    if check.contains {
        return bad(format!(
            "span of promoted vectors contains a product state (overlap {:.9})",
            check.best_overlap
        ));
    }
    Ok(())
}
