//! Density matrices, product states, the Bell family and the PPT test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::{check_dims, CMatrix, CVector, HermitianOp, C64};

/// PSD and trace tolerance for [`DensityMatrix`].
pub const DENSITY_TOL: f64 = 1e-10;
/// Minimum partial-transpose eigenvalue still reported as PPT.
pub const PPT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOp,
}

impl DensityMatrix {
    pub fn new(op: HermitianOp) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > DENSITY_TOL {
            return Err(Error::NotDensity(format!("trace {tr}")));
        }
        let min = op.spectral()?.min();
        if min < -DENSITY_TOL {
            return Err(Error::NotDensity(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { op })
    }

    /// `I/(MN)`.
    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Result<Self> {
        let d = (dim_a * dim_b) as f64;
        Ok(Self {
            op: HermitianOp::identity(dim_a, dim_b)?.scaled(1.0 / d),
        })
    }

    pub fn op(&self) -> &HermitianOp {
        &self.op
    }

    pub fn dims(&self) -> (usize, usize) {
        self.op.dims()
    }

    /// Convex combination `w·self + (1−w)·other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidProbability(w));
        }
        self.op.check_same_dims(other.op())?;
        Ok(Self {
            op: &self.op.scaled(w) + &other.op.scaled(1.0 - w),
        })
    }
}

/// A pure product state `|α⟩⊗|β⟩` with unit factors. The first non-negligible
/// component of each factor is made real and non-negative.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    alpha: CVector,
    beta: CVector,
}

impl ProductState {
    pub fn new(alpha: CVector, beta: CVector) -> Result<Self> {
        check_dims(alpha.len(), beta.len())?;
        Ok(Self {
            alpha: gauge_fixed(alpha)?,
            beta: gauge_fixed(beta)?,
        })
    }

    /// Computational basis state `|i⟩⊗|j⟩`.
    pub fn basis(dim_a: usize, dim_b: usize, i: usize, j: usize) -> Result<Self> {
        let mut a = CVector::zeros(dim_a);
        let mut b = CVector::zeros(dim_b);
        if i >= dim_a || j >= dim_b {
            return Err(Error::IndexOutOfRange {
                index: i.max(j),
                len: dim_a.min(dim_b),
            });
        }
        a[i] = C64::new(1.0, 0.0);
        b[j] = C64::new(1.0, 0.0);
        Self::new(a, b)
    }

    pub fn alpha(&self) -> &CVector {
        &self.alpha
    }

    pub fn beta(&self) -> &CVector {
        &self.beta
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.alpha.len(), self.beta.len())
    }

    /// `|α⟩⊗|β⟩` as a vector on `C^{MN}`.
    pub fn vector(&self) -> CVector {
        self.alpha.kronecker(&self.beta)
    }
}

pub(crate) fn gauge_fixed(v: CVector) -> Result<CVector> {
    let norm = v.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    let mut v = v.unscale(norm);
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-12).copied() {
        let phase = z.conj() / z.norm();
        v.apply(|x| *x *= phase);
    }
    Ok(v)
}

/// Bell states labeled `ψ± = (|00⟩ ± |11⟩)/√2` and `φ± = (|01⟩ ± |10⟩)/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BellState {
    #[serde(rename = "psi+")]
    PsiPlus,
    #[serde(rename = "psi-")]
    PsiMinus,
    #[serde(rename = "phi+")]
    PhiPlus,
    #[serde(rename = "phi-")]
    PhiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PsiPlus,
        BellState::PsiMinus,
        BellState::PhiPlus,
        BellState::PhiMinus,
    ];

    pub fn vector(self) -> CVector {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let z = C64::new(0.0, 0.0);
        let v = match self {
            BellState::PsiPlus => [h, z, z, h],
            BellState::PsiMinus => [h, z, z, -h],
            BellState::PhiPlus => [z, h, h, z],
            BellState::PhiMinus => [z, h, -h, z],
        };
        CVector::from_row_slice(&v)
    }

    pub fn name(self) -> &'static str {
        match self {
            BellState::PsiPlus => "ψ+",
            BellState::PsiMinus => "ψ-",
            BellState::PhiPlus => "φ+",
            BellState::PhiMinus => "φ-",
        }
    }
}

pub fn bell_state(which: BellState) -> DensityMatrix {
    DensityMatrix {
        op: HermitianOp::outer(2, 2, &which.vector()).expect("2x2 Bell projector"),
    }
}

/// Single-qubit Pauli operator with the `1/√2` normalization, so that
/// `tr(σ_i σ_j) = δ_ij`.
pub fn pauli(i: usize) -> Result<CMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = |x: f64| C64::new(x * h, 0.0);
    let im = |x: f64| C64::new(0.0, x * h);
    let m = match i {
        0 => [r(1.0), r(0.0), r(0.0), r(1.0)],
        1 => [r(0.0), r(1.0), r(1.0), r(0.0)],
        // -i(|0⟩⟨1| - |1⟩⟨0|)
        2 => [r(0.0), im(-1.0), im(1.0), r(0.0)],
        3 => [r(1.0), r(0.0), r(0.0), r(-1.0)],
        _ => return Err(Error::PauliIndex(i)),
    };
    Ok(CMatrix::from_row_slice(2, 2, &m))
}

/// `σ_i ⊗ σ_j` on two qubits.
pub fn pauli_product(i: usize, j: usize) -> Result<HermitianOp> {
    HermitianOp::kron(&pauli(i)?, &pauli(j)?)
}

/// `A_ψ = σ1⊗σ1 − σ2⊗σ2 = |ψ+⟩⟨ψ+| − |ψ-⟩⟨ψ-|`.
pub fn a_psi() -> HermitianOp {
    &pauli_product(1, 1).unwrap() - &pauli_product(2, 2).unwrap()
}

/// `A_φ = σ1⊗σ1 + σ2⊗σ2 = |φ+⟩⟨φ+| − |φ-⟩⟨φ-|`.
pub fn a_phi() -> HermitianOp {
    &pauli_product(1, 1).unwrap() + &pauli_product(2, 2).unwrap()
}

/// Two-qubit swap operator.
pub fn swap_operator() -> HermitianOp {
    let mut m = CMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            m[(i * 2 + j, j * 2 + i)] = C64::new(1.0, 0.0);
        }
    }
    HermitianOp::new(2, 2, m).unwrap()
}

/// `tr(Aρ)`.
pub fn expectation(a: &HermitianOp, rho: &DensityMatrix) -> Result<f64> {
    a.hs_inner(rho.op())
}

/// `|αβ⟩⟨αβ|`.
pub fn product_state_density(s: &ProductState) -> DensityMatrix {
    let (m, n) = s.dims();
    DensityMatrix {
        op: HermitianOp::outer(m, n, &s.vector()).expect("product projector"),
    }
}

/// Haar-random unit vector in `C^d`.
pub fn random_unit_vector(rng: &mut impl Rng, d: usize) -> CVector {
    loop {
        let v = CVector::from_fn(d, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let n = v.norm();
        if n > 1e-8 {
            return v.unscale(n);
        }
    }
}

pub fn random_product_state_with(rng: &mut impl Rng, dim_a: usize, dim_b: usize) -> Result<ProductState> {
    check_dims(dim_a, dim_b)?;
    ProductState::new(random_unit_vector(rng, dim_a), random_unit_vector(rng, dim_b))
}

/// Haar-random product state, deterministic in `seed`.
pub fn random_product_state(dim_a: usize, dim_b: usize, seed: u64) -> Result<ProductState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_product_state_with(&mut rng, dim_a, dim_b)
}

/// Random Hermitian operator `(G + G†)/2` with complex Gaussian `G`.
pub fn random_hermitian(rng: &mut impl Rng, dim_a: usize, dim_b: usize) -> Result<HermitianOp> {
    check_dims(dim_a, dim_b)?;
    let d = dim_a * dim_b;
    let g = CMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    HermitianOp::new(dim_a, dim_b, (&g + g.adjoint()) * C64::new(0.5, 0.0))
}

/// Random density matrix `G G†/tr(G G†)` with a `d × rank` complex Gaussian `G`.
pub fn random_density(rng: &mut impl Rng, dim_a: usize, dim_b: usize, rank: usize) -> Result<DensityMatrix> {
    check_dims(dim_a, dim_b)?;
    let d = dim_a * dim_b;
    let rank = rank.clamp(1, d);
    let g = CMatrix::from_fn(d, rank, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let w = &g * g.adjoint();
    let tr: f64 = w.diagonal().iter().map(|z| z.re).sum();
    DensityMatrix::new(HermitianOp::new(dim_a, dim_b, w.map(|z| z / tr))?)
}

/// Random separable state: a mixture of `terms` random product states with
/// uniform-simplex weights.
pub fn random_separable(rng: &mut impl Rng, dim_a: usize, dim_b: usize, terms: usize) -> Result<DensityMatrix> {
    check_dims(dim_a, dim_b)?;
    let terms = terms.max(1);
    let raw: Vec<f64> = (0..terms).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = raw.iter().sum();
    let d = dim_a * dim_b;
    let mut m = CMatrix::zeros(d, d);
    for w in raw {
        let v = random_product_state_with(rng, dim_a, dim_b)?.vector();
        m += (&v * v.adjoint()) * C64::new(w / total, 0.0);
    }
    DensityMatrix::new(HermitianOp::new(dim_a, dim_b, m)?)
}

/// Werner-type state `p|B⟩⟨B| + (1−p) I/4`.
pub fn werner(p: f64, which: BellState) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    bell_state(which).mix(&DensityMatrix::maximally_mixed(2, 2)?, p)
}

/// Partial transpose over the second factor:
/// `ρ^{T_B}[(i,j),(k,l)] = ρ[(i,l),(k,j)]`.
pub fn partial_transpose(a: &HermitianOp) -> HermitianOp {
    let (m, n) = a.dims();
    let src = a.matrix();
    let out = CMatrix::from_fn(m * n, m * n, |r, c| {
        let (i, j) = (r / n, r % n);
        let (k, l) = (c / n, c % n);
        src[(i * n + l, k * n + j)]
    });
    HermitianOp::new(m, n, out).expect("partial transpose of a Hermitian operator is Hermitian")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PptResult {
    pub is_ppt: bool,
    pub min_eigenvalue: f64,
    /// The minimum eigenvalue lies within the PPT tolerance of zero.
    pub boundary: bool,
    /// `MN ≤ 6`, where PPT is equivalent to separability.
    pub exact: bool,
}

pub fn ppt_check(rho: &DensityMatrix) -> Result<PptResult> {
    let (m, n) = rho.dims();
    let min = partial_transpose(rho.op()).spectral()?.min();
    Ok(PptResult {
        is_ppt: min >= -PPT_TOL,
        min_eigenvalue: min,
        boundary: min.abs() <= PPT_TOL,
        exact: m * n <= 6,
    })
}
