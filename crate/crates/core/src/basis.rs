//! Orthonormal Hermitian product bases and the operator ↔ coefficient map.
//!
//! Each factor basis is the generalized Gell-Mann set of `C^d`, normalized to
//! unit Hilbert-Schmidt norm, in the order
//!
//! ```text
//! 0:                 I/√d
//! for k = 1..d-1:    sym(0,k), anti(0,k), sym(1,k), anti(1,k), …, sym(k-1,k), anti(k-1,k), diag(k)
//! ```
//!
//! which reproduces σ1, σ2, σ3 for qubits and the usual λ1…λ8 numbering for
//! qutrits. Product element `X_i` with `i = i_a·N² + i_b` is `G_{i_a} ⊗ G_{i_b}`,
//! so `X_0 = I/√(MN)` and indices are lexicographic in `(i_a, i_b)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{check_dims, CMatrix, CVector, HermitianOp, C64};
use crate::states::ProductState;

/// Normalized generalized Gell-Mann matrices of `C^d`, identity first.
pub fn gell_mann_generators(d: usize) -> Result<Vec<CMatrix>> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    out.push(CMatrix::identity(d, d).map(|z| z / (d as f64).sqrt()));
    for k in 1..d {
        for j in 0..k {
            let mut sym = CMatrix::zeros(d, d);
            sym[(j, k)] = one * h;
            sym[(k, j)] = one * h;
            out.push(sym);
            let mut anti = CMatrix::zeros(d, d);
            anti[(j, k)] = -i * h;
            anti[(k, j)] = i * h;
            out.push(anti);
        }
        let norm = 1.0 / ((k * (k + 1)) as f64).sqrt();
        let mut diag = CMatrix::zeros(d, d);
        for l in 0..k {
            diag[(l, l)] = one * norm;
        }
        diag[(k, k)] = one * (-(k as f64) * norm);
        out.push(diag);
    }
    Ok(out)
}

/// The orthonormal basis `{X_i}` of Hermitian operators on `C^M ⊗ C^N`.
#[derive(Clone, Debug)]
pub struct ObservableBasis {
    dim_a: usize,
    dim_b: usize,
    factor_a: Vec<CMatrix>,
    factor_b: Vec<CMatrix>,
    elements: Vec<HermitianOp>,
}

impl ObservableBasis {
    pub fn build(dim_a: usize, dim_b: usize) -> Result<Self> {
        check_dims(dim_a, dim_b)?;
        let factor_a = gell_mann_generators(dim_a)?;
        let factor_b = gell_mann_generators(dim_b)?;
        let mut elements = Vec::with_capacity(factor_a.len() * factor_b.len());
        for ga in &factor_a {
            for gb in &factor_b {
                elements.push(HermitianOp::kron(ga, gb)?);
            }
        }
        Ok(Self {
            dim_a,
            dim_b,
            factor_a,
            factor_b,
            elements,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    /// Number of elements, `M²N²`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> Result<&HermitianOp> {
        self.elements.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.len(),
        })
    }

    pub fn elements(&self) -> &[HermitianOp] {
        &self.elements
    }

    pub fn factor_generators(&self) -> (&[CMatrix], &[CMatrix]) {
        (&self.factor_a, &self.factor_b)
    }

    /// All nontrivial indices `1..M²N²`.
    pub fn full_indices(&self) -> Vec<usize> {
        (1..self.len()).collect()
    }

    pub fn factor_indices(&self, i: usize) -> (usize, usize) {
        let nb = self.factor_b.len();
        (i / nb, i % nb)
    }

    pub fn flat_index(&self, ia: usize, ib: usize) -> Result<usize> {
        let (na, nb) = (self.factor_a.len(), self.factor_b.len());
        if ia >= na || ib >= nb {
            return Err(Error::IndexOutOfRange {
                index: ia.max(ib),
                len: na.max(nb),
            });
        }
        Ok(ia * nb + ib)
    }

    /// Human-readable name of `X_i`, e.g. `σ1⊗σ1` or `λ3⊗λ8`.
    pub fn label(&self, i: usize) -> String {
        let (ia, ib) = self.factor_indices(i);
        let sym = |d: usize| if d == 2 { 'σ' } else { 'λ' };
        format!("{}{}⊗{}{}", sym(self.dim_a), ia, sym(self.dim_b), ib)
    }

    fn check_op(&self, a: &HermitianOp) -> Result<()> {
        if a.dims() != self.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                found: a.dims(),
            });
        }
        Ok(())
    }

    /// `tr(X_0 A)`.
    pub fn trace_component(&self, a: &HermitianOp) -> Result<f64> {
        self.check_op(a)?;
        Ok(a.trace() / ((self.dim_a * self.dim_b) as f64).sqrt())
    }

    /// `v(A)` over the full index set `1..M²N²`.
    pub fn vectorize(&self, a: &HermitianOp) -> Result<CoeffVector> {
        self.vectorize_on(a, &self.full_indices())
    }

    /// `v(A)` restricted to the given indices.
    pub fn vectorize_on(&self, a: &HermitianOp, indices: &[usize]) -> Result<CoeffVector> {
        self.check_op(a)?;
        let values = indices
            .iter()
            .map(|&i| self.element(i)?.hs_inner(a))
            .collect::<Result<Vec<_>>>()?;
        CoeffVector::new(indices.to_vec(), values)
    }

    /// `trace_part·X_0 + Σ_{i∈T} c_i X_i`.
    pub fn devectorize(&self, c: &CoeffVector, trace_part: f64) -> Result<HermitianOp> {
        let d = self.dim_a * self.dim_b;
        let mut m = CMatrix::zeros(d, d);
        m += self.elements[0].matrix() * C64::new(trace_part, 0.0);
        for (&i, &v) in c.indices().iter().zip(c.values()) {
            let x = self.element(i)?;
            if v != 0.0 {
                m += x.matrix() * C64::new(v, 0.0);
            }
        }
        HermitianOp::new(self.dim_a, self.dim_b, m)
    }

    /// Coordinates `tr(X_i |αβ⟩⟨αβ|) = ⟨α|G_a|α⟩⟨β|G_b|β⟩` of a product state,
    /// computed factor-wise.
    pub fn product_coords(&self, s: &ProductState, indices: &[usize]) -> Result<Vec<f64>> {
        if s.dims() != self.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                found: s.dims(),
            });
        }
        let ea: Vec<f64> = self.factor_a.iter().map(|g| local_expect(g, s.alpha())).collect();
        let eb: Vec<f64> = self.factor_b.iter().map(|g| local_expect(g, s.beta())).collect();
        indices
            .iter()
            .map(|&i| {
                if i >= self.len() {
                    return Err(Error::IndexOutOfRange {
                        index: i,
                        len: self.len(),
                    });
                }
                let (ia, ib) = self.factor_indices(i);
                Ok(ea[ia] * eb[ib])
            })
            .collect()
    }

    /// Render `Σ c_i X_i` as a labeled linear combination.
    pub fn render(&self, c: &CoeffVector) -> String {
        let mut out = String::new();
        for (&i, &v) in c.indices().iter().zip(c.values()) {
            if v.abs() < 1e-12 {
                continue;
            }
            if out.is_empty() {
                out.push_str(&format!("{v:.6} {}", self.label(i)));
            } else if v < 0.0 {
                out.push_str(&format!(" - {:.6} {}", -v, self.label(i)));
            } else {
                out.push_str(&format!(" + {v:.6} {}", self.label(i)));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

fn local_expect(g: &CMatrix, v: &CVector) -> f64 {
    v.dotc(&(g * v)).re
}

/// `tr(AB)` for two operators of equal dimensions.
pub fn hs_inner(a: &HermitianOp, b: &HermitianOp) -> Result<f64> {
    a.hs_inner(b)
}

/// Real coefficients over an index subset `T` of the basis, never including
/// the trace component 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCoeffVector")]
pub struct CoeffVector {
    indices: Vec<usize>,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawCoeffVector {
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl TryFrom<RawCoeffVector> for CoeffVector {
    type Error = Error;
    fn try_from(raw: RawCoeffVector) -> Result<Self> {
        CoeffVector::new(raw.indices, raw.values)
    }
}

impl CoeffVector {
    pub fn new(indices: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if indices.len() != values.len() {
            return Err(Error::InvalidIndices);
        }
        if indices.first().is_some_and(|&i| i == 0) || indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidIndices);
        }
        Ok(Self { indices, values })
    }

    pub fn zeros(indices: Vec<usize>) -> Result<Self> {
        let n = indices.len();
        Self::new(indices, vec![0.0; n])
    }

    /// Unit vector at basis index `at`, which must be a member of `indices`.
    pub fn unit(indices: Vec<usize>, at: usize) -> Result<Self> {
        let pos = indices.iter().position(|&i| i == at).ok_or(Error::InvalidIndices)?;
        let mut c = Self::zeros(indices)?;
        c.values[pos] = 1.0;
        Ok(c)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<f64> {
        self.indices.binary_search(&index).ok().map(|p| self.values[p])
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.indices.clone(), values)
    }

    /// Restriction to a subset of the current indices.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        let values = indices
            .iter()
            .map(|&i| self.get(i).ok_or(Error::IndexSetMismatch))
            .collect::<Result<Vec<_>>>()?;
        Self::new(indices.to_vec(), values)
    }

    /// Zero-extension to a superset of the current indices.
    pub fn extend_to(&self, indices: &[usize]) -> Result<Self> {
        if self.indices.iter().any(|i| !indices.contains(i)) {
            return Err(Error::IndexSetMismatch);
        }
        let values = indices.iter().map(|&i| self.get(i).unwrap_or(0.0)).collect();
        Self::new(indices.to_vec(), values)
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        if self.indices != other.indices {
            return Err(Error::IndexSetMismatch);
        }
        Ok(dot(&self.values, &other.values))
    }

    pub fn norm(&self) -> f64 {
        dot(&self.values, &self.values).sqrt()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell_state, pauli, BellState};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_op(rng: &mut impl Rng, m: usize, n: usize) -> HermitianOp {
        let d = m * n;
        let g = CMatrix::from_fn(d, d, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        HermitianOp::new(m, n, (&g + g.adjoint()).map(|z| z * 0.5)).unwrap()
    }

    #[test]
    fn gram_matrix_is_identity() {
        for (m, n) in [(2, 2), (2, 3), (3, 3)] {
            let b = ObservableBasis::build(m, n).unwrap();
            assert_eq!(b.len(), m * m * n * n);
            for i in 0..b.len() {
                for j in 0..b.len() {
                    let g = b.elements()[i].hs_inner(&b.elements()[j]).unwrap();
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((g - e).abs() < 1e-10, "({m},{n}) G[{i}][{j}] = {g}");
                }
                if i > 0 {
                    assert!(b.elements()[i].trace().abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn qubit_basis_is_normalized_pauli_products() {
        let b = ObservableBasis::build(2, 2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = HermitianOp::kron(&pauli(i).unwrap(), &pauli(j).unwrap()).unwrap();
                let got = b.element(b.flat_index(i, j).unwrap()).unwrap();
                assert!((got.matrix() - expect.matrix()).norm() < 1e-14, "σ{i}⊗σ{j}");
            }
        }
        let x0 = b.element(0).unwrap();
        assert!((x0.matrix() - CMatrix::identity(4, 4).map(|z| z * 0.5)).norm() < 1e-15);
        assert!((x0.hs_inner(x0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(b.label(5), "σ1⊗σ1");
    }

    #[test]
    fn qutrit_generators_match_standard_gell_mann_order() {
        let g = gell_mann_generators(3).unwrap();
        assert_eq!(g.len(), 9);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // λ3 = diag(1,-1,0)/√2 and λ8 = diag(1,1,-2)/√6
        assert!((g[3][(0, 0)].re - h).abs() < 1e-15 && (g[3][(1, 1)].re + h).abs() < 1e-15);
        assert!((g[8][(2, 2)].re + 2.0 / 6f64.sqrt()).abs() < 1e-15);
        // λ4 couples 0 and 2
        assert!((g[4][(0, 2)].re - h).abs() < 1e-15);
        assert!(gell_mann_generators(1).is_err());
    }

    #[test]
    fn vectorize_examples() {
        let b = ObservableBasis::build(2, 2).unwrap();
        let mixed = HermitianOp::identity(2, 2).unwrap().scaled(0.25);
        assert!(b.vectorize(&mixed).unwrap().values().iter().all(|v| v.abs() < 1e-15));

        let s11 = b.flat_index(1, 1).unwrap();
        let v = b.vectorize(b.element(s11).unwrap()).unwrap();
        for (&i, &x) in v.indices().iter().zip(v.values()) {
            let e = if i == s11 { 1.0 } else { 0.0 };
            assert!((x - e).abs() < 1e-14);
        }

        let psi = bell_state(BellState::PsiPlus);
        let v = b.vectorize(psi.op()).unwrap();
        let s22 = b.flat_index(2, 2).unwrap();
        let s33 = b.flat_index(3, 3).unwrap();
        for (&i, &x) in v.indices().iter().zip(v.values()) {
            let e = match i {
                i if i == s11 || i == s33 => 0.5,
                i if i == s22 => -0.5,
                _ => 0.0,
            };
            assert!((x - e).abs() < 1e-14, "index {i}: {x}");
        }
    }

    #[test]
    fn devectorize_examples() {
        let b = ObservableBasis::build(2, 2).unwrap();
        // trace part 1/√(MN) · X_0 = I/MN
        let c = CoeffVector::zeros(b.full_indices()).unwrap();
        let mixed = b.devectorize(&c, 0.5).unwrap();
        assert!((mixed.matrix() - CMatrix::identity(4, 4).map(|z| z * 0.25)).norm() < 1e-15);

        let s11 = b.flat_index(1, 1).unwrap();
        let unit = CoeffVector::unit(b.full_indices(), s11).unwrap();
        let op = b.devectorize(&unit, 0.0).unwrap();
        assert!((op.matrix() - b.element(s11).unwrap().matrix()).norm() < 1e-15);

        let bad = CoeffVector::new(vec![16], vec![1.0]).unwrap();
        assert!(matches!(b.devectorize(&bad, 0.0), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn round_trip_and_parseval_on_random_operators() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for (m, n) in [(2, 2), (2, 3), (3, 3)] {
            let b = ObservableBasis::build(m, n).unwrap();
            for _ in 0..100 {
                let a = random_op(&mut rng, m, n);
                let v = b.vectorize(&a).unwrap();
                let t0 = b.trace_component(&a).unwrap();
                let back = b.devectorize(&v, t0).unwrap();
                assert!((back.matrix() - a.matrix()).norm() < 1e-12);
                let lhs = a.hs_inner(&a).unwrap();
                let rhs = v.norm().powi(2) + t0 * t0;
                assert!((lhs - rhs).abs() < 1e-10);
            }
            let a = random_op(&mut rng, m, n);
            let c = random_op(&mut rng, m, n);
            let (va, vc) = (b.vectorize(&a).unwrap(), b.vectorize(&c).unwrap());
            let parseval = va.dot(&vc).unwrap() + b.trace_component(&a).unwrap() * b.trace_component(&c).unwrap();
            assert!((a.hs_inner(&c).unwrap() - parseval).abs() < 1e-10);
        }
    }

    #[test]
    fn product_coords_match_full_vectorize() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = ObservableBasis::build(2, 3).unwrap();
        let s = crate::states::random_product_state_with(&mut rng, 2, 3).unwrap();
        let rho = crate::states::product_state_density(&s);
        let full = b.vectorize(rho.op()).unwrap();
        let fast = b.product_coords(&s, &b.full_indices()).unwrap();
        for (x, y) in full.values().iter().zip(&fast) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn coeff_vector_validation() {
        assert!(CoeffVector::new(vec![0, 1], vec![1.0, 2.0]).is_err());
        assert!(CoeffVector::new(vec![2, 1], vec![1.0, 2.0]).is_err());
        assert!(CoeffVector::new(vec![1, 1], vec![1.0, 2.0]).is_err());
        assert!(CoeffVector::new(vec![1], vec![]).is_err());
        let c = CoeffVector::new(vec![3, 7], vec![1.0, -2.0]).unwrap();
        assert_eq!(c.get(7), Some(-2.0));
        assert_eq!(c.extend_to(&[1, 3, 7]).unwrap().values(), &[0.0, 1.0, -2.0]);
        assert!(c.extend_to(&[1, 3]).is_err());
        let json = serde_json::to_string(&c).unwrap();
        let back: CoeffVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<CoeffVector>(r#"{"indices":[0],"values":[1.0]}"#).is_err());
    }

    #[test]
    fn render_uses_labels() {
        let b = ObservableBasis::build(2, 2).unwrap();
        let c = CoeffVector::new(vec![5, 10], vec![0.5, -0.5]).unwrap();
        assert_eq!(b.render(&c), "0.500000 σ1⊗σ1 - 0.500000 σ2⊗σ2");
    }
}
