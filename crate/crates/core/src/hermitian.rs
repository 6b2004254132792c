//! Dense Hermitian operators on `C^M ⊗ C^N` and a cyclic Jacobi eigensolver.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest entrywise asymmetry `|A - A†|` accepted on construction.
pub const HERMITIAN_REJECT_TOL: f64 = 1e-8;

const JACOBI_MAX_SWEEPS: usize = 100;

/// A Hermitian operator on a bipartite space with factor dimensions
/// `(dim_a, dim_b)`. The stored matrix is exactly Hermitian: it is replaced by
/// `(A + A†)/2` when constructed.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOp {
    dim_a: usize,
    dim_b: usize,
    entries: CMatrix,
}

impl HermitianOp {
    pub fn new(dim_a: usize, dim_b: usize, entries: CMatrix) -> Result<Self> {
        check_dims(dim_a, dim_b)?;
        let side = dim_a * dim_b;
        if entries.nrows() != side || entries.ncols() != side {
            return Err(Error::ShapeMismatch {
                side: entries.nrows().max(entries.ncols()),
                dim_a,
                dim_b,
            });
        }
        let asym = max_asymmetry(&entries);
        if !asym.is_finite() || asym > HERMITIAN_REJECT_TOL {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self {
            dim_a,
            dim_b,
            entries: symmetrize(&entries),
        })
    }

    pub fn identity(dim_a: usize, dim_b: usize) -> Result<Self> {
        let d = dim_a * dim_b;
        Self::new(dim_a, dim_b, CMatrix::identity(d, d))
    }

    pub fn zeros(dim_a: usize, dim_b: usize) -> Result<Self> {
        let d = dim_a * dim_b;
        Self::new(dim_a, dim_b, CMatrix::zeros(d, d))
    }

    /// `|v⟩⟨v|` for the vector as given (no normalization).
    pub fn outer(dim_a: usize, dim_b: usize, v: &CVector) -> Result<Self> {
        Self::new(dim_a, dim_b, v * v.adjoint())
    }

    /// Sum of `|v⟩⟨v|` over the given vectors.
    pub fn projector_onto(dim_a: usize, dim_b: usize, vectors: &[CVector]) -> Result<Self> {
        let d = dim_a * dim_b;
        let mut m = CMatrix::zeros(d, d);
        for v in vectors {
            if v.len() != d {
                return Err(Error::ShapeMismatch {
                    side: v.len(),
                    dim_a,
                    dim_b,
                });
            }
            m += v * v.adjoint();
        }
        Self::new(dim_a, dim_b, m)
    }

    /// Tensor product of two local Hermitian matrices.
    pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<Self> {
        Self::new(a.nrows(), b.nrows(), a.kronecker(b))
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Side length `M·N` of the matrix.
    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn hs_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `tr(AB)`, real for Hermitian arguments.
    pub fn hs_inner(&self, other: &Self) -> Result<f64> {
        self.check_same_dims(other)?;
        // tr(AB) = Σ_ij A_ij B_ji = Σ_ij A_ij conj(B_ij) for Hermitian B
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a * b.conj()).re)
            .sum())
    }

    /// `⟨ψ|A|ψ⟩` for a (not necessarily normalized) vector.
    pub fn quadratic_form(&self, psi: &CVector) -> f64 {
        psi.dotc(&(&self.entries * psi)).re
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            entries: self.entries.map(|z| z * s),
        }
    }

    /// `A + t·I`.
    pub fn shifted(&self, t: f64) -> Self {
        let mut entries = self.entries.clone();
        for i in 0..self.dim() {
            entries[(i, i)] += C64::new(t, 0.0);
        }
        Self {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            entries,
        }
    }

    /// `U A U†` for a unitary `U` of matching size.
    pub fn conjugated(&self, u: &CMatrix) -> Result<Self> {
        Self::new(self.dim_a, self.dim_b, u * &self.entries * u.adjoint())
    }

    pub fn spectral(&self) -> Result<Spectrum> {
        let (values, vectors) = eigh(&self.entries)?;
        Ok(Spectrum { values, vectors })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.spectral()?.values)
    }

    pub fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                found: other.dims(),
            });
        }
        Ok(())
    }
}

impl Add for &HermitianOp {
    type Output = HermitianOp;
    fn add(self, rhs: Self) -> HermitianOp {
        assert_eq!(self.dims(), rhs.dims(), "dimension mismatch in operator sum");
        HermitianOp {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            entries: &self.entries + &rhs.entries,
        }
    }
}

impl Sub for &HermitianOp {
    type Output = HermitianOp;
    fn sub(self, rhs: Self) -> HermitianOp {
        assert_eq!(self.dims(), rhs.dims(), "dimension mismatch in operator difference");
        HermitianOp {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            entries: &self.entries - &rhs.entries,
        }
    }
}

impl Neg for &HermitianOp {
    type Output = HermitianOp;
    fn neg(self) -> HermitianOp {
        self.scaled(-1.0)
    }
}

impl Mul<f64> for &HermitianOp {
    type Output = HermitianOp;
    fn mul(self, s: f64) -> HermitianOp {
        self.scaled(s)
    }
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Spectrum {
    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// `Σ λ_i |λ_i⟩⟨λ_i|`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let mut out = CMatrix::zeros(self.vectors.nrows(), self.vectors.nrows());
        for i in 0..n {
            let v = self.vectors.column(i);
            out += (v * v.adjoint()) * C64::new(self.values[i], 0.0);
        }
        out
    }
}

pub(crate) fn check_dims(dim_a: usize, dim_b: usize) -> Result<()> {
    for d in [dim_a, dim_b] {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
    }
    Ok(())
}

pub fn max_asymmetry(m: &CMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(d);
        }
    }
    worst
}

fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns eigenvalues sorted ascending and the eigenvectors as columns.
/// Degenerate eigenspaces come back in whatever orthonormal basis the sweeps
/// settle on.
pub fn eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eigh needs a square matrix");
    let mut a = symmetrize(m);
    let mut v = CMatrix::identity(n, n);
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !scale.is_finite() {
        return Err(Error::NoConvergence(0));
    }

    let mut converged = n <= 1 || scale == 0.0;
    let mut sweep = 0;
    while !converged && sweep < JACOBI_MAX_SWEEPS {
        sweep += 1;
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 || r <= 1e-18 * scale {
                    a[(p, q)] = C64::new(0.0, 0.0);
                    a[(q, p)] = C64::new(0.0, 0.0);
                    continue;
                }
                // Phase-strip the pivot, then a real Jacobi rotation.
                let phase_conj = (apq / r).conj();
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(s, 0.0);
                let gqp = phase_conj * (-s);
                let gqq = phase_conj * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * gpp + akq * gqp;
                    a[(k, q)] = akp * gpq + akq * gqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
                    a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * gpp + vkq * gqp;
                    v[(k, q)] = vkp * gpq + vkq * gqq;
                }
            }
        }
    }
    if !converged {
        // one more measurement after the final sweep
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() > 1e-12 * scale {
            return Err(Error::NoConvergence(sweep));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// Reshape a vector on `C^M ⊗ C^N` into the `M×N` coefficient matrix
/// `R[i][j] = ψ[i·N + j]`.
pub fn reshape_bipartite(psi: &CVector, dim_a: usize, dim_b: usize) -> CMatrix {
    CMatrix::from_fn(dim_a, dim_b, |i, j| psi[i * dim_b + j])
}

/// Largest Schmidt coefficient squared of a normalized bipartite vector; equals
/// 1 exactly for product vectors.
pub fn max_schmidt_weight(psi: &CVector, dim_a: usize, dim_b: usize) -> Result<f64> {
    let r = reshape_bipartite(psi, dim_a, dim_b);
    let (values, _) = eigh(&(&r * r.adjoint()))?;
    Ok(values[values.len() - 1] / psi.norm_squared())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn random_hermitian(rng: &mut impl Rng, d: usize) -> CMatrix {
        let g = CMatrix::from_fn(d, d, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (&g + g.adjoint()).map(|z| z * 0.5)
    }

    #[test]
    fn rejects_bad_dims_and_asymmetry() {
        assert!(matches!(HermitianOp::identity(1, 3), Err(Error::InvalidDimension(1))));
        assert!(matches!(
            HermitianOp::new(2, 2, CMatrix::identity(3, 3)),
            Err(Error::ShapeMismatch { .. })
        ));
        let mut m = CMatrix::identity(4, 4);
        m[(0, 1)] = c(0.5, 0.0);
        assert!(matches!(HermitianOp::new(2, 2, m.clone()), Err(Error::NotHermitian(_))));
        // round-off asymmetry is tolerated and removed
        m[(1, 0)] = c(0.5 + 1e-10, 0.0);
        let op = HermitianOp::new(2, 2, m).unwrap();
        assert_eq!(max_asymmetry(op.matrix()), 0.0);
    }

    #[test]
    fn identity_spectrum() {
        let id = HermitianOp::identity(2, 3).unwrap();
        let s = id.spectral().unwrap();
        assert!(s.values.iter().all(|&l| (l - 1.0).abs() < 1e-14));
    }

    #[test]
    fn jacobi_reconstructs_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [2usize, 3, 4, 6, 9] {
            for _ in 0..10 {
                let m = random_hermitian(&mut rng, d);
                let (vals, vecs) = eigh(&m).unwrap();
                assert!(vals.windows(2).all(|w| w[0] <= w[1]));
                let s = Spectrum {
                    values: vals,
                    vectors: vecs.clone(),
                };
                let resid = (s.reconstruct() - &m).norm();
                assert!(resid < 1e-10, "residual {resid}");
                let gram = vecs.adjoint() * &vecs;
                assert!((gram - CMatrix::identity(d, d)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn jacobi_matches_trace_and_hs_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_hermitian(&mut rng, 6);
        let (vals, _) = eigh(&m).unwrap();
        let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
        assert!((vals.iter().sum::<f64>() - tr).abs() < 1e-12);
        let fro2: f64 = m.iter().map(|z| z.norm_sqr()).sum();
        assert!((vals.iter().map(|l| l * l).sum::<f64>() - fro2).abs() < 1e-10);
    }

    #[test]
    fn degenerate_spectrum_still_orthonormal() {
        // projector of rank 2 in C^4 with a complex phase
        let v1 = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]).normalize();
        let v2 = CVector::from_vec(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]).normalize();
        let p = &v1 * v1.adjoint() + &v2 * v2.adjoint();
        let (vals, vecs) = eigh(&p).unwrap();
        let expect = [0.0, 0.0, 1.0, 1.0];
        for (l, e) in vals.iter().zip(expect) {
            assert!((l - e).abs() < 1e-12);
        }
        assert!((vecs.adjoint() * &vecs - CMatrix::identity(4, 4)).norm() < 1e-10);
    }

    #[test]
    fn hs_inner_is_real_trace_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = HermitianOp::new(2, 2, random_hermitian(&mut rng, 4)).unwrap();
        let b = HermitianOp::new(2, 2, random_hermitian(&mut rng, 4)).unwrap();
        let direct = (a.matrix() * b.matrix()).trace();
        assert!(direct.im.abs() < 1e-12);
        assert!((a.hs_inner(&b).unwrap() - direct.re).abs() < 1e-12);
        let other = HermitianOp::identity(2, 3).unwrap();
        assert!(a.hs_inner(&other).is_err());
    }

    #[test]
    fn schmidt_weight_of_product_and_bell() {
        let prod = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!((max_schmidt_weight(&prod, 2, 2).unwrap() - 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = CVector::from_vec(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]);
        assert!((max_schmidt_weight(&bell, 2, 2).unwrap() - 0.5).abs() < 1e-14);
    }
}
