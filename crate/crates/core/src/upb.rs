//! Product-basis utilities and the bundled 3×3 "Tiles" unextendible product basis.

use crate::error::{Error, Result};
use crate::hermitian::{max_schmidt_weight, CVector, HermitianOp, C64};
use crate::states::{DensityMatrix, ProductState};

/// Orthonormality tolerance for product bases.
pub const ORTHONORMAL_TOL: f64 = 1e-9;

/// The five Tiles states on `C^3 ⊗ C^3`:
///
/// ```text
/// |0⟩(|0⟩−|1⟩)/√2   (|0⟩−|1⟩)|2⟩/√2   |2⟩(|1⟩−|2⟩)/√2   (|1⟩−|2⟩)|0⟩/√2   (|0⟩+|1⟩+|2⟩)(|0⟩+|1⟩+|2⟩)/3
/// ```
pub fn tiles_upb() -> Vec<ProductState> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let t = 1.0 / 3f64.sqrt();
    let v = |x: [f64; 3]| CVector::from_iterator(3, x.iter().map(|&r| C64::new(r, 0.0)));
    let pairs = [
        (v([1.0, 0.0, 0.0]), v([h, -h, 0.0])),
        (v([h, -h, 0.0]), v([0.0, 0.0, 1.0])),
        (v([0.0, 0.0, 1.0]), v([0.0, h, -h])),
        (v([0.0, h, -h]), v([1.0, 0.0, 0.0])),
        (v([t, t, t]), v([t, t, t])),
    ];
    pairs
        .into_iter()
        .map(|(a, b)| ProductState::new(a, b).expect("Tiles fixture is valid"))
        .collect()
}

/// Check that `vectors` are mutually orthonormal product vectors on
/// `C^M ⊗ C^N`.
pub fn verify_product_basis(vectors: &[CVector], dim_a: usize, dim_b: usize) -> Result<()> {
    let d = dim_a * dim_b;
    if vectors.is_empty() {
        return Err(Error::InvalidProductBasis("empty set".into()));
    }
    for (i, v) in vectors.iter().enumerate() {
        if v.len() != d {
            return Err(Error::InvalidProductBasis(format!("vector {i} has length {}", v.len())));
        }
        for (j, w) in vectors.iter().enumerate().skip(i) {
            let ip = v.dotc(w);
            let expect = if i == j { 1.0 } else { 0.0 };
            if (ip - C64::new(expect, 0.0)).norm() > ORTHONORMAL_TOL {
                return Err(Error::InvalidProductBasis(format!(
                    "⟨v{i}|v{j}⟩ = {ip:.3e}, not orthonormal"
                )));
            }
        }
        let w = max_schmidt_weight(v, dim_a, dim_b)?;
        if w < 1.0 - ORTHONORMAL_TOL {
            return Err(Error::InvalidProductBasis(format!(
                "vector {i} is entangled (top Schmidt weight {w:.6})"
            )));
        }
    }
    Ok(())
}

/// Orthonormal basis of `(span vectors)^⊥` in `C^d`, obtained by Gram-Schmidt
/// over the computational basis after the given vectors.
pub fn complement_basis(vectors: &[CVector], d: usize) -> Vec<CVector> {
    let mut basis: Vec<CVector> = vectors.to_vec();
    let mut out = Vec::new();
    for k in 0..d {
        let mut e = CVector::zeros(d);
        e[k] = C64::new(1.0, 0.0);
        // two passes for numerical orthogonality
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&e);
                e -= b * c;
            }
        }
        let n = e.norm();
        if n > 1e-8 {
            let e = e.unscale(n);
            basis.push(e.clone());
            out.push(e);
        }
    }
    out
}

pub fn tiles_vectors() -> Vec<CVector> {
    tiles_upb().iter().map(ProductState::vector).collect()
}

/// Projector onto the 4-dimensional complement of the Tiles span.
pub fn tiles_complement_projector() -> HermitianOp {
    let comp = complement_basis(&tiles_vectors(), 9);
    HermitianOp::projector_onto(3, 3, &comp).expect("3x3 projector")
}

/// `(I − P_B)/(d − |B|)`, the normalized projector onto the complement of a
/// product basis. For an unextendible basis this state is PPT and entangled.
pub fn bound_entangled_state(vectors: &[CVector], dim_a: usize, dim_b: usize) -> Result<DensityMatrix> {
    let d = dim_a * dim_b;
    let comp = complement_basis(vectors, d);
    if comp.is_empty() {
        return Err(Error::InvalidProductBasis("basis spans the whole space".into()));
    }
    let p = HermitianOp::projector_onto(dim_a, dim_b, &comp)?;
    DensityMatrix::new(p.scaled(1.0 / comp.len() as f64))
}
