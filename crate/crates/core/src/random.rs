//! Seeded sampling of random states and unitaries.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::opcore::{ComplexMatrix, ComplexVector, DensityMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix with i.i.d. standard complex normal entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-distributed unitary from the QR decomposition of a Ginibre matrix,
/// with the phases of `R`'s diagonal folded back into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let qr = ginibre(rng, n, n).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for row in 0..n {
            q[(row, k)] *= phase;
        }
    }
    q
}

/// `GG†/tr(GG†)` on `2 ⊗ dim_b` with `G` Ginibre; full rank almost surely.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim_b: usize) -> DensityMatrix {
    let n = 2 * dim_b;
    let g = ginibre(rng, n, n);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new_unchecked(m / Complex64::new(tr, 0.0), 2, dim_b)
}

/// Normalized state vector on `2 ⊗ dim_b`.
pub fn random_pure_vector<R: Rng + ?Sized>(rng: &mut R, dim_b: usize) -> ComplexVector {
    let v = ComplexVector::from_fn(2 * dim_b, |_, _| complex_normal(rng));
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, dim_b: usize) -> DensityMatrix {
    let v = random_pure_vector(rng, dim_b);
    DensityMatrix::new_unchecked(&v * v.adjoint(), 2, dim_b)
}

/// A random element of `G(2, d)`: Haar blocks on `span{|0⟩,|1⟩}` and its complement.
///
/// Returns `(u_a, u_b)` where `u_a` is the 2×2 block identified with the
/// qubit unitary and `u_b` the full d×d unitary.
pub fn random_g2d<R: Rng + ?Sized>(rng: &mut R, d: usize) -> (ComplexMatrix, ComplexMatrix) {
    let head = haar_unitary(rng, 2);
    let tail = haar_unitary(rng, d - 2);
    let mut u_b = ComplexMatrix::zeros(d, d);
    u_b.view_mut((0, 0), (2, 2)).copy_from(&head);
    u_b.view_mut((2, 2), (d - 2, d - 2)).copy_from(&tail);
    (head, u_b)
}
