//! Dense complex vector/matrix aliases and the few kernels the solvers share.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CVec = DVector<Complex64>;
pub type CMat = DMatrix<Complex64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Kronecker product of two column vectors, `a ⊗ b`, with `b` varying fastest.
pub fn kron(a: &CVec, b: &CVec) -> CVec {
    let nb = b.len();
    CVec::from_fn(a.len() * nb, |i, _| a[i / nb] * b[i % nb])
}

/// `a^H b`.
pub fn inner(a: &CVec, b: &CVec) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn max_modulus(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest eigenvalue of a Hermitian PSD matrix.
pub fn lambda_max_hermitian(m: &CMat) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let eig = m.clone().symmetric_eigen();
    eig.eigenvalues.iter().cloned().fold(0.0, f64::max)
}

/// `x^H M^+ x` for Hermitian PSD `M`, eigenvalues below `rel_cutoff * λ_max` treated as zero.
pub fn pinv_quadratic_form(m: &CMat, x: &CVec, rel_cutoff: f64) -> f64 {
    let eig = m.clone().symmetric_eigen();
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    if top <= 0.0 {
        return 0.0;
    }
    let cutoff = rel_cutoff * top;
    let mut acc = 0.0;
    for (i, &ev) in eig.eigenvalues.iter().enumerate() {
        if ev > cutoff {
            let proj = inner(&eig.eigenvectors.column(i).into_owned(), x);
            acc += proj.norm_sqr() / ev;
        }
    }
    acc
}

/// Hermitian part `(M + M^H)/2`; used to scrub rounding asymmetry before eigensolves.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}
