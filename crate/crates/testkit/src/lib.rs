//! Seeded generators for random instances: unit-vector sequences, unitaries,
//! isometries, normalized Bessel sequences, Parseval frames and PSD matrices.

use framekz::hilbert::{CMatrix, HVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub use rand;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal(rng: &mut TestRng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub fn gaussian_vector(rng: &mut TestRng, d: usize) -> HVector {
    HVector::from_fn(d, |_, _| complex_normal(rng))
}

pub fn gaussian_matrix(rng: &mut TestRng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn unit_vector(rng: &mut TestRng, d: usize) -> HVector {
    loop {
        let v = gaussian_vector(rng, d);
        let n = v.norm();
        if n > 1e-3 {
            return v.unscale(n);
        }
    }
}

/// Independent uniformly distributed unit vectors.
pub fn unit_sequence(rng: &mut TestRng, d: usize, len: usize) -> Vec<HVector> {
    (0..len).map(|_| unit_vector(rng, d)).collect()
}

/// Random unit vectors with `<e_n, e_{n+1}>` real and at least `min_overlap`.
pub fn admissible_sequence(rng: &mut TestRng, d: usize, len: usize, min_overlap: f64) -> Vec<HVector> {
    let mut out = vec![unit_vector(rng, d)];
    while out.len() < len {
        let prev = out.last().expect("nonempty");
        let mut e = unit_vector(rng, d);
        let c = prev.dotc(&e).conj(); // <prev, e>
        if c.norm() < min_overlap {
            continue;
        }
        e *= c / c.norm();
        out.push(e);
    }
    out
}

/// Haar-distributed unitary via QR with phase correction.
pub fn unitary(rng: &mut TestRng, d: usize) -> CMatrix {
    let qr = gaussian_matrix(rng, d, d).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let z = r[(j, j)];
        if z.norm() > 0.0 {
            let phase = z / z.norm();
            let mut col = q.column_mut(j);
            col *= phase;
        }
    }
    q
}

/// `rows x cols` matrix with orthonormal columns (`W* W = I`), `rows >= cols`.
pub fn isometry(rng: &mut TestRng, rows: usize, cols: usize) -> CMatrix {
    assert!(rows >= cols);
    unitary(rng, rows).columns(0, cols).into_owned()
}

/// A normalized Bessel sequence of `len` vectors in `ℂ^d`: a random unit
/// `g_0` followed by a random family in `g_0^⊥` rescaled to frame-operator
/// norm `scale <= 1`.
pub fn bessel_sequence(rng: &mut TestRng, d: usize, len: usize, scale: f64) -> Vec<HVector> {
    let g0 = unit_vector(rng, d);
    let mut family: Vec<HVector> = (1..len)
        .map(|_| {
            let v = gaussian_vector(rng, d);
            let c = g0.dotc(&v); // <v, g0>
            v - &g0 * c
        })
        .collect();
    if !family.is_empty() {
        let norm = framekz::hilbert::operator_norm(&CMatrix::from_columns(&family));
        // in ℂ^1 the complement of g_0 is trivial and the family is roundoff
        let factor = if norm > 1e-8 { scale.sqrt() / norm } else { 0.0 };
        for v in &mut family {
            *v *= Complex64::new(factor, 0.0);
        }
    }
    std::iter::once(g0).chain(family).collect()
}

/// A normalized Parseval frame: `Q δ_0` followed by the rows of a random
/// `(len - 1) x (d - 1)` isometry placed in `Q span{δ_1..δ_{d-1}}`.
pub fn parseval_frame(rng: &mut TestRng, d: usize, len: usize) -> Vec<HVector> {
    assert!(d >= 1 && len > d - 1);
    let q = unitary(rng, d);
    let w = isometry(rng, len - 1, d - 1);
    let mut out = Vec::with_capacity(len);
    let mut first = HVector::zeros(d);
    first[0] = Complex64::new(1.0, 0.0);
    out.push(&q * first);
    for n in 0..len - 1 {
        let mut v = HVector::zeros(d);
        for a in 0..d - 1 {
            v[a + 1] = w[(n, a)];
        }
        out.push(&q * v);
    }
    out
}

/// `W W*` for a random complex `m x r` matrix `W`.
pub fn psd_matrix(rng: &mut TestRng, m: usize, r: usize) -> CMatrix {
    let w = gaussian_matrix(rng, m, r);
    &w * w.adjoint()
}

/// A random Hermitian positive definite matrix with eigenvalues in `[lo, hi]`.
pub fn positive_definite(rng: &mut TestRng, m: usize, lo: f64, hi: f64) -> CMatrix {
    let q = unitary(rng, m);
    let diag = CMatrix::from_diagonal(&HVector::from_fn(m, |_, _| Complex64::new(rng.random_range(lo..=hi), 0.0)));
    &q * diag * q.adjoint()
}

pub fn max_entry_distance(a: &[HVector], b: &[HVector]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| (x - y).iter().map(|z| z.norm()).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}

/// `W W*` where each row of the `m x r` factor is, with probability
/// `p_dependent`, a random combination of the independent rows above it (zero
/// when there are none). Dependent rows land between pivots, so the
/// factorization has to skip indices in the middle. Returns the matrix and its
/// exact rank.
pub fn psd_with_dependent_rows(rng: &mut TestRng, m: usize, r: usize, p_dependent: f64) -> (CMatrix, usize) {
    let mut w = CMatrix::zeros(m, r);
    let mut fresh: Vec<usize> = Vec::new();
    for i in 0..m {
        if fresh.len() < r && !rng.random_bool(p_dependent) {
            let row = gaussian_vector(rng, r).transpose();
            w.set_row(i, &row);
            fresh.push(i);
        } else if !fresh.is_empty() {
            let weight = 1.0 / (fresh.len() as f64).sqrt();
            for &k in &fresh {
                let c = complex_normal(rng) * weight;
                let row = w.row(k) * c;
                let mut target = w.row_mut(i);
                target += row;
            }
        }
    }
    (&w * w.adjoint(), fresh.len())
}
