//! Seeded random generators for states, operators and channels.

use crate::{dag, herm_pow, identity, CMat, DensityState, KrausChannel, SUPPORT_CUTOFF};
use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn std_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Ginibre matrix: iid complex standard normal entries.
pub fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat {
    let mut m = Array2::from_elem((rows, cols), Complex64::ZERO);
    for i in 0..rows {
        for j in 0..cols {
            m[[i, j]] = Complex64::new(std_normal(rng), std_normal(rng));
        }
    }
    m
}

/// Random density matrix `G G* / tr(G G*)` (full rank almost surely).
pub fn random_density(rng: &mut impl Rng, dim: usize) -> DensityState {
    let g = ginibre(rng, dim, dim);
    let m = g.dot(&dag(&g));
    let tr = crate::trace(&m).re;
    let m = m.mapv(|z| z / tr);
    DensityState::unipartite(m).expect("randomly generated density state is valid")
}

/// Random density matrix with declared subsystem dims.
pub fn random_density_multi(rng: &mut impl Rng, dims: &[usize]) -> DensityState {
    let dim: usize = dims.iter().product();
    let g = ginibre(rng, dim, dim);
    let m = g.dot(&dag(&g));
    let tr = crate::trace(&m).re;
    let m = m.mapv(|z| z / tr);
    DensityState::new(m, dims.to_vec()).expect("randomly generated density state is valid")
}

/// Random classical-quantum state `sum_a p_a |a><a| (x) rho_E(a)` with
/// classical register size `na` and environment dimension `de`.
pub fn random_cq_state(rng: &mut impl Rng, na: usize, de: usize) -> DensityState {
    let mut weights: Vec<f64> = (0..na).map(|_| rng.random::<f64>() + 0.05).collect();
    let s: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= s);
    let mut m = Array2::from_elem((na * de, na * de), Complex64::ZERO);
    for (a, &w) in weights.iter().enumerate() {
        let blk = random_density(rng, de);
        for i in 0..de {
            for j in 0..de {
                m[[a * de + i, a * de + j]] = blk.mat()[[i, j]] * Complex64::new(w, 0.0);
            }
        }
    }
    DensityState::new(m, vec![na, de]).expect("cq state is valid")
}

/// Random full-rank PSD matrix, eigenvalues bounded away from zero.
pub fn random_psd(rng: &mut impl Rng, dim: usize) -> CMat {
    let g = ginibre(rng, dim, dim);
    let m = g.dot(&dag(&g));
    let eye = identity(dim);
    let m = &m + &eye.mapv(|z| z * Complex64::new(0.1 * dim as f64, 0.0));
    let tr = crate::trace(&m).re;
    m.mapv(|z| z * Complex64::new(dim as f64 / tr, 0.0))
}

/// Random unitary via QR-free Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> CMat {
    let g = ginibre(rng, dim, dim);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v: Vec<Complex64> = (0..dim).map(|i| g[[i, j]]).collect();
        for u in &cols {
            let ip: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for i in 0..dim {
                v[i] -= ip * u[i];
            }
        }
        let nrm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= nrm;
        }
        cols.push(v);
    }
    let mut u = Array2::from_elem((dim, dim), Complex64::ZERO);
    for j in 0..dim {
        for i in 0..dim {
            u[[i, j]] = cols[j][i];
        }
    }
    u
}

/// Random CPTP channel from dim -> dim via a Stinespring isometry with
/// `n_kraus` environment levels.
pub fn random_channel(rng: &mut impl Rng, dim: usize, n_kraus: usize) -> KrausChannel {
    // random isometry V: C^dim -> C^(dim * n_kraus), columns orthonormal
    let big = random_unitary(rng, dim * n_kraus);
    let mut kraus = Vec::with_capacity(n_kraus);
    for k in 0..n_kraus {
        let mut m = Array2::from_elem((dim, dim), Complex64::ZERO);
        for i in 0..dim {
            for j in 0..dim {
                m[[i, j]] = big[[k * dim + i, j]];
            }
        }
        kraus.push(m);
    }
    KrausChannel::new(kraus).expect("Stinespring construction is CPTP")
}

/// Random Hermitian matrix with entries O(1).
pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> CMat {
    let g = ginibre(rng, dim, dim);
    crate::hermitian_part(&g)
}

/// Random strictly positive diagonal probability vector of length n.
pub fn random_prob(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.02).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

/// Pseudo-inverse square root helper re-exported for test oracles.
pub fn pinv_sqrt(a: &CMat) -> CMat {
    herm_pow(a, -0.5, SUPPORT_CUTOFF).expect("eig on hermitian input")
}
