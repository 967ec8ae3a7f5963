//! Translation-equivariant line averages on the discrete torus `ℤ_p × ℤ_p`.
//!
//! For a unit vector `w` (`w·w ≡ 1 mod p`) with `w⊥ = (−w₂, w₁)`, the maps
//! `h^t(z) = z w + t w⊥` send `Y = ℤ_p` into `X = ℤ_p²`. Giving each of the
//! `p` maps mass `1/p` yields an operator that averages an image along the
//! line through `z w` in direction `w⊥`. It is equivariant for
//! `T_w(g_v) = k_{v·w}`: translating the image by `v` cyclically shifts the
//! output by `v·w`.
//!
//! Pixel `(row, col)` has index `row * p + col`.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::action::{Mapping, SignedMeasure};
use crate::error::{GeneoError, Result};
use crate::group::{Homomorphism, Permutation, PermutationGroup};
use crate::stochastic::Matrix;

/// Side of a padded 28×28 digit.
pub const MNIST_SIDE: usize = 28;

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// `ℤ_p × ℤ_p` for a prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeTorus {
    p: u32,
}

impl PrimeTorus {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(GeneoError::NotPrime(p));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn side(&self) -> usize {
        self.p as usize
    }

    pub fn dot(&self, u: (u32, u32), v: (u32, u32)) -> u32 {
        let p = self.p as u64;
        ((u.0 as u64 * v.0 as u64 + u.1 as u64 * v.1 as u64) % p) as u32
    }

    pub fn pixel_index(&self, row: u32, col: u32) -> u32 {
        row * self.p + col
    }

    /// Translations of `ℤ_p²`, generated by the unit row and column shifts.
    pub fn translation_group(&self) -> Result<PermutationGroup> {
        let cyc = PermutationGroup::cyclic(self.side())?;
        PermutationGroup::grid_product(&cyc, &cyc)
    }
}

/// `w ∈ ℤ_p²` with `w·w ≡ 1 (mod p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct UnitVector {
    pub w1: u32,
    pub w2: u32,
}

impl UnitVector {
    pub fn new(torus: PrimeTorus, w1: u32, w2: u32) -> Result<Self> {
        let p = torus.p();
        if w1 >= p || w2 >= p || torus.dot((w1, w2), (w1, w2)) != 1 {
            return Err(GeneoError::NotUnitVector(w1, w2, p));
        }
        Ok(Self { w1, w2 })
    }

    pub fn as_pair(&self) -> (u32, u32) {
        (self.w1, self.w2)
    }

    /// `(−w₂, w₁) mod p`.
    pub fn perp(&self, torus: PrimeTorus) -> (u32, u32) {
        ((torus.p() - self.w2) % torus.p(), self.w1)
    }
}

/// All unit vectors of `ℤ_p²` in lexicographic order.
pub fn unit_vectors(p: u32) -> Result<Vec<UnitVector>> {
    let torus = PrimeTorus::new(p)?;
    let mut out = Vec::new();
    for w1 in 0..p {
        for w2 in 0..p {
            if torus.dot((w1, w2), (w1, w2)) == 1 {
                out.push(UnitVector { w1, w2 });
            }
        }
    }
    Ok(out)
}

/// A real `p × p` image, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusImage {
    side: usize,
    data: Vec<f64>,
}

impl TorusImage {
    pub fn new(side: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != side * side {
            return Err(GeneoError::ShapeMismatch {
                expected: format!("{} pixels", side * side),
                found: format!("{}", data.len()),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(GeneoError::Parse("image has a non-finite pixel".into()));
        }
        Ok(Self { side, data })
    }

    pub fn constant(side: usize, value: f64) -> Self {
        Self {
            side,
            data: vec![value; side * side],
        }
    }

    pub fn zeros(side: usize) -> Self {
        Self::constant(side, 0.0)
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.side + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.side + col] = value;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs_diff(&self, other: &TorusImage) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// The operator with measure `1/p` on each `h^t`.
#[derive(Clone, Debug)]
pub struct TorusGeneo {
    torus: PrimeTorus,
    w: UnitVector,
    family: Vec<Mapping>,
}

/// Builds `H_w = {h^t}` and checks that it is closed under the twisted action
/// of both translation generators.
pub fn build_geneo(p: u32, w: UnitVector) -> Result<TorusGeneo> {
    let torus = PrimeTorus::new(p)?;
    let w = UnitVector::new(torus, w.w1, w.w2)?;
    let family = (0..p).map(|t| family_member(torus, w, t)).collect();
    let geneo = TorusGeneo { torus, w, family };
    if !geneo.is_invariant_under(&[(1, 0), (0, 1)]) {
        return Err(GeneoError::InvarianceViolation);
    }
    Ok(geneo)
}

fn family_member(torus: PrimeTorus, w: UnitVector, t: u32) -> Mapping {
    let p = torus.p() as u64;
    let (q1, q2) = w.perp(torus);
    let values = (0..p)
        .map(|z| {
            let row = (z * w.w1 as u64 + t as u64 * q1 as u64) % p;
            let col = (z * w.w2 as u64 + t as u64 * q2 as u64) % p;
            (row * p + col) as u32
        })
        .collect();
    Mapping::new(values)
}

impl TorusGeneo {
    pub fn torus(&self) -> PrimeTorus {
        self.torus
    }

    pub fn unit(&self) -> UnitVector {
        self.w
    }

    pub fn family(&self) -> &[Mapping] {
        &self.family
    }

    /// Checks `g_v ∘ h^t ∘ T_w(g_v)⁻¹ ∈ H_w` for each listed `v` and every `t`.
    pub fn is_invariant_under(&self, translations: &[(u32, u32)]) -> bool {
        let p = self.torus.p();
        let members: BTreeSet<&Mapping> = self.family.iter().collect();
        translations.iter().all(|&v| {
            let shift = self.torus.dot(v, self.w.as_pair());
            self.family.iter().all(|h| {
                let moved = Mapping::new(
                    (0..p)
                        .map(|z| {
                            let x = h.get(((z + p - shift) % p) as usize);
                            let (row, col) = (x / p, x % p);
                            self.torus.pixel_index((row + v.0) % p, (col + v.1) % p)
                        })
                        .collect(),
                );
                members.contains(&moved)
            })
        })
    }

    /// `F(φ)(z) = (1/p) Σ_t φ(z w + t w⊥)`.
    pub fn apply(&self, phi: &TorusImage) -> Result<Vec<f64>> {
        let p = self.torus.side();
        if phi.side() != p {
            return Err(GeneoError::ShapeMismatch {
                expected: format!("{p}x{p} image"),
                found: format!("{0}x{0}", phi.side()),
            });
        }
        let (w1, w2) = (self.w.w1 as usize, self.w.w2 as usize);
        let (q1, q2) = self.w.perp(self.torus);
        let (q1, q2) = (q1 as usize, q2 as usize);
        Ok((0..p)
            .map(|z| {
                let (mut row, mut col) = (z * w1 % p, z * w2 % p);
                let mut sum = 0.0;
                for _ in 0..p {
                    sum += phi.get(row, col);
                    row = (row + q1) % p;
                    col = (col + q2) % p;
                }
                sum / p as f64
            })
            .collect())
    }

    /// `μ_w` as a measure on functions `ℤ_p → ℤ_p²`.
    pub fn measure(&self) -> SignedMeasure {
        let p = self.torus.side();
        SignedMeasure::from_entries(
            p * p,
            p,
            self.family.iter().map(|h| (h.clone(), 1.0 / p as f64)),
        )
        .expect("family members map ℤ_p into ℤ_p²")
    }

    /// The `p × p²` matrix of the operator.
    pub fn operator_matrix(&self) -> Matrix {
        crate::repr::matrix_of_measure(&self.measure())
    }

    /// `T_w: g_v ↦ k_{v·w}` from the translations of `ℤ_p²` to those of `ℤ_p`.
    pub fn homomorphism(&self) -> Result<Homomorphism> {
        let g = Arc::new(self.torus.translation_group()?);
        let k = Arc::new(PermutationGroup::cyclic(self.torus.side())?);
        let images = [self.w.w1, self.w.w2]
            .iter()
            .map(|&s| shift_permutation(self.torus.p(), s))
            .collect::<Result<Vec<_>>>()?;
        Homomorphism::build(g, k, &images)
    }
}

fn shift_permutation(p: u32, s: u32) -> Result<Permutation> {
    Permutation::from_images((0..p).map(|z| (z + s) % p).collect())
}

/// `ψ(z) = values[z + s]`, i.e. `F(φ) ∘ k_s`.
pub fn cyclic_shift(values: &[f64], s: usize) -> Vec<f64> {
    let n = values.len();
    (0..n).map(|z| values[(z + s) % n]).collect()
}

/// `ψ(q) = φ(q + v)`.
pub fn toroidal_translate(phi: &TorusImage, v: (u32, u32)) -> TorusImage {
    let p = phi.side();
    let (dr, dc) = (v.0 as usize % p, v.1 as usize % p);
    let mut out = TorusImage::zeros(p);
    for row in 0..p {
        for col in 0..p {
            out.set(row, col, phi.get((row + dr) % p, (col + dc) % p));
        }
    }
    out
}

/// One operator per unit vector, rows in lexicographic unit-vector order.
#[derive(Clone, Debug)]
pub struct FeatureStack {
    geneos: Vec<TorusGeneo>,
}

impl FeatureStack {
    pub fn new(p: u32) -> Result<Self> {
        let geneos = unit_vectors(p)?
            .into_iter()
            .map(|w| build_geneo(p, w))
            .collect::<Result<_>>()?;
        Ok(Self { geneos })
    }

    pub fn geneos(&self) -> &[TorusGeneo] {
        &self.geneos
    }

    pub fn units(&self) -> Vec<UnitVector> {
        self.geneos.iter().map(TorusGeneo::unit).collect()
    }

    pub fn apply(&self, phi: &TorusImage) -> Result<Matrix> {
        let rows = self
            .geneos
            .iter()
            .map(|g| g.apply(phi))
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(rows)
    }
}

/// Stacked outputs of every unit-vector operator: `#units × p`.
pub fn stack_features(p: u32, phi: &TorusImage) -> Result<Matrix> {
    FeatureStack::new(p)?.apply(phi)
}

/// Result of [`salt_pepper_detailed`].
#[derive(Clone, Debug)]
pub struct Corruption {
    pub image: TorusImage,
    /// Row-major indices of the corrupted pixels.
    pub corrupted: Vec<usize>,
}

/// Salt-and-pepper noise with extremes 0 and 1.
pub fn salt_pepper(phi: &TorusImage, level: f64, seed: u64) -> Result<TorusImage> {
    Ok(salt_pepper_detailed(phi, level, seed, (0.0, 1.0))?.image)
}

/// Each pixel is corrupted with probability `level`, then set to `range.0`
/// or `range.1` with probability 1/2 each. Draws from `ChaCha8Rng` seeded
/// with `seed`: one uniform in `[0, 1)` per pixel in row-major order
/// (corrupted iff below `level`), then one fair bit per corrupted pixel in
/// row-major order (salt iff true).
pub fn salt_pepper_detailed(
    phi: &TorusImage,
    level: f64,
    seed: u64,
    range: (f64, f64),
) -> Result<Corruption> {
    if !(0.0..=1.0).contains(&level) {
        return Err(GeneoError::LevelOutOfRange(level));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corrupted: Vec<usize> = (0..phi.data.len())
        .filter(|_| rng.gen::<f64>() < level)
        .collect();
    let mut image = phi.clone();
    for &i in &corrupted {
        image.data[i] = if rng.gen_bool(0.5) { range.1 } else { range.0 };
    }
    Ok(Corruption { image, corrupted })
}

/// Scales a 28×28 byte image to `[0, 1]` and appends a zero row at the bottom
/// and a zero column at the right, giving a 29×29 image.
pub fn pad_mnist(raw: &[u8]) -> Result<TorusImage> {
    let n = MNIST_SIDE;
    if raw.len() != n * n {
        return Err(GeneoError::ShapeMismatch {
            expected: format!("{} bytes", n * n),
            found: format!("{}", raw.len()),
        });
    }
    let mut out = TorusImage::zeros(n + 1);
    for row in 0..n {
        for col in 0..n {
            out.set(row, col, raw[row * n + col] as f64 / 255.0);
        }
    }
    Ok(out)
}
