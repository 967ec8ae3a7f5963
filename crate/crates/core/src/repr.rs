//! From an equivariant matrix to a twisted-permutant measure and back.
//!
//! The pipeline for a matrix `B` that is equivariant with respect to
//! `T: G → K`, with `T(G)` transitive on `Y`:
//!
//! 1. split `B = B⁺ − B⁻` into entry-wise positive and negative parts;
//! 2. each part has constant row sum `‖β‖₁`; decompose `part / ‖β‖₁` into
//!    rectangular permutation matrices, giving coefficients `c(h) = ‖β‖₁ γ(h)`;
//! 3. average `c` along orbits of the twisted action, giving invariant
//!    nonnegative measures `μ⁺`, `μ⁻`, and `μ = μ⁺ − μ⁻`.
//!
//! Only functions in the support of `c` are visited, so `X^Y` is never
//! enumerated. Measures are not unique, so callers compare reconstructed
//! matrices (`matrix_of_measure`) rather than measures.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::action::{Mapping, SignedMeasure, TwistedAction};
use crate::error::{GeneoError, Result};
use crate::group::{FiniteSet, Homomorphism, Permutation, PermutationGroup};
use crate::stochastic::{decompose_stochastic, Matrix};

/// Tolerance for matrix equality, cell identities and row-profile comparison.
pub const MATRIX_TOL: f64 = 1e-9;

/// A matrix `B = [F]` (`|Y|` rows, `|X|` columns) together with `T: G → K`.
#[derive(Clone, Debug)]
pub struct GeoProblem {
    action: Arc<TwistedAction>,
    matrix: Matrix,
}

impl GeoProblem {
    pub fn new(hom: Arc<Homomorphism>, matrix: Matrix) -> Result<Self> {
        let (m, n) = (hom.target().degree(), hom.source().degree());
        if (matrix.rows(), matrix.cols()) != (m, n) {
            return Err(GeneoError::ShapeMismatch {
                expected: format!("{m}x{n}"),
                found: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        Ok(Self {
            action: Arc::new(TwistedAction::new(hom)),
            matrix,
        })
    }

    pub fn homomorphism(&self) -> &Arc<Homomorphism> {
        self.action.homomorphism()
    }

    pub fn action(&self) -> &Arc<TwistedAction> {
        &self.action
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

/// Positive and negative parts of a matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitParts {
    pub plus: Matrix,
    pub minus: Matrix,
    /// First row of `plus`, present when every row is a rearrangement of it.
    pub beta_plus: Option<Vec<f64>>,
    pub beta_minus: Option<Vec<f64>>,
}

/// Nonnegative coefficients on `X^Y` with `part = Σ c(h) R(h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffFn {
    pub n: usize,
    pub m: usize,
    pub entries: BTreeMap<Mapping, f64>,
}

impl CoeffFn {
    pub fn empty(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            entries: BTreeMap::new(),
        }
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn matrix(&self) -> Matrix {
        let mut out = Matrix::zeros(self.m, self.n);
        for (h, &c) in &self.entries {
            for (i, &j) in h.values.iter().enumerate() {
                out.add_to(i, j as usize, c);
            }
        }
        out
    }
}

/// `μ⁺`, `μ⁻` and `μ = μ⁺ − μ⁻`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureTriple {
    pub plus: SignedMeasure,
    pub minus: SignedMeasure,
    pub mu: SignedMeasure,
}

/// Verdict of [`is_geneo`], with both sides of the norm identity.
#[derive(Clone, Debug)]
pub struct GeneoReport {
    pub is_geneo: bool,
    pub total_variation: f64,
    pub operator_norm: f64,
    /// `max |[F_μ] − B|`.
    pub residual: f64,
    pub triple: MeasureTriple,
}

/// Cell identity `b_ij = b_{T(g)(i), g(j)}` for every generator `g`.
pub fn check_equivariance(p: &GeoProblem) -> bool {
    let g = p.homomorphism().source();
    cell_identity_holds(p, &g.generator_indices())
}

/// Same identity, checked on every element of `G`.
pub fn check_equivariance_all(p: &GeoProblem) -> bool {
    let all: Vec<usize> = (0..p.homomorphism().source().order()).collect();
    cell_identity_holds(p, &all)
}

fn cell_identity_holds(p: &GeoProblem, elements: &[usize]) -> bool {
    let hom = p.homomorphism();
    let b = &p.matrix;
    elements.iter().all(|&e| {
        let g = hom.source().element(e);
        let tg = hom.image(e);
        (0..b.rows()).all(|i| {
            let ti = tg.apply(i as u32) as usize;
            (0..b.cols())
                .all(|j| (b.get(i, j) - b.get(ti, g.apply(j as u32) as usize)).abs() <= MATRIX_TOL)
        })
    })
}

/// First row of `b`, if every row is a rearrangement of it (compared after sorting).
pub fn check_row_permutation(b: &Matrix) -> Option<Vec<f64>> {
    if b.rows() == 0 {
        return None;
    }
    let sorted = |row: &[f64]| {
        let mut r = row.to_vec();
        r.sort_by(f64::total_cmp);
        r
    };
    let profile = sorted(b.row(0));
    let all_match = (1..b.rows()).all(|i| {
        sorted(b.row(i))
            .iter()
            .zip(&profile)
            .all(|(a, c)| (a - c).abs() <= MATRIX_TOL)
    });
    all_match.then(|| b.row(0).to_vec())
}

pub fn split_pos_neg(b: &Matrix) -> SplitParts {
    let plus = b.map(|v| v.max(0.0));
    let minus = b.map(|v| (-v).max(0.0));
    let beta_plus = check_row_permutation(&plus);
    let beta_minus = check_row_permutation(&minus);
    SplitParts {
        plus,
        minus,
        beta_plus,
        beta_minus,
    }
}

/// Coefficients `c` with `Σ c(h) R(h) = part`, for a nonnegative matrix
/// whose rows share a common sum.
pub fn extract_coeffs(part: &Matrix) -> Result<CoeffFn> {
    let (m, n) = (part.rows(), part.cols());
    if part.data().iter().any(|&v| v < 0.0) {
        return Err(GeneoError::NegativeEntry);
    }
    if part.max_abs() == 0.0 {
        return Ok(CoeffFn::empty(n, m));
    }
    let sums = part.row_sums();
    let norm = sums[0];
    if let Some(&other) = sums.iter().find(|s| (*s - norm).abs() > MATRIX_TOL) {
        return Err(GeneoError::UnequalRowSums { first: norm, other });
    }
    let combo = decompose_stochastic(&part.scaled(1.0 / norm), MATRIX_TOL)?;
    let mut coeffs = CoeffFn::empty(n, m);
    for (gamma, r) in combo.terms {
        *coeffs.entries.entry(Mapping::from(r)).or_insert(0.0) += norm * gamma;
    }
    Ok(coeffs)
}

/// `μ(h) = Σ_{f ∈ O(h)} c(f) / |O(h)|`.
pub fn orbit_average(c: &CoeffFn, action: &TwistedAction) -> SignedMeasure {
    let mut mu = SignedMeasure::zero(c.n, c.m);
    for (f, &value) in &c.entries {
        let orbit = action.orbit_of(f);
        let share = value / orbit.len() as f64;
        for h in orbit.members {
            mu.add(h, share).expect("orbit members share the shape of f");
        }
    }
    mu
}

/// A twisted-permutant measure representing the operator of `p`.
pub fn represent(p: &GeoProblem) -> Result<MeasureTriple> {
    if !check_equivariance(p) {
        return Err(GeneoError::NotEquivariant);
    }
    if !p.homomorphism().is_target_transitive() {
        return Err(GeneoError::NotTransitive);
    }
    let parts = split_pos_neg(&p.matrix);
    let plus = orbit_average(&extract_coeffs(&parts.plus)?, &p.action);
    let minus = orbit_average(&extract_coeffs(&parts.minus)?, &p.action);
    let mu = plus.add_scaled(&minus, -1.0)?;
    Ok(MeasureTriple { plus, minus, mu })
}

/// `ψ(y) = Σ_h φ(h(y)) μ(h)`.
pub fn apply_measure(mu: &SignedMeasure, phi: &[f64]) -> Result<Vec<f64>> {
    if phi.len() != mu.codomain_size() {
        return Err(GeneoError::ShapeMismatch {
            expected: format!("signal of length {}", mu.codomain_size()),
            found: format!("length {}", phi.len()),
        });
    }
    let mut psi = vec![0.0; mu.domain_size()];
    for (h, value) in mu.iter() {
        for (y, out) in psi.iter_mut().enumerate() {
            *out += phi[h.get(y) as usize] * value;
        }
    }
    Ok(psi)
}

/// `Σ_h μ(h) R(h)`.
pub fn matrix_of_measure(mu: &SignedMeasure) -> Matrix {
    let mut out = Matrix::zeros(mu.domain_size(), mu.codomain_size());
    for (h, value) in mu.iter() {
        for (i, &j) in h.values.iter().enumerate() {
            out.add_to(i, j as usize, value);
        }
    }
    out
}

/// The `∞ → ∞` operator norm: largest absolute row sum.
pub fn operator_norm_inf(b: &Matrix) -> f64 {
    (0..b.rows())
        .map(|i| b.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `φ̄ = Σ_j sgn(b_1j) 1_{x_j}`, with `sgn(0) = 0`. For an equivariant
/// matrix with transitive target action, `‖F(φ̄)‖∞` attains the operator norm.
pub fn norm_witness(b: &Matrix) -> Vec<f64> {
    b.row(0)
        .iter()
        .map(|&v| {
            if v > 0.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// Represents `p` and decides non-expansivity from both the total variation
/// of the measure and the operator norm, which must agree.
pub fn is_geneo(p: &GeoProblem) -> Result<GeneoReport> {
    let triple = represent(p)?;
    let total_variation = triple.mu.total_variation();
    let operator_norm = operator_norm_inf(&p.matrix);
    if (total_variation - operator_norm).abs() > MATRIX_TOL * operator_norm.max(1.0) {
        return Err(GeneoError::NormIdentityViolated {
            total_variation,
            operator_norm,
        });
    }
    let residual = matrix_of_measure(&triple.mu).max_abs_diff(&p.matrix)?;
    Ok(GeneoReport {
        is_geneo: total_variation <= 1.0 + MATRIX_TOL && operator_norm <= 1.0 + MATRIX_TOL,
        total_variation,
        operator_norm,
        residual,
        triple,
    })
}

/// No function carries mass above `tol` in both `μ⁺` and `μ⁻`.
pub fn check_mutual_singularity(t: &MeasureTriple, tol: f64) -> bool {
    t.plus
        .iter()
        .all(|(h, v)| v <= tol || t.minus.value(h) <= tol)
}

/// One orbit `Y_r` of `T(G)` on `Y`, as a transitive subproblem.
#[derive(Clone, Debug)]
pub struct TargetBlock {
    /// Original row indices, ascending; row `k` of the subproblem is `rows[k]`.
    pub rows: Vec<usize>,
    pub problem: GeoProblem,
}

/// Restricts `B` to each `T(G)`-orbit of `Y`; `K` is replaced by the
/// restriction of `T(G)` to the orbit.
pub fn split_by_target_orbits(p: &GeoProblem) -> Result<Vec<TargetBlock>> {
    if !check_equivariance(p) {
        return Err(GeneoError::NotEquivariant);
    }
    let hom = p.homomorphism();
    let orbits = hom.target_orbits();
    if orbits.len() == 1 {
        return Ok(vec![TargetBlock {
            rows: orbits.into_iter().next().unwrap(),
            problem: p.clone(),
        }]);
    }
    let source = hom.source().clone();
    let gen_indices = source.generator_indices();
    let mut blocks = Vec::with_capacity(orbits.len());
    for rows in orbits {
        let mut relabel = vec![u32::MAX; hom.target().degree()];
        for (k, &y) in rows.iter().enumerate() {
            relabel[y] = k as u32;
        }
        let images = gen_indices
            .iter()
            .map(|&g| {
                let tg = hom.image(g);
                Permutation::from_images(
                    rows.iter()
                        .map(|&y| relabel[tg.apply(y as u32) as usize])
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let mut k_gens: Vec<Permutation> =
            images.iter().filter(|q| !q.is_identity()).cloned().collect();
        k_gens.sort();
        k_gens.dedup();
        let k = Arc::new(PermutationGroup::closure(FiniteSet::new(rows.len())?, k_gens)?);
        let sub_hom = Arc::new(Homomorphism::build(source.clone(), k, &images)?);
        let matrix = Matrix::from_rows(rows.iter().map(|&i| p.matrix.row(i).to_vec()).collect())?;
        blocks.push(TargetBlock {
            rows,
            problem: GeoProblem::new(sub_hom, matrix)?,
        });
    }
    Ok(blocks)
}

/// [`represent`] applied to every transitive block of a possibly
/// non-transitive problem.
pub fn represent_by_target_orbits(p: &GeoProblem) -> Result<Vec<(Vec<usize>, MeasureTriple)>> {
    split_by_target_orbits(p)?
        .into_iter()
        .map(|block| Ok((block.rows, represent(&block.problem)?)))
        .collect()
}

/// Stacks per-block reconstructions back into a `|Y| × |X|` matrix.
pub fn assemble_block_matrix(
    blocks: &[(Vec<usize>, MeasureTriple)],
    rows: usize,
    cols: usize,
) -> Matrix {
    let mut out = Matrix::zeros(rows, cols);
    for (block_rows, triple) in blocks {
        let part = matrix_of_measure(&triple.mu);
        for (k, &i) in block_rows.iter().enumerate() {
            for j in 0..cols {
                out.set(i, j, part.get(k, j));
            }
        }
    }
    out
}
