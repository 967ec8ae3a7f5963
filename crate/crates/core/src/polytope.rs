//! Orbit basis of the space of linear GENEOs and the weighted-ℓ1 ball.
//!
//! With `O_1, …, O_k` the orbits of the twisted action on `X^Y`, the
//! indicators `ν_i` span the invariant measures. A permutant measure is
//! `μ = Σ a_i ν_i`, its total variation is `Σ |a_i| |O_i|`, and the
//! non-expansive operators form the convex hull of `±F_{ν_i} / |O_i|`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::action::{Mapping, Orbit, SignedMeasure, TwistedAction};
use crate::error::{GeneoError, Result};
use crate::repr::{matrix_of_measure, MATRIX_TOL};
use crate::stochastic::Matrix;

/// Tolerance of the redundancy identity among the bijection orbits of `Sym(3)`.
pub const REDUNDANCY_TOL: f64 = 1e-12;

/// Orbits in order of their lexicographically smallest member.
#[derive(Clone, Debug)]
pub struct OrbitBasis {
    action: Arc<TwistedAction>,
    pub orbits: Vec<Orbit>,
    pub nu: Vec<SignedMeasure>,
    pub basis_matrices: Vec<Matrix>,
    lookup: BTreeMap<Mapping, usize>,
}

/// Coordinates of a permutant measure in an [`OrbitBasis`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoeffVector {
    pub a: Vec<f64>,
}

impl CoeffVector {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.iter().any(|v| !v.is_finite()) {
            return Err(GeneoError::Parse("coefficients must be finite".into()));
        }
        Ok(Self { a })
    }

    pub fn zeros(k: usize) -> Self {
        Self { a: vec![0.0; k] }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// Enumerates every orbit of `X^Y`, refusing when `n^m > guard`.
pub fn orbit_basis(action: Arc<TwistedAction>, guard: u128) -> Result<OrbitBasis> {
    let orbits = action.all_orbits(guard)?;
    Ok(OrbitBasis::from_orbits(action, orbits))
}

impl OrbitBasis {
    fn from_orbits(action: Arc<TwistedAction>, orbits: Vec<Orbit>) -> Self {
        let (n, m) = (action.codomain_size(), action.domain_size());
        let nu: Vec<SignedMeasure> = orbits
            .iter()
            .map(|o| SignedMeasure::on_orbit(n, m, o, 1.0))
            .collect();
        let basis_matrices = nu.iter().map(matrix_of_measure).collect();
        let lookup = orbits
            .iter()
            .enumerate()
            .flat_map(|(i, o)| o.members.iter().map(move |h| (h.clone(), i)))
            .collect();
        Self {
            action,
            orbits,
            nu,
            basis_matrices,
            lookup,
        }
    }

    pub fn action(&self) -> &Arc<TwistedAction> {
        &self.action
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.orbits.iter().map(Orbit::len).collect()
    }

    /// Index of the orbit containing `h`.
    pub fn orbit_index(&self, h: &Mapping) -> Option<usize> {
        self.lookup.get(h).copied()
    }

    /// The sub-basis spanned by the selected orbits, order preserved.
    pub fn restricted(&self, keep: impl Fn(&Orbit) -> bool) -> OrbitBasis {
        let orbits = self.orbits.iter().filter(|o| keep(o)).cloned().collect();
        OrbitBasis::from_orbits(self.action.clone(), orbits)
    }

    /// Orbits made of bijections (non-empty only when `|X| = |Y|`).
    pub fn bijective_part(&self) -> OrbitBasis {
        let square = self.action.codomain_size() == self.action.domain_size();
        self.restricted(|o| square && o.representative().is_injective())
    }

    /// `Σ a_i ν_i`.
    pub fn measure(&self, a: &CoeffVector) -> Result<SignedMeasure> {
        self.check_len(a)?;
        let (n, m) = (self.action.codomain_size(), self.action.domain_size());
        let mut mu = SignedMeasure::zero(n, m);
        for (o, &ai) in self.orbits.iter().zip(&a.a) {
            if ai != 0.0 {
                for h in &o.members {
                    mu.add(h.clone(), ai)?;
                }
            }
        }
        Ok(mu)
    }

    /// `Σ a_i [F_{ν_i}]`.
    pub fn combine(&self, a: &CoeffVector) -> Result<Matrix> {
        self.check_len(a)?;
        let (n, m) = (self.action.codomain_size(), self.action.domain_size());
        let mut out = Matrix::zeros(m, n);
        for (b, &ai) in self.basis_matrices.iter().zip(&a.a) {
            out = out.add(&b.scaled(ai))?;
        }
        Ok(out)
    }

    fn check_len(&self, a: &CoeffVector) -> Result<()> {
        if a.len() != self.len() {
            return Err(GeneoError::ShapeMismatch {
                expected: format!("{} coefficients", self.len()),
                found: format!("{}", a.len()),
            });
        }
        Ok(())
    }
}

/// `a_i` = the common value of `μ` on `O_i`.
pub fn measure_coefficients(mu: &SignedMeasure, basis: &OrbitBasis) -> Result<CoeffVector> {
    let action = basis.action();
    if (mu.codomain_size(), mu.domain_size()) != (action.codomain_size(), action.domain_size()) {
        return Err(GeneoError::ShapeMismatch {
            expected: format!("measure on functions {}->{}", action.domain_size(), action.codomain_size()),
            found: format!("{}->{}", mu.domain_size(), mu.codomain_size()),
        });
    }
    if !action.is_permutant(mu) {
        return Err(GeneoError::NotPermutant);
    }
    // Mass outside the listed orbits cannot be expressed in this basis.
    if mu.iter().any(|(h, v)| v != 0.0 && basis.orbit_index(h).is_none()) {
        return Err(GeneoError::NotPermutant);
    }
    Ok(CoeffVector {
        a: basis.orbits.iter().map(|o| mu.value(o.representative())).collect(),
    })
}

/// `Σ |a_i| |O_i|`, the total variation of `Σ a_i ν_i`.
pub fn weighted_l1(a: &CoeffVector, basis: &OrbitBasis) -> Result<f64> {
    basis.check_len(a)?;
    Ok(a.a
        .iter()
        .zip(&basis.orbits)
        .map(|(ai, o)| ai.abs() * o.len() as f64)
        .sum())
}

/// Whether `Σ a_i F_{ν_i}` lies in the convex hull of `±F_{ν_i}/|O_i|`.
pub fn is_linear_geneo_hull(a: &CoeffVector, basis: &OrbitBasis) -> bool {
    weighted_l1(a, basis).is_ok_and(|w| w <= 1.0 + MATRIX_TOL)
}

/// For `X = Y = {0,1,2}`, `G = Sym(3)` and `T = id`, the bijection orbits
/// have sizes 1, 2, 3 and satisfy
/// `[F_{ν_3}]/3 = (1/3)[F_{ν_1}] + (2/3)[F_{ν_2}]/2`,
/// so `F_{ν_3}/|O_3|` is not a vertex of the hull.
pub fn check_redundancy_identity(basis: &OrbitBasis) -> Result<bool> {
    let action = basis.action();
    let hom = action.homomorphism();
    let group = hom.source();
    let is_identity_hom = (0..group.order()).all(|g| hom.image(g) == group.element(g));
    if action.codomain_size() != 3
        || action.domain_size() != 3
        || group.order() != 6
        || !is_identity_hom
    {
        return Err(GeneoError::WrongSetting(
            "expected X = Y of size 3, G = Sym(3) and T = identity".into(),
        ));
    }
    let find = |size: usize| {
        basis
            .orbits
            .iter()
            .position(|o| o.representative().is_injective() && o.len() == size)
            .ok_or_else(|| GeneoError::WrongSetting(format!("no bijection orbit of size {size}")))
    };
    let (i1, i2, i3) = (find(1)?, find(2)?, find(3)?);
    let lhs = basis.basis_matrices[i3].scaled(1.0 / 3.0);
    let rhs = basis.basis_matrices[i1]
        .scaled(1.0 / 3.0)
        .add(&basis.basis_matrices[i2].scaled(1.0 / 3.0))?;
    Ok(lhs.max_abs_diff(&rhs)? <= REDUNDANCY_TOL)
}
