//! The twisted conjugation action `(g, h) ↦ g ∘ h ∘ T(g⁻¹)` of `G` on the
//! functions `Y → X`, its orbits, and signed measures invariant under it.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeneoError, Result};
use crate::group::Homomorphism;

/// Default bound on `|X|^|Y|` for full orbit enumeration.
pub const DEFAULT_DOMAIN_GUARD: u128 = 10_000_000;

/// Tolerance used when comparing measure values for invariance.
pub const PERMUTANT_TOL: f64 = 1e-9;

/// A function `h: Y → X`, stored as `values[y] = h(y)`.
///
/// The derived ordering is lexicographic on `values`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mapping {
    pub values: Vec<u32>,
}

impl Mapping {
    pub fn new(values: Vec<u32>) -> Self {
        Self { values }
    }

    pub fn constant(m: usize, x: u32) -> Self {
        Self { values: vec![x; m] }
    }

    #[inline]
    pub fn get(&self, y: usize) -> u32 {
        self.values[y]
    }

    pub fn domain_size(&self) -> usize {
        self.values.len()
    }

    /// Number of distinct values taken.
    pub fn image_size(&self) -> usize {
        self.values.iter().collect::<BTreeSet<_>>().len()
    }

    pub fn is_injective(&self) -> bool {
        self.image_size() == self.values.len()
    }

    fn check(&self, n: usize, m: usize) -> Result<()> {
        if self.values.len() != m || self.values.iter().any(|&v| v as usize >= n) {
            return Err(GeneoError::ShapeMismatch {
                expected: format!("function from a {m}-set into a {n}-set"),
                found: format!("{:?}", self.values),
            });
        }
        Ok(())
    }
}

/// Encodes `h` as a base-`n` integer, most significant digit first, so that
/// integer order agrees with lexicographic order.
pub(crate) fn encode(h: &Mapping, n: usize) -> usize {
    h.values.iter().fold(0usize, |acc, &v| acc * n + v as usize)
}

pub(crate) fn decode(mut code: usize, n: usize, m: usize) -> Mapping {
    let mut values = vec![0u32; m];
    for slot in values.iter_mut().rev() {
        *slot = (code % n) as u32;
        code /= n;
    }
    Mapping { values }
}

/// `|X|^|Y|`, saturating.
pub fn function_count(n: usize, m: usize) -> u128 {
    let mut total: u128 = 1;
    for _ in 0..m {
        total = total.saturating_mul(n as u128);
    }
    total
}

/// The twisted action of `G` on `X^Y` induced by a homomorphism `T: G → K`.
///
/// Caches, for every `g`, the permutation of `X` and the permutation
/// `T(g⁻¹)` of `Y`, so that acting costs `O(|Y|)`.
#[derive(Clone, Debug)]
pub struct TwistedAction {
    hom: Arc<Homomorphism>,
    target_inverse: Vec<Vec<u32>>,
}

impl TwistedAction {
    pub fn new(hom: Arc<Homomorphism>) -> Self {
        let target_inverse = (0..hom.source().order())
            .map(|g| hom.image(g).inverse().images().to_vec())
            .collect();
        Self {
            hom,
            target_inverse,
        }
    }

    pub fn homomorphism(&self) -> &Arc<Homomorphism> {
        &self.hom
    }

    /// `|X|`.
    pub fn codomain_size(&self) -> usize {
        self.hom.source().degree()
    }

    /// `|Y|`.
    pub fn domain_size(&self) -> usize {
        self.hom.target().degree()
    }

    pub fn group_order(&self) -> usize {
        self.hom.source().order()
    }

    /// `g ∘ h ∘ T(g⁻¹)` for the element of `G` with index `g`.
    pub fn act(&self, g: usize, h: &Mapping) -> Mapping {
        let perm = self.hom.source().element(g);
        let tinv = &self.target_inverse[g];
        Mapping {
            values: tinv
                .iter()
                .map(|&y| perm.apply(h.values[y as usize]))
                .collect(),
        }
    }

    /// Orbit of `h` together with the size of its stabilizer.
    pub fn orbit_of(&self, h: &Mapping) -> Orbit {
        let mut members = BTreeSet::new();
        let mut stabilizer_size = 0;
        for g in 0..self.group_order() {
            let image = self.act(g, h);
            if &image == h {
                stabilizer_size += 1;
            }
            members.insert(image);
        }
        let orbit = Orbit {
            members: members.into_iter().collect(),
            stabilizer_size,
        };
        assert_eq!(
            orbit.stabilizer_size * orbit.members.len(),
            self.group_order(),
            "orbit-stabilizer relation failed"
        );
        orbit
    }

    /// Partition of all of `X^Y` into orbits, ordered by representative.
    pub fn all_orbits(&self, guard: u128) -> Result<Vec<Orbit>> {
        let (n, m) = (self.codomain_size(), self.domain_size());
        let size = function_count(n, m);
        if size > guard {
            return Err(GeneoError::DomainTooLarge { size, guard });
        }
        let size = size as usize;
        let mut seen = vec![false; size];
        let mut orbits = Vec::new();
        for code in 0..size {
            if seen[code] {
                continue;
            }
            let orbit = self.orbit_of(&decode(code, n, m));
            for member in &orbit.members {
                seen[encode(member, n)] = true;
            }
            orbits.push(orbit);
        }
        Ok(orbits)
    }

    /// Invariance check on the generators of `G`, which suffices by closure.
    pub fn is_permutant(&self, mu: &SignedMeasure) -> bool {
        if mu.codomain_size() != self.codomain_size() || mu.domain_size() != self.domain_size() {
            return false;
        }
        let gens = self.hom.source().generator_indices();
        mu.entries.iter().all(|(h, &value)| {
            gens.iter()
                .all(|&g| (mu.value(&self.act(g, h)) - value).abs() <= PERMUTANT_TOL)
        })
    }
}

/// An orbit of the twisted action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    /// Sorted lexicographically.
    pub members: Vec<Mapping>,
    pub stabilizer_size: usize,
}

impl Orbit {
    pub fn representative(&self) -> &Mapping {
        &self.members[0]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, h: &Mapping) -> bool {
        self.members.binary_search(h).is_ok()
    }
}

/// A finitely supported signed measure on `X^Y`; absent functions carry 0.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedMeasure {
    n: usize,
    m: usize,
    entries: BTreeMap<Mapping, f64>,
}

#[derive(Serialize, Deserialize)]
struct MeasureEntry {
    h: Vec<u32>,
    value: f64,
}

/// Wire form: `{"entries":[{"h":[…],"value":v},…]}`.
#[derive(Serialize, Deserialize)]
pub struct MeasureSpec {
    entries: Vec<MeasureEntry>,
}

impl SignedMeasure {
    /// The zero measure on functions from an `m`-set into an `n`-set.
    pub fn zero(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries(
        n: usize,
        m: usize,
        entries: impl IntoIterator<Item = (Mapping, f64)>,
    ) -> Result<Self> {
        let mut mu = Self::zero(n, m);
        for (h, v) in entries {
            mu.add(h, v)?;
        }
        Ok(mu)
    }

    /// Uniform value on every member of an orbit.
    pub fn on_orbit(n: usize, m: usize, orbit: &Orbit, value: f64) -> Self {
        Self {
            n,
            m,
            entries: orbit.members.iter().map(|h| (h.clone(), value)).collect(),
        }
    }

    pub fn codomain_size(&self) -> usize {
        self.n
    }

    pub fn domain_size(&self) -> usize {
        self.m
    }

    pub fn value(&self, h: &Mapping) -> f64 {
        self.entries.get(h).copied().unwrap_or(0.0)
    }

    pub fn add(&mut self, h: Mapping, value: f64) -> Result<()> {
        h.check(self.n, self.m)?;
        *self.entries.entry(h).or_insert(0.0) += value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mapping, f64)> {
        self.entries.iter().map(|(h, &v)| (h, v))
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn total_variation(&self) -> f64 {
        self.entries.values().map(|v| v.abs()).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            m: self.m,
            entries: self
                .entries
                .iter()
                .map(|(h, v)| (h.clone(), v * factor))
                .collect(),
        }
    }

    /// `self + factor · other`.
    pub fn add_scaled(&self, other: &SignedMeasure, factor: f64) -> Result<Self> {
        if (self.n, self.m) != (other.n, other.m) {
            return Err(GeneoError::ShapeMismatch {
                expected: format!("measure on {}^{}", self.n, self.m),
                found: format!("measure on {}^{}", other.n, other.m),
            });
        }
        let mut out = self.clone();
        for (h, v) in &other.entries {
            *out.entries.entry(h.clone()).or_insert(0.0) += factor * v;
        }
        Ok(out)
    }

    /// Drops entries with `|value| ≤ tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        Self {
            n: self.n,
            m: self.m,
            entries: self
                .entries
                .iter()
                .filter(|(_, v)| v.abs() > tol)
                .map(|(h, v)| (h.clone(), *v))
                .collect(),
        }
    }

    pub fn to_spec(&self) -> MeasureSpec {
        MeasureSpec {
            entries: self
                .entries
                .iter()
                .map(|(h, &value)| MeasureEntry {
                    h: h.values.clone(),
                    value,
                })
                .collect(),
        }
    }

    pub fn from_spec(n: usize, m: usize, spec: MeasureSpec) -> Result<Self> {
        Self::from_entries(
            n,
            m,
            spec.entries.into_iter().map(|e| (Mapping::new(e.h), e.value)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Permutation, PermutationGroup};

    fn sym3_action() -> TwistedAction {
        let g = Arc::new(PermutationGroup::symmetric(3).unwrap());
        TwistedAction::new(Arc::new(Homomorphism::identity(g).unwrap()))
    }

    fn index_of(action: &TwistedAction, p: &Permutation) -> usize {
        action.homomorphism().source().index_of(p).unwrap()
    }

    #[test]
    fn identity_leaves_h_unchanged() {
        let a = sym3_action();
        let h = Mapping::new(vec![2, 0, 0]);
        assert_eq!(a.act(0, &h), h);
    }

    #[test]
    fn transposition_moves_constant() {
        let a = sym3_action();
        let g = index_of(&a, &Permutation::transposition(3, 0, 1).unwrap());
        assert_eq!(a.act(g, &Mapping::constant(3, 0)), Mapping::constant(3, 1));
    }

    #[test]
    fn action_axiom_holds() {
        let a = sym3_action();
        let group = a.homomorphism().source().clone();
        for code in 0..27 {
            let h = decode(code, 3, 3);
            for g1 in 0..6 {
                for g2 in 0..6 {
                    let lhs = a.act(g1, &a.act(g2, &h));
                    let rhs = a.act(group.multiply(g1, g2), &h);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn trivial_group_orbit_is_singleton() {
        let g = Arc::new(PermutationGroup::trivial(3).unwrap());
        let a = TwistedAction::new(Arc::new(Homomorphism::identity(g).unwrap()));
        let o = a.orbit_of(&Mapping::new(vec![1, 1, 2]));
        assert_eq!(o.len(), 1);
        assert_eq!(o.stabilizer_size, 1);
    }

    #[test]
    fn sym3_bijection_orbits() {
        let a = sym3_action();
        let id = a.orbit_of(&Mapping::new(vec![0, 1, 2]));
        assert_eq!((id.len(), id.stabilizer_size), (1, 6));
        let swap = a.orbit_of(&Mapping::new(vec![1, 0, 2]));
        assert_eq!((swap.len(), swap.stabilizer_size), (3, 2));
        let rot = a.orbit_of(&Mapping::new(vec![1, 2, 0]));
        assert_eq!((rot.len(), rot.stabilizer_size), (2, 3));
        assert_eq!(rot.representative(), &Mapping::new(vec![1, 2, 0]));
        assert!(rot.contains(&Mapping::new(vec![2, 0, 1])));
    }

    /// Independent brute-force partition: union h with act(g, h) for all g.
    fn brute_force_orbit_count(a: &TwistedAction, n: usize, m: usize) -> usize {
        let total = function_count(n, m) as usize;
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for code in 0..total {
            let h = decode(code, n, m);
            for g in 0..a.group_order() {
                let other = encode(&a.act(g, &h), n);
                let (ra, rb) = (find(&mut parent, code), find(&mut parent, other));
                parent[ra] = rb;
            }
        }
        (0..total).filter(|&c| find(&mut parent, c) == c).count()
    }

    #[test]
    fn all_orbits_partition_sym3() {
        let a = sym3_action();
        let orbits = a.all_orbits(DEFAULT_DOMAIN_GUARD).unwrap();
        // Frozen from the union-find oracle (Burnside also gives (27 + 3·3 + 2·3) / 6 = 7).
        assert_eq!(brute_force_orbit_count(&a, 3, 3), 7);
        assert_eq!(orbits.len(), 7);
        assert_eq!(orbits.iter().map(Orbit::len).sum::<usize>(), 27);
        let mut sizes: Vec<usize> = orbits.iter().map(Orbit::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 3, 3, 6, 6, 6]);
        let reps: Vec<_> = orbits.iter().map(|o| o.representative().clone()).collect();
        let mut sorted = reps.clone();
        sorted.sort();
        assert_eq!(reps, sorted);
        for o in &orbits {
            for h in &o.members {
                for g in 0..6 {
                    assert!(o.contains(&a.act(g, h)));
                }
            }
        }
    }

    #[test]
    fn single_point_codomain_has_one_orbit() {
        let gx = Arc::new(PermutationGroup::trivial(1).unwrap());
        let gy = Arc::new(PermutationGroup::cyclic(3).unwrap());
        let a = TwistedAction::new(Arc::new(Homomorphism::trivial(gx, gy).unwrap()));
        let orbits = a.all_orbits(DEFAULT_DOMAIN_GUARD).unwrap();
        assert_eq!(orbits.len(), 1);
        assert_eq!(orbits[0].members, vec![Mapping::constant(3, 0)]);
    }

    #[test]
    fn trivial_action_has_singleton_orbits() {
        let g = Arc::new(PermutationGroup::trivial(2).unwrap());
        let a = TwistedAction::new(Arc::new(Homomorphism::identity(g).unwrap()));
        assert_eq!(a.all_orbits(DEFAULT_DOMAIN_GUARD).unwrap().len(), 4);
    }

    #[test]
    fn domain_guard_trips() {
        let a = sym3_action();
        assert_eq!(
            a.all_orbits(26).unwrap_err(),
            GeneoError::DomainTooLarge { size: 27, guard: 26 }
        );
    }

    #[test]
    fn point_mass_off_fixed_point_is_not_permutant() {
        let a = sym3_action();
        let mu = SignedMeasure::from_entries(3, 3, [(Mapping::new(vec![1, 0, 2]), 1.0)]).unwrap();
        assert!(!a.is_permutant(&mu));
        let orbit = a.orbit_of(&Mapping::new(vec![1, 0, 2]));
        assert!(a.is_permutant(&SignedMeasure::on_orbit(3, 3, &orbit, 1.0)));
        assert!(a.is_permutant(&SignedMeasure::zero(3, 3)));
    }

    #[test]
    fn measure_rejects_ill_typed_functions() {
        let mut mu = SignedMeasure::zero(3, 2);
        assert!(mu.add(Mapping::new(vec![0, 3]), 1.0).is_err());
        assert!(mu.add(Mapping::new(vec![0, 1, 2]), 1.0).is_err());
    }

    #[test]
    fn measure_json_shape() {
        let mu = SignedMeasure::from_entries(3, 2, [(Mapping::new(vec![0, 2]), 0.5)]).unwrap();
        let json = serde_json::to_string(&mu.to_spec()).unwrap();
        assert_eq!(json, r#"{"entries":[{"h":[0,2],"value":0.5}]}"#);
        let back = SignedMeasure::from_spec(3, 2, serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, mu);
    }

    #[test]
    fn encoding_matches_lexicographic_order() {
        let mut prev = decode(0, 3, 4);
        for code in 1..81 {
            let h = decode(code, 3, 4);
            assert!(prev < h);
            assert_eq!(encode(&h, 3), code);
            prev = h;
        }
    }
}
