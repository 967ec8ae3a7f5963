//! Finite sets, permutations, permutation groups built by closure, and
//! verified homomorphisms between them.
//!
//! Points of a set of size `n` are the indices `0..n`. Composition follows
//! the usual right-to-left convention: `a.compose(&b)` is `x ↦ a(b(x))`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeneoError, Result};

/// Default upper bound on the number of elements a closure may produce.
pub const DEFAULT_GROUP_GUARD: usize = 1_000_000;

/// Groups up to this order are checked exhaustively on all pairs.
const EXHAUSTIVE_PAIR_LIMIT: usize = 1_000;
const RANDOM_PAIR_CHECKS: usize = 10_000;

/// A finite set `{0, …, size-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteSet {
    size: usize,
}

impl FiniteSet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(GeneoError::EmptySet);
        }
        Ok(Self { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

/// A bijection of `0..n`, stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n as u32).collect(),
        }
    }

    pub fn from_images(image: Vec<u32>) -> Result<Self> {
        let n = image.len();
        if n == 0 {
            return Err(GeneoError::InvalidPermutation("empty image array".into()));
        }
        let mut seen = vec![false; n];
        for &v in &image {
            let v = v as usize;
            if v >= n {
                return Err(GeneoError::InvalidPermutation(format!(
                    "image {v} out of range for degree {n}"
                )));
            }
            if seen[v] {
                return Err(GeneoError::InvalidPermutation(format!(
                    "image {v} repeated"
                )));
            }
            seen[v] = true;
        }
        Ok(Self { image })
    }

    /// Permutation of `0..n` that cycles the listed points: `c[0] → c[1] → … → c[0]`.
    pub fn cycle(n: usize, points: &[u32]) -> Result<Self> {
        let mut image: Vec<u32> = (0..n as u32).collect();
        for (k, &p) in points.iter().enumerate() {
            let next = points[(k + 1) % points.len()];
            if p as usize >= n {
                return Err(GeneoError::InvalidPermutation(format!(
                    "cycle point {p} out of range for degree {n}"
                )));
            }
            image[p as usize] = next;
        }
        Self::from_images(image)
    }

    pub fn transposition(n: usize, a: u32, b: u32) -> Result<Self> {
        Self::cycle(n, &[a, b])
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    #[inline]
    pub fn apply(&self, point: u32) -> u32 {
        self.image[point as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.image
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            image: other.image.iter().map(|&x| self.image[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0u32; self.image.len()];
        for (x, &y) in self.image.iter().enumerate() {
            image[y as usize] = x as u32;
        }
        Permutation { image }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    /// Smallest `k ≥ 1` with `self^k = id`.
    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = self.compose(&p);
            k += 1;
        }
        k
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.image)
    }
}

/// A permutation group stored extensionally.
///
/// Elements are ordered breadth-first by generator word length, with ties
/// inside one level broken by lexicographic image array. Index 0 is always
/// the identity.
#[derive(Clone, Debug)]
pub struct PermutationGroup {
    carrier: FiniteSet,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    lookup: HashMap<Permutation, usize>,
    inverses: Vec<usize>,
}

impl PermutationGroup {
    /// Smallest group containing `generators`, with the default size guard.
    pub fn closure(carrier: FiniteSet, generators: Vec<Permutation>) -> Result<Self> {
        Self::closure_with_guard(carrier, generators, DEFAULT_GROUP_GUARD)
    }

    pub fn closure_with_guard(
        carrier: FiniteSet,
        generators: Vec<Permutation>,
        guard: usize,
    ) -> Result<Self> {
        let n = carrier.size();
        for g in &generators {
            if g.degree() != n {
                return Err(GeneoError::CarrierMismatch {
                    expected: n,
                    found: g.degree(),
                });
            }
        }
        let identity = Permutation::identity(n);
        let mut elements = vec![identity.clone()];
        let mut lookup = HashMap::new();
        lookup.insert(identity, 0usize);
        let mut level = vec![0usize];
        while !level.is_empty() {
            let mut fresh: Vec<Permutation> = Vec::new();
            for &e in &level {
                for s in &generators {
                    let candidate = s.compose(&elements[e]);
                    if !lookup.contains_key(&candidate) {
                        fresh.push(candidate);
                    }
                }
            }
            fresh.sort();
            fresh.dedup();
            level.clear();
            for p in fresh {
                if elements.len() >= guard {
                    return Err(GeneoError::GroupTooLarge { limit: guard });
                }
                lookup.insert(p.clone(), elements.len());
                level.push(elements.len());
                elements.push(p);
            }
        }
        let inverses = elements.iter().map(|e| lookup[&e.inverse()]).collect();
        Ok(Self {
            carrier,
            generators,
            elements,
            lookup,
            inverses,
        })
    }

    pub fn trivial(n: usize) -> Result<Self> {
        Self::closure(FiniteSet::new(n)?, Vec::new())
    }

    /// Cyclic group generated by the rotation `i ↦ i+1 mod n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        let carrier = FiniteSet::new(n)?;
        let shift = Permutation::from_images((0..n as u32).map(|i| (i + 1) % n as u32).collect())?;
        Self::closure(carrier, vec![shift])
    }

    /// Full symmetric group, generated by the transposition `(0 1)` and the
    /// rotation `i ↦ i+1 mod n`.
    pub fn symmetric(n: usize) -> Result<Self> {
        let carrier = FiniteSet::new(n)?;
        if n == 1 {
            return Self::closure(carrier, Vec::new());
        }
        let rotation =
            Permutation::from_images((0..n as u32).map(|i| (i + 1) % n as u32).collect())?;
        let swap = Permutation::transposition(n, 0, 1)?;
        Self::closure(carrier, vec![swap, rotation])
    }

    /// Product action of `rows × cols` on the cells of a `rows × cols` grid,
    /// cell `(i, j)` being point `i * cols + j`. Generators are the lifted
    /// row generators followed by the lifted column generators.
    pub fn grid_product(rows: &PermutationGroup, cols: &PermutationGroup) -> Result<Self> {
        let (m, n) = (rows.degree(), cols.degree());
        let carrier = FiniteSet::new(m * n)?;
        let mut generators = Vec::new();
        for k in rows.generators() {
            generators.push(lift_grid(k, &Permutation::identity(n)));
        }
        for k in cols.generators() {
            generators.push(lift_grid(&Permutation::identity(m), k));
        }
        Self::closure(carrier, generators)
    }

    pub fn carrier(&self) -> FiniteSet {
        self.carrier
    }

    pub fn degree(&self) -> usize {
        self.carrier.size()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, index: usize) -> &Permutation {
        &self.elements[index]
    }

    pub fn identity_index(&self) -> usize {
        0
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.lookup.get(p).copied()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.lookup.contains_key(p)
    }

    /// Index of `elements[a] ∘ elements[b]`.
    pub fn multiply(&self, a: usize, b: usize) -> usize {
        self.lookup[&self.elements[a].compose(&self.elements[b])]
    }

    pub fn inverse_index(&self, a: usize) -> usize {
        self.inverses[a]
    }

    /// Index of each generator inside `elements`.
    pub fn generator_indices(&self) -> Vec<usize> {
        self.generators.iter().map(|g| self.lookup[g]).collect()
    }

    /// Orbits of the group on its carrier, each sorted, ordered by smallest member.
    pub fn orbit_partition(&self) -> Vec<Vec<usize>> {
        orbits_of_generators(self.degree(), &self.generators)
    }

    /// True iff the orbit of point 0 is the whole carrier.
    pub fn is_transitive(&self) -> bool {
        let partition = self.orbit_partition();
        partition.len() == 1
    }

    pub fn to_spec(&self) -> GroupSpec {
        GroupSpec {
            carrier_size: self.degree(),
            generators: self.generators.iter().map(|g| g.images().to_vec()).collect(),
        }
    }
}

fn lift_grid(row: &Permutation, col: &Permutation) -> Permutation {
    let (m, n) = (row.degree(), col.degree());
    let mut image = vec![0u32; m * n];
    for i in 0..m {
        for j in 0..n {
            image[i * n + j] = row.apply(i as u32) * n as u32 + col.apply(j as u32);
        }
    }
    Permutation { image }
}

/// Orbits of the group generated by `generators` on `0..n`.
pub(crate) fn orbits_of_generators(n: usize, generators: &[Permutation]) -> Vec<Vec<usize>> {
    let mut block = vec![usize::MAX; n];
    let mut blocks = Vec::new();
    for start in 0..n {
        if block[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut members = vec![start];
        block[start] = id;
        let mut cursor = 0;
        while cursor < members.len() {
            let x = members[cursor] as u32;
            cursor += 1;
            for g in generators {
                let y = g.apply(x) as usize;
                if block[y] == usize::MAX {
                    block[y] = id;
                    members.push(y);
                }
            }
        }
        members.sort_unstable();
        blocks.push(members);
    }
    blocks
}

/// Wire form of a group: generators as 0-based image arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub carrier_size: usize,
    pub generators: Vec<Vec<u32>>,
}

impl GroupSpec {
    pub fn build(&self) -> Result<PermutationGroup> {
        self.build_with_guard(DEFAULT_GROUP_GUARD)
    }

    pub fn build_with_guard(&self, guard: usize) -> Result<PermutationGroup> {
        let carrier = FiniteSet::new(self.carrier_size)?;
        let generators = self
            .generators
            .iter()
            .map(|g| Permutation::from_images(g.clone()))
            .collect::<Result<Vec<_>>>()?;
        PermutationGroup::closure_with_guard(carrier, generators, guard)
    }
}

/// Wire form of a homomorphism: images of the source generators, in order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomomorphismSpec {
    pub gen_images: Vec<Vec<u32>>,
}

/// A verified homomorphism `T: G → K`, stored as a full table of element indices.
#[derive(Clone, Debug)]
pub struct Homomorphism {
    source: Arc<PermutationGroup>,
    target: Arc<PermutationGroup>,
    table: Vec<usize>,
}

impl Homomorphism {
    /// Extends `gen_images` (one per generator of `source`) along generator
    /// words and verifies the result is a well-defined homomorphism.
    pub fn build(
        source: Arc<PermutationGroup>,
        target: Arc<PermutationGroup>,
        gen_images: &[Permutation],
    ) -> Result<Self> {
        if gen_images.len() != source.generators().len() {
            return Err(GeneoError::InconsistentHomomorphism(format!(
                "{} generator images given for {} generators",
                gen_images.len(),
                source.generators().len()
            )));
        }
        let image_idx = gen_images
            .iter()
            .map(|p| {
                target.index_of(p).ok_or_else(|| {
                    GeneoError::InconsistentHomomorphism(format!(
                        "generator image {p:?} is not an element of the target group"
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let mut table = vec![usize::MAX; source.order()];
        table[source.identity_index()] = target.identity_index();
        for e in 0..source.order() {
            let te = table[e];
            debug_assert_ne!(te, usize::MAX, "closure order guarantees predecessors");
            for (s, &ts) in source.generators().iter().zip(&image_idx) {
                let product = source.index_of(&s.compose(source.element(e))).unwrap();
                let image = target.multiply(ts, te);
                match table[product] {
                    usize::MAX => table[product] = image,
                    existing if existing != image => {
                        return Err(GeneoError::InconsistentHomomorphism(format!(
                            "element {:?} reached with images {:?} and {:?}",
                            source.element(product),
                            target.element(existing),
                            target.element(image)
                        )));
                    }
                    _ => {}
                }
            }
        }
        let hom = Self {
            source,
            target,
            table,
        };
        hom.verify_multiplicative()?;
        Ok(hom)
    }

    pub fn from_spec(
        source: Arc<PermutationGroup>,
        target: Arc<PermutationGroup>,
        spec: &HomomorphismSpec,
    ) -> Result<Self> {
        let images = spec
            .gen_images
            .iter()
            .map(|g| Permutation::from_images(g.clone()))
            .collect::<Result<Vec<_>>>()?;
        for p in &images {
            if p.degree() != target.degree() {
                return Err(GeneoError::CarrierMismatch {
                    expected: target.degree(),
                    found: p.degree(),
                });
            }
        }
        Self::build(source, target, &images)
    }

    /// Identity homomorphism of a group onto itself.
    pub fn identity(group: Arc<PermutationGroup>) -> Result<Self> {
        let images = group.generators().to_vec();
        Self::build(group.clone(), group, &images)
    }

    /// The homomorphism sending every element to the identity of `target`.
    pub fn trivial(source: Arc<PermutationGroup>, target: Arc<PermutationGroup>) -> Result<Self> {
        let images = vec![Permutation::identity(target.degree()); source.generators().len()];
        Self::build(source, target, &images)
    }

    /// `T(k, k') = k` from `rows × cols` acting on grid cells (see
    /// [`PermutationGroup::grid_product`]) onto `rows` acting on row indices.
    pub fn grid_row_projection(rows: &PermutationGroup, cols: &PermutationGroup) -> Result<Self> {
        let grid = Arc::new(PermutationGroup::grid_product(rows, cols)?);
        let mut images = rows.generators().to_vec();
        images.extend(std::iter::repeat_n(
            Permutation::identity(rows.degree()),
            cols.generators().len(),
        ));
        Self::build(grid, Arc::new(rows.clone()), &images)
    }

    fn verify_multiplicative(&self) -> Result<()> {
        let g = &self.source;
        let check = |a: usize, b: usize| -> Result<()> {
            let lhs = self.table[g.multiply(a, b)];
            let rhs = self.target.multiply(self.table[a], self.table[b]);
            if lhs != rhs {
                return Err(GeneoError::InconsistentHomomorphism(format!(
                    "T(g1 g2) != T(g1) T(g2) for g1 = {:?}, g2 = {:?}",
                    g.element(a),
                    g.element(b)
                )));
            }
            Ok(())
        };
        if g.order() <= EXHAUSTIVE_PAIR_LIMIT {
            for a in 0..g.order() {
                for b in 0..g.order() {
                    check(a, b)?;
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9_7f4a_7c15);
            for _ in 0..RANDOM_PAIR_CHECKS {
                check(rng.gen_range(0..g.order()), rng.gen_range(0..g.order()))?;
            }
        }
        if self.table[g.identity_index()] != self.target.identity_index() {
            return Err(GeneoError::InconsistentHomomorphism(
                "identity not mapped to identity".into(),
            ));
        }
        Ok(())
    }

    pub fn source(&self) -> &Arc<PermutationGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<PermutationGroup> {
        &self.target
    }

    /// Index in the target group of `T(source[g])`.
    pub fn image_index(&self, g: usize) -> usize {
        self.table[g]
    }

    pub fn image(&self, g: usize) -> &Permutation {
        self.target.element(self.table[g])
    }

    pub fn to_spec(&self) -> HomomorphismSpec {
        HomomorphismSpec {
            gen_images: self
                .source
                .generator_indices()
                .into_iter()
                .map(|g| self.image(g).images().to_vec())
                .collect(),
        }
    }

    /// The image subgroup `T(G) ⊆ K`.
    pub fn image_group(&self) -> Result<PermutationGroup> {
        let mut gens: Vec<Permutation> = self
            .source
            .generator_indices()
            .into_iter()
            .map(|g| self.image(g).clone())
            .filter(|p| !p.is_identity())
            .collect();
        gens.sort();
        gens.dedup();
        PermutationGroup::closure(self.target.carrier(), gens)
    }

    /// Orbits of `T(G)` on the target carrier.
    pub fn target_orbits(&self) -> Vec<Vec<usize>> {
        let gens: Vec<Permutation> = self
            .source
            .generator_indices()
            .into_iter()
            .map(|g| self.image(g).clone())
            .collect();
        orbits_of_generators(self.target.degree(), &gens)
    }

    /// Whether `T(G)` acts transitively on the target carrier.
    pub fn is_target_transitive(&self) -> bool {
        self.target_orbits().len() == 1
    }

    /// Kernel size, used for reporting.
    pub fn kernel_order(&self) -> usize {
        let id = self.target.identity_index();
        self.table.iter().filter(|&&t| t == id).count()
    }
}
