//! Concept enumeration and the covering graph of the concept lattice.
//!
//! Concepts are enumerated with Close-by-One: a depth-first walk over
//! attribute indices with a lectic canonicity test, so every concept is
//! produced exactly once without a global dedup table. The walk fans
//! the first-level branches out across threads; the merged result is
//! re-sorted into the canonical order (descending lectic order of
//! intents), so parallelism never changes ids.
//!
//! The cover relation is then recovered by bucketing concepts by extent
//! size and, per concept, scanning strictly larger buckets for minimal
//! containing extents.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::bitset::BitSet;
use crate::context::{AttributeSet, FormalContext, ObjectSet};
use crate::error::{Error, Result};

/// One formal concept: a maximal extent/intent pair. `id` is the
/// position in the canonical enumeration order; the bottom concept is
/// always id 0 and the top concept is always the last id.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Concept {
    pub id: usize,
    pub extent: ObjectSet,
    pub intent: AttributeSet,
}

/// Tunables for enumeration.
#[derive(Clone, Debug)]
pub struct LatticeOptions {
    /// Hard cap on the number of concepts; enumeration aborts with
    /// [`Error::CapacityExceeded`] beyond it. Lattices are exponential
    /// in the worst case, so unbounded growth is never silent.
    pub max_concepts: usize,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        LatticeOptions {
            max_concepts: 10_000_000,
        }
    }
}

/// Enumerates every concept of `ctx` in canonical order with default
/// options.
pub fn enumerate_concepts(ctx: &FormalContext) -> Result<Vec<Concept>> {
    enumerate_concepts_with(ctx, &LatticeOptions::default())
}

/// Enumerates every concept of `ctx` in canonical order.
///
/// The order is descending lectic order of intents, which places the
/// bottom concept (intent M) first and the top concept (the smallest
/// intent) last. Output is deterministic regardless of thread count.
pub fn enumerate_concepts_with(
    ctx: &FormalContext,
    options: &LatticeOptions,
) -> Result<Vec<Concept>> {
    let m = ctx.attribute_count();
    let limit = options.max_concepts;
    let counter = AtomicUsize::new(0);

    // Root of the CbO tree: the top concept (G, G').
    let root_extent = BitSet::full(ctx.object_count());
    let root_intent = ctx.derive_extent_bits(&root_extent);
    bump(&counter, limit)?;

    // First-level branches are independent; deeper levels stay
    // sequential per branch, which is plenty of parallelism because
    // branch subtree sizes vary smoothly.
    let branches: Vec<Vec<(BitSet, BitSet)>> = (0..m)
        .into_par_iter()
        .filter(|&j| !root_intent.contains(j))
        .map(|j| {
            let mut found = Vec::new();
            descend(ctx, &root_extent, &root_intent, j, &mut found, &counter, limit)?;
            Ok(found)
        })
        .collect::<Result<_>>()?;

    let mut pairs: Vec<(BitSet, BitSet)> = vec![(root_extent, root_intent)];
    pairs.extend(branches.into_iter().flatten());
    pairs.sort_by(|x, y| y.1.lectic_cmp(&x.1));
    debug_assert!(pairs.windows(2).all(|w| w[0].1 != w[1].1));

    Ok(pairs
        .into_iter()
        .enumerate()
        .map(|(id, (extent, intent))| Concept {
            id,
            extent: ObjectSet::from_bits(extent),
            intent: AttributeSet::from_bits(intent),
        })
        .collect())
}

/// Tries one CbO branch: extend `intent` with attribute `j`, keep the
/// result only if it passes the canonicity test, then recurse on later
/// attributes.
fn descend(
    ctx: &FormalContext,
    extent: &BitSet,
    intent: &BitSet,
    j: usize,
    found: &mut Vec<(BitSet, BitSet)>,
    counter: &AtomicUsize,
    limit: usize,
) -> Result<()> {
    let mut child_extent = extent.clone();
    child_extent.intersect_with(ctx.col_bits(j));
    let child_intent = ctx.derive_extent_bits(&child_extent);
    // Canonical iff closing did not sneak in an attribute before j.
    if !child_intent.eq_below(intent, j) {
        return Ok(());
    }
    bump(counter, limit)?;
    for next in j + 1..ctx.attribute_count() {
        if !child_intent.contains(next) {
            descend(ctx, &child_extent, &child_intent, next, found, counter, limit)?;
        }
    }
    found.push((child_extent, child_intent));
    Ok(())
}

fn bump(counter: &AtomicUsize, limit: usize) -> Result<()> {
    if counter.fetch_add(1, Ordering::Relaxed) >= limit {
        Err(Error::CapacityExceeded {
            limit,
            enumerated: counter.load(Ordering::Relaxed),
        })
    } else {
        Ok(())
    }
}

/// The concept lattice: all concepts plus the covering (Hasse) graph.
#[derive(Clone, Debug)]
pub struct ConceptLattice {
    concepts: Vec<Concept>,
    upper: Vec<Vec<usize>>,
    lower: Vec<Vec<usize>>,
    top_id: usize,
    bottom_id: usize,
}

impl ConceptLattice {
    /// Enumerates `ctx` and builds the covering graph in one step.
    pub fn from_context(ctx: &FormalContext) -> Result<Self> {
        build_cover_graph(ctx, enumerate_concepts(ctx)?)
    }

    /// Same, with explicit enumeration options.
    pub fn from_context_with(ctx: &FormalContext, options: &LatticeOptions) -> Result<Self> {
        build_cover_graph(ctx, enumerate_concepts_with(ctx, options)?)
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn concept(&self, id: usize) -> Result<&Concept> {
        self.concepts.get(id).ok_or(Error::UnknownConceptId(id))
    }

    /// Ids of the concepts immediately above `id`, ascending.
    pub fn upper_neighbors(&self, id: usize) -> &[usize] {
        &self.upper[id]
    }

    /// Ids of the concepts immediately below `id`, ascending.
    pub fn lower_neighbors(&self, id: usize) -> &[usize] {
        &self.lower[id]
    }

    /// Id of the top concept (G, G').
    pub fn top_id(&self) -> usize {
        self.top_id
    }

    /// Id of the bottom concept (M', M).
    pub fn bottom_id(&self) -> usize {
        self.bottom_id
    }

    /// All cover edges as `(lower id, upper id)` pairs, ordered by
    /// lower id then upper id.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.upper
            .iter()
            .enumerate()
            .flat_map(|(c, ups)| ups.iter().map(move |&u| (c, u)))
    }

    pub fn edge_count(&self) -> usize {
        self.upper.iter().map(Vec::len).sum()
    }

    /// Every concept strictly below `id` in the lattice order, by
    /// reverse reachability over cover edges. Sorted ascending.
    pub fn subconcepts_of(&self, id: usize) -> Result<Vec<usize>> {
        if id >= self.concepts.len() {
            return Err(Error::UnknownConceptId(id));
        }
        let mut seen = vec![false; self.concepts.len()];
        let mut stack = vec![id];
        while let Some(c) = stack.pop() {
            for &down in &self.lower[c] {
                if !seen[down] {
                    seen[down] = true;
                    stack.push(down);
                }
            }
        }
        Ok((0..self.concepts.len()).filter(|&c| seen[c]).collect())
    }
}

/// Builds the covering graph over a complete concept set.
///
/// `concepts` must be the full canonical enumeration of `ctx`; passing
/// a proper subset is detected through top/bottom uniqueness and
/// reported as [`Error::InconsistentConceptSet`].
pub fn build_cover_graph(ctx: &FormalContext, concepts: Vec<Concept>) -> Result<ConceptLattice> {
    for (i, c) in concepts.iter().enumerate() {
        if c.id != i {
            return Err(Error::InconsistentConceptSet(format!(
                "concept at position {i} carries id {}",
                c.id
            )));
        }
        if c.extent.universe() != ctx.object_count()
            || c.intent.universe() != ctx.attribute_count()
        {
            return Err(Error::InconsistentConceptSet(format!(
                "concept {i} was built for a different context"
            )));
        }
    }

    // Bucket ids by extent cardinality, sizes ascending, ids ascending
    // within a bucket.
    let mut order: Vec<usize> = (0..concepts.len()).collect();
    order.sort_unstable_by_key(|&i| (concepts[i].extent.len(), i));
    let mut by_size: Vec<(usize, Vec<usize>)> = Vec::new();
    for &i in &order {
        let s = concepts[i].extent.len();
        match by_size.last_mut() {
            Some((size, bucket)) if *size == s => bucket.push(i),
            _ => by_size.push((s, vec![i])),
        }
    }

    let upper: Vec<Vec<usize>> = concepts
        .par_iter()
        .map(|c| {
            let mut covers: Vec<usize> = Vec::new();
            for (s, bucket) in &by_size {
                if *s <= c.extent.len() {
                    continue;
                }
                for &cand in bucket {
                    let ext = &concepts[cand].extent;
                    if c.extent.is_subset(ext)
                        && !covers.iter().any(|&u| concepts[u].extent.is_subset(ext))
                    {
                        covers.push(cand);
                    }
                }
            }
            covers.sort_unstable();
            covers
        })
        .collect();

    let mut lower = vec![Vec::new(); concepts.len()];
    for (c, ups) in upper.iter().enumerate() {
        for &u in ups {
            lower[u].push(c);
        }
    }

    let tops: Vec<usize> = (0..concepts.len()).filter(|&c| upper[c].is_empty()).collect();
    let bottoms: Vec<usize> = (0..concepts.len()).filter(|&c| lower[c].is_empty()).collect();
    // A complete finite lattice has exactly one maximum and one
    // minimum; anything else means the concept set has holes.
    let (top_id, bottom_id) = match (tops.as_slice(), bottoms.as_slice()) {
        ([t], [b]) => (*t, *b),
        _ => {
            return Err(Error::InconsistentConceptSet(format!(
                "{} maximal and {} minimal concepts; a complete lattice has exactly one of each",
                tops.len(),
                bottoms.len()
            )))
        }
    };

    Ok(ConceptLattice {
        concepts,
        upper,
        lower,
        top_id,
        bottom_id,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn toy() -> FormalContext {
        FormalContext::new(
            vec!["g1".into(), "g2".into(), "g3".into()],
            vec!["m1".into(), "m2".into(), "m3".into()],
            &[(0, 0), (0, 1), (1, 1), (1, 2), (2, 1)],
        )
        .unwrap()
    }

    fn names(ctx: &FormalContext, c: &Concept) -> (Vec<String>, Vec<String>) {
        (
            c.extent.iter().map(|g| ctx.object_names()[g].clone()).collect(),
            c.intent.iter().map(|m| ctx.attribute_names()[m].clone()).collect(),
        )
    }

    #[test]
    fn toy_concepts_in_canonical_order() {
        let ctx = toy();
        let concepts = enumerate_concepts(&ctx).unwrap();
        let listed: Vec<_> = concepts.iter().map(|c| names(&ctx, c)).collect();
        let s = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert_eq!(
            listed,
            vec![
                (s(&[]), s(&["m1", "m2", "m3"])),
                (s(&["g1"]), s(&["m1", "m2"])),
                (s(&["g2"]), s(&["m2", "m3"])),
                (s(&["g1", "g2", "g3"]), s(&["m2"])),
            ]
        );
    }

    #[test]
    fn toy_cover_edges() {
        let ctx = toy();
        let lat = ConceptLattice::from_context(&ctx).unwrap();
        let edges: Vec<_> = lat.edges().collect();
        assert_eq!(edges, vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(lat.bottom_id(), 0);
        assert_eq!(lat.top_id(), 3);
    }

    #[test]
    fn empty_relation_two_by_two() {
        let ctx = FormalContext::new(
            vec!["g1".into(), "g2".into()],
            vec!["m1".into(), "m2".into()],
            &[],
        )
        .unwrap();
        let lat = ConceptLattice::from_context(&ctx).unwrap();
        assert_eq!(lat.len(), 2);
        assert!(lat.concepts()[0].extent.is_empty());
        assert_eq!(lat.concepts()[0].intent.len(), 2);
        assert_eq!(lat.concepts()[1].extent.len(), 2);
        assert!(lat.concepts()[1].intent.is_empty());
        assert_eq!(lat.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn full_one_by_one_has_single_concept() {
        // Every subset of {g} closes to {g}, so top and bottom
        // coincide and the lattice is a single point.
        let ctx =
            FormalContext::new(vec!["g".into()], vec!["m".into()], &[(0, 0)]).unwrap();
        let lat = ConceptLattice::from_context(&ctx).unwrap();
        assert_eq!(lat.len(), 1);
        assert_eq!(lat.edge_count(), 0);
        assert_eq!(lat.top_id(), lat.bottom_id());
    }

    #[test]
    fn empty_context_has_single_concept() {
        let ctx = FormalContext::new(vec![], vec![], &[]).unwrap();
        let lat = ConceptLattice::from_context(&ctx).unwrap();
        assert_eq!(lat.len(), 1);
        assert_eq!(lat.edge_count(), 0);
    }

    /// Staircase context: object i carries attributes 0..=i.
    fn staircase(n: usize, with_empty_row: bool) -> FormalContext {
        let mut objects: Vec<String> = Vec::new();
        let mut pairs = Vec::new();
        if with_empty_row {
            objects.push("g0".into());
        }
        for i in 0..n {
            let g = objects.len();
            objects.push(format!("g{}", i + 1));
            for a in 0..=i {
                pairs.push((g, a));
            }
        }
        let attributes = (0..n).map(|a| format!("m{}", a + 1)).collect();
        FormalContext::new(objects, attributes, &pairs).unwrap()
    }

    #[test]
    fn staircase_closures_form_a_chain() {
        // Without an all-empty row the bottom is ({g4}, M): 4 concepts
        // in a chain. Adding an object with no attributes frees the
        // empty extent and stretches the chain to 5.
        let lat = ConceptLattice::from_context(&staircase(4, false)).unwrap();
        assert_eq!(lat.len(), 4);
        assert_eq!(lat.edge_count(), 3);
        let lat = ConceptLattice::from_context(&staircase(4, true)).unwrap();
        assert_eq!(lat.len(), 5);
        assert_eq!(lat.edge_count(), 4);
        // A chain covers one concept per non-top element.
        assert!((0..lat.len()).all(|c| lat.upper_neighbors(c).len() <= 1));
    }

    #[test]
    fn subconcept_queries() {
        let lat = ConceptLattice::from_context(&toy()).unwrap();
        assert_eq!(lat.subconcepts_of(3).unwrap(), vec![0, 1, 2]);
        assert_eq!(lat.subconcepts_of(0).unwrap(), Vec::<usize>::new());
        assert_eq!(lat.subconcepts_of(1).unwrap(), vec![0]);
        assert!(matches!(
            lat.subconcepts_of(4),
            Err(Error::UnknownConceptId(4))
        ));
    }

    #[test]
    fn capacity_limit_is_enforced() {
        // The contranominal scale (g_i lacks exactly m_i) has 2^n
        // concepts; n = 5 gives 32, well past a limit of 10.
        let n = 5;
        let objects = (0..n).map(|i| format!("g{i}")).collect();
        let attributes = (0..n).map(|i| format!("m{i}")).collect();
        let mut pairs = Vec::new();
        for g in 0..n {
            for a in 0..n {
                if g != a {
                    pairs.push((g, a));
                }
            }
        }
        let ctx = FormalContext::new(objects, attributes, &pairs).unwrap();
        let err = enumerate_concepts_with(&ctx, &LatticeOptions { max_concepts: 10 });
        assert!(matches!(err, Err(Error::CapacityExceeded { limit: 10, .. })));
        assert_eq!(enumerate_concepts(&ctx).unwrap().len(), 32);
    }

    #[test]
    fn incomplete_concept_sets_are_rejected() {
        let ctx = toy();
        let mut concepts = enumerate_concepts(&ctx).unwrap();
        concepts.remove(0); // drop the bottom
        for (i, c) in concepts.iter_mut().enumerate() {
            c.id = i;
        }
        assert!(matches!(
            build_cover_graph(&ctx, concepts),
            Err(Error::InconsistentConceptSet(_))
        ));
    }

    #[test]
    fn misnumbered_ids_are_rejected() {
        let ctx = toy();
        let mut concepts = enumerate_concepts(&ctx).unwrap();
        concepts.swap(1, 2);
        assert!(matches!(
            build_cover_graph(&ctx, concepts),
            Err(Error::InconsistentConceptSet(_))
        ));
    }

    /// All concepts by exhaustive closure of every object subset.
    fn brute_force_concepts(ctx: &FormalContext) -> BTreeSet<(Vec<usize>, Vec<usize>)> {
        let n = ctx.object_count();
        let mut out = BTreeSet::new();
        for mask in 0u32..1 << n {
            let a = ctx
                .objects_from_indices((0..n).filter(|i| mask >> i & 1 == 1))
                .unwrap();
            let intent = ctx.derive_objects(&a);
            let extent = ctx.derive_attributes(&intent);
            out.insert((extent.iter().collect(), intent.iter().collect()));
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_brute_force_enumeration(ctx in crate::context::tests::arb_context()) {
            let concepts = enumerate_concepts(&ctx).unwrap();
            let got: BTreeSet<_> = concepts
                .iter()
                .map(|c| (c.extent.iter().collect::<Vec<_>>(), c.intent.iter().collect::<Vec<_>>()))
                .collect();
            prop_assert_eq!(got.len(), concepts.len()); // no duplicates
            prop_assert_eq!(got, brute_force_concepts(&ctx));
        }

        #[test]
        fn ids_follow_descending_lectic_intent_order(ctx in crate::context::tests::arb_context()) {
            let concepts = enumerate_concepts(&ctx).unwrap();
            for w in concepts.windows(2) {
                prop_assert_eq!(
                    w[0].intent.bits().lectic_cmp(w[1].intent.bits()),
                    std::cmp::Ordering::Greater
                );
            }
        }

        #[test]
        fn covers_equal_brute_force_transitive_reduction(ctx in crate::context::tests::arb_context()) {
            let lat = ConceptLattice::from_context(&ctx).unwrap();
            let cs = lat.concepts();
            let below = |x: &Concept, y: &Concept| x.extent.is_subset(&y.extent) && x.id != y.id;
            let mut expected = BTreeSet::new();
            for x in cs {
                for y in cs {
                    if below(x, y)
                        && !cs.iter().any(|z| below(x, z) && below(z, y))
                    {
                        expected.insert((x.id, y.id));
                    }
                }
            }
            prop_assert_eq!(lat.edges().collect::<BTreeSet<_>>(), expected);
        }

        #[test]
        fn extent_order_mirrors_intent_order(ctx in crate::context::tests::arb_context()) {
            let concepts = enumerate_concepts(&ctx).unwrap();
            for x in &concepts {
                for y in &concepts {
                    prop_assert_eq!(
                        x.extent.is_subset(&y.extent),
                        y.intent.is_subset(&x.intent)
                    );
                }
            }
        }

        #[test]
        fn enumeration_is_deterministic(ctx in crate::context::tests::arb_context()) {
            prop_assert_eq!(
                enumerate_concepts(&ctx).unwrap(),
                enumerate_concepts(&ctx).unwrap()
            );
        }
    }
}
