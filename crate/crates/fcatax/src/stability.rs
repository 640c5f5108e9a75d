//! The stability index of formal concepts.
//!
//! For a concept (A, B), stability is the fraction of subsets of the
//! extent that still generate the intent:
//!
//! ```text
//! σ(A, B) = |{C ⊆ A : C' = B}| / 2^|A|
//! ```
//!
//! A stable concept keeps its intent even when several objects are
//! dropped from its extent, so stability separates structural groups
//! from incidental ones.
//!
//! Two computations are provided. [`stability_bruteforce`] enumerates
//! all 2^|A| subsets and is the oracle for small extents. For whole
//! lattices, [`stability_all`] runs an exact dynamic program built on
//! the observation that every C ⊆ A derives to the intent of exactly
//! one subconcept of (A, B), so the generator counts N satisfy
//!
//! ```text
//! N(A, B) = 2^|A| − Σ N(D, E)   over all (D, E) < (A, B)
//! ```
//!
//! Counts are kept as unbounded integers (2^|A| overflows any fixed
//! width once |A| > 63). A double-precision recurrence runs alongside
//! as an independent cross-check:
//! σ(A,B) = 1 − Σ σ(D,E)·2^(|D|−|A|).

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::bitset::BitSet;
use crate::context::FormalContext;
use crate::error::{Error, Result};
use crate::lattice::{Concept, ConceptLattice};

/// Stability of a single concept.
#[derive(Clone, PartialEq, Debug)]
pub struct ConceptStability {
    /// |A|, the number of objects in the extent.
    pub extent_size: usize,
    /// N(A, B): how many subsets of the extent derive exactly to the
    /// intent. Always ≥ 1 because A itself does.
    pub generator_count: BigUint,
    /// generator_count / 2^extent_size, rounded to double precision.
    /// Underflows to 0.0 only when the true value drops below about
    /// 2^−1074, i.e. for extents far beyond a thousand objects; the
    /// exact ratio is always recoverable from `generator_count`.
    pub sigma: f64,
    /// The same value from the floating-point recurrence; kept
    /// separately so the two paths can be compared.
    pub sigma_float: f64,
}

/// Stability of every concept of one lattice, indexed by concept id.
#[derive(Clone, Debug)]
pub struct StabilityReport {
    per_concept: Vec<ConceptStability>,
}

impl StabilityReport {
    pub fn len(&self) -> usize {
        self.per_concept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_concept.is_empty()
    }

    pub fn get(&self, id: usize) -> Result<&ConceptStability> {
        self.per_concept.get(id).ok_or(Error::UnknownConceptId(id))
    }

    /// Entries in concept-id order.
    pub fn per_concept(&self) -> &[ConceptStability] {
        &self.per_concept
    }

    /// The double-precision sigma of one concept; panics on a bad id.
    pub fn sigma(&self, id: usize) -> f64 {
        self.per_concept[id].sigma
    }
}

/// Tunables for [`stability_all_with`].
#[derive(Clone, Debug)]
pub struct StabilityOptions {
    /// Lattices up to this many concepts keep one cached subconcept
    /// bitmask per concept (fast, O(n²) bits of memory). Larger
    /// lattices recompute reachability per concept instead, trading
    /// repeated cover-edge walks for bounded memory.
    pub downset_cache_limit: usize,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions {
            downset_cache_limit: 20_000,
        }
    }
}

/// Default cap on extent size for the brute-force path.
pub const BRUTEFORCE_EXTENT_CAP: usize = 20;

/// Computes stability of one concept by enumerating every subset of
/// its extent, with the default extent cap.
pub fn stability_bruteforce(ctx: &FormalContext, c: &Concept) -> Result<ConceptStability> {
    stability_bruteforce_with(ctx, c, BRUTEFORCE_EXTENT_CAP)
}

/// Brute-force stability with an explicit extent cap. Cost is
/// 2^|A| derivations, so the cap guards against runaway calls; larger
/// concepts are what [`stability_all`] is for.
pub fn stability_bruteforce_with(
    ctx: &FormalContext,
    c: &Concept,
    cap: usize,
) -> Result<ConceptStability> {
    let members: Vec<usize> = c.extent.iter().collect();
    let k = members.len();
    if k > cap {
        return Err(Error::ExtentTooLarge { size: k, cap });
    }
    let intent = ctx.derive_extent_bits(c.extent.bits());
    let mut generators = 0u64;
    for mask in 0u64..1 << k {
        let subset = BitSet::from_indices(
            ctx.object_count(),
            members
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &g)| g),
        );
        if ctx.derive_extent_bits(&subset) == intent {
            generators += 1;
        }
    }
    let count = BigUint::from(generators);
    let sigma = ratio_to_f64(&count, k);
    Ok(ConceptStability {
        extent_size: k,
        generator_count: count,
        sigma,
        sigma_float: sigma,
    })
}

/// Exact stability for every concept of a complete lattice, default
/// options.
pub fn stability_all(ctx: &FormalContext, lat: &ConceptLattice) -> StabilityReport {
    stability_all_with(ctx, lat, &StabilityOptions::default())
}

/// Exact stability for every concept of a complete lattice.
///
/// Concepts are processed in ascending extent-size order (ties by id),
/// which finishes every proper subconcept before the concepts that
/// depend on it. Within one size class the DP rows are independent and
/// run in parallel; the result does not depend on thread count.
pub fn stability_all_with(
    ctx: &FormalContext,
    lat: &ConceptLattice,
    options: &StabilityOptions,
) -> StabilityReport {
    let _ = ctx; // the DP needs only extent sizes and cover edges
    let n = lat.len();
    let sizes: Vec<usize> = lat.concepts().iter().map(|c| c.extent.len()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by_key(|&c| (sizes[c], c));

    let mut counts: Vec<BigUint> = vec![BigUint::zero(); n];
    let mut sigma_floats: Vec<f64> = vec![0.0; n];

    if n <= options.downset_cache_limit {
        // Cached path: carry one bitmask of strict subconcepts per
        // concept, built by unioning the masks of the lower neighbors.
        let mut downsets: Vec<BitSet> = vec![BitSet::empty(0); n];
        for &c in &order {
            let mut down = BitSet::empty(n);
            for &d in lat.lower_neighbors(c) {
                down.insert(d);
                down.union_with(&downsets[d]);
            }
            let (count, sf) = dp_cell(sizes[c], down.ones(), &sizes, &counts, &sigma_floats);
            counts[c] = count;
            sigma_floats[c] = sf;
            downsets[c] = down;
        }
    } else {
        // Memory-bounded path: per concept, rediscover the downset by
        // walking cover edges. All concepts of one extent size only
        // depend on strictly smaller ones, so each size class runs in
        // parallel against the finished prefix.
        for class in order.chunk_by(|&a, &b| sizes[a] == sizes[b]) {
            let solved: Vec<(usize, BigUint, f64)> = class
                .par_iter()
                .map(|&c| {
                    let mut seen = BitSet::empty(n);
                    let mut stack: Vec<usize> = lat.lower_neighbors(c).to_vec();
                    for &d in &stack {
                        seen.insert(d);
                    }
                    while let Some(d) = stack.pop() {
                        for &e in lat.lower_neighbors(d) {
                            if !seen.contains(e) {
                                seen.insert(e);
                                stack.push(e);
                            }
                        }
                    }
                    let (count, sf) =
                        dp_cell(sizes[c], seen.ones(), &sizes, &counts, &sigma_floats);
                    (c, count, sf)
                })
                .collect();
            for (c, count, sf) in solved {
                counts[c] = count;
                sigma_floats[c] = sf;
            }
        }
    }

    let per_concept = (0..n)
        .map(|c| ConceptStability {
            extent_size: sizes[c],
            sigma: ratio_to_f64(&counts[c], sizes[c]),
            sigma_float: sigma_floats[c],
            generator_count: std::mem::take(&mut counts[c]),
        })
        .collect();
    StabilityReport { per_concept }
}

/// One DP row: subtract the finished subconcept counts from 2^|A|, and
/// accumulate the floating recurrence alongside.
fn dp_cell(
    size: usize,
    downset: impl Iterator<Item = usize>,
    sizes: &[usize],
    counts: &[BigUint],
    sigma_floats: &[f64],
) -> (BigUint, f64) {
    let mut spoken_for = BigUint::zero();
    let mut weighted = 0.0f64;
    for d in downset {
        spoken_for += &counts[d];
        weighted += sigma_floats[d] * 2f64.powi(sizes[d] as i32 - size as i32);
    }
    let count = (BigUint::one() << size) - spoken_for;
    (count, 1.0 - weighted)
}

/// Checks the global counting identity Σ N(c) = 2^|G|: every subset of
/// G derives to exactly one intent, so the generator counts partition
/// the powerset. A `false` return means the lattice or the DP is
/// broken.
pub fn verify_counting_identity(report: &StabilityReport, ctx: &FormalContext) -> bool {
    let total: BigUint = report
        .per_concept
        .iter()
        .map(|s| &s.generator_count)
        .sum();
    total == BigUint::one() << ctx.object_count()
}

/// Rounds the exact ratio `count / 2^exp` to double precision using
/// the top 64 bits of the numerator.
fn ratio_to_f64(count: &BigUint, exp: usize) -> f64 {
    let bits = count.bits();
    if bits == 0 {
        return 0.0;
    }
    if bits <= 64 {
        count.to_u64().expect("fits in 64 bits") as f64 * 2f64.powi(-(exp as i32))
    } else {
        let shift = bits - 64;
        let top = (count >> shift).to_u64().expect("shifted to 64 bits") as f64;
        top * 2f64.powi(shift as i32 - exp as i32)
    }
}
