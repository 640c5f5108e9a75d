//! Extracting readable taxonomies from a concept lattice.
//!
//! Whole lattices of real usage data run to tens of thousands of
//! concepts; what gets looked at is a selection: an iceberg (every
//! concept whose extent passes a size threshold), the top k concepts
//! by extent or by stability, or everything above a stability
//! threshold. A [`SelectionResult`] carries the chosen ids plus the
//! edges of the selection viewed as an order of its own — the
//! transitive reduction of the lattice order restricted to the
//! selected concepts — so a 25-concept diagram stays connected the way
//! the full lattice is.

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::lattice::ConceptLattice;
use crate::stability::StabilityReport;

/// What produced a selection; serialized into exports so a diagram
/// records how it was made.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SelectionCriterion {
    /// All concepts with extent size ≥ `min_extent`.
    Iceberg { min_extent: usize },
    /// The `k` concepts of largest extent.
    TopKExtent { k: usize },
    /// The `k` concepts of largest stability.
    TopKStability { k: usize, exclude_extremes: bool },
    /// All concepts with stability strictly above `theta`.
    StabilityThreshold { theta: f64 },
}

/// A subset of a lattice's concepts together with the covering edges
/// of the induced order.
#[derive(Clone, PartialEq, Debug)]
pub struct SelectionResult {
    pub criterion: SelectionCriterion,
    /// Selected ids: rank order for the top-k criteria, ascending id
    /// for the set-shaped ones.
    pub selected_ids: Vec<usize>,
    /// Transitive reduction of the lattice order restricted to
    /// `selected_ids`, as `(lower id, upper id)` pairs, sorted.
    pub induced_edges: Vec<(usize, usize)>,
    /// Size of the lattice the selection came from, so results from
    /// different lattices cannot be compared by accident.
    pub lattice_size: usize,
}

impl SelectionResult {
    pub fn is_empty(&self) -> bool {
        self.selected_ids.is_empty()
    }

    pub fn len(&self) -> usize {
        self.selected_ids.len()
    }
}

/// Overlap between two selections of the same lattice.
#[derive(Clone, PartialEq, Debug)]
pub struct SelectionOverlap {
    /// |A ∩ B| / |A ∪ B|; two empty selections count as identical
    /// (jaccard 1.0).
    pub jaccard: f64,
    /// Ids selected by both, ascending.
    pub common: Vec<usize>,
}

/// Selects every concept whose extent has at least `min_extent`
/// objects — the iceberg of the lattice.
///
/// Extents only grow upward, so the result is an order filter: with
/// any concept, all of its superconcepts are selected too.
pub fn iceberg_filter(lat: &ConceptLattice, min_extent: usize) -> SelectionResult {
    let selected: Vec<usize> = lat
        .concepts()
        .iter()
        .filter(|c| c.extent.len() >= min_extent)
        .map(|c| c.id)
        .collect();
    finish(lat, SelectionCriterion::Iceberg { min_extent }, selected)
}

/// Selects the `k` concepts of largest extent, ties broken by
/// ascending id. Unlike an iceberg this need not be an order filter:
/// the cut can split a size class.
pub fn top_k_extent(lat: &ConceptLattice, k: usize) -> SelectionResult {
    let mut ranked: Vec<usize> = (0..lat.len()).collect();
    ranked.sort_by_key(|&c| (std::cmp::Reverse(lat.concepts()[c].extent.len()), c));
    ranked.truncate(k);
    finish(lat, SelectionCriterion::TopKExtent { k }, ranked)
}

/// Selects the `k` concepts of largest stability, ties broken by
/// ascending id.
///
/// With `exclude_extremes` the degenerate extremes are left out before
/// ranking: the bottom concept always (every subset of its extent
/// derives to the full attribute set, so its σ is 1.0 by construction
/// and carries no information), and the top concept when its intent is
/// empty (a group defined by no shared attribute at all).
pub fn top_k_stability(
    lat: &ConceptLattice,
    report: &StabilityReport,
    k: usize,
    exclude_extremes: bool,
) -> SelectionResult {
    assert_eq!(
        report.len(),
        lat.len(),
        "stability report and lattice describe different concept sets"
    );
    let mut ranked: Vec<usize> = (0..lat.len())
        .filter(|&c| {
            if !exclude_extremes {
                return true;
            }
            if c == lat.bottom_id() {
                return false;
            }
            !(c == lat.top_id() && lat.concepts()[c].intent.is_empty())
        })
        .collect();
    ranked.sort_by(|&a, &b| {
        report
            .sigma(b)
            .total_cmp(&report.sigma(a))
            .then(a.cmp(&b))
    });
    ranked.truncate(k);
    finish(
        lat,
        SelectionCriterion::TopKStability {
            k,
            exclude_extremes,
        },
        ranked,
    )
}

/// Selects every concept whose stability strictly exceeds `theta`.
pub fn stability_threshold_filter(
    lat: &ConceptLattice,
    report: &StabilityReport,
    theta: f64,
) -> SelectionResult {
    assert_eq!(
        report.len(),
        lat.len(),
        "stability report and lattice describe different concept sets"
    );
    let selected: Vec<usize> = (0..lat.len()).filter(|&c| report.sigma(c) > theta).collect();
    finish(
        lat,
        SelectionCriterion::StabilityThreshold { theta },
        selected,
    )
}

/// Jaccard overlap of two selections from the same lattice.
pub fn selection_overlap(a: &SelectionResult, b: &SelectionResult) -> Result<SelectionOverlap> {
    if a.lattice_size != b.lattice_size {
        return Err(Error::MismatchedLattice {
            left: a.lattice_size,
            right: b.lattice_size,
        });
    }
    let to_bits = |sel: &SelectionResult| {
        let mut bits = BitSet::empty(sel.lattice_size);
        for &id in &sel.selected_ids {
            bits.insert(id);
        }
        bits
    };
    let set_a = to_bits(a);
    let set_b = to_bits(b);
    let mut inter = set_a.clone();
    inter.intersect_with(&set_b);
    let mut union = set_a;
    union.union_with(&set_b);
    let jaccard = if union.is_empty() {
        1.0
    } else {
        inter.len() as f64 / union.len() as f64
    };
    Ok(SelectionOverlap {
        jaccard,
        common: inter.ones().collect(),
    })
}

/// Builds the result record: computes the induced edges and freezes
/// the id list.
fn finish(
    lat: &ConceptLattice,
    criterion: SelectionCriterion,
    selected: Vec<usize>,
) -> SelectionResult {
    SelectionResult {
        induced_edges: induced_edges(lat, &selected),
        lattice_size: lat.len(),
        criterion,
        selected_ids: selected,
    }
}

/// Transitive reduction of the lattice order restricted to `selected`.
///
/// For each selected concept, walk upward over cover edges, stopping
/// at the first selected concept on each path; the minimal concepts
/// among those reached are exactly its upper covers in the induced
/// order. (Any selected concept minimal above `c` is reachable by some
/// path avoiding other selected ones, because an intermediate selected
/// concept would contradict its minimality.)
fn induced_edges(lat: &ConceptLattice, selected: &[usize]) -> Vec<(usize, usize)> {
    let mut in_selection = BitSet::empty(lat.len());
    for &id in selected {
        in_selection.insert(id);
    }
    let mut edges = Vec::new();
    for &c in selected {
        let mut seen = BitSet::empty(lat.len());
        let mut stack: Vec<usize> = Vec::new();
        let mut reached: Vec<usize> = Vec::new();
        for &u in lat.upper_neighbors(c) {
            seen.insert(u);
            stack.push(u);
        }
        while let Some(v) = stack.pop() {
            if in_selection.contains(v) {
                reached.push(v);
                continue;
            }
            for &u in lat.upper_neighbors(v) {
                if !seen.contains(u) {
                    seen.insert(u);
                    stack.push(u);
                }
            }
        }
        let extent = |id: usize| &lat.concepts()[id].extent;
        for &u in &reached {
            let minimal = !reached
                .iter()
                .any(|&v| v != u && extent(v).is_subset(extent(u)));
            if minimal {
                edges.push((c, u));
            }
        }
    }
    edges.sort_unstable();
    edges
}
