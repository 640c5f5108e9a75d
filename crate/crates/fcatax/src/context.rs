//! Formal contexts and the derivation operators.
//!
//! A [`FormalContext`] is an immutable triple of objects, attributes, and
//! a binary incidence relation. The incidence is stored twice, as bitset
//! rows (object → attributes) and bitset columns (attribute → objects),
//! so both derivation directions intersect machine words. Everything in
//! this module is a pure function of its inputs and safe to call from
//! any number of threads.

use std::collections::HashSet;

use crate::bitset::{BitSet, Ones};
use crate::error::{Error, Result};

/// A set of objects of one context, as a bitmask over object indices.
///
/// The width of the mask equals the object count of the context the set
/// was created for, so a set can never reference an object outside it.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ObjectSet(BitSet);

/// A set of attributes of one context, as a bitmask over attribute
/// indices. Same bounds guarantee as [`ObjectSet`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AttributeSet(BitSet);

macro_rules! set_common {
    ($name:ident, $kind:literal) => {
        impl $name {
            pub(crate) fn from_bits(bits: BitSet) -> Self {
                $name(bits)
            }

            // Only one of the two instantiations uses this outside of
            // tests, hence the allow.
            #[allow(dead_code)]
            pub(crate) fn bits(&self) -> &BitSet {
                &self.0
            }

            /// Empty set over a universe of `universe` elements.
            pub fn empty(universe: usize) -> Self {
                $name(BitSet::empty(universe))
            }

            /// Full set over a universe of `universe` elements.
            pub fn full(universe: usize) -> Self {
                $name(BitSet::full(universe))
            }

            /// Builds a set from indices, rejecting any index outside the
            /// universe.
            pub fn from_indices(
                universe: usize,
                indices: impl IntoIterator<Item = usize>,
            ) -> Result<Self> {
                let mut bits = BitSet::empty(universe);
                for i in indices {
                    if i >= universe {
                        return Err(Error::IndexOutOfRange {
                            kind: $kind,
                            index: i,
                            limit: universe,
                        });
                    }
                    bits.insert(i);
                }
                Ok($name(bits))
            }

            /// Size of the universe this set ranges over.
            pub fn universe(&self) -> usize {
                self.0.width()
            }

            /// Number of members.
            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn contains(&self, index: usize) -> bool {
                self.0.contains(index)
            }

            /// Inserts `index`; panics if it lies outside the universe.
            pub fn insert(&mut self, index: usize) {
                self.0.insert(index);
            }

            pub fn remove(&mut self, index: usize) {
                self.0.remove(index);
            }

            pub fn is_subset(&self, other: &Self) -> bool {
                self.0.is_subset(&other.0)
            }

            /// Member indices in ascending order.
            pub fn iter(&self) -> Ones<'_> {
                self.0.ones()
            }
        }
    };
}

set_common!(ObjectSet, "object");
set_common!(AttributeSet, "attribute");

/// An immutable formal context: objects, attributes, and which object
/// has which attribute.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FormalContext {
    objects: Vec<String>,
    attributes: Vec<String>,
    rows: Vec<BitSet>,
    cols: Vec<BitSet>,
}

impl FormalContext {
    /// Builds a context from name lists and incidence pairs of
    /// `(object index, attribute index)`.
    ///
    /// Names must be unique within their list; duplicate incidence pairs
    /// are harmless. Duplicate rows or columns (distinct names, equal
    /// incidence) are permitted: no clarification or reduction is applied.
    pub fn new(
        objects: Vec<String>,
        attributes: Vec<String>,
        pairs: &[(usize, usize)],
    ) -> Result<Self> {
        check_unique(&objects, Error::DuplicateObjectName)?;
        check_unique(&attributes, Error::DuplicateAttributeName)?;
        let (n, m) = (objects.len(), attributes.len());
        let mut rows = vec![BitSet::empty(m); n];
        let mut cols = vec![BitSet::empty(n); m];
        for &(g, a) in pairs {
            if g >= n {
                return Err(Error::IndexOutOfRange {
                    kind: "object",
                    index: g,
                    limit: n,
                });
            }
            if a >= m {
                return Err(Error::IndexOutOfRange {
                    kind: "attribute",
                    index: a,
                    limit: m,
                });
            }
            rows[g].insert(a);
            cols[a].insert(g);
        }
        Ok(FormalContext {
            objects,
            attributes,
            rows,
            cols,
        })
    }

    /// Builds a context from one boolean row per object.
    pub fn from_bool_rows(
        objects: Vec<String>,
        attributes: Vec<String>,
        incidence: &[Vec<bool>],
    ) -> Result<Self> {
        if incidence.len() != objects.len() {
            return Err(Error::RowCountMismatch {
                expected: objects.len(),
                got: incidence.len(),
            });
        }
        let mut pairs = Vec::new();
        for (g, row) in incidence.iter().enumerate() {
            if row.len() != attributes.len() {
                return Err(Error::RowWidthMismatch {
                    row: g,
                    expected: attributes.len(),
                    got: row.len(),
                });
            }
            for (a, &set) in row.iter().enumerate() {
                if set {
                    pairs.push((g, a));
                }
            }
        }
        Self::new(objects, attributes, &pairs)
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attributes
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|n| n == name)
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|n| n == name)
    }

    pub fn incident(&self, object: usize, attribute: usize) -> bool {
        self.rows[object].contains(attribute)
    }

    /// Attributes of a single object.
    pub fn attributes_of(&self, object: usize) -> AttributeSet {
        AttributeSet(self.rows[object].clone())
    }

    /// Objects carrying a single attribute.
    pub fn objects_with(&self, attribute: usize) -> ObjectSet {
        ObjectSet(self.cols[attribute].clone())
    }

    pub fn empty_objects(&self) -> ObjectSet {
        ObjectSet::empty(self.objects.len())
    }

    pub fn full_objects(&self) -> ObjectSet {
        ObjectSet::full(self.objects.len())
    }

    pub fn empty_attributes(&self) -> AttributeSet {
        AttributeSet::empty(self.attributes.len())
    }

    pub fn full_attributes(&self) -> AttributeSet {
        AttributeSet::full(self.attributes.len())
    }

    pub fn objects_from_indices(&self, indices: impl IntoIterator<Item = usize>) -> Result<ObjectSet> {
        ObjectSet::from_indices(self.objects.len(), indices)
    }

    pub fn attributes_from_indices(
        &self,
        indices: impl IntoIterator<Item = usize>,
    ) -> Result<AttributeSet> {
        AttributeSet::from_indices(self.attributes.len(), indices)
    }

    /// Looks names up and builds the object set; unknown names are
    /// reported as out-of-range.
    pub fn objects_from_names<'a>(
        &self,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<ObjectSet> {
        let mut bits = BitSet::empty(self.objects.len());
        for name in names {
            match self.object_index(name) {
                Some(i) => bits.insert(i),
                None => {
                    return Err(Error::UnknownName {
                        kind: "object",
                        name: name.to_owned(),
                    })
                }
            }
        }
        Ok(ObjectSet(bits))
    }

    pub fn attributes_from_names<'a>(
        &self,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<AttributeSet> {
        let mut bits = BitSet::empty(self.attributes.len());
        for name in names {
            match self.attribute_index(name) {
                Some(i) => bits.insert(i),
                None => {
                    return Err(Error::UnknownName {
                        kind: "attribute",
                        name: name.to_owned(),
                    })
                }
            }
        }
        Ok(AttributeSet(bits))
    }

    /// The attributes common to every object of `a`. The empty object
    /// set derives to the full attribute set (nullary intersection).
    ///
    /// Panics if `a` was built for a context with a different object
    /// count; sets constructed through this context are always valid.
    pub fn derive_objects(&self, a: &ObjectSet) -> AttributeSet {
        AttributeSet(self.derive_extent_bits(&a.0))
    }

    /// The objects sharing every attribute of `b`; dual of
    /// [`derive_objects`](Self::derive_objects), same conventions.
    pub fn derive_attributes(&self, b: &AttributeSet) -> ObjectSet {
        ObjectSet(self.derive_intent_bits(&b.0))
    }

    /// Double derivation on the object side. The result is closed:
    /// extensive, idempotent, and monotone over `a`.
    pub fn close_objects(&self, a: &ObjectSet) -> ObjectSet {
        self.derive_attributes(&self.derive_objects(a))
    }

    /// True iff `a` and `b` derive to each other.
    pub fn is_concept(&self, a: &ObjectSet, b: &AttributeSet) -> bool {
        self.derive_objects(a) == *b && self.derive_attributes(b) == *a
    }

    pub(crate) fn col_bits(&self, attribute: usize) -> &BitSet {
        &self.cols[attribute]
    }

    pub(crate) fn derive_extent_bits(&self, extent: &BitSet) -> BitSet {
        assert_eq!(extent.width(), self.objects.len(), "object set from another context");
        let mut intent = BitSet::full(self.attributes.len());
        for g in extent.ones() {
            intent.intersect_with(&self.rows[g]);
        }
        intent
    }

    pub(crate) fn derive_intent_bits(&self, intent: &BitSet) -> BitSet {
        assert_eq!(intent.width(), self.attributes.len(), "attribute set from another context");
        let mut extent = BitSet::full(self.objects.len());
        for m in intent.ones() {
            extent.intersect_with(&self.cols[m]);
        }
        extent
    }
}

fn check_unique(names: &[String], err: fn(String) -> Error) -> Result<()> {
    let mut seen = HashSet::with_capacity(names.len());
    for name in names {
        if !seen.insert(name.as_str()) {
            return Err(err(name.clone()));
        }
    }
    Ok(())
}
