//! JSON and Graphviz DOT serialization of lattices, stability reports,
//! and selections.
//!
//! Exports carry names, not indices, so a diagram or a downstream
//! script never needs the original context file to be readable. All
//! output is byte-deterministic: LF endings, fixed field order, and
//! sigma rounded to a fixed number of significant digits (12 in JSON,
//! 4 in DOT labels, where it feeds a human-sized diagram).

use serde::Serialize;

use crate::context::FormalContext;
use crate::lattice::{Concept, ConceptLattice};
use crate::selection::SelectionResult;
use crate::stability::StabilityReport;

#[derive(Serialize)]
struct ConceptJson<'a> {
    id: usize,
    extent: Vec<&'a str>,
    intent: Vec<&'a str>,
}

#[derive(Serialize)]
struct LatticeJson<'a> {
    concepts: Vec<ConceptJson<'a>>,
    edges: Vec<[usize; 2]>,
}

#[derive(Serialize)]
struct StabilityEntryJson {
    id: usize,
    extent_size: usize,
    sigma: f64,
    generator_count: String,
}

#[derive(Serialize)]
struct SelectionJson<'a> {
    criterion: &'a crate::selection::SelectionCriterion,
    concepts: Vec<ConceptJson<'a>>,
    edges: Vec<[usize; 2]>,
}

fn concept_json<'a>(ctx: &'a FormalContext, c: &Concept) -> ConceptJson<'a> {
    ConceptJson {
        id: c.id,
        extent: c.extent.iter().map(|g| ctx.object_names()[g].as_str()).collect(),
        intent: c.intent.iter().map(|m| ctx.attribute_names()[m].as_str()).collect(),
    }
}

fn pretty(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// A bare JSON array of concepts with named extents and intents.
pub fn concepts_to_json(ctx: &FormalContext, concepts: &[Concept]) -> String {
    pretty(&concepts.iter().map(|c| concept_json(ctx, c)).collect::<Vec<_>>())
}

/// The full lattice: concepts plus cover edges as `[lower, upper]` id
/// pairs.
pub fn lattice_to_json(ctx: &FormalContext, lat: &ConceptLattice) -> String {
    pretty(&LatticeJson {
        concepts: lat.concepts().iter().map(|c| concept_json(ctx, c)).collect(),
        edges: lat.edges().map(|(l, u)| [l, u]).collect(),
    })
}

/// The stability report: one entry per concept in id order. Sigma is
/// rounded to 12 significant digits; the exact generator count rides
/// along as a decimal string because it routinely exceeds every fixed
/// integer width.
pub fn stability_to_json(report: &StabilityReport) -> String {
    let entries: Vec<StabilityEntryJson> = report
        .per_concept()
        .iter()
        .enumerate()
        .map(|(id, s)| StabilityEntryJson {
            id,
            extent_size: s.extent_size,
            sigma: round_significant(s.sigma, 12),
            generator_count: s.generator_count.to_string(),
        })
        .collect();
    pretty(&entries)
}

/// A selection in the lattice JSON schema plus its criterion
/// descriptor. Concepts appear in selection order; edges are the
/// induced transitive reduction.
pub fn selection_to_json(
    ctx: &FormalContext,
    lat: &ConceptLattice,
    sel: &SelectionResult,
) -> String {
    pretty(&SelectionJson {
        criterion: &sel.criterion,
        concepts: sel
            .selected_ids
            .iter()
            .map(|&id| concept_json(ctx, &lat.concepts()[id]))
            .collect(),
        edges: sel.induced_edges.iter().map(|&(l, u)| [l, u]).collect(),
    })
}

/// Graphviz DOT for a selection: one box per concept labeled
/// `intent names | extent size | σ=value`, edges pointing from lower
/// to upper concept, drawn bottom-to-top like a lattice diagram.
pub fn selection_to_dot(
    ctx: &FormalContext,
    lat: &ConceptLattice,
    sel: &SelectionResult,
    report: &StabilityReport,
) -> String {
    let mut out = String::from("digraph concepts {\n  rankdir=BT;\n  node [shape=box];\n");
    let mut ids = sel.selected_ids.clone();
    ids.sort_unstable();
    for id in ids {
        let c = &lat.concepts()[id];
        let intent = if c.intent.is_empty() {
            "∅".to_string()
        } else {
            c.intent
                .iter()
                .map(|m| ctx.attribute_names()[m].as_str())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let label = format!(
            "{} | {} | σ={}",
            intent,
            c.extent.len(),
            format_significant(report.sigma(id), 4)
        );
        out.push_str(&format!("  c{} [label=\"{}\"];\n", id, escape_dot(&label)));
    }
    for &(l, u) in &sel.induced_edges {
        out.push_str(&format!("  c{l} -> c{u};\n"));
    }
    out.push_str("}\n");
    out
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Formats `v` with `digits` significant digits as a plain decimal
/// string, trailing zeros trimmed: `(0.625, 4)` → `"0.625"`,
/// `(1.0, 4)` → `"1"`, `(1.0 / 3.0, 4)` → `"0.3333"`.
pub fn format_significant(v: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if v == 0.0 {
        return "0".into();
    }
    let negative = v < 0.0;
    // "6.250000e-1" style: mantissa digits plus a base-10 exponent.
    let sci = format!("{:.*e}", digits - 1, v.abs());
    let (mantissa, exp) = sci.split_once('e').expect("always has an exponent");
    let digits_only: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let exp: i64 = exp.parse().expect("integer exponent");

    let mut s = if exp >= digits_only.len() as i64 - 1 {
        // All digits land left of the decimal point.
        let mut t = digits_only.clone();
        t.extend(std::iter::repeat_n('0', (exp + 1 - digits_only.len() as i64) as usize));
        t
    } else if exp >= 0 {
        let split = (exp + 1) as usize;
        format!("{}.{}", &digits_only[..split], &digits_only[split..])
    } else {
        let zeros: String = std::iter::repeat_n('0', (-exp - 1) as usize).collect();
        format!("0.{zeros}{digits_only}")
    };
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if negative {
        s.insert(0, '-');
    }
    s
}

/// Rounds `v` to `digits` significant decimal digits, returning the
/// nearest double. Serializing the result prints at most `digits`
/// significant digits.
pub fn round_significant(v: f64, digits: usize) -> f64 {
    format_significant(v, digits).parse().expect("own formatting parses")
}
