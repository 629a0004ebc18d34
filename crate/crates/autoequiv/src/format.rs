//! The JSON file format of the command-line tool, plus the cycle-notation
//! permutation specs accepted on the command line.
//!
//! A document is either a full multi-model or the graph shorthand
//! `{"vertices": n, "directed": bool, "edges": [[u, v], ...]}`, which expands
//! through [`crate::graph::graph_to_model`]. Element references are written
//! `"sort:index"`, or as a bare 0-based index when the domain has a single
//! sort. Encoding is canonical: struct key order is fixed, map keys are
//! sorted, tuple lists are sorted, so identical models produce identical
//! bytes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{graph_to_model, Graph};
use crate::model::{
    Algebra, Element, Interpretation, MultiModel, OperationTable, RelationSymbol, SortedDomain,
};
use crate::perm::MultiSortedPermutation;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    sorts: Vec<SortFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    operations: Vec<OperationFile>,
    #[serde(default)]
    relations: Vec<RelationFile>,
    interpretations: Vec<InterpretationFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SortFile {
    name: String,
    size: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperationFile {
    name: String,
    /// Argument sort names followed by the result sort name.
    signature: Vec<String>,
    table: Vec<RowFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RowFile {
    args: Vec<ElementRef>,
    result: ElementRef,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationFile {
    name: String,
    signature: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InterpretationFile {
    label: String,
    tuples: BTreeMap<String, Vec<Vec<ElementRef>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ElementRef {
    Index(usize),
    Named(String),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    vertices: usize,
    #[serde(default)]
    directed: bool,
    #[serde(default)]
    edges: Vec<(usize, usize)>,
}

/// Decodes a document (full form or graph shorthand) into a multi-model.
/// Reference-resolution problems are collected and reported together;
/// invariant checking is left to [`MultiModel::validate`].
pub fn decode_multimodel(text: &str) -> Result<MultiModel> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::Decode { issues: vec![format!("json: {e}")] })?;
    if value.get("vertices").is_some() {
        let gf: GraphFile = serde_json::from_value(value)
            .map_err(|e| Error::Decode { issues: vec![format!("graph shorthand: {e}")] })?;
        let mut issues = Vec::new();
        if gf.vertices == 0 {
            issues.push("vertices: a graph needs at least one vertex".into());
        }
        for (i, &(u, v)) in gf.edges.iter().enumerate() {
            if u >= gf.vertices || v >= gf.vertices {
                issues.push(format!(
                    "edges[{i}]: endpoint of ({u}, {v}) out of range for {} vertices",
                    gf.vertices
                ));
            }
        }
        if !issues.is_empty() {
            return Err(Error::Decode { issues });
        }
        let graph = if gf.directed {
            Graph::directed(gf.vertices, gf.edges)
        } else {
            Graph::undirected(gf.vertices, gf.edges)
        }
        .expect("endpoints checked above");
        return Ok(graph_to_model(&graph).to_multimodel());
    }
    let mf: ModelFile = serde_json::from_value(value)
        .map_err(|e| Error::Decode { issues: vec![format!("model document: {e}")] })?;
    resolve(mf)
}

fn resolve(mf: ModelFile) -> Result<MultiModel> {
    let mut issues = Vec::new();
    let domain = SortedDomain::new(mf.sorts.iter().map(|s| (s.name.clone(), s.size)));
    for sort in domain.sorts() {
        if sort.name.contains(':') || sort.name.chars().any(char::is_whitespace) {
            issues.push(format!(
                "sorts: name {:?} must not contain ':' or whitespace",
                sort.name
            ));
        }
    }

    let resolve_sort = |name: &str, at: &str, issues: &mut Vec<String>| -> Option<usize> {
        let found = domain.sort_index(name);
        if found.is_none() {
            issues.push(format!("{at}: unknown sort {name:?}"));
        }
        found
    };
    let resolve_ref = |r: &ElementRef, at: &str, issues: &mut Vec<String>| -> Option<Element> {
        match r {
            ElementRef::Index(index) => {
                if domain.sort_count() == 1 {
                    Some(Element::new(0, *index))
                } else {
                    issues.push(format!(
                        "{at}: bare index {index} is ambiguous in a multi-sorted domain; use \"sort:index\""
                    ));
                    None
                }
            }
            ElementRef::Named(text) => {
                let Some((sort_name, index_text)) = text.split_once(':') else {
                    issues.push(format!("{at}: element reference {text:?} is not \"sort:index\""));
                    return None;
                };
                let sort = resolve_sort(sort_name, at, issues)?;
                match index_text.parse::<usize>() {
                    Ok(index) => Some(Element::new(sort, index)),
                    Err(_) => {
                        issues.push(format!("{at}: bad element index in {text:?}"));
                        None
                    }
                }
            }
        }
    };

    let mut operations = Vec::new();
    for (i, op) in mf.operations.iter().enumerate() {
        let at = format!("operations[{i}]");
        if op.signature.is_empty() {
            issues.push(format!("{at}: signature needs at least a result sort"));
            continue;
        }
        let mut sorts = Vec::new();
        for name in &op.signature {
            match resolve_sort(name, &at, &mut issues) {
                Some(s) => sorts.push(s),
                None => continue,
            }
        }
        if sorts.len() != op.signature.len() {
            continue;
        }
        let result_sort = sorts.pop().unwrap();
        let mut entries = Vec::new();
        for (r, row) in op.table.iter().enumerate() {
            let row_at = format!("{at}.table[{r}]");
            let args: Vec<Element> = row
                .args
                .iter()
                .filter_map(|a| resolve_ref(a, &row_at, &mut issues))
                .collect();
            let Some(result) = resolve_ref(&row.result, &row_at, &mut issues) else {
                continue;
            };
            if args.len() == row.args.len() {
                entries.push((args, result));
            }
        }
        operations.push(OperationTable {
            name: op.name.clone(),
            arg_sorts: sorts,
            result_sort,
            entries,
        });
    }

    let mut relations = Vec::new();
    for (i, rel) in mf.relations.iter().enumerate() {
        let at = format!("relations[{i}]");
        let signature: Vec<usize> = rel
            .signature
            .iter()
            .filter_map(|name| resolve_sort(name, &at, &mut issues))
            .collect();
        if signature.len() == rel.signature.len() {
            relations.push(RelationSymbol::new(rel.name.clone(), signature));
        }
    }

    let mut interpretations = Vec::new();
    for (k, interp) in mf.interpretations.iter().enumerate() {
        let mut out = Interpretation::new(interp.label.clone());
        for (rel_name, tuples) in &interp.tuples {
            let at = format!("interpretations[{k}].tuples.{rel_name}");
            let resolved: Vec<Vec<Element>> = tuples
                .iter()
                .enumerate()
                .filter_map(|(t, tuple)| {
                    let tuple_at = format!("{at}[{t}]");
                    let elems: Vec<Element> = tuple
                        .iter()
                        .filter_map(|r| resolve_ref(r, &tuple_at, &mut issues))
                        .collect();
                    (elems.len() == tuple.len()).then_some(elems)
                })
                .collect();
            out.tuples.insert(rel_name.clone(), resolved);
        }
        interpretations.push(out);
    }

    if issues.is_empty() {
        Ok(MultiModel::new(Algebra::new(domain, operations), relations, interpretations))
    } else {
        Err(Error::Decode { issues })
    }
}

/// Canonical encoding of a multi-model. Tuple lists are sorted on the way
/// out, so encoding is deterministic regardless of in-memory order.
pub fn encode_multimodel(mm: &MultiModel) -> String {
    let domain = mm.domain();
    let sort_name = |s: usize| domain.sorts()[s].name.clone();
    let element_ref = |e: &Element| -> ElementRef {
        if domain.sort_count() == 1 {
            ElementRef::Index(e.index)
        } else {
            ElementRef::Named(format!("{}:{}", sort_name(e.sort), e.index))
        }
    };
    let mf = ModelFile {
        sorts: domain
            .sorts()
            .iter()
            .map(|s| SortFile { name: s.name.clone(), size: s.size })
            .collect(),
        operations: mm
            .algebra
            .operations
            .iter()
            .map(|op| OperationFile {
                name: op.name.clone(),
                signature: op
                    .arg_sorts
                    .iter()
                    .chain([&op.result_sort])
                    .map(|&s| sort_name(s))
                    .collect(),
                table: op
                    .entries
                    .iter()
                    .map(|(args, result)| RowFile {
                        args: args.iter().map(&element_ref).collect(),
                        result: element_ref(result),
                    })
                    .collect(),
            })
            .collect(),
        relations: mm
            .relations
            .iter()
            .map(|rel| RelationFile {
                name: rel.name.clone(),
                signature: rel.signature.iter().map(|&s| sort_name(s)).collect(),
            })
            .collect(),
        interpretations: mm
            .interpretations
            .iter()
            .map(|interp| InterpretationFile {
                label: interp.label.clone(),
                tuples: interp
                    .tuples
                    .iter()
                    .map(|(name, tuples)| {
                        let mut sorted = tuples.clone();
                        sorted.sort();
                        let refs = sorted
                            .iter()
                            .map(|t| t.iter().map(&element_ref).collect())
                            .collect();
                        (name.clone(), refs)
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&mf).expect("model files serialize");
    text.push('\n');
    text
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// Reads and decodes a document without validating it.
pub fn read_multimodel(path: &Path) -> Result<MultiModel> {
    decode_multimodel(&read_to_string(path)?)
}

/// Reads, decodes, validates and canonicalizes. This is the entry point for
/// every command that computes on the model.
pub fn load_valid_multimodel(path: &Path) -> Result<MultiModel> {
    let mut mm = read_multimodel(path)?;
    let violations = mm.validate();
    if !violations.is_empty() {
        return Err(Error::Invalid { violations });
    }
    mm.canonicalize();
    Ok(mm)
}

pub fn write_multimodel(path: &Path, mm: &MultiModel) -> Result<()> {
    std::fs::write(path, encode_multimodel(mm))
        .map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// Parses a permutation spec: `id`, or `;`-separated clauses of the form
/// `sort:(a b)(c d)`. Indices are 0-based. The sort prefix may be omitted
/// when the domain has a single sort; unmentioned sorts act as the identity.
pub fn parse_permutation_spec(
    domain: &SortedDomain,
    spec: &str,
) -> Result<MultiSortedPermutation> {
    let bad = |msg: String| Error::Precondition(format!("permutation spec {spec:?}: {msg}"));
    let spec_trim = spec.trim();
    let mut images: Vec<Vec<usize>> =
        domain.sorts().iter().map(|s| (0..s.size).collect()).collect();
    if spec_trim == "id" {
        return MultiSortedPermutation::from_images(domain, domain, images);
    }
    let mut seen_sorts = vec![false; domain.sort_count()];
    for clause in spec_trim.split(';') {
        let clause = clause.trim();
        if clause.is_empty() {
            continue;
        }
        let (sort, body) = match clause.split_once(':') {
            Some((name, body)) => {
                let sort = domain
                    .sort_index(name.trim())
                    .ok_or_else(|| bad(format!("unknown sort {:?}", name.trim())))?;
                (sort, body.trim())
            }
            None if domain.sort_count() == 1 => (0, clause),
            None => {
                return Err(bad("clauses need a sort prefix in a multi-sorted domain".into()))
            }
        };
        if seen_sorts[sort] {
            return Err(bad(format!("sort {:?} appears twice", domain.sorts()[sort].name)));
        }
        seen_sorts[sort] = true;
        if body == "id" {
            continue;
        }
        let card = domain.cardinality(sort).unwrap();
        let mut moved = vec![false; card];
        let mut rest = body;
        while !rest.is_empty() {
            let Some(inner) = rest.strip_prefix('(') else {
                return Err(bad(format!("expected '(' at {rest:?}")));
            };
            let Some((cycle_text, tail)) = inner.split_once(')') else {
                return Err(bad("unclosed cycle".into()));
            };
            rest = tail.trim_start();
            let cycle: Vec<usize> = cycle_text
                .split_whitespace()
                .map(|tok| tok.parse::<usize>().map_err(|_| bad(format!("bad index {tok:?}"))))
                .collect::<Result<_>>()?;
            if cycle.is_empty() {
                return Err(bad("empty cycle".into()));
            }
            for &v in &cycle {
                if v >= card {
                    return Err(bad(format!("index {v} out of range for sort of size {card}")));
                }
                if moved[v] {
                    return Err(bad(format!("index {v} appears in two cycles")));
                }
                moved[v] = true;
            }
            for (at, &v) in cycle.iter().enumerate() {
                images[sort][v] = cycle[(at + 1) % cycle.len()];
            }
        }
    }
    MultiSortedPermutation::from_images(domain, domain, images)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star_json() -> &'static str {
        r#"{"vertices": 4, "directed": false, "edges": [[0,1],[0,2],[0,3]]}"#
    }

    #[test]
    fn graph_shorthand_expands_symmetrically() {
        let mm = decode_multimodel(star_json()).unwrap();
        assert!(mm.validate().is_empty());
        assert_eq!(mm.interpretations[0].relation_tuples("edge").len(), 6);
    }

    #[test]
    fn encode_decode_round_trip() {
        let mut mm = decode_multimodel(star_json()).unwrap();
        mm.canonicalize();
        let text = encode_multimodel(&mm);
        let back = decode_multimodel(&text).unwrap();
        assert_eq!(back, mm);
        assert_eq!(encode_multimodel(&back), text);
    }

    #[test]
    fn multi_sorted_round_trip_uses_named_refs() {
        let text = r#"{
            "sorts": [{"name": "a", "size": 2}, {"name": "b", "size": 3}],
            "relations": [{"name": "r", "signature": ["a", "b"]}],
            "interpretations": [{"label": "f", "tuples": {"r": [["a:0", "b:2"]]}}]
        }"#;
        let mm = decode_multimodel(text).unwrap();
        assert!(mm.validate().is_empty());
        let encoded = encode_multimodel(&mm);
        assert!(encoded.contains("\"a:0\""));
        assert_eq!(decode_multimodel(&encoded).unwrap(), mm);
    }

    #[test]
    fn bare_refs_are_rejected_in_multi_sorted_domains() {
        let text = r#"{
            "sorts": [{"name": "a", "size": 2}, {"name": "b", "size": 3}],
            "relations": [{"name": "r", "signature": ["a", "b"]}],
            "interpretations": [{"label": "f", "tuples": {"r": [[0, 2]]}}]
        }"#;
        match decode_multimodel(text) {
            Err(Error::Decode { issues }) => {
                assert_eq!(issues.len(), 2);
                assert!(issues[0].contains("ambiguous"));
            }
            other => panic!("expected decode issues, got {other:?}"),
        }
    }

    #[test]
    fn unknown_sorts_are_collected() {
        let text = r#"{
            "sorts": [{"name": "a", "size": 2}],
            "relations": [{"name": "r", "signature": ["zz"]}],
            "interpretations": [{"label": "f", "tuples": {"r": []}}]
        }"#;
        match decode_multimodel(text) {
            Err(Error::Decode { issues }) => assert!(issues[0].contains("unknown sort")),
            other => panic!("expected decode issues, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_is_a_decode_error() {
        assert!(matches!(decode_multimodel("{"), Err(Error::Decode { .. })));
        assert!(matches!(
            decode_multimodel(r#"{"vertices": 2, "edges": [[0, 5]]}"#),
            Err(Error::Decode { .. })
        ));
    }

    #[test]
    fn permutation_specs_parse_and_round_trip() {
        let domain = SortedDomain::single("V", 4);
        let p = parse_permutation_spec(&domain, "V:(1 3)(0 2)").unwrap();
        assert_eq!(p.images(), &[vec![2, 3, 0, 1]]);
        assert!(parse_permutation_spec(&domain, "id").unwrap().is_identity());
        // Bare clause allowed with one sort.
        let q = parse_permutation_spec(&domain, "(0 1 2)").unwrap();
        assert_eq!(q.images(), &[vec![1, 2, 0, 3]]);
        // Round trip through cycle notation.
        let back = parse_permutation_spec(&domain, &p.cycle_notation()).unwrap();
        assert_eq!(back, p);

        let two = SortedDomain::new([("a", 2), ("b", 3)]);
        let r = parse_permutation_spec(&two, "b:(0 1); a:(0 1)").unwrap();
        assert_eq!(r.images(), &[vec![1, 0], vec![1, 0, 2]]);
        assert_eq!(parse_permutation_spec(&two, &r.cycle_notation()).unwrap(), r);
    }

    #[test]
    fn bad_permutation_specs_are_rejected()  {
        let domain = SortedDomain::single("V", 3);
        for bad in ["V:(0 9)", "V:(0 1)(1 2)", "W:(0 1)", "V:(0 1", "V:()", "V:(0 x)"] {
            assert!(parse_permutation_spec(&domain, bad).is_err(), "accepted {bad:?}");
        }
        let two = SortedDomain::new([("a", 2), ("b", 3)]);
        assert!(parse_permutation_spec(&two, "(0 1)").is_err());
    }
}
