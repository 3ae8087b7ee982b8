//! Built-in data files: classification catalogs (`appendix*` keys) and
//! worked-example generator matrices (`example*` keys).
//!
//! A catalog file is self-describing text:
//!
//! ```text
//! ring Z4
//! s 1
//! blocks 2 1
//! h 0
//! entry A3-001 lee 1
//! 1 0 | 0
//! entry A3-002 lee 1
//! 0 0 | 1
//! ```
//!
//! The four header lines fix the ambient module and the Galois twist used
//! for duality checks. Each `entry <label> lee <d>` record claims a minimum
//! Lee distance for the code spanned by the row lines that follow it. Rows
//! use the same `x .. | y ..` element syntax as [`MixedMatrix::render`].
//! Blank lines and `#` comments are ignored everywhere.
//!
//! [`parse_catalog`] never aborts the batch on a bad entry: malformed
//! records are reported per line in [`Catalog::failures`] while the
//! well-formed entries still parse. A malformed *header* is a hard error
//! since nothing after it can be interpreted.

use crate::error::{Error, Result};
use crate::space::{MixedMatrix, MixedShape};
use crate::ring::ChainRing;

/// Keys of the bundled classification catalogs.
pub const CATALOG_KEYS: [&str; 16] = [
    "appendixA1",
    "appendixA2",
    "appendixA3",
    "appendixA4",
    "appendixA5",
    "appendixA6",
    "appendixB1",
    "appendixB2",
    "appendixB3",
    "appendixB4",
    "appendixB5",
    "appendixB6",
    "appendixC1",
    "appendixC2",
    "appendixC3",
    "appendixC4",
];

/// Keys of the bundled single-matrix code files.
pub const CODE_KEYS: [&str; 7] = [
    "example41",
    "example42",
    "example43",
    "example61c",
    "example61d",
    "example62c",
    "example62d",
];

/// The raw text of a bundled data file, or `None` for an unknown key.
pub fn builtin(key: &str) -> Option<&'static str> {
    Some(match key {
        "appendixA1" => include_str!("../data/appendixA1.cat"),
        "appendixA2" => include_str!("../data/appendixA2.cat"),
        "appendixA3" => include_str!("../data/appendixA3.cat"),
        "appendixA4" => include_str!("../data/appendixA4.cat"),
        "appendixA5" => include_str!("../data/appendixA5.cat"),
        "appendixA6" => include_str!("../data/appendixA6.cat"),
        "appendixB1" => include_str!("../data/appendixB1.cat"),
        "appendixB2" => include_str!("../data/appendixB2.cat"),
        "appendixB3" => include_str!("../data/appendixB3.cat"),
        "appendixB4" => include_str!("../data/appendixB4.cat"),
        "appendixB5" => include_str!("../data/appendixB5.cat"),
        "appendixB6" => include_str!("../data/appendixB6.cat"),
        "appendixC1" => include_str!("../data/appendixC1.cat"),
        "appendixC2" => include_str!("../data/appendixC2.cat"),
        "appendixC3" => include_str!("../data/appendixC3.cat"),
        "appendixC4" => include_str!("../data/appendixC4.cat"),
        "example41" => include_str!("../data/example41.code"),
        "example42" => include_str!("../data/example42.code"),
        "example43" => include_str!("../data/example43.code"),
        "example61c" => include_str!("../data/example61c.code"),
        "example61d" => include_str!("../data/example61d.code"),
        "example62c" => include_str!("../data/example62c.code"),
        "example62d" => include_str!("../data/example62d.code"),
        _ => return None,
    })
}

/// One labelled catalog record: a generator matrix plus its claimed minimum
/// Lee distance.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub label: String,
    pub claimed_lee: u32,
    pub matrix: MixedMatrix,
}

/// A parsed catalog: the ambient shape, the Galois twist `h` its duality
/// claims refer to, the well-formed entries, and per-line diagnostics for
/// the records that failed to parse.
#[derive(Clone, Debug)]
pub struct Catalog {
    pub shape: MixedShape,
    pub h: usize,
    pub entries: Vec<CatalogEntry>,
    pub failures: Vec<String>,
}

fn take_header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    keyword: &str,
    arity: usize,
) -> Result<(usize, Vec<String>)> {
    for (ln, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != arity + 1 || toks[0] != keyword {
            return Err(Error::parse(
                ln,
                format!("expected `{keyword}` header line, found `{line}`"),
            ));
        }
        return Ok((ln, toks[1..].iter().map(|t| t.to_string()).collect()));
    }
    Err(Error::parse(0, format!("missing `{keyword}` header line")))
}

/// Parses catalog text (see the module docs for the format).
///
/// Header problems are hard errors. Entry problems are collected into
/// [`Catalog::failures`] as `"<label> line <n>: <reason>"` strings and the
/// remaining records are still returned.
pub fn parse_catalog(text: &str) -> Result<Catalog> {
    let mut numbered = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (rl, ring_args) = take_header(&mut numbered, "ring", 1)?;
    let ring = ChainRing::parse_spec(&ring_args[0]).map_err(|e| Error::parse(rl, e.to_string()))?;
    let (sl, s_args) = take_header(&mut numbered, "s", 1)?;
    let s: usize = s_args[0]
        .parse()
        .map_err(|_| Error::parse(sl, "invalid quotient depth"))?;
    let (bl, b_args) = take_header(&mut numbered, "blocks", 2)?;
    let a: usize = b_args[0]
        .parse()
        .map_err(|_| Error::parse(bl, "invalid first block length"))?;
    let b: usize = b_args[1]
        .parse()
        .map_err(|_| Error::parse(bl, "invalid second block length"))?;
    let (hl, h_args) = take_header(&mut numbered, "h", 1)?;
    let h: usize = h_args[0]
        .parse()
        .map_err(|_| Error::parse(hl, "invalid Galois twist"))?;
    let shape = MixedShape::new(ring, s, a, b).map_err(|e| Error::parse(bl, e.to_string()))?;

    let mut entries = Vec::new();
    let mut failures = Vec::new();

    // Current record: label, claimed distance, accumulated rows, first bad
    // line (if any).  A record with a recorded failure is dropped at flush.
    struct Pending {
        label: String,
        lee: u32,
        rows: Vec<Vec<u8>>,
        failed: bool,
    }
    let mut current: Option<Pending> = None;

    let flush = |current: &mut Option<Pending>,
                     entries: &mut Vec<CatalogEntry>,
                     failures: &mut Vec<String>| {
        if let Some(p) = current.take() {
            if p.failed {
                return;
            }
            match MixedMatrix::from_rows(shape.clone(), &p.rows) {
                Ok(matrix) => entries.push(CatalogEntry {
                    label: p.label,
                    claimed_lee: p.lee,
                    matrix,
                }),
                Err(e) => failures.push(format!("{}: {e}", p.label)),
            }
        }
    };

    for (ln, raw) in numbered {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with("entry ") || line == "entry" {
            flush(&mut current, &mut entries, &mut failures);
            let toks: Vec<&str> = line.split_whitespace().collect();
            let ok = toks.len() == 4 && toks[0] == "entry" && toks[2] == "lee";
            let lee = if ok { toks[3].parse::<u32>().ok() } else { None };
            match lee {
                Some(lee) if ok => {
                    current = Some(Pending {
                        label: toks[1].to_string(),
                        lee,
                        rows: Vec::new(),
                        failed: false,
                    });
                }
                _ => {
                    failures.push(format!(
                        "line {ln}: expected `entry <label> lee <d>`, found `{line}`"
                    ));
                    current = None;
                }
            }
            continue;
        }
        let Some(p) = current.as_mut() else {
            failures.push(format!("line {ln}: row outside any `entry` record"));
            continue;
        };
        if p.failed {
            continue;
        }
        match parse_row(&shape, line) {
            Ok(row) => p.rows.push(row),
            Err(msg) => {
                failures.push(format!("{} line {ln}: {msg}", p.label));
                p.failed = true;
            }
        }
    }
    flush(&mut current, &mut entries, &mut failures);

    Ok(Catalog {
        shape,
        h,
        entries,
        failures,
    })
}

/// Parses one `x .. | y ..` row line against `shape`, returning a plain
/// message (no line number; the caller knows the position).
fn parse_row(shape: &MixedShape, line: &str) -> std::result::Result<Vec<u8>, String> {
    let parts: Vec<&str> = line.split('|').collect();
    if parts.len() != 2 {
        return Err("expected exactly one `|` separator".to_string());
    }
    let left: Vec<&str> = parts[0].split_whitespace().collect();
    let right: Vec<&str> = parts[1].split_whitespace().collect();
    if left.len() != shape.a() || right.len() != shape.b() {
        return Err(format!(
            "expected {} + {} entries, found {} + {}",
            shape.a(),
            shape.b(),
            left.len(),
            right.len()
        ));
    }
    let mut w = shape.zero_word();
    for (i, tok) in left.iter().enumerate() {
        w[i] = shape.ring().parse_elem(tok).map_err(|e| e.to_string())?;
    }
    for (j, tok) in right.iter().enumerate() {
        w[shape.a() + j] = shape.qring().parse_elem(tok).map_err(|e| e.to_string())?;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// (key, entry count) for every bundled catalog.
    const CATALOG_SIZES: [(&str, usize); 16] = [
        ("appendixA1", 5),
        ("appendixA2", 11),
        ("appendixA3", 15),
        ("appendixA4", 41),
        ("appendixA5", 49),
        ("appendixA6", 163),
        ("appendixB1", 5),
        ("appendixB2", 15),
        ("appendixB3", 19),
        ("appendixB4", 71),
        ("appendixB5", 53),
        ("appendixB6", 335),
        ("appendixC1", 5),
        ("appendixC2", 11),
        ("appendixC3", 15),
        ("appendixC4", 43),
    ];

    #[test]
    fn every_bundled_catalog_parses_without_failures() {
        for (key, _) in CATALOG_SIZES {
            let cat = parse_catalog(builtin(key).expect("known key")).expect("header parses");
            assert!(
                cat.failures.is_empty(),
                "catalog {key} reported failures: {:?}",
                cat.failures
            );
        }
    }

    #[test]
    fn bundled_catalog_entry_counts_match_the_frozen_totals() {
        for (key, expected) in CATALOG_SIZES {
            let cat = parse_catalog(builtin(key).expect("known key")).expect("parses");
            assert_eq!(
                cat.entries.len(),
                expected,
                "catalog {key} should hold {expected} entries"
            );
        }
    }

    #[test]
    fn catalog_labels_are_unique_and_prefixed_by_their_key_section() {
        for (key, _) in CATALOG_SIZES {
            let cat = parse_catalog(builtin(key).expect("known key")).expect("parses");
            let prefix = key.trim_start_matches("appendix");
            let mut seen = std::collections::BTreeSet::new();
            for e in &cat.entries {
                assert!(
                    e.label.starts_with(prefix),
                    "label {} in {key} should start with {prefix}",
                    e.label
                );
                assert!(seen.insert(e.label.clone()), "duplicate label {}", e.label);
            }
        }
    }

    #[test]
    fn twist_header_is_zero_for_euclidean_and_one_for_hermitian_catalogs() {
        for (key, _) in CATALOG_SIZES {
            let cat = parse_catalog(builtin(key).expect("known key")).expect("parses");
            let expected = if key.starts_with("appendixC") { 1 } else { 0 };
            assert_eq!(cat.h, expected, "catalog {key} twist");
        }
    }

    #[test]
    fn every_bundled_code_file_parses_to_its_shape() {
        let expects = [
            ("example41", "F9u2", 1, 2, 1),
            ("example42", "F8u2", 3, 3, 3),
            ("example43", "Z4", 5, 3, 3),
            ("example61c", "Z4", 6, 5, 2),
            ("example61d", "Z4", 6, 5, 9),
            ("example62c", "F8u2", 3, 3, 3),
            ("example62d", "F8u2", 3, 3, 3),
        ];
        for (key, ring, a, b, rows) in expects {
            let m = MixedMatrix::parse(builtin(key).expect("known key")).expect("parses");
            assert_eq!(m.shape().ring().name(), ring, "{key} ring");
            assert_eq!(
                (m.shape().a(), m.shape().b(), m.rows()),
                (a, b, rows),
                "{key} dimensions"
            );
        }
    }

    #[test]
    fn unknown_keys_resolve_to_none() {
        assert!(builtin("example99").is_none());
        assert!(builtin("").is_none());
        assert!(builtin("appendixD1").is_none());
    }

    #[test]
    fn a_bad_entry_is_reported_per_line_without_aborting_the_batch() {
        let text = "ring Z4\ns 1\nblocks 2 1\nh 0\n\
                    entry T-001 lee 1\n1 0 | 0\n\
                    entry T-002 lee 1\n1 5 | 0\n\
                    entry T-003 lee 2\n1 1 | 1\n";
        let cat = parse_catalog(text).expect("header is fine");
        assert_eq!(
            cat.entries.len(),
            2,
            "the two well-formed records should survive"
        );
        assert_eq!(cat.entries[0].label, "T-001");
        assert_eq!(cat.entries[1].label, "T-003");
        assert_eq!(cat.failures.len(), 1, "one diagnostic for the bad record");
        assert!(
            cat.failures[0].contains("T-002") && cat.failures[0].contains("line 8"),
            "diagnostic should carry the label and line number: {}",
            cat.failures[0]
        );
    }

    #[test]
    fn a_wrong_alphabet_token_is_named_in_the_diagnostic() {
        let text = "ring Z4\ns 1\nblocks 1 1\nh 0\nentry T-001 lee 1\n1 | w\n";
        let cat = parse_catalog(text).expect("header is fine");
        assert!(cat.entries.is_empty());
        assert!(
            cat.failures[0].contains('w'),
            "diagnostic should name the offending token: {}",
            cat.failures[0]
        );
    }

    #[test]
    fn an_entry_with_no_rows_spans_the_zero_code() {
        let text = "ring Z4\ns 1\nblocks 1 1\nh 0\nentry T-001 lee 1\n";
        let cat = parse_catalog(text).expect("header is fine");
        assert_eq!(cat.entries.len(), 1);
        assert_eq!(cat.entries[0].matrix.rows(), 0);
        assert_eq!(cat.entries[0].matrix.span().len(), 1, "only the zero word");
    }

    #[test]
    fn rows_before_any_entry_record_are_diagnosed() {
        let text = "ring Z4\ns 1\nblocks 1 1\nh 0\n1 | 0\n";
        let cat = parse_catalog(text).expect("header is fine");
        assert!(cat.entries.is_empty());
        assert!(
            cat.failures[0].contains("outside any `entry` record"),
            "got: {}",
            cat.failures[0]
        );
    }

    #[test]
    fn a_malformed_header_is_a_hard_error_with_its_line_number() {
        let err = parse_catalog("ring Z4\ns 1\nblocks 2 1\n").unwrap_err();
        assert!(
            err.to_string().contains("missing `h` header"),
            "got: {err}"
        );
        let err = parse_catalog("ring Z5\ns 1\nblocks 2 1\nh 0\n").unwrap_err();
        assert!(
            err.to_string().contains("line 1"),
            "ring errors carry line 1: {err}"
        );
        let err = parse_catalog("ring Z4\ns 9\nblocks 2 1\nh 0\n").unwrap_err();
        assert!(
            err.to_string().contains("quotient depth"),
            "depth validation happens at header time: {err}"
        );
    }

    #[test]
    fn a_malformed_entry_line_is_reported_and_its_rows_are_flagged() {
        let text = "ring Z4\ns 1\nblocks 1 1\nh 0\nentry T-001 distance 1\n1 | 0\n";
        let cat = parse_catalog(text).expect("header is fine");
        assert!(cat.entries.is_empty());
        assert_eq!(cat.failures.len(), 2, "one for the record, one per row");
        assert!(cat.failures[0].contains("expected `entry <label> lee <d>`"));
        assert!(cat.failures[1].contains("outside any `entry` record"));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored_between_records() {
        let text = "# preamble\nring Z4\n\ns 1\nblocks 1 1\nh 0\n\n\
                    # first record\nentry T-001 lee 2\n# its row\n1 | 1\n\n";
        let cat = parse_catalog(text).expect("parses");
        assert_eq!(cat.entries.len(), 1);
        assert_eq!(cat.entries[0].claimed_lee, 2);
        assert_eq!(cat.entries[0].matrix.rows(), 1);
    }
}
