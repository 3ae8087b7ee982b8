//! Input resolution: bundled fixtures versus files on disk, plus message
//! vectors for the demo commands.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use lcdcodes::fixtures;
use lcdcodes::lcp::MaskingScheme;
use lcdcodes::space::{MixedMatrix, MixedShape};

/// A parsed generator matrix together with the display name of its source.
pub struct NamedMatrix {
    pub name: String,
    pub matrix: MixedMatrix,
}

fn read_source(path: &Path) -> Result<(String, String)> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read `{}`", path.display()))?;
    Ok((path.display().to_string(), text))
}

fn builtin_source(key: &str) -> Result<(String, String)> {
    let text = fixtures::builtin(key).ok_or_else(|| {
        anyhow!(
            "unknown builtin key `{key}`; bundled keys are {} and {}",
            fixtures::CODE_KEYS.join(", "),
            fixtures::CATALOG_KEYS.join(", ")
        )
    })?;
    Ok((key.to_string(), text.to_string()))
}

/// Resolves a single code input to its text, from a file or a bundled key.
pub fn load_source(file: Option<&Path>, builtin: Option<&str>) -> Result<(String, String)> {
    match (file, builtin) {
        (Some(path), None) => read_source(path),
        (None, Some(key)) => builtin_source(key),
        _ => bail!("give exactly one input: a code file or --builtin <key>"),
    }
}

/// Loads and parses a single generator matrix.
pub fn load_matrix(file: Option<&Path>, builtin: Option<&str>) -> Result<NamedMatrix> {
    let (name, text) = load_source(file, builtin)?;
    let matrix = MixedMatrix::parse(&text).with_context(|| name.clone())?;
    Ok(NamedMatrix { name, matrix })
}

/// Loads the two generator matrices of a pair command: either two files or
/// one bundled pair key, which expands to the `c`/`d` fixture suffixes.
pub fn load_pair(files: &[PathBuf], builtin: Option<&str>) -> Result<(NamedMatrix, NamedMatrix)> {
    match (files, builtin) {
        ([c, d], None) => Ok((
            load_matrix(Some(c), None)?,
            load_matrix(Some(d), None)?,
        )),
        ([], Some(key)) => {
            let c_key = format!("{key}c");
            let d_key = format!("{key}d");
            if fixtures::builtin(&c_key).is_none() || fixtures::builtin(&d_key).is_none() {
                bail!("builtin `{key}` is not a code pair; bundled pairs: example61, example62");
            }
            Ok((
                load_matrix(None, Some(&c_key))?,
                load_matrix(None, Some(&d_key))?,
            ))
        }
        _ => bail!("give exactly two code files, or --builtin <pair key>"),
    }
}

/// Parses a whitespace-separated message vector over the given parameter
/// space; a literal `|` between the two blocks is accepted and ignored.
pub fn parse_message(space: &MixedShape, text: &str) -> Result<Vec<u8>> {
    let tokens: Vec<&str> = text.split_whitespace().filter(|t| *t != "|").collect();
    if tokens.len() != space.len() {
        bail!(
            "message needs {} + {} entries over {} and {}, found {}",
            space.a(),
            space.b(),
            space.ring().name(),
            space.qring().name(),
            tokens.len()
        );
    }
    let mut word = space.zero_word();
    for (i, tok) in tokens.iter().enumerate() {
        let ring = if i < space.a() {
            space.ring()
        } else {
            space.qring()
        };
        word[i] = ring
            .parse_elem(tok)
            .with_context(|| format!("message entry {}", i + 1))?;
    }
    Ok(word)
}

/// A deterministic all-nonzero message: entry `i` cycles through the nonzero
/// elements of its alphabet.
pub fn ramp_message(space: &MixedShape) -> Vec<u8> {
    (0..space.len())
        .map(|i| {
            let size = if i < space.a() {
                space.ring().size()
            } else {
                space.qring().size()
            };
            if size > 1 {
                (i % (size - 1)) as u8 + 1
            } else {
                0
            }
        })
        .collect()
}

/// Default demo messages: the bundled F8u2 pair walks its worked words, and
/// every other scheme gets the deterministic ramp.
pub fn demo_messages(builtin: Option<&str>, scheme: &MaskingScheme) -> (Vec<u8>, Vec<u8>) {
    if builtin == Some("example62") {
        return (vec![2, 1, 0], vec![1, 1, 0]);
    }
    (
        ramp_message(scheme.message_space()),
        ramp_message(scheme.mask_space()),
    )
}
