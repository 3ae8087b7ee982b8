//! Weights and distances: the Gray map on `Z4`, Lee weight tables for the
//! three classified alphabet families, Hamming weights, and exact
//! code-level distance scans with enumerator invariants.

use crate::error::{Error, Result};
use crate::ring::ChainRing;
use crate::space::MixedCode;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Code-level weight data collected by a full codeword scan.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct WeightProfile {
    /// Minimum Hamming weight of a nonzero codeword (`None` for the zero code).
    pub min_hamming: Option<u32>,
    /// Minimum Lee weight of a nonzero codeword (`None` for the zero code or
    /// when the alphabet has no Lee table).
    pub min_lee: Option<u32>,
    /// Coefficient `i` counts codewords of Hamming weight `i`.
    pub hamming_enumerator: Vec<u64>,
    /// Sorted (weight, multiplicity) pairs over all codewords, when the
    /// alphabet has a Lee table.
    pub lee_multiset: Option<Vec<(u32, u64)>>,
}

/// The Gray image of one `Z4` digit: `0 ↦ 00, 1 ↦ 01, 2 ↦ 11, 3 ↦ 10`.
pub fn gray_phi(ring: &ChainRing, x: u8) -> Result<(u8, u8)> {
    if ring.name() != "Z4" {
        return Err(Error::GrayUnsupported(format!(
            "the Gray map is defined on Z4, found {}",
            ring.name()
        )));
    }
    Ok(match x {
        0 => (0, 0),
        1 => (0, 1),
        2 => (1, 1),
        3 => (1, 0),
        _ => return Err(Error::Invalid(format!("element code {x} out of range"))),
    })
}

/// The extended Gray map `Φ`: `φ` on each first-block digit, identity on the
/// second block; a word over `Z4^a ⊕ Z2^b` becomes `2a + b` bits.
pub fn gray_phi_word(shape: &crate::space::MixedShape, w: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(2 * shape.a() + shape.b());
    for i in 0..shape.a() {
        let (hi, lo) = gray_phi(shape.ring(), w[i])?;
        out.push(hi);
        out.push(lo);
    }
    out.extend_from_slice(&w[shape.a()..]);
    Ok(out)
}

/// The per-element Lee weight table of a supported alphabet.
///
/// `Z4`: `0,1,2,1`. `Z9`: `0,1,2,3,3,3,3,2,1`. `F4[u]/u²`:
/// `w_L(a0 + a1·u) = w_H(a0 + a1) + w_H(a1)`. The field alphabets `Z2`,
/// `Z3`, `F4` use Hamming weight.
pub fn lee_table(ring: &ChainRing) -> Result<Vec<u32>> {
    match ring.name() {
        "Z4" => Ok(vec![0, 1, 2, 1]),
        "Z9" => Ok(vec![0, 1, 2, 3, 3, 3, 3, 2, 1]),
        "Z2" => Ok(vec![0, 1]),
        "Z3" => Ok(vec![0, 1, 1]),
        "F4" => Ok(vec![0, 1, 1, 1]),
        "F4u2" => Ok((0..16u8)
            .map(|x| {
                let a0 = x & 3;
                let a1 = x >> 2;
                // Constant-coefficient sum in F4 (characteristic 2): XOR of
                // the polynomial bit patterns.
                let sum = a0 ^ a1;
                u32::from(sum != 0) + u32::from(a1 != 0)
            })
            .collect()),
        _ => Err(Error::LeeUnsupported(format!(
            "no Lee table for {}; use the Hamming profile instead",
            ring.name()
        ))),
    }
}

/// Lee weight of a single element.
pub fn lee_weight(ring: &ChainRing, x: u8) -> Result<u32> {
    let table = lee_table(ring)?;
    table
        .get(x as usize)
        .copied()
        .ok_or_else(|| Error::Invalid(format!("element code {x} out of range")))
}

/// Hamming weight of a word (count of nonzero coordinates).
pub fn hamming_weight(w: &[u8]) -> u32 {
    w.iter().filter(|&&x| x != 0).count() as u32
}

/// Lee weight of a mixed word: Lee on the first block, Hamming on the second.
pub fn word_lee_weight(shape: &crate::space::MixedShape, w: &[u8]) -> Result<u32> {
    let table = lee_table(shape.ring())?;
    let mut total = 0u32;
    for i in 0..shape.a() {
        total += table
            .get(w[i] as usize)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("element code {} out of range", w[i])))?;
    }
    total += hamming_weight(&w[shape.a()..]);
    Ok(total)
}

/// Exact Hamming/Lee distance data for a code, by full codeword scan.
pub fn code_distances(c: &MixedCode) -> WeightProfile {
    let shape = c.shape();
    let lee = lee_table(shape.ring()).ok();
    let n = shape.len();
    let per_word: Vec<(u32, Option<u32>)> = c
        .words()
        .par_iter()
        .map(|&idx| {
            let w = shape.decode(idx);
            let hw = hamming_weight(&w);
            let lw = lee.as_ref().map(|table| {
                let mut total = 0u32;
                for i in 0..shape.a() {
                    total += table[w[i] as usize];
                }
                total + hamming_weight(&w[shape.a()..])
            });
            (hw, lw)
        })
        .collect();
    let mut enumerator = vec![0u64; n + 1];
    let mut lee_counts: BTreeMap<u32, u64> = BTreeMap::new();
    let mut min_hamming = None;
    let mut min_lee = None;
    for &(hw, lw) in &per_word {
        enumerator[hw as usize] += 1;
        if let Some(lw) = lw {
            *lee_counts.entry(lw).or_insert(0) += 1;
            if lw > 0 {
                min_lee = Some(min_lee.map_or(lw, |m: u32| m.min(lw)));
            }
        }
        if hw > 0 {
            min_hamming = Some(min_hamming.map_or(hw, |m: u32| m.min(hw)));
        }
    }
    WeightProfile {
        min_hamming,
        min_lee,
        hamming_enumerator: enumerator,
        lee_multiset: lee.map(|_| lee_counts.into_iter().collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{MixedMatrix, MixedShape};

    fn ring(name: &str) -> ChainRing {
        ChainRing::parse_spec(name).unwrap()
    }

    fn code(text: &str) -> MixedCode {
        MixedMatrix::parse(text).unwrap().span()
    }

    #[test]
    fn gray_map_matches_the_table() {
        let z4 = ring("Z4");
        assert_eq!(gray_phi(&z4, 0).unwrap(), (0, 0));
        assert_eq!(gray_phi(&z4, 1).unwrap(), (0, 1));
        assert_eq!(gray_phi(&z4, 2).unwrap(), (1, 1));
        assert_eq!(gray_phi(&z4, 3).unwrap(), (1, 0));
        assert!(matches!(gray_phi(&ring("Z8"), 1), Err(Error::GrayUnsupported(_))));
    }

    #[test]
    fn extended_gray_map_concatenates_blocks() {
        let sh = MixedShape::new(ring("Z4"), 1, 2, 1).unwrap();
        assert_eq!(
            gray_phi_word(&sh, &[1, 2, 1]).unwrap(),
            vec![0, 1, 1, 1, 1],
            "Φ(1, 2 | 1)"
        );
    }

    #[test]
    fn gray_map_is_a_lee_isometry_on_z4() {
        let z4 = ring("Z4");
        for x in 0..4u8 {
            let (hi, lo) = gray_phi(&z4, x).unwrap();
            assert_eq!(
                lee_weight(&z4, x).unwrap(),
                u32::from(hi != 0) + u32::from(lo != 0),
                "w_L({x}) equals the Hamming weight of φ({x})"
            );
        }
    }

    #[test]
    fn lee_tables_match_the_stated_values() {
        let z9 = ring("Z9");
        assert_eq!(lee_weight(&z9, 7).unwrap(), 2);
        assert_eq!(lee_weight(&z9, 4).unwrap(), 3);
        assert_eq!(lee_weight(&z9, 8).unwrap(), 1);
        let f4u2 = ring("F4u2");
        // 1 + u: constants cancel, one nonzero u-coefficient.
        let one_plus_u = f4u2.parse_elem("1+u").unwrap();
        assert_eq!(lee_weight(&f4u2, one_plus_u).unwrap(), 1);
        // u alone: w_H(0 + 1) + w_H(1) = 2.
        let u = f4u2.parse_elem("u").unwrap();
        assert_eq!(lee_weight(&f4u2, u).unwrap(), 2);
        for name in ["Z4", "Z9", "Z2", "Z3", "F4", "F4u2"] {
            assert_eq!(lee_weight(&ring(name), 0).unwrap(), 0, "{name}: w_L(0) = 0");
        }
        assert!(matches!(lee_weight(&ring("Z8"), 1), Err(Error::LeeUnsupported(_))));
    }

    #[test]
    fn lee_weight_is_negation_invariant_on_the_integer_alphabets() {
        for name in ["Z4", "Z2", "Z9", "Z3"] {
            let r = ring(name);
            for x in r.elems() {
                assert_eq!(
                    lee_weight(&r, x).unwrap(),
                    lee_weight(&r, r.neg(x)).unwrap(),
                    "{name}: w_L(-{x}) = w_L({x})"
                );
            }
        }
    }

    #[test]
    fn distance_scans_match_the_listed_generator_examples() {
        let c1 = code("ring Z4\ns 1\nblocks 1 1\n2 | 1\n");
        assert_eq!(code_distances(&c1).min_lee, Some(3), "[2 | 1] has Lee distance 3");
        let c2 = code("ring Z9\ns 1\nblocks 3 1\n6 6 3 | 1\n");
        assert_eq!(
            code_distances(&c2).min_lee,
            Some(10),
            "[6 6 3 | 1] has Lee distance 10"
        );
        let c3 = code("ring F4u2\ns 1\nblocks 2 1\nu u | 1\n");
        assert_eq!(
            code_distances(&c3).min_lee,
            Some(5),
            "[u u | 1] has Lee distance 5"
        );
    }

    #[test]
    fn hamming_enumerator_counts_every_codeword() {
        let c = code("ring Z4\ns 1\nblocks 1 1\n2 | 1\n");
        let p = code_distances(&c);
        assert_eq!(p.hamming_enumerator, vec![1, 0, 1], "2 codewords: 0 and (2|1)");
        assert_eq!(p.min_hamming, Some(2));
        assert_eq!(p.lee_multiset, Some(vec![(0, 1), (3, 1)]));
        let zero = MixedCode::zero(MixedShape::new(ring("Z4"), 1, 1, 1).unwrap());
        let pz = code_distances(&zero);
        assert_eq!(pz.min_hamming, None, "zero code has no nonzero codeword");
        assert_eq!(pz.min_lee, None);
    }

    #[test]
    fn hamming_distance_never_exceeds_lee_distance() {
        for text in [
            "ring Z4\ns 1\nblocks 2 1\n1 2 | 1\n",
            "ring Z9\ns 1\nblocks 2 1\n3 1 | 2\n",
            "ring F4u2\ns 1\nblocks 1 2\nw | 1 w2\n",
            "ring Z4\ns 1\nblocks 2 2\n1 0 | 1 0\n0 2 | 0 1\n",
        ] {
            let c = code(text);
            let p = code_distances(&c);
            assert!(
                p.min_hamming <= p.min_lee,
                "d_H ≤ d_L for {text}: {:?} vs {:?}",
                p.min_hamming,
                p.min_lee
            );
            // Per-element domination: w_H ≤ w_L on the alphabet.
            let r = c.shape().ring();
            for x in r.elems() {
                assert!(u32::from(x != 0) <= lee_weight(r, x).unwrap());
            }
        }
    }

    #[test]
    fn hamming_enumerator_is_invariant_under_unit_scalings_and_permutations() {
        // A monomial map permutes coordinates within each block and scales
        // by units; the Hamming enumerator cannot see either.
        let c = code("ring Z9\ns 1\nblocks 2 1\n3 1 | 2\n");
        let sh = c.shape().clone();
        let base = code_distances(&c).hamming_enumerator;
        // Swap the two first-block coordinates and scale by units (2, 5 | 2).
        let mapped: Vec<Vec<u8>> = c
            .words()
            .iter()
            .map(|&idx| {
                let w = sh.decode(idx);
                vec![
                    sh.ring().mul(2, w[1]),
                    sh.ring().mul(5, w[0]),
                    sh.qring().mul(2, w[2]),
                ]
            })
            .collect();
        let image = MixedMatrix::from_rows(sh, &mapped).unwrap().span();
        assert_eq!(image.len(), c.len(), "monomial maps are bijections");
        assert_eq!(code_distances(&image).hamming_enumerator, base);
    }
}
