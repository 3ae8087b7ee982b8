//! Complementary pairs of codes and their applications: block-structured
//! generator and parity-check matrices, three equivalent complementarity
//! criteria, a direct-sum masking scheme with fault-injection and
//! side-channel analysis, security thresholds, and a decoder for the
//! noiseless two-user adder channel.
//!
//! Two codes `C` and `D` in the same module `M = R^a ⊕ Ř^b` form a linear
//! complementary pair (an LCP) when `C ⊕ D = M`.  Both members of an LCP
//! are necessarily weakly-free, their free ranks add up to `(a, b)`, and
//! each admits a generator matrix in the block layout produced by
//! [`block_generator`].  Those block matrices drive everything else here:
//! parity-check construction, the complementarity certificates of
//! [`is_lcp`], and the masking scheme of [`build_scheme`].

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::RingMatrix;
use crate::metrics::code_distances;
use crate::space::{type_from_rows, CodeType, MixedCode, MixedMatrix, MixedShape};

/// Largest space swept exhaustively when building lookup tables.
const TABLE_LIMIT: u128 = 1 << 22;

// ---------------------------------------------------------------------------
// Block-structured generator matrices
// ---------------------------------------------------------------------------

/// A generator matrix of `c` in the block layout `[A B; γ^(e-s)C D]`: the
/// first `k₀` rows have independent full-period first-block parts, the
/// remaining `ℓ₀` rows have first-block entries divisible by `γ^(e-s)` and
/// independent full-period second-block parts.
///
/// Requires `c` weakly-free; every member of an LCP is.
pub fn block_generator(c: &MixedCode) -> Result<MixedMatrix> {
    let sf = c.standard_form();
    if !sf.weakly_free {
        return Err(Error::NotWeaklyFree(
            "block-layout generators exist only for weakly-free codes".into(),
        ));
    }
    Ok(sf.reduced_rows.clone())
}

/// Validates that `m` is in the layout of [`block_generator`] and returns
/// its row split `(k₀, ℓ₀)`.
fn split_block_form(m: &MixedMatrix) -> Result<(usize, usize)> {
    let shape = m.shape();
    let ring = shape.ring();
    let a = shape.a();
    let es = ring.e() - shape.s();
    let has_unit = |i: usize| m.row(i)[..a].iter().any(|&x| ring.is_unit(x));
    let k0 = (0..m.rows()).take_while(|&i| has_unit(i)).count();
    let l0 = m.rows() - k0;

    let shape_x = MixedShape::new(ring.clone(), shape.s(), a, 0)?;
    let x_part: Vec<Vec<u8>> = (0..k0).map(|i| m.row(i)[..a].to_vec()).collect();
    if type_from_rows(&shape_x, &x_part) != CodeType::weakly_free(k0, 0, ring.e(), shape.s()) {
        return Err(Error::Invalid(format!(
            "rows 0..{k0} do not have independent full-period first-block parts"
        )));
    }

    for i in k0..m.rows() {
        if m.row(i)[..a]
            .iter()
            .any(|&x| x != 0 && ring.valuation(x) < es)
        {
            return Err(Error::Invalid(format!(
                "first-block entries of row {i} are not all divisible by γ^{es}"
            )));
        }
    }
    let shape_y = MixedShape::new(ring.clone(), shape.s(), 0, shape.b())?;
    let y_part: Vec<Vec<u8>> = (k0..m.rows()).map(|i| m.row(i)[a..].to_vec()).collect();
    if type_from_rows(&shape_y, &y_part) != CodeType::weakly_free(0, l0, ring.e(), shape.s()) {
        return Err(Error::Invalid(format!(
            "rows {k0}..{} do not have independent full-period second-block parts",
            m.rows()
        )));
    }
    Ok((k0, l0))
}

/// First-block parts of rows `lo..hi` of `m`, as a matrix over `R`.
fn x_rows(m: &MixedMatrix, lo: usize, hi: usize) -> RingMatrix {
    let shape = m.shape();
    RingMatrix::from_fn(shape.ring().clone(), hi - lo, shape.a(), |i, j| {
        m.row(lo + i)[j]
    })
}

/// Second-block parts of rows `lo..hi` of `m`, as a matrix over `Ř`.
fn y_rows(m: &MixedMatrix, lo: usize, hi: usize) -> RingMatrix {
    let shape = m.shape();
    RingMatrix::from_fn(shape.qring().clone(), hi - lo, shape.b(), |i, j| {
        m.row(lo + i)[shape.a() + j]
    })
}

// ---------------------------------------------------------------------------
// Parity-check matrices
// ---------------------------------------------------------------------------

/// A parity-check matrix of the weakly-free code `c`: a generator matrix of
/// the annihilator dual `c^⊥0` in the layout of [`block_generator`], so a
/// word `m` lies in `c` exactly when `m ⋄ Ĝᵀ = 0`.  The dual has type
/// `{a−k₀; b−ℓ₀}` — the zero code yields a basis of the ambient module and
/// the full module yields an empty matrix.
pub fn parity_check(c: &MixedCode) -> Result<MixedMatrix> {
    let sf = c.standard_form();
    if !sf.weakly_free {
        return Err(Error::NotWeaklyFree(
            "parity-check matrices exist only for weakly-free codes".into(),
        ));
    }
    let shape = c.shape();
    let ring = shape.ring();
    let qring = shape.qring();
    let (a, b) = (shape.a(), shape.b());
    let es = ring.e() - shape.s();
    let gamma_es = ring.gamma_pow(es);
    let (k0, l0) = (sf.k0, sf.l0);
    let a_blk = sf.a_block();
    let gc_blk = sf.gamma_c_block();
    let b_blk = sf.b_block();
    let d_blk = sf.d_block();

    let mut rows: Vec<Vec<u8>> = Vec::with_capacity((a - k0) + (b - l0));
    // Rows dual to the first-block non-pivot columns: a unit at column
    // `k₀+i` cancelled against the `A` and `C` blocks.
    for i in 0..(a - k0) {
        let mut w = shape.zero_word();
        for t in 0..k0 {
            w[t] = ring.neg(a_blk.get(t, i));
        }
        w[k0 + i] = 1;
        for j in 0..l0 {
            w[a + j] = qring.neg(ring.div_gamma(gc_blk.get(j, i), es));
        }
        rows.push(w);
    }
    // Rows dual to the second-block non-pivot columns: a unit at column
    // `a+ℓ₀+i` cancelled against the `B` and `D` blocks.
    for i in 0..(b - l0) {
        let mut w = shape.zero_word();
        for t in 0..k0 {
            w[t] = ring.neg(ring.mul(gamma_es, ring.lift_code(b_blk.get(t, i))));
        }
        for j in 0..l0 {
            w[a + j] = qring.neg(d_blk.get(j, i));
        }
        w[a + l0 + i] = 1;
        rows.push(w);
    }
    // The blocks live in permuted coordinates; map back.
    let unpermuted: Vec<Vec<u8>> = rows
        .iter()
        .map(|w| {
            let mut out = shape.zero_word();
            for (new, &old) in sf.first_perm.iter().enumerate() {
                out[old] = w[new];
            }
            for (new, &old) in sf.second_perm.iter().enumerate() {
                out[a + old] = w[a + new];
            }
            out
        })
        .collect();
    MixedMatrix::from_rows(shape.clone(), &unpermuted)
}

// ---------------------------------------------------------------------------
// Complementarity criteria
// ---------------------------------------------------------------------------

/// Which certificate [`is_lcp`] computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LcpCriterion {
    /// Compare `|C|·|D|` with `|M|` and scan `C ∩ D` for a nonzero word.
    Direct,
    /// Inspect the type of the code generated by the rows of `G ⋄ Ĥᵀ`.
    Gram,
    /// Check both residue constituent pairs for field-level
    /// complementarity.
    Residue,
}

/// Outcome of a complementarity check.
#[derive(Clone, Debug, Serialize)]
pub struct LcpVerdict {
    pub is_lcp: bool,
    pub evidence: LcpEvidence,
}

/// Certificate-specific evidence backing an [`LcpVerdict`].
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "criterion", rename_all = "lowercase")]
pub enum LcpEvidence {
    /// Cardinality product and intersection scan.
    Direct {
        size_product_matches: bool,
        /// A nonzero word of `C ∩ D`, if any.
        intersection_witness: Option<String>,
    },
    /// Block structure of the code generated by `G ⋄ Ĥᵀ`, where `Ĥ` is a
    /// parity-check matrix of `D`.  The pair is complementary exactly when
    /// that code has `k₀` full-period generators and `ℓ₀` generators of
    /// period `γ^s`.
    Gram {
        weakly_free: bool,
        complementary_types: bool,
        product_type: Option<String>,
        expected_type: String,
    },
    /// Field-level complementarity of the two residue constituent pairs:
    /// the products `Ā R̄ᵀ` and `D̄ Ūᵀ` of residue generator and
    /// parity-check blocks must be invertible.
    Residue {
        weakly_free: bool,
        complementary_types: bool,
        first_pair_complementary: Option<bool>,
        second_pair_complementary: Option<bool>,
    },
}

/// The type certifying complementarity for a product code over `R`: `k₀`
/// full-period generators plus `ℓ₀` generators of period `γ^s`.
fn product_code_type(e: usize, s: usize, k0: usize, l0: usize) -> CodeType {
    let mut t = CodeType::zero(e, s);
    t.k[0] = k0;
    t.k[e - s] += l0;
    t
}

/// Whether `g·hᵀ` is invertible over the common residue field of the two
/// matrices; vacuously true when both have no rows.
fn residue_product_invertible(g: &RingMatrix, h: &RingMatrix) -> Result<bool> {
    if g.rows() != h.rows() {
        return Ok(false);
    }
    if g.rows() == 0 {
        return Ok(true);
    }
    let prod = g.residue_matrix().mul(&h.residue_matrix().transpose())?;
    Ok(prod.field_invertible()?.is_some())
}

/// Decides whether `C ⊕ D = M` using the requested criterion.  All three
/// criteria return the same verdict on every pair of codes; the structural
/// ones additionally record why a pair fails.
pub fn is_lcp(c: &MixedCode, d: &MixedCode, criterion: LcpCriterion) -> Result<LcpVerdict> {
    let shape = c.shape();
    if shape != d.shape() {
        return Err(Error::mismatch(
            "shape",
            format!("{:?}", shape),
            format!("{:?}", d.shape()),
        ));
    }
    match criterion {
        LcpCriterion::Direct => {
            let size_product_matches =
                (c.len() as u128) * (d.len() as u128) == shape.module_size();
            let inter = c.intersect(d)?;
            let intersection_witness = inter
                .words()
                .iter()
                .find(|&&w| w != 0)
                .map(|&w| shape.render_word(&shape.decode(w)));
            let is_lcp = size_product_matches && intersection_witness.is_none();
            Ok(LcpVerdict {
                is_lcp,
                evidence: LcpEvidence::Direct {
                    size_product_matches,
                    intersection_witness,
                },
            })
        }
        LcpCriterion::Gram => {
            let (weakly_free, complementary_types, k0, l0) = structure_flags(c, d);
            let expected = product_code_type(shape.ring().e(), shape.s(), k0, l0);
            let (product_type, structure_ok) = if weakly_free && complementary_types {
                let g = block_generator(c)?;
                let h_hat = parity_check(d)?;
                let prod = g.diamond(&h_hat, 0)?;
                let pshape =
                    MixedShape::new(shape.ring().clone(), shape.s(), prod.cols(), 0)?;
                let t = type_from_rows(&pshape, &prod.row_vecs());
                let ok = t == expected;
                (Some(t.to_string()), ok)
            } else {
                (None, false)
            };
            Ok(LcpVerdict {
                is_lcp: structure_ok,
                evidence: LcpEvidence::Gram {
                    weakly_free,
                    complementary_types,
                    product_type,
                    expected_type: expected.to_string(),
                },
            })
        }
        LcpCriterion::Residue => {
            let (weakly_free, complementary_types, k0, _) = structure_flags(c, d);
            let (first, second) = if weakly_free && complementary_types {
                let g = block_generator(c)?;
                let h_hat = parity_check(d)?;
                // `Ĥ` has `a−(a−k₀) = k₀` full-period rows followed by
                // `ℓ₀` socle rows, mirroring the split of `G`.
                let first = residue_product_invertible(
                    &x_rows(&g, 0, k0),
                    &x_rows(&h_hat, 0, k0),
                )?;
                let second = residue_product_invertible(
                    &y_rows(&g, k0, g.rows()),
                    &y_rows(&h_hat, k0, h_hat.rows()),
                )?;
                (Some(first), Some(second))
            } else {
                (None, None)
            };
            Ok(LcpVerdict {
                is_lcp: first == Some(true) && second == Some(true),
                evidence: LcpEvidence::Residue {
                    weakly_free,
                    complementary_types,
                    first_pair_complementary: first,
                    second_pair_complementary: second,
                },
            })
        }
    }
}

/// Weakly-freeness and rank-complementarity of a pair, plus the free ranks
/// of `c`.
fn structure_flags(c: &MixedCode, d: &MixedCode) -> (bool, bool, usize, usize) {
    let shape = c.shape();
    let tc = c.code_type();
    let td = d.code_type();
    let weakly_free = tc.is_weakly_free() && td.is_weakly_free();
    let complementary_types =
        tc.k[0] + td.k[0] == shape.a() && tc.l[0] + td.l[0] == shape.b();
    (weakly_free, complementary_types, tc.k[0], tc.l[0])
}

// ---------------------------------------------------------------------------
// Separable pairs
// ---------------------------------------------------------------------------

/// Whether `c` equals the direct product of its two coordinate projections,
/// i.e. admits a generator matrix with zero off-diagonal blocks.
pub fn is_separable(c: &MixedCode) -> bool {
    let shape = c.shape();
    let shape_x = MixedShape::new(shape.ring().clone(), shape.s(), shape.a(), 0)
        .expect("projection shape");
    let shape_y = MixedShape::new(shape.ring().clone(), shape.s(), 0, shape.b())
        .expect("projection shape");
    let mut xs = HashSet::new();
    let mut ys = HashSet::new();
    for &idx in c.words() {
        let w = shape.decode(idx);
        xs.insert(shape_x.encode(&w[..shape.a()]));
        ys.insert(shape_y.encode(&w[shape.a()..]));
    }
    (xs.len() as u128) * (ys.len() as u128) == c.len() as u128
}

/// Whether two field codes, given by generator matrices over the residue
/// field, sum directly to the full space of length `n`.
fn field_pair_lcp(g1: &RingMatrix, g2: &RingMatrix, n: usize) -> Result<bool> {
    let r1 = g1.field_rank()?;
    let r2 = g2.field_rank()?;
    Ok(r1 + r2 == n && g1.vconcat(g2)?.field_rank()? == n)
}

/// Decides complementarity of a pair of separable weakly-free codes by
/// reducing to the two residue constituent pairs: the pair is an LCP
/// exactly when both the first-block residue codes and the second-block
/// residue codes are complementary over the residue field.
///
/// Errors when either code is not separable or not weakly-free.
pub fn separable_lcp_check(c: &MixedCode, d: &MixedCode) -> Result<bool> {
    let shape = c.shape();
    if shape != d.shape() {
        return Err(Error::mismatch(
            "shape",
            format!("{:?}", shape),
            format!("{:?}", d.shape()),
        ));
    }
    for (code, label) in [(c, "first"), (d, "second")] {
        if !is_separable(code) {
            return Err(Error::Invalid(format!("the {label} code is not separable")));
        }
        if !code.is_weakly_free() {
            return Err(Error::NotWeaklyFree(format!(
                "the {label} code is not weakly-free"
            )));
        }
    }
    // For a separable code the generator blocks project onto the factors,
    // so the residues of the projected generator rows generate the residue
    // constituents.
    let a1 = c.generator_matrix().e_block().residue_matrix();
    let a2 = d.generator_matrix().e_block().residue_matrix();
    let b1 = c.generator_matrix().f_block().residue_matrix();
    let b2 = d.generator_matrix().f_block().residue_matrix();
    Ok(field_pair_lcp(&a1, &a2, shape.a())? && field_pair_lcp(&b1, &b2, shape.b())?)
}

// ---------------------------------------------------------------------------
// The masking scheme
// ---------------------------------------------------------------------------

/// A direct-sum masking scheme built on a complementary pair `(C, D)`:
/// `C` carries the sensitive share, `D` carries the random mask.  The
/// normalizers `P₁` and `P₂` turn the parity products into coordinate
/// projections:
///
/// * `G ⋄ Ĝᵀ = 0` and `H ⋄ Ĥᵀ = 0`,
/// * `(G ⋄ Ĥᵀ)·P₁ = diag(I_{k₀}, γ^(e-s) I_{ℓ₀})`,
/// * `(H ⋄ Ĝᵀ)·P₂ = diag(I_{a−k₀}, γ^(e-s) I_{b−ℓ₀})`.
///
/// When a side has no free or no socle rows the corresponding diagonal
/// block is a size-0 identity.
#[derive(Clone, Debug)]
pub struct MaskingScheme {
    shape: MixedShape,
    code_c: MixedCode,
    code_d: MixedCode,
    gen_c: MixedMatrix,
    gen_d: MixedMatrix,
    parity_c: MixedMatrix,
    parity_d: MixedMatrix,
    p1: RingMatrix,
    p2: RingMatrix,
    k0: usize,
    l0: usize,
    msg_c: MixedShape,
    msg_d: MixedShape,
    msg_cx: MixedShape,
    msg_cy: MixedShape,
    d_c: Option<u32>,
    d_dx_dual: Option<u32>,
    d_dy_dual: Option<u32>,
    threshold: Option<u32>,
}

impl MaskingScheme {
    pub fn shape(&self) -> &MixedShape {
        &self.shape
    }
    /// The code carrying the sensitive share.
    pub fn code_c(&self) -> &MixedCode {
        &self.code_c
    }
    /// The code carrying the mask share.
    pub fn code_d(&self) -> &MixedCode {
        &self.code_d
    }
    pub fn generator_c(&self) -> &MixedMatrix {
        &self.gen_c
    }
    pub fn generator_d(&self) -> &MixedMatrix {
        &self.gen_d
    }
    pub fn parity_c(&self) -> &MixedMatrix {
        &self.parity_c
    }
    pub fn parity_d(&self) -> &MixedMatrix {
        &self.parity_d
    }
    pub fn p1(&self) -> &RingMatrix {
        &self.p1
    }
    pub fn p2(&self) -> &RingMatrix {
        &self.p2
    }
    pub fn k0(&self) -> usize {
        self.k0
    }
    pub fn l0(&self) -> usize {
        self.l0
    }
    /// Parameter space `R^{k₀} ⊕ Ř^{ℓ₀}` of sensitive words.
    pub fn message_space(&self) -> &MixedShape {
        &self.msg_c
    }
    /// Parameter space `R^{a−k₀} ⊕ Ř^{b−ℓ₀}` of mask words.
    pub fn mask_space(&self) -> &MixedShape {
        &self.msg_d
    }
    /// First half `R^{k₀}` of the sensitive space (lookup-table indexing).
    pub fn message_x_space(&self) -> &MixedShape {
        &self.msg_cx
    }
    /// Second half `Ř^{ℓ₀}` of the sensitive space (lookup-table indexing).
    pub fn message_y_space(&self) -> &MixedShape {
        &self.msg_cy
    }
    /// Minimum Hamming distance of `C` (`None` for the zero code).
    pub fn d_c(&self) -> Option<u32> {
        self.d_c
    }
    /// Minimum Hamming distance of the dual of the first-block constituent
    /// of `D` (`None` when that dual is zero).
    pub fn d_dx_dual(&self) -> Option<u32> {
        self.d_dx_dual
    }
    /// Minimum Hamming distance of the dual of the second-block
    /// constituent of `D`.
    pub fn d_dy_dual(&self) -> Option<u32> {
        self.d_dy_dual
    }
    /// Security threshold `min{d_H(C), d_H(D^(X)⊥0), d_H(D^(Y)⊥0)}`.
    pub fn threshold(&self) -> Option<u32> {
        self.threshold
    }

    /// Encodes a message over one side's generator rows: full-period rows
    /// take coefficients in `R`, socle rows in `Ř`.
    fn encode_side(&self, gen: &MixedMatrix, free: usize, msg: &[u8]) -> Vec<u8> {
        let ring = self.shape.ring();
        let mut acc = self.shape.zero_word();
        for (i, &digit) in msg.iter().enumerate() {
            let scalar = if i < free {
                digit
            } else {
                ring.lift_code(digit)
            };
            acc = self
                .shape
                .word_add(&acc, &self.shape.word_scale(scalar, gen.row(i)));
        }
        acc
    }

    /// `x ↦ xG`, the codeword of `C` encoding the sensitive word `x`.
    pub fn encode_sensitive(&self, x: &[u8]) -> Result<Vec<u8>> {
        check_word(&self.msg_c, x)?;
        Ok(self.encode_side(&self.gen_c, self.k0, x))
    }

    /// `y ↦ yH`, the mask codeword of `D` for the mask word `y`.
    pub fn encode_mask(&self, y: &[u8]) -> Result<Vec<u8>> {
        check_word(&self.msg_d, y)?;
        Ok(self.encode_side(&self.gen_d, self.shape.a() - self.k0, y))
    }

    /// The default demonstration substitution: coordinate-wise cubing on
    /// the first half of the sensitive space, identity on the second half.
    pub fn default_nonlinear_op(&self) -> MaskedOp {
        MaskedOp::Nonlinear {
            s1: cubing_table(&self.msg_cx),
            s2: identity_table(&self.msg_cy),
        }
    }
}

/// Validates the length and digit ranges of a word against a shape.
fn check_word(shape: &MixedShape, w: &[u8]) -> Result<()> {
    if w.len() != shape.len() {
        return Err(Error::Dimension(format!(
            "word length {} does not match {:?}",
            w.len(),
            shape
        )));
    }
    for (i, &d) in w.iter().enumerate() {
        let ring = if i < shape.a() {
            shape.ring()
        } else {
            shape.qring()
        };
        if (d as usize) >= ring.size() {
            return Err(Error::Invalid(format!(
                "digit {d} at position {i} is out of range for {}",
                ring.name()
            )));
        }
    }
    Ok(())
}

/// Minimum of the defined entries; `None` entries count as +∞.
fn min_defined(vals: &[Option<u32>]) -> Option<u32> {
    vals.iter().flatten().copied().min()
}

/// The code over `R^a` generated by the first-block parts of the
/// full-period rows of a block-layout matrix.
fn x_constituent_code(m: &MixedMatrix, k0: usize) -> Result<MixedCode> {
    let shape = m.shape();
    let shape_x = MixedShape::new(shape.ring().clone(), shape.s(), shape.a(), 0)?;
    let rows: Vec<Vec<u8>> = (0..k0).map(|i| m.row(i)[..shape.a()].to_vec()).collect();
    Ok(MixedMatrix::from_rows(shape_x, &rows)?.span())
}

/// The code over `Ř^b` generated by the second-block parts of the socle
/// rows of a block-layout matrix.
fn y_constituent_code(m: &MixedMatrix, k0: usize) -> Result<MixedCode> {
    let shape = m.shape();
    let shape_y = MixedShape::new(shape.ring().clone(), shape.s(), 0, shape.b())?;
    let rows: Vec<Vec<u8>> = (k0..m.rows())
        .map(|i| m.row(i)[shape.a()..].to_vec())
        .collect();
    Ok(MixedMatrix::from_rows(shape_y, &rows)?.span())
}

/// Builds a masking scheme from the complementary pair `(c, d)` using
/// canonical block-layout generator matrices.
pub fn build_scheme(c: &MixedCode, d: &MixedCode) -> Result<MaskingScheme> {
    let not_lcp = |_| Error::Invalid("not an LCP: both codes must be weakly-free".into());
    let g = block_generator(c).map_err(not_lcp)?;
    let h = block_generator(d).map_err(not_lcp)?;
    assemble_scheme(g, h, c.clone(), d.clone())
}

/// Builds a masking scheme from explicit block-layout generator matrices,
/// which are kept as the scheme's encoders.
pub fn build_scheme_from_matrices(g: &MixedMatrix, h: &MixedMatrix) -> Result<MaskingScheme> {
    assemble_scheme(g.clone(), h.clone(), g.span(), h.span())
}

fn assemble_scheme(
    gen_c: MixedMatrix,
    gen_d: MixedMatrix,
    code_c: MixedCode,
    code_d: MixedCode,
) -> Result<MaskingScheme> {
    let shape = gen_c.shape().clone();
    if gen_d.shape() != &shape {
        return Err(Error::mismatch(
            "shape",
            format!("{:?}", shape),
            format!("{:?}", gen_d.shape()),
        ));
    }
    let (k0, l0) = split_block_form(&gen_c)?;
    let (k0d, l0d) = split_block_form(&gen_d)?;
    if k0 + k0d != shape.a() || l0 + l0d != shape.b() {
        return Err(Error::Invalid(
            "not an LCP: free ranks are not complementary".into(),
        ));
    }
    let sizes_ok = (code_c.len() as u128) * (code_d.len() as u128) == shape.module_size();
    if !sizes_ok || code_c.intersect(&code_d)?.len() != 1 {
        return Err(Error::Invalid("not an LCP".into()));
    }

    let parity_c = parity_check(&code_c)?;
    let parity_d = parity_check(&code_d)?;
    let ring = shape.ring().clone();
    let es = ring.e() - shape.s();
    let gamma_es = ring.gamma_pow(es);
    let normalizer = |gen: &MixedMatrix, parity: &MixedMatrix, free: usize, socle: usize| {
        let prod = gen.diamond(parity, 0)?;
        let target = RingMatrix::identity(ring.clone(), free)
            .block_diag(&RingMatrix::scalar_identity(ring.clone(), socle, gamma_es))?;
        prod.solve_right(&target)
    };
    let p1 = normalizer(&gen_c, &parity_d, k0, l0)?;
    let p2 = normalizer(&gen_d, &parity_c, k0d, l0d)?;

    let msg_c = MixedShape::new(ring.clone(), shape.s(), k0, l0)?;
    let msg_d = MixedShape::new(ring.clone(), shape.s(), k0d, l0d)?;
    let msg_cx = MixedShape::new(ring.clone(), shape.s(), k0, 0)?;
    let msg_cy = MixedShape::new(ring.clone(), shape.s(), 0, l0)?;

    let d_c = code_distances(&code_c).min_hamming;
    let d_dx_dual = code_distances(&x_constituent_code(&gen_d, k0d)?.dual(0)?).min_hamming;
    let d_dy_dual = code_distances(&y_constituent_code(&gen_d, k0d)?.dual(0)?).min_hamming;
    let threshold = min_defined(&[d_c, d_dx_dual, d_dy_dual]);

    Ok(MaskingScheme {
        shape,
        code_c,
        code_d,
        gen_c,
        gen_d,
        parity_c,
        parity_d,
        p1,
        p2,
        k0,
        l0,
        msg_c,
        msg_d,
        msg_cx,
        msg_cy,
        d_c,
        d_dx_dual,
        d_dy_dual,
        threshold,
    })
}

// ---------------------------------------------------------------------------
// Encoding, recovery, and the projection onto C
// ---------------------------------------------------------------------------

/// Masks the sensitive word `x` with the mask word `y`: `z = xG + yH`.
pub fn dsm_encode(scheme: &MaskingScheme, x: &[u8], y: &[u8]) -> Result<Vec<u8>> {
    let c = scheme.encode_sensitive(x)?;
    let d = scheme.encode_mask(y)?;
    Ok(scheme.shape().word_add(&c, &d))
}

/// One recovery half: `z ↦ (z ⋄ Ĥᵀ)·P`, which lands in
/// `R^free ⊕ γ^(e-s) R^socle`, followed by stripping the `γ^(e-s)` factor
/// from the socle coordinates.
fn recover_message(
    scheme: &MaskingScheme,
    z: &[u8],
    parity: &MixedMatrix,
    p: &RingMatrix,
    free: usize,
) -> Result<Vec<u8>> {
    let shape = scheme.shape();
    let ring = shape.ring();
    let es = ring.e() - shape.s();
    let zrow = MixedMatrix::from_rows(shape.clone(), &[z.to_vec()])?;
    let psi = zrow.diamond(parity, 0)?.mul(p)?;
    let mut msg = Vec::with_capacity(psi.cols());
    for j in 0..psi.cols() {
        let t = psi.get(0, j);
        if j < free {
            msg.push(t);
        } else {
            msg.push(ring.div_gamma(t, es));
        }
    }
    Ok(msg)
}

/// Recovers the sensitive word and the mask word from a masked word `z`:
/// exact for every `z` in the module.
pub fn dsm_recover(scheme: &MaskingScheme, z: &[u8]) -> Result<(Vec<u8>, Vec<u8>)> {
    check_word(scheme.shape(), z)?;
    let x = recover_message(scheme, z, &scheme.parity_d, &scheme.p1, scheme.k0)?;
    let y = recover_message(
        scheme,
        z,
        &scheme.parity_c,
        &scheme.p2,
        scheme.shape().a() - scheme.k0,
    )?;
    Ok((x, y))
}

/// Splits a received sum `z = c + d` into its codeword components: `c` is
/// the projection of `z` onto `C` along `D`, and `d = z − c`.
pub fn adder_recover(scheme: &MaskingScheme, z: &[u8]) -> Result<(Vec<u8>, Vec<u8>)> {
    check_word(scheme.shape(), z)?;
    let x = recover_message(scheme, z, &scheme.parity_d, &scheme.p1, scheme.k0)?;
    let c = scheme.encode_side(&scheme.gen_c, scheme.k0, &x);
    let d = scheme.shape().word_sub(z, &c);
    debug_assert!(
        scheme.code_c.contains(scheme.shape().encode(&c)),
        "projection must land in C"
    );
    debug_assert!(
        scheme.code_d.contains(scheme.shape().encode(&d)),
        "complement must land in D"
    );
    Ok((c, d))
}

// ---------------------------------------------------------------------------
// Masked operations
// ---------------------------------------------------------------------------

/// A computation carried out directly on masked words.
#[derive(Clone)]
pub enum MaskedOp {
    /// Add a key to the sensitive share: `z ↦ z + (key)G`.
    KeyAdd { key: Vec<u8> },
    /// Right-multiply the two halves of the sensitive word by `l1` (over
    /// `R`) and `l2` (over `Ř`).
    Linear { l1: RingMatrix, l2: RingMatrix },
    /// Substitute the two halves through lookup tables indexed by the
    /// mixed-radix encodings of the half-spaces.
    Nonlinear { s1: Vec<u64>, s2: Vec<u64> },
}

fn validate_op(scheme: &MaskingScheme, op: &MaskedOp) -> Result<()> {
    match op {
        MaskedOp::KeyAdd { key } => check_word(&scheme.msg_c, key),
        MaskedOp::Linear { l1, l2 } => {
            let ok1 = l1.ring() == scheme.shape().ring()
                && l1.rows() == scheme.k0
                && l1.cols() == scheme.k0;
            let ok2 = l2.ring() == scheme.shape().qring()
                && l2.rows() == scheme.l0
                && l2.cols() == scheme.l0;
            if !ok1 || !ok2 {
                return Err(Error::Dimension(format!(
                    "linear operation wants {0}×{0} over {1} and {2}×{2} over {3}",
                    scheme.k0,
                    scheme.shape().ring().name(),
                    scheme.l0,
                    scheme.shape().qring().name()
                )));
            }
            Ok(())
        }
        MaskedOp::Nonlinear { s1, s2 } => {
            for (table, space, label) in [
                (s1, &scheme.msg_cx, "first"),
                (s2, &scheme.msg_cy, "second"),
            ] {
                let size = space.module_size();
                if table.len() as u128 != size {
                    return Err(Error::Dimension(format!(
                        "{label} lookup table has {} entries, expected {size}",
                        table.len()
                    )));
                }
                if table.iter().any(|&v| v as u128 >= size) {
                    return Err(Error::Invalid(format!(
                        "{label} lookup table maps outside its space"
                    )));
                }
            }
            Ok(())
        }
    }
}

/// Applies `op` directly to a sensitive word — the unmasked reference
/// semantics of [`masked_op`].
pub fn plain_op(scheme: &MaskingScheme, op: &MaskedOp, x: &[u8]) -> Result<Vec<u8>> {
    check_word(&scheme.msg_c, x)?;
    validate_op(scheme, op)?;
    let space = &scheme.msg_c;
    match op {
        MaskedOp::KeyAdd { key } => Ok(space.word_add(x, key)),
        MaskedOp::Linear { l1, l2 } => {
            let x1 = RingMatrix::from_rows(space.ring().clone(), &[x[..scheme.k0].to_vec()])?;
            let x2 = RingMatrix::from_rows(space.qring().clone(), &[x[scheme.k0..].to_vec()])?;
            let mut out = x1.mul(l1)?.row(0).to_vec();
            out.extend_from_slice(x2.mul(l2)?.row(0));
            Ok(out)
        }
        MaskedOp::Nonlinear { s1, s2 } => {
            let ix = scheme.msg_cx.encode(&x[..scheme.k0]);
            let iy = scheme.msg_cy.encode(&x[scheme.k0..]);
            let mut out = scheme.msg_cx.decode(s1[ix as usize]);
            out.extend_from_slice(&scheme.msg_cy.decode(s2[iy as usize]));
            Ok(out)
        }
    }
}

/// Applies `op` on the masked representation: the result encodes the
/// transformed sensitive word under the original mask word.  Key addition
/// never unmasks; the other operations work through the two projections.
pub fn masked_op(scheme: &MaskingScheme, z: &[u8], op: &MaskedOp) -> Result<Vec<u8>> {
    check_word(scheme.shape(), z)?;
    validate_op(scheme, op)?;
    match op {
        MaskedOp::KeyAdd { key } => {
            let shift = scheme.encode_sensitive(key)?;
            Ok(scheme.shape().word_add(z, &shift))
        }
        _ => {
            let (x, y) = dsm_recover(scheme, z)?;
            let image = plain_op(scheme, op, &x)?;
            dsm_encode(scheme, &image, &y)
        }
    }
}

/// Lookup table of the coordinate-wise cubing map on a half-space.
pub fn cubing_table(space: &MixedShape) -> Vec<u64> {
    assert!(
        space.module_size() <= TABLE_LIMIT,
        "lookup table over {space:?} would be too large"
    );
    (0..space.module_size() as u64)
        .map(|idx| {
            let w = space.decode(idx);
            let cubed: Vec<u8> = w
                .iter()
                .enumerate()
                .map(|(i, &d)| {
                    let ring = if i < space.a() {
                        space.ring()
                    } else {
                        space.qring()
                    };
                    ring.mul(d, ring.mul(d, d))
                })
                .collect();
            space.encode(&cubed)
        })
        .collect()
}

/// Lookup table of the identity map on a half-space.
pub fn identity_table(space: &MixedShape) -> Vec<u64> {
    assert!(
        space.module_size() <= TABLE_LIMIT,
        "lookup table over {space:?} would be too large"
    );
    (0..space.module_size() as u64).collect()
}

// ---------------------------------------------------------------------------
// Fault injection
// ---------------------------------------------------------------------------

/// Classification of a fault `ε` injected into a masked word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultOutcome {
    /// The fault disturbs the mask share and re-checking the mask catches
    /// it.
    Detected,
    /// `ε = 0`: the word is untouched.
    UndetectedBenign,
    /// `ε` is a nonzero codeword of `C`: it silently corrupts the
    /// sensitive share.
    UndetectedCorrupting,
}

/// Classifies the fault `ε` injected into the masked word `z`.  Writing
/// `ε = ε₁G + ε₂H`, the receiver sees the mask word disturbed by `ε₂` and
/// detects the fault exactly when `ε₂ ≠ 0`; in particular every fault with
/// `0 < w_H(ε) < d_H(C)` is detected.
pub fn fia_detect(scheme: &MaskingScheme, z: &[u8], eps: &[u8]) -> Result<FaultOutcome> {
    check_word(scheme.shape(), z)?;
    check_word(scheme.shape(), eps)?;
    let (_, eps_mask) = dsm_recover(scheme, eps)?;
    if eps_mask.iter().any(|&d| d != 0) {
        Ok(FaultOutcome::Detected)
    } else if eps.iter().all(|&d| d == 0) {
        Ok(FaultOutcome::UndetectedBenign)
    } else {
        Ok(FaultOutcome::UndetectedCorrupting)
    }
}

// ---------------------------------------------------------------------------
// Side-channel probing
// ---------------------------------------------------------------------------

/// Report of a probing check for probe sets `(T₁, T₂)` on the two blocks.
#[derive(Clone, Debug, Serialize)]
pub struct ScaReport {
    pub t1: Vec<usize>,
    pub t2: Vec<usize>,
    /// Probing bound of the first block, `d_H(D^(X)⊥0)`.
    pub x_bound: Option<u32>,
    /// Probing bound of the second block, `d_H(D^(Y)⊥0)`.
    pub y_bound: Option<u32>,
    /// `|T₁| < x_bound` and `|T₂| < y_bound` (absent bounds count as +∞).
    pub safe: bool,
    /// Whether the mask generator rows restricted to `(T₁|T₂)` span the
    /// restricted module — the structural reason safe probes leak nothing.
    pub restriction_spans: bool,
    /// Whether the probed tuple is uniform over the restricted module as
    /// the mask word sweeps its space.
    pub leak_uniform: bool,
    /// Number of distinct probed tuples seen.
    pub leak_tuples: u64,
    /// Common multiplicity of each tuple when uniform; 0 otherwise.
    pub leak_multiplicity: u64,
}

fn validate_probe_set(t: &[usize], len: usize, which: &str) -> Result<()> {
    for (i, &j) in t.iter().enumerate() {
        if j >= len {
            return Err(Error::Invalid(format!(
                "{which}-block probe index {j} is out of range (block length {len})"
            )));
        }
        if i > 0 && t[i - 1] >= j {
            return Err(Error::Invalid(format!(
                "{which}-block probe indices must be strictly increasing"
            )));
        }
    }
    Ok(())
}

/// Checks resistance against probes on first-block positions `T₁` and
/// second-block positions `T₂`: the scheme is safe when `|T₁|` and `|T₂|`
/// stay below the two dual distances of `D`'s constituents.  The check
/// also verifies the structural span of the restricted mask matrix and
/// sweeps every mask word to histogram the probed tuple.
pub fn sca_leakage_check(
    scheme: &MaskingScheme,
    t1: &[usize],
    t2: &[usize],
) -> Result<ScaReport> {
    let shape = scheme.shape();
    validate_probe_set(t1, shape.a(), "first")?;
    validate_probe_set(t2, shape.b(), "second")?;
    let safe = (t1.len() as u32) < scheme.d_dx_dual.unwrap_or(u32::MAX)
        && (t2.len() as u32) < scheme.d_dy_dual.unwrap_or(u32::MAX);

    let rshape = MixedShape::new(shape.ring().clone(), shape.s(), t1.len(), t2.len())?;
    let restrict = |w: &[u8]| -> Vec<u8> {
        t1.iter()
            .map(|&j| w[j])
            .chain(t2.iter().map(|&j| w[shape.a() + j]))
            .collect()
    };
    let restricted_rows: Vec<Vec<u8>> = (0..scheme.gen_d.rows())
        .map(|i| restrict(scheme.gen_d.row(i)))
        .collect();
    let restriction_spans = type_from_rows(&rshape, &restricted_rows)
        == CodeType::weakly_free(t1.len(), t2.len(), shape.ring().e(), shape.s());

    let mut counts: HashMap<u64, u64> = HashMap::new();
    for &idx in scheme.code_d.words() {
        let w = shape.decode(idx);
        *counts.entry(rshape.encode(&restrict(&w))).or_insert(0) += 1;
    }
    let leak_tuples = counts.len() as u64;
    let min = counts.values().copied().min().unwrap_or(0);
    let max = counts.values().copied().max().unwrap_or(0);
    let leak_uniform = (leak_tuples as u128) == rshape.module_size() && min == max;
    let leak_multiplicity = if leak_uniform { max } else { 0 };

    Ok(ScaReport {
        t1: t1.to_vec(),
        t2: t2.to_vec(),
        x_bound: scheme.d_dx_dual,
        y_bound: scheme.d_dy_dual,
        safe,
        restriction_spans,
        leak_uniform,
        leak_tuples,
        leak_multiplicity,
    })
}

/// Whether the selected columns of `m` are independent with full period
/// over the coefficient ring — equivalently, whether their residues are
/// linearly independent over the residue field.
pub fn columns_full_period_independent(m: &RingMatrix, cols: &[usize]) -> Result<bool> {
    let sel = RingMatrix::from_fn(m.ring().clone(), cols.len(), m.rows(), |i, j| {
        m.get(j, cols[i])
    });
    Ok(sel.residue_matrix().field_rank()? == cols.len())
}

// ---------------------------------------------------------------------------
// Security thresholds
// ---------------------------------------------------------------------------

/// Which scheme construction a threshold is computed for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdVariant {
    /// The scheme as built on `(C, D)`.
    General,
    /// The companion pair generated by the diagonal blocks alone.
    Separable,
    /// Both matrices reinterpreted over `R` on `a + b` coordinates, with
    /// second-block entries lifted canonically.
    Embedded,
}

/// Distances and security thresholds of a scheme and of its separable and
/// single-ring comparison constructions.
#[derive(Clone, Debug, Serialize)]
pub struct ThresholdReport {
    pub variant: ThresholdVariant,
    pub d_c: Option<u32>,
    pub d_dx_dual: Option<u32>,
    pub d_dy_dual: Option<u32>,
    pub general_threshold: Option<u32>,
    /// Distance of the first-block constituent of `C`.
    pub d_cx: Option<u32>,
    /// Distance of the second-block constituent of `C`.
    pub d_cy: Option<u32>,
    pub separable_threshold: Option<u32>,
    pub d_c_embedded: Option<u32>,
    pub d_d_dual_embedded: Option<u32>,
    pub embedded_threshold: Option<u32>,
    /// Threshold of the requested variant.
    pub threshold: Option<u32>,
}

/// Reinterprets a block-layout matrix over `R` alone: second-block entries
/// are lifted canonically and appended as extra `R` coordinates.
fn embed_matrix(m: &MixedMatrix) -> Result<MixedMatrix> {
    let shape = m.shape();
    let ring = shape.ring();
    let eshape = MixedShape::new(ring.clone(), shape.s(), shape.len(), 0)?;
    let rows: Vec<Vec<u8>> = (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            row[..shape.a()]
                .iter()
                .copied()
                .chain(row[shape.a()..].iter().map(|&d| ring.lift_code(d)))
                .collect()
        })
        .collect();
    MixedMatrix::from_rows(eshape, &rows)
}

/// Euclidean dual of an embedded code, through its parity-check matrix
/// when the code is weakly-free and by an ambient scan otherwise.
fn embedded_dual(c: &MixedCode) -> Result<MixedCode> {
    match parity_check(c) {
        Ok(h) => Ok(h.span()),
        Err(Error::NotWeaklyFree(_)) => c.dual(0),
        Err(e) => Err(e),
    }
}

/// Computes the security threshold of the scheme for the requested
/// variant, alongside the comparison values of the other two variants:
/// `min{d_H(C), d_H(D^(X)⊥0), d_H(D^(Y)⊥0)}` in general, the minimum over
/// the four block-constituent distances for the separable companion, and
/// `min{d_H(C_emb), d_H(D_emb^⊥0)}` for the single-ring embedding.
pub fn security_threshold(
    scheme: &MaskingScheme,
    variant: ThresholdVariant,
) -> Result<ThresholdReport> {
    let d_c = scheme.d_c;
    let d_dx_dual = scheme.d_dx_dual;
    let d_dy_dual = scheme.d_dy_dual;
    let general_threshold = min_defined(&[d_c, d_dx_dual, d_dy_dual]);

    let d_cx = code_distances(&x_constituent_code(&scheme.gen_c, scheme.k0)?).min_hamming;
    let d_cy = code_distances(&y_constituent_code(&scheme.gen_c, scheme.k0)?).min_hamming;
    let separable_threshold = min_defined(&[d_cx, d_cy, d_dx_dual, d_dy_dual]);

    let c_emb = embed_matrix(&scheme.gen_c)?.span();
    let d_emb = embed_matrix(&scheme.gen_d)?.span();
    let d_c_embedded = code_distances(&c_emb).min_hamming;
    let d_d_dual_embedded = code_distances(&embedded_dual(&d_emb)?).min_hamming;
    let embedded_threshold = min_defined(&[d_c_embedded, d_d_dual_embedded]);

    let threshold = match variant {
        ThresholdVariant::General => general_threshold,
        ThresholdVariant::Separable => separable_threshold,
        ThresholdVariant::Embedded => embedded_threshold,
    };
    Ok(ThresholdReport {
        variant,
        d_c,
        d_dx_dual,
        d_dy_dual,
        general_threshold,
        d_cx,
        d_cy,
        separable_threshold,
        d_c_embedded,
        d_d_dual_embedded,
        embedded_threshold,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_submodules;
    use crate::metrics::hamming_weight;
    use crate::ring::ChainRing;
    use itertools::Itertools;

    fn shape(ring: &str, s: usize, a: usize, b: usize) -> MixedShape {
        MixedShape::new(ChainRing::parse_spec(ring).unwrap(), s, a, b).unwrap()
    }

    fn matrix(shape: &MixedShape, rows: &[Vec<u8>]) -> MixedMatrix {
        MixedMatrix::from_rows(shape.clone(), rows).unwrap()
    }

    /// The running non-separable pair over Z4/Z2 at block-length (6, 5):
    /// a 2-row sensitive code and a 9-row mask code.
    fn demo_pair_z4() -> (MixedMatrix, MixedMatrix) {
        let sh = shape("Z4", 1, 6, 5);
        let g = matrix(
            &sh,
            &[
                vec![1, 1, 1, 1, 1, 0, 0, 1, 1, 0, 1],
                vec![0, 0, 2, 2, 2, 2, 1, 1, 1, 0, 0],
            ],
        );
        let mut rows = Vec::new();
        for i in 0..5 {
            // [I₅ | column of 3s] in the first block, first column of ones
            // in the second block.
            let mut r = vec![0u8; 11];
            r[i] = 1;
            r[5] = 3;
            r[6] = 1;
            rows.push(r);
        }
        for i in 0..4 {
            // γ·(last column of ones) in the first block, a banded pair of
            // ones in the second block.
            let mut r = vec![0u8; 11];
            r[5] = 2;
            r[6 + i] = 1;
            r[6 + i + 1] = 1;
            rows.push(r);
        }
        let h = matrix(&sh, &rows);
        (g, h)
    }

    /// The worked pair over F8[u]/(u²) with F8 second block at (3, 3);
    /// digit codes: ξ = 2, u = 8.
    fn demo_pair_f8() -> (MixedMatrix, MixedMatrix) {
        let sh = shape("F8u2", 1, 3, 3);
        let g = matrix(
            &sh,
            &[
                vec![1, 1, 1, 0, 0, 1],
                vec![0, 8, 0, 1, 0, 0],
                vec![0, 0, 8, 0, 1, 0],
            ],
        );
        let h = matrix(
            &sh,
            &[
                vec![0, 1, 0, 0, 0, 0],
                vec![0, 0, 1, 0, 0, 0],
                vec![0, 0, 0, 0, 0, 1],
            ],
        );
        (g, h)
    }

    /// Shapes with |M| ≤ 256 covering every supported ring family and both
    /// quotient depths of Z8.
    fn sweep_shapes() -> Vec<MixedShape> {
        vec![
            shape("Z4", 1, 1, 1),
            shape("Z4", 1, 2, 1),
            shape("Z4", 1, 1, 2),
            shape("Z4", 1, 2, 2),
            shape("Z8", 1, 1, 1),
            shape("Z8", 2, 1, 1),
            shape("Z9", 1, 1, 1),
            shape("Z27", 2, 1, 1),
            shape("F4u2", 1, 1, 1),
        ]
    }

    fn all_weakly_free(sh: &MixedShape) -> Vec<MixedCode> {
        enumerate_submodules(sh, None)
            .unwrap()
            .into_iter()
            .filter(MixedCode::is_weakly_free)
            .collect()
    }

    fn assert_scheme_invariants(scheme: &MaskingScheme) {
        let ring = scheme.shape().ring();
        let es = ring.e() - scheme.shape().s();
        let gamma_es = ring.gamma_pow(es);
        assert!(
            scheme
                .generator_c()
                .diamond(scheme.parity_c(), 0)
                .unwrap()
                .is_zero(),
            "G must annihilate its own parity-check matrix"
        );
        assert!(
            scheme
                .generator_d()
                .diamond(scheme.parity_d(), 0)
                .unwrap()
                .is_zero(),
            "H must annihilate its own parity-check matrix"
        );
        let target1 = RingMatrix::identity(ring.clone(), scheme.k0())
            .block_diag(&RingMatrix::scalar_identity(
                ring.clone(),
                scheme.l0(),
                gamma_es,
            ))
            .unwrap();
        let prod1 = scheme
            .generator_c()
            .diamond(scheme.parity_d(), 0)
            .unwrap()
            .mul(scheme.p1())
            .unwrap();
        assert_eq!(prod1, target1, "(G ⋄ Ĥᵀ)P₁ must be the scaled identity");
        let free_d = scheme.shape().a() - scheme.k0();
        let socle_d = scheme.shape().b() - scheme.l0();
        let target2 = RingMatrix::identity(ring.clone(), free_d)
            .block_diag(&RingMatrix::scalar_identity(ring.clone(), socle_d, gamma_es))
            .unwrap();
        let prod2 = scheme
            .generator_d()
            .diamond(scheme.parity_c(), 0)
            .unwrap()
            .mul(scheme.p2())
            .unwrap();
        assert_eq!(prod2, target2, "(H ⋄ Ĝᵀ)P₂ must be the scaled identity");
    }

    /// Every message pair of a scheme, as digit words.
    fn all_messages(space: &MixedShape) -> Vec<Vec<u8>> {
        (0..space.module_size() as u64)
            .map(|i| space.decode(i))
            .collect()
    }

    // -- parity-check matrices ---------------------------------------------

    #[test]
    fn parity_check_spans_the_annihilator_dual_on_every_small_weakly_free_code() {
        for sh in sweep_shapes() {
            for code in all_weakly_free(&sh) {
                let h = parity_check(&code).unwrap();
                let span = h.span();
                let dual = code.dual(0).unwrap();
                assert_eq!(
                    span.words(),
                    dual.words(),
                    "parity span must equal the dual of a code of type {} in {sh:?}",
                    code.code_type()
                );
                let t = span.code_type();
                let sf = code.standard_form();
                assert_eq!(
                    (t.k[0], t.l[0]),
                    (sh.a() - sf.k0, sh.b() - sf.l0),
                    "dual type must complement the code type in {sh:?}"
                );
                assert!(t.is_weakly_free(), "dual of a weakly-free code is weakly-free");
            }
        }
    }

    #[test]
    fn parity_check_of_zero_code_generates_the_full_module() {
        let sh = shape("Z8", 1, 2, 1);
        let h = parity_check(&MixedCode::zero(sh.clone())).unwrap();
        assert_eq!(h.rows(), 3, "one dual generator per coordinate");
        assert_eq!(
            h.span().len() as u128,
            sh.module_size(),
            "dual of the zero code is the whole module"
        );
    }

    #[test]
    fn parity_check_of_full_module_is_empty() {
        let sh = shape("Z4", 1, 1, 2);
        let h = parity_check(&MixedCode::full(sh)).unwrap();
        assert_eq!(h.rows(), 0, "the full module has a trivial dual");
    }

    #[test]
    fn parity_check_rejects_non_weakly_free_codes() {
        let sh = shape("Z4", 1, 1, 1);
        let code = matrix(&sh, &[vec![2, 0]]).span();
        assert!(
            matches!(parity_check(&code), Err(Error::NotWeaklyFree(_))),
            "a code generated by 2 over Z4 has no block-layout generators"
        );
    }

    #[test]
    fn parity_check_of_the_f8_mask_code_matches_the_worked_matrix() {
        let (_, h) = demo_pair_f8();
        let sh = h.shape().clone();
        let expected = matrix(
            &sh,
            &[
                vec![1, 0, 0, 0, 0, 0],
                vec![0, 0, 0, 1, 0, 0],
                vec![0, 0, 0, 0, 1, 0],
            ],
        );
        assert_eq!(
            parity_check(&h.span()).unwrap(),
            expected,
            "parity-check matrix of the mask code must match the worked value"
        );
    }

    // -- complementarity criteria ------------------------------------------

    #[test]
    fn all_three_criteria_agree_on_every_weakly_free_pair_of_small_shapes() {
        for sh in sweep_shapes() {
            let codes = all_weakly_free(&sh);
            let mut lcp_count = 0usize;
            for c in &codes {
                for d in &codes {
                    let direct = is_lcp(c, d, LcpCriterion::Direct).unwrap().is_lcp;
                    let gram = is_lcp(c, d, LcpCriterion::Gram).unwrap().is_lcp;
                    let residue = is_lcp(c, d, LcpCriterion::Residue).unwrap().is_lcp;
                    assert_eq!(
                        direct, gram,
                        "direct and product-type verdicts must agree for types {} / {} in {sh:?}",
                        c.code_type(),
                        d.code_type()
                    );
                    assert_eq!(
                        direct, residue,
                        "direct and residue verdicts must agree for types {} / {} in {sh:?}",
                        c.code_type(),
                        d.code_type()
                    );
                    if direct {
                        lcp_count += 1;
                        let tc = c.code_type();
                        let td = d.code_type();
                        assert_eq!(
                            (tc.k[0] + td.k[0], tc.l[0] + td.l[0]),
                            (sh.a(), sh.b()),
                            "complementary pairs must have complementary free ranks"
                        );
                    }
                }
            }
            assert!(
                lcp_count > 0,
                "every small shape admits at least the trivial split, none found in {sh:?}"
            );
        }
    }

    #[test]
    fn direct_criterion_reports_a_nonzero_intersection_witness() {
        let sh = shape("Z4", 1, 2, 1);
        let c = matrix(&sh, &[vec![1, 0, 0]]).span();
        let d = matrix(&sh, &[vec![1, 0, 0], vec![0, 0, 1]]).span();
        let verdict = is_lcp(&c, &d, LcpCriterion::Direct).unwrap();
        assert!(!verdict.is_lcp, "overlapping codes are not complementary");
        match verdict.evidence {
            LcpEvidence::Direct {
                intersection_witness: Some(w),
                ..
            } => assert_eq!(w, "1 0 | 0", "the witness is the shared generator"),
            other => panic!("expected a direct witness, got {other:?}"),
        }
    }

    #[test]
    fn self_pairing_a_nonzero_proper_code_is_never_complementary() {
        let sh = shape("Z9", 1, 1, 1);
        let c = matrix(&sh, &[vec![1, 0]]).span();
        for criterion in [LcpCriterion::Direct, LcpCriterion::Gram, LcpCriterion::Residue] {
            assert!(
                !is_lcp(&c, &c, criterion).unwrap().is_lcp,
                "C ∩ C = C is nonzero, so (C, C) cannot be complementary"
            );
        }
    }

    #[test]
    fn is_lcp_rejects_codes_from_different_modules() {
        let c = MixedCode::full(shape("Z4", 1, 1, 1));
        let d = MixedCode::zero(shape("Z4", 1, 2, 1));
        assert!(
            is_lcp(&c, &d, LcpCriterion::Direct).is_err(),
            "shape mismatch must be rejected"
        );
    }

    #[test]
    fn both_demo_pairs_are_complementary_under_every_criterion() {
        for (g, h) in [demo_pair_z4(), demo_pair_f8()] {
            let c = g.span();
            let d = h.span();
            for criterion in [LcpCriterion::Direct, LcpCriterion::Gram, LcpCriterion::Residue] {
                assert!(
                    is_lcp(&c, &d, criterion).unwrap().is_lcp,
                    "the demo pair must be complementary under {criterion:?}"
                );
            }
        }
    }

    // -- separable pairs -----------------------------------------------------

    #[test]
    fn coordinate_split_pair_is_separable_and_complementary() {
        let sh = shape("Z4", 1, 2, 2);
        let c = matrix(&sh, &[vec![1, 0, 0, 0], vec![0, 0, 1, 0]]).span();
        let d = matrix(&sh, &[vec![0, 1, 0, 0], vec![0, 0, 0, 1]]).span();
        assert!(is_separable(&c), "a coordinate split is separable");
        assert!(
            separable_lcp_check(&c, &d).unwrap(),
            "splitting the coordinates yields a complementary pair"
        );
    }

    #[test]
    fn separable_check_rejects_equal_nonzero_factors() {
        let sh = shape("Z4", 1, 2, 2);
        let c = matrix(&sh, &[vec![1, 0, 0, 0], vec![0, 0, 1, 0]]).span();
        assert!(
            !separable_lcp_check(&c, &c).unwrap(),
            "equal nonzero constituents can never be complementary"
        );
    }

    #[test]
    fn separable_check_errors_on_a_non_separable_code() {
        let (g, h) = demo_pair_z4();
        let c = g.span();
        let d = h.span();
        assert!(!is_separable(&c), "the demo sensitive code is entangled");
        assert!(!is_separable(&d), "the demo mask code is entangled");
        assert!(
            separable_lcp_check(&c, &d).is_err(),
            "non-separable inputs must be rejected"
        );
    }

    #[test]
    fn separable_companions_of_the_z4_demo_pair_form_an_lcp() {
        let (g, h) = demo_pair_z4();
        let sh = g.shape().clone();
        let zero_y = |row: &[u8]| {
            let mut r = row.to_vec();
            for y in r.iter_mut().skip(sh.a()) {
                *y = 0;
            }
            r
        };
        let zero_x = |row: &[u8]| {
            let mut r = row.to_vec();
            for x in r.iter_mut().take(sh.a()) {
                *x = 0;
            }
            r
        };
        let c_sep = matrix(&sh, &[zero_y(g.row(0)), zero_x(g.row(1))]).span();
        let d_rows: Vec<Vec<u8>> = (0..5)
            .map(|i| zero_y(h.row(i)))
            .chain((5..9).map(|i| zero_x(h.row(i))))
            .collect();
        let d_sep = matrix(&sh, &d_rows).span();
        assert!(is_separable(&c_sep), "the companion is separable by construction");
        assert!(
            separable_lcp_check(&c_sep, &d_sep).unwrap(),
            "the separable companions must form a complementary pair"
        );
        assert!(
            is_lcp(&c_sep, &d_sep, LcpCriterion::Direct).unwrap().is_lcp,
            "the residue reduction must agree with the direct verdict"
        );
        let scheme = build_scheme(&c_sep, &d_sep).unwrap();
        assert_eq!(
            scheme.threshold(),
            Some(3),
            "the separable companion scheme is weaker than the entangled original"
        );
    }

    #[test]
    fn separable_check_agrees_with_the_direct_verdict_on_small_shapes() {
        for sh in [shape("Z4", 1, 1, 1), shape("Z4", 1, 2, 1), shape("Z9", 1, 1, 1)] {
            let separable: Vec<MixedCode> = all_weakly_free(&sh)
                .into_iter()
                .filter(is_separable)
                .collect();
            assert!(!separable.is_empty(), "separable codes exist in {sh:?}");
            for c in &separable {
                for d in &separable {
                    assert_eq!(
                        separable_lcp_check(c, d).unwrap(),
                        is_lcp(c, d, LcpCriterion::Direct).unwrap().is_lcp,
                        "residue reduction must match the direct verdict in {sh:?}"
                    );
                }
            }
        }
    }

    // -- scheme construction -------------------------------------------------

    #[test]
    fn f8_scheme_normalizers_are_identities_and_the_gram_product_is_diagonal() {
        let (g, h) = demo_pair_f8();
        let scheme = build_scheme_from_matrices(&g, &h).unwrap();
        assert_scheme_invariants(&scheme);
        let ring = scheme.shape().ring().clone();
        let prod = g.diamond(scheme.parity_d(), 0).unwrap();
        let expected = RingMatrix::from_rows(
            ring.clone(),
            &[vec![1, 0, 0], vec![0, 8, 0], vec![0, 0, 8]],
        )
        .unwrap();
        assert_eq!(prod, expected, "G ⋄ Ĥᵀ must be diag(1, u, u)");
        assert_eq!(
            scheme.p1(),
            &RingMatrix::identity(ring.clone(), 3),
            "the first normalizer is the identity"
        );
        assert_eq!(
            scheme.p2(),
            &RingMatrix::identity(ring, 3),
            "the second normalizer is the identity"
        );
        assert_eq!((scheme.k0(), scheme.l0()), (1, 2), "sensitive split is {{1; 2}}");
    }

    #[test]
    fn build_scheme_rejects_pairs_that_are_not_complementary() {
        let sh = shape("Z4", 1, 2, 1);
        let c = matrix(&sh, &[vec![1, 0, 0]]).span();
        let overlapping = matrix(&sh, &[vec![1, 0, 0], vec![0, 0, 1]]).span();
        let err = build_scheme(&c, &overlapping).unwrap_err();
        assert!(
            err.to_string().contains("not an LCP"),
            "expected a complementarity failure, got: {err}"
        );
        let non_weakly_free = matrix(&sh, &[vec![2, 0, 0]]).span();
        let err = build_scheme(&c, &non_weakly_free).unwrap_err();
        assert!(
            err.to_string().contains("not an LCP"),
            "expected a weak-freeness failure, got: {err}"
        );
    }

    #[test]
    fn degenerate_full_and_zero_split_has_threshold_one() {
        let sh = shape("Z4", 1, 2, 2);
        let scheme = build_scheme(&MixedCode::full(sh.clone()), &MixedCode::zero(sh)).unwrap();
        assert_scheme_invariants(&scheme);
        assert_eq!(
            scheme.threshold(),
            Some(1),
            "masking the full module detects nothing beyond weight 0"
        );
        let report = security_threshold(&scheme, ThresholdVariant::General).unwrap();
        assert_eq!(report.threshold, Some(1));
        assert_eq!(report.d_c, Some(1), "the full module has distance 1");
        // The mask side is the zero code, so both mask words and the second
        // normalizer are empty.
        assert_eq!(scheme.p2().rows(), 0, "no mask rows means a size-0 normalizer");
        let (x, y) = dsm_recover(&scheme, &[1, 2, 1, 0]).unwrap();
        assert_eq!(y, Vec::<u8>::new(), "the mask word is empty");
        assert_eq!(
            scheme.encode_sensitive(&x).unwrap(),
            vec![1, 2, 1, 0],
            "recovery inverts encoding on the full module"
        );
    }

    #[test]
    fn zero_sensitive_code_has_undefined_distance_and_threshold() {
        let sh = shape("Z4", 1, 1, 1);
        let scheme = build_scheme(&MixedCode::zero(sh.clone()), &MixedCode::full(sh)).unwrap();
        assert_eq!(scheme.d_c(), None, "the zero code has no nonzero word");
        assert_eq!(scheme.threshold(), None, "no distance, no threshold");
        let (x, y) = dsm_recover(&scheme, &[3, 1]).unwrap();
        assert_eq!(x, Vec::<u8>::new(), "the sensitive word is empty");
        assert_eq!(scheme.encode_mask(&y).unwrap(), vec![3, 1]);
    }

    // -- encoding and recovery ----------------------------------------------

    #[test]
    fn f8_demo_transcript_masks_and_recovers_the_worked_words() {
        let (g, h) = demo_pair_f8();
        let scheme = build_scheme_from_matrices(&g, &h).unwrap();
        let x = vec![2u8, 1, 0];
        let y = vec![1u8, 1, 0];
        let c = scheme.encode_sensitive(&x).unwrap();
        assert_eq!(c, vec![2, 10, 2, 1, 0, 2], "c = (ξ, ξ+u, ξ | 1, 0, ξ)");
        let d = scheme.encode_mask(&y).unwrap();
        assert_eq!(d, vec![0, 1, 1, 0, 0, 0], "d = (0, 1, 1 | 0, 0, 0)");
        let z = dsm_encode(&scheme, &x, &y).unwrap();
        assert_eq!(z, vec![2, 11, 3, 1, 0, 2], "z = (ξ, ξ+u+1, ξ+1 | 1, 0, ξ)");
        let (rx, ry) = dsm_recover(&scheme, &z).unwrap();
        assert_eq!(rx, x, "the sensitive word is recovered exactly");
        assert_eq!(ry, y, "the mask word is recovered exactly");
        let (rc, rd) = adder_recover(&scheme, &z).unwrap();
        assert_eq!(rc, c, "the sum splits back into the first codeword");
        assert_eq!(rd, d, "the sum splits back into the second codeword");
    }

    #[test]
    fn encoding_with_a_zero_mask_lands_in_the_sensitive_code() {
        let (g, h) = demo_pair_z4();
        let scheme = build_scheme_from_matrices(&g, &h).unwrap();
        let x = vec![3u8, 1];
        let zero_y = vec![0u8; scheme.mask_space().len()];
        let z = dsm_encode(&scheme, &x, &zero_y).unwrap();
        assert!(
            scheme.code_c().contains(scheme.shape().encode(&z)),
            "an unmasked encoding is a codeword of C"
        );
        let z0 = dsm_encode(&scheme, &vec![0u8; 2], &zero_y).unwrap();
        assert_eq!(z0, scheme.shape().zero_word(), "zero encodes to zero");
    }

    #[test]
    fn dsm_encode_rejects_malformed_messages() {
        let (g, h) = demo_pair_f8();
        let scheme = build_scheme_from_matrices(&g, &h).unwrap();
        assert!(
            dsm_encode(&scheme, &[2, 1], &[1, 1, 0]).is_err(),
            "short sensitive word must be rejected"
        );
        assert!(
            dsm_encode(&scheme, &[2, 9, 0], &[1, 1, 0]).is_err(),
            "digit 9 is outside the F8 quotient alphabet"
        );
    }

    #[test]
    fn recovery_round_trips_every_message_pair_on_small_schemes() {
        for sh in [shape("Z4", 1, 1, 1), shape("Z4", 1, 2, 2), shape("Z8", 2, 1, 1)] {
            let codes = all_weakly_free(&sh);
            for c in &codes {
                for d in &codes {
                    if !is_lcp(c, d, LcpCriterion::Direct).unwrap().is_lcp {
                        continue;
                    }
                    let scheme = build_scheme(c, d).unwrap();
                    assert_scheme_invariants(&scheme);
                    for x in all_messages(scheme.message_space()) {
                        for y in all_messages(scheme.mask_space()) {
                            let z = dsm_encode(&scheme, &x, &y).unwrap();
                            let (rx, ry) = dsm_recover(&scheme, &z).unwrap();
                            assert_eq!(
                                (rx, ry),
                                (x.clone(), y.clone()),
                                "recovery must invert encoding in {sh:?}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn the_adder_projection_is_idempotent_with_image_c_and_kernel_d() {
        let sh = shape("Z4", 1, 2, 1);
        let codes = all_weakly_free(&sh);
        for c in &codes {
            for d in &codes {
                if !is_lcp(c, d, LcpCriterion::Direct).unwrap().is_lcp {
                    continue;
                }
                let scheme = build_scheme(c, d).unwrap();
                for idx in 0..sh.module_size() as u64 {
                    let z = sh.decode(idx);
                    let (cw, dw) = adder_recover(&scheme, &z).unwrap();
                    assert!(
                        scheme.code_c().contains(sh.encode(&cw)),
                        "the projection lands in C"
                    );
                    assert!(
                        scheme.code_d().contains(sh.encode(&dw)),
                        "the complement lands in D"
                    );
                    assert_eq!(
                        sh.word_add(&cw, &dw),
                        z,
                        "the two components sum back to the input"
                    );
                    let (cc, _) = adder_recover(&scheme, &cw).unwrap();
                    assert_eq!(cc, cw, "projecting twice changes nothing");
                }
                // Kernel: the projection annihilates exactly the mask code.
                for &idx in d.words() {
                    let (cw, _) = adder_recover(&scheme, &sh.decode(idx)).unwrap();
                    assert_eq!(cw, sh.zero_word(), "mask words project to zero");
                }
            }
        }
    }

    // -- masked operations ----------------------------------------------------

    #[test]
    fn masked_operations_commute_with_their_plain_counterparts() {
        let sh = shape("Z4", 1, 2, 1);
        let codes = all_weakly_free(&sh);
        for c in &codes {
            for d in &codes {
                if !is_lcp(c, d, LcpCriterion::Direct).unwrap().is_lcp {
                    continue;
                }
                let scheme = build_scheme(c, d).unwrap();
                let k0 = scheme.k0();
                let l0 = scheme.l0();
                let mut ops = vec![scheme.default_nonlinear_op()];
                let keys = all_messages(scheme.message_space());
                ops.push(MaskedOp::KeyAdd {
                    key: keys.last().unwrap().clone(),
                });
                ops.push(MaskedOp::KeyAdd {
                    key: vec![0; scheme.message_space().len()],
                });
                ops.push(MaskedOp::Linear {
                    l1: RingMatrix::from_fn(sh.ring().clone(), k0, k0, |_, _| 1),
                    l2: RingMatrix::from_fn(sh.qring().clone(), l0, l0, |_, _| 1),
                });
                ops.push(MaskedOp::Linear {
                    l1: RingMatrix::identity(sh.ring().clone(), k0),
                    l2: RingMatrix::identity(sh.qring().clone(), l0),
                });
                for op in &ops {
                    for idx in 0..sh.module_size() as u64 {
                        let z = sh.decode(idx);
                        let (x, y) = dsm_recover(&scheme, &z).unwrap();
                        let z2 = masked_op(&scheme, &z, op).unwrap();
                        let (x2, y2) = dsm_recover(&scheme, &z2).unwrap();
                        assert_eq!(
                            x2,
                            plain_op(&scheme, op, &x).unwrap(),
                            "the masked operation must transform the sensitive word"
                        );
                        assert_eq!(y2, y, "the mask word must never change");
                    }
                }
            }
        }
    }

    #[test]
    fn key_addition_with_zero_key_and_identity_linear_op_fix_everything() {
        let (g, h) = demo_pair_f8();
        let scheme = build_scheme_from_matrices(&g, &h).unwrap();
        let z = vec![2u8, 11, 3, 1, 0, 2];
        let zero_key = MaskedOp::KeyAdd {
            key: vec![0; scheme.message_space().len()],
        };
        assert_eq!(
            masked_op(&scheme, &z, &zero_key).unwrap(),
            z,
            "adding the zero key is the identity"
        );
        let identities = MaskedOp::Linear {
            l1: RingMatrix::identity(scheme.shape().ring().clone(), scheme.k0()),
            l2: RingMatrix::identity(scheme.shape().qring().clone(), scheme.l0()),
        };
        let z2 = masked_op(&scheme, &z, &identities).unwrap();
        let (x2, y2) = dsm_recover(&scheme, &z2).unwrap();
        let (x, y) = dsm_recover(&scheme, &z).unwrap();
        assert_eq!((x2, y2), (x, y), "identity matrices leave the shares alone");
    }

    #[test]
    fn cubing_table_cubes_each_coordinate() {
        let space = shape("F8u2", 1, 1, 0);
        let table = cubing_table(&space);
        let xi = 2u64; // ξ has digit code 2, ξ³ = ξ·ξ² where ξ² has code 4
        let ring = space.ring();
        let expected = ring.mul(2, ring.mul(2, 2));
        assert_eq!(table[xi as usize], expected as u64, "ξ ↦ ξ³");
        assert_eq!(table[0], 0, "0 is fixed by cubing");
        assert_eq!(table[1], 1, "1 is fixed by cubing");
    }

    #[test]
    fn masked_op_rejects_mismatched_tables_and_matrices() {
        let (g, h) = demo_pair_f8();
        let scheme = build_scheme_from_matrices(&g, &h).unwrap();
        let z = vec![0u8; 6];
        let bad_table = MaskedOp::Nonlinear {
            s1: vec![0; 3],
            s2: identity_table(scheme.message_y_space()),
        };
        assert!(
            masked_op(&scheme, &z, &bad_table).is_err(),
            "a short lookup table must be rejected"
        );
        let bad_linear = MaskedOp::Linear {
            l1: RingMatrix::identity(scheme.shape().ring().clone(), 2),
            l2: RingMatrix::identity(scheme.shape().qring().clone(), scheme.l0()),
        };
        assert!(
            masked_op(&scheme, &z, &bad_linear).is_err(),
            "a wrongly sized linear factor must be rejected"
        );
    }

    // -- fault injection -------------------------------------------------------

    #[test]
    fn faults_below_the_sensitive_distance_are_always_detected_on_small_schemes() {
        let sh = shape("Z4", 1, 2, 1);
        let codes = all_weakly_free(&sh);
        for c in &codes {
            for d in &codes {
                if !is_lcp(c, d, LcpCriterion::Direct).unwrap().is_lcp {
                    continue;
                }
                let scheme = build_scheme(c, d).unwrap();
                let z = sh.zero_word();
                let bound = scheme.d_c().unwrap_or(u32::MAX);
                for idx in 0..sh.module_size() as u64 {
                    let eps = sh.decode(idx);
                    let outcome = fia_detect(&scheme, &z, &eps).unwrap();
                    let w = hamming_weight(&eps);
                    if w == 0 {
                        assert_eq!(outcome, FaultOutcome::UndetectedBenign);
                    } else if w < bound {
                        assert_eq!(
                            outcome,
                            FaultOutcome::Detected,
                            "a fault of weight {w} < {bound} must be detected"
                        );
                    } else if outcome == FaultOutcome::UndetectedCorrupting {
                        assert!(
                            scheme.code_c().contains(sh.encode(&eps)),
                            "corrupting faults are exactly the nonzero codewords of C"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn z4_demo_detects_all_faults_of_weight_up_to_four() {
        let (g, h) = demo_pair_z4();
        let scheme = build_scheme_from_matrices(&g, &h).unwrap();
        assert_eq!(scheme.d_c(), Some(5), "the sensitive code has distance 5");
        let sh = scheme.shape().clone();
        let z = sh.zero_word();
        // Enumerate every word of Hamming weight at most 4 recursively....
        let mut stack = vec![(0usize, sh.zero_word(), 0u32)];
        let mut checked = 0u64;
        while let Some((pos, word, weight)) = stack.pop() {
            if weight > 0 {
                let outcome = fia_detect(&scheme, &z, &word).unwrap();
                assert_eq!(
                    outcome,
                    FaultOutcome::Detected,
                    "a nonzero fault of weight {weight} < 5 must be detected: {word:?}"
                );
                checked += 1;
            }
            if pos == sh.len() || weight == 4 {
                continue;
            }
            for next in pos..sh.len() {
                let ring = if next < sh.a() { sh.ring() } else { sh.qring() };
                for digit in 1..ring.size() as u8 {
                    let mut w = word.clone();
                    w[next] = digit;
                    stack.push((next + 1, w, weight + 1));
                }
            }
        }
        // 23 + 235 + 1405 + 5450 nonzero words of weight 1, 2, 3, 4.
        assert_eq!(checked, 7113, "the sweep must cover all low-weight faults");
    }

    #[test]
    fn minimum_weight_codeword_of_the_z4_demo_corrupts_undetected() {
        let (g, h) = demo_pair_z4();
        let scheme = build_scheme_from_matrices(&g, &h).unwrap();
        let sh = scheme.shape().clone();
        let eps = scheme
            .code_c()
            .words()
            .iter()
            .map(|&idx| sh.decode(idx))
            .filter(|w| hamming_weight(w) > 0)
            .min_by_key(|w| hamming_weight(w))
            .expect("the sensitive code has nonzero words");
        assert_eq!(hamming_weight(&eps), 5, "the lightest nonzero codeword has weight 5");
        assert_eq!(
            fia_detect(&scheme, &sh.zero_word(), &eps).unwrap(),
            FaultOutcome::UndetectedCorrupting,
            "a codeword fault slips through and corrupts the sensitive share"
        );
        assert_eq!(
            fia_detect(&scheme, &sh.zero_word(), &sh.zero_word()).unwrap(),
            FaultOutcome::UndetectedBenign,
            "the zero fault is benign"
        );
    }

    // -- side-channel probing ---------------------------------------------------

    #[test]
    fn z4_demo_probing_bounds_are_six_and_five() {
        let (g, h) = demo_pair_z4();
        let scheme = build_scheme_from_matrices(&g, &h).unwrap();
        assert_eq!(scheme.d_dx_dual(), Some(6), "first-block probing bound");
        assert_eq!(scheme.d_dy_dual(), Some(5), "second-block probing bound");
        let report = sca_leakage_check(&scheme, &[0, 1, 2, 3, 4], &[0, 1, 2, 3]).unwrap();
        assert!(report.safe, "probe sets of sizes 5 and 4 stay below the bounds");
        assert!(report.restriction_spans, "the restricted mask matrix spans");
        assert!(report.leak_uniform, "the probed tuple is uniform");
        assert_eq!(
            report.leak_tuples, 16384,
            "every restricted tuple appears: 4^5·2^4"
        );
        assert_eq!(report.leak_multiplicity, 1, "each tuple appears exactly once");
        let unsafe_report = sca_leakage_check(&scheme, &[0, 1, 2, 3, 4, 5], &[]).unwrap();
        assert!(!unsafe_report.safe, "six first-block probes reach the bound");
        assert!(
            !unsafe_report.leak_uniform,
            "the full first block leaks a non-uniform tuple"
        );
        assert_eq!(
            unsafe_report.leak_tuples, 2048,
            "the mask restricts to half of the 4^6 first-block tuples"
        );
    }

    #[test]
    fn empty_probe_sets_are_always_safe() {
        let (g, h) = demo_pair_f8();
        let scheme = build_scheme_from_matrices(&g, &h).unwrap();
        let report = sca_leakage_check(&scheme, &[], &[]).unwrap();
        assert!(report.safe, "no probes, no leakage");
        assert!(report.leak_uniform, "the empty tuple is trivially uniform");
        assert_eq!(report.leak_tuples, 1, "only the empty tuple exists");
    }

    #[test]
    fn probe_sets_must_be_increasing_and_in_range() {
        let (g, h) = demo_pair_f8();
        let scheme = build_scheme_from_matrices(&g, &h).unwrap();
        assert!(
            sca_leakage_check(&scheme, &[3], &[]).is_err(),
            "index 3 exceeds the first block"
        );
        assert!(
            sca_leakage_check(&scheme, &[1, 1], &[]).is_err(),
            "repeated indices must be rejected"
        );
        assert!(
            sca_leakage_check(&scheme, &[], &[2, 0]).is_err(),
            "descending indices must be rejected"
        );
    }

    #[test]
    fn safe_probes_leak_uniformly_for_every_fixed_sensitive_word() {
        let sh = shape("Z4", 1, 2, 1);
        let codes = all_weakly_free(&sh);
        for c in &codes {
            for d in &codes {
                if !is_lcp(c, d, LcpCriterion::Direct).unwrap().is_lcp {
                    continue;
                }
                let scheme = build_scheme(c, d).unwrap();
                let t1_sets: Vec<Vec<usize>> = (0..=sh.a())
                    .flat_map(|k| (0..sh.a()).combinations(k))
                    .collect();
                let t2_sets: Vec<Vec<usize>> = (0..=sh.b())
                    .flat_map(|k| (0..sh.b()).combinations(k))
                    .collect();
                for t1 in &t1_sets {
                    for t2 in &t2_sets {
                        let report = sca_leakage_check(&scheme, t1, t2).unwrap();
                        if !report.safe {
                            continue;
                        }
                        assert!(
                            report.restriction_spans,
                            "safe probes must see a spanning restriction in {sh:?}"
                        );
                        assert!(report.leak_uniform, "safe probes must leak uniformly");
                        // The same histogram holds for any fixed sensitive
                        // word, not just zero.
                        let rshape = MixedShape::new(
                            sh.ring().clone(),
                            sh.s(),
                            t1.len(),
                            t2.len(),
                        )
                        .unwrap();
                        for x in all_messages(scheme.message_space()) {
                            let base = scheme.encode_sensitive(&x).unwrap();
                            let mut counts: HashMap<u64, u64> = HashMap::new();
                            for y in all_messages(scheme.mask_space()) {
                                let z =
                                    sh.word_add(&base, &scheme.encode_mask(&y).unwrap());
                                let tuple: Vec<u8> = t1
                                    .iter()
                                    .map(|&j| z[j])
                                    .chain(t2.iter().map(|&j| z[sh.a() + j]))
                                    .collect();
                                *counts.entry(rshape.encode(&tuple)).or_insert(0) += 1;
                            }
                            let distinct = counts.len() as u128;
                            let uniform = counts.values().all(|&n| n == *counts.values().next().unwrap());
                            assert!(
                                distinct == rshape.module_size() && uniform,
                                "the probed tuple must be uniform for every sensitive word"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn column_independence_matches_the_dual_distance_bound() {
        // The probing bound of a mask constituent equals the largest `t`
        // such that every `t−1` columns of its generator block are
        // independent with full period.
        let (g, h) = demo_pair_z4();
        let scheme = build_scheme_from_matrices(&g, &h).unwrap();
        let e_block = x_rows(scheme.generator_d(), 0, scheme.shape().a() - scheme.k0());
        let x_bound = scheme.d_dx_dual().unwrap();
        for t in 1..=(scheme.shape().a() as u32 + 1) {
            let all_independent = (0..scheme.shape().a())
                .combinations((t - 1) as usize)
                .all(|cols| columns_full_period_independent(&e_block, &cols).unwrap());
            assert_eq!(
                all_independent,
                x_bound >= t,
                "independence of every {} columns must match the bound {x_bound} >= {t}",
                t - 1
            );
        }
        let h_block = y_rows(
            scheme.generator_d(),
            scheme.shape().a() - scheme.k0(),
            scheme.generator_d().rows(),
        );
        let y_bound = scheme.d_dy_dual().unwrap();
        for t in 1..=(scheme.shape().b() as u32 + 1) {
            let all_independent = (0..scheme.shape().b())
                .combinations((t - 1) as usize)
                .all(|cols| columns_full_period_independent(&h_block, &cols).unwrap());
            assert_eq!(
                all_independent,
                y_bound >= t,
                "independence of every {} columns must match the bound {y_bound} >= {t}",
                t - 1
            );
        }
        assert_eq!((x_bound, y_bound), (6, 5), "the demo bounds themselves");
    }

    #[test]
    fn column_independence_matches_dual_distances_on_small_schemes() {
        for sh in [shape("Z4", 1, 2, 2), shape("Z9", 1, 1, 1), shape("Z8", 2, 1, 1)] {
            let codes = all_weakly_free(&sh);
            for c in &codes {
                for d in &codes {
                    if !is_lcp(c, d, LcpCriterion::Direct).unwrap().is_lcp {
                        continue;
                    }
                    let scheme = build_scheme(c, d).unwrap();
                    let free_d = sh.a() - scheme.k0();
                    let e_block = x_rows(scheme.generator_d(), 0, free_d);
                    let bound = scheme.d_dx_dual().unwrap_or(u32::MAX);
                    for t in 1..=(sh.a() as u32 + 1) {
                        let all_independent = (0..sh.a())
                            .combinations((t - 1) as usize)
                            .all(|cols| {
                                columns_full_period_independent(&e_block, &cols).unwrap()
                            });
                        assert_eq!(
                            all_independent,
                            bound >= t,
                            "first-block independence must track the dual distance in {sh:?}"
                        );
                    }
                }
            }
        }
    }

    // -- thresholds ---------------------------------------------------------------

    #[test]
    fn z4_demo_thresholds_are_five_three_and_three() {
        let (g, h) = demo_pair_z4();
        let scheme = build_scheme_from_matrices(&g, &h).unwrap();
        assert_scheme_invariants(&scheme);
        assert_eq!((scheme.k0(), scheme.l0()), (1, 1), "sensitive split is {{1; 1}}");
        let report = security_threshold(&scheme, ThresholdVariant::General).unwrap();
        assert_eq!(report.d_c, Some(5), "d_H(C) = 5");
        assert_eq!(report.d_dx_dual, Some(6), "first-block dual distance 6");
        assert_eq!(report.d_dy_dual, Some(5), "second-block dual distance 5");
        assert_eq!(report.general_threshold, Some(5), "general threshold 5");
        assert_eq!(report.threshold, Some(5));
        assert_eq!(report.d_cx, Some(5), "first constituent distance 5");
        assert_eq!(report.d_cy, Some(3), "second constituent distance 3");
        assert_eq!(report.separable_threshold, Some(3), "separable comparison 3");
        assert_eq!(report.d_c_embedded, Some(3), "embedded sensitive distance 3");
        assert_eq!(report.d_d_dual_embedded, Some(6), "embedded dual distance 6");
        assert_eq!(report.embedded_threshold, Some(3), "embedded comparison 3");
        let sep = security_threshold(&scheme, ThresholdVariant::Separable).unwrap();
        assert_eq!(sep.threshold, Some(3));
        let emb = security_threshold(&scheme, ThresholdVariant::Embedded).unwrap();
        assert_eq!(emb.threshold, Some(3));
    }

    #[test]
    fn scheme_threshold_matches_the_general_report_on_small_schemes() {
        let sh = shape("Z4", 1, 2, 1);
        let codes = all_weakly_free(&sh);
        for c in &codes {
            for d in &codes {
                if !is_lcp(c, d, LcpCriterion::Direct).unwrap().is_lcp {
                    continue;
                }
                let scheme = build_scheme(c, d).unwrap();
                let report = security_threshold(&scheme, ThresholdVariant::General).unwrap();
                assert_eq!(
                    report.threshold,
                    scheme.threshold(),
                    "the cached threshold is the general one"
                );
                if scheme.code_c().len() > 1 {
                    assert!(
                        report.threshold >= Some(1),
                        "schemes with a nonzero sensitive code have a threshold"
                    );
                }
            }
        }
    }
}
