//! The mixed module `M = R^a ⊕ Ř^b` and its submodules (codes).
//!
//! A *word* is a `Vec<u8>` of length `a + b`: the first `a` entries are
//! element codes of `R`, the remaining `b` entries are element codes of the
//! quotient `Ř = R/γ^s R`. Words are also addressed by a mixed-radix `u64`
//! index (first block least significant), which is the basis of code
//! fingerprints and set representations.
//!
//! A *code* is an `R`-submodule of `M` (the second block carries the
//! `R`-action through the quotient map). Codes are stored as the full sorted
//! list of member indices, which makes equality, intersection and
//! fingerprinting canonical by construction.

use crate::error::{Error, Result};
use crate::matrix::RingMatrix;
use crate::ring::ChainRing;
use once_cell::sync::OnceCell;
use serde::Serialize;
use std::fmt;
use std::sync::Arc;

/// Largest ambient module for which brute-force dual scans are permitted.
pub const DUAL_SCAN_LIMIT: u128 = 1 << 22;

// ---------------------------------------------------------------------------
// Shape
// ---------------------------------------------------------------------------

/// The ambient mixed module `M = R^a ⊕ Ř^b` with `Ř = R/γ^s R`, `1 <= s < e`.
#[derive(Clone, PartialEq, Eq)]
pub struct MixedShape {
    ring: ChainRing,
    qring: ChainRing,
    s: usize,
    a: usize,
    b: usize,
}

impl fmt::Debug for MixedShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MixedShape({}^{} (+) {}^{})",
            self.ring.name(),
            self.a,
            self.qring.name(),
            self.b
        )
    }
}

impl MixedShape {
    pub fn new(ring: ChainRing, s: usize, a: usize, b: usize) -> Result<Self> {
        if s == 0 || s >= ring.e() {
            return Err(Error::InvalidQuotientDepth { s, e: ring.e() });
        }
        let qring = ring.quotient(s)?;
        Ok(MixedShape {
            ring,
            qring,
            s,
            a,
            b,
        })
    }

    pub fn ring(&self) -> &ChainRing {
        &self.ring
    }
    /// The quotient ring `Ř` of the second block.
    pub fn qring(&self) -> &ChainRing {
        &self.qring
    }
    pub fn s(&self) -> usize {
        self.s
    }
    pub fn a(&self) -> usize {
        self.a
    }
    pub fn b(&self) -> usize {
        self.b
    }
    /// Number of coordinates, `a + b`.
    pub fn len(&self) -> usize {
        self.a + self.b
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `|M| = |R|^a · |Ř|^b`.
    pub fn module_size(&self) -> u128 {
        (self.ring.size() as u128).pow(self.a as u32)
            * (self.qring.size() as u128).pow(self.b as u32)
    }

    /// The all-zero word.
    pub fn zero_word(&self) -> Vec<u8> {
        vec![0; self.len()]
    }

    /// Mixed-radix index of a word (first block least significant).
    pub fn encode(&self, w: &[u8]) -> u64 {
        debug_assert_eq!(w.len(), self.len());
        let mut idx = 0u64;
        for j in (0..self.b).rev() {
            idx = idx * self.qring.size() as u64 + w[self.a + j] as u64;
        }
        for i in (0..self.a).rev() {
            idx = idx * self.ring.size() as u64 + w[i] as u64;
        }
        idx
    }

    /// Inverse of [`MixedShape::encode`].
    pub fn decode(&self, idx: u64) -> Vec<u8> {
        let mut w = self.zero_word();
        let mut idx = idx;
        for i in 0..self.a {
            w[i] = (idx % self.ring.size() as u64) as u8;
            idx /= self.ring.size() as u64;
        }
        for j in 0..self.b {
            w[self.a + j] = (idx % self.qring.size() as u64) as u8;
            idx /= self.qring.size() as u64;
        }
        debug_assert_eq!(idx, 0, "index out of range");
        w
    }

    /// Coordinate-wise sum.
    pub fn word_add(&self, x: &[u8], y: &[u8]) -> Vec<u8> {
        let mut out = self.zero_word();
        for i in 0..self.a {
            out[i] = self.ring.add(x[i], y[i]);
        }
        for j in self.a..self.len() {
            out[j] = self.qring.add(x[j], y[j]);
        }
        out
    }

    /// Coordinate-wise difference.
    pub fn word_sub(&self, x: &[u8], y: &[u8]) -> Vec<u8> {
        let mut out = self.zero_word();
        for i in 0..self.a {
            out[i] = self.ring.sub(x[i], y[i]);
        }
        for j in self.a..self.len() {
            out[j] = self.qring.sub(x[j], y[j]);
        }
        out
    }

    /// Scalar action of `r ∈ R` (the second block is scaled by the image of
    /// `r` in `Ř`).
    pub fn word_scale(&self, r: u8, x: &[u8]) -> Vec<u8> {
        let rq = self.ring.reduce_code(r, self.s);
        let mut out = self.zero_word();
        for i in 0..self.a {
            out[i] = self.ring.mul(r, x[i]);
        }
        for j in self.a..self.len() {
            out[j] = self.qring.mul(rq, x[j]);
        }
        out
    }

    /// The `h`-Galois inner product
    /// `⟨x, y⟩_h = Σ_i x_i·σ^h(y_i) + γ^(e-s)·Σ_j lift(x_j)·σ^h(lift(y_j)) ∈ R`.
    pub fn galois_inner(&self, x: &[u8], y: &[u8], h: usize) -> Result<u8> {
        let r = &self.ring;
        let mut acc = 0u8;
        for i in 0..self.a {
            acc = r.add(acc, r.mul(x[i], r.frobenius(y[i], h)?));
        }
        let scale = r.gamma_pow(r.e() - self.s);
        for j in self.a..self.len() {
            let xs = r.lift_code(x[j]);
            let ys = r.lift_code(y[j]);
            acc = r.add(acc, r.mul(scale, r.mul(xs, r.frobenius(ys, h)?)));
        }
        Ok(acc)
    }

    /// Period exponent of a word: the least `t` with `γ^t·w = 0`.
    pub fn word_period(&self, w: &[u8]) -> usize {
        let mut t = 0usize;
        for i in 0..self.a {
            t = t.max(self.ring.e() - self.ring.valuation(w[i]));
        }
        for j in self.a..self.len() {
            t = t.max(self.s - self.qring.valuation(w[j]));
        }
        t
    }

    /// Renders a word in code-file row syntax.
    pub fn render_word(&self, w: &[u8]) -> String {
        let left: Vec<String> = (0..self.a).map(|i| self.ring.render_elem(w[i])).collect();
        let right: Vec<String> = (0..self.b)
            .map(|j| self.qring.render_elem(w[self.a + j]))
            .collect();
        match (left.is_empty(), right.is_empty()) {
            (false, false) => format!("{} | {}", left.join(" "), right.join(" ")),
            (false, true) => format!("{} |", left.join(" ")),
            (true, false) => format!("| {}", right.join(" ")),
            (true, true) => "|".to_string(),
        }
    }
}

// ---------------------------------------------------------------------------
// Code types
// ---------------------------------------------------------------------------

/// The type `{k_0, …, k_(e-1); ℓ_0, …, ℓ_(s-1)}` of a code: `k_i` counts
/// generators of period `γ^(e-i)` pivoting in the first block, `ℓ_j` counts
/// generators of period `γ^(s-j)` pivoting in the second block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CodeType {
    pub k: Vec<usize>,
    pub l: Vec<usize>,
}

impl CodeType {
    pub fn zero(e: usize, s: usize) -> Self {
        CodeType {
            k: vec![0; e],
            l: vec![0; s],
        }
    }

    /// The weakly-free type `{k_0, 0, …; ℓ_0, 0, …}`.
    pub fn weakly_free(k0: usize, l0: usize, e: usize, s: usize) -> Self {
        let mut t = Self::zero(e, s);
        t.k[0] = k0;
        t.l[0] = l0;
        t
    }

    /// Whether all generators have full period in their block.
    pub fn is_weakly_free(&self) -> bool {
        self.k.iter().skip(1).all(|&x| x == 0) && self.l.iter().skip(1).all(|&x| x == 0)
    }

    /// `log_q |C| = Σ (e-i)·k_i + Σ (s-j)·ℓ_j`.
    pub fn log_q_size(&self) -> usize {
        let e = self.k.len();
        let s = self.l.len();
        self.k
            .iter()
            .enumerate()
            .map(|(i, &ki)| (e - i) * ki)
            .sum::<usize>()
            + self
                .l
                .iter()
                .enumerate()
                .map(|(j, &lj)| (s - j) * lj)
                .sum::<usize>()
    }

    /// `|C| = q^(log_q_size)`.
    pub fn cardinality(&self, q: usize) -> u128 {
        (q as u128).pow(self.log_q_size() as u32)
    }
}

impl fmt::Display for CodeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ks: Vec<String> = self.k.iter().map(usize::to_string).collect();
        let ls: Vec<String> = self.l.iter().map(usize::to_string).collect();
        write!(f, "{{{};{}}}", ks.join(","), ls.join(","))
    }
}

// ---------------------------------------------------------------------------
// Mixed matrices
// ---------------------------------------------------------------------------

/// A matrix whose rows are words of a [`MixedShape`]: `[E | F]` with `E`
/// over `R` (`a` columns) and `F` over `Ř` (`b` columns).
#[derive(Clone, PartialEq, Eq)]
pub struct MixedMatrix {
    shape: MixedShape,
    rows: usize,
    data: Vec<u8>,
}

impl fmt::Debug for MixedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MixedMatrix {:?} [", self.shape)?;
        for i in 0..self.rows {
            writeln!(f, "  {}", self.shape.render_word(self.row(i)))?;
        }
        write!(f, "]")
    }
}

impl MixedMatrix {
    pub fn zero(shape: MixedShape, rows: usize) -> Self {
        let data = vec![0; rows * shape.len()];
        MixedMatrix { shape, rows, data }
    }

    pub fn from_rows(shape: MixedShape, rows: &[Vec<u8>]) -> Result<Self> {
        for r in rows {
            if r.len() != shape.len() {
                return Err(Error::Dimension(format!(
                    "row length {} does not match block-length ({}, {})",
                    r.len(),
                    shape.a(),
                    shape.b()
                )));
            }
            for (i, &x) in r.iter().enumerate() {
                let bound = if i < shape.a() {
                    shape.ring().size()
                } else {
                    shape.qring().size()
                };
                if (x as usize) >= bound {
                    return Err(Error::Invalid(format!("element code {x} out of range")));
                }
            }
        }
        Ok(MixedMatrix {
            shape,
            rows: rows.len(),
            data: rows.concat(),
        })
    }

    /// Assembles `[E | F]` from its blocks.
    pub fn from_blocks(shape: MixedShape, e: &RingMatrix, f: &RingMatrix) -> Result<Self> {
        if e.ring() != shape.ring() || f.ring() != shape.qring() {
            return Err(Error::mismatch("ring", e.ring().name(), f.ring().name()));
        }
        if e.rows() != f.rows() && e.cols() != 0 && f.cols() != 0 {
            return Err(Error::Dimension("block row counts differ".into()));
        }
        let rows = e.rows().max(f.rows());
        if e.cols() != shape.a() || f.cols() != shape.b() {
            return Err(Error::Dimension("block widths do not match shape".into()));
        }
        let mut out = Self::zero(shape, rows);
        for i in 0..rows {
            for j in 0..out.shape.a() {
                let v = e.get(i, j);
                out.set(i, j, v);
            }
            for j in 0..out.shape.b() {
                let v = f.get(i, j);
                let a = out.shape.a();
                out.set(i, a + j, v);
            }
        }
        Ok(out)
    }

    pub fn shape(&self) -> &MixedShape {
        &self.shape
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.shape.len()..(i + 1) * self.shape.len()]
    }
    pub fn row_vecs(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
    fn set(&mut self, i: usize, j: usize, x: u8) {
        let w = self.shape.len();
        self.data[i * w + j] = x;
    }

    /// The first-block submatrix `E` over `R`.
    pub fn e_block(&self) -> RingMatrix {
        RingMatrix::from_fn(self.shape.ring().clone(), self.rows, self.shape.a(), |i, j| {
            self.row(i)[j]
        })
    }

    /// The second-block submatrix `F` over `Ř`.
    pub fn f_block(&self) -> RingMatrix {
        let a = self.shape.a();
        RingMatrix::from_fn(self.shape.qring().clone(), self.rows, self.shape.b(), |i, j| {
            self.row(i)[a + j]
        })
    }

    /// The block product `G ⋄ σ^h(H)^T = E·σ^h(U)^T + γ^(e-s)·F·σ^h(V)^T`,
    /// a matrix over `R` (the `F`-part is computed on canonical lifts and
    /// then scaled by `γ^(e-s)`).
    pub fn diamond(&self, other: &Self, h: usize) -> Result<RingMatrix> {
        if self.shape != other.shape {
            return Err(Error::mismatch(
                "shape",
                format!("{:?}", self.shape),
                format!("{:?}", other.shape),
            ));
        }
        let r = self.shape.ring();
        let first = self.e_block().mul_sigma_transpose(&other.e_block(), h)?;
        let fl = self.f_block().lift_to(r)?;
        let vl = other.f_block().lift_to(r)?;
        let second = fl
            .mul_sigma_transpose(&vl, h)?
            .scalar_mul(r.gamma_pow(r.e() - self.shape.s()));
        first.add(&second)
    }

    /// Span of the rows: the smallest code containing them.
    pub fn span(&self) -> MixedCode {
        MixedCode::from_generator_matrix(self)
    }

    /// Renders the full code-file text (ring/s/blocks header plus rows).
    pub fn render(&self) -> String {
        let mut out = format!(
            "ring {}\ns {}\nblocks {} {}\n",
            self.shape.ring().name(),
            self.shape.s(),
            self.shape.a(),
            self.shape.b()
        );
        for i in 0..self.rows {
            out.push_str(&self.shape.render_word(self.row(i)));
            out.push('\n');
        }
        out
    }

    /// Parses code-file text produced by [`MixedMatrix::render`].
    ///
    /// Lines starting with `#` and blank lines are ignored. Errors carry
    /// 1-based line numbers.
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Vec<(usize, Vec<&str>)> = Vec::new();
        let mut row_lines: Vec<(usize, &str)> = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if header.len() < 3 {
                header.push((ln + 1, line.split_whitespace().collect()));
            } else {
                row_lines.push((ln + 1, line));
            }
        }
        if header.len() < 3 {
            return Err(Error::parse(
                text.lines().count(),
                "expected header lines: ring/s/blocks",
            ));
        }
        let (l1, ref ring_toks) = header[0];
        if ring_toks.len() != 2 || ring_toks[0] != "ring" {
            return Err(Error::parse(l1, "expected `ring <spec>`"));
        }
        let ring = ChainRing::parse_spec(ring_toks[1]).map_err(|e| Error::parse(l1, e.to_string()))?;
        let (l2, ref s_toks) = header[1];
        if s_toks.len() != 2 || s_toks[0] != "s" {
            return Err(Error::parse(l2, "expected `s <int>`"));
        }
        let s: usize = s_toks[1]
            .parse()
            .map_err(|_| Error::parse(l2, "invalid quotient depth"))?;
        let (l3, ref b_toks) = header[2];
        if b_toks.len() != 3 || b_toks[0] != "blocks" {
            return Err(Error::parse(l3, "expected `blocks <a> <b>`"));
        }
        let a: usize = b_toks[1]
            .parse()
            .map_err(|_| Error::parse(l3, "invalid first block length"))?;
        let b: usize = b_toks[2]
            .parse()
            .map_err(|_| Error::parse(l3, "invalid second block length"))?;
        let shape =
            MixedShape::new(ring, s, a, b).map_err(|e| Error::parse(l3, e.to_string()))?;

        let mut rows = Vec::new();
        for (ln, line) in row_lines {
            let parts: Vec<&str> = line.split('|').collect();
            if parts.len() != 2 {
                return Err(Error::parse(ln, "expected exactly one `|` separator"));
            }
            let left: Vec<&str> = parts[0].split_whitespace().collect();
            let right: Vec<&str> = parts[1].split_whitespace().collect();
            if left.len() != a || right.len() != b {
                return Err(Error::parse(
                    ln,
                    format!(
                        "expected {a} + {b} entries, found {} + {}",
                        left.len(),
                        right.len()
                    ),
                ));
            }
            let mut w = shape.zero_word();
            for (i, tok) in left.iter().enumerate() {
                w[i] = shape
                    .ring()
                    .parse_elem(tok)
                    .map_err(|e| Error::parse(ln, e.to_string()))?;
            }
            for (j, tok) in right.iter().enumerate() {
                w[a + j] = shape
                    .qring()
                    .parse_elem(tok)
                    .map_err(|e| Error::parse(ln, e.to_string()))?;
            }
            rows.push(w);
        }
        MixedMatrix::from_rows(shape, &rows)
    }
}

// ---------------------------------------------------------------------------
// Period peeling: types, reduced generators, standard forms
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
struct PeelPivot {
    /// false = first block, true = second block.
    second: bool,
    /// Column within the block.
    col: usize,
    /// γ-valuation of the pivot entry (0 for weakly-free pivots).
    val: usize,
    row: Vec<u8>,
}

/// Greedy period-maximal peeling of a generating set. Returns the pivots in
/// extraction order; the pivot rows generate the same code and split it as a
/// direct sum of cyclic modules.
fn peel(shape: &MixedShape, rows: Vec<Vec<u8>>) -> Vec<PeelPivot> {
    let r = shape.ring().clone();
    let rq = shape.qring().clone();
    let (e, s, a) = (r.e(), shape.s(), shape.a());
    let mut rows = rows;
    let mut pivots: Vec<PeelPivot> = Vec::new();
    loop {
        rows.retain(|w| w.iter().any(|&x| x != 0));
        rows.sort_by_key(|w| shape.encode(w));
        rows.dedup();
        if rows.is_empty() {
            break;
        }
        let tmax = rows.iter().map(|w| shape.word_period(w)).max().unwrap();
        // Among maximal-period rows, a second-block pivot (valuation s - t)
        // always has strictly smaller valuation than a first-block pivot
        // (valuation e - t), so the second block is preferred when possible.
        let maxi: Vec<usize> = (0..rows.len())
            .filter(|&i| shape.word_period(&rows[i]) == tmax)
            .collect();
        let second = tmax <= s
            && maxi.iter().any(|&i| {
                (a..shape.len()).any(|j| rq.valuation(rows[i][j]) == s - tmax)
            });
        let v = if second { s - tmax } else { e - tmax };
        let (blk, width, blkring) = if second {
            (a, shape.b(), &rq)
        } else {
            (0, a, &r)
        };
        let col = (0..width)
            .find(|&j| {
                maxi.iter()
                    .any(|&i| blkring.valuation(rows[i][blk + j]) == v)
            })
            .expect("a pivot column must exist");
        let pi = *maxi
            .iter()
            .find(|&&i| blkring.valuation(rows[i][blk + col]) == v)
            .expect("a pivot row must exist");
        // Normalise the pivot entry to exactly γ^v.
        let unit = blkring.div_gamma(rows[pi][blk + col], v);
        let uinv = blkring.inv(unit).expect("pivot cofactor is a unit");
        let pivot_row = shape.word_scale(r.lift_code(uinv), &rows[pi]);
        // Eliminate the pivot coordinate from every other row (exact: all
        // other entries at this coordinate have valuation >= v).
        let mut next = Vec::with_capacity(rows.len());
        for (i, w) in rows.iter().enumerate() {
            if i == pi {
                continue;
            }
            let z = blkring.div_gamma(w[blk + col], v);
            let reduced = shape.word_sub(w, &shape.word_scale(r.lift_code(z), &pivot_row));
            next.push(reduced);
        }
        rows = next;
        pivots.push(PeelPivot {
            second,
            col,
            val: v,
            row: pivot_row,
        });
    }
    pivots
}

/// Floor-quotient of `x` by `γ^v` (digit shift); used to reduce entries of
/// valuation below `v` to their canonical representatives modulo `γ^v`.
fn div_floor_gamma(ring: &ChainRing, x: u8, v: usize) -> u8 {
    let base = match ring.family() {
        crate::ring::RingFamily::IntegerResidue => ring.p(),
        crate::ring::RingFamily::PolyQuotient => ring.q(),
    };
    (x as usize / base.pow(v as u32)) as u8
}

/// Back-eliminates each pivot coordinate from all other pivot rows; exact
/// for valuation-0 pivots, canonical reduction modulo `γ^v` otherwise.
fn back_eliminate(shape: &MixedShape, pivots: &mut [PeelPivot]) {
    let r = shape.ring().clone();
    let rq = shape.qring().clone();
    let a = shape.a();
    for i in 0..pivots.len() {
        let (second, col, v) = (pivots[i].second, pivots[i].col, pivots[i].val);
        let coord = if second { a + col } else { col };
        let blkring = if second { &rq } else { &r };
        let prow = pivots[i].row.clone();
        for (j, other) in pivots.iter_mut().enumerate() {
            if j == i || other.row[coord] == 0 {
                continue;
            }
            let z = div_floor_gamma(blkring, other.row[coord], v);
            if z == 0 {
                continue;
            }
            other.row = shape.word_sub(&other.row, &shape.word_scale(r.lift_code(z), &prow));
        }
    }
}

fn type_from_pivots(shape: &MixedShape, pivots: &[PeelPivot]) -> CodeType {
    let mut t = CodeType::zero(shape.ring().e(), shape.s());
    for p in pivots {
        if p.second {
            t.l[p.val] += 1;
        } else {
            t.k[p.val] += 1;
        }
    }
    t
}

/// Computes the type of the span of an arbitrary generating set without
/// materialising the code.
pub fn type_from_rows(shape: &MixedShape, rows: &[Vec<u8>]) -> CodeType {
    type_from_pivots(shape, &peel(shape, rows.to_vec()))
}

/// The standard form of a code: reduced generator rows, the column
/// permutations taking them to the block layout
/// `[I A 0 B; 0 γ^(e-s)C I D]`, and the permuted matrix itself.
#[derive(Clone, Debug)]
pub struct StandardForm {
    /// Reduced generator rows in the original coordinate order
    /// (first-block-pivot rows first, then second-block-pivot rows).
    pub reduced_rows: MixedMatrix,
    /// Permuted matrix in block layout (meaningful when `weakly_free`).
    pub matrix: MixedMatrix,
    /// `first_perm[new] = old` column index within the first block.
    pub first_perm: Vec<usize>,
    /// `second_perm[new] = old` column index within the second block.
    pub second_perm: Vec<usize>,
    pub k0: usize,
    pub l0: usize,
    pub weakly_free: bool,
}

impl StandardForm {
    fn sub_block(&self, r0: usize, c0: usize, rows: usize, cols: usize, second: bool) -> RingMatrix {
        let shape = self.matrix.shape();
        let ring = if second {
            shape.qring().clone()
        } else {
            shape.ring().clone()
        };
        let off = if second { shape.a() } else { 0 };
        RingMatrix::from_fn(ring, rows, cols, |i, j| {
            self.matrix.row(r0 + i)[off + c0 + j]
        })
    }

    /// `A` — rows `0..k0`, first-block columns `k0..a` (over `R`).
    pub fn a_block(&self) -> RingMatrix {
        let a = self.matrix.shape().a();
        self.sub_block(0, self.k0, self.k0, a - self.k0, false)
    }
    /// `γ^(e-s)·C` as stored — rows `k0..`, first-block columns `k0..a`.
    pub fn gamma_c_block(&self) -> RingMatrix {
        let a = self.matrix.shape().a();
        self.sub_block(self.k0, self.k0, self.l0, a - self.k0, false)
    }
    /// `B` — rows `0..k0`, second-block columns `l0..b` (over `Ř`).
    pub fn b_block(&self) -> RingMatrix {
        let b = self.matrix.shape().b();
        self.sub_block(0, self.l0, self.k0, b - self.l0, true)
    }
    /// `D` — rows `k0..`, second-block columns `l0..b` (over `Ř`).
    pub fn d_block(&self) -> RingMatrix {
        let b = self.matrix.shape().b();
        self.sub_block(self.k0, self.l0, self.l0, b - self.l0, true)
    }
}

fn standard_form_from_rows(shape: &MixedShape, rows: Vec<Vec<u8>>) -> StandardForm {
    let mut pivots = peel(shape, rows);
    back_eliminate(shape, &mut pivots);
    // First-block pivots first (extraction order is period-descending and
    // deterministic), then second-block pivots.
    let (firsts, seconds): (Vec<&PeelPivot>, Vec<&PeelPivot>) =
        pivots.iter().partition(|p| !p.second);
    let weakly_free = pivots.iter().all(|p| p.val == 0);
    let k0 = firsts.iter().filter(|p| p.val == 0).count();
    let l0 = seconds.iter().filter(|p| p.val == 0).count();
    let ordered: Vec<Vec<u8>> = firsts
        .iter()
        .chain(seconds.iter())
        .map(|p| p.row.clone())
        .collect();
    let reduced_rows =
        MixedMatrix::from_rows(shape.clone(), &ordered).expect("reduced rows are words");

    let mut first_perm: Vec<usize> = firsts.iter().map(|p| p.col).collect();
    for c in 0..shape.a() {
        if !first_perm.contains(&c) {
            first_perm.push(c);
        }
    }
    let mut second_perm: Vec<usize> = seconds.iter().map(|p| p.col).collect();
    for c in 0..shape.b() {
        if !second_perm.contains(&c) {
            second_perm.push(c);
        }
    }
    let a = shape.a();
    let permuted: Vec<Vec<u8>> = ordered
        .iter()
        .map(|w| {
            let mut out = shape.zero_word();
            for (new, &old) in first_perm.iter().enumerate() {
                out[new] = w[old];
            }
            for (new, &old) in second_perm.iter().enumerate() {
                out[a + new] = w[a + old];
            }
            out
        })
        .collect();
    let matrix = MixedMatrix::from_rows(shape.clone(), &permuted).expect("permuted rows are words");
    StandardForm {
        reduced_rows,
        matrix,
        first_perm,
        second_perm,
        k0,
        l0,
        weakly_free,
    }
}

// ---------------------------------------------------------------------------
// Codes
// ---------------------------------------------------------------------------

/// A code: an `R`-submodule of the mixed module, stored as the full sorted
/// list of member word indices.
#[derive(Clone)]
pub struct MixedCode {
    shape: MixedShape,
    words: Arc<Vec<u64>>,
    gens: OnceCell<MixedMatrix>,
    ctype: OnceCell<CodeType>,
    sform: OnceCell<Arc<StandardForm>>,
}

impl PartialEq for MixedCode {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape && self.words == other.words
    }
}
impl Eq for MixedCode {}

impl fmt::Debug for MixedCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MixedCode({:?}, |C| = {})", self.shape, self.words.len())
    }
}

impl MixedCode {
    /// The zero code `{0}`.
    pub fn zero(shape: MixedShape) -> Self {
        MixedCode {
            shape,
            words: Arc::new(vec![0]),
            gens: OnceCell::new(),
            ctype: OnceCell::new(),
            sform: OnceCell::new(),
        }
    }

    /// The full module `M`.
    pub fn full(shape: MixedShape) -> Self {
        let n = shape.module_size();
        assert!(n <= DUAL_SCAN_LIMIT, "full module too large to materialise");
        let words: Vec<u64> = (0..n as u64).collect();
        MixedCode {
            shape,
            words: Arc::new(words),
            gens: OnceCell::new(),
            ctype: OnceCell::new(),
            sform: OnceCell::new(),
        }
    }

    /// Span closure of a generator matrix.
    pub fn from_generator_matrix(g: &MixedMatrix) -> Self {
        let shape = g.shape().clone();
        let mut set: Vec<u64> = vec![0];
        for gi in 0..g.rows() {
            let gen = g.row(gi);
            if gen.iter().all(|&x| x == 0) {
                continue;
            }
            // The span closed under previous generators, extended by one
            // more, is the union of its translates by all multiples of the
            // new generator.
            let mut extended: Vec<u64> = Vec::with_capacity(set.len() * shape.ring().size());
            for r in shape.ring().elems() {
                let shift = shape.word_scale(r, gen);
                for &w in &set {
                    let sum = shape.word_add(&shape.decode(w), &shift);
                    extended.push(shape.encode(&sum));
                }
            }
            extended.sort_unstable();
            extended.dedup();
            set = extended;
        }
        let code = MixedCode {
            shape,
            words: Arc::new(set),
            gens: OnceCell::new(),
            ctype: OnceCell::new(),
            sform: OnceCell::new(),
        };
        let _ = code.gens.set(g.clone());
        code
    }

    /// Builds a code from an already-closed sorted index set.
    /// The closure property is the caller's responsibility (checked in debug).
    pub fn from_sorted_words(shape: MixedShape, words: Vec<u64>) -> Self {
        debug_assert!(words.windows(2).all(|w| w[0] < w[1]), "sorted, unique");
        debug_assert!(words.first() == Some(&0), "must contain 0");
        MixedCode {
            shape,
            words: Arc::new(words),
            gens: OnceCell::new(),
            ctype: OnceCell::new(),
            sform: OnceCell::new(),
        }
    }

    /// Seeds the generator-matrix cache with a generating set the caller
    /// already holds (for instance from an incremental census walk), so
    /// that [`MixedCode::generator_matrix`] does not have to re-derive one.
    /// Ignored if a matrix is already cached.
    pub fn attach_generators(&self, g: MixedMatrix) {
        debug_assert!(g.shape() == &self.shape, "generator shape mismatch");
        let _ = self.gens.set(g);
    }

    /// Seeds the type cache when the caller has already computed the type.
    /// Ignored if a type is already cached.
    pub fn attach_type(&self, t: CodeType) {
        debug_assert!(
            t.cardinality(self.shape.ring().q()) == self.words.len() as u128,
            "attached type must match the code's cardinality"
        );
        let _ = self.ctype.set(t);
    }

    pub fn shape(&self) -> &MixedShape {
        &self.shape
    }
    /// `|C|`.
    pub fn len(&self) -> usize {
        self.words.len()
    }
    pub fn is_empty(&self) -> bool {
        false // a code always contains 0
    }
    /// Sorted member indices.
    pub fn words(&self) -> &[u64] {
        &self.words
    }
    pub fn contains(&self, idx: u64) -> bool {
        self.words.binary_search(&idx).is_ok()
    }

    /// Canonical fingerprint: the sorted member indices as little-endian bytes.
    pub fn fingerprint(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.words.len() * 8);
        for &w in self.words.iter() {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out
    }

    /// Fingerprint in hex (for reports).
    pub fn fingerprint_hex(&self) -> String {
        use std::fmt::Write;
        let mut h = String::new();
        for byte in self.fingerprint() {
            let _ = write!(h, "{byte:02x}");
        }
        h
    }

    /// A generator matrix: the one the code was built from if any,
    /// otherwise the reduced rows of the standard form.
    pub fn generator_matrix(&self) -> &MixedMatrix {
        self.gens.get_or_init(|| self.standard_form().reduced_rows.clone())
    }

    /// The canonical type, computed by greedy period-maximal peeling of the
    /// full (sorted) codeword list.
    pub fn code_type(&self) -> &CodeType {
        self.ctype.get_or_init(|| {
            let rows: Vec<Vec<u8>> = self
                .words
                .iter()
                .filter(|&&w| w != 0)
                .map(|&w| self.shape.decode(w))
                .collect();
            let t = type_from_pivots(&self.shape, &peel(&self.shape, rows));
            debug_assert_eq!(
                t.cardinality(self.shape.ring().q()),
                self.words.len() as u128,
                "type must account for |C|"
            );
            t
        })
    }

    /// Whether the code is weakly-free.
    pub fn is_weakly_free(&self) -> bool {
        self.code_type().is_weakly_free()
    }

    /// The deterministic standard form (computed from the sorted codeword
    /// list, so it is an invariant of the code, not of a generator choice).
    pub fn standard_form(&self) -> Arc<StandardForm> {
        self.sform
            .get_or_init(|| {
                let rows: Vec<Vec<u8>> = self
                    .words
                    .iter()
                    .filter(|&&w| w != 0)
                    .map(|&w| self.shape.decode(w))
                    .collect();
                Arc::new(standard_form_from_rows(&self.shape, rows))
            })
            .clone()
    }

    /// Intersection of two codes over the same shape.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::mismatch(
                "shape",
                format!("{:?}", self.shape),
                format!("{:?}", other.shape),
            ));
        }
        let mut out = Vec::new();
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.words.len() && j < other.words.len() {
            match self.words[i].cmp(&other.words[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.words[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(Self::from_sorted_words(self.shape.clone(), out))
    }

    /// The `h`-Galois dual `C^⊥h = {w : ⟨w, c⟩_h = 0 for all c ∈ C}`,
    /// computed by brute-force scan over the ambient module.
    pub fn dual(&self, h: usize) -> Result<Self> {
        let n = self.shape.module_size();
        if n > DUAL_SCAN_LIMIT {
            return Err(Error::BudgetExceeded {
                module_size: n.min(u64::MAX as u128) as u64,
                budget: DUAL_SCAN_LIMIT as u64,
            });
        }
        let gens = self.generator_matrix().clone();
        let mut words = Vec::new();
        for idx in 0..n as u64 {
            let w = self.shape.decode(idx);
            let mut ok = true;
            for gi in 0..gens.rows() {
                if self.shape.galois_inner(&w, gens.row(gi), h)? != 0 {
                    ok = false;
                    break;
                }
            }
            if ok {
                words.push(idx);
            }
        }
        Ok(Self::from_sorted_words(self.shape.clone(), words))
    }
}
