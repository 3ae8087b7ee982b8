//! Dense matrices over a chain ring.
//!
//! One matrix type serves both chain rings and their residue fields (a field
//! is a chain ring of nilpotency 1); the `field_*` operations insist on a
//! field base ring. Empty matrices (zero rows and/or columns) are
//! first-class citizens throughout.

use crate::error::{Error, Result};
use crate::ring::ChainRing;
use std::fmt;

/// A dense row-major matrix over a [`ChainRing`].
#[derive(Clone, PartialEq, Eq)]
pub struct RingMatrix {
    ring: ChainRing,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl fmt::Debug for RingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RingMatrix {}x{} over {} [", self.rows, self.cols, self.ring.name())?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| self.ring.render_elem(self.get(i, j)))
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl RingMatrix {
    /// The all-zero matrix.
    pub fn zero(ring: ChainRing, rows: usize, cols: usize) -> Self {
        RingMatrix {
            ring,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    /// The identity matrix (0×0 allowed).
    pub fn identity(ring: ChainRing, n: usize) -> Self {
        let mut m = Self::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// A scalar multiple of the identity.
    pub fn scalar_identity(ring: ChainRing, n: usize, c: u8) -> Self {
        let mut m = Self::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, c);
        }
        m
    }

    /// Builds a matrix from rows; all rows must share one length.
    pub fn from_rows(ring: ChainRing, rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        for r in rows {
            if r.len() != cols {
                return Err(Error::Dimension("ragged rows".into()));
            }
            for &x in r {
                if (x as usize) >= ring.size() {
                    return Err(Error::Invalid(format!(
                        "element code {x} out of range for {}",
                        ring.name()
                    )));
                }
            }
        }
        Ok(RingMatrix {
            ring,
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    /// Builds a matrix from a generator closure.
    pub fn from_fn(
        ring: ChainRing,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Self {
        let mut m = Self::zero(ring, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn ring(&self) -> &ChainRing {
        &self.ring
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u8) {
        self.data[i * self.cols + j] = x;
    }

    /// Row `i` as a slice.
    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// All rows as vectors.
    pub fn row_vecs(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn check_same_ring(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::mismatch("ring", self.ring.name(), other.ring.name()));
        }
        Ok(())
    }

    /// Entry-wise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_ring(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension(format!(
                "add: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (o, &b) in out.data.iter_mut().zip(&other.data) {
            *o = self.ring.add(*o, b);
        }
        Ok(out)
    }

    /// Entry-wise difference.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scalar_mul(other.ring.neg(1)))
    }

    /// Left scalar multiple `c·X`.
    pub fn scalar_mul(&self, c: u8) -> Self {
        let mut out = self.clone();
        for o in out.data.iter_mut() {
            *o = self.ring.mul(c, *o);
        }
        out
    }

    /// Matrix product `X·Y`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_ring(other)?;
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "mul: {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let r = &self.ring;
        let mut out = Self::zero(r.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = self.get(i, k);
                if x == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let t = r.mul(x, other.get(k, j));
                    out.set(i, j, r.add(out.get(i, j), t));
                }
            }
        }
        Ok(out)
    }

    /// Transpose.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ring.clone(), self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Applies the Frobenius power `σ^h` entry-wise.
    pub fn apply_sigma(&self, h: usize) -> Result<Self> {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x = self.ring.frobenius(*x, h)?;
        }
        Ok(out)
    }

    /// The twisted product `X·σ^h(Y)^T` (both over the same ring, equal
    /// column counts; result is `X.rows × Y.rows`).
    pub fn mul_sigma_transpose(&self, other: &Self, h: usize) -> Result<Self> {
        self.check_same_ring(other)?;
        if self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "twisted product: {} vs {} columns",
                self.cols, other.cols
            )));
        }
        let r = &self.ring;
        let mut out = Self::zero(r.clone(), self.rows, other.rows);
        for i in 0..self.rows {
            for j in 0..other.rows {
                let mut acc = 0u8;
                for k in 0..self.cols {
                    acc = r.add(acc, r.mul(self.get(i, k), r.frobenius(other.get(j, k), h)?));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Projects every entry to the residue field.
    pub fn residue_matrix(&self) -> Self {
        let fq = self.ring.residue_field();
        Self::from_fn(fq, self.rows, self.cols, |i, j| self.ring.residue(self.get(i, j)))
    }

    /// Re-interprets the entry codes in another ring (canonical lift of a
    /// residue/quotient matrix; codes embed unchanged).
    pub fn lift_to(&self, ring: &ChainRing) -> Result<Self> {
        for &x in &self.data {
            if (x as usize) >= ring.size() {
                return Err(Error::Invalid(format!(
                    "code {x} does not embed into {}",
                    ring.name()
                )));
            }
        }
        Ok(RingMatrix {
            ring: ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
        })
    }

    /// Horizontal concatenation `[X | Y]`.
    pub fn hconcat(&self, other: &Self) -> Result<Self> {
        self.check_same_ring(other)?;
        if self.rows != other.rows {
            return Err(Error::Dimension("hconcat: row counts differ".into()));
        }
        Ok(Self::from_fn(self.ring.clone(), self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                other.get(i, j - self.cols)
            }
        }))
    }

    /// Vertical concatenation.
    pub fn vconcat(&self, other: &Self) -> Result<Self> {
        self.check_same_ring(other)?;
        if self.cols != other.cols && self.rows != 0 && other.rows != 0 {
            return Err(Error::Dimension("vconcat: column counts differ".into()));
        }
        let cols = if self.rows == 0 { other.cols } else { self.cols };
        let mut rows = self.row_vecs();
        rows.extend(other.row_vecs());
        let mut out = Self::from_rows(self.ring.clone(), &rows)?;
        out.cols = cols;
        if out.rows == 0 {
            out.cols = cols;
        }
        Ok(out)
    }

    /// Block-diagonal composition `diag(X, Y)`.
    pub fn block_diag(&self, other: &Self) -> Result<Self> {
        self.check_same_ring(other)?;
        Ok(Self::from_fn(
            self.ring.clone(),
            self.rows + other.rows,
            self.cols + other.cols,
            |i, j| {
                if i < self.rows && j < self.cols {
                    self.get(i, j)
                } else if i >= self.rows && j >= self.cols {
                    other.get(i - self.rows, j - self.cols)
                } else {
                    0
                }
            },
        ))
    }

    // ------------------------------------------------------------------
    // Field linear algebra (base ring must be a field).
    // ------------------------------------------------------------------

    fn expect_field(&self) -> Result<()> {
        if !self.ring.is_field() {
            return Err(Error::Invalid(format!(
                "field operation requested over non-field ring {}",
                self.ring.name()
            )));
        }
        Ok(())
    }

    /// Gauss–Jordan elimination in place on an augmented copy.
    /// Returns (pivot columns, reduced matrix).
    fn field_rref(&self) -> Result<(Vec<usize>, Self)> {
        self.expect_field()?;
        let r = &self.ring;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut prow = 0usize;
        for col in 0..m.cols {
            if prow == m.rows {
                break;
            }
            let Some(sel) = (prow..m.rows).find(|&i| m.get(i, col) != 0) else {
                continue;
            };
            for j in 0..m.cols {
                let (a, b) = (m.get(prow, j), m.get(sel, j));
                m.set(prow, j, b);
                m.set(sel, j, a);
            }
            let inv = r.inv(m.get(prow, col)).expect("nonzero field elem");
            for j in 0..m.cols {
                m.set(prow, j, r.mul(inv, m.get(prow, j)));
            }
            for i in 0..m.rows {
                if i != prow && m.get(i, col) != 0 {
                    let f = m.get(i, col);
                    for j in 0..m.cols {
                        let t = r.sub(m.get(i, j), r.mul(f, m.get(prow, j)));
                        m.set(i, j, t);
                    }
                }
            }
            pivots.push(col);
            prow += 1;
        }
        Ok((pivots, m))
    }

    /// Rank over a field.
    pub fn field_rank(&self) -> Result<usize> {
        Ok(self.field_rref()?.0.len())
    }

    /// Inverse over a field; `None` when singular or non-square.
    pub fn field_invertible(&self) -> Result<Option<Self>> {
        self.expect_field()?;
        if !self.is_square() {
            return Ok(None);
        }
        let n = self.rows;
        let aug = self.hconcat(&Self::identity(self.ring.clone(), n))?;
        let (pivots, red) = aug.field_rref()?;
        if pivots.len() < n || pivots.iter().take(n).enumerate().any(|(i, &c)| c != i) {
            return Ok(None);
        }
        Ok(Some(Self::from_fn(self.ring.clone(), n, n, |i, j| {
            red.get(i, n + j)
        })))
    }

    /// Basis of the right kernel `{v : X·v = 0}`, returned as rows.
    pub fn field_kernel(&self) -> Result<Self> {
        let (pivots, red) = self.field_rref()?;
        let r = &self.ring;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut rows = Vec::new();
        for &f in &free {
            let mut v = vec![0u8; self.cols];
            v[f] = 1;
            for (prow, &pc) in pivots.iter().enumerate() {
                v[pc] = r.neg(red.get(prow, f));
            }
            rows.push(v);
        }
        let mut out = Self::from_rows(self.ring.clone(), &rows)?;
        if rows.is_empty() {
            out.cols = self.cols;
        }
        Ok(out)
    }

    /// Particular solution of `X·Y = B` over a field (free variables zero);
    /// `None` when inconsistent.
    pub fn field_solve_right(&self, b: &Self) -> Result<Option<Self>> {
        self.expect_field()?;
        self.check_same_ring(b)?;
        if self.rows != b.rows {
            return Err(Error::Dimension("field_solve_right: row counts differ".into()));
        }
        let aug = self.hconcat(b)?;
        let (pivots, red) = aug.field_rref()?;
        // Any pivot in the augmented part means inconsistency.
        if pivots.iter().any(|&c| c >= self.cols) {
            return Ok(None);
        }
        let mut y = Self::zero(self.ring.clone(), self.cols, b.cols);
        for (prow, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                y.set(pc, j, red.get(prow, self.cols + j));
            }
        }
        Ok(Some(y))
    }

    // ------------------------------------------------------------------
    // Chain-ring solving: X·P = D with invertible P.
    // ------------------------------------------------------------------

    /// Diagonalises `self` as `U·Σ·V` with `U, V` invertible and `Σ` diagonal
    /// with γ-power entries, returning `(U⁻¹·D, V⁻¹ composed…)` implicitly:
    /// concretely, applies the row operations to a carried copy of `d` and
    /// returns `(diag valuations, transformed d, column-op accumulator C)`
    /// such that `self·C·Y = d` reduces to `Σ·Y = transformed d`.
    fn gamma_diagonalize(&self, d: &Self) -> Result<(Vec<usize>, Self, Self)> {
        self.check_same_ring(d)?;
        if self.rows != d.rows {
            return Err(Error::Dimension("solve_right: row counts differ".into()));
        }
        let r = self.ring.clone();
        let e = r.e();
        let mut a = self.clone();
        let mut t = d.clone();
        let mut c = Self::identity(r.clone(), self.cols);
        let steps = self.rows.min(self.cols);
        let mut diag = Vec::with_capacity(steps);
        for k in 0..steps {
            // Global minimal-valuation pivot in the trailing submatrix.
            let mut best: Option<(usize, usize, usize)> = None;
            for i in k..a.rows {
                for j in k..a.cols {
                    let v = r.valuation(a.get(i, j));
                    if v < e && best.map_or(true, |(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
            let Some((v, pi, pj)) = best else {
                break; // trailing submatrix is zero
            };
            // Move pivot to (k, k).
            if pi != k {
                for j in 0..a.cols {
                    let (x, y) = (a.get(k, j), a.get(pi, j));
                    a.set(k, j, y);
                    a.set(pi, j, x);
                }
                for j in 0..t.cols {
                    let (x, y) = (t.get(k, j), t.get(pi, j));
                    t.set(k, j, y);
                    t.set(pi, j, x);
                }
            }
            if pj != k {
                for i in 0..a.rows {
                    let (x, y) = (a.get(i, k), a.get(i, pj));
                    a.set(i, k, y);
                    a.set(i, pj, x);
                }
                for i in 0..c.rows {
                    let (x, y) = (c.get(i, k), c.get(i, pj));
                    c.set(i, k, y);
                    c.set(i, pj, x);
                }
            }
            // Normalise the pivot to exactly γ^v.
            let unit = r.div_gamma(a.get(k, k), v);
            let uinv = r.inv(unit).expect("pivot cofactor is a unit");
            for j in 0..a.cols {
                a.set(k, j, r.mul(uinv, a.get(k, j)));
            }
            for j in 0..t.cols {
                t.set(k, j, r.mul(uinv, t.get(k, j)));
            }
            // Clear the pivot column (row ops, applied to t as well)…
            for i in 0..a.rows {
                if i == k || a.get(i, k) == 0 {
                    continue;
                }
                let z = r.div_gamma(a.get(i, k), v);
                for j in 0..a.cols {
                    let nv = r.sub(a.get(i, j), r.mul(z, a.get(k, j)));
                    a.set(i, j, nv);
                }
                for j in 0..t.cols {
                    let nv = r.sub(t.get(i, j), r.mul(z, t.get(k, j)));
                    t.set(i, j, nv);
                }
            }
            // …and the pivot row (column ops, accumulated into c).
            for j in 0..a.cols {
                if j == k || a.get(k, j) == 0 {
                    continue;
                }
                let z = r.div_gamma(a.get(k, j), v);
                for i in 0..a.rows {
                    let nv = r.sub(a.get(i, j), r.mul(z, a.get(i, k)));
                    a.set(i, j, nv);
                }
                for i in 0..c.rows {
                    let nv = r.sub(c.get(i, j), r.mul(z, c.get(i, k)));
                    c.set(i, j, nv);
                }
            }
            diag.push(v);
        }
        // Rows below the diagonal range must have been annihilated.
        for i in diag.len()..a.rows {
            for j in 0..a.cols {
                debug_assert_eq!(a.get(i, j), 0, "diagonalisation left residue");
            }
        }
        Ok((diag, t, c))
    }

    /// Solves `self·P = d` for an **invertible** `P` over the chain ring,
    /// via γ-power diagonalisation. `d` must have the same row count as
    /// `self`, and `P` is square of size `self.cols` (hence `d.cols` must
    /// equal `self.cols`).
    pub fn solve_right(&self, d: &Self) -> Result<Self> {
        if d.cols != self.cols {
            return Err(Error::Dimension(format!(
                "solve_right: need square P, but X has {} columns and D has {}",
                self.cols, d.cols
            )));
        }
        let r = self.ring.clone();
        let e = r.e();
        let m = self.cols;
        let (diag, t, c) = self.gamma_diagonalize(d)?;

        // Zero rows of Σ (including rows past the diagonal) demand zero rhs.
        for i in 0..t.rows {
            let di = diag.get(i).copied().unwrap_or(e);
            if di >= e {
                for j in 0..t.cols {
                    if t.get(i, j) != 0 {
                        return Err(Error::NoInvertibleSolution);
                    }
                }
            }
        }

        // Forced rows: γ^(d_i)·Y[i][j] = t[i][j].
        let mut y = Self::zero(r.clone(), m, m);
        let mut forced = Vec::new();
        for (i, &di) in diag.iter().enumerate() {
            if di >= e {
                continue;
            }
            for j in 0..m {
                let rhs = t.get(i, j);
                if r.valuation(rhs) < di {
                    return Err(Error::NoInvertibleSolution);
                }
                y.set(i, j, r.div_gamma(rhs, di));
            }
            forced.push(i);
        }

        // The forced rows are unique modulo γ; P is invertible iff they are
        // independent over the residue field and the free rows complete them.
        let fq = r.residue_field();
        let forced_bar = RingMatrix::from_fn(fq.clone(), forced.len(), m, |i, j| {
            r.residue(y.get(forced[i], j))
        });
        let mut span = forced_bar.clone();
        if span.field_rank()? < forced.len() {
            return Err(Error::NoInvertibleSolution);
        }
        for i in 0..m {
            if forced.contains(&i) {
                continue;
            }
            // Complete with the first standard basis vector that grows the span.
            let mut done = false;
            for k in 0..m {
                let mut cand = vec![0u8; m];
                cand[k] = 1;
                let trial = span.vconcat(&RingMatrix::from_rows(fq.clone(), &[cand.clone()])?)?;
                if trial.field_rank()? > span.field_rank()? {
                    span = trial;
                    for (j, &v) in cand.iter().enumerate() {
                        y.set(i, j, r.lift_code(v));
                    }
                    done = true;
                    break;
                }
            }
            if !done {
                return Err(Error::NoInvertibleSolution);
            }
        }

        let p = c.mul(&y)?;
        // Exactness and invertibility are checked, not assumed.
        if &self.mul(&p)? != d {
            return Err(Error::NoInvertibleSolution);
        }
        if p.residue_matrix().field_invertible()?.is_none() {
            return Err(Error::NoInvertibleSolution);
        }
        Ok(p)
    }

    /// Inverse over the chain ring, when it exists.
    ///
    /// A square matrix over a chain ring is invertible exactly when its
    /// residue matrix is invertible over the residue field; this method
    /// exhibits the lifted inverse.
    pub fn ring_inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("ring_inverse: non-square".into()));
        }
        self.solve_right(&Self::identity(self.ring.clone(), self.rows))
            .map_err(|_| Error::NotAUnit("matrix (singular residue)".into()))
    }
}
