//! Table-driven arithmetic for the supported finite chain rings.
//!
//! A chain ring here is one of
//!
//! * an integer residue ring `Z_{p^e}` with maximal ideal generated by
//!   `γ = p`, or
//! * a polynomial quotient `F_q[u]/⟨u^e⟩` with `q = p^w` and `γ = u`,
//!
//! together with all quotients `R/γ^s R` (the same families with smaller
//! nilpotency) and residue fields (nilpotency 1). Every supported ring has at
//! most 81 elements, so elements are stored as `u8` codes and all arithmetic
//! is precomputed into lookup tables at construction time.
//!
//! Element encoding:
//!
//! * `Z_{p^e}`: the code of `x` is its canonical representative in `0..p^e`.
//! * `F_q[u]/⟨u^e⟩`: an element `Σ c_i·u^i` has code `Σ code(c_i)·q^i`, where
//!   a field coefficient `Σ a_t·ξ^t` has code `Σ a_t·p^t` (ξ the fixed root).
//!
//! The defining polynomials are fixed once and for all: `F4: x²+x+1`,
//! `F8: x³+x+1`, `F9: x²+x+2`. In each case the root ξ is primitive, and
//! nonzero field coefficients render as powers `w, w2, w3, …` of it.

use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// The two supported chain-ring families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RingFamily {
    /// `Z_{p^e}` — integer residues, `γ = p`, residue field `F_p`.
    IntegerResidue,
    /// `F_{p^w}[u]/⟨u^e⟩` — polynomial quotients, `γ = u`, residue field `F_{p^w}`.
    PolyQuotient,
}

#[derive(Debug)]
struct RingInner {
    name: String,
    family: RingFamily,
    p: usize,
    w: usize,
    e: usize,
    q: usize,
    size: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    /// Multiplicative inverses; only meaningful where `val == 0`.
    inv: Vec<u8>,
    /// γ-adic valuation of each element; `val[0] = e`.
    val: Vec<u8>,
    /// Frobenius σ (coefficient-wise `p`-th power; identity when `w = 1`).
    frob: Vec<u8>,
    /// Projection onto the residue field, as a field code `< q`.
    residue: Vec<u8>,
    /// Teichmüller representative of each field code.
    teich: Vec<u8>,
    /// `γ^0 .. γ^e` (with `γ^e = 0`).
    gamma_pow: Vec<u8>,
    /// Discrete logs of nonzero field codes base the fixed root (`w >= 2`).
    flog: Vec<u8>,
}

/// A supported finite chain ring with fully tabulated arithmetic.
///
/// Values are cheap to clone (shared tables). Two rings are equal exactly
/// when their canonical names are equal.
#[derive(Clone)]
pub struct ChainRing {
    inner: Arc<RingInner>,
}

impl fmt::Debug for ChainRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChainRing({})", self.inner.name)
    }
}

impl PartialEq for ChainRing {
    fn eq(&self, other: &Self) -> bool {
        self.inner.name == other.inner.name
    }
}
impl Eq for ChainRing {}

impl std::hash::Hash for ChainRing {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.inner.name.hash(state);
    }
}

// ---------------------------------------------------------------------------
// Residue-field helpers (q <= 9), used only during table construction.
// ---------------------------------------------------------------------------

/// Reduction coefficients of `x^w` modulo the fixed defining polynomial,
/// lowest degree first.
fn reduction_poly(p: usize, w: usize) -> Vec<usize> {
    match (p, w) {
        (_, 1) => vec![],
        (2, 2) => vec![1, 1],    // x² = x + 1
        (2, 3) => vec![1, 1, 0], // x³ = x + 1
        (3, 2) => vec![1, 2],    // x² = 2x + 1
        _ => unreachable!("unsupported residue field F_{{{p}^{w}}}"),
    }
}

fn fcode_to_poly(c: usize, p: usize, w: usize) -> Vec<usize> {
    let mut digits = vec![0; w];
    let mut c = c;
    for d in digits.iter_mut() {
        *d = c % p;
        c /= p;
    }
    digits
}

fn poly_to_fcode(poly: &[usize], p: usize) -> usize {
    poly.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn field_add(x: usize, y: usize, p: usize, w: usize) -> usize {
    let a = fcode_to_poly(x, p, w);
    let b = fcode_to_poly(y, p, w);
    let sum: Vec<usize> = a.iter().zip(&b).map(|(u, v)| (u + v) % p).collect();
    poly_to_fcode(&sum, p)
}

fn field_mul(x: usize, y: usize, p: usize, w: usize) -> usize {
    let a = fcode_to_poly(x, p, w);
    let b = fcode_to_poly(y, p, w);
    let mut prod = vec![0usize; 2 * w];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    let red = reduction_poly(p, w);
    for deg in (w..2 * w).rev() {
        let c = prod[deg];
        if c != 0 {
            prod[deg] = 0;
            for (t, &r) in red.iter().enumerate() {
                prod[deg - w + t] = (prod[deg - w + t] + c * r) % p;
            }
        }
    }
    poly_to_fcode(&prod[..w], p)
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

impl ChainRing {
    /// Parses a ring specification string.
    ///
    /// Accepted: `Z2, Z3, Z4, Z8, Z9, Z27` (integer residues), `F4, F8, F9`
    /// (residue fields) and `F4u2, F8u2, F9u2` (polynomial quotients).
    pub fn parse_spec(spec: &str) -> Result<ChainRing> {
        let (family, p, w, e) = match spec {
            "Z2" => (RingFamily::IntegerResidue, 2, 1, 1),
            "Z3" => (RingFamily::IntegerResidue, 3, 1, 1),
            "Z4" => (RingFamily::IntegerResidue, 2, 1, 2),
            "Z8" => (RingFamily::IntegerResidue, 2, 1, 3),
            "Z9" => (RingFamily::IntegerResidue, 3, 1, 2),
            "Z27" => (RingFamily::IntegerResidue, 3, 1, 3),
            "F4" => (RingFamily::PolyQuotient, 2, 2, 1),
            "F8" => (RingFamily::PolyQuotient, 2, 3, 1),
            "F9" => (RingFamily::PolyQuotient, 3, 2, 1),
            "F4u2" => (RingFamily::PolyQuotient, 2, 2, 2),
            "F8u2" => (RingFamily::PolyQuotient, 2, 3, 2),
            "F9u2" => (RingFamily::PolyQuotient, 3, 2, 2),
            _ => return Err(Error::UnsupportedRing(spec.to_string())),
        };
        Ok(ChainRing::construct(family, p, w, e))
    }

    fn canonical_name(family: RingFamily, p: usize, w: usize, e: usize) -> String {
        match family {
            RingFamily::IntegerResidue => format!("Z{}", p.pow(e as u32)),
            RingFamily::PolyQuotient if e == 1 => format!("F{}", p.pow(w as u32)),
            RingFamily::PolyQuotient => format!("F{}u{}", p.pow(w as u32), e),
        }
    }

    fn construct(family: RingFamily, p: usize, w: usize, e: usize) -> ChainRing {
        let q = p.pow(w as u32);
        let size = q.pow(e as u32);
        assert!(size <= 256, "ring too large for u8 codes");

        let elem_add = |x: usize, y: usize| -> usize {
            match family {
                RingFamily::IntegerResidue => (x + y) % size,
                RingFamily::PolyQuotient => {
                    let mut out = 0;
                    let mut mult = 1;
                    let (mut x, mut y) = (x, y);
                    for _ in 0..e {
                        out += field_add(x % q, y % q, p, w) * mult;
                        x /= q;
                        y /= q;
                        mult *= q;
                    }
                    out
                }
            }
        };
        let elem_mul = |x: usize, y: usize| -> usize {
            match family {
                RingFamily::IntegerResidue => (x * y) % size,
                RingFamily::PolyQuotient => {
                    let xd: Vec<usize> = (0..e).map(|i| (x / q.pow(i as u32)) % q).collect();
                    let yd: Vec<usize> = (0..e).map(|i| (y / q.pow(i as u32)) % q).collect();
                    let mut out = 0;
                    for k in 0..e {
                        let mut ck = 0;
                        for i in 0..=k {
                            ck = field_add(ck, field_mul(xd[i], yd[k - i], p, w), p, w);
                        }
                        out += ck * q.pow(k as u32);
                    }
                    out
                }
            }
        };

        let mut add = vec![0u8; size * size];
        let mut mul = vec![0u8; size * size];
        for x in 0..size {
            for y in 0..size {
                add[x * size + y] = elem_add(x, y) as u8;
                mul[x * size + y] = elem_mul(x, y) as u8;
            }
        }

        let mut neg = vec![0u8; size];
        for x in 0..size {
            neg[x] = (0..size).find(|&y| add[x * size + y] == 0).unwrap() as u8;
        }

        let gamma = match family {
            RingFamily::IntegerResidue => {
                if e == 1 {
                    0
                } else {
                    p
                }
            }
            RingFamily::PolyQuotient => {
                if e == 1 {
                    0
                } else {
                    q
                }
            }
        };
        let mut gamma_pow = vec![1u8; e + 1];
        for t in 1..=e {
            gamma_pow[t] = mul[gamma_pow[t - 1] as usize * size + gamma];
        }
        debug_assert_eq!(gamma_pow[e], 0, "γ^e must vanish");

        // γ-adic valuation: largest t with x ∈ γ^t R; val(0) = e.
        let mut val = vec![0u8; size];
        for x in 0..size {
            let mut v = 0;
            while v < e {
                let g = gamma_pow[v + 1] as usize;
                let divisible = (0..size).any(|z| mul[g * size + z] == x as u8);
                if divisible {
                    v += 1;
                } else {
                    break;
                }
            }
            val[x] = v as u8;
        }

        let mut inv = vec![0u8; size];
        for x in 0..size {
            if val[x] == 0 {
                inv[x] = (0..size).find(|&y| mul[x * size + y] == 1).unwrap() as u8;
            }
        }

        // Residue projection and Teichmüller set {x : x^q = x}.
        let mut residue = vec![0u8; size];
        for x in 0..size {
            residue[x] = match family {
                RingFamily::IntegerResidue => (x % p) as u8,
                RingFamily::PolyQuotient => (x % q) as u8,
            };
        }
        let mut teich = vec![0u8; q];
        let mut teich_seen = vec![false; q];
        for x in 0..size {
            let mut pow = 1usize;
            for _ in 0..q {
                pow = mul[pow * size + x] as usize;
            }
            if pow == x {
                let r = residue[x] as usize;
                assert!(!teich_seen[r], "Teichmüller set must hit each residue once");
                teich_seen[r] = true;
                teich[r] = x as u8;
            }
        }
        assert!(teich_seen.iter().all(|&s| s), "Teichmüller set incomplete");

        // Frobenius: coefficient-wise p-th power.
        let mut frob = vec![0u8; size];
        for x in 0..size {
            frob[x] = match family {
                RingFamily::IntegerResidue => x as u8,
                RingFamily::PolyQuotient => {
                    let mut out = 0usize;
                    for i in 0..e {
                        let c = (x / q.pow(i as u32)) % q;
                        let mut cp = c;
                        for _ in 1..p {
                            cp = field_mul(cp, c, p, w);
                        }
                        out += cp * q.pow(i as u32);
                    }
                    out as u8
                }
            };
        }

        // Discrete logs base the fixed root (for rendering, w >= 2 only).
        let mut flog = vec![0u8; q];
        if w >= 2 {
            let root = p; // field code of ξ
            let mut pow = 1usize;
            for k in 0..q - 1 {
                flog[pow] = k as u8;
                pow = field_mul(pow, root, p, w);
            }
            assert_eq!(pow, 1, "fixed root must be primitive");
        }

        ChainRing {
            inner: Arc::new(RingInner {
                name: Self::canonical_name(family, p, w, e),
                family,
                p,
                w,
                e,
                q,
                size,
                add,
                mul,
                neg,
                inv,
                val,
                frob,
                residue,
                teich,
                gamma_pow,
                flog,
            }),
        }
    }

    // -- accessors ----------------------------------------------------------

    /// Canonical specification string (`Z4`, `F9u2`, …).
    pub fn name(&self) -> &str {
        &self.inner.name
    }
    /// Ring family.
    pub fn family(&self) -> RingFamily {
        self.inner.family
    }
    /// Residue-field characteristic.
    pub fn p(&self) -> usize {
        self.inner.p
    }
    /// Automorphism order: the residue field is `F_{p^w}`.
    pub fn w(&self) -> usize {
        self.inner.w
    }
    /// Nilpotency index of γ.
    pub fn e(&self) -> usize {
        self.inner.e
    }
    /// Residue-field size `q = p^w`.
    pub fn q(&self) -> usize {
        self.inner.q
    }
    /// Total number of elements, `q^e`.
    pub fn size(&self) -> usize {
        self.inner.size
    }
    /// Whether this ring is a field (`e = 1`).
    pub fn is_field(&self) -> bool {
        self.inner.e == 1
    }
    /// All element codes.
    pub fn elems(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.inner.size).map(|x| x as u8)
    }
    /// Number of units, `q^e - q^(e-1)`.
    pub fn unit_count(&self) -> usize {
        self.inner.size - self.inner.size / self.inner.q
    }
    /// All unit codes, ascending.
    pub fn units(&self) -> impl Iterator<Item = u8> + '_ {
        self.elems().filter(move |&x| self.is_unit(x))
    }

    // -- arithmetic ---------------------------------------------------------

    /// `x + y`.
    #[inline]
    pub fn add(&self, x: u8, y: u8) -> u8 {
        self.inner.add[x as usize * self.inner.size + y as usize]
    }
    /// `x - y`.
    #[inline]
    pub fn sub(&self, x: u8, y: u8) -> u8 {
        self.add(x, self.neg(y))
    }
    /// `x · y`.
    #[inline]
    pub fn mul(&self, x: u8, y: u8) -> u8 {
        self.inner.mul[x as usize * self.inner.size + y as usize]
    }
    /// `-x`.
    #[inline]
    pub fn neg(&self, x: u8) -> u8 {
        self.inner.neg[x as usize]
    }
    /// Whether `x` is a unit.
    #[inline]
    pub fn is_unit(&self, x: u8) -> bool {
        self.inner.val[x as usize] == 0
    }
    /// Multiplicative inverse of a unit.
    pub fn inv(&self, x: u8) -> Result<u8> {
        if self.is_unit(x) {
            Ok(self.inner.inv[x as usize])
        } else {
            Err(Error::NotAUnit(self.render_elem(x)))
        }
    }
    /// γ-adic valuation; `valuation(0) = e`.
    #[inline]
    pub fn valuation(&self, x: u8) -> usize {
        self.inner.val[x as usize] as usize
    }
    /// `γ^t` (with `γ^e = 0`).
    pub fn gamma_pow(&self, t: usize) -> u8 {
        if t >= self.inner.e {
            0
        } else {
            self.inner.gamma_pow[t]
        }
    }
    /// The generator γ of the maximal ideal (0 in a field).
    pub fn gamma(&self) -> u8 {
        self.gamma_pow(1)
    }
    /// Exact division by `γ^t`; requires `valuation(x) >= t`.
    pub fn div_gamma(&self, x: u8, t: usize) -> u8 {
        debug_assert!(self.valuation(x) >= t, "div_gamma needs valuation >= t");
        match self.inner.family {
            RingFamily::IntegerResidue => (x as usize / self.inner.p.pow(t as u32)) as u8,
            RingFamily::PolyQuotient => (x as usize / self.inner.q.pow(t as u32)) as u8,
        }
    }

    /// Frobenius power `σ^h` (needs `0 <= h < w`).
    pub fn frobenius(&self, x: u8, h: usize) -> Result<u8> {
        if h >= self.inner.w {
            return Err(Error::InvalidFrobeniusPower {
                h,
                w: self.inner.w,
            });
        }
        let mut out = x;
        for _ in 0..h {
            out = self.inner.frob[out as usize];
        }
        Ok(out)
    }

    // -- residue field, Teichmüller set, quotients --------------------------

    /// Projection onto the residue field, as a field code `< q`.
    #[inline]
    pub fn residue(&self, x: u8) -> u8 {
        self.inner.residue[x as usize]
    }
    /// The residue field as a ring of its own.
    pub fn residue_field(&self) -> ChainRing {
        ChainRing::construct(self.inner.family, self.inner.p, self.inner.w, 1)
    }
    /// Teichmüller representative of a field code.
    pub fn teich_lift(&self, fcode: u8) -> u8 {
        self.inner.teich[fcode as usize]
    }
    /// The full Teichmüller set, indexed by field code.
    pub fn teich_set(&self) -> &[u8] {
        &self.inner.teich
    }

    /// The quotient ring `R/γ^s R` (same family, nilpotency `s`), `1 <= s <= e`.
    pub fn quotient(&self, s: usize) -> Result<ChainRing> {
        if s == 0 || s > self.inner.e {
            return Err(Error::InvalidQuotientDepth {
                s,
                e: self.inner.e,
            });
        }
        Ok(ChainRing::construct(
            self.inner.family,
            self.inner.p,
            self.inner.w,
            s,
        ))
    }

    /// Canonical projection `R -> R/γ^s R` on element codes.
    ///
    /// Codes are chosen so that this is numeric reduction modulo the quotient
    /// size, and so that [`ChainRing::lift_code`] is the identity embedding.
    pub fn reduce_code(&self, x: u8, s: usize) -> u8 {
        let qsize = self.inner.q.pow(s as u32);
        (x as usize % qsize) as u8
    }

    /// Canonical lift `R/γ^s R -> R` on element codes (identity embedding).
    pub fn lift_code(&self, xq: u8) -> u8 {
        xq
    }

    /// The embedding `ι: R/γ^s R -> R`, `x ↦ γ^(e-s)·lift(x)`.
    pub fn iota(&self, xq: u8, s: usize) -> u8 {
        self.mul(self.gamma_pow(self.inner.e - s), self.lift_code(xq))
    }

    // -- rendering and parsing ----------------------------------------------

    fn field_coeff_name(&self, c: u8) -> String {
        match c {
            0 => "0".to_string(),
            1 => "1".to_string(),
            _ if self.inner.w == 1 => c.to_string(),
            _ => {
                let k = self.inner.flog[c as usize];
                if k == 1 {
                    "w".to_string()
                } else {
                    format!("w{k}")
                }
            }
        }
    }

    fn parse_field_coeff(&self, tok: &str) -> Option<u8> {
        let q = self.inner.q as u8;
        if tok == "0" {
            return Some(0);
        }
        if tok == "1" {
            return Some(1);
        }
        if self.inner.w == 1 {
            return tok.parse::<u8>().ok().filter(|&c| c < q);
        }
        if let Some(rest) = tok.strip_prefix('w') {
            let k: usize = if rest.is_empty() {
                1
            } else {
                rest.parse().ok()?
            };
            let root = self.inner.p as u8;
            let mut out = 1u8;
            let fq = self.residue_field();
            for _ in 0..k % (self.inner.q - 1) {
                out = fq.mul(out, root);
            }
            return Some(out);
        }
        // Prime-subfield constants (e.g. `2` in F9) are accepted as sugar.
        tok.parse::<u8>()
            .ok()
            .filter(|&c| c < self.inner.p as u8)
    }

    /// Renders an element code as canonical text.
    pub fn render_elem(&self, x: u8) -> String {
        match self.inner.family {
            RingFamily::IntegerResidue => x.to_string(),
            RingFamily::PolyQuotient => {
                if x == 0 {
                    return "0".to_string();
                }
                let q = self.inner.q;
                let mut terms = Vec::new();
                for i in 0..self.inner.e {
                    let c = ((x as usize) / q.pow(i as u32) % q) as u8;
                    if c == 0 {
                        continue;
                    }
                    let coef = self.field_coeff_name(c);
                    let term = match i {
                        0 => coef,
                        1 if c == 1 => "u".to_string(),
                        1 => format!("{coef}*u"),
                        _ if c == 1 => format!("u{i}"),
                        _ => format!("{coef}*u{i}"),
                    };
                    terms.push(term);
                }
                terms.join("+")
            }
        }
    }

    /// Parses canonical element text back to a code.
    pub fn parse_elem(&self, text: &str) -> Result<u8> {
        let bad = || Error::Invalid(format!("invalid {} element `{}`", self.name(), text));
        match self.inner.family {
            RingFamily::IntegerResidue => {
                let v: usize = text.trim().parse().map_err(|_| bad())?;
                if v < self.inner.size {
                    Ok(v as u8)
                } else {
                    Err(bad())
                }
            }
            RingFamily::PolyQuotient => {
                let text = text.trim();
                if text == "0" {
                    return Ok(0);
                }
                let q = self.inner.q;
                let mut out = 0usize;
                for term in text.split('+') {
                    let term = term.trim();
                    let (coef_tok, upow) = if let Some(idx) = term.find('u') {
                        let (head, tail) = term.split_at(idx);
                        let pow: usize = if tail[1..].is_empty() {
                            1
                        } else {
                            tail[1..].parse().map_err(|_| bad())?
                        };
                        let coef = head.trim_end_matches('*');
                        let coef = if coef.is_empty() { "1" } else { coef };
                        (coef.to_string(), pow)
                    } else {
                        (term.to_string(), 0)
                    };
                    if upow >= self.inner.e {
                        return Err(bad());
                    }
                    let c = self.parse_field_coeff(&coef_tok).ok_or_else(bad)?;
                    if c == 0 && coef_tok != "0" {
                        return Err(bad());
                    }
                    out += c as usize * q.pow(upow as u32);
                    if out >= self.inner.size {
                        return Err(bad());
                    }
                }
                Ok(out as u8)
            }
        }
    }
}

// ---------------------------------------------------------------------------

/// All mixed-capable ring specifications (nilpotency at least 2).
pub const MIXED_RINGS: [&str; 7] = ["Z4", "Z8", "Z9", "Z27", "F4u2", "F8u2", "F9u2"];
