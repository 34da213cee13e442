//! The box-cover-with-summaries payload and its bit-exact codeword.
//!
//! Layout of a codeword: the entry list followed by the parameter triple
//! `(eps_star, eps, f)`. Delimiters are 2-bit pairs: comma `00`, open `01`,
//! close `10`; an empty tuple is the single pair `10`. Every number is its
//! `Bit` form followed by the terminator `11`. Integers are a sign pair
//! (`00` plus, `01` minus) and one pair `0b` per binary digit. Rationals put
//! the separator `10` between numerator and denominator digits. The function
//! text is stored as raw ASCII bytes, whose leading zero bit keeps the
//! terminator unambiguous.
//!
//! Each entry is `((c1_1..c1_k, c2_1..c2_k), num, den)`. Corner coordinates
//! are padded to the digit width of `n`, the grid volume, and summary
//! numerators and denominators are padded to the widest of them, so every
//! entry of a codeword has the same length.

use crate::boxgeom::{rasterize, GridBox};
use crate::error::{Error, Result};
use crate::field::VoxelField;
use crate::poly::{parse_self_describing, PiecewisePolynomial};
use crate::rational::{bit_len, digits_padded, from_digits, is_negative, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Bits per delimiter.
pub const R: usize = 2;

const COMMA: (bool, bool) = (false, false);
const OPEN: (bool, bool) = (false, true);
const CLOSE: (bool, bool) = (true, false);
const TERM: (bool, bool) = (true, true);

/// Largest grid volume whose coverage the decoder will rasterize.
pub const MAX_DECODE_VOXELS: usize = 1 << 26;

/// One box of a cover with its scalar summary.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Entry {
    pub bx: GridBox,
    pub summary: Q,
}

/// A box cover with one rational summary per box, plus the working
/// tolerance `eps_star`, the error bound `eps` and the energy function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxCoverSummaries {
    entries: Vec<Entry>,
    eps_star: Q,
    eps: Q,
    f: PiecewisePolynomial,
}

impl BoxCoverSummaries {
    /// Builds a payload with entries sorted by `(c1, c2)` in row-major order.
    /// Requires `0 < eps_star < eps < 1`, boxes of one dimension and no box
    /// listed twice.
    pub fn new(mut entries: Vec<Entry>, eps_star: Q, eps: Q, f: PiecewisePolynomial) -> Result<Self> {
        if !(eps_star > Q::zero() && eps_star < eps && eps < Q::one()) {
            return Err(Error::InvariantViolation(format!("tolerances must satisfy 0 < {eps_star} < {eps} < 1")));
        }
        if let Some(e) = entries.first() {
            let k = e.bx.k();
            if entries.iter().any(|e| e.bx.k() != k) {
                return Err(Error::DimensionMismatch("entries mix box dimensions".into()));
            }
        }
        entries.sort_by(|a, b| a.bx.cmp(&b.bx));
        if entries.windows(2).any(|w| w[0].bx == w[1].bx) {
            return Err(Error::InvariantViolation("a box appears twice".into()));
        }
        Ok(BoxCoverSummaries { entries, eps_star, eps, f })
    }

    /// Entries in codeword order.
    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Working summary tolerance.
    pub fn eps_star(&self) -> &Q {
        &self.eps_star
    }

    /// Error bound.
    pub fn eps(&self) -> &Q {
        &self.eps
    }

    /// Energy function.
    pub fn f(&self) -> &PiecewisePolynomial {
        &self.f
    }

    /// Grid dimension `k`, zero for an empty cover.
    pub fn k(&self) -> usize {
        self.entries.first().map_or(0, |e| e.bx.k())
    }

    /// Grid extents implied by the boxes: the largest maximum corner per axis.
    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![0; self.k()];
        for e in &self.entries {
            for (j, c) in e.bx.c2().iter().enumerate() {
                d[j] = d[j].max(*c);
            }
        }
        d
    }

    /// Grid volume implied by the boxes, zero for an empty cover.
    pub fn n(&self) -> usize {
        if self.entries.is_empty() {
            0
        } else {
            self.dims().iter().product()
        }
    }

    /// Digit width shared by every summary numerator and denominator.
    pub fn summary_width(&self) -> usize {
        self.entries
            .iter()
            .flat_map(|e| [bit_len(e.summary.numer()), bit_len(e.summary.denom())])
            .max()
            .unwrap_or(1)
    }

    /// Checks that the boxes cover every voxel of `field` and that every
    /// covered energy lies within `eps_star` of its box summary. Returns the
    /// list of problems, empty when the payload is consistent with the field.
    pub fn check_against(&self, field: &VoxelField) -> Result<Vec<String>> {
        let mut problems = Vec::new();
        if self.entries.iter().any(|e| !e.bx.fits(field.dims())) {
            problems.push("a box leaves the field's grid".to_string());
            return Ok(problems);
        }
        let cov = rasterize(field.dims(), &self.entries.iter().map(|e| e.bx.clone()).collect::<Vec<_>>());
        if let Some(i) = cov.iter().position(|c| !c) {
            problems.push(format!("voxel {} is not covered", crate::field::flat_to_coord(field.dims(), i + 1)?));
        }
        for (t, e) in self.entries.iter().enumerate() {
            for c in e.bx.cells() {
                let v = self.f.eval(field.vector(crate::field::flat0(field.dims(), &c)))?;
                if (&v - &e.summary).abs() > self.eps_star {
                    problems.push(format!("entry {t}: energy {v} strays from summary {} beyond eps_star", e.summary));
                }
            }
        }
        Ok(problems)
    }
}

/// A serialized payload.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Codeword {
    bits: Vec<bool>,
}

impl Codeword {
    /// Wraps raw bits.
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Codeword { bits }
    }

    /// The bits.
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of bits.
    pub fn bit_length(&self) -> usize {
        self.bits.len()
    }

    /// File form: 8-byte big-endian bit length, then the bits packed
    /// most-significant first and zero-padded to a whole byte.
    pub fn to_vbx(&self) -> Vec<u8> {
        let mut out = (self.bits.len() as u64).to_be_bytes().to_vec();
        for chunk in self.bits.chunks(8) {
            let mut b = 0u8;
            for (i, &bit) in chunk.iter().enumerate() {
                if bit {
                    b |= 0x80 >> i;
                }
            }
            out.push(b);
        }
        out
    }

    /// Parses the file form, rejecting wrong lengths and nonzero padding.
    pub fn from_vbx(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 {
            return Err(Error::Malformed { pos: 0, msg: "file shorter than its 8-byte header".into() });
        }
        let len = u64::from_be_bytes(bytes[..8].try_into().expect("8 bytes")) as usize;
        let body = &bytes[8..];
        if body.len() != len.div_ceil(8) {
            return Err(Error::Malformed { pos: 0, msg: format!("header declares {len} bits but {} bytes follow", body.len()) });
        }
        let bits: Vec<bool> = body.iter().flat_map(|b| (0..8).rev().map(move |i| (b >> i) & 1 == 1)).collect();
        if bits[len..].iter().any(|&b| b) {
            return Err(Error::Malformed { pos: len, msg: "nonzero padding bits".into() });
        }
        Ok(Codeword { bits: bits[..len].to_vec() })
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A nested tuple of numbers, the input of the recursive serializer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rec {
    /// The `Bit` form of a number, without its terminator.
    Num(Vec<bool>),
    /// A tuple of nested values.
    Tuple(Vec<Rec>),
}

/// Recursive tuple serialization: numbers get the `11` terminator, tuples are
/// wrapped in open/close pairs with commas between items, and the empty tuple
/// is a lone close pair.
pub fn rec_tuple_bits(x: &Rec, out: &mut Vec<bool>) {
    match x {
        Rec::Num(b) => {
            out.extend(b);
            push_pair(out, TERM);
        }
        Rec::Tuple(items) if items.is_empty() => push_pair(out, CLOSE),
        Rec::Tuple(items) => {
            push_pair(out, OPEN);
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    push_pair(out, COMMA);
                }
                rec_tuple_bits(it, out);
            }
            push_pair(out, CLOSE);
        }
    }
}

fn push_pair(out: &mut Vec<bool>, p: (bool, bool)) {
    out.push(p.0);
    out.push(p.1);
}

fn push_digits(out: &mut Vec<bool>, digits: &[bool]) {
    for &d in digits {
        push_pair(out, (false, d));
    }
}

fn sign_pair(neg: bool) -> (bool, bool) {
    if neg {
        (false, true)
    } else {
        (false, false)
    }
}

/// `Bit` form of an integer with its magnitude padded to `width` digits.
pub fn bit_int(x: &BigInt, width: usize) -> Vec<bool> {
    let mut out = Vec::with_capacity(2 + 2 * width);
    push_pair(&mut out, sign_pair(is_negative(x)));
    push_digits(&mut out, &digits_padded(x, width));
    out
}

/// `Bit` form of a rational: sign, numerator digits, separator, denominator digits.
pub fn bit_rational(x: &Q) -> Vec<bool> {
    let mut out = Vec::new();
    push_pair(&mut out, sign_pair(is_negative(x.numer())));
    push_digits(&mut out, &digits_padded(x.numer(), bit_len(x.numer())));
    push_pair(&mut out, CLOSE);
    push_digits(&mut out, &digits_padded(x.denom(), bit_len(x.denom())));
    out
}

/// `Bit` form of the energy function: the ASCII bytes of its canonical text.
pub fn bit_function(f: &PiecewisePolynomial) -> Vec<bool> {
    f.canonical().bytes().flat_map(|b| (0..8).rev().map(move |i| (b >> i) & 1 == 1)).collect()
}

/// Length of a terminated rational, the storage cost of one number.
pub fn rational_bit_len(x: &Q) -> usize {
    2 + 2 * bit_len(x.numer()) + 2 + 2 * bit_len(x.denom()) + 2
}

/// Length of a terminated integer padded to `width` digits.
pub fn int_bit_len(width: usize) -> usize {
    2 + 2 * width + 2
}

/// Length of the terminated energy function.
pub fn function_bit_len(f: &PiecewisePolynomial) -> usize {
    f.size_bits() + 2
}

/// The two corners that determine a box: its minimum and maximum voxels.
pub fn encode_box(b: &GridBox) -> (Vec<usize>, Vec<usize>) {
    (b.c1().to_vec(), b.c2().to_vec())
}

/// Bits spent on one entry of a codeword on a `k`-dimensional grid of
/// volume `n` with summary digit width `w`.
pub fn entry_cost(k: usize, n: usize, w: usize) -> usize {
    (2 * k + 6) * R + 2 * k * int_bit_len(bit_len(&BigInt::from(n))) + 2 * int_bit_len(w)
}

/// Closed-form codeword length:
/// `|S| * ((2k+6)r + 2k size(n) + 2v) + 5r + size(eps_star) + size(eps) + size(f)`.
pub fn size_formula(p: &BoxCoverSummaries) -> usize {
    p.entries.len() * entry_cost(p.k(), p.n(), p.summary_width())
        + 5 * R
        + rational_bit_len(&p.eps_star)
        + rational_bit_len(&p.eps)
        + function_bit_len(&p.f)
}

/// Serializes a payload.
pub fn serialize(p: &BoxCoverSummaries) -> Codeword {
    let cw = bit_len(&BigInt::from(p.n()));
    let vw = p.summary_width();
    let entries: Vec<Rec> = p
        .entries
        .iter()
        .map(|e| {
            let corners = e
                .bx
                .c1()
                .iter()
                .chain(e.bx.c2())
                .map(|&c| Rec::Num(bit_int(&BigInt::from(c), cw)))
                .collect();
            Rec::Tuple(vec![
                Rec::Tuple(corners),
                Rec::Num(bit_int(e.summary.numer(), vw)),
                Rec::Num(bit_int(e.summary.denom(), vw)),
            ])
        })
        .collect();
    let params = Rec::Tuple(vec![
        Rec::Num(bit_rational(&p.eps_star)),
        Rec::Num(bit_rational(&p.eps)),
        Rec::Num(bit_function(&p.f)),
    ]);
    let mut bits = Vec::with_capacity(size_formula(p));
    rec_tuple_bits(&Rec::Tuple(entries), &mut bits);
    rec_tuple_bits(&params, &mut bits);
    Codeword { bits }
}

/// Compression ratio: field storage bits over codeword bits.
pub fn compression_ratio(p: &BoxCoverSummaries, field: &VoxelField) -> Q {
    Q::new(field.size_bits().into(), serialize(p).bit_length().into())
}

struct Reader<'a> {
    bits: &'a [bool],
    pos: usize,
}

struct RawInt {
    neg: bool,
    digits: Vec<bool>,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, pos: usize, msg: impl Into<String>) -> Error {
        Error::Malformed { pos, msg: msg.into() }
    }

    fn pair(&mut self) -> Result<(bool, bool)> {
        if self.pos + 2 > self.bits.len() {
            return Err(self.err(self.pos, "stream ends inside a pair"));
        }
        let p = (self.bits[self.pos], self.bits[self.pos + 1]);
        self.pos += 2;
        Ok(p)
    }

    fn expect(&mut self, want: (bool, bool), what: &str) -> Result<()> {
        let at = self.pos;
        if self.pair()? != want {
            return Err(self.err(at, format!("expected {what}")));
        }
        Ok(())
    }

    fn sign(&mut self) -> Result<bool> {
        let at = self.pos;
        match self.pair()? {
            (false, false) => Ok(false),
            (false, true) => Ok(true),
            _ => Err(self.err(at, "expected a sign pair")),
        }
    }

    /// Digit pairs up to and including `stop`; any other non-digit pair fails.
    fn digits(&mut self, stop: (bool, bool), what: &str) -> Result<Vec<bool>> {
        let mut d = Vec::new();
        loop {
            let at = self.pos;
            match self.pair()? {
                (false, b) => d.push(b),
                p if p == stop => break,
                _ => return Err(self.err(at, format!("unexpected delimiter inside {what}"))),
            }
        }
        if d.is_empty() {
            return Err(self.err(self.pos - 2, format!("{what} has no digits")));
        }
        Ok(d)
    }

    fn int(&mut self) -> Result<RawInt> {
        let pos = self.pos;
        let neg = self.sign()?;
        let digits = self.digits(TERM, "an integer")?;
        Ok(RawInt { neg, digits, pos })
    }

    fn rational(&mut self) -> Result<Q> {
        let at = self.pos;
        let neg = self.sign()?;
        let nd = self.digits(CLOSE, "a numerator")?;
        let dd = self.digits(TERM, "a denominator")?;
        let num = from_digits(&nd);
        let den = from_digits(&dd);
        if nd.len() != bit_len(&num) || dd.len() != bit_len(&den) {
            return Err(self.err(at, "rational digits are not minimal"));
        }
        if den.is_zero() || !num.gcd(&den).is_one() || (neg && num.is_zero()) {
            return Err(self.err(at, "rational is not in lowest terms"));
        }
        Ok(Q::new(if neg { -num } else { num }, den))
    }

    fn ascii(&mut self) -> Result<String> {
        let at = self.pos;
        let mut bytes = Vec::new();
        loop {
            if self.pos + 2 <= self.bits.len() && self.bits[self.pos] && self.bits[self.pos + 1] {
                self.pos += 2;
                break;
            }
            if self.pos + 8 > self.bits.len() {
                return Err(self.err(self.pos, "stream ends inside the function text"));
            }
            let b = self.bits[self.pos..self.pos + 8].iter().fold(0u8, |acc, &x| (acc << 1) | x as u8);
            if !(0x20..0x7f).contains(&b) {
                return Err(self.err(self.pos, "function text is not printable ASCII"));
            }
            bytes.push(b);
            self.pos += 8;
        }
        String::from_utf8(bytes).map_err(|_| self.err(at, "function text is not ASCII"))
    }
}

fn natural(r: &RawInt, width: usize, what: &str) -> Result<usize> {
    if r.neg {
        return Err(Error::Malformed { pos: r.pos, msg: format!("{what} is negative") });
    }
    if r.digits.len() != width {
        return Err(Error::Malformed { pos: r.pos, msg: format!("{what} is not padded to {width} digits") });
    }
    if r.digits.len() > 63 {
        return Err(Error::Malformed { pos: r.pos, msg: format!("{what} is too large") });
    }
    Ok(from_digits(&r.digits).try_into().expect("fits in 63 bits"))
}

/// Decodes a codeword, enforcing the canonical form produced by
/// [`serialize`]: padding widths, entry order, reduced fractions, a full
/// cover of the implied grid and a function text that reprints identically.
pub fn deserialize(code: &Codeword) -> Result<BoxCoverSummaries> {
    let mut rd = Reader { bits: &code.bits, pos: 0 };
    let mut raw: Vec<(usize, Vec<RawInt>, RawInt, RawInt)> = Vec::new();
    let at = rd.pos;
    match rd.pair()? {
        CLOSE => {}
        OPEN => loop {
            let start = rd.pos;
            rd.expect(OPEN, "an entry")?;
            rd.expect(OPEN, "a corner tuple")?;
            let mut corners = vec![rd.int()?];
            loop {
                let at = rd.pos;
                match rd.pair()? {
                    COMMA => corners.push(rd.int()?),
                    CLOSE => break,
                    _ => return Err(rd.err(at, "expected comma or close in corner tuple")),
                }
            }
            rd.expect(COMMA, "comma after corners")?;
            let num = rd.int()?;
            rd.expect(COMMA, "comma after numerator")?;
            let den = rd.int()?;
            rd.expect(CLOSE, "close of entry")?;
            raw.push((start, corners, num, den));
            let at = rd.pos;
            match rd.pair()? {
                COMMA => {}
                CLOSE => break,
                _ => return Err(rd.err(at, "expected comma or close in entry list")),
            }
        },
        _ => return Err(rd.err(at, "expected the entry list")),
    }
    rd.expect(OPEN, "the parameter tuple")?;
    let eps_star = rd.rational()?;
    rd.expect(COMMA, "comma after eps_star")?;
    let eps = rd.rational()?;
    rd.expect(COMMA, "comma after eps")?;
    let f_at = rd.pos;
    let text = rd.ascii()?;
    rd.expect(CLOSE, "close of the parameter tuple")?;
    if rd.pos != code.bits.len() {
        return Err(rd.err(rd.pos, "trailing bits after the codeword"));
    }
    let f = parse_self_describing(&text).map_err(|e| Error::Malformed { pos: f_at, msg: format!("function text: {e}") })?;
    if f.canonical() != text {
        return Err(Error::Malformed { pos: f_at, msg: "function text is not canonical".into() });
    }

    let k2 = raw.first().map_or(0, |r| r.1.len());
    if k2 % 2 == 1 || raw.iter().any(|r| r.1.len() != k2) {
        return Err(Error::Malformed { pos: raw[0].0, msg: "corner tuples must hold 2k coordinates".into() });
    }
    let k = k2 / 2;
    let cw = raw.first().map_or(0, |r| r.1[0].digits.len());
    let vw = raw.iter().flat_map(|r| [r.2.digits.len(), r.3.digits.len()]).max().unwrap_or(1);
    let mut entries = Vec::with_capacity(raw.len());
    for (start, corners, num, den) in &raw {
        let c = corners.iter().map(|r| natural(r, cw, "corner")).collect::<Result<Vec<_>>>()?;
        let bx = GridBox::new(c[..k].to_vec(), c[k..].to_vec())
            .map_err(|e| Error::Malformed { pos: *start, msg: e.to_string() })?;
        if num.digits.len() != vw || den.digits.len() != vw {
            return Err(Error::Malformed { pos: num.pos, msg: format!("summary not padded to {vw} digits") });
        }
        let n = from_digits(&num.digits);
        let d = from_digits(&den.digits);
        if den.neg || d.is_zero() || !n.gcd(&d).is_one() || (num.neg && n.is_zero()) {
            return Err(Error::Malformed { pos: num.pos, msg: "summary is not a reduced fraction".into() });
        }
        entries.push((*start, Entry { bx, summary: Q::new(if num.neg { -n } else { n }, d) }));
    }
    for w in entries.windows(2) {
        if w[0].1.bx >= w[1].1.bx {
            return Err(Error::Malformed { pos: w[1].0, msg: "entries out of order".into() });
        }
    }
    let entries: Vec<Entry> = entries.into_iter().map(|(_, e)| e).collect();
    let p = BoxCoverSummaries::new(entries, eps_star, eps, f)?;
    if !p.entries.is_empty() {
        if cw != bit_len(&BigInt::from(p.n())) {
            return Err(Error::Malformed { pos: raw[0].0, msg: "corner width disagrees with the grid volume".into() });
        }
        if vw != p.summary_width() {
            return Err(Error::Malformed { pos: raw[0].0, msg: "summary width is wider than needed".into() });
        }
        if p.n() > MAX_DECODE_VOXELS {
            return Err(Error::InvariantViolation(format!("grid of {} voxels is too large to decode", p.n())));
        }
        let boxes: Vec<GridBox> = p.entries.iter().map(|e| e.bx.clone()).collect();
        if rasterize(&p.dims(), &boxes).iter().any(|c| !c) {
            return Err(Error::InvariantViolation("boxes do not cover their grid".into()));
        }
    }
    Ok(p)
}
