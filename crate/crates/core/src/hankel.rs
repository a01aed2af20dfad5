//! Hankel vectors and the bracketed shorthand `[top/center/right]`.
//!
//! An `M×M` Hankel matrix is fixed by its `2M−1` skew-diagonals. The
//! shorthand lists them along the top row (left to right) and down the right
//! column (top to bottom), with the top-right corner set off by slashes:
//!
//! ```text
//! [0,0,0/1/0,1,0]              4x4, ones on skew-diagonals 4 and 6
//! [0_11/1/0_5,1,0_5]           0_n expands to n zeros
//! scale=1/sqrt(2) [-1/1/1]     every entry multiplied by 1/√2
//! ```

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::{self, Write as _};

use crate::comb::CouplingMatrix;
use crate::error::{Error, Result};
use crate::linalg::{AsMatrix, ensure_square, max_abs, Matrix};

/// Default skew-diagonal tolerance for [`matrix_to_hankel`], relative to the
/// largest matrix entry.
pub const DEFAULT_HANKEL_TOL: f64 = 1e-12;

/// The `2M−1` skew-diagonal values of an `M×M` Hankel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelVector {
    top: Vec<f64>,
    center: f64,
    right: Vec<f64>,
}

impl HankelVector {
    pub fn new(top: Vec<f64>, center: f64, right: Vec<f64>) -> Result<Self> {
        if top.len() != right.len() {
            return Err(Error::UnequalSides {
                top: top.len(),
                right: right.len(),
            });
        }
        if !center.is_finite() || top.iter().chain(&right).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { top, center, right })
    }

    /// Builds from the full skew-diagonal list (odd length `2M−1`).
    pub fn from_entries(entries: &[f64]) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        if entries.len().is_multiple_of(2) {
            let half = entries.len() / 2;
            return Err(Error::UnequalSides {
                top: half,
                right: half - 1,
            });
        }
        let m = entries.len() / 2;
        Self::new(entries[..m].to_vec(), entries[m], entries[m + 1..].to_vec())
    }

    /// Matrix dimension `M`.
    pub fn size(&self) -> usize {
        self.top.len() + 1
    }

    pub fn top(&self) -> &[f64] {
        &self.top
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn right(&self) -> &[f64] {
        &self.right
    }

    /// Value on skew-diagonal `k` (0-based, `k = i + j` for 0-based `(i, j)`).
    pub fn get(&self, k: usize) -> f64 {
        let m = self.top.len();
        match k.cmp(&m) {
            core::cmp::Ordering::Less => self.top[k],
            core::cmp::Ordering::Equal => self.center,
            core::cmp::Ordering::Greater => self.right[k - m - 1],
        }
    }

    pub fn entries(&self) -> Vec<f64> {
        let mut out = self.top.clone();
        out.push(self.center);
        out.extend_from_slice(&self.right);
        out
    }

    /// The dense `M×M` matrix with entry `(i, j) = self.get(i + j)`.
    pub fn to_matrix(&self) -> Matrix {
        let m = self.size();
        Matrix::from_fn(m, m, |i, j| self.get(i + j))
    }
}

impl fmt::Display for HankelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_hankel_shorthand(self))
    }
}

impl core::str::FromStr for HankelVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_hankel_shorthand(s)
    }
}

/// `M×M` coupling matrix over an unpolarized comb with modes `1..=M`.
pub fn hankel_to_matrix(v: &HankelVector) -> CouplingMatrix {
    CouplingMatrix::unlabeled(v.to_matrix()).expect("Hankel matrices are symmetric")
}

/// Reads the skew-diagonals back out of a square matrix, failing if any of
/// them varies by more than `tol · max|entry|`.
///
/// Values are taken from the top row and right column, so
/// `matrix_to_hankel(hankel_to_matrix(v))` reproduces `v` exactly.
pub fn matrix_to_hankel(g: &impl AsMatrix, tol: f64) -> Result<HankelVector> {
    let g = g.as_matrix();
    let m = ensure_square(g)?;
    if m == 0 {
        return Err(Error::EmptyVector);
    }
    let limit = tol * max_abs(g);
    let mut entries = Vec::with_capacity(2 * m - 1);
    for k in 0..(2 * m - 1) {
        let (i0, j0) = if k < m { (0, k) } else { (k - m + 1, m - 1) };
        let value = g[(i0, j0)];
        let mut deviation: f64 = 0.0;
        let (mut i, mut j) = (i0, j0);
        loop {
            deviation = deviation.max((g[(i, j)] - value).abs());
            if i + 1 >= m || j == 0 {
                break;
            }
            i += 1;
            j -= 1;
        }
        if deviation > limit {
            return Err(Error::NotHankel {
                diagonal: k,
                deviation,
            });
        }
        entries.push(value);
    }
    HankelVector::from_entries(&entries)
}

/// Prints the shorthand form. Zero runs of length three or more collapse to
/// `0_n`; numbers use the shortest decimal that parses back to the same
/// `f64`, so `parse(print(v)) == v`.
pub fn print_hankel_shorthand(v: &HankelVector) -> String {
    let mut out = String::from("[");
    write_side(&mut out, &v.top);
    out.push('/');
    push_number(&mut out, v.center);
    out.push('/');
    write_side(&mut out, &v.right);
    out.push(']');
    out
}

fn push_number(out: &mut String, x: f64) {
    if x == 0.0 {
        out.push('0');
    } else {
        let _ = write!(out, "{x}");
    }
}

fn write_side(out: &mut String, side: &[f64]) {
    let mut first = true;
    let mut i = 0;
    while i < side.len() {
        if !first {
            out.push(',');
        }
        first = false;
        if side[i] == 0.0 {
            let run = side[i..].iter().take_while(|x| **x == 0.0).count();
            if run >= 3 {
                let _ = write!(out, "0_{run}");
                i += run;
                continue;
            }
        }
        push_number(out, side[i]);
        i += 1;
    }
}

/// Parses `["scale=" scale] "[" side "/" entry "/" side "]"`.
///
/// `side` is a comma-separated list of signed decimals and `0_n` runs; it may
/// be empty only for the `1×1` case `[/c/]`. `scale` is a decimal or
/// `<decimal>/sqrt(<k>)`.
pub fn parse_hankel_shorthand(text: &str) -> Result<HankelVector> {
    let mut p = Parser { src: text, pos: 0 };
    p.skip_ws();
    let scale = if p.eat_keyword("scale") {
        p.skip_ws();
        p.expect('=')?;
        p.skip_ws();
        let s = p.scale()?;
        p.skip_ws();
        Some(s)
    } else {
        None
    };
    p.expect('[')?;
    let top = p.side()?;
    p.expect('/')?;
    p.skip_ws();
    let center = p.number()?;
    p.skip_ws();
    p.expect('/')?;
    let right = p.side()?;
    p.expect(']')?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("trailing input after ']'"));
    }
    if top.len() != right.len() {
        return Err(Error::UnequalSides {
            top: top.len(),
            right: right.len(),
        });
    }
    let apply = |x: f64| match scale {
        Some(s) => x * s,
        None => x,
    };
    HankelVector::new(
        top.into_iter().map(apply).collect(),
        apply(center),
        right.into_iter().map(apply).collect(),
    )
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c as u8) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.src[self.pos..].starts_with(kw) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        self.pos - start
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        if matches!(self.peek(), Some(b'+' | b'-')) {
            self.pos += 1;
        }
        let int_digits = self.digits();
        let mut frac_digits = 0;
        if self.peek() == Some(b'.') {
            self.pos += 1;
            frac_digits = self.digits();
        }
        if int_digits + frac_digits == 0 {
            self.pos = start;
            return Err(self.error("expected a number"));
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                self.pos = mark;
                return Err(self.error("malformed exponent"));
            }
        }
        self.src[start..self.pos].parse::<f64>().map_err(|_| Error::Syntax {
            position: start,
            message: "malformed number".to_string(),
        })
    }

    fn unsigned(&mut self) -> Result<usize> {
        let start = self.pos;
        if self.digits() == 0 {
            return Err(self.error("expected an integer"));
        }
        self.src[start..self.pos].parse::<usize>().map_err(|_| Error::Syntax {
            position: start,
            message: "integer out of range".to_string(),
        })
    }

    fn scale(&mut self) -> Result<f64> {
        let numerator = self.number()?;
        self.skip_ws();
        if self.peek() != Some(b'/') {
            return Ok(numerator);
        }
        self.pos += 1;
        self.skip_ws();
        if !self.eat_keyword("sqrt") {
            return Err(self.error("expected 'sqrt' after '/' in scale"));
        }
        self.skip_ws();
        self.expect('(')?;
        self.skip_ws();
        let k_pos = self.pos;
        let k = self.unsigned()?;
        if k == 0 {
            return Err(Error::Syntax {
                position: k_pos,
                message: "sqrt argument must be positive".to_string(),
            });
        }
        self.skip_ws();
        self.expect(')')?;
        Ok(numerator / libm::sqrt(k as f64))
    }

    /// One entry, appended to `out` (a `0_n` run appends `n` zeros).
    fn item(&mut self, out: &mut Vec<f64>) -> Result<()> {
        let start = self.pos;
        let value = self.number()?;
        if self.peek() == Some(b'_') {
            if &self.src[start..self.pos] != "0" {
                self.pos = start;
                return Err(self.error("run-length token must be written 0_n"));
            }
            self.pos += 1;
            let n_pos = self.pos;
            let n = self.unsigned()?;
            if n == 0 {
                return Err(Error::Syntax {
                    position: n_pos,
                    message: "run length must be at least 1".to_string(),
                });
            }
            out.resize(out.len() + n, 0.0);
        } else {
            out.push(value);
        }
        Ok(())
    }

    fn side(&mut self) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        self.skip_ws();
        if matches!(self.peek(), Some(b'/' | b']')) {
            return Ok(out);
        }
        loop {
            self.item(&mut out)?;
            self.skip_ws();
            if self.peek() == Some(b',') {
                self.pos += 1;
                self.skip_ws();
            } else {
                return Ok(out);
            }
        }
    }
}
