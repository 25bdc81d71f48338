//! Recursive-descent parser for the polynomial grammar
//!
//! ```text
//! expr  := term (('+'|'-') term)*
//! term  := coeff? ('*'? var ('^' nat)?)*
//! coeff := nat
//! var   := [a-zA-Z][a-zA-Z0-9_]*
//! ```
//!
//! Whitespace is insignificant. A leading sign on the first term is also
//! accepted. Coefficients are reduced modulo `p` as they are read, so
//! arbitrarily long integer literals are fine; exponents must fit in `u64`.

use std::sync::Arc;

use super::{Monomial, PolyError, PolyRing, Polynomial};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ring: &'a Arc<PolyRing>,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn syntax(&self, msg: impl Into<String>) -> PolyError {
        PolyError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    /// Digits as a residue mod p, and whether any digit was read.
    fn coeff(&mut self) -> u32 {
        let f = self.ring.field();
        let p = f.characteristic();
        let mut acc = 0u64;
        while let Some(&c) = self.src.get(self.pos) {
            if !c.is_ascii_digit() {
                break;
            }
            acc = (acc * 10 + (c - b'0') as u64) % p;
            self.pos += 1;
        }
        acc as u32
    }

    fn exponent(&mut self) -> Result<u64, PolyError> {
        self.skip_ws();
        let start = self.pos;
        let mut acc = 0u64;
        while let Some(&c) = self.src.get(self.pos) {
            if !c.is_ascii_digit() {
                break;
            }
            acc = acc
                .checked_mul(10)
                .and_then(|a| a.checked_add((c - b'0') as u64))
                .ok_or(PolyError::ExponentTooLarge { pos: start })?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.syntax("expected exponent after '^'"));
        }
        Ok(acc)
    }

    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while let Some(&c) = self.src.get(self.pos) {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier")
    }

    fn term(&mut self) -> Result<(Monomial, u32), PolyError> {
        let n = self.ring.nvars();
        let mut exps = vec![0u64; n];
        let mut coeff = 1u32;
        let mut seen_anything = false;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            coeff = self.coeff();
            seen_anything = true;
        }
        loop {
            let star = match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    true
                }
                _ => false,
            };
            match self.peek() {
                Some(c) if c.is_ascii_alphabetic() => {
                    let start = self.pos;
                    let name = self.ident();
                    let i = self.ring.var_index(name).ok_or_else(|| PolyError::UnknownVariable {
                        name: name.to_string(),
                        pos: start,
                    })?;
                    let mut e = 1u64;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        e = self.exponent()?;
                    }
                    exps[i] = exps[i].checked_add(e).ok_or(PolyError::ExponentOverflow)?;
                    seen_anything = true;
                }
                _ if star => return Err(self.syntax("expected variable after '*'")),
                _ => break,
            }
        }
        if !seen_anything {
            return Err(self.syntax("expected a term"));
        }
        let m = Monomial::try_new(&exps).ok_or(PolyError::ExponentOverflow)?;
        Ok((m, coeff))
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let f = self.ring.field();
        let mut terms: Vec<(Monomial, u64)> = Vec::new();
        let mut negate = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        loop {
            let (m, c) = self.term()?;
            let c = if negate { f.neg(c) } else { c };
            terms.push((m, c as u64));
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    negate = false;
                }
                Some(b'-') => {
                    self.pos += 1;
                    negate = true;
                }
                None => break,
                Some(c) => return Err(self.syntax(format!("unexpected character '{}'", c as char))),
            }
        }
        Ok(Polynomial::from_terms(self.ring, terms))
    }
}

/// Parse `text` into a polynomial of `ring`, reducing integer coefficients
/// modulo the characteristic.
pub fn parse_polynomial(text: &str, ring: &Arc<PolyRing>) -> Result<Polynomial, PolyError> {
    if !text.is_ascii() {
        let pos = text.char_indices().find(|(_, c)| !c.is_ascii()).map(|(i, _)| i).unwrap_or(0);
        return Err(PolyError::Syntax {
            pos,
            msg: "non-ASCII input".into(),
        });
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        ring,
    };
    p.expr()
}
