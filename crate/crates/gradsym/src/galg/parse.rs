//! Text format: `coef * g1^k1 g2 ...` terms joined by `+`, with `p/q` rationals,
//! `i` for the imaginary unit and `hbar` for the formal parameter.

use super::coeff::{Coeff, Rat};
use super::poly::{Algebra, Poly};
use super::GalgError;
use num_bigint::BigInt;
use std::sync::Arc;

pub fn parse_poly<C: Coeff>(alg: &Arc<Algebra>, text: &str) -> Result<Poly<C>, GalgError> {
    let toks = lex(text)?;
    let mut p = Parser { alg, toks, pos: 0, _c: std::marker::PhantomData };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '†'
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, GalgError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut k = 0;
    while k < chars.len() {
        let (at, c) = chars[k];
        let tok = match c {
            ' ' | '\t' | '\n' | '\r' => {
                k += 1;
                continue;
            }
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                let start = k;
                while k < chars.len() && chars[k].1.is_ascii_digit() {
                    k += 1;
                }
                let s: String = chars[start..k].iter().map(|&(_, c)| c).collect();
                out.push((at, Tok::Num(s.parse().expect("digits"))));
                continue;
            }
            c if ident_char(c) => {
                let start = k;
                while k < chars.len() && ident_char(chars[k].1) {
                    k += 1;
                }
                let s: String = chars[start..k].iter().map(|&(_, c)| c).collect();
                out.push((at, Tok::Ident(s)));
                continue;
            }
            other => return Err(GalgError::Parse { pos: at, msg: format!("unexpected character {:?}", other) }),
        };
        out.push((at, tok));
        k += 1;
    }
    Ok(out)
}

struct Parser<'a, C: Coeff> {
    alg: &'a Arc<Algebra>,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    _c: std::marker::PhantomData<C>,
}

impl<'a, C: Coeff> Parser<'a, C> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }
    fn err(&self, msg: &str) -> GalgError {
        let pos = self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(usize::MAX);
        GalgError::Parse { pos, msg: msg.to_string() }
    }

    fn expr(&mut self) -> Result<Poly<C>, GalgError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen))
    }

    fn term(&mut self) -> Result<Poly<C>, GalgError> {
        let mut acc = self.factor()?;
        loop {
            if self.peek() == Some(&Tok::Star) {
                self.pos += 1;
                let f = self.factor()?;
                acc = &acc * &f;
            } else if self.starts_factor() {
                let f = self.factor()?;
                acc = &acc * &f;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Poly<C>, GalgError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            let f = self.factor()?;
            return Ok(-&f);
        }
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.toks.get(self.pos).map(|(_, t)| t.clone()) {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n.try_into().map_err(|_| self.err("exponent too large"))?;
                    return Ok(base.pow(e));
                }
                _ => return Err(self.err("expected exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly<C>, GalgError> {
        let Some((_, tok)) = self.toks.get(self.pos).cloned() else {
            return Err(self.err("unexpected end of input"));
        };
        self.pos += 1;
        match tok {
            Tok::Num(n) => {
                let mut r = Rat::from_integer(n);
                if self.peek() == Some(&Tok::Slash) {
                    self.pos += 1;
                    match self.toks.get(self.pos).map(|(_, t)| t.clone()) {
                        Some(Tok::Num(d)) if d != BigInt::from(0) => {
                            self.pos += 1;
                            r /= Rat::from_integer(d);
                        }
                        _ => return Err(self.err("expected nonzero denominator")),
                    }
                }
                Ok(Poly::constant(self.alg, C::from_rat(r)))
            }
            Tok::Ident(s) if s == "i" => match C::imag_unit() {
                Some(c) => Ok(Poly::constant(self.alg, c)),
                None => Err(self.err("imaginary unit not available in this coefficient ring")),
            },
            Tok::Ident(s) if s == "hbar" => match C::hbar() {
                Some(c) => Ok(Poly::constant(self.alg, c)),
                None => Err(self.err("hbar not available in this coefficient ring")),
            },
            Tok::Ident(s) => {
                self.pos -= 1;
                let g = self.alg.index_of(&s).map_err(|_| self.err(&format!("unknown generator {}", s)))?;
                self.pos += 1;
                Ok(Poly::gen(self.alg, g))
            }
            Tok::LParen => {
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            _ => {
                self.pos -= 1;
                Err(self.err("expected a factor"))
            }
        }
    }
}
