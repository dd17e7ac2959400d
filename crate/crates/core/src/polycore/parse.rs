//! Recursive-descent parser for the polynomial text format.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{MultiIndex, Polynomial};
use crate::error::{Error, Result};

pub(crate) fn parse(text: &str, n: usize) -> Result<Polynomial> {
    let mut parser = Parser { chars: text.chars().collect(), pos: 0, n };
    let p = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.chars.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(p)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    n: usize,
}

impl Parser {
    fn error(&self, msg: &str) -> Error {
        let text: String = self.chars.iter().collect();
        Error::Parse(format!("{msg} at column {} in {text:?}", self.pos + 1))
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial> {
        self.skip_ws();
        let mut negate = false;
        if let Some(c @ ('+' | '-')) = self.peek() {
            negate = c == '-';
            self.pos += 1;
        }
        let first = self.term()?;
        let mut acc = if negate { -first } else { first };
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some('-') => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.power()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                Some('/') => {
                    self.pos += 1;
                    let divisor = self.power()?;
                    let c = divisor.coefficient(&MultiIndex::zero(self.n));
                    if divisor.degree() > 0 || c.is_zero() {
                        return Err(self.error("can only divide by a nonzero constant"));
                    }
                    acc = acc.scale(&(BigRational::one() / c));
                }
                Some(c) if c.is_ascii_alphanumeric() || c == '(' || c == '.' => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| self.error("exponent too large"))?;
            return Ok((0..e).fold(Polynomial::one(self.n), |acc, _| &acc * &base));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let c = self.number()?;
                Ok(Polynomial::constant(self.n, c))
            }
            Some(c) if c.is_ascii_alphabetic() => self.variable(),
            _ => Err(self.error("expected a number, variable or '('")),
        }
    }

    fn integer(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.error("integer out of range"))
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn number(&mut self) -> Result<BigRational> {
        let int_part = self.digits();
        let mut value = if int_part.is_empty() {
            BigRational::zero()
        } else {
            BigRational::from_integer(int_part.parse::<BigInt>().unwrap())
        };
        if self.peek() == Some('.') {
            self.pos += 1;
            let frac = self.digits();
            if int_part.is_empty() && frac.is_empty() {
                return Err(self.error("malformed decimal"));
            }
            if !frac.is_empty() {
                let num: BigInt = frac.parse().unwrap();
                let den = num_traits::pow(BigInt::from(10), frac.len());
                value += BigRational::new(num, den);
            }
        }
        Ok(value)
    }

    fn variable(&mut self) -> Result<Polynomial> {
        let start = self.pos;
        let c = self.peek().unwrap();
        self.pos += 1;
        let index = match c {
            'x' if self.peek().is_some_and(|d| d.is_ascii_digit()) => {
                let k = self.integer()? as usize;
                if k == 0 || k > self.n {
                    self.pos = start;
                    return Err(self.error(&format!("variable x{k} outside x1..x{}", self.n)));
                }
                k - 1
            }
            'x' => 0,
            'y' => 1,
            'z' => 2,
            _ => {
                self.pos = start;
                return Err(self.error("unknown variable"));
            }
        };
        if index >= self.n {
            self.pos = start;
            return Err(self.error(&format!("alias '{c}' needs at least {} variables", index + 1)));
        }
        Ok(Polynomial::term(BigRational::one(), MultiIndex::unit(self.n, index, 1)))
    }
}
