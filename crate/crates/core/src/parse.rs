//! Polynomial expressions: rational literals, identifiers, `+ - * ^`, parentheses.
//! Multiplication must be explicit.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::{Polynomial, Rational};

pub fn parse_polynomial(text: &str, vars: &[String]) -> Result<Polynomial> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        vars,
    };
    let f = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while self.eat(b'*') {
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        if self.eat(b'-') {
            Ok(-&self.unary()?)
        } else if self.eat(b'+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.eat(b'^') {
            self.skip_ws();
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| self.error("exponent too large"))?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected non-negative integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let mut q = Rational::from_integer(n);
                if self.eat(b'/') {
                    self.skip_ws();
                    let d = self.integer()?;
                    if d.is_zero() {
                        return Err(self.error("zero denominator"));
                    }
                    q /= Rational::from_integer(d);
                }
                Ok(Polynomial::constant(self.nvars(), q))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match self.vars.iter().position(|v| v == name) {
                    Some(i) => Ok(Polynomial::var(self.nvars(), i)),
                    None => Err(Error::UnknownVariable(name.to_string())),
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, Monomial};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_curve() {
        let f = parse_polynomial("x^2 + y^5", &names(&["x", "y"])).unwrap();
        assert_eq!(f.terms().len(), 2);
        assert_eq!(f.coefficient(&Monomial(vec![2, 0])), rat(1));
        assert_eq!(f.coefficient(&Monomial(vec![0, 5])), rat(1));
    }

    #[test]
    fn zero_and_identity() {
        assert!(parse_polynomial("0", &names(&["x"])).unwrap().is_zero());
        let v = names(&["x", "y"]);
        let f = parse_polynomial("(x+y)^2 - x^2 - 2*x*y", &v).unwrap();
        assert_eq!(f, parse_polynomial("y^2", &v).unwrap());
    }

    #[test]
    fn rationals_and_unary_minus() {
        let v = names(&["x"]);
        let f = parse_polynomial("-x^2 + 3/6", &v).unwrap();
        assert_eq!(f.constant_term(), crate::poly::ratio(1, 2));
        assert_eq!(f.coefficient(&Monomial(vec![2])), rat(-1));
    }

    #[test]
    fn errors() {
        let v = names(&["x", "y"]);
        assert!(matches!(
            parse_polynomial("x y", &v),
            Err(Error::Syntax { pos: 2, .. })
        ));
        assert_eq!(
            parse_polynomial("x + z", &v),
            Err(Error::UnknownVariable("z".into()))
        );
        assert!(matches!(
            parse_polynomial("x^", &v),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_polynomial("(x", &v),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn print_parse_roundtrip() {
        let v = names(&["x", "y", "z"]);
        for s in ["x^2 - 1/3*y*z + 7", "-x", "2*x^3*y - y^2 + z", "0"] {
            let f = parse_polynomial(s, &v).unwrap();
            let g = parse_polynomial(&f.to_string_with(&v), &v).unwrap();
            assert_eq!(f, g);
        }
    }
}
