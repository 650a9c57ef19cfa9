//! Arithmetic on decimal numbers and `pi`, for angles like `2pi/3` and
//! ratios like `11/12`.
//!
//! ```text
//! expr   = term (("+" | "-") term)*
//! term   = factor (("*" | "/")? factor)*     juxtaposition multiplies
//! factor = ("+" | "-") factor | number | "pi" | "(" expr ")"
//! ```

use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub input: String,
    pub at: usize,
    pub what: &'static str,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at offset {} in '{}'", self.what, self.at, self.input)
    }
}

impl std::error::Error for ParseError {}

struct Parser<'a> {
    s: &'a [u8],
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, what: &'static str) -> ParseError {
        ParseError {
            input: self.src.to_string(),
            at: self.pos,
            what,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<f64, ParseError> {
        let mut v = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            v = if c == b'+' { v + t } else { v - t };
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<f64, ParseError> {
        let mut v = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    v *= self.factor()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    v /= self.factor()?;
                }
                Some(b'p' | b'(') | Some(b'0'..=b'9' | b'.') => v *= self.factor()?,
                _ => return Ok(v),
            }
        }
    }

    fn factor(&mut self) -> Result<f64, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.factor()
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(b'p') => {
                if self.s[self.pos..].starts_with(b"pi") {
                    self.pos += 2;
                    Ok(PI)
                } else {
                    Err(self.err("unknown name"))
                }
            }
            Some(b'0'..=b'9' | b'.') => self.number(),
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end")),
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let start = self.pos;
        let s = self.s;
        let digits = |p: &mut usize| {
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
        };
        digits(&mut self.pos);
        if self.pos < s.len() && s[self.pos] == b'.' {
            self.pos += 1;
            digits(&mut self.pos);
        }
        // exponent only when digits follow, so `2e` is not swallowed
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let mut p = self.pos + 1;
            if p < s.len() && (s[p] == b'+' || s[p] == b'-') {
                p += 1;
            }
            if p < s.len() && s[p].is_ascii_digit() {
                digits(&mut p);
                self.pos = p;
            }
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| ParseError {
                input: self.src.to_string(),
                at: start,
                what: "malformed number",
            })
    }
}

/// Value of one expression.
pub fn eval(src: &str) -> Result<f64, ParseError> {
    let mut p = Parser {
        s: src.as_bytes(),
        src,
        pos: 0,
    };
    let v = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

/// Comma-separated list of exactly `N` expressions.
pub fn eval_list<const N: usize>(src: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = src.split(',').collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated values, got {}", parts.len()));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = eval(p).map_err(|e| e.to_string())?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_fractions() {
        assert_eq!(eval("pi").unwrap(), PI);
        assert_eq!(eval("2pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(eval("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(eval("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(eval(" (pi + 1) / 2 ").unwrap(), (PI + 1.0) / 2.0);
        assert_eq!(eval("11/12").unwrap(), 11.0 / 12.0);
        assert_eq!(eval("2(1+1)").unwrap(), 4.0);
    }

    #[test]
    fn decimals_and_exponents() {
        assert_eq!(eval("0.5").unwrap(), 0.5);
        assert_eq!(eval("1e-3").unwrap(), 1e-3);
        assert_eq!(eval("2.5E+2").unwrap(), 250.0);
        assert_eq!(eval(".25").unwrap(), 0.25);
        assert_eq!(eval("0.9423").unwrap(), 0.9423);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "pie", "2pi/", "(1", "1)", "abc", "1,2", "--"] {
            assert!(eval(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn lists() {
        let v = eval_list::<3>("pi/4,3pi/4,5pi/6").unwrap();
        assert_eq!(v, [PI / 4.0, 3.0 * PI / 4.0, 5.0 * PI / 6.0]);
        assert!(eval_list::<3>("1,2").is_err());
        assert!(eval_list::<2>("1,x").is_err());
    }
}
