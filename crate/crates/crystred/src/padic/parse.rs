//! Scalar syntax: sums and products of integers, `pi`, `p`, powers and parentheses,
//! e.g. `pi^3 * (1 + 2*pi)`. A trailing `O(pi^k)` or `O(p^k)` caps the precision.

use num_bigint::BigInt;

use super::{ExtScalar, PadicError, Prime};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(BigInt),
    Pi,
    P,
    BigO,
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<Token>, PadicError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        match ch {
            c if c.is_whitespace() => i += 1,
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                out.push(Token::Int(digits.parse().unwrap()));
            }
            'O' => {
                out.push(Token::BigO);
                i += 1;
            }
            'p' => {
                if chars.get(i + 1) == Some(&'i') {
                    out.push(Token::Pi);
                    i += 2;
                } else {
                    out.push(Token::P);
                    i += 1;
                }
            }
            '+' => {
                out.push(Token::Plus);
                i += 1
            }
            '-' => {
                out.push(Token::Minus);
                i += 1
            }
            '*' => {
                out.push(Token::Star);
                i += 1
            }
            '^' => {
                out.push(Token::Caret);
                i += 1
            }
            '(' => {
                out.push(Token::Open);
                i += 1
            }
            ')' => {
                out.push(Token::Close);
                i += 1
            }
            other => return Err(PadicError::Parse(format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    prime: Prime,
    tokens: &'a [Token],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, tok: &Token) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ExtScalar, PadicError> {
        let mut acc = if self.eat(&Token::Minus) {
            -self.term()?
        } else {
            self.term()?
        };
        loop {
            if self.eat(&Token::Plus) {
                acc = acc + self.term()?;
            } else if self.eat(&Token::Minus) {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ExtScalar, PadicError> {
        let mut acc = self.power()?;
        while self.eat(&Token::Star) {
            acc = acc * self.power()?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<ExtScalar, PadicError> {
        let base = self.atom()?;
        if !self.eat(&Token::Caret) {
            return Ok(base);
        }
        let negative = self.eat(&Token::Minus);
        let Some(Token::Int(e)) = self.peek().cloned() else {
            return Err(PadicError::Parse("expected integer exponent".into()));
        };
        self.pos += 1;
        let e: i64 = e
            .try_into()
            .map_err(|_| PadicError::Parse("exponent too large".into()))?;
        base.pow(if negative { -e } else { e })
    }

    fn atom(&mut self) -> Result<ExtScalar, PadicError> {
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| PadicError::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        match tok {
            Token::Int(n) => Ok(ExtScalar::from_bigint(self.prime, &n)),
            Token::Pi => Ok(ExtScalar::pi(self.prime)),
            Token::P => Ok(ExtScalar::pi_pow(self.prime, 2)),
            Token::BigO => {
                if !self.eat(&Token::Open) {
                    return Err(PadicError::Parse("expected '(' after O".into()));
                }
                let bound = self.expr()?;
                if !self.eat(&Token::Close) {
                    return Err(PadicError::Parse("missing ')'".into()));
                }
                let abs = bound
                    .vpi()
                    .ok_or_else(|| PadicError::Parse("O(0) is meaningless".into()))?;
                Ok(ExtScalar::approx_zero(self.prime, abs))
            }
            Token::Open => {
                let inner = self.expr()?;
                if !self.eat(&Token::Close) {
                    return Err(PadicError::Parse("missing ')'".into()));
                }
                Ok(inner)
            }
            other => Err(PadicError::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

pub fn parse_scalar(prime: Prime, text: &str) -> Result<ExtScalar, PadicError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        prime,
        tokens: &tokens,
        pos: 0,
    };
    let value = parser.expr()?;
    if parser.pos != tokens.len() {
        return Err(PadicError::Parse(format!("trailing input at token {}", parser.pos)));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alias_p_is_pi_squared() {
        let prime = Prime::new(5).unwrap();
        assert_eq!(parse_scalar(prime, "p").unwrap(), parse_scalar(prime, "pi^2").unwrap());
        assert_eq!(parse_scalar(prime, "p").unwrap(), ExtScalar::from_i64(prime, 5));
    }

    #[test]
    fn worked_slope_value() {
        let prime = Prime::new(5).unwrap();
        let ap = parse_scalar(prime, "pi^3*(1)").unwrap();
        assert_eq!(ap, ExtScalar::from_i64(prime, 5) * ExtScalar::pi(prime));
    }

    #[test]
    fn digit_polynomial() {
        let prime = Prime::new(7).unwrap();
        let x = parse_scalar(prime, "pi^3 * (2 + 1*pi + 3*pi^2)").unwrap();
        assert_eq!(x.vpi(), Some(3));
        assert_eq!(&x.unit_digits()[..3], &[2, 1, 3]);
    }

    #[test]
    fn rejects_garbage() {
        let prime = Prime::new(5).unwrap();
        assert!(parse_scalar(prime, "pi^").is_err());
        assert!(parse_scalar(prime, "(1 + pi").is_err());
        assert!(parse_scalar(prime, "x").is_err());
        assert!(parse_scalar(prime, "1 2").is_err());
    }

    #[test]
    fn big_o_round_trip() {
        let prime = Prime::new(5).unwrap();
        let x = parse_scalar(prime, "pi^3*(1 + 2*pi) + O(pi^7)").unwrap();
        assert_eq!(x.abs_prec(), 7);
        assert_eq!(parse_scalar(prime, &x.to_string()).unwrap(), x);
        let z = parse_scalar(prime, "O(p^4)").unwrap();
        assert!(z.is_zero() && !z.is_exact_zero());
        assert_eq!(parse_scalar(prime, &z.to_string()).unwrap(), z);
    }

    #[test]
    fn negative_exponent() {
        let prime = Prime::new(5).unwrap();
        assert_eq!(parse_scalar(prime, "pi^-2").unwrap().vpi(), Some(-2));
    }
}
