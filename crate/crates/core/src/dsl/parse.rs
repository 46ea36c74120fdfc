use num_bigint::BigInt;

use super::{Expr, Func, Var};
use crate::error::{Error, Result};
use crate::exact::Rational;

/// Parses a scalar expression (no `t`).
pub fn parse(text: &str) -> Result<Expr> {
    Parser::new(text, false).parse_all()
}

/// Parses an expression that may contain the indeterminate `t`.
pub fn parse_poly(text: &str) -> Result<Expr> {
    Parser::new(text, true).parse_all()
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Sym(char),
    End,
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    allow_t: bool,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let skip_ws = |mut i: usize| {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        i
    };
    let read_int = |mut i: usize| {
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        (start, i)
    };
    loop {
        i = skip_ws(i);
        if i >= bytes.len() {
            out.push((i, Tok::End));
            return Ok(out);
        }
        let c = bytes[i];
        if c.is_ascii_digit() {
            let (s, e) = read_int(i);
            let p: BigInt = src[s..e].parse().expect("digits");
            // INT "/" INT is a single rational literal
            let j = skip_ws(e);
            if j < bytes.len() && bytes[j] == b'/' {
                let k = skip_ws(j + 1);
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    let (s2, e2) = read_int(k);
                    let q: BigInt = src[s2..e2].parse().expect("digits");
                    if q == BigInt::from(0) {
                        return Err(Error::DivisionByZero(format!(
                            "rational literal with zero denominator at byte {s}"
                        )));
                    }
                    out.push((s, Tok::Num(Rational::new(p, q))));
                    i = e2;
                    continue;
                }
            }
            out.push((s, Tok::Num(Rational::from_integer(p))));
            i = e;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let s = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((s, Tok::Ident(src[s..i].to_string())));
        } else if b"+-*/^(),".contains(&c) {
            out.push((i, Tok::Sym(c as char)));
            i += 1;
        } else {
            return Err(Error::Syntax {
                offset: i,
                expected: vec!["number".into(), "identifier".into(), "operator".into()],
            });
        }
    }
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, allow_t: bool) -> Self {
        Parser {
            src,
            toks: Vec::new(),
            pos: 0,
            allow_t,
        }
    }

    fn parse_all(mut self) -> Result<Expr> {
        self.toks = lex(self.src)?;
        let e = self.expr()?;
        match self.peek() {
            Tok::End => Ok(e),
            _ => Err(self.expected(&["operator", "end of input"])),
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expected(&self, what: &[&str]) -> Error {
        Error::Syntax {
            offset: self.offset(),
            expected: what.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.expected(&[&format!("`{c}`")]))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = lhs.add(self.term()?);
            } else if self.eat('-') {
                lhs = lhs.sub(self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = lhs.mul(self.unary()?);
            } else if self.eat('/') {
                lhs = lhs.div(self.unary()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(self.unary()?.neg())
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            Ok(base.pow(self.unary()?))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let start = self.offset();
        match self.bump() {
            Tok::Num(q) => Ok(Expr::Num(q)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::Sym('(') {
                    self.bump();
                    return self.call(&name, start);
                }
                match Var::from_name(&name) {
                    Some(Var::T) if !self.allow_t => Err(Error::Syntax {
                        offset: start,
                        expected: vec![
                            "scalar variable (t is only allowed in polynomial sides)".into()
                        ],
                    }),
                    Some(v) => Ok(Expr::Var(v)),
                    None => Err(Error::Syntax {
                        offset: start,
                        expected: vec!["variable n|k|j|r|s|u|v".into(), "function call".into()],
                    }),
                }
            }
            _ => Err(Error::Syntax {
                offset: start,
                expected: vec![
                    "number".into(),
                    "variable".into(),
                    "`(`".into(),
                    "function call".into(),
                ],
            }),
        }
    }

    fn args(&mut self) -> Result<Vec<Expr>> {
        let mut args = vec![self.expr()?];
        while self.eat(',') {
            args.push(self.expr()?);
        }
        if !self.eat(')') {
            return Err(self.expected(&["`,`", "`)`"]));
        }
        Ok(args)
    }

    fn call(&mut self, name: &str, start: usize) -> Result<Expr> {
        if name == "sum" {
            let idx_at = self.offset();
            let index = match self.bump() {
                Tok::Ident(v) => match Var::from_name(&v) {
                    Some(var) if var != Var::T => var,
                    _ => {
                        return Err(Error::Syntax {
                            offset: idx_at,
                            expected: vec!["summation index variable".into()],
                        })
                    }
                },
                _ => {
                    return Err(Error::Syntax {
                        offset: idx_at,
                        expected: vec!["summation index variable".into()],
                    })
                }
            };
            self.expect(',')?;
            let rest = self.args()?;
            if rest.len() != 3 {
                return Err(Error::Arity {
                    name: "sum".into(),
                    expected: 4,
                    found: rest.len() + 1,
                });
            }
            let mut it = rest.into_iter();
            let (lo, hi, body) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
            return Ok(Expr::sum(index, lo, hi, body));
        }
        let func = Func::from_name(name).ok_or_else(|| Error::Syntax {
            offset: start,
            expected: vec!["known function name".into()],
        })?;
        let args = self.args()?;
        if args.len() != func.arity() {
            return Err(Error::Arity {
                name: name.into(),
                expected: func.arity(),
                found: args.len(),
            });
        }
        Ok(Expr::Call(func, args))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::Var::*;
    use crate::exact::{int, rat};

    fn v(x: Var) -> Expr {
        Expr::Var(x)
    }

    #[test]
    fn structural_examples() {
        let e = parse("sign(k) * binom(n,k) / (k+1)").unwrap();
        let want = Expr::call(Func::Sign, vec![v(K)])
            .mul(Expr::call(Func::Binom, vec![v(N), v(K)]))
            .div(v(K).add(Expr::int(1)));
        assert_eq!(e, want);

        let e = parse("sum(j, 0, k, binom(k,j)/(j+1))").unwrap();
        assert!(matches!(e, Expr::Sum { index: J, .. }));

        let e = parse("H(k+r-s)").unwrap();
        assert_eq!(e, Expr::call(Func::H, vec![v(K).add(v(R)).sub(v(S))]));
    }

    #[test]
    fn rational_literals_and_precedence() {
        assert_eq!(parse("3/4").unwrap(), Expr::Num(rat(3, 4)));
        assert_eq!(parse("k/2").unwrap(), v(K).div(Expr::int(2)));
        assert_eq!(
            parse("2^3^2").unwrap(),
            Expr::int(2).pow(Expr::int(3).pow(Expr::int(2)))
        );
        assert_eq!(parse("-2^2").unwrap(), Expr::int(2).pow(Expr::int(2)).neg());
        assert_eq!(
            parse("1-2-3").unwrap(),
            Expr::int(1).sub(Expr::int(2)).sub(Expr::int(3))
        );
        assert_eq!(parse(" 7 ").unwrap(), Expr::Num(int(7)));
    }

    #[test]
    fn errors_carry_offsets() {
        match parse("1 + ") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        match parse("binom(n)") {
            Err(Error::Arity {
                expected: 2,
                found: 1,
                ..
            }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse("x + 1"),
            Err(Error::Syntax { offset: 0, .. })
        ));
        assert!(matches!(parse("t^2"), Err(Error::Syntax { .. })));
        assert!(parse_poly("(1+t)^n").is_ok());
        assert!(matches!(parse("foo(1)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("(1"), Err(Error::Syntax { .. })));
    }
}
