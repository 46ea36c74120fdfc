use num_traits::{One, Signed};

use super::Expr;

// Binding strength: sums < products < unary minus < powers < atoms.
const ADD: u8 = 1;
const MUL: u8 = 2;
const UNARY: u8 = 3;
const ATOM: u8 = 5;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => ADD,
        Expr::Mul(..) | Expr::Div(..) => MUL,
        Expr::Neg(_) => UNARY,
        Expr::Pow(..) => 4,
        _ => ATOM,
    }
}

/// Canonical text form; `parse(render(e)) == e` for parsed expressions.
pub fn render(e: &Expr) -> String {
    let mut out = String::new();
    write(e, &mut out);
    out
}

fn wrapped(e: &Expr, min: u8, out: &mut String) {
    if level(e) < min {
        out.push('(');
        write(e, out);
        out.push(')');
    } else {
        write(e, out);
    }
}

fn write(e: &Expr, out: &mut String) {
    match e {
        Expr::Num(q) => {
            let body = if q.denom().is_one() {
                q.numer().abs().to_string()
            } else {
                format!("{}/{}", q.numer().abs(), q.denom())
            };
            if q.is_negative() {
                out.push_str(&format!("(-{body})"));
            } else {
                out.push_str(&body);
            }
        }
        Expr::Var(v) => out.push_str(v.name()),
        Expr::Neg(a) => {
            out.push('-');
            wrapped(a, UNARY, out);
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            wrapped(a, ADD, out);
            out.push_str(if matches!(e, Expr::Add(..)) {
                " + "
            } else {
                " - "
            });
            wrapped(b, MUL, out);
        }
        Expr::Mul(a, b) => {
            wrapped(a, MUL, out);
            out.push('*');
            wrapped(b, UNARY, out);
        }
        Expr::Div(a, b) => {
            wrapped(a, MUL, out);
            out.push('/');
            // `3/4` would lex as a single literal
            if matches!(**b, Expr::Num(_)) {
                out.push('(');
                write(b, out);
                out.push(')');
            } else {
                wrapped(b, UNARY, out);
            }
        }
        Expr::Pow(a, b) => {
            match &**a {
                Expr::Num(q) if !q.denom().is_one() => {
                    out.push('(');
                    write(a, out);
                    out.push(')');
                }
                _ => wrapped(a, ATOM, out),
            }
            out.push('^');
            wrapped(b, UNARY, out);
        }
        Expr::Call(f, args) => {
            out.push_str(f.name());
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write(a, out);
            }
            out.push(')');
        }
        Expr::Sum {
            index,
            lo,
            hi,
            body,
        } => {
            out.push_str("sum(");
            out.push_str(index.name());
            for part in [lo, hi, body] {
                out.push_str(", ");
                write(part, out);
            }
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::dsl::{parse, parse_poly};

    #[test]
    fn renders_minimal_parentheses() {
        for (src, want) in [
            ("sign(k)*binom(n,k)/(k+1)", "sign(k)*binom(n, k)/(k + 1)"),
            ("a_recip(j)", "a_recip(j)"),
            ("(1-2)-(3-4)", "1 - 2 - (3 - 4)"),
            ("-(k*n)", "-(k*n)"),
            ("(-k)^2", "(-k)^2"),
            ("3/(4)", "3/(4)"),
            ("2*(3/4)", "2*3/4"),
        ] {
            let e = parse(src).unwrap();
            assert_eq!(e.to_string(), want);
            assert_eq!(parse(&e.to_string()).unwrap(), e);
        }
        let p = parse_poly("sum(k,0,n,binom(n,k)*t^k)").unwrap();
        assert_eq!(p.to_string(), "sum(k, 0, n, binom(n, k)*t^k)");
    }
}
