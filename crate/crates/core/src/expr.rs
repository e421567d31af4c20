//! A small arithmetic expression language for config-file functions.
//!
//! Grammar: `+ - * / ^`, parentheses, numbers, the constants `pi`, `e`,
//! `inf`, variables supplied by the caller, and the functions
//! `pow exp ln log cos sin abs sqrt min max indicator`.
//! `indicator(a, b)` is `1` on `a < v ≤ b` for the first variable `v`;
//! `indicator(v, a, b)` names the variable explicitly.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Pow,
    Exp,
    Ln,
    Cos,
    Sin,
    Abs,
    Sqrt,
    Min,
    Max,
    Indicator,
}

impl Func {
    fn lookup(name: &str) -> Option<(Func, &'static [usize])> {
        Some(match name {
            "pow" => (Func::Pow, &[2]),
            "exp" => (Func::Exp, &[1]),
            "ln" | "log" => (Func::Ln, &[1]),
            "cos" => (Func::Cos, &[1]),
            "sin" => (Func::Sin, &[1]),
            "abs" => (Func::Abs, &[1]),
            "sqrt" => (Func::Sqrt, &[1]),
            "min" => (Func::Min, &[2]),
            "max" => (Func::Max, &[2]),
            "indicator" => (Func::Indicator, &[2, 3]),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

impl Node {
    fn eval(&self, vars: &[f64]) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::Var(i) => vars[*i],
            Node::Neg(a) => -a.eval(vars),
            Node::Bin(op, a, b) => {
                let (a, b) = (a.eval(vars), b.eval(vars));
                match op {
                    Op::Add => a + b,
                    Op::Sub => a - b,
                    Op::Mul => a * b,
                    Op::Div => a / b,
                    Op::Pow => a.powf(b),
                }
            }
            Node::Call(f, args) => {
                let x = |i: usize| args[i].eval(vars);
                match f {
                    Func::Pow => x(0).powf(x(1)),
                    Func::Exp => x(0).exp(),
                    Func::Ln => x(0).ln(),
                    Func::Cos => x(0).cos(),
                    Func::Sin => x(0).sin(),
                    Func::Abs => x(0).abs(),
                    Func::Sqrt => x(0).sqrt(),
                    Func::Min => x(0).min(x(1)),
                    Func::Max => x(0).max(x(1)),
                    Func::Indicator => {
                        let (v, a, b) = if args.len() == 2 { (vars[0], x(0), x(1)) } else { (x(0), x(1), x(2)) };
                        if v > a && v <= b {
                            1.0
                        } else {
                            0.0
                        }
                    }
                }
            }
        }
    }

    fn constant(&self) -> Option<f64> {
        match self {
            Node::Num(v) => Some(*v),
            Node::Var(_) => None,
            Node::Neg(a) => a.constant().map(|v| -v),
            _ => {
                if self.mentions_var() {
                    None
                } else {
                    Some(self.eval(&[]))
                }
            }
        }
    }

    fn mentions_var(&self) -> bool {
        match self {
            Node::Num(_) => false,
            Node::Var(_) => true,
            Node::Neg(a) => a.mentions_var(),
            Node::Bin(_, a, b) => a.mentions_var() || b.mentions_var(),
            Node::Call(_, args) => args.iter().any(Node::mentions_var),
        }
    }

    fn breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            Node::Num(_) | Node::Var(_) => {}
            Node::Neg(a) => a.breakpoints(out),
            Node::Bin(_, a, b) => {
                a.breakpoints(out);
                b.breakpoints(out);
            }
            Node::Call(f, args) => {
                if *f == Func::Indicator {
                    let bounds = if args.len() == 2 {
                        &args[..]
                    } else if args[0] == Node::Var(0) {
                        &args[1..]
                    } else {
                        &args[..0]
                    };
                    out.extend(bounds.iter().filter_map(Node::constant).filter(|v| v.is_finite()));
                }
                for a in args {
                    a.breakpoints(out);
                }
            }
        }
    }
}

/// A parsed expression over a fixed list of variable names.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    source: String,
    nvars: usize,
}

impl Expr {
    pub fn parse(source: &str, vars: &[&str]) -> Result<Expr> {
        let tokens = lex(source)?;
        let mut p = Parser { tokens, pos: 0, vars, src_len: source.len() };
        let root = p.expr()?;
        if let Some(t) = p.tokens.get(p.pos) {
            return Err(Error::Expression { offset: t.offset, message: format!("unexpected '{}'", t.text()) });
        }
        Ok(Expr { root, source: source.to_string(), nvars: vars.len() })
    }

    pub fn eval(&self, vars: &[f64]) -> f64 {
        debug_assert!(vars.len() >= self.nvars);
        self.root.eval(vars)
    }

    /// The value if the expression does not depend on any variable.
    pub fn constant(&self) -> Option<f64> {
        self.root.constant()
    }

    /// Finite interval endpoints of `indicator` calls on the first variable.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.root.breakpoints(&mut out);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

impl Token {
    fn text(&self) -> String {
        match &self.tok {
            Tok::Num(v) => v.to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::Sym(c) => c.to_string(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::Expression { offset: start, message: format!("bad number '{text}'") })?;
            out.push(Token { tok: Tok::Num(v), offset: start });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(src[start..i].to_string()), offset: start });
        } else if "+-*/^(),".contains(c) {
            out.push(Token { tok: Tok::Sym(c), offset: i });
            i += 1;
        } else {
            return Err(Error::Expression { offset: i, message: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [&'a str],
    src_len: usize,
}

impl Parser<'_> {
    fn peek_sym(&self, c: char) -> bool {
        matches!(self.tokens.get(self.pos), Some(Token { tok: Tok::Sym(s), .. }) if *s == c)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.src_len, |t| t.offset)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek_sym(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Expression { offset: self.offset(), message: format!("expected '{c}'") })
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.peek_sym('+') {
                Op::Add
            } else if self.peek_sym('-') {
                Op::Sub
            } else {
                return Ok(lhs);
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.peek_sym('*') {
                Op::Mul
            } else if self.peek_sym('/') {
                Op::Div
            } else {
                return Ok(lhs);
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.peek_sym('-') {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.peek_sym('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.peek_sym('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        let offset = self.offset();
        let Some(tok) = self.tokens.get(self.pos).cloned() else {
            return Err(Error::Expression { offset, message: "unexpected end of expression".into() });
        };
        self.pos += 1;
        match tok.tok {
            Tok::Num(v) => Ok(Node::Num(v)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym(c) => Err(Error::Expression { offset, message: format!("unexpected '{c}'") }),
            Tok::Ident(name) => {
                if self.peek_sym('(') {
                    let (func, arities) = Func::lookup(&name)
                        .ok_or_else(|| Error::Expression { offset, message: format!("unknown function '{name}'") })?;
                    self.pos += 1;
                    let mut args = vec![self.expr()?];
                    while self.peek_sym(',') {
                        self.pos += 1;
                        args.push(self.expr()?);
                    }
                    self.expect(')')?;
                    if !arities.contains(&args.len()) {
                        return Err(Error::Expression {
                            offset,
                            message: format!("'{name}' takes {arities:?} arguments, got {}", args.len()),
                        });
                    }
                    if func == Func::Indicator && self.vars.is_empty() {
                        return Err(Error::Expression { offset, message: "indicator needs a variable".into() });
                    }
                    return Ok(Node::Call(func, args));
                }
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Node::Var(i));
                }
                match name.as_str() {
                    "pi" => Ok(Node::Num(std::f64::consts::PI)),
                    "e" => Ok(Node::Num(std::f64::consts::E)),
                    "inf" => Ok(Node::Num(f64::INFINITY)),
                    _ => Err(Error::Expression { offset, message: format!("unknown name '{name}'") }),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_associativity() {
        let e = Expr::parse("1 + 2*3^2 - -4/2", &[]).unwrap();
        assert_eq!(e.eval(&[]), 1.0 + 18.0 + 2.0);
        let e = Expr::parse("2^3^2", &[]).unwrap();
        assert_eq!(e.eval(&[]), 512.0);
        let e = Expr::parse("-2^2", &[]).unwrap();
        assert_eq!(e.eval(&[]), -4.0);
    }

    #[test]
    fn variables_and_functions() {
        let e = Expr::parse("pow(t, -2.5) * indicator(1, inf)", &["t"]).unwrap();
        assert_eq!(e.eval(&[4.0]), 4f64.powf(-2.5));
        assert_eq!(e.eval(&[0.5]), 0.0);
        assert_eq!(e.breakpoints(), vec![1.0]);
        let e = Expr::parse("2 + cos(theta)", &["theta", "x1"]).unwrap();
        assert_eq!(e.eval(&[0.0, 1.0]), 3.0);
        let e = Expr::parse("exp(-t - 1/t)", &["t"]).unwrap();
        assert!((e.eval(&[1.0]) - (-2f64).exp()).abs() < 1e-15);
        assert_eq!(Expr::parse("1.5e-1 * 2", &[]).unwrap().constant(), Some(0.3));
    }

    #[test]
    fn errors_carry_offsets() {
        match Expr::parse("1 + foo(2)", &["r"]) {
            Err(Error::Expression { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        assert!(Expr::parse("(1 + 2", &[]).is_err());
        assert!(Expr::parse("1 $ 2", &[]).is_err());
        assert!(Expr::parse("pow(1)", &[]).is_err());
    }
}
