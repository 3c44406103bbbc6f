//! Mechanism expressions: real literals, symbols, `+`, `-`, `*` and
//! parentheses. `×` and `−` are accepted as aliases. A token starting with a
//! digit or `.` is a number.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Sym(String),
    Node(usize),
    Latent(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Open,
    Close,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprError(pub String);

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn tokenize(src: &str) -> Result<Vec<Tok>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' | '−' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' | '×' => {
                out.push(Tok::Star);
                i += 1
            }
            '(' => {
                out.push(Tok::Open);
                i += 1
            }
            ')' => {
                out.push(Tok::Close);
                i += 1
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() {
                    let d = chars[i];
                    let exp_sign = (d == '+' || d == '-') && matches!(chars[i - 1], 'e' | 'E');
                    if d.is_ascii_alphanumeric() || d == '.' || exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v = text
                    .parse::<f64>()
                    .map_err(|_| ExprError(format!("invalid number {text:?}")))?;
                out.push(Tok::Num(v));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(ExprError(format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(Expr::Const(v)),
            Some(Tok::Ident(s)) => Ok(Expr::Sym(s)),
            Some(Tok::Open) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::Close) => Ok(e),
                    _ => Err(ExprError("missing closing parenthesis".into())),
                }
            }
            Some(t) => Err(ExprError(format!("unexpected token {t:?}"))),
            None => Err(ExprError("unexpected end of expression".into())),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
    };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(ExprError(format!("unexpected token {:?}", p.toks[p.pos])));
    }
    Ok(e)
}

/// What a symbol refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Node(usize),
    Latent(usize),
}

impl Expr {
    /// Replaces every `Sym` using `lookup`.
    pub fn resolve(
        self,
        lookup: &impl Fn(&str) -> Result<Slot, ExprError>,
    ) -> Result<Expr, ExprError> {
        let bin = |a: Box<Expr>, b: Box<Expr>| -> Result<(Box<Expr>, Box<Expr>), ExprError> {
            Ok((Box::new(a.resolve(lookup)?), Box::new(b.resolve(lookup)?)))
        };
        Ok(match self {
            Expr::Sym(s) => match lookup(&s)? {
                Slot::Node(i) => Expr::Node(i),
                Slot::Latent(k) => Expr::Latent(k),
            },
            Expr::Neg(a) => Expr::Neg(Box::new(a.resolve(lookup)?)),
            Expr::Add(a, b) => {
                let (a, b) = bin(a, b)?;
                Expr::Add(a, b)
            }
            Expr::Sub(a, b) => {
                let (a, b) = bin(a, b)?;
                Expr::Sub(a, b)
            }
            Expr::Mul(a, b) => {
                let (a, b) = bin(a, b)?;
                Expr::Mul(a, b)
            }
            e => e,
        })
    }

    /// Point evaluation. `nodes` holds 0/1 values by node index.
    pub fn eval(&self, nodes: &[u8], latents: &[f64]) -> f64 {
        match self {
            Expr::Const(v) => *v,
            Expr::Node(i) => nodes[*i] as f64,
            Expr::Latent(k) => latents[*k],
            Expr::Neg(a) => -a.eval(nodes, latents),
            Expr::Add(a, b) => a.eval(nodes, latents) + b.eval(nodes, latents),
            Expr::Sub(a, b) => a.eval(nodes, latents) - b.eval(nodes, latents),
            Expr::Mul(a, b) => a.eval(nodes, latents) * b.eval(nodes, latents),
            Expr::Sym(s) => panic!("unresolved symbol {s}"),
        }
    }

    /// Interval enclosure of the value when each latent ranges over its bounds.
    pub fn eval_interval(&self, nodes: &[u8], bounds: &[(f64, f64)]) -> (f64, f64) {
        match self {
            Expr::Const(v) => (*v, *v),
            Expr::Node(i) => (nodes[*i] as f64, nodes[*i] as f64),
            Expr::Latent(k) => bounds[*k],
            Expr::Neg(a) => {
                let (lo, hi) = a.eval_interval(nodes, bounds);
                (-hi, -lo)
            }
            Expr::Add(a, b) => {
                let (al, ah) = a.eval_interval(nodes, bounds);
                let (bl, bh) = b.eval_interval(nodes, bounds);
                (al + bl, ah + bh)
            }
            Expr::Sub(a, b) => {
                let (al, ah) = a.eval_interval(nodes, bounds);
                let (bl, bh) = b.eval_interval(nodes, bounds);
                (al - bh, ah - bl)
            }
            Expr::Mul(a, b) => {
                let (al, ah) = a.eval_interval(nodes, bounds);
                let (bl, bh) = b.eval_interval(nodes, bounds);
                let p = [al * bl, al * bh, ah * bl, ah * bh];
                (
                    p.iter().copied().fold(f64::INFINITY, f64::min),
                    p.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                )
            }
            Expr::Sym(s) => panic!("unresolved symbol {s}"),
        }
    }

    /// Names of unresolved symbols, in order of first appearance.
    pub fn symbols(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Sym(s) => {
                if !out.contains(&s.as_str()) {
                    out.push(s)
                }
            }
            Expr::Neg(a) => a.collect_symbols(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            _ => {}
        }
    }
}
