//! Text input: rational literals, differential polynomials (`y1[2,0]^2 - 4*y1`),
//! algebraic polynomials (`x1^2*x2 - 3`) and problem files.
//!
//! Problem file grammar (whitespace is insignificant outside literals, `#`
//! starts a line comment):
//!
//! ```text
//! ring m=<int> n=<int> w=[c1,...,cm];
//! F: <poly>; <poly>; ...
//! K: <poly>; ...            # optional, defaults to {1}
//! ```

use crate::diffpoly::{DerivativeVar, DiffPoly, Ring, WeightVector};
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::linearbridge::AlgPoly;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Caret,
    Semi,
    Colon,
    Eq,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            // a fraction or decimal literal continues only when a digit follows
            if i + 1 < chars.len()
                && (chars[i] == '/' || chars[i] == '.')
                && chars[i + 1].is_ascii_digit()
            {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            Tok::Num(chars[start..i].iter().collect())
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            i += 1;
            match c {
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '^' => Tok::Caret,
                ';' => Tok::Semi,
                ':' => Tok::Colon,
                '=' => Tok::Eq,
                other => {
                    return Err(Error::Parse {
                        line: tl,
                        column: tc,
                        message: format!("unexpected character {other:?}"),
                    })
                }
            }
        };
        col += i - start;
        out.push(Token { tok, line: tl, col: tc });
    }
    Ok(out)
}

trait Builder {
    type P: Clone;
    fn constant(&self, q: Rational) -> Self::P;
    fn variable(&self, name: &str, index: Option<Vec<u32>>) -> std::result::Result<Self::P, String>;
    fn add(&self, a: &Self::P, b: &Self::P) -> Self::P;
    fn sub(&self, a: &Self::P, b: &Self::P) -> Self::P;
    fn mul(&self, a: &Self::P, b: &Self::P) -> Self::P;
    fn neg(&self, a: &Self::P) -> Self::P;
    fn pow(&self, a: &Self::P, e: u32) -> Self::P;
}

struct DiffBuilder<'a>(&'a Ring);

impl Builder for DiffBuilder<'_> {
    type P = DiffPoly;

    fn constant(&self, q: Rational) -> DiffPoly {
        DiffPoly::constant(q)
    }

    fn variable(&self, name: &str, index: Option<Vec<u32>>) -> std::result::Result<DiffPoly, String> {
        let k: usize = name
            .strip_prefix('y')
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("unknown identifier {name:?}, expected y<k>"))?;
        let exps = index.unwrap_or_else(|| vec![0; self.0.m()]);
        if exps.len() != self.0.m() {
            return Err(format!(
                "exponent vector of {name} has length {}, ring has m={}",
                exps.len(),
                self.0.m()
            ));
        }
        let v = DerivativeVar::new(k, &exps);
        self.0.check_var(&v).map_err(|e| e.to_string())?;
        Ok(DiffPoly::var(v))
    }

    fn add(&self, a: &DiffPoly, b: &DiffPoly) -> DiffPoly {
        a + b
    }
    fn sub(&self, a: &DiffPoly, b: &DiffPoly) -> DiffPoly {
        a - b
    }
    fn mul(&self, a: &DiffPoly, b: &DiffPoly) -> DiffPoly {
        a * b
    }
    fn neg(&self, a: &DiffPoly) -> DiffPoly {
        -a
    }
    fn pow(&self, a: &DiffPoly, e: u32) -> DiffPoly {
        a.pow(e)
    }
}

struct AlgBuilder(usize);

impl Builder for AlgBuilder {
    type P = AlgPoly;

    fn constant(&self, q: Rational) -> AlgPoly {
        AlgPoly::constant(self.0, q)
    }

    fn variable(&self, name: &str, index: Option<Vec<u32>>) -> std::result::Result<AlgPoly, String> {
        if index.is_some() {
            return Err(format!("{name} takes no exponent vector"));
        }
        let k: usize = name
            .strip_prefix('x')
            .and_then(|s| s.parse().ok())
            .filter(|&k| k >= 1 && k <= self.0)
            .ok_or_else(|| format!("unknown variable {name:?}, expected x1..x{}", self.0))?;
        let mut e = vec![0; self.0];
        e[k - 1] = 1;
        Ok(AlgPoly::monomial(Rational::one(), e))
    }

    fn add(&self, a: &AlgPoly, b: &AlgPoly) -> AlgPoly {
        a.add(b)
    }
    fn sub(&self, a: &AlgPoly, b: &AlgPoly) -> AlgPoly {
        a.sub(b)
    }
    fn mul(&self, a: &AlgPoly, b: &AlgPoly) -> AlgPoly {
        a.mul(b)
    }
    fn neg(&self, a: &AlgPoly) -> AlgPoly {
        a.scale(&Rational::from(-1))
    }
    fn pow(&self, a: &AlgPoly, e: u32) -> AlgPoly {
        (0..e).fold(AlgPoly::constant(self.0, Rational::one()), |acc, _| acc.mul(a))
    }
}

struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
}

impl<'t> Parser<'t> {
    fn new(toks: &'t [Token]) -> Self {
        Parser { toks, pos: 0 }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|t| &t.tok)
    }

    fn err(&self, message: impl Into<String>) -> Error {
        let (line, column) = match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) if self.pos < self.toks.len() => (t.line, t.col),
            Some(t) => (t.line, t.col + 1),
            None => (1, 1),
        };
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {want:?}, found {:?}", self.peek())))
        }
    }

    fn uint(&mut self) -> Result<u64> {
        match self.peek() {
            Some(Tok::Num(s)) if s.bytes().all(|b| b.is_ascii_digit()) => {
                let v = s.parse().map_err(|_| self.err("integer too large"))?;
                self.pos += 1;
                Ok(v)
            }
            other => Err(self.err(format!("expected a non-negative integer, found {other:?}"))),
        }
    }

    fn expr<B: Builder>(&mut self, b: &B) -> Result<B::P> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                let t = self.term(b)?;
                b.neg(&t)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.term(b)?
            }
            _ => self.term(b)?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let t = self.term(b)?;
                    acc = b.add(&acc, &t);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let t = self.term(b)?;
                    acc = b.sub(&acc, &t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term<B: Builder>(&mut self, b: &B) -> Result<B::P> {
        let mut acc = self.factor(b)?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let f = self.factor(b)?;
            acc = b.mul(&acc, &f);
        }
        Ok(acc)
    }

    fn factor<B: Builder>(&mut self, b: &B) -> Result<B::P> {
        let base = self.atom(b)?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let e = self.uint()?;
            let e = u32::try_from(e).map_err(|_| self.err("exponent too large"))?;
            return Ok(b.pow(&base, e));
        }
        Ok(base)
    }

    fn atom<B: Builder>(&mut self, b: &B) -> Result<B::P> {
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                let q: Rational = s.parse().map_err(|e: Error| self.err(e.to_string()))?;
                self.pos += 1;
                Ok(b.constant(q))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr(b)?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                let at = self.pos;
                self.pos += 1;
                let index = if self.peek() == Some(&Tok::LBracket) {
                    self.pos += 1;
                    let mut exps = Vec::new();
                    loop {
                        let e = self.uint()?;
                        exps.push(u32::try_from(e).map_err(|_| self.err("exponent too large"))?);
                        match self.bump() {
                            Some(Tok::Comma) => continue,
                            Some(Tok::RBracket) => break,
                            _ => {
                                self.pos -= 1;
                                return Err(self.err("expected ',' or ']' in exponent vector"));
                            }
                        }
                    }
                    Some(exps)
                } else {
                    None
                };
                b.variable(&name, index).map_err(|msg| {
                    self.pos = at;
                    self.err(msg)
                })
            }
            other => Err(self.err(format!("expected a term, found {other:?}"))),
        }
    }
}

fn parse_whole<B: Builder>(src: &str, b: &B) -> Result<B::P> {
    let toks = lex(src)?;
    let mut p = Parser::new(&toks);
    let e = p.expr(b)?;
    if p.pos != toks.len() {
        return Err(p.err(format!("unexpected trailing input {:?}", p.peek())));
    }
    Ok(e)
}

/// Parses a differential polynomial in the given ring.
pub fn parse_poly(src: &str, ring: &Ring) -> Result<DiffPoly> {
    parse_whole(src, &DiffBuilder(ring))
}

/// Parses an algebraic polynomial in `x1..xm`.
pub fn parse_alg_poly(src: &str, m: usize) -> Result<AlgPoly> {
    parse_whole(src, &AlgBuilder(m))
}

/// A parsed problem: ring, weights and the generator sets `F` and `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub ring: Ring,
    pub weights: WeightVector,
    pub f: Vec<DiffPoly>,
    pub k: Vec<DiffPoly>,
}

impl ProblemSpec {
    /// Renders the problem in the input grammar; parsing the result gives
    /// back an equal spec.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "ring m={} n={} w={};\n",
            self.ring.m(),
            self.ring.n(),
            self.weights
        );
        s.push_str("F:");
        for f in &self.f {
            s.push_str(&format!(" {f};"));
        }
        s.push('\n');
        s.push_str("K:");
        for k in &self.k {
            s.push_str(&format!(" {k};"));
        }
        s.push('\n');
        s
    }
}

/// Parses a problem file.
pub fn parse_system(src: &str) -> Result<ProblemSpec> {
    let toks = lex(src)?;
    let mut p = Parser::new(&toks);

    match p.bump() {
        Some(Tok::Ident(s)) if s == "ring" => {}
        _ => {
            p.pos = 0;
            return Err(p.err("expected header `ring m=<int> n=<int> w=[...];`"));
        }
    }
    let key = |p: &mut Parser, name: &str| -> Result<()> {
        match p.peek() {
            Some(Tok::Ident(s)) if s == name => {
                p.pos += 1;
                p.expect(Tok::Eq)
            }
            _ => Err(p.err(format!("expected `{name}=`"))),
        }
    };
    key(&mut p, "m")?;
    let m = p.uint()? as usize;
    key(&mut p, "n")?;
    let n = p.uint()? as usize;
    let ring = Ring::new(m, n).map_err(|e| p.err(e.to_string()))?;
    key(&mut p, "w")?;
    p.expect(Tok::LBracket)?;
    let mut c = vec![p.uint()?];
    while p.peek() == Some(&Tok::Comma) {
        p.pos += 1;
        c.push(p.uint()?);
    }
    p.expect(Tok::RBracket)?;
    if c.len() != m {
        return Err(p.err(format!("weight vector has {} entries, ring has m={m}", c.len())));
    }
    let weights = WeightVector::new(c).map_err(|e| p.err(e.to_string()))?;
    p.expect(Tok::Semi)?;

    let b = DiffBuilder(&ring);
    let section_start = |p: &Parser, name: &str| {
        matches!(p.peek(), Some(Tok::Ident(s)) if s == name) && p.peek2() == Some(&Tok::Colon)
    };
    let section = |p: &mut Parser, name: &str, stop: Option<&str>| -> Result<Option<Vec<DiffPoly>>> {
        if !section_start(p, name) {
            return Ok(None);
        }
        p.pos += 2;
        let mut polys = Vec::new();
        loop {
            if p.peek().is_none() || stop.is_some_and(|s| section_start(p, s)) {
                break;
            }
            if p.peek() == Some(&Tok::Semi) {
                p.pos += 1;
                continue;
            }
            let start = p.pos;
            let f = p.expr(&b)?;
            if name == "F" && f.is_zero() {
                p.pos = start;
                return Err(p.err("zero polynomial in F"));
            }
            polys.push(f);
            match p.peek() {
                Some(Tok::Semi) => p.pos += 1,
                None => {}
                _ if stop.is_some_and(|s| section_start(p, s)) => {}
                _ => return Err(p.err("expected ';' after polynomial")),
            }
        }
        Ok(Some(polys))
    };
    let f = section(&mut p, "F", Some("K"))?.ok_or_else(|| p.err("expected `F:` section"))?;
    let k = section(&mut p, "K", None)?.unwrap_or_else(|| vec![DiffPoly::one()]);
    if p.pos < toks.len() {
        return Err(p.err(format!("unexpected input {:?}", p.peek())));
    }
    Ok(ProblemSpec { ring, weights, f, k })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_generator() {
        let spec = parse_system("ring m=1 n=1 w=[1]; F: y1[1]^2 - 4*y1;").unwrap();
        assert_eq!(spec.ring.m(), 1);
        assert_eq!(spec.f.len(), 1);
        assert_eq!(spec.f[0].to_string(), "y1[1]^2 - 4*y1");
        assert_eq!(spec.k, vec![DiffPoly::one()]);
    }

    #[test]
    fn parses_heat_equation() {
        let spec = parse_system("ring m=3 n=1 w=[1,1,2]; F: y1[0,0,1] - y1[2,0,0] - y1[0,2,0];").unwrap();
        let w = crate::diffpoly::set_weight(&spec.f, &spec.weights);
        assert_eq!(w, Some(2));
    }

    #[test]
    fn malformed_exponent_vector_reports_position() {
        let err = parse_system("ring m=3 n=1 w=[1,1,1];\nF: y1 + y1[1,2];").unwrap_err();
        match err {
            Error::Parse { line, column, message } => {
                assert_eq!((line, column), (2, 9));
                assert!(message.contains("length 2"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn sections_comments_and_whitespace() {
        let src = "# a comment\nring m=2 n=2 w=[2,1];\nF:\n  y1[1,0] - y2;  # first\n  y2[0,1]^2;\nK: y2; 3/2\n";
        let spec = parse_system(src).unwrap();
        assert_eq!(spec.f.len(), 2);
        assert_eq!(spec.k.len(), 2);
        assert_eq!(spec.k[1], DiffPoly::constant("3/2".parse().unwrap()));
        assert_eq!(parse_system(&spec.to_text()).unwrap(), spec);
    }

    #[test]
    fn rejects_zero_generator_and_garbage() {
        assert!(parse_system("ring m=1 n=1 w=[1]; F: y1 - y1;").is_err());
        assert!(parse_system("ring m=1 n=1 w=[1]; F: y1 $;").is_err());
        assert!(parse_system("ring m=1 n=1 w=[1,2]; F: y1;").is_err());
        assert!(parse_system("ring m=1 n=1 w=[0]; F: y1;").is_err());
        assert!(parse_system("ring m=1 n=1 w=[1]; F: y2;").is_err());
        assert!(parse_system("ring m=1 n=1 w=[1]; F: y1 y1;").is_err());
    }

    #[test]
    fn parentheses_and_decimals() {
        let r = Ring::new(1, 1).unwrap();
        let f = parse_poly("(y1 + 1)^2 - 0.5*y1", &r).unwrap();
        assert_eq!(f, parse_poly("y1^2 + 3/2*y1 + 1", &r).unwrap());
    }

    #[test]
    fn algebraic_polynomials() {
        let f = parse_alg_poly("x1^2*x2 - 3", 2).unwrap();
        assert_eq!(f.to_string(), "x1^2*x2 - 3");
        assert!(parse_alg_poly("x3", 2).is_err());
    }
}
