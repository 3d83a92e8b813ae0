//! Extended Conway notation: parsing, printing, and the AST.
//!
//! Grammar:
//! ```text
//! expr := ram ;  ram := prod ("," prod)* ;  prod := atom (WS atom)* ;
//! atom := signed_int pow? | "i" pow? | "(" ram ")" ;  pow := "^" digit+ .
//! ```
//!
//! Power shorthands are fully expanded at parse time: `a^n` becomes `n`
//! comma-joined copies of `a` when the powered atom stands alone as a
//! ramification part, and `n` repeated product factors when it occurs
//! among other factors of a product.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ConwayExpr {
    /// A twist region of |n| classical crossings with the sign of n.
    Integer(i32),
    /// A single virtual crossing, written `i`.
    Virtual,
    /// Tangle product, left-associative; length >= 2.
    Product(Vec<ConwayExpr>),
    /// Comma-separated ramification; length >= 2.
    Ramification(Vec<ConwayExpr>),
}

impl ConwayExpr {
    /// Number of classical crossings contributed by Integer leaves.
    pub fn classical_count(&self) -> usize {
        match self {
            ConwayExpr::Integer(n) => n.unsigned_abs() as usize,
            ConwayExpr::Virtual => 0,
            ConwayExpr::Product(v) | ConwayExpr::Ramification(v) => {
                v.iter().map(|e| e.classical_count()).sum()
            }
        }
    }

    /// Number of Virtual leaves.
    pub fn virtual_count(&self) -> usize {
        match self {
            ConwayExpr::Integer(_) => 0,
            ConwayExpr::Virtual => 1,
            ConwayExpr::Product(v) | ConwayExpr::Ramification(v) => {
                v.iter().map(|e| e.virtual_count()).sum()
            }
        }
    }

    pub fn has_negative_leaf(&self) -> bool {
        match self {
            ConwayExpr::Integer(n) => *n < 0,
            ConwayExpr::Virtual => false,
            ConwayExpr::Product(v) | ConwayExpr::Ramification(v) => {
                v.iter().any(|e| e.has_negative_leaf())
            }
        }
    }

    /// The mirror expression: every Integer leaf negated.
    pub fn mirror(&self) -> ConwayExpr {
        match self {
            ConwayExpr::Integer(n) => ConwayExpr::Integer(-n),
            ConwayExpr::Virtual => ConwayExpr::Virtual,
            ConwayExpr::Product(v) => ConwayExpr::Product(v.iter().map(|e| e.mirror()).collect()),
            ConwayExpr::Ramification(v) => {
                ConwayExpr::Ramification(v.iter().map(|e| e.mirror()).collect())
            }
        }
    }

    /// Canonical text; `parse_conway(print(e)) == e`.
    pub fn print(&self) -> String {
        self.print_in(PrintCtx::Top)
    }

    fn print_in(&self, ctx: PrintCtx) -> String {
        match self {
            ConwayExpr::Integer(n) => n.to_string(),
            ConwayExpr::Virtual => "i".to_string(),
            ConwayExpr::Product(v) => {
                let body = v
                    .iter()
                    .map(|e| e.print_in(PrintCtx::ProductFactor))
                    .collect::<Vec<_>>()
                    .join(" ");
                match ctx {
                    PrintCtx::Top | PrintCtx::RamPart => body,
                    PrintCtx::ProductFactor => format!("({body})"),
                }
            }
            ConwayExpr::Ramification(v) => {
                let body = v
                    .iter()
                    .map(|e| e.print_in(PrintCtx::RamPart))
                    .collect::<Vec<_>>()
                    .join(",");
                match ctx {
                    PrintCtx::Top => body,
                    _ => format!("({body})"),
                }
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum PrintCtx {
    Top,
    RamPart,
    ProductFactor,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

/// An atom together with an optional power shorthand, before expansion.
enum RawAtom {
    Plain(ConwayExpr),
    Powered(ConwayExpr, u32),
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        })
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) -> bool {
        let start = self.pos;
        while matches!(self.peek(), Some(b' ') | Some(b'\t')) {
            self.pos += 1;
        }
        self.pos > start
    }

    /// ram := prod ("," prod)*
    fn parse_ram(&mut self) -> Result<ConwayExpr> {
        let mut parts: Vec<ConwayExpr> = Vec::new();
        self.parse_prod_into(&mut parts)?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b',') {
                self.pos += 1;
                self.skip_ws();
                if matches!(self.peek(), None | Some(b')') | Some(b',')) {
                    return self.err("dangling comma");
                }
                self.parse_prod_into(&mut parts)?;
            } else {
                break;
            }
        }
        Ok(collapse(parts, false))
    }

    /// prod := atom (WS atom)*; a lone powered atom expands into the
    /// enclosing ramification part list.
    fn parse_prod_into(&mut self, ram_parts: &mut Vec<ConwayExpr>) -> Result<()> {
        let mut atoms: Vec<RawAtom> = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c) if c == b'(' || c == b'i' || c == b'-' || c.is_ascii_digit() => {
                    atoms.push(self.parse_atom()?);
                }
                _ => break,
            }
        }
        if atoms.is_empty() {
            return self.err("expected a tangle atom");
        }
        if atoms.len() == 1 {
            match atoms.pop().unwrap() {
                RawAtom::Plain(e) => ram_parts.push(e),
                RawAtom::Powered(e, n) => {
                    for _ in 0..n {
                        ram_parts.push(e.clone());
                    }
                }
            }
        } else {
            let mut factors = Vec::new();
            for a in atoms {
                match a {
                    RawAtom::Plain(e) => factors.push(e),
                    RawAtom::Powered(e, n) => {
                        for _ in 0..n {
                            factors.push(e.clone());
                        }
                    }
                }
            }
            ram_parts.push(ConwayExpr::Product(factors));
        }
        Ok(())
    }

    fn parse_atom(&mut self) -> Result<RawAtom> {
        let base = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                if self.peek() == Some(b')') {
                    return self.err("empty parentheses");
                }
                let inner = self.parse_ram()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return self.err("unbalanced parentheses");
                }
                self.pos += 1;
                inner
            }
            Some(b'i') => {
                self.pos += 1;
                ConwayExpr::Virtual
            }
            Some(c) if c == b'-' || c.is_ascii_digit() => {
                let n = self.parse_int()?;
                ConwayExpr::Integer(n)
            }
            _ => return self.err("expected a tangle atom"),
        };
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let n = self.parse_uint()?;
            if n == 0 {
                return self.err("power exponent must be positive");
            }
            if matches!(&base, ConwayExpr::Integer(0)) {
                return self.err("cannot raise 0 to a power");
            }
            Ok(RawAtom::Powered(base, n))
        } else {
            Ok(RawAtom::Plain(base))
        }
    }

    fn parse_int(&mut self) -> Result<i32> {
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let n = self.parse_uint()?;
        Ok(if neg { -(n as i32) } else { n as i32 })
    }

    fn parse_uint(&mut self) -> Result<u32> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected digits");
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<u32>()
            .map_err(|_| Error::Parse {
                pos: start,
                msg: "integer out of range".to_string(),
            })
    }
}

fn collapse(mut parts: Vec<ConwayExpr>, _product: bool) -> ConwayExpr {
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        ConwayExpr::Ramification(parts)
    }
}

/// Parse extended Conway notation into a fully expanded AST.
pub fn parse_conway(text: &str) -> Result<ConwayExpr> {
    let mut p = Parser::new(text);
    p.skip_ws();
    if p.peek().is_none() {
        return p.err("empty input");
    }
    let e = p.parse_ram()?;
    p.skip_ws();
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    validate_zero(&e, true)?;
    Ok(e)
}

fn validate_zero(e: &ConwayExpr, top: bool) -> Result<()> {
    match e {
        ConwayExpr::Integer(0) => {
            if top {
                Ok(())
            } else {
                Err(Error::Parse {
                    pos: 0,
                    msg: "0 is only allowed as the whole expression".to_string(),
                })
            }
        }
        ConwayExpr::Integer(_) | ConwayExpr::Virtual => Ok(()),
        ConwayExpr::Product(v) | ConwayExpr::Ramification(v) => {
            for sub in v {
                validate_zero(sub, false)?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ConwayExpr::*;

    #[test]
    fn parses_power_inside_ramification() {
        let e = parse_conway("(i,1^2)").unwrap();
        assert_eq!(e, Ramification(vec![Virtual, Integer(1), Integer(1)]));
    }

    #[test]
    fn parses_top_level_commas() {
        let e = parse_conway("1,1,i,-1,i").unwrap();
        assert_eq!(
            e,
            Ramification(vec![Integer(1), Integer(1), Virtual, Integer(-1), Virtual])
        );
    }

    #[test]
    fn parses_ks() {
        let e = parse_conway("(((1,(i,1),-1),-1),i,1)").unwrap();
        let inner = Ramification(vec![
            Integer(1),
            Ramification(vec![Virtual, Integer(1)]),
            Integer(-1),
        ]);
        let mid = Ramification(vec![inner, Integer(-1)]);
        assert_eq!(e, Ramification(vec![mid, Virtual, Integer(1)]));
    }

    #[test]
    fn parses_negative_power() {
        let e = parse_conway("(-1)^3").unwrap();
        assert_eq!(e, Ramification(vec![Integer(-1), Integer(-1), Integer(-1)]));
    }

    #[test]
    fn parses_products() {
        let e = parse_conway("(i,1) 1 (1,1)").unwrap();
        assert_eq!(
            e,
            Product(vec![
                Ramification(vec![Virtual, Integer(1)]),
                Integer(1),
                Ramification(vec![Integer(1), Integer(1)]),
            ])
        );
    }

    #[test]
    fn parses_s7_shape() {
        // ram of three products
        let e = parse_conway("(i,1) 1,(i,-1) -1,(i,1)").unwrap();
        match e {
            Ramification(v) => {
                assert_eq!(v.len(), 3);
                assert!(matches!(v[0], Product(_)));
            }
            _ => panic!("expected ramification"),
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_conway("").is_err());
        assert!(parse_conway("((").is_err());
        assert!(parse_conway("1^0").is_err());
        assert!(parse_conway("1,").is_err());
        assert!(parse_conway("1,,1").is_err());
        assert!(parse_conway("(1,0)").is_err());
        assert!(parse_conway("1)").is_err());
    }

    #[test]
    fn zero_is_the_unknot_only_at_top_level() {
        assert_eq!(parse_conway("0").unwrap(), Integer(0));
    }

    #[test]
    fn print_parse_round_trip() {
        for s in [
            "3",
            "2 2",
            "(i,1,1)",
            "1,1,i,-1,i",
            "(((1,(i,1),-1),-1),i,1)",
            "(i,1) 1,(i,-1) -1,(i,1)",
            "(i,1) (1,i) 1 (-1,i)",
            "(1,i,-1) i (1,i,-1)",
        ] {
            let e = parse_conway(s).unwrap();
            let printed = e.print();
            let e2 = parse_conway(&printed).unwrap();
            assert_eq!(e, e2, "round trip of {s} via {printed}");
        }
    }
}
