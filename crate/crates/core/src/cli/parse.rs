//! Literal grammar.
//!
//! ```text
//! literal  := item (';' item)*
//! item     := key '=' value
//! key      := field | n | q | coeffs | q1 | q2
//! form     := 'diag(' expr (',' expr)* ')' | 'H(' int ')' | 'zero(' int ')' | matrix
//! matrix   := '[' row (',' row)* ']'         rows are upper-triangular, full
//! row      := '[' expr (',' expr)* ']'       (length n) or trimmed (length n-i)
//! expr     := term (('+'|'-') term)*
//! term     := factor (('*'|'/') factor)*
//! factor   := '-' factor | atom ('^' int)?
//! atom     := int | ident | '(' expr ')'
//! ```
//!
//! Identifiers are `a` (generator of F_{p^e}) and the function-field variable.
//! Positions in errors are byte offsets into the literal.

use crate::error::{Error, Result};
use crate::quadform::QuadraticForm;
use crate::rings::{Field, FieldContext, Matrix};
use num_bigint::BigInt;

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

/// A `key=value` item, with the offset of the value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item<'a> {
    pub key: &'a str,
    pub key_pos: usize,
    pub value: &'a str,
    pub pos: usize,
}

/// Split a literal into items at top-level semicolons.
pub fn items(src: &str) -> Result<Vec<Item<'_>>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut push = |start: usize, end: usize| -> Result<()> {
        let raw = &src[start..end];
        if raw.trim().is_empty() {
            return Ok(());
        }
        let eq = raw.find('=').ok_or_else(|| err(start, "expected `key=value`"))?;
        let key = raw[..eq].trim();
        let key_pos = start + raw[..eq].find(key).unwrap_or(0);
        let value_raw = &raw[eq + 1..];
        let lead = value_raw.len() - value_raw.trim_start().len();
        out.push(Item {
            key,
            key_pos,
            value: value_raw.trim(),
            pos: start + eq + 1 + lead,
        });
        Ok(())
    };
    for (i, c) in src.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(err(i, format!("unbalanced `{c}`")));
                }
            }
            ';' if depth == 0 => {
                push(start, i)?;
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(err(src.len(), "unclosed bracket"));
    }
    push(start, src.len())?;
    Ok(out)
}

/// Recursive-descent scalar parser over a field.
pub struct ExprParser<'a, K: Field> {
    k: &'a K,
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    offset: usize,
    ident: &'a dyn Fn(&str) -> Option<K::Elem>,
}

impl<'a, K: Field> ExprParser<'a, K> {
    pub fn new(k: &'a K, src: &'a str, offset: usize, ident: &'a dyn Fn(&str) -> Option<K::Elem>) -> Self {
        ExprParser {
            k,
            src,
            bytes: src.as_bytes(),
            pos: 0,
            offset,
            ident,
        }
    }

    fn here(&self) -> usize {
        self.offset + self.pos
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(err(self.here(), format!("expected `{}`", c as char)))
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub fn finish(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(err(self.here(), "unexpected trailing input"))
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(err(self.here(), "expected an integer"));
        }
        Ok(self.src[start..self.pos].parse().unwrap())
    }

    pub fn small_int(&mut self) -> Result<usize> {
        let at = self.here();
        let n = self.integer()?;
        usize::try_from(&n).ok().filter(|&v| v <= 64).ok_or_else(|| err(at, "integer out of range"))
    }

    pub fn expr(&mut self) -> Result<K::Elem> {
        let k = self.k;
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = k.add(&acc, &self.term()?);
            } else if self.eat(b'-') {
                acc = k.sub(&acc, &self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<K::Elem> {
        let k = self.k;
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = k.mul(&acc, &self.factor()?);
            } else if self.peek() == Some(b'/') {
                let at = self.here();
                self.pos += 1;
                let d = self.factor()?;
                acc = k.div(&acc, &d).ok_or_else(|| err(at, "division by zero"))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<K::Elem> {
        if self.eat(b'-') {
            let f = self.factor()?;
            return Ok(self.k.neg(&f));
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.integer()?;
            let e = u64::try_from(&e).map_err(|_| err(self.here(), "exponent too large"))?;
            return Ok(self.k.pow(&base, e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<K::Elem> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(self.k.from_bigint(&n))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let at = self.here();
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                (self.ident)(name).ok_or_else(|| err(at, format!("unknown symbol `{name}`")))
            }
            Some(c) => Err(err(self.here(), format!("unexpected `{}`", c as char))),
            None => Err(err(self.here(), "unexpected end of input")),
        }
    }

    /// Comma-separated expressions up to a closing delimiter.
    fn list(&mut self, close: u8) -> Result<Vec<K::Elem>> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(b',')?;
        }
    }

    /// A form value; `n` is the declared rank, if any.
    pub fn form(&mut self, n: Option<usize>) -> Result<QuadraticForm<K>> {
        let k = self.k;
        let start = self.here();
        let q = if self.peek() == Some(b'[') {
            self.pos += 1;
            let mut rows = Vec::new();
            let mut row_pos = Vec::new();
            loop {
                row_pos.push(self.here());
                self.expect(b'[')?;
                rows.push(self.list(b']')?);
                if self.eat(b']') {
                    break;
                }
                self.expect(b',')?;
            }
            let dim = rows.len();
            let mut m = Matrix::zeros(k, dim, dim);
            for (i, row) in rows.into_iter().enumerate() {
                let shift = if row.len() == dim {
                    0
                } else if row.len() == dim - i {
                    i
                } else {
                    return Err(err(
                        row_pos[i],
                        format!("row {i} has {} entries, expected {dim} or {}", row.len(), dim - i),
                    ));
                };
                for (j, c) in row.into_iter().enumerate() {
                    let col = j + shift;
                    if col < i && !k.is_zero(&c) {
                        return Err(err(row_pos[i], "nonzero entry below the diagonal"));
                    }
                    if col >= i {
                        m.set(i, col, c);
                    }
                }
            }
            QuadraticForm::from_upper(k.clone(), m)?
        } else {
            let at = self.here();
            let s = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphabetic() {
                self.pos += 1;
            }
            let name = self.src[s..self.pos].to_string();
            self.expect(b'(')?;
            match name.as_str() {
                "diag" => {
                    let d = self.list(b')')?;
                    QuadraticForm::diagonal(k.clone(), &d)
                }
                "H" | "hyperbolic" => {
                    let m = self.small_int()?;
                    self.expect(b')')?;
                    QuadraticForm::hyperbolic(k.clone(), m)
                }
                "zero" => {
                    let m = self.small_int()?;
                    self.expect(b')')?;
                    QuadraticForm::zero(k.clone(), m)
                }
                _ => return Err(err(at, format!("unknown form constructor `{name}`"))),
            }
        };
        if let Some(n) = n {
            if q.rank() != n {
                return Err(err(start, format!("form has rank {}, but n={n}", q.rank())));
            }
        }
        Ok(q)
    }
}

/// Parse the field item of a literal (or the `--field` flag). Both present
/// and different is an error.
pub fn field_of(items: &[Item<'_>], flag: Option<&str>) -> Result<FieldContext> {
    let from_item = items
        .iter()
        .find(|it| it.key == "field")
        .map(|it| FieldContext::parse(it.value).map_err(|e| at(e, it.pos)))
        .transpose()?;
    let from_flag = flag.map(FieldContext::parse).transpose()?;
    match (from_item, from_flag) {
        (Some(a), Some(b)) if a != b => Err(err(0, format!("literal field {a} conflicts with --field {b}"))),
        (Some(a), _) | (None, Some(a)) => Ok(a),
        (None, None) => Err(err(0, "no field given (use `field=...` or --field)")),
    }
}

fn at(e: Error, pos: usize) -> Error {
    match e {
        Error::Parse { pos: p, msg } => Error::Parse { pos: pos + p, msg },
        other => other,
    }
}

/// Declared rank `n=...`, if present.
pub fn declared_rank(items: &[Item<'_>]) -> Result<Option<usize>> {
    items
        .iter()
        .find(|it| it.key == "n")
        .map(|it| {
            it.value
                .parse::<usize>()
                .ok()
                .filter(|&n| n <= 64)
                .ok_or_else(|| err(it.pos, "n must be a small non-negative integer"))
        })
        .transpose()
}

/// Reject unknown keys and duplicates.
pub fn check_keys(items: &[Item<'_>], allowed: &[&str]) -> Result<()> {
    for (i, it) in items.iter().enumerate() {
        if !allowed.contains(&it.key) {
            return Err(err(
                it.key_pos,
                format!("unknown key `{}` (expected one of {})", it.key, allowed.join(", ")),
            ));
        }
        if items[..i].iter().any(|o| o.key == it.key) {
            return Err(err(it.key_pos, format!("duplicate key `{}`", it.key)));
        }
    }
    Ok(())
}

pub fn parse_form_value<K: Field>(
    k: &K,
    item: &Item<'_>,
    n: Option<usize>,
    ident: &dyn Fn(&str) -> Option<K::Elem>,
) -> Result<QuadraticForm<K>> {
    let mut p = ExprParser::new(k, item.value, item.pos, ident);
    let q = p.form(n)?;
    p.finish()?;
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{ints, PrimeField, Rationals};

    fn no_ident<E>(_: &str) -> Option<E> {
        None
    }

    #[test]
    fn scalar_expressions() {
        let q = Rationals;
        let f = no_ident;
        let mut p = ExprParser::new(&q, "1/2 + 3*(2-5)^2 - -1", 0, &f);
        let v = p.expr().unwrap();
        p.finish().unwrap();
        assert_eq!(q.format(&v), "57/2");
        let mut p = ExprParser::new(&q, "1/0", 0, &f);
        assert!(matches!(p.expr(), Err(Error::Parse { pos: 1, .. })));
    }

    #[test]
    fn form_literals() {
        let src = "field=Fp:5; n=4; q=diag(1,1,1,2)";
        let it = items(src).unwrap();
        assert_eq!(field_of(&it, None).unwrap(), FieldContext::PrimeField { p: 5 });
        let k = PrimeField::new(5).unwrap();
        let q = parse_form_value(&k, &it[2], declared_rank(&it).unwrap(), &no_ident).unwrap();
        assert_eq!(q, QuadraticForm::diagonal(k, &ints(&k, &[1, 1, 1, 2])));
        // full and trimmed upper-triangular rows agree
        let a = items("coeffs=[[1,2,0],[0,1,3],[0,0,4]]").unwrap();
        let b = items("coeffs=[[1,2,0],[1,3],[4]]").unwrap();
        let qa = parse_form_value(&k, &a[0], None, &no_ident).unwrap();
        let qb = parse_form_value(&k, &b[0], None, &no_ident).unwrap();
        assert_eq!(qa, qb);
        assert_eq!(qa.coeff(1, 2), &3);
    }

    #[test]
    fn positions_point_at_the_problem() {
        let k = PrimeField::new(5).unwrap();
        let src = "field=Fp:5; q=diag(1,1,x)";
        let it = items(src).unwrap();
        match parse_form_value(&k, &it[1], None, &no_ident) {
            Err(Error::Parse { pos, .. }) => assert_eq!(&src[pos..pos + 1], "x"),
            other => panic!("{other:?}"),
        }
        let src = "field=Fp:5; n=3; q=diag(1,1)";
        let it = items(src).unwrap();
        assert!(matches!(
            parse_form_value(&k, &it[2], Some(3), &no_ident),
            Err(Error::Parse { pos: 19, .. })
        ));
        assert!(matches!(items("q=diag(1,2"), Err(Error::Parse { pos: 10, .. })));
        let it = items("field=Q; q=[[1,2],[3,4]]").unwrap();
        assert!(parse_form_value(&Rationals, &it[1], None, &no_ident).is_err());
        let it = items("feld=Q").unwrap();
        assert!(matches!(check_keys(&it, &["field"]), Err(Error::Parse { pos: 0, .. })));
    }

    #[test]
    fn field_flag_conflicts() {
        let it = items("field=Q; q=diag(1)").unwrap();
        assert!(field_of(&it, Some("Fp:3")).is_err());
        assert_eq!(field_of(&it, Some("Q")).unwrap(), FieldContext::Rationals);
        assert!(field_of(&items("q=diag(1)").unwrap(), None).is_err());
    }
}
