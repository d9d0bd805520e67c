//! Text syntax for sets.
//!
//! ```text
//! expr    := diff ('|' diff)*
//! diff    := meet ('\' meet)*
//! meet    := unary ('&' unary)*
//! unary   := '~' unary | primary
//! primary := 'up' '(' 'threshold' '=' N ',' 'period' '=' N ','
//!                     'prefix' '=' BITS? ',' 'block' '=' BITS ')'
//!          | 'res' '(' N 'mod' N ')' | 'fin' '{' N,* '}'
//!          | 'nat' | 'empty' | 'n0'
//!          | ('cl' | 'clminus' | 'comp' | 'gpre') '(' expr ')'
//!          | '(' expr ')'
//! ```

use thiserror::Error;

use super::{n0_set, UpSet, UpSetError};
use crate::text::{Cursor, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UpSetSyntaxError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("at offset {pos}: {source}")]
    Invalid { pos: usize, source: UpSetError },
}

pub fn parse_upset(src: &str) -> Result<UpSet, UpSetSyntaxError> {
    let mut cur = Cursor::new(src)?;
    let set = parse_expr(&mut cur)?;
    cur.expect_end()?;
    Ok(set)
}

pub(crate) fn parse_expr(cur: &mut Cursor) -> Result<UpSet, UpSetSyntaxError> {
    let mut acc = parse_diff(cur)?;
    while cur.eat_punct("|") {
        acc = acc.union(&parse_diff(cur)?);
    }
    Ok(acc)
}

fn parse_diff(cur: &mut Cursor) -> Result<UpSet, UpSetSyntaxError> {
    let mut acc = parse_meet(cur)?;
    while cur.eat_punct("\\") {
        acc = acc.difference(&parse_meet(cur)?);
    }
    Ok(acc)
}

fn parse_meet(cur: &mut Cursor) -> Result<UpSet, UpSetSyntaxError> {
    let mut acc = parse_unary(cur)?;
    while cur.eat_punct("&") {
        acc = acc.intersection(&parse_unary(cur)?);
    }
    Ok(acc)
}

fn parse_unary(cur: &mut Cursor) -> Result<UpSet, UpSetSyntaxError> {
    if cur.eat_punct("~") {
        return Ok(parse_unary(cur)?.complement());
    }
    parse_primary(cur)
}

fn bits(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}

fn parse_bits(cur: &mut Cursor) -> Result<Vec<bool>, UpSetSyntaxError> {
    if cur.peek_punct(",") || cur.peek_punct(")") {
        return Ok(Vec::new());
    }
    let pos = cur.pos();
    let d = cur.digits()?;
    if d.chars().any(|c| c != '0' && c != '1') {
        return Err(SyntaxError::new(pos, format!("`{d}` is not a bit string")).into());
    }
    Ok(bits(&d))
}

fn parse_primary(cur: &mut Cursor) -> Result<UpSet, UpSetSyntaxError> {
    let pos = cur.pos();
    if cur.eat_punct("(") {
        let e = parse_expr(cur)?;
        cur.expect_punct(")")?;
        return Ok(e);
    }
    let name = cur.ident()?;
    let invalid = |source| UpSetSyntaxError::Invalid { pos, source };
    match name.as_str() {
        "nat" => Ok(UpSet::naturals()),
        "empty" => Ok(UpSet::empty()),
        "n0" => Ok(n0_set()),
        "res" => {
            cur.expect_punct("(")?;
            let r = cur.number()?;
            cur.expect_ident("mod")?;
            let m = cur.number()?;
            cur.expect_punct(")")?;
            UpSet::from_residue(r, m).map_err(invalid)
        }
        "fin" => Ok(UpSet::from_finite(cur.number_set()?)),
        "up" => {
            cur.expect_punct("(")?;
            cur.expect_ident("threshold")?;
            cur.expect_punct("=")?;
            let t = cur.number()? as usize;
            cur.expect_punct(",")?;
            cur.expect_ident("period")?;
            cur.expect_punct("=")?;
            let p = cur.number()? as usize;
            cur.expect_punct(",")?;
            cur.expect_ident("prefix")?;
            cur.expect_punct("=")?;
            let prefix = parse_bits(cur)?;
            cur.expect_punct(",")?;
            cur.expect_ident("block")?;
            cur.expect_punct("=")?;
            let block = parse_bits(cur)?;
            cur.expect_punct(")")?;
            UpSet::from_bits(t, p, prefix, block).map_err(invalid)
        }
        "cl" | "clminus" | "comp" | "gpre" => {
            cur.expect_punct("(")?;
            let inner = parse_expr(cur)?;
            cur.expect_punct(")")?;
            Ok(match name.as_str() {
                "cl" => inner.closure(),
                "clminus" => inner.cl_minus(),
                "comp" => inner.companion_image(),
                _ => inner.gamma_preimage(),
            })
        }
        other => Err(SyntaxError::new(pos, format!("unknown set constructor `{other}`")).into()),
    }
}
