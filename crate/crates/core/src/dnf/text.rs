//! DNF text form: terms separated by `|`, literals `+i.t` / `-i.t` (1-based).
//! The constant-1 term is written `1` and the empty DNF `0`.

use super::{Dnf, DnfError, Term};
use crate::point::{Var, MAX_ELL};

pub(super) fn serialize_term(t: &Term) -> String {
    let lits = t.literals();
    if lits.is_empty() {
        return "1".to_string();
    }
    lits.iter()
        .map(|(v, positive)| format!("{}{}", if *positive { '+' } else { '-' }, v))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn serialize_dnf(f: &Dnf) -> String {
    if f.terms().is_empty() {
        return "0".to_string();
    }
    f.terms()
        .iter()
        .map(serialize_term)
        .collect::<Vec<_>>()
        .join(" | ")
}

pub(super) fn parse_var(s: &str, at: usize) -> Result<Var, DnfError> {
    let syntax = |msg: String| DnfError::Syntax { pos: at, msg };
    let (i, t) = s
        .split_once('.')
        .ok_or_else(|| syntax(format!("expected i.t, found {s:?}")))?;
    let i: usize = i
        .parse()
        .map_err(|_| syntax(format!("bad block index {i:?}")))?;
    let t: usize = t
        .parse()
        .map_err(|_| syntax(format!("bad position {t:?}")))?;
    if i == 0 || t == 0 {
        return Err(syntax("indices are 1-based".into()));
    }
    if t > MAX_ELL {
        return Err(syntax(format!("position {t} exceeds {MAX_ELL}")));
    }
    Ok(Var::new(i - 1, t - 1))
}

fn parse_term(piece: &str, base: usize) -> Result<Term, DnfError> {
    let trimmed = piece.trim();
    if trimmed.is_empty() {
        return Err(DnfError::Syntax {
            pos: base,
            msg: "empty term (write 1 for the constant-1 term)".into(),
        });
    }
    if trimmed == "1" {
        return Ok(Term::one());
    }
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut cursor = 0;
    for tok in piece.split_whitespace() {
        let at = base + cursor + piece[cursor..].find(tok).unwrap();
        cursor = at - base + tok.len();
        let sign = tok.chars().next().unwrap();
        let rest = &tok[sign.len_utf8()..];
        let (mine, other) = match sign {
            '+' => (&mut pos, &neg),
            '-' => (&mut neg, &pos),
            _ => {
                return Err(DnfError::Syntax {
                    pos: at,
                    msg: format!("literal must start with + or -, found {tok:?}"),
                })
            }
        };
        let var = parse_var(rest, at + 1)?;
        if other.contains(&var) {
            return Err(DnfError::ContradictoryAt { pos: at, var });
        }
        mine.push(var);
    }
    Term::new(&pos, &neg)
}

pub fn parse_dnf(text: &str) -> Result<Dnf, DnfError> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed == "0" {
        return Ok(Dnf::empty());
    }
    let mut terms = Vec::new();
    let mut base = 0;
    for piece in text.split('|') {
        terms.push(parse_term(piece, base)?);
        base += piece.len() + 1;
    }
    Ok(Dnf::new(terms))
}
