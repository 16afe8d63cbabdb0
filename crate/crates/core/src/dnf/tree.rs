use std::fmt;

use super::text::parse_var;
use super::{Dnf, DnfError, Term};
use crate::point::{LiftedPoint, Var};

/// Binary decision tree; text form `(i.t? subtree0 : subtree1)` with leaves `0`/`1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DecisionTree {
    Leaf(bool),
    Node {
        var: Var,
        zero: Box<DecisionTree>,
        one: Box<DecisionTree>,
    },
}

impl DecisionTree {
    pub fn node(var: Var, zero: DecisionTree, one: DecisionTree) -> Self {
        DecisionTree::Node {
            var,
            zero: Box::new(zero),
            one: Box::new(one),
        }
    }

    /// Number of leaves.
    pub fn size(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 1,
            DecisionTree::Node { zero, one, .. } => zero.size() + one.size(),
        }
    }

    pub fn eval(&self, y: &LiftedPoint) -> bool {
        match self {
            DecisionTree::Leaf(b) => *b,
            DecisionTree::Node { var, zero, one } => {
                if y.bit(*var) {
                    one.eval(y)
                } else {
                    zero.eval(y)
                }
            }
        }
    }

    /// Rejects trees testing a variable twice on one path.
    pub fn validate(&self) -> Result<(), DnfError> {
        fn walk(t: &DecisionTree, path: &mut Vec<Var>) -> Result<(), DnfError> {
            if let DecisionTree::Node { var, zero, one } = t {
                if path.contains(var) {
                    return Err(DnfError::RepeatedPathVar { var: *var });
                }
                path.push(*var);
                walk(zero, path)?;
                walk(one, path)?;
                path.pop();
            }
            Ok(())
        }
        walk(self, &mut Vec::new())
    }

    /// One term per 1-leaf holding the path literals.
    pub fn to_dnf(&self) -> Dnf {
        fn walk(t: &DecisionTree, pos: &mut Vec<Var>, neg: &mut Vec<Var>, out: &mut Dnf) {
            match t {
                DecisionTree::Leaf(true) => {
                    out.push(Term::new(pos, neg).expect("validated tree paths are consistent"))
                }
                DecisionTree::Leaf(false) => {}
                DecisionTree::Node { var, zero, one } => {
                    neg.push(*var);
                    walk(zero, pos, neg, out);
                    neg.pop();
                    pos.push(*var);
                    walk(one, pos, neg, out);
                    pos.pop();
                }
            }
        }
        let mut out = Dnf::empty();
        walk(self, &mut Vec::new(), &mut Vec::new(), &mut out);
        out
    }

    pub fn parse(text: &str) -> Result<DecisionTree, DnfError> {
        let mut p = TreeParser { src: text, at: 0 };
        let t = p.tree()?;
        p.skip_ws();
        if p.at != text.len() {
            return Err(p.err("trailing input"));
        }
        t.validate()?;
        Ok(t)
    }
}

impl fmt::Display for DecisionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecisionTree::Leaf(b) => write!(f, "{}", u8::from(*b)),
            DecisionTree::Node { var, zero, one } => write!(f, "({var}? {zero} : {one})"),
        }
    }
}

struct TreeParser<'a> {
    src: &'a str,
    at: usize,
}

impl TreeParser<'_> {
    fn err(&self, msg: &str) -> DnfError {
        DnfError::Syntax {
            pos: self.at,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.at..];
        self.at += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, c: char) -> Result<(), DnfError> {
        self.skip_ws();
        if self.src[self.at..].starts_with(c) {
            self.at += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(&format!("expected {c:?}")))
        }
    }

    fn tree(&mut self) -> Result<DecisionTree, DnfError> {
        self.skip_ws();
        let rest = &self.src[self.at..];
        if rest.starts_with('0') || rest.starts_with('1') {
            let leaf = rest.starts_with('1');
            self.at += 1;
            return Ok(DecisionTree::Leaf(leaf));
        }
        self.eat('(')?;
        self.skip_ws();
        let start = self.at;
        let len = self.src[start..]
            .find('?')
            .ok_or_else(|| self.err("expected '?' after variable"))?;
        let var = parse_var(self.src[start..start + len].trim(), start)?;
        self.at = start + len + 1;
        let zero = self.tree()?;
        self.eat(':')?;
        let one = self.tree()?;
        self.eat(')')?;
        Ok(DecisionTree::node(var, zero, one))
    }
}

/// One term per satisfying row; row bit `k` is the value of `vars[k]`.
pub fn junta_rows_to_dnf(vars: &[Var], rows: impl IntoIterator<Item = u64>) -> Dnf {
    rows.into_iter()
        .map(|row| {
            let (pos, neg): (Vec<_>, Vec<_>) = vars
                .iter()
                .enumerate()
                .partition(|(k, _)| row >> k & 1 == 1);
            let pos: Vec<Var> = pos.into_iter().map(|(_, v)| *v).collect();
            let neg: Vec<Var> = neg.into_iter().map(|(_, v)| *v).collect();
            Term::new(&pos, &neg).expect("distinct junta variables")
        })
        .collect()
}

/// Full truth table over `vars` (length `2^|vars|`) to DNF.
pub fn junta_to_dnf(vars: &[Var], table: &[bool]) -> Result<Dnf, DnfError> {
    if vars.len() >= 64 || table.len() != 1usize << vars.len() {
        return Err(DnfError::TableSize {
            got: table.len(),
            vars: vars.len(),
        });
    }
    Ok(junta_rows_to_dnf(
        vars,
        table
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(r, _)| r as u64),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: usize, t: usize) -> Var {
        Var::new(i - 1, t - 1)
    }

    #[test]
    fn leaves() {
        assert_eq!(DecisionTree::Leaf(true).to_dnf(), Dnf::constant_one());
        assert_eq!(DecisionTree::Leaf(false).to_dnf(), Dnf::empty());
    }

    #[test]
    fn text_round_trip() {
        let t = DecisionTree::parse("(1.1? 0 : (2.3? 0 : 1))").unwrap();
        assert_eq!(t.size(), 3);
        assert_eq!(t.to_string(), "(1.1? 0 : (2.3? 0 : 1))");
        assert_eq!(DecisionTree::parse(&t.to_string()).unwrap(), t);
        assert_eq!(t.to_dnf().to_string(), "+1.1 +2.3");
        assert!(DecisionTree::parse("(1.1? 0 : 1) x").is_err());
        assert!(DecisionTree::parse("(1.1 0 : 1)").is_err());
        assert_eq!(
            DecisionTree::parse("(1.1? 0 : (1.1? 0 : 1))"),
            Err(DnfError::RepeatedPathVar { var: v(1, 1) })
        );
    }

    #[test]
    fn majority_table_matches_minimal_terms() {
        let vars = [v(1, 1), v(1, 2), v(1, 3)];
        let table: Vec<bool> = (0..8u32).map(|r| r.count_ones() >= 2).collect();
        let f = junta_to_dnf(&vars, &table).unwrap();
        assert_eq!(f.size(), 4);
        let g = Dnf::new(vec![
            Term::positive(&[v(1, 1), v(1, 2)]),
            Term::positive(&[v(1, 1), v(1, 3)]),
            Term::positive(&[v(1, 2), v(1, 3)]),
        ]);
        for b in 0..8u64 {
            let y = LiftedPoint::new(3, vec![b]).unwrap();
            assert_eq!(f.accepts(&y), g.accepts(&y), "{y}");
        }
        assert!(junta_to_dnf(&vars, &table[..7]).is_err());
    }

    #[test]
    fn tree_dnf_agrees_with_tree() {
        let t = DecisionTree::parse("(1.1? (1.2? 0 : 1) : (2.1? 1 : 0))").unwrap();
        let f = t.to_dnf();
        assert_eq!(f.size(), 2);
        assert!(f.size() <= t.size());
        for a in 0..4u64 {
            for b in 0..2u64 {
                let y = LiftedPoint::new(2, vec![a, b]).unwrap();
                assert_eq!(f.accepts(&y), t.eval(&y));
            }
        }
    }
}
