//! Problem expressions: a small DSL naming graph classes and combinators.
//!
//! ```text
//! expr := atom | and(expr,+) | or(expr,+) | vertpart(expr,+)
//!       | edgepart(expr,+) | graphpart(INT; expr,+)
//! atom := any | edgeless | atmost(INT) | tree | forest
//! ```

use std::fmt;

use crate::base::{any_core, bounded_size_core, edgeless_core, forest_core, tree_core};
use crate::combinators::{
    edgepart_core, graphpart_core, intersection_core, union_core, vertpart_core, BoxedCore,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProblemExpr {
    Any,
    Edgeless,
    AtMost(u32),
    Tree,
    Forest,
    And(Vec<ProblemExpr>),
    Or(Vec<ProblemExpr>),
    VertPart(Vec<ProblemExpr>),
    EdgePart(Vec<ProblemExpr>),
    GraphPart(u32, Vec<ProblemExpr>),
}

impl ProblemExpr {
    /// True for expressions without partition combinators.
    pub fn is_boolean(&self) -> bool {
        match self {
            ProblemExpr::And(xs) | ProblemExpr::Or(xs) => xs.iter().all(ProblemExpr::is_boolean),
            ProblemExpr::VertPart(_) | ProblemExpr::EdgePart(_) | ProblemExpr::GraphPart(..) => false,
            _ => true,
        }
    }

    /// Builds the dynamic core deciding this expression.
    pub fn to_core(&self) -> Result<BoxedCore> {
        let all = |xs: &[ProblemExpr]| xs.iter().map(ProblemExpr::to_core).collect::<Result<Vec<_>>>();
        Ok(match self {
            ProblemExpr::Any => Box::new(any_core()),
            ProblemExpr::Edgeless => Box::new(edgeless_core()),
            ProblemExpr::AtMost(p) => Box::new(bounded_size_core(*p)),
            ProblemExpr::Tree => Box::new(tree_core()),
            ProblemExpr::Forest => Box::new(forest_core()),
            ProblemExpr::And(xs) => Box::new(intersection_core(all(xs)?)?),
            ProblemExpr::Or(xs) => Box::new(union_core(all(xs)?)?),
            ProblemExpr::VertPart(xs) => Box::new(vertpart_core(all(xs)?)?),
            ProblemExpr::EdgePart(xs) => Box::new(edgepart_core(all(xs)?)?),
            ProblemExpr::GraphPart(p, xs) => Box::new(graphpart_core(*p, all(xs)?)?),
        })
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, xs: &[ProblemExpr]) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str(")")
}

impl fmt::Display for ProblemExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemExpr::Any => f.write_str("any"),
            ProblemExpr::Edgeless => f.write_str("edgeless"),
            ProblemExpr::AtMost(p) => write!(f, "atmost({p})"),
            ProblemExpr::Tree => f.write_str("tree"),
            ProblemExpr::Forest => f.write_str("forest"),
            ProblemExpr::And(xs) => {
                f.write_str("and(")?;
                write_list(f, xs)
            }
            ProblemExpr::Or(xs) => {
                f.write_str("or(")?;
                write_list(f, xs)
            }
            ProblemExpr::VertPart(xs) => {
                f.write_str("vertpart(")?;
                write_list(f, xs)
            }
            ProblemExpr::EdgePart(xs) => {
                f.write_str("edgepart(")?;
                write_list(f, xs)
            }
            ProblemExpr::GraphPart(p, xs) => {
                write!(f, "graphpart({p};")?;
                write_list(f, xs)
            }
        }
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    text: &'a str,
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        position,
        message: message.into(),
    }
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.text.len(), |c| c.0)
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(syntax(self.offset(), format!("expected '{want}', found '{c}'"))),
            None => Err(syntax(self.offset(), format!("expected '{want}', found end of input"))),
        }
    }

    fn word(&mut self) -> Result<(usize, String)> {
        self.skip_ws();
        let start = self.offset();
        let mut w = String::new();
        while let Some(&(_, c)) = self.chars.get(self.pos) {
            if !c.is_ascii_alphanumeric() && c != '_' {
                break;
            }
            w.push(c);
            self.pos += 1;
        }
        if w.is_empty() {
            return Err(match self.chars.get(self.pos) {
                Some(&(_, c)) => syntax(start, format!("expected a class name, found '{c}'")),
                None => syntax(start, "expected a class name, found end of input"),
            });
        }
        Ok((start, w))
    }

    fn integer(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.offset();
        if self.chars.get(self.pos).is_some_and(|c| c.1 == '-') {
            return Err(syntax(start, "integers must be non-negative"));
        }
        let mut digits = String::new();
        while let Some(&(_, c)) = self.chars.get(self.pos) {
            if !c.is_ascii_digit() {
                break;
            }
            digits.push(c);
            self.pos += 1;
        }
        if digits.is_empty() {
            return Err(syntax(start, "expected an integer"));
        }
        digits
            .parse()
            .map_err(|_| syntax(start, format!("integer {digits} is out of range")))
    }

    fn list(&mut self) -> Result<Vec<ProblemExpr>> {
        let mut xs = vec![self.expr()?];
        while self.peek() == Some(',') {
            self.pos += 1;
            xs.push(self.expr()?);
        }
        self.expect(')')?;
        Ok(xs)
    }

    fn expr(&mut self) -> Result<ProblemExpr> {
        let (start, name) = self.word()?;
        let min_arity = |xs: Vec<ProblemExpr>, k: usize| -> Result<Vec<ProblemExpr>> {
            if xs.len() < k {
                Err(syntax(start, format!("{name} needs at least {k} arguments, got {}", xs.len())))
            } else {
                Ok(xs)
            }
        };
        Ok(match name.as_str() {
            "any" => ProblemExpr::Any,
            "edgeless" => ProblemExpr::Edgeless,
            "tree" => ProblemExpr::Tree,
            "forest" => ProblemExpr::Forest,
            "atmost" => {
                self.expect('(')?;
                let p = self.integer()?;
                self.expect(')')?;
                ProblemExpr::AtMost(p)
            }
            "and" | "or" | "vertpart" | "edgepart" => {
                self.expect('(')?;
                let xs = self.list()?;
                match name.as_str() {
                    "and" => ProblemExpr::And(xs),
                    "or" => ProblemExpr::Or(xs),
                    "vertpart" => ProblemExpr::VertPart(min_arity(xs, 2)?),
                    _ => ProblemExpr::EdgePart(min_arity(xs, 2)?),
                }
            }
            "graphpart" => {
                self.expect('(')?;
                let p = self.integer()?;
                self.expect(';')?;
                let xs = self.list()?;
                ProblemExpr::GraphPart(p, min_arity(xs, 2)?)
            }
            _ => return Err(syntax(start, format!("unknown class '{name}'"))),
        })
    }
}

/// Parses a problem expression. Whitespace is ignored between tokens.
pub fn parse_problem(text: &str) -> Result<ProblemExpr> {
    let mut parser = Parser {
        chars: text.char_indices().collect(),
        pos: 0,
        text,
    };
    let expr = parser.expr()?;
    if let Some(c) = parser.peek() {
        return Err(syntax(parser.offset(), format!("unexpected '{c}' after expression")));
    }
    Ok(expr)
}

/// Named problems: `3col`, `vc=<k>`, `two-trees`, `arb=<l>`.
pub fn preset(name: &str) -> Result<ProblemExpr> {
    let number = |s: &str| -> Result<u32> {
        s.parse()
            .map_err(|_| Error::Config(format!("preset '{name}': '{s}' is not a non-negative integer")))
    };
    if name == "3col" {
        return Ok(ProblemExpr::VertPart(vec![ProblemExpr::Edgeless; 3]));
    }
    if name == "two-trees" {
        return Ok(ProblemExpr::VertPart(vec![ProblemExpr::Tree, ProblemExpr::Tree]));
    }
    if let Some(k) = name.strip_prefix("vc=") {
        return Ok(ProblemExpr::VertPart(vec![ProblemExpr::AtMost(number(k)?), ProblemExpr::Edgeless]));
    }
    if let Some(l) = name.strip_prefix("arb=") {
        let l = number(l)? as usize;
        if l < 2 {
            return Err(Error::Config("preset arb=<l> needs l >= 2".into()));
        }
        return Ok(ProblemExpr::EdgePart(vec![ProblemExpr::Forest; l]));
    }
    Err(Error::Config(format!("unknown preset '{name}'")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_examples() {
        assert_eq!(
            parse_problem("vertpart(edgeless,edgeless,edgeless)").unwrap(),
            ProblemExpr::VertPart(vec![ProblemExpr::Edgeless; 3])
        );
        assert_eq!(
            parse_problem(" graphpart( 2 ; tree , forest ) ").unwrap(),
            ProblemExpr::GraphPart(2, vec![ProblemExpr::Tree, ProblemExpr::Forest])
        );
        assert_eq!(
            parse_problem("and(forest,atmost(2))").unwrap(),
            ProblemExpr::And(vec![ProblemExpr::Forest, ProblemExpr::AtMost(2)])
        );
        assert_eq!(parse_problem("or(any)").unwrap(), ProblemExpr::Or(vec![ProblemExpr::Any]));
    }

    #[test]
    fn rejects_bad_input() {
        let err = |s: &str| match parse_problem(s) {
            Err(Error::Syntax { position, message }) => (position, message),
            other => panic!("{s}: {other:?}"),
        };
        assert!(err("vertpart(tree)").1.contains("at least 2"));
        assert_eq!(err("atmost(-1)").0, 7);
        assert!(err("atmost(-1)").1.contains("non-negative"));
        assert_eq!(err("tree)").0, 4);
        assert_eq!(err("foo").0, 0);
        assert!(err("and()").1.contains("class name"));
        assert!(err("graphpart(2, tree, tree)").1.contains("';'"));
        assert!(err("atmost(99999999999)").1.contains("out of range"));
        assert!(err("").1.contains("end of input"));
    }

    #[test]
    fn presets() {
        assert_eq!(preset("3col").unwrap().to_string(), "vertpart(edgeless,edgeless,edgeless)");
        assert_eq!(preset("vc=4").unwrap().to_string(), "vertpart(atmost(4),edgeless)");
        assert_eq!(preset("two-trees").unwrap().to_string(), "vertpart(tree,tree)");
        assert_eq!(preset("arb=3").unwrap().to_string(), "edgepart(forest,forest,forest)");
        assert!(preset("arb=1").is_err());
        assert!(preset("vc=x").is_err());
        assert!(preset("nope").is_err());
    }

    #[test]
    fn core_names_follow_syntax() {
        let e = parse_problem("graphpart(1; and(tree, atmost(3)), or(edgeless))").unwrap();
        assert_eq!(e.to_core().unwrap().name(), "graphpart(1;and(tree,atmost(3)),or(edgeless))");
    }

    fn arb_expr() -> impl Strategy<Value = ProblemExpr> {
        let leaf = prop_oneof![
            Just(ProblemExpr::Any),
            Just(ProblemExpr::Edgeless),
            Just(ProblemExpr::Tree),
            Just(ProblemExpr::Forest),
            (0u32..10).prop_map(ProblemExpr::AtMost),
        ];
        leaf.prop_recursive(3, 16, 3, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 1..3).prop_map(ProblemExpr::And),
                proptest::collection::vec(inner.clone(), 1..3).prop_map(ProblemExpr::Or),
                proptest::collection::vec(inner.clone(), 2..4).prop_map(ProblemExpr::VertPart),
                proptest::collection::vec(inner.clone(), 2..4).prop_map(ProblemExpr::EdgePart),
                (0u32..5, proptest::collection::vec(inner, 2..4))
                    .prop_map(|(p, xs)| ProblemExpr::GraphPart(p, xs)),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_round_trips(e in arb_expr()) {
            prop_assert_eq!(parse_problem(&e.to_string()).unwrap(), e);
        }
    }
}
