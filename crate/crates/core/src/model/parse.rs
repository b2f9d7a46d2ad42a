//! Recursive-descent parser for the twig pattern text grammar:
//!
//! ```text
//! query := axis node step*
//! step  := axis node
//! axis  := '//' | '/'
//! node  := '$'? tag pred?
//! tag   := '@'? [A-Za-z_][A-Za-z0-9_.-]*
//! pred  := '[' path (' and ' path)* ']'
//! path  := '.'? axis node step*
//! ```

use thiserror::Error;

use super::query::{Axis, NodeSpec, TwigQuery};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("query marks no output node (prefix a tag with '$')")]
    NoOutput,
}

/// Parses a twig query; at least one node must be marked `$`.
pub fn parse_tpq(text: &str) -> Result<TwigQuery, ParseError> {
    let root = parse_spec(text)?;
    TwigQuery::from_spec(root).ok_or(ParseError::NoOutput)
}

/// Parses a twig pattern where output marks are optional.
pub fn parse_pattern(text: &str) -> Result<TwigQuery, ParseError> {
    Ok(TwigQuery::pattern_from_spec(parse_spec(text)?))
}

fn parse_spec(text: &str) -> Result<NodeSpec, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let root = p.path(false)?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(root)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn axis(&mut self) -> Result<Axis, ParseError> {
        if self.peek() != Some(b'/') {
            return Err(self.error("expected '/' or '//'"));
        }
        self.pos += 1;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            Ok(Axis::Ad)
        } else {
            Ok(Axis::Pc)
        }
    }

    /// `'.'? axis node step*`; returns the first node with the rest of the path
    /// hanging below it as a chain of last children.
    fn path(&mut self, in_pred: bool) -> Result<NodeSpec, ParseError> {
        if in_pred && self.peek() == Some(b'.') {
            self.pos += 1;
        }
        let axis = self.axis()?;
        let mut chain = vec![self.node(axis)?];
        while self.peek() == Some(b'/') {
            let axis = self.axis()?;
            chain.push(self.node(axis)?);
        }
        let mut spec = chain.pop().expect("path has at least one node");
        while let Some(mut parent) = chain.pop() {
            parent.children.push(spec);
            spec = parent;
        }
        Ok(spec)
    }

    fn node(&mut self, axis: Axis) -> Result<NodeSpec, ParseError> {
        let is_output = if self.peek() == Some(b'$') {
            self.pos += 1;
            true
        } else {
            false
        };
        let tag = self.tag()?;
        let mut spec = NodeSpec::new(tag, is_output, axis);
        if self.peek() == Some(b'[') {
            self.pos += 1;
            loop {
                self.skip_ws();
                spec.children.push(self.path(true)?);
                self.skip_ws();
                match self.peek() {
                    Some(b']') => {
                        self.pos += 1;
                        break;
                    }
                    Some(b'a') if self.src[self.pos..].starts_with(b"and") => {
                        self.pos += 3;
                        if !matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
                            return Err(self.error("expected whitespace after 'and'"));
                        }
                    }
                    None => return Err(self.error("unclosed predicate")),
                    _ => return Err(self.error("expected 'and' or ']'")),
                }
            }
        }
        Ok(spec)
    }

    fn tag(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        if self.peek() == Some(b'@') {
            self.pos += 1;
        }
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.pos += 1,
            _ => return Err(self.error("expected tag name")),
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || matches!(c, b'_' | b'.' | b'-'))
        {
            self.pos += 1;
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn introduction_query() {
        let q = parse_tpq("//r/$a[./b//$c]//$d[./e and .//f]").unwrap();
        let tags: Vec<_> = q.nodes().iter().map(|n| n.tag.as_str()).collect();
        assert_eq!(tags, ["r", "a", "b", "c", "d", "e", "f"]);
        assert_eq!(q.output_nodes(), vec![1, 3, 4]);
        assert_eq!(q.root_axis(), Axis::Ad);
        assert_eq!(q.children(0), &[1]);
        assert_eq!(q.children(1), &[2, 4]);
        assert_eq!(q.children(2), &[3]);
        assert_eq!(q.children(4), &[5, 6]);
        let axes: Vec<_> = q.nodes().iter().map(|n| n.axis).collect();
        use Axis::*;
        assert_eq!(axes, [Ad, Pc, Pc, Ad, Ad, Pc, Ad]);
    }

    #[test]
    fn single_node() {
        let q = parse_tpq("//$a").unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(q.root_axis(), Axis::Ad);
        assert!(q.is_output(0));
        assert_eq!(parse_tpq("/$a").unwrap().root_axis(), Axis::Pc);
    }

    #[test]
    fn unclosed_predicate() {
        assert!(matches!(
            parse_tpq("//$a[./b"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn errors() {
        assert_eq!(parse_tpq("//a/b"), Err(ParseError::NoOutput));
        assert!(parse_tpq("").is_err());
        assert!(parse_tpq("a").is_err());
        assert!(parse_tpq("//$a]").is_err());
        assert!(parse_tpq("//$1a").is_err());
        assert!(parse_tpq("//$a[./b or ./c]").is_err());
        match parse_tpq("//$a//") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn predicate_without_dot_and_attributes() {
        let a = parse_tpq("//$a[/b and //@id]").unwrap();
        let b = parse_tpq("//$a[./b and .//@id]").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.tag(2), "@id");
    }

    #[test]
    fn render_round_trip() {
        for text in [
            "//r/$a[./b//$c]//$d[./e and .//f]",
            "/$a",
            "//$a//b[./e]//$c",
            "//a[./b[./c and .//d]]/$e",
        ] {
            let q = parse_tpq(text).unwrap();
            assert_eq!(parse_tpq(&q.render()).unwrap(), q, "{text}");
        }
    }
}
