//! Single-pattern query grammar:
//!
//! ```text
//! ('PREFIX' NAME ':' IRIREF)* 'SELECT' '*' 'WHERE' '{' TERM TERM TERM '.'? '}'
//! TERM := IRIREF | NAME ':' LOCAL | '?' NAME | LITERAL
//! ```
//!
//! Keywords are case-insensitive, `#` starts a comment, and whitespace may
//! separate a prefix from its local name (`Politics: labour`).

use std::collections::HashMap;

use thiserror::Error;

use super::Pattern;
use crate::rdf::{Iri, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("query parse error at byte {position}: {reason}")]
    Parse { position: usize, reason: String },
    #[error("unknown prefix {prefix:?} at byte {position}")]
    UnknownPrefix { prefix: String, position: usize },
}

enum Slot {
    Var,
    Iri(Iri),
    Literal(String),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    prefixes: HashMap<String, String>,
}

pub fn parse_query(text: &str) -> Result<Pattern, QueryError> {
    let mut p = Parser { src: text, pos: 0, prefixes: HashMap::new() };
    p.query()
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.')
}

impl<'a> Parser<'a> {
    fn fail<T>(&self, reason: impl Into<String>) -> Result<T, QueryError> {
        Err(QueryError::Parse { position: self.pos, reason: reason.into() })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => return,
            }
        }
    }

    fn word(&mut self) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !is_name_char(c) {
                break;
            }
            self.bump();
        }
        &self.src[start..self.pos]
    }

    fn keyword(&mut self, kw: &str) -> Result<(), QueryError> {
        self.skip_ws();
        let save = self.pos;
        let w = self.word();
        if w.eq_ignore_ascii_case(kw) {
            Ok(())
        } else {
            self.pos = save;
            self.fail(format!("expected {kw}"))
        }
    }

    fn punct(&mut self, c: char) -> Result<(), QueryError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("expected '{c}'"))
        }
    }

    fn at_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let save = self.pos;
        let hit = self.word().eq_ignore_ascii_case(kw);
        self.pos = save;
        hit
    }

    fn query(&mut self) -> Result<Pattern, QueryError> {
        while self.at_keyword("PREFIX") {
            self.keyword("PREFIX")?;
            self.skip_ws();
            let name = self.word().to_string();
            if self.peek() != Some(':') {
                return self.fail("expected ':' after prefix name");
            }
            self.bump();
            self.skip_ws();
            let iri = self.iri_ref()?;
            self.prefixes.insert(name, iri.as_str().to_string());
        }
        self.keyword("SELECT")?;
        self.punct('*')?;
        self.keyword("WHERE")?;
        self.punct('{')?;
        let s_pos = self.after_ws();
        let s = self.term()?;
        let p_pos = self.after_ws();
        let p = self.term()?;
        let o = self.term()?;
        self.skip_ws();
        if self.peek() == Some('.') {
            self.bump();
        }
        self.punct('}')?;
        self.skip_ws();
        if self.pos < self.src.len() {
            return self.fail("unexpected text after '}'");
        }
        let subject = match s {
            Slot::Var => None,
            Slot::Iri(i) => Some(i),
            Slot::Literal(_) => {
                return Err(QueryError::Parse { position: s_pos, reason: "subject cannot be a literal".into() });
            }
        };
        let predicate = match p {
            Slot::Var => None,
            Slot::Iri(i) => Some(i),
            Slot::Literal(_) => {
                return Err(QueryError::Parse { position: p_pos, reason: "predicate cannot be a literal".into() });
            }
        };
        let object = match o {
            Slot::Var => None,
            Slot::Iri(i) => Some(Term::Iri(i)),
            Slot::Literal(l) => Some(Term::Literal(l)),
        };
        Ok(Pattern { subject, predicate, object })
    }

    fn after_ws(&mut self) -> usize {
        self.skip_ws();
        self.pos
    }

    fn term(&mut self) -> Result<Slot, QueryError> {
        self.skip_ws();
        match self.peek() {
            Some('<') => Ok(Slot::Iri(self.iri_ref()?)),
            Some('?') | Some('$') => {
                self.bump();
                if self.word().is_empty() {
                    return self.fail("expected variable name");
                }
                Ok(Slot::Var)
            }
            Some('"') => Ok(Slot::Literal(self.literal()?)),
            Some(c) if is_name_start(c) || c == ':' => self.prefixed_name().map(Slot::Iri),
            Some('}') => self.fail("expected three terms in the pattern"),
            Some(c) => self.fail(format!("unexpected character {c:?}")),
            None => self.fail("unexpected end of query"),
        }
    }

    fn iri_ref(&mut self) -> Result<Iri, QueryError> {
        let start = self.pos;
        if self.bump() != Some('<') {
            self.pos = start;
            return self.fail("expected '<'");
        }
        let Some(len) = self.rest().find('>') else {
            return self.fail("unterminated IRI");
        };
        let body = &self.rest()[..len];
        match Iri::new(body) {
            Ok(iri) => {
                self.pos += len + 1;
                Ok(iri)
            }
            Err(e) => Err(QueryError::Parse { position: start, reason: e.to_string() }),
        }
    }

    fn prefixed_name(&mut self) -> Result<Iri, QueryError> {
        let start = self.pos;
        let prefix = self.word();
        if self.peek() != Some(':') {
            self.pos = start;
            return self.fail("expected a prefixed name, IRI, variable or literal");
        }
        self.bump();
        let Some(ns) = self.prefixes.get(prefix).cloned() else {
            return Err(QueryError::UnknownPrefix { prefix: prefix.to_string(), position: start });
        };
        let save = self.pos;
        self.skip_ws();
        let local = match self.peek() {
            Some(c) if is_name_start(c) || c.is_ascii_digit() => self.word(),
            _ => {
                self.pos = save;
                ""
            }
        };
        Iri::new(format!("{ns}{local}"))
            .map_err(|e| QueryError::Parse { position: start, reason: e.to_string() })
    }

    fn literal(&mut self) -> Result<String, QueryError> {
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return self.fail("unterminated literal"),
                Some('"') => return Ok(out),
                Some('\\') => {
                    let c = match self.bump() {
                        Some('n') => '\n',
                        Some('t') => '\t',
                        Some('r') => '\r',
                        Some(c @ ('"' | '\\' | '\'')) => c,
                        _ => return self.fail("bad escape in literal"),
                    };
                    out.push(c);
                }
                Some(c) => out.push(c),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::vocab;

    const LABOUR: &str = "PREFIX Politics: <http://www.semanticweb.org/ontologies/Politics.owl#>\nSELECT *\nWHERE { Politics: labour ?b ?c}";

    #[test]
    fn labour_query() {
        let p = parse_query(LABOUR).unwrap();
        assert_eq!(p.subject.unwrap().as_str(), "http://www.semanticweb.org/ontologies/Politics.owl#labour");
        assert!(p.predicate.is_none() && p.object.is_none());
    }

    #[test]
    fn all_wildcards() {
        assert_eq!(parse_query("SELECT * WHERE { ?s ?p ?o }").unwrap(), Pattern::default());
        assert_eq!(parse_query("select * where { ?s ?p ?o . }").unwrap(), Pattern::default());
    }

    #[test]
    fn arity_enforced() {
        match parse_query("SELECT * WHERE { ?s ?p }") {
            Err(QueryError::Parse { position, .. }) => assert_eq!(position, 23),
            other => panic!("{other:?}"),
        }
        assert!(parse_query("SELECT * WHERE { ?s ?p ?o ?x }").is_err());
    }

    #[test]
    fn constants() {
        let q = "PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> SELECT * WHERE { <http://a/x> rdf:type \"a \\\"b\\\"\" }";
        let p = parse_query(q).unwrap();
        assert_eq!(p.predicate.unwrap().as_str(), vocab::RDF_TYPE);
        assert_eq!(p.object.unwrap(), Term::literal("a \"b\""));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_query("SELECT * WHERE { foo:x ?p ?o }"),
            Err(QueryError::UnknownPrefix { ref prefix, position: 17 }) if prefix == "foo"
        ));
        assert!(matches!(parse_query("SELECT * WHERE { \"lit\" ?p ?o }"), Err(QueryError::Parse { position: 17, .. })));
        assert!(parse_query("SELECT WHERE { ?s ?p ?o }").is_err());
        assert!(parse_query("SELECT * WHERE { ?s ?p ?o } trailing").is_err());
        assert!(parse_query("SELECT * WHERE { <bad iri> ?p ?o }").is_err());
        assert!(parse_query("").is_err());
    }

    #[test]
    fn comments_ignored() {
        assert!(parse_query("# describe\nSELECT * WHERE { ?s ?p ?o } # done").is_ok());
    }
}
