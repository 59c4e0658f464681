use thiserror::Error;

use super::{Iri, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

/// Parses the N-Triples subset: `<s> <p> (<o> | "literal") .` per line.
///
/// Blank lines and lines whose first non-blank character is `#` are skipped.
/// Triples come back in input order.
pub fn parse_ntriples(text: &str) -> Result<Vec<Triple>, ParseError> {
    let mut out = Vec::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw).trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let triple = LineParser { rest: line }.statement().map_err(|reason| ParseError {
            line: idx + 1,
            reason,
        })?;
        out.push(triple);
    }
    Ok(out)
}

/// Writes one `<s> <p> <o> .` line per triple; the inverse of [`parse_ntriples`].
pub fn serialize_ntriples<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> String {
    let mut out = String::new();
    for t in triples {
        out.push('<');
        out.push_str(t.subject.as_str());
        out.push_str("> <");
        out.push_str(t.predicate.as_str());
        out.push_str("> ");
        match &t.object {
            Term::Iri(iri) => {
                out.push('<');
                out.push_str(iri.as_str());
                out.push('>');
            }
            Term::Literal(s) => {
                out.push('"');
                out.push_str(&escape_literal(s));
                out.push('"');
            }
        }
        out.push_str(" .\n");
    }
    out
}

pub(crate) fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

struct LineParser<'a> {
    rest: &'a str,
}

impl LineParser<'_> {
    fn statement(&mut self) -> Result<Triple, String> {
        let subject = self.iri_ref("subject")?;
        self.require_ws()?;
        let predicate = self.iri_ref("predicate")?;
        self.require_ws()?;
        let object = match self.rest.chars().next() {
            Some('<') => Term::Iri(self.iri_ref("object")?),
            Some('"') => Term::Literal(self.literal()?),
            Some('.') | None => return Err("missing object".into()),
            Some(c) => return Err(format!("unexpected {c:?} at start of object")),
        };
        self.rest = self.rest.trim_start();
        match self.rest.strip_prefix('.') {
            Some(tail) if tail.trim().is_empty() => Ok(Triple {
                subject,
                predicate,
                object,
            }),
            Some(_) => Err("trailing characters after '.'".into()),
            None => Err("missing terminal '.'".into()),
        }
    }

    fn require_ws(&mut self) -> Result<(), String> {
        let trimmed = self.rest.trim_start();
        if trimmed.len() == self.rest.len() {
            return Err(if trimmed.is_empty() {
                "unexpected end of line".into()
            } else {
                "expected whitespace between terms".into()
            });
        }
        self.rest = trimmed;
        Ok(())
    }

    fn iri_ref(&mut self, what: &str) -> Result<Iri, String> {
        let Some(body) = self.rest.strip_prefix('<') else {
            return Err(if self.rest.is_empty() {
                format!("missing {what}")
            } else {
                format!("expected '<' to open {what} IRI")
            });
        };
        let Some(end) = body.find('>') else {
            return Err(format!("unterminated {what} IRI"));
        };
        let iri = Iri::new(&body[..end]).map_err(|e| format!("malformed {what} IRI: {e}"))?;
        self.rest = &body[end + 1..];
        Ok(iri)
    }

    fn literal(&mut self) -> Result<String, String> {
        let body = &self.rest[1..];
        let mut value = String::new();
        let mut chars = body.char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.rest = &body[i + 1..];
                    return Ok(value);
                }
                '\\' => {
                    let Some((_, esc)) = chars.next() else {
                        break;
                    };
                    match esc {
                        't' => value.push('\t'),
                        'b' => value.push('\u{8}'),
                        'n' => value.push('\n'),
                        'r' => value.push('\r'),
                        'f' => value.push('\u{c}'),
                        '"' => value.push('"'),
                        '\'' => value.push('\''),
                        '\\' => value.push('\\'),
                        'u' | 'U' => {
                            let width = if esc == 'u' { 4 } else { 8 };
                            let hex: String = chars.by_ref().take(width).map(|(_, h)| h).collect();
                            let decoded = (hex.len() == width)
                                .then(|| u32::from_str_radix(&hex, 16).ok())
                                .flatten()
                                .and_then(char::from_u32)
                                .ok_or_else(|| format!("invalid \\{esc} escape"))?;
                            value.push(decoded);
                        }
                        other => return Err(format!("unknown escape \\{other}")),
                    }
                }
                c => value.push(c),
            }
        }
        Err("unterminated literal".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    #[test]
    fn literal_object() {
        let ts = parse_ntriples(r#"<http://x/a> <http://x/p> "v" ."#).unwrap();
        assert_eq!(ts, vec![Triple::new(iri("http://x/a"), iri("http://x/p"), Term::literal("v"))]);
    }

    #[test]
    fn empty_input() {
        assert!(parse_ntriples("").unwrap().is_empty());
        assert_eq!(serialize_ntriples(&[]), "");
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header\n\n  <http://x/a> <http://x/p> <http://x/b> .\n   # indented comment\n";
        assert_eq!(parse_ntriples(text).unwrap().len(), 1);
    }

    #[test]
    fn missing_object() {
        let err = parse_ntriples("<http://x/a> <http://x/p>").unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn error_line_numbers() {
        let text = "<http://x/a> <http://x/p> <http://x/b> .\n\n<http://x/a> <http://x/p> \"open .\n";
        let err = parse_ntriples(text).unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.reason.contains("unterminated literal"), "{err}");
    }

    #[test]
    fn missing_dot_and_bad_iri() {
        assert!(parse_ntriples("<http://x/a> <http://x/p> <http://x/b>").unwrap_err().reason.contains("'.'"));
        assert!(parse_ntriples("<nope> <http://x/p> <http://x/b> .").unwrap_err().reason.contains("malformed"));
        assert!(parse_ntriples("<http://x/a><http://x/p> <http://x/b> .").is_err());
        assert!(parse_ntriples("<http://x/a> <http://x/p> <http://x/b> . junk").is_err());
    }

    #[test]
    fn iri_object_line_shape() {
        let t = Triple::new(iri("http://x/a"), iri("http://x/p"), iri("http://x/b"));
        let text = serialize_ntriples(std::slice::from_ref(&t));
        assert_eq!(text, "<http://x/a> <http://x/p> <http://x/b> .\n");
        assert!(text.ends_with(" .\n"));
    }

    #[test]
    fn quote_is_escaped() {
        let t = Triple::new(iri("http://x/a"), iri("http://x/p"), Term::literal("a \"b\" \\ c\nd"));
        let text = serialize_ntriples(std::slice::from_ref(&t));
        assert!(text.contains(r#"\"b\""#));
        assert_eq!(parse_ntriples(&text).unwrap(), vec![t]);
    }

    #[test]
    fn unicode_escapes() {
        let ts = parse_ntriples(r#"<http://x/a> <http://x/p> "café \U0001F600" ."#).unwrap();
        assert_eq!(ts[0].object, Term::literal("café 😀"));
        assert!(parse_ntriples(r#"<http://x/a> <http://x/p> "\u00G9" ."#).is_err());
        assert!(parse_ntriples(r#"<http://x/a> <http://x/p> "\q" ."#).is_err());
    }
}
