//! Parser for the `.lp` program text format.
//!
//! One rule per line, `head :- lit, ..., lit.` with literals `atom` or
//! `not atom`, facts `head.`, comments from `%` to end of line, and an
//! optional `#alphabet a, b, c.` directive declaring extra atoms. Atoms are
//! `[a-z][A-Za-z0-9_]*` or `[0-9]+`.

use crate::asp::{Alphabet, AspError, Atom, ParseError, Program, Rule};

struct Line<'a> {
    text: &'a [u8],
    line_no: usize,
    pos: usize,
}

impl<'a> Line<'a> {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line_no,
            col: self.pos + 1,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && (self.text[self.pos] as char).is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() {
            let c = self.text[self.pos] as char;
            if c.is_ascii_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        if start == self.pos {
            let found = if self.pos < self.text.len() {
                format!("`{}`", self.text[self.pos] as char)
            } else {
                "end of line".to_string()
            };
            return Err(self.err(format!("expected atom, found {found}")));
        }
        Ok(String::from_utf8_lossy(&self.text[start..self.pos]).into_owned())
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        self.skip_ws();
        let col = self.pos + 1;
        let w = self.word()?;
        Atom::new(&w).map_err(|_| ParseError {
            line: self.line_no,
            col,
            msg: format!("invalid atom name `{w}`"),
        })
    }
}

/// Parses program text. The alphabet is the sorted set of all atoms occurring
/// in rules, plus any atoms declared via `#alphabet`.
pub fn parse_program(text: &str) -> Result<Program, AspError> {
    let mut rules: Vec<Rule> = Vec::new();
    let mut declared: Vec<Atom> = Vec::new();
    let mut saw_directive = false;

    for (idx, raw) in text.lines().enumerate() {
        let content = match raw.find('%') {
            Some(cut) => &raw[..cut],
            None => raw,
        };
        let mut line = Line {
            text: content.as_bytes(),
            line_no: idx + 1,
            pos: 0,
        };
        if line.at_end() {
            continue;
        }
        if line.eat("#alphabet") {
            if saw_directive {
                return Err(line.err("duplicate alphabet declaration").into());
            }
            saw_directive = true;
            loop {
                declared.push(line.atom()?);
                if line.eat(",") {
                    continue;
                }
                break;
            }
            if !line.eat(".") {
                return Err(line.err("expected `.` after alphabet declaration").into());
            }
            if !line.at_end() {
                return Err(line.err("unexpected input after `.`").into());
            }
            continue;
        }
        if line.eat("#") {
            return Err(line.err("unknown directive").into());
        }

        let head = line.atom()?;
        let mut pos_body = Vec::new();
        let mut neg_body = Vec::new();
        if line.eat(":-") {
            loop {
                line.skip_ws();
                if line.eat("not") {
                    // `not` must be a whole word: `notx` is an atom.
                    let next = line.text.get(line.pos).copied().unwrap_or(b' ') as char;
                    if next.is_ascii_alphanumeric() || next == '_' {
                        line.pos -= 3;
                        pos_body.push(line.atom()?);
                    } else {
                        neg_body.push(line.atom()?);
                    }
                } else {
                    pos_body.push(line.atom()?);
                }
                if line.eat(",") {
                    continue;
                }
                break;
            }
        }
        if !line.eat(".") {
            return Err(line.err("expected `.` at end of rule").into());
        }
        if !line.at_end() {
            return Err(line.err("unexpected input after `.`").into());
        }
        rules.push(Rule::new(head, pos_body, neg_body));
    }

    if rules.is_empty() {
        return Err(AspError::NoRules);
    }

    let mut atoms: Vec<Atom> = declared;
    for r in &rules {
        atoms.push(r.head.clone());
        atoms.extend(r.pos_body.iter().cloned());
        atoms.extend(r.neg_body.iter().cloned());
    }
    atoms.sort();
    atoms.dedup();
    Program::new(Alphabet::new(atoms)?, rules)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asp::{canonical_program, CanonicalProgram};

    #[test]
    fn parses_the_choice_pair() {
        let p = parse_program("a :- not b.\nb :- not a.").unwrap();
        assert_eq!(p, canonical_program(CanonicalProgram::ExampleB).unwrap());
    }

    #[test]
    fn parses_reset() {
        let p = parse_program("1 :- not 1.").unwrap();
        assert_eq!(p, canonical_program(CanonicalProgram::Reset).unwrap());
        assert_eq!(p.atom_count(), 1);
    }

    #[test]
    fn parses_a_fact() {
        let p = parse_program("a.").unwrap();
        assert_eq!(p.rules().len(), 1);
        assert!(p.rules()[0].is_fact());
    }

    #[test]
    fn comments_and_blank_lines() {
        let p = parse_program("% a comment\n\na. % trailing\n").unwrap();
        assert_eq!(p.rules().len(), 1);
    }

    #[test]
    fn alphabet_directive_adds_extras() {
        let p = parse_program("#alphabet x, y.\na.").unwrap();
        assert_eq!(p.atom_count(), 3);
        let rendered = p.render();
        assert_eq!(rendered, "#alphabet x, y.\na.\n");
        assert_eq!(parse_program(&rendered).unwrap(), p);
    }

    #[test]
    fn duplicate_directive_rejected() {
        let err = parse_program("#alphabet x.\n#alphabet y.\na.").unwrap_err();
        assert!(err.to_string().contains("duplicate alphabet declaration"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_program("a :- b\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 1"), "{msg}");
        assert!(msg.contains("expected `.`"), "{msg}");

        let err = parse_program("a.\nb :- Not c.").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn empty_program_rejected() {
        assert!(matches!(
            parse_program("% nothing\n"),
            Err(AspError::NoRules)
        ));
    }

    #[test]
    fn not_is_reserved_but_prefixes_are_atoms() {
        let p = parse_program("a :- notx.").unwrap();
        assert_eq!(p.rules()[0].pos_body[0].as_str(), "notx");
        assert!(parse_program("not.").is_err());
    }

    #[test]
    fn duplicate_body_literals_deduplicated() {
        let p = parse_program("a :- b, b, not c, not c.").unwrap();
        assert_eq!(p.rules()[0].pos_body.len(), 1);
        assert_eq!(p.rules()[0].neg_body.len(), 1);
    }

    #[test]
    fn round_trip_canonical_programs() {
        for kind in [
            CanonicalProgram::Reset,
            CanonicalProgram::Standard(2),
            CanonicalProgram::Standard(5),
            CanonicalProgram::Tn(2),
            CanonicalProgram::Elevator,
            CanonicalProgram::Facts(3),
            CanonicalProgram::ExampleB,
            CanonicalProgram::ExampleC,
            CanonicalProgram::ExampleCPrime,
        ] {
            let p = canonical_program(kind).unwrap();
            assert_eq!(parse_program(&p.render()).unwrap(), p, "{kind:?}");
        }
    }
}
