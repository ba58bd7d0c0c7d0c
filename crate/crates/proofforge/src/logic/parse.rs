//! Theory text format: one axiom per line, `#` starts a comment.
//!
//! ```text
//! axiom   := concept "<=" concept
//! concept := conj
//! conj    := primary ("and" primary)*        # left-associative
//! primary := "top" | NAME | "(" conj ")" | ("ex" | "all") role "." primary
//! role    := NAME | "inv" "(" NAME ")"
//! NAME    := [A-Za-z][A-Za-z0-9_]*
//! ```
//!
//! A conjunction under a quantifier needs parentheses: `ex r. A and B`
//! parses as `(ex r. A) and B`.

use thiserror::Error;

use super::{Concept, Dialect, Gci, Role, Theory};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("dialect error at {line}:{col}: {msg}")]
    Dialect { line: usize, col: usize, msg: String },
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Leq,
    LParen,
    RParen,
    Dot,
    Newline,
    Eof,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer { src, pos: 0, line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.src[self.pos..].chars().next()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn next_token(&mut self) -> Result<Spanned, ParseError> {
        loop {
            match self.peek() {
                Some(c) if c == ' ' || c == '\t' || c == '\r' => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
        let (line, col) = (self.line, self.col);
        let spanned = |tok| Spanned { tok, line, col };
        match self.peek() {
            None => Ok(spanned(Tok::Eof)),
            Some('\n') => {
                self.bump();
                Ok(spanned(Tok::Newline))
            }
            Some('(') => {
                self.bump();
                Ok(spanned(Tok::LParen))
            }
            Some(')') => {
                self.bump();
                Ok(spanned(Tok::RParen))
            }
            Some('.') => {
                self.bump();
                Ok(spanned(Tok::Dot))
            }
            Some('<') => {
                self.bump();
                if self.peek() == Some('=') {
                    self.bump();
                    Ok(spanned(Tok::Leq))
                } else {
                    Err(ParseError::Syntax { line, col, msg: "expected '<='".into() })
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Ok(spanned(Tok::Name(name)))
            }
            Some(c) => Err(ParseError::Syntax {
                line,
                col,
                msg: format!("unexpected character {c:?}"),
            }),
        }
    }
}

struct Parser {
    toks: Vec<Spanned>,
    idx: usize,
}

impl Parser {
    fn tokenize(src: &str) -> Result<Parser, ParseError> {
        let mut lx = Lexer::new(src);
        let mut toks = Vec::new();
        loop {
            let t = lx.next_token()?;
            let done = t.tok == Tok::Eof;
            toks.push(t);
            if done {
                break;
            }
        }
        Ok(Parser { toks, idx: 0 })
    }

    fn peek(&self) -> &Spanned {
        &self.toks[self.idx]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.idx].clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::Syntax { line: t.line, col: t.col, msg: msg.into() }
    }

    fn expect_name(&mut self) -> Result<String, ParseError> {
        match self.bump().tok {
            Tok::Name(n) => Ok(n),
            other => Err(self.err(format!("expected a name, found {other:?}"))),
        }
    }

    fn role(&mut self) -> Result<Role, ParseError> {
        let name = self.expect_name()?;
        if name == "inv" && self.peek().tok == Tok::LParen {
            self.bump();
            let inner = self.expect_name()?;
            if self.bump().tok != Tok::RParen {
                return Err(self.err("expected ')' after inverse role"));
            }
            Ok(Role::inverse_of(inner))
        } else {
            Ok(Role::plain(name))
        }
    }

    fn primary(&mut self) -> Result<Concept, ParseError> {
        match self.bump().tok {
            Tok::LParen => {
                let c = self.conjunction()?;
                if self.bump().tok != Tok::RParen {
                    return Err(self.err("expected ')'"));
                }
                Ok(c)
            }
            Tok::Name(n) if n == "top" => Ok(Concept::Top),
            Tok::Name(n) if n == "ex" || n == "all" => {
                let role = self.role()?;
                if self.bump().tok != Tok::Dot {
                    return Err(self.err("expected '.' after role"));
                }
                let inner = self.primary()?;
                if n == "ex" {
                    Ok(Concept::exists(role, inner))
                } else {
                    Ok(Concept::forall(role, inner))
                }
            }
            Tok::Name(n) if n == "and" || n == "inv" => {
                Err(self.err(format!("keyword {n:?} cannot start a concept")))
            }
            Tok::Name(n) => Ok(Concept::Name(n)),
            other => Err(self.err(format!("expected a concept, found {other:?}"))),
        }
    }

    fn conjunction(&mut self) -> Result<Concept, ParseError> {
        let mut parts = vec![self.primary()?];
        while matches!(&self.peek().tok, Tok::Name(n) if n == "and") {
            self.bump();
            parts.push(self.primary()?);
        }
        Ok(Concept::and(parts))
    }

    fn gci(&mut self) -> Result<Gci, ParseError> {
        let lhs = self.conjunction()?;
        if self.bump().tok != Tok::Leq {
            return Err(self.err("expected '<=' between concepts"));
        }
        let rhs = self.conjunction()?;
        Ok(Gci::new(lhs, rhs))
    }
}

/// Parses a theory, inferring the dialect: ELI when an inverse role or a
/// value restriction occurs, EL otherwise.
pub fn parse_theory(src: &str) -> Result<Theory, ParseError> {
    parse_impl(src, None)
}

/// Parses a theory against a declared dialect. In an EL-declared file an
/// inverse role or a value restriction is a dialect error.
pub fn parse_theory_with_dialect(src: &str, dialect: Dialect) -> Result<Theory, ParseError> {
    parse_impl(src, Some(dialect))
}

fn parse_impl(src: &str, declared: Option<Dialect>) -> Result<Theory, ParseError> {
    let mut p = Parser::tokenize(src)?;
    let mut axioms = Vec::new();
    loop {
        match &p.peek().tok {
            Tok::Eof => break,
            Tok::Newline => {
                p.bump();
            }
            _ => {
                let at = (p.peek().line, p.peek().col);
                let gci = p.gci()?;
                match &p.peek().tok {
                    Tok::Newline | Tok::Eof => {}
                    _ => return Err(p.err("expected end of line after axiom")),
                }
                if declared == Some(Dialect::El)
                    && (gci.lhs.contains_inverse_or_forall() || gci.rhs.contains_inverse_or_forall())
                {
                    return Err(ParseError::Dialect {
                        line: at.0,
                        col: at.1,
                        msg: "inverse roles and value restrictions are not EL".into(),
                    });
                }
                axioms.push(gci);
            }
        }
    }
    let dialect = declared.unwrap_or_else(|| {
        let eli = axioms
            .iter()
            .any(|g| g.lhs.contains_inverse_or_forall() || g.rhs.contains_inverse_or_forall());
        if eli {
            Dialect::Eli
        } else {
            Dialect::El
        }
    });
    Ok(Theory::new(dialect, axioms))
}

/// Parses a single inclusion axiom, e.g. a goal sentence.
pub fn parse_gci(src: &str) -> Result<Gci, ParseError> {
    let mut p = Parser::tokenize(src)?;
    while p.peek().tok == Tok::Newline {
        p.bump();
    }
    let g = p.gci()?;
    loop {
        match &p.peek().tok {
            Tok::Eof => return Ok(g),
            Tok::Newline => {
                p.bump();
            }
            _ => return Err(p.err("trailing input after axiom")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_figure_theory() {
        let t = parse_theory("A <= B\nB <= ex r. A").unwrap();
        assert_eq!(t.axioms.len(), 2);
        assert_eq!(t.dialect, Dialect::El);
        assert_eq!(
            t.axioms[1],
            Gci::new(
                Concept::name("B"),
                Concept::exists(Role::plain("r"), Concept::name("A"))
            )
        );
    }

    #[test]
    fn parses_top() {
        let t = parse_theory("A <= top").unwrap();
        assert_eq!(t.axioms[0], Gci::new(Concept::name("A"), Concept::Top));
    }

    #[test]
    fn rejects_inverse_in_el_file() {
        let err = parse_theory_with_dialect("A <= ex inv(r). B", Dialect::El).unwrap_err();
        assert!(matches!(err, ParseError::Dialect { .. }));
    }

    #[test]
    fn infers_eli_for_inverse() {
        let t = parse_theory("A <= ex inv(r). B").unwrap();
        assert_eq!(t.dialect, Dialect::Eli);
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_theory("A <= B\nB < C").unwrap_err();
        match err {
            ParseError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn and_is_left_associative_and_quantifier_binds_tight() {
        let g = parse_gci("A <= ex r. A and B").unwrap();
        // (ex r. A) and B
        assert_eq!(
            g.rhs,
            Concept::and([
                Concept::exists(Role::plain("r"), Concept::name("A")),
                Concept::name("B"),
            ])
        );
        let g = parse_gci("A <= ex r. (A and B)").unwrap();
        assert_eq!(
            g.rhs,
            Concept::exists(
                Role::plain("r"),
                Concept::and([Concept::name("A"), Concept::name("B")])
            )
        );
    }

    #[test]
    fn comments_and_blank_lines() {
        let t = parse_theory("# header\n\nA <= B # trailing\n").unwrap();
        assert_eq!(t.axioms.len(), 1);
    }

    #[test]
    fn print_parse_round_trip() {
        let t = parse_theory("A <= (B and ex r. (A and top))\nex s. A <= all inv(r). B").unwrap();
        let printed = t.print();
        let back = parse_theory(&printed).unwrap();
        assert_eq!(t, back);
    }
}
