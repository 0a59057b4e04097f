//! Recursive descent over one line at a time.

use super::lexer::{tokenize, Tok, Token};
use super::{Diagnostic, DiagnosticKind, KbDocument, Located, Query, Span, Statement};
use crate::error::CoreError;
use crate::event::{ConjEvent, Literal, Symbol};
use crate::interval::ProbInterval;
use crate::rule::{coupling_holds, BidirRule, IndepStmt, UncertainRule};

/// Parses a whole document. On failure returns every diagnostic found; a
/// syntax error abandons only the rest of its line.
pub fn parse_kb(text: &str) -> Result<KbDocument, Vec<Diagnostic>> {
    let tokens = tokenize(text);
    let mut doc = KbDocument::new();
    let mut diags = Vec::new();
    let mut start = 0;
    while start < tokens.len() {
        let line = tokens[start].span.line;
        let end = start + tokens[start..].iter().take_while(|t| t.span.line == line).count();
        let mut p = LineParser { toks: &tokens[start..end], pos: 0, diags: &mut diags };
        p.statements(&mut doc);
        start = end;
    }
    if diags.is_empty() {
        Ok(doc)
    } else {
        Err(diags)
    }
}

type PResult<T> = Result<T, Diagnostic>;

struct LineParser<'a> {
    toks: &'a [Token],
    pos: usize,
    diags: &'a mut Vec<Diagnostic>,
}

fn syntax(span: Span, message: impl Into<String>) -> Diagnostic {
    Diagnostic { kind: DiagnosticKind::Syntax, span, message: message.into() }
}

fn cover(a: Span, b: Span) -> Span {
    debug_assert_eq!(a.line, b.line);
    Span { line: a.line, column: a.column, len: b.column + b.len - a.column }
}

fn semantic(err: CoreError, span: Span) -> Diagnostic {
    let kind = match err {
        CoreError::OutOfRange { .. } => DiagnosticKind::Range,
        CoreError::IntervalOrder { .. } => DiagnosticKind::IntervalOrder,
        CoreError::Coupling { .. } => DiagnosticKind::Coupling,
        CoreError::Contradiction(_) => DiagnosticKind::Contradiction,
        CoreError::OverlappingEvents { .. } => DiagnosticKind::Overlap,
        CoreError::EmptyEvent | CoreError::InvalidSymbol(_) => DiagnosticKind::Syntax,
    };
    Diagnostic { kind, span, message: err.to_string() }
}

impl<'a> LineParser<'a> {
    /// A statement optionally followed by a comment, or a lone comment.
    fn statements(&mut self, doc: &mut KbDocument) {
        if let Some(Token { tok: Tok::Comment(_), .. }) = self.peek() {
        } else {
            let first = self.peek().unwrap().span;
            match self.statement() {
                Ok(s) => {
                    let span = cover(first, self.toks[self.pos - 1].span);
                    doc.statements.push(Located { statement: s, span });
                }
                Err(d) => {
                    self.diags.push(d);
                    return;
                }
            }
        }
        match self.next() {
            None => {}
            Some(Token { tok: Tok::Comment(c), span }) => {
                doc.statements.push(Located { statement: Statement::Comment(c.clone()), span: *span });
            }
            Some(t) => self.diags.push(syntax(t.span, format!("unexpected {} after statement", t.tok.describe()))),
        }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    /// Where a missing token would have been: just past the last one.
    fn end_span(&self) -> Span {
        let last = self.toks[self.toks.len() - 1].span;
        Span { line: last.line, column: last.column + last.len, len: 0 }
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        match self.peek() {
            Some(t) => syntax(t.span, format!("expected {wanted}, found {}", t.tok.describe())),
            None => syntax(self.end_span(), format!("expected {wanted}, found end of line")),
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        match self.peek() {
            Some(t) if t.tok == tok => {
                let span = t.span;
                self.pos += 1;
                Ok(span)
            }
            _ => Err(self.unexpected(&tok.describe())),
        }
    }

    fn expect_word(&mut self, word: &str) -> PResult<Span> {
        self.expect(Tok::Ident(word.to_string()))
    }

    fn statement(&mut self) -> PResult<Statement> {
        let keyword = match self.peek() {
            Some(Token { tok: Tok::Ident(w), .. }) => w.clone(),
            _ => return Err(self.unexpected("`rule`, `birule`, `indep`, `query` or `#`")),
        };
        let start = self.next().unwrap().span;
        match keyword.as_str() {
            "rule" => {
                let (a, b) = self.event_pair(Tok::Arrow)?;
                self.expect(Tok::Colon)?;
                let bounds = self.interval()?;
                let span = cover(start, self.toks[self.pos - 1].span);
                UncertainRule::new(a, b, bounds).map(Statement::Rule).map_err(|e| semantic(e, span))
            }
            "birule" => {
                let (a, b) = self.event_pair(Tok::BiArrow)?;
                self.expect(Tok::Colon)?;
                let forward = self.interval()?;
                self.expect(Tok::Slash)?;
                let backward = self.interval()?;
                let span = cover(start, self.toks[self.pos - 1].span);
                if a.shares_symbol(&b) || coupling_holds(&forward, &backward) {
                    BidirRule::new(a, b, forward, backward).map(Statement::Birule).map_err(|e| semantic(e, span))
                } else {
                    Err(semantic(CoreError::Coupling { a: a.to_string(), b: b.to_string() }, span))
                }
            }
            "indep" => {
                self.expect_word("I")?;
                self.expect(Tok::LParen)?;
                let a = self.event()?;
                self.expect(Tok::Comma)?;
                let b = self.event()?;
                self.expect(Tok::Comma)?;
                let c = self.event()?;
                let end = self.expect(Tok::RParen)?;
                IndepStmt::new(a, b, c).map(Statement::Indep).map_err(|e| semantic(e, cover(start, end)))
            }
            "query" => {
                self.expect_word("P")?;
                self.expect(Tok::LParen)?;
                let target = self.event()?;
                self.expect(Tok::Pipe)?;
                let given = self.event()?;
                let end = self.expect(Tok::RParen)?;
                if target.shares_symbol(&given) {
                    let err = CoreError::OverlappingEvents { left: target.to_string(), right: given.to_string() };
                    return Err(semantic(err, cover(start, end)));
                }
                Ok(Statement::Query(Query { target, given }))
            }
            _ => Err(syntax(start, format!("unknown statement `{keyword}`"))),
        }
    }

    fn event_pair(&mut self, arrow: Tok) -> PResult<(ConjEvent, ConjEvent)> {
        let a = self.event()?;
        self.expect(arrow)?;
        let b = self.event()?;
        Ok((a, b))
    }

    fn event(&mut self) -> PResult<ConjEvent> {
        let start = self.peek().map(|t| t.span);
        let mut literals = vec![self.literal()?];
        while let Some(Token { tok: Tok::Amp, .. }) = self.peek() {
            self.pos += 1;
            literals.push(self.literal()?);
        }
        let span = cover(start.unwrap(), self.toks[self.pos - 1].span);
        ConjEvent::new(literals).map_err(|e| semantic(e, span))
    }

    fn literal(&mut self) -> PResult<Literal> {
        let negated = matches!(self.peek(), Some(Token { tok: Tok::Bang, .. }));
        if negated {
            self.pos += 1;
        }
        match self.peek() {
            Some(Token { tok: Tok::Ident(name), span }) => {
                let symbol = Symbol::new(name).map_err(|e| semantic(e, *span))?;
                self.pos += 1;
                Ok(Literal { symbol, negated })
            }
            _ => Err(self.unexpected("an event name")),
        }
    }

    fn number(&mut self) -> PResult<f64> {
        match self.peek() {
            Some(Token { tok: Tok::Number(v), .. }) => {
                let v = *v;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.unexpected("a decimal number")),
        }
    }

    fn interval(&mut self) -> PResult<ProbInterval> {
        let start = self.expect(Tok::LBracket)?;
        let lo = self.number()?;
        self.expect(Tok::Comma)?;
        let hi = self.number()?;
        let end = self.expect(Tok::RBracket)?;
        ProbInterval::new(lo, hi).map_err(|e| semantic(e, cover(start, end)))
    }
}
