//! Tokens with source positions.

use super::Span;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Number(f64),
    Arrow,
    BiArrow,
    Colon,
    Slash,
    LBracket,
    RBracket,
    Comma,
    Amp,
    Bang,
    LParen,
    RParen,
    Pipe,
    /// Text after `#` up to the end of the line.
    Comment(String),
    /// A character that starts no token.
    Unexpected(char),
    /// A malformed number such as `1.2.3`.
    BadNumber(String),
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(n) => format!("number {n}"),
            Tok::Arrow => "`->`".into(),
            Tok::BiArrow => "`<->`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Slash => "`/`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bang => "`!`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Comment(_) => "comment".into(),
            Tok::Unexpected(c) => format!("`{c}`"),
            Tok::BadNumber(s) => format!("malformed number `{s}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub(crate) fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let start = i;
            let span = |end: usize| Span { line: line_no + 1, column: start + 1, len: end - start };
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let (tok, end) = match c {
                '#' => (Tok::Comment(chars[i + 1..].iter().collect()), chars.len()),
                '-' if chars.get(i + 1) == Some(&'>') => (Tok::Arrow, i + 2),
                '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => (Tok::BiArrow, i + 3),
                ':' => (Tok::Colon, i + 1),
                '/' => (Tok::Slash, i + 1),
                '[' => (Tok::LBracket, i + 1),
                ']' => (Tok::RBracket, i + 1),
                ',' => (Tok::Comma, i + 1),
                '&' => (Tok::Amp, i + 1),
                '!' => (Tok::Bang, i + 1),
                '(' => (Tok::LParen, i + 1),
                ')' => (Tok::RParen, i + 1),
                '|' => (Tok::Pipe, i + 1),
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut j = i;
                    while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                        j += 1;
                    }
                    (Tok::Ident(chars[i..j].iter().collect()), j)
                }
                c if c.is_ascii_digit() || c == '.' => {
                    let mut j = i;
                    while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                        j += 1;
                    }
                    let text: String = chars[i..j].iter().collect();
                    (number(&text), j)
                }
                other => (Tok::Unexpected(other), i + 1),
            };
            out.push(Token { tok, span: span(end) });
            i = end;
        }
    }
    out
}

/// Decimal notation only: digits with at most one point and at least one
/// digit.
fn number(text: &str) -> Tok {
    let points = text.matches('.').count();
    let digits = text.chars().filter(|c| c.is_ascii_digit()).count();
    match text.parse::<f64>() {
        Ok(v) if points <= 1 && digits > 0 => Tok::Number(v),
        _ => Tok::BadNumber(text.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<Tok> {
        tokenize(text).into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn rule_tokens() {
        assert_eq!(
            kinds("rule A&!B->C:[0,.5]"),
            vec![
                Tok::Ident("rule".into()),
                Tok::Ident("A".into()),
                Tok::Amp,
                Tok::Bang,
                Tok::Ident("B".into()),
                Tok::Arrow,
                Tok::Ident("C".into()),
                Tok::Colon,
                Tok::LBracket,
                Tok::Number(0.0),
                Tok::Comma,
                Tok::Number(0.5),
                Tok::RBracket,
            ]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("\n  birule A <-> B # note");
        assert_eq!(toks[0].span, Span { line: 2, column: 3, len: 6 });
        assert_eq!(toks[2].tok, Tok::BiArrow);
        assert_eq!(toks[2].span.column, 12);
        assert_eq!(toks[4].tok, Tok::Comment(" note".into()));
    }

    #[test]
    fn malformed_numbers() {
        assert!(matches!(kinds("1.2.3")[0], Tok::BadNumber(_)));
        assert!(matches!(kinds(".")[0], Tok::BadNumber(_)));
        assert_eq!(kinds("1e5"), vec![Tok::Number(1.0), Tok::Ident("e5".into())]);
        assert_eq!(kinds("50%")[1], Tok::Unexpected('%'));
    }
}
