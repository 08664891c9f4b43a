use super::SyntaxError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// `?name`
    SymVar(String),
    Int(i64),
    Caret,
    LParen,
    RParen,
    Pipe,
    Comma,
    Dash,
    Colon,
    /// `->` or `→`
    Arrow,
    /// `@`
    At,
    FatArrow,
    FatArrowInactive,
    /// End of an item: newline or `;`
    Sep,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::SymVar(s) => format!("`?{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dash => "`-`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::At => "`@`".into(),
            Tok::FatArrow => "`=>`".into(),
            Tok::FatArrowInactive => "`=>inactive`".into(),
            Tok::Sep => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '%'
}

fn ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '.'
}

/// Splits source text into tokens. Newlines inside parentheses or after a
/// comma or colon are not separators.
pub(crate) fn lex(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut out: Vec<Token> = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let mut depth = 0usize;
    let push = |out: &mut Vec<Token>, tok: Tok, line: usize, col: usize| {
        if tok == Tok::Sep
            && matches!(
                out.last().map(|t| &t.tok),
                None | Some(Tok::Sep | Tok::Comma | Tok::Colon)
            )
        {
            return;
        }
        out.push(Token { tok, line, col });
    };
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut advance = 1;
        match c {
            '\n' => {
                if depth == 0 {
                    push(&mut out, Tok::Sep, line, col);
                }
                line += 1;
                col = 0;
            }
            ';' => push(&mut out, Tok::Sep, line, col),
            c if c.is_whitespace() => {}
            '#' => {
                while i + advance < chars.len() && chars[i + advance] != '\n' {
                    advance += 1;
                }
            }
            '^' => push(&mut out, Tok::Caret, line, col),
            '(' => {
                depth += 1;
                push(&mut out, Tok::LParen, line, col)
            }
            ')' => {
                depth = depth.saturating_sub(1);
                push(&mut out, Tok::RParen, line, col)
            }
            '|' => push(&mut out, Tok::Pipe, line, col),
            ',' => push(&mut out, Tok::Comma, line, col),
            ':' => push(&mut out, Tok::Colon, line, col),
            '@' => push(&mut out, Tok::At, line, col),
            '→' => push(&mut out, Tok::Arrow, line, col),
            '⊥' => push(&mut out, Tok::Ident("bot".into()), line, col),
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    advance = 2;
                    push(&mut out, Tok::Arrow, line, col);
                } else {
                    push(&mut out, Tok::Dash, line, col);
                }
            }
            '=' => {
                if chars.get(i + 1) != Some(&'>') {
                    return Err(SyntaxError::parse(
                        line,
                        col,
                        "`=` must be followed by `>`",
                        &["`=>`"],
                    ));
                }
                advance = 2;
                let rest: String = chars[i + 2..].iter().take(8).collect();
                let inactive =
                    rest == "inactive" && !chars.get(i + 10).copied().is_some_and(ident_continue);
                if inactive {
                    advance = 10;
                    push(&mut out, Tok::FatArrowInactive, line, col);
                } else {
                    push(&mut out, Tok::FatArrow, line, col);
                }
            }
            '?' => {
                let mut j = i + 1;
                while j < chars.len() && ident_continue(chars[j]) {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(SyntaxError::parse(
                        line,
                        col,
                        "`?` must be followed by a name",
                        &["symbol variable"],
                    ));
                }
                push(
                    &mut out,
                    Tok::SymVar(chars[i + 1..j].iter().collect()),
                    line,
                    col,
                );
                advance = j - i;
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let text: String = chars[i..j].iter().collect();
                let n = text
                    .parse()
                    .map_err(|_| SyntaxError::parse(line, col, "integer out of range", &[]))?;
                push(&mut out, Tok::Int(n), line, col);
                advance = j - i;
            }
            c if ident_start(c) => {
                let mut j = i + 1;
                while j < chars.len() && ident_continue(chars[j]) {
                    j += 1;
                }
                while j < chars.len() && chars[j] == '\'' {
                    j += 1;
                }
                push(
                    &mut out,
                    Tok::Ident(chars[i..j].iter().collect()),
                    line,
                    col,
                );
                advance = j - i;
            }
            other => {
                return Err(SyntaxError::parse(
                    line,
                    col,
                    format!("unexpected character `{other}`"),
                    &[],
                ))
            }
        }
        for k in 0..advance {
            if chars.get(i + k) == Some(&'\n') && k > 0 {
                line += 1;
                col = 0;
            }
            col += 1;
        }
        i += advance;
        let _ = (start_line, start_col);
    }
    push(&mut out, Tok::Sep, line, col);
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows_and_aliases() {
        assert_eq!(
            toks("->^x(a) => a-b =>inactive"),
            vec![
                Tok::Arrow,
                Tok::Caret,
                Tok::Ident("x".into()),
                Tok::LParen,
                Tok::Ident("a".into()),
                Tok::RParen,
                Tok::FatArrow,
                Tok::Ident("a".into()),
                Tok::Dash,
                Tok::Ident("b".into()),
                Tok::FatArrowInactive,
                Tok::Sep,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn newlines_inside_parens_are_ignored() {
        let t = toks("A^a(b,\n c)\n\n# note\nB^d()");
        let seps = t.iter().filter(|t| **t == Tok::Sep).count();
        assert_eq!(seps, 2);
    }

    #[test]
    fn positions_are_tracked() {
        let t = lex("A^a()\n  $").unwrap_err();
        match t {
            SyntaxError::Parse { line, col, .. } => assert_eq!((line, col), (2, 3)),
            e => panic!("{e:?}"),
        }
    }
}
