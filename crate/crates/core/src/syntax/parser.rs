use super::lexer::{lex, Tok, Token};
use super::{canonical_symbol, SyntaxError};
use crate::net::{Arity, Signature, Symbol};

/// Line and column.
pub(crate) type Pos = (usize, usize);

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub fn new(src: &str) -> Result<Self, SyntaxError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn here(&self) -> Pos {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn error(&self, expected: &[&str]) -> SyntaxError {
        let (line, col) = self.here();
        SyntaxError::parse(
            line,
            col,
            format!("unexpected {}", self.peek().describe()),
            expected,
        )
    }

    pub fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error(&[&tok.describe()]))
        }
    }

    pub fn ident(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&[what])),
        }
    }

    pub fn skip_seps(&mut self) {
        while matches!(self.peek(), Tok::Sep) || matches!(self.peek(), Tok::Comma) {
            self.bump();
        }
    }

    /// True when the next tokens start a symbol followed by `^`.
    pub fn at_agent(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_) | Tok::Arrow | Tok::At | Tok::SymVar(_)
        ) && *self.peek_at(1) == Tok::Caret
    }

    /// True when the next tokens are `sig NAME (`.
    pub fn at_sig(&self) -> bool {
        *self.peek() == Tok::Ident("sig".into())
            && matches!(self.peek_at(1), Tok::Ident(_) | Tok::Arrow | Tok::At)
            && *self.peek_at(2) == Tok::LParen
    }

    /// A concrete symbol name, with aliases resolved.
    pub fn symbol(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(canonical_symbol(&s).to_string())
            }
            Tok::Arrow => {
                self.bump();
                Ok("Abs".into())
            }
            Tok::At => {
                self.bump();
                Ok("App".into())
            }
            _ => Err(self.error(&["symbol"])),
        }
    }

    fn int(&mut self) -> Result<usize, SyntaxError> {
        match self.peek().clone() {
            Tok::Int(n) if n >= 0 => {
                self.bump();
                Ok(n as usize)
            }
            _ => Err(self.error(&["non-negative integer"])),
        }
    }

    /// `sig NAME(internal, external)`
    pub fn sig(&mut self, sig: &mut Signature) -> Result<(), SyntaxError> {
        self.bump();
        let (line, col) = self.here();
        let name = self.symbol()?;
        self.expect(Tok::LParen)?;
        let internal = self.int()?;
        self.expect(Tok::Comma)?;
        let external = self.int()?;
        self.expect(Tok::RParen)?;
        let arity = Arity::new(internal, external);
        sig.declare(Symbol::new(name.clone()), arity)
            .map_err(|e| SyntaxError::Arity {
                line,
                col,
                symbol: name,
                declared: e.existing,
                found: arity,
            })
    }

    /// Comma-separated identifiers up to `|` or `)`.
    pub fn names(&mut self) -> Result<Vec<(String, Pos)>, SyntaxError> {
        let mut out = Vec::new();
        if matches!(self.peek(), Tok::Pipe | Tok::RParen) {
            return Ok(out);
        }
        loop {
            let pos = self.here();
            out.push((self.ident("label")?, pos));
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    /// End of an item: a separator or end of input.
    pub fn end_item(&mut self) -> Result<(), SyntaxError> {
        match self.peek() {
            Tok::Sep | Tok::Comma => {
                self.bump();
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => Err(self.error(&["end of line", "`,`"])),
        }
    }
}

impl Parser {
    pub fn pos_back(&mut self) {
        self.pos = self.pos.saturating_sub(1);
    }
}
