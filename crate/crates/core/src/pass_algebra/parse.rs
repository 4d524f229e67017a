//! Recursive-descent parser for pass expressions.
//!
//! ```text
//! sum   := term ('+' term)*
//! term  := IDENT stage+ | '(' sum ')' stage*
//! stage := '<' ctl '>'
//! ctl   := conj ('|' conj)*
//! conj  := atom ('&' atom)*
//! atom  := '!'? IDENT | '(' ctl ')' | '0' | '1'
//! ```
//!
//! Each trailing stage is applied with [`series`].

use super::{series, AlgebraError, CtlExpr, PassExpr};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, AlgebraError> {
        Err(AlgebraError::Parse {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), AlgebraError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{}`", c as char))
        }
    }

    fn ident(&mut self) -> Result<String, AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        if !self.src.get(self.pos).is_some_and(u8::is_ascii_alphabetic) {
            return self.err("expected a name");
        }
        while self
            .src
            .get(self.pos)
            .is_some_and(u8::is_ascii_alphanumeric)
        {
            self.pos += 1;
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn finish(&mut self) -> Result<(), AlgebraError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => self.err(format!("unexpected `{}`", c as char)),
        }
    }

    fn sum(&mut self) -> Result<PassExpr, AlgebraError> {
        let mut terms = vec![self.term()?];
        while self.eat(b'+') {
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().expect("one term")
        } else {
            PassExpr::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<PassExpr, AlgebraError> {
        let mut e = if self.eat(b'(') {
            let inner = self.sum()?;
            self.expect(b')')?;
            inner
        } else {
            let input = self.ident()?;
            if self.peek() != Some(b'<') {
                return self.err(format!(
                    "pass variable `{input}` needs a `<control>` condition"
                ));
            }
            PassExpr::pass(&input, CtlExpr::always())
        };
        let mut first = true;
        while self.eat(b'<') {
            let c = self.ctl()?;
            self.expect(b'>')?;
            e = match (first, e) {
                // The first stage of a bare leaf is its own condition.
                (true, PassExpr::Pass { input, ctl }) if ctl.is_always() => {
                    PassExpr::Pass { input, ctl: c }
                }
                (_, e) => series(&e, &c),
            };
            first = false;
        }
        Ok(e)
    }

    fn ctl(&mut self) -> Result<CtlExpr, AlgebraError> {
        let mut e = self.conj()?;
        while self.eat(b'|') {
            e = e.or(self.conj()?);
        }
        Ok(e)
    }

    fn conj(&mut self) -> Result<CtlExpr, AlgebraError> {
        let mut e = self.atom()?;
        while self.eat(b'&') {
            e = e.and(self.atom()?);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<CtlExpr, AlgebraError> {
        if self.eat(b'(') {
            let e = self.ctl()?;
            self.expect(b')')?;
            return Ok(e);
        }
        if self.eat(b'!') {
            return Ok(CtlExpr::not(&self.ident()?));
        }
        if self.eat(b'1') {
            return Ok(CtlExpr::always());
        }
        if self.eat(b'0') {
            return Ok(CtlExpr::never());
        }
        Ok(CtlExpr::var(&self.ident()?))
    }
}

/// Parses a pass expression such as `y1<x1|x2> + y2<!x1&x3>`.
pub fn parse_expr(src: &str) -> Result<PassExpr, AlgebraError> {
    let mut p = Parser::new(src);
    let e = p.sum()?;
    p.finish()?;
    Ok(e)
}

/// Parses a bare control condition such as `(x1|x2)&!x3`.
pub fn parse_ctl(src: &str) -> Result<CtlExpr, AlgebraError> {
    let mut p = Parser::new(src);
    let e = p.ctl()?;
    p.finish()?;
    Ok(e)
}
