//! Parser for the TFF0 subset produced by the emitter and accepted by common provers.

use crate::tff::{Role, TffFormula, TffQuant, TffSort, TffTerm, TffType, TffUnit, UnitBody};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct TffParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Colon,
    Star,
    Gt,
    Amp,
    Pipe,
    Tilde,
    Implies,
    RevImplies,
    Iff,
    Xor,
    Nor,
    Nand,
    Eq,
    Neq,
    Bang,
    Question,
    Word(String),
    Var(String),
    Int(String),
    Rat(String),
    Real(String),
    Distinct(String),
}

struct Lexed {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>, TffParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, m: &str| TffParseError { line, col, message: m.to_string() };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let adv = |n: usize, i: &mut usize, line: &mut usize, col: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    *line += 1;
                    *col = 1;
                } else {
                    *col += 1;
                }
                *i += 1;
            }
        };
        if c.is_whitespace() {
            adv(1, &mut i, &mut line, &mut col);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                adv(1, &mut i, &mut line, &mut col);
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            adv(2, &mut i, &mut line, &mut col);
            while i < chars.len() && !(chars[i] == '*' && chars.get(i + 1) == Some(&'/')) {
                adv(1, &mut i, &mut line, &mut col);
            }
            if i >= chars.len() {
                return Err(err(l0, c0, "unterminated block comment"));
            }
            adv(2, &mut i, &mut line, &mut col);
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let fixed = [
            ("<=>", Tok::Iff),
            ("<~>", Tok::Xor),
            ("=>", Tok::Implies),
            ("<=", Tok::RevImplies),
            ("~|", Tok::Nor),
            ("~&", Tok::Nand),
            ("!=", Tok::Neq),
        ];
        if let Some((s, t)) = fixed.iter().find(|(s, _)| rest.starts_with(s)) {
            out.push(Lexed { tok: t.clone(), line: l0, col: c0 });
            adv(s.len(), &mut i, &mut line, &mut col);
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            ':' => Some(Tok::Colon),
            '*' => Some(Tok::Star),
            '>' => Some(Tok::Gt),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Pipe),
            '~' => Some(Tok::Tilde),
            '=' => Some(Tok::Eq),
            '!' => Some(Tok::Bang),
            '?' => Some(Tok::Question),
            _ => None,
        };
        if let Some(t) = single {
            out.push(Lexed { tok: t, line: l0, col: c0 });
            adv(1, &mut i, &mut line, &mut col);
            continue;
        }
        if c == '"' || c == '\'' {
            let mut s = String::new();
            let mut j = i + 1;
            loop {
                match chars.get(j) {
                    None => return Err(err(l0, c0, "unterminated quoted token")),
                    Some('\\') if j + 1 < chars.len() => {
                        s.push(chars[j + 1]);
                        j += 2;
                    }
                    Some(&q) if q == c => break,
                    Some(&ch) => {
                        s.push(ch);
                        j += 1;
                    }
                }
            }
            out.push(Lexed { tok: if c == '"' { Tok::Distinct(s) } else { Tok::Word(format!("'{s}'")) }, line: l0, col: c0 });
            adv(j + 1 - i, &mut i, &mut line, &mut col);
            continue;
        }
        let numeric_start = c.is_ascii_digit()
            || ((c == '-' || c == '+') && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()));
        if numeric_start {
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let mut kind = 0;
            if chars.get(j) == Some(&'/') && chars.get(j + 1).is_some_and(|d| d.is_ascii_digit()) {
                kind = 1;
                j += 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
            } else {
                if chars.get(j) == Some(&'.') && chars.get(j + 1).is_some_and(|d| d.is_ascii_digit()) {
                    kind = 2;
                    j += 1;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                if matches!(chars.get(j), Some('e') | Some('E')) {
                    let mut k = j + 1;
                    if matches!(chars.get(k), Some('+') | Some('-')) {
                        k += 1;
                    }
                    if chars.get(k).is_some_and(|d| d.is_ascii_digit()) {
                        kind = 2;
                        j = k;
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                    }
                }
            }
            let s: String = chars[i..j].iter().collect();
            let tok = match kind {
                0 => Tok::Int(s),
                1 => Tok::Rat(s),
                _ => Tok::Real(s),
            };
            out.push(Lexed { tok, line: l0, col: c0 });
            adv(j - i, &mut i, &mut line, &mut col);
            continue;
        }
        if c.is_alphanumeric() || c == '$' || c == '_' {
            let mut j = i + 1;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            let tok = if c.is_uppercase() || c == '_' { Tok::Var(s) } else { Tok::Word(s) };
            out.push(Lexed { tok, line: l0, col: c0 });
            adv(j - i, &mut i, &mut line, &mut col);
            continue;
        }
        return Err(err(l0, c0, &format!("unexpected character '{c}'")));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn err(&self, message: impl Into<String>) -> TffParseError {
        let (line, col) = match self.toks.get(self.pos).or(self.toks.last()) {
            Some(l) => (l.line, l.col),
            None => (1, 1),
        };
        TffParseError { line, col, message: message.into() }
    }

    fn next(&mut self) -> Result<Tok, TffParseError> {
        let t = self.peek().cloned().ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: Tok) -> Result<(), TffParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected {want:?}, found {t:?}"))),
            None => Err(self.err(format!("expected {want:?}, found end of input"))),
        }
    }

    fn name(&mut self) -> Result<String, TffParseError> {
        match self.next()? {
            Tok::Word(w) | Tok::Var(w) | Tok::Int(w) => Ok(w),
            t => {
                self.pos -= 1;
                Err(self.err(format!("expected a name, found {t:?}")))
            }
        }
    }

    fn unit(&mut self) -> Result<TffUnit, TffParseError> {
        let line = self.toks[self.pos].line;
        match self.next()? {
            Tok::Word(w) if w == "tff" => {}
            Tok::Word(w) if w == "include" => return Err(self.err("include directives are not supported")),
            t => {
                self.pos -= 1;
                return Err(self.err(format!("expected tff(...), found {t:?}")));
            }
        }
        self.expect(Tok::LParen)?;
        let name = self.name()?;
        self.expect(Tok::Comma)?;
        let role = Role::parse(&self.name()?);
        self.expect(Tok::Comma)?;
        let body = if role == Role::Type { self.type_decl()? } else { UnitBody::Formula(self.formula()?) };
        if self.peek() == Some(&Tok::Comma) {
            self.skip_annotations()?;
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Dot)?;
        Ok(TffUnit { name, role, body, comment: None, line })
    }

    fn skip_annotations(&mut self) -> Result<(), TffParseError> {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                None => return Err(self.err("unterminated annotation")),
                Some(Tok::LParen) | Some(Tok::LBrack) => depth += 1,
                Some(Tok::RParen) | Some(Tok::RBrack) if depth == 0 => return Ok(()),
                Some(Tok::RParen) | Some(Tok::RBrack) => depth -= 1,
                _ => {}
            }
            self.pos += 1;
        }
    }

    fn type_decl(&mut self) -> Result<UnitBody, TffParseError> {
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let b = self.type_decl()?;
            self.expect(Tok::RParen)?;
            return Ok(b);
        }
        let sym = self.name()?;
        self.expect(Tok::Colon)?;
        Ok(UnitBody::Decl(sym, self.type_expr()?))
    }

    fn sort(&mut self) -> Result<TffSort, TffParseError> {
        match self.next()? {
            Tok::Word(w) => match TffSort::parse(&w) {
                Some(s) => Ok(s),
                None if w == "$tType" => {
                    self.pos -= 1;
                    Err(self.err("user-defined sorts are not supported"))
                }
                None => {
                    self.pos -= 1;
                    Err(self.err(format!("unknown sort '{w}'")))
                }
            },
            t => {
                self.pos -= 1;
                Err(self.err(format!("expected a sort, found {t:?}")))
            }
        }
    }

    fn type_expr(&mut self) -> Result<TffType, TffParseError> {
        let args = if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let mut v = vec![self.sort()?];
            while self.peek() == Some(&Tok::Star) {
                self.pos += 1;
                v.push(self.sort()?);
            }
            self.expect(Tok::RParen)?;
            v
        } else {
            vec![self.sort()?]
        };
        if self.peek() == Some(&Tok::Gt) {
            self.pos += 1;
            Ok(TffType::Map(args, self.sort()?))
        } else if args.len() == 1 {
            Ok(TffType::Sort(args[0]))
        } else {
            Err(self.err("product type without a result sort"))
        }
    }

    fn formula(&mut self) -> Result<TffFormula, TffParseError> {
        let first = self.unitary()?;
        match self.peek() {
            Some(Tok::Amp) | Some(Tok::Pipe) => {
                let op = self.peek().cloned();
                let mut parts = vec![first];
                while self.peek() == op.as_ref() {
                    self.pos += 1;
                    parts.push(self.unitary()?);
                }
                if matches!(self.peek(), Some(Tok::Amp) | Some(Tok::Pipe)) {
                    return Err(self.err("mixed & and | without parentheses"));
                }
                Ok(if op == Some(Tok::Amp) { TffFormula::And(parts) } else { TffFormula::Or(parts) })
            }
            Some(Tok::Implies) | Some(Tok::RevImplies) | Some(Tok::Iff) | Some(Tok::Xor) | Some(Tok::Nor) | Some(Tok::Nand) => {
                let op = self.next()?;
                let second = self.unitary()?;
                let (a, b) = (first, second);
                Ok(match op {
                    Tok::Implies => TffFormula::implies(a, b),
                    Tok::RevImplies => TffFormula::implies(b, a),
                    Tok::Iff => TffFormula::Iff(Box::new(a), Box::new(b)),
                    Tok::Xor => TffFormula::not(TffFormula::Iff(Box::new(a), Box::new(b))),
                    Tok::Nor => TffFormula::not(TffFormula::Or(vec![a, b])),
                    _ => TffFormula::not(TffFormula::And(vec![a, b])),
                })
            }
            _ => Ok(first),
        }
    }

    fn unitary(&mut self) -> Result<TffFormula, TffParseError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(TffFormula::not(self.unitary()?))
            }
            Some(Tok::Bang) | Some(Tok::Question) => {
                let q = if self.next()? == Tok::Bang { TffQuant::Forall } else { TffQuant::Exists };
                self.expect(Tok::LBrack)?;
                let mut vars = Vec::new();
                loop {
                    match self.next()? {
                        Tok::Var(v) => {
                            let sort = if self.peek() == Some(&Tok::Colon) {
                                self.pos += 1;
                                Some(self.sort()?)
                            } else {
                                None
                            };
                            vars.push((v, sort));
                        }
                        Tok::RBrack if vars.is_empty() => {
                            self.pos -= 1;
                            return Err(self.err("empty quantifier variable list"));
                        }
                        t => {
                            self.pos -= 1;
                            return Err(self.err(format!("expected a variable, found {t:?}")));
                        }
                    }
                    match self.next()? {
                        Tok::Comma => continue,
                        Tok::RBrack => break,
                        t => {
                            self.pos -= 1;
                            return Err(self.err(format!("expected ',' or ']', found {t:?}")));
                        }
                    }
                }
                self.expect(Tok::Colon)?;
                Ok(TffFormula::Quant(q, vars, Box::new(self.unitary()?)))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<TffFormula, TffParseError> {
        if let Some(Tok::Word(w)) = self.peek() {
            if w == "$true" || w == "$false" {
                let t = w == "$true";
                self.pos += 1;
                return Ok(if t { TffFormula::True } else { TffFormula::False });
            }
        }
        let lhs = self.term()?;
        match self.peek() {
            Some(Tok::Eq) => {
                self.pos += 1;
                Ok(TffFormula::Eq(lhs, self.term()?))
            }
            Some(Tok::Neq) => {
                self.pos += 1;
                Ok(TffFormula::Neq(lhs, self.term()?))
            }
            _ => match lhs {
                TffTerm::App(p, args) => Ok(TffFormula::Pred(p, args)),
                _ => Err(self.err("expected an atomic formula")),
            },
        }
    }

    fn term(&mut self) -> Result<TffTerm, TffParseError> {
        match self.next()? {
            Tok::Var(v) => Ok(TffTerm::Var(v)),
            Tok::Int(s) => Ok(TffTerm::Int(s)),
            Tok::Rat(s) => Ok(TffTerm::Rat(s)),
            Tok::Real(s) => Ok(TffTerm::Real(s)),
            Tok::Distinct(s) => Ok(TffTerm::Distinct(s)),
            Tok::Word(f) => {
                let mut args = Vec::new();
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    loop {
                        args.push(self.term()?);
                        match self.next()? {
                            Tok::Comma => continue,
                            Tok::RParen => break,
                            t => {
                                self.pos -= 1;
                                return Err(self.err(format!("expected ',' or ')', found {t:?}")));
                            }
                        }
                    }
                }
                Ok(TffTerm::App(f, args))
            }
            t => {
                self.pos -= 1;
                Err(self.err(format!("expected a term, found {t:?}")))
            }
        }
    }
}

/// Parse a TFF problem into units; `%` comments are dropped.
pub fn parse_tff(text: &str) -> Result<Vec<TffUnit>, TffParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut units = Vec::new();
    while p.peek().is_some() {
        units.push(p.unit()?);
    }
    Ok(units)
}

/// Parse a single formula (no `tff(...)` wrapper).
pub fn parse_tff_formula(text: &str) -> Result<TffFormula, TffParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let f = p.formula()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input after formula"));
    }
    Ok(f)
}
