//! SUO-KIF reader and canonical printer.

use crate::formula::{Connective, Formula, Head, Quantifier, Source, SourcedFormula};
use num_bigint::BigInt;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unbalanced parenthesis: unexpected `)`")]
    UnexpectedClose,
    #[error("unbalanced parenthesis: `(` never closed")]
    Unclosed,
    #[error("unterminated string literal")]
    UnterminatedString,
    #[error("empty list `()`")]
    EmptyList,
    #[error("`{0}` expects {1}, found {2} argument(s)")]
    Arity(String, &'static str, usize),
    #[error("quantifier with empty variable list")]
    EmptyQuantifier,
    #[error("quantifier variable list must contain only variables")]
    BadQuantifierVars,
    #[error("application head must be a symbol or variable")]
    BadHead,
    #[error("expected a single formula")]
    NotSingle,
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Open,
    Close,
    Atom(String),
    Str(String),
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    let bump = |c: char, line: &mut usize, col: &mut usize| {
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        match c {
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    bump(c, &mut line, &mut col);
                }
            }
            c if c.is_whitespace() => {
                chars.next();
                bump(c, &mut line, &mut col);
            }
            '(' | ')' => {
                chars.next();
                bump(c, &mut line, &mut col);
                out.push(Token { kind: if c == '(' { TokKind::Open } else { TokKind::Close }, line: l0, col: c0 });
            }
            '"' => {
                chars.next();
                bump(c, &mut line, &mut col);
                let mut s = String::new();
                let mut closed = false;
                while let Some(c) = chars.next() {
                    bump(c, &mut line, &mut col);
                    match c {
                        '\\' => {
                            if let Some(n) = chars.next() {
                                bump(n, &mut line, &mut col);
                                s.push(n);
                            }
                        }
                        '"' => {
                            closed = true;
                            break;
                        }
                        other => s.push(other),
                    }
                }
                if !closed {
                    return Err(ParseError { line: l0, col: c0, kind: ParseErrorKind::UnterminatedString });
                }
                out.push(Token { kind: TokKind::Str(s), line: l0, col: c0 });
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' || c == '"' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                    bump(c, &mut line, &mut col);
                }
                out.push(Token { kind: TokKind::Atom(s), line: l0, col: c0 });
            }
        }
    }
    Ok(out)
}

fn is_int_token(s: &str) -> bool {
    let digits = s.strip_prefix('-').unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn is_real_token(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    match body.split_once('.') {
        Some((a, b)) => {
            !a.is_empty() && !b.is_empty() && a.bytes().all(|c| c.is_ascii_digit()) && b.bytes().all(|c| c.is_ascii_digit())
        }
        None => false,
    }
}

fn classify_atom(s: &str) -> Formula {
    if let Some(v) = s.strip_prefix('?') {
        Formula::Var(v.to_string())
    } else if let Some(v) = s.strip_prefix('@') {
        Formula::RowVar(v.to_string())
    } else if is_int_token(s) {
        Formula::Int(s.parse::<BigInt>().expect("digits"))
    } else if is_real_token(s) {
        Formula::Real(s.to_string())
    } else {
        Formula::Sym(s.to_string())
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn err(&self, tok: &Token, kind: ParseErrorKind) -> ParseError {
        ParseError { line: tok.line, col: tok.col, kind }
    }

    fn expr(&mut self) -> Result<Formula, ParseError> {
        let tok = self.toks[self.pos].clone();
        self.pos += 1;
        match tok.kind {
            TokKind::Close => Err(self.err(&tok, ParseErrorKind::UnexpectedClose)),
            TokKind::Atom(s) => Ok(classify_atom(&s)),
            TokKind::Str(s) => Ok(Formula::Str(s)),
            TokKind::Open => {
                if let (Some(TokKind::Atom(w)), Some(TokKind::Open), Some(TokKind::Close)) = (
                    self.toks.get(self.pos).map(|t| &t.kind),
                    self.toks.get(self.pos + 1).map(|t| &t.kind),
                    self.toks.get(self.pos + 2).map(|t| &t.kind),
                ) {
                    if w == "forall" || w == "exists" {
                        let t = self.toks[self.pos + 1].clone();
                        return Err(self.err(&t, ParseErrorKind::EmptyQuantifier));
                    }
                }
                let mut items: Vec<(Formula, Token)> = Vec::new();
                loop {
                    match self.toks.get(self.pos) {
                        None => return Err(self.err(&tok, ParseErrorKind::Unclosed)),
                        Some(t) if t.kind == TokKind::Close => {
                            self.pos += 1;
                            break;
                        }
                        Some(t) => {
                            let t = t.clone();
                            let e = self.expr()?;
                            items.push((e, t));
                        }
                    }
                }
                self.build(&tok, items)
            }
        }
    }

    fn build(&self, open: &Token, items: Vec<(Formula, Token)>) -> Result<Formula, ParseError> {
        let mut iter = items.into_iter();
        let Some((head, head_tok)) = iter.next() else {
            return Err(self.err(open, ParseErrorKind::EmptyList));
        };
        let rest: Vec<(Formula, Token)> = iter.collect();
        match head {
            Formula::Sym(ref word) => {
                if let Some(kind) = Connective::from_keyword(word) {
                    if !kind.accepts_arity(rest.len()) {
                        let want = match kind {
                            Connective::Not => "exactly 1",
                            Connective::Implies | Connective::Iff => "exactly 2",
                            _ => "at least 2",
                        };
                        return Err(self.err(open, ParseErrorKind::Arity(word.clone(), want, rest.len())));
                    }
                    return Ok(Formula::Conn { kind, args: rest.into_iter().map(|(f, _)| f).collect() });
                }
                if word == "forall" || word == "exists" {
                    let kind = if word == "forall" { Quantifier::Forall } else { Quantifier::Exists };
                    if rest.len() != 2 {
                        return Err(self.err(open, ParseErrorKind::Arity(word.clone(), "exactly 2", rest.len())));
                    }
                    let mut rest = rest.into_iter();
                    let (vars_f, vars_tok) = rest.next().unwrap();
                    let (body, _) = rest.next().unwrap();
                    let vars = match vars_f {
                        Formula::Apply { head, args } => {
                            let mut vs = vec![head_var_name(&head).ok_or_else(|| self.err(&vars_tok, ParseErrorKind::BadQuantifierVars))?];
                            for a in args {
                                match a {
                                    Formula::Var(v) => vs.push(v),
                                    Formula::RowVar(v) => vs.push(format!("@{v}")),
                                    _ => return Err(self.err(&vars_tok, ParseErrorKind::BadQuantifierVars)),
                                }
                            }
                            vs
                        }
                        _ => return Err(self.err(&vars_tok, ParseErrorKind::BadQuantifierVars)),
                    };
                    return Ok(Formula::Quant { kind, vars, body: Box::new(body) });
                }
                Ok(Formula::Apply { head: Head::Const(word.clone()), args: rest.into_iter().map(|(f, _)| f).collect() })
            }
            Formula::Var(v) => Ok(Formula::Apply { head: Head::Var(v), args: rest.into_iter().map(|(f, _)| f).collect() }),
            Formula::RowVar(v) => {
                // `(@ROW)` only makes sense inside a quantifier variable list.
                Ok(Formula::Apply { head: Head::Var(format!("@{v}")), args: rest.into_iter().map(|(f, _)| f).collect() })
            }
            _ => Err(self.err(&head_tok, ParseErrorKind::BadHead)),
        }
    }
}

fn head_var_name(h: &Head) -> Option<String> {
    match h {
        Head::Var(v) => Some(v.clone()),
        Head::Const(_) => None,
    }
}

/// Parse every top-level S-expression in `text`.
pub fn parse_kif(text: &str) -> Result<Vec<SourcedFormula>, ParseError> {
    parse_kif_named(text, "<input>")
}

/// Like [`parse_kif`], labelling formulas `<stem>_<n>` after `file_name`.
pub fn parse_kif_named(text: &str, file_name: &str) -> Result<Vec<SourcedFormula>, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let stem = std::path::Path::new(file_name)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(file_name)
        .to_string();
    let mut out = Vec::new();
    while p.pos < p.toks.len() {
        let line = p.toks[p.pos].line;
        let formula = p.expr()?;
        out.push(SourcedFormula {
            formula,
            source: Source { file: file_name.to_string(), line },
            label: format!("{}_{}", stem, out.len() + 1),
        });
    }
    Ok(out)
}

/// Parse exactly one formula.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut all = parse_kif(text)?;
    if all.len() != 1 {
        return Err(ParseError { line: 1, col: 1, kind: ParseErrorKind::NotSingle });
    }
    Ok(all.pop().unwrap().formula)
}

/// Canonical single-line rendering.
pub fn print_kif(f: &Formula) -> String {
    let mut s = String::new();
    write_kif(f, &mut s);
    s
}

fn write_kif(f: &Formula, out: &mut String) {
    match f {
        Formula::Var(v) => {
            let _ = write!(out, "?{v}");
        }
        Formula::RowVar(v) => {
            let _ = write!(out, "@{v}");
        }
        Formula::Sym(s) => out.push_str(s),
        Formula::Str(s) => {
            out.push('"');
            for c in s.chars() {
                if c == '"' || c == '\\' {
                    out.push('\\');
                }
                out.push(c);
            }
            out.push('"');
        }
        Formula::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Formula::Real(r) => out.push_str(r),
        Formula::Apply { head, args } => {
            out.push('(');
            match head {
                Head::Const(h) => out.push_str(h),
                Head::Var(v) if v.starts_with('@') => out.push_str(v),
                Head::Var(v) => {
                    let _ = write!(out, "?{v}");
                }
            }
            for a in args {
                out.push(' ');
                write_kif(a, out);
            }
            out.push(')');
        }
        Formula::Conn { kind, args } => {
            out.push('(');
            out.push_str(kind.keyword());
            for a in args {
                out.push(' ');
                write_kif(a, out);
            }
            out.push(')');
        }
        Formula::Quant { kind, vars, body } => {
            out.push('(');
            out.push_str(kind.keyword());
            out.push_str(" (");
            for (i, v) in vars.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                if v.starts_with('@') {
                    out.push_str(v);
                } else {
                    let _ = write!(out, "?{v}");
                }
            }
            out.push_str(") ");
            write_kif(body, out);
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_instance_with_variable() {
        let f = parse_formula("(instance ?X NegativeInteger)").unwrap();
        assert_eq!(f, Formula::app("instance", vec![Formula::var("X"), Formula::sym("NegativeInteger")]));
    }

    #[test]
    fn integer_literal_classification() {
        let f = parse_formula("(lessThan 500 ?Size)").unwrap();
        assert_eq!(f, Formula::app("lessThan", vec![Formula::int(500), Formula::var("Size")]));
        let g = parse_formula("(greaterThan ?X -1)").unwrap();
        assert_eq!(g, Formula::app("greaterThan", vec![Formula::var("X"), Formula::int(-1)]));
    }

    #[test]
    fn real_literals_survive_verbatim() {
        let f = parse_formula("(MultiplicationFn 0.0002778 ?X)").unwrap();
        assert_eq!(f.children()[0], Formula::Real("0.0002778".into()));
        assert_eq!(print_kif(&f), "(MultiplicationFn 0.0002778 ?X)");
        assert_eq!(print_kif(&Formula::Real("2.50".into())), "2.50");
    }

    #[test]
    fn atom_rendering() {
        assert_eq!(print_kif(&Formula::var("X")), "?X");
        assert_eq!(print_kif(&Formula::int(-1)), "-1");
    }

    #[test]
    fn implication_arity_is_checked() {
        let e = parse_formula("(=> A)").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Arity(ref k, _, 1) if k == "=>"));
        assert!(parse_formula("(not A B)").is_err());
        assert!(parse_formula("(and A)").is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_kif("(p a)\n  (q b").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
        assert_eq!(e.kind, ParseErrorKind::Unclosed);
        let e = parse_kif("(p a))").unwrap_err();
        assert_eq!((e.line, e.col, e.kind), (1, 6, ParseErrorKind::UnexpectedClose));
        let e = parse_kif("\n ()").unwrap_err();
        assert_eq!((e.line, e.col, e.kind), (2, 2, ParseErrorKind::EmptyList));
        let e = parse_kif("(forall () (p ?X))").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::EmptyQuantifier);
    }

    #[test]
    fn comments_dropped_and_labels_assigned() {
        let text = "; header\n(p a) ; trailing\n\n(q b)\n";
        let fs = parse_kif_named(text, "dir/demo.kif").unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0].label, "demo_1");
        assert_eq!(fs[1].source.line, 4);
    }

    #[test]
    fn predicate_variable_head() {
        let f = parse_formula("(?REL ?I1 ?I2)").unwrap();
        assert!(matches!(f, Formula::Apply { head: Head::Var(ref v), .. } if v == "REL"));
        assert_eq!(print_kif(&f), "(?REL ?I1 ?I2)");
    }

    #[test]
    fn strings_and_row_vars() {
        let f = parse_formula("(documentation Foo EnglishLanguage \"say \\\"hi\\\"\")").unwrap();
        assert_eq!(print_kif(&f), "(documentation Foo EnglishLanguage \"say \\\"hi\\\"\")");
        let g = parse_formula("(=> (p @ROW) (q @ROW))").unwrap();
        assert!(g.contains_row_var());
    }
}
