//! Recursive-descent parser for the ASCII sentence grammar and the weights
//! file format.
//!
//! Grammar: quantifiers `forall v`, `exists v`, `exists=1 v`; connectives
//! `~`, `&`, `|`, `->`, `<->`; atoms `Pred(v1,...,vk)` or bare `Pred`;
//! equality `v1 = v2`; constants `true`, `false`. `&` binds tighter than `|`
//! binds tighter than `->`/`<->`; quantifiers extend maximally right.
//! Predicates start uppercase, variables lowercase.

use super::{
    free_variables, Formula, Result, SyntaxError, Var, Vocabulary, WeightMap, RESERVED_PREFIX,
};
use num::{BigInt, BigRational, One};
use std::collections::BTreeMap;
use std::str::FromStr;

/// Whether predicate arities come from a caller-supplied vocabulary or are
/// inferred from first use.
#[derive(Debug, Clone)]
pub enum VocabMode {
    Declared(Vocabulary),
    Inferred,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Eq,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    ExistsEq1,
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn err(&self, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::Parse { line: self.line, col: self.col, msg: msg.into() }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if (c as char).is_whitespace() => {
                    self.bump();
                }
                Some(b'#') => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn next_tok(&mut self) -> Result<(Tok, usize, usize)> {
        self.skip_trivia();
        let (line, col) = (self.line, self.col);
        let Some(c) = self.peek() else {
            return Ok((Tok::Eof, line, col));
        };
        let tok = match c {
            b'(' => {
                self.bump();
                Tok::LParen
            }
            b')' => {
                self.bump();
                Tok::RParen
            }
            b',' => {
                self.bump();
                Tok::Comma
            }
            b'=' => {
                self.bump();
                Tok::Eq
            }
            b'~' => {
                self.bump();
                Tok::Tilde
            }
            b'&' => {
                self.bump();
                Tok::Amp
            }
            b'|' => {
                self.bump();
                Tok::Pipe
            }
            b'-' => {
                self.bump();
                if self.peek() == Some(b'>') {
                    self.bump();
                    Tok::Arrow
                } else {
                    return Err(self.err("expected `->`"));
                }
            }
            b'<' => {
                self.bump();
                if self.peek() == Some(b'-') {
                    self.bump();
                    if self.peek() == Some(b'>') {
                        self.bump();
                        Tok::DArrow
                    } else {
                        return Err(self.err("expected `<->`"));
                    }
                } else {
                    return Err(self.err("expected `<->`"));
                }
            }
            c if (c as char).is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if (c as char).is_ascii_alphanumeric() || c == b'_' {
                        self.bump();
                    } else {
                        break;
                    }
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                if word == "exists" && self.peek() == Some(b'=') {
                    self.bump();
                    if self.peek() == Some(b'1') {
                        self.bump();
                        Tok::ExistsEq1
                    } else {
                        return Err(self.err("expected `exists=1`"));
                    }
                } else {
                    Tok::Ident(word)
                }
            }
            other => return Err(self.err(format!("unexpected character `{}`", other as char))),
        };
        Ok((tok, line, col))
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    idx: usize,
    vocab: Vocabulary,
    declared: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.idx].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.idx].0.clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn err_here(&self, msg: impl Into<String>) -> SyntaxError {
        let (_, line, col) = self.toks[self.idx];
        SyntaxError::Parse { line, col, msg: msg.into() }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err_here(format!("expected {what}")))
        }
    }

    fn register(&mut self, pred: &str, arity: usize) -> Result<()> {
        if pred.starts_with(RESERVED_PREFIX) {
            return Err(SyntaxError::ReservedName(pred.to_string()));
        }
        if self.declared {
            match self.vocab.arity(pred) {
                Some(a) if a == arity => Ok(()),
                Some(a) => Err(SyntaxError::ArityMismatch {
                    pred: pred.to_string(),
                    declared: a,
                    found: arity,
                }),
                None => Err(SyntaxError::UnknownPredicate(pred.to_string())),
            }
        } else {
            self.vocab.declare(pred, arity)
        }
    }

    // expr := or_expr (('->' | '<->') expr)?     right-associative
    fn expr(&mut self) -> Result<Formula> {
        let lhs = self.or_expr()?;
        match self.peek() {
            Tok::Arrow => {
                self.bump();
                let rhs = self.expr()?;
                Ok(lhs.implies(rhs))
            }
            Tok::DArrow => {
                self.bump();
                let rhs = self.expr()?;
                Ok(lhs.iff(rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn or_expr(&mut self) -> Result<Formula> {
        let mut f = self.and_expr()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            f = f.or(self.and_expr()?);
        }
        Ok(f)
    }

    fn and_expr(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            f = f.and(self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                Ok(self.unary()?.not())
            }
            _ => self.primary(),
        }
    }

    fn quantifier_var(&mut self) -> Result<Var> {
        match self.bump() {
            Tok::Ident(v) if v.chars().next().is_some_and(|c| c.is_ascii_lowercase()) => Ok(v),
            _ => Err(self.err_here("expected a variable after quantifier")),
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::ExistsEq1 => {
                self.bump();
                let v = self.quantifier_var()?;
                let body = self.expr()?;
                Ok(Formula::exists_eq1(v, body))
            }
            Tok::Ident(word) => {
                let first = word.chars().next().unwrap();
                match word.as_str() {
                    "true" => {
                        self.bump();
                        return Ok(Formula::True);
                    }
                    "false" => {
                        self.bump();
                        return Ok(Formula::False);
                    }
                    "forall" => {
                        self.bump();
                        let v = self.quantifier_var()?;
                        let body = self.expr()?;
                        return Ok(Formula::forall(v, body));
                    }
                    "exists" => {
                        self.bump();
                        let v = self.quantifier_var()?;
                        let body = self.expr()?;
                        return Ok(Formula::exists(v, body));
                    }
                    _ => {}
                }
                if first.is_ascii_uppercase() || first == '_' {
                    self.bump();
                    let mut vars = Vec::new();
                    if *self.peek() == Tok::LParen {
                        self.bump();
                        loop {
                            match self.bump() {
                                Tok::Ident(v)
                                    if v.chars().next().is_some_and(|c| c.is_ascii_lowercase()) =>
                                {
                                    vars.push(v)
                                }
                                _ => return Err(self.err_here("expected a variable")),
                            }
                            match self.bump() {
                                Tok::Comma => continue,
                                Tok::RParen => break,
                                _ => return Err(self.err_here("expected `,` or `)`")),
                            }
                        }
                    }
                    self.register(&word, vars.len())?;
                    Ok(Formula::Atom(word, vars))
                } else {
                    // lowercase identifier: must be the left side of an equality
                    self.bump();
                    self.expect(Tok::Eq, "`=` after variable")?;
                    match self.bump() {
                        Tok::Ident(v)
                            if v.chars().next().is_some_and(|c| c.is_ascii_lowercase()) =>
                        {
                            Ok(Formula::Eq(word, v))
                        }
                        _ => Err(self.err_here("expected a variable on the right of `=`")),
                    }
                }
            }
            _ => Err(self.err_here("expected a formula")),
        }
    }
}

/// Parses a sentence. With [`VocabMode::Inferred`] arities are fixed by first
/// use; with [`VocabMode::Declared`] every predicate must match the given
/// vocabulary. The free-variable set must be empty.
pub fn parse_sentence(text: &str, mode: VocabMode) -> Result<(Formula, Vocabulary)> {
    let (formula, vocab) = parse_formula(text, mode)?;
    let free = free_variables(&formula);
    if !free.is_empty() {
        return Err(SyntaxError::Other(format!(
            "expected a sentence but found free variables: {}",
            free.into_iter().collect::<Vec<_>>().join(", ")
        )));
    }
    Ok((formula, vocab))
}

/// Parses a formula that may have free variables.
pub fn parse_formula(text: &str, mode: VocabMode) -> Result<(Formula, Vocabulary)> {
    let mut lx = Lexer::new(text);
    let mut toks = Vec::new();
    loop {
        let t = lx.next_tok()?;
        let eof = t.0 == Tok::Eof;
        toks.push(t);
        if eof {
            break;
        }
    }
    let (vocab, declared) = match mode {
        VocabMode::Declared(v) => (v, true),
        VocabMode::Inferred => (Vocabulary::new(), false),
    };
    let mut p = Parser { toks, idx: 0, vocab, declared };
    let f = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.err_here("unexpected trailing input"));
    }
    Ok((f, p.vocab))
}

/// Parses a sentence file: optional `vocab:` header lines pre-declaring
/// arities (`vocab: R/2 P/1`), `#` comments, then the sentence itself.
pub fn parse_sentence_file(text: &str) -> Result<(Formula, Vocabulary)> {
    let mut vocab = Vocabulary::new();
    let mut declared = false;
    let mut body = String::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix("vocab:") {
            declared = true;
            for item in rest.split_whitespace() {
                let item = item.trim_end_matches(',');
                let (name, arity) = item.split_once('/').ok_or_else(|| {
                    SyntaxError::Other(format!("bad vocab declaration `{item}`, expected Name/arity"))
                })?;
                let arity: usize = arity
                    .parse()
                    .map_err(|_| SyntaxError::Other(format!("bad arity in `{item}`")))?;
                vocab.declare(name, arity)?;
            }
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let mode = if declared { VocabMode::Declared(vocab) } else { VocabMode::Inferred };
    parse_sentence(&body, mode)
}

fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num).ok()?;
        let d = BigInt::from_str(den).ok()?;
        if d == BigInt::from(0) {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        let n = BigInt::from_str(s).ok()?;
        Some(BigRational::from_integer(n))
    }
}

/// Parses a weights file: one `PredName w=<rat> wbar=<rat>` record per line,
/// `#` comments. Unmentioned predicates default to (1, 1).
pub fn parse_weights(text: &str, vocab: &Vocabulary) -> Result<WeightMap> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let pred = parts.next().unwrap().to_string();
        if !vocab.contains(&pred) {
            return Err(SyntaxError::UnknownPredicate(pred));
        }
        let mut w = None;
        let mut wbar = None;
        for part in parts {
            if let Some(v) = part.strip_prefix("w=") {
                w = Some(parse_rational(v).ok_or_else(|| SyntaxError::Parse {
                    line: lineno + 1,
                    col: 1,
                    msg: format!("malformed rational `{v}`"),
                })?);
            } else if let Some(v) = part.strip_prefix("wbar=") {
                wbar = Some(parse_rational(v).ok_or_else(|| SyntaxError::Parse {
                    line: lineno + 1,
                    col: 1,
                    msg: format!("malformed rational `{v}`"),
                })?);
            } else {
                return Err(SyntaxError::Parse {
                    line: lineno + 1,
                    col: 1,
                    msg: format!("unexpected token `{part}` in weights record"),
                });
            }
        }
        map.insert(
            pred,
            (
                w.unwrap_or_else(BigRational::one),
                wbar.unwrap_or_else(BigRational::one),
            ),
        );
    }
    let mut weights = WeightMap::new();
    for (pred, (w, wbar)) in map {
        weights.set(&pred, w, wbar);
    }
    weights.complete(vocab);
    Ok(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Quant;

    #[test]
    fn parses_graph_axiom() {
        let (f, vocab) =
            parse_sentence("forall x forall y (R(x,y) -> (R(y,x) & ~(x = y)))", VocabMode::Inferred)
                .unwrap();
        assert_eq!(vocab.arity("R"), Some(2));
        let expected = Formula::forall(
            "x",
            Formula::forall(
                "y",
                Formula::atom("R", &["x", "y"]).implies(
                    Formula::atom("R", &["y", "x"])
                        .and(Formula::Eq("x".into(), "y".into()).not()),
                ),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn parses_constant_sentence() {
        let (f, vocab) = parse_sentence("true", VocabMode::Inferred).unwrap();
        assert_eq!(f, Formula::True);
        assert!(vocab.is_empty());
    }

    #[test]
    fn parses_functionality_axiom() {
        // The leading quantifier extends over the whole rest; scope
        // normalization recovers the conjunction structure.
        let (f, _) = parse_sentence(
            "forall x (~R(x,x)) & forall x exists=1 y R(x,y)",
            VocabMode::Inferred,
        )
        .unwrap();
        let f = crate::syntax::normalize_scopes(&f);
        let cs = f.conjuncts();
        assert_eq!(cs.len(), 2);
        match cs[1] {
            Formula::Quantified(Quant::Forall, _, body) => {
                assert!(matches!(**body, Formula::Quantified(Quant::ExistsEq1, ..)))
            }
            other => panic!("unexpected shape {other:?}"),
        }
    }

    #[test]
    fn quantifiers_extend_maximally_right() {
        let (f, _) = parse_sentence("forall x P(x) & Q(x)", VocabMode::Inferred).unwrap();
        // The conjunction is inside the quantifier scope.
        assert!(matches!(f, Formula::Quantified(Quant::Forall, ..)));
    }

    #[test]
    fn rejects_reserved_names_and_free_variables() {
        assert!(matches!(
            parse_sentence("forall x __A(x)", VocabMode::Inferred),
            Err(SyntaxError::ReservedName(_))
        ));
        assert!(parse_sentence("P(x)", VocabMode::Inferred).is_err());
    }

    #[test]
    fn reports_arity_mismatch() {
        assert!(matches!(
            parse_sentence("forall x (P(x) & P(x,x))", VocabMode::Inferred),
            Err(SyntaxError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn weights_parsing() {
        let (_, vocab) =
            parse_sentence("forall x forall y (R(x,y) -> P(x))", VocabMode::Inferred).unwrap();
        let w = parse_weights("R w=1 wbar=1\nP w=2 wbar=1/3\n", &vocab).unwrap();
        assert_eq!(w.pos("R"), BigRational::one());
        assert_eq!(w.pos("P"), BigRational::from_integer(2.into()));
        assert_eq!(
            w.neg("P"),
            BigRational::new(1.into(), 3.into())
        );
        // Empty file: all predicates default to (1,1).
        let w = parse_weights("", &vocab).unwrap();
        assert_eq!(w.pos("R"), BigRational::one());
        assert_eq!(w.neg("P"), BigRational::one());
        // Unknown predicate is an error.
        assert!(parse_weights("Q w=1 wbar=1", &vocab).is_err());
    }

    #[test]
    fn vocab_header() {
        let (f, vocab) =
            parse_sentence_file("vocab: R/2 P/1\nforall x forall y (R(x,y) -> P(y))").unwrap();
        assert_eq!(vocab.arity("R"), Some(2));
        assert!(matches!(f, Formula::Quantified(..)));
        // Declared mode rejects arity drift.
        assert!(parse_sentence_file("vocab: R/2\nforall x R(x)").is_err());
    }
}
