//! Formula AST, vocabulary management, weight maps and the sentence/weights
//! parsers, together with the fragment classifier.

pub mod fragment;
pub mod parser;

use indexmap::IndexMap;
use num::BigRational;
use num::One;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use fragment::{classify_fragment, FragmentVerdict};
pub use parser::{parse_sentence, parse_sentence_file, parse_weights, VocabMode};

/// Variables are plain interned-by-value identifiers.
pub type Var = String;

/// Namespace prefix for generated predicate symbols. Never accepted from user input.
pub const RESERVED_PREFIX: &str = "__";

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("predicate {pred} used with arity {found}, declared with arity {declared}")]
    ArityMismatch { pred: String, declared: usize, found: usize },
    #[error("predicate name {0} uses the reserved `__` namespace")]
    ReservedName(String),
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("substitution would capture variable {0}")]
    Capture(Var),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, SyntaxError>;

/// Quantifier kind attached to [`Formula`] prefix nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quant {
    Forall,
    Exists,
    /// The counting quantifier of the functionality axiom.
    ExistsEq1,
}

impl Quant {
    pub fn dual(self) -> Quant {
        match self {
            Quant::Forall => Quant::Exists,
            Quant::Exists => Quant::Forall,
            Quant::ExistsEq1 => Quant::ExistsEq1,
        }
    }
}

/// First-order formulas over a relational vocabulary.
///
/// Connectives are binary; flattening helpers are provided where n-ary views
/// are more convenient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(String, Vec<Var>),
    Eq(Var, Var),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Quantified(Quant, Var, Box<Formula>),
}

impl Formula {
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }
    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }
    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }
    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(other))
    }
    pub fn iff(self, other: Formula) -> Formula {
        Formula::Iff(Box::new(self), Box::new(other))
    }
    pub fn forall(var: impl Into<Var>, body: Formula) -> Formula {
        Formula::Quantified(Quant::Forall, var.into(), Box::new(body))
    }
    pub fn exists(var: impl Into<Var>, body: Formula) -> Formula {
        Formula::Quantified(Quant::Exists, var.into(), Box::new(body))
    }
    pub fn exists_eq1(var: impl Into<Var>, body: Formula) -> Formula {
        Formula::Quantified(Quant::ExistsEq1, var.into(), Box::new(body))
    }
    pub fn atom(pred: impl Into<String>, vars: &[&str]) -> Formula {
        Formula::Atom(pred.into(), vars.iter().map(|v| v.to_string()).collect())
    }

    /// Conjunction of a list; empty list is ⊤. Balanced to keep trees
    /// shallow for long conjunctions.
    pub fn and_all(fs: Vec<Formula>) -> Formula {
        fn build(fs: &mut Vec<Formula>) -> Formula {
            match fs.len() {
                0 => Formula::True,
                1 => fs.pop().unwrap(),
                n => {
                    let mut right = fs.split_off(n / 2);
                    build(fs).and(build(&mut right))
                }
            }
        }
        let mut fs = fs;
        build(&mut fs)
    }

    /// Disjunction of a list; empty list is ⊥. Balanced like [`Self::and_all`].
    pub fn or_all(fs: Vec<Formula>) -> Formula {
        fn build(fs: &mut Vec<Formula>) -> Formula {
            match fs.len() {
                0 => Formula::False,
                1 => fs.pop().unwrap(),
                n => {
                    let mut right = fs.split_off(n / 2);
                    build(fs).or(build(&mut right))
                }
            }
        }
        let mut fs = fs;
        build(&mut fs)
    }

    /// Flattens nested conjunctions at the top level.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::And(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(..) | Formula::Eq(..) => true,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Quantified(..) => false,
        }
    }

    /// Splits a prenex formula into its quantifier prefix and matrix.
    /// Returns `None` when the formula is not prenex with quantifier-free matrix
    /// (a quantifier-free formula is prenex with empty prefix).
    pub fn prenex_split(&self) -> Option<(Vec<(Quant, Var)>, &Formula)> {
        let mut prefix = Vec::new();
        let mut cur = self;
        while let Formula::Quantified(q, v, body) = cur {
            prefix.push((*q, v.clone()));
            cur = body;
        }
        if cur.is_quantifier_free() {
            Some((prefix, cur))
        } else {
            None
        }
    }

    /// Rebuilds a prenex formula from prefix and matrix.
    pub fn prenex(prefix: &[(Quant, Var)], matrix: Formula) -> Formula {
        prefix.iter().rev().fold(matrix, |acc, (q, v)| {
            Formula::Quantified(*q, v.clone(), Box::new(acc))
        })
    }

    /// All variables occurring in the formula, bound or free.
    pub fn all_variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.walk_vars(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    fn walk_vars(&self, f: &mut impl FnMut(&Var)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(_, vs) => vs.iter().for_each(&mut *f),
            Formula::Eq(a, b) => {
                f(a);
                f(b);
            }
            Formula::Not(a) => a.walk_vars(f),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.walk_vars(f);
                b.walk_vars(f);
            }
            Formula::Quantified(_, v, body) => {
                f(v);
                body.walk_vars(f);
            }
        }
    }

    /// Predicates occurring in the formula.
    pub fn predicates(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn walk(f: &Formula, out: &mut BTreeSet<String>) {
            match f {
                Formula::Atom(p, _) => {
                    out.insert(p.clone());
                }
                Formula::Not(a) => walk(a, out),
                Formula::And(a, b)
                | Formula::Or(a, b)
                | Formula::Implies(a, b)
                | Formula::Iff(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Formula::Quantified(_, _, body) => walk(body, out),
                _ => {}
            }
        }
        walk(self, &mut out);
        out
    }

    /// Constant folding: propagates ⊤/⊥ upwards. Does not touch quantifier
    /// structure except to drop quantifiers over constant bodies.
    pub fn simplify(&self) -> Formula {
        match self {
            Formula::Not(a) => match a.simplify() {
                Formula::True => Formula::False,
                Formula::False => Formula::True,
                Formula::Not(inner) => *inner,
                s => s.not(),
            },
            Formula::And(a, b) => match (a.simplify(), b.simplify()) {
                (Formula::False, _) | (_, Formula::False) => Formula::False,
                (Formula::True, s) | (s, Formula::True) => s,
                (sa, sb) => sa.and(sb),
            },
            Formula::Or(a, b) => match (a.simplify(), b.simplify()) {
                (Formula::True, _) | (_, Formula::True) => Formula::True,
                (Formula::False, s) | (s, Formula::False) => s,
                (sa, sb) => sa.or(sb),
            },
            Formula::Implies(a, b) => match (a.simplify(), b.simplify()) {
                (Formula::False, _) => Formula::True,
                (Formula::True, s) => s,
                (_, Formula::True) => Formula::True,
                (sa, Formula::False) => sa.not().simplify(),
                (sa, sb) => sa.implies(sb),
            },
            Formula::Iff(a, b) => match (a.simplify(), b.simplify()) {
                (Formula::True, s) | (s, Formula::True) => s,
                (Formula::False, s) | (s, Formula::False) => s.not().simplify(),
                (sa, sb) => sa.iff(sb),
            },
            Formula::Quantified(q, v, body) => match body.simplify() {
                // ∃^{=1} over a constant body is not constant; keep it.
                Formula::True if *q != Quant::ExistsEq1 => Formula::True,
                Formula::False if *q != Quant::ExistsEq1 => Formula::False,
                s => Formula::Quantified(*q, v.clone(), Box::new(s)),
            },
            other => other.clone(),
        }
    }

    /// Replaces nullary predicate occurrences by constants.
    pub fn substitute_nullary(&self, assignment: &BTreeMap<String, bool>) -> Formula {
        match self {
            Formula::Atom(p, vs) if vs.is_empty() => match assignment.get(p) {
                Some(true) => Formula::True,
                Some(false) => Formula::False,
                None => self.clone(),
            },
            Formula::Not(a) => a.substitute_nullary(assignment).not(),
            Formula::And(a, b) => a
                .substitute_nullary(assignment)
                .and(b.substitute_nullary(assignment)),
            Formula::Or(a, b) => a
                .substitute_nullary(assignment)
                .or(b.substitute_nullary(assignment)),
            Formula::Implies(a, b) => a
                .substitute_nullary(assignment)
                .implies(b.substitute_nullary(assignment)),
            Formula::Iff(a, b) => a
                .substitute_nullary(assignment)
                .iff(b.substitute_nullary(assignment)),
            Formula::Quantified(q, v, body) => {
                Formula::Quantified(*q, v.clone(), Box::new(body.substitute_nullary(assignment)))
            }
            other => other.clone(),
        }
    }
}

/// Scope normalization: distributes ∀ over ∧ and ∃ over ∨, and drops
/// quantifiers that bind no occurrence. Quantifiers written in running text
/// extend maximally right, so this recovers the intended top-level
/// conjunction structure. Vacuous-quantifier removal assumes a nonempty
/// domain; counting at n = 0 bypasses it.
pub fn normalize_scopes(f: &Formula) -> Formula {
    match f {
        Formula::Not(a) => normalize_scopes(a).not(),
        Formula::And(a, b) => normalize_scopes(a).and(normalize_scopes(b)),
        Formula::Or(a, b) => normalize_scopes(a).or(normalize_scopes(b)),
        Formula::Implies(a, b) => normalize_scopes(a).implies(normalize_scopes(b)),
        Formula::Iff(a, b) => normalize_scopes(a).iff(normalize_scopes(b)),
        Formula::Quantified(Quant::ExistsEq1, v, body) => {
            Formula::exists_eq1(v.clone(), normalize_scopes(body))
        }
        Formula::Quantified(q, v, body) => {
            let body = normalize_scopes(body);
            if !free_variables(&body).contains(v) {
                return body;
            }
            match (q, &body) {
                (Quant::Forall, Formula::And(..)) => Formula::and_all(
                    body.conjuncts()
                        .into_iter()
                        .map(|c| normalize_scopes(&Formula::forall(v.clone(), c.clone())))
                        .collect(),
                ),
                (Quant::Exists, Formula::Or(..)) => {
                    let mut parts = Vec::new();
                    fn disjuncts<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
                        match f {
                            Formula::Or(a, b) => {
                                disjuncts(a, out);
                                disjuncts(b, out);
                            }
                            other => out.push(other),
                        }
                    }
                    let mut ds = Vec::new();
                    disjuncts(&body, &mut ds);
                    for d in ds {
                        parts.push(normalize_scopes(&Formula::exists(v.clone(), d.clone())));
                    }
                    Formula::or_all(parts)
                }
                _ => Formula::Quantified(*q, v.clone(), Box::new(body)),
            }
        }
        other => other.clone(),
    }
}

/// Standard free-variable computation.
pub fn free_variables(f: &Formula) -> BTreeSet<Var> {
    match f {
        Formula::True | Formula::False => BTreeSet::new(),
        Formula::Atom(_, vs) => vs.iter().cloned().collect(),
        Formula::Eq(a, b) => [a.clone(), b.clone()].into_iter().collect(),
        Formula::Not(a) => free_variables(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            let mut s = free_variables(a);
            s.extend(free_variables(b));
            s
        }
        Formula::Quantified(_, v, body) => {
            let mut s = free_variables(body);
            s.remove(v);
            s
        }
    }
}

/// Renames free occurrences of variables. Errors when a renamed variable would
/// be captured by a quantifier in whose scope it occurs.
pub fn substitute(f: &Formula, renaming: &BTreeMap<Var, Var>) -> Result<Formula> {
    fn go(f: &Formula, renaming: &BTreeMap<Var, Var>) -> Result<Formula> {
        Ok(match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Atom(p, vs) => Formula::Atom(
                p.clone(),
                vs.iter()
                    .map(|v| renaming.get(v).unwrap_or(v).clone())
                    .collect(),
            ),
            Formula::Eq(a, b) => Formula::Eq(
                renaming.get(a).unwrap_or(a).clone(),
                renaming.get(b).unwrap_or(b).clone(),
            ),
            Formula::Not(a) => go(a, renaming)?.not(),
            Formula::And(a, b) => go(a, renaming)?.and(go(b, renaming)?),
            Formula::Or(a, b) => go(a, renaming)?.or(go(b, renaming)?),
            Formula::Implies(a, b) => go(a, renaming)?.implies(go(b, renaming)?),
            Formula::Iff(a, b) => go(a, renaming)?.iff(go(b, renaming)?),
            Formula::Quantified(q, v, body) => {
                // The bound variable shadows any renaming of the same name.
                let mut inner = renaming.clone();
                inner.remove(v);
                // Capture check: a renaming target equal to the binder, applied
                // to a variable free in the body, would be captured.
                for (from, to) in &inner {
                    if to == v && free_variables(body).contains(from) {
                        return Err(SyntaxError::Capture(v.clone()));
                    }
                }
                Formula::Quantified(*q, v.clone(), Box::new(go(body, &inner)?))
            }
        })
    }
    go(f, renaming)
}

/// Simultaneous substitution that permits variable identification and ignores
/// capture (for use on quantifier-free matrices only).
pub fn substitute_free(f: &Formula, renaming: &BTreeMap<Var, Var>) -> Formula {
    debug_assert!(f.is_quantifier_free());
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(p, vs) => Formula::Atom(
            p.clone(),
            vs.iter()
                .map(|v| renaming.get(v).unwrap_or(v).clone())
                .collect(),
        ),
        Formula::Eq(a, b) => Formula::Eq(
            renaming.get(a).unwrap_or(a).clone(),
            renaming.get(b).unwrap_or(b).clone(),
        ),
        Formula::Not(a) => substitute_free(a, renaming).not(),
        Formula::And(a, b) => substitute_free(a, renaming).and(substitute_free(b, renaming)),
        Formula::Or(a, b) => substitute_free(a, renaming).or(substitute_free(b, renaming)),
        Formula::Implies(a, b) => {
            substitute_free(a, renaming).implies(substitute_free(b, renaming))
        }
        Formula::Iff(a, b) => substitute_free(a, renaming).iff(substitute_free(b, renaming)),
        Formula::Quantified(..) => unreachable!("substitute_free on quantified formula"),
    }
}

/// Ordered relational vocabulary: predicate name to arity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    symbols: IndexMap<String, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a user-facing symbol. Rejects the reserved namespace and
    /// arity conflicts.
    pub fn declare(&mut self, name: &str, arity: usize) -> Result<()> {
        if name.starts_with(RESERVED_PREFIX) {
            return Err(SyntaxError::ReservedName(name.to_string()));
        }
        self.declare_unchecked(name, arity)
    }

    /// Declares a symbol without the reserved-namespace check; used for
    /// generated symbols.
    pub fn declare_unchecked(&mut self, name: &str, arity: usize) -> Result<()> {
        match self.symbols.get(name) {
            Some(&a) if a != arity => Err(SyntaxError::ArityMismatch {
                pred: name.to_string(),
                declared: a,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.symbols.insert(name.to_string(), arity);
                Ok(())
            }
        }
    }

    /// Smallest unused generated name `__<base><k>`; deterministic.
    pub fn fresh_name(&self, base: &str) -> String {
        for k in 0.. {
            let name = format!("{RESERVED_PREFIX}{base}{k}");
            if !self.symbols.contains_key(&name) {
                return name;
            }
        }
        unreachable!()
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.symbols.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.symbols.contains_key(name)
    }

    pub fn remove(&mut self, name: &str) {
        self.symbols.shift_remove(name);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, usize)> {
        self.symbols.iter().map(|(n, &a)| (n, a))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.values().copied().max().unwrap_or(0)
    }

    pub fn nullary_symbols(&self) -> Vec<String> {
        self.iter()
            .filter(|&(_, a)| a == 0)
            .map(|(n, _)| n.clone())
            .collect()
    }

    /// Checks every atom against the declared arities.
    pub fn check_formula(&self, f: &Formula) -> Result<()> {
        match f {
            Formula::Atom(p, vs) => match self.arity(p) {
                Some(a) if a == vs.len() => Ok(()),
                Some(a) => Err(SyntaxError::ArityMismatch {
                    pred: p.clone(),
                    declared: a,
                    found: vs.len(),
                }),
                None => Err(SyntaxError::UnknownPredicate(p.clone())),
            },
            Formula::Not(a) => self.check_formula(a),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                self.check_formula(a)?;
                self.check_formula(b)
            }
            Formula::Quantified(_, _, body) => self.check_formula(body),
            _ => Ok(()),
        }
    }
}

/// Per-predicate pair of exact rational weights for positive and negative facts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightMap {
    entries: BTreeMap<String, (BigRational, BigRational)>,
}

impl WeightMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Unit weights for every symbol of the vocabulary.
    pub fn ones(vocab: &Vocabulary) -> Self {
        let mut m = Self::new();
        for (name, _) in vocab.iter() {
            m.set(name, BigRational::one(), BigRational::one());
        }
        m
    }

    pub fn set(&mut self, pred: &str, w: BigRational, wbar: BigRational) {
        self.entries.insert(pred.to_string(), (w, wbar));
    }

    /// Positive weight; unmentioned predicates default to 1.
    pub fn pos(&self, pred: &str) -> BigRational {
        self.entries
            .get(pred)
            .map(|(w, _)| w.clone())
            .unwrap_or_else(BigRational::one)
    }

    /// Negative weight; unmentioned predicates default to 1.
    pub fn neg(&self, pred: &str) -> BigRational {
        self.entries
            .get(pred)
            .map(|(_, w)| w.clone())
            .unwrap_or_else(BigRational::one)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &(BigRational, BigRational))> {
        self.entries.iter()
    }

    /// Completes the map so every vocabulary symbol has an explicit entry.
    pub fn complete(&mut self, vocab: &Vocabulary) {
        for (name, _) in vocab.iter() {
            self.entries
                .entry(name.clone())
                .or_insert_with(|| (BigRational::one(), BigRational::one()));
        }
    }
}

impl fmt::Display for WeightMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, (w, wbar)) in &self.entries {
            writeln!(f, "{name} w={w} wbar={wbar}")?;
        }
        Ok(())
    }
}

// Precedence levels used by the printer; quantifiers bind weakest and extend
// maximally right.
fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Quantified(..) => 0,
        Formula::Implies(..) | Formula::Iff(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Not(..) => 4,
        _ => 5,
    }
}

fn fmt_at(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let p = prec(f);
    let parens = p < min;
    if parens {
        write!(out, "(")?;
    }
    match f {
        Formula::True => write!(out, "true")?,
        Formula::False => write!(out, "false")?,
        Formula::Atom(pred, vs) => {
            write!(out, "{pred}")?;
            if !vs.is_empty() {
                write!(out, "({})", vs.join(","))?;
            }
        }
        Formula::Eq(a, b) => write!(out, "{a} = {b}")?,
        Formula::Not(a) => {
            write!(out, "~")?;
            fmt_at(a, 4, out)?;
        }
        Formula::And(a, b) => {
            fmt_at(a, 3, out)?;
            write!(out, " & ")?;
            // Right child at one level up keeps And left-associative on reparse.
            fmt_at(b, 4, out)?;
        }
        Formula::Or(a, b) => {
            fmt_at(a, 2, out)?;
            write!(out, " | ")?;
            fmt_at(b, 3, out)?;
        }
        Formula::Implies(a, b) => {
            fmt_at(a, 2, out)?;
            write!(out, " -> ")?;
            fmt_at(b, 1, out)?;
        }
        Formula::Iff(a, b) => {
            fmt_at(a, 2, out)?;
            write!(out, " <-> ")?;
            fmt_at(b, 1, out)?;
        }
        Formula::Quantified(q, v, body) => {
            let kw = match q {
                Quant::Forall => "forall",
                Quant::Exists => "exists",
                Quant::ExistsEq1 => "exists=1",
            };
            write!(out, "{kw} {v} ")?;
            fmt_at(body, 0, out)?;
        }
    }
    if parens {
        write!(out, ")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_at(self, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rxy() -> Formula {
        Formula::atom("R", &["x", "y"])
    }

    #[test]
    fn free_variables_basic() {
        assert_eq!(
            free_variables(&rxy()),
            ["x".to_string(), "y".to_string()].into_iter().collect()
        );
        let f = Formula::forall("x", rxy());
        assert_eq!(free_variables(&f), ["y".to_string()].into_iter().collect());
        let sentence = Formula::forall("y", f);
        assert!(free_variables(&sentence).is_empty());
    }

    #[test]
    fn substitute_examples() {
        // Rxyz with y ↦ x gives Rxxz.
        let f = Formula::atom("R", &["x", "y", "z"]);
        let mut r = BTreeMap::new();
        r.insert("y".to_string(), "x".to_string());
        assert_eq!(
            substitute(&f, &r).unwrap(),
            Formula::atom("R", &["x", "x", "z"])
        );
        // Identity renaming is structurally the identity.
        let id = BTreeMap::new();
        assert_eq!(substitute(&f, &id).unwrap(), f);
        // x=y with y ↦ x gives x=x.
        let e = Formula::Eq("x".into(), "y".into());
        assert_eq!(
            substitute(&e, &r).unwrap(),
            Formula::Eq("x".into(), "x".into())
        );
    }

    #[test]
    fn substitute_detects_capture() {
        // ∃y R(x,y) with x ↦ y would capture.
        let f = Formula::exists("y", rxy());
        let mut r = BTreeMap::new();
        r.insert("x".to_string(), "y".to_string());
        assert!(matches!(
            substitute(&f, &r),
            Err(SyntaxError::Capture(_))
        ));
    }

    #[test]
    fn substitute_preserves_sentencehood_on_free_renaming() {
        let sentence = Formula::forall("x", Formula::exists("y", rxy()));
        let mut r = BTreeMap::new();
        r.insert("z".to_string(), "w".to_string());
        let renamed = substitute(&sentence, &r).unwrap();
        assert!(free_variables(&renamed).is_empty());
    }

    #[test]
    fn vocabulary_rejects_reserved_and_conflicts() {
        let mut v = Vocabulary::new();
        v.declare("R", 2).unwrap();
        assert!(v.declare("__A", 1).is_err());
        assert!(v.declare("R", 3).is_err());
        assert_eq!(v.fresh_name("P"), "__P0");
        v.declare_unchecked("__P0", 1).unwrap();
        assert_eq!(v.fresh_name("P"), "__P1");
    }
}
