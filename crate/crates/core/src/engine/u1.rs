//! The U₁ route: translate ∀*-sentences of U₁ into Boolean combinations of
//! ∀*-SU₁ sentences by disjunctive normal form, identity profiles, variable
//! renaming, 1-type and k-table expansion; then count through the SU₁ engine
//! with the translated constraints folded in census by census.

use super::fo2func::{EngineError, Result};
use super::su1::{count_su1_normal, su1_preprocess, CensusClause};
use crate::normalize::{
    diff_formula, eliminate_nullary, forall_conjuncts, scott_normal_form, skolemize,
    NormalizeError, ScottFragment, WeightedSentence,
};
use crate::oracle;
use crate::syntax::{classify_fragment, Formula, Quant, Var, Vocabulary};
use crate::typespace::{AtomPattern, KTableSpace, TypeSpace};
use itertools::Itertools;
use num::{BigRational, Zero};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Lit {
    Atom { pred: String, vars: Vec<Var>, sign: bool },
    Eq { a: Var, b: Var, sign: bool },
}

fn nnf(f: &Formula, positive: bool) -> Formula {
    match f {
        Formula::True => {
            if positive { Formula::True } else { Formula::False }
        }
        Formula::False => {
            if positive { Formula::False } else { Formula::True }
        }
        Formula::Atom(..) | Formula::Eq(..) => {
            if positive { f.clone() } else { f.clone().not() }
        }
        Formula::Not(a) => nnf(a, !positive),
        Formula::And(a, b) => {
            if positive {
                nnf(a, true).and(nnf(b, true))
            } else {
                nnf(a, false).or(nnf(b, false))
            }
        }
        Formula::Or(a, b) => {
            if positive {
                nnf(a, true).or(nnf(b, true))
            } else {
                nnf(a, false).and(nnf(b, false))
            }
        }
        Formula::Implies(a, b) => {
            if positive {
                nnf(a, false).or(nnf(b, true))
            } else {
                nnf(a, true).and(nnf(b, false))
            }
        }
        Formula::Iff(a, b) => {
            let pp = nnf(a, true).and(nnf(b, true));
            let nn = nnf(a, false).and(nnf(b, false));
            let pn = nnf(a, true).and(nnf(b, false));
            let np = nnf(a, false).and(nnf(b, true));
            if positive { pp.or(nn) } else { pn.or(np) }
        }
        Formula::Quantified(..) => unreachable!("dnf over quantifier-free matrices only"),
    }
}

/// Disjunctive normal form of a quantifier-free formula, as literal lists.
/// Inconsistent and trivially true literals are folded away; a disjunct that
/// becomes empty is ⊤.
fn dnf(f: &Formula) -> Vec<Vec<Lit>> {
    fn rec(f: &Formula) -> Vec<Vec<Lit>> {
        match f {
            Formula::True => vec![vec![]],
            Formula::False => vec![],
            Formula::Atom(pred, vars) => vec![vec![Lit::Atom {
                pred: pred.clone(),
                vars: vars.clone(),
                sign: true,
            }]],
            Formula::Eq(a, b) => {
                vec![vec![Lit::Eq { a: a.clone(), b: b.clone(), sign: true }]]
            }
            Formula::Not(inner) => match &**inner {
                Formula::Atom(pred, vars) => vec![vec![Lit::Atom {
                    pred: pred.clone(),
                    vars: vars.clone(),
                    sign: false,
                }]],
                Formula::Eq(a, b) => {
                    vec![vec![Lit::Eq { a: a.clone(), b: b.clone(), sign: false }]]
                }
                Formula::True => vec![],
                Formula::False => vec![vec![]],
                _ => unreachable!("input must be in negation normal form"),
            },
            Formula::Or(a, b) => {
                let mut out = rec(a);
                out.extend(rec(b));
                out
            }
            Formula::And(a, b) => {
                let left = rec(a);
                let right = rec(b);
                let mut out = Vec::new();
                for l in &left {
                    for r in &right {
                        let mut d = l.clone();
                        d.extend(r.iter().cloned());
                        out.push(d);
                    }
                }
                out
            }
            _ => unreachable!("input must be in negation normal form"),
        }
    }
    rec(&nnf(f, true))
}

/// All set partitions of {0..n-1} as class-index vectors.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut assignment = vec![0usize; n];
    fn rec(i: usize, max_class: usize, assignment: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == assignment.len() {
            out.push(assignment.clone());
            return;
        }
        for c in 0..=max_class {
            assignment[i] = c;
            rec(i + 1, max_class.max(c + 1), assignment, out);
        }
    }
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    rec(0, 0, &mut assignment, &mut out);
    out
}

/// One surviving branch of the translation: distinct renamed variables with
/// their admissible 1-types, and the shared span set of the higher-arity
/// literals with its literal constraints.
#[derive(Debug, Clone)]
pub struct DisjunctShape {
    /// Renamed distinct variables, in first-occurrence order.
    pub vars: Vec<Var>,
    /// Admissible 1-type indices per variable.
    pub var_types: Vec<Vec<usize>>,
    /// Positions (into `vars`) of the span set Y'; empty when no higher-arity
    /// literal survives.
    pub table_vars: Vec<usize>,
    /// Literal constraints over span-|Y'| atom patterns, indexed by position
    /// in `table_vars`.
    pub table_lits: Vec<(AtomPattern, bool)>,
}

/// Translates an ∃*-U₁ matrix over `vars` into disjunct shapes: one per
/// (DNF disjunct × identity profile) that survives the consistency checks.
pub fn translate_shapes(
    vars: &[Var],
    matrix: &Formula,
    space: &TypeSpace,
) -> Result<Vec<DisjunctShape>> {
    // Uniformity check on the raw matrix.
    let mut y_set: Option<BTreeSet<Var>> = None;
    check_uniformity(matrix, &mut y_set)?;

    let mut shapes = Vec::new();
    for disjunct in dnf(matrix) {
        // Quick intra-disjunct contradiction check on raw literals.
        if disjunct.iter().any(|l| {
            disjunct.iter().any(|m| match (l, m) {
                (
                    Lit::Atom { pred: p1, vars: v1, sign: s1 },
                    Lit::Atom { pred: p2, vars: v2, sign: s2 },
                ) => p1 == p2 && v1 == v2 && s1 != s2,
                _ => false,
            })
        }) {
            continue;
        }
        for partition in set_partitions(vars.len()) {
            if let Some(shape) = shape_for(vars, &disjunct, &partition, space)? {
                shapes.push(shape);
            }
        }
    }
    Ok(shapes)
}

fn check_uniformity(f: &Formula, y: &mut Option<BTreeSet<Var>>) -> Result<()> {
    match f {
        Formula::Atom(_, vs) => {
            let set: BTreeSet<Var> = vs.iter().cloned().collect();
            if set.len() >= 2 {
                match y {
                    None => *y = Some(set),
                    Some(prev) if *prev == set => {}
                    Some(_) => {
                        return Err(EngineError::Other(
                            "matrix violates the U1 uniformity condition".into(),
                        ))
                    }
                }
            }
            Ok(())
        }
        Formula::Not(a) => check_uniformity(a, y),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            check_uniformity(a, y)?;
            check_uniformity(b, y)
        }
        _ => Ok(()),
    }
}

fn shape_for(
    vars: &[Var],
    disjunct: &[Lit],
    partition: &[usize],
    space: &TypeSpace,
) -> Result<Option<DisjunctShape>> {
    let class_count = partition.iter().copied().max().map_or(0, |m| m + 1);
    // Representative variable per class: the first in order.
    let mut reps: Vec<Option<usize>> = vec![None; class_count];
    for (i, &c) in partition.iter().enumerate() {
        if reps[c].is_none() {
            reps[c] = Some(i);
        }
    }
    let rep_of = |i: usize| reps[partition[i]].unwrap();
    let var_pos = |v: &Var| vars.iter().position(|w| w == v).expect("variable in scope");

    let renamed_vars: Vec<Var> = reps.iter().map(|r| vars[r.unwrap()].clone()).collect();
    let rep_index = |i: usize| -> usize {
        let r = rep_of(i);
        reps.iter().position(|&x| x == Some(r)).unwrap()
    };

    // Unary literal constraints per class and span literals.
    let mut unary: Vec<Vec<(AtomPattern, bool)>> = vec![Vec::new(); class_count];
    let mut span_lits: Vec<(String, Vec<usize>, bool)> = Vec::new();
    for lit in disjunct {
        match lit {
            Lit::Eq { a, b, sign } => {
                let same = partition[var_pos(a)] == partition[var_pos(b)];
                // The profile fixes equalities: a literal contradicting it
                // kills the branch.
                if same != *sign {
                    return Ok(None);
                }
            }
            Lit::Atom { pred, vars: avars, sign } => {
                let classes: Vec<usize> = avars.iter().map(|v| rep_index(var_pos(v))).collect();
                let distinct: BTreeSet<usize> = classes.iter().copied().collect();
                if distinct.len() <= 1 {
                    let class = classes.first().copied().unwrap_or(0);
                    let pattern =
                        AtomPattern { pred: pred.clone(), pattern: vec![0; avars.len()] };
                    unary[class].push((pattern, *sign));
                } else {
                    span_lits.push((pred.clone(), classes, *sign));
                }
            }
        }
    }

    // The span literals share one variable set (uniformity survives renaming
    // since all pre-rename sets were equal); collect it in class order.
    let mut table_vars: Vec<usize> = span_lits
        .iter()
        .flat_map(|(_, cs, _)| cs.iter().copied())
        .unique()
        .collect();
    table_vars.sort_unstable();

    // Table literal consistency after renaming (distinct atoms collapsing to
    // the same pattern with opposite signs kill the branch).
    let mut table_lits: Vec<(AtomPattern, bool)> = Vec::new();
    for (pred, classes, sign) in &span_lits {
        let pattern: Vec<u8> = classes
            .iter()
            .map(|c| table_vars.iter().position(|t| t == c).unwrap() as u8)
            .collect();
        let pat = AtomPattern { pred: pred.clone(), pattern };
        if let Some((_, s)) = table_lits.iter().find(|(p, _)| *p == pat) {
            if s != sign {
                return Ok(None);
            }
        } else {
            table_lits.push((pat, *sign));
        }
    }

    // Admissible 1-types per class from the unary literals.
    let mut var_types = Vec::with_capacity(class_count);
    for lits in &unary {
        let mut admissible = Vec::new();
        'types: for (t, &mask) in space.one_types.iter().enumerate() {
            for (pat, sign) in lits {
                let idx = space
                    .one_atoms
                    .iter()
                    .position(|a| a == pat)
                    .ok_or_else(|| EngineError::Other(format!("unknown atom {}", pat.pred)))?;
                if (mask >> idx & 1 == 1) != *sign {
                    continue 'types;
                }
            }
            admissible.push(t);
        }
        if admissible.is_empty() {
            return Ok(None);
        }
        var_types.push(admissible);
    }

    Ok(Some(DisjunctShape { vars: renamed_vars, var_types, table_vars, table_lits }))
}

/// The conjunction of a 1-type's literals in the given variable.
pub fn one_type_formula(space: &TypeSpace, type_idx: usize, var: &Var) -> Formula {
    let mask = space.one_types[type_idx];
    let mut parts = Vec::new();
    for (i, atom) in space.one_atoms.iter().enumerate() {
        let f = Formula::Atom(atom.pred.clone(), vec![var.clone(); atom.pattern.len()]);
        parts.push(if mask >> i & 1 == 1 { f } else { f.not() });
    }
    Formula::and_all(parts)
}

fn table_formula(atoms: &[AtomPattern], mask: u64, vars: &[Var]) -> Formula {
    let mut parts = Vec::new();
    for (i, atom) in atoms.iter().enumerate() {
        let args: Vec<Var> = atom.pattern.iter().map(|&p| vars[p as usize].clone()).collect();
        let f = Formula::Atom(atom.pred.clone(), args);
        parts.push(if mask >> i & 1 == 1 { f } else { f.not() });
    }
    Formula::and_all(parts)
}

impl DisjunctShape {
    /// Expands the shape into the paper-facing disjunction of conjunctions of
    /// ∃*-SU₁ sentences: one branch per 1-type combination and consistent
    /// k-table.
    pub fn expand(&self, space: &TypeSpace, vocab: &Vocabulary) -> Result<Vec<Formula>> {
        let mut branches = Vec::new();
        let combos = self
            .var_types
            .iter()
            .map(|v| v.iter().copied())
            .multi_cartesian_product();
        let table_var_names: Vec<Var> =
            self.table_vars.iter().map(|&i| self.vars[i].clone()).collect();
        let tables: Vec<u64> = if self.table_vars.is_empty() {
            Vec::new()
        } else {
            let kt = KTableSpace::new(vocab, self.table_vars.len())?;
            kt.enumerate()
                .filter(|&mask| {
                    self.table_lits.iter().all(|(pat, sign)| {
                        let idx = kt.atoms.iter().position(|a| a == pat).unwrap();
                        (mask >> idx & 1 == 1) == *sign
                    })
                })
                .collect()
        };
        for combo in combos {
            let all_types: Vec<Formula> = combo
                .iter()
                .enumerate()
                .map(|(i, &t)| one_type_formula(space, t, &self.vars[i]))
                .collect();
            let diff_all = diff_formula(&self.vars);
            let second = exists_closure(
                &self.vars,
                Formula::and_all(all_types.clone()).and(diff_all.clone()),
            );
            if self.table_vars.is_empty() {
                branches.push(second);
                continue;
            }
            let kt = KTableSpace::new(vocab, self.table_vars.len())?;
            for &mask in &tables {
                let table_types: Vec<Formula> = self
                    .table_vars
                    .iter()
                    .map(|&i| one_type_formula(space, combo[i], &self.vars[i]))
                    .collect();
                let first = exists_closure(
                    &table_var_names,
                    Formula::and_all(table_types)
                        .and(table_formula(&kt.atoms, mask, &table_var_names))
                        .and(diff_formula(&table_var_names)),
                );
                branches.push(first.and(second.clone()));
            }
        }
        Ok(branches)
    }

    /// The census clause: table variables keep their admissible types, the
    /// remaining variables become the census-side type requirement.
    pub fn census_clause(&self) -> CensusClause {
        let table_set: BTreeSet<usize> = self.table_vars.iter().copied().collect();
        CensusClause {
            var_types: self.table_vars.iter().map(|&i| self.var_types[i].clone()).collect(),
            table_lits: self.table_lits.clone(),
            extra_types: (0..self.vars.len())
                .filter(|i| !table_set.contains(i))
                .map(|i| self.var_types[i].clone())
                .collect(),
        }
    }
}

fn exists_closure(vars: &[Var], body: Formula) -> Formula {
    vars.iter()
        .rev()
        .fold(body, |acc, v| Formula::exists(v.clone(), acc))
}

/// Translates an ∃*-sentence of U₁ into an equivalent disjunction of
/// conjunctions of ∃*-SU₁ sentences.
pub fn translate_existential_u1(sentence: &Formula, vocab: &Vocabulary) -> Result<Formula> {
    let Some((prefix, matrix)) = sentence.prenex_split() else {
        return Err(EngineError::Other("translation expects a prenex sentence".into()));
    };
    if prefix.iter().any(|(q, _)| *q != Quant::Exists) {
        return Err(EngineError::Other("translation expects an existential prefix".into()));
    }
    let vars: Vec<Var> = prefix.iter().map(|(_, v)| v.clone()).collect();
    let space = TypeSpace::new(vocab)?;
    let shapes = translate_shapes(&vars, matrix, &space)?;
    let mut branches = Vec::new();
    for shape in &shapes {
        branches.extend(shape.expand(&space, vocab)?);
    }
    Ok(Formula::or_all(branches))
}

/// Translates an ∀*-sentence of U₁ into an equivalent Boolean combination of
/// ∀*-SU₁ sentences (negate, translate the existential dual, negate back).
pub fn translate_universal_u1(sentence: &Formula, vocab: &Vocabulary) -> Result<Formula> {
    let Some((prefix, matrix)) = sentence.prenex_split() else {
        return Err(EngineError::Other("translation expects a prenex sentence".into()));
    };
    if prefix.iter().any(|(q, _)| *q != Quant::Forall) {
        return Err(EngineError::Other("translation expects a universal prefix".into()));
    }
    let dual_prefix: Vec<(Quant, Var)> =
        prefix.iter().map(|(_, v)| (Quant::Exists, v.clone())).collect();
    let dual = Formula::prenex(&dual_prefix, matrix.clone().not());
    let translated = translate_existential_u1(&dual, vocab)?;
    Ok(translated.not())
}

/// Clause form of a ∀*-U₁ conjunct for the census-folded count.
fn conjunct_clauses(
    width: usize,
    matrix: &Formula,
    space: &TypeSpace,
) -> Result<Vec<CensusClause>> {
    let vars = crate::normalize::canonical_vars(width);
    let negated = matrix.clone().not();
    let shapes = translate_shapes(&vars, &negated, space)?;
    Ok(shapes.iter().map(|s| s.census_clause()).collect())
}

/// Full U₁ pipeline: Scott normal form, Skolemization, nullary elimination;
/// per case the SU₁ conjuncts feed the census machinery directly and every
/// other conjunct contributes its translated clauses.
pub fn count_u1(ws: &WeightedSentence, n: usize) -> Result<BigRational> {
    let sentence = crate::syntax::normalize_scopes(&ws.sentence);
    let verdict = classify_fragment(&sentence);
    if !verdict.is_u1 {
        return Err(EngineError::Other("sentence is not in U1".into()));
    }
    if n <= 1 {
        return Ok(oracle::wfomc_brute(&ws.sentence, &ws.vocab, n, &ws.weights)?);
    }
    let prepared = WeightedSentence {
        sentence,
        vocab: ws.vocab.clone(),
        weights: ws.weights.clone(),
        corrections: ws.corrections.clone(),
    };
    let sc = scott_normal_form(&prepared, ScottFragment::U1)?;
    let sk = skolemize(&sc)?;
    let (cases, vocab) = eliminate_nullary(&sk.sentence, &sk.vocab, &sk.weights);

    let mut total = BigRational::zero();
    for case in cases {
        if case.case_weight.is_zero() || matches!(case.sentence, Formula::False) {
            continue;
        }
        let conjuncts = forall_conjuncts(&case.sentence).map_err(NormalizeError::from)?;
        let mut base = Vec::new();
        let mut translate = Vec::new();
        let mut dead = false;
        for (w, matrix) in conjuncts {
            if w == 0 {
                match matrix {
                    Formula::True => continue,
                    Formula::False => {
                        dead = true;
                        break;
                    }
                    m => {
                        return Err(EngineError::Other(format!("unexpected width-0 conjunct {m}")))
                    }
                }
            }
            let vars = crate::normalize::canonical_vars(w);
            let prefix: Vec<(Quant, Var)> =
                vars.iter().map(|v| (Quant::Forall, v.clone())).collect();
            let as_sentence = Formula::prenex(&prefix, matrix.clone());
            if classify_fragment(&as_sentence).is_su1 {
                base.push(as_sentence);
            } else {
                translate.push((w, matrix));
            }
        }
        if dead {
            continue;
        }
        let min_p = translate.iter().map(|(w, _)| *w).max().unwrap_or(0);
        let base_ws = WeightedSentence {
            sentence: Formula::and_all(base),
            vocab: vocab.clone(),
            weights: sk.weights.clone(),
            corrections: Vec::new(),
        };
        let normal = su1_preprocess(&base_ws, min_p)?;
        if normal.matrices.iter().any(|m| matches!(m, Formula::False)) {
            continue;
        }
        let space = TypeSpace::new(&normal.vocab)?;
        let mut clauses = Vec::new();
        for (w, matrix) in &translate {
            clauses.extend(conjunct_clauses(*w, matrix, &space)?);
        }
        total += &case.case_weight * count_su1_normal(&normal, n, &clauses)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::equivalent_on_models;
    use crate::syntax::parser::{parse_sentence, VocabMode};
    use crate::syntax::WeightMap;
    use num::BigInt;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn ws(text: &str) -> WeightedSentence {
        let (f, vocab) = parse_sentence(text, VocabMode::Inferred).unwrap();
        let f = crate::syntax::normalize_scopes(&f);
        let weights = WeightMap::ones(&vocab);
        WeightedSentence::new(f, vocab, weights)
    }

    #[test]
    fn dnf_and_partitions() {
        let (f, _) = crate::syntax::parser::parse_formula(
            "(P(x) | Q(y)) & ~R(x,y)",
            VocabMode::Inferred,
        )
        .unwrap();
        let disjuncts = dnf(&f);
        assert_eq!(disjuncts.len(), 2);
        assert_eq!(set_partitions(3).len(), 5);
        assert_eq!(set_partitions(4).len(), 15);
    }

    #[test]
    fn translate_universal_is_equivalent() {
        // ∀y∀z(Ryz → Rzy) is already SU₁; the translation must be equivalent.
        for (text, max_n) in [
            ("forall y forall z (R(y,z) -> R(z,y))", 3),
            ("forall y forall z (R(y,z) -> ~(y = z))", 3),
            // The ternary case sweeps 2^10 models at n = 2.
            ("forall x forall y forall z (S(x,y,z) -> (P(x) | y = z))", 2),
        ] {
            let input = ws(text);
            let translated = translate_universal_u1(&input.sentence, &input.vocab).unwrap();
            assert!(
                equivalent_on_models(&input.sentence, &translated, &input.vocab, max_n, 30).unwrap(),
                "{text}"
            );
        }
    }

    #[test]
    fn translate_collapsing_rename_drops_branch() {
        // ∃x∃y∃z(Rxyz ∧ ¬Ryxz ∧ …): the profile x=y collapses the two
        // literals onto one pattern with opposite signs and dies.
        let input = ws("exists x exists y exists z (R(x,y,z) & ~R(y,x,z))");
        let space = TypeSpace::new(&input.vocab).unwrap();
        let shapes = translate_shapes(
            &["x".to_string(), "y".to_string(), "z".to_string()],
            &Formula::atom("R", &["x", "y", "z"]).and(Formula::atom("R", &["y", "x", "z"]).not()),
            &space,
        )
        .unwrap();
        // No shape may merge x and y.
        for s in &shapes {
            assert!(s.vars.len() >= 2);
        }
        let translated = translate_existential_u1(&input.sentence, &input.vocab).unwrap();
        assert!(
            equivalent_on_models(&input.sentence, &translated, &input.vocab, 2, 30).unwrap()
        );
    }

    #[test]
    fn covering_node_translation_equivalent() {
        // ∃x∀y∀z(Ryz → (x=y ∨ x=z)) has an ∃-dual path through the
        // universal translation of its inner ∀∀-part.
        let (inner, vocab) = crate::syntax::parser::parse_formula(
            "forall y forall z (R(y,z) -> (x = y | x = z))",
            VocabMode::Inferred,
        )
        .unwrap();
        // Close x existentially on both sides.
        let original = Formula::exists("x", inner.clone());
        let space = TypeSpace::new(&vocab).unwrap();
        let _ = space;
        let dual = Formula::exists(
            "x",
            Formula::exists(
                "y",
                Formula::exists(
                    "z",
                    Formula::atom("R", &["y", "z"])
                        .and(Formula::Eq("x".into(), "y".into()).not())
                        .and(Formula::Eq("x".into(), "z".into()).not()),
                ),
            ),
        );
        let translated = translate_existential_u1(&dual, &vocab).unwrap();
        assert!(equivalent_on_models(&dual, &translated, &vocab, 3, 30).unwrap());
        let _ = original;
    }

    #[test]
    fn diff_sentence_counts() {
        // ∃x∃y∃z diff(x,y,z): zero below n=3, the full free product above.
        let input = ws("exists x exists y exists z (~(x = y) & ~(x = z) & ~(y = z) & (P(x) | ~P(x)))");
        assert_eq!(count_u1(&input, 2).unwrap(), rat(0));
        // n=3: all 2^3 unary assignments qualify.
        assert_eq!(count_u1(&input, 3).unwrap(), rat(8));
        assert_eq!(count_u1(&input, 4).unwrap(), rat(16));
    }

    #[test]
    fn u1_matches_oracle_on_covering_node() {
        let input = ws("exists x forall y forall z (R(y,z) -> (x = y | x = z))");
        for n in 2..=3usize {
            let expected =
                oracle::wfomc_brute(&input.sentence, &input.vocab, n, &input.weights).unwrap();
            assert_eq!(count_u1(&input, n).unwrap(), expected, "n={n}");
        }
    }
}
