//! Counting engine for the strong uniform one-dimensional fragment: the
//! surjective-completion preprocessing, the local-weight table over 1-type
//! profiles, and the master product over 1-type multiplicities.

use super::fo2func::{EngineError, Result};
use crate::combinatorics::{binomial, factorial, rat_pow};
use crate::normalize::{
    canonical_vars, eliminate_nullary, forall_conjuncts, scott_normal_form, skolemize,
    surjective_image, NormalizeError, ScottFragment, WeightedSentence,
};
use crate::oracle;
use crate::syntax::{classify_fragment, Formula, Var, Vocabulary, WeightMap};
use crate::typespace::{span_atoms, AtomPattern, TypeSpace};
use itertools::Itertools;
use num::{BigInt, BigRational, One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};

/// Exact base^exp for a nonnegative big-integer exponent.
pub fn rat_pow_bigint(base: &BigRational, exp: &BigInt) -> BigRational {
    assert!(!exp.is_negative());
    if base.is_one() {
        return BigRational::one();
    }
    let mag = exp.magnitude();
    let bits = mag.bits();
    let mut result = BigRational::one();
    for i in (0..bits).rev() {
        result = &result * &result;
        if mag.bit(i) {
            result *= base;
        }
    }
    result
}

/// Preprocessed SU₁ sentence: one matrix per width 2..=p over the canonical
/// variables, with the all-distinct guard left implicit.
#[derive(Debug, Clone)]
pub struct Su1Normal {
    pub vocab: Vocabulary,
    pub weights: WeightMap,
    pub p: usize,
    /// matrices[k-2] is the width-k matrix ψ_k.
    pub matrices: Vec<Formula>,
}

impl Su1Normal {
    /// The sentence form with explicit diff guards.
    pub fn sentence(&self) -> Formula {
        let mut out = Vec::new();
        for (i, m) in self.matrices.iter().enumerate() {
            let k = i + 2;
            let vars = canonical_vars(k);
            let guard = crate::normalize::diff_formula(&vars);
            let prefix: Vec<(crate::syntax::Quant, Var)> = vars
                .iter()
                .map(|v| (crate::syntax::Quant::Forall, v.clone()))
                .collect();
            out.push(Formula::prenex(&prefix, guard.implies(m.clone())));
        }
        Formula::and_all(out)
    }
}

/// Brings a nullary-free conjunction of ∀*-SU₁ sentences to the counting
/// shape: widths padded and merged so one conjunct exists per width up to
/// p = max(2, width, arity), a forced dummy p-ary symbol added when the
/// maximum arity falls short of p, surjective images pushed down, and the
/// width-1 conjunct folded into width 2. `min_p` lets callers reserve room
/// for extra width-m constraints folded in later.
pub fn su1_preprocess(ws: &WeightedSentence, min_p: usize) -> Result<Su1Normal> {
    let mut vocab = ws.vocab.clone();
    let mut weights = ws.weights.clone();
    if vocab.iter().any(|(_, a)| a == 0) {
        return Err(EngineError::Other(
            "su1_preprocess expects a nullary-free vocabulary".into(),
        ));
    }
    let conjuncts = forall_conjuncts(&ws.sentence).map_err(NormalizeError::from)?;
    for (w, matrix) in &conjuncts {
        if !check_su1_matrix(matrix, *w) {
            return Err(EngineError::Other(format!("non-SU1 conjunct matrix: {matrix}")));
        }
    }
    let max_width = conjuncts.iter().map(|(w, _)| *w).max().unwrap_or(0);
    let p = max_width.max(vocab.max_arity()).max(2).max(min_p);

    let mut by_width: Vec<Formula> = vec![Formula::True; p + 1];
    for (w, matrix) in conjuncts {
        if w == 0 {
            match matrix {
                Formula::True => continue,
                Formula::False => {
                    by_width[2] = Formula::False;
                    continue;
                }
                m => {
                    return Err(EngineError::Other(format!(
                        "unexpected width-0 conjunct {m}"
                    )))
                }
            }
        }
        let existing = std::mem::replace(&mut by_width[w], Formula::True);
        by_width[w] = match existing {
            Formula::True => matrix,
            prev => prev.and(matrix),
        };
    }

    // Dummy p-ary symbol forced true, when the vocabulary's arity does not
    // reach the top width.
    if vocab.max_arity() < p {
        let name = vocab.fresh_name("D");
        vocab.declare_unchecked(&name, p).unwrap();
        weights.set(&name, BigRational::one(), BigRational::one());
        let atom = Formula::Atom(name, canonical_vars(p));
        let existing = std::mem::replace(&mut by_width[p], Formula::True);
        by_width[p] = match existing {
            Formula::True => atom,
            prev => prev.and(atom),
        };
    }

    // Push surjective images down, then fold width 1 into width 2.
    for ell in (1..p).rev() {
        let wider_vars = canonical_vars(ell + 1);
        let image = surjective_image(&by_width[ell + 1], &wider_vars, ell)
            .map_err(NormalizeError::from)?;
        let existing = std::mem::replace(&mut by_width[ell], Formula::True);
        by_width[ell] = match existing {
            Formula::True => image,
            prev => prev.and(image),
        };
    }
    let width1 = std::mem::replace(&mut by_width[1], Formula::True);
    if !matches!(width1, Formula::True) {
        let existing = std::mem::replace(&mut by_width[2], Formula::True);
        by_width[2] = match existing {
            Formula::True => width1,
            prev => width1.and(prev),
        };
    }

    Ok(Su1Normal {
        vocab,
        weights,
        p,
        matrices: by_width.drain(2..=p).collect(),
    })
}

/// Higher-arity atoms of a width-w SU₁ matrix use exactly the full variable
/// set, so every atom instantiated injectively has span 1 or w.
fn check_su1_matrix(matrix: &Formula, w: usize) -> bool {
    match matrix {
        Formula::Atom(_, vs) => {
            let set: std::collections::BTreeSet<&Var> = vs.iter().collect();
            set.len() <= 1 || set.len() == w
        }
        Formula::Not(a) => check_su1_matrix(a, w),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            check_su1_matrix(a, w) && check_su1_matrix(b, w)
        }
        Formula::Quantified(..) => false,
        _ => true,
    }
}

/// A constraint produced by the U₁ → SU₁ translation, evaluated against the
/// 1-type census. The guard is an existential type requirement; when the
/// census can realize it, the table part is forbidden on every width-m
/// subset (a missing table part forbids the census outright).
#[derive(Debug, Clone)]
pub struct CensusClause {
    /// Admissible 1-types per table variable, in table-variable order.
    pub var_types: Vec<Vec<usize>>,
    /// Span-m literal constraints: atom pattern over table-variable positions
    /// plus required sign.
    pub table_lits: Vec<(AtomPattern, bool)>,
    /// Admissible 1-types for the extra variables (those outside the table
    /// atoms); they must be realized by further distinct elements.
    pub extra_types: Vec<Vec<usize>>,
}

impl CensusClause {
    pub fn width(&self) -> usize {
        self.var_types.len()
    }
}

/// Can distinct elements realizing the per-variable admissible types be drawn
/// from the capacities?
fn feasible(capacity: &mut [isize], lists: &[Vec<usize>]) -> bool {
    let Some((first, rest)) = lists.split_first() else { return true };
    for &t in first {
        if capacity[t] > 0 {
            capacity[t] -= 1;
            let ok = feasible(capacity, rest);
            capacity[t] += 1;
            if ok {
                return true;
            }
        }
    }
    false
}

/// Local-model context for one width: the span-k fact list, element
/// permutations and the shared type space.
pub struct LocalCtx {
    space: TypeSpace,
    k: usize,
    atoms: Vec<AtomPattern>,
    atom_index: BTreeMap<(String, Vec<u8>), usize>,
    perms: Vec<Vec<usize>>,
}

impl LocalCtx {
    pub fn new(space: &TypeSpace, k: usize) -> LocalCtx {
        let atoms = span_atoms(&space.vocab, k);
        let atom_index = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| ((a.pred.clone(), a.pattern.clone()), i))
            .collect();
        let perms = (0..k).permutations(k).collect();
        LocalCtx { space: space.clone(), k, atoms, atom_index, perms }
    }

    /// Compiles a quantifier-free matrix over x1..xk for one ordering:
    /// every atom is resolved to a span-k fact index or a 1-type bit.
    fn compile(&self, f: &Formula, perm: &[usize]) -> Result<LNode> {
        Ok(match f {
            Formula::True => LNode::Const(true),
            Formula::False => LNode::Const(false),
            Formula::Eq(a, b) => LNode::Const(perm[var_index(a)?] == perm[var_index(b)?]),
            Formula::Atom(pred, vs) => {
                let elems: Vec<usize> =
                    vs.iter().map(|v| var_index(v).map(|i| perm[i])).collect::<Result<_>>()?;
                let span = elems.iter().unique().count();
                if span <= 1 {
                    let elem = elems.first().copied().unwrap_or(0);
                    let pat = AtomPattern { pred: pred.clone(), pattern: vec![0; vs.len()] };
                    let idx = self
                        .space
                        .one_atoms
                        .iter()
                        .position(|a| *a == pat)
                        .ok_or_else(|| EngineError::Other(format!("unknown atom {pred}")))?;
                    LNode::TypeBit { elem, bit: idx }
                } else if span == self.k {
                    let pattern: Vec<u8> = elems.iter().map(|&e| e as u8).collect();
                    let idx = *self
                        .atom_index
                        .get(&(pred.clone(), pattern))
                        .ok_or_else(|| EngineError::Other(format!("unknown span atom {pred}")))?;
                    LNode::MaskBit(idx)
                } else {
                    return Err(EngineError::Other(format!(
                        "atom {pred} spans {span} of {} variables",
                        self.k
                    )));
                }
            }
            Formula::Not(a) => LNode::Not(Box::new(self.compile(a, perm)?)),
            Formula::And(a, b) => {
                LNode::And(Box::new(self.compile(a, perm)?), Box::new(self.compile(b, perm)?))
            }
            Formula::Or(a, b) => {
                LNode::Or(Box::new(self.compile(a, perm)?), Box::new(self.compile(b, perm)?))
            }
            Formula::Implies(a, b) => LNode::Or(
                Box::new(LNode::Not(Box::new(self.compile(a, perm)?))),
                Box::new(self.compile(b, perm)?),
            ),
            Formula::Iff(a, b) => {
                LNode::Iff(Box::new(self.compile(a, perm)?), Box::new(self.compile(b, perm)?))
            }
            Formula::Quantified(..) => {
                return Err(EngineError::Other("quantifier inside a local matrix".into()))
            }
        })
    }

    /// Per-ordering compiled clause: admissible types per element position
    /// and sign-constrained fact indices.
    fn compile_clause(&self, clause: &CensusClause, perm: &[usize]) -> CompiledClause {
        CompiledClause {
            var_types: (0..clause.width())
                .map(|j| (perm[j], clause.var_types[j].clone()))
                .collect(),
            lits: clause
                .table_lits
                .iter()
                .map(|(pat, sign)| {
                    let pattern: Vec<u8> =
                        pat.pattern.iter().map(|&v| perm[v as usize] as u8).collect();
                    (self.atom_index[&(pat.pred.clone(), pattern)], *sign)
                })
                .collect(),
        }
    }
}

enum LNode {
    Const(bool),
    MaskBit(usize),
    TypeBit { elem: usize, bit: usize },
    Not(Box<LNode>),
    And(Box<LNode>, Box<LNode>),
    Or(Box<LNode>, Box<LNode>),
    Iff(Box<LNode>, Box<LNode>),
}

impl LNode {
    fn eval(&self, type_masks: &[u64], mask: u64) -> bool {
        match self {
            LNode::Const(b) => *b,
            LNode::MaskBit(i) => mask >> i & 1 == 1,
            LNode::TypeBit { elem, bit } => type_masks[*elem] >> bit & 1 == 1,
            LNode::Not(a) => !a.eval(type_masks, mask),
            LNode::And(a, b) => a.eval(type_masks, mask) && b.eval(type_masks, mask),
            LNode::Or(a, b) => a.eval(type_masks, mask) || b.eval(type_masks, mask),
            LNode::Iff(a, b) => a.eval(type_masks, mask) == b.eval(type_masks, mask),
        }
    }
}

struct CompiledClause {
    var_types: Vec<(usize, Vec<usize>)>,
    lits: Vec<(usize, bool)>,
}

impl CompiledClause {
    fn matches(&self, types: &[usize], mask: u64) -> bool {
        self.var_types.iter().all(|(elem, lists)| lists.contains(&types[*elem]))
            && self.lits.iter().all(|(idx, sign)| (mask >> idx & 1 == 1) == *sign)
    }
}

fn var_index(v: &Var) -> Result<usize> {
    v.strip_prefix('x')
        .and_then(|d| d.parse::<usize>().ok())
        .and_then(|i| i.checked_sub(1))
        .ok_or_else(|| EngineError::Other(format!("non-canonical variable {v}")))
}

/// lw(φ_k, profile): the weighted number of span-k fact assignments on a
/// k-element labelled domain whose 1-types follow the profile representative,
/// keeping assignments where the matrix holds under every ordering, each
/// weighted by the span-k literal weights only.
pub fn local_weight(
    ctx: &LocalCtx,
    matrix: &Formula,
    profile: &[usize],
    weights: &WeightMap,
    folds: &[&CensusClause],
) -> Result<BigRational> {
    let mut types = Vec::with_capacity(ctx.k);
    for (type_idx, &count) in profile.iter().enumerate() {
        for _ in 0..count {
            types.push(type_idx);
        }
    }
    debug_assert_eq!(types.len(), ctx.k);
    let type_masks: Vec<u64> = types.iter().map(|&t| ctx.space.one_types[t]).collect();

    let compiled: Vec<LNode> =
        ctx.perms.iter().map(|p| ctx.compile(matrix, p)).collect::<Result<_>>()?;
    let compiled_folds: Vec<CompiledClause> = folds
        .iter()
        .flat_map(|c| ctx.perms.iter().map(|p| ctx.compile_clause(c, p)))
        .collect();

    // Per-atom positive/negative weights, resolved once.
    let atom_weights: Vec<(BigRational, BigRational)> = ctx
        .atoms
        .iter()
        .map(|a| (weights.pos(&a.pred), weights.neg(&a.pred)))
        .collect();

    let bits = ctx.atoms.len();
    let mut total = BigRational::zero();
    'mask: for mask in 0..(1u64 << bits) {
        for node in &compiled {
            if !node.eval(&type_masks, mask) {
                continue 'mask;
            }
        }
        for clause in &compiled_folds {
            if clause.matches(&types, mask) {
                continue 'mask;
            }
        }
        let mut w = BigRational::one();
        for (i, (pos, neg)) in atom_weights.iter().enumerate() {
            if mask >> i & 1 == 1 {
                w *= pos;
            } else {
                w *= neg;
            }
        }
        total += w;
    }
    Ok(total)
}

/// The master sum over 1-type multiplicities, with census-activated clause
/// folding for the U₁ route. Requires n ≥ 2 (smaller domains are answered by
/// the oracle upstream).
pub fn count_su1_normal(
    normal: &Su1Normal,
    n: usize,
    clauses: &[CensusClause],
) -> Result<BigRational> {
    let space = TypeSpace::new(&normal.vocab)?;
    let ell = space.num_one_types();
    let type_weights: Vec<BigRational> = space
        .one_types
        .iter()
        .map(|&m| space.one_type_weight(m, &normal.weights))
        .collect();

    let contexts: Vec<LocalCtx> = (2..=normal.p).map(|k| LocalCtx::new(&space, k)).collect();

    // Census-level clauses (no table part) exclude whole censuses; the rest
    // fold into the width-m local weights.
    let (census_only, folded): (Vec<&CensusClause>, Vec<&CensusClause>) =
        clauses.iter().partition(|c| c.var_types.is_empty());

    let mut lw_cache: HashMap<(usize, Vec<usize>, Vec<usize>), BigRational> = HashMap::new();

    let mut total = BigRational::zero();
    let mut census = vec![0usize; ell];
    enumerate_census(0, n, &mut census, &mut |census: &[usize]| -> Result<()> {
        // Census-only clauses: realizable type requirement forbids the census.
        for clause in &census_only {
            let mut cap: Vec<isize> = census.iter().map(|&c| c as isize).collect();
            if feasible(&mut cap, &clause.extra_types) {
                return Ok(());
            }
        }
        let mut term = BigRational::from_integer(factorial(n));
        for (i, &c) in census.iter().enumerate() {
            if c > 0 {
                term /= BigRational::from_integer(factorial(c));
                term *= rat_pow(&type_weights[i], c);
            }
        }
        if term.is_zero() {
            return Ok(());
        }
        for (ki, k) in (2..=normal.p).enumerate() {
            // Only profiles drawn from the census's realized types have a
            // nonzero subset count.
            for profile in supported_profiles(census, k) {
                let mut exponent = BigInt::one();
                for (i, &kcount) in profile.iter().enumerate() {
                    if kcount > 0 {
                        exponent *= binomial(census[i], kcount);
                    }
                }
                debug_assert!(!exponent.is_zero());
                // Active folds: width matches and the extra variables fit in
                // the residual census.
                let mut active_ids = Vec::new();
                let mut active: Vec<&CensusClause> = Vec::new();
                for (ci, clause) in folded.iter().enumerate() {
                    if clause.width() != k {
                        continue;
                    }
                    let mut cap: Vec<isize> = census
                        .iter()
                        .zip(&profile)
                        .map(|(&c, &p)| c as isize - p as isize)
                        .collect();
                    if feasible(&mut cap, &clause.extra_types) {
                        active_ids.push(ci);
                        active.push(clause);
                    }
                }
                let key = (k, profile.clone(), active_ids);
                let lw = match lw_cache.get(&key) {
                    Some(v) => v.clone(),
                    None => {
                        let v = local_weight(
                            &contexts[ki],
                            &normal.matrices[ki],
                            &profile,
                            &normal.weights,
                            &active,
                        )?;
                        lw_cache.insert(key, v.clone());
                        v
                    }
                };
                if lw.is_one() {
                    continue;
                }
                if lw.is_zero() {
                    term = BigRational::zero();
                    break;
                }
                term *= rat_pow_bigint(&lw, &exponent);
            }
            if term.is_zero() {
                break;
            }
        }
        total += term;
        Ok(())
    })?;
    Ok(total)
}

/// Profiles of weight k over the census's nonzero types, capped by the
/// census counts.
fn supported_profiles(census: &[usize], k: usize) -> Vec<Vec<usize>> {
    let nonzero: Vec<usize> = (0..census.len()).filter(|&i| census[i] > 0).collect();
    let mut out = Vec::new();
    let mut profile = vec![0usize; census.len()];
    fn rec(
        nonzero: &[usize],
        pos: usize,
        remaining: usize,
        census: &[usize],
        profile: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if remaining == 0 {
            out.push(profile.clone());
            return;
        }
        if pos == nonzero.len() {
            return;
        }
        let i = nonzero[pos];
        for v in 0..=remaining.min(census[i]) {
            profile[i] = v;
            rec(nonzero, pos + 1, remaining - v, census, profile, out);
        }
        profile[i] = 0;
    }
    rec(&nonzero, 0, k, census, &mut profile, &mut out);
    out
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; parts];
    fn rec(slot: usize, remaining: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slot + 1 == cur.len() {
            cur[slot] = remaining;
            out.push(cur.clone());
            return;
        }
        for v in 0..=remaining {
            cur[slot] = v;
            rec(slot + 1, remaining - v, cur, out);
        }
    }
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, total, &mut cur, &mut out);
    out
}

fn enumerate_census(
    slot: usize,
    remaining: usize,
    census: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if slot + 1 == census.len() {
        census[slot] = remaining;
        f(census)?;
        return Ok(());
    }
    for v in 0..=remaining {
        census[slot] = v;
        enumerate_census(slot + 1, remaining - v, census, f)?;
    }
    Ok(())
}

/// Full SU₁ pipeline: Scott normal form, Skolemization, nullary elimination,
/// preprocessing and the census master sum; n ≤ 1 falls back to the oracle.
pub fn count_su1_sentence(ws: &WeightedSentence, n: usize) -> Result<BigRational> {
    let sentence = crate::syntax::normalize_scopes(&ws.sentence);
    let verdict = classify_fragment(&sentence);
    if !verdict.is_su1 {
        return Err(EngineError::Other("sentence is not in SU1".into()));
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
        if case.case_weight.is_zero() {
            continue;
        }
        if matches!(case.sentence, Formula::False) {
            continue;
        }
        let case_ws = WeightedSentence {
            sentence: case.sentence,
            vocab: vocab.clone(),
            weights: sk.weights.clone(),
            corrections: Vec::new(),
        };
        let normal = su1_preprocess(&case_ws, 0)?;
        if normal.matrices.iter().any(|m| matches!(m, Formula::False)) {
            continue;
        }
        total += case.case_weight * count_su1_normal(&normal, n, &[])?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::{parse_sentence, VocabMode};

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
    fn preprocess_pads_and_folds() {
        // Width-1-only input gets padded to width 2 with the width-1 matrix
        // folded in.
        let input = ws("forall x P(x)");
        let normal = su1_preprocess(&input, 0).unwrap();
        assert_eq!(normal.p, 2);
        assert_eq!(normal.matrices.len(), 1);
        // The dummy symbol exists and the matrix mentions P on x1.
        assert!(normal.vocab.iter().any(|(_, a)| a == 2));
        let printed = normal.matrices[0].to_string();
        assert!(printed.contains("P(x1)"), "{printed}");
    }

    #[test]
    fn preprocess_idempotent_widths() {
        let input = ws("(forall x forall y forall z S(x,y,z)) & forall x forall y R(x,y)");
        let normal = su1_preprocess(&input, 0).unwrap();
        assert_eq!(normal.p, 3);
        assert_eq!(normal.matrices.len(), 2);
    }

    #[test]
    fn local_weight_examples() {
        // Matrix ⊤ with unit weights: 2^{#span-k atoms}.
        let input = ws("forall x forall y forall z S(x,y,z)");
        let vocab = input.vocab.clone();
        let space = TypeSpace::new(&vocab).unwrap();
        let ctx = LocalCtx::new(&space, 3);
        let profile = vec![3usize, 0];
        let lw = local_weight(&ctx, &Formula::True, &profile, &input.weights, &[]).unwrap();
        assert_eq!(lw, rat(64)); // 6 span-3 atoms
        // Forced-negative matrix: a single assignment survives.
        let (neg, _) = crate::syntax::parser::parse_formula(
            "~S(x1,x2,x3)",
            VocabMode::Declared(vocab.clone()),
        )
        .unwrap();
        let lw = local_weight(&ctx, &neg, &profile, &input.weights, &[]).unwrap();
        assert_eq!(lw, rat(1));
    }

    #[test]
    fn forced_negative_ternary_count() {
        // The unguarded ∀x∀y∀z ¬Sxyz kills every S-fact: exactly one model.
        let input = ws("forall x forall y forall z (~S(x,y,z))");
        let normal = su1_preprocess(&input, 0).unwrap();
        assert_eq!(count_su1_normal(&normal, 3, &[]).unwrap(), rat(1));
        // With the all-distinct guard, only the 6 injective triples are
        // constrained at n=3: 2^{27-6} models.
        let guarded = ws(
            "forall x forall y forall z ((~(x=y) & ~(x=z) & ~(y=z)) -> ~S(x,y,z))",
        );
        assert_eq!(
            count_su1_sentence(&guarded, 3).unwrap(),
            rat_pow(&rat(2), 21)
        );
    }

    #[test]
    fn graph_axiom_sequence() {
        let input = ws("forall x forall y (R(x,y) -> (R(y,x) & ~(x = y)))");
        for n in 2..=7usize {
            let expected = rat_pow(&rat(2), n * (n - 1) / 2);
            assert_eq!(count_su1_sentence(&input, n).unwrap(), expected, "n={n}");
        }
    }

    #[test]
    fn vandermonde_exponent_identity() {
        // Σ over profiles of ∏ C(nᵢ,kᵢ) = C(n,k).
        for (n_census, k) in [(vec![2usize, 3], 2usize), (vec![1, 2, 2], 3)] {
            let n: usize = n_census.iter().sum();
            let mut total = BigInt::zero();
            for profile in compositions(k, n_census.len()) {
                let mut term = BigInt::one();
                for (i, &kc) in profile.iter().enumerate() {
                    term *= binomial(n_census[i], kc);
                }
                total += term;
            }
            assert_eq!(total, binomial(n, k));
        }
    }

    #[test]
    fn big_exponent_pow() {
        let two = rat(2);
        assert_eq!(
            rat_pow_bigint(&two, &BigInt::from(10)),
            rat(1024)
        );
        assert_eq!(rat_pow_bigint(&two, &BigInt::zero()), rat(1));
    }
}
