//! Counting-preserving sentence transformations: Scott normal form, the
//! Skolemization operator, its generalized dual-block variant, nullary
//! elimination, surjective completion, diff guarding, and the two-variable
//! functionality normal form with its follow-up construction.

use crate::combinatorics::{binomial, rat_pow};
use crate::syntax::{
    classify_fragment, free_variables, substitute_free, Formula, Quant, Var, Vocabulary, WeightMap,
};
use itertools::Itertools;
use num::{BigInt, BigRational, One, Zero};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("sentence is not in the {0} fragment")]
    NotInFragment(&'static str),
    #[error("conjunct is not prenex: {0}")]
    NotPrenex(String),
    #[error("width target {ell} out of range 1..={k}")]
    WidthOutOfRange { ell: usize, k: usize },
    #[error("sentence does not have the φ ∧ ∀x∃=1y ψ(x,y) shape")]
    BadFunctionalShape,
    #[error("cannot dualize {count} quantifiers: prefix before the suffix must be universal")]
    BadDualizePrefix { count: usize },
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, NormalizeError>;

/// n-dependent correction factors that relate the transformed count back to
/// the original: original = factor(n) · transformed.
#[derive(Debug, Clone, PartialEq)]
pub enum Correction {
    /// Divide by n(n−1); requires n ≥ 2.
    DivideByOrderedPairs,
    /// Divide by n^n; requires n ≥ 1.
    DivideByNPowN,
    /// Divide by (n−1)^n; requires n ≥ 2.
    DivideByNMinus1PowN,
    /// Multiply by the free-assignment weight of all span->2 tuples of one
    /// higher-arity symbol; requires n ≥ arity.
    HigherAritySpan { pred: String, arity: usize, w: BigRational, wbar: BigRational },
}

/// Number of arity-k tuples over an n-element domain whose span exceeds two
/// elements.
pub fn span_gt2_tuples(n: usize, k: usize) -> BigInt {
    let n_big = BigInt::from(n);
    let pairs = binomial(n, 2);
    let mut nk = BigInt::one();
    for _ in 0..k {
        nk *= &n_big;
    }
    let two_k = BigInt::from(2).pow(k as u32);
    nk - n_big - two_k * &pairs + BigInt::from(2) * pairs
}

impl Correction {
    /// The multiplicative factor at domain size n, or None when n is below
    /// the correction's validity threshold (callers fall back to the oracle).
    pub fn factor(&self, n: usize) -> Option<BigRational> {
        match self {
            Correction::DivideByOrderedPairs => {
                if n < 2 {
                    return None;
                }
                let denom = BigRational::from_integer(BigInt::from(n * (n - 1)));
                Some(denom.recip())
            }
            Correction::DivideByNPowN => {
                if n < 1 {
                    return None;
                }
                Some(rat_pow(&BigRational::from_integer(n.into()), n).recip())
            }
            Correction::DivideByNMinus1PowN => {
                if n < 2 {
                    return None;
                }
                Some(rat_pow(&BigRational::from_integer((n - 1).into()), n).recip())
            }
            Correction::HigherAritySpan { arity, w, wbar, .. } => {
                if n < *arity {
                    return None;
                }
                let p = num::ToPrimitive::to_usize(&span_gt2_tuples(n, *arity))
                    .expect("span tuple count fits usize");
                Some(rat_pow(&(w + wbar), p))
            }
        }
    }
}

/// Direct binomial-sum evaluation of the higher-arity span factor
/// Σ_{i≤p} C(p,i) w^i w̄^{p−i}; cross-check for the collapsed power form.
pub fn span_factor_binomial_sum(p: usize, w: &BigRational, wbar: &BigRational) -> BigRational {
    let mut total = BigRational::zero();
    for i in 0..=p {
        total += BigRational::from_integer(binomial(p, i)) * rat_pow(w, i) * rat_pow(wbar, p - i);
    }
    total
}

impl std::fmt::Display for Correction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Correction::DivideByOrderedPairs => write!(f, "divide by n(n-1)"),
            Correction::DivideByNPowN => write!(f, "divide by n^n"),
            Correction::DivideByNMinus1PowN => write!(f, "divide by (n-1)^n"),
            Correction::HigherAritySpan { pred, arity, .. } => {
                write!(f, "multiply by free span>2 factor for {pred}/{arity}")
            }
        }
    }
}

/// A sentence with its vocabulary, weights and the ledger of pending
/// correction factors.
#[derive(Debug, Clone)]
pub struct WeightedSentence {
    pub sentence: Formula,
    pub vocab: Vocabulary,
    pub weights: WeightMap,
    pub corrections: Vec<Correction>,
}

impl WeightedSentence {
    pub fn new(sentence: Formula, vocab: Vocabulary, weights: WeightMap) -> WeightedSentence {
        let mut weights = weights;
        weights.complete(&vocab);
        WeightedSentence { sentence, vocab, weights, corrections: Vec::new() }
    }
}

/// One branch of nullary elimination.
#[derive(Debug, Clone)]
pub struct NullaryCase {
    pub assignment: BTreeMap<String, bool>,
    pub case_weight: BigRational,
    pub sentence: Formula,
}

/// Replaces every nullary predicate by each truth-value combination; the
/// weighted sum of the per-case counts recovers the original count.
pub fn eliminate_nullary(
    f: &Formula,
    vocab: &Vocabulary,
    weights: &WeightMap,
) -> (Vec<NullaryCase>, Vocabulary) {
    let nullaries = vocab.nullary_symbols();
    let mut reduced = vocab.clone();
    for p in &nullaries {
        reduced.remove(p);
    }
    if nullaries.is_empty() {
        return (
            vec![NullaryCase {
                assignment: BTreeMap::new(),
                case_weight: BigRational::one(),
                sentence: f.clone(),
            }],
            reduced,
        );
    }
    let mut cases = Vec::new();
    for bits in 0..(1u64 << nullaries.len()) {
        let mut assignment = BTreeMap::new();
        let mut weight = BigRational::one();
        for (i, p) in nullaries.iter().enumerate() {
            let value = bits >> i & 1 == 1;
            assignment.insert(p.clone(), value);
            weight *= if value { weights.pos(p) } else { weights.neg(p) };
        }
        let sentence = f.substitute_nullary(&assignment).simplify();
        cases.push(NullaryCase { assignment, case_weight: weight, sentence });
    }
    (cases, reduced)
}

// ---------------------------------------------------------------------------
// Scott normal form
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScottFragment {
    Fo2,
    U1,
}

/// Does the conjunct already have a normal-form shape: a prenex ∀*-, ∀x∃*- or
/// ∃*-sentence with quantifier-free matrix (or quantifier-free itself)?
fn conjunct_shape_ok(f: &Formula) -> bool {
    let Some((prefix, _)) = f.prenex_split() else { return false };
    shape_of_prefix(&prefix).is_some()
}

fn shape_of_prefix(prefix: &[(Quant, Var)]) -> Option<()> {
    if prefix.iter().any(|(q, _)| *q == Quant::ExistsEq1) {
        return None;
    }
    let forall_run = prefix.iter().take_while(|(q, _)| *q == Quant::Forall).count();
    let exists_run = prefix[forall_run..]
        .iter()
        .take_while(|(q, _)| *q == Quant::Exists)
        .count();
    if forall_run + exists_run != prefix.len() {
        return None;
    }
    // ∀*, ∃*, or a single leading universal before the existential block.
    if exists_run == 0 || forall_run <= 1 {
        Some(())
    } else {
        None
    }
}

struct FreshCtx<'a> {
    vocab: &'a mut Vocabulary,
    weights: &'a mut WeightMap,
    axioms: Vec<Formula>,
}

/// Replaces every maximal quantifier block (bottom-up) by a fresh unary or
/// nullary predicate, axiomatized in both directions; returns the
/// quantifier-free residue.
fn replace_blocks(f: &Formula, ctx: &mut FreshCtx<'_>) -> Result<Formula> {
    Ok(match f {
        Formula::True | Formula::False | Formula::Atom(..) | Formula::Eq(..) => f.clone(),
        Formula::Not(a) => replace_blocks(a, ctx)?.not(),
        Formula::And(a, b) => replace_blocks(a, ctx)?.and(replace_blocks(b, ctx)?),
        Formula::Or(a, b) => replace_blocks(a, ctx)?.or(replace_blocks(b, ctx)?),
        Formula::Implies(a, b) => replace_blocks(a, ctx)?.implies(replace_blocks(b, ctx)?),
        Formula::Iff(a, b) => replace_blocks(a, ctx)?.iff(replace_blocks(b, ctx)?),
        Formula::Quantified(Quant::ExistsEq1, ..) => {
            return Err(NormalizeError::Other(
                "counting quantifier inside a Scott reduction".into(),
            ))
        }
        Formula::Quantified(q, _, _) => {
            // Maximal same-quantifier block.
            let mut vars = Vec::new();
            let mut cur = f;
            while let Formula::Quantified(q2, v, body) = cur {
                if q2 != q {
                    break;
                }
                vars.push(v.clone());
                cur = body;
            }
            let body = replace_blocks(cur, ctx)?;
            let block = Formula::prenex(
                &vars.iter().map(|v| (*q, v.clone())).collect::<Vec<_>>(),
                body.clone(),
            );
            let free: Vec<Var> = free_variables(&block).into_iter().collect();
            if free.len() > 1 {
                return Err(NormalizeError::Other(format!(
                    "quantified subformula leaves {} variables free",
                    free.len()
                )));
            }
            let name = ctx.vocab.fresh_name("P");
            ctx.vocab.declare_unchecked(&name, free.len()).unwrap();
            ctx.weights.set(&name, BigRational::one(), BigRational::one());
            let head = Formula::Atom(name, free.clone());

            let q = *q;
            let dual = q.dual();
            let u_prefix: Vec<(Quant, Var)> =
                free.iter().map(|v| (Quant::Forall, v.clone())).collect();
            let block_prefix: Vec<(Quant, Var)> = vars.iter().map(|v| (q, v.clone())).collect();
            let dual_prefix: Vec<(Quant, Var)> = vars.iter().map(|v| (dual, v.clone())).collect();

            // P → ψ and ψ → P, each pulled to prenex form.
            let mut ax1 = Formula::prenex(&block_prefix, head.clone().not().or(body.clone()));
            ax1 = Formula::prenex(&u_prefix, ax1);
            let mut ax2 = Formula::prenex(&dual_prefix, body.not().or(head.clone()));
            ax2 = Formula::prenex(&u_prefix, ax2);
            ctx.axioms.push(ax1);
            ctx.axioms.push(ax2);
            head
        }
    })
}

/// Converts one conjunct to normal-form shape, pushing axioms into the
/// context. The spine of quantifiers that already matches an allowed shape is
/// preserved.
fn sc_conjunct(f: &Formula, ctx: &mut FreshCtx<'_>) -> Result<Formula> {
    if conjunct_shape_ok(f) {
        return Ok(f.clone());
    }
    // Protect a leading ∀-run, and an ∃-run after it when at most one
    // universal leads (the ∀∃* shape); everything deeper is reduced.
    let mut protected: Vec<(Quant, Var)> = Vec::new();
    let mut cur = f;
    while let Formula::Quantified(Quant::Forall, v, body) = cur {
        protected.push((Quant::Forall, v.clone()));
        cur = body;
    }
    if protected.len() <= 1 {
        while let Formula::Quantified(Quant::Exists, v, body) = cur {
            protected.push((Quant::Exists, v.clone()));
            cur = body;
        }
    }
    let body = replace_blocks(cur, ctx)?;
    Ok(Formula::prenex(&protected, body))
}

/// Scott normal form: every conjunct becomes a prenex sentence of ∀*-, ∀x∃*-
/// or ∃*-shape with a quantifier-free matrix; fresh unary and nullary symbols
/// are weighted (1,1). For FO², the ∀-conjuncts of width ≤ 2 are merged into
/// a single ∀x∀y conjunct.
pub fn scott_normal_form(ws: &WeightedSentence, fragment: ScottFragment) -> Result<WeightedSentence> {
    let verdict = classify_fragment(&ws.sentence);
    match fragment {
        ScottFragment::Fo2 if !verdict.is_fo2 => return Err(NormalizeError::NotInFragment("FO2")),
        ScottFragment::U1 if !verdict.is_u1 => return Err(NormalizeError::NotInFragment("U1")),
        _ => {}
    }
    let mut vocab = ws.vocab.clone();
    let mut weights = ws.weights.clone();
    let mut ctx = FreshCtx { vocab: &mut vocab, weights: &mut weights, axioms: Vec::new() };
    let mut conjuncts = Vec::new();
    for c in ws.sentence.conjuncts() {
        conjuncts.push(sc_conjunct(c, &mut ctx)?);
    }
    conjuncts.extend(ctx.axioms.drain(..));

    if fragment == ScottFragment::Fo2 {
        conjuncts = merge_forall2_conjuncts(conjuncts)?;
    }

    Ok(WeightedSentence {
        sentence: Formula::and_all(conjuncts),
        vocab,
        weights,
        corrections: ws.corrections.clone(),
    })
}

/// Merges all ∀-prefix conjuncts of width ≤ 2 into a single ∀x∀y conjunct
/// over the variables (x, y).
fn merge_forall2_conjuncts(conjuncts: Vec<Formula>) -> Result<Vec<Formula>> {
    let mut merged_matrix: Vec<Formula> = Vec::new();
    let mut rest = Vec::new();
    for c in conjuncts {
        let Some((prefix, matrix)) = c.prenex_split() else {
            rest.push(c);
            continue;
        };
        let all_forall = prefix.iter().all(|(q, _)| *q == Quant::Forall);
        if all_forall && (1..=2).contains(&prefix.len()) {
            let mut renaming = BTreeMap::new();
            renaming.insert(prefix[0].1.clone(), "x".to_string());
            if prefix.len() == 2 {
                renaming.insert(prefix[1].1.clone(), "y".to_string());
            }
            merged_matrix.push(substitute_free(matrix, &renaming));
        } else {
            rest.push(c);
        }
    }
    let mut out = Vec::new();
    if !merged_matrix.is_empty() {
        out.push(Formula::forall(
            "x",
            Formula::forall("y", Formula::and_all(merged_matrix)),
        ));
    }
    out.extend(rest);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Skolemization
// ---------------------------------------------------------------------------

/// The counting-preserving Skolemization operator: repeatedly eliminates the
/// outermost existential block of every conjunct; each elimination introduces
/// one fresh predicate over the leading universal variables, weighted (1,−1).
pub fn skolemize(ws: &WeightedSentence) -> Result<WeightedSentence> {
    let mut vocab = ws.vocab.clone();
    let mut weights = ws.weights.clone();
    let mut out = Vec::new();
    for c in ws.sentence.conjuncts() {
        let mut current = c.clone();
        loop {
            let Some((prefix, matrix)) = current.prenex_split() else {
                return Err(NormalizeError::NotPrenex(current.to_string()));
            };
            if prefix.iter().any(|(q, _)| *q == Quant::ExistsEq1) {
                return Err(NormalizeError::NotPrenex(current.to_string()));
            }
            let Some(first_exists) = prefix.iter().position(|(q, _)| *q == Quant::Exists) else {
                out.push(current);
                break;
            };
            let exists_run = prefix[first_exists..]
                .iter()
                .take_while(|(q, _)| *q == Quant::Exists)
                .count();
            let universal_vars: Vec<Var> =
                prefix[..first_exists].iter().map(|(_, v)| v.clone()).collect();
            let name = vocab.fresh_name("A");
            vocab.declare_unchecked(&name, universal_vars.len()).unwrap();
            weights.set(&name, BigRational::one(), -BigRational::one());
            let head = Formula::Atom(name, universal_vars);

            let mut new_prefix: Vec<(Quant, Var)> = prefix[..first_exists].to_vec();
            for (_, v) in &prefix[first_exists..first_exists + exists_run] {
                new_prefix.push((Quant::Forall, v.clone()));
            }
            for (q, v) in &prefix[first_exists + exists_run..] {
                new_prefix.push((q.dual(), v.clone()));
            }
            current = Formula::prenex(&new_prefix, head.or(matrix.clone().not()));
        }
    }
    Ok(WeightedSentence {
        sentence: Formula::and_all(out),
        vocab,
        weights,
        corrections: ws.corrections.clone(),
    })
}

/// Generalized dual-block Skolemization: dualizes the trailing `count`
/// quantifiers of a prenex sentence; the quantifiers before the suffix must
/// be universal. The fresh predicate ranges over those prefix variables and
/// is weighted (1,−1).
pub fn generalized_dual_skolemize(
    ws: &WeightedSentence,
    count: usize,
) -> Result<WeightedSentence> {
    let Some((prefix, matrix)) = ws.sentence.prenex_split() else {
        return Err(NormalizeError::NotPrenex(ws.sentence.to_string()));
    };
    if count > prefix.len() || prefix.iter().any(|(q, _)| *q == Quant::ExistsEq1) {
        return Err(NormalizeError::BadDualizePrefix { count });
    }
    let k = prefix.len() - count;
    if prefix[..k].iter().any(|(q, _)| *q != Quant::Forall) {
        return Err(NormalizeError::BadDualizePrefix { count });
    }
    let mut vocab = ws.vocab.clone();
    let mut weights = ws.weights.clone();
    let universal_vars: Vec<Var> = prefix[..k].iter().map(|(_, v)| v.clone()).collect();
    let name = vocab.fresh_name("A");
    vocab.declare_unchecked(&name, universal_vars.len()).unwrap();
    weights.set(&name, BigRational::one(), -BigRational::one());
    let head = Formula::Atom(name, universal_vars);

    let mut new_prefix: Vec<(Quant, Var)> = prefix[..k].to_vec();
    for (q, v) in &prefix[k..] {
        new_prefix.push((q.dual(), v.clone()));
    }
    Ok(WeightedSentence {
        sentence: Formula::prenex(&new_prefix, head.or(matrix.clone().not())),
        vocab,
        weights,
        corrections: ws.corrections.clone(),
    })
}

// ---------------------------------------------------------------------------
// Surjective completion and diff
// ---------------------------------------------------------------------------

pub fn canonical_vars(k: usize) -> Vec<Var> {
    (1..=k).map(|i| format!("x{i}")).collect()
}

/// diff(x₁,…,x_k): conjunction of all pairwise inequalities; ⊤ for k ≤ 1.
pub fn diff_formula(vars: &[Var]) -> Formula {
    let mut parts = Vec::new();
    for i in 0..vars.len() {
        for j in i + 1..vars.len() {
            parts.push(Formula::Eq(vars[i].clone(), vars[j].clone()).not());
        }
    }
    Formula::and_all(parts)
}

/// All surjections [k] → [ℓ] in lexicographic order.
fn surjections(k: usize, ell: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut f = vec![0usize; k];
    loop {
        if (0..ell).all(|v| f.contains(&v)) {
            out.push(f.clone());
        }
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if f[i] + 1 < ell {
                f[i] += 1;
                f[i + 1..].iter_mut().for_each(|v| *v = 0);
                break;
            }
        }
    }
}

/// The ℓ-surjective image of a width-k matrix over `vars`: the conjunction of
/// ψ(x_{f(1)},…,x_{f(k)}) over all surjections f: [k] → [ℓ].
pub fn surjective_image(matrix: &Formula, vars: &[Var], ell: usize) -> Result<Formula> {
    let k = vars.len();
    if ell < 1 || ell > k {
        return Err(NormalizeError::WidthOutOfRange { ell, k });
    }
    let mut parts = Vec::new();
    for f in surjections(k, ell) {
        let renaming: BTreeMap<Var, Var> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), vars[f[i]].clone()))
            .collect();
        parts.push(substitute_free(matrix, &renaming));
    }
    Ok(Formula::and_all(parts))
}

/// Splits a conjunction of prenex ∀*-sentences into (width, matrix) pairs
/// with matrices renamed to the canonical variables x1…xk.
pub fn forall_conjuncts(f: &Formula) -> Result<Vec<(usize, Formula)>> {
    let mut out = Vec::new();
    for c in f.conjuncts() {
        let Some((prefix, matrix)) = c.prenex_split() else {
            return Err(NormalizeError::NotPrenex(c.to_string()));
        };
        if prefix.iter().any(|(q, _)| *q != Quant::Forall) {
            return Err(NormalizeError::NotPrenex(c.to_string()));
        }
        let vars = canonical_vars(prefix.len());
        let renaming: BTreeMap<Var, Var> = prefix
            .iter()
            .enumerate()
            .map(|(i, (_, v))| (v.clone(), vars[i].clone()))
            .collect();
        out.push((prefix.len(), substitute_free(matrix, &renaming)));
    }
    Ok(out)
}

/// Surjective completion: pads widths 1…k with dummy ⊤-conjuncts, merges
/// equal widths, then pushes each ℓ-surjective image of the width-(ℓ+1)
/// matrix down into the width-ℓ matrix, top-down.
pub fn surjective_completion(f: &Formula) -> Result<Formula> {
    let conjuncts = forall_conjuncts(f)?;
    let k = conjuncts.iter().map(|(w, _)| *w).max().unwrap_or(0);
    if k == 0 {
        return Ok(f.clone());
    }
    let mut by_width: Vec<Formula> = vec![Formula::True; k + 1];
    for (w, matrix) in conjuncts {
        let existing = std::mem::replace(&mut by_width[w], Formula::True);
        by_width[w] = match existing {
            Formula::True => matrix,
            prev => prev.and(matrix),
        };
    }
    for ell in (1..k).rev() {
        let wider_vars = canonical_vars(ell + 1);
        let image = surjective_image(&by_width[ell + 1], &wider_vars, ell)?;
        let existing = std::mem::replace(&mut by_width[ell], Formula::True);
        by_width[ell] = match existing {
            Formula::True => image,
            prev => prev.and(image),
        };
    }
    let mut out = Vec::new();
    for (w, matrix) in by_width.iter().enumerate().skip(1) {
        let vars = canonical_vars(w);
        let prefix: Vec<(Quant, Var)> =
            vars.iter().map(|v| (Quant::Forall, v.clone())).collect();
        out.push(Formula::prenex(&prefix, matrix.clone()));
    }
    Ok(Formula::and_all(out))
}

/// Guards every ∀*-conjunct's matrix with all-distinct constraints:
/// ψ becomes diff(x₁,…,x_k) → ψ; diff of a single variable is ⊤.
pub fn diff_transform(f: &Formula) -> Result<Formula> {
    let conjuncts = forall_conjuncts(f)?;
    let mut out = Vec::new();
    for (w, matrix) in conjuncts {
        let vars = canonical_vars(w);
        let guard = diff_formula(&vars);
        let guarded = match guard {
            Formula::True => matrix,
            g => g.implies(matrix),
        };
        let prefix: Vec<(Quant, Var)> =
            vars.iter().map(|v| (Quant::Forall, v.clone())).collect();
        out.push(Formula::prenex(&prefix, guarded));
    }
    Ok(Formula::and_all(out))
}

// ---------------------------------------------------------------------------
// FO² + functionality normal form and the Φ construction
// ---------------------------------------------------------------------------

/// Normal form ∀x∀y φ₁ ∧ ∀x∃^{=1}y φ₂(x,y) with quantifier-free matrices.
#[derive(Debug, Clone)]
pub struct Phi0 {
    pub forall_matrix: Formula,
    pub exists_matrix: Formula,
}

/// Result of normalizing an FO²-with-functionality sentence: one nullary-free
/// case per nullary assignment, a shared final vocabulary and weights, and
/// pending corrections.
#[derive(Debug, Clone)]
pub struct Fo2FuncNormal {
    pub cases: Vec<(BigRational, Phi0)>,
    pub vocab: Vocabulary,
    pub weights: WeightMap,
    pub corrections: Vec<Correction>,
}

/// Brings φ ∧ ∀x∃^{=1}y ψ(x,y) to the normal form: Scott-reduces the inner
/// quantified subformulas of ψ and all of φ, Skolemizes the ∀∃-conjuncts,
/// merges every ∀-conjunct into one ∀x∀y matrix, eliminates nullaries, adds a
/// dummy binary symbol when none exists, and records span corrections for
/// symbols of arity above two.
pub fn fo2func_normalize(ws: &WeightedSentence) -> Result<Fo2FuncNormal> {
    let verdict = classify_fragment(&ws.sentence);
    if !verdict.is_fo2_plus_functionality {
        return Err(NormalizeError::BadFunctionalShape);
    }
    let mut axiom_body = None;
    let mut rest = Vec::new();
    for c in ws.sentence.conjuncts() {
        match c {
            Formula::Quantified(Quant::Forall, vx, inner) if vx == "x" => match &**inner {
                Formula::Quantified(Quant::ExistsEq1, vy, psi) if vy == "y" => {
                    if axiom_body.replace((**psi).clone()).is_some() {
                        return Err(NormalizeError::BadFunctionalShape);
                    }
                }
                _ => rest.push(c.clone()),
            },
            _ => rest.push(c.clone()),
        }
    }
    let psi = axiom_body.ok_or(NormalizeError::BadFunctionalShape)?;

    let mut vocab = ws.vocab.clone();
    let mut weights = ws.weights.clone();

    // Reduce the inner quantified subformulas of ψ; the produced axioms are
    // sentences and join the universal part.
    let mut ctx = FreshCtx { vocab: &mut vocab, weights: &mut weights, axioms: Vec::new() };
    let psi_qf = replace_blocks(&psi, &mut ctx)?;
    let psi_axioms = std::mem::take(&mut ctx.axioms);
    drop(ctx);

    let phi_part = WeightedSentence {
        sentence: Formula::and_all(rest.into_iter().chain(psi_axioms).collect()),
        vocab,
        weights,
        corrections: Vec::new(),
    };
    let sc = scott_normal_form(&phi_part, ScottFragment::Fo2)?;
    let sk = skolemize(&sc)?;
    let mut vocab = sk.vocab;
    let mut weights = sk.weights;

    // All conjuncts are now ∀* of width ≤ 2 or quantifier-free; merge into a
    // single matrix over (x, y).
    let mut matrix_parts = Vec::new();
    for c in sk.sentence.conjuncts() {
        let Some((prefix, matrix)) = c.prenex_split() else {
            return Err(NormalizeError::NotPrenex(c.to_string()));
        };
        if prefix.len() > 2 || prefix.iter().any(|(q, _)| *q != Quant::Forall) {
            return Err(NormalizeError::Other(format!(
                "unexpected conjunct shape after Skolemization: {c}"
            )));
        }
        let mut renaming = BTreeMap::new();
        if !prefix.is_empty() {
            renaming.insert(prefix[0].1.clone(), "x".to_string());
        }
        if prefix.len() == 2 {
            renaming.insert(prefix[1].1.clone(), "y".to_string());
        }
        match matrix {
            Formula::True => {}
            m => matrix_parts.push(substitute_free(m, &renaming)),
        }
    }
    let forall_matrix = Formula::and_all(matrix_parts);

    // Nullary elimination over both matrices jointly, by pairing them in a
    // scratch conjunction.
    let paired = forall_matrix.and(psi_qf);
    let (cases, mut vocab_reduced) = eliminate_nullary(&paired, &vocab, &weights);
    std::mem::swap(&mut vocab, &mut vocab_reduced);

    // Dummy binary symbol, forced true everywhere, when no symbol of arity
    // two or more exists.
    let needs_binary = !vocab.iter().any(|(_, a)| a >= 2);
    let dummy = if needs_binary {
        let name = vocab.fresh_name("R");
        vocab.declare_unchecked(&name, 2).unwrap();
        weights.set(&name, BigRational::one(), BigRational::one());
        Some(name)
    } else {
        None
    };

    let mut corrections = ws.corrections.clone();
    for (name, arity) in vocab.iter() {
        if arity > 2 {
            corrections.push(Correction::HigherAritySpan {
                pred: name.clone(),
                arity,
                w: weights.pos(name),
                wbar: weights.neg(name),
            });
        }
    }

    let mut out_cases = Vec::new();
    for case in cases {
        let Formula::And(forall_part, exists_part) = case.sentence.clone() else {
            // simplify() may collapse the scratch pair; re-split manually.
            let resub = paired.substitute_nullary(&case.assignment);
            let Formula::And(f, e) = resub else { unreachable!() };
            out_cases.push((
                case.case_weight,
                finish_case(f.simplify(), e.simplify(), &dummy),
            ));
            continue;
        };
        out_cases.push((
            case.case_weight,
            finish_case(*forall_part, *exists_part, &dummy),
        ));
    }

    Ok(Fo2FuncNormal { cases: out_cases, vocab, weights, corrections })
}

fn finish_case(forall_matrix: Formula, exists_matrix: Formula, dummy: &Option<String>) -> Phi0 {
    let forall_matrix = match dummy {
        Some(name) => forall_matrix.and(Formula::atom(name.clone(), &["x", "y"])),
        None => forall_matrix,
    };
    Phi0 { forall_matrix, exists_matrix }
}

/// The Φ construction for Φ₀ = ∀x∀y φ₀∀ ∧ ∀x∃^{=1}y φ₀∃: rebuilds the
/// existential matrix so witnesses are always distinct, routing would-be
/// self-witnesses through two fresh unary markers S and T. Counting is
/// restricted to models where S and T are distinct singletons and divided by
/// n(n−1); the case n = 1 is answered by the oracle.
#[derive(Debug, Clone)]
pub struct PhiConstruction {
    pub forall_matrix: Formula,
    pub exists_matrix: Formula,
    pub s_pred: String,
    pub t_pred: String,
    pub vocab: Vocabulary,
    pub weights: WeightMap,
    pub corrections: Vec<Correction>,
}

pub fn build_phi_from_phi0(
    phi0: &Phi0,
    vocab: &Vocabulary,
    weights: &WeightMap,
) -> Result<PhiConstruction> {
    let mut vocab = vocab.clone();
    let mut weights = weights.clone();
    let s_pred = vocab.fresh_name("S");
    vocab.declare_unchecked(&s_pred, 1).unwrap();
    weights.set(&s_pred, BigRational::one(), BigRational::one());
    let t_pred = vocab.fresh_name("T");
    vocab.declare_unchecked(&t_pred, 1).unwrap();
    weights.set(&t_pred, BigRational::one(), BigRational::one());

    let mut to_x = BTreeMap::new();
    to_x.insert("y".to_string(), "x".to_string());
    let exists_xx = substitute_free(&phi0.exists_matrix, &to_x);

    let neq = Formula::Eq("x".into(), "y".into()).not();
    let forall_matrix = phi0.forall_matrix.clone().and(
        neq.clone()
            .and(exists_xx.clone())
            .and(phi0.exists_matrix.clone())
            .not(),
    );
    let branch1 = exists_xx.clone().and(Formula::atom(s_pred.clone(), &["y"]));
    let branch2 = exists_xx
        .clone()
        .and(Formula::atom(s_pred.clone(), &["x"]))
        .and(Formula::atom(t_pred.clone(), &["y"]));
    let branch3 = exists_xx.not().and(phi0.exists_matrix.clone());
    let exists_matrix = neq.and(branch1.or(branch2).or(branch3));

    Ok(PhiConstruction {
        forall_matrix,
        exists_matrix,
        s_pred,
        t_pred,
        vocab,
        weights,
        corrections: vec![Correction::DivideByOrderedPairs],
    })
}

impl PhiConstruction {
    /// The sentence form ∀x∀y Φ∀ ∧ ∀x∃^{=1}y Φ∃.
    pub fn sentence(&self) -> Formula {
        let universal = Formula::forall(
            "x",
            Formula::forall("y", self.forall_matrix.clone()),
        );
        let existential = Formula::forall(
            "x",
            Formula::exists_eq1("y", self.exists_matrix.clone()),
        );
        universal.and(existential)
    }
}

/// Prints ∀*-conjunct structure for the normalize CLI output.
pub fn describe_corrections(corrections: &[Correction]) -> String {
    if corrections.is_empty() {
        "identity".to_string()
    } else {
        corrections.iter().map(|c| c.to_string()).join("; ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::{parse_sentence, VocabMode};

    fn ws(text: &str) -> WeightedSentence {
        let (f, vocab) = parse_sentence(text, VocabMode::Inferred).unwrap();
        let f = crate::syntax::normalize_scopes(&f);
        let weights = WeightMap::ones(&vocab);
        WeightedSentence::new(f, vocab, weights)
    }

    #[test]
    fn scott_keeps_normal_sentences() {
        let input = ws("forall x forall y (R(x,y) -> R(y,x))");
        let out = scott_normal_form(&input, ScottFragment::Fo2).unwrap();
        assert_eq!(out.sentence, input.sentence);
        assert_eq!(out.vocab.len(), 1);
    }

    #[test]
    fn scott_splits_nested_quantifiers() {
        // ∀x∃y(Rxy ∧ ∀x Sxy): the inner block becomes a fresh unary predicate
        // axiomatized in both directions.
        let input = ws("forall x exists y (R(x,y) & forall x S(x,y))");
        let out = scott_normal_form(&input, ScottFragment::Fo2).unwrap();
        assert!(out.vocab.contains("__P0"));
        assert_eq!(out.vocab.arity("__P0"), Some(1));
        let conjuncts = out.sentence.conjuncts().len();
        assert!(conjuncts >= 3, "expected split into prenex conjuncts, got {}", conjuncts);
        for c in out.sentence.conjuncts() {
            assert!(c.prenex_split().is_some(), "non-prenex conjunct {c}");
        }
        assert_eq!(out.weights.pos("__P0"), BigRational::one());
        assert_eq!(out.weights.neg("__P0"), BigRational::one());
    }

    #[test]
    fn skolemize_forall_exists() {
        // ∀x∃y ψ(x,y) becomes ∀x∀y(Ax ∨ ¬ψ) with A unary weighted (1,−1).
        let input = ws("forall x exists y R(x,y)");
        let out = skolemize(&input).unwrap();
        assert!(out.vocab.contains("__A0"));
        assert_eq!(out.vocab.arity("__A0"), Some(1));
        assert_eq!(out.weights.pos("__A0"), BigRational::one());
        assert_eq!(out.weights.neg("__A0"), -BigRational::one());
        let (prefix, _) = out.sentence.prenex_split().unwrap();
        assert!(prefix.iter().all(|(q, _)| *q == Quant::Forall));
        assert_eq!(prefix.len(), 2);
        // An already-universal conjunct is unchanged.
        let input = ws("forall x forall y R(x,y)");
        let out = skolemize(&input).unwrap();
        assert_eq!(out.sentence, input.sentence);
    }

    #[test]
    fn dual_skolemize_shapes() {
        let input = ws("forall x forall y forall z (S(x,y,z))");
        // Dualizing all three gives an ∃∃∃ prefix.
        let out = generalized_dual_skolemize(&input, 3).unwrap();
        let (prefix, _) = out.sentence.prenex_split().unwrap();
        assert!(prefix.iter().all(|(q, _)| *q == Quant::Exists));
        assert_eq!(out.vocab.arity("__A0"), Some(0));
        // Dualizing the last quantifier gives ∀∀∃.
        let out = generalized_dual_skolemize(&input, 1).unwrap();
        let (prefix, _) = out.sentence.prenex_split().unwrap();
        let kinds: Vec<Quant> = prefix.iter().map(|(q, _)| *q).collect();
        assert_eq!(kinds, vec![Quant::Forall, Quant::Forall, Quant::Exists]);
        assert_eq!(out.vocab.arity("__A0"), Some(2));
    }

    #[test]
    fn nullary_elimination_cases() {
        let (f, vocab) = parse_sentence("N & forall x P(x)", VocabMode::Inferred).unwrap();
        let mut weights = WeightMap::ones(&vocab);
        weights.set("N", BigRational::from_integer(2.into()), BigRational::from_integer(3.into()));
        let (cases, reduced) = eliminate_nullary(&f, &vocab, &weights);
        assert_eq!(cases.len(), 2);
        assert!(!reduced.contains("N"));
        let weights_seen: Vec<BigRational> = cases.iter().map(|c| c.case_weight.clone()).collect();
        assert!(weights_seen.contains(&BigRational::from_integer(2.into())));
        assert!(weights_seen.contains(&BigRational::from_integer(3.into())));
        // No nullaries: single unit case.
        let (f, vocab) = parse_sentence("forall x P(x)", VocabMode::Inferred).unwrap();
        let (cases, _) = eliminate_nullary(&f, &vocab, &WeightMap::ones(&vocab));
        assert_eq!(cases.len(), 1);
        assert_eq!(cases[0].case_weight, BigRational::one());
    }

    #[test]
    fn surjective_image_examples() {
        let vars = canonical_vars(3);
        let matrix = Formula::Atom("S".into(), vars.clone());
        // ℓ=2: the six surjections [3]→[2].
        let image = surjective_image(&matrix, &vars, 2).unwrap();
        assert_eq!(image.conjuncts().len(), 6);
        // ℓ=k: permutations.
        let image = surjective_image(&matrix, &vars, 3).unwrap();
        assert_eq!(image.conjuncts().len(), 6);
        // ℓ=1: all variables identified.
        let image = surjective_image(&matrix, &vars, 1).unwrap();
        assert_eq!(
            image,
            Formula::atom("S", &["x1", "x1", "x1"])
        );
        assert!(surjective_image(&matrix, &vars, 0).is_err());
        assert!(surjective_image(&matrix, &vars, 4).is_err());
    }

    #[test]
    fn completion_has_one_conjunct_per_width() {
        let input = ws("forall x forall y forall z S(x,y,z) & forall x forall y R(x,y)");
        let out = surjective_completion(&input.sentence).unwrap();
        let widths: Vec<usize> = forall_conjuncts(&out)
            .unwrap()
            .iter()
            .map(|(w, _)| *w)
            .collect();
        assert_eq!(widths, vec![1, 2, 3]);
        // Single width-1 conjunct: unchanged apart from dummy padding.
        let single = ws("forall x P(x)");
        let out = surjective_completion(&single.sentence).unwrap();
        let widths: Vec<usize> = forall_conjuncts(&out)
            .unwrap()
            .iter()
            .map(|(w, _)| *w)
            .collect();
        assert_eq!(widths, vec![1]);
    }

    #[test]
    fn diff_guards_by_width() {
        let input = ws("forall x P(x) & forall x forall y R(x,y)");
        let out = diff_transform(&input.sentence).unwrap();
        let conjs = forall_conjuncts(&out).unwrap();
        // Width 1: unchanged; width 2: guarded by x1 ≠ x2.
        assert_eq!(conjs[0].1, Formula::atom("P", &["x1"]));
        assert!(matches!(conjs[1].1, Formula::Implies(..)));
    }

    #[test]
    fn fo2func_normalize_basic() {
        let input = ws("forall x (~R(x,x)) & forall x exists=1 y R(x,y)");
        let normal = fo2func_normalize(&input).unwrap();
        assert_eq!(normal.cases.len(), 1);
        let phi0 = &normal.cases[0].1;
        assert!(phi0.forall_matrix.is_quantifier_free());
        assert!(phi0.exists_matrix.is_quantifier_free());
        assert!(normal.corrections.is_empty());
        // A binary symbol is present, so no dummy was added.
        assert_eq!(normal.vocab.len(), 1);
    }

    #[test]
    fn fo2func_normalize_adds_dummy_binary() {
        let input = ws("forall x exists=1 y (P(x) | ~P(y))");
        let normal = fo2func_normalize(&input).unwrap();
        assert!(normal.vocab.iter().any(|(_, a)| a == 2));
    }

    #[test]
    fn fo2func_rejects_wrong_shape() {
        let input = ws("forall x forall y R(x,y)");
        assert!(fo2func_normalize(&input).is_err());
    }

    #[test]
    fn phi_construction_shape() {
        let input = ws("forall x (~R(x,x)) & forall x exists=1 y R(x,y)");
        let normal = fo2func_normalize(&input).unwrap();
        let phi = build_phi_from_phi0(&normal.cases[0].1, &normal.vocab, &normal.weights).unwrap();
        assert!(phi.vocab.contains(&phi.s_pred));
        assert!(phi.vocab.contains(&phi.t_pred));
        assert_eq!(phi.corrections, vec![Correction::DivideByOrderedPairs]);
        let sentence = phi.sentence();
        assert!(classify_fragment(&sentence).is_fo2_plus_functionality);
    }

    #[test]
    fn span_factor_forms_agree() {
        let w = BigRational::from_integer(2.into());
        let wbar = BigRational::from_integer(3.into());
        for p in 0..=12usize {
            assert_eq!(
                span_factor_binomial_sum(p, &w, &wbar),
                rat_pow(&(w.clone() + wbar.clone()), p)
            );
        }
        // p(3,3) = 27 − 3 − 8·3 + 2·3 = 6.
        assert_eq!(span_gt2_tuples(3, 3), BigInt::from(6));
    }
}
