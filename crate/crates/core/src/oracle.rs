//! Ground-truth weighted model counting by explicit enumeration of all models
//! over a fixed domain, and the first-order satisfaction evaluator used by the
//! equivalence sweeps.

use crate::syntax::{Formula, Quant, Var, Vocabulary, WeightMap};
use num::{BigRational, One, Zero};
use std::collections::BTreeMap;

/// Hard cap on the total number of fact bits `Σ_R n^arity(R)`; enumeration is
/// `2^bits` models.
pub const DEFAULT_BIT_BOUND: u32 = 24;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration requires {bits} fact bits, above the bound of {bound}")]
    BoundExceeded { bits: u32, bound: u32 },
    #[error("unbound variable {0}")]
    UnboundVariable(Var),
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
}

/// A finite model over the domain `{0, …, n-1}`: every predicate is a set of
/// tuples, stored as one bit per possible fact.
#[derive(Debug, Clone)]
pub struct GroundModel {
    pub n: usize,
    preds: Vec<(String, usize, usize)>, // name, arity, bit offset
    bits: u64,
    total_bits: u32,
}

impl GroundModel {
    pub fn layout(vocab: &Vocabulary, n: usize) -> (Vec<(String, usize, usize)>, u32) {
        let mut preds = Vec::new();
        let mut offset = 0usize;
        for (name, arity) in vocab.iter() {
            preds.push((name.clone(), arity, offset));
            offset += n.pow(arity as u32);
        }
        (preds, offset as u32)
    }

    pub fn empty(vocab: &Vocabulary, n: usize) -> GroundModel {
        let (preds, total_bits) = Self::layout(vocab, n);
        GroundModel { n, preds, bits: 0, total_bits }
    }

    pub fn from_bits(vocab: &Vocabulary, n: usize, bits: u64) -> GroundModel {
        let mut m = Self::empty(vocab, n);
        m.bits = bits;
        m
    }

    pub fn total_bits(&self) -> u32 {
        self.total_bits
    }

    fn pred_entry(&self, pred: &str) -> Option<&(String, usize, usize)> {
        self.preds.iter().find(|(p, _, _)| p == pred)
    }

    fn fact_index(&self, entry: &(String, usize, usize), tuple: &[usize]) -> usize {
        let mut idx = 0usize;
        for &t in tuple {
            idx = idx * self.n + t;
        }
        entry.2 + idx
    }

    pub fn holds(&self, pred: &str, tuple: &[usize]) -> bool {
        let entry = self.pred_entry(pred).expect("unknown predicate");
        debug_assert_eq!(entry.1, tuple.len());
        self.bits >> self.fact_index(entry, tuple) & 1 == 1
    }

    pub fn set(&mut self, pred: &str, tuple: &[usize], value: bool) {
        let entry = self.pred_entry(pred).expect("unknown predicate").clone();
        let idx = self.fact_index(&entry, tuple);
        if value {
            self.bits |= 1 << idx;
        } else {
            self.bits &= !(1 << idx);
        }
    }

    /// Product of fact weights over all positive and negative facts.
    pub fn weight(&self, weights: &WeightMap) -> BigRational {
        let mut total = BigRational::one();
        for (name, arity, offset) in &self.preds {
            let count = self.n.pow(*arity as u32);
            let mask = if count >= 64 { u64::MAX } else { (1u64 << count) - 1 };
            let pos = ((self.bits >> offset) & mask).count_ones() as usize;
            let w = weights.pos(name);
            let wbar = weights.neg(name);
            total *= pow_rat(&w, pos) * pow_rat(&wbar, count - pos);
        }
        total
    }
}

fn pow_rat(base: &BigRational, exp: usize) -> BigRational {
    num::traits::Pow::pow(base, exp)
}

/// Standard Tarskian satisfaction; `∃^{=1}` holds when exactly one witness
/// exists.
pub fn evaluate(
    f: &Formula,
    model: &GroundModel,
    assignment: &BTreeMap<Var, usize>,
) -> Result<bool, OracleError> {
    let compiled = CompiledFormula::compile(f, model)?;
    let mut env: Vec<usize> = vec![0; compiled.slots.len()];
    for (i, v) in compiled.slots.iter().enumerate() {
        if let Some(&e) = assignment.get(v) {
            env[i] = e;
        } else if compiled.free_slots.contains(&i) {
            return Err(OracleError::UnboundVariable(v.clone()));
        }
    }
    Ok(compiled.eval(model, &mut env))
}

/// Formula with variables resolved to environment slots and predicates to
/// fact-table entries, for fast repeated evaluation.
pub struct CompiledFormula {
    root: Node,
    slots: Vec<Var>,
    free_slots: Vec<usize>,
}

enum Node {
    True,
    False,
    Atom { entry: usize, var_slots: Vec<usize> },
    Eq(usize, usize),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Quant(Quant, usize, Box<Node>),
}

impl CompiledFormula {
    pub fn compile(f: &Formula, model: &GroundModel) -> Result<CompiledFormula, OracleError> {
        let mut slots: Vec<Var> = Vec::new();
        fn slot(slots: &mut Vec<Var>, v: &Var) -> usize {
            if let Some(i) = slots.iter().position(|s| s == v) {
                i
            } else {
                slots.push(v.clone());
                slots.len() - 1
            }
        }
        fn go(
            f: &Formula,
            model: &GroundModel,
            slots: &mut Vec<Var>,
        ) -> Result<Node, OracleError> {
            Ok(match f {
                Formula::True => Node::True,
                Formula::False => Node::False,
                Formula::Atom(p, vars) => {
                    let entry = model
                        .preds
                        .iter()
                        .position(|(name, _, _)| name == p)
                        .ok_or_else(|| OracleError::UnknownPredicate(p.clone()))?;
                    Node::Atom {
                        entry,
                        var_slots: vars.iter().map(|v| slot(slots, v)).collect(),
                    }
                }
                Formula::Eq(a, b) => Node::Eq(slot(slots, a), slot(slots, b)),
                Formula::Not(a) => Node::Not(Box::new(go(a, model, slots)?)),
                Formula::And(a, b) => {
                    Node::And(Box::new(go(a, model, slots)?), Box::new(go(b, model, slots)?))
                }
                Formula::Or(a, b) => {
                    Node::Or(Box::new(go(a, model, slots)?), Box::new(go(b, model, slots)?))
                }
                Formula::Implies(a, b) => {
                    Node::Implies(Box::new(go(a, model, slots)?), Box::new(go(b, model, slots)?))
                }
                Formula::Iff(a, b) => {
                    Node::Iff(Box::new(go(a, model, slots)?), Box::new(go(b, model, slots)?))
                }
                Formula::Quantified(q, v, body) => {
                    let s = slot(slots, v);
                    Node::Quant(*q, s, Box::new(go(body, model, slots)?))
                }
            })
        }
        let root = go(f, model, &mut slots)?;
        let free: Vec<usize> = crate::syntax::free_variables(f)
            .iter()
            .filter_map(|v| slots.iter().position(|s| s == v))
            .collect();
        Ok(CompiledFormula { root, slots, free_slots: free })
    }

    pub fn eval(&self, model: &GroundModel, env: &mut Vec<usize>) -> bool {
        eval_node(&self.root, model, env)
    }
}

fn eval_node(node: &Node, model: &GroundModel, env: &mut Vec<usize>) -> bool {
    match node {
        Node::True => true,
        Node::False => false,
        Node::Atom { entry, var_slots } => {
            let e = &model.preds[*entry];
            let mut idx = 0usize;
            for &s in var_slots {
                idx = idx * model.n + env[s];
            }
            model.bits >> (e.2 + idx) & 1 == 1
        }
        Node::Eq(a, b) => env[*a] == env[*b],
        Node::Not(a) => !eval_node(a, model, env),
        Node::And(a, b) => eval_node(a, model, env) && eval_node(b, model, env),
        Node::Or(a, b) => eval_node(a, model, env) || eval_node(b, model, env),
        Node::Implies(a, b) => !eval_node(a, model, env) || eval_node(b, model, env),
        Node::Iff(a, b) => eval_node(a, model, env) == eval_node(b, model, env),
        Node::Quant(q, s, body) => {
            let saved = env[*s];
            let result = match q {
                Quant::Forall => {
                    let mut ok = true;
                    for e in 0..model.n {
                        env[*s] = e;
                        if !eval_node(body, model, env) {
                            ok = false;
                            break;
                        }
                    }
                    ok
                }
                Quant::Exists => {
                    let mut ok = false;
                    for e in 0..model.n {
                        env[*s] = e;
                        if eval_node(body, model, env) {
                            ok = true;
                            break;
                        }
                    }
                    ok
                }
                Quant::ExistsEq1 => {
                    let mut count = 0;
                    for e in 0..model.n {
                        env[*s] = e;
                        if eval_node(body, model, env) {
                            count += 1;
                            if count > 1 {
                                break;
                            }
                        }
                    }
                    count == 1
                }
            };
            env[*s] = saved;
            result
        }
    }
}

/// Exact weighted model count by total enumeration.
pub fn wfomc_brute(
    f: &Formula,
    vocab: &Vocabulary,
    n: usize,
    weights: &WeightMap,
) -> Result<BigRational, OracleError> {
    wfomc_brute_bounded(f, vocab, n, weights, DEFAULT_BIT_BOUND, |_| true)
}

/// As [`wfomc_brute`] but restricted to models accepted by `filter`.
pub fn wfomc_brute_restricted(
    f: &Formula,
    vocab: &Vocabulary,
    n: usize,
    weights: &WeightMap,
    filter: impl Fn(&GroundModel) -> bool,
) -> Result<BigRational, OracleError> {
    wfomc_brute_bounded(f, vocab, n, weights, DEFAULT_BIT_BOUND, filter)
}

/// Full-control variant with an explicit bit bound.
pub fn wfomc_brute_bounded(
    f: &Formula,
    vocab: &Vocabulary,
    n: usize,
    weights: &WeightMap,
    bound: u32,
    filter: impl Fn(&GroundModel) -> bool,
) -> Result<BigRational, OracleError> {
    let mut model = GroundModel::empty(vocab, n);
    let bits = model.total_bits();
    if bits > bound.min(63) {
        return Err(OracleError::BoundExceeded { bits, bound });
    }
    let compiled = CompiledFormula::compile(f, &model)?;
    let mut env = vec![0usize; compiled.slots.len()];

    // Per-predicate weight tables indexed by the number of positive facts.
    let mut weight_tables: Vec<Vec<BigRational>> = Vec::new();
    for (name, arity, _) in &model.preds {
        let count = n.pow(*arity as u32);
        let w = weights.pos(name);
        let wbar = weights.neg(name);
        let mut table = Vec::with_capacity(count + 1);
        for pos in 0..=count {
            table.push(pow_rat(&w, pos) * pow_rat(&wbar, count - pos));
        }
        weight_tables.push(table);
    }

    let mut total = BigRational::zero();
    for bits_val in 0u64..(1u64 << bits) {
        model.bits = bits_val;
        if !compiled.eval(&model, &mut env) || !filter(&model) {
            continue;
        }
        let mut w = BigRational::one();
        for (i, (_, arity, offset)) in model.preds.iter().enumerate() {
            let count = n.pow(*arity as u32);
            let mask = if count >= 64 { u64::MAX } else { (1u64 << count) - 1 };
            let pos = ((bits_val >> offset) & mask).count_ones() as usize;
            w *= weight_tables[i][pos].clone();
        }
        total += w;
    }
    Ok(total)
}

/// Unweighted satisfying-model count; a separate pure-counting pass used to
/// sanity-check the weighted path.
pub fn count_models(f: &Formula, vocab: &Vocabulary, n: usize, bound: u32) -> Result<u64, OracleError> {
    let mut model = GroundModel::empty(vocab, n);
    let bits = model.total_bits();
    if bits > bound.min(63) {
        return Err(OracleError::BoundExceeded { bits, bound });
    }
    let compiled = CompiledFormula::compile(f, &model)?;
    let mut env = vec![0usize; compiled.slots.len()];
    let mut count = 0u64;
    for bits_val in 0u64..(1u64 << bits) {
        model.bits = bits_val;
        if compiled.eval(&model, &mut env) {
            count += 1;
        }
    }
    Ok(count)
}

/// Satisfaction-equivalence sweep: do `f` and `g` agree on every model over
/// `vocab` of size 1..=max_n?
pub fn equivalent_on_models(
    f: &Formula,
    g: &Formula,
    vocab: &Vocabulary,
    max_n: usize,
    bound: u32,
) -> Result<bool, OracleError> {
    for n in 1..=max_n {
        let mut model = GroundModel::empty(vocab, n);
        let bits = model.total_bits();
        if bits > bound.min(63) {
            return Err(OracleError::BoundExceeded { bits, bound });
        }
        let cf = CompiledFormula::compile(f, &model)?;
        let cg = CompiledFormula::compile(g, &model)?;
        let mut env_f = vec![0usize; cf.slots.len()];
        let mut env_g = vec![0usize; cg.slots.len()];
        for bits_val in 0u64..(1u64 << bits) {
            model.bits = bits_val;
            if cf.eval(&model, &mut env_f) != cg.eval(&model, &mut env_g) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::{parse_sentence, VocabMode};
    use num::BigInt;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn evaluate_examples() {
        let (f, vocab) = parse_sentence("true", VocabMode::Inferred).unwrap();
        let m = GroundModel::empty(&vocab, 2);
        assert!(evaluate(&f, &m, &BTreeMap::new()).unwrap());

        // ∀x∃^{=1}y R(x,y) on the identity relation over n=2.
        let (f, vocab) =
            parse_sentence("forall x exists=1 y R(x,y)", VocabMode::Inferred).unwrap();
        let mut m = GroundModel::empty(&vocab, 2);
        m.set("R", &[0, 0], true);
        m.set("R", &[1, 1], true);
        assert!(evaluate(&f, &m, &BTreeMap::new()).unwrap());
        m.set("R", &[0, 1], true);
        assert!(!evaluate(&f, &m, &BTreeMap::new()).unwrap());

        // Graph axiom fails on an asymmetric edge.
        let (f, vocab) = parse_sentence(
            "forall x forall y (R(x,y) -> (R(y,x) & ~(x = y)))",
            VocabMode::Inferred,
        )
        .unwrap();
        let mut m = GroundModel::empty(&vocab, 2);
        m.set("R", &[0, 1], true);
        assert!(!evaluate(&f, &m, &BTreeMap::new()).unwrap());
    }

    #[test]
    fn model_weight_examples() {
        let (_, vocab) = parse_sentence("forall x P(x)", VocabMode::Inferred).unwrap();
        let mut m = GroundModel::empty(&vocab, 1);
        let unit = WeightMap::ones(&vocab);
        assert_eq!(m.weight(&unit), rat(1));
        let mut w = WeightMap::ones(&vocab);
        w.set("P", rat(2), rat(1));
        m.set("P", &[0], true);
        assert_eq!(m.weight(&w), rat(2));
    }

    #[test]
    fn brute_examples() {
        // φ=⊤, one unary P, n=2: 4 models.
        let (_, vocab) = parse_sentence("forall x P(x)", VocabMode::Inferred).unwrap();
        let top = Formula::True;
        let unit = WeightMap::ones(&vocab);
        assert_eq!(wfomc_brute(&top, &vocab, 2, &unit).unwrap(), rat(4));
        // Same with w(P)=2, wbar(P)=1 gives (2+1)^2 = 9.
        let mut w = WeightMap::ones(&vocab);
        w.set("P", rat(2), rat(1));
        assert_eq!(wfomc_brute(&top, &vocab, 2, &w).unwrap(), rat(9));
        // Graph axiom at n=3: 2^C(3,2) = 8.
        let (f, vocab) = parse_sentence(
            "forall x forall y (R(x,y) -> (R(y,x) & ~(x = y)))",
            VocabMode::Inferred,
        )
        .unwrap();
        let unit = WeightMap::ones(&vocab);
        assert_eq!(wfomc_brute(&f, &vocab, 3, &unit).unwrap(), rat(8));
        // Pure counting pass agrees.
        assert_eq!(count_models(&f, &vocab, 3, DEFAULT_BIT_BOUND).unwrap(), 8);
    }

    #[test]
    fn restricted_filters() {
        let (f, vocab) = parse_sentence(
            "forall x forall y (R(x,y) -> (R(y,x) & ~(x = y)))",
            VocabMode::Inferred,
        )
        .unwrap();
        let unit = WeightMap::ones(&vocab);
        let all = wfomc_brute_restricted(&f, &vocab, 3, &unit, |_| true).unwrap();
        assert_eq!(all, rat(8));
        let none = wfomc_brute_restricted(&f, &vocab, 3, &unit, |_| false).unwrap();
        assert_eq!(none, rat(0));
    }

    #[test]
    fn weight_multiplicativity_over_unused_symbols() {
        // φ mentions only R; a free unary Q multiplies the count by (w+wbar)^n.
        let (f, mut vocab) = parse_sentence(
            "forall x forall y (R(x,y) -> R(y,x))",
            VocabMode::Inferred,
        )
        .unwrap();
        let base = wfomc_brute(&f, &vocab, 2, &WeightMap::ones(&vocab)).unwrap();
        vocab.declare("Q", 1).unwrap();
        let mut w = WeightMap::ones(&vocab);
        w.set("Q", rat(2), rat(3));
        let with_q = wfomc_brute(&f, &vocab, 2, &w).unwrap();
        assert_eq!(with_q, base * pow_rat(&rat(5), 2));
    }

    #[test]
    fn bound_is_enforced() {
        let (f, vocab) = parse_sentence(
            "forall x forall y forall z (S(x,y,z) -> S(z,y,x))",
            VocabMode::Inferred,
        )
        .unwrap();
        let unit = WeightMap::ones(&vocab);
        assert!(matches!(
            wfomc_brute(&f, &vocab, 3, &unit),
            Err(OracleError::BoundExceeded { .. })
        ));
    }
}
