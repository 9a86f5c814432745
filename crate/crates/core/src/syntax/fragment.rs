//! Syntactic fragment classification: FO², FO² with one functionality axiom,
//! the uniform one-dimensional fragment U₁ and its strong restriction SU₁.

use super::{free_variables, Formula, Quant, Var};
use std::collections::BTreeSet;

/// Classification flags for a sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentVerdict {
    /// Plain two-variable sentence: only the variables `x` and `y`, no
    /// counting quantifier.
    pub is_fo2: bool,
    /// Shape φ ∧ ∀x∃^{=1}y ψ(x,y) with φ and ψ in FO².
    pub is_fo2_plus_functionality: bool,
    pub is_su1: bool,
    pub is_u1: bool,
    /// Conjunction of prenex ∀*-sentences.
    pub is_forallstar_conjunction: bool,
    /// Quantifier prefix as a string over `A`/`E` when the sentence is prenex
    /// without counting quantifiers.
    pub prefix: Option<String>,
}

/// Result of the recursive U₁ membership check.
#[derive(Debug, Clone, Copy)]
struct U1Status {
    u1: bool,
    /// Also satisfies the SU₁ strengthening (every quantifier block's
    /// higher-arity atoms use exactly the block variables plus the free one).
    su1: bool,
}

const NOT_U1: U1Status = U1Status { u1: false, su1: false };

fn atom_varset(vars: &[Var]) -> BTreeSet<&Var> {
    vars.iter().collect()
}

/// Collects the leaves of a Boolean combination: higher-arity atoms go to
/// `higher`, everything else (including nested quantified formulas, unary and
/// nullary atoms, identities, constants) to `rest`. Negation is part of the
/// Boolean structure.
fn boolean_leaves<'a>(f: &'a Formula, higher: &mut Vec<&'a Formula>, rest: &mut Vec<&'a Formula>) {
    match f {
        Formula::Not(a) => boolean_leaves(a, higher, rest),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            boolean_leaves(a, higher, rest);
            boolean_leaves(b, higher, rest);
        }
        Formula::Atom(_, vars) if atom_varset(vars).len() >= 2 => higher.push(f),
        other => rest.push(other),
    }
}

fn check_u1(f: &Formula) -> U1Status {
    match f {
        Formula::True | Formula::False | Formula::Eq(..) => U1Status { u1: true, su1: true },
        Formula::Atom(_, vars) => {
            // Unary and nullary atoms are U₁ formulas; higher-arity atoms may
            // only appear as Y-atoms directly under a quantifier block.
            let ok = atom_varset(vars).len() <= 1;
            U1Status { u1: ok, su1: ok }
        }
        Formula::Not(a) => check_u1(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            let sa = check_u1(a);
            let sb = check_u1(b);
            U1Status { u1: sa.u1 && sb.u1, su1: sa.su1 && sb.su1 }
        }
        Formula::Quantified(Quant::ExistsEq1, ..) => NOT_U1,
        Formula::Quantified(q, _, _) => {
            // Maximal same-quantifier block.
            let mut block_vars: BTreeSet<Var> = BTreeSet::new();
            let mut cur = f;
            while let Formula::Quantified(q2, v, body) = cur {
                if q2 != q {
                    break;
                }
                block_vars.insert(v.clone());
                cur = body;
            }
            let free = free_variables(f);
            if free.len() > 1 {
                // One-dimensionality: quantification leaves at most one variable free.
                return NOT_U1;
            }
            let mut x: BTreeSet<Var> = block_vars;
            x.extend(free.iter().cloned());

            let mut higher = Vec::new();
            let mut rest = Vec::new();
            boolean_leaves(cur, &mut higher, &mut rest);

            // All higher-arity atoms in the body must share one variable set Y ⊆ X.
            let mut y: Option<BTreeSet<Var>> = None;
            for atom in &higher {
                let Formula::Atom(_, vars) = atom else { unreachable!() };
                let set: BTreeSet<Var> = vars.iter().cloned().collect();
                if !set.is_subset(&x) {
                    return NOT_U1;
                }
                match &y {
                    None => y = Some(set),
                    Some(prev) if *prev == set => {}
                    Some(_) => return NOT_U1,
                }
            }

            let mut su1 = match &y {
                // The strengthening requires Y to be exactly X.
                Some(set) => *set == x,
                None => true,
            };
            for leaf in rest {
                if !free_variables(leaf).is_subset(&x) {
                    return NOT_U1;
                }
                let s = check_u1(leaf);
                if !s.u1 {
                    return NOT_U1;
                }
                su1 &= s.su1;
            }
            U1Status { u1: true, su1 }
        }
    }
}

fn uses_counting(f: &Formula) -> bool {
    match f {
        Formula::Quantified(Quant::ExistsEq1, ..) => true,
        Formula::Quantified(_, _, body) => uses_counting(body),
        Formula::Not(a) => uses_counting(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            uses_counting(a) || uses_counting(b)
        }
        _ => false,
    }
}

fn is_plain_fo2(f: &Formula) -> bool {
    !uses_counting(f) && f.all_variables().iter().all(|v| v == "x" || v == "y")
}

/// Recognizes the functionality axiom ∀x∃^{=1}y ψ(x,y) with ψ in FO².
fn is_functionality_axiom(f: &Formula) -> bool {
    if let Formula::Quantified(Quant::Forall, vx, body) = f {
        if let Formula::Quantified(Quant::ExistsEq1, vy, psi) = &**body {
            return vx == "x"
                && vy == "y"
                && is_plain_fo2(psi)
                && free_variables(psi).iter().all(|v| v == "x" || v == "y");
        }
    }
    false
}

/// Classifies a sentence into the fragments handled by the engines. Scopes
/// are normalized first, so a quantifier that extends over a conjunction it
/// does not bind still classifies by the intended conjunction structure; the
/// prenex prefix is read off the sentence as written.
pub fn classify_fragment(original: &Formula) -> FragmentVerdict {
    debug_assert!(free_variables(original).is_empty(), "classify_fragment expects a sentence");
    let normalized = crate::syntax::normalize_scopes(original);
    let f = &normalized;
    let status = check_u1(f);
    let is_fo2 = is_plain_fo2(f);

    // FO² + functionality: exactly one conjunct is the axiom, the rest form an
    // FO² sentence.
    let conjuncts = f.conjuncts();
    let axioms: Vec<_> = conjuncts.iter().filter(|c| is_functionality_axiom(c)).collect();
    let others: Vec<_> = conjuncts
        .iter()
        .filter(|c| !is_functionality_axiom(c))
        .cloned()
        .collect();
    let is_fo2_plus_functionality =
        axioms.len() == 1 && others.iter().all(|c| is_plain_fo2(c));

    let is_forallstar_conjunction = conjuncts.iter().all(|c| {
        c.prenex_split()
            .is_some_and(|(prefix, _)| prefix.iter().all(|(q, _)| *q == Quant::Forall))
    });

    let prefix = original.prenex_split().and_then(|(prefix, _)| {
        prefix
            .iter()
            .map(|(q, _)| match q {
                Quant::Forall => Some('A'),
                Quant::Exists => Some('E'),
                Quant::ExistsEq1 => None,
            })
            .collect::<Option<String>>()
    });

    FragmentVerdict {
        is_fo2,
        is_fo2_plus_functionality,
        is_su1: status.su1 || is_fo2,
        is_u1: status.u1 || is_fo2,
        is_forallstar_conjunction,
        prefix,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::{parse_formula, parse_sentence, VocabMode};

    fn verdict(text: &str) -> FragmentVerdict {
        let (f, _) = parse_sentence(text, VocabMode::Inferred).unwrap();
        classify_fragment(&f)
    }

    // Open formulas are closed with universal quantifiers for classification,
    // which preserves membership in each fragment.
    fn verdict_closed(text: &str) -> FragmentVerdict {
        let (f, _) = parse_formula(text, VocabMode::Inferred).unwrap();
        let closed = free_variables(&f)
            .into_iter()
            .rev()
            .fold(f, |acc, v| Formula::forall(v, acc));
        classify_fragment(&closed)
    }

    #[test]
    fn u1_examples() {
        // ∃y∃z((¬Rxyz ∨ Tzyxx) ∧ Qy) is U₁ (and its higher-arity atoms use all of x,y,z).
        let v = verdict_closed("exists y exists z ((~R(x,y,z) | T(z,y,x,x)) & Q(y))");
        assert!(v.is_u1);

        // ∃x∃y(Sxy ∧ Sxz) violates uniformity.
        let v = verdict_closed("exists x exists y (S(x,y) & S(x,z))");
        assert!(!v.is_u1);

        // ∃x∃y(Sxy ∧ x≠z) is U₁ but not SU₁ since z ∉ {x,y}.
        let v = verdict_closed("exists x exists y (S(x,y) & ~(x = z))");
        assert!(v.is_u1 && !v.is_su1);

        // ∃x∃y∃u(Rxyu ∧ x≠u) is SU₁.
        let v = verdict("exists x exists y exists u (R(x,y,u) & ~(x = u))");
        assert!(v.is_su1);

        // ∃z∀y∀x(Txyz ∧ ∃u Sxu) is U₁.
        let v = verdict("exists z forall y forall x (T(x,y,z) & exists u S(x,u))");
        assert!(v.is_u1);

        // ∃x∃y∃z(Txyz ∧ ∃u Txyu) violates one-dimensionality.
        let v = verdict("exists x exists y exists z (T(x,y,z) & exists u T(x,y,u))");
        assert!(!v.is_u1);

        // ∃x∃y∃z diff(x,y,z) is U₁ (and SU₁).
        let v = verdict("exists x exists y exists z (~(x = y) & ~(x = z) & ~(y = z))");
        assert!(v.is_u1 && v.is_su1);
    }

    #[test]
    fn fo2_is_su1() {
        let v = verdict("forall x forall y (R(x,y) -> (R(y,x) & ~(x = y)))");
        assert!(v.is_fo2 && v.is_su1 && v.is_u1);
        assert!(!v.is_fo2_plus_functionality);
        assert_eq!(v.prefix.as_deref(), Some("AA"));
        assert!(v.is_forallstar_conjunction);
    }

    #[test]
    fn functionality_axiom_detection() {
        let v = verdict("forall x (~R(x,x)) & forall x exists=1 y R(x,y)");
        assert!(v.is_fo2_plus_functionality);
        assert!(!v.is_fo2);
        assert!(!v.is_u1);

        // The axiom alone also qualifies.
        let v = verdict("forall x exists=1 y R(x,y)");
        assert!(v.is_fo2_plus_functionality);

        // Two axioms do not.
        let v = verdict("forall x exists=1 y R(x,y) & forall x exists=1 y S(x,y)");
        assert!(!v.is_fo2_plus_functionality);
    }

    #[test]
    fn covering_node_is_u1_not_su1() {
        let v = verdict("exists x forall y forall z (R(y,z) -> (x = y | x = z))");
        assert!(v.is_u1);
        assert!(!v.is_su1);
        assert_eq!(v.prefix.as_deref(), Some("EAA"));
    }

    #[test]
    fn flag_implications() {
        for text in [
            "true",
            "forall x forall y (R(x,y) -> R(y,x))",
            "exists x forall y forall z (R(y,z) -> (x = y | x = z))",
            "forall x forall y forall z (S(x,y,z) -> S(z,y,x))",
        ] {
            let v = verdict(text);
            assert!(!v.is_su1 || v.is_u1, "{text}");
            assert!(!v.is_fo2 || v.is_u1, "{text}");
        }
    }
}
