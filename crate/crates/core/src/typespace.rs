//! Enumeration and algebra of 1-types, k-tables and 2-types over a
//! vocabulary: coherence, witnessing, inversion, compatibility and type
//! weights.
//!
//! Types are stored as bit vectors over a canonically ordered atom list; the
//! order is the lexical order on (predicate name, variable pattern), which
//! makes inversion and hashing cheap and keeps enumeration reproducible.

use crate::syntax::{Formula, Var, Vocabulary, WeightMap};
use itertools::Itertools;
use num::{BigRational, One};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("table arity {k} exceeds the maximum symbol arity {max}")]
    ArityTooLarge { k: usize, max: usize },
    #[error("atom space of {0} literals exceeds the 63-bit type representation")]
    TooManyAtoms(usize),
    #[error("formula mentions symbol {0} outside the type vocabulary")]
    UnknownSymbol(String),
    #[error("formula is not quantifier-free over the expected variables")]
    BadMatrix,
}

/// An atom shape: predicate plus, for every argument position, which of the
/// `k` distinguished variables fills it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomPattern {
    pub pred: String,
    pub pattern: Vec<u8>,
}

impl AtomPattern {
    /// Swaps the two distinguished variables of a span-2 pattern.
    fn transposed(&self) -> AtomPattern {
        AtomPattern {
            pred: self.pred.clone(),
            pattern: self.pattern.iter().map(|&v| 1 - v).collect(),
        }
    }
}

/// A maximally consistent set of literals over a fixed atom list, stored as a
/// sign bit vector (bit set = positive literal).
pub type SignMask = u64;

/// The shared atom universe for 1-types and 2-tables over a vocabulary.
#[derive(Debug, Clone)]
pub struct TypeSpace {
    pub vocab: Vocabulary,
    /// Atoms in the single variable v₁ (includes repeated-variable
    /// higher-arity atoms such as S(v₁,v₁,v₁)); one per symbol of arity ≥ 1.
    pub one_atoms: Vec<AtomPattern>,
    /// Atoms whose variable multiset covers exactly {v₁,v₂}.
    pub table_atoms: Vec<AtomPattern>,
    /// For each table atom, the index of its transposed pattern.
    table_transpose: Vec<usize>,
    pub one_types: Vec<SignMask>,
    pub tables: Vec<SignMask>,
}

fn patterns_for(pred: &str, arity: usize, k: usize) -> Vec<AtomPattern> {
    // All arity-tuples over k distinguished variables whose variable set is
    // exactly {0..k-1}.
    let mut out = Vec::new();
    let mut tuple = vec![0u8; arity];
    loop {
        let span = tuple.iter().unique().count();
        if span == k {
            out.push(AtomPattern { pred: pred.to_string(), pattern: tuple.clone() });
        }
        // next tuple in base-k counting
        let mut i = arity;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if (tuple[i] as usize) + 1 < k {
                tuple[i] += 1;
                for t in tuple.iter_mut().skip(i + 1) {
                    *t = 0;
                }
                break;
            }
        }
    }
}

/// Enumerates the atoms whose variable multiset covers exactly {v₁,…,v_k},
/// in canonical (predicate, pattern) order.
pub fn span_atoms(vocab: &Vocabulary, k: usize) -> Vec<AtomPattern> {
    let mut atoms = Vec::new();
    for (pred, arity) in vocab.iter() {
        if arity >= k && k >= 1 {
            atoms.extend(patterns_for(pred, arity, k));
        }
    }
    atoms.sort();
    atoms
}

fn enumerate_masks(count: usize) -> Result<Vec<SignMask>, TypeError> {
    if count >= 63 {
        return Err(TypeError::TooManyAtoms(count));
    }
    Ok((0..(1u64 << count)).collect())
}

impl TypeSpace {
    /// Builds the space of 1-types and 2-tables. The vocabulary must be free
    /// of nullary symbols.
    pub fn new(vocab: &Vocabulary) -> Result<TypeSpace, TypeError> {
        debug_assert!(
            vocab.iter().all(|(_, a)| a >= 1),
            "typespace expects a nullary-free vocabulary"
        );
        let one_atoms = span_atoms(vocab, 1);
        let table_atoms = span_atoms(vocab, 2);
        let table_transpose = table_atoms
            .iter()
            .map(|a| {
                let t = a.transposed();
                table_atoms.iter().position(|b| *b == t).unwrap()
            })
            .collect();
        let one_types = enumerate_masks(one_atoms.len())?;
        let tables = enumerate_masks(table_atoms.len())?;
        Ok(TypeSpace {
            vocab: vocab.clone(),
            one_atoms,
            table_atoms,
            table_transpose,
            one_types,
            tables,
        })
    }

    pub fn num_one_types(&self) -> usize {
        self.one_types.len()
    }

    pub fn num_tables(&self) -> usize {
        self.tables.len()
    }

    /// Transposes every literal of a 2-table (the table of the inverse 2-type).
    pub fn transpose_table(&self, table: SignMask) -> SignMask {
        let mut out = 0u64;
        for (i, &j) in self.table_transpose.iter().enumerate() {
            if table >> i & 1 == 1 {
                out |= 1 << j;
            }
        }
        out
    }

    /// Product of literal weights of a 1-type.
    pub fn one_type_weight(&self, mask: SignMask, weights: &WeightMap) -> BigRational {
        mask_weight(&self.one_atoms, mask, weights)
    }

    /// Product of literal weights of a 2-table.
    pub fn table_weight(&self, mask: SignMask, weights: &WeightMap) -> BigRational {
        mask_weight(&self.table_atoms, mask, weights)
    }

    /// Human-readable conjunction form of a 1-type, in variable `v`.
    pub fn show_one_type(&self, mask: SignMask, v: &str) -> String {
        show_mask(&self.one_atoms, mask, &[v])
    }

    /// Human-readable conjunction form of a 2-table over variables `x`, `y`.
    pub fn show_table(&self, mask: SignMask, x: &str, y: &str) -> String {
        show_mask(&self.table_atoms, mask, &[x, y])
    }
}

fn mask_weight(atoms: &[AtomPattern], mask: SignMask, weights: &WeightMap) -> BigRational {
    let mut w = BigRational::one();
    for (i, atom) in atoms.iter().enumerate() {
        if mask >> i & 1 == 1 {
            w *= weights.pos(&atom.pred);
        } else {
            w *= weights.neg(&atom.pred);
        }
    }
    w
}

fn show_mask(atoms: &[AtomPattern], mask: SignMask, vars: &[&str]) -> String {
    if atoms.is_empty() {
        return "true".to_string();
    }
    atoms
        .iter()
        .enumerate()
        .map(|(i, atom)| {
            let args = atom
                .pattern
                .iter()
                .map(|&p| vars[p as usize])
                .collect::<Vec<_>>()
                .join(",");
            let lit = if atom.pattern.is_empty() {
                atom.pred.clone()
            } else {
                format!("{}({})", atom.pred, args)
            };
            if mask >> i & 1 == 1 {
                lit
            } else {
                format!("~{lit}")
            }
        })
        .join(" & ")
}

/// A k-table for arbitrary k ≥ 2: a total sign assignment over the atoms
/// spanning exactly {v₁,…,v_k}. Identity literals are never included.
#[derive(Debug, Clone)]
pub struct KTableSpace {
    pub k: usize,
    pub atoms: Vec<AtomPattern>,
}

impl KTableSpace {
    pub fn new(vocab: &Vocabulary, k: usize) -> Result<KTableSpace, TypeError> {
        if k < 2 || k > vocab.max_arity() {
            return Err(TypeError::ArityTooLarge { k, max: vocab.max_arity() });
        }
        let atoms = span_atoms(vocab, k);
        if atoms.len() >= 63 {
            return Err(TypeError::TooManyAtoms(atoms.len()));
        }
        Ok(KTableSpace { k, atoms })
    }

    pub fn enumerate(&self) -> impl Iterator<Item = SignMask> + '_ {
        0..(1u64 << self.atoms.len())
    }

    pub fn count(&self) -> u64 {
        1u64 << self.atoms.len()
    }

    pub fn weight(&self, mask: SignMask, weights: &WeightMap) -> BigRational {
        mask_weight(&self.atoms, mask, weights)
    }
}

/// A 2-type α₁βα₂: two 1-types joined by a 2-table, together with x≠y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoType {
    pub first: usize,
    pub table: usize,
    pub second: usize,
}

impl TwoType {
    /// The 2-type τ'(x,y) ≡ τ(y,x): ends swapped, table transposed.
    pub fn inverse(&self, space: &TypeSpace) -> TwoType {
        let t = space.transpose_table(space.tables[self.table]);
        let table = space.tables.iter().position(|&m| m == t).unwrap();
        TwoType { first: self.second, table, second: self.first }
    }

    pub fn is_symmetric(&self, space: &TypeSpace) -> bool {
        *self == self.inverse(space)
    }
}

/// How the 2-type instantiates a matrix over (x, y): which end plays x.
#[derive(Debug, Clone, Copy)]
pub enum Instantiation {
    XY,
    YX,
    XX,
    YY,
}

/// Evaluates a quantifier-free matrix over variables {x, y} under the total
/// literal assignment of a 2-type (x≠y holds by definition).
pub fn eval_matrix(
    space: &TypeSpace,
    tau: &TwoType,
    matrix: &Formula,
    inst: Instantiation,
) -> Result<bool, TypeError> {
    let first = space.one_types[tau.first];
    let table = space.tables[tau.table];
    let second = space.one_types[tau.second];
    eval_matrix_node(space, first, table, second, matrix, inst)
}

fn lookup_atom(
    space: &TypeSpace,
    first: SignMask,
    table: SignMask,
    second: SignMask,
    pred: &str,
    roles: &[u8],
) -> Result<bool, TypeError> {
    // roles: which end (0 = first, 1 = second) fills each argument position.
    if !space.vocab.contains(pred) {
        return Err(TypeError::UnknownSymbol(pred.to_string()));
    }
    let span = roles.iter().unique().count();
    if span <= 1 {
        let end = roles.first().copied().unwrap_or(0);
        let pat = AtomPattern { pred: pred.to_string(), pattern: vec![0; roles.len()] };
        let idx = space
            .one_atoms
            .iter()
            .position(|a| *a == pat)
            .ok_or_else(|| TypeError::UnknownSymbol(pred.to_string()))?;
        let mask = if end == 0 { first } else { second };
        Ok(mask >> idx & 1 == 1)
    } else {
        let pat = AtomPattern { pred: pred.to_string(), pattern: roles.to_vec() };
        let idx = space
            .table_atoms
            .iter()
            .position(|a| *a == pat)
            .ok_or_else(|| TypeError::UnknownSymbol(pred.to_string()))?;
        Ok(table >> idx & 1 == 1)
    }
}

fn eval_matrix_node(
    space: &TypeSpace,
    first: SignMask,
    table: SignMask,
    second: SignMask,
    f: &Formula,
    inst: Instantiation,
) -> Result<bool, TypeError> {
    // Maps the matrix variable to the 2-type end it denotes under the
    // instantiation: 0 = first end, 1 = second end.
    let role_of = |v: &Var| -> u8 {
        let x_is = match inst {
            Instantiation::XY => (0, 1),
            Instantiation::YX => (1, 0),
            Instantiation::XX => (0, 0),
            Instantiation::YY => (1, 1),
        };
        if v == "x" {
            x_is.0
        } else {
            x_is.1
        }
    };
    Ok(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(p, vars) => {
            let roles: Vec<u8> = vars.iter().map(role_of).collect();
            lookup_atom(space, first, table, second, p, &roles)?
        }
        Formula::Eq(a, b) => role_of(a) == role_of(b),
        Formula::Not(a) => !eval_matrix_node(space, first, table, second, a, inst)?,
        Formula::And(a, b) => {
            eval_matrix_node(space, first, table, second, a, inst)?
                && eval_matrix_node(space, first, table, second, b, inst)?
        }
        Formula::Or(a, b) => {
            eval_matrix_node(space, first, table, second, a, inst)?
                || eval_matrix_node(space, first, table, second, b, inst)?
        }
        Formula::Implies(a, b) => {
            !eval_matrix_node(space, first, table, second, a, inst)?
                || eval_matrix_node(space, first, table, second, b, inst)?
        }
        Formula::Iff(a, b) => {
            eval_matrix_node(space, first, table, second, a, inst)?
                == eval_matrix_node(space, first, table, second, b, inst)?
        }
        Formula::Quantified(..) => return Err(TypeError::BadMatrix),
    })
}

/// τ ⊨ φ∀(x,y) ∧ φ∀(y,x) ∧ φ∀(x,x) ∧ φ∀(y,y): entailment is propositional
/// evaluation since 2-types are complete literal assignments.
pub fn is_coherent(space: &TypeSpace, tau: &TwoType, forall_matrix: &Formula) -> Result<bool, TypeError> {
    Ok(eval_matrix(space, tau, forall_matrix, Instantiation::XY)?
        && eval_matrix(space, tau, forall_matrix, Instantiation::YX)?
        && eval_matrix(space, tau, forall_matrix, Instantiation::XX)?
        && eval_matrix(space, tau, forall_matrix, Instantiation::YY)?)
}

/// Coherent and entailing the existential matrix in the (x, y) direction.
pub fn is_witnessing(
    space: &TypeSpace,
    tau: &TwoType,
    exists_matrix: &Formula,
    forall_matrix: &Formula,
) -> Result<bool, TypeError> {
    Ok(is_coherent(space, tau, forall_matrix)?
        && eval_matrix(space, tau, exists_matrix, Instantiation::XY)?)
}

/// σ is compatible with τ when σ's second 1-type equals τ's first 1-type.
pub fn compatible(sigma: &TwoType, tau: &TwoType) -> bool {
    sigma.second == tau.first
}

/// Enumerates all 2-types in canonical order (first, table, second).
pub fn enumerate_two_types(space: &TypeSpace) -> Vec<TwoType> {
    let mut out = Vec::new();
    for first in 0..space.num_one_types() {
        for table in 0..space.num_tables() {
            for second in 0..space.num_one_types() {
                out.push(TwoType { first, table, second });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::{parse_formula, VocabMode};
    use num::BigInt;

    fn vocab(decls: &[(&str, usize)]) -> Vocabulary {
        let mut v = Vocabulary::new();
        for (name, arity) in decls {
            v.declare(name, *arity).unwrap();
        }
        v
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn one_type_counts() {
        // η = {R binary, P unary}: four 1-types.
        let space = TypeSpace::new(&vocab(&[("R", 2), ("P", 1)])).unwrap();
        assert_eq!(space.num_one_types(), 4);
        // η = {P unary}: two.
        let space = TypeSpace::new(&vocab(&[("P", 1)])).unwrap();
        assert_eq!(space.num_one_types(), 2);
        // η = {S ternary}: two (the single atom Sxxx).
        let space = TypeSpace::new(&vocab(&[("S", 3)])).unwrap();
        assert_eq!(space.num_one_types(), 2);
        assert_eq!(space.one_atoms.len(), 1);
    }

    #[test]
    fn table_counts() {
        // η = {S binary}: 4 tables over {Sxy, Syx}.
        let space = TypeSpace::new(&vocab(&[("S", 2)])).unwrap();
        assert_eq!(space.num_tables(), 4);
        // η = {R ternary, S binary}: 6 ternary span-2 atoms plus 2 binary.
        let space = TypeSpace::new(&vocab(&[("R", 3), ("S", 2)])).unwrap();
        assert_eq!(space.table_atoms.len(), 8);
        assert_eq!(space.num_tables(), 256);
        // Unary-only vocabulary: the single empty table.
        let space = TypeSpace::new(&vocab(&[("P", 1)])).unwrap();
        assert_eq!(space.num_tables(), 1);
        assert_eq!(KTableSpace::new(&vocab(&[("P", 1)]), 2).err().is_some(), true);
    }

    #[test]
    fn k_table_spaces() {
        let v = vocab(&[("R", 3), ("S", 2)]);
        let k3 = KTableSpace::new(&v, 3).unwrap();
        // Ternary atoms spanning exactly three variables: 3! = 6.
        assert_eq!(k3.atoms.len(), 6);
        assert!(KTableSpace::new(&v, 4).is_err());
    }

    #[test]
    fn type_weights() {
        let v = vocab(&[("R", 2), ("P", 1)]);
        let space = TypeSpace::new(&v).unwrap();
        let unit = WeightMap::ones(&v);
        for &mask in &space.one_types {
            assert_eq!(space.one_type_weight(mask, &unit), rat(1));
        }
        // OneType {Rxx⁺, Px⁻} with w(R)=2, wbar(P)=3 gives 6.
        let mut w = WeightMap::ones(&v);
        w.set("R", rat(2), rat(1));
        w.set("P", rat(1), rat(3));
        let idx_p = space.one_atoms.iter().position(|a| a.pred == "P").unwrap();
        let idx_r = space.one_atoms.iter().position(|a| a.pred == "R").unwrap();
        let mask = 1u64 << idx_r; // Rxx positive, Px negative
        let _ = idx_p;
        assert_eq!(space.one_type_weight(mask, &w), rat(6));
        // Empty table of a unary-only vocabulary has weight 1.
        let space = TypeSpace::new(&vocab(&[("P", 1)])).unwrap();
        assert_eq!(space.table_weight(0, &WeightMap::ones(&vocab(&[("P", 1)]))), rat(1));
    }

    #[test]
    fn inverse_is_involutive_and_transposes() {
        let v = vocab(&[("S", 2)]);
        let space = TypeSpace::new(&v).unwrap();
        for tau in enumerate_two_types(&space) {
            assert_eq!(tau.inverse(&space).inverse(&space), tau);
        }
        // Table {Sxy⁺, Syx⁻} transposes to {Sxy⁻, Syx⁺}.
        let sxy = space
            .table_atoms
            .iter()
            .position(|a| a.pattern == vec![0, 1])
            .unwrap();
        let syx = space
            .table_atoms
            .iter()
            .position(|a| a.pattern == vec![1, 0])
            .unwrap();
        assert_eq!(space.transpose_table(1 << sxy), 1 << syx);
    }

    #[test]
    fn coherence_and_witnessing() {
        let v = vocab(&[("R", 2)]);
        let space = TypeSpace::new(&v).unwrap();
        let (top, _) = parse_formula("true", VocabMode::Declared(v.clone())).unwrap();
        let all = enumerate_two_types(&space);
        // φ∀ = ⊤: every 2-type coherent.
        assert!(all.iter().all(|t| is_coherent(&space, t, &top).unwrap()));

        // φ∀ = Rxy→Ryx: a type with Rxy⁺, Ryx⁻ is incoherent.
        let (sym, _) = parse_formula("R(x,y) -> R(y,x)", VocabMode::Declared(v.clone())).unwrap();
        let rxy = space.table_atoms.iter().position(|a| a.pattern == vec![0, 1]).unwrap();
        let table_asym = 1u64 << rxy;
        let t_idx = space.tables.iter().position(|&m| m == table_asym).unwrap();
        let tau = TwoType { first: 0, table: t_idx, second: 0 };
        assert!(!is_coherent(&space, &tau, &sym).unwrap());

        // φ∀ = ¬Rxx with a positive Rxx one-type: incoherent via the (x,x) instantiation.
        let (irr, _) = parse_formula("~R(x,x)", VocabMode::Declared(v.clone())).unwrap();
        let tau = TwoType { first: 1, table: 0, second: 1 };
        assert!(!is_coherent(&space, &tau, &irr).unwrap());

        // φ∃ = Rxy: witnessing iff coherent and the table holds Rxy⁺.
        let (ex, _) = parse_formula("R(x,y)", VocabMode::Declared(v.clone())).unwrap();
        for tau in &all {
            let expected = is_coherent(&space, tau, &top).unwrap()
                && space.tables[tau.table] >> rxy & 1 == 1;
            assert_eq!(is_witnessing(&space, tau, &ex, &top).unwrap(), expected);
        }
        // φ∃ = ⊥: no witnessing types.
        let (bot, _) = parse_formula("false", VocabMode::Declared(v)).unwrap();
        assert!(all.iter().all(|t| !is_witnessing(&space, t, &bot, &top).unwrap()));
    }

    #[test]
    fn compatibility_is_one_type_equality() {
        let a = TwoType { first: 0, table: 0, second: 1 };
        let b = TwoType { first: 1, table: 0, second: 0 };
        assert!(compatible(&a, &b));
        assert!(compatible(&b, &a));
        let c = TwoType { first: 0, table: 0, second: 0 };
        assert!(!compatible(&a, &c));
        // Not symmetric in general.
        assert!(compatible(&c, &a) && !compatible(&a, &c));
    }

    #[test]
    fn canonical_order_is_stable() {
        let v = vocab(&[("R", 2), ("P", 1)]);
        let space = TypeSpace::new(&v).unwrap();
        let mut atoms = space.table_atoms.clone();
        let orig = atoms.clone();
        atoms.sort();
        assert_eq!(atoms, orig);
        let types = enumerate_two_types(&space);
        let mut sorted = types.clone();
        sorted.sort_by_key(|t| (t.first, t.table, t.second));
        assert_eq!(types, sorted);
    }
}
