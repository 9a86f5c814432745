//! Counting engine for two-variable logic with one functionality axiom:
//! witnessing-type index, per-pair palettes, the pair-connection functions
//! with their full case dispatch, and the master sums over multiplicity
//! configurations.
//!
//! The master sums are evaluated on two routes. The direct route enumerates
//! multiplicity configurations literally and multiplies pair-connection
//! values; it is exponential in the number of live cells and serves as a
//! cross-check. The production route evaluates the same sum by block totals
//! only: with totals fixed, summing the per-block cell multinomials against
//! the pair formulas collapses into coefficient extraction from a quadratic
//! exponential (anti-involutive counts contribute e^{(t-1)qu - q²u²/2},
//! matchings e^{qu²/2}, cross matchings e^{quu'}, nowhere-inverse pairs
//! e^{au+bu'-quu'}), which needs only polynomially many terms.

use crate::combinatorics::{
    binomial, bipartite_nowhere_inverse, cross_block_matching, factorial, rat_pow,
    within_block_antiinvolutive, within_block_matching, Palette,
};
use crate::normalize::{
    build_phi_from_phi0, fo2func_normalize, Correction, Fo2FuncNormal, Phi0, WeightedSentence,
};
use crate::oracle;
use crate::syntax::{Formula, Vocabulary, WeightMap};
use crate::typespace::{
    compatible, enumerate_two_types, eval_matrix, is_coherent, is_witnessing, Instantiation,
    TwoType, TypeSpace,
};
use num::{BigInt, BigRational, One, Zero};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Normalize(#[from] crate::normalize::NormalizeError),
    #[error(transparent)]
    Types(#[from] crate::typespace::TypeError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, EngineError>;

/// One witnessing 2-type with its precomputed flags.
#[derive(Debug, Clone)]
pub struct BlockType {
    pub tau: TwoType,
    pub table_weight: BigRational,
    pub both_ways: bool,
    pub self_inverse: bool,
    /// Index of the inverse within Λ, when the inverse is witnessing too.
    pub inverse: Option<usize>,
}

/// The ordered set Λ of witnessing 2-types plus everything the master sums
/// need: one-type weights and the per-one-type-pair bulk table sums.
pub struct BlockTypeIndex {
    pub space: TypeSpace,
    pub blocks: Vec<BlockType>,
    pub one_type_weights: Vec<BigRational>,
    /// s[a][b] = Σ weight(β) over tables β such that the 2-type aβb is
    /// coherent and neither it nor its inverse is witnessing.
    pub bulk_sums: Vec<Vec<BigRational>>,
    weights: WeightMap,
    forall_matrix: Formula,
    exists_matrix: Formula,
    palette_cache: std::cell::RefCell<std::collections::HashMap<(usize, usize), Palette>>,
}

impl BlockTypeIndex {
    pub fn lambda_len(&self) -> usize {
        self.blocks.len()
    }
}

/// Builds Λ in canonical order together with the palette sums.
pub fn build_block_index(
    forall_matrix: &Formula,
    exists_matrix: &Formula,
    vocab: &Vocabulary,
    weights: &WeightMap,
) -> Result<BlockTypeIndex> {
    let space = TypeSpace::new(vocab)?;
    let mut blocks = Vec::new();
    for tau in enumerate_two_types(&space) {
        if is_witnessing(&space, &tau, exists_matrix, forall_matrix)? {
            let inv = tau.inverse(&space);
            let both_ways = is_witnessing(&space, &inv, exists_matrix, forall_matrix)?;
            blocks.push(BlockType {
                tau,
                table_weight: space.table_weight(space.tables[tau.table], weights),
                both_ways,
                self_inverse: inv == tau,
                inverse: None,
            });
        }
    }
    // Resolve inverse indices within Λ.
    let taus: Vec<TwoType> = blocks.iter().map(|b| b.tau).collect();
    for b in blocks.iter_mut() {
        let inv = b.tau.inverse(&space);
        b.inverse = taus.iter().position(|t| *t == inv);
    }

    let one_type_weights = space
        .one_types
        .iter()
        .map(|&m| space.one_type_weight(m, weights))
        .collect();

    let num_one = space.num_one_types();
    let mut bulk_sums = vec![vec![BigRational::zero(); num_one]; num_one];
    for a in 0..num_one {
        for b in 0..num_one {
            let mut sum = BigRational::zero();
            for t in 0..space.num_tables() {
                let delta = TwoType { first: a, table: t, second: b };
                if table_ok(&space, &delta, exists_matrix, forall_matrix)? {
                    sum += space.table_weight(space.tables[t], weights);
                }
            }
            bulk_sums[a][b] = sum;
        }
    }

    Ok(BlockTypeIndex {
        space,
        blocks,
        one_type_weights,
        bulk_sums,
        weights: weights.clone(),
        forall_matrix: forall_matrix.clone(),
        exists_matrix: exists_matrix.clone(),
        palette_cache: Default::default(),
    })
}

/// A table qualifies for the bulk palette between two blocks when the
/// resulting 2-type is coherent and neither it nor its inverse is witnessing.
fn table_ok(
    space: &TypeSpace,
    delta: &TwoType,
    exists_matrix: &Formula,
    forall_matrix: &Formula,
) -> Result<bool> {
    Ok(is_coherent(space, delta, forall_matrix)?
        && !eval_matrix(space, delta, exists_matrix, Instantiation::XY)?
        && !eval_matrix(space, &delta.inverse(space), exists_matrix, Instantiation::XY)?)
}

/// The weighted colour palette between two blocks: symmetric and directed
/// bulk table weights plus the witness table weights y (σ's) and z (τ's).
#[derive(Debug, Clone)]
pub struct PairPalette {
    pub palette: Palette,
    pub y: BigRational,
    pub z: BigRational,
}

/// Palette for the unordered block pair (σ, τ), σ ≤ τ. Unsymmetric tables
/// whose two orientations are both admissible enter as one directed colour;
/// a table admissible in only one orientation acts as a symmetric colour.
pub fn pair_palette(index: &BlockTypeIndex, sigma: usize, tau: usize) -> Result<PairPalette> {
    let a = index.blocks[sigma].tau.first;
    let b = index.blocks[tau].tau.first;
    if let Some(p) = index.palette_cache.borrow().get(&(a, b)) {
        return Ok(PairPalette {
            palette: p.clone(),
            y: index.blocks[sigma].table_weight.clone(),
            z: index.blocks[tau].table_weight.clone(),
        });
    }
    let space = &index.space;
    let mut symmetric = Vec::new();
    let mut directed = Vec::new();
    for t in 0..space.num_tables() {
        let mask = space.tables[t];
        let transposed = space.transpose_table(mask);
        let ok = table_ok(
            space,
            &TwoType { first: a, table: t, second: b },
            &index.exists_matrix,
            &index.forall_matrix,
        )?;
        if transposed == mask {
            if ok {
                symmetric.push(space.table_weight(mask, &index.weights));
            }
        } else if mask < transposed {
            let t_rev = space.tables.iter().position(|&m| m == transposed).unwrap();
            let ok_rev = table_ok(
                space,
                &TwoType { first: a, table: t_rev, second: b },
                &index.exists_matrix,
                &index.forall_matrix,
            )?;
            let w = space.table_weight(mask, &index.weights);
            match (ok, ok_rev) {
                (true, true) => directed.push(w),
                (true, false) | (false, true) => symmetric.push(w),
                (false, false) => {}
            }
        }
    }
    let palette = Palette { symmetric, directed };
    index.palette_cache.borrow_mut().insert((a, b), palette.clone());
    Ok(PairPalette {
        palette,
        y: index.blocks[sigma].table_weight.clone(),
        z: index.blocks[tau].table_weight.clone(),
    })
}

/// Cell multiplicities indexed by ordered block-type pairs, with the derived
/// block totals. Cells absent from the map are zero.
#[derive(Debug, Clone, Default)]
pub struct MultiplicityConfig {
    pub cells: BTreeMap<(usize, usize), usize>,
    pub totals: Vec<usize>,
}

impl MultiplicityConfig {
    pub fn new(lambda_len: usize) -> MultiplicityConfig {
        MultiplicityConfig { cells: BTreeMap::new(), totals: vec![0; lambda_len] }
    }

    pub fn cell(&self, sigma: usize, tau: usize) -> usize {
        self.cells.get(&(sigma, tau)).copied().unwrap_or(0)
    }

    pub fn set_cell(&mut self, sigma: usize, tau: usize, value: usize) {
        let old = self.cell(sigma, tau);
        self.totals[sigma] = self.totals[sigma] - old + value;
        if value == 0 {
            self.cells.remove(&(sigma, tau));
        } else {
            self.cells.insert((sigma, tau), value);
        }
    }

    pub fn total(&self, sigma: usize) -> usize {
        self.totals[sigma]
    }

    pub fn domain_size(&self) -> usize {
        self.totals.iter().sum()
    }
}

/// The weighted number of ways to connect blocks B_σ and B_τ with 2-tables,
/// as a function of the four extents (n_στ, n_σ, n_τσ, n_τ). Full case
/// dispatch over both-ways witnessing, inversitude and compatibility.
pub fn m_pair(
    index: &BlockTypeIndex,
    sigma: usize,
    tau: usize,
    n_st: usize,
    n_s: usize,
    n_ts: usize,
    n_t: usize,
) -> Result<BigRational> {
    debug_assert!(sigma <= tau);
    let bs = &index.blocks[sigma];
    let bt = &index.blocks[tau];
    let pal = pair_palette(index, sigma, tau)?;
    let zero = BigRational::zero();

    if sigma == tau {
        debug_assert_eq!(n_st, n_ts);
        let edges_free = || {
            let e = binomial(n_s, 2);
            labelling_pow(&pal.palette, &e)
        };
        // Incompatible with itself: witnesses inside the block are impossible.
        if !compatible(&bs.tau, &bs.tau) {
            return Ok(if n_st != 0 { zero } else { edges_free() });
        }
        if !bs.both_ways {
            return Ok(within_block_antiinvolutive(n_st, n_s, &pal.palette, &pal.y));
        }
        if bs.self_inverse {
            return Ok(within_block_matching(n_st, n_s, &pal.palette, &pal.y));
        }
        // Both ways witnessing but not self-inverse: no valid assignment
        // unless the cell is empty.
        return Ok(if n_st != 0 { zero } else { edges_free() });
    }

    // Incompatibility in a direction forces that cell to be empty.
    if (n_st != 0 && !compatible(&bs.tau, &bt.tau)) || (n_ts != 0 && !compatible(&bt.tau, &bs.tau))
    {
        return Ok(zero);
    }
    let inverses = bs.inverse == Some(tau);
    if inverses {
        return Ok(cross_block_matching(n_st, n_s, n_ts, n_t, &pal.palette, &pal.y));
    }
    match (bs.both_ways, bt.both_ways) {
        (true, true) => {
            // Both both-ways but not inverses: only the all-bulk assignment.
            if n_st != 0 || n_ts != 0 {
                Ok(zero)
            } else {
                Ok(labelling_weight_usize(&pal.palette, n_s * n_t))
            }
        }
        (true, false) => {
            if n_st != 0 {
                Ok(zero)
            } else {
                Ok(bipartite_nowhere_inverse(0, n_s, n_ts, n_t, &pal.palette, &pal.y, &pal.z))
            }
        }
        (false, true) => {
            if n_ts != 0 {
                Ok(zero)
            } else {
                Ok(bipartite_nowhere_inverse(n_st, n_s, 0, n_t, &pal.palette, &pal.y, &pal.z))
            }
        }
        (false, false) => {
            Ok(bipartite_nowhere_inverse(n_st, n_s, n_ts, n_t, &pal.palette, &pal.y, &pal.z))
        }
    }
}

fn labelling_weight_usize(palette: &Palette, edges: usize) -> BigRational {
    rat_pow(&palette.edge_sum(), edges)
}

fn labelling_pow(palette: &Palette, edges: &BigInt) -> BigRational {
    let e = num::ToPrimitive::to_usize(edges).expect("edge count fits usize");
    rat_pow(&palette.edge_sum(), e)
}

/// N_στ with a full multiplicity configuration as input.
pub fn n_pair(
    index: &BlockTypeIndex,
    sigma: usize,
    tau: usize,
    config: &MultiplicityConfig,
) -> Result<BigRational> {
    m_pair(
        index,
        sigma,
        tau,
        config.cell(sigma, tau),
        config.total(sigma),
        config.cell(tau, sigma),
        config.total(tau),
    )
}

/// Direct enumeration of the weighted ways to connect two blocks: all pairs
/// of witness functions validated against the mutual-edge rules, each times
/// the bulk-labelling weight of the untouched edges. Test oracle for
/// [`m_pair`]; block sizes are expected to be tiny.
pub fn enumerate_pair_weight(
    index: &BlockTypeIndex,
    sigma: usize,
    tau: usize,
    n_st: usize,
    n_s: usize,
    n_ts: usize,
    n_t: usize,
) -> Result<BigRational> {
    let bs = &index.blocks[sigma];
    let bt = &index.blocks[tau];
    let pal = pair_palette(index, sigma, tau)?;
    let mut total = BigRational::zero();

    // A nonempty cell with an empty witness block admits no function.
    if sigma != tau && ((n_st > 0 && n_t == 0) || (n_ts > 0 && n_s == 0)) {
        return Ok(total);
    }

    if sigma == tau {
        debug_assert_eq!(n_st, n_ts);
        if n_s == 0 && n_st == 0 {
            return Ok(BigRational::one());
        }
        // Witness assignments f: C_σσ → B_σ.
        let mut f = vec![0usize; n_st];
        loop {
            let mut ok = n_st == 0 || compatible(&bs.tau, &bs.tau);
            let mut covered = 0usize;
            let mut witness_weight = BigRational::one();
            if ok {
                'check: for (u, &v) in f.iter().enumerate() {
                    if v == u {
                        ok = false;
                        break 'check;
                    }
                    let mutual = v < n_st && f[v] == u;
                    if mutual {
                        if !bs.self_inverse {
                            ok = false;
                            break 'check;
                        }
                        if u < v {
                            covered += 1;
                            witness_weight *= &pal.y;
                        }
                    } else {
                        if bs.both_ways {
                            ok = false;
                            break 'check;
                        }
                        covered += 1;
                        witness_weight *= &pal.y;
                    }
                }
            }
            if ok {
                let edges = n_s * (n_s - 1) / 2 - covered;
                total += witness_weight * labelling_weight_usize(&pal.palette, edges);
            }
            if !advance(&mut f, n_s) {
                break;
            }
        }
        return Ok(total);
    }

    let mut f = vec![0usize; n_st];
    loop {
        let mut g = vec![0usize; n_ts];
        loop {
            let mut ok = (n_st == 0 || compatible(&bs.tau, &bt.tau))
                && (n_ts == 0 || compatible(&bt.tau, &bs.tau));
            let mut covered = 0usize;
            let mut witness_weight = BigRational::one();
            if ok {
                'check: {
                    for (u, &v) in f.iter().enumerate() {
                        let mutual = v < n_ts && g[v] == u;
                        if mutual {
                            if bs.inverse != Some(tau) {
                                ok = false;
                                break 'check;
                            }
                            covered += 1;
                            witness_weight *= &pal.y;
                        } else {
                            if bs.both_ways {
                                ok = false;
                                break 'check;
                            }
                            covered += 1;
                            witness_weight *= &pal.y;
                        }
                    }
                    for (v, &u) in g.iter().enumerate() {
                        let mutual = u < n_st && f[u] == v;
                        if mutual {
                            // already counted from the f side
                            continue;
                        }
                        if bt.both_ways {
                            ok = false;
                            break 'check;
                        }
                        covered += 1;
                        witness_weight *= &pal.z;
                    }
                }
            }
            if ok {
                let edges = n_s * n_t - covered;
                total += witness_weight * labelling_weight_usize(&pal.palette, edges);
            }
            if !advance(&mut g, n_s) {
                break;
            }
        }
        if !advance(&mut f, n_t) {
            break;
        }
    }
    Ok(total)
}

fn advance(tuple: &mut [usize], base: usize) -> bool {
    for slot in (0..tuple.len()).rev() {
        if tuple[slot] + 1 < base {
            tuple[slot] += 1;
            tuple[slot + 1..].iter_mut().for_each(|v| *v = 0);
            return true;
        }
        tuple[slot] = 0;
    }
    false
}

/// Restriction applied by the master sums.
#[derive(Debug, Clone, Copy)]
pub enum Restriction<'a> {
    /// Sum over all multiplicity configurations.
    None,
    /// Only configurations making the two marker predicates distinct
    /// singletons.
    DistinctSingletons { s_pred: &'a str, t_pred: &'a str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MarkerGroup {
    Plain,
    S,
    T,
    Both,
}

fn marker_groups(index: &BlockTypeIndex, restriction: &Restriction<'_>) -> Vec<MarkerGroup> {
    let Restriction::DistinctSingletons { s_pred, t_pred } = restriction else {
        return vec![MarkerGroup::Plain; index.blocks.len()];
    };
    let s_bit = index
        .space
        .one_atoms
        .iter()
        .position(|a| a.pred == *s_pred)
        .expect("marker predicate in vocabulary");
    let t_bit = index
        .space
        .one_atoms
        .iter()
        .position(|a| a.pred == *t_pred)
        .expect("marker predicate in vocabulary");
    index
        .blocks
        .iter()
        .map(|b| {
            let mask = index.space.one_types[b.tau.first];
            match (mask >> s_bit & 1 == 1, mask >> t_bit & 1 == 1) {
                (false, false) => MarkerGroup::Plain,
                (true, false) => MarkerGroup::S,
                (false, true) => MarkerGroup::T,
                (true, true) => MarkerGroup::Both,
            }
        })
        .collect()
}

fn restriction_satisfied(groups: &[MarkerGroup], totals: &[usize], r: &Restriction<'_>) -> bool {
    match r {
        Restriction::None => true,
        Restriction::DistinctSingletons { .. } => {
            let mut s = 0usize;
            let mut t = 0usize;
            let mut both = 0usize;
            for (g, &n) in groups.iter().zip(totals) {
                match g {
                    MarkerGroup::S => s += n,
                    MarkerGroup::T => t += n,
                    MarkerGroup::Both => both += n,
                    MarkerGroup::Plain => {}
                }
            }
            s == 1 && t == 1 && both == 0
        }
    }
}

/// A cell (σ→τ) can be nonzero only when σ(2) = τ(1), and a both-ways block
/// only designates witnesses through its own inverse type.
fn cell_live(index: &BlockTypeIndex, sigma: usize, tau: usize) -> bool {
    let bs = &index.blocks[sigma];
    let bt = &index.blocks[tau];
    if !compatible(&bs.tau, &bt.tau) {
        return false;
    }
    if bs.both_ways && bs.inverse != Some(tau) {
        return false;
    }
    true
}

/// Direct evaluation of the master sum: lazy enumeration of multiplicity
/// configurations over the live cells. Exponential in the live-cell count;
/// used for validation and as the fallback when a bulk palette sum vanishes.
pub fn master_sum_direct(
    index: &BlockTypeIndex,
    n: usize,
    restriction: Restriction<'_>,
) -> Result<BigRational> {
    let lambda = index.blocks.len();
    let groups = marker_groups(index, &restriction);
    let live: Vec<(usize, usize)> = (0..lambda)
        .flat_map(|s| (0..lambda).map(move |t| (s, t)))
        .filter(|&(s, t)| cell_live(index, s, t))
        .collect();

    let mut config = MultiplicityConfig::new(lambda);
    let mut total = BigRational::zero();
    enumerate_configs(index, &live, 0, n, &mut config, &groups, &restriction, &mut total)?;
    Ok(total)
}

// Sparse enumeration: pick the next nonzero live cell; every cell before it
// stays zero.
#[allow(clippy::too_many_arguments)]
fn enumerate_configs(
    index: &BlockTypeIndex,
    live: &[(usize, usize)],
    min_pos: usize,
    remaining: usize,
    config: &mut MultiplicityConfig,
    groups: &[MarkerGroup],
    restriction: &Restriction<'_>,
    total: &mut BigRational,
) -> Result<()> {
    if remaining == 0 {
        if restriction_satisfied(groups, &config.totals, restriction) {
            *total += config_weight(index, config)?;
        }
        return Ok(());
    }
    for pos in min_pos..live.len() {
        let (s, t) = live[pos];
        let cap = if let Restriction::DistinctSingletons { .. } = restriction {
            match groups[s] {
                MarkerGroup::Plain => remaining,
                MarkerGroup::Both => 0,
                _ => (1usize.saturating_sub(config.total(s))).min(remaining),
            }
        } else {
            remaining
        };
        for value in 1..=cap {
            config.set_cell(s, t, value);
            enumerate_configs(
                index,
                live,
                pos + 1,
                remaining - value,
                config,
                groups,
                restriction,
                total,
            )?;
        }
        config.set_cell(s, t, 0);
    }
    Ok(())
}

fn config_weight(index: &BlockTypeIndex, config: &MultiplicityConfig) -> Result<BigRational> {
    let lambda = index.blocks.len();
    // A nonzero cell pointing into an empty block admits no witness function.
    for (&(_, t), &v) in &config.cells {
        if v > 0 && config.total(t) == 0 {
            return Ok(BigRational::zero());
        }
    }
    let n = config.domain_size();
    let mut weight = BigRational::from_integer(factorial(n));
    for value in config.cells.values() {
        weight /= BigRational::from_integer(factorial(*value));
    }
    let nonempty: Vec<usize> = (0..lambda).filter(|&s| config.total(s) > 0).collect();
    for &s in &nonempty {
        weight *= rat_pow(
            &index.one_type_weights[index.blocks[s].tau.first],
            config.total(s),
        );
    }
    // Pairs with an empty side and no witness cells contribute the empty
    // bulk labelling, which is 1.
    for (i, &s) in nonempty.iter().enumerate() {
        for &t in &nonempty[i..] {
            weight *= n_pair(index, s, t, config)?;
            if weight.is_zero() {
                return Ok(weight);
            }
        }
    }
    Ok(weight)
}

// ---------------------------------------------------------------------------
// Production path: sparse block-support enumeration with collapsed cell sums
// ---------------------------------------------------------------------------

struct FastBlock {
    /// Original index into Λ.
    id: usize,
    /// First 1-type (bulk sums are looked up at the one-type level).
    first: usize,
    group: MarkerGroup,
    both_ways: bool,
    self_cell: SelfCell,
    y: BigRational,
    one_weight: BigRational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SelfCell {
    /// No live self cell: only bulk edges inside the block.
    None,
    /// Anti-involutive witnesses: A += (t−1)·q, B −= q².
    AntiInvolutive,
    /// Within-block perfect matching: B += q.
    Matching,
}

/// Production master sum. Evaluates the same configuration sum as
/// [`master_sum_direct`] by enumerating block totals over sparse supports;
/// with totals fixed, the cell sums collapse into coefficient extraction from
/// a quadratic exponential. Supports containing a block pair whose bulk sum
/// vanishes are evaluated by direct cell enumeration over the support
/// instead. The two routes are equality-tested against each other and the
/// ground oracle.
pub fn master_sum(
    index: &BlockTypeIndex,
    n: usize,
    restriction: Restriction<'_>,
) -> Result<BigRational> {
    let lambda = index.blocks.len();
    let groups = marker_groups(index, &restriction);

    // Prune blocks that can never be populated: marker overlap, or no live
    // outgoing cell after iterated removal.
    let mut alive: Vec<bool> = (0..lambda)
        .map(|s| {
            !(matches!(restriction, Restriction::DistinctSingletons { .. })
                && groups[s] == MarkerGroup::Both)
        })
        .collect();
    loop {
        let mut changed = false;
        for s in 0..lambda {
            if !alive[s] {
                continue;
            }
            let has_target = (0..lambda).any(|t| alive[t] && cell_live(index, s, t));
            if !has_target {
                alive[s] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let kept: Vec<usize> = (0..lambda).filter(|&s| alive[s]).collect();
    if kept.is_empty() {
        return Ok(if n == 0 { BigRational::one() } else { BigRational::zero() });
    }

    // Marker blocks come first so branches that can no longer realize the
    // two singletons are cut immediately.
    let mut ordered = kept;
    ordered.sort_by_key(|&s| match groups[s] {
        MarkerGroup::S => 0,
        MarkerGroup::T => 1,
        _ => 2,
    });
    let blocks: Vec<FastBlock> = ordered
        .iter()
        .map(|&s| {
            let bs = &index.blocks[s];
            let self_cell = if cell_live(index, s, s) {
                if bs.both_ways { SelfCell::Matching } else { SelfCell::AntiInvolutive }
            } else {
                SelfCell::None
            };
            FastBlock {
                id: s,
                first: bs.tau.first,
                group: groups[s],
                both_ways: bs.both_ways,
                self_cell,
                y: bs.table_weight.clone(),
                one_weight: index.one_type_weights[bs.tau.first].clone(),
            }
        })
        .collect();
    let s_end = blocks.iter().take_while(|b| b.group == MarkerGroup::S).count();
    let t_end = s_end + blocks[s_end..].iter().take_while(|b| b.group == MarkerGroup::T).count();

    let mut blocks_by_first = vec![Vec::new(); index.space.num_one_types()];
    for (pos, b) in blocks.iter().enumerate() {
        blocks_by_first[b.first].push(pos);
    }
    let mut kept_pos_of_id = vec![None; lambda];
    for (pos, b) in blocks.iter().enumerate() {
        kept_pos_of_id[b.id] = Some(pos);
    }

    let mut ctx = FastCtx {
        index,
        blocks: &blocks,
        need_markers: matches!(restriction, Restriction::DistinctSingletons { .. }),
        s_end,
        t_end,
        blocks_by_first,
        kept_pos_of_id,
        in_support: vec![false; lambda],
        totals: vec![0; blocks.len()],
        support: Vec::new(),
        first_counts: vec![0; index.space.num_one_types()],
        s_used: 0,
        t_used: 0,
        total: BigRational::zero(),
        error: None,
    };
    ctx.recurse(
        0,
        n,
        BigRational::from_integer(factorial(n)),
        BigRational::one(),
        false,
    );
    match ctx.error {
        Some(err) => Err(err),
        None => Ok(ctx.total),
    }
}

struct FastCtx<'a> {
    index: &'a BlockTypeIndex,
    blocks: &'a [FastBlock],
    need_markers: bool,
    s_end: usize,
    t_end: usize,
    /// Block positions per first 1-type, ascending.
    blocks_by_first: Vec<Vec<usize>>,
    /// Λ index to position in the pruned block list.
    kept_pos_of_id: Vec<Option<usize>>,
    /// Support membership by Λ index.
    in_support: Vec<bool>,
    totals: Vec<usize>,
    support: Vec<usize>,
    /// Number of support blocks per first 1-type; drives the witness
    /// feasibility pre-check.
    first_counts: Vec<u32>,
    s_used: usize,
    t_used: usize,
    total: BigRational,
    error: Option<EngineError>,
}

impl FastCtx<'_> {
    fn bulk(&self, a: usize, b: usize) -> &BigRational {
        &self.index.bulk_sums[a][b]
    }

    /// Unmet witness requirements of the current support: 1-types that must
    /// gain a block and specific inverse partners that must join. Returns
    /// None when a requirement can no longer be met.
    fn requirements(&self, min_next: usize) -> Option<(Vec<usize>, Vec<usize>)> {
        let mut type_needs: Vec<usize> = Vec::new();
        let mut block_needs: Vec<usize> = Vec::new();
        for &i in &self.support {
            let b = &self.index.blocks[self.blocks[i].id];
            if b.both_ways {
                let inv = b.inverse?;
                if self.in_support[inv] {
                    continue;
                }
                let pos = self.kept_pos_of_id[inv]?;
                if pos < min_next {
                    return None;
                }
                if !block_needs.contains(&pos) {
                    block_needs.push(pos);
                }
            } else {
                let need = b.tau.second;
                if self.first_counts[need] > 0 || type_needs.contains(&need) {
                    continue;
                }
                type_needs.push(need);
            }
        }
        // A required inverse partner also supplies its own first type.
        type_needs.retain(|&a| !block_needs.iter().any(|&p| self.blocks[p].first == a));
        for &a in &type_needs {
            if !self.blocks_by_first[a].iter().any(|&p| p >= min_next) {
                return None;
            }
        }
        Some((type_needs, block_needs))
    }

    fn recurse(
        &mut self,
        min_next: usize,
        remaining: usize,
        base: BigRational,
        quad: BigRational,
        saturated: bool,
    ) {
        if base.is_zero() || self.error.is_some() {
            return;
        }
        if remaining == 0 {
            if self.need_markers && (self.s_used != 1 || self.t_used != 1) {
                return;
            }
            match self.requirements(usize::MAX) {
                Some((t, b)) if t.is_empty() && b.is_empty() => {}
                _ => return,
            }
            let leaf = if saturated {
                match self.direct_cells() {
                    Ok(v) => v,
                    Err(err) => {
                        self.error = Some(err);
                        return;
                    }
                }
            } else {
                quad * self.inner_sum()
            };
            if !leaf.is_zero() {
                self.total += base * leaf;
            }
            return;
        }
        if self.need_markers
            && ((self.s_used == 0 && min_next >= self.s_end)
                || (self.t_used == 0 && min_next >= self.t_end))
        {
            return;
        }
        let Some((type_needs, block_needs)) = self.requirements(min_next) else {
            return;
        };
        let lb = type_needs.len() + block_needs.len();
        if lb > remaining {
            return;
        }
        if lb == remaining && lb > 0 {
            // Every remaining slot must meet one requirement; iterate the
            // requirement candidates only, one element each.
            let mut cands: Vec<usize> = block_needs;
            for &a in &type_needs {
                cands.extend(
                    self.blocks_by_first[a].iter().copied().filter(|&p| p >= min_next),
                );
            }
            cands.sort_unstable();
            cands.dedup();
            for j in cands {
                self.try_block(j, 1, 1, remaining, &base, &quad, saturated);
            }
            return;
        }
        for j in min_next..self.blocks.len() {
            self.try_block(j, 1, remaining, remaining, &base, &quad, saturated);
        }
    }

    /// Adds block j with every total in lo..=hi, descending into the
    /// remaining budget.
    #[allow(clippy::too_many_arguments)]
    fn try_block(
        &mut self,
        j: usize,
        lo: usize,
        hi: usize,
        remaining: usize,
        base: &BigRational,
        quad: &BigRational,
        saturated: bool,
    ) {
        let b = &self.blocks[j];
        let hi = match (self.need_markers, b.group) {
            (true, MarkerGroup::S) if self.s_used > 0 => 0,
            (true, MarkerGroup::T) if self.t_used > 0 => 0,
            (true, MarkerGroup::S) | (true, MarkerGroup::T) => hi.min(1),
            _ => hi,
        }
        .min(remaining);
        if hi < lo || b.one_weight.is_zero() {
            return;
        }
        let w_step = &b.one_weight;
        let within_base = self.bulk(b.first, b.first).clone();
        for t in lo..=hi {
            // Multinomial factor and one-type weights go into the base; the
            // quadratic bulk-edge powers go into the quad accumulator until a
            // vanishing bulk sum saturates the branch.
            let mut step_base = base.clone();
            step_base /= BigRational::from_integer(factorial(t));
            step_base *= rat_pow(w_step, t);

            let mut now_saturated = saturated;
            if !now_saturated {
                if t >= 2 && within_base.is_zero() {
                    now_saturated = true;
                }
                for &i in &self.support {
                    if self.bulk(self.blocks[i].first, b.first).is_zero() {
                        now_saturated = true;
                        break;
                    }
                }
            }
            let step_quad = if now_saturated {
                BigRational::one()
            } else {
                let mut q = quad.clone();
                q *= rat_pow(&within_base, t * (t - 1) / 2);
                for &i in &self.support {
                    q *= rat_pow(self.bulk(self.blocks[i].first, b.first), t * self.totals[i]);
                }
                q
            };

            self.totals[j] = t;
            self.support.push(j);
            self.first_counts[b.first] += 1;
            self.in_support[b.id] = true;
            match b.group {
                MarkerGroup::S => self.s_used += 1,
                MarkerGroup::T => self.t_used += 1,
                _ => {}
            }
            self.recurse(j + 1, remaining - t, step_base, step_quad, now_saturated);
            match b.group {
                MarkerGroup::S => self.s_used -= 1,
                MarkerGroup::T => self.t_used -= 1,
                _ => {}
            }
            self.in_support[b.id] = false;
            self.first_counts[b.first] -= 1;
            self.support.pop();
            self.totals[j] = 0;
        }
    }

    /// Exact fallback for saturated supports: enumerate the cell matrix over
    /// the support blocks and multiply the pair-connection values, which
    /// carry their own bulk labelling powers.
    fn direct_cells(&self) -> Result<BigRational> {
        let k = self.support.len();
        let ids: Vec<usize> = self.support.iter().map(|&p| self.blocks[p].id).collect();
        let totals: Vec<usize> = self.support.iter().map(|&p| self.totals[p]).collect();
        let targets: Vec<Vec<usize>> = ids
            .iter()
            .map(|&id| (0..k).filter(|&q| cell_live(self.index, id, ids[q])).collect())
            .collect();
        let mut cells = vec![vec![0usize; k]; k];
        let mut total = BigRational::zero();
        self.direct_rec(0, &ids, &totals, &targets, &mut cells, &mut total)?;
        Ok(total)
    }

    #[allow(clippy::too_many_arguments)]
    fn direct_rec(
        &self,
        i: usize,
        ids: &[usize],
        totals: &[usize],
        targets: &[Vec<usize>],
        cells: &mut Vec<Vec<usize>>,
        total: &mut BigRational,
    ) -> Result<()> {
        let k = ids.len();
        if i == k {
            let mut weight = BigRational::one();
            for a in 0..k {
                let mut multi = factorial(totals[a]);
                for &c in &cells[a] {
                    multi /= factorial(c);
                }
                weight *= BigRational::from_integer(multi);
            }
            for a in 0..k {
                for b in a..k {
                    // m_pair expects canonical Λ order.
                    let value = if ids[a] <= ids[b] {
                        m_pair(self.index, ids[a], ids[b], cells[a][b], totals[a], cells[b][a], totals[b])?
                    } else {
                        m_pair(self.index, ids[b], ids[a], cells[b][a], totals[b], cells[a][b], totals[a])?
                    };
                    weight *= value;
                    if weight.is_zero() {
                        *total += weight;
                        return Ok(());
                    }
                }
            }
            *total += weight;
            return Ok(());
        }
        // Distribute block i's elements over its live targets.
        fn distribute(
            slots: &[usize],
            pos: usize,
            remaining: usize,
            row: &mut Vec<usize>,
            then: &mut dyn FnMut(&mut Vec<usize>) -> Result<()>,
        ) -> Result<()> {
            if pos == slots.len() {
                if remaining == 0 {
                    return then(row);
                }
                return Ok(());
            }
            let max = if pos + 1 == slots.len() { remaining..=remaining } else { 0..=remaining };
            for v in max {
                row[slots[pos]] = v;
                distribute(slots, pos + 1, remaining - v, row, then)?;
                row[slots[pos]] = 0;
            }
            Ok(())
        }
        if targets[i].is_empty() && totals[i] > 0 {
            return Ok(());
        }
        let slots = targets[i].clone();
        let mut row = std::mem::take(&mut cells[i]);
        let result = distribute(&slots, 0, totals[i], &mut row, &mut |row| {
            cells[i] = row.clone();
            let r = self.direct_rec(i + 1, ids, totals, targets, cells, total);
            cells[i] = vec![0; k];
            r
        });
        cells[i] = row;
        cells[i].iter_mut().for_each(|v| *v = 0);
        result?;
        Ok(())
    }

    /// Σ over cross-edge usages of ∏ c^j/j! times the per-block coefficient
    /// extraction; equals the cell-multinomial sum against the pair formulas.
    fn inner_sum(&self) -> BigRational {
        let m = self.support.len();
        let mut lin = Vec::with_capacity(m);
        let mut quad = Vec::with_capacity(m);
        for &i in &self.support {
            let b = &self.blocks[i];
            let t_i = self.totals[i];
            let mut a = BigRational::zero();
            if !b.both_ways {
                for &j in &self.support {
                    if j != i && cell_live(self.index, b.id, self.blocks[j].id) {
                        a += BigRational::from_integer(BigInt::from(self.totals[j])) * &b.y
                            / self.bulk(b.first, self.blocks[j].first);
                    }
                }
            }
            let mut q2 = BigRational::zero();
            if t_i >= 2 {
                match b.self_cell {
                    SelfCell::None => {}
                    SelfCell::AntiInvolutive => {
                        let q = &b.y / self.bulk(b.first, b.first);
                        a += BigRational::from_integer(BigInt::from(t_i - 1)) * &q;
                        q2 -= &q * &q;
                    }
                    SelfCell::Matching => {
                        q2 += &b.y / self.bulk(b.first, b.first);
                    }
                }
            }
            lin.push(a);
            quad.push(q2);
        }

        // Cross edges within the support: inverse matchings and
        // bidirectional nowhere-inverse pairs.
        let mut edges: Vec<(usize, usize, BigRational)> = Vec::new();
        for pa in 0..m {
            for pb in pa + 1..m {
                let (i, j) = (self.support[pa], self.support[pb]);
                let (bi, bj) = (&self.blocks[i], &self.blocks[j]);
                if !(cell_live(self.index, bi.id, bj.id) && cell_live(self.index, bj.id, bi.id)) {
                    continue;
                }
                let s = self.bulk(bi.first, bj.first);
                let c = if self.index.blocks[bi.id].inverse == Some(bj.id) {
                    &bi.y / s
                } else {
                    -(&bi.y * &bj.y) / (s * s)
                };
                if !c.is_zero() {
                    edges.push((pa, pb, c));
                }
            }
        }
        let mut degree = vec![0usize; m];
        self.cross_rec(&edges, 0, &mut degree, &lin, &quad, BigRational::one())
    }

    fn cross_rec(
        &self,
        edges: &[(usize, usize, BigRational)],
        pos: usize,
        degree: &mut Vec<usize>,
        lin: &[BigRational],
        quad: &[BigRational],
        coeff: BigRational,
    ) -> BigRational {
        if pos == edges.len() {
            let mut product = coeff;
            for (p, &i) in self.support.iter().enumerate() {
                if product.is_zero() {
                    return product;
                }
                product *= extract(self.totals[i], degree[p], &lin[p], &quad[p]);
            }
            return product;
        }
        let (pa, pb, ref c) = edges[pos];
        let ta = self.totals[self.support[pa]];
        let tb = self.totals[self.support[pb]];
        let max_j = (ta - degree[pa]).min(tb - degree[pb]);
        let mut total = BigRational::zero();
        let mut c_pow = BigRational::one(); // c^j / j!
        for j in 0..=max_j {
            if j > 0 {
                c_pow = c_pow * c / BigRational::from_integer(BigInt::from(j));
                degree[pa] += 1;
                degree[pb] += 1;
            }
            total += self.cross_rec(edges, pos + 1, degree, lin, quad, &coeff * &c_pow);
        }
        degree[pa] -= max_j;
        degree[pb] -= max_j;
        total
    }
}

/// t! · [u^t] u^D e^{A·u + Q·u²/2}.
fn extract(t: usize, d: usize, a: &BigRational, q: &BigRational) -> BigRational {
    if d > t {
        return BigRational::zero();
    }
    let t_fact = BigRational::from_integer(factorial(t));
    let mut total = BigRational::zero();
    let half_q = q / BigRational::from_integer(2.into());
    let mut m = 0usize;
    let mut q_pow = BigRational::one();
    while d + 2 * m <= t {
        let lin_exp = t - d - 2 * m;
        let lin = if lin_exp == 0 {
            BigRational::one()
        } else if a.is_zero() {
            BigRational::zero()
        } else {
            rat_pow(a, lin_exp)
        };
        if !lin.is_zero() && !q_pow.is_zero() {
            total += &q_pow * lin
                / (BigRational::from_integer(factorial(m))
                    * BigRational::from_integer(factorial(lin_exp)));
        }
        m += 1;
        q_pow *= &half_q;
        if q_pow.is_zero() {
            break;
        }
    }
    t_fact * total
}

// ---------------------------------------------------------------------------
// Spec-level master sums and the engine drivers
// ---------------------------------------------------------------------------

/// U(n): the unrestricted master sum over all multiplicity configurations.
pub fn master_sum_u(index: &BlockTypeIndex, n: usize) -> Result<BigRational> {
    master_sum(index, n, Restriction::None)
}

/// W(n): the ⟨n⟩-restricted master sum divided by n(n−1); requires n ≥ 2.
pub fn master_sum_w(
    index: &BlockTypeIndex,
    n: usize,
    s_pred: &str,
    t_pred: &str,
) -> Result<BigRational> {
    if n < 2 {
        return Err(EngineError::Other("master_sum_w requires n >= 2".into()));
    }
    let restricted = master_sum(index, n, Restriction::DistinctSingletons { s_pred, t_pred })?;
    Ok(restricted / BigRational::from_integer(BigInt::from(n * (n - 1))))
}

/// Does some coherent 1-type admit a self-witness (φ₀∃(x,x))? When none
/// does, witnesses are always distinct and the marker construction is
/// unnecessary.
fn self_witness_possible(index: &BlockTypeIndex, phi0: &Phi0) -> Result<bool> {
    let mut to_x = BTreeMap::new();
    to_x.insert("y".to_string(), "x".to_string());
    let exists_xx = crate::syntax::substitute_free(&phi0.exists_matrix, &to_x);
    for alpha in 0..index.space.num_one_types() {
        let probe = TwoType { first: alpha, table: 0, second: alpha };
        let coherent_alone =
            eval_matrix(&index.space, &probe, &phi0.forall_matrix, Instantiation::XX)?;
        if coherent_alone && eval_matrix(&index.space, &probe, &exists_xx, Instantiation::XX)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Counts one normalized Φ₀ case at domain size n ≥ max(2, arities).
fn count_phi0(
    phi0: &Phi0,
    vocab: &Vocabulary,
    weights: &WeightMap,
    n: usize,
) -> Result<BigRational> {
    let index = build_block_index(&phi0.forall_matrix, &phi0.exists_matrix, vocab, weights)?;
    if !self_witness_possible(&index, phi0)? {
        return master_sum_u(&index, n);
    }
    let phi = build_phi_from_phi0(phi0, vocab, weights)?;
    let index = build_block_index(&phi.forall_matrix, &phi.exists_matrix, &phi.vocab, &phi.weights)?;
    master_sum_w(&index, n, &phi.s_pred, &phi.t_pred)
}

/// Full engine for φ ∧ ∀x∃^{=1}y ψ(x,y): normalization, per-case master
/// sums, nullary case weights and correction factors. Domain sizes below 2 or
/// below the maximum arity are answered by the ground oracle.
pub fn count_fo2func(ws: &WeightedSentence, n: usize) -> Result<BigRational> {
    let normal_input = WeightedSentence {
        sentence: crate::syntax::normalize_scopes(&ws.sentence),
        vocab: ws.vocab.clone(),
        weights: ws.weights.clone(),
        corrections: ws.corrections.clone(),
    };
    let normal = fo2func_normalize(&normal_input)?;
    if n < 2 || n < normal.vocab.max_arity() {
        return Ok(oracle::wfomc_brute(&ws.sentence, &ws.vocab, n, &ws.weights)?);
    }
    count_normalized_fo2func(&normal, n)
}

/// Counting entry for an already-normalized functionality sentence.
pub fn count_normalized_fo2func(normal: &Fo2FuncNormal, n: usize) -> Result<BigRational> {
    let mut total = BigRational::zero();
    for (case_weight, phi0) in &normal.cases {
        if case_weight.is_zero() {
            continue;
        }
        total += case_weight * count_phi0(phi0, &normal.vocab, &normal.weights, n)?;
    }
    for correction in &normal.corrections {
        match correction.factor(n) {
            Some(f) => total *= f,
            None => {
                return Err(EngineError::Other(format!(
                    "correction {correction} undefined at n = {n}"
                )))
            }
        }
    }
    Ok(total)
}

/// Higher-arity span factor: the free-assignment weight of all tuples of
/// span above two, per removed symbol. None below the arity threshold.
pub fn higher_arity_factor(
    n: usize,
    weights: &WeightMap,
    symbols: &[(String, usize)],
) -> Option<BigRational> {
    let mut factor = BigRational::one();
    for (pred, arity) in symbols {
        let c = Correction::HigherAritySpan {
            pred: pred.clone(),
            arity: *arity,
            w: weights.pos(pred),
            wbar: weights.neg(pred),
        };
        factor *= c.factor(n)?;
    }
    Some(factor)
}

/// Plain-FO² counting through the functionality engine: adjoin a fresh
/// irreflexive functional relation (which multiplies the count by (n−1)^n)
/// and divide back out.
pub fn count_fo2_plain(
    sentence: &Formula,
    vocab: &Vocabulary,
    weights: &WeightMap,
    n: usize,
) -> Result<BigRational> {
    if n < 2 {
        return Ok(oracle::wfomc_brute(sentence, vocab, n, weights)?);
    }
    let mut vocab2 = vocab.clone();
    let fname = vocab2.fresh_name("F");
    vocab2.declare_unchecked(&fname, 2).unwrap();
    let mut weights2 = weights.clone();
    weights2.set(&fname, BigRational::one(), BigRational::one());

    let irreflexive = Formula::forall(
        "x",
        Formula::forall("y", Formula::atom(fname.clone(), &["x", "x"]).not()),
    );
    let axiom = Formula::forall(
        "x",
        Formula::exists_eq1(
            "y",
            Formula::atom(fname.clone(), &["x", "y"])
                .and(Formula::Eq("x".into(), "y".into()).not()),
        ),
    );
    let combined = crate::syntax::normalize_scopes(sentence)
        .and(irreflexive)
        .and(axiom);
    let ws = WeightedSentence::new(combined, vocab2, weights2);
    let raw = count_fo2func(&ws, n)?;
    let factor = Correction::DivideByNMinus1PowN
        .factor(n)
        .expect("n >= 2 checked above");
    Ok(raw * factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::{parse_sentence, VocabMode};
    use num::BigInt;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn ws(text: &str) -> WeightedSentence {
        let (f, vocab) = parse_sentence(text, VocabMode::Inferred).unwrap();
        let weights = WeightMap::ones(&vocab);
        WeightedSentence::new(crate::syntax::normalize_scopes(&f), vocab, weights)
    }

    fn index_for(text: &str) -> BlockTypeIndex {
        let normal = fo2func_normalize(&ws(text)).unwrap();
        let phi0 = &normal.cases[0].1;
        build_block_index(&phi0.forall_matrix, &phi0.exists_matrix, &normal.vocab, &normal.weights)
            .unwrap()
    }

    #[test]
    fn empty_lambda_when_exists_unsatisfiable() {
        let index = index_for("forall x forall y R(x,y) & forall x exists=1 y (R(x,y) & ~R(x,y))");
        assert!(index.blocks.is_empty());
        assert_eq!(master_sum_u(&index, 2).unwrap(), rat(0));
        assert_eq!(master_sum_u(&index, 0).unwrap(), rat(1));
    }

    #[test]
    fn lambda_deterministic() {
        let a = index_for("forall x (~R(x,x)) & forall x exists=1 y R(x,y)");
        let b = index_for("forall x (~R(x,x)) & forall x exists=1 y R(x,y)");
        let taus_a: Vec<_> = a.blocks.iter().map(|b| b.tau).collect();
        let taus_b: Vec<_> = b.blocks.iter().map(|b| b.tau).collect();
        assert_eq!(taus_a, taus_b);
        // Fixed-point-free functions: coherent one-type ¬Rxx, witnessing
        // tables carry Rxy⁺.
        assert_eq!(a.blocks.len(), 2);
    }

    #[test]
    fn fixed_point_free_sequence() {
        // (n−1)^n for n = 2..8 through the lifted engine.
        let sentence = ws("forall x (~R(x,x)) & forall x exists=1 y R(x,y)");
        for n in 2..=8usize {
            let expected = rat_pow(&rat(n as i64 - 1), n);
            assert_eq!(count_fo2func(&sentence, n).unwrap(), expected, "n={n}");
        }
    }

    #[test]
    fn perfect_matchings_sequence() {
        let sentence =
            ws("(forall x forall y (R(x,y) -> R(y,x))) & (forall x ~R(x,x)) & forall x exists=1 y R(x,y)");
        let expected = [0, 1, 0, 3, 0, 15, 0, 105];
        for (i, e) in expected.iter().enumerate() {
            let n = i + 1;
            if n < 2 {
                continue;
            }
            assert_eq!(count_fo2func(&sentence, n).unwrap(), rat(*e), "n={n}");
        }
    }

    #[test]
    fn all_functions_uses_marker_construction() {
        // ∀x∃^{=1}y R(x,y): self-witnesses allowed, count n^n.
        let sentence = ws("forall x exists=1 y R(x,y)");
        for n in 2..=3usize {
            let expected = rat_pow(&rat(n as i64), n);
            assert_eq!(count_fo2func(&sentence, n).unwrap(), expected, "n={n}");
        }
    }

    #[test]
    fn fast_equals_direct_on_marker_restriction() {
        let sentence = ws("forall x exists=1 y R(x,y)");
        let normal = fo2func_normalize(&sentence).unwrap();
        let phi0 = &normal.cases[0].1;
        let index =
            build_block_index(&phi0.forall_matrix, &phi0.exists_matrix, &normal.vocab, &normal.weights)
                .unwrap();
        assert!(self_witness_possible(&index, phi0).unwrap());
        let phi = build_phi_from_phi0(phi0, &normal.vocab, &normal.weights).unwrap();
        let index =
            build_block_index(&phi.forall_matrix, &phi.exists_matrix, &phi.vocab, &phi.weights)
                .unwrap();
        for n in 2..=2usize {
            let fast = master_sum(
                &index,
                n,
                Restriction::DistinctSingletons { s_pred: &phi.s_pred, t_pred: &phi.t_pred },
            )
            .unwrap();
            let direct = master_sum_direct(
                &index,
                n,
                Restriction::DistinctSingletons { s_pred: &phi.s_pred, t_pred: &phi.t_pred },
            )
            .unwrap();
            assert_eq!(fast, direct, "n={n}");
        }
    }

    #[test]
    fn fast_equals_direct_unrestricted() {
        for text in [
            "forall x (~R(x,x)) & forall x exists=1 y R(x,y)",
            "(forall x forall y (R(x,y) -> R(y,x))) & (forall x ~R(x,x)) & forall x exists=1 y R(x,y)",
            "(forall x (P(x) -> ~R(x,x))) & forall x exists=1 y (R(x,y) & ~(x=y))",
        ] {
            let normal = fo2func_normalize(&ws(text)).unwrap();
            let phi0 = &normal.cases[0].1;
            let index = build_block_index(
                &phi0.forall_matrix,
                &phi0.exists_matrix,
                &normal.vocab,
                &normal.weights,
            )
            .unwrap();
            for n in 0..=4usize {
                assert_eq!(
                    master_sum(&index, n, Restriction::None).unwrap(),
                    master_sum_direct(&index, n, Restriction::None).unwrap(),
                    "{text} at n={n}"
                );
            }
        }
    }

    #[test]
    fn n_pair_matches_enumeration() {
        // Every reachable flag combination over the matching/function mix.
        for text in [
            "forall x (~R(x,x)) & forall x exists=1 y R(x,y)",
            "(forall x forall y (R(x,y) -> R(y,x))) & (forall x ~R(x,x)) & forall x exists=1 y R(x,y)",
            "forall x exists=1 y R(x,y)",
        ] {
            let normal = fo2func_normalize(&ws(text)).unwrap();
            let phi0 = &normal.cases[0].1;
            let index = build_block_index(
                &phi0.forall_matrix,
                &phi0.exists_matrix,
                &normal.vocab,
                &normal.weights,
            )
            .unwrap();
            let lambda = index.blocks.len().min(6);
            for s in 0..lambda {
                for t in s..lambda {
                    for n_s in 0..=3usize {
                        for n_t in 0..=3usize {
                            for m in 0..=n_s {
                                for nn in 0..=n_t {
                                    if s == t && (n_s != n_t || m != nn) {
                                        continue;
                                    }
                                    let lhs = m_pair(&index, s, t, m, n_s, nn, n_t).unwrap();
                                    let rhs =
                                        enumerate_pair_weight(&index, s, t, m, n_s, nn, n_t)
                                            .unwrap();
                                    assert_eq!(lhs, rhs, "{text} σ={s} τ={t} ({m},{n_s},{nn},{n_t})");
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn graph_axiom_through_plain_reduction() {
        let (f, vocab) = parse_sentence(
            "forall x forall y (R(x,y) -> (R(y,x) & ~(x = y)))",
            VocabMode::Inferred,
        )
        .unwrap();
        let weights = WeightMap::ones(&vocab);
        for n in 1..=6usize {
            let expected = rat_pow(&rat(2), n * (n - 1) / 2);
            assert_eq!(count_fo2_plain(&f, &vocab, &weights, n).unwrap(), expected, "n={n}");
        }
    }

    #[test]
    fn free_unary_through_plain_reduction() {
        // A tautology over one unary predicate counts every model: 2^n.
        let (f, vocab) =
            parse_sentence("forall x (P(x) | ~P(x))", VocabMode::Inferred).unwrap();
        let weights = WeightMap::ones(&vocab);
        for n in 2..=5usize {
            assert_eq!(
                count_fo2_plain(&f, &vocab, &weights, n).unwrap(),
                rat_pow(&rat(2), n),
                "n={n}"
            );
        }
    }

    #[test]
    fn multiplicity_identity() {
        // Σ over configs of multinomial(n; counts) equals (#cells)^n.
        let index = index_for("forall x (~R(x,x)) & forall x exists=1 y R(x,y)");
        let lambda = index.blocks.len();
        let cells: Vec<(usize, usize)> = (0..lambda)
            .flat_map(|s| (0..lambda).map(move |t| (s, t)))
            .collect();
        for n in 0..=4usize {
            let mut total = BigInt::zero();
            let mut config = MultiplicityConfig::new(lambda);
            fn rec(
                cells: &[(usize, usize)],
                pos: usize,
                remaining: usize,
                config: &mut MultiplicityConfig,
                total: &mut BigInt,
                n: usize,
            ) {
                if pos == cells.len() {
                    if remaining == 0 {
                        let mut m = factorial(n);
                        for v in config.cells.values() {
                            m /= factorial(*v);
                        }
                        *total += m;
                    }
                    return;
                }
                for v in 0..=remaining {
                    config.set_cell(cells[pos].0, cells[pos].1, v);
                    rec(cells, pos + 1, remaining - v, config, total, n);
                }
                config.set_cell(cells[pos].0, cells[pos].1, 0);
            }
            rec(&cells, 0, n, &mut config, &mut total, n);
            let expected = BigInt::from(cells.len()).pow(n as u32);
            assert_eq!(total, expected, "n={n}");
        }
    }
}
