//! Exact closed-form counters over arbitrary-precision rationals: binomials,
//! anti-involutive function counts, weighted edge-labelling counts, nowhere
//! inverse pairs and perfect matchings, with their boundary conventions.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::cell::RefCell;

/// Weighted colour palette for edge labellings: `k` symmetric colours and
/// `ℓ` directed colours.
#[derive(Debug, Clone, Default)]
pub struct Palette {
    pub symmetric: Vec<BigRational>,
    pub directed: Vec<BigRational>,
}

impl Palette {
    pub fn empty() -> Palette {
        Palette::default()
    }

    /// Per-edge total choice weight Σw_p + 2Σx_q.
    pub fn edge_sum(&self) -> BigRational {
        let sym: BigRational = self.symmetric.iter().cloned().sum();
        let dir: BigRational = self.directed.iter().cloned().sum();
        sym + BigRational::from_integer(2.into()) * dir
    }
}

thread_local! {
    static FACTORIALS: RefCell<Vec<BigInt>> = RefCell::new(vec![BigInt::one()]);
}

/// n! with a per-thread memo table.
pub fn factorial(n: usize) -> BigInt {
    FACTORIALS.with(|cell| {
        let mut table = cell.borrow_mut();
        while table.len() <= n {
            let next = table.last().unwrap() * BigInt::from(table.len());
            table.push(next);
        }
        table[n].clone()
    })
}

/// Double factorial m!! (m odd or even); 0!! = (-1)!! = 1.
pub fn double_factorial(m: usize) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = m;
    while k > 1 {
        acc *= BigInt::from(k);
        k -= 2;
    }
    acc
}

/// C(n, k); zero when k > n.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
    }
    num / factorial(k)
}

/// Multinomial coefficient (n; n₁,…,n_m). Parts must sum to n.
pub fn multinomial(n: usize, parts: &[usize]) -> BigInt {
    assert_eq!(parts.iter().sum::<usize>(), n, "multinomial parts must sum to n");
    let mut acc = factorial(n);
    for &p in parts {
        acc /= factorial(p);
    }
    acc
}

/// Exact base^exp by repeated squaring.
pub fn rat_pow(base: &BigRational, exp: usize) -> BigRational {
    if exp == 0 {
        return BigRational::one();
    }
    let mut result = BigRational::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    result
}

fn int_pow(base: &BigInt, exp: usize) -> BigInt {
    let mut result = BigInt::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    result
}

/// I(m,n): the number of anti-involutive functions m → n, for 0 ≤ m ≤ n.
///
/// Σ_{i=0}^{⌊m/2⌋} (−1)^i (n−1)^{m−2i} C(m,2i) (2i)!/(2^i i!)
pub fn anti_involutive_count(m: usize, n: usize) -> BigInt {
    assert!(m <= n, "anti_involutive_count requires m <= n");
    let n_minus_1 = BigInt::from(n as i64 - 1);
    let mut total = BigInt::zero();
    for i in 0..=m / 2 {
        let pairs = factorial(2 * i) / (int_pow(&BigInt::from(2), i) * factorial(i));
        let term = int_pow(&n_minus_1, m - 2 * i) * binomial(m, 2 * i) * pairs;
        if i % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// L_{k,ℓ}(N): weighted number of labellings of an arbitrary N-edge graph.
///
/// Production path: the multinomial sum collapses to (Σw_p + 2Σx_q)^N for
/// N ≥ 0. By convention L is 0 for negative N, and L_{0,0} is 1 at N = 0 and
/// 0 for N > 0 (the empty palette makes the collapsed power agree).
pub fn labelling_weight(n_edges: i64, palette: &Palette) -> BigRational {
    if n_edges < 0 {
        return BigRational::zero();
    }
    rat_pow(&palette.edge_sum(), n_edges as usize)
}

/// Direct evaluation of the defining multinomial sum; exponentially many
/// terms in k+ℓ, kept as an independent cross-check of [`labelling_weight`].
pub fn labelling_weight_direct(n_edges: i64, palette: &Palette) -> BigRational {
    if n_edges < 0 {
        return BigRational::zero();
    }
    let n = n_edges as usize;
    let k = palette.symmetric.len();
    let l = palette.directed.len();
    if k + l == 0 {
        return if n == 0 { BigRational::one() } else { BigRational::zero() };
    }
    let mut total = BigRational::zero();
    let mut parts = vec![0usize; k + l];
    fn rec(
        slot: usize,
        remaining: usize,
        parts: &mut Vec<usize>,
        n: usize,
        palette: &Palette,
        total: &mut BigRational,
    ) {
        if slot + 1 == parts.len() {
            parts[slot] = remaining;
            let k = palette.symmetric.len();
            let coeff = BigRational::from_integer(multinomial(n, parts));
            let orientations = int_pow(&BigInt::from(2), parts[k..].iter().sum::<usize>());
            let mut w = coeff * BigRational::from_integer(orientations);
            for (i, p) in parts.iter().enumerate() {
                let base = if i < k { &palette.symmetric[i] } else { &palette.directed[i - k] };
                w *= rat_pow(base, *p);
            }
            *total += w;
            return;
        }
        for v in 0..=remaining {
            parts[slot] = v;
            rec(slot + 1, remaining - v, parts, n, palette, total);
        }
    }
    rec(0, n, &mut parts, n, palette, &mut total);
    total
}

/// J_{k,ℓ+1}(m,n): weighted labellings of the complete n-graph where the
/// extra directed colour defines an anti-involutive function m → n.
pub fn within_block_antiinvolutive(
    m: usize,
    n: usize,
    palette: &Palette,
    y: &BigRational,
) -> BigRational {
    assert!(m <= n);
    let edges = (binomial(n, 2) - BigInt::from(m)).to_i64();
    BigRational::from_integer(anti_involutive_count(m, n)) * rat_pow(y, m)
        * labelling_weight(edges, palette)
}

/// K(m,M,n,N): pairs of functions f: m → N-set, g: n → M-set that are nowhere
/// inverses of each other, with the stated boundary conventions.
pub fn nowhere_inverse_count(m: usize, big_m: usize, n: usize, big_n: usize) -> BigInt {
    assert!(m <= big_m && n <= big_n, "nowhere_inverse_count requires m<=M, n<=N");
    if (big_m == 0 && n != 0) || (big_n == 0 && m != 0) {
        return BigInt::zero();
    }
    if m == 0 && n == 0 {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for i in 0..=m.min(n) {
        let term = binomial(m, i)
            * binomial(n, i)
            * factorial(i)
            * int_pow(&BigInt::from(big_m), n - i)
            * int_pow(&BigInt::from(big_n), m - i);
        if i % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// P_{k,ℓ+2}(m,M,n,N): weighted labellings of the complete bipartite graph on
/// M×N where two extra directed colours define nowhere-inverse witness
/// functions.
#[allow(clippy::too_many_arguments)]
pub fn bipartite_nowhere_inverse(
    m: usize,
    big_m: usize,
    n: usize,
    big_n: usize,
    palette: &Palette,
    y: &BigRational,
    z: &BigRational,
) -> BigRational {
    let edges = (big_m as i64) * (big_n as i64) - m as i64 - n as i64;
    BigRational::from_integer(nowhere_inverse_count(m, big_m, n, big_n))
        * rat_pow(y, m)
        * rat_pow(z, n)
        * labelling_weight(edges, palette)
}

/// F(m): perfect matchings of the complete graph on m vertices.
pub fn matching_count(m: usize) -> BigInt {
    if m == 0 {
        return BigInt::one();
    }
    if m % 2 == 1 {
        return BigInt::zero();
    }
    double_factorial(m - 1)
}

/// F'(n,m): perfect matchings between an n-set and an m-set: n! when n = m.
pub fn bipartite_matching_count(n: usize, m: usize) -> BigInt {
    if n == m {
        factorial(n)
    } else {
        BigInt::zero()
    }
}

/// S_{k+1,ℓ}(m,n): weighted labellings of the complete n-graph where the
/// extra symmetric colour defines a perfect matching of an m-subset.
pub fn within_block_matching(
    m: usize,
    n: usize,
    palette: &Palette,
    y: &BigRational,
) -> BigRational {
    assert!(m <= n);
    let edges = (binomial(n, 2) - BigInt::from(m / 2)).to_i64();
    BigRational::from_integer(matching_count(m)) * rat_pow(y, m / 2)
        * labelling_weight(edges, palette)
}

/// T_{k+1,ℓ}(m,M,n,N): weighted labellings of the complete bipartite graph
/// where the extra symmetric colour defines a perfect matching between the
/// distinguished m- and n-subsets.
pub fn cross_block_matching(
    m: usize,
    big_m: usize,
    n: usize,
    big_n: usize,
    palette: &Palette,
    y: &BigRational,
) -> BigRational {
    assert!(m <= big_m && n <= big_n);
    let edges = (big_m as i64) * (big_n as i64) - n as i64;
    BigRational::from_integer(bipartite_matching_count(n, m)) * rat_pow(y, n)
        * labelling_weight(edges, palette)
}

trait ToI64 {
    fn to_i64(&self) -> i64;
}

impl ToI64 for BigInt {
    fn to_i64(&self) -> i64 {
        num::ToPrimitive::to_i64(self).expect("edge count fits in i64")
    }
}

/// Returns true when the rational is an integer (used by the
/// integer-closure sanity checks).
pub fn is_integer(r: &BigRational) -> bool {
    r.denom().abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    // Brute-force enumerations used as independent oracles.

    fn brute_anti_involutive(m: usize, n: usize) -> u64 {
        let mut count = 0;
        let mut f = vec![0usize; m];
        loop {
            let ok = (0..m).all(|x| {
                let fx = f[x];
                fx >= m || f[fx] != x
            });
            // anti-involutive also forbids fixed points: f(f(x)) = x when f(x) = x
            let ok = ok && (0..m).all(|x| f[x] != x);
            if ok {
                count += 1;
            }
            let mut i = m;
            loop {
                if i == 0 {
                    return count;
                }
                i -= 1;
                if f[i] + 1 < n {
                    f[i] += 1;
                    f[i + 1..].iter_mut().for_each(|v| *v = 0);
                    break;
                }
            }
        }
    }

    fn brute_nowhere_inverse(m: usize, big_m: usize, n: usize, big_n: usize) -> u64 {
        if (big_m == 0 && n != 0) || (big_n == 0 && m != 0) {
            return 0;
        }
        let total_f = (big_n as u64).pow(m as u32);
        let total_g = (big_m as u64).pow(n as u32);
        let decode = |mut code: u64, len: usize, base: usize| -> Vec<usize> {
            let mut v = vec![0usize; len];
            for slot in v.iter_mut() {
                *slot = (code % base as u64) as usize;
                code /= base as u64;
            }
            v
        };
        let mut count = 0;
        for cf in 0..total_f.max(1) {
            let f = decode(cf, m, big_n.max(1));
            for cg in 0..total_g.max(1) {
                let g = decode(cg, n, big_m.max(1));
                // g(f(u)) ≠ u for u ∈ dom(f), f(g(v)) ≠ v for v ∈ dom(g)
                let ok = (0..m).all(|u| f[u] >= n || g[f[u]] != u)
                    && (0..n).all(|v| g[v] >= m || f[g[v]] != v);
                if ok {
                    count += 1;
                }
            }
        }
        count
    }

    fn brute_matchings(m: usize) -> u64 {
        fn rec(unmatched: &mut Vec<usize>) -> u64 {
            if unmatched.is_empty() {
                return 1;
            }
            let first = unmatched.remove(0);
            let mut total = 0;
            for i in 0..unmatched.len() {
                let partner = unmatched.remove(i);
                total += rec(unmatched);
                unmatched.insert(i, partner);
            }
            unmatched.insert(0, first);
            total
        }
        rec(&mut (0..m).collect())
    }

    #[test]
    fn binomial_and_multinomial() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(multinomial(4, &[2, 1, 1]), BigInt::from(12));
        assert_eq!(binomial(3, 5), BigInt::zero());
    }

    #[test]
    fn alternating_sum_identity() {
        // Σ_{i=0}^{k} (−1)^i C(k,i) = [k = 0], for k ≤ 20.
        for k in 0..=20usize {
            let mut sum = BigInt::zero();
            for i in 0..=k {
                let t = binomial(k, i);
                if i % 2 == 0 {
                    sum += t;
                } else {
                    sum -= t;
                }
            }
            assert_eq!(sum, if k == 0 { BigInt::one() } else { BigInt::zero() });
        }
    }

    #[test]
    fn anti_involutive_examples() {
        for n in 0..=5usize {
            assert_eq!(anti_involutive_count(0, n), BigInt::one());
        }
        assert_eq!(anti_involutive_count(2, 2), BigInt::zero());
        assert_eq!(anti_involutive_count(2, 3), BigInt::from(3));
        for n in 0..=5usize {
            for m in 0..=n {
                assert_eq!(
                    anti_involutive_count(m, n),
                    BigInt::from(brute_anti_involutive(m, n)),
                    "I({m},{n})"
                );
            }
        }
    }

    #[test]
    fn nowhere_inverse_examples() {
        assert_eq!(nowhere_inverse_count(1, 1, 1, 1), BigInt::zero());
        assert_eq!(nowhere_inverse_count(0, 3, 0, 4), BigInt::one());
        for big_m in 0..=4usize {
            for big_n in 0..=4usize {
                for m in 0..=big_m {
                    for n in 0..=big_n {
                        assert_eq!(
                            nowhere_inverse_count(m, big_m, n, big_n),
                            BigInt::from(brute_nowhere_inverse(m, big_m, n, big_n)),
                            "K({m},{big_m},{n},{big_n})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn matching_examples() {
        assert_eq!(matching_count(4), BigInt::from(3));
        assert_eq!(matching_count(3), BigInt::zero());
        assert_eq!(bipartite_matching_count(2, 2), BigInt::from(2));
        for m in 0..=8usize {
            let expected = if m % 2 == 0 { brute_matchings(m) } else { 0 };
            assert_eq!(matching_count(m), BigInt::from(expected), "F({m})");
        }
    }

    #[test]
    fn labelling_collapse_matches_direct_sum() {
        let palette = Palette {
            symmetric: vec![rat(1), ratio(2, 3)],
            directed: vec![ratio(-1, 2), rat(3)],
        };
        for n in 0..=4i64 {
            assert_eq!(labelling_weight(n, &palette), labelling_weight_direct(n, &palette));
        }
        // Unit weights: (k+2ℓ)^N.
        let unit = Palette { symmetric: vec![rat(1); 2], directed: vec![rat(1); 3] };
        assert_eq!(labelling_weight(3, &unit), rat(512));
        // Single colour: w^N.
        let single = Palette { symmetric: vec![rat(5)], directed: vec![] };
        assert_eq!(labelling_weight(4, &single), rat(625));
        // Conventions.
        let empty = Palette::empty();
        assert_eq!(labelling_weight(0, &empty), rat(1));
        assert_eq!(labelling_weight(2, &empty), rat(0));
        assert_eq!(labelling_weight(-1, &palette), rat(0));
    }

    #[test]
    fn labelling_depends_only_on_edge_count() {
        // A path, a star and a triangle with three edges each give the same
        // weighted total, enumerated edge by edge.
        let palette = Palette { symmetric: vec![rat(2)], directed: vec![ratio(1, 3)] };
        let choices: Vec<BigRational> = {
            let mut c = palette.symmetric.clone();
            for x in &palette.directed {
                c.push(x.clone());
                c.push(x.clone());
            }
            c
        };
        let enumerate = |edges: usize| -> BigRational {
            let mut total = BigRational::zero();
            let mut pick = vec![0usize; edges];
            loop {
                let mut w = BigRational::one();
                for &p in &pick {
                    w *= choices[p].clone();
                }
                total += w;
                let mut i = edges;
                loop {
                    if i == 0 {
                        return total;
                    }
                    i -= 1;
                    if pick[i] + 1 < choices.len() {
                        pick[i] += 1;
                        pick[i + 1..].iter_mut().for_each(|v| *v = 0);
                        break;
                    }
                }
            }
        };
        let by_edges = enumerate(3);
        assert_eq!(labelling_weight(3, &palette), by_edges);
    }

    #[test]
    fn within_block_antiinvolutive_examples() {
        let unit2 = Palette { symmetric: vec![rat(1)], directed: vec![rat(1)] };
        // m=0: reduces to L over all C(n,2) edges.
        assert_eq!(
            within_block_antiinvolutive(0, 3, &unit2, &rat(1)),
            rat(27) // (1+2)^3
        );
        // n=2, m=2: I(2,2)=0.
        assert_eq!(within_block_antiinvolutive(2, 2, &unit2, &rat(1)), rat(0));
    }

    #[test]
    fn bipartite_nowhere_inverse_examples() {
        let unit = Palette { symmetric: vec![rat(1)], directed: vec![rat(1)] };
        // m=n=0: (k+2ℓ)^{MN}.
        assert_eq!(
            bipartite_nowhere_inverse(0, 2, 0, 2, &unit, &rat(1), &rat(1)),
            rat(81)
        );
        // Negative remaining edge count is harmless: K(1,1,1,1)=0 swallows it.
        assert_eq!(
            bipartite_nowhere_inverse(1, 1, 1, 1, &unit, &rat(1), &rat(1)),
            rat(0)
        );
    }

    #[test]
    fn matching_weight_examples() {
        // n=m=2 with an empty palette: the single matched edge.
        assert_eq!(within_block_matching(2, 2, &Palette::empty(), &rat(1)), rat(1));
        // m=n=1, M=N=1: one cross edge, matched.
        assert_eq!(
            cross_block_matching(1, 1, 1, 1, &Palette::empty(), &rat(1)),
            rat(1)
        );
        // m≠n: zero.
        assert_eq!(
            cross_block_matching(2, 2, 1, 2, &Palette::empty(), &rat(1)),
            rat(0)
        );
    }

    #[test]
    fn integer_closure() {
        // Integer weights keep all outputs integral.
        let palette = Palette { symmetric: vec![rat(2)], directed: vec![rat(-3)] };
        for m in 0..=3usize {
            for n in m..=4usize {
                assert!(is_integer(&within_block_antiinvolutive(m, n, &palette, &rat(-1))));
                assert!(is_integer(&within_block_matching(m, n, &palette, &rat(7))));
            }
        }
        for m in 0..=2usize {
            for n in 0..=2usize {
                assert!(is_integer(&bipartite_nowhere_inverse(
                    m,
                    3,
                    n,
                    3,
                    &palette,
                    &rat(-1),
                    &rat(2)
                )));
            }
        }
    }
}
