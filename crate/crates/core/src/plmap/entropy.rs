//! Certified enclosures of `log rho(A)` for the incidence matrix `A`.
//!
//! Each nontrivial strong component `B` with period `p` is handled on its
//! own. For a positive vector `v`, the Collatz-Wielandt inequalities give
//! `min (B^p v)_i / v_i <= rho^p <= max (B^p v)_i / v_i`. The first round uses
//! `v = 1`, i.e. the row sums of `B^p`, which is already exact whenever those
//! sums agree. Later rounds seed `v` with a floating-point Perron vector and
//! sharpen it by exact power iteration on big integers, applied to
//! `B^p + cI` so that eigenvalues of modulus close to `rho^p` but a different
//! argument die out quickly. The bounds for `B^p + cI` shift back by `c`.
//! When power iteration stalls, the seed comes from dense inverse iteration.
//! Lower bounds may also use vectors with zeros, which handles weakly
//! coupled parts whose growth rates nearly agree.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::markov::{component_period, incidence_matrix, is_nontrivial, strongly_connected_components};
use super::PLMarkovMap;
use crate::logval::LogValue;
use crate::rational::{rat, Rational};

#[derive(Clone, Debug)]
pub struct EntropyOptions {
    /// Target width `upper - lower`.
    pub tolerance: Rational,
    /// Maximum number of exact refinement rounds per component.
    pub depth_cap: usize,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions { tolerance: rat(1, 1_000_000_000), depth_cap: 4096 }
    }
}

impl EntropyOptions {
    pub fn with_tolerance(tolerance: Rational) -> Self {
        EntropyOptions { tolerance, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockEnclosure {
    pub intervals: Vec<usize>,
    pub period: usize,
    pub lower: LogValue,
    pub upper: LogValue,
    pub depth: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntropyEnclosure {
    pub lower: LogValue,
    pub upper: LogValue,
    /// Refinement rounds used; 0 when the row sums already decide.
    pub depth: usize,
    pub converged: bool,
    pub blocks: Vec<BlockEnclosure>,
}

impl EntropyEnclosure {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// Display-only width.
    pub fn width_approx(&self) -> f64 {
        self.upper.diff_approx(&self.lower)
    }

    /// Whether two enclosures come within `gap` of each other.
    pub fn overlaps_within(&self, other: &EntropyEnclosure, gap: &Rational) -> bool {
        self.lower.lt_plus(&other.upper, gap) && other.lower.lt_plus(&self.upper, gap)
            || self.lower <= other.upper && other.lower <= self.upper
    }
}

pub fn entropy(m: &PLMarkovMap, opts: &EntropyOptions) -> EntropyEnclosure {
    let a = incidence_matrix(m);
    let rows = a.rows();
    let mut blocks = Vec::new();
    for comp in strongly_connected_components(rows) {
        if !is_nontrivial(rows, &comp) {
            continue;
        }
        blocks.push(block_enclosure(rows, comp, opts));
    }
    let mut lower = LogValue::zero();
    let mut upper = LogValue::zero();
    let mut depth = 0;
    let mut converged = true;
    for b in &blocks {
        lower = LogValue::max(lower, b.lower.clone());
        upper = LogValue::max(upper, b.upper.clone());
    }
    for b in &blocks {
        // A block whose upper bound is below the overall lower bound cannot
        // matter, converged or not.
        if b.upper >= lower {
            depth = depth.max(b.depth);
            converged &= b.converged;
        }
    }
    EntropyEnclosure { lower, upper, depth, converged, blocks }
}

struct Block {
    rows: Vec<Vec<usize>>,
    period: usize,
    shift: u64,
}

impl Block {
    /// `(B^p + cI) v`.
    fn apply(&self, v: &[BigUint]) -> Vec<BigUint> {
        let mut cur = v.to_vec();
        for _ in 0..self.period {
            cur = self.rows.iter().map(|r| r.iter().map(|&j| &cur[j]).sum()).collect();
        }
        for (c, x) in cur.iter_mut().zip(v) {
            *c += x * self.shift;
        }
        cur
    }

    fn apply_f64(&self, v: &[f64]) -> Vec<f64> {
        let mut cur = v.to_vec();
        for _ in 0..self.period {
            cur = self.rows.iter().map(|r| r.iter().map(|&j| cur[j]).sum()).collect();
        }
        for (c, x) in cur.iter_mut().zip(v) {
            *c += x * self.shift as f64;
        }
        cur
    }

    /// Collatz-Wielandt bounds for `rho^p`: `(min, max)` of `w_i / v_i - c`.
    fn bounds(&self, v: &[BigUint], w: &[BigUint]) -> (Rational, Rational) {
        let ratio = |i: usize| {
            Rational::new(
                num_bigint::BigInt::from(w[i].clone()),
                num_bigint::BigInt::from(v[i].clone()),
            )
        };
        let mut lo = ratio(0);
        let mut hi = lo.clone();
        for i in 1..v.len() {
            let r = ratio(i);
            if r < lo {
                lo = r;
            } else if r > hi {
                hi = r;
            }
        }
        let c = Rational::from_integer(self.shift.into());
        (lo - &c, hi - c)
    }

    /// Lower bound for `rho^p` from vectors that vanish off a shrinking
    /// support. A nonnegative `x != 0` with `(B^p + cI) x >= mu x` forces
    /// `rho^p + c >= mu`, so coordinates whose ratio lags behind `hi` (the
    /// residue of a weakly coupled part that floating point cannot resolve)
    /// can be dropped.
    fn pruned_lower(&self, v: &[BigUint], hi: &Rational) -> Option<Rational> {
        let c = Rational::from_integer(self.shift.into());
        let target = hi + &c;
        let mut x = v.to_vec();
        let mut best: Option<Rational> = None;
        for _ in 0..24 {
            let w = self.apply(&x);
            let ratios: Vec<Option<Rational>> = (0..x.len())
                .map(|i| {
                    (!x[i].is_zero()).then(|| {
                        Rational::new(num_bigint::BigInt::from(w[i].clone()), num_bigint::BigInt::from(x[i].clone()))
                    })
                })
                .collect();
            let lo = ratios.iter().flatten().min()?.clone();
            if best.as_ref().is_none_or(|b| lo > *b) {
                best = Some(lo.clone());
            }
            let cut = (&lo + &target) / Rational::from_integer(2.into());
            let mut dropped = false;
            for (i, r) in ratios.iter().enumerate() {
                if matches!(r, Some(r) if *r < cut) {
                    x[i] = BigUint::zero();
                    dropped = true;
                }
            }
            if !dropped || x.iter().all(Zero::is_zero) {
                break;
            }
        }
        best.map(|b| b - c)
    }

    /// Floating-point Perron vector of `B^p`, entries in `(0, 1]`.
    fn perron_seed(&self) -> Vec<f64> {

        let n = self.rows.len();
        let nnz: usize = self.rows.iter().map(Vec::len).sum();
        let budget = (200_000_000 / (nnz * self.period).max(1)).clamp(50, 20_000);
        let mut x = vec![1.0f64; n];
        for _ in 0..budget {
            let y = self.apply_f64(&x);
            let top = y.iter().cloned().fold(0.0, f64::max);
            let mut lo = f64::INFINITY;
            let mut hi: f64 = 0.0;
            for i in 0..n {
                let r = y[i] / x[i];
                lo = lo.min(r);
                hi = hi.max(r);
            }
            x = y.iter().map(|&t| (t / top).max(1e-290)).collect();
            if hi / lo - 1.0 < 1e-14 {
                return x;
            }
        }
        if n <= INVERSE_LIMIT {
            self.inverse_iteration(x)
        } else {
            x
        }
    }

    /// Dense `B^p` in floating point.
    fn dense_power(&self) -> Vec<Vec<f64>> {
        let n = self.rows.len();
        let mut m = vec![vec![0.0; n]; n];
        for (i, r) in self.rows.iter().enumerate() {
            for &j in r {
                m[i][j] += 1.0;
            }
        }
        let base = m.clone();
        for _ in 1..self.period {
            let mut next = vec![vec![0.0; n]; n];
            for i in 0..n {
                for (k, &a) in m[i].iter().enumerate() {
                    if a != 0.0 {
                        for (t, &b) in base[k].iter().enumerate() {
                            next[i][t] += a * b;
                        }
                    }
                }
            }
            m = next;
        }
        m
    }

    /// Inverse iteration `(sI - B^p) y = x` with `s` the current upper
    /// Collatz-Wielandt estimate. Separates eigenvalues too close to `rho^p`
    /// for power iteration.
    fn inverse_iteration(&self, mut x: Vec<f64>) -> Vec<f64> {
        let m = self.dense_power();
        let n = x.len();
        let cw = |x: &[f64]| {
            let y: Vec<f64> = m.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect();
            let mut lo = f64::INFINITY;
            let mut hi: f64 = 0.0;
            for i in 0..n {
                lo = lo.min(y[i] / x[i]);
                hi = hi.max(y[i] / x[i]);
            }
            (lo, hi)
        };
        let (mut lo, mut hi) = cw(&x);
        for _ in 0..8 {
            let sigma = hi * (1.0 + 1e-12);
            let mut a: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
            for (i, row) in a.iter_mut().enumerate() {
                row[i] += sigma;
            }
            let Some(y) = solve(a, x.clone()) else { break };
            let top = y.iter().map(|t| t.abs()).fold(0.0, f64::max);
            if !(top.is_finite() && top > 0.0) {
                break;
            }
            let y: Vec<f64> = y.iter().map(|t| (t.abs() / top).max(1e-290)).collect();
            let (lo2, hi2) = cw(&y);
            if hi2 / lo2 >= hi / lo {
                break;
            }
            x = y;
            (lo, hi) = (lo2, hi2);
            if hi / lo - 1.0 < 1e-14 {
                break;
            }
        }
        x
    }
}

/// Largest block handled by dense inverse iteration.
const INVERSE_LIMIT: usize = 2500;

/// Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c] == 0.0 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        let (top, rest) = a.split_at_mut(c + 1);
        let pivot = &top[c];
        for (k, row) in rest.iter_mut().enumerate() {
            let f = row[c] / pivot[c];
            if f != 0.0 {
                for t in c..n {
                    row[t] -= f * pivot[t];
                }
                b[c + 1 + k] -= f * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

fn to_log(ratio: Rational, period: usize) -> LogValue {
    let ratio = if ratio < Rational::one() { Rational::one() } else { ratio };
    LogValue::new(ratio, period as u64)
}

fn block_enclosure(rows: &[Vec<usize>], comp: Vec<usize>, opts: &EntropyOptions) -> BlockEnclosure {
    let mut local = vec![usize::MAX; rows.len()];
    for (k, &v) in comp.iter().enumerate() {
        local[v] = k;
    }
    let sub: Vec<Vec<usize>> = comp
        .iter()
        .map(|&v| rows[v].iter().filter(|&&w| local[w] != usize::MAX).map(|&w| local[w]).collect())
        .collect();
    if sub.iter().all(|r| r.len() == 1) {
        return BlockEnclosure {
            intervals: comp,
            period: 1,
            lower: LogValue::zero(),
            upper: LogValue::zero(),
            depth: 0,
            converged: true,
        };
    }
    let all: Vec<usize> = (0..sub.len()).collect();
    let (period, _) = component_period(&sub, &all);
    let mut block = Block { rows: sub, period, shift: 0 };

    let ones = vec![BigUint::one(); comp.len()];
    let (mut lo, mut hi) = block.bounds(&ones, &block.apply(&ones));
    // Shift by about rho^p.
    block.shift = lo.to_integer().to_u64().unwrap_or(1).clamp(1, 1 << 20);
    let done = |lo: &Rational, hi: &Rational| {
        let (l, u) = (to_log(lo.clone(), period), to_log(hi.clone(), period));
        l == u || u.lt_plus(&l, &opts.tolerance)
    };
    let mut depth = 0;
    if !done(&lo, &hi) && opts.depth_cap > 0 {
        let seed = block.perron_seed();
        let min = seed.iter().cloned().fold(f64::INFINITY, f64::min);
        let shift = (96.0 - min.log2()).ceil().max(0.0) as i32;
        let mut v: Vec<BigUint> = seed
            .iter()
            .map(|&x| {
                let (mant, exp) = decompose(x);
                let e = exp + shift;
                let b = BigUint::from(mant);
                if e >= 0 {
                    b << e as u32
                } else {
                    (b >> (-e) as u32).max(BigUint::one())
                }
            })
            .collect();
        while depth < opts.depth_cap {
            depth += 1;
            let w = block.apply(&v);
            let (l, h) = block.bounds(&v, &w);
            if l > lo {
                lo = l;
            }
            if h < hi {
                hi = h;
            }
            if !done(&lo, &hi) {
                if let Some(l) = block.pruned_lower(&v, &hi) {
                    if l > lo {
                        lo = l;
                    }
                }
            }
            if done(&lo, &hi) {
                break;
            }
            // Renormalize so the smallest entry keeps about 96 bits.
            let min_bits = w.iter().map(|x| x.bits()).min().unwrap_or(0);
            let cut = min_bits.saturating_sub(96);
            v = w.into_iter().map(|x| (x >> cut).max(BigUint::one())).collect();
        }
    }
    let converged = done(&lo, &hi);
    BlockEnclosure { intervals: comp, period, lower: to_log(lo, period), upper: to_log(hi, period), depth, converged }
}

/// `x = mant * 2^exp` with a 53-bit integer mantissa.
fn decompose(x: f64) -> (u64, i32) {
    let e = x.log2().floor() as i32 - 52;
    let mant = (x / 2f64.powi(e)).round();
    (mant.to_u64().unwrap_or(1).max(1), e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plmap::tests::tent3;

    #[test]
    fn tent_is_exact_at_depth_zero() {
        let e = entropy(&tent3(), &EntropyOptions::default());
        assert_eq!(e.lower, LogValue::of(3, 1));
        assert_eq!(e.upper, LogValue::of(3, 1));
        assert_eq!(e.depth, 0);
        assert!(e.converged);
    }

    #[test]
    fn non_constant_row_sums_converge() {
        // Golden mean shift: rho = (1 + sqrt 5) / 2.
        let rows = vec![vec![0, 1], vec![0]];
        let b = block_enclosure(&rows, vec![0, 1], &EntropyOptions::default());
        assert!(b.converged && b.depth >= 1);
        let phi = ((1.0 + 5f64.sqrt()) / 2.0).ln();
        assert!(b.lower.approx() <= phi + 1e-12 && phi - 1e-12 <= b.upper.approx());
        assert!(b.upper.diff_approx(&b.lower) <= 1e-9);
    }

    #[test]
    fn cycles_have_zero_entropy() {
        let rows = vec![vec![1], vec![2], vec![0]];
        let b = block_enclosure(&rows, vec![0, 1, 2], &EntropyOptions::default());
        assert!(b.lower.is_zero() && b.upper.is_zero());
    }

    #[test]
    fn decompose_round_trips() {
        for x in [1.0, 0.75, 1e-20, 0.123456789] {
            let (m, e) = decompose(x);
            assert!(((m as f64) * 2f64.powi(e) - x).abs() <= x * 1e-15);
        }
    }
}
