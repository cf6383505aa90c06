//! Exact prime counting and the composite classification of `(√x, x]`.
//!
//! Primality is stored bit-packed over odd values only; `2` is tracked by a
//! flag. Counting beyond a single segment walks consecutive segments of at
//! most [`Limits::segment_size`] values, sieved independently and merged in
//! order, so parallel and serial runs give identical results.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub const DEFAULT_SIEVE_CEILING: u64 = 10_000_000_000;
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 22;
pub const DEFAULT_CLASSIFY_CEILING: u64 = 10_000_000;

/// Capacity limits shared by every sieving operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub sieve_ceiling: u64,
    pub segment_size: u64,
    pub classify_ceiling: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            sieve_ceiling: DEFAULT_SIEVE_CEILING,
            segment_size: DEFAULT_SEGMENT_SIZE,
            classify_ceiling: DEFAULT_CLASSIFY_CEILING,
        }
    }
}

/// Exact integer square root, `⌊√n⌋`, by Newton iteration on integers.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let bits = 64 - n.leading_zeros();
    let mut x = 1u64 << bits.div_ceil(2);
    loop {
        let y = (x + n / x) / 2;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// Primality flags for the closed range `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    lo: u64,
    hi: u64,
    has_two: bool,
    first_odd: u64,
    odd_count: u64,
    words: Vec<u64>,
}

impl PrimeTable {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// Number of values covered, `hi − lo + 1`.
    pub fn len(&self) -> u64 {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Raw odd-only bitstream, one bit per odd value starting at the first odd value ≥ `lo`.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// `false` for values outside `[lo, hi]`.
    pub fn is_prime(&self, n: u64) -> bool {
        if n < self.lo || n > self.hi {
            return false;
        }
        if n == 2 {
            return self.has_two;
        }
        if n % 2 == 0 {
            return false;
        }
        let idx = (n - self.first_odd) / 2;
        self.words[(idx / 64) as usize] >> (idx % 64) & 1 == 1
    }

    pub fn count(&self) -> u64 {
        self.has_two as u64
            + self
                .words
                .iter()
                .map(|w| w.count_ones() as u64)
                .sum::<u64>()
    }

    /// Primes in `[lo, min(x, hi)]`.
    pub fn count_upto(&self, x: u64) -> u64 {
        if x < self.lo {
            return 0;
        }
        if x >= self.hi {
            return self.count();
        }
        let mut total = (self.has_two && x >= 2) as u64;
        if x < self.first_odd {
            return total;
        }
        let last = (x - self.first_odd) / 2;
        let full = (last / 64) as usize;
        total += self.words[..full]
            .iter()
            .map(|w| w.count_ones() as u64)
            .sum::<u64>();
        let rem = last % 64;
        let mask = if rem == 63 {
            u64::MAX
        } else {
            (1u64 << (rem + 1)) - 1
        };
        total + (self.words[full] & mask).count_ones() as u64
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        let two = self.has_two.then_some(2u64);
        let first_odd = self.first_odd;
        let odd = self.words.iter().enumerate().flat_map(move |(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as u64;
                bits &= bits - 1;
                Some(first_odd + 2 * (wi as u64 * 64 + b))
            })
        });
        two.into_iter().chain(odd)
    }

    /// Dense view: element `i` is true iff `lo + i` is prime.
    pub fn to_bits(&self) -> Vec<bool> {
        (self.lo..=self.hi).map(|n| self.is_prime(n)).collect()
    }

    fn blank(lo: u64, hi: u64) -> PrimeTable {
        let first_odd = lo | 1;
        let odd_count = if first_odd > hi {
            0
        } else {
            (hi - first_odd) / 2 + 1
        };
        let mut words = vec![u64::MAX; odd_count.div_ceil(64) as usize];
        let tail = odd_count % 64;
        if tail != 0 {
            if let Some(last) = words.last_mut() {
                *last = (1u64 << tail) - 1;
            }
        }
        PrimeTable {
            lo,
            hi,
            has_two: lo <= 2 && hi >= 2,
            first_odd,
            odd_count,
            words,
        }
    }

    fn clear(&mut self, n: u64) {
        let idx = (n - self.first_odd) / 2;
        self.words[(idx / 64) as usize] &= !(1u64 << (idx % 64));
    }
}

/// Primes up to `n` from a plain byte sieve; used for sieving primes below √hi.
fn base_primes(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

fn sieve_with_base(lo: u64, hi: u64, base: &[u64]) -> PrimeTable {
    let mut table = PrimeTable::blank(lo, hi);
    if table.odd_count == 0 {
        return table;
    }
    if table.first_odd == 1 {
        table.clear(1);
    }
    for &p in base.iter().skip_while(|&&p| p == 2) {
        let sq = p * p;
        if sq > hi {
            break;
        }
        let mut m = if sq >= lo { sq } else { lo.div_ceil(p) * p };
        if m % 2 == 0 {
            m += p;
        }
        // Consecutive odd multiples are 2p apart, i.e. p apart in bit index.
        let mut idx = (m - table.first_odd) / 2;
        let words = &mut table.words;
        while idx < table.odd_count {
            words[(idx / 64) as usize] &= !(1u64 << (idx % 64));
            idx += p;
        }
    }
    table
}

fn check_range(lo: u64, hi: u64, limits: &Limits) -> Result<()> {
    if lo < 2 {
        return domain(format!("segment start {lo} must be at least 2"));
    }
    if lo > hi {
        return Err(Error::RangeInverted { lo, hi });
    }
    if hi > limits.sieve_ceiling {
        return Err(Error::Capacity {
            what: "sieve height",
            value: hi,
            limit: limits.sieve_ceiling,
        });
    }
    Ok(())
}

/// Sieve a single segment `[lo, hi]`.
pub fn sieve_segment(lo: u64, hi: u64, limits: &Limits) -> Result<PrimeTable> {
    check_range(lo, hi, limits)?;
    if hi - lo > limits.segment_size {
        return Err(Error::Capacity {
            what: "segment width",
            value: hi - lo,
            limit: limits.segment_size,
        });
    }
    Ok(sieve_with_base(lo, hi, &base_primes(isqrt(hi))))
}

/// Sieve `[lo, hi]` as consecutive segments no wider than the configured segment size.
pub fn sieve_range(lo: u64, hi: u64, limits: &Limits) -> Result<Vec<PrimeTable>> {
    check_range(lo, hi, limits)?;
    let base = base_primes(isqrt(hi));
    Ok(segment_bounds(lo, hi, limits.segment_size.max(1))
        .into_par_iter()
        .map(|(a, b)| sieve_with_base(a, b, &base))
        .collect())
}

fn segment_bounds(lo: u64, hi: u64, width: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut a = lo;
    loop {
        let b = a.saturating_add(width - 1).min(hi);
        out.push((a, b));
        if b == hi {
            break;
        }
        a = b + 1;
    }
    out
}

/// `π(x)`, the number of primes `≤ x`.
pub fn pi_exact(x: u64, limits: &Limits) -> Result<u64> {
    Ok(pi_exact_many(&[x], limits)?[0])
}

/// `π(x)` for every `x` in `xs`, from a single segmented pass up to `max(xs)`.
/// Results are returned in input order.
pub fn pi_exact_many(xs: &[u64], limits: &Limits) -> Result<Vec<u64>> {
    if xs.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(&bad) = xs.iter().find(|&&x| x < 2) {
        return domain(format!("pi_exact requires x >= 2, got {bad}"));
    }
    let mut sorted: Vec<u64> = xs.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let top = *sorted.last().unwrap();
    check_range(2, top, limits)?;

    let base = base_primes(isqrt(top));
    let segments = segment_bounds(2, top, limits.segment_size.max(1));
    let per_segment: Vec<(u64, Vec<u64>)> = segments
        .into_par_iter()
        .map(|(a, b)| {
            let table = sieve_with_base(a, b, &base);
            let inside = sorted
                .iter()
                .filter(|&&x| x >= a && x <= b)
                .map(|&x| table.count_upto(x))
                .collect();
            (table.count(), inside)
        })
        .collect();

    let mut running = 0u64;
    let mut counts = Vec::with_capacity(sorted.len());
    for (total, inside) in per_segment {
        counts.extend(inside.iter().map(|c| running + c));
        running += total;
    }
    Ok(xs
        .iter()
        .map(|x| counts[sorted.binary_search(x).unwrap()])
        .collect())
}

/// `τ(x) = π(x) − π(⌊√x⌋)`, the number of primes in `(√x, x]`.
pub fn tau_exact(x: u64, limits: &Limits) -> Result<u64> {
    if x < 4 {
        return domain(format!("tau_exact requires x >= 4, got {x}"));
    }
    let c = pi_exact_many(&[isqrt(x), x], limits)?;
    Ok(c[1] - c[0])
}

/// Smallest-prime-factor table for `0..=n` (entries 0 and 1 are 0).
pub fn smallest_prime_factors(n: u64) -> Vec<u32> {
    let n = n as usize;
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] != 0 {
            continue;
        }
        spf[i] = i as u32;
        let mut j = i * i;
        while j <= n {
            if spf[j] == 0 {
                spf[j] = i as u32;
            }
            j += i;
        }
    }
    spf
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaEntry {
    pub prime: u64,
    pub count: u64,
}

/// Sizes of the composite classes `D_j` over `(√x, x]`: every composite `d`
/// belongs to the class of the largest prime `p_j ≤ √x` that divides it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositePartition {
    pub x: u64,
    pub sigma: Vec<SigmaEntry>,
    pub total_composites: u64,
}

impl CompositePartition {
    pub fn sigma_of(&self, p: u64) -> Option<u64> {
        self.sigma.iter().find(|e| e.prime == p).map(|e| e.count)
    }

    /// `(x − ⌊√x⌋) − τ(x)`, the number of composites the partition must cover.
    pub fn expected_total(&self, tau: u64) -> u64 {
        self.x - isqrt(self.x) - tau
    }
}

pub fn classify_composites(x: u64, limits: &Limits) -> Result<CompositePartition> {
    if x < 9 {
        return domain(format!(
            "no composite lies in (sqrt x, x] classes below x = 9, got {x}"
        ));
    }
    if x > limits.classify_ceiling {
        return Err(Error::Capacity {
            what: "classification bound",
            value: x,
            limit: limits.classify_ceiling,
        });
    }
    let r = isqrt(x);
    let spf = smallest_prime_factors(r);
    let small: Vec<u64> = (2..=r).filter(|&k| spf[k as usize] as u64 == k).collect();

    // Marking multiples in ascending prime order leaves each entry labelled
    // with its largest prime divisor ≤ √x.
    const UNLABELLED: u16 = u16::MAX;
    let width = (x - r) as usize;
    let mut label = vec![UNLABELLED; width];
    for (j, &p) in small.iter().enumerate() {
        let mut m = (r / p + 1) * p;
        while m <= x {
            label[(m - r - 1) as usize] = j as u16;
            m += p;
        }
    }
    let mut counts = vec![0u64; small.len()];
    for &l in &label {
        if l != UNLABELLED {
            counts[l as usize] += 1;
        }
    }
    let total_composites = counts.iter().sum();
    Ok(CompositePartition {
        x,
        sigma: small
            .iter()
            .zip(counts)
            .map(|(&prime, count)| SigmaEntry { prime, count })
            .collect(),
        total_composites,
    })
}

/// Write `table` as a little-endian `(lo, hi)` header followed by the raw bitstream.
pub fn write_cache<W: Write>(mut w: W, table: &PrimeTable) -> Result<()> {
    w.write_all(&table.lo.to_le_bytes())?;
    w.write_all(&table.hi.to_le_bytes())?;
    for word in &table.words {
        w.write_all(&word.to_le_bytes())?;
    }
    Ok(())
}

/// Read a cached table for `[lo, hi]`. Returns `Ok(None)` when the header does
/// not match the requested range or the payload is truncated.
pub fn read_cache<R: Read>(mut r: R, lo: u64, hi: u64) -> Result<Option<PrimeTable>> {
    let mut buf = [0u8; 8];
    let mut header = [0u64; 2];
    for h in header.iter_mut() {
        if r.read_exact(&mut buf).is_err() {
            return Ok(None);
        }
        *h = u64::from_le_bytes(buf);
    }
    if header != [lo, hi] || lo < 2 || lo > hi {
        return Ok(None);
    }
    let mut table = PrimeTable::blank(lo, hi);
    for word in table.words.iter_mut() {
        if r.read_exact(&mut buf).is_err() {
            return Ok(None);
        }
        *word = u64::from_le_bytes(buf);
    }
    Ok(Some(table))
}

/// Load `[lo, hi]` from the cache file at `path`, sieving and rewriting it on a miss.
pub fn cached_segment(path: &Path, lo: u64, hi: u64, limits: &Limits) -> Result<PrimeTable> {
    if let Ok(file) = std::fs::File::open(path) {
        if let Some(table) = read_cache(std::io::BufReader::new(file), lo, hi)? {
            return Ok(table);
        }
    }
    let table = sieve_segment(lo, hi, limits)?;
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_cache(&mut w, &table)?;
    w.flush()?;
    Ok(table)
}
