#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use ruelle_core::{Mode, SftMatrix};

/// Every accepted 0/1 matrix of size `n`.
pub fn all_zero_one(n: usize) -> Vec<SftMatrix> {
    let cells = n * n;
    (0u32..1 << cells)
        .filter_map(|bits| {
            let rows: Vec<Vec<i64>> =
                (0..n).map(|i| (0..n).map(|j| ((bits >> (i * n + j)) & 1) as i64).collect()).collect();
            SftMatrix::new(&rows, Mode::ZeroOne).ok()
        })
        .collect()
}

/// A random accepted matrix of size `n` with entries `<= max_entry`.
pub fn random_accepted(rng: &mut ChaCha8Rng, n: usize, max_entry: i64) -> SftMatrix {
    let mode = if max_entry == 1 { Mode::ZeroOne } else { Mode::Nonnegative };
    loop {
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..=max_entry)).collect()).collect();
        if let Ok(m) = SftMatrix::new(&rows, mode) {
            return m;
        }
    }
}

pub fn golden_mean() -> SftMatrix {
    SftMatrix::zero_one(&[&[1, 1], &[1, 0]]).unwrap()
}

pub fn full(n: usize) -> SftMatrix {
    SftMatrix::full_shift(n).unwrap()
}

pub fn big_pair() -> SftMatrix {
    SftMatrix::new(&[vec![19, 5], vec![4, 1]], Mode::Nonnegative).unwrap()
}

/// Closed walks of length `len`, counted by explicit depth-first search.
pub fn brute_force_cycles(a: &SftMatrix, len: usize) -> u64 {
    fn walk(a: &SftMatrix, start: u32, cur: u32, left: usize) -> u64 {
        if left == 0 {
            return (cur == start) as u64;
        }
        a.symbols().filter(|&s| a.allows(cur, s)).map(|s| walk(a, start, s, left - 1)).sum()
    }
    a.symbols().map(|s| walk(a, s, s, len)).sum()
}

/// Closed walks of each length `1..=max_len`, by one depth-first search per
/// start vertex.
pub fn brute_force_cycle_counts(a: &SftMatrix, max_len: usize) -> Vec<u64> {
    fn walk(a: &SftMatrix, start: u32, cur: u32, depth: usize, max_len: usize, counts: &mut [u64]) {
        if depth > 0 && cur == start {
            counts[depth - 1] += 1;
        }
        if depth == max_len {
            return;
        }
        for s in a.symbols().filter(|&s| a.allows(cur, s)) {
            walk(a, start, s, depth + 1, max_len, counts);
        }
    }
    let mut counts = vec![0; max_len];
    for s in a.symbols() {
        walk(a, s, s, 0, max_len, &mut counts);
    }
    counts
}

/// Smallest bit encoding of `a` over all simultaneous relabellings of rows
/// and columns, with the relabelled matrix.
pub fn relabel_canonical(a: &SftMatrix) -> (u64, SftMatrix) {
    let n = a.n();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<(u64, Vec<usize>)> = None;
    loop {
        let code = (0..n * n).fold(0u64, |acc, k| (acc << 1) | a.entry(perm[k / n], perm[k % n]));
        if best.as_ref().is_none_or(|(b, _)| code < *b) {
            best = Some((code, perm.clone()));
        }
        // next permutation in lexicographic order
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    let (code, p) = best.unwrap();
    let rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| a.entry(p[i], p[j]) as i64).collect()).collect();
    (code, SftMatrix::new(&rows, Mode::ZeroOne).unwrap())
}
