#![allow(dead_code)]

use fcc_core::lattice::{Metric, Region, Site};
use fcc_core::search::{Constraint, PowerGraph};
use rand::seq::SliceRandom;
use rand::Rng;

/// Tries all `k^n` assignments in lexicographic order.
pub fn naive_colorable(
    region: &Region,
    d: u32,
    k: u32,
    metric: Metric,
    constraints: &[Constraint],
) -> bool {
    let g = PowerGraph::build(region, d, metric);
    let idx = |s: Site| region.index_of(s).unwrap();
    let mut differ: Vec<(usize, usize)> = g.edges().collect();
    let mut same = Vec::new();
    for c in constraints {
        match *c {
            Constraint::Equal(u, v) => same.push((idx(u), idx(v))),
            Constraint::Distinct(u, v) => differ.push((idx(u), idx(v))),
        }
    }
    let n = region.len();
    let mut colors = vec![0u32; n];
    loop {
        if differ.iter().all(|&(a, b)| colors[a] != colors[b])
            && same.iter().all(|&(a, b)| colors[a] == colors[b])
        {
            return true;
        }
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            colors[i] += 1;
            if colors[i] < k {
                break;
            }
            colors[i] = 0;
            i += 1;
        }
    }
}

/// `n` distinct sites drawn from a small box around the origin.
pub fn random_region<R: Rng>(rng: &mut R, n: usize) -> Region {
    let mut pool: Vec<Site> = Vec::new();
    for z in -1..=1 {
        for y in -4..=4 {
            for x in -4..=4 {
                if let Ok(s) = Site::new(x, y, z) {
                    pool.push(s);
                }
            }
        }
    }
    pool.shuffle(rng);
    Region::explicit(pool.into_iter().take(n)).unwrap()
}

/// Largest `k <= 6` with `k^n <= cap`, at least 1.
pub fn max_k(n: usize, cap: f64) -> u32 {
    (1..=6)
        .rev()
        .find(|&k| (k as f64).powi(n as i32) <= cap)
        .unwrap_or(1)
}
