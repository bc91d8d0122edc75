//! Backtracking over color classes with forward checking.
//!
//! Equal constraints merge sites into classes; edges and distinct
//! constraints become class conflicts. Domains are `u128` bit sets, so a
//! search supports up to 128 colors.

use std::collections::HashMap;
use std::time::Instant;

use petgraph::unionfind::UnionFind;

use super::{Budget, SearchError, SearchStats};

/// A coloring problem on sites `0..n`, independent of geometry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringInstance {
    pub n: usize,
    pub k: u32,
    /// Power-graph edges `(i, j)`, `i < j`, canonical order.
    pub edges: Vec<(usize, usize)>,
    /// Sites pre-colored `0, 1, ...` in this order.
    pub anchor: Vec<usize>,
    pub equal: Vec<(usize, usize)>,
    pub distinct: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Outcome {
    /// Color of every site.
    Colorable(Vec<u32>),
    NotColorable,
    Inconclusive,
}

const NONE: u32 = u32::MAX;

struct Classes {
    of_site: Vec<usize>,
    adj: Vec<Vec<usize>>,
    pre: Vec<(usize, u32)>,
}

impl ColoringInstance {
    fn check_indices(&self) -> Result<(), SearchError> {
        let pairs = self.edges.iter().chain(&self.equal).chain(&self.distinct);
        let bad = pairs
            .flat_map(|&(a, b)| [a, b])
            .chain(self.anchor.iter().copied())
            .find(|&i| i >= self.n);
        match bad {
            Some(i) => Err(SearchError::InvalidProblem(format!(
                "site index {i} out of range for {} sites",
                self.n
            ))),
            None => Ok(()),
        }
    }

    /// `None` when some conflict joins a class to itself or the anchor
    /// contradicts itself.
    fn classes(&self) -> Option<Classes> {
        let mut uf = UnionFind::<usize>::new(self.n);
        for &(a, b) in &self.equal {
            uf.union(a, b);
        }
        let mut id: HashMap<usize, usize> = HashMap::new();
        let of_site: Vec<usize> = (0..self.n)
            .map(|i| {
                let next = id.len();
                *id.entry(uf.find(i)).or_insert(next)
            })
            .collect();
        let mut adj = vec![Vec::new(); id.len()];
        for &(a, b) in self.edges.iter().chain(&self.distinct) {
            let (ca, cb) = (of_site[a], of_site[b]);
            if ca == cb {
                return None;
            }
            adj[ca].push(cb);
            adj[cb].push(ca);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let mut pre: Vec<(usize, u32)> = Vec::new();
        for (c, &s) in self.anchor.iter().enumerate() {
            let class = of_site[s];
            match pre.iter().find(|&&(p, _)| p == class) {
                Some(_) => return None,
                None => pre.push((class, c as u32)),
            }
        }
        Some(Classes { of_site, adj, pre })
    }

    pub(crate) fn solve(&self, budget: Budget) -> Result<(Outcome, SearchStats), SearchError> {
        self.check_indices()?;
        let start = Instant::now();
        let mut stats = SearchStats {
            anchor_size: self.anchor.len(),
            ..SearchStats::default()
        };
        let done = |outcome, mut stats: SearchStats| {
            stats.elapsed = start.elapsed();
            Ok((outcome, stats))
        };
        if self.anchor.len() > self.k as usize {
            return done(Outcome::NotColorable, stats);
        }
        let Some(classes) = self.classes() else {
            return done(Outcome::NotColorable, stats);
        };
        let m = classes.adj.len();
        let class_colors = if m <= self.k as usize {
            Some(trivial(&classes, m))
        } else if self.k > 128 {
            return Err(SearchError::TooManyColors(self.k));
        } else {
            let mut dfs = Dfs::new(&classes, self.k);
            match dfs.run(&classes, budget, start, &mut stats) {
                Outcome::Colorable(c) => Some(c),
                Outcome::NotColorable => None,
                Outcome::Inconclusive => return done(Outcome::Inconclusive, stats),
            }
        };
        let Some(class_colors) = class_colors else {
            return done(Outcome::NotColorable, stats);
        };
        let colors: Vec<u32> = classes.of_site.iter().map(|&c| class_colors[c]).collect();
        assert!(
            self.accepts(&colors),
            "search produced an improper coloring"
        );
        done(Outcome::Colorable(colors), stats)
    }

    /// Whether a site coloring satisfies every constraint of the instance.
    pub fn accepts(&self, colors: &[u32]) -> bool {
        colors.len() == self.n
            && colors.iter().all(|&c| c < self.k)
            && self
                .edges
                .iter()
                .chain(&self.distinct)
                .all(|&(a, b)| colors[a] != colors[b])
            && self.equal.iter().all(|&(a, b)| colors[a] == colors[b])
            && self
                .anchor
                .iter()
                .enumerate()
                .all(|(c, &s)| colors[s] == c as u32)
    }
}

/// At most `k` classes: every class gets its own color.
fn trivial(classes: &Classes, m: usize) -> Vec<u32> {
    let mut colors = vec![NONE; m];
    for &(c, col) in &classes.pre {
        colors[c] = col;
    }
    let fresh = classes.pre.len() as u32..;
    for (c, col) in colors.iter_mut().filter(|c| **c == NONE).zip(fresh) {
        *c = col;
    }
    colors
}

struct Frame {
    v: usize,
    candidates: u128,
    trail_len: usize,
    prev_max: i64,
}

struct Dfs {
    domain: Vec<u128>,
    color: Vec<u32>,
    trail: Vec<(usize, u128)>,
    max_used: i64,
    remaining: usize,
    k: u32,
}

impl Dfs {
    fn new(classes: &Classes, k: u32) -> Self {
        let full = if k == 128 {
            u128::MAX
        } else {
            (1u128 << k) - 1
        };
        let m = classes.adj.len();
        Dfs {
            domain: vec![full; m],
            color: vec![NONE; m],
            trail: Vec::new(),
            max_used: -1,
            remaining: m,
            k,
        }
    }

    /// Colors `v` and prunes `c` from uncolored neighbours; false on a wipe-out.
    fn assign(&mut self, classes: &Classes, v: usize, c: u32) -> bool {
        self.color[v] = c;
        self.remaining -= 1;
        self.max_used = self.max_used.max(c as i64);
        let bit = 1u128 << c;
        for &w in &classes.adj[v] {
            if self.color[w] == NONE && self.domain[w] & bit != 0 {
                self.trail.push((w, self.domain[w]));
                self.domain[w] &= !bit;
                if self.domain[w] == 0 {
                    return false;
                }
            }
        }
        true
    }

    fn undo(&mut self, frame: &Frame) {
        while self.trail.len() > frame.trail_len {
            let (w, d) = self.trail.pop().expect("trail is longer than the mark");
            self.domain[w] = d;
        }
        if self.color[frame.v] != NONE {
            self.color[frame.v] = NONE;
            self.remaining += 1;
        }
        self.max_used = frame.prev_max;
    }

    /// Fewest remaining colors, then most neighbours, then lowest index.
    fn select(&self, classes: &Classes) -> usize {
        (0..self.domain.len())
            .filter(|&v| self.color[v] == NONE)
            .min_by_key(|&v| {
                (
                    self.domain[v].count_ones(),
                    std::cmp::Reverse(classes.adj[v].len()),
                    v,
                )
            })
            .expect("some class is uncolored")
    }

    fn run(
        &mut self,
        classes: &Classes,
        budget: Budget,
        start: Instant,
        stats: &mut SearchStats,
    ) -> Outcome {
        for &(v, c) in &classes.pre {
            if self.domain[v] & (1u128 << c) == 0 || !self.assign(classes, v, c) {
                return Outcome::NotColorable;
            }
        }
        let mut stack: Vec<Frame> = Vec::new();
        let mut descend = true;
        loop {
            if descend {
                if self.remaining == 0 {
                    return Outcome::Colorable(self.color.clone());
                }
                let v = self.select(classes);
                // colors above max_used are interchangeable: try only the first
                let limit = (self.max_used + 2).min(self.k as i64) as u32;
                let mask = if limit == 128 {
                    u128::MAX
                } else {
                    (1u128 << limit) - 1
                };
                stack.push(Frame {
                    v,
                    candidates: self.domain[v] & mask,
                    trail_len: self.trail.len(),
                    prev_max: self.max_used,
                });
                stats.max_depth = stats.max_depth.max(stack.len());
            }
            let Some(frame) = stack.last_mut() else {
                return Outcome::NotColorable;
            };
            let (v, candidates) = (frame.v, frame.candidates);
            let snapshot = Frame {
                v,
                candidates,
                trail_len: frame.trail_len,
                prev_max: frame.prev_max,
            };
            self.undo(&snapshot);
            if candidates == 0 {
                stack.pop();
                descend = false;
                continue;
            }
            let c = candidates.trailing_zeros();
            frame.candidates &= candidates - 1;
            stats.nodes += 1;
            if stats.nodes > budget.nodes
                || (stats.nodes.is_multiple_of(4096) && start.elapsed() > budget.time)
            {
                return Outcome::Inconclusive;
            }
            descend = self.assign(classes, v, c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance(n: usize, k: u32, edges: &[(usize, usize)]) -> ColoringInstance {
        ColoringInstance {
            n,
            k,
            edges: edges.to_vec(),
            anchor: vec![],
            equal: vec![],
            distinct: vec![],
        }
    }

    fn verdict(inst: &ColoringInstance) -> Outcome {
        inst.solve(Budget::default()).unwrap().0
    }

    #[test]
    fn odd_cycle_needs_three() {
        let c5 = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)];
        assert_eq!(verdict(&instance(5, 2, &c5)), Outcome::NotColorable);
        assert!(matches!(
            verdict(&instance(5, 3, &c5)),
            Outcome::Colorable(_)
        ));
    }

    #[test]
    fn out_of_range_index() {
        assert!(instance(2, 2, &[(0, 2)]).solve(Budget::default()).is_err());
    }

    #[test]
    fn many_colors_without_search() {
        let inst = instance(3, 500, &[(0, 1), (1, 2), (0, 2)]);
        let Outcome::Colorable(c) = verdict(&inst) else {
            panic!()
        };
        assert_eq!(c, vec![0, 1, 2]);
    }

    #[test]
    fn too_many_colors_for_bitsets() {
        let edges: Vec<_> = (0..200).map(|i| (i, i + 1)).collect();
        let inst = instance(201, 150, &edges);
        assert_eq!(
            inst.solve(Budget::default()),
            Err(SearchError::TooManyColors(150))
        );
    }

    #[test]
    fn anchor_units_can_conflict() {
        let mut inst = instance(3, 3, &[]);
        inst.equal = vec![(0, 1)];
        inst.anchor = vec![0, 1];
        assert_eq!(verdict(&inst), Outcome::NotColorable);
    }

    #[test]
    fn stats_are_reproducible() {
        let edges: Vec<_> = (0..12)
            .flat_map(|i| {
                (i + 1..12)
                    .filter(move |j| (i * 7 + j * 3) % 4 != 0)
                    .map(move |j| (i, j))
            })
            .collect();
        let inst = instance(12, 6, &edges);
        let (a, sa) = inst.solve(Budget::default()).unwrap();
        let (b, sb) = inst.solve(Budget::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!((sa.nodes, sa.max_depth), (sb.nodes, sb.max_depth));
    }
}
