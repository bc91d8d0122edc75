//! Exact `k`-colorability of finite windows of a graph power, forced color
//! equalities, fact scripts and CNF export.

mod dimacs;
mod engine;
pub mod facts;

use std::collections::BTreeMap;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colorings::{bounded_bfs, ColoringError};
use crate::lattice::{Displacement, IoError, LatticeError, Metric, Region, Site};

pub use dimacs::{export_dimacs, export_dimacs_file, parse_dimacs, replay_dimacs, Cnf, Replay};
pub use engine::ColoringInstance;
pub use facts::{run_fact_script, FactReport, FactScript};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("site {0} is not in the search region")]
    NotInRegion(Site),
    #[error("anchor is not a clique: {u} and {v} are farther apart than d")]
    AnchorNotClique { u: Site, v: Site },
    #[error("at most 128 colors are supported when the region needs more than {0}")]
    TooManyColors(u32),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("malformed fact script: {0}")]
    MalformedScript(String),
    #[error("CNF line {line}: {message}")]
    Dimacs { line: usize, message: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Io(#[from] IoError),
}

impl From<std::io::Error> for SearchError {
    fn from(e: std::io::Error) -> Self {
        SearchError::Io(e.into())
    }
}

/// Adjacency of the `d`-th power restricted to a region.
#[derive(Debug, Clone)]
pub struct PowerGraph {
    region: Region,
    d: u32,
    metric: Metric,
    adj: Vec<Vec<usize>>,
}

impl PowerGraph {
    pub fn build(region: &Region, d: u32, metric: Metric) -> Self {
        let sites = region.sites();
        let adj = match metric {
            Metric::Ambient => {
                let deltas = Displacement::within(d);
                (0..sites.len())
                    .into_par_iter()
                    .map(|i| {
                        let mut out: Vec<usize> = deltas
                            .iter()
                            .filter_map(|&delta| region.index_of(sites[i] + delta))
                            .collect();
                        out.sort_unstable();
                        out
                    })
                    .collect()
            }
            Metric::RegionInternal => (0..sites.len())
                .into_par_iter()
                .map(|i| {
                    let mut out: Vec<usize> = bounded_bfs(region, i, d)
                        .into_iter()
                        .map(|(j, _)| j)
                        .collect();
                    out.sort_unstable();
                    out
                })
                .collect(),
        };
        PowerGraph {
            region: region.clone(),
            d,
            metric,
            adj,
        }
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    /// Edges `(i, j)` with `i < j`, in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, ns)| ns.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Maximal clique grown from `seed`, adding its neighbours in canonical order.
    fn clique_from(&self, seed: usize) -> Vec<usize> {
        let mut clique = vec![seed];
        for &j in &self.adj[seed] {
            if clique.iter().all(|&c| self.is_adjacent(c, j)) {
                clique.push(j);
            }
        }
        clique.sort_unstable();
        clique
    }

    /// Largest of the greedy cliques over all seeds; the first seed wins ties.
    pub fn best_greedy_clique(&self) -> Vec<usize> {
        (0..self.len())
            .into_par_iter()
            .map(|i| self.clique_from(i))
            .reduce_with(|a, b| if b.len() > a.len() { b } else { a })
            .unwrap_or_default()
    }
}

/// Maximal clique of the `d`-th power, grown greedily in canonical order
/// from the first site.
pub fn greedy_clique(region: &Region, d: u32, metric: Metric) -> Region {
    let g = PowerGraph::build(region, d, metric);
    let sites = region.sites();
    let mut clique: Vec<usize> = Vec::new();
    for i in 0..sites.len() {
        if clique.iter().all(|&c| g.is_adjacent(c, i)) {
            clique.push(i);
        }
    }
    Region::explicit(clique.into_iter().map(|i| sites[i])).expect("regions are nonempty")
}

/// Extra pairwise constraints on top of the graph power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    Equal(Site, Site),
    Distinct(Site, Site),
}

/// The clique pre-colored `0..|Q|` before search.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Anchor {
    None,
    /// The best greedy clique over all seeds.
    #[default]
    Auto,
    Sites(Vec<Site>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub nodes: u64,
    pub time: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            nodes: 100_000_000,
            time: Duration::from_secs(600),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchProblem {
    pub region: Region,
    pub d: u32,
    pub k: u32,
    pub metric: Metric,
    pub anchor: Anchor,
    pub constraints: Vec<Constraint>,
    pub budget: Budget,
}

impl SearchProblem {
    pub fn new(region: Region, d: u32, k: u32) -> Self {
        SearchProblem {
            region,
            d,
            k,
            metric: Metric::Ambient,
            anchor: Anchor::Auto,
            constraints: Vec::new(),
            budget: Budget::default(),
        }
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    pub fn with_anchor(mut self, anchor: Anchor) -> Self {
        self.anchor = anchor;
        self
    }

    pub fn with_constraints(mut self, constraints: Vec<Constraint>) -> Self {
        self.constraints = constraints;
        self
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    /// The graph, resolved anchor and constraint indices, validated.
    pub fn instance(&self) -> Result<ColoringInstance, SearchError> {
        if self.d == 0 || self.k == 0 {
            return Err(SearchError::InvalidProblem(
                "d and k must be positive".into(),
            ));
        }
        let graph = PowerGraph::build(&self.region, self.d, self.metric);
        let index = |s: Site| self.region.index_of(s).ok_or(SearchError::NotInRegion(s));
        let anchor = match &self.anchor {
            Anchor::None => Vec::new(),
            Anchor::Auto => graph.best_greedy_clique(),
            Anchor::Sites(sites) => {
                let mut idx = sites
                    .iter()
                    .map(|&s| index(s))
                    .collect::<Result<Vec<_>, _>>()?;
                idx.sort_unstable();
                idx.dedup();
                for (a, &i) in idx.iter().enumerate() {
                    if let Some(&j) = idx[a + 1..].iter().find(|&&j| !graph.is_adjacent(i, j)) {
                        let s = self.region.sites();
                        return Err(SearchError::AnchorNotClique { u: s[i], v: s[j] });
                    }
                }
                idx
            }
        };
        let mut equal = Vec::new();
        let mut distinct = Vec::new();
        for c in &self.constraints {
            match *c {
                Constraint::Equal(u, v) => equal.push((index(u)?, index(v)?)),
                Constraint::Distinct(u, v) => distinct.push((index(u)?, index(v)?)),
            }
        }
        Ok(ColoringInstance {
            n: graph.len(),
            k: self.k,
            edges: graph.edges().collect(),
            anchor,
            equal,
            distinct,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SearchStats {
    /// Color assignments tried, sequential count.
    pub nodes: u64,
    pub max_depth: usize,
    pub anchor_size: usize,
    #[serde(serialize_with = "secs")]
    pub elapsed: Duration,
}

fn secs<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchVerdict {
    Colorable(BTreeMap<Site, u32>),
    NotColorable,
    Inconclusive,
}

impl SearchVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            SearchVerdict::Colorable(_) => "colorable",
            SearchVerdict::NotColorable => "not-colorable",
            SearchVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub verdict: SearchVerdict,
    pub stats: SearchStats,
}

/// Complete backtracking search for a proper `k`-coloring.
pub fn k_colorable(problem: &SearchProblem) -> Result<Certificate, SearchError> {
    let inst = problem.instance()?;
    let (colors, stats) = inst.solve(problem.budget)?;
    let verdict = match colors {
        engine::Outcome::Colorable(c) => {
            SearchVerdict::Colorable(problem.region.iter().zip(c).collect())
        }
        engine::Outcome::NotColorable => SearchVerdict::NotColorable,
        engine::Outcome::Inconclusive => SearchVerdict::Inconclusive,
    };
    Ok(Certificate { verdict, stats })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Forced {
    /// Every proper coloring gives `u` the color of some candidate.
    Holds(SearchStats),
    /// A proper coloring in which `u` differs from all candidates.
    Counterexample(BTreeMap<Site, u32>),
    Inconclusive(SearchStats),
}

/// Whether every proper `k`-coloring of the region's `d`-th power gives `u`
/// the color of one of `candidates`.
pub fn forced_equalities(
    region: &Region,
    d: u32,
    k: u32,
    u: Site,
    candidates: &[Site],
    metric: Metric,
    budget: Budget,
) -> Result<Forced, SearchError> {
    let problem = SearchProblem::new(region.clone(), d, k)
        .with_metric(metric)
        .with_budget(budget)
        .with_constraints(
            candidates
                .iter()
                .map(|&c| Constraint::Distinct(u, c))
                .collect(),
        );
    let cert = k_colorable(&problem)?;
    Ok(match cert.verdict {
        SearchVerdict::NotColorable => Forced::Holds(cert.stats),
        SearchVerdict::Colorable(w) => Forced::Counterexample(w),
        SearchVerdict::Inconclusive => Forced::Inconclusive(cert.stats),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balls::{b_ball, tetra_d0, tetra_neighborhood};
    use crate::colorings::{verify_window, ColoringSpec};
    use crate::lattice::ball_region;

    fn site(x: i64, y: i64, z: i64) -> Site {
        Site::new(x, y, z).unwrap()
    }

    #[test]
    fn greedy_clique_examples() {
        assert_eq!(greedy_clique(&b_ball(1), 3, Metric::Ambient).len(), 28);
        assert_eq!(
            greedy_clique(&ball_region(Site::ORIGIN, 1).unwrap(), 2, Metric::Ambient).len(),
            13
        );
        let one = Region::explicit([site(3, 1, 1)]).unwrap();
        assert_eq!(greedy_clique(&one, 4, Metric::Ambient), one);
    }

    #[test]
    fn k4_needs_four_colors() {
        let p3 = SearchProblem::new(tetra_d0(), 1, 3);
        assert_eq!(
            k_colorable(&p3).unwrap().verdict,
            SearchVerdict::NotColorable
        );
        let p4 = SearchProblem::new(tetra_d0(), 1, 4).with_anchor(Anchor::None);
        let cert = k_colorable(&p4).unwrap();
        let SearchVerdict::Colorable(w) = cert.verdict else {
            panic!("expected colorable")
        };
        let spec = ColoringSpec::Explicit(w);
        assert!(verify_window(&spec, &tetra_d0(), 1, Metric::Ambient)
            .unwrap()
            .is_valid());
    }

    #[test]
    fn oversized_anchor_short_circuits() {
        let cert = k_colorable(&SearchProblem::new(b_ball(1), 3, 27)).unwrap();
        assert_eq!(cert.verdict, SearchVerdict::NotColorable);
        assert_eq!(cert.stats.nodes, 0);
        assert_eq!(cert.stats.anchor_size, 28);
    }

    #[test]
    fn anchor_must_be_clique() {
        let p = SearchProblem::new(ball_region(Site::ORIGIN, 1).unwrap(), 1, 5)
            .with_anchor(Anchor::Sites(vec![site(2, 0, 0), site(-2, 0, 0)]));
        assert!(matches!(
            k_colorable(&p),
            Err(SearchError::AnchorNotClique { .. })
        ));
        let p =
            SearchProblem::new(tetra_d0(), 1, 5).with_anchor(Anchor::Sites(vec![site(8, 0, 0)]));
        assert!(matches!(k_colorable(&p), Err(SearchError::NotInRegion(_))));
    }

    #[test]
    fn constraints_are_respected() {
        let region = Region::explicit([site(0, 0, 0), site(4, 0, 0), site(8, 0, 0)]).unwrap();
        let eq = Constraint::Equal(site(0, 0, 0), site(8, 0, 0));
        let ne = Constraint::Distinct(site(0, 0, 0), site(4, 0, 0));
        let p = SearchProblem::new(region.clone(), 1, 1).with_constraints(vec![ne]);
        assert_eq!(
            k_colorable(&p).unwrap().verdict,
            SearchVerdict::NotColorable
        );
        let p = SearchProblem::new(region, 1, 2).with_constraints(vec![eq, ne]);
        let SearchVerdict::Colorable(w) = k_colorable(&p).unwrap().verdict else {
            panic!()
        };
        assert_eq!(w[&site(0, 0, 0)], w[&site(8, 0, 0)]);
        assert_ne!(w[&site(0, 0, 0)], w[&site(4, 0, 0)]);
    }

    #[test]
    fn equal_adjacent_sites_cannot_be_colored() {
        let p = SearchProblem::new(tetra_d0(), 1, 10)
            .with_constraints(vec![Constraint::Equal(site(0, 0, 0), site(2, 0, 0))]);
        assert_eq!(
            k_colorable(&p).unwrap().verdict,
            SearchVerdict::NotColorable
        );
    }

    #[test]
    fn budget_exhaustion_is_inconclusive() {
        // a ring of ten sites in one layer is bipartite
        let ring = [
            (0, 0),
            (2, 0),
            (4, 0),
            (6, 0),
            (6, 2),
            (6, 4),
            (4, 4),
            (2, 4),
            (0, 4),
            (0, 2),
        ];
        let region = Region::explicit(ring.iter().map(|&(x, y)| site(x, y, 0))).unwrap();
        let p = SearchProblem::new(region.clone(), 1, 2).with_anchor(Anchor::None);
        assert!(matches!(
            k_colorable(&p).unwrap().verdict,
            SearchVerdict::Colorable(_)
        ));
        let big = ball_region(Site::ORIGIN, 2).unwrap();
        let p = SearchProblem::new(big, 1, 12)
            .with_anchor(Anchor::None)
            .with_budget(Budget {
                nodes: 5,
                time: Duration::from_secs(10),
            });
        assert_eq!(
            k_colorable(&p).unwrap().verdict,
            SearchVerdict::Inconclusive
        );
    }

    #[test]
    fn forced_equality_in_tetra_set() {
        let t = |i: f64, j: f64, k: i64| Site::from_lattice(i, j, k).unwrap();
        let set = tetra_neighborhood(
            t(1.5, -0.5, 1),
            t(1.5, 0.5, 1),
            t(1.0, 0.0, 2),
            t(2.0, 0.0, 2),
        );
        let u = Site::ORIGIN;
        let region = Region::explicit(set.region.iter().chain([u])).unwrap();
        let far = [t(3.0, 0.0, 2), t(2.5, -0.5, 3), t(2.5, 0.5, 3)];
        let holds = forced_equalities(&region, 3, 28, u, &far, Metric::Ambient, Budget::default());
        assert!(matches!(holds.unwrap(), Forced::Holds(_)));
        let loose = forced_equalities(&region, 3, 29, u, &far, Metric::Ambient, Budget::default());
        assert!(matches!(loose.unwrap(), Forced::Counterexample(_)));
    }
}
