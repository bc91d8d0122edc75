//! Extremal vertex sets: balls around a vertex, shells around the
//! tetrahedron `D0`, their two- and three-layer analogues, and the clique
//! lower bounds they certify for graph powers.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::lattice::{
    ball_region, distance, slab_distances_from, LatticeError, Metric, Provenance, Region, Site,
};

/// The host graph: the full grid or one of the two thin slabs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GraphKind {
    F,
    F01,
    F02,
}

impl GraphKind {
    /// Layer range of the slab, `None` for the full grid.
    pub fn layers(self) -> Option<(i64, i64)> {
        match self {
            GraphKind::F => None,
            GraphKind::F01 => Some((0, 1)),
            GraphKind::F02 => Some((0, 2)),
        }
    }

    /// Graph distance in this host graph.
    pub fn distance(self, u: Site, v: Site) -> Result<u32, LatticeError> {
        match self.layers() {
            None => Ok(distance(u, v)),
            Some((k1, k2)) => crate::lattice::slab_distance(u, v, k1, k2),
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphKind::F => "F",
            GraphKind::F01 => "F01",
            GraphKind::F02 => "F02",
        })
    }
}

impl FromStr for GraphKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "F" | "f" => Ok(GraphKind::F),
            "F01" | "f01" => Ok(GraphKind::F01),
            "F02" | "f02" => Ok(GraphKind::F02),
            other => Err(format!("unknown graph `{other}` (expected F, F01 or F02)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShellKind {
    /// Distance from the origin in the full grid.
    AFull,
    /// Distance from `D0` in the full grid.
    DFull,
    /// Distance from the origin inside layers 0..=1.
    ASlab01,
    /// Distance from `D0` inside layers 0..=1.
    DSlab01,
    /// Distance from the middle-layer vertex `(1, 1, 1)` inside layers 0..=2.
    ASlab02,
    /// Distance from `D0` inside layers 0..=2.
    BSlab02,
}

impl ShellKind {
    pub const ALL: [ShellKind; 6] = [
        ShellKind::AFull,
        ShellKind::DFull,
        ShellKind::ASlab01,
        ShellKind::DSlab01,
        ShellKind::ASlab02,
        ShellKind::BSlab02,
    ];

    fn sources(self) -> Vec<Site> {
        match self {
            ShellKind::AFull | ShellKind::ASlab01 => vec![Site::ORIGIN],
            ShellKind::ASlab02 => vec![site(1, 1, 1)],
            ShellKind::DFull | ShellKind::DSlab01 | ShellKind::BSlab02 => d0_sites().to_vec(),
        }
    }

    pub fn graph(self) -> GraphKind {
        match self {
            ShellKind::AFull | ShellKind::DFull => GraphKind::F,
            ShellKind::ASlab01 | ShellKind::DSlab01 => GraphKind::F01,
            ShellKind::ASlab02 | ShellKind::BSlab02 => GraphKind::F02,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ShellKind::AFull => "a_full",
            ShellKind::DFull => "d_full",
            ShellKind::ASlab01 => "a_slab01",
            ShellKind::DSlab01 => "d_slab01",
            ShellKind::ASlab02 => "a_slab02",
            ShellKind::BSlab02 => "b_slab02",
        }
    }

    /// Closed-form size of the shell at `level`. Checked against
    /// enumeration in tests, never used to build anything.
    pub fn shell_count(self, level: u32) -> u64 {
        let l = level as u64;
        match (self, l) {
            (ShellKind::AFull | ShellKind::ASlab01 | ShellKind::ASlab02, 0) => 1,
            (ShellKind::AFull, _) => 10 * l * l + 2,
            (ShellKind::DFull, _) => 10 * l * l + 10 * l + 4,
            (ShellKind::ASlab01, _) => 8 * l,
            (ShellKind::DSlab01, _) => 8 * l + 4,
            (ShellKind::ASlab02, _) => 12 * l,
            (ShellKind::BSlab02, 0) => 4,
            (ShellKind::BSlab02, _) => 12 * l + 6,
        }
    }

    /// Closed-form size of the union of shells `0..=level`.
    pub fn ball_count(self, level: u32) -> u64 {
        let l = level as u64;
        match self {
            ShellKind::AFull => (2 * l + 1) * (5 * l * l + 5 * l + 3) / 3,
            ShellKind::DFull => (10 * l * l * l + 30 * l * l + 32 * l + 12) / 3,
            ShellKind::ASlab01 => 4 * l * (l + 1) + 1,
            ShellKind::DSlab01 => 4 * (l + 1) * (l + 1),
            ShellKind::ASlab02 => 6 * l * l + 6 * l + 1,
            ShellKind::BSlab02 => 6 * l * l + 12 * l + 4,
        }
    }
}

impl FromStr for ShellKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ShellKind::ALL
            .into_iter()
            .find(|k| k.label() == s || k.label().replace('_', "-") == s)
            .ok_or_else(|| format!("unknown shell family `{s}`"))
    }
}

/// A shell family at a given level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ShellFamily {
    pub kind: ShellKind,
    pub level: u32,
}

fn site(x: i64, y: i64, z: i64) -> Site {
    Site::new(x, y, z).expect("hard-coded site has valid parity")
}

fn d0_sites() -> [Site; 4] {
    [site(0, 0, 0), site(2, 0, 0), site(1, 1, 1), site(1, -1, 1)]
}

/// The tetrahedron `D0`: four mutually adjacent sites.
pub fn tetra_d0() -> Region {
    Region::new(
        d0_sites(),
        Provenance::Shell {
            label: "d_full".into(),
            level: 0,
        },
    )
    .expect("nonempty")
}

/// Distance of every site within `level` of the family's sources, keyed by site.
fn distances_up_to(kind: ShellKind, level: u32) -> HashMap<Site, u32> {
    let sources = kind.sources();
    match kind.graph().layers() {
        None => {
            let h = 2 * level as i64 + 2;
            let v = level as i64 + 1;
            let mut out = HashMap::new();
            for z in -v..=v + 1 {
                for y in -h..=h {
                    for x in -h..=h + 2 {
                        let Ok(s) = Site::new(x, y, z) else { continue };
                        let d = sources.iter().map(|&c| distance(c, s)).min().unwrap_or(0);
                        if d <= level {
                            out.insert(s, d);
                        }
                    }
                }
            }
            out
        }
        Some((k1, k2)) => {
            slab_distances_from(&sources, k1, k2, level).expect("sources lie in their slab")
        }
    }
}

/// Sites at exactly `family.level` from the family's sources.
pub fn shell(family: ShellFamily) -> Region {
    let sites = distances_up_to(family.kind, family.level)
        .into_iter()
        .filter(|&(_, d)| d == family.level)
        .map(|(s, _)| s);
    Region::new(
        sites,
        Provenance::Shell {
            label: family.kind.label().into(),
            level: family.level,
        },
    )
    .expect("shells are never empty")
}

/// Union of the family's shells `0..=level`.
pub fn shell_ball(kind: ShellKind, level: u32) -> Region {
    let sites = distances_up_to(kind, level).into_keys();
    Region::new(
        sites,
        Provenance::Shell {
            label: format!("{}_ball", kind.label()),
            level,
        },
    )
    .expect("balls are never empty")
}

/// `B_level`: every site within `level` of `D0`.
pub fn b_ball(level: u32) -> Region {
    shell_ball(ShellKind::DFull, level)
}

/// The closed neighbourhood union of four sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TetraSet {
    pub region: Region,
    /// False when the four input sites are not pairwise adjacent; the set is
    /// then not a translate of `B_1`.
    pub from_clique: bool,
}

/// Every site adjacent to at least one of the four given sites.
pub fn tetra_neighborhood(u1: Site, u2: Site, u3: Site, u4: Site) -> TetraSet {
    let us = [u1, u2, u3, u4];
    let from_clique = us.iter().enumerate().all(|(i, &a)| {
        us[i + 1..]
            .iter()
            .all(|&b| crate::lattice::is_adjacent(a, b))
    });
    let sites = us.iter().flat_map(|u| u.neighbors());
    TetraSet {
        region: Region::new(sites, Provenance::TetraNeighborhood).expect("nonempty"),
        from_clique,
    }
}

/// Largest pairwise distance under the chosen metric.
pub fn diameter(region: &Region, metric: Metric) -> Result<u32, LatticeError> {
    match metric {
        Metric::Ambient => Ok(region.ambient_diameter()),
        Metric::RegionInternal => {
            let mut best = 0;
            for i in 0..region.len() {
                for (j, d) in region
                    .internal_distances_from(i, u32::MAX)
                    .into_iter()
                    .enumerate()
                {
                    match d {
                        Some(d) => best = best.max(d),
                        None => {
                            return Err(LatticeError::Disconnected {
                                u: region.sites()[i],
                                v: region.sites()[j],
                            })
                        }
                    }
                }
            }
            Ok(best)
        }
    }
}

/// Whether all pairs of `region` are within `d` in the host graph.
pub fn is_clique(region: &Region, d: u32, graph: GraphKind) -> Result<bool, LatticeError> {
    match graph.layers() {
        None => Ok(region.ambient_diameter() <= d),
        Some((k1, k2)) => {
            for s in region.iter() {
                let reach = slab_distances_from(&[s], k1, k2, d)?;
                if !region.iter().all(|t| reach.contains_key(&t)) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// A clique of the `d`-th power, hence a lower bound on its chromatic number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueBound {
    pub d: u32,
    pub graph: GraphKind,
    pub size: usize,
    pub witness: Region,
}

/// The ball (even `d`) or tetrahedral ball (odd `d`) of the host graph,
/// verified to be a clique of its `d`-th power.
pub fn clique_lower_bound(graph: GraphKind, d: u32) -> Result<CliqueBound, LatticeError> {
    assert!(d >= 1, "graph powers start at d = 1");
    let (even_kind, odd_kind) = match graph {
        GraphKind::F => (ShellKind::AFull, ShellKind::DFull),
        GraphKind::F01 => (ShellKind::ASlab01, ShellKind::DSlab01),
        GraphKind::F02 => (ShellKind::ASlab02, ShellKind::BSlab02),
    };
    let witness = if d.is_multiple_of(2) {
        match graph {
            GraphKind::F => ball_region(Site::ORIGIN, d / 2)?,
            _ => shell_ball(even_kind, d / 2),
        }
    } else {
        shell_ball(odd_kind, (d - 1) / 2)
    };
    assert!(
        is_clique(&witness, d, graph)?,
        "witness for {graph} at d = {d} must be a clique"
    );
    Ok(CliqueBound {
        d,
        graph,
        size: witness.len(),
        witness,
    })
}

/// Closed form of the witness size in [`clique_lower_bound`].
pub fn closed_form_lower_bound(graph: GraphKind, d: u32) -> u64 {
    let n = d as u64;
    match (graph, d % 2) {
        (GraphKind::F, 0) => (5 * n * n * n + 15 * n * n + 22 * n + 12) / 12,
        (GraphKind::F, _) => (5 * n * n * n + 15 * n * n + 19 * n + 9) / 12,
        (GraphKind::F01, _) => (n + 1) * (n + 1),
        (GraphKind::F02, 0) => ShellKind::ASlab02.ball_count(d / 2),
        (GraphKind::F02, _) => ShellKind::BSlab02.ball_count((d - 1) / 2),
    }
}
