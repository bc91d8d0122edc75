//! The face-centered cubic grid in doubled coordinates.
//!
//! A vertex `(i, j, k)` of the grid is stored as the integer triple
//! `(x, y, z) = (2i, 2j, k)`. Even layers hold integer `(i, j)`, odd layers
//! hold half-integer `(i, j)`, so a triple is a vertex exactly when
//! `x ≡ z` and `y ≡ z` modulo 2.
//!
//! Every vertex has twelve neighbours: four in its own layer at
//! `(±2, 0, 0)` / `(0, ±2, 0)` and four in each adjacent layer at
//! `(±1, ±1, ±1)`.

mod io;
mod region;

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{read_region, read_region_file, write_region, write_region_file};
pub use region::{
    ball_region, box_region, distance_in_region, slab_distance, slab_distances_from, slab_region,
    Provenance, Region,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("({x}, {y}, {z}) is not a grid vertex: x and y must have the parity of z")]
    Parity { x: i64, y: i64, z: i64 },
    #[error("distance exceeds the search cap of {0}")]
    Unreachable(u32),
    #[error("site {0} is not in the region")]
    NotInRegion(Site),
    #[error("{u} and {v} are not connected inside the region")]
    Disconnected { u: Site, v: Site },
    #[error("the requested region contains no sites")]
    EmptyRegion,
    #[error("site {site} lies outside slab layers {k1}..={k2}")]
    OutsideSlab { site: Site, k1: i64, k2: i64 },
    #[error("region file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] IoError),
}

/// `std::io::Error` is not `Clone`/`PartialEq`; keep its kind and message.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind:?}: {message}")]
pub struct IoError {
    pub kind: std::io::ErrorKind,
    pub message: String,
}

impl From<std::io::Error> for IoError {
    fn from(e: std::io::Error) -> Self {
        IoError {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for LatticeError {
    fn from(e: std::io::Error) -> Self {
        LatticeError::Io(e.into())
    }
}

/// A grid vertex in doubled coordinates.
///
/// Ordering is canonical: by layer `z`, then `y`, then `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSite", into = "RawSite")]
pub struct Site {
    x: i64,
    y: i64,
    z: i64,
}

#[derive(Serialize, Deserialize)]
struct RawSite {
    x: i64,
    y: i64,
    z: i64,
}

impl TryFrom<RawSite> for Site {
    type Error = LatticeError;
    fn try_from(r: RawSite) -> Result<Self, Self::Error> {
        Site::new(r.x, r.y, r.z)
    }
}

impl From<Site> for RawSite {
    fn from(s: Site) -> Self {
        RawSite {
            x: s.x,
            y: s.y,
            z: s.z,
        }
    }
}

impl Site {
    pub const ORIGIN: Site = Site { x: 0, y: 0, z: 0 };

    /// Validates the parity invariant.
    pub fn new(x: i64, y: i64, z: i64) -> Result<Self, LatticeError> {
        if (x - z).rem_euclid(2) != 0 || (y - z).rem_euclid(2) != 0 {
            return Err(LatticeError::Parity { x, y, z });
        }
        Ok(Site { x, y, z })
    }

    /// Builds a site from half-integer lattice coordinates `(i, j, k)`.
    ///
    /// `i` and `j` must be multiples of one half.
    pub fn from_lattice(i: f64, j: f64, k: i64) -> Result<Self, LatticeError> {
        let x2 = 2.0 * i;
        let y2 = 2.0 * j;
        if x2.fract() != 0.0 || y2.fract() != 0.0 || !x2.is_finite() || !y2.is_finite() {
            return Err(LatticeError::Format {
                line: 0,
                message: format!("({i}, {j}, {k}) is not on the half-integer lattice"),
            });
        }
        Site::new(x2 as i64, y2 as i64, k)
    }

    pub fn x(self) -> i64 {
        self.x
    }
    pub fn y(self) -> i64 {
        self.y
    }
    pub fn z(self) -> i64 {
        self.z
    }

    /// The lattice coordinates `(i, j, k)`.
    pub fn lattice(self) -> (f64, f64, i64) {
        (self.x as f64 / 2.0, self.y as f64 / 2.0, self.z)
    }

    /// The twelve neighbours, in canonical order.
    pub fn neighbors(self) -> [Site; 12] {
        NEIGHBOR_OFFSETS.map(|d| self + d)
    }

    pub fn displacement_to(self, other: Site) -> Displacement {
        other - self
    }
}

impl Ord for Site {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.z, self.y, self.x).cmp(&(other.z, other.y, other.x))
    }
}

impl PartialOrd for Site {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Difference of two sites; carries the same parity invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Displacement {
    dx: i64,
    dy: i64,
    dz: i64,
}

impl Displacement {
    pub const ZERO: Displacement = Displacement {
        dx: 0,
        dy: 0,
        dz: 0,
    };

    pub fn new(dx: i64, dy: i64, dz: i64) -> Result<Self, LatticeError> {
        Site::new(dx, dy, dz).map(|s| Displacement {
            dx: s.x,
            dy: s.y,
            dz: s.z,
        })
    }

    pub fn dx(self) -> i64 {
        self.dx
    }
    pub fn dy(self) -> i64 {
        self.dy
    }
    pub fn dz(self) -> i64 {
        self.dz
    }

    /// Graph length of the displacement (the closed-form distance).
    pub fn norm(self) -> u32 {
        let (ax, ay, az) = (self.dx.abs(), self.dy.abs(), self.dz.abs());
        // ax - az and ay - az are even by parity
        (p_plus((ax - az) / 2) + p_plus((ay - az) / 2) + az) as u32
    }

    /// True when the displacement is strictly positive in canonical order,
    /// i.e. exactly one of `δ` and `-δ` is chosen for every nonzero `δ`.
    pub fn is_forward(self) -> bool {
        (self.dz, self.dy, self.dx) > (0, 0, 0)
    }

    /// All nonzero displacements of length at most `d`, canonical order.
    pub fn within(d: u32) -> Vec<Displacement> {
        let r = d as i64;
        let mut out = Vec::new();
        for dz in -r..=r {
            for dy in -2 * r..=2 * r {
                for dx in -2 * r..=2 * r {
                    if let Ok(delta) = Displacement::new(dx, dy, dz) {
                        let n = delta.norm();
                        if n >= 1 && n <= d {
                            out.push(delta);
                        }
                    }
                }
            }
        }
        out
    }

    /// The forward half of [`Displacement::within`].
    pub fn forward_within(d: u32) -> Vec<Displacement> {
        Displacement::within(d)
            .into_iter()
            .filter(|delta| delta.is_forward())
            .collect()
    }
}

impl fmt::Display for Displacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}, {}>", self.dx, self.dy, self.dz)
    }
}

impl Sub for Site {
    type Output = Displacement;
    fn sub(self, rhs: Site) -> Displacement {
        Displacement {
            dx: self.x - rhs.x,
            dy: self.y - rhs.y,
            dz: self.z - rhs.z,
        }
    }
}

impl Add<Displacement> for Site {
    type Output = Site;
    fn add(self, d: Displacement) -> Site {
        Site {
            x: self.x + d.dx,
            y: self.y + d.dy,
            z: self.z + d.dz,
        }
    }
}

impl Add for Displacement {
    type Output = Displacement;
    fn add(self, o: Displacement) -> Displacement {
        Displacement {
            dx: self.dx + o.dx,
            dy: self.dy + o.dy,
            dz: self.dz + o.dz,
        }
    }
}

impl Neg for Displacement {
    type Output = Displacement;
    fn neg(self) -> Displacement {
        Displacement {
            dx: -self.dx,
            dy: -self.dy,
            dz: -self.dz,
        }
    }
}

const fn offset(dx: i64, dy: i64, dz: i64) -> Displacement {
    Displacement { dx, dy, dz }
}

/// Neighbour offsets in canonical order.
pub const NEIGHBOR_OFFSETS: [Displacement; 12] = [
    offset(-1, -1, -1),
    offset(1, -1, -1),
    offset(-1, 1, -1),
    offset(1, 1, -1),
    offset(0, -2, 0),
    offset(-2, 0, 0),
    offset(2, 0, 0),
    offset(0, 2, 0),
    offset(-1, -1, 1),
    offset(1, -1, 1),
    offset(-1, 1, 1),
    offset(1, 1, 1),
];

/// Positive part: `t` if `t >= 0`, else 0.
pub fn p_plus(t: i64) -> i64 {
    t.max(0)
}

pub fn make_site(x: i64, y: i64, z: i64) -> Result<Site, LatticeError> {
    Site::new(x, y, z)
}

pub fn is_adjacent(u: Site, v: Site) -> bool {
    let (ax, ay, az) = ((u.x - v.x).abs(), (u.y - v.y).abs(), (u.z - v.z).abs());
    match az {
        0 => (ax, ay) == (2, 0) || (ax, ay) == (0, 2),
        1 => ax == 1 && ay == 1,
        _ => false,
    }
}

/// Closed-form graph distance.
pub fn distance(u: Site, v: Site) -> u32 {
    (v - u).norm()
}

/// Breadth-first distances from `source` over the infinite grid, up to
/// depth `cap`. Every site within `cap` of `source` is a key.
pub fn bfs_distances_from(source: Site, cap: u32) -> HashMap<Site, u32> {
    let mut dist = HashMap::new();
    dist.insert(source, 0u32);
    let mut queue = VecDeque::from([source]);
    while let Some(s) = queue.pop_front() {
        let ds = dist[&s];
        if ds == cap {
            continue;
        }
        for t in s.neighbors() {
            dist.entry(t).or_insert_with(|| {
                queue.push_back(t);
                ds + 1
            });
        }
    }
    dist
}

/// Breadth-first distance over the infinite grid, truncated at `cap`.
///
/// This never consults [`distance`]; it serves as the oracle for it.
pub fn distance_bfs(u: Site, v: Site, cap: u32) -> Result<u32, LatticeError> {
    if u == v {
        return Ok(0);
    }
    let mut dist: HashMap<Site, u32> = HashMap::from([(u, 0)]);
    let mut queue = VecDeque::from([u]);
    while let Some(s) = queue.pop_front() {
        let ds = dist[&s];
        if ds == cap {
            break;
        }
        for t in s.neighbors() {
            if t == v {
                return Ok(ds + 1);
            }
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(t) {
                e.insert(ds + 1);
                queue.push_back(t);
            }
        }
    }
    Err(LatticeError::Unreachable(cap))
}

/// How distances are measured when a finite vertex set is involved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Distance in the whole grid.
    Ambient,
    /// Distance in the subgraph induced by the region.
    RegionInternal,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: i64, y: i64, z: i64) -> Site {
        Site::new(x, y, z).unwrap()
    }

    #[test]
    fn make_site_examples() {
        assert_eq!(make_site(0, 0, 0).unwrap(), Site::ORIGIN);
        let odd = make_site(1, 1, 1).unwrap();
        assert_eq!(odd.lattice(), (0.5, 0.5, 1));
        assert_eq!(
            make_site(1, 0, 0),
            Err(LatticeError::Parity { x: 1, y: 0, z: 0 })
        );
        assert!(make_site(0, 1, 1).is_err());
        assert!(make_site(-3, 5, -1).is_ok());
    }

    #[test]
    fn lattice_coordinates_round_trip() {
        let v = Site::from_lattice(-0.5, 1.5, 1).unwrap();
        assert_eq!(v, s(-1, 3, 1));
        assert!(Site::from_lattice(0.25, 0.0, 0).is_err());
        assert!(Site::from_lattice(0.5, 0.5, 0).is_err());
    }

    #[test]
    fn adjacency_examples() {
        assert!(is_adjacent(Site::ORIGIN, s(2, 0, 0)));
        assert!(is_adjacent(Site::ORIGIN, s(1, 1, 1)));
        assert!(!is_adjacent(Site::ORIGIN, s(2, 2, 0)));
        assert!(!is_adjacent(Site::ORIGIN, Site::ORIGIN));
        assert!(!is_adjacent(Site::ORIGIN, s(0, 0, 2)));
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(Site::ORIGIN, s(4, 2, 0)), 3);
        assert_eq!(distance(Site::ORIGIN, s(1, 1, 3)), 3);
        assert_eq!(distance(Site::ORIGIN, s(5, 1, 1)), 3);
        assert_eq!(distance_bfs(Site::ORIGIN, s(5, 1, 1), 6), Ok(3));
    }

    #[test]
    fn bfs_examples() {
        assert_eq!(distance_bfs(Site::ORIGIN, s(1, 1, 1), 5), Ok(1));
        assert_eq!(distance_bfs(Site::ORIGIN, s(4, 2, 0), 5), Ok(3));
        assert_eq!(
            distance_bfs(Site::ORIGIN, s(0, 0, 8), 3),
            Err(LatticeError::Unreachable(3))
        );
        assert_eq!(distance_bfs(s(3, 1, 1), s(3, 1, 1), 1), Ok(0));
    }

    #[test]
    fn twelve_distinct_neighbors() {
        for base in [Site::ORIGIN, s(1, -1, 1), s(-4, 6, -2)] {
            let nb = base.neighbors();
            let mut sorted = nb.to_vec();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), 12);
            assert_eq!(
                sorted,
                nb.to_vec(),
                "neighbors are emitted in canonical order"
            );
            assert!(nb
                .iter()
                .all(|&t| is_adjacent(base, t) && distance(base, t) == 1));
        }
    }

    #[test]
    fn displacement_enumeration_counts() {
        // closed-ball sizes minus the centre
        assert_eq!(Displacement::within(1).len(), 12);
        assert_eq!(Displacement::within(2).len(), 54);
        assert_eq!(Displacement::forward_within(2).len(), 27);
        let fw = Displacement::forward_within(3);
        assert!(fw.iter().all(|d| !fw.contains(&-*d)));
    }

    #[test]
    fn bfs_ball_sizes() {
        let sizes: Vec<usize> = (0..4)
            .map(|r| bfs_distances_from(Site::ORIGIN, r).len())
            .collect();
        assert_eq!(sizes, vec![1, 13, 55, 147]);
    }

    #[test]
    fn canonical_order_is_z_then_y_then_x() {
        let mut v = vec![
            s(2, 0, 0),
            s(1, 1, 1),
            s(0, 2, 0),
            s(-1, -1, -1),
            s(-2, 0, 0),
        ];
        v.sort();
        assert_eq!(
            v,
            vec![
                s(-1, -1, -1),
                s(-2, 0, 0),
                s(2, 0, 0),
                s(0, 2, 0),
                s(1, 1, 1)
            ]
        );
    }
}
