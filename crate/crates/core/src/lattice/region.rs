use std::collections::{HashMap, VecDeque};
use std::ops::RangeInclusive;

use super::{distance, LatticeError, Site};

/// Where a region came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Box {
        x: RangeInclusive<i64>,
        y: RangeInclusive<i64>,
        z: RangeInclusive<i64>,
    },
    /// Layers `k1..=k2`, possibly clipped to a finite window in `x`/`y`.
    Slab {
        k1: i64,
        k2: i64,
    },
    Ball {
        center: Site,
        radius: u32,
    },
    Shell {
        label: String,
        level: u32,
    },
    TetraNeighborhood,
    Explicit,
}

/// A finite, duplicate-free set of sites in canonical order.
#[derive(Debug, Clone)]
pub struct Region {
    sites: Vec<Site>,
    index: HashMap<Site, usize>,
    provenance: Provenance,
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        self.sites == other.sites && self.provenance == other.provenance
    }
}

impl Eq for Region {}

impl Region {
    pub fn new(
        sites: impl IntoIterator<Item = Site>,
        provenance: Provenance,
    ) -> Result<Self, LatticeError> {
        let mut sites: Vec<Site> = sites.into_iter().collect();
        sites.sort_unstable();
        sites.dedup();
        if sites.is_empty() {
            return Err(LatticeError::EmptyRegion);
        }
        if let Provenance::Slab { k1, k2 } = provenance {
            if let Some(&bad) = sites.iter().find(|s| s.z() < k1 || s.z() > k2) {
                return Err(LatticeError::OutsideSlab { site: bad, k1, k2 });
            }
        }
        let index = sites.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(Region {
            sites,
            index,
            provenance,
        })
    }

    pub fn explicit(sites: impl IntoIterator<Item = Site>) -> Result<Self, LatticeError> {
        Region::new(sites, Provenance::Explicit)
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, s: Site) -> bool {
        self.index.contains_key(&s)
    }

    /// Position of `s` in canonical order.
    pub fn index_of(&self, s: Site) -> Option<usize> {
        self.index.get(&s).copied()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn iter(&self) -> impl Iterator<Item = Site> + '_ {
        self.sites.iter().copied()
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Result<Self, LatticeError> {
        if let Provenance::Slab { k1, k2 } = provenance {
            if let Some(&bad) = self.sites.iter().find(|s| s.z() < k1 || s.z() > k2) {
                return Err(LatticeError::OutsideSlab { site: bad, k1, k2 });
            }
        }
        self.provenance = provenance;
        Ok(self)
    }

    pub fn is_subset_of(&self, other: &Region) -> bool {
        self.sites.iter().all(|&s| other.contains(s))
    }

    /// Distances inside the induced subgraph from the site at `source`,
    /// truncated at `cap`; unreached entries are `None`.
    pub fn internal_distances_from(&self, source: usize, cap: u32) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.sites.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(i) = queue.pop_front() {
            let di = dist[i].unwrap_or(0);
            if di == cap {
                continue;
            }
            for t in self.sites[i].neighbors() {
                if let Some(j) = self.index_of(t) {
                    if dist[j].is_none() {
                        dist[j] = Some(di + 1);
                        queue.push_back(j);
                    }
                }
            }
        }
        dist
    }

    /// Largest closed-form distance between two members.
    pub fn ambient_diameter(&self) -> u32 {
        let s = &self.sites;
        (0..s.len())
            .flat_map(|i| (i + 1..s.len()).map(move |j| (i, j)))
            .map(|(i, j)| distance(s[i], s[j]))
            .max()
            .unwrap_or(0)
    }
}

fn range_sites(
    x: &RangeInclusive<i64>,
    y: &RangeInclusive<i64>,
    z: &RangeInclusive<i64>,
) -> Vec<Site> {
    let mut out = Vec::new();
    for zz in z.clone() {
        for yy in y.clone() {
            for xx in x.clone() {
                if let Ok(s) = Site::new(xx, yy, zz) {
                    out.push(s);
                }
            }
        }
    }
    out
}

/// All valid sites in an inclusive box of doubled coordinates.
pub fn box_region(
    x: RangeInclusive<i64>,
    y: RangeInclusive<i64>,
    z: RangeInclusive<i64>,
) -> Result<Region, LatticeError> {
    let sites = range_sites(&x, &y, &z);
    Region::new(sites, Provenance::Box { x, y, z })
}

/// Layers `k1..=k2` clipped to `|x|, |y| <= extent` (doubled units).
pub fn slab_region(k1: i64, k2: i64, extent: i64) -> Result<Region, LatticeError> {
    if k1 > k2 || extent < 0 {
        return Err(LatticeError::EmptyRegion);
    }
    let sites = range_sites(&(-extent..=extent), &(-extent..=extent), &(k1..=k2));
    Region::new(sites, Provenance::Slab { k1, k2 })
}

/// Closed ball of radius `r` around `center`, by closed-form distance.
pub fn ball_region(center: Site, r: u32) -> Result<Region, LatticeError> {
    let h = 2 * r as i64;
    let v = r as i64;
    let sites = range_sites(
        &(center.x() - h..=center.x() + h),
        &(center.y() - h..=center.y() + h),
        &(center.z() - v..=center.z() + v),
    )
    .into_iter()
    .filter(|&s| distance(center, s) <= r);
    Region::new(sites, Provenance::Ball { center, radius: r })
}

/// Breadth-first distance within the region's induced subgraph.
pub fn distance_in_region(u: Site, v: Site, region: &Region) -> Result<u32, LatticeError> {
    let iu = region.index_of(u).ok_or(LatticeError::NotInRegion(u))?;
    let iv = region.index_of(v).ok_or(LatticeError::NotInRegion(v))?;
    region.internal_distances_from(iu, u32::MAX)[iv].ok_or(LatticeError::Disconnected { u, v })
}

fn check_in_slab(s: Site, k1: i64, k2: i64) -> Result<(), LatticeError> {
    if s.z() < k1 || s.z() > k2 {
        Err(LatticeError::OutsideSlab { site: s, k1, k2 })
    } else {
        Ok(())
    }
}

/// Exact distance in the infinite slab of layers `k1..=k2`.
///
/// The slab is connected, so the search always terminates.
pub fn slab_distance(u: Site, v: Site, k1: i64, k2: i64) -> Result<u32, LatticeError> {
    check_in_slab(u, k1, k2)?;
    check_in_slab(v, k1, k2)?;
    if u == v {
        return Ok(0);
    }
    let mut dist: HashMap<Site, u32> = HashMap::from([(u, 0)]);
    let mut queue = VecDeque::from([u]);
    while let Some(s) = queue.pop_front() {
        let ds = dist[&s];
        for t in s.neighbors() {
            if t.z() < k1 || t.z() > k2 {
                continue;
            }
            if t == v {
                return Ok(ds + 1);
            }
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(t) {
                e.insert(ds + 1);
                queue.push_back(t);
            }
        }
    }
    unreachable!("slab layers form a connected graph")
}

/// All sites of the infinite slab within `depth` of any of `sources`,
/// with their slab-internal distance to the nearest source.
pub fn slab_distances_from(
    sources: &[Site],
    k1: i64,
    k2: i64,
    depth: u32,
) -> Result<HashMap<Site, u32>, LatticeError> {
    let mut dist = HashMap::new();
    let mut queue = VecDeque::new();
    for &s in sources {
        check_in_slab(s, k1, k2)?;
        if dist.insert(s, 0u32).is_none() {
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        let ds = dist[&s];
        if ds == depth {
            continue;
        }
        for t in s.neighbors() {
            if t.z() < k1 || t.z() > k2 {
                continue;
            }
            dist.entry(t).or_insert_with(|| {
                queue.push_back(t);
                ds + 1
            });
        }
    }
    Ok(dist)
}
