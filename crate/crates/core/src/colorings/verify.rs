use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ColoringError, ColoringSpec, LinearForm};
use crate::lattice::{box_region, Displacement, Metric, Region, Site};

/// Two sites within distance `dist <= d` sharing `color`, with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub u: Site,
    pub v: Site,
    pub color: u32,
    pub dist: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// Violations in canonical `(u, v)` order.
    Invalid(Vec<Violation>),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn violations(&self) -> &[Violation] {
        match self {
            Verdict::Valid => &[],
            Verdict::Invalid(v) => v,
        }
    }

    fn from_list(mut list: Vec<Violation>) -> Self {
        if list.is_empty() {
            Verdict::Valid
        } else {
            list.sort_unstable();
            Verdict::Invalid(list)
        }
    }
}

impl LinearForm {
    /// First forward displacement of length `1..=d` on which the form
    /// vanishes. `dz_span` bounds `|dz|` for forms living on a slab.
    pub fn first_zero(&self, d: u32, dz_span: Option<i64>) -> Option<Displacement> {
        Displacement::forward_within(d)
            .into_iter()
            .filter(|delta| dz_span.is_none_or(|s| delta.dz().abs() <= s))
            .find(|delta| self.eval(delta.dx(), delta.dy(), delta.dz()) == 0)
    }
}

/// Validity of a linear spec from displacements alone: two sites clash
/// exactly when the form vanishes on their difference.
pub fn verify_displacement(spec: &ColoringSpec, d: u32) -> Result<Verdict, ColoringError> {
    let form = spec.linear_form()?;
    let span = spec.domain().layers().map(|(k1, k2)| k2 - k1);
    Ok(match form.first_zero(d, span) {
        None => Verdict::Valid,
        Some(delta) => Verdict::Invalid(vec![Violation {
            u: Site::ORIGIN,
            v: Site::ORIGIN + delta,
            color: form.eval(0, 0, 0),
            dist: delta.norm(),
        }]),
    })
}

/// Checks every pair of `region` within distance `d` under `metric`.
pub fn verify_window(
    spec: &ColoringSpec,
    region: &Region,
    d: u32,
    metric: Metric,
) -> Result<Verdict, ColoringError> {
    let colors: Vec<u32> = region
        .iter()
        .map(|s| spec.color(s))
        .collect::<Result<_, _>>()?;
    let sites = region.sites();
    let list: Vec<Violation> = match metric {
        Metric::Ambient => {
            let forward = Displacement::forward_within(d);
            (0..sites.len())
                .into_par_iter()
                .flat_map_iter(|i| {
                    let u = sites[i];
                    let colors = &colors;
                    forward.iter().filter_map(move |&delta| {
                        let v = u + delta;
                        let j = region.index_of(v)?;
                        (colors[i] == colors[j]).then(|| Violation {
                            u,
                            v,
                            color: colors[i],
                            dist: delta.norm(),
                        })
                    })
                })
                .collect()
        }
        Metric::RegionInternal => (0..sites.len())
            .into_par_iter()
            .flat_map_iter(|i| {
                bounded_bfs(region, i, d)
                    .into_iter()
                    .filter(|&(j, _)| j > i && colors[i] == colors[j])
                    .map(|(j, dist)| Violation {
                        u: sites[i],
                        v: sites[j],
                        color: colors[i],
                        dist,
                    })
                    .collect::<Vec<_>>()
            })
            .collect(),
    };
    Ok(Verdict::from_list(list))
}

/// Indices reached from `source` inside the region within `depth` steps.
pub(crate) fn bounded_bfs(region: &Region, source: usize, depth: u32) -> Vec<(usize, u32)> {
    let sites = region.sites();
    let mut seen = HashMap::from([(source, 0u32)]);
    let mut queue = VecDeque::from([source]);
    while let Some(i) = queue.pop_front() {
        let di = seen[&i];
        if di == depth {
            continue;
        }
        for t in sites[i].neighbors() {
            if let Some(j) = region.index_of(t) {
                seen.entry(j).or_insert_with(|| {
                    queue.push_back(j);
                    di + 1
                });
            }
        }
    }
    seen.into_iter().filter(|&(j, _)| j != source).collect()
}

/// One period box of the spec, dilated by the reach of distance `d`
/// (`2d` in x and y, `d` in z). Restricted to `layers` when given, and to
/// the spec's own slab otherwise.
pub fn window_for(
    spec: &ColoringSpec,
    d: u32,
    layers: Option<(i64, i64)>,
) -> Result<Region, ColoringError> {
    let (px, py, pz) = spec.periods()?;
    let h = 2 * d as i64;
    let v = d as i64;
    let z = match (layers.or(spec.domain().layers()), pz) {
        (Some((k1, k2)), _) => k1..=k2,
        (None, Some(pz)) => -v..=pz - 1 + v,
        (None, None) => unreachable!("a spec without a z period lives on a slab"),
    };
    Ok(box_region(-h..=px - 1 + h, -h..=py - 1 + h, z)?)
}

/// A window on which ambient validity implies validity on the whole domain:
/// every pair within distance `d` translates by periods to a pair with its
/// smaller site in the base box, and the dilation contains its partner.
pub fn fundamental_window(spec: &ColoringSpec, d: u32) -> Result<Region, ColoringError> {
    window_for(spec, d, None)
}
