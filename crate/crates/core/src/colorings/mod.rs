//! Periodic colorings of the grid and of its thin slabs, with verifiers.
//!
//! Built-in constructions:
//!
//! * [`ColoringSpec::Power2Mod13`]: `((x - 2y + 9z) / 2) mod 13`, a 2-distance coloring of the grid.
//! * [`ColoringSpec::Power3Mod30`]: a piecewise mod-30 form, a 3-distance coloring of the grid.
//! * [`ColoringSpec::SlabGeneral`]: `d + 1` palettes of a square-grid coloring, cycled by layer.
//! * [`ColoringSpec::Slab01`] / [`ColoringSpec::Slab02`]: colorings of the two- and three-layer slabs.

mod io;
mod verify;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{IoError, LatticeError, Site};

pub use io::{read_coloring, read_coloring_file, write_coloring, write_coloring_file};
pub(crate) use verify::bounded_bfs;
pub use verify::{
    fundamental_window, verify_displacement, verify_window, window_for, Verdict, Violation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("site {site} lies outside slab layers {k1}..={k2}")]
    OutOfSlab { site: Site, k1: i64, k2: i64 },
    #[error("site {0} has no color in the explicit map")]
    Uncolored(Site),
    #[error("{0} is not a linear form; verify it on a window instead")]
    NotTranslationCovariant(String),
    #[error("explicit colorings have no period")]
    NonPeriodic,
    #[error("no square-grid multiplier exists for d = {0}")]
    NoMultiplier(u32),
    #[error("d must be at least {min}, got {d}")]
    DistanceTooSmall { d: u32, min: u32 },
    #[error("linear form: coefficient sum must be even and modulus positive")]
    InvalidForm,
    #[error("coloring file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl From<std::io::Error> for ColoringError {
    fn from(e: std::io::Error) -> Self {
        ColoringError::Io(e.into())
    }
}

/// The set of sites a coloring is defined on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Full,
    Slab {
        k1: i64,
        k2: i64,
    },
    /// Exactly the keys of an explicit map.
    Listed,
}

impl Domain {
    pub fn layers(self) -> Option<(i64, i64)> {
        match self {
            Domain::Slab { k1, k2 } => Some((k1, k2)),
            _ => None,
        }
    }
}

/// A multiplier `m` such that `(a + m b) mod q` colors the `d`-th power of
/// the square grid with `q = ⌈(d+1)²/2⌉` colors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SquareMultiplier {
    pub d: u32,
    pub q: u32,
    pub m: u32,
}

impl SquareMultiplier {
    /// Checks `(a + m b) mod q != 0` for every `0 < |a| + |b| <= d`.
    pub fn is_valid(&self) -> bool {
        multiplier_works(self.d, self.q, self.m)
    }
}

fn multiplier_works(d: u32, q: u32, m: u32) -> bool {
    let (d, q, m) = (d as i64, q as i64, m as i64);
    (-d..=d).all(|b| {
        let r = d - b.abs();
        (-r..=r).all(|a| (a == 0 && b == 0) || (a + m * b).rem_euclid(q) != 0)
    })
}

/// Smallest valid multiplier for `d`, by exhaustive search.
pub fn square_multiplier(d: u32) -> Result<SquareMultiplier, ColoringError> {
    if d == 0 {
        return Err(ColoringError::DistanceTooSmall { d, min: 1 });
    }
    let q = ((d + 1) * (d + 1)).div_ceil(2);
    (1..q)
        .find(|&m| multiplier_works(d, q, m))
        .map(|m| SquareMultiplier { d, q, m })
        .ok_or(ColoringError::NoMultiplier(d))
}

/// Color `(a x + b y + c z) / 2 mod modulus` in doubled coordinates.
///
/// The coefficient sum must be even, which makes the numerator even on every site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearForm {
    a: i64,
    b: i64,
    c: i64,
    modulus: u32,
}

impl LinearForm {
    pub fn new(a: i64, b: i64, c: i64, modulus: u32) -> Result<Self, ColoringError> {
        if modulus == 0 || (a + b + c).rem_euclid(2) != 0 {
            return Err(ColoringError::InvalidForm);
        }
        Ok(LinearForm { a, b, c, modulus })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// The form's value on a site or a displacement given as a triple.
    pub fn eval(&self, x: i64, y: i64, z: i64) -> u32 {
        let num = self.a * x + self.b * y + self.c * z;
        (num / 2).rem_euclid(self.modulus as i64) as u32
    }
}

/// A coloring of the grid or of a slab.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColoringSpec {
    Power2Mod13,
    Power3Mod30,
    SlabGeneral(SquareMultiplier),
    Slab01(SquareMultiplier),
    Slab02(SquareMultiplier),
    Explicit(BTreeMap<Site, u32>),
}

/// Names accepted by [`ColoringSpec::construction`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    Power2,
    Power3,
    SlabGeneral,
    Slab01,
    Slab02,
}

impl Construction {
    pub fn label(self) -> &'static str {
        match self {
            Construction::Power2 => "power2",
            Construction::Power3 => "power3",
            Construction::SlabGeneral => "slab-general",
            Construction::Slab01 => "slab01",
            Construction::Slab02 => "slab02",
        }
    }
}

impl FromStr for Construction {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Construction::Power2,
            Construction::Power3,
            Construction::SlabGeneral,
            Construction::Slab01,
            Construction::Slab02,
        ]
        .into_iter()
        .find(|c| c.label() == s)
        .ok_or_else(|| format!("unknown construction `{s}`"))
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl ColoringSpec {
    pub fn slab_general(d: u32) -> Result<Self, ColoringError> {
        square_multiplier(d).map(ColoringSpec::SlabGeneral)
    }

    pub fn slab01(d: u32) -> Result<Self, ColoringError> {
        square_multiplier(d).map(ColoringSpec::Slab01)
    }

    pub fn slab02(d: u32) -> Result<Self, ColoringError> {
        square_multiplier(d).map(ColoringSpec::Slab02)
    }

    /// A named construction at distance `d`. The fixed grid colorings
    /// ignore `d`.
    pub fn construction(c: Construction, d: u32) -> Result<Self, ColoringError> {
        match c {
            Construction::Power2 => Ok(ColoringSpec::Power2Mod13),
            Construction::Power3 => Ok(ColoringSpec::Power3Mod30),
            Construction::SlabGeneral => Self::slab_general(d),
            Construction::Slab01 => Self::slab01(d),
            Construction::Slab02 => Self::slab02(d),
        }
    }

    pub fn name(&self) -> String {
        match self {
            ColoringSpec::Power2Mod13 => "power2".into(),
            ColoringSpec::Power3Mod30 => "power3".into(),
            ColoringSpec::SlabGeneral(m) => format!("slab-general(d={})", m.d),
            ColoringSpec::Slab01(m) => format!("slab01(d={})", m.d),
            ColoringSpec::Slab02(m) => format!("slab02(d={})", m.d),
            ColoringSpec::Explicit(map) => format!("explicit({} sites)", map.len()),
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            ColoringSpec::Power2Mod13
            | ColoringSpec::Power3Mod30
            | ColoringSpec::SlabGeneral(_) => Domain::Full,
            ColoringSpec::Slab01(_) => Domain::Slab { k1: 0, k2: 1 },
            ColoringSpec::Slab02(_) => Domain::Slab { k1: 0, k2: 2 },
            ColoringSpec::Explicit(_) => Domain::Listed,
        }
    }

    /// Every color lies in `0..palette_size()`.
    pub fn palette_size(&self) -> u32 {
        match self {
            ColoringSpec::Power2Mod13 => 13,
            ColoringSpec::Power3Mod30 => 30,
            ColoringSpec::SlabGeneral(m) => (m.d + 1) * m.q,
            ColoringSpec::Slab01(m) if m.d % 2 == 0 => (m.d + 1) * (m.d + 1),
            ColoringSpec::Slab01(m) => 2 * m.q,
            ColoringSpec::Slab02(m) => (m.d + 1).min(3) * m.q,
            ColoringSpec::Explicit(map) => map.values().max().map_or(1, |&c| c + 1),
        }
    }

    /// The linear form behind a translation-covariant spec.
    pub fn linear_form(&self) -> Result<LinearForm, ColoringError> {
        match self {
            ColoringSpec::Power2Mod13 => LinearForm::new(1, -2, 9, 13),
            ColoringSpec::Slab01(m) if m.d % 2 == 0 => {
                LinearForm::new(1, 2 * m.d as i64 + 1, 0, (m.d + 1) * (m.d + 1))
            }
            other => Err(ColoringError::NotTranslationCovariant(other.name())),
        }
    }

    /// Translation periods along the three axes in doubled units. The z
    /// period is `None` for slab domains, which are not translated vertically.
    pub fn periods(&self) -> Result<(i64, i64, Option<i64>), ColoringError> {
        let general = |m: &SquareMultiplier| {
            let p = 2 * m.q as i64;
            let d1 = m.d as i64 + 1;
            (p, p, d1 * 2 / gcd(d1, 2))
        };
        match self {
            ColoringSpec::Power2Mod13 => Ok((26, 26, Some(26))),
            ColoringSpec::Power3Mod30 => Ok((10, 12, Some(4))),
            ColoringSpec::SlabGeneral(m) => {
                let (px, py, pz) = general(m);
                Ok((px, py, Some(pz)))
            }
            ColoringSpec::Slab01(m) if m.d % 2 == 0 => {
                let p = 2 * ((m.d + 1) * (m.d + 1)) as i64;
                Ok((p, p, None))
            }
            ColoringSpec::Slab01(m) | ColoringSpec::Slab02(m) => {
                let (px, py, _) = general(m);
                Ok((px, py, None))
            }
            ColoringSpec::Explicit(_) => Err(ColoringError::NonPeriodic),
        }
    }

    /// Color of a site in the spec's domain.
    pub fn color(&self, s: Site) -> Result<u32, ColoringError> {
        if let Some((k1, k2)) = self.domain().layers() {
            if s.z() < k1 || s.z() > k2 {
                return Err(ColoringError::OutOfSlab { site: s, k1, k2 });
            }
        }
        Ok(match self {
            ColoringSpec::Power2Mod13 => color_power2(s),
            ColoringSpec::Power3Mod30 => color_power3(s),
            ColoringSpec::SlabGeneral(m) | ColoringSpec::Slab02(m) => slab_general_color(m, s),
            ColoringSpec::Slab01(m) if m.d % 2 == 0 => {
                let n = 2 * m.d as i64 + 1;
                let modulus = ((m.d + 1) * (m.d + 1)) as i64;
                ((s.x() + n * s.y()) / 2).rem_euclid(modulus) as u32
            }
            ColoringSpec::Slab01(m) => slab_general_color(m, s),
            ColoringSpec::Explicit(map) => *map.get(&s).ok_or(ColoringError::Uncolored(s))?,
        })
    }

    /// Materializes the spec on a set of sites.
    pub fn to_explicit(
        &self,
        sites: impl IntoIterator<Item = Site>,
    ) -> Result<BTreeMap<Site, u32>, ColoringError> {
        sites.into_iter().map(|s| Ok((s, self.color(s)?))).collect()
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// `((x - 2y + 9z) / 2) mod 13`.
pub fn color_power2(s: Site) -> u32 {
    ((s.x() - 2 * s.y() + 9 * s.z()) / 2).rem_euclid(13) as u32
}

/// The mod-30 coloring with period `(10, 12, 4)`.
///
/// Even layers: `(i mod 5) - 5j + 15k/2`. Odd layers shift `i` by `5/2`
/// and `j` by `-1/2` and add 5: `((i + 5/2) mod 5) - 5(j - 1/2) + 5 + 15(k-1)/2`.
pub fn color_power3(s: Site) -> u32 {
    let (x, y, z) = (s.x(), s.y(), s.z());
    let c = if z.rem_euclid(2) == 0 {
        (x / 2).rem_euclid(5) - 5 * (y / 2) + 15 * (z / 2)
    } else {
        ((x + 5) / 2).rem_euclid(5) - 5 * ((y - 1) / 2) + 5 + 15 * ((z - 1) / 2)
    };
    c.rem_euclid(30) as u32
}

fn slab_general_color(m: &SquareMultiplier, s: Site) -> u32 {
    let q = m.q as i64;
    let p = s.z().rem_euclid(m.d as i64 + 1);
    let odd = s.z().rem_euclid(2);
    let a = (s.x() - odd) / 2;
    let b = (s.y() - odd) / 2;
    (p * q + (a + m.m as i64 * b).rem_euclid(q)) as u32
}

/// `palette p = z mod (d+1)`, in-layer pattern `(a + m b) mod q`.
pub fn color_slab_general(d: u32, s: Site) -> Result<u32, ColoringError> {
    ColoringSpec::slab_general(d)?.color(s)
}

pub fn color_slab01(d: u32, s: Site) -> Result<u32, ColoringError> {
    ColoringSpec::slab01(d)?.color(s)
}

pub fn color_slab02(d: u32, s: Site) -> Result<u32, ColoringError> {
    ColoringSpec::slab02(d)?.color(s)
}

/// Distinct colors appearing in a map.
pub fn colors_used<'a>(colors: impl IntoIterator<Item = &'a u32>) -> usize {
    colors.into_iter().collect::<BTreeSet<_>>().len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn site(x: i64, y: i64, z: i64) -> Site {
        Site::new(x, y, z).unwrap()
    }

    #[test]
    fn power2_examples() {
        assert_eq!(color_power2(Site::ORIGIN), 0);
        assert_eq!(color_power2(site(2, 0, 0)), 1);
        assert_eq!(color_power2(site(0, 2, 0)), 11);
    }

    #[test]
    fn power3_layer_labels() {
        assert_eq!(color_power3(Site::ORIGIN), 0);
        assert_eq!(color_power3(site(1, 1, 1)), 8);
        assert_eq!(color_power3(site(0, 0, 2)), 15);
        assert_eq!(color_power3(site(0, 2, 2)), 10);
        assert_eq!(color_power3(site(1, 1, 3)), 23);
        assert_eq!(color_power3(site(5, 1, 1)), 5);
    }

    #[test]
    fn multipliers_for_small_d() {
        let expect = [
            (1, 2, 1),
            (2, 5, 2),
            (3, 8, 3),
            (4, 13, 5),
            (5, 18, 5),
            (6, 25, 7),
        ];
        for (d, q, m) in expect {
            assert_eq!(square_multiplier(d).unwrap(), SquareMultiplier { d, q, m });
        }
        assert!(square_multiplier(0).is_err());
    }

    #[test]
    fn multiplier_rejects_bad_m() {
        assert!(!SquareMultiplier { d: 2, q: 5, m: 1 }.is_valid());
        assert!(SquareMultiplier { d: 2, q: 5, m: 2 }.is_valid());
    }

    #[test]
    fn slab01_examples() {
        assert_eq!(color_slab01(2, Site::ORIGIN), Ok(0));
        assert_eq!(color_slab01(2, site(1, 1, 1)), Ok(3));
        assert!(matches!(
            color_slab01(2, site(0, 0, 2)),
            Err(ColoringError::OutOfSlab { .. })
        ));
    }

    #[test]
    fn slab02_rejects_fourth_layer() {
        assert!(color_slab02(3, site(1, 1, 3)).is_err());
        assert!(color_slab02(3, site(1, 1, -1)).is_err());
        assert_eq!(color_slab02(3, site(0, 0, 2)), Ok(2 * 8));
    }

    #[test]
    fn palette_sizes() {
        let size = |s: Result<ColoringSpec, _>| s.unwrap().palette_size();
        assert_eq!(size(ColoringSpec::slab_general(3)), 32);
        assert_eq!(size(ColoringSpec::slab_general(5)), 108);
        assert_eq!(size(ColoringSpec::slab01(3)), 16);
        assert_eq!(size(ColoringSpec::slab01(4)), 25);
        assert_eq!(size(ColoringSpec::slab02(1)), 4);
        assert_eq!(size(ColoringSpec::slab02(2)), 15);
        assert_eq!(size(ColoringSpec::slab02(5)), 54);
    }

    #[test]
    fn linear_form_rejects_odd_sum() {
        assert_eq!(LinearForm::new(1, 0, 0, 5), Err(ColoringError::InvalidForm));
        assert_eq!(LinearForm::new(1, 1, 0, 0), Err(ColoringError::InvalidForm));
        assert!(ColoringSpec::Power3Mod30.linear_form().is_err());
    }

    #[test]
    fn linear_forms_match_color_functions() {
        let f = ColoringSpec::Power2Mod13.linear_form().unwrap();
        let s4 = ColoringSpec::slab01(4).unwrap();
        let g = s4.linear_form().unwrap();
        for z in 0..=1 {
            for y in -6..=6 {
                for x in -6..=6 {
                    let Ok(s) = Site::new(x, y, z) else { continue };
                    assert_eq!(f.eval(x, y, z), color_power2(s));
                    assert_eq!(g.eval(x, y, z), s4.color(s).unwrap());
                }
            }
        }
    }

    #[test]
    fn construction_names_round_trip() {
        for name in ["power2", "power3", "slab-general", "slab01", "slab02"] {
            assert_eq!(name.parse::<Construction>().unwrap().label(), name);
        }
        assert!("power4".parse::<Construction>().is_err());
    }
}
