//! Fact scripts: JSON lists of distance, size, diameter and covering claims
//! about named points and sets, checked one by one.
//!
//! ```json
//! {
//!   "name": "example",
//!   "coords": "half",
//!   "metric": "ambient",
//!   "points": { "u": [0, 0, 0] },
//!   "sets": { "B": { "tetra_d0": null } },
//!   "assertions": [
//!     { "op": "size", "set": "B", "eq": 4 },
//!     { "op": "dist", "u": "u", "v": [1, 0, 0], "eq": 1 }
//!   ]
//! }
//! ```
//!
//! Sets are named or built from `sites`, `tetra`, `tetra_d0`, `ball`,
//! `b_ball`, `union`, `intersect`, `minus` and `slab`.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SearchError;
use crate::balls::{b_ball, tetra_d0, tetra_neighborhood};
use crate::lattice::{ball_region, distance, slab_distance, Region, Site};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coords {
    /// Lattice coordinates `(i, j, k)` with half-integer `i`, `j`.
    Half,
    #[default]
    Doubled,
}

/// Distance used by the script, unless an assertion asks for the induced one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScriptMetric {
    #[default]
    Ambient,
    /// Distance inside layers `k1..=k2`.
    Slab([i64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointRef {
    Name(String),
    Coords([f64; 3]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetExpr {
    Name(String),
    Op(Box<SetOp>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetOp {
    Sites(Vec<PointRef>),
    /// Sites adjacent to one of four points.
    Tetra([PointRef; 4]),
    TetraD0,
    Ball {
        center: PointRef,
        radius: u32,
    },
    BBall(u32),
    Union(Vec<SetExpr>),
    Intersect(Vec<SetExpr>),
    Minus(SetExpr, SetExpr),
    /// Members lying in layers `k1..=k2`.
    Slab {
        layers: [i64; 2],
        of: SetExpr,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Assertion {
    Dist {
        u: PointRef,
        v: PointRef,
        eq: Option<u32>,
        le: Option<u32>,
        ge: Option<u32>,
    },
    Size {
        set: SetExpr,
        eq: usize,
    },
    /// Largest pairwise distance; `induced` measures inside the set itself.
    Diameter {
        set: SetExpr,
        eq: u32,
        #[serde(default)]
        induced: bool,
    },
    IsClique {
        set: SetExpr,
        d: u32,
        #[serde(default = "yes")]
        expect: bool,
    },
    /// `u` is within `d` of exactly `count` members, and/or the members
    /// farther than `d` are exactly `except`.
    Within {
        u: PointRef,
        set: SetExpr,
        d: u32,
        count: Option<usize>,
        except: Option<Vec<PointRef>>,
    },
    Member {
        u: PointRef,
        set: SetExpr,
        #[serde(default = "yes")]
        expect: bool,
    },
    /// Every member, except exactly `except`, is within `d` of some point
    /// of each group in `by`.
    Covered {
        set: SetExpr,
        by: Vec<Vec<PointRef>>,
        d: u32,
        #[serde(default)]
        except: Vec<PointRef>,
    },
}

fn yes() -> bool {
    true
}

impl Assertion {
    fn op(&self) -> &'static str {
        match self {
            Assertion::Dist { .. } => "dist",
            Assertion::Size { .. } => "size",
            Assertion::Diameter { .. } => "diameter",
            Assertion::IsClique { .. } => "is_clique",
            Assertion::Within { .. } => "within",
            Assertion::Member { .. } => "member",
            Assertion::Covered { .. } => "covered",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    #[serde(flatten)]
    pub assertion: Assertion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactScript {
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub coords: Coords,
    #[serde(default)]
    pub metric: ScriptMetric,
    #[serde(default)]
    pub points: BTreeMap<String, [f64; 3]>,
    #[serde(default)]
    pub sets: BTreeMap<String, SetExpr>,
    pub assertions: Vec<Entry>,
}

impl FactScript {
    pub fn from_json(text: &str) -> Result<Self, SearchError> {
        serde_json::from_str(text).map_err(|e| SearchError::MalformedScript(e.to_string()))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, SearchError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssertionResult {
    pub index: usize,
    pub op: String,
    pub note: Option<String>,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactReport {
    pub name: String,
    pub results: Vec<AssertionResult>,
}

impl FactReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> usize {
        self.results.iter().filter(|r| !r.pass).count()
    }

    pub fn summary(&self) -> String {
        let n = self.results.len();
        if self.all_pass() {
            format!("ALL PASS ({n} assertions)")
        } else {
            format!("FAIL ({} of {n} assertions)", self.failures())
        }
    }
}

impl fmt::Display for FactReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.name)?;
        for r in &self.results {
            write!(
                f,
                "  {} #{:<3} {:<9} computed {} / expected {}",
                if r.pass { "PASS" } else { "FAIL" },
                r.index,
                r.op,
                r.computed,
                r.expected
            )?;
            match &r.note {
                Some(n) => writeln!(f, "  [{n}]")?,
                None => writeln!(f)?,
            }
        }
        write!(f, "{}", self.summary())
    }
}

struct Ctx<'a> {
    script: &'a FactScript,
    sets: RefCell<HashMap<String, Region>>,
    in_progress: RefCell<BTreeSet<String>>,
}

fn malformed(m: impl Into<String>) -> SearchError {
    SearchError::MalformedScript(m.into())
}

impl Ctx<'_> {
    fn coords(&self, c: [f64; 3]) -> Result<Site, SearchError> {
        if c[2].fract() != 0.0 {
            return Err(malformed(format!("layer {} is not an integer", c[2])));
        }
        let s = match self.script.coords {
            Coords::Half => Site::from_lattice(c[0], c[1], c[2] as i64),
            Coords::Doubled => {
                if c[0].fract() != 0.0 || c[1].fract() != 0.0 {
                    return Err(malformed(format!(
                        "{c:?} is not a doubled-coordinate triple"
                    )));
                }
                Site::new(c[0] as i64, c[1] as i64, c[2] as i64)
            }
        };
        s.map_err(|e| malformed(e.to_string()))
    }

    fn point(&self, p: &PointRef) -> Result<Site, SearchError> {
        match p {
            PointRef::Coords(c) => self.coords(*c),
            PointRef::Name(n) => {
                let c = self
                    .script
                    .points
                    .get(n)
                    .ok_or_else(|| malformed(format!("unknown point `{n}`")))?;
                self.coords(*c)
            }
        }
    }

    fn points(&self, ps: &[PointRef]) -> Result<Vec<Site>, SearchError> {
        ps.iter().map(|p| self.point(p)).collect()
    }

    fn show(&self, s: Site) -> String {
        match self.script.coords {
            Coords::Half => {
                let (i, j, k) = s.lattice();
                format!("({i}, {j}, {k})")
            }
            Coords::Doubled => s.to_string(),
        }
    }

    fn show_all(&self, sites: &[Site]) -> String {
        let parts: Vec<String> = sites.iter().map(|&s| self.show(s)).collect();
        format!("{{{}}}", parts.join(", "))
    }

    fn dist(&self, u: Site, v: Site) -> Result<u32, SearchError> {
        match self.script.metric {
            ScriptMetric::Ambient => Ok(distance(u, v)),
            ScriptMetric::Slab([k1, k2]) => Ok(slab_distance(u, v, k1, k2)?),
        }
    }

    fn set(&self, e: &SetExpr) -> Result<Region, SearchError> {
        match e {
            SetExpr::Name(n) => self.named(n),
            SetExpr::Op(op) => self.op(op),
        }
    }

    fn named(&self, n: &str) -> Result<Region, SearchError> {
        if let Some(r) = self.sets.borrow().get(n) {
            return Ok(r.clone());
        }
        let expr = self
            .script
            .sets
            .get(n)
            .ok_or_else(|| malformed(format!("unknown set `{n}`")))?;
        if !self.in_progress.borrow_mut().insert(n.to_string()) {
            return Err(malformed(format!("set `{n}` refers to itself")));
        }
        let r = self.set(expr)?;
        self.in_progress.borrow_mut().remove(n);
        self.sets.borrow_mut().insert(n.to_string(), r.clone());
        Ok(r)
    }

    fn op(&self, op: &SetOp) -> Result<Region, SearchError> {
        let explicit = |sites: Vec<Site>| {
            Region::explicit(sites).map_err(|_| malformed("set expression is empty"))
        };
        match op {
            SetOp::Sites(ps) => explicit(self.points(ps)?),
            SetOp::Tetra(ps) => {
                let [a, b, c, d] = [0, 1, 2, 3].map(|i| self.point(&ps[i]));
                Ok(tetra_neighborhood(a?, b?, c?, d?).region)
            }
            SetOp::TetraD0 => Ok(tetra_d0()),
            SetOp::Ball { center, radius } => Ok(ball_region(self.point(center)?, *radius)?),
            SetOp::BBall(l) => Ok(b_ball(*l)),
            SetOp::Union(parts) => {
                let mut all = Vec::new();
                for p in parts {
                    all.extend(self.set(p)?.iter());
                }
                explicit(all)
            }
            SetOp::Intersect(parts) => {
                let (first, rest) = parts
                    .split_first()
                    .ok_or_else(|| malformed("empty intersect"))?;
                let rest = rest
                    .iter()
                    .map(|p| self.set(p))
                    .collect::<Result<Vec<_>, _>>()?;
                let first = self.set(first)?;
                explicit(
                    first
                        .iter()
                        .filter(|&s| rest.iter().all(|r| r.contains(s)))
                        .collect(),
                )
            }
            SetOp::Minus(a, b) => {
                let (a, b) = (self.set(a)?, self.set(b)?);
                explicit(a.iter().filter(|&s| !b.contains(s)).collect())
            }
            SetOp::Slab {
                layers: [k1, k2],
                of,
            } => {
                let r = self.set(of)?;
                explicit(r.iter().filter(|s| (*k1..=*k2).contains(&s.z())).collect())
            }
        }
    }

    fn check(&self, a: &Assertion) -> Result<(String, String, bool), SearchError> {
        Ok(match a {
            Assertion::Dist { u, v, eq, le, ge } => {
                let got = self.dist(self.point(u)?, self.point(v)?)?;
                let mut want = Vec::new();
                let mut pass = true;
                if let Some(e) = eq {
                    want.push(format!("= {e}"));
                    pass &= got == *e;
                }
                if let Some(e) = le {
                    want.push(format!("<= {e}"));
                    pass &= got <= *e;
                }
                if let Some(e) = ge {
                    want.push(format!(">= {e}"));
                    pass &= got >= *e;
                }
                if want.is_empty() {
                    return Err(malformed("dist needs eq, le or ge"));
                }
                (want.join(" and "), got.to_string(), pass)
            }
            Assertion::Size { set, eq } => {
                let got = self.set(set)?.len();
                (eq.to_string(), got.to_string(), got == *eq)
            }
            Assertion::Diameter { set, eq, induced } => {
                let r = self.set(set)?;
                let got = if *induced {
                    crate::balls::diameter(&r, crate::lattice::Metric::RegionInternal)
                        .map(|d| d.to_string())
                        .unwrap_or_else(|_| "disconnected".into())
                } else {
                    self.max_distance(&r)?.to_string()
                };
                (eq.to_string(), got.clone(), got == eq.to_string())
            }
            Assertion::IsClique { set, d, expect } => {
                let r = self.set(set)?;
                let got = self.max_distance(&r)? <= *d;
                (expect.to_string(), got.to_string(), got == *expect)
            }
            Assertion::Within {
                u,
                set,
                d,
                count,
                except,
            } => {
                if count.is_none() && except.is_none() {
                    return Err(malformed("within needs count or except"));
                }
                let u = self.point(u)?;
                let r = self.set(set)?;
                let mut near = 0;
                let mut far = Vec::new();
                for s in r.iter() {
                    if self.dist(u, s)? <= *d {
                        near += 1;
                    } else {
                        far.push(s);
                    }
                }
                let mut want = Vec::new();
                let mut got = Vec::new();
                let mut pass = true;
                if let Some(c) = count {
                    want.push(format!("{c} near"));
                    got.push(format!("{near} near"));
                    pass &= near == *c;
                }
                if let Some(ex) = except {
                    let mut ex = self.points(ex)?;
                    ex.sort_unstable();
                    want.push(format!("far {}", self.show_all(&ex)));
                    got.push(format!("far {}", self.show_all(&far)));
                    pass &= far == ex;
                }
                (want.join(", "), got.join(", "), pass)
            }
            Assertion::Member { u, set, expect } => {
                let got = self.set(set)?.contains(self.point(u)?);
                (expect.to_string(), got.to_string(), got == *expect)
            }
            Assertion::Covered { set, by, d, except } => {
                let r = self.set(set)?;
                let groups = by
                    .iter()
                    .map(|g| self.points(g))
                    .collect::<Result<Vec<_>, _>>()?;
                let mut uncovered = Vec::new();
                for s in r.iter() {
                    let mut ok = true;
                    for g in &groups {
                        let mut hit = false;
                        for &p in g {
                            if self.dist(s, p)? <= *d {
                                hit = true;
                                break;
                            }
                        }
                        ok &= hit;
                    }
                    if !ok {
                        uncovered.push(s);
                    }
                }
                let mut ex = self.points(except)?;
                ex.sort_unstable();
                let pass = uncovered == ex;
                (
                    format!("uncovered {}", self.show_all(&ex)),
                    format!("uncovered {}", self.show_all(&uncovered)),
                    pass,
                )
            }
        })
    }

    fn max_distance(&self, r: &Region) -> Result<u32, SearchError> {
        let s = r.sites();
        let mut best = 0;
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                best = best.max(self.dist(s[i], s[j])?);
            }
        }
        Ok(best)
    }
}

/// Evaluates every assertion; a malformed assertion aborts the run.
pub fn run_fact_script(script: &FactScript) -> Result<FactReport, SearchError> {
    let ctx = Ctx {
        script,
        sets: RefCell::new(HashMap::new()),
        in_progress: RefCell::new(BTreeSet::new()),
    };
    let results = script
        .assertions
        .iter()
        .enumerate()
        .map(|(index, e)| {
            let (expected, computed, pass) = ctx.check(&e.assertion)?;
            Ok(AssertionResult {
                index: index + 1,
                op: e.assertion.op().into(),
                note: e.note.clone(),
                expected,
                computed,
                pass,
            })
        })
        .collect::<Result<_, SearchError>>()?;
    Ok(FactReport {
        name: script.name.clone(),
        results,
    })
}
