//! DIMACS CNF export of coloring problems, and a parser that replays an
//! exported file through the built-in search.
//!
//! Variable `v(s, c) = s * k + c + 1` says site `s` (canonical index) has
//! color `c`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use super::engine::{ColoringInstance, Outcome};
use super::{Budget, SearchError, SearchProblem, SearchStats};
use crate::lattice::Metric;

/// A parsed CNF formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i64>>,
    pub comments: Vec<String>,
}

impl Cnf {
    /// Whether an assignment (indexed by variable - 1) satisfies every clause.
    pub fn evaluate(&self, model: &[bool]) -> bool {
        self.clauses.iter().all(|cl| {
            cl.iter().any(|&l| {
                let v = model[l.unsigned_abs() as usize - 1];
                if l > 0 {
                    v
                } else {
                    !v
                }
            })
        })
    }
}

fn var(k: u32, s: usize, c: u32) -> i64 {
    (s as i64) * k as i64 + c as i64 + 1
}

/// Clauses in export order: per site at-least-one then pairwise
/// at-most-one, conflict clauses by edge then color, anchor units, then
/// extra constraints.
fn clauses(inst: &ColoringInstance) -> Vec<Vec<i64>> {
    let k = inst.k;
    let mut out = Vec::new();
    for s in 0..inst.n {
        out.push((0..k).map(|c| var(k, s, c)).collect());
        for c1 in 0..k {
            for c2 in c1 + 1..k {
                out.push(vec![-var(k, s, c1), -var(k, s, c2)]);
            }
        }
    }
    for &(a, b) in &inst.edges {
        for c in 0..k {
            out.push(vec![-var(k, a, c), -var(k, b, c)]);
        }
    }
    if inst.anchor.len() <= k as usize {
        for (c, &s) in inst.anchor.iter().enumerate() {
            out.push(vec![var(k, s, c as u32)]);
        }
    }
    for &(a, b) in &inst.equal {
        for c in 0..k {
            out.push(vec![-var(k, a, c), var(k, b, c)]);
            out.push(vec![var(k, a, c), -var(k, b, c)]);
        }
    }
    for &(a, b) in &inst.distinct {
        for c in 0..k {
            out.push(vec![-var(k, a, c), -var(k, b, c)]);
        }
    }
    out
}

/// Writes the problem as DIMACS CNF; returns `(variables, clauses)`.
pub fn export_dimacs<W: Write>(
    problem: &SearchProblem,
    out: W,
) -> Result<(usize, usize), SearchError> {
    let inst = problem.instance()?;
    let cls = clauses(&inst);
    let num_vars = inst.n * inst.k as usize;
    let mut w = BufWriter::new(out);
    let metric = match problem.metric {
        Metric::Ambient => "ambient",
        Metric::RegionInternal => "internal",
    };
    writeln!(
        w,
        "c fcc coloring: v(s,c) = s*k + c + 1, sites in canonical order"
    )?;
    writeln!(
        w,
        "c n={} k={} d={} metric={metric} edges={}",
        inst.n,
        inst.k,
        problem.d,
        inst.edges.len()
    )?;
    writeln!(
        w,
        "c anchor={} equal={} distinct={}",
        inst.anchor.len(),
        inst.equal.len(),
        inst.distinct.len()
    )?;
    if inst.anchor.len() > inst.k as usize {
        writeln!(w, "c anchor exceeds k; its unit clauses are omitted")?;
    }
    writeln!(w, "p cnf {} {}", num_vars, cls.len())?;
    for cl in &cls {
        for l in cl {
            write!(w, "{l} ")?;
        }
        writeln!(w, "0")?;
    }
    w.flush()?;
    Ok((num_vars, cls.len()))
}

pub fn export_dimacs_file(
    problem: &SearchProblem,
    path: impl AsRef<Path>,
) -> Result<(usize, usize), SearchError> {
    export_dimacs(problem, File::create(path)?)
}

fn format_err(line: usize, message: impl Into<String>) -> SearchError {
    SearchError::Dimacs {
        line,
        message: message.into(),
    }
}

/// Strict DIMACS reader: one header, every literal in range, exact clause count.
pub fn parse_dimacs<R: BufRead>(input: R) -> Result<Cnf, SearchError> {
    let mut header: Option<(usize, usize)> = None;
    let mut comments = Vec::new();
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut last = 0;
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        last = lineno;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(c) = t.strip_prefix('c') {
            comments.push(c.trim().to_string());
            continue;
        }
        if t.starts_with('p') {
            let parts: Vec<&str> = t.split_whitespace().collect();
            if header.is_some() || parts.len() != 4 || parts[1] != "cnf" {
                return Err(format_err(lineno, "bad or repeated `p cnf V C` header"));
            }
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| format_err(lineno, "bad header count"))
            };
            header = Some((num(parts[2])?, num(parts[3])?));
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(format_err(lineno, "clause before header"));
        };
        for tok in t.split_whitespace() {
            let l: i64 = tok
                .parse()
                .map_err(|_| format_err(lineno, format!("bad literal `{tok}`")))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if l.unsigned_abs() as usize > vars {
                return Err(format_err(
                    lineno,
                    format!("literal {l} exceeds {vars} variables"),
                ));
            } else {
                current.push(l);
            }
        }
    }
    let Some((num_vars, count)) = header else {
        return Err(format_err(last, "missing header"));
    };
    if !current.is_empty() {
        return Err(format_err(last, "last clause is not terminated by 0"));
    }
    if clauses.len() != count {
        return Err(format_err(
            last,
            format!("header announces {count} clauses, found {}", clauses.len()),
        ));
    }
    Ok(Cnf {
        num_vars,
        clauses,
        comments,
    })
}

/// Outcome of solving an exported coloring CNF with the built-in search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    pub n: usize,
    pub k: u32,
    /// `None` when the budget ran out.
    pub satisfiable: Option<bool>,
    /// A satisfying assignment, checked against every clause.
    pub model: Option<Vec<bool>>,
    pub stats: SearchStats,
}

/// Recovers the coloring instance encoded by [`export_dimacs`] and solves it.
pub fn replay_dimacs(cnf: &Cnf, budget: Budget) -> Result<Replay, SearchError> {
    let unsupported = |m: &str| format_err(0, format!("not a coloring CNF: {m}"));
    let k = cnf
        .clauses
        .first()
        .map(Vec::len)
        .ok_or_else(|| unsupported("no clauses"))? as u32;
    if k == 0 || !cnf.num_vars.is_multiple_of(k as usize) {
        return Err(unsupported("variable count is not a multiple of k"));
    }
    let n = cnf.num_vars / k as usize;
    let decode = |l: i64| {
        let v = l.unsigned_abs() as usize - 1;
        (v / k as usize, (v % k as usize) as u32)
    };
    let mut conflicts: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    let mut links: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    let mut units: BTreeMap<u32, usize> = BTreeMap::new();
    let mut alo = vec![false; n];
    for cl in &cnf.clauses {
        match cl.as_slice() {
            [a, b] if *a < 0 && *b < 0 => {
                let ((sa, ca), (sb, cb)) = (decode(*a), decode(*b));
                match (sa == sb, ca == cb) {
                    (true, false) => {}
                    (false, true) => *conflicts.entry((sa.min(sb), sa.max(sb))).or_default() += 1,
                    _ => return Err(unsupported("negative pair mixes sites and colors")),
                }
            }
            [a, b] if (*a < 0) != (*b < 0) => {
                let ((sa, ca), (sb, cb)) = (decode(*a), decode(*b));
                if ca != cb || sa == sb {
                    return Err(unsupported("mixed pair is not an equality"));
                }
                *links.entry((sa.min(sb), sa.max(sb))).or_default() += 1;
            }
            // with k = 1 these coincide with units; dropping a unit is harmless there
            lits if lits.len() == k as usize && lits.iter().all(|&l| l > 0) => {
                let (s, _) = decode(lits[0]);
                if lits
                    .iter()
                    .enumerate()
                    .any(|(c, &l)| decode(l) != (s, c as u32))
                {
                    return Err(unsupported("positive clause is not one site's colors"));
                }
                alo[s] = true;
            }
            [a] if *a > 0 => {
                let (s, c) = decode(*a);
                if units.insert(c, s).is_some() {
                    return Err(unsupported("two units share a color"));
                }
            }
            _ => return Err(unsupported("unexpected clause shape")),
        }
    }
    if alo.iter().any(|&a| !a) {
        return Err(unsupported("some site lacks an at-least-one clause"));
    }
    if conflicts.values().any(|&c| c % k != 0) || links.values().any(|&c| c % (2 * k) != 0) {
        return Err(unsupported("constraint missing some colors"));
    }
    if units.keys().enumerate().any(|(i, &c)| c != i as u32) {
        return Err(unsupported("unit clauses do not pre-color 0, 1, ..."));
    }
    let inst = ColoringInstance {
        n,
        k,
        edges: conflicts.into_keys().collect(),
        anchor: units.into_values().collect(),
        equal: links.into_keys().collect(),
        distinct: Vec::new(),
    };
    let (outcome, stats) = inst.solve(budget)?;
    let (satisfiable, model) = match outcome {
        Outcome::Colorable(colors) => {
            let model: Vec<bool> = (0..cnf.num_vars)
                .map(|v| colors[v / k as usize] == (v % k as usize) as u32)
                .collect();
            assert!(cnf.evaluate(&model), "replayed coloring violates the CNF");
            (Some(true), Some(model))
        }
        Outcome::NotColorable => (Some(false), None),
        Outcome::Inconclusive => (None, None),
    };
    Ok(Replay {
        n,
        k,
        satisfiable,
        model,
        stats,
    })
}
