//! Decides whether a presentation with length-2 relations presents a left
//! divisibility monoid.
//!
//! Three local conditions are checked on the presented monoid directly:
//!
//! * I: `↓(xyz)` is a distributive lattice;
//! * II: `xyz = xy′z′` or `yzx = y′z′x` implies `yz = y′z′`;
//! * III: `xy = x′y′`, `xz = x′z′` and `y ≠ z` imply `x = x′`;
//!
//! for all generators. The fourth requirement, that the monoid is `Σ*/∼` for
//! the congruence generated by the length-2 relations, holds by construction
//! of [`Presentation`](crate::presentation::Presentation).

use std::fmt;

use rayon::prelude::*;

use crate::error::Result;
use crate::monoid::Monoid;
use crate::presentation::{Letter, Presentation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    I,
    II,
    III,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::I => "I",
            Condition::II => "II",
            Condition::III => "III",
        })
    }
}

/// A violated instance of one of the conditions.
///
/// Witness layout: I is `[x, y, z]`; II is `[x, y, z, y′, z′]` with
/// `side` telling whether the left (`xyz = xy′z′`) or right
/// (`yzx = y′z′x`) form fired; III is `[x, y, z, x′, y′, z′]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub condition: Condition,
    pub witness: Vec<Letter>,
    pub side: Option<Side>,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Violation {
    /// Re-checks the violation with the oracle.
    pub fn replay(&self, monoid: &Monoid) -> Result<bool> {
        let w = &self.witness;
        match self.condition {
            Condition::I => {
                let top = monoid.element(&[w[0], w[1], w[2]])?;
                let l = monoid.divisor_lattice(&top)?;
                Ok(!l.is_distributive())
            }
            Condition::II => {
                let (x, y, z, y2, z2) = (w[0], w[1], w[2], w[3], w[4]);
                let premise = match self.side {
                    Some(Side::Right) => monoid.equal(&[y, z, x], &[y2, z2, x])?,
                    _ => monoid.equal(&[x, y, z], &[x, y2, z2])?,
                };
                Ok(premise && !monoid.equal(&[y, z], &[y2, z2])?)
            }
            Condition::III => {
                let (x, y, z, x2, y2, z2) = (w[0], w[1], w[2], w[3], w[4], w[5]);
                Ok(y != z
                    && x != x2
                    && monoid.equal(&[x, y], &[x2, y2])?
                    && monoid.equal(&[x, z], &[x2, z2])?)
            }
        }
    }
}

/// Result of running all conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub passed: bool,
    pub failures: Vec<Violation>,
    /// Number of tuples scanned for I, II, III.
    pub scanned: [usize; 3],
}

impl CheckReport {
    pub fn failures_of(&self, c: Condition) -> impl Iterator<Item = &Violation> {
        self.failures.iter().filter(move |v| v.condition == c)
    }

    /// Structured text report.
    pub fn render(&self, p: &Presentation) -> String {
        let mut s = String::new();
        s.push_str(&format!("presentation: {p}\n"));
        for (i, c) in [Condition::I, Condition::II, Condition::III].into_iter().enumerate() {
            let n = self.failures_of(c).count();
            let verdict = if n == 0 { "ok" } else { "FAILED" };
            s.push_str(&format!(
                "condition {c}: {verdict} ({} tuples scanned, {n} violations)\n",
                self.scanned[i]
            ));
            for v in self.failures_of(c) {
                s.push_str(&format!("  {}\n", v.detail));
            }
        }
        s.push_str("condition IV: holds by construction\n");
        s.push_str(if self.passed {
            "verdict: left divisibility monoid\n"
        } else {
            "verdict: not a left divisibility monoid\n"
        });
        s
    }
}

fn tuples(rank: usize, arity: usize) -> impl ParallelIterator<Item = Vec<Letter>> {
    let total = rank.pow(arity as u32);
    (0..total).into_par_iter().map(move |mut idx| {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = idx % rank;
            idx /= rank;
        }
        t
    })
}

fn collect_sorted(mut v: Vec<Violation>) -> Vec<Violation> {
    v.sort();
    v
}

pub fn check_condition_i(monoid: &Monoid) -> Result<Vec<Violation>> {
    let p = monoid.presentation();
    let found: Result<Vec<Option<Violation>>> = tuples(monoid.rank(), 3)
        .map(|t| {
            let top = monoid.element(&t)?;
            let l = monoid.divisor_lattice(&top)?;
            if l.is_distributive() {
                return Ok(None);
            }
            let why = if l.is_lattice() {
                "not distributive"
            } else {
                "not a lattice"
            };
            Ok(Some(Violation {
                condition: Condition::I,
                detail: format!("↓({}) is {why}", p.render_compact(&t)),
                witness: t,
                side: None,
            }))
        })
        .collect();
    Ok(collect_sorted(found?.into_iter().flatten().collect()))
}

pub fn check_condition_ii(monoid: &Monoid) -> Result<Vec<Violation>> {
    let p = monoid.presentation();
    let found: Result<Vec<Vec<Violation>>> = tuples(monoid.rank(), 5)
        .map(|t| {
            let (x, y, z, y2, z2) = (t[0], t[1], t[2], t[3], t[4]);
            let mut out = Vec::new();
            if monoid.equal(&[y, z], &[y2, z2])? {
                return Ok(out);
            }
            if monoid.equal(&[x, y, z], &[x, y2, z2])? {
                out.push(Violation {
                    condition: Condition::II,
                    detail: format!(
                        "{} = {} but {} ≠ {}",
                        p.render_compact(&[x, y, z]),
                        p.render_compact(&[x, y2, z2]),
                        p.render_compact(&[y, z]),
                        p.render_compact(&[y2, z2])
                    ),
                    witness: t.clone(),
                    side: Some(Side::Left),
                });
            }
            if monoid.equal(&[y, z, x], &[y2, z2, x])? {
                out.push(Violation {
                    condition: Condition::II,
                    detail: format!(
                        "{} = {} but {} ≠ {}",
                        p.render_compact(&[y, z, x]),
                        p.render_compact(&[y2, z2, x]),
                        p.render_compact(&[y, z]),
                        p.render_compact(&[y2, z2])
                    ),
                    witness: t.clone(),
                    side: Some(Side::Right),
                });
            }
            Ok(out)
        })
        .collect();
    Ok(collect_sorted(found?.into_iter().flatten().collect()))
}

pub fn check_condition_iii(monoid: &Monoid) -> Result<Vec<Violation>> {
    let p = monoid.presentation();
    let found: Result<Vec<Option<Violation>>> = tuples(monoid.rank(), 6)
        .filter(|t| t[1] != t[2])
        .map(|t| {
            let (x, y, z, x2, y2, z2) = (t[0], t[1], t[2], t[3], t[4], t[5]);
            if x != x2 && monoid.equal(&[x, y], &[x2, y2])? && monoid.equal(&[x, z], &[x2, z2])? {
                return Ok(Some(Violation {
                    condition: Condition::III,
                    detail: format!(
                        "{} = {} and {} = {} with {} ≠ {} but {} ≠ {}",
                        p.render_compact(&[x, y]),
                        p.render_compact(&[x2, y2]),
                        p.render_compact(&[x, z]),
                        p.render_compact(&[x2, z2]),
                        p.symbol(y),
                        p.symbol(z),
                        p.symbol(x),
                        p.symbol(x2)
                    ),
                    witness: t,
                    side: None,
                }));
            }
            Ok(None)
        })
        .collect();
    Ok(collect_sorted(found?.into_iter().flatten().collect()))
}

/// Runs the three conditions and aggregates them.
pub fn check_all(monoid: &Monoid) -> Result<CheckReport> {
    let r = monoid.rank();
    let mut failures = check_condition_i(monoid)?;
    failures.extend(check_condition_ii(monoid)?);
    failures.extend(check_condition_iii(monoid)?);
    Ok(CheckReport {
        passed: failures.is_empty(),
        failures,
        scanned: [r.pow(3), 2 * r.pow(5), r.pow(5) * r.saturating_sub(1)],
    })
}
