//! Exhaustive property checks of the hypercube machinery against the oracle.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::Result;
use crate::hypercube::{CubeId, DivisibilityMonoid};
use crate::monoid::{all_words_up_to, Element};
use crate::normal_form::NormalWord;
use crate::transducer::{Alphabet, Transducer};

/// Bounds for [`verify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Combined element length for the algebraic properties.
    pub max_len: usize,
    /// Word length for the transducer and word-problem sweeps.
    pub word_len: usize,
    /// Element length for the fellow traveller sweep.
    pub traveller_len: usize,
}

impl VerifyOptions {
    pub fn uniform(len: usize) -> Self {
        VerifyOptions {
            max_len: len,
            word_len: len,
            traveller_len: len,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub checked: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn from_failures(name: &'static str, checked: usize, failures: Vec<String>) -> Self {
        PropertyResult {
            name,
            checked,
            failures: failures.len(),
            first_failure: failures.into_iter().next(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub results: Vec<PropertyResult>,
    /// Incremental updates whose raw factor list had a trivial factor away
    /// from the boundary slot.
    pub interior_trivial: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(PropertyResult::passed)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

/// `h` tabulated on every element up to a length, with a normalizer on top.
pub struct HTable<'a> {
    dm: &'a DivisibilityMonoid,
    h: HashMap<Element, CubeId>,
    max_len: usize,
}

impl<'a> HTable<'a> {
    pub fn new(dm: &'a DivisibilityMonoid, max_len: usize) -> Result<Self> {
        let elements = dm.monoid().elements_up_to(max_len)?;
        let h = elements
            .into_par_iter()
            .map(|a| {
                let c = dm.max_hypercube(&a)?;
                Ok((a, c))
            })
            .collect::<Result<HashMap<_, _>>>()?;
        Ok(HTable { dm, h, max_len })
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> {
        self.h.keys()
    }

    pub fn h(&self, a: &Element) -> Result<CubeId> {
        match self.h.get(a) {
            Some(&c) => Ok(c),
            None => self.dm.max_hypercube(a),
        }
    }

    pub fn normalize(&self, a: &Element) -> Result<NormalWord> {
        let m = self.dm.monoid();
        let mut rest = a.clone();
        let mut factors = Vec::new();
        while !rest.is_one() {
            let c = self.h(&rest)?;
            rest = m.right_quotient(&rest, self.dm.cube_element(c))?;
            factors.push(c);
        }
        factors.reverse();
        Ok(NormalWord::new(factors))
    }
}

fn sorted_elements(t: &HTable) -> Vec<Element> {
    let mut v: Vec<Element> = t.elements().cloned().collect();
    v.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    v
}

/// `h(ab) = h(h(a)·b)` for all `|a| + |b| ≤ max_len`.
pub fn check_h_composition(dm: &DivisibilityMonoid, t: &HTable, len: usize) -> Result<PropertyResult> {
    let m = dm.monoid();
    let elements = sorted_elements(t);
    let found: Result<Vec<(usize, Vec<String>)>> = elements
        .par_iter()
        .map(|a| {
            let mut checked = 0;
            let mut bad = Vec::new();
            let ha = dm.cube_element(t.h(a)?);
            for b in elements.iter().take_while(|b| a.len() + b.len() <= len) {
                checked += 1;
                let lhs = t.h(&m.mul(a, b)?)?;
                let rhs = t.h(&m.mul(ha, b)?)?;
                if lhs != rhs {
                    bad.push(format!(
                        "a = {}, b = {}: h(ab) = {}, h(h(a)b) = {}",
                        m.show(a),
                        m.show(b),
                        dm.render_cube(lhs),
                        dm.render_cube(rhs)
                    ));
                }
            }
            Ok((checked, bad))
        })
        .collect();
    let (checked, bad) = fold(found?);
    Ok(PropertyResult::from_failures("h-composition", checked, bad))
}

fn fold(parts: Vec<(usize, Vec<String>)>) -> (usize, Vec<String>) {
    parts
        .into_iter()
        .fold((0, Vec::new()), |(n, mut all), (k, bad)| {
            all.extend(bad);
            (n + k, all)
        })
}

/// Words of non-trivial cubes with total length `≤ max_len`.
fn cube_words(dm: &DivisibilityMonoid, max_len: usize) -> Vec<Vec<CubeId>> {
    let cubes: Vec<CubeId> = dm.table().non_trivial().collect();
    let mut out = vec![Vec::new()];
    let mut layer = vec![(Vec::new(), 0usize)];
    while !layer.is_empty() {
        let mut next = Vec::new();
        for (w, len) in &layer {
            for &c in &cubes {
                let l = len + dm.table().get(c).len();
                if l <= max_len {
                    let mut w2: Vec<CubeId> = w.clone();
                    w2.push(c);
                    out.push(w2.clone());
                    next.push((w2, l));
                }
            }
        }
        layer = next;
    }
    out
}

/// A cube word is the normal form of its value iff each adjacent pair is normal.
pub fn check_local_normality(dm: &DivisibilityMonoid, t: &HTable, len: usize) -> Result<PropertyResult> {
    let n = dm.table().len();
    let normal: Vec<Vec<bool>> = (0..n)
        .map(|a| (0..n).map(|b| dm.is_normal_pair(CubeId(a), CubeId(b))).collect())
        .collect::<Result<_>>()?;
    let words = cube_words(dm, len);
    let bad: Result<Vec<Option<String>>> = words
        .par_iter()
        .map(|w| {
            let local = w.windows(2).all(|p| normal[p[0].0][p[1].0]);
            let global = t.normalize(&dm.evaluate(w)?)?.factors == *w;
            Ok((local != global).then(|| {
                format!(
                    "{}: pairwise {local}, normal form {global}",
                    NormalWord::new(w.clone()).render(dm.presentation(), dm.table())
                )
            }))
        })
        .collect();
    let bad: Vec<String> = bad?.into_iter().flatten().collect();
    Ok(PropertyResult::from_failures("local-normality", words.len(), bad))
}

/// The normal form of a product of two cubes has at most two factors.
pub fn check_two_cube_products(dm: &DivisibilityMonoid) -> Result<PropertyResult> {
    let m = dm.monoid();
    let ids: Vec<CubeId> = dm.table().ids().collect();
    let mut bad = Vec::new();
    for &a in &ids {
        for &b in &ids {
            let p = m.mul(dm.cube_element(a), dm.cube_element(b))?;
            let nf = dm.normalize_oracle(&p)?;
            if nf.len() > 2 {
                bad.push(format!(
                    "{}·{} = {}",
                    dm.render_cube(a),
                    dm.render_cube(b),
                    nf.render(dm.presentation(), dm.table())
                ));
            }
        }
    }
    Ok(PropertyResult::from_failures("two-cube-products", ids.len() * ids.len(), bad))
}

/// Incremental left and right updates agree with full recomputation for
/// `|a| + |c| ≤ max_len`. Returns the result and the number of updates with
/// an interior trivial factor.
pub fn check_updates(dm: &DivisibilityMonoid, t: &HTable, len: usize) -> Result<(PropertyResult, usize)> {
    let m = dm.monoid();
    let elements = sorted_elements(t);
    let cubes: Vec<CubeId> = dm.table().ids().collect();
    let found: Result<Vec<(usize, usize, Vec<String>)>> = elements
        .par_iter()
        .map(|a| {
            let na = t.normalize(a)?;
            let mut checked = 0;
            let mut interior = 0;
            let mut bad = Vec::new();
            for &c in &cubes {
                let ce = dm.cube_element(c);
                if a.len() + ce.len() > len {
                    continue;
                }
                let left = dm.left_mult_trace(c, &na)?;
                let right = dm.right_mult_trace(&na, c)?;
                checked += 2;
                interior += usize::from(left.interior_trivial) + usize::from(right.interior_trivial);
                if left.result != t.normalize(&m.mul(ce, a)?)? {
                    bad.push(format!("left update of {} by {}", m.show(a), dm.render_cube(c)));
                }
                if right.result != t.normalize(&m.mul(a, ce)?)? {
                    bad.push(format!("right update of {} by {}", m.show(a), dm.render_cube(c)));
                }
            }
            Ok((checked, interior, bad))
        })
        .collect();
    let mut checked = 0;
    let mut interior = 0;
    let mut bad = Vec::new();
    for (c, i, b) in found? {
        checked += c;
        interior += i;
        bad.extend(b);
    }
    Ok((
        PropertyResult::from_failures("incremental-updates", checked, bad),
        interior,
    ))
}

/// Iterated runs equal the oracle's normal form on every word of length
/// `≤ word_len`, within the quadratic step bound, and one run ends in `h(w̄)`.
pub fn check_transducer(
    dm: &DivisibilityMonoid,
    machine: &Transducer,
    t: &HTable,
    word_len: usize,
) -> Result<PropertyResult> {
    let mut bad: Vec<String> = dm
        .validate_transducer(machine)?
        .into_iter()
        .map(|(s, x)| format!("arrow from state {s} on letter {x} is incoherent"))
        .collect();
    let p = dm.presentation();
    let words: Vec<_> = all_words_up_to(dm.monoid().rank(), word_len).collect();
    let found: Result<Vec<Option<String>>> = words
        .par_iter()
        .map(|w| {
            let a = dm.monoid().element(w)?;
            let expected = t.normalize(&a)?;
            let fast = match machine.normalize_fast(w) {
                Ok(f) => f,
                Err(e) => return Ok(Some(format!("{}: {e}", p.render_compact(w)))),
            };
            let n = w.len();
            let (head, _) = machine.run(w, machine.initial())?;
            let ok = fast.normal == expected && fast.steps <= n * (n + 1) / 2 && head == t.h(&a)?;
            Ok((!ok).then(|| {
                format!(
                    "{}: transducer {} after {} steps, oracle {}",
                    p.render_compact(w),
                    machine.render_normal(&fast.normal),
                    fast.steps,
                    expected.render(p, dm.table())
                )
            }))
        })
        .collect();
    bad.extend(found?.into_iter().flatten());
    Ok(PropertyResult::from_failures(
        "transducer-oracle",
        words.len() + machine.arrow_count(),
        bad,
    ))
}

/// Words grouped by normal form are exactly the congruence classes.
pub fn check_word_problem(
    dm: &DivisibilityMonoid,
    machine: &Transducer,
    word_len: usize,
) -> Result<PropertyResult> {
    let m = dm.monoid();
    let mut groups: HashMap<NormalWord, Vec<_>> = HashMap::new();
    let mut checked = 0;
    for w in all_words_up_to(m.rank(), word_len) {
        let nf = machine.normalize_fast(&w)?.normal;
        groups.entry(nf).or_default().push(w);
        checked += 1;
    }
    let mut bad = Vec::new();
    for words in groups.values() {
        let class = m.congruence_class(&words[0])?;
        let mut sorted = words.clone();
        sorted.sort();
        if sorted != class {
            bad.push(format!(
                "normal form of {} is shared by {} words, class has {}",
                m.presentation().render_compact(&words[0]),
                sorted.len(),
                class.len()
            ));
        }
    }
    Ok(PropertyResult::from_failures("word-problem", checked, bad))
}

/// `[λ(a,h), τ(a,h)]` is the normal form of `ā·h̄` for every pair of cubes.
pub fn check_augmented(dm: &DivisibilityMonoid, machine: &Transducer) -> Result<PropertyResult> {
    let m = dm.monoid();
    let mut bad = Vec::new();
    for (a, h, b, out) in machine.arrows() {
        let h = CubeId(h);
        let mut factors: Vec<CubeId> = out.iter().map(|&k| CubeId(k)).collect();
        factors.push(b);
        factors.retain(|c| !c.is_trivial());
        let expected = dm.normalize_oracle(&m.mul(dm.cube_element(a), dm.cube_element(h))?)?;
        if factors != expected.factors {
            bad.push(format!("arrow {} on {}", dm.render_cube(a), dm.render_cube(h)));
        }
    }
    Ok(PropertyResult::from_failures("augmented-oracle", machine.arrow_count(), bad))
}

pub fn check_fellow_travellers(dm: &DivisibilityMonoid, t: &HTable, len: usize) -> Result<PropertyResult> {
    let r = dm.fellow_traveller_report_with(len, |a| t.normalize(a))?;
    let bad = r
        .violations
        .iter()
        .map(|v| {
            format!(
                "{:?} multiplication of {} by {}: distance {} at t = {}",
                v.side,
                dm.presentation().render_compact(&v.element),
                dm.render_cube(v.cube),
                v.distance,
                v.t
            )
        })
        .collect();
    Ok(PropertyResult::from_failures("fellow-traveller", r.pairs_checked, bad))
}

/// Runs every check. A supplied machine is checked in place of a freshly
/// synthesized one.
pub fn verify(dm: &DivisibilityMonoid, machine: Option<&Transducer>, opts: VerifyOptions) -> Result<VerifyReport> {
    let longest = opts.max_len.max(opts.word_len).max(opts.traveller_len + dm.table().max_len());
    let t = HTable::new(dm, longest)?;
    let owned;
    let machine = match machine {
        Some(m) => m,
        None => {
            owned = dm.synthesize()?;
            &owned
        }
    };
    let mut results = vec![
        check_h_composition(dm, &t, opts.max_len)?,
        check_local_normality(dm, &t, opts.max_len)?,
        check_two_cube_products(dm)?,
    ];
    let (updates, interior_trivial) = check_updates(dm, &t, opts.max_len)?;
    results.push(updates);
    match machine.alphabet() {
        Alphabet::Base => {
            results.push(check_transducer(dm, machine, &t, opts.word_len)?);
            results.push(check_word_problem(dm, machine, opts.word_len)?);
            results.push(check_augmented(dm, &dm.synthesize_augmented()?)?);
        }
        Alphabet::Augmented => {
            results.push(check_augmented(dm, machine)?);
        }
    }
    results.push(check_fellow_travellers(dm, &t, opts.traveller_len)?);
    Ok(VerifyReport {
        results,
        interior_trivial,
    })
}
