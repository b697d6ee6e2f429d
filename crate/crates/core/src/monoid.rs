//! Brute-force oracle for the monoid `Σ*/∼` presented by length-2 relations.
//!
//! Every element is represented by the lexicographically minimal word of its
//! congruence class. Classes are computed by breadth-first closure under the
//! relations and memoized per monoid, so repeated queries on the same words
//! are cheap. Relations preserve length, which makes the monoid graded and
//! every class finite.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::presentation::{Letter, Presentation, Word};

/// Caps protecting the exponential oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    /// Maximum number of words in a single congruence class.
    pub class_size: usize,
    /// Maximum length of a word handed to the oracle.
    pub element_length: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            class_size: 1_000_000,
            element_length: 16,
        }
    }
}

/// An element of the presented monoid.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    pub(crate) canonical: Word,
}

impl Element {
    /// The identity `1`.
    pub fn one() -> Self {
        Element {
            canonical: Word::empty(),
        }
    }

    /// The lexicographically minimal word of the class.
    pub fn canonical(&self) -> &Word {
        &self.canonical
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_one(&self) -> bool {
        self.canonical.is_empty()
    }
}

/// A congruence class, sorted; `words[0]` is the canonical representative.
#[derive(Debug)]
pub struct Class {
    words: Vec<Word>,
    members: HashSet<Word>,
}

impl Class {
    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn canonical(&self) -> &Word {
        &self.words[0]
    }

    pub fn contains(&self, w: &[Letter]) -> bool {
        self.members.contains(w)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// The presented monoid together with its class memo table.
pub struct Monoid {
    presentation: Presentation,
    limits: OracleLimits,
    /// For each length-2 word, the other members of its length-2 class.
    swaps: HashMap<[Letter; 2], Vec<[Letter; 2]>>,
    memo: RwLock<HashMap<Word, Arc<Class>>>,
}

impl fmt::Debug for Monoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Monoid")
            .field("presentation", &self.presentation)
            .field("limits", &self.limits)
            .finish()
    }
}

impl Monoid {
    pub fn new(presentation: Presentation) -> Self {
        Self::with_limits(presentation, OracleLimits::default())
    }

    pub fn with_limits(presentation: Presentation, limits: OracleLimits) -> Self {
        // Union the relation pairs into length-2 classes.
        let mut groups: Vec<BTreeSet<[Letter; 2]>> = Vec::new();
        for (u, v) in presentation.relations() {
            let hits: Vec<usize> = groups
                .iter()
                .enumerate()
                .filter(|(_, g)| g.contains(u) || g.contains(v))
                .map(|(i, _)| i)
                .collect();
            let mut merged: BTreeSet<[Letter; 2]> = [*u, *v].into_iter().collect();
            for &i in hits.iter().rev() {
                merged.extend(groups.swap_remove(i));
            }
            groups.push(merged);
        }
        let mut swaps = HashMap::new();
        for g in &groups {
            for w in g {
                swaps.insert(*w, g.iter().filter(|o| *o != w).copied().collect());
            }
        }
        Monoid {
            presentation,
            limits,
            swaps,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn limits(&self) -> OracleLimits {
        self.limits
    }

    pub fn rank(&self) -> usize {
        self.presentation.rank()
    }

    /// Number of memoized words.
    pub fn memo_size(&self) -> usize {
        self.memo.read().unwrap().len()
    }

    fn check_word(&self, w: &[Letter]) -> Result<()> {
        if w.len() > self.limits.element_length {
            return Err(Error::LengthCapExceeded {
                len: w.len(),
                cap: self.limits.element_length,
            });
        }
        if let Some(&bad) = w.iter().find(|&&l| l >= self.rank()) {
            return Err(Error::UnknownLetter(bad));
        }
        Ok(())
    }

    /// The congruence class of `w`, memoized.
    pub fn class(&self, w: &[Letter]) -> Result<Arc<Class>> {
        if let Some(c) = self.memo.read().unwrap().get(w) {
            return Ok(c.clone());
        }
        self.check_word(w)?;
        let members = self.closure(w)?;
        let mut words: Vec<Word> = members.iter().cloned().collect();
        words.sort();
        let class = Arc::new(Class { words, members });
        let mut memo = self.memo.write().unwrap();
        if let Some(c) = memo.get(w) {
            return Ok(c.clone());
        }
        for word in class.words.iter() {
            memo.insert(word.clone(), class.clone());
        }
        Ok(class)
    }

    fn closure(&self, w: &[Letter]) -> Result<HashSet<Word>> {
        let start = Word::from(w);
        let mut seen: HashSet<Word> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back(start);
        while let Some(cur) = queue.pop_front() {
            for i in 0..cur.len().saturating_sub(1) {
                let Some(alts) = self.swaps.get(&[cur[i], cur[i + 1]]) else {
                    continue;
                };
                for alt in alts {
                    let mut next = cur.clone().into_letters();
                    next[i] = alt[0];
                    next[i + 1] = alt[1];
                    let next = Word::from(next);
                    if !seen.contains(&next) {
                        if seen.len() >= self.limits.class_size {
                            return Err(Error::ClassCapExceeded {
                                cap: self.limits.class_size,
                            });
                        }
                        seen.insert(next.clone());
                        queue.push_back(next);
                    }
                }
            }
        }
        Ok(seen)
    }

    /// All words congruent to `w`, sorted.
    pub fn congruence_class(&self, w: &[Letter]) -> Result<Vec<Word>> {
        Ok(self.class(w)?.words.clone())
    }

    /// The element `w̄`.
    pub fn element(&self, w: &[Letter]) -> Result<Element> {
        if w.len() <= 1 {
            self.check_word(w)?;
            return Ok(Element {
                canonical: Word::from(w),
            });
        }
        Ok(Element {
            canonical: self.class(w)?.canonical().clone(),
        })
    }

    pub fn generator(&self, letter: Letter) -> Element {
        Element {
            canonical: Word::new(vec![letter]),
        }
    }

    pub fn equal(&self, u: &[Letter], v: &[Letter]) -> Result<bool> {
        if u.len() != v.len() {
            return Ok(false);
        }
        if u == v {
            return Ok(true);
        }
        Ok(self.class(u)?.contains(v))
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element> {
        self.element(&a.canonical.concat(&b.canonical))
    }

    pub fn product<'a>(&self, factors: impl IntoIterator<Item = &'a Element>) -> Result<Element> {
        let mut w = Word::empty();
        for f in factors {
            w = w.concat(&f.canonical);
        }
        self.element(&w)
    }

    /// Elements `p` of length `k` such that some word of `class(a)` starts
    /// with a word of `p`. This set is a union of classes.
    fn prefix_elements(&self, a: &Element, k: usize) -> Result<Vec<Element>> {
        let class = self.class(&a.canonical)?;
        let prefixes: BTreeSet<&[Letter]> = class.words.iter().map(|w| &w[..k]).collect();
        let mut out: BTreeSet<Element> = BTreeSet::new();
        for p in prefixes {
            out.insert(self.element(p)?);
        }
        Ok(out.into_iter().collect())
    }

    fn suffix_elements(&self, a: &Element, k: usize) -> Result<Vec<Element>> {
        let class = self.class(&a.canonical)?;
        let n = a.len();
        let suffixes: BTreeSet<&[Letter]> = class.words.iter().map(|w| &w[n - k..]).collect();
        let mut out: BTreeSet<Element> = BTreeSet::new();
        for s in suffixes {
            out.insert(self.element(s)?);
        }
        Ok(out.into_iter().collect())
    }

    /// Whether `b` is a left divisor of `a`, i.e. `a = b·d` for some `d`.
    pub fn is_left_divisor(&self, b: &Element, a: &Element) -> Result<bool> {
        if b.len() > a.len() {
            return Ok(false);
        }
        if b.is_one() {
            return Ok(true);
        }
        let bc = self.class(&b.canonical)?;
        let ac = self.class(&a.canonical)?;
        Ok(ac.words.iter().any(|w| bc.contains(&w[..b.len()])))
    }

    /// Whether `b` is a right divisor of `a`, i.e. `a = e·b` for some `e`.
    pub fn is_right_divisor(&self, b: &Element, a: &Element) -> Result<bool> {
        if b.len() > a.len() {
            return Ok(false);
        }
        if b.is_one() {
            return Ok(true);
        }
        let bc = self.class(&b.canonical)?;
        let ac = self.class(&a.canonical)?;
        let k = a.len() - b.len();
        Ok(ac.words.iter().any(|w| bc.contains(&w[k..])))
    }

    fn not_divisor(&self, b: &Element, a: &Element) -> Error {
        Error::NotDivisor {
            divisor: self.show(b),
            element: self.show(a),
        }
    }

    /// The `e` with `e·b = a`.
    pub fn right_quotient(&self, a: &Element, b: &Element) -> Result<Element> {
        if b.is_one() {
            return Ok(a.clone());
        }
        if b.len() <= a.len() {
            let bc = self.class(&b.canonical)?;
            let ac = self.class(&a.canonical)?;
            let k = a.len() - b.len();
            if let Some(w) = ac.words.iter().find(|w| bc.contains(&w[k..])) {
                return self.element(&w[..k]);
            }
        }
        Err(self.not_divisor(b, a))
    }

    /// The `d` with `b·d = a`.
    pub fn left_quotient(&self, a: &Element, b: &Element) -> Result<Element> {
        if b.is_one() {
            return Ok(a.clone());
        }
        if b.len() <= a.len() {
            let bc = self.class(&b.canonical)?;
            let ac = self.class(&a.canonical)?;
            if let Some(w) = ac.words.iter().find(|w| bc.contains(&w[..b.len()])) {
                return self.element(&w[b.len()..]);
            }
        }
        Err(self.not_divisor(b, a))
    }

    /// All left divisors of `a`, sorted by length then canonical word.
    pub fn left_divisors(&self, a: &Element) -> Result<Vec<Element>> {
        let mut out = Vec::new();
        for k in 0..=a.len() {
            out.extend(self.prefix_elements(a, k)?);
        }
        Ok(out)
    }

    /// All right divisors of `a`, sorted by length then canonical word.
    pub fn right_divisors(&self, a: &Element) -> Result<Vec<Element>> {
        let mut out = Vec::new();
        for k in 0..=a.len() {
            out.extend(self.suffix_elements(a, k)?);
        }
        Ok(out)
    }

    /// Right divisors of `a` of length exactly `k`.
    pub fn right_divisors_of_length(&self, a: &Element, k: usize) -> Result<Vec<Element>> {
        if k > a.len() {
            return Ok(Vec::new());
        }
        self.suffix_elements(a, k)
    }

    /// Generators that right-divide `a` (the last letters of its class).
    pub fn right_irreducible_divisors(&self, a: &Element) -> Result<Vec<Letter>> {
        if a.is_one() {
            return Ok(Vec::new());
        }
        let class = self.class(&a.canonical)?;
        let set: BTreeSet<Letter> = class.words.iter().map(|w| w[w.len() - 1]).collect();
        Ok(set.into_iter().collect())
    }

    /// Generators that left-divide `a`.
    pub fn left_irreducible_divisors(&self, a: &Element) -> Result<Vec<Letter>> {
        if a.is_one() {
            return Ok(Vec::new());
        }
        let class = self.class(&a.canonical)?;
        let set: BTreeSet<Letter> = class.words.iter().map(|w| w[0]).collect();
        Ok(set.into_iter().collect())
    }

    /// Distinct elements of length exactly `n`.
    pub fn elements_of_length(&self, n: usize) -> Result<Vec<Element>> {
        let r = self.rank();
        let mut out: BTreeSet<Element> = BTreeSet::new();
        let mut seen: HashSet<Word> = HashSet::new();
        for w in all_words(r, n) {
            if seen.contains(&w) {
                continue;
            }
            let class = self.class(&w)?;
            seen.extend(class.words.iter().cloned());
            out.insert(Element {
                canonical: class.canonical().clone(),
            });
        }
        Ok(out.into_iter().collect())
    }

    /// Distinct elements of length at most `n`, shortest first.
    pub fn elements_up_to(&self, n: usize) -> Result<Vec<Element>> {
        let mut out = Vec::new();
        for k in 0..=n {
            out.extend(self.elements_of_length(k)?);
        }
        Ok(out)
    }

    /// The right lcm of `set`.
    ///
    /// Returns `None` when no common right multiple exists up to the search
    /// cap (the sum of the lengths). For a set of distinct generators only
    /// the length `|set|` is searched.
    pub fn right_lcm(&self, set: &[Element]) -> Result<Option<Element>> {
        let mut set: Vec<Element> = set.to_vec();
        set.sort();
        set.dedup();
        set.retain(|e| !e.is_one());
        let Some(longest) = set.iter().max_by_key(|e| e.len()) else {
            return Ok(Some(Element::one()));
        };
        if set.len() == 1 {
            return Ok(Some(set[0].clone()));
        }
        let atoms = set.iter().all(|e| e.len() == 1);
        let (lo, hi) = if atoms {
            (set.len(), set.len())
        } else {
            (longest.len(), set.iter().map(|e| e.len()).sum())
        };
        let hi = hi.min(self.limits.element_length);
        let base = longest.clone();
        for n in lo..=hi {
            let mut found: BTreeSet<Element> = BTreeSet::new();
            for tail in all_words(self.rank(), n - base.len()) {
                let cand = self.element(&base.canonical.concat(&tail))?;
                if found.contains(&cand) {
                    continue;
                }
                let mut ok = true;
                for s in &set {
                    if !self.is_left_divisor(s, &cand)? {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    found.insert(cand);
                }
            }
            match found.len() {
                0 => continue,
                1 => return Ok(found.into_iter().next()),
                k => return Err(Error::LcmAmbiguous(k)),
            }
        }
        Ok(None)
    }

    /// The left gcd of `a` and `b`, by intersecting left-divisor sets.
    pub fn left_gcd(&self, a: &Element, b: &Element) -> Result<Element> {
        let da: HashSet<Element> = self.left_divisors(a)?.into_iter().collect();
        let common: Vec<Element> = self
            .left_divisors(b)?
            .into_iter()
            .filter(|d| da.contains(d))
            .collect();
        let top = common.iter().map(|d| d.len()).max().unwrap_or(0);
        let maximal: Vec<&Element> = common.iter().filter(|d| d.len() == top).collect();
        if maximal.len() != 1 {
            return Err(Error::GcdNotUnique(maximal.len()));
        }
        Ok(maximal[0].clone())
    }

    /// The left gcd of `a` and `b`, peeling off common leading generators.
    ///
    /// Agrees with [`Monoid::left_gcd`] whenever gcds exist and cancellation
    /// holds, since then `(xa′) ∧ (xb′) = x·(a′ ∧ b′)`.
    pub fn left_gcd_by_atoms(&self, a: &Element, b: &Element) -> Result<Element> {
        let (mut a, mut b) = (a.clone(), b.clone());
        let mut g = Word::empty();
        loop {
            let la = self.left_irreducible_divisors(&a)?;
            let lb = self.left_irreducible_divisors(&b)?;
            let Some(&x) = la.iter().find(|x| lb.contains(x)) else {
                return self.element(&g);
            };
            let x = self.generator(x);
            a = self.left_quotient(&a, &x)?;
            b = self.left_quotient(&b, &x)?;
            g = g.concat(&x.canonical);
        }
    }

    /// Renders an element by its canonical word.
    pub fn show(&self, a: &Element) -> String {
        self.presentation.render_compact(&a.canonical)
    }
}

/// All words of length `n` over `rank` letters, in lexicographic order.
pub fn all_words(rank: usize, n: usize) -> impl Iterator<Item = Word> {
    let total = if rank == 0 {
        usize::from(n == 0)
    } else {
        rank.checked_pow(n as u32).expect("word enumeration overflow")
    };
    (0..total).map(move |mut idx| {
        let mut w = vec![0; n];
        for slot in w.iter_mut().rev() {
            *slot = idx % rank;
            idx /= rank;
        }
        Word::new(w)
    })
}

/// All words of length at most `n`, shortest first.
pub fn all_words_up_to(rank: usize, n: usize) -> impl Iterator<Item = Word> {
    (0..=n).flat_map(move |k| all_words(rank, k))
}
