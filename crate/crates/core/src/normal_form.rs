//! Right normal forms `N(a) = h_p ⋯ h_1` over the hypercube alphabet.
//!
//! `h_1 = h(a)`, `h_2 = h(a / h_1)`, … The local characterization (a word of
//! cubes is normal iff each adjacent pair is) makes the language regular, and
//! the incremental updates for `y·a` and `a·z` keep the form within one
//! extra factor of the original.

use std::fmt;

use crate::error::{Error, Result};
use crate::hypercube::{parse_atoms, render_atoms, CubeId, DivisibilityMonoid, HypercubeTable};
use crate::monoid::Element;
use crate::presentation::Presentation;

/// Non-trivial cubes, most significant factor first. Empty means `1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalWord {
    pub factors: Vec<CubeId>,
}

impl NormalWord {
    pub fn one() -> Self {
        NormalWord::default()
    }

    pub fn new(factors: Vec<CubeId>) -> Self {
        NormalWord { factors }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The last `t` factors (all of them when `t ≥ len`).
    pub fn suffix(&self, t: usize) -> &[CubeId] {
        &self.factors[self.factors.len().saturating_sub(t)..]
    }

    /// The first `t` factors (all of them when `t ≥ len`).
    pub fn prefix(&self, t: usize) -> &[CubeId] {
        &self.factors[..t.min(self.factors.len())]
    }

    /// Total length as an element.
    pub fn element_len(&self, table: &HypercubeTable) -> usize {
        self.factors.iter().map(|&c| table.get(c).len()).sum()
    }

    /// Renders as `factor.factor…`, or `1`.
    pub fn render(&self, p: &Presentation, table: &HypercubeTable) -> String {
        render_factors(p.generators(), &self.factors, |c| &table.get(c).atoms)
    }

    /// Parses `factor(.factor)*` or `1`.
    pub fn parse(p: &Presentation, table: &HypercubeTable, text: &str) -> Result<Self> {
        let t = text.trim();
        if t == "1" || t.is_empty() {
            return Ok(NormalWord::one());
        }
        let mut factors = Vec::new();
        for part in t.split('.') {
            let atoms = parse_atoms(p.generators(), part)?;
            let id = table
                .by_atoms(&atoms)
                .ok_or_else(|| Error::NotHypercube(part.trim().to_string()))?;
            if id.is_trivial() {
                return Err(Error::NotNormal(format!("trivial factor in `{t}`")));
            }
            factors.push(id);
        }
        Ok(NormalWord { factors })
    }
}

pub(crate) fn render_factors<'a>(
    generators: &[String],
    factors: &[CubeId],
    atoms: impl Fn(CubeId) -> &'a Vec<usize>,
) -> String {
    if factors.is_empty() {
        return "1".to_string();
    }
    factors
        .iter()
        .map(|&c| render_atoms(generators, atoms(c)))
        .collect::<Vec<_>>()
        .join(".")
}

impl fmt::Display for NormalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.factors.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", ids.join(" "))
    }
}

/// Result of a directed-distance query, exact up to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Zero,
    One,
    AtLeastTwo,
}

impl Distance {
    pub fn as_bound(self) -> usize {
        match self {
            Distance::Zero => 0,
            Distance::One => 1,
            Distance::AtLeastTwo => 2,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Zero => f.write_str("0"),
            Distance::One => f.write_str("1"),
            Distance::AtLeastTwo => f.write_str("≥2"),
        }
    }
}

/// Intermediate values of an incremental update.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateTrace {
    pub result: NormalWord,
    /// The carried cubes `y_m … y_0` (left) or `z_0 … z_m` (right).
    pub carries: Vec<CubeId>,
    /// The factors before trivial ones are dropped.
    pub raw_factors: Vec<CubeId>,
    /// Whether a trivial factor appeared anywhere other than the boundary
    /// slot the update is allowed to leave empty.
    pub interior_trivial: bool,
}

impl DivisibilityMonoid {
    /// Product of the cubes' elements.
    pub fn evaluate(&self, factors: &[CubeId]) -> Result<Element> {
        self.monoid()
            .product(factors.iter().map(|&c| self.cube_element(c)))
    }

    /// Greedy right-to-left extraction of maximal hypercubes.
    pub fn normalize_oracle(&self, a: &Element) -> Result<NormalWord> {
        let mut rest = a.clone();
        let mut factors = Vec::new();
        while !rest.is_one() {
            let h = self.max_hypercube(&rest)?;
            rest = self.monoid().right_quotient(&rest, self.cube_element(h))?;
            factors.push(h);
        }
        factors.reverse();
        Ok(NormalWord { factors })
    }

    pub fn is_normal_pair(&self, a: CubeId, b: CubeId) -> Result<bool> {
        if a.is_trivial() || b.is_trivial() {
            return Ok(false);
        }
        Ok(self.h_of_product(a, b)? == b)
    }

    pub fn is_normal_word(&self, factors: &[CubeId]) -> Result<bool> {
        if factors.iter().any(|c| c.is_trivial()) {
            return Ok(false);
        }
        for pair in factors.windows(2) {
            if !self.is_normal_pair(pair[0], pair[1])? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn cube_of(&self, e: &Element) -> Result<CubeId> {
        self.table()
            .by_element(e)
            .ok_or_else(|| Error::NotHypercube(self.monoid().show(e)))
    }

    /// Normal form of `y·a` from `N(a)`.
    ///
    /// `y_m = y`, `y_{i-1} = h(y_i·h_i)`, `y_i·h_i = h′_i·y_{i-1}`; the result
    /// is `h′_m ⋯ h′_1 · y_0` with trivial factors dropped.
    pub fn left_mult_trace(&self, y: CubeId, f: &NormalWord) -> Result<UpdateTrace> {
        let m = self.monoid();
        let mut carry = y;
        let mut carries = vec![y];
        let mut raw = Vec::with_capacity(f.len() + 1);
        // factors[0] is h_m
        for &h in &f.factors {
            let prod = m.mul(self.cube_element(carry), self.cube_element(h))?;
            let next = self.max_hypercube(&prod)?;
            let left = m.right_quotient(&prod, self.cube_element(next))?;
            raw.push(self.cube_of(&left)?);
            carry = next;
            carries.push(carry);
        }
        raw.push(carry);
        let interior_trivial = raw.iter().skip(1).any(|c| c.is_trivial());
        let result = NormalWord {
            factors: raw.iter().copied().filter(|c| !c.is_trivial()).collect(),
        };
        Ok(UpdateTrace {
            result,
            carries,
            raw_factors: raw,
            interior_trivial,
        })
    }

    pub fn left_mult_update(&self, y: CubeId, f: &NormalWord) -> Result<NormalWord> {
        Ok(self.left_mult_trace(y, f)?.result)
    }

    /// Normal form of `a·z` from `N(a)`.
    ///
    /// `z_0 = z`, `h″_i = h(h_i·z_{i-1})`, `z_i·h″_i = h_i·z_{i-1}`; the
    /// result is `z_m · h″_m ⋯ h″_1` with a trivial `z_m` dropped.
    pub fn right_mult_trace(&self, f: &NormalWord, z: CubeId) -> Result<UpdateTrace> {
        let m = self.monoid();
        let mut carry = z;
        let mut carries = vec![z];
        let mut raw = Vec::with_capacity(f.len() + 1);
        for &h in f.factors.iter().rev() {
            let prod = m.mul(self.cube_element(h), self.cube_element(carry))?;
            let right = self.max_hypercube(&prod)?;
            let left = m.right_quotient(&prod, self.cube_element(right))?;
            raw.push(right);
            carry = self.cube_of(&left)?;
            carries.push(carry);
        }
        raw.push(carry);
        raw.reverse();
        let interior_trivial = raw.iter().skip(1).any(|c| c.is_trivial());
        let result = NormalWord {
            factors: raw.iter().copied().filter(|c| !c.is_trivial()).collect(),
        };
        Ok(UpdateTrace {
            result,
            carries,
            raw_factors: raw,
            interior_trivial,
        })
    }

    pub fn right_mult_update(&self, f: &NormalWord, z: CubeId) -> Result<NormalWord> {
        Ok(self.right_mult_trace(f, z)?.result)
    }

    /// `d_H(a, b)` up to 1: `b = h·a` or `a = h·b` for a single cube `h`.
    pub fn bounded_distance_left(&self, a: &Element, b: &Element) -> Result<Distance> {
        if a == b {
            return Ok(Distance::Zero);
        }
        let (small, big) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        if big.len() - small.len() > self.table().max_len() || big.len() == small.len() {
            return Ok(Distance::AtLeastTwo);
        }
        let m = self.monoid();
        if m.is_right_divisor(small, big)? {
            let q = m.right_quotient(big, small)?;
            if self.table().by_element(&q).is_some() {
                return Ok(Distance::One);
            }
        }
        Ok(Distance::AtLeastTwo)
    }

    /// `d^H(a, b)` up to 1: `b = a·h` or `a = b·h` for a single cube `h`.
    pub fn bounded_distance_right(&self, a: &Element, b: &Element) -> Result<Distance> {
        if a == b {
            return Ok(Distance::Zero);
        }
        let (small, big) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        if big.len() - small.len() > self.table().max_len() || big.len() == small.len() {
            return Ok(Distance::AtLeastTwo);
        }
        let m = self.monoid();
        if m.is_left_divisor(small, big)? {
            let q = m.left_quotient(big, small)?;
            if self.table().by_element(&q).is_some() {
                return Ok(Distance::One);
            }
        }
        Ok(Distance::AtLeastTwo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::all_words_up_to;
    use crate::presentation::parse_presentation;

    const SHIFT: &str = "generators: x y z\nrel: x y = y z";
    const TWO: &str = "generators: x y z\nrel: x x = y z\nrel: y x = z z";
    const CYCLIC: &str = "generators: x y z\nrel: x x = y z\nrel: y y = z x\nrel: z z = x y";

    fn dm(text: &str) -> DivisibilityMonoid {
        DivisibilityMonoid::new(parse_presentation(text).unwrap()).unwrap()
    }

    fn el(d: &DivisibilityMonoid, s: &str) -> Element {
        let w = d.presentation().parse_word(s).unwrap();
        d.monoid().element(&w).unwrap()
    }

    fn nw(d: &DivisibilityMonoid, s: &str) -> NormalWord {
        NormalWord::parse(d.presentation(), d.table(), s).unwrap()
    }

    fn show(d: &DivisibilityMonoid, n: &NormalWord) -> String {
        n.render(d.presentation(), d.table())
    }

    #[test]
    fn oracle_examples() {
        let b = dm(TWO);
        assert!(b.normalize_oracle(&Element::one()).unwrap().is_empty());
        let n = b.normalize_oracle(&el(&b, "yzyxxz")).unwrap();
        // x² = yz has atoms {x, y}; z² = yx has atoms {y, z}
        assert_eq!(show(&b, &n), "[x y].y.y.[y z]");
        let a = dm(SHIFT);
        assert_eq!(show(&a, &a.normalize_oracle(&el(&a, "xy")).unwrap()), "[x y]");
    }

    #[test]
    fn normal_pairs_and_words() {
        let free = dm("generators: x");
        assert!(free.is_normal_pair(CubeId(1), CubeId(1)).unwrap());
        let a = dm(SHIFT);
        let x = a.parse_cube("x").unwrap();
        let w = a.parse_cube("[x y]").unwrap();
        assert!(a.is_normal_pair(x, w).unwrap());
        let c = dm(CYCLIC);
        assert!(!c
            .is_normal_pair(c.parse_cube("[x z]").unwrap(), c.parse_cube("x").unwrap())
            .unwrap());

        assert!(a.is_normal_word(&[w]).unwrap());
        let b = dm(TWO);
        assert!(b.is_normal_word(&nw(&b, "[x y].y.y.[y z]").factors).unwrap());
        // w·x = xyx; its class is {xyx, yzx}, so h(xyx) = x and [w, x] is normal
        let verdict = a.is_normal_word(&[w, x]).unwrap();
        let oracle = a.normalize_oracle(&el(&a, "xyx")).unwrap();
        assert_eq!(verdict, oracle.factors == [w, x]);
        assert!(verdict);
    }

    #[test]
    fn update_examples() {
        let a = dm(SHIFT);
        let y = a.parse_cube("y").unwrap();
        let z = a.parse_cube("z").unwrap();
        assert_eq!(a.left_mult_update(CubeId::TRIVIAL, &nw(&a, "y.x")).unwrap(), nw(&a, "y.x"));
        assert_eq!(a.left_mult_update(y, &nw(&a, "x")).unwrap(), nw(&a, "y.x"));
        assert_eq!(a.right_mult_update(&nw(&a, "y.x"), CubeId::TRIVIAL).unwrap(), nw(&a, "y.x"));
        assert_eq!(a.right_mult_update(&nw(&a, "[x y]"), z).unwrap(), nw(&a, "x.[x y]"));
    }

    #[test]
    fn updates_agree_with_oracle() {
        for text in [SHIFT, TWO, CYCLIC] {
            let d = dm(text);
            let m = d.monoid();
            for w in all_words_up_to(3, 4) {
                let a = m.element(&w).unwrap();
                let n = d.normalize_oracle(&a).unwrap();
                for c in d.table().ids() {
                    let ce = d.cube_element(c);
                    let ya = d.normalize_oracle(&m.mul(ce, &a).unwrap()).unwrap();
                    assert_eq!(d.left_mult_update(c, &n).unwrap(), ya);
                    let az = d.normalize_oracle(&m.mul(&a, ce).unwrap()).unwrap();
                    assert_eq!(d.right_mult_update(&n, c).unwrap(), az);
                }
            }
        }
    }

    #[test]
    fn distances() {
        let a = dm(SHIFT);
        let xy = el(&a, "xy");
        assert_eq!(a.bounded_distance_left(&xy, &xy).unwrap(), Distance::Zero);
        assert_eq!(
            a.bounded_distance_right(&xy, &el(&a, "xyz")).unwrap(),
            Distance::One
        );
        assert_eq!(
            a.bounded_distance_left(&el(&a, "yz"), &el(&a, "xyz")).unwrap(),
            Distance::One
        );
        assert_eq!(
            a.bounded_distance_left(&el(&a, "x"), &el(&a, "xxxx")).unwrap(),
            Distance::AtLeastTwo
        );
        assert_eq!(
            a.bounded_distance_right(&el(&a, "x"), &el(&a, "y")).unwrap(),
            Distance::AtLeastTwo
        );
    }

    #[test]
    fn parse_rejects_non_cubes() {
        let a = dm(SHIFT);
        assert!(NormalWord::parse(a.presentation(), a.table(), "[x z]").is_err());
        assert!(NormalWord::parse(a.presentation(), a.table(), "x.1").is_err());
        assert_eq!(nw(&a, "1"), NormalWord::one());
        assert_eq!(show(&a, &NormalWord::one()), "1");
    }
}
