//! Finite posets of left divisors `↓(a)` and the lattice tests run on them.

use std::collections::HashMap;

use crate::error::Result;
use crate::monoid::{Element, Monoid};

/// The poset `↓(a)` of left divisors of `a`, ordered by left divisibility.
///
/// `join[i][j]` / `meet[i][j]` hold the least upper / greatest lower bound
/// when one exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorLattice {
    carrier: Vec<Element>,
    leq: Vec<Vec<bool>>,
    join: Vec<Vec<Option<usize>>>,
    meet: Vec<Vec<Option<usize>>>,
}

impl DivisorLattice {
    /// Builds the bound tables from a reflexive, transitive order.
    pub fn from_order(carrier: Vec<Element>, leq: Vec<Vec<bool>>) -> Self {
        let n = carrier.len();
        assert_eq!(leq.len(), n);
        let bound = |upper: bool, i: usize, j: usize| -> Option<usize> {
            let bounds: Vec<usize> = (0..n)
                .filter(|&k| {
                    if upper {
                        leq[i][k] && leq[j][k]
                    } else {
                        leq[k][i] && leq[k][j]
                    }
                })
                .collect();
            bounds.iter().copied().find(|&k| {
                bounds
                    .iter()
                    .all(|&o| if upper { leq[k][o] } else { leq[o][k] })
            })
        };
        let join = (0..n)
            .map(|i| (0..n).map(|j| bound(true, i, j)).collect())
            .collect();
        let meet = (0..n)
            .map(|i| (0..n).map(|j| bound(false, i, j)).collect())
            .collect();
        DivisorLattice {
            carrier,
            leq,
            join,
            meet,
        }
    }

    pub fn carrier(&self) -> &[Element] {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn index_of(&self, e: &Element) -> Option<usize> {
        self.carrier.iter().position(|c| c == e)
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn join(&self, i: usize, j: usize) -> Option<usize> {
        self.join[i][j]
    }

    pub fn meet(&self, i: usize, j: usize) -> Option<usize> {
        self.meet[i][j]
    }

    /// Whether every pair has a join and a meet.
    pub fn is_lattice(&self) -> bool {
        self.join.iter().flatten().all(Option::is_some)
            && self.meet.iter().flatten().all(Option::is_some)
    }

    /// Checks `a ∧ (b ∨ c) = (a ∧ b) ∨ (a ∧ c)` over all triples.
    /// Returns `false` when the poset is not a lattice.
    pub fn is_distributive(&self) -> bool {
        self.distributivity_witness().is_none() && self.is_lattice()
    }

    /// A triple violating distributivity, if any.
    pub fn distributivity_witness(&self) -> Option<(usize, usize, usize)> {
        if !self.is_lattice() {
            return None;
        }
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let lhs = self.meet[a][self.join[b][c].unwrap()].unwrap();
                    let rhs = self.join[self.meet[a][b].unwrap()][self.meet[a][c].unwrap()].unwrap();
                    if lhs != rhs {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    /// Maximum antichain size, via Dilworth: `n` minus a maximum matching in
    /// the bipartite graph of strict comparabilities.
    pub fn width(&self) -> usize {
        let n = self.len();
        let succ: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| i != j && self.leq[i][j]).collect())
            .collect();
        let mut matched_to: Vec<Option<usize>> = vec![None; n];
        let mut matching = 0;
        for u in 0..n {
            let mut visited = vec![false; n];
            if augment(u, &succ, &mut matched_to, &mut visited) {
                matching += 1;
            }
        }
        n - matching
    }
}

fn augment(
    u: usize,
    succ: &[Vec<usize>],
    matched_to: &mut [Option<usize>],
    visited: &mut [bool],
) -> bool {
    for &v in &succ[u] {
        if visited[v] {
            continue;
        }
        visited[v] = true;
        if matched_to[v].is_none() || augment(matched_to[v].unwrap(), succ, matched_to, visited) {
            matched_to[v] = Some(u);
            return true;
        }
    }
    false
}

impl Monoid {
    /// Builds `↓(a)`.
    ///
    /// The order is the reflexive-transitive closure of the prefix chains of
    /// the words in the class of `a`: whenever `b ≤ c ≤ a`, some word of `a`
    /// passes through `b` and then `c`.
    pub fn divisor_lattice(&self, a: &Element) -> Result<DivisorLattice> {
        let carrier = self.left_divisors(a)?;
        let n = carrier.len();
        let index: HashMap<&Element, usize> = carrier.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        let class = self.class(a.canonical())?;
        let mut prefix_index: HashMap<&[usize], usize> = HashMap::new();
        for w in class.words() {
            let mut prev: Option<usize> = None;
            for k in 0..=w.len() {
                let p = &w[..k];
                let idx = match prefix_index.get(p) {
                    Some(&i) => i,
                    None => {
                        let i = index[&self.element(p)?];
                        prefix_index.insert(p, i);
                        i
                    }
                };
                if let Some(q) = prev {
                    leq[q][idx] = true;
                }
                prev = Some(idx);
            }
        }
        // Warshall closure; the carrier is sorted by length so covers go upward.
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    let through = leq[k].clone();
                    for (slot, &r) in leq[i].iter_mut().zip(&through) {
                        *slot |= r;
                    }
                }
            }
        }
        Ok(DivisorLattice::from_order(carrier, leq))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{parse_presentation, Presentation, Word};

    fn fake(n: usize) -> Vec<Element> {
        (0..n)
            .map(|i| Element {
                canonical: Word::new(vec![0; i]),
            })
            .collect()
    }

    fn from_covers(n: usize, covers: &[(usize, usize)]) -> DivisorLattice {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in covers {
            leq[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if leq[i][k] && leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
        DivisorLattice::from_order(fake(n), leq)
    }

    fn brute_width(l: &DivisorLattice) -> usize {
        let n = l.len();
        (0u32..1 << n)
            .filter(|mask| {
                (0..n).all(|i| {
                    (0..n).all(|j| {
                        i == j || mask & (1 << i) == 0 || mask & (1 << j) == 0 || !l.leq(i, j)
                    })
                })
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn chain_is_distributive_width_one() {
        let chain = from_covers(4, &[(0, 1), (1, 2), (2, 3)]);
        assert!(chain.is_lattice());
        assert!(chain.is_distributive());
        assert_eq!(chain.width(), 1);
    }

    #[test]
    fn diamond_m3_is_not_distributive() {
        let m3 = from_covers(5, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]);
        assert!(m3.is_lattice());
        assert!(!m3.is_distributive());
        assert!(m3.distributivity_witness().is_some());
        assert_eq!(m3.width(), 3);
    }

    #[test]
    fn pentagon_n5_is_not_distributive() {
        let n5 = from_covers(5, &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)]);
        assert!(n5.is_lattice());
        assert!(!n5.is_distributive());
        assert_eq!(n5.width(), brute_width(&n5));
    }

    #[test]
    fn non_lattice_poset() {
        // two incomparable maximal elements over a common bottom
        let v = from_covers(3, &[(0, 1), (0, 2)]);
        assert!(!v.is_lattice());
        assert!(!v.is_distributive());
        assert_eq!(v.join(1, 2), None);
        assert_eq!(v.meet(1, 2), Some(0));
    }

    #[test]
    fn square_from_monoid() {
        let mon = Monoid::new(parse_presentation("generators: x y z\nrel: x y = y z").unwrap());
        let w = mon.element(&[0, 1]).unwrap();
        let l = mon.divisor_lattice(&w).unwrap();
        let shown: Vec<String> = l.carrier().iter().map(|e| mon.show(e)).collect();
        assert_eq!(shown, ["ε", "x", "y", "xy"]);
        assert!(l.is_lattice() && l.is_distributive());
        assert_eq!(l.width(), 2);
        let x = l.index_of(&mon.generator(0)).unwrap();
        let y = l.index_of(&mon.generator(1)).unwrap();
        assert_eq!(l.join(x, y), l.index_of(&w));
        assert_eq!(l.meet(x, y), Some(0));
    }

    #[test]
    fn identity_lattice() {
        let mon = Monoid::new(Presentation::free(["x"]).unwrap());
        let l = mon.divisor_lattice(&Element::one()).unwrap();
        assert_eq!(l.len(), 1);
        assert!(l.is_distributive());
        assert_eq!(l.width(), 1);
    }

    #[test]
    fn width_matches_brute_force_on_cyclic_monoid() {
        let mon = Monoid::new(
            parse_presentation("generators: x y z\nrel: x x = y z\nrel: y y = z x\nrel: z z = x y")
                .unwrap(),
        );
        for n in 1..=4 {
            let l = mon.divisor_lattice(&mon.element(&vec![0; n]).unwrap()).unwrap();
            if l.len() <= 20 {
                assert_eq!(l.width(), brute_width(&l), "n = {n}");
            }
        }
    }
}
