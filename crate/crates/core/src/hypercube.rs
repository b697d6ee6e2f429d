//! Hypercubes, the maximal-hypercube map `h`, and the graph of hypercubes.
//!
//! A hypercube is the right lcm of a set of generators; its left divisors
//! form a Boolean lattice. Every element `a` is right-divided by a unique
//! maximal hypercube `h(a)`, and `h(ab) = h(h(a)b)`. Everything downstream
//! (normal forms, transducers, multiplier automata) is driven by `h`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::axioms::{check_all, CheckReport};
use crate::error::{Error, Result};
use crate::monoid::{Element, Monoid};
use crate::presentation::{Letter, Presentation};

/// Index into a [`HypercubeTable`]. `CubeId(0)` is the trivial cube `1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CubeId(pub usize);

impl CubeId {
    pub const TRIVIAL: CubeId = CubeId(0);

    pub fn index(self) -> usize {
        self.0
    }

    pub fn is_trivial(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for CubeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypercube {
    pub id: CubeId,
    /// Sorted generators whose right lcm this cube is.
    pub atoms: Vec<Letter>,
    pub element: Element,
}

impl Hypercube {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// The finite set `H` of hypercubes, ordered by (length, atom set).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypercubeTable {
    cubes: Vec<Hypercube>,
    by_atoms: HashMap<Vec<Letter>, CubeId>,
    by_element: HashMap<Element, CubeId>,
    /// `generator_cube[x]` is the 1-cube `{x}`.
    generator_cube: Vec<CubeId>,
}

impl HypercubeTable {
    /// Builds a table from hypercubes given as (atoms, element) pairs.
    /// Sorts them and assigns ids.
    pub fn from_cubes(rank: usize, mut cubes: Vec<(Vec<Letter>, Element)>) -> Result<Self> {
        for (atoms, _) in cubes.iter_mut() {
            atoms.sort();
        }
        cubes.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
        if cubes.first().map(|c| c.0.is_empty()) != Some(true) {
            return Err(Error::InvalidMonoid("missing trivial cube".into()));
        }
        let mut by_atoms = HashMap::new();
        let mut by_element = HashMap::new();
        let mut out = Vec::with_capacity(cubes.len());
        for (i, (atoms, element)) in cubes.into_iter().enumerate() {
            let id = CubeId(i);
            if by_atoms.insert(atoms.clone(), id).is_some() {
                return Err(Error::InvalidMonoid(format!("duplicate atom set {atoms:?}")));
            }
            if by_element.insert(element.clone(), id).is_some() {
                return Err(Error::InvalidMonoid(format!(
                    "atom sets {:?} and {:?} have the same lcm",
                    out.iter()
                        .find(|c: &&Hypercube| c.element == element)
                        .map(|c| c.atoms.clone())
                        .unwrap_or_default(),
                    atoms
                )));
            }
            out.push(Hypercube { id, atoms, element });
        }
        let mut generator_cube = Vec::with_capacity(rank);
        for x in 0..rank {
            generator_cube.push(
                *by_atoms
                    .get(&vec![x])
                    .ok_or_else(|| Error::InvalidMonoid(format!("generator {x} has no 1-cube")))?,
            );
        }
        Ok(HypercubeTable {
            cubes: out,
            by_atoms,
            by_element,
            generator_cube,
        })
    }

    pub fn cubes(&self) -> &[Hypercube] {
        &self.cubes
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn get(&self, id: CubeId) -> &Hypercube {
        &self.cubes[id.0]
    }

    pub fn element(&self, id: CubeId) -> &Element {
        &self.cubes[id.0].element
    }

    pub fn ids(&self) -> impl Iterator<Item = CubeId> + '_ {
        (0..self.cubes.len()).map(CubeId)
    }

    pub fn non_trivial(&self) -> impl Iterator<Item = CubeId> + '_ {
        (1..self.cubes.len()).map(CubeId)
    }

    pub fn by_atoms(&self, atoms: &[Letter]) -> Option<CubeId> {
        let mut a = atoms.to_vec();
        a.sort();
        a.dedup();
        self.by_atoms.get(&a).copied()
    }

    pub fn by_element(&self, e: &Element) -> Option<CubeId> {
        self.by_element.get(e).copied()
    }

    pub fn generator(&self, x: Letter) -> CubeId {
        self.generator_cube[x]
    }

    /// Length of the longest cube.
    pub fn max_len(&self) -> usize {
        self.cubes.iter().map(|c| c.len()).max().unwrap_or(0)
    }

    /// The top cube, if one cube contains every generator.
    pub fn top(&self) -> Option<CubeId> {
        self.by_atoms
            .get(&(0..self.generator_cube.len()).collect::<Vec<_>>())
            .copied()
    }

    /// Renders a cube: `1`, a bare generator, or `[x y]` by atom set.
    pub fn render(&self, p: &Presentation, id: CubeId) -> String {
        render_atoms(p.generators(), &self.get(id).atoms)
    }

    /// Parses a cube written as `1`, a generator name, or `[x y …]`.
    pub fn parse_cube(&self, p: &Presentation, text: &str) -> Result<CubeId> {
        let atoms = parse_atoms(p.generators(), text)?;
        self.by_atoms(&atoms)
            .ok_or_else(|| Error::NotHypercube(text.trim().to_string()))
    }
}

/// Renders an atom set in the factor grammar.
pub fn render_atoms(generators: &[String], atoms: &[Letter]) -> String {
    match atoms {
        [] => "1".to_string(),
        [x] => generators[*x].clone(),
        _ => format!(
            "[{}]",
            atoms
                .iter()
                .map(|&a| generators[a].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        ),
    }
}

/// Parses a single factor of the factor grammar into an atom set.
pub fn parse_atoms(generators: &[String], text: &str) -> Result<Vec<Letter>> {
    let t = text.trim();
    let lookup = |name: &str| {
        generators
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    };
    if t == "1" {
        return Ok(Vec::new());
    }
    if let Some(inner) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
        let mut atoms = inner
            .split_whitespace()
            .map(lookup)
            .collect::<Result<Vec<_>>>()?;
        if atoms.is_empty() {
            return Err(Error::UnknownSymbol(t.to_string()));
        }
        atoms.sort();
        atoms.dedup();
        return Ok(atoms);
    }
    Ok(vec![lookup(t)?])
}

/// Subsets of `0..n` in (size, lexicographic) order.
fn subsets(n: usize) -> Vec<Vec<Letter>> {
    let mut all: Vec<Vec<Letter>> = (0u64..1 << n)
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    all.sort_by(|a: &Vec<Letter>, b| (a.len(), a).cmp(&(b.len(), b)));
    all
}

/// Enumerates `H` by taking the right lcm of every subset of generators.
pub fn enumerate_hypercubes(monoid: &Monoid) -> Result<HypercubeTable> {
    let rank = monoid.rank();
    if rank > 20 {
        return Err(Error::InvalidMonoid(format!("{rank} generators is too many to enumerate")));
    }
    let mut cubes = Vec::new();
    for set in subsets(rank) {
        let gens: Vec<Element> = set.iter().map(|&x| monoid.generator(x)).collect();
        if let Some(lcm) = monoid.right_lcm(&gens)? {
            if lcm.len() != set.len() {
                return Err(Error::InvalidMonoid(format!(
                    "lcm of {} generators has length {}",
                    set.len(),
                    lcm.len()
                )));
            }
            cubes.push((set, lcm));
        }
    }
    HypercubeTable::from_cubes(rank, cubes)
}

/// A presentation that passed the axiom check, with its hypercubes.
#[derive(Debug)]
pub struct DivisibilityMonoid {
    monoid: Monoid,
    table: HypercubeTable,
}

impl DivisibilityMonoid {
    /// Runs the axiom check, then enumerates hypercubes.
    pub fn new(presentation: Presentation) -> Result<Self> {
        let monoid = Monoid::new(presentation);
        let report = check_all(&monoid)?;
        if !report.passed {
            return Err(Error::InvalidMonoid(summary(&report)));
        }
        Self::from_monoid_unchecked(monoid)
    }

    /// Skips the axiom check. Constructions on an invalid monoid fail loudly
    /// or produce garbage.
    pub fn from_monoid_unchecked(monoid: Monoid) -> Result<Self> {
        let table = enumerate_hypercubes(&monoid)?;
        Ok(DivisibilityMonoid { monoid, table })
    }

    pub fn new_unchecked(presentation: Presentation) -> Result<Self> {
        Self::from_monoid_unchecked(Monoid::new(presentation))
    }

    pub fn monoid(&self) -> &Monoid {
        &self.monoid
    }

    pub fn table(&self) -> &HypercubeTable {
        &self.table
    }

    pub fn presentation(&self) -> &Presentation {
        self.monoid.presentation()
    }

    pub fn cube_element(&self, id: CubeId) -> &Element {
        self.table.element(id)
    }

    pub fn render_cube(&self, id: CubeId) -> String {
        self.table.render(self.presentation(), id)
    }

    pub fn parse_cube(&self, text: &str) -> Result<CubeId> {
        self.table.parse_cube(self.presentation(), text)
    }

    /// The maximal hypercube right-dividing `a`.
    ///
    /// Let `X` be the generators right-dividing `a` and `p = |X|`; `h(a)` is
    /// the unique length-`p` right divisor of `a` that every `x ∈ X`
    /// right-divides.
    pub fn max_hypercube(&self, a: &Element) -> Result<CubeId> {
        if a.is_one() {
            return Ok(CubeId::TRIVIAL);
        }
        if a.len() == 1 {
            return Ok(self.table.generator(a.canonical()[0]));
        }
        let m = &self.monoid;
        let xs = m.right_irreducible_divisors(a)?;
        let mut found = Vec::new();
        for cand in m.right_divisors_of_length(a, xs.len())? {
            let ends = m.right_irreducible_divisors(&cand)?;
            if xs.iter().all(|x| ends.contains(x)) {
                found.push(cand);
            }
        }
        if found.len() != 1 {
            return Err(Error::MaxHypercube {
                element: m.show(a),
                candidates: found.len(),
            });
        }
        self.table
            .by_element(&found[0])
            .ok_or_else(|| Error::NotHypercube(m.show(&found[0])))
    }

    /// `h(ā·b̄)` for two cubes.
    pub fn h_of_product(&self, a: CubeId, b: CubeId) -> Result<CubeId> {
        let prod = self.monoid.mul(self.cube_element(a), self.cube_element(b))?;
        self.max_hypercube(&prod)
    }

    /// The graph on non-trivial cubes with an edge `a → b` iff `h(ab) = b`.
    pub fn hypercube_graph(&self) -> Result<HypercubeGraph> {
        let n = self.table.len();
        let mut adjacency = vec![Vec::new(); n];
        for a in self.table.non_trivial() {
            for b in self.table.non_trivial() {
                if self.h_of_product(a, b)? == b {
                    adjacency[a.0].push(b);
                }
            }
        }
        let default_restriction = self
            .table
            .non_trivial()
            .filter(|&c| Some(c) != self.table.top())
            .collect();
        Ok(HypercubeGraph {
            vertices: n,
            adjacency,
            default_restriction,
        })
    }
}

fn summary(report: &CheckReport) -> String {
    let mut names: Vec<String> = report
        .failures
        .iter()
        .map(|v| format!("condition {}", v.condition))
        .collect();
    names.dedup();
    format!("{} ({} violations)", names.join(", "), report.failures.len())
}

/// Directed graph of hypercubes. Vertex ids are [`CubeId`]s; the trivial cube
/// carries no edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypercubeGraph {
    vertices: usize,
    adjacency: Vec<Vec<CubeId>>,
    default_restriction: Vec<CubeId>,
}

impl HypercubeGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn successors(&self, v: CubeId) -> &[CubeId] {
        &self.adjacency[v.0]
    }

    pub fn has_edge(&self, a: CubeId, b: CubeId) -> bool {
        self.adjacency[a.0].contains(&b)
    }

    pub fn edges(&self) -> impl Iterator<Item = (CubeId, CubeId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, succ)| succ.iter().map(move |&b| (CubeId(a), b)))
    }

    /// Non-trivial cubes other than the top cube.
    pub fn default_restriction(&self) -> &[CubeId] {
        &self.default_restriction
    }

    fn check(&self, v: CubeId) -> Result<()> {
        if v.0 >= self.vertices {
            Err(Error::UnknownVertex(v.0))
        } else {
            Ok(())
        }
    }

    fn reach_set(&self, from: CubeId, allowed: &[bool], reverse: bool) -> Vec<bool> {
        let mut seen = vec![false; self.vertices];
        let mut queue = VecDeque::new();
        seen[from.0] = true;
        queue.push_back(from);
        while let Some(v) = queue.pop_front() {
            let next: Vec<CubeId> = if reverse {
                (0..self.vertices)
                    .map(CubeId)
                    .filter(|&u| self.adjacency[u.0].contains(&v))
                    .collect()
            } else {
                self.adjacency[v.0].clone()
            };
            for u in next {
                if allowed[u.0] && !seen[u.0] {
                    seen[u.0] = true;
                    queue.push_back(u);
                }
            }
        }
        seen
    }

    /// Whether a directed path leads from `from` to `to`.
    pub fn reachable(&self, from: CubeId, to: CubeId) -> Result<bool> {
        self.check(from)?;
        self.check(to)?;
        let all = vec![true; self.vertices];
        Ok(self.reach_set(from, &all, false)[to.0])
    }

    /// Strong connectivity of the subgraph induced by `restrict_to`.
    pub fn strongly_connected(&self, restrict_to: &[CubeId]) -> Result<bool> {
        for &v in restrict_to {
            self.check(v)?;
        }
        let Some(&first) = restrict_to.first() else {
            return Ok(true);
        };
        let mut allowed = vec![false; self.vertices];
        for &v in restrict_to {
            allowed[v.0] = true;
        }
        let fwd = self.reach_set(first, &allowed, false);
        let bwd = self.reach_set(first, &allowed, true);
        Ok(restrict_to.iter().all(|v| fwd[v.0] && bwd[v.0]))
    }

    /// Graphviz rendering; node labels are atom sets and canonical words.
    pub fn to_dot(&self, dm: &DivisibilityMonoid) -> String {
        let mut s = String::from("digraph hypercubes {\n  rankdir=LR;\n  node [shape=circle];\n");
        for c in dm.table().non_trivial() {
            s.push_str(&format!(
                "  c{} [label=\"{}\\n{}\"];\n",
                c.0,
                dm.render_cube(c),
                dm.monoid().show(dm.cube_element(c))
            ));
        }
        for (a, b) in self.edges() {
            s.push_str(&format!("  c{} -> c{};\n", a.0, b.0));
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    pub(crate) const SHIFT: &str = "generators: x y z\nrel: x y = y z";
    pub(crate) const TWO: &str = "generators: x y z\nrel: x x = y z\nrel: y x = z z";
    pub(crate) const CYCLIC: &str =
        "generators: x y z\nrel: x x = y z\nrel: y y = z x\nrel: z z = x y";

    fn dm(text: &str) -> DivisibilityMonoid {
        DivisibilityMonoid::new(parse_presentation(text).unwrap()).unwrap()
    }

    fn el(d: &DivisibilityMonoid, s: &str) -> Element {
        let w = d.presentation().parse_word(s).unwrap();
        d.monoid().element(&w).unwrap()
    }

    #[test]
    fn cube_counts() {
        let a = dm(SHIFT);
        let names: Vec<String> = a.table().ids().map(|c| a.render_cube(c)).collect();
        assert_eq!(names, ["1", "x", "y", "z", "[x y]"]);
        assert_eq!(dm(TWO).table().len(), 6);
        let c = dm(CYCLIC);
        let names: Vec<String> = c.table().ids().map(|i| c.render_cube(i)).collect();
        assert_eq!(names, ["1", "x", "y", "z", "[x y]", "[x z]", "[y z]", "[x y z]"]);
    }

    #[test]
    fn cube_invariants() {
        for text in [SHIFT, TWO, CYCLIC] {
            let d = dm(text);
            let m = d.monoid();
            for c in d.table().cubes() {
                assert_eq!(c.element.len(), c.atoms.len());
                assert_eq!(m.left_irreducible_divisors(&c.element).unwrap(), c.atoms);
                // every divisor of a cube is a cube
                for div in m.left_divisors(&c.element).unwrap() {
                    assert!(d.table().by_element(&div).is_some());
                }
                for div in m.right_divisors(&c.element).unwrap() {
                    assert!(d.table().by_element(&div).is_some());
                }
            }
        }
    }

    #[test]
    fn max_hypercube_examples() {
        let a = dm(SHIFT);
        assert_eq!(a.max_hypercube(&Element::one()).unwrap(), CubeId::TRIVIAL);
        assert_eq!(a.max_hypercube(&el(&a, "x")).unwrap(), a.table().generator(0));
        let w = a.parse_cube("[x y]").unwrap();
        assert_eq!(a.max_hypercube(&el(&a, "xyz")).unwrap(), w);

        let c = dm(CYCLIC);
        let yz = c.parse_cube("[y z]").unwrap();
        assert_eq!(c.max_hypercube(&el(&c, "zzx")).unwrap(), yz);
    }

    #[test]
    fn graph_examples() {
        let free = dm("generators: x y");
        let g = free.hypercube_graph().unwrap();
        for a in 1..3 {
            for b in 1..3 {
                assert!(g.has_edge(CubeId(a), CubeId(b)));
            }
        }

        let a = dm(SHIFT);
        let w = a.parse_cube("[x y]").unwrap();
        assert!(a.hypercube_graph().unwrap().has_edge(w, w));

        let c = dm(CYCLIC);
        let g = c.hypercube_graph().unwrap();
        let zx = c.parse_cube("[x z]").unwrap();
        let x = c.parse_cube("x").unwrap();
        assert!(!g.has_edge(zx, x));
        assert!(!g.reachable(zx, x).unwrap());
        assert!(g.reachable(x, x).unwrap());
        assert_eq!(g.default_restriction().len(), 6);
        assert!(!g.strongly_connected(g.default_restriction()).unwrap());
        assert_eq!(g.reachable(CubeId(99), x), Err(Error::UnknownVertex(99)));
    }

    #[test]
    fn invalid_monoid_is_rejected() {
        let bad = parse_presentation("generators: x y z\nrel: x x = y z\nrel: x y = z z").unwrap();
        assert!(matches!(
            DivisibilityMonoid::new(bad),
            Err(Error::InvalidMonoid(_))
        ));
    }

    #[test]
    fn factor_grammar() {
        let c = dm(CYCLIC);
        for id in c.table().ids() {
            let s = c.render_cube(id);
            assert_eq!(c.parse_cube(&s).unwrap(), id);
        }
        assert_eq!(c.parse_cube("[z x]").unwrap(), c.parse_cube("[x z]").unwrap());
        assert!(c.parse_cube("[]").is_err());
        assert!(c.parse_cube("q").is_err());
    }

    #[test]
    fn dot_export_is_deterministic() {
        let a = dm(SHIFT);
        let g = a.hypercube_graph().unwrap();
        let d1 = g.to_dot(&a);
        assert_eq!(d1, g.to_dot(&a));
        assert!(d1.contains("c4 -> c4;"));
        assert!(d1.starts_with("digraph hypercubes {"));
    }
}
