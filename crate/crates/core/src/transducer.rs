//! The finite transducer computing right normal forms.
//!
//! States are the hypercubes, all accepting, with the trivial cube initial.
//! Reading `x` in state `a` moves to `b = h(ā·x̄)` and outputs the word `u`
//! with `ā·x̄ = ū·b̄`. After reading `w` from `1`, the state is the last
//! factor of `N(w)` and the output is a word for what remains, so
//! `N(w) = N(λ(w, 1)) · τ(w, 1)`; iterating the run normalizes `w` in at most
//! `|w|(|w|+1)/2` letter steps.
//!
//! The augmented variant reads and writes hypercubes instead of generators.
//!
//! Text format:
//!
//! ```text
//! divmon-transducer v1
//! alphabet: base
//! generators: x y z
//! states: 5
//! state 0 atoms=
//! state 4 atoms=x,y
//! initial: 0
//! 4 z -> 4 | x
//! ```

use std::collections::VecDeque;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypercube::{render_atoms, CubeId, DivisibilityMonoid};
use crate::normal_form::{render_factors, NormalWord};
use crate::presentation::{Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alphabet {
    /// Reads and writes generators.
    Base,
    /// Reads and writes hypercube ids.
    Augmented,
}

/// A sequential transducer whose states are hypercubes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transducer {
    alphabet: Alphabet,
    generators: Vec<String>,
    /// Atom set of each state.
    states: Vec<Vec<Letter>>,
    initial: usize,
    delta: Vec<Vec<usize>>,
    output: Vec<Vec<Vec<usize>>>,
}

/// Outcome of an iterated normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastNormalization {
    pub normal: NormalWord,
    /// Number of full runs.
    pub runs: usize,
    /// Total letters read over all runs.
    pub steps: usize,
}

impl Transducer {
    /// Assembles a machine from parts, checking totality.
    pub fn from_parts(
        alphabet: Alphabet,
        generators: Vec<String>,
        states: Vec<Vec<Letter>>,
        initial: usize,
        delta: Vec<Vec<usize>>,
        output: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let n = states.len();
        let letters = match alphabet {
            Alphabet::Base => generators.len(),
            Alphabet::Augmented => n,
        };
        if initial >= n {
            return Err(Error::Malformed(format!("initial state {initial} out of range")));
        }
        if delta.len() != n || output.len() != n {
            return Err(Error::Malformed("partial transition function".into()));
        }
        for (row, out) in delta.iter().zip(&output) {
            if row.len() != letters || out.len() != letters {
                return Err(Error::Malformed("partial transition function".into()));
            }
            if row.iter().any(|&t| t >= n) {
                return Err(Error::Malformed("transition to unknown state".into()));
            }
            if out.iter().flatten().any(|&l| l >= letters) {
                return Err(Error::Malformed("output letter out of range".into()));
            }
        }
        Ok(Transducer {
            alphabet,
            generators,
            states,
            initial,
            delta,
            output,
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn letter_count(&self) -> usize {
        self.delta.first().map_or(0, Vec::len)
    }

    pub fn arrow_count(&self) -> usize {
        self.delta.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> CubeId {
        CubeId(self.initial)
    }

    pub fn state_atoms(&self, s: CubeId) -> &[Letter] {
        &self.states[s.0]
    }

    pub fn delta(&self, s: CubeId, letter: usize) -> CubeId {
        CubeId(self.delta[s.0][letter])
    }

    pub fn lambda(&self, s: CubeId, letter: usize) -> &[usize] {
        &self.output[s.0][letter]
    }

    /// Every arrow as `(from, letter, to, output)`, ordered by state then letter.
    pub fn arrows(&self) -> impl Iterator<Item = (CubeId, usize, CubeId, &[usize])> + '_ {
        self.delta.iter().enumerate().flat_map(move |(s, row)| {
            row.iter()
                .enumerate()
                .map(move |(x, &t)| (CubeId(s), x, CubeId(t), self.output[s][x].as_slice()))
        })
    }

    /// States not reachable from the initial state.
    pub fn unreachable_states(&self) -> Vec<CubeId> {
        let mut seen = vec![false; self.states.len()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(s) = queue.pop_front() {
            for &t in &self.delta[s] {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        (0..seen.len()).filter(|&s| !seen[s]).map(CubeId).collect()
    }

    /// `(τ(w, q), λ(w, q))`.
    pub fn run(&self, w: &[usize], q: CubeId) -> Result<(CubeId, Vec<usize>)> {
        let letters = self.letter_count();
        let mut state = q.0;
        let mut out = Vec::with_capacity(w.len());
        for &x in w {
            if x >= letters {
                return Err(Error::UnknownLetter(x));
            }
            out.extend_from_slice(&self.output[state][x]);
            state = self.delta[state][x];
        }
        Ok((CubeId(state), out))
    }

    /// Iterates runs from the initial state until the remaining word is empty.
    pub fn normalize_fast(&self, w: &[usize]) -> Result<FastNormalization> {
        let mut work = w.to_vec();
        let mut factors = Vec::new();
        let mut runs = 0;
        let mut steps = 0;
        while !work.is_empty() {
            let (state, rest) = self.run(&work, self.initial())?;
            runs += 1;
            steps += work.len();
            if state.0 == self.initial || rest.len() >= work.len() {
                return Err(Error::NotShrinking { state: state.0 });
            }
            factors.push(state);
            work = rest;
        }
        factors.reverse();
        Ok(FastNormalization {
            normal: NormalWord::new(factors),
            runs,
            steps,
        })
    }

    pub fn render_normal(&self, n: &NormalWord) -> String {
        render_factors(&self.generators, &n.factors, |c| &self.states[c.0])
    }

    fn render_letter(&self, x: usize) -> String {
        match self.alphabet {
            Alphabet::Base => self.generators[x].clone(),
            Alphabet::Augmented => x.to_string(),
        }
    }

    fn render_output(&self, out: &[usize], sep: &str) -> String {
        out.iter()
            .map(|&x| self.render_letter(x))
            .collect::<Vec<_>>()
            .join(sep)
    }

    pub fn serialize(&self) -> String {
        let mut s = String::from("divmon-transducer v1\n");
        let kind = match self.alphabet {
            Alphabet::Base => "base",
            Alphabet::Augmented => "augmented",
        };
        let _ = writeln!(s, "alphabet: {kind}");
        let _ = writeln!(s, "generators: {}", self.generators.join(" "));
        let _ = writeln!(s, "states: {}", self.states.len());
        for (i, atoms) in self.states.iter().enumerate() {
            let names: Vec<&str> = atoms.iter().map(|&a| self.generators[a].as_str()).collect();
            let _ = writeln!(s, "state {i} atoms={}", names.join(","));
        }
        let _ = writeln!(s, "initial: {}", self.initial);
        for (from, x, to, out) in self.arrows() {
            let out = self.render_output(out, " ");
            let sep = if out.is_empty() { "" } else { " " };
            let _ = writeln!(s, "{from} {} -> {to} |{sep}{out}", self.render_letter(x));
        }
        s
    }

    pub fn deserialize(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |line: usize, message: &str| Error::Format {
            line,
            message: message.to_string(),
        };
        let mut next = |what: &str| lines.next().ok_or_else(|| err(0, &format!("missing {what}")));

        let (ln, header) = next("header")?;
        if header != "divmon-transducer v1" {
            return Err(err(ln, "expected header `divmon-transducer v1`"));
        }
        let (ln, l) = next("alphabet line")?;
        let alphabet = match l.strip_prefix("alphabet:").map(str::trim) {
            Some("base") => Alphabet::Base,
            Some("augmented") => Alphabet::Augmented,
            _ => return Err(err(ln, "expected `alphabet: base|augmented`")),
        };
        let (ln, l) = next("generators line")?;
        let generators: Vec<String> = l
            .strip_prefix("generators:")
            .ok_or_else(|| err(ln, "expected `generators:`"))?
            .split_whitespace()
            .map(str::to_string)
            .collect();
        let gen_index = |ln: usize, name: &str| {
            generators
                .iter()
                .position(|g| g == name)
                .ok_or_else(|| err(ln, &format!("unknown generator `{name}`")))
        };
        let (ln, l) = next("states line")?;
        let n: usize = l
            .strip_prefix("states:")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| err(ln, "expected `states: <n>`"))?;
        let mut states = vec![None; n];
        for _ in 0..n {
            let (ln, l) = next("state line")?;
            let rest = l.strip_prefix("state ").ok_or_else(|| err(ln, "expected `state <id> atoms=…`"))?;
            let (id, atoms) = rest
                .split_once(" atoms=")
                .or_else(|| rest.strip_suffix(" atoms=").map(|id| (id, "")))
                .ok_or_else(|| err(ln, "expected `atoms=`"))?;
            let id: usize = id.trim().parse().map_err(|_| err(ln, "bad state id"))?;
            if id >= n || states[id].is_some() {
                return Err(err(ln, "state id out of range or repeated"));
            }
            let atoms = atoms
                .split(',')
                .map(str::trim)
                .filter(|a| !a.is_empty())
                .map(|a| gen_index(ln, a))
                .collect::<Result<Vec<_>>>()?;
            states[id] = Some(atoms);
        }
        let states: Vec<Vec<Letter>> = states.into_iter().map(Option::unwrap).collect();
        let (ln, l) = next("initial line")?;
        let initial: usize = l
            .strip_prefix("initial:")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| err(ln, "expected `initial: <id>`"))?;

        let letters = match alphabet {
            Alphabet::Base => generators.len(),
            Alphabet::Augmented => n,
        };
        let parse_letter = |ln: usize, tok: &str| -> Result<usize> {
            match alphabet {
                Alphabet::Base => gen_index(ln, tok),
                Alphabet::Augmented => tok
                    .parse::<usize>()
                    .ok()
                    .filter(|&c| c < n)
                    .ok_or_else(|| err(ln, &format!("bad cube letter `{tok}`"))),
            }
        };
        let mut delta = vec![vec![None; letters]; n];
        let mut output = vec![vec![Vec::new(); letters]; n];
        for (ln, l) in lines {
            let (lhs, out) = l.split_once('|').ok_or_else(|| err(ln, "expected `|`"))?;
            let (arrow, to) = lhs.split_once("->").ok_or_else(|| err(ln, "expected `->`"))?;
            let mut parts = arrow.split_whitespace();
            let from: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .filter(|&s| s < n)
                .ok_or_else(|| err(ln, "bad source state"))?;
            let x = parse_letter(ln, parts.next().ok_or_else(|| err(ln, "missing letter"))?)?;
            let to: usize = to
                .trim()
                .parse()
                .ok()
                .filter(|&s| s < n)
                .ok_or_else(|| err(ln, "bad target state"))?;
            if delta[from][x].is_some() {
                return Err(err(ln, "duplicate transition"));
            }
            delta[from][x] = Some(to);
            output[from][x] = out
                .split_whitespace()
                .map(|t| parse_letter(ln, t))
                .collect::<Result<_>>()?;
        }
        let delta = delta
            .into_iter()
            .map(|row| row.into_iter().collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Malformed("partial transition function".into()))?;
        Transducer::from_parts(alphabet, generators, states, initial, delta, output)
    }

    /// Graphviz rendering with `x|u` edge labels.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph transducer {\n  rankdir=LR;\n  node [shape=doublecircle];\n");
        s.push_str("  start [shape=point];\n");
        for (i, atoms) in self.states.iter().enumerate() {
            let _ = writeln!(s, "  q{i} [label=\"{}\"];", render_atoms(&self.generators, atoms));
        }
        let _ = writeln!(s, "  start -> q{};", self.initial);
        for (from, x, to, out) in self.arrows() {
            let out = if out.is_empty() {
                "ε".to_string()
            } else {
                self.render_output(out, "")
            };
            let _ = writeln!(s, "  q{from} -> q{to} [label=\"{}|{out}\"];", self.render_letter(x));
        }
        s.push_str("}\n");
        s
    }
}

/// Targets and outputs of one state, indexed by letter.
type Row = (Vec<usize>, Vec<Vec<usize>>);

impl DivisibilityMonoid {
    fn atoms_by_state(&self) -> Vec<Vec<Letter>> {
        self.table().cubes().iter().map(|c| c.atoms.clone()).collect()
    }

    /// The base transducer over generators.
    pub fn synthesize(&self) -> Result<Transducer> {
        let m = self.monoid();
        let n = self.table().len();
        let rank = m.rank();
        let rows: Result<Vec<Row>> = (0..n)
            .into_par_iter()
            .map(|a| {
                let mut to = Vec::with_capacity(rank);
                let mut out = Vec::with_capacity(rank);
                for x in 0..rank {
                    let ax = m.mul(self.cube_element(CubeId(a)), &m.generator(x))?;
                    let b = self.max_hypercube(&ax)?;
                    let u = m.right_quotient(&ax, self.cube_element(b))?;
                    to.push(b.0);
                    out.push(u.canonical().letters().to_vec());
                }
                Ok((to, out))
            })
            .collect();
        let (delta, output) = rows?.into_iter().unzip();
        Transducer::from_parts(
            Alphabet::Base,
            self.presentation().generators().to_vec(),
            self.atoms_by_state(),
            0,
            delta,
            output,
        )
    }

    /// The augmented transducer over hypercubes.
    pub fn synthesize_augmented(&self) -> Result<Transducer> {
        let m = self.monoid();
        let n = self.table().len();
        let rows: Result<Vec<Row>> = (0..n)
            .into_par_iter()
            .map(|a| {
                let mut to = Vec::with_capacity(n);
                let mut out = Vec::with_capacity(n);
                for h in 0..n {
                    let b = self.h_of_product(CubeId(a), CubeId(h))?;
                    let prod = m.mul(self.cube_element(CubeId(a)), self.cube_element(CubeId(h)))?;
                    let k = m.right_quotient(&prod, self.cube_element(b))?;
                    let k = self
                        .table()
                        .by_element(&k)
                        .ok_or_else(|| Error::NotHypercube(m.show(&k)))?;
                    to.push(b.0);
                    out.push(if k.is_trivial() { Vec::new() } else { vec![k.0] });
                }
                Ok((to, out))
            })
            .collect();
        let (delta, output) = rows?.into_iter().unzip();
        Transducer::from_parts(
            Alphabet::Augmented,
            self.presentation().generators().to_vec(),
            self.atoms_by_state(),
            0,
            delta,
            output,
        )
    }

    /// Checks `rep(a)·x ∼ u·rep(b)` for every arrow `a -x|u-> b`, and that the
    /// machine's states match this monoid's cubes. Returns the offending
    /// arrows.
    pub fn validate_transducer(&self, t: &Transducer) -> Result<Vec<(CubeId, usize)>> {
        if t.state_count() != self.table().len() {
            return Err(Error::Malformed(format!(
                "{} states, expected {}",
                t.state_count(),
                self.table().len()
            )));
        }
        for c in self.table().ids() {
            if t.state_atoms(c) != self.table().get(c).atoms {
                return Err(Error::Malformed(format!("state {c} has the wrong atom set")));
            }
        }
        let m = self.monoid();
        let as_element = |letters: &[usize]| -> Result<crate::monoid::Element> {
            match t.alphabet() {
                Alphabet::Base => m.element(letters),
                Alphabet::Augmented => {
                    let ids: Vec<CubeId> = letters.iter().map(|&c| CubeId(c)).collect();
                    self.evaluate(&ids)
                }
            }
        };
        let mut bad = Vec::new();
        for (from, x, to, out) in t.arrows() {
            let lhs = m.mul(self.cube_element(from), &as_element(&[x])?)?;
            let rhs = m.mul(&as_element(out)?, self.cube_element(to))?;
            let maximal = self.max_hypercube(&lhs)? == to;
            if lhs != rhs || !maximal {
                bad.push((from, x));
            }
        }
        Ok(bad)
    }

    /// Normalizes a generator word with the base transducer.
    pub fn normalize_word(&self, t: &Transducer, w: &Word) -> Result<FastNormalization> {
        t.normalize_fast(w.letters())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    const SHIFT: &str = "generators: x y z\nrel: x y = y z";
    const TWO: &str = "generators: x y z\nrel: x x = y z\nrel: y x = z z";

    fn dm(text: &str) -> DivisibilityMonoid {
        DivisibilityMonoid::new(parse_presentation(text).unwrap()).unwrap()
    }

    #[test]
    fn shift_machine_shape() {
        let d = dm(SHIFT);
        let t = d.synthesize().unwrap();
        assert_eq!(t.state_count(), 5);
        assert_eq!(t.arrow_count(), 15);
        let w = d.parse_cube("[x y]").unwrap();
        // w -z|x-> w
        assert_eq!(t.delta(w, 2), w);
        assert_eq!(t.lambda(w, 2), &[0]);
        assert!(d.validate_transducer(&t).unwrap().is_empty());
    }

    #[test]
    fn example_run() {
        let d = dm(TWO);
        let t = d.synthesize().unwrap();
        let p = d.presentation();
        let w0 = p.parse_word("yzyxxz").unwrap();
        let (s1, w1) = t.run(&w0, t.initial()).unwrap();
        assert_eq!(d.render_cube(s1), "[y z]");
        assert_eq!(p.render_compact(&w1), "xxyy");
        let (s2, w2) = t.run(&w1, t.initial()).unwrap();
        assert_eq!(d.render_cube(s2), "y");
        assert_eq!(p.render_compact(&w2), "xxy");
        let fast = t.normalize_fast(&w0).unwrap();
        assert_eq!(fast.runs, 4);
        assert_eq!(t.render_normal(&fast.normal), "[x y].y.y.[y z]");
        assert_eq!(t.run(&[], CubeId(3)).unwrap(), (CubeId(3), vec![]));
        assert!(matches!(t.run(&[7], t.initial()), Err(Error::UnknownLetter(7))));
    }

    #[test]
    fn empty_word_normalizes_to_one() {
        let t = dm(SHIFT).synthesize().unwrap();
        let f = t.normalize_fast(&[]).unwrap();
        assert!(f.normal.is_empty());
        assert_eq!((f.runs, f.steps), (0, 0));
    }

    #[test]
    fn augmented_machine() {
        let d = dm(SHIFT);
        let t = d.synthesize_augmented().unwrap();
        assert_eq!(t.arrow_count(), 25);
        for h in d.table().ids() {
            assert_eq!(t.delta(CubeId::TRIVIAL, h.0), h);
            assert!(t.lambda(CubeId::TRIVIAL, h.0).is_empty());
        }
        let w = d.parse_cube("[x y]").unwrap();
        let z = d.parse_cube("z").unwrap();
        let x = d.parse_cube("x").unwrap();
        assert_eq!(t.delta(w, z.0), w);
        assert_eq!(t.lambda(w, z.0), &[x.0]);
        assert!(d.validate_transducer(&t).unwrap().is_empty());
    }

    #[test]
    fn serialization_round_trip() {
        for text in [SHIFT, TWO] {
            let d = dm(text);
            for t in [d.synthesize().unwrap(), d.synthesize_augmented().unwrap()] {
                let s = t.serialize();
                assert_eq!(Transducer::deserialize(&s).unwrap(), t);
            }
        }
    }

    #[test]
    fn free_machine_lines() {
        let d = dm("generators: a b c");
        let s = d.synthesize().unwrap().serialize();
        assert_eq!(s.lines().filter(|l| l.contains("->")).count(), 4 * 3);
    }

    #[test]
    fn tampered_text_is_rejected() {
        let s = dm(SHIFT).synthesize().unwrap().serialize();
        let missing: String = s
            .lines()
            .filter(|l| !l.starts_with("4 z"))
            .map(|l| format!("{l}\n"))
            .collect();
        let e = Transducer::deserialize(&missing).unwrap_err();
        assert!(e.to_string().contains("partial transition function"), "{e}");
        let e = Transducer::deserialize(&s.replace("v1", "v9")).unwrap_err();
        assert!(matches!(e, Error::Format { line: 1, .. }));
        let e = Transducer::deserialize(&s.replace("4 z -> 4", "4 q -> 4")).unwrap_err();
        assert!(matches!(e, Error::Format { .. }), "{e}");
    }

    #[test]
    fn dot_labels() {
        let t = dm(SHIFT).synthesize().unwrap();
        let dot = t.to_dot();
        assert!(dot.contains("q4 -> q4 [label=\"z|x\"];"), "{dot}");
        assert!(dot.contains("q4 [label=\"[x y]\"];"));
    }
}
