//! Automatic structures over the hypercube alphabet `H`.
//!
//! Pairs of normal words are read synchronously as padded convolutions. The
//! multiplier machines track the difference between the two prefixes read so
//! far: for right multiplication by `z` (left-padded) it is a single cube `d`
//! with `U·d = V`; in general it is a pair `(e, f)` with `yU = g·e`,
//! `V = g·f` and `e ∧ f = 1`. Exact-language machines add normality and
//! padding checks on each track.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::Hash;

use rayon::prelude::*;

use crate::axioms::Side;
use crate::error::{Error, Result};
use crate::hypercube::{parse_atoms, render_atoms, CubeId, DivisibilityMonoid};
use crate::monoid::Element;
use crate::normal_form::{Distance, NormalWord};
use crate::presentation::{Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Padding {
    /// `$` fills the start of the shorter word.
    Left,
    /// `$` fills the end of the shorter word.
    Right,
}

impl Padding {
    fn name(self) -> &'static str {
        match self {
            Padding::Left => "left",
            Padding::Right => "right",
        }
    }
}

/// A synchronous reading of two words; `None` is the padding symbol `$`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedPair<T> {
    pub padding: Padding,
    pub columns: Vec<(Option<T>, Option<T>)>,
}

pub fn convolve_right<T: Copy>(u: &[T], v: &[T]) -> PaddedPair<T> {
    let n = u.len().max(v.len());
    PaddedPair {
        padding: Padding::Right,
        columns: (0..n).map(|i| (u.get(i).copied(), v.get(i).copied())).collect(),
    }
}

/// Mirror of [`convolve_right`].
pub fn convolve_left<T: Copy>(u: &[T], v: &[T]) -> PaddedPair<T> {
    let ru: Vec<T> = u.iter().rev().copied().collect();
    let rv: Vec<T> = v.iter().rev().copied().collect();
    let mut columns = convolve_right(&ru, &rv).columns;
    columns.reverse();
    PaddedPair {
        padding: Padding::Left,
        columns,
    }
}

pub fn convolve<T: Copy>(padding: Padding, u: &[T], v: &[T]) -> PaddedPair<T> {
    match padding {
        Padding::Left => convolve_left(u, v),
        Padding::Right => convolve_right(u, v),
    }
}

/// Which multiplication a pair machine recognizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Multiplier {
    /// `y·ū = v̄`.
    Left(CubeId),
    /// `ū·z = v̄`; `Right(1)` is the equality recognizer.
    Right(CubeId),
}

impl Multiplier {
    pub fn cube(self) -> CubeId {
        match self {
            Multiplier::Left(c) | Multiplier::Right(c) => c,
        }
    }

    pub fn side(self) -> Side {
        match self {
            Multiplier::Left(_) => Side::Left,
            Multiplier::Right(_) => Side::Right,
        }
    }
}

/// The language of right normal forms: `start`, one state per cube (the
/// last letter read) and `dead`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalLanguage {
    cubes: usize,
    delta: Vec<Vec<usize>>,
}

impl NormalLanguage {
    pub fn start(&self) -> usize {
        self.cubes
    }

    pub fn dead(&self) -> usize {
        self.cubes + 1
    }

    pub fn state_count(&self) -> usize {
        self.cubes + 2
    }

    pub fn step(&self, state: usize, letter: CubeId) -> usize {
        self.delta[state][letter.0]
    }

    pub fn accepts(&self, word: &[CubeId]) -> bool {
        let end = word.iter().fold(self.start(), |s, &c| self.step(s, c));
        end != self.dead()
    }
}

/// A deterministic, complete automaton over pair letters `(A ∪ {$})²` minus
/// `($, $)`, with `A = H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairAutomaton {
    relation: Multiplier,
    padding: Padding,
    generators: Vec<String>,
    cube_atoms: Vec<Vec<Letter>>,
    labels: Vec<String>,
    accepting: Vec<bool>,
    initial: usize,
    dead: usize,
    /// `delta[state][a·(n+1) + b]` with `$ = n`; the `($,$)` column goes to `dead`.
    delta: Vec<Vec<usize>>,
}

impl PairAutomaton {
    pub fn relation(&self) -> Multiplier {
        self.relation
    }

    pub fn padding(&self) -> Padding {
        self.padding
    }

    /// Number of states, including the dead state.
    pub fn state_count(&self) -> usize {
        self.labels.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn dead(&self) -> usize {
        self.dead
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    pub fn label(&self, s: usize) -> &str {
        &self.labels[s]
    }

    fn cube_count(&self) -> usize {
        self.cube_atoms.len()
    }

    fn column(&self, a: Option<CubeId>, b: Option<CubeId>) -> Option<usize> {
        column_index(self.cube_count(), a, b)
    }

    pub fn step(&self, s: usize, a: Option<CubeId>, b: Option<CubeId>) -> usize {
        match self.column(a, b) {
            Some(c) => self.delta[s][c],
            None => self.dead,
        }
    }

    pub fn accepts(&self, pair: &PaddedPair<CubeId>) -> bool {
        let end = pair
            .columns
            .iter()
            .fold(self.initial, |s, &(a, b)| self.step(s, a, b));
        self.accepting[end]
    }

    /// Convolves `u`, `v` with this machine's padding and runs it.
    pub fn accepts_words(&self, u: &NormalWord, v: &NormalWord) -> bool {
        self.accepts(&convolve(self.padding, &u.factors, &v.factors))
    }

    fn letter_name(&self, x: Option<CubeId>) -> String {
        x.map_or_else(|| "$".to_string(), |c| c.to_string())
    }

    /// Keeps the states that are reachable and can still accept; everything
    /// else is merged into the dead state.
    pub fn trim(&self) -> PairAutomaton {
        let n = self.state_count();
        let mut reverse = vec![Vec::new(); n];
        for (s, row) in self.delta.iter().enumerate() {
            for &t in row {
                reverse[t].push(s);
            }
        }
        let mut live = self.accepting.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&s| live[s]).collect();
        while let Some(t) = stack.pop() {
            for &s in &reverse[t] {
                if !live[s] {
                    live[s] = true;
                    stack.push(s);
                }
            }
        }
        live[self.dead] = false;

        let mut remap: Vec<Option<usize>> = vec![None; n];
        let mut order = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        if live[self.initial] {
            remap[self.initial] = Some(0);
            order.push(self.initial);
            queue.push_back(self.initial);
        }
        while let Some(s) = queue.pop_front() {
            for &t in &self.delta[s] {
                if live[t] && remap[t].is_none() {
                    remap[t] = Some(order.len());
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        let dead = order.len();
        let cols = self.delta[0].len();
        let mut delta: Vec<Vec<usize>> = order
            .iter()
            .map(|&s| self.delta[s].iter().map(|&t| remap[t].unwrap_or(dead)).collect())
            .collect();
        delta.push(vec![dead; cols]);
        let mut labels: Vec<String> = order.iter().map(|&s| self.labels[s].clone()).collect();
        labels.push("dead".into());
        let mut accepting: Vec<bool> = order.iter().map(|&s| self.accepting[s]).collect();
        accepting.push(false);
        PairAutomaton {
            relation: self.relation,
            padding: self.padding,
            generators: self.generators.clone(),
            cube_atoms: self.cube_atoms.clone(),
            labels,
            accepting,
            initial: if order.is_empty() { dead } else { 0 },
            dead,
            delta,
        }
    }

    /// Text form; transitions into the dead state are omitted.
    pub fn serialize(&self) -> String {
        let mut s = String::from("divmon-pair-automaton v1\n");
        let (side, c) = match self.relation {
            Multiplier::Left(c) => ("left", c),
            Multiplier::Right(c) => ("right", c),
        };
        let _ = writeln!(s, "relation: {side} {c}");
        let _ = writeln!(s, "padding: {}", self.padding.name());
        let _ = writeln!(s, "generators: {}", self.generators.join(" "));
        let letters: Vec<String> = (0..self.cube_count()).map(|c| c.to_string()).collect();
        let _ = writeln!(s, "pair-alphabet: {} $", letters.join(" "));
        for (i, atoms) in self.cube_atoms.iter().enumerate() {
            let names: Vec<&str> = atoms.iter().map(|&a| self.generators[a].as_str()).collect();
            let _ = writeln!(s, "cube {i} atoms={}", names.join(","));
        }
        let _ = writeln!(s, "states: {}", self.state_count());
        for (i, label) in self.labels.iter().enumerate() {
            let acc = if self.accepting[i] { " accept" } else { "" };
            let _ = writeln!(s, "state {i}{acc} label={label}");
        }
        let _ = writeln!(s, "initial: {}", self.initial);
        let _ = writeln!(s, "dead: {}", self.dead);
        let n = self.cube_count();
        for (from, row) in self.delta.iter().enumerate() {
            for (col, &to) in row.iter().enumerate() {
                if to == self.dead {
                    continue;
                }
                let (a, b) = column_letters(n, col);
                let _ = writeln!(
                    s,
                    "{from} {} {} -> {to}",
                    self.letter_name(a),
                    self.letter_name(b)
                );
            }
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

        let (ln, l) = next("header")?;
        if l != "divmon-pair-automaton v1" {
            return Err(err(ln, "expected header `divmon-pair-automaton v1`"));
        }
        let (ln, l) = next("relation line")?;
        let relation = {
            let rest = l.strip_prefix("relation:").ok_or_else(|| err(ln, "expected `relation:`"))?;
            let mut it = rest.split_whitespace();
            let side = it.next();
            let cube: Option<usize> = it.next().and_then(|c| c.parse().ok());
            match (side, cube) {
                (Some("left"), Some(c)) => Multiplier::Left(CubeId(c)),
                (Some("right"), Some(c)) => Multiplier::Right(CubeId(c)),
                _ => return Err(err(ln, "expected `relation: left|right <cube>`")),
            }
        };
        let (ln, l) = next("padding line")?;
        let padding = match l.strip_prefix("padding:").map(str::trim) {
            Some("left") => Padding::Left,
            Some("right") => Padding::Right,
            _ => return Err(err(ln, "expected `padding: left|right`")),
        };
        let (ln, l) = next("generators line")?;
        let generators: Vec<String> = l
            .strip_prefix("generators:")
            .ok_or_else(|| err(ln, "expected `generators:`"))?
            .split_whitespace()
            .map(str::to_string)
            .collect();
        let (ln, l) = next("pair-alphabet line")?;
        let alphabet: Vec<&str> = l
            .strip_prefix("pair-alphabet:")
            .ok_or_else(|| err(ln, "expected `pair-alphabet:`"))?
            .split_whitespace()
            .collect();
        if alphabet.last() != Some(&"$") {
            return Err(err(ln, "pair alphabet must end with `$`"));
        }
        let n = alphabet.len() - 1;
        let mut cube_atoms = Vec::with_capacity(n);
        for i in 0..n {
            let (ln, l) = next("cube line")?;
            let rest = l
                .strip_prefix(&format!("cube {i} atoms="))
                .or_else(|| (l == format!("cube {i} atoms")).then_some(""))
                .ok_or_else(|| err(ln, &format!("expected `cube {i} atoms=…`")))?;
            let atoms = rest
                .split(',')
                .filter(|a| !a.is_empty())
                .map(|a| {
                    parse_atoms(&generators, a)
                        .map(|v| v[0])
                        .map_err(|_| err(ln, &format!("unknown generator `{a}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            cube_atoms.push(atoms);
        }
        let (ln, l) = next("states line")?;
        let count: usize = l
            .strip_prefix("states:")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| err(ln, "expected `states: <n>`"))?;
        let mut labels = Vec::with_capacity(count);
        let mut accepting = Vec::with_capacity(count);
        for i in 0..count {
            let (ln, l) = next("state line")?;
            let rest = l
                .strip_prefix(&format!("state {i}"))
                .ok_or_else(|| err(ln, &format!("expected `state {i}`")))?;
            let (flag, label) = rest
                .split_once("label=")
                .ok_or_else(|| err(ln, "expected `label=`"))?;
            accepting.push(match flag.trim() {
                "accept" => true,
                "" => false,
                _ => return Err(err(ln, "unknown state flag")),
            });
            labels.push(label.to_string());
        }
        let parse_state = |ln: usize, s: Option<&str>| -> Result<usize> {
            s.and_then(|s| s.trim().parse().ok())
                .filter(|&s| s < count)
                .ok_or_else(|| err(ln, "bad state"))
        };
        let (ln, l) = next("initial line")?;
        let initial = parse_state(ln, l.strip_prefix("initial:"))?;
        let (ln, l) = next("dead line")?;
        let dead = parse_state(ln, l.strip_prefix("dead:"))?;
        let parse_letter = |ln: usize, t: Option<&str>| -> Result<Option<CubeId>> {
            match t {
                Some("$") => Ok(None),
                Some(t) => t
                    .parse()
                    .ok()
                    .filter(|&c| c < n)
                    .map(|c| Some(CubeId(c)))
                    .ok_or_else(|| err(ln, &format!("bad letter `{t}`"))),
                None => Err(err(ln, "missing letter")),
            }
        };
        let cols = (n + 1) * (n + 1);
        let mut delta = vec![vec![dead; cols]; count];
        for (ln, l) in lines {
            let (lhs, to) = l.split_once("->").ok_or_else(|| err(ln, "expected `->`"))?;
            let mut parts = lhs.split_whitespace();
            let from = parse_state(ln, parts.next())?;
            let a = parse_letter(ln, parts.next())?;
            let b = parse_letter(ln, parts.next())?;
            let to = parse_state(ln, Some(to))?;
            let col = column_index(n, a, b).ok_or_else(|| err(ln, "the column ($, $) is not a letter"))?;
            delta[from][col] = to;
        }
        Ok(PairAutomaton {
            relation,
            padding,
            generators,
            cube_atoms,
            labels,
            accepting,
            initial,
            dead,
            delta,
        })
    }

    /// Graphviz rendering. The dead state and its incoming edges are left out.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph multiplier {\n  rankdir=LR;\n  start [shape=point];\n");
        let cube = |c: Option<CubeId>| {
            c.map_or_else(|| "$".to_string(), |c| render_atoms(&self.generators, &self.cube_atoms[c.0]))
        };
        for (i, label) in self.labels.iter().enumerate() {
            if i == self.dead {
                continue;
            }
            let shape = if self.accepting[i] { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  s{i} [shape={shape}, label=\"{label}\"];");
        }
        if self.initial != self.dead {
            let _ = writeln!(s, "  start -> s{};", self.initial);
        }
        let n = self.cube_count();
        for (from, row) in self.delta.iter().enumerate() {
            if from == self.dead {
                continue;
            }
            let mut by_target: Vec<(usize, Vec<String>)> = Vec::new();
            for (col, &to) in row.iter().enumerate() {
                if to == self.dead {
                    continue;
                }
                let (a, b) = column_letters(n, col);
                let text = format!("({},{})", cube(a), cube(b));
                match by_target.iter_mut().find(|(t, _)| *t == to) {
                    Some((_, v)) => v.push(text),
                    None => by_target.push((to, vec![text])),
                }
            }
            for (to, texts) in by_target {
                let _ = writeln!(s, "  s{from} -> s{to} [label=\"{}\"];", texts.join(" "));
            }
        }
        s.push_str("}\n");
        s
    }
}

fn column_index(n: usize, a: Option<CubeId>, b: Option<CubeId>) -> Option<usize> {
    match (a, b) {
        (None, None) => None,
        _ => Some(a.map_or(n, |c| c.0) * (n + 1) + b.map_or(n, |c| c.0)),
    }
}

fn column_letters(n: usize, col: usize) -> (Option<CubeId>, Option<CubeId>) {
    let f = |x: usize| (x < n).then_some(CubeId(x));
    (f(col / (n + 1)), f(col % (n + 1)))
}

/// Every pair column, in column order.
fn all_columns(n: usize) -> Vec<(Option<CubeId>, Option<CubeId>)> {
    (0..(n + 1) * (n + 1)).map(|c| column_letters(n, c)).collect()
}

/// Raw output of [`explore`].
struct Explored {
    labels: Vec<String>,
    accepting: Vec<bool>,
    dead: usize,
    delta: Vec<Vec<usize>>,
}

/// Breadth-first construction of a complete deterministic pair machine.
/// `step` returns `None` for the dead state. Columns holding the trivial
/// cube go to the dead state, since normal words never contain it.
fn explore<K, S, A, L>(n: usize, init: K, step: S, accept: A, label: L) -> Result<Explored>
where
    K: Clone + Eq + Hash + Send + Sync,
    S: Fn(&K, Option<CubeId>, Option<CubeId>) -> Result<Option<K>> + Sync,
    A: Fn(&K) -> bool,
    L: Fn(&K) -> String,
{
    let columns = all_columns(n);
    let mut ids: HashMap<K, usize> = HashMap::from([(init.clone(), 0)]);
    let mut keys = vec![init];
    let mut rows: Vec<Vec<Option<usize>>> = Vec::new();
    let mut frontier = 0..1;
    while !frontier.is_empty() {
        let computed: Result<Vec<Vec<Option<K>>>> = keys[frontier.clone()]
            .par_iter()
            .map(|k| {
                columns
                    .iter()
                    .map(|&(a, b)| {
                        let trivial = a.is_some_and(CubeId::is_trivial) || b.is_some_and(CubeId::is_trivial);
                        if trivial || (a.is_none() && b.is_none()) {
                            Ok(None)
                        } else {
                            step(k, a, b)
                        }
                    })
                    .collect()
            })
            .collect();
        let start = keys.len();
        for row in computed? {
            let ids_row = row
                .into_iter()
                .map(|t| {
                    t.map(|key| {
                        let next = keys.len();
                        *ids.entry(key.clone()).or_insert_with(|| {
                            keys.push(key);
                            next
                        })
                    })
                })
                .collect();
            rows.push(ids_row);
        }
        frontier = start..keys.len();
    }
    let dead = keys.len();
    let mut delta: Vec<Vec<usize>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(|t| t.unwrap_or(dead)).collect())
        .collect();
    delta.push(vec![dead; columns.len()]);
    let mut labels: Vec<String> = keys.iter().map(&label).collect();
    labels.push("dead".into());
    let mut accepting: Vec<bool> = keys.iter().map(&accept).collect();
    accepting.push(false);
    Ok(Explored {
        labels,
        accepting,
        dead,
        delta,
    })
}

/// Result of an oracle sweep of a pair machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepReport {
    pub pairs_checked: usize,
    /// `(u, v, accepted)` where acceptance disagrees with the oracle.
    pub mismatches: Vec<(NormalWord, NormalWord, bool)>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// A pair at directed distance 2 or more.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TravellerViolation {
    pub side: Side,
    pub element: Word,
    pub cube: CubeId,
    pub t: usize,
    pub distance: Distance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FellowTravellerReport {
    pub max_len: usize,
    pub pairs_checked: usize,
    pub max_left: Distance,
    pub max_right: Distance,
    pub violations: Vec<TravellerViolation>,
}

impl FellowTravellerReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn elem_or_one(dm: &DivisibilityMonoid, c: Option<CubeId>) -> Element {
    c.map_or_else(Element::one, |c| dm.cube_element(c).clone())
}

impl DivisibilityMonoid {
    pub fn normal_language_automaton(&self) -> Result<NormalLanguage> {
        let n = self.table().len();
        let normal = self.normal_pair_table()?;
        let (start, dead) = (n, n + 1);
        let mut delta = vec![vec![dead; n]; n + 2];
        for b in 1..n {
            delta[start][b] = b;
            for a in 1..n {
                if normal[a][b] {
                    delta[a][b] = b;
                }
            }
        }
        Ok(NormalLanguage { cubes: n, delta })
    }

    fn normal_pair_table(&self) -> Result<Vec<Vec<bool>>> {
        let n = self.table().len();
        (0..n)
            .into_par_iter()
            .map(|a| (0..n).map(|b| self.is_normal_pair(CubeId(a), CubeId(b))).collect())
            .collect()
    }

    fn pair_machine(&self, relation: Multiplier, padding: Padding, e: Explored) -> PairAutomaton {
        PairAutomaton {
            relation,
            padding,
            generators: self.presentation().generators().to_vec(),
            cube_atoms: self.table().cubes().iter().map(|c| c.atoms.clone()).collect(),
            labels: e.labels,
            accepting: e.accepting,
            initial: 0,
            dead: e.dead,
            delta: e.delta,
        }
    }

    /// Right multiplication by `z` over left-padded convolutions. The state
    /// is the cube `d` with `U·d = V`; reading `(h, h′)` moves to
    /// `d′ = h \ (d·h′)` when that is a cube, and acceptance is `d = z`.
    pub fn right_multiplier_automaton(&self, z: CubeId) -> Result<PairAutomaton> {
        let m = self.monoid();
        let explored = explore(
            self.table().len(),
            CubeId::TRIVIAL,
            |&d, a, b| {
                let target = m.mul(self.cube_element(d), &elem_or_one(self, b))?;
                let h = elem_or_one(self, a);
                if !m.is_left_divisor(&h, &target)? {
                    return Ok(None);
                }
                Ok(self.table().by_element(&m.left_quotient(&target, &h)?))
            },
            |&d| d == z,
            |&d| m.show(self.cube_element(d)),
        )?;
        Ok(self
            .pair_machine(Multiplier::Right(z), Padding::Left, explored)
            .trim())
    }

    /// Left multiplication by `y` over right-padded convolutions.
    pub fn left_multiplier_automaton(&self, y: CubeId) -> Result<PairAutomaton> {
        self.difference_automaton(Multiplier::Left(y), Padding::Right)
    }

    /// The equality recognizer, i.e. right multiplication by `1`.
    pub fn equality_automaton(&self) -> Result<PairAutomaton> {
        self.right_multiplier_automaton(CubeId::TRIVIAL)
    }

    /// Multiplier machine for either side and padding, with states the
    /// gcd-reduced differences `(e, f)`, `|e| + |f| ≤ 2K`.
    pub fn difference_automaton(&self, relation: Multiplier, padding: Padding) -> Result<PairAutomaton> {
        let m = self.monoid();
        let c = self.cube_element(relation.cube()).clone();
        let one = Element::one();
        let (init, goal) = match relation {
            Multiplier::Left(_) => ((c, one.clone()), (one.clone(), one)),
            Multiplier::Right(_) => ((one.clone(), one), (Element::one(), c)),
        };
        let bound = 2 * self.table().max_len();
        let explored = explore(
            self.table().len(),
            init,
            |(e, f), a, b| {
                let e2 = m.mul(e, &elem_or_one(self, a))?;
                let f2 = m.mul(f, &elem_or_one(self, b))?;
                let g = m.left_gcd_by_atoms(&e2, &f2)?;
                if e2.len() + f2.len() - 2 * g.len() > bound {
                    return Ok(None);
                }
                Ok(Some((m.left_quotient(&e2, &g)?, m.left_quotient(&f2, &g)?)))
            },
            |k| *k == goal,
            |(e, f)| format!("{}|{}", m.show(e), m.show(f)),
        )?;
        Ok(self.pair_machine(relation, padding, explored).trim())
    }

    /// Restricts a multiplier machine to convolutions of normal words with
    /// well-formed padding.
    pub fn exact_language(&self, core: &PairAutomaton) -> Result<PairAutomaton> {
        let n = self.table().len();
        let normal = self.normal_pair_table()?;
        let padding = core.padding();
        // track states: 0..n last cube, n fresh, n + 1 padded
        let (fresh, padded) = (n, n + 1);
        let track = |s: usize, x: Option<CubeId>| -> Option<usize> {
            match (x, padding) {
                (None, Padding::Left) => (s == fresh || s == padded).then_some(padded),
                (None, Padding::Right) => Some(padded),
                (Some(h), _) if s == padded => (padding == Padding::Left).then_some(h.0),
                (Some(h), _) if s == fresh => Some(h.0),
                (Some(h), _) => normal[s][h.0].then_some(h.0),
            }
        };
        let explored = explore(
            n,
            (core.initial(), fresh, fresh),
            |&(q, su, sv), a, b| {
                let q2 = core.step(q, a, b);
                if q2 == core.dead() {
                    return Ok(None);
                }
                Ok(track(su, a).zip(track(sv, b)).map(|(su, sv)| (q2, su, sv)))
            },
            |&(q, _, _)| core.is_accepting(q),
            |&(q, su, sv)| {
                let t = |s: usize| match s {
                    s if s == fresh => "^".to_string(),
                    s if s == padded => "$".to_string(),
                    s => s.to_string(),
                };
                format!("{}/{}/{}", core.label(q), t(su), t(sv))
            },
        )?;
        Ok(self
            .pair_machine(core.relation(), padding, explored)
            .trim())
    }

    /// Every element of length `≤ max_len` with its normal form.
    pub fn normal_forms_up_to(&self, max_len: usize) -> Result<Vec<(Element, NormalWord)>> {
        self.monoid()
            .elements_up_to(max_len)?
            .into_par_iter()
            .map(|a| {
                let n = self.normalize_oracle(&a)?;
                Ok((a, n))
            })
            .collect()
    }

    /// Compares a machine with the oracle on all normal pairs of element
    /// length `≤ max_len`.
    pub fn sweep_multiplier(&self, machine: &PairAutomaton, max_len: usize) -> Result<SweepReport> {
        let forms = self.normal_forms_up_to(max_len)?;
        self.sweep_multiplier_on(machine, &forms)
    }

    pub fn sweep_multiplier_on(
        &self,
        machine: &PairAutomaton,
        forms: &[(Element, NormalWord)],
    ) -> Result<SweepReport> {
        let m = self.monoid();
        let c = self.cube_element(machine.relation().cube());
        let mismatches: Result<Vec<Vec<_>>> = forms
            .par_iter()
            .map(|(a, u)| {
                let target = match machine.relation() {
                    Multiplier::Left(_) => m.mul(c, a)?,
                    Multiplier::Right(_) => m.mul(a, c)?,
                };
                Ok(forms
                    .iter()
                    .filter_map(|(b, v)| {
                        let accepted = machine.accepts_words(u, v);
                        (accepted != (*b == target)).then(|| (u.clone(), v.clone(), accepted))
                    })
                    .collect())
            })
            .collect();
        Ok(SweepReport {
            pairs_checked: forms.len() * forms.len(),
            mismatches: mismatches?.into_iter().flatten().collect(),
        })
    }

    /// Directed fellow traveller check on the oracle's normal forms.
    pub fn fellow_traveller_report(&self, max_len: usize) -> Result<FellowTravellerReport> {
        self.fellow_traveller_report_with(max_len, |a| self.normalize_oracle(a))
    }

    /// For every `a` with `|a| ≤ max_len` and every non-trivial cube `c`,
    /// compares suffixes of `N(a)` and `N(c·a)` under the left distance and
    /// prefixes of `N(a)` and `N(a·c)` under the right distance.
    pub fn fellow_traveller_report_with<F>(&self, max_len: usize, normalize: F) -> Result<FellowTravellerReport>
    where
        F: Fn(&Element) -> Result<NormalWord> + Sync,
    {
        let m = self.monoid();
        let elements = m.elements_up_to(max_len)?;
        let cubes: Vec<CubeId> = self.table().non_trivial().collect();
        let found: Result<Vec<(Distance, Distance, Vec<TravellerViolation>)>> = elements
            .par_iter()
            .map(|a| {
                let na = normalize(a)?;
                let mut worst = (Distance::Zero, Distance::Zero);
                let mut bad = Vec::new();
                for &c in &cubes {
                    for side in [Side::Left, Side::Right] {
                        let b = match side {
                            Side::Left => m.mul(self.cube_element(c), a)?,
                            Side::Right => m.mul(a, self.cube_element(c))?,
                        };
                        let nb = normalize(&b)?;
                        for t in 0..=na.len().max(nb.len()) {
                            let d = match side {
                                Side::Left => self.bounded_distance_left(
                                    &self.evaluate(na.suffix(t))?,
                                    &self.evaluate(nb.suffix(t))?,
                                )?,
                                Side::Right => self.bounded_distance_right(
                                    &self.evaluate(na.prefix(t))?,
                                    &self.evaluate(nb.prefix(t))?,
                                )?,
                            };
                            let slot = match side {
                                Side::Left => &mut worst.0,
                                Side::Right => &mut worst.1,
                            };
                            *slot = (*slot).max(d);
                            if d == Distance::AtLeastTwo {
                                bad.push(TravellerViolation {
                                    side,
                                    element: a.canonical().clone(),
                                    cube: c,
                                    t,
                                    distance: d,
                                });
                            }
                        }
                    }
                }
                Ok((worst.0, worst.1, bad))
            })
            .collect();
        let mut report = FellowTravellerReport {
            max_len,
            pairs_checked: elements.len() * cubes.len(),
            max_left: Distance::Zero,
            max_right: Distance::Zero,
            violations: Vec::new(),
        };
        for (l, r, bad) in found? {
            report.max_left = report.max_left.max(l);
            report.max_right = report.max_right.max(r);
            report.violations.extend(bad);
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    const SHIFT: &str = "generators: x y z\nrel: x y = y z";
    const TWO: &str = "generators: x y z\nrel: x x = y z\nrel: y x = z z";
    const CYCLIC: &str = "generators: x y z\nrel: x x = y z\nrel: y y = z x\nrel: z z = x y";

    fn dm(text: &str) -> DivisibilityMonoid {
        DivisibilityMonoid::new(parse_presentation(text).unwrap()).unwrap()
    }

    fn nw(d: &DivisibilityMonoid, s: &str) -> NormalWord {
        NormalWord::parse(d.presentation(), d.table(), s).unwrap()
    }

    #[test]
    fn convolutions() {
        let s = |v: &str| v.chars().collect::<Vec<_>>();
        assert_eq!(
            convolve_right(&s("ab"), &s("ab")).columns,
            vec![(Some('a'), Some('a')), (Some('b'), Some('b'))]
        );
        assert_eq!(
            convolve_right(&s("a"), &s("abc")).columns,
            vec![(Some('a'), Some('a')), (None, Some('b')), (None, Some('c'))]
        );
        assert_eq!(
            convolve_left(&s("a"), &s("ba")).columns,
            vec![(None, Some('b')), (Some('a'), Some('a'))]
        );
        assert!(convolve_left::<char>(&[], &[]).columns.is_empty());
    }

    #[test]
    fn normal_language() {
        let d = dm(TWO);
        let l = d.normal_language_automaton().unwrap();
        assert!(l.accepts(&[]));
        for c in d.table().non_trivial() {
            assert!(l.accepts(&[c]));
        }
        assert!(!l.accepts(&[CubeId::TRIVIAL]));
        assert!(l.accepts(&nw(&d, "[x y].y.y.[y z]").factors));
        let c = dm(CYCLIC);
        let l = c.normal_language_automaton().unwrap();
        assert!(!l.accepts(&nw(&c, "[x z].x").factors));
    }

    #[test]
    fn shift_right_multiplier_example() {
        let d = dm(SHIFT);
        let z = d.parse_cube("z").unwrap();
        let core = d.right_multiplier_automaton(z).unwrap();
        assert!(core.state_count() <= d.table().len() + 2);
        assert!(core.accepts_words(&nw(&d, "[x y]"), &nw(&d, "x.[x y]")));
        assert!(!core.accepts_words(&nw(&d, "[x y]"), &nw(&d, "z.[x y]")));
    }

    #[test]
    fn shift_left_multiplier_example() {
        let d = dm(SHIFT);
        let y = d.parse_cube("y").unwrap();
        let core = d.left_multiplier_automaton(y).unwrap();
        assert!(core.accepts_words(&nw(&d, "x"), &nw(&d, "y.x")));
        assert!(!core.accepts_words(&nw(&d, "x"), &nw(&d, "x.y")));
    }

    #[test]
    fn equality_recognizer_is_diagonal() {
        let d = dm(TWO);
        let eq = d.equality_automaton().unwrap();
        let forms = d.normal_forms_up_to(4).unwrap();
        for (_, u) in &forms {
            for (_, v) in &forms {
                assert_eq!(eq.accepts_words(u, v), u == v);
            }
        }
    }

    #[test]
    fn multipliers_match_oracle() {
        for text in [SHIFT, TWO] {
            let d = dm(text);
            let forms = d.normal_forms_up_to(4).unwrap();
            for c in d.table().ids() {
                let r = d.right_multiplier_automaton(c).unwrap();
                assert!(r.state_count() <= d.table().len() + 2);
                let rep = d.sweep_multiplier_on(&r, &forms).unwrap();
                assert!(rep.passed(), "right {c}: {:?}", &rep.mismatches[..1]);
                let l = d.left_multiplier_automaton(c).unwrap();
                let rep = d.sweep_multiplier_on(&l, &forms).unwrap();
                assert!(rep.passed(), "left {c}: {:?}", &rep.mismatches[..1]);
            }
        }
    }

    #[test]
    fn exact_language_rejects_non_normal_tracks() {
        let d = dm(SHIFT);
        let eq = d.equality_automaton().unwrap();
        let exact = d.exact_language(&eq).unwrap();
        let xy = d.parse_cube("x").unwrap();
        let y = d.parse_cube("y").unwrap();
        // x.y is not normal: h(xy) is the cube [x y]
        let bad = convolve_left(&[xy, y], &[xy, y]);
        assert!(eq.accepts(&bad));
        assert!(!exact.accepts(&bad));
        let good = nw(&d, "y.x");
        assert!(exact.accepts_words(&good, &good));
        assert!(exact.accepts_words(&NormalWord::one(), &NormalWord::one()));
        // padding in the wrong place
        let skew = PaddedPair {
            padding: Padding::Left,
            columns: vec![(Some(y), None), (None, Some(y))],
        };
        assert!(!exact.accepts(&skew));
    }

    #[test]
    fn serialization_round_trip() {
        let d = dm(SHIFT);
        let w = d.parse_cube("[x y]").unwrap();
        for m in [
            d.right_multiplier_automaton(w).unwrap(),
            d.left_multiplier_automaton(w).unwrap(),
        ] {
            let text = m.serialize();
            assert_eq!(PairAutomaton::deserialize(&text).unwrap(), m);
        }
        let e = PairAutomaton::deserialize("divmon-pair-automaton v2\n").unwrap_err();
        assert!(matches!(e, Error::Format { line: 1, .. }));
    }

    #[test]
    fn dot_export() {
        let d = dm(SHIFT);
        let dot = d.equality_automaton().unwrap().to_dot();
        assert!(dot.starts_with("digraph multiplier {"));
        assert!(dot.contains("([x y],[x y])"));
    }

    #[test]
    fn sample_monoids_travel_within_one() {
        for text in [SHIFT, TWO, CYCLIC] {
            let r = dm(text).fellow_traveller_report(4).unwrap();
            assert!(r.passed());
            assert!(r.max_left < Distance::AtLeastTwo && r.max_right < Distance::AtLeastTwo);
        }
    }

    #[test]
    fn corrupted_h_map_breaks_fellow_travelling() {
        let d = dm(TWO);
        let m = d.monoid();
        // always peel off the largest single generator instead of h(a)
        let corrupted = |a: &Element| {
            let mut rest = a.clone();
            let mut f = Vec::new();
            while !rest.is_one() {
                let x = *m.right_irreducible_divisors(&rest)?.iter().max().unwrap();
                f.push(d.table().generator(x));
                rest = m.right_quotient(&rest, &m.generator(x))?;
            }
            f.reverse();
            Ok(NormalWord::new(f))
        };
        let r = d.fellow_traveller_report_with(3, corrupted).unwrap();
        assert!(!r.passed());
        let v = &r.violations[0];
        assert_eq!(v.distance, Distance::AtLeastTwo);
        // x·x = yz is peeled as y.z, whose last factor is unrelated to x
        assert!(r
            .violations
            .iter()
            .any(|v| v.side == Side::Left && v.element.letters() == [0] && v.t == 1));
    }

    #[test]
    fn free_monoid_travels_at_distance_one() {
        let d = dm("generators: a b");
        let r = d.fellow_traveller_report(4).unwrap();
        assert!(r.passed());
        assert_eq!((r.max_left, r.max_right), (Distance::One, Distance::One));
    }
}
