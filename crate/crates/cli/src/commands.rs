use std::fmt::Write as _;
use std::io;
use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use divmon_core::{
    check_all, parse_presentation, Alphabet, CheckReport, Condition, CubeId, DivisibilityMonoid, Error, Monoid,
    PairAutomaton, Presentation, Transducer, VerifyOptions,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::{read_file, Cli, Command, GlobalOpts, Outcome, SideArg};

/// Marks an error as a usage problem (exit code 2).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Usage(String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn exit_code_for(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<io::Error>() || cause.is::<Usage>() {
            return Outcome::USAGE;
        }
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::Parse { .. }
                | Error::Format { .. }
                | Error::Malformed(_)
                | Error::UnknownSymbol(_)
                | Error::UnknownLetter(_)
                | Error::NotHypercube(_)
                | Error::UnknownVertex(_) => Outcome::USAGE,
                _ => Outcome::DOMAIN,
            };
        }
    }
    Outcome::DOMAIN
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Hypercubes { .. } => "hypercubes",
        Command::Synthesize { .. } => "synthesize",
        Command::Normalize { .. } => "normalize",
        Command::Equal { .. } => "equal",
        Command::Graph { .. } => "graph",
        Command::Automatic { .. } => "automatic",
        Command::Verify { .. } => "verify",
        Command::Bench { .. } => "bench",
    }
}

/// Runs one parsed command line. Errors become exit codes 1 or 2.
pub fn run_command(cli: &Cli) -> Outcome {
    let name = command_name(&cli.command);
    let mut out = Outcome::new(name);
    let result = match &cli.command {
        Command::Check { file } => cmd_check(&mut out, file),
        Command::Hypercubes { file } => with_monoid(&mut out, &cli.global, file, cmd_hypercubes),
        Command::Synthesize {
            file,
            augmented,
            dot,
            output,
        } => with_monoid(&mut out, &cli.global, file, |out, dm| {
            cmd_synthesize(out, dm, *augmented, *dot, output.as_deref())
        }),
        Command::Normalize { input, word, stats } => cmd_normalize(&mut out, &cli.global, input, word, *stats),
        Command::Equal { file, u, v } => with_monoid(&mut out, &cli.global, file, |out, dm| cmd_equal(out, dm, u, v)),
        Command::Graph { file, dot, reach, scc } => with_monoid(&mut out, &cli.global, file, |out, dm| {
            cmd_graph(out, dm, *dot, reach.as_deref(), *scc)
        }),
        Command::Automatic {
            file,
            multiplier,
            side,
            dot,
            sweep,
            output,
        } => with_monoid(&mut out, &cli.global, file, |out, dm| {
            cmd_automatic(out, dm, multiplier.as_deref(), *side, *dot, *sweep, output.as_deref())
        }),
        Command::Verify { file, max_len, machine } => with_monoid(&mut out, &cli.global, file, |out, dm| {
            cmd_verify(out, dm, *max_len, machine.as_deref())
        }),
        Command::Bench { file, max_n, seed } => {
            with_monoid(&mut out, &cli.global, file, |out, dm| cmd_bench(out, dm, *max_n, *seed))
        }
    };
    match result {
        Ok(code) => out.finish(code),
        Err(e) => {
            let code = exit_code_for(&e);
            out.report.set("error", format!("{e:#}"));
            out.text = format!("error: {e:#}\n");
            out.finish(code)
        }
    }
}

fn load_presentation(path: &Path) -> anyhow::Result<Presentation> {
    let text = read_file(path)?;
    parse_presentation(&text).with_context(|| format!("parsing {}", path.display()))
}

fn record_check(out: &mut Outcome, prefix: &str, report: &CheckReport) {
    out.report.set(format!("{prefix}passed"), report.passed);
    for (i, c) in [Condition::I, Condition::II, Condition::III].into_iter().enumerate() {
        out.report.set(format!("{prefix}condition.{c}.scanned"), report.scanned[i]);
        out.report
            .set(format!("{prefix}condition.{c}.violations"), report.failures_of(c).count());
    }
}

/// Loads a presentation, runs the axiom gate and hands the monoid on.
fn with_monoid<F>(out: &mut Outcome, global: &GlobalOpts, file: &Path, f: F) -> anyhow::Result<u8>
where
    F: FnOnce(&mut Outcome, &DivisibilityMonoid) -> anyhow::Result<u8>,
{
    let dm = match gate(out, global, file)? {
        Some(dm) => dm,
        None => return Ok(Outcome::DOMAIN),
    };
    f(out, &dm)
}

fn gate(out: &mut Outcome, global: &GlobalOpts, file: &Path) -> anyhow::Result<Option<DivisibilityMonoid>> {
    let p = load_presentation(file)?;
    let monoid = Monoid::new(p);
    if global.assume_checked {
        out.report.set("check.skipped", true);
    } else {
        let report = check_all(&monoid)?;
        record_check(out, "check.", &report);
        if !report.passed {
            out.text.push_str(&report.render(monoid.presentation()));
            return Ok(None);
        }
    }
    Ok(Some(DivisibilityMonoid::from_monoid_unchecked(monoid)?))
}

fn emit(out: &mut Outcome, body: String, path: Option<&Path>) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            std::fs::write(p, body).with_context(|| format!("writing {}", p.display()))?;
            out.report.set("output", p.display());
        }
        None => out.text.push_str(&body),
    }
    Ok(())
}

fn cmd_check(out: &mut Outcome, file: &Path) -> anyhow::Result<u8> {
    let p = load_presentation(file)?;
    let monoid = Monoid::new(p);
    let report = check_all(&monoid)?;
    record_check(out, "", &report);
    for (i, v) in report.failures.iter().enumerate() {
        out.report.set(format!("violation.{i}"), format!("{}: {}", v.condition, v.detail));
    }
    out.text.push_str(&report.render(monoid.presentation()));
    Ok(if report.passed { Outcome::OK } else { Outcome::DOMAIN })
}

fn cmd_hypercubes(out: &mut Outcome, dm: &DivisibilityMonoid) -> anyhow::Result<u8> {
    let table = dm.table();
    out.report.set("cubes", table.len());
    out.report.set("max_length", table.max_len());
    out.line(format!("{} hypercubes, longest {}", table.len(), table.max_len()));
    for c in table.ids() {
        let name = dm.render_cube(c);
        let word = dm.monoid().show(dm.cube_element(c));
        let len = table.get(c).len();
        out.line(format!("{:>3}  {:<12} {:<10} length {len}", c.0, name, word));
        out.report.set(format!("cube.{}.atoms", c.0), &name);
        out.report.set(format!("cube.{}.word", c.0), &word);
        out.report.set(format!("cube.{}.length", c.0), len);
    }
    Ok(Outcome::OK)
}

fn cmd_synthesize(
    out: &mut Outcome,
    dm: &DivisibilityMonoid,
    augmented: bool,
    dot: bool,
    path: Option<&Path>,
) -> anyhow::Result<u8> {
    let t = if augmented {
        dm.synthesize_augmented()?
    } else {
        dm.synthesize()?
    };
    out.report
        .set("alphabet", if augmented { "augmented" } else { "base" })
        .set("states", t.state_count())
        .set("letters", t.letter_count())
        .set("arrows", t.arrow_count())
        .set("unreachable_states", t.unreachable_states().len());
    let body = if dot { t.to_dot() } else { t.serialize() };
    emit(out, body, path)?;
    if path.is_some() {
        out.line(format!("{} states, {} arrows", t.state_count(), t.arrow_count()));
    }
    Ok(Outcome::OK)
}

fn normalize_with(out: &mut Outcome, t: &Transducer, w: &[usize], stats: bool) -> anyhow::Result<u8> {
    let nf = t.normalize_fast(w)?;
    let rendered = t.render_normal(&nf.normal);
    out.report
        .set("word_length", w.len())
        .set("normal", &rendered)
        .set("factors", nf.normal.len())
        .set("runs", nf.runs)
        .set("steps", nf.steps);
    out.line(&rendered);
    if stats {
        out.line(format!("runs: {}", nf.runs));
        out.line(format!("steps: {}", nf.steps));
    }
    Ok(Outcome::OK)
}

fn cmd_normalize(out: &mut Outcome, global: &GlobalOpts, input: &Path, word: &str, stats: bool) -> anyhow::Result<u8> {
    let text = read_file(input)?;
    if text.trim_start().starts_with("divmon-transducer") {
        let t = Transducer::deserialize(&text).with_context(|| format!("loading {}", input.display()))?;
        if t.alphabet() != Alphabet::Base {
            return Err(usage("normalize needs a machine over the generators, not the augmented one"));
        }
        let w = Presentation::free(t.generators().to_vec())?.parse_word(word)?;
        out.report.set("source", "machine");
        return normalize_with(out, &t, &w, stats);
    }
    with_monoid(out, global, input, |out, dm| {
        let t = dm.synthesize()?;
        let w = dm.presentation().parse_word(word)?;
        out.report.set("source", "presentation");
        normalize_with(out, &t, &w, stats)
    })
}

fn cmd_equal(out: &mut Outcome, dm: &DivisibilityMonoid, u: &str, v: &str) -> anyhow::Result<u8> {
    let t = dm.synthesize()?;
    let p = dm.presentation();
    let nu = t.normalize_fast(&p.parse_word(u)?)?.normal;
    let nv = t.normalize_fast(&p.parse_word(v)?)?.normal;
    let equal = nu == nv;
    out.report
        .set("left", t.render_normal(&nu))
        .set("right", t.render_normal(&nv))
        .set("equal", equal);
    out.line(format!("{} = {}", u.trim(), t.render_normal(&nu)));
    out.line(format!("{} = {}", v.trim(), t.render_normal(&nv)));
    out.line(if equal { "equal" } else { "not equal" });
    Ok(if equal { Outcome::OK } else { Outcome::DOMAIN })
}

fn cmd_graph(
    out: &mut Outcome,
    dm: &DivisibilityMonoid,
    dot: bool,
    reach: Option<&[String]>,
    scc: bool,
) -> anyhow::Result<u8> {
    let g = dm.hypercube_graph()?;
    out.report.set("vertices", g.vertex_count()).set("edges", g.edges().count());
    if let Some([from, to]) = reach {
        let (a, b) = (dm.parse_cube(from)?, dm.parse_cube(to)?);
        let r = g.reachable(a, b)?;
        out.report.set("reach.from", dm.render_cube(a)).set("reach.to", dm.render_cube(b)).set("reachable", r);
        out.line(format!(
            "{} {} {}",
            dm.render_cube(a),
            if r { "->*" } else { "-/->" },
            dm.render_cube(b)
        ));
    } else if reach.is_some() {
        return Err(usage("--reach takes FROM and TO"));
    }
    if scc {
        let restrict = g.default_restriction();
        let connected = g.strongly_connected(restrict)?;
        let names: Vec<String> = restrict.iter().map(|&c| dm.render_cube(c)).collect();
        out.report
            .set("scc.vertices", names.join(", "))
            .set("strongly_connected", connected);
        out.line(format!(
            "non-central cubes {{{}}}: {}",
            names.join(", "),
            if connected { "strongly connected" } else { "not strongly connected" }
        ));
    }
    if dot {
        out.text = g.to_dot(dm);
    } else if reach.is_none() && !scc {
        for (a, b) in g.edges() {
            out.line(format!("{} -> {}", dm.render_cube(a), dm.render_cube(b)));
        }
    }
    Ok(Outcome::OK)
}

fn sweep_into(
    out: &mut Outcome,
    dm: &DivisibilityMonoid,
    key: &str,
    machine: &PairAutomaton,
    forms: Option<&[(divmon_core::Element, divmon_core::NormalWord)]>,
) -> anyhow::Result<bool> {
    let Some(forms) = forms else {
        return Ok(true);
    };
    let r = dm.sweep_multiplier_on(machine, forms)?;
    out.report.set(format!("{key}.sweep.pairs"), r.pairs_checked);
    out.report.set(format!("{key}.sweep.mismatches"), r.mismatches.len());
    Ok(r.passed())
}

#[allow(clippy::too_many_arguments)]
fn cmd_automatic(
    out: &mut Outcome,
    dm: &DivisibilityMonoid,
    multiplier: Option<&str>,
    side: SideArg,
    dot: bool,
    sweep: Option<usize>,
    path: Option<&Path>,
) -> anyhow::Result<u8> {
    let table = dm.table();
    let bound = table.len() + 2;
    let forms = sweep.map(|l| dm.normal_forms_up_to(l)).transpose()?;
    let forms = forms.as_deref();
    let mut ok = true;
    let mut dots = String::new();
    if let Some(l) = sweep {
        out.report.set("sweep.max_len", l);
    }

    let cubes: Vec<CubeId> = match multiplier {
        Some(c) => vec![dm.parse_cube(c)?],
        None => {
            let nl = dm.normal_language_automaton()?;
            let eq = dm.equality_automaton()?;
            out.report.set("normal_language.states", nl.state_count());
            out.report.set("equality.states", eq.state_count());
            out.line(format!("normal language: {} states", nl.state_count()));
            out.line(format!("equality recognizer: {} states", eq.state_count()));
            ok &= sweep_into(out, dm, "equality", &eq, forms)?;
            if dot {
                dots.push_str(&eq.to_dot());
            }
            table.ids().collect()
        }
    };
    out.report.set("right.bound", bound);
    for c in cubes {
        let name = dm.render_cube(c);
        let mut machines = Vec::new();
        if side != SideArg::Left {
            machines.push(("right", dm.right_multiplier_automaton(c)?));
        }
        if side != SideArg::Right {
            machines.push(("left", dm.left_multiplier_automaton(c)?));
        }
        let mut summary = Vec::new();
        for (s, m) in machines {
            let key = format!("{s}.{}", c.0);
            out.report.set(format!("{key}.cube"), &name);
            out.report.set(format!("{key}.states"), m.state_count());
            summary.push(format!("{s} {}", m.state_count()));
            if s == "right" && m.state_count() > bound {
                ok = false;
                out.line(format!("right multiplier of {name} exceeds {bound} states"));
            }
            ok &= sweep_into(out, dm, &key, &m, forms)?;
            if dot && multiplier.is_some() {
                dots.push_str(&m.to_dot());
            }
        }
        out.line(format!("multipliers of {name}: {} states", summary.join(", ")));
    }
    if let Some(l) = sweep {
        out.line(format!("oracle sweep at length {l}: {}", if ok { "agrees" } else { "MISMATCH" }));
    }
    out.report.set("passed", ok);
    if dot && path.is_none() {
        out.text = dots;
    } else if dot {
        emit(out, dots, path)?;
    } else if path.is_some() {
        return Err(usage("-o needs --dot"));
    }
    Ok(if ok { Outcome::OK } else { Outcome::DOMAIN })
}

fn cmd_verify(out: &mut Outcome, dm: &DivisibilityMonoid, max_len: usize, machine: Option<&Path>) -> anyhow::Result<u8> {
    let t = match machine {
        Some(path) => {
            let text = read_file(path)?;
            Transducer::deserialize(&text).with_context(|| format!("loading {}", path.display()))?
        }
        None => dm.synthesize()?,
    };
    let report = divmon_core::verify(dm, Some(&t), VerifyOptions::uniform(max_len))?;
    out.report.set("max_len", max_len);
    for r in &report.results {
        out.report.set(format!("{}.checked", r.name), r.checked);
        out.report.set(format!("{}.failures", r.name), r.failures);
        let mut line = format!(
            "{:<22} {:>8} checked  {}",
            r.name,
            r.checked,
            if r.passed() { "ok" } else { "FAILED" }
        );
        if let Some(f) = &r.first_failure {
            let _ = write!(line, "  first: {f}");
        }
        out.line(line);
    }
    out.report.set("interior_trivial", report.interior_trivial);
    out.report.set("passed", report.passed());
    Ok(if report.passed() { Outcome::OK } else { Outcome::DOMAIN })
}

fn bench_sizes(max_n: usize) -> Vec<usize> {
    let mut sizes = vec![0];
    let mut n = 1;
    while n <= max_n {
        sizes.push(n);
        n *= 2;
    }
    sizes
}

fn cmd_bench(out: &mut Outcome, dm: &DivisibilityMonoid, max_n: usize, seed: u64) -> anyhow::Result<u8> {
    if dm.presentation().rank() == 0 {
        return Err(usage("presentation has no generators"));
    }
    let t = dm.synthesize()?;
    let rank = dm.presentation().rank();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut ok = true;
    out.report.set("seed", seed);
    out.line(format!("{:<8} {:>6} {:>10} {:>10} {:>7} {:>10}", "family", "n", "steps", "bound", "ratio", "time"));
    for family in ["power", "random"] {
        let mut prev: Option<(usize, usize)> = None;
        for n in bench_sizes(max_n) {
            let w: Vec<usize> = match family {
                "power" => vec![0; n],
                _ => (0..n).map(|_| rng.gen_range(0..rank)).collect(),
            };
            let start = Instant::now();
            let nf = t.normalize_fast(&w)?;
            let elapsed = start.elapsed();
            let bound = n * (n + 1) / 2;
            let ratio = match prev {
                Some((pn, ps)) if pn * 2 == n && ps > 0 => Some(nf.steps as f64 / ps as f64),
                _ => None,
            };
            if nf.steps > bound || (n >= 128 && ratio.is_some_and(|r| r > 4.5)) {
                ok = false;
            }
            if family == "power" && prev.is_some_and(|(_, ps)| nf.steps < ps) {
                ok = false;
            }
            let key = format!("{family}.{n}");
            out.report.set(format!("{key}.steps"), nf.steps);
            out.report.set(format!("{key}.runs"), nf.runs);
            if let Some(r) = ratio {
                out.report.set(format!("{key}.ratio"), format!("{r:.3}"));
            }
            out.line(format!(
                "{family:<8} {n:>6} {:>10} {bound:>10} {:>7} {:>10.1?}",
                nf.steps,
                ratio.map(|r| format!("{r:.2}")).unwrap_or_else(|| "-".into()),
                elapsed
            ));
            prev = Some((n, nf.steps));
        }
    }
    out.report.set("passed", ok);
    Ok(if ok { Outcome::OK } else { Outcome::DOMAIN })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_double() {
        assert_eq!(bench_sizes(8), vec![0, 1, 2, 4, 8]);
        assert_eq!(bench_sizes(0), vec![0]);
    }

    #[test]
    fn codes_follow_error_kind() {
        let parse: anyhow::Error = Error::Parse { line: 1, message: "x".into() }.into();
        assert_eq!(exit_code_for(&parse.context("reading")), Outcome::USAGE);
        let cap: anyhow::Error = Error::ClassCapExceeded { cap: 1 }.into();
        assert_eq!(exit_code_for(&cap), Outcome::DOMAIN);
        assert_eq!(exit_code_for(&usage("bad")), Outcome::USAGE);
        assert_eq!(exit_code_for(&anyhow::anyhow!("other")), Outcome::DOMAIN);
    }
}
