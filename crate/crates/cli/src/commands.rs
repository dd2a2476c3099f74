use std::fmt::Display;
use std::path::Path;

use credal_core::chains2mono::{
    chain_graph, choquet, enumerate_extreme_2mono, is_two_monotone, LowerProbability,
};
use credal_core::credal::{
    build_credal_hrep, is_coherent, CredalError, CredalSet, Gamble, LowerPrevision,
};
use credal_core::exactla::{format_rat, Rat, RatVector};
use credal_core::fanwalk::{self, verify_graph, MescGraph};
use credal_core::io::{
    parse_gamble, parse_model, render, vertices_csv, Model, Rendering, MAX_INPUT_BYTES,
};
use credal_core::polytope::{vertices_bruteforce_with, OracleLimits};
use credal_core::pri::{
    count_bounds, enumerate_extreme_pri, induced_2mono, is_coherent_pri, natural_extension_pri,
    PriError,
};

use crate::report::RunReport;
use crate::{Common, Engine, Status};

/// Size cap for `--engine oracle` and `natex --verify`.
const ORACLE: OracleLimits = OracleLimits {
    max_dim: 6,
    max_constraints: 40,
};

const DECIMAL_DIGITS: usize = 12;

/// Ends a command early with an exit status; the message is already printed.
struct Fail(Status);

type Run<T> = Result<T, Fail>;

fn input_error(msg: impl Display) -> Fail {
    eprintln!("error: {msg}");
    Fail(Status::InputError)
}

fn property_failure(msg: impl Display) -> Fail {
    eprintln!("{msg}");
    Fail(Status::PropertyFailure)
}

fn credal_error(e: CredalError) -> Fail {
    match e {
        CredalError::Incoherent | CredalError::EmptyCredalSet => {
            property_failure(format!("error: {e}"))
        }
        e => input_error(e),
    }
}

fn pri_error(e: PriError) -> Fail {
    match e {
        PriError::Incoherent => property_failure(format!("error: {e}")),
        e => input_error(e),
    }
}

fn read_file(path: &Path) -> Run<Vec<u8>> {
    let meta =
        std::fs::metadata(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    if meta.len() > MAX_INPUT_BYTES as u64 {
        return Err(input_error(format!(
            "{}: larger than {MAX_INPUT_BYTES} bytes",
            path.display()
        )));
    }
    std::fs::read(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load(common: &Common, report: &mut RunReport) -> Run<Model> {
    let bytes = read_file(&common.model)?;
    report.model(&bytes);
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| input_error(format!("{}: {e}", common.model.display())))?;
    let model =
        parse_model(text).map_err(|e| input_error(format!("{}: {e}", common.model.display())))?;
    report.set("model_kind", model.kind());
    report.set("outcomes", model.space().len());
    Ok(model)
}

fn write_file(path: &Path, contents: &str, report: &mut RunReport) -> Run<()> {
    std::fs::write(path, contents).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    report.output(path);
    Ok(())
}

fn rendering(common: &Common) -> Rendering {
    if common.decimal {
        eprintln!(
            "note: decimal output is rounded to {DECIMAL_DIGITS} digits and only approximate"
        );
        Rendering::Decimal(DECIMAL_DIGITS)
    } else {
        Rendering::Exact
    }
}

fn finish(report: &RunReport, path: Option<&Path>, result: Run<()>) -> Status {
    let status = match result {
        Ok(()) => Status::Ok,
        Err(Fail(s)) => s,
    };
    if let Err(e) = report.finish(path) {
        eprintln!("error: cannot write report: {e}");
        return Status::InputError;
    }
    status
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn check(common: &Common) -> Status {
    let mut report = RunReport::new("check");
    let result = check_inner(common, &mut report);
    finish(&report, common.report.as_deref(), result)
}

fn check_inner(common: &Common, report: &mut RunReport) -> Run<()> {
    let model = load(common, report)?;
    let how = rendering(common);
    let coherent = match &model {
        Model::Pri(m) => {
            let c = is_coherent_pri(m);
            println!("avoids sure loss: {}", yes_no(c.avoids_sure_loss));
            println!("coherent: {}", yes_no(c.coherent));
            if let Some((lo, up)) = &c.repaired {
                let row = |v: &[Rat]| {
                    v.iter()
                        .map(|x| render(x, how))
                        .collect::<Vec<_>>()
                        .join(",")
                };
                println!("outcome,{}", m.space().names().join(","));
                println!("reachable lower,{}", row(lo));
                println!("reachable upper,{}", row(up));
            }
            if c.coherent {
                let two = induced_2mono(m)
                    .map(|l| is_two_monotone(&l))
                    .map_err(pri_error)?;
                println!("2-monotone: {}", yes_no(two));
                report.set("two_monotone", two);
            }
            c.coherent
        }
        Model::LowerProbability(l) => {
            let two = is_two_monotone(l);
            let c = is_coherent(&l.to_lower_prevision()).map_err(credal_error)?;
            println!("avoids sure loss: {}", yes_no(c.nonempty));
            println!("coherent: {}", yes_no(c.coherent));
            println!("2-monotone: {}", yes_no(two));
            report.set("two_monotone", two);
            c.coherent
        }
        Model::LowerPrevision(lp) => {
            let c = is_coherent(lp).map_err(credal_error)?;
            println!("avoids sure loss: {}", yes_no(c.nonempty));
            println!("coherent: {}", yes_no(c.coherent));
            if c.nonempty && !c.coherent {
                for (i, (a, m)) in lp.assessments().iter().zip(&c.attained).enumerate() {
                    if let Some(m) = m {
                        if *m != a.lower {
                            println!(
                                "assessment {i}: bound {} but minimum {}",
                                render(&a.lower, how),
                                render(m, how)
                            );
                        }
                    }
                }
            }
            c.coherent
        }
    };
    report.set("coherent", coherent);
    if coherent {
        Ok(())
    } else {
        Err(Fail(Status::PropertyFailure))
    }
}

fn resolve(engine: Engine, model: &Model) -> Engine {
    match (engine, model) {
        (Engine::Auto, Model::Pri(_)) => Engine::Pri,
        (Engine::Auto, Model::LowerProbability(l)) if is_two_monotone(l) => Engine::Chains,
        (Engine::Auto, _) => Engine::Walk,
        (e, _) => e,
    }
}

fn engine_name(e: Engine) -> &'static str {
    match e {
        Engine::Auto => "auto",
        Engine::Walk => "walk",
        Engine::Chains => "chains",
        Engine::Pri => "pri",
        Engine::Oracle => "oracle",
    }
}

fn two_monotone(model: &Model) -> Run<&LowerProbability> {
    match model {
        Model::LowerProbability(l) if is_two_monotone(l) => Ok(l),
        Model::LowerProbability(_) => Err(input_error(
            "engine chains needs a 2-monotone lower probability",
        )),
        _ => Err(input_error("engine chains needs a lower_probability model")),
    }
}

fn credal_set(model: &Model) -> Run<CredalSet> {
    CredalSet::new(model.to_lower_prevision()).map_err(credal_error)
}

fn walk_graph(model: &Model) -> Run<MescGraph> {
    let set = credal_set(model)?;
    let rep = set.rep();
    fanwalk::walk(&rep.polytope, &rep.universe, None)
        .map_err(|e| input_error(format!("fan walk failed: {e}")))
}

fn oracle_points(lp: &LowerPrevision) -> Run<Vec<RatVector>> {
    let rep = build_credal_hrep(lp).map_err(credal_error)?;
    match vertices_bruteforce_with(&rep.polytope, ORACLE) {
        Ok(v) => Ok(v.points()),
        Err(e) => Err(input_error(format!(
            "{e}; use --engine walk, chains or pri"
        ))),
    }
}

/// A graph-producing engine applied to the model, with its ties count.
fn graph_for(engine: Engine, model: &Model) -> Run<(MescGraph, usize)> {
    match engine {
        Engine::Pri => match model {
            Model::Pri(m) => {
                let e = enumerate_extreme_pri(m).map_err(pri_error)?;
                Ok((e.graph, e.ties))
            }
            _ => Err(input_error("engine pri needs a pri model")),
        },
        Engine::Chains => Ok((chain_graph(two_monotone(model)?), 0)),
        Engine::Walk => Ok((walk_graph(model)?, 0)),
        Engine::Oracle => Err(input_error(
            "the oracle does not build graphs; use --engine walk, chains or pri",
        )),
        Engine::Auto => unreachable!("resolved before dispatch"),
    }
}

pub fn vertices(common: &Common, engine: Engine, out: Option<&Path>) -> Status {
    let mut report = RunReport::new("vertices");
    let result = vertices_inner(common, engine, out, &mut report);
    finish(&report, common.report.as_deref(), result)
}

fn vertices_inner(
    common: &Common,
    engine: Engine,
    out: Option<&Path>,
    report: &mut RunReport,
) -> Run<()> {
    let model = load(common, report)?;
    let how = rendering(common);
    let engine = resolve(engine, &model);
    report.set("engine", engine_name(engine));
    let points = match engine {
        Engine::Pri => match &model {
            Model::Pri(m) => enumerate_extreme_pri(m).map_err(pri_error)?.vertices,
            _ => return Err(input_error("engine pri needs a pri model")),
        },
        Engine::Chains => {
            let e = enumerate_extreme_2mono(two_monotone(&model)?);
            report.set("chains", e.raw);
            e.vertices
        }
        Engine::Walk => walk_graph(&model)?.vertices(),
        Engine::Oracle => {
            let lp = model.to_lower_prevision();
            let points = oracle_points(&lp)?;
            if !is_coherent(&lp).map_err(credal_error)?.coherent {
                return Err(credal_error(CredalError::Incoherent));
            }
            points
        }
        Engine::Auto => unreachable!("resolved above"),
    };
    report.set("vertices", points.len());
    let csv = vertices_csv(model.space(), &points, how);
    match out {
        Some(path) => {
            write_file(path, &csv, report)?;
            println!("vertices: {}", points.len());
        }
        None => {
            print!("{csv}");
            eprintln!("vertices: {}", points.len());
        }
    }
    Ok(())
}

/// `fan` prints a summary; `graph` prints the DOT text unless `--dot` is given.
pub fn fan(
    common: &Common,
    engine: Engine,
    dot: Option<&Path>,
    out: Option<&Path>,
    graph_mode: bool,
) -> Status {
    let mut report = RunReport::new(if graph_mode { "graph" } else { "fan" });
    let result = fan_inner(common, engine, dot, out, graph_mode, &mut report);
    finish(&report, common.report.as_deref(), result)
}

fn fan_inner(
    common: &Common,
    engine: Engine,
    dot: Option<&Path>,
    out: Option<&Path>,
    graph_mode: bool,
    report: &mut RunReport,
) -> Run<()> {
    let model = load(common, report)?;
    let engine = resolve(engine, &model);
    report.set("engine", engine_name(engine));
    let (graph, ties) = graph_for(engine, &model)?;
    let n = model.space().len();
    let summary = verify_graph(&graph, n - 1);
    report.set("nodes", summary.nodes);
    report.set("edges", summary.edges);
    report.set("vertices", summary.vertices);
    report.set("connected", summary.connected);
    report.set("regular", summary.regular);
    if let Some(path) = out {
        let json = serde_json_pretty(&graph);
        write_file(path, &json, report)?;
    }
    match dot {
        Some(path) => write_file(path, &graph.to_dot(), report)?,
        None if graph_mode => print!("{}", graph.to_dot()),
        None => {}
    }
    // The DOT text owns stdout in graph mode.
    let say = |line: String| {
        if graph_mode && dot.is_none() {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    };
    say(format!("nodes: {}", summary.nodes));
    say(format!("edges: {}", summary.edges));
    say(format!("vertices: {}", summary.vertices));
    say(format!("connected: {}", yes_no(summary.connected)));
    let hist: Vec<String> = summary
        .degree_histogram
        .iter()
        .map(|(d, c)| format!("{d}:{c}"))
        .collect();
    say(format!("degree histogram: {}", hist.join(" ")));
    say(format!("{}-regular: {}", n - 1, yes_no(summary.regular)));
    if ties > 0 {
        say(format!(
            "tied replacements: {ties} (overlapping triangulations)"
        ));
        report.set("ties", ties);
    }
    if !graph.unmatched.is_empty() {
        say(format!(
            "facets without a neighbor: {}",
            graph.unmatched.len()
        ));
    }
    if summary.connected {
        Ok(())
    } else {
        Err(property_failure("error: the cone graph is not connected"))
    }
}

fn serde_json_pretty(graph: &MescGraph) -> String {
    let mut s = format!("{:#}", graph.to_json());
    s.push('\n');
    s
}

pub fn natex(common: &Common, gamble: &Path, verify: bool) -> Status {
    let mut report = RunReport::new("natex");
    let result = natex_inner(common, gamble, verify, &mut report);
    finish(&report, common.report.as_deref(), result)
}

fn natex_inner(common: &Common, gamble: &Path, verify: bool, report: &mut RunReport) -> Run<()> {
    let model = load(common, report)?;
    let how = rendering(common);
    let bytes = read_file(gamble)?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| input_error(format!("{}: {e}", gamble.display())))?;
    let f: Gamble = parse_gamble(text, model.space())
        .map_err(|e| input_error(format!("{}: {e}", gamble.display())))?;
    let value = match &model {
        Model::Pri(m) => natural_extension_pri(m, &f).map_err(pri_error)?,
        Model::LowerProbability(l) if is_two_monotone(l) => choquet(l, &f),
        _ => credal_set(&model)?
            .natural_extension(&f)
            .map_err(credal_error)?,
    };
    report.set("value", format_rat(&value));
    match how {
        Rendering::Exact => println!("{}", format_rat(&value)),
        Rendering::Decimal(_) => println!(
            "{} (approximate; exact {})",
            render(&value, how),
            format_rat(&value)
        ),
    }
    if verify {
        verify_value(&model, &f, &value, report)?;
    }
    Ok(())
}

fn verify_value(model: &Model, f: &Gamble, value: &Rat, report: &mut RunReport) -> Run<()> {
    let lp = model.to_lower_prevision();
    let rep = build_credal_hrep(&lp).map_err(credal_error)?;
    if !ORACLE.admits(&rep.polytope) {
        println!("verify: skipped, model exceeds the oracle limit");
        report.set("verify", "skipped");
        return Ok(());
    }
    let points = oracle_points(&lp)?;
    let oracle = points.iter().map(|p| f.expectation(p)).min();
    match oracle {
        Some(o) if &o == value => {
            println!("verify: match");
            report.set("verify", "match");
            Ok(())
        }
        Some(o) => {
            report.set("verify", "mismatch");
            Err(property_failure(format!(
                "verify: mismatch, oracle gives {}",
                format_rat(&o)
            )))
        }
        None => {
            report.set("verify", "empty");
            Err(property_failure("verify: the credal set is empty"))
        }
    }
}

pub fn bounds(n: usize, report_path: Option<&Path>) -> Status {
    let mut report = RunReport::new("bounds");
    report.set("n", n);
    let result = if n < 3 {
        Err(input_error("bounds needs n ≥ 3"))
    } else {
        let (lo, hi) = count_bounds(n);
        println!("({lo}, {hi})");
        report.set("lower", &lo);
        report.set("upper", &hi);
        Ok(())
    };
    finish(&report, report_path, result)
}
