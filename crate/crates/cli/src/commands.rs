use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};

use cla_core::axioms::{self, AxiomViolation};
use cla_core::io::{
    self, generate_synthetic_study, AttentionRule, Behavior, Format, Study, Subject, SyntheticSpec,
};
use cla_core::oracle::{self, OracleMode, SweepCheck, SweepReport};
use cla_core::power::{self, describe, PowerConfig, RandomMethod, Rate};
use cla_core::solver::Conflict;
use cla_core::{
    guaranteed_welfare_bound, solve_rationalizability, ThresholdProfile, Verdict, Witness,
};

use crate::render::{self, fixed2, percent};
use crate::{
    AxiomArgs, CliError, GenerateArgs, InputFormat, MethodArg, ModeArg, OracleArgs, OutputFormat,
    PowerArgs, ProfileArgs, StudyArgs, SweepArg, TestArgs,
};

type CmdResult = Result<bool, CliError>;

fn read_study(path: &Path, format: Option<InputFormat>) -> Result<Study, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let format = match format {
        Some(f) => f.into(),
        None if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
        None => Format::Json,
    };
    io::parse_study(&text, format).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load(args: &StudyArgs) -> Result<Study, CliError> {
    read_study(&args.study, args.input_format)
}

fn max_budget(study: &Study) -> usize {
    study.design.iter().map(|b| b.len()).max().unwrap_or(1).max(1)
}

fn uniform(ks: &[usize]) -> Vec<ThresholdProfile> {
    ks.iter().map(|&k| ThresholdProfile::Uniform(k)).collect()
}

fn resolve_profiles(args: &ProfileArgs, study: &Study) -> Result<Vec<ThresholdProfile>, CliError> {
    if let Some(k) = args.k {
        return Ok(vec![ThresholdProfile::Uniform(k)]);
    }
    if let Some(ks) = &args.ks {
        return Ok(uniform(&ks.0));
    }
    if let Some(path) = &args.profile {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let p: ThresholdProfile = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        match &p {
            ThresholdProfile::Uniform(0) => return Err(CliError::Usage("thresholds must be at least 1".into())),
            ThresholdProfile::PerBudget(ks) if ks.contains(&0) => {
                return Err(CliError::Usage("thresholds must be at least 1".into()))
            }
            ThresholdProfile::PerBudget(ks) if ks.len() != study.design.len() => {
                return Err(CliError::Usage(format!(
                    "profile lists {} thresholds for a design of {} budgets",
                    ks.len(),
                    study.design.len()
                )))
            }
            _ => {}
        }
        return Ok(vec![p]);
    }
    Ok(uniform(&(1..=max_budget(study)).collect::<Vec<_>>()))
}

fn subject_profile(study: &Study, s: &Subject, p: &ThresholdProfile) -> Result<ThresholdProfile, CliError> {
    power::profile_for_subject(p, &study.design, &s.data).map_err(|e| CliError::Input(e.to_string()))
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
fn write_stdout(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: writing output: {e}");
        }
    }
}

fn emit(format: OutputFormat, text: String, value: Value) {
    match format {
        OutputFormat::Text => write_stdout(&format!("{text}\n")),
        OutputFormat::Json => {
            write_stdout(&format!("{}\n", serde_json::to_string_pretty(&value).expect("report serializes")))
        }
    }
}

fn labels(study: &Study, ids: &[usize]) -> Vec<String> {
    ids.iter().map(|&a| study.label(a)).collect()
}

fn witness_json(study: &Study, s: &Subject, w: &Witness) -> Value {
    json!({
        "preference": labels(study, w.preference.ranking()),
        "attention": w.attention.iter().enumerate().map(|(i, a)| json!({
            "budget": s.design_index[i],
            "considered": study.labels_of(*a),
        })).collect::<Vec<_>>(),
    })
}

fn observed(study: &Study, s: &Subject, i: usize) -> String {
    format!("{}→{}", render::set(study, s.data.budget(i)), study.label(s.data.choice(i)))
}

fn conflict_text(study: &Study, s: &Subject, c: &Conflict) -> String {
    let mut parts = Vec::new();
    if !c.cycle.is_empty() {
        let mut cyc = labels(study, &c.cycle);
        cyc.push(cyc[0].clone());
        parts.push(format!("cycle {}", cyc.join(" → ")));
    }
    if !c.observations.is_empty() {
        let obs: Vec<String> = c.observations.iter().map(|&i| observed(study, s, i)).collect();
        parts.push(format!("budgets {}", obs.join(", ")));
    }
    parts.join("; ")
}

fn conflict_json(study: &Study, s: &Subject, c: &Conflict) -> Value {
    json!({
        "cycle": labels(study, &c.cycle),
        "budgets": c.observations.iter().map(|&i| s.design_index[i]).collect::<Vec<_>>(),
    })
}

fn rate_json(r: &Rate) -> Value {
    serde_json::to_value(r).expect("rate serializes")
}

fn solve_all(study: &Study, p: &ThresholdProfile) -> Result<Vec<Verdict>, CliError> {
    study
        .subjects
        .par_iter()
        .map(|s| {
            let sp = subject_profile(study, s, p)?;
            solve_rationalizability(&s.data, &sp).map_err(|e| CliError::Usage(e.to_string()))
        })
        .collect()
}

fn no_subjects(study: &Study) -> Result<(), CliError> {
    if study.subjects.is_empty() {
        Err(CliError::Input("study has no subjects".into()))
    } else {
        Ok(())
    }
}

pub fn test(args: &TestArgs) -> CmdResult {
    let study = load(&args.study)?;
    no_subjects(&study)?;
    let profiles = resolve_profiles(&args.profile, &study)?;
    let mut text = Vec::new();
    let mut sections = Vec::new();
    for p in &profiles {
        let verdicts = solve_all(&study, p)?;
        let passed = verdicts.iter().filter(|v| v.is_feasible()).count();
        let n = verdicts.len();
        let pass = Rate::new(passed, n, power::DEFAULT_ALPHA).expect("n ≥ 1");
        text.push(p.to_string());
        let mut subjects = Vec::new();
        for (s, v) in study.subjects.iter().zip(&verdicts) {
            match v {
                Verdict::Feasible(w) => {
                    text.push(format!("  {}  pass", s.id));
                    subjects.push(json!({"id": s.id, "feasible": true, "witness": witness_json(&study, s, w)}));
                }
                Verdict::Infeasible(c) => {
                    text.push(format!("  {}  fail  {}", s.id, conflict_text(&study, s, c)));
                    subjects.push(json!({"id": s.id, "feasible": false, "conflict": conflict_json(&study, s, c)}));
                }
            }
        }
        text.push(format!(
            "  {passed}/{n} pass ({}), 95% CI [{}, {}]",
            percent(passed, n),
            fixed2(pass.ci.0),
            fixed2(pass.ci.1)
        ));
        sections.push(json!({"profile": p, "subjects": subjects, "pass": rate_json(&pass)}));
    }
    emit(args.format, text.join("\n"), json!({"command": "test", "results": sections}));
    Ok(true)
}

pub fn welfare(args: &TestArgs) -> CmdResult {
    let study = load(&args.study)?;
    no_subjects(&study)?;
    let profiles = resolve_profiles(&args.profile, &study)?;
    let mut text = Vec::new();
    let mut summary_rows = Vec::new();
    let mut sections = Vec::new();
    for p in &profiles {
        let reports: Vec<_> = study
            .subjects
            .par_iter()
            .map(|s| Ok(guaranteed_welfare_bound(&s.data, &subject_profile(&study, s, p)?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        text.push(p.to_string());
        let mut subjects = Vec::new();
        let mut infeasible = Vec::new();
        let mut bounds = Vec::new();
        for (s, r) in study.subjects.iter().zip(&reports) {
            match r {
                Ok(r) => {
                    let contours: Vec<String> = r
                        .per_alternative
                        .iter()
                        .map(|b| format!("{} {}", study.label(b.alternative), b.size))
                        .collect();
                    text.push(format!(
                        "  {}  W = {}  argmax {}  contours: {}",
                        s.id,
                        r.bound,
                        study.label(r.argmax),
                        contours.join(", ")
                    ));
                    bounds.push(r.bound as f64);
                    subjects.push(json!({
                        "id": s.id,
                        "bound": r.bound,
                        "argmax": study.label(r.argmax),
                        "contours": r.per_alternative.iter().map(|b| json!({
                            "alternative": study.label(b.alternative),
                            "size": b.size,
                            "lower_contour": study.labels_of(b.lower_contour),
                        })).collect::<Vec<_>>(),
                    }));
                }
                Err(cla_core::welfare::WelfareError::NotRationalizable(_)) => infeasible.push(s.id.clone()),
                Err(e) => return Err(CliError::Usage(e.to_string())),
            }
        }
        if !infeasible.is_empty() {
            text.push(format!("  not rationalizable (excluded): {}", infeasible.join(", ")));
        }
        let summary = describe(&bounds);
        let mut row = vec![p.to_string()];
        match &summary {
            Some(sm) => row.extend([
                format!("{} ({})", fixed2(sm.mean), fixed2(sm.sd)),
                fixed2(sm.min),
                fixed2(sm.q1),
                fixed2(sm.median),
                fixed2(sm.q3),
                fixed2(sm.max),
                sm.n.to_string(),
            ]),
            None => row.extend(["-", "-", "-", "-", "-", "-", "0"].map(String::from)),
        }
        summary_rows.push(row);
        sections.push(json!({
            "profile": p,
            "subjects": subjects,
            "not_rationalizable": infeasible,
            "summary": summary,
        }));
    }
    text.push(String::new());
    text.push(render::table(
        &["threshold", "mean (sd)", "min", "25%", "50%", "75%", "max", "n"],
        &summary_rows,
    ));
    emit(args.format, text.join("\n"), json!({"command": "welfare", "results": sections}));
    Ok(true)
}

pub fn power(args: &PowerArgs) -> CmdResult {
    let study = load(&args.study)?;
    no_subjects(&study)?;
    let ks = match &args.ks {
        Some(ks) => ks.0.clone(),
        None => (1..=max_budget(&study)).collect(),
    };
    let methods = match args.method {
        MethodArg::Bronars => vec![RandomMethod::Bronars],
        MethodArg::Bootstrap => vec![RandomMethod::Bootstrap],
        MethodArg::Both => vec![RandomMethod::Bronars, RandomMethod::Bootstrap],
    };
    let config = PowerConfig { methods: methods.clone(), n_random: args.n as usize, seed: args.seed, alpha: args.alpha };
    let report = power::run_power_study(&study.datasets(), &study.design, &uniform(&ks), &config)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let name = |m: RandomMethod| match m {
        RandomMethod::Bronars => "Bronars",
        RandomMethod::Bootstrap => "Bootstrap",
    };
    let mut header = vec!["threshold".to_string(), "pass rate".to_string()];
    header.extend(methods.iter().map(|m| format!("power {}", name(*m))));
    header.extend(methods.iter().map(|m| format!("PSI {}", name(*m))));
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|row| {
            let mut cells = vec![row.profile.to_string(), render::rate(&row.pass, args.paper_style)];
            cells.extend(row.methods.iter().map(|m| render::rate(&m.power, args.paper_style)));
            cells.extend(row.methods.iter().map(|m| fixed2(m.psi)));
            cells
        })
        .collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let text = format!(
        "{}\n\n{} real subjects, {} random subjects per method, seed {}, {}% intervals (Clopper-Pearson)",
        render::table(&header_refs, &rows),
        report.n_real,
        report.n_random,
        report.seed,
        fixed2(100.0 * (1.0 - report.alpha))
    );
    let value = json!({"command": "power", "report": report});
    emit(args.format, text, value);
    Ok(true)
}

fn violation_text(study: &Study, s: &Subject, v: &AxiomViolation) -> String {
    let alts = labels(study, &v.alternatives);
    let obs: Vec<String> = v.observations.iter().map(|&i| observed(study, s, i)).collect();
    format!("{} violated [{}] at {}", v.axiom, alts.join(", "), obs.join(", "))
}

fn violation_json(study: &Study, s: &Subject, v: &AxiomViolation) -> Value {
    json!({
        "axiom": v.axiom.to_string(),
        "alternatives": labels(study, &v.alternatives),
        "budgets": v.observations.iter().map(|&i| s.design_index[i]).collect::<Vec<_>>(),
    })
}

pub fn axioms(args: &AxiomArgs) -> CmdResult {
    let study = load(&args.study)?;
    no_subjects(&study)?;
    let profiles = resolve_profiles(&args.profile, &study)?;
    let mut agree = true;
    let mut text = Vec::new();
    let mut sections = Vec::new();
    for p in &profiles {
        text.push(p.to_string());
        let mut subjects = Vec::new();
        for s in &study.subjects {
            let complete = s.data.is_complete_domain();
            let sp = subject_profile(&study, s, p)?;
            let mut results: Vec<(String, Option<AxiomViolation>)> = Vec::new();
            match &sp {
                ThresholdProfile::Uniform(k) => {
                    results.push(("SARP^k".into(), axioms::check_sarp_k(&s.data, *k).err()));
                    results.push(("WARP(LA^k)".into(), axioms::check_warp_la_k(&s.data, *k).err()));
                    results.push(("NBC".into(), axioms::check_nbc(&s.data).err()));
                    results.push(("k-th order Contraction".into(), axioms::check_k_contraction(&s.data, *k).err()));
                }
                ThresholdProfile::PerBudget(_) => {
                    let het = axioms::check_heterogeneous(&s.data, &sp)
                        .map_err(|e| CliError::Usage(e.to_string()))?
                        .err()
                        .unwrap_or_default();
                    for name in [axioms::Axiom::SarpHet, axioms::Axiom::WarpLaHet] {
                        results.push((name.to_string(), het.iter().find(|v| v.axiom == name).cloned()));
                    }
                    results.push(("NBC".into(), axioms::check_nbc(&s.data).err()));
                }
            }
            let scope = if complete { "complete domain" } else { "axioms (observed-domain restriction)" };
            text.push(format!("  {}  [{scope}]", s.id));
            for (name, r) in &results {
                match r {
                    None => text.push(format!("    {name} ok")),
                    Some(v) => text.push(format!("    {}", violation_text(&study, s, v))),
                }
            }
            let mut cross = Value::Null;
            if args.complete_domain {
                match (&sp, complete) {
                    (_, false) => {
                        text.push("    warning: domain incomplete; equivalence check skipped".into());
                        cross = json!({"skipped": "domain incomplete"});
                    }
                    (ThresholdProfile::Uniform(k), true) if *k >= 2 => {
                        let solver = solve_rationalizability(&s.data, &sp)
                            .map_err(|e| CliError::Usage(e.to_string()))?
                            .is_feasible();
                        let first = results[0].1.is_none() && results[1].1.is_none();
                        let second = results[2].1.is_none() && results[3].1.is_none();
                        let verdict = |b: bool| if b { "feasible" } else { "infeasible" };
                        for (name, ok) in [("SARP^k + WARP(LA^k)", first), ("NBC + k-th order Contraction", second)] {
                            if ok == solver {
                                text.push(format!("    {name} agrees with the solver ({})", verdict(solver)));
                            } else {
                                agree = false;
                                text.push(format!(
                                    "    disagreement: solver {}, {name} {}",
                                    verdict(solver),
                                    if ok { "hold" } else { "fail" }
                                ));
                            }
                        }
                        cross = json!({"solver": solver, "first_characterization": first, "second_characterization": second});
                    }
                    _ => {
                        text.push("    equivalence check needs a uniform threshold of at least 2".into());
                        cross = json!({"skipped": "needs uniform k ≥ 2"});
                    }
                }
            }
            subjects.push(json!({
                "id": s.id,
                "complete_domain": complete,
                "checks": results.iter().map(|(name, r)| json!({
                    "axiom": name,
                    "ok": r.is_none(),
                    "violation": r.as_ref().map(|v| violation_json(&study, s, v)),
                })).collect::<Vec<_>>(),
                "equivalence": cross,
            }));
        }
        sections.push(json!({"profile": p, "subjects": subjects}));
    }
    emit(args.format, text.join("\n"), json!({"command": "axioms", "results": sections, "agree": agree}));
    Ok(agree)
}

fn mode_of(m: Option<ModeArg>, default: OracleMode) -> OracleMode {
    match m {
        Some(ModeArg::FullFilter) => OracleMode::FullFilter,
        Some(ModeArg::Constraint) => OracleMode::Constraint,
        None => default,
    }
}

fn describe_function(n: usize, index: usize) -> String {
    let d = oracle::complete_domain_dataset(n, index);
    let parts: Vec<String> = d
        .observations()
        .iter()
        .map(|o| {
            let m: String = o.budget.members().iter().map(|a| d.label(a)).collect();
            format!("c({m})={}", d.label(o.choice))
        })
        .collect();
    parts.join(" ")
}

fn sweep_text(r: &SweepReport) -> String {
    let ks: Vec<String> = r.ks.iter().map(|k| k.to_string()).collect();
    let mode = match r.mode {
        OracleMode::FullFilter => "full-filter",
        OracleMode::Constraint => "constraint",
    };
    let mut out = vec![
        format!(
            "{} choice functions × k∈{{{}}}: {}/{} agree ({mode} oracle)",
            r.functions,
            ks.join(","),
            r.oracle.agreed,
            r.oracle.compared
        ),
        format!(
            "SARP^k + WARP(LA^k) vs solver, k ≥ 2: {}/{} agree",
            r.first_characterization.agreed, r.first_characterization.compared
        ),
        format!(
            "NBC + k-th order Contraction vs solver, k ≥ 2: {}/{} agree",
            r.second_characterization.agreed, r.second_characterization.compared
        ),
    ];
    if let Some(w) = r.welfare {
        out.push(format!("minimal lower contours vs oracle: {}/{} agree", w.agreed, w.compared));
    }
    const SHOWN: usize = 10;
    for m in r.mismatches.iter().take(SHOWN) {
        let what = match m.check {
            SweepCheck::Oracle => "oracle",
            SweepCheck::FirstCharacterization => "SARP^k + WARP(LA^k)",
            SweepCheck::SecondCharacterization => "NBC + k-th order Contraction",
            SweepCheck::Welfare => "welfare contours",
        };
        out.push(format!(
            "  disagreement #{} k={} {what}: solver {}, other {} :: {}",
            m.function_index,
            m.k,
            m.solver,
            m.other,
            describe_function(r.universe_size, m.function_index)
        ));
    }
    if r.mismatches.len() > SHOWN {
        out.push(format!("  … {} more disagreements", r.mismatches.len() - SHOWN));
    }
    out.join("\n")
}

pub fn oracle(args: &OracleArgs) -> CmdResult {
    if let Some(sweep) = args.sweep {
        let (n, default) = match sweep {
            SweepArg::X3 => (3, OracleMode::FullFilter),
            SweepArg::X4 => (4, OracleMode::Constraint),
        };
        let r = oracle::run_sweep(n, mode_of(args.mode, default), true)
            .map_err(|e| CliError::Input(e.to_string()))?;
        let ok = r.mismatches.is_empty();
        emit(args.format, sweep_text(&r), json!({"command": "oracle", "sweep": r}));
        return Ok(ok);
    }
    let path = args.study.as_ref().expect("clap enforces a study or a sweep");
    let study = read_study(path, args.input_format)?;
    no_subjects(&study)?;
    let ks = match &args.ks {
        Some(ks) => ks.0.clone(),
        None => (1..=max_budget(&study)).collect(),
    };
    let mut ok = true;
    let mut text = Vec::new();
    let mut rows = Vec::new();
    for s in &study.subjects {
        let mode = mode_of(args.mode, oracle::default_mode(&s.data));
        for &k in &ks {
            let p = ThresholdProfile::Uniform(k);
            let solver = solve_rationalizability(&s.data, &p)
                .map_err(|e| CliError::Usage(e.to_string()))?
                .is_feasible();
            let brute = oracle::oracle_rationalizable(&s.data, &p, mode)
                .map_err(|e| CliError::Input(format!("subject {}: {e}", s.id)))?;
            let mut welfare_ok = Value::Null;
            if solver && brute {
                let ours: Vec<usize> = guaranteed_welfare_bound(&s.data, &p)
                    .map_err(|e| CliError::Usage(e.to_string()))?
                    .per_alternative
                    .iter()
                    .map(|b| b.size)
                    .collect();
                let theirs = oracle::oracle_min_contours(&s.data, &p, mode)
                    .map_err(|e| CliError::Input(e.to_string()))?;
                welfare_ok = Value::Bool(ours == theirs);
                ok &= ours == theirs;
            }
            ok &= solver == brute;
            text.push(format!(
                "{}  k={k}  solver {}  oracle {}{}",
                s.id,
                solver,
                brute,
                match welfare_ok {
                    Value::Bool(true) => "  contours agree",
                    Value::Bool(false) => "  contours DISAGREE",
                    _ => "",
                }
            ));
            rows.push(json!({"id": s.id, "k": k, "solver": solver, "oracle": brute, "contours_agree": welfare_ok}));
        }
    }
    text.push(if ok { "all checks agree".into() } else { "disagreement found".into() });
    emit(args.format, text.join("\n"), json!({"command": "oracle", "results": rows, "agree": ok}));
    Ok(ok)
}

pub fn parse_behavior(s: &str) -> Result<Behavior, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["rational"] => Ok(Behavior::Rational),
        ["uniform"] => Ok(Behavior::Uniform),
        ["noisy", e] => e.parse().map(Behavior::NoisyRational).map_err(|_| format!("bad noise level `{e}`")),
        ["cla", k, rest @ ..] => {
            let k: usize = k.parse().map_err(|_| format!("bad threshold `{k}`"))?;
            if k == 0 {
                return Err("thresholds must be at least 1".into());
            }
            let rule = match rest {
                [] | ["random"] => AttentionRule::Random,
                ["tight"] => AttentionRule::Tight,
                _ => return Err(format!("unknown attention rule in `{s}`")),
            };
            Ok(Behavior::Cla { k, rule })
        }
        _ => Err(format!("unknown behavior `{s}`")),
    }
}

pub fn generate(args: &GenerateArgs) -> CmdResult {
    let sizes = &args.sizes.0;
    let spec = SyntheticSpec {
        universe_size: args.universe_size,
        n_budgets: args.budgets,
        size_range: (sizes[0], *sizes.last().expect("nonempty")),
        n_subjects: args.subjects,
        behavior: args.behavior,
        seed: args.seed,
    };
    let mut generated = generate_synthetic_study(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
    if args.inoue {
        let table = io::inoue_universe();
        if table.universe_size() != args.universe_size {
            return Err(CliError::Usage("--inoue needs --universe-size 10".into()));
        }
        generated.study.attributes = table.attributes;
    }
    let text = io::serialize_study(&generated.study, args.output_format.into());
    match &args.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
        None => write_stdout(&text),
    }
    Ok(true)
}

