use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use nonbossy::eval::{
    default_price_atoms, expected_metrics, expected_metrics_detailed, expected_optimal_welfare,
    monte_carlo_metrics, search_optimal_decision_list, search_optimal_posted_price, DecisionListLimits,
    JointDistribution, Objective, PostedPriceLimits,
};
use nonbossy::io::{parse_environment, parse_prior, LoadedMechanism, MechanismBody, MechanismDocument};
use nonbossy::synth::{extract_posted_price, synthesize_with, SynthesisOptions};
use nonbossy::verify::{
    build_rwsg_witness, check_consistency, check_ic, check_ir, check_nb, check_osp_sequential,
    check_payment_characterization, check_upper_semilattice, classify_gs, Property, PropertyReport,
};
use nonbossy::{
    enumerate_feasible_outcomes, tabulate_canonical, AnyMechanism, Environment, FeasibilityConstraint,
    FeasibleSet, Rational, TabularMechanism,
};
use serde::Serialize;
use serde_json::json;

use crate::output::{mark, print_json, print_report, Style};
use crate::{demo, CheckArgs, ClassArg, Command, EvalArgs, ExtractArgs, FixtureCommand, ObjectiveArg, PropertyArg, SearchArgs, SynthArgs};

/// Run one subcommand. `Ok(false)` means a requested property failed.
pub fn run(command: &Command, style: Style) -> Result<bool> {
    match command {
        Command::Check(a) => check(a, style),
        Command::Synth(a) => synth(a),
        Command::Extract(a) => extract(a),
        Command::Eval(a) => eval(a, style),
        Command::Search(a) => search(a, style),
        Command::Demo(a) => demo::run(a, style),
        Command::Fixture(f) => {
            let (text, out) = match f {
                FixtureCommand::Export { name, out } => (demo::export(*name)?, out),
                FixtureCommand::Prior { name, out } => (demo::export_prior(*name)?, out),
            };
            match out {
                Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(true)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_env(path: Option<&Path>) -> Result<Option<Environment>> {
    path.map(|p| parse_environment(&read(p)?).with_context(|| format!("in {}", p.display())))
        .transpose()
}

fn load_document(path: &Path) -> Result<MechanismDocument> {
    MechanismDocument::parse(&read(path)?).with_context(|| format!("in {}", path.display()))
}

/// The mechanism as a table, tabulating intensional forms on their canonical grid.
fn load_table(path: &Path, env: Option<&Path>) -> Result<(TabularMechanism, Option<AnyMechanism>)> {
    let doc = load_document(path)?;
    let env = load_env(env)?;
    let (mech, env) = doc.load(env.as_ref()).with_context(|| format!("in {}", path.display()))?;
    match mech {
        LoadedMechanism::Table(t) => Ok((t, None)),
        LoadedMechanism::Intensional(m) => {
            let env = env.context("an environment is required: embed \"env\" or pass --env")?;
            Ok((tabulate_canonical(&m, &env)?, Some(m)))
        }
    }
}

#[derive(Serialize)]
struct CheckOutput {
    grid: String,
    reports: Vec<PropertyReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    errors: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<nonbossy::verify::ManipulationCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification: Option<nonbossy::verify::GsClassification>,
}

fn check(a: &CheckArgs, style: Style) -> Result<bool> {
    let (tab, mech) = load_table(&a.mechanism, a.env.as_deref())?;
    let mut out = CheckOutput {
        grid: tab.grid().describe(),
        reports: Vec::new(),
        errors: Vec::new(),
        certificate: None,
        classification: None,
    };
    let mut ok = true;
    for p in &a.properties {
        let report = match p {
            PropertyArg::Ic => Ok(check_ic(&tab)),
            PropertyArg::Ir => Ok(check_ir(&tab)),
            PropertyArg::Nb => Ok(check_nb(&tab)),
            PropertyArg::Pc => Ok(check_payment_characterization(&tab)),
            PropertyArg::Cons => check_consistency(&tab),
            PropertyArg::Sl => Ok(check_upper_semilattice(tab.env())),
            PropertyArg::Osp => {
                let order = match (&a.order, &mech) {
                    (Some(o), _) => o.clone(),
                    (None, Some(AnyMechanism::PostedPrice(p))) => p.visit_order(),
                    (None, _) => (0..tab.n_agents()).collect(),
                };
                Ok(check_osp_sequential(&tab, &order)?)
            }
            PropertyArg::Gs => {
                out.classification = Some(classify_gs(&tab)?);
                continue;
            }
        };
        match report {
            Ok(r) => {
                ok &= r.holds;
                if r.property == Property::Nb && !r.holds {
                    out.certificate = build_rwsg_witness(&tab).ok().flatten();
                }
                out.reports.push(r);
            }
            Err(e @ (nonbossy::Error::Prerequisite { .. } | nonbossy::Error::Applicability(_))) => {
                ok = false;
                out.errors.push(format!("{p:?}: {e}"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    if style.json {
        print_json(&out)?;
        return Ok(ok);
    }
    println!("grid {}", out.grid);
    for r in &out.reports {
        print_report(r);
    }
    for e in &out.errors {
        println!("{} {e}", mark(false));
    }
    if let Some(c) = &out.certificate {
        println!(
            "rwsg certificate: agent {} reports {} instead of {} with others {:?}, moving agent {} from {} to {} ({:?})",
            c.manipulator, c.deviation, c.truthful, c.fixed_others, c.target, c.before, c.after, c.external_preference
        );
    }
    if let Some(g) = &out.classification {
        println!("gs classification: {:?} (image size {})", g.verdict, g.image_size);
    }
    Ok(ok)
}

fn synth(a: &SynthArgs) -> Result<bool> {
    let (tab, _) = load_table(&a.mechanism, a.env.as_deref())?;
    let (list, trace) = synthesize_with(&tab, SynthesisOptions { image_bound: a.image_bound })?;
    eprintln!("synthesized {} entries from {} tree nodes", list.len(), trace.tree.len());
    let doc = MechanismDocument::intensional(&AnyMechanism::DecisionList(list), Some(tab.env()));
    print_json(&json!({ "list": doc, "trace": trace }))?;
    Ok(true)
}

fn extract(a: &ExtractArgs) -> Result<bool> {
    let text = read(&a.list)?;
    let mut value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("in {}", a.list.display()))?;
    if let Some(inner) = value.get_mut("list") {
        value = inner.take();
    }
    let doc: MechanismDocument = nonbossy::io::from_json(&value.to_string()).with_context(|| format!("in {}", a.list.display()))?;
    let MechanismBody::DecisionList(list) = &doc.mechanism else {
        bail!("{} does not hold a decision list", a.list.display());
    };
    let env = doc
        .environment(load_env(a.env.as_deref())?.as_ref())?
        .context("an environment is required: embed \"env\" or pass --env")?;
    let (plan, order) = extract_posted_price(list, &env)?;
    eprintln!("visit order {:?}", order.order);
    let doc = MechanismDocument::intensional(&AnyMechanism::PostedPrice(plan), Some(&env));
    print_json(&json!({ "plan": doc, "domination": order }))?;
    Ok(true)
}

fn eval(a: &EvalArgs, style: Style) -> Result<bool> {
    let doc = load_document(&a.mechanism)?;
    let env = load_env(a.env.as_deref())?;
    let (mech, env) = doc.load(env.as_ref())?;
    let prior = parse_prior(&read(&a.prior)?).with_context(|| format!("in {}", a.prior.display()))?;
    let opt = match &env {
        Some(e) if e.is_single_parameter() => Some(expected_optimal_welfare(&prior, e.feasible())?),
        _ => None,
    };
    let mech: &dyn nonbossy::Mechanism = match &mech {
        LoadedMechanism::Table(t) => t,
        LoadedMechanism::Intensional(m) => m,
    };
    if let Some(samples) = a.samples {
        let est = monte_carlo_metrics(mech, &prior, samples, a.seed)?;
        if style.json {
            print_json(&est)?;
        } else {
            println!(
                "welfare {:.6} ± {:.6}  revenue {:.6} ± {:.6}  ({} samples, seed {})",
                est.welfare_mean, est.welfare_stderr, est.revenue_mean, est.revenue_stderr, est.samples, est.seed
            );
        }
        return Ok(true);
    }
    let m = if a.detailed {
        expected_metrics_detailed(mech, &prior)?
    } else {
        expected_metrics(mech, &prior)?
    };
    if style.json {
        print_json(&json!({ "metrics": m, "optimal_welfare": opt }))?;
    } else {
        println!("{}", style.metrics(&m));
        if let Some(o) = opt {
            println!("optimal welfare {}", style.num(o));
        }
        for p in m.per_profile.iter().flatten() {
            let v: Vec<String> = p.values.iter().map(|x| style.num(*x)).collect();
            println!(
                "  ({})  p={}  {}  welfare {}  revenue {}",
                v.join(","),
                p.probability,
                p.outcome,
                style.num(p.welfare),
                style.num(p.revenue)
            );
        }
    }
    Ok(true)
}

fn feasible_for(env: Option<&Environment>, prior: &JointDistribution) -> Result<FeasibleSet> {
    match env {
        Some(e) => Ok(e.feasible().clone()),
        None => Ok(enumerate_feasible_outcomes(&FeasibilityConstraint::Unconstrained { n: prior.n_agents() })?),
    }
}

fn search(a: &SearchArgs, style: Style) -> Result<bool> {
    let prior = parse_prior(&read(&a.prior)?).with_context(|| format!("in {}", a.prior.display()))?;
    let env = load_env(a.env.as_deref())?;
    let feasible = feasible_for(env.as_ref(), &prior)?;
    let atoms = match &a.prices {
        Some(ps) => {
            let parsed = ps
                .iter()
                .map(|s| s.parse::<Rational>().map_err(|e| anyhow::anyhow!("--prices: {e}")))
                .collect::<Result<Vec<_>>>()?;
            vec![parsed; prior.n_agents()]
        }
        None => default_price_atoms(&prior),
    };
    let objective = match a.objective {
        ObjectiveArg::Revenue => Objective::Revenue,
        ObjectiveArg::Welfare => Objective::Welfare,
    };
    match a.class {
        ClassArg::PostedPrice => {
            let d = PostedPriceLimits::default();
            let limits = PostedPriceLimits {
                max_agents: a.max_agents.unwrap_or(d.max_agents),
                max_atoms: a.max_atoms.unwrap_or(d.max_atoms),
            };
            let s = search_optimal_posted_price(&prior, &feasible, &atoms, objective, limits)?;
            if style.json {
                return print_json(&s).map(|_| true);
            }
            println!("optimal posted-price {:?}: {}", objective, style.num(s.value));
            println!("  {}", style.metrics(&s.metrics));
            println!("  plans in class {}, states {}, {} ms", s.plan_count, s.states, s.elapsed_ms);
            print!("{}", nonbossy::io::to_json(&s.plan)?);
        }
        ClassArg::DecisionList => {
            let d = DecisionListLimits::default();
            let limits = DecisionListLimits {
                max_outcomes: a.max_outcomes.unwrap_or(d.max_outcomes),
                max_atoms: a.max_atoms.unwrap_or(d.max_atoms),
                max_candidates: a.max_candidates.unwrap_or(d.max_candidates),
            };
            let s = search_optimal_decision_list(&prior, &feasible, &atoms, objective, limits)?;
            if style.json {
                return print_json(&s).map(|_| true);
            }
            println!("optimal decision list {:?}: {}", objective, style.num(s.value));
            println!("  {}", style.metrics(&s.metrics));
            println!("  candidates {}, admissible {}, {} ms", s.candidates, s.admissible, s.elapsed_ms);
            print!("{}", nonbossy::io::to_json(&s.list)?);
        }
    }
    Ok(true)
}
