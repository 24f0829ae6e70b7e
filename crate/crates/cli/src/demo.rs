use anyhow::{Context, Result};
use nonbossy::eval::{
    expected_metrics, expected_optimal_welfare, monte_carlo_metrics, search_optimal_decision_list,
    search_optimal_posted_price, DecisionListLimits, Objective, PostedPriceLimits,
};
use nonbossy::fixtures;
use nonbossy::io::{to_json, MechanismDocument};
use nonbossy::mechanisms::{build_full_extraction_list, build_log_r_mechanism};
use nonbossy::synth::{certify_order_oblivious, synthesize_decision_list};
use nonbossy::verify::{
    build_rwsg_witness, check_consistency, check_ic, check_ir, check_nb, check_osp_sequential,
    check_payment_characterization, check_upper_semilattice, classify_gs, PropertyReport,
};
use nonbossy::{q, tabulate, AnyMechanism, DecisionEntry, DecisionList, Rational, TabularMechanism};
use serde_json::json;

use crate::output::{mark, print_json, table, Style};
use crate::{DemoArgs, FixtureName};

/// Collects expectation mismatches so a demo can report them all before failing.
struct Expect {
    ok: bool,
}

impl Expect {
    fn report(&mut self, r: &PropertyReport, expected: bool) {
        println!("{} {r}", mark(r.holds));
        self.that(r.holds == expected, &format!("{} expected to {}", r.property, if expected { "hold" } else { "fail" }));
    }

    fn that(&mut self, cond: bool, what: &str) {
        if !cond {
            self.ok = false;
            eprintln!("unexpected: {what}");
        }
    }
}

pub fn run(a: &DemoArgs, style: Style) -> Result<bool> {
    let mut e = Expect { ok: true };
    match a.fixture {
        FixtureName::Prop2 => prop2(&mut e, style)?,
        FixtureName::Example4 => example4(&mut e, style)?,
        FixtureName::Correlated => correlated(&mut e, style)?,
        FixtureName::Partition => partition(a, &mut e, style)?,
        FixtureName::Spa => auction(true, &mut e, style)?,
        FixtureName::Fpa => auction(false, &mut e, style)?,
    }
    Ok(e.ok)
}

fn prop2(e: &mut Expect, style: Style) -> Result<()> {
    let tab = fixtures::prop2();
    let osp: Vec<PropertyReport> = [[0, 1], [1, 0]]
        .iter()
        .map(|o| check_osp_sequential(&tab, o))
        .collect::<nonbossy::Result<_>>()?;
    let gs = classify_gs(&tab)?;
    let reports = [
        (check_ic(&tab), true),
        (check_ir(&tab), true),
        (check_nb(&tab), true),
        (check_payment_characterization(&tab), false),
        (check_upper_semilattice(tab.env()), false),
        (osp[0].clone(), false),
        (osp[1].clone(), false),
    ];
    if style.json {
        let rs: Vec<&PropertyReport> = reports.iter().map(|(r, _)| r).collect();
        for (r, want) in &reports {
            e.that(r.holds == *want, &r.property.to_string());
        }
        return print_json(&json!({ "reports": rs, "classification": gs }));
    }
    println!("three-outcome common-outcome mechanism, epsilon = {}", fixtures::prop2_epsilon());
    println!("grid {}", tab.grid().describe());
    print_rows(&tab);
    for (r, want) in &reports {
        e.report(r, *want);
    }
    println!("gs classification: {:?} (image size {})", gs.verdict, gs.image_size);
    e.that(gs.image_size == 4, "image size 4");
    Ok(())
}

fn print_rows(tab: &TabularMechanism) {
    let rows: Vec<(String, String)> = (0..tab.grid().len())
        .map(|i| (nonbossy::model::render_profile(&tab.grid().profile(i)), tab.row(i).to_string()))
        .collect();
    table(&rows);
}

fn example4(e: &mut Expect, style: Style) -> Result<()> {
    let tab = fixtures::example4();
    let grid = tab.grid();
    let (list, trace) = synthesize_decision_list(&tab)?;
    let back = tabulate(&list, tab.env(), grid)?;
    let reference = fixtures::example4_list();
    let ref_tab = tabulate(&reference, tab.env(), grid)?;
    let synth_oo = certify_order_oblivious(&list, grid);
    let ref_oo = certify_order_oblivious(&reference, grid);

    let base: Vec<DecisionEntry> = reference
        .entries()
        .iter()
        .map(|x| DecisionEntry::new(x.outcome.clone(), x.prices.clone()))
        .collect();
    let mut orders = 0;
    let mut reproducing = 0;
    for_each_permutation(base.len(), |perm| -> Result<()> {
        let dl = DecisionList::new(perm.iter().map(|&k| base[k].clone()).collect())?;
        orders += 1;
        if tabulate(&dl, tab.env(), grid)?.rows() == tab.rows() {
            reproducing += 1;
        }
        Ok(())
    })?;
    let reports = [
        (check_ic(&tab), true),
        (check_ir(&tab), true),
        (check_nb(&tab), true),
        (check_payment_characterization(&tab), true),
        (check_consistency(&tab)?, true),
    ];
    e.that(back.rows() == tab.rows(), "synthesized list reproduces the table");
    e.that(ref_tab.rows() == tab.rows(), "reference list reproduces the table");
    e.that(synth_oo.holds && !ref_oo.holds, "order-obliviousness verdicts");
    e.that(reproducing == 0, "no exception-free order reproduces the table");
    if style.json {
        let rs: Vec<&PropertyReport> = reports.iter().map(|(r, _)| r).collect();
        for (r, want) in &reports {
            e.that(r.holds == *want, &r.property.to_string());
        }
        return print_json(&json!({
            "reports": rs,
            "synthesized": list,
            "trace": trace,
            "synthesized_order_oblivious": synth_oo,
            "reference_order_oblivious": ref_oo,
            "exception_free_orders": orders,
            "exception_free_reproducing": reproducing,
        }));
    }
    println!("clockwise-first mechanism on grid {}", grid.describe());
    for (r, want) in &reports {
        e.report(r, *want);
    }
    println!("synthesized decision list ({} tree nodes):", trace.tree.len());
    print_list(&list);
    println!("{} re-tabulation equals the table", mark(back.rows() == tab.rows()));
    println!("{} synthesized list is order-oblivious", mark(synth_oo.holds));
    println!("{} reference list reproduces the table in its own order", mark(ref_tab.rows() == tab.rows()));
    println!("{} reference list is order-oblivious", mark(ref_oo.holds));
    println!("  exception-free orders reproducing the table: {reproducing} of {orders}");
    Ok(())
}

fn print_list(list: &DecisionList) {
    for (j, x) in list.entries().iter().enumerate() {
        let ex: Vec<String> = x.exceptions.iter().map(|&k| list.entries()[k].outcome.to_string()).collect();
        println!("  {j}: {} at {}  except {{{}}}", x.outcome, x.prices, ex.join(", "));
    }
}

fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        f(&p)?;
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return Ok(());
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

fn correlated(e: &mut Expect, style: Style) -> Result<()> {
    let prior = fixtures::correlated_prior();
    let env = fixtures::correlated_env();
    let atoms = vec![vec![q(1, 1), q(2, 1)]; 2];
    let plan = expected_metrics(&fixtures::correlated_plan(), &prior)?;
    let list = expected_metrics(&fixtures::correlated_list(), &prior)?;
    let pp = search_optimal_posted_price(&prior, env.feasible(), &atoms, Objective::Revenue, PostedPriceLimits::default())?;
    let dl = search_optimal_decision_list(&prior, env.feasible(), &atoms, Objective::Revenue, DecisionListLimits::default())?;
    let opt = expected_optimal_welfare(&prior, env.feasible())?;
    e.that(pp.value == q(8, 5), "posted-price optimum 8/5");
    e.that(list.expected_revenue == q(2, 1), "decision-list revenue 2");
    e.that(dl.value == q(2, 1), "decision-list optimum 2");
    e.that(plan.expected_revenue == q(8, 5), "reference plan revenue 8/5");
    if style.json {
        return print_json(&json!({
            "reference_plan": plan,
            "optimal_posted_price": pp,
            "reference_list": list,
            "optimal_decision_list": dl,
            "optimal_welfare": opt,
        }));
    }
    println!("correlated two-agent prior: (1,1) w.p. 1/5, (2,0) and (0,2) w.p. 2/5 each; prices {{1,2}}");
    let row = |name: &str, m: &nonbossy::eval::MechanismMetrics| {
        (name.to_string(), format!("{:<8} {}", style.num(m.expected_revenue), style.num(m.expected_welfare)))
    };
    table(&[
        ("mechanism".into(), format!("{:<8} {}", "revenue", "welfare")),
        row("reference adaptive posted-price plan", &plan),
        row("optimal posted-price plan (search)", &pp.metrics),
        row("reference decision list", &list),
        row("optimal decision list (search)", &dl.metrics),
        ("optimal welfare".into(), format!("{:<8} {}", "", style.num(opt))),
    ]);
    println!("  posted-price plans in class: {}", pp.plan_count);
    println!("  decision-list candidates: {} ({} order-oblivious and IC)", dl.candidates, dl.admissible);
    println!("{} decision list beats every posted-price plan: {} > {}", mark(list.expected_revenue > pp.value), style.num(list.expected_revenue), style.num(pp.value));
    Ok(())
}

fn partition(a: &DemoArgs, e: &mut Expect, style: Style) -> Result<()> {
    let p: Rational = a.p.parse().map_err(|err| anyhow::anyhow!("--p: {err}"))?;
    let inst = fixtures::partition(a.groups, a.r, p)?;
    let n = inst.n_agents();
    let opt = expected_optimal_welfare(&inst.prior, inst.feasible())?;
    let full = build_full_extraction_list(&vec![inst.value_on_hit; n], inst.feasible())?;
    let full_m = expected_metrics(&full, &inst.prior)?;
    let plan = build_log_r_mechanism(&inst.prior, inst.feasible())?;
    let log_m = expected_metrics(&plan.mechanism, &inst.prior)?;
    let pp = search_optimal_posted_price(
        &inst.prior,
        inst.feasible(),
        &vec![vec![inst.value_on_hit]; n],
        Objective::Welfare,
        PostedPriceLimits { max_agents: n.min(8), max_atoms: 1 },
    );
    let mc = if a.samples > 0 {
        Some(monte_carlo_metrics(&plan.mechanism, &inst.prior, a.samples, a.seed)?)
    } else {
        None
    };
    e.that(full_m.expected_revenue == opt, "full extraction revenue equals OPT");
    e.that(log_m.expected_welfare >= plan.combined_bound(), "log-r welfare meets its bound");
    if style.json {
        let pp = pp.ok();
        return print_json(&json!({
            "instance": inst,
            "optimal_welfare": opt,
            "full_extraction": full_m,
            "log_r": { "plan": plan, "metrics": log_m },
            "optimal_posted_price": pp,
            "monte_carlo": mc,
        }));
    }
    println!(
        "partition instance: {} groups of {}, value {} with probability {}",
        a.groups, a.r, inst.value_on_hit, inst.hit_probability
    );
    let mut rows = vec![
        ("quantity".to_string(), format!("{:<10} {}", "welfare", "revenue")),
        ("optimal welfare".to_string(), style.num(opt)),
        (
            "full-extraction list".to_string(),
            format!("{:<10} {}", style.num(full_m.expected_welfare), style.num(full_m.expected_revenue)),
        ),
        (
            format!("log-r mechanism ({:?})", plan.chosen_case),
            format!("{:<10} {}", style.num(log_m.expected_welfare), style.num(log_m.expected_revenue)),
        ),
        ("log-r guarantee OPT/(8 ceil(log2 4r))".to_string(), style.num(plan.combined_bound())),
    ];
    match &pp {
        Ok(s) => rows.push(("optimal posted-price plan".into(), style.num(s.value))),
        Err(err) => rows.push(("optimal posted-price plan".into(), format!("not searched: {err}"))),
    }
    table(&rows);
    if let Some(m) = mc {
        println!(
            "  monte carlo log-r welfare {:.6} ± {:.6} ({} samples, seed {})",
            m.welfare_mean, m.welfare_stderr, m.samples, m.seed
        );
    }
    Ok(())
}

fn auction(second_price: bool, e: &mut Expect, style: Style) -> Result<()> {
    let bids = fixtures::small_bids();
    let tab = if second_price { fixtures::spa(2, &bids)? } else { fixtures::fpa(2, &bids)? };
    let ic = check_ic(&tab);
    let nb = check_nb(&tab);
    let osp = check_osp_sequential(&tab, &[0, 1])?;
    let cert = if ic.holds { build_rwsg_witness(&tab)? } else { None };
    if style.json {
        e.that(ic.holds == second_price, "IC verdict");
        return print_json(&json!({ "reports": [ic, check_ir(&tab), nb, osp], "certificate": cert }));
    }
    let name = if second_price { "second-price" } else { "first-price" };
    println!("{name} auction on grid {}", tab.grid().describe());
    e.report(&ic, second_price);
    e.report(&check_ir(&tab), true);
    e.report(&nb, !second_price);
    e.report(&osp, false);
    if let Some(c) = cert {
        println!(
            "rwsg certificate: agent {} lowers {} to {}; agent {} goes from {} to {} ({:?})",
            c.manipulator, c.truthful, c.deviation, c.target, c.before, c.after, c.external_preference
        );
    }
    Ok(())
}

/// Mechanism document for a fixture.
pub fn export(name: FixtureName) -> Result<String> {
    let doc = match name {
        FixtureName::Prop2 => MechanismDocument::table(&fixtures::prop2()),
        FixtureName::Example4 => MechanismDocument::table(&fixtures::example4()),
        FixtureName::Spa => MechanismDocument::table(&fixtures::spa(2, &fixtures::small_bids())?),
        FixtureName::Fpa => MechanismDocument::table(&fixtures::fpa(2, &fixtures::small_bids())?),
        FixtureName::Correlated => MechanismDocument::intensional(
            &AnyMechanism::DecisionList(fixtures::correlated_list()),
            Some(&fixtures::correlated_env()),
        ),
        FixtureName::Partition => {
            let inst = fixtures::partition(2, 2, q(1, 2))?;
            let list = build_full_extraction_list(&vec![inst.value_on_hit; inst.n_agents()], inst.feasible())?;
            let env = nonbossy::Environment::single_parameter(
                vec![vec![Rational::ZERO, inst.value_on_hit]; inst.n_agents()],
                inst.feasible().clone(),
            )?;
            MechanismDocument::intensional(&AnyMechanism::DecisionList(list), Some(&env))
        }
    };
    to_json(&doc).context("serializing fixture")
}

/// Prior document for the fixtures that come with one.
pub fn export_prior(name: FixtureName) -> Result<String> {
    let prior = match name {
        FixtureName::Correlated => fixtures::correlated_prior(),
        FixtureName::Partition => fixtures::partition(2, 2, q(1, 2))?.prior,
        other => anyhow::bail!("fixture {other:?} has no prior"),
    };
    to_json(&prior).context("serializing prior")
}
