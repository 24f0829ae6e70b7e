//! JSON documents for environments, mechanisms and priors.
//!
//! Rationals are written as `"numerator/denominator"` strings; plain integers
//! are accepted on input. Parse errors name the JSON path of the bad value.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::JointDistribution;
use crate::mechanisms::{AnyMechanism, DecisionList, SequentialPostedPrice};
use crate::model::{
    enumerate_feasible_outcomes, Decision, Environment, EnvironmentKind, FeasibilityConstraint,
    FeasibleSet, Grid, Outcome, PaymentVector, TabularMechanism, Tiebreak, Valuation,
};
use crate::rational::Rational;

/// Parse JSON, reporting the path of the first offending value.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::validation(if path.is_empty() { "$".into() } else { path }, e.into_inner().to_string())
    })
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FeasibleSpec {
    List(Vec<Outcome>),
    Generator(FeasibilityConstraint),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AtomSpec {
    /// Single-parameter: item values per agent.
    Values(Vec<Vec<Rational>>),
    /// Common-outcome: one value vector per type per agent.
    Valuations(Vec<Vec<Valuation>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvDocument {
    pub agents: usize,
    pub kind: EnvironmentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub personal_outcomes: Option<usize>,
    pub feasible: FeasibleSpec,
    pub atoms: AtomSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tiebreak: Option<Vec<Tiebreak>>,
}

impl EnvDocument {
    pub fn from_environment(env: &Environment) -> Self {
        let n = env.n_agents();
        let sp = env.is_single_parameter();
        let atoms = if sp {
            AtomSpec::Values((0..n).map(|i| env.value_atoms(i)).collect())
        } else {
            AtomSpec::Valuations(env.all_types().to_vec())
        };
        EnvDocument {
            agents: n,
            kind: env.kind(),
            personal_outcomes: (!sp).then(|| env.personal_outcomes(0)),
            feasible: FeasibleSpec::List(env.feasible().outcomes().to_vec()),
            atoms,
            tiebreak: Some(env.tiebreaks().to_vec()),
        }
    }

    pub fn to_environment(&self) -> Result<Environment> {
        let n = self.agents;
        let env = match self.kind {
            EnvironmentKind::SingleParameter => {
                let feasible = match &self.feasible {
                    FeasibleSpec::List(list) => {
                        enumerate_feasible_outcomes(&FeasibilityConstraint::Explicit { outcomes: list.clone() })?
                    }
                    FeasibleSpec::Generator(c) => enumerate_feasible_outcomes(c)?,
                };
                let atoms = match &self.atoms {
                    AtomSpec::Values(a) => a.clone(),
                    AtomSpec::Valuations(_) => {
                        return Err(Error::validation(
                            "atoms",
                            "single-parameter atoms are per-agent lists of numbers",
                        ))
                    }
                };
                Environment::single_parameter(atoms, feasible)?
            }
            EnvironmentKind::CommonOutcome => {
                let m = self.personal_outcomes.ok_or_else(|| {
                    Error::validation("personal_outcomes", "required for common-outcome environments")
                })?;
                let feasible = match &self.feasible {
                    FeasibleSpec::List(list) => FeasibleSet::from_outcomes(list.iter().cloned()),
                    FeasibleSpec::Generator(_) => {
                        return Err(Error::validation(
                            "feasible",
                            "generators only apply to single-parameter environments",
                        ))
                    }
                };
                let vals = match &self.atoms {
                    AtomSpec::Valuations(v) => v.clone(),
                    AtomSpec::Values(_) => {
                        return Err(Error::validation(
                            "atoms",
                            "common-outcome atoms are per-agent lists of value vectors",
                        ))
                    }
                };
                Environment::common_outcome(vals, m, feasible)?
            }
        };
        if env.n_agents() != n {
            return Err(Error::validation(
                "agents",
                format!("declared {n} agents but atoms describe {}", env.n_agents()),
            ));
        }
        match &self.tiebreak {
            Some(t) => env.with_tiebreak(t.clone()),
            None => Ok(env),
        }
    }
}

/// A profile coordinate: an item value or a full value vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileValue {
    Item(Rational),
    Full(Valuation),
}

impl ProfileValue {
    fn valuation(&self) -> Valuation {
        match self {
            ProfileValue::Item(x) => Valuation::item(*x),
            ProfileValue::Full(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub profile: Vec<ProfileValue>,
    pub outcome: Outcome,
    pub payments: PaymentVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableBody {
    pub rows: Vec<TableRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum MechanismBody {
    DecisionList(DecisionList),
    PostedPrice(SequentialPostedPrice),
    Table(TableBody),
}

/// A mechanism file, optionally carrying its environment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MechanismDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub env: Option<EnvDocument>,
    #[serde(flatten)]
    pub mechanism: MechanismBody,
}

/// A loaded mechanism: either a table or an intensional form.
#[derive(Clone, Debug)]
pub enum LoadedMechanism {
    Table(TabularMechanism),
    Intensional(AnyMechanism),
}

impl MechanismDocument {
    pub fn parse(text: &str) -> Result<Self> {
        from_json(text)
    }

    pub fn table(tab: &TabularMechanism) -> Self {
        let sp = tab.env().is_single_parameter();
        let grid = tab.grid();
        let rows = (0..grid.len())
            .map(|idx| {
                let profile = grid
                    .profile(idx)
                    .into_iter()
                    .map(|v| if sp { ProfileValue::Item(v.item_value()) } else { ProfileValue::Full(v) })
                    .collect();
                let d = tab.row(idx);
                TableRow {
                    profile,
                    outcome: d.outcome.clone(),
                    payments: d.payments.clone(),
                }
            })
            .collect();
        MechanismDocument {
            env: Some(EnvDocument::from_environment(tab.env())),
            mechanism: MechanismBody::Table(TableBody { rows }),
        }
    }

    pub fn intensional(mech: &AnyMechanism, env: Option<&Environment>) -> Self {
        let mechanism = match mech {
            AnyMechanism::DecisionList(d) => MechanismBody::DecisionList(d.clone()),
            AnyMechanism::PostedPrice(p) => MechanismBody::PostedPrice(p.clone()),
        };
        MechanismDocument {
            env: env.map(EnvDocument::from_environment),
            mechanism,
        }
    }

    /// Environment from `override_env`, else the embedded one.
    pub fn environment(&self, override_env: Option<&Environment>) -> Result<Option<Environment>> {
        match (override_env, &self.env) {
            (Some(e), _) => Ok(Some(e.clone())),
            (None, Some(doc)) => doc.to_environment().map(Some),
            (None, None) => Ok(None),
        }
    }

    pub fn load(&self, override_env: Option<&Environment>) -> Result<(LoadedMechanism, Option<Environment>)> {
        let env = self.environment(override_env)?;
        let mech = match &self.mechanism {
            MechanismBody::DecisionList(d) => LoadedMechanism::Intensional(AnyMechanism::DecisionList(d.clone())),
            MechanismBody::PostedPrice(p) => LoadedMechanism::Intensional(AnyMechanism::PostedPrice(p.clone())),
            MechanismBody::Table(body) => {
                let env = env
                    .as_ref()
                    .ok_or_else(|| Error::validation("env", "a table needs an environment"))?;
                LoadedMechanism::Table(load_table(body, env)?)
            }
        };
        Ok((mech, env))
    }
}

fn load_table(body: &TableBody, env: &Environment) -> Result<TabularMechanism> {
    let grid = Grid::from_env(env);
    let mut rows: Vec<Option<Decision>> = vec![None; grid.len()];
    for (k, row) in body.rows.iter().enumerate() {
        let profile: Vec<Valuation> = row.profile.iter().map(ProfileValue::valuation).collect();
        let idx = grid.locate(&profile).ok_or_else(|| {
            Error::validation(format!("rows[{k}].profile"), "profile is not on the environment's grid")
        })?;
        if rows[idx].is_some() {
            return Err(Error::validation(format!("rows[{k}].profile"), "duplicate profile"));
        }
        rows[idx] = Some(Decision::new(row.outcome.clone(), row.payments.clone()));
    }
    if let Some(missing) = rows.iter().position(Option::is_none) {
        return Err(Error::validation(
            "rows",
            format!(
                "table has {} rows but the grid has {} profiles; first missing {}",
                body.rows.len(),
                grid.len(),
                crate::model::render_profile(&grid.profile(missing))
            ),
        ));
    }
    TabularMechanism::new(env, grid, rows.into_iter().map(Option::unwrap).collect())
}

pub fn parse_environment(text: &str) -> Result<Environment> {
    from_json::<EnvDocument>(text)?.to_environment()
}

pub fn parse_prior(text: &str) -> Result<JointDistribution> {
    from_json(text)
}
