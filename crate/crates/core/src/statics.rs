//! Comparative statics of the closed-form uniqueness threshold and a generic
//! parameter sweep.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::equilibrium::{
    check_prop1, check_prop2, check_prop3, classify_hetero, mixed_nash_2x2, pure_nash, threshold_p_deviation,
    threshold_p_eq15, threshold_p_numeric, SINGULAR_EPS,
};
use crate::error::{GameError, Result};
use crate::matrix::{build_matrix, Profile};
use crate::model::{BehaviorPolicy, Field, GameParams, Player};

fn eq15_denominator(params: &GameParams, theta: f64) -> Result<f64> {
    let factor = 1.0 - params.beta * params.alpha - (1.0 - params.beta) * params.gamma;
    if factor.abs() < SINGULAR_EPS {
        return Err(GameError::Singular { quantity: "d p_bar / d(.)", denominator: factor });
    }
    Ok(theta * params.g * factor)
}

/// `∂p̄/∂c = 1 / (θ²g[1 − βα − (1 − β)γ])`.
pub fn dpbar_dc(params: &GameParams) -> Result<f64> {
    let theta = params.symmetric_theta()?;
    let denom = eq15_denominator(params, theta)?;
    Ok(1.0 / (theta * denom))
}

/// `∂p̄/∂β = −θg(γ − α)[c/θ − θg(1 − α)] / [θg(1 − βα − (1 − β)γ)]²`.
pub fn dpbar_dbeta(params: &GameParams) -> Result<f64> {
    let theta = params.symmetric_theta()?;
    let denom = eq15_denominator(params, theta)?;
    let tg = theta * params.g;
    let bracket = params.c / theta - tg * (1.0 - params.alpha);
    Ok(-tg * (params.gamma - params.alpha) * bracket / (denom * denom))
}

/// Default central-difference step for a parameter value `x`.
pub fn default_step(x: f64) -> f64 {
    1e-5 * x.abs().max(1.0)
}

/// Central difference `(f(x + h) − f(x − h)) / 2h` of `quantity` along `axis`.
/// Both perturbed parameter sets must pass [`GameParams::validate`].
pub fn finite_diff<F>(quantity: F, axis: Field, params: &GameParams, h: Option<f64>) -> Result<f64>
where
    F: Fn(&GameParams) -> Result<f64>,
{
    let x = params.get(axis);
    let h = h.unwrap_or_else(|| default_step(x));
    let mut up = params.with(axis, x + h);
    let mut down = params.with(axis, x - h);
    // Moving one ability of a symmetric pair would break symmetry-only quantities.
    if params.is_symmetric() && matches!(axis, Field::ThetaA | Field::ThetaB) {
        up = up.with(Field::ThetaA, x + h).with(Field::ThetaB, x + h);
        down = down.with(Field::ThetaA, x - h).with(Field::ThetaB, x - h);
    }
    let f_up = quantity(&up.validate()?)?;
    let f_down = quantity(&down.validate()?)?;
    Ok((f_up - f_down) / (2.0 * h))
}

/// A named output of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    PBarEq15,
    PBarDeviation,
    PBarNumeric,
    PUnique,
    DpbarDc,
    DpbarDbeta,
    Payoff(Profile, Player),
    PureNeCount,
    /// Number of pure equilibria in which at least one student does not prepare.
    NpNeCount,
    /// Number of pure equilibria in which exactly one student prepares.
    SeparatingNeCount,
    MixedQa,
    MixedQb,
    Prop1,
    Prop2,
    Prop3A,
    Prop3B,
    Class,
}

const SIMPLE: [(&str, Quantity); 16] = [
    ("p_bar_eq15", Quantity::PBarEq15),
    ("p_bar_dev", Quantity::PBarDeviation),
    ("p_bar_numeric", Quantity::PBarNumeric),
    ("p_unique", Quantity::PUnique),
    ("dpbar_dc", Quantity::DpbarDc),
    ("dpbar_dbeta", Quantity::DpbarDbeta),
    ("pure_ne_count", Quantity::PureNeCount),
    ("np_ne_count", Quantity::NpNeCount),
    ("separating_ne_count", Quantity::SeparatingNeCount),
    ("mixed_q_a", Quantity::MixedQa),
    ("mixed_q_b", Quantity::MixedQb),
    ("prop1", Quantity::Prop1),
    ("prop2", Quantity::Prop2),
    ("prop3_a", Quantity::Prop3A),
    ("prop3_b", Quantity::Prop3B),
    ("class", Quantity::Class),
];

impl Quantity {
    /// Parses a quantity name. Cell payoffs are named `payoff_<PROFILE>_<a|b>`,
    /// e.g. `payoff_PNP_b`.
    pub fn parse(name: &str) -> Result<Quantity> {
        if let Some(&(_, q)) = SIMPLE.iter().find(|(n, _)| *n == name) {
            return Ok(q);
        }
        let payoff = name.strip_prefix("payoff_").and_then(|rest| {
            let (key, player) = rest.rsplit_once('_')?;
            let player = match player {
                "a" => Player::A,
                "b" => Player::B,
                _ => return None,
            };
            Some(Quantity::Payoff(Profile::from_key(key)?, player))
        });
        payoff.ok_or_else(|| GameError::Spec(format!("unknown quantity '{}'", name)))
    }

    /// Every accepted quantity name.
    pub fn all_names() -> Vec<String> {
        let mut names: Vec<String> = SIMPLE.iter().map(|(n, _)| String::from(*n)).collect();
        for p in Profile::ALL {
            for who in ["a", "b"] {
                names.push(format!("payoff_{}_{}", p.key(), who));
            }
        }
        names
    }

    /// Evaluates the quantity. Equilibrium quantities use the swap matrix
    /// built with `behavior`.
    pub fn evaluate(self, params: &GameParams, behavior: &BehaviorPolicy) -> Result<SweepValue> {
        use SweepValue::{Flag, Label, Number};
        let count = |pred: fn(&Profile) -> bool| -> Result<SweepValue> {
            let m = build_matrix(params, behavior)?;
            Ok(Number(pure_nash(&m).iter().filter(|p| pred(p)).count() as f64))
        };
        Ok(match self {
            Quantity::PBarEq15 => Number(threshold_p_eq15(params)?.value),
            Quantity::PBarDeviation => Number(threshold_p_deviation(params)?),
            Quantity::PBarNumeric => threshold_p_numeric(params, behavior)?.p_pp_br.map_or(SweepValue::Missing, Number),
            Quantity::PUnique => threshold_p_numeric(params, behavior)?.p_unique.map_or(SweepValue::Missing, Number),
            Quantity::DpbarDc => Number(dpbar_dc(params)?),
            Quantity::DpbarDbeta => Number(dpbar_dbeta(params)?),
            Quantity::Payoff(profile, player) => {
                let cell = build_matrix(params, behavior)?.cell(profile);
                Number(match player {
                    Player::A => cell.a,
                    Player::B => cell.b,
                })
            }
            Quantity::PureNeCount => count(|_| true)?,
            Quantity::NpNeCount => count(|p| p.preparers() < 2)?,
            Quantity::SeparatingNeCount => count(|p| p.preparers() == 1)?,
            Quantity::MixedQa | Quantity::MixedQb => match mixed_nash_2x2(&build_matrix(params, behavior)?) {
                Some(mix) => Number(if self == Quantity::MixedQa { mix.q_a } else { mix.q_b }),
                None => SweepValue::Missing,
            },
            Quantity::Prop1 => Flag(check_prop1(params).condition.holds),
            Quantity::Prop2 => Flag(check_prop2(params)?.condition_holds),
            Quantity::Prop3A => Flag(check_prop3(params).player_a.holds),
            Quantity::Prop3B => Flag(check_prop3(params).player_b.holds),
            Quantity::Class => Label(classify_hetero(params)?.name()),
        })
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Quantity::Payoff(profile, player) = self {
            let who = match player {
                Player::A => "a",
                Player::B => "b",
            };
            return write!(f, "payoff_{}_{}", profile.key(), who);
        }
        let name = SIMPLE.iter().find(|(_, q)| q == self).map(|(n, _)| *n).unwrap_or("?");
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepValue {
    Number(f64),
    Flag(bool),
    Label(&'static str),
    /// Not defined at this point; the row annotations say why.
    Missing,
}

impl fmt::Display for SweepValue {
    /// Numbers use the shortest representation that round-trips; missing values are empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepValue::Number(x) => write!(f, "{}", x),
            SweepValue::Flag(b) => write!(f, "{}", b),
            SweepValue::Label(s) => f.write_str(s),
            SweepValue::Missing => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: GameParams,
    pub behavior: BehaviorPolicy,
    pub axis: Field,
    pub grid: Vec<f64>,
    pub outputs: Vec<Quantity>,
}

impl SweepSpec {
    /// Checks that the grid is non-empty, finite and strictly increasing and
    /// that at least one output is requested.
    pub fn check(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(GameError::Spec(String::from("sweep grid is empty")));
        }
        if self.grid.iter().any(|x| !x.is_finite()) {
            return Err(GameError::Spec(String::from("sweep grid contains a non-finite value")));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GameError::Spec(String::from("sweep grid must be strictly increasing")));
        }
        if self.outputs.is_empty() {
            return Err(GameError::Spec(String::from("no sweep outputs requested")));
        }
        Ok(())
    }
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => alloc::vec![start],
        n => {
            (0..n).map(|k| if k == n - 1 { stop } else { start + (stop - start) * k as f64 / (n - 1) as f64 }).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    pub values: Vec<SweepValue>,
    pub annotations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub base: GameParams,
    pub axis: Field,
    pub outputs: Vec<Quantity>,
    pub rows: Vec<SweepRow>,
}

/// Evaluates every output at one axis value. Failures become annotations.
pub fn evaluate_row(spec: &SweepSpec, x: f64) -> SweepRow {
    let mut params = spec.base.with(spec.axis, x);
    if spec.base.is_symmetric() && matches!(spec.axis, Field::ThetaA | Field::ThetaB) {
        params = params.with(Field::ThetaA, x).with(Field::ThetaB, x);
    }
    let mut annotations = Vec::new();
    if let Err(e) = params.validate_limits() {
        annotations.push(format!("{}", e));
        return SweepRow { x, values: alloc::vec![SweepValue::Missing; spec.outputs.len()], annotations };
    }
    let values = spec
        .outputs
        .iter()
        .map(|q| match q.evaluate(&params, &spec.behavior) {
            Ok(v) => {
                if v == SweepValue::Missing {
                    annotations.push(format!("{}: not attained", q));
                }
                v
            }
            Err(e) => {
                annotations.push(format!("{}: {}", q, e));
                SweepValue::Missing
            }
        })
        .collect();
    SweepRow { x, values, annotations }
}

/// Rows are produced in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.check()?;
    Ok(assemble_sweep(spec, spec.grid.iter().map(|&x| evaluate_row(spec, x)).collect()))
}

/// Wraps rows computed elsewhere (e.g. in parallel) into a result.
pub fn assemble_sweep(spec: &SweepSpec, rows: Vec<SweepRow>) -> SweepResult {
    SweepResult { base: spec.base, axis: spec.axis, outputs: spec.outputs.clone(), rows }
}
