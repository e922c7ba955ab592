//! Subcommand bodies. Each renders to a `String` so output bytes can be
//! compared and written to stdout or a file by the caller.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use scriptswap_core::equilibrium::{
    find_ratio_thresholds, pure_nash, solve as solve_game, EquilibriumReport, HeteroClass, Inequality,
    MixedEquilibrium, PropVerdicts, ThresholdReport,
};
use scriptswap_core::mcsim::{
    audit_config, audit_rows, chunk_count, finish, simulate_chunk, AuditRow, SimConfig, SimStats,
};
use scriptswap_core::statics::{assemble_sweep, evaluate_row, SweepResult, SweepSpec, SweepValue};
use scriptswap_core::welfare::{check_prop4, integrity, welfare, IntegrityMetric, Prop4Check, WelfareSpec};
use scriptswap_core::{build_matrix, build_matrix_in, BehaviorPolicy, Cell, GameParams, PayoffMatrix, Profile, Regime};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::format::{csv_string, json_string, key_values, num, opt_num, round12, sig12, Format, Table, SCHEMA_VERSION};

/// Grid points used by `threshold --ratio`.
pub const RATIO_GRID: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    #[serde(rename = "PP")]
    pub pp: Cell,
    #[serde(rename = "PNP")]
    pub pnp: Cell,
    #[serde(rename = "NPP")]
    pub npp: Cell,
    #[serde(rename = "NPNP")]
    pub npnp: Cell,
}

impl From<&PayoffMatrix> for MatrixJson {
    fn from(m: &PayoffMatrix) -> Self {
        MatrixJson {
            pp: m.cell(Profile::PP),
            pnp: m.cell(Profile::PNP),
            npp: m.cell(Profile::NPP),
            npnp: m.cell(Profile::NPNP),
        }
    }
}

fn keys(profiles: &[Profile]) -> Vec<String> {
    profiles.iter().map(|p| String::from(p.key())).collect()
}

fn profile_list(profiles: &[Profile]) -> String {
    if profiles.is_empty() {
        return String::from("none");
    }
    profiles.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveOutput {
    pub schema_version: u32,
    pub command: String,
    pub params: GameParams,
    pub behavior: BehaviorPolicy,
    pub matrix: MatrixJson,
    pub pure_ne: Vec<String>,
    pub mixed_ne: Option<MixedEquilibrium>,
    pub thresholds: ThresholdReport,
    pub prop_verdicts: PropVerdicts,
    pub hetero_class: HeteroClass,
    pub consistency_notes: Vec<String>,
}

fn matrix_table(m: &PayoffMatrix, ne: &[Profile]) -> String {
    let mut t = Table::new(["", "B: P", "B: NP"]);
    for (label, a) in
        [("A: P", scriptswap_core::PrepStrategy::Prepare), ("A: NP", scriptswap_core::PrepStrategy::NotPrepare)]
    {
        let cell = |b| {
            let profile = Profile::new(a, b);
            let c = m.cell(profile);
            let star = if ne.contains(&profile) { " *" } else { "" };
            format!("({}, {}){}", num(c.a), num(c.b), star)
        };
        t.row([
            String::from(label),
            cell(scriptswap_core::PrepStrategy::Prepare),
            cell(scriptswap_core::PrepStrategy::NotPrepare),
        ]);
    }
    t.render()
}

fn inequality(i: &Inequality) -> String {
    format!("{} vs {} ({})", num(i.lhs), num(i.rhs), if i.holds { "holds" } else { "fails" })
}

fn verdict(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "agrees",
        Some(false) => "DISAGREES",
        None => "n/a",
    }
}

fn threshold_pairs(t: &ThresholdReport) -> Vec<(&'static str, String)> {
    let eq15 = match (t.p_bar_eq15, t.p_bar_eq15_in_unit_interval) {
        (Some(v), Some(false)) => format!("{} (outside [0,1])", num(v)),
        (v, _) => opt_num(v),
    };
    vec![
        ("p_bar_eq15", eq15),
        ("p_bar_dev", opt_num(t.p_bar_deviation)),
        ("p_bar_numeric", opt_num(t.p_bar_numeric)),
        ("p_unique_numeric", opt_num(t.p_unique_numeric)),
    ]
}

fn notes_block(out: &mut String, title: &str, notes: &[String]) {
    if notes.is_empty() {
        return;
    }
    let _ = writeln!(out, "\n{}", title);
    for n in notes {
        let _ = writeln!(out, "  {}", n);
    }
}

fn solve_table(m: &PayoffMatrix, r: &EquilibriumReport) -> String {
    let mut out = String::from("Payoff matrix, swap regime, cells (U_A, U_B), * marks pure NE\n");
    out.push_str(&matrix_table(m, &r.pure_ne));
    let _ = writeln!(out, "\npure NE   {}", profile_list(&r.pure_ne));
    match r.mixed_ne {
        Some(mix) => {
            let _ = writeln!(out, "mixed NE  Pr[A prepares] = {}, Pr[B prepares] = {}", num(mix.q_a), num(mix.q_b));
        }
        None => out.push_str("mixed NE  none\n"),
    }
    let _ = writeln!(out, "class     {}", r.hetero_class.name());
    out.push_str("\nThresholds on p\n");
    out.push_str(&key_values(&threshold_pairs(&r.thresholds)));
    notes_block(&mut out, "Threshold annotations", &r.thresholds.annotations);
    let v = &r.prop_verdicts;
    out.push_str("\nPropositions\n");
    let t1 = match v.theorem1.condition_holds {
        Some(c) => format!(
            "condition {}, unique (P,P) {}, {}",
            c,
            v.theorem1.model_unique_pp,
            verdict(v.theorem1.model_agrees)
        ),
        None => format!("condition n/a, unique (P,P) {}", v.theorem1.model_unique_pp),
    };
    out.push_str(&key_values(&[
        ("prop1 condition", inequality(&v.prop1.condition)),
        ("prop1 model", format!("{}, {}", inequality(&v.prop1.model), verdict(Some(v.prop1.model_agrees)))),
        ("prop2 A", inequality(&v.prop2.player_a)),
        ("prop2 B", inequality(&v.prop2.player_b)),
        (
            "prop2 verdict",
            format!(
                "condition {}, (NP,NP) is NE {}, {}",
                v.prop2.condition_holds,
                v.prop2.model_holds,
                verdict(v.prop2.model_agrees)
            ),
        ),
        ("prop3 A", inequality(&v.prop3.player_a)),
        ("prop3 B", inequality(&v.prop3.player_b)),
        ("theorem1", t1),
    ]));
    notes_block(&mut out, "Consistency notes", &r.consistency_notes);
    out
}

pub fn solve(config: &RunConfig, format: Format) -> Result<String> {
    let m = build_matrix(&config.params, &config.behavior)?;
    let report = solve_game(&config.params, &config.behavior)?;
    match format {
        Format::Table => Ok(solve_table(&m, &report)),
        Format::Json => json_string(&SolveOutput {
            schema_version: SCHEMA_VERSION,
            command: String::from("solve"),
            params: config.params,
            behavior: config.behavior,
            matrix: MatrixJson::from(&m),
            pure_ne: keys(&report.pure_ne),
            mixed_ne: report.mixed_ne,
            thresholds: report.thresholds,
            prop_verdicts: report.prop_verdicts,
            hetero_class: report.hetero_class,
            consistency_notes: report.consistency_notes,
        }),
        Format::Csv => csv_string(
            &["profile", "u_a", "u_b", "pure_ne"],
            Profile::ALL.iter().map(|&p| {
                let c = m.cell(p);
                vec![String::from(p.key()), num(c.a), num(c.b), report.pure_ne.contains(&p).to_string()]
            }),
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioOutput {
    pub theta_b: f64,
    pub rho_lo: Option<f64>,
    pub rho_hi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdOutput {
    pub schema_version: u32,
    pub command: String,
    pub params: GameParams,
    pub behavior: BehaviorPolicy,
    pub thresholds: ThresholdReport,
    pub ratio: Option<RatioOutput>,
    pub consistency_notes: Vec<String>,
}

/// Thresholds on `p`; with `ratio_theta_b`, also the ability-ratio
/// transitions at that fixed θ_B.
pub fn threshold(config: &RunConfig, ratio_theta_b: Option<f64>, format: Format) -> Result<String> {
    let report = solve_game(&config.params, &config.behavior)?;
    let ratio = match ratio_theta_b {
        Some(theta_b) => {
            let r = find_ratio_thresholds(&config.params, theta_b, RATIO_GRID)?;
            Some(RatioOutput { theta_b, rho_lo: r.rho_lo, rho_hi: r.rho_hi })
        }
        None => None,
    };
    let t = report.thresholds;
    let mut pairs = threshold_pairs(&t);
    if let Some(r) = &ratio {
        pairs.push(("rho_lo", opt_num(r.rho_lo)));
        pairs.push(("rho_hi", opt_num(r.rho_hi)));
    }
    match format {
        Format::Table => {
            let mut out = key_values(&pairs);
            notes_block(&mut out, "Threshold annotations", &t.annotations);
            notes_block(&mut out, "Consistency notes", &report.consistency_notes);
            Ok(out)
        }
        Format::Json => json_string(&ThresholdOutput {
            schema_version: SCHEMA_VERSION,
            command: String::from("threshold"),
            params: config.params,
            behavior: config.behavior,
            thresholds: t,
            ratio,
            consistency_notes: report.consistency_notes,
        }),
        Format::Csv => csv_string(
            &["quantity", "value"],
            pairs.iter().map(|(k, v)| {
                let v = v.split(' ').next().filter(|s| *s != "-").unwrap_or("");
                vec![String::from(*k), String::from(v)]
            }),
        ),
    }
}

fn sweep_rows(spec: &SweepSpec) -> SweepResult {
    let rows = spec.grid.par_iter().map(|&x| evaluate_row(spec, x)).collect();
    assemble_sweep(spec, rows)
}

fn sweep_value_json(v: &SweepValue) -> Value {
    match v {
        SweepValue::Number(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
        SweepValue::Flag(b) => Value::Bool(*b),
        SweepValue::Label(s) => Value::String(String::from(*s)),
        SweepValue::Missing => Value::Null,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRowJson {
    pub x: f64,
    pub values: Vec<Value>,
    pub annotations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepOutput {
    pub schema_version: u32,
    pub command: String,
    pub params: GameParams,
    pub behavior: BehaviorPolicy,
    pub axis: String,
    pub outputs: Vec<String>,
    pub rows: Vec<SweepRowJson>,
}

/// Evaluates the configured outputs along the sweep axis, rows in grid order.
/// The CSV has the axis as first column and a trailing `notes` column.
pub fn sweep(config: &RunConfig, format: Format) -> Result<String> {
    let spec = config.sweep_spec()?;
    let result = sweep_rows(&spec);
    let outputs: Vec<String> = result.outputs.iter().map(ToString::to_string).collect();
    let axis = result.axis.name();
    match format {
        Format::Csv => {
            let mut header = vec![axis];
            header.extend(outputs.iter().map(String::as_str));
            header.push("notes");
            csv_string(
                &header,
                result.rows.iter().map(|r| {
                    let mut cells = vec![num(r.x)];
                    cells.extend(r.values.iter().map(ToString::to_string));
                    cells.push(r.annotations.join("; "));
                    cells
                }),
            )
        }
        Format::Json => json_string(&SweepOutput {
            schema_version: SCHEMA_VERSION,
            command: String::from("sweep"),
            params: config.params,
            behavior: config.behavior,
            axis: String::from(axis),
            outputs,
            rows: result
                .rows
                .iter()
                .map(|r| SweepRowJson {
                    x: r.x,
                    values: r.values.iter().map(sweep_value_json).collect(),
                    annotations: r.annotations.clone(),
                })
                .collect(),
        }),
        Format::Table => {
            let mut header = vec![String::from(axis)];
            header.extend(outputs.iter().cloned());
            let mut t = Table::new(header);
            let mut notes = Vec::new();
            for r in &result.rows {
                let mut cells = vec![num(r.x)];
                cells.extend(r.values.iter().map(|v| match v {
                    SweepValue::Missing => String::from("-"),
                    other => other.to_string(),
                }));
                t.row(cells);
                notes.extend(r.annotations.iter().map(|a| format!("{} = {}: {}", axis, num(r.x), a)));
            }
            let mut out = t.render();
            notes_block(&mut out, "Notes", &notes);
            Ok(out)
        }
    }
}

/// Which cells `simulate` runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimSelection {
    pub profiles: Vec<Profile>,
    pub regimes: Vec<Regime>,
}

impl Default for SimSelection {
    fn default() -> Self {
        SimSelection { profiles: Profile::ALL.to_vec(), regimes: Regime::BOTH.to_vec() }
    }
}

/// Accepts `PP`, `PNP`, `NPP`, `NPNP` or the `(P,NP)` form.
pub fn parse_profile(text: &str) -> Result<Profile> {
    let t = text.trim();
    let key: String = t.chars().filter(|c| !matches!(c, '(' | ')' | ',' | ' ')).collect();
    Profile::from_key(&key.to_ascii_uppercase())
        .ok_or_else(|| CliError::Input(format!("unknown profile '{}' (expected PP, PNP, NPP or NPNP)", t)))
}

pub fn parse_regimes(text: &str) -> Result<Vec<Regime>> {
    match text.trim().to_ascii_lowercase().as_str() {
        "swap" => Ok(vec![Regime::Swap]),
        "traditional" => Ok(vec![Regime::Traditional]),
        "both" => Ok(Regime::BOTH.to_vec()),
        other => Err(CliError::Input(format!("unknown regime '{}' (expected swap, traditional or both)", other))),
    }
}

/// Runs one simulation with chunks evaluated on the current rayon pool.
/// Chunks are merged in index order, so the result does not depend on the
/// number of threads.
pub fn simulate_parallel(cfg: &SimConfig) -> Result<SimStats> {
    cfg.check()?;
    let chunks: Vec<_> = (0..chunk_count(cfg.n)).into_par_iter().map(|k| simulate_chunk(cfg, k)).collect();
    Ok(finish(cfg, &chunks))
}

/// Audit rows for the selected cells, in profile-then-regime order.
pub fn audit(
    params: &GameParams,
    behavior: &BehaviorPolicy,
    selection: &SimSelection,
    n: u64,
    seed: u64,
) -> Result<Vec<AuditRow>> {
    let mut rows = Vec::new();
    for &profile in &selection.profiles {
        for &regime in &selection.regimes {
            let stats = simulate_parallel(&audit_config(params, behavior, profile, regime, n, seed))?;
            rows.extend(audit_rows(params, behavior, profile, regime, &stats)?);
        }
    }
    Ok(rows)
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditRowJson {
    pub profile: String,
    pub regime: String,
    pub player: String,
    pub closed_form: f64,
    pub mc_mean: f64,
    /// Absent when fewer than two samples make it undefined.
    pub se: Option<f64>,
    pub z: Option<f64>,
    pub flagged: bool,
}

impl From<&AuditRow> for AuditRowJson {
    fn from(r: &AuditRow) -> Self {
        AuditRowJson {
            profile: String::from(r.profile.key()),
            regime: String::from(r.regime.name()),
            player: String::from(r.player.label()),
            closed_form: r.closed_form,
            mc_mean: round12(r.mc_mean),
            se: finite(r.se).map(round12),
            z: finite(r.z).map(round12),
            flagged: r.flagged,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateOutput {
    pub schema_version: u32,
    pub command: String,
    pub params: GameParams,
    pub behavior: BehaviorPolicy,
    pub n: u64,
    pub seed: u64,
    pub rows: Vec<AuditRowJson>,
}

/// Monte Carlo estimates against the closed-form cells. Means, standard
/// errors and z-scores are reported at 12 significant digits.
pub fn simulate(config: &RunConfig, selection: &SimSelection, format: Format) -> Result<String> {
    let (n, seed) = (config.sim.n, config.sim.seed);
    let rows = audit(&config.params, &config.behavior, selection, n, seed)?;
    match format {
        Format::Csv => csv_string(
            &["profile", "regime", "player", "closed_form", "mc_mean", "se", "z"],
            rows.iter().map(|r| {
                vec![
                    String::from(r.profile.key()),
                    String::from(r.regime.name()),
                    String::from(r.player.label()),
                    num(r.closed_form),
                    sig12(r.mc_mean),
                    sig12(r.se),
                    sig12(r.z),
                ]
            }),
        ),
        Format::Json => json_string(&SimulateOutput {
            schema_version: SCHEMA_VERSION,
            command: String::from("simulate"),
            params: config.params,
            behavior: config.behavior,
            n,
            seed,
            rows: rows.iter().map(AuditRowJson::from).collect(),
        }),
        Format::Table => {
            let mut t = Table::new(["profile", "regime", "player", "closed_form", "mc_mean", "se", "z", "flag"]);
            for r in &rows {
                t.row([
                    r.profile.to_string(),
                    String::from(r.regime.name()),
                    String::from(r.player.label()),
                    num(r.closed_form),
                    sig12(r.mc_mean),
                    sig12(r.se),
                    sig12(r.z),
                    String::from(if r.flagged { "|z|>4" } else { "" }),
                ]);
            }
            let flagged = rows.iter().filter(|r| r.flagged).count();
            Ok(format!("n = {}, seed = {}\n{}{} of {} estimates flagged\n", n, seed, t.render(), flagged, rows.len()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileWelfare {
    pub profile: String,
    pub u_a: f64,
    pub u_b: f64,
    pub integrity: f64,
    pub welfare: f64,
    pub pure_ne: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeWelfare {
    pub regime: String,
    pub detection_probability: f64,
    pub cells: Vec<ProfileWelfare>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WelfareOutput {
    pub schema_version: u32,
    pub command: String,
    pub params: GameParams,
    pub behavior: BehaviorPolicy,
    pub spec: WelfareSpec,
    pub regimes: Vec<RegimeWelfare>,
    /// Swap regime compared against the traditional regime.
    pub comparison: Prop4Check,
}

fn regime_welfare(config: &RunConfig, spec: &WelfareSpec, regime: Regime) -> Result<(PayoffMatrix, RegimeWelfare)> {
    let m = build_matrix_in(&config.params, &config.behavior, regime)?;
    let ne = pure_nash(&m);
    let cells = Profile::ALL
        .iter()
        .map(|&p| {
            let c = m.cell(p);
            ProfileWelfare {
                profile: String::from(p.key()),
                u_a: c.a,
                u_b: c.b,
                integrity: integrity(&m, p, spec.metric),
                welfare: welfare(&m, p, spec),
                pure_ne: ne.contains(&p),
            }
        })
        .collect();
    let detection_probability = regime.detection_probability(&config.params);
    Ok((m, RegimeWelfare { regime: String::from(regime.name()), detection_probability, cells }))
}

pub fn welfare_cmd(config: &RunConfig, format: Format) -> Result<String> {
    let spec = config.welfare_spec();
    let (swap_m, swap) = regime_welfare(config, &spec, Regime::Swap)?;
    let (trad_m, trad) = regime_welfare(config, &spec, Regime::Traditional)?;
    let comparison = check_prop4(&swap_m, &trad_m, &spec);
    let regimes = vec![swap, trad];
    match format {
        Format::Json => json_string(&WelfareOutput {
            schema_version: SCHEMA_VERSION,
            command: String::from("welfare"),
            params: config.params,
            behavior: config.behavior,
            spec,
            regimes,
            comparison,
        }),
        Format::Csv => csv_string(
            &["regime", "profile", "u_a", "u_b", "integrity", "welfare", "pure_ne"],
            regimes.iter().flat_map(|r| {
                r.cells.iter().map(move |c| {
                    vec![
                        r.regime.clone(),
                        c.profile.clone(),
                        num(c.u_a),
                        num(c.u_b),
                        num(c.integrity),
                        num(c.welfare),
                        c.pure_ne.to_string(),
                    ]
                })
            }),
        ),
        Format::Table => {
            let metric = match spec.metric {
                IntegrityMetric::PrepRate => String::from("prep_rate"),
                IntegrityMetric::HonestRate => String::from("honest_rate"),
                IntegrityMetric::Constant(v) => format!("constant {}", num(v)),
            };
            let mut out = format!("lambda = {}, metric = {}\n", num(spec.lambda), metric);
            let mut t = Table::new(["regime", "profile", "u_a", "u_b", "integrity", "welfare", "NE"]);
            for r in &regimes {
                for c in &r.cells {
                    t.row([
                        r.regime.clone(),
                        c.profile.clone(),
                        num(c.u_a),
                        num(c.u_b),
                        num(c.integrity),
                        num(c.welfare),
                        String::from(if c.pure_ne { "*" } else { "" }),
                    ]);
                }
            }
            out.push_str(&t.render());
            out.push_str("\nDetection-weighted gain of mutual preparation over mutual non-preparation\n");
            out.push_str(&key_values(&[
                ("swap", num(comparison.lhs)),
                ("traditional", num(comparison.rhs)),
                ("swap strictly larger", comparison.condition_holds.to_string()),
                ("(NP,NP) welfare equal", comparison.npnp_coincide.to_string()),
            ]));
            Ok(out)
        }
    }
}
