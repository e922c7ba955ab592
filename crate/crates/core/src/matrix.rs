//! The 2×2 preparation-stage game.
//!
//! Each cell folds the copying and detection stage into expected payoffs.
//! Copy attempts follow the [`BehaviorPolicy`]; a single detection event is
//! drawn per exam whenever at least one student copies.

use core::fmt;

use crate::error::Result;
use crate::model::{BehaviorPolicy, GameParams, PrepStrategy, Regime};
use crate::payoffs::{copy_result, raw_score, swap_payoff};

/// A pure preparation profile `(s_A, s_B)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Profile {
    pub a: PrepStrategy,
    pub b: PrepStrategy,
}

impl Profile {
    pub const PP: Profile = Profile { a: PrepStrategy::Prepare, b: PrepStrategy::Prepare };
    pub const PNP: Profile = Profile { a: PrepStrategy::Prepare, b: PrepStrategy::NotPrepare };
    pub const NPP: Profile = Profile { a: PrepStrategy::NotPrepare, b: PrepStrategy::Prepare };
    pub const NPNP: Profile = Profile { a: PrepStrategy::NotPrepare, b: PrepStrategy::NotPrepare };

    /// All four profiles in fixed order PP, PNP, NPP, NPNP.
    pub const ALL: [Profile; 4] = [Profile::PP, Profile::PNP, Profile::NPP, Profile::NPNP];

    pub fn new(a: PrepStrategy, b: PrepStrategy) -> Self {
        Profile { a, b }
    }

    /// Cell key used in serialized matrices: "PP", "PNP", "NPP", "NPNP".
    pub fn key(self) -> &'static str {
        match (self.a, self.b) {
            (PrepStrategy::Prepare, PrepStrategy::Prepare) => "PP",
            (PrepStrategy::Prepare, PrepStrategy::NotPrepare) => "PNP",
            (PrepStrategy::NotPrepare, PrepStrategy::Prepare) => "NPP",
            (PrepStrategy::NotPrepare, PrepStrategy::NotPrepare) => "NPNP",
        }
    }

    pub fn from_key(key: &str) -> Option<Profile> {
        Profile::ALL.iter().copied().find(|p| p.key() == key)
    }

    pub fn transposed(self) -> Self {
        Profile { a: self.b, b: self.a }
    }

    pub fn preparers(self) -> usize {
        usize::from(self.a.is_prepared()) + usize::from(self.b.is_prepared())
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a.label(), self.b.label())
    }
}

/// Expected payoffs of one profile.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Cell {
    pub a: f64,
    pub b: f64,
}

impl Cell {
    pub fn new(a: f64, b: f64) -> Self {
        Cell { a, b }
    }

    pub fn swapped(self) -> Self {
        Cell { a: self.b, b: self.a }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    /// Indexed `[s_A][s_B]` with Prepare = 0.
    cells: [[Cell; 2]; 2],
    params: Option<GameParams>,
    behavior: BehaviorPolicy,
    regime: Regime,
}

impl PayoffMatrix {
    /// Matrix from explicit cells, in [`Profile::ALL`] order. Carries no parameters.
    pub fn from_cells(cells: [Cell; 4]) -> Self {
        let [pp, pnp, npp, npnp] = cells;
        PayoffMatrix {
            cells: [[pp, pnp], [npp, npnp]],
            params: None,
            behavior: BehaviorPolicy::default(),
            regime: Regime::Swap,
        }
    }

    pub fn cell(&self, profile: Profile) -> Cell {
        self.cells[profile.a.index()][profile.b.index()]
    }

    /// `(profile, cell)` pairs in [`Profile::ALL`] order.
    pub fn iter(&self) -> impl Iterator<Item = (Profile, Cell)> + '_ {
        Profile::ALL.iter().map(move |&p| (p, self.cell(p)))
    }

    /// Parameters the matrix was built from; `None` for hand-made matrices.
    pub fn params(&self) -> Option<&GameParams> {
        self.params.as_ref()
    }

    pub fn behavior(&self) -> BehaviorPolicy {
        self.behavior
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Detection probability of the matrix's regime, if built from parameters.
    pub fn detection_probability(&self) -> Option<f64> {
        self.params.as_ref().map(|p| self.regime.detection_probability(p))
    }

    /// Exchanges the roles of A and B: cell (x, y) moves to (y, x) with its payoffs swapped.
    pub fn transposed(&self) -> Self {
        let mut out = self.clone();
        for p in Profile::ALL {
            let t = p.transposed();
            out.cells[t.a.index()][t.b.index()] = self.cell(p).swapped();
        }
        out.params = self.params.map(GameParams::swap_players);
        out
    }
}

/// Expected payoffs of one profile under `regime`.
///
/// Undetected copying yields the better of the two scripts when the source
/// prepared; copying an unprepared script gains nothing. On detection the swap
/// regime exchanges both scripts, while the traditional regime leaves a caught
/// copier `tau` of the copied score and the other student untouched.
fn expected_cell(params: &GameParams, behavior: &BehaviorPolicy, regime: Regime, profile: Profile) -> Cell {
    let GameParams { theta_a, theta_b, g, alpha, c, .. } = *params;
    let r_a = raw_score(theta_a, profile.a, g, alpha);
    let r_b = raw_score(theta_b, profile.b, g, alpha);
    let cost_a = if profile.a.is_prepared() { c / theta_a } else { 0.0 };
    let cost_b = if profile.b.is_prepared() { c / theta_b } else { 0.0 };
    let copy_a = behavior.attempts_copy(profile.a, profile.b);
    let copy_b = behavior.attempts_copy(profile.b, profile.a);

    if !copy_a && !copy_b {
        return Cell::new(r_a - cost_a, r_b - cost_b);
    }

    let undetected = |copies: bool, own: f64, other: f64, other_prepared: bool| {
        if copies && other_prepared {
            copy_result(own, other)
        } else {
            own
        }
    };
    let u_a = undetected(copy_a, r_a, r_b, profile.b.is_prepared());
    let u_b = undetected(copy_b, r_b, r_a, profile.a.is_prepared());

    let (d_a, d_b) = match regime {
        Regime::Swap => (swap_payoff(r_b, theta_a, params), swap_payoff(r_a, theta_b, params)),
        Regime::Traditional => {
            let caught = |copies: bool, own: f64, other: f64| {
                if copies {
                    params.tau * other
                } else {
                    own
                }
            };
            (caught(copy_a, r_a, r_b), caught(copy_b, r_b, r_a))
        }
    };

    let q = regime.detection_probability(params);
    Cell::new((1.0 - q) * u_a + q * d_a - cost_a, (1.0 - q) * u_b + q * d_b - cost_b)
}

/// Builds the swap-regime preparation game.
pub fn build_matrix(params: &GameParams, behavior: &BehaviorPolicy) -> Result<PayoffMatrix> {
    build_matrix_in(params, behavior, Regime::Swap)
}

/// Builds the preparation game under either punishment regime.
///
/// Parameters are checked with [`GameParams::validate_limits`], so interval
/// end points are evaluated as limiting cases.
pub fn build_matrix_in(params: &GameParams, behavior: &BehaviorPolicy, regime: Regime) -> Result<PayoffMatrix> {
    let params = params.validate_limits()?;
    let cell = |p| expected_cell(&params, behavior, regime, p);
    Ok(PayoffMatrix {
        cells: [[cell(Profile::PP), cell(Profile::PNP)], [cell(Profile::NPP), cell(Profile::NPNP)]],
        params: Some(params),
        behavior: *behavior,
        regime,
    })
}

/// The four symmetric-ability payoffs, written in the familiar closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SymmetricPayoffs {
    pub pi_pp: f64,
    /// Prepared student whose script is copied.
    pub pi_a_pnp: f64,
    /// Unprepared copier.
    pub pi_b_pnp: f64,
    pub pi_npnp: f64,
}

pub fn symmetric_payoffs(params: &GameParams) -> Result<SymmetricPayoffs> {
    let params = params.validate_limits()?;
    let theta = params.symmetric_theta()?;
    let GameParams { g, alpha, beta, gamma, p, c, .. } = params;
    let tg = theta * g;
    Ok(SymmetricPayoffs {
        pi_pp: tg - c / theta,
        pi_a_pnp: (1.0 - p) * tg + p * (beta * alpha + (1.0 - beta) * gamma) * tg - c / theta,
        pi_b_pnp: (1.0 - p) * tg + p * (beta + (1.0 - beta) * gamma) * tg,
        pi_npnp: alpha * tg,
    })
}
