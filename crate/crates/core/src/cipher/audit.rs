use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::chains::{find_trapdoor_chains, ChainMode, ChainSearch, PartitionChain};
use super::TbCipher;
use crate::error::{Error, Result};
use crate::gf2::{EnumerationCap, Wall};
use crate::mixing::JRange;
use crate::sbox::{AntiInvarianceBudget, SBox};

/// How a brick's uniformity hypothesis is established.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniformityRoute {
    /// `δ <= 2^r` with `r < m`.
    #[default]
    Delta,
    /// Either `δ <= 2^r`, or every nonzero derivative image is larger than
    /// `2^(m-r)`; both with `r < m`.
    Condition1Prime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuditOptions {
    pub route: UniformityRoute,
    pub j_range: JRange,
    /// Run the exhaustive chain search when `d` is at most this value.
    pub exhaustive_cap: Option<usize>,
    pub budget: AntiInvarianceBudget,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            route: UniformityRoute::Delta,
            j_range: JRange::Strict,
            exhaustive_cap: None,
            budget: AntiInvarianceBudget::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Secure,
    Vulnerable,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Secure => "secure",
            Status::Vulnerable => "vulnerable",
            Status::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Layer `round` is strongly proper and the bricks of rounds `round` and
    /// `round + 1` satisfy the hypotheses (1-based).
    StronglyProperRound { round: usize },
    /// The layer family is strongly proper and every round's bricks satisfy
    /// the hypotheses.
    StronglyProperFamily,
    /// A verified chain of linear partitions through the keyless rounds.
    Chain { mode: ChainMode, chain: PartitionChain },
    /// Hypotheses that failed or could not be checked.
    Failures { failures: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrickAssessment {
    /// 1-based brick number.
    pub brick: usize,
    pub delta: u32,
    pub min_derivative_image: usize,
    /// Exponent `r` of the route that passed, or of the δ route otherwise.
    pub r: usize,
    /// Route that established the hypotheses.
    pub route: Option<UniformityRoute>,
    /// Strong `(r-1)`-anti-invariance; `None` when it was not checked or the
    /// budget was exceeded.
    pub anti_invariant: Option<bool>,
    /// The anti-invariance scan was refused by the budget.
    #[serde(default)]
    pub budget_exceeded: bool,
    pub passes: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundAssessment {
    /// 1-based round number.
    pub round: usize,
    pub layer_proper: bool,
    pub layer_strongly_proper: bool,
    /// A proper wall sent to a wall, as 1-based brick numbers.
    pub wall_witness: Option<(Vec<usize>, Vec<usize>)>,
    pub bricks: Vec<BrickAssessment>,
    pub bricks_pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditVerdict {
    pub status: Status,
    pub certificate: Certificate,
    pub route: UniformityRoute,
    pub j_range: JRange,
    pub family_strongly_proper: bool,
    /// Proper walls that stay walls under every allowed prefix.
    pub family_survivors: Vec<Vec<usize>>,
    pub rounds: Vec<RoundAssessment>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl AuditVerdict {
    /// Checks the certificate against `cipher` from scratch: chains are
    /// re-followed through the keyless rounds, clause hypotheses are
    /// recomputed.
    pub fn reverify(&self, cipher: &TbCipher) -> Result<bool> {
        let budget = AntiInvarianceBudget::default();
        let round_ok = |h: usize| -> bool {
            cipher.rounds()[h]
                .bricks()
                .iter()
                .enumerate()
                .all(|(i, f)| assess_brick(f, i, self.route, budget).passes)
        };
        match &self.certificate {
            Certificate::Chain { chain, .. } => {
                Ok(self.status == Status::Vulnerable && chain.verify(cipher)?)
            }
            Certificate::StronglyProperRound { round } => {
                let h = round.checked_sub(1).ok_or_else(|| {
                    Error::InvalidArgument("round numbers are 1-based".into())
                })?;
                if h + 1 >= cipher.rounds().len() {
                    return Ok(false);
                }
                Ok(self.status == Status::Secure
                    && cipher.rounds()[h].layer().is_strongly_proper().holds
                    && round_ok(h)
                    && round_ok(h + 1))
            }
            Certificate::StronglyProperFamily => Ok(self.status == Status::Secure
                && cipher.layers().is_strongly_proper(self.j_range).holds
                && (0..cipher.rounds().len()).all(round_ok)),
            Certificate::Failures { .. } => Ok(self.status == Status::Inconclusive),
        }
    }
}

/// Strong `(r-1)`-anti-invariance, vacuous for `r = 1`.
fn anti_invariance(f: &SBox, r: usize, budget: AntiInvarianceBudget) -> (Option<bool>, Option<String>) {
    if r <= 1 {
        return (Some(true), None);
    }
    match f.is_strongly_anti_invariant_with(r - 1, budget) {
        Ok(c) => (Some(c.holds), None),
        Err(e) => (None, Some(format!("strong {}-anti-invariance not checked: {e}", r - 1))),
    }
}

fn assess_brick(f: &SBox, index: usize, route: UniformityRoute, budget: AntiInvarianceBudget) -> BrickAssessment {
    let m = f.m();
    let f = f.normalize();
    let delta = f.differential_uniformity();
    let img = f.min_derivative_image();
    let r = f.uniformity_exponent();
    let mut out = BrickAssessment {
        brick: index + 1,
        delta,
        min_derivative_image: img.size,
        r,
        route: None,
        anti_invariant: None,
        budget_exceeded: false,
        passes: false,
        note: None,
    };
    if r < m {
        let (anti, note) = anti_invariance(&f, r, budget);
        out.anti_invariant = anti;
        out.budget_exceeded = anti.is_none();
        out.note = note;
        if anti == Some(true) {
            out.route = Some(UniformityRoute::Delta);
            out.passes = true;
            return out;
        }
    } else {
        out.note = Some(format!("δ = {delta} is not below 2^{m}"));
    }
    if route == UniformityRoute::Condition1Prime {
        if let Some(r1) = f.relaxed_uniformity_exponent().filter(|&r1| r1 < m) {
            let (anti, note) = anti_invariance(&f, r1, budget);
            if anti == Some(true) {
                out.r = r1;
                out.route = Some(UniformityRoute::Condition1Prime);
                out.anti_invariant = anti;
                out.budget_exceeded = false;
                out.passes = true;
                out.note = None;
            } else if anti.is_none() && !out.budget_exceeded {
                out.budget_exceeded = true;
                out.note = note;
            }
        }
    }
    out
}

fn assess_rounds(c: &TbCipher, opts: &AuditOptions) -> Vec<RoundAssessment> {
    let mut cache: HashMap<&[u16], BrickAssessment> = HashMap::new();
    c.rounds()
        .iter()
        .enumerate()
        .map(|(h, round)| {
            let bricks: Vec<BrickAssessment> = round
                .bricks()
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let mut a = cache
                        .entry(f.table())
                        .or_insert_with(|| assess_brick(f, i, opts.route, opts.budget))
                        .clone();
                    a.brick = i + 1;
                    a
                })
                .collect();
            let proper = round.layer().is_proper();
            let strong = round.layer().is_strongly_proper();
            RoundAssessment {
                round: h + 1,
                layer_proper: proper.holds,
                layer_strongly_proper: strong.holds,
                wall_witness: strong.witness.map(|(a, b)| (a.numbers(), b.numbers())),
                bricks_pass: bricks.iter().all(|b| b.passes),
                bricks,
            }
        })
        .collect()
}

fn brick_failures(rounds: &[RoundAssessment]) -> Vec<String> {
    let mut out = Vec::new();
    for r in rounds {
        for b in r.bricks.iter().filter(|b| !b.passes) {
            let why = match (&b.note, b.anti_invariant) {
                (Some(n), _) => n.clone(),
                (None, Some(false)) => format!("not strongly {}-anti-invariant", b.r.saturating_sub(1)),
                _ => "hypotheses not met".to_string(),
            };
            out.push(format!("round {} brick {}: {why}", r.round, b.brick));
        }
    }
    out
}

fn fmt_wall(numbers: &[usize]) -> String {
    let parts: Vec<String> = numbers.iter().map(|n| n.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Three-valued verdict: `Secure` only through a satisfied clause,
/// `Vulnerable` only with a verified chain.
pub fn audit(c: &TbCipher, opts: &AuditOptions) -> Result<AuditVerdict> {
    let rounds = assess_rounds(c, opts);
    let family = c.layers().is_strongly_proper(opts.j_range);
    let survivors: Vec<Vec<usize>> = family.survivors().map(Wall::numbers).collect();
    let mut verdict = AuditVerdict {
        status: Status::Inconclusive,
        certificate: Certificate::Failures { failures: Vec::new() },
        route: opts.route,
        j_range: opts.j_range,
        family_strongly_proper: family.holds,
        family_survivors: survivors,
        rounds,
        notes: Vec::new(),
    };
    for r in &verdict.rounds {
        for b in r.bricks.iter().filter(|b| b.budget_exceeded) {
            verdict.notes.push(format!("round {} brick {}: {}", r.round, b.brick, b.note.as_deref().unwrap_or_default()));
        }
    }

    // The family clause is reported first; a round clause that also holds
    // is noted.
    let rs = &verdict.rounds;
    let round_clause = (0..rs.len().saturating_sub(1))
        .find(|&h| rs[h].layer_strongly_proper && rs[h].bricks_pass && rs[h + 1].bricks_pass);
    if family.holds && rs.iter().all(|r| r.bricks_pass) {
        verdict.status = Status::Secure;
        verdict.certificate = Certificate::StronglyProperFamily;
        if let Some(h) = round_clause {
            verdict.notes.push(format!(
                "the single-round clause also holds: layer {} is strongly proper",
                h + 1
            ));
        }
        return Ok(verdict);
    }
    if let Some(h) = round_clause {
        verdict.status = Status::Secure;
        verdict.certificate = Certificate::StronglyProperRound { round: h + 1 };
        return Ok(verdict);
    }

    let mut search = ChainSearch::walls();
    for chain in find_trapdoor_chains(c, search)? {
        if chain.verify(c)? {
            verdict.status = Status::Vulnerable;
            verdict.certificate = Certificate::Chain { mode: ChainMode::Walls, chain };
            return Ok(verdict);
        }
    }

    let mut failures = brick_failures(&verdict.rounds);
    if rs.len() < 2 {
        failures.push("a single round leaves no strongly proper round with a successor".into());
    } else if !rs.iter().any(|r| r.layer_strongly_proper) {
        failures.push("no layer is strongly proper".into());
    } else {
        failures.push("no strongly proper layer is flanked by rounds whose bricks pass".into());
    }
    if !family.holds {
        let w = verdict.family_survivors.first().map(|w| fmt_wall(w)).unwrap_or_default();
        failures.push(format!(
            "layer family is not strongly proper: wall {w} stays a wall under every allowed prefix"
        ));
    }
    failures.push("walls-mode search found no chain".into());

    match opts.exhaustive_cap {
        Some(cap) if c.d() <= cap => {
            search = ChainSearch {
                mode: ChainMode::Exhaustive,
                cap: EnumerationCap::new(cap),
            };
            for chain in find_trapdoor_chains(c, search)? {
                if chain.verify(c)? {
                    verdict.status = Status::Vulnerable;
                    verdict.certificate = Certificate::Chain { mode: ChainMode::Exhaustive, chain };
                    return Ok(verdict);
                }
            }
            failures.push("exhaustive search found no chain".into());
        }
        Some(cap) => failures.push(format!(
            "exhaustive search skipped: d = {} exceeds the cap {cap}",
            c.d()
        )),
        None => {}
    }
    verdict.certificate = Certificate::Failures { failures };
    Ok(verdict)
}
