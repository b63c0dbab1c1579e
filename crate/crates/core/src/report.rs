//! The machine-readable report and its independent re-verification.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cipher::{AuditOptions, AuditVerdict, ChainMode, PartitionChain, TbCipher, UniformityRoute};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BrickLayout, Subspace, Wall};
use crate::hex::parse_word;
use crate::mixing::{JRange, LayerFamily, MixingLayer};
use crate::sbox::{SBox, SBoxReport};

pub const SCHEMA_VERSION: u32 = 1;

/// Per-wall family results are listed individually up to this many walls.
pub const MAX_LISTED_WALLS: usize = 4096;

/// Interpretation choices that affect verdicts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Definitions {
    pub strongly_proper: String,
    pub j_range: JRange,
    pub condition1prime: bool,
    pub keyless_round: String,
    pub apn_anti_invariance: String,
}

impl Definitions {
    pub fn new(j_range: JRange, route: UniformityRoute) -> Self {
        Self {
            strongly_proper: "no proper wall is mapped onto any wall, itself or another".into(),
            j_range,
            condition1prime: route == UniformityRoute::Condition1Prime,
            keyless_round: "bricklayer with f(0) normalized to 0, then mixing layer".into(),
            apn_anti_invariance: "for delta = 2 the strong 0-anti-invariance hypothesis holds vacuously".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CipherSummary {
    pub m: usize,
    pub b: usize,
    pub d: usize,
    pub rounds: usize,
}

impl CipherSummary {
    pub fn of(c: &TbCipher) -> Self {
        Self {
            m: c.layout().m(),
            b: c.layout().b(),
            d: c.d(),
            rounds: c.rounds().len(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Completeness {
    /// Every nontrivial subspace was tried.
    SearchComplete,
    /// Only wall chains were tried; other chains may exist.
    WallsOnly,
}

/// Chains checked against the full keyed cipher for random key tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyedCheck {
    pub samples: usize,
    pub seed: u64,
    /// Leading chains included in the check.
    pub chains_checked: usize,
    pub holds: bool,
}

/// The keyed check covers at most this many chains.
pub const MAX_KEYED_CHAINS: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainListing {
    pub mode: ChainMode,
    pub completeness: Completeness,
    pub chains: Vec<PartitionChain>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AntiInvarianceQuery {
    pub r: usize,
    pub holds: bool,
    pub witness: Option<(Subspace, Subspace)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SBoxSection {
    pub table: Vec<String>,
    pub report: SBoxReport,
    /// Smallest `r` for which every nonzero derivative image exceeds
    /// `2^(m-r)`.
    pub relaxed_exponent: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query: Option<AntiInvarianceQuery>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySection {
    pub length: usize,
    pub j_range: JRange,
    pub holds: bool,
    /// Number of proper walls first broken at each prefix length `j`.
    pub broken_at: BTreeMap<usize, usize>,
    pub survivors: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_wall: Option<Vec<(Vec<usize>, Option<usize>)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixingSection {
    pub m: usize,
    pub b: usize,
    pub rows: Vec<String>,
    pub proper: bool,
    pub proper_witness: Option<Vec<usize>>,
    pub strongly_proper: bool,
    pub strong_witness: Option<(Vec<usize>, Vec<usize>)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySection>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool: String,
    pub command: String,
    pub definitions: Definitions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cipher: Option<CipherSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chains: Option<ChainListing>,
    /// Chains re-checked against the keyed cipher.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keyed_check: Option<KeyedCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sbox: Option<SBoxSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixing: Option<MixingSection>,
}

fn hex_rows(m: &BitMatrix) -> Vec<String> {
    let w = m.col_count().div_ceil(4);
    m.rows().iter().map(|r| format!("0x{r:0w$x}")).collect()
}

impl ReportDocument {
    fn base(command: &str, definitions: Definitions) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: format!("tbaudit {}", env!("CARGO_PKG_VERSION")),
            command: command.into(),
            definitions,
            cipher: None,
            audit: None,
            chains: None,
            keyed_check: None,
            sbox: None,
            mixing: None,
        }
    }

    pub fn for_audit(c: &TbCipher, verdict: AuditVerdict, opts: &AuditOptions) -> Self {
        let mut doc = Self::base("audit", Definitions::new(opts.j_range, opts.route));
        doc.cipher = Some(CipherSummary::of(c));
        doc.audit = Some(verdict);
        doc
    }

    pub fn for_chains(c: &TbCipher, listing: ChainListing) -> Self {
        let mut doc = Self::base("find-trapdoor", Definitions::new(JRange::Strict, UniformityRoute::Delta));
        doc.cipher = Some(CipherSummary::of(c));
        doc.chains = Some(listing);
        doc
    }

    pub fn for_sbox(f: &SBox, report: SBoxReport, query: Option<AntiInvarianceQuery>, route: UniformityRoute) -> Self {
        let mut doc = Self::base("analyze-sbox", Definitions::new(JRange::Strict, route));
        let w = f.m().div_ceil(4);
        doc.sbox = Some(SBoxSection {
            table: f.table().iter().map(|v| format!("{v:0w$x}")).collect(),
            report,
            relaxed_exponent: f.relaxed_uniformity_exponent(),
            query,
        });
        doc
    }

    pub fn for_mixing(layer: &MixingLayer, family_len: Option<usize>, j_range: JRange) -> Self {
        let mut doc = Self::base("analyze-mixing", Definitions::new(j_range, UniformityRoute::Delta));
        doc.mixing = Some(mixing_section(layer, family_len, j_range));
        doc
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("report: {e}")))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "report schema version {} is not supported (expected {SCHEMA_VERSION})",
                doc.schema_version
            )));
        }
        Ok(doc)
    }
}

pub fn mixing_section(layer: &MixingLayer, family_len: Option<usize>, j_range: JRange) -> MixingSection {
    let proper = layer.is_proper();
    let strong = layer.is_strongly_proper();
    let family = family_len.map(|len| {
        let fam = LayerFamily::repeated(layer.clone(), len).expect("len >= 1 checked by caller");
        let report = fam.is_strongly_proper(j_range);
        let mut broken_at = BTreeMap::new();
        for (_, j) in &report.per_wall {
            if let Some(j) = j {
                *broken_at.entry(*j).or_insert(0) += 1;
            }
        }
        FamilySection {
            length: len,
            j_range,
            holds: report.holds,
            broken_at,
            survivors: report.survivors().map(Wall::numbers).collect(),
            per_wall: (report.per_wall.len() <= MAX_LISTED_WALLS)
                .then(|| report.per_wall.iter().map(|(w, j)| (w.numbers(), *j)).collect()),
        }
    });
    MixingSection {
        m: layer.layout().m(),
        b: layer.layout().b(),
        rows: hex_rows(layer.matrix()),
        proper: proper.holds,
        proper_witness: proper.witness.map(|w| w.numbers()),
        strongly_proper: strong.holds,
        strong_witness: strong.witness.map(|(a, b)| (a.numbers(), b.numbers())),
        family,
    }
}

/// One named re-check and its outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verification {
    pub checks: Vec<Check>,
}

impl Verification {
    fn push(&mut self, name: impl Into<String>, passed: bool) {
        self.checks.push(Check {
            name: name.into(),
            passed,
        });
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }
}

/// Chains carried by the report: the audit certificate, then listed chains.
pub fn certified_chains(doc: &ReportDocument) -> Vec<PartitionChain> {
    let mut out = Vec::new();
    if let Some(AuditVerdict {
        certificate: crate::cipher::Certificate::Chain { chain, .. },
        ..
    }) = &doc.audit
    {
        out.push(chain.clone());
    }
    if let Some(l) = &doc.chains {
        out.extend(l.chains.iter().cloned());
    }
    out
}

/// The first [`MAX_KEYED_CHAINS`] chains map `L(U_1)` to `L(U_{ℓ+1})`
/// under `samples` key tuples drawn from a ChaCha8 stream seeded with
/// `seed`.
pub fn keyed_check(c: &TbCipher, chains: &[PartitionChain], samples: usize, seed: u64) -> Result<KeyedCheck> {
    use rand::SeedableRng;
    let chains = &chains[..chains.len().min(MAX_KEYED_CHAINS)];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut holds = true;
    for _ in 0..samples {
        let table = c.encryption_table(&crate::cipher::RoundKeyTuple::random(c, &mut rng))?;
        if !chains.iter().all(|ch| ch.holds_for_table(&table)) {
            holds = false;
            break;
        }
    }
    Ok(KeyedCheck {
        samples,
        seed,
        chains_checked: chains.len(),
        holds,
    })
}

fn wall_from_numbers(layout: BrickLayout, numbers: &[usize]) -> Option<Wall> {
    let idx: Option<Vec<usize>> = numbers.iter().map(|n| n.checked_sub(1)).collect();
    Wall::from_indices(layout, &idx?).ok()
}

/// Re-checks every witness in `doc`. Cipher sections need the cipher the
/// report was produced from; S-box and mixing sections are self-contained.
pub fn verify(doc: &ReportDocument, cipher: Option<&TbCipher>) -> Result<Verification> {
    let mut v = Verification::default();
    if doc.audit.is_some() || doc.chains.is_some() {
        let c = cipher.ok_or_else(|| Error::InvalidArgument("this report needs the cipher spec it was produced from".into()))?;
        let shape_ok = doc.cipher.as_ref() == Some(&CipherSummary::of(c));
        v.push("cipher shape matches the spec", shape_ok);
        if !shape_ok {
            return Ok(v);
        }
        if let Some(a) = &doc.audit {
            v.push(format!("{} certificate re-verifies", a.status.as_str()), a.reverify(c)?);
        }
        if let Some(listing) = &doc.chains {
            for (i, ch) in listing.chains.iter().enumerate() {
                v.push(format!("chain {} re-verifies", i + 1), ch.verify(c)?);
            }
            let expected = match listing.mode {
                ChainMode::Exhaustive => Completeness::SearchComplete,
                ChainMode::Walls => Completeness::WallsOnly,
            };
            v.push("completeness marker matches the mode", listing.completeness == expected);
        }
        if let Some(k) = &doc.keyed_check {
            v.push(
                format!("keyed check over {} random key tuples reproduces", k.samples),
                &keyed_check(c, &certified_chains(doc), k.samples, k.seed)? == k,
            );
        }
    }
    if let Some(s) = &doc.sbox {
        let table: std::result::Result<Vec<u16>, _> = s
            .table
            .iter()
            .map(|t| parse_word(t).map(|x| x as u16))
            .collect();
        let f = SBox::with_width(s.report.m, table.map_err(Error::InvalidArgument)?)?;
        let fresh = SBoxReport::compute(&f, Default::default())?;
        v.push("S-box measurements recompute", fresh == s.report);
        if let Some((u, w)) = &s.report.witness {
            v.push("anti-invariance witness maps onto a subspace", f.subspace_image(u).as_ref() == Some(w));
        }
        if let Some(q) = &s.query {
            let fresh = f.is_strongly_anti_invariant(q.r)?;
            v.push(format!("strong {}-anti-invariance recomputes", q.r), fresh.holds == q.holds);
            if let Some((u, w)) = &q.witness {
                v.push("query witness maps onto a subspace", f.subspace_image(u).as_ref() == Some(w));
            }
        }
    }
    if let Some(mx) = &doc.mixing {
        let layout = BrickLayout::new(mx.m, mx.b)?;
        let rows: std::result::Result<Vec<u128>, _> = mx.rows.iter().map(|r| parse_word(r)).collect();
        let matrix = BitMatrix::from_rows(rows.map_err(Error::InvalidArgument)?, layout.d())?;
        let layer = MixingLayer::new(matrix, layout)?;
        if let Some(w) = &mx.proper_witness {
            let wall = wall_from_numbers(layout, w);
            v.push("invariant wall witness", wall.is_some_and(|w| layer.map_wall(&w) == Some(w)));
        }
        if let Some((a, b)) = &mx.strong_witness {
            let (a, b) = (wall_from_numbers(layout, a), wall_from_numbers(layout, b));
            v.push("wall-to-wall witness", a.is_some() && b.is_some() && layer.map_wall(&a.unwrap()) == b);
        }
        let fresh = mixing_section(&layer, mx.family.as_ref().map(|f| f.length), mx.family.as_ref().map_or(JRange::Strict, |f| f.j_range));
        v.push("layer analysis recomputes", &fresh == mx);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cipher::{audit, find_trapdoor_chains, ChainSearch};

    #[test]
    fn audit_report_round_trips_and_verifies() {
        let c = TbCipher::rotation(3, 3, 3).unwrap();
        let opts = AuditOptions::default();
        let doc = ReportDocument::for_audit(&c, audit(&c, &opts).unwrap(), &opts);
        let back = ReportDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        assert!(verify(&back, Some(&c)).unwrap().passed());
        // same report against a different cipher fails
        let other = TbCipher::rotation(3, 3, 4).unwrap();
        assert!(!verify(&back, Some(&other)).unwrap().passed());
        assert!(verify(&back, None).is_err());
    }

    #[test]
    fn tampered_chain_fails() {
        let c = TbCipher::rotation(3, 3, 2).unwrap();
        let chains = find_trapdoor_chains(&c, ChainSearch::walls()).unwrap();
        let mut doc = ReportDocument::for_chains(
            &c,
            ChainListing {
                mode: ChainMode::Walls,
                completeness: Completeness::WallsOnly,
                chains,
            },
        );
        assert!(verify(&doc, Some(&c)).unwrap().passed());
        let listing = doc.chains.as_mut().unwrap();
        listing.chains[0].spaces.swap(1, 2);
        assert!(!verify(&doc, Some(&c)).unwrap().passed());
    }

    #[test]
    fn sbox_and_mixing_reports_are_self_contained() {
        let f = SBox::inverse_gf2m(4).unwrap();
        let doc = ReportDocument::for_sbox(&f, f.report().unwrap(), None, UniformityRoute::Delta);
        let back = ReportDocument::from_json(&doc.to_json()).unwrap();
        assert!(verify(&back, None).unwrap().passed());

        let layer = MixingLayer::rotation(BrickLayout::new(2, 4).unwrap());
        let doc = ReportDocument::for_mixing(&layer, Some(3), JRange::Strict);
        let mut back = ReportDocument::from_json(&doc.to_json()).unwrap();
        assert!(verify(&back, None).unwrap().passed());
        back.mixing.as_mut().unwrap().strong_witness = Some((vec![1], vec![1]));
        assert!(!verify(&back, None).unwrap().passed());
    }

    #[test]
    fn rejects_unknown_schema() {
        let f = SBox::present();
        let mut doc = ReportDocument::for_sbox(&f, f.report().unwrap(), None, UniformityRoute::Delta);
        doc.schema_version = 99;
        assert!(ReportDocument::from_json(&doc.to_json()).is_err());
    }
}
