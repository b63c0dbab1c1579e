use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tbaudit::cipher::{
    audit, find_trapdoor_chains, partition_image, AuditOptions, AuditVerdict, Certificate, ChainMode,
    ChainSearch, PartitionChain, RoundKeyTuple, Status, TbCipher, UniformityRoute, DEFAULT_CHAIN_CAP,
};
use tbaudit::gf2::{BrickLayout, EnumerationCap, Subspace, Wall};
use tbaudit::group::{
    invariant_linear_partition_search, is_primitive, linear_partition_holds_for_random_keys,
    round_generators, sample_ind_generators, SOUNDNESS_NOTE,
};
use tbaudit::mixing::{JRange, LayerFamily, MixingLayer};
use tbaudit::report::{
    certified_chains, keyed_check, verify, AntiInvarianceQuery, ChainListing, Completeness, ReportDocument,
};
use tbaudit::sbox::{AntiInvarianceBudget, SBox};
use tbaudit::specfile::{parse_cipher_spec, parse_layer_file, parse_table_file, SpecError, SpecErrorKind};
use tbaudit::Error;

const EXIT_OK: u8 = 0;
const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_VULNERABLE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_SINGULAR: u8 = 65;
const EXIT_CAP: u8 = 66;

/// Audits translation-based block ciphers for partition-based trapdoors.
///
/// Exit codes: 0 success or secure, 1 report verification failed,
/// 2 vulnerable, 3 inconclusive, 64 bad input, 65 singular matrix,
/// 66 search cap exceeded.
#[derive(Parser)]
#[command(name = "tbaudit", version)]
struct Cli {
    /// Worker threads for the parallel scans (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Print the machine-readable report instead of text.
    #[arg(long)]
    json: bool,
    /// Also write the machine-readable report to this file.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SBoxBuiltin {
    InverseGf2m,
    Present,
    Identity,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayerBuiltin {
    Rotation,
    AesSrMc,
    Identity,
    Butterfly,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Walls,
    Exhaustive,
}

#[derive(Clone, Copy, ValueEnum)]
enum Demo {
    WeakCipher,
    AesWall,
    GroupCheck,
}

#[derive(Subcommand)]
enum Command {
    /// Differential, linear and anti-invariance measurements of one S-box.
    AnalyzeSbox {
        /// Builtin S-box.
        #[arg(long, conflicts_with = "table", required_unless_present = "table")]
        builtin: Option<SBoxBuiltin>,
        /// Width for `inverse-gf2m` and `identity`.
        #[arg(long, default_value_t = 4)]
        m: usize,
        /// Table file: hex values separated by whitespace or commas.
        #[arg(long, value_name = "FILE")]
        table: Option<PathBuf>,
        /// Also test strong r-anti-invariance for this r.
        #[arg(long)]
        r: Option<usize>,
        /// Report the relaxed derivative-image exponent.
        #[arg(long)]
        condition1prime: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Proper / strongly proper checks of a mixing layer.
    AnalyzeMixing {
        #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
        builtin: Option<LayerBuiltin>,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 4)]
        b: usize,
        /// Layer file: {"layout": {"m", "b"}, "layer": builtin or hex rows}.
        #[arg(long, value_name = "FILE")]
        matrix: Option<PathBuf>,
        /// Check the family of this many copies of the layer.
        #[arg(long, value_name = "LEN")]
        family: Option<usize>,
        /// Let the last prefix (j = ℓ) break walls too.
        #[arg(long)]
        relaxed_j: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Secure / vulnerable / inconclusive verdict for a cipher spec.
    Audit {
        spec: PathBuf,
        /// Fall back to the exhaustive chain search when d is at most this.
        #[arg(long, value_name = "D")]
        exhaustive_cap: Option<usize>,
        /// Accept the derivative-image condition as an alternative to δ.
        #[arg(long, alias = "use-condition1prime")]
        condition1prime: bool,
        /// Let the full layer product (j = ℓ) break walls in the family check
        #[arg(long)]
        relaxed_j: bool,
        /// Random key tuples used to re-check a chain on the keyed cipher.
        #[arg(long, default_value_t = 100)]
        key_samples: usize,
        /// Seed for the key sampler
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// List chains of linear partitions through the keyless rounds.
    FindTrapdoor {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Walls)]
        mode: Mode,
        #[arg(long, value_name = "D", default_value_t = DEFAULT_CHAIN_CAP)]
        exhaustive_cap: usize,
        #[arg(long, default_value_t = 100)]
        key_samples: usize,
        /// Seed for the key sampler
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Narrated demonstrations.
    Demo {
        #[arg(value_enum)]
        name: Demo,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        b: usize,
        #[arg(long, default_value_t = 3)]
        rounds: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Seed for the key sampler
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-check every witness in a report.
    Verify {
        report: PathBuf,
        /// Cipher spec the report was produced from.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
}

/// A failure with its exit code and message.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Singular { .. } => EXIT_SINGULAR,
            Error::CapExceeded { .. } => EXIT_CAP,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn spec_failure(path: &Path, e: SpecError) -> Failure {
    Failure {
        code: if e.kind == SpecErrorKind::Singular {
            EXIT_SINGULAR
        } else {
            EXIT_USAGE
        },
        message: format!("{}: {e}", path.display()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("{}: {e}", path.display()),
    })
}

/// Any problem in a cipher spec is a usage error (64), singular layers
/// included.
fn load_cipher(path: &Path) -> Result<TbCipher, Failure> {
    parse_cipher_spec(&read(path)?).map(|s| s.cipher).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("{}: {e}", path.display()),
    })
}

fn emit(output: &Output, doc: &ReportDocument, text: &str) -> Result<(), Failure> {
    if let Some(path) = &output.out {
        std::fs::write(path, doc.to_json()).map_err(|e| Failure {
            code: EXIT_USAGE,
            message: format!("{}: {e}", path.display()),
        })?;
    }
    if output.json {
        print!("{}", doc.to_json());
    } else {
        print!("{text}");
    }
    Ok(())
}

fn span(s: &Subspace) -> String {
    let w = s.ambient().div_ceil(4);
    let parts: Vec<String> = s.basis_words().iter().map(|b| format!("0x{b:0w$x}")).collect();
    format!("span{{{}}}", parts.join(", "))
}

fn walls(list: &[usize]) -> String {
    let parts: Vec<String> = list.iter().map(|n| n.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

fn describe(layout: BrickLayout, s: &Subspace) -> String {
    match layout.as_wall(s) {
        Some(w) => format!("wall {w}"),
        None => span(s),
    }
}

fn chain_text(layout: BrickLayout, ch: &PartitionChain) -> String {
    let parts: Vec<String> = ch.spaces.iter().map(|s| describe(layout, s)).collect();
    parts.join(" -> ")
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn analyze_sbox(
    builtin: Option<SBoxBuiltin>,
    m: usize,
    table: Option<PathBuf>,
    r: Option<usize>,
    condition1prime: bool,
    output: Output,
) -> Result<u8, Failure> {
    let (f, name) = match (builtin, table) {
        (Some(SBoxBuiltin::InverseGf2m), _) => (SBox::inverse_gf2m(m)?, format!("inverse_gf2m (m = {m})")),
        (Some(SBoxBuiltin::Present), _) => (SBox::present(), "present".to_string()),
        (Some(SBoxBuiltin::Identity), _) => (SBox::identity(m)?, format!("identity (m = {m})")),
        (None, Some(path)) => (
            parse_table_file(&read(&path)?).map_err(|e| spec_failure(&path, e))?,
            path.display().to_string(),
        ),
        (None, None) => unreachable!("clap requires one source"),
    };
    let report = f.report()?;
    let query = match r {
        Some(r) => {
            let c = f.is_strongly_anti_invariant_with(r, AntiInvarianceBudget::default())?;
            Some(AntiInvarianceQuery {
                r,
                holds: c.holds,
                witness: c.witness.map(|w| (w.domain, w.image)),
            })
        }
        None => None,
    };
    let route = if condition1prime {
        UniformityRoute::Condition1Prime
    } else {
        UniformityRoute::Delta
    };
    let doc = ReportDocument::for_sbox(&f, report.clone(), query.clone(), route);

    let mut t = String::new();
    let _ = writeln!(t, "S-box: {name}");
    if report.shift != 0 {
        let _ = writeln!(t, "f(0) = {:#x}; measurements use the normalized table", report.shift);
    }
    let _ = writeln!(t, "differential uniformity: {} (r = {})", report.delta, report.uniformity_exponent());
    let _ = writeln!(
        t,
        "min derivative image: {} (direction {:#x}), bound 2^m/δ = {}",
        report.min_derivative_image,
        report.min_derivative_direction,
        (1usize << report.m) as f64 / report.delta as f64
    );
    let _ = writeln!(t, "nonlinearity: {}", report.nonlinearity);
    match report.linear_component_mask {
        Some(c) => {
            let _ = writeln!(t, "linear components: present (component mask {c:#x})");
        }
        None => {
            let _ = writeln!(t, "linear components: none");
        }
    }
    let _ = writeln!(
        t,
        "anti-invariance order: {}{}",
        report.anti_invariance_order,
        if report.anti_invariance_exact { "" } else { " (lower bound, budget exhausted)" }
    );
    if let Some((u, w)) = &report.witness {
        let _ = writeln!(t, "  witness: f({}) = {}", span(u), span(w));
    }
    if let Some(q) = &query {
        let _ = writeln!(t, "strongly {}-anti-invariant: {}", q.r, yes_no(q.holds));
        if let Some((u, w)) = &q.witness {
            let _ = writeln!(t, "  witness: f({}) = {}", span(u), span(w));
        }
    }
    if condition1prime {
        match f.relaxed_uniformity_exponent() {
            Some(r) => {
                let _ = writeln!(t, "condition (1'): every derivative image exceeds 2^(m-r) for r = {r}");
            }
            None => {
                let _ = writeln!(t, "condition (1'): not satisfied for any r <= m");
            }
        }
    }
    emit(&output, &doc, &t)?;
    Ok(EXIT_OK)
}

fn analyze_mixing(
    builtin: Option<LayerBuiltin>,
    m: usize,
    b: usize,
    matrix: Option<PathBuf>,
    family: Option<usize>,
    relaxed_j: bool,
    output: Output,
) -> Result<u8, Failure> {
    let layer = match (builtin, matrix) {
        (Some(LayerBuiltin::Rotation), _) => MixingLayer::rotation(BrickLayout::new(m, b)?),
        (Some(LayerBuiltin::Identity), _) => MixingLayer::identity(BrickLayout::new(m, b)?),
        (Some(LayerBuiltin::AesSrMc), _) => MixingLayer::aes_sr_mc(),
        (Some(LayerBuiltin::Butterfly), _) => MixingLayer::two_brick_butterfly(m)?,
        (None, Some(path)) => parse_layer_file(&read(&path)?).map_err(|e| spec_failure(&path, e))?,
        (None, None) => unreachable!("clap requires one source"),
    };
    if family == Some(0) {
        return Err(Failure {
            code: EXIT_USAGE,
            message: "--family needs at least one layer".into(),
        });
    }
    let j_range = if relaxed_j { JRange::Relaxed } else { JRange::Strict };
    let doc = ReportDocument::for_mixing(&layer, family, j_range);
    let mx = doc.mixing.as_ref().expect("mixing section");

    let mut t = String::new();
    let _ = writeln!(t, "layer: m = {}, b = {}, d = {}", mx.m, mx.b, layer.d());
    let _ = writeln!(t, "proper: {}", yes_no(mx.proper));
    if let Some(w) = &mx.proper_witness {
        let _ = writeln!(t, "  invariant wall: {}", walls(w));
    }
    let _ = writeln!(t, "strongly proper: {}", yes_no(mx.strongly_proper));
    if let Some((a, b)) = &mx.strong_witness {
        let _ = writeln!(t, "  wall {} is mapped onto wall {}", walls(a), walls(b));
    }
    if let Some(f) = &mx.family {
        let range = match f.j_range {
            JRange::Strict => "1 <= j <= ℓ-1",
            JRange::Relaxed => "1 <= j <= ℓ",
        };
        let _ = writeln!(t, "family of {} copies ({range}): strongly proper: {}", f.length, yes_no(f.holds));
        for (j, n) in &f.broken_at {
            let _ = writeln!(t, "  {n} proper walls first leave the walls at j = {j}");
        }
        for w in f.survivors.iter().take(10) {
            let _ = writeln!(t, "  wall {} stays a wall", walls(w));
        }
        if f.survivors.len() > 10 {
            let _ = writeln!(t, "  ... {} surviving walls in total", f.survivors.len());
        }
    }
    emit(&output, &doc, &t)?;
    Ok(EXIT_OK)
}

fn verdict_text(c: &TbCipher, v: &AuditVerdict) -> String {
    let mut t = String::new();
    let l = c.layout();
    let _ = writeln!(t, "cipher: m = {}, b = {}, ℓ = {}", l.m(), l.b(), c.rounds().len());
    for r in &v.rounds {
        let bad: Vec<String> = r.bricks.iter().filter(|b| !b.passes).map(|b| b.brick.to_string()).collect();
        let _ = writeln!(
            t,
            "round {}: layer proper {}, strongly proper {}; bricks {}",
            r.round,
            yes_no(r.layer_proper),
            yes_no(r.layer_strongly_proper),
            if bad.is_empty() {
                "pass".to_string()
            } else {
                format!("fail ({})", bad.join(","))
            }
        );
    }
    let _ = writeln!(t, "layer family strongly proper: {}", yes_no(v.family_strongly_proper));
    let _ = writeln!(t, "verdict: {}", v.status.as_str().to_uppercase());
    match &v.certificate {
        Certificate::StronglyProperRound { round } => {
            let _ = writeln!(
                t,
                "  layer {round} is strongly proper and the bricks of rounds {round} and {} meet the hypotheses",
                round + 1
            );
        }
        Certificate::StronglyProperFamily => {
            let _ = writeln!(t, "  the layer family is strongly proper and every round's bricks meet the hypotheses");
        }
        Certificate::Chain { mode, chain } => {
            let m = match mode {
                ChainMode::Walls => "walls",
                ChainMode::Exhaustive => "exhaustive",
            };
            let _ = writeln!(t, "  chain ({m} search): {}", chain_text(l, chain));
        }
        Certificate::Failures { failures } => {
            for f in failures {
                let _ = writeln!(t, "  - {f}");
            }
        }
    }
    for n in &v.notes {
        let _ = writeln!(t, "note: {n}");
    }
    t
}

#[allow(clippy::too_many_arguments)]
fn run_audit(
    spec: PathBuf,
    exhaustive_cap: Option<usize>,
    condition1prime: bool,
    relaxed_j: bool,
    key_samples: usize,
    seed: u64,
    output: Output,
) -> Result<u8, Failure> {
    let c = load_cipher(&spec)?;
    let opts = AuditOptions {
        route: if condition1prime {
            UniformityRoute::Condition1Prime
        } else {
            UniformityRoute::Delta
        },
        j_range: if relaxed_j { JRange::Relaxed } else { JRange::Strict },
        exhaustive_cap,
        budget: AntiInvarianceBudget::default(),
    };
    let verdict = audit(&c, &opts)?;
    let status = verdict.status;
    let mut text = verdict_text(&c, &verdict);
    let mut doc = ReportDocument::for_audit(&c, verdict, &opts);
    let chains = certified_chains(&doc);
    if !chains.is_empty() && key_samples > 0 && c.d() <= tbaudit::cipher::MAX_POINT_DIM {
        let k = keyed_check(&c, &chains, key_samples, seed)?;
        let _ = writeln!(
            text,
            "keyed check: chain {} under {} random key tuples (seed {})",
            if k.holds { "holds" } else { "FAILS" },
            k.samples,
            k.seed
        );
        doc.keyed_check = Some(k);
    }
    emit(&output, &doc, &text)?;
    Ok(match status {
        Status::Secure => EXIT_OK,
        Status::Vulnerable => EXIT_VULNERABLE,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
    })
}

fn run_find_trapdoor(
    spec: PathBuf,
    mode: Mode,
    cap: usize,
    key_samples: usize,
    seed: u64,
    output: Output,
) -> Result<u8, Failure> {
    let c = load_cipher(&spec)?;
    let search = match mode {
        Mode::Walls => ChainSearch::walls(),
        Mode::Exhaustive => ChainSearch {
            mode: ChainMode::Exhaustive,
            cap: EnumerationCap::new(cap),
        },
    };
    let chains = find_trapdoor_chains(&c, search)?;
    let listing = ChainListing {
        mode: search.mode,
        completeness: match mode {
            Mode::Walls => Completeness::WallsOnly,
            Mode::Exhaustive => Completeness::SearchComplete,
        },
        chains,
    };
    let mut t = String::new();
    let l = c.layout();
    for (i, ch) in listing.chains.iter().enumerate() {
        let _ = writeln!(t, "chain {}:", i + 1);
        for (j, s) in ch.spaces.iter().enumerate() {
            let _ = writeln!(t, "  U{} = {} ({})", j + 1, span(s), describe(l, s));
        }
    }
    let marker = match listing.completeness {
        Completeness::SearchComplete => "search-complete",
        Completeness::WallsOnly => "walls-only",
    };
    let _ = writeln!(t, "{} chain(s) found [{marker}]", listing.chains.len());
    let mut doc = ReportDocument::for_chains(&c, listing);
    let chains = certified_chains(&doc);
    if !chains.is_empty() && key_samples > 0 && c.d() <= tbaudit::cipher::MAX_POINT_DIM {
        let k = keyed_check(&c, &chains, key_samples, seed)?;
        let _ = writeln!(
            t,
            "keyed check: {} checked chain(s) {} under {} random key tuples (seed {})",
            k.chains_checked,
            if k.holds { "hold" } else { "do NOT all hold" },
            k.samples,
            k.seed
        );
        doc.keyed_check = Some(k);
    }
    emit(&output, &doc, &t)?;
    Ok(EXIT_OK)
}

fn brick(layout: BrickLayout, i: usize) -> Subspace {
    Wall::from_indices(layout, &[i]).expect("brick index in range").subspace()
}

fn demo_weak_cipher(m: usize, b: usize, rounds: usize, samples: usize, seed: u64) -> Result<u8, Failure> {
    let c = TbCipher::rotation(m, b, rounds)?;
    let l = c.layout();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    println!("rotation cipher: m = {m}, b = {b}, ℓ = {rounds}; bricks invert in F_2^{m}, layers rotate bricks");
    let keys: Vec<RoundKeyTuple> = (0..samples).map(|_| RoundKeyTuple::random(&c, &mut rng)).collect();
    let tables: Vec<Vec<u32>> = keys.iter().map(|k| c.encryption_table(k)).collect::<Result<_, _>>()?;
    let mut invariant = Vec::new();
    for i in 0..b {
        let target = (i + rounds) % b;
        let (u, w) = (brick(l, i), brick(l, target));
        let hits = tables
            .iter()
            .filter(|t| partition_image(t, &u).ok().flatten().as_ref() == Some(&w))
            .count();
        println!("L(V_{}) -> L(V_{}): {hits}/{samples} random keys", i + 1, target + 1);
        if target == i && hits == samples {
            invariant.push(format!("V_{}", i + 1));
        }
    }
    if invariant.is_empty() {
        println!(
            "partition pair trapdoor: L(V_i) -> L(V_{{i+{}}}); no invariant partition among single bricks",
            rounds % b
        );
    } else {
        println!("invariant partitions found: {}", invariant.join(", "));
    }
    if c.d() <= DEFAULT_CHAIN_CAP {
        let g = sample_ind_generators(&c)?;
        let found = invariant_linear_partition_search(&g, EnumerationCap::new(DEFAULT_CHAIN_CAP))?;
        let names: Vec<String> = found.iter().map(|u| describe(l, u)).collect();
        println!(
            "linear partitions invariant under {} sampled encryptions: {}",
            g.len(),
            if names.is_empty() { "none".to_string() } else { names.join(", ") }
        );
    }
    let v = audit(&c, &AuditOptions::default())?;
    println!("audit: {}", v.status.as_str());
    if let Certificate::Chain { chain, .. } = &v.certificate {
        println!("  chain: {}", chain_text(l, chain));
    }
    Ok(EXIT_OK)
}

fn demo_aes_wall() -> Result<u8, Failure> {
    let layout = BrickLayout::new(8, 16)?;
    let sr = MixingLayer::aes_shift_rows();
    let mc = MixingLayer::aes_mix_columns();
    let start = Wall::from_indices(layout, &[0, 5, 10, 15])?;
    println!("AES state bytes numbered row by row, 1..16");
    println!("start:          wall {start}");
    let after_sr = sr.image(&start.subspace());
    println!("ShiftRows:      {}", describe(layout, &after_sr));
    let after_mc = mc.image(&after_sr);
    println!("MixColumns:     {}", describe(layout, &after_mc));
    let layer = MixingLayer::aes_sr_mc();
    let next = layer.image(&after_mc);
    match layout.as_wall(&next) {
        Some(w) => println!("second SR·MC:   wall {w}"),
        None => println!("second SR·MC:   not a wall (dimension {})", next.dim()),
    }
    let s = layer.is_strongly_proper();
    if let Some((a, b)) = s.witness {
        println!("SR·MC is not strongly proper: wall {a} -> wall {b}");
    }
    println!("SR·MC proper: {}", yes_no(layer.is_proper().holds));
    let fam = LayerFamily::repeated(layer, 10)?.is_strongly_proper(JRange::Strict);
    println!(
        "family of 10 SR·MC layers strongly proper: {} ({} proper walls checked)",
        yes_no(fam.holds),
        fam.per_wall.len()
    );
    Ok(EXIT_OK)
}

fn demo_group_check(m: usize, b: usize, rounds: usize, samples: usize, seed: u64) -> Result<u8, Failure> {
    let c = TbCipher::rotation(m, b, rounds)?;
    let l = c.layout();
    println!("rotation cipher: m = {m}, b = {b}, ℓ = {rounds}, {} points", 1usize << c.d());
    let inf = round_generators(&c)?;
    let p = is_primitive(&inf)?;
    println!("round maps over basis keys ({} generators): primitive: {}", inf.len(), yes_no(p.primitive));
    let ind = sample_ind_generators(&c)?;
    let p = is_primitive(&ind)?;
    println!("encryptions over sampled keys ({} generators): primitive: {}", ind.len(), yes_no(p.primitive));
    if let Some((v, bs)) = p.witness {
        println!("  block system from seed {v:#x}: {} blocks of size {}", bs.count(), bs.block_size());
        if let Some(u) = bs.as_linear(c.d()) {
            println!("  blocks are the cosets of {}", describe(l, &u));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ok = linear_partition_holds_for_random_keys(&c, &u, samples, &mut rng)?;
            println!("  invariant under {samples} further random encryptions: {}", yes_no(ok));
        }
    }
    println!("note: {SOUNDNESS_NOTE}");
    Ok(EXIT_OK)
}

fn run_verify(report: PathBuf, spec: Option<PathBuf>) -> Result<u8, Failure> {
    let doc = ReportDocument::from_json(&read(&report)?)?;
    let cipher = match &spec {
        Some(p) => Some(load_cipher(p)?),
        None => None,
    };
    let v = verify(&doc, cipher.as_ref())?;
    for c in &v.checks {
        println!("{} {}", if c.passed { "ok  " } else { "FAIL" }, c.name);
    }
    if v.passed() {
        println!("report verified");
        Ok(EXIT_OK)
    } else {
        println!("report verification failed");
        Ok(EXIT_VERIFY_FAILED)
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure {
                code: EXIT_USAGE,
                message: format!("--threads: {e}"),
            })?;
    }
    match cli.command {
        Command::AnalyzeSbox {
            builtin,
            m,
            table,
            r,
            condition1prime,
            output,
        } => analyze_sbox(builtin, m, table, r, condition1prime, output),
        Command::AnalyzeMixing {
            builtin,
            m,
            b,
            matrix,
            family,
            relaxed_j,
            output,
        } => analyze_mixing(builtin, m, b, matrix, family, relaxed_j, output),
        Command::Audit {
            spec,
            exhaustive_cap,
            condition1prime,
            relaxed_j,
            key_samples,
            seed,
            output,
        } => run_audit(spec, exhaustive_cap, condition1prime, relaxed_j, key_samples, seed, output),
        Command::FindTrapdoor {
            spec,
            mode,
            exhaustive_cap,
            key_samples,
            seed,
            output,
        } => run_find_trapdoor(spec, mode, exhaustive_cap, key_samples, seed, output),
        Command::Demo {
            name,
            m,
            b,
            rounds,
            samples,
            seed,
        } => match name {
            Demo::WeakCipher => demo_weak_cipher(m, b, rounds, samples, seed),
            Demo::AesWall => demo_aes_wall(),
            Demo::GroupCheck => demo_group_check(m, b, rounds, samples, seed),
        },
        Command::Verify { report, spec } => run_verify(report, spec),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("tbaudit: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
