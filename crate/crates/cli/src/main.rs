use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use cupfox::cupcoh::{
    check_cup_relation, coinvariants_model, delta_invariant, pd2_orbit_reps, spanning_cocycles,
};
use cupfox::diagonal::{
    build_dictionary, builtin_candidate, format_tensor, search_j2, search_j2_linear,
    tensor_from_json, tensor_to_json, verify_j2, SearchStatus, DEFAULT_DICTIONARY_CAP,
};
use cupfox::foxres::{fox_derivative, reduce_into, Resolved};
use cupfox::groupring::OrientationChar;
use cupfox::modules::{
    cohomology_finite_coeffs, factors_csv, gamma_w_coinvariants_check, lemma16_truncation,
    torsion_free_check, Coefficients, GammaStatus,
};
use cupfox::presentation::{
    builtin_family, knuth_bendix, parse_presentation, CompletionLimits, Family, GroupElement,
    Letter, Word, WordOrder,
};
use cupfox::Error;

const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Parser)]
#[command(name = "cupfox", version, about = "Fox calculus, diagonal approximations and cup products for two-dimensional groups")]
struct Cli {
    /// Emit JSON (with `schema: 1`) on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Print timings on stderr.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyName {
    Free,
    #[value(name = "freeByZ", alias = "free-by-z")]
    FreeByZ,
    #[value(name = "torusKnot", alias = "torus-knot", alias = "torus")]
    TorusKnot,
    Surface,
    Bs,
}

#[derive(Args, Clone, Debug)]
struct GroupArgs {
    /// Built-in family.
    #[arg(long, conflicts_with = "file")]
    family: Option<FamilyName>,
    /// Presentation file.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<i64>,
    #[arg(long)]
    n: Option<u32>,
    /// Rank of a free group, or `|X|` for freeByZ.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    genus: Option<usize>,
    /// Orientation character, e.g. `a:+,t:-`.
    #[arg(long)]
    w: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a presentation and print it.
    Parse(GroupArgs),
    /// Fox–Lyndon resolution.
    Resolve(GroupArgs),
    /// Dual complex.
    Dualize(GroupArgs),
    /// Fox derivative of a word with respect to one generator.
    Fox {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        word: String,
        #[arg(long)]
        generator: String,
    },
    /// Verify a degree-two diagonal candidate.
    DiagVerify {
        #[command(flatten)]
        group: GroupArgs,
        /// Use the closed form shipped with the family.
        #[arg(long, conflicts_with = "candidate")]
        builtin: bool,
        /// Candidate JSON file.
        #[arg(long)]
        candidate: Option<PathBuf>,
    },
    /// Search for a degree-two diagonal candidate.
    DiagSearch {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = DEFAULT_DICTIONARY_CAP)]
        cap: usize,
        #[arg(long, default_value_t = 5)]
        bound: u64,
        /// Extra random dictionary words of length at most 4.
        #[arg(long, default_value_t = 0)]
        extra_random: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Skip the ansatz and solve the linear system directly.
        #[arg(long)]
        linear: bool,
    },
    /// Check `ξ ∪ id = -θ(τ(ξ))` on a spanning set of cocycles.
    CupCheck {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 2)]
        truncation: u32,
        #[arg(long)]
        candidate: Option<PathBuf>,
    },
    /// Cohomology with constant coefficients.
    Cohomology {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        degree: usize,
        /// `Z` or `Z/k`.
        #[arg(long, default_value = "Z")]
        coeffs: String,
        /// Let the group act on the coefficients through `w`.
        #[arg(long)]
        twisted: bool,
    },
    /// Truncated coinvariant presentation for `Z[1/m] ⋊ Z`.
    Lemma16 {
        #[arg(long)]
        m: i64,
        #[arg(long)]
        level: u32,
        /// Invariant factors as CSV.
        #[arg(long)]
        csv: bool,
    },
    /// Torsion-freeness of the quadratic coinvariants for `Z[1/m] ⋊ Z`.
    GammaCheck {
        #[arg(long)]
        m: i64,
        #[arg(long, default_value_t = 2)]
        level: u32,
    },
    /// Dimension of `H^1(F(s); F_2) / (α - 1)`.
    Delta {
        #[arg(long)]
        rank: usize,
        /// Image of each generator `x1 .. xs`, in order.
        #[arg(long = "image", required = true)]
        images: Vec<String>,
    },
    /// Orbits of k-invariants for surface groups.
    Pd2Orbits {
        #[arg(long)]
        orientable: bool,
        #[arg(long)]
        twisted: bool,
    },
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Syntax { .. }
            | Error::UndeclaredGenerator { .. }
            | Error::TrivialRelator { .. }
            | Error::OrientationOnRelator { .. }
            | Error::MissingOrientation(_)
            | Error::InvalidParams(_)
            | Error::UnknownGenerator(_)
            | Error::Malformed(_)
            | Error::WrongContext(_)
            | Error::TruncationTooSmall(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

/// Report text or JSON payload, and whether the verdict holds.
struct Outcome {
    text: String,
    json: Value,
    ok: bool,
}

fn outcome(text: String, json: Value, ok: bool) -> Result<Outcome, Failure> {
    Ok(Outcome { text, json, ok })
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("--{flag} is required for this family")))
}

fn family_of(g: &GroupArgs, name: FamilyName) -> Result<Family, Failure> {
    Ok(match name {
        FamilyName::Free => Family::Free(need(g.rank, "rank")?),
        FamilyName::FreeByZ => Family::FreeByZ(need(g.rank, "rank")?),
        FamilyName::TorusKnot => {
            let m = need(g.m, "m")?;
            let m = u32::try_from(m).map_err(|_| Failure::Usage("--m must be positive".into()))?;
            Family::TorusKnot(m, need(g.n, "n")?)
        }
        FamilyName::Surface => Family::Surface(need(g.genus, "genus")?),
        FamilyName::Bs => Family::Bs(need(g.m, "m")?),
    })
}

fn parse_orientation(text: &str, names: &[String]) -> Result<OrientationChar, Failure> {
    let mut signs = vec![1i8; names.len()];
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (g, s) = part
            .split_once(':')
            .ok_or_else(|| Failure::Usage(format!("bad orientation entry `{part}`")))?;
        let i = names
            .iter()
            .position(|n| n == g.trim())
            .ok_or_else(|| Failure::Usage(format!("unknown generator `{g}` in --w")))?;
        signs[i] = match s.trim() {
            "+" | "+1" | "1" => 1,
            "-" | "-1" => -1,
            other => return Err(Failure::Usage(format!("bad sign `{other}` in --w"))),
        };
    }
    Ok(OrientationChar::new(signs))
}

fn load_group(g: &GroupArgs) -> Result<Resolved, Failure> {
    if let Some(name) = g.family {
        let mut ctx = builtin_family(family_of(g, name)?)?;
        if let Some(w) = &g.w {
            let w = parse_orientation(w, ctx.presentation().generators())?;
            ctx = ctx.with_orientation(w)?;
        }
        return Ok(Resolved::from_family(&ctx)?);
    }
    let path = g
        .file
        .as_ref()
        .ok_or_else(|| Failure::Usage("give --family or --file".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut p = parse_presentation(&text)?;
    if let Some(w) = &g.w {
        let w = parse_orientation(w, p.generators())?;
        p = p.with_orientation(w)?;
    }
    let rs = knuth_bendix(
        p.rank(),
        p.relators(),
        WordOrder::shortlex_default(p.rank()),
        CompletionLimits::default(),
    )?;
    Ok(Resolved::new(p, rs)?)
}

fn read_json(path: &PathBuf) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn group_json(res: &Resolved) -> Value {
    json!({
        "family": res.family().map(|f| f.to_string()),
        "params": res.family().map(|f| f.params()),
    })
}

fn random_words(res: &Resolved, count: usize, seed: u64) -> Result<Vec<GroupElement>, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rank = res.rank();
    let mut out = Vec::with_capacity(count);
    if rank == 0 {
        return Ok(out);
    }
    for _ in 0..count {
        let len = rng.gen_range(1..=4);
        let w: Word = (0..len)
            .map(|_| Letter::new(rng.gen_range(0..rank), rng.gen_bool(0.5)))
            .collect();
        out.push(res.rewriting().normal_form(&w)?);
    }
    Ok(out)
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Parse(g) => {
            let res = load_group(g)?;
            let p = res.presentation();
            let mut j = group_json(&res);
            j["generators"] = json!(p.generators());
            j["relators"] = json!(p.relators().iter().map(|r| p.format_word(r)).collect::<Vec<_>>());
            j["orientation"] = json!(res.orientation().values());
            j["confluent"] = json!(res.rewriting().is_confluent());
            outcome(p.to_file_string(), j, true)
        }
        Command::Resolve(g) | Command::Dualize(g) => {
            let res = load_group(g)?;
            let names = res.presentation().generators();
            let mut text = String::new();
            let mut j = group_json(&res);
            let full = res.to_json();
            if matches!(cli.command, Command::Resolve(_)) {
                for x in 0..res.rank() {
                    text += &format!("∂p1_{} = ({})·p0\n", names[x], res.format(res.resolution().d1(x)));
                }
                for r in 0..res.relator_count() {
                    let terms: Vec<String> = (0..res.rank())
                        .map(|x| format!("({})·p1_{}", res.format(res.resolution().fox_entry(r, x)), names[x]))
                        .collect();
                    text += &format!("∂p2_{} = {}\n", res.relator_label(r), terms.join(" + "));
                }
                j["resolution"] = full["resolution"].clone();
            } else {
                let top: Vec<String> = (0..res.rank())
                    .map(|x| format!("({})·q1_{}", res.format(res.dual().top_entry(x)), names[x]))
                    .collect();
                text += &format!("∂1* = {}\n", top.join(" + "));
                for x in 0..res.rank() {
                    let terms: Vec<String> = (0..res.relator_count())
                        .map(|r| format!("({})·q0_{}", res.format(res.dual().entry(x, r)), res.relator_label(r)))
                        .collect();
                    text += &format!("∂q1_{} = {}\n", names[x], terms.join(" + "));
                }
                j["dual"] = full["dual"].clone();
            }
            outcome(text.trim_end().to_string(), j, true)
        }
        Command::Fox { group, word, generator } => {
            let res = load_group(group)?;
            let p = res.presentation();
            let x = p
                .generator_index(generator)
                .ok_or_else(|| Failure::Usage(format!("unknown generator `{generator}`")))?;
            let w = p.parse_word(word)?;
            let free = fox_derivative(&w, x, res.rank())?;
            let reduced = reduce_into(&free, res.rewriting())?;
            let names = p.generators();
            let mut j = group_json(&res);
            j["word"] = json!(word);
            j["generator"] = json!(generator);
            j["free"] = free.to_json(names);
            j["reduced"] = reduced.to_json(names);
            outcome(
                format!("free: {}\nreduced: {}", free.format(names), reduced.format(names)),
                j,
                true,
            )
        }
        Command::DiagVerify { group, builtin, candidate } => {
            let res = load_group(group)?;
            let cand = match candidate {
                Some(path) => tensor_from_json(&res, &read_json(path)?)?,
                None if *builtin => builtin_candidate(&res)?,
                None => return Err(Failure::Usage("give --builtin or --candidate".into())),
            };
            let rep = verify_j2(&res, &cand)?;
            let mut j = group_json(&res);
            j["candidate"] = tensor_to_json(&res, &cand);
            j["report"] = rep.to_json(&res);
            let mut text = rep.summary();
            if !rep.pass {
                text += &format!("\ndefect: {}", format_tensor(&res, &rep.defect));
            }
            outcome(text, j, rep.pass)
        }
        Command::DiagSearch { group, cap, bound, extra_random, seed, linear } => {
            let res = load_group(group)?;
            let mut dict = build_dictionary(&res, *cap)?;
            for g in random_words(&res, *extra_random, *seed)? {
                if !dict.contains(&g) {
                    dict.push(g);
                }
            }
            let bound = BigInt::from(*bound);
            let out = if *linear {
                search_j2_linear(&res, &dict, &bound)?
            } else {
                search_j2(&res, &dict, &bound)?
            };
            let found = out.candidate.is_some();
            let mut j = group_json(&res);
            j["seed"] = json!(seed);
            j["dictionary_size"] = json!(dict.len());
            j["outcome"] = out.to_json(&res);
            let status = match out.status {
                SearchStatus::Ansatz => "found by the segment ansatz",
                SearchStatus::LinearSystem => "found by the linear system",
                SearchStatus::EmptyDictionary => "empty dictionary",
                SearchStatus::NoSolution => "no solution",
                SearchStatus::BoundExceeded => "no solution within the coefficient bound",
            };
            let mut text = format!("{status} (dictionary {}, {} unknowns, rank {})", dict.len(), out.unknowns, out.rank);
            if let Some(c) = &out.candidate {
                text += &format!("\nj2(1*) = {}", format_tensor(&res, c));
            }
            outcome(text, j, found)
        }
        Command::CupCheck { group, truncation, candidate } => {
            let res = load_group(group)?;
            let j2 = match candidate {
                Some(path) => tensor_from_json(&res, &read_json(path)?)?,
                None => builtin_candidate(&res)?,
            };
            let model = coinvariants_model(&res, *truncation)?;
            let spanning = spanning_cocycles(&res, &model)?;
            let rep = check_cup_relation(&res, &model, &spanning, &j2)?;
            let mut j = group_json(&res);
            j["report"] = rep.to_json();
            let text = if !rep.j2_valid {
                format!("false: j2 fails verification ({} defect terms)", rep.defect.len())
            } else {
                format!(
                    "{}: {} of {} cocycles agree ({} model, truncation {})",
                    rep.holds(),
                    rep.cocycles.len() - rep.disagreements(),
                    rep.cocycles.len(),
                    if rep.exact { "exact" } else { "windowed" },
                    rep.truncation
                )
            };
            outcome(text, j, rep.holds())
        }
        Command::Cohomology { group, degree, coeffs, twisted } => {
            let res = load_group(group)?;
            let c = match coeffs.trim() {
                "Z" => Coefficients::Integers,
                s => {
                    let k = s
                        .strip_prefix("Z/")
                        .and_then(|k| k.parse::<u64>().ok())
                        .ok_or_else(|| Failure::Usage(format!("coefficients `{s}` are not Z or Z/k")))?;
                    Coefficients::Cyclic(k)
                }
            };
            let w = twisted.then(|| res.orientation().clone());
            let h = cohomology_finite_coeffs(&res, *degree, c, w.as_ref())?;
            let factors: Vec<String> = h
                .factors
                .iter()
                .map(|d| if d == &BigInt::from(0) { "Z".to_string() } else { format!("Z/{d}") })
                .collect();
            let text = if factors.is_empty() { "0".to_string() } else { factors.join(" + ") };
            let mut j = group_json(&res);
            j["cohomology"] = h.to_json();
            outcome(format!("H^{}({}) = {text}", degree, h.coefficients), j, true)
        }
        Command::Lemma16 { m, level, csv } => {
            let p = lemma16_truncation(*m, *level)?;
            let (ok, factors) = torsion_free_check(&p);
            let text = if *csv {
                factors_csv(&factors)?.trim_end().to_string()
            } else {
                let fs: Vec<String> = factors.iter().map(|d| d.to_string()).collect();
                format!(
                    "{} generators, invariant factors [{}]: {}",
                    p.generator_count(),
                    fs.join(", "),
                    if ok { "torsion-free" } else { "torsion" }
                )
            };
            let j = json!({
                "m": m,
                "level": level,
                "presentation": p.to_json(),
                "invariant_factors": factors.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                "torsion_free": ok,
            });
            outcome(text, j, ok)
        }
        Command::GammaCheck { m, level } => {
            let rep = gamma_w_coinvariants_check(*m, *level)?;
            let ok = matches!(rep.status, GammaStatus::TorsionFreeKnown | GammaStatus::TorsionFreeAtTruncation);
            let mut text = format!("{} (beta = {})", rep.verdict(), rep.beta);
            if let Some(note) = rep.note() {
                text += &format!("\nnote: {note}");
            }
            outcome(text, rep.to_json(), ok)
        }
        Command::Delta { rank, images } => {
            let names: Vec<String> = (1..=*rank).map(|i| format!("x{i}")).collect();
            let p = parse_presentation(&format!("gens {}\n", names.join(" ")))?;
            let words = images.iter().map(|s| p.parse_word(s)).collect::<Result<Vec<_>, _>>()?;
            let rep = delta_invariant(*rank, &words)?;
            let basis: Vec<String> = rep.coset_basis.iter().map(|&i| format!("{}*", names[i])).collect();
            outcome(
                format!("dimension {} spanned by [{}]", rep.dimension, basis.join(", ")),
                rep.to_json(&names),
                true,
            )
        }
        Command::Pd2Orbits { orientable, twisted } => {
            let rep = pd2_orbit_reps(*orientable, *twisted);
            let reps: Vec<String> = rep.representatives.iter().map(|m| format!("m={m}")).collect();
            outcome(format!("{} orbits: {}", rep.count(), reps.join(", ")), rep.to_json(), true)
        }
    }
}

fn verb(c: &Command) -> &'static str {
    match c {
        Command::Parse(_) => "parse",
        Command::Resolve(_) => "resolve",
        Command::Dualize(_) => "dualize",
        Command::Fox { .. } => "fox",
        Command::DiagVerify { .. } => "diag-verify",
        Command::DiagSearch { .. } => "diag-search",
        Command::CupCheck { .. } => "cup-check",
        Command::Cohomology { .. } => "cohomology",
        Command::Lemma16 { .. } => "lemma16",
        Command::GammaCheck { .. } => "gamma-check",
        Command::Delta { .. } => "delta",
        Command::Pd2Orbits { .. } => "pd2-orbits",
    }
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    // a closed pipe is not an error for a report printer
    let _ = writeln!(out, "{text}").and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let result = run(&cli);
    if cli.verbose {
        eprintln!("{}: {:.3?}", verb(&cli.command), start.elapsed());
    }
    match result {
        Ok(out) => {
            if cli.json {
                let mut j = json!({"schema": 1, "command": verb(&cli.command), "ok": out.ok});
                if let (Some(obj), Value::Object(payload)) = (j.as_object_mut(), out.json) {
                    for (k, v) in payload {
                        obj.insert(k, v);
                    }
                }
                emit(&serde_json::to_string_pretty(&j).expect("serializable"));
            } else {
                emit(&out.text);
            }
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
