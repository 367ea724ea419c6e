use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use cloops::error::Error;
use cloops::ext;
use cloops::greedy::greedy_minimize;
use cloops::io::{read_looptab_file, write_looptab_file};
use cloops::iso::{are_isomorphic, canonical_fingerprint};
use cloops::modify::{
    build_chmu, group64_classes, DeltaMuParams, Group64, TrilinearForm,
};
use cloops::perm::inner_generator_perms;
use cloops::report::AnalysisReport;
use cloops::table::LoopTable;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "cloops", version, about = "Finite loops of nilpotency class three \
with abelian inner mapping groups: builders, analysis, and experiments")]
struct Cli {
    /// Size of the worker pool for parallel sections (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a named loop and write it in LOOPTAB format
    Build(BuildArgs),
    /// Structural analysis of a loop table
    Analyze {
        file: PathBuf,
        /// Also compute multiplication and inner mapping group orders
        #[arg(long)]
        mlt: bool,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Greedy block descent on the nonassociativity count
    Greedy {
        file: PathBuf,
        /// Normal subloop whose cosets define the blocks
        #[arg(long, default_value = "nucleus", value_parser = ["nucleus", "center"])]
        subloop: String,
        /// Central involution used for the flips ("auto" picks the unique one)
        #[arg(long, default_value = "auto")]
        h: String,
        /// Output table path
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// JSON history path
        #[arg(long)]
        history: Option<PathBuf>,
    },
    /// Decide isomorphism of two loop tables (exit 0 = isomorphic, 10 = not)
    Iso {
        file1: PathBuf,
        file2: PathBuf,
        /// Write the witness bijection as JSON
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Enumerate the class-2 groups of order 64 given by squaring vectors
    Groups64 {
        /// Deduplicate the 512 squaring vectors into isomorphism classes
        #[arg(long)]
        dedup: bool,
        /// Directory for LOOPTAB representatives and the JSON manifest
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a named experiment and emit a JSON report
    Experiment {
        #[arg(value_parser = [
            "theta-family",
            "single-delta-params",
            "random-mu-pairs",
            "greedy-descent",
            "groups64-census",
        ])]
        name: String,
        /// PRNG seed (ChaCha8; recorded in the report)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample count for random-mu-pairs
        #[arg(long, default_value_t = 50)]
        pairs: usize,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BuildArgs {
    /// c | cbar | gbar | theta2prime | pa64 | theta | chmu
    target: String,
    /// Cocycle index 0..=127 (target theta only)
    t: Option<usize>,
    /// Squaring vector "s1,s2,s3" or "class:1".."class:10" (target chmu)
    #[arg(long = "h")]
    h_group: Option<String>,
    /// 21 delta sign bits as hex (target chmu)
    #[arg(long)]
    delta: Option<String>,
    /// 7 mu sign bits as hex (target chmu)
    #[arg(long)]
    mu: Option<String>,
    /// Use the trivial form instead of the determinant (target chmu)
    #[arg(long)]
    trivial_form: bool,
    /// Output path (stdout when omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version requests are not usage errors
            use clap::error::ErrorKind::*;
            let _ = e.print();
            return match e.kind() {
                DisplayHelp | DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .ok();
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::TooLarge(_) => 3,
                Error::Io(_) | Error::Parse(_) => 1,
                _ => 2,
            })
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode, Error> {
    match cmd {
        Command::Build(args) => build(args),
        Command::Analyze { file, mlt, out } => {
            let q = read_looptab_file(&file)?;
            let report = AnalysisReport::analyze(&q, mlt);
            emit_json(&report, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Greedy { file, subloop, h, output, history } => {
            let q = read_looptab_file(&file)?;
            let mask = match subloop.as_str() {
                "center" => q.center(),
                _ => q.nuclei().full,
            };
            let h = match h.as_str() {
                "auto" => {
                    let center = q.center();
                    let invs: Vec<usize> =
                        center.iter().filter(|&x| x != 0 && q.mul(x, x) == 0).collect();
                    if invs.len() != 1 {
                        return Err(Error::NotCentralInvolution);
                    }
                    invs[0]
                }
                s => s.parse().map_err(|e| Error::Parse(format!("bad h: {e}")))?,
            };
            let (out_table, hist) = greedy_minimize(&q, &mask, h)?;
            match output {
                Some(p) => write_looptab_file(&out_table, p)?,
                None => cloops::io::write_looptab(&out_table, std::io::stdout().lock())?,
            }
            if let Some(p) = history {
                std::fs::write(p, serde_json::to_string_pretty(&hist).unwrap())?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Iso { file1, file2, witness } => {
            let q1 = read_looptab_file(&file1)?;
            let q2 = read_looptab_file(&file2)?;
            match are_isomorphic(&q1, &q2) {
                Some(map) => {
                    if let Some(p) = witness {
                        std::fs::write(p, serde_json::to_string(&map).unwrap())?;
                    }
                    println!("isomorphic");
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("not isomorphic");
                    Ok(ExitCode::from(10))
                }
            }
        }
        Command::Groups64 { dedup, output } => {
            if !dedup {
                return Err(Error::Parse("only --dedup mode is implemented".into()));
            }
            let classes = group64_classes();
            let manifest: Vec<_> = classes
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    serde_json::json!({
                        "class": i + 1,
                        "squaring_vector": c.rep.s,
                        "members": c.members.len(),
                        "fingerprint": c.fingerprint,
                    })
                })
                .collect();
            if let Some(dir) = output {
                std::fs::create_dir_all(&dir)?;
                for (i, c) in classes.iter().enumerate() {
                    write_looptab_file(&c.table, dir.join(format!("h{}.tab", i + 1)))?;
                }
                std::fs::write(
                    dir.join("manifest.json"),
                    serde_json::to_string_pretty(&manifest).unwrap(),
                )?;
            } else {
                println!("{}", serde_json::to_string_pretty(&manifest).unwrap());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Experiment { name, seed, pairs, out } => {
            let report = match name.as_str() {
                "theta-family" => theta_family_experiment(),
                "single-delta-params" => single_delta_params_experiment(),
                "random-mu-pairs" => random_mu_pairs_experiment(seed, pairs)?,
                "greedy-descent" => greedy_descent_experiment()?,
                "groups64-census" => groups64_census_experiment(),
                _ => unreachable!(),
            };
            let wrapped = serde_json::json!({
                "tool_version": VERSION,
                "experiment": name,
                "seed": seed,
                "prng": "ChaCha8",
                "report": report,
            });
            emit_json(&wrapped, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn build(args: BuildArgs) -> Result<ExitCode, Error> {
    let q = match args.target.as_str() {
        "c" => ext::build_c(),
        "cbar" => ext::build_cbar(),
        "gbar" => ext::build_gbar(),
        "theta2prime" => ext::build_theta_doubleprime(),
        "pa64" => ext::build_pa64(),
        "theta" => {
            let t = args.t.ok_or_else(|| Error::Parse("theta requires an index".into()))?;
            if t >= 128 {
                return Err(Error::Parse("theta index must be in 0..=127".into()));
            }
            ext::build_theta_t(t)
        }
        "chmu" => {
            let h = parse_group64(args.h_group.as_deref().unwrap_or("class:1"))?;
            let params = DeltaMuParams::from_hex(
                args.delta.as_deref().unwrap_or("0"),
                args.mu.as_deref().unwrap_or("0"),
            )?;
            let f = TrilinearForm { nontrivial: !args.trivial_form };
            build_chmu(&h, f, params)?
        }
        other => return Err(Error::Parse(format!("unknown build target {other:?}"))),
    };
    match args.output {
        Some(p) => write_looptab_file(&q, p)?,
        None => cloops::io::write_looptab(&q, std::io::stdout().lock())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_group64(spec: &str) -> Result<Group64, Error> {
    if let Some(idx) = spec.strip_prefix("class:") {
        let i: usize = idx.parse().map_err(|e| Error::Parse(format!("bad class: {e}")))?;
        let classes = group64_classes();
        if i == 0 || i > classes.len() {
            return Err(Error::Parse(format!(
                "class index must be in 1..={}",
                classes.len()
            )));
        }
        return Ok(classes[i - 1].rep);
    }
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Parse("squaring vector must be s1,s2,s3".into()));
    }
    let mut s = [0u8; 3];
    for (i, p) in parts.iter().enumerate() {
        s[i] = p.trim().parse().map_err(|e| Error::Parse(format!("bad component: {e}")))?;
        if s[i] >= 8 {
            return Err(Error::Parse("squaring components must be in 0..=7".into()));
        }
    }
    Ok(Group64::new(s))
}

fn emit_json<T: Serialize>(value: &T, out: Option<&std::path::Path>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).unwrap();
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

fn classify_theta(q: &LoopTable) -> &'static str {
    if q.is_associative() {
        return "group";
    }
    let gens = inner_generator_perms(q);
    if q.nilpotency_class() == Some(3) && cloops::perm::all_commute(&gens) {
        "class3-abelian-inn"
    } else {
        "other"
    }
}

fn theta_family_experiment() -> serde_json::Value {
    use rayon::prelude::*;
    let results: Vec<(usize, &'static str)> = (0..128usize)
        .into_par_iter()
        .map(|t| (t, classify_theta(&ext::build_theta_t(t))))
        .collect();
    let groups: Vec<usize> =
        results.iter().filter(|(_, c)| *c == "group").map(|&(t, _)| t).collect();
    let loops: Vec<usize> = results
        .iter()
        .filter(|(_, c)| *c == "class3-abelian-inn")
        .map(|&(t, _)| t)
        .collect();
    let gbar = ext::build_gbar();
    let groups_iso: Vec<bool> = groups
        .iter()
        .map(|&t| are_isomorphic(&ext::build_theta_t(t), &gbar).is_some())
        .collect();
    let cbar = ext::build_cbar();
    let loops_iso_cbar: Vec<bool> = loops
        .iter()
        .map(|&t| are_isomorphic(&ext::build_theta_t(t), &cbar).is_some())
        .collect();
    serde_json::json!({
        "group_t": groups,
        "class3_abelian_inn_t": loops,
        "other_t": results.iter().filter(|(_, c)| *c == "other").map(|&(t, _)| t)
            .collect::<Vec<_>>(),
        "groups_isomorphic_to_gbar": groups_iso,
        "loops_isomorphic_to_cbar": loops_iso_cbar,
    })
}

fn single_delta_params_experiment() -> serde_json::Value {
    use rayon::prelude::*;
    let h = Group64::new([0, 0, 0]);
    let f = TrilinearForm { nontrivial: true };
    let loops: Vec<LoopTable> = (0..21u32)
        .into_par_iter()
        .map(|bit| build_chmu(&h, f, DeltaMuParams::new(1 << bit, 0)).unwrap())
        .collect();
    let fingerprints: Vec<String> = loops.par_iter().map(canonical_fingerprint).collect();
    let pairs: Vec<(usize, usize)> =
        (0..21).flat_map(|i| (i + 1..21).map(move |j| (i, j))).collect();
    let iso_pairs: Vec<(usize, usize)> = pairs
        .par_iter()
        .filter(|&&(i, j)| are_isomorphic(&loops[i], &loops[j]).is_some())
        .cloned()
        .collect();
    serde_json::json!({
        "loops": 21,
        "isomorphic_pairs": iso_pairs,
        "pairwise_nonisomorphic": iso_pairs.is_empty(),
        "fingerprints": fingerprints,
    })
}

fn random_mu_pairs_experiment(seed: u64, pairs: usize) -> Result<serde_json::Value, Error> {
    use rayon::prelude::*;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = Group64::new([0, 0, 0]);
    let f = TrilinearForm { nontrivial: true };
    let specs: Vec<(DeltaMuParams, DeltaMuParams)> = (0..pairs)
        .map(|_| {
            (
                DeltaMuParams::new(rng.gen_range(0..1 << 21), rng.gen_range(0..1 << 7)),
                DeltaMuParams::new(rng.gen_range(0..1 << 21), rng.gen_range(0..1 << 7)),
            )
        })
        .collect();
    let results: Vec<serde_json::Value> = specs
        .par_iter()
        .map(|&(p1, p2)| {
            let q1 = build_chmu(&h, f, p1).unwrap();
            let q2 = build_chmu(&h, f, p2).unwrap();
            let iso = are_isomorphic(&q1, &q2).is_some();
            serde_json::json!({
                "params1": { "delta": format!("{:06x}", p1.delta_bits),
                             "mu": format!("{:02x}", p1.mu_bits) },
                "params2": { "delta": format!("{:06x}", p2.delta_bits),
                             "mu": format!("{:02x}", p2.mu_bits) },
                "isomorphic": iso,
            })
        })
        .collect();
    let count = results.iter().filter(|r| r["isomorphic"] == true).count();
    Ok(serde_json::json!({
        "pairs": pairs,
        "isomorphic_pair_count": count,
        "details": results,
    }))
}

fn greedy_descent_experiment() -> Result<serde_json::Value, Error> {
    let c = ext::build_c();
    let n = c.nuclei().full;
    let central: Vec<usize> = c.center().iter().filter(|&x| x != 0).collect();
    if central.len() != 1 {
        return Err(Error::NotCentralInvolution);
    }
    let (q, history) = greedy_minimize(&c, &n, central[0])?;
    let report = AnalysisReport::analyze(&q, false);
    let cbar = ext::build_cbar();
    Ok(serde_json::json!({
        "baseline_mu": c.mu_count(),
        "final_mu": q.mu_count(),
        "history": history,
        "final_report": report,
        "isomorphic_to_c": are_isomorphic(&q, &c).is_some(),
        "isomorphic_to_cbar": are_isomorphic(&q, &cbar).is_some(),
    }))
}

fn groups64_census_experiment() -> serde_json::Value {
    let classes = group64_classes();
    serde_json::json!({
        "squaring_vectors": 512,
        "isomorphism_classes": classes.len(),
        "classes": classes.iter().enumerate().map(|(i, c)| serde_json::json!({
            "class": i + 1,
            "representative": c.rep.s,
            "members": c.members.len(),
            "fingerprint": c.fingerprint,
        })).collect::<Vec<_>>(),
    })
}
