//! Command-line front end: experiment configuration, one subcommand per
//! capability, CSV/summary output, deterministic seeding.
//!
//! Exit codes: 0 success, 1 bound-check failure, 2 usage/config error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use holevo_auth::adversary::AttackPolicy;
use holevo_auth::bounds::standard_battery;
use holevo_auth::entropy::{min_entropy, shannon_entropy, zero_entropy, Distribution};
use holevo_auth::hashing::{collision_estimate, FamilySpec};
use holevo_auth::protocol::run_protocol;
use holevo_auth::quantum::{holevo_information, von_neumann_entropy};
use holevo_auth::seed::{derive_rng, Stream};
use holevo_auth::{DensityMatrix, Ensemble, ProtocolConfig};

mod ensemble_file;

#[derive(Parser)]
#[command(name = "holevo-auth", version, about = "Authentication-protocol security simulator")]
struct Cli {
    /// Worker threads for Monte Carlo trials (0 = machine parallelism).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shannon, min-, and 0-entropy of a finite distribution.
    Entropy {
        /// Comma-separated probabilities, e.g. `0.5,0.3,0.2`.
        #[arg(long, conflicts_with = "file")]
        dist: Option<String>,
        /// File holding the probabilities (whitespace- or comma-separated).
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Holevo information of a state ensemble file.
    Holevo {
        /// Ensemble file: one `p | re,im; re,im; ...` line per component.
        #[arg(long)]
        file: PathBuf,
    },
    /// Invert the Fano condition for (m, chi).
    Fano {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        chi: f64,
    },
    /// Empirical collision rate of a two-universal family.
    HashTest {
        /// Family: toeplitz | paritycheck | square.
        #[arg(long, default_value = "toeplitz")]
        family: String,
        #[arg(long)]
        n: usize,
        /// Output bits (toeplitz only).
        #[arg(long, default_value_t = 0)]
        d: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run the protocol under an attack policy and write the verdict CSV.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        trials: Option<u64>,
        /// Master seed (HOLEVO_AUTH_SEED overrides when set).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Attack policy: replay | random-tag | best-guess.
        #[arg(long, default_value = "best-guess")]
        attack: String,
    },
    /// Run the standalone bound-check battery.
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 20_000)]
        trials: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep one parameter across values, one simulate run each.
    Sweep {
        /// Parameter: q_leak | flip_prob | tag_bits | eps_S.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long)]
        values: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Combined long-format CSV path (per-value CSVs take a suffix).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "best-guess")]
        attack: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot build thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    let code = pool.install(|| dispatch(cli.command));
    ExitCode::from(code)
}

fn dispatch(command: Command) -> u8 {
    let result = match command {
        Command::Entropy { dist, file } => cmd_entropy(dist, file),
        Command::Holevo { file } => cmd_holevo(&file),
        Command::Fano { m, chi } => cmd_fano(m, chi),
        Command::HashTest { family, n, d, trials, seed } => cmd_hash_test(&family, n, d, trials, seed),
        Command::Simulate { config, trials, seed, out, attack } => {
            cmd_simulate(config.as_deref(), trials, seed, out.as_deref(), &attack)
        }
        Command::Verify { seed, trials, out } => cmd_verify(seed, trials, out.as_deref()),
        Command::Sweep { param, values, config, trials, seed, out, attack } => {
            cmd_sweep(&param, &values, config.as_deref(), trials, seed, out.as_deref(), &attack)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

type CliResult = Result<u8, Box<dyn std::error::Error>>;

/// `HOLEVO_AUTH_SEED` beats `--seed` beats the config's `master_seed`.
fn resolve_seed(cli_seed: Option<u64>, cfg_seed: u64) -> Result<u64, Box<dyn std::error::Error>> {
    if let Ok(v) = std::env::var("HOLEVO_AUTH_SEED") {
        let parsed: u64 = v
            .trim()
            .parse()
            .map_err(|_| format!("HOLEVO_AUTH_SEED is not an integer: '{v}'"))?;
        return Ok(parsed);
    }
    Ok(cli_seed.unwrap_or(cfg_seed))
}

fn manifest_header(subcommand: &str, config: &str, seed: u64, out: &str) -> String {
    format!(
        "# holevo-auth {subcommand}\n# config: {config}\n# seed: {seed}\n# out: {out}\n# emitted_at: {}\n",
        chrono::Utc::now().to_rfc3339()
    )
}

fn parse_attack(name: &str) -> Result<AttackPolicy, Box<dyn std::error::Error>> {
    match name {
        "replay" => Ok(AttackPolicy::ReplayGenuine),
        "random-tag" => Ok(AttackPolicy::RandomTag),
        "best-guess" => Ok(AttackPolicy::BestGuessForgery),
        _ => Err(format!("unknown attack policy '{name}' (replay | random-tag | best-guess)").into()),
    }
}

// ---------------------------------------------------------------------------
// entropy
// ---------------------------------------------------------------------------

fn cmd_entropy(dist: Option<String>, file: Option<PathBuf>) -> CliResult {
    let text = match (dist, file) {
        (Some(d), None) => d,
        (None, Some(f)) => std::fs::read_to_string(f)?,
        _ => return Err("provide exactly one of --dist or --file".into()),
    };
    let probs: Vec<f64> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("bad probability '{s}'")))
        .collect::<Result<_, _>>()?;
    if probs.is_empty() {
        return Err("empty distribution".into());
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(format!("probabilities sum to {total}, beyond the 1e-6 tolerance").into());
    }
    let normalized: Vec<f64> = probs.iter().map(|p| p / total).collect();
    let d = Distribution::new(normalized)?;
    println!("H      = {:.9} bits", shannon_entropy(&d));
    println!("Hmin   = {:.9} bits", min_entropy(&d));
    println!("H0     = {:.9} bits", zero_entropy(&d));
    Ok(0)
}

// ---------------------------------------------------------------------------
// holevo
// ---------------------------------------------------------------------------

fn cmd_holevo(file: &Path) -> CliResult {
    let text = std::fs::read_to_string(file)?;
    let components = ensemble_file::parse(&text)?;
    let states: Vec<(f64, DensityMatrix)> = components
        .into_iter()
        .map(|(p, m)| DensityMatrix::new(m).map(|s| (p, s)))
        .collect::<Result<_, _>>()?;
    let ensemble = Ensemble::new(states)?;
    let chi = holevo_information(&ensemble)?;
    let avg_entropy = von_neumann_entropy(&ensemble.average_state())?;
    println!("chi    = {chi:.9} bits");
    println!("S(avg) = {avg_entropy:.9} bits");
    Ok(0)
}

// ---------------------------------------------------------------------------
// fano
// ---------------------------------------------------------------------------

fn cmd_fano(m: u64, chi: f64) -> CliResult {
    let p = holevo_auth::entropy::fano_invert(m, chi)?;
    println!("{p:.9}");
    Ok(0)
}

// ---------------------------------------------------------------------------
// hash-test
// ---------------------------------------------------------------------------

fn cmd_hash_test(family: &str, n: usize, d: usize, trials: u64, seed: u64) -> CliResult {
    let spec = match family {
        "toeplitz" => {
            if d == 0 {
                return Err("toeplitz needs --d >= 1".into());
            }
            FamilySpec::Toeplitz { n, d }
        }
        "paritycheck" => FamilySpec::ParityCheck { n },
        "square" => FamilySpec::InvertibleSquare { n },
        _ => return Err(format!("unknown family '{family}'").into()),
    };
    let mut rng = derive_rng(seed, Stream::Hash, 0);
    let (rate, stderr) = collision_estimate(&spec, trials, &mut rng)?;
    let bound = 2.0f64.powi(-(spec.output_bits() as i32));
    println!("family    = {family} n={n} d={}", spec.output_bits());
    println!("trials    = {trials}");
    println!("collision = {rate:.9e} (stderr {stderr:.3e})");
    println!("bound     = {bound:.9e}");
    let pass = rate <= bound + 4.0 * stderr;
    println!("verdict   = {}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn load_config(path: Option<&Path>) -> Result<ProtocolConfig, Box<dyn std::error::Error>> {
    match path {
        Some(p) => Ok(ProtocolConfig::load(p)?),
        None => Ok(ProtocolConfig::default()),
    }
}

fn cmd_simulate(
    config: Option<&Path>,
    trials: Option<u64>,
    seed: Option<u64>,
    out: Option<&Path>,
    attack: &str,
) -> CliResult {
    let mut cfg = load_config(config)?;
    cfg.master_seed = resolve_seed(seed, cfg.master_seed)?;
    let policy = parse_attack(attack)?;
    let trials = trials.unwrap_or(cfg.trials);
    let report = run_protocol(&cfg, policy, trials)?;

    let config_name = config.map(|p| p.display().to_string()).unwrap_or_else(|| "builtin-default".into());
    let out_name = out.map(|p| p.display().to_string()).unwrap_or_else(|| "-".into());
    let header = manifest_header("simulate", &config_name, cfg.master_seed, &out_name);
    let csv = format!("{header}{}", report.verdict_csv_body());
    match out {
        Some(path) => std::fs::write(path, &csv)?,
        None => print!("{csv}"),
    }
    println!("{}", report.summary());
    Ok(if report.all_pass() { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(seed: Option<u64>, trials: u64, out: Option<&Path>) -> CliResult {
    let seed = resolve_seed(seed, 42)?;
    let checks = standard_battery(seed, trials)?;
    let out_name = out.map(|p| p.display().to_string()).unwrap_or_else(|| "-".into());
    let header = manifest_header("verify", "builtin-battery", seed, &out_name);
    let mut csv = format!("{header}bound_name,bound_value,measured,stderr,pass\n");
    for c in &checks {
        csv.push_str(&c.csv_row());
        csv.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, &csv)?,
        None => print!("{csv}"),
    }
    let mut all = true;
    for c in &checks {
        println!(
            "[{}] {:<34} bound {:>13.6e}  measured {:>13.6e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.bound,
            c.measured
        );
        all &= c.pass;
    }
    println!("overall: {}", if all { "PASS" } else { "FAIL" });
    Ok(if all { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn apply_param(cfg: &mut ProtocolConfig, param: &str, value: &str) -> Result<(), Box<dyn std::error::Error>> {
    match param {
        "q_leak" => cfg.q_leak = value.parse()?,
        "flip_prob" => cfg.flip_prob = value.parse()?,
        "tag_bits" => cfg.tag_bits = value.parse()?,
        "eps_S" | "eps_s" => cfg.eps_s = value.parse()?,
        _ => return Err(format!("unknown sweep parameter '{param}' (q_leak | flip_prob | tag_bits | eps_S)").into()),
    }
    Ok(())
}

fn cmd_sweep(
    param: &str,
    values: &str,
    config: Option<&Path>,
    trials: Option<u64>,
    seed: Option<u64>,
    out: Option<&Path>,
    attack: &str,
) -> CliResult {
    let value_list: Vec<&str> = values.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if value_list.is_empty() {
        return Err("empty sweep value list".into());
    }
    let base = load_config(config)?;
    let policy = parse_attack(attack)?;
    let master_seed = resolve_seed(seed, base.master_seed)?;
    let config_name = config.map(|p| p.display().to_string()).unwrap_or_else(|| "builtin-default".into());

    let mut combined = String::from("param_value,bound_name,bound_value,measured,stderr,pass\n");
    let mut exit = 0u8;
    for value in &value_list {
        let mut cfg = base.clone();
        cfg.master_seed = master_seed;
        apply_param(&mut cfg, param, value)?;
        cfg.validate()?;
        let trials = trials.unwrap_or(cfg.trials);
        let report = run_protocol(&cfg, policy, trials)?;
        println!("== {param} = {value} ==");
        println!("{}", report.summary());
        if !report.all_pass() {
            exit = 1;
        }
        for v in &report.verdicts {
            combined.push_str(&format!("{value},{}\n", v.csv_row()));
        }
        if let Some(base_out) = out {
            let per_value = sweep_member_path(base_out, param, value);
            let header = manifest_header(
                "sweep",
                &config_name,
                master_seed,
                &per_value.display().to_string(),
            );
            std::fs::write(&per_value, format!("{header}{}", report.verdict_csv_body()))?;
        }
    }
    let out_name = out.map(|p| p.display().to_string()).unwrap_or_else(|| "-".into());
    let header = manifest_header("sweep", &config_name, master_seed, &out_name);
    match out {
        Some(path) => std::fs::write(path, format!("{header}{combined}"))?,
        None => print!("{header}{combined}"),
    }
    Ok(exit)
}

fn sweep_member_path(base: &Path, param: &str, value: &str) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    let file = format!("{stem}_{param}{value}.{ext}");
    base.with_file_name(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_paths_carry_param_and_value() {
        let p = sweep_member_path(Path::new("/tmp/run.csv"), "q_leak", "0.25");
        assert_eq!(p, PathBuf::from("/tmp/run_q_leak0.25.csv"));
    }

    #[test]
    fn attack_names_parse() {
        assert!(parse_attack("best-guess").is_ok());
        assert!(parse_attack("replay").is_ok());
        assert!(parse_attack("random-tag").is_ok());
        assert!(parse_attack("nope").is_err());
    }
}
