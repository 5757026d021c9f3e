use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use rdesign::harness::{Harness, RunConfig};
use rdesign::pragmatics::{HorizonPrior, PosteriorSummary, PragmaticListener};
use rdesign::{Belief, Execution, HarnessError, RewardWeights, Speaker, SpeakerConfig, Utterance, UtteranceKind};

#[derive(Parser)]
#[command(name = "rdesign", version, about = "Speakers as reward designers in linear bandits")]
struct Cli {
    /// JSON run config; defaults apply for missing fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Literal listener rationality
    #[arg(long, global = true)]
    beta_l0: Option<f64>,
    /// Speaker rationality
    #[arg(long, global = true)]
    beta_s1: Option<f64>,
    /// True weights as comma-separated integers, e.g. 2,-2,0,-1,1,0
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    true_w: Option<Vec<i32>>,
    /// Run on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print environment statistics.
    Enumerate,
    /// Speaker utterance distribution for one start state and horizon.
    Explain {
        /// Start state index (see `enumerate`)
        #[arg(long)]
        state: usize,
        /// Speaker horizon
        #[arg(long)]
        horizon: u32,
        #[arg(long, value_enum, default_value = "both")]
        kind: KindArg,
        /// Emit JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Utterance preferences and literal-listener rewards by horizon.
    SweepSpeaker,
    /// Pragmatic gain under known, misaligned and joint horizons.
    SweepPragmatics,
    /// Both sweeps into one table.
    All,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum KindArg {
    InstructionsOnly,
    DescriptionsOnly,
    Both,
}

impl From<KindArg> for UtteranceKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::InstructionsOnly => UtteranceKind::InstructionsOnly,
            KindArg::DescriptionsOnly => UtteranceKind::DescriptionsOnly,
            KindArg::Both => UtteranceKind::Both,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, HarnessError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(b) = cli.beta_l0 {
        cfg.beta_l0 = b;
    }
    if let Some(b) = cli.beta_s1 {
        cfg.beta_s1 = b;
    }
    if let Some(w) = &cli.true_w {
        cfg.true_w = Some(RewardWeights(w.clone()));
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    let cfg = load_config(&cli)?;
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let harness = Harness::new(cfg)?.with_execution(exec);
    match cli.command {
        Command::Enumerate => enumerate(&harness),
        Command::Explain {
            state,
            horizon,
            kind,
            json,
        } => explain(&harness, state, horizon, kind.into(), json),
        Command::SweepSpeaker => sweep(&harness, "speaker", Harness::run_speaker_sweep),
        Command::SweepPragmatics => sweep(&harness, "pragmatics", Harness::run_pragmatics_sweep),
        Command::All => sweep(&harness, "results", Harness::run_all),
    }
}

fn sweep(
    harness: &Harness,
    stem: &str,
    f: fn(&Harness) -> Result<Vec<rdesign::harness::SweepRecord>, HarnessError>,
) -> Result<(), HarnessError> {
    let start = Instant::now();
    let records = f(harness)?;
    let paths = harness.emit(&records, stem)?;
    eprintln!(
        "{} rows in {:.2}s -> {} , {}",
        records.len(),
        start.elapsed().as_secs_f64(),
        paths.csv.display(),
        paths.summary.display()
    );
    Ok(())
}

fn enumerate(harness: &Harness) -> Result<(), HarnessError> {
    let env = harness.env();
    println!("features     {}", env.k());
    println!("actions      {}", env.actions().len());
    println!("states       {}", env.states().len());
    println!("hypotheses   {}", env.hypotheses().len());
    for kind in UtteranceKind::ALL {
        let n = rdesign::UtteranceSet::enumerate(env, kind).len();
        println!("utterances   {n:<4} ({kind})");
    }
    println!("true_w       {:?}", harness.true_w().0);
    for a in env.actions() {
        println!("  {}", env.action_label(a.id));
    }
    Ok(())
}

#[derive(Serialize)]
struct UtteranceProb {
    utterance: Utterance,
    label: String,
    prob: f64,
}

#[derive(Serialize)]
struct Explanation {
    state: usize,
    actions: Vec<String>,
    horizon: u32,
    kind: UtteranceKind,
    distribution: Vec<UtteranceProb>,
    map_utterance: Utterance,
    /// Joint-horizon pragmatic posterior after the MAP utterance.
    map_posterior: PosteriorSummary,
}

fn explain(
    harness: &Harness,
    state: usize,
    horizon: u32,
    kind: UtteranceKind,
    json: bool,
) -> Result<(), HarnessError> {
    let env = harness.env();
    if state >= env.states().len() {
        return Err(HarnessError::Config(format!(
            "state {state} out of range (0..{})",
            env.states().len()
        )));
    }
    let cfg = harness.config();
    let cache = harness.response_cache(kind)?;
    let speaker = Speaker::new(
        env,
        &cache,
        SpeakerConfig {
            beta_s1: cfg.beta_s1,
            horizon,
        },
    )
    .map_err(|e| HarnessError::Config(e.to_string()))?;
    let dist = speaker.distribution(harness.true_w(), state)?;
    let map = speaker.map_utterance(harness.true_w(), state)?;

    let l1 = PragmaticListener::new(
        env,
        &cache,
        cfg.beta_s1,
        Belief::uniform(env),
        harness.listener_config(),
    )?;
    let h_prior = HorizonPrior::uniform(cfg.horizon_prior.clone())?;
    let joint = l1.posterior_joint(state, &map, &h_prior)?;

    let explanation = Explanation {
        state,
        actions: env.states()[state]
            .action_ids()
            .iter()
            .map(|&a| env.action_label(a))
            .collect(),
        horizon,
        kind,
        distribution: cache
            .utterances()
            .utterances()
            .iter()
            .zip(&dist)
            .map(|(u, &prob)| UtteranceProb {
                utterance: *u,
                label: u.label(env),
                prob,
            })
            .collect(),
        map_utterance: map,
        map_posterior: PosteriorSummary::from_joint(env, &joint, 5),
    };

    if json {
        let text = serde_json::to_string_pretty(&explanation)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        println!("{text}");
        return Ok(());
    }
    println!(
        "state {state}: {}   horizon {horizon}   ({kind})",
        explanation.actions.join(", ")
    );
    let mut rows: Vec<&UtteranceProb> = explanation.distribution.iter().collect();
    rows.sort_by(|a, b| b.prob.total_cmp(&a.prob));
    for r in rows.iter().take(10) {
        println!("  {:>8.5}  {}", r.prob, r.label);
    }
    let post = &explanation.map_posterior;
    println!("after \"{}\":", map.label(env));
    println!("  posterior mean w  {:.3?}", post.mean_weights);
    if let Some(hm) = &post.horizon_marginal {
        let parts: Vec<String> = hm
            .iter()
            .map(|m| format!("H={}:{:.3}", m.horizon, m.mass))
            .collect();
        println!("  horizon marginal  {}", parts.join(" "));
    }
    Ok(())
}
