use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Arg, ArgMatches, Command};

use costcast::analysis::XminMode;
use costcast_cli::commands;
use costcast_cli::manifest::{Experiment, RawManifest, KEYS};

fn experiment_command(name: &'static str, about: &'static str) -> Command {
    let mut cmd = Command::new(name)
        .about(about)
        .arg(Arg::new("manifest").help("experiment manifest (key = value lines)"));
    for &key in KEYS {
        cmd = cmd.arg(
            Arg::new(key)
                .long(key)
                .value_name("VALUE")
                .help_heading("Manifest overrides"),
        );
    }
    cmd
}

fn cli() -> Command {
    Command::new("costcast")
        .about("Cost forecasting simulations for crowd-generated microtasks")
        .subcommand_required(true)
        .subcommand(experiment_command(
            "run",
            "Forecasting runs with matched fixed-pool baselines",
        ))
        .subcommand(experiment_command("sweep", "Cross-product parameter sweep"))
        .subcommand(
            Command::new("analyze")
                .about("Fit interevent-time tails from growth_events.csv files")
                .arg(
                    Arg::new("inputs")
                        .required(true)
                        .num_args(1..)
                        .value_parser(clap::value_parser!(PathBuf)),
                )
                .arg(
                    Arg::new("out_dir")
                        .long("out_dir")
                        .default_value("out")
                        .value_parser(clap::value_parser!(PathBuf)),
                )
                .arg(
                    Arg::new("xmin")
                        .long("xmin")
                        .default_value("scan")
                        .help("`scan` or a fixed integer"),
                ),
        )
}

fn load_experiment(m: &ArgMatches) -> Result<(Experiment, String)> {
    let mut raw = match m.get_one::<String>("manifest") {
        Some(path) => RawManifest::load(path.as_ref())?,
        None => RawManifest::default(),
    };
    for &key in KEYS {
        if let Some(v) = m.get_one::<String>(key) {
            raw.set(key, v)?;
        }
    }
    Ok((Experiment::from_raw(&raw)?, raw.render()))
}

fn report(written: &[PathBuf]) {
    for p in written {
        eprintln!("wrote {}", p.display());
    }
}

fn dispatch(matches: &ArgMatches) -> Result<()> {
    match matches.subcommand() {
        Some(("run", m)) => {
            let (exp, text) = load_experiment(m)?;
            report(&commands::run(&exp, &text)?.commit(&exp.out_dir)?);
        }
        Some(("sweep", m)) => {
            let (exp, text) = load_experiment(m)?;
            report(&commands::sweep(&exp, &text)?.commit(&exp.out_dir)?);
        }
        Some(("analyze", m)) => {
            let inputs: Vec<PathBuf> = m
                .get_many::<PathBuf>("inputs")
                .into_iter()
                .flatten()
                .cloned()
                .collect();
            let xmin = match m.get_one::<String>("xmin").map(String::as_str) {
                Some("scan") | None => XminMode::default(),
                Some(v) => XminMode::Fixed(v.parse().map_err(|e| anyhow::anyhow!("--xmin: {e}"))?),
            };
            let analysis = commands::analyze(&inputs, xmin)?;
            for w in &analysis.warnings {
                eprintln!("warning: {w}");
            }
            let out_dir = m.get_one::<PathBuf>("out_dir").expect("defaulted");
            report(&analysis.outputs.commit(out_dir)?);
        }
        _ => unreachable!("subcommand required"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(&cli().get_matches()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
