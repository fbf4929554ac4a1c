use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rta_ofdma::sweep::ResolvedConfig;
use rta_ofdma::trace::write_trace;
use rta_ofdma::{dump_trace, parse_arrivals, run_sweep, Cli, CliError, Command, Settings, SweepArgs, TraceArgs};

fn open_out(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let spec = args.to_spec()?;
    let base = &spec.base;
    for w in base.warnings() {
        eprintln!("warning: {w}");
    }
    eprintln!(
        "resolved config ({} = {:?}, {} replications): {}",
        spec.axis.name(),
        spec.values,
        spec.replications,
        serde_json::to_string(&ResolvedConfig::from(base))?
    );
    let csv_path = args
        .out
        .clone()
        .or_else(|| args.out_dir.as_ref().map(|d| d.join("sweep.csv")));
    let json_path = args
        .json
        .clone()
        .or_else(|| args.out_dir.as_ref().map(|d| d.join("sweep.json")));
    let mut csv = open_out(csv_path.as_ref())?;
    let summary = run_sweep(&spec, &mut csv)?;
    if let Some(path) = json_path {
        let mut out = open_out(Some(&path))?;
        serde_json::to_writer_pretty(&mut out, &summary)?;
        writeln!(out)?;
        out.flush()?;
    }
    if summary.rows.iter().any(|r| r.hit_slot_cap) {
        eprintln!("warning: some replications stopped at --max-slots before reaching --stop-value");
    }
    Ok(())
}

fn trace(args: &TraceArgs) -> Result<(), CliError> {
    let settings = Settings::from_scenario(&args.scenario)?;
    for values in [&settings.stations, &settings.lambda, &settings.f_ra] {
        if values.as_ref().is_some_and(|v| v.len() > 1) {
            return Err(CliError::usage("trace takes single values only"));
        }
    }
    let config = settings
        .base_config()
        .validate()
        .map_err(|e| CliError::usage(e.to_string()))?;
    let text = fs::read_to_string(&args.arrivals)
        .map_err(|e| CliError::usage(format!("cannot read arrivals {}: {e}", args.arrivals.display())))?;
    let script = parse_arrivals(&text)?;
    let records = dump_trace(config, script, args.horizon)?;
    let mut out = open_out(args.out.as_ref())?;
    write_trace(&records, &mut out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Sweep(args) => sweep(args),
        Command::Trace(args) => trace(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rta-ofdma: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
