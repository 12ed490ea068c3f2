//! Batch driver: read a run configuration, execute
//! lift → admissibility → deformation checks → optional gauge integration,
//! and emit a machine-readable JSON report.
//!
//! Exit codes: 0 all requested verdicts pass; 2 configuration or input
//! errors; 3 geometry assumption violations; 4 numerical certification
//! failures.

mod config;
mod run;

use config::RunConfig;

struct Args {
    config_path: String,
    overrides: Vec<String>,
    report_path: Option<String>,
    quiet: bool,
}

fn parse_args() -> Result<Args, String> {
    let mut config_path = None;
    let mut overrides = Vec::new();
    let mut report_path = None;
    let mut quiet = false;
    let mut it = std::env::args().skip(1);
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--config" => {
                config_path = Some(it.next().ok_or("--config needs a path")?);
            }
            "--override" => {
                overrides.push(it.next().ok_or("--override needs KEY=VALUE")?);
            }
            "--report" => {
                report_path = Some(it.next().ok_or("--report needs a path")?);
            }
            "--quiet" => quiet = true,
            "--help" | "-h" => {
                println!(
                    "usage: deforma --config PATH [--override KEY=VALUE]... [--report PATH] [--quiet]"
                );
                std::process::exit(0);
            }
            other => return Err(format!("unknown argument `{other}`")),
        }
    }
    Ok(Args {
        config_path: config_path.ok_or("--config PATH is required")?,
        overrides,
        report_path,
        quiet,
    })
}

fn main() {
    let args = match parse_args() {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    };
    let text = match std::fs::read_to_string(&args.config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read config `{}`: {e}", args.config_path);
            std::process::exit(2);
        }
    };
    let mut config = match RunConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    };
    for ov in &args.overrides {
        if let Err(e) = config.apply_override(ov) {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
    if let Some(p) = args.report_path {
        config.report_path = Some(p);
    }

    match run::run(&config) {
        Ok((report, exit)) => {
            let json = serde_json::to_string_pretty(&report).expect("report serialises");
            if let Some(path) = &config.report_path {
                if let Err(e) = std::fs::write(path, &json) {
                    eprintln!("error: cannot write report `{path}`: {e}");
                    std::process::exit(2);
                }
            }
            if !args.quiet {
                println!("{json}");
                for (name, pass) in &report.report.verdicts {
                    eprintln!("{}: {}", name, if *pass { "pass" } else { "FAIL" });
                }
                if let Some(t) = &report.report.triviality {
                    eprintln!("deformation: {t}");
                }
                for note in &report.report.notes {
                    eprintln!("note: {note}");
                }
            }
            std::process::exit(exit);
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}
