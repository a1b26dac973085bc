//! `pensionlab`: projections, sweeps and the reference reproduction from the
//! command line.
//!
//! Exit codes: 0 success, 1 engine or I/O failure, 2 invalid flags or input.

mod inputs;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use pensionlab_core::reference::reproduce;
use pensionlab_core::{
    project, run_sweep, CompoundingConvention, EngineError, ProjectionRequest, ProjectionResult,
    SweepSpec, SweepTable, SweptParameter,
};
use pensionlab_service::{ErrorBody, ServiceConfig};

use inputs::{ProfileFlags, SchemeArg};

#[derive(Debug, Parser)]
#[command(
    name = "pensionlab",
    version,
    about = "OPS and NPS pension projections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Project one scheme's pension
    Project {
        /// Scheme to project [default: nps, or the request file's]
        #[arg(long, value_enum)]
        scheme: Option<SchemeArg>,
        /// Base projection request (JSON); flags override its fields
        #[arg(long, value_name = "FILE")]
        request: Option<PathBuf>,
        /// Print the result as JSON
        #[arg(long)]
        json: bool,
        /// Call a running service instead of the in-process engine
        #[arg(long, value_name = "URL")]
        remote: Option<String>,
        #[command(flatten)]
        flags: ProfileFlags,
    },
    /// Sweep one parameter over a grid
    Sweep {
        /// annuity-share, employer-rate, lifecycle or expected-return
        #[arg(long)]
        param: Option<SweptParameter>,
        /// Comma-separated ascending grid: percents, or fund names for lifecycle
        #[arg(long)]
        grid: Option<String>,
        /// Base sweep spec (JSON); flags override its fields
        #[arg(long, value_name = "FILE")]
        request: Option<PathBuf>,
        /// Write CSV to PATH (`-` for stdout)
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        /// Print the table as JSON
        #[arg(long)]
        json: bool,
        #[arg(long, value_name = "URL")]
        remote: Option<String>,
        #[command(flatten)]
        flags: ProfileFlags,
    },
    /// Write the reference tables and a pass/fail summary to a directory
    ReproducePaper {
        #[arg(long, value_name = "DIR", default_value = "reproduction")]
        out: PathBuf,
        /// Convention for the exported tables
        #[arg(long, default_value = "nominal-monthly+due")]
        convention: CompoundingConvention,
    },
    /// Run the HTTP service (PENSIONLAB_ADDR, PENSIONLAB_DATA)
    Serve {
        /// Bind address, overrides PENSIONLAB_ADDR
        #[arg(long)]
        addr: Option<std::net::SocketAddr>,
        /// Scenario file, overrides PENSIONLAB_DATA
        #[arg(long)]
        data: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    fn usage(e: impl Into<anyhow::Error>) -> Self {
        Failure::Usage(e.into())
    }

    fn runtime(e: impl Into<anyhow::Error>) -> Self {
        Failure::Runtime(e.into())
    }

    fn engine(e: EngineError) -> Self {
        if e.is_validation() {
            Failure::Usage(e.into())
        } else {
            Failure::Runtime(e.into())
        }
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Project {
            scheme,
            request,
            json,
            remote,
            flags,
        } => cmd_project(scheme, request.as_deref(), json, remote.as_deref(), &flags),
        Command::Sweep {
            param,
            grid,
            request,
            csv,
            json,
            remote,
            flags,
        } => cmd_sweep(
            param,
            grid.as_deref(),
            request.as_deref(),
            csv.as_deref(),
            json,
            remote.as_deref(),
            &flags,
        ),
        Command::ReproducePaper { out, convention } => cmd_reproduce(&out, convention),
        Command::Serve { addr, data } => cmd_serve(addr, data),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn cmd_project(
    scheme: Option<SchemeArg>,
    request: Option<&Path>,
    json: bool,
    remote: Option<&str>,
    flags: &ProfileFlags,
) -> CmdResult {
    let base = request
        .map(inputs::read_json::<ProjectionRequest>)
        .transpose()
        .map_err(Failure::usage)?;
    let req = inputs::projection_request(base, scheme, flags).map_err(Failure::usage)?;
    let result: ProjectionResult = match remote {
        Some(url) => remote_post(url, "project", &req)?
            .json()
            .context("decoding service response")
            .map_err(Failure::runtime)?,
        None => project(&req).map_err(Failure::engine)?,
    };
    if json {
        println!("{}", output::to_json(&result));
    } else {
        print!("{}", output::projection_table(&result));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(
    param: Option<SweptParameter>,
    grid: Option<&str>,
    request: Option<&Path>,
    csv: Option<&Path>,
    json: bool,
    remote: Option<&str>,
    flags: &ProfileFlags,
) -> CmdResult {
    let base = request
        .map(inputs::read_json::<SweepSpec>)
        .transpose()
        .map_err(Failure::usage)?;
    let spec = inputs::sweep_spec(base, param, grid, flags).map_err(Failure::usage)?;
    let table: SweepTable = match remote {
        Some(url) => remote_post(url, "sweep", &spec)?
            .json()
            .context("decoding service response")
            .map_err(Failure::runtime)?,
        None => run_sweep(&spec),
    };
    if let Some(path) = csv {
        let text = table.to_csv();
        if path == Path::new("-") {
            print!("{text}");
        } else {
            fs::write(path, text)
                .with_context(|| format!("writing {}", path.display()))
                .map_err(Failure::runtime)?;
        }
    }
    if json {
        println!("{}", output::to_json(&table));
    } else if csv.is_none_or(|p| p != Path::new("-")) {
        print!("{}", output::sweep_table(&table));
    }
    let failed: Vec<_> = table
        .rows
        .iter()
        .filter_map(|r| r.error.as_ref().map(|e| (&r.value, e)))
        .collect();
    for (value, e) in &failed {
        eprintln!("row {value}: {}", e.message);
    }
    Ok(match failed.iter().any(|(_, e)| !e.validation) {
        true => ExitCode::from(1),
        false if !failed.is_empty() => ExitCode::from(2),
        false => ExitCode::SUCCESS,
    })
}

fn remote_post<T: serde::Serialize>(
    base: &str,
    endpoint: &str,
    body: &T,
) -> Result<reqwest::blocking::Response, Failure> {
    let url = format!("{}/api/v1/{endpoint}", base.trim_end_matches('/'));
    let resp = reqwest::blocking::Client::new()
        .post(&url)
        .json(body)
        .send()
        .with_context(|| format!("POST {url}"))
        .map_err(Failure::runtime)?;
    let status = resp.status();
    if status.is_success() {
        return Ok(resp);
    }
    let message = match resp.json::<ErrorBody>() {
        Ok(b) => b.message,
        Err(_) => status.to_string(),
    };
    let err = anyhow!("service answered {status}: {message}");
    Err(if status == reqwest::StatusCode::BAD_REQUEST {
        Failure::Usage(err)
    } else {
        Failure::Runtime(err)
    })
}

fn cmd_reproduce(out: &Path, convention: CompoundingConvention) -> CmdResult {
    let report = reproduce(convention).map_err(Failure::engine)?;
    let write = |name: &str, contents: &str| -> Result<(), Failure> {
        let path = out.join(name);
        fs::write(&path, contents)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::runtime)
    };
    fs::create_dir_all(out)
        .with_context(|| format!("creating {}", out.display()))
        .map_err(Failure::runtime)?;
    let t = &report.tables;
    write("lifecycle_funds.csv", &t.lifecycle.to_csv())?;
    write("annuity_share.csv", &t.annuity_share.to_csv())?;
    for (share, table) in &t.employer_rate {
        let pct = output::share_percent_label(share);
        write(&format!("employer_rate_share{pct}.csv"), &table.to_csv())?;
    }
    write("comparison.json", &(output::to_json(&t.comparison) + "\n"))?;
    let summary = report.summary();
    write("summary.txt", &summary)?;
    print!("{summary}");
    if report.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        for c in report.failures() {
            eprintln!("failed: {c}");
        }
        Ok(ExitCode::from(1))
    }
}

fn cmd_serve(addr: Option<std::net::SocketAddr>, data: Option<PathBuf>) -> CmdResult {
    let mut config = ServiceConfig::from_env().map_err(|e| Failure::usage(anyhow!(e)))?;
    if let Some(a) = addr {
        config.addr = a;
    }
    if let Some(d) = data {
        config.data_path = d;
    }
    let rt = tokio::runtime::Runtime::new().map_err(Failure::runtime)?;
    rt.block_on(pensionlab_service::run(config))
        .map_err(|e| Failure::runtime(anyhow!(e)))?;
    Ok(ExitCode::SUCCESS)
}
