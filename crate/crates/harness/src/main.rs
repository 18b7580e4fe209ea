use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fdcran::config_file::{apply, parse_document, Document};
use fdcran::figures::{analytic_rows, figure_sweep, mc_rows, FigureOptions, Scale};
use fdcran::output::{emit_results, render_results, ResultRow, RowKey};
use fdcran::validate::{selftest, validate, Check};
use fdcran::{HarnessError, Result};
use fdcran_core::analytic::QuadratureSpec;
use fdcran_core::montecarlo::{truncation_bias, with_threads};
use fdcran_core::{Clustering, Duplex, NetworkConfig};

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(name = "fdcran", version = fdcran::output::BUILD_ID, about = "FD/HD cloud RAN spectral efficiency")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Analytic SE bound at one configuration.
    Analytic(Common),
    /// Monte-Carlo SE at one configuration.
    Mc(Common),
    /// All curves of one figure.
    Figure(Common),
    /// Oracle cross-check suites.
    Validate(Common),
    /// Special-function golden values.
    Selftest,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Configuration file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Figure number, 1 to 4.
    #[arg(long)]
    figure: Option<u8>,
    /// Problem size preset: desk or full.
    #[arg(long)]
    scale: Option<Scale>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo trials per point.
    #[arg(long)]
    trials: Option<usize>,
    /// Output table; a `.manifest` file is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Duplex mode: fd or hd (default: both).
    #[arg(long, value_parser = fdcran::config_file::duplex)]
    mode: Option<Duplex>,
    /// Clustering: disjoint or uc (default: both for figures).
    #[arg(long, value_parser = fdcran::config_file::clustering)]
    clustering: Option<Clustering>,
    /// Any configuration key, e.g. `--set L=5 --set noise=-104dBm`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads (overrides FDCRAN_THREADS).
    #[arg(long)]
    threads: Option<usize>,
}

/// Effective document plus which keys were given explicitly.
struct Setup {
    doc: Document,
    explicit: Vec<String>,
    threads: Option<usize>,
    mode: Option<Duplex>,
    clustering: Option<Clustering>,
}

fn load(c: &Common) -> Result<Setup> {
    let text = match &c.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| HarnessError::io(p, e))?,
        None => String::new(),
    };
    let mut doc = parse_document(&text)?;
    let mut explicit: Vec<String> =
        text.lines().filter_map(|l| l.split('#').next()?.split_once('=').map(|(k, _)| k.trim().to_string())).collect();
    for kv in &c.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| HarnessError::Config {
            line: 0,
            key: kv.clone(),
            reason: "expected KEY=VALUE".into(),
        })?;
        apply(&mut doc, k.trim(), v.trim())?;
        explicit.push(k.trim().to_string());
    }
    if let Some(m) = c.mode {
        doc.network.duplex = doc.network.duplex.with_mode(m);
    }
    if let Some(cl) = c.clustering {
        doc.network.clustering = cl;
    }
    doc.run.figure = c.figure.or(doc.run.figure);
    doc.run.scale = c.scale.or(doc.run.scale);
    doc.run.seed = c.seed.or(doc.run.seed);
    doc.run.trials = c.trials.or(doc.run.trials);
    doc.network.validate()?;

    let threads = match c.threads {
        Some(n) => Some(n),
        None => match std::env::var("FDCRAN_THREADS") {
            Ok(v) => Some(v.trim().parse().map_err(|_| HarnessError::Config {
                line: 0,
                key: "FDCRAN_THREADS".into(),
                reason: format!("expected a worker count, got `{v}`"),
            })?),
            Err(_) => None,
        },
    };
    Ok(Setup { doc, explicit, threads, mode: c.mode, clustering: c.clustering })
}

impl Setup {
    fn given(&self, key: &str) -> bool {
        self.explicit.iter().any(|k| k == key)
    }

    fn scale(&self) -> Scale {
        self.doc.run.scale.unwrap_or(Scale::Desk)
    }

    fn quadrature(&self) -> QuadratureSpec {
        let d = QuadratureSpec::default();
        QuadratureSpec::with_tol(
            self.doc.run.rel_tol.unwrap_or(self.scale().rel_tol()),
            self.doc.run.abs_tol.unwrap_or(d.abs_tol),
        )
    }

    fn modes(&self) -> Vec<Duplex> {
        match self.mode {
            Some(m) => vec![m],
            None => vec![Duplex::Fd, Duplex::Hd],
        }
    }

    /// `verb` plus the row filters, which the manifest cannot carry.
    fn command(&self, verb: &str) -> String {
        let mut cmd = verb.to_string();
        if let Some(m) = self.mode {
            cmd.push_str(if m == Duplex::Fd { " --mode fd" } else { " --mode hd" });
        }
        if let (Some(c), "figure") = (self.clustering, verb) {
            cmd.push_str(if c == Clustering::Disjoint { " --clustering disjoint" } else { " --clustering uc" });
        }
        cmd
    }
}

fn finish(rows: Vec<ResultRow>, setup: &Setup, out: Option<&PathBuf>, verb: &str) -> Result<()> {
    let modes = setup.modes();
    let rows: Vec<ResultRow> = rows.into_iter().filter(|r| modes.contains(&r.duplex)).collect();
    match out {
        Some(path) => {
            emit_results(&rows, path, &setup.command(verb), &setup.doc)?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => print!("{}", render_results(&rows)?),
    }
    Ok(())
}

fn note_truncation(cfg: &NetworkConfig) {
    if let Ok(b) = truncation_bias(cfg) {
        eprintln!(
            "region {} km: interference beyond it <= {:.3e} W, {:.3}% of the in-region mean",
            cfg.region_radius,
            b.neglected,
            100.0 * b.ratio()
        );
    }
}

fn point(c: &Common, analytic: bool) -> Result<()> {
    let mut setup = load(c)?;
    let quad = setup.quadrature();
    let seed = setup.doc.run.seed.unwrap_or(DEFAULT_SEED);
    let trials = setup.doc.run.trials.unwrap_or(setup.scale().trials());
    if analytic {
        setup.doc.run.rel_tol = Some(quad.rel_tol);
        setup.doc.run.abs_tol = Some(quad.abs_tol);
    } else {
        setup.doc.run.seed = Some(seed);
        setup.doc.run.trials = Some(trials);
    }
    let cfg = setup.doc.network.clone();
    if !analytic {
        note_truncation(&cfg);
    }
    let threads = setup.threads;
    let rows = with_threads(threads, || -> Result<Vec<ResultRow>> {
        if analytic {
            analytic_rows(&cfg, RowKey::default(), &quad)
        } else {
            mc_rows(&cfg, RowKey::default(), trials, seed)
        }
    })??;
    finish(rows, &setup, c.out.as_ref(), if analytic { "analytic" } else { "mc" })
}

fn figure(c: &Common) -> Result<()> {
    let mut setup = load(c)?;
    let id = setup.doc.run.figure.ok_or_else(|| HarnessError::Config {
        line: 0,
        key: "figure".into(),
        reason: "`figure` needs --figure N or a `figure` key".into(),
    })?;
    let scale = setup.scale();
    let mut opts = FigureOptions::new(scale, setup.doc.run.seed.unwrap_or(DEFAULT_SEED));
    opts.trials = setup.doc.run.trials;
    opts.rel_tol = setup.doc.run.rel_tol;
    opts.abs_tol = setup.doc.run.abs_tol;
    opts.threads = setup.threads;
    if let Some(c) = setup.clustering {
        opts.clusterings = vec![c];
    }
    if setup.given("region") {
        opts.region_km = Some(setup.doc.network.region_radius);
    }
    let rows = figure_sweep(id, &setup.doc.network, &opts)?;

    // Record the effective settings so the manifest reruns this table.
    setup.doc.network.region_radius = opts.region_km.unwrap_or(scale.region_km());
    setup.doc.run.scale = Some(scale);
    if opts.mc {
        note_truncation(&setup.doc.network);
    }
    setup.doc.run.seed = Some(opts.seed);
    setup.doc.run.trials = Some(opts.trial_count());
    setup.doc.run.rel_tol = Some(opts.quadrature().rel_tol);
    setup.doc.run.abs_tol = Some(opts.quadrature().abs_tol);
    finish(rows, &setup, c.out.as_ref(), "figure")
}

fn report(checks: &[Check]) -> bool {
    for c in checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", checks.len());
    failed == 0
}

fn run(cli: Cli) -> Result<bool> {
    match cli.verb {
        Verb::Analytic(c) => point(&c, true).map(|_| true),
        Verb::Mc(c) => point(&c, false).map(|_| true),
        Verb::Figure(c) => figure(&c).map(|_| true),
        Verb::Validate(c) => {
            let setup = load(&c)?;
            let quad = setup.quadrature();
            Ok(report(&with_threads(setup.threads, || validate(&quad))?))
        }
        Verb::Selftest => Ok(report(&selftest())),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
