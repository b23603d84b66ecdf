//! Command-line front end: period data, graph enumeration, amplitude
//! solving with an on-disk cache, BPS tables in JSON/CSV/text, and a
//! self-verification suite against the hardcoded reference data.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::One;
use serde::Serialize;

use quintic_ehae::cache::AmplitudeCache;
use quintic_ehae::feynman::enumerate_graphs;
use quintic_ehae::geometry::{Geometry, R2Choice};
use quintic_ehae::golden;
use quintic_ehae::ring::{change_basis, Basis, RingElement};
use quintic_ehae::series::Series;
use quintic_ehae::solver::{degree_list, Solver};
use quintic_ehae::{Rat, Result};

#[derive(Parser)]
#[command(name = "qehae", version, about = "Exact open-closed amplitudes on the real quintic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Print period, mirror-map and open-potential coefficients.
    Periods {
        /// Number of z-orders to print.
        #[arg(long, default_value_t = 8)]
        order: usize,
    },
    /// Count (or list) the stable graph classes for one (g,h).
    Graphs {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        h: u32,
        /// Dump one line per class with its automorphism-factor order.
        #[arg(long)]
        list: bool,
    },
    /// Resolve the amplitude F^{(g,h)} and print its holomorphic ambiguity.
    Solve {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        h: u32,
        /// Truncation order in z.
        #[arg(long, default_value_t = 16)]
        order: usize,
        /// Cache directory (default: $QEHAE_CACHE if set).
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Allow (g,h) outside the verified range (known non-integral output).
        #[arg(long)]
        experimental: bool,
    },
    /// Emit BPS numbers n_d^{(g,h)} for g <= gmax at fixed h.
    Bps {
        #[arg(long)]
        h: u32,
        #[arg(long, default_value_t = 0)]
        gmax: u32,
        #[arg(long, default_value_t = 20)]
        dmax: i64,
        #[arg(long, default_value_t = 16)]
        order: usize,
        #[arg(long, value_enum, default_value_t = OutFormat::Text)]
        out: OutFormat,
        /// Cache directory (default: $QEHAE_CACHE if set).
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Allow (g,h) outside the verified range (known non-integral output).
        #[arg(long)]
        experimental: bool,
    },
    /// Run the reference checks; exit code 0 iff everything passes.
    Verify {
        /// Restrict to one suite: graphs, periods, appendix, residuals, tables.
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, default_value_t = 16)]
        order: usize,
        #[arg(long, default_value_t = 20)]
        dmax: i64,
    },
}

/// Guard margin between requested d-range and the truncation order.
const ORDER_GUARD: i64 = 3;

fn check_order(order: usize, dmax: i64) -> Result<()> {
    let need = dmax / 2 + ORDER_GUARD;
    if (order as i64) < need {
        return Err(quintic_ehae::Error::InsufficientTruncation {
            need2: 2 * need,
            have2: 2 * order as i64,
        });
    }
    Ok(())
}

/// (g,h) pairs the published tables cover; everything else needs --experimental.
fn in_verified_range(g: u32, h: u32) -> bool {
    h >= 1 && 2 * g + h <= 6
}

fn open_cache(dir: &Option<PathBuf>) -> Result<Option<AmplitudeCache>> {
    match dir {
        Some(d) => Ok(Some(AmplitudeCache::open(d)?)),
        None => AmplitudeCache::from_env(),
    }
}

fn series_row(s: &Series, e2_start: i64, step: i64, count: usize) -> Vec<String> {
    (0..count as i64)
        .map(|i| {
            s.coeff(e2_start + step * i, 0)
                .map(|c| c.to_string())
                .unwrap_or_else(|_| "...".into())
        })
        .collect()
}

fn cmd_periods(order: usize) -> Result<()> {
    let geom = Geometry::new(order.max(4))?;
    let n = order + 1;
    println!("omega_0:        {}", series_row(&geom.omega[0], 0, 2, n).join(", "));
    for i in 1..4 {
        // the log-free component; omega_i also carries (log z)^k, k <= i
        println!(
            "omega_{i} (holo): {}",
            series_row(&geom.omega[i].log_component(0), 0, 2, n).join(", ")
        );
    }
    println!("t - log z:      {}", series_row(&geom.t_minus_logz, 2, 2, n).join(", "));
    println!("z(q):           {}", series_row(&geom.z_of_q, 2, 2, n).join(", "));
    println!("60*tau:         {}", series_row(&geom.tcal, 1, 2, n).join(", "));
    Ok(())
}

fn cmd_graphs(g: u32, h: u32, list: bool) -> Result<()> {
    let graphs = enumerate_graphs(g, h)?;
    println!("#G({g},{h}) = {}", graphs.len());
    if list {
        for gr in &graphs {
            println!("{}  #A_G = {}", gr.dump(), gr.aut_order());
        }
    }
    Ok(())
}

fn cmd_solve(
    g: u32,
    h: u32,
    order: usize,
    cache: &Option<PathBuf>,
    experimental: bool,
) -> Result<()> {
    if !in_verified_range(g, h) && !experimental {
        return Err(quintic_ehae::Error::OutOfRange { g, h });
    }
    let mut solver = Solver::new(order, R2Choice::Zero)?;
    solver.solve_with_deps(g, h)?;
    if let Some(cache) = open_cache(cache)? {
        for ((cg, ch, cn), e) in solver.amplitudes() {
            cache.store(cg, ch, cn, &e)?;
        }
    }
    for (&(sg, sh), _) in solver.ambiguity.iter() {
        println!(
            "f^({sg},{sh}) = {}",
            solver.ambiguity_display(sg, sh).expect("recorded ambiguity")
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct BpsEntry {
    d: i64,
    n: String,
}

#[derive(Serialize)]
struct BpsTableOut {
    g: u32,
    h: u32,
    entries: Vec<BpsEntry>,
}

fn cmd_bps(
    h: u32,
    gmax: u32,
    dmax: i64,
    order: usize,
    out: OutFormat,
    cache: &Option<PathBuf>,
    experimental: bool,
) -> Result<()> {
    check_order(order, dmax)?;
    if !in_verified_range(gmax, h) && h != 0 && !experimental {
        return Err(quintic_ehae::Error::OutOfRange { g: gmax, h });
    }
    let mut solver = Solver::new(order, R2Choice::Zero)?;
    for g in 0..=gmax {
        if !quintic_ehae::solver::is_base(g, h) {
            solver.solve_with_deps(g, h)?;
        }
    }
    if let Some(cache) = open_cache(cache)? {
        for ((cg, ch, cn), e) in solver.amplitudes() {
            cache.store(cg, ch, cn, &e)?;
        }
    }
    let tables = solver.bps(h, gmax, dmax)?;
    let degrees = degree_list(h, dmax);
    let mut rendered: Vec<BpsTableOut> = Vec::new();
    let mut nonintegral = 0usize;
    for (g, table) in tables.iter().enumerate() {
        let entries: Vec<BpsEntry> = degrees
            .iter()
            .map(|&d| {
                let n = table.get(&d).cloned().unwrap_or_else(|| Rat::from_integer(0.into()));
                if !n.denom().is_one() {
                    nonintegral += 1;
                }
                BpsEntry { d, n: n.to_string() }
            })
            .collect();
        rendered.push(BpsTableOut { g: g as u32, h, entries });
    }
    match out {
        OutFormat::Json => {
            if rendered.len() == 1 {
                println!("{}", serde_json::to_string_pretty(&rendered[0]).expect("serializable"));
            } else {
                println!("{}", serde_json::to_string_pretty(&rendered).expect("serializable"));
            }
        }
        OutFormat::Csv => {
            for t in &rendered {
                if rendered.len() > 1 {
                    println!("# (g,h) = ({},{})", t.g, t.h);
                }
                println!("d,n");
                for e in &t.entries {
                    println!("{},{}", e.d, e.n);
                }
            }
        }
        OutFormat::Text => {
            for t in &rendered {
                println!("n_d^({},{}):", t.g, t.h);
                for e in &t.entries {
                    println!("  d = {:>2}: {}", e.d, e.n);
                }
            }
        }
    }
    if nonintegral > 0 {
        eprintln!("warning: {nonintegral} non-integer entries (expected outside the verified range)");
    }
    Ok(())
}

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, name: &str, started: Instant, pass: bool, detail: &str) {
        let ms = started.elapsed().as_millis();
        if pass {
            println!("PASS  {name} ({ms} ms)");
        } else {
            self.failures += 1;
            println!("FAIL  {name} ({ms} ms): {detail}");
        }
    }
}

fn verify_graphs(rep: &mut Report) -> Result<()> {
    for ((g, h), want) in golden::GRAPH_COUNTS {
        let t = Instant::now();
        let got = enumerate_graphs(g, h)?.len();
        rep.check(&format!("graph count ({g},{h})"), t, got == want, &format!("{got} != {want}"));
    }
    Ok(())
}

fn verify_periods(rep: &mut Report) -> Result<()> {
    let t = Instant::now();
    let geom = Geometry::new(8)?;
    let w0 = series_row(&geom.omega[0], 0, 2, 3);
    rep.check("omega_0 head", t, w0 == ["1", "120", "113400"], &w0.join(","));
    let t = Instant::now();
    let w1 = series_row(&geom.omega[1].log_component(0), 2, 2, 2);
    rep.check("omega_1 holomorphic head", t, w1 == ["770", "810225"], &w1.join(","));
    let t = Instant::now();
    let mm = series_row(&geom.t_minus_logz, 6, 2, 1);
    rep.check("mirror map z^3 coefficient", t, mm == ["3225308000/3"], &mm.join(","));
    let t = Instant::now();
    let zq = series_row(&geom.z_of_q, 2, 2, 3);
    rep.check("z(q) head", t, zq == ["1", "-770", "171525"], &zq.join(","));
    Ok(())
}

fn verify_appendix(rep: &mut Report, solver: &mut Solver) -> Result<()> {
    let t = Instant::now();
    solver.solve_with_deps(0, 4)?;
    let ours = solver.p_element(0, 4, 0)?;
    let printed = golden::published_p04();
    let diff = printed.sub(&ours)?;
    let erratum = RingElement::constant(Basis::J, golden::p04_rational_erratum());
    rep.check(
        "published (0,4) polynomial: generator monomials bit-exact",
        t,
        diff.sub(&erratum)?.is_zero(),
        &format!("unexpected difference with {} terms", diff.num_terms()),
    );
    let t = Instant::now();
    let f = solver.ambiguity_ratfunc(0, 4).expect("resolved");
    let expect = golden::published_f04().sub(&golden::f04_rational_erratum());
    rep.check(
        "f^(0,4) equals the condition-determined value (published value minus (9/1250)(1-3125z))",
        t,
        f.sub(&expect).is_zero(),
        &f.serialize(),
    );
    let t = Instant::now();
    let u_free = change_basis(&solver.amplitude_at(0, 4, 0)?, Basis::J)?.u_degree() == 0;
    rep.check("P^(0,4) is u-free", t, u_free, "u-dependence found");
    Ok(())
}

fn verify_residuals(rep: &mut Report, solver: &mut Solver) -> Result<()> {
    for (g, h) in [(0, 3), (1, 1), (0, 4), (1, 2), (0, 5), (1, 3), (0, 6), (1, 4)] {
        let t = Instant::now();
        solver.solve_with_deps(g, h)?;
        let res = solver.pde_residuals(g, h)?;
        let bad = res.iter().filter(|r| !r.is_zero()).count();
        rep.check(&format!("anomaly-equation residuals ({g},{h})"), t, bad == 0, &format!("{bad} nonzero"));
    }
    Ok(())
}

fn verify_tables(rep: &mut Report, solver: &mut Solver, dmax: i64) -> Result<()> {
    for ((g, h), rows) in golden::bps_tables() {
        let t = Instant::now();
        solver.solve_with_deps(g, h)?;
        let tables = solver.bps(h, g, dmax)?;
        let table = &tables[g as usize];
        let mut bad = Vec::new();
        for (d, want) in rows {
            if d > dmax {
                continue;
            }
            let got =
                table.get(&d).cloned().unwrap_or_else(|| Rat::from_integer(0.into())).to_string();
            if got != want {
                bad.push(format!("d={d}: {got} != {want}"));
            }
            if got.contains('/') {
                bad.push(format!("d={d}: non-integer {got}"));
            }
        }
        rep.check(&format!("published table n_d^({g},{h})"), t, bad.is_empty(), &bad.join("; "));
    }
    Ok(())
}

fn cmd_verify(suite: Option<String>, order: usize, dmax: i64) -> Result<ExitCode> {
    check_order(order, dmax)?;
    let mut rep = Report { failures: 0 };
    let want = |name: &str| suite.as_deref().map_or(true, |s| s == name);
    if want("graphs") {
        verify_graphs(&mut rep)?;
    }
    if want("periods") {
        verify_periods(&mut rep)?;
    }
    let heavy = ["appendix", "residuals", "tables"];
    if heavy.iter().any(|s| want(s)) {
        let mut solver = Solver::new(order.max(12), R2Choice::Zero)?;
        if want("appendix") {
            verify_appendix(&mut rep, &mut solver)?;
        }
        if want("residuals") {
            verify_residuals(&mut rep, &mut solver)?;
        }
        if want("tables") {
            verify_tables(&mut rep, &mut solver, dmax)?;
        }
    }
    println!("{}", if rep.failures == 0 { "all checks passed" } else { "FAILURES PRESENT" });
    Ok(if rep.failures == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Periods { order } => cmd_periods(order).map(|()| ExitCode::SUCCESS),
        Command::Graphs { g, h, list } => cmd_graphs(g, h, list).map(|()| ExitCode::SUCCESS),
        Command::Solve { g, h, order, cache, experimental } => {
            cmd_solve(g, h, order, &cache, experimental).map(|()| ExitCode::SUCCESS)
        }
        Command::Bps { h, gmax, dmax, order, out, cache, experimental } => {
            cmd_bps(h, gmax, dmax, order, out, &cache, experimental).map(|()| ExitCode::SUCCESS)
        }
        Command::Verify { suite, order, dmax } => cmd_verify(suite, order, dmax),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
