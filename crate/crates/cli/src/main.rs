use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use dq_core::algebra::{HSeries, Poly};
use dq_core::dpoly::{hkr, hochschild_delta, moyal, PolyDiffOp};
use dq_core::graphs::{enumerate, sorted_representatives, AdmissibleGraph, DEFAULT_GUARD};
use dq_core::hochschild::{center_dim, derivation_dim, hh_dim, homotopy_check, inner_derivation_dim, FinDimAlgebra};
use dq_core::mc::{gauge_act, mc_residual, star_gauge_equivalent, star_to_mc, GradedLie};
use dq_core::par::Exec;
use dq_core::report::{assoc_report, star_report, vanishing_report, Numeric, WeightReport, WeightUse};
use dq_core::star::{build_star, formality_residual, probe_basis, un_graphs, Weight, WeightSource, WeightTable};
use dq_core::tpoly::{is_poisson, PolyVector};
use dq_core::weights::{integrate_weight_with, WeightCache, WeightEstimate};
use dq_core::Error;

#[derive(Parser)]
#[command(name = "dq", version, about = "Deformation quantization toolkit: exact checks and graph weights")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    /// Weight cache file.
    #[arg(long, global = true, env = "DQ_CACHE")]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Jacobi identity of a bivector.
    PoissonCheck {
        #[arg(long)]
        pi: String,
    },
    /// Schouten–Nijenhuis bracket of two polyvectors.
    SnBracket {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Moyal product of two polynomials for a constant bivector.
    Moyal {
        #[arg(long)]
        pi: String,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// HKR image of a polyvector and its cocycle check.
    Hkr {
        #[arg(long)]
        xi: String,
    },
    /// Per-order Maurer–Cartan residuals of an ℏ-series.
    McCheck {
        #[arg(long)]
        series: String,
        #[arg(long, value_enum)]
        kind: Kind,
    },
    /// Gauge action of α on a Maurer–Cartan element.
    GaugeAct {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        element: String,
        #[arg(long, value_enum)]
        kind: Kind,
    },
    /// Whether star₂(e^α ⊗ e^α) = e^α star₁.
    StarEquiv {
        #[arg(long)]
        star1: String,
        #[arg(long)]
        star2: String,
        #[arg(long)]
        alpha: String,
    },
    /// Admissible graph enumeration and export.
    Graphs {
        #[command(subcommand)]
        cmd: GraphsCmd,
    },
    /// Monte-Carlo weight of one graph.
    Weight {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value = "1000000", value_parser = parse_count)]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Star product assembled from graph weights.
    Star {
        #[command(subcommand)]
        cmd: StarCmd,
    },
    /// Associativity residuals of the assembled star product.
    Assoc(StarArgs),
    /// Residual of the formality equation at order n.
    Formality {
        #[arg(long)]
        n: usize,
        /// Polyvector inputs, one per flag.
        #[arg(long, required = true)]
        xi: Vec<String>,
        #[arg(long, default_value_t = 1)]
        probe_degree: u32,
        #[command(flatten)]
        weights: WeightArgs,
    },
    /// Hochschild cohomology dimension of a finite-dimensional algebra.
    Hh {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        degree: usize,
        /// Also check the bar-complex contracting homotopy at this degree.
        #[arg(long)]
        homotopy: bool,
    },
    /// Integral of three angle forms over the three-point configuration space.
    Vanishing {
        /// Three edges between points 1..3, e.g. `1-2,2-3,3-1`.
        #[arg(long, default_value = "1-2,2-3,3-1")]
        edges: String,
        #[arg(long, default_value = "1000000", value_parser = parse_count)]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    /// Series of bivectors.
    Tpoly,
    /// Series of bidifferential operators.
    Dpoly,
    /// A star product `μ + ℏB₁ + …`, checked through its Maurer–Cartan element.
    Star,
}

#[derive(Subcommand)]
enum GraphsCmd {
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        nbar: usize,
        #[arg(long)]
        edges: usize,
        /// Only graphs whose stars list p-targets before q-targets, each sorted.
        #[arg(long)]
        sorted: bool,
        #[arg(long, default_value_t = DEFAULT_GUARD)]
        guard: u128,
    },
    Export {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        dot: bool,
    },
}

#[derive(Subcommand)]
enum StarCmd {
    Build(StarArgs),
    Assoc(StarArgs),
}

#[derive(Args)]
struct StarArgs {
    #[arg(long)]
    pi: String,
    #[arg(long, default_value_t = 2)]
    order: usize,
    #[arg(long, default_value_t = 3)]
    probe_degree: u32,
    #[command(flatten)]
    weights: WeightArgs,
}

#[derive(Args)]
struct WeightArgs {
    /// Weight file; takes precedence over --cache.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Samples for weights missing from the cache.
    #[arg(long, default_value = "200000", value_parser = parse_count)]
    samples: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

/// Accepts integers and exact floats such as `1e6`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 1.0 && x.fract() == 0.0 && x <= u64::MAX as f64 => Ok(x as u64),
        _ => Err(format!("expected a positive integer, got {s:?}")),
    }
}

enum Failure {
    Check,
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        #[cfg(feature = "parallel")]
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
        #[cfg(not(feature = "parallel"))]
        let _ = n;
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(report: &impl Serialize) {
    out(&format!("{}\n", serde_json::to_string_pretty(report).expect("reports serialize")));
}

/// Writes to stdout; a closed pipe is not an error.
fn out(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn check(ok: bool) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

/// Inline JSON when the argument starts with `{` or `[`, else a file path.
fn load<T: DeserializeOwned>(arg: &str) -> Result<T, Error> {
    let text = if arg.trim_start().starts_with(['{', '[']) {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Error::Parse(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{arg}: {e}")))
}

fn load_graph(arg: &str) -> Result<AdmissibleGraph, Error> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Error::Parse(format!("{arg}: {e}")))?
    };
    AdmissibleGraph::parse_json(&text)
}

fn run(cli: &Cli) -> Outcome {
    match &cli.cmd {
        Cmd::PoissonCheck { pi } => {
            let pi: PolyVector = load(pi)?;
            let ok = is_poisson(&pi)?;
            emit(&json!({ "dim": pi.dim(), "poisson": ok }));
            check(ok)
        }
        Cmd::SnBracket { a, b } => {
            let (a, b): (PolyVector, PolyVector) = (load(a)?, load(b)?);
            emit(&json!({ "bracket": a.sn_bracket(&b)? }));
            Ok(())
        }
        Cmd::Moyal { pi, f, g, order } => {
            let (pi, f, g): (PolyVector, Poly, Poly) = (load(pi)?, load(f)?, load(g)?);
            emit(&json!({ "order": order, "product": moyal(&f, &g, &pi, *order)? }));
            Ok(())
        }
        Cmd::Hkr { xi } => {
            let xi: PolyVector = load(xi)?;
            let op = hkr(&xi);
            let cocycle = hochschild_delta(&op).is_zero();
            emit(&json!({ "op": op, "cocycle": cocycle }));
            check(cocycle)
        }
        Cmd::McCheck { series, kind } => match kind {
            Kind::Tpoly => mc_check(&load::<HSeries<PolyVector>>(series)?),
            Kind::Dpoly => mc_check(&load::<HSeries<PolyDiffOp>>(series)?),
            Kind::Star => mc_check(&star_to_mc(&load(series)?)?),
        },
        Cmd::GaugeAct { alpha, element, kind } => match kind {
            Kind::Tpoly => gauge(&load::<HSeries<PolyVector>>(alpha)?, &load(element)?),
            Kind::Dpoly => gauge(&load::<HSeries<PolyDiffOp>>(alpha)?, &load(element)?),
            Kind::Star => Err(Error::Parse("--kind star: act on the Maurer–Cartan element (dpoly)".into()).into()),
        },
        Cmd::StarEquiv { star1, star2, alpha } => {
            let ok = star_gauge_equivalent(&load(star1)?, &load(star2)?, &load(alpha)?)?;
            emit(&json!({ "equivalent": ok }));
            check(ok)
        }
        Cmd::Graphs { cmd } => graphs(cmd),
        Cmd::Weight { graph, samples, seed } => {
            let g = load_graph(graph)?;
            let mut cache = open_cache(cli.cache.as_deref())?;
            let cached = cache.as_ref().and_then(|c| c.get(&g.key())).filter(|r| r.samples >= *samples);
            let e = match cached {
                Some(r) => WeightEstimate::from(r),
                None => {
                    let e = integrate_weight_with(&g, *samples, *seed, Exec::default())?;
                    if let Some(c) = cache.as_mut() {
                        c.put(g.key(), &e);
                        c.save()?;
                    }
                    e
                }
            };
            emit(&WeightReport::new(&g, &e));
            Ok(())
        }
        Cmd::Star { cmd: StarCmd::Build(a) } => {
            let pi: PolyVector = load(&a.pi)?;
            let table = resolve_weights(&star_graphs(a.order)?, cli, &a.weights)?;
            let star = build_star(&pi, a.order, &table)?;
            let report = star_report(&star, &pi, a.probe_degree)?;
            emit(&report);
            check(report.moyal.as_ref().is_none_or(|m| m.pass))
        }
        Cmd::Star { cmd: StarCmd::Assoc(a) } | Cmd::Assoc(a) => {
            let pi: PolyVector = load(&a.pi)?;
            let table = resolve_weights(&star_graphs(a.order)?, cli, &a.weights)?;
            let report = assoc_report(&build_star(&pi, a.order, &table)?, a.probe_degree)?;
            emit(&report);
            check(report.pass)
        }
        Cmd::Formality { n, xi, probe_degree, weights } => {
            let xi: Vec<PolyVector> = xi.iter().map(|x| load(x)).collect::<Result<_, _>>()?;
            let refs: Vec<&PolyVector> = xi.iter().collect();
            let graphs = if *n == 2 && xi.len() == 2 {
                let degrees = [xi[0].degree(), xi[1].degree()];
                let nbar = (degrees[0] + degrees[1]).saturating_sub(2);
                un_graphs(2, nbar, Some(&degrees))?
            } else {
                Vec::new()
            };
            let table = resolve_weights(&graphs, cli, weights)?;
            let dim = xi.first().map_or(0, PolyVector::dim);
            let r = formality_residual(*n, &refs, &probe_basis(dim, *probe_degree), &table)?;
            let uses: Vec<WeightUse> = graphs
                .iter()
                .filter_map(|g| table.weight(g).map(|w| WeightUse { graph: g.key(), weight: (&w).into() }))
                .collect();
            let pass = r.normal_form.pass && r.probes.pass;
            emit(&json!({ "report": r, "probe_degree": probe_degree, "weights": uses, "pass": pass }));
            check(pass)
        }
        Cmd::Hh { algebra, degree, homotopy } => {
            let a: FinDimAlgebra = load(algebra)?;
            let dim = hh_dim(&a, *degree)?;
            let independent = match degree {
                0 => Some(center_dim(&a)),
                1 => Some(derivation_dim(&a) - inner_derivation_dim(&a)),
                _ => None,
            };
            let homotopy = if *homotopy { Some(homotopy_check(&a, *degree)?) } else { None };
            emit(&json!({
                "algebra_dim": a.dim(),
                "degree": degree,
                "hh": Numeric::exact(dim as f64),
                "independent": independent,
                "homotopy": homotopy,
            }));
            check(independent.is_none_or(|d| d == dim) && homotopy != Some(false))
        }
        Cmd::Vanishing { edges, samples, seed } => {
            let report = vanishing_report(parse_edges(edges)?, *samples, *seed, Exec::default())?;
            emit(&report);
            check(report.pass)
        }
    }
}

fn mc_check<E: GradedLie + Serialize>(s: &HSeries<E>) -> Outcome {
    let residuals = mc_residual(s)?;
    let ok = residuals.iter().all(GradedLie::is_zero);
    emit(&json!({ "residuals": residuals, "maurer_cartan": ok }));
    check(ok)
}

fn gauge<E: GradedLie + Serialize>(alpha: &HSeries<E>, element: &HSeries<E>) -> Outcome {
    let out = gauge_act(alpha, element)?;
    let ok = mc_residual(&out)?.iter().all(GradedLie::is_zero);
    emit(&json!({ "result": out, "maurer_cartan": ok }));
    Ok(())
}

fn graphs(cmd: &GraphsCmd) -> Outcome {
    match cmd {
        GraphsCmd::Enumerate { n, nbar, edges, sorted, guard } => {
            let gs = if *sorted {
                sorted_representatives(*n, *nbar, *edges, *guard)?
            } else {
                enumerate(*n, *nbar, *edges, *guard)?
            };
            let raw: Vec<_> = gs.iter().map(AdmissibleGraph::to_raw).collect();
            emit(&json!({ "n": n, "nbar": nbar, "edges": edges, "count": gs.len(), "graphs": raw }));
        }
        GraphsCmd::Export { graph, dot } => {
            let g = load_graph(graph)?;
            if *dot {
                out(&g.export_dot());
            } else {
                emit(&json!({ "key": g.key(), "graph": g.to_raw() }));
            }
        }
    }
    Ok(())
}

fn parse_edges(s: &str) -> Result<[(usize, usize); 3], Error> {
    let bad = || Error::Parse(format!("--edges: expected three pairs like 1-2,2-3,3-1, got {s:?}"));
    let pairs: Vec<(usize, usize)> = s
        .split(',')
        .map(|p| {
            let (a, b) = p.trim().split_once('-').ok_or_else(bad)?;
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().parse().map_err(|_| bad())?;
            if a == 0 || b == 0 {
                return Err(bad());
            }
            Ok((a - 1, b - 1))
        })
        .collect::<Result<_, _>>()?;
    pairs.try_into().map_err(|_| bad())
}

fn open_cache(path: Option<&Path>) -> Result<Option<WeightCache>, Error> {
    path.map(WeightCache::open).transpose()
}

/// Monte-Carlo graphs needed for the star product through `order`.
fn star_graphs(order: usize) -> Result<Vec<AdmissibleGraph>, Error> {
    let mut out = Vec::new();
    for j in 2..=order.min(dq_core::star::MAX_STAR_ORDER) {
        out.extend(un_graphs(j, 2, Some(&vec![2; j]))?);
    }
    Ok(out)
}

/// Weights for `graphs` from the weight file or cache; missing ones are
/// estimated (graph `i` with seed `seed + i`) and written back.
fn resolve_weights(graphs: &[AdmissibleGraph], cli: &Cli, args: &WeightArgs) -> Result<WeightTable, Error> {
    let mut cache = open_cache(args.weights.as_deref().or(cli.cache.as_deref()))?;
    let mut table = WeightTable::default();
    let mut dirty = false;
    for (i, g) in graphs.iter().enumerate() {
        let w = match cache.as_ref().and_then(|c| c.get(&g.key())) {
            Some(r) => WeightEstimate::from(r),
            None => {
                let e = integrate_weight_with(g, args.samples, args.seed.wrapping_add(i as u64), Exec::default())?;
                if let Some(c) = cache.as_mut() {
                    dirty |= c.put(g.key(), &e);
                }
                e
            }
        };
        table.0.insert(g.key(), Weight::MonteCarlo(w));
    }
    if let (true, Some(c)) = (dirty, cache) {
        c.save()?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_edges_parse() {
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("250"), Ok(250));
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("0").is_ok());
        assert_eq!(parse_edges("1-2, 2-3,3-1").unwrap(), [(0, 1), (1, 2), (2, 0)]);
        assert!(parse_edges("1-2,2-3").is_err());
        assert!(parse_edges("0-1,1-2,2-0").is_err());
    }
}
