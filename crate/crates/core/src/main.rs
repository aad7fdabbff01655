use std::fmt::Write as _;
use std::io::Read as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use scl_hodge::complex::dual::DualComplex;
use scl_hodge::complex::homology::betti_numbers;
use scl_hodge::complex::io::{parse_complex, parse_cycle, write_complex};
use scl_hodge::complex::{star_bound, OrientedComplex};
use scl_hodge::geometry::{check_g_eps, net_predicates, torus_mesh, Chart, MetricData, NetParameters, TorusMesh};
use scl_hodge::growth::{decay_curve, growth_rate, DecayConstants, VectorNorm};
use scl_hodge::isoperimetry::{
    fill_norm, fill_norm_dual, graph_diameter, rectangle, trace_polygon, CellWeights, FillCertificate, LpMode,
    TheoremAVerifier, COEXACT_TOL, HARMONIC_TOL, STEP_TOL,
};
use scl_hodge::norms::compare_constants;
use scl_hodge::whitney::{Mode, WhitneyOptions, WhitneyStructure, RANK_TOL};

#[derive(Parser)]
#[command(name = "scl-hodge", version, about = "Discrete Hodge theory and filling norm reports")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Complex file; `-` or absent reads standard input.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Use a generated flat torus with this many cells per side instead of an input file.
    #[arg(long, global = true)]
    torus: Option<usize>,
    /// Dimension of the generated torus.
    #[arg(long, global = true, default_value_t = 2)]
    dim: usize,
    /// Lattice spacing of the generated torus (default: unit side).
    #[arg(long, global = true)]
    spacing: Option<f64>,
    #[arg(long, global = true, default_value_t = 4)]
    quad_order: usize,
    #[arg(long, global = true, default_value = "standard")]
    mode: Mode,
    #[arg(long, global = true, default_value = "float")]
    lp: LpMode,
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Directory for the report file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a flat torus triangulation.
    Mesh,
    /// Smallest positive coexact eigenvalues.
    Spectrum {
        #[arg(long, default_value_t = 1)]
        degree: usize,
        #[arg(long, default_value_t = 4)]
        nev: usize,
    },
    /// Betti numbers and Hodge decomposition dimensions.
    Hodge,
    /// Sampled norm comparison constants.
    Norms {
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Filling norm of a cycle.
    Fill {
        #[arg(long)]
        cycle: PathBuf,
    },
    /// Upper bound on scl as four times the filling norm.
    Scl {
        #[arg(long)]
        cycle: PathBuf,
    },
    /// Inequality chain for random rectangle cycles on a 3-torus.
    VerifyA {
        #[arg(long, default_value_t = 10)]
        cycles: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Rectangle side as a fraction of the torus side.
        #[arg(long, default_value_t = 0.5)]
        rect: f64,
    },
    /// Vertex graph diameter and volume.
    Diameter,
    /// Growth of iterates of the symplectic action, or the decay curve.
    Growth {
        #[arg(long, default_value = "1,0,0,0")]
        class: String,
        #[arg(long, default_value_t = 40)]
        n: u32,
        #[arg(long, default_value = "l2")]
        norm: String,
        /// Emit the decay bound table instead.
        #[arg(long)]
        decay: bool,
        #[arg(long = "D", default_value_t = 1.0)]
        d: f64,
        #[arg(long, default_value_t = 1.0)]
        length_bound: f64,
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
        #[arg(long = "K", default_value_t = 1.0)]
        k: f64,
    },
    /// Edge-length certification and, for generated tori, net predicates.
    Certify {
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
    },
}

struct Source {
    complex: OrientedComplex,
    metric: MetricData,
    torus: Option<TorusMesh>,
    digest: String,
}

fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn load(c: &Common) -> anyhow::Result<Source> {
    if let Some(n) = c.torus {
        let h = c.spacing.unwrap_or(1.0 / n as f64);
        let t = torus_mesh(n, c.dim, h)?;
        let text = write_complex(&t.complex, &t.metric).unwrap_or_else(|_| format!("torus {n} {} {h:?}", c.dim));
        return Ok(Source {
            complex: t.complex.clone(),
            metric: t.metric.clone(),
            digest: digest(text.as_bytes()),
            torus: Some(t),
        });
    }
    let text = match &c.input {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?
        }
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
            s
        }
    };
    let (complex, metric) = parse_complex(&text)?;
    Ok(Source { complex, metric, torus: None, digest: digest(text.as_bytes()) })
}

fn header(c: &Common, command: &str, input_digest: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# scl-hodge {} {command}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "# input sha256 {input_digest}");
    let _ = writeln!(s, "# seed {}", c.seed);
    let _ = writeln!(s, "# quad-order {} mode {} lp {}", c.quad_order, c.mode, c.lp);
    let _ = writeln!(
        s,
        "# tolerances rank {RANK_TOL:e} step {STEP_TOL:e} harmonic {HARMONIC_TOL:e} coexact {COEXACT_TOL:e}"
    );
    s
}

fn whitney(c: &Common, src: &Source) -> anyhow::Result<WhitneyStructure> {
    let opts = WhitneyOptions { order: c.quad_order, mode: c.mode, ..Default::default() };
    Ok(WhitneyStructure::assemble(&src.complex, &src.metric, opts)?)
}

fn e(x: f64) -> String {
    format!("{x:.16e}")
}

fn fill_rows(s: &mut String, kind: &str, cert: &FillCertificate) {
    let exact = cert.exact_value.as_ref().map_or("-".to_string(), |v| v.to_string());
    let _ = writeln!(s, "cycle\tmode\tfill\texact\tscl_upper\tresidual\tgap\tdual_infeasibility");
    let _ = writeln!(
        s,
        "{kind}\t{}\t{}\t{exact}\t{}\t{}\t{}\t{}",
        cert.mode,
        e(cert.value),
        e(4.0 * cert.value),
        e(cert.boundary_residual),
        e(cert.duality_gap),
        e(cert.dual_infeasibility)
    );
    let _ = writeln!(s, "cell\tcoefficient");
    for (i, v) in cert.chain.coeffs.iter().enumerate() {
        if *v != 0.0 {
            let _ = writeln!(s, "{i}\t{}", e(*v));
        }
    }
}

fn parse_class(s: &str) -> anyhow::Result<[i64; 4]> {
    let v: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| scl_hodge::Error::InvalidArgument(format!("cannot parse class {s:?}")))?;
    v.try_into()
        .map_err(|_| scl_hodge::Error::InvalidArgument("class needs four integers".into()).into())
}

fn run(cli: &Cli) -> anyhow::Result<(String, &'static str)> {
    let c = &cli.common;
    let mut s = String::new();
    let ext = match &cli.command {
        Command::Mesh => {
            let Some(n) = c.torus else {
                bail!(scl_hodge::Error::InvalidArgument("mesh needs --torus N".into()));
            };
            let src = load(c)?;
            let _ = writeln!(s, "# flat torus n {n} dim {} side {}", c.dim, e(src.torus.as_ref().unwrap().side()));
            s.push_str(&write_complex(&src.complex, &src.metric)?);
            return Ok((s, "mesh.txt"));
        }
        Command::Spectrum { degree, nev } => {
            let src = load(c)?;
            let w = whitney(c, &src)?;
            let sp = w.coexact_spectrum(*degree, *nev)?;
            s.push_str(&header(c, "spectrum", &src.digest));
            let _ = writeln!(s, "# solver {}", sp.path);
            let _ = writeln!(s, "degree\tindex\teigenvalue\tresidual");
            for (i, p) in sp.pairs.iter().enumerate() {
                let _ = writeln!(s, "{degree}\t{i}\t{}\t{}", e(p.value), e(p.residual));
            }
            "spectrum.tsv"
        }
        Command::Hodge => {
            let src = load(c)?;
            let w = whitney(c, &src)?;
            let betti = betti_numbers(&src.complex);
            s.push_str(&header(c, "hodge", &src.digest));
            let _ = writeln!(s, "degree\tcells\tbetti\tharmonic\texact\tcoexact");
            for (deg, b) in betti.iter().enumerate() {
                let [h, ex, co] = w.hodge_dims(deg)?;
                let _ = writeln!(s, "{deg}\t{}\t{b}\t{h}\t{ex}\t{co}", src.complex.count(deg));
            }
            "hodge.tsv"
        }
        Command::Norms { samples } => {
            let src = load(c)?;
            let w = whitney(c, &src)?;
            let reps = compare_constants(&src.digest[..12], &src.complex, &w, *samples, c.seed)?;
            s.push_str(&header(c, "norms", &src.digest));
            let _ = writeln!(s, "pair\tdegree\tsamples\tmax_ratio\tconstant");
            for r in reps {
                let _ = writeln!(s, "{}\t{}\t{}\t{}\t{}", r.pair, r.degree, r.samples, e(r.max_ratio), e(r.constant));
            }
            "norms.tsv"
        }
        Command::Fill { cycle } | Command::Scl { cycle } => {
            let scl = matches!(cli.command, Command::Scl { .. });
            let src = load(c)?;
            let text = std::fs::read_to_string(cycle).with_context(|| format!("reading {}", cycle.display()))?;
            let cf = parse_cycle(&text, &src.complex)?;
            let mut d = digest(src.digest.as_bytes());
            d.push_str(&digest(text.as_bytes())[..16]);
            s.push_str(&header(c, if scl { "scl" } else { "fill" }, &d));
            if cf.primal.is_none() && cf.dual.is_none() {
                bail!(scl_hodge::Error::InvalidArgument("cycle file is empty".into()));
            }
            if let Some(z) = &cf.primal {
                let cert = fill_norm(&src.complex, z, c.lp)?;
                fill_rows(&mut s, "primal", &cert);
            }
            if let Some(z) = &cf.dual {
                let dual = DualComplex::new(&src.complex)?;
                let cert = fill_norm_dual(&dual, z, CellWeights::Fan, c.lp)?;
                fill_rows(&mut s, "dual", &cert);
            }
            if scl {
                "scl.tsv"
            } else {
                "fill.tsv"
            }
        }
        Command::VerifyA { cycles, samples, rect } => {
            let src = load(c)?;
            let Some(t) = &src.torus else {
                bail!(scl_hodge::Error::InvalidArgument("verify-a needs a generated torus (--torus N --dim 3)".into()));
            };
            let w = whitney(c, &src)?;
            let dual = DualComplex::new(&src.complex)?;
            let v = TheoremAVerifier::new(&src.complex, &w, &dual, *samples, c.seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            let planes = [(0usize, 1usize), (1, 2), (0, 2)];
            s.push_str(&header(c, "verify-a", &src.digest));
            let mut steps = String::new();
            let _ = writeln!(steps, "cycle\tstep\tlhs\trhs\tholds");
            let _ = writeln!(s, "cycle\tplane\tword_length\tfill\tscl_upper\tlambda_w\tb_hat\td_hat\tn\tl_hat\ta_hat\tbound\tslack\tall_hold");
            let mut a_hats = Vec::new();
            for i in 0..*cycles {
                let (p, q) = planes[rng.random_range(0..planes.len())];
                let origin: Vec<f64> = (0..t.d).map(|_| rng.random_range(0.0..t.side())).collect();
                let side = rect * t.side();
                let path = trace_polygon(t, &dual, &rectangle(&origin, p, q, side, side))?;
                let r = v.verify(&path)?;
                let k = &r.constants;
                let _ = writeln!(
                    s,
                    "{i}\t{p}{q}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    r.word_length,
                    e(r.fill),
                    e(r.scl_upper),
                    e(k.lambda_w),
                    e(k.b_hat),
                    e(k.d_hat),
                    k.n_star,
                    e(k.l_hat),
                    e(r.a_hat),
                    e(r.bound_constant),
                    e(r.slack),
                    r.all_hold
                );
                for st in &r.steps {
                    let _ = writeln!(steps, "{i}\t{}\t{}\t{}\t{}", st.name, e(st.lhs), e(st.rhs), st.holds);
                }
                a_hats.push(r.a_hat);
            }
            let lo = a_hats.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = a_hats.iter().copied().fold(0.0, f64::max);
            let _ = writeln!(s, "# a_hat min {} max {} variation {}", e(lo), e(hi), e((hi - lo) / lo));
            s.push_str(&steps);
            "verify-a.tsv"
        }
        Command::Diameter => {
            let src = load(c)?;
            let r = graph_diameter(&src.complex, &src.metric)?;
            s.push_str(&header(c, "diameter", &src.digest));
            let _ = writeln!(s, "combinatorial\tweighted\tvolume\tb0_hat");
            let _ = writeln!(s, "{}\t{}\t{}\t{}", r.combinatorial, e(r.weighted), e(r.volume), e(r.b0_hat));
            "diameter.tsv"
        }
        Command::Growth { class, n, norm, decay, d, length_bound, c: slope, k } => {
            if *decay {
                let consts = DecayConstants { d: *d, length_bound: *length_bound, volume_slope: *slope, k: *k };
                let curve = decay_curve(1..=*n, consts)?;
                s.push_str(&header(c, "growth --decay", &digest(format!("{consts:?}").as_bytes())));
                s.push_str(&curve.to_csv());
                return Ok((s, "decay.csv"));
            }
            let a = parse_class(class)?;
            let which = match norm.as_str() {
                "l1" => VectorNorm::L1,
                "l2" => VectorNorm::L2,
                "linf" => VectorNorm::LInf,
                other => bail!(scl_hodge::Error::InvalidArgument(format!("unknown norm {other:?}"))),
            };
            let r = growth_rate(&a, *n, which)?;
            s.push_str(&header(c, "growth", &digest(class.as_bytes())));
            let _ = writeln!(s, "# norm {norm} (stable norm proxy)");
            let _ = writeln!(s, "# fitted log rate {} limit error {}", e(r.fitted_rate), e(r.limit_error));
            let _ = writeln!(s, "n,norm,ratio");
            for (i, nv) in r.norms.iter().enumerate().skip(1) {
                let _ = writeln!(s, "{i},{},{}", e(*nv), e(r.ratios[i - 1]));
            }
            "growth.csv"
        }
        Command::Certify { eps, mu } => {
            let src = load(c)?;
            let g = check_g_eps(&src.complex, &src.metric, *eps)?;
            s.push_str(&header(c, "certify", &src.digest));
            let _ = writeln!(s, "psi_one\t{}", e(g.psi_one));
            let _ = writeln!(s, "eps0\t{}", e(g.eps0));
            let _ = writeln!(s, "edge_interval\t{}\t{}", e(g.interval.0), e(g.interval.1));
            let _ = writeln!(s, "edge_violations\t{}", g.violations.len());
            let _ = writeln!(s, "g_eps\t{}", g.pass);
            let _ = writeln!(s, "star_bound\t{}", star_bound(&src.complex));
            let _ = writeln!(s, "closed_pseudomanifold\t{}", src.complex.is_closed_pseudomanifold());
            let _ = writeln!(s, "oriented\t{}", src.complex.orientation().is_some());
            if let Some(t) = &src.torus {
                let pts: Vec<DVector<f64>> = (0..t.complex.count(0))
                    .map(|v| DVector::from_iterator(t.d, t.vertex_lattice(v).iter().map(|x| *x as f64 * t.spacing)))
                    .collect();
                let probes: Vec<DVector<f64>> = (0..t.complex.count(t.d))
                    .map(|top| {
                        let cs = t.top_coordinates(top);
                        let m = cs.len() as f64;
                        DVector::from_iterator(t.d, (0..t.d).map(|i| cs.iter().map(|p| p[i]).sum::<f64>() / m))
                    })
                    .collect();
                let net = net_predicates(Chart::FlatTorus { side: t.side() }, &pts, &probes, NetParameters::new(*mu, *eps)?)?;
                let _ = writeln!(s, "net_dense\t{}", net.dense);
                let _ = writeln!(s, "net_separated\t{}", net.separated);
                let _ = writeln!(s, "covering_radius\t{}", e(net.covering_radius));
                let _ = writeln!(s, "min_separation\t{}", e(net.min_separation));
            }
            for (edge, len) in g.violations.iter().take(20) {
                let _ = writeln!(s, "violation\t{edge}\t{}", e(*len));
            }
            "certify.tsv"
        }
    };
    Ok((s, ext))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<scl_hodge::Error>() {
        Some(e) if !e.is_validation() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.common.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(3);
        }
    };
    let result = pool.install(|| run(&cli)).and_then(|(text, name)| match &cli.common.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(name);
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
