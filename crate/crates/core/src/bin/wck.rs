use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wck::calkin::{CalkinElement, Evaluator, Window};
use wck::cycle::demo_report;
use wck::fock::FockRep;
use wck::graph::{Graph, XiChoice};
use wck::ideals::{
    enumerate_families, hereditary_saturated, simplicity_verdict, unweighted_simplicity, verify_fully_invariant,
    DEFAULT_MAX_CANDIDATES,
};
use wck::manifest::{RunManifest, Settings};
use wck::tower::Tower;
use wck::weights::WeightSpec;
use wck::{Error, Result};

#[derive(Parser)]
#[command(name = "wck", version, about = "Weighted graph algebra structure tools")]
struct Cli {
    /// Tolerances `norm[,rank]` (overrides WCK_TOL).
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Sampling seed (overrides WCK_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Emit JSON; to stdout, or to the given file.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "-")]
    json: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Graph checks.
    Graph {
        #[command(subcommand)]
        cmd: GraphCmd,
    },
    /// List the paths of one length.
    Paths {
        graph: PathBuf,
        #[arg(long, default_value_t = 2)]
        len: usize,
    },
    /// Weight checks.
    Weights {
        #[command(subcommand)]
        cmd: WeightsCmd,
    },
    /// Truncated Fock representation checks.
    Fock {
        #[command(subcommand)]
        cmd: FockCmd,
    },
    /// Build the stage algebras and the Bratteli diagram.
    Tower {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 2)]
        stages: usize,
        #[arg(long, value_enum, default_value_t = Xi::Min)]
        xi: Xi,
        /// Write the diagram in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Enumerate the lattice of ideal families.
    Ideals {
        #[command(flatten)]
        input: Input,
        /// Stage cap for the saturation iteration and re-verification.
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_CANDIDATES)]
        max_candidates: u64,
    },
    /// Simplicity verdict.
    Simplicity {
        #[command(flatten)]
        input: Input,
    },
    /// Hereditary saturated vertex sets (unweighted oracle).
    Unweighted { graph: PathBuf },
    /// Worked examples.
    Demo {
        #[command(subcommand)]
        cmd: DemoCmd,
    },
    /// Symbolic element tools.
    Element {
        #[command(subcommand)]
        cmd: ElementCmd,
    },
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Shape report: sources, sinks, transitivity, cycle shape.
    Validate { graph: PathBuf },
}

#[derive(Subcommand)]
enum WeightsCmd {
    /// Test exact periodicity with a given period.
    Check {
        graph: PathBuf,
        weights: PathBuf,
        /// Period to test (default: the declared one).
        #[arg(long)]
        p: Option<usize>,
        #[arg(long, default_value_t = 12)]
        kmax: usize,
    },
}

#[derive(Subcommand)]
enum FockCmd {
    /// Check the operator relations on a truncated Fock space.
    Verify {
        #[command(flatten)]
        input: Input,
        /// Truncation level.
        #[arg(long = "K", default_value_t = 8)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum DemoCmd {
    /// Alternating weights on a directed cycle: characters, kernel family
    /// and the ideal lattice compared with the unweighted one.
    Cycle {
        /// Cycle length.
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Odd-level weights, one per vertex.
        #[arg(long, value_delimiter = ',', default_value = "2,1,3")]
        t: Vec<f64>,
        /// Weight period.
        #[arg(long, default_value_t = 2)]
        p: usize,
    },
}

#[derive(Subcommand)]
enum ElementCmd {
    /// Quotient norm of an element.
    Norm {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        element: String,
    },
}

#[derive(Args)]
struct Input {
    graph: PathBuf,
    /// Weight file; omitted means unweighted.
    weights: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Xi {
    Min,
    Max,
}

impl From<Xi> for XiChoice {
    fn from(x: Xi) -> Self {
        match x {
            Xi::Min => XiChoice::LexMin,
            Xi::Max => XiChoice::LexMax,
        }
    }
}

struct Ctx {
    settings: Settings,
    json: Option<String>,
    manifest: RunManifest,
}

impl Ctx {
    fn read(&mut self, path: &PathBuf) -> Result<String> {
        let bytes = std::fs::read(path)?;
        self.manifest.add_input(&path.display().to_string(), &bytes);
        String::from_utf8(bytes).map_err(|_| Error::Parse(format!("{} is not UTF-8", path.display())))
    }

    fn load(&mut self, input: &Input) -> Result<(Graph, WeightSpec)> {
        let g = Graph::from_json(&self.read(&input.graph)?)?;
        let w = match &input.weights {
            Some(p) => WeightSpec::from_json(&self.read(p)?, &g)?,
            None => WeightSpec::unweighted(),
        };
        Ok((g, w))
    }

    /// Writes JSON if requested, otherwise the human text.
    fn emit<T: Serialize>(&self, result: &T, human: impl FnOnce() -> String) -> Result<()> {
        match self.json.as_deref() {
            Some("-") => println!("{}", self.manifest.wrap(result)),
            Some(path) => {
                std::fs::write(path, self.manifest.wrap(result) + "\n")?;
                print!("{}", human());
            }
            None => print!("{}", human()),
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<u8> {
    let settings = Settings::resolve(cli.tol.as_deref(), cli.seed)?;
    let command = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let mut ctx = Ctx {
        settings,
        json: cli.json,
        manifest: RunManifest::new(&command, settings),
    };
    match cli.cmd {
        Cmd::Graph {
            cmd: GraphCmd::Validate { graph },
        } => {
            let g = Graph::from_json(&ctx.read(&graph)?)?;
            let r = g.validate();
            ctx.emit(&r, || {
                format!(
                    "vertices {}  edges {}\nno sources {}  no sinks {}  transitive {}  cycle {}  cycle with entry {}\n",
                    g.vertex_count(),
                    g.edge_count(),
                    r.no_sources,
                    r.no_sinks,
                    r.transitive,
                    r.is_cycle,
                    r.is_cycle_with_entry
                )
            })?;
            Ok(0)
        }
        Cmd::Paths { graph, len } => {
            let g = Graph::from_json(&ctx.read(&graph)?)?;
            let walks: Vec<String> = g.paths(len).iter().map(|p| g.walk_string(p)).collect();
            ctx.emit(&walks, || walks.iter().map(|w| format!("{w}\n")).collect())?;
            Ok(0)
        }
        Cmd::Weights {
            cmd: WeightsCmd::Check { graph, weights, p, kmax },
        } => {
            let g = Graph::from_json(&ctx.read(&graph)?)?;
            let w = WeightSpec::from_json(&ctx.read(&weights)?, &g)?;
            let r = w.check_period(&g, p.unwrap_or(w.p), kmax);
            let minimal = w.minimal_period(&g);
            ctx.emit(&r, || {
                let worst = r.residuals.iter().cloned().fold(0.0, f64::max);
                format!(
                    "period {}: {} (max residual {worst:.3e}); minimal period {minimal}\n",
                    r.p_test,
                    if r.exact { "exact" } else { "fails" }
                )
            })?;
            Ok(if r.exact { 0 } else { 1 })
        }
        Cmd::Fock {
            cmd: FockCmd::Verify { input, k },
        } => {
            let (g, w) = ctx.load(&input)?;
            let rep = FockRep::new(&g, &w, k)?;
            let r = rep.verify_relations(k);
            let ok = r.passes(1e-12);
            ctx.emit(&r, || {
                format!(
                    "truncation {k}: max deviation {:.3e} ({})\n",
                    r.max_deviation,
                    if ok { "pass" } else { "fail" }
                )
            })?;
            Ok(if ok { 0 } else { 1 })
        }
        Cmd::Tower { input, stages, xi, dot } => {
            let (g, w) = ctx.load(&input)?;
            let cfg = ctx.settings.tower_config(stages, xi.into());
            let t = Tower::build(&g, &w, &cfg)?;
            let b = t.bratteli();
            if let Some(path) = dot {
                std::fs::write(path, b.to_dot())?;
            }
            ctx.manifest.window = Some(t.window);
            ctx.manifest.xi = b.xi.clone();
            ctx.emit(&b, || {
                let mut s = format!(
                    "period {}  window base {} width {}  C_0 dim {}\n",
                    t.p(),
                    t.window.base,
                    t.window.width,
                    t.base.algebra.dim()
                );
                for (n, st) in t.stages.iter().enumerate() {
                    s += &format!("stage {n}: dim {}  summands {:?}\n", st.dim(), st.decomposition.dims);
                }
                for (n, e) in t.embeddings.iter().enumerate() {
                    s += &format!("  {n} -> {}: {:?}\n", n + 1, e.multiplicities);
                }
                s
            })?;
            Ok(0)
        }
        Cmd::Ideals {
            input,
            nmax,
            max_candidates,
        } => {
            let (g, w) = ctx.load(&input)?;
            let cfg = ctx.settings.tower_config(1, XiChoice::LexMin);
            let t = Tower::build(&g, &w, &cfg)?;
            let lat = enumerate_families(&t, nmax.max(1) * 16, max_candidates)?;
            for e in &lat.entries {
                let rep = verify_fully_invariant(&t, &e.family, nmax)?;
                if !rep.passes() {
                    return Err(Error::Verification(format!(
                        "family {:?} failed re-verification: {}",
                        e.family.masks,
                        rep.witness.unwrap_or_default()
                    )));
                }
            }
            ctx.manifest.window = Some(t.window);
            ctx.manifest.xi = t.xi.iter().map(|x| g.walk_string(x)).collect();
            ctx.emit(&lat, || {
                let mut s = format!("{} families (corner summands {:?})\n", lat.len(), lat.corner_summands);
                for (i, e) in lat.entries.iter().enumerate() {
                    let parts: Vec<String> = (0..g.vertex_count())
                        .map(|v| format!("{}:{:?}", g.vertex_name(v), e.family.summands(v)))
                        .collect();
                    s += &format!("  [{i}] {}  J_0 dim {}\n", parts.join(" "), e.stage0_dim);
                }
                s += &format!("covering pairs {:?}\n", lat.hasse);
                s
            })?;
            Ok(0)
        }
        Cmd::Simplicity { input } => {
            let (g, w) = ctx.load(&input)?;
            let cfg = ctx.settings.tower_config(1, XiChoice::LexMin);
            let v = simplicity_verdict(&g, &w, &cfg)?;
            ctx.emit(&v, || format!("{v:?}\n"))?;
            Ok(0)
        }
        Cmd::Unweighted { graph } => {
            let g = Graph::from_json(&ctx.read(&graph)?)?;
            #[derive(Serialize)]
            struct Out {
                sets: Vec<Vec<String>>,
                verdict: wck::ideals::Verdict,
            }
            let out = Out {
                sets: hereditary_saturated(&g)
                    .iter()
                    .map(|s| s.members.iter().map(|&v| g.vertex_name(v).to_string()).collect())
                    .collect(),
                verdict: unweighted_simplicity(&g),
            };
            ctx.emit(&out, || {
                let mut s = format!("{} hereditary saturated sets\n", out.sets.len());
                for set in &out.sets {
                    s += &format!("  {{{}}}\n", set.join(", "));
                }
                s += &format!("simplicity: {:?}\n", out.verdict);
                s
            })?;
            Ok(0)
        }
        Cmd::Demo {
            cmd: DemoCmd::Cycle { k, t, p },
        } => {
            let cfg = ctx.settings.tower_config(1, XiChoice::LexMin);
            let r = demo_report(k, &t, p, &cfg)?;
            ctx.emit(&r, || {
                let mut s = format!("cycle of length {k}, weights {t:?}, period {p}, character period {}\n", r.model.period);
                for (n, row) in r.phi_z.iter().enumerate() {
                    s += &format!("  phi_{n}(z) = {row:?}\n");
                }
                for c in &r.k1_checks {
                    s += &format!("  {} in K_1: {}\n", c.element, c.member);
                }
                s += &format!(
                    "families: weighted {}, unweighted {}\nkernel family {:?} in lattice: {}\nnontrivial ideal found: {}\n",
                    r.weighted_families, r.unweighted_families, r.k1_family.masks, r.k1_family_in_lattice, r.nontrivial_ideal_found
                );
                s
            })?;
            Ok(if r.nontrivial_ideal_found { 0 } else { 1 })
        }
        Cmd::Element {
            cmd: ElementCmd::Norm { input, element },
        } => {
            let (g, w) = ctx.load(&input)?;
            let x = CalkinElement::parse(&g, &element)?;
            let ev = Evaluator::new(&g, &w.minimized(&g));
            let start = Window {
                base: ev.default_base(0),
                width: ev.weights.p,
            };
            let wcfg = ctx.settings.tower_config(0, XiChoice::LexMin).window;
            let cert = ev.calkin_norm(&x, start, &wcfg)?;
            ctx.manifest.window = Some(cert.window);
            ctx.emit(&cert, || format!("{:.12}\n", cert.norm))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
