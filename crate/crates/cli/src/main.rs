//! chamberfold — solvers, verification suites, and fan sections for
//! discrete reflection groups.
//!
//! Exit codes: 0 success; 1 malformed input or unsupported combination;
//! 2 precondition or property violation; 3 search budget exhausted.

mod render;
mod report;
mod specfile;

use chamberfold_core::error::Error as CoreError;
use chamberfold_core::group::{build_group, Geometry, ReflectionGroup};
use chamberfold_core::solver::{
    solve_affine, solve_hyperbolic_minus, solve_hyperbolic_plus, solve_spherical, SolverBudget,
};
use chamberfold_core::verify::{run_suite, Suite, VerifyOptions};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    Malformed(String),
    Core(CoreError),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Malformed(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> CliError {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Malformed(_) => 1,
            CliError::Core(e) => match e {
                CoreError::InvalidSpec(_)
                | CoreError::SignatureMismatch(_)
                | CoreError::NotInGroup(_)
                | CoreError::NotEnumerated { .. } => 1,
                CoreError::BudgetExhausted(_) => 3,
                _ => 2,
            },
        }
    }
}

#[derive(Parser)]
#[command(
    name = "chamberfold",
    version,
    about = "Tilings by the maps (1 - w) on chambers of discrete reflection groups"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct SpecArg {
    /// Group spec JSON file.
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Find the unique group element whose tile contains a point.
    Solve {
        #[command(flatten)]
        spec: SpecArg,
        /// spherical | affine | hyperbolic-plus | hyperbolic-minus
        #[arg(long)]
        variant: String,
        /// The point, comma-separated (rationals allowed on exact backend).
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        /// Optional twist for the affine variant: word of the rotation part
        /// in display letters, e.g. "1,2" (default: identity).
        #[arg(long)]
        h_word: Option<String>,
        /// Optional scaling factor of the twist (default 1; values < 1 give
        /// a contraction and a covering instead of a partition).
        #[arg(long)]
        h_scale: Option<String>,
        /// Word-length horizon for infinite groups.
        #[arg(long, default_value_t = 12)]
        max_length: usize,
        /// Extra ring of lattice points around the affine search box.
        #[arg(long, default_value_t = 2)]
        margin: i64,
    },
    /// Re-check a library property over random samples or full sweeps.
    Verify {
        #[command(flatten)]
        spec: SpecArg,
        /// partition | lemma1 | lemma3 | lemma4 | kostant | adjacency |
        /// detsum | theorem3-signs
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Ball radius for suites that enumerate infinite groups.
        #[arg(long, default_value_t = 8)]
        max_length: usize,
    },
    /// Render an SVG section of the chamber fan or the dual-cone tile fan.
    RenderSection {
        #[command(flatten)]
        spec: SpecArg,
        /// dual-cone-fan | chamber-fan
        #[arg(long, default_value = "dual-cone-fan")]
        region: String,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Slice plane for rank-3 groups, e.g. "1,1,1=1".
        #[arg(long, allow_hyphen_values = true)]
        plane: Option<String>,
        /// Chart viewport minx,miny,maxx,maxy.
        #[arg(long, allow_hyphen_values = true)]
        viewport: Option<String>,
        /// Suppress word labels.
        #[arg(long)]
        no_labels: bool,
    },
    /// Print structural facts about the group.
    Info {
        #[command(flatten)]
        spec: SpecArg,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are successes; anything else is
            // malformed input (exit 1, not clap's default 2).
            let _ = e.print();
            let code = if e.use_stderr() { 1 } else { 0 };
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn load_group(spec: &SpecArg) -> Result<ReflectionGroup, CliError> {
    let spec = specfile::load_spec(&spec.spec)?;
    build_group(&spec).map_err(CliError::Core)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Solve { spec, variant, u, h_word, h_scale, max_length, margin } => {
            let group = load_group(&spec)?;
            let budget = SolverBudget { max_word_length: max_length, affine_margin: margin };
            let u = specfile::parse_vector(group.backend(), group.dim(), &u)?;
            let report = match variant.as_str() {
                "spherical" => {
                    require_geometry(&group, Geometry::Spherical, &variant)?;
                    let sol = solve_spherical(&group, &u)?;
                    report::solve_report(&group, &variant, &sol, true)
                }
                "affine" => {
                    require_geometry(&group, Geometry::Affine, &variant)?;
                    let h = parse_twist(&group, h_word.as_deref(), h_scale.as_deref())?;
                    let solve = solve_affine(&group, h.as_ref(), &u, &budget)?;
                    report::affine_solve_report(&group, &solve)
                }
                "hyperbolic-plus" => {
                    require_geometry(&group, Geometry::Hyperbolic, &variant)?;
                    let sol = solve_hyperbolic_plus(&group, &u, &budget)?;
                    report::solve_report(&group, &variant, &sol, true)
                }
                "hyperbolic-minus" => {
                    require_geometry(&group, Geometry::Hyperbolic, &variant)?;
                    let sol = solve_hyperbolic_minus(&group, &u, &budget)?;
                    report::solve_report(&group, &variant, &sol, true)
                }
                other => {
                    return Err(CliError::Malformed(format!(
                        "unknown variant '{other}' (expected spherical, affine, \
                         hyperbolic-plus, or hyperbolic-minus)"
                    )))
                }
            };
            println!("{}", serde_json::to_string_pretty(&report).expect("valid json"));
            Ok(())
        }
        Cmd::Verify { spec, suite, samples, seed, max_length } => {
            let group = load_group(&spec)?;
            let suite = Suite::parse(&suite).ok_or_else(|| {
                CliError::Malformed(format!(
                    "unknown suite '{suite}' (expected one of {})",
                    Suite::ALL.map(|s| s.token()).join(", ")
                ))
            })?;
            let opts = VerifyOptions { samples, seed, max_word_length: max_length };
            let report = run_suite(&group, suite, &opts)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&report::verify_report_json(
                    &group, &report, samples, seed
                ))
                .expect("valid json")
            );
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::Core(CoreError::PreconditionViolated(format!(
                    "suite '{}' found {} violation(s)",
                    report.suite,
                    report.violations.len()
                ))))
            }
        }
        Cmd::RenderSection { spec, region, out, plane, viewport, no_labels } => {
            let group = load_group(&spec)?;
            let opts = render::RenderOptions {
                region: render::Region::parse(&region)?,
                plane: plane.as_deref().map(render::parse_plane).transpose()?,
                viewport: viewport.as_deref().map(render::parse_viewport).transpose()?,
                labels: !no_labels,
            };
            let svg = render::render_section(&group, &opts)?;
            match out {
                Some(path) => std::fs::write(&path, svg).map_err(|e| {
                    CliError::Malformed(format!("cannot write {}: {e}", path.display()))
                })?,
                None => print!("{svg}"),
            }
            Ok(())
        }
        Cmd::Info { spec } => {
            let group = load_group(&spec)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&report::info_report(&group)).expect("valid json")
            );
            Ok(())
        }
    }
}

fn require_geometry(
    group: &ReflectionGroup,
    expected: Geometry,
    variant: &str,
) -> Result<(), CliError> {
    if group.geometry == expected {
        Ok(())
    } else {
        Err(CliError::Malformed(format!(
            "variant '{variant}' needs a {expected:?} group; '{}' is {:?}",
            group.name, group.geometry
        )))
    }
}

/// Builds h = scale * (element of the finite part) for the affine twist.
fn parse_twist(
    group: &ReflectionGroup,
    word: Option<&str>,
    scale: Option<&str>,
) -> Result<Option<chamberfold_core::element::GroupElement>, CliError> {
    if word.is_none() && scale.is_none() {
        return Ok(None);
    }
    let letters: Vec<u16> = match word {
        None | Some("") => Vec::new(),
        Some(text) => text
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u16>()
                    .map_err(|_| CliError::Malformed(format!("bad twist word letter '{p}'")))
            })
            .collect::<Result<_, _>>()?,
    };
    let rotation = report::element_from_display_word(group, &letters)?;
    let element = match scale {
        None => rotation,
        Some(text) => {
            let factor = specfile::parse_scalar(group.backend(), text)?;
            chamberfold_core::element::GroupElement::from_affine(
                rotation.linear.scale(&factor),
                rotation.translation.clone(),
            )
        }
    };
    Ok(Some(element))
}
