//! Command-line front end behind the `tronquee` binary.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::acceptance::{run_all, CriterionReport};
use crate::borel::germ::{h0_germ_from_series, solve_h0_convolution};
use crate::borel::stokes::estimate_s;
use crate::borel::sum::sum_transseries;
use crate::config::{Header, RunConfig};
use crate::connection::{mu_closed_form, tritronquee_connection, verify_second_stokes_lateral};
use crate::cycles::{run_cycles, CycleOptions};
use crate::error::{Error, Result};
use crate::ode::{borel_seed, detect_poles, integrate_path, IntegrateOptions, Path};
use crate::pole_sector::sweep::{compare_poles, pole_index};
use crate::series::h0_series;

type C = Complex64;

#[derive(Parser, Debug)]
#[command(name = "tronquee", version, about = "Tronquee solutions of Painleve I: series, Borel sums, poles, Stokes data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Default, Clone)]
pub struct Common {
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// ODE tolerance (overrides ode_tol).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Truncation order (series and germ length).
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Transseries constant as re,im.
    #[arg(long = "C", global = true, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Laplace direction in radians.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Grid a:b:n.
    #[arg(long, global = true)]
    pub grid: Option<String>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Exact coefficients of the power series solution.
    Coeffs,
    /// Borel germ of the series, its two constructions and the singularity constant.
    Borel,
    /// Borel summed transseries on a grid of |x| along arg x = -phi.
    Sum,
    /// Integrate from a Borel seed at |x| = b inward to |x| = a along arg x = -phi.
    Integrate,
    /// Detected poles against the asymptotic prediction.
    Poles {
        /// Pole index range lo..hi.
        #[arg(long, default_value = "5..15")]
        n: String,
    },
    /// Constants beyond all orders and the Stokes multiplier.
    Stokes,
    /// Poincare map iteration with the adiabatic invariants.
    Invariants {
        /// Start point x0 as re,im.
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<String>,
        /// Start value s0 as re,im.
        #[arg(long, allow_hyphen_values = true)]
        s0: Option<String>,
        /// Maximum number of turns (default |x0|/2).
        #[arg(long)]
        turns: Option<usize>,
    },
    /// Run the acceptance suite.
    Verify,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Coeffs => "coeffs",
            Command::Borel => "borel",
            Command::Sum => "sum",
            Command::Integrate => "integrate",
            Command::Poles { .. } => "poles",
            Command::Stokes => "stokes",
            Command::Invariants { .. } => "invariants",
            Command::Verify => "verify",
        }
    }
}

pub fn parse_complex(s: &str) -> Result<C> {
    let bad = || Error::InvalidInput(format!("expected re,im, got '{s}'"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok(C::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

/// `a:b:n` → n equispaced points from a to b.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidInput(format!("expected a:b:n, got '{s}'"));
    let p: Vec<&str> = s.split(':').collect();
    if p.len() != 3 {
        return Err(bad());
    }
    let a: f64 = p[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = p[1].trim().parse().map_err(|_| bad())?;
    let n: usize = p[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

/// `lo..hi` (inclusive).
pub fn parse_range(s: &str) -> Result<std::ops::RangeInclusive<i64>> {
    let bad = || Error::InvalidInput(format!("expected lo..hi, got '{s}'"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    Ok(a.trim().parse().map_err(|_| bad())?..=b.trim().parse().map_err(|_| bad())?)
}

/// Finished output of one subcommand.
pub struct Output {
    pub file_name: String,
    pub body: String,
    pub success: bool,
}

struct Ctx {
    cfg: RunConfig,
    header: Header,
}

impl Ctx {
    fn json(&self, name: &str, data: serde_json::Value) -> Result<Output> {
        let v = serde_json::json!({ "header": self.header, "data": data });
        Ok(Output { file_name: format!("{name}.json"), body: serde_json::to_string_pretty(&v)? + "\n", success: true })
    }

    fn csv(&self, name: &str, extra: &[String], columns: &str, rows: &[String]) -> Output {
        let mut body = self.header.comment_block();
        for e in extra {
            body += &format!("# {e}\n");
        }
        body += columns;
        body.push('\n');
        for r in rows {
            body += r;
            body.push('\n');
        }
        Output { file_name: format!("{name}.csv"), body, success: true }
    }

    fn ode(&self) -> IntegrateOptions {
        IntegrateOptions { tol: self.cfg.ode_tol, ..IntegrateOptions::default() }
    }
}

fn effective_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(t) = common.tol {
        cfg.ode_tol = t;
    }
    if let Some(o) = &common.out {
        cfg.out_dir = Some(o.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn params(cli: &Cli) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    let c = &cli.common;
    if let Some(v) = c.tol {
        m.insert("tol".into(), format!("{v:?}"));
    }
    if let Some(v) = c.order {
        m.insert("order".into(), v.to_string());
    }
    if let Some(v) = &c.c {
        m.insert("C".into(), v.clone());
    }
    if let Some(v) = c.phi {
        m.insert("phi".into(), format!("{v:?}"));
    }
    if let Some(v) = &c.grid {
        m.insert("grid".into(), v.clone());
    }
    match &cli.command {
        Command::Poles { n } => {
            m.insert("n".into(), n.clone());
        }
        Command::Invariants { x0, s0, turns } => {
            if let Some(v) = x0 {
                m.insert("x0".into(), v.clone());
            }
            if let Some(v) = s0 {
                m.insert("s0".into(), v.clone());
            }
            if let Some(v) = turns {
                m.insert("turns".into(), v.to_string());
            }
        }
        _ => {}
    }
    m
}

fn cx(v: C) -> [f64; 2] {
    [v.re, v.im]
}

/// Execute a parsed command line and return its output.
pub fn execute(cli: &Cli) -> Result<Output> {
    let cfg = effective_config(&cli.common)?;
    let header = Header::new(&cfg, cli.command.name(), params(cli));
    let ctx = Ctx { cfg, header };
    let common = &cli.common;
    let c_val = common.c.as_deref().map(parse_complex).transpose()?;
    match &cli.command {
        Command::Coeffs => {
            let n = common.order.unwrap_or(ctx.cfg.n_series);
            let s = h0_series(n)?;
            ctx.json("coeffs", serde_json::json!({ "order": n, "h0": s.to_json() }))
        }
        Command::Borel => {
            let n = common.order.unwrap_or(ctx.cfg.n_borel);
            let g = solve_h0_convolution(n)?;
            let same = g.coeffs == h0_germ_from_series(n)?.coeffs;
            let s = estimate_s(&g)?;
            let mu = -C::new(0.0, 2.0) * std::f64::consts::PI.sqrt() * s.s;
            ctx.json(
                "borel",
                serde_json::json!({
                    "order": n,
                    "germ": g.to_json(),
                    "convolution_matches_transform": same,
                    "S": { "value": cx(s.s), "err": s.err, "radius": s.radius },
                    "mu_from_S": cx(mu),
                    "mu_closed": cx(mu_closed_form()),
                }),
            )
        }
        Command::Sum => {
            let c = c_val.unwrap_or(C::new(1.0, 0.0));
            let phi = common.phi.unwrap_or(-FRAC_PI_4);
            let grid = parse_grid(common.grid.as_deref().unwrap_or("10:30:21"))?;
            let dir = C::from_polar(1.0, -phi);
            let rows = grid
                .iter()
                .map(|&r| {
                    let x = dir * r;
                    let v = sum_transseries(c, phi, x, ctx.cfg.k_levels)?;
                    Ok(format!("{:e},{:e},{:e},{:e},{:e}", x.re, x.im, v.value.re, v.value.im, v.err))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ctx.csv("sum", &[], "x_re,x_im,value_re,value_im,err_est", &rows))
        }
        Command::Integrate => {
            let c = c_val.unwrap_or(C::new(1.0, 0.0));
            let phi = common.phi.unwrap_or(-FRAC_PI_4);
            let grid = parse_grid(common.grid.as_deref().unwrap_or("15:30:16"))?;
            let (a, b) = (grid[0].min(grid[grid.len() - 1]), grid[0].max(grid[grid.len() - 1]));
            if a <= 0.0 || a == b {
                return Err(Error::InvalidInput("integrate needs a grid a:b:n with 0 < a < b".into()));
            }
            let dir = C::from_polar(1.0, -phi);
            let seed = borel_seed(c, phi, dir * b)?;
            let mut tr = integrate_path(seed.h, seed.hp, &Path::new().line(dir * b, dir * a), &ctx.ode())?;
            tr.poles = detect_poles(&tr)?;
            for p in tr.poles.iter_mut() {
                p.n = Some(pole_index(p.x, c));
            }
            let total = tr.path.length();
            let dense: Vec<serde_json::Value> = grid
                .iter()
                .map(|&r| {
                    let (x, h, hp) = tr.at(total * (b - r) / (b - a));
                    serde_json::json!({ "x": cx(x), "h": cx(h), "hp": cx(hp) })
                })
                .collect();
            let mut out = ctx.json(
                "integrate",
                serde_json::json!({ "seed": { "x": cx(seed.x), "err": seed.err }, "trace": tr.to_json(), "grid": dense }),
            )?;
            if let Some(dir) = &ctx.cfg.out_dir {
                let rows: Vec<String> =
                    tr.poles.iter().map(|p| format!("{},{:e},{:e}", p.n.unwrap_or(0), p.x.re, p.x.im)).collect();
                let poles = ctx.csv("integrate_poles", &[], "n,x_re,x_im", &rows);
                write_output(dir, &poles)?;
            }
            out.success = true;
            Ok(out)
        }
        Command::Poles { n } => {
            let c = c_val.unwrap_or(C::new(1.0, 0.0));
            let cmp = compare_poles(c, parse_range(n)?, &ctx.ode())?;
            let rows: Vec<String> = cmp
                .rows
                .iter()
                .map(|r| {
                    format!(
                        "{},{:e},{:e},{:e},{:e},{:e}",
                        r.n, r.predicted.re, r.predicted.im, r.detected.re, r.detected.im, r.gap
                    )
                })
                .collect();
            let extra = [
                format!("fit loglog_slope_gap_vs_n: {:.4}", cmp.slope),
                format!("fit loglog_slope_with_first_omitted_term: {:.4}", cmp.slope_with_next),
                format!("fit max_relative_gap: {:e}", cmp.max_rel_gap),
            ];
            Ok(ctx.csv("poles", &extra, "n,predicted_re,predicted_im,detected_re,detected_im,gap", &rows))
        }
        Command::Stokes => {
            let grid = parse_grid(common.grid.as_deref().unwrap_or("8:20:13"))?;
            let d = tritronquee_connection(&grid)?;
            let second = verify_second_stokes_lateral(&grid)?;
            ctx.json(
                "stokes",
                serde_json::json!({
                    "C_plus": cx(d.c_plus),
                    "C_minus": cx(d.c_minus),
                    "C_average": cx(d.c_average),
                    "mu_fit": cx(d.mu_measured),
                    "mu_closed": cx(d.mu_closed_form),
                    "second_stokes_line": { "mu_fit": cx(second.fit.mu), "expected": cx(second.expected) },
                    "residuals": {
                        "C_plus": d.errors.c_plus,
                        "C_minus": d.errors.c_minus,
                        "C_average": d.errors.c_average,
                        "mu_fit": d.errors.mu_fit_residual,
                        "mu_vs_closed": (d.mu_measured - d.mu_closed_form).norm(),
                        "second_stokes_line": second.residual.norm(),
                    },
                }),
            )
        }
        Command::Invariants { x0, s0, turns } => {
            let x0 = match x0 {
                Some(s) => parse_complex(s)?,
                None => C::from_polar(50.0, -FRAC_PI_2 * 1.05),
            };
            let s0 = match s0 {
                Some(s) => parse_complex(s)?,
                None => C::new(-0.1, 0.0),
            };
            let n = turns.unwrap_or((x0.norm() / 2.0) as usize);
            let run = run_cycles(x0, s0, n, &CycleOptions::default())?;
            let rows: Vec<String> = run
                .states
                .iter()
                .map(|st| {
                    format!(
                        "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                        st.n, st.x.re, st.x.im, st.s.re, st.s.im, st.q.re, st.q.im, st.k_shifted.re, st.k_shifted.im
                    )
                })
                .collect();
            let extra = [
                format!("branch R(u0,s0): {:e},{:e}", run.branch0.re, run.branch0.im),
                format!("kappa0: {:e},{:e}", run.kappa0.re, run.kappa0.im),
                format!("q_drift: {:e}", run.q_drift()),
                format!("k_shifted_drift: {:e}", run.k_drift()),
                format!("stopped_by_arg: {}", run.stopped_by_arg),
                format!("reroutes: {}", run.reroutes),
            ];
            Ok(ctx.csv("invariants", &extra, "n,x_re,x_im,s_re,s_im,Q_re,Q_im,K_re,K_im", &rows))
        }
        Command::Verify => {
            let reports = run_all(&ctx.cfg);
            for r in &reports {
                eprintln!("{}", r.line());
            }
            Ok(verify_output(&ctx, &reports))
        }
    }
}

fn verify_output(ctx: &Ctx, reports: &[CriterionReport]) -> Output {
    let mut body = ctx.header.comment_block();
    for r in reports {
        let _ = writeln!(body, "{}", r.line_untimed());
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    let _ = writeln!(body, "summary: {} of {} criteria pass", reports.len() - failed, reports.len());
    Output { file_name: "verify.txt".into(), body, success: failed == 0 }
}

pub fn write_output(dir: &std::path::Path, out: &Output) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let p = dir.join(&out.file_name);
    std::fs::write(&p, &out.body)?;
    Ok(p)
}

/// Machine-readable error document.
pub fn error_json(e: &Error) -> String {
    serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } }).to_string()
}

/// Write to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                emit(&e.to_string());
                return 0;
            }
            emit(&format!("{}\n", error_json(&Error::InvalidInput(e.to_string().trim().to_string()))));
            return 2;
        }
    };
    let res = execute(&cli).and_then(|out| {
        let dir = cli.common.out.clone().or_else(|| effective_config(&cli.common).ok().and_then(|c| c.out_dir));
        match dir {
            Some(d) => {
                let p = write_output(&d, &out)?;
                eprintln!("wrote {}", p.display());
            }
            None => emit(&out.body),
        }
        Ok(out.success)
    });
    match res {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            emit(&format!("{}\n", error_json(&e)));
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsers() {
        assert_eq!(parse_complex("1,-2").unwrap(), C::new(1.0, -2.0));
        assert!(parse_complex("1").is_err());
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert_eq!(parse_range("5..15").unwrap(), 5..=15);
        assert!(parse_range("5-15").is_err());
    }

    #[test]
    fn error_document_has_kind() {
        let v: serde_json::Value = serde_json::from_str(&error_json(&Error::XZero)).unwrap();
        assert_eq!(v["error"]["kind"], "XZero");
    }
}
