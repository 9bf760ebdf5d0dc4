//! Batch command-line front end.
//!
//! Commands take `key=value` flags after the command word and emit JSON or
//! CSV, to stdout or to files under the directory named by the
//! `DUNKL_SPECTRA_OUT` environment variable. JSON documents carry a
//! top-level `"schema": 1` field and are byte-identical for identical
//! configurations.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::coeffs::{self, Family, Method, MixedParams, TParams};
use crate::spectra::{self, OperatorSpec, Sign, USpec, VSpec};
use crate::{analysis, verify, Error, Result};

pub const OUTPUT_DIR_ENV: &str = "DUNKL_SPECTRA_OUT";

const USAGE: &str = "usage: dunkl-spectra <command> [key=value ...]\n\
commands:\n  \
coeffs    family=d|c|chat|cprime sigma= u=|tau= theta= s= N= \
[method=recursion|closed|quadrature] [format=csv|json] [out=FILE]\n  \
spectrum  kind=U|V sigma= u= xi= s= N= [tau= theta= eta=] [epsilon=0.1] \
[format=json|csv] [out=FILE]\n  \
bounds    kind=diag|form|tprime|decay|weierstrass|gautschi plus that fit's \
parameters [out=FILE]\n  \
regions   set=J1|J2|K1|K1p|K2|K2p|S1|S2 sigma= tau= [theta=] \
(S1/S2: alpha= beta= gamma= delta=) [out=FILE]\n  \
witten    kappa= u= s= [mu=] [sign=plus|minus] [N=256] [out=FILE]\n  \
verify-all  [only=ID]\n\
exit codes: 0 ok, 1 verification failure, 2 parameter domain, \
3 non-convergence, 4 hypothesis failure";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Coeffs,
    Spectrum,
    Bounds,
    Regions,
    Witten,
    VerifyAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// A parsed invocation: the command word plus its validated flag map.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub parameters: BTreeMap<String, String>,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
}

fn allowed_keys(command: Command) -> &'static [&'static str] {
    match command {
        Command::Coeffs => {
            &["family", "sigma", "tau", "theta", "u", "s", "N", "method", "format", "out", "seed"]
        }
        Command::Spectrum => &[
            "kind", "sigma", "tau", "theta", "u", "s", "xi", "eta", "N", "epsilon", "format",
            "out", "seed",
        ],
        Command::Bounds => &[
            "kind", "sigma", "tau", "theta", "u", "s", "epsilon", "N", "K", "t", "pmax", "family",
            "format", "out", "seed",
        ],
        Command::Regions => &[
            "set", "sigma", "tau", "theta", "alpha", "beta", "gamma", "delta", "format", "out",
            "seed",
        ],
        Command::Witten => &["kappa", "u", "s", "mu", "sign", "N", "format", "out", "seed"],
        Command::VerifyAll => &["only", "format", "out", "seed"],
    }
}

impl RunConfig {
    /// Parses the argument list (command word first, then `key=value`
    /// flags). Unknown command words, malformed flags, and keys the command
    /// does not accept are all rejected here, before any computation.
    pub fn parse(args: &[String]) -> Result<RunConfig> {
        let word = args.first().ok_or_else(|| Error::Usage(USAGE.into()))?;
        let command = match word.as_str() {
            "coeffs" => Command::Coeffs,
            "spectrum" => Command::Spectrum,
            "bounds" => Command::Bounds,
            "regions" => Command::Regions,
            "witten" => Command::Witten,
            "verify-all" => Command::VerifyAll,
            other => {
                return Err(Error::Usage(format!("unknown command `{other}`\n{USAGE}")));
            }
        };
        let mut parameters = BTreeMap::new();
        for arg in &args[1..] {
            let (key, value) = arg
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("expected key=value, got `{arg}`")))?;
            if !allowed_keys(command).contains(&key) {
                return Err(Error::Usage(format!(
                    "unknown key `{key}` for command `{word}`"
                )));
            }
            if parameters.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::Usage(format!("duplicate key `{key}`")));
            }
        }
        let output_format = match parameters.get("format").map(String::as_str) {
            None => match command {
                Command::Coeffs => OutputFormat::Csv,
                _ => OutputFormat::Json,
            },
            Some("json") => OutputFormat::Json,
            Some("csv") => OutputFormat::Csv,
            Some(other) => {
                return Err(Error::Usage(format!("unknown format `{other}`")));
            }
        };
        let output_path = parameters.get("out").map(PathBuf::from);
        let seed = match parameters.get("seed") {
            None => 0,
            Some(raw) => raw
                .parse()
                .map_err(|_| Error::Usage(format!("seed must be an integer, got `{raw}`")))?,
        };
        Ok(RunConfig { command, parameters, output_format, output_path, seed })
    }

    fn f64(&self, key: &str) -> Result<f64> {
        let raw = self
            .parameters
            .get(key)
            .ok_or_else(|| Error::Usage(format!("missing required key `{key}`")))?;
        raw.parse()
            .map_err(|_| Error::Usage(format!("key `{key}` must be a number, got `{raw}`")))
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.parameters.get(key) {
            None => Ok(default),
            Some(_) => self.f64(key),
        }
    }

    fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        match self.parameters.get(key) {
            None => Ok(None),
            Some(_) => self.f64(key).map(Some),
        }
    }

    /// Truncation orders: `N` accepts a single integer or a comma list for
    /// sweeps (one checkpoint file per order when writing to disk).
    fn orders(&self, default: usize) -> Result<Vec<usize>> {
        let raw = match self.parameters.get("N") {
            None => return Ok(vec![default]),
            Some(raw) => raw,
        };
        raw.split(',')
            .map(|piece| {
                piece
                    .parse()
                    .map_err(|_| Error::Usage(format!("N must be an integer, got `{piece}`")))
            })
            .collect()
    }

    fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.parameters.get(key).map_or(default, String::as_str)
    }
}

/// Resolves an output path against `DUNKL_SPECTRA_OUT` (relative paths only).
fn resolve(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) => PathBuf::from(dir).join(path),
        None => path.to_path_buf(),
    }
}

fn print_stdout(text: &str) -> Result<()> {
    use std::io::Write;
    match writeln!(std::io::stdout(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn emit(config: &RunConfig, text: &str) -> Result<()> {
    match &config.output_path {
        None => print_stdout(text),
        Some(path) => {
            let full = resolve(path);
            if let Some(parent) = full.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(full, text)?;
            Ok(())
        }
    }
}

/// Writes one checkpoint file per item of a sweep, suffixing the configured
/// stem with the item tag; falls back to stdout when no path is set.
fn emit_sweep(config: &RunConfig, pieces: &[(String, String)]) -> Result<()> {
    match &config.output_path {
        None => {
            for (_, text) in pieces {
                print_stdout(text)?;
            }
            Ok(())
        }
        Some(path) => {
            let full = resolve(path);
            let stem = full.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
            let ext = full.extension().and_then(|s| s.to_str()).unwrap_or(match config
                .output_format
            {
                OutputFormat::Json => "json",
                OutputFormat::Csv => "csv",
            });
            for (tag, text) in pieces {
                let name = full.with_file_name(format!("{stem}_{tag}.{ext}"));
                if let Some(parent) = name.parent() {
                    if !parent.as_os_str().is_empty() {
                        std::fs::create_dir_all(parent)?;
                    }
                }
                std::fs::write(name, text)?;
            }
            Ok(())
        }
    }
}

fn json_doc(config: &RunConfig, command: &str, payload: serde_json::Value) -> String {
    let doc = json!({
        "schema": 1,
        "command": command,
        "seed": config.seed,
        "result": payload,
    });
    serde_json::to_string_pretty(&doc).expect("serializable document")
}

fn run_coeffs(config: &RunConfig) -> Result<i32> {
    let family = match config.str_or("family", "c") {
        "d" => Family::D,
        "c" => Family::C,
        "chat" => Family::Chat,
        "cprime" => Family::Cprime,
        other => return Err(Error::Usage(format!("unknown family `{other}`"))),
    };
    let method = match config.str_or("method", "closed") {
        "recursion" => Method::Recursion,
        "closed" => Method::ClosedForm,
        "quadrature" => Method::Quadrature,
        other => return Err(Error::Usage(format!("unknown method `{other}`"))),
    };
    let order = *config.orders(64)?.first().expect("nonempty orders");
    let matrix = match family {
        Family::D | Family::C => {
            let params =
                TParams::new(config.f64("sigma")?, config.f64("u")?, config.f64_or("s", 1.0)?)?;
            match (family, method) {
                (Family::D, Method::Recursion) => coeffs::d_matrix_recursive(&params, order)?,
                (Family::D, Method::ClosedForm) => coeffs::d_matrix_closed(&params, order)?,
                (Family::D, Method::Quadrature) => {
                    return Err(Error::Usage(
                        "family d has no quadrature route; use family c".into(),
                    ));
                }
                (Family::C, Method::Recursion) => coeffs::t_matrix_recursive(&params, order)?,
                (Family::C, Method::ClosedForm) => coeffs::t_matrix_closed(&params, order)?,
                (Family::C, Method::Quadrature) => coeffs::t_matrix_quadrature(&params, order)?,
                _ => unreachable!(),
            }
        }
        Family::Chat | Family::Cprime => {
            let params = MixedParams::new(
                config.f64("sigma")?,
                config.f64("tau")?,
                config.f64("theta")?,
                config.f64_or("s", 1.0)?,
            )?;
            if method == Method::Quadrature {
                return Err(Error::Usage(
                    "families chat and cprime emit their closed forms; the quadrature \
                     route is the per-entry test oracle"
                        .into(),
                ));
            }
            match family {
                Family::Chat => coeffs::chat_matrix(&params, order)?,
                Family::Cprime => coeffs::cprime_matrix(&params, order)?,
                _ => unreachable!(),
            }
        }
    };
    let text = match config.output_format {
        OutputFormat::Csv => matrix.to_csv(),
        OutputFormat::Json => json_doc(config, "coeffs", serde_json::to_value(&matrix)?),
    };
    emit(config, &text)?;
    Ok(0)
}

fn run_spectrum(config: &RunConfig) -> Result<i32> {
    let epsilon = config.f64_or("epsilon", 0.1)?;
    let orders = config.orders(spectra::DEFAULT_TRUNCATION)?;
    let kind = config.str_or("kind", "U");
    let spec = match kind {
        "U" => OperatorSpec::U(USpec::new(
            config.f64("sigma")?,
            config.f64("u")?,
            config.f64_or("s", 1.0)?,
            config.f64_or("xi", 1.0)?,
        )?),
        "V" => OperatorSpec::V(VSpec::new(
            config.f64("sigma")?,
            config.f64("tau")?,
            config.f64("theta")?,
            config.f64("u")?,
            config.f64_or("s", 1.0)?,
            config.f64_or("xi", 1.0)?,
            config.f64_or("eta", 0.0)?,
        )?),
        other => return Err(Error::Usage(format!("unknown kind `{other}`"))),
    };
    let results = spectra::ritz_spectrum(&spec, &orders)?;
    let mut pieces = Vec::new();
    for ritz in &results {
        let text = match config.output_format {
            OutputFormat::Csv => {
                let mut head = format!("# kind={kind} N={}\n", ritz.n);
                for (key, value) in &config.parameters {
                    if !matches!(key.as_str(), "format" | "out" | "N" | "kind") {
                        head.push_str(&format!("# {key}={value}\n"));
                    }
                }
                head + &ritz.to_csv()
            }
            OutputFormat::Json => {
                let sandwich = match &spec {
                    OperatorSpec::U(u) => {
                        serde_json::to_value(spectra::sandwich_check(u, ritz, epsilon)?)?
                    }
                    OperatorSpec::V(v) => {
                        serde_json::to_value(spectra::v_sandwich_check(v, ritz, epsilon)?)?
                    }
                };
                json_doc(
                    config,
                    "spectrum",
                    json!({
                        "spec": &spec,
                        "ritz": ritz,
                        "sandwich": sandwich,
                    }),
                )
            }
        };
        pieces.push((format!("N{}", ritz.n), text));
    }
    if pieces.len() == 1 {
        emit(config, &pieces[0].1)?;
    } else {
        emit_sweep(config, &pieces)?;
    }
    Ok(0)
}

fn run_bounds(config: &RunConfig) -> Result<i32> {
    let order = *config.orders(96)?.first().expect("nonempty orders");
    let report = match config.str_or("kind", "diag") {
        "diag" => {
            let params =
                TParams::new(config.f64("sigma")?, config.f64("u")?, config.f64_or("s", 1.0)?)?;
            let max_index = config.f64_or("K", 64.0)? as usize;
            analysis::fit_lower_constant(&params, max_index)?
        }
        "form" => {
            let params =
                TParams::new(config.f64("sigma")?, config.f64("u")?, config.f64_or("s", 1.0)?)?;
            analysis::fit_form_bound(&params, config.f64_or("epsilon", 0.1)?, 200, order)?
        }
        "tprime" => {
            let params = MixedParams::new(
                config.f64("sigma")?,
                config.f64("tau")?,
                config.f64("theta")?,
                config.f64_or("s", 1.0)?,
            )?;
            analysis::fit_tprime_bound(
                &params,
                config.f64("u")?,
                config.f64_or("epsilon", 0.1)?,
                200,
                order,
            )?
        }
        "decay" => {
            let matrix = match config.str_or("family", "d") {
                "d" => coeffs::d_matrix_closed(
                    &TParams::new(config.f64("sigma")?, config.f64("u")?, 1.0)?,
                    order,
                )?,
                "cprime" => coeffs::cprime_matrix(
                    &MixedParams::new(
                        config.f64("sigma")?,
                        config.f64("tau")?,
                        config.f64("theta")?,
                        config.f64_or("s", 1.0)?,
                    )?,
                    order,
                )?,
                other => {
                    return Err(Error::Usage(format!("unknown decay family `{other}`")));
                }
            };
            analysis::fit_decay_exponent(&matrix)?
        }
        "weierstrass" => {
            analysis::fit_weierstrass_constant(config.f64("t")?, config.f64_or("pmax", 1e4)? as usize)?
        }
        "gautschi" => {
            analysis::fit_gautschi_constant(config.f64("t")?, config.f64_or("pmax", 1e4)? as usize)?
        }
        other => return Err(Error::Usage(format!("unknown bounds kind `{other}`"))),
    };
    emit(config, &json_doc(config, "bounds", serde_json::to_value(&report)?))?;
    Ok(0)
}

fn run_regions(config: &RunConfig) -> Result<i32> {
    let name = config
        .parameters
        .get("set")
        .ok_or_else(|| Error::Usage("missing required key `set`".into()))?;
    let region = analysis::RegionId::parse(name)
        .ok_or_else(|| Error::Usage(format!("unknown region set `{name}`")))?;
    let point: Vec<f64> = match region.arity() {
        2 => vec![config.f64("sigma")?, config.f64("tau")?],
        3 => vec![config.f64("sigma")?, config.f64("tau")?, config.f64("theta")?],
        _ => vec![
            config.f64("alpha")?,
            config.f64("beta")?,
            config.f64("gamma")?,
            config.f64("delta")?,
        ],
    };
    let clauses = analysis::region_clauses(region, &point)?;
    let member = clauses.iter().all(|c| c.holds);
    let payload = json!({
        "set": name,
        "point": point,
        "member": member,
        "clauses": clauses,
    });
    emit(config, &json_doc(config, "regions", payload))?;
    Ok(0)
}

fn run_witten(config: &RunConfig) -> Result<i32> {
    let kappa = config.f64("kappa")?;
    let u = config.f64("u")?;
    let s = config.f64_or("s", 1.0)?;
    let sign = match config.str_or("sign", "plus") {
        "plus" => Sign::Plus,
        "minus" => Sign::Minus,
        other => return Err(Error::Usage(format!("unknown sign `{other}`"))),
    };
    let model = match config.f64_opt("mu")? {
        None => spectra::witten_build_length_one(kappa, u, s, sign)?,
        Some(mu) => spectra::witten_build(kappa, u, s, mu, sign)?,
    };
    let order = *config.orders(spectra::DEFAULT_TRUNCATION)?.first().expect("nonempty orders");
    let spectra_out = spectra::witten_spectrum(&model, order)?;
    let payload = json!({
        "model": &model,
        "N": order,
        "components": spectra_out,
    });
    emit(config, &json_doc(config, "witten", payload))?;
    Ok(0)
}

fn run_verify_all(config: &RunConfig) -> Result<i32> {
    let results = match config.parameters.get("only") {
        None => verify::run_all()?,
        Some(raw) => {
            let id: u32 = raw
                .parse()
                .map_err(|_| Error::Usage(format!("only= must be a criterion id, got `{raw}`")))?;
            vec![verify::run_criterion(id)?]
        }
    };
    let mut lines = Vec::with_capacity(results.len());
    for result in &results {
        let line = result.line();
        eprintln!("{line}");
        lines.push(line);
    }
    let all_passed = results.iter().all(|r| r.passed);
    let payload = json!({
        "passed": all_passed,
        "criteria": results,
        "lines": lines,
    });
    emit(config, &json_doc(config, "verify-all", payload))?;
    Ok(if all_passed { 0 } else { 1 })
}

/// Dispatches a parsed configuration and returns the process exit code for a
/// completed run (verification failures return 1; errors propagate).
pub fn run(config: &RunConfig) -> Result<i32> {
    match config.command {
        Command::Coeffs => run_coeffs(config),
        Command::Spectrum => run_spectrum(config),
        Command::Bounds => run_bounds(config),
        Command::Regions => run_regions(config),
        Command::Witten => run_witten(config),
        Command::VerifyAll => run_verify_all(config),
    }
}

/// Maps an error to the documented exit code.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::NonConvergence(_) => 3,
        Error::Hypothesis { .. } => 4,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> Result<RunConfig> {
        let owned: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        RunConfig::parse(&owned)
    }

    #[test]
    fn rejects_unknown_command_and_keys() {
        assert!(matches!(cfg(&["plot"]), Err(Error::Usage(_))));
        assert!(matches!(cfg(&["coeffs", "xi=1"]), Err(Error::Usage(_))));
        assert!(matches!(cfg(&["regions", "set=J1", "set=J2"]), Err(Error::Usage(_))));
        assert!(matches!(cfg(&["spectrum", "sigma"]), Err(Error::Usage(_))));
    }

    #[test]
    fn default_formats_per_command() {
        assert_eq!(cfg(&["coeffs"]).unwrap().output_format, OutputFormat::Csv);
        assert_eq!(cfg(&["spectrum"]).unwrap().output_format, OutputFormat::Json);
    }

    #[test]
    fn regions_membership_verdict() {
        let config =
            cfg(&["regions", "set=J1", "sigma=0.5", "tau=0.4"]).unwrap();
        assert_eq!(run(&config).unwrap(), 0);
    }

    #[test]
    fn domain_errors_map_to_exit_2() {
        let config = cfg(&["coeffs", "family=c", "sigma=0.1", "u=0.9", "N=8"]).unwrap();
        let err = run(&config).unwrap_err();
        assert_eq!(exit_code(&err), 2);
    }

    #[test]
    fn hypothesis_errors_map_to_exit_4() {
        let config = cfg(&[
            "spectrum", "kind=V", "sigma=0.8", "tau=0.3", "theta=0.1", "u=0.5", "N=8",
        ])
        .unwrap();
        let err = run(&config).unwrap_err();
        assert_eq!(exit_code(&err), 4);
    }

    #[test]
    fn json_output_is_reproducible() {
        let dir = std::env::temp_dir().join("dunkl_cli_repro");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.json");
        let config = cfg(&[
            "spectrum",
            "kind=U",
            "sigma=1",
            "u=0.5",
            "xi=1",
            "s=1",
            "N=16",
            &format!("out={}", path.display()),
        ])
        .unwrap();
        run(&config).unwrap();
        let first = std::fs::read(&path).unwrap();
        run(&config).unwrap();
        let second = std::fs::read(&path).unwrap();
        assert_eq!(first, second);
        assert!(serde_json::from_slice::<serde_json::Value>(&first).unwrap()["schema"] == 1);
    }

    #[test]
    fn sweep_writes_one_file_per_order() {
        let dir = std::env::temp_dir().join("dunkl_cli_sweep");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("sweep.csv");
        let config = cfg(&[
            "spectrum",
            "kind=U",
            "sigma=1",
            "u=0.5",
            "xi=1",
            "N=8,16",
            "format=csv",
            &format!("out={}", path.display()),
        ])
        .unwrap();
        run(&config).unwrap();
        assert!(dir.join("sweep_N8.csv").exists());
        assert!(dir.join("sweep_N16.csv").exists());
    }
}
