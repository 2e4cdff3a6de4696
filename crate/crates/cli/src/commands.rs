use std::io::Write;
use std::path::Path;

use bgc_core::channels::cp_margins;
use bgc_core::oracle::{
    apply_kraus, attenuator_kraus, char_function_fock, covariance_from_fock, default_n_max,
    matrix_power_fock, thermal_state_fock, tr_power_fock,
};
use bgc_core::states::uncertainty_margins;
use bgc_core::symplectic::Complex64;
use bgc_core::{
    divergence_exponent, g_p, ratio_sequence, scaling_exponent, ConvergenceReport, Error,
    GaussianChannel, GaussianState, SymplecticSpace,
};
use nalgebra::dvector;

use crate::config::{ChannelParts, Config, SweepSpec};
use crate::{CliError, Outcome, SweepArgs};

/// Pass mark for closed-form/oracle pairs.
pub const ORACLE_TOLERANCE: f64 = 1e-8;

pub const CSV_HEADER: &str = "beta,tr_in,tr_out,ratio,target,rel_error";

/// Shortest round-trip form, scientific outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn check(config: &Config, out: &mut dyn Write) -> Result<Outcome, CliError> {
    // Shapes first: a malformed entry is a parse error even if others fail.
    let channels = config
        .channels
        .iter()
        .map(|c| c.parts().map(|p| (c.name.as_str(), p)))
        .collect::<Result<Vec<_>, _>>()?;
    let states = config
        .states
        .iter()
        .map(|s| s.parts().map(|p| (s.name.as_str(), p)))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(sweep) = &config.sweep {
        sweep.modes()?;
    }

    let mut all_ok = true;
    for (name, ChannelParts { space, k, mu, .. }) in &channels {
        match cp_margins(k, mu, space) {
            Ok((m, ok)) => {
                all_ok &= ok;
                writeln!(
                    out,
                    "channel {name:?}: lambda_min(+) = {}, lambda_min(-) = {}, lambda_min = {}  {}",
                    num(m.plus),
                    num(m.minus),
                    num(m.min()),
                    mark(ok)
                )?;
            }
            Err(e) => {
                all_ok = false;
                writeln!(out, "channel {name:?}: {e}  FAIL")?;
            }
        }
    }
    for (name, (space, _, cov)) in &states {
        match uncertainty_margins(cov, space) {
            Ok((m, ok)) => {
                all_ok &= ok;
                writeln!(
                    out,
                    "state {name:?}: lambda_min(+) = {}, lambda_min(-) = {}, lambda_min = {}  {}",
                    num(m.plus),
                    num(m.minus),
                    num(m.min()),
                    mark(ok)
                )?;
            }
            Err(e) => {
                all_ok = false;
                writeln!(out, "state {name:?}: {e}  FAIL")?;
            }
        }
    }
    if let Some(sweep) = &config.sweep {
        let verdict = sweep.validate().and_then(|_| {
            let s = sweep
                .modes()?
                .or_else(|| config.channels.first().map(|c| c.s))
                .unwrap_or(1);
            sweep.family(&space_for(s)?).map(|_| ())
        });
        match verdict {
            Ok(()) => writeln!(out, "sweep: PASS")?,
            Err(e) => {
                all_ok = false;
                writeln!(out, "sweep: {e}  FAIL")?;
            }
        }
    }
    Ok(if all_ok { Outcome::Pass } else { Outcome::Fail })
}

fn space_for(s: usize) -> Result<SymplecticSpace, CliError> {
    SymplecticSpace::standard(s).map_err(|e| CliError::Parse(e.to_string()))
}

pub fn norm(
    config: &Config,
    p: f64,
    channel: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let specs = match channel {
        Some(_) => vec![config.channel(channel)?],
        None if config.channels.is_empty() => vec![config.channel(None)?],
        None => config.channels.iter().collect(),
    };
    let mut outcome = Outcome::Pass;
    for spec in specs {
        let ch = spec.build()?;
        match ch.norm_pp(p) {
            Ok(n) => writeln!(
                out,
                "channel {:?}: det K = {}, p = {p}, norm_pp = {}",
                spec.name,
                num(ch.det_k()),
                num(n)
            )?,
            Err(e @ Error::SingularK { .. }) => {
                outcome = Outcome::Fail;
                writeln!(out, "channel {:?}: det K = {}", spec.name, num(ch.det_k()))?;
                writeln!(err, "error: channel {:?}: {e}", spec.name)?;
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(outcome)
}

/// `[sweep]` table with command-line overrides applied.
pub fn effective_sweep(config: &Config, args: &SweepArgs) -> SweepSpec {
    let mut s = config.sweep.clone().unwrap_or_default();
    if args.p.is_some() {
        s.p = args.p;
    }
    if let Some(b) = args.beta_start {
        s.beta_start = b;
    }
    if let Some(b) = args.beta_stop {
        s.beta_stop = b;
    }
    if let Some(n) = args.points {
        s.points = n;
    }
    s
}

fn require_p(sweep: &SweepSpec) -> Result<f64, CliError> {
    sweep
        .p
        .ok_or_else(|| CliError::Parse("p is required (--p or [sweep].p)".into()))
}

/// Fixed-header CSV with 17 significant digits per value.
pub fn convergence_csv(report: &ConvergenceReport) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for i in 0..report.betas.len() {
        let row = [
            report.betas[i],
            report.tr_in[i],
            report.tr_out[i],
            report.ratios[i],
            report.target,
            report.relative_errors[i],
        ];
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Writes through a temporary file in the target directory, then renames,
/// so readers never see a partial report.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| CliError::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

pub fn converge(
    config: &Config,
    args: &SweepArgs,
    path: Option<&Path>,
    channel: Option<&str>,
    out: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let spec = config.channel(channel)?;
    let sweep = effective_sweep(config, args);
    let p = require_p(&sweep)?;
    let ch = spec.build()?;
    let family = sweep.family(ch.space())?;
    let report = ratio_sequence(&ch, &family, p, &sweep.betas()?)?;
    let csv = convergence_csv(&report);
    let target = path
        .map(Path::to_path_buf)
        .or_else(|| sweep.output_path.as_ref().map(Into::into));
    match target {
        None => out.write_all(csv.as_bytes())?,
        Some(path) => {
            write_atomic(&path, csv.as_bytes())?;
            let last = report.relative_errors.last().copied().unwrap_or(f64::NAN);
            writeln!(
                out,
                "wrote {} rows to {}; target = {}, final rel_error = {}, monotone = {}",
                report.betas.len(),
                path.display(),
                num(report.target),
                num(last),
                report.monotone_convergence()
            )?;
        }
    }
    Ok(Outcome::Pass)
}

pub fn scaling(
    config: &Config,
    args: &SweepArgs,
    q: Option<f64>,
    channel: Option<&str>,
    out: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let sweep = effective_sweep(config, args);
    let p = require_p(&sweep)?;
    let q = q.or(sweep.q);
    let betas = sweep.betas()?;
    let ch = match q {
        Some(_) => Some(config.channel(channel)?.build()?),
        None => None,
    };
    let s = match (&ch, sweep.modes()?) {
        (Some(c), _) => c.space().modes(),
        (None, Some(s)) => s,
        (None, None) => config.channels.first().map(|c| c.s).unwrap_or(1),
    };
    let family = sweep.family(&space_for(s)?)?;
    let fit = scaling_exponent(&family, p, &betas)?;
    writeln!(out, "s = {s}, p = {p}")?;
    writeln!(
        out,
        "norm exponent: fitted = {}, expected = {}, rms residual = {}",
        num(fit.fit.slope),
        num(fit.expected),
        num(fit.fit.rms_residual)
    )?;
    if let (Some(q), Some(ch)) = (q, ch) {
        let rep = divergence_exponent(&ch, &family, q, p, &betas)?;
        writeln!(
            out,
            "q->p exponent (q = {q}): fitted = {}, expected = {}, monotone tail = {}, verdict = {}",
            num(rep.fit.slope),
            num(rep.expected),
            rep.monotone_tail,
            rep.verdict
        )?;
    }
    Ok(Outcome::Pass)
}

/// One closed-form/oracle comparison.
#[derive(Debug, Clone)]
pub struct OracleRow {
    pub quantity: String,
    pub closed: Complex64,
    pub oracle: Complex64,
}

impl OracleRow {
    fn real(quantity: &str, closed: f64, oracle: f64) -> Self {
        Self {
            quantity: quantity.into(),
            closed: Complex64::new(closed, 0.0),
            oracle: Complex64::new(oracle, 0.0),
        }
    }

    pub fn diff(&self) -> f64 {
        (self.closed - self.oracle).norm()
    }

    pub fn passed(&self) -> bool {
        self.diff() <= ORACLE_TOLERANCE
    }
}

fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:.16e}", z.re)
    } else {
        format!("{:.16e}{:+.16e}i", z.re, z.im)
    }
}

/// Rows for a thermal mode with mean photon number `n` at power `p`, sent
/// through the attenuator of transmissivity `tau`.
pub fn oracle_rows(
    tau: f64,
    n: f64,
    p: f64,
    n_max: Option<usize>,
) -> Result<Vec<OracleRow>, CliError> {
    let space = SymplecticSpace::standard(1)?;
    let n_max = n_max.unwrap_or_else(|| default_n_max(n));
    let d = n + 0.5;
    let state = GaussianState::thermal(&space, d)?;
    let (rho, _) = thermal_state_fock(n, n_max)?;
    let mut rows = Vec::new();

    rows.push(OracleRow::real(
        "tr_rho_p",
        state.tr_rho_p(p)?,
        tr_power_fock(&rho, p)?,
    ));

    let normalized = matrix_power_fock(&rho, p, true)?;
    let moments = covariance_from_fock(&normalized)?;
    rows.push(OracleRow::real(
        "d*g_p(d)",
        d * g_p(d, p)?,
        moments.symplectic_eigenvalue(),
    ));

    let z = [0.7, -0.4];
    let zv = dvector![z[0], z[1]];
    rows.push(OracleRow {
        quantity: "char_function".into(),
        closed: state.char_function(&zv)?,
        oracle: char_function_fock(&rho, z)?,
    });
    let power = matrix_power_fock(&rho, p, false)?;
    rows.push(OracleRow {
        quantity: "power_char_function".into(),
        closed: state.power_char_function(p, &zv)?,
        oracle: char_function_fock(&power, z)?,
    });

    let channel = GaussianChannel::attenuator(&space, tau)?;
    let predicted = channel.apply(&state)?;
    let fock_out = covariance_from_fock(&apply_kraus(&attenuator_kraus(tau, n_max)?, &rho)?)?;
    rows.push(OracleRow::real(
        "attenuator d'",
        predicted.symplectic_spectrum()?[0],
        fock_out.symplectic_eigenvalue(),
    ));
    for (j, k, label) in [
        (0, 0, "attenuator cov'[q,q]"),
        (1, 1, "attenuator cov'[p,p]"),
        (0, 1, "attenuator cov'[q,p]"),
    ] {
        rows.push(OracleRow::real(
            label,
            predicted.cov()[(j, k)],
            fock_out.cov[j][k],
        ));
    }
    Ok(rows)
}

pub fn oracle(
    tau: f64,
    n: f64,
    p: f64,
    n_max: Option<usize>,
    out: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let rows = oracle_rows(tau, n, p, n_max)?;
    writeln!(
        out,
        "tau = {tau}, N = {n}, p = {p}, tolerance = {ORACLE_TOLERANCE:e}"
    )?;
    writeln!(
        out,
        "{:<22} {:<48} {:<48} {:<10} result",
        "quantity", "closed form", "oracle", "|diff|"
    )?;
    let mut all = true;
    for row in &rows {
        all &= row.passed();
        writeln!(
            out,
            "{:<22} {:<48} {:<48} {:<10.3e} {}",
            row.quantity,
            fmt_c(row.closed),
            fmt_c(row.oracle),
            row.diff(),
            mark(row.passed())
        )?;
    }
    Ok(if all { Outcome::Pass } else { Outcome::Fail })
}
