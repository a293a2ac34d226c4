use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{NslabError, Result};
use crate::norms::{write_curves_csv, DecayCurve};

/// One declared pass criterion, or an informational diagnostic when
/// `gating` is false.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    /// Acceptance criterion this check belongs to.
    pub criterion: Option<u8>,
    pub gating: bool,
    pub passed: bool,
    pub measured: f64,
    pub threshold: String,
    pub detail: String,
}

impl Check {
    pub fn gate(
        name: impl Into<String>,
        criterion: Option<u8>,
        passed: bool,
        measured: f64,
        threshold: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            criterion,
            gating: true,
            passed,
            measured,
            threshold: threshold.into(),
            detail: String::new(),
        }
    }

    pub fn info(name: impl Into<String>, passed: bool, measured: f64, threshold: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            criterion: None,
            gating: false,
            passed,
            measured,
            threshold: threshold.into(),
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub experiment: String,
    pub config_hash: String,
    /// Measurement window actually used.
    pub window: Option<[f64; 2]>,
    /// Guards that fired or constrained the run.
    pub guards: Vec<String>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(experiment: impl Into<String>, config_hash: impl Into<String>) -> Self {
        Self {
            experiment: experiment.into(),
            config_hash: config_hash.into(),
            window: None,
            guards: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// True when every gating check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.gating).all(|c| c.passed)
    }

    /// Status of an acceptance criterion, if this report carries it.
    pub fn criterion(&self, id: u8) -> Option<bool> {
        let mut relevant = self.checks.iter().filter(|c| c.criterion == Some(id)).peekable();
        relevant.peek()?;
        Some(relevant.all(|c| c.passed))
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} (config {})", self.experiment, self.config_hash);
        for c in &self.checks {
            let status = match (c.gating, c.passed) {
                (true, true) => "PASS",
                (true, false) => "FAIL",
                (false, true) => "ok",
                (false, false) => "note",
            };
            let crit = c.criterion.map(|i| format!("[{i}] ")).unwrap_or_default();
            let _ = write!(
                s,
                "  {status:<4} {crit}{}: {:.6e} ({})",
                c.name, c.measured, c.threshold
            );
            if !c.detail.is_empty() {
                let _ = write!(s, " {}", c.detail);
            }
            s.push('\n');
        }
        s
    }

    fn comments(&self) -> Vec<String> {
        let mut out = vec![format!(
            "experiment={} config_hash={}",
            self.experiment, self.config_hash
        )];
        if let Some([a, b]) = self.window {
            out.push(format!("window=[{a},{b}]"));
        }
        for g in &self.guards {
            out.push(format!("guard {g}"));
        }
        for c in &self.checks {
            out.push(format!(
                "check name={} criterion={} gating={} passed={} measured={:.12e} threshold={}",
                c.name,
                c.criterion.map(|i| i.to_string()).unwrap_or_else(|| "-".into()),
                c.gating,
                c.passed,
                c.measured,
                c.threshold
            ));
        }
        out
    }
}

/// Curves and report of one experiment run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub curves: Vec<DecayCurve>,
}

impl Outcome {
    /// Writes `<experiment>.csv` and `<experiment>_report.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let name = &self.report.experiment;
        let mut csv = std::io::BufWriter::new(std::fs::File::create(dir.join(format!("{name}.csv")))?);
        write_curves_csv(&mut csv, &self.curves, &self.report.comments())?;
        csv.flush()?;
        let json = serde_json::to_string_pretty(&self.report)?;
        std::fs::write(dir.join(format!("{name}_report.json")), json + "\n")?;
        Ok(())
    }
}

/// `(t, v)` pairs of `curve` inside `[t_lo, t_hi]`.
pub fn window_points(curve: &DecayCurve, window: [f64; 2]) -> Vec<(f64, f64)> {
    curve
        .times
        .iter()
        .zip(&curve.values)
        .filter(|(t, _)| **t >= window[0] && **t <= window[1])
        .map(|(t, v)| (*t, *v))
        .collect()
}

/// Checks that the window spans at least `factor` in time.
pub fn check_window(window: [f64; 2], factor: f64) -> Result<()> {
    if !(window[0] > 0.0) || !(window[1] >= factor * window[0]) {
        return Err(NslabError::InvalidParameter(format!(
            "window [{}, {}] spans less than a factor {factor}",
            window[0], window[1]
        )));
    }
    Ok(())
}

/// `(v_first / v_last)^{1/log₁₀(t_last/t_first)}`.
pub fn drop_per_decade(points: &[(f64, f64)]) -> f64 {
    match (points.first(), points.last()) {
        (Some(&(t0, v0)), Some(&(t1, v1))) if t1 > t0 && v1 > 0.0 => (v0 / v1).powf(1.0 / (t1 / t0).log10()),
        (Some(_), Some(&(_, 0.0))) => f64::INFINITY,
        _ => f64::NAN,
    }
}

/// Number of steps along which the sequence rises by more than `rel`.
pub fn rises(points: &[(f64, f64)], rel: f64) -> usize {
    points.windows(2).filter(|w| w[1].1 > w[0].1 * (1.0 + rel)).count()
}

/// `max/min - 1` of the values.
pub fn spread(points: &[(f64, f64)]) -> f64 {
    let max = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let min = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    max / min - 1.0
}
