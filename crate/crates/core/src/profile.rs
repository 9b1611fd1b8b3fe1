//! Performance profiles over the shifted objective metric
//! `Q_δ(x) = f(x) − f_min + δ` (feasible runs) or `+∞` (infeasible runs).

use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::homotopy::{MethodId, RunResult, Termination};
use crate::scalar::Real;

/// Number of points of the default τ grid.
pub const TAU_POINTS: usize = 200;
/// Upper cap of the default τ grid.
pub const TAU_CAP: f64 = 1e6;

pub fn q_value(f_value: f64, max_violation: f64, f_min: f64, delta: f64, feas_tol: f64) -> f64 {
    if max_violation <= feas_tol && f_value.is_finite() {
        f_value - f_min + delta
    } else {
        f64::INFINITY
    }
}

/// `Q_δ` of one run; the run counts as feasible when every constraint,
/// ordinary or disjunctive, is violated by at most `feas_tol`.
pub fn q_metric<T: Real>(result: &RunResult<T>, f_min: T, delta: T, feas_tol: T) -> T {
    if result.max_violation <= feas_tol && result.f_value.is_finite() {
        result.f_value - f_min + delta
    } else {
        T::infinity()
    }
}

/// Flattened outcome of one `(method, start)` run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub method: MethodId,
    pub start: usize,
    pub f_value: f64,
    pub max_or_violation: f64,
    pub max_violation: f64,
    pub feasible: bool,
    pub stages: usize,
    pub inner_iterations: usize,
    pub termination: String,
    /// Strongest certified stationarity class, `none`, or `-` if not checked.
    pub stationarity: String,
}

pub fn termination_label(t: Termination) -> String {
    match t {
        Termination::Feasible => "feasible".into(),
        Termination::ScheduleExhausted => "schedule-exhausted".into(),
        Termination::InnerFailure { stage } => format!("inner-failure@{stage}"),
    }
}

impl RunRecord {
    pub fn from_run(start: usize, r: &RunResult<f64>, stationarity: &str) -> Self {
        Self {
            method: r.method,
            start,
            f_value: r.f_value,
            max_or_violation: r.max_or_violation,
            max_violation: r.max_violation,
            feasible: r.feasible,
            stages: r.stages.len(),
            inner_iterations: r.total_inner_iterations(),
            termination: termination_label(r.termination),
            stationarity: stationarity.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FMinSource {
    Known,
    BestFeasible,
}

impl FMinSource {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Known => "known-optimum",
            Self::BestFeasible => "best-feasible-run",
        }
    }
}

/// The known optimum if there is one, else the best feasible value among
/// the records.
pub fn resolve_f_min(known: Option<f64>, records: &[RunRecord], feas_tol: f64) -> Option<(f64, FMinSource)> {
    if let Some(f) = known {
        return Some((f, FMinSource::Known));
    }
    records
        .iter()
        .filter(|r| r.max_violation <= feas_tol && r.f_value.is_finite())
        .map(|r| r.f_value)
        .min_by(|a, b| a.total_cmp(b))
        .map(|f| (f, FMinSource::BestFeasible))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    pub methods: Vec<MethodId>,
    pub starts: Vec<usize>,
    /// `q_values[s][a]` for start `s` and method `a`.
    pub q_values: Vec<Vec<f64>>,
    pub delta: f64,
    pub f_min: f64,
    pub feas_tol: f64,
}

impl ProfileTable {
    /// Checks the shape and that no finite metric is negative.
    pub fn new(
        methods: Vec<MethodId>,
        starts: Vec<usize>,
        q_values: Vec<Vec<f64>>,
        delta: f64,
        f_min: f64,
        feas_tol: f64,
    ) -> Result<Self> {
        if methods.is_empty() {
            return Err(Error::InvalidArgument("a profile needs at least one method".into()));
        }
        if !(delta >= 0.0) {
            return Err(Error::InvalidArgument("δ must be nonnegative".into()));
        }
        if q_values.len() != starts.len() {
            return Err(Error::DimensionMismatch { expected: starts.len(), got: q_values.len() });
        }
        for row in &q_values {
            if row.len() != methods.len() {
                return Err(Error::DimensionMismatch { expected: methods.len(), got: row.len() });
            }
            if let Some(q) = row.iter().find(|q| q.is_nan() || **q < -1e-8) {
                return Err(Error::InvalidArgument(format!("metric {q} below zero: f_min is not a lower bound")));
            }
        }
        Ok(Self { methods, starts, q_values, delta, f_min, feas_tol })
    }

    /// Builds the table from run records; starts are taken in ascending order
    /// and every `(start, method)` cell must be present exactly once.
    pub fn from_records(
        records: &[RunRecord],
        methods: &[MethodId],
        f_min: f64,
        delta: f64,
        feas_tol: f64,
    ) -> Result<Self> {
        let mut starts: Vec<usize> = records.iter().map(|r| r.start).collect();
        starts.sort_unstable();
        starts.dedup();
        let mut q = vec![vec![f64::NAN; methods.len()]; starts.len()];
        for r in records {
            let Some(a) = methods.iter().position(|m| *m == r.method) else { continue };
            let s = starts.binary_search(&r.start).expect("start collected above");
            if !q[s][a].is_nan() {
                return Err(Error::InvalidArgument(format!("duplicate record for {} start {}", r.method, r.start)));
            }
            q[s][a] = q_value(r.f_value, r.max_violation, f_min, delta, feas_tol);
        }
        if let Some((s, a)) = q.iter().enumerate().find_map(|(s, row)| row.iter().position(|v| v.is_nan()).map(|a| (s, a))) {
            return Err(Error::InvalidArgument(format!("missing record for {} start {}", methods[a], starts[s])));
        }
        Self::new(methods.to_vec(), starts, q, delta, f_min, feas_tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ratios {
    pub methods: Vec<MethodId>,
    /// `values[s][a] = Q(s, a) / min_α Q(s, α)`.
    pub values: Vec<Vec<f64>>,
    /// Rows where no method produced a feasible point.
    pub unsolved: Vec<usize>,
}

/// Row-wise performance ratios. A row whose best metric is `+∞` is flagged
/// and set to `+∞`. A row whose best metric is 0 (possible for `δ = 0`) gives
/// ratio 1 to the methods attaining it and `+∞` to the others.
pub fn ratios(table: &ProfileTable) -> Ratios {
    let mut unsolved = Vec::new();
    let values = table
        .q_values
        .iter()
        .enumerate()
        .map(|(s, row)| {
            let best = row.iter().copied().fold(f64::INFINITY, f64::min);
            if best == f64::INFINITY {
                unsolved.push(s);
                return vec![f64::INFINITY; row.len()];
            }
            row.iter()
                .map(|q| {
                    if best <= 0.0 {
                        if *q <= best {
                            1.0
                        } else {
                            f64::INFINITY
                        }
                    } else {
                        q / best
                    }
                })
                .collect()
        })
        .collect();
    Ratios { methods: table.methods.clone(), values, unsolved }
}

/// `ρ_a(τ) = |{s : r_{s,a} ≤ τ}| / |S|` on every grid point.
pub fn rho_curve(r: &Ratios, method: MethodId, tau: &[f64]) -> Result<Vec<f64>> {
    let a = r
        .methods
        .iter()
        .position(|m| *m == method)
        .ok_or_else(|| Error::InvalidArgument(format!("method {method} is not part of the profile")))?;
    if tau.iter().any(|t| !(*t >= 1.0)) {
        return Err(Error::InvalidArgument("τ grid must lie in [1, ∞)".into()));
    }
    let n = r.values.len();
    Ok(tau
        .iter()
        .map(|t| {
            if n == 0 {
                return 0.0;
            }
            let count = r.values.iter().filter(|row| row[a] <= *t).count();
            count as f64 / n as f64
        })
        .collect())
}

/// Geometric grid of [`TAU_POINTS`] points from 1 to the largest finite
/// ratio, capped at [`TAU_CAP`]. When every finite ratio equals 1 the grid
/// runs to 2 so that it stays strictly increasing.
pub fn tau_grid(r: &Ratios) -> Vec<f64> {
    let largest = r.values.iter().flatten().copied().filter(|v| v.is_finite()).fold(1.0, f64::max);
    let hi = largest.clamp(2.0, TAU_CAP);
    let step = hi.ln() / (TAU_POINTS - 1) as f64;
    let mut grid: Vec<f64> = (0..TAU_POINTS).map(|k| (k as f64 * step).exp()).collect();
    grid[0] = 1.0;
    grid[TAU_POINTS - 1] = hi;
    grid
}

/// Curves of every method of the profile on the given grid.
pub fn curves(r: &Ratios, tau: &[f64]) -> Result<Vec<Vec<f64>>> {
    r.methods.iter().map(|m| rho_curve(r, *m, tau)).collect()
}

const RESULT_HEADER: [&str; 10] = [
    "method",
    "start",
    "f_value",
    "max_or_violation",
    "max_violation",
    "feasible",
    "stages",
    "inner_iterations",
    "termination",
    "stationarity",
];

/// One row per run; floats use the shortest representation that reads back
/// to the identical value.
pub fn write_results_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(RESULT_HEADER)?;
    for r in records {
        w.write_record([
            r.method.as_str().to_string(),
            r.start.to_string(),
            r.f_value.to_string(),
            r.max_or_violation.to_string(),
            r.max_violation.to_string(),
            r.feasible.to_string(),
            r.stages.to_string(),
            r.inner_iterations.to_string(),
            r.termination.clone(),
            r.stationarity.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results_csv(path: &Path) -> Result<Vec<RunRecord>> {
    let mut rd = csv::Reader::from_path(path)?;
    let header = rd.headers()?.clone();
    if header.iter().ne(RESULT_HEADER.iter().copied()) {
        return Err(Error::InvalidArgument(format!("unexpected results header in {}", path.display())));
    }
    let bad = |line: usize, what: &str| Error::InvalidArgument(format!("results row {line}: invalid {what}"));
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let float = |k: usize, what: &str| rec[k].parse::<f64>().map_err(|_| bad(line, what));
        let int = |k: usize, what: &str| rec[k].parse::<usize>().map_err(|_| bad(line, what));
        out.push(RunRecord {
            method: rec[0].parse()?,
            start: int(1, "start")?,
            f_value: float(2, "f_value")?,
            max_or_violation: float(3, "max_or_violation")?,
            max_violation: float(4, "max_violation")?,
            feasible: rec[5].parse().map_err(|_| bad(line, "feasible"))?,
            stages: int(6, "stages")?,
            inner_iterations: int(7, "inner_iterations")?,
            termination: rec[8].to_string(),
            stationarity: rec[9].to_string(),
        });
    }
    Ok(out)
}

/// Wall-clock times, kept apart from the results so that those stay
/// reproducible byte for byte.
pub fn write_timing_csv(path: &Path, rows: &[(MethodId, usize, Duration)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["method", "start", "wall_time_s"])?;
    for (m, s, d) in rows {
        w.write_record([m.as_str().to_string(), s.to_string(), d.as_secs_f64().to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `tau` column followed by one column per method in profile order.
pub fn write_profile_csv(path: &Path, methods: &[MethodId], tau: &[f64], curves: &[Vec<f64>]) -> Result<()> {
    if curves.len() != methods.len() {
        return Err(Error::DimensionMismatch { expected: methods.len(), got: curves.len() });
    }
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["tau".to_string()];
    header.extend(methods.iter().map(|m| m.as_str().to_string()));
    w.write_record(&header)?;
    for (k, t) in tau.iter().enumerate() {
        let mut row = vec![t.to_string()];
        row.extend(curves.iter().map(|c| c[k].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a profile CSV back into `(methods, tau, curves)`.
pub fn read_profile_csv(path: &Path) -> Result<(Vec<MethodId>, Vec<f64>, Vec<Vec<f64>>)> {
    let mut rd = csv::Reader::from_path(path)?;
    let header = rd.headers()?.clone();
    if header.get(0) != Some("tau") {
        return Err(Error::InvalidArgument("profile CSV must start with a tau column".into()));
    }
    let methods = header.iter().skip(1).map(str::parse).collect::<Result<Vec<MethodId>>>()?;
    let mut tau = Vec::new();
    let mut curves = vec![Vec::new(); methods.len()];
    for rec in rd.records() {
        let rec = rec?;
        let parse = |s: &str| s.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad number `{s}`")));
        tau.push(parse(&rec[0])?);
        for (a, c) in curves.iter_mut().enumerate() {
            c.push(parse(&rec[a + 1])?);
        }
    }
    Ok((methods, tau, curves))
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// Static step chart of the curves over a logarithmic τ axis.
pub fn render_svg(title: &str, methods: &[MethodId], tau: &[f64], curves: &[Vec<f64>]) -> String {
    let (w, h) = (720.0, 440.0);
    let (left, right, top, bottom) = (60.0, 170.0, 40.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let hi = tau.last().copied().unwrap_or(2.0).max(1.0 + 1e-12);
    let xmap = |t: f64| left + pw * t.max(1.0).ln() / hi.ln();
    let ymap = |r: f64| top + ph * (1.0 - r);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#, left + pw / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{left:.2}" y="{top:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
    );
    for k in 0..=5 {
        let r = k as f64 / 5.0;
        let y = ymap(r);
        let _ = writeln!(s, r##"<line x1="{left:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##, left + pw);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{r:.1}</text>"#, left - 6.0, y + 4.0);
    }
    let decades = hi.log10().ceil().max(1.0) as i32;
    for d in 0..=decades {
        let t = 10f64.powi(d);
        if t > hi * (1.0 + 1e-12) {
            break;
        }
        let x = xmap(t);
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{top:.2}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd"/>"##, top + ph);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#, top + ph + 16.0);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">τ</text>"#, left + pw / 2.0, h - 10.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">ρ(τ)</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );
    for (a, (m, c)) in methods.iter().zip(curves).enumerate() {
        let color = PALETTE[a % PALETTE.len()];
        let mut pts = String::new();
        let mut prev: Option<f64> = None;
        for (t, r) in tau.iter().zip(c) {
            let (x, y) = (xmap(*t), ymap(*r));
            if let Some(py) = prev {
                let _ = write!(pts, "{x:.2},{py:.2} ");
            }
            let _ = write!(pts, "{x:.2},{y:.2} ");
            prev = Some(y);
        }
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#, pts.trim_end());
        let ly = top + 16.0 + 20.0 * a as f64;
        let lx = left + pw + 16.0;
        let _ = writeln!(s, r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#, lx + 24.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 30.0, ly + 4.0, m.as_str());
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn write_svg(path: &Path, title: &str, methods: &[MethodId], tau: &[f64], curves: &[Vec<f64>]) -> Result<()> {
    std::fs::write(path, render_svg(title, methods, tau, curves))?;
    Ok(())
}

/// Curves of a profile on its default grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub methods: Vec<MethodId>,
    pub tau: Vec<f64>,
    pub curves: Vec<Vec<f64>>,
    pub unsolved: usize,
}

impl Profile {
    pub fn from_table(table: &ProfileTable) -> Result<Self> {
        let r = ratios(table);
        let tau = tau_grid(&r);
        let curves = curves(&r, &tau)?;
        Ok(Self { methods: table.methods.clone(), tau, curves, unsolved: r.unsolved.len() })
    }

    /// Writes `profile.csv` and `profile.svg` into `dir`.
    pub fn write(&self, dir: &Path, title: &str) -> Result<()> {
        write_profile_csv(&dir.join("profile.csv"), &self.methods, &self.tau, &self.curves)?;
        write_svg(&dir.join("profile.svg"), title, &self.methods, &self.tau, &self.curves)
    }
}
