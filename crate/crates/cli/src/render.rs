//! Report construction for the three output formats.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use odbif::constants::{
    ClassicalRadii, DirichletConstants, ModeTable, ProblemDims, Provenance, SlabConstants,
};
use odbif::profiles::{DomainProfile, SolutionField};
use odbif::pullback::{Eigenpair, TensorGrid};
use odbif::spectra::{RadialEigenvalue, SlabEigenvalue};
use odbif::verify::{EigenReport, FlatConvergence, LinearizationReport, TransversalityReport};
use odbif::ResidualReport;
use serde_json::{json, Value};

use crate::{Format, SCHEMA};

pub const BRANCH_WINDOW: (f64, f64) = (1.8, 2.2);
pub const CONTROL_MAX: f64 = 1.2;
pub const LINEARIZATION_MIN_RATE: f64 = 0.9;
pub const FLAT_RATIO_WINDOW: (f64, f64) = (3.5, 4.5);
pub const DEVIATION_RATIO_WINDOW: (f64, f64) = (3.0, 5.0);

pub struct Report {
    pub json: Value,
    pub text: String,
    pub csv: String,
    pub verdict: Option<bool>,
}

impl Report {
    fn new(command: &str, body: Value) -> Self {
        let mut json = json!({ "schema": SCHEMA, "command": command });
        if let (Value::Object(dst), Value::Object(src)) = (&mut json, body) {
            dst.extend(src);
        }
        Report {
            json,
            text: String::new(),
            csv: String::new(),
            verdict: None,
        }
    }

    fn judged(mut self, pass: bool) -> Self {
        self.json["verdict"] = json!(verdict(pass));
        let _ = writeln!(self.text, "{}", verdict(pass));
        self.verdict = Some(pass);
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.json).expect("report values serialize");
                s.push('\n');
                s
            }
            Format::Text => self.text.clone(),
            Format::Csv => self.csv.clone(),
        }
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn dims_line(d: ProblemDims) -> String {
    format!("N={} m={} n={}", d.dim, d.m, d.n)
}

fn in_window(x: f64, (lo, hi): (f64, f64)) -> bool {
    x >= lo && x <= hi
}

pub fn dirichlet_constants(
    d: ProblemDims,
    c: &DirichletConstants,
    prov: &Provenance,
    radii: &ClassicalRadii,
) -> Report {
    let mut r = Report::new(
        "constants",
        json!({
            "problem": "dirichlet",
            "N": d.dim, "m": d.m, "n": d.n,
            "constants": c,
            "classical": radii,
            "provenance": prov,
        }),
    );
    let rows = [
        ("j", c.j),
        ("lambda_n", c.lambda_n),
        ("mu_n", c.mu_n),
        ("kappa_n", c.kappa_n),
        ("c_n", c.c_n),
        ("beta_n", c.beta_n),
        ("delta_n", c.delta_n),
        ("r_star", c.r_star),
        ("neumann_magnitude", c.neumann_magnitude),
        ("classical_r_star", radii.r_star),
        ("classical_rho", radii.rho),
        ("classical_t_star", radii.t_star),
        ("nu1_residual", prov.nu1_residual),
    ];
    let _ = writeln!(r.text, "dirichlet constants  {}", dims_line(d));
    r.csv.push_str("name,value\n");
    for (name, v) in rows {
        let _ = writeln!(r.text, "  {name:<18} {v}");
        let _ = writeln!(r.csv, "{name},{v}");
    }
    r
}

pub fn slab_constants(d: ProblemDims, c: &SlabConstants) -> Report {
    let mut r = Report::new(
        "constants",
        json!({ "problem": "slab", "m": d.m, "n": d.n, "constants": c }),
    );
    let _ = writeln!(r.text, "slab constants  m={} n={}", d.m, d.n);
    r.csv.push_str("name,value\n");
    for (name, v) in [
        ("gamma_n", c.gamma_n),
        ("d_n", c.d_n),
        ("a_n", c.a_n),
        ("b_n", c.b_n),
    ] {
        let _ = writeln!(r.text, "  {name:<8} {v}");
        let _ = writeln!(r.csv, "{name},{v}");
    }
    r
}

pub fn radial_spectrum(
    dim: usize,
    evs: &[RadialEigenvalue],
    oracle: Option<&[f64]>,
    grid: Option<usize>,
) -> Report {
    let mut r = Report::new(
        "spectrum",
        json!({ "problem": "dirichlet", "N": dim, "eigenvalues": evs, "oracle_grid": grid, "oracle": oracle }),
    );
    let _ = writeln!(r.text, "radial Robin eigenvalues  N={dim}");
    r.csv.push_str(if oracle.is_some() {
        "ell,nu,sqrt_nu,oracle\n"
    } else {
        "ell,nu,sqrt_nu\n"
    });
    for (i, e) in evs.iter().enumerate() {
        match oracle {
            Some(o) => {
                let gap = (o[i] - e.value).abs() / e.value;
                let _ = writeln!(
                    r.text,
                    "  {:>3}  {:<22} oracle {:<22} rel gap {gap:.3e}",
                    e.ell, e.value, o[i]
                );
                let _ = writeln!(r.csv, "{},{},{},{}", e.ell, e.value, e.sqrt_value, o[i]);
            }
            None => {
                let _ = writeln!(
                    r.text,
                    "  {:>3}  {:<22} sqrt {}",
                    e.ell, e.value, e.sqrt_value
                );
                let _ = writeln!(r.csv, "{},{},{}", e.ell, e.value, e.sqrt_value);
            }
        }
    }
    r
}

pub fn slab_spectrum(evs: &[SlabEigenvalue]) -> Report {
    let mut r = Report::new("spectrum", json!({ "problem": "slab", "eigenvalues": evs }));
    let _ = writeln!(r.text, "slab eigenvalues");
    r.csv.push_str("ell,value\n");
    for e in evs {
        let _ = writeln!(r.text, "  {:>3}  {}", e.ell, e.value);
        let _ = writeln!(r.csv, "{},{}", e.ell, e.value);
    }
    r
}

pub fn kernel(t: &ModeTable, kmax: usize, lmax: usize) -> Report {
    let miss = t
        .nearest_miss()
        .map(|(k, l, v)| json!({ "k": k, "ell": l, "sigma": v }));
    let mut r = Report::new(
        "kernel",
        json!({ "table": t, "kmax": kmax, "lmax": lmax, "nearest_miss": miss }),
    );
    let hits: Vec<String> = t
        .kernel_hits
        .iter()
        .map(|(k, l)| format!("({k},{l})"))
        .collect();
    let _ = writeln!(
        r.text,
        "mode table {kmax}x{lmax}  {}  lambda={}",
        dims_line(t.dims),
        t.lambda
    );
    let _ = writeln!(r.text, "hits: [{}]", hits.join(", "));
    if let Some((k, l, v)) = t.nearest_miss() {
        let _ = writeln!(r.text, "nearest miss: ({k},{l}) sigma={v}");
    }
    r.csv.push_str("k,ell\n");
    for (k, l) in &t.kernel_hits {
        let _ = writeln!(r.csv, "{k},{l}");
    }
    r
}

pub fn residual(rep: &ResidualReport, control: bool) -> Report {
    let pass = if control {
        rep.control_pass(CONTROL_MAX)
    } else {
        rep.kernel_pass(BRANCH_WINDOW.0, BRANCH_WINDOW.1)
    };
    let criterion = if control {
        json!({ "max_slope": CONTROL_MAX })
    } else {
        json!({ "window": [BRANCH_WINDOW.0, BRANCH_WINDOW.1] })
    };
    let mut r = Report::new(
        &format!("verify {}", rep.variant),
        json!({ "report": rep, "criterion": criterion }),
    );
    let _ = writeln!(
        r.text,
        "verify {}  {} {}  lambda={}  grid={}",
        rep.variant,
        rep.problem.name(),
        dims_line(rep.dims),
        rep.lambda,
        rep.grid
    );
    let _ = writeln!(
        r.text,
        "  {:>10}  {:>12}  {:>12}",
        "s", "interior", "boundary"
    );
    r.csv.push_str("s,interior,boundary\n");
    for ((s, i), b) in rep
        .s_values
        .iter()
        .zip(&rep.interior_sup)
        .zip(&rep.boundary_sup)
    {
        let _ = writeln!(r.text, "  {s:>10}  {i:>12.5e}  {b:>12.5e}");
        let _ = writeln!(r.csv, "{s},{i},{b}");
    }
    let _ = writeln!(
        r.text,
        "slopes: interior {:.4}  boundary {:.4}  combined {:.4}",
        rep.interior_slope, rep.boundary_slope, rep.fitted_slope
    );
    r.judged(pass)
}

pub fn linearization(rep: &LinearizationReport, kernel_probe: bool) -> Report {
    let pass = rep.interior_rate >= LINEARIZATION_MIN_RATE;
    let mut r = Report::new(
        "verify linearization",
        json!({ "report": rep, "kernel_probe": kernel_probe, "criterion": { "min_rate": LINEARIZATION_MIN_RATE } }),
    );
    let _ = writeln!(
        r.text,
        "verify linearization  {} {}  angular mode {}  sup|DG| interior {:.5e} boundary {:.5e}",
        rep.problem.name(),
        dims_line(rep.dims),
        rep.angular_mode,
        rep.dg_interior_sup,
        rep.dg_boundary_sup
    );
    let _ = writeln!(
        r.text,
        "  {:>10}  {:>12}  {:>12}",
        "eps", "interior", "boundary"
    );
    r.csv.push_str("eps,interior,boundary\n");
    for ((e, i), b) in rep
        .eps
        .iter()
        .zip(&rep.interior_deviation)
        .zip(&rep.boundary_deviation)
    {
        let _ = writeln!(r.text, "  {e:>10}  {i:>12.5e}  {b:>12.5e}");
        let _ = writeln!(r.csv, "{e},{i},{b}");
    }
    let _ = writeln!(
        r.text,
        "rates: interior {:.4}  boundary {:.4}",
        rep.interior_rate, rep.boundary_rate
    );
    r.judged(pass)
}

pub fn transversality(rep: &TransversalityReport) -> Report {
    let pass = rep.value < 0.0;
    let mut r = Report::new("verify transversality", json!({ "report": rep }));
    let _ = writeln!(
        r.text,
        "transversality  {} {}  pairing {}",
        rep.problem.name(),
        dims_line(rep.dims),
        rep.value
    );
    r.csv.push_str("problem,N,m,n,pairing\n");
    let _ = writeln!(
        r.csv,
        "{},{},{},{},{}",
        rep.problem.name(),
        rep.dims.dim,
        rep.dims.m,
        rep.dims.n,
        rep.value
    );
    r.judged(pass)
}

pub fn eigen(rep: &EigenReport, flat: &FlatConvergence) -> Report {
    let flat_ok = flat.ratios.iter().all(|&q| in_window(q, FLAT_RATIO_WINDOW));
    let dev_ok = !rep.ratios.is_empty()
        && rep
            .ratios
            .iter()
            .all(|&q| in_window(q, DEVIATION_RATIO_WINDOW));
    let mut r = Report::new(
        "verify eigen",
        json!({
            "report": rep,
            "flat": flat,
            "criterion": {
                "flat_ratio_window": [FLAT_RATIO_WINDOW.0, FLAT_RATIO_WINDOW.1],
                "deviation_ratio_window": [DEVIATION_RATIO_WINDOW.0, DEVIATION_RATIO_WINDOW.1],
            },
        }),
    );
    let _ = writeln!(
        r.text,
        "verify eigen  {} {}  target {}",
        rep.problem.name(),
        dims_line(rep.dims),
        rep.target
    );
    let _ = writeln!(r.text, "flat: exact {}", flat.exact);
    for ((g, v), e) in flat.grids.iter().zip(&flat.eigenvalues).zip(&flat.errors) {
        let _ = writeln!(r.text, "  {g:>10}  {v:<22} error {e:.4e}");
    }
    let ratios: Vec<String> = flat.ratios.iter().map(|q| format!("{q:.4}")).collect();
    let _ = writeln!(r.text, "  halving ratios: {}", ratios.join(" "));
    r.csv
        .push_str("s,grid,eigenvalue,eigen_residual,deviation\n");
    for c in &rep.cells {
        let _ = writeln!(
            r.text,
            "  s={:<8} {:>10}  eigenvalue {:<22} residual {:.2e}  D {:.5e}",
            c.s, c.grid, c.eigenvalue, c.eigen_residual, c.deviation
        );
        let _ = writeln!(
            r.csv,
            "{},{},{},{},{}",
            c.s, c.grid, c.eigenvalue, c.eigen_residual, c.deviation
        );
    }
    for (s, d) in &rep.extrapolated {
        let _ = writeln!(r.text, "  extrapolated D(s={s}) = {d:.6e}");
    }
    let ratios: Vec<String> = rep.ratios.iter().map(|q| format!("{q:.4}")).collect();
    let _ = writeln!(r.text, "  s-halving ratios: {}", ratios.join(" "));
    r.judged(flat_ok && dev_ok)
}

pub fn exported_profile(p: &DomainProfile, written: &[PathBuf]) -> Report {
    let files: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
    let mut r = Report::new(
        "export-profile",
        json!({ "profile": p, "min_value": p.min_value(), "files": files }),
    );
    let _ = writeln!(
        r.text,
        "{} profile  s={}  min h {}",
        p.kind.name(),
        p.s,
        p.min_value()
    );
    r.csv.push_str("file\n");
    for f in &files {
        let _ = writeln!(r.text, "  wrote {f}");
        let _ = writeln!(r.csv, "{f}");
    }
    r
}

pub fn eigenfield(
    field: &SolutionField,
    grid: &TensorGrid,
    ep: &Eigenpair,
    neumann: &[f64],
    path: &Path,
) -> Report {
    let mean = neumann.iter().sum::<f64>() / neumann.len() as f64;
    let mut r = Report::new(
        "eigenfield",
        json!({
            "problem": field.kind,
            "dims": field.dims,
            "s": field.s,
            "grid": grid.descriptor(),
            "eigenvalue": ep.value,
            "residual": ep.residual,
            "iterations": ep.iterations,
            "neumann": neumann,
            "file": path.display().to_string(),
        }),
    );
    let _ = writeln!(
        r.text,
        "eigenfield  {} {}  s={}  grid {}  eigenvalue {}  residual {:.2e}  mean Neumann {}",
        field.kind.name(),
        dims_line(field.dims),
        field.s,
        grid.descriptor(),
        ep.value,
        ep.residual,
        mean
    );
    let _ = writeln!(r.text, "  wrote {}", path.display());
    r.csv.push_str("j,neumann\n");
    for (j, v) in neumann.iter().enumerate() {
        let _ = writeln!(r.csv, "{j},{v}");
    }
    r
}
