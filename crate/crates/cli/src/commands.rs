use std::path::{Path, PathBuf};

use framekz::cholesky::{cholesky_psd, validate_psd};
use framekz::hilbert::*;
use framekz::kaczmarz::*;
use framekz::synthesis::*;
use framekz::triangular::*;
use framekz::BesselViolation;
use serde::Serialize;

use crate::io::{self, CholeskyFile, MatrixFile, SequenceFile};
use crate::report::{fmt_list, fmt_num, RunReport};
use crate::CliError;

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn vectors_value(vs: &[HVector]) -> Vec<Vec<io::Entry>> {
    SequenceFile::from_vectors(vs).vectors
}

/// Reads a unit-vector sequence, reporting `unit_norm[i]` for every row.
fn load_units(report: &mut RunReport, path: &Path, tol: &ToleranceConfig) -> Result<UnitVectorSequence, CliError> {
    let vectors = io::read_sequence(path)?.to_vectors();
    let mut violations = Vec::new();
    let mut worst: f64 = 0.0;
    for (i, v) in vectors.iter().enumerate() {
        let dev = (v.norm() - 1.0).abs();
        worst = worst.max(dev);
        report.diag(format!("unit_norm[{i}]"), dev);
        if dev > tol.eps_unit {
            violations.push(format!("unit_norm[{i}] = {}", fmt_num(dev)));
        }
    }
    report.diag("max_unit_deviation", worst);
    if !violations.is_empty() {
        return Err(CliError::Validation(violations));
    }
    Ok(UnitVectorSequence::new(vectors, tol)?)
}

/// Reads and validates a normalized Bessel sequence, reporting every margin.
fn load_bessel(report: &mut RunReport, path: &Path, tol: &ToleranceConfig) -> Result<BesselSequence, CliError> {
    let vectors = io::read_sequence(path)?.to_vectors();
    bessel_diagnostics(report, &vectors)?;
    match validate_bessel(vectors, tol) {
        Ok(gs) => Ok(gs),
        Err(framekz::Error::InvalidBessel(violations)) => {
            for v in &violations {
                report.diag(v.key(), v.margin());
            }
            Err(CliError::Validation(violations.iter().map(violation_message).collect()))
        }
        Err(e) => Err(e.into()),
    }
}

fn violation_message(v: &BesselViolation) -> String {
    match v {
        BesselViolation::FirstNorm { norm, margin } => format!("||g_0|| = {} (unit margin {})", fmt_num(*norm), fmt_num(*margin)),
        BesselViolation::FirstNotOrthogonal { index, overlap } => format!("|<g_0, g_{index}>| = {}", fmt_num(*overlap)),
        BesselViolation::NotContraction { norm, margin } => format!("Gram norm {} (contraction margin {})", fmt_num(*norm), fmt_num(*margin)),
    }
}

fn bessel_diagnostics(report: &mut RunReport, g: &[HVector]) -> Result<BesselMargins, CliError> {
    let m = bessel_margins(g)?;
    report.diag("g0_norm_deviation", (m.first_norm - 1.0).abs());
    report.diag("g0_max_overlap", m.max_first_overlap);
    report.diag("gram_norm", m.gram_norm);
    report.diag("contraction_margin", m.gram_norm - 1.0);
    Ok(m)
}

fn write_sequence(report: &mut RunReport, key: &str, path: Option<&PathBuf>, file: &SequenceFile) -> Result<(), CliError> {
    if let Some(p) = path {
        io::write_json(p, file)?;
        report.output(key, p);
    }
    Ok(())
}

pub fn forward(report: &mut RunReport, input: &Path, out: Option<&PathBuf>, gram_out: Option<&PathBuf>, tol: &ToleranceConfig) -> Result<(), CliError> {
    report.input("input", input);
    let es = load_units(report, input, tol)?;
    let gs = auxiliary_sequence(&es);
    let g = gs.vectors();
    let gram_g = gram(g)?;
    let pair = triangular_pair(&es);

    let m = bessel_diagnostics(report, g)?;
    report.check("g0_max_overlap", m.max_first_overlap, tol.eps_id);
    report.check("contraction_margin", m.gram_norm - 1.0, tol.eps_eig);
    let via_c = coefficients_c(&pair, &es)?;
    report.check("path_equivalence", max_entry_distance(via_c.vectors(), g), tol.eps_id);
    report.check("gram_identity_residual", max_abs(&(&gram_g - gram_via_u(&pair))), tol.eps_id);
    report.check("pair_inverse_residual", pair.inverse_residual(), tol.eps_id);

    let file = SequenceFile::from_vectors(g).with_metadata("source", "forward");
    write_sequence(report, "out", out, &file)?;
    if let Some(p) = gram_out {
        io::write_json(p, &MatrixFile::from_matrix(&gram_g))?;
        report.output("gram_out", p);
    }
    report.output("g", vectors_value(g));
    report.output("gram", MatrixFile::from_matrix(&gram_g).entries);
    report.line(format!("{} vectors in C^{}; auxiliary sequence computed", es.len(), es.dim()));
    Ok(())
}

pub fn synthesize(report: &mut RunReport, input: &Path, method: SynthesisMethod, out: Option<&PathBuf>, tol: &ToleranceConfig) -> Result<(), CliError> {
    report.input("input", input);
    report.input("method", method.to_string());
    let gs = load_bessel(report, input, tol)?;
    let result = match method {
        SynthesisMethod::Triangular => synthesize_triangular(&gs, tol)?,
        SynthesisMethod::Admissible => synthesize_admissible(&gs, tol)?,
    };
    let d = &result.diagnostics;
    report.check("max_unit_deviation", d.max_unit_deviation, tol.eps_id);
    report.check("round_trip_residual", d.aux_residual, tol.eps_id);
    if let Some(r) = d.overlap_residual {
        report.check("overlap_residual", r, tol.eps_id);
    }
    if let Some(r) = d.cholesky_residual {
        report.check("cholesky_residual", r, tol.eps_id);
    }
    if let Some(r) = d.kernel_containment {
        report.diag("kernel_containment", r);
    }
    if let Some(r) = d.solve_residual {
        report.diag("solve_residual", r);
    }
    if !d.solution_norms.is_empty() {
        report.diag("max_solution_norm", d.solution_norms.iter().copied().fold(0.0, f64::max));
        report.output("lambdas", &d.lambdas);
        report.output("kernel_dims", &d.kernel_dims);
    }
    report.diag("non_unique_steps", d.non_unique_steps.len() as f64);
    if !d.non_unique_steps.is_empty() {
        report.warn(format!("completion not unique at steps {:?}", d.non_unique_steps));
    }
    if let Some(pair) = &result.pair {
        report.output("u", MatrixFile::from_matrix(pair.u()).entries);
    }

    let e = result.units.vectors();
    let file = SequenceFile::from_vectors(e)
        .with_metadata("source", "synthesize")
        .with_metadata("method", method.to_string());
    write_sequence(report, "out", out, &file)?;
    report.output("e", vectors_value(e));
    report.line(format!("{method} synthesis of {} unit vectors; round-trip residual {}", e.len(), fmt_num(d.aux_residual)));
    Ok(())
}

/// Display helper: eigenvalues descending, roundoff below `floor` shown as 0.
fn spectrum_line(mut eig: Vec<f64>, floor: f64) -> String {
    eig.reverse();
    let shown: Vec<f64> = eig.iter().map(|&x| if x.abs() <= floor { 0.0 } else { x }).collect();
    fmt_list(&shown)
}

fn level(l: Option<usize>) -> f64 {
    l.map_or(-1.0, |n| n as f64)
}

fn level_text(l: Option<usize>) -> String {
    l.map_or("never".to_string(), |n| format!("N <= {n}"))
}

/// Verdicts shared by both analysis kinds, for a family `g` in `ℂ^d`.
fn analyze_gram(report: &mut RunReport, g: &[HVector], tol: &ToleranceConfig) -> Result<(bool, bool), CliError> {
    let d = common_dim(g)?;
    let gm = gram(g)?;
    let eig = hermitian_eigenvalues(&gm)?;
    let idempotence = operator_norm(&(&gm * &gm - &gm));
    let contraction = is_contraction(&gm, tol)?;
    let projection = is_projection(&gm, tol)?;
    let rank = numerical_rank(g, tol)?;
    let tight = rank == d && projection;
    let trace: f64 = g.iter().map(|v| v.norm_squared()).sum();

    report.diag("gram_min_eigenvalue", eig[0]);
    report.diag("projection_residual", idempotence);
    report.diag("rank_deficit", (d - rank) as f64);
    report.diag("trace_dimension", trace);
    report.diag("trace_deficit", d as f64 - trace);
    report.output("gram_spectrum", &eig);
    report.output("contraction", contraction);
    report.output("projection", projection);
    report.output("tight_frame", tight);

    report.line(format!("contraction: {}; projection: {}", yes(contraction), yes(projection)));
    report.line(format!("tight frame: {}; trace = {} (d = {d})", yes(tight), fmt_num(trace)));
    Ok((contraction, tight))
}

pub fn analyze(report: &mut RunReport, input: &Path, kind: AnalyzeKind, tol: &ToleranceConfig) -> Result<(), CliError> {
    report.input("input", input);
    report.input("kind", kind.name());
    match kind {
        AnalyzeKind::Units => {
            let es = load_units(report, input, tol)?;
            let gs = auxiliary_sequence(&es);
            let g = gs.vectors();
            bessel_diagnostics(report, g)?;
            let (bessel, tight) = analyze_gram(report, g, tol)?;
            let pair = triangular_pair(&es);
            report.output("u", MatrixFile::from_matrix(pair.u()).entries);
            report.check("trace_formula_residual", (trace_dimension(&pair) - report.diagnostics["trace_dimension"]).abs(), tol.eps_id);
            let eig = gram_spectrum(g)?;
            report.summary.insert(0, format!("Bessel: {}; tight: {}; eigenvalues {}", yes(bessel), yes(tight), spectrum_line(eig, tol.eps_eig)));

            let stab = stability_report(&es, tol);
            let overlaps = &stab.consecutive_overlaps;
            let min_overlap = overlaps.iter().copied().fold(f64::INFINITY, f64::min);
            if !overlaps.is_empty() {
                report.diag("min_consecutive_overlap", min_overlap);
            }
            report.diag("units_stable_through", level(stab.units_stable_through));
            report.diag("bessel_stable_through", level(stab.bessel_stable_through));
            let disagreements = stability_sides(&es, tol).iter().filter(|(l, r)| l != r).count();
            report.check("stability_disagreements", disagreements as f64, 0.0);
            report.output("consecutive_overlaps", overlaps);
            report.line(format!(
                "stable: units {}; bessel {}",
                level_text(stab.units_stable_through),
                level_text(stab.bessel_stable_through)
            ));
            if !overlaps.is_empty() {
                report.line(format!("consecutive overlaps {}", fmt_list(overlaps)));
            }
            report.line(format!("effective: {}", yes(tight)));
        }
        AnalyzeKind::Bessel => {
            let g = io::read_sequence(input)?.to_vectors();
            bessel_diagnostics(report, &g)?;
            let (_, tight) = analyze_gram(report, &g, tol)?;
            let g_copy = g.clone();
            match validate_bessel(g, tol) {
                Ok(gs) => {
                    report.summary.insert(0, format!("Bessel: yes; tight: {}; eigenvalues {}", yes(tight), spectrum_line(gram_spectrum(gs.vectors())?, tol.eps_eig)));
                    let stab = bessel_stability_report(&gs, tol);
                    report.diag("bessel_stable_through", level(stab.bessel_stable_through));
                    report.line(format!("stable: bessel {}", level_text(stab.bessel_stable_through)));
                }
                Err(framekz::Error::InvalidBessel(violations)) => {
                    let eig = gram_spectrum(&g_copy)?;
                    report.summary.insert(0, format!("Bessel: no; tight: {}; eigenvalues {}", yes(tight), spectrum_line(eig, tol.eps_eig)));
                    for v in &violations {
                        report.diag(v.key(), v.margin());
                        report.warn(violation_message(v));
                    }
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum AnalyzeKind {
    Units,
    Bessel,
}

impl AnalyzeKind {
    fn name(self) -> &'static str {
        match self {
            AnalyzeKind::Units => "units",
            AnalyzeKind::Bessel => "bessel",
        }
    }
}

#[derive(Serialize)]
struct TraceRow {
    n: usize,
    residual: f64,
    coef_abs: f64,
    energy_residual: f64,
}

pub fn kaczmarz(report: &mut RunReport, input: &Path, x: &HVector, trace_out: Option<&PathBuf>, tol: &ToleranceConfig) -> Result<(), CliError> {
    report.input("input", input);
    report.input("x", x.iter().copied().map(io::entry).collect::<Vec<_>>());
    let es = load_units(report, input, tol)?;
    if x.len() != es.dim() {
        return Err(framekz::Error::DimensionMismatch { expected: es.dim(), found: x.len() }.into());
    }
    let trace = run_kaczmarz(x, &es)?;
    let energy = energy_residuals(x, &trace)?;
    let scale = x.norm_squared().max(1.0);
    let coef_abs: Vec<f64> = trace.coefficients.iter().map(|c| c.norm()).collect();

    report.check("energy_identity_residual", energy.iter().copied().fold(0.0, f64::max), tol.eps_id * scale);
    report.diag("defect", trace.defect);
    report.check("bessel_bound_violation", (-trace.defect).max(0.0), tol.eps_id * scale);
    let slack = es
        .consecutive_overlaps()
        .iter()
        .enumerate()
        .map(|(i, o)| o * trace.residual_norms[i] - trace.residual_norms[i + 1])
        .fold(0.0, f64::max);
    report.check("lower_bound_violation", slack, tol.eps_id);
    let last = *trace.residual_norms.last().expect("nonempty sequence");
    report.check("defect_residual_mismatch", (trace.defect - last * last).abs(), tol.eps_id * scale);

    if let Some(p) = trace_out {
        let mut w = csv::Writer::from_path(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
        for (n, ((r, c), en)) in trace.residual_norms.iter().zip(&coef_abs).zip(&energy).enumerate() {
            w.serialize(TraceRow { n, residual: *r, coef_abs: *c, energy_residual: *en })
                .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
        }
        w.flush().map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
        report.output("trace_out", p);
    }
    report.output("residuals", &trace.residual_norms);
    report.output("coef_abs", &coef_abs);
    report.output("final_iterate", trace.iterates.last().map(|v| v.iter().copied().map(io::entry).collect::<Vec<_>>()));
    report.line(format!("residuals {}; defect {}", fmt_list(&trace.residual_norms), fmt_num(trace.defect)));
    report.line(format!("reached x: {}", yes(trace.is_effective(tol))));
    Ok(())
}

pub fn chol(report: &mut RunReport, input: &Path, out: Option<&PathBuf>, tol: &ToleranceConfig) -> Result<(), CliError> {
    report.input("input", input);
    let b = io::read_matrix(input)?.to_matrix();
    if b.nrows() != b.ncols() {
        return Err(framekz::Error::NotSquare { rows: b.nrows(), cols: b.ncols() }.into());
    }
    report.diag("hermitian_asymmetry", hermitian_asymmetry(&b)?);
    if b.nrows() > 0 {
        let herm = (&b + b.adjoint()).scale(0.5);
        report.diag("min_eigenvalue", hermitian_eigenvalues(&herm)?[0]);
    }
    match validate_psd(&b, tol) {
        Err(framekz::Error::NotPositiveSemidefinite { min_eigenvalue }) => {
            return Err(CliError::Validation(vec![format!("not positive semidefinite: eigenvalue {}", fmt_num(min_eigenvalue))]));
        }
        other => other?,
    }
    let f = cholesky_psd(&b, tol)?;
    let residual = f.residual(&b);
    report.check("factorization_residual", residual, tol.eps_id * max_abs(&b).max(1.0));
    report.diag("rank", f.rank as f64);

    let file = CholeskyFile {
        v: MatrixFile::from_matrix(&f.v),
        pivots: f.pivots.one_based(),
        deltas: f.pivots.deltas().to_vec(),
        rank: f.rank,
    };
    if let Some(p) = out {
        io::write_json(p, &file)?;
        report.output("out", p);
    }
    report.line(format!(
        "rank {}; pivots ({}); residual {}",
        f.rank,
        file.pivots.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "),
        fmt_num(residual)
    ));
    report.output("v", &file.v.entries);
    report.output("pivots", &file.pivots);
    report.output("deltas", &file.deltas);
    Ok(())
}

pub fn equiv(report: &mut RunReport, a: &Path, b: &Path, tol: &ToleranceConfig) -> Result<(), CliError> {
    report.input("a", a);
    report.input("b", b);
    let mut scratch = RunReport::new("equiv");
    let es = load_units(&mut scratch, a, tol).map_err(|e| e.context("a"))?;
    let es2 = load_units(&mut scratch, b, tol).map_err(|e| e.context("b"))?;
    let margin = equivalence_margin(&es, &es2)?;
    let equivalent = margin <= tol.eps_id;
    report.diag("uu_star_distance", margin);
    report.diag("gram_distance", gram_distance(auxiliary_sequence(&es).vectors(), auxiliary_sequence(&es2).vectors())?);
    if es.dim() == es2.dim() {
        let alignment = unitary_alignment_residual(auxiliary_sequence(&es).vectors(), auxiliary_sequence(&es2).vectors())?;
        report.diag("alignment_residual", alignment);
    }
    report.output("equivalent", equivalent);
    report.line(format!("equivalent: {}; margin {}", yes(equivalent), fmt_num(margin)));
    Ok(())
}

pub fn max_entry_distance(a: &[HVector], b: &[HVector]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(u, v)| u.iter().zip(v.iter()).map(|(x, y)| (x - y).norm()))
        .fold(0.0, f64::max)
}
