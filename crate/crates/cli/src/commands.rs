use std::path::Path;

use phasetime_core::phase_times::{self, NON_COMMUTING_NOTE};
use phasetime_core::spectral::{self, GaussianSpectrum};
use phasetime_core::wavepacket::{self, linspace, PacketField, QuadratureSpec};
use phasetime_core::BarrierConfig;
use serde_json::{json, Map, Value};

use crate::args::*;
use crate::error::CliError;
use crate::output::{num, opt, Manifest, RunDir};

/// A finished run: the manifest that was written and a short human summary.
pub struct Report {
    pub manifest: Manifest,
    pub summary: Vec<String>,
}

pub fn run(command: Command) -> Result<Report, CliError> {
    match command {
        Command::Table1(a) => table1(a),
        Command::Rates(a) => rates(a),
        Command::Distortion(a) => distortion(a),
        Command::Cutoff(a) => cutoff(a),
        Command::Packet(a) => packet(a),
        Command::Collide(a) => collide(a),
        Command::Replay(a) => replay(&a.manifest, &a.output),
    }
}

fn replay(manifest: &Path, output: &Output) -> Result<Report, CliError> {
    let text = std::fs::read_to_string(manifest)?;
    let value: Value = serde_json::from_str(&text)?;
    let params = value
        .get("parameters")
        .cloned()
        .ok_or_else(|| CliError::Usage("manifest has no `parameters`".into()))?;
    let mut command: Command = serde_json::from_value(params)?;
    match &mut command {
        Command::Table1(a) => a.output = output.clone(),
        Command::Rates(a) => a.output = output.clone(),
        Command::Distortion(a) => a.output = output.clone(),
        Command::Cutoff(a) => a.output = output.clone(),
        Command::Packet(a) => a.output = output.clone(),
        Command::Collide(a) => a.output = output.clone(),
        Command::Replay(_) => return Err(CliError::Usage("manifest records a replay".into())),
    }
    run(command)
}

fn quadrature(tolerance: f64) -> Result<QuadratureSpec, CliError> {
    Ok(QuadratureSpec::with_tolerance(tolerance)?)
}

fn table1(a: Table1Args) -> Result<Report, CliError> {
    if a.w_a.is_empty() || a.l_a.is_empty() {
        return Err(CliError::Usage(
            "--w-a and --l-a need at least one value".into(),
        ));
    }
    let table = spectral::table1_generate(a.k0_a, &a.w_a, &a.l_a)?;
    let command = Command::Table1(a.clone());
    let mut dir = RunDir::create(&a.output.out, &command)?;
    let mark = |boundary: bool| if boundary { "*" } else { "" }.to_string();
    dir.csv(
        "table1.csv",
        &[],
        &["w_a", "L_a", "kmax_a", "flag"],
        table.cells.iter().map(|c| {
            vec![
                num(c.w_a),
                num(c.l_a),
                num(c.kmax_a),
                mark(c.boundary_dominated),
            ]
        }),
    )?;
    let mut columns = vec!["L_a".to_string()];
    columns.extend(a.w_a.iter().map(|w| format!("w_a={w}")));
    let layout: Vec<Vec<String>> = a
        .l_a
        .iter()
        .map(|&l| {
            let mut row = vec![format!("{l:.2}")];
            for &w in &a.w_a {
                let c = table.cell(w, l).expect("cell generated for every pair");
                row.push(if c.boundary_dominated {
                    "*".into()
                } else {
                    format!("{:.4}", c.kmax_a)
                });
            }
            row
        })
        .collect();
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    dir.csv(
        "table1_layout.csv",
        &["# '*': the global maximum of g|T| sits at k = w".into()],
        &column_refs,
        layout.clone(),
    )?;
    let boundary = table.cells.iter().filter(|c| c.boundary_dominated).count();
    let warnings = table.cells.iter().filter(|c| c.containment_warning).count();
    let mut results = Map::new();
    results.insert("cells".into(), json!(table.cells.len()));
    results.insert("boundary_dominated_cells".into(), json!(boundary));
    results.insert("containment_warnings".into(), json!(warnings));
    let mut summary = vec![column_refs.join("\t")];
    summary.extend(layout.iter().map(|r| r.join("\t")));
    if warnings > 0 {
        summary.push(format!(
            "warning: {warnings} cells put more than 1e-3 of g² outside [0, w]"
        ));
    }
    Ok(Report {
        manifest: dir.finish(&command, results)?,
        summary,
    })
}

fn rates(a: RatesArgs) -> Result<Report, CliError> {
    let grid = phase_times::log_grid(a.alpha_min, a.alpha_max, a.alpha_steps)?;
    let rows = phase_times::fig3a_curves(&a.n, &grid)?;
    let command = Command::Rates(a.clone());
    let mut dir = RunDir::create(&a.output.out, &command)?;
    let mut notes = Vec::new();
    let mut limits = Vec::new();
    for &n in &a.n {
        let l = phase_times::rate_limits(n)?;
        notes.push(format!(
            "# alpha -> 0 at n = {n}: R_T -> {}, R_phi -> {}",
            num(l.standard),
            num(l.scattering)
        ));
        limits.push(json!({"n": n, "R_T": l.standard, "R_phi": l.scattering, "R_T_at_unit_n": l.standard_at_unit_n}));
    }
    let unit_n = a.n.contains(&1.0);
    if unit_n {
        notes.push(format!("# note: {NON_COMMUTING_NOTE}"));
    }
    dir.csv(
        "rates.csv",
        &notes,
        &["alpha", "n", "R_T", "R_phi"],
        rows.iter()
            .map(|r| vec![num(r.alpha), num(r.n), num(r.standard), num(r.scattering)]),
    )?;
    let mut results = Map::new();
    results.insert("rows".into(), json!(rows.len()));
    results.insert("limits".into(), Value::Array(limits));
    if unit_n {
        results.insert("note".into(), json!(NON_COMMUTING_NOTE));
    }
    let mut summary: Vec<String> = notes
        .iter()
        .map(|s| s.trim_start_matches("# ").to_string())
        .collect();
    summary.push(format!("{} rows written", rows.len()));
    Ok(Report {
        manifest: dir.finish(&command, results)?,
        summary,
    })
}

fn distortion(a: DistortionArgs) -> Result<Report, CliError> {
    let s = GaussianSpectrum::new(a.k0_a, 1.0)?;
    let r = spectral::distortion_onset(&s, a.w_a)?;
    let command = Command::Distortion(a.clone());
    let mut dir = RunDir::create(&a.output.out, &command)?;
    let quantities = [
        ("L_numeric_a", r.l_numeric),
        ("L_literal_a", r.l_literal),
        ("L_rederived_a", r.l_rederived),
        ("gaussian_log_slope", r.gaussian_log_slope),
        ("fd_slope_below_onset", r.fd_slope_below),
        ("fd_slope_above_onset", r.fd_slope_above),
        ("edge_limit_at_onset", r.limit_at_onset),
        ("edge_limit_printed_at_onset", r.printed_limit_at_onset),
    ];
    dir.csv(
        "distortion.csv",
        &["# L_literal = sqrt(3/2) a (1 - k0/w); L_rederived = sqrt(3/2) a sqrt(1 - k0/w)".into()],
        &["quantity", "value"],
        quantities.iter().map(|(k, v)| vec![k.to_string(), num(*v)]),
    )?;
    let mut results = Map::new();
    for (k, v) in quantities {
        results.insert(k.into(), json!(v));
    }
    let summary = quantities
        .iter()
        .map(|(k, v)| format!("{k}\t{v:.6}"))
        .collect();
    Ok(Report {
        manifest: dir.finish(&command, results)?,
        summary,
    })
}

fn cutoff(mut a: CutoffArgs) -> Result<Report, CliError> {
    let k0 = *a.k0_a.get_or_insert(0.5 * a.w_a);
    let q = quadrature(a.tolerance)?;
    let x = linspace(a.x_min, a.x_max, a.x_points)?;
    let base = GaussianSpectrum::new(k0, 1.0)?;
    let barrier = BarrierConfig::from_wavenumber(a.w_a, 1.0)?;
    let mut labels = vec!["none".to_string()];
    let mut spectra = vec![base];
    for &d in &a.delta {
        labels.push(format!("delta={d}"));
        spectra.push(base.with_cutoff(d, a.w_a)?);
    }
    let mut profiles = Vec::new();
    let mut tails = Vec::new();
    for s in &spectra {
        let f = spectral::cutoff_packet_profile(s, &x, &q)?;
        tails.push(spectral::tail_amplitude(&f, (a.tail_min, a.tail_max))?);
        profiles.push(f);
    }
    let command = Command::Cutoff(a.clone());
    let mut dir = RunDir::create(&a.output.out, &command)?;
    let mut columns = vec!["x".to_string()];
    columns.extend(labels.iter().map(|l| format!("abs_psi[{l}]")));
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let peaks: Vec<f64> = profiles.iter().map(|f| f.peak().density.sqrt()).collect();
    dir.csv(
        "cutoff_profiles.csv",
        &["# |psi(x, 0)| normalized to its peak".into()],
        &column_refs,
        (0..x.len()).map(|i| {
            let mut row = vec![num(x[i])];
            row.extend(
                profiles
                    .iter()
                    .zip(&peaks)
                    .map(|(f, p)| num(f.psi()[i].norm() / p)),
            );
            row
        }),
    )?;
    let mut rows = vec![vec![
        labels[0].clone(),
        String::new(),
        num(base.support().1),
        num(tails[0]),
        String::new(),
    ]];
    for (i, &d) in a.delta.iter().enumerate() {
        rows.push(vec![
            labels[i + 1].clone(),
            num(d),
            num((1.0 - d) * a.w_a),
            num(tails[i + 1]),
            opt(spectral::cutoff_time_estimate(d, &barrier).ok()),
        ]);
    }
    dir.csv(
        "cutoff_summary.csv",
        &[format!(
            "# tail = max |psi| over {} <= |x - x_peak| <= {}, over the peak",
            a.tail_min, a.tail_max
        )],
        &[
            "spectrum",
            "delta",
            "k_cut_a",
            "tail_amplitude",
            "time_estimate",
        ],
        rows.clone(),
    )?;
    // tails ordered by decreasing k_cut
    let mut order: Vec<usize> = (0..tails.len()).collect();
    order.sort_by(|&i, &j| {
        rows[j][2]
            .parse::<f64>()
            .unwrap_or(0.0)
            .total_cmp(&rows[i][2].parse::<f64>().unwrap_or(0.0))
    });
    let increasing = order.windows(2).all(|p| tails[p[1]] > tails[p[0]]);
    let mut results = Map::new();
    results.insert(
        "tails".into(),
        Value::Array(
            labels
                .iter()
                .zip(&tails)
                .map(|(l, t)| json!({"spectrum": l, "tail_amplitude": t}))
                .collect(),
        ),
    );
    results.insert("tail_increases_as_cutoff_drops".into(), json!(increasing));
    let mut summary: Vec<String> = rows
        .iter()
        .map(|r| format!("{}\ttail {}", r[0], r[3]))
        .collect();
    summary.push(format!("tail increases as the cutoff drops: {increasing}"));
    Ok(Report {
        manifest: dir.finish(&command, results)?,
        summary,
    })
}

fn snapshot_rows(f: &PacketField) -> Vec<Vec<String>> {
    f.x()
        .iter()
        .zip(f.psi())
        .map(|(x, p)| vec![num(*x), num(p.re), num(p.im), num(p.norm_sqr())])
        .collect()
}

const SNAPSHOT_COLUMNS: [&str; 4] = ["x", "re_psi", "im_psi", "abs_psi2"];

fn packet(mut a: PacketArgs) -> Result<Report, CliError> {
    let h = 0.5 * a.l_a;
    let x_min = *a.x_min.get_or_insert(h);
    let x_max = *a.x_max.get_or_insert(h + 12.0);
    let q = quadrature(a.tolerance)?;
    let spectrum = GaussianSpectrum::new(a.k0_a, 1.0)?;
    let barrier = BarrierConfig::from_wavenumber(a.w_a, a.l_a)?;
    let x = linspace(x_min, x_max, a.x_points)?;
    let times = linspace(a.t_min, a.t_max, a.t_steps)?;
    let (transmitted, reference, panels) =
        wavepacket::transmitted_series(&spectrum, &barrier, &x, &times, &q)?;
    let c = wavepacket::spm_comparison_from_fields(
        &spectrum,
        &barrier,
        &transmitted,
        &reference,
        a.plane,
    )?;
    let command = Command::Packet(a.clone());
    let mut dir = RunDir::create(&a.output.out, &command)?;
    for (i, f) in transmitted.iter().enumerate() {
        dir.csv(
            &format!("packet_t{i:04}.csv"),
            &[format!("# t = {}", num(f.t()))],
            &SNAPSHOT_COLUMNS,
            snapshot_rows(f),
        )?;
    }
    dir.csv(
        "arrival.csv",
        &[format!("# plane x = {}", num(c.plane))],
        &["t", "x_peak_transmitted", "x_peak_reference"],
        c.transmitted
            .peaks
            .iter()
            .zip(&c.reference.peaks)
            .map(|(p, r)| vec![num(p.0), num(p.1), num(r.1)]),
    )?;
    let discrepancy = c.discrepancy();
    let within = discrepancy.map(|d| d.abs() <= 0.05);
    let mut results = Map::new();
    results.insert("k_max_a".into(), json!(c.k_max));
    results.insert("boundary_dominated".into(), json!(c.boundary_dominated));
    results.insert("spm_time".into(), json!(c.spm_time));
    results.insert("tau".into(), json!(c.tau));
    results.insert(
        "arrival_transmitted".into(),
        json!(c.transmitted.arrival.time()),
    );
    results.insert(
        "arrival_reference".into(),
        json!(c.reference.arrival.time()),
    );
    results.insert("empirical_delay".into(), json!(c.empirical_delay));
    results.insert("discrepancy_over_tau".into(), json!(discrepancy));
    results.insert("within_5_percent_of_tau".into(), json!(within));
    results.insert("multimodal_at_arrival".into(), json!(c.multimodal));
    results.insert(
        "multimodal_any_time".into(),
        json!(c.transmitted.multimodal),
    );
    results.insert("filter_effect".into(), json!(c.filter_effect));
    results.insert("quadrature_panels".into(), json!(panels));
    let mut summary = vec![
        format!(
            "k_max a = {:.6}{}",
            c.k_max,
            if c.boundary_dominated {
                " (boundary)"
            } else {
                ""
            }
        ),
        format!("stationary-phase transit time = {}", opt(c.spm_time)),
        format!(
            "empirical delay at x = {} : {}",
            num(c.plane),
            opt(c.empirical_delay)
        ),
        format!("(empirical - spm)/tau = {}", opt(discrepancy)),
    ];
    if c.filter_effect {
        summary.push(
            "warning: filter effect (spectrum maximum far above k0 or multimodal field)".into(),
        );
    }
    if c.transmitted.arrival.time().is_none() {
        summary.push("no arrival within the sampled times".into());
    }
    Ok(Report {
        manifest: dir.finish(&command, results)?,
        summary,
    })
}

fn collide(mut a: CollideArgs) -> Result<Report, CliError> {
    let q = quadrature(a.tolerance)?;
    let spectrum = GaussianSpectrum::new(a.k0_a, 1.0)?;
    let barrier = BarrierConfig::from_wavenumber(a.w_a, a.l_a)?;
    let t_min = *a
        .t_min
        .get_or_insert(wavepacket::collision_start(&spectrum, &barrier));
    let t_max = *a.t_max.get_or_insert(t_min + 4.0);
    let x = linspace(a.x_min, a.x_max, a.x_points)?;
    let times = linspace(t_min, t_max, a.t_steps)?;
    let mut fields = Vec::with_capacity(times.len());
    let mut residuals = Vec::with_capacity(times.len());
    for &t in &times {
        let (f, _) = wavepacket::synthesize_collision(&spectrum, &barrier, &x, t, &q)?;
        residuals.push(wavepacket::mirror_residual(&f)?);
        fields.push(f);
    }
    let check = wavepacket::outgoing_spectrum_check(&spectrum, &barrier, &q)?;
    let scattering = phase_times::scattering_phase_time(a.k0_a, &barrier).ok();
    let command = Command::Collide(a.clone());
    let mut dir = RunDir::create(&a.output.out, &command)?;
    for (i, f) in fields.iter().enumerate() {
        dir.csv(
            &format!("collide_t{i:04}.csv"),
            &[format!("# t = {}", num(f.t()))],
            &SNAPSHOT_COLUMNS,
            snapshot_rows(f),
        )?;
    }
    dir.csv(
        "collide_summary.csv",
        &[],
        &["t", "mirror_residual", "norm"],
        fields
            .iter()
            .zip(&residuals)
            .map(|(f, r)| vec![num(f.t()), num(*r), num(f.norm())]),
    )?;
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    let mut results = Map::new();
    results.insert("symmetry_residual".into(), json!(max_residual));
    results.insert(
        "outgoing_modulus_error".into(),
        json!(check.max_modulus_error),
    );
    results.insert("outgoing_weight_error".into(), json!(check.weight_error()));
    results.insert("matching_residual".into(), json!(check.max_residual));
    if let Some(s) = &scattering {
        results.insert("scattering_time".into(), json!(s.time()));
        results.insert("scattering_time_closed_form".into(), json!(s.closed_form));
        results.insert("scattering_time_printed".into(), json!(s.printed));
    }
    let mut summary = vec![
        format!("mirror symmetry residual = {max_residual:e}"),
        format!(
            "outgoing spectral modulus error = {:e}",
            check.max_modulus_error
        ),
    ];
    if let Some(s) = scattering {
        summary.push(format!(
            "scattering time -(m/k0) dphi/dk = {}",
            num(s.time())
        ));
    }
    Ok(Report {
        manifest: dir.finish(&command, results)?,
        summary,
    })
}
