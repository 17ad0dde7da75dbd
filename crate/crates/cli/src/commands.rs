use std::collections::hash_map::RandomState;
use std::hash::BuildHasher;
use std::path::Path;

use patchnoise::experiments::{
    damping_rate, fit_dataset, gold_measurements, heating_rate, invert_heating, load_dataset, rescale, FitStatus,
    REFERENCE_CURVES,
};
use patchnoise::quantities::validate_model;
use patchnoise::spectrum::{asymptotic_long, asymptotic_short, log_space, normalized_curve, sample_curve};
use patchnoise::{
    AngularFrequency, CantileverProbe, FieldNoiseDensity, IonSpecies, Length, PhysicalConstants, SurfacePatchModel,
};
use patchnoise_mc::{
    generate_tessellation, log_log_slope, predicted_variance, run_ensemble, EnsembleConfig, HeightEstimate,
    TessellationSpec,
};

use crate::output::{num, open, Table};
use crate::{CantileverArgs, Cli, Command, CurveArgs, Failure, FitArgs, IonArgs, McArgs, RatesCommand, RescaleArgs};

pub fn dispatch(cli: &Cli) -> Result<(), Failure> {
    let table = match &cli.command {
        Command::Curve(a) => curve(a)?,
        Command::Mc(a) => mc(a, cli.verbose)?,
        Command::Fit(a) => fit(a)?,
        Command::Rescale(a) => rescale_cmd(a)?,
        Command::Rates(RatesCommand::Ion(a)) => ion(a)?,
        Command::Rates(RatesCommand::Cantilever(a)) => cantilever(a)?,
    };
    let mut out = open(cli.output.as_deref())?;
    table.emit(cli.format, &mut out)
}

fn usage(message: impl Into<String>) -> Failure {
    Failure::Usage(message.into())
}

fn required<T: Copy>(value: Option<T>, flag: &str, command: &str) -> Result<T, Failure> {
    value.ok_or_else(|| usage(format!("{command} requires --{flag}")))
}

fn model(zeta: f64, nsv: f64, f0: f64, alpha: f64) -> Result<SurfacePatchModel, Failure> {
    let base = validate_model(zeta, nsv, std::f64::consts::TAU * f0)?;
    Ok(SurfacePatchModel::with_exponent(base.zeta(), base.nsv(), base.omega0(), alpha)?)
}

fn curve(a: &CurveArgs) -> Result<Table, Failure> {
    if a.n < 2 {
        return Err(usage(format!("--n must be at least 2, got {}", a.n)));
    }
    if a.normalized {
        let points = normalized_curve(a.dmin_rho, a.dmax_rho, a.n)?;
        let mut t = Table::new(if a.asymptotes { &["rho", "s", "short", "long"] } else { &["rho", "s"] });
        for p in points {
            let mut row = vec![num(p.rho), num(p.s)];
            if a.asymptotes {
                row.extend([num(1.0 / p.rho), num(0.75 / p.rho.powi(4))]);
            }
            t.row(row);
        }
        return Ok(t);
    }
    let zeta = required(a.zeta, "zeta", "curve")?;
    let nsv = required(a.nsv, "nsv", "curve")?;
    let dmin = required(a.dmin, "dmin", "curve")?;
    let dmax = required(a.dmax, "dmax", "curve")?;
    let m = model(zeta, nsv, a.f0, a.alpha)?;
    let omega = AngularFrequency::from_hz(a.f.unwrap_or(a.f0))?;
    let c = sample_curve(&m, Length::new(dmin)?, Length::new(dmax)?, a.n, omega)?;
    let mut t = Table::new(if a.asymptotes { &["d_m", "s_e_si", "short", "long"] } else { &["d_m", "s_e_si"] });
    for &(d, s) in c.points() {
        let mut row = vec![num(d), num(s)];
        if a.asymptotes {
            let d = Length::new(d)?;
            row.extend([num(asymptotic_short(&m, d, omega).get()), num(asymptotic_long(&m, d, omega).get())]);
        }
        t.row(row);
    }
    Ok(t)
}

fn parse_seed(seed: Option<&str>) -> Result<u64, Failure> {
    match seed {
        None => Err(usage("mc is stochastic: pass --seed <u64> or --seed auto")),
        Some("auto") => {
            let seed = RandomState::new().hash_one(std::time::SystemTime::now());
            eprintln!("seed={seed}");
            Ok(seed)
        }
        Some(s) => {
            s.parse().map_err(|_| usage(format!("--seed must be an unsigned 64-bit integer or auto, got {s:?}")))
        }
    }
}

fn mc(a: &McArgs, verbose: u8) -> Result<Table, Failure> {
    let seed = parse_seed(a.seed.as_deref())?;
    if a.configs == 0 {
        return Err(usage("--configs must be at least 1"));
    }
    let spec = TessellationSpec::new(a.side, a.lambda, a.sigma, seed)?;
    let h = a.side / a.grid as f64;
    let heights = if a.heights.is_empty() { log_space(2.0 * h, a.side / 8.0, 9) } else { a.heights.clone() };
    if let Some(bad) = heights.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
        return Err(usage(format!("heights must be positive, got {bad}")));
    }
    let max_r = a.max_r.unwrap_or_else(|| (a.side / 4.0).min(5.0 / a.lambda.sqrt()));
    if verbose > 0 {
        eprintln!(
            "mc: {} expected cells, {}x{} grid, {} configurations",
            num(spec.expected_cells()),
            a.grid,
            a.grid,
            a.configs
        );
    }
    if let Some(path) = &a.dump_boundary {
        dump_boundary(&spec, a.grid, path)?;
    }
    let config = EnsembleConfig { spec, grid: a.grid, heights, configs: a.configs, max_r: Some(max_r) };
    let report = run_ensemble(&config)?;
    let correlation = report.correlation.as_ref().expect("max_r was given");
    if let Some(path) = &a.dump_correlation {
        let mut t = Table::new(&["r_m", "c_v2", "fit_v2"]);
        for (&r, &c) in correlation.radii.iter().zip(&correlation.values) {
            let fit = correlation.zeta_eff.map_or(f64::NAN, |z| correlation.c0() * (-r / z).exp());
            t.row(vec![num(r), num(c), num(fit)]);
        }
        t.write(&mut open(Some(path))?)?;
    }

    let zeta = correlation.zeta_eff;
    let mut t = Table::new(&[
        "d_m",
        "rho",
        "var_x",
        "var_y",
        "var_z",
        "var_total",
        "stderr_total",
        "predicted",
        "ratio",
        "status",
    ]);
    t.note("seed", seed.to_string());
    t.note("expected_cells", num(spec.expected_cells()));
    t.note("grid", a.grid.to_string());
    t.note("spacing_m", num(h));
    t.note("configs", a.configs.to_string());
    t.note("zeta_eff_m", zeta.map_or("none".into(), num));
    t.note("correlation_residual", num(correlation.residual));
    t.note("c0_v2", num(correlation.c0()));
    let totals = report.variance.totals();
    if totals.len() >= 4 {
        let pairs = |pts: &[(f64, f64, f64)]| pts.iter().map(|&(d, v, _)| (d, v)).collect::<Vec<_>>();
        let (low, high) = (&totals[..4], &totals[totals.len() - 4..]);
        for (name, pts) in [("slope_low", low), ("slope_high", high)] {
            t.note(name, log_log_slope(&pairs(pts)).map_or("none".into(), num));
            if let Some(z) = zeta {
                let model: Option<Vec<(f64, f64)>> =
                    pts.iter().map(|&(d, ..)| predicted_variance(a.sigma, z, d).ok().map(|v| (d, v))).collect();
                let slope = model.and_then(|m| log_log_slope(&m));
                t.note(&format!("model_{name}"), slope.map_or("none".into(), num));
            }
        }
    }
    for p in &report.variance.points {
        let d = p.height();
        let rho = zeta.map_or(f64::NAN, |z| d / z);
        let predicted = report.prediction(d).unwrap_or(f64::NAN);
        match p {
            HeightEstimate::Measured { variance, std_error, .. } => t.row(vec![
                num(d),
                num(rho),
                num(variance[0]),
                num(variance[1]),
                num(variance[2]),
                num(variance[3]),
                num(std_error[3]),
                num(predicted),
                num(variance[3] / predicted),
                "measured".into(),
            ]),
            HeightEstimate::Unresolvable { .. } => {
                let nan = num(f64::NAN);
                t.row(vec![
                    num(d),
                    num(rho),
                    nan.clone(),
                    nan.clone(),
                    nan.clone(),
                    nan.clone(),
                    nan.clone(),
                    num(predicted),
                    nan,
                    "unresolvable".into(),
                ])
            }
        }
    }
    Ok(t)
}

fn dump_boundary(spec: &TessellationSpec, grid: usize, path: &Path) -> Result<(), Failure> {
    let tiling = generate_tessellation(spec, grid)?;
    let h = tiling.spacing();
    let boundary = tiling.boundary();
    let mut t = Table::new(&["x_m", "z_m", "cell", "phi_v"]);
    for (i, (&cell, &phi)) in tiling.cell_ids().iter().zip(boundary.values()).enumerate() {
        let (ix, iz) = (i / grid, i % grid);
        t.row(vec![num(ix as f64 * h), num(iz as f64 * h), cell.to_string(), num(phi)]);
    }
    t.write(&mut open(Some(path))?)
}

fn fit(a: &FitArgs) -> Result<Table, Failure> {
    let records = match &a.data {
        Some(path) => load_dataset(path, a.alpha).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?,
        None => gold_measurements(),
    };
    if records.is_empty() {
        return Err(Failure::Data("dataset has no records".into()));
    }
    let zeta0 = Length::new(a.zeta0).map_err(|e| usage(format!("--zeta0: {e}")))?;
    let result = fit_dataset(&records, zeta0).map_err(|e| Failure::Data(e.to_string()))?;
    let nsv = result.nsv.get();

    if a.reference_curves {
        if a.n < 2 {
            return Err(usage(format!("--n must be at least 2, got {}", a.n)));
        }
        let labels: Vec<String> = REFERENCE_CURVES.iter().map(|r| format!("s_e_zeta_{r}")).collect();
        let mut header = vec!["d_m"];
        header.extend(labels.iter().map(String::as_str));
        let mut t = Table::new(&header);
        t.note("nsv", num(nsv));
        t.note("zeta0_m", num(a.zeta0));
        let omega0 = AngularFrequency::from_hz(patchnoise::experiments::REFERENCE_FREQUENCY_HZ)?;
        let curves = REFERENCE_CURVES
            .iter()
            .map(|r| {
                let m = SurfacePatchModel::new(Length::new(r * a.zeta0)?, result.nsv, omega0);
                sample_curve(&m, Length::new(a.dmin)?, Length::new(a.dmax)?, a.n, omega0)
            })
            .collect::<Result<Vec<_>, _>>()?;
        for i in 0..a.n {
            let mut row = vec![num(curves[0].points()[i].0)];
            row.extend(curves.iter().map(|c| num(c.points()[i].1)));
            t.row(row);
        }
        return Ok(t);
    }

    let mut t = Table::new(&[
        "source",
        "kind",
        "d_m",
        "f_hz",
        "s_e_measured",
        "s_e_rescaled",
        "zeta_m",
        "zeta_over_zeta0",
        "uncertainty_m",
        "closed_form_m",
        "status",
        "in_band",
        "log10_residual",
    ]);
    t.note("nsv", num(nsv));
    t.note("nsv_source", result.nsv_source.clone());
    t.note("zeta0_m", num(a.zeta0));
    if let Some((lo, hi)) = result.band {
        t.note("zeta_band_m", format!("{}..{}", num(lo), num(hi)));
    }
    for r in &result.records {
        let rec = &r.record;
        let z = r.zeta.zeta.unwrap_or(f64::NAN);
        let status = match r.zeta.status {
            FitStatus::Ok => "ok",
            FitStatus::RegimeInconsistent => "regime-inconsistent",
            FitStatus::NoRoot => "no-root",
        };
        t.row(vec![
            rec.source.clone(),
            rec.kind.to_string(),
            num(rec.d.get()),
            num(rec.frequency_hz),
            num(rec.measured.get()),
            num(rec.rescaled.get()),
            num(z),
            num(z / a.zeta0),
            num(r.zeta.uncertainty),
            num(r.zeta.closed_form),
            status.into(),
            r.in_band.to_string(),
            num(r.residual.unwrap_or(f64::NAN)),
        ]);
    }
    Ok(t)
}

fn rescale_cmd(a: &RescaleArgs) -> Result<Table, Failure> {
    let rescaled = rescale(FieldNoiseDensity::new(a.se)?, a.f, a.f0, a.alpha)?;
    let mut t = Table::new(&["s_e_rescaled"]);
    t.row(vec![num(rescaled.get())]);
    Ok(t)
}

fn ion(a: &IonArgs) -> Result<Table, Failure> {
    let c = PhysicalConstants::codata();
    let ion = IonSpecies::new(
        a.mass_u * c.atomic_mass_unit,
        a.charge_e * c.elementary_charge,
        AngularFrequency::from_hz(a.f)?,
    )?;
    let (se, gamma) = match (a.se, a.gamma) {
        (Some(se), _) => {
            let se = FieldNoiseDensity::new(se)?;
            (se.get(), heating_rate(se, &ion))
        }
        (None, Some(gamma)) => (invert_heating(gamma, &ion)?.get(), gamma),
        (None, None) => unreachable!("clap requires one of --se, --gamma"),
    };
    let mut t = Table::new(&["s_e_si", "gamma_per_s"]);
    t.row(vec![num(se), num(gamma)]);
    Ok(t)
}

fn cantilever(a: &CantileverArgs) -> Result<Table, Failure> {
    let q = match (a.q, a.q_e) {
        (Some(q), _) => q,
        (None, Some(n)) => n * PhysicalConstants::codata().elementary_charge,
        (None, None) => unreachable!("clap requires one of --q, --q-e"),
    };
    let probe = CantileverProbe::new(q, a.temperature, AngularFrequency::from_hz(a.f)?)?;
    let se = FieldNoiseDensity::new(a.se)?;
    let mut t = Table::new(&["s_e_si", "gamma_per_s"]);
    t.row(vec![num(se.get()), num(damping_rate(se, &probe))]);
    Ok(t)
}
