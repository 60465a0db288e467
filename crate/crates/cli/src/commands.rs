use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use idle_otto::cycle::{self, EngineParams};
use idle_otto::output::{self, base_meta, format_number, format_optional, params_meta, Meta};
use idle_otto::scan::presets::{self, Preset, PresetKind, PRESET_VERSION};
use idle_otto::scan::{
    find_extremum, random_points, run_grid, run_line, Axis, FixedParams, Goal, Observable, ScanCell, ScanParam,
    ScanSpec, Spacing,
};
use idle_otto::tpm::{self, enumerate_trajectories, sample_trajectories, DiscreteDistribution};
use idle_otto::tur::verify_tur;
use idle_otto::Error;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::args::{ExtremumArgs, Format, GoalArg, OptionalPointArgs, OutputArgs, PointArgs, ScanArgs, TurArgs, Which};
use crate::report::{Cell, Report};
use crate::UsageError;

fn open(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(report: &Report, out: &OutputArgs) -> Result<()> {
    let mut w = open(out.output.as_deref())?;
    report.render(out.format, &mut w)?;
    w.flush()?;
    Ok(())
}

fn point(p: &PointArgs) -> Result<EngineParams> {
    Ok(EngineParams::new(p.coupling, p.hi, p.hf, p.t_cold, p.t_hot)?)
}

fn require_point(p: &OptionalPointArgs) -> Result<EngineParams> {
    let get = |v: Option<f64>, flag: &str| v.ok_or_else(|| UsageError(format!("missing required flag --{flag}")));
    Ok(EngineParams::new(
        get(p.coupling, "J")?,
        get(p.hi, "hi")?,
        get(p.hf, "hf")?,
        get(p.t_cold, "Tc")?,
        get(p.t_hot, "Th")?,
    )?)
}

const POINT_QUANTITIES: [Observable; 18] = [
    Observable::MeanW1,
    Observable::MeanW2,
    Observable::MeanW,
    Observable::VarW1,
    Observable::VarW2,
    Observable::VarW,
    Observable::SigmaW,
    Observable::RelFluctW,
    Observable::MeanQh,
    Observable::MeanQc,
    Observable::EtaTh,
    Observable::Eta0,
    Observable::EtaC,
    Observable::EtaEngine,
    Observable::Omega,
    Observable::MeanSigma,
    Observable::Regime,
    Observable::Anomalous,
];

pub fn observables(params: &PointArgs, out: &OutputArgs) -> Result<()> {
    let p = point(params)?;
    let cell = ScanCell::evaluate(p, (0, 0), 0.0, None);
    let fields = POINT_QUANTITIES
        .iter()
        .map(|&o| {
            let value = match o {
                Observable::Regime => Cell::Text(cell.regime().name().to_string()),
                Observable::Anomalous => Cell::flag(cell.observables.anomalous),
                o => Cell::opt(cell.value(o)),
            };
            (o.name(), value)
        })
        .collect();
    let mut meta = base_meta();
    meta.extend(params_meta(&p));
    emit(&Report::single(meta, fields), out)
}

fn efficiency_meta(p: &EngineParams) -> Meta {
    let o = cycle::observables(p);
    vec![
        ("eta_0".into(), format_number(o.eta_0)),
        ("eta_th".into(), format_optional(o.eta_th)),
        ("eta_C".into(), format_number(o.eta_c)),
    ]
}

fn distribution_table(d: &DiscreteDistribution, value_name: &str, meta: Meta) -> Report {
    let mut meta = meta;
    meta.push(("undefined_mass".into(), format_number(d.undefined_mass())));
    meta.push(("divergent_mass".into(), format_number(d.divergent_mass())));
    Report {
        meta,
        header: vec![value_name.to_string(), "probability".to_string()],
        rows: d
            .support()
            .iter()
            .map(|&(v, p)| vec![Cell::Num(v), Cell::Num(p)])
            .collect(),
    }
}

fn write_distribution(p: &EngineParams, which: Which, extra: Meta, out: &OutputArgs) -> Result<()> {
    let td = enumerate_trajectories(p);
    let mut tail = efficiency_meta(p);
    tail.extend(extra);
    let mut meta = params_meta(p);
    meta.extend(tail.iter().cloned());
    let mut w = open(out.output.as_deref())?;
    if which == Which::Joint {
        match out.format {
            Format::Csv => output::write_joint_csv(&mut w, &td, &tail)?,
            Format::Table => {
                let rows = td
                    .atoms()
                    .iter()
                    .map(|a| {
                        vec![
                            Cell::from(a.initial.label()),
                            Cell::from(a.thermalized.label()),
                            a.w1.into(),
                            a.qh.into(),
                            a.w2.into(),
                            a.work().into(),
                            a.prob.into(),
                        ]
                    })
                    .collect();
                let header = ["initial", "thermalized", "W1", "Qh", "W2", "W", "probability"];
                Report {
                    meta,
                    header: header.map(String::from).to_vec(),
                    rows,
                }
                .render(Format::Table, &mut w)?;
            }
        }
        w.flush()?;
        return Ok(());
    }
    let (d, name) = match which {
        Which::Work => (tpm::work_distribution(&td), "W"),
        Which::EtaScaled => (tpm::scaled_efficiency_distribution(&td)?, "eta_scaled"),
        Which::EtaStochastic => (tpm::stochastic_efficiency_distribution(&td), "eta_stochastic"),
        Which::Joint => unreachable!(),
    };
    match out.format {
        Format::Csv => output::write_distribution_csv(&mut w, &d, name, &meta)?,
        Format::Table => distribution_table(&d, name, meta).render(Format::Table, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

pub fn distribution(params: &OptionalPointArgs, preset: Option<&str>, which: Which, out: &OutputArgs) -> Result<()> {
    match preset {
        Some(name) => {
            let preset = presets::preset(name)?;
            let PresetKind::Distribution(p) = preset.kind else {
                return Err(UsageError(format!("preset `{name}` is not a distribution preset")).into());
            };
            write_distribution(&p, which, vec![("preset".into(), name.to_string())], out)
        }
        None => write_distribution(&require_point(params)?, which, Vec::new(), out),
    }
}

fn parse_axis(text: &str) -> Result<Axis> {
    let parts: Vec<&str> = text.split(':').collect();
    if !(4..=5).contains(&parts.len()) {
        return Err(UsageError(format!("axis `{text}`: expected PARAM:MIN:MAX:POINTS[:log]")).into());
    }
    let num = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| UsageError(format!("axis `{text}`: `{s}` is not a number")).into())
    };
    let points = parts[3]
        .parse()
        .map_err(|_| UsageError(format!("axis `{text}`: `{}` is not a point count", parts[3])))?;
    Ok(Axis {
        param: parts[0].parse::<ScanParam>()?,
        min: num(parts[1])?,
        max: num(parts[2])?,
        points,
        spacing: parts.get(4).map_or(Ok(Spacing::Linear), |s| s.parse())?,
    })
}

fn preset_listing(show: bool) -> Result<()> {
    let mut w = open(None)?;
    let all = presets::all();
    if show {
        #[derive(serde::Serialize)]
        struct Dump<'a> {
            version: u32,
            presets: &'a [Preset],
        }
        serde_json::to_writer_pretty(
            &mut w,
            &Dump {
                version: PRESET_VERSION,
                presets: &all,
            },
        )?;
        writeln!(w)?;
    } else {
        writeln!(w, "# preset_version={PRESET_VERSION}")?;
        for p in &all {
            let kind = match &p.kind {
                PresetKind::Grid(_) => "grid",
                PresetKind::Lines(_) => "lines",
                PresetKind::Distribution(_) => "distribution",
            };
            let approx = if p.approximate { " (approximate ranges)" } else { "" };
            writeln!(w, "{:<12} {:<13} {}{approx}", p.name, kind, p.description)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn scan(args: &ScanArgs) -> Result<()> {
    let started = Instant::now();
    let mut w = open(args.output.as_deref())?;
    let rows = match args.preset.as_deref() {
        Some("list") => return preset_listing(args.show),
        Some(name) => {
            let preset = presets::preset(name)?;
            let mut meta: Meta = vec![
                ("preset".into(), name.to_string()),
                ("approximate".into(), preset.approximate.to_string()),
            ];
            match preset.kind {
                PresetKind::Grid(spec) => {
                    eprintln!("scan {name}: {} cells", spec.cell_count());
                    let grid = run_grid(&spec)?;
                    output::write_scan_csv(&mut w, &grid, &meta)?;
                    grid.cells().len()
                }
                PresetKind::Lines(curves) => {
                    let mut done = Vec::new();
                    for (k, c) in curves.into_iter().enumerate() {
                        eprintln!("scan {name}: curve {} ({})", k + 1, c.label);
                        done.push((c.label, run_line(&c.spec)?));
                    }
                    output::write_curves_csv(&mut w, &done, &meta)?;
                    done.iter().map(|(_, g)| g.cells().len()).sum()
                }
                PresetKind::Distribution(p) => {
                    let d = tpm::scaled_efficiency_distribution(&enumerate_trajectories(&p))?;
                    meta.extend(params_meta(&p));
                    meta.extend(efficiency_meta(&p));
                    output::write_distribution_csv(&mut w, &d, "eta_scaled", &meta)?;
                    d.len()
                }
            }
        }
        None => {
            let axis1 = args
                .axis1
                .as_deref()
                .ok_or_else(|| UsageError("scan needs --preset or --axis1".into()))?;
            let axis1 = parse_axis(axis1)?;
            let axis2 = args.axis2.as_deref().map(parse_axis).transpose()?;
            let quantities = args
                .quantities
                .iter()
                .map(|q| q.trim().parse::<Observable>())
                .collect::<idle_otto::Result<Vec<_>>>()?;
            let fixed = FixedParams {
                h_initial: args.hi,
                h_final: args.hf,
                coupling: args.coupling,
                t_cold: args.t_cold,
                t_hot: args.t_hot,
            };
            let spec = ScanSpec::new(fixed, axis1, axis2, quantities)?;
            eprintln!("scan: {} cells", spec.cell_count());
            let grid = if spec.is_grid() {
                run_grid(&spec)?
            } else {
                run_line(&spec)?
            };
            output::write_scan_csv(&mut w, &grid, &[("preset".into(), "custom".into())])?;
            grid.cells().len()
        }
    };
    w.flush()?;
    eprintln!("scan: wrote {rows} rows in {:.2}s", started.elapsed().as_secs_f64());
    Ok(())
}

pub fn limits(coupling: f64, hi: f64, hf: f64, out: &OutputArgs) -> Result<()> {
    let l = cycle::asymptotic_limits(coupling, hi, hf)?;
    let mut meta = base_meta();
    meta.extend([
        ("J".to_string(), format_number(coupling)),
        ("h_i".to_string(), format_number(hi)),
        ("h_f".to_string(), format_number(hf)),
    ]);
    let fields = vec![
        ("mean_W", l.mean_w.into()),
        ("var_W", l.var_w.into()),
        ("rel_fluct_W", l.coefficient_of_variation.into()),
        ("eta_th", l.eta_th.into()),
        ("var_eta", l.var_eta.into()),
    ];
    emit(&Report::single(meta, fields), out)
}

/// Returns the number of points violating the bound.
pub fn tur(args: &TurArgs) -> Result<usize> {
    let Some(n) = args.sweep else {
        let p = require_point(&args.params)?;
        let t = verify_tur(&p)?;
        let mut meta = base_meta();
        meta.extend(params_meta(&p));
        let fields = vec![
            ("mean_Sigma", t.sigma_mean.into()),
            ("tur_bound", t.bound.into()),
            ("tur_observed", t.observed.into()),
            ("tur_slack", t.slack.into()),
            ("tur_satisfied", Cell::flag(t.satisfied)),
        ];
        emit(&Report::single(meta, fields), &args.out)?;
        return Ok(usize::from(!t.satisfied));
    };
    if n == 0 {
        return Err(UsageError("--sweep must be at least 1".into()).into());
    }
    let mut rows = Vec::with_capacity(n);
    let (mut violations, mut skipped) = (0, 0);
    let mut min_slack = f64::INFINITY;
    for p in random_points(args.seed, n) {
        let Ok(t) = verify_tur(&p) else {
            skipped += 1;
            continue;
        };
        violations += usize::from(!t.satisfied);
        min_slack = min_slack.min(t.slack);
        rows.push(vec![
            p.coupling().into(),
            p.h_initial().into(),
            p.h_final().into(),
            p.t_cold().into(),
            p.t_hot().into(),
            t.sigma_mean.into(),
            t.bound.into(),
            t.observed.into(),
            t.slack.into(),
            Cell::flag(t.satisfied),
        ]);
    }
    let mut meta = base_meta();
    meta.extend([
        ("seed".to_string(), args.seed.to_string()),
        ("points".to_string(), n.to_string()),
        ("skipped_zero_work".to_string(), skipped.to_string()),
        ("violations".to_string(), violations.to_string()),
        ("min_slack".to_string(), format_number(min_slack)),
    ]);
    let header = [
        "J",
        "hi",
        "hf",
        "Tc",
        "Th",
        "mean_Sigma",
        "tur_bound",
        "tur_observed",
        "tur_slack",
        "tur_satisfied",
    ];
    let report = Report {
        meta,
        header: header.map(String::from).to_vec(),
        rows,
    };
    emit(&report, &args.out)?;
    eprintln!(
        "tur: {} points evaluated, {skipped} skipped (zero work), {violations} violations, min slack {min_slack:e}",
        n - skipped
    );
    Ok(violations)
}

pub fn extremum(args: &ExtremumArgs) -> Result<()> {
    let objective: Observable = args.objective.parse()?;
    let param: ScanParam = args.param.parse()?;
    let interval = Axis {
        param,
        min: args.min,
        max: args.max,
        points: args.points,
        spacing: args.spacing.parse()?,
    };
    let fixed = FixedParams {
        h_initial: args.hi,
        h_final: args.hf,
        coupling: args.coupling,
        t_cold: args.t_cold,
        t_hot: args.t_hot,
    };
    let goal = match args.goal {
        Some(GoalArg::Min) => Goal::Minimize,
        Some(GoalArg::Max) => Goal::Maximize,
        None => Goal::natural(objective),
    };
    let r = find_extremum(objective, goal, &interval, &fixed, args.tol)?;
    let mut meta = base_meta();
    meta.push(("h_i".into(), format_number(args.hi)));
    meta.push(("h_f".into(), format_number(args.hf)));
    for (k, v) in [("J", args.coupling), ("Tc", args.t_cold), ("Th", args.t_hot)] {
        if let Some(v) = v {
            meta.push((k.into(), format_number(v)));
        }
    }
    let goal_name = match r.goal {
        Goal::Minimize => "min",
        Goal::Maximize => "max",
    };
    let fields = vec![
        ("objective", Cell::from(r.objective.name())),
        ("goal", Cell::from(goal_name)),
        ("param", Cell::from(r.param.name())),
        ("argument", r.argument.into()),
        ("value", r.value.into()),
        ("tolerance", r.tolerance.into()),
        ("evaluations", Cell::Int(r.evaluations as u64)),
    ];
    emit(&Report::single(meta, fields), &args.out)
}

pub fn montecarlo(params: &PointArgs, samples: u64, seed: u64, alpha: f64, out: &OutputArgs) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter {
            field: "alpha",
            reason: format!("must lie in (0, 1), got {alpha}"),
        }
        .into());
    }
    let p = point(params)?;
    let exact = enumerate_trajectories(&p);
    let s = sample_trajectories(&p, samples, seed)?;
    let gof = s.goodness_of_fit(&exact);
    let (critical, p_value) = if gof.degrees_of_freedom > 0 {
        let chi = ChiSquared::new(gof.degrees_of_freedom as f64)?;
        (chi.inverse_cdf(1.0 - alpha), chi.sf(gof.statistic))
    } else {
        (f64::INFINITY, 1.0)
    };
    let mean = s.mean_work();
    let exact_mean = cycle::mean_work(&p).total;
    let band = 5.0 * cycle::work_variance(&p).total.sqrt() / (samples as f64).sqrt();

    let mut meta = base_meta();
    meta.extend(params_meta(&p));
    meta.extend([
        ("samples".to_string(), samples.to_string()),
        ("seed".to_string(), seed.to_string()),
        ("mean_W_sampled".to_string(), format_number(mean)),
        ("mean_W_exact".to_string(), format_number(exact_mean)),
        ("five_sigma_band".to_string(), format_number(band)),
        (
            "mean_within_band".to_string(),
            ((mean - exact_mean).abs() <= band).to_string(),
        ),
        ("chi2".to_string(), format_number(gof.statistic)),
        ("dof".to_string(), gof.degrees_of_freedom.to_string()),
        ("pooled_cells".to_string(), gof.pooled_cells.to_string()),
        ("chi2_critical".to_string(), format_number(critical)),
        ("p_value".to_string(), format_number(p_value)),
        ("chi2_pass".to_string(), (gof.statistic < critical).to_string()),
    ]);
    let rows = exact
        .atoms()
        .iter()
        .map(|a| {
            vec![
                Cell::from(a.initial.label()),
                Cell::from(a.thermalized.label()),
                Cell::Int(s.count_of(a.initial, a.thermalized)),
                Cell::Num(a.prob * samples as f64),
                Cell::Num(a.prob),
            ]
        })
        .collect();
    let header = ["initial", "thermalized", "observed", "expected", "probability"];
    emit(
        &Report {
            meta,
            header: header.map(String::from).to_vec(),
            rows,
        },
        out,
    )
}
