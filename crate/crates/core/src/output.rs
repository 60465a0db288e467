//! CSV serialization.
//!
//! Every file starts with `# key=value` comment lines, then a header row, then
//! data rows. Floats are written with 17 significant digits so they parse back
//! to the identical `f64`; absent values are empty fields.

use std::io::{self, Write};

use crate::cycle::EngineParams;
use crate::scan::presets::PRESET_VERSION;
use crate::scan::{Observable, ScanGrid, ScanSpec};
use crate::tpm::{DiscreteDistribution, TrajectoryDistribution};

pub const TOOL_NAME: &str = "idle-otto";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Ordered `key=value` pairs for the comment block.
pub type Meta = Vec<(String, String)>;

pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

pub fn format_optional(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn write_row<W: Write>(w: &mut W, fields: &[String]) -> io::Result<()> {
    let line: Vec<_> = fields.iter().map(|f| quote(f)).collect();
    writeln!(w, "{}", line.join(","))
}

/// Tool and preset versions, first in every comment block.
pub fn base_meta() -> Meta {
    vec![
        ("tool".into(), TOOL_NAME.into()),
        ("version".into(), TOOL_VERSION.into()),
        ("preset_version".into(), PRESET_VERSION.to_string()),
    ]
}

pub fn params_meta(p: &EngineParams) -> Meta {
    vec![
        ("J".into(), format_number(p.coupling())),
        ("h_i".into(), format_number(p.h_initial())),
        ("h_f".into(), format_number(p.h_final())),
        ("Tc".into(), format_number(p.t_cold())),
        ("Th".into(), format_number(p.t_hot())),
    ]
}

/// Fixed values and axis descriptions of a scan.
pub fn spec_meta(spec: &ScanSpec) -> Meta {
    let f = spec.fixed();
    let mut meta: Meta = vec![
        ("h_i".into(), format_number(f.h_initial)),
        ("h_f".into(), format_number(f.h_final)),
    ];
    for (key, value) in [("J", f.coupling), ("Tc", f.t_cold), ("Th", f.t_hot)] {
        if let Some(v) = value {
            meta.push((key.into(), format_number(v)));
        }
    }
    let axes = [Some(spec.axis1()), spec.axis2()];
    for (k, axis) in axes.into_iter().enumerate() {
        if let Some(a) = axis {
            meta.push((
                format!("axis{}", k + 1),
                format!(
                    "{} {} {} {} {}",
                    a.param,
                    a.spacing.name(),
                    format_number(a.min),
                    format_number(a.max),
                    a.points
                ),
            ));
        }
    }
    meta
}

pub fn write_meta<W: Write>(w: &mut W, meta: &[(String, String)]) -> io::Result<()> {
    for (k, v) in meta {
        writeln!(w, "# {k}={v}")?;
    }
    Ok(())
}

/// Quantities of a scan plus the regime and engine mask if not already requested.
pub fn scan_columns(spec: &ScanSpec) -> Vec<Observable> {
    let mut cols = spec.quantities().to_vec();
    for extra in [Observable::Regime, Observable::Engine] {
        if !cols.contains(&extra) {
            cols.push(extra);
        }
    }
    cols
}

fn cell_field(cell: &crate::scan::ScanCell, o: Observable) -> String {
    match o {
        Observable::Regime => cell.regime().name().to_string(),
        o if o.is_discrete() => cell.value(o).map(|v| format!("{v}")).unwrap_or_default(),
        o => format_optional(cell.value(o)),
    }
}

fn scan_header(grid: &ScanGrid) -> Vec<String> {
    let spec = grid.spec();
    let mut header = vec![spec.axis1().param.name().to_string()];
    if let Some(a2) = spec.axis2() {
        header.push(a2.param.name().to_string());
    }
    header.extend(scan_columns(spec).iter().map(|o| o.name().to_string()));
    header
}

fn scan_rows<W: Write>(w: &mut W, grid: &ScanGrid, prefix: &[String]) -> io::Result<()> {
    let cols = scan_columns(grid.spec());
    for cell in grid.cells() {
        let mut row = prefix.to_vec();
        row.push(format_number(cell.x));
        if let Some(y) = cell.y {
            row.push(format_number(y));
        }
        row.extend(cols.iter().map(|&o| cell_field(cell, o)));
        write_row(w, &row)?;
    }
    Ok(())
}

/// One row per cell in row-major order: axis values, then quantities.
pub fn write_scan_csv<W: Write>(w: &mut W, grid: &ScanGrid, extra: &[(String, String)]) -> io::Result<()> {
    let mut meta = base_meta();
    meta.extend(spec_meta(grid.spec()));
    meta.extend_from_slice(extra);
    write_meta(w, &meta)?;
    write_row(w, &scan_header(grid))?;
    scan_rows(w, grid, &[])
}

/// Several line scans sharing an axis and quantities, stacked with a leading
/// `curve` label column. Each curve's fixed values are listed in the comments.
pub fn write_curves_csv<W: Write>(
    w: &mut W,
    curves: &[(String, ScanGrid)],
    extra: &[(String, String)],
) -> io::Result<()> {
    let mut meta = base_meta();
    meta.extend_from_slice(extra);
    for (label, grid) in curves {
        let fixed = spec_meta(grid.spec())
            .into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ");
        meta.push((format!("curve[{label}]"), fixed));
    }
    write_meta(w, &meta)?;
    let Some((_, first)) = curves.first() else {
        return Ok(());
    };
    let mut header = vec!["curve".to_string()];
    header.extend(scan_header(first));
    write_row(w, &header)?;
    for (label, grid) in curves {
        scan_rows(w, grid, std::slice::from_ref(label))?;
    }
    Ok(())
}

/// Support points of a one-dimensional distribution.
pub fn write_distribution_csv<W: Write>(
    w: &mut W,
    d: &DiscreteDistribution,
    value_name: &str,
    extra: &[(String, String)],
) -> io::Result<()> {
    let mut meta = base_meta();
    meta.extend_from_slice(extra);
    meta.push(("undefined_mass".into(), format_number(d.undefined_mass())));
    meta.push(("divergent_mass".into(), format_number(d.divergent_mass())));
    write_meta(w, &meta)?;
    write_row(w, &[value_name.to_string(), "probability".to_string()])?;
    for &(v, p) in d.support() {
        write_row(w, &[format_number(v), format_number(p)])?;
    }
    Ok(())
}

/// All sixteen trajectories with their stroke energies.
pub fn write_joint_csv<W: Write>(w: &mut W, td: &TrajectoryDistribution, extra: &[(String, String)]) -> io::Result<()> {
    let mut meta = base_meta();
    meta.extend(params_meta(td.params()));
    meta.extend_from_slice(extra);
    write_meta(w, &meta)?;
    write_row(
        w,
        &["initial", "thermalized", "W1", "Qh", "W2", "W", "probability"].map(String::from),
    )?;
    for a in td.atoms() {
        write_row(
            w,
            &[
                a.initial.label().to_string(),
                a.thermalized.label().to_string(),
                format_number(a.w1),
                format_number(a.qh),
                format_number(a.w2),
                format_number(a.work()),
                format_number(a.prob),
            ],
        )?;
    }
    Ok(())
}
