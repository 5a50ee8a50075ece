//! gnuplot scripts laid out like the figures: reflection and transmission of
//! two noncollinear films, and the helix reflection/transmission panels.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::ValueEnum;

use crate::error::CliError;
use crate::table::read_header;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Layout {
    /// Two-film R and T, six curves.
    Fig1a,
    /// Helix reflection, incident |+⟩ and |−⟩ panels.
    Fig2,
    /// Helix transmission, same panels.
    Fig3,
}

impl Layout {
    pub fn name(self) -> &'static str {
        match self {
            Layout::Fig1a => "fig1a",
            Layout::Fig2 => "fig2",
            Layout::Fig3 => "fig3",
        }
    }
}

struct Curve {
    column: &'static str,
    title: &'static str,
    dashed: bool,
}

const fn curve(column: &'static str, title: &'static str, dashed: bool) -> Curve {
    Curve { column, title, dashed }
}

struct Panel {
    title: &'static str,
    curves: Vec<Curve>,
}

fn panels(layout: Layout) -> Vec<Panel> {
    match layout {
        Layout::Fig1a => vec![Panel {
            title: "two films, fields at angle φ",
            curves: vec![
                curve("R_pp", "R(++)", false),
                curve("R_mp", "R(-+)", false),
                curve("R_pm", "R(+-)", false),
                curve("T_pp", "T(++)", false),
                curve("T_pm", "T(+-)", false),
                curve("T_mm", "T(--)", false),
            ],
        }],
        Layout::Fig2 => vec![
            Panel {
                title: "reflection, incident |+>",
                curves: vec![curve("R_pp", "without spin flip", false), curve("R_mp", "with spin flip", true)],
            },
            Panel {
                title: "reflection, incident |->",
                curves: vec![curve("R_mm", "without spin flip", false), curve("R_pm", "with spin flip", true)],
            },
        ],
        Layout::Fig3 => vec![
            Panel {
                title: "transmission, incident |+>",
                curves: vec![curve("T_pp", "without spin flip", false), curve("T_mp", "with spin flip", true)],
            },
            Panel {
                title: "transmission, incident |->",
                curves: vec![curve("T_mm", "without spin flip", false), curve("T_pm", "with spin flip", true)],
            },
        ],
    }
}

/// Script text for `csv` whose columns are `header`.
pub fn plot_script(csv: &Path, header: &[String], layout: Layout) -> Result<String, CliError> {
    let panels = panels(layout);
    let column = |name: &str| header.iter().position(|h| h == name).map(|i| i + 1);
    let missing: Vec<String> = std::iter::once("k")
        .chain(panels.iter().flat_map(|p| p.curves.iter().map(|c| c.column)))
        .filter(|name| column(name).is_none())
        .map(str::to_string)
        .collect();
    if !missing.is_empty() {
        return Err(CliError::HeaderMismatch { path: csv.into(), layout: layout.name().into(), missing });
    }
    let k_col = column("k").unwrap();
    let data = csv.display().to_string().replace('"', "\\\"");
    let image = csv.with_extension(format!("{}.png", layout.name()));

    let mut s = String::new();
    let _ = writeln!(s, "# {} layout for {}", layout.name(), csv.display());
    let _ = writeln!(s, "set datafile separator \",\"");
    let _ = writeln!(s, "set terminal pngcairo size 900,{} enhanced", 420 * panels.len() + 60);
    let _ = writeln!(s, "set output \"{}\"", image.display().to_string().replace('"', "\\\""));
    let _ = writeln!(s, "set xlabel \"k (1/nm)\"");
    let _ = writeln!(s, "set ylabel \"probability\"");
    let _ = writeln!(s, "set yrange [0:1.05]");
    let _ = writeln!(s, "set key outside right");
    if panels.len() > 1 {
        let _ = writeln!(s, "set multiplot layout {},1", panels.len());
    }
    for panel in &panels {
        let _ = writeln!(s, "set title \"{}\"", panel.title);
        let plots: Vec<String> = panel
            .curves
            .iter()
            .enumerate()
            .map(|(i, c)| {
                format!(
                    "\"{data}\" skip 1 using {k_col}:{} with lines lw 2 dt {} lc {} title \"{}\"",
                    column(c.column).unwrap(),
                    if c.dashed { 2 } else { 1 },
                    i + 1,
                    c.title
                )
            })
            .collect();
        let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    }
    if panels.len() > 1 {
        let _ = writeln!(s, "unset multiplot");
    }
    Ok(s)
}

/// Writes `<stem>.<layout>.gp` next to the CSV, or into `out_dir`.
pub fn emit_plot_script(csv: &Path, layout: Layout, out_dir: Option<&Path>) -> Result<PathBuf, CliError> {
    let header = read_header(csv)?;
    let script = plot_script(csv, &header, layout)?;
    let file_name = format!("{}.{}.gp", csv.file_stem().unwrap_or_default().to_string_lossy(), layout.name());
    let path = match out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            dir.join(file_name)
        }
        None => csv.with_file_name(file_name),
    };
    std::fs::write(&path, script)?;
    Ok(path)
}
