//! Gnuplot scripts that lay out tables written by the CLI.
//!
//! Scripts only reference columns by name; no values are computed here.

use std::fmt::Write;
use std::path::Path;

use clap::ValueEnum;

use super::table::Table;
use super::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Steerability versus field, one curve per chain length (sweep table).
    Fig1a,
    /// dS/dh versus field, one curve per chain length (sweep table).
    Fig1b,
    /// Peak derivative versus ln N with the fitted line (scaling table).
    Fig2,
    /// Inequality value and its derivative versus field (sweep table with
    /// inequality columns).
    Fig4,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1a => "fig1a",
            Figure::Fig1b => "fig1b",
            Figure::Fig2 => "fig2",
            Figure::Fig4 => "fig4",
        }
    }

    fn required_columns(self) -> &'static [&'static str] {
        match self {
            Figure::Fig1a => &["h", "S"],
            Figure::Fig1b => &["h", "dS_dh"],
            Figure::Fig2 => &["ln_N", "peak", "peak_fit"],
            Figure::Fig4 => &["h", "S_ineq", "dS_ineq_dh"],
        }
    }
}

/// Builds the script for `figure` from a parsed table stored at `table_path`.
pub fn emit_plotscript(
    table_path: &Path,
    table: &Table,
    figure: Figure,
) -> Result<String, CliError> {
    let missing: Vec<&str> = figure
        .required_columns()
        .iter()
        .copied()
        .filter(|c| table.column(c).is_none())
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Usage(format!(
            "{} needs column(s) {} in {}",
            figure.name(),
            missing.join(", "),
            table_path.display()
        )));
    }
    if table.rows.is_empty() {
        return Err(CliError::Usage(format!(
            "{} has no data rows",
            table_path.display()
        )));
    }

    let separator = if table_path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("tsv"))
    {
        "\\t"
    } else {
        ","
    };
    let name = figure.name();
    let mut s = String::new();
    writeln!(s, "# {name} layout for {}", table_path.display()).unwrap();
    writeln!(s, "# usage: gnuplot -e 'outfile=\"{name}.png\"' {name}.gp").unwrap();
    writeln!(s, "if (!exists(\"outfile\")) outfile = \"{name}.png\"").unwrap();
    writeln!(
        s,
        "set terminal pngcairo enhanced size 900,{}",
        if figure == Figure::Fig4 { 900 } else { 600 }
    )
    .unwrap();
    writeln!(s, "set output outfile").unwrap();
    writeln!(s, "set datafile separator \"{separator}\"").unwrap();
    writeln!(s, "set datafile commentschars \"#\"").unwrap();
    writeln!(s, "set datafile columnheaders").unwrap();
    writeln!(s, "data = \"{}\"", quote(&table_path.display().to_string())).unwrap();
    if let Some(gamma) = table.meta_value("gamma") {
        writeln!(s, "set title \"γ = {}\"", quote(gamma)).unwrap();
    }
    writeln!(s, "set grid").unwrap();

    match figure {
        Figure::Fig1a => {
            writeln!(s, "set xlabel \"h\"\nset ylabel \"S\"\nset xzeroaxis").unwrap();
            writeln!(s, "plot {}", series(table, "S").join(", \\\n     ")).unwrap();
        }
        Figure::Fig1b => {
            writeln!(s, "set xlabel \"h\"\nset ylabel \"dS/dh\"").unwrap();
            writeln!(s, "plot {}", series(table, "dS_dh").join(", \\\n     ")).unwrap();
        }
        Figure::Fig2 => {
            let slope = table
                .meta_value("kappa2")
                .map(|k| format!("fit, slope {}", quote(k)))
                .unwrap_or_else(|| "fit".into());
            writeln!(s, "set xlabel \"ln N\"\nset ylabel \"|dS/dh| at h_m\"").unwrap();
            writeln!(
                s,
                "plot data using \"ln_N\":\"peak\" with points pt 7 title \"peak\", \\\n     \
                 data using \"ln_N\":\"peak_fit\" with lines title \"{slope}\""
            )
            .unwrap();
        }
        Figure::Fig4 => {
            let settings = table.meta_value("settings").unwrap_or("N");
            writeln!(s, "set multiplot layout 2,1").unwrap();
            writeln!(
                s,
                "set xlabel \"h\"\nset ylabel \"S_{{{}}}\"",
                quote(settings)
            )
            .unwrap();
            let mut top = series(table, "S_ineq");
            if let Some(bound) = table
                .meta_value("bound")
                .filter(|b| b.parse::<f64>().is_ok())
            {
                top.push(format!(
                    "{bound} with lines dashtype 2 title \"bound {bound}\""
                ));
            }
            writeln!(s, "plot {}", top.join(", \\\n     ")).unwrap();
            writeln!(s, "unset title").unwrap();
            writeln!(s, "set ylabel \"dS_{{{}}}/dh\"", quote(settings)).unwrap();
            writeln!(
                s,
                "plot {}",
                series(table, "dS_ineq_dh").join(", \\\n     ")
            )
            .unwrap();
            writeln!(s, "unset multiplot").unwrap();
        }
    }
    Ok(s)
}

/// One plot item per distinct chain length, or a single item when the table
/// has no `N` column.
fn series(table: &Table, y: &str) -> Vec<String> {
    let Some(n_col) = table.column("N") else {
        return vec![format!("data using \"h\":\"{y}\" with lines notitle")];
    };
    let mut sizes: Vec<&str> = Vec::new();
    for row in &table.rows {
        let n = row[n_col].as_str();
        if !sizes.contains(&n) {
            sizes.push(n);
        }
    }
    sizes
        .into_iter()
        .map(|n| {
            let n = quote(n);
            let label = if n == "inf" { "N → ∞".to_string() } else { format!("N = {n}") };
            format!(
                "data using \"h\":(strcol(\"N\") eq \"{n}\" ? column(\"{y}\") : NaN) with lines title \"{label}\""
            )
        })
        .collect()
}

fn quote(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
