//! CSV and JSON emission.

use std::io::Write;

use serde::Serialize;

use crate::analysis::RateSample;
use crate::error::Result;

use super::experiment::RateReport;

/// One CSV record per row, with a header.
pub fn write_rows<W: Write, T: Serialize>(rows: &[T], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// `alpha,image_error,defect,penalty_defect` traces.
pub fn write_trace<W: Write>(samples: &[RateSample], writer: W) -> Result<()> {
    write_rows(samples, writer)
}

#[derive(Serialize)]
struct PlotRow {
    delta: f64,
    error: f64,
    alpha: f64,
    theory_line: f64,
}

/// `delta,error,alpha,theory_line` where the theory line has the reference
/// slope (or the fitted one) and passes through the centroid of the fitted rows.
pub fn write_plot_csv<W: Write>(report: &RateReport, writer: W) -> Result<()> {
    let slope = report.theoretical_slope.unwrap_or(report.fitted_slope);
    let mask = report.fit_mask();
    let fitted: Vec<_> = report.rows.iter().zip(&mask).filter(|(_, k)| **k).map(|(r, _)| r).collect();
    let n = fitted.len().max(1) as f64;
    let mean_ld = fitted.iter().map(|r| r.delta.ln()).sum::<f64>() / n;
    let mean_le = fitted.iter().map(|r| r.error.ln()).sum::<f64>() / n;
    let offset = mean_le - slope * mean_ld;
    let rows: Vec<PlotRow> = report
        .rows
        .iter()
        .map(|r| PlotRow {
            delta: r.delta,
            error: r.error,
            alpha: r.alpha,
            theory_line: (offset + slope * r.delta.ln()).exp(),
        })
        .collect();
    write_rows(&rows, writer)
}

/// A gnuplot script plotting error and theory line against δ on log axes.
pub fn gnuplot_script(plot_csv: &str, title: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set logscale xy\n\
         set key top left\n\
         set xlabel 'delta'\n\
         set ylabel 'error'\n\
         set title '{title}'\n\
         plot '{plot_csv}' using 1:2 skip 1 with linespoints title 'error', \\\n     \
         '{plot_csv}' using 1:4 skip 1 with lines title 'theory'\n"
    )
}

pub fn write_json<W: Write, T: Serialize>(value: &T, mut writer: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, value)?;
    writeln!(writer)?;
    Ok(())
}
