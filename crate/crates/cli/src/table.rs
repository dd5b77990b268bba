//! Aligned plain-text tables.

use credal_kernel::interval::{format_decimal, ProbInterval, Real, UnitValue};

pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Table { headers: headers.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn row<S: Into<String>>(&mut self, cells: impl IntoIterator<Item = S>) -> &mut Self {
        self.rows.push(cells.into_iter().map(Into::into).collect());
        self
    }

    pub fn render(&self) -> String {
        let ncols = self.headers.len();
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = (0..ncols)
                .map(|i| {
                    let c = cells.get(i).map_or("", String::as_str);
                    format!("{c}{}", " ".repeat(widths[i] - c.chars().count()))
                })
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = vec![line(&self.headers)];
        out.push(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
        out.extend(self.rows.iter().map(|r| line(r)));
        out.join("\n") + "\n"
    }
}

pub fn real(x: &Real, precision: usize) -> String {
    match x {
        Real::Exact(r) => format_decimal(r, precision),
        Real::Approx { value, .. } => format!("{value:.precision$}"),
    }
}

pub fn unit(x: &UnitValue, precision: usize) -> String {
    real(x.real(), precision)
}

pub fn interval(i: &ProbInterval, precision: usize) -> String {
    format!("[{}, {}]", unit(i.lo(), precision), unit(i.hi(), precision))
}

/// Rows of approach, interval, width and whether the interval contains the
/// classical value. Widths are recomputed from the intervals.
pub fn emit_comparison_table(results: &[(String, ProbInterval)], classical: Option<&Real>, precision: usize) -> String {
    let mut t = Table::new(["approach", "interval", "width", "contains classical"]);
    for (label, i) in results {
        let flag = match classical.map(|c| i.contains(c)) {
            None => "-",
            Some(Some(true)) => "yes",
            Some(Some(false)) => "no",
            Some(None) => "undecided",
        };
        t.row([label.clone(), interval(i, precision), real(&i.width(), precision), flag.to_string()]);
    }
    t.render()
}
