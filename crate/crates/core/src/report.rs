//! Fixed-width text rendering shared by the result types.

/// Compact numeric formatting for report cells.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let a = x.abs();
    if a == 0.0 {
        "0".to_string()
    } else if a >= 1e4 {
        format!("{x:.1}")
    } else if a >= 1.0 {
        format!("{x:.4}")
    } else if a >= 1e-4 {
        format!("{x:.6}")
    } else {
        format!("{x:.4e}")
    }
}

/// Significance code: `***` 0.1%, `**` 1%, `*` 5%, `.` 10%.
pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else if p < 0.1 {
        "."
    } else {
        ""
    }
}

pub fn fmt_p(p: f64) -> String {
    if p < 1e-4 {
        "<0.0001".to_string()
    } else {
        format!("{p:.5}")
    }
}

/// Left-aligned first column, right-aligned remaining columns.
pub struct TextTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl TextTable {
    pub fn new<S: Into<String>>(header: Vec<S>) -> Self {
        TextTable {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row<S: Into<String>>(&mut self, cells: Vec<S>) {
        self.rows.push(cells.into_iter().map(Into::into).collect());
    }

    pub fn render(&self) -> String {
        let ncols = self.header.len();
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (j, c) in r.iter().enumerate().take(ncols) {
                widths[j] = widths[j].max(c.chars().count());
            }
        }
        let fmt_line = |cells: &[String]| {
            let mut line = String::new();
            for (j, w) in widths.iter().enumerate() {
                let cell = cells.get(j).map(String::as_str).unwrap_or("");
                if j == 0 {
                    line.push_str(&format!("{cell:<w$}"));
                } else {
                    line.push_str(&format!("  {cell:>w$}"));
                }
            }
            line.trim_end().to_string() + "\n"
        };
        let total: usize = widths.iter().sum::<usize>() + 2 * ncols.saturating_sub(1);
        let mut out = fmt_line(&self.header);
        out.push_str(&"-".repeat(total));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&fmt_line(r));
        }
        out
    }
}
