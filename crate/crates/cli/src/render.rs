//! Plain-text tables for terminal output.

use std::fmt::Display;

/// Longest element listing printed before truncating.
pub const MAX_ROWS: usize = 32;

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn row<D: Display>(&mut self, cells: impl IntoIterator<Item = D>) {
        self.rows.push(cells.into_iter().map(|c| c.to_string()).collect());
    }

    pub fn render(&self) -> String {
        let cols = self.header.len();
        let mut width: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for r in self.rows.iter().take(MAX_ROWS) {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.len());
            }
        }
        let line = |cells: &[String]| {
            let parts: Vec<String> = (0..cols)
                .map(|i| format!("{:<w$}", cells.get(i).map_or("", |s| s.as_str()), w = width[i]))
                .collect();
            parts.join("  ").trim_end().to_string()
        };
        let mut out = vec![line(&self.header)];
        out.push(width.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().join("  "));
        for r in self.rows.iter().take(MAX_ROWS) {
            out.push(line(r));
        }
        if self.rows.len() > MAX_ROWS {
            out.push(format!("... ({} more rows)", self.rows.len() - MAX_ROWS));
        }
        out.join("\n")
    }
}

/// `[a, b, c, ...]` capped at `MAX_ROWS` entries.
pub fn list<T: Display>(items: &[T]) -> String {
    let shown: Vec<String> = items.iter().take(MAX_ROWS).map(|x| x.to_string()).collect();
    if items.len() > MAX_ROWS {
        format!("[{}, ... ({} more)]", shown.join(", "), items.len() - MAX_ROWS)
    } else {
        format!("[{}]", shown.join(", "))
    }
}

pub fn stats(s: &std::collections::BTreeMap<u64, u64>) -> String {
    let parts: Vec<String> = s.iter().map(|(o, c)| format!("{o}:{c}")).collect();
    format!("{{{}}}", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncates_long_tables() {
        let mut t = Table::new(["x", "y"]);
        for i in 0..40 {
            t.row([i, i * i]);
        }
        let s = t.render();
        assert!(s.ends_with("... (8 more rows)"));
        assert_eq!(s.lines().count(), 2 + MAX_ROWS + 1);
        assert_eq!(list(&[1, 2, 3]), "[1, 2, 3]");
        assert!(list(&(0..40).collect::<Vec<_>>()).ends_with("... (8 more)]"));
    }
}
