//! Deterministic artifact rendering: fixed float formatting, CSV
//! assembly with provenance comments, and the output sink.

use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Formats a float with 17 significant digits (`{:.16e}`), enough for a
/// lossless round-trip, so identical runs produce byte-identical output.
pub fn fmt_float(value: f64) -> String {
    format!("{value:.16e}")
}

/// Incremental CSV document: provenance comment first, then optional
/// extra comment lines, a header, and data rows.
pub struct CsvDocument {
    text: String,
}

impl CsvDocument {
    /// Starts a document with the `# gqsl <command> <hash>` provenance
    /// line.
    pub fn new(command: &str, config_hash: &str) -> Self {
        CsvDocument { text: format!("# gqsl {command} {config_hash}\n") }
    }

    /// Adds a `# …` comment line.
    pub fn comment(&mut self, line: &str) {
        self.text.push_str("# ");
        self.text.push_str(line);
        self.text.push('\n');
    }

    /// Adds the header row.
    pub fn header(&mut self, columns: &[String]) {
        self.text.push_str(&columns.join(","));
        self.text.push('\n');
    }

    /// Adds a data row of floats.
    pub fn row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|v| fmt_float(*v)).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    /// Appends pre-rendered CSV body text (used for trajectory dumps that
    /// format their own rows).
    pub fn push_raw(&mut self, body: &str) {
        self.text.push_str(body);
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// Writes the rendered artifact to the `--out` path, or stdout when no
/// path was given.
pub fn write_output(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            match lock.write_all(content.as_bytes()).and_then(|()| lock.flush()) {
                Ok(()) => Ok(()),
                // The reader closed the pipe (e.g. `gqsl ... | head`); that is
                // their call, not an error worth reporting.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(CliError::Config(format!("cannot write to stdout: {e}"))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_render_with_seventeen_significant_digits() {
        assert_eq!(fmt_float(0.0), "0.0000000000000000e0");
        assert_eq!(fmt_float(-2.497916666666667), "-2.4979166666666668e0");
        let v = 3.5282227433040827;
        assert_eq!(fmt_float(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn documents_carry_provenance_then_header_then_rows() {
        let mut doc = CsvDocument::new("fig2", "0123456789abcdef");
        doc.comment("case1: g0=1 gS=0");
        doc.header(&["delta".into(), "case1".into()]);
        doc.row(&[0.5, 1.0]);
        let text = doc.finish();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# gqsl fig2 0123456789abcdef");
        assert_eq!(lines[1], "# case1: g0=1 gS=0");
        assert_eq!(lines[2], "delta,case1");
        assert_eq!(lines[3], "5.0000000000000000e-1,1.0000000000000000e0");
    }
}
