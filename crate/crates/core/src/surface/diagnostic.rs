use std::fmt::Write as _;

use serde::Serialize;

/// Byte range into the source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span {
            start,
            end: end.max(start + 1),
        }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub span: Span,
}

/// JSON form of a diagnostic: `{code, message, line, col, excerpt}`.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DiagnosticRecord {
    pub code: String,
    pub message: String,
    pub line: usize,
    pub col: usize,
    pub excerpt: String,
}

impl Diagnostic {
    pub fn error(code: &'static str, message: impl Into<String>, span: Span) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            span,
        }
    }

    /// 1-based line and column of the span start.
    pub fn locate(&self, source: &str) -> (usize, usize) {
        line_col(source, self.span.start)
    }

    pub fn record(&self, source: &str) -> DiagnosticRecord {
        let (line, col) = self.locate(source);
        DiagnosticRecord {
            code: self.code.to_string(),
            message: self.message.clone(),
            line,
            col,
            excerpt: source_line(source, line).to_string(),
        }
    }

    /// Renders the message together with the surrounding source lines and a
    /// caret under the offending span.
    pub fn render(&self, source: &str, file: &str, color: bool) -> String {
        let (line, col) = self.locate(source);
        let (red, bold, reset) = if color {
            ("\x1b[31;1m", "\x1b[1m", "\x1b[0m")
        } else {
            ("", "", "")
        };
        let label = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let gutter = line.to_string().len() + 1;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{red}{label}[{}]{reset}{bold}: {}{reset}",
            self.code, self.message
        );
        let _ = writeln!(
            out,
            "{:>gutter$} {}:{}:{}",
            "-->",
            file,
            line,
            col,
            gutter = gutter + 1
        );
        let _ = writeln!(out, "{:>gutter$} |", "", gutter = gutter);
        if line > 1 {
            let _ = writeln!(
                out,
                "{:>gutter$} | {}",
                line - 1,
                source_line(source, line - 1),
                gutter = gutter
            );
        }
        let text = source_line(source, line);
        let _ = writeln!(out, "{:>gutter$} | {}", line, text, gutter = gutter);
        let line_len = text.chars().count();
        let width = self.span.end.saturating_sub(self.span.start).max(1);
        let width = width.min(line_len.saturating_sub(col - 1).max(1));
        let _ = writeln!(
            out,
            "{:>gutter$} | {}{red}{}{reset}",
            "",
            " ".repeat(col - 1),
            "^".repeat(width),
            gutter = gutter
        );
        out
    }
}

pub fn line_col(source: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(source.len());
    let before = &source[..offset];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map(|i| i + 1).unwrap_or(0);
    let col = source[line_start..offset].chars().count() + 1;
    (line, col)
}

pub fn source_line(source: &str, line: usize) -> &str {
    source.lines().nth(line.saturating_sub(1)).unwrap_or("")
}
