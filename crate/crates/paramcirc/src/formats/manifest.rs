use super::{content_lines, ParseError};

/// File names of `Γ₀…Γ_n`, one per line, relative to the manifest.
pub fn parse_manifest(text: &str) -> Result<Vec<String>, ParseError> {
    let files: Vec<String> = content_lines(text)
        .map(|(l, words)| match words.as_slice() {
            [file] => Ok(file.to_string()),
            _ => Err(ParseError::new(l, "expected one file name per line")),
        })
        .collect::<Result<_, _>>()?;
    if files.is_empty() {
        return Err(ParseError::new(1, "manifest lists no circuits"));
    }
    Ok(files)
}

pub fn render_manifest(files: &[String]) -> String {
    files.iter().map(|f| format!("{f}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let files = vec!["gamma_0.circ".to_string(), "gamma_1.circ".to_string()];
        assert_eq!(parse_manifest(&render_manifest(&files)).unwrap(), files);
        assert_eq!(parse_manifest("# chain\n\na.circ b.circ\n").unwrap_err().line, 3);
        assert!(parse_manifest("# nothing\n").is_err());
    }
}
