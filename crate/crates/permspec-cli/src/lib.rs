//! Reusable pieces of the `permspec` CLI (exposed for tests and fuzzing).

/// Parse a config file: one `key=value` per line, `#` comments and blank
/// lines ignored. Later occurrences of a key win.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => out.push((k.trim().to_string(), v.trim().to_string())),
            None => return Err(format!("line {} is not key=value: `{line}`", lineno + 1)),
        }
    }
    Ok(out)
}
