//! Indented JSON with arrays of scalars kept on one line, so matrices read as rows.

use serde::Serialize;

pub fn to_string<T: Serialize>(value: &T) -> String {
    let pretty = serde_json::to_string_pretty(value).expect("serializable");
    let mut out = collapse(&pretty);
    out.push('\n');
    out
}

fn is_scalar_line(line: &str) -> bool {
    let t = line.trim();
    !(t.ends_with('[') || t.ends_with('{') || t.starts_with(']') || t.starts_with('}'))
}

/// Joins `[`, scalar lines, `]` runs. Object members never follow a `[` line directly, so every
/// scalar line collected here is an array element.
fn collapse(pretty: &str) -> String {
    let lines: Vec<&str> = pretty.lines().collect();
    let mut out: Vec<String> = Vec::with_capacity(lines.len());
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i];
        if line.ends_with('[') {
            let mut j = i + 1;
            let mut items = Vec::new();
            while j < lines.len() && is_scalar_line(lines[j]) {
                let t = lines[j].trim();
                items.push(t.strip_suffix(',').unwrap_or(t));
                j += 1;
            }
            if !items.is_empty() && j < lines.len() && lines[j].trim_start().starts_with(']') {
                out.push(format!("{line}{}{}", items.join(", "), lines[j].trim_start()));
                i = j + 1;
                continue;
            }
        }
        out.push(line.to_string());
        i += 1;
    }
    out.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::{json, Value};

    #[test]
    fn rows_stay_inline_and_parse_back() {
        let v = json!({"m": [[1, 0], [0, "1/2,"]], "e": [], "o": {"k": [{"a": 1}]}});
        let s = to_string(&v);
        assert!(s.contains("[1, 0]"), "{s}");
        assert!(s.contains(r#"[0, "1/2,"]"#), "{s}");
        assert_eq!(serde_json::from_str::<Value>(&s).unwrap(), v);
    }
}
