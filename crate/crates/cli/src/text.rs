//! Aligned plain-text rendering of JSON reports.

use serde_json::Value;

pub fn render(v: &Value) -> String {
    let mut out = String::new();
    block(v, 0, &mut out);
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(a) => a.iter().all(|x| !x.is_object() && !x.is_array()),
        _ => true,
    }
}

fn block(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(m) => {
            let width = m.keys().filter(|k| is_flat(&m[*k])).map(|k| k.len()).max().unwrap_or(0);
            for (k, x) in m {
                if is_flat(x) {
                    out.push_str(&format!("{pad}{k:<width$}  {}\n", scalar(x)));
                } else if let Some(rows) = table_rows(x) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    table(&rows, indent + 2, out);
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    block(x, indent + 2, out);
                }
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                if is_flat(x) {
                    out.push_str(&format!("{pad}- {}\n", scalar(x)));
                } else {
                    out.push_str(&format!("{pad}[{i}]\n"));
                    block(x, indent + 2, out);
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

/// Arrays of objects render as tables over their flat fields.
fn table_rows(v: &Value) -> Option<Vec<&serde_json::Map<String, Value>>> {
    let a = v.as_array()?;
    if a.is_empty() {
        return None;
    }
    a.iter().map(Value::as_object).collect()
}

fn table(rows: &[&serde_json::Map<String, Value>], indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    // A field is a column when it is flat in every row.
    let mut cols: Vec<&String> = Vec::new();
    for r in rows {
        for k in r.keys() {
            if !cols.contains(&k) && rows.iter().all(|o| o.get(k).is_none_or(is_flat)) {
                cols.push(k);
            }
        }
    }
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| cols.iter().map(|c| r.get(*c).map_or("-".into(), scalar)).collect())
        .collect();
    let widths: Vec<usize> = cols
        .iter()
        .enumerate()
        .map(|(i, c)| cells.iter().map(|r| r[i].chars().count()).chain([c.len()]).max().unwrap_or(0))
        .collect();
    let line = |items: Vec<String>| -> String {
        let parts: Vec<String> = items
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s}{}", " ".repeat(w - s.chars().count())))
            .collect();
        format!("{pad}{}\n", parts.join("  ").trim_end())
    };
    out.push_str(&line(cols.iter().map(|c| c.to_string()).collect()));
    for r in cells {
        out.push_str(&line(r));
    }
    for (i, r) in rows.iter().enumerate() {
        let nested: Vec<(&String, &Value)> = r.iter().filter(|(k, _)| !cols.contains(k)).collect();
        if nested.is_empty() {
            continue;
        }
        out.push_str(&format!("{pad}[{i}]\n"));
        for (k, x) in nested {
            if is_flat(x) {
                out.push_str(&format!("{pad}  {k}  {}\n", scalar(x)));
            } else {
                out.push_str(&format!("{pad}  {k}:\n"));
                block(x, indent + 4, out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn aligns_keys_and_tables() {
        let v = json!({"a": 1, "long_key": "x", "rows": [{"id": 0, "h": "1^{+2}"}, {"id": 10, "h": "0"}]});
        let s = render(&v);
        assert!(s.contains("a         1\n"));
        assert!(s.contains("  id  h\n"));
        assert!(s.contains("  10  0\n"));
    }
}
