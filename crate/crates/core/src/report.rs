//! Indented key-value text used for checker reports.
//!
//! ```text
//! condition_c:
//!   certified: true
//!   partial_tail_sups:
//!     - 4.6
//!     - 2.1
//! ```

use std::fmt;

#[derive(Clone, Debug, PartialEq)]
enum Field {
    Value(String),
    List(Vec<String>),
    Child(Report),
    Children(Vec<Report>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    title: String,
    fields: Vec<(String, Field)>,
}

pub trait ToReport {
    fn to_report(&self) -> Report;
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self { title: title.into(), fields: Vec::new() }
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn field(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.fields.push((key.into(), Field::Value(value.to_string())));
        self
    }

    pub fn opt(self, key: &str, value: Option<impl fmt::Display>) -> Self {
        match value {
            Some(v) => self.field(key, v),
            None => self.field(key, "none"),
        }
    }

    pub fn list<T: fmt::Display>(mut self, key: &str, items: impl IntoIterator<Item = T>) -> Self {
        self.fields.push((key.into(), Field::List(items.into_iter().map(|v| v.to_string()).collect())));
        self
    }

    pub fn child(mut self, key: &str, r: Report) -> Self {
        self.fields.push((key.into(), Field::Child(r)));
        self
    }

    pub fn children(mut self, key: &str, rs: Vec<Report>) -> Self {
        self.fields.push((key.into(), Field::Children(rs)));
        self
    }

    /// Look up a scalar field by key.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find_map(|(k, f)| match f {
            Field::Value(v) if k == key => Some(v.as_str()),
            _ => None,
        })
    }

    fn write_body(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        let pad = "  ".repeat(indent);
        for (k, field) in &self.fields {
            match field {
                Field::Value(v) => writeln!(f, "{pad}{k}: {v}")?,
                Field::List(items) if items.is_empty() => writeln!(f, "{pad}{k}: []")?,
                Field::List(items) => {
                    writeln!(f, "{pad}{k}:")?;
                    for item in items {
                        writeln!(f, "{pad}  - {item}")?;
                    }
                }
                Field::Child(r) => {
                    writeln!(f, "{pad}{k}:")?;
                    r.write_body(f, indent + 1)?;
                }
                Field::Children(rs) if rs.is_empty() => writeln!(f, "{pad}{k}: []")?,
                Field::Children(rs) => {
                    writeln!(f, "{pad}{k}:")?;
                    for r in rs {
                        writeln!(f, "{pad}  - {}:", r.title)?;
                        r.write_body(f, indent + 3)?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}:", self.title)?;
        self.write_body(f, 1)
    }
}
