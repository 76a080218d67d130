//! Line-delimited JSON traces. The first line names the schema and its
//! version; every following line is one record.

use std::io::{self, Write};

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Header<'a> {
    schema: &'a str,
    version: u32,
}

pub struct JsonlWriter<W: Write> {
    out: W,
}

impl<W: Write> JsonlWriter<W> {
    pub fn new(mut out: W, schema: &str) -> io::Result<JsonlWriter<W>> {
        serde_json::to_writer(
            &mut out,
            &Header {
                schema,
                version: SCHEMA_VERSION,
            },
        )?;
        out.write_all(b"\n")?;
        Ok(JsonlWriter { out })
    }

    pub fn record<T: Serialize>(&mut self, value: &T) -> io::Result<()> {
        serde_json::to_writer(&mut self.out, value)?;
        self.out.write_all(b"\n")
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Renders records as a complete trace document.
pub fn to_jsonl<T: Serialize>(schema: &str, records: &[T]) -> String {
    let mut w = JsonlWriter::new(Vec::new(), schema).expect("writing to memory");
    for r in records {
        w.record(r).expect("writing to memory");
    }
    String::from_utf8(w.finish().expect("writing to memory")).expect("JSON is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_then_records() {
        let text = to_jsonl("demo", &[1, 2]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines, vec![r#"{"schema":"demo","version":1}"#, "1", "2"]);
    }
}
