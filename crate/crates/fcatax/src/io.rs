//! Reading and writing formal contexts.
//!
//! Two on-disk shapes are supported: the Burmeister CXT interchange
//! format and a CSV form with an attribute-name header and one "1"/"0"
//! row per object. CXT output is canonical — LF newlines, no trailing
//! whitespace — so identical contexts always serialize to identical
//! bytes.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use crate::context::FormalContext;
use crate::error::{Error, Result};

/// Parses a Burmeister CXT document.
///
/// Layout: `B`, a blank line, the object count, the attribute count,
/// another blank line, one name per object, one name per attribute, and
/// one `X`/`.` row per object. A trailing `\r` on a line is tolerated
/// on input; [`write_cxt`] always emits plain LF.
pub fn read_cxt(input: &mut impl Read) -> Result<FormalContext> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut cursor = LineCursor {
        lines: text.split('\n'),
        lineno: 0,
    };

    let header = cursor.next("header line \"B\"")?;
    if header != "B" {
        return Err(Error::CxtParse {
            line: 1,
            message: format!("expected \"B\", found {header:?}"),
        });
    }
    expect_blank(cursor.next("blank line")?, 2)?;
    let n: usize = parse_count(cursor.next("object count")?, 3, "object count")?;
    let m: usize = parse_count(cursor.next("attribute count")?, 4, "attribute count")?;
    expect_blank(cursor.next("blank line")?, 5)?;

    let mut objects = Vec::with_capacity(n);
    for _ in 0..n {
        objects.push(cursor.next("an object name")?.to_owned());
    }
    let mut attributes = Vec::with_capacity(m);
    for _ in 0..m {
        attributes.push(cursor.next("an attribute name")?.to_owned());
    }

    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let line = cursor.next("an incidence row")?;
        if line.chars().count() != m {
            return Err(Error::CxtParse {
                line: cursor.lineno,
                message: format!(
                    "incidence row has {} characters, expected {m}",
                    line.chars().count()
                ),
            });
        }
        let mut row = Vec::with_capacity(m);
        for c in line.chars() {
            match c {
                'X' => row.push(true),
                '.' => row.push(false),
                other => {
                    return Err(Error::CxtParse {
                        line: cursor.lineno,
                        message: format!("invalid incidence character {other:?}"),
                    })
                }
            }
        }
        rows.push(row);
    }

    // Only blank trailing lines may follow the matrix.
    for rest in cursor.lines.by_ref() {
        cursor.lineno += 1;
        expect_blank(rest.strip_suffix('\r').unwrap_or(rest), cursor.lineno)?;
    }

    FormalContext::from_bool_rows(objects, attributes, &rows)
}

struct LineCursor<'a> {
    lines: std::str::Split<'a, char>,
    lineno: usize,
}

impl<'a> LineCursor<'a> {
    fn next(&mut self, what: &str) -> Result<&'a str> {
        self.lineno += 1;
        match self.lines.next() {
            Some(line) => Ok(line.strip_suffix('\r').unwrap_or(line)),
            None => Err(Error::CxtParse {
                line: self.lineno,
                message: format!("unexpected end of file, expected {what}"),
            }),
        }
    }
}

/// Reads a CXT file from `path`.
pub fn read_cxt_file(path: impl AsRef<Path>) -> Result<FormalContext> {
    read_cxt(&mut BufReader::new(File::open(path)?))
}

/// Serializes `ctx` in Burmeister CXT form. The output is byte-for-byte
/// deterministic for a given context.
pub fn write_cxt(ctx: &FormalContext, out: &mut impl Write) -> Result<()> {
    let mut buf = String::new();
    buf.push_str("B\n\n");
    buf.push_str(&ctx.object_count().to_string());
    buf.push('\n');
    buf.push_str(&ctx.attribute_count().to_string());
    buf.push_str("\n\n");
    for name in ctx.object_names() {
        buf.push_str(name);
        buf.push('\n');
    }
    for name in ctx.attribute_names() {
        buf.push_str(name);
        buf.push('\n');
    }
    for g in 0..ctx.object_count() {
        for a in 0..ctx.attribute_count() {
            buf.push(if ctx.incident(g, a) { 'X' } else { '.' });
        }
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

/// Writes `ctx` as a CXT file at `path`.
pub fn write_cxt_file(ctx: &FormalContext, path: impl AsRef<Path>) -> Result<()> {
    let mut file = File::create(path)?;
    write_cxt(ctx, &mut file)
}

/// Parses the CSV context form: a header row whose cells after the
/// first are the attribute names, then one row per object with the
/// object name in the first cell and strictly `"1"` or `"0"` in the
/// rest.
pub fn read_context_csv(input: &mut impl Read) -> Result<FormalContext> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| Error::CsvContext(e.to_string()))?
        .clone();
    if headers.is_empty() {
        return Err(Error::CsvContext("missing header row".into()));
    }
    let attributes: Vec<String> = headers.iter().skip(1).map(str::to_owned).collect();

    let mut objects = Vec::new();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        // Header is line 1, so data row i sits on line i + 2.
        let lineno = i + 2;
        let record = record.map_err(|e| Error::CsvContext(e.to_string()))?;
        if record.len() != attributes.len() + 1 {
            return Err(Error::CsvContext(format!(
                "line {lineno}: expected {} cells, found {}",
                attributes.len() + 1,
                record.len()
            )));
        }
        objects.push(record[0].to_owned());
        let mut row = Vec::with_capacity(attributes.len());
        for cell in record.iter().skip(1) {
            match cell {
                "1" => row.push(true),
                "0" => row.push(false),
                other => {
                    return Err(Error::CsvContext(format!(
                        "line {lineno}: cell must be \"1\" or \"0\", found {other:?}"
                    )))
                }
            }
        }
        rows.push(row);
    }

    FormalContext::from_bool_rows(objects, attributes, &rows)
}

/// Reads the CSV context form from `path`.
pub fn read_context_csv_file(path: impl AsRef<Path>) -> Result<FormalContext> {
    read_context_csv(&mut BufReader::new(File::open(path)?))
}

fn expect_blank(line: &str, lineno: usize) -> Result<()> {
    if line.is_empty() {
        Ok(())
    } else {
        Err(Error::CxtParse {
            line: lineno,
            message: format!("expected a blank line, found {line:?}"),
        })
    }
}

fn parse_count(line: &str, lineno: usize, what: &str) -> Result<usize> {
    line.trim().parse().map_err(|_| Error::CxtParse {
        line: lineno,
        message: format!("invalid {what} {line:?}"),
    })
}
