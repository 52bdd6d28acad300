//! Text stream files: a header line `n <N>`, then one update per line,
//! `+ <u> <v>` or `- <u> <v>`. Everything after `#` on a line is a comment.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{decode_edge, encode_edge, Delta, StreamUpdate};
use crate::error::{Error, Result};

/// A parsed stream file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stream {
    pub n: usize,
    pub updates: Vec<StreamUpdate>,
}

pub fn write_stream<W: Write>(mut w: W, n: usize, updates: &[StreamUpdate]) -> std::io::Result<()> {
    writeln!(w, "n {n}")?;
    for up in updates {
        let (u, v) = decode_edge(up.edge, n).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidInput, e))?;
        let sign = match up.delta {
            Delta::Insert => '+',
            Delta::Delete => '-',
        };
        writeln!(w, "{sign} {u} {v}")?;
    }
    w.flush()
}

pub fn write_stream_file(path: &Path, n: usize, updates: &[StreamUpdate]) -> std::io::Result<()> {
    write_stream(BufWriter::new(File::create(path)?), n, updates)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn parse_stream<R: Read>(r: R) -> Result<Stream> {
    let mut n: Option<usize> = None;
    let mut updates = Vec::new();
    for (idx, line) in BufReader::new(r).lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| parse_err(lineno, e.to_string()))?;
        let body = line.split('#').next().unwrap_or("");
        let mut toks = body.split_whitespace();
        let Some(first) = toks.next() else { continue };
        match n {
            None => {
                if first != "n" {
                    return Err(parse_err(lineno, "expected header `n <N>`"));
                }
                let value = toks
                    .next()
                    .ok_or_else(|| parse_err(lineno, "missing vertex count"))?
                    .parse::<usize>()
                    .map_err(|e| parse_err(lineno, e.to_string()))?;
                if toks.next().is_some() {
                    return Err(parse_err(lineno, "trailing tokens after header"));
                }
                n = Some(value);
            }
            Some(nv) => {
                let delta = match first {
                    "+" => Delta::Insert,
                    "-" => Delta::Delete,
                    other => return Err(parse_err(lineno, format!("unknown update sign `{other}`"))),
                };
                let mut vertex = || -> Result<usize> {
                    toks.next()
                        .ok_or_else(|| parse_err(lineno, "missing endpoint"))?
                        .parse::<usize>()
                        .map_err(|e| parse_err(lineno, e.to_string()))
                };
                let u = vertex()?;
                let v = vertex()?;
                if toks.next().is_some() {
                    return Err(parse_err(lineno, "trailing tokens after update"));
                }
                let edge = encode_edge(u, v, nv).map_err(|e| parse_err(lineno, e.to_string()))?;
                updates.push(StreamUpdate { edge, delta });
            }
        }
    }
    let n = n.ok_or_else(|| parse_err(0, "empty stream file: missing header"))?;
    Ok(Stream { n, updates })
}

pub fn read_stream_file(path: &Path) -> Result<Stream> {
    let f = File::open(path).map_err(|e| Error::Parse { line: 0, message: format!("{}: {e}", path.display()) })?;
    parse_stream(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let text = "# generated\nn 4\n\n+ 0 1  # first\n+ 2 3\n- 0 1\n";
        let s = parse_stream(text.as_bytes()).unwrap();
        assert_eq!(s.n, 4);
        assert_eq!(
            s.updates,
            vec![StreamUpdate::insert_pair(0, 1, 4), StreamUpdate::insert_pair(2, 3, 4), StreamUpdate::delete_pair(0, 1, 4)]
        );
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(matches!(parse_stream("+ 0 1\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_stream("n 4\n* 0 1\n".as_bytes()), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_stream("n 4\n+ 0 4\n".as_bytes()), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_stream("n 4\n+ 0\n".as_bytes()), Err(Error::Parse { line: 2, .. })));
        assert!(parse_stream("".as_bytes()).is_err());
    }

    #[test]
    fn header_only_is_empty_stream() {
        let mut buf = Vec::new();
        write_stream(&mut buf, 7, &[]).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "n 7\n");
        assert_eq!(parse_stream(&buf[..]).unwrap(), Stream { n: 7, updates: vec![] });
    }
}
