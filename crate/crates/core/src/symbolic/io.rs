use std::io::{BufRead, Write};

use super::family::CylinderFamily;
use super::words::{Symbol, SymbolWord};
use crate::{Error, Result};

/// Writes a family as a header `K=<K> n=<n>` followed by one word per line,
/// letters separated by `.`.
pub fn write_family<W: Write>(mut out: W, family: &CylinderFamily, k: usize) -> Result<()> {
    writeln!(out, "K={k} n={}", family.word_length())?;
    for word in family.iter() {
        writeln!(out, "{word}")?;
    }
    Ok(())
}

/// Parses the format of [`write_family`]; returns the family and `K`.
pub fn read_family<R: BufRead>(input: R) -> Result<(CylinderFamily, usize)> {
    let mut lines = input.lines();
    let header = lines.next().ok_or(Error::Parse { line: 1, message: "missing header".into() })??;
    let (k, n) = parse_header(&header).ok_or_else(|| Error::Parse {
        line: 1,
        message: format!("expected `K=<K> n=<n>`, found `{header}`"),
    })?;
    let mut family = CylinderFamily::new(n);
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2;
        let letters: Vec<Symbol> = if line.trim().is_empty() {
            if n != 0 {
                continue;
            }
            Vec::new()
        } else {
            line.trim()
                .split('.')
                .map(|tok| match tok.parse::<Symbol>() {
                    Ok(s) if (s as usize) < k => Ok(s),
                    _ => Err(Error::Parse { line: lineno, message: format!("bad symbol `{tok}`") }),
                })
                .collect::<Result<_>>()?
        };
        family
            .insert(SymbolWord::from_letters(letters))
            .map_err(|e| Error::Parse { line: lineno, message: e.to_string() })?;
    }
    Ok((family, k))
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace();
    let k = it.next()?.strip_prefix("K=")?.parse().ok()?;
    let n = it.next()?.strip_prefix("n=")?.parse().ok()?;
    it.next().is_none().then_some((k, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_format() {
        let fam = CylinderFamily::from_words(
            3,
            [SymbolWord::from(vec![0, 1, 10]), SymbolWord::from(vec![2, 2, 0])],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_family(&mut buf, &fam, 11).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "K=11 n=3\n0.1.10\n2.2.0\n");
        let (back, k) = read_family(&buf[..]).unwrap();
        assert_eq!((back, k), (fam, 11));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = read_family("K=2 n=2\n0.1\n0.5\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = read_family("K=2 n=2\n0.1.1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(read_family("K2 n=2\n".as_bytes()).is_err());
    }
}
