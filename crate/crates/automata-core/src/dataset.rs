//! The line-based labeled dataset file format.
//!
//! One sample per line: `<label><TAB><space-separated tokens>` with label
//! `0` or `1`; an empty token part encodes `ε`. Files are UTF-8.

use std::io::{BufRead, Write};

use crate::alphabet::{Alphabet, LabeledSample, Str, Symbol};
use crate::{Error, Result};

/// Writes samples in the line format. Token rendering is always
/// space-separated so multi-character symbols stay unambiguous.
pub fn write_samples<W: Write>(mut w: W, samples: &[LabeledSample]) -> Result<()> {
    for s in samples {
        let label = if s.label { '1' } else { '0' };
        writeln!(w, "{}\t{}", label, s.string.display_spaced())?;
    }
    Ok(())
}

/// Reads samples, checking every token against `alphabet`.
pub fn read_samples<R: BufRead>(r: R, alphabet: &Alphabet) -> Result<Vec<LabeledSample>> {
    let raw = read_raw(r)?;
    let mut out = Vec::with_capacity(raw.len());
    for (string, label) in raw {
        alphabet.validate_str(&string)?;
        out.push(LabeledSample::new(string, label));
    }
    Ok(out)
}

/// Reads samples and infers the alphabet from the tokens, ordered by first
/// appearance in the file.
pub fn read_samples_inferring<R: BufRead>(r: R) -> Result<(Alphabet, Vec<LabeledSample>)> {
    let raw = read_raw(r)?;
    let mut symbols: Vec<Symbol> = Vec::new();
    for (string, _) in &raw {
        for tok in string.tokens() {
            if !symbols.contains(tok) {
                symbols.push(tok.clone());
            }
        }
    }
    let alphabet = Alphabet::new(symbols)?;
    let samples = raw
        .into_iter()
        .map(|(string, label)| LabeledSample::new(string, label))
        .collect();
    Ok((alphabet, samples))
}

fn read_raw<R: BufRead>(r: R) -> Result<Vec<(Str, bool)>> {
    let mut out = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let (label_part, token_part) = line.split_once('\t').ok_or_else(|| {
            Error::format("dataset line", format!("line {}: missing TAB", lineno + 1))
        })?;
        let label = match label_part {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::format(
                    "dataset line",
                    format!("line {}: label {other:?} is not 0 or 1", lineno + 1),
                ))
            }
        };
        let string = if token_part.is_empty() {
            Str::empty()
        } else {
            token_part
                .split(' ')
                .map(Symbol::new)
                .collect::<Result<Str>>()?
        };
        out.push((string, label));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::parse_tokens;

    #[test]
    fn round_trip_including_epsilon() {
        let alphabet = Alphabet::from_texts(["a", "b"]).unwrap();
        let samples = vec![
            LabeledSample::new(Str::empty(), true),
            LabeledSample::new(parse_tokens("ab", &alphabet).unwrap(), true),
            LabeledSample::new(parse_tokens("ba", &alphabet).unwrap(), false),
        ];
        let mut buf = Vec::new();
        write_samples(&mut buf, &samples).unwrap();
        assert_eq!(String::from_utf8_lossy(&buf), "1\t\n1\ta b\n0\tb a\n");
        let back = read_samples(buf.as_slice(), &alphabet).unwrap();
        assert_eq!(back, samples);
    }

    #[test]
    fn rejects_unknown_symbol_and_bad_label() {
        let alphabet = Alphabet::from_texts(["a"]).unwrap();
        assert!(read_samples("1\tc\n".as_bytes(), &alphabet).is_err());
        assert!(read_samples("2\ta\n".as_bytes(), &alphabet).is_err());
        assert!(read_samples("1 a\n".as_bytes(), &alphabet).is_err());
    }

    #[test]
    fn inferring_reader_orders_by_first_appearance() {
        let (alphabet, samples) =
            read_samples_inferring("1\tb a\n0\tc\n".as_bytes()).unwrap();
        let texts: Vec<_> = alphabet.symbols().iter().map(|s| s.as_str()).collect();
        assert_eq!(texts, vec!["b", "a", "c"]);
        assert_eq!(samples.len(), 2);
    }
}
