//! On-disk correlator cache.
//!
//! One header line `moduli-rec-cache v1`, then one record per line:
//! `g|d_1,...,d_n|num/den` with `d` sorted in decreasing order.

use std::collections::HashSet;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use moduli_core::exact::parse_rational;
use moduli_core::{CorrelatorKey, Rational, WittenEngine};

use crate::render::join_u32;

pub const HEADER: &str = "moduli-rec-cache v1";

/// Parses and validates a whole cache file; any bad record rejects the file.
pub fn parse(text: &str) -> Result<Vec<(CorrelatorKey, Rational)>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(HEADER) {
        return Err("missing or unknown header".into());
    }
    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let lineno = i + 2;
        let bad = |why: &str| format!("line {lineno}: {why}");
        let mut fields = line.split('|');
        let (Some(g), Some(d), Some(v), None) = (fields.next(), fields.next(), fields.next(), fields.next()) else {
            return Err(bad("expected three fields"));
        };
        let g: u32 = g.parse().map_err(|_| bad("bad genus"))?;
        let d: Vec<u32> = if d.is_empty() {
            Vec::new()
        } else {
            d.split(',')
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| bad("bad exponent"))?
        };
        let value = parse_rational(v).map_err(|e| bad(&e.to_string()))?;
        let key = CorrelatorKey::new(g, &d);
        if key.d() != d.as_slice() {
            return Err(bad("exponents not in decreasing order"));
        }
        if !key.can_be_nonzero() {
            return Err(bad("violates the dimension gate"));
        }
        if !seen.insert(key.clone()) {
            return Err(bad("duplicate key"));
        }
        records.push((key, value));
    }
    Ok(records)
}

pub fn render(entries: &[(CorrelatorKey, Rational)]) -> String {
    let mut out = format!("{HEADER}\n");
    for (k, v) in entries {
        out.push_str(&format!(
            "{}|{}|{}/{}\n",
            k.g(),
            join_u32(k.d(), ","),
            v.numer(),
            v.denom()
        ));
    }
    out
}

/// Seeds `engine` from `path`. A missing file is an empty cache; a corrupt
/// one is reported and ignored.
pub fn load(engine: &WittenEngine, path: &Path) {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return,
        Err(e) => {
            eprintln!("warning: cannot read cache {}: {e}; ignoring it", path.display());
            return;
        }
    };
    match parse(&text) {
        Ok(records) => {
            for (k, v) in records {
                engine.insert_checked(k, v).expect("validated on parse");
            }
        }
        Err(e) => eprintln!("warning: corrupt cache {}: {e}; ignoring it", path.display()),
    }
}

/// Writes to a sibling temporary file and renames it over `path`.
pub fn save(engine: &WittenEngine, path: &Path) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = Path::new(&tmp);
    let result = (|| {
        let mut f = fs::File::create(tmp)?;
        f.write_all(render(&engine.entries()).as_bytes())?;
        f.sync_all()?;
        fs::rename(tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(tmp);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use moduli_core::exact::rat;

    #[test]
    fn round_trip() {
        let w = WittenEngine::new();
        w.correlator(2, &[2, 3]);
        let text = render(&w.entries());
        assert!(text.contains("2|3,2|29/5760\n"));
        let back = parse(&text).unwrap();
        assert_eq!(back, w.entries());
    }

    #[test]
    fn rejects_bad_files() {
        assert!(parse("").is_err());
        assert!(parse("other\n").is_err());
        assert!(parse(&format!("{HEADER}\n0|0,0,0|1/1\n0|0,0,0|1/1\n")).is_err());
        assert!(parse(&format!("{HEADER}\n2|2,3|29/5760\n")).is_err());
        assert!(parse(&format!("{HEADER}\n1|0,0|1/2\n")).is_err());
        assert!(parse(&format!("{HEADER}\n1|1|x\n")).is_err());
        assert_eq!(parse(&format!("{HEADER}\n1|1|1/24\n")).unwrap()[0].1, rat(1, 24));
    }
}
