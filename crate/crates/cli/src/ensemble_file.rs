//! Parser for the ensemble file format used by `holevo`.
//!
//! One component per line: `p | re,im; re,im; ...` with the matrix entries in
//! row-major order for a d x d state. Whitespace-insensitive; `#` comments.

use holevo_auth::{Complex64, ComplexMatrix, Error};

pub fn parse(text: &str) -> Result<Vec<(f64, ComplexMatrix)>, Error> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| Error::Config(format!("line {}: {what}", lineno + 1));
        let (p_str, entries_str) =
            line.split_once('|').ok_or_else(|| bad("expected `p | entries`"))?;
        let p: f64 = p_str.trim().parse().map_err(|_| bad("bad probability"))?;
        let entries: Vec<Complex64> = entries_str
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|pair| -> Result<Complex64, Error> {
                let (re, im) = pair
                    .split_once(',')
                    .ok_or_else(|| bad(&format!("expected `re,im`, got '{pair}'")))?;
                let re: f64 = re.trim().parse().map_err(|_| bad("bad real part"))?;
                let im: f64 = im.trim().parse().map_err(|_| bad("bad imaginary part"))?;
                Ok(Complex64::new(re, im))
            })
            .collect::<Result<_, _>>()?;
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() {
            return Err(bad(&format!("{} entries do not form a square matrix", entries.len())));
        }
        out.push((p, ComplexMatrix::new(dim, dim, entries)?));
    }
    if out.is_empty() {
        return Err(Error::Config("empty ensemble file".into()));
    }
    Ok(out)
}
