//! Plain-text instance files.
//!
//! ```text
//! fracsplit-instance 1
//! family cobb_douglas
//! seed 7
//! dims 3 0 2
//! block c 1 3
//! 0.5 1.25 2.0
//! ...
//! end
//! ```
//!
//! The header gives the format version, the family name, the seed and the
//! dimensions `k m p`. Each `block <name> <rows> <cols>` is followed by
//! `rows` lines of `cols` space-separated values. Vectors are stored as one
//! row and scalars as `1 1` blocks. Values use the shortest representation
//! that parses back to the same `f64`, so write → read → write is
//! byte-exact. Lines starting with `#` are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{CobbDouglas, Family, Instance, QuadraticLinear, SumLinearRatios};
use crate::{Error, Matrix, Result, Vector};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "fracsplit-instance";

pub fn write_instance(inst: &Instance) -> String {
    let (seed, dims) = match inst {
        Instance::QuadraticLinear(i) => (i.seed, (i.k, i.m, 0)),
        Instance::CobbDouglas(i) => (i.seed, (i.k, 0, i.p)),
        Instance::SumLinearRatios(i) => (i.seed, (i.k, i.m, i.p)),
        Instance::Analytic(_) => (0, (inst.dim(), 0, 0)),
    };
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {FORMAT_VERSION}");
    let _ = writeln!(out, "family {}", inst.family());
    let _ = writeln!(out, "seed {seed}");
    let _ = writeln!(out, "dims {} {} {}", dims.0, dims.1, dims.2);
    match inst {
        Instance::QuadraticLinear(i) => {
            matrix_block(&mut out, "P", &i.p);
            vector_block(&mut out, "s", &i.s);
            matrix_block(&mut out, "A", &i.a);
            vector_block(&mut out, "b", &i.b);
        }
        Instance::CobbDouglas(i) => {
            vector_block(&mut out, "c", &i.c);
            scalar_block(&mut out, "c0", i.c0);
            scalar_block(&mut out, "a0", i.a0);
            vector_block(&mut out, "a", &i.a);
            matrix_block(&mut out, "B", &i.b);
            vector_block(&mut out, "q_lo", &i.q_lo);
            vector_block(&mut out, "q_hi", &i.q_hi);
        }
        Instance::SumLinearRatios(i) => {
            matrix_block(&mut out, "C", &i.c);
            matrix_block(&mut out, "D", &i.d);
            vector_block(&mut out, "r", &i.r);
            vector_block(&mut out, "s", &i.s);
            matrix_block(&mut out, "A", &i.a);
            vector_block(&mut out, "b", &i.b);
        }
        Instance::Analytic(_) => {}
    }
    out.push_str("end\n");
    out
}

fn matrix_block(out: &mut String, name: &str, m: &Matrix) {
    let _ = writeln!(out, "block {name} {} {}", m.nrows(), m.ncols());
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format!("{:?}", m[(r, c)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

fn vector_block(out: &mut String, name: &str, v: &Vector) {
    matrix_block(out, name, &Matrix::from_row_slice(1, v.len(), v.as_slice()));
}

fn scalar_block(out: &mut String, name: &str, v: f64) {
    let _ = writeln!(out, "block {name} 1 1\n{v:?}");
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    /// Next non-comment line with its 1-based number.
    fn next(&mut self) -> Result<(usize, &'a str)> {
        for (i, line) in self.inner.by_ref() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            return Ok((i + 1, line));
        }
        Err(Error::Format {
            line: 0,
            msg: "unexpected end of file".into(),
        })
    }
}

fn fmt_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Format {
        line,
        msg: msg.into(),
    }
}

fn keyed<'a>(lines: &mut Lines<'a>, key: &str) -> Result<(usize, Vec<&'a str>)> {
    let (n, line) = lines.next()?;
    let mut parts = line.split_whitespace();
    if parts.next() != Some(key) {
        return Err(fmt_err(n, format!("expected '{key}'")));
    }
    Ok((n, parts.collect()))
}

fn parse<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| fmt_err(line, format!("cannot parse '{s}'")))
}

pub fn read_instance(text: &str) -> Result<Instance> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (n, version) = keyed(&mut lines, MAGIC)?;
    let version: u32 = parse(n, version.first().copied().unwrap_or(""))?;
    if version != FORMAT_VERSION {
        return Err(fmt_err(n, format!("unsupported format version {version}")));
    }
    let (n, family) = keyed(&mut lines, "family")?;
    let family: Family = family
        .first()
        .ok_or_else(|| fmt_err(n, "missing family"))?
        .parse()
        .map_err(|e: Error| fmt_err(n, e.to_string()))?;
    let (n, seed) = keyed(&mut lines, "seed")?;
    let seed: u64 = parse(n, seed.first().copied().unwrap_or(""))?;
    let (n, dims) = keyed(&mut lines, "dims")?;
    if dims.len() != 3 {
        return Err(fmt_err(n, "dims needs k m p"));
    }
    let k: usize = parse(n, dims[0])?;
    let m: usize = parse(n, dims[1])?;
    let p: usize = parse(n, dims[2])?;

    let mut blocks: HashMap<String, (usize, Matrix)> = HashMap::new();
    loop {
        let (n, line) = lines.next()?;
        if line == "end" {
            break;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "block" {
            return Err(fmt_err(n, "expected 'block <name> <rows> <cols>' or 'end'"));
        }
        let rows: usize = parse(n, parts[2])?;
        let cols: usize = parse(n, parts[3])?;
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (rn, row) = lines.next()?;
            let before = data.len();
            for tok in row.split_whitespace() {
                data.push(parse::<f64>(rn, tok)?);
            }
            if data.len() - before != cols {
                return Err(fmt_err(rn, format!("expected {cols} values")));
            }
        }
        if blocks
            .insert(
                parts[1].to_string(),
                (n, Matrix::from_row_slice(rows, cols, &data)),
            )
            .is_some()
        {
            return Err(fmt_err(n, format!("duplicate block '{}'", parts[1])));
        }
    }

    let mut take = |name: &str, rows: usize, cols: usize| -> Result<Matrix> {
        let (n, mat) = blocks
            .remove(name)
            .ok_or_else(|| fmt_err(0, format!("missing block '{name}'")))?;
        if mat.shape() != (rows, cols) {
            return Err(fmt_err(
                n,
                format!(
                    "block '{name}' is {:?}, expected ({rows}, {cols})",
                    mat.shape()
                ),
            ));
        }
        Ok(mat)
    };
    let row = |m: Matrix| Vector::from_row_slice(m.as_slice());

    let inst = match family {
        Family::QuadraticLinear => Instance::QuadraticLinear(QuadraticLinear {
            k,
            m,
            seed,
            p: take("P", k, k)?,
            s: row(take("s", 1, k)?),
            a: take("A", m, k)?,
            b: row(take("b", 1, m)?),
        }),
        Family::CobbDouglas => Instance::CobbDouglas(CobbDouglas {
            k,
            p,
            seed,
            c: row(take("c", 1, k)?),
            c0: take("c0", 1, 1)?[(0, 0)],
            a0: take("a0", 1, 1)?[(0, 0)],
            a: row(take("a", 1, k)?),
            b: take("B", p, k)?,
            q_lo: row(take("q_lo", 1, p)?),
            q_hi: row(take("q_hi", 1, p)?),
        }),
        Family::SumLinearRatios => Instance::SumLinearRatios(SumLinearRatios {
            k,
            m,
            p,
            seed,
            c: take("C", m, k)?,
            d: take("D", m, k)?,
            r: row(take("r", 1, m)?),
            s: row(take("s", 1, m)?),
            a: take("A", p, k)?,
            b: row(take("b", 1, p)?),
        }),
        Family::Analytic(tag) => Instance::Analytic(tag),
    };
    if let Some((name, (n, _))) = blocks.into_iter().next() {
        return Err(fmt_err(n, format!("unexpected block '{name}'")));
    }
    Ok(inst)
}
