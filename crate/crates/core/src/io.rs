//! Text formats for codes and partitions.
//!
//! Code file: a header line `n q`, then one word per line. Words are written as
//! `n` base-q digits without separators when q ≤ 10, and as comma-separated
//! integers otherwise. Coordinate 0 is the leftmost symbol.
//!
//! Partition file: a header `n q k`, then either one cell index per line in rank
//! order, or `k` sections each introduced by `cell <i> <size>` and followed by
//! `size` words in the code-file word format.

use std::fmt::Write as _;

use crate::error::{parse_err, Error, Result};
use crate::hamming::{CodeSet, Space};
use crate::partitions::VertexPartition;

/// Spaces up to this size are written as a per-vertex cell list.
pub const DENSE_PARTITION_LIMIT: u64 = 1 << 20;

pub fn format_symbols(symbols: &[u8], q: usize) -> String {
    if q <= 10 {
        symbols.iter().map(|&s| char::from(b'0' + s)).collect()
    } else {
        symbols.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
    }
}

pub fn parse_symbols(text: &str, n: usize, q: usize, line: usize) -> Result<Vec<u8>> {
    let symbols: Vec<u8> = if q <= 10 {
        text.bytes()
            .map(|b| {
                if b.is_ascii_digit() && ((b - b'0') as usize) < q {
                    Ok(b - b'0')
                } else {
                    Err(parse_err(line, format!("invalid symbol {:?}", b as char)))
                }
            })
            .collect::<Result<_>>()?
    } else {
        text.split(',')
            .map(|t| match t.trim().parse::<usize>() {
                Ok(v) if v < q => Ok(v as u8),
                _ => Err(parse_err(line, format!("invalid symbol {t:?}"))),
            })
            .collect::<Result<_>>()?
    };
    if symbols.len() != n {
        return Err(parse_err(line, format!("expected {n} symbols, found {}", symbols.len())));
    }
    Ok(symbols)
}

fn parse_header(line: Option<(usize, &str)>, fields: usize) -> Result<(usize, Vec<usize>)> {
    let (idx, text) = line.ok_or_else(|| parse_err(1, "missing header"))?;
    let nums = text
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| parse_err(idx + 1, format!("bad header field {t:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if nums.len() != fields {
        return Err(parse_err(idx + 1, format!("header needs {fields} fields")));
    }
    Ok((idx + 1, nums))
}

fn space_at(n: usize, q: usize, line: usize) -> Result<Space> {
    Space::new(n, q).map_err(|e| parse_err(line, e.to_string()))
}

pub fn write_code(code: &CodeSet) -> String {
    let space = code.space();
    let mut s = format!("{} {}\n", space.n(), space.q());
    for r in code.members() {
        s.push_str(&format_symbols(&space.digits(*r), space.q()));
        s.push('\n');
    }
    s
}

pub fn read_code(text: &str) -> Result<CodeSet> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let (hl, h) = parse_header(lines.next(), 2)?;
    let space = space_at(h[0], h[1], hl)?;
    let mut ranks = Vec::new();
    for (idx, line) in lines {
        ranks.push(space.rank_of(&parse_symbols(line.trim(), space.n(), space.q(), idx + 1)?));
    }
    CodeSet::from_ranks(space, ranks).map_err(|e| match e {
        Error::Duplicate(w) => parse_err(0, format!("duplicate word {w}")),
        other => other,
    })
}

pub fn write_partition(p: &VertexPartition) -> String {
    let space = p.space();
    let mut s = format!("{} {} {}\n", space.n(), space.q(), p.cell_count());
    if space.size() <= DENSE_PARTITION_LIMIT {
        for &c in p.cells() {
            let _ = writeln!(s, "{c}");
        }
    } else {
        for (i, cell) in p.cell_members().iter().enumerate() {
            let _ = writeln!(s, "cell {i} {}", cell.len());
            for &r in cell {
                s.push_str(&format_symbols(&space.digits(r), space.q()));
                s.push('\n');
            }
        }
    }
    s
}

pub fn read_partition(text: &str) -> Result<VertexPartition> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).peekable();
    let (hl, h) = parse_header(lines.next(), 3)?;
    let space = space_at(h[0], h[1], hl)?;
    let k = h[2];
    let size = space.size();
    let sectioned = lines.peek().is_some_and(|(_, l)| l.starts_with("cell"));
    let mut cells: Vec<u16> = vec![u16::MAX; size as usize];
    if sectioned {
        let mut current: Option<u16> = None;
        for (idx, line) in lines {
            let t = line.trim();
            if let Some(rest) = t.strip_prefix("cell") {
                let f: Vec<&str> = rest.split_whitespace().collect();
                let id: usize = f.first().and_then(|x| x.parse().ok()).ok_or_else(|| parse_err(idx + 1, "bad cell line"))?;
                if id >= k {
                    return Err(parse_err(idx + 1, format!("cell {id} ≥ k={k}")));
                }
                current = Some(id as u16);
            } else {
                let c = current.ok_or_else(|| parse_err(idx + 1, "word before any cell line"))?;
                let r = space.rank_of(&parse_symbols(t, space.n(), space.q(), idx + 1)?);
                if cells[r as usize] != u16::MAX {
                    return Err(parse_err(idx + 1, "word listed twice"));
                }
                cells[r as usize] = c;
            }
        }
    } else {
        let mut count = 0u64;
        for (idx, line) in lines {
            let c: usize = line.trim().parse().map_err(|_| parse_err(idx + 1, "bad cell index"))?;
            if c >= k {
                return Err(parse_err(idx + 1, format!("cell {c} ≥ k={k}")));
            }
            if count >= size {
                return Err(parse_err(idx + 1, "more lines than vertices"));
            }
            cells[count as usize] = c as u16;
            count += 1;
        }
    }
    if cells.contains(&u16::MAX) {
        return Err(parse_err(0, "some vertices have no cell"));
    }
    VertexPartition::new(space, cells).map_err(|e| parse_err(0, e.to_string()))
}
