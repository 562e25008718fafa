//! Text formats read from disk: partition files and custom observables.
//!
//! Partition file: one block per line, whitespace-separated domain indices.
//! Blank lines and lines starting with `#` are skipped. The domain is
//! `[0, max index + 1)` and every index must appear exactly once.
//!
//! Observable file (JSON): either `{"diagonal": [..]}` or
//! `{"real": [[..], ..], "imag": [[..], ..]}` with `imag` optional.

use num_complex::Complex64 as C64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::quantum::linalg::CMatrix;
use crate::quantum::Observable;
use crate::symmetry::{partition_action, GroupAction};

/// Cap on domain indices accepted from a partition file.
pub const MAX_PARTITION_DOMAIN: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSpec {
    pub domain_size: usize,
    pub blocks: Vec<Vec<usize>>,
}

pub fn parse_partition(text: &str) -> Result<PartitionSpec> {
    let mut blocks = Vec::new();
    let mut max_index = None::<usize>;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut block = Vec::new();
        for token in line.split_whitespace() {
            let x: usize = token.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("{token:?} is not a domain index"),
            })?;
            if x >= MAX_PARTITION_DOMAIN {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("index {x} exceeds {MAX_PARTITION_DOMAIN}"),
                });
            }
            max_index = Some(max_index.map_or(x, |m| m.max(x)));
            block.push(x);
        }
        blocks.push(block);
    }
    let domain_size = max_index.map(|m| m + 1).ok_or(Error::Parse {
        line: 0,
        msg: "no blocks".into(),
    })?;
    Ok(PartitionSpec {
        domain_size,
        blocks,
    })
}

/// Parses and validates a partition file into an explicit-partition action.
pub fn load_partition_action(text: &str) -> Result<GroupAction> {
    let spec = parse_partition(text)?;
    partition_action(spec.domain_size, &spec.blocks)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObservableFile {
    diagonal: Option<Vec<f64>>,
    real: Option<Vec<Vec<f64>>>,
    imag: Option<Vec<Vec<f64>>>,
}

fn square(rows: &[Vec<f64>], what: &str) -> Result<usize> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse {
            line: 0,
            msg: format!("{what} matrix is empty"),
        });
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(Error::Parse {
            line: 0,
            msg: format!("{what} row {bad} has length {} (expected {n})", rows[bad].len()),
        });
    }
    Ok(n)
}

pub fn parse_observable(text: &str) -> Result<Observable> {
    let file: ObservableFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    match (file.diagonal, file.real, file.imag) {
        (Some(d), None, None) => {
            if d.is_empty() || d.len() > crate::quantum::observable::MAX_DENSE_DIM {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("diagonal length {} unsupported", d.len()),
                });
            }
            Observable::diagonal(d)
        }
        (None, Some(re), im) => {
            let n = square(&re, "real")?;
            if n > crate::quantum::observable::MAX_DENSE_DIM {
                return Err(Error::DimensionOverflow {
                    dim: n,
                    cap: crate::quantum::observable::MAX_DENSE_DIM,
                });
            }
            if let Some(im) = &im {
                if square(im, "imag")? != n {
                    return Err(Error::DimensionMismatch(n, im.len()));
                }
            }
            let m = CMatrix::from_fn(n, n, |i, j| {
                C64::new(re[i][j], im.as_ref().map_or(0.0, |im| im[i][j]))
            });
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Parse {
                    line: 0,
                    msg: "non-finite matrix entry".into(),
                });
            }
            Observable::dense(m)
        }
        _ => Err(Error::Parse {
            line: 0,
            msg: "expected exactly one of `diagonal` or `real` (+ optional `imag`)".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::{enumerate_orbits, orbit_stats};

    #[test]
    fn partition_file_round_trip() {
        let text = "# skewed\n0 1 2 3\n\n4\n5\n6 7\n";
        let spec = parse_partition(text).unwrap();
        assert_eq!(spec.domain_size, 8);
        assert_eq!(spec.blocks.len(), 4);
        let stats = orbit_stats(&enumerate_orbits(&load_partition_action(text).unwrap()));
        assert_eq!(stats.max_orbit, 4);
    }

    #[test]
    fn partition_file_errors() {
        assert!(matches!(parse_partition("0 1\nx\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_partition("\n# nothing\n").is_err());
        assert!(matches!(
            load_partition_action("0 1\n1 2\n"),
            Err(Error::InvalidPartition(_))
        ));
        assert!(matches!(
            load_partition_action("0 2\n"),
            Err(Error::InvalidPartition(_))
        ));
    }

    #[test]
    fn observable_file_forms() {
        let d = parse_observable(r#"{"diagonal": [1.0, -1.0, 0.5, 0.0]}"#).unwrap();
        assert!(d.is_diagonal());
        let m = parse_observable(r#"{"real": [[0, 1], [1, 0]]}"#).unwrap();
        assert_eq!(m.dim(), 2);
        let y = parse_observable(r#"{"real": [[0, 0], [0, 0]], "imag": [[0, -1], [1, 0]]}"#).unwrap();
        assert!((y.operator_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn observable_file_errors() {
        assert!(parse_observable(r#"{"diagonal": [2.0]}"#).is_err());
        assert!(parse_observable(r#"{"real": [[0, 1], [0, 0]]}"#).is_err());
        assert!(parse_observable(r#"{"real": [[0, 1]]}"#).is_err());
        assert!(parse_observable(r#"{"real": [[1]], "diagonal": [1]}"#).is_err());
        assert!(parse_observable("not json").is_err());
        assert!(parse_observable(r#"{"real": [[0.0]], "imag": [[0.0, 1.0]]}"#).is_err());
    }
}
