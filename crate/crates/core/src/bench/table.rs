//! CSV row types and I/O. Field order is the column order.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{Backend, Mode};
use crate::bitstring::BitString;
use crate::error::Result;

/// `n,mode,backend,trial,target,success_prob,nfev_total,depth`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub mode: Mode,
    pub backend: Backend,
    pub trial: usize,
    pub target: BitString,
    pub success_prob: f64,
    pub nfev_total: usize,
    pub depth: usize,
}

/// `n,target,seed,nfev_units_sqrtN,nfev,success_prob`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub n: usize,
    pub target: BitString,
    pub seed: u64,
    #[serde(rename = "nfev_units_sqrtN")]
    pub nfev_units_sqrt_n: f64,
    pub nfev: usize,
    pub success_prob: f64,
}

/// `nfev,expectation`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub nfev: usize,
    pub expectation: f64,
}

/// `n,ansatz_depth,grover_logical_depth,grover_decomposed_depth`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthRow {
    pub n: usize,
    pub ansatz_depth: usize,
    pub grover_logical_depth: usize,
    pub grover_decomposed_depth: usize,
}

pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned, R: Read>(input: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Into::into))
        .collect()
}

/// Header line a row type produces.
pub fn header<T: Serialize>(sample: &T) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(std::slice::from_ref(sample), &mut buf)?;
    let text = String::from_utf8(buf).expect("csv output is utf-8");
    Ok(text.lines().next().unwrap_or_default().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_headers() {
        let sweep = SweepRow {
            n: 2,
            mode: Mode::Grover,
            backend: Backend::Noisy,
            trial: 0,
            target: "01".parse().unwrap(),
            success_prob: 0.5,
            nfev_total: 0,
            depth: 9,
        };
        assert_eq!(
            header(&sweep).unwrap(),
            "n,mode,backend,trial,target,success_prob,nfev_total,depth"
        );
        let curve = CurveRow {
            n: 2,
            target: "01".parse().unwrap(),
            seed: 1,
            nfev_units_sqrt_n: 0.5,
            nfev: 1,
            success_prob: 0.25,
        };
        assert_eq!(
            header(&curve).unwrap(),
            "n,target,seed,nfev_units_sqrtN,nfev,success_prob"
        );
        assert_eq!(
            header(&TracePoint { nfev: 1, expectation: 0.0 }).unwrap(),
            "nfev,expectation"
        );
        let depth = DepthRow {
            n: 1,
            ansatz_depth: 3,
            grover_logical_depth: 9,
            grover_decomposed_depth: 9,
        };
        assert_eq!(
            header(&depth).unwrap(),
            "n,ansatz_depth,grover_logical_depth,grover_decomposed_depth"
        );
    }

    #[test]
    fn target_keeps_leading_zeros() {
        let rows = vec![SweepRow {
            n: 4,
            mode: Mode::Vqe,
            backend: Backend::Ideal,
            trial: 3,
            target: "0010".parse().unwrap(),
            success_prob: 0.125,
            nfev_total: 90,
            depth: 9,
        }];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().contains(",0010,"));
        assert_eq!(read_csv::<SweepRow, _>(buf.as_slice()).unwrap(), rows);
    }

    proptest! {
        #[test]
        fn sweep_rows_round_trip(
            n in 1usize..12,
            bits in any::<u64>(),
            trial in 0usize..100,
            p in 0.0f64..=1.0,
            nfev in 0usize..10_000,
            depth in 0usize..10_000,
            vqe in any::<bool>(),
            noisy in any::<bool>(),
        ) {
            let rows = vec![SweepRow {
                n,
                mode: if vqe { Mode::Vqe } else { Mode::Grover },
                backend: if noisy { Backend::Noisy } else { Backend::Ideal },
                trial,
                target: BitString::new(bits & ((1 << n) - 1), n).unwrap(),
                success_prob: p,
                nfev_total: nfev,
                depth,
            }];
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf).unwrap();
            prop_assert_eq!(read_csv::<SweepRow, _>(buf.as_slice()).unwrap(), rows);
        }

        #[test]
        fn curve_rows_round_trip(units in 0.0f64..100.0, p in 0.0f64..=1.0, seed in any::<u64>()) {
            let rows = vec![CurveRow {
                n: 5,
                target: "10110".parse().unwrap(),
                seed,
                nfev_units_sqrt_n: units,
                nfev: (units * 5.0).round() as usize,
                success_prob: p,
            }];
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf).unwrap();
            prop_assert_eq!(read_csv::<CurveRow, _>(buf.as_slice()).unwrap(), rows);
        }
    }
}
