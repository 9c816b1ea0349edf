//! On-disk layout of an aggregation directory:
//!
//! | file        | content                                             |
//! |-------------|-----------------------------------------------------|
//! | `H.mtx`     | `H_j`, MatrixMarket array format                    |
//! | `Q.mtx`     | `Q_j`, MatrixMarket array format                    |
//! | `pi0.txt`   | `π₀`, one value per line                            |
//! | `meta.json` | dimension, sizes, source norm, boundary data        |
//! | `qnext.txt` | `q_{j+1}`, only for non-invariant aggregations      |

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arnoldi::aggregation::ArnoldiAggregation;
use crate::error::{Error, Result};
use crate::markov::mtx;

pub const FORMAT_NAME: &str = "arnagg-aggregation";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationMeta {
    pub format: String,
    pub version: u32,
    pub dimension: usize,
    pub n: usize,
    pub source_norm: f64,
    pub boundary_coefficient: f64,
    pub invariant: bool,
    pub residual_l1: f64,
}

pub fn save(agg: &ArnoldiAggregation, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    mtx::write_array_file(agg.hessenberg(), dir.join("H.mtx"))?;
    mtx::write_array_file(agg.basis(), dir.join("Q.mtx"))?;
    mtx::write_vector_file(agg.initial(), dir.join("pi0.txt"))?;
    let qnext = dir.join("qnext.txt");
    match agg.boundary_vector() {
        Some(q) => mtx::write_vector_file(q, &qnext)?,
        None if qnext.exists() => fs::remove_file(&qnext)?,
        None => {}
    }
    let meta = AggregationMeta {
        format: FORMAT_NAME.to_string(),
        version: FORMAT_VERSION,
        dimension: agg.dimension(),
        n: agg.n(),
        source_norm: agg.source_norm(),
        boundary_coefficient: agg.boundary_coefficient(),
        invariant: agg.is_invariant(),
        residual_l1: agg.residual_l1(),
    };
    fs::write(
        dir.join("meta.json"),
        serde_json::to_string_pretty(&meta)? + "\n",
    )?;
    Ok(())
}

pub fn load(dir: impl AsRef<Path>) -> Result<ArnoldiAggregation> {
    let dir = dir.as_ref();
    let meta: AggregationMeta = serde_json::from_str(&fs::read_to_string(dir.join("meta.json"))?)?;
    if meta.format != FORMAT_NAME || meta.version != FORMAT_VERSION {
        return Err(Error::parse(
            "meta.json",
            format!("unsupported format {} v{}", meta.format, meta.version),
        ));
    }
    let h = mtx::read_array_file(dir.join("H.mtx"))?;
    let q = mtx::read_array_file(dir.join("Q.mtx"))?;
    let pi0 = mtx::read_vector_file(dir.join("pi0.txt"))?;
    if h.rows() != meta.dimension || q.rows() != meta.dimension || q.cols() != meta.n {
        return Err(Error::parse(
            "aggregation directory",
            "matrix sizes disagree with meta.json",
        ));
    }
    let boundary_vector = if meta.invariant {
        None
    } else {
        Some(mtx::read_vector_file(dir.join("qnext.txt"))?)
    };
    let agg = ArnoldiAggregation::from_parts(
        h,
        q,
        meta.source_norm,
        meta.boundary_coefficient,
        boundary_vector,
        meta.residual_l1,
    )?;
    if pi0 != agg.initial() {
        return Err(Error::parse("pi0.txt", "initial vector is not ‖p₀‖₂·e₁"));
    }
    Ok(agg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arnoldi::aggregation::build_aggregation;
    use crate::markov::dense::DenseMatrix;
    use crate::markov::sparse::SparseStochasticMatrix;

    #[test]
    fn round_trip_is_exact() {
        let p = SparseStochasticMatrix::from_dense(
            &DenseMatrix::from_rows(&[
                vec![0.1, 0.9, 0.0, 0.0],
                vec![0.0, 0.2, 0.8, 0.0],
                vec![0.0, 0.0, 0.3, 0.7],
                vec![0.5, 0.0, 0.0, 0.5],
            ])
            .unwrap(),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        for j in [2, 4] {
            let agg = build_aggregation(&[0.25, 0.25, 0.5, 0.0], &p, j).unwrap();
            save(&agg, dir.path()).unwrap();
            assert_eq!(load(dir.path()).unwrap(), agg);
        }
    }
}
