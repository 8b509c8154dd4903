use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

use super::field::{Grid, SpaceTimeField, SpatialField};
use super::SemigroupError;

/// JSON sidecar describing a field file's grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    #[serde(rename = "L")]
    pub half_width: f64,
    pub h: f64,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    pub n: usize,
}

/// `field.csv` → `field.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn header(dim: usize, with_time: bool) -> Vec<String> {
    let mut h = Vec::new();
    if with_time {
        h.push("t".to_string());
    }
    h.extend((1..=dim).map(|i| format!("x{i}")));
    h.push("value".into());
    h
}

fn write_meta(csv: &Path, meta: &GridMeta) -> Result<(), SemigroupError> {
    let mut text = serde_json::to_string_pretty(meta)?;
    text.push('\n');
    std::fs::write(sidecar_path(csv), text)?;
    Ok(())
}

fn read_meta(csv: &Path) -> Result<GridMeta, SemigroupError> {
    Ok(serde_json::from_str(&std::fs::read_to_string(sidecar_path(csv))?)?)
}

/// Writes `x1[,x2],value` rows plus the sidecar.
pub fn write_spatial_field<T: Real>(field: &SpatialField<T>, csv: &Path) -> Result<(), SemigroupError> {
    let g = field.grid;
    let mut w = csv::Writer::from_path(csv)?;
    w.write_record(header(g.dim, false))?;
    for (i, v) in field.values.iter().enumerate() {
        let mut rec: Vec<String> = g.point(i).iter().map(|x| x.to_string()).collect();
        rec.push(v.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    write_meta(csv, &GridMeta { half_width: g.half_width.as_f64(), h: g.h.as_f64(), horizon: None, steps: None, n: g.dim })
}

/// Writes `t,x1[,x2],value` rows plus the sidecar.
pub fn write_spacetime_field<T: Real>(field: &SpaceTimeField<T>, csv: &Path) -> Result<(), SemigroupError> {
    let g = field.grid;
    let mut w = csv::Writer::from_path(csv)?;
    w.write_record(header(g.dim, true))?;
    for (m, t) in field.times.iter().enumerate() {
        for (i, v) in field.slice(m).iter().enumerate() {
            let mut rec = vec![t.to_string()];
            rec.extend(g.point(i).iter().map(|x| x.to_string()));
            rec.push(v.to_string());
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    let meta = GridMeta {
        half_width: g.half_width.as_f64(),
        h: g.h.as_f64(),
        horizon: Some(field.horizon().as_f64()),
        steps: Some(field.steps()),
        n: g.dim,
    };
    write_meta(csv, &meta)
}

fn read_rows<T: Real>(csv: &Path, grid: &Grid<T>, times: Option<&[T]>) -> Result<Vec<T>, SemigroupError> {
    let slices = times.map_or(1, <[T]>::len);
    let mut values = vec![T::nan(); grid.len() * slices];
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(csv)?;
    let expected = header(grid.dim, times.is_some());
    let got: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if got != expected {
        return Err(SemigroupError::Format(format!("header {got:?}, expected {expected:?}")));
    }
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let nums: Vec<f64> = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| SemigroupError::Format(format!("row {}: {e}", row + 1))))
            .collect::<Result<_, _>>()?;
        let (m, coords) = match times {
            Some(ts) => {
                let dt = ts[1] - ts[0];
                let m = (T::lit(nums[0]) / dt).round().to_usize().filter(|m| *m < ts.len());
                (m, &nums[1..=grid.dim])
            }
            None => (Some(0), &nums[..grid.dim]),
        };
        let x: Vec<T> = coords.iter().map(|v| T::lit(*v)).collect();
        let (Some(m), Some(i)) = (m, grid.nearest(&x)) else {
            return Err(SemigroupError::Format(format!("row {} is off the grid", row + 1)));
        };
        values[m * grid.len() + i] = T::lit(nums[nums.len() - 1]);
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(SemigroupError::Format("missing grid nodes".into()));
    }
    Ok(values)
}

pub fn read_spatial_field<T: Real>(csv: &Path) -> Result<SpatialField<T>, SemigroupError> {
    let meta = read_meta(csv)?;
    let grid = Grid::new(meta.n, T::lit(meta.half_width), T::lit(meta.h))?;
    let values = read_rows(csv, &grid, None)?;
    SpatialField::from_values(grid, values)
}

pub fn read_spacetime_field<T: Real>(csv: &Path) -> Result<SpaceTimeField<T>, SemigroupError> {
    let meta = read_meta(csv)?;
    let grid = Grid::new(meta.n, T::lit(meta.half_width), T::lit(meta.h))?;
    let (Some(horizon), Some(steps)) = (meta.horizon, meta.steps) else {
        return Err(SemigroupError::Format("sidecar lacks T and M".into()));
    };
    let times = SpaceTimeField::<T>::time_axis(T::lit(horizon), steps)?;
    let values = read_rows(csv, &grid, Some(&times))?;
    SpaceTimeField::from_values(grid, T::lit(horizon), steps, values)
}
