//! Finite atomic measures on `ℝ_+^{1+n}` and their CSV format
//! (`t,x1[,x2,…],w` with a header row).

use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::geometry::Region;
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("atom {index}: time must be positive, got {t}")]
    NonPositiveTime { index: usize, t: f64 },
    #[error("atom {index}: weight must be nonnegative, got {w}")]
    NegativeWeight { index: usize, w: f64 },
    #[error("atom {index}: non-finite value")]
    NonFinite { index: usize },
    #[error("atom has {got} coordinates, measure lives in dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("bad header: expected t,x1,..,w, got {0:?}")]
    Header(Vec<String>),
    #[error("row {row}: {msg}")]
    Row { row: usize, msg: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One atom `w δ_{(t, x)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom<'a, T> {
    pub t: T,
    pub x: &'a [T],
    pub w: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<T> {
    dim: usize,
    times: Vec<T>,
    coords: Vec<T>,
    weights: Vec<T>,
    total: T,
}

impl<T: Real> DiscreteMeasure<T> {
    pub fn new(dim: usize) -> Self {
        Self { dim, times: Vec::new(), coords: Vec::new(), weights: Vec::new(), total: T::zero() }
    }

    pub fn dirac(t: T, x: Vec<T>, w: T) -> Result<Self, MeasureError> {
        let mut mu = Self::new(x.len());
        mu.push(t, &x, w)?;
        Ok(mu)
    }

    pub fn from_atoms<I, X>(dim: usize, atoms: I) -> Result<Self, MeasureError>
    where
        I: IntoIterator<Item = (T, X, T)>,
        X: AsRef<[T]>,
    {
        let mut mu = Self::new(dim);
        for (t, x, w) in atoms {
            mu.push(t, x.as_ref(), w)?;
        }
        Ok(mu)
    }

    pub fn push(&mut self, t: T, x: &[T], w: T) -> Result<(), MeasureError> {
        let index = self.len();
        if x.len() != self.dim {
            return Err(MeasureError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        if !t.is_finite() || !w.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(MeasureError::NonFinite { index });
        }
        if !(t > T::zero()) {
            return Err(MeasureError::NonPositiveTime { index, t: t.as_f64() });
        }
        if w < T::zero() {
            return Err(MeasureError::NegativeWeight { index, w: w.as_f64() });
        }
        self.times.push(t);
        self.coords.extend_from_slice(x);
        self.weights.push(w);
        self.total += w;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `Σ w`, accumulated in insertion order.
    pub fn total(&self) -> T {
        self.total
    }

    pub fn atom(&self, i: usize) -> Atom<'_, T> {
        Atom { t: self.times[i], x: &self.coords[i * self.dim..(i + 1) * self.dim], w: self.weights[i] }
    }

    pub fn atoms(&self) -> impl ExactSizeIterator<Item = Atom<'_, T>> + '_ {
        (0..self.len()).map(move |i| self.atom(i))
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    /// `c μ`.
    pub fn scaled(&self, c: T) -> Self {
        let mut out = self.clone();
        for w in &mut out.weights {
            *w *= c;
        }
        out.total = out.weights.iter().copied().sum();
        out
    }

    /// Same atoms with new weights.
    pub fn reweighted(&self, weights: &[T]) -> Result<Self, MeasureError> {
        assert_eq!(weights.len(), self.len(), "one weight per atom");
        let mut out = Self::new(self.dim);
        for (a, w) in self.atoms().zip(weights) {
            out.push(a.t, a.x, *w)?;
        }
        Ok(out)
    }

    /// Exact `μ(region)`.
    pub fn measure_of(&self, region: &impl Region<T>) -> T {
        self.atoms().filter(|a| region.contains(a.t, a.x)).map(|a| a.w).sum()
    }

    /// Smallest and largest atom times.
    pub fn time_range(&self) -> Option<(T, T)> {
        let lo = self.times.iter().copied().fold(None, |m: Option<T>, v| Some(m.map_or(v, |m| m.min(v))))?;
        let hi = self.times.iter().copied().fold(lo, T::max);
        Some((lo, hi))
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self, MeasureError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let ok = header.len() >= 3
            && header[0] == "t"
            && header[header.len() - 1] == "w"
            && header[1..header.len() - 1].iter().enumerate().all(|(i, h)| *h == format!("x{}", i + 1));
        if !ok {
            return Err(MeasureError::Header(header));
        }
        let dim = header.len() - 2;
        let mut mu = Self::new(dim);
        let mut x = vec![T::zero(); dim];
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let mut vals = Vec::with_capacity(rec.len());
            for field in rec.iter() {
                let v: f64 = field
                    .parse()
                    .map_err(|e| MeasureError::Row { row: row + 1, msg: format!("{field:?}: {e}") })?;
                vals.push(T::lit(v));
            }
            if vals.len() != dim + 2 {
                return Err(MeasureError::Row { row: row + 1, msg: format!("expected {} fields", dim + 2) });
            }
            x.copy_from_slice(&vals[1..=dim]);
            mu.push(vals[0], &x, vals[dim + 1])?;
        }
        Ok(mu)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MeasureError> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), MeasureError> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.dim).map(|i| format!("x{i}")));
        header.push("w".into());
        w.write_record(&header)?;
        for a in self.atoms() {
            let mut rec = vec![a.t.to_string()];
            rec.extend(a.x.iter().map(|v| v.to_string()));
            rec.push(a.w.to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{containment_interval, ParabolicBall};

    #[test]
    fn region_measure_examples() {
        let zero = DiscreteMeasure::<f64>::new(1);
        let ball = ParabolicBall::new(0.0, vec![0.0], 1.0, 0.5);
        assert_eq!(zero.measure_of(&ball), 0.0);
        let mu = DiscreteMeasure::dirac(1.5, vec![0.0], 2.0).unwrap();
        assert_eq!(mu.measure_of(&ball), 2.0);
    }

    #[test]
    fn rejects_invalid_atoms() {
        let mut mu = DiscreteMeasure::<f64>::new(1);
        assert!(matches!(mu.push(0.0, &[0.0], 1.0), Err(MeasureError::NonPositiveTime { .. })));
        assert!(matches!(mu.push(1.0, &[0.0], -1.0), Err(MeasureError::NegativeWeight { .. })));
        assert!(matches!(mu.push(1.0, &[0.0, 1.0], 1.0), Err(MeasureError::DimensionMismatch { .. })));
        assert!(matches!(mu.push(f64::NAN, &[0.0], 1.0), Err(MeasureError::NonFinite { .. })));
    }

    #[test]
    fn csv_round_trip() {
        let mu = DiscreteMeasure::from_atoms(2, vec![(1.0, [0.5, -1.0], 0.25), (2.0, [0.0, 3.0], 1.0)]).unwrap();
        let mut buf = Vec::new();
        mu.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("t,x1,x2,w\n"));
        let back = DiscreteMeasure::<f64>::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, mu);
        assert!(matches!(
            DiscreteMeasure::<f64>::read_csv("t,y,w\n1,0,1\n".as_bytes()),
            Err(MeasureError::Header(_))
        ));
        assert!(matches!(
            DiscreteMeasure::<f64>::read_csv("t,x1,w\n0,0,1\n".as_bytes()),
            Err(MeasureError::NonPositiveTime { .. })
        ));
    }

    #[test]
    fn ball_mass_jumps_at_interval_ends() {
        // μ(B_r(0, 0)) as a function of r changes only at containment endpoints.
        let mut mu = DiscreteMeasure::<f64>::new(1);
        for i in 0..100 {
            let t = 0.05 + (i % 10) as f64 * 0.2;
            let x = -1.0 + (i / 10) as f64 * 0.2;
            mu.push(t, &[x], 1.0).unwrap();
        }
        let mut ends: Vec<f64> = mu
            .atoms()
            .filter_map(|a| containment_interval(a.t, a.x, 0.0, &[0.0], 0.5))
            .flat_map(|(lo, hi)| [lo, hi])
            .collect();
        ends.sort_by(f64::total_cmp);
        ends.dedup();
        for w in ends.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b - a < 1e-9 {
                continue;
            }
            let at = |r: f64| mu.measure_of(&ParabolicBall::new(0.0, vec![0.0], r, 0.5));
            let m = at(0.5 * (a + b));
            assert_eq!(at(a + 0.01 * (b - a)), m);
            assert_eq!(at(b - 0.01 * (b - a)), m);
        }
    }
}
