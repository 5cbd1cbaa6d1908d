//! Uniformly sampled vector functions `t0 + k step ↦ values[k]`.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexVector;

/// Values are stored flat, `dim` entries per sample.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    t0: f64,
    step: f64,
    dim: usize,
    data: Vec<Complex64>,
    sup_bound: f64,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl SampledFunction {
    pub fn new(t0: f64, step: f64, dim: usize, data: Vec<Complex64>, sup_bound: f64) -> Result<Self> {
        if !t0.is_finite() || !(step > 0.0) || !step.is_finite() {
            return Err(Error::Invalid(format!("bad grid t0 = {t0}, step = {step}")));
        }
        if dim == 0 || data.is_empty() || data.len() % dim != 0 {
            return Err(Error::Invalid(format!("{} values do not form nonempty {dim}-vectors", data.len())));
        }
        if data.iter().any(|z| !z.is_finite()) {
            return Err(Error::Invalid("non-finite sample".into()));
        }
        let max = data.chunks(dim).map(norm).fold(0.0, f64::max);
        if !(sup_bound >= max) || !sup_bound.is_finite() {
            return Err(Error::Invalid(format!("declared sup bound {sup_bound} is below max sample norm {max}")));
        }
        Ok(SampledFunction { t0, step, dim, data, sup_bound })
    }

    /// Samples with the declared sup bound set to the max sample norm.
    pub fn from_data(t0: f64, step: f64, dim: usize, data: Vec<Complex64>) -> Result<Self> {
        let max = if dim == 0 { 0.0 } else { data.chunks(dim).map(norm).fold(0.0, f64::max) };
        SampledFunction::new(t0, step, dim, data, max)
    }

    pub fn from_fn(t0: f64, step: f64, n: usize, dim: usize, mut f: impl FnMut(f64) -> Vec<Complex64>) -> Result<Self> {
        let mut data = Vec::with_capacity(n * dim);
        for k in 0..n {
            let v = f(t0 + k as f64 * step);
            if v.len() != dim {
                return Err(Error::DimensionMismatch(format!("sample of length {} for dimension {dim}", v.len())));
            }
            data.extend(v);
        }
        SampledFunction::from_data(t0, step, dim, data)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.step
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len() - 1)
    }

    pub fn span(&self) -> f64 {
        self.t_end() - self.t0
    }

    pub fn value(&self, k: usize) -> &[Complex64] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    pub fn vector(&self, k: usize) -> ComplexVector {
        ComplexVector::new(self.value(k).to_vec())
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    /// Largest sample norm.
    pub fn sup_norm(&self) -> f64 {
        self.data.chunks(self.dim).map(norm).fold(0.0, f64::max)
    }

    pub fn norms(&self) -> Vec<f64> {
        self.data.chunks(self.dim).map(norm).collect()
    }

    /// Index of the grid point nearest to `t`, if it lies within `tol * step`.
    pub fn index_of(&self, t: f64, tol: f64) -> Option<usize> {
        let x = (t - self.t0) / self.step;
        let k = x.round();
        if (x - k).abs() > tol || k < 0.0 || k as usize >= self.len() {
            return None;
        }
        Some(k as usize)
    }

    /// Cubic Lagrange interpolation on the four nearest samples.
    pub fn interpolate(&self, t: f64) -> Option<Vec<Complex64>> {
        let n = self.len();
        let x = (t - self.t0) / self.step;
        let slack = 1e-9;
        if x < -slack || x > (n - 1) as f64 + slack {
            return None;
        }
        if n < 4 {
            let k = (x.round().max(0.0) as usize).min(n - 1);
            return Some(self.value(k).to_vec());
        }
        let base = (x.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let w = lagrange4(x - base as f64);
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (q, wq) in w.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(self.value(base + q)) {
                *o += v * wq;
            }
        }
        Some(out)
    }

    /// `t ↦ f(t + a)` on the shifted grid (same samples, `t0 - a`).
    pub fn translate(&self, a: f64) -> Self {
        SampledFunction { t0: self.t0 - a, ..self.clone() }
    }

    /// Samples with `t_lo ≤ t ≤ t_hi` (up to a fraction of a step).
    pub fn restrict(&self, t_lo: f64, t_hi: f64) -> Result<Self> {
        let first = ((t_lo - self.t0) / self.step - 1e-9).ceil().max(0.0) as usize;
        let last = (((t_hi - self.t0) / self.step + 1e-9).floor()).min((self.len() - 1) as f64);
        if last < first as f64 {
            return Err(Error::InsufficientSpan(format!("no samples in [{t_lo}, {t_hi}]")));
        }
        let last = last as usize;
        let data = self.data[first * self.dim..(last + 1) * self.dim].to_vec();
        SampledFunction::new(self.time(first), self.step, self.dim, data, self.sup_bound)
    }

    pub fn map(&self, mut f: impl FnMut(f64, &[Complex64]) -> Vec<Complex64>) -> Result<Self> {
        let dim = self.dim;
        SampledFunction::from_fn(self.t0, self.step, self.len(), dim, |t| {
            let k = ((t - self.t0) / self.step).round() as usize;
            f(t, self.value(k))
        })
    }

    /// Writes the header `t0,step,dim,sup_bound`, then one row of interleaved
    /// `re,im` per sample.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().flexible(true).has_headers(false).from_writer(w);
        out.write_record([fmt(self.t0), fmt(self.step), self.dim.to_string(), fmt(self.sup_bound)])?;
        let mut row = Vec::with_capacity(2 * self.dim);
        for k in 0..self.len() {
            row.clear();
            for z in self.value(k) {
                row.push(fmt(z.re));
                row.push(fmt(z.im));
            }
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().flexible(true).has_headers(false).trim(csv::Trim::All).from_reader(r);
        let mut records = rdr.records();
        let head = records.next().ok_or_else(|| Error::Invalid("empty CSV".into()))??;
        if head.len() < 3 {
            return Err(Error::Invalid("CSV header must be t0,step,dim[,sup_bound]".into()));
        }
        let t0 = parse(&head[0])?;
        let step = parse(&head[1])?;
        let dim: usize = head[2].parse().map_err(|_| Error::Invalid(format!("bad dim {:?}", &head[2])))?;
        let declared = if head.len() > 3 { Some(parse(&head[3])?) } else { None };
        let mut data = Vec::new();
        for rec in records {
            let rec = rec?;
            if rec.len() != 2 * dim {
                return Err(Error::Invalid(format!("row of {} fields for dimension {dim}", rec.len())));
            }
            for pair in 0..dim {
                data.push(Complex64::new(parse(&rec[2 * pair])?, parse(&rec[2 * pair + 1])?));
            }
        }
        match declared {
            Some(s) => SampledFunction::new(t0, step, dim, data, s),
            None => SampledFunction::from_data(t0, step, dim, data),
        }
    }
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

fn parse(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Invalid(format!("bad number {s:?}")))
}

/// Lagrange weights on nodes 0, 1, 2, 3 at `x`.
pub(crate) fn lagrange4(x: f64) -> [f64; 4] {
    let (a, b, c, d) = (x, x - 1.0, x - 2.0, x - 3.0);
    [-b * c * d / 6.0, a * c * d / 2.0, -a * b * d / 2.0, a * b * c / 6.0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_sup_bound() {
        let err = SampledFunction::new(0.0, 1.0, 1, vec![Complex64::new(2.0, 0.0)], 1.0).unwrap_err();
        assert_eq!(err.kind(), "InvalidInput");
    }

    #[test]
    fn cubic_interpolation_is_exact_on_cubics() {
        let f = SampledFunction::from_fn(-1.0, 0.1, 30, 1, |t| vec![Complex64::new(t * t * t - t, 2.0 * t)]).unwrap();
        for &t in &[-1.0, -0.93, 0.0, 0.555, 1.9] {
            let v = f.interpolate(t).unwrap()[0];
            assert!((v - Complex64::new(t * t * t - t, 2.0 * t)).norm() < 1e-12, "t = {t}");
        }
        assert!(f.interpolate(1.95).is_none());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let f = SampledFunction::from_fn(0.1, 0.01, 7, 2, |t| vec![Complex64::new(t.sin(), t.cos()), Complex64::new(1.0 / 3.0, -t)]).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let back = SampledFunction::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn restrict_and_index() {
        let f = SampledFunction::from_fn(-1.0, 0.25, 9, 1, |t| vec![Complex64::new(t, 0.0)]).unwrap();
        let g = f.restrict(-0.3, 0.5).unwrap();
        assert_eq!(g.t0(), -0.25);
        assert_eq!(g.len(), 4);
        assert_eq!(f.index_of(0.0, 1e-9), Some(4));
        assert_eq!(f.index_of(0.1, 1e-3), None);
    }
}
