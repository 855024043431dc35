//! Reference desired patterns: Dolph-Chebyshev and Taylor n̄ tapers on a
//! uniform half-wavelength array, plus CSV import/export of sampled fields.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    evaluate_pattern, uniform_geometry, AngleGrid, ArrayGeometry, DesiredPattern, ExcitationVector,
};

/// Spacing of every generated reference array, in wavelengths.
pub const REFERENCE_SPACING: f64 = 0.5;

const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PatternSpec {
    Chebyshev { n: usize, sll_db: f64 },
    Taylor { n: usize, sll_db: f64, nbar: usize },
    File { path: PathBuf },
}

impl PatternSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PatternSpec::Chebyshev { n, sll_db } | PatternSpec::Taylor { n, sll_db, .. } => {
                if n < 2 {
                    return Err(Error::invalid(format!("pattern needs N >= 2, got {n}")));
                }
                if !(sll_db > 0.0) || !sll_db.is_finite() {
                    return Err(Error::invalid(format!(
                        "sll_db must be positive, got {sll_db}"
                    )));
                }
                if let PatternSpec::Taylor { nbar, .. } = *self {
                    if nbar < 1 {
                        return Err(Error::invalid("taylor nbar must be >= 1"));
                    }
                }
                Ok(())
            }
            PatternSpec::File { .. } => Ok(()),
        }
    }
}

/// Dolph-Chebyshev weights with sidelobes at `−sll_db`, max-normalized.
///
/// Samples the Chebyshev array polynomial `T_{N−1}(x₀ cos(πk/N))` around the
/// unit circle and inverts it with a DFT.
pub fn chebyshev_excitations(n: usize, sll_db: f64) -> Result<ExcitationVector> {
    PatternSpec::Chebyshev { n, sll_db }.validate()?;
    let order = (n - 1) as f64;
    let ratio = 10f64.powf(sll_db / 20.0);
    let x0 = (ratio.acosh() / order).cosh();
    let p: Vec<f64> = (0..n)
        .map(|k| {
            let x = x0 * (PI * k as f64 / n as f64).cos();
            if x > 1.0 {
                (order * x.acosh()).cosh()
            } else if x < -1.0 {
                let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
                sign * (order * (-x).acosh()).cosh()
            } else {
                (order * x.acos()).cos()
            }
        })
        .collect();

    let spectrum: Vec<f64> = if n % 2 == 1 {
        dft_real_part(
            &p.iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect::<Vec<_>>(),
        )
    } else {
        let shifted: Vec<Complex64> = p
            .iter()
            .enumerate()
            .map(|(k, &v)| v * Complex64::cis(PI * k as f64 / n as f64))
            .collect();
        dft_real_part(&shifted)
    };

    let w: Vec<f64> = if n % 2 == 1 {
        let half = (n + 1) / 2;
        spectrum[1..half]
            .iter()
            .rev()
            .chain(&spectrum[..half])
            .copied()
            .collect()
    } else {
        let half = n / 2 + 1;
        spectrum[1..half]
            .iter()
            .rev()
            .chain(&spectrum[1..half])
            .copied()
            .collect()
    };
    finish_taper(w, "chebyshev")
}

fn dft_real_part(x: &[Complex64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(j, &v)| v * Complex64::cis(-2.0 * PI * ((j * k) % n) as f64 / n as f64))
                .sum::<Complex64>()
                .re
        })
        .collect()
}

/// Taylor n̄ line-source taper sampled at the element centres, max-normalized.
///
/// Fails when the taper is not monotone from centre to edge, which happens
/// when `nbar` is too large for the requested sidelobe level.
pub fn taylor_excitations(n: usize, sll_db: f64, nbar: usize) -> Result<ExcitationVector> {
    PatternSpec::Taylor { n, sll_db, nbar }.validate()?;
    let ratio = 10f64.powf(sll_db / 20.0);
    let a = ratio.acosh() / PI;
    let a2 = a * a;
    let sigma2 = (nbar * nbar) as f64 / (a2 + (nbar as f64 - 0.5).powi(2));

    // Pattern samples at the first nbar−1 integer points of the line source.
    let coeffs: Vec<f64> = (1..nbar)
        .map(|m| {
            let m2 = (m * m) as f64;
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            let numer: f64 = (1..nbar)
                .map(|k| 1.0 - m2 / sigma2 / (a2 + (k as f64 - 0.5).powi(2)))
                .product();
            let denom: f64 = (1..nbar)
                .filter(|&k| k != m)
                .map(|k| 1.0 - m2 / (k * k) as f64)
                .product();
            sign * numer / (2.0 * denom)
        })
        .collect();

    let nf = n as f64;
    let w: Vec<f64> = (0..n)
        .map(|i| {
            let x = (i as f64 - nf / 2.0 + 0.5) / nf;
            1.0 + 2.0
                * coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, &fm)| fm * (2.0 * PI * (k + 1) as f64 * x).cos())
                    .sum::<f64>()
        })
        .collect();

    let half = &w[n / 2..];
    if half
        .windows(2)
        .any(|p| p[1] > p[0] * (1.0 + MONOTONE_SLACK))
    {
        return Err(Error::Generation(format!(
            "taylor taper with nbar={nbar} is not monotone at {sll_db} dB; lower nbar"
        )));
    }
    finish_taper(w, "taylor")
}

fn finish_taper(w: Vec<f64>, family: &str) -> Result<ExcitationVector> {
    let max = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) || w.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Generation(format!(
            "{family} weights are not all positive"
        )));
    }
    Ok(ExcitationVector::from_real(
        &w.iter().map(|v| v / max).collect::<Vec<_>>(),
    ))
}

/// Sampled field read from or written to CSV (`theta_deg,re,im`).
#[derive(Debug, Clone, PartialEq)]
pub struct PatternSamples {
    pub theta_deg: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Set when the file carried `mag_db` only; phase was taken as zero.
    pub magnitude_only: bool,
}

impl PatternSamples {
    pub fn from_grid(grid: &AngleGrid, values: Vec<Complex64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::invalid("sample count does not match grid"));
        }
        Ok(Self {
            theta_deg: grid.degrees().to_vec(),
            values,
            magnitude_only: false,
        })
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers: Vec<String> = rdr
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(str::to_owned)
            .collect();
        let magnitude_only = match headers.as_slice() {
            [t, r, i] if t == "theta_deg" && r == "re" && i == "im" => false,
            [t, m] if t == "theta_deg" && m == "mag_db" => true,
            _ => {
                return Err(Error::PatternFile(format!(
                    "unrecognized header {headers:?}; expected theta_deg,re,im or theta_deg,mag_db"
                )))
            }
        };
        let mut theta_deg = Vec::new();
        let mut values = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let num = |k: usize| -> Result<f64> {
                let s = rec.get(k).ok_or_else(|| {
                    Error::PatternFile(format!("row {}: missing column {k}", line + 2))
                })?;
                s.parse::<f64>()
                    .map_err(|e| Error::PatternFile(format!("row {}: {s:?}: {e}", line + 2)))
            };
            theta_deg.push(num(0)?);
            values.push(if magnitude_only {
                Complex64::new(10f64.powf(num(1)? / 20.0), 0.0)
            } else {
                Complex64::new(num(1)?, num(2)?)
            });
        }
        if theta_deg.len() < 2 {
            return Err(Error::PatternFile(
                "pattern file needs at least 2 rows".into(),
            ));
        }
        if theta_deg.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::PatternFile(
                "theta_deg must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            theta_deg,
            values,
            magnitude_only,
        })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        wtr.write_record(["theta_deg", "re", "im"])
            .map_err(csv_err)?;
        for (t, v) in self.theta_deg.iter().zip(&self.values) {
            wtr.write_record([t.to_string(), v.re.to_string(), v.im.to_string()])
                .map_err(csv_err)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    /// Linear interpolation of re/im at `deg`. Files covering only
    /// non-negative angles are extended evenly, `F̄(−θ) = F̄(θ)`.
    pub fn interpolate(&self, deg: f64) -> Result<Complex64> {
        let first = self.theta_deg[0];
        let last = *self.theta_deg.last().unwrap();
        let deg = if deg < 0.0 && first >= 0.0 { -deg } else { deg };
        let slack = 1e-9;
        if deg < first - slack || deg > last + slack {
            return Err(Error::PatternFile(format!(
                "angle {deg}° outside file range [{first}, {last}]"
            )));
        }
        let deg = deg.clamp(first, last);
        let hi = self.theta_deg.partition_point(|&t| t < deg).max(1);
        let lo = hi - 1;
        let (t0, t1) = (self.theta_deg[lo], self.theta_deg[hi]);
        let f = (deg - t0) / (t1 - t0);
        Ok(self.values[lo] * (1.0 - f) + self.values[hi] * f)
    }

    pub fn resample(&self, grid: &AngleGrid) -> Result<Vec<Complex64>> {
        grid.degrees()
            .iter()
            .map(|&d| self.interpolate(d))
            .collect()
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::PatternFile(e.to_string())
}

/// A desired field that can be sampled on any grid.
#[derive(Debug, Clone)]
pub enum PatternSource {
    /// Generated by a concrete array.
    Array {
        geometry: ArrayGeometry,
        weights: ExcitationVector,
    },
    /// Imported samples, resampled by interpolation.
    Sampled(PatternSamples),
}

impl PatternSource {
    pub fn from_spec(spec: &PatternSpec) -> Result<Self> {
        spec.validate()?;
        Ok(match *spec {
            PatternSpec::Chebyshev { n, sll_db } => PatternSource::Array {
                geometry: uniform_geometry(n, REFERENCE_SPACING)?,
                weights: chebyshev_excitations(n, sll_db)?,
            },
            PatternSpec::Taylor { n, sll_db, nbar } => PatternSource::Array {
                geometry: uniform_geometry(n, REFERENCE_SPACING)?,
                weights: taylor_excitations(n, sll_db, nbar)?,
            },
            PatternSpec::File { ref path } => PatternSource::Sampled(PatternSamples::load(path)?),
        })
    }

    pub fn sample(&self, grid: &AngleGrid) -> Result<DesiredPattern> {
        let values = match self {
            PatternSource::Array { geometry, weights } => {
                evaluate_pattern(geometry, weights, grid)?
            }
            PatternSource::Sampled(s) => s.resample(grid)?,
        };
        DesiredPattern::new(grid.clone(), values)
    }
}

/// Builds the reference array for `spec` and samples its field on `grid`.
pub fn make_desired(spec: &PatternSpec, grid: &AngleGrid) -> Result<DesiredPattern> {
    PatternSource::from_spec(spec)?.sample(grid)
}
