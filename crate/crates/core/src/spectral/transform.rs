//! 3-D FFTs on the grid layout.
//!
//! Forward transforms are unnormalized; inverse transforms carry the
//! `1/(nx·ny·nz)` factor, so `inverse(forward(f)) == f`.
//!
//! Real fields are transformed two at a time by packing them into the real
//! and imaginary parts of one complex array (`a + i·b`), which halves the
//! number of complex FFTs for vector fields.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::field::{PhysicalField, SpectralField};
use crate::grid::GridSpec;

type Plan = Arc<dyn Fft<f64>>;

fn plan(n: usize, inverse: bool) -> Plan {
    static CACHE: OnceLock<Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Plan>)>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    let (planner, plans) = &mut *guard;
    plans
        .entry((n, inverse))
        .or_insert_with(|| {
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

fn run_lines(buf: &mut [Complex64], n: usize, inverse: bool) {
    let p = plan(n, inverse);
    // Batch several lines per task to amortize the scratch allocation.
    let lines_per_task = (16384 / n).max(1);
    buf.par_chunks_mut(n * lines_per_task).for_each(|chunk| {
        let mut scratch = vec![Complex64::new(0.0, 0.0); p.get_inplace_scratch_len()];
        p.process_with_scratch(chunk, &mut scratch);
    });
}

/// In-place unnormalized 3-D FFT (no scaling in either direction).
pub fn fft3_inplace(data: &mut [Complex64], shape: [usize; 3], inverse: bool) {
    let [nx, ny, nz] = shape;
    assert_eq!(data.len(), nx * ny * nz);
    let plane = nx * ny;

    run_lines(data, nx, inverse);

    // y lines: transpose each xy-plane, transform, transpose back.
    let py = plan(ny, inverse);
    data.par_chunks_mut(plane).for_each(|p| {
        let mut tmp = vec![Complex64::new(0.0, 0.0); plane];
        for j in 0..ny {
            for i in 0..nx {
                tmp[i * ny + j] = p[i + nx * j];
            }
        }
        let mut scratch = vec![Complex64::new(0.0, 0.0); py.get_inplace_scratch_len()];
        py.process_with_scratch(&mut tmp, &mut scratch);
        for j in 0..ny {
            for i in 0..nx {
                p[i + nx * j] = tmp[i * ny + j];
            }
        }
    });

    // z lines: gather into contiguous lines, transform, scatter.
    let mut tmp = vec![Complex64::new(0.0, 0.0); data.len()];
    {
        let src = &*data;
        tmp.par_chunks_mut(nz).enumerate().for_each(|(l, line)| {
            for (k, v) in line.iter_mut().enumerate() {
                *v = src[l + plane * k];
            }
        });
    }
    run_lines(&mut tmp, nz, inverse);
    data.par_chunks_mut(plane).enumerate().for_each(|(k, p)| {
        for (l, v) in p.iter_mut().enumerate() {
            *v = tmp[l * nz + k];
        }
    });
}

fn index_of_negative(grid: &GridSpec, idx: usize) -> usize {
    let (i, j, k) = grid.unravel(idx);
    grid.index(
        (grid.nx - i) % grid.nx,
        (grid.ny - j) % grid.ny,
        (grid.nz - k) % grid.nz,
    )
}

/// Forward transform of two real arrays with one complex FFT.
fn forward_pair(grid: &GridSpec, a: &[f64], b: Option<&[f64]>) -> (Vec<Complex64>, Option<Vec<Complex64>>) {
    let mut z: Vec<Complex64> = match b {
        Some(b) => a.par_iter().zip(b.par_iter()).map(|(&x, &y)| Complex64::new(x, y)).collect(),
        None => a.par_iter().map(|&x| Complex64::new(x, 0.0)).collect(),
    };
    fft3_inplace(&mut z, grid.shape(), false);
    if b.is_none() {
        return (z, None);
    }
    let (fa, fb): (Vec<Complex64>, Vec<Complex64>) = (0..z.len())
        .into_par_iter()
        .map(|idx| {
            let zk = z[idx];
            let zm = z[index_of_negative(grid, idx)].conj();
            let fa = (zk + zm) * 0.5;
            // (zk − zm)/(2i)
            let d = (zk - zm) * 0.5;
            (fa, Complex64::new(d.im, -d.re))
        })
        .unzip();
    (fa, Some(fb))
}

/// Inverse transform of two Hermitian spectra with one complex FFT.
fn inverse_pair(grid: &GridSpec, a: &[Complex64], b: Option<&[Complex64]>) -> (Vec<f64>, Option<Vec<f64>>) {
    let mut z: Vec<Complex64> = match b {
        Some(b) => a
            .par_iter()
            .zip(b.par_iter())
            .map(|(&x, &y)| x + Complex64::new(-y.im, y.re))
            .collect(),
        None => a.to_vec(),
    };
    fft3_inplace(&mut z, grid.shape(), true);
    let s = 1.0 / grid.len() as f64;
    let re = z.par_iter().map(|v| v.re * s).collect();
    let im = b.map(|_| z.par_iter().map(|v| v.im * s).collect());
    (re, im)
}

pub fn forward(f: &PhysicalField) -> SpectralField {
    let g = *f.grid();
    let comps = f.components();
    let mut out = Vec::with_capacity(comps.len());
    let mut c = 0;
    while c < comps.len() {
        if c + 1 < comps.len() {
            let (a, b) = forward_pair(&g, &comps[c], Some(&comps[c + 1]));
            out.push(a);
            out.push(b.unwrap());
            c += 2;
        } else {
            out.push(forward_pair(&g, &comps[c], None).0);
            c += 1;
        }
    }
    SpectralField::from_components(&g, out).expect("shape preserved")
}

/// Inverse transform, keeping the real part. The input is assumed to be the
/// spectrum of a real field (Hermitian); every operator in this crate
/// preserves that property.
pub fn inverse(f: &SpectralField) -> PhysicalField {
    let g = *f.grid();
    let comps = f.components();
    let mut out = Vec::with_capacity(comps.len());
    let mut c = 0;
    while c < comps.len() {
        if c + 1 < comps.len() {
            let (a, b) = inverse_pair(&g, &comps[c], Some(&comps[c + 1]));
            out.push(a);
            out.push(b.unwrap());
            c += 2;
        } else {
            out.push(inverse_pair(&g, &comps[c], None).0);
            c += 1;
        }
    }
    PhysicalField::from_components(&g, out).unwrap_or_else(|_| {
        // Non-finite spectra propagate; callers check finiteness explicitly.
        panic!("inverse transform produced non-finite samples")
    })
}

/// Fallible inverse for solver paths where blow-up must be reported.
pub fn try_inverse(f: &SpectralField) -> crate::Result<PhysicalField> {
    if f
        .components()
        .iter()
        .any(|c| c.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())))
    {
        return Err(crate::Error::NonFinite {
            what: "spectral coefficients".into(),
        });
    }
    Ok(inverse(f))
}

/// Checks that `f` lives on `grid`; used at public API boundaries.
pub fn check_grid(f_grid: &GridSpec, grid: &GridSpec) -> crate::Result<()> {
    if f_grid.shape() != grid.shape() {
        return Err(crate::Error::Shape {
            expected: format!("{:?}", grid.shape()),
            found: format!("{:?}", f_grid.shape()),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(g: &GridSpec, ncomp: usize, seed: u64) -> PhysicalField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..ncomp)
            .map(|_| (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        PhysicalField::from_components(g, data).unwrap()
    }

    #[test]
    fn constant_has_only_mean_mode() {
        let g = GridSpec::with_shape(8, 10, 12, 3.0, 0.5).unwrap();
        let f = PhysicalField::scalar_from_fn(&g, |_| 1.0);
        let s = forward(&f);
        let c = s.component(0);
        assert!((c[0].re - g.len() as f64).abs() < 1e-9);
        assert!(c[1..].iter().all(|v| v.norm() < 1e-9));
    }

    #[test]
    fn single_sine_has_two_modes() {
        let g = GridSpec::new(16, 5.0, 1.0).unwrap();
        let lx = g.lx;
        let f = PhysicalField::scalar_from_fn(&g, move |p| (2.0 * PI * (p[0] + lx / 2.0) / lx).sin());
        let s = forward(&f);
        let big: Vec<usize> = (0..g.len()).filter(|&i| s.component(0)[i].norm() > 1e-8).collect();
        assert_eq!(big, vec![g.index(1, 0, 0), g.index(15, 0, 0)]);
        // sin = (e^{ix} − e^{−ix})/(2i): coefficient at +1 is −i·N/2.
        let c = s.component(0)[g.index(1, 0, 0)];
        assert!((c - Complex64::new(0.0, -(g.len() as f64) / 2.0)).norm() < 1e-8);
    }

    #[test]
    fn paired_transforms_match_single_ones() {
        let g = GridSpec::with_shape(8, 12, 10, 2.0, 0.3).unwrap();
        let f = random_field(&g, 3, 1);
        let paired = forward(&f);
        for c in 0..3 {
            let single = forward(&f.extract(c));
            for (a, b) in paired.component(c).iter().zip(single.component(0)) {
                assert!((a - b).norm() < 1e-10);
            }
        }
        assert!(paired.hermitian_defect() < 1e-10);
    }

    #[test]
    fn roundtrip_random_fields() {
        for (shape, seed) in [([8, 8, 8], 3u64), ([16, 8, 12], 4), ([32, 32, 16], 5)] {
            let g = GridSpec::with_shape(shape[0], shape[1], shape[2], 7.0, 1.3).unwrap();
            let f = random_field(&g, 3, seed);
            let back = inverse(&forward(&f));
            assert!(back.sub(&f).max_abs() < 1e-12, "shape {shape:?}");
        }
    }
}
