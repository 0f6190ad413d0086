//! Direction grids on S¹ and S² with the discrete operators the flow needs.
//!
//! The m = 2 grid is a uniform angle grid; the m = 3 grid is a
//! latitude–longitude tensor grid whose polar axis is the slab axis e₁, so
//! the midplane is the (uniformly resolved) equator, the grid is exactly
//! mirror symmetric across it, and the flat near-wall regions of slab
//! solutions sit at the poles. Latitude rings are staggered off the poles;
//! meridian stencils continue through the pole to the antipodal longitude.
//!
//! All second-difference stencils are trigonometrically exact on supports of
//! points and spheres (σ = r + ⟨z, c⟩), so rigid motions produce no discrete
//! curvature drift: a translating profile has a time-independent discrete
//! radii matrix, which keeps the Harnack monitor clean.
//!
//! Zonal resolution exceeds meridional resolution near the poles; to keep an
//! explicit stepper's limit isotropic, states are filtered ring-by-ring to
//! zonal wavenumbers m ≤ sin θ / Δθ (the standard polar filter). Wavenumbers
//! 0 and 1 — the rigid modes — are never touched.

use crate::vec3::{dot, normalize, Vec3};
use rustfft::{num_complex::Complex, Fft, FftPlanner};
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Clone)]
struct RingFilter {
    /// highest zonal wavenumber kept on each latitude ring
    m_max: Vec<usize>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for RingFilter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RingFilter")
            .field("m_max", &self.m_max)
            .finish()
    }
}

#[derive(Debug)]
pub struct GridSpec {
    ambient: usize,
    directions: Vec<Vec3>,
    weights: Vec<f64>,
    // S² tensor-grid data (unused for m = 2)
    n_lat: usize,
    n_lon: usize,
    thetas: Vec<f64>,
    lon_offset: f64,
    filter: Option<RingFilter>,
    min_spacing: f64,
    max_spacing: f64,
    mean_spacing: f64,
    /// Gershgorin row-sum bound of the radii-extraction operator (on the
    /// zonally filtered space): the explicit step limit is
    /// `dt ≤ 2·λ_min² / stability_sum`.
    stability_sum: f64,
    hash: String,
}

impl GridSpec {
    /// Uniform angle grid on S¹ with nodes at 2πi/n; node 0 is the slab pole
    /// +e₁ and, for even n, node n/2 is −e₁.
    pub fn circle(n: usize) -> Arc<GridSpec> {
        assert!(n >= 8, "circle grid needs at least 8 nodes");
        let h = 2.0 * PI / n as f64;
        let directions: Vec<Vec3> = (0..n)
            .map(|i| {
                let phi = h * i as f64;
                [phi.cos(), phi.sin(), 0.0]
            })
            .collect();
        let weights = vec![h; n];
        let stability_sum = (2.0 + 2.0 * h.cos()) / (2.0 - 2.0 * h.cos());
        let hash = hash_grid(2, n as u64, 0, 0.0, &directions);
        Arc::new(GridSpec {
            ambient: 2,
            directions,
            weights,
            n_lat: 0,
            n_lon: 0,
            thetas: Vec::new(),
            lon_offset: 0.0,
            filter: None,
            min_spacing: h,
            max_spacing: h,
            mean_spacing: h,
            stability_sum,
            hash,
        })
    }

    /// Latitude–longitude grid with `n_lat` rings at colatitudes
    /// (i + 1/2)·π/n_lat from +e₁ and `n_lon` longitudes (even counts).
    /// `lon_offset` rotates the longitudes so a chosen midplane direction
    /// lands on a node.
    pub fn latlon(n_lat: usize, n_lon: usize, lon_offset: f64) -> Arc<GridSpec> {
        assert!(n_lat >= 8 && n_lon >= 8, "grid too small");
        assert!(n_lon % 2 == 0, "meridian continuation needs even n_lon");
        let d_theta = PI / n_lat as f64;
        let d_phi = 2.0 * PI / n_lon as f64;
        let thetas: Vec<f64> = (0..n_lat).map(|i| (i as f64 + 0.5) * d_theta).collect();

        let mut directions = Vec::with_capacity(n_lat * n_lon);
        let mut weights = Vec::with_capacity(n_lat * n_lon);
        for &theta in &thetas {
            let band = d_phi * ((theta - 0.5 * d_theta).cos() - (theta + 0.5 * d_theta).cos());
            for j in 0..n_lon {
                let phi = lon_offset + j as f64 * d_phi;
                directions.push([
                    theta.cos(),
                    theta.sin() * phi.cos(),
                    theta.sin() * phi.sin(),
                ]);
                weights.push(band);
            }
        }

        // zonal cutoff m ≤ sinθ/Δθ, never below the rigid modes
        let m_max: Vec<usize> = thetas
            .iter()
            .map(|t| {
                let cap = (t.sin() / d_theta).floor() as usize;
                cap.clamp(1, n_lon / 2)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let filter = RingFilter {
            m_max,
            fft: planner.plan_fft_forward(n_lon),
            ifft: planner.plan_fft_inverse(n_lon),
        };

        // spacing statistics (meridional spacing, plus the effective zonal
        // spacing after filtering, which is comparable by construction)
        let min_zonal = thetas
            .iter()
            .map(|t| t.sin() * d_phi)
            .fold(f64::INFINITY, f64::min);
        let min_spacing = d_theta.min(min_zonal);
        let max_spacing = d_theta.max(d_phi);
        let mean_spacing = 0.5 * (d_theta + d_phi);

        // Gershgorin bound over the three stencil families; the zonal term
        // is evaluated at its post-filter effective wavenumber
        let mut stability = 0.0f64;
        for (i, &theta) in thetas.iter().enumerate() {
            let w11 = (2.0 + 2.0 * d_theta.cos()) / (2.0 - 2.0 * d_theta.cos());
            let m_eff = filter.m_max[i] as f64;
            // a zonal mode m ≤ m_max contributes at most
            // (2 − 2cos(mΔφ))/((2 − 2cosΔφ) sin²θ) through the zonal stencil
            let zonal_gain = (2.0 - 2.0 * (m_eff * d_phi).cos()).min(4.0)
                / ((2.0 - 2.0 * d_phi.cos()) * theta.sin() * theta.sin());
            let w22 = zonal_gain * (2.0 + 2.0 * d_phi.cos()) / 2.0
                + (1.0 / theta.tan()).abs() / d_theta.sin()
                + 1.0;
            let w12 = (1.0 / (d_theta.sin() * d_phi.sin())
                + (1.0 / theta.tan()).abs() / d_phi.sin())
                / theta.sin();
            stability = stability.max(w11 + 2.0 * w12 + w22);
        }

        let hash = hash_grid(3, n_lat as u64, n_lon as u64, lon_offset, &directions);
        Arc::new(GridSpec {
            ambient: 3,
            directions,
            weights,
            n_lat,
            n_lon,
            thetas,
            lon_offset,
            filter: Some(filter),
            min_spacing,
            max_spacing,
            mean_spacing,
            stability_sum: stability,
            hash,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn node_count(&self) -> usize {
        self.directions.len()
    }

    pub fn directions(&self) -> &[Vec3] {
        &self.directions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_lat(&self) -> usize {
        self.n_lat
    }

    pub fn n_lon(&self) -> usize {
        self.n_lon
    }

    pub fn lon_offset(&self) -> f64 {
        self.lon_offset
    }

    pub fn colatitude(&self, ring: usize) -> f64 {
        self.thetas[ring]
    }

    pub fn node_index(&self, ring: usize, lon: usize) -> usize {
        ring * self.n_lon + lon
    }

    pub fn min_spacing(&self) -> f64 {
        self.min_spacing
    }

    pub fn max_spacing(&self) -> f64 {
        self.max_spacing
    }

    pub fn mean_spacing(&self) -> f64 {
        self.mean_spacing
    }

    /// Meridional spacing Δθ (the resolution scale after polar filtering).
    pub fn d_theta(&self) -> f64 {
        if self.ambient == 2 {
            self.min_spacing
        } else {
            PI / self.n_lat as f64
        }
    }

    pub fn stability_sum(&self) -> f64 {
        self.stability_sum
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    /// Orthonormal tangent frame at a node: (e_θ, e_φ) for m = 3, the
    /// rotated tangent for m = 2.
    pub fn tangent_frame(&self, node: usize) -> [Vec3; 2] {
        let z = self.directions[node];
        if self.ambient == 2 {
            [[-z[1], z[0], 0.0], [0.0, 0.0, 1.0]]
        } else {
            let ring = node / self.n_lon;
            let j = node % self.n_lon;
            let theta = self.thetas[ring];
            let phi = self.lon_offset + j as f64 * (2.0 * PI / self.n_lon as f64);
            let e_theta = [
                -theta.sin(),
                theta.cos() * phi.cos(),
                theta.cos() * phi.sin(),
            ];
            let e_phi = [0.0, -phi.sin(), phi.cos()];
            [e_theta, e_phi]
        }
    }

    /// Project a state onto the zonally resolvable space: on each latitude
    /// ring keep wavenumbers m ≤ m_max(θ). No-op for m = 2.
    pub fn zonal_filter(&self, sigma: &mut [f64]) {
        let Some(filter) = &self.filter else {
            return;
        };
        let m = self.n_lon;
        let mut buf: Vec<Complex<f64>> = vec![Complex::default(); m];
        for ring in 0..self.n_lat {
            let cut = filter.m_max[ring];
            if cut >= m / 2 {
                continue;
            }
            let row = &mut sigma[ring * m..(ring + 1) * m];
            for (b, s) in buf.iter_mut().zip(row.iter()) {
                *b = Complex::new(*s, 0.0);
            }
            filter.fft.process(&mut buf);
            for (k, b) in buf.iter_mut().enumerate() {
                let wavenumber = k.min(m - k);
                if wavenumber > cut {
                    *b = Complex::default();
                }
            }
            filter.ifft.process(&mut buf);
            let inv = 1.0 / m as f64;
            for (s, b) in row.iter_mut().zip(buf.iter()) {
                *s = b.re * inv;
            }
        }
    }

    pub fn nearest_node(&self, dir: Vec3) -> usize {
        let dir = normalize(dir);
        let mut best = (0usize, f64::NEG_INFINITY);
        for (i, z) in self.directions.iter().enumerate() {
            let d = dot(*z, dir);
            if d > best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    /// Interpolate per-node values at an arbitrary direction: angular-linear
    /// on S¹, bilinear in (θ, φ) on S² with meridian continuation across the
    /// poles.
    pub fn interpolate(&self, values: &[f64], dir: Vec3) -> f64 {
        assert_eq!(values.len(), self.node_count());
        let dir = normalize(dir);
        if self.ambient == 2 {
            let n = self.node_count();
            let h = 2.0 * PI / n as f64;
            let phi = dir[1].atan2(dir[0]).rem_euclid(2.0 * PI);
            let i = (phi / h).floor() as usize % n;
            let frac = (phi - i as f64 * h) / h;
            return values[i] * (1.0 - frac) + values[(i + 1) % n] * frac;
        }
        let theta = dir[0].clamp(-1.0, 1.0).acos();
        let phi = (dir[2].atan2(dir[1]) - self.lon_offset).rem_euclid(2.0 * PI);
        let d_theta = PI / self.n_lat as f64;
        let d_phi = 2.0 * PI / self.n_lon as f64;
        let tpos = theta / d_theta - 0.5;
        let ppos = phi / d_phi;
        let j0 = ppos.floor() as isize;
        let fp = ppos - j0 as f64;
        let i0 = tpos.floor() as isize;
        let ft = tpos - i0 as f64;
        let sample = |ring: isize, lon: isize| -> f64 {
            let m = self.n_lon as isize;
            let (ring, lon) = if ring < 0 {
                (0isize, lon + m / 2)
            } else if ring >= self.n_lat as isize {
                (self.n_lat as isize - 1, lon + m / 2)
            } else {
                (ring, lon)
            };
            values[ring as usize * self.n_lon + lon.rem_euclid(m) as usize]
        };
        let v00 = sample(i0, j0);
        let v01 = sample(i0, j0 + 1);
        let v10 = sample(i0 + 1, j0);
        let v11 = sample(i0 + 1, j0 + 1);
        (1.0 - ft) * ((1.0 - fp) * v00 + fp * v01) + ft * ((1.0 - fp) * v10 + fp * v11)
    }
}

fn hash_grid(ambient: u64, p1: u64, p2: u64, offset: f64, directions: &[Vec3]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(ambient.to_le_bytes());
    hasher.update(p1.to_le_bytes());
    hasher.update(p2.to_le_bytes());
    hasher.update(offset.to_bits().to_le_bytes());
    for d in directions {
        for c in d {
            hasher.update(c.to_bits().to_le_bytes());
        }
    }
    let digest = hasher.finalize();
    digest.iter().take(16).map(|b| format!("{b:02x}")).collect()
}
