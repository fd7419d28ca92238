//! Finite-difference test problems.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind {
    Poisson,
    /// `−Δ_h − ω I`.
    Helmholtz { omega: f64 },
}

/// Right-hand side choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rhs {
    /// `f = A u*` with `u*` a product of half-sine bumps (exact solution known).
    #[default]
    Manufactured,
    Ones,
    /// Uniform `[0, 1)` entries from a seeded generator.
    Random(u64),
}

impl std::str::FromStr for Rhs {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "manufactured" => Ok(Rhs::Manufactured),
            "ones" => Ok(Rhs::Ones),
            _ => match s.strip_prefix("random:") {
                Some(seed) => seed
                    .parse()
                    .map(Rhs::Random)
                    .map_err(|_| Error::InvalidArgument(format!("bad seed in rhs spec '{s}'"))),
                None => Err(Error::InvalidArgument(format!(
                    "unknown rhs '{s}' (expected manufactured, ones or random:<seed>)"
                ))),
            },
        }
    }
}

/// A 5-point operator on the interior of an `m_x × m_y` grid.
///
/// Unknowns are numbered row-major with `x` slowest: `k = i·(m_y − 2) + j`.
/// A band split in `k` therefore cuts the domain along lines `x = const`.
#[derive(Debug, Clone)]
pub struct GridProblem {
    pub m_x: usize,
    pub m_y: usize,
    pub extent_x: f64,
    pub extent_y: f64,
    pub kind: OperatorKind,
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    /// Exact solution when the right-hand side was manufactured.
    pub exact: Option<Vec<f64>>,
}

impl GridProblem {
    pub fn h_x(&self) -> f64 {
        self.extent_x / (self.m_x - 1) as f64
    }

    pub fn h_y(&self) -> f64 {
        self.extent_y / (self.m_y - 1) as f64
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Replaces the right-hand side.
    pub fn with_rhs(mut self, rhs: Rhs) -> Self {
        let n = self.dim();
        self.exact = None;
        self.rhs = match rhs {
            Rhs::Manufactured => {
                let u = self.bump();
                let f = self.matrix.mul_vec(&u);
                self.exact = Some(u);
                f
            }
            Rhs::Ones => vec![1.0; n],
            Rhs::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n).map(|_| rng.gen::<f64>()).collect()
            }
        };
        self
    }

    fn bump(&self) -> Vec<f64> {
        let (nx, ny) = (self.m_x - 2, self.m_y - 2);
        let mut u = Vec::with_capacity(nx * ny);
        for i in 1..=nx {
            let sx = (PI * i as f64 / (self.m_x - 1) as f64).sin();
            for j in 1..=ny {
                u.push(sx * (PI * j as f64 / (self.m_y - 1) as f64).sin());
            }
        }
        u
    }
}

fn five_point(m_x: usize, m_y: usize, h_x: f64, h_y: f64, shift: f64) -> Result<SparseMatrix> {
    if m_x < 3 || m_y < 3 {
        return Err(Error::InvalidArgument(format!("grid {m_x}×{m_y} has no interior points (need ≥ 3 per direction)")));
    }
    let (nx, ny) = (m_x - 2, m_y - 2);
    let (cx, cy) = (1.0 / (h_x * h_x), 1.0 / (h_y * h_y));
    let mut t = Vec::with_capacity(5 * nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let k = i * ny + j;
            if i > 0 {
                t.push((k, k - ny, -cx));
            }
            if j > 0 {
                t.push((k, k - 1, -cy));
            }
            t.push((k, k, 2.0 * cx + 2.0 * cy - shift));
            if j + 1 < ny {
                t.push((k, k + 1, -cy));
            }
            if i + 1 < nx {
                t.push((k, k + ny, -cx));
            }
        }
    }
    SparseMatrix::from_triplets(nx * ny, nx * ny, &t)
}

/// Right-hand side for an arbitrary matrix; `Manufactured` means `f = A·1`.
pub fn rhs_for_matrix(a: &SparseMatrix, rhs: Rhs) -> Vec<f64> {
    let n = a.nrows();
    match rhs {
        Rhs::Manufactured => a.mul_vec(&vec![1.0; n]),
        Rhs::Ones => vec![1.0; n],
        Rhs::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n).map(|_| rng.gen::<f64>()).collect()
        }
    }
}

/// `−Δu = f` on `[0, 1] × [0, π]` with homogeneous Dirichlet conditions.
pub fn poisson2d(m_x: usize, m_y: usize) -> Result<GridProblem> {
    let (lx, ly) = (1.0, PI);
    let matrix = five_point(m_x, m_y, lx / (m_x as f64 - 1.0), ly / (m_y as f64 - 1.0), 0.0)?;
    let p = GridProblem {
        m_x,
        m_y,
        extent_x: lx,
        extent_y: ly,
        kind: OperatorKind::Poisson,
        matrix,
        rhs: Vec::new(),
        exact: None,
    };
    Ok(p.with_rhs(Rhs::Manufactured))
}

/// Shift used by [`helmholtz2d`]: `0.98 · (4/h²)(1 − cos πh)`, i.e. 98% of the
/// smallest eigenvalue of the 2-D discrete Laplacian on the unit square.
pub fn helmholtz_omega(m: usize) -> f64 {
    let h = 1.0 / (m as f64 - 1.0);
    0.98 * (4.0 / (h * h)) * (1.0 - (PI * h).cos())
}

/// `(−Δ − ω)u = f` on `[0, 1]²`, `h = 1/(m − 1)`.
pub fn helmholtz2d(m: usize) -> Result<GridProblem> {
    let h = 1.0 / (m as f64 - 1.0);
    let omega = helmholtz_omega(m);
    let matrix = five_point(m, m, h, h, omega)?;
    let p = GridProblem {
        m_x: m,
        m_y: m,
        extent_x: 1.0,
        extent_y: 1.0,
        kind: OperatorKind::Helmholtz { omega },
        matrix,
        rhs: Vec::new(),
        exact: None,
    };
    Ok(p.with_rhs(Rhs::Manufactured))
}
