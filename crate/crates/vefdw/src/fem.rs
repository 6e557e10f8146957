//! Spatial discretization: uniform P1/bilinear finite elements with
//! homogeneous Dirichlet boundaries on intervals and tensor-product
//! rectangles.
//!
//! Only interior degrees of freedom are kept. The 1D mass and stiffness
//! matrices are the classical stencils `(h/6)[1, 4, 1]` and `(1/h)[-1, 2, -1]`;
//! the 2D matrices are their Kronecker combinations `M = Mx ⊗ My`,
//! `S = Sx ⊗ My + Mx ⊗ Sy`, which is what bilinear elements produce on a
//! uniform tensor grid. Matrix-vector products use the tridiagonal factors
//! directly; linear systems go through the banded Cholesky in [`crate::linalg`].

use crate::error::{Error, Result};
use crate::linalg::{BandCholesky, BandMatrix, SymTridiag};
use crate::quadrature::{gauss_legendre, GaussJacobiRule};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeshDomain {
    Interval { a: f64, b: f64 },
    Rectangle { a: f64, b: f64, c: f64, d: f64 },
}

/// Uniform mesh with `j` subdivisions per axis.
#[derive(Debug, Clone, Copy)]
pub struct Mesh {
    pub domain: MeshDomain,
    pub j: usize,
}

impl Mesh {
    pub fn new(domain: MeshDomain, j: usize) -> Result<Self> {
        let ok = match domain {
            MeshDomain::Interval { a, b } => b > a,
            MeshDomain::Rectangle { a, b, c, d } => b > a && d > c,
        };
        if !ok {
            return Err(Error::InvalidStudy("mesh domain is empty".into()));
        }
        if j < 2 {
            return Err(Error::InvalidStudy(format!(
                "mesh needs at least 2 subdivisions per axis, got {j}"
            )));
        }
        Ok(Self { domain, j })
    }

    pub fn interval(a: f64, b: f64, j: usize) -> Result<Self> {
        Self::new(MeshDomain::Interval { a, b }, j)
    }

    pub fn square(a: f64, b: f64, c: f64, d: f64, j: usize) -> Result<Self> {
        Self::new(MeshDomain::Rectangle { a, b, c, d }, j)
    }

    pub fn dim(&self) -> usize {
        match self.domain {
            MeshDomain::Interval { .. } => 1,
            MeshDomain::Rectangle { .. } => 2,
        }
    }

    /// Mesh widths per axis; the second entry is meaningful only in 2D.
    pub fn h(&self) -> [f64; 2] {
        match self.domain {
            MeshDomain::Interval { a, b } => [(b - a) / self.j as f64, 0.0],
            MeshDomain::Rectangle { a, b, c, d } => {
                [(b - a) / self.j as f64, (d - c) / self.j as f64]
            }
        }
    }

    /// Interior nodes per axis.
    pub fn m(&self) -> usize {
        self.j - 1
    }

    pub fn interior_count(&self) -> usize {
        match self.dim() {
            1 => self.m(),
            _ => self.m() * self.m(),
        }
    }

    /// Coordinates of an interior dof (0-based per axis).
    pub fn interior_coord(&self, ix: usize, iy: usize) -> [f64; 2] {
        let h = self.h();
        match self.domain {
            MeshDomain::Interval { a, .. } => [a + (ix as f64 + 1.0) * h[0], 0.0],
            MeshDomain::Rectangle { a, c, .. } => {
                [a + (ix as f64 + 1.0) * h[0], c + (iy as f64 + 1.0) * h[1]]
            }
        }
    }
}

/// Nodal coefficient vector over the interior dofs of a [`FemSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField(pub Vec<f64>);

impl NodalField {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// self += c * other
    pub fn add_scaled(&mut self, c: f64, other: &NodalField) {
        assert_eq!(self.len(), other.len());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += c * b;
        }
    }
}

fn tridiag_mass(m: usize, h: f64) -> SymTridiag {
    SymTridiag {
        diag: vec![4.0 * h / 6.0; m],
        off: vec![h / 6.0; m.saturating_sub(1)],
    }
}

fn tridiag_stiffness(m: usize, h: f64) -> SymTridiag {
    SymTridiag {
        diag: vec![2.0 / h; m],
        off: vec![-1.0 / h; m.saturating_sub(1)],
    }
}

/// Assembled finite element space: mesh plus mass/stiffness operators.
#[derive(Debug, Clone)]
pub struct FemSpace {
    pub mesh: Mesh,
    mx: SymTridiag,
    sx: SymTridiag,
    my: Option<SymTridiag>,
    sy: Option<SymTridiag>,
    gl4: GaussJacobiRule,
}

impl FemSpace {
    pub fn assemble(mesh: Mesh) -> Self {
        let m = mesh.m();
        let h = mesh.h();
        let (my, sy) = if mesh.dim() == 2 {
            (Some(tridiag_mass(m, h[1])), Some(tridiag_stiffness(m, h[1])))
        } else {
            (None, None)
        };
        Self {
            mesh,
            mx: tridiag_mass(m, h[0]),
            sx: tridiag_stiffness(m, h[0]),
            my,
            sy,
            gl4: gauss_legendre(4).expect("4-point Gauss rule"),
        }
    }

    pub fn dofs(&self) -> usize {
        self.mesh.interior_count()
    }

    pub fn zero_field(&self) -> NodalField {
        NodalField::zeros(self.dofs())
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dofs() {
            return Err(Error::DimensionMismatch {
                expected: self.dofs(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// out[(ix,iy)] = sum_{kx,ky} A[ix,kx] B[iy,ky] v[(kx,ky)], dofs indexed
    /// ix * m + iy.
    fn kron_apply(a: &SymTridiag, b: &SymTridiag, m: usize, v: &[f64], out: &mut [f64]) {
        let mut tmp = vec![0.0; m * m];
        for ix in 0..m {
            b.matvec(&v[ix * m..(ix + 1) * m], &mut tmp[ix * m..(ix + 1) * m]);
        }
        for ix in 0..m {
            let dst = &mut out[ix * m..(ix + 1) * m];
            for (d, &t) in dst.iter_mut().zip(&tmp[ix * m..(ix + 1) * m]) {
                *d = a.diag[ix] * t;
            }
            if ix > 0 {
                let c = a.off[ix - 1];
                for (d, &t) in dst.iter_mut().zip(&tmp[(ix - 1) * m..ix * m]) {
                    *d += c * t;
                }
            }
            if ix + 1 < m {
                let c = a.off[ix];
                for (d, &t) in dst.iter_mut().zip(&tmp[(ix + 1) * m..(ix + 2) * m]) {
                    *d += c * t;
                }
            }
        }
    }

    /// out = M v
    pub fn mass_apply(&self, v: &[f64], out: &mut [f64]) {
        match (&self.my, self.mesh.dim()) {
            (None, _) => self.mx.matvec(v, out),
            (Some(my), _) => Self::kron_apply(&self.mx, my, self.mesh.m(), v, out),
        }
    }

    /// out = S v
    pub fn stiffness_apply(&self, v: &[f64], out: &mut [f64]) {
        match (&self.my, &self.sy) {
            (None, _) => self.sx.matvec(v, out),
            (Some(my), Some(sy)) => {
                let m = self.mesh.m();
                Self::kron_apply(&self.sx, my, m, v, out);
                let mut tmp = vec![0.0; v.len()];
                Self::kron_apply(&self.mx, sy, m, v, &mut tmp);
                for (o, t) in out.iter_mut().zip(&tmp) {
                    *o += t;
                }
            }
            _ => unreachable!(),
        }
    }

    /// Assembles cm * M + cs * S as a banded matrix.
    pub fn system_band(&self, cm: f64, cs: f64) -> BandMatrix {
        let m = self.mesh.m();
        let entry_1d = |t: &SymTridiag, i: usize, k: usize| -> f64 {
            match i.abs_diff(k) {
                0 => t.diag[i],
                1 => t.off[i.min(k)],
                _ => 0.0,
            }
        };
        match (&self.my, &self.sy) {
            (None, _) => {
                let mut band = BandMatrix::zeros(m, 1);
                for i in 0..m {
                    band.add(i, i, cm * self.mx.diag[i] + cs * self.sx.diag[i]);
                    if i > 0 {
                        band.add(i, i - 1, cm * self.mx.off[i - 1] + cs * self.sx.off[i - 1]);
                    }
                }
                band
            }
            (Some(my), Some(sy)) => {
                let n = m * m;
                let mut band = BandMatrix::zeros(n, m + 1);
                for ix in 0..m {
                    for iy in 0..m {
                        let row = ix * m + iy;
                        for kx in ix.saturating_sub(1)..=ix {
                            for ky in iy.saturating_sub(1)..=(iy + 1).min(m - 1) {
                                let col = kx * m + ky;
                                if col > row {
                                    continue;
                                }
                                let mxv = entry_1d(&self.mx, ix, kx);
                                let sxv = entry_1d(&self.sx, ix, kx);
                                let myv = entry_1d(my, iy, ky);
                                let syv = entry_1d(sy, iy, ky);
                                let val = cm * mxv * myv + cs * (sxv * myv + mxv * syv);
                                if val != 0.0 {
                                    band.add(row, col, val);
                                }
                            }
                        }
                    }
                }
                band
            }
            _ => unreachable!(),
        }
    }

    /// Factors cm * M + cs * S for repeated solves.
    pub fn factor(&self, cm: f64, cs: f64) -> Result<BandCholesky> {
        self.system_band(cm, cs).cholesky()
    }

    /// Load vector (f, chi_i) by 4-point Gauss-Legendre per element per axis.
    pub fn load_vector<F: Fn([f64; 2]) -> f64>(&self, f: F) -> Vec<f64> {
        let m = self.mesh.m();
        let h = self.mesh.h();
        let (zs, ws) = (self.gl4.nodes(), self.gl4.weights());
        match self.mesh.domain {
            MeshDomain::Interval { a, .. } => {
                let mut load = vec![0.0; m];
                for e in 0..self.mesh.j {
                    let x0 = a + e as f64 * h[0];
                    for (&z, &wq) in zs.iter().zip(ws) {
                        let x = x0 + z * h[0];
                        let fv = f([x, 0.0]) * wq * h[0];
                        // shapes of full nodes e (descending) and e+1 (ascending)
                        if e >= 1 {
                            load[e - 1] += fv * (1.0 - z);
                        }
                        if e + 1 <= m {
                            load[e] += fv * z;
                        }
                    }
                }
                load
            }
            MeshDomain::Rectangle { a, c, .. } => {
                let mut load = vec![0.0; m * m];
                for ex in 0..self.mesh.j {
                    let x0 = a + ex as f64 * h[0];
                    for ey in 0..self.mesh.j {
                        let y0 = c + ey as f64 * h[1];
                        for (&zx, &wx) in zs.iter().zip(ws) {
                            let shape_x = [1.0 - zx, zx];
                            for (&zy, &wy) in zs.iter().zip(ws) {
                                let shape_y = [1.0 - zy, zy];
                                let fv = f([x0 + zx * h[0], y0 + zy * h[1]])
                                    * wx
                                    * wy
                                    * h[0]
                                    * h[1];
                                for dx in 0..2usize {
                                    let nx = ex + dx;
                                    if nx < 1 || nx > m {
                                        continue;
                                    }
                                    for dy in 0..2usize {
                                        let ny = ey + dy;
                                        if ny < 1 || ny > m {
                                            continue;
                                        }
                                        load[(nx - 1) * m + (ny - 1)] +=
                                            fv * shape_x[dx] * shape_y[dy];
                                    }
                                }
                            }
                        }
                    }
                }
                load
            }
        }
    }

    /// Energy load vector (∇φ, ∇chi_i) from an analytic gradient.
    pub fn gradient_load<G: Fn([f64; 2]) -> [f64; 2]>(&self, grad: G) -> Vec<f64> {
        let m = self.mesh.m();
        let h = self.mesh.h();
        let (zs, ws) = (self.gl4.nodes(), self.gl4.weights());
        match self.mesh.domain {
            MeshDomain::Interval { a, .. } => {
                let mut load = vec![0.0; m];
                for e in 0..self.mesh.j {
                    let x0 = a + e as f64 * h[0];
                    for (&z, &wq) in zs.iter().zip(ws) {
                        let gx = grad([x0 + z * h[0], 0.0])[0] * wq * h[0];
                        if e >= 1 {
                            load[e - 1] += gx * (-1.0 / h[0]);
                        }
                        if e + 1 <= m {
                            load[e] += gx * (1.0 / h[0]);
                        }
                    }
                }
                load
            }
            MeshDomain::Rectangle { a, c, .. } => {
                let mut load = vec![0.0; m * m];
                for ex in 0..self.mesh.j {
                    let x0 = a + ex as f64 * h[0];
                    for ey in 0..self.mesh.j {
                        let y0 = c + ey as f64 * h[1];
                        for (&zx, &wx) in zs.iter().zip(ws) {
                            let shape_x = [1.0 - zx, zx];
                            let dshape_x = [-1.0 / h[0], 1.0 / h[0]];
                            for (&zy, &wy) in zs.iter().zip(ws) {
                                let shape_y = [1.0 - zy, zy];
                                let dshape_y = [-1.0 / h[1], 1.0 / h[1]];
                                let g = grad([x0 + zx * h[0], y0 + zy * h[1]]);
                                let scale = wx * wy * h[0] * h[1];
                                for dx in 0..2usize {
                                    let nx = ex + dx;
                                    if nx < 1 || nx > m {
                                        continue;
                                    }
                                    for dy in 0..2usize {
                                        let ny = ey + dy;
                                        if ny < 1 || ny > m {
                                            continue;
                                        }
                                        load[(nx - 1) * m + (ny - 1)] += scale
                                            * (g[0] * dshape_x[dx] * shape_y[dy]
                                                + g[1] * shape_x[dx] * dshape_y[dy]);
                                    }
                                }
                            }
                        }
                    }
                }
                load
            }
        }
    }

    /// Ritz projection: solves (∇(φ - Λφ), ∇chi) = 0 given ∇φ.
    pub fn ritz_project<G: Fn([f64; 2]) -> [f64; 2]>(&self, grad: G) -> Result<NodalField> {
        let load = self.gradient_load(grad);
        let x = self.factor(0.0, 1.0)?.solve(&load);
        Ok(NodalField(x))
    }

    /// Pointwise interpolation at the interior nodes.
    pub fn nodal_interpolate<F: Fn([f64; 2]) -> f64>(&self, f: F) -> NodalField {
        let m = self.mesh.m();
        match self.mesh.dim() {
            1 => NodalField((0..m).map(|i| f(self.mesh.interior_coord(i, 0))).collect()),
            _ => {
                let mut v = Vec::with_capacity(m * m);
                for ix in 0..m {
                    for iy in 0..m {
                        v.push(f(self.mesh.interior_coord(ix, iy)));
                    }
                }
                NodalField(v)
            }
        }
    }

    /// The reported error norm: (h Σ |u_j|^2)^(1/2) in 1D and
    /// (h^2 Σ |u_ij|^2)^(1/2) in 2D.
    pub fn lumped_norm(&self, v: &[f64]) -> f64 {
        let h = self.mesh.h();
        let weight = match self.mesh.dim() {
            1 => h[0],
            _ => h[0] * h[1],
        };
        (weight * v.iter().map(|x| x * x).sum::<f64>()).sqrt()
    }

    /// Mass-matrix inner product u^T M v (the Galerkin L2 product).
    pub fn mass_inner(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check_len(u)?;
        self.check_len(v)?;
        let mut mv = vec![0.0; v.len()];
        self.mass_apply(v, &mut mv);
        Ok(u.iter().zip(&mv).map(|(a, b)| a * b).sum())
    }

    pub fn l2_norm(&self, u: &[f64]) -> Result<f64> {
        Ok(self.mass_inner(u, u)?.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn single_interior_node_1d() {
        let space = FemSpace::assemble(Mesh::interval(0.0, 1.0, 2).unwrap());
        let band = space.system_band(1.0, 0.0);
        assert_relative_eq!(band.get(0, 0), 1.0 / 3.0, max_relative = 1e-15);
        let band = space.system_band(0.0, 1.0);
        assert_relative_eq!(band.get(0, 0), 4.0, max_relative = 1e-15);
    }

    #[test]
    fn stencil_rows_1d() {
        let space = FemSpace::assemble(Mesh::interval(0.0, 1.0, 8).unwrap());
        let h = 1.0 / 8.0;
        let m = space.system_band(1.0, 0.0);
        assert_relative_eq!(m.get(3, 3), 4.0 * h / 6.0, max_relative = 1e-15);
        assert_relative_eq!(m.get(3, 2), h / 6.0, max_relative = 1e-15);
        let s = space.system_band(0.0, 1.0);
        assert_relative_eq!(s.get(3, 3), 2.0 / h, max_relative = 1e-15);
        assert_relative_eq!(s.get(3, 4), -1.0 / h, max_relative = 1e-15);
    }

    #[test]
    fn linear_patch_test() {
        // S applied to the nodal values of x leaves only the boundary
        // coupling: zero in the interior rows, b/h in the last row when the
        // lift at x = b is accounted for.
        let space = FemSpace::assemble(Mesh::interval(0.0, 1.0, 4).unwrap());
        let x = space.nodal_interpolate(|p| p[0]);
        let mut out = vec![0.0; 3];
        space.stiffness_apply(x.as_slice(), &mut out);
        let h = 0.25;
        assert!(out[0].abs() < 1e-13);
        assert!(out[1].abs() < 1e-13);
        assert_relative_eq!(out[2], 1.0 / h, max_relative = 1e-13);
    }

    #[test]
    fn single_interior_node_2d() {
        let space = FemSpace::assemble(Mesh::square(0.0, 1.0, 0.0, 1.0, 2).unwrap());
        let h = 0.5;
        let m = space.system_band(1.0, 0.0);
        assert_relative_eq!(m.get(0, 0), (2.0 * h / 3.0) * (2.0 * h / 3.0), max_relative = 1e-14);
        let s = space.system_band(0.0, 1.0);
        assert_relative_eq!(s.get(0, 0), 2.0 * (2.0 / h) * (2.0 * h / 3.0), max_relative = 1e-14);
    }

    #[test]
    fn kron_matvec_matches_band_matvec() {
        let space = FemSpace::assemble(Mesh::square(0.0, 1.0, 0.0, 1.0, 5).unwrap());
        let n = space.dofs();
        let v: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        for (cm, cs) in [(1.0, 0.0), (0.0, 1.0), (0.7, 1.3)] {
            let band = space.system_band(cm, cs);
            let mut want = vec![0.0; n];
            band.matvec(&v, &mut want);
            let mut got = vec![0.0; n];
            let mut tmp = vec![0.0; n];
            space.mass_apply(&v, &mut got);
            space.stiffness_apply(&v, &mut tmp);
            for i in 0..n {
                let g = cm * got[i] + cs * tmp[i];
                assert!((g - want[i]).abs() < 1e-12, "row {i}: {g} vs {}", want[i]);
            }
        }
    }

    #[test]
    fn lumped_norm_values() {
        let space = FemSpace::assemble(Mesh::interval(0.0, 1.0, 4).unwrap());
        let ones = vec![1.0; 3];
        assert_relative_eq!(space.lumped_norm(&ones), (0.75f64).sqrt(), max_relative = 1e-15);
        assert_eq!(space.lumped_norm(&[0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn ritz_projection_of_fe_function_is_identity() {
        let space = FemSpace::assemble(Mesh::interval(0.0, 1.0, 8).unwrap());
        // φ = x(1-x) has gradient 1-2x; its projection must satisfy the
        // orthogonality relation exactly.
        let proj = space.ritz_project(|p| [1.0 - 2.0 * p[0], 0.0]).unwrap();
        let load = space.gradient_load(|p| [1.0 - 2.0 * p[0], 0.0]);
        let mut s_proj = vec![0.0; proj.len()];
        space.stiffness_apply(proj.as_slice(), &mut s_proj);
        for i in 0..proj.len() {
            assert!((s_proj[i] - load[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn discrete_poisson_recovers_sine() {
        // S x = M (pi^2 sin(pi x)) gives x ~ nodal sin with O(h^2) error.
        let space = FemSpace::assemble(Mesh::interval(0.0, 1.0, 64).unwrap());
        let f = space.nodal_interpolate(|p| std::f64::consts::PI.powi(2) * (std::f64::consts::PI * p[0]).sin());
        let mut rhs = vec![0.0; f.len()];
        space.mass_apply(f.as_slice(), &mut rhs);
        let x = space.factor(0.0, 1.0).unwrap().solve(&rhs);
        let exact = space.nodal_interpolate(|p| (std::f64::consts::PI * p[0]).sin());
        let mut err = 0.0f64;
        for i in 0..x.len() {
            err = err.max((x[i] - exact.as_slice()[i]).abs());
        }
        assert!(err < 2.0 / 64.0f64.powi(2), "err = {err}");
    }

    #[test]
    fn mass_inner_dimension_mismatch() {
        let space = FemSpace::assemble(Mesh::interval(0.0, 1.0, 4).unwrap());
        assert!(space.mass_inner(&[1.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }
}
