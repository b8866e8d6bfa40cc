//! Triangular collision order: collision matrices, the limiting velocity
//! matrix at equilateral geometry, its spectrum, and cone diagnostics.
//!
//! A hypothetical collapse cycling all three pairs drives the contact
//! triangle towards equilateral shape; in that limit one collision round is
//! the linear map `𝔄∞ = A_𝔠 A_𝔟 A_𝔞` on stacked relative velocities
//! `(W₁, W₂)`, with each `A` an elementary collision matrix
//! ([`collision_matrix`]). `𝔄∞` acts as the identity on components
//! orthogonal to the contact plane, so its essential part is the 4×4
//! restriction to the span of the contact normals and their in-plane
//! perpendiculars ([`restricted_matrix`], with closed-form entries that
//! [`restriction_from_product`] validates numerically). Its characteristic
//! polynomial factors as `χ(λ) = (λ−1)·Q(λ)` with `Q` cubic
//! ([`characteristic_polynomial`]); `Q` has a single real root in
//! `(−r, −r³)` and a conjugate pair of larger modulus below 1
//! ([`spectrum`]). Because the eigenvalues beside 1 force spiraling, an
//! orbit that must keep every collision admissible — the strict cone
//! conditions of [`cone_membership`] — eventually leaves the cone;
//! [`iterate_cone_exit`] records that exit as numerical evidence (not a
//! proof) against a linearized triangular collapse. [`order_sign_identity`]
//! evaluates the exact algebraic identity behind the order's self-
//! consistency at near-equilateral geometry.

use crate::complex::Complex;
use crate::core::{RelativeConfig, Restitution};
use crate::error::{Error, Result};
use crate::map;
use crate::nearlinear::bisect_root;
use crate::vec::VecD;
use serde::Serialize;

/// A small dense square matrix (row-major), sized at runtime to `2·dim`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareMatrix {
    size: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(size: usize) -> SquareMatrix {
        SquareMatrix {
            size,
            data: vec![0.0; size * size],
        }
    }

    pub fn identity(size: usize) -> SquareMatrix {
        let mut m = SquareMatrix::zeros(size);
        for i in 0..size {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.size + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.size + col] = value;
    }

    /// Matrix product `self · rhs`. Panics on size mismatch.
    pub fn mul(&self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.size, rhs.size, "matrix size mismatch");
        let n = self.size;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }

    /// Matrix–vector product. Panics on size mismatch.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.size, v.len(), "matrix/vector size mismatch");
        (0..self.size)
            .map(|i| (0..self.size).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

/// Which pair collides: `A` for 0–1, `B` for 0–2, `C` for 1–2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollisionKind {
    A,
    B,
    C,
}

/// One collision as a `2d×2d` linear map on stacked relative velocities
/// `(W₁, W₂)` (relative to the shared particle 0).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollisionMatrix {
    pub kind: CollisionKind,
    pub omega: VecD,
    pub matrix: SquareMatrix,
}

/// Assembles the collision matrix for the given pair and unit contact
/// normal `omega`:
///
/// ```text
/// A  (0–1):  [[I−(1+r)P,      0     ],   B (0–2): [[I,  −(1+r)/2·P],
///             [−(1+r)/2·P,    I     ]]             [0,  I−(1+r)P  ]]
/// C  (1–2):  [[I−(1+r)/2·P,  (1+r)/2·P],
///             [(1+r)/2·P,    I−(1+r)/2·P]]        (P = ω⊗ω)
/// ```
pub fn collision_matrix(
    kind: CollisionKind,
    omega: &VecD,
    r: Restitution,
) -> Result<CollisionMatrix> {
    omega.check_unit()?;
    let d = omega.dim();
    let rv = r.value();
    let full = 1.0 + rv;
    let half = 0.5 * (1.0 + rv);
    let mut m = SquareMatrix::identity(2 * d);
    // (block_row, block_col, coefficient of P added to that block).
    let blocks: [(usize, usize, f64); 4] = match kind {
        CollisionKind::A => [(0, 0, -full), (0, 1, 0.0), (1, 0, -half), (1, 1, 0.0)],
        CollisionKind::B => [(0, 0, 0.0), (0, 1, -half), (1, 0, 0.0), (1, 1, -full)],
        CollisionKind::C => [(0, 0, -half), (0, 1, half), (1, 0, half), (1, 1, -half)],
    };
    for (bi, bj, coeff) in blocks {
        if coeff == 0.0 {
            continue;
        }
        for i in 0..d {
            for j in 0..d {
                let row = bi * d + i;
                let col = bj * d + j;
                let v = m.get(row, col) + coeff * omega[i] * omega[j];
                m.set(row, col, v);
            }
        }
    }
    Ok(CollisionMatrix {
        kind,
        omega: omega.clone(),
        matrix: m,
    })
}

/// The canonical equilateral contact frame in dimension `dim`:
/// `(ω₁, ω₂, ω₃, ω₁^⊥, ω₂^⊥)` with `ω₁ = e₁`, `ω₂` at angle π/3 in the
/// first coordinate plane, `ω₃ = ω₂ − ω₁` (unit), and the in-plane
/// perpendiculars oriented by `ω₁^⊥·ω₂ > 0` and `ω₂^⊥·ω₁ > 0`.
pub fn equilateral_frame(dim: usize) -> Result<(VecD, VecD, VecD, VecD, VecD)> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let s3 = 3.0f64.sqrt() / 2.0;
    let coords = |a: f64, b: f64| -> Result<VecD> {
        let mut c = vec![0.0; dim];
        c[0] = a;
        c[1] = b;
        VecD::new(c)
    };
    let omega1 = coords(1.0, 0.0)?;
    let omega2 = coords(0.5, s3)?;
    let omega3 = coords(-0.5, s3)?;
    let omega1_perp = coords(0.0, 1.0)?;
    let omega2_perp = coords(s3, -0.5)?;
    Ok((omega1, omega2, omega3, omega1_perp, omega2_perp))
}

/// The limiting one-round velocity matrix `𝔄∞ = A_𝔠 A_𝔟 A_𝔞` at the
/// canonical equilateral frame, as a `2·dim × 2·dim` matrix.
pub fn limiting_matrix(r: Restitution, dim: usize) -> Result<SquareMatrix> {
    let (omega1, omega2, omega3, _, _) = equilateral_frame(dim)?;
    let a = collision_matrix(CollisionKind::A, &omega1, r)?;
    let b = collision_matrix(CollisionKind::B, &omega2, r)?;
    let c = collision_matrix(CollisionKind::C, &omega3, r)?;
    Ok(c.matrix.mul(&b.matrix.mul(&a.matrix)))
}

/// The essential 4×4 part of the limiting velocity matrix, in the
/// orthonormal basis `(ω₁,0), (ω₁^⊥,0), (0,ω₂), (0,ω₂^⊥)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictedLimitMatrix {
    pub r: f64,
    /// Row-major entries.
    pub matrix: [[f64; 4]; 4],
}

impl RestrictedLimitMatrix {
    /// Applies the matrix to a coordinate vector `(x, y, z, t)`.
    pub fn apply(&self, v: [f64; 4]) -> [f64; 4] {
        let m = &self.matrix;
        let mut out = [0.0; 4];
        for (i, row) in m.iter().enumerate() {
            out[i] = row.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        }
        out
    }
}

/// Closed-form entries of the restricted limiting matrix.
pub fn restricted_matrix(r: Restitution) -> RestrictedLimitMatrix {
    let r1 = r.value();
    let r2 = r1 * r1;
    let r3 = r2 * r1;
    let s3 = 3.0f64.sqrt();
    let matrix = [
        [
            (-r3 + 5.0 * r2 - 59.0 * r1 - 1.0) / 64.0,
            s3 * (r1 + 1.0) / 8.0,
            (r2 - 4.0 * r1 - 5.0) / 16.0,
            -s3 * (r1 + 1.0) / 8.0,
        ],
        [
            s3 * (r3 + 3.0 * r2 + 11.0 * r1 + 9.0) / 64.0,
            (5.0 - 3.0 * r1) / 8.0,
            -s3 * (r2 + 4.0 * r1 + 3.0) / 16.0,
            (3.0 * r1 + 3.0) / 8.0,
        ],
        [
            (-r3 + 17.0 * r2 + 13.0 * r1 - 5.0) / 64.0,
            s3 * (r1 + 1.0) / 8.0,
            (r2 - 16.0 * r1 - 1.0) / 16.0,
            -s3 * (r1 + 1.0) / 8.0,
        ],
        [
            s3 * (-r3 + r2 + 13.0 * r1 + 11.0) / 64.0,
            (3.0 * r1 + 3.0) / 8.0,
            s3 * (r2 - 1.0) / 16.0,
            (5.0 - 3.0 * r1) / 8.0,
        ],
    ];
    RestrictedLimitMatrix {
        r: r1,
        matrix,
    }
}

/// The same restriction computed numerically: assemble the full product in
/// dimension `dim` and project onto the basis. Oracle for
/// [`restricted_matrix`]; any components outside the contact plane are
/// untouched by the product, so the result is dimension-independent.
pub fn restriction_from_product(r: Restitution, dim: usize) -> Result<[[f64; 4]; 4]> {
    let (omega1, omega2, _, omega1_perp, omega2_perp) = equilateral_frame(dim)?;
    let full = limiting_matrix(r, dim)?;
    let stack = |top: Option<&VecD>, bottom: Option<&VecD>| -> Vec<f64> {
        let mut v = vec![0.0; 2 * dim];
        if let Some(t) = top {
            for i in 0..dim {
                v[i] = t[i];
            }
        }
        if let Some(b) = bottom {
            for i in 0..dim {
                v[dim + i] = b[i];
            }
        }
        v
    };
    let basis = [
        stack(Some(&omega1), None),
        stack(Some(&omega1_perp), None),
        stack(None, Some(&omega2)),
        stack(None, Some(&omega2_perp)),
    ];
    let mut out = [[0.0; 4]; 4];
    for (j, fj) in basis.iter().enumerate() {
        let image = full.mul_vec(fj);
        for (i, fi) in basis.iter().enumerate() {
            out[i][j] = fi.iter().zip(image.iter()).map(|(a, b)| a * b).sum();
        }
    }
    Ok(out)
}

/// Coefficients of the restricted matrix's characteristic polynomial
/// `χ(λ) = (λ−1)·Q(λ)`, both stored lowest degree first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharacteristicPolynomial {
    /// `χ`: degree 4, so 5 coefficients.
    pub chi: [f64; 5],
    /// `Q(λ) = λ³ + a₂λ² + a₁λ + r³`: `[r³, a₁, a₂, 1]`.
    pub q: [f64; 4],
}

/// Closed-form characteristic polynomial of the restricted matrix.
pub fn characteristic_polynomial(r: Restitution) -> CharacteristicPolynomial {
    let r1 = r.value();
    let r2 = r1 * r1;
    let r3 = r2 * r1;
    let a2 = (r3 - 9.0 * r2 + 171.0 * r1 - 11.0) / 64.0;
    let a1 = (-11.0 * r3 + 171.0 * r2 - 9.0 * r1 + 1.0) / 64.0;
    let a0 = r3;
    let q = [a0, a1, a2, 1.0];
    // (λ−1)·Q: convolution with (−1, 1).
    let chi = [-a0, a0 - a1, a1 - a2, a2 - 1.0, 1.0];
    CharacteristicPolynomial { chi, q }
}

/// Evaluates a lowest-degree-first polynomial at `x`.
fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Spectrum of the restricted limiting matrix beside the eigenvalue 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    /// The single real root of `Q`, inside `(−r, −r³)`.
    pub lambda0: f64,
    pub lambda_plus: Complex,
    pub lambda_minus: Complex,
    /// `−1 < −r < λ₀ < −r³ < 0`, all strict.
    pub bracket_ok: bool,
    /// `|λ₀| < |λ±| < 1`, strict.
    pub moduli_ok: bool,
    /// `|(−λ₀)·|λ±|² − r³|` (the root-product identity).
    pub viete_residual: f64,
}

/// Computes the nontrivial eigenvalues of the restricted matrix.
///
/// `λ₀` is found by bisection on the theorem-guaranteed bracket
/// `(−r, −r³)`; the conjugate pair comes from the deflated quadratic
/// `λ² + (a₂+λ₀)λ + a₁ + λ₀(a₂+λ₀)`, whose constant term is `|λ±|²`.
pub fn spectrum(r: Restitution) -> SpectrumReport {
    let poly = characteristic_polynomial(r);
    let [_, a1, a2, _] = poly.q;
    let rv = r.value();
    let r3 = rv * rv * rv;
    let q = |x: f64| eval_poly(&poly.q, x);
    let lambda0 = bisect_root(&q, -rv, -r3, 1e-15);

    let b = a2 + lambda0;
    let c = a1 + lambda0 * b;
    let disc = 4.0 * c - b * b;
    let (lambda_plus, lambda_minus) = if disc > 0.0 {
        let im = 0.5 * disc.sqrt();
        (Complex::new(-0.5 * b, im), Complex::new(-0.5 * b, -im))
    } else {
        // Unreachable for r ∈ (0,1); kept total for robustness.
        let root = (-disc).sqrt();
        (
            Complex::real(0.5 * (-b + root)),
            Complex::real(0.5 * (-b - root)),
        )
    };
    let modulus = lambda_plus.modulus();
    let bracket_ok = -1.0 < -rv && -rv < lambda0 && lambda0 < -r3 && -r3 < 0.0;
    let moduli_ok = lambda0.abs() < modulus && modulus < 1.0;
    let viete_residual = ((-lambda0) * lambda_plus.modulus_sq() - r3).abs();
    SpectrumReport {
        lambda0,
        lambda_plus,
        lambda_minus,
        bracket_ok,
        moduli_ok,
        viete_residual,
    }
}

/// Strict-inequality membership in the admissibility cones: `C₁` requires
/// `x < 0` and `z < (1+r)/4·x`; `C₂` additionally `y < t`.
///
/// The coordinates follow the restricted basis: `x, y` are the normal and
/// in-plane tangential components of `W₁`, and `z, t` those of `W₂`. The
/// `y < t` refinement reflects the small-`r` regime (no quantitative cutoff
/// is imposed here).
pub fn cone_membership(x: f64, y: f64, z: f64, t: f64, r: Restitution) -> (bool, bool) {
    let in_c1 = x < 0.0 && z < 0.25 * (1.0 + r.value()) * x;
    let in_c2 = in_c1 && y < t;
    (in_c1, in_c2)
}

/// Orbit of the restricted linear dynamics with cone bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeOrbit {
    /// `x₀` and its images, `max_iter + 1` entries.
    pub orbit: Vec<[f64; 4]>,
    /// First index (0 = the initial vector) whose entry is outside `C₂`.
    pub exit_index: Option<usize>,
    /// Per-entry distance to the fixed line `span(0,1,0,1)`.
    pub distances: Vec<f64>,
}

/// Iterates the restricted matrix from `x0`, recording when the orbit
/// leaves the admissibility cone `C₂` and how fast it approaches the
/// eigenline of λ = 1. Evidence-gathering only: nothing here is asserted
/// as a theorem.
pub fn iterate_cone_exit(x0: [f64; 4], r: Restitution, max_iter: usize) -> ConeOrbit {
    let m = restricted_matrix(r);
    let e = [0.0, 1.0, 0.0, 1.0].map(|v| v / 2.0f64.sqrt());
    let dist = |v: [f64; 4]| -> f64 {
        let along: f64 = v.iter().zip(e.iter()).map(|(a, b)| a * b).sum();
        v.iter()
            .zip(e.iter())
            .map(|(a, b)| (a - along * b) * (a - along * b))
            .sum::<f64>()
            .sqrt()
    };
    let mut orbit = Vec::with_capacity(max_iter + 1);
    let mut distances = Vec::with_capacity(max_iter + 1);
    let mut exit_index = None;
    let mut current = x0;
    for index in 0..=max_iter {
        orbit.push(current);
        distances.push(dist(current));
        let [x, y, z, t] = current;
        if exit_index.is_none() && !cone_membership(x, y, z, t, r).1 {
            exit_index = Some(index);
        }
        if index < max_iter {
            current = m.apply(current);
        }
    }
    ConeOrbit {
        orbit,
        exit_index,
        distances,
    }
}

/// Both sides of the collision-time identity together with the
/// post-collision normal component of the contact pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderSignIdentity {
    /// `(1+d)η₂ + τ|W₂|²`.
    pub lhs: f64,
    /// `(1+d)√(1−ζ)·η₂`.
    pub rhs: f64,
    /// `η₁′` after the slot-2 collision.
    pub eta1_prime: f64,
}

/// Evaluates the identity `(1+d)η₂ + τ|W₂|² = (1+d)√(1−ζ)·η₂` on a
/// near-equilateral configuration (`|ω₁·ω₂ − ½| ≤ 0.1`) and returns the
/// resulting `η₁′` — the sign evidence that the triangular order keeps
/// reproducing itself there.
pub fn order_sign_identity(cfg: &RelativeConfig, r: Restitution) -> Result<OrderSignIdentity> {
    let cos = cfg.omega1.dot(&cfg.omega2);
    if (cos - 0.5).abs() > 0.1 {
        return Err(Error::MapDomain(format!(
            "near-equilateral geometry requires |omega1.omega2 - 1/2| <= 0.1, got {cos}"
        )));
    }
    let step = map::apply_map(cfg, r)?;
    let zeta = map::zk_parameter(cfg)?.zeta;
    let d = cfg.gap;
    let lhs = (1.0 + d) * cfg.eta2 + step.tau * cfg.w2.norm_sq();
    let rhs = (1.0 + d) * (1.0 - zeta).sqrt() * cfg.eta2;
    Ok(OrderSignIdentity {
        lhs,
        rhs,
        eta1_prime: step.eta1_post,
    })
}
