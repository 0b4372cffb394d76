//! Metrics and the curvature pipeline: inverse metric, Christoffel
//! symbols, Riemann and Ricci tensors, Ricci scalar and Einstein tensor,
//! all as symbolic components over the configuration chart q^1..q^4.
//!
//! Index and sign conventions (calibrated once against the closed-form
//! component tables for the deformed Schwarzschild metric):
//!
//! * `Gamma^m_{nl} = 1/2 g^{me} (d_l g_{en} + d_n g_{el} - d_e g_{nl})`
//! * `R^r_{s m n} = d_m Gamma^r_{ns} - d_n Gamma^r_{ms}
//!    + Gamma^r_{ml} Gamma^l_{ns} - Gamma^r_{nl} Gamma^l_{ms}`,
//!   lowered with the metric on the first index (matches the tabulated
//!   Riemann components with no flip);
//! * `R_{ij} = R^k_{ijk} = -g^{kl} R_{kilj}` (the flip is what the
//!   tabulated Ricci sector uses), `R = g^{ij} R_{ij}`,
//!   `G_{ij} = R_{ij} - 1/2 g_{ij} R`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::domain::DomainBox;
use crate::expr::Expr;

pub const DIM: usize = 4;

#[derive(Debug, Clone, Error)]
pub enum MetricError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("metric is not symmetric at slot ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("missing metric component g_{0}{1}")]
    MissingComponent(usize, usize),
    #[error("metric numerically singular at {point:?}")]
    Singular { point: Vec<f64> },
}

/// A named 4-dimensional metric with symbolic components over q^1..q^4.
#[derive(Debug, Clone)]
pub struct MetricSpec {
    pub name: String,
    pub components: Vec<Expr>,
    pub params: BTreeMap<String, f64>,
    pub scale_factor: Option<Expr>,
    pub domain: DomainBox,
}

impl MetricSpec {
    pub fn new(
        name: impl Into<String>,
        components: Vec<Expr>,
        domain: DomainBox,
    ) -> MetricSpec {
        assert_eq!(components.len(), DIM * DIM);
        MetricSpec {
            name: name.into(),
            components,
            params: BTreeMap::new(),
            scale_factor: None,
            domain,
        }
    }

    pub fn from_diagonal(name: impl Into<String>, diag: [Expr; DIM], domain: DomainBox) -> MetricSpec {
        let mut components = vec![Expr::zero(); DIM * DIM];
        for (i, e) in diag.into_iter().enumerate() {
            components[i * DIM + i] = e;
        }
        MetricSpec::new(name, components, domain)
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.components[i * DIM + j]
    }

    pub fn is_diagonal(&self) -> bool {
        (0..DIM).all(|i| (0..DIM).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Phase-space box pairing the configuration domain with the default
    /// momentum interval.
    pub fn phase_domain(&self) -> DomainBox {
        self.domain.with_momenta((0.2, 2.0))
    }
}

/// Symbolic inverse metric. Diagonal metrics invert componentwise; the
/// general path uses the cofactor expansion.
pub fn inverse_metric(g: &MetricSpec) -> Vec<Expr> {
    if g.is_diagonal() {
        let mut inv = vec![Expr::zero(); DIM * DIM];
        for i in 0..DIM {
            inv[i * DIM + i] = Expr::div(Expr::one(), g.get(i, i).clone());
        }
        return inv;
    }
    let det = det4(&g.components);
    let mut inv = vec![Expr::zero(); DIM * DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            let c = cofactor(&g.components, j, i);
            inv[i * DIM + j] = Expr::div(c, det.clone());
        }
    }
    inv
}

fn minor3(m: &[Expr], skip_row: usize, skip_col: usize) -> Expr {
    let mut rows = Vec::new();
    for r in 0..DIM {
        if r == skip_row {
            continue;
        }
        let mut row = Vec::new();
        for c in 0..DIM {
            if c == skip_col {
                continue;
            }
            row.push(m[r * DIM + c].clone());
        }
        rows.push(row);
    }
    // 3x3 determinant
    let d = |a: &Expr, b: &Expr, c: &Expr, d2: &Expr| {
        Expr::sub(Expr::mul(a.clone(), d2.clone()), Expr::mul(b.clone(), c.clone()))
    };
    let m00 = d(&rows[1][1], &rows[1][2], &rows[2][1], &rows[2][2]);
    let m01 = d(&rows[1][0], &rows[1][2], &rows[2][0], &rows[2][2]);
    let m02 = d(&rows[1][0], &rows[1][1], &rows[2][0], &rows[2][1]);
    Expr::add(
        Expr::sub(
            Expr::mul(rows[0][0].clone(), m00),
            Expr::mul(rows[0][1].clone(), m01),
        ),
        Expr::mul(rows[0][2].clone(), m02),
    )
}

fn cofactor(m: &[Expr], i: usize, j: usize) -> Expr {
    let sign = if (i + j) % 2 == 0 { Expr::one() } else { Expr::int(-1) };
    Expr::mul(sign, minor3(m, i, j))
}

fn det4(m: &[Expr]) -> Expr {
    let mut acc = Expr::zero();
    for j in 0..DIM {
        acc = Expr::add(acc, Expr::mul(m[j].clone(), cofactor(m, 0, j)));
    }
    acc
}

/// All curvature objects of a metric, computed once.
#[derive(Debug, Clone)]
pub struct CurvatureBundle {
    pub inverse: Vec<Expr>,
    /// `Gamma^m_{nl}` indexed `[m][n][l]`, symmetric in (n, l).
    pub christoffel: Vec<Expr>,
    /// `R_{ijkl}` fully lowered.
    pub riemann_lowered: Vec<Expr>,
    pub ricci: Vec<Expr>,
    pub ricci_scalar: Expr,
    pub einstein: Vec<Expr>,
    /// Human-readable record of the calibrated conventions.
    pub conventions: &'static str,
}

pub fn christoffel(g: &MetricSpec, inverse: &[Expr]) -> Vec<Expr> {
    let mut gamma = vec![Expr::zero(); DIM * DIM * DIM];
    for m in 0..DIM {
        for n in 0..DIM {
            for l in n..DIM {
                let mut acc = Expr::zero();
                for e in 0..DIM {
                    if inverse[m * DIM + e].is_zero() {
                        continue;
                    }
                    let term = Expr::sub(
                        Expr::add(g.get(e, n).diff(l), g.get(e, l).diff(n)),
                        g.get(n, l).diff(e),
                    );
                    acc = Expr::add(acc, Expr::mul(inverse[m * DIM + e].clone(), term));
                }
                let out = Expr::mul(Expr::rat(1, 2), acc);
                gamma[(m * DIM + n) * DIM + l] = out.clone();
                gamma[(m * DIM + l) * DIM + n] = out;
            }
        }
    }
    gamma
}

fn gamma_at(gamma: &[Expr], m: usize, n: usize, l: usize) -> &Expr {
    &gamma[(m * DIM + n) * DIM + l]
}

/// `R^r_{s m n}` (mixed), then lowered to `R_{rsmn}` with the metric.
pub fn riemann_lowered(g: &MetricSpec, gamma: &[Expr]) -> Vec<Expr> {
    let mut mixed = vec![Expr::zero(); DIM * DIM * DIM * DIM];
    for r in 0..DIM {
        for s in 0..DIM {
            for m in 0..DIM {
                for n in 0..DIM {
                    if m == n {
                        continue;
                    }
                    let mut acc = Expr::sub(
                        gamma_at(gamma, r, n, s).diff(m),
                        gamma_at(gamma, r, m, s).diff(n),
                    );
                    for l in 0..DIM {
                        acc = Expr::add(
                            acc,
                            Expr::sub(
                                Expr::mul(
                                    gamma_at(gamma, r, m, l).clone(),
                                    gamma_at(gamma, l, n, s).clone(),
                                ),
                                Expr::mul(
                                    gamma_at(gamma, r, n, l).clone(),
                                    gamma_at(gamma, l, m, s).clone(),
                                ),
                            ),
                        );
                    }
                    mixed[((r * DIM + s) * DIM + m) * DIM + n] = acc;
                }
            }
        }
    }
    let mut lowered = vec![Expr::zero(); DIM * DIM * DIM * DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                for l in 0..DIM {
                    let mut acc = Expr::zero();
                    for e in 0..DIM {
                        if g.get(i, e).is_zero() {
                            continue;
                        }
                        acc = Expr::add(
                            acc,
                            Expr::mul(
                                g.get(i, e).clone(),
                                mixed[((e * DIM + j) * DIM + k) * DIM + l].clone(),
                            ),
                        );
                    }
                    lowered[((i * DIM + j) * DIM + k) * DIM + l] = acc;
                }
            }
        }
    }
    lowered
}

/// `R_{ij} = R^k_{ijk} = -g^{kl} R_{kilj}`. The contraction slot (and with
/// it the overall Ricci-sector sign) is calibrated against the
/// Schwarzschild component tables; the classical limit of this choice has
/// `R_tt = +3 a''/a` for FLRW.
pub fn ricci(inverse: &[Expr], riemann: &[Expr]) -> Vec<Expr> {
    let mut out = vec![Expr::zero(); DIM * DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            let mut acc = Expr::zero();
            for k in 0..DIM {
                for l in 0..DIM {
                    if inverse[k * DIM + l].is_zero() {
                        continue;
                    }
                    acc = Expr::add(
                        acc,
                        Expr::mul(
                            inverse[k * DIM + l].clone(),
                            riemann[((k * DIM + i) * DIM + l) * DIM + j].clone(),
                        ),
                    );
                }
            }
            out[i * DIM + j] = Expr::neg(acc);
        }
    }
    out
}

pub fn ricci_scalar(inverse: &[Expr], ricci: &[Expr]) -> Expr {
    let mut acc = Expr::zero();
    for i in 0..DIM {
        for j in 0..DIM {
            if inverse[i * DIM + j].is_zero() {
                continue;
            }
            acc = Expr::add(
                acc,
                Expr::mul(inverse[i * DIM + j].clone(), ricci[i * DIM + j].clone()),
            );
        }
    }
    acc
}

pub fn einstein(g: &MetricSpec, ricci: &[Expr], scalar: &Expr) -> Vec<Expr> {
    let mut out = vec![Expr::zero(); DIM * DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            out[i * DIM + j] = Expr::sub(
                ricci[i * DIM + j].clone(),
                Expr::mul(
                    Expr::rat(1, 2),
                    Expr::mul(g.get(i, j).clone(), scalar.clone()),
                ),
            );
        }
    }
    out
}

/// Run the whole pipeline.
pub fn curvature(g: &MetricSpec) -> CurvatureBundle {
    let inverse = inverse_metric(g);
    let gamma = christoffel(g, &inverse);
    let riemann = riemann_lowered(g, &gamma);
    let ric = ricci(&inverse, &riemann);
    let scalar = ricci_scalar(&inverse, &ric);
    let ein = einstein(g, &ric, &scalar);
    CurvatureBundle {
        inverse,
        christoffel: gamma,
        riemann_lowered: riemann,
        ricci: ric,
        ricci_scalar: scalar,
        einstein: ein,
        conventions: "R^r_smn = dGamma_m - dGamma_n + GG - GG; lower on first index (no flip); \
                      Ricci globally flipped: R_ij = R^k_ijk = -g^{kl} R_{kilj}",
    }
}

fn pow2am1(i: usize) -> Expr {
    // (q^i)^(2(alpha-1)) -- positive-orthant power
    Expr::pow(
        Expr::coord(i),
        Expr::mul(Expr::int(2), Expr::alpha_minus_one()),
    )
}

/// The deformed Minkowski metric
/// `diag(-a^2 (q^1)^(2(a-1)), a^2 (q^2)^(2(a-1)), ...)`.
pub fn minkowski() -> MetricSpec {
    let a2 = Expr::pow(Expr::alpha(), Expr::int(2));
    let diag = [
        Expr::neg(Expr::mul(a2.clone(), pow2am1(0))),
        Expr::mul(a2.clone(), pow2am1(1)),
        Expr::mul(a2.clone(), pow2am1(2)),
        Expr::mul(a2, pow2am1(3)),
    ];
    MetricSpec::from_diagonal("minkowski", diag, DomainBox::default_config())
}

/// The deformed Schwarzschild metric with mass `m > 0`; the radial
/// coordinate q^2 lives outside the horizon.
pub fn schwarzschild(m: f64) -> Result<MetricSpec, MetricError> {
    if m <= 0.0 {
        return Err(MetricError::InvalidParameter(format!("mass M must be positive, got {m}")));
    }
    let a = Expr::sub(Expr::one(), Expr::div(Expr::real(2.0 * m), Expr::coord(1)));
    let r2 = Expr::pow(Expr::coord(1), Expr::int(2));
    let diag = [
        Expr::neg(Expr::mul(a.clone(), pow2am1(0))),
        Expr::mul(Expr::pow(a, Expr::int(-1)), pow2am1(1)),
        Expr::mul(r2.clone(), pow2am1(2)),
        Expr::mul(
            Expr::mul(r2, pow2am1(3)),
            Expr::pow(Expr::sin(Expr::coord(2)), Expr::int(2)),
        ),
    ];
    let domain = DomainBox::new(vec![
        (0.5, 3.0),
        (2.0 * m + 0.5 * m, 8.0 * m),
        (0.3, 2.8),
        (0.5, 3.0),
    ]);
    let mut spec = MetricSpec::from_diagonal("schwarzschild", diag, domain);
    spec.params.insert("M".into(), m);
    Ok(spec)
}

/// The deformed FLRW metric with curvature constant `k` and scale factor
/// `r_of_q1` (an expression over q^1).
pub fn flrw(k: f64, r_of_q1: Expr) -> Result<MetricSpec, MetricError> {
    if r_of_q1.max_coord().map(|m| m > 0).unwrap_or(false) {
        return Err(MetricError::InvalidParameter(
            "scale factor must depend on q1 only".into(),
        ));
    }
    let r2 = Expr::pow(r_of_q1.clone(), Expr::int(2));
    let curv = Expr::sub(
        Expr::one(),
        Expr::mul(Expr::real(k), Expr::pow(Expr::coord(1), Expr::int(2))),
    );
    let q2sq = Expr::pow(Expr::coord(1), Expr::int(2));
    let abs2am1 = |i: usize| Expr::abs_coord_pow(i, Expr::mul(Expr::int(2), Expr::alpha_minus_one()));
    let diag = [
        Expr::neg(abs2am1(0)),
        Expr::div(Expr::mul(r2.clone(), abs2am1(1)), curv),
        Expr::mul(Expr::mul(r2.clone(), q2sq.clone()), abs2am1(2)),
        Expr::mul(
            Expr::mul(Expr::mul(r2, q2sq), abs2am1(3)),
            Expr::pow(Expr::sin(Expr::coord(2)), Expr::int(2)),
        ),
    ];
    // for k = 1 keep 1 - k q2^2 > 0
    let q2_hi = if k > 0.0 { (1.0 / k.sqrt()) * 0.9 } else { 3.0 };
    let domain = DomainBox::new(vec![(0.5, 3.0), (0.2, q2_hi.min(3.0)), (0.3, 2.8), (0.5, 3.0)]);
    let mut spec = MetricSpec::from_diagonal("flrw", diag, domain);
    spec.params.insert("k".into(), k);
    spec.scale_factor = Some(r_of_q1);
    Ok(spec)
}

/// Build a builtin metric by name.
pub fn builtin_metric(
    name: &str,
    m: Option<f64>,
    k: Option<f64>,
    scale: Option<Expr>,
) -> Result<MetricSpec, MetricError> {
    match name {
        "minkowski" => Ok(minkowski()),
        "schwarzschild" => schwarzschild(m.unwrap_or(1.0)),
        "flrw" => flrw(
            k.unwrap_or(0.0),
            scale.unwrap_or_else(|| Expr::pow(Expr::coord(0), Expr::int(2))),
        ),
        other => Err(MetricError::InvalidParameter(format!("unknown metric `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{numeric_equal, sweep_max_residual};

    #[test]
    fn minkowski_inverse_closed_form() {
        let g = minkowski();
        let inv = inverse_metric(&g);
        // (g^{11})_a = -(q^1)^(2(1-a)) / a^2
        let expect = Expr::neg(Expr::div(
            Expr::pow(Expr::coord(0), Expr::mul(Expr::int(2), Expr::one_minus_alpha())),
            Expr::pow(Expr::alpha(), Expr::int(2)),
        ));
        let c = numeric_equal(&inv[0], &expect, &g.domain, 100, 1e-12, 2, 0.7).unwrap();
        assert!(c.passed, "residual {}", c.max_residual);
        // alpha = 1: inverse of diag(-1,1,1,1) is itself
        for i in 0..DIM {
            let (r, _) = sweep_max_residual(&g.domain, 20, 3, |p| {
                let v = inv[i * DIM + i].eval(p, 1.0)?;
                let expect = if i == 0 { -1.0 } else { 1.0 };
                Ok((v - expect).abs())
            })
            .unwrap();
            assert!(r < 1e-13);
        }
    }

    #[test]
    fn metric_times_inverse_is_identity() {
        for g in [
            minkowski(),
            schwarzschild(1.0).unwrap(),
            flrw(1.0, Expr::pow(Expr::coord(0), Expr::int(2))).unwrap(),
        ] {
            let inv = inverse_metric(&g);
            for i in 0..DIM {
                for j in 0..DIM {
                    let mut prod = Expr::zero();
                    for k in 0..DIM {
                        prod = Expr::add(
                            prod,
                            Expr::mul(g.get(i, k).clone(), inv[k * DIM + j].clone()),
                        );
                    }
                    let expect = if i == j { Expr::one() } else { Expr::zero() };
                    let c = numeric_equal(&prod, &expect, &g.domain, 30, 1e-10, 4, 0.7).unwrap();
                    assert!(c.passed, "{} g.g^-1 at ({i},{j}): {}", g.name, c.max_residual);
                }
            }
        }
    }

    #[test]
    fn flrw_inverse_against_numeric_solve() {
        // cross-check g^{22} by inverting the evaluated matrix numerically
        let g = flrw(1.0, Expr::pow(Expr::coord(0), Expr::int(2))).unwrap();
        let inv = inverse_metric(&g);
        let (r, p) = sweep_max_residual(&g.domain, 50, 6, |pt| {
            let sym = inv[1 * DIM + 1].eval(pt, 0.7)?;
            let g22 = g.get(1, 1).eval(pt, 0.7)?;
            // diagonal matrix: numeric inverse entry is 1/g22
            Ok((sym - 1.0 / g22).abs() / (1.0 + sym.abs()))
        })
        .unwrap();
        assert!(r < 1e-12, "residual {r} at {p:?}");
    }

    #[test]
    fn minkowski_christoffels_closed_form() {
        let g = minkowski();
        let bundle = curvature(&g);
        for m in 0..DIM {
            for n in 0..DIM {
                for l in 0..DIM {
                    let expect = if m == n && n == l {
                        Expr::div(Expr::alpha_minus_one(), Expr::coord(m))
                    } else {
                        Expr::zero()
                    };
                    let got = gamma_at(&bundle.christoffel, m, n, l);
                    let c = numeric_equal(got, &expect, &g.domain, 50, 1e-11, 5, 0.7).unwrap();
                    assert!(c.passed, "Gamma^{m}_{n}{l}: residual {}", c.max_residual);
                }
            }
        }
    }

    #[test]
    fn schwarzschild_christoffel_spot_checks() {
        let g = schwarzschild(1.0).unwrap();
        let bundle = curvature(&g);
        let m = 1.0;
        // Gamma^1_12 = -M / (q2 (2M - q2))
        let expect = Expr::neg(Expr::div(
            Expr::real(m),
            Expr::mul(
                Expr::coord(1),
                Expr::sub(Expr::real(2.0 * m), Expr::coord(1)),
            ),
        ));
        let c = numeric_equal(
            gamma_at(&bundle.christoffel, 0, 0, 1),
            &expect,
            &g.domain,
            100,
            1e-10,
            7,
            0.7,
        )
        .unwrap();
        assert!(c.passed, "Gamma^1_12 residual {}", c.max_residual);
        // Gamma^4_34 = cot(q3)
        let c = numeric_equal(
            gamma_at(&bundle.christoffel, 3, 2, 3),
            &Expr::cot(Expr::coord(2)),
            &g.domain,
            100,
            1e-10,
            8,
            0.7,
        )
        .unwrap();
        assert!(c.passed, "Gamma^4_34 residual {}", c.max_residual);
    }

    /// Finite-difference Christoffels straight from the metric components:
    /// the independent oracle for the symbolic pipeline.
    fn fd_christoffel(g: &MetricSpec, pt: &[f64], alpha: f64, m: usize, n: usize, l: usize) -> f64 {
        let h = 1e-6;
        let dg = |e: usize, i: usize, j: usize| {
            let mut plus = pt.to_vec();
            let mut minus = pt.to_vec();
            plus[e] += h;
            minus[e] -= h;
            (g.get(i, j).eval(&plus, alpha).unwrap() - g.get(i, j).eval(&minus, alpha).unwrap())
                / (2.0 * h)
        };
        let inv = inverse_metric(g);
        let mut acc = 0.0;
        for e in 0..DIM {
            let ge = inv[m * DIM + e].eval(pt, alpha).unwrap();
            if ge == 0.0 {
                continue;
            }
            acc += ge * (dg(l, e, n) + dg(n, e, l) - dg(e, n, l));
        }
        0.5 * acc
    }

    #[test]
    fn christoffels_match_finite_differences() {
        for g in [minkowski(), schwarzschild(1.0).unwrap(), flrw(0.0, Expr::pow(Expr::coord(0), Expr::int(2))).unwrap()] {
            let bundle = curvature(&g);
            let (r, p) = sweep_max_residual(&g.domain, 100, 11, |pt| {
                let mut worst = 0.0f64;
                for m in 0..DIM {
                    for n in 0..DIM {
                        for l in n..DIM {
                            let sym = gamma_at(&bundle.christoffel, m, n, l).eval(pt, 0.7)?;
                            let fd = fd_christoffel(&g, pt, 0.7, m, n, l);
                            worst = worst.max((sym - fd).abs() / (1.0 + sym.abs().max(fd.abs())));
                        }
                    }
                }
                Ok(worst)
            })
            .unwrap();
            assert!(r < 1e-6, "{}: fd residual {r} at {p:?}", g.name);
        }
    }

    #[test]
    fn minkowski_is_flat_for_all_alphas() {
        let g = minkowski();
        let bundle = curvature(&g);
        for &alpha in &[0.5, 0.7, 1.0] {
            let (r, p) = sweep_max_residual(&g.domain, 100, 13, |pt| {
                let mut worst = 0.0f64;
                for e in &bundle.riemann_lowered {
                    if e.is_zero() {
                        continue;
                    }
                    worst = worst.max(e.eval(pt, alpha)?.abs());
                }
                Ok(worst)
            })
            .unwrap();
            assert!(r < 1e-10, "alpha {alpha}: flatness residual {r} at {p:?}");
        }
    }

    #[test]
    fn schwarzschild_r1212_classical_value() {
        // at alpha = 1 the table entry reduces to -2M/(q2)^3
        let g = schwarzschild(1.0).unwrap();
        let bundle = curvature(&g);
        let r1212 = &bundle.riemann_lowered[((0 * DIM + 1) * DIM + 0) * DIM + 1];
        let (r, p) = sweep_max_residual(&g.domain, 50, 17, |pt| {
            let v = r1212.eval(pt, 1.0)?;
            let expect = -2.0 / (pt[1] * pt[1] * pt[1]);
            Ok((v - expect).abs() / (1.0 + expect.abs()))
        })
        .unwrap();
        assert!(r < 1e-10, "R_1212 classical residual {r} at {p:?}");
    }

    #[test]
    fn riemann_symmetries_hold() {
        let g = schwarzschild(1.0).unwrap();
        let bundle = curvature(&g);
        let at = |i: usize, j: usize, k: usize, l: usize| {
            bundle.riemann_lowered[((i * DIM + j) * DIM + k) * DIM + l].clone()
        };
        let (r, p) = sweep_max_residual(&g.domain, 100, 19, |pt| {
            let mut worst = 0.0f64;
            for i in 0..DIM {
                for j in 0..DIM {
                    for k in 0..DIM {
                        for l in 0..DIM {
                            let v = at(i, j, k, l).eval(pt, 0.7)?;
                            let aji = at(j, i, k, l).eval(pt, 0.7)?;
                            let alk = at(i, j, l, k).eval(pt, 0.7)?;
                            let pair = at(k, l, i, j).eval(pt, 0.7)?;
                            worst = worst.max((v + aji).abs());
                            worst = worst.max((v + alk).abs());
                            worst = worst.max((v - pair).abs());
                            // first Bianchi
                            let b = v
                                + at(i, k, l, j).eval(pt, 0.7)?
                                + at(i, l, j, k).eval(pt, 0.7)?;
                            worst = worst.max(b.abs());
                        }
                    }
                }
            }
            Ok(worst)
        })
        .unwrap();
        assert!(r < 1e-9, "symmetry residual {r} at {p:?}");
    }

    #[test]
    fn schwarzschild_vacuum_at_alpha_one() {
        let g = schwarzschild(1.0).unwrap();
        let bundle = curvature(&g);
        let (r, p) = sweep_max_residual(&g.domain, 100, 23, |pt| {
            let mut worst = bundle.ricci_scalar.eval(pt, 1.0)?.abs();
            for e in &bundle.ricci {
                if !e.is_zero() {
                    worst = worst.max(e.eval(pt, 1.0)?.abs());
                }
            }
            Ok(worst)
        })
        .unwrap();
        assert!(r < 1e-9, "vacuum residual {r} at {p:?}");
    }

    #[test]
    fn contracted_bianchi_identity() {
        // div G^i_j = d_i G^i_j + Gamma^i_ik G^k_j - Gamma^k_ij G^i_k = 0
        for g in [schwarzschild(1.0).unwrap(), flrw(1.0, Expr::pow(Expr::coord(0), Expr::int(2))).unwrap()] {
            let bundle = curvature(&g);
            // mixed Einstein G^i_j = g^{ik} G_{kj}
            let mut mixed = vec![Expr::zero(); DIM * DIM];
            for i in 0..DIM {
                for j in 0..DIM {
                    let mut acc = Expr::zero();
                    for k in 0..DIM {
                        if bundle.inverse[i * DIM + k].is_zero() {
                            continue;
                        }
                        acc = Expr::add(
                            acc,
                            Expr::mul(
                                bundle.inverse[i * DIM + k].clone(),
                                bundle.einstein[k * DIM + j].clone(),
                            ),
                        );
                    }
                    mixed[i * DIM + j] = acc;
                }
            }
            let (r, p) = sweep_max_residual(&g.domain, 20, 29, |pt| {
                let mut worst = 0.0f64;
                for j in 0..DIM {
                    let mut acc = 0.0;
                    for i in 0..DIM {
                        acc += mixed[i * DIM + j].diff(i).eval(pt, 0.7)?;
                        for k in 0..DIM {
                            acc += gamma_at(&bundle.christoffel, i, i, k).eval(pt, 0.7)?
                                * mixed[k * DIM + j].eval(pt, 0.7)?;
                            acc -= gamma_at(&bundle.christoffel, k, i, j).eval(pt, 0.7)?
                                * mixed[i * DIM + k].eval(pt, 0.7)?;
                        }
                    }
                    worst = worst.max(acc.abs());
                }
                Ok(worst)
            })
            .unwrap();
            assert!(r < 1e-6, "{}: contracted Bianchi residual {r} at {p:?}", g.name);
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(schwarzschild(-1.0).is_err());
        assert!(builtin_metric("nosuch", None, None, None).is_err());
        assert!(flrw(0.0, Expr::coord(1)).is_err());
    }
}
