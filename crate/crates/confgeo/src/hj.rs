//! Hamilton-Jacobi separation constants for the deformed Schwarzschild
//! and FLRW systems, and the map onto the canonical (Q, P) chart where the
//! recursion-operator hierarchy lives.
//!
//! Each constant is produced both as a symbolic phase-space field (for the
//! `{H, c}_a = 0` first-integral checks and as flow monitors) and as a
//! plain number at a point. The momentum-to-constant inversions use the
//! positive-orthant branch throughout.

use thiserror::Error;

use crate::chart::momentum;
use crate::expr::{EvalError, Expr};
use crate::poisson::{h_flrw, h_schwarzschild};

#[derive(Debug, Clone, Error)]
pub enum HjError {
    #[error("negative radicand for {name}: {value}")]
    NegativeRadicand { name: &'static str, value: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Symbolic separation constants of one system, in presentation order.
#[derive(Debug, Clone)]
pub struct ConstantFields {
    pub names: Vec<&'static str>,
    pub fields: Vec<Expr>,
    pub hamiltonian: Expr,
}

impl ConstantFields {
    pub fn named(&self, name: &str) -> Option<&Expr> {
        self.names.iter().position(|n| *n == name).map(|i| &self.fields[i])
    }
}

/// Numeric values of the four constants at a phase point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantSet {
    pub names: Vec<&'static str>,
    pub values: Vec<f64>,
}

/// Q-part of the canonical chart, with boundary flags for zero radicands.
#[derive(Debug, Clone)]
pub struct CanonicalPoint {
    pub q: [f64; 4],
    /// true where a square root hit exactly zero (outside the open chart)
    pub boundary: [bool; 4],
}

fn q_pow(mu: usize, e: Expr) -> Expr {
    Expr::pow(Expr::coord(mu), e)
}

fn two_one_minus_alpha() -> Expr {
    Expr::mul(Expr::int(2), Expr::one_minus_alpha())
}

/// `G = (q^4)^(2(1-a)) p_4^2`, the azimuthal constant shared by both
/// systems.
pub fn g_field() -> Expr {
    Expr::mul(
        q_pow(3, two_one_minus_alpha()),
        Expr::pow(Expr::coord(momentum(3)), Expr::int(2)),
    )
}

/// `(q^3)^(2(1-a)) p_3^2 + G / sin^2 q^3` -- the polar combination that is
/// `K` for Schwarzschild and `L` for FLRW.
pub fn polar_field() -> Expr {
    Expr::add(
        Expr::mul(
            q_pow(2, two_one_minus_alpha()),
            Expr::pow(Expr::coord(momentum(2)), Expr::int(2)),
        ),
        Expr::div(
            g_field(),
            Expr::pow(Expr::sin(Expr::coord(2)), Expr::int(2)),
        ),
    )
}

/// Schwarzschild constants as symbolic fields: `E_S = H_Sa`,
/// `a = p_1 |q^1|^(1-a)`, `K` (polar form), `G`.
pub fn schwarzschild_fields(m: f64) -> ConstantFields {
    let h = h_schwarzschild(m);
    let a_const = Expr::mul(
        Expr::coord(momentum(0)),
        Expr::abs_coord_pow(0, Expr::one_minus_alpha()),
    );
    ConstantFields {
        names: vec!["ES", "a", "K", "G"],
        fields: vec![h.clone(), a_const, polar_field(), g_field()],
        hamiltonian: h,
    }
}

/// The radial form of the Schwarzschild `K`:
/// `2 E_S (q^2)^2 + (1-2M/q^2)^-1 (q^2)^2 a^2 - (1-2M/q^2)(q^2)^(2(2-a)) p_2^2`.
/// Agrees with the polar form identically in (q, p).
pub fn schwarzschild_k_radial(m: f64) -> Expr {
    let fields = schwarzschild_fields(m);
    let es = &fields.fields[0];
    let a_const = &fields.fields[1];
    let factor = Expr::sub(Expr::one(), Expr::div(Expr::real(2.0 * m), Expr::coord(1)));
    let r2 = Expr::pow(Expr::coord(1), Expr::int(2));
    Expr::sub(
        Expr::add(
            Expr::mul(Expr::mul(Expr::int(2), es.clone()), r2.clone()),
            Expr::mul(
                Expr::mul(Expr::pow(factor.clone(), Expr::int(-1)), r2),
                Expr::pow(a_const.clone(), Expr::int(2)),
            ),
        ),
        Expr::mul(
            Expr::mul(
                factor,
                q_pow(
                    1,
                    Expr::mul(
                        Expr::int(2),
                        Expr::sub(Expr::int(2), Expr::alpha()),
                    ),
                ),
            ),
            Expr::pow(Expr::coord(momentum(1)), Expr::int(2)),
        ),
    )
}

/// FLRW constants as symbolic fields: `E_F = H_Fa`, `K`, `L`, `G`.
pub fn flrw_fields(k: f64, r_of_q1: &Expr) -> ConstantFields {
    let h = h_flrw(k, r_of_q1);
    let l = polar_field();
    let curv = Expr::sub(
        Expr::one(),
        Expr::mul(Expr::real(k), Expr::pow(Expr::coord(1), Expr::int(2))),
    );
    let k_const = Expr::add(
        Expr::mul(
            Expr::mul(curv, q_pow(1, two_one_minus_alpha())),
            Expr::pow(Expr::coord(momentum(1)), Expr::int(2)),
        ),
        Expr::div(l.clone(), Expr::pow(Expr::coord(1), Expr::int(2))),
    );
    ConstantFields {
        names: vec!["EF", "K", "L", "G"],
        fields: vec![h.clone(), k_const, l, g_field()],
        hamiltonian: h,
    }
}

/// The radial form of the FLRW `K`:
/// `2 E_F R^2(q^1) + (q^1)^(2(1-a)) R^2(q^1) p_1^2`.
pub fn flrw_k_radial(k: f64, r_of_q1: &Expr) -> Expr {
    let h = h_flrw(k, r_of_q1);
    let r2 = Expr::pow(r_of_q1.clone(), Expr::int(2));
    Expr::add(
        Expr::mul(Expr::mul(Expr::int(2), h), r2.clone()),
        Expr::mul(
            Expr::mul(q_pow(0, two_one_minus_alpha()), r2),
            Expr::pow(Expr::coord(momentum(0)), Expr::int(2)),
        ),
    )
}

/// Evaluate the Schwarzschild constants at a phase point.
pub fn schwarzschild_constants(
    x: &[f64],
    alpha: f64,
    m: f64,
) -> Result<ConstantSet, HjError> {
    let fields = schwarzschild_fields(m);
    let values = fields
        .fields
        .iter()
        .map(|f| f.eval(x, alpha))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ConstantSet { names: fields.names, values })
}

/// Evaluate the FLRW constants at a phase point.
pub fn flrw_constants(
    x: &[f64],
    alpha: f64,
    k: f64,
    r_of_q1: &Expr,
) -> Result<ConstantSet, HjError> {
    let fields = flrw_fields(k, r_of_q1);
    let values = fields
        .fields
        .iter()
        .map(|f| f.eval(x, alpha))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ConstantSet { names: fields.names, values })
}

/// Map a constant set onto the canonical Q-chart:
/// Schwarzschild `(E_S, a, K, sqrt G)`, FLRW `(E_F, K, sqrt L, sqrt G)`.
pub fn canonical_constants(cs: &ConstantSet) -> Result<CanonicalPoint, HjError> {
    let mut q = [0.0f64; 4];
    let mut boundary = [false; 4];
    for (i, (&name, &v)) in cs.names.iter().zip(&cs.values).enumerate() {
        let takes_root = matches!(name, "G") || (matches!(name, "L") && cs.names.contains(&"EF"));
        if takes_root {
            if v < 0.0 {
                return Err(HjError::NegativeRadicand { name: if name == "G" { "sqrt(G)" } else { "sqrt(L)" }, value: v });
            }
            q[i] = v.sqrt();
            boundary[i] = v == 0.0;
        } else {
            q[i] = v;
        }
    }
    Ok(CanonicalPoint { q, boundary })
}
