//! Recursion operators: construction from a bivector/two-form pair,
//! Nijenhuis torsion, trace invariants, and the builtin (1,1)-tensors of
//! the deformed Minkowski phase space and the canonical charts.

use crate::chart::momentum;
use crate::expr::Expr;
use crate::fields::{Bivector, OneOneTensor, TwoForm, VectorField};
use crate::poisson::alpha_pow;

pub use crate::fields::nijenhuis_torsion;

const N: usize = 4;
const DIM: usize = 8;

/// `T = P2 . omega1` where `omega1` is the inverse of the first structure
/// (callers pass `w_a` for `P_a^{-1}`): `T^i_j = P2^{ki} (w)_{kj}`.
/// Supplying the pair's own inverse returns the identity.
pub fn recursion_from_pair(p2: &Bivector, omega1: &TwoForm) -> OneOneTensor {
    let dim = p2.dim();
    assert_eq!(omega1.dim(), dim);
    let mut t = OneOneTensor::zero(dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Expr::zero();
            for k in 0..dim {
                if p2.get(k, i).is_zero() || omega1.get(k, j).is_zero() {
                    continue;
                }
                acc = Expr::add(
                    acc,
                    Expr::mul(p2.get(k, i).clone(), omega1.get(k, j).clone()),
                );
            }
            t.set(i, j, acc);
        }
    }
    t
}

/// Trace of the h-th power of a (1,1)-tensor as a scalar field.
pub fn trace_power(t: &OneOneTensor, h: u32) -> Expr {
    t.trace_power(h)
}

/// The Lemma-1 tensor on the abstract 2n-chart:
/// `T_a = sum_i |x_i|^(a-1) x_i (d/dx_i (x) dx_i + d/dx_{n+i} (x) dx_{n+i})`.
pub fn t_alpha_abstract() -> OneOneTensor {
    let mut diag = Vec::with_capacity(DIM);
    for i in 0..N {
        diag.push(lemma_coefficient(i));
    }
    for i in 0..N {
        diag.push(lemma_coefficient(i));
    }
    OneOneTensor::from_diagonal(diag)
}

fn lemma_coefficient(i: usize) -> Expr {
    Expr::mul(
        Expr::abs_coord_pow(i, Expr::alpha_minus_one()),
        Expr::coord(i),
    )
}

/// The Lemma-1 vector fields
/// `X_{a_i} = -|x_i|^(1-a) |x_{n+i}|^(1-a) d/dx_{n+i}`.
pub fn x_alpha_i_abstract(i: usize) -> VectorField {
    assert!(i < N);
    let mut x = VectorField::zero(DIM);
    x.components[momentum(i)] = Expr::neg(Expr::mul(
        Expr::abs_coord_pow(i, Expr::one_minus_alpha()),
        Expr::abs_coord_pow(momentum(i), Expr::one_minus_alpha()),
    ));
    x
}

/// The Minkowski recursion operator `T_a = P_a1 . P_a^{-1}` in closed
/// form: block mu carries
/// `+-a^2 p_mu^3 |p_mu|^(a-1) |q^mu|^((-2+a^2+a)/(1+a))` on both the q and
/// p diagonal slots (plus sign for mu = 1, minus for mu = 2..4).
pub fn t_alpha_minkowski_display() -> OneOneTensor {
    let mut diag = vec![Expr::zero(); DIM];
    for mu in 0..N {
        let sign = if mu == 0 { Expr::one() } else { Expr::int(-1) };
        let exponent = Expr::div(
            Expr::add(
                Expr::add(Expr::int(-2), Expr::pow(Expr::alpha(), Expr::int(2))),
                Expr::alpha(),
            ),
            Expr::add(Expr::one(), Expr::alpha()),
        );
        let entry = Expr::mul(
            sign,
            Expr::mul(
                alpha_pow(2),
                Expr::mul(
                    Expr::mul(
                        Expr::pow(Expr::coord(momentum(mu)), Expr::int(3)),
                        Expr::abs_coord_pow(momentum(mu), Expr::alpha_minus_one()),
                    ),
                    Expr::abs_coord_pow(mu, exponent),
                ),
            ),
        );
        diag[mu] = entry.clone();
        diag[momentum(mu)] = entry;
    }
    OneOneTensor::from_diagonal(diag)
}

/// The canonical-chart recursion operator shared by the Schwarzschild and
/// FLRW constructions: `T = sum |Q^mu|^(a-1) Q^mu ( dP (x) dP + dQ (x) dQ )`.
pub fn t_canonical() -> OneOneTensor {
    t_alpha_abstract()
}
