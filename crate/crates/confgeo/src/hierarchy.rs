//! The master-symmetry hierarchy on the canonical (Q, P) chart.
//!
//! The chart carries the Hamiltonian `H_a = Q^1`, the standard deformed
//! structures `w_a`, `P_a`, and the diagonal recursion operator
//! `T_a = sum |Q^mu|^(a-1) Q^mu (...)`. From the master integrals
//! `H~_{a_j}` one obtains master symmetries `Z_{a_j}`, the scaled
//! bivectors `P^{k+1}_{a_1} = S_{k+1} P_{a_1}` with
//! `S_{k+1} = (1 - k a)/(1 - (k+1) a)`, and the whole `(k, l)`-indexed
//! families generated by powers of `T_{(k+1)a}`. The `oevel_suite`
//! evaluates every scaling identity the hierarchy satisfies and reports
//! the worst residuals; `generalized_bracket_bivector` extends the
//! construction to the two-parameter family `{., .}^{k+t}_{a_t}`.

use thiserror::Error;

use crate::chart::momentum;
use crate::domain::DomainBox;
use crate::expr::{EvalError, Expr};
use crate::fields::{
    d_scalar, lie_bivector, lie_one_one, lie_scalar, lie_two_form, lie_vector, pairing, Bivector,
    OneOneTensor, TwoForm, VectorField,
};
use crate::poisson::{alpha_pow, hamiltonian_field_for, omega_alpha, p_alpha};
use crate::recursion::t_canonical;
use crate::sample::sweep_max_residual;

const N: usize = 4;
const DIM: usize = 8;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum HierarchyError {
    #[error("scaling constraint violated: 1 - {denom_index} * alpha = 0 at alpha = {alpha}")]
    ScalingConstraint { denom_index: u32, alpha: f64 },
}

/// `S_{k+1} = (1 - k a) / (1 - (k+1) a)` as an expression in alpha.
pub fn s_factor(k: u32) -> Expr {
    Expr::div(
        Expr::sub(Expr::one(), Expr::mul(Expr::int(k as i64), Expr::alpha())),
        Expr::sub(
            Expr::one(),
            Expr::mul(Expr::int(k as i64 + 1), Expr::alpha()),
        ),
    )
}

/// Numeric guard for the scaling constraint `1 - (k+1) a != 0`.
pub fn check_s_constraint(k: u32, alpha: f64) -> Result<(), HierarchyError> {
    if (1.0 - (k as f64 + 1.0) * alpha).abs() < 1e-12 {
        return Err(HierarchyError::ScalingConstraint { denom_index: k + 1, alpha });
    }
    Ok(())
}

/// `S_{k+t}` for the generalized bracket, with its own constraint.
pub fn s_factor_general(k: u32, t: u32) -> Expr {
    Expr::div(
        Expr::sub(Expr::one(), Expr::mul(Expr::int(k as i64), Expr::alpha())),
        Expr::sub(
            Expr::one(),
            Expr::mul(Expr::int((k + t) as i64), Expr::alpha()),
        ),
    )
}

pub fn check_s_general_constraint(k: u32, t: u32, alpha: f64) -> Result<(), HierarchyError> {
    if (1.0 - (k + t) as f64 * alpha).abs() < 1e-12 {
        return Err(HierarchyError::ScalingConstraint { denom_index: k + t, alpha });
    }
    Ok(())
}

/// Hamiltonian of the canonical chart, `H_a = Q^1`.
pub fn h_canonical() -> Expr {
    Expr::coord(0)
}

/// Family member `H_{a_k} = (Q^1)^(1 - k a)`; `H_{a_0} = H_a`.
pub fn h_family(k: u32) -> Expr {
    Expr::pow(
        Expr::coord(0),
        Expr::sub(Expr::one(), Expr::mul(Expr::int(k as i64), Expr::alpha())),
    )
}

/// Master integrals
/// `H~_{a_j} = -sum_mu a |Q^mu|^(a(1-j) - 1) Q^mu |P_mu|^(a-1) P_mu`.
pub fn htilde(j: u32) -> Expr {
    let mut acc = Expr::zero();
    for mu in 0..N {
        let qexp = Expr::sub(
            Expr::mul(
                Expr::alpha(),
                Expr::sub(Expr::one(), Expr::int(j as i64)),
            ),
            Expr::one(),
        );
        acc = Expr::add(
            acc,
            Expr::mul(
                Expr::mul(Expr::abs_coord_pow(mu, qexp), Expr::coord(mu)),
                Expr::mul(
                    Expr::abs_coord_pow(momentum(mu), Expr::alpha_minus_one()),
                    Expr::coord(momentum(mu)),
                ),
            ),
        );
    }
    Expr::neg(Expr::mul(Expr::alpha(), acc))
}

/// Master symmetries
/// `Z_{a_j} = {H~_{a_j}, .}_a
///  = sum_mu |Q^mu|^(-a j) ((1-j) P_mu d/dP_mu - Q^mu d/dQ^mu)`.
pub fn z_field(j: u32) -> VectorField {
    let mut z = VectorField::zero(DIM);
    for mu in 0..N {
        let w = Expr::abs_coord_pow(
            mu,
            Expr::neg(Expr::mul(Expr::alpha(), Expr::int(j as i64))),
        );
        z.components[momentum(mu)] = Expr::mul(
            w.clone(),
            Expr::mul(
                Expr::sub(Expr::one(), Expr::int(j as i64)),
                Expr::coord(momentum(mu)),
            ),
        );
        z.components[mu] = Expr::neg(Expr::mul(w, Expr::coord(mu)));
    }
    z
}

/// The conformal symmetry `Z_{a_0} = sum (P d/dP - Q d/dQ)`.
pub fn z0() -> VectorField {
    z_field(0)
}

/// Family member
/// `X_{a_i} = {H_{a_i}, .}_a
///  = -a^-2 (1 - i a) |Q^1|^(1 - a(i+1)) |P_1|^(1-a) d/dP_1`.
pub fn x_family(i: u32) -> VectorField {
    let mut x = VectorField::zero(DIM);
    x.components[momentum(0)] = Expr::neg(Expr::mul(
        Expr::mul(
            alpha_pow(-2),
            Expr::sub(Expr::one(), Expr::mul(Expr::int(i as i64), Expr::alpha())),
        ),
        Expr::mul(
            Expr::abs_coord_pow(
                0,
                Expr::sub(
                    Expr::one(),
                    Expr::mul(Expr::alpha(), Expr::int(i as i64 + 1)),
                ),
            ),
            Expr::abs_coord_pow(momentum(0), Expr::one_minus_alpha()),
        ),
    ));
    x
}

/// The closed form the bracket `[X_{a_i}, Z_{a_j}]` lands on:
/// `-a^-2 (1 - a i)(1 - (i+j) a) |Q^1|^(1 - a(i+j+1)) |P_1|^(1-a) d/dP_1`
/// -- the `x_family(i + j)` member carrying an extra `(1 - i a)`.
pub fn x_bracket_display(i: u32, j: u32) -> VectorField {
    let pref = Expr::sub(Expr::one(), Expr::mul(Expr::int(i as i64), Expr::alpha()));
    x_family(i + j).scale(pref)
}

/// Pairing display `{H_{a_i}, H~_{a_j}}_a = (1 - a i) (Q^1)^(1 - a(i+j))`.
pub fn h_bracket_display(i: u32, j: u32) -> Expr {
    Expr::mul(
        Expr::sub(Expr::one(), Expr::mul(Expr::int(i as i64), Expr::alpha())),
        h_family(i + j),
    )
}

/// Canonical-chart second bivector
/// `P_{a_1} = sum a^-2 Q^mu |P_mu|^(1-a) dP ^ dQ` (unscaled).
pub fn p_alpha1_canonical() -> Bivector {
    Bivector::from_conjugate_pairs(
        (0..N)
            .map(|mu| {
                Expr::mul(
                    alpha_pow(-2),
                    Expr::mul(
                        Expr::coord(mu),
                        Expr::abs_coord_pow(momentum(mu), Expr::one_minus_alpha()),
                    ),
                )
            })
            .collect(),
    )
}

/// `P^{k+1}_{a_1} = S_{k+1} P_{a_1}`.
pub fn p_k1(k: u32) -> Bivector {
    p_alpha1_canonical().scale(s_factor(k))
}

/// `w^{k+1}_{a_1} = sum a^2 S_{k+1}^-1 (Q^mu)^-1 |P_mu|^(a-1) dP ^ dQ`,
/// the inverse of [`p_k1`].
pub fn omega_k1(k: u32) -> TwoForm {
    TwoForm::from_conjugate_pairs(
        (0..N)
            .map(|mu| {
                Expr::mul(
                    Expr::div(alpha_pow(2), s_factor(k)),
                    Expr::mul(
                        Expr::pow(Expr::coord(mu), Expr::int(-1)),
                        Expr::abs_coord_pow(momentum(mu), Expr::alpha_minus_one()),
                    ),
                )
            })
            .collect(),
    )
}

/// `T_{(k+1)a} = P^{k+1}_{a_1} . P_a^{-1} = S_{k+1} T_a`.
pub fn t_k1(k: u32) -> OneOneTensor {
    t_canonical().scale(s_factor(k))
}

/// `X^{k+1}_{a_l} = T^l X_a`.
pub fn x_kl(k: u32, l: u32) -> VectorField {
    t_k1(k).power(l).apply_vector(&x_family(0))
}

/// `Z^{k+1}_{a_l} = T^l Z_{a_0}`.
pub fn z_kl(k: u32, l: u32) -> VectorField {
    t_k1(k).power(l).apply_vector(&z0())
}

/// `P^{k+1}_{a_l} = T^l P_a`.
pub fn p_kl(k: u32, l: u32) -> Bivector {
    t_k1(k).power(l).apply_bivector(&p_alpha())
}

/// `w^{k+1}_{a_l} = (T^l)* w_a`.
pub fn omega_kl(k: u32, l: u32) -> TwoForm {
    t_k1(k).power(l).pullback_two_form(&omega_alpha())
}

/// `H^{k+1}_{a_l} = S^l (Q^1)^(a l + 1) / (l a + 1)`.
pub fn h_kl(k: u32, l: u32) -> Expr {
    Expr::mul(
        Expr::div(
            Expr::pow(s_factor(k), Expr::int(l as i64)),
            Expr::add(
                Expr::mul(Expr::int(l as i64), Expr::alpha()),
                Expr::one(),
            ),
        ),
        Expr::pow(
            Expr::coord(0),
            Expr::add(
                Expr::mul(Expr::alpha(), Expr::int(l as i64)),
                Expr::one(),
            ),
        ),
    )
}

/// `dH^{k+1}_{a_l} = (T^l)* dH_a = S^l (Q^1)^(a l) dQ^1`.
pub fn dh_kl(k: u32, l: u32) -> crate::fields::OneForm {
    t_k1(k).power(l).pullback_one_form(&d_scalar(&h_canonical(), DIM))
}

/// Generalized bracket bivector:
/// `{f,g}^{k+t}_{a_t} = sum a^-2 S_{k+t} |Q^mu|^(1 + a(t-1)) |P_mu|^(1-a) (...)`.
pub fn generalized_bracket_bivector(k: u32, t: u32) -> Bivector {
    Bivector::from_conjugate_pairs(
        (0..N)
            .map(|mu| {
                Expr::mul(
                    Expr::mul(alpha_pow(-2), s_factor_general(k, t)),
                    Expr::mul(
                        Expr::abs_coord_pow(
                            mu,
                            Expr::add(
                                Expr::one(),
                                Expr::mul(
                                    Expr::alpha(),
                                    Expr::sub(Expr::int(t as i64), Expr::one()),
                                ),
                            ),
                        ),
                        Expr::abs_coord_pow(momentum(mu), Expr::one_minus_alpha()),
                    ),
                )
            })
            .collect(),
    )
}

/// One identity's verification outcome.
#[derive(Debug, Clone)]
pub struct IdentityResidual {
    pub name: String,
    pub max_residual: f64,
    pub worst_point: Vec<f64>,
}

pub(crate) fn vector_pairs(a: &VectorField, b: &VectorField) -> Vec<(Expr, Expr)> {
    a.components.iter().cloned().zip(b.components.iter().cloned()).collect()
}

pub(crate) fn rank2_pairs<T: Rank2>(a: &T, b: &T) -> Vec<(Expr, Expr)> {
    let mut out = Vec::new();
    for i in 0..a.dim2() {
        for j in 0..a.dim2() {
            let (x, y) = (a.at(i, j), b.at(i, j));
            if x.is_zero() && y.is_zero() {
                continue;
            }
            out.push((x.clone(), y.clone()));
        }
    }
    out
}

pub(crate) trait Rank2 {
    fn dim2(&self) -> usize;
    fn at(&self, i: usize, j: usize) -> &Expr;
}

impl Rank2 for Bivector {
    fn dim2(&self) -> usize {
        self.dim()
    }
    fn at(&self, i: usize, j: usize) -> &Expr {
        self.get(i, j)
    }
}

impl Rank2 for TwoForm {
    fn dim2(&self) -> usize {
        self.dim()
    }
    fn at(&self, i: usize, j: usize) -> &Expr {
        self.get(i, j)
    }
}

impl Rank2 for OneOneTensor {
    fn dim2(&self) -> usize {
        self.dim()
    }
    fn at(&self, i: usize, j: usize) -> &Expr {
        self.get(i, j)
    }
}

pub(crate) fn run_pairs(
    name: String,
    pairs: Vec<(Expr, Expr)>,
    bx: &DomainBox,
    n: usize,
    seed: u64,
    alpha: f64,
) -> Result<IdentityResidual, EvalError> {
    let (max_residual, worst_point) = sweep_max_residual(bx, n, seed, |p| {
        let mut worst = 0.0f64;
        for (a, b) in &pairs {
            let va = a.eval(p, alpha)?;
            let vb = b.eval(p, alpha)?;
            worst = worst.max(crate::sample::residual(va, vb));
        }
        Ok(worst)
    })?;
    Ok(IdentityResidual { name, max_residual, worst_point })
}

/// Evaluate the full set of Oevel-type identities for all `k <= k_max`,
/// `l, h <= lh_max` (skipping k that violate the scaling constraint) and
/// report per-identity worst residuals. The checked relations are
///
/// ```text
/// L_{Z_l} Z_h   =  a (l - h)   Z_{l+h}
/// L_{Z_l} X_h   = -(h a + 1)   X_{l+h}
/// L_{Z_l} P_h   =  a (l - h)   P_{l+h}
/// L_{Z_l} w_h   = -a (l + h)   w_{l+h}
/// <dH_l, Z_h>   = -(a (l+h)+1) H_{l+h}
/// L_{Z_l} T     = -a T^{l+1}
/// ```
///
/// which are the coefficient-form relations with
/// `(alpha~, beta~, gamma~) = (0, -a, -1)`.
pub fn oevel_suite(
    k_max: u32,
    lh_max: u32,
    bx: &DomainBox,
    n: usize,
    seed: u64,
    alpha: f64,
) -> Result<Vec<IdentityResidual>, EvalError> {
    let mut out = Vec::new();
    let a = Expr::alpha;
    for k in 0..=k_max {
        if check_s_constraint(k, alpha).is_err() {
            continue;
        }
        let t = t_k1(k);
        for l in 0..=lh_max {
            let zl = z_kl(k, l);
            for h in 0..=lh_max {
                let coef_zz = Expr::mul(
                    a(),
                    Expr::sub(Expr::int(l as i64), Expr::int(h as i64)),
                );
                let lhs = lie_vector(&zl, &z_kl(k, h));
                let rhs = z_kl(k, l + h).scale(coef_zz.clone());
                out.push(run_pairs(
                    format!("oevel.L_Z{l}(Z{h}) = a(l-h) Z{} [k={k}]", l + h),
                    vector_pairs(&lhs, &rhs),
                    bx,
                    n,
                    seed,
                    alpha,
                )?);

                let coef_zx = Expr::neg(Expr::add(
                    Expr::mul(Expr::int(h as i64), a()),
                    Expr::one(),
                ));
                let lhs = lie_vector(&zl, &x_kl(k, h));
                let rhs = x_kl(k, l + h).scale(coef_zx);
                out.push(run_pairs(
                    format!("oevel.L_Z{l}(X{h}) = -(ha+1) X{} [k={k}]", l + h),
                    vector_pairs(&lhs, &rhs),
                    bx,
                    n,
                    seed,
                    alpha,
                )?);

                let lhs = lie_bivector(&zl, &p_kl(k, h));
                let rhs = p_kl(k, l + h).scale(coef_zz.clone());
                out.push(run_pairs(
                    format!("oevel.L_Z{l}(P{h}) = a(l-h) P{} [k={k}]", l + h),
                    rank2_pairs(&lhs, &rhs),
                    bx,
                    n,
                    seed,
                    alpha,
                )?);

                let coef_zw = Expr::neg(Expr::mul(a(), Expr::int((l + h) as i64)));
                let lhs = lie_two_form(&zl, &omega_kl(k, h));
                let rhs = omega_kl(k, l + h).scale(coef_zw);
                out.push(run_pairs(
                    format!("oevel.L_Z{l}(w{h}) = -a(l+h) w{} [k={k}]", l + h),
                    rank2_pairs(&lhs, &rhs),
                    bx,
                    n,
                    seed,
                    alpha,
                )?);

                let coef_h = Expr::neg(Expr::add(
                    Expr::mul(a(), Expr::int((l + h) as i64)),
                    Expr::one(),
                ));
                let lhs = pairing(&dh_kl(k, l), &z_kl(k, h));
                let rhs = Expr::mul(coef_h, h_kl(k, l + h));
                out.push(run_pairs(
                    format!("oevel.<dH{l}, Z{h}> = -(a(l+h)+1) H{} [k={k}]", l + h),
                    vec![(lhs, rhs)],
                    bx,
                    n,
                    seed,
                    alpha,
                )?);
            }
            let lhs = lie_one_one(&zl, &t);
            let rhs = t.power(l + 1).scale(Expr::neg(a()));
            out.push(run_pairs(
                format!("oevel.L_Z{l}(T) = -a T^{} [k={k}]", l + 1),
                rank2_pairs(&lhs, &rhs),
                bx,
                n,
                seed,
                alpha,
            )?);
        }
    }
    Ok(out)
}

/// The three conformal-symmetry statements for `Z_{a_0}`, returned with
/// the recovered coefficients `(alpha~, beta~, gamma~)`; exact values are
/// `(0, -alpha, -1)`.
pub fn conformal_coefficients(
    k: u32,
    bx: &DomainBox,
    n: usize,
    seed: u64,
    alpha: f64,
) -> Result<(Vec<IdentityResidual>, [f64; 3]), EvalError> {
    let z = z0();
    let mut out = Vec::new();

    // L_{Z_0} P_a = alpha~ P_a with alpha~ = 0
    let lp = lie_bivector(&z, &p_alpha());
    out.push(run_pairs(
        "conformal.L_Z0(P_a) = 0".into(),
        rank2_pairs(&lp, &Bivector::zero(DIM)),
        bx,
        n,
        seed,
        alpha,
    )?);

    // L_{Z_0} P^{k+1}_{a1} = beta~ P^{k+1}_{a1} with beta~ = -alpha
    let pk = p_k1(k);
    let lpk = lie_bivector(&z, &pk);
    let rhs = pk.scale(Expr::neg(Expr::alpha()));
    out.push(run_pairs(
        format!("conformal.L_Z0(P^{}_a1) = -a P^{}_a1", k + 1, k + 1),
        rank2_pairs(&lpk, &rhs),
        bx,
        n,
        seed,
        alpha,
    )?);

    // L_{Z_0} H_a = gamma~ H_a with gamma~ = -1
    let lh = lie_scalar(&z, &h_canonical());
    out.push(run_pairs(
        "conformal.L_Z0(H_a) = -H_a".into(),
        vec![(lh.clone(), Expr::neg(h_canonical()))],
        bx,
        n,
        seed,
        alpha,
    )?);

    // recover the coefficients at one sample point by taking ratios
    let point = bx.sample_point(seed, 0);
    let alpha_t = {
        let num = lp.get(momentum(0), 0).eval(&point, alpha)?;
        let den = p_alpha().get(momentum(0), 0).eval(&point, alpha)?;
        num / den
    };
    let beta_t = {
        let num = lpk.get(momentum(0), 0).eval(&point, alpha)?;
        let den = pk.get(momentum(0), 0).eval(&point, alpha)?;
        num / den
    };
    let gamma_t = {
        let num = lh.eval(&point, alpha)?;
        let den = h_canonical().eval(&point, alpha)?;
        num / den
    };
    Ok((out, [alpha_t, beta_t, gamma_t]))
}

/// Bi-Hamiltonian identity of the generalized brackets:
/// `X_{a_k} = {H_{a_k}, .}_a = {H_{a_{k+t}}, .}^{k+t}_{a_t}`.
pub fn generalized_bracket_identity(
    k: u32,
    t: u32,
    bx: &DomainBox,
    n: usize,
    seed: u64,
    alpha: f64,
) -> Result<IdentityResidual, EvalError> {
    let via_standard = hamiltonian_field_for(&p_alpha(), &h_family(k));
    let via_general = hamiltonian_field_for(&generalized_bracket_bivector(k, t), &h_family(k + t));
    run_pairs(
        format!("generalized.X_a{k} = {{H_a{}, .}}^{}_a{t}", k + t, k + t),
        vector_pairs(&via_standard, &via_general),
        bx,
        n,
        seed,
        alpha,
    )
}
