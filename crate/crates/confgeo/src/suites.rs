//! Named verification suites.
//!
//! Each suite bundles the property checks of one statement family into a
//! [`SuiteReport`]; the command-line `verify` subcommand and the
//! acceptance tests both run these. All randomness is derived from the
//! configured seed, so reports are byte-reproducible.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::domain::DomainBox;
use crate::expr::{EvalError, Expr};
use crate::fields::{
    d_scalar, interior_product, lie_one_one, lie_scalar, lie_two_form, lie_vector,
    nijenhuis_torsion, schouten_bracket,
};
use crate::hierarchy::{
    check_s_constraint, check_s_general_constraint, conformal_coefficients,
    generalized_bracket_identity, h_bracket_display, h_family, oevel_suite, p_k1,
    x_bracket_display, x_family, z_field,
};
use crate::hj::{flrw_fields, flrw_k_radial, schwarzschild_fields, schwarzschild_k_radial};
use crate::metric::{flrw, schwarzschild};
use crate::oracle::{check_metric_against_table, parse_table, OracleEntry, ORACLE_TABLE};
use crate::poisson::{
    h_alpha, hamiltonian_vector_field, l_alpha, ltilde_alpha, omega_alpha, omega_alpha1, p_alpha,
    p_alpha1, poisson_bracket_alpha, x_alpha1_display, PHASE_DIM,
};
use crate::recursion::{t_alpha_abstract, x_alpha_i_abstract};
use crate::report::{IdentityReport, SuiteReport};
use crate::sample::{residual, sweep_max_residual};

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub alpha: f64,
    pub seed: u64,
    pub n: usize,
    pub tol: f64,
    /// metric selector for the suites that take one (`appendix`, `hj`)
    pub metric: Option<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { alpha: 0.7, seed: 42, n: 100, tol: 1e-9, metric: None }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("unknown suite `{0}` (expected one of {})", SUITE_NAMES.join(", "))]
    UnknownSuite(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Oracle(#[from] crate::oracle::OracleError),
}

pub const SUITE_NAMES: [&str; 9] = [
    "lemma1",
    "jacobi",
    "morphism",
    "noether",
    "schouten",
    "appendix",
    "oevel",
    "hierarchy",
    "hj",
];

/// Run a suite by name.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport, SuiteError> {
    let results = match name {
        "lemma1" => lemma1(cfg)?,
        "jacobi" => jacobi(cfg)?,
        "morphism" => morphism(cfg)?,
        "noether" => noether(cfg)?,
        "schouten" => schouten(cfg)?,
        "appendix" => appendix(cfg)?,
        "oevel" => oevel(cfg)?,
        "hierarchy" => hierarchy(cfg)?,
        "hj" => hj(cfg)?,
        other => return Err(SuiteError::UnknownSuite(other.to_string())),
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        alpha: cfg.alpha,
        seed: cfg.seed,
        n: cfg.n,
        tol: cfg.tol,
        results,
    })
}

fn bx() -> DomainBox {
    DomainBox::default_phase()
}

fn check_pairs(
    name: impl Into<String>,
    pairs: &[(Expr, Expr)],
    bx: &DomainBox,
    cfg: &SuiteConfig,
) -> Result<IdentityReport, EvalError> {
    let (max_residual, worst_point) = sweep_max_residual(bx, cfg.n, cfg.seed, |p| {
        let mut worst = 0.0f64;
        for (a, b) in pairs {
            let va = a.eval(p, cfg.alpha)?;
            let vb = b.eval(p, cfg.alpha)?;
            worst = worst.max(residual(va, vb));
        }
        Ok(worst)
    })?;
    Ok(IdentityReport { name: name.into(), max_residual, worst_point })
}

fn vector_zero_pairs(v: &crate::fields::VectorField) -> Vec<(Expr, Expr)> {
    v.components
        .iter()
        .filter(|e| !e.is_zero())
        .map(|e| (e.clone(), Expr::zero()))
        .collect()
}

fn lemma1(cfg: &SuiteConfig) -> Result<Vec<IdentityReport>, SuiteError> {
    let mut out = Vec::new();
    let t = t_alpha_abstract();
    let torsion = nijenhuis_torsion(&t);
    let pairs: Vec<_> = torsion
        .into_iter()
        .filter(|e| !e.is_zero())
        .map(|e| (e, Expr::zero()))
        .collect();
    out.push(check_pairs("N_T(T_a) = 0", &pairs, &bx(), cfg)?);
    for i in 0..4 {
        let lt = lie_one_one(&x_alpha_i_abstract(i), &t);
        let mut pairs = Vec::new();
        for a in 0..PHASE_DIM {
            for b in 0..PHASE_DIM {
                if !lt.get(a, b).is_zero() {
                    pairs.push((lt.get(a, b).clone(), Expr::zero()));
                }
            }
        }
        out.push(check_pairs(format!("L_X{}(T_a) = 0", i + 1), &pairs, &bx(), cfg)?);
    }
    Ok(out)
}

/// Seeded degree-<=3 polynomial over the 8 phase coordinates.
pub fn random_polynomial(rng: &mut ChaCha8Rng) -> Expr {
    let terms = rng.gen_range(3..=5);
    let mut acc = Expr::zero();
    for _ in 0..terms {
        let mut t = Expr::rat(rng.gen_range(1..=4), rng.gen_range(1..=3));
        if rng.gen_bool(0.5) {
            t = Expr::neg(t);
        }
        let degree = rng.gen_range(0..=3);
        for _ in 0..degree {
            t = Expr::mul(t, Expr::coord(rng.gen_range(0..PHASE_DIM)));
        }
        acc = Expr::add(acc, t);
    }
    acc
}

/// The shared corpus for the bracket-algebra suites: 25 triples.
pub fn polynomial_triples(seed: u64) -> Vec<[Expr; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0FFEE);
    (0..25)
        .map(|_| {
            [
                random_polynomial(&mut rng),
                random_polynomial(&mut rng),
                random_polynomial(&mut rng),
            ]
        })
        .collect()
}

fn jacobi(cfg: &SuiteConfig) -> Result<Vec<IdentityReport>, SuiteError> {
    let triples = polynomial_triples(cfg.seed);
    let bxx = bx();
    let points = 20.min(cfg.n);
    let mut out = Vec::new();

    // antisymmetry over the corpus (exact by construction of the bracket)
    let mut anti = Vec::new();
    for [f, g, _] in &triples {
        anti.push((
            Expr::add(poisson_bracket_alpha(f, g), poisson_bracket_alpha(g, f)),
            Expr::zero(),
        ));
    }
    let mut sub = cfg.clone();
    sub.n = points;
    out.push(check_pairs("antisymmetry {f,g}+{g,f} = 0", &anti, &bxx, &sub)?);

    // Jacobi, normalized by the size of the individual cyclic terms
    let mut jacobi_terms = Vec::new();
    for [f, g, h] in &triples {
        let t1 = poisson_bracket_alpha(f, &poisson_bracket_alpha(g, h));
        let t2 = poisson_bracket_alpha(g, &poisson_bracket_alpha(h, f));
        let t3 = poisson_bracket_alpha(h, &poisson_bracket_alpha(f, g));
        jacobi_terms.push([t1, t2, t3]);
    }
    let (max_residual, worst_point) = sweep_max_residual(&bxx, points, cfg.seed, |p| {
        let mut worst = 0.0f64;
        for [t1, t2, t3] in &jacobi_terms {
            let (a, b, c) =
                (t1.eval(p, cfg.alpha)?, t2.eval(p, cfg.alpha)?, t3.eval(p, cfg.alpha)?);
            let scale = a.abs().max(b.abs()).max(c.abs()).max(1.0);
            worst = worst.max((a + b + c).abs() / scale);
        }
        Ok(worst)
    })?;
    out.push(IdentityReport {
        name: "jacobi {f,{g,h}} + cyclic = 0".into(),
        max_residual,
        worst_point,
    });

    // Leibniz
    let mut leibniz = Vec::new();
    for [f, g, h] in &triples {
        let lhs = poisson_bracket_alpha(f, &Expr::mul(g.clone(), h.clone()));
        let rhs = Expr::add(
            Expr::mul(g.clone(), poisson_bracket_alpha(f, h)),
            Expr::mul(poisson_bracket_alpha(f, g), h.clone()),
        );
        leibniz.push((lhs, rhs));
    }
    out.push(check_pairs("leibniz {f,gh} = g{f,h} + {f,g}h", &leibniz, &bxx, &sub)?);
    Ok(out)
}

fn morphism(cfg: &SuiteConfig) -> Result<Vec<IdentityReport>, SuiteError> {
    let triples = polynomial_triples(cfg.seed);
    let bxx = bx();
    let mut sub = cfg.clone();
    sub.n = 20.min(cfg.n);
    let mut pairs = Vec::new();
    for [f, g, _] in &triples {
        let xf = hamiltonian_vector_field(f);
        let xg = hamiltonian_vector_field(g);
        let comm = lie_vector(&xf, &xg);
        let xfg = hamiltonian_vector_field(&poisson_bracket_alpha(f, g));
        for (a, b) in comm.components.into_iter().zip(xfg.components) {
            if a.is_zero() && b.is_zero() {
                continue;
            }
            pairs.push((a, b));
        }
    }
    Ok(vec![check_pairs(
        "[X_f, X_g] = X_{{f,g}}",
        &pairs,
        &bxx,
        &sub,
    )?])
}

fn noether(cfg: &SuiteConfig) -> Result<Vec<IdentityReport>, SuiteError> {
    let bxx = bx();
    let mut out = Vec::new();
    let x1 = x_alpha1_display();
    let w = omega_alpha();

    let lw = lie_two_form(&x1, &w);
    let mut pairs = Vec::new();
    for i in 0..PHASE_DIM {
        for j in 0..PHASE_DIM {
            if !lw.get(i, j).is_zero() {
                pairs.push((lw.get(i, j).clone(), Expr::zero()));
            }
        }
    }
    out.push(check_pairs("L_X_a1(w_a) = 0", &pairs, &bxx, cfg)?);

    let lh = lie_scalar(&x1, &h_alpha());
    out.push(check_pairs("L_X_a1(H_a) = 0", &[(lh, Expr::zero())], &bxx, cfg)?);

    let x = hamiltonian_vector_field(&h_alpha());
    let comm = lie_vector(&x, &x1);
    out.push(check_pairs("[X_a, X_a1] = 0", &vector_zero_pairs(&comm), &bxx, cfg)?);

    let lhs = interior_product(&x1, &w);
    let dl = d_scalar(&l_alpha(), PHASE_DIM);
    let pairs: Vec<_> = lhs
        .components
        .into_iter()
        .zip(dl.components.into_iter().map(|e| Expr::neg(e)))
        .collect();
    out.push(check_pairs("i_X_a1(w_a) + dL_a = 0", &pairs, &bxx, cfg)?);
    Ok(out)
}

fn schouten(cfg: &SuiteConfig) -> Result<Vec<IdentityReport>, SuiteError> {
    let bxx = bx();
    let mut out = Vec::new();
    let pa = p_alpha();
    let pa1 = p_alpha1();

    for (name, a, b) in [
        ("[P_a, P_a]_NS = 0", &pa, &pa),
        ("[P_a, P_a1]_NS = 0", &pa, &pa1),
    ] {
        let s = schouten_bracket(a, b);
        let mut pairs = Vec::new();
        for i in 0..PHASE_DIM {
            for j in 0..PHASE_DIM {
                for k in 0..PHASE_DIM {
                    if !s.get(i, j, k).is_zero() {
                        pairs.push((s.get(i, j, k).clone(), Expr::zero()));
                    }
                }
            }
        }
        out.push(check_pairs(name, &pairs, &bxx, cfg)?);
    }

    // bi-Hamiltonian pair identities
    let x = hamiltonian_vector_field(&h_alpha());
    let lhs = interior_product(&x, &omega_alpha());
    let dh = d_scalar(&h_alpha(), PHASE_DIM);
    let pairs: Vec<_> = lhs
        .components
        .into_iter()
        .zip(dh.components.into_iter().map(|e| Expr::neg(e)))
        .collect();
    out.push(check_pairs("i_X_a(w_a) + dH_a = 0", &pairs, &bxx, cfg)?);

    let lhs = interior_product(&x, &omega_alpha1());
    let dl = d_scalar(&ltilde_alpha(), PHASE_DIM);
    let pairs: Vec<_> = lhs
        .components
        .into_iter()
        .zip(dl.components.into_iter().map(|e| Expr::neg(e)))
        .collect();
    out.push(check_pairs("i_X_a(w_a1) + dLtilde_a = 0", &pairs, &bxx, cfg)?);

    // canonical-chart compatibility of the scaled hierarchy bivectors
    for k in 0..=2u32 {
        if check_s_constraint(k, cfg.alpha).is_err() {
            continue;
        }
        let s = schouten_bracket(&crate::poisson::p_alpha(), &p_k1(k));
        let mut pairs = Vec::new();
        for i in 0..PHASE_DIM {
            for j in 0..PHASE_DIM {
                for l in 0..PHASE_DIM {
                    if !s.get(i, j, l).is_zero() {
                        pairs.push((s.get(i, j, l).clone(), Expr::zero()));
                    }
                }
            }
        }
        out.push(check_pairs(
            format!("[P_a, P^{}_a1]_NS = 0", k + 1),
            &pairs,
            &bxx,
            cfg,
        )?);
    }
    Ok(out)
}

/// Appendix conformance. Documented discrepancies report residual 0 when
/// the printed form disagrees as documented (the measured residual of the
/// printed form is carried in the entry name); everything else reports its
/// comparison residual directly.
fn appendix(cfg: &SuiteConfig) -> Result<Vec<IdentityReport>, SuiteError> {
    let entries = parse_table(ORACLE_TABLE)?;
    appendix_against(cfg, &entries)
}

pub(crate) fn appendix_against(
    cfg: &SuiteConfig,
    entries: &[OracleEntry],
) -> Result<Vec<IdentityReport>, SuiteError> {
    let metrics = match cfg.metric.as_deref() {
        Some("schwarzschild") => vec![schwarzschild(1.0).expect("valid")],
        Some("flrw") => {
            let r = Expr::pow(Expr::coord(0), Expr::int(2));
            vec![flrw(0.0, r.clone()).expect("valid"), flrw(1.0, r).expect("valid")]
        }
        _ => crate::oracle::standard_metrics(),
    };
    let mut out = Vec::new();
    for (i, g) in metrics.iter().enumerate() {
        let tag = if g.name == "flrw" {
            format!("flrw[k={}]", g.params.get("k").copied().unwrap_or(0.0))
        } else {
            g.name.clone()
        };
        let checks =
            check_metric_against_table(g, entries, cfg.n, cfg.tol.max(1e-8), cfg.seed + i as u64, cfg.alpha)?;
        for c in checks {
            if c.documented_discrepancy {
                out.push(IdentityReport {
                    name: format!(
                        "{tag}.{} [documented discrepancy{}; printed-form residual {:.3e}]",
                        c.label,
                        c.note
                            .as_deref()
                            .and_then(|n| n.strip_prefix("discrepancy:"))
                            .map(|r| format!(":{r}"))
                            .unwrap_or_default(),
                        c.max_residual
                    ),
                    max_residual: if c.passed { 0.0 } else { 1.0 },
                    worst_point: c.worst_point,
                });
            } else {
                out.push(IdentityReport {
                    name: format!("{tag}.{}", c.label),
                    max_residual: c.max_residual,
                    worst_point: c.worst_point,
                });
            }
        }
    }
    Ok(out)
}

fn oevel(cfg: &SuiteConfig) -> Result<Vec<IdentityReport>, SuiteError> {
    let bxx = bx();
    let mut out = Vec::new();
    for r in oevel_suite(2, 2, &bxx, cfg.n.min(40), cfg.seed, cfg.alpha)? {
        out.push(IdentityReport {
            name: r.name,
            max_residual: r.max_residual,
            worst_point: r.worst_point,
        });
    }
    let (residuals, coefs) = conformal_coefficients(1, &bxx, cfg.n, cfg.seed, cfg.alpha)?;
    for r in residuals {
        out.push(IdentityReport {
            name: r.name,
            max_residual: r.max_residual,
            worst_point: r.worst_point,
        });
    }
    // recovered (alpha~, beta~, gamma~) vs (0, -alpha, -1)
    let expect = [0.0, -cfg.alpha, -1.0];
    let dev = coefs
        .iter()
        .zip(expect)
        .map(|(c, e)| (c - e).abs())
        .fold(0.0, f64::max);
    out.push(IdentityReport {
        name: format!(
            "conformal coefficients ({:.3e}, {:.6}, {:.6}) vs (0, -alpha, -1)",
            coefs[0], coefs[1], coefs[2]
        ),
        max_residual: dev,
        worst_point: Vec::new(),
    });
    Ok(out)
}

fn hierarchy(cfg: &SuiteConfig) -> Result<Vec<IdentityReport>, SuiteError> {
    let bxx = bx();
    let mut out = Vec::new();
    for i in 0..=2u32 {
        for j in 0..=2u32 {
            let lhs = lie_vector(&x_family(i), &z_field(j));
            let rhs = x_bracket_display(i, j);
            let pairs: Vec<_> = lhs
                .components
                .into_iter()
                .zip(rhs.components)
                .filter(|(a, b)| !(a.is_zero() && b.is_zero()))
                .collect();
            out.push(check_pairs(
                format!("[X_a{i}, Z_a{j}] = X_a{}", i + j),
                &pairs,
                &bxx,
                cfg,
            )?);

            let comm = lie_vector(&x_family(i), &x_family(i + j));
            out.push(check_pairs(
                format!("[X_a{i}, X_a{}] = 0", i + j),
                &vector_zero_pairs(&comm),
                &bxx,
                cfg,
            )?);

            let lhs = poisson_bracket_alpha(&h_family(i), &crate::hierarchy::htilde(j));
            out.push(check_pairs(
                format!("{{H_a{i}, H~_a{j}}} = (1-a i) H_a{}", i + j),
                &[(lhs, h_bracket_display(i, j))],
                &bxx,
                cfg,
            )?);
        }
    }
    for k in 0..=2u32 {
        if check_s_constraint(k, cfg.alpha).is_err() {
            continue;
        }
        let lhs = crate::poisson::hamiltonian_field_for(&p_alpha(), &h_family(k));
        let rhs = crate::poisson::hamiltonian_field_for(&p_k1(k), &h_family(k + 1));
        let pairs: Vec<_> = lhs
            .components
            .into_iter()
            .zip(rhs.components)
            .filter(|(a, b)| !(a.is_zero() && b.is_zero()))
            .collect();
        out.push(check_pairs(
            format!("X_a{k} = {{H_a{}, .}}^{}_a1", k + 1, k + 1),
            &pairs,
            &bxx,
            cfg,
        )?);
    }
    for k in 0..=2u32 {
        for t in 0..=2u32 {
            if check_s_general_constraint(k, t, cfg.alpha).is_err() {
                continue;
            }
            let r = generalized_bracket_identity(k, t, &bxx, cfg.n.min(40), cfg.seed, cfg.alpha)?;
            out.push(IdentityReport {
                name: r.name,
                max_residual: r.max_residual,
                worst_point: r.worst_point,
            });
        }
    }
    Ok(out)
}

fn hj(cfg: &SuiteConfig) -> Result<Vec<IdentityReport>, SuiteError> {
    let mut out = Vec::new();
    let want = |name: &str| {
        cfg.metric.is_none() || cfg.metric.as_deref() == Some(name)
    };

    if want("schwarzschild") {
        let g = schwarzschild(1.0).expect("valid");
        let pbx = g.phase_domain();
        let fields = schwarzschild_fields(1.0);
        let mut pairs = Vec::new();
        for (name, c) in fields.names.iter().zip(&fields.fields) {
            pairs.push((
                format!("schwarzschild {{H_Sa, {name}}}_a = 0"),
                poisson_bracket_alpha(&fields.hamiltonian, c),
            ));
        }
        for (name, e) in pairs {
            out.push(check_pairs(name, &[(e, Expr::zero())], &pbx, cfg)?);
        }
        out.push(check_pairs(
            "schwarzschild K (polar) = K (radial) on shell",
            &[(fields.fields[2].clone(), schwarzschild_k_radial(1.0))],
            &pbx,
            cfg,
        )?);
    }

    if want("flrw") {
        let r = Expr::pow(Expr::coord(0), Expr::int(2));
        let g = flrw(1.0, r.clone()).expect("valid");
        let pbx = g.phase_domain();
        let fields = flrw_fields(1.0, &r);
        for (name, c) in fields.names.iter().zip(&fields.fields) {
            out.push(check_pairs(
                format!("flrw {{H_Fa, {name}}}_a = 0"),
                &[(poisson_bracket_alpha(&fields.hamiltonian, c), Expr::zero())],
                &pbx,
                cfg,
            )?);
        }
        out.push(check_pairs(
            "flrw K (angular) = K (radial) identically",
            &[(fields.fields[1].clone(), flrw_k_radial(1.0, &r))],
            &pbx,
            cfg,
        )?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_at_default_config() {
        for name in SUITE_NAMES {
            let mut cfg = SuiteConfig::default();
            // tolerances per suite family
            cfg.tol = match name {
                "lemma1" => 1e-10,
                "jacobi" | "morphism" => 1e-8,
                "appendix" => 1e-8,
                _ => 1e-9,
            };
            cfg.n = if name == "appendix" { 60 } else { 60 };
            let report = run_suite(name, &cfg).unwrap();
            assert!(
                report.passed(),
                "suite {name} failed: worst {:.3e}\n{}",
                report.worst(),
                report
                    .results
                    .iter()
                    .filter(|r| r.max_residual > cfg.tol)
                    .map(|r| format!("  {}: {:.3e}", r.name, r.max_residual))
                    .collect::<Vec<_>>()
                    .join("\n")
            );
        }
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(matches!(
            run_suite("nosuch", &SuiteConfig::default()),
            Err(SuiteError::UnknownSuite(_))
        ));
    }

    #[test]
    fn reports_are_deterministic_for_fixed_seed() {
        let cfg = SuiteConfig { n: 20, ..Default::default() };
        let a = run_suite("noether", &cfg).unwrap().to_json();
        let b = run_suite("noether", &cfg).unwrap().to_json();
        assert_eq!(a, b);
        let other = SuiteConfig { seed: 43, n: 20, ..Default::default() };
        let c = run_suite("noether", &other).unwrap().to_json();
        assert_ne!(a, c);
    }

    #[test]
    fn tampered_oracle_entry_fails_with_component_named() {
        // negative control for the conformance suite: corrupt one entry
        let mut entries = parse_table(ORACLE_TABLE).unwrap();
        let victim = entries
            .iter_mut()
            .find(|e| {
                e.metric == "schwarzschild"
                    && !e.is_documented_discrepancy()
                    && e.tensor == crate::oracle::TensorKind::Christoffel
            })
            .unwrap();
        let label = victim.label();
        victim.expression = format!("1.1*({})", victim.expression);
        let cfg = SuiteConfig { n: 20, metric: Some("schwarzschild".into()), ..Default::default() };
        let results = appendix_against(&cfg, &entries).unwrap();
        let bad: Vec<_> = results.iter().filter(|r| r.max_residual > 1e-8).collect();
        assert!(!bad.is_empty(), "tampering went unnoticed");
        assert!(
            bad.iter().any(|r| r.name.contains(&label)),
            "offending component not named: {:?}",
            bad.iter().map(|r| &r.name).collect::<Vec<_>>()
        );
    }

    #[test]
    fn suites_also_run_at_other_alphas() {
        for alpha in [0.5, 1.0] {
            let cfg = SuiteConfig { alpha, n: 30, tol: 1e-8, ..Default::default() };
            for name in ["jacobi", "noether", "lemma1"] {
                let report = run_suite(name, &cfg).unwrap();
                assert!(report.passed(), "suite {name} at alpha {alpha}: {:.3e}", report.worst());
            }
        }
    }
}
