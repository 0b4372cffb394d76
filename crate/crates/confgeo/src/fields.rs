//! Coordinate tensor fields over an n-dimensional chart and the exterior /
//! Lie calculus on them.
//!
//! Components are stored as dense [`Expr`] arrays with fixed variance:
//! vectors `X^i`, one-forms `a_i`, two-forms `w_{ij}` and bivectors
//! `P^{ij}` (antisymmetric), (1,1)-tensors `T^i_j`, plus the rank-3
//! objects needed as intermediates (three-forms for the Cartan formula,
//! trivectors for the Schouten bracket). Scalars are bare [`Expr`]s.
//!
//! Conventions, fixed once and used everywhere:
//! * interior product contracts the first slot, `(i_X w)_j = X^i w_{ij}`;
//! * a bivector maps one-forms to vectors by `(P a)^i = P^{ki} a_k`, so the
//!   Hamiltonian field of `f` is `P(df)` with components
//!   `{f, x^i}`;
//! * a two-form maps vectors to one-forms by `(w X)_j = w_{ji} X^i`, the
//!   orientation inverse to the bivector map (`w(P(a)) = a` for a
//!   nondegenerate pair);
//! * a (1,1)-tensor built from a pair is `T = P2 . w`, components
//!   `T^i_j = P2^{ki} w_{kj}`, which is the identity for an inverse pair.

use crate::expr::{EvalError, Expr};

/// Vector field `X = X^i d/dx^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub components: Vec<Expr>,
}

/// One-form `a = a_i dx^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm {
    pub components: Vec<Expr>,
}

/// Two-form with full antisymmetric component matrix `w_{ij}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoForm {
    dim: usize,
    comps: Vec<Expr>,
}

/// Bivector with full antisymmetric component matrix `P^{ij}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bivector {
    dim: usize,
    comps: Vec<Expr>,
}

/// Fully antisymmetric rank-3 covariant components.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeForm {
    dim: usize,
    comps: Vec<Expr>,
}

/// Fully antisymmetric rank-3 contravariant components (Schouten bracket
/// output).
#[derive(Debug, Clone, PartialEq)]
pub struct Trivector {
    dim: usize,
    comps: Vec<Expr>,
}

/// (1,1)-tensor `T^i_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneOneTensor {
    dim: usize,
    comps: Vec<Expr>,
}

impl VectorField {
    pub fn zero(dim: usize) -> Self {
        VectorField { components: vec![Expr::zero(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn scale(&self, c: Expr) -> Self {
        VectorField {
            components: self.components.iter().map(|e| Expr::mul(c.clone(), e.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        VectorField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| Expr::sub(a.clone(), b.clone()))
                .collect(),
        }
    }

    pub fn eval(&self, point: &[f64], alpha: f64) -> Result<Vec<f64>, EvalError> {
        self.components.iter().map(|e| e.eval(point, alpha)).collect()
    }
}

impl OneForm {
    pub fn zero(dim: usize) -> Self {
        OneForm { components: vec![Expr::zero(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        OneForm {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| Expr::add(a.clone(), b.clone()))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        OneForm { components: self.components.iter().map(|e| Expr::neg(e.clone())).collect() }
    }
}

macro_rules! antisym_rank2 {
    ($ty:ident) => {
        impl $ty {
            pub fn zero(dim: usize) -> Self {
                $ty { dim, comps: vec![Expr::zero(); dim * dim] }
            }

            pub fn dim(&self) -> usize {
                self.dim
            }

            pub fn get(&self, i: usize, j: usize) -> &Expr {
                &self.comps[i * self.dim + j]
            }

            /// Set the (i, j) component and its antisymmetric partner.
            pub fn set(&mut self, i: usize, j: usize, e: Expr) {
                assert!(i != j, "diagonal of an antisymmetric object is zero");
                self.comps[j * self.dim + i] = Expr::neg(e.clone());
                self.comps[i * self.dim + j] = e;
            }

            /// Pair-diagonal object `sum_mu c_mu (slot_{mu+n} , slot_mu)` on a
            /// 2n-dimensional chart: component (mu + n, mu) = c_mu. This is
            /// the layout of `dp_mu ^ dq^mu` terms and their bivector duals.
            pub fn from_conjugate_pairs(coeffs: Vec<Expr>) -> Self {
                let n = coeffs.len();
                let mut out = Self::zero(2 * n);
                for (mu, c) in coeffs.into_iter().enumerate() {
                    out.set(mu + n, mu, c);
                }
                out
            }

            pub fn scale(&self, c: Expr) -> Self {
                $ty {
                    dim: self.dim,
                    comps: self.comps.iter().map(|e| Expr::mul(c.clone(), e.clone())).collect(),
                }
            }

            pub fn sub(&self, other: &Self) -> Self {
                assert_eq!(self.dim, other.dim);
                $ty {
                    dim: self.dim,
                    comps: self
                        .comps
                        .iter()
                        .zip(&other.comps)
                        .map(|(a, b)| Expr::sub(a.clone(), b.clone()))
                        .collect(),
                }
            }

            pub fn eval(&self, point: &[f64], alpha: f64) -> Result<Vec<Vec<f64>>, EvalError> {
                let mut m = vec![vec![0.0; self.dim]; self.dim];
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        m[i][j] = self.get(i, j).eval(point, alpha)?;
                    }
                }
                Ok(m)
            }
        }
    };
}

antisym_rank2!(TwoForm);
antisym_rank2!(Bivector);

macro_rules! rank3 {
    ($ty:ident) => {
        impl $ty {
            pub fn zero(dim: usize) -> Self {
                $ty { dim, comps: vec![Expr::zero(); dim * dim * dim] }
            }

            pub fn dim(&self) -> usize {
                self.dim
            }

            pub fn get(&self, i: usize, j: usize, k: usize) -> &Expr {
                &self.comps[(i * self.dim + j) * self.dim + k]
            }

            pub fn set_raw(&mut self, i: usize, j: usize, k: usize, e: Expr) {
                self.comps[(i * self.dim + j) * self.dim + k] = e;
            }
        }
    };
}

rank3!(ThreeForm);
rank3!(Trivector);

impl OneOneTensor {
    pub fn zero(dim: usize) -> Self {
        OneOneTensor { dim, comps: vec![Expr::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut t = Self::zero(dim);
        for i in 0..dim {
            t.set(i, i, Expr::one());
        }
        t
    }

    pub fn from_diagonal(diag: Vec<Expr>) -> Self {
        let dim = diag.len();
        let mut t = Self::zero(dim);
        for (i, e) in diag.into_iter().enumerate() {
            t.set(i, i, e);
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.comps[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: Expr) {
        self.comps[i * self.dim + j] = e;
    }

    /// True when every off-diagonal component is structurally zero.
    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn scale(&self, c: Expr) -> Self {
        OneOneTensor {
            dim: self.dim,
            comps: self.comps.iter().map(|e| Expr::mul(c.clone(), e.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        OneOneTensor {
            dim: self.dim,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| Expr::sub(a.clone(), b.clone()))
                .collect(),
        }
    }

    /// Matrix product `self . other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = Expr::zero();
                for k in 0..self.dim {
                    acc = Expr::add(
                        acc,
                        Expr::mul(self.get(i, k).clone(), other.get(k, j).clone()),
                    );
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// `self^h` by repeated symbolic multiplication (diagonal tensors take
    /// the cheap componentwise route to bound expression growth).
    pub fn power(&self, h: u32) -> Self {
        if h == 0 {
            return Self::identity(self.dim);
        }
        if self.is_diagonal() {
            let diag =
                (0..self.dim).map(|i| Expr::pow(self.get(i, i).clone(), Expr::int(h as i64)));
            return Self::from_diagonal(diag.collect());
        }
        let mut acc = self.clone();
        for _ in 1..h {
            acc = acc.compose(self);
        }
        acc
    }

    /// Trace of the h-th power as a scalar field.
    pub fn trace_power(&self, h: u32) -> Expr {
        if h == 0 {
            return Expr::int(self.dim as i64);
        }
        let powered = self.power(h);
        let mut acc = Expr::zero();
        for i in 0..self.dim {
            acc = Expr::add(acc, powered.get(i, i).clone());
        }
        acc
    }

    pub fn apply_vector(&self, x: &VectorField) -> VectorField {
        assert_eq!(self.dim, x.dim());
        let components = (0..self.dim)
            .map(|i| {
                let mut acc = Expr::zero();
                for k in 0..self.dim {
                    acc = Expr::add(acc, Expr::mul(self.get(i, k).clone(), x.components[k].clone()));
                }
                acc
            })
            .collect();
        VectorField { components }
    }

    /// Push-forward of a bivector: `(T P)^{ij} = T^i_k P^{kj}` (stays
    /// antisymmetric for the pair-diagonal tensors used here).
    pub fn apply_bivector(&self, p: &Bivector) -> Bivector {
        assert_eq!(self.dim, p.dim());
        let mut out = Bivector::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = Expr::zero();
                for k in 0..self.dim {
                    acc = Expr::add(acc, Expr::mul(self.get(i, k).clone(), p.get(k, j).clone()));
                }
                out.comps[i * self.dim + j] = acc;
            }
        }
        out
    }

    /// Pullback of a one-form: `(T* a)_i = T^k_i a_k`.
    pub fn pullback_one_form(&self, a: &OneForm) -> OneForm {
        assert_eq!(self.dim, a.dim());
        let components = (0..self.dim)
            .map(|i| {
                let mut acc = Expr::zero();
                for k in 0..self.dim {
                    acc = Expr::add(acc, Expr::mul(self.get(k, i).clone(), a.components[k].clone()));
                }
                acc
            })
            .collect();
        OneForm { components }
    }

    /// Pullback on the first slot of a two-form: `(T* w)_{ij} = T^k_i w_{kj}`.
    pub fn pullback_two_form(&self, w: &TwoForm) -> TwoForm {
        assert_eq!(self.dim, w.dim());
        let mut out = TwoForm::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = Expr::zero();
                for k in 0..self.dim {
                    acc = Expr::add(acc, Expr::mul(self.get(k, i).clone(), w.get(k, j).clone()));
                }
                out.comps[i * self.dim + j] = acc;
            }
        }
        out
    }

    pub fn eval(&self, point: &[f64], alpha: f64) -> Result<Vec<Vec<f64>>, EvalError> {
        let mut m = vec![vec![0.0; self.dim]; self.dim];
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[i][j] = self.get(i, j).eval(point, alpha)?;
            }
        }
        Ok(m)
    }
}

/// `df` as a one-form.
pub fn d_scalar(f: &Expr, dim: usize) -> OneForm {
    OneForm { components: (0..dim).map(|i| f.diff(i)).collect() }
}

/// `(d a)_{ij} = d_i a_j - d_j a_i`.
pub fn d_one_form(a: &OneForm) -> TwoForm {
    let dim = a.dim();
    let mut out = TwoForm::zero(dim);
    for i in 0..dim {
        for j in (i + 1)..dim {
            out.set(
                i,
                j,
                Expr::sub(a.components[j].diff(i), a.components[i].diff(j)),
            );
        }
    }
    out
}

/// `(d w)_{ijk} = d_i w_{jk} + d_j w_{ki} + d_k w_{ij}`.
pub fn d_two_form(w: &TwoForm) -> ThreeForm {
    let dim = w.dim();
    let mut out = ThreeForm::zero(dim);
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                if i == j || j == k || i == k {
                    continue;
                }
                let e = Expr::add(
                    Expr::add(w.get(j, k).diff(i), w.get(k, i).diff(j)),
                    w.get(i, j).diff(k),
                );
                out.set_raw(i, j, k, e);
            }
        }
    }
    out
}

/// Interior product `(i_X w)_j = X^i w_{ij}`.
pub fn interior_product(x: &VectorField, w: &TwoForm) -> OneForm {
    let dim = w.dim();
    assert_eq!(x.dim(), dim);
    let components = (0..dim)
        .map(|j| {
            let mut acc = Expr::zero();
            for i in 0..dim {
                acc = Expr::add(acc, Expr::mul(x.components[i].clone(), w.get(i, j).clone()));
            }
            acc
        })
        .collect();
    OneForm { components }
}

/// Interior product with a three-form: `(i_X W)_{jk} = X^i W_{ijk}`.
pub fn interior_product_three(x: &VectorField, w: &ThreeForm) -> TwoForm {
    let dim = w.dim();
    assert_eq!(x.dim(), dim);
    let mut out = TwoForm::zero(dim);
    for j in 0..dim {
        for k in 0..dim {
            let mut acc = Expr::zero();
            for i in 0..dim {
                acc = Expr::add(acc, Expr::mul(x.components[i].clone(), w.get(i, j, k).clone()));
            }
            out.comps[j * dim + k] = acc;
        }
    }
    out
}

/// Bundle map of a two-form, `(w X)_j = w_{ji} X^i`; inverse orientation
/// to [`bivector_sharp`], so the two compose to the identity for an
/// inverse pair.
pub fn two_form_lower(w: &TwoForm, x: &VectorField) -> OneForm {
    let dim = w.dim();
    assert_eq!(x.dim(), dim);
    let components = (0..dim)
        .map(|j| {
            let mut acc = Expr::zero();
            for i in 0..dim {
                acc = Expr::add(acc, Expr::mul(w.get(j, i).clone(), x.components[i].clone()));
            }
            acc
        })
        .collect();
    OneForm { components }
}

/// Bundle map of a bivector, `(P a)^i = P^{ki} a_k`. The Hamiltonian field
/// of `f` is `bivector_sharp(P, df)`.
pub fn bivector_sharp(p: &Bivector, a: &OneForm) -> VectorField {
    let dim = p.dim();
    assert_eq!(a.dim(), dim);
    let components = (0..dim)
        .map(|i| {
            let mut acc = Expr::zero();
            for k in 0..dim {
                acc = Expr::add(acc, Expr::mul(p.get(k, i).clone(), a.components[k].clone()));
            }
            acc
        })
        .collect();
    VectorField { components }
}

/// Bracket induced by a bivector: `{f, g} = P^{ij} d_i f d_j g`.
pub fn bivector_bracket(p: &Bivector, f: &Expr, g: &Expr) -> Expr {
    let dim = p.dim();
    let mut acc = Expr::zero();
    for i in 0..dim {
        for j in 0..dim {
            if p.get(i, j).is_zero() {
                continue;
            }
            acc = Expr::add(
                acc,
                Expr::mul(p.get(i, j).clone(), Expr::mul(f.diff(i), g.diff(j))),
            );
        }
    }
    acc
}

/// `<a, X> = a_i X^i`.
pub fn pairing(a: &OneForm, x: &VectorField) -> Expr {
    let mut acc = Expr::zero();
    for (ai, xi) in a.components.iter().zip(&x.components) {
        acc = Expr::add(acc, Expr::mul(ai.clone(), xi.clone()));
    }
    acc
}

/// `L_X f = X(f)`.
pub fn lie_scalar(x: &VectorField, f: &Expr) -> Expr {
    let mut acc = Expr::zero();
    for (i, xi) in x.components.iter().enumerate() {
        acc = Expr::add(acc, Expr::mul(xi.clone(), f.diff(i)));
    }
    acc
}

/// `L_X Y = [X, Y]`.
pub fn lie_vector(x: &VectorField, y: &VectorField) -> VectorField {
    let dim = x.dim();
    assert_eq!(y.dim(), dim);
    let components = (0..dim)
        .map(|i| {
            let mut acc = Expr::zero();
            for j in 0..dim {
                acc = Expr::add(
                    acc,
                    Expr::sub(
                        Expr::mul(x.components[j].clone(), y.components[i].diff(j)),
                        Expr::mul(y.components[j].clone(), x.components[i].diff(j)),
                    ),
                );
            }
            acc
        })
        .collect();
    VectorField { components }
}

/// `(L_X a)_i = X^j d_j a_i + a_j d_i X^j`.
pub fn lie_one_form(x: &VectorField, a: &OneForm) -> OneForm {
    let dim = x.dim();
    assert_eq!(a.dim(), dim);
    let components = (0..dim)
        .map(|i| {
            let mut acc = Expr::zero();
            for j in 0..dim {
                acc = Expr::add(
                    acc,
                    Expr::add(
                        Expr::mul(x.components[j].clone(), a.components[i].diff(j)),
                        Expr::mul(a.components[j].clone(), x.components[j].diff(i)),
                    ),
                );
            }
            acc
        })
        .collect();
    OneForm { components }
}

/// Lie derivative of a two-form by the Cartan formula
/// `L_X w = d(i_X w) + i_X(d w)`.
pub fn lie_two_form(x: &VectorField, w: &TwoForm) -> TwoForm {
    let a = interior_product(x, w);
    let da = d_one_form(&a);
    let dw = d_two_form(w);
    let idw = interior_product_three(x, &dw);
    let dim = w.dim();
    let mut out = TwoForm::zero(dim);
    for i in 0..dim {
        for j in 0..dim {
            out.comps[i * dim + j] = Expr::add(da.get(i, j).clone(), idw.get(i, j).clone());
        }
    }
    out
}

/// `(L_X P)^{ij} = X^k d_k P^{ij} - P^{kj} d_k X^i - P^{ik} d_k X^j`.
pub fn lie_bivector(x: &VectorField, p: &Bivector) -> Bivector {
    let dim = x.dim();
    assert_eq!(p.dim(), dim);
    let mut out = Bivector::zero(dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Expr::zero();
            for k in 0..dim {
                acc = Expr::add(acc, Expr::mul(x.components[k].clone(), p.get(i, j).diff(k)));
                acc = Expr::sub(acc, Expr::mul(p.get(k, j).clone(), x.components[i].diff(k)));
                acc = Expr::sub(acc, Expr::mul(p.get(i, k).clone(), x.components[j].diff(k)));
            }
            out.comps[i * dim + j] = acc;
        }
    }
    out
}

/// `(L_X T)^i_j = X^k d_k T^i_j - T^k_j d_k X^i + T^i_k d_j X^k`.
pub fn lie_one_one(x: &VectorField, t: &OneOneTensor) -> OneOneTensor {
    let dim = x.dim();
    assert_eq!(t.dim(), dim);
    let mut out = OneOneTensor::zero(dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Expr::zero();
            for k in 0..dim {
                acc = Expr::add(acc, Expr::mul(x.components[k].clone(), t.get(i, j).diff(k)));
                acc = Expr::sub(acc, Expr::mul(t.get(k, j).clone(), x.components[i].diff(k)));
                acc = Expr::add(acc, Expr::mul(t.get(i, k).clone(), x.components[k].diff(j)));
            }
            out.set(i, j, acc);
        }
    }
    out
}

/// Schouten-Nijenhuis bracket of two bivectors (fully antisymmetric
/// trivector). `[P, P] = 0` is the Jacobi identity for the bracket of `P`.
pub fn schouten_bracket(p1: &Bivector, p2: &Bivector) -> Trivector {
    let dim = p1.dim();
    assert_eq!(p2.dim(), dim);
    let mut out = Trivector::zero(dim);
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                if i == j || j == k || i == k {
                    continue;
                }
                let mut acc = Expr::zero();
                // sum over cyclic (i, j, k) of P1^{l i} d_l P2^{jk} + (P1 <-> P2)
                for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                    for l in 0..dim {
                        if !p1.get(l, a).is_zero() {
                            acc = Expr::add(
                                acc,
                                Expr::mul(p1.get(l, a).clone(), p2.get(b, c).diff(l)),
                            );
                        }
                        if !p2.get(l, a).is_zero() {
                            acc = Expr::add(
                                acc,
                                Expr::mul(p2.get(l, a).clone(), p1.get(b, c).diff(l)),
                            );
                        }
                    }
                }
                out.set_raw(i, j, k, acc);
            }
        }
    }
    out
}

/// Nijenhuis torsion
/// `(N_T)^h_{ij} = T^k_i d_k T^h_j - T^k_j d_k T^h_i + T^h_k d_j T^k_i - T^h_k d_i T^k_j`.
pub fn nijenhuis_torsion(t: &OneOneTensor) -> Vec<Expr> {
    let dim = t.dim();
    let mut out = vec![Expr::zero(); dim * dim * dim];
    for h in 0..dim {
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Expr::zero();
                for k in 0..dim {
                    if !t.get(k, i).is_zero() {
                        acc = Expr::add(acc, Expr::mul(t.get(k, i).clone(), t.get(h, j).diff(k)));
                    }
                    if !t.get(k, j).is_zero() {
                        acc = Expr::sub(acc, Expr::mul(t.get(k, j).clone(), t.get(h, i).diff(k)));
                    }
                    if !t.get(h, k).is_zero() {
                        acc = Expr::add(acc, Expr::mul(t.get(h, k).clone(), t.get(k, i).diff(j)));
                        acc = Expr::sub(acc, Expr::mul(t.get(h, k).clone(), t.get(k, j).diff(i)));
                    }
                }
                out[(h * dim + i) * dim + j] = acc;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainBox;
    use crate::sample::components_max_residual;

    #[test]
    fn d_squared_is_zero_on_scalars() {
        // d(df) = 0 for a generic scalar
        let f = Expr::mul(
            Expr::pow(Expr::coord(0), Expr::int(3)),
            Expr::sin(Expr::coord(5)),
        );
        let df = d_scalar(&f, 8);
        let ddf = d_one_form(&df);
        let bx = DomainBox::default_phase();
        for i in 0..8 {
            for j in 0..8 {
                let pairs = [(ddf.get(i, j).clone(), Expr::zero())];
                let (r, _) = components_max_residual(&pairs, &bx, 10, 3, 0.7).unwrap();
                assert!(r < 1e-12, "dd f [{i}{j}] = {r}");
            }
        }
    }

    #[test]
    fn lie_scalar_of_coordinate_along_unit_field() {
        let mut x = VectorField::zero(8);
        x.components[0] = Expr::one();
        let f = Expr::coord(0);
        let lf = lie_scalar(&x, &f);
        assert!(lf.is_one());
    }

    #[test]
    fn interior_product_with_zero_field_vanishes() {
        let w = TwoForm::from_conjugate_pairs(vec![Expr::one(); 4]);
        let x = VectorField::zero(8);
        let a = interior_product(&x, &w);
        assert!(a.components.iter().all(Expr::is_zero));
    }

    #[test]
    fn nijenhuis_of_identity_vanishes() {
        let t = OneOneTensor::identity(8);
        let n = nijenhuis_torsion(&t);
        assert!(n.iter().all(Expr::is_zero));
    }

    #[test]
    fn trace_power_zero_is_dimension() {
        let t = OneOneTensor::from_diagonal(vec![Expr::coord(0); 8]);
        assert_eq!(t.trace_power(0), Expr::int(8));
    }

    #[test]
    fn dense_nijenhuis_matches_independent_finite_difference_evaluation() {
        // T^i_j = x_i x_j on a 4-dimensional chart; compare the symbolic
        // torsion against an independently coded numeric evaluation of the
        // same formula with central differences.
        let dim = 4;
        let mut t = OneOneTensor::zero(dim);
        for i in 0..dim {
            for j in 0..dim {
                t.set(i, j, Expr::mul(Expr::coord(i), Expr::coord(j)));
            }
        }
        let n = nijenhuis_torsion(&t);
        let point = [1.3, 0.7, 2.1, 0.9];
        let alpha = 0.7;
        let h = 1e-6;
        let t_at = |p: &[f64], i: usize, j: usize| t.get(i, j).eval(p, alpha).unwrap();
        let dt = |i: usize, j: usize, k: usize| {
            let mut plus = point.to_vec();
            let mut minus = point.to_vec();
            plus[k] += h;
            minus[k] -= h;
            (t_at(&plus, i, j) - t_at(&minus, i, j)) / (2.0 * h)
        };
        for hh in 0..dim {
            for i in 0..dim {
                for j in 0..dim {
                    let mut expect = 0.0;
                    for k in 0..dim {
                        expect += t_at(&point, k, i) * dt(hh, j, k);
                        expect -= t_at(&point, k, j) * dt(hh, i, k);
                        expect += t_at(&point, hh, k) * dt(k, i, j);
                        expect -= t_at(&point, hh, k) * dt(k, j, i);
                    }
                    let got = n[(hh * dim + i) * dim + j].eval(&point, alpha).unwrap();
                    assert!(
                        (got - expect).abs() <= 1e-5 * (1.0 + expect.abs()),
                        "N[{hh}][{i}][{j}]: sym {got} vs fd {expect}"
                    );
                }
            }
        }
    }
}
