use std::collections::BTreeMap;

use num_complex::Complex;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::linalg::{
    commutator_norm, conjugation_rotation, gram_from_bloch, hermitian_eigen, matrix_sqrt_psd, operator_to_bloch,
    proportional, rotate, rotate_transpose, BlochVector, LocalOperator, ProductOperator,
};
use crate::protocol::{LoccNode, LoccRound, Outcome};
use crate::scalar::{Real, Tolerances};
use crate::seed::StabilizerGroup;

/// Parameters of the numerical search used outside the qubit closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    /// Spacing of the probability simplex grid.
    pub grid_step: f64,
    /// Largest number of symmetries combined in one round.
    pub max_subset: usize,
    /// Additional Dirichlet-distributed probability vectors.
    pub random_samples: usize,
    pub rng_seed: u64,
    /// Skip the qubit closed form and always search.
    pub force_search: bool,
    /// Upper bound on the number of linear solves.
    pub max_evaluations: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_step: 0.05,
            max_subset: 4,
            random_samples: 1000,
            rng_seed: 0,
            force_search: false,
            max_evaluations: 250_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    ClosedForm,
    Search,
}

/// Symmetries `S_1..S_m`, probabilities `p` and a positive-definite
/// trace-one `H` with `G_j = Σ_i p_i S_i^{(j)†} H S_i^{(j)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvertibilityCertificate<T> {
    pub acting_party: usize,
    pub symmetry_indices: Vec<usize>,
    pub probabilities: Vec<T>,
    /// Target Gram operator `H` on the acting party.
    pub target_gram: LocalOperator<T>,
    /// `‖Σ_i p_i S_i†HS_i − G_j‖_F`.
    pub residual: T,
}

#[derive(Clone, Debug)]
pub struct ConvertibilityOutcome<T> {
    pub certificate: Option<ConvertibilityCertificate<T>>,
    pub mode: SearchMode,
    /// For a negative answer, whether non-convertibility is established
    /// rather than a bounded search coming up empty.
    pub exact: bool,
    /// Symmetries commuting with `G_k` on every `k ≠ j`.
    pub admissible: Vec<usize>,
    pub evaluations: usize,
}

impl<T> ConvertibilityOutcome<T> {
    pub fn is_convertible(&self) -> bool {
        self.certificate.is_some()
    }
}

/// Indices of the symmetries with `[G_k, S^{(k)}] = 0` for all `k ≠ j`.
pub fn admissible_symmetries<T: Real>(
    grams: &[LocalOperator<T>],
    group: &StabilizerGroup<T>,
    j: usize,
    tol: Tolerances<T>,
) -> Vec<usize> {
    (0..group.len())
        .filter(|&i| {
            let s = &group.element(i).operator;
            grams
                .iter()
                .zip(s.factors())
                .enumerate()
                .filter(|(k, _)| *k != j)
                .all(|(_, (g, f))| commutator_norm(g, f).is_ok_and(|r| r < tol.eq))
        })
        .collect()
}

/// One representative per distinct action `X ↦ S^{(j)†} X S^{(j)}`, i.e. per
/// acting-party factor up to phase. The class containing the identity comes
/// first.
fn factor_classes<T: Real>(group: &StabilizerGroup<T>, admissible: &[usize], j: usize, tol: T) -> Vec<usize> {
    let mut reps: Vec<usize> = Vec::new();
    let identity = group.identity_index(tol).filter(|i| admissible.contains(i));
    for &i in identity.iter().chain(admissible) {
        let f = group.element(i).operator.factor(j);
        if !reps.iter().any(|&r| proportional(f, group.element(r).operator.factor(j), tol).is_some()) {
            reps.push(i);
        }
    }
    reps
}

fn conjugate_sum<T: Real>(
    h: &LocalOperator<T>,
    group: &StabilizerGroup<T>,
    j: usize,
    idx: &[usize],
    p: &[T],
) -> LocalOperator<T> {
    let d = h.dim();
    idx.iter().zip(p).fold(LocalOperator::zeros(d), |acc, (&i, &pi)| {
        let s = group.element(i).operator.factor(j);
        &acc + &s.adjoint().matmul(h).matmul(s).scale_real(pi)
    })
}

/// Gram operators `S G S†` reachable by a trivial relabelling.
fn trivial_targets<T: Real>(
    gram: &LocalOperator<T>,
    group: &StabilizerGroup<T>,
    admissible: &[usize],
    j: usize,
) -> Vec<LocalOperator<T>> {
    admissible
        .iter()
        .map(|&i| {
            let s = group.element(i).operator.factor(j);
            s.matmul(gram).matmul(&s.adjoint())
        })
        .collect()
}

fn is_nontrivial<T: Real>(h: &LocalOperator<T>, trivial: &[LocalOperator<T>], tol: Tolerances<T>) -> bool {
    trivial.iter().all(|t| (h - t).frobenius_norm() >= tol.nonzero)
}

impl<T: Real> ConvertibilityCertificate<T> {
    /// Re-checks every defining condition against `g` and `group`.
    pub fn validate(&self, g: &ProductOperator<T>, group: &StabilizerGroup<T>, tol: Tolerances<T>) -> Result<()> {
        let stale = |msg: String| Err(Error::StaleCertificate(msg));
        let j = self.acting_party;
        if g.dims() != group.party_dims() {
            return stale(format!("operator dimensions {:?} do not match the group", g.dims()));
        }
        if j >= group.parties() {
            return stale(format!("acting party {} out of range", j + 1));
        }
        if self.symmetry_indices.len() < 2 || self.symmetry_indices.len() != self.probabilities.len() {
            return stale("a certificate needs at least two symmetries with one probability each".into());
        }
        if let Some(&bad) = self.symmetry_indices.iter().find(|&&i| i >= group.len()) {
            return stale(format!("symmetry index {} out of range", bad + 1));
        }
        if self.probabilities.iter().any(|&p| !(p > T::zero())) {
            return stale("probabilities must be positive".into());
        }
        let total = self.probabilities.iter().fold(T::zero(), |a, &b| a + b);
        if !((total - T::one()).abs() < tol.eq) {
            return stale(format!("probabilities sum to {total}"));
        }
        let grams = g.grams();
        let admissible = admissible_symmetries(&grams, group, j, tol);
        if let Some(&bad) = self.symmetry_indices.iter().find(|i| !admissible.contains(i)) {
            return stale(format!("symmetry {} does not commute with the other parties", bad + 1));
        }
        let h = &self.target_gram;
        if h.dim() != grams[j].dim() || !h.is_hermitian(tol.eq) || !((h.trace().re - T::one()).abs() < tol.eq) {
            return stale("target Gram operator must be Hermitian with unit trace".into());
        }
        if !(hermitian_eigen(h).values[0] > tol.eq) {
            return stale("target Gram operator is not positive definite".into());
        }
        let sum = conjugate_sum(h, group, j, &self.symmetry_indices, &self.probabilities);
        let residual = (&sum - &grams[j]).frobenius_norm();
        if !(residual < tol.eq) {
            return stale(format!("decomposition residual {:e}", residual.as_f64()));
        }
        if !is_nontrivial(h, &trivial_targets(&grams[j], group, &admissible, j), tol) {
            return stale("target coincides with a trivial relabelling of the input".into());
        }
        Ok(())
    }
}

/// Decides whether `g|Ψ_s⟩` admits a nontrivial one-round conversion with
/// party `j` measuring.
///
/// For qubit parties the decision is analytic except when `G_j` is
/// maximally mixed and no rotation-axis construction applies; every other
/// case, and the `force_search` flag, uses the bounded numerical search.
pub fn is_convertible<T: Real>(
    g: &ProductOperator<T>,
    group: &StabilizerGroup<T>,
    j: usize,
    cfg: &SearchConfig,
    tol: Tolerances<T>,
) -> Result<ConvertibilityOutcome<T>> {
    if g.dims() != group.party_dims() {
        return Err(Error::InvalidState(format!(
            "operator dimensions {:?} do not match group dimensions {:?}",
            g.dims(),
            group.party_dims()
        )));
    }
    if j >= group.parties() {
        return Err(Error::PartyOutOfRange { party: j, parties: group.parties() });
    }
    g.check_invertible(tol.eq)?;
    let grams = g.grams();
    let admissible = admissible_symmetries(&grams, group, j, tol);
    let classes = factor_classes(group, &admissible, j, tol.eq);
    let trivial = trivial_targets(&grams[j], group, &admissible, j);
    let ctx = Context { g, group, j, gram: &grams[j], classes: &classes, trivial: &trivial, tol };
    let mut outcome = ConvertibilityOutcome {
        certificate: None,
        mode: SearchMode::ClosedForm,
        exact: true,
        admissible: admissible.clone(),
        evaluations: 0,
    };

    if classes.len() < 2 {
        return Ok(outcome);
    }
    if grams[j].dim() == 2 && !cfg.force_search {
        match closed_form(&ctx)? {
            Closed::Found(cert) => {
                outcome.certificate = Some(cert);
                return Ok(outcome);
            }
            Closed::NotConvertible => return Ok(outcome),
            Closed::Undecided => {}
        }
    }
    outcome.mode = SearchMode::Search;
    outcome.exact = false;
    let (cert, evaluations) = search(&ctx, cfg)?;
    outcome.certificate = cert;
    outcome.evaluations = evaluations;
    Ok(outcome)
}

struct Context<'a, T> {
    g: &'a ProductOperator<T>,
    group: &'a StabilizerGroup<T>,
    j: usize,
    gram: &'a LocalOperator<T>,
    classes: &'a [usize],
    trivial: &'a [LocalOperator<T>],
    tol: Tolerances<T>,
}

impl<T: Real> Context<'_, T> {
    /// Wraps a candidate as a certificate if it passes full validation.
    fn certify(
        &self,
        indices: Vec<usize>,
        probabilities: Vec<T>,
        h: LocalOperator<T>,
    ) -> Option<ConvertibilityCertificate<T>> {
        if !is_nontrivial(&h, self.trivial, self.tol) || !(hermitian_eigen(&h).values[0] > self.tol.nonzero) {
            return None;
        }
        let sum = conjugate_sum(&h, self.group, self.j, &indices, &probabilities);
        let residual = (&sum - self.gram).frobenius_norm();
        let cert = ConvertibilityCertificate {
            acting_party: self.j,
            symmetry_indices: indices,
            probabilities,
            target_gram: h,
            residual,
        };
        cert.validate(self.g, self.group, self.tol).ok().map(|_| cert)
    }
}

enum Closed<T> {
    Found(ConvertibilityCertificate<T>),
    NotConvertible,
    Undecided,
}

type Rot<T> = [[T; 3]; 3];

fn norm3<T: Real>(v: [T; 3]) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn sub3<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot3<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Cramer's rule; `None` for a numerically singular matrix.
fn solve3<T: Real>(m: &Rot<T>, b: [T; 3]) -> Option<[T; 3]> {
    let det = |m: &Rot<T>| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(m);
    if !(d.abs() > T::lit(1e-12)) {
        return None;
    }
    let mut out = [T::zero(); 3];
    for (col, o) in out.iter_mut().enumerate() {
        let mut mc = *m;
        for r in 0..3 {
            mc[r][col] = b[r];
        }
        *o = det(&mc) / d;
    }
    Some(out)
}

/// Rotation axis of a proper rotation.
fn rotation_axis<T: Real>(r: &Rot<T>) -> [T; 3] {
    let a = [r[2][1] - r[1][2], r[0][2] - r[2][0], r[1][0] - r[0][1]];
    if norm3(a) > T::lit(1e-8) {
        let n = norm3(a);
        return a.map(|x| x / n);
    }
    // angle 0 or π: columns of R + 1 span the axis
    let mut best = [T::zero(), T::zero(), T::one()];
    let mut best_norm = T::zero();
    for c in 0..3 {
        let mut v = [r[0][c], r[1][c], r[2][c]];
        v[c] += T::one();
        let n = norm3(v);
        if n > best_norm {
            best_norm = n;
            best = v.map(|x| x / n);
        }
    }
    best
}

/// Unit vector orthogonal to `axis`.
fn orthogonal_unit<T: Real>(axis: [T; 3]) -> [T; 3] {
    let k = (0..3).min_by(|&a, &b| axis[a].abs().partial_cmp(&axis[b].abs()).unwrap()).unwrap_or(0);
    let mut e = [T::zero(); 3];
    e[k] = T::one();
    let proj = dot3(e, axis);
    let v = sub3(e, axis.map(|x| x * proj));
    let n = norm3(v);
    v.map(|x| x / n)
}

/// Among the rotations fixing `axis`, finds weights `p` with
/// `Σ p_i R_i w = 0` for `w ⊥ axis`: the origin must lie in the convex hull
/// of the in-plane angles `e^{iθ_i}`. Returns the subset, the weights and `w`.
fn plane_kernel<T: Real>(rots: &[(usize, Rot<T>)], axis: [T; 3], tol: T) -> Option<(Vec<usize>, Vec<T>, [T; 3])> {
    let e1 = orthogonal_unit(axis);
    let e2 = cross3(axis, e1);
    let pts: Vec<(usize, T, T)> = rots
        .iter()
        .filter(|(_, r)| norm3(sub3(rotate(r, axis), axis)) <= tol)
        .map(|(i, r)| {
            let v = rotate(r, e1);
            (*i, dot3(v, e1), dot3(v, e2))
        })
        .collect();
    let half = T::lit(0.5);
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            if ((pts[a].1 + pts[b].1).powi(2) + (pts[a].2 + pts[b].2).powi(2)).sqrt() < tol {
                return Some((vec![pts[a].0, pts[b].0], vec![half, half], e1));
            }
        }
    }
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            for c in b + 1..pts.len() {
                let m =
                    [[pts[a].1, pts[b].1, pts[c].1], [pts[a].2, pts[b].2, pts[c].2], [T::one(), T::one(), T::one()]];
                if let Some(w) = solve3(&m, [T::zero(), T::zero(), T::one()]) {
                    if w.iter().all(|&x| x > tol) {
                        return Some((vec![pts[a].0, pts[b].0, pts[c].0], w.to_vec(), e1));
                    }
                }
            }
        }
    }
    None
}

fn closed_form<T: Real>(ctx: &Context<'_, T>) -> Result<Closed<T>> {
    let tol = ctx.tol;
    let g = operator_to_bloch(ctx.gram, tol.nonzero)?.to_array();
    let rots: Vec<(usize, Rot<T>)> =
        ctx.classes.iter().map(|&i| (i, conjugation_rotation(ctx.group.element(i).operator.factor(ctx.j)))).collect();
    let id_rep = ctx.classes[0];
    let quarter = T::lit(0.25);
    let bound = T::lit(0.5) - tol.nonzero;

    // some admissible rotation moves g: mix it with the identity
    let mut moved_any = false;
    for (i, r) in rots.iter().skip(1) {
        if norm3(sub3(rotate_transpose(r, g), g)) <= tol.nonzero {
            continue;
        }
        moved_any = true;
        let mut eps = T::lit(0.5);
        for _ in 0..40 {
            let mut m = *r;
            for (a, row) in m.iter_mut().enumerate() {
                for (b, x) in row.iter_mut().enumerate() {
                    *x = *x * eps + if a == b { T::one() - eps } else { T::zero() };
                }
            }
            if let Some(h) = solve3(&m, g) {
                if norm3(h) < bound {
                    let hg = gram_from_bloch(BlochVector::from_array(h));
                    if let Some(cert) = ctx.certify(vec![id_rep, *i], vec![T::one() - eps, eps], hg) {
                        return Ok(Closed::Found(cert));
                    }
                }
            }
            eps *= T::lit(0.5);
        }
    }

    let gn = norm3(g);
    if gn > tol.nonzero {
        let axis = g.map(|x| x / gn);
        if let Some((idx, p, w)) = plane_kernel(&rots, axis, tol.nonzero) {
            let t = (quarter - gn * gn).sqrt() * T::lit(0.5);
            let h = [g[0] + w[0] * t, g[1] + w[1] * t, g[2] + w[2] * t];
            let hg = gram_from_bloch(BlochVector::from_array(h));
            if let Some(cert) = ctx.certify(idx, p, hg) {
                return Ok(Closed::Found(cert));
            }
            return Ok(Closed::Undecided);
        }
        return Ok(if moved_any { Closed::Undecided } else { Closed::NotConvertible });
    }

    // G_j maximally mixed: look for a rotation axis whose stabilizing
    // rotations balance out in the orthogonal plane
    for (_, r) in rots.iter().skip(1) {
        let axis = rotation_axis(r);
        if let Some((idx, p, w)) = plane_kernel(&rots, axis, tol.nonzero) {
            let h = [g[0] + w[0] * quarter, g[1] + w[1] * quarter, g[2] + w[2] * quarter];
            let hg = gram_from_bloch(BlochVector::from_array(h));
            if let Some(cert) = ctx.certify(idx, p, hg) {
                return Ok(Closed::Found(cert));
            }
        }
    }
    Ok(Closed::Undecided)
}

/// Orthonormal basis of the Hermitian `d×d` matrices under `Re tr(A†B)`.
fn hermitian_basis<T: Real>(d: usize) -> Vec<LocalOperator<T>> {
    let s = T::one() / T::lit(2.0).sqrt();
    let mut basis = Vec::with_capacity(d * d);
    for k in 0..d {
        basis.push(LocalOperator::from_fn(d, |r, c| {
            if r == k && c == k {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        }));
    }
    for k in 0..d {
        for l in k + 1..d {
            basis.push(LocalOperator::from_fn(d, |r, c| {
                if (r, c) == (k, l) || (r, c) == (l, k) {
                    Complex::new(s, T::zero())
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            }));
            basis.push(LocalOperator::from_fn(d, |r, c| {
                if (r, c) == (k, l) {
                    Complex::new(T::zero(), -s)
                } else if (r, c) == (l, k) {
                    Complex::new(T::zero(), s)
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            }));
        }
    }
    basis
}

fn coords<T: Real>(basis: &[LocalOperator<T>], x: &LocalOperator<T>) -> Vec<T> {
    basis.iter().map(|b| b.inner(x).re).collect()
}

fn combine<T: Real>(basis: &[LocalOperator<T>], x: &[T]) -> LocalOperator<T> {
    let d = basis[0].dim();
    basis.iter().zip(x).fold(LocalOperator::zeros(d), |acc, (b, &xi)| &acc + &b.scale_real(xi))
}

/// Solves `Σ p_i S_i†HS_i = G_j` for Hermitian `H` and tries the least-norm
/// solution followed by small moves along the solution space.
fn try_solve<T: Real>(
    ctx: &Context<'_, T>,
    basis: &[LocalOperator<T>],
    idx: &[usize],
    p: &[T],
) -> Option<ConvertibilityCertificate<T>> {
    let n = basis.len();
    let cols: Vec<Vec<T>> = basis.iter().map(|b| coords(basis, &conjugate_sum(b, ctx.group, ctx.j, idx, p))).collect();
    let rhs = coords(basis, ctx.gram);
    // normal equations as a real symmetric matrix
    let ata = LocalOperator::from_fn(n, |a, b| {
        Complex::new(cols[a].iter().zip(&cols[b]).fold(T::zero(), |acc, (x, y)| acc + *x * *y), T::zero())
    });
    let atb: Vec<T> = cols.iter().map(|c| c.iter().zip(&rhs).fold(T::zero(), |acc, (x, y)| acc + *x * *y)).collect();
    let eig = hermitian_eigen(&ata);
    let top = eig.values.iter().copied().fold(T::zero(), T::max);
    let cutoff = top * T::lit(1e-10);
    let mut x = vec![T::zero(); n];
    let mut null = Vec::new();
    for (k, &lambda) in eig.values.iter().enumerate() {
        let v: Vec<T> = (0..n).map(|r| eig.vectors.get(r, k).re).collect();
        if lambda > cutoff {
            let w = v.iter().zip(&atb).fold(T::zero(), |acc, (a, b)| acc + *a * *b) / lambda;
            for (xi, vi) in x.iter_mut().zip(&v) {
                *xi += w * *vi;
            }
        } else {
            null.push(v);
        }
    }
    let fitted: Vec<T> = (0..n).map(|r| cols.iter().zip(&x).fold(T::zero(), |acc, (c, xi)| acc + c[r] * *xi)).collect();
    let miss = fitted.iter().zip(&rhs).fold(T::zero(), |acc, (a, b)| acc + (*a - *b).powi(2)).sqrt();
    if !(miss < ctx.tol.eq) {
        return None;
    }
    let base = combine(basis, &x).hermitian_part();
    if let Some(cert) = ctx.certify(idx.to_vec(), p.to_vec(), base.clone()) {
        return Some(cert);
    }
    for v in &null {
        let k = combine(basis, v).hermitian_part();
        for t in [0.2, -0.2, 0.1, -0.1, 0.05, -0.05, 0.02, -0.02] {
            let cand = &base + &k.scale_real(T::lit(t));
            if let Some(cert) = ctx.certify(idx.to_vec(), p.to_vec(), cand) {
                return Some(cert);
            }
        }
    }
    None
}

fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for k in 1..=total - (parts - 1) {
        prefix.push(k);
        compositions(total - k, parts - 1, prefix, out);
        prefix.pop();
    }
}

fn subsets(n: usize, k: usize, start: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() == k {
        out.push(prefix.clone());
        return;
    }
    for i in start..n {
        prefix.push(i);
        subsets(n, k, i + 1, prefix, out);
        prefix.pop();
    }
}

fn search<T: Real>(ctx: &Context<'_, T>, cfg: &SearchConfig) -> Result<(Option<ConvertibilityCertificate<T>>, usize)> {
    if !(cfg.grid_step > 0.0 && cfg.grid_step <= 0.5) {
        return Err(Error::ParameterOutOfRange(format!("grid step {} must lie in (0, 1/2]", cfg.grid_step)));
    }
    let basis = hermitian_basis::<T>(ctx.gram.dim());
    let n = ctx.classes.len();
    let max_m = cfg.max_subset.min(n);
    let steps = (1.0 / cfg.grid_step).round() as usize;
    let mut evaluations = 0;
    let mut cache: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    for m in 2..=max_m {
        let mut sets = Vec::new();
        subsets(n, m, 0, &mut Vec::new(), &mut sets);
        let comps = cache.entry(m).or_insert_with(|| {
            let mut c = Vec::new();
            if steps >= m {
                compositions(steps, m, &mut Vec::new(), &mut c);
            }
            c
        });
        for set in &sets {
            let idx: Vec<usize> = set.iter().map(|&s| ctx.classes[s]).collect();
            for comp in comps.iter() {
                if evaluations >= cfg.max_evaluations {
                    return Ok((None, evaluations));
                }
                evaluations += 1;
                let p: Vec<T> = comp.iter().map(|&k| T::lit(k as f64 / steps as f64)).collect();
                if let Some(cert) = try_solve(ctx, &basis, &idx, &p) {
                    return Ok((Some(cert), evaluations));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    for _ in 0..cfg.random_samples {
        if evaluations >= cfg.max_evaluations || max_m < 2 {
            break;
        }
        evaluations += 1;
        let m = rng.random_range(2..=max_m);
        let idx: Vec<usize> = sample(&mut rng, n, m).iter().map(|s| ctx.classes[s]).collect();
        let raw: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = raw.iter().sum();
        let p: Vec<T> = raw.iter().map(|x| T::lit(x / total)).collect();
        if let Some(cert) = try_solve(ctx, &basis, &idx, &p) {
            return Ok((Some(cert), evaluations));
        }
    }
    Ok((None, evaluations))
}

/// One measurement round realizing a certificate on the tracked operator
/// `g` (canonicalized here).
///
/// Outcome `i` applies `A_i = √p_i·√H·S_i^{(j)}·g_j⁻¹` on the acting party,
/// then every other party `k` applies `g_k S_i^{(k)} g_k⁻¹`.
pub fn build_convertibility_round<T: Real>(
    g: &ProductOperator<T>,
    cert: &ConvertibilityCertificate<T>,
    group: &StabilizerGroup<T>,
    tol: Tolerances<T>,
) -> Result<LoccNode<T>> {
    let g = g.canonical();
    cert.validate(&g, group, tol)?;
    let j = cert.acting_party;
    let h = matrix_sqrt_psd(&cert.target_gram, tol.eq)?;
    let inverses = g.inverse()?;
    let mut outcomes = Vec::with_capacity(cert.symmetry_indices.len());
    for (&i, &p) in cert.symmetry_indices.iter().zip(&cert.probabilities) {
        let s = &group.element(i).operator;
        let op = h.matmul(s.factor(j)).matmul(inverses.factor(j)).scale_real(p.sqrt());
        let mut outcome = Outcome::leaf(op);
        for k in (0..g.parties()).filter(|&k| k != j) {
            let u = g.factor(k).matmul(s.factor(k)).matmul(inverses.factor(k));
            if !u.is_unitary(tol.nonzero) {
                return Err(Error::StaleCertificate(format!("correction on party {} is not unitary", k + 1)));
            }
            if proportional(&u, &LocalOperator::identity(u.dim()), tol.eq).is_none() {
                outcome.corrections.insert(k, u);
            }
        }
        outcomes.push(outcome);
    }
    let round = LoccRound { party: j, outcomes };
    let residual = round.completeness_residual();
    if !(residual < tol.nonzero) {
        return Err(Error::Completeness { path: "root".into(), residual: residual.as_f64() });
    }
    Ok(LoccNode::Round(round))
}
