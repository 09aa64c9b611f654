//! Reference arithmetic for integration tests, written against raw
//! row-major arrays so that it shares no code with the library kernels.

#![allow(dead_code)]

use loccforge::protocol::{LoccNode, RoundPath};
use loccforge::{Complex, Operator, Product};

pub type Mat = (usize, Vec<Complex>);

pub fn raw(op: &Operator) -> Mat {
    let d = op.dim();
    (d, (0..d * d).map(|k| op.get(k / d, k % d)).collect())
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let d = a.0;
    let mut out = vec![Complex::new(0.0, 0.0); d * d];
    for r in 0..d {
        for k in 0..d {
            let x = a.1[r * d + k];
            for c in 0..d {
                out[r * d + c] += x * b.1[k * d + c];
            }
        }
    }
    (d, out)
}

pub fn dagger(a: &Mat) -> Mat {
    let d = a.0;
    (d, (0..d * d).map(|k| a.1[(k % d) * d + k / d].conj()).collect())
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (da, db) = (a.0, b.0);
    let d = da * db;
    let mut out = vec![Complex::new(0.0, 0.0); d * d];
    for r in 0..d {
        for c in 0..d {
            out[r * d + c] = a.1[(r / db) * da + c / db] * b.1[(r % db) * db + c % db];
        }
    }
    (d, out)
}

pub fn kron_all(ms: &[Mat]) -> Mat {
    ms[1..].iter().fold(ms[0].clone(), |acc, m| kron(&acc, m))
}

pub fn apply(a: &Mat, v: &[Complex]) -> Vec<Complex> {
    let d = a.0;
    (0..d).map(|r| (0..d).map(|c| a.1[r * d + c] * v[c]).sum()).collect()
}

pub fn identity(d: usize) -> Mat {
    (d, (0..d * d).map(|k| Complex::new(if k / d == k % d { 1.0 } else { 0.0 }, 0.0)).collect())
}

pub fn dist(a: &Mat, b: &Mat) -> f64 {
    a.1.iter().zip(&b.1).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm(v: &[Complex]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn overlap(a: &[Complex], b: &[Complex]) -> Complex {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `|⟨a|b⟩|² / (‖a‖²‖b‖²)`.
pub fn fid(a: &[Complex], b: &[Complex]) -> f64 {
    overlap(a, b).norm_sqr() / (norm(a).powi(2) * norm(b).powi(2))
}

/// Trace-one Gram matrix `g†g / tr(g†g)`.
pub fn gram(g: &Mat) -> Mat {
    let m = mul(&dagger(g), g);
    let t: f64 = (0..m.0).map(|i| m.1[i * m.0 + i].re).sum();
    (m.0, m.1.iter().map(|z| z / t).collect())
}

/// `‖Σ A†A − 1‖` over a list of measurement operators.
pub fn completeness(ops: &[Mat]) -> f64 {
    let d = ops[0].0;
    let mut sum = (d, vec![Complex::new(0.0, 0.0); d * d]);
    for a in ops {
        let m = mul(&dagger(a), a);
        for (s, x) in sum.1.iter_mut().zip(&m.1) {
            *s += x;
        }
    }
    dist(&sum, &identity(d))
}

/// Product operator as one full matrix.
pub fn full(g: &Product) -> Mat {
    kron_all(&g.factors().iter().map(raw).collect::<Vec<_>>())
}

/// The embedding `1 ⊗ … ⊗ A ⊗ … ⊗ 1` of a local operator.
pub fn embed(op: &Operator, party: usize, dims: &[usize]) -> Mat {
    let ms: Vec<Mat> = dims.iter().enumerate().map(|(i, &d)| if i == party { raw(op) } else { identity(d) }).collect();
    kron_all(&ms)
}

/// Leaf path, unnormalized final vector and probability, walking the tree on
/// the full state vector.
pub fn direct_leaves(node: &LoccNode<f64>, psi: &[Complex], dims: &[usize]) -> Vec<(RoundPath, Vec<Complex>, f64)> {
    let n = norm(psi);
    let start: Vec<Complex> = psi.iter().map(|z| z / n).collect();
    let mut out = Vec::new();
    walk(node, start, RoundPath::default(), dims, &mut out);
    out
}

fn walk(
    node: &LoccNode<f64>,
    v: Vec<Complex>,
    path: RoundPath,
    dims: &[usize],
    out: &mut Vec<(RoundPath, Vec<Complex>, f64)>,
) {
    match node {
        LoccNode::Leaf => {
            let p = norm(&v).powi(2);
            out.push((path, v, p));
        }
        LoccNode::Round(r) => {
            for (i, o) in r.outcomes.iter().enumerate() {
                let mut w = apply(&embed(&o.operator, r.party, dims), &v);
                for (&k, u) in &o.corrections {
                    w = apply(&embed(u, k, dims), &w);
                }
                walk(&o.child, w, path.child(i), dims, out);
            }
        }
    }
}
