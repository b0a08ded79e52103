//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use cpmult::linalg::{CMatrix, C64, ZERO};
use cpmult::random::{self, SeededRng};
use cpmult::{
    AlgElement, Algebra, CBMap, DynamicalSystem, HSMultiplier, Kernel, SchurMultiplierFn,
};
use rand::Rng;

/// PSD test by pivoted Cholesky; independent of the eigensolver.
pub fn psd_oracle(m: &CMatrix, tol: f64) -> bool {
    let n = m.rows();
    if m.hermitian_residual() > tol * m.max_abs().max(1.0) {
        return false;
    }
    let scale = m.max_abs().max(1.0);
    let mut a = m.hermitian_part();
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let (pos, &piv) = active
            .iter()
            .enumerate()
            .max_by(|x, y| a[(*x.1, *x.1)].re.partial_cmp(&a[(*y.1, *y.1)].re).unwrap())
            .unwrap();
        let d = a[(piv, piv)].re;
        if d < -tol * scale * n as f64 {
            return false;
        }
        if d <= tol * scale {
            // the remaining block must vanish
            return active.iter().all(|&i| {
                active
                    .iter()
                    .all(|&j| a[(i, j)].norm() <= (tol * scale).sqrt() * 10.0)
            });
        }
        active.remove(pos);
        for &i in &active {
            for &j in &active {
                let upd = a[(i, piv)] * a[(piv, j)] / d;
                a[(i, j)] -= upd;
            }
        }
    }
    true
}

pub fn algebra_choices() -> Vec<Algebra> {
    vec![
        Algebra::full(1),
        Algebra::full(2),
        Algebra::new(vec![2, 1]).unwrap(),
    ]
}

pub fn random_element(rng: &mut SeededRng, alg: &Algebra) -> AlgElement {
    let blocks = alg
        .blocks()
        .iter()
        .map(|&n| random::gaussian_matrix(rng, n, n))
        .collect();
    alg.element(blocks).unwrap()
}

pub fn random_positive(rng: &mut SeededRng, alg: &Algebra) -> AlgElement {
    let b = random_element(rng, alg);
    b.adjoint().mul(&b)
}

/// `Σ_α K_α a K_α*` with block-respecting Kraus operators, so images stay in `target`.
pub fn random_cp_map(
    rng: &mut SeededRng,
    source: &Algebra,
    target: &Algebra,
    count: usize,
) -> CBMap {
    let d = source.rep_dim();
    let kraus: Vec<Vec<CMatrix>> = target
        .blocks()
        .iter()
        .map(|&m| {
            (0..count)
                .map(|_| random::gaussian_matrix(rng, m, d))
                .collect()
        })
        .collect();
    CBMap::from_fn(source, target, |a| {
        let x = a.embed();
        let blocks = kraus
            .iter()
            .map(|ks| {
                let m = ks[0].rows();
                let mut acc = CMatrix::zeros(m, m);
                for k in ks {
                    acc = &acc + &k.matmul(&x).matmul(&k.adjoint());
                }
                acc
            })
            .collect();
        target.element(blocks).unwrap()
    })
}

/// Block-diagonal unitary of `alg`.
pub fn random_unitary_element(rng: &mut SeededRng, alg: &Algebra) -> AlgElement {
    let blocks = alg
        .blocks()
        .iter()
        .map(|&n| random::unitary(rng, n))
        .collect();
    alg.element(blocks).unwrap()
}

/// Unital, trace-preserving CP map: a convex mix of inner automorphisms and
/// the trace-averaging map `a ↦ τ(a)·1` of the normalized trace.
pub fn random_unital_cp(rng: &mut SeededRng, alg: &Algebra) -> CBMap {
    let terms = 1 + rng.random_range(0..3usize);
    let mut weights: Vec<f64> = (0..=terms).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let us: Vec<AlgElement> = (0..terms)
        .map(|_| random_unitary_element(rng, alg))
        .collect();
    let d = alg.rep_dim() as f64;
    CBMap::from_fn(alg, alg, |a| {
        let mut acc = alg.zero();
        for (u, w) in us.iter().zip(&weights) {
            acc = acc.add(&u.mul(a).mul(&u.adjoint()).scale(C64::new(*w, 0.0)));
        }
        let tr: C64 = a.blocks().iter().map(|b| b.trace()).sum::<C64>() / d;
        acc.add(&alg.unit().scale(tr * weights[terms]))
    })
}

/// Hermitian kernel; `kind` 0 = Gram (pd), 1 = generic hermitian,
/// 2 = rank-deficient Gram.
pub fn random_hermitian_kernel(rng: &mut SeededRng, alg: &Algebra, m: usize, kind: u8) -> Kernel {
    match kind {
        0 | 2 => {
            let r = if kind == 0 { m + 1 } else { 1 };
            let b: Vec<Vec<AlgElement>> = (0..m)
                .map(|_| (0..r).map(|_| random_element(rng, alg)).collect())
                .collect();
            Kernel::from_fn(alg, m, |x, y| {
                let mut acc = alg.zero();
                for (bx, by) in b[x].iter().zip(&b[y]) {
                    acc = acc.add(&bx.adjoint().mul(by));
                }
                acc
            })
            .unwrap()
        }
        _ => {
            let vals: Vec<Vec<AlgElement>> = (0..m)
                .map(|_| (0..m).map(|_| random_element(rng, alg)).collect())
                .collect();
            Kernel::from_fn(alg, m, |x, y| {
                if x <= y {
                    let v = &vals[x][y];
                    if x == y {
                        v.add(&v.adjoint()).scale(C64::new(0.5, 0.0))
                    } else {
                        v.clone()
                    }
                } else {
                    vals[y][x].adjoint()
                }
            })
            .unwrap()
        }
    }
}

/// `(k(x_i, x_j))_{i,j}` for a tuple of points.
pub fn kernel_tuple_matrix(k: &Kernel, tuple: &[usize]) -> CMatrix {
    let d = k.algebra().rep_dim();
    let n = tuple.len();
    let mut m = CMatrix::zeros(n * d, n * d);
    for (i, &x) in tuple.iter().enumerate() {
        for (j, &y) in tuple.iter().enumerate() {
            m.set_submatrix(i * d, j * d, &k.get(x, y).embed());
        }
    }
    m
}

/// Random tuple covering every point, shuffled, with repetitions.
pub fn covering_tuple(rng: &mut SeededRng, m: usize) -> Vec<usize> {
    let mut t: Vec<usize> = (0..m).collect();
    for _ in 0..rng.random_range(0..3usize) {
        t.push(rng.random_range(0..m));
    }
    for i in (1..t.len()).rev() {
        let j = rng.random_range(0..=i);
        t.swap(i, j);
    }
    t
}

/// Ingredients of `φ(x,y)(a) = V(x)* ρ(a) V(y)` with `ρ` a sum of block representations.
pub struct Dilation {
    pub rep_blocks: Vec<usize>,
    pub v: Vec<CMatrix>,
}

pub fn random_dilation(rng: &mut SeededRng, alg: &Algebra, m: usize) -> Dilation {
    let copies = 1 + rng.random_range(0..3usize);
    let rep_blocks: Vec<usize> = (0..copies)
        .map(|_| rng.random_range(0..alg.num_blocks()))
        .collect();
    let dim: usize = rep_blocks.iter().map(|&k| alg.block_size(k)).sum();
    let v = (0..m)
        .map(|_| random::gaussian_matrix(rng, dim, alg.rep_dim()))
        .collect();
    Dilation { rep_blocks, v }
}

pub fn rho(dil: &Dilation, a: &AlgElement) -> CMatrix {
    let parts: Vec<CMatrix> = dil.rep_blocks.iter().map(|&k| a.block(k).clone()).collect();
    CMatrix::direct_sum(&parts)
}

pub fn multiplier_from_dilation(alg: &Algebra, dil: &Dilation) -> SchurMultiplierFn {
    let d = alg.rep_dim();
    let full = Algebra::full(d);
    SchurMultiplierFn::from_fn(alg, dil.v.len(), |x, y| {
        CBMap::from_fn(alg, &full, |a| {
            let img = dil.v[x].adjoint().matmul(&rho(dil, a)).matmul(&dil.v[y]);
            full.element(vec![img]).unwrap()
        })
    })
    .unwrap()
}

/// Choi matrix of the map at `(x,x)`, i.e. `(φ(x,x)(ι_k(e_pq)))_{p,q}`: the
/// positivity test matrix on the tuple `(x, …, x)` with inputs `e_pq`.
pub fn repeated_point_matrix(phi: &SchurMultiplierFn, x: usize, k: usize) -> CMatrix {
    let alg = phi.algebra();
    let n = alg.block_size(k);
    let d = alg.rep_dim();
    let mut m = CMatrix::zeros(n * d, n * d);
    for p in 0..n {
        for q in 0..n {
            m.set_submatrix(
                p * d,
                q * d,
                &phi.get(x, x).apply(&alg.matrix_unit(k, p, q)).embed(),
            );
        }
    }
    m
}

/// Random positive multiplier candidates on a system, from several
/// constructions known to give completely positive multipliers.
pub fn random_cp_multiplier(rng: &mut SeededRng, sys: &DynamicalSystem) -> HSMultiplier {
    let alg = sys.algebra();
    let g = sys.group();
    match rng.random_range(0..3u8) {
        0 => {
            let fset: Vec<usize> = g.elements().filter(|_| rng.random_bool(0.6)).collect();
            let fset = if fset.is_empty() {
                vec![g.identity()]
            } else {
                fset
            };
            let phi = random_cp_map(rng, alg, alg, 2);
            hf_oracle(sys, &fset, &phi)
        }
        1 => {
            // conjugation by a crossed element y: x ↦ y* x y, then h of that map
            let y = cpmult::hsmult::random_crossed(sys, rng);
            let ys = sys.star(&y);
            let map = cpmult::CrossedMap::from_fn(sys, |x| sys.multiply(&sys.multiply(&ys, x), &y));
            cpmult::hsmult::h_from_map(sys, &map)
        }
        _ => {
            let w: Vec<f64> = g.elements().map(|_| rng.random::<f64>()).collect();
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            let w: Vec<f64> = w.iter().map(|x| x / norm).collect();
            let phi = random_unital_cp(rng, alg);
            amenable_oracle(sys, &w, &phi)
        }
    }
}

/// `h_F(s) = Σ_{p ∈ F, s⁻¹p ∈ F} α_p Φ α_{p⁻¹}` by direct summation.
pub fn hf_oracle(sys: &DynamicalSystem, fset: &[usize], phi: &CBMap) -> HSMultiplier {
    let g = sys.group();
    let alg = sys.algebra();
    HSMultiplier::from_fn(sys, |s| {
        CBMap::from_fn(alg, alg, |a| {
            let mut acc = alg.zero();
            for &p in fset {
                if fset.contains(&g.mul(g.inv(s), p)) {
                    acc = acc.add(&sys.alpha(p, &phi.apply(&sys.alpha(g.inv(p), a))));
                }
            }
            acc
        })
    })
    .unwrap()
}

/// Multiplier of scalar partition weights `T(p) = w_p·1` by direct summation.
pub fn amenable_oracle(sys: &DynamicalSystem, w: &[f64], phi: &CBMap) -> HSMultiplier {
    let g = sys.group();
    let alg = sys.algebra();
    HSMultiplier::from_fn(sys, |s| {
        CBMap::from_fn(alg, alg, |a| {
            let mut acc = alg.zero();
            for p in g.elements() {
                let c = w[p] * w[g.mul(g.inv(s), p)];
                acc = acc.add(
                    &sys.alpha(p, &phi.apply(&sys.alpha(g.inv(p), a)))
                        .scale(C64::new(c, 0.0)),
                );
            }
            acc
        })
    })
    .unwrap()
}

/// A multiplier whose `F(e)` has a clearly non-positive unit image or Choi
/// matrix: `F(e) − μ·id` with `μ` beyond the Choi norm of `F(e)`.
pub fn perturb_negative(sys: &DynamicalSystem, f: &HSMultiplier) -> HSMultiplier {
    let e = sys.identity();
    let fe = f.value(e);
    let choi_norm: f64 = fe
        .choi()
        .unwrap()
        .blocks
        .iter()
        .map(|c| c.frobenius_norm())
        .fold(0.0, f64::max);
    let id = CBMap::identity(sys.algebra());
    let mu = choi_norm + 0.5;
    HSMultiplier::from_fn(sys, |t| {
        if t == e {
            fe.add(&id.scale(C64::new(-mu, 0.0)))
        } else {
            f.value(t).clone()
        }
    })
    .unwrap()
}

pub fn zero() -> C64 {
    ZERO
}
