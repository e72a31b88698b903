//! Invariant checks shared by the property tests and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symplie::algebra::{AlgebraDef, Bindings, Catalog};
use symplie::exterior::Form;
use symplie::ring::{rat, RatFunc, Rational};
use symplie::symplectic::{decide_symplectic, prop2_combine, solve_closed_space, Mode};

pub type Check = Result<(), String>;

/// Coefficients for [`form`]: numerator and positive denominator.
pub type Coeffs = Vec<(i64, i64)>;

pub fn catalog() -> &'static Catalog {
    static C: OnceLock<Catalog> = OnceLock::new();
    C.get_or_init(Catalog::bundled)
}

/// One instance of every Jacobi-valid catalog entry at its first canonical sample.
pub fn instances() -> &'static Vec<AlgebraDef> {
    static P: OnceLock<Vec<AlgebraDef>> = OnceLock::new();
    P.get_or_init(|| {
        catalog()
            .iter()
            .filter(|a| a.jacobi_check(&[]).unwrap().passed())
            .filter_map(|a| {
                let b = a.canonical_samples(1, |_| true).into_iter().next()?;
                Some(instantiate(a, &b))
            })
            .collect()
    })
}

pub fn instantiate(a: &AlgebraDef, b: &Bindings) -> AlgebraDef {
    let names = b.iter().map(|(k, v)| (k.name().to_string(), v.clone())).collect();
    a.instantiate(&names).unwrap()
}

fn subsets(dim: usize, p: usize) -> Vec<Vec<usize>> {
    (0u32..1 << dim)
        .filter(|m| m.count_ones() as usize == p)
        .map(|m| (0..dim).filter(|i| m & (1 << i) != 0).map(|i| i + 1).collect())
        .collect()
}

/// A homogeneous `p`-form; the `k`-th basis element in bitmask order gets `coeffs[k]`.
pub fn form(dim: usize, p: usize, coeffs: &[(i64, i64)]) -> Form {
    let mut f = Form::zero(dim);
    for (idx, (n, d)) in subsets(dim, p).iter().zip(coeffs) {
        let t = Form::term(dim, idx, RatFunc::constant(rat(*n, *d))).unwrap();
        f = f.add(&t).unwrap();
    }
    f
}

pub fn random_coeffs(rng: &mut ChaCha8Rng) -> Coeffs {
    (0..20).map(|_| (rng.gen_range(-4..=4), rng.gen_range(1..=3))).collect()
}

fn sign(pq: usize) -> RatFunc {
    RatFunc::int(if pq.is_multiple_of(2) { 1 } else { -1 })
}

fn scale(f: &Form, c: Rational) -> Form {
    f.scale(&RatFunc::constant(c))
}

fn factorial(n: usize) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * rat(k, 1))
}

/// Determinant by fraction-exact elimination.
pub fn det(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut d = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else { return Rational::zero() };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c].clone();
        let pivot_row = m[c].clone();
        for row in m.iter_mut().skip(c + 1) {
            let f = row[c].clone() / pivot_row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                *x -= p.clone() * f.clone();
            }
        }
    }
    d
}

pub fn graded_commutative(dim: usize, p: usize, q: usize, a: &[(i64, i64)], b: &[(i64, i64)]) -> Check {
    let x = form(dim, p, a);
    let y = form(dim, q, b);
    let lhs = x.wedge(&y).unwrap();
    let rhs = y.wedge(&x).unwrap().scale(&sign(p * q));
    (lhs == rhs).then_some(()).ok_or_else(|| format!("x^y != (-1)^pq y^x for x = {x}, y = {y}"))
}

pub fn associative(dim: usize, p: usize, a: &[(i64, i64)], b: &[(i64, i64)], c: &[(i64, i64)]) -> Check {
    let (x, y, z) = (form(dim, p, a), form(dim, 1, b), form(dim, 2, c));
    let l = x.wedge(&y).unwrap().wedge(&z).unwrap();
    let r = x.wedge(&y.wedge(&z).unwrap()).unwrap();
    (l == r).then_some(()).ok_or_else(|| format!("(x^y)^z != x^(y^z) for x = {x}, y = {y}, z = {z}"))
}

/// Leibniz rule and `d^2 = 0` on the `k`-th catalog instance.
pub fn leibniz_and_d2(k: usize, p: usize, q: usize, a: &[(i64, i64)], b: &[(i64, i64)]) -> Check {
    let alg = &instances()[k % instances().len()];
    let d = |f: &Form| alg.differential(f).unwrap();
    let x = form(alg.dim, p, a);
    let y = form(alg.dim, q, b);
    let lhs = d(&x.wedge(&y).unwrap());
    let rhs = d(&x).wedge(&y).unwrap().add(&x.wedge(&d(&y)).unwrap().scale(&sign(p))).unwrap();
    if lhs != rhs {
        return Err(format!("{}: Leibniz fails for x = {x}, y = {y}", alg.label()));
    }
    if !d(&d(&x)).is_zero() {
        return Err(format!("{}: d^2 x != 0 for x = {x}", alg.label()));
    }
    Ok(())
}

/// `Pf^2 = det` for a constant 2-form in dimension `2 * half`; the
/// Pfaffian is read off the top power.
pub fn pfaffian_squared_is_det(half: usize, a: &[(i64, i64)]) -> Check {
    let dim = 2 * half;
    let w = form(dim, 2, a);
    let pf = w.top_power(half).unwrap().volume_coefficient().constant_value().unwrap() / factorial(half);
    let mut m = vec![vec![Rational::zero(); dim]; dim];
    for i in 1..=dim {
        for j in i + 1..=dim {
            let c = w.coefficient(&[i, j]).constant_value().unwrap();
            m[i - 1][j - 1] = c.clone();
            m[j - 1][i - 1] = -c;
        }
    }
    let (sq, dt) = (pf.clone() * pf, det(m));
    (sq == dt).then_some(()).ok_or_else(|| format!("Pf^2 = {sq}, det = {dt} for {w}"))
}

/// An odd-dimensional summand with a closed generator and the closed
/// 2-forms that avoid it.
pub struct Summand {
    pub alg: AlgebraDef,
    pub closed: usize,
    pub basis: Vec<Form>,
}

pub fn summands() -> &'static Vec<Summand> {
    static S: OnceLock<Vec<Summand>> = OnceLock::new();
    S.get_or_init(|| {
        let c = catalog();
        let mut algs: Vec<AlgebraDef> = ["A3_4(-1)", "A3_5(0)", "A3_4(1/2)", "A3_2", "A3_3", "L1", "g5_36", "g5_37"]
            .iter()
            .map(|e| c.resolve(e).unwrap())
            .collect();
        for a in c.family("g5_") {
            for b in a.canonical_samples(2, |_| true) {
                algs.push(instantiate(a, &b));
            }
        }
        let mut out = Vec::new();
        for alg in algs {
            if !alg.jacobi_check(&[]).unwrap().passed() {
                continue;
            }
            let sol = solve_closed_space(&alg, Mode::Instantiated).unwrap().remove(0);
            for closed in alg.closed_generators() {
                let basis: Vec<Form> = sol
                    .kernel_basis
                    .iter()
                    .filter(|f| f.terms().all(|(k, _)| !k.contains(&(closed as u8))))
                    .cloned()
                    .collect();
                out.push(Summand { alg: alg.clone(), closed, basis });
            }
        }
        out
    })
}

fn theta(s: &Summand, weights: &[(i64, i64)]) -> Form {
    let mut t = Form::zero(s.alg.dim);
    for (b, (n, d)) in s.basis.iter().zip(weights) {
        t = t.add(&scale(b, rat(*n, *d))).unwrap();
    }
    t
}

fn power_or_one(t: &Form, n: usize, offset: usize, dim: usize) -> Form {
    if n == 0 {
        Form::scalar(dim, RatFunc::one())
    } else {
        t.top_power(n).unwrap().shift(offset, dim).unwrap()
    }
}

/// The direct-sum construction on summands `i` and `j` of the pool.
/// `Ok(false)` when the drawn pair does not meet the hypotheses.
pub fn direct_sum_construction(i: usize, j: usize, a: &[(i64, i64)], b: &[(i64, i64)]) -> Result<bool, String> {
    let pool = summands();
    let (s1, s2) = (&pool[i % pool.len()], &pool[j % pool.len()]);
    let (n, m) = (s1.alg.dim / 2, s2.alg.dim / 2);
    if s1.alg.dim + s2.alg.dim > 8 {
        return Ok(false);
    }
    let (t1, t2) = (theta(s1, a), theta(s2, b));
    if (n > 0 && t1.top_power(n).unwrap().is_zero()) || (m > 0 && t2.top_power(m).unwrap().is_zero()) {
        return Ok(false);
    }
    let what = format!("{} (w{}) + {} (w{})", s1.alg.label(), s1.closed, s2.alg.label(), s2.closed);
    let (sum, eta) = prop2_combine(&s1.alg, s1.closed, &t1, &s2.alg, s2.closed, &t2).map_err(|e| format!("{what}: {e}"))?;
    if !sum.differential(&eta).unwrap().is_zero() {
        return Err(format!("{what}: combined form {eta} is not closed"));
    }
    // eta^(n+m+1) = (n+m+1)!/(n! m!) theta^n ^ theta'^m ^ w_c ^ w'_c'
    let dim = sum.dim;
    let cc = Form::term(dim, &[s1.closed, s1.alg.dim + s2.closed], RatFunc::one()).unwrap();
    let expected = power_or_one(&t1, n, 0, dim)
        .wedge(&power_or_one(&t2, m, s1.alg.dim, dim))
        .unwrap()
        .wedge(&cc)
        .unwrap();
    let expected = scale(&expected, factorial(n + m + 1) / (factorial(n) * factorial(m)));
    let top = eta.top_power(n + m + 1).unwrap();
    if top.is_zero() || top != expected {
        return Err(format!("{what}: top power {top}, expected {expected}"));
    }
    Ok(true)
}

const GRID: [(i64, i64); 6] = [(-2, 1), (-1, 1), (0, 1), (1, 1), (2, 1), (1, 2)];

/// Random admissible points drawn from the grid.
fn grid_points(alg: &AlgebraDef, count: usize, rng: &mut ChaCha8Rng) -> Vec<Bindings> {
    let mut out = Vec::new();
    for _ in 0..count * 40 {
        if out.len() == count {
            break;
        }
        let b: Bindings = alg
            .params
            .iter()
            .map(|p| {
                let (n, d) = GRID[rng.gen_range(0..GRID.len())];
                (p.var.clone(), rat(n, d))
            })
            .collect();
        if alg.check_constraints(&b).is_ok() {
            out.push(b);
        }
    }
    out
}

/// Every parametric family the tables analyse, Jacobi-valid ones only.
pub fn parametric_families() -> Vec<String> {
    let c = catalog();
    let mut out: Vec<String> = c.family("N6_").iter().map(|a| a.name.clone()).collect();
    out.extend(c.family("g5_").iter().map(|a| format!("{}+L1", a.name)));
    let a3 = ["A3_1", "A3_2", "A3_3", "A3_4", "A3_5"];
    for (i, x) in a3.iter().enumerate() {
        out.extend(a3[i..].iter().map(|y| format!("{x}+{y}")));
    }
    out.into_iter()
        .filter(|e| {
            let a = c.resolve(e).unwrap();
            !a.params.is_empty() && a.jacobi_check(&[]).unwrap().passed()
        })
        .collect()
}

/// At `per_family` random grid points of every parametric family: exactly
/// one closure leaf and one report contain the point, and they agree with
/// the instantiated computation. Returns the number of points checked.
pub fn branch_cover(seed: u64, per_family: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut problems = Vec::new();
    let mut checked = 0;
    for expr in parametric_families() {
        let alg = catalog().resolve(&expr).unwrap();
        let leaves = solve_closed_space(&alg, Mode::Branching).unwrap();
        let reports = decide_symplectic(&alg, Mode::Branching).unwrap();
        let points = grid_points(&alg, per_family, &mut rng);
        if points.len() < per_family {
            problems.push(format!("{expr}: only {} admissible grid points", points.len()));
        }
        for b in points {
            checked += 1;
            let inst = instantiate(&alg, &b);
            let kernel = solve_closed_space(&inst, Mode::Instantiated).unwrap()[0].free.len();
            let holding: Vec<_> = leaves.iter().filter(|l| l.contains(&b)).collect();
            if holding.len() != 1 {
                problems.push(format!("{expr} at {b:?}: {} closure leaves contain the point", holding.len()));
                continue;
            }
            if holding[0].free.len() != kernel {
                problems.push(format!(
                    "{expr} at {b:?}: leaf [{}] has {} closed forms, instance has {kernel}",
                    holding[0].branch_text(),
                    holding[0].free.len()
                ));
            }
            let here = decide_symplectic(&inst, Mode::Instantiated).unwrap()[0].symplectic;
            let r: Vec<_> = reports.iter().filter(|r| r.contains(&b)).collect();
            if r.len() != 1 {
                problems.push(format!("{expr} at {b:?}: {} report branches contain the point", r.len()));
            } else if r[0].symplectic != here {
                problems.push(format!(
                    "{expr} at {b:?}: branch [{}] says symplectic={}, instance says {here}",
                    r[0].branch_text(),
                    r[0].symplectic
                ));
            }
        }
    }
    if problems.is_empty() {
        Ok(checked)
    } else {
        Err(problems.join("\n"))
    }
}

/// Even-dimensional instances plus the special parameter values that carry
/// symplectic forms.
pub fn tested_algebras() -> Vec<AlgebraDef> {
    let mut out: Vec<AlgebraDef> = instances().iter().filter(|a| a.dim % 2 == 0).cloned().collect();
    for e in ["A3_4(-1)+A3_4(-1)", "g5_37+L1", "N6_1(2,3/2,-1,0)", "N6_28", "N6_38", "N6_20(0,-1)"] {
        out.push(catalog().resolve(e).unwrap());
    }
    out
}

/// `decide_symplectic` under `perms` random relabelings of each tested
/// algebra. Returns the number of algebras checked.
pub fn permutation_invariance(seed: u64, perms: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut problems = Vec::new();
    let algs = tested_algebras();
    for alg in &algs {
        let base = decide_symplectic(alg, Mode::Instantiated).unwrap().remove(0);
        for _ in 0..perms {
            let mut perm: Vec<usize> = (1..=alg.dim).collect();
            perm.shuffle(&mut rng);
            let r = decide_symplectic(&alg.relabel(&perm).unwrap(), Mode::Instantiated).unwrap().remove(0);
            if (r.symplectic, r.closed_space_dim, r.exact_symplectic, r.j0)
                != (base.symplectic, base.closed_space_dim, base.exact_symplectic, base.j0)
            {
                problems.push(format!("{} under {perm:?}", alg.label()));
            }
        }
    }
    if problems.is_empty() {
        Ok(algs.len())
    } else {
        Err(problems.join("\n"))
    }
}

/// A random element of the span of the `d w_k` with weights from the grid.
pub fn random_exact_form(alg: &AlgebraDef, rng: &mut ChaCha8Rng) -> Form {
    let mut l = Form::zero(alg.dim);
    for f in &alg.mc {
        let (n, d) = GRID[rng.gen_range(0..GRID.len())];
        l = l.add(&scale(f, rat(n * 7 + 3, d))).unwrap();
    }
    l
}

pub fn no_bindings() -> BTreeMap<symplie::ring::Var, Rational> {
    BTreeMap::new()
}
