//! Double description for cones `{y : E y = 0, A y >= 0}` with lineality,
//! in exact integer arithmetic.

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::{
    echelon, is_trivially_true, normalize_inequality, primitive, reduce_against, row_cmp, to_primitive_integers,
    LinearSystem, Row,
};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DdOptions {
    /// Abort once an intermediate ray list exceeds this size.
    pub max_rays: usize,
}

impl Default for DdOptions {
    fn default() -> Self {
        Self { max_rays: 500_000 }
    }
}

/// Extreme rays modulo the lineality space, plus a basis of that space.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConeGenerators {
    pub rays: Vec<Vec<BigInt>>,
    pub lines: Vec<Vec<BigInt>>,
}

struct Ray {
    v: Vec<BigInt>,
    zero: FixedBitSet,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// s * u - t * w
fn combine(s: &BigInt, u: &[BigInt], t: &BigInt, w: &[BigInt]) -> Vec<BigInt> {
    primitive(u.iter().zip(w).map(|(a, b)| s * a - t * b).collect())
}

/// Generators of `{y in Z^dim : eq . y = 0, ineq . y >= 0}`. Inequalities are
/// inserted in lexicographic order of their rows.
pub fn cone_generators(
    dim: usize,
    eqs: &[Vec<BigInt>],
    ineqs: &[Vec<BigInt>],
    opts: &DdOptions,
) -> Result<ConeGenerators> {
    let mut eq_rank = 0;
    let mut lines: Vec<Vec<BigInt>> = (0..dim)
        .map(|i| (0..dim).map(|j| BigInt::from((i == j) as i32)).collect())
        .collect();
    for e in eqs {
        if let Some(k) = lines.iter().position(|l| !dot(e, l).is_zero()) {
            eq_rank += 1;
            let l0 = lines.swap_remove(k);
            let s0 = dot(e, &l0);
            for l in lines.iter_mut() {
                let s = dot(e, l);
                if !s.is_zero() {
                    *l = combine(&s0, l, &s, &l0);
                }
            }
        }
    }

    let mut order: Vec<&Vec<BigInt>> = ineqs.iter().collect();
    order.sort();
    order.dedup();
    let n_con = order.len();
    let mut rays: Vec<Ray> = Vec::new();
    for (k, a) in order.into_iter().enumerate() {
        if let Some(pos) = lines.iter().position(|l| !dot(a, l).is_zero()) {
            let mut l0 = lines.swap_remove(pos);
            let mut s0 = dot(a, &l0);
            if s0.is_negative() {
                l0.iter_mut().for_each(|v| *v = -v.clone());
                s0 = -s0;
            }
            for l in lines.iter_mut() {
                let s = dot(a, l);
                if !s.is_zero() {
                    *l = combine(&s0, l, &s, &l0);
                }
            }
            for r in rays.iter_mut() {
                let s = dot(a, &r.v);
                if !s.is_zero() {
                    r.v = combine(&s0, &r.v, &s, &l0);
                }
                r.zero.insert(k);
            }
            let mut zero = FixedBitSet::with_capacity(n_con);
            zero.insert_range(..k);
            rays.push(Ray { v: l0, zero });
            continue;
        }

        let vals: Vec<BigInt> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        if minus.is_empty() {
            for (r, v) in rays.iter_mut().zip(&vals) {
                if v.is_zero() {
                    r.zero.insert(k);
                }
            }
            continue;
        }
        // pointed part has dimension dim - rank(eqs) - lines
        let need = (dim - eq_rank - lines.len()).saturating_sub(2);
        let rays_ref = &rays;
        let vals_ref = &vals;
        let new: Vec<Ray> = plus
            .par_iter()
            .flat_map_iter(|&p| {
                minus.iter().filter_map(move |&m| {
                    let mut common = rays_ref[p].zero.clone();
                    common.intersect_with(&rays_ref[m].zero);
                    if common.count_ones(..) < need {
                        return None;
                    }
                    let blocked = rays_ref
                        .iter()
                        .enumerate()
                        .any(|(i, r)| i != p && i != m && common.is_subset(&r.zero));
                    if blocked {
                        return None;
                    }
                    let v = combine(&vals_ref[p], &rays_ref[m].v, &vals_ref[m], &rays_ref[p].v);
                    common.insert(k);
                    Some(Ray { v, zero: common })
                })
            })
            .collect();
        let mut next = Vec::with_capacity(rays.len() - minus.len() + new.len());
        for (mut r, v) in rays.into_iter().zip(vals) {
            if v.is_negative() {
                continue;
            }
            if v.is_zero() {
                r.zero.insert(k);
            }
            next.push(r);
        }
        next.extend(new);
        if next.len() > opts.max_rays {
            return Err(Error::EnumerationCap(format!(
                "double description exceeded {} rays after {} of {n_con} constraints",
                opts.max_rays,
                k + 1
            )));
        }
        rays = next;
    }
    Ok(ConeGenerators { rays: rays.into_iter().map(|r| r.v).collect(), lines })
}

/// Vertices, rays and lines of a polyhedron.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VRep {
    pub vertices: Vec<Vec<Rational>>,
    pub rays: Vec<Vec<Rational>>,
    pub lines: Vec<Vec<Rational>>,
}

fn to_rational(v: &[BigInt]) -> Vec<Rational> {
    v.iter().map(|x| Rational::from_integer(x.clone())).collect()
}

/// Generators of `{x : sys}` via the homogenized cone over `(x, t)`.
/// Vertices are sorted lexicographically; rays are primitive integer vectors.
pub fn h_to_v(sys: &LinearSystem, opts: &DdOptions) -> Result<VRep> {
    sys.check_widths()?;
    let d = sys.dim();
    let hom = |r: &Row| {
        let mut v: Vec<Rational> = r.a.clone();
        v.push(r.c.clone());
        to_primitive_integers(&v)
    };
    let eqs: Vec<Vec<BigInt>> = sys.equalities.iter().map(hom).collect();
    let mut ineqs: Vec<Vec<BigInt>> = sys.inequalities.iter().map(hom).collect();
    let mut t_pos = vec![BigInt::zero(); d + 1];
    t_pos[d] = BigInt::from(1);
    ineqs.push(t_pos);
    let gens = cone_generators(d + 1, &eqs, &ineqs, opts)?;
    let mut out = VRep::default();
    for r in gens.rays {
        let t = r[d].clone();
        if t.is_zero() {
            out.rays.push(to_rational(&r[..d]));
        } else {
            let t = Rational::from_integer(t);
            out.vertices.push(r[..d].iter().map(|x| Rational::from_integer(x.clone()) / &t).collect());
        }
    }
    // lines lie in t = 0 because t >= 0 was imposed
    out.lines = gens.lines.iter().map(|l| to_rational(&l[..d])).collect();
    out.vertices.sort();
    out.rays.sort();
    Ok(out)
}

/// Irredundant canonical H-representation of `conv(vertices) + cone(rays) +
/// span(lines)`. With no vertices the result is the empty set, `-1 >= 0`.
pub fn v_to_h(labels: Vec<String>, v: &VRep, opts: &DdOptions) -> Result<LinearSystem> {
    let d = labels.len();
    let mut sys = LinearSystem::new(labels);
    if v.vertices.is_empty() {
        sys.add_ge(vec![Rational::zero(); d], Rational::from_integer((-1).into()));
        return Ok(sys);
    }
    let lift = |p: &[Rational], last: i64| {
        let mut w: Vec<Rational> = p.to_vec();
        w.push(Rational::from_integer(last.into()));
        to_primitive_integers(&w)
    };
    let mut ineqs: Vec<Vec<BigInt>> = v.vertices.iter().map(|p| lift(p, 1)).collect();
    ineqs.extend(v.rays.iter().map(|r| lift(r, 0)));
    let eqs: Vec<Vec<BigInt>> = v.lines.iter().map(|l| lift(l, 0)).collect();
    let gens = cone_generators(d + 1, &eqs, &ineqs, opts)?;
    let as_row = |g: &[BigInt]| {
        let w = to_rational(g);
        Row::new(w[..d].to_vec(), w[d].clone())
    };
    sys.equalities = echelon(&gens.lines.iter().map(|l| as_row(l)).collect::<Vec<_>>());
    let mut ineq: Vec<Row> = gens
        .rays
        .iter()
        .map(|g| normalize_inequality(&reduce_against(&as_row(g), &sys.equalities)))
        .filter(|r| !is_trivially_true(r))
        .collect();
    ineq.sort_by(row_cmp);
    ineq.dedup();
    sys.inequalities = ineq;
    Ok(sys)
}
