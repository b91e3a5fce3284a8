//! Independent brute-force oracles checked against the library.

mod common;

use std::sync::Arc;

use monohom::enumerate::{count_labeled_posets, labeled_posets};
use monohom::{
    contract_edge, contraction_cokernel, homology, order_complex, smith_normal_form,
    space_homology, FinitePoset, IntegerMatrix, PointMap,
};

#[test]
fn labeled_poset_counts_match_brute_force() {
    for n in 1..=5 {
        assert_eq!(count_labeled_posets(n), common::brute_force_poset_count(n), "n = {n}");
    }
    assert_eq!(
        (1..=5).map(common::brute_force_poset_count).collect::<Vec<_>>(),
        [1, 3, 19, 219, 4231]
    );
}

/// Rank over the rationals by fraction-free Gaussian elimination on i128.
fn rational_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let (a, b) = (m[rank][c], m[r][c]);
                for k in 0..cols {
                    m[r][k] = m[r][k] * a - m[rank][k] * b;
                }
                let g = m[r].iter().fold(0i128, |g, &x| gcd(g, x.abs()));
                if g > 1 {
                    m[r].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Betti numbers of the order complex over the rationals, built directly from
/// the chain list without the library's complex.
fn rational_betti(p: &FinitePoset) -> Vec<usize> {
    let n = p.len();
    let mut chains: Vec<Vec<Vec<usize>>> = vec![(0..n).map(|x| vec![x]).collect()];
    loop {
        let last = chains.last().unwrap();
        let next: Vec<Vec<usize>> = last
            .iter()
            .flat_map(|c| {
                let top = *c.last().unwrap();
                (0..n).filter(move |&y| p.lt(top, y)).map(move |y| {
                    let mut d = c.clone();
                    d.push(y);
                    d
                })
            })
            .collect();
        if next.is_empty() {
            break;
        }
        chains.push(next);
    }
    let boundary_rank = |r: usize| -> usize {
        if r == 0 || r >= chains.len() {
            return 0;
        }
        let rows: Vec<Vec<i64>> = chains[r - 1]
            .iter()
            .map(|face| {
                chains[r]
                    .iter()
                    .map(|s| {
                        (0..s.len())
                            .find(|&i| {
                                let mut t = s.clone();
                                t.remove(i);
                                &t == face
                            })
                            .map_or(0, |i| if i % 2 == 0 { 1 } else { -1 })
                    })
                    .collect()
            })
            .collect();
        rational_rank(&rows)
    };
    (0..chains.len())
        .map(|r| chains[r].len() - boundary_rank(r) - boundary_rank(r + 1))
        .collect()
}

#[test]
fn betti_numbers_match_rational_oracle() {
    for n in 1..=4 {
        for p in labeled_posets(n) {
            let h = space_homology(&Arc::new(p.clone())).unwrap();
            let expected = rational_betti(&p);
            assert_eq!(h.betti, expected, "{p:?}");
            assert!(h.torsion.iter().all(Vec::is_empty));
        }
    }
}

#[test]
fn four_cycle_incidence_rank() {
    // Vertices a, b, c, d; edges c-a, d-a, c-b, d-b.
    let incidence = vec![
        vec![-1, -1, 0, 0],
        vec![0, 0, -1, -1],
        vec![1, 0, 1, 0],
        vec![0, 1, 0, 1],
    ];
    let rank = rational_rank(&incidence);
    assert_eq!(rank, 3);
    let circle = Arc::new(
        FinitePoset::build(&["a", "b", "c", "d"], &[("c", "a"), ("d", "a"), ("c", "b"), ("d", "b")])
            .unwrap(),
    );
    // b_0 = 4 - 3, b_1 = 4 - 3.
    assert_eq!(space_homology(&circle).unwrap().betti, vec![4 - rank, 4 - rank]);
    let oc = order_complex(&circle).unwrap();
    assert_eq!(smith_normal_form(&oc.boundary(1)).unwrap().rank(), rank);
}

/// gcd of all `k×k` minors for each `k`; it equals `d_1 ⋯ d_k`.
fn minor_gcds(m: &[Vec<i64>]) -> Vec<i64> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for k in 1..=rows.min(cols) {
        let mut g = 0i64;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let sub: Vec<Vec<i64>> =
                    rs.iter().map(|&r| cs.iter().map(|&c| m[r][c]).collect()).collect();
                g = gcd(g as i128, det(&sub).abs() as i128) as i64;
            }
        }
        out.push(g);
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

fn det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * det(&minor)
        })
        .sum()
}

#[test]
fn smith_factors_match_minor_gcds() {
    let cases = vec![
        vec![vec![2, 0], vec![0, 3]],
        vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]],
        vec![vec![4, 6, 0], vec![6, 9, 3], vec![0, 3, 12]],
        vec![vec![1, 2, 3, 4], vec![2, 4, 6, 9], vec![0, 0, 5, 10]],
        vec![vec![6], vec![10], vec![15]],
    ];
    for m in cases {
        let snf = smith_normal_form(&IntegerMatrix::from_rows(&m)).unwrap();
        let gcds = minor_gcds(&m);
        let mut expected = Vec::new();
        let mut prev = 1i64;
        for &g in &gcds {
            if g == 0 {
                break;
            }
            expected.push((g / prev) as u64);
            prev = g;
        }
        assert_eq!(snf.factors, expected, "{m:?}");
    }
}

fn connected(p: &FinitePoset, set: &[usize]) -> bool {
    let Some(&start) = set.first() else {
        return true;
    };
    let mut seen = vec![start];
    let mut k = 0;
    while k < seen.len() {
        let x = seen[k];
        for &y in set {
            if !seen.contains(&y) && (p.leq(x, y) || p.leq(y, x)) {
                seen.push(y);
            }
        }
        k += 1;
    }
    seen.len() == set.len()
}

/// Preimage of every connected subset is connected.
fn brute_force_monotone(f: &PointMap) -> bool {
    let (dom, cod) = (f.dom(), f.cod());
    (1u32..1 << cod.len()).all(|mask| {
        let subset: Vec<usize> = (0..cod.len()).filter(|&y| mask >> y & 1 == 1).collect();
        if !connected(cod, &subset) {
            return true;
        }
        let pre: Vec<usize> = (0..dom.len())
            .filter(|&x| mask >> f.apply(x) & 1 == 1)
            .collect();
        connected(dom, &pre)
    })
}

#[test]
fn monotonicity_matches_subset_oracle() {
    let spaces: Vec<Arc<FinitePoset>> = (1..=3).flat_map(labeled_posets).map(Arc::new).collect();
    let mut monotone = 0;
    for x in &spaces {
        for y in &spaces {
            let (n, m) = (x.len(), y.len());
            for code in 0..m.pow(n as u32) {
                let img: Vec<usize> = (0..n).map(|i| code / m.pow(i as u32) % m).collect();
                let f = PointMap::new(x.clone(), y.clone(), img).unwrap();
                if !f.is_continuous() {
                    continue;
                }
                let expected = brute_force_monotone(&f);
                assert_eq!(f.is_monotone_exhaustive().unwrap(), expected);
                assert_eq!(f.is_monotone().unwrap(), expected);
                monotone += expected as usize;
            }
        }
    }
    assert!(monotone > 0);
}

#[test]
fn example_cokernel_boundary_is_a_unit() {
    let x = Arc::new(
        FinitePoset::build(&["a", "b", "s", "t"], &[("b", "a"), ("t", "a"), ("b", "s")]).unwrap(),
    );
    let ec = contract_edge(&x, (0, 1)).unwrap();
    let k = contraction_cokernel(&ec).unwrap();
    let d2 = k.complex.boundary(2).to_dense();
    assert_eq!(d2.len(), 1);
    assert_eq!(d2[0].len(), 1);
    assert_eq!(d2[0][0].abs(), 1);
    assert!(homology(&k.complex).unwrap().is_zero());
}
