use paramcirc_core::algebra::{charpoly, ratio, Monomial, RatMatrix, Rational, SparsePoly, Var, VarNames};
use proptest::prelude::*;

const VARS: [Var; 4] = [Var::Param(1), Var::Param(2), Var::Input(1), Var::Y];

fn poly_strategy(max_terms: usize) -> impl Strategy<Value = SparsePoly> {
    prop::collection::vec((prop::array::uniform4(0u32..3), -6i64..=6, 1i64..=3), 0..=max_terms).prop_map(|terms| {
        SparsePoly::from_terms(terms.into_iter().map(|(e, n, d)| {
            (Monomial::from_pairs(VARS.iter().copied().zip(e)), ratio(n, d))
        }))
    })
}

/// Polynomials of degree at most one in `U₁, U₂` with small integer
/// coefficients, for matrix entries.
fn entry_strategy() -> impl Strategy<Value = SparsePoly> {
    (-2i64..=2, -2i64..=2, -2i64..=2).prop_map(|(c, a, b)| {
        &(&SparsePoly::int(c) + &SparsePoly::var(Var::Param(1)).scale(&ratio(a, 1)))
            + &SparsePoly::var(Var::Param(2)).scale(&ratio(b, 1))
    })
}

fn poly_matrix_strategy() -> impl Strategy<Value = Vec<Vec<SparsePoly>>> {
    (1usize..=4).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(entry_strategy(), n), n))
}

/// Determinant by cofactor expansion along the first row.
fn laplace(m: &[Vec<SparsePoly>]) -> SparsePoly {
    let n = m.len();
    if n == 0 {
        return SparsePoly::one();
    }
    let mut det = SparsePoly::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<SparsePoly>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, p)| p.clone()).collect()).collect();
        let term = &m[0][j] * &laplace(&minor);
        det = if j % 2 == 0 { &det + &term } else { &det - &term };
    }
    det
}

fn rational_det(m: &[Vec<Rational>]) -> Rational {
    let lifted: Vec<Vec<SparsePoly>> =
        m.iter().map(|row| row.iter().map(|x| SparsePoly::constant(x.clone())).collect()).collect();
    laplace(&lifted).as_constant().unwrap_or_else(|| Rational::from_integer(0.into()))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|s| s.count_ones() as usize == k).map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect()).collect()
}

/// Largest order of a nonzero minor.
fn minor_rank(m: &[Vec<Rational>]) -> usize {
    let (rows, cols) = (m.len(), m.first().map_or(0, Vec::len));
    for k in (1..=rows.min(cols)).rev() {
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let sub: Vec<Vec<Rational>> = rs.iter().map(|&i| cs.iter().map(|&j| m[i][j].clone()).collect()).collect();
                if rational_det(&sub) != Rational::from_integer(0.into()) {
                    return k;
                }
            }
        }
    }
    0
}

proptest! {
    #[test]
    fn sum_commutes(a in poly_strategy(6), b in poly_strategy(6)) {
        prop_assert_eq!(&a + &b, &b + &a);
    }

    #[test]
    fn product_commutes_and_associates(a in poly_strategy(5), b in poly_strategy(5), c in poly_strategy(5)) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn product_distributes(a in poly_strategy(5), b in poly_strategy(5), c in poly_strategy(5)) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn coeff_vector_recombines(a in poly_strategy(8), v in 0usize..4) {
        let var = VARS[v];
        prop_assert_eq!(SparsePoly::from_coeff_vector(&a.coeff_vector(var), var), a);
    }

    #[test]
    fn product_rule(a in poly_strategy(5), b in poly_strategy(5), v in 0usize..4) {
        let var = VARS[v];
        let lhs = (&a * &b).diff(var);
        let rhs = &(&a * &b.diff(var)) + &(&b * &a.diff(var));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn render_parse_roundtrip(a in poly_strategy(8)) {
        let names = VarNames::new();
        let text = a.render(&names);
        prop_assert_eq!(SparsePoly::parse(&text, &names).unwrap(), a);
    }

    #[test]
    fn rank_matches_minors(rows in prop::collection::vec(prop::collection::vec(-2i64..=2, 4), 1..=4), cols in 1usize..=4) {
        let m: Vec<Vec<Rational>> = rows.iter().map(|r| r[..cols].iter().map(|&x| ratio(x, 1)).collect()).collect();
        prop_assert_eq!(RatMatrix::from_rows(m.clone()).rank(), minor_rank(&m));
    }

    #[test]
    fn berkowitz_matches_laplace(m in poly_matrix_strategy()) {
        let n = m.len();
        let y = SparsePoly::var(Var::Y);
        let shifted: Vec<Vec<SparsePoly>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { &y - &m[i][j] } else { -&m[i][j] }).collect())
            .collect();
        prop_assert_eq!(charpoly(&m, Var::Y), laplace(&shifted));
    }
}
