//! Brute-force `T_α(B)` and both of its rank inequalities.

use ocrs::analysis::{brute_force_t_alpha, t_alpha_bullet_one, t_alpha_bullet_two};
use ocrs::{ElemSet, MarginalVector, MatroidOracle, Result};

fn main() -> Result<()> {
    let m = MatroidOracle::complete_graph(4);
    let x = MarginalVector::new(vec![0.125, 0.25, 0.0625, 0.125, 0.1875, 0.0625])?;
    let alpha = 0.25;
    for b in [
        ElemSet::new(),
        ElemSet::singleton(0),
        [1, 4].into_iter().collect(),
    ] {
        let res = brute_force_t_alpha(&m, &x, &b, alpha)?;
        let one = t_alpha_bullet_one(&m, &x, &b, &res.t, alpha)?;
        println!(
            "B = {:?}: T = {:?}, objective {:.4}",
            b, res.t, res.objective
        );
        println!(
            "  first bullet {:.4} <= {:.4}: {}",
            one.lhs,
            one.rhs,
            one.holds()
        );
        let rest = m.ground_set().difference(&res.t);
        for q in rest.subsets().filter(|q| !q.is_empty()).take(4) {
            let two = t_alpha_bullet_two(&m, &x, &res.t, &q, alpha)?;
            println!(
                "  Q = {:?}: {:.4} <= {:.4}: {}",
                q,
                two.lhs,
                two.rhs,
                two.holds()
            );
        }
    }
    Ok(())
}
