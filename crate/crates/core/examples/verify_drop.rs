//! Amplifies (3, 5) until it reduces to the identity at 7 and checks the
//! valuation drop of the auxiliary section there.

use ntheight::arith::PrimeIdeal;
use ntheight::auxiliary::{build_aux_section, product_formula_ledger, verify_drop};
use ntheight::elliptic::{amplify, Curve};

fn main() -> ntheight::Result<()> {
    let e = Curve::over_q(0, -2)?;
    let f = build_aux_section(&e, 2, 3, 8)?;
    let w = PrimeIdeal::rational(7);
    let (m, q) = amplify(&e.point_q((3, 1), (5, 1))?, &w)?;
    println!("[{m}](3, 5) reduces to O mod 7");
    let r = verify_drop(&f, &q, &w)?;
    println!("Tf = {}  v = {}  lhs = {}  rhs = {}  holds = {}", r.tf, r.valuation, r.lhs, r.rhs, r.holds);

    let ledger = product_formula_ledger(&ntheight::arith::integer::rat(-49, 18))?;
    println!("product formula for -49/18 sums to {:.1e}", ledger.sum);
    Ok(())
}
