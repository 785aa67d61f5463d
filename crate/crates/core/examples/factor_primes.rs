//! Factors small primes in Q(i) and in a cubic field.

use ntheight::arith::NumberField;
use ntheight::splitting::dedekind_factor;
use ntheight::Error;

fn main() -> ntheight::Result<()> {
    for coeffs in [vec![1, 0, 1], vec![-2, 0, 0, 1]] {
        let k = NumberField::from_coeffs(&coeffs)?;
        println!("field {:?} (constant term first)", coeffs);
        for p in [2u64, 3, 5, 7, 11, 13] {
            match dedekind_factor(&k, p) {
                Ok(ideals) => {
                    let parts: Vec<String> =
                        ideals.iter().map(|w| format!("(e={}, f={})", w.ramification, w.residue_degree)).collect();
                    println!("  p = {p:>2}: {}", parts.join(" "));
                }
                Err(Error::IndexPrime { .. }) => println!("  p = {p:>2}: divides the index, skipped"),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(())
}
