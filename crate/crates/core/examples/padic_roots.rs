//! Hensel-lifts a 7-adic square root of 2 and checks it against the
//! residue field root.

use ntheight::arith::integer::pow_mod;
use ntheight::arith::padic_hensel_root;
use ntheight::arith::poly::zpoly;

fn main() -> ntheight::Result<()> {
    let g = zpoly(&[-2, 0, 1]);
    let r = padic_hensel_root(&g, 7, 6)?;
    let digits = ntheight::arith::padic::to_u64_digits(&r).expect("small lift");
    println!("sqrt(2) mod 7^6 = {digits}");
    println!("square mod 7^6 = {}", (digits as u128 * digits as u128 % 7u128.pow(6)) as u64);
    println!("3^2 mod 7 = {}", pow_mod(3, 2, 7));
    Ok(())
}
