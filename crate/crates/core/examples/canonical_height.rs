//! Canonical heights of multiples of (3, 5) on y² = x³ − 2, with the
//! enclosure error and the quadratic scaling ĥ(nP) = n² ĥ(P).

use ntheight::elliptic::Curve;
use ntheight::heights::{canonical_height, is_torsion, naive_height};

fn main() -> ntheight::Result<()> {
    let e = Curve::over_q(0, -2)?;
    let p = e.point_q((3, 1), (5, 1))?;
    let h1 = canonical_height(&p, 1e-10)?;
    println!("h(P) = {:.6}  ĥ(P) = {:.10} ± {:.1e}", naive_height(&p)?, h1.value, h1.error);
    for n in 2..=4 {
        let h = canonical_height(&p.mul(n), 1e-10)?;
        println!("ĥ({n}P) / ĥ(P) = {:.8}", h.value / h1.value);
    }

    // A torsion point has height exactly zero.
    let t = Curve::over_q(0, 1)?.point_q((2, 1), (3, 1))?;
    let cert = is_torsion(&t)?;
    println!("(2, 3) on y² = x³ + 1: torsion {} of order {:?}", cert.is_torsion, cert.order);
    Ok(())
}
