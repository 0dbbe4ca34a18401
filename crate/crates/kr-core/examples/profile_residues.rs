//! Timing probe for the residue-comparison pipeline on the second F4 node.
//!
//! Prints wall times and intermediate sizes for the coefficient assembly on
//! both routes and the final comparisons, so chunk sizes and check budgets
//! can be chosen from measurements.

use kr_core::qsystem::{coeff_c1_orbit, coeff_c1_zero, coeff_c2};
use kr_core::{
    coeff_d_chunks, coeff_d_scaled, mul_weyl_denominator, polyhedral_spec, CartanType, GeoFraction,
    RootSystem, Weight,
};
use std::time::Instant;

fn describe(f: &GeoFraction) -> String {
    format!(
        "num {} terms / {} denom factors",
        f.num.num_terms(),
        f.denom_factors.len()
    )
}

fn main() {
    let rs = RootSystem::new(CartanType::parse("F4").unwrap()).unwrap();
    let spec = polyhedral_spec(&rs, 2).unwrap();

    let t0 = Instant::now();
    let mut c1 = coeff_c1_orbit(&rs, 1).unwrap();
    println!("c1 orbit table in {:?}", t0.elapsed());
    let t0 = Instant::now();
    let zero_coeff = coeff_c1_zero(&rs, 1).unwrap();
    println!(
        "c1 zero coefficient in {:?} ({})",
        t0.elapsed(),
        describe(&zero_coeff)
    );
    c1.push((Weight::zero(4), zero_coeff));

    let cases: Vec<(&str, Weight)> = vec![
        ("omega2", Weight::from_coords(vec![0, 1, 0, 0])),
        ("2omega4", Weight::from_coords(vec![0, 0, 0, 2])),
        ("omega1", Weight::from_coords(vec![1, 0, 0, 0])),
    ];
    for (name, lam) in &cases {
        let t = Instant::now();
        let c2 = coeff_c2(&rs, &c1, lam).unwrap();
        let tc = t.elapsed();
        let t = Instant::now();
        let scaled = mul_weyl_denominator(&rs, c2);
        let tm = t.elapsed();
        println!(
            "{name}: pair side {tc:?} + scale {tm:?} ({})",
            describe(&scaled)
        );
        let t = Instant::now();
        let d = coeff_d_scaled(&rs, &spec, lam, None, 8).unwrap();
        let td = t.elapsed();
        println!("{name}: row side {td:?} ({})", describe(&d));
        let t = Instant::now();
        let ok = scaled.equals(&d);
        println!("{name}: compare {:?} -> {ok}", t.elapsed());
    }

    // Origin pole: fold the row side through a parabolic subgroup and
    // subtract chunk by chunk.
    let zero = Weight::zero(4);
    let t = Instant::now();
    let c2 = coeff_c2(&rs, &c1, &zero).unwrap();
    let tc = t.elapsed();
    let t = Instant::now();
    let mut acc = mul_weyl_denominator(&rs, c2);
    acc.normalize();
    println!(
        "origin: pair side {tc:?} + scale {:?} ({})",
        t.elapsed(),
        describe(&acc)
    );
    let t = Instant::now();
    let chunks = coeff_d_chunks(&rs, &spec, &zero, Some(&[0, 2, 3]), 96).unwrap();
    println!(
        "origin: row side {:?} ({} chunks, sizes {:?})",
        t.elapsed(),
        chunks.len(),
        chunks.iter().map(|c| c.num.num_terms()).collect::<Vec<_>>()
    );
    let t = Instant::now();
    for (i, ch) in chunks.iter().enumerate() {
        acc = acc.sub(ch);
        acc.normalize();
        println!("  after chunk {i}: {} ({:?})", describe(&acc), t.elapsed());
    }
    println!(
        "origin: subtraction {:?} -> zero: {}",
        t.elapsed(),
        acc.is_zero()
    );
}
