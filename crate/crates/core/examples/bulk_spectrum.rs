//! Landau levels of a half-space and the predicted spectral flow of an
//! interface, scanned over `α`.
//!
//! ```text
//! cargo run --example bulk_spectrum
//! ```

use interface_flow::bulk::{gap_components, landau_levels, predicted_sf, HalfSpaceParams};

fn main() -> interface_flow::Result<()> {
    let minus = HalfSpaceParams::new(-2.0, -2.0, -0.1)?;
    let plus = HalfSpaceParams::new(2.0, 2.0, 0.1)?;
    for (name, hp) in [("H-", minus), ("H+", plus)] {
        let spec = landau_levels(hp, 3)?;
        let levels: Vec<String> = spec.levels.iter().map(|l| format!("{l:+.4}")).collect();
        println!(
            "{name} (B={}, m={}, V={}): {}",
            hp.b,
            hp.m,
            hp.v,
            levels.join(" ")
        );
    }
    println!(
        "\n{:>18} {:>8} {:>6} {:>6} {:>4}",
        "gap", "alpha", "I-", "I+", "SF"
    );
    for (lo, hi) in gap_components(minus, plus, -4.0, 4.0) {
        let alpha = 0.5 * (lo + hi);
        let p = predicted_sf(minus, plus, alpha)?;
        println!(
            "{:>18} {:>8.4} {:>6} {:>6} {:>4}",
            format!("({lo:.3}, {hi:.3})"),
            alpha,
            p.i_minus.to_string(),
            p.i_plus.to_string(),
            p.sf
        );
    }
    // a level of H+ is not a valid alpha
    match predicted_sf(minus, plus, plus.zeroth_level()) {
        Err(e) => println!(
            "\nalpha = {}: {e} (exit code {})",
            plus.zeroth_level(),
            e.exit_code()
        ),
        Ok(p) => println!("\nunexpected prediction {p:?}"),
    }
    Ok(())
}
