//! Potential landscape of the default chip along the guide: |B| and U/kB on
//! the x-z plane through the trap, printed as a coarse table.
//!
//! ```text
//! cargo run --release --example field_map
//! ```

use trapload::config::default_layout;
use trapload::magnetostatics::field_map::{field_map, GridSpec};
use trapload::magnetostatics::{SpinState, WireField};
use trapload::PhysicalConstants;

fn main() -> trapload::Result<()> {
    let (layout, currents) = default_layout()?;
    let field = WireField::new(&layout, &currents)?;
    let c = PhysicalConstants::RB87;
    let grid = GridSpec { min: [-6e-3, 0.0, -6e-3], max: [24e-3, 0.0, -1e-3], counts: [16, 1, 11] };
    let map = field_map(&field, &SpinState::RB87_F2_MF2, &c, true, &grid)?;

    // potential relative to the lowest sample, μK; rows are heights
    let u_min = map.samples.iter().filter_map(|s| s.energy).fold(f64::INFINITY, f64::min);
    print!("{:>8}", "z \\ x mm");
    for i in 0..grid.counts[0] {
        print!("{:>6.0}", grid.coordinate(0, i) * 1e3);
    }
    println!();
    for iz in (0..grid.counts[2]).rev() {
        print!("{:>8.1}", grid.coordinate(2, iz) * 1e3);
        for ix in 0..grid.counts[0] {
            match map.samples[ix * grid.counts[2] + iz].energy {
                Some(u) => print!("{:>6.0}", c.joule_to_uk(u - u_min).min(9999.0)),
                None => print!("{:>6}", "core"),
            }
        }
        println!();
    }
    println!("\n{} samples, {} masked; U/kB in uK above the lowest sample", map.samples.len(), map.masked());
    Ok(())
}
