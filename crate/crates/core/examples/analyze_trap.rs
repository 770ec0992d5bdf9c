//! Characterize the trap formed by the bundled chip layout at its default currents.
//!
//! ```text
//! cargo run --release --example analyze_trap [I_p5]
//! ```

use nalgebra::Vector3;
use trapload::config::default_layout;
use trapload::magnetostatics::{SpinState, WireField, ZeemanPotential};
use trapload::trap::{analyze, AnalysisOptions, SearchBox};
use trapload::PhysicalConstants;

fn main() -> trapload::Result<()> {
    let (layout, mut currents) = default_layout()?;
    if let Some(i) = std::env::args().nth(1) {
        currents.set("p5", i.parse().expect("current in amperes"));
    }
    let field = WireField::new(&layout, &currents)?;
    let pot = ZeemanPotential::new(field, SpinState::RB87_F2_MF2, PhysicalConstants::RB87, true)?;

    let search = SearchBox::new(Vector3::new(-12e-3, -6e-3, -10e-3), Vector3::new(35e-3, 6e-3, -0.3e-3));
    let mut opts = AnalysisOptions::new(search);
    opts.guide_entrance = Some(Vector3::new(-6e-3, 0.0, -3.6e-3));

    let t = analyze(&pot, &Vector3::new(8e-3, 0.0, -3.6e-3), &opts)?;
    let p = t.minimum_position;
    let hz = t.frequencies_hz();
    println!("minimum        ({:.3}, {:.3}, {:.3}) mm", p[0] * 1e3, p[1] * 1e3, p[2] * 1e3);
    println!("offset field   {:.3} G", t.offset_field_g);
    println!("frequencies    2pi x ({:.1}, {:.1}, {:.2}) Hz", hz[0], hz[1], hz[2]);
    println!("aspect ratio   {:.1}", t.aspect_ratio);
    println!("depth          {:.0} uK (saddle at x = {:.2} mm)", t.depth_uk, t.saddle_position[0] * 1e3);
    if let Some(d) = t.transverse_depth_uk {
        println!("radial depth   {d:.0} uK");
    }
    if let Some(b) = t.barrier_height_uk {
        println!("barrier        {b:.0} uK above the guide floor");
    }
    Ok(())
}
