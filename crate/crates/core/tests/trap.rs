//! Trap metrology on the bundled chip and on random layouts.

mod common;

use common::trajectory_frequency;
use nalgebra::Vector3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trapload::config::SimConfig;
use trapload::magnetostatics::{ChipLayout, CurrentSetting, MagneticField, SpinState, Wire, WireField, ZeemanPotential};
use trapload::potential::Potential;
use trapload::trap::{find_minimum, trap_frequencies, MinimumOptions, SearchBox};
use trapload::PhysicalConstants;

#[test]
fn hessian_frequencies_match_released_particle() {
    let setup = SimConfig::builtin(&[]).unwrap().trap_setup().unwrap();
    let pot = setup.potential().unwrap();
    let t = setup.characterize().unwrap();
    let min = Vector3::from(t.minimum_position);
    let f = t.frequencies_hz();
    for (i, amp) in [(0, 1e-6), (1, 1e-6), (2, 20e-6)] {
        let axis = Vector3::from(t.principal_axes[i]);
        let period = 1.0 / f[i];
        let measured = trajectory_frequency(&pot, &min, &axis, amp, period / 400.0, 12.0 * period);
        assert!((measured - f[i]).abs() / f[i] < 0.01, "axis {i}: {measured} vs {}", f[i]);
    }
}

/// A Z-shaped wire under a uniform bias: the textbook Ioffe-Pritchard chip
/// trap, with geometry, current and bias drawn from the seed.
struct ZTrap {
    layout: ChipLayout,
    currents: CurrentSetting,
    bias: Vector3<f64>,
}

impl ZTrap {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let sep = rng.gen_range(2e-3..4e-3);
        let height = rng.gen_range(0.3..0.6) * sep;
        let current = rng.gen_range(10.0..40.0);
        let z = Wire {
            name: "z".into(),
            channel: "z".into(),
            points: [[-sep, -20e-3, 0.0], [-sep, 0.0, 0.0], [sep, 0.0, 0.0], [sep, 20e-3, 0.0]].into_iter().map(Vector3::from).collect(),
        };
        let mut currents = CurrentSetting::default();
        currents.set("z", current);
        // the bias cancels the central bar's field at `height`; the legs
        // supply the offset
        let bias = Vector3::new(0.0, -2e-7 * current / height, 0.0);
        Self { layout: ChipLayout::new(vec![z]).unwrap(), currents, bias }
    }

    fn potential(&self, s: f64, gravity: bool) -> ZeemanPotential<WireField> {
        let field = WireField::new(&self.layout, &self.currents.scaled(s)).unwrap().with_bias(self.bias * s);
        ZeemanPotential::new(field, SpinState::RB87_F2_MF2, PhysicalConstants::RB87, gravity).unwrap()
    }

    /// Height of the field zero of an infinite wire in the bias, used as a guess.
    fn height(&self) -> f64 {
        2e-7 * self.currents.get("z").unwrap() / self.bias.norm()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Without gravity, scaling every current by s leaves the minimum in
    /// place and multiplies all frequencies by √s.
    #[test]
    fn current_scaling_invariants(seed in any::<u64>(), s in 0.5f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trap = ZTrap::random(&mut rng);
        let pot = trap.potential(1.0, false);
        let h = trap.height();
        let opts = MinimumOptions {
            search_box: Some(SearchBox::new(Vector3::new(-5e-3, -5e-3, -4.0 * h), Vector3::new(5e-3, 5e-3, -0.2 * h))),
            ..Default::default()
        };
        let min = find_minimum(&pot, &Vector3::new(0.0, 0.0, -h), &opts).unwrap();
        let f1 = trap_frequencies(&pot, &min, 1e-6).unwrap();
        let pot_s = trap.potential(s, false);
        let min_s = find_minimum(&pot_s, &min, &opts).unwrap();
        prop_assert!((min_s - min).norm() < 1e-9, "minimum moved by {:e} m", (min_s - min).norm());
        let fs = trap_frequencies(&pot_s, &min, 1e-6).unwrap();
        for i in 0..3 {
            let r = fs.omega[i] / f1.omega[i];
            prop_assert!((r - s.sqrt()).abs() < 1e-4 * s.sqrt(), "axis {}: ratio {} vs {}", i, r, s.sqrt());
        }
    }

    /// Analytic potential gradient agrees with extrapolated central differences.
    #[test]
    fn potential_gradient_consistent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trap = ZTrap::random(&mut rng);
        let pot = trap.potential(1.0, true);
        let p = Vector3::new(rng.gen_range(-4e-3..4e-3), rng.gen_range(-4e-3..4e-3), rng.gen_range(-6e-3..-1e-3));
        prop_assume!(pot.field.nearest_conductor(&p) > 0.5e-3 && pot.field.field(&p).unwrap().norm() > 1e-5);
        let (_, g) = pot.energy_gradient(&p).unwrap();
        let fd = |h: f64| {
            let mut d = Vector3::zeros();
            for i in 0..3 {
                let mut e = Vector3::zeros();
                e[i] = h;
                d[i] = (pot.energy(&(p + e)).unwrap() - pot.energy(&(p - e)).unwrap()) / (2.0 * h);
            }
            d
        };
        // Richardson extrapolation removes the O(h²) truncation term
        let rich = (fd(1e-6) * 4.0 - fd(2e-6)) / 3.0;
        prop_assert!((g - rich).norm() <= 1e-6 * g.norm(), "{:e}", (g - rich).norm() / g.norm());
    }
}
