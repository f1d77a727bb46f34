use slowbond::field::{random_test_field, PerturbationField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..10 {
        let f = random_test_field(&mut rng, 0.5, 1.0);
        let (t, u) = (0.125, 0.3125);
        let du = 1e-5;
        let fd_u = (f.h(t, u + du) - f.h(t, u - du)) / (2.0 * du);
        let dt = 1e-5;
        let fd_t = (f.h(t + dt, u) - f.h(t - dt, u)) / (2.0 * dt);
        let du2 = 1e-4;
        let fd_uu = (f.h(t, u + du2) - 2.0 * f.h(t, u) + f.h(t, u - du2)) / (du2 * du2);
        println!(
            "field {i}: d_u gap {:.2e}, d_t gap {:.2e}, d2 gap {:.2e}  (check: {:?})",
            (fd_u - f.dh_du(t, u)).abs(),
            (fd_t - f.dh_dt(t, u)).abs(),
            (fd_uu - f.d2h_du2(t, u)).abs(),
            f.check_consistency(1.0).is_ok()
        );
    }
}
