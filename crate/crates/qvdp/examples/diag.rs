use qvdp::observables::*;
use qvdp::*;

fn main() {
    for gp in [0.03, 0.01, 0.003, 0.001, 0.0003] {
        let p = VdpParams::new(gp, 0.0, 1.0, 0.0).unwrap();
        let s = susceptibility(&p, 0.0, &Truncation::default()).unwrap();
        let target = 2.0 / (9.0 * gp);
        println!(
            "gp={gp:>7}: chi0={:>12.4}  target={:>12.4}  ratio={:.5}  est_err={:.2e}",
            s.chi, target, s.chi / target, s.estimate_error
        );
    }
    // also check with a much smaller finite-difference step at gp=0.01
    let p = VdpParams::new(0.01, 0.0, 1.0, 0.0).unwrap();
    for delta in [1e-4, 3e-5, 1e-5] {
        let a = |om: f64| {
            let r = qvdp::steady::solve_steady(&p.with_drive(om), &Truncation::default(), 1e-12).unwrap();
            r.rho.expect_a().re
        };
        println!("delta={delta:.0e}: slope={:.6}", a(delta) / delta);
    }
}
