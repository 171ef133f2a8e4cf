use photometrix::fisher::qfi_tfs_exact;
use photometrix::protocol::{optimize_nu, Budget};
use photometrix::LossChannel;

fn main() -> Result<(), photometrix::Error> {
    let budget = Budget::new(10.0, 1.0, 0.04, 0.96)?; // T, N_abs, t_ext, eta
    let best = optimize_nu(8.0, &budget, 1.0, &|ch: &LossChannel| qfi_tfs_exact(4, ch).value)?;
    println!("{} tests of length {}, precision {}", best.nu, best.t, best.accumulated);
    Ok(())
}
