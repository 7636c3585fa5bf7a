//! Dense tensor toolbox: contraction, truncated SVD, matrix exponential and
//! entropies.

use reservoir_tn::models::{pauli, Axis};
use reservoir_tn::tensor::{contract, density_entropy, expm, svd_truncate, Matrix, Tensor, C64};

fn main() -> reservoir_tn::Result<()> {
    let data = (0..24).map(|x| C64::new(x as f64, (x % 5) as f64)).collect();
    let t = Tensor::new(vec![2, 3, 4], data)?;
    let m = Tensor::identity(4);
    let c = contract(&t, &m, &[(2, 0)])?;
    println!("contract with identity leaves tensor: {:.1e}", c.max_abs_diff(&t)?);

    let (u, spectrum, v) = svd_truncate(&t.reshape(&[6, 4])?, 1e-3, None)?;
    println!(
        "rank {} of 4, discarded {:.2e}, entropy {:.4}",
        spectrum.rank(),
        spectrum.discarded_weight(),
        spectrum.entropy()
    );
    println!("factor shapes {:?} {:?}", u.shape(), v.shape());

    let theta = std::f64::consts::FRAC_PI_4;
    let rot = expm(&pauli(Axis::X).map(|z| z * C64::new(0.0, -theta)))?;
    println!("exp(-i pi/4 X)[0,0] = {:.6}", rot[(0, 0)]);

    let mixed = Matrix::identity(2, 2).scale(0.5);
    println!("entropy of I/2 = {:.6}", density_entropy(&mixed)?);
    Ok(())
}
