use sepprob_core::verify::{jacobian_eval, JacobianKind};
use sepprob_core::real::Prec;

fn main() {
    let p = Prec(256);
    for t in [0.2, 0.5, 0.9, 0.99, 0.995, 0.9985, 0.999, 0.9995, 0.99999] {
        let v = jacobian_eval(JacobianKind::JacLa, &p.f64(t), p).unwrap();
        let h = jacobian_eval(JacobianKind::HReal, &p.f64(t), p).unwrap();
        println!("t = {:<8} jac_la = {:>14.8e}   h_real = {:>14.8e}", t, v.to_f64(), h.to_f64());
    }
}
