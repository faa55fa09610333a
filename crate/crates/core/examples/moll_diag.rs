use bifrac::funcspace::{atom_a1, atom_a2};
use bifrac::operator::{OperatorInstance, integral_identity_rhs};
use bifrac::fourier_verify::{mollified_operator_integral, mollified_limit};

fn main() {
    for alpha in [0.25, 0.5, 0.75] {
        let op = OperatorInstance::new(atom_a1(), atom_a2(), alpha).unwrap();
        let rhs = integral_identity_rhs(&op).unwrap();
        println!("alpha = {alpha}, rhs = {rhs:.15}");
        let epsilons = [0.2, 0.1, 0.05, 0.025, 0.0125];
        let mut values: Vec<f64> = epsilons.iter()
            .map(|e| mollified_operator_integral(&op, *e, 1e-10).unwrap())
            .collect();
        for (e, v) in epsilons.iter().zip(&values) {
            println!("  eps {e:<7} value {v:.12}  gap {:.3e}", v - rhs);
        }
        for p in [2.0 - alpha, 2.0, 3.0 - alpha] {
            let q = 2f64.powf(-p);
            values = values.windows(2).map(|w| (w[1] - q*w[0])/(1.0-q)).collect();
            println!("  after stage p={p}: {:?}", values.iter().map(|v| format!("{:.3e}", v-rhs)).collect::<Vec<_>>());
        }
        let lim = mollified_limit(&op, 1e-10).unwrap();
        println!("  limit {lim:.15} rel gap {:.3e}", ((lim-rhs)/rhs).abs());
    }
}
