use kerrcat::model::*;

fn main() {
    let p30 = KerrCatParams::new(2.0, 4.2, 1.0, 30).unwrap();
    let h30 = build_hamiltonian(&p30).unwrap();
    let spec = pseudo_spectrum(&h30).unwrap();
    let c = displaced_coeffs(&p30, p30.alpha());
    for pad in [10usize, 20] {
        let hd = hamiltonian_from_coeffs(&c, p30.kerr, p30.dim + pad).unwrap();
        let spec_d = pseudo_spectrum(&hd).unwrap();
        let devs: Vec<f64> = (0..8).map(|k| (spec[k] - spec_d[k]).abs()).collect();
        println!("pad {pad}: devs {devs:?}");
    }
}
