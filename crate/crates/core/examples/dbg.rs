fn main() {
    for k in 1..=6usize {
        let t = wmp_core::stepper::bdf_table(k).unwrap();
        let sum: f64 = t.delta.iter().sum();
        println!("k={k} delta={:?} sum={sum:e}", t.delta);
    }
}
