fn main() {
    let f = fpiua::Format::new(5, 10).unwrap();
    let t0 = std::time::Instant::now();
    for act in fpiua::activation::ActivationKind::all() {
        let t = std::time::Instant::now();
        let out = fpiua::conditions::check_activation(&f, act).unwrap();
        match out {
            Ok(w) => println!(
                "{:<10} pass c1={} c2={} eta={} lambda={} ({:?})",
                act.name(),
                f.display_decimal(w.c1),
                f.display_decimal(w.c2),
                f.display_decimal(w.eta),
                fpiua::tables::rational_to_decimal(&w.lambda, 6),
                t.elapsed()
            ),
            Err(e) => println!("{:<10} FAIL {e} ({:?})", act.name(), t.elapsed()),
        }
    }
    println!("total {:?}", t0.elapsed());
}
