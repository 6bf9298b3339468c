use cyclolab_core::lab::checks::{registry, run_check};

#[test]
fn drive_full_default() {
    let mut total_ms = 0u128;
    let mut bad = 0;
    for def in registry() {
        for params in (def.default_grid)() {
            match run_check(def.id, &params) {
                Ok(r) => {
                    total_ms += r.millis;
                    let tag = match r.status {
                        cyclolab_core::lab::CheckStatus::Verified => "ok",
                        cyclolab_core::lab::CheckStatus::Vacuous => "vac",
                        _ => { bad += 1; "BAD" }
                    };
                    println!("{tag:<4} {:<22} p={} d={} n={} ({} ms)", def.id, params.p, params.d, params.n, r.millis);
                }
                Err(e) => { bad += 1; println!("ERR  {:<22} p={} d={} n={} : {e}", def.id, params.p, params.d, params.n); }
            }
        }
    }
    println!("TOTAL {total_ms} ms, bad={bad}");
}
