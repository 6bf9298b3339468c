//! The verification lab: concrete module-lattice constructions (log images
//! of principal-unit groups, cyclotomic-unit closures, minus parts and
//! Stickelberger lattices) and the registry of machine checks.

pub mod checks;
pub mod report;
pub mod units;

pub use report::{CheckStatus, VerificationReport};
pub use units::UnitLogLattice;

use crate::chars::DirichletCharacter;
use crate::error::{Error, Result};

/// Exponent of the p-power index between two named lattices at level n,
/// projected by e_theta. Selectors: "leopoldt" (the ambient p^(-n) e_theta O),
/// "log-units" (e_theta log U_n), "log-cyclotomic" (e_theta log Cbar_n),
/// "scriptT-orbit" (Z_p[Gamma_n] e_theta script-T_n).
pub fn compute_index(
    p: u64,
    n: u32,
    theta: &DirichletCharacter,
    lhs: &str,
    rhs: &str,
    precision: Option<u32>,
) -> Result<u32> {
    use crate::cyclo::{build_special, field_log, CycloPadic, SpecialKind};
    use crate::group_ring::idempotent_delta;
    use crate::lattice::{default_precision, DEFAULT_SLACK};
    use num_bigint::BigUint;

    let target = precision.unwrap_or_else(|| default_precision(p, n));
    let prec = units::residue_precision(p, n, target);
    let m = p.pow(n + 1);
    let phi = ((p - 1) * p.pow(n)) as usize;
    let e1 = idempotent_delta(&theta.restrict_to_common(p), p, 1, n, prec)?;
    let mut build = |name: &str| -> Result<crate::lattice::PLattice> {
        match name {
            "leopoldt" | "ambient" => units::component_ambient(p, n, m, phi, prec, &e1),
            "scriptT-orbit" => {
                let t = CycloPadic::from_rat(
                    &build_special(SpecialKind::ScriptT, p, n).value,
                    p,
                    prec,
                )?;
                let orbit = units::gamma_orbit(&e1.act(&t)?, p, n, p)?;
                units::plattice_from_elements(p, phi, n, &orbit, DEFAULT_SLACK)
            }
            "log-units" => {
                let u = units::unit_log_lattice(p, n, target)?;
                let proj = units::project_elements(&e1, &u.logs)?;
                units::plattice_from_elements(p, phi, n, &proj, DEFAULT_SLACK)
            }
            "log-cyclotomic" => {
                let one = CycloPadic::one(m, p, prec);
                let l0 = field_log(
                    &one.sub(&CycloPadic::monomial(m, p, prec, 1, BigUint::from(1u32))),
                    target,
                )?;
                let orbit = units::gamma_orbit(&e1.act(&l0)?, p, n, p)?;
                units::plattice_from_elements(p, phi, n, &orbit, DEFAULT_SLACK)
            }
            other => Err(Error::domain(format!("unknown lattice selector '{other}'"))),
        }
    };
    let l1 = build(lhs)?;
    let l2 = build(rhs)?;
    l1.index_exponent(&l2)
}
