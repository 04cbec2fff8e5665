//! Scratch probe: timings and margins for the heavy acceptance criteria.

use std::time::Instant;

use gravipade::experiments::series_for;
use gravipade::mp::{MpReal, PrecisionCtx, Rational};
use gravipade::pade::{build_pade, classify_poles};
use gravipade::planet::{brillouin_radius, ExactScalar, ShapeProfile};
use gravipade::poly::Poly;
use gravipade::singularity::{singularity_set, SingularityClass};

fn rq(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn profiles() -> Vec<(&'static str, ShapeProfile)> {
    vec![
        (
            "spheroid",
            ShapeProfile::spheroid(ExactScalar::from_ratio(3, 2), ExactScalar::from_int(1))
                .unwrap(),
        ),
        (
            "cylinder",
            ShapeProfile::cylinder(ExactScalar::from_ratio(1, 2), ExactScalar::Sqrt(3)).unwrap(),
        ),
        (
            "lozenge",
            ShapeProfile::poly_profile(
                Poly::new(vec![rq(1, 1), rq(0, 1), rq(0, 1), rq(0, 1), rq(-1, 1)]),
                rq(-1, 1),
                rq(1, 1),
            )
            .unwrap(),
        ),
        (
            "peanut1",
            ShapeProfile::poly_profile(
                Poly::new(vec![rq(4, 1), rq(0, 1), rq(3, 1), rq(0, 1), rq(-1, 1)]),
                rq(-2, 1),
                rq(2, 1),
            )
            .unwrap(),
        ),
        (
            "peanut2",
            ShapeProfile::poly_profile(
                Poly::new(vec![rq(25, 1), rq(0, 1), rq(24, 1), rq(0, 1), rq(-1, 1)]),
                rq(-5, 1),
                rq(5, 1),
            )
            .unwrap(),
        ),
    ]
}

fn main() {
    let ctx = PrecisionCtx::new(100);
    for (name, profile) in profiles() {
        let t0 = Instant::now();
        let series = series_for(&profile, 200, &ctx).unwrap();
        let t_series = t0.elapsed().as_secs_f64();

        let t1 = Instant::now();
        let pade = build_pade(&series, 100).unwrap();
        let t_pade = t1.elapsed().as_secs_f64();

        let poles = classify_poles(
            &pade,
            &ctx,
            &MpReal::from_f64(1e-6, &ctx),
            &MpReal::from_f64(1e-8, &ctx),
        )
        .unwrap();
        let sing = singularity_set(&profile, &ctx).unwrap();
        let brillouin = brillouin_radius(&profile, &ctx);

        let genuine: Vec<_> = poles.genuine().collect();
        let mut max_gap = 0f64;
        for root in sing.limiting() {
            let mut best = f64::MAX;
            for p in &genuine {
                let d = (&p.z0 - &root.z0).abs().to_f64();
                if d < best {
                    best = d;
                }
            }
            if best > max_gap {
                max_gap = best;
            }
        }
        let mut min_ext = f64::MAX;
        for root in sing.roots.iter().filter(|r| r.class == SingularityClass::Exterior) {
            for p in &genuine {
                let d = (&p.z0 - &root.z0).abs().to_f64();
                if d < min_ext {
                    min_ext = d;
                }
            }
        }
        let b = brillouin.to_f64();
        println!(
            "{name:9} series {t_series:7.1}s  pade {t_pade:6.1}s  eff {:3}  genuine {:3}  \
             gap/brillouin {:.4}  min_ext/brillouin {}",
            pade.effective_order(),
            genuine.len(),
            max_gap / b,
            if min_ext == f64::MAX {
                "n/a".to_string()
            } else {
                format!("{:.4}", min_ext / b)
            },
        );
    }
}
