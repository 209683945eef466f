use lineshape_cli::config::{parse_config, render_config, RunConfig};
use lineshape_core::analysis::{Axis, Window};
use lineshape_core::{LambdaImSign, Preset, Transform};
use proptest::prelude::*;

fn axis() -> impl Strategy<Value = Option<Axis>> {
    proptest::option::of((-1e3f64..1e3, 0f64..1e3, 1usize..20).prop_map(|(min, span, count)| Axis {
        min,
        max: min + span,
        count,
    }))
}

prop_compose! {
    fn config()(
        which in 0usize..4,
        lambda_re in -1e3f64..1e3,
        lambda_im in -1e3f64..1e3,
        c1_sq in 1e-3f64..1e3,
        d in 1e3f64..1e9,
        b2 in -50f64..50.0,
        lo in 1f64..1e5,
        span in 1f64..1e5,
        n_points in 64usize..100_000,
        rel_tol in 1e-14f64..1e-2,
        abs_tol in 0f64..1e-6,
        max_subdivisions in 16usize..100_000,
        rational in any::<bool>(),
        flipped in any::<bool>(),
        y in proptest::option::of(1e-3f64..1e3),
        t_max in proptest::option::of(1e-4f64..10.0),
        plot in any::<bool>(),
        sweep in (axis(), axis(), axis(), axis()),
    ) -> RunConfig {
        let mut c = RunConfig::from_preset(Preset::ALL[which]);
        c.model.lambda_re = lambda_re;
        c.model.lambda_im = lambda_im;
        c.model.c1_sq = c1_sq;
        c.model.d = d;
        c.model.b2 = b2;
        c.window = Window { lo, hi: lo + span };
        c.n_points = n_points;
        c.quadrature.rel_tol = rel_tol;
        c.quadrature.abs_tol = abs_tol;
        c.quadrature.max_subdivisions = max_subdivisions;
        c.quadrature.transform = if rational { Transform::SemiInfiniteRational } else { Transform::None };
        c.lambda_im_sign = if flipped { LambdaImSign::Flipped } else { LambdaImSign::AsPrinted };
        c.contour.y_offset = y;
        c.contour.t_max = t_max;
        c.emit_plot_script = plot;
        c.output_dir = format!("runs/\"{which}\" dir").into();
        c.sweep.lambda_im = sweep.0;
        c.sweep.c1_sq = sweep.1;
        c.sweep.d = sweep.2;
        c.sweep.b2 = sweep.3;
        c
    }
}

proptest! {
    #[test]
    fn parse_inverts_render(c in config()) {
        let text = render_config(&c);
        prop_assert_eq!(parse_config(&text).unwrap(), c);
    }
}
