use datom::config;
use datom::formats::{field_csv, render, SurfaceReport};
use datom_core::gradient::compute_field;
use datom_core::lattice::neighbors;
use datom_core::{CellPos, Configuration};
use proptest::prelude::*;

fn config_strategy() -> impl Strategy<Value = Configuration> {
    prop::collection::vec((any::<prop::sample::Index>(), 0usize..12), 1..20).prop_map(|steps| {
        let mut cells = vec![CellPos::new(0, 0, 0)];
        for (pick, dir) in steps {
            let n = neighbors(*pick.get(&cells))[dir];
            if !cells.contains(&n) {
                cells.push(n);
            }
        }
        Configuration::from_modules(1.0, cells.into_iter().enumerate().map(|(i, c)| (i as u32 + 1, c)))
            .unwrap()
    })
}

proptest! {
    #[test]
    fn config_json_round_trips(config in config_strategy(), pick in any::<prop::sample::Index>()) {
        let ids: Vec<_> = config.ids().collect();
        let mobile = *pick.get(&ids);
        let text = config::to_json(&config, Some(mobile));
        let back = config::parse(&text).unwrap();
        prop_assert_eq!(back.mobile, Some(mobile));
        prop_assert_eq!(config::to_json(&back.config, back.mobile), text);
        for id in ids {
            prop_assert_eq!(back.config.position_of(id), config.position_of(id));
        }
    }

    #[test]
    fn field_csv_and_surface_report_agree(config in config_strategy(), pick in any::<prop::sample::Index>()) {
        let surface: Vec<_> = config.free_surface_cells().into_iter().collect();
        let goal = *pick.get(&surface);
        let field = compute_field(&config, goal).unwrap();
        let csv = field_csv(&field);
        let report = SurfaceReport::new(&config, &field);
        prop_assert_eq!(report.total(), surface.len());
        prop_assert!(report.reachable.iter().any(|(c, d)| *c == goal && *d == 0));
        prop_assert!(csv.lines().count() > report.reachable.len());
    }

    #[test]
    fn render_marks_every_module_once(config in config_strategy()) {
        let occupied = (-20..=20)
            .map(|k| render(&config, k, None).lines().skip(1).flat_map(|l| l.chars()).filter(|c| *c == '#').count())
            .sum::<usize>();
        prop_assert_eq!(occupied, config.len());
    }
}
