use chern::{parse_tensor, write_tensor};
use chern_core::{rng, tensor::project_hermitian, zoo, CurvatureTensor};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn written_tensors_read_back_exactly(n in 1usize..4, r in 1usize..4, seed in any::<u64>(), scale in -40i32..40) {
        let mut g = rng::seeded(seed);
        let raw = CurvatureTensor::random_raw(n, r, &mut g);
        let t = project_hermitian(n, r, &raw).unwrap().scaled(2f64.powi(scale) * 1.1);
        let text = write_tensor(&t);
        let back = parse_tensor(&text).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(write_tensor(&back), text);
    }

    #[test]
    fn ckl_flag_survives(n in 1usize..4, seed in any::<u64>()) {
        let t = zoo::random_ckl(n, seed);
        let back = parse_tensor(&write_tensor(&t)).unwrap();
        prop_assert!(back.ckl());
        prop_assert_eq!(back, t);
    }
}
