#![no_main]

use censim_core::montecarlo::StudyPlan;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(plan) = StudyPlan::from_json(text) else { return };
    if plan.validate().is_ok() {
        let configs = plan.study_configs();
        assert!(!configs.is_empty());
        for c in &configs {
            assert!(c.validate().is_ok());
        }
    }
});
