//! Every example doubles as a smoke test.

macro_rules! example {
    ($module:ident, $test:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(variants, variants_runs, "variants.rs");
example!(match_contexts, match_contexts_runs, "match_contexts.rs");
example!(lexicon_valence, lexicon_valence_runs, "lexicon_valence.rs");
example!(label_valence, label_valence_runs, "label_valence.rs");
example!(compare_approaches, compare_approaches_runs, "compare_approaches.rs");
example!(correlation, correlation_runs, "correlation.rs");
example!(regression_tables, regression_tables_runs, "regression_tables.rs");
example!(elastic_net_cv, elastic_net_cv_runs, "elastic_net_cv.rs");
example!(batch_classification, batch_classification_runs, "batch_classification.rs");
example!(toy_pipeline, toy_pipeline_runs, "toy_pipeline.rs");
