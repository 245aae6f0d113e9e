/// Bundled example files as `(file name, contents)`, in canonical form.
pub const CORPUS: &[(&str, &str)] = &[
    ("conv_ex1.sfg", include_str!("../../corpus/conv_ex1.sfg")),
    ("conv_ex2.sfg", include_str!("../../corpus/conv_ex2.sfg")),
    ("conv_ex2_badsection.sfg", include_str!("../../corpus/conv_ex2_badsection.sfg")),
    ("fivequbit.sfg", include_str!("../../corpus/fivequbit.sfg")),
    ("graphstate_ex4.sfg", include_str!("../../corpus/graphstate_ex4.sfg")),
    ("steane.sfg", include_str!("../../corpus/steane.sfg")),
    ("three_factor.sfg", include_str!("../../corpus/three_factor.sfg")),
    ("turbo_ex3.sfg", include_str!("../../corpus/turbo_ex3.sfg")),
];

/// Contents of a bundled file by name.
pub fn corpus_file(name: &str) -> Option<&'static str> {
    CORPUS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
