//! Configs shipped with the binary, addressable by name.

macro_rules! bundle {
    ($($name:literal),* $(,)?) => {
        /// `(name, TOML text)` pairs in listing order.
        pub const CONFIGS: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../configs/", $name, ".toml")))),*
        ];
    };
}

bundle!(
    "fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b",
    "fig4a", "fig4b", "fig5a", "fig5b", "fig5c", "fig5d", "fig6a", "fig6b", "fig7a", "fig7b",
    "fig7c", "fig8a", "fig8b", "fig8c", "fig8d", "fig8e", "fig8f", "fig9a", "fig9b", "fig9c",
    "fig9d", "fig10a", "fig10b", "fig11a", "fig11b", "fig11c", "fig11d", "fig12a", "fig12b",
    "fig13",
);

pub fn get(name: &str) -> Option<&'static str> {
    CONFIGS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    CONFIGS.iter().map(|(n, _)| *n)
}
