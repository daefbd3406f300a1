//! Configurations shipped with the binary, one per reproduced figure.

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub text: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset { name: "fig2", summary: "Wigner patches, l_opt and P(n) at N=30, g=g_c", text: include_str!("../presets/fig2.toml") },
    Preset { name: "fig3", summary: "coupling sweep at N=200", text: include_str!("../presets/fig3.toml") },
    Preset { name: "fig4", summary: "atom-number sweep at g=g_c", text: include_str!("../presets/fig4.toml") },
    Preset { name: "fig6", summary: "thermodynamic limit and critical scaling", text: include_str!("../presets/fig6.toml") },
    Preset { name: "fig7", summary: "frequency-ratio sweep at N=200, g=g_c", text: include_str!("../presets/fig7.toml") },
    Preset { name: "fig8", summary: "photon-cutoff convergence at g=g_c", text: include_str!("../presets/fig8.toml") },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
