use std::collections::BTreeMap;

use serde::Serialize;

use super::ScoreRecord;
use crate::corpus::TargetSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PncPoint {
    pub target_id: String,
    pub pnc: String,
    pub valence: f64,
    pub frequency: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamePlotEntry {
    pub name: String,
    pub name_valence: f64,
    pub pncs: Vec<PncPoint>,
}

/// Name valence with the valence and frequency of every compound referring to
/// that name, sorted by ascending name valence.
pub fn name_pnc_plot_data(
    targets: &[TargetSpec],
    pnc_scores: &[ScoreRecord],
    name_scores: &[ScoreRecord],
    pnc_frequency: &BTreeMap<String, usize>,
) -> Vec<NamePlotEntry> {
    let pnc: BTreeMap<&str, f64> = pnc_scores.iter().map(|s| (s.target_id.as_str(), s.valence)).collect();
    let name: BTreeMap<&str, f64> = name_scores.iter().map(|s| (s.target_id.as_str(), s.valence)).collect();

    let mut by_name: BTreeMap<String, NamePlotEntry> = BTreeMap::new();
    for t in targets {
        let id = t.target_id.as_str();
        let (Some(pv), Some(nv)) = (pnc.get(id), name.get(id)) else {
            continue;
        };
        let entry = by_name.entry(t.full_name()).or_insert_with(|| NamePlotEntry {
            name: t.full_name(),
            name_valence: *nv,
            pncs: Vec::new(),
        });
        entry.pncs.push(PncPoint {
            target_id: t.target_id.clone(),
            pnc: t.pnc_surface.clone(),
            valence: *pv,
            frequency: pnc_frequency.get(id).copied().unwrap_or(0),
        });
    }
    let mut entries: Vec<NamePlotEntry> = by_name.into_values().collect();
    for e in &mut entries {
        e.pncs.sort_by(|a, b| a.target_id.cmp(&b.target_id));
    }
    entries.sort_by(|a, b| a.name_valence.total_cmp(&b.name_valence).then_with(|| a.name.cmp(&b.name)));
    entries
}
