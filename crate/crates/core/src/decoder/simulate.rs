use std::collections::HashSet;
use std::io::BufRead;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::biasing::ContactList;
use crate::error::{Error, Result};
use crate::g2g::G2GMap;

/// One training utterance with the contact name it mentions, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedUtterance {
    pub text: String,
    pub entity: Option<String>,
}

/// Reads `text<TAB>entity` lines; a line without a tab has no entity.
pub fn load_tagged_corpus<R: BufRead>(source: R) -> Result<Vec<TaggedUtterance>> {
    let mut out = Vec::new();
    for (lineno, line) in source.lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| Error::parse("tagged corpus", lineno + 1, msg);
        let utt = match line.split_once('\t') {
            Some((text, entity)) => {
                let entity = entity.trim();
                if entity.is_empty() {
                    return Err(err("empty entity".into()));
                }
                if !text.contains(entity) {
                    return Err(err(format!("entity {entity:?} does not occur in the text")));
                }
                TaggedUtterance {
                    text: text.to_string(),
                    entity: Some(entity.to_string()),
                }
            }
            None => TaggedUtterance {
                text: line.to_string(),
                entity: None,
            },
        };
        out.push(utt);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub min_size: usize,
    pub max_size: usize,
    pub p_remove: f64,
    pub p_swap: f64,
    /// G2G variants added per word of each name.
    pub k_g2g: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            min_size: 200,
            max_size: 400,
            p_remove: 0.5,
            p_swap: 0.3,
            k_g2g: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedUtterance {
    pub contacts: ContactList,
    pub reference: String,
    /// Drawn list size before any removal of the target.
    pub sampled_size: usize,
    pub target_removed: bool,
    pub target_swapped: bool,
}

/// Distinct tagged entities in first-seen order.
pub fn entity_pool(corpus: &[TaggedUtterance]) -> Vec<String> {
    let mut seen = HashSet::new();
    corpus
        .iter()
        .filter_map(|u| u.entity.as_ref())
        .filter(|e| seen.insert(e.as_str()))
        .cloned()
        .collect()
}

/// Draws a personalized contact list for every utterance. The list size is
/// uniform on `[min_size, max_size]` and always includes the target, which
/// is then dropped with probability `p_remove`; independently the target in
/// the reference is replaced by another listed name with probability
/// `p_swap`. Every name gets up to `k_g2g` G2G variants per word.
pub fn simulate_contact_list<R: Rng + ?Sized>(
    corpus: &[TaggedUtterance],
    rng: &mut R,
    g2g: &G2GMap,
    config: &SimulationConfig,
) -> Result<Vec<SimulatedUtterance>> {
    if config.min_size == 0 || config.min_size > config.max_size {
        return Err(Error::InvalidArgument(format!(
            "list size range [{}, {}] is empty",
            config.min_size, config.max_size
        )));
    }
    for p in [config.p_remove, config.p_swap] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("probability {p} not in [0, 1]")));
        }
    }
    let pool = entity_pool(corpus);
    if pool.len() < config.max_size {
        return Err(Error::InsufficientPool {
            needed: config.max_size,
            available: pool.len(),
        });
    }
    corpus
        .iter()
        .map(|utt| simulate_one(utt, &pool, rng, g2g, config))
        .collect()
}

fn simulate_one<R: Rng + ?Sized>(
    utt: &TaggedUtterance,
    pool: &[String],
    rng: &mut R,
    g2g: &G2GMap,
    config: &SimulationConfig,
) -> Result<SimulatedUtterance> {
    let size = rng.gen_range(config.min_size..=config.max_size);
    let target = utt.entity.as_deref();
    let (removed, swapped) = match target {
        Some(_) => (rng.gen_bool(config.p_remove), rng.gen_bool(config.p_swap)),
        None => (false, false),
    };
    let others: Vec<&String> = pool.iter().filter(|n| Some(n.as_str()) != target).collect();
    let n_others = if target.is_some() { size - 1 } else { size };
    let picked: Vec<&String> = index::sample(rng, others.len(), n_others)
        .into_iter()
        .map(|i| others[i])
        .collect();

    let mut reference = utt.text.clone();
    if let (Some(t), true) = (target, swapped) {
        let replacement = picked.choose(rng).expect("list has other names");
        reference = reference.replacen(t, replacement, 1);
    }

    let mut contacts = ContactList::default();
    if let (Some(t), false) = (target, removed) {
        contacts.push(t, &[t])?;
    }
    for name in &picked {
        contacts.push(name, &[name.as_str()])?;
    }
    Ok(SimulatedUtterance {
        contacts: contacts.expand_g2g(g2g, config.k_g2g),
        reference,
        sampled_size: size,
        target_removed: removed,
        target_swapped: swapped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn corpus(n: usize) -> Vec<TaggedUtterance> {
        let mut c: Vec<TaggedUtterance> = (0..n)
            .map(|i| TaggedUtterance {
                text: format!("call name{i} now"),
                entity: Some(format!("name{i}")),
            })
            .collect();
        c.push(TaggedUtterance {
            text: "what time is it".into(),
            entity: None,
        });
        c
    }

    #[test]
    fn seeded_runs_repeat() {
        let c = corpus(450);
        let g = G2GMap::new();
        let cfg = SimulationConfig::default();
        let a = simulate_contact_list(&c[..20], &mut ChaCha8Rng::seed_from_u64(1), &g, &cfg);
        // the first 20 utterances only cover 20 entities
        assert!(matches!(a, Err(Error::InsufficientPool { needed: 400, available: 20 })));
        let a = simulate_contact_list(&c, &mut ChaCha8Rng::seed_from_u64(1), &g, &cfg).unwrap();
        let b = simulate_contact_list(&c, &mut ChaCha8Rng::seed_from_u64(1), &g, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn list_contents() {
        let c = corpus(450);
        let mut g = G2GMap::new();
        g.insert("name3", vec!["naim3".into(), "nayme3".into(), "nm3".into()]).unwrap();
        let cfg = SimulationConfig::default();
        let out = simulate_contact_list(&c, &mut ChaCha8Rng::seed_from_u64(9), &g, &cfg).unwrap();
        for (utt, sim) in c.iter().zip(&out) {
            assert!((200..=400).contains(&sim.sampled_size));
            let displays: HashSet<&str> = sim.contacts.names.iter().map(|n| n.display.as_str()).collect();
            assert_eq!(displays.len(), sim.contacts.len());
            match &utt.entity {
                Some(e) => {
                    assert_eq!(displays.contains(e.as_str()), !sim.target_removed);
                    assert_eq!(sim.contacts.len(), sim.sampled_size - sim.target_removed as usize);
                    assert_eq!(sim.reference == utt.text, !sim.target_swapped);
                }
                None => {
                    assert_eq!(sim.contacts.len(), sim.sampled_size);
                    assert!(!sim.target_removed && !sim.target_swapped);
                }
            }
            if let Some(n) = sim.contacts.names.iter().find(|n| n.display == "name3") {
                assert_eq!(n.spellings, ["name3", "naim3", "nayme3"]);
            }
        }
    }

    #[test]
    fn corpus_file() {
        let c = load_tagged_corpus("call John Smith\tJohn Smith\nhello there\n".as_bytes()).unwrap();
        assert_eq!(c[0].entity.as_deref(), Some("John Smith"));
        assert_eq!(c[1].entity, None);
        assert!(load_tagged_corpus("call John\tJane\n".as_bytes()).is_err());
        assert!(load_tagged_corpus("call John\t \n".as_bytes()).is_err());
    }
}
