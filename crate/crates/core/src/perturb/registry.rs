use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ops::{NounSource, PhraseMode, ReorderMode};
use crate::error::{Error, Result};
use crate::linguistic::TagClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orthography {
    /// Lossy: surface content is added or removed.
    LO,
    /// Lossless: surface content is rearranged or re-cased only.
    LL,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Semantics {
    HS,
    PS,
    DS,
}

impl Semantics {
    /// Minimum word-preservation ratio for the class, if any.
    pub fn min_preservation(self) -> Option<f64> {
        match self {
            Semantics::HS => Some(0.90),
            Semantics::PS => Some(0.70),
            Semantics::DS => None,
        }
    }
}

/// One of the five orthography × semantics categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "LL-HS")]
    LlHs,
    #[serde(rename = "LO-HS")]
    LoHs,
    #[serde(rename = "LL-PS")]
    LlPs,
    #[serde(rename = "LO-PS")]
    LoPs,
    #[serde(rename = "LO-DS")]
    LoDs,
}

impl Category {
    /// Ordered from most to least semantically similar.
    pub const ALL: [Category; 5] = [Category::LlHs, Category::LoHs, Category::LlPs, Category::LoPs, Category::LoDs];

    pub fn new(orthography: Orthography, semantics: Semantics) -> Option<Category> {
        use Orthography::*;
        use Semantics::*;
        match (orthography, semantics) {
            (LL, HS) => Some(Category::LlHs),
            (LO, HS) => Some(Category::LoHs),
            (LL, PS) => Some(Category::LlPs),
            (LO, PS) => Some(Category::LoPs),
            (LO, DS) => Some(Category::LoDs),
            (LL, DS) => None,
        }
    }

    pub fn orthography(self) -> Orthography {
        match self {
            Category::LlHs | Category::LlPs => Orthography::LL,
            _ => Orthography::LO,
        }
    }

    pub fn semantics(self) -> Semantics {
        match self {
            Category::LlHs | Category::LoHs => Semantics::HS,
            Category::LlPs | Category::LoPs => Semantics::PS,
            Category::LoDs => Semantics::DS,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::LlHs => "LL-HS",
            Category::LoHs => "LO-HS",
            Category::LlPs => "LL-PS",
            Category::LoPs => "LO-PS",
            Category::LoDs => "LO-DS",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Validation(format!("unknown category {s:?}")))
    }
}

/// What happens to one input field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum FieldTransform {
    Preserve,
    Delete,
    DeleteTag {
        class: TagClass,
    },
    DeleteRandomWords,
    DeleteNounPhrases {
        mode: PhraseMode,
    },
    DeleteQuantile {
        quantile: u8,
    },
    Reorder {
        mode: ReorderMode,
    },
    Uppercase {
        class: TagClass,
        invert: bool,
    },
    DeleteNounChars,
    AddNoun {
        source: NounSource,
    },
    KeepOnlyNouns,
    ReplaceAntonyms,
    /// Whitespace perturbation over the joined title and abstract.
    Whitespace,
}

impl FieldTransform {
    pub fn describe(self) -> String {
        use FieldTransform::*;
        let class_name = |c: TagClass| match c {
            TagClass::Adj => "ADJs",
            TagClass::Noun => "NNs",
            TagClass::Verb => "Verbs",
            TagClass::Adv => "ADVs",
            TagClass::Pronoun => "PRs",
            TagClass::Determiner => "DTs",
            TagClass::Number => "Numbers",
        };
        match self {
            Preserve => "Preserve".into(),
            Delete => "Delete".into(),
            DeleteTag { class } => format!("Delete all {}", class_name(class)),
            DeleteRandomWords => "Random word deletion 30%".into(),
            DeleteNounPhrases { mode: PhraseMode::All } => "Delete all NN Phrases".into(),
            DeleteNounPhrases { mode: PhraseMode::TopHalf } => "Delete top 50% NPs".into(),
            DeleteQuantile { quantile } => format!("Delete quantile {quantile}"),
            Reorder { mode } => match mode {
                ReorderMode::Rotate => "Rotate".into(),
                ReorderMode::Shuffle => "Shuffle".into(),
                ReorderMode::SortAsc => "Sort Ascending".into(),
                ReorderMode::SortDesc => "Sort Descending".into(),
            },
            Uppercase { invert: false, .. } => "Uppercase NNs".into(),
            Uppercase { invert: true, .. } => "Uppercase non NNs".into(),
            DeleteNounChars => "Delete chars from NNs".into(),
            AddNoun { source: NounSource::Title } => "Add a NN from title".into(),
            AddNoun { source: NounSource::Abstract } => "Add a NN from abs".into(),
            KeepOnlyNouns => "Delete all non NNs".into(),
            ReplaceAntonyms => "Replace ADJs with antonyms".into(),
            Whitespace => "Randomly replace 50% whitespace chars with 2-5 whitespace chars".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NeighborSpec {
    pub code: &'static str,
    pub title_transform: FieldTransform,
    pub abstract_transform: FieldTransform,
    pub orthography: Orthography,
    pub semantics: Semantics,
}

impl NeighborSpec {
    pub fn category(&self) -> Category {
        Category::new(self.orthography, self.semantics).expect("registry never holds LL-DS")
    }

    pub fn form(&self) -> String {
        if self.title_transform == FieldTransform::Whitespace {
            return format!("{} in the title & abstract", FieldTransform::Whitespace.describe());
        }
        format!("Title -> {}; Abs -> {}", self.title_transform.describe(), self.abstract_transform.describe())
    }
}

/// Reserved code for the title-only variant.
pub const CODE_TITLE: &str = "T";
/// Reserved code for the untouched title + abstract.
pub const CODE_TITLE_ABSTRACT: &str = "T+A";

const fn spec(
    code: &'static str,
    category: (Orthography, Semantics),
    title_transform: FieldTransform,
    abstract_transform: FieldTransform,
) -> NeighborSpec {
    NeighborSpec { code, title_transform, abstract_transform, orthography: category.0, semantics: category.1 }
}

use FieldTransform as F;
use Orthography::{LL, LO};
use Semantics::{DS, HS, PS};

const fn abs(code: &'static str, category: (Orthography, Semantics), t: FieldTransform) -> NeighborSpec {
    spec(code, category, F::Preserve, t)
}

const fn title(code: &'static str, category: (Orthography, Semantics), t: FieldTransform) -> NeighborSpec {
    spec(code, category, t, F::Preserve)
}

/// The 32 neighbor classes, in table order.
pub static REGISTRY: [NeighborSpec; 32] = [
    abs("T_ARot", (LL, PS), F::Reorder { mode: ReorderMode::Rotate }),
    abs("T_AShuff", (LL, PS), F::Reorder { mode: ReorderMode::Shuffle }),
    abs("T_ASortAsc", (LL, PS), F::Reorder { mode: ReorderMode::SortAsc }),
    abs("T_ASortDesc", (LL, PS), F::Reorder { mode: ReorderMode::SortDesc }),
    abs("T_ADelRand", (LO, PS), F::DeleteRandomWords),
    abs("T_ADelADJ", (LO, PS), F::DeleteTag { class: TagClass::Adj }),
    abs("T_ADelNN", (LO, DS), F::DeleteTag { class: TagClass::Noun }),
    abs("T_ADelVB", (LO, PS), F::DeleteTag { class: TagClass::Verb }),
    abs("T_ADelADV", (LO, PS), F::DeleteTag { class: TagClass::Adv }),
    abs("T_ADelPR", (LO, PS), F::DeleteTag { class: TagClass::Pronoun }),
    abs("T_ADelDT", (LO, HS), F::DeleteTag { class: TagClass::Determiner }),
    abs("T_ADelNum", (LO, PS), F::DeleteTag { class: TagClass::Number }),
    abs("T_ADelNNPH", (LO, DS), F::DeleteNounPhrases { mode: PhraseMode::All }),
    abs("T_ADelTopNNPH", (LO, PS), F::DeleteNounPhrases { mode: PhraseMode::TopHalf }),
    title("TDelADJ_A", (LO, HS), F::DeleteTag { class: TagClass::Adj }),
    title("TDelNN_A", (LO, HS), F::DeleteTag { class: TagClass::Noun }),
    title("TDelVB_A", (LO, HS), F::DeleteTag { class: TagClass::Verb }),
    title("TDelDT_A", (LO, HS), F::DeleteTag { class: TagClass::Determiner }),
    spec("TDelNN", (LO, DS), F::DeleteTag { class: TagClass::Noun }, F::Delete),
    abs("T_ADelQ1", (LO, PS), F::DeleteQuantile { quantile: 1 }),
    abs("T_ADelQ2", (LO, PS), F::DeleteQuantile { quantile: 2 }),
    abs("T_ADelQ3", (LO, PS), F::DeleteQuantile { quantile: 3 }),
    title("TNNU_A", (LL, HS), F::Uppercase { class: TagClass::Noun, invert: false }),
    title("TNonNNU_A", (LL, HS), F::Uppercase { class: TagClass::Noun, invert: true }),
    abs("T_ANNU", (LL, HS), F::Uppercase { class: TagClass::Noun, invert: false }),
    abs("T_ANonNNU", (LL, HS), F::Uppercase { class: TagClass::Noun, invert: true }),
    spec("T_A_DelNNChar", (LO, PS), F::DeleteNounChars, F::DeleteNounChars),
    title("TRepNNT_A", (LO, HS), F::AddNoun { source: NounSource::Title }),
    title("TRepNNA_A", (LO, HS), F::AddNoun { source: NounSource::Abstract }),
    abs("T_ADelNonNNs", (LO, DS), F::KeepOnlyNouns),
    abs("T_ARepADJ", (LO, DS), F::ReplaceAntonyms),
    spec("T_A_WS", (LL, HS), F::Whitespace, F::Whitespace),
];

pub fn registry() -> &'static [NeighborSpec] {
    &REGISTRY
}

pub fn all_codes() -> Vec<&'static str> {
    REGISTRY.iter().map(|s| s.code).collect()
}

pub fn lookup(code: &str) -> Result<&'static NeighborSpec> {
    REGISTRY.iter().find(|s| s.code == code).ok_or_else(|| unknown_code(code))
}

pub(crate) fn unknown_code(code: &str) -> Error {
    let mut valid = vec![CODE_TITLE, CODE_TITLE_ABSTRACT];
    valid.extend(all_codes());
    Error::UnknownCode { code: code.to_string(), valid: valid.join(", ") }
}

pub fn codes_in(category: Category) -> Vec<&'static str> {
    REGISTRY.iter().filter(|s| s.category() == category).map(|s| s.code).collect()
}

pub fn category_of(code: &str) -> Option<Category> {
    lookup(code).ok().map(|s| s.category())
}

/// Expands a selection: `all`, a category name, or a comma list of codes
/// and category names. Order follows the registry; duplicates collapse.
pub fn expand_codes(selection: &str) -> Result<Vec<&'static str>> {
    let mut wanted = std::collections::HashSet::new();
    for item in selection.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item.eq_ignore_ascii_case("all") {
            wanted.extend(all_codes());
        } else if let Ok(cat) = item.parse::<Category>() {
            wanted.extend(codes_in(cat));
        } else {
            wanted.insert(lookup(item)?.code);
        }
    }
    if wanted.is_empty() {
        return Err(Error::Validation("empty neighbor code selection".into()));
    }
    Ok(all_codes().into_iter().filter(|c| wanted.contains(c)).collect())
}

/// Registry export row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub code: String,
    pub orthography: Orthography,
    pub semantics: Semantics,
    pub category: Category,
    pub form: String,
}

pub fn export_registry() -> Vec<RegistryEntry> {
    REGISTRY
        .iter()
        .map(|s| RegistryEntry {
            code: s.code.to_string(),
            orthography: s.orthography,
            semantics: s.semantics,
            category: s.category(),
            form: s.form(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_per_category() {
        let count = |c| codes_in(c).len();
        assert_eq!(count(Category::LoHs), 7);
        assert_eq!(count(Category::LoPs), 11);
        assert_eq!(count(Category::LoDs), 5);
        assert_eq!(count(Category::LlHs), 5);
        assert_eq!(count(Category::LlPs), 4);
    }

    #[test]
    fn codes_are_unique() {
        let mut codes = all_codes();
        codes.sort();
        codes.dedup();
        assert_eq!(codes.len(), 32);
    }

    #[test]
    fn no_lossless_dissimilar() {
        assert!(REGISTRY.iter().all(|s| !(s.orthography == LL && s.semantics == DS)));
    }

    #[test]
    fn expand_selection() {
        assert_eq!(expand_codes("all").unwrap().len(), 32);
        assert_eq!(expand_codes("LO-DS").unwrap(), ["T_ADelNN", "T_ADelNNPH", "TDelNN", "T_ADelNonNNs", "T_ARepADJ"]);
        assert_eq!(expand_codes("T_A_WS, T_ARot,T_ARot").unwrap(), ["T_ARot", "T_A_WS"]);
        assert!(matches!(expand_codes("T_Nope"), Err(Error::UnknownCode { .. })));
    }

    #[test]
    fn forms_read_like_the_table() {
        assert_eq!(lookup("TDelNN").unwrap().form(), "Title -> Delete all NNs; Abs -> Delete");
        assert_eq!(lookup("T_ADelRand").unwrap().form(), "Title -> Preserve; Abs -> Random word deletion 30%");
    }
}
