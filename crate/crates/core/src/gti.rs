//! Search-trend index construction.
//!
//! A fixed, ordered keyword universe is expanded from a base table of
//! English/French/Spanish term triples plus declared spelling variants.
//! Monthly relative-search-volume series (0-100) are averaged into annual
//! indices, and per-pair feature vectors are assembled from an annual-value
//! table: the unilateral vector (keywords measured in the origin country),
//! the bilateral vector (keywords combined with the destination's localized
//! name), the destination-name scalar, and the unilateral-times-destination
//! interaction vector.
//!
//! Transports and the on-disk cache live in the companion crate; this module
//! is pure given an in-memory [`GtiTable`].

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::panel::CountryCode;

/// Keyword language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Lang {
    En,
    Fr,
    Es,
}

impl Lang {
    pub const ALL: [Lang; 3] = [Lang::En, Lang::Fr, Lang::Es];

    pub fn as_str(&self) -> &'static str {
        match self {
            Lang::En => "en",
            Lang::Fr => "fr",
            Lang::Es => "es",
        }
    }
}

/// One row of the keyword base table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordTriple {
    pub en: String,
    pub fr: String,
    pub es: String,
}

/// A surface form in the universe and the languages it covers (identical
/// forms across languages collapse into one entry).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Keyword {
    pub text: String,
    pub langs: Vec<Lang>,
}

/// Ordered keyword universe; positions are stable across pairs and years so
/// GTI vector entries are comparable, and `version` fingerprints the exact
/// ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordUniverse {
    keywords: Vec<Keyword>,
    version: u64,
    duplicates_collapsed: usize,
}

impl KeywordUniverse {
    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }

    pub fn keywords(&self) -> &[Keyword] {
        &self.keywords
    }

    pub fn get(&self, index: usize) -> Option<&Keyword> {
        self.keywords.get(index)
    }

    pub fn position_of(&self, text: &str) -> Option<usize> {
        self.keywords.iter().position(|k| k.text == text)
    }

    /// FNV-1a fingerprint of the ordered keyword texts.
    pub fn version(&self) -> u64 {
        self.version
    }

    /// How many expanded forms collapsed into earlier entries.
    pub fn duplicates_collapsed(&self) -> usize {
        self.duplicates_collapsed
    }
}

/// Strips the accents that occur in the French/Spanish keyword lists.
pub fn strip_accents(text: &str) -> String {
    text.chars()
        .map(|c| match c {
            'à' | 'á' | 'â' | 'ä' => 'a',
            'ç' => 'c',
            'è' | 'é' | 'ê' | 'ë' => 'e',
            'ì' | 'í' | 'î' | 'ï' => 'i',
            'ñ' => 'n',
            'ò' | 'ó' | 'ô' | 'ö' => 'o',
            'ù' | 'ú' | 'û' | 'ü' => 'u',
            _ => c,
        })
        .collect()
}

fn fnv1a(texts: &[Keyword]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for k in texts {
        for b in k.text.bytes().chain([0x1f]) {
            hash ^= b as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    hash
}

/// Expands the base table into the keyword universe.
///
/// Per term and language the universe receives the base form, its declared
/// variants (plural, gender, alternative spellings), and the accent-stripped
/// twin of any accented French/Spanish form. Ordering is deterministic:
/// base-table order, then en/fr/es, each form followed by its variants.
/// Duplicate surface forms collapse into the first occurrence (gaining its
/// language tag) and are counted.
pub fn build_universe(
    base: &[KeywordTriple],
    declared_variants: &[(String, String)],
) -> KeywordUniverse {
    let mut keywords: Vec<Keyword> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut duplicates = 0usize;

    let mut add = |text: &str, lang: Lang, keywords: &mut Vec<Keyword>, dup: &mut usize| {
        let text = text.trim();
        if text.is_empty() {
            return;
        }
        if let Some(&i) = index.get(text) {
            if !keywords[i].langs.contains(&lang) {
                keywords[i].langs.push(lang);
            }
            *dup += 1;
        } else {
            index.insert(text.to_owned(), keywords.len());
            keywords.push(Keyword { text: text.to_owned(), langs: alloc::vec![lang] });
        }
    };

    for triple in base {
        for (text, lang) in [
            (triple.en.as_str(), Lang::En),
            (triple.fr.as_str(), Lang::Fr),
            (triple.es.as_str(), Lang::Es),
        ] {
            add(text, lang, &mut keywords, &mut duplicates);
            for (root, variant) in declared_variants {
                if root == text {
                    add(variant, lang, &mut keywords, &mut duplicates);
                    if lang != Lang::En {
                        let stripped = strip_accents(variant);
                        if stripped != *variant {
                            add(&stripped, lang, &mut keywords, &mut duplicates);
                        }
                    }
                }
            }
            if lang != Lang::En {
                let stripped = strip_accents(text);
                if stripped != text {
                    add(&stripped, lang, &mut keywords, &mut duplicates);
                }
            }
        }
    }

    let version = fnv1a(&keywords);
    KeywordUniverse { keywords, version, duplicates_collapsed: duplicates }
}

/// A country's display names in the three keyword languages.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LocalizedNames {
    pub en: Option<String>,
    pub fr: Option<String>,
    pub es: Option<String>,
}

impl LocalizedNames {
    pub fn get(&self, lang: Lang) -> Option<&str> {
        match lang {
            Lang::En => self.en.as_deref(),
            Lang::Fr => self.fr.as_deref(),
            Lang::Es => self.es.as_deref(),
        }
    }
}

/// One bilateral search term: a universe keyword combined with the localized
/// destination name of the same language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilateralKeyword {
    pub universe_index: usize,
    pub lang: Lang,
    pub text: String,
}

/// Combines every universe keyword with the localized destination name,
/// preserving universe order; a keyword shared across languages yields one
/// combination per language (e.g. "visa Spain" / "visa Espagne" /
/// "visa España").
pub fn bilateral_keywords(
    universe: &KeywordUniverse,
    destination: CountryCode,
    names: &LocalizedNames,
) -> Result<Vec<BilateralKeyword>> {
    for lang in Lang::ALL {
        if names.get(lang).is_none() {
            return Err(Error::Registry(format!(
                "destination {destination} has no {} display name",
                lang.as_str()
            )));
        }
    }
    let mut out = Vec::new();
    for (i, kw) in universe.keywords.iter().enumerate() {
        for &lang in &kw.langs {
            let name = names.get(lang).unwrap();
            out.push(BilateralKeyword {
                universe_index: i,
                lang,
                text: format!("{} {}", kw.text, name),
            });
        }
    }
    Ok(out)
}

/// One month of relative search volume, normalized by the provider to
/// [0, 100].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonthValue {
    pub year: i32,
    pub month: u8,
    pub value: f64,
}

/// Monthly relative-search-volume series for one (keyword, geography).
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlySeries {
    pub keyword: String,
    pub geography: CountryCode,
    months: Vec<MonthValue>,
}

impl MonthlySeries {
    pub fn new(keyword: String, geography: CountryCode, months: Vec<MonthValue>) -> Result<Self> {
        for m in &months {
            if m.month == 0 || m.month > 12 {
                return Err(Error::Data(format!("month {} outside 1-12", m.month)));
            }
            if !m.value.is_finite() || !(0.0..=100.0).contains(&m.value) {
                return Err(Error::Data(format!(
                    "search volume {} outside [0, 100] for {keyword} {}-{:02}",
                    m.value, m.year, m.month
                )));
            }
        }
        if !months.windows(2).all(|w| (w[0].year, w[0].month) < (w[1].year, w[1].month)) {
            return Err(Error::Data("months not strictly increasing".into()));
        }
        Ok(Self { keyword, geography, months })
    }

    pub fn months(&self) -> &[MonthValue] {
        &self.months
    }

    pub fn is_empty(&self) -> bool {
        self.months.is_empty()
    }
}

/// Annual index: the arithmetic mean of the months available in each year.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnualGti {
    pub keyword: String,
    pub geography: CountryCode,
    pub values: BTreeMap<i32, f64>,
}

/// Averages monthly values into one value per calendar year; years with no
/// months are absent from the output.
pub fn annualize(series: &MonthlySeries) -> Result<AnnualGti> {
    if series.is_empty() {
        return Err(Error::Param(format!(
            "cannot annualize empty series for {:?}",
            series.keyword
        )));
    }
    let mut sums: BTreeMap<i32, (f64, usize)> = BTreeMap::new();
    for m in &series.months {
        let e = sums.entry(m.year).or_insert((0.0, 0));
        e.0 += m.value;
        e.1 += 1;
    }
    let values = sums.into_iter().map(|(y, (sum, n))| (y, sum / n as f64)).collect();
    Ok(AnnualGti { keyword: series.keyword.clone(), geography: series.geography, values })
}

/// In-memory table of annual GTI values keyed by (keyword, geography).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GtiTable {
    entries: BTreeMap<(String, CountryCode), BTreeMap<i32, f64>>,
}

impl GtiTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, annual: AnnualGti) {
        self.entries
            .entry((annual.keyword, annual.geography))
            .or_default()
            .extend(annual.values);
    }

    /// Inserts a single annual value (used when loading annual exports).
    pub fn insert_value(
        &mut self,
        keyword: &str,
        geography: CountryCode,
        year: i32,
        value: f64,
    ) -> Result<()> {
        if !value.is_finite() || !(0.0..=100.0).contains(&value) {
            return Err(Error::Data(format!("annual GTI {value} outside [0, 100]")));
        }
        self.entries
            .entry((keyword.to_owned(), geography))
            .or_default()
            .insert(year, value);
        Ok(())
    }

    pub fn get(&self, keyword: &str, geography: CountryCode, year: i32) -> Option<f64> {
        self.entries
            .get(&(keyword.to_owned(), geography))
            .and_then(|m| m.get(&year))
            .copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The assembled GTI feature vectors for one origin-destination pair.
///
/// `uni`, `bi`, and `interaction` hold one value per universe position per
/// year; `dest` is the destination-name scalar per year. Entries missing
/// from the table contribute 0 and bump `missing_lookups`. A multi-language
/// entry's bilateral value is the mean over its language combinations
/// (missing combinations counting as 0), and the destination scalar is the
/// mean over the distinct localized destination names.
#[derive(Debug, Clone, PartialEq)]
pub struct GtiVectors {
    pub origin: CountryCode,
    pub destination: CountryCode,
    pub years: Vec<i32>,
    pub uni: Vec<Vec<f64>>,
    pub bi: Vec<Vec<f64>>,
    pub dest: Vec<f64>,
    pub interaction: Vec<Vec<f64>>,
    pub missing_lookups: usize,
}

/// Assembles the per-pair GTI vectors from annual values, all measured in
/// the origin country.
pub fn assemble(
    universe: &KeywordUniverse,
    origin: CountryCode,
    destination: CountryCode,
    dest_names: &LocalizedNames,
    years: &[i32],
    table: &GtiTable,
) -> Result<GtiVectors> {
    let combos = bilateral_keywords(universe, destination, dest_names)?;
    let mut dest_variants: Vec<&str> = Lang::ALL
        .iter()
        .filter_map(|&l| dest_names.get(l))
        .collect();
    dest_variants.dedup();

    // The destination-name GTI must exist somewhere in the span.
    let dest_available = years.iter().any(|&y| {
        dest_variants.iter().any(|name| table.get(name, origin, y).is_some())
    });
    if !dest_available {
        return Err(Error::Data(format!(
            "destination-name GTI entirely missing for {origin}->{destination}"
        )));
    }

    let k = universe.len();
    let mut missing = 0usize;
    let mut uni = Vec::with_capacity(years.len());
    let mut bi = Vec::with_capacity(years.len());
    let mut dest = Vec::with_capacity(years.len());
    let mut interaction = Vec::with_capacity(years.len());

    for &year in years {
        let mut uni_y = alloc::vec![0.0; k];
        for (i, kw) in universe.keywords.iter().enumerate() {
            match table.get(&kw.text, origin, year) {
                Some(v) => uni_y[i] = v,
                None => missing += 1,
            }
        }

        let mut bi_y = alloc::vec![0.0; k];
        let mut combo_counts = alloc::vec![0usize; k];
        for c in &combos {
            combo_counts[c.universe_index] += 1;
            match table.get(&c.text, origin, year) {
                Some(v) => bi_y[c.universe_index] += v,
                None => missing += 1,
            }
        }
        for (v, &n) in bi_y.iter_mut().zip(&combo_counts) {
            if n > 0 {
                *v /= n as f64;
            }
        }

        let mut dest_sum = 0.0;
        for name in &dest_variants {
            match table.get(name, origin, year) {
                Some(v) => dest_sum += v,
                None => missing += 1,
            }
        }
        let dest_y = dest_sum / dest_variants.len() as f64;

        let inter_y: Vec<f64> = uni_y.iter().map(|u| u * dest_y).collect();

        uni.push(uni_y);
        bi.push(bi_y);
        dest.push(dest_y);
        interaction.push(inter_y);
    }

    Ok(GtiVectors {
        origin,
        destination,
        years: years.to_vec(),
        uni,
        bi,
        dest,
        interaction,
        missing_lookups: missing,
    })
}
