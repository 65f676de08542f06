//! Seeded three-source fixture with known truth: video-game records spread
//! over an encyclopedic source, a review site with opaque headers and a
//! sales chart. Besides the sources it writes the target schema, lookup
//! tables for the mock oracle, gold files and a ready-to-run config.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{Datelike, Duration, NaiveDate};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::datamodel::{AttributeDescriptor, AttributeType, DataError, TargetSchema, Value};
use crate::oracle::mock::MockTables;
use crate::schema_matching::{Matcher, SchemaCorrespondence};

pub const SOURCES: [&str; 3] = ["dbp", "meta", "sales"];

const PLATFORMS: [&str; 5] = ["PC", "PlayStation", "Xbox", "Nintendo", "Mobile"];
const GENRES: [&str; 10] = [
    "Action",
    "Adventure",
    "Role-Playing",
    "Shooter",
    "Strategy",
    "Puzzle",
    "Racing",
    "Sports",
    "Simulation",
    "Platformer",
];
// (name, alpha-2, alpha-3)
const COUNTRIES: [(&str, &str, &str); 10] = [
    ("United States", "US", "USA"),
    ("Japan", "JP", "JPN"),
    ("United Kingdom", "GB", "GBR"),
    ("France", "FR", "FRA"),
    ("Germany", "DE", "DEU"),
    ("Canada", "CA", "CAN"),
    ("Sweden", "SE", "SWE"),
    ("Poland", "PL", "POL"),
    ("South Korea", "KR", "KOR"),
    ("Finland", "FI", "FIN"),
];
const ADJECTIVES: [&str; 36] = [
    "Crimson", "Silent", "Eternal", "Broken", "Hidden", "Iron", "Golden", "Frozen", "Savage", "Lost", "Ancient",
    "Neon", "Shadow", "Burning", "Hollow", "Radiant", "Wild", "Distant", "Fallen", "Mystic", "Rogue", "Sacred",
    "Scarlet", "Stellar", "Twisted", "Velvet", "Wicked", "Azure", "Phantom", "Rusty", "Solar", "Thunder", "Cosmic",
    "Emerald", "Obsidian", "Primal",
];
const NOUNS: [&str; 40] = [
    "Forge",
    "Kingdom",
    "Horizon",
    "Legion",
    "Frontier",
    "Citadel",
    "Odyssey",
    "Empire",
    "Harbor",
    "Circuit",
    "Dungeon",
    "Galaxy",
    "Garden",
    "Tower",
    "Voyage",
    "Arena",
    "Outpost",
    "Reactor",
    "Sanctum",
    "Valley",
    "Warden",
    "Drift",
    "Echo",
    "Fortress",
    "Gambit",
    "Hunter",
    "Isle",
    "Labyrinth",
    "Mirage",
    "Nexus",
    "Oracle",
    "Paladin",
    "Quarry",
    "Rift",
    "Saga",
    "Tempest",
    "Uprising",
    "Vanguard",
    "Wasteland",
    "Zenith",
];
const SUBTITLES: [&str; 16] = [
    "Reborn",
    "Origins",
    "Awakening",
    "Legacy",
    "Redemption",
    "Ascension",
    "Aftermath",
    "Revelations",
    "Requiem",
    "Dawn",
    "Exodus",
    "Genesis",
    "Uprising",
    "Reckoning",
    "Chronicles",
    "Resurgence",
];
const STUDIO_A: [&str; 15] = [
    "Northwind",
    "Blue Owl",
    "Red Pine",
    "Ironclad",
    "Lucid",
    "Pixel Harbor",
    "Starfall",
    "Moonlit",
    "Granite",
    "Cobalt",
    "Firefly",
    "Silver Fox",
    "Quantum",
    "Brightlake",
    "Stormcrow",
];
const STUDIO_B: [&str; 5] = ["Studios", "Games", "Interactive", "Entertainment", "Softworks"];

#[derive(Debug, Clone, Copy)]
pub struct FixtureSpec {
    pub seed: u64,
    /// Distinct real-world entities; each source holds roughly 68% of them.
    pub entities: usize,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        Self {
            seed: 42,
            entities: 2900,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureSummary {
    pub config: PathBuf,
    pub records: BTreeMap<String, usize>,
    pub entities: usize,
    pub gold_matching_pairs: BTreeMap<String, usize>,
    pub fusion_test_entries: usize,
}

#[derive(Debug, Clone)]
struct Entity {
    id: String,
    name: String,
    platform: usize,
    developer: String,
    released: NaiveDate,
    score: f64,
    genres: Vec<String>,
    country: usize,
    /// Units sold, a multiple of 10 000.
    sales: f64,
    /// Index of the franchise predecessor, if any.
    sibling_of: Option<usize>,
}

impl Entity {
    fn truth(&self) -> BTreeMap<String, serde_json::Value> {
        let mut m = BTreeMap::new();
        m.insert("name".into(), self.name.clone().into());
        m.insert("platform".into(), PLATFORMS[self.platform].into());
        m.insert("developer".into(), self.developer.clone().into());
        m.insert("released".into(), self.released.format("%Y-%m-%d").to_string().into());
        m.insert("score".into(), self.score.into());
        m.insert("genres".into(), self.genres.clone().into());
        m.insert("country".into(), COUNTRIES[self.country].1.into());
        m.insert("sales".into(), self.sales.into());
        m
    }

    fn truth_value(&self, attr: &str) -> Value {
        match attr {
            "name" => Value::Str(self.name.clone()),
            "platform" => Value::Str(PLATFORMS[self.platform].into()),
            "developer" => Value::Str(self.developer.clone()),
            "released" => Value::Date(self.released),
            "score" => Value::Num(self.score),
            "genres" => Value::List(self.genres.clone()),
            "country" => Value::Str(COUNTRIES[self.country].1.into()),
            "sales" => Value::Num(self.sales),
            other => unreachable!("unknown attribute {other}"),
        }
    }
}

/// One source row: raw cells, the normalized value each cell should turn
/// into, and the entity it describes.
struct Row {
    entity: usize,
    cells: Vec<Option<String>>,
    normalized: BTreeMap<&'static str, Value>,
}

struct SourceLayout {
    name: &'static str,
    header: Vec<&'static str>,
    /// Header → target attribute.
    mapping: Vec<(&'static str, &'static str)>,
    id_column: Option<&'static str>,
}

fn layouts() -> Vec<SourceLayout> {
    vec![
        SourceLayout {
            name: "dbp",
            header: vec![
                "title",
                "platform_name",
                "developer",
                "release_date",
                "genre",
                "country_of_origin",
            ],
            mapping: vec![
                ("title", "name"),
                ("platform_name", "platform"),
                ("developer", "developer"),
                ("release_date", "released"),
                ("genre", "genres"),
                ("country_of_origin", "country"),
            ],
            id_column: None,
        },
        SourceLayout {
            name: "meta",
            header: vec![
                "id",
                "Attribute_1",
                "Attribute_2",
                "Attribute_3",
                "Attribute_4",
                "Attribute_5",
                "Attribute_6",
                "Attribute_7",
            ],
            mapping: vec![
                ("Attribute_1", "name"),
                ("Attribute_2", "platform"),
                ("Attribute_3", "developer"),
                ("Attribute_4", "released"),
                ("Attribute_5", "genres"),
                ("Attribute_6", "country"),
                ("Attribute_7", "score"),
            ],
            id_column: Some("id"),
        },
        SourceLayout {
            name: "sales",
            header: vec!["Name", "Platform", "Year", "Genre", "Global_Sales"],
            mapping: vec![
                ("Name", "name"),
                ("Platform", "platform"),
                ("Year", "released"),
                ("Genre", "genres"),
                ("Global_Sales", "sales"),
            ],
            id_column: None,
        },
    ]
}

/// Raw platform spellings per source, indexed like `PLATFORMS`.
fn platform_forms(source: &str) -> [&'static [&'static str]; 5] {
    match source {
        "dbp" => [
            &["Microsoft Windows"],
            &["PlayStation 4", "PlayStation 5"],
            &["Xbox One", "Xbox Series X"],
            &["Nintendo Switch"],
            &["iOS", "Android"],
        ],
        "meta" => [&["PC"], &["PS4", "PS5"], &["XONE", "XSX"], &["Switch"], &["iOS"]],
        _ => [&["PC"], &["PS4"], &["XOne"], &["NS"], &["Mobile"]],
    }
}

pub fn target_schema() -> TargetSchema {
    let attr = |name: &str, t: AttributeType, d: &str| {
        let mut a = AttributeDescriptor::new(name, t);
        a.description = d.into();
        a
    };
    let mut platform = attr(
        "platform",
        AttributeType::Categorical,
        "platform family the game was released on",
    );
    platform.value_set = Some(PLATFORMS.iter().map(|s| s.to_string()).collect());
    TargetSchema::new(
        "id",
        vec![
            attr("id", AttributeType::String, "record identifier"),
            attr("name", AttributeType::String, "title of the game"),
            platform,
            attr("developer", AttributeType::String, "studio that developed the game"),
            attr("released", AttributeType::Date, "first release date"),
            attr("score", AttributeType::Number, "critic score from 0 to 100"),
            attr("genres", AttributeType::List, "genres of the game"),
            attr("country", AttributeType::String, "country of the developer"),
            attr("sales", AttributeType::Number, "units sold worldwide"),
        ],
    )
    .expect("fixture schema is valid")
}

fn make_entities(rng: &mut ChaCha8Rng, n: usize) -> Vec<Entity> {
    let studios: Vec<String> = STUDIO_A
        .iter()
        .flat_map(|a| STUDIO_B.iter().map(move |b| format!("{a} {b}")))
        .collect();
    let mut used = BTreeSet::new();
    let mut out: Vec<Entity> = Vec::with_capacity(n);
    let start = NaiveDate::from_ymd_opt(1995, 1, 1).expect("valid date");
    while out.len() < n {
        let idx = out.len();
        // a third of the titles continue an earlier franchise entry
        let parent = (idx > 10 && rng.random_bool(0.3)).then(|| rng.random_range(0..idx));
        let (name, sibling_of) = match parent.filter(|p| out[*p].sibling_of.is_none()) {
            Some(p) => {
                let base = &out[p].name;
                let name = if rng.random_bool(0.5) {
                    format!("{base} {}", rng.random_range(2..5))
                } else {
                    format!("{base}: {}", SUBTITLES.choose(rng).expect("non-empty"))
                };
                (name, Some(p))
            }
            None => {
                let mut name = format!(
                    "{} {}",
                    ADJECTIVES.choose(rng).expect("non-empty"),
                    NOUNS.choose(rng).expect("non-empty")
                );
                if rng.random_bool(0.5) {
                    name = format!("{name} {}", NOUNS.choose(rng).expect("non-empty"));
                }
                (name, None)
            }
        };
        if !used.insert(name.clone()) {
            continue;
        }
        let k = rng.random_range(1..4);
        let mut genres: Vec<String> = GENRES.choose_multiple(rng, k).map(|g| g.to_string()).collect();
        genres.sort();
        let mut e = Entity {
            id: format!("E{:05}", idx + 1),
            name,
            platform: rng.random_range(0..PLATFORMS.len()),
            developer: studios.choose(rng).expect("non-empty").clone(),
            released: start + Duration::days(rng.random_range(0..10_500)),
            score: rng.random_range(40..99) as f64,
            genres,
            country: rng.random_range(0..COUNTRIES.len()),
            sales: rng.random_range(5..2000) as f64 * 10_000.0,
            sibling_of,
        };
        if let Some(p) = sibling_of {
            // sequels share studio, country and usually platform and genres
            let prev = out[p].clone();
            e.developer = prev.developer;
            e.country = prev.country;
            e.released = prev.released + Duration::days(rng.random_range(365..1500));
            if rng.random_bool(0.7) {
                e.platform = prev.platform;
                e.genres = prev.genres;
            }
        }
        out.push(e);
    }
    out
}

/// Source membership per entity: 35% in all three, 35% in two, 30% in one.
fn memberships(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|_| {
            let r: f64 = rng.random();
            let mut all = vec![0, 1, 2];
            if r < 0.35 {
                all
            } else if r < 0.70 {
                all.remove(rng.random_range(0..3));
                all
            } else {
                vec![rng.random_range(0..3)]
            }
        })
        .collect()
}

fn typo(rng: &mut ChaCha8Rng, s: &str) -> String {
    let mut chars: Vec<char> = s.chars().collect();
    let letters: Vec<usize> = chars
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_ascii_lowercase())
        .map(|(i, _)| i)
        .collect();
    if let Some(&i) = letters.choose(rng) {
        let mut c = chars[i];
        while c == chars[i] {
            c = (b'a' + rng.random_range(0..26u8)) as char;
        }
        chars[i] = c;
    }
    chars.into_iter().collect()
}

fn comma_sales(units: f64) -> String {
    if units >= 1_000_000.0 {
        format!("{:.2} Mio", units / 1e6).replace('.', ",")
    } else {
        let k = (units / 1000.0).round() as u64;
        format!("{k}.000")
    }
}

fn null_or<T>(rng: &mut ChaCha8Rng, p: f64, v: T) -> Option<T> {
    (!rng.random_bool(p)).then_some(v)
}

fn render_row(rng: &mut ChaCha8Rng, source: &str, e: &Entity, entity: usize) -> Row {
    let forms = platform_forms(source);
    let platform = forms[e.platform].choose(rng).expect("non-empty").to_string();
    let (country_name, alpha2, _) = COUNTRIES[e.country];
    let mut norm: BTreeMap<&'static str, Value> = BTreeMap::new();
    norm.insert("platform", Value::Str(PLATFORMS[e.platform].into()));
    let cells = match source {
        "dbp" => {
            norm.insert("name", Value::Str(e.name.clone()));
            let developer = null_or(rng, 0.05, e.developer.clone());
            let released = null_or(rng, 0.05, e.released);
            let country = null_or(rng, 0.10, country_name);
            if let Some(d) = &developer {
                norm.insert("developer", Value::Str(d.clone()));
            }
            if let Some(d) = released {
                norm.insert("released", Value::Date(d));
            }
            if country.is_some() {
                norm.insert("country", Value::Str(alpha2.into()));
            }
            norm.insert("genres", Value::List(e.genres.clone()));
            vec![
                Some(e.name.clone()),
                Some(platform),
                developer,
                released.map(|d| d.format("%Y-%m-%d").to_string()),
                Some(e.genres.join("; ")),
                country.map(str::to_string),
            ]
        }
        "meta" => {
            let name = if rng.random_bool(0.2) {
                e.name.to_lowercase()
            } else {
                e.name.clone()
            };
            norm.insert("name", Value::Str(name.clone()));
            let developer = null_or(rng, 0.15, ()).map(|_| {
                if rng.random_bool(0.3) {
                    format!("{} Inc.", e.developer)
                } else {
                    e.developer.clone()
                }
            });
            let released = null_or(rng, 0.20, ()).map(|_| {
                if rng.random_bool(0.08) {
                    e.released + Duration::days(rng.random_range(1..6))
                } else {
                    e.released
                }
            });
            let mut genres = e.genres.clone();
            if genres.len() > 1 && rng.random_bool(0.15) {
                genres.remove(rng.random_range(0..genres.len()));
            }
            let country = null_or(rng, 0.10, ()).map(|_| {
                if rng.random_bool(0.03) {
                    COUNTRIES[(e.country + 1) % COUNTRIES.len()]
                } else {
                    COUNTRIES[e.country]
                }
            });
            let score = null_or(rng, 0.10, e.score);
            if let Some(d) = &developer {
                norm.insert("developer", Value::Str(d.clone()));
            }
            if let Some(d) = released {
                norm.insert("released", Value::Date(d));
            }
            norm.insert("genres", Value::List(genres.clone()));
            if let Some(c) = country {
                norm.insert("country", Value::Str(c.1.into()));
            }
            if let Some(s) = score {
                norm.insert("score", Value::Num(s));
            }
            vec![
                None, // id, filled in after shuffling
                Some(name),
                Some(platform),
                developer,
                released.map(|d| d.format("%d/%m/%Y").to_string()),
                Some(genres.join("|")),
                country.map(|c| c.2.to_string()),
                score.map(|s| format!("{s:.0}")),
            ]
        }
        _ => {
            let name = if rng.random_bool(0.05) {
                typo(rng, &e.name)
            } else {
                e.name.clone()
            };
            norm.insert("name", Value::Str(name.clone()));
            let year = null_or(rng, 0.05, e.released.year());
            if let Some(y) = year {
                norm.insert(
                    "released",
                    Value::Date(NaiveDate::from_ymd_opt(y, 1, 1).expect("valid")),
                );
            }
            norm.insert("genres", Value::List(vec![e.genres[0].clone()]));
            norm.insert("sales", Value::Num(e.sales));
            vec![
                Some(name),
                Some(platform),
                year.map(|y| y.to_string()),
                Some(e.genres[0].clone()),
                Some(comma_sales(e.sales)),
            ]
        }
    };
    Row {
        entity,
        cells,
        normalized: norm,
    }
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Option<String>>]) -> Result<(), DataError> {
    let err = |source| DataError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r.iter().map(|c| c.as_deref().unwrap_or("")))
            .map_err(err)?;
    }
    w.flush().map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), DataError> {
    let text = serde_json::to_string_pretty(value).expect("fixture serializes");
    fs::write(path, text + "\n").map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn trigrams(s: &str) -> BTreeSet<String> {
    let chars: Vec<char> = format!("  {}  ", s.to_lowercase()).chars().collect();
    chars.windows(3).map(|w| w.iter().collect()).collect()
}

const CONFIG_TEMPLATE: &str = r#"seed = {seed}
out = "out"
target_schema = "target_schema.json"

[[sources]]
name = "dbp"
path = "sources/dbp.csv"
snapshot_date = "2024-01-01"

[[sources]]
name = "meta"
path = "sources/meta.csv"
id_column = "id"
snapshot_date = "2023-06-01"
hints = { day_first = true }

[[sources]]
name = "sales"
path = "sources/sales.csv"
snapshot_date = "2022-01-01"
hints = { number_locale = "comma" }

[oracle]
kind = "mock"
mock_tables = "mock_tables.json"

[schema_matching]
gold = "gold/schema_correspondences.json"

[matching]
gold_dir = "gold/matching"

[fusion]
test_file = "gold/fusion_test.csv"
"#;

/// Writes the fixture into `dir`, which is created if needed.
pub fn generate_fixture(dir: &Path, spec: &FixtureSpec) -> Result<FixtureSummary, DataError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| DataError::Io { path, source }
    };
    for sub in ["sources", "gold/matching"] {
        let p = dir.join(sub);
        fs::create_dir_all(&p).map_err(io(&p))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let entities = make_entities(&mut rng, spec.entities);
    let members = memberships(&mut rng, entities.len());
    let layouts = layouts();

    // rows per source, shuffled, with ids assigned after shuffling
    let mut ids: Vec<BTreeMap<usize, String>> = vec![BTreeMap::new(); 3];
    let mut normalized: Vec<BTreeMap<usize, BTreeMap<&'static str, Value>>> = vec![BTreeMap::new(); 3];
    let mut records = BTreeMap::new();
    let mut tables = MockTables {
        name_attribute: Some("name".into()),
        ..MockTables::default()
    };
    for (s, layout) in layouts.iter().enumerate() {
        let mut rows: Vec<Row> = (0..entities.len())
            .filter(|e| members[*e].contains(&s))
            .map(|e| render_row(&mut rng, layout.name, &entities[e], e))
            .collect();
        rows.shuffle(&mut rng);
        let mut meta_ids: Vec<u32> = (0..rows.len() as u32).map(|i| 10_000 + i * 7).collect();
        meta_ids.shuffle(&mut rng);
        for (i, row) in rows.iter_mut().enumerate() {
            let id = match layout.id_column {
                Some(_) => {
                    let id = format!("m{}", meta_ids[i]);
                    row.cells[0] = Some(id.clone());
                    id
                }
                None => format!("{}-{i}", layout.name),
            };
            tables
                .entities
                .insert(format!("{}:{id}", layout.name), entities[row.entity].id.clone());
            ids[s].insert(row.entity, id);
            normalized[s].insert(row.entity, std::mem::take(&mut row.normalized));
        }
        let path = dir.join("sources").join(format!("{}.csv", layout.name));
        let cells: Vec<Vec<Option<String>>> = rows.into_iter().map(|r| r.cells).collect();
        records.insert(layout.name.to_string(), cells.len());
        write_csv(&path, &layout.header, &cells)?;
    }

    // schema gold and synonyms
    let mut gold_schema = Vec::new();
    for layout in &layouts {
        for (col, attr) in &layout.mapping {
            tables
                .schema_synonyms
                .insert(format!("{}.{}", layout.name, col.to_lowercase()), attr.to_string());
            gold_schema.push(SchemaCorrespondence {
                source_dataset: layout.name.into(),
                source_attribute: col.to_string(),
                target_attribute: Some(attr.to_string()),
                score: 1.0,
                matcher: Matcher::Manual,
            });
        }
    }
    write_json(&dir.join("gold/schema_correspondences.json"), &gold_schema)?;

    let mut taxonomy = BTreeMap::new();
    for s in SOURCES {
        for (p, forms) in platform_forms(s).iter().enumerate() {
            for f in forms.iter() {
                taxonomy.insert(f.to_string(), PLATFORMS[p].to_string());
            }
        }
    }
    tables.taxonomy.insert("platform".into(), taxonomy);
    for e in &entities {
        tables.entity_values.insert(e.id.clone(), e.truth());
    }
    tables.well_known = Some(entities.iter().step_by(3).map(|e| e.id.clone()).collect());
    for (attr, resolver) in [
        ("name", "voting"),
        ("platform", "voting"),
        ("developer", "source_priority"),
        ("released", "most_recent"),
        ("score", "median"),
        ("genres", "union_list"),
        ("country", "voting"),
        ("sales", "median"),
    ] {
        tables.fusion_strategy.insert(attr.into(), resolver.into());
    }
    write_json(&dir.join("mock_tables.json"), &tables)?;
    write_json(&dir.join("target_schema.json"), &target_schema())?;

    // matching gold: 150 matches, 75 sequel pairs, 75 look-alike pairs; small
    // fixtures keep at most a fifth of the shared entities so that enough
    // matches remain for training
    let mut gold_counts = BTreeMap::new();
    for (x, y) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let (na, nb) = (SOURCES[x], SOURCES[y]);
        let mut rows: Vec<Vec<Option<String>>> = Vec::new();
        let mut both: Vec<usize> = ids[x].keys().filter(|e| ids[y].contains_key(e)).copied().collect();
        both.shuffle(&mut rng);
        let label = |a: &str, b: &str, m: bool| {
            vec![
                Some(a.to_string()),
                Some(b.to_string()),
                Some(if m { "match" } else { "non-match" }.to_string()),
                Some("gold".to_string()),
            ]
        };
        let n_match = (both.len() / 5).min(150);
        let n_hard = n_match / 2;
        for e in both.iter().take(n_match) {
            rows.push(label(&ids[x][e], &ids[y][e], true));
        }
        let mut sequels: Vec<(usize, usize)> = entities
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.sibling_of.map(|p| (p, i)))
            .flat_map(|(p, i)| [(p, i), (i, p)])
            .filter(|(ea, eb)| ids[x].contains_key(ea) && ids[y].contains_key(eb))
            .collect();
        sequels.shuffle(&mut rng);
        let mut taken = BTreeSet::new();
        for (ea, eb) in sequels.into_iter().take(n_hard) {
            taken.insert((ea, eb));
            rows.push(label(&ids[x][&ea], &ids[y][&eb], false));
        }
        let grams_b: Vec<(usize, BTreeSet<String>)> =
            ids[y].keys().map(|e| (*e, trigrams(&entities[*e].name))).collect();
        let mut queries: Vec<usize> = ids[x].keys().copied().collect();
        queries.shuffle(&mut rng);
        let mut lookalikes = 0;
        for ea in queries {
            if lookalikes == n_hard {
                break;
            }
            let ga = trigrams(&entities[ea].name);
            let best = grams_b
                .iter()
                .filter(|(eb, _)| *eb != ea && !taken.contains(&(ea, *eb)))
                .map(|(eb, gb)| (crate::similarity::jaccard_sets(&ga, gb), *eb))
                .max_by(|p, q| p.0.total_cmp(&q.0).then(q.1.cmp(&p.1)));
            if let Some((_, eb)) = best {
                taken.insert((ea, eb));
                rows.push(label(&ids[x][&ea], &ids[y][&eb], false));
                lookalikes += 1;
            }
        }
        let path = dir.join("gold/matching").join(crate::matching::pair_file_name(na, nb));
        gold_counts.insert(format!("{na}__{nb}"), rows.len());
        write_csv(&path, &["id_a", "id_b", "label", "label_source"], &rows)?;
    }

    // fusion test: conflicting attributes of entities unknown to the oracle
    let well_known = tables.well_known.as_ref().expect("set above");
    let mut candidates: Vec<usize> = (0..entities.len())
        .filter(|e| members[*e].len() > 1 && !well_known.contains(&entities[*e].id))
        .collect();
    candidates.shuffle(&mut rng);
    let mut test_rows = Vec::new();
    for e in candidates {
        if test_rows.len() >= 300 {
            break;
        }
        let member = members[e][0];
        let token = format!("{}:{}", SOURCES[member], ids[member][&e]);
        for attr in [
            "name",
            "platform",
            "developer",
            "released",
            "score",
            "genres",
            "country",
            "sales",
        ] {
            let keys: BTreeSet<String> = members[e]
                .iter()
                .filter_map(|s| normalized[*s][&e].get(attr))
                .map(Value::group_key)
                .collect();
            if keys.len() > 1 {
                test_rows.push(vec![
                    Some(token.clone()),
                    Some(attr.to_string()),
                    Some(entities[e].truth_value(attr).render()),
                    Some("human".to_string()),
                ]);
            }
        }
    }
    write_csv(
        &dir.join("gold/fusion_test.csv"),
        &["cluster_id", "attribute", "value", "origin"],
        &test_rows,
    )?;

    let config = dir.join("config.toml");
    fs::write(&config, CONFIG_TEMPLATE.replace("{seed}", &spec.seed.to_string())).map_err(io(&config))?;
    Ok(FixtureSummary {
        config,
        records,
        entities: entities.len(),
        gold_matching_pairs: gold_counts,
        fusion_test_entries: test_rows.len(),
    })
}
