//! Deterministic value parsers behind the code-based normalizers.

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use super::countries::COUNTRIES;

/// Decimal/thousands separator convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NumberLocale {
    /// `1,234.56`
    #[default]
    Dot,
    /// `1.234,56`
    Comma,
}

const CURRENCY_WORDS: [&str; 8] = ["usd", "eur", "gbp", "jpy", "chf", "cny", "inr", "krw"];

fn scale_factor(word: &str) -> Option<f64> {
    match word {
        "k" | "thousand" | "thousands" | "tsd" => Some(1e3),
        "m" | "mm" | "mn" | "mio" | "million" | "millions" => Some(1e6),
        "b" | "bn" | "billion" | "billions" => Some(1e9),
        "t" | "tn" | "trillion" | "trillions" => Some(1e12),
        _ => None,
    }
}

/// Splits `word` into a scale prefix and optional currency suffix, as in
/// `MEUR` or `bnUSD`.
fn scale_with_currency(word: &str) -> Option<f64> {
    if let Some(f) = scale_factor(word) {
        return Some(f);
    }
    for cur in CURRENCY_WORDS {
        if let Some(prefix) = word.strip_suffix(cur) {
            if let Some(f) = scale_factor(prefix) {
                return Some(f);
            }
        }
        if let Some(suffix) = word.strip_prefix(cur) {
            if let Some(f) = scale_factor(suffix) {
                return Some(f);
            }
        }
    }
    None
}

fn parse_plain_number(s: &str, locale: NumberLocale) -> Option<f64> {
    let (decimal, thousands) = match locale {
        NumberLocale::Dot => ('.', ','),
        NumberLocale::Comma => (',', '.'),
    };
    let mut cleaned = String::with_capacity(s.len());
    let mut seen_digit = false;
    let mut seen_decimal = false;
    for (i, ch) in s.chars().enumerate() {
        match ch {
            '0'..='9' => {
                seen_digit = true;
                cleaned.push(ch);
            }
            '-' | '+' if i == 0 => cleaned.push(ch),
            c if c == thousands && seen_digit && !seen_decimal => {}
            '\'' | '\u{a0}' | '\u{202f}' if seen_digit && !seen_decimal => {}
            c if c == decimal && !seen_decimal => {
                seen_decimal = true;
                cleaned.push('.');
            }
            _ => return None,
        }
    }
    if !seen_digit {
        return None;
    }
    cleaned.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses numbers with locale separators, currency markers and scale words
/// (`3.2 million`, `850k`, `1,234 MEUR`, `$4.5bn`).
pub fn parse_number(raw: &str, locale: NumberLocale) -> Option<f64> {
    let mut s = raw.trim().to_lowercase();
    for sym in ['$', '€', '£', '¥'] {
        s = s.replace(sym, " ");
    }
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    // split the numeric head from a trailing word, tolerating `850k`
    let split = s
        .char_indices()
        .find(|(_, c)| c.is_alphabetic())
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    let (head, tail) = s.split_at(split);
    let head = head.trim();
    let mut tail_words: Vec<&str> = tail.split_whitespace().collect();
    if head.is_empty() {
        // currency word before the number: `usd 3.5`
        let first = tail_words.first()?;
        if !CURRENCY_WORDS.contains(first) {
            return None;
        }
        return parse_number(&s[first.len()..], locale);
    }
    let mut factor = 1.0;
    if let Some(first) = tail_words.first().copied() {
        if let Some(f) = scale_with_currency(first) {
            factor = f;
            tail_words.remove(0);
        }
    }
    if !tail_words.iter().all(|w| CURRENCY_WORDS.contains(w)) {
        return None;
    }
    parse_plain_number(head, locale).map(|v| v * factor)
}

const MONTHS: [&str; 12] = [
    "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec",
];

fn month_number(word: &str) -> Option<u32> {
    let w = word.trim_end_matches('.').to_lowercase();
    if w.len() < 3 {
        return None;
    }
    MONTHS
        .iter()
        .position(|m| w.starts_with(m) && (w.len() == 3 || full_month(m).starts_with(&w)))
        .map(|i| i as u32 + 1)
}

fn full_month(abbr: &str) -> &'static str {
    match abbr {
        "jan" => "january",
        "feb" => "february",
        "mar" => "march",
        "apr" => "april",
        "may" => "may",
        "jun" => "june",
        "jul" => "july",
        "aug" => "august",
        "sep" => "september",
        "oct" => "october",
        "nov" => "november",
        _ => "december",
    }
}

fn plausible_year(y: i32) -> bool {
    (1000..=2999).contains(&y)
}

/// Parses common date layouts into a calendar date. Year-only and
/// year-month inputs resolve to the first day of the period. `day_first`
/// decides ambiguous slash dates.
pub fn parse_date(raw: &str, day_first: bool) -> Option<NaiveDate> {
    let s = raw.trim();
    if s.is_empty() {
        return None;
    }
    // ISO timestamps: keep the date part
    let s = match s.find('T') {
        Some(10) => &s[..10],
        _ => s,
    };
    if s.len() == 4 && s.chars().all(|c| c.is_ascii_digit()) {
        let y: i32 = s.parse().ok()?;
        return plausible_year(y).then(|| NaiveDate::from_ymd_opt(y, 1, 1)).flatten();
    }
    for fmt in ["%Y-%m-%d", "%Y/%m/%d", "%d.%m.%Y", "%Y%m%d"] {
        if let Ok(d) = NaiveDate::parse_from_str(s, fmt) {
            if plausible_year(d.year()) {
                return Some(d);
            }
        }
    }
    let slash_formats: [&str; 2] = if day_first {
        ["%d/%m/%Y", "%m/%d/%Y"]
    } else {
        ["%m/%d/%Y", "%d/%m/%Y"]
    };
    for fmt in slash_formats {
        if let Ok(d) = NaiveDate::parse_from_str(s, fmt) {
            if plausible_year(d.year()) {
                return Some(d);
            }
        }
    }
    if let Some((y, m)) = s.split_once('-') {
        if y.len() == 4 && m.len() <= 2 {
            if let (Ok(y), Ok(m)) = (y.parse::<i32>(), m.parse::<u32>()) {
                if plausible_year(y) {
                    return NaiveDate::from_ymd_opt(y, m, 1);
                }
            }
        }
    }
    parse_textual_date(s)
}

/// `Mar 15, 2004`, `15 March 2004`, `March 2004`.
fn parse_textual_date(s: &str) -> Option<NaiveDate> {
    let words: Vec<&str> = s
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|w| !w.is_empty())
        .collect();
    let mut year = None;
    let mut month = None;
    let mut day = None;
    for w in &words {
        if let Some(m) = month_number(w) {
            if month.is_some() {
                return None;
            }
            month = Some(m);
            continue;
        }
        let digits = w.trim_end_matches(|c: char| c.is_alphabetic() || c == '.');
        let n: i32 = digits.parse().ok()?;
        if digits.len() == 4 {
            year = Some(n);
        } else if digits.len() <= 2 && day.is_none() {
            day = Some(n as u32);
        } else {
            return None;
        }
    }
    let (y, m) = (year?, month?);
    if !plausible_year(y) {
        return None;
    }
    NaiveDate::from_ymd_opt(y, m, day.unwrap_or(1))
}

/// Parses a duration into minutes. Plain numbers are taken as minutes
/// without plausibility correction.
pub fn parse_duration(raw: &str) -> Option<f64> {
    let s = raw.trim().to_lowercase();
    if s.is_empty() {
        return None;
    }
    if let Ok(v) = s.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    if let Some(iso) = s.strip_prefix("pt") {
        return parse_unit_sequence(iso);
    }
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let nums: Option<Vec<f64>> = parts.iter().map(|p| p.trim().parse::<f64>().ok()).collect();
        let nums = nums?;
        return match nums.as_slice() {
            // minutes:seconds
            [m, sec] if *sec < 60.0 => Some(m + sec / 60.0),
            [h, m, sec] if *m < 60.0 && *sec < 60.0 => Some(h * 60.0 + m + sec / 60.0),
            _ => None,
        };
    }
    parse_unit_sequence(&s)
}

/// `1h 5m`, `45 min`, `2700 sec`, ISO `1H5M30S`.
fn parse_unit_sequence(s: &str) -> Option<f64> {
    let mut total = 0.0;
    let mut number = String::new();
    let mut unit = String::new();
    let mut any = false;
    let flush = |number: &mut String, unit: &mut String, total: &mut f64| -> Option<()> {
        if number.is_empty() {
            return if unit.is_empty() { Some(()) } else { None };
        }
        let v: f64 = number.parse().ok()?;
        let factor = match unit.trim_end_matches('.') {
            "h" | "hr" | "hrs" | "hour" | "hours" | "std" => 60.0,
            "m" | "min" | "mins" | "minute" | "minutes" => 1.0,
            "s" | "sec" | "secs" | "second" | "seconds" => 1.0 / 60.0,
            _ => return None,
        };
        *total += v * factor;
        number.clear();
        unit.clear();
        Some(())
    };
    for ch in s.chars() {
        if ch.is_ascii_digit() || ch == '.' {
            if !unit.is_empty() {
                flush(&mut number, &mut unit, &mut total)?;
            }
            number.push(ch);
        } else if ch.is_alphabetic() {
            if number.is_empty() && unit.is_empty() {
                return None;
            }
            unit.push(ch);
            any = true;
        } else if ch.is_whitespace() || ch == ',' {
            continue;
        } else {
            return None;
        }
    }
    if !number.is_empty() && unit.is_empty() {
        return None;
    }
    flush(&mut number, &mut unit, &mut total)?;
    any.then_some(total)
}

fn country_key(s: &str) -> String {
    s.trim()
        .to_lowercase()
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect::<String>()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Maps a country name, alias, or ISO alpha-2/alpha-3 code to its ISO
/// 3166-1 alpha-2 code.
pub fn country_code(raw: &str) -> Option<&'static str> {
    let key = country_key(raw);
    if key.is_empty() {
        return None;
    }
    COUNTRIES.iter().find_map(|entry| {
        let hit = entry.alpha2.eq_ignore_ascii_case(&key)
            || entry.alpha3.eq_ignore_ascii_case(&key)
            || country_key(entry.name) == key
            || entry.aliases.iter().any(|a| country_key(a) == key);
        hit.then_some(entry.alpha2)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_words() {
        assert_eq!(parse_number("3.2 million", NumberLocale::Dot), Some(3_200_000.0));
        assert_eq!(parse_number("850k", NumberLocale::Dot), Some(850_000.0));
        assert_eq!(parse_number("1.5 bn", NumberLocale::Dot), Some(1_500_000_000.0));
        assert_eq!(parse_number("12 MEUR", NumberLocale::Dot), Some(12_000_000.0));
        assert_eq!(parse_number("$4.5B", NumberLocale::Dot), Some(4_500_000_000.0));
        assert_eq!(parse_number("USD 3.5", NumberLocale::Dot), Some(3.5));
        assert_eq!(parse_number("2.1 Thousand", NumberLocale::Dot), Some(2_100.0));
    }

    #[test]
    fn locale_separators() {
        assert_eq!(parse_number("3,400", NumberLocale::Dot), Some(3400.0));
        assert_eq!(parse_number("1,234.56", NumberLocale::Dot), Some(1234.56));
        assert_eq!(parse_number("1.234,56", NumberLocale::Comma), Some(1234.56));
        assert_eq!(parse_number("-12.5", NumberLocale::Dot), Some(-12.5));
    }

    #[test]
    fn non_numbers() {
        for s in ["", "abc", "PS4", "12 apples", "1.2.3", "Game 2"] {
            assert_eq!(parse_number(s, NumberLocale::Dot), None, "{s}");
        }
    }

    #[test]
    fn dates() {
        let d = NaiveDate::from_ymd_opt(2004, 3, 15).unwrap();
        for s in [
            "2004-03-15",
            "15.03.2004",
            "03/15/2004",
            "Mar 15, 2004",
            "15 March 2004",
            "2004/03/15",
        ] {
            assert_eq!(parse_date(s, false), Some(d), "{s}");
        }
        assert_eq!(parse_date("15/03/2004", true), Some(d));
        assert_eq!(parse_date("2004", false), NaiveDate::from_ymd_opt(2004, 1, 1));
        assert_eq!(parse_date("March 2004", false), NaiveDate::from_ymd_opt(2004, 3, 1));
        assert_eq!(parse_date("PlayStation 4", false), None);
        assert_eq!(parse_date("12", false), None);
    }

    #[test]
    fn durations() {
        assert_eq!(parse_duration("45:30"), Some(45.5));
        assert_eq!(parse_duration("1:02:30"), Some(62.5));
        assert_eq!(parse_duration("PT1H5M"), Some(65.0));
        assert_eq!(parse_duration("12h 30m"), Some(750.0));
        assert_eq!(parse_duration("2700 sec"), Some(45.0));
        assert_eq!(parse_duration("45 min"), Some(45.0));
        assert_eq!(parse_duration("2000"), Some(2000.0));
        assert_eq!(parse_duration("Fleetwood Mac"), None);
        assert_eq!(parse_duration("12 apples"), None);
    }

    #[test]
    fn countries() {
        assert_eq!(country_code("Germany"), Some("DE"));
        assert_eq!(country_code("DE"), Some("DE"));
        assert_eq!(country_code("deu"), Some("DE"));
        assert_eq!(country_code("United States of America"), Some("US"));
        assert_eq!(country_code("USA"), Some("US"));
        assert_eq!(country_code("U.K."), Some("GB"));
        assert_eq!(country_code("Atlantis"), None);
    }
}
