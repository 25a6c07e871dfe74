use serde::{Deserialize, Serialize};

/// An eruption lasting five years or more, as listed in the DomeHaz v2.2
/// long-duration table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongDuration {
    pub duration: f64,
    pub start_year: f64,
    pub name: &'static str,
    pub censored: bool,
}

const fn entry(duration: f64, start_year: f64, name: &'static str, censored: bool) -> LongDuration {
    LongDuration {
        duration,
        start_year,
        name,
        censored,
    }
}

// Listed in ascending duration; `true` marks eruptions ongoing at publication.
static LONG_DURATIONS: [LongDuration; 38] = [
    entry(5.0, 1310.0, "OKATAINA", false),
    entry(5.4, 1970.0, "KARANGETANG [API SIAU]", false),
    entry(5.4, 1870.0, "CEBORUCO, VOLCAN", false),
    entry(5.4, 1991.0, "SOPUTAN", false),
    entry(5.4, 1944.0, "SHIVELUCH", false),
    entry(5.5, 1951.0, "LAMINGTON", false),
    entry(6.0, 1872.0, "SINARKA", false),
    entry(6.6, 1980.0, "ST. HELENS", false),
    entry(7.1, 1994.0, "ETNA", false),
    entry(8.6, 1984.0, "LASCAR", false),
    entry(8.7, 1897.0, "DONA JUANA", false),
    entry(10.2, 2005.0, "POPOCATEPETL", true),
    entry(10.3, 2004.0, "REVENTADOR", true),
    entry(11.3, 2000.0, "SOPUTAN", false),
    entry(12.4, 1970.0, "KARYMSKY", false),
    entry(13.0, 1973.0, "CHILLAN, NEVADOS DE", false),
    entry(13.2, 2002.0, "FUEGO", true),
    entry(13.3, 2001.0, "KARYMSKY", true),
    entry(15.4, 1999.0, "MAYON", false),
    entry(16.2, 1998.0, "IBU", true),
    entry(18.5, 1913.0, "COLIMA", false),
    entry(19.7, 1995.0, "SOUFRIERE HILLS", true),
    entry(23.0, 1972.0, "BAGANA", false),
    entry(23.7, 1991.0, "KARANGETANG [API SIAU]", true),
    entry(27.0, 1883.0, "BOGOSLOF", false),
    entry(27.1, 1796.0, "BOGOSLOF", false),
    entry(27.6, 1973.0, "LANGILA", false),
    entry(34.6, 1980.0, "SHIVELUCH", true),
    entry(40.0, 1869.0, "COLIMA", false),
    entry(42.5, 1968.0, "ARENAL", false),
    entry(45.0, 1890.0, "VICTORY", false),
    entry(57.8, 1957.0, "COLIMA", true),
    entry(59.4, 1955.0, "BEZYMIANNY", true),
    entry(68.4, 1946.0, "SEMERU", true),
    entry(78.8, 1934.0, "SANGAY", false),
    entry(92.7, 1922.0, "SANTA MARIA [SANTIAGUITO]", true),
    entry(187.7, 1728.0, "SANGAY", false),
    entry(246.6, 1768.0, "MERAPI", true),
];

/// The 38 catalogued eruptions lasting at least five years.
pub fn load_fixture_long_durations() -> Vec<LongDuration> {
    LONG_DURATIONS.to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremes() {
        let v = load_fixture_long_durations();
        assert_eq!(v.len(), 38);
        assert_eq!(v[37], entry(246.6, 1768.0, "MERAPI", true));
        assert_eq!(v[0], entry(5.0, 1310.0, "OKATAINA", false));
    }

    #[test]
    fn sorted_and_at_least_five_years() {
        let v = load_fixture_long_durations();
        assert!(v.iter().all(|e| e.duration >= 5.0));
        assert!(v.windows(2).all(|w| w[0].duration <= w[1].duration));
    }

    #[test]
    fn ongoing_entries() {
        // Thirteen starred rows; the fourteenth ongoing eruption (Sinabung)
        // is shorter than five years and so absent from the table.
        let v = load_fixture_long_durations();
        let ongoing: Vec<_> = v.iter().filter(|e| e.censored).collect();
        assert_eq!(ongoing.len(), 13);
        assert!(ongoing.iter().all(|e| e.duration >= 10.0));
        assert_eq!(ongoing.iter().filter(|e| e.duration > 20.0).count(), 7);
        assert_eq!(ongoing.iter().filter(|e| e.duration > 50.0).count(), 5);
    }

    #[test]
    fn completed_long_eruptions() {
        let v = load_fixture_long_durations();
        let completed = || v.iter().filter(|e| !e.censored);
        assert_eq!(completed().filter(|e| e.duration > 10.0).count(), 14);
        assert_eq!(completed().filter(|e| e.duration > 20.0).count(), 9);
    }
}
