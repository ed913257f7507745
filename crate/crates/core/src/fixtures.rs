//! Reference rosters and published results for the India case study and
//! the pooled cross-country model.

use std::collections::BTreeMap;

use crate::ingest::{CountryPanel, PerformanceCategory};

/// Indicators retained for India after cleaning, as (SDG goal, description).
pub const INDIA_REFERENCE_INDICATORS: [(u8, &str); 80] = [
    (1, "Poverty headcount ratio at $2.15/day (2017 PPP, %)"),
    (1, "Poverty headcount ratio at $3.65/day (2017 PPP, %)"),
    (2, "Prevalence of undernourishment (%)"),
    (2, "Prevalence of stunting in children under 5 years of age (%)"),
    (2, "Prevalence of wasting in children under 5 years of age (%)"),
    (2, "Prevalence of obesity, BMI >= 30 (% of adult population)"),
    (2, "Human Trophic Level (best 2-3 worst)"),
    (2, "Cereal yield (tonnes per hectare of harvested land)"),
    (2, "Sustainable Nitrogen Management Index (best 0-1.41 worst)"),
    (3, "Maternal mortality rate (per 100,000 live births)"),
    (3, "Neonatal mortality rate (per 1,000 live births)"),
    (3, "Mortality rate, under-5 (per 1,000 live births)"),
    (3, "Incidence of tuberculosis (per 100,000 population)"),
    (3, "Age-standardized death rate due to cardiovascular disease, cancer, diabetes, or chronic respiratory disease in adults aged 30-70 years (%)"),
    (3, "Traffic deaths (per 100,000 population)"),
    (3, "Life expectancy at birth (years)"),
    (3, "Adolescent fertility rate (births per 1,000 females aged 15 to 19)"),
    (3, "Births attended by skilled health personnel (%)"),
    (3, "Surviving infants who received 2 WHO-recommended vaccines (%)"),
    (3, "Universal health coverage (UHC) index of service coverage (worst 0-100 best)"),
    (3, "Subjective well-being (average ladder score, worst 0-10 best)"),
    (4, "Participation rate in pre-primary organized learning (% of children aged 4 to 6)"),
    (4, "Net primary enrollment rate (%)"),
    (4, "Lower secondary completion rate (%)"),
    (4, "Literacy rate (% of population aged 15 to 24)"),
    (5, "Demand for family planning satisfied by modern methods (% of females aged 15 to 49)"),
    (5, "Ratio of female-to-male mean years of education received (%)"),
    (5, "Ratio of female-to-male labor force participation rate (%)"),
    (5, "Seats held by women in national parliament (%)"),
    (6, "Population using at least basic drinking water services (%)"),
    (6, "Population using at least basic sanitation services (%)"),
    (6, "Freshwater withdrawal (% of available freshwater resources)"),
    (6, "Scarce water consumption embodied in imports (m3 H2O eq/capita)"),
    (7, "Population with access to electricity (%)"),
    (7, "Population with access to clean fuels and technology for cooking (%)"),
    (7, "CO2 emissions from fuel combustion per total electricity output (MtCO2/TWh)"),
    (7, "Renewable energy share in total final energy consumption (%)"),
    (8, "Adults with an account at a bank or other financial institution or with a mobile-money-service provider (% of population aged 15 or over)"),
    (8, "Unemployment rate (% of total labor force, ages 15+)"),
    (8, "Fundamental labor rights are effectively guaranteed (worst 0-1 best)"),
    (8, "Fatal work-related accidents embodied in imports (per million population)"),
    (9, "Rural population with access to all-season roads (%)"),
    (9, "Population using the internet (%)"),
    (9, "Mobile broadband subscriptions (per 100 population)"),
    (9, "Logistics Performance Index: Quality of trade and transport-related infrastructure (worst 1-5 best)"),
    (9, "The Times Higher Education Universities Ranking: Average score of top 3 universities (worst 0-100 best)"),
    (9, "Articles published in academic journals (per 1,000 population)"),
    (9, "Expenditure on research and development (% of GDP)"),
    (9, "Total patent applications by applicant's origin (per million population)"),
    (10, "Gini coefficient"),
    (11, "Proportion of urban population living in slums (%)"),
    (11, "Annual mean concentration of particulate matter of less than 2.5 microns in diameter (PM2.5) (ug/m3)"),
    (11, "Access to improved water source, piped (% of urban population)"),
    (12, "Electronic waste (kg/capita)"),
    (12, "Production-based air pollution (DALYs per 1,000 population)"),
    (12, "Air pollution associated with imports (DALYs per 1,000 population)"),
    (12, "Production-based nitrogen emissions (kg/capita)"),
    (12, "Nitrogen emissions associated with imports (kg/capita)"),
    (13, "CO2 emissions from fossil fuel combustion and cement production (tCO2/capita)"),
    (13, "GHG emissions embodied in imports (tCO2/capita)"),
    (14, "Ocean Health Index: Clean Waters score (worst 0-100 best)"),
    (14, "Fish caught from overexploited or collapsed stocks (% of total catch)"),
    (14, "Fish caught by trawling or dredging (%)"),
    (14, "Fish caught that are then discarded (%)"),
    (15, "Mean area that is protected in terrestrial sites important to biodiversity (%)"),
    (15, "Mean area that is protected in freshwater sites important to biodiversity (%)"),
    (15, "Red List Index of species survival (worst 0-1 best)"),
    (15, "Permanent deforestation (% of forest area, 3-year average)"),
    (15, "Imported deforestation (m2/capita)"),
    (16, "Homicides (per 100,000 population)"),
    (16, "Crime is effectively controlled"),
    (16, "Unsentenced detainees (% of prison population)"),
    (16, "Corruption Perceptions Index (worst 0-100 best)"),
    (16, "Press Freedom Index (worst 0-100 best)"),
    (16, "Access to and affordability of justice (worst 0-1 best)"),
    (16, "Timeliness of administrative proceedings (worst 0-1 best)"),
    (16, "Expropriations are lawful and adequately compensated (worst 0-1 best)"),
    (17, "Government spending on health and education (% of GDP)"),
    (17, "Other countries: Government revenue excluding grants (% of GDP)"),
    (17, "Statistical Performance Index (worst 0-100 best)"),
];

/// Published India classification with the pooled model: (synergy, trade-off).
pub const INDIA_TOTALS: (usize, usize) = (54, 26);
pub const INDIA_SDG12: (usize, usize) = (0, 5);
pub const INDIA_SDG13: (usize, usize) = (0, 2);

/// Published held-out confusion matrix (tp, fn, fp, tn).
pub const POOLED_CONFUSION: (usize, usize, usize, usize) = (1603, 28, 22, 750);

/// Published pooled-fit table: (beta, SE, CI low, CI high) for intercept,
/// direct effect and indirect effect, as printed (two decimals).
pub const POOLED_TABLE: [(f64, f64, f64, f64); 3] = [
    (-19.20, 0.71, -20.60, -17.81),
    (39.07, 1.47, 36.20, 41.94),
    (2.17, 0.93, 0.36, 3.99),
];

/// Number of reference India indicators per SDG goal.
pub fn india_reference_goal_counts() -> BTreeMap<u8, usize> {
    let mut out = BTreeMap::new();
    for (g, _) in INDIA_REFERENCE_INDICATORS {
        *out.entry(g).or_insert(0) += 1;
    }
    out
}

/// Per-goal difference between a cleaned panel and the reference roster:
/// `(goal, reference_count, panel_count)` for every goal that differs.
pub fn roster_goal_diff(panel: &CountryPanel) -> Vec<(u8, usize, usize)> {
    let reference = india_reference_goal_counts();
    let mut found: BTreeMap<u8, usize> = BTreeMap::new();
    for s in &panel.series {
        *found.entry(s.sdg_goal).or_insert(0) += 1;
    }
    (1..=17)
        .filter_map(|g| {
            let r = reference.get(&g).copied().unwrap_or(0);
            let f = found.get(&g).copied().unwrap_or(0);
            (r != f).then_some((g, r, f))
        })
        .collect()
}

/// Country names by SDG Index category in the reference 2025 grouping.
pub const REFERENCE_CATEGORIES: [(PerformanceCategory, &[&str]); 3] = [
    (
        PerformanceCategory::Worst,
        &[
            "Afghanistan", "Central African Republic", "Chad", "Democratic Republic of the Congo",
            "Somalia", "South Sudan", "Sudan", "Yemen",
        ],
    ),
    (
        PerformanceCategory::Moderate,
        &[
            "Albania", "Algeria", "Angola", "Argentina", "Armenia", "Australia", "Azerbaijan",
            "Bahamas", "Bahrain", "Bangladesh", "Barbados", "Belarus", "Belize", "Benin", "Bhutan",
            "Bolivia", "Bosnia and Herzegovina", "Botswana", "Brazil", "Brunei Darussalam",
            "Bulgaria", "Burkina Faso", "Burundi", "Cabo Verde", "Cambodia", "Cameroon", "Canada",
            "Chile", "China", "Colombia", "Comoros", "Costa Rica", "Cote d'Ivoire", "Cuba",
            "Cyprus", "Djibouti", "Dominican Republic", "Ecuador", "Egypt", "El Salvador",
            "Eswatini", "Ethiopia", "Fiji", "Gabon", "Gambia", "Georgia", "Ghana", "Greece",
            "Guatemala", "Guinea", "Guinea-Bissau", "Guyana", "Haiti", "Honduras", "India",
            "Indonesia", "Iran", "Iraq", "Ireland", "Israel", "Jamaica", "Jordan", "Kazakhstan",
            "Kenya", "Korea Republic", "Kuwait", "Kyrgyz Republic", "Lao PDR", "Lebanon",
            "Lesotho", "Liberia", "Lithuania", "Luxembourg", "Madagascar", "Malawi", "Malaysia",
            "Maldives", "Mali", "Malta", "Mauritania", "Mauritius", "Mexico", "Moldova",
            "Mongolia", "Montenegro", "Morocco", "Mozambique", "Myanmar", "Namibia", "Nepal",
            "New Zealand", "Nicaragua", "Niger", "Nigeria", "North Macedonia", "Oman",
            "Pakistan", "Panama", "Papua New Guinea", "Paraguay", "Peru", "Philippines", "Qatar",
            "Republic of the Congo", "Romania", "Russian Federation", "Rwanda",
            "Sao Tome and Principe", "Saudi Arabia", "Senegal", "Serbia", "Sierra Leone",
            "Singapore", "South Africa", "Sri Lanka", "Suriname", "Switzerland",
            "Syrian Arab Republic", "Tajikistan", "Tanzania", "Thailand", "Togo",
            "Trinidad and Tobago", "Tunisia", "Turkiye", "Turkmenistan", "Uganda", "Ukraine",
            "United Arab Emirates", "United States", "Uruguay", "Uzbekistan", "Venezuela",
            "Vietnam", "Zambia", "Zimbabwe",
        ],
    ),
    (
        PerformanceCategory::Best,
        &[
            "Austria", "Belgium", "Croatia", "Czechia", "Denmark", "Estonia", "Finland", "France",
            "Germany", "Hungary", "Iceland", "Italy", "Japan", "Latvia", "Netherlands", "Norway",
            "Poland", "Portugal", "Slovak Republic", "Slovenia", "Spain", "Sweden",
            "United Kingdom",
        ],
    ),
];

/// Reference category for a country name, if listed.
pub fn reference_category(country_name: &str) -> Option<PerformanceCategory> {
    REFERENCE_CATEGORIES
        .iter()
        .find(|(_, names)| names.iter().any(|n| n.eq_ignore_ascii_case(country_name)))
        .map(|(c, _)| *c)
}
