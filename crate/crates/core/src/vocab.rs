//! Namespace IRIs and vocabulary terms shared by the parsers, writers and renderers.

pub const PROV_PREFIX: &str = "prov";
pub const DASH_PREFIX: &str = "dash";
pub const XSD_PREFIX: &str = "xsd";

pub const PROV_NS: &str = "http://www.w3.org/ns/prov#";
pub const DASH_NS: &str = "http://dash.com/dash#";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";

/// Prefixes every document carries, with their canonical IRIs.
pub const STANDARD_PREFIXES: [(&str, &str); 3] = [
    (PROV_PREFIX, PROV_NS),
    (DASH_PREFIX, DASH_NS),
    (XSD_PREFIX, XSD_NS),
];

// dash: attribute terms, canonical (lowercase-initial) spelling.
pub const DASH_NAME: &str = "name";
pub const DASH_VERSION: &str = "version";
pub const DASH_ROLE: &str = "role";
pub const DASH_DESCRIPTION: &str = "description";
pub const DASH_ANNOTATIONS: &str = "annotations";
pub const DASH_CONTACT_INFORMATION: &str = "contactInformation";
pub const DASH_TRUSTWORTHINESS: &str = "trustworthiness";
pub const DASH_URL: &str = "url";

pub const DASH_ATTRIBUTES: [&str; 8] = [
    DASH_NAME,
    DASH_VERSION,
    DASH_ROLE,
    DASH_DESCRIPTION,
    DASH_ANNOTATIONS,
    DASH_CONTACT_INFORMATION,
    DASH_TRUSTWORTHINESS,
    DASH_URL,
];

// prov: timestamp properties.
pub const PROV_GENERATED_AT_TIME: &str = "generatedAtTime";
pub const PROV_STARTED_AT_TIME: &str = "startedAtTime";
pub const PROV_ENDED_AT_TIME: &str = "endedAtTime";
pub const PROV_TIME: &str = "time";
pub const PROV_TYPE: &str = "type";

pub const XSD_DATE_TIME: &str = "dateTime";

/// Looks up the canonical spelling of a dash: attribute, ignoring ASCII case.
pub fn canonical_dash_attribute(local: &str) -> Option<&'static str> {
    DASH_ATTRIBUTES
        .iter()
        .copied()
        .find(|term| term.eq_ignore_ascii_case(local))
}
