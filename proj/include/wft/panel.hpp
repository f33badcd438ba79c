#pragma once

// Institution-by-academic-year staff panel: typed records, contract-based
// staff classification, balanced-panel ingestion from delimited files, and
// the job-creation-rate operations the estimators consume.

#include "wft/errors.hpp"

#include <compare>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wft {

/// An academic year identified by its starting calendar year
/// (2012 denotes the year running 2012/13).  Valid range [1900, 2200].
struct AcademicYear {
    int start_year = 0;
    auto operator<=>(const AcademicYear&) const = default;
};

constexpr int kMinAcademicYear = 1900;
constexpr int kMaxAcademicYear = 2200;

// ---- staff classification -------------------------------------------------

enum class FunctionCode {
    teaching_only,          // code "1"
    teaching_and_research,  // code "3"
    neither,                // code "9"
    not_academic,           // code "4"
    legacy_x,               // code "X"
    other,
};

enum class EmploymentMode { full_time, full_time_term_time, other };
enum class ContractTerms { open_ended, fixed_term, other };
enum class Financing { provider_financed, other };

struct StaffRecord {
    FunctionCode function_code = FunctionCode::other;
    int salary_point = 0;                 // nonnegative pay-scale point
    EmploymentMode employment_mode = EmploymentMode::other;
    ContractTerms terms = ContractTerms::other;
    Financing financing = Financing::other;
};

enum class StaffGroup { established_academic, established_research, unclassified };

/// Deterministic contract-based classification.  The academic filter is
/// checked first; a record can satisfy at most one filter because the
/// function-code sets are disjoint, but the precedence is fixed regardless.
///
///   established_academic: function in {1,3,9}, salary point >= 38,
///       full-time (incl. term-time-only full-time), open-ended terms.
///   established_research: function in {4,X}, salary point >= 33,
///       provider-financed, open-ended terms.
StaffGroup classify_staff_record(const StaffRecord& record);

// String forms used in files and on the CLI.
std::string to_string(StaffGroup group);
std::optional<StaffGroup> parse_staff_group(const std::string& token);
std::optional<FunctionCode> parse_function_code(const std::string& token);
std::optional<EmploymentMode> parse_employment_mode(const std::string& token);
std::optional<ContractTerms> parse_contract_terms(const std::string& token);
std::optional<Financing> parse_financing(const std::string& token);
std::string to_string(FunctionCode code);
std::string to_string(EmploymentMode mode);
std::string to_string(ContractTerms terms);
std::string to_string(Financing financing);

// ---- panel dataset --------------------------------------------------------

struct PanelObservation {
    std::string institution;
    AcademicYear year;
    StaffGroup group = StaffGroup::established_academic;
    long long headcount = 0;          // staff in post (head count)
    long long new_appointments = 0;   // staff in post whose post started this year
    double student_fte = 0.0;         // full-time-equivalent student load

    bool operator==(const PanelObservation&) const = default;
};

/// A balanced panel: every (institution, year, group) combination present
/// exactly once, years contiguous.  Observations are held in canonical order
/// (institution, then year, then group), which serialization preserves.
struct PanelDataset {
    std::vector<std::string> institutions;   // sorted
    std::vector<AcademicYear> years;         // ascending, contiguous
    std::vector<StaffGroup> groups;          // ascending by enum value
    std::vector<PanelObservation> observations;  // canonical order
    std::vector<std::string> notes;          // provenance notes, round-tripped

    bool operator==(const PanelDataset&) const = default;

    std::size_t index_of(const std::string& institution, AcademicYear year,
                         StaffGroup group) const;   // throws EmptySelection when absent
    const PanelObservation& at(const std::string& institution, AcademicYear year,
                               StaffGroup group) const;
    bool has_group(StaffGroup group) const;
};

/// Column mapping for ingestion.  Defaults match the canonical serialized
/// layout; override names to adapt to foreign files.  Two shapes are accepted:
///
///  * aggregated cells: one row per (institution, year[, group]) carrying
///    headcount and new_appointments (and optionally student_fte);
///  * person-level records: one row per staff member carrying person_id and
///    the five contract fields; the ingester classifies each record, counts
///    heads per cell, and derives new_appointments as persons absent from the
///    same institution in the previous panel year.  Rows classified as
///    unclassified are dropped from the counts.  In the first panel year no
///    prior roster exists, so new_appointments is reported as zero there.
struct IngestSchema {
    std::string institution = "institution";
    std::string year = "year";
    std::string group = "group";                       // optional column
    std::string headcount = "headcount";
    std::string new_appointments = "new_appointments";
    std::string student_fte = "student_fte";           // optional column
    std::string person_id = "person_id";
    std::string function_code = "function_code";
    std::string salary_point = "salary_point";
    std::string employment_mode = "employment_mode";
    std::string terms = "terms";
    std::string financing = "financing";
    /// Group recorded when the aggregated file has no group column.
    StaffGroup default_group = StaffGroup::established_academic;
};

/// Ingest a delimited file in either shape (detected from the columns
/// present).  Enforces the balanced-grid contract and throws typed errors
/// naming offending rows/cells.  delimiter '\0' autodetects.
PanelDataset ingest_panel(std::istream& in, const IngestSchema& schema = {},
                          char delimiter = '\0');

/// Canonical serialization: notes as leading '#' comments, then
/// institution,year,group,headcount,new_appointments,student_fte.
/// ingest_panel(serialize_panel(d)) == d.
void serialize_panel(std::ostream& out, const PanelDataset& data);

// ---- rates ----------------------------------------------------------------

/// new_appointments / headcount.  Throws ZeroHeadcount.
double job_creation_rate(const PanelObservation& obs);

/// Mean over time within each institution first, then across institutions
/// (so short series and small institutions are not over-weighted).
/// Throws EmptySelection when either list is empty or names absent cells.
double group_mean_rate(const PanelDataset& data, StaffGroup group,
                       const std::vector<std::string>& institutions,
                       const std::vector<AcademicYear>& years);

} // namespace wft
