#include "wft/panel.hpp"
#include "wft/csv.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

namespace wft {

// ---- classification -------------------------------------------------------

StaffGroup classify_staff_record(const StaffRecord& r) {
    const bool academic_function = r.function_code == FunctionCode::teaching_only ||
                                   r.function_code == FunctionCode::teaching_and_research ||
                                   r.function_code == FunctionCode::neither;
    const bool full_time = r.employment_mode == EmploymentMode::full_time ||
                           r.employment_mode == EmploymentMode::full_time_term_time;
    if (academic_function && r.salary_point >= 38 && full_time &&
        r.terms == ContractTerms::open_ended)
        return StaffGroup::established_academic;

    const bool research_function = r.function_code == FunctionCode::not_academic ||
                                   r.function_code == FunctionCode::legacy_x;
    if (research_function && r.salary_point >= 33 &&
        r.financing == Financing::provider_financed &&
        r.terms == ContractTerms::open_ended)
        return StaffGroup::established_research;

    return StaffGroup::unclassified;
}

std::string to_string(StaffGroup group) {
    switch (group) {
        case StaffGroup::established_academic: return "EAC";
        case StaffGroup::established_research: return "EAR";
        case StaffGroup::unclassified: return "unclassified";
    }
    return "unclassified";
}

std::optional<StaffGroup> parse_staff_group(const std::string& token) {
    if (token == "EAC") return StaffGroup::established_academic;
    if (token == "EAR") return StaffGroup::established_research;
    if (token == "unclassified") return StaffGroup::unclassified;
    return std::nullopt;
}

std::optional<FunctionCode> parse_function_code(const std::string& token) {
    if (token == "1") return FunctionCode::teaching_only;
    if (token == "3") return FunctionCode::teaching_and_research;
    if (token == "9") return FunctionCode::neither;
    if (token == "4") return FunctionCode::not_academic;
    if (token == "X" || token == "x") return FunctionCode::legacy_x;
    if (token == "other") return FunctionCode::other;
    return std::nullopt;
}

std::string to_string(FunctionCode code) {
    switch (code) {
        case FunctionCode::teaching_only: return "1";
        case FunctionCode::teaching_and_research: return "3";
        case FunctionCode::neither: return "9";
        case FunctionCode::not_academic: return "4";
        case FunctionCode::legacy_x: return "X";
        case FunctionCode::other: return "other";
    }
    return "other";
}

std::optional<EmploymentMode> parse_employment_mode(const std::string& token) {
    if (token == "full_time") return EmploymentMode::full_time;
    if (token == "full_time_term_time") return EmploymentMode::full_time_term_time;
    if (token == "other") return EmploymentMode::other;
    return std::nullopt;
}

std::string to_string(EmploymentMode mode) {
    switch (mode) {
        case EmploymentMode::full_time: return "full_time";
        case EmploymentMode::full_time_term_time: return "full_time_term_time";
        case EmploymentMode::other: return "other";
    }
    return "other";
}

std::optional<ContractTerms> parse_contract_terms(const std::string& token) {
    if (token == "open_ended") return ContractTerms::open_ended;
    if (token == "fixed_term") return ContractTerms::fixed_term;
    if (token == "other") return ContractTerms::other;
    return std::nullopt;
}

std::string to_string(ContractTerms terms) {
    switch (terms) {
        case ContractTerms::open_ended: return "open_ended";
        case ContractTerms::fixed_term: return "fixed_term";
        case ContractTerms::other: return "other";
    }
    return "other";
}

std::optional<Financing> parse_financing(const std::string& token) {
    if (token == "provider_financed") return Financing::provider_financed;
    if (token == "other") return Financing::other;
    return std::nullopt;
}

std::string to_string(Financing financing) {
    switch (financing) {
        case Financing::provider_financed: return "provider_financed";
        case Financing::other: return "other";
    }
    return "other";
}

// ---- dataset lookups ------------------------------------------------------

std::size_t PanelDataset::index_of(const std::string& institution, AcademicYear year,
                                   StaffGroup group) const {
    auto ii = std::lower_bound(institutions.begin(), institutions.end(), institution);
    if (ii == institutions.end() || *ii != institution)
        throw EmptySelection("institution " + institution + " not in panel");
    auto yi = std::lower_bound(years.begin(), years.end(), year);
    if (yi == years.end() || *yi != year)
        throw EmptySelection("year " + std::to_string(year.start_year) + " not in panel");
    auto gi = std::find(groups.begin(), groups.end(), group);
    if (gi == groups.end())
        throw EmptySelection("group " + to_string(group) + " not in panel");
    std::size_t i = static_cast<std::size_t>(ii - institutions.begin());
    std::size_t y = static_cast<std::size_t>(yi - years.begin());
    std::size_t g = static_cast<std::size_t>(gi - groups.begin());
    return (i * years.size() + y) * groups.size() + g;
}

const PanelObservation& PanelDataset::at(const std::string& institution, AcademicYear year,
                                         StaffGroup group) const {
    return observations[index_of(institution, year, group)];
}

bool PanelDataset::has_group(StaffGroup group) const {
    return std::find(groups.begin(), groups.end(), group) != groups.end();
}

// ---- ingestion ------------------------------------------------------------

namespace {

// Comments are serialized as "# note: ...".  Recover the note text; plain
// comments without the prefix are preserved verbatim as notes.
std::vector<std::string> strip_note_prefix(const std::vector<std::string>& comments) {
    std::vector<std::string> notes;
    for (const auto& c : comments) {
        if (c.rfind("note: ", 0) == 0) notes.push_back(c.substr(6));
        else notes.push_back(c);
    }
    return notes;
}

int require_column(const Table& t, const std::string& name) {
    int idx = t.column_index(name);
    if (idx < 0) throw MalformedRow(1, "missing required column '" + name + "'");
    return idx;
}

int parse_year_field(const std::string& text, std::size_t row) {
    long long y;
    // Accept both "2012" and "2012/13" spellings.
    std::string t = text;
    if (auto slash = t.find('/'); slash != std::string::npos) t = t.substr(0, slash);
    if (!parse_long(t, y))
        throw MalformedRow(row, "unparseable year '" + text + "'");
    if (y < kMinAcademicYear || y > kMaxAcademicYear)
        throw MalformedRow(row, "year " + std::to_string(y) + " outside [" +
                                    std::to_string(kMinAcademicYear) + ", " +
                                    std::to_string(kMaxAcademicYear) + "]");
    return static_cast<int>(y);
}

long long parse_count_field(const std::string& text, std::size_t row, const std::string& what) {
    long long v;
    if (!parse_long(text, v))
        throw MalformedRow(row, "unparseable " + what + " '" + text + "'");
    if (v < 0) throw NegativeCount(row, what + " = " + std::to_string(v));
    return v;
}

struct CellKey {
    std::string institution;
    int year;
    StaffGroup group;
    auto operator<=>(const CellKey&) const = default;
};

PanelDataset assemble(std::map<CellKey, PanelObservation>&& cells,
                      std::vector<std::string> notes) {
    if (cells.empty()) throw EmptySelection("no usable rows in input");

    PanelDataset data;
    data.notes = std::move(notes);
    std::set<std::string> insts;
    std::set<int> years;
    std::set<StaffGroup> groups;
    for (const auto& [key, obs] : cells) {
        insts.insert(key.institution);
        years.insert(key.year);
        groups.insert(key.group);
    }
    data.institutions.assign(insts.begin(), insts.end());
    for (int y = *years.begin(); y <= *years.rbegin(); ++y)
        data.years.push_back(AcademicYear{y});   // contiguous span; gaps surface below
    data.groups.assign(groups.begin(), groups.end());

    data.observations.reserve(data.institutions.size() * data.years.size() * data.groups.size());
    for (const auto& inst : data.institutions)
        for (const auto& year : data.years)
            for (const auto& group : data.groups) {
                auto it = cells.find(CellKey{inst, year.start_year, group});
                if (it == cells.end())
                    throw MissingCell(inst, year.start_year,
                                      data.groups.size() > 1 ? to_string(group) : "");
                data.observations.push_back(std::move(it->second));
            }
    return data;
}

PanelDataset ingest_aggregated(const Table& t, const IngestSchema& schema) {
    const int ci = require_column(t, schema.institution);
    const int cy = require_column(t, schema.year);
    const int ch = require_column(t, schema.headcount);
    const int cn = require_column(t, schema.new_appointments);
    const int cg = t.column_index(schema.group);
    const int cs = t.column_index(schema.student_fte);

    std::map<CellKey, PanelObservation> cells;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::size_t line = t.source_lines[r];
        PanelObservation obs;
        obs.institution = row[ci];
        if (obs.institution.empty()) throw MalformedRow(line, "empty institution");
        obs.year = AcademicYear{parse_year_field(row[cy], line)};
        if (cg >= 0) {
            auto g = parse_staff_group(row[cg]);
            if (!g) throw MalformedRow(line, "unknown group '" + row[cg] + "'");
            obs.group = *g;
        } else {
            obs.group = schema.default_group;
        }
        obs.headcount = parse_count_field(row[ch], line, "headcount");
        obs.new_appointments = parse_count_field(row[cn], line, "new_appointments");
        if (obs.new_appointments > obs.headcount)
            throw NegativeCount(line, "new_appointments " + std::to_string(obs.new_appointments) +
                                          " exceed headcount " + std::to_string(obs.headcount));
        if (cs >= 0) {
            if (!parse_double(row[cs], obs.student_fte))
                throw MalformedRow(line, "unparseable student_fte '" + row[cs] + "'");
            if (obs.student_fte < 0)
                throw NegativeCount(line, "student_fte = " + row[cs]);
        }
        CellKey key{obs.institution, obs.year.start_year, obs.group};
        if (!cells.emplace(key, std::move(obs)).second)
            throw DuplicateCell(key.institution, key.year,
                                cg >= 0 ? to_string(key.group) : "", line);
    }
    return assemble(std::move(cells), t.comments.empty()
                                          ? std::vector<std::string>{}
                                          : strip_note_prefix(t.comments));
}

PanelDataset ingest_person_records(const Table& t, const IngestSchema& schema) {
    const int ci = require_column(t, schema.institution);
    const int cy = require_column(t, schema.year);
    const int cp = require_column(t, schema.person_id);
    const int cf = require_column(t, schema.function_code);
    const int cs = require_column(t, schema.salary_point);
    const int cm = require_column(t, schema.employment_mode);
    const int ct = require_column(t, schema.terms);
    const int cfin = require_column(t, schema.financing);
    const int cstu = t.column_index(schema.student_fte);

    struct Roster {
        long long heads = 0;
        long long new_heads = 0;
        double student_fte = 0.0;
        bool have_student = false;
    };
    std::map<CellKey, Roster> cells;
    // (institution, person) -> years seen, for the new-appointment derivation
    std::map<std::pair<std::string, std::string>, std::set<int>> person_years;
    struct Member { CellKey cell; std::string person; std::size_t line; };
    std::vector<Member> members;
    std::set<std::pair<CellKey, std::string>> seen;
    std::set<std::string> inst_set;
    std::set<int> year_set;

    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::size_t line = t.source_lines[r];
        const std::string inst = row[ci];
        if (inst.empty()) throw MalformedRow(line, "empty institution");
        const int year = parse_year_field(row[cy], line);
        const std::string person = row[cp];
        if (person.empty()) throw MalformedRow(line, "empty person_id");

        StaffRecord rec;
        auto fc = parse_function_code(row[cf]);
        if (!fc) throw MalformedRow(line, "unknown function_code '" + row[cf] + "'");
        rec.function_code = *fc;
        long long sp = parse_count_field(row[cs], line, "salary_point");
        rec.salary_point = static_cast<int>(sp);
        auto em = parse_employment_mode(row[cm]);
        if (!em) throw MalformedRow(line, "unknown employment_mode '" + row[cm] + "'");
        rec.employment_mode = *em;
        auto tm = parse_contract_terms(row[ct]);
        if (!tm) throw MalformedRow(line, "unknown terms '" + row[ct] + "'");
        rec.terms = *tm;
        auto fin = parse_financing(row[cfin]);
        if (!fin) throw MalformedRow(line, "unknown financing '" + row[cfin] + "'");
        rec.financing = *fin;

        inst_set.insert(inst);
        year_set.insert(year);
        person_years[{inst, person}].insert(year);

        StaffGroup group = classify_staff_record(rec);
        if (group == StaffGroup::unclassified) continue;   // out of scope for counts

        CellKey key{inst, year, group};
        if (!seen.emplace(key, person).second)
            throw DuplicateCell(inst, year, to_string(group) + " person " + person, line);
        auto& cell = cells[key];
        cell.heads += 1;
        if (cstu >= 0) {
            double s;
            if (!parse_double(row[cstu], s))
                throw MalformedRow(line, "unparseable student_fte '" + row[cstu] + "'");
            if (cell.have_student && cell.student_fte != s)
                throw MalformedRow(line, "conflicting student_fte within cell");
            cell.student_fte = s;
            cell.have_student = true;
        }
        members.push_back(Member{key, person, line});
    }

    if (year_set.empty()) throw EmptySelection("no usable rows in input");
    const int first_year = *year_set.begin();
    for (const auto& m : members) {
        if (m.cell.year == first_year) continue;   // no prior roster to compare against
        const auto& ys = person_years[{m.cell.institution, m.person}];
        if (!ys.count(m.cell.year - 1)) {
            auto it = cells.find(m.cell);
            it->second.new_heads += 1;
        }
    }

    // Materialize a balanced grid over every institution/year/group observed,
    // padding genuinely classified-empty cells with zero counts.
    std::set<StaffGroup> group_set;
    for (const auto& [key, cell] : cells) group_set.insert(key.group);
    if (group_set.empty()) throw EmptySelection("no classifiable staff records in input");

    std::map<CellKey, PanelObservation> out;
    for (const auto& inst : inst_set)
        for (int y = first_year; y <= *year_set.rbegin(); ++y)
            for (StaffGroup g : group_set) {
                CellKey key{inst, y, g};
                PanelObservation obs;
                obs.institution = inst;
                obs.year = AcademicYear{y};
                obs.group = g;
                if (auto it = cells.find(key); it != cells.end()) {
                    obs.headcount = it->second.heads;
                    obs.new_appointments = it->second.new_heads;
                    obs.student_fte = it->second.student_fte;
                }
                out.emplace(key, std::move(obs));
            }
    return assemble(std::move(out), t.comments.empty()
                                        ? std::vector<std::string>{}
                                        : strip_note_prefix(t.comments));
}

} // namespace

PanelDataset ingest_panel(std::istream& in, const IngestSchema& schema, char delimiter) {
    Table t = read_table(in, delimiter);
    const bool person_shape = t.column_index(schema.person_id) >= 0;
    const bool aggregated_shape = t.column_index(schema.headcount) >= 0;
    if (person_shape && !aggregated_shape) return ingest_person_records(t, schema);
    if (aggregated_shape) return ingest_aggregated(t, schema);
    throw MalformedRow(1, "columns match neither aggregated cells (" + schema.headcount +
                              ") nor person records (" + schema.person_id + ")");
}

void serialize_panel(std::ostream& out, const PanelDataset& data) {
    Table t;
    for (const auto& note : data.notes) t.comments.push_back("note: " + note);
    t.columns = {"institution", "year", "group", "headcount", "new_appointments",
                 "student_fte"};
    for (const auto& obs : data.observations) {
        t.rows.push_back({obs.institution, std::to_string(obs.year.start_year),
                          to_string(obs.group), std::to_string(obs.headcount),
                          std::to_string(obs.new_appointments),
                          format_double(obs.student_fte)});
    }
    write_table(out, t);
}

double job_creation_rate(const PanelObservation& obs) {
    if (obs.headcount == 0) throw ZeroHeadcount(obs.institution, obs.year.start_year);
    return static_cast<double>(obs.new_appointments) / static_cast<double>(obs.headcount);
}

double group_mean_rate(const PanelDataset& data, StaffGroup group,
                       const std::vector<std::string>& institutions,
                       const std::vector<AcademicYear>& years) {
    if (institutions.empty()) throw EmptySelection("no institutions requested");
    if (years.empty()) throw EmptySelection("no years requested");
    double across = 0.0;
    for (const auto& inst : institutions) {
        double within = 0.0;
        for (const auto& year : years) within += job_creation_rate(data.at(inst, year, group));
        across += within / static_cast<double>(years.size());
    }
    return across / static_cast<double>(institutions.size());
}

} // namespace wft
