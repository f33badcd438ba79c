#pragma once

// Error taxonomy for the workforce toolkit.  Three broad classes, each mapped
// to a distinct process exit status by the CLI driver:
//
//   UsageError     -> exit 2   (bad invocation: flags, arguments, config)
//   DataError      -> exit 3   (input violates the data contract)
//   NumericalError -> exit 4   (computation cannot proceed / did not converge)
//
// Library code throws the specific subclasses below; each message names the
// offending row, cell, column, or parameter so failures are actionable.

#include <stdexcept>
#include <string>
#include <vector>

namespace wft {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error("usage: " + what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error("data: " + what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error("numerical: " + what) {}
};

// ---- panel ingestion ------------------------------------------------------

/// A (institution, year[, group]) cell required for a balanced panel is absent.
class MissingCell : public DataError {
public:
    MissingCell(const std::string& institution, int year, const std::string& group)
        : DataError("missing cell: institution=" + institution +
                    " year=" + std::to_string(year) +
                    (group.empty() ? "" : " group=" + group)) {}
};

/// The same (institution, year, group) cell appears more than once.
class DuplicateCell : public DataError {
public:
    DuplicateCell(const std::string& institution, int year, const std::string& group,
                  std::size_t row)
        : DataError("duplicate cell at row " + std::to_string(row) +
                    ": institution=" + institution + " year=" + std::to_string(year) +
                    (group.empty() ? "" : " group=" + group)) {}
};

/// A count field is negative, or count ordering is violated
/// (new appointments exceeding headcount counts as a negative remainder).
class NegativeCount : public DataError {
public:
    NegativeCount(std::size_t row, const std::string& detail)
        : DataError("bad count at row " + std::to_string(row) + ": " + detail) {}
};

/// A row cannot be parsed against the schema (wrong arity, non-numeric field,
/// unknown enum token, out-of-range year).
class MalformedRow : public DataError {
public:
    MalformedRow(std::size_t line, const std::string& detail)
        : DataError("malformed row at line " + std::to_string(line) + ": " + detail) {}
};

/// A rate is requested for a cell with zero headcount.
class ZeroHeadcount : public DataError {
public:
    ZeroHeadcount(const std::string& institution, int year)
        : DataError("zero headcount: institution=" + institution +
                    " year=" + std::to_string(year)) {}
};

/// A mean over an empty (or not-present-in-panel) selection of cells.
class EmptySelection : public DataError {
public:
    explicit EmptySelection(const std::string& detail)
        : DataError("empty selection: " + detail) {}
};

// ---- closed-form queue arithmetic ----------------------------------------

/// Retirement age does not exceed appointment age.
class InvalidAges : public DataError {
public:
    InvalidAges(double appointment_age, double retirement_age)
        : DataError("invalid ages: retirement age " + std::to_string(retirement_age) +
                    " must exceed appointment age " + std::to_string(appointment_age)) {}
};

// ---- cohort simulator -----------------------------------------------------

/// Scenario admits unbounded residence: no mandatory age, no age cap, and
/// hazards never reach an absorbing (probability-one) exit.
class UnboundedAges : public DataError {
public:
    explicit UnboundedAges(const std::string& detail)
        : DataError("unbounded ages: " + detail) {}
};

/// Two scenarios cannot be compared (different posts or entry distribution).
class IncompatibleScenarios : public DataError {
public:
    explicit IncompatibleScenarios(const std::string& detail)
        : DataError("incompatible scenarios: " + detail) {}
};

/// A trace window is empty or outside the simulated range.
class EmptyWindow : public DataError {
public:
    explicit EmptyWindow(const std::string& detail)
        : DataError("empty window: " + detail) {}
};

// ---- regression engine ----------------------------------------------------

/// Design matrix is rank deficient; names the offending columns.
class RankDeficient : public NumericalError {
public:
    explicit RankDeficient(std::vector<std::string> dependent)
        : NumericalError(describe(dependent)), columns(std::move(dependent)) {}

    std::vector<std::string> columns;

private:
    static std::string describe(const std::vector<std::string>& columns) {
        std::string s = "rank-deficient design; dependent column(s):";
        for (const auto& c : columns) s += " " + c;
        return s;
    }
};

/// Treatment indicator has no variation after fixed effects (nothing to estimate).
class DegenerateDesign : public DataError {
public:
    explicit DegenerateDesign(const std::string& detail)
        : DataError("degenerate design: " + detail) {}
};

/// Requested pivot year is not in the panel.
class MissingBaseYear : public DataError {
public:
    explicit MissingBaseYear(int year)
        : DataError("base year " + std::to_string(year) + " not present in panel") {}
};

/// Too few pre-policy observations to fit a per-unit trend.
class InsufficientPrePeriod : public DataError {
public:
    InsufficientPrePeriod(const std::string& unit, std::size_t have, std::size_t need)
        : DataError("insufficient pre-period for unit " + unit + ": have " +
                    std::to_string(have) + ", need at least " + std::to_string(need)) {}
};

/// Student load must be strictly positive wherever its logarithm is used.
class NonpositiveStudentFTE : public DataError {
public:
    NonpositiveStudentFTE(const std::string& institution, int year)
        : DataError("nonpositive student FTE: institution=" + institution +
                    " year=" + std::to_string(year)) {}
    explicit NonpositiveStudentFTE(const std::string& detail)
        : DataError("nonpositive student FTE: " + detail) {}
};

/// Synthetic control needs at least one donor unit.
class NoDonors : public DataError {
public:
    explicit NoDonors(const std::string& treated)
        : DataError("no donor units besides treated unit " + treated) {}
};

} // namespace wft
