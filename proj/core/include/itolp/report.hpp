#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace itolp {

inline constexpr int kCsvSchema = 1;

struct ReportRow {
    std::string path;  // path index, or "summary"
    double t = 0.0;
    std::string term;
    double value = 0.0;
};

struct TermStat {
    std::string term;
    double mean = 0.0;
    double std_err = 0.0;
    std::size_t count = 0;
};

struct Assertion {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Rows and summary of one experiment run.
class Report {
public:
    Report(std::string experiment, std::string kind);

    const std::string& experiment() const noexcept { return experiment_; }
    const std::string& kind() const noexcept { return kind_; }

    void add(std::size_t path, double t, const std::string& term, double value);
    /// Collects `value` into the per-term statistics as well as the rows.
    void add_sample(std::size_t path, double t, const std::string& term, double value);
    void add_residual(double value);
    void set_condition(const std::string& name, double value);
    void set_value(const std::string& name, double value);
    void check(const std::string& name, bool passed, const std::string& detail);

    /// Appends the summary rows (term means/std errors, residual quantiles).
    void finalize();

    const std::vector<ReportRow>& rows() const noexcept { return rows_; }
    std::vector<TermStat> term_stats() const;
    std::map<std::string, double> residual_quantiles() const;
    const std::vector<Assertion>& assertions() const noexcept { return assertions_; }
    bool passed() const noexcept;

    void write_csv(std::ostream& os) const;
    void write_json(std::ostream& os) const;

private:
    std::string experiment_;
    std::string kind_;
    std::vector<ReportRow> rows_;
    std::vector<std::string> term_order_;
    std::map<std::string, std::vector<double>> samples_;
    std::vector<double> residuals_;
    std::map<std::string, double> conditions_;
    std::map<std::string, double> values_;
    std::vector<Assertion> assertions_;
    bool finalized_ = false;
};

/// Linear-interpolation quantile of a non-empty sample, q in [0, 1].
double quantile(std::vector<double> values, double q);

}  // namespace itolp
