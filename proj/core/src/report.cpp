#include "itolp/report.hpp"

#include "itolp/errors.hpp"
#include "itolp/format.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace itolp {

Report::Report(std::string experiment, std::string kind)
    : experiment_(std::move(experiment)), kind_(std::move(kind))
{
}

void Report::add(std::size_t path, double t, const std::string& term, double value)
{
    rows_.push_back({std::to_string(path), t, term, value});
}

void Report::add_sample(std::size_t path, double t, const std::string& term, double value)
{
    add(path, t, term, value);
    auto [it, inserted] = samples_.try_emplace(term);
    if (inserted) term_order_.push_back(term);
    it->second.push_back(value);
}

void Report::add_residual(double value)
{
    residuals_.push_back(value);
}

void Report::set_condition(const std::string& name, double value)
{
    conditions_[name] = value;
}

void Report::set_value(const std::string& name, double value)
{
    values_[name] = value;
}

void Report::check(const std::string& name, bool passed, const std::string& detail)
{
    assertions_.push_back({name, passed, detail});
}

std::vector<TermStat> Report::term_stats() const
{
    std::vector<TermStat> out;
    for (const auto& term : term_order_) {
        const auto& v = samples_.at(term);
        TermStat s{term, 0.0, 0.0, v.size()};
        for (double x : v) s.mean += x;
        s.mean /= static_cast<double>(v.size());
        if (v.size() > 1) {
            double ss = 0.0;
            for (double x : v) ss += (x - s.mean) * (x - s.mean);
            s.std_err = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
        }
        out.push_back(s);
    }
    return out;
}

std::map<std::string, double> Report::residual_quantiles() const
{
    std::map<std::string, double> out;
    if (residuals_.empty()) return out;
    for (const auto& [name, q] : {std::pair{"min", 0.0}, {"q25", 0.25}, {"median", 0.5}, {"q75", 0.75}, {"max", 1.0}}) {
        out[name] = quantile(residuals_, q);
    }
    return out;
}

void Report::finalize()
{
    if (finalized_) return;
    finalized_ = true;
    for (const auto& s : term_stats()) {
        rows_.push_back({"summary", 0.0, s.term + ".mean", s.mean});
        rows_.push_back({"summary", 0.0, s.term + ".std_err", s.std_err});
    }
    for (const auto& [name, v] : residual_quantiles()) rows_.push_back({"summary", 0.0, "residual." + name, v});
}

bool Report::passed() const noexcept
{
    return std::all_of(assertions_.begin(), assertions_.end(), [](const Assertion& a) { return a.passed; });
}

void Report::write_csv(std::ostream& os) const
{
    os << "schema=" << kCsvSchema << '\n' << "experiment,path,t,term,value\n";
    for (const auto& r : rows_) {
        os << experiment_ << ',' << r.path << ',' << format_double(r.t) << ',' << r.term << ','
           << format_double(r.value) << '\n';
    }
}

void Report::write_json(std::ostream& os) const
{
    using nlohmann::json;
    const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); };
    json terms = json::object();
    for (const auto& s : term_stats()) terms[s.term] = {{"mean", num(s.mean)}, {"std_err", num(s.std_err)}, {"count", s.count}};
    json quant = json::object();
    for (const auto& [k, v] : residual_quantiles()) quant[k] = num(v);
    json conds = json::object();
    for (const auto& [k, v] : conditions_) conds[k] = num(v);
    json values = json::object();
    for (const auto& [k, v] : values_) values[k] = num(v);
    json checks = json::array();
    for (const auto& a : assertions_) checks.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
    const json doc{{"experiment", experiment_}, {"kind", kind_},           {"schema", kCsvSchema},
                   {"terms", terms},            {"residual_quantiles", quant}, {"conditions", conds},
                   {"values", values},          {"assertions", checks},    {"passed", passed()}};
    os << doc.dump(2) << '\n';
}

double quantile(std::vector<double> values, double q)
{
    if (values.empty()) throw PreconditionError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace itolp
