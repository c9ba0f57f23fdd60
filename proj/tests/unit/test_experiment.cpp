#include "itolp/config.hpp"
#include "itolp/driver_catalog.hpp"
#include "itolp/errors.hpp"
#include "itolp/experiment.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace itolp;

namespace {

ExperimentConfig parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in);
}

std::string error_of(const std::string& text)
{
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::string csv_of(const Report& r)
{
    std::ostringstream os;
    r.write_csv(os);
    return os.str();
}

const std::string kZeroFd = R"([experiment]
kind = fd_ito
id = zero
p = 3
paths = 5
seed = 1
[time]
T = 1
n_steps = 8
[drivers]
M = 2
[tolerances]
residual_rel = 1e-12
)";

}  // namespace

TEST_CASE("catalog")
{
    const auto& cat = driver_catalog();
    CHECK(cat.size() >= 5);
    for (const char* id : {"constant", "bump", "ramp", "sinusoid", "randomized"}) CHECK_NOTHROW(catalog_entry(id));
    for (const auto& entry : cat) {
        const auto spec = parse_driver_spec(entry.id);
        CHECK(spec.params.size() == entry.params.size());
        const auto text = format_driver_spec(spec);
        CHECK(parse_driver_spec(text) == spec);
        CHECK(format_driver_spec(parse_driver_spec(text)) == text);
        const auto f = make_driver(spec, 3);
        const double x[] = {0.1, -0.2};
        CHECK(std::isfinite(f(0.5, x, nullptr)));
    }
    const auto s = parse_driver_spec("bump c=2 radius=0.25 mark=identity");
    CHECK(s["c"] == 2.0);
    CHECK(s.mark == "identity");
    CHECK(parse_driver_spec(format_driver_spec(s)) == s);

    const auto error = [](std::string_view t) -> std::string {
        try {
            parse_driver_spec(t);
        } catch (const ConfigError& e) {
            return e.what();
        }
        return {};
    };
    CHECK(error("wiggle c=1").find("wiggle") != std::string::npos);
    CHECK(error("bump width=1").find("width") != std::string::npos);
    CHECK(error("bump c=abc").find("c") != std::string::npos);
    CHECK(error("bump mark=half").find("mark") != std::string::npos);
}

TEST_CASE("driver values")
{
    const double x0[] = {0.0};
    const double x1[] = {0.3};
    CHECK(make_driver(parse_driver_spec("constant c=2.5"), 0)(0.0, x1, nullptr) == 2.5);
    CHECK(make_driver(parse_driver_spec("bump c=2 radius=0.5"), 0)(0.0, x0, nullptr) == 2.0);
    CHECK(make_driver(parse_driver_spec("bump c=2 radius=0.25"), 0)(0.0, x1, nullptr) == 0.0);
    CHECK(make_driver(parse_driver_spec("indicator c=3 radius=0.5"), 0)(0.0, x1, nullptr) == 3.0);
    Mark z;
    z.coords[0] = 0.5;
    CHECK(make_driver(parse_driver_spec("constant c=4 mark=identity"), 0)(0.0, x0, &z) == 2.0);
    CHECK(make_driver(parse_driver_spec("constant c=4 mark=identity"), 0)(0.0, x0, nullptr) == 0.0);
    const auto r1 = make_driver(parse_driver_spec("randomized"), 5);
    const auto r2 = make_driver(parse_driver_spec("randomized"), 5);
    const auto r3 = make_driver(parse_driver_spec("randomized"), 6);
    CHECK(r1(0.3, x1, nullptr) == r2(0.3, x1, nullptr));
    CHECK(r1(0.3, x1, nullptr) != r3(0.3, x1, nullptr));
}

TEST_CASE("config errors name the field")
{
    CHECK(error_of("[experiment]\nkind = fd_ito\np = 1.5\n").find("p must be >= 2") != std::string::npos);
    CHECK(error_of("[experiment]\nkind = sideways\n").find("kind") != std::string::npos);
    CHECK(error_of("[experiment]\nkind = fd_ito\n[drivers]\nM = 1\nf = wiggle\n").find("wiggle") != std::string::npos);
    CHECK(error_of("[experiment]\nkind = fd_ito\n[time]\nn_steps = 0\n").find("n_steps") != std::string::npos);
    CHECK(error_of("[experiment]\nkind = lp_ito_thm22\n[drivers]\nM = 2\n").find("M") != std::string::npos);
    CHECK(error_of("[experiment]\nkind = fd_ito\n[drivers]\npsi = constant\n").find("psi") != std::string::npos);
    CHECK(error_of("[experiment]\nkind = fd_ito\n[time]\nT = 1\nn_steps = 4\nreport_times = 0.3\n").find("report_times") !=
          std::string::npos);
    CHECK(error_of("[experiment]\nkind = fd_ito\ncolour = red\n").find("colour") != std::string::npos);
    CHECK_THROWS_AS(load_config("/nonexistent/file.ini"), ConfigError);
}

TEST_CASE("ini round trip")
{
    for (const auto& entry : std::filesystem::directory_iterator(ITOLP_CONFIG_DIR)) {
        CAPTURE(entry.path().string());
        const auto cfg = load_config(entry.path());
        const auto again = parse(to_ini(cfg));
        CHECK(again == cfg);
        CHECK(to_ini(again) == to_ini(cfg));
    }
    const auto cfg = parse(kZeroFd);
    CHECK(cfg.kind == ExperimentKind::fd_ito);
    CHECK(cfg.p == 3.0);
    CHECK(cfg.dim == 2);
    CHECK(cfg.tolerance("residual_rel", 1.0) == 1e-12);
    CHECK(cfg.tolerance("other", 0.5) == 0.5);
}

TEST_CASE("all-zero fd experiment")
{
    const auto report = run_experiment(parse(kZeroFd));
    CHECK(report.passed());
    const auto q = report.residual_quantiles();
    CHECK(q.at("max") == 0.0);
    CHECK(q.at("min") == 0.0);
    for (const auto& s : report.term_stats()) {
        if (s.term != "lhs" && s.term != "initial") CHECK(s.mean == 0.0);
    }
}

TEST_CASE("csv layout")
{
    const auto report = run_experiment(parse(kZeroFd));
    std::istringstream in(csv_of(report));
    std::string line;
    std::getline(in, line);
    CHECK(line == "schema=1");
    std::getline(in, line);
    CHECK(line == "experiment,path,t,term,value");
    std::map<std::string, int> per_key;
    while (std::getline(in, line)) {
        const auto a = line.find(',');
        const auto b = line.find(',', a + 1);
        const auto c = line.find(',', b + 1);
        const auto d = line.find(',', c + 1);
        CHECK(line.substr(0, a) == "zero");
        if (line.substr(a + 1, b - a - 1) == "summary") continue;
        ++per_key[line.substr(a + 1, d - a - 1)];
    }
    CHECK(per_key.size() == 5 * 9);
    for (const auto& [k, n] : per_key) CHECK(n == 1);

    std::ostringstream js;
    report.write_json(js);
    const auto j = nlohmann::json::parse(js.str());
    CHECK(j.at("experiment") == "zero");
    CHECK(j.at("residual_quantiles").at("median") == 0.0);
    CHECK(j.at("passed") == true);
}

TEST_CASE("bundled configs pass and are reproducible")
{
    for (const char* name : {"fd_pure_jump.ini", "lp_pure_jump.ini", "lp_thm22.ini", "fubini.ini"}) {
        CAPTURE(name);
        auto cfg = load_config(std::filesystem::path(ITOLP_CONFIG_DIR) / name);
        cfg.paths = std::min<std::size_t>(cfg.paths, 12);
        cfg.workers = 1;
        const auto a = run_experiment(cfg);
        CHECK(a.passed());
        cfg.workers = 3;
        const auto b = run_experiment(cfg);
        CHECK(csv_of(a) == csv_of(b));
        cfg.seed += 1;
        CHECK(csv_of(run_experiment(cfg)) != csv_of(a));
    }
}

TEST_CASE("pure-jump field residuals stay at round-off")
{
    auto cfg = load_config(std::filesystem::path(ITOLP_CONFIG_DIR) / "lp_pure_jump.ini");
    cfg.paths = 8;
    const auto report = run_experiment(cfg);
    double lhs = 0.0;
    for (const auto& row : report.rows()) {
        if (row.term == "lhs") lhs = std::max(lhs, row.value);
    }
    CHECK(report.residual_quantiles().at("max") <= 1e-10 * (1.0 + lhs));
}

TEST_CASE("write_report files")
{
    const auto dir = std::filesystem::temp_directory_path() / "itolp_unit_report";
    std::filesystem::remove_all(dir);
    const auto report = run_experiment(parse(kZeroFd));
    write_report(report, dir);
    std::ifstream csv(dir / "zero.csv");
    std::stringstream all;
    all << csv.rdbuf();
    CHECK(all.str() == csv_of(report));
    CHECK(std::filesystem::exists(dir / "zero.json"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("quantiles")
{
    CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
    CHECK(quantile({1.0, 2.0}, 0.25) == 1.25);
    CHECK(quantile({4.0}, 0.9) == 4.0);
    CHECK_THROWS(quantile({}, 0.5));
}
