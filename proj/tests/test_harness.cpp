#include "mauc/errors.hpp"
#include "mauc/harness.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

using namespace mauc;
using namespace mauc::harness;

namespace {

std::string as_csv(const ResultRecord& r)
{
    std::ostringstream out;
    write_csv(out, r);
    return out.str();
}

std::string as_json(const ResultRecord& r)
{
    std::ostringstream out;
    write_json(out, r);
    return out.str();
}

std::size_t column(const ResultRecord& r, const std::string& name)
{
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
        if (r.columns[i] == name) return i;
    }
    FAIL("missing column " << name);
    return 0;
}

double number(const Cell& c)
{
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    FAIL("cell is not numeric");
    return 0;
}

std::string str(const Cell& c)
{
    const auto* s = std::get_if<std::string>(&c);
    REQUIRE(s != nullptr);
    return *s;
}

ExperimentConfig small_simulate()
{
    ExperimentConfig c;
    c.command = Command::simulate;
    c.n = 256;
    c.m = {2048};
    c.theta_trials = 12;
    c.x_trials = 3;
    c.epsilon = 0.25;
    c.seed = 99;
    return c;
}

ExperimentConfig reproduce_config()
{
    ExperimentConfig c;
    c.command = Command::reproduce_paper;
    c.symbol_width = 8;
    c.k = 256;
    c.order = 1;
    c.entropy_rate = 0.25;
    c.scale = 1024;
    c.theta_trials = 10;
    c.x_trials = 2;
    return c;
}

} // namespace

TEST_CASE("config round-trips through JSON")
{
    ExperimentConfig c = reproduce_config();
    c.n = 4096;
    c.m = {1, 2, 3};
    c.threads = 3;
    c.output_path = "out.json";
    c.format = OutputFormat::json;
    c.record_timing = true;
    nlohmann::json j = c;
    CHECK(j.get<ExperimentConfig>() == c);

    j.erase("threads");
    j.erase("output_path");
    CHECK(j.get<ExperimentConfig>().threads == 1);
    CHECK(j.get<ExperimentConfig>().output_path.empty());

    for (const auto cmd : {Command::bound, Command::simulate, Command::sweep, Command::entropy_check,
                           Command::reproduce_paper, Command::roundtrip_fuzz}) {
        CHECK(parse_command(to_string(cmd)) == cmd);
    }
    CHECK_THROWS_AS(parse_command("bogus"), UsageError);
    CHECK_THROWS_AS(parse_format("xml"), UsageError);
}

TEST_CASE("validation")
{
    ExperimentConfig c;
    c.k = 1;
    CHECK_THROWS_AS(validate(c), UsageError);
    c = ExperimentConfig{};
    c.epsilon = 1.0;
    CHECK_THROWS_AS(validate(c), UsageError);
    c = ExperimentConfig{};
    c.threads = 0;
    CHECK_THROWS_AS(validate(c), UsageError);
    c = ExperimentConfig{};
    c.command = Command::entropy_check;
    c.m = {64, 64};
    CHECK_THROWS_AS(validate(c), UsageError);

    ExperimentConfig r;
    r.command = Command::reproduce_paper;
    try {
        validate(r);
        FAIL("expected a usage error");
    } catch (const UsageError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("--symbol-width") != std::string::npos);
        CHECK(msg.find("--k") != std::string::npos);
        CHECK(msg.find("--order") != std::string::npos);
        CHECK(msg.find("--entropy-rate") != std::string::npos);
    }
    r = reproduce_config();
    CHECK_NOTHROW(validate(r));
    r.order = 0;
    CHECK_THROWS_AS(validate(r), UsageError);
    r = reproduce_config();
    r.k = 257;
    CHECK_THROWS_AS(validate(r), UsageError);
    r = reproduce_config();
    r.entropy_rate = 9.0;
    CHECK_THROWS_AS(validate(r), UsageError);
}

TEST_CASE("float formatting round-trips")
{
    for (const double v : {0.1, 1.0 / 3.0, 2.0223678130284545, 1e-300, -7.25, 123456789.0}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("CSV and JSON carry the same numbers")
{
    const auto r = run(small_simulate());
    const auto parsed = nlohmann::json::parse(as_json(r));
    REQUIRE(parsed.at("rows").size() == r.rows.size());
    CHECK(parsed.at("columns").get<std::vector<std::string>>() == r.columns);
    CHECK(parsed.at("config").at("n") == 256);
    CHECK_FALSE(parsed.at("config").contains("threads"));
    CHECK_FALSE(parsed.at("config").contains("output_path"));
    CHECK(parsed.at("metadata").at("version") == r.version);

    std::istringstream csv(as_csv(r));
    std::string line;
    std::vector<std::string> data;
    bool saw_config = false;
    while (std::getline(csv, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("#", 0) == 0) {
            saw_config = saw_config || line.rfind("# config: ", 0) == 0;
            continue;
        }
        data.push_back(line);
    }
    CHECK(saw_config);
    REQUIRE(data.size() == r.rows.size() + 1);
    const std::size_t q = column(r, "q_ratio");
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        std::vector<std::string> fields;
        std::stringstream ss(data[i + 1]);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (data[i + 1].back() == ',') fields.emplace_back();
        const auto& cell = r.rows[i][q];
        const auto& js = parsed.at("rows")[i].at("q_ratio");
        if (std::holds_alternative<double>(cell)) {
            CHECK(std::stod(fields[q]) == std::get<double>(cell));
            CHECK(js.get<double>() == std::get<double>(cell));
        } else {
            CHECK(js.is_null());
        }
    }
}

TEST_CASE("output is deterministic across runs and thread counts")
{
    auto c = small_simulate();
    c.order = 1;
    c.k = 3;
    const auto a = as_csv(run(c));
    CHECK(as_csv(run(c)) == a);
    c.threads = 3;
    CHECK(as_csv(run(c)) == a);
    const auto j3 = as_json(run(c));
    c.threads = 1;
    CHECK(as_json(run(c)) == j3);

    auto other = c;
    other.seed = 100;
    CHECK(as_csv(run(other)) != a);
}

TEST_CASE("wall clock is written only on request")
{
    auto c = small_simulate();
    const auto r = run(c);
    CHECK(r.wall_clock_seconds.has_value());
    CHECK(as_csv(r).find("wall_clock") == std::string::npos);
    c.record_timing = true;
    CHECK(as_csv(run(c)).find("wall_clock") != std::string::npos);
}

TEST_CASE("bound command")
{
    ExperimentConfig c;
    c.command = Command::bound;
    c.n = 1024;
    c.entropy_rate = 0.28639695711595613;
    c.epsilon = 0.5;
    for (std::uint64_t m = 1u << 10; m <= 1u << 23; m <<= 1) c.m.push_back(m);
    const auto r = run(c);
    REQUIRE(r.rows.size() == c.m.size());
    const std::size_t b = column(r, "bound");
    for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(number(r.rows[i][b]) >= number(r.rows[i - 1][b]));
    CHECK(number(r.rows[0][column(r, "d")]) == 1);
    CHECK(number(r.rows[0][column(r, "h_n")]) == doctest::Approx(1024 * 0.28639695711595613));

    // Without --entropy-rate the entropy comes from a sampled source.
    ExperimentConfig s;
    s.command = Command::bound;
    const auto sampled = run(s);
    CHECK(str(sampled.rows[0][column(sampled, "h_n_source")]) != str(r.rows[0][column(r, "h_n_source")]));
}

TEST_CASE("simulate without memory reports unit gain")
{
    auto c = small_simulate();
    c.m = {0};
    const auto r = run(c);
    const auto& summary = r.rows.back();
    CHECK(str(summary[column(r, "kind")]) == "summary");
    CHECK(number(summary[column(r, "g_empirical")]) == 1.0);
    for (std::size_t i = 0; i + 1 < r.rows.size(); ++i) CHECK(number(r.rows[i][column(r, "q_ratio")]) == 1.0);
}

TEST_CASE("sweep and entropy-check shapes")
{
    ExperimentConfig c;
    c.command = Command::sweep;
    c.n = 128;
    c.m = {128, 1024};
    c.theta_trials = 10;
    c.x_trials = 2;
    const auto s = run(c);
    CHECK(s.rows.size() == 2);
    CHECK(number(s.rows[1][column(s, "r_hat")]) < number(s.rows[0][column(s, "r_hat")]));

    c.command = Command::entropy_check;
    c.m = {64, 4096};
    c.x_trials = 20;
    const auto e = run(c);
    CHECK(e.rows.size() == 2);
    CHECK(number(e.rows[1][column(e, "gap_bits_per_symbol")]) < number(e.rows[0][column(e, "gap_bits_per_symbol")]));
}

TEST_CASE("reproduce-paper records its assumptions")
{
    const auto r = run(reproduce_config());
    REQUIRE(r.rows.size() == 3);
    CHECK(str(r.rows[0][column(r, "kind")]) == "headline-bound");
    CHECK(number(r.rows[0][column(r, "n_symbols")]) == 131072);
    CHECK(number(r.rows[0][column(r, "m_symbols")]) == 8388608);
    CHECK(number(r.rows[0][column(r, "d")]) == 65280);
    CHECK(str(r.rows[0][column(r, "flag")]) == "PASS");
    CHECK(number(r.rows[0][column(r, "bound")]) >= 1.5);
    const auto csv = as_csv(r);
    CHECK(csv.find("# assumption_symbol_width_bits: 8") != std::string::npos);
    CHECK(csv.find("# assumption_entropy_rate_bits_per_symbol: 0.25") != std::string::npos);

    auto high = reproduce_config();
    high.entropy_rate = 7.5;
    const auto h = run(high);
    CHECK(str(h.rows[0][column(h, "flag")]) == "INFO");
}

TEST_CASE("roundtrip-fuzz")
{
    ExperimentConfig c;
    c.command = Command::roundtrip_fuzz;
    c.fuzz_cases = 150;
    c.seed = 8;
    const auto r = run(c);
    CHECK(r.failures == 0);
    REQUIRE(r.rows.size() == 1);
    const auto detail = str(r.rows[0][column(r, "detail")]);
    CHECK(detail.find("failures=0") != std::string::npos);
    CHECK(detail.find("empty_cases=0") == std::string::npos);

    c.inject_corruption = true;
    const auto bad = run(c);
    CHECK(bad.failures > 0);
    CHECK(str(bad.rows[0][column(bad, "kind")]) == "failure");
}

TEST_CASE("non-finite values are refused")
{
    ResultRecord r;
    r.config = ExperimentConfig{};
    r.version = "test";
    r.columns = {"x"};
    r.add_row({std::numeric_limits<double>::quiet_NaN()});
    std::ostringstream out;
    CHECK_THROWS_AS(write_csv(out, r), NumericError);
    CHECK_THROWS_AS(write_json(out, r), NumericError);
}
