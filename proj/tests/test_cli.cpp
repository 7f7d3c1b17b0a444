// test_cli.cpp: config parsing, CSV and subcommand tests

#include "doctest.h"

#include <cmath>
#include <sstream>

#include "dho/commands.hpp"
#include "dho/errors.hpp"
#include "dho/exact.hpp"

using namespace dho;

TEST_SUITE("cli") {

TEST_CASE("number formatting round-trips bit-exactly") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 10.008326378264337, 0.0, -0.0})
        CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(10.0) == "10");
}

TEST_CASE("csv write/read round trip") {
    CsvTable t;
    t.header = {"a", "b,c", "d\"e"};
    t.add_row({1.0 / 3.0, std::nan(""), -1e-17});
    t.add_row({2.0, 3.0, 4.0});
    const auto text = to_csv(t);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.substr(0, text.find('\n')) == "a,\"b,c\",\"d\"\"e\"");
    std::istringstream is(text);
    const auto back = read_csv(is);
    CHECK(back.header == t.header);
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[0][0] == t.rows[0][0]);
    CHECK(std::isnan(back.rows[0][1]));
    CHECK(back.rows[0][2] == t.rows[0][2]);
    CHECK_THROWS_AS(t.add_row({1.0}), DomainError);

    CsvTable l;
    l.label_header = "variant";
    l.header = {"x"};
    l.add_row("exact", {1.5});
    std::istringstream il(to_csv(l));
    const auto lb = read_csv(il, true);
    CHECK(lb.labels == std::vector<std::string>{"exact"});
    CHECK(lb.rows[0][0] == 1.5);
}

TEST_CASE("csv reader diagnostics") {
    std::istringstream bad("a,b\n1,2\n3\n");
    try {
        read_csv(bad);
        FAIL("expected a parse error");
    } catch (const ConfigError& e) {
        CHECK(e.line == 3);
    }
    std::istringstream nonnum("a\nfoo\n");
    CHECK_THROWS_AS(read_csv(nonnum), ConfigError);
}

TEST_CASE("variant names") {
    CHECK(VariantSpec::parse("exact").label() == "exact");
    CHECK(VariantSpec::parse("redfield_LS").label() == "redfield_LS");
    CHECK(VariantSpec::parse("gkls").label() == "gkls_LS");
    const auto v = VariantSpec::parse("redfield_shifted_noLS");
    CHECK(v.method == Method::redfield);
    CHECK(v.shifted);
    CHECK_FALSE(v.lamb_shift);
    CHECK_THROWS_AS(VariantSpec::parse("lindblad"), ConfigError);
    CHECK_THROWS_AS(VariantSpec::parse("exact_LS"), ConfigError);
    std::vector<std::string> labels;
    for (const auto& d : default_variants()) labels.push_back(d.label());
    CHECK(labels == std::vector<std::string>{"exact", "redfield_LS", "gkls_LS", "redfield_shifted_noLS", "gkls_shifted_noLS"});
}

TEST_CASE("config parsing") {
    std::istringstream is(R"(# Fig. 1(b)
[model]
omega0 = 1
lambda = 0.1   # coupling
cutoff = 100
temperature = 10
counter_term = true

[time]
t_max = 50
n_points = 11

[sweep]
T_min = 0.5
T_max = 5
T_points = 3
T_scale = linear
lambda_points = 4

[variants]
list = exact, redfield_shifted_noLS

[initial]
state = vacuum

[numerics]
tol = 1e-8
threads = 1
)");
    const auto cfg = parse_config(is);
    CHECK(cfg.model.temperature == 10.0);
    CHECK(cfg.t_max == 50.0);
    CHECK(cfg.n_points == 11);
    CHECK(cfg.temperature.values() == std::vector<double>{0.5, 2.75, 5.0});
    CHECK(cfg.coupling.points == 4);
    REQUIRE(cfg.variants.size() == 2);
    CHECK(cfg.variants[1].label() == "redfield_shifted_noLS");
    CHECK(cfg.initial.kind == InitialSpec::Kind::vacuum);
    CHECK(cfg.tol == 1e-8);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config errors carry line and key") {
    auto expect = [](const std::string& text, int line, const std::string& key) {
        std::istringstream is(text);
        try {
            parse_config(is);
            FAIL("expected a config error");
        } catch (const ConfigError& e) {
            CHECK(e.line == line);
            CHECK(e.key == key);
        }
    };
    expect("[model]\nlambda = abc\n", 2, "lambda");
    expect("[model]\nfoo = 1\n", 2, "foo");
    expect("[nowhere]\n", 1, "");
    expect("lambda = 1\n", 1, "lambda");
    expect("[model]\ncounter_term = maybe\n", 2, "counter_term");
    expect("[variants]\nlist = exact, magic\n", 2, "list");
    expect("[time]\nn_points = -3\n", 2, "n_points");

    RunConfig cfg;
    cfg.n_points = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.temperature = {5.0, 1.0, 3, true};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.coupling = {0.0, 0.1, 3, true};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.coupling.log = false;
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("coefficients table") {
    RunConfig cfg;
    auto t = cmd_coefficients(cfg);
    CHECK(t.rows[0][t.column("reorganisation")] == doctest::Approx(10.0));
    CHECK(t.rows[0][t.column("S_zero")] == doctest::Approx(-5.0).epsilon(1e-8));
    CHECK(t.rows[0][t.column("stable")] == 1.0);

    cfg.model.counter_term = false;
    t = cmd_coefficients(cfg);
    CHECK(t.rows[0][t.column("stable")] == 0.0);

    cfg.model.coupling = 0.0;
    t = cmd_coefficients(cfg);
    for (std::size_t i = 1; i < t.header.size() - 1; ++i) CHECK(t.rows[0][i] == 0.0);
}

TEST_CASE("dynamics: uncoupled variants coincide") {
    RunConfig cfg;
    cfg.model.coupling = 0.0;
    cfg.t_max = 20.0;
    cfg.n_points = 21;
    const auto t = cmd_dynamics(cfg);
    CHECK(t.header.size() == 1 + 3 * 5);
    for (const auto& row : t.rows)
        for (std::size_t v = 1; v < 5; ++v)
            for (std::size_t q = 0; q < 3; ++q) CHECK(std::abs(row[1 + 3 * v + q] - row[1 + q]) < 1e-8);
}

TEST_CASE("dynamics: recipe variant ends at the classical mean-force state") {
    RunConfig cfg;
    cfg.model.temperature = 10.0;
    cfg.variants = {VariantSpec::parse("redfield_shifted_noLS")};
    cfg.t_max = 300.0;
    cfg.n_points = 4;
    const auto t = cmd_dynamics(cfg);
    const auto target = mean_force_classical(cfg.model);
    CHECK(std::abs(t.rows.back()[1] - target.xx()) < 1e-4);
    CHECK(std::abs(t.rows.back()[2] - target.pp()) < 1e-4);
}

TEST_CASE("dynamics: unstable variants need an explicit override") {
    RunConfig cfg;
    cfg.model.counter_term = false;
    cfg.variants = {VariantSpec::parse("redfield_LS")};
    cfg.t_max = 5.0;
    cfg.n_points = 6;
    CHECK_THROWS_AS(cmd_dynamics(cfg), UnstableError);
    cfg.allow_unstable = true;
    CHECK_NOTHROW(cmd_dynamics(cfg));
    cfg.variants = {VariantSpec::parse("exact")};
    CHECK_THROWS_AS(cmd_dynamics(cfg), UnstableError);
}

TEST_CASE("steady table") {
    RunConfig cfg;
    cfg.model.temperature = 10.0;
    cfg.variants = default_variants();
    cfg.variants.push_back({Method::gkls, true, false});
    const auto t = cmd_steady(cfg);
    const auto f = t.column("fidelity");
    CHECK(t.labels[0] == "exact");
    CHECK(t.rows[0][f] == 1.0);
    CHECK(t.rows[2][f] < 0.9);   // secular with the counter term
    CHECK(t.rows[3][f] >= 0.99); // shifted, no Lamb shift

    cfg.model.coupling = 1e-6;
    const auto weak = cmd_steady(cfg);
    for (const auto& row : weak.rows) CHECK(row[f] == doctest::Approx(1.0).epsilon(1e-4));

    cfg.model.coupling = 0.1;
    cfg.model.counter_term = false;
    CHECK_THROWS_AS(cmd_steady(cfg), UnstableError);
}

TEST_CASE("fidelity map") {
    RunConfig cfg;
    cfg.temperature = {0.05, 10.0, 3, false};
    cfg.temperature = {0.05, 10.0, 2, true};
    cfg.coupling = {0.0, 0.1, 2, false};
    const auto t = cmd_fidelity_map(cfg);
    REQUIRE(t.rows.size() == 4);
    CHECK(t.header == std::vector<std::string>{"T", "lambda", "fidelity_redfield_LS", "fidelity_gkls", "fidelity_shifted_noLS", "stable"});
    // Row-major: T outer, lambda inner.
    CHECK(t.rows[0][0] == 0.05);
    CHECK(t.rows[1][1] == 0.1);
    for (int r : {0, 2})
        for (int c : {2, 3, 4}) CHECK(t.rows[r][c] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.rows[3][4] >= 0.99);
    CHECK(t.rows[1][4] < t.rows[3][4]);

    // Unstable points are flagged, not fatal.
    cfg.model.counter_term = false;
    const auto u = cmd_fidelity_map(cfg);
    CHECK(u.rows[1][5] == 0.0);
    CHECK(std::isnan(u.rows[1][4]));
    CHECK(u.rows[0][5] == 1.0);
}

TEST_CASE("parallel map is deterministic and propagates the first error") {
    std::vector<int> out(100);
    parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
    try {
        parallel_for(10, 3, [](std::size_t i) {
            if (i == 7 || i == 4) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "4");
    }
}

TEST_CASE("identical configurations give byte-identical output") {
    RunConfig cfg;
    cfg.temperature = {0.5, 5.0, 3, true};
    cfg.coupling = {0.01, 0.1, 3, true};
    cfg.threads = 3;
    const auto a = to_csv(cmd_fidelity_map(cfg));
    cfg.threads = 1;
    CHECK(to_csv(cmd_fidelity_map(cfg)) == a);
}

}
