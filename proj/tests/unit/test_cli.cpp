#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "gnls/config.hpp"
#include "gnls/drivers.hpp"
#include "gnls/errors.hpp"
#include "gnls/output.hpp"
#include "gnls/pool.hpp"

using namespace gnls;

TEST(Config, MinimalConfigAppliesDefaults) {
    const RunConfig c = parse_config_text("[params]\nbeta2 = 0.4\n");
    EXPECT_EQ(c.params.beta2, 0.4);
    EXPECT_EQ(c.params.beta4, -1.0);
    EXPECT_EQ(c.params.gamma, 1.0);
    EXPECT_EQ(c.params.mu, 1.0);
}

TEST(Config, DuplicateKeyIsParseErrorWithLine) {
    try {
        parse_config_text("[params]\nbeta2 = 0.4\n# comment\nbeta2 = 0.5\n");
        FAIL() << "no exception";
    } catch (const UnknownKey&) {
        FAIL() << "wrong type";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line, 4);
    }
}

TEST(Config, UnknownKeyIsRejected) {
    try {
        parse_config_text("[params]\nbeta2 = 0.4\nbeta3 = 1\n");
        FAIL() << "no exception";
    } catch (const UnknownKey& e) {
        EXPECT_EQ(e.line, 3);
    }
    EXPECT_THROW(parse_config_text("[nosuch]\nx = 1\n"), UnknownKey);
}

TEST(Config, SyntaxErrors) {
    EXPECT_THROW(parse_config_text("[params\nbeta2 = 1\n"), ParseError);
    EXPECT_THROW(parse_config_text("[params]\nbeta2 0.4\n"), ParseError);
    EXPECT_THROW(parse_config_text("[params]\nbeta2 = abc\n"), ParseError);
    EXPECT_THROW(parse_config_text("[run]\nk_max = 2.5\n"), ParseError);
    EXPECT_THROW(parse_config_text("[continuation]\nfamily = sideways\n"), ParseError);
    EXPECT_THROW(parse_config_text("[continuation]\nds_max = -1\n"), ParseError);
    EXPECT_THROW(parse_config_text("[bifurcation]\nbeta2_lo = 0.9\nbeta2_hi = 0.5\n"), ParseError);
    EXPECT_THROW(parse_config_text("[params]\nbeta4 = 0\n"), ParseError);
}

TEST(Config, RoundTripIsExact) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(0.1, 0.9);
    for (int i = 0; i < 50; ++i) {
        RunConfig c;
        c.params.beta2 = d(rng);
        c.params.mu = d(rng);
        c.experiment = Experiment::Surface;
        c.output_dir = "out dir";
        c.seed.kind = "rstar";
        c.seed.u1 = d(rng);
        c.continuation.family = FamilyKind::Beta2Family;
        c.continuation.ds_max = d(rng) / 3;
        c.continuation.sections = false;
        c.bifurcation.kind = "BHAT";
        c.table1.curves = false;
        c.k_max = 9;
        c.seed_rng = 1234567890123ULL;
        EXPECT_EQ(parse_config_text(format_config(c)), c);
    }
}

TEST(Config, ExperimentNames) {
    EXPECT_EQ(experiment_from_string("find-orbit"), Experiment::FindOrbit);
    EXPECT_EQ(experiment_from_string("bif_curve"), Experiment::BifCurve);
    EXPECT_THROW(experiment_from_string("plot"), std::invalid_argument);
}

TEST(Config, WorkerCapFromEnvironment) {
    RunConfig c;
    c.workers = 8;
    setenv("GNLS_MAX_WORKERS", "3", 1);
    EXPECT_EQ(effective_workers(c), 3);
    unsetenv("GNLS_MAX_WORKERS");
    EXPECT_EQ(effective_workers(c), 8);
}

TEST(Output, RealsRoundTripAt17Digits) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-1e6, 1e6);
    for (int i = 0; i < 10000; ++i) {
        const double x = d(rng) * std::pow(10.0, int(rng() % 40) - 20);
        EXPECT_EQ(std::stod(format_real(x)), x);
    }
    EXPECT_EQ(format_real(0.1), "0.10000000000000001");
}

TEST(Output, CsvQuotingFollowsRfc4180) {
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
    Table t{"t", {{"name", ""}, {"x", ""}, {"n", ""}}, {}};
    t.add({std::string("a,\"b\"\r\nc"), 0.5, 3LL});
    t.add({std::string(""), -1e-300, -7LL});
    const std::string csv = to_csv(t);
    EXPECT_NE(csv.find("\r\n"), std::string::npos);
    const auto rows = parse_csv(csv);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1][0], "a,\"b\"\r\nc");
    EXPECT_EQ(std::stod(rows[2][1]), -1e-300);
    EXPECT_EQ(rows[2][2], "-7");
}

TEST(Output, TableRejectsWrongWidth) {
    Table t{"t", {{"a", ""}}, {}};
    EXPECT_THROW(t.add({1.0, 2.0}), std::invalid_argument);
}

TEST(Output, WriteResultsAndEventLog) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "gnls_unit_out";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        EventLog log((dir / "events.jsonl").string());
        log.emit("a", {{"x", 1.5}, {"n", 2LL}, {"s", std::string("q\"")}});
        log.emit("b");
    }
    ResultRecord rec;
    rec.config.params.beta2 = 0.61;
    rec.git_describe = build_git_describe();
    rec.tables.push_back(Table{"demo", {{"x", "a number"}}, {{0.25}}});
    write_results(rec, dir.string());
    for (const char* f : {"demo.csv", "record.json", "config.ini"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
    std::ifstream ev(dir / "events.jsonl");
    std::string l1, l2;
    std::getline(ev, l1);
    std::getline(ev, l2);
    EXPECT_NE(l1.find("\"event\":\"a\""), std::string::npos);
    EXPECT_NE(l2.find("\"seq\":1"), std::string::npos);
    EXPECT_EQ(parse_config((dir / "config.ini").string()), rec.config);
    std::ifstream rj(dir / "record.json");
    std::stringstream ss;
    ss << rj.rdbuf();
    EXPECT_NE(ss.str().find("git_describe"), std::string::npos);
    EXPECT_NE(ss.str().find("a number"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Pool, ResultsAreOrderedByIndex) {
    std::vector<int> out(200, -1);
    std::atomic<int> calls{0};
    parallel_for(200, 4, [&](int i) {
        out[i] = i * i;
        ++calls;
    });
    EXPECT_EQ(calls.load(), 200);
    for (int i = 0; i < 200; ++i) EXPECT_EQ(out[i], i * i);
}

TEST(Pool, RethrowsLowestFailingIndex) {
    try {
        parallel_for(50, 3, [](int i) {
            if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
        });
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_STREQ(e.what(), "7");
    }
}

TEST(Drivers, ExitCodePolicy) {
    ResultRecord r;
    r.config.experiment = Experiment::Table1;
    r.rows_total = 10;
    r.rows_failed = 2;
    EXPECT_EQ(exit_code(r), 0);
    r.rows_failed = 3;
    EXPECT_EQ(exit_code(r), 2);
    r.config.experiment = Experiment::Continue;
    r.rows_total = 1;
    r.rows_failed = 1;
    EXPECT_EQ(exit_code(r), 2);
    r.rows_failed = 0;
    EXPECT_EQ(exit_code(r), 0);
}

TEST(Drivers, EquilibriaRecord) {
    RunConfig c;
    c.experiment = Experiment::Equilibria;
    EventLog log;
    const ResultRecord r = run_experiment(c, log);
    ASSERT_EQ(r.tables.size(), 2u);
    EXPECT_EQ(r.tables[0].rows.size(), 3u);
    EXPECT_NEAR(std::get<double>(r.tables[1].rows[0][1]), std::sqrt(2.0 / 3.0), 1e-15);
    EXPECT_EQ(exit_code(r), 0);
}

TEST(Drivers, DeterministicCsvPayload) {
    RunConfig c;
    c.experiment = Experiment::Floquet;
    c.seed.kind = "rstar";
    EventLog log;
    const std::string a = to_csv(run_experiment(c, log).tables[1]);
    const std::string b = to_csv(run_experiment(c, log).tables[1]);
    EXPECT_EQ(a, b);
}

TEST(Drivers, StoredOrbitRevalidates) {
    RunConfig c;
    c.experiment = Experiment::FindOrbit;
    c.seed.kind = "rstar";
    EventLog log;
    const ResultRecord r = run_experiment(c, log);
    const auto rows = parse_csv(to_csv(r.tables[0]));
    const double H = std::stod(rows[1][1]), T = std::stod(rows[1][2]);
    const OrbitSolution o = build_seed(c);
    const OrbitSolution again = newton_solve(o, Constraint::energy(H));
    EXPECT_NEAR(again.energy, H, 1e-6);
    EXPECT_NEAR(again.period, T, 1e-6);
}
