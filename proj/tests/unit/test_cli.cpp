#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "srrc/srrc.hpp"
#include "srrc_cli/cli.hpp"

namespace fs = std::filesystem;
using namespace srrc;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string value_of(const std::string& out, const std::string& key) {
    std::istringstream is(out);
    std::string line;
    while (std::getline(is, line)) {
        if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
    }
    return {};
}

struct Workspace {
    fs::path dir;
    Workspace() {
        dir = fs::temp_directory_path() / ("srrc_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("simulate writes the requested grid") {
    Workspace ws;
    const Result r = run({"simulate", "--regime", "chaotic", "--out", ws("c.csv")});
    CHECK(r.code == 0);
    const CsvTable t = read_csv(ws("c.csv"));
    CHECK(t.rows.rows() == 12000);
    CHECK(t.rows.cols() == 4);
    CHECK(t.header == std::vector<std::string>{"t", "x1", "x2", "x3"});

    CHECK(run({"simulate", "--regime", "periodic", "--samples", "100", "--out", ws("p.csv")}).code == 0);
    CHECK(read_csv(ws("p.csv")).rows.rows() == 100);

    CHECK(run({"simulate", "--params", "0.5,0.1,0.1", "--ic", "1,1,1", "--samples", "100", "--out", ws("q.csv")})
              .code == 0);
    CHECK(slurp(ws("q.csv")) == slurp(ws("p.csv")));
}

TEST_CASE("simulate usage errors") {
    Workspace ws;
    const Result missing = run({"simulate", "--regime", "chaotic"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("--out") != std::string::npos);
    CHECK(missing.err.find("Usage") != std::string::npos);
    CHECK(run({"simulate", "--out", ws("x.csv")}).code == 2);
    CHECK(run({"simulate", "--regime", "weird", "--out", ws("x.csv")}).code == 2);
    CHECK(run({"simulate", "--regime", "chaotic", "--samples", "1", "--out", ws("x.csv")}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"bogus"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("train reports diagnostics and validates flags") {
    Workspace ws;
    REQUIRE(run({"simulate", "--regime", "chaotic", "--samples", "2000", "--t-end", "20", "--out", ws("c.csv")}).code == 0);
    const Result r = run({"train", "--input", ws("c.csv"), "--lag", "1", "--order", "2", "--train-frac", "0.5",
                          "--seed", "9", "--out", ws("m.json")});
    CHECK(r.code == 0);
    CHECK(value_of(r.out, "train_rows") == "1000");
    CHECK(!value_of(r.out, "rank").empty());
    CHECK(!value_of(r.out, "nnz").empty());
    CHECK(!value_of(r.out, "residual").empty());
    CHECK(value_of(r.out, "seed") == "9");
    CHECK(value_of(r.out, "rng") == "mt19937_64/polar-box-muller/v1");
    const RRCModel m = load_model(ws("m.json"));
    CHECK(m.diagnostics.samples == 999);

    CHECK(run({"train", "--input", ws("c.csv"), "--lag", "0", "--out", ws("m2.json")}).code == 2);
    CHECK(run({"train", "--input", ws("c.csv"), "--out", ws("m2.json")}).code == 2);
    CHECK(run({"train", "--input", ws("missing.csv"), "--lag", "1", "--out", ws("m2.json")}).code == 2);
    CHECK(run({"train", "--input", ws("c.csv"), "--lag", "1", "--train-frac", "1.5", "--out", ws("m2.json")}).code == 2);

    const Result rank_zero = run({"train", "--input", ws("c.csv"), "--lag", "1", "--delta", "1e9", "--out", ws("m2.json")});
    CHECK(rank_zero.code == 1);
    CHECK(rank_zero.err.find("delta") != std::string::npos);
}

TEST_CASE("train on the periodic regime with a short training block") {
    Workspace ws;
    REQUIRE(run({"simulate", "--regime", "periodic", "--out", ws("p.csv")}).code == 0);
    const Result r = run({"train", "--input", ws("p.csv"), "--lag", "1", "--order", "3", "--train-frac", "0.0667",
                          "--out", ws("m.json")});
    CHECK(r.code == 0);
    CHECK(value_of(r.out, "train_rows") == "801");
}

TEST_CASE("train with an explicit target series") {
    Workspace ws;
    REQUIRE(run({"simulate", "--regime", "chaotic", "--samples", "300", "--t-end", "3", "--out", ws("c.csv")}).code == 0);
    const Result r = run({"train", "--input", ws("c.csv"), "--target", ws("c.csv"), "--lag", "2", "--order", "1",
                          "--delta", "1e-10", "--epsilon", "1e-12", "--out", ws("m.json")});
    CHECK(r.code == 0);
    CHECK(std::stod(value_of(r.out, "relative_residual")) < 1e-9);
}

TEST_CASE("forecast follows transform and scores against truth") {
    Workspace ws;
    REQUIRE(run({"simulate", "--regime", "chaotic", "--samples", "2000", "--t-end", "20", "--out", ws("c.csv")}).code == 0);
    REQUIRE(run({"train", "--input", ws("c.csv"), "--lag", "1", "--order", "3", "--delta", "1e-7", "--epsilon", "1e-7",
                 "--train-frac", "0.5", "--out", ws("m.json")})
                .code == 0);

    const Result one = run({"forecast", "--model", ws("m.json"), "--seed-data", ws("c.csv"), "--seed-end", "1000",
                            "--horizon", "1", "--out", ws("f1.csv")});
    CHECK(one.code == 0);
    const RRCModel m = load_model(ws("m.json"));
    const TimeSeries c = read_series(ws("c.csv"));
    const TimeSeries f1 = read_series(ws("f1.csv"));
    CHECK(f1.values.row(0).transpose() == transform(m, delay_embed(c, 1, 1000)).selected);
    CHECK(f1.time[0] == c.time[999] + *c.dt);

    const Result scored = run({"forecast", "--model", ws("m.json"), "--seed-data", ws("c.csv"), "--seed-end", "1000",
                               "--horizon", "20", "--truth", ws("c.csv"), "--truth-start", "1001", "--out", ws("f.csv")});
    CHECK(scored.code == 0);
    CHECK(std::stod(value_of(scored.out, "nrmse_x1")) < 1e-3);
    CHECK(!value_of(scored.out, "nrmse_x3").empty());

    const Result long_run = run({"forecast", "--model", ws("m.json"), "--seed-data", ws("c.csv"), "--horizon", "1000",
                                 "--out", ws("f.csv")});
    if (long_run.code == 0) {
        CHECK(read_csv(ws("f.csv")).rows.rows() == 1000);
    } else {
        CHECK(long_run.code == 1);
        CHECK(!value_of(long_run.out, "blowup_step").empty());
    }

    CHECK(run({"forecast", "--model", ws("m.json"), "--seed-data", ws("c.csv"), "--horizon", "0", "--out", ws("f.csv")})
              .code == 2);
    CHECK(run({"forecast", "--model", ws("m.json"), "--seed-data", ws("c.csv"), "--horizon", "5", "--truth",
               ws("c.csv"), "--truth-start", "1999", "--out", ws("f.csv")})
              .code == 2);
}

TEST_CASE("forecast reports the blowup step") {
    Workspace ws;
    {
        std::ofstream g(ws("g.csv"));
        g << "t,x1\n";
        double x = 1.0;
        for (int k = 0; k < 20; ++k, x *= 1.5) g << k << ',' << format_real(x) << '\n';
    }
    REQUIRE(run({"train", "--input", ws("g.csv"), "--lag", "1", "--order", "1", "--delta", "1e-10", "--out",
                 ws("m.json")})
                .code == 0);
    const Result r = run({"forecast", "--model", ws("m.json"), "--seed-data", ws("g.csv"), "--horizon", "500", "--out",
                          ws("f.csv")});
    CHECK(r.code == 1);
    CHECK(r.err.find("step") != std::string::npos);
    CHECK(!value_of(r.out, "blowup_step").empty());
}

TEST_CASE("a corrupted model file is a runtime failure") {
    Workspace ws;
    {
        std::ofstream bad(ws("bad.json"));
        bad << "{\"format\": \"other\"}";
        std::ofstream s(ws("s.csv"));
        s << "t,x1\n1,1\n";
    }
    const Result r = run({"forecast", "--model", ws("bad.json"), "--seed-data", ws("s.csv"), "--horizon", "1", "--out",
                          ws("f.csv")});
    CHECK(r.code == 1);
    CHECK(r.err.find("format") != std::string::npos);
}

TEST_CASE("exposure on a planted panel") {
    Workspace ws;
    REQUIRE(run({"synth-panel", "--remittances", ws("r.csv"), "--deposits", ws("d.csv"), "--planted", ws("p.csv")})
                .code == 0);
    const Result r = run({"exposure", "--remittances", ws("r.csv"), "--deposits", ws("d.csv"), "--lagged", "--out",
                          ws("e.csv"), "--adjacency", ws("a.csv"), "--fitted", ws("f.csv")});
    CHECK(r.code == 0);
    const CsvTable report = read_csv(ws("e.csv"));
    CHECK(report.header == std::vector<std::string>{"institution", "exposure", "rank"});
    CHECK(report.rows.rows() == 15);
    CHECK(report.rows.col(1).maxCoeff() <= 1e-8);
    std::vector<double> ranks(report.rows.col(2).data(), report.rows.col(2).data() + 15);
    std::sort(ranks.begin(), ranks.end());
    for (int k = 0; k < 15; ++k) CHECK(ranks[static_cast<std::size_t>(k)] == k + 1);
    CHECK(read_csv(ws("a.csv")).header == std::vector<std::string>{"institution", "region", "lag", "weight"});
    const CsvTable fitted = read_csv(ws("f.csv"));
    CHECK(fitted.rows.rows() == 23);
    CHECK(fitted.rows.cols() == 31);
}

TEST_CASE("exposure usage and data errors") {
    Workspace ws;
    REQUIRE(run({"synth-panel", "--quarters", "2", "--remittances", ws("r.csv"), "--deposits", ws("d.csv")}).code == 0);
    CHECK(run({"exposure", "--remittances", ws("r.csv"), "--deposits", ws("d.csv"), "--lagged", "--out", ws("e.csv")})
              .code == 2);

    REQUIRE(run({"synth-panel", "--regions", "3", "--institutions", "3", "--quarters", "12", "--remittances", ws("r.csv"),
                 "--deposits", ws("d.csv")})
                .code == 0);
    CsvTable d = read_csv(ws("d.csv"));
    d.rows.col(2).setZero();
    write_text(ws("d0.csv"), format_csv(d));
    const Result degenerate =
        run({"exposure", "--remittances", ws("r.csv"), "--deposits", ws("d0.csv"), "--out", ws("e.csv")});
    CHECK(degenerate.code == 1);
    CHECK(degenerate.err.find("d2") != std::string::npos);
    CHECK(degenerate.err.find("institution 2") != std::string::npos);

    CHECK(run({"exposure", "--remittances", ws("r.csv"), "--deposits", ws("d.csv"), "--train-frac", "0", "--out",
               ws("e.csv")})
              .code == 2);
}

TEST_CASE("suggest-lag") {
    Workspace ws;
    {
        std::ofstream s(ws("s.csv"));
        s << "t,a,b\n";
        for (int k = 0; k < 200; ++k) s << k << ",5," << std::cos(2.0 * 3.14159265358979323846 * k / 40.0) << '\n';
        std::ofstream tiny(ws("tiny.csv"));
        tiny << "t,a\n1,1\n2,2\n";
    }
    const Result r = run({"suggest-lag", "--input", ws("s.csv")});
    CHECK(r.code == 0);
    CHECK(value_of(r.out, "lag_a") == "1");
    CHECK(value_of(r.out, "lag_b") == "8");
    CHECK(value_of(r.out, "suggested") == "8");
    CHECK(r.err.find("warning") != std::string::npos);
    CHECK(run({"suggest-lag", "--input", ws("tiny.csv")}).code == 2);
}

TEST_CASE("every command is byte-for-byte reproducible") {
    Workspace ws;
    auto twice = [&](std::vector<std::string> args, const std::string& file) {
        const Result a = run(args);
        const std::string first = slurp(ws(file));
        const Result b = run(args);
        CHECK_MESSAGE(a.code == 0, args[0] << ": " << a.err);
        CHECK(a.out == b.out);
        CHECK(a.err == b.err);
        CHECK(first == slurp(ws(file)));
        CHECK(!first.empty());
    };
    twice({"simulate", "--regime", "chaotic", "--samples", "1500", "--t-end", "15", "--out", ws("c.csv")}, "c.csv");
    twice({"train", "--input", ws("c.csv"), "--lag", "1", "--order", "3", "--delta", "1e-7", "--epsilon", "1e-7",
           "--train-frac", "0.6", "--seed", "4", "--out",
           ws("m.json")},
          "m.json");
    twice({"forecast", "--model", ws("m.json"), "--seed-data", ws("c.csv"), "--seed-end", "900", "--horizon", "20",
           "--truth", ws("c.csv"), "--truth-start", "901", "--out", ws("f.csv")},
          "f.csv");
    twice({"synth-panel", "--seed", "3", "--noise", "0.01", "--remittances", ws("r.csv"), "--deposits", ws("d.csv")},
          "d.csv");
    twice({"exposure", "--remittances", ws("r.csv"), "--deposits", ws("d.csv"), "--out", ws("e.csv")}, "e.csv");
    twice({"suggest-lag", "--input", ws("c.csv")}, "c.csv");
}
