#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(fs::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("hgtidf_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    Result run(std::string const& args) const
    {
        auto const out = dir_ / "stdout.txt";
        auto const err = dir_ / "stderr.txt";
        std::string const cmd = std::string("'") + HGTIDF_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" +
                                err.string() + "'";
        int const status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
    }

    fs::path write(std::string const& name, std::string const& content) const
    {
        auto const p = dir_ / name;
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }

    // Ingests the two-document toy corpus and returns the snapshot path.
    std::string toy_snapshot() const
    {
        auto const corpus = write("toy.jsonl", "{\"id\":\"d1\",\"text\":\"a a b\"}\n{\"id\":\"d2\",\"text\":\"b\"}\n");
        auto const r = run("ingest --corpus '" + corpus.string() + "' --out '" + (dir_ / "toy").string() +
                           "' --no-stopwords");
        EXPECT_EQ(r.code, 0) << r.err;
        return (dir_ / "toy" / "stats.bin").string();
    }

    std::string synthetic_snapshot(std::size_t docs, std::uint64_t seed) const
    {
        auto const corpus = dir_ / "synth.jsonl";
        auto r = run("synth --docs " + std::to_string(docs) + " --vocab 1500 --seed " + std::to_string(seed) +
                     " --out '" + corpus.string() + "'");
        EXPECT_EQ(r.code, 0) << r.err;
        r = run("ingest --corpus '" + corpus.string() + "' --out '" + (dir_ / "synth").string() + "'");
        EXPECT_EQ(r.code, 0) << r.err;
        return (dir_ / "synth" / "stats.bin").string();
    }

    fs::path dir_;
};

std::size_t count_lines(std::string const& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_F(CliTest, IngestWritesSummary)
{
    toy_snapshot();
    auto const summary = nlohmann::json::parse(slurp(dir_ / "toy" / "summary.json"));
    EXPECT_EQ(summary["documents"], 2);
    EXPECT_EQ(summary["vocabulary"], 2);
    EXPECT_EQ(summary["tokens"], 4);
}

TEST_F(CliTest, MissingCorpusFailsWithOneLine)
{
    auto const r = run("ingest --corpus '" + (dir_ / "nope.jsonl").string() + "' --out '" + dir_.string() + "'");
    EXPECT_NE(r.code, 0);
    EXPECT_EQ(count_lines(r.err), 1U) << r.err;
    EXPECT_NE(r.err.find("nope.jsonl"), std::string::npos);
}

TEST_F(CliTest, BadFlagsFailWithOneLine)
{
    auto const r = run("query --snapshot x");
    EXPECT_NE(r.code, 0);
    EXPECT_EQ(count_lines(r.err), 1U) << r.err;
    EXPECT_NE(run("").code, 0);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(CliTest, QueryPrintsFisherScore)
{
    auto const snap = toy_snapshot();
    auto const r = run("query --snapshot '" + snap + "' --term a --scorer fisher --seed 1");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "rank,doc_id,score\n1,d1,0.693147\n2,d2,0.000000\n");
}

TEST_F(CliTest, QueryUnknownTermNamesIt)
{
    auto const snap = toy_snapshot();
    auto const r = run("query --snapshot '" + snap + "' --term zebra --seed 1");
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.err.find("zebra"), std::string::npos);
    EXPECT_EQ(count_lines(r.err), 1U);
}

TEST_F(CliTest, QueryTpAndTpIdfShareOrder)
{
    auto const snap = synthetic_snapshot(120, 3);
    for (std::string term : {"w5", "w40", "b3"}) {
        auto order = [&](std::string const& scorer) {
            auto const r = run("query --snapshot '" + snap + "' --term " + term + " --scorer " + scorer +
                               " --seed 8 --k 200");
            EXPECT_EQ(r.code, 0) << r.err;
            std::istringstream lines(r.out);
            std::string line, ids;
            while (std::getline(lines, line)) {
                ids += line.substr(0, line.rfind(',')) + "\n";
            }
            return ids;
        };
        EXPECT_EQ(order("tp"), order("tp_idf")) << term;
    }
}

TEST_F(CliTest, QueryKBeyondCorpusSize)
{
    auto const snap = toy_snapshot();
    auto const r = run("query --snapshot '" + snap + "' --term b --k 50 --seed 1");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(count_lines(r.out), 3U);
}

TEST_F(CliTest, SummarizeIsDeterministicAndChecksDoc)
{
    auto const snap = synthetic_snapshot(60, 4);
    auto const a = run("summarize --snapshot '" + snap + "' --doc d07 --seed 5");
    auto const b = run("summarize --snapshot '" + snap + "' --doc d07 --seed 5");
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(count_lines(a.out), 11U);  // header + default m = 10
    EXPECT_NE(run("summarize --snapshot '" + snap + "' --doc nope --seed 5").code, 0);
}

TEST_F(CliTest, ExperimentsAreByteIdenticalAcrossRunsAndThreads)
{
    auto const snap = synthetic_snapshot(150, 5);
    for (std::string which : {"one_term", "two_term", "summarization"}) {
        std::string extra = which == "two_term" ? " --total-bursty 30 --min-doc-freq 5" : "";
        auto const one = dir_ / ("t1_" + which);
        auto const three = dir_ / ("t3_" + which);
        auto const again = dir_ / ("again_" + which);
        for (auto const& [out, threads] : {std::pair{one, 1}, std::pair{three, 3}, std::pair{again, 1}}) {
            auto const r = run("experiment --snapshot '" + snap + "' --which " + which + " --seed 42 --threads " +
                               std::to_string(threads) + " --out '" + out.string() + "'" + extra);
            ASSERT_EQ(r.code, 0) << r.err;
        }
        for (auto const& entry : fs::directory_iterator(one)) {
            auto const name = entry.path().filename();
            EXPECT_EQ(slurp(entry.path()), slurp(three / name)) << name;
            EXPECT_EQ(slurp(entry.path()), slurp(again / name)) << name;
        }
    }
    auto const table = slurp(dir_ / "t1_two_term" / "two_term_table.csv");
    EXPECT_EQ(count_lines(table), 1U + 6U);  // header + one row per common term
    EXPECT_TRUE(fs::exists(dir_ / "t1_summarization" / "summarization_histogram.csv"));
}

TEST_F(CliTest, SurrogateRegressOnExactLine)
{
    std::string points = "x,y\n";
    for (int i = 0; i < 20; ++i) {
        double const x = 1.0 + 0.25 * i;
        char line[64];
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", x, 2.47 * x + 1.03);
        points += line;
    }
    auto const file = write("points.csv", points);
    auto const r =
        run("surrogate --which regress --points '" + file.string() + "' --out '" + (dir_ / "reg").string() + "'");
    ASSERT_EQ(r.code, 0) << r.err;
    auto const j = nlohmann::json::parse(slurp(dir_ / "reg" / "regression.json"));
    EXPECT_EQ(j["r_squared"].get<double>(), 1.0);
    EXPECT_NEAR(j["beta_hat"].get<double>(), 2.47, 1e-12);
    EXPECT_EQ(j["n_points"], 20);
}

TEST_F(CliTest, SurrogateChvatalAndGrid)
{
    auto r = run("surrogate --which chvatal --max-total 30 --out '" + dir_.string() + "'");
    ASSERT_EQ(r.code, 0) << r.err;
    auto const j = nlohmann::json::parse(slurp(dir_ / "chvatal.json"));
    EXPECT_EQ(j["violations"], 0);
    EXPECT_GT(j["exhaustive"]["tuples"].get<int>(), 10000);

    r = run("surrogate --which grid --function g --resolution 20 --n 100 --out '" + dir_.string() + "'");
    ASSERT_EQ(r.code, 0) << r.err;
    auto const grid = slurp(dir_ / "grid_g.csv");
    EXPECT_EQ(grid.rfind("p,q,value\n", 0), 0U);
    EXPECT_EQ(count_lines(grid), 1U + 190U);
}
