#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;

struct Result {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("kanbun_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(const std::string& args) {
    const auto err = dir_ / "stderr.txt";
    const std::string cmd = std::string("'") + KANBUN_CLI_PATH + "' " + args + " 2>'" + err.string() + "'";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int raw = pclose(p);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.err = slurp(err);
    return r;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name, std::ios::binary) << text; }
  static std::string data(const std::string& name) { return std::string(KANBUN_DATA_DIR) + "/sample/" + name; }

  fs::path dir_;
};

TEST_F(Cli, HelpExitsZero) {
  const auto r = run("--help");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("extract"), std::string::npos);
}

TEST_F(Cli, UnknownFlagIsUsageError) {
  const auto r = run("stats " + data("corpus.tsv") + " --bogus");
  EXPECT_EQ(r.status, 2);
  EXPECT_EQ(r.err.rfind("error\tUsage\t-:0\t", 0), 0u) << r.err;
}

TEST_F(Cli, DataErrorNamesFileAndLine) {
  write("bad.tsv", "a-1\ta\t春眠不覚暁\t12543\t春眠暁を覚えず\t\nb-1\tb\t春眠不覚暁\t12x43\t春眠暁を覚えず\t\n");
  const auto r = run("stats " + path("bad.tsv"));
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(r.err.rfind("error\tParseError\t" + path("bad.tsv") + ":2\t", 0), 0u) << r.err;
}

TEST_F(Cli, EvalOrderOnIdenticalFiles) {
  const auto r = run("eval-order " + data("corpus.tsv") + " " + data("corpus.tsv"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("tau_mean\t1.000000\n"), std::string::npos);
  EXPECT_NE(r.out.find("pmr\t1.000000\n"), std::string::npos);
}

TEST_F(Cli, RenderMarks) {
  write("c.tsv", "shungyo-1\tshungyo\t春眠不覚暁\t12543\t春眠暁を覚えず\t\n");
  const auto r = run("render-kaeriten " + path("c.tsv"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out, "shungyo-1\t春眠不[レ]覚[レ]暁\n");
  write("m.tsv", r.out);
  const auto back = run("parse-kaeriten " + path("m.tsv"));
  ASSERT_EQ(back.status, 0) << back.err;
  EXPECT_NE(back.out.find("12543"), std::string::npos);
}

TEST_F(Cli, ExtractMatchesShippedCorpus) {
  const auto r = run("extract " + data("raw.tsv") + " -a " + data("annotations.tsv"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out, slurp(data("corpus.tsv")));
}

TEST_F(Cli, StatsOnSample) {
  const auto r = run("stats " + data("corpus.tsv"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("poems\t7"), std::string::npos);
  EXPECT_NE(r.out.find("sentences\t20"), std::string::npos);
  EXPECT_NE(r.out.find("characters\t106"), std::string::npos);
}

TEST_F(Cli, ReorderIsIndependentOfJobs) {
  ASSERT_EQ(run("train " + data("corpus.tsv") + " -m " + path("model.txt")).status, 0);
  const auto one = run("reorder " + data("corpus.tsv") + " -m " + path("model.txt") + " -j 1");
  const auto four = run("reorder " + data("corpus.tsv") + " -m " + path("model.txt") + " -j 4");
  ASSERT_EQ(one.status, 0) << one.err;
  EXPECT_EQ(one.out, four.out);
  EXPECT_FALSE(one.out.empty());
}

TEST_F(Cli, SplitIsReproducible) {
  ASSERT_EQ(run("split " + data("corpus.tsv") + " -o " + path("a") + " --seed 3").status, 0);
  ASSERT_EQ(run("split " + data("corpus.tsv") + " -o " + path("b") + " --seed 3").status, 0);
  for (const char* f : {"train.tsv", "validation.tsv", "test.tsv"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
  EXPECT_EQ(run("split " + data("corpus.tsv") + " -o " + path("c") + " --ratios 0.5,0.5,0.5").status, 2);
}

TEST_F(Cli, Correlate) {
  const auto r = run("correlate " + data("auto_scores.tsv") + " " + data("human_scores.tsv"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out.rfind("# kanbun-correlation-report v1\nmetric\tcriterion\titems\tpearson\tspearman\n", 0), 0u);
  EXPECT_NE(r.out.find("bleu\tadequacy\t6\t"), std::string::npos);
  EXPECT_NE(r.out.find("[agreement]\ncriterion\traters\tcategories\tfleiss_kappa\nadequacy\t3\t"), std::string::npos);
}

TEST_F(Cli, PipelineWithoutTranslator) {
  const auto r = run("pipeline " + data("corpus.tsv") + " --no-reorder");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("春眠不覚暁"), std::string::npos);
}

}  // namespace
